//! Root-level loops over [`Searcher`] calls.
//!
//! The MT drivers differ only in how they pick the null window for the next
//! pass: AB-SSS* walks down from `+INF` through successive upper bounds,
//! AB-DUAL* walks up from `-INF`, MTD(f) starts at a guess and zigzags, and
//! MTD-bi bisects the remaining interval. The table glues the passes
//! together so each pass re-expands only what the new window needs.

use std::fmt;
use std::str::FromStr;

use crate::error::SearchError;
use crate::model::{classify_result, GameAdapter, ResultClass, Value, Window, INF};
use crate::search::{SearchStats, Searcher};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    /// Wide-window Alpha-Beta with no table.
    AlphaBeta,
    /// Wide-window Alpha-Beta with the table.
    AlphaBetaTt,
    NegaScout,
    AspirationNegaScout,
    AbSss,
    AbDual,
    MtdF,
    MtdBi,
}

impl Algorithm {
    pub const ALL: [Algorithm; 8] = [
        Algorithm::AlphaBeta,
        Algorithm::AlphaBetaTt,
        Algorithm::NegaScout,
        Algorithm::AspirationNegaScout,
        Algorithm::AbSss,
        Algorithm::AbDual,
        Algorithm::MtdF,
        Algorithm::MtdBi,
    ];

    /// Reference algorithm for ratios.
    pub const BASELINE: Algorithm = Algorithm::AspirationNegaScout;

    pub fn id(&self) -> &'static str {
        match self {
            Algorithm::AlphaBeta => "ab",
            Algorithm::AlphaBetaTt => "ab-tt",
            Algorithm::NegaScout => "negascout",
            Algorithm::AspirationNegaScout => "asp-negascout",
            Algorithm::AbSss => "ab-sss",
            Algorithm::AbDual => "ab-dual",
            Algorithm::MtdF => "mtd-f",
            Algorithm::MtdBi => "mtd-bi",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Algorithm {
    type Err = SearchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.id() == s)
            .ok_or_else(|| SearchError::UnknownAlgorithm(s.to_string()))
    }
}

/// One root-level Alpha-Beta call made by a driver.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundStep {
    /// The test value the driver aimed at. For null-window drivers this is
    /// the value whose bound is being tested; for wide windows it is beta.
    pub gamma: Value,
    pub window: Window,
    pub g: Value,
    pub class: ResultClass,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DriverResult {
    pub value: Value,
    pub ab_calls: u64,
    pub bound_history: Vec<BoundStep>,
    /// Searcher counters after the run (cumulative over the searcher's life).
    pub stats: SearchStats,
}

/// Inputs that only some drivers use.
#[derive(Clone, Copy, Debug)]
pub struct DriverParams {
    /// MTD(f) first guess and aspiration centre.
    pub guess: Value,
    /// Aspiration half-width; the adapter's default when `None`.
    pub aspiration_delta: Option<Value>,
    /// Bisection interval; the adapter's value bounds when `None`.
    pub bisect_bounds: Option<(Value, Value)>,
    pub max_calls: u64,
}

impl Default for DriverParams {
    fn default() -> Self {
        DriverParams {
            guess: 0,
            aspiration_delta: None,
            bisect_bounds: None,
            max_calls: 1_000_000,
        }
    }
}

struct Run<'s, G: GameAdapter> {
    searcher: &'s mut Searcher<G>,
    root: G::Position,
    depth: u32,
    history: Vec<BoundStep>,
    driver: &'static str,
    max_calls: u64,
}

#[derive(Clone, Copy)]
enum Procedure {
    Memory,
    Scout,
    Plain,
}

impl<'s, G: GameAdapter> Run<'s, G> {
    fn new(
        searcher: &'s mut Searcher<G>,
        depth: u32,
        driver: &'static str,
        max_calls: u64,
    ) -> Self {
        let root = searcher.root();
        Run {
            searcher,
            root,
            depth,
            history: Vec::new(),
            driver,
            max_calls,
        }
    }

    fn call(
        &mut self,
        gamma: Value,
        window: Window,
        proc: Procedure,
    ) -> Result<Value, SearchError> {
        if self.history.len() as u64 >= self.max_calls {
            return Err(SearchError::NonConvergence {
                driver: self.driver,
                calls: self.history.len() as u64,
            });
        }
        let g = match proc {
            Procedure::Memory => self.searcher.mt_alphabeta(&self.root, window, self.depth)?,
            Procedure::Scout => self.searcher.negascout(&self.root, window, self.depth)?,
            Procedure::Plain => self
                .searcher
                .plain_alphabeta(&self.root, window, self.depth)?,
        };
        self.history.push(BoundStep {
            gamma,
            window,
            g,
            class: classify_result(g, window),
        });
        Ok(g)
    }

    fn unsound(&self, detail: String) -> SearchError {
        SearchError::Unsound {
            driver: self.driver,
            detail,
        }
    }

    fn finish(self, value: Value) -> DriverResult {
        DriverResult {
            value,
            ab_calls: self.history.len() as u64,
            bound_history: self.history,
            stats: self.searcher.stats(),
        }
    }
}

fn single_call<G: GameAdapter>(
    s: &mut Searcher<G>,
    depth: u32,
    driver: &'static str,
    proc: Procedure,
) -> Result<DriverResult, SearchError> {
    let mut run = Run::new(s, depth, driver, 1);
    let g = run.call(INF, Window::FULL, proc)?;
    Ok(run.finish(g))
}

pub fn alphabeta<G: GameAdapter>(
    s: &mut Searcher<G>,
    depth: u32,
) -> Result<DriverResult, SearchError> {
    single_call(s, depth, "ab", Procedure::Plain)
}

pub fn alphabeta_tt<G: GameAdapter>(
    s: &mut Searcher<G>,
    depth: u32,
) -> Result<DriverResult, SearchError> {
    single_call(s, depth, "ab-tt", Procedure::Memory)
}

pub fn negascout<G: GameAdapter>(
    s: &mut Searcher<G>,
    depth: u32,
) -> Result<DriverResult, SearchError> {
    single_call(s, depth, "negascout", Procedure::Scout)
}

/// SSS* as a sequence of null-window searches: start at `+INF` and test
/// each returned upper bound until a pass fails high on it.
pub fn ab_sss<G: GameAdapter>(
    s: &mut Searcher<G>,
    depth: u32,
    max_calls: u64,
) -> Result<DriverResult, SearchError> {
    let mut run = Run::new(s, depth, "ab-sss", max_calls);
    let mut g = INF;
    loop {
        let gamma = g;
        g = run.call(gamma, Window::null_below(gamma)?, Procedure::Memory)?;
        if g == gamma {
            return Ok(run.finish(g));
        }
        if g > gamma {
            return Err(run.unsound(format!(
                "pass at {gamma} returned {g} above the previous upper bound"
            )));
        }
    }
}

/// DUAL* as a sequence of null-window searches: start at `-INF` and test
/// each returned lower bound until a pass fails low on it.
pub fn ab_dual<G: GameAdapter>(
    s: &mut Searcher<G>,
    depth: u32,
    max_calls: u64,
) -> Result<DriverResult, SearchError> {
    let mut run = Run::new(s, depth, "ab-dual", max_calls);
    let mut g = -INF;
    loop {
        let gamma = g;
        g = run.call(gamma, Window::new(gamma, gamma + 1)?, Procedure::Memory)?;
        if g == gamma {
            return Ok(run.finish(g));
        }
        if g < gamma {
            return Err(run.unsound(format!(
                "pass at {gamma} returned {g} below the previous lower bound"
            )));
        }
    }
}

/// MTD(f): null-window passes starting at `guess`, narrowing `[f-, f+]`
/// until the bounds meet.
pub fn mtd_f<G: GameAdapter>(
    s: &mut Searcher<G>,
    depth: u32,
    guess: Value,
    max_calls: u64,
) -> Result<DriverResult, SearchError> {
    let mut run = Run::new(s, depth, "mtd-f", max_calls);
    let mut g = guess.clamp(-INF, INF);
    let (mut lower, mut upper) = (-INF, INF);
    loop {
        let gamma = if g == lower { g + 1 } else { g };
        g = run.call(gamma, Window::null_below(gamma)?, Procedure::Memory)?;
        let before = (lower, upper);
        if g < gamma {
            upper = g;
        } else {
            lower = g;
        }
        if lower > upper {
            return Err(run.unsound(format!("bounds crossed: lower {lower} above upper {upper}")));
        }
        if (lower, upper) == before {
            return Err(SearchError::NonConvergence {
                driver: "mtd-f",
                calls: run.history.len() as u64,
            });
        }
        if lower == upper {
            return Ok(run.finish(g));
        }
    }
}

/// Bisection over `[lo, hi]`, which must contain the minimax value. Each
/// pass tests the ceiling of the midpoint, kept inside `(f-, f+]`.
pub fn mtd_bi<G: GameAdapter>(
    s: &mut Searcher<G>,
    depth: u32,
    lo: Value,
    hi: Value,
    max_calls: u64,
) -> Result<DriverResult, SearchError> {
    if lo > hi {
        return Err(SearchError::InvalidArgument(format!(
            "bisection interval [{lo}, {hi}] is empty"
        )));
    }
    let mut run = Run::new(s, depth, "mtd-bi", max_calls);
    let (mut lower, mut upper) = (lo.max(-INF), hi.min(INF));
    loop {
        let gamma = if lower == upper {
            upper
        } else {
            let mid = (lower as i64 + upper as i64 + 1).div_euclid(2) as Value;
            mid.clamp(lower + 1, upper)
        };
        let g = run.call(gamma, Window::null_below(gamma)?, Procedure::Memory)?;
        if g < gamma {
            upper = g;
        } else {
            lower = g;
        }
        if lower > upper {
            return Err(run.unsound(format!(
                "bounds crossed at lower {lower}, upper {upper}; was the value inside [{lo}, {hi}]?"
            )));
        }
        if lower == upper {
            return Ok(run.finish(g));
        }
    }
}

/// NegaScout inside `<prev - delta, prev + delta>`, re-searched with a
/// window open on the failing side until the result is exact.
pub fn aspiration_negascout<G: GameAdapter>(
    s: &mut Searcher<G>,
    depth: u32,
    prev: Value,
    delta: Value,
    max_calls: u64,
) -> Result<DriverResult, SearchError> {
    if delta <= 0 {
        return Err(SearchError::InvalidArgument(format!(
            "aspiration delta must be positive, got {delta}"
        )));
    }
    let mut run = Run::new(s, depth, "asp-negascout", max_calls);
    let alpha = prev.saturating_sub(delta).clamp(-INF, INF - 1);
    let beta = prev.saturating_add(delta).clamp(alpha + 1, INF);
    let mut window = Window::new(alpha, beta)?;
    loop {
        let g = run.call(window.beta, window, Procedure::Scout)?;
        window = match classify_result(g, window) {
            ResultClass::Exact => return Ok(run.finish(g)),
            ResultClass::FailLow if window.alpha > -INF => Window::new(-INF, g + 1)?,
            ResultClass::FailHigh if window.beta < INF => Window::new(g - 1, INF)?,
            class => {
                return Err(run.unsound(format!("{class} at {g} with window {window}")));
            }
        };
    }
}

/// Runs `alg` once at `depth` from the searcher's root.
pub fn run_algorithm<G: GameAdapter>(
    alg: Algorithm,
    s: &mut Searcher<G>,
    depth: u32,
    params: &DriverParams,
) -> Result<DriverResult, SearchError> {
    let max = params.max_calls;
    match alg {
        Algorithm::AlphaBeta => alphabeta(s, depth),
        Algorithm::AlphaBetaTt => alphabeta_tt(s, depth),
        Algorithm::NegaScout => negascout(s, depth),
        Algorithm::AspirationNegaScout => {
            let delta = params
                .aspiration_delta
                .unwrap_or_else(|| s.adapter().aspiration_delta());
            aspiration_negascout(s, depth, params.guess, delta, max)
        }
        Algorithm::AbSss => ab_sss(s, depth, max),
        Algorithm::AbDual => ab_dual(s, depth, max),
        Algorithm::MtdF => mtd_f(s, depth, params.guess, max),
        Algorithm::MtdBi => {
            let (lo, hi) = params
                .bisect_bounds
                .unwrap_or_else(|| s.adapter().value_bounds());
            mtd_bi(s, depth, lo, hi, max)
        }
    }
}

/// Runs depths `1..=max_depth` on one searcher, so the table carries over
/// between iterations. Each iteration's guess (MTD(f) start value,
/// aspiration centre) is the previous iteration's value; the first uses
/// `params.guess`. Returned stats are cumulative.
pub fn iterative_deepening<G: GameAdapter>(
    alg: Algorithm,
    s: &mut Searcher<G>,
    max_depth: u32,
    params: &DriverParams,
) -> Result<Vec<DriverResult>, SearchError> {
    if max_depth == 0 {
        return Err(SearchError::InvalidArgument(
            "max_depth must be at least 1".into(),
        ));
    }
    let mut params = *params;
    let mut out = Vec::with_capacity(max_depth as usize);
    for depth in 1..=max_depth {
        s.table_mut().clear_generation();
        let r = run_algorithm(alg, s, depth, &params)?;
        params.guess = r.value;
        out.push(r);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::synthetic::{Shape, SyntheticTree};
    use crate::search::SearchConfig;
    use ResultClass::*;

    const CAP: u64 = 10_000;

    fn small_tree() -> SyntheticTree {
        SyntheticTree::from_leaves(2, 2, &[3, 5, 2, 1]).unwrap()
    }

    fn searcher(t: &SyntheticTree) -> Searcher<&SyntheticTree> {
        Searcher::new(t, SearchConfig::with_tt_bits(8).traced()).unwrap()
    }

    fn history(r: &DriverResult) -> Vec<(Value, Value, ResultClass)> {
        r.bound_history
            .iter()
            .map(|s| (s.gamma, s.g, s.class))
            .collect()
    }

    fn leaf_values(t: &SyntheticTree, s: &Searcher<&SyntheticTree>) -> Vec<Value> {
        s.trace()
            .unwrap()
            .0
            .iter()
            .map(|k| t.leaf_value_by_key(*k).unwrap())
            .collect()
    }

    #[test]
    fn algorithm_ids_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.id().parse::<Algorithm>().unwrap(), a);
        }
        assert!(matches!(
            "sss".parse::<Algorithm>(),
            Err(SearchError::UnknownAlgorithm(_))
        ));
    }

    #[test]
    fn ab_sss_on_small_tree() {
        let t = small_tree();
        let mut s = searcher(&t);
        let r = ab_sss(&mut s, 2, CAP).unwrap();
        assert_eq!(r.value, 3);
        assert_eq!(r.ab_calls, 2);
        assert_eq!(history(&r), vec![(INF, 3, FailLow), (3, 3, FailHigh)]);
        assert_eq!(leaf_values(&t, &s), vec![3, 2, 5]);
    }

    #[test]
    fn ab_dual_on_small_tree() {
        let t = small_tree();
        let mut s = searcher(&t);
        let r = ab_dual(&mut s, 2, CAP).unwrap();
        assert_eq!(r.value, 3);
        let h = history(&r);
        assert_eq!((h[0].0, h[0].2), (-INF, FailHigh));
        assert!(h[0].1 <= 3);
        assert_eq!(*h.last().unwrap(), (3, 3, FailLow));
    }

    #[test]
    fn single_leaf_trees() {
        let seven = SyntheticTree::from_shape(&Shape::leaf(7)).unwrap();
        let mut s = searcher(&seven);
        assert_eq!(ab_sss(&mut s, 3, CAP).unwrap().value, 7);
        let minus_four = SyntheticTree::from_shape(&Shape::leaf(-4)).unwrap();
        let mut s = searcher(&minus_four);
        assert_eq!(ab_dual(&mut s, 3, CAP).unwrap().value, -4);
    }

    #[test]
    fn mtd_f_on_small_tree() {
        let t = small_tree();
        let mut s = searcher(&t);
        let r = mtd_f(&mut s, 2, 3, CAP).unwrap();
        assert_eq!((r.value, r.ab_calls), (3, 2));

        let mut s = searcher(&t);
        let r = mtd_f(&mut s, 2, 0, CAP).unwrap();
        assert_eq!((r.value, r.ab_calls), (3, 2));
        assert_eq!(history(&r), vec![(0, 3, FailHigh), (4, 3, FailLow)]);
    }

    #[test]
    fn mtd_f_from_infinity_matches_ab_sss_trace() {
        let t = small_tree();
        let mut a = searcher(&t);
        let mut b = searcher(&t);
        let ra = mtd_f(&mut a, 2, INF, CAP).unwrap();
        let rb = ab_sss(&mut b, 2, CAP).unwrap();
        assert_eq!(ra.value, rb.value);
        assert_eq!(a.trace(), b.trace());
    }

    #[test]
    fn mtd_bi_on_small_tree() {
        let t = small_tree();
        let mut s = searcher(&t);
        let r = mtd_bi(&mut s, 2, -16, 16, CAP).unwrap();
        assert_eq!(r.value, 3);
        assert!(r.ab_calls <= 7, "{} calls", r.ab_calls);
    }

    #[test]
    fn mtd_bi_degenerate_interval() {
        let t = SyntheticTree::from_leaves(3, 2, &[5; 9]).unwrap();
        let mut s = searcher(&t);
        let r = mtd_bi(&mut s, 2, 5, 5, CAP).unwrap();
        assert_eq!((r.value, r.ab_calls), (5, 1));
        assert!(mtd_bi(&mut s, 2, 6, 5, CAP).is_err());
    }

    #[test]
    fn mtd_bi_with_wrong_interval_is_reported() {
        let t = small_tree();
        let mut s = searcher(&t);
        assert!(matches!(
            mtd_bi(&mut s, 2, 10, 20, CAP),
            Err(SearchError::Unsound { .. })
        ));
    }

    #[test]
    fn aspiration_on_small_tree() {
        let t = small_tree();
        let mut s = searcher(&t);
        let r = aspiration_negascout(&mut s, 2, 3, 2, CAP).unwrap();
        assert_eq!((r.value, r.ab_calls), (3, 1));

        let mut s = searcher(&t);
        let r = aspiration_negascout(&mut s, 2, 10, 1, CAP).unwrap();
        assert_eq!((r.value, r.ab_calls), (3, 2));
        assert_eq!(r.bound_history[0].class, FailLow);

        let mut s = searcher(&t);
        let r = aspiration_negascout(&mut s, 2, -10, 1, CAP).unwrap();
        assert_eq!((r.value, r.ab_calls), (3, 2));
        assert_eq!(r.bound_history[0].class, FailHigh);

        assert!(aspiration_negascout(&mut s, 2, 0, 0, CAP).is_err());
    }

    #[test]
    fn call_cap_aborts() {
        let t = SyntheticTree::from_leaves(2, 2, &[30, 50, 20, 10]).unwrap();
        let mut s = searcher(&t);
        // One pass from -INF only proves some lower bound, never the value.
        let err = ab_dual(&mut s, 2, 1).unwrap_err();
        assert!(matches!(
            err,
            SearchError::NonConvergence {
                driver: "ab-dual",
                calls: 1
            }
        ));
    }

    #[test]
    fn iterative_deepening_base_case_matches_direct_call() {
        let t = small_tree();
        for alg in Algorithm::ALL {
            let mut a = searcher(&t);
            let id = iterative_deepening(alg, &mut a, 1, &DriverParams::default()).unwrap();
            let mut b = searcher(&t);
            let direct = run_algorithm(alg, &mut b, 1, &DriverParams::default()).unwrap();
            assert_eq!(id.len(), 1);
            assert_eq!(id[0].value, direct.value, "{alg}");
            assert_eq!(id[0].ab_calls, direct.ab_calls, "{alg}");
        }
        let mut s = searcher(&t);
        assert!(iterative_deepening(Algorithm::MtdF, &mut s, 0, &DriverParams::default()).is_err());
    }

    #[test]
    fn iterative_deepening_reuses_previous_value_as_guess() {
        let t = small_tree();
        let mut s = searcher(&t);
        let rs = iterative_deepening(Algorithm::MtdF, &mut s, 2, &DriverParams::default()).unwrap();
        assert_eq!(rs[1].bound_history[0].gamma, rs[0].value);
        assert!(rs[1].stats.nbp >= rs[0].stats.nbp);
    }
}
