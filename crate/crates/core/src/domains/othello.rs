//! 6x6 Othello on two 36-bit bitboards.
//!
//! Square `r * 6 + c` is bit `r * 6 + c`; row 0 is the top edge. Black (`X`)
//! moves first. A side without a legal move passes; the game ends when
//! neither side can move.

use std::fmt;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::SearchError;
use crate::model::{GameAdapter, Value};

pub const SIDE: usize = 6;
pub const SQUARES: usize = SIDE * SIDE;
const FULL: u64 = (1 << SQUARES) - 1;
const COL0: u64 = 0b000001_000001_000001_000001_000001_000001;
const COL5: u64 = COL0 << 5;
const NOT_COL0: u64 = FULL & !COL0;
const NOT_COL5: u64 = FULL & !COL5;

/// Disc weight of a finished game; large enough to dominate any heuristic
/// score.
const WIN_WEIGHT: Value = 64;
const MOBILITY_WEIGHT: Value = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Color {
    Black,
    White,
}

impl Color {
    pub fn opponent(self) -> Color {
        match self {
            Color::Black => Color::White,
            Color::White => Color::Black,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Color::Black => 'X',
            Color::White => 'O',
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

/// Board occupancy and side to move. Reachability from the opening is not
/// required.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct OthelloPosition {
    black: u64,
    white: u64,
    to_move: Color,
}

fn shift(b: u64, dir: usize) -> u64 {
    match dir {
        0 => (b << 1) & NOT_COL0,
        1 => (b >> 1) & NOT_COL5,
        2 => (b << 6) & FULL,
        3 => b >> 6,
        4 => (b << 7) & NOT_COL0,
        5 => (b << 5) & NOT_COL5,
        6 => (b >> 5) & NOT_COL0,
        _ => (b >> 7) & NOT_COL5,
    }
}

fn moves_for(me: u64, opp: u64) -> u64 {
    let empty = FULL & !(me | opp);
    let mut moves = 0;
    for dir in 0..8 {
        let mut run = shift(me, dir) & opp;
        for _ in 0..SIDE - 3 {
            run |= shift(run, dir) & opp;
        }
        moves |= shift(run, dir) & empty;
    }
    moves
}

fn flips_for(me: u64, opp: u64, sq: usize) -> u64 {
    let placed = 1u64 << sq;
    let mut flips = 0;
    for dir in 0..8 {
        let mut line = 0;
        let mut cur = shift(placed, dir);
        while cur & opp != 0 {
            line |= cur;
            cur = shift(cur, dir);
        }
        if cur & me != 0 {
            flips |= line;
        }
    }
    flips
}

impl OthelloPosition {
    /// Opening position: White on the long diagonal of the centre, Black on
    /// the other two centre squares, Black to move.
    pub fn standard() -> Self {
        let sq = |r: usize, c: usize| 1u64 << (r * SIDE + c);
        OthelloPosition {
            black: sq(2, 3) | sq(3, 2),
            white: sq(2, 2) | sq(3, 3),
            to_move: Color::Black,
        }
    }

    pub fn new(black: u64, white: u64, to_move: Color) -> Result<Self, SearchError> {
        if black & white != 0 || (black | white) & !FULL != 0 {
            return Err(SearchError::InvalidArgument(
                "othello bitboards overlap or use squares outside the 6x6 board".into(),
            ));
        }
        Ok(OthelloPosition {
            black,
            white,
            to_move,
        })
    }

    /// Parses 36 characters of `.`, `X`, `O` (row-major from the top left)
    /// and a side-to-move symbol.
    pub fn from_board_str(board: &str, side: &str) -> Result<Self, SearchError> {
        let bad = |m: String| SearchError::InvalidArgument(m);
        if board.chars().count() != SQUARES {
            return Err(bad(format!(
                "board string must have {SQUARES} characters, got {}",
                board.chars().count()
            )));
        }
        let (mut black, mut white) = (0u64, 0u64);
        for (i, ch) in board.chars().enumerate() {
            match ch {
                'X' | 'x' => black |= 1 << i,
                'O' | 'o' => white |= 1 << i,
                '.' | '-' => {}
                other => return Err(bad(format!("unexpected board character `{other}`"))),
            }
        }
        let to_move = match side {
            "X" | "x" => Color::Black,
            "O" | "o" => Color::White,
            other => return Err(bad(format!("side to move must be X or O, got `{other}`"))),
        };
        OthelloPosition::new(black, white, to_move)
    }

    pub fn board_string(&self) -> String {
        (0..SQUARES)
            .map(|i| match self.color_at(i) {
                Some(c) => c.symbol(),
                None => '.',
            })
            .collect()
    }

    pub fn color_at(&self, sq: usize) -> Option<Color> {
        let bit = 1u64 << sq;
        if self.black & bit != 0 {
            Some(Color::Black)
        } else if self.white & bit != 0 {
            Some(Color::White)
        } else {
            None
        }
    }

    pub fn to_move(&self) -> Color {
        self.to_move
    }

    fn mine_theirs(&self) -> (u64, u64) {
        match self.to_move {
            Color::Black => (self.black, self.white),
            Color::White => (self.white, self.black),
        }
    }

    pub fn disc_count(&self, c: Color) -> u32 {
        match c {
            Color::Black => self.black.count_ones(),
            Color::White => self.white.count_ones(),
        }
    }

    /// Bitmask of legal moves for the side to move.
    pub fn legal_moves(&self) -> u64 {
        let (me, opp) = self.mine_theirs();
        moves_for(me, opp)
    }

    pub fn opponent_moves(&self) -> u64 {
        let (me, opp) = self.mine_theirs();
        moves_for(opp, me)
    }

    pub fn is_game_over(&self) -> bool {
        self.legal_moves() == 0 && self.opponent_moves() == 0
    }

    /// Discs flipped by playing `sq`; zero when the move is illegal.
    pub fn flips(&self, sq: usize) -> u64 {
        let (me, opp) = self.mine_theirs();
        if (me | opp) & (1 << sq) != 0 {
            return 0;
        }
        flips_for(me, opp, sq)
    }

    /// Plays `sq`, which must be legal.
    pub fn play(&self, sq: usize) -> OthelloPosition {
        let flips = self.flips(sq);
        debug_assert!(flips != 0, "illegal move {sq}");
        let (mut me, mut opp) = self.mine_theirs();
        me |= flips | (1 << sq);
        opp &= !flips;
        self.with_sides(me, opp)
    }

    pub fn pass(&self) -> OthelloPosition {
        let (me, opp) = self.mine_theirs();
        self.with_sides(me, opp)
    }

    fn with_sides(&self, me: u64, opp: u64) -> OthelloPosition {
        match self.to_move {
            Color::Black => OthelloPosition {
                black: me,
                white: opp,
                to_move: Color::White,
            },
            Color::White => OthelloPosition {
                black: opp,
                white: me,
                to_move: Color::Black,
            },
        }
    }

    /// Disc differential plus a mobility term, for the side to move. A
    /// finished game scores the disc differential alone, heavily weighted.
    pub fn evaluate(&self) -> Value {
        let (me, opp) = self.mine_theirs();
        let discs = me.count_ones() as Value - opp.count_ones() as Value;
        let my_moves = moves_for(me, opp).count_ones() as Value;
        let their_moves = moves_for(opp, me).count_ones() as Value;
        if my_moves == 0 && their_moves == 0 {
            return WIN_WEIGHT * discs;
        }
        discs + MOBILITY_WEIGHT * (my_moves - their_moves)
    }
}

impl fmt::Display for OthelloPosition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let board = self.board_string();
        for row in board.as_bytes().chunks(SIDE) {
            writeln!(f, "{}", std::str::from_utf8(row).unwrap())?;
        }
        write!(f, "{} to move", self.to_move.symbol())
    }
}

/// Static move ordering: corners, then edges, then the interior, with the
/// squares diagonally next to a corner last.
const SQUARE_ORDER: [usize; SQUARES] = {
    let mut order = [0usize; SQUARES];
    let mut n = 0;
    let mut class = 0;
    while class < 4 {
        let mut sq = 0;
        while sq < SQUARES {
            let (r, c) = (sq / SIDE, sq % SIDE);
            let edge_r = r == 0 || r == SIDE - 1;
            let edge_c = c == 0 || c == SIDE - 1;
            let near_r = r == 1 || r == SIDE - 2;
            let near_c = c == 1 || c == SIDE - 2;
            let sq_class = if edge_r && edge_c {
                0
            } else if near_r && near_c {
                3
            } else if edge_r || edge_c {
                1
            } else {
                2
            };
            if sq_class == class {
                order[n] = sq;
                n += 1;
            }
            sq += 1;
        }
        class += 1;
    }
    order
};

struct Zobrist {
    squares: [[u64; 2]; SQUARES],
    white_to_move: u64,
}

fn zobrist() -> &'static Zobrist {
    static TABLE: OnceLock<Zobrist> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(0x0e11_0600_0000_0036);
        let mut squares = [[0u64; 2]; SQUARES];
        for s in squares.iter_mut() {
            *s = [rng.gen(), rng.gen()];
        }
        Zobrist {
            squares,
            white_to_move: rng.gen(),
        }
    })
}

/// Zobrist key computed from scratch.
pub fn zobrist_key(pos: &OthelloPosition) -> u64 {
    let z = zobrist();
    let mut key = 0;
    for sq in 0..SQUARES {
        if let Some(c) = pos.color_at(sq) {
            key ^= z.squares[sq][c.index()];
        }
    }
    if pos.to_move == Color::White {
        key ^= z.white_to_move;
    }
    key
}

/// A position together with its incrementally maintained key.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct OthelloNode {
    pub board: OthelloPosition,
    pub key: u64,
}

impl OthelloNode {
    pub fn new(board: OthelloPosition) -> Self {
        OthelloNode {
            board,
            key: zobrist_key(&board),
        }
    }

    pub fn play(&self, sq: usize) -> OthelloNode {
        let z = zobrist();
        let mover = self.board.to_move.index();
        let other = 1 - mover;
        let flips = self.board.flips(sq);
        let mut key = self.key ^ z.white_to_move ^ z.squares[sq][mover];
        let mut f = flips;
        while f != 0 {
            let s = f.trailing_zeros() as usize;
            key ^= z.squares[s][mover] ^ z.squares[s][other];
            f &= f - 1;
        }
        OthelloNode {
            board: self.board.play(sq),
            key,
        }
    }

    pub fn pass(&self) -> OthelloNode {
        OthelloNode {
            board: self.board.pass(),
            key: self.key ^ zobrist().white_to_move,
        }
    }

    /// Successors in static move order; a lone pass when the side to move is
    /// stuck but the game is not over; empty when the game is over.
    pub fn successors(&self) -> Vec<OthelloNode> {
        let moves = self.board.legal_moves();
        if moves == 0 {
            if self.board.opponent_moves() == 0 {
                return Vec::new();
            }
            return vec![self.pass()];
        }
        SQUARE_ORDER
            .iter()
            .filter(|&&sq| moves & (1 << sq) != 0)
            .map(|&sq| self.play(sq))
            .collect()
    }
}

pub struct OthelloAdapter {
    start: OthelloNode,
}

impl OthelloAdapter {
    pub fn new(start: OthelloPosition) -> Self {
        OthelloAdapter {
            start: OthelloNode::new(start),
        }
    }

    pub fn standard() -> Self {
        OthelloAdapter::new(OthelloPosition::standard())
    }

    pub fn start(&self) -> &OthelloPosition {
        &self.start.board
    }
}

impl GameAdapter for OthelloAdapter {
    type Position = OthelloNode;

    fn root(&self) -> OthelloNode {
        self.start
    }

    fn successors(&self, pos: &OthelloNode) -> Vec<OthelloNode> {
        pos.successors()
    }

    fn evaluate(&self, pos: &OthelloNode) -> Value {
        pos.board.evaluate()
    }

    fn is_terminal(&self, pos: &OthelloNode, remaining_depth: u32) -> bool {
        remaining_depth == 0 || pos.board.is_game_over()
    }

    fn key(&self, pos: &OthelloNode) -> u64 {
        pos.key
    }

    fn max_branching(&self) -> usize {
        SQUARES - 4
    }

    fn value_bounds(&self) -> (Value, Value) {
        let max = WIN_WEIGHT * SQUARES as Value;
        (-max, max)
    }

    fn aspiration_delta(&self) -> Value {
        MOBILITY_WEIGHT
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Move generator written against a plain array, independent of the
    /// bitboard shifts.
    fn naive_moves(pos: &OthelloPosition) -> Vec<(usize, Vec<usize>)> {
        let me = pos.to_move();
        let mut out = Vec::new();
        for sq in 0..SQUARES {
            if pos.color_at(sq).is_some() {
                continue;
            }
            let (r, c) = ((sq / SIDE) as i32, (sq % SIDE) as i32);
            let mut flips = Vec::new();
            for (dr, dc) in [
                (-1, -1),
                (-1, 0),
                (-1, 1),
                (0, -1),
                (0, 1),
                (1, -1),
                (1, 0),
                (1, 1),
            ] {
                let mut line = Vec::new();
                let (mut rr, mut cc) = (r + dr, c + dc);
                while (0..SIDE as i32).contains(&rr) && (0..SIDE as i32).contains(&cc) {
                    let s = (rr * SIDE as i32 + cc) as usize;
                    match pos.color_at(s) {
                        Some(col) if col == me.opponent() => line.push(s),
                        Some(_) => {
                            flips.append(&mut line);
                            break;
                        }
                        None => break,
                    }
                    rr += dr;
                    cc += dc;
                }
            }
            if !flips.is_empty() {
                flips.sort();
                out.push((sq, flips));
            }
        }
        out
    }

    fn naive_play(pos: &OthelloPosition, sq: usize, flips: &[usize]) -> OthelloPosition {
        let mut black = pos.black;
        let mut white = pos.white;
        let mut set = 1u64 << sq;
        for f in flips {
            set |= 1 << f;
        }
        match pos.to_move() {
            Color::Black => {
                black |= set;
                white &= !set;
            }
            Color::White => {
                white |= set;
                black &= !set;
            }
        }
        OthelloPosition::new(black, white, pos.to_move().opponent()).unwrap()
    }

    /// Leaf count of the full game tree to `depth`, where a forced pass
    /// counts as a move and a finished game is a leaf.
    fn naive_perft(pos: &OthelloPosition, depth: u32) -> u64 {
        if depth == 0 {
            return 1;
        }
        let moves = naive_moves(pos);
        if moves.is_empty() {
            let passed =
                OthelloPosition::new(pos.black, pos.white, pos.to_move().opponent()).unwrap();
            if naive_moves(&passed).is_empty() {
                return 1;
            }
            return naive_perft(&passed, depth - 1);
        }
        moves
            .iter()
            .map(|(sq, f)| naive_perft(&naive_play(pos, *sq, f), depth - 1))
            .sum()
    }

    fn perft(node: &OthelloNode, depth: u32) -> u64 {
        if depth == 0 {
            return 1;
        }
        let kids = node.successors();
        if kids.is_empty() {
            return 1;
        }
        kids.iter().map(|k| perft(k, depth - 1)).sum()
    }

    #[test]
    fn perft_matches_array_oracle() {
        let start = OthelloNode::new(OthelloPosition::standard());
        for depth in 1..=5 {
            assert_eq!(
                perft(&start, depth),
                naive_perft(&start.board, depth),
                "depth {depth}"
            );
        }
    }

    #[test]
    fn perft_frozen_counts() {
        // Fixed by exhaustive enumeration with the array-based oracle above.
        let start = OthelloNode::new(OthelloPosition::standard());
        let counts: Vec<u64> = (1..=4).map(|d| perft(&start, d)).collect();
        assert_eq!(counts, vec![4, 12, 56, 244]);
    }

    #[test]
    fn move_generation_matches_oracle_along_random_games() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let mut node = OthelloNode::new(OthelloPosition::standard());
            loop {
                let moves = node.board.legal_moves();
                let naive = naive_moves(&node.board);
                let naive_mask = naive.iter().fold(0u64, |m, (s, _)| m | 1 << s);
                assert_eq!(moves, naive_mask, "\n{}", node.board);
                for (sq, f) in &naive {
                    let mask = f.iter().fold(0u64, |m, s| m | 1 << s);
                    assert_eq!(node.board.flips(*sq), mask);
                }
                let kids = node.successors();
                if kids.is_empty() {
                    break;
                }
                node = kids[rng.gen_range(0..kids.len())];
                assert_eq!(node.key, zobrist_key(&node.board));
            }
        }
    }

    #[test]
    fn terminal_evaluation_favours_more_discs() {
        let board: String = "X".repeat(20) + &"O".repeat(16);
        let x = OthelloPosition::from_board_str(&board, "X").unwrap();
        assert!(x.is_game_over());
        assert!(x.evaluate() > 0);
        let o = OthelloPosition::from_board_str(&board, "O").unwrap();
        assert!(o.evaluate() < 0);
        assert_eq!(x.evaluate(), -o.evaluate());
    }

    #[test]
    fn board_string_round_trip() {
        let s = OthelloPosition::standard();
        let text = s.board_string();
        assert_eq!(text, "..............OX....XO..............");
        assert_eq!(OthelloPosition::from_board_str(&text, "X").unwrap(), s);
    }

    #[test]
    fn malformed_boards_rejected() {
        assert!(OthelloPosition::from_board_str("XO", "X").is_err());
        assert!(OthelloPosition::from_board_str(&"?".repeat(36), "X").is_err());
        assert!(OthelloPosition::from_board_str(&".".repeat(36), "Z").is_err());
        assert!(OthelloPosition::new(1, 1, Color::Black).is_err());
        assert!(OthelloPosition::new(1 << 40, 0, Color::Black).is_err());
    }

    #[test]
    fn key_after_move_matches_recomputation() {
        let start = OthelloNode::new(OthelloPosition::standard());
        for kid in start.successors() {
            assert_eq!(kid.key, zobrist_key(&kid.board));
            assert_ne!(kid.key, start.key);
            assert_eq!(kid.pass().key, zobrist_key(&kid.board.pass()));
        }
    }

    #[test]
    fn stuck_side_passes() {
        // X to move with no legal move; O can still play.
        let board = "OX..................................";
        let pos = OthelloPosition::from_board_str(board, "X").unwrap();
        assert_eq!(pos.legal_moves(), 0);
        assert_ne!(pos.opponent_moves(), 0);
        let node = OthelloNode::new(pos);
        let kids = node.successors();
        assert_eq!(kids.len(), 1);
        assert_eq!(kids[0].board.to_move(), Color::White);
        assert_eq!(kids[0].board.board_string(), board);
    }

    #[test]
    fn static_order_starts_with_corners() {
        assert_eq!(&SQUARE_ORDER[..4], &[0, 5, 30, 35]);
        assert_eq!(&SQUARE_ORDER[SQUARES - 4..], &[7, 10, 25, 28]);
        let mut sorted = SQUARE_ORDER;
        sorted.sort();
        assert_eq!(sorted.to_vec(), (0..SQUARES).collect::<Vec<_>>());
    }
}
