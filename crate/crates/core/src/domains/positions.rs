//! Line-oriented position-set files.
//!
//! ```text
//! # comment
//! synthetic w=3 d=8 seed=42 p=0.9 model=edge range=100
//! othello standard
//! othello ..............OX....XO.............. X
//! ```

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use rand::seq::IteratorRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::domains::othello::OthelloPosition;
use crate::domains::synthetic::TreeConfig;
use crate::error::PositionSetError;

#[derive(Clone, Debug, PartialEq)]
pub enum PositionSource {
    Synthetic(TreeConfig),
    Othello(OthelloPosition),
}

impl PositionSource {
    pub fn domain_id(&self) -> &'static str {
        match self {
            PositionSource::Synthetic(_) => "synthetic",
            PositionSource::Othello(_) => "othello",
        }
    }
}

impl fmt::Display for PositionSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PositionSource::Synthetic(cfg) => write!(f, "{cfg}"),
            PositionSource::Othello(pos) => {
                write!(
                    f,
                    "othello {} {}",
                    pos.board_string(),
                    pos.to_move().symbol()
                )
            }
        }
    }
}

/// Parses one non-comment record.
pub fn parse_record(line: &str) -> Result<PositionSource, String> {
    let mut words = line.split_whitespace();
    match words.next() {
        Some("synthetic") => line
            .parse::<TreeConfig>()
            .map(PositionSource::Synthetic)
            .map_err(|e| e.to_string()),
        Some("othello") => {
            let rest: Vec<&str> = words.collect();
            match rest.as_slice() {
                ["standard"] | ["STANDARD"] => {
                    Ok(PositionSource::Othello(OthelloPosition::standard()))
                }
                [board, side] => OthelloPosition::from_board_str(board, side)
                    .map(PositionSource::Othello)
                    .map_err(|e| e.to_string()),
                _ => Err("expected `othello standard` or `othello <36 squares> <X|O>`".into()),
            }
        }
        Some(other) => Err(format!("unknown record kind `{other}`")),
        None => Err("empty record".into()),
    }
}

pub fn parse_position_set(
    text: &str,
    origin: &str,
) -> Result<Vec<PositionSource>, PositionSetError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let record = parse_record(line).map_err(|message| PositionSetError::Parse {
            path: origin.to_string(),
            line: i + 1,
            message,
        })?;
        out.push(record);
    }
    Ok(out)
}

pub fn load_position_set(path: impl AsRef<Path>) -> Result<Vec<PositionSource>, PositionSetError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| PositionSetError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_position_set(&text, &path.display().to_string())
}

pub fn save_position_set(
    path: impl AsRef<Path>,
    set: &[PositionSource],
) -> Result<(), PositionSetError> {
    let path = path.as_ref();
    let mut text = String::new();
    for p in set {
        text.push_str(&p.to_string());
        text.push('\n');
    }
    fs::write(path, text).map_err(|source| PositionSetError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Appends one record, creating the file if needed.
pub fn append_position(
    path: impl AsRef<Path>,
    record: &PositionSource,
) -> Result<(), PositionSetError> {
    let path = path.as_ref();
    let io = |source| PositionSetError::Io {
        path: path.display().to_string(),
        source,
    };
    let mut file = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(io)?;
    writeln!(file, "{record}").map_err(io)
}

/// Plies at which [`othello_game_positions`] samples each game.
pub const SAMPLE_PLIES: [u32; 4] = [8, 10, 12, 14];

/// Positions taken from seeded random games out of the standard opening,
/// [`SAMPLE_PLIES`] from each game. Games that end early contribute fewer
/// positions; finished positions are never returned.
pub fn othello_game_positions(seed: u64, count: usize) -> Vec<OthelloPosition> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut pos = OthelloPosition::standard();
        for ply in 1..=SAMPLE_PLIES[SAMPLE_PLIES.len() - 1] {
            let moves = pos.legal_moves();
            pos = if moves != 0 {
                let sq = (0..36)
                    .filter(|sq| moves & (1 << sq) != 0)
                    .choose(&mut rng)
                    .unwrap();
                pos.play(sq)
            } else {
                pos.pass()
            };
            if pos.is_game_over() {
                break;
            }
            if SAMPLE_PLIES.contains(&ply) && out.len() < count {
                out.push(pos);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::othello::Color;
    use crate::domains::synthetic::ValueModel;

    #[test]
    fn empty_text_is_empty_set() {
        assert!(parse_position_set("", "mem").unwrap().is_empty());
        assert!(parse_position_set("# nothing\n\n", "mem")
            .unwrap()
            .is_empty());
    }

    #[test]
    fn standard_othello_line() {
        let set = parse_position_set("othello standard\n", "mem").unwrap();
        assert_eq!(
            set,
            vec![PositionSource::Othello(OthelloPosition::standard())]
        );
        assert_eq!(set[0].domain_id(), "othello");
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse_position_set("othello standard\n\nchess e4\n", "set.txt").unwrap_err();
        assert_eq!(err.to_string(), "set.txt:3: unknown record kind `chess`");
        let err = parse_position_set("othello XO X", "set.txt").unwrap_err();
        assert!(matches!(err, PositionSetError::Parse { line: 1, .. }));
    }

    #[test]
    fn save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("set.txt");
        let set = vec![
            PositionSource::Synthetic(TreeConfig::new(3, 8, 42, ValueModel::EdgeDelta, 0.9, 100)),
            PositionSource::Othello(OthelloPosition::standard()),
            PositionSource::Synthetic(TreeConfig::new(2, 5, 7, ValueModel::IidLeaf, 1.0, 50)),
        ];
        save_position_set(&path, &set).unwrap();
        assert_eq!(load_position_set(&path).unwrap(), set);
        append_position(&path, &set[0]).unwrap();
        assert_eq!(load_position_set(&path).unwrap().len(), 4);
    }

    #[test]
    fn game_positions_are_live_and_deterministic() {
        let a = othello_game_positions(6, 20);
        assert_eq!(a.len(), 20);
        assert_eq!(a, othello_game_positions(6, 20));
        assert!(a.iter().all(|p| !p.is_game_over()));
        // Four discs at the start, one more per ply.
        let discs = |p: &OthelloPosition| p.disc_count(Color::Black) + p.disc_count(Color::White);
        assert_eq!(discs(&a[0]), 4 + 8);
        assert_eq!(discs(&a[3]), 4 + 14);
    }

    #[test]
    fn missing_file_reports_path() {
        let err = load_position_set("/nonexistent/positions.txt").unwrap_err();
        assert!(err.to_string().starts_with("/nonexistent/positions.txt"));
    }
}
