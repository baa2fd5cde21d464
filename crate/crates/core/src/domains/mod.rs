//! Concrete games: seeded synthetic trees and 6x6 Othello.

pub mod othello;
pub mod positions;
pub mod synthetic;

pub use othello::{OthelloAdapter, OthelloNode, OthelloPosition};
pub use positions::{
    append_position, load_position_set, othello_game_positions, parse_position_set,
    save_position_set, PositionSource,
};
pub use synthetic::{NodeId, Shape, SyntheticTree, TreeConfig, ValueModel};
