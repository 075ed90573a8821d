//! Exact n-cube states and half-turn-metric generators.

mod moves;
mod pocket;
mod puzzle;
mod spec;
mod state;

pub use moves::{Face, Move, MoveSequence, Power};
pub use pocket::{PocketCoord, PocketTables, PERM_COUNT, POCKET_STATES, TWIST_COUNT};
pub use spec::{generators, CubeSpec, Metric};
pub use state::CubeState;

pub(crate) use puzzle::Puzzle;

/// Diameter of the 3-cube Cayley graph in the half-turn metric.
pub const GODS_NUMBER_3: u32 = 20;

/// Applies one move; value semantics.
pub fn apply(state: &CubeState, mv: Move) -> crate::Result<CubeState> {
    state.apply(mv)
}

pub fn apply_sequence(state: &CubeState, seq: &MoveSequence) -> crate::Result<CubeState> {
    state.apply_sequence(seq)
}

pub fn scramble(state: &CubeState, k: usize, seed: u64) -> (CubeState, MoveSequence) {
    state.scramble(k, seed)
}

pub fn is_solved(state: &CubeState) -> bool {
    state.is_solved()
}
