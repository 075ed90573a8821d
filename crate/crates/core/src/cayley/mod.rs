//! Shell, ball and entropy profiles of the cube Cayley graph.
//!
//! Exact profiles come from [`bfs_shells`] (any exactly supported spec) and
//! [`build_distance_table`] (2-cube only, over packed coordinates). Deeper
//! levels of large cubes are estimated with [`estimate_shells`].

mod bfs;
mod estimate;
mod profile;
mod table;

pub use bfs::{bfs_shells, bfs_shells_from, DEFAULT_BUDGET};
pub use estimate::{estimate_shells, estimate_shells_with, EstimateOptions};
pub use profile::{entropy_series, plateau_branching, PlateauFit, ShellProfile, ShellRow};
pub use table::{build_distance_table, DistanceTable};

/// Known HTM shell sizes of the 3-cube for radius 0..=5.
pub const CUBE3_SHELLS: [u64; 6] = [1, 18, 243, 3240, 43_239, 574_908];

/// Order of the 2-cube group with one corner fixed: 8!·3⁷/24.
pub const CUBE2_ORDER: u64 = 3_674_160;
