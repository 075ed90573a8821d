use crate::cube::{CubeSpec, PocketCoord, PocketTables, POCKET_STATES};
use crate::error::{Error, Result};

const UNSEEN: u8 = u8::MAX;

/// Distance to solved for every 2-cube state, indexed by
/// [`PocketCoord::index`].
pub struct DistanceTable {
    spec: CubeSpec,
    distances: Vec<u8>,
    moves: PocketTables,
}

impl DistanceTable {
    pub fn spec(&self) -> CubeSpec {
        self.spec
    }

    pub fn len(&self) -> usize {
        self.distances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distances.is_empty()
    }

    #[inline]
    pub fn distance(&self, index: u32) -> u8 {
        self.distances[index as usize]
    }

    pub fn distances(&self) -> &[u8] {
        &self.distances
    }

    /// Generator neighbors of a state, in generator order.
    #[inline]
    pub fn neighbors(&self, index: u32) -> [u32; 9] {
        std::array::from_fn(|g| self.moves.step(index, g))
    }

    pub fn diameter(&self) -> u8 {
        self.distances.iter().copied().max().unwrap_or(0)
    }

    /// Number of states at each distance.
    pub fn histogram(&self) -> Vec<u64> {
        let mut h = vec![0u64; self.diameter() as usize + 1];
        for &d in &self.distances {
            h[d as usize] += 1;
        }
        h
    }

    pub fn mean_distance(&self) -> f64 {
        let total: u64 = self.histogram().iter().enumerate().map(|(d, &c)| d as u64 * c).sum();
        total as f64 / self.len() as f64
    }
}

impl std::fmt::Debug for DistanceTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DistanceTable")
            .field("spec", &self.spec)
            .field("states", &self.len())
            .field("diameter", &self.diameter())
            .finish()
    }
}

/// Full distance table of the 2-cube with a fixed reference corner.
pub fn build_distance_table(spec: CubeSpec) -> Result<DistanceTable> {
    if spec != CubeSpec::new(2, true)? {
        return Err(Error::UnsupportedSpec(format!(
            "distance tables exist only for the rotation-fixed 2-cube, got {spec}"
        )));
    }
    let moves = PocketTables::build();
    let mut distances = vec![UNSEEN; POCKET_STATES];
    let root = PocketCoord::SOLVED.index();
    distances[root as usize] = 0;
    let mut frontier = vec![root];
    let mut depth = 0u8;
    while !frontier.is_empty() {
        depth += 1;
        let mut next = Vec::new();
        for &s in &frontier {
            for g in 0..9 {
                let t = moves.step(s, g);
                if distances[t as usize] == UNSEEN {
                    distances[t as usize] = depth;
                    next.push(t);
                }
            }
        }
        frontier = next;
    }
    debug_assert!(distances.iter().all(|&d| d != UNSEEN));
    Ok(DistanceTable { spec, distances, moves })
}
