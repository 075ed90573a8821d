use std::fmt;

use serde::{Deserialize, Serialize};

use super::moves::{Face, Move, Power};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Metric {
    /// Half-turn metric: any quarter or half layer turn counts as one move.
    Htm,
}

/// Which cube and which move set.
///
/// `fixed_reference` quotients whole-cube rotations. On the 2-cube this
/// pins the DLB corner, leaving U, R and F as generators. On the 4-cube it
/// keeps all 36 layer turns but compares states up to the 24 rotations. The
/// 3-cube needs no quotient since its centers never move.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CubeSpec {
    pub n: u8,
    pub metric: Metric,
    pub fixed_reference: bool,
}

impl CubeSpec {
    pub const MAX_N: u8 = 7;

    pub fn new(n: u8, fixed_reference: bool) -> Result<CubeSpec> {
        if !(2..=Self::MAX_N).contains(&n) {
            return Err(Error::UnsupportedSpec(format!("cube size {n} outside 2..=7")));
        }
        Ok(CubeSpec { n, metric: Metric::Htm, fixed_reference })
    }

    /// Default HTM spec: the 2-cube fixes a reference corner, larger cubes
    /// are compared raw.
    pub fn htm(n: u8) -> Result<CubeSpec> {
        Self::new(n, n == 2)
    }

    pub fn supports_exact(&self) -> bool {
        (2..=4).contains(&self.n)
    }

    pub fn facelet_count(&self) -> usize {
        6 * self.n as usize * self.n as usize
    }

    pub fn max_layer(&self) -> u8 {
        (self.n / 2).max(1)
    }

    pub(crate) fn quotients_rotations(&self) -> bool {
        self.fixed_reference && self.n >= 4
    }

    pub(crate) fn turnable_faces(&self) -> &'static [Face] {
        if self.n == 2 && self.fixed_reference {
            &[Face::U, Face::R, Face::F]
        } else {
            &Face::ALL
        }
    }

    pub(crate) fn generator_list(&self) -> Vec<Move> {
        let mut out = Vec::new();
        for &face in self.turnable_faces() {
            for layer in 1..=self.max_layer() {
                for power in Power::ALL {
                    out.push(Move::new(face, layer, power));
                }
            }
        }
        out
    }

    pub fn is_generator(&self, mv: Move) -> bool {
        self.turnable_faces().contains(&mv.face) && (1..=self.max_layer()).contains(&mv.layer)
    }
}

impl fmt::Display for CubeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{n}x{n}x{n} HTM", n = self.n)?;
        if self.fixed_reference {
            f.write_str(" (rotation-fixed)")?;
        }
        Ok(())
    }
}

/// The full HTM generating set of `spec`.
pub fn generators(spec: CubeSpec) -> Result<Vec<Move>> {
    if !spec.supports_exact() {
        return Err(Error::UnsupportedSpec(format!("no exact move model for n = {} (supported: 2, 3, 4)", spec.n)));
    }
    Ok(spec.generator_list())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_counts() {
        assert_eq!(generators(CubeSpec::new(2, true).unwrap()).unwrap().len(), 9);
        assert_eq!(generators(CubeSpec::new(2, false).unwrap()).unwrap().len(), 18);
        assert_eq!(generators(CubeSpec::htm(3).unwrap()).unwrap().len(), 18);
        assert_eq!(generators(CubeSpec::htm(4).unwrap()).unwrap().len(), 36);
    }

    #[test]
    fn generators_unique_and_inverse_closed() {
        for n in 2..=4 {
            let gens = generators(CubeSpec::htm(n).unwrap()).unwrap();
            let mut sorted = gens.clone();
            sorted.sort();
            sorted.dedup();
            assert_eq!(sorted.len(), gens.len());
            for m in &gens {
                assert!(gens.contains(&m.inverse()));
            }
        }
    }

    #[test]
    fn metadata_only_sizes() {
        let seven = CubeSpec::htm(7).unwrap();
        assert_eq!(seven.facelet_count(), 294);
        assert!(generators(seven).is_err());
        assert!(CubeSpec::htm(1).is_err());
        assert!(CubeSpec::htm(8).is_err());
    }
}
