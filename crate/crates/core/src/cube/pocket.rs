//! Packed coordinates for the 2-cube with the DLB corner held fixed.
//!
//! A state is the permutation of the seven free corners (Lehmer rank in
//! `[0, 7!)`) plus the twists of the first six (base-3 digits in
//! `[0, 3⁶)`); the seventh twist follows from the zero twist sum.

use serde::{Deserialize, Serialize};

use super::puzzle::Puzzle;
use super::spec::CubeSpec;
use super::state::CubeState;
use crate::error::{Error, Result};

pub const PERM_COUNT: usize = 5040;
pub const TWIST_COUNT: usize = 729;
/// 7! · 3⁶
pub const POCKET_STATES: usize = PERM_COUNT * TWIST_COUNT;

/// Corner slot positions (doubled coordinates, so ±1 on the 2-cube) in coordinate
/// order: URF, UFL, ULB, UBR, DFR, DLF, DRB, and the fixed DBL last.
const CORNER_ORDER: [[i8; 3]; 8] =
    [[1, 1, 1], [-1, 1, 1], [-1, 1, -1], [1, 1, -1], [1, -1, 1], [-1, -1, 1], [1, -1, -1], [-1, -1, -1]];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PocketCoord {
    pub perm: u16,
    pub twist: u16,
}

impl PocketCoord {
    pub const SOLVED: PocketCoord = PocketCoord { perm: 0, twist: 0 };

    #[inline]
    pub fn index(self) -> u32 {
        self.perm as u32 * TWIST_COUNT as u32 + self.twist as u32
    }

    #[inline]
    pub fn from_index(i: u32) -> PocketCoord {
        PocketCoord { perm: (i / TWIST_COUNT as u32) as u16, twist: (i % TWIST_COUNT as u32) as u16 }
    }
}

fn pocket_spec() -> CubeSpec {
    CubeSpec::new(2, true).expect("2-cube spec")
}

/// Corner facelet lists of the 2-cube in `CORNER_ORDER`.
fn corner_slots(p: &Puzzle) -> Vec<[u8; 3]> {
    CORNER_ORDER
        .iter()
        .map(|want| {
            let cubie = p.cubies.iter().find(|c| c.pos == *want).expect("corner present");
            [cubie.facelets[0], cubie.facelets[1], cubie.facelets[2]]
        })
        .collect()
}

fn perm_rank(p: &[u8; 7]) -> u16 {
    let mut rank = 0usize;
    for i in 0..7 {
        let smaller = p[i + 1..].iter().filter(|&&x| x < p[i]).count();
        rank = rank * (7 - i) + smaller;
    }
    rank as u16
}

fn perm_unrank(mut rank: usize) -> [u8; 7] {
    let mut digits = [0usize; 7];
    for i in (0..7).rev() {
        let base = 7 - i;
        digits[i] = rank % base;
        rank /= base;
    }
    let mut pool: Vec<u8> = (0..7).collect();
    let mut out = [0u8; 7];
    for i in 0..7 {
        out[i] = pool.remove(digits[i]);
    }
    out
}

impl CubeState {
    /// Packed coordinate of a fixed-reference 2-cube state.
    pub fn pocket_coord(&self) -> Result<PocketCoord> {
        let spec = self.spec();
        if spec != pocket_spec() {
            return Err(Error::UnsupportedSpec(format!("pocket coordinates need the fixed 2-cube, got {spec}")));
        }
        let p = self.puzzle();
        let slots = corner_slots(&p);
        let at = self.labels();
        let mut perm = [0u8; 7];
        let mut twist = [0u8; 8];
        for (i, slot) in slots.iter().enumerate() {
            let labels = slot.map(|f| at[f as usize]);
            let (home, k) = slots
                .iter()
                .enumerate()
                .find_map(|(h, home)| labels.iter().position(|&l| l == home[0]).map(|k| (h, k)))
                .ok_or_else(|| Error::BadFacelets("corner without a U/D sticker".into()))?;
            if i == 7 {
                if home != 7 || k != 0 {
                    return Err(Error::BadFacelets("reference corner DBL moved".into()));
                }
                continue;
            }
            perm[i] = home as u8;
            twist[i] = k as u8;
        }
        let twist_index = twist[..6].iter().rev().fold(0u16, |acc, &t| acc * 3 + t as u16);
        Ok(PocketCoord { perm: perm_rank(&perm), twist: twist_index })
    }

    pub fn from_pocket_coord(c: PocketCoord) -> Result<CubeState> {
        if c.perm as usize >= PERM_COUNT || c.twist as usize >= TWIST_COUNT {
            return Err(Error::InvalidParameter(format!("pocket coordinate out of range: {c:?}")));
        }
        let spec = pocket_spec();
        let p = Puzzle::shared(spec)?;
        let slots = corner_slots(&p);
        let perm = perm_unrank(c.perm as usize);
        let mut twist = [0u8; 8];
        let mut t = c.twist;
        for tw in twist.iter_mut().take(6) {
            *tw = (t % 3) as u8;
            t /= 3;
        }
        twist[6] = ((3 - twist[..6].iter().map(|&x| x as u32).sum::<u32>() % 3) % 3) as u8;
        let mut at: Vec<u8> = (0..p.size as u8).collect();
        for i in 0..7 {
            let home = &slots[perm[i] as usize];
            for k in 0..3 {
                at[slots[i][(k + twist[i] as usize) % 3] as usize] = home[k];
            }
        }
        Ok(CubeState::from_labels(spec, at.into_boxed_slice()))
    }
}

/// Coordinate move tables for the nine fixed-reference generators.
pub struct PocketTables {
    pub perm: Vec<[u16; 9]>,
    pub twist: Vec<[u16; 9]>,
}

impl PocketTables {
    pub fn build() -> PocketTables {
        let spec = pocket_spec();
        let p = Puzzle::shared(spec).expect("2-cube");
        let mut buf = vec![0u8; p.size];
        let mut perm = vec![[0u16; 9]; PERM_COUNT];
        for (i, row) in perm.iter_mut().enumerate() {
            let s = CubeState::from_pocket_coord(PocketCoord { perm: i as u16, twist: 0 }).unwrap();
            for (g, cell) in row.iter_mut().enumerate() {
                p.apply_into(s.labels(), g, &mut buf);
                let next = CubeState::from_labels(spec, buf.clone().into_boxed_slice());
                *cell = next.pocket_coord().unwrap().perm;
            }
        }
        let mut twist = vec![[0u16; 9]; TWIST_COUNT];
        for (i, row) in twist.iter_mut().enumerate() {
            let s = CubeState::from_pocket_coord(PocketCoord { perm: 0, twist: i as u16 }).unwrap();
            for (g, cell) in row.iter_mut().enumerate() {
                p.apply_into(s.labels(), g, &mut buf);
                let next = CubeState::from_labels(spec, buf.clone().into_boxed_slice());
                *cell = next.pocket_coord().unwrap().twist;
            }
        }
        PocketTables { perm, twist }
    }

    #[inline]
    pub fn step(&self, index: u32, generator: usize) -> u32 {
        let c = PocketCoord::from_index(index);
        PocketCoord { perm: self.perm[c.perm as usize][generator], twist: self.twist[c.twist as usize][generator] }
            .index()
    }
}
