use std::fmt;
use std::sync::Arc;

use rand::Rng as _;

use super::moves::{Face, Move, MoveSequence};
use super::puzzle::Puzzle;
use super::spec::CubeSpec;
use crate::error::{Error, Result};
use crate::rng;

/// One cube configuration. Value type: operations return new states.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CubeState {
    spec: CubeSpec,
    at: Box<[u8]>,
}

impl CubeState {
    pub fn solved(spec: CubeSpec) -> Result<CubeState> {
        let puzzle = Puzzle::shared(spec)?;
        Ok(CubeState { spec, at: (0..puzzle.size as u8).collect() })
    }

    pub(crate) fn from_labels(spec: CubeSpec, at: Box<[u8]>) -> CubeState {
        CubeState { spec, at }
    }

    pub fn spec(&self) -> CubeSpec {
        self.spec
    }

    /// Sticker labels by position; `labels()[p]` is where that sticker sat
    /// on the solved cube.
    pub fn labels(&self) -> &[u8] {
        &self.at
    }

    pub(crate) fn puzzle(&self) -> Arc<Puzzle> {
        Puzzle::shared(self.spec).expect("state exists only for supported specs")
    }

    /// Face colors by facelet, as face indices in U, R, F, D, L, B order.
    pub fn stickers(&self) -> Vec<u8> {
        let nn = (self.spec.n as usize).pow(2) as u8;
        self.at.iter().map(|&l| l / nn).collect()
    }

    pub fn apply(&self, mv: Move) -> Result<CubeState> {
        let puzzle = self.puzzle();
        let g = puzzle.move_index(mv)?;
        let mut out = vec![0u8; puzzle.size].into_boxed_slice();
        puzzle.apply_into(&self.at, g, &mut out);
        Ok(CubeState { spec: self.spec, at: out })
    }

    pub fn apply_sequence(&self, seq: &MoveSequence) -> Result<CubeState> {
        let puzzle = self.puzzle();
        let gens = seq.iter().map(|&m| puzzle.move_index(m)).collect::<Result<Vec<_>>>()?;
        let mut cur = self.at.clone();
        let mut next = cur.clone();
        for g in gens {
            puzzle.apply_into(&cur, g, &mut next);
            std::mem::swap(&mut cur, &mut next);
        }
        Ok(CubeState { spec: self.spec, at: cur })
    }

    /// `k` random generators, never turning the same face-layer twice in a
    /// row. Deterministic in `seed`.
    pub fn scramble(&self, k: usize, seed: u64) -> (CubeState, MoveSequence) {
        let puzzle = self.puzzle();
        let mut rng = rng::rng(seed);
        let mut seq = Vec::with_capacity(k);
        let mut prev: Option<Move> = None;
        while seq.len() < k {
            let mv = puzzle.moves[rng.random_range(0..puzzle.moves.len())];
            if prev.is_some_and(|p| p.same_face_layer(mv)) {
                continue;
            }
            seq.push(mv);
            prev = Some(mv);
        }
        let seq = MoveSequence(seq);
        let state = self.apply_sequence(&seq).expect("generators of own spec");
        (state, seq)
    }

    /// Every face monochromatic. Whole-cube rotations of the solved cube
    /// count as solved.
    pub fn is_solved(&self) -> bool {
        let nn = (self.spec.n as usize).pow(2);
        let colors = self.stickers();
        colors.chunks(nn).all(|face| face.iter().all(|&c| c == face[0]))
    }

    pub fn is_identity(&self) -> bool {
        self.at.iter().enumerate().all(|(i, &l)| i == l as usize)
    }

    /// Canonical encoding: sticker labels at one reference facelet per
    /// movable piece.
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.puzzle().dedup_key(&self.at, &mut out);
        out
    }

    /// Bit-packed canonical key, available when it fits in 128 bits
    /// (n = 2 and n = 3).
    pub fn packed(&self) -> Option<u128> {
        let puzzle = self.puzzle();
        (puzzle.packs_into_u128() && !self.spec.quotients_rotations()).then(|| puzzle.packed_key(&self.at))
    }

    pub fn fingerprint(&self) -> u64 {
        rng::fingerprint(&self.encode())
    }

    /// Facelet color string, one of `URFDLB` per facelet.
    pub fn to_facelet_string(&self) -> String {
        self.stickers().iter().map(|&c| Face::ALL[c as usize].letter()).collect()
    }

    /// Parses a facelet color string. Pieces are identified by their color
    /// sets, so only cubes whose pieces are all distinguishable (n = 2, 3)
    /// are accepted. Reachability is not checked beyond piece identity.
    pub fn from_facelet_string(spec: CubeSpec, s: &str) -> Result<CubeState> {
        let puzzle = Puzzle::shared(spec)?;
        if spec.n > 3 {
            return Err(Error::BadFacelets(
                "color strings are ambiguous for n > 3 (identical centers and wings)".into(),
            ));
        }
        let colors: Vec<u8> = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| {
                Face::from_letter(c)
                    .map(|f| f.index() as u8)
                    .ok_or_else(|| Error::BadFacelets(format!("unknown color `{c}`")))
            })
            .collect::<Result<_>>()?;
        if colors.len() != puzzle.size {
            return Err(Error::BadFacelets(format!("expected {} facelets, got {}", puzzle.size, colors.len())));
        }
        let mut at = vec![u8::MAX; puzzle.size];
        let mut used = vec![false; puzzle.cubies.len()];
        for slot in &puzzle.cubies {
            let seen: Vec<u8> = slot.facelets.iter().map(|&f| colors[f as usize]).collect();
            let k = seen.len();
            let mut placed = false;
            'home: for (h, home) in puzzle.cubies.iter().enumerate() {
                if used[h] || home.facelets.len() != k {
                    continue;
                }
                let home_colors: Vec<u8> = home.facelets.iter().map(|&f| puzzle.color(f)).collect();
                // corners only twist cyclically; edges may flip
                let shifts: Vec<usize> = (0..k).collect();
                for shift in shifts {
                    if (0..k).all(|i| seen[(i + shift) % k] == home_colors[i]) {
                        for i in 0..k {
                            at[slot.facelets[(i + shift) % k] as usize] = home.facelets[i];
                        }
                        used[h] = true;
                        placed = true;
                        break 'home;
                    }
                }
            }
            if !placed {
                return Err(Error::BadFacelets(format!("no free piece with colors {seen:?}")));
            }
        }
        Ok(CubeState { spec, at: at.into_boxed_slice() })
    }
}

impl fmt::Debug for CubeState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CubeState({}, {})", self.spec, self.to_facelet_string())
    }
}

impl fmt::Display for CubeState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_facelet_string())
    }
}
