//! Facelet geometry and precomputed move permutations.
//!
//! Facelets are numbered face by face in the order U, R, F, D, L, B, each
//! face row-major as seen from outside: U with B at the top, D with F at
//! the top, the four side faces with U at the top. Index
//! `face * n² + row * n + col`.
//!
//! A state is stored as `at[position] = label`, where `label` is the
//! position that sticker occupied on the solved cube. Move permutations are
//! gather tables: after a move `at'[i] = at[src[i]]`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::moves::{Face, Move};
use super::spec::CubeSpec;
use crate::error::{Error, Result};
use crate::rng;

type Vec3 = [i8; 3];

#[derive(Clone, Copy, Debug)]
struct Facelet {
    pos: Vec3,
    normal: Vec3,
}

/// One physical piece: its facelets in canonical order. Corners list the
/// U/D facelet first and then proceed clockwise seen from outside; edges
/// and wings list the U/D facelet first, else the F/B one.
#[derive(Clone, Debug)]
pub(crate) struct Cubie {
    /// Doubled coordinates, each in `-(n-1)..=(n-1)`.
    pub pos: [i8; 3],
    pub facelets: Vec<u8>,
}

#[derive(Debug)]
pub(crate) struct Puzzle {
    pub spec: CubeSpec,
    pub n: usize,
    pub size: usize,
    pub moves: Vec<Move>,
    /// Gather permutation per generator, same order as `moves`.
    pub perms: Vec<Box<[u8]>>,
    pub cubies: Vec<Cubie>,
    /// First facelet of each moving cubie; the labels there determine the
    /// state.
    pub key_slots: Vec<u8>,
    pub label_bits: u32,
    /// Gather permutations of the 24 whole-cube rotations, identity first.
    pub rotations: Vec<Box<[u8]>>,
}

fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot(a: Vec3, b: Vec3) -> i32 {
    a.iter().zip(b.iter()).map(|(&x, &y)| x as i32 * y as i32).sum()
}

/// Clockwise quarter turn about the unit axis `a`, seen from its tip:
/// `v' = a (a·v) - a × v`.
fn rotate(a: Vec3, v: Vec3) -> Vec3 {
    let c = cross(a, v);
    let d = dot(a, v) as i8;
    [a[0] * d - c[0], a[1] * d - c[1], a[2] * d - c[2]]
}

fn facelet_layout(n: usize) -> Vec<Facelet> {
    let m = (n - 1) as i8;
    let mut out = Vec::with_capacity(6 * n * n);
    for face in Face::ALL {
        for r in 0..n as i8 {
            for c in 0..n as i8 {
                let (rr, cc) = (2 * r - m, 2 * c - m);
                let pos = match face {
                    Face::U => [cc, m, rr],
                    Face::R => [m, -rr, -cc],
                    Face::F => [cc, -rr, m],
                    Face::D => [cc, -m, -rr],
                    Face::L => [-m, -rr, cc],
                    Face::B => [-cc, -rr, -m],
                };
                out.push(Facelet { pos, normal: face.normal() });
            }
        }
    }
    out
}

fn compose(first: &[u8], then: &[u8]) -> Box<[u8]> {
    // gather tables: (then ∘ first)[i] = first[then[i]]
    then.iter().map(|&j| first[j as usize]).collect()
}

impl Puzzle {
    pub fn new(spec: CubeSpec) -> Result<Puzzle> {
        let n = spec.n as usize;
        if !spec.supports_exact() {
            return Err(Error::UnsupportedSpec(format!("n = {n} has no exact representation (2 ≤ n ≤ 4)")));
        }
        let layout = facelet_layout(n);
        let size = layout.len();
        let lookup: HashMap<(Vec3, Vec3), u8> =
            layout.iter().enumerate().map(|(i, f)| ((f.pos, f.normal), i as u8)).collect();

        let turn = |axis: Vec3, select: &dyn Fn(Vec3) -> bool| -> Box<[u8]> {
            let mut src = vec![0u8; size];
            for (i, f) in layout.iter().enumerate() {
                let dst = if select(f.pos) { lookup[&(rotate(axis, f.pos), rotate(axis, f.normal))] } else { i as u8 };
                src[dst as usize] = i as u8;
            }
            src.into_boxed_slice()
        };

        let moves = spec.generator_list();
        let mut perms = Vec::with_capacity(moves.len());
        for mv in &moves {
            let axis = mv.face.normal();
            let depth = n as i32 - 1 - 2 * (mv.layer as i32 - 1);
            let quarter = turn(axis, &|p| dot(axis, p) == depth);
            let mut perm = quarter.clone();
            for _ in 1..mv.power.quarters() {
                perm = compose(&perm, &quarter);
            }
            perms.push(perm);
        }

        let mut by_pos: Vec<(Vec3, Vec<u8>)> = Vec::new();
        for (i, f) in layout.iter().enumerate() {
            match by_pos.iter_mut().find(|(p, _)| *p == f.pos) {
                Some((_, v)) => v.push(i as u8),
                None => by_pos.push((f.pos, vec![i as u8])),
            }
        }
        let cubies: Vec<Cubie> = by_pos
            .into_iter()
            .map(|(pos, mut fs)| {
                let axis_rank = |i: u8| match layout[i as usize].normal {
                    [0, _, 0] => 0,
                    [0, 0, _] => 1,
                    _ => 2,
                };
                fs.sort_by_key(|&i| axis_rank(i));
                if fs.len() == 3 {
                    let n0 = layout[fs[0] as usize].normal;
                    let n1 = layout[fs[1] as usize].normal;
                    if dot(cross(n0, n1), pos) > 0 {
                        fs.swap(1, 2);
                    }
                }
                Cubie { pos, facelets: fs }
            })
            .collect();

        let moving: Vec<usize> = (0..cubies.len())
            .filter(|&c| {
                let f = cubies[c].facelets[0] as usize;
                perms.iter().any(|p| p[f] as usize != f)
            })
            .collect();
        let key_slots = moving.iter().map(|&c| cubies[c].facelets[0]).collect();
        let label_bits = usize::BITS - (size - 1).leading_zeros();

        let whole = |axis: Vec3| turn(axis, &|_| true);
        let gens = [whole([1, 0, 0]), whole([0, 1, 0])];
        let identity: Box<[u8]> = (0..size as u8).collect();
        let mut rotations = vec![identity];
        let mut i = 0;
        while i < rotations.len() {
            for g in &gens {
                let next = compose(&rotations[i], g);
                if !rotations.contains(&next) {
                    rotations.push(next);
                }
            }
            i += 1;
        }
        debug_assert_eq!(rotations.len(), 24);

        Ok(Puzzle { spec, n, size, moves, perms, cubies, key_slots, label_bits, rotations })
    }

    /// Shared instance per spec; construction is cheap but not free.
    pub fn shared(spec: CubeSpec) -> Result<Arc<Puzzle>> {
        static CACHE: OnceLock<Mutex<Vec<Arc<Puzzle>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(Vec::new()));
        let mut guard = cache.lock().expect("puzzle cache poisoned");
        if let Some(p) = guard.iter().find(|p| p.spec == spec) {
            return Ok(Arc::clone(p));
        }
        let p = Arc::new(Puzzle::new(spec)?);
        guard.push(Arc::clone(&p));
        Ok(p)
    }

    pub fn move_index(&self, mv: Move) -> Result<usize> {
        self.moves
            .iter()
            .position(|&m| m == mv)
            .ok_or_else(|| Error::MoveMismatch { mv: mv.to_string(), spec: self.spec.to_string() })
    }

    #[inline]
    pub fn apply_into(&self, src: &[u8], generator: usize, dst: &mut [u8]) {
        for (d, &s) in dst.iter_mut().zip(self.perms[generator].iter()) {
            *d = src[s as usize];
        }
    }

    /// Canonical key bytes: labels at the key slots.
    #[inline]
    pub fn key_bytes(&self, at: &[u8], out: &mut Vec<u8>) {
        out.clear();
        out.extend(self.key_slots.iter().map(|&k| at[k as usize]));
    }

    pub fn packs_into_u128(&self) -> bool {
        self.key_slots.len() as u32 * self.label_bits <= 128
    }

    #[inline]
    pub fn packed_key(&self, at: &[u8]) -> u128 {
        debug_assert!(self.packs_into_u128());
        let mut k = 0u128;
        for &slot in &self.key_slots {
            k = (k << self.label_bits) | at[slot as usize] as u128;
        }
        k
    }

    /// Key bytes minimized over the 24 whole-cube rotations of the state.
    pub fn rotation_canonical_key(&self, at: &[u8], out: &mut Vec<u8>) {
        let mut best: Option<Vec<u8>> = None;
        let mut rotated = vec![0u8; self.size];
        let mut key = Vec::with_capacity(self.key_slots.len());
        for rot in &self.rotations {
            for (d, &s) in rotated.iter_mut().zip(rot.iter()) {
                *d = at[s as usize];
            }
            self.key_bytes(&rotated, &mut key);
            if best.as_ref().is_none_or(|b| key < *b) {
                best = Some(key.clone());
            }
        }
        out.clear();
        out.extend_from_slice(&best.expect("24 rotations"));
    }

    /// Key used for deduplication: rotation-canonical when the spec quotients
    /// rotations on a cube without fixed centers.
    pub fn dedup_key(&self, at: &[u8], out: &mut Vec<u8>) {
        if self.spec.quotients_rotations() {
            self.rotation_canonical_key(at, out)
        } else {
            self.key_bytes(at, out)
        }
    }

    /// Fingerprint of the dedup key; equals `CubeState::fingerprint`.
    pub fn key_fingerprint(&self, at: &[u8], buf: &mut Vec<u8>) -> u64 {
        self.dedup_key(at, buf);
        rng::fingerprint(buf)
    }

    /// Fingerprint of the state one generator away, without building it
    /// when only the key slots are needed.
    pub fn neighbor_fingerprint(&self, at: &[u8], generator: usize, scratch: &mut [u8], buf: &mut Vec<u8>) -> u64 {
        if self.spec.quotients_rotations() {
            self.apply_into(at, generator, scratch);
            return self.key_fingerprint(scratch, buf);
        }
        let perm = &self.perms[generator];
        buf.clear();
        buf.extend(self.key_slots.iter().map(|&k| at[perm[k as usize] as usize]));
        rng::fingerprint(buf)
    }

    #[inline]
    pub fn color(&self, label: u8) -> u8 {
        label / (self.n * self.n) as u8
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::Power;

    fn inverse_of(p: &[u8]) -> Vec<u8> {
        let mut inv = vec![0u8; p.len()];
        for (i, &s) in p.iter().enumerate() {
            inv[s as usize] = i as u8;
        }
        inv
    }

    #[test]
    fn layout_positions_are_unique() {
        for n in 2..=4 {
            let layout = facelet_layout(n);
            let mut keys: Vec<_> = layout.iter().map(|f| (f.pos, f.normal)).collect();
            keys.sort();
            keys.dedup();
            assert_eq!(keys.len(), 6 * n * n);
        }
    }

    #[test]
    fn cubie_counts() {
        let p3 = Puzzle::new(CubeSpec::htm(3).unwrap()).unwrap();
        assert_eq!(p3.cubies.len(), 26);
        assert_eq!(p3.key_slots.len(), 20);
        assert!(p3.packs_into_u128());
        let p2 = Puzzle::new(CubeSpec::htm(2).unwrap()).unwrap();
        assert_eq!(p2.cubies.len(), 8);
        assert_eq!(p2.key_slots.len(), 7);
        let p4 = Puzzle::new(CubeSpec::htm(4).unwrap()).unwrap();
        assert_eq!(p4.cubies.len(), 56);
        assert_eq!(p4.key_slots.len(), 56);
        assert!(!p4.packs_into_u128());
    }

    #[test]
    fn inverse_generators_are_inverse_permutations() {
        for n in 2..=4 {
            let p = Puzzle::new(CubeSpec::htm(n).unwrap()).unwrap();
            for (i, mv) in p.moves.iter().enumerate() {
                let j = p.move_index(mv.inverse()).unwrap();
                assert_eq!(&*p.perms[j], inverse_of(&p.perms[i]).as_slice(), "{mv}");
            }
        }
    }

    #[test]
    fn rotations_form_group_of_24() {
        let p = Puzzle::new(CubeSpec::htm(3).unwrap()).unwrap();
        assert_eq!(p.rotations.len(), 24);
    }

    #[test]
    fn u_turn_moves_front_row_to_left() {
        // Kociemba's convention: U sends F's top row to L.
        let p = Puzzle::new(CubeSpec::htm(3).unwrap()).unwrap();
        let u = p.move_index(Move::outer(Face::U, Power::Quarter)).unwrap();
        let solved: Vec<u8> = (0..54).collect();
        let mut out = vec![0; 54];
        p.apply_into(&solved, u, &mut out);
        let f_top = 2 * 9;
        let l_top = 4 * 9;
        assert_eq!(&out[l_top..l_top + 3], &solved[f_top..f_top + 3]);
        // and R sends F's right column up to U
        let r = p.move_index(Move::outer(Face::R, Power::Quarter)).unwrap();
        p.apply_into(&solved, r, &mut out);
        assert_eq!(out[8], solved[2 * 9 + 8]);
    }
}
