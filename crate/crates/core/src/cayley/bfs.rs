use std::hash::Hash;

use rayon::prelude::*;
use rustc_hash::FxHashSet;

use super::ShellProfile;
use crate::cube::{CubeSpec, CubeState, Puzzle};
use crate::error::{Error, Result};
use crate::num::Real;

/// 8 GiB.
pub const DEFAULT_BUDGET: u64 = 8 << 30;

/// Parents expanded per merge round; bounds the transient child buffers.
const BATCH: usize = 1 << 15;
const CHUNK: usize = 512;

/// Exact shell profile by breadth-first search from the solved state.
///
/// Only the previous, current and next levels are kept: in an undirected
/// Cayley graph a neighbor of a depth-`d` state has depth `d-1`, `d` or
/// `d+1`. Memory is accounted as key bytes times two for hash-set overhead
/// plus the raw frontier states. If the next level is projected not to fit
/// `memory_budget` the profile is returned with `truncated = true`; if a
/// level overflows while being built, [`Error::BudgetExceeded`] is returned.
pub fn bfs_shells<T: Real>(spec: CubeSpec, max_depth: usize, memory_budget: u64) -> Result<ShellProfile<T>> {
    bfs_shells_from(&CubeState::solved(spec)?, max_depth, memory_budget)
}

/// As [`bfs_shells`], rooted at an arbitrary state.
pub fn bfs_shells_from<T: Real>(start: &CubeState, max_depth: usize, memory_budget: u64) -> Result<ShellProfile<T>> {
    let spec = start.spec();
    let puzzle = start.puzzle();
    let outcome = if puzzle.packs_into_u128() && !spec.quotients_rotations() {
        run(&puzzle, start.labels(), max_depth, memory_budget, 16, |p, at, _| p.packed_key(at))
    } else {
        let key_len = puzzle.key_slots.len() as u64 + 16;
        run(&puzzle, start.labels(), max_depth, memory_budget, key_len, |p, at, buf| {
            p.dedup_key(at, buf);
            buf.clone().into_boxed_slice()
        })
    }?;
    let mut profile = ShellProfile::from_counts(spec, &outcome.counts);
    profile.truncated = outcome.truncated;
    profile.exhausted = outcome.exhausted;
    Ok(profile)
}

struct Outcome {
    counts: Vec<u64>,
    truncated: bool,
    exhausted: bool,
}

fn run<K, F>(puzzle: &Puzzle, start: &[u8], max_depth: usize, budget: u64, key_bytes: u64, key: F) -> Result<Outcome>
where
    K: Hash + Eq + Send + Sync,
    F: Fn(&Puzzle, &[u8], &mut Vec<u8>) -> K + Sync,
{
    let size = puzzle.size;
    let gens = puzzle.perms.len();
    let per_key = 2 * key_bytes;
    let mut buf = Vec::new();

    let mut prev: FxHashSet<K> = FxHashSet::default();
    let mut cur: FxHashSet<K> = FxHashSet::default();
    cur.insert(key(puzzle, start, &mut buf));
    let mut frontier: Vec<u8> = start.to_vec();
    let mut counts = vec![1u64];
    let mut truncated = false;
    let mut exhausted = false;

    for depth in 0..max_depth {
        let cur_len = cur.len() as f64;
        let est_next = if prev.is_empty() { cur_len * gens as f64 } else { cur_len * cur_len / prev.len() as f64 };
        let projected = (cur_len + est_next) * per_key as f64 + (cur_len + est_next) * size as f64;
        if projected > budget as f64 {
            truncated = true;
            break;
        }

        let mut next: FxHashSet<K> = FxHashSet::default();
        let mut next_frontier: Vec<u8> = Vec::new();
        for batch in frontier.chunks(BATCH * size) {
            let found: Vec<Vec<(K, Box<[u8]>)>> = batch
                .par_chunks(CHUNK * size)
                .map(|chunk| {
                    let mut buf = Vec::new();
                    let mut child = vec![0u8; size];
                    let mut local = Vec::new();
                    for parent in chunk.chunks_exact(size) {
                        for g in 0..gens {
                            puzzle.apply_into(parent, g, &mut child);
                            let k = key(puzzle, &child, &mut buf);
                            if !cur.contains(&k) && !prev.contains(&k) {
                                local.push((k, child.clone().into_boxed_slice()));
                            }
                        }
                    }
                    local
                })
                .collect();
            for (k, child) in found.into_iter().flatten() {
                if next.insert(k) {
                    next_frontier.extend_from_slice(&child);
                }
            }
            let used = (cur.len() + next.len()) as u64 * per_key + (frontier.len() + next_frontier.len()) as u64;
            if used > budget {
                return Err(Error::BudgetExceeded { level: depth + 1, reached: depth });
            }
        }

        if next.is_empty() {
            exhausted = true;
            break;
        }
        counts.push(next.len() as u64);
        prev = std::mem::replace(&mut cur, next);
        frontier = next_frontier;
    }
    Ok(Outcome { counts, truncated, exhausted })
}
