use rayon::prelude::*;
use rustc_hash::{FxHashMap, FxHashSet};

use super::ShellProfile;
use crate::cube::{CubeSpec, Puzzle};
use crate::error::{Error, Result};
use crate::num::Real;
use crate::rng::{self, mix64, split_seed};
use rand::Rng as _;

#[derive(Clone, Debug)]
pub struct EstimateOptions {
    /// Bootstrap resamples per level.
    pub bootstrap: usize,
    /// Largest tolerated relative CI half-width.
    pub max_relative_ci: f64,
    /// Smallest accepted frontier sample.
    pub min_sample: usize,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        EstimateOptions { bootstrap: 200, max_relative_ci: 0.5, min_sample: 1000 }
    }
}

/// Sampled-frontier estimate of shell sizes.
///
/// Each level keeps at most `frontier_sample` weighted states. A sampled
/// parent's child is counted as new when its fingerprint is absent from the
/// membership sketches of the current and previous level; it then
/// contributes `w_parent / g`, where `g` counts the child's generator
/// neighbors present in the current sketch. With complete sketches this
/// counts every new state exactly once, so levels whose parents were all
/// expanded are exact (`ci = 0`). The next sample is a bottom-k selection
/// on a seeded hash of the fingerprint, reweighted by `found / k`.
///
/// Row CIs are 95% relative half-widths: a bootstrap over per-parent
/// contributions, combined in quadrature with the previous level's.
pub fn estimate_shells<T: Real>(
    spec: CubeSpec,
    max_depth: usize,
    frontier_sample: usize,
    seed: u64,
) -> Result<ShellProfile<T>> {
    estimate_shells_with(spec, max_depth, frontier_sample, seed, &EstimateOptions::default())
}

pub fn estimate_shells_with<T: Real>(
    spec: CubeSpec,
    max_depth: usize,
    frontier_sample: usize,
    seed: u64,
    opts: &EstimateOptions,
) -> Result<ShellProfile<T>> {
    if frontier_sample < opts.min_sample {
        return Err(Error::InvalidParameter(format!(
            "frontier_sample {frontier_sample} below minimum {}",
            opts.min_sample
        )));
    }
    let puzzle = Puzzle::shared(spec)?;
    let size = puzzle.size;
    let gens = puzzle.perms.len();
    let root: Vec<u8> = (0..size as u8).collect();
    let mut buf = Vec::new();

    let mut sample = root.clone();
    let mut weights = vec![1.0f64];
    let mut sketch_prev: FxHashSet<u64> = FxHashSet::default();
    let mut sketch_cur: FxHashSet<u64> = FxHashSet::default();
    sketch_cur.insert(puzzle.key_fingerprint(&root, &mut buf));
    // The sample holds all of its level and both sketches are complete.
    let mut level_exact = true;
    let mut rel_var = 0.0f64;
    let mut shells = vec![1.0f64];
    let mut cis = vec![0.0f64];
    let mut exhausted = false;

    for depth in 0..max_depth {
        let parents: Vec<(&[u8], f64)> = sample.chunks_exact(size).zip(weights.iter().copied()).collect();
        let contributions: Vec<Vec<(u64, f64)>> = parents
            .par_iter()
            .map(|&(parent, w)| {
                let mut child = vec![0u8; size];
                let mut scratch = vec![0u8; size];
                let mut buf = Vec::new();
                let mut out = Vec::new();
                for g in 0..gens {
                    let fp = puzzle.neighbor_fingerprint(parent, g, &mut scratch, &mut buf);
                    if sketch_cur.contains(&fp) || sketch_prev.contains(&fp) {
                        continue;
                    }
                    puzzle.apply_into(parent, g, &mut child);
                    let back = (0..gens)
                        .filter(|&h| {
                            sketch_cur.contains(&puzzle.neighbor_fingerprint(&child, h, &mut scratch, &mut buf))
                        })
                        .count();
                    debug_assert!(back >= 1, "the generating parent is in the sketch");
                    out.push((fp, w / back.max(1) as f64));
                }
                out
            })
            .collect();

        let mut found: FxHashMap<u64, f64> = FxHashMap::default();
        let mut order: Vec<u64> = Vec::new();
        let per_parent: Vec<f64> = contributions.iter().map(|c| c.iter().map(|&(_, x)| x).sum()).collect();
        for &(fp, x) in contributions.iter().flatten() {
            let e = found.entry(fp).or_insert_with(|| {
                order.push(fp);
                0.0
            });
            *e += x;
        }
        if found.is_empty() {
            exhausted = true;
            break;
        }
        let total: f64 = per_parent.iter().sum();

        if !level_exact {
            let sd = bootstrap_sd(&per_parent, opts.bootstrap, split_seed(seed, 2 * depth as u64 + 1));
            rel_var += (sd / total).powi(2);
        }
        let ci = 1.96 * rel_var.sqrt();
        if ci > opts.max_relative_ci {
            return Err(Error::SampleTooSmall { depth: depth + 1, ci });
        }
        shells.push(total);
        cis.push(ci);
        if depth + 1 == max_depth {
            break;
        }

        // Next sample: bottom-k on a seeded hash, so uniform over found states.
        let take_all = order.len() <= frontier_sample;
        let salt = split_seed(seed, 2 * depth as u64);
        let selected: FxHashSet<u64> = if take_all {
            order.iter().copied().collect()
        } else {
            let mut pri: Vec<(u64, u64)> = order.iter().map(|&fp| (mix64(fp ^ salt), fp)).collect();
            pri.select_nth_unstable(frontier_sample - 1);
            pri[..frontier_sample].iter().map(|&(_, fp)| fp).collect()
        };
        let scale = order.len() as f64 / selected.len() as f64;

        let regenerated: Vec<Vec<(u64, Vec<u8>)>> = parents
            .par_iter()
            .zip(contributions.par_iter())
            .map(|(&(parent, _), kids)| {
                let mut child = vec![0u8; size];
                let mut scratch = vec![0u8; size];
                let mut buf = Vec::new();
                let mut out = Vec::new();
                if kids.iter().all(|(fp, _)| !selected.contains(fp)) {
                    return out;
                }
                for g in 0..gens {
                    let fp = puzzle.neighbor_fingerprint(parent, g, &mut scratch, &mut buf);
                    if selected.contains(&fp) {
                        puzzle.apply_into(parent, g, &mut child);
                        out.push((fp, child.clone()));
                    }
                }
                out
            })
            .collect();
        let mut emitted: FxHashSet<u64> = FxHashSet::default();
        let mut next_sample = Vec::with_capacity(selected.len() * size);
        let mut next_weights = Vec::with_capacity(selected.len());
        for (fp, state) in regenerated.into_iter().flatten() {
            if emitted.insert(fp) {
                next_sample.extend_from_slice(&state);
                next_weights.push(found[&fp] * scale);
            }
        }

        level_exact = level_exact && take_all;
        sketch_prev = std::mem::replace(&mut sketch_cur, order.into_iter().collect());
        sample = next_sample;
        weights = next_weights;
    }

    let shells: Vec<T> = shells.into_iter().map(T::lit).collect();
    let cis: Vec<T> = cis.into_iter().map(T::lit).collect();
    let mut profile = ShellProfile::from_shells(spec, &shells, Some(&cis));
    profile.exhausted = exhausted;
    Ok(profile)
}

/// Standard deviation of the resampled total of `values`.
fn bootstrap_sd(values: &[f64], resamples: usize, seed: u64) -> f64 {
    let n = values.len();
    let totals: Vec<f64> = (0..resamples as u64)
        .into_par_iter()
        .map(|b| {
            let mut r = rng::sub_rng(seed, b);
            (0..n).map(|_| values[r.random_range(0..n)]).sum()
        })
        .collect();
    let mean = totals.iter().sum::<f64>() / resamples as f64;
    let var = totals.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (resamples.max(2) - 1) as f64;
    var.sqrt()
}
