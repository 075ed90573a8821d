#![allow(dead_code)]

use std::path::PathBuf;

use cubeprogress::fit::{read_series_csv, ProgressSeries};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("fixtures").join(name)
}

pub fn fixture_series(name: &str) -> Vec<ProgressSeries<f64>> {
    read_series_csv(std::fs::File::open(fixture(name)).unwrap()).unwrap()
}

pub fn series_named(all: &[ProgressSeries<f64>], label: &str) -> ProgressSeries<f64> {
    all.iter().find(|s| s.label == label).unwrap_or_else(|| panic!("no series {label}")).clone()
}

// Cubie-level 3-cube: corner permutation and twist, edge permutation and
// flip. Written against the usual URF..DRB / UR..BR numbering, separately
// from the facelet model under test.
#[derive(Clone, Copy, PartialEq, Eq)]
struct Cubies {
    cp: [u8; 8],
    co: [u8; 8],
    ep: [u8; 12],
    eo: [u8; 12],
}

const SOLVED: Cubies =
    Cubies { cp: [0, 1, 2, 3, 4, 5, 6, 7], co: [0; 8], ep: [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11], eo: [0; 12] };

const FACE_TURNS: [Cubies; 6] = [
    // U
    Cubies { cp: [3, 0, 1, 2, 4, 5, 6, 7], co: [0; 8], ep: [3, 0, 1, 2, 4, 5, 6, 7, 8, 9, 10, 11], eo: [0; 12] },
    // R
    Cubies {
        cp: [4, 1, 2, 0, 7, 5, 6, 3],
        co: [2, 0, 0, 1, 1, 0, 0, 2],
        ep: [8, 1, 2, 3, 11, 5, 6, 7, 4, 9, 10, 0],
        eo: [0; 12],
    },
    // F
    Cubies {
        cp: [1, 5, 2, 3, 0, 4, 6, 7],
        co: [1, 2, 0, 0, 2, 1, 0, 0],
        ep: [0, 9, 2, 3, 4, 8, 6, 7, 1, 5, 10, 11],
        eo: [0, 1, 0, 0, 0, 1, 0, 0, 1, 1, 0, 0],
    },
    // D
    Cubies { cp: [0, 1, 2, 3, 5, 6, 7, 4], co: [0; 8], ep: [0, 1, 2, 3, 5, 6, 7, 4, 8, 9, 10, 11], eo: [0; 12] },
    // L
    Cubies {
        cp: [0, 2, 6, 3, 4, 1, 5, 7],
        co: [0, 1, 2, 0, 0, 2, 1, 0],
        ep: [0, 1, 10, 3, 4, 5, 9, 7, 8, 2, 6, 11],
        eo: [0; 12],
    },
    // B
    Cubies {
        cp: [0, 1, 3, 7, 4, 5, 2, 6],
        co: [0, 0, 1, 2, 0, 0, 2, 1],
        ep: [0, 1, 2, 11, 4, 5, 6, 10, 8, 9, 3, 7],
        eo: [0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 1, 1],
    },
];

fn multiply(a: &Cubies, b: &Cubies) -> Cubies {
    let mut c = *a;
    for i in 0..8 {
        let j = b.cp[i] as usize;
        c.cp[i] = a.cp[j];
        c.co[i] = (a.co[j] + b.co[i]) % 3;
    }
    for i in 0..12 {
        let j = b.ep[i] as usize;
        c.ep[i] = a.ep[j];
        c.eo[i] = (a.eo[j] + b.eo[i]) % 2;
    }
    c
}

fn pack(c: &Cubies) -> u128 {
    let mut k = 0u128;
    for i in 0..8 {
        k = (k << 5) | (c.cp[i] as u128) << 2 | c.co[i] as u128;
    }
    for i in 0..12 {
        k = (k << 5) | (c.ep[i] as u128) << 1 | c.eo[i] as u128;
    }
    k
}

fn unpack(mut k: u128) -> Cubies {
    let mut c = SOLVED;
    for i in (0..12).rev() {
        c.eo[i] = (k & 1) as u8;
        c.ep[i] = ((k >> 1) & 15) as u8;
        k >>= 5;
    }
    for i in (0..8).rev() {
        c.co[i] = (k & 3) as u8;
        c.cp[i] = ((k >> 2) & 7) as u8;
        k >>= 5;
    }
    c
}

fn generators() -> Vec<Cubies> {
    let mut out = Vec::new();
    for turn in &FACE_TURNS {
        let mut g = *turn;
        for _ in 0..3 {
            out.push(g);
            g = multiply(&g, turn);
        }
    }
    out
}

/// Shell sizes of the 3-cube in the half-turn metric by sorted-vector BFS.
pub fn naive_cube3_shells(depth: usize) -> Vec<u64> {
    let gens = generators();
    let mut prev: Vec<u128> = Vec::new();
    let mut cur = vec![pack(&SOLVED)];
    let mut counts = vec![1u64];
    for _ in 0..depth {
        let mut next: Vec<u128> = Vec::with_capacity(cur.len() * gens.len());
        for &k in &cur {
            let s = unpack(k);
            next.extend(gens.iter().map(|g| pack(&multiply(&s, g))));
        }
        next.sort_unstable();
        next.dedup();
        next.retain(|k| prev.binary_search(k).is_err() && cur.binary_search(k).is_err());
        counts.push(next.len() as u64);
        prev = std::mem::replace(&mut cur, next);
    }
    counts
}

/// Highest modularity over every partition of the nodes, with its
/// partition. Weighted undirected edges; `n ≤ 10` keeps this quick.
pub fn exhaustive_modularity(n: usize, edges: &[(usize, usize, f64)]) -> (f64, Vec<usize>) {
    let m: f64 = edges.iter().map(|e| e.2).sum();
    let mut degree = vec![0.0; n];
    for &(u, v, w) in edges {
        degree[u] += w;
        degree[v] += w;
    }
    let q_of = |part: &[usize]| {
        let groups = part.iter().copied().max().map_or(0, |g| g + 1);
        let mut inside = vec![0.0; groups];
        let mut total = vec![0.0; groups];
        for &(u, v, w) in edges {
            if part[u] == part[v] {
                inside[part[u]] += w;
            }
        }
        for i in 0..n {
            total[part[i]] += degree[i];
        }
        (0..groups).map(|g| inside[g] / m - (total[g] / (2.0 * m)).powi(2)).sum::<f64>()
    };
    // restricted growth strings enumerate each set partition once
    let mut best = (f64::NEG_INFINITY, vec![0; n]);
    let mut part = vec![0usize; n];
    loop {
        let q = q_of(&part);
        if q > best.0 + 1e-12 {
            best = (q, part.clone());
        }
        let mut i = n - 1;
        loop {
            if i == 0 {
                return best;
            }
            let max_prefix = part[..i].iter().copied().max().unwrap_or(0);
            if part[i] <= max_prefix {
                part[i] += 1;
                for p in part.iter_mut().skip(i + 1) {
                    *p = 0;
                }
                break;
            }
            i -= 1;
        }
    }
}

pub type NamedGraph = (String, usize, Vec<(usize, usize, f64)>);

/// Small graphs for comparing greedy against exhaustive modularity:
/// named shapes plus seeded random graphs on 4 to 8 nodes.
pub fn small_test_graphs() -> Vec<NamedGraph> {
    use rand::Rng;
    let mut out: Vec<NamedGraph> = vec![
        ("two triangles".into(), 6, vec![(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0), (3, 4, 1.0), (4, 5, 1.0), (3, 5, 1.0)]),
        (
            "barbell".into(),
            8,
            vec![
                (0, 1, 1.0),
                (0, 2, 1.0),
                (0, 3, 1.0),
                (1, 2, 1.0),
                (1, 3, 1.0),
                (2, 3, 1.0),
                (4, 5, 1.0),
                (4, 6, 1.0),
                (4, 7, 1.0),
                (5, 6, 1.0),
                (5, 7, 1.0),
                (6, 7, 1.0),
                (3, 4, 1.0),
            ],
        ),
        ("path".into(), 8, (0..7).map(|i| (i, i + 1, 1.0)).collect()),
        ("cycle".into(), 8, (0..8).map(|i| (i, (i + 1) % 8, 1.0)).collect()),
        ("star".into(), 7, (1..7).map(|i| (0, i, 1.0)).collect()),
        ("weighted square".into(), 4, vec![(0, 1, 5.0), (1, 2, 1.0), (2, 3, 5.0), (3, 0, 1.0)]),
    ];
    let mut rng = cubeprogress::rng::rng(0x5eed);
    for i in 0..60 {
        let n = rng.random_range(4..=8);
        let p = rng.random_range(0.25..0.7);
        let weighted = i % 2 == 1;
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.random_bool(p) {
                    let w = if weighted { rng.random_range(1..=5) as f64 } else { 1.0 };
                    edges.push((u, v, w));
                }
            }
        }
        if !edges.is_empty() {
            out.push((format!("random {i} (n={n})"), n, edges));
        }
    }
    out
}
