//! Instance generators: single minterms, stars, uniform families, subgraph
//! families of complete graphs, and seeded random families.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::family::MintermFamily;
use crate::set::{ElementSet, MAX_GROUND};

fn check_k(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::Domain(format!("need 1 <= k <= n, got n = {n}, k = {k}")));
    }
    Ok(())
}

/// The family with the single minterm `{0, …, k-1}`, for which `μ_p = p^k`.
pub fn gen_single(n: usize, k: usize) -> Result<MintermFamily> {
    check_k(n, k)?;
    MintermFamily::minimalize([ElementSet::prefix(k)], n)
}

/// Minterms `{0, i}` for `i = 1..n-1`.
pub fn gen_star(n: usize) -> Result<MintermFamily> {
    if n < 3 {
        return Err(Error::Domain(format!("a star needs n >= 3, got {n}")));
    }
    MintermFamily::minimalize((1..n).map(|i| ElementSet::from_indices([0, i])), n)
}

/// Largest family `gen_all_k_subsets` will materialize.
pub const MAX_MINTERMS: usize = 1 << 22;

/// All `k`-subsets of `{0, …, n-1}`.
pub fn gen_all_k_subsets(n: usize, k: usize) -> Result<MintermFamily> {
    check_k(n, k)?;
    let count = (0..k).fold(1.0f64, |c, i| c * (n - i) as f64 / (i + 1) as f64);
    if count > MAX_MINTERMS as f64 {
        return Err(Error::Domain(format!("C({n}, {k}) minterms exceeds the limit of {MAX_MINTERMS}")));
    }
    MintermFamily::minimalize(combinations(n, k), n)
}

/// `k`-subsets of `{0, …, n-1}` in lexicographic order of index lists.
fn combinations(n: usize, k: usize) -> Vec<ElementSet> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(ElementSet::from_indices(idx.iter().copied()));
        let Some(i) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pattern {
    Triangle,
    K4,
    /// `K_4` plus a pendant edge from one of its vertices.
    K4Tail,
    /// Path with `r` edges.
    Path(usize),
    Custom(Vec<(usize, usize)>),
}

impl Pattern {
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let k4 = vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        match self {
            Pattern::Triangle => vec![(0, 1), (0, 2), (1, 2)],
            Pattern::K4 => k4,
            Pattern::K4Tail => {
                let mut e = k4;
                e.push((0, 4));
                e
            }
            Pattern::Path(r) => (0..*r).map(|i| (i, i + 1)).collect(),
            Pattern::Custom(edges) => edges.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.edges().iter().map(|&(_, b)| b + 1).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphSpec {
    /// Vertices of the host complete graph.
    pub m: usize,
    pub pattern: Pattern,
}

/// Index of edge `{i, j}`, `i < j`, in the lexicographic order of `K_m`'s
/// edges.
pub fn edge_index(m: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < m);
    i * m - i * (i + 1) / 2 + (j - i - 1)
}

/// Edge sets of every copy of the pattern in `K_m`, one minterm per distinct
/// edge set, on the ground set of `C(m, 2)` edges.
pub fn gen_graph(spec: &GraphSpec) -> Result<MintermFamily> {
    let m = spec.m;
    let ground = m * m.saturating_sub(1) / 2;
    if ground > MAX_GROUND {
        return Err(Error::Capacity { n: ground, limit: MAX_GROUND });
    }
    let edges = spec.pattern.edges();
    if edges.is_empty() || edges.iter().any(|&(a, b)| a == b) {
        return Err(Error::Domain("pattern needs at least one edge and no loops".into()));
    }
    let v = spec.pattern.vertex_count();
    if v > m {
        return Err(Error::Domain(format!("pattern on {v} vertices does not fit in K_{m}")));
    }
    let mut copies = Vec::new();
    let mut image = vec![usize::MAX; v];
    let mut used = vec![false; m];
    embed(0, m, &edges, &mut image, &mut used, &mut copies);
    MintermFamily::minimalize(copies, ground)
}

fn embed(
    depth: usize,
    m: usize,
    edges: &[(usize, usize)],
    image: &mut [usize],
    used: &mut [bool],
    out: &mut Vec<ElementSet>,
) {
    if depth == image.len() {
        let set = edges.iter().fold(ElementSet::EMPTY, |acc, &(a, b)| {
            let (x, y) = (image[a].min(image[b]), image[a].max(image[b]));
            acc.with(edge_index(m, x, y))
        });
        out.push(set);
        return;
    }
    for host in 0..m {
        if !used[host] {
            used[host] = true;
            image[depth] = host;
            embed(depth + 1, m, edges, image, used, out);
            used[host] = false;
        }
    }
}

/// `count` uniformly random `k`-subsets drawn from a ChaCha stream seeded by
/// `seed`, minimalized.
pub fn gen_random(n: usize, k: usize, count: usize, seed: u64) -> Result<MintermFamily> {
    check_k(n, k)?;
    if count == 0 {
        return Err(Error::Domain("count must be at least 1".into()));
    }
    MintermFamily::minimalize(random_sets(n, k, count, seed), n)
}

/// The raw draws behind [`gen_random`], before minimalization.
pub fn random_sets(n: usize, k: usize, count: usize, seed: u64) -> Vec<ElementSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| ElementSet::from_indices(sample(&mut rng, n, k)))
        .collect()
}
