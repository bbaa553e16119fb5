//! The row-exclusion matrix pseudo-metric `d_M` and its quotient `d_pi`
//! under simultaneous row/column permutations.
//!
//! `d_M(A, B)` is the infimum of `rho` such that some index set `lambda` with
//! `|lambda| < n rho` covers every pair `(i, j)` with `|a_ij - b_ij| >= rho`.
//! Between consecutive distinct gaps `g_k < g_{k+1}` the bad-pair graph is
//! fixed (its edges are the pairs with gap `> g_k`), so on that interval the
//! feasible `rho` are exactly those above `max(g_k, c_k / n)` where `c_k` is
//! its minimum vertex cover size. The returned value is the least such
//! endpoint; feasibility then holds for every `rho` strictly above it.
//! Gaps at or below [`TAU`] count as zero.

mod vertex_cover;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub use vertex_cover::{is_cover, min_vertex_cover, Graph};

use crate::error::{Error, Result};
use crate::space::{SquareMatrix, TAU};

/// Default size limit for exhaustive `d_pi`.
pub const EXACT_LIMIT: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DmWitness {
    pub value: f64,
    /// Excluded rows/columns, zero-based and ascending.
    pub excluded: Vec<usize>,
    /// Largest `|a_ij - b_ij|` over `i, j` outside `excluded`.
    pub max_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PiWitness {
    pub value: f64,
    /// `permutation[i]` is the row of `B` placed at row `i`.
    pub permutation: Vec<usize>,
    pub inner: DmWitness,
    /// False when produced by local search (an upper bound only).
    pub exact: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DpiMode {
    Exact { limit: usize },
    Heuristic { seed: u64, restarts: usize },
}

impl DpiMode {
    pub fn exact() -> Self {
        DpiMode::Exact { limit: EXACT_LIMIT }
    }

    pub fn heuristic(seed: u64) -> Self {
        DpiMode::Heuristic { seed, restarts: 4 }
    }
}

fn check_pair(a: &SquareMatrix, b: &SquareMatrix) -> Result<()> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch { expected: a.n(), actual: b.n() });
    }
    for m in [a, b] {
        if let Some((i, j)) = m.asymmetry(TAU) {
            return Err(Error::Asymmetric(i, j));
        }
    }
    Ok(())
}

/// Exact `d_M` on `p` indices with gaps from `gap`, charging exclusions
/// against `denom` rows. With `denom > p` this is a lower bound for any
/// extension of the `p x p` block to `denom` rows.
fn dm_from_gaps(p: usize, gap: impl Fn(usize, usize) -> f64, denom: usize) -> DmWitness {
    let mut gaps = Vec::with_capacity(p * (p + 1) / 2);
    for i in 0..p {
        for j in i..p {
            let g = gap(i, j);
            gaps.push((i, j, if g <= TAU { 0.0 } else { g }));
        }
    }
    let mut levels: Vec<f64> = gaps.iter().map(|e| e.2).filter(|&g| g > 0.0).collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    // level k: lower end g_k of the k-th interval (g_0 = 0)
    let lower = |k: usize| if k == 0 { 0.0 } else { levels[k - 1] };
    let upper = |k: usize| levels.get(k).copied().unwrap_or(f64::INFINITY);
    let cover_at = |k: usize| {
        let floor = lower(k);
        let mut g = Graph::new(p);
        for &(i, j, d) in &gaps {
            if d > floor {
                g.add_edge(i, j);
            }
        }
        min_vertex_cover(&g)
    };
    let n = denom as f64;
    // first interval k whose cover fits: c_k / n <= g_{k+1}
    let (mut lo, mut hi) = (0usize, levels.len());
    let mut found = None;
    while lo < hi {
        let mid = (lo + hi) / 2;
        let c = cover_at(mid);
        if c.len() as f64 / n <= upper(mid) {
            found = Some((mid, c));
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let (k, cover) = match found {
        Some((k, c)) if k == lo => (k, c),
        _ => (lo, cover_at(lo)),
    };
    let value = lower(k).max(cover.len() as f64 / n);
    let mut outside = vec![true; p];
    for &v in &cover {
        outside[v] = false;
    }
    let max_residual = gaps
        .iter()
        .filter(|&&(i, j, _)| outside[i] && outside[j])
        .map(|e| e.2)
        .fold(0.0, f64::max);
    DmWitness { value, excluded: cover, max_residual }
}

/// Exact `d_M(A, B)` with an optimal exclusion set.
pub fn dm_distance(a: &SquareMatrix, b: &SquareMatrix) -> Result<DmWitness> {
    check_pair(a, b)?;
    Ok(dm_unchecked(a, b, None))
}

fn dm_unchecked(a: &SquareMatrix, b: &SquareMatrix, perm: Option<&[usize]>) -> DmWitness {
    let n = a.n();
    match perm {
        None => dm_from_gaps(n, |i, j| (a.get(i, j) - b.get(i, j)).abs(), n),
        Some(p) => dm_from_gaps(n, |i, j| (a.get(i, j) - b.get(p[i], p[j])).abs(), n),
    }
}

/// `d_pi(A, B) = min over permutations of d_M(A, pi B)`.
pub fn dpi_distance(a: &SquareMatrix, b: &SquareMatrix, mode: DpiMode) -> Result<PiWitness> {
    check_pair(a, b)?;
    match mode {
        DpiMode::Exact { limit } => {
            if a.n() > limit {
                return Err(Error::SizeLimit { n: a.n(), limit });
            }
            Ok(dpi_exact(a, b))
        }
        DpiMode::Heuristic { seed, restarts } => Ok(dpi_heuristic(a, b, seed, restarts)),
    }
}

struct PermSearch<'a> {
    a: &'a SquareMatrix,
    b: &'a SquareMatrix,
    perm: Vec<usize>,
    used: Vec<bool>,
    best_value: f64,
    best_perm: Vec<usize>,
}

impl PermSearch<'_> {
    fn dfs(&mut self, depth: usize) {
        let n = self.a.n();
        if depth == n {
            let w = dm_unchecked(self.a, self.b, Some(&self.perm));
            if w.value < self.best_value {
                self.best_value = w.value;
                self.best_perm = self.perm.clone();
            }
            return;
        }
        for cand in 0..n {
            if self.used[cand] {
                continue;
            }
            self.perm.push(cand);
            self.used[cand] = true;
            let (a, b, p) = (self.a, self.b, &self.perm);
            let bound = dm_from_gaps(depth + 1, |i, j| (a.get(i, j) - b.get(p[i], p[j])).abs(), n).value;
            if bound < self.best_value {
                self.dfs(depth + 1);
            }
            self.used[cand] = false;
            self.perm.pop();
        }
    }
}

/// Depth-first search over permutations in lexicographic order; a prefix is
/// pruned once its own gaps force `d_M` to at least the incumbent. Ties keep
/// the lexicographically smallest permutation.
fn dpi_exact(a: &SquareMatrix, b: &SquareMatrix) -> PiWitness {
    let n = a.n();
    let identity: Vec<usize> = (0..n).collect();
    let start = dm_unchecked(a, b, None);
    let mut search = PermSearch {
        a,
        b,
        perm: Vec::with_capacity(n),
        used: vec![false; n],
        best_value: start.value,
        best_perm: identity,
    };
    if start.value > 0.0 {
        search.dfs(0);
    }
    let inner = dm_unchecked(a, b, Some(&search.best_perm));
    PiWitness { value: inner.value, permutation: search.best_perm, inner, exact: true }
}

fn score(a: &SquareMatrix, b: &SquareMatrix, perm: &[usize]) -> (f64, f64) {
    let n = a.n();
    let mut l1 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            l1 += (a.get(i, j) - b.get(perm[i], perm[j])).abs();
        }
    }
    (dm_unchecked(a, b, Some(perm)).value, l1)
}

fn better(x: (f64, f64), y: (f64, f64)) -> bool {
    x.0 < y.0 || (x.0 == y.0 && x.1 < y.1 - TAU)
}

/// Best-improvement transposition search from `perm`.
fn local_search(a: &SquareMatrix, b: &SquareMatrix, mut perm: Vec<usize>) -> (Vec<usize>, (f64, f64)) {
    let n = a.n();
    let mut current = score(a, b, &perm);
    loop {
        let mut best_move = None;
        let mut best_score = current;
        for i in 0..n {
            for j in i + 1..n {
                perm.swap(i, j);
                let s = score(a, b, &perm);
                if better(s, best_score) {
                    best_score = s;
                    best_move = Some((i, j));
                }
                perm.swap(i, j);
            }
        }
        match best_move {
            Some((i, j)) => {
                perm.swap(i, j);
                current = best_score;
            }
            None => return (perm, current),
        }
    }
}

/// Upper bound on `d_pi`: start from the assignment matching rows ranked by
/// row sum, then random restarts drawn from `seed`, each refined by
/// transposition local search.
fn dpi_heuristic(a: &SquareMatrix, b: &SquareMatrix, seed: u64, restarts: usize) -> PiWitness {
    let n = a.n();
    let rank = |m: &SquareMatrix| {
        let sums: Vec<f64> = (0..n).map(|i| m.row(i).iter().sum()).collect();
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&x, &y| sums[x].total_cmp(&sums[y]).then(x.cmp(&y)));
        idx
    };
    let (ra, rb) = (rank(a), rank(b));
    let mut greedy = vec![0; n];
    for r in 0..n {
        greedy[ra[r]] = rb[r];
    }
    let (mut best_perm, mut best) = local_search(a, b, greedy);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..restarts {
        if best.0 == 0.0 {
            break;
        }
        let mut start: Vec<usize> = (0..n).collect();
        start.shuffle(&mut rng);
        let (p, s) = local_search(a, b, start);
        if better(s, best) {
            best = s;
            best_perm = p;
        }
    }
    let inner = dm_unchecked(a, b, Some(&best_perm));
    PiWitness { value: inner.value, permutation: best_perm, inner, exact: false }
}
