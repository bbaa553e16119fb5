//! Brute-force oracles and generators shared by the integration tests.
//! Nothing here calls the library's solvers.

#![allow(dead_code)]

use ghp_core::{DistanceMatrix, SquareMatrix, TAU};
use proptest::prelude::*;
use rand::Rng;

pub fn gap_or_zero(g: f64) -> f64 {
    if g <= TAU {
        0.0
    } else {
        g
    }
}

/// Largest entry gap of `a` against `b` over indices outside `excluded`.
fn residual(a: &SquareMatrix, b: &SquareMatrix, perm: &[usize], excluded: u32) -> f64 {
    let n = a.n();
    let mut worst = 0.0f64;
    for i in (0..n).filter(|i| excluded & (1 << i) == 0) {
        for j in (0..n).filter(|j| excluded & (1 << j) == 0) {
            worst = worst.max(gap_or_zero((a.get(i, j) - b.get(perm[i], perm[j])).abs()));
        }
    }
    worst
}

/// `min over lambda of max(|lambda| / n, residual gap)`.
pub fn dm_by_exclusion_sets(a: &SquareMatrix, b: &SquareMatrix) -> f64 {
    let id: Vec<usize> = (0..a.n()).collect();
    dm_perm_by_exclusion_sets(a, b, &id)
}

fn dm_perm_by_exclusion_sets(a: &SquareMatrix, b: &SquareMatrix, perm: &[usize]) -> f64 {
    let n = a.n();
    (0u32..1 << n)
        .map(|lam| (lam.count_ones() as f64 / n as f64).max(residual(a, b, perm, lam)))
        .fold(f64::INFINITY, f64::min)
}

/// Smallest candidate `rho` (a gap or a multiple of `1/n`) for which some
/// exclusion set of size at most `n rho` leaves every gap at most `rho`.
pub fn dm_by_candidate_rho(a: &SquareMatrix, b: &SquareMatrix) -> f64 {
    let n = a.n();
    let id: Vec<usize> = (0..n).collect();
    let mut candidates: Vec<f64> = (0..=n).map(|k| k as f64 / n as f64).collect();
    for i in 0..n {
        for j in 0..n {
            candidates.push(gap_or_zero((a.get(i, j) - b.get(i, j)).abs()));
        }
    }
    candidates.sort_by(f64::total_cmp);
    for rho in candidates {
        let ok = (0u32..1 << n)
            .any(|lam| lam.count_ones() as f64 <= n as f64 * rho + 1e-12 && residual(a, b, &id, lam) <= rho);
        if ok {
            return rho;
        }
    }
    unreachable!("rho = 1 is always feasible")
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for k in 0..used.len() {
            if !used[k] {
                used[k] = true;
                cur.push(k);
                go(cur, used, out);
                cur.pop();
                used[k] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// `min over all n! permutations` of the exclusion-set formula.
pub fn dpi_brute(a: &SquareMatrix, b: &SquareMatrix) -> f64 {
    permutations(a.n()).iter().map(|p| dm_perm_by_exclusion_sets(a, b, p)).fold(f64::INFINITY, f64::min)
}

/// Largest mass a coupling of `p` and `q` can put on pairs with
/// `d <= r`, by the cut formula `min over row sets S of p(S^c) + q(N(S))`.
fn max_mass_within(p: &[f64], q: &[f64], d: &[Vec<f64>], r: f64) -> f64 {
    let (rows, cols) = (p.len(), q.len());
    let mut best = f64::INFINITY;
    for s in 0u32..1 << rows {
        let outside: f64 = (0..rows).filter(|i| s & (1 << i) == 0).map(|i| p[i]).sum();
        let reach: f64 = (0..cols)
            .filter(|&j| (0..rows).any(|i| s & (1 << i) != 0 && d[i][j] <= r))
            .map(|j| q[j])
            .sum();
        best = best.min(outside + reach);
    }
    best
}

/// Lévy-Prokhorov distance by bisection on `r` over the feasibility test
/// `1 - max_mass_within(r) <= r`, finished by snapping to the breakpoint
/// or deficit it converged to.
pub fn prokhorov_oracle(p: &[f64], q: &[f64], d: &[Vec<f64>]) -> f64 {
    let feasible = |r: f64| 1.0 - max_mass_within(p, q, d, r) <= r + 1e-12;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    if feasible(0.0) {
        return 0.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

pub fn random_symmetric(n: usize, rng: &mut impl Rng, grid: bool) -> SquareMatrix {
    let mut m = SquareMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let v = if grid { rng.random_range(0..5) as f64 * 0.25 } else { rng.random::<f64>() };
            let v = if i == j && rng.random_bool(0.7) { 0.0 } else { v };
            m.set(i, j, v);
            m.set(j, i, v);
        }
    }
    m
}

pub fn random_measure(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| if rng.random_bool(0.15) { 0.0 } else { rng.random::<f64>() }).collect();
    let s: f64 = raw.iter().sum();
    if s == 0.0 {
        let mut v = vec![0.0; n];
        v[0] = 1.0;
        return v;
    }
    raw.iter().map(|x| x / s).collect()
}

pub fn random_points(n: usize, dim: usize, rng: &mut impl Rng) -> Vec<Vec<f64>> {
    (0..n).map(|_| (0..dim).map(|_| rng.random::<f64>()).collect()).collect()
}

/// Random doubly stochastic matrix as the average of `k` random permutations.
pub fn random_doubly_stochastic(n: usize, k: usize, rng: &mut impl Rng) -> SquareMatrix {
    let mut m = SquareMatrix::zeros(n);
    for _ in 0..k {
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            perm.swap(i, rng.random_range(0..=i));
        }
        for (i, &j) in perm.iter().enumerate() {
            m.set(i, j, m.get(i, j) + 1.0 / k as f64);
        }
    }
    m
}

/// Symmetric matrices with entries drawn from a coarse grid (to force ties)
/// or from `[0, 1)`; diagonals mostly zero.
pub fn symmetric_matrix(n: usize) -> impl Strategy<Value = SquareMatrix> {
    let entry = prop_oneof![(0u8..5).prop_map(|k| k as f64 * 0.25), 0.0f64..1.0];
    proptest::collection::vec(entry, n * n).prop_map(move |v| {
        SquareMatrix::from_fn(n, |i, j| {
            let (a, b) = if i <= j { (i, j) } else { (j, i) };
            if a == b && v[a * n + a] > 0.5 {
                0.0
            } else {
                v[a * n + b]
            }
        })
    })
}

pub fn matrix_triple(max_n: usize) -> impl Strategy<Value = (SquareMatrix, SquareMatrix, SquareMatrix)> {
    (1..=max_n).prop_flat_map(|n| (symmetric_matrix(n), symmetric_matrix(n), symmetric_matrix(n)))
}

pub fn measure(n: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(prop_oneof![1 => Just(0.0), 4 => 0.01f64..1.0], n).prop_map(|raw| {
        let s: f64 = raw.iter().sum();
        if s == 0.0 {
            let mut v = vec![0.0; raw.len()];
            v[0] = 1.0;
            v
        } else {
            raw.iter().map(|x| x / s).collect()
        }
    })
}

/// Distances of five fixed points on a line.
pub fn ground_five() -> Vec<Vec<f64>> {
    DistanceMatrix::from_line(&[0.0, 0.15, 0.4, 0.45, 1.2]).matrix().rows()
}

pub fn point_cloud(max_n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    (1..=max_n).prop_flat_map(|n| proptest::collection::vec(proptest::collection::vec(0.0f64..1.0, 2), n))
}
