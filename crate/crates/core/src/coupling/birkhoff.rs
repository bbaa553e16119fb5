use serde::Serialize;

use super::matching::max_matching;
use crate::error::{Error, Result};
use crate::space::{SquareMatrix, TAU};

/// Entries at or below this are dropped from the support while peeling.
const SUPPORT_EPS: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BirkhoffDecomposition {
    /// `(coefficient, permutation)`; `permutation[i]` is the column of row `i`.
    pub terms: Vec<(f64, Vec<usize>)>,
}

impl BirkhoffDecomposition {
    pub fn reconstruct(&self, n: usize) -> SquareMatrix {
        let mut m = SquareMatrix::zeros(n);
        for (c, perm) in &self.terms {
            for (i, &j) in perm.iter().enumerate() {
                m.set(i, j, m.get(i, j) + c);
            }
        }
        m
    }

    pub fn coefficient_sum(&self) -> f64 {
        self.terms.iter().map(|t| t.0).sum()
    }
}

/// Peels permutation matrices off a doubly stochastic matrix. Each step
/// takes a perfect matching on the current support and subtracts its
/// smallest entry, zeroing at least that entry, so at most `(n-1)^2 + 1`
/// terms are produced.
pub fn birkhoff_decompose(s: &SquareMatrix) -> Result<BirkhoffDecomposition> {
    let n = s.n();
    for i in 0..n {
        let row: f64 = s.row(i).iter().sum();
        let col: f64 = (0..n).map(|k| s.get(k, i)).sum();
        if (row - 1.0).abs() > TAU {
            return Err(Error::NotDoublyStochastic(format!("row {i} sums to {row}")));
        }
        if (col - 1.0).abs() > TAU {
            return Err(Error::NotDoublyStochastic(format!("column {i} sums to {col}")));
        }
    }
    if let Some(x) = s.as_slice().iter().find(|&&x| x < -TAU || x.is_nan()) {
        return Err(Error::NotDoublyStochastic(format!("negative entry {x}")));
    }

    let mut residual = SquareMatrix::from_fn(n, |i, j| if s.get(i, j) > SUPPORT_EPS { s.get(i, j) } else { 0.0 });
    let mut terms = Vec::new();
    loop {
        let remaining: f64 = residual.as_slice().iter().sum();
        if remaining <= SUPPORT_EPS * n as f64 {
            break;
        }
        let m = max_matching(n, n, |i, j| residual.get(i, j) > 0.0);
        if m.size() < n {
            return Err(Error::NoPerfectMatching(remaining));
        }
        let mut perm = vec![0; n];
        for (i, j) in m.pairs() {
            perm[i] = j;
        }
        let (argmin, c) = perm
            .iter()
            .enumerate()
            .map(|(i, &j)| (i, residual.get(i, j)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("n > 0");
        for (i, &j) in perm.iter().enumerate() {
            let v = if i == argmin { 0.0 } else { residual.get(i, j) - c };
            residual.set(i, j, if v > SUPPORT_EPS { v } else { 0.0 });
        }
        terms.push((c, perm));
    }
    Ok(BirkhoffDecomposition { terms })
}
