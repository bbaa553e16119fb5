//! Relative entropy of one finite metric measure space with respect to
//! another: the smallest Kullback-Leibler divergence `D(iota_* nu || mu)`
//! over isometric embeddings `iota: Y -> X`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::space::FiniteMMS;

/// Natural-log KL divergence `sum nu_i log(nu_i / mu_i)`; infinite when
/// `nu` charges a point `mu` does not.
pub fn kl_divergence(nu: &[f64], mu: &[f64]) -> Result<f64> {
    if nu.len() != mu.len() {
        return Err(Error::DimensionMismatch { expected: mu.len(), actual: nu.len() });
    }
    let mut total = 0.0;
    for (&n, &m) in nu.iter().zip(mu) {
        if n > 0.0 {
            if m <= 0.0 {
                return Ok(f64::INFINITY);
            }
            total += n * (n / m).ln();
        }
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmbeddingSet {
    /// Each map sends point `i` of `Y` to point `map[i]` of `X`.
    pub maps: Vec<Vec<usize>>,
}

/// All injective maps `Y -> X` preserving distances within `tolerance`,
/// in lexicographic order.
pub fn find_isometric_embeddings(y: &FiniteMMS, x: &FiniteMMS, tolerance: f64) -> EmbeddingSet {
    let mut maps = Vec::new();
    if y.len() <= x.len() {
        let mut current = Vec::with_capacity(y.len());
        let mut used = vec![false; x.len()];
        extend(y, x, tolerance, &mut current, &mut used, &mut maps);
    }
    EmbeddingSet { maps }
}

fn extend(
    y: &FiniteMMS,
    x: &FiniteMMS,
    tol: f64,
    current: &mut Vec<usize>,
    used: &mut [bool],
    out: &mut Vec<Vec<usize>>,
) {
    let k = current.len();
    if k == y.len() {
        out.push(current.clone());
        return;
    }
    for cand in 0..x.len() {
        if used[cand] {
            continue;
        }
        let fits = (y.d(k, k) - x.d(cand, cand)).abs() <= tol
            && current.iter().enumerate().all(|(i, &img)| (y.d(i, k) - x.d(img, cand)).abs() <= tol);
        if fits {
            used[cand] = true;
            current.push(cand);
            extend(y, x, tol, current, used, out);
            current.pop();
            used[cand] = false;
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RelativeEntropy {
    /// `+inf` when no embedding exists or every embedding charges a null set.
    pub value: f64,
    pub argmin: Option<Vec<usize>>,
    pub embeddings: usize,
}

/// `I_X(Y)`: minimum over isometric embeddings of the KL divergence of the
/// pushed-forward measure of `y` from the measure of `x`.
pub fn relative_entropy(y: &FiniteMMS, x: &FiniteMMS, tolerance: f64) -> RelativeEntropy {
    let set = find_isometric_embeddings(y, x, tolerance);
    let mut best = RelativeEntropy { value: f64::INFINITY, argmin: None, embeddings: set.maps.len() };
    for map in &set.maps {
        let mut pushed = vec![0.0; x.len()];
        for (i, &img) in map.iter().enumerate() {
            pushed[img] += y.mass()[i];
        }
        let kl = kl_divergence(&pushed, x.mass()).expect("lengths agree");
        if best.argmin.is_none() || kl < best.value {
            best.value = kl;
            best.argmin = Some(map.clone());
        }
    }
    best
}
