//! Distance matrices, finite metric measure spaces and matrix ensembles.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Global comparison tolerance for metric inequalities and mass sums.
pub const TAU: f64 = 1e-9;

/// Dense square matrix of reals, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<Vec<f64>>", try_from = "Vec<Vec<f64>>")]
pub struct SquareMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, actual: row.len() });
            }
            data.extend_from_slice(row);
        }
        Ok(Self { n, data })
    }

    /// Builds `m[i][j] = f(i, j)`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    /// Pairwise absolute differences of points on the real line.
    pub fn from_line(points: &[f64]) -> Self {
        Self::from_fn(points.len(), |i, j| (points[i] - points[j]).abs())
    }

    /// Pairwise Euclidean distances.
    pub fn from_euclidean(points: &[Vec<f64>]) -> Self {
        Self::from_fn(points.len(), |i, j| euclidean(&points[i], &points[j]))
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n.max(1)).take(self.n).map(<[f64]>::to_vec).collect()
    }

    /// First asymmetric pair beyond `tol`, if any.
    pub fn asymmetry(&self, tol: f64) -> Option<(usize, usize)> {
        for i in 0..self.n {
            for j in i + 1..self.n {
                if (self.get(i, j) - self.get(j, i)).abs() > tol {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Simultaneous row/column permutation: `out[i][j] = self[perm[i]][perm[j]]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n);
        Self::from_fn(self.n, |i, j| self.get(perm[i], perm[j]))
    }

    /// Principal submatrix on `idx`, in the given order.
    pub fn submatrix(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), |i, j| self.get(idx[i], idx[j]))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// Bit patterns of the entries; used as an exact hash key.
    pub(crate) fn bit_key(&self) -> Vec<u64> {
        self.data.iter().map(|x| x.to_bits()).collect()
    }
}

impl From<SquareMatrix> for Vec<Vec<f64>> {
    fn from(m: SquareMatrix) -> Self {
        m.rows()
    }
}

impl TryFrom<Vec<Vec<f64>>> for SquareMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        SquareMatrix::from_rows(&rows)
    }
}

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// A constraint of the distance-matrix definition that failed.
///
/// Indices are zero-based.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    NotSquare { row: usize, len: usize, n: usize },
    Negative { i: usize, j: usize, value: f64 },
    Asymmetric { i: usize, j: usize },
    NonzeroDiagonal { i: usize, value: f64 },
    Triangle { i: usize, j: usize, k: usize, excess: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotSquare { row, len, n } => {
                write!(f, "row {row} has {len} entries, expected {n}")
            }
            Violation::Negative { i, j, value } => write!(f, "negative entry {value} at ({i}, {j})"),
            Violation::Asymmetric { i, j } => write!(f, "asymmetric at ({i}, {j})"),
            Violation::NonzeroDiagonal { i, value } => {
                write!(f, "nonzero diagonal {value} at ({i}, {i})")
            }
            Violation::Triangle { i, j, k, excess } => {
                write!(f, "triangle d({i},{j}) > d({i},{k}) + d({k},{j}) by {excess}")
            }
        }
    }
}

/// A symmetric, nonnegative, zero-diagonal matrix satisfying the triangle
/// inequality (up to the tolerance it was validated with).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<Vec<f64>>", try_from = "Vec<Vec<f64>>")]
pub struct DistanceMatrix(SquareMatrix);

impl DistanceMatrix {
    /// Validates with tolerance [`TAU`].
    pub fn new(m: SquareMatrix) -> Result<Self> {
        let v = violations(&m, TAU);
        if v.is_empty() {
            Ok(Self(m))
        } else {
            Err(Error::InvalidMatrix(v))
        }
    }

    /// Wraps without checking. Callers guarantee the invariants.
    pub(crate) fn new_unchecked(m: SquareMatrix) -> Self {
        Self(m)
    }

    pub fn from_line(points: &[f64]) -> Self {
        Self(SquareMatrix::from_line(points))
    }

    pub fn from_euclidean(points: &[Vec<f64>]) -> Self {
        Self(SquareMatrix::from_euclidean(points))
    }

    pub fn zeros(n: usize) -> Self {
        Self(SquareMatrix::zeros(n))
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> SquareMatrix {
        self.0
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.0.n()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0.get(i, j)
    }

    pub fn diameter(&self) -> f64 {
        self.0.as_slice().iter().copied().fold(0.0, f64::max)
    }

    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self(self.0.permuted(perm))
    }

    pub fn submatrix(&self, idx: &[usize]) -> Self {
        Self(self.0.submatrix(idx))
    }
}

impl From<DistanceMatrix> for Vec<Vec<f64>> {
    fn from(m: DistanceMatrix) -> Self {
        m.0.rows()
    }
}

impl TryFrom<Vec<Vec<f64>>> for DistanceMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        validate_distance_matrix(&rows, TAU)
    }
}

fn violations(m: &SquareMatrix, tol: f64) -> Vec<Violation> {
    let n = m.n();
    let mut out = Vec::new();
    for i in 0..n {
        let d = m.get(i, i);
        if d.abs() > tol {
            out.push(Violation::NonzeroDiagonal { i, value: d });
        }
        for j in 0..n {
            let v = m.get(i, j);
            if v < -tol || v.is_nan() {
                out.push(Violation::Negative { i, j, value: v });
            }
            if j > i && (v - m.get(j, i)).abs() > tol {
                out.push(Violation::Asymmetric { i, j });
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let dij = m.get(i, j);
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                let excess = dij - (m.get(i, k) + m.get(k, j));
                if excess > tol {
                    out.push(Violation::Triangle { i, j, k, excess });
                }
            }
        }
    }
    out
}

/// Checks every defining constraint of a distance matrix and reports all
/// violations, not just the first.
pub fn validate_distance_matrix(entries: &[Vec<f64>], tolerance: f64) -> Result<DistanceMatrix> {
    let n = entries.len();
    let ragged: Vec<Violation> = entries
        .iter()
        .enumerate()
        .filter(|(_, r)| r.len() != n)
        .map(|(row, r)| Violation::NotSquare { row, len: r.len(), n })
        .collect();
    if !ragged.is_empty() {
        return Err(Error::InvalidMatrix(ragged));
    }
    let m = SquareMatrix::from_rows(entries)?;
    let v = violations(&m, tolerance);
    if v.is_empty() {
        Ok(DistanceMatrix(m))
    } else {
        Err(Error::InvalidMatrix(v))
    }
}

/// A finite pseudo-metric measure space.
///
/// Distinct points at distance zero are allowed, as are zero masses. A
/// zero-mass point is invisible to every measure-based comparison.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiniteMMS {
    labels: Vec<String>,
    dist: DistanceMatrix,
    mass: Vec<f64>,
}

impl FiniteMMS {
    pub fn new(labels: Vec<String>, dist: DistanceMatrix, mass: Vec<f64>) -> Result<Self> {
        let n = dist.n();
        if labels.len() != n {
            return Err(Error::DimensionMismatch { expected: n, actual: labels.len() });
        }
        validate_mass(&mass, n)?;
        Ok(Self { labels, dist, mass })
    }

    /// Points labelled `x1..xn`.
    pub fn unlabeled(dist: DistanceMatrix, mass: Vec<f64>) -> Result<Self> {
        let labels = (1..=dist.n()).map(|i| format!("x{i}")).collect();
        Self::new(labels, dist, mass)
    }

    pub fn uniform(labels: Vec<String>, dist: DistanceMatrix) -> Result<Self> {
        let n = dist.n();
        Self::new(labels, dist, vec![1.0 / n as f64; n])
    }

    pub fn from_line(points: &[f64], mass: Vec<f64>) -> Result<Self> {
        Self::unlabeled(DistanceMatrix::from_line(points), mass)
    }

    pub fn from_euclidean(points: &[Vec<f64>], mass: Vec<f64>) -> Result<Self> {
        Self::unlabeled(DistanceMatrix::from_euclidean(points), mass)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn dist(&self) -> &DistanceMatrix {
        &self.dist
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist.get(i, j)
    }

    /// True if every point carries mass `1/n` within [`TAU`].
    pub fn is_uniform(&self) -> bool {
        let u = 1.0 / self.len() as f64;
        self.mass.iter().all(|m| (m - u).abs() <= TAU)
    }

    /// Same space with points reordered: new point `i` is old point `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self {
            labels: perm.iter().map(|&i| self.labels[i].clone()).collect(),
            dist: self.dist.permuted(perm),
            mass: perm.iter().map(|&i| self.mass[i]).collect(),
        }
    }

    pub fn with_mass(&self, mass: Vec<f64>) -> Result<Self> {
        Self::new(self.labels.clone(), self.dist.clone(), mass)
    }

    pub fn with_labels(&self, labels: Vec<String>) -> Result<Self> {
        Self::new(labels, self.dist.clone(), self.mass.clone())
    }
}

pub(crate) fn validate_mass(mass: &[f64], n: usize) -> Result<()> {
    if mass.len() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: mass.len() });
    }
    if let Some((i, m)) = mass.iter().enumerate().find(|(_, m)| !(**m >= 0.0)) {
        return Err(Error::InvalidMeasure(format!("mass[{i}] = {m} is negative")));
    }
    let total: f64 = mass.iter().sum();
    if (total - 1.0).abs() > TAU {
        return Err(Error::InvalidMeasure(format!("total mass {total} != 1")));
    }
    Ok(())
}

/// Uniform-mass space on the rows of `a`.
pub fn theta_map(a: &DistanceMatrix) -> FiniteMMS {
    let n = a.n();
    FiniteMMS {
        labels: (1..=n).map(|i| format!("x{i}")).collect(),
        dist: a.clone(),
        mass: vec![1.0 / n as f64; n],
    }
}

/// Merges points in the transitive closure of `d <= tolerance`, summing
/// their masses. Each class keeps the distances of its lowest-index member
/// and the `+`-joined labels of all members.
pub fn quotient_zero_distances(s: &FiniteMMS, tolerance: f64) -> FiniteMMS {
    let n = s.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for i in 0..n {
        for j in i + 1..n {
            if s.d(i, j) <= tolerance {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    let (lo, hi) = if ri < rj { (ri, rj) } else { (rj, ri) };
                    parent[hi] = lo;
                }
            }
        }
    }
    let mut reps: Vec<usize> = Vec::new();
    let mut class_of = vec![0usize; n];
    for (i, class) in class_of.iter_mut().enumerate() {
        let r = find(&mut parent, i);
        *class = match reps.iter().position(|&x| x == r) {
            Some(c) => c,
            None => {
                reps.push(r);
                reps.len() - 1
            }
        };
    }
    let k = reps.len();
    let mut mass = vec![0.0; k];
    let mut labels: Vec<Vec<&str>> = vec![Vec::new(); k];
    for i in 0..n {
        mass[class_of[i]] += s.mass[i];
        labels[class_of[i]].push(&s.labels[i]);
    }
    FiniteMMS {
        labels: labels.into_iter().map(|l| l.join("+")).collect(),
        dist: s.dist.submatrix(&reps),
        mass,
    }
}

/// A finitely supported distribution over distance matrices of a common size.
#[derive(Clone, Debug, Serialize)]
pub struct MatrixEnsemble {
    atoms: Vec<(DistanceMatrix, f64)>,
}

impl MatrixEnsemble {
    pub fn new(atoms: Vec<(DistanceMatrix, f64)>) -> Result<Self> {
        let Some(n) = atoms.first().map(|(m, _)| m.n()) else {
            return Err(Error::InvalidMeasure("empty ensemble".into()));
        };
        if let Some((m, _)) = atoms.iter().find(|(m, _)| m.n() != n) {
            return Err(Error::DimensionMismatch { expected: n, actual: m.n() });
        }
        let p: Vec<f64> = atoms.iter().map(|(_, p)| *p).collect();
        validate_mass(&p, p.len())?;
        Ok(Self { atoms })
    }

    pub fn atoms(&self) -> &[(DistanceMatrix, f64)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.atoms[0].0.n()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.atoms.iter().map(|(_, p)| *p).collect()
    }

    pub fn matrices(&self) -> impl Iterator<Item = &DistanceMatrix> {
        self.atoms.iter().map(|(m, _)| m)
    }
}
