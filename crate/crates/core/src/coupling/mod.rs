//! Couplings of discrete measures and the functionals built on them.
//!
//! For a coupling `theta` over a ground distance `D`,
//! `Delta(theta) = inf { r >= 0 : theta(D <= r) >= 1 - r }`, and the
//! Lévy-Prokhorov distance is the infimum of `Delta` over all couplings with
//! the given marginals. Both are step-function minimisations: on the segment
//! starting at a breakpoint `v` the mass available within distance `v` is
//! constant (`F`), so the least feasible `r` there is `max(v, 1 - F)`.
//!
//! A mass deficit `1 - F` at or below [`TAU`] is treated as zero.

mod birkhoff;
pub mod flow;
mod matching;

use num_rational::BigRational;
use serde::Serialize;

pub use birkhoff::{birkhoff_decompose, BirkhoffDecomposition};
use flow::{Capacity, FlowNetwork};

use crate::error::{Error, Result};
use crate::space::TAU;

/// Joint mass over a `rows x cols` product with the ground distance of each
/// pair.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Coupling {
    mass: Vec<Vec<f64>>,
    ground: Vec<Vec<f64>>,
}

impl Coupling {
    pub fn new(mass: Vec<Vec<f64>>, ground: Vec<Vec<f64>>) -> Result<Self> {
        let rows = mass.len();
        let cols = mass.first().map_or(0, Vec::len);
        check_grid(&mass, rows, cols)?;
        check_grid(&ground, rows, cols)?;
        let mut total = 0.0;
        for (i, row) in mass.iter().enumerate() {
            for (j, &m) in row.iter().enumerate() {
                if !(m >= -TAU) {
                    return Err(Error::InvalidCoupling(format!("mass {m} at ({i}, {j})")));
                }
                let d = ground[i][j];
                if !(d >= 0.0) {
                    return Err(Error::NegativeDistance { row: i, col: j, value: d });
                }
                total += m;
            }
        }
        if (total - 1.0).abs() > TAU {
            return Err(Error::InvalidCoupling(format!("total mass {total} != 1")));
        }
        Ok(Self { mass, ground })
    }

    pub fn rows(&self) -> usize {
        self.mass.len()
    }

    pub fn cols(&self) -> usize {
        self.mass.first().map_or(0, Vec::len)
    }

    pub fn mass(&self) -> &[Vec<f64>] {
        &self.mass
    }

    pub fn ground(&self) -> &[Vec<f64>] {
        &self.ground
    }

    pub fn row_marginal(&self) -> Vec<f64> {
        self.mass.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn col_marginal(&self) -> Vec<f64> {
        (0..self.cols()).map(|j| self.mass.iter().map(|r| r[j]).sum()).collect()
    }

    /// Largest marginal discrepancy against `p` (rows) and `q` (columns).
    pub fn marginal_error(&self, p: &[f64], q: &[f64]) -> f64 {
        let dr = self.row_marginal().iter().zip(p).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let dc = self.col_marginal().iter().zip(q).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        dr.max(dc)
    }

    pub fn check_marginals(&self, p: &[f64], q: &[f64]) -> Result<()> {
        if p.len() != self.rows() || q.len() != self.cols() {
            return Err(Error::DimensionMismatch { expected: self.rows(), actual: p.len() });
        }
        let err = self.marginal_error(p, q);
        if err > TAU {
            return Err(Error::InvalidCoupling(format!("marginals off by {err}")));
        }
        Ok(())
    }

    /// Same coupling viewed from the other side.
    pub fn transposed(&self) -> Self {
        let t = |g: &Vec<Vec<f64>>| (0..self.cols()).map(|j| g.iter().map(|r| r[j]).collect()).collect();
        Self { mass: t(&self.mass), ground: t(&self.ground) }
    }
}

fn check_grid(g: &[Vec<f64>], rows: usize, cols: usize) -> Result<()> {
    if g.len() != rows {
        return Err(Error::DimensionMismatch { expected: rows, actual: g.len() });
    }
    if let Some(r) = g.iter().find(|r| r.len() != cols) {
        return Err(Error::DimensionMismatch { expected: cols, actual: r.len() });
    }
    Ok(())
}

fn snap_deficit(d: f64) -> f64 {
    if d <= TAU {
        0.0
    } else {
        d
    }
}

/// `Delta(theta)` computed exactly over the sorted pair distances.
pub fn delta_of_coupling(c: &Coupling) -> f64 {
    let mut pairs: Vec<(f64, f64)> = c
        .mass
        .iter()
        .zip(&c.ground)
        .flat_map(|(m, g)| m.iter().zip(g).filter(|(m, _)| **m > 0.0).map(|(m, g)| (*g, *m)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best = 1.0f64;
    let mut cumulative = 0.0;
    let mut k = 0;
    while k < pairs.len() {
        let d = pairs[k].0;
        if d >= best {
            break;
        }
        while k < pairs.len() && pairs[k].0 == d {
            cumulative += pairs[k].1;
            k += 1;
        }
        best = best.min(d.max(snap_deficit(1.0 - cumulative)));
    }
    best
}

#[derive(Clone, Debug, Serialize)]
pub struct ProkhorovResult {
    pub value: f64,
    pub coupling: Coupling,
}

/// Exact-arithmetic result: value and coupling mass over rationals.
#[derive(Clone, Debug)]
pub struct ExactProkhorov {
    pub value: BigRational,
    pub mass: Vec<Vec<BigRational>>,
}

fn check_inputs(p: &[f64], q: &[f64], d: &[Vec<f64>]) -> Result<()> {
    for (name, m) in [("p", p), ("q", q)] {
        if let Some(x) = m.iter().find(|x| !(**x >= 0.0)) {
            return Err(Error::InvalidMeasure(format!("{name} has negative mass {x}")));
        }
        let s: f64 = m.iter().sum();
        if (s - 1.0).abs() > TAU {
            return Err(Error::InvalidMeasure(format!("{name} sums to {s}")));
        }
    }
    check_grid(d, p.len(), q.len())?;
    for (i, row) in d.iter().enumerate() {
        if let Some((j, &v)) = row.iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
            return Err(Error::NegativeDistance { row: i, col: j, value: v });
        }
    }
    Ok(())
}

struct Optimum<T> {
    value: T,
    /// Flow per pair at the optimal breakpoint, or `None` if the trivial
    /// value 1 was best.
    flow: Option<Vec<Vec<T>>>,
}

/// Maximum mass a coupling can place on pairs with `D <= v`.
fn flow_within<T: Capacity>(p: &[T], q: &[T], d: &[Vec<f64>], v: f64) -> (T, Vec<Vec<T>>) {
    let (rows, cols) = (p.len(), q.len());
    let (source, sink) = (rows + cols, rows + cols + 1);
    let mut net = FlowNetwork::new(rows + cols + 2);
    for (i, pi) in p.iter().enumerate() {
        if pi.positive() {
            net.add_edge(source, i, pi.clone());
        }
    }
    for (j, qj) in q.iter().enumerate() {
        if qj.positive() {
            net.add_edge(rows + j, sink, qj.clone());
        }
    }
    let mut ids = Vec::new();
    for i in 0..rows {
        for j in 0..cols {
            if d[i][j] <= v && p[i].positive() && q[j].positive() {
                let cap = T::min_of(&p[i], &q[j]);
                ids.push((i, j, net.add_edge(i, rows + j, cap)));
            }
        }
    }
    let total = net.max_flow(source, sink);
    let mut flow = vec![vec![T::zero(); cols]; rows];
    for (i, j, id) in ids {
        flow[i][j] = net.flow(id);
    }
    (total, flow)
}

fn optimum<T: Capacity>(p: &[T], q: &[T], d: &[Vec<f64>], snap: impl Fn(T) -> T) -> Optimum<T> {
    let mut levels: Vec<f64> = Vec::new();
    for (i, row) in d.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if p[i].positive() && q[j].positive() {
                levels.push(v);
            }
        }
    }
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let mut best = Optimum { value: T::one(), flow: None };
    for v in levels {
        let level = T::from_f64(v);
        if level >= best.value {
            break;
        }
        let (f, flow) = flow_within(p, q, d, v);
        let deficit = snap(T::one() - f);
        let cand = if level >= deficit { level } else { deficit };
        if cand < best.value {
            best = Optimum { value: cand, flow: Some(flow) };
        }
    }
    best
}

/// Northwest-corner completion of a partial coupling to the marginals.
fn complete<T: Capacity>(p: &[T], q: &[T], flow: Option<Vec<Vec<T>>>) -> Vec<Vec<T>> {
    let (rows, cols) = (p.len(), q.len());
    let mut mass = flow.unwrap_or_else(|| vec![vec![T::zero(); cols]; rows]);
    let clamp = |x: T| if x.positive() { x } else { T::zero() };
    let mut r: Vec<T> = (0..rows)
        .map(|i| clamp(mass[i].iter().fold(p[i].clone(), |acc, x| acc - x.clone())))
        .collect();
    let mut c: Vec<T> = (0..cols)
        .map(|j| clamp(mass.iter().fold(q[j].clone(), |acc, row| acc - row[j].clone())))
        .collect();
    let (mut i, mut j) = (0, 0);
    while i < rows && j < cols {
        if !r[i].positive() {
            i += 1;
            continue;
        }
        if !c[j].positive() {
            j += 1;
            continue;
        }
        let m = T::min_of(&r[i], &c[j]);
        mass[i][j] = mass[i][j].clone() + m.clone();
        r[i] = r[i].clone() - m.clone();
        c[j] = c[j].clone() - m;
    }
    mass
}

/// Exact Lévy-Prokhorov distance between `p` and `q` over the cross
/// distances `d` (`d[i][j]` between row point `i` and column point `j`),
/// with a coupling attaining it.
pub fn prokhorov_distance(p: &[f64], q: &[f64], d: &[Vec<f64>]) -> Result<ProkhorovResult> {
    check_inputs(p, q, d)?;
    let best = optimum(p, q, d, snap_deficit);
    let mass = complete(p, q, best.flow);
    let coupling = Coupling { mass, ground: d.to_vec() };
    Ok(ProkhorovResult { value: best.value, coupling })
}

/// Same computation in exact rational arithmetic. Distances are taken at
/// their exact binary values; `p` and `q` must each sum to exactly one.
pub fn prokhorov_distance_exact(p: &[BigRational], q: &[BigRational], d: &[Vec<f64>]) -> Result<ExactProkhorov> {
    check_grid(d, p.len(), q.len())?;
    for m in [p, q] {
        let s = m.iter().fold(BigRational::from_integer(0.into()), |a, x| a + x);
        if s != BigRational::from_integer(1.into()) || m.iter().any(|x| *x < BigRational::from_integer(0.into())) {
            return Err(Error::InvalidMeasure(format!("rational marginal sums to {s}")));
        }
    }
    if let Some((i, j)) = d.iter().enumerate().find_map(|(i, r)| r.iter().position(|v| !(*v >= 0.0)).map(|j| (i, j))) {
        return Err(Error::NegativeDistance { row: i, col: j, value: d[i][j] });
    }
    let best = optimum(p, q, d, |x| x);
    let mass = complete(p, q, best.flow);
    Ok(ExactProkhorov { value: best.value, mass })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpsMatching {
    /// `(x, y)` pairs, sorted by `x`.
    pub pairs: Vec<(usize, usize)>,
    pub epsilon: f64,
    /// Augmenting paths that re-routed an existing pair.
    pub augmentations: usize,
}

/// Maximum-cardinality matching in the graph of pairs with `d[i][j] < epsilon`.
pub fn epsilon_matching(d: &[Vec<f64>], epsilon: f64) -> EpsMatching {
    let rows = d.len();
    let cols = d.first().map_or(0, Vec::len);
    let m = matching::max_matching(rows, cols, |i, j| d[i][j] < epsilon);
    EpsMatching { pairs: m.pairs(), epsilon, augmentations: m.augmentations }
}

/// `1 - sum_i min(p_i, q_i)`: the cost of the diagonal-heavy coupling of two
/// measures on one finite space.
pub fn overlap_coupling_bound(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch { expected: p.len(), actual: q.len() });
    }
    let shared: f64 = p.iter().zip(q).map(|(a, b)| a.min(*b)).sum();
    Ok((1.0 - shared).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coupling(mass: &[&[f64]], ground: &[&[f64]]) -> Coupling {
        Coupling::new(
            mass.iter().map(|r| r.to_vec()).collect(),
            ground.iter().map(|r| r.to_vec()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta_of_coupling(&coupling(&[&[0.5, 0.0], &[0.0, 0.5]], &[&[0.0, 1.0], &[1.0, 0.0]])), 0.0);
        assert_eq!(delta_of_coupling(&coupling(&[&[1.0]], &[&[0.4]])), 0.4);
        let c = coupling(&[&[0.9, 0.1]], &[&[0.0, 1.0]]);
        assert!((delta_of_coupling(&c) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn delta_is_capped_by_one() {
        assert_eq!(delta_of_coupling(&coupling(&[&[1.0]], &[&[7.0]])), 1.0);
    }

    #[test]
    fn prokhorov_identical() {
        let d = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        let r = prokhorov_distance(&[0.3, 0.7], &[0.3, 0.7], &d).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.coupling.mass()[0][1], 0.0);
        assert_eq!(r.coupling.mass()[1][0], 0.0);
    }

    #[test]
    fn prokhorov_point_mass_vs_split() {
        let d = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        let r = prokhorov_distance(&[1.0, 0.0], &[0.7, 0.3], &d).unwrap();
        assert!((r.value - 0.3).abs() < 1e-15);
        assert!((delta_of_coupling(&r.coupling) - r.value).abs() <= TAU);
    }

    #[test]
    fn prokhorov_path_space() {
        let d = vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.0], vec![2.0, 1.0, 0.0]];
        let r = prokhorov_distance(&[0.5, 0.5, 0.0], &[0.0, 0.5, 0.5], &d).unwrap();
        assert_eq!(r.value, 0.5);
        assert_eq!(r.coupling.mass()[1][1], 0.5);
        assert_eq!(r.coupling.mass()[0][2], 0.5);
        assert!(r.coupling.check_marginals(&[0.5, 0.5, 0.0], &[0.0, 0.5, 0.5]).is_ok());
    }

    #[test]
    fn prokhorov_rejects_bad_marginals() {
        let d = vec![vec![0.0]];
        assert!(prokhorov_distance(&[0.9], &[1.0], &d).is_err());
        assert!(matches!(
            prokhorov_distance(&[1.0], &[1.0], &[vec![-1.0]]),
            Err(Error::NegativeDistance { .. })
        ));
    }

    #[test]
    fn rational_matches_float() {
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        let d = vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.0], vec![2.0, 1.0, 0.0]];
        let e = prokhorov_distance_exact(&[r(1, 2), r(1, 2), r(0, 1)], &[r(0, 1), r(1, 2), r(1, 2)], &d).unwrap();
        assert_eq!(e.value, r(1, 2));
        assert!(prokhorov_distance_exact(&[r(1, 3)], &[r(1, 1)], &[vec![0.0]]).is_err());
    }

    #[test]
    fn epsilon_matching_examples() {
        let cross = |x: &[f64], y: &[f64]| -> Vec<Vec<f64>> {
            x.iter().map(|a| y.iter().map(|b| (a - b).abs()).collect()).collect()
        };
        let m = epsilon_matching(&cross(&[0.0, 10.0], &[0.05, 20.0]), 0.1);
        assert_eq!(m.pairs, vec![(0, 0)]);

        let m = epsilon_matching(&cross(&[0.0, 1.0, 2.5], &[0.0, 1.0, 2.5]), 1e-3);
        assert_eq!(m.pairs, vec![(0, 0), (1, 1), (2, 2)]);

        let m = epsilon_matching(&cross(&[0.0, 1.0], &[0.5, 0.05]), 0.6);
        assert_eq!(m.pairs, vec![(0, 1), (1, 0)]);
        assert_eq!(m.augmentations, 1);
    }

    #[test]
    fn overlap_examples() {
        assert_eq!(overlap_coupling_bound(&[0.2, 0.8], &[0.2, 0.8]).unwrap(), 0.0);
        let p = [0.7, 0.3];
        let q = [0.4, 0.6];
        let b = overlap_coupling_bound(&p, &q).unwrap();
        assert!((b - 0.3).abs() < 1e-15);
        let l1: f64 = p.iter().zip(&q).map(|(a, b)| (a - b).abs()).sum();
        assert!(b <= l1 && (l1 - 0.6).abs() < 1e-15);
        assert!(overlap_coupling_bound(&p, &[1.0]).is_err());
    }
}
