//! Certified upper bounds on the Gromov-Hausdorff-Prokhorov distance of
//! finite metric measure spaces.
//!
//! Every bound comes with an explicit witness: a pseudo-metric on the
//! disjoint union extending both spaces (a [`GluedSpace`]) and a coupling
//! of the two measures in it. The bound is `Delta` of that coupling.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::coupling::{epsilon_matching, prokhorov_distance, Coupling};
use crate::error::{Error, Result};
use crate::matmetric::{dpi_distance, DpiMode, EXACT_LIMIT};
use crate::space::{theta_map, DistanceMatrix, FiniteMMS, SquareMatrix, TAU};

/// Upper bound on the number of epsilon values the net strategy tries.
const NET_CANDIDATES: usize = 64;

/// Two spaces glued along bridge edges, with the induced cross distances.
#[derive(Clone, Debug, Serialize)]
pub struct GluedSpace {
    pub left: FiniteMMS,
    pub right: FiniteMMS,
    /// `cross[i][j]` = distance between `left` point `i` and `right` point `j`.
    pub cross: Vec<Vec<f64>>,
    /// Seed edges `(i, j, length)`.
    pub bridges: Vec<(usize, usize, f64)>,
}

impl GluedSpace {
    /// Distance matrix on `left ⊔ right`, left points first.
    pub fn full_matrix(&self) -> SquareMatrix {
        let nl = self.left.len();
        SquareMatrix::from_fn(nl + self.right.len(), |a, b| match (a < nl, b < nl) {
            (true, true) => self.left.d(a, b),
            (false, false) => self.right.d(a - nl, b - nl),
            (true, false) => self.cross[a][b - nl],
            (false, true) => self.cross[b][a - nl],
        })
    }

    pub fn mirrored(&self) -> Self {
        Self {
            left: self.right.clone(),
            right: self.left.clone(),
            cross: transpose(&self.cross),
            bridges: self.bridges.iter().map(|&(i, j, l)| (j, i, l)).collect(),
        }
    }
}

fn transpose(g: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let cols = g.first().map_or(0, Vec::len);
    (0..cols).map(|j| g.iter().map(|r| r[j]).collect()).collect()
}

/// Glues `x` and `y` by bridges of length `t` between the related pairs,
/// taking the largest metric compatible with the bridges:
/// `cross(a, b) = min over (i, j) in R of d_X(a, i) + t + d_Y(j, b)`.
///
/// Fails with [`Error::NotIsometric`] when the bridges would shorten an
/// intra-space distance by more than [`TAU`].
pub fn glue_by_relation(x: &FiniteMMS, y: &FiniteMMS, relation: &[(usize, usize)], t: f64) -> Result<GluedSpace> {
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!("bridge length {t} must be >= 0")));
    }
    if relation.is_empty() {
        return Err(Error::InvalidArgument("relation must be nonempty".into()));
    }
    if let Some(&(i, j)) = relation.iter().find(|&&(i, j)| i >= x.len() || j >= y.len()) {
        return Err(Error::InvalidArgument(format!("relation pair ({i}, {j}) out of range")));
    }
    let (nl, nr) = (x.len(), y.len());
    let cross: Vec<Vec<f64>> = (0..nl)
        .map(|a| {
            (0..nr)
                .map(|b| {
                    relation
                        .iter()
                        .map(|&(i, j)| x.d(a, i) + t + y.d(j, b))
                        .fold(f64::INFINITY, f64::min)
                })
                .collect()
        })
        .collect();
    let glued = GluedSpace {
        left: x.clone(),
        right: y.clone(),
        cross,
        bridges: relation.iter().map(|&(i, j)| (i, j, t)).collect(),
    };
    let mut w = glued.full_matrix();
    let n = nl + nr;
    for k in 0..n {
        for a in 0..n {
            let dak = w.get(a, k);
            for b in 0..n {
                let via = dak + w.get(k, b);
                if via < w.get(a, b) {
                    w.set(a, b, via);
                }
            }
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            let same_side = (a < nl) == (b < nl);
            if !same_side {
                continue;
            }
            let (orig, label) = if a < nl {
                (x.d(a, b), (x.labels()[a].clone(), x.labels()[b].clone()))
            } else {
                (y.d(a - nl, b - nl), (y.labels()[a - nl].clone(), y.labels()[b - nl].clone()))
            };
            if w.get(a, b) < orig - TAU {
                return Err(Error::NotIsometric(label.0, label.1, orig, w.get(a, b)));
            }
        }
    }
    let cross = (0..nl).map(|a| (0..nr).map(|b| w.get(a, nl + b)).collect()).collect();
    Ok(GluedSpace { cross, ..glued })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Match rows by the best `d_pi` permutation (equal sizes, uniform masses).
    Permutation,
    /// Identify points with equal labels at distance zero.
    Identify,
    /// Bridge an epsilon-matching of distance profiles, scanning epsilon.
    Net,
    /// Every applicable strategy; the smallest bound wins.
    Auto,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Permutation => "permutation",
            Strategy::Identify => "identify",
            Strategy::Net => "net",
            Strategy::Auto => "auto",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "permutation" => Ok(Strategy::Permutation),
            "identify" => Ok(Strategy::Identify),
            "net" => Ok(Strategy::Net),
            "auto" => Ok(Strategy::Auto),
            other => Err(Error::InvalidArgument(format!("unknown strategy `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GhpBound {
    pub upper: f64,
    pub lower: f64,
    pub gluing: GluedSpace,
    pub coupling: Coupling,
    pub method: Strategy,
    /// `d_pi` of the two distance matrices when both spaces are uniform of
    /// equal size within the exact limit.
    pub dpi: Option<f64>,
}

impl GhpBound {
    fn mirrored(&self) -> Self {
        Self {
            gluing: self.gluing.mirrored(),
            coupling: self.coupling.transposed(),
            ..self.clone()
        }
    }
}

fn couple(gluing: GluedSpace, method: Strategy) -> Result<GhpBound> {
    let r = prokhorov_distance(gluing.left.mass(), gluing.right.mass(), &gluing.cross)?;
    Ok(GhpBound { upper: r.value, lower: 0.0, gluing, coupling: r.coupling, method, dpi: None })
}

/// Largest `|d_X(i, i') - d_Y(j, j')|` over pairs of related points.
fn distortion(x: &FiniteMMS, y: &FiniteMMS, relation: &[(usize, usize)]) -> f64 {
    let mut dis = 0.0f64;
    for &(i, j) in relation {
        for &(a, b) in relation {
            dis = dis.max((x.d(i, a) - y.d(j, b)).abs());
        }
    }
    dis
}

/// Bridges of length `dis(R) / 2` always glue isometrically.
fn glue_min(x: &FiniteMMS, y: &FiniteMMS, relation: &[(usize, usize)]) -> Result<GluedSpace> {
    glue_by_relation(x, y, relation, (distortion(x, y, relation) / 2.0).max(TAU))
}

fn by_permutation(x: &FiniteMMS, y: &FiniteMMS) -> Result<GhpBound> {
    if x.len() != y.len() || !x.is_uniform() || !y.is_uniform() {
        return Err(Error::InapplicableStrategy(
            "permutation",
            "requires equal sizes and uniform masses".into(),
        ));
    }
    let (a, b) = (x.dist().matrix(), y.dist().matrix());
    let mode = if x.len() <= EXACT_LIMIT { DpiMode::exact() } else { DpiMode::heuristic(0) };
    let w = dpi_distance(a, b, mode)?;
    let excluded: Vec<bool> = (0..x.len()).map(|i| w.inner.excluded.contains(&i)).collect();
    let relation: Vec<(usize, usize)> =
        (0..x.len()).filter(|&i| !excluded[i]).map(|i| (i, w.permutation[i])).collect();
    let gluing = if relation.is_empty() {
        let far = x.dist().diameter().max(y.dist().diameter()).max(TAU);
        glue_by_relation(x, y, &[(0, w.permutation[0])], far)?
    } else {
        glue_by_relation(x, y, &relation, (w.inner.max_residual / 2.0).max(TAU))?
    };
    couple(gluing, Strategy::Permutation)
}

fn by_identification(x: &FiniteMMS, y: &FiniteMMS) -> Result<GhpBound> {
    let relation: Vec<(usize, usize)> = (0..x.len())
        .flat_map(|i| (0..y.len()).filter(move |&j| x.labels()[i] == y.labels()[j]).map(move |j| (i, j)))
        .collect();
    if relation.is_empty() {
        return Err(Error::InapplicableStrategy("identify", "no shared labels".into()));
    }
    let gluing = glue_by_relation(x, y, &relation, 0.0)
        .map_err(|e| Error::InapplicableStrategy("identify", e.to_string()))?;
    couple(gluing, Strategy::Identify)
}

/// Hausdorff distance between the sets of distances seen from `i` in `x`
/// and from `j` in `y`; a lower bound on the distortion of any relation
/// containing `(i, j)` and covering both spaces.
fn profile_gap(x: &FiniteMMS, i: usize, y: &FiniteMMS, j: usize) -> f64 {
    let (dx, dy) = (x.dist().matrix().row(i), y.dist().matrix().row(j));
    let one_way = |from: &[f64], to: &[f64]| {
        from.iter()
            .map(|a| to.iter().map(|b| (a - b).abs()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    one_way(dx, dy).max(one_way(dy, dx))
}

fn by_net(x: &FiniteMMS, y: &FiniteMMS) -> Result<GhpBound> {
    let cost: Vec<Vec<f64>> =
        (0..x.len()).map(|i| (0..y.len()).map(|j| profile_gap(x, i, y, j)).collect()).collect();
    let mut levels: Vec<f64> = cost.iter().flatten().copied().collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    if levels.len() > NET_CANDIDATES {
        let last = levels.len() - 1;
        levels = (0..NET_CANDIDATES).map(|k| levels[k * last / (NET_CANDIDATES - 1)]).collect();
    }
    let mut best: Option<GhpBound> = None;
    for eps in levels {
        let m = epsilon_matching(&cost, eps.next_up());
        if m.pairs.is_empty() {
            continue;
        }
        let bound = couple(glue_min(x, y, &m.pairs)?, Strategy::Net)?;
        if best.as_ref().is_none_or(|b| bound.upper < b.upper) {
            best = Some(bound);
        }
    }
    best.ok_or_else(|| Error::InapplicableStrategy("net", "empty space".into()))
}

fn directional(x: &FiniteMMS, y: &FiniteMMS, strategy: Strategy) -> Result<GhpBound> {
    match strategy {
        Strategy::Permutation => by_permutation(x, y),
        Strategy::Identify => by_identification(x, y),
        Strategy::Net => by_net(x, y),
        Strategy::Auto => {
            let mut best: Option<GhpBound> = None;
            for s in [Strategy::Permutation, Strategy::Identify, Strategy::Net] {
                match directional(x, y, s) {
                    Ok(b) => {
                        if best.as_ref().is_none_or(|cur| b.upper < cur.upper) {
                            best = Some(b);
                        }
                    }
                    Err(Error::InapplicableStrategy(..)) => {}
                    Err(e) => return Err(e),
                }
            }
            best.ok_or_else(|| Error::InapplicableStrategy("auto", "no strategy applies".into()))
        }
    }
}

/// Smallest certified upper bound from `strategy`, evaluated in both
/// directions so that swapping the arguments mirrors the result.
///
/// `lower` is `d_pi / 2` when both spaces are uniform of equal size
/// `n <= EXACT_LIMIT`, and 0 otherwise.
pub fn ghp_upper_bound(x: &FiniteMMS, y: &FiniteMMS, strategy: Strategy) -> Result<GhpBound> {
    let forward = directional(x, y, strategy)?;
    let backward = directional(y, x, strategy)?.mirrored();
    let mut bound = if backward.upper < forward.upper { backward } else { forward };
    if x.len() == y.len() && x.len() <= EXACT_LIMIT && x.is_uniform() && y.is_uniform() {
        let dpi = dpi_distance(x.dist().matrix(), y.dist().matrix(), DpiMode::exact())?.value;
        bound.dpi = Some(dpi);
        bound.lower = dpi / 2.0;
    }
    Ok(bound)
}

/// Sandwich for uniform spaces: `d_pi / 2 <= d_GHP(Theta A, Theta B) <= upper <= d_pi`.
pub fn ghp_bounds_uniform(a: &DistanceMatrix, b: &DistanceMatrix) -> Result<GhpBound> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch { expected: a.n(), actual: b.n() });
    }
    if a.n() > EXACT_LIMIT {
        return Err(Error::SizeLimit { n: a.n(), limit: EXACT_LIMIT });
    }
    ghp_upper_bound(&theta_map(a), &theta_map(b), Strategy::Auto)
}
