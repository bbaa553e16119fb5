//! Model spaces, i.i.d. samples, exact matrix ensembles, epsilon-nets and
//! hat spaces.
//!
//! Randomness comes from ChaCha8 keyed by a master seed; trial `i` uses
//! stream `i` of that key (see [`trial_rng`]), so trials can run in any
//! order or in parallel and still reproduce bit for bit.

use std::collections::HashMap;

use num_traits::Num;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coupling::Coupling;
use crate::error::{Error, Result};
use crate::io::SpaceSpec;
use crate::space::{euclidean, validate_mass, DistanceMatrix, FiniteMMS, MatrixEnsemble, SquareMatrix};

/// Default cap on `k^N` for ensemble enumeration.
pub const ENSEMBLE_BUDGET: u128 = 1_000_000;

/// RNG for trial `stream` under `seed`.
pub fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A space with a probability measure that can be sampled.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSpace {
    Finite(FiniteMMS),
    /// Circle of the given circumference, arc-length metric, uniform measure.
    Circle { circumference: f64 },
    /// `[0, 1]` with the uniform measure.
    Interval,
    /// Weighted point cloud with Euclidean distances.
    EuclideanPoints { coords: Vec<Vec<f64>>, mass: Vec<f64> },
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawModel {
    Finite {
        #[serde(default)]
        labels: Option<Vec<String>>,
        #[serde(default)]
        dist: Option<Vec<Vec<f64>>>,
        #[serde(default)]
        coords: Option<Vec<Vec<f64>>>,
        #[serde(default)]
        mass: Option<Vec<f64>>,
    },
    Circle { circumference: f64 },
    Interval,
    EuclideanPoints { coords: Vec<Vec<f64>>, mass: Vec<f64> },
}

impl ModelSpace {
    /// Parses a tagged model (`"kind": "finite" | "circle" | "interval" |
    /// "euclidean_points"`); an object without `kind` is read as a finite
    /// space file.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        if value.get("kind").is_none() {
            let spec: SpaceSpec = serde_json::from_value(value)?;
            return Ok(ModelSpace::Finite(spec.build()?));
        }
        let model = match serde_json::from_value::<RawModel>(value)? {
            RawModel::Finite { labels, dist, coords, mass } => {
                ModelSpace::Finite(SpaceSpec { labels, dist, coords, mass }.build()?)
            }
            RawModel::Circle { circumference } => ModelSpace::Circle { circumference },
            RawModel::Interval => ModelSpace::Interval,
            RawModel::EuclideanPoints { coords, mass } => ModelSpace::EuclideanPoints { coords, mass },
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ModelSpace::Circle { circumference } if !(*circumference > 0.0) => {
                Err(Error::InvalidArgument(format!("circumference {circumference} must be positive")))
            }
            ModelSpace::EuclideanPoints { coords, mass } => {
                if coords.is_empty() {
                    return Err(Error::InvalidArgument("no points".into()));
                }
                if let Some(p) = coords.iter().find(|p| p.len() != coords[0].len()) {
                    return Err(Error::DimensionMismatch { expected: coords[0].len(), actual: p.len() });
                }
                validate_mass(mass, coords.len())
            }
            _ => Ok(()),
        }
    }

    pub fn as_finite(&self) -> Option<&FiniteMMS> {
        match self {
            ModelSpace::Finite(s) => Some(s),
            _ => None,
        }
    }
}

/// `n` atom indices drawn i.i.d. from the measure of `space`.
pub fn sample_indices(space: &FiniteMMS, n: usize, rng: &mut impl Rng) -> Result<Vec<usize>> {
    let w = WeightedIndex::new(space.mass()).map_err(|e| Error::InvalidMeasure(e.to_string()))?;
    Ok((0..n).map(|_| w.sample(rng)).collect())
}

/// Empirical space of `n` i.i.d. draws using `rng`.
pub fn empirical_space_with(space: &ModelSpace, n: usize, rng: &mut impl Rng) -> Result<FiniteMMS> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample size must be at least 1".into()));
    }
    let (labels, dist): (Vec<String>, SquareMatrix) = match space {
        ModelSpace::Finite(s) => {
            let idx = sample_indices(s, n, rng)?;
            let labels = idx.iter().enumerate().map(|(k, &i)| format!("s{}:{}", k + 1, s.labels()[i])).collect();
            (labels, s.dist().matrix().submatrix(&idx))
        }
        ModelSpace::Circle { circumference } => {
            let c = *circumference;
            let pts: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * c).collect();
            let labels = pts.iter().enumerate().map(|(k, t)| format!("s{}@{t:.6}", k + 1)).collect();
            let arc = |a: f64, b: f64| {
                let d = (a - b).abs();
                d.min(c - d)
            };
            (labels, SquareMatrix::from_fn(n, |i, j| arc(pts[i], pts[j])))
        }
        ModelSpace::Interval => {
            let pts: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            let labels = pts.iter().enumerate().map(|(k, t)| format!("s{}@{t:.6}", k + 1)).collect();
            (labels, SquareMatrix::from_line(&pts))
        }
        ModelSpace::EuclideanPoints { coords, mass } => {
            let w = WeightedIndex::new(mass).map_err(|e| Error::InvalidMeasure(e.to_string()))?;
            let idx: Vec<usize> = (0..n).map(|_| w.sample(rng)).collect();
            let labels = idx.iter().enumerate().map(|(k, i)| format!("s{}:p{}", k + 1, i + 1)).collect();
            (labels, SquareMatrix::from_fn(n, |i, j| euclidean(&coords[idx[i]], &coords[idx[j]])))
        }
    };
    let dist = DistanceMatrix::new_unchecked(dist);
    FiniteMMS::uniform(labels, dist)
}

/// Empirical space of `n` i.i.d. draws; deterministic in `(space, n, seed)`.
pub fn empirical_space(space: &ModelSpace, n: usize, seed: u64) -> Result<FiniteMMS> {
    empirical_space_with(space, n, &mut trial_rng(seed, 0))
}

/// Exact law of the labelled distance matrix of `n` i.i.d. draws, with
/// probabilities in any exact or floating type. Zero-mass atoms are skipped;
/// atoms appear in first-seen order of the tuple enumeration.
pub fn enumerate_atoms<P>(space: &FiniteMMS, mass: &[P], n: usize, budget: u128) -> Result<Vec<(DistanceMatrix, P)>>
where
    P: Num + Clone,
{
    if mass.len() != space.len() {
        return Err(Error::DimensionMismatch { expected: space.len(), actual: mass.len() });
    }
    if n == 0 {
        return Err(Error::InvalidArgument("sample size must be at least 1".into()));
    }
    let support: Vec<usize> = (0..space.len()).filter(|&i| !mass[i].is_zero()).collect();
    let k = support.len() as u128;
    let required = (0..n).try_fold(1u128, |acc, _| acc.checked_mul(k)).unwrap_or(u128::MAX);
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut atoms: Vec<(DistanceMatrix, P)> = Vec::new();
    let mut tuple = vec![0usize; n];
    loop {
        let pts: Vec<usize> = tuple.iter().map(|&t| support[t]).collect();
        let prob = pts.iter().fold(P::one(), |acc, &i| acc * mass[i].clone());
        let m = space.dist().matrix().submatrix(&pts);
        let key = m.bit_key();
        match index.get(&key) {
            Some(&slot) => atoms[slot].1 = atoms[slot].1.clone() + prob,
            None => {
                index.insert(key, atoms.len());
                atoms.push((DistanceMatrix::new_unchecked(m), prob));
            }
        }
        // odometer, last coordinate fastest
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(atoms);
            }
            pos -= 1;
            tuple[pos] += 1;
            if tuple[pos] < support.len() {
                break;
            }
            tuple[pos] = 0;
        }
    }
}

/// Exact `theta_N` for a finite space.
pub fn enumerate_matrix_ensemble(space: &FiniteMMS, n: usize, budget: u128) -> Result<MatrixEnsemble> {
    MatrixEnsemble::new(enumerate_atoms(space, space.mass(), n, budget)?)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NetPartition {
    /// Indices of the center points.
    pub centers: Vec<usize>,
    /// `assignment[x]` is the position in `centers` of the cell holding `x`.
    pub assignment: Vec<usize>,
    pub epsilon: f64,
}

impl NetPartition {
    pub fn cells(&self) -> Vec<Vec<usize>> {
        let mut cells = vec![Vec::new(); self.centers.len()];
        for (x, &c) in self.assignment.iter().enumerate() {
            cells[c].push(x);
        }
        cells
    }
}

/// Greedy net: scanning points in index order, a point becomes a center when
/// it is farther than `epsilon` from every chosen center. Points go to their
/// nearest center, ties to the lowest center.
pub fn epsilon_net_partition(space: &FiniteMMS, epsilon: f64) -> Result<NetPartition> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon {epsilon} must be positive")));
    }
    let mut centers: Vec<usize> = Vec::new();
    for x in 0..space.len() {
        if centers.iter().all(|&c| space.d(x, c) > epsilon) {
            centers.push(x);
        }
    }
    let assignment = (0..space.len())
        .map(|x| {
            let mut best = 0;
            for (k, &c) in centers.iter().enumerate() {
                if space.d(x, c) < space.d(x, centers[best]) {
                    best = k;
                }
            }
            best
        })
        .collect();
    Ok(NetPartition { centers, assignment, epsilon })
}

#[derive(Clone, Debug, Serialize)]
pub struct HatSpace {
    pub space: FiniteMMS,
    /// Coupling of the hat measure (rows) with the original (columns),
    /// supported on `{center} x cell`.
    pub witness: Coupling,
}

/// Centers of `net` with induced distances and the pushed-forward measure.
pub fn hat_space(space: &FiniteMMS, net: &NetPartition) -> Result<HatSpace> {
    if net.assignment.len() != space.len()
        || net.centers.iter().any(|&c| c >= space.len())
        || net.assignment.iter().any(|&k| k >= net.centers.len())
    {
        return Err(Error::InvalidArgument("net was not built from this space".into()));
    }
    let k = net.centers.len();
    let mut mass = vec![0.0; k];
    let mut joint = vec![vec![0.0; space.len()]; k];
    for (x, &c) in net.assignment.iter().enumerate() {
        mass[c] += space.mass()[x];
        joint[c][x] = space.mass()[x];
    }
    let ground = net.centers.iter().map(|&c| (0..space.len()).map(|x| space.d(c, x)).collect()).collect();
    let labels = net.centers.iter().map(|&c| space.labels()[c].clone()).collect();
    let hat = FiniteMMS::new(labels, space.dist().submatrix(&net.centers), mass)?;
    Ok(HatSpace { space: hat, witness: Coupling::new(joint, ground)? })
}
