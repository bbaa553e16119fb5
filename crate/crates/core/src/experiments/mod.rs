//! Reproducible checks of the inequalities linking `d_pi`, `d_GHP` and the
//! Lévy-Prokhorov distance between matrix ensembles.
//!
//! Exact checks enumerate ensembles and solve the Prokhorov problem in
//! rational arithmetic; Monte Carlo checks use one ChaCha8 stream per trial
//! and aggregate in trial order, so every report is a pure function of its
//! configuration.

mod report;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rayon::prelude::*;

use crate::coupling::{prokhorov_distance, prokhorov_distance_exact};
use crate::error::{Error, Result};
use crate::ghp::{ghp_bounds_uniform, ghp_upper_bound, Strategy};
use crate::matmetric::{dm_distance, dpi_distance, DpiMode, EXACT_LIMIT};
use crate::sampling::{enumerate_atoms, sample_indices, trial_rng, ModelSpace};
use crate::space::{DistanceMatrix, FiniteMMS, SquareMatrix, TAU};

pub use report::{Assertion, ExperimentReport, Relation, Status};

/// Tolerance for comparing two exact routes to the same quantity.
pub const EQUALITY_TOL: f64 = 1e-9;

/// Ensemble of a finite space with float and rational probabilities; both
/// lists come from the same enumeration and share atom order.
struct ExactEnsemble {
    atoms: Vec<DistanceMatrix>,
    p: Vec<f64>,
    exact: Vec<BigRational>,
}

fn rational_mass(mass: &[f64]) -> Vec<BigRational> {
    let mut r: Vec<BigRational> =
        mass.iter().map(|&m| BigRational::from_float(m).unwrap_or_else(BigRational::zero)).collect();
    let big = (0..mass.len()).max_by(|&a, &b| mass[a].total_cmp(&mass[b]).then(b.cmp(&a))).unwrap_or(0);
    let rest = r.iter().enumerate().filter(|&(i, _)| i != big).fold(BigRational::zero(), |acc, (_, x)| acc + x);
    r[big] = BigRational::from_integer(1.into()) - rest;
    r
}

fn exact_ensemble(space: &FiniteMMS, n: usize, budget: u128) -> Result<ExactEnsemble> {
    let float = enumerate_atoms(space, space.mass(), n, budget)?;
    let exact = enumerate_atoms(space, &rational_mass(space.mass()), n, budget)?;
    debug_assert_eq!(float.len(), exact.len());
    let p = float.iter().map(|(_, p)| *p).collect();
    let atoms = float.into_iter().map(|(m, _)| m).collect();
    Ok(ExactEnsemble { atoms, p, exact: exact.into_iter().map(|(_, p)| p).collect() })
}

fn ground_grid(
    a: &[DistanceMatrix],
    b: &[DistanceMatrix],
    f: impl Fn(&SquareMatrix, &SquareMatrix) -> Result<f64> + Sync,
) -> Result<Vec<Vec<f64>>> {
    a.par_iter().map(|x| b.iter().map(|y| f(x.matrix(), y.matrix())).collect()).collect()
}

fn dpi_value(a: &SquareMatrix, b: &SquareMatrix) -> Result<f64> {
    Ok(dpi_distance(a, b, DpiMode::exact())?.value)
}

fn dm_value(a: &SquareMatrix, b: &SquareMatrix) -> Result<f64> {
    Ok(dm_distance(a, b)?.value)
}

/// Exact `d_P` between two ensembles over `grid`, by both the float and
/// the rational route.
fn ensemble_prokhorov(x: &ExactEnsemble, y: &ExactEnsemble, grid: &[Vec<f64>]) -> Result<(f64, f64)> {
    let float = prokhorov_distance(&x.p, &y.p, grid)?.value;
    let exact = prokhorov_distance_exact(&x.exact, &y.exact, grid)?.value;
    Ok((float, exact.to_f64().unwrap_or(f64::NAN)))
}

fn check_exact_size(n: usize) -> Result<()> {
    if n > EXACT_LIMIT {
        return Err(Error::SizeLimit { n, limit: EXACT_LIMIT });
    }
    Ok(())
}

/// Two-point space `{labels[0], labels[1]}` at distance `d` with masses
/// `(1 - eps, eps)`.
pub fn two_point_space(labels: [&str; 2], d: f64, eps: f64) -> Result<FiniteMMS> {
    FiniteMMS::new(
        labels.iter().map(|s| s.to_string()).collect(),
        DistanceMatrix::new(SquareMatrix::from_line(&[0.0, d]))?,
        vec![1.0 - eps, eps],
    )
}

fn point_set_hausdorff(a: &[f64], b: &[f64]) -> f64 {
    let one_way = |from: &[f64], to: &[f64]| {
        from.iter().map(|x| to.iter().map(|y| (x - y).abs()).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

fn random_points(n: usize, rng: &mut impl Rng) -> Vec<Vec<f64>> {
    (0..n).map(|_| vec![rng.random::<f64>(), rng.random::<f64>()]).collect()
}

struct SandwichTrial {
    dpi: f64,
    upper: f64,
}

fn sandwich(a: &DistanceMatrix, b: &DistanceMatrix) -> Result<SandwichTrial> {
    let bound = ghp_bounds_uniform(a, b)?;
    let dpi = bound.dpi.ok_or_else(|| Error::InvalidArgument("d_pi unavailable".into()))?;
    Ok(SandwichTrial { dpi, upper: bound.upper })
}

/// `upper <= d_pi` and `d_pi <= 2 upper` on random uniform spaces of size
/// `n` (Euclidean point sets in the unit square), plus three fixed pairs.
pub fn check_finspc_sandwich(n: usize, trials: usize, seed: u64) -> Result<ExperimentReport> {
    check_exact_size(n)?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let mut r = ExperimentReport::new("finspc");
    r.config("n", n).config("trials", trials).config("seed", seed);

    let results: Vec<SandwichTrial> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            let a = DistanceMatrix::new(SquareMatrix::from_euclidean(&random_points(n, &mut rng)))?;
            let b = DistanceMatrix::new(SquareMatrix::from_euclidean(&random_points(n, &mut rng)))?;
            sandwich(&a, &b)
        })
        .collect::<Result<_>>()?;

    let upper_excess = results.iter().map(|t| t.upper - t.dpi).fold(f64::NEG_INFINITY, f64::max);
    let dpi_excess = results.iter().map(|t| t.dpi - 2.0 * t.upper).fold(f64::NEG_INFINITY, f64::max);
    let violations =
        results.iter().filter(|t| t.upper > t.dpi + TAU || t.dpi > 2.0 * t.upper + TAU).count();
    let mean = |f: fn(&SandwichTrial) -> f64| results.iter().map(f).sum::<f64>() / results.len().max(1) as f64;
    r.observe("mean_dpi", mean(|t| t.dpi))
        .observe("mean_upper", mean(|t| t.upper))
        .observe("violations", violations as f64);
    if trials > 0 {
        r.observe("max_upper_minus_dpi", upper_excess)
            .observe("max_dpi_minus_twice_upper", dpi_excess)
            .assert("upper_le_dpi", upper_excess, Relation::Le, 0.0, TAU)
            .assert("dpi_le_twice_upper", dpi_excess, Relation::Le, 0.0, TAU);
    }

    let same = DistanceMatrix::from_line(&[0.0, 1.0, 3.0]);
    let t = sandwich(&same, &same)?;
    r.observe("equal.dpi", t.dpi)
        .observe("equal.upper", t.upper)
        .assert("equal.dpi_zero", t.dpi, Relation::Eq, 0.0, TAU)
        .assert("equal.upper_zero", t.upper, Relation::Eq, 0.0, TAU);

    let t = sandwich(&DistanceMatrix::from_line(&[0.0, 1.0, 3.0]), &DistanceMatrix::from_line(&[0.0, 2.0, 3.0]))?;
    r.observe("mirror.dpi", t.dpi)
        .observe("mirror.upper", t.upper)
        .assert("mirror.dpi_zero", t.dpi, Relation::Eq, 0.0, TAU)
        .assert("mirror.upper_zero", t.upper, Relation::Eq, 0.0, TAU);

    let eps = 0.01;
    let (px, py) = ([-eps, 0.0, eps, 1.0], [0.0, eps, 1.0, 1.0 + eps]);
    let (a, b) = (DistanceMatrix::from_line(&px), DistanceMatrix::from_line(&py));
    let bound = ghp_bounds_uniform(&a, &b)?;
    let dpi = bound.dpi.unwrap_or(f64::NAN);
    r.observe("quarter.dpi", dpi)
        .observe("quarter.upper", bound.upper)
        .observe("quarter.lower", bound.lower)
        .observe("quarter.point_set_hausdorff", point_set_hausdorff(&px, &py))
        .bound("quarter.dpi", 0.25)
        .assert("quarter.dpi_quarter", dpi, Relation::Eq, 0.25, TAU)
        .assert("quarter.upper_at_least_eighth", 0.125, Relation::Le, bound.upper, TAU)
        .assert("quarter.upper_at_most_quarter", bound.upper, Relation::Le, 0.25, TAU)
        .note("quarter pair: point sets are eps-close in Hausdorff distance, yet d_pi = 1/4");
    Ok(r)
}

/// `P(B > threshold)` for `B ~ Binomial(n, p)`, by summing the mass function.
pub fn binomial_upper_tail(n: usize, p: f64, threshold: f64) -> f64 {
    if p <= 0.0 {
        return if threshold < 0.0 { 1.0 } else { 0.0 };
    }
    if p >= 1.0 {
        return if (n as f64) > threshold { 1.0 } else { 0.0 };
    }
    let mut pmf = (1.0 - p).powi(n as i32);
    let mut tail = 0.0;
    for k in 0..=n {
        if k as f64 > threshold {
            tail += pmf;
        }
        pmf *= (n - k) as f64 / (k + 1) as f64 * p / (1.0 - p);
    }
    tail.min(1.0)
}

#[derive(Clone, Copy, Debug)]
pub struct HoelderOptions {
    pub budget: u128,
    /// Coupled Monte Carlo samples; zero skips that part.
    pub trials: usize,
    pub seed: u64,
}

impl Default for HoelderOptions {
    fn default() -> Self {
        Self { budget: crate::sampling::ENSEMBLE_BUDGET, trials: 0, seed: 0 }
    }
}

/// Exact `d_P(theta_N^X, theta_N^Y; d_pi) <= sqrt(upper)` for any pair of
/// finite spaces, where `upper` is the certified GHP bound. With
/// `options.trials > 0`, also samples `N` pairs at a time from the bound's
/// coupling and checks `d_pi(M^X, M^Y) <= max(B / N, 2 upper)` per sample,
/// `B` counting pairs farther apart than `upper`.
pub fn check_hoelder_pair(x: &FiniteMMS, y: &FiniteMMS, n: usize, options: HoelderOptions) -> Result<ExperimentReport> {
    check_exact_size(n)?;
    let mut r = ExperimentReport::new("hoelder");
    r.config("n", n).config("budget", options.budget.to_string()).config("trials", options.trials);
    if options.trials > 0 {
        r.config("seed", options.seed);
    }
    let bound = ghp_upper_bound(x, y, Strategy::Auto)?;
    let upper = bound.upper;
    let ex = exact_ensemble(x, n, options.budget)?;
    let ey = exact_ensemble(y, n, options.budget)?;
    let grid = ground_grid(&ex.atoms, &ey.atoms, dpi_value)?;
    let (dp, dp_exact) = ensemble_prokhorov(&ex, &ey, &grid)?;
    r.config("strategy", bound.method.name())
        .observe("ghp_upper", upper)
        .observe("atoms_x", ex.atoms.len() as f64)
        .observe("atoms_y", ey.atoms.len() as f64)
        .observe("dp", dp)
        .observe("dp_exact", dp_exact)
        .bound("sqrt_upper", upper.sqrt())
        .bound("twice_upper", 2.0 * upper)
        .assert("dp_le_sqrt_upper", dp_exact, Relation::Le, upper.sqrt(), TAU)
        .assert("float_matches_exact", dp, Relation::Eq, dp_exact, EQUALITY_TOL)
        .observe("dp_minus_twice_upper", dp_exact - 2.0 * upper);

    if options.trials > 0 {
        coupled_samples(&mut r, &bound.gluing.left, &bound.gluing.right, bound.coupling.mass(), &bound.gluing.cross, upper, n, options)?;
    }
    Ok(r)
}

#[allow(clippy::too_many_arguments)]
fn coupled_samples(
    r: &mut ExperimentReport,
    x: &FiniteMMS,
    y: &FiniteMMS,
    mass: &[Vec<f64>],
    cross: &[Vec<f64>],
    upper: f64,
    n: usize,
    options: HoelderOptions,
) -> Result<()> {
    let cols = y.len();
    let weights: Vec<f64> = mass.iter().flatten().copied().collect();
    let w = WeightedIndex::new(&weights).map_err(|e| Error::InvalidCoupling(e.to_string()))?;
    let samples: Vec<(usize, f64)> = (0..options.trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(options.seed, t);
            let pairs: Vec<(usize, usize)> = (0..n)
                .map(|_| {
                    let k = w.sample(&mut rng);
                    (k / cols, k % cols)
                })
                .collect();
            let far = pairs.iter().filter(|&&(i, j)| cross[i][j] > upper).count();
            let ix: Vec<usize> = pairs.iter().map(|p| p.0).collect();
            let iy: Vec<usize> = pairs.iter().map(|p| p.1).collect();
            let (mx, my) = (x.dist().matrix().submatrix(&ix), y.dist().matrix().submatrix(&iy));
            Ok((far, dpi_value(&mx, &my)?))
        })
        .collect::<Result<_>>()?;

    let excess = samples
        .iter()
        .map(|&(b, d)| d - (b as f64 / n as f64).max(2.0 * upper))
        .fold(f64::NEG_INFINITY, f64::max);
    let b_mean = samples.iter().map(|s| s.0 as f64).sum::<f64>() / samples.len() as f64;
    let b_max = samples.iter().map(|s| s.0).max().unwrap_or(0);
    let above =
        samples.iter().filter(|s| s.1 > upper.sqrt()).count() as f64 / samples.len() as f64;
    let p_far: f64 = mass
        .iter()
        .zip(cross)
        .flat_map(|(m, c)| m.iter().zip(c).filter(|&(_, &d)| d > upper).map(|(&v, _)| v))
        .sum();
    r.observe("mc.b_mean", b_mean)
        .observe("mc.b_max", b_max as f64)
        .observe("mc.p_far", p_far)
        .observe("mc.frac_dpi_above_sqrt_upper", above)
        .observe("mc.max_dpi_minus_case_bound", excess)
        .assert("mc.dpi_le_case_bound", excess, Relation::Le, 0.0, TAU)
        .assert("mc.far_mass_le_upper", p_far, Relation::Le, upper, TAU);
    if upper > 0.0 && upper < 0.25 {
        // the tail grows with p, so p = upper covers every p < upper
        let root = upper.sqrt();
        let tail = binomial_upper_tail(n, upper, n as f64 * root);
        r.observe("binomial_tail", tail).bound("binomial_tail", root).assert(
            "binomial_tail_lt_sqrt_upper",
            tail,
            Relation::Lt,
            root,
            0.0,
        );
    }
    Ok(())
}

/// The Hölder check on `X = {p, x}` with `d = 0.5` and `Y = {p, y}` with
/// `d = 1`, both with masses `(1 - eps, eps)`. Sharing the label `p` lets
/// the identification gluing certify `d_GHP(X, Y) <= eps`.
pub fn check_hoelder_small_n(eps: f64, n: usize, options: HoelderOptions) -> Result<ExperimentReport> {
    if !(eps > 0.0 && eps < 0.25) {
        return Err(Error::InvalidArgument(format!("epsilon {eps} must lie in (0, 1/4)")));
    }
    let x = two_point_space(["p", "x"], 0.5, eps)?;
    let y = two_point_space(["p", "y"], 1.0, eps)?;
    let mut r = check_hoelder_pair(&x, &y, n, options)?;
    r.config("eps", eps);
    let dp = r.observed["dp_exact"];
    r.bound("sqrt_eps", eps.sqrt()).assert("dp_le_sqrt_eps", dp, Relation::Le, eps.sqrt(), TAU);
    Ok(r)
}

/// Integers `N` with `1/2 < N C eps^alpha < 1`.
pub fn sharp_window(c: f64, alpha: f64, eps: f64) -> Vec<usize> {
    let r = c * eps.powf(alpha);
    if !(r > 0.0) || !r.is_finite() {
        return Vec::new();
    }
    let (lo, hi) = (0.5 / r, 1.0 / r);
    if hi > 1e9 {
        return Vec::new();
    }
    let first = lo.floor() as usize + 1;
    (first..).take_while(|&k| (k as f64) < hi).collect()
}

/// Lower bound `d_P(theta_N^X, theta_N^Y; d_pi) >= C eps^alpha` for
/// `X = {a, b}` at distance `2C` and `Y = {c, d}` at `4C`, masses
/// `(1 - eps, eps)`, with `N` in the window `1/2 < N C eps^alpha < 1`.
///
/// Any pair of matrices at `d_pi < C eps^alpha < 1/N` must agree entrywise
/// within `C eps^alpha < 2C` with no row excluded, which forces both to be
/// zero; so `P(M_N^X != 0) > C eps^alpha` certifies the bound for every
/// coupling. When `2^N` fits in the budget and `N` is within the exact
/// `d_pi` limit, the distance is also computed exactly.
pub fn check_sharp_exponent(
    c: f64,
    alpha: f64,
    eps: f64,
    n: Option<usize>,
    budget: u128,
) -> Result<ExperimentReport> {
    if !(c > 0.0) {
        return Err(Error::InvalidArgument(format!("C = {c} must be positive")));
    }
    if !(alpha > 0.5 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("alpha = {alpha} must lie in (1/2, 1)")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidArgument(format!("epsilon = {eps} must lie in (0, 1)")));
    }
    let window = sharp_window(c, alpha, eps);
    let n = match n {
        Some(n) if window.contains(&n) => n,
        Some(n) => {
            return Err(Error::InvalidArgument(format!(
                "N = {n} is outside the window 1/2 < N C eps^alpha < 1"
            )))
        }
        None => *window
            .first()
            .ok_or_else(|| Error::InvalidArgument("no integer N with 1/2 < N C eps^alpha < 1".into()))?,
    };
    let target = c * eps.powf(alpha);
    let p_nonzero = 1.0 - (1.0 - eps).powi(n as i32) - eps.powi(n as i32);

    let mut r = ExperimentReport::new("sharp");
    r.config("c", c)
        .config("alpha", alpha)
        .config("eps", eps)
        .config("n", n)
        .config("budget", budget.to_string())
        .observe("n_c_eps_alpha", n as f64 * target)
        .observe("p_nonzero", p_nonzero)
        .bound("c_eps_alpha", target)
        .assert("p_nonzero_gt_c_eps_alpha", p_nonzero, Relation::Gt, target, TAU);

    let exact_ok = n <= EXACT_LIMIT && 2u128.checked_pow(n as u32).is_some_and(|k| k <= budget);
    if exact_ok {
        let x = two_point_space(["a", "b"], 2.0 * c, eps)?;
        let y = two_point_space(["c", "d"], 4.0 * c, eps)?;
        let ex = exact_ensemble(&x, n, budget)?;
        let ey = exact_ensemble(&y, n, budget)?;
        let grid = ground_grid(&ex.atoms, &ey.atoms, dpi_value)?;
        let (dp, dp_exact) = ensemble_prokhorov(&ex, &ey, &grid)?;
        r.observe("dp", dp)
            .observe("dp_exact", dp_exact)
            .assert("dp_gt_c_eps_alpha", dp_exact, Relation::Gt, target, TAU)
            .assert("float_matches_exact", dp, Relation::Eq, dp_exact, EQUALITY_TOL);
    } else {
        r.note(format!("exact d_P skipped: N = {n} exceeds the budget or the exact d_pi limit"));
    }
    Ok(r)
}

/// Hoeffding slack `sqrt(ln(1 / 0.05) / (2 trials))` for a one-sided 95%
/// bound on a frequency.
pub fn hoeffding_slack(trials: usize) -> f64 {
    ((1.0f64 / 0.05).ln() / (2.0 * trials as f64)).sqrt()
}

/// Frequency over `trials` samples of `d_P(mu_N, mu; X) > 3 eps`, where
/// `mu_N` is the empirical measure of `N` draws; asserted below `eps` plus
/// the Hoeffding slack.
pub fn check_sampling_convergence(
    space: &ModelSpace,
    eps: f64,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<ExperimentReport> {
    let x = space
        .as_finite()
        .ok_or_else(|| Error::InvalidArgument("sampling convergence needs a finite space".into()))?;
    if n == 0 || trials == 0 {
        return Err(Error::InvalidArgument("N and trials must be positive".into()));
    }
    let d = x.dist().matrix().rows();
    let values: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let idx = sample_indices(x, n, &mut trial_rng(seed, t))?;
            let mut mu_n = vec![0.0; x.len()];
            for i in idx {
                mu_n[i] += 1.0;
            }
            mu_n.iter_mut().for_each(|m| *m /= n as f64);
            Ok(prokhorov_distance(&mu_n, x.mass(), &d)?.value)
        })
        .collect::<Result<_>>()?;
    let exceed = values.iter().filter(|&&v| v > 3.0 * eps).count();
    let freq = exceed as f64 / trials as f64;
    let slack = hoeffding_slack(trials);
    let mut r = ExperimentReport::new("sampconv");
    r.config("eps", eps)
        .config("n", n)
        .config("trials", trials)
        .config("seed", seed)
        .config("space_size", x.len())
        .observe("frequency", freq)
        .observe("exceedances", exceed as f64)
        .observe("mean_dp", values.iter().sum::<f64>() / trials as f64)
        .observe("max_dp", values.iter().copied().fold(0.0, f64::max))
        .bound("eps", eps)
        .bound("slack", slack)
        .assert("frequency_lt_eps_plus_slack", freq, Relation::Lt, eps + slack, 0.0);
    Ok(r)
}

/// Exact `d_P` between the ensembles of two finite spaces, once over the
/// `d_M` grid and once over the `d_pi` grid; asserts equality. As a negative
/// control the last atom of the first ensemble is deleted and both values
/// are reported without assertion.
pub fn check_group_invariance(x: &FiniteMMS, y: &FiniteMMS, n: usize, budget: u128) -> Result<ExperimentReport> {
    check_exact_size(n)?;
    let ex = exact_ensemble(x, n, budget)?;
    let ey = exact_ensemble(y, n, budget)?;
    let grid_m = ground_grid(&ex.atoms, &ey.atoms, dm_value)?;
    let grid_pi = ground_grid(&ex.atoms, &ey.atoms, dpi_value)?;
    let (_, dp_m) = ensemble_prokhorov(&ex, &ey, &grid_m)?;
    let (_, dp_pi) = ensemble_prokhorov(&ex, &ey, &grid_pi)?;
    let mut r = ExperimentReport::new("gpaction");
    r.config("n", n)
        .config("budget", budget.to_string())
        .observe("atoms_x", ex.atoms.len() as f64)
        .observe("atoms_y", ey.atoms.len() as f64)
        .observe("dp_dm", dp_m)
        .observe("dp_dpi", dp_pi)
        .assert("dm_equals_dpi", dp_m, Relation::Eq, dp_pi, EQUALITY_TOL);

    if ex.atoms.len() > 1 {
        let k = ex.atoms.len() - 1;
        let total = BigRational::from_integer(1.into()) - &ex.exact[k];
        let cut = ExactEnsemble {
            atoms: ex.atoms[..k].to_vec(),
            p: {
                let s: f64 = ex.p[..k].iter().sum();
                ex.p[..k].iter().map(|v| v / s).collect()
            },
            exact: ex.exact[..k].iter().map(|v| v / &total).collect(),
        };
        let (_, cm) = ensemble_prokhorov(&cut, &ey, &grid_m[..k])?;
        let (_, cp) = ensemble_prokhorov(&cut, &ey, &grid_pi[..k])?;
        r.observe("control.dp_dm", cm)
            .observe("control.dp_dpi", cp)
            .observe("control.gap", cm - cp)
            .note("control: last atom of the first ensemble deleted; equality not expected");
    }
    Ok(r)
}
