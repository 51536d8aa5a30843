//! Verification suites. Each check measures quantities predicted by the theory
//! of the family and records them in a [`Certificate`].

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::centers::{
    count_components_at_center, period2_centers, period2_centers_within, radius_limit, search_centers,
    verify_attracting_nearby, CenterError, VirtualCenter,
};
use crate::family::{
    eval, eval_derivative, fixed_point_multiplier, free_asymptotic_value, i_pow, lambda_of_fixed_point,
    root_branch, unit_root, FamilyParams, KernelError,
};
use crate::orbit::{
    class_of_outcome, classify_parameter, cycle_log_multiplier, cycle_multiplier, iterate_orbit, CycleInfo, CycleMode, OrbitBudget,
    OrbitOutcome, ParamClass,
};
use crate::render::{
    circle_scan, flood_component, render_parameter_plane, write_image, Colormap, ComponentReport, ParamGrid,
    RenderError, Window,
};

pub const DEFAULT_SEED: u64 = 20_240_917;
/// Iteration cap for classifying points `10⁻³` from the period-one boundary.
pub const CROSSING_MAX_ITER: u32 = 200_000;
/// Boundary points with `|arg μ|` below this are treated as cusp neighbourhoods.
pub const CUSP_ARG: f64 = 0.3;
/// Height up to which `||μ| − 1|` on the boundary locus is held to `1e−8`.
pub const BOUNDARY_Y_EXACT: f64 = 12.0;
/// Doubling-law pairs are compared only when the combined multiplier error bar
/// is below this.
pub const DOUBLING_MAX_ERROR_BAR: f64 = 1e-10;
/// Sides of the local windows used when the main window clips a component.
pub const LOCAL_SIDES: [f64; 3] = [0.5, 1.0, 2.0];
/// Radii tried, largest first, for the local structure at virtual centers.
pub const RADIUS_LADDER: [f64; 7] = [0.1, 0.03, 0.01, 0.003, 0.001, 3e-4, 1e-4];
/// At most this many order-2 centers, nearest the origin, are checked on the rays.
pub const MAX_RAY_CENTERS: usize = 64;
/// Factors applied to the flank offset around order-2 centers on the rays.
pub const FLANK_SHRINK: [f64; 4] = [1.0, 0.25, 0.0625, 0.015625];
/// Period-two components with fewer cells skip the distance-to-diameter test.
pub const MIN_RESOLVED_CELLS: usize = 9;
/// Suites refuse families with `pq` above this.
pub const MAX_PQ: u32 = 8;

pub const SUITES: [&str; 7] = [
    "symmetry",
    "multipliers",
    "s1-structure",
    "s1-boundary",
    "separating-rays",
    "s2-bounded",
    "centers",
];

#[derive(Debug, Error)]
pub enum LabError {
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("unknown suite {name:?}; valid suites are: {}", SUITES.join(", "))]
    UnknownSuite { name: String },
    #[error("pq = {0} exceeds the supported maximum {MAX_PQ}")]
    Unsupported(u32),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Render(#[from] RenderError),
    #[error(transparent)]
    Center(#[from] CenterError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub label: String,
    #[serde(with = "nullable", default = "nan")]
    pub value: f64,
    pub expected: f64,
    /// Infinite for informational entries; written as JSON `null`.
    #[serde(with = "nullable_tol")]
    pub tol: f64,
}

fn nan() -> f64 {
    f64::NAN
}

/// Non-finite values as `null`, read back as NaN.
mod nullable {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

/// Like [`nullable`], but `null` reads back as an unbounded tolerance.
mod nullable_tol {
    use serde::{Deserialize, Deserializer};

    pub use super::nullable::serialize;

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

impl Measurement {
    pub fn new(label: impl Into<String>, value: f64, expected: f64, tol: f64) -> Self {
        Self {
            label: label.into(),
            value,
            expected,
            tol,
        }
    }

    /// Counts must match exactly.
    pub fn count(label: impl Into<String>, value: usize, expected: usize) -> Self {
        Self::new(label, value as f64, expected as f64, 0.0)
    }

    /// A condition recorded as 1 (holds) or 0.
    pub fn holds(label: impl Into<String>, ok: bool) -> Self {
        Self::new(label, if ok { 1.0 } else { 0.0 }, 1.0, 0.0)
    }

    pub fn passed(&self) -> bool {
        (self.value - self.expected).abs() <= self.tol
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub name: String,
    pub params: FamilyParams,
    pub passed: bool,
    pub measurements: Vec<Measurement>,
    pub artifacts: Vec<String>,
}

impl Certificate {
    pub fn new(name: impl Into<String>, params: FamilyParams) -> Self {
        Self {
            name: name.into(),
            params,
            passed: true,
            measurements: Vec::new(),
            artifacts: Vec::new(),
        }
    }

    pub fn push(&mut self, m: Measurement) {
        self.passed &= m.passed();
        self.measurements.push(m);
    }

    pub fn failures(&self) -> impl Iterator<Item = &Measurement> {
        self.measurements.iter().filter(|m| !m.passed())
    }

    pub fn to_json(&self) -> Result<String, LabError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn file_name(&self) -> String {
        format!("{}_p{}_q{}.json", self.name, self.params.p(), self.params.q())
    }

    /// Writes `<dir>/<name>_p<p>_q<q>.json` and returns its path.
    pub fn write_to(&self, dir: &Path) -> Result<PathBuf, LabError> {
        std::fs::create_dir_all(dir)?;
        let path = dir.join(self.file_name());
        std::fs::write(&path, self.to_json()? + "\n")?;
        Ok(path)
    }
}

fn guard(params: FamilyParams) -> Result<(), LabError> {
    if params.pq() > MAX_PQ {
        return Err(LabError::Unsupported(params.pq()));
    }
    Ok(())
}

/// Uniform sample of the annulus `r_in < |λ| < r_out`.
fn annulus_sample(rng: &mut ChaCha8Rng, r_in: f64, r_out: f64) -> Complex64 {
    let r = rng.gen_range(r_in * r_in..r_out * r_out).sqrt();
    Complex64::from_polar(r, rng.gen_range(0.0..TAU))
}

fn angle_gap(a: f64, b: f64) -> f64 {
    (a - b + PI).rem_euclid(TAU) - PI
}

fn rel_dev(a: Complex64, b: Complex64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

/// Shell class with the multiplier (and tract signature) ignored.
fn same_shell_kind(a: &ParamClass, b: &ParamClass) -> bool {
    a.same_kind(b)
}

/// How the multiplier transforms under `λ ↦ −λ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum NegationLaw {
    Equal,
    /// `μ(−λ) = μ(λ)²`.
    Squares,
    /// `μ(λ) = μ(−λ)²`.
    SquareRoot,
}

/// Class predicted for `−λ` from the class at `λ` (multiplier left as is) and
/// the multiplier law that links them.
fn negated_class(params: FamilyParams, class: &ParamClass) -> (ParamClass, NegationLaw) {
    let ParamClass::Shell {
        period,
        raw_period,
        mode,
        multiplier,
        tracts,
    } = class.clone()
    else {
        return (class.clone(), NegationLaw::Equal);
    };
    if params.pq_even() {
        return (class.clone(), NegationLaw::Equal);
    }
    let shell = |raw_period, mode| ParamClass::Shell {
        period,
        raw_period,
        mode: Some(mode),
        multiplier,
        tracts,
    };
    match mode {
        Some(CycleMode::TwoCycles) if period % 2 == 1 => {
            (shell(2 * raw_period, CycleMode::DoubledCycle), NegationLaw::Squares)
        }
        Some(CycleMode::DoubledCycle) if period % 2 == 1 => {
            (shell(raw_period / 2, CycleMode::TwoCycles), NegationLaw::SquareRoot)
        }
        _ => (class.clone(), NegationLaw::Equal),
    }
}

fn raw_period(class: &ParamClass) -> u32 {
    match class {
        ParamClass::Shell { raw_period, .. } => *raw_period,
        _ => 0,
    }
}

#[derive(Default)]
struct Tally {
    pairs: usize,
    mismatches: usize,
    undecided: usize,
    max_dev: f64,
}

impl Tally {
    fn record(&mut self, expected: &ParamClass, got: &ParamClass) {
        self.pairs += 1;
        if expected.is_undecided() != got.is_undecided() {
            self.undecided += 1;
            return;
        }
        if !same_shell_kind(expected, got) {
            self.mismatches += 1;
            return;
        }
        if let (Some(a), Some(b)) = (expected.multiplier(), got.multiplier()) {
            self.max_dev = self.max_dev.max((a - b).norm());
        }
    }

    fn push(&self, cert: &mut Certificate, name: &str, tol: f64) {
        cert.push(Measurement::count(format!("{name}: class mismatches"), self.mismatches, 0));
        // Near the bifurcation locus rounding alone can tip a sample over the iteration budget.
        cert.push(Measurement::new(
            format!("{name}: decided/undecided disagreements"),
            self.undecided as f64,
            0.0,
            (self.pairs / 100) as f64,
        ));
        cert.push(Measurement::new(
            format!("{name}: max multiplier deviation over {} pairs", self.pairs),
            self.max_dev,
            0.0,
            tol,
        ));
    }
}

/// Invariance of the classification under the symmetries of the parameter plane.
///
/// Random `λ` in `0.2 < |λ| < 6` are compared with `λ̄`, `ω_k λ` and `−λ`. For odd
/// `pq`, the negation law doubles the period and squares the multiplier of a
/// two-cycle parameter with odd period; those cases are measured relatively.
pub fn check_symmetries(
    params: FamilyParams,
    samples: usize,
    seed: u64,
    budget: &OrbitBudget,
) -> Result<Certificate, LabError> {
    guard(params)?;
    let mut cert = Certificate::new("symmetry", params);
    if samples == 0 {
        return Ok(cert);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lambdas: Vec<(Complex64, i64)> = (0..samples)
        .map(|_| {
            let l = annulus_sample(&mut rng, 0.2, 6.0);
            let k = rng.gen_range(1..=params.q().max(2) as i64 - 1);
            (l, k)
        })
        .collect();
    let rows: Vec<[ParamClass; 4]> = lambdas
        .par_iter()
        .map(|&(l, k)| {
            let c = |x| classify_parameter(params, x, budget);
            [c(l), c(l.conj()), c(unit_root(k, params.q()) * l), c(-l)]
        })
        .collect();

    let mut conj = Tally::default();
    let mut rot = Tally::default();
    let mut neg = Tally::default();
    let mut doubling_cases = 0;
    let mut doubling_dev: f64 = 0.0;
    let mut beyond_budget = 0;
    let mut ill_conditioned = 0;
    for (&(lambda, _), [base, c, r, n]) in lambdas.iter().zip(&rows) {
        let conj_expected = match base.clone() {
            ParamClass::Shell {
                period,
                raw_period,
                mode,
                multiplier,
                tracts,
            } => ParamClass::Shell {
                period,
                raw_period,
                mode,
                multiplier: multiplier.conj(),
                tracts,
            },
            other => other,
        };
        conj.record(&conj_expected, c);
        if params.q() > 1 {
            rot.record(base, r);
        }
        // A cycle whose partner under negation is longer than the period
        // budget cannot be matched; such pairs are counted and skipped.
        let (expected, law) = negated_class(params, base);
        let (back, _) = negated_class(params, n);
        if raw_period(&expected).max(raw_period(&back)) > budget.max_period {
            beyond_budget += 1;
            continue;
        }
        if law == NegationLaw::Equal {
            neg.record(&expected, n);
            continue;
        }
        neg.pairs += 1;
        if expected.is_undecided() != n.is_undecided() {
            neg.undecided += 1;
        } else if !same_shell_kind(&expected, n) {
            neg.mismatches += 1;
        } else {
            // Long cycles with large partial derivative products fix μ to only a
            // few digits in f64; those pairs are counted rather than compared.
            // Compared in log space: deep cycles have subnormal multipliers.
            let (dev, bar) = match (
                log_multiplier_estimate(params, lambda, budget),
                log_multiplier_estimate(params, -lambda, budget),
            ) {
                (Some(a), Some(b)) => {
                    let (big, small, k) = match law {
                        NegationLaw::Squares => (b, a, 2.0),
                        _ => (a, b, 2.0),
                    };
                    let gap = Complex64::new(
                        big.ln_abs - k * small.ln_abs,
                        angle_gap(big.arg, k * small.arg),
                    );
                    ((gap.exp() - 1.0).norm(), big.error_bar + k * small.error_bar)
                }
                _ => (f64::NAN, f64::INFINITY),
            };
            if bar > DOUBLING_MAX_ERROR_BAR {
                ill_conditioned += 1;
                continue;
            }
            doubling_cases += 1;
            doubling_dev = doubling_dev.max(dev);
        }
    }
    cert.push(Measurement::new("seed", seed as f64, seed as f64, 0.0));
    conj.push(&mut cert, "conjugation", 1e-9);
    if params.q() > 1 {
        rot.push(&mut cert, "rotation by roots of unity", 1e-9);
    }
    neg.push(&mut cert, "negation", 1e-9);
    cert.push(Measurement::count(
        format!("negation pairs skipped: partner period above {}", budget.max_period),
        beyond_budget,
        beyond_budget,
    ));
    if params.pq_odd() {
        if doubling_cases == 0 {
            return Err(LabError::Inconclusive(
                "no odd-period two-cycle parameters sampled for the doubling law".into(),
            ));
        }
        cert.push(Measurement::new(
            format!("doubling pairs skipped: multiplier error bar above {DOUBLING_MAX_ERROR_BAR:e}"),
            ill_conditioned as f64,
            ill_conditioned as f64,
            f64::INFINITY,
        ));
        cert.push(Measurement::new(
            format!("doubling law mu(-l) = mu(l)^2: max relative deviation over {doubling_cases} cases"),
            doubling_dev,
            0.0,
            1e-8,
        ));
    }
    Ok(cert)
}

/// Log of a cycle multiplier with an empirical error bar.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogMultiplier {
    pub ln_abs: f64,
    pub arg: f64,
    /// Relative spread of `μ` when the cycle anchor moves by a few ulps and the
    /// rest of the cycle is regenerated by forward iteration.
    pub error_bar: f64,
}

/// `ln μ` of the cycle attracting `v_λ`, with its error bar; `None` when no cycle
/// is found.
pub fn log_multiplier_estimate(params: FamilyParams, lambda: Complex64, budget: &OrbitBudget) -> Option<LogMultiplier> {
    let v = free_asymptotic_value(params, lambda);
    let OrbitOutcome::Attracted(cycle) = iterate_orbit(params, lambda, v, budget) else {
        return None;
    };
    let (m0, a0) = cycle_log_multiplier(params, &cycle).ok()?;
    let mut worst: f64 = 0.0;
    for k in 0..4 {
        let kick = Complex64::from_polar(8.0 * f64::EPSILON, k as f64 * FRAC_PI_2);
        let mut z = cycle.points[0] * (1.0 + kick);
        let mut points = Vec::with_capacity(cycle.points.len());
        for _ in 0..cycle.points.len() {
            points.push(z);
            z = eval(params, lambda, z).ok()?;
        }
        let moved = CycleInfo { points, ..cycle.clone() };
        let (m, a) = cycle_log_multiplier(params, &moved).ok()?;
        let gap = Complex64::new(m - m0, angle_gap(a, a0)).exp() - 1.0;
        worst = worst.max(gap.norm());
    }
    Some(LogMultiplier {
        ln_abs: m0,
        arg: a0,
        error_bar: worst,
    })
}

/// Closed-form cycle multipliers against the chain-rule product `∏ f'(z_i)` on
/// random shell parameters; every multiplier must also be attracting.
///
/// Samples whose chain-rule product leaves the normal `f64` range cannot be
/// compared and are drawn again.
pub fn check_multipliers(
    params: FamilyParams,
    count: usize,
    seed: u64,
    budget: &OrbitBudget,
) -> Result<Certificate, LabError> {
    guard(params)?;
    let mut cert = Certificate::new("multipliers", params);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut compared = 0;
    let mut max_dev: f64 = 0.0;
    let mut max_abs: f64 = 0.0;
    let mut attempts = 0;
    while compared < count && attempts < 100 * count.max(1) {
        let batch: Vec<Complex64> = (0..64).map(|_| annulus_sample(&mut rng, 0.2, 6.0)).collect();
        attempts += batch.len();
        let results: Vec<Option<(Complex64, Complex64)>> = batch
            .par_iter()
            .map(|&l| {
                let v = free_asymptotic_value(params, l);
                let outcome = iterate_orbit(params, l, v, budget);
                let OrbitOutcome::Attracted(cycle) = &outcome else {
                    return None;
                };
                if !matches!(class_of_outcome(params, outcome.clone()), ParamClass::Shell { .. }) {
                    return None;
                }
                let closed = cycle_multiplier(params, cycle).ok()?;
                let chain = cycle
                    .points
                    .iter()
                    .try_fold(Complex64::new(1.0, 0.0), |acc, &z| {
                        eval_derivative(params, l, z).map(|d| acc * d)
                    })
                    .ok()?;
                (chain.norm() > 1e-290 && chain.norm().is_finite()).then_some((closed, chain))
            })
            .collect();
        for (closed, chain) in results.into_iter().flatten() {
            if compared == count {
                break;
            }
            compared += 1;
            max_dev = max_dev.max(rel_dev(closed, chain));
            max_abs = max_abs.max(closed.norm());
        }
    }
    cert.push(Measurement::new("seed", seed as f64, seed as f64, 0.0));
    cert.push(Measurement::count("shell parameters compared", compared, count));
    cert.push(Measurement::new(
        "max relative deviation closed form vs chain rule",
        max_dev,
        0.0,
        1e-9,
    ));
    cert.push(Measurement::holds(format!("all |mu| < 1 (max {max_abs:.6})"), max_abs < 1.0));
    Ok(cert)
}

/// Positive root of `pq·r = sinh r`, the height at which the period-one region
/// of the `u = 2z^q` plane meets the imaginary axis (0 when `pq = 1`).
pub fn s1_threshold(params: FamilyParams) -> f64 {
    let pq = params.pq() as f64;
    if params.pq() == 1 {
        return 0.0;
    }
    let g = |r: f64| r.sinh() - pq * r;
    let (mut lo, mut hi) = (1e-6, 2.0 * (2.0 * pq).ln() + 2.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// `|λ|` where the symmetry ray of a period-one component enters it:
/// `(r₀/2)^{1/q} / tanh^p(r₀/2)`, with its limit 1 when `pq = 1`.
pub fn s1_entry_radius(params: FamilyParams) -> f64 {
    let r0 = s1_threshold(params);
    if r0 == 0.0 {
        return 1.0;
    }
    let s = 0.5 * r0;
    s.powf(1.0 / params.q() as f64) / s.tanh().powi(params.p() as i32)
}

/// Directions `i^{−p}η` of the symmetry rays of the period-one components,
/// `η^q = ±i`.
pub fn s1_ray_directions(params: FamilyParams) -> Vec<(char, u32, Complex64)> {
    let q = params.q();
    let rot = i_pow(-(params.p() as i64));
    let mut rays = Vec::new();
    for k in 0..q {
        let eta = Complex64::from_polar(1.0, (FRAC_PI_2 + TAU * k as f64) / q as f64);
        let eta_minus = if q % 2 == 1 { -eta } else { eta.conj() };
        rays.push(('+', k, rot * eta));
        rays.push(('-', k, rot * eta_minus));
    }
    rays
}

/// Directions `i^{−p}ω` of the separating rays, `ω^q = ±1`.
pub fn separating_ray_directions(params: FamilyParams) -> Vec<Complex64> {
    let q = params.q();
    let rot = i_pow(-(params.p() as i64));
    (0..2 * q)
        .map(|k| rot * unit_root(k as i64, 2 * q))
        .collect()
}

/// Structure of the period-one set near infinity: `2q` arcs on each circle, one
/// symmetry ray per arc, the argument relation between the attracting point and
/// `v_λ` along the rays, and decay of `|μ|` outward.
pub fn check_s1_structure(
    params: FamilyParams,
    radii: &[f64],
    samples: usize,
    budget: &OrbitBudget,
) -> Result<Certificate, LabError> {
    guard(params)?;
    let mut cert = Certificate::new("s1-structure", params);
    let q = params.q() as usize;
    let rays = s1_ray_directions(params);
    for &r in radii {
        let report = circle_scan(params, r, samples, budget)?;
        let undecided: usize = report
            .arcs
            .iter()
            .filter(|a| a.class == crate::render::ArcClass::Undecided)
            .map(|a| a.samples)
            .sum();
        if 2 * undecided > samples {
            return Err(LabError::Inconclusive(format!(
                "circle of radius {r} is dominated by undecided samples"
            )));
        }
        let arcs: Vec<_> = report.shell_arcs(1).collect();
        cert.push(Measurement::count(format!("R={r}: period-one arcs"), arcs.len(), 2 * q));
        let single = arcs
            .iter()
            .filter(|a| rays.iter().filter(|(_, _, d)| a.contains(d.arg())).count() == 1)
            .count();
        cert.push(Measurement::count(
            format!("R={r}: arcs containing exactly one symmetry ray"),
            single,
            2 * q,
        ));

        for (sign, k, dir) in &rays {
            let at = |radius: f64| -> Option<(f64, bool, f64)> {
                let lambda = dir * radius;
                let v = free_asymptotic_value(params, lambda);
                let outcome = iterate_orbit(params, lambda, v, budget);
                let OrbitOutcome::Attracted(cycle) = &outcome else {
                    return None;
                };
                let class = class_of_outcome(params, outcome.clone());
                if class.shell_period() != Some(1) {
                    return None;
                }
                let dev = |target: f64| {
                    cycle
                        .points
                        .iter()
                        .map(|z| angle_gap(z.arg(), target).abs())
                        .fold(f64::INFINITY, f64::min)
                };
                let direct = dev(v.arg());
                let opposite = dev((-v).arg());
                let flip = params.p() % 2 == 1 && q % 2 == 0 && opposite < direct;
                let ln_mu = cycle_log_multiplier(params, cycle).map_or(f64::NAN, |(m, _)| m);
                Some((if flip { opposite } else { direct }, flip, ln_mu))
            };
            let near = at(r);
            let far = at(2.0 * r);
            for (radius, res) in [(r, near), (2.0 * r, far)] {
                let label = |branch: &str| format!("ray {sign}{k} r={radius}: |arg z - arg({branch})|");
                match res {
                    Some((dev, flip, _)) => cert.push(Measurement::new(
                        label(if flip { "-v" } else { "v" }),
                        dev,
                        0.0,
                        1e-6,
                    )),
                    None => cert.push(Measurement::holds(
                        format!("ray {sign}{k} r={radius}: period-one shell"),
                        false,
                    )),
                }
            }
            if let (Some((_, _, m1)), Some((_, _, m2))) = (near, far) {
                cert.push(Measurement::holds(
                    format!("ray {sign}{k}: ln|mu| decreases ({m1:.3} at {r}, {m2:.3} at {})", 2.0 * r),
                    m2 < m1,
                ));
            }
        }
    }
    Ok(cert)
}

/// A point of the boundary of a period-one component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    /// `u = 2z^q` on the locus `|pq·u / sin u| = 1`.
    pub u: Complex64,
    /// The neutral fixed point.
    pub z: Complex64,
    pub lambda: Complex64,
    /// `|μ(z)|` recomputed from `z`.
    pub multiplier_abs: f64,
}

/// Solves `pq²(x² + y²) = sin²x + sinh²y` for `x ≥ 0`; the left side minus the
/// right is increasing in `x`.
pub fn s1_boundary_x(params: FamilyParams, y: f64) -> Result<f64, LabError> {
    let pq = params.pq() as f64;
    let g = |x: f64| pq * pq * (x * x + y * y) - x.sin().powi(2) - y.sinh().powi(2);
    if g(0.0) > 0.0 {
        return Err(LabError::Invalid(format!(
            "height {y} is below the threshold {}",
            s1_threshold(params)
        )));
    }
    let (mut lo, mut hi) = (0.0, y.cosh() / pq + 1.0);
    if !(g(hi) >= 0.0) {
        return Err(LabError::Invalid(format!("no bracket at height {y}")));
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Boundary of the period-one component attached to the `root`-th `q`-th root
/// of the upper (or lower) branch of `|h(u)| = 1`, over heights in `y_range`.
pub fn s1_boundary_curve(
    params: FamilyParams,
    upper: bool,
    root: u32,
    y_range: (f64, f64),
    samples: usize,
) -> Result<Vec<BoundaryPoint>, LabError> {
    let (y0, y1) = y_range;
    let floor = s1_threshold(params).max(1.0);
    if !(y0 >= floor && y1 <= 30.0 && y0 <= y1) || samples == 0 {
        return Err(LabError::Invalid(format!(
            "height range [{y0}, {y1}] must lie in [{floor}, 30]"
        )));
    }
    (0..samples)
        .map(|i| {
            let t = if samples == 1 { 0.0 } else { i as f64 / (samples - 1) as f64 };
            let y = y0 + (y1 - y0) * t;
            let x = s1_boundary_x(params, y)?;
            let u = Complex64::new(x, if upper { y } else { -y });
            boundary_point(params, u, root)
        })
        .collect()
}

fn boundary_point(params: FamilyParams, u: Complex64, root: u32) -> Result<BoundaryPoint, LabError> {
    let z = root_branch(0.5 * u, params.q(), root as i64);
    let lambda = lambda_of_fixed_point(params, z)?;
    let multiplier_abs = fixed_point_multiplier(params, z)?.norm();
    Ok(BoundaryPoint {
        u,
        z,
        lambda,
        multiplier_abs,
    })
}

/// Boundary-locus certificate: the threshold against an independent fixed-point
/// iteration, `|μ| = 1` along the curve, the asymptote at `y = 20`, the endpoint
/// on the imaginary axis and inward/outward classification across the curve.
pub fn check_s1_boundary(
    params: FamilyParams,
    samples: usize,
    budget: &OrbitBudget,
) -> Result<Certificate, LabError> {
    guard(params)?;
    let mut cert = Certificate::new("s1-boundary", params);
    let pq = params.pq() as f64;
    let r0 = s1_threshold(params);
    // r = asinh(pq·r) contracts onto the positive root.
    let mut r = 3.0 * pq;
    for _ in 0..500 {
        r = (pq * r).asinh();
    }
    let r0_check = if params.pq() == 1 { 0.0 } else { r };
    cert.push(Measurement::new(format!("r0 = {r0:.12}"), r0, r0_check, 1e-6));

    let y_lo = (r0 * (1.0 + 1e-9)).max(1.0);
    // Recomputing |μ| from z amplifies the rounding of z^q by about |u|, which
    // reaches e^y/(2pq); the absolute test stops at BOUNDARY_Y_EXACT and the
    // rest of the curve is held to a bound relative to that conditioning.
    let mut worst: f64 = 0.0;
    let mut worst_scaled: f64 = 0.0;
    for upper in [true, false] {
        for root in 0..params.q() {
            for p in s1_boundary_curve(params, upper, root, (y_lo, 20.0), samples)? {
                let gap = (p.multiplier_abs - 1.0).abs();
                if p.u.im.abs() <= BOUNDARY_Y_EXACT {
                    worst = worst.max(gap);
                }
                worst_scaled = worst_scaled.max(gap / (f64::EPSILON * (1.0 + p.u.norm())));
            }
        }
    }
    cert.push(Measurement::new(
        format!("max ||mu| - 1| on the curve, y in [{y_lo:.4}, {BOUNDARY_Y_EXACT}]"),
        worst,
        0.0,
        1e-8,
    ));
    cert.push(Measurement::new(
        "max ||mu| - 1| / (eps (1 + |u|)) on the curve, y in [y_lo, 20]",
        worst_scaled,
        0.0,
        64.0 * params.q() as f64,
    ));

    let x20 = s1_boundary_x(params, 20.0)?;
    let asym = 20f64.exp() / (2.0 * pq);
    cert.push(Measurement::new(
        "relative gap to e^y/(2pq) at y = 20",
        (x20 - asym).abs() / asym,
        0.0,
        0.01,
    ));
    if params.pq() > 1 {
        let x_end = s1_boundary_x(params, r0 * (1.0 + 1e-9))?;
        cert.push(Measurement::new("x at y = r0(1 + 1e-9)", x_end, 0.0, 1e-3));
    }

    let (inward, outward, total, skipped) = crossing_test(params, y_lo, budget)?;
    if total == 0 {
        return Err(LabError::Inconclusive("every crossing probe sits at a cusp".into()));
    }
    cert.push(Measurement::new(
        "crossing probes skipped near the multiplier-one cusp (informational)",
        skipped as f64,
        skipped as f64,
        f64::INFINITY,
    ));
    cert.push(Measurement::count("inward perturbations classified period one", inward, total));
    cert.push(Measurement::count("outward perturbations classified period one", outward, 0));
    Ok(cert)
}

/// Classifies `λ ± 10⁻³·n` across the boundary, `n` the unit normal pointing
/// into the component, at heights just above `y_lo`. Points where the boundary
/// multiplier is close to 1 are skipped: `λ(z)` folds there, the boundary has a
/// cusp and the outward side may hold a second attracting fixed point.
/// Returns `(inward hits, outward hits, probes, skipped)`.
fn crossing_test(
    params: FamilyParams,
    y_lo: f64,
    budget: &OrbitBudget,
) -> Result<(usize, usize, usize, usize), LabError> {
    // Near the boundary |μ| ≈ 1 − 10⁻³, so convergence takes ~10⁴ steps.
    let deep = OrbitBudget {
        max_iter: budget.max_iter.max(CROSSING_MAX_ITER),
        ..*budget
    };
    let heights: Vec<f64> = (0..8).map(|i| y_lo + 0.25 + 0.25 * i as f64).collect();
    let mut jobs = Vec::new();
    let mut skipped = 0;
    for &y in &heights {
        for root in 0..params.q() {
            for upper in [true, false] {
                let x = s1_boundary_x(params, y)?;
                let sy = if upper { y } else { -y };
                let point = boundary_point(params, Complex64::new(x, sy), root)?;
                if fixed_point_multiplier(params, point.z)?.arg().abs() < CUSP_ARG {
                    skipped += 1;
                    continue;
                }
                let at = |x: f64, y: f64| {
                    boundary_point(params, Complex64::new(x, y), root).map(|b| b.lambda)
                };
                let base = point.lambda;
                let h = 1e-6 * y;
                let tangent = at(s1_boundary_x(params, y + h)?, if upper { y + h } else { -y - h })?
                    - at(s1_boundary_x(params, y - h)?, if upper { y - h } else { -y + h })?;
                let mut normal = Complex64::i() * tangent / tangent.norm();
                // Inside the component the locus point moves toward x = 0.
                if (normal.conj() * (at(x * (1.0 - 1e-6), sy)? - base)).re < 0.0 {
                    normal = -normal;
                }
                jobs.push((base + 1e-3 * normal, base - 1e-3 * normal));
            }
        }
    }
    let verdicts: Vec<(bool, bool)> = jobs
        .par_iter()
        .map(|&(inside, outside)| {
            let one = |l| classify_parameter(params, l, &deep).shell_period() == Some(1);
            (one(inside), one(outside))
        })
        .collect();
    let inward = verdicts.iter().filter(|v| v.0).count();
    let outward = verdicts.iter().filter(|v| v.1).count();
    Ok((inward, outward, verdicts.len(), skipped))
}

/// The separating rays `i^{−p}·r·ω`, `ω^{2q} = 1`. For even `pq` no sample may be
/// a shell parameter. For odd `pq`, at every order-2 center on a ray the two
/// neighbouring ray points carry the two modes of period two.
pub fn check_separating_rays(
    params: FamilyParams,
    r_max: f64,
    samples: usize,
    budget: &OrbitBudget,
) -> Result<Certificate, LabError> {
    guard(params)?;
    if !(r_max > 0.0) || samples < 2 {
        return Err(LabError::Invalid(format!("r_max {r_max}, {samples} samples")));
    }
    let mut cert = Certificate::new("separating-rays", params);
    let dirs = separating_ray_directions(params);
    if params.pq_even() {
        let radii: Vec<f64> = (0..samples)
            .map(|i| r_max * 10f64.powf(-4.0 * (1.0 - i as f64 / (samples - 1) as f64)))
            .collect();
        let rot = i_pow(-(params.p() as i64));
        for (k, d) in dirs.iter().enumerate() {
            // z -> ωz conjugates f_λ to f_λ' with λ' = λ(ω^q)^p/ω, which lies on an
            // axis and is exact in floating point. Shell components accumulate on the
            // rays, so an ulp off the line is enough to land in one.
            let omega = unit_root(k as i64, 2 * params.q());
            let sign = if (k as u32 * params.p()) % 2 == 0 { 1.0 } else { -1.0 };
            let reduced = rot * sign;
            let residual = conjugacy_residual(params, *d, omega, reduced);
            cert.push(Measurement::new(
                format!("ray {k}: conjugacy to the axis ray, relative residual"),
                residual,
                0.0,
                1e-12,
            ));
            let shells = radii
                .par_iter()
                .filter(|&&r| {
                    classify_parameter(params, reduced * r, budget)
                        .shell_period()
                        .is_some()
                })
                .count();
            cert.push(Measurement::count(
                format!("ray {k} (arg {:.6}): shell samples among {samples}", d.arg()),
                shells,
                0,
            ));
            if (d.re != 0.0) && (d.im != 0.0) {
                let direct = radii
                    .par_iter()
                    .filter(|&&r| classify_parameter(params, d * r, budget).shell_period().is_some())
                    .count();
                cert.push(Measurement::new(
                    format!("ray {k}: shell samples at the rounded direction (informational)"),
                    direct as f64,
                    direct as f64,
                    f64::INFINITY,
                ));
            }
        }
        return Ok(cert);
    }
    // Large q packs centers densely toward r_max; the ones nearest the origin
    // are tested. The pole index m fixes |λ| = |π/2 + mπ|^{1/q}.
    let q = params.q() as usize;
    let k = (MAX_RAY_CENTERS / (2 * q) + 1) as i64;
    let mut centers: Vec<VirtualCenter> = period2_centers(params, -k - 1..=k)
        .into_iter()
        .filter(|c| c.lambda.norm() <= r_max)
        .collect();
    if centers.is_empty() {
        return Err(LabError::Inconclusive(format!("no order-2 center within radius {r_max}")));
    }
    centers.sort_by(|a, b| a.lambda.norm().total_cmp(&b.lambda.norm()));
    centers.truncate(MAX_RAY_CENTERS);
    let reach = r_max.powi(params.q() as i32);
    let m_count = ((reach - FRAC_PI_2) / PI).floor() - ((-reach - FRAC_PI_2) / PI).ceil() + 1.0;
    cert.push(Measurement::new(
        format!("order-2 centers tested, of {} within {r_max}", m_count.max(0.0) as usize * q),
        centers.len() as f64,
        centers.len() as f64,
        f64::INFINITY,
    ));
    for c in &centers {
        // Centers crowd together as |λ| grows; stay well inside the neighbour gap.
        let gap = centers
            .iter()
            .filter(|o| o.lambda != c.lambda)
            .map(|o| (o.lambda - c.lambda).norm())
            .fold(f64::INFINITY, f64::min);
        let base = (0.02 * c.lambda.norm().min(1.0)).min(0.25 * gap);
        let unit = c.lambda / c.lambda.norm();
        let mode = |class: &ParamClass| match class {
            ParamClass::Shell {
                period: 2,
                raw_period: 2,
                mode: Some(CycleMode::TwoCycles),
                ..
            } => Some("two"),
            ParamClass::Shell {
                period: 2,
                raw_period: 4,
                mode: Some(CycleMode::DoubledCycle),
                ..
            } => Some("doubled"),
            _ => None,
        };
        // The lemma is local: components shrink as |m| grows, so the offset
        // shrinks until both sides sit in components at this center.
        let mut verdict = None;
        for shrink in FLANK_SHRINK {
            let offset = base * shrink;
            let side = |s: f64| mode(&classify_parameter(params, c.lambda + unit * (s * offset), budget));
            let (outer, inner) = (side(1.0), side(-1.0));
            let ok = matches!(
                (outer, inner),
                (Some("two"), Some("doubled")) | (Some("doubled"), Some("two"))
            );
            verdict = Some((offset, outer, inner, ok));
            if ok {
                break;
            }
        }
        let (offset, outer, inner, ok) = verdict.expect("ladder is non-empty");
        cert.push(Measurement::holds(
            format!(
                "center {:.6} at offset {offset:.2e}: outer side {}, inner side {}",
                c.lambda,
                outer.unwrap_or("other"),
                inner.unwrap_or("other")
            ),
            ok,
        ));
    }
    Ok(cert)
}

/// Largest relative gap in `f_λ(ωζ) = ω f_λ'(ζ)` over a few radii on the ray and
/// a few test points.
fn conjugacy_residual(params: FamilyParams, dir: Complex64, omega: Complex64, reduced: Complex64) -> f64 {
    let zetas = [
        Complex64::new(0.3, 0.2),
        Complex64::new(-0.7, 0.45),
        Complex64::new(0.15, -0.9),
    ];
    let mut worst = 0.0f64;
    for r in [0.01, 0.5, 3.0] {
        for &zeta in &zetas {
            let (Ok(a), Ok(b)) = (
                eval(params, dir * r, omega * zeta),
                eval(params, reduced * r, zeta),
            ) else {
                continue;
            };
            worst = worst.max((a - omega * b).norm() / a.norm().max(f64::MIN_POSITIVE));
        }
    }
    worst
}

/// Period-two components with a cell in the 5×5 block around `center`, skipping
/// cells already claimed by an earlier flood.
fn s2_components_near(
    grid: &ParamGrid,
    center: Complex64,
    claimed: &mut [bool],
) -> Result<Vec<((usize, usize), ComponentReport)>, LabError> {
    let window = &grid.window;
    let is_s2 = |c: &ParamClass| c.shell_period() == Some(2);
    let (cx, cy) = window
        .cell_of(center)
        .ok_or_else(|| LabError::Invalid(format!("center {center} outside the window")))?;
    let mut found = Vec::new();
    for iy in cy.saturating_sub(2)..=(cy + 2).min(window.px_h - 1) {
        for ix in cx.saturating_sub(2)..=(cx + 2).min(window.px_w - 1) {
            let i = grid.index(ix, iy);
            if claimed[i] || !is_s2(&grid.cells[i]) {
                continue;
            }
            let comp = flood_component(grid, (ix, iy), is_s2)?;
            for &j in &comp.cells {
                claimed[j] = true;
            }
            found.push(((ix, iy), comp));
        }
    }
    Ok(found)
}

/// Pushes the boundedness and distance measurements; returns how many
/// components were large enough for the distance test.
fn push_component_measurements(
    cert: &mut Certificate,
    grid: &ParamGrid,
    center: Complex64,
    comps: &[((usize, usize), ComponentReport)],
) -> usize {
    let window = &grid.window;
    let cell = window.cell_size();
    let mut resolved = 0;
    for ((ix, iy), comp) in comps {
        cert.push(Measurement::holds(
            format!("component at ({ix},{iy}) near {center:.6}: {} cells, bounded", comp.count),
            !comp.touches_edge,
        ));
        // A few cells carry no shape; their distance-to-diameter ratio is set by
        // the pixel grid rather than the component.
        if comp.count < MIN_RESOLVED_CELLS {
            continue;
        }
        resolved += 1;
        let (x0, y0, x1, y1) = comp.bbox;
        let diameter = ((x1 - x0).max(y1 - y0) + 1) as f64 * cell;
        let reach = comp
            .cells
            .iter()
            .map(|&j| (grid.cell_center(j % window.px_w, j / window.px_w) - center).norm())
            .fold(0.0, f64::max);
        cert.push(Measurement::new(
            format!("component at ({ix},{iy}) near {center:.6}: max distance to center / diameter"),
            reach / diameter,
            1.0,
            1.0,
        ));
    }
    resolved
}

/// Boundedness of period-two components: every period-two component touching
/// an order-2 center inside `window` stays away from the window edge and within
/// twice its diameter of the center. As a control, a period-one component must
/// reach the edge.
pub fn check_s2_bounded(
    params: FamilyParams,
    window: &Window,
    budget: &OrbitBudget,
    image_path: Option<&Path>,
) -> Result<Certificate, LabError> {
    guard(params)?;
    let mut cert = Certificate::new("s2-bounded", params);
    let grid = render_parameter_plane(params, window, budget);
    if let Some(path) = image_path {
        write_image(&grid, &Colormap::default(), std::fs::File::create(path)?)?;
        cert.artifacts.push(path.display().to_string());
    }
    let reach = window.width.hypot(window.height) / 2.0 + window.center.norm();
    let centers: Vec<VirtualCenter> = period2_centers_within(params, reach)
        .into_iter()
        .filter(|c| window.contains(c.lambda))
        .collect();
    if centers.len() < 2 {
        return Err(LabError::Invalid("window must contain at least two order-2 centers".into()));
    }
    let cell = window.cell_size();
    let mut claimed = vec![false; grid.cells.len()];
    let mut detected = 0;
    for c in &centers {
        let comps = s2_components_near(&grid, c.lambda, &mut claimed)?;
        let mut local = None;
        if comps.iter().any(|(_, comp)| comp.touches_edge) {
            // The window clips this component; certify it on a window centred at λ*.
            for side in LOCAL_SIDES {
                let res = (((side / cell).round() as usize).clamp(64, 400)) | 1;
                let lw = Window::square(c.lambda, side, res)?;
                let lg = render_parameter_plane(params, &lw, budget);
                let lc = s2_components_near(&lg, c.lambda, &mut vec![false; lg.cells.len()])?;
                if !lc.iter().any(|(_, comp)| comp.touches_edge) {
                    local = Some((side, lg, lc));
                    break;
                }
            }
            let Some((side, lg, lc)) = local.take() else {
                return Err(LabError::Inconclusive(format!(
                    "period-two component near {:.6} touches the edge of every local window",
                    c.lambda
                )));
            };
            cert.push(Measurement::holds(
                format!("center {:.6}: clipped by the window, certified on a local window of side {side}", c.lambda),
                true,
            ));
            let resolved = push_component_measurements(&mut cert, &lg, c.lambda, &lc);
            detected += usize::from(resolved > 0);
            continue;
        }
        let resolved = push_component_measurements(&mut cert, &grid, c.lambda, &comps);
        detected += usize::from(resolved > 0);
    }
    if detected < 2 {
        return Err(LabError::Inconclusive(format!(
            "period-two components resolved at only {detected} centers"
        )));
    }
    cert.push(Measurement::count(
        format!("centers with a resolved period-two component (of {})", centers.len()),
        detected,
        detected,
    ));
    let s1_seed = (0..grid.cells.len()).find(|&i| grid.cells[i].shell_period() == Some(1));
    let control = match s1_seed {
        Some(i) => {
            flood_component(&grid, (i % window.px_w, i / window.px_w), |c| {
                c.shell_period() == Some(1)
            })?
            .touches_edge
        }
        None => false,
    };
    cert.push(Measurement::holds("control: a period-one component touches the edge", control));
    Ok(cert)
}

/// Local structure at virtual centers: `2pq` period-`k` components around the
/// order-2 centers with `m = 0` and around one order-3 center, and period-`k`
/// parameters on three shrinking circles around them: radii 0.1, 0.01 and 0.001
/// at order 2, and `ρ, ρ/10, ρ/100` at order 3 with `ρ` the first entry of
/// [`RADIUS_LADDER`] that resolves all `2pq` components. Component counts at
/// order 2 use 0.05 (`q = 1`) or 0.02, shrinking along the ladder when other
/// centers crowd in.
///
/// The order-3 center is the one with `m = 0` nearest the origin among the
/// Newton roots from a 16×16 seed grid on `[−4, 4]²`.
pub fn check_centers(params: FamilyParams, budget: &OrbitBudget) -> Result<Certificate, LabError> {
    guard(params)?;
    let mut cert = Certificate::new("centers", params);
    let expected = 2 * params.pq() as usize;
    let radius: f64 = if params.q() == 1 { 0.05 } else { 0.02 };
    let window = Window::square(Complex64::new(0.0, 0.0), 8.0, 16)?;
    let order3 = search_centers(params, 3, &window)?;
    let chosen = order3
        .iter()
        .filter(|c| c.pole.m == 0)
        .min_by(|a, b| a.lambda.norm().total_cmp(&b.lambda.norm()))
        .copied()
        .ok_or_else(|| LabError::Inconclusive("no order-3 center found".into()))?;
    let mut targets = period2_centers(params, 0..=0);
    targets.push(chosen);
    for c in &targets {
        // Components can be much smaller than the nominal radius, and other centers
        // may crowd in; use the largest ladder radius at which the local structure
        // is resolved.
        let limit = radius_limit(params, c, &order3);
        let ladder: Vec<f64> = if c.order == 2 {
            std::iter::once(radius)
                .chain(RADIUS_LADDER.into_iter().filter(|&rho| rho < radius))
                .filter(|&rho| rho < 0.9 * limit)
                .collect()
        } else {
            RADIUS_LADDER.into_iter().filter(|&rho| rho <= 0.25 * limit).collect()
        };
        let mut found = None;
        for rho in ladder {
            let n = count_components_at_center(params, c, rho, 720, &order3, budget)?;
            if n == expected {
                found = Some((rho, n));
                break;
            }
            found.get_or_insert((rho, n));
        }
        let (r, n) = found.ok_or_else(|| {
            LabError::Inconclusive(format!("order-{} center {:.6} is crowded by others", c.order, c.lambda))
        })?;
        let radii = if c.order == 2 { [0.1, 0.01, 0.001] } else { [r, r / 10.0, r / 100.0] };
        cert.push(Measurement::count(
            format!("order {} center {:.6} (residual {:.1e}): components at r={r:.4}", c.order, c.lambda, c.residual),
            n,
            expected,
        ));
        cert.push(Measurement::holds(
            format!(
                "order {} center {:.6}: period {} on circles r = {:.1e}, {:.1e}, {:.1e}",
                c.order, c.lambda, c.order, radii[0], radii[1], radii[2]
            ),
            verify_attracting_nearby(params, c.lambda, c.order, &radii, budget),
        ));
        cert.push(Measurement::new(
            format!("order {} center {:.6}: residual", c.order, c.lambda),
            c.residual,
            0.0,
            1e-10,
        ));
    }
    Ok(cert)
}

/// Settings shared by [`run_suite`].
#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub budget: OrbitBudget,
    pub seed: u64,
    pub symmetry_samples: usize,
    pub multiplier_samples: usize,
    pub scan_samples: usize,
    pub boundary_samples: usize,
    pub ray_samples: usize,
    pub s2_resolution: usize,
    /// Certificates (and images) are written here when set.
    pub out_dir: Option<PathBuf>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            budget: OrbitBudget::default(),
            seed: DEFAULT_SEED,
            symmetry_samples: 500,
            multiplier_samples: 100,
            scan_samples: 3600,
            boundary_samples: 200,
            ray_samples: 500,
            s2_resolution: 800,
            out_dir: None,
        }
    }
}

#[derive(Debug)]
pub struct SuiteReport {
    pub certificates: Vec<Certificate>,
    /// Suites that could not produce a certificate.
    pub errors: Vec<(String, LabError)>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.errors.is_empty() && self.certificates.iter().all(|c| c.passed)
    }

    /// Any suite ended inconclusive.
    pub fn inconclusive(&self) -> bool {
        self.errors
            .iter()
            .any(|(_, e)| matches!(e, LabError::Inconclusive(_) | LabError::Center(CenterError::Inconclusive)))
    }
}

/// Radius used by the period-one structure suite: at least 10 and four times
/// the entry radius of the components.
pub fn default_scan_radius(params: FamilyParams) -> f64 {
    (4.0 * s1_entry_radius(params)).max(10.0)
}

fn run_one(params: FamilyParams, name: &str, cfg: &SuiteConfig) -> Result<Certificate, LabError> {
    let b = &cfg.budget;
    match name {
        "symmetry" => check_symmetries(params, cfg.symmetry_samples, cfg.seed, b),
        "multipliers" => check_multipliers(params, cfg.multiplier_samples, cfg.seed, b),
        "s1-structure" => check_s1_structure(params, &[default_scan_radius(params)], cfg.scan_samples, b),
        "s1-boundary" => check_s1_boundary(params, cfg.boundary_samples, b),
        "separating-rays" => check_separating_rays(params, 10.0, cfg.ray_samples, b),
        "s2-bounded" => {
            let half = if params.q() == 1 { 4.0 } else { 3.0 };
            let window = Window::square(Complex64::new(0.0, 0.0), 2.0 * half, cfg.s2_resolution)?;
            let image = match &cfg.out_dir {
                Some(dir) => {
                    std::fs::create_dir_all(dir)?;
                    Some(dir.join(format!("s2_bounded_p{}_q{}.ppm", params.p(), params.q())))
                }
                None => None,
            };
            check_s2_bounded(params, &window, b, image.as_deref())
        }
        "centers" => check_centers(params, b),
        other => Err(LabError::UnknownSuite { name: other.into() }),
    }
}

/// Runs the named suites in order. Unknown names are rejected before anything
/// runs; a suite that errors is recorded and the rest still run.
pub fn run_suite(params: FamilyParams, names: &[&str], cfg: &SuiteConfig) -> Result<SuiteReport, LabError> {
    guard(params)?;
    if let Some(bad) = names.iter().find(|n| !SUITES.contains(n)) {
        return Err(LabError::UnknownSuite { name: bad.to_string() });
    }
    let mut report = SuiteReport {
        certificates: Vec::new(),
        errors: Vec::new(),
    };
    for name in names {
        match run_one(params, name, cfg) {
            Ok(cert) => {
                if let Some(dir) = &cfg.out_dir {
                    cert.write_to(dir)?;
                }
                report.certificates.push(cert);
            }
            Err(e) => report.errors.push((name.to_string(), e)),
        }
    }
    Ok(report)
}
