//! Orbit iteration, attracting-cycle detection and parameter classification.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::family::{
    self, eval_with_derivative, free_asymptotic_value, log_ratio, nearest_pole, FamilyParams,
    KernelError,
};

/// Tail scans run every this many iterations once warmup is over.
const SCAN_STRIDE: u32 = 8;
/// Newton iterations allowed per refinement.
const NEWTON_STEPS: usize = 50;
/// A detected cycle that fails refinement is retried this many times before giving up.
const REFINE_ATTEMPTS: u32 = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OrbitError {
    #[error("Newton refinement of the period-{period} cycle did not converge")]
    RefinementFailed { period: u32 },
    #[error("refined cycle points are not distinct")]
    Degenerate,
    #[error("invalid budget: {0}")]
    InvalidBudget(&'static str),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// Iteration limits and tolerances shared by every orbit computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitBudget {
    pub max_iter: u32,
    pub warmup: u32,
    pub max_period: u32,
    pub cycle_tol: f64,
    pub attract_tol: f64,
    pub zero_tol: f64,
    pub pole_tol: f64,
}

impl Default for OrbitBudget {
    fn default() -> Self {
        Self {
            max_iter: 2000,
            warmup: 500,
            max_period: 64,
            cycle_tol: 1e-9,
            attract_tol: 1e-12,
            zero_tol: 1e-10,
            pole_tol: 1e-12,
        }
    }
}

impl OrbitBudget {
    pub fn validate(&self) -> Result<(), OrbitError> {
        if self.max_iter == 0 || self.warmup == 0 || self.max_period == 0 {
            return Err(OrbitError::InvalidBudget("counts must be positive"));
        }
        if self.warmup >= self.max_iter {
            return Err(OrbitError::InvalidBudget("warmup must be below max_iter"));
        }
        let tols = [
            self.cycle_tol,
            self.attract_tol,
            self.zero_tol,
            self.pole_tol,
        ];
        if tols.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            return Err(OrbitError::InvalidBudget("tolerances must be positive"));
        }
        Ok(())
    }
}

/// A refined periodic cycle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleInfo {
    pub period: u32,
    /// `points[0]` is the refinement anchor; `points[i + 1] = f(points[i])`.
    pub points: Vec<Complex64>,
    pub multiplier: Complex64,
    /// Whether the point set equals its own negation (only ever set when `pq` is odd).
    pub self_symmetric: bool,
    /// `|f^n(z_0) − z_0|` after refinement.
    pub residual: f64,
}

impl CycleInfo {
    /// Bitmask of the asymptotic tracts holding the deepest cycle points.
    ///
    /// Tract `k` is the sector `kπ/q < arg z < (k + 1)π/q`; even `k` map into the
    /// upper half plane under `z ↦ z^q`. Points within a factor of two of the
    /// maximal `|Im z^q|` all contribute, so a cycle equal to its own negation
    /// records both of its tracts.
    pub fn tract_signature(&self, params: FamilyParams) -> u32 {
        let q = params.q();
        let depth: Vec<f64> = self
            .points
            .iter()
            .map(|z| z.powu(q).im.abs())
            .collect();
        let deepest = depth.iter().cloned().fold(0.0, f64::max);
        self.points
            .iter()
            .zip(&depth)
            .filter(|(_, d)| **d >= 0.5 * deepest)
            .fold(0u32, |mask, (z, _)| {
                let sector = (z.arg().rem_euclid(2.0 * PI) * q as f64 / PI).floor() as u32;
                mask | 1 << sector.min(2 * q - 1)
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum OrbitOutcome {
    Attracted(CycleInfo),
    CapturedByZero,
    /// The orbit reached a pole; `order` counts applications of `f` until infinity.
    PrepoleHit {
        order: u32,
    },
    Undecided,
}

/// How an odd-`pq` shell parameter splits its attracting dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CycleMode {
    /// Two cycles `C` and `−C` of the same period.
    TwoCycles,
    /// One cycle with `C = −C`, of twice the component period.
    DoubledCycle,
}

impl CycleMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            CycleMode::TwoCycles => "two",
            CycleMode::DoubledCycle => "doubled",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ParamClass {
    Shell {
        /// Component index `n` of the family `S_n`.
        period: u32,
        /// Length of the attracting cycle that captures `v_λ`.
        raw_period: u32,
        mode: Option<CycleMode>,
        multiplier: Complex64,
        /// See [`CycleInfo::tract_signature`].
        tracts: u32,
    },
    Capture,
    VirtualCycle {
        order: u32,
    },
    Undecided,
}

impl ParamClass {
    pub fn shell_period(&self) -> Option<u32> {
        match self {
            ParamClass::Shell { period, .. } => Some(*period),
            _ => None,
        }
    }

    pub fn multiplier(&self) -> Option<Complex64> {
        match self {
            ParamClass::Shell { multiplier, .. } => Some(*multiplier),
            _ => None,
        }
    }

    pub fn is_undecided(&self) -> bool {
        matches!(self, ParamClass::Undecided)
    }

    /// Equality of everything but the multiplier and tract signature.
    pub fn same_kind(&self, other: &ParamClass) -> bool {
        match (self, other) {
            (
                ParamClass::Shell {
                    period: a,
                    raw_period: ra,
                    mode: ma,
                    ..
                },
                ParamClass::Shell {
                    period: b,
                    raw_period: rb,
                    mode: mb,
                    ..
                },
            ) => a == b && ra == rb && ma == mb,
            (ParamClass::VirtualCycle { order: a }, ParamClass::VirtualCycle { order: b }) => a == b,
            (ParamClass::Capture, ParamClass::Capture) => true,
            (ParamClass::Undecided, ParamClass::Undecided) => true,
            _ => false,
        }
    }
}

fn scale(z: Complex64) -> f64 {
    z.norm().max(1.0)
}

fn zero_attracting(params: FamilyParams, lambda: Complex64) -> bool {
    params.pq() >= 2 || lambda.norm() < 1.0
}

/// One step of the map with the pole and magnitude checks used during iteration.
#[inline]
fn step(
    params: FamilyParams,
    lambda: Complex64,
    z: Complex64,
    pole_tol: f64,
) -> Result<Complex64, KernelError> {
    // checked_power leaves w finite; one pole test covers both tolerances.
    let w = family::checked_power(z, params.q())?;
    if nearest_pole(w).1 < pole_tol.max(family::PROXIMITY_TOL) {
        return Err(KernelError::PoleHit);
    }
    let t = family::tan_off_poles(w);
    Ok(lambda * t.powu(params.p()))
}

/// `f^n(z)` together with `(f^n)'(z)` by the chain rule.
fn orbit_with_derivative(
    params: FamilyParams,
    lambda: Complex64,
    z: Complex64,
    n: u32,
) -> Result<(Complex64, Complex64), KernelError> {
    let mut z = z;
    let mut d = Complex64::new(1.0, 0.0);
    for _ in 0..n {
        let (fz, dz) = eval_with_derivative(params, lambda, z)?;
        d *= dz;
        z = fz;
    }
    Ok((z, d))
}

fn orbit_n(
    params: FamilyParams,
    lambda: Complex64,
    z: Complex64,
    n: u32,
) -> Result<Complex64, KernelError> {
    (0..n).try_fold(z, |z, _| family::eval(params, lambda, z))
}

fn proper_divisors(n: u32) -> impl Iterator<Item = u32> {
    (1..n).filter(move |d| n % d == 0)
}

/// Closed-form cycle multiplier `(2pq)^n ∏ z_i^q / sin(2 z_i^q)`, summed in log space.
pub fn cycle_multiplier(params: FamilyParams, cycle: &CycleInfo) -> Result<Complex64, KernelError> {
    let (ln_mag, arg) = cycle_log_multiplier(params, cycle)?;
    Ok(Complex64::from_polar(ln_mag.exp(), arg))
}

/// `(ln|μ|, arg μ)` of a cycle; stays finite where `μ` itself underflows.
pub fn cycle_log_multiplier(params: FamilyParams, cycle: &CycleInfo) -> Result<(f64, f64), KernelError> {
    log_multiplier_of_points(params, &cycle.points)
}

fn log_multiplier_of_points(params: FamilyParams, points: &[Complex64]) -> Result<(f64, f64), KernelError> {
    let mut ln_mag = points.len() as f64 * (2.0 * params.pq() as f64).ln();
    let mut arg = 0.0;
    for z in points {
        let (m, a) = log_ratio(z.powu(params.q()))?;
        ln_mag += m;
        arg += a;
    }
    Ok((ln_mag, arg.rem_euclid(2.0 * PI)))
}

fn multiplier_of_points(params: FamilyParams, points: &[Complex64]) -> Result<Complex64, KernelError> {
    let (ln_mag, arg) = log_multiplier_of_points(params, points)?;
    Ok(Complex64::from_polar(ln_mag.exp(), arg))
}

/// Newton refinement of a period-`n` cycle through `z_seed`.
pub fn refine_cycle(
    params: FamilyParams,
    lambda: Complex64,
    z_seed: Complex64,
    period: u32,
    budget: &OrbitBudget,
) -> Result<CycleInfo, OrbitError> {
    let mut z = z_seed;
    let mut converged = false;
    for _ in 0..NEWTON_STEPS {
        let (fz, d) = orbit_with_derivative(params, lambda, z, period)?;
        let g = fz - z;
        if g.norm() < budget.attract_tol * scale(z) {
            converged = true;
            break;
        }
        let dz = g / (d - 1.0);
        if !(dz.re.is_finite() && dz.im.is_finite()) {
            break;
        }
        z -= dz;
    }
    if !converged {
        return Err(OrbitError::RefinementFailed { period });
    }

    for d in proper_divisors(period) {
        let back = orbit_n(params, lambda, z, d)?;
        if (back - z).norm() < 10.0 * budget.cycle_tol * scale(z) {
            return refine_cycle(params, lambda, z, d, budget);
        }
    }

    let mut points = Vec::with_capacity(period as usize);
    let mut p = z;
    for _ in 0..period {
        points.push(p);
        p = family::eval(params, lambda, p)?;
    }
    let residual = (p - z).norm();

    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            if (a - b).norm() <= 10.0 * budget.cycle_tol {
                return Err(OrbitError::Degenerate);
            }
        }
    }

    let self_symmetric = params.pq_odd()
        && period % 2 == 0
        && points.iter().all(|a| {
            points
                .iter()
                .any(|b| (a + b).norm() < 1e-6 * scale(*a))
        });

    let all_zero = points.iter().all(|p| p.norm() < budget.zero_tol);
    let multiplier = if all_zero {
        // Only the fixed point 0 lands here; its multiplier is f'(0).
        family::eval_derivative(params, lambda, Complex64::new(0.0, 0.0))?
    } else {
        multiplier_of_points(params, &points)?
    };

    Ok(CycleInfo {
        period,
        points,
        multiplier,
        self_symmetric,
        residual,
    })
}

/// Smallest `n` whose last three tail differences all sit below tolerance.
fn detect_period(ring: &[Complex64], newest: usize, max_period: u32, cycle_tol: f64) -> Option<u32> {
    let len = ring.len();
    let at = |back: usize| ring[(newest + len - back) % len];
    let recent: [(Complex64, f64); 3] = std::array::from_fn(|s| (at(s), (cycle_tol * scale(at(s))).powi(2)));
    'period: for n in 1..=max_period as usize {
        for (s, (a, limit)) in recent.iter().enumerate() {
            if (a - at(s + n)).norm_sqr() >= *limit {
                continue 'period;
            }
        }
        return Some(n as u32);
    }
    None
}

/// Iterates `z0` under `f_λ` and reports where the orbit goes.
pub fn iterate_orbit(
    params: FamilyParams,
    lambda: Complex64,
    z0: Complex64,
    budget: &OrbitBudget,
) -> OrbitOutcome {
    let ring_len = budget.max_period as usize + 3;
    let mut ring = vec![Complex64::new(0.0, 0.0); ring_len];
    let zero_attracts = zero_attracting(params, lambda);
    let zero_tol_sq = budget.zero_tol * budget.zero_tol;
    let mut attempts = 0;
    let mut z = z0;
    let mut slot = ring_len - 1;

    for t in 0..budget.max_iter {
        if zero_attracts && z.norm_sqr() < zero_tol_sq {
            return OrbitOutcome::CapturedByZero;
        }
        slot = if slot + 1 == ring_len { 0 } else { slot + 1 };
        ring[slot] = z;

        if t >= budget.warmup
            && (t - budget.warmup) % SCAN_STRIDE == 0
            && t as usize >= ring_len
            && attempts < REFINE_ATTEMPTS
        {
            if let Some(n) = detect_period(&ring, slot, budget.max_period, budget.cycle_tol) {
                attempts += 1;
                // Anchor on the image of the largest point: that image sits next to
                // v_λ, where evaluating f^n loses the least precision.
                let tail: Vec<Complex64> = (0..n as usize)
                    .map(|back| ring[(slot + ring_len - back) % ring_len])
                    .collect();
                let (deepest, _) = tail
                    .iter()
                    .enumerate()
                    .fold((0, -1.0), |best, (i, p)| if p.norm() > best.1 { (i, p.norm()) } else { best });
                let anchor = if deepest == 0 {
                    family::eval(params, lambda, tail[0]).unwrap_or(tail[0])
                } else {
                    tail[deepest - 1]
                };
                if let Ok(cycle) = refine_cycle(params, lambda, anchor, n, budget) {
                    if cycle.points.iter().all(|p| p.norm() < budget.zero_tol) {
                        return OrbitOutcome::CapturedByZero;
                    }
                    if cycle.multiplier.norm() < 1.0 {
                        return OrbitOutcome::Attracted(cycle);
                    }
                }
            }
        }

        match step(params, lambda, z, budget.pole_tol) {
            Ok(next) => z = next,
            Err(KernelError::PoleHit) => return OrbitOutcome::PrepoleHit { order: t + 1 },
            Err(_) => return OrbitOutcome::Undecided,
        }
    }
    OrbitOutcome::Undecided
}

/// Classifies `λ` by the fate of the free asymptotic value.
pub fn classify_parameter(params: FamilyParams, lambda: Complex64, budget: &OrbitBudget) -> ParamClass {
    if lambda == Complex64::new(0.0, 0.0) {
        return ParamClass::Undecided;
    }
    let v = free_asymptotic_value(params, lambda);
    class_of_outcome(params, iterate_orbit(params, lambda, v, budget))
}

/// Maps an orbit outcome of `v_λ` to a parameter class.
pub fn class_of_outcome(params: FamilyParams, outcome: OrbitOutcome) -> ParamClass {
    match outcome {
        OrbitOutcome::PrepoleHit { order } => ParamClass::VirtualCycle { order },
        OrbitOutcome::CapturedByZero => ParamClass::Capture,
        OrbitOutcome::Undecided => ParamClass::Undecided,
        OrbitOutcome::Attracted(cycle) => {
            let tracts = cycle.tract_signature(params);
            let (period, mode) = if params.pq_even() {
                (cycle.period, None)
            } else if cycle.self_symmetric {
                (cycle.period / 2, Some(CycleMode::DoubledCycle))
            } else {
                (cycle.period, Some(CycleMode::TwoCycles))
            };
            ParamClass::Shell {
                period,
                raw_period: cycle.period,
                mode,
                multiplier: cycle.multiplier,
                tracts,
            }
        }
    }
}
