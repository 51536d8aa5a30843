//! Virtual cycle parameters: `λ` for which the free asymptotic value lands on
//! a pole, and the local structure of shell components around them.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::family::{
    eval, free_asymptotic_value, i_pow, nearest_pole, pole_location, FamilyParams, KernelError,
    Pole,
};
use crate::orbit::{classify_parameter, CycleMode, OrbitBudget, ParamClass};
use crate::render::{cyclic_runs, sample_circle, Window};

/// Highest center order handled by the solvers.
pub const MAX_ORDER: u32 = 5;
/// Accepted residual `|f^{k−2}(v_λ) − pole|`.
pub const CENTER_TOL: f64 = 1e-10;
/// Roots closer than this are the same center.
pub const DEDUP_TOL: f64 = 1e-8;
const NEWTON_STEPS: usize = 60;
/// An intermediate iterate this close to a pole means a lower order.
const COLLAPSE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CenterError {
    #[error("order {0} is outside the supported range 3..={MAX_ORDER}")]
    InvalidOrder(u32),
    #[error("Newton iteration did not converge in {steps} steps (residual {residual:e})")]
    NoConvergence { steps: usize, residual: f64 },
    #[error("converged to a center of order {found}, not {requested}")]
    WrongOrder { requested: u32, found: u32 },
    #[error("radius {radius} exceeds half the distance {limit} to the nearest other center")]
    RadiusTooLarge { radius: f64, limit: f64 },
    #[error("every circle sample is undecided")]
    Inconclusive,
    #[error("invalid sampling: {0}")]
    InvalidSampling(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// A parameter whose free asymptotic value is a prepole of order `order − 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VirtualCenter {
    /// Period of the shell components meeting at the center.
    pub order: u32,
    pub lambda: Complex64,
    /// The pole reached by `f^{order−2}(v_λ)`.
    pub pole: Pole,
    pub residual: f64,
    pub root_branch: u32,
}

/// The pole of `tan^p(z^q)` nearest to `z`, with its distance.
pub fn pole_near(params: FamilyParams, z: Complex64) -> Pole {
    let (m, _) = nearest_pole(z.powu(params.q()));
    (0..params.q())
        .map(|j| pole_location(params, m, j))
        .min_by(|a, b| (a.location - z).norm().total_cmp(&(b.location - z).norm()))
        .expect("q >= 1")
}

/// All order-2 centers `λ = i^{−p}·root_j(π/2 + mπ)` for `m` in `m_range`.
pub fn period2_centers(
    params: FamilyParams,
    m_range: std::ops::RangeInclusive<i64>,
) -> Vec<VirtualCenter> {
    let rot = i_pow(-(params.p() as i64));
    m_range
        .flat_map(|m| (0..params.q()).map(move |j| (m, j)))
        .map(|(m, j)| {
            let pole = pole_location(params, m, j);
            let lambda = rot * pole.location;
            VirtualCenter {
                order: 2,
                lambda,
                pole,
                residual: (free_asymptotic_value(params, lambda) - pole.location).norm(),
                root_branch: j,
            }
        })
        .collect()
}

/// Order-2 centers with `|λ| ≤ radius`.
pub fn period2_centers_within(params: FamilyParams, radius: f64) -> Vec<VirtualCenter> {
    period2_centers_between(params, 0.0, radius)
}

/// Order-2 centers with `lo ≤ |λ| ≤ hi`.
pub fn period2_centers_between(params: FamilyParams, lo: f64, hi: f64) -> Vec<VirtualCenter> {
    // |λ|^q = π·|m + 1/2|.
    let q = params.q() as i32;
    let a = lo.max(0.0).powi(q) / PI;
    let b = hi.powi(q) / PI;
    let ms: std::collections::BTreeSet<i64> = ((-b - 0.5).floor() as i64..=(-a - 0.5).ceil() as i64)
        .chain((a - 0.5).floor() as i64..=(b - 0.5).ceil() as i64)
        .collect();
    ms.into_iter()
        .flat_map(|m| period2_centers(params, m..=m))
        .filter(|c| (lo..=hi).contains(&c.lambda.norm()))
        .collect()
}

/// `f_λ^{n}(v_λ)`.
fn asymptotic_orbit(params: FamilyParams, lambda: Complex64, n: u32) -> Result<Complex64, KernelError> {
    let mut z = free_asymptotic_value(params, lambda);
    for _ in 0..n {
        z = eval(params, lambda, z)?;
    }
    Ok(z)
}

/// Newton solve of `f^{k−2}(v_λ) = pole`, returning the residual after every step.
pub fn newton_trace(
    params: FamilyParams,
    order: u32,
    pole: Pole,
    seed: Complex64,
) -> Result<(VirtualCenter, Vec<f64>), CenterError> {
    if !(3..=MAX_ORDER).contains(&order) {
        return Err(CenterError::InvalidOrder(order));
    }
    let depth = order - 2;
    let g = |l: Complex64| asymptotic_orbit(params, l, depth).map(|z| z - pole.location);
    let mut lambda = seed;
    let mut value = g(lambda)?;
    let mut trace = vec![value.norm()];
    for _ in 0..NEWTON_STEPS {
        if value.norm() < 1e-14 * pole.location.norm().max(1.0) {
            break;
        }
        let h = 1e-7 * lambda.norm().max(1.0);
        let dh = Complex64::new(h, 0.0);
        let slope = (g(lambda + dh)? - g(lambda - dh)?) / (2.0 * h);
        let mut step = value / slope;
        if !(step.re.is_finite() && step.im.is_finite()) {
            break;
        }
        // Backtrack when the full step leaves the domain or grows the residual.
        let mut accepted = None;
        for _ in 0..12 {
            if let Ok(v) = g(lambda - step) {
                if v.norm() < value.norm() * 2.0 {
                    accepted = Some(v);
                    break;
                }
            }
            step *= 0.5;
        }
        let Some(v) = accepted else { break };
        let previous = value.norm();
        lambda -= step;
        value = v;
        trace.push(value.norm());
        // Stop once converged and rounding noise has taken over.
        let stalled = value.norm() < CENTER_TOL && value.norm() > 0.5 * previous;
        if stalled || step.norm() < 1e-16 * lambda.norm().max(1.0) {
            break;
        }
    }
    let residual = value.norm();
    if !(residual < CENTER_TOL) {
        return Err(CenterError::NoConvergence {
            steps: trace.len() - 1,
            residual,
        });
    }
    let mut z = free_asymptotic_value(params, lambda);
    for j in 0..depth {
        let w = z.powu(params.q());
        if nearest_pole(w).1 < COLLAPSE_TOL * w.norm().max(1.0) {
            return Err(CenterError::WrongOrder {
                requested: order,
                found: j + 2,
            });
        }
        z = eval(params, lambda, z)?;
    }
    Ok((
        VirtualCenter {
            order,
            lambda,
            pole,
            residual,
            root_branch: pole.j,
        },
        trace,
    ))
}

/// Center of order `k ≥ 3` whose orbit lands on `pole`, by Newton's method from `seed`.
pub fn find_virtual_center(
    params: FamilyParams,
    order: u32,
    pole: Pole,
    seed: Complex64,
) -> Result<VirtualCenter, CenterError> {
    newton_trace(params, order, pole, seed).map(|(c, _)| c)
}

/// Merges centers closer than [`DEDUP_TOL`], keeping the smaller residual, and
/// sorts by `(m, branch, re, im)`.
pub fn dedup_centers(mut centers: Vec<VirtualCenter>) -> Vec<VirtualCenter> {
    centers.sort_by(|a, b| a.residual.total_cmp(&b.residual));
    let mut kept: Vec<VirtualCenter> = Vec::new();
    for c in centers {
        if kept.iter().all(|k| (k.lambda - c.lambda).norm() >= DEDUP_TOL) {
            kept.push(c);
        }
    }
    kept.sort_by(|a, b| {
        (a.pole.m, a.root_branch)
            .cmp(&(b.pole.m, b.root_branch))
            .then(a.lambda.re.total_cmp(&b.lambda.re))
            .then(a.lambda.im.total_cmp(&b.lambda.im))
    });
    kept
}

/// Centers of `order` found by Newton from every cell center of `window`.
///
/// Each seed targets the pole nearest to `f^{k−2}(v_λ)`; seeds that fail are
/// dropped and roots outside the window discarded.
pub fn search_centers(params: FamilyParams, order: u32, window: &Window) -> Result<Vec<VirtualCenter>, CenterError> {
    if !(3..=MAX_ORDER).contains(&order) {
        return Err(CenterError::InvalidOrder(order));
    }
    let found: Vec<VirtualCenter> = (0..window.cell_count())
        .into_par_iter()
        .filter_map(|i| {
            let seed = window.cell_center(i % window.px_w, i / window.px_w);
            let target = asymptotic_orbit(params, seed, order - 2).ok()?;
            let pole = pole_near(params, target);
            find_virtual_center(params, order, pole, seed).ok()
        })
        .filter(|c| window.contains(c.lambda))
        .collect();
    Ok(dedup_centers(found))
}

/// Arc key: the S-index, mode and tract signature of a shell sample.
type ComponentKey = (u32, Option<CycleMode>, u32);

fn component_key(class: &ParamClass, order: u32) -> Option<ComponentKey> {
    match class {
        ParamClass::Shell {
            period,
            mode,
            tracts,
            ..
        } if *period == order => Some((*period, *mode, *tracts)),
        _ => None,
    }
}

/// Half the distance from `center` to the nearest other center, among the
/// order-2 centers and `known`.
pub fn radius_limit(params: FamilyParams, center: &VirtualCenter, known: &[VirtualCenter]) -> f64 {
    let others = |c: &VirtualCenter| {
        let d = (c.lambda - center.lambda).norm();
        (d > DEDUP_TOL).then_some(d)
    };
    let r = center.lambda.norm();
    let mut nearest = known.iter().filter_map(others).fold(f64::INFINITY, f64::min);
    if !nearest.is_finite() {
        // Any order-2 center on the closest circle bounds the search.
        let m = (r.powi(params.q() as i32) / PI - 0.5).round() as i64;
        nearest = period2_centers(params, m..=m + 1)
            .iter()
            .filter_map(others)
            .fold(f64::INFINITY, f64::min);
    }
    // Only centers in the annulus |c| ± nearest can be closer still.
    period2_centers_between(params, r - nearest, r + nearest)
        .iter()
        .filter_map(others)
        .fold(nearest, f64::min)
        / 2.0
}

/// Number of shell components of period `center.order` crossed by the circle
/// of `radius` around the center.
///
/// Arcs are keyed by S-index, mode and tract signature: the components meeting
/// at a center are separated by slivers far thinner than the sample spacing,
/// and only the tract holding the deep cycle point tells neighbours apart.
pub fn count_components_at_center(
    params: FamilyParams,
    center: &VirtualCenter,
    radius: f64,
    samples: usize,
    known: &[VirtualCenter],
    budget: &OrbitBudget,
) -> Result<usize, CenterError> {
    if !(radius > 0.0) || samples < 8 {
        return Err(CenterError::InvalidSampling(format!(
            "radius {radius}, {samples} samples"
        )));
    }
    let limit = radius_limit(params, center, known);
    if radius >= limit {
        return Err(CenterError::RadiusTooLarge { radius, limit });
    }
    let classes = sample_circle(params, center.lambda, radius, samples, budget);
    if classes.iter().all(ParamClass::is_undecided) {
        return Err(CenterError::Inconclusive);
    }
    let keys: Vec<Option<ComponentKey>> = classes
        .iter()
        .map(|c| component_key(c, center.order))
        .collect();
    Ok(cyclic_runs(&keys)
        .iter()
        .filter(|(k, _, _)| k.is_some())
        .count())
}

/// Whether every circle of the given radii around `center` meets a shell
/// component of period `order` (720 samples per circle).
pub fn verify_attracting_nearby(
    params: FamilyParams,
    center: Complex64,
    order: u32,
    radii: &[f64],
    budget: &OrbitBudget,
) -> bool {
    radii.iter().all(|&r| {
        (0..720usize).into_par_iter().any(|k| {
            let lambda = crate::render::circle_point(center, r, k, 720);
            classify_parameter(params, lambda, budget).shell_period() == Some(order)
        })
    })
}

pub const CENTERS_CSV_HEADER: &str = "order,m,branch,lambda_re,lambda_im,residual";

pub fn write_centers_csv<W: Write>(centers: &[VirtualCenter], out: W) -> std::io::Result<()> {
    let mut out = std::io::BufWriter::new(out);
    writeln!(out, "{CENTERS_CSV_HEADER}")?;
    for c in centers {
        writeln!(
            out,
            "{},{},{},{:.16e},{:.16e},{:.16e}",
            c.order, c.pole.m, c.root_branch, c.lambda.re, c.lambda.im, c.residual
        )?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, PI};

    use super::*;

    fn params(p: u32, q: u32) -> FamilyParams {
        FamilyParams::new(p, q).unwrap()
    }

    #[test]
    fn closed_form_examples() {
        let c = period2_centers(params(1, 1), 0..=0);
        assert_eq!(c.len(), 1);
        assert!((c[0].lambda - Complex64::new(0.0, -FRAC_PI_2)).norm() < 1e-15);

        let c = period2_centers(params(2, 1), 0..=0);
        assert!((c[0].lambda - Complex64::new(-FRAC_PI_2, 0.0)).norm() < 1e-15);

        let c = period2_centers(params(1, 2), 0..=0);
        assert_eq!(c.len(), 2);
        let s = FRAC_PI_2.sqrt();
        let mut ims: Vec<f64> = c.iter().map(|c| c.lambda.im).collect();
        ims.sort_by(f64::total_cmp);
        assert!((ims[0] + s).abs() < 1e-15 && (ims[1] - s).abs() < 1e-15);
        assert!(c.iter().all(|c| c.lambda.re.abs() < 1e-15));
    }

    #[test]
    fn closed_form_satisfies_defining_equation() {
        for (p, q) in [(1, 1), (2, 1), (1, 2), (2, 3), (1, 3)] {
            let fp = params(p, q);
            for c in period2_centers(fp, -3..=3) {
                let lhs = (i_pow(p as i64) * c.lambda).powu(q);
                let rhs = FRAC_PI_2 + c.pole.m as f64 * PI;
                assert!((lhs - rhs).norm() < 1e-12 * rhs.abs().max(1.0), "{c:?}");
                assert!(c.residual < 1e-12);
            }
        }
    }

    #[test]
    fn order_validation() {
        let fp = params(1, 1);
        let pole = pole_location(fp, 0, 0);
        let seed = Complex64::new(1.0, 1.0);
        assert_eq!(
            find_virtual_center(fp, 2, pole, seed),
            Err(CenterError::InvalidOrder(2))
        );
        assert_eq!(
            find_virtual_center(fp, 6, pole, seed),
            Err(CenterError::InvalidOrder(6))
        );
    }

    #[test]
    fn order_three_root_has_small_residual() {
        let fp = params(1, 1);
        let window = Window::square(Complex64::new(0.0, 0.0), 8.0, 12).unwrap();
        let centers = search_centers(fp, 3, &window).unwrap();
        assert!(!centers.is_empty());
        for c in &centers {
            // Direct oracle: f(iλ) against the pole it should hit.
            let v = Complex64::i() * c.lambda;
            let image = c.lambda * v.tan();
            let m = c.pole.m as f64;
            assert!((image - (FRAC_PI_2 + m * PI)).norm() < 1e-10, "{c:?}");
        }
        for pair in centers.windows(2) {
            assert!((pair[0].lambda - pair[1].lambda).norm() >= DEDUP_TOL);
        }
    }

    #[test]
    fn dedup_merges_close_roots() {
        let fp = params(1, 1);
        let base = period2_centers(fp, 0..=0)[0];
        let mut near = base;
        near.lambda += Complex64::new(1e-10, 0.0);
        near.residual = 1e-11;
        let mut far = base;
        far.lambda += Complex64::new(1e-3, 0.0);
        assert_eq!(dedup_centers(vec![near, base, far]).len(), 2);
    }

    #[test]
    fn radius_guard() {
        let fp = params(1, 1);
        let c = period2_centers(fp, 0..=0)[0];
        let limit = radius_limit(fp, &c, &[]);
        assert!((limit - FRAC_PI_2).abs() < 1e-12);
        let mut near = c;
        near.lambda += Complex64::new(0.1, 0.0);
        assert!((radius_limit(fp, &c, &[near]) - 0.05).abs() < 1e-12);
        assert!(matches!(
            count_components_at_center(fp, &c, 2.0, 720, &[], &OrbitBudget::default()),
            Err(CenterError::RadiusTooLarge { .. })
        ));
    }

    #[test]
    fn centers_csv_layout() {
        let c = period2_centers(params(1, 1), 0..=0);
        let mut buf = Vec::new();
        write_centers_csv(&c, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(CENTERS_CSV_HEADER));
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(&row[..3], &["2", "0", "0"]);
        assert_eq!(row[4].parse::<f64>().unwrap(), -FRAC_PI_2);
    }
}
