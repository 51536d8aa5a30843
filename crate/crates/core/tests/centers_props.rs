use std::f64::consts::PI;

use num_complex::Complex64;
use tanpq::centers::{
    count_components_at_center, newton_trace, period2_centers, pole_near, search_centers, verify_attracting_nearby,
    VirtualCenter,
};
use tanpq::family::{eval, free_asymptotic_value, unit_root};
use tanpq::orbit::{classify_parameter, OrbitBudget, ParamClass};
use tanpq::render::Window;
use tanpq::FamilyParams;

fn fp(p: u32, q: u32) -> FamilyParams {
    FamilyParams::new(p, q).unwrap()
}

/// Distance of `f^{order−2}(v_λ)` from the nearest pole.
fn pole_defect(params: FamilyParams, lambda: Complex64, order: u32) -> f64 {
    let mut z = free_asymptotic_value(params, lambda);
    for _ in 0..order - 2 {
        z = eval(params, lambda, z).unwrap();
    }
    (pole_near(params, z).location - z).norm()
}

fn symmetry_images(params: FamilyParams, lambda: Complex64) -> Vec<Complex64> {
    let mut out = vec![lambda.conj()];
    out.extend((1..params.q() as i64).map(|k| unit_root(k, params.q()) * lambda));
    if params.pq_even() {
        out.push(-lambda);
    }
    out
}

#[test]
fn order_two_centers_of_the_tangent_family() {
    let params = fp(1, 1);
    let budget = OrbitBudget::default();
    let centers = period2_centers(params, -3..=3);
    assert_eq!(centers.len(), 7);
    for (c, m) in centers.iter().zip(-3..=3) {
        let expected = Complex64::new(0.0, -(PI / 2.0 + m as f64 * PI));
        assert!((c.lambda - expected).norm() < 1e-12);
        assert!(c.residual < 1e-12);
        assert_eq!(classify_parameter(params, c.lambda, &budget), ParamClass::VirtualCycle { order: 1 });
    }
}

#[test]
fn order_two_centers_classify_as_virtual_cycles() {
    let budget = OrbitBudget::default();
    for (p, q) in [(2, 1), (1, 2), (1, 3), (2, 3), (3, 2)] {
        let params = fp(p, q);
        for c in period2_centers(params, -2..=2) {
            assert_eq!(
                classify_parameter(params, c.lambda, &budget),
                ParamClass::VirtualCycle { order: 1 },
                "({p},{q}) at {}",
                c.lambda
            );
        }
    }
}

#[test]
fn center_sets_are_closed_under_the_symmetries() {
    for (p, q) in [(1, 1), (1, 2), (2, 3)] {
        let params = fp(p, q);
        for c in period2_centers(params, -2..=2) {
            for image in symmetry_images(params, c.lambda) {
                assert!(pole_defect(params, image, 2) < 1e-10, "({p},{q}) image {image}");
            }
        }
        let window = Window::square(Complex64::new(0.0, 0.0), 3.0, 15).unwrap();
        let found = search_centers(params, 3, &window).unwrap();
        assert!(!found.is_empty());
        for c in &found {
            assert!(c.residual < 1e-10);
            for image in symmetry_images(params, c.lambda) {
                assert!(pole_defect(params, image, 3) < 1e-10, "({p},{q}) image {image}");
            }
        }
    }
}

#[test]
fn newton_converges_quadratically() {
    for (p, q) in [(1, 1), (1, 2), (2, 1)] {
        let params = fp(p, q);
        let window = Window::square(Complex64::new(0.0, 0.0), 3.0, 15).unwrap();
        let found = search_centers(params, 3, &window).unwrap();
        // The most isolated root, so a seed 0.1 away stays in its basin.
        let isolation = |c: &VirtualCenter| {
            found
                .iter()
                .map(|o| (o.lambda - c.lambda).norm())
                .filter(|d| *d > 0.0)
                .fold(f64::INFINITY, f64::min)
        };
        let root = *found
            .iter()
            .max_by(|a, b| isolation(a).total_cmp(&isolation(b)))
            .unwrap();
        let seed = root.lambda + Complex64::from_polar(0.1, 0.7);
        let (found, trace) = newton_trace(params, 3, root.pole, seed).unwrap();
        assert!((found.lambda - root.lambda).norm() < 1e-9);
        // Steps above the rounding floor must at least square the residual, up to a constant.
        let steps: Vec<(f64, f64)> = trace
            .windows(2)
            .map(|w| (w[0], w[1]))
            .filter(|(a, b)| *a < 0.05 && *b > 1e-13)
            .collect();
        assert!(steps.len() >= 2, "({p},{q}) trace {trace:?}");
        for (a, b) in steps.iter().rev().take(3) {
            assert!(*b <= 10.0 * a * a, "({p},{q}) {a} -> {b}");
        }
    }
}

#[test]
fn components_meeting_at_order_two_centers() {
    let budget = OrbitBudget::default();
    for (p, q, expected) in [(1, 1, 2), (1, 2, 4), (1, 3, 6), (3, 1, 6)] {
        let params = fp(p, q);
        let center = period2_centers(params, 0..=0)[0];
        let radius = if q == 1 { 0.05 } else { 0.02 };
        let n = count_components_at_center(params, &center, radius, 720, &[], &budget).unwrap();
        assert_eq!(n, expected, "({p},{q})");
    }
}

#[test]
fn attracting_cycles_near_centers_only() {
    let params = fp(1, 1);
    let budget = OrbitBudget::default();
    let center = Complex64::new(0.0, -PI / 2.0);
    assert!(verify_attracting_nearby(params, center, 2, &[0.1, 0.01, 0.001], &budget));
    // Asking for period three at an order-two center fails.
    assert!(!verify_attracting_nearby(params, center, 3, &[0.001], &budget));
    // A generic parameter deep inside the period-one region sees no period two.
    assert!(!verify_attracting_nearby(params, Complex64::new(3.0, 0.0), 2, &[0.01, 0.001], &budget));
}
