use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use tanpq::family::{
    eval, eval_derivative, fixed_point_multiplier, lambda_of_fixed_point, nearest_pole,
    nearest_zero, stable_tan, unit_root,
};
use tanpq::FamilyParams;

fn complex(range: f64) -> impl Strategy<Value = Complex64> {
    (-range..range, -range..range).prop_map(|(re, im)| Complex64::new(re, im))
}

fn family() -> impl Strategy<Value = FamilyParams> {
    (1u32..=3, 1u32..=3).prop_map(|(p, q)| FamilyParams::new(p, q).unwrap())
}

/// Keeps samples where `tan(z^q)` is well conditioned: away from poles and zeros.
fn well_conditioned(fp: FamilyParams, z: Complex64) -> bool {
    let w = z.powu(fp.q());
    nearest_pole(w).1 > 0.2 && nearest_zero(w) > 0.2
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

proptest! {
    #[test]
    fn stable_tan_matches_naive_quotient(w in (-20.0..20.0f64, -5.0..5.0f64)) {
        let w = Complex64::new(w.0, w.1);
        prop_assume!(nearest_pole(w).1 > 1e-3 && nearest_zero(w) > 1e-3);
        let naive = w.sin() / w.cos();
        prop_assert!(rel(stable_tan(w).unwrap(), naive) < 1e-13);
    }

    #[test]
    fn derivative_matches_central_difference(fp in family(), lambda in complex(3.0), z in complex(1.3)) {
        prop_assume!(lambda.norm() > 0.1 && z.norm() > 0.1 && well_conditioned(fp, z));
        let h = 1e-6;
        let fd = (eval(fp, lambda, z + h).unwrap() - eval(fp, lambda, z - h).unwrap()) / (2.0 * h);
        let d = eval_derivative(fp, lambda, z).unwrap();
        prop_assert!(rel(d, fd) < 1e-6, "{} vs {}", d, fd);
    }

    #[test]
    fn fixed_point_roundtrip(fp in family(), z in complex(2.0)) {
        prop_assume!(z.norm() > 0.05 && well_conditioned(fp, z));
        let lambda = lambda_of_fixed_point(fp, z).unwrap();
        let back = eval(fp, lambda, z).unwrap();
        prop_assert!((back - z).norm() < 1e-12 * z.norm().max(1.0));
    }

    #[test]
    fn fixed_point_multiplier_is_the_derivative(fp in family(), z in complex(1.5)) {
        prop_assume!(z.norm() > 0.05 && well_conditioned(fp, z));
        let lambda = lambda_of_fixed_point(fp, z).unwrap();
        let mu = fixed_point_multiplier(fp, z).unwrap();
        let d = eval_derivative(fp, lambda, z).unwrap();
        prop_assert!(rel(mu, d) < 1e-10);
    }

    #[test]
    fn odd_symmetry_for_odd_pq(pq in prop_oneof![Just((1u32, 1u32)), Just((1, 3)), Just((3, 1))],
                               lambda in complex(3.0), z in complex(1.3)) {
        let fp = FamilyParams::new(pq.0, pq.1).unwrap();
        prop_assume!(well_conditioned(fp, z));
        let a = eval(fp, lambda, -z).unwrap();
        let b = -eval(fp, lambda, z).unwrap();
        prop_assert!(rel(a, b) < 1e-13);
        let da = eval_derivative(fp, lambda, -z).unwrap();
        let db = eval_derivative(fp, lambda, z).unwrap();
        prop_assert!(rel(da, db) < 1e-13);
    }

    #[test]
    fn rotation_law(fp in family(), k in 0i64..3, lambda in complex(3.0), z in complex(1.3)) {
        prop_assume!(well_conditioned(fp, z));
        let omega = unit_root(k, fp.q());
        let a = eval(fp, omega * lambda, omega * z).unwrap();
        let b = omega * eval(fp, lambda, z).unwrap();
        prop_assert!(rel(a, b) < 1e-13, "{}", rel(a, b));
    }

    #[test]
    fn conjugation_law(fp in family(), lambda in complex(3.0), z in complex(1.3)) {
        prop_assume!(well_conditioned(fp, z));
        let a = eval(fp, lambda.conj(), z.conj()).unwrap();
        let b = eval(fp, lambda, z).unwrap().conj();
        prop_assert!(rel(a, b) < 1e-13);
    }

    #[test]
    fn tract_limit(fp in family(), lambda in complex(5.0), x in -50.0..50.0f64, y in 20.5..400.0f64) {
        // z^q = x + iy lies in the upper tract.
        let z = tanpq::family::root_branch(Complex64::new(x, y), fp.q(), 0);
        let v = tanpq::family::free_asymptotic_value(fp, lambda);
        prop_assert!((eval(fp, lambda, z).unwrap() - v).norm() < 1e-12);
    }
}

#[test]
fn tan_on_the_real_axis_period() {
    for k in -3..=3 {
        let w = Complex64::new(0.3 + k as f64 * PI, 0.0);
        assert!(rel(stable_tan(w).unwrap(), Complex64::new(0.3f64.tan(), 0.0)) < 1e-14);
    }
}
