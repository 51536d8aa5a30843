//! Evaluation kernel for the family `f(z) = λ·tan^p(z^q)`.
//!
//! Orbits of this family spend most of their time either near the poles of
//! `tan` or deep inside the asymptotic tracts where `|Im z^q|` is in the
//! thousands, so every formula here is written against `u = e^{2iw}` (or its
//! mirror) whose modulus never exceeds one.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Points farther than this from the origin are not evaluated unless they sit
/// deep in an asymptotic tract.
pub const MAGNITUDE_LIMIT: f64 = 1e8;

/// Beyond this `|Im w|`, `tan w = ±i` to full precision, so the rounding of
/// `Re w` at large `|z|` no longer matters.
pub const DEEP_TRACT_IM: f64 = 20.0;

/// Distance in the `w = z^q` plane below which `w` counts as a pole or zero of `tan`.
pub const PROXIMITY_TOL: f64 = 1e-12;

/// Above this `|Im 2w|` the multiplier formulas switch to the log-space form.
const LOG_SPACE_CUTOFF: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("argument lies on a pole of tan")]
    PoleHit,
    #[error("|z| exceeds {MAGNITUDE_LIMIT:e} outside the asymptotic tracts")]
    Overflow,
    #[error("degenerate input: z = 0 or tan(z^q) = 0")]
    Degenerate,
    #[error("sin(2z^q) vanishes; the multiplier is singular")]
    SingularMultiplier,
    #[error("invalid family parameters p = {p}, q = {q}")]
    InvalidParams { p: u32, q: u32 },
}

/// The exponent pair `(p, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct FamilyParams {
    p: u32,
    q: u32,
}

#[derive(Deserialize)]
struct RawParams {
    p: u32,
    q: u32,
}

impl TryFrom<RawParams> for FamilyParams {
    type Error = KernelError;

    fn try_from(raw: RawParams) -> Result<Self, KernelError> {
        Self::new(raw.p, raw.q)
    }
}

impl FamilyParams {
    pub fn new(p: u32, q: u32) -> Result<Self, KernelError> {
        if p == 0 || q == 0 {
            return Err(KernelError::InvalidParams { p, q });
        }
        Ok(Self { p, q })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn pq(&self) -> u32 {
        self.p * self.q
    }

    pub fn pq_even(&self) -> bool {
        self.pq() % 2 == 0
    }

    pub fn pq_odd(&self) -> bool {
        !self.pq_even()
    }
}

impl std::fmt::Display for FamilyParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "p={} q={}", self.p, self.q)
    }
}

/// A pole of `tan^p(z^q)`: the `j`-th `q`-th root of `π/2 + mπ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pole {
    pub m: i64,
    pub j: u32,
    pub location: Complex64,
}

/// `i^k` without rounding.
pub fn i_pow(k: i64) -> Complex64 {
    match k.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// `e^{2πi·k/n}`, exact on the axes.
pub fn unit_root(k: i64, n: u32) -> Complex64 {
    let n = n as i64;
    let k = k.rem_euclid(n);
    if (4 * k) % n == 0 {
        return i_pow(4 * k / n);
    }
    Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64)
}

/// Principal `q`-th root (argument in `(−π/q, π/q]`) rotated to branch `j`.
pub fn root_branch(w: Complex64, q: u32, j: i64) -> Complex64 {
    if q == 1 {
        return w;
    }
    let r = w.norm().powf(1.0 / q as f64);
    let arg = w.im.atan2(w.re);
    // atan2 returns −π for (−x, −0.0); the principal branch wants +π.
    let arg = if arg <= -PI { PI } else { arg };
    Complex64::from_polar(r, arg / q as f64) * unit_root(j, q)
}

/// Distance from `w` to the nearest real pole `π/2 + mπ`, with that `m`.
pub fn nearest_pole(w: Complex64) -> (i64, f64) {
    let m = round_fast((w.re - FRAC_PI_2) / PI);
    let base = FRAC_PI_2 + m * PI;
    // |w.re − base| ≤ π/2, so only an infinite distance can overflow.
    (m as i64, Complex64::new(w.re - base, w.im).norm_sqr().sqrt())
}

/// Nearest integer; avoids the libm call behind `f64::round` on targets without
/// a rounding instruction. Exact halves may round to even.
#[inline]
fn round_fast(x: f64) -> f64 {
    const SHIFT: f64 = 6_755_399_441_055_744.0; // 1.5 · 2^52
    if x.abs() < 4.0e15 {
        (x + SHIFT) - SHIFT
    } else {
        x.round()
    }
}

/// Distance from `w` to the nearest real zero `mπ` of `tan`.
pub fn nearest_zero(w: Complex64) -> f64 {
    let m = round_fast(w.re / PI);
    Complex64::new(w.re - m * PI, w.im).norm()
}

/// `e^{a+2ix} − 1` with full relative accuracy near zero.
fn expm1_c(a: f64, x: f64) -> Complex64 {
    // One sincos of the half angle: cos 2x = 1 − 2sin²x, sin 2x = 2 sin x cos x.
    let (s, c) = x.sin_cos();
    let two_s2 = 2.0 * s * s;
    Complex64::new(a.exp_m1() * (1.0 - two_s2) - two_s2, a.exp() * (2.0 * s * c))
}

/// Upper-half-plane kernel: returns `(tan w, u + 1)` for `Im w ≥ 0`, `u = e^{2iw}`.
fn tan_upper(w: Complex64) -> (Complex64, Complex64) {
    // |u| ≤ 1; tan w = −i(u − 1)/(u + 1).
    let em1 = expm1_c(-2.0 * w.im, w.re);
    let up1 = em1 + 2.0;
    (Complex64::new(0.0, -1.0) * em1 / up1, up1)
}

/// `(tan w, sec² w)` for `Im w ≥ 0`; `sec² w = 4u/(u + 1)²`.
fn tan_sec2_upper(w: Complex64) -> (Complex64, Complex64) {
    let (tan, up1) = tan_upper(w);
    let u = Complex64::from_polar((-2.0 * w.im).exp(), 2.0 * w.re);
    (tan, 4.0 * u / (up1 * up1))
}

fn check_tan_argument(w: Complex64) -> Result<(), KernelError> {
    if !(w.re.is_finite() && w.im.is_finite()) {
        return Err(KernelError::Overflow);
    }
    if nearest_pole(w).1 < PROXIMITY_TOL {
        return Err(KernelError::PoleHit);
    }
    Ok(())
}

/// `(tan w, sec² w)` evaluated without overflow for any `Im w`.
pub fn tan_sec2(w: Complex64) -> Result<(Complex64, Complex64), KernelError> {
    check_tan_argument(w)?;
    if w.im == 0.0 {
        // Keeps real orbits exactly on the real line.
        let c = w.re.cos();
        return Ok((
            Complex64::new(w.re.tan(), 0.0),
            Complex64::new(1.0 / (c * c), 0.0),
        ));
    }
    if w.im >= 0.0 {
        Ok(tan_sec2_upper(w))
    } else {
        let (t, s) = tan_sec2_upper(w.conj());
        Ok((t.conj(), s.conj()))
    }
}

/// Overflow-free complex tangent.
pub fn stable_tan(w: Complex64) -> Result<Complex64, KernelError> {
    check_tan_argument(w)?;
    Ok(tan_off_poles(w))
}

/// [`stable_tan`] for a finite `w` already known to be away from the poles.
#[inline]
pub(crate) fn tan_off_poles(w: Complex64) -> Complex64 {
    if w.im == 0.0 {
        Complex64::new(w.re.tan(), 0.0)
    } else if w.im > 0.0 {
        tan_upper(w).0
    } else {
        tan_upper(w.conj()).0.conj()
    }
}

fn check_finite(z: Complex64) -> Result<(), KernelError> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(KernelError::Overflow)
    }
}

/// Returns `w = z^q` when `z` may be evaluated.
#[inline]
pub(crate) fn checked_power(z: Complex64, q: u32) -> Result<Complex64, KernelError> {
    let w = z.powu(q);
    let inside = z.norm_sqr() <= MAGNITUDE_LIMIT * MAGNITUDE_LIMIT;
    if !(w.re.is_finite() && w.im.is_finite()) || !(inside || w.im.abs() > DEEP_TRACT_IM) {
        Err(KernelError::Overflow)
    } else {
        Ok(w)
    }
}

/// `f_λ(z) = λ·tan^p(z^q)`.
pub fn eval(params: FamilyParams, lambda: Complex64, z: Complex64) -> Result<Complex64, KernelError> {
    let t = stable_tan(checked_power(z, params.q)?)?;
    Ok(lambda * t.powu(params.p))
}

/// `f_λ'(z) = λ·p·q·z^{q−1}·tan^{p−1}(z^q)·(1 + tan²(z^q))`.
pub fn eval_derivative(
    params: FamilyParams,
    lambda: Complex64,
    z: Complex64,
) -> Result<Complex64, KernelError> {
    let (t, sec2) = tan_sec2(checked_power(z, params.q)?)?;
    let pq = params.pq() as f64;
    Ok(lambda * pq * z.powu(params.q - 1) * t.powu(params.p - 1) * sec2)
}

/// Value and derivative in one pass; used by the orbit engine.
pub(crate) fn eval_with_derivative(
    params: FamilyParams,
    lambda: Complex64,
    z: Complex64,
) -> Result<(Complex64, Complex64), KernelError> {
    let w = checked_power(z, params.q)?;
    let zq1 = z.powu(params.q - 1);
    let (t, sec2) = tan_sec2(w)?;
    let tp1 = t.powu(params.p - 1);
    let pq = params.pq() as f64;
    Ok((lambda * tp1 * t, lambda * pq * zq1 * tp1 * sec2))
}

/// The free asymptotic value `v_λ = i^p·λ`.
pub fn free_asymptotic_value(params: FamilyParams, lambda: Complex64) -> Complex64 {
    i_pow(params.p as i64) * lambda
}

/// The second asymptotic value `−i^p·λ`, distinct from `v_λ` only when `pq` is odd.
pub fn companion_asymptotic_value(params: FamilyParams, lambda: Complex64) -> Option<Complex64> {
    params
        .pq_odd()
        .then(|| -free_asymptotic_value(params, lambda))
}

pub fn pole_location(params: FamilyParams, m: i64, j: u32) -> Pole {
    let base = Complex64::new(FRAC_PI_2 + m as f64 * PI, 0.0);
    Pole {
        m,
        j,
        location: root_branch(base, params.q, j as i64),
    }
}

/// The unique `λ` for which `z` is a fixed point: `λ = z / tan^p(z^q)`.
///
/// Closed form, so unlike iteration it accepts any finite `z`.
pub fn lambda_of_fixed_point(params: FamilyParams, z: Complex64) -> Result<Complex64, KernelError> {
    check_finite(z)?;
    let w = z.powu(params.q);
    if z == Complex64::new(0.0, 0.0) || nearest_zero(w) < PROXIMITY_TOL {
        return Err(KernelError::Degenerate);
    }
    let t = stable_tan(w)?;
    Ok(z / t.powu(params.p))
}

/// `ln(w / sin 2w)` as `(ln|·|, arg)`, safe for any `|Im w|`.
pub(crate) fn log_ratio(w: Complex64) -> Result<(f64, f64), KernelError> {
    if w == Complex64::new(0.0, 0.0) {
        return Err(KernelError::Degenerate);
    }
    let s = 2.0 * w;
    if nearest_zero(s) < PROXIMITY_TOL {
        return Err(KernelError::SingularMultiplier);
    }
    if s.im.abs() <= LOG_SPACE_CUTOFF {
        let r = w / s.sin();
        return Ok((r.norm().ln(), r.arg()));
    }
    // 1/sin s = −2i·e^{is}/(1 − e^{2is}) for Im s > 0; mirror for Im s < 0.
    let (sm, flip) = if s.im > 0.0 { (s, false) } else { (s.conj(), true) };
    let wm = if flip { w.conj() } else { w };
    let e2 = Complex64::from_polar((-2.0 * sm.im).exp(), 2.0 * sm.re);
    let denom = Complex64::new(1.0, 0.0) - e2;
    let ln_mag = wm.norm().ln() + 2f64.ln() - sm.im - denom.norm().ln();
    let arg = wm.arg() - std::f64::consts::FRAC_PI_2 + sm.re - denom.arg();
    Ok(if flip { (ln_mag, -arg) } else { (ln_mag, arg) })
}

/// Multiplier of a fixed point: `2pq·z^q / sin(2z^q)`.
pub fn fixed_point_multiplier(params: FamilyParams, z: Complex64) -> Result<Complex64, KernelError> {
    check_finite(z)?;
    let (ln_mag, arg) = log_ratio(z.powu(params.q))?;
    let ln_mag = ln_mag + (2.0 * params.pq() as f64).ln();
    Ok(Complex64::from_polar(ln_mag.exp(), arg))
}
