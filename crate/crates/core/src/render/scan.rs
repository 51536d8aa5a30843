use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::RenderError;
use crate::family::FamilyParams;
use crate::orbit::{classify_parameter, CycleMode, OrbitBudget, ParamClass};

/// Class summary used to merge circle samples into arcs; ignores multipliers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ArcClass {
    Shell {
        period: u32,
        raw_period: u32,
        mode: Option<CycleMode>,
    },
    Capture,
    VirtualCycle {
        order: u32,
    },
    Undecided,
}

impl From<&ParamClass> for ArcClass {
    fn from(class: &ParamClass) -> Self {
        match class {
            ParamClass::Shell {
                period,
                raw_period,
                mode,
                ..
            } => ArcClass::Shell {
                period: *period,
                raw_period: *raw_period,
                mode: *mode,
            },
            ParamClass::Capture => ArcClass::Capture,
            ParamClass::VirtualCycle { order } => ArcClass::VirtualCycle { order: *order },
            ParamClass::Undecided => ArcClass::Undecided,
        }
    }
}

impl ArcClass {
    pub fn shell_period(&self) -> Option<u32> {
        match self {
            ArcClass::Shell { period, .. } => Some(*period),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub class: ArcClass,
    /// In `[0, 2π)`.
    pub start: f64,
    /// `end − start` is the angular extent; may exceed `2π` for the arc through angle 0.
    pub end: f64,
    pub samples: usize,
}

impl Arc {
    pub fn mid(&self) -> f64 {
        (0.5 * (self.start + self.end)).rem_euclid(TAU)
    }

    /// Whether direction `theta` lies inside the arc.
    pub fn contains(&self, theta: f64) -> bool {
        let t = (theta - self.start).rem_euclid(TAU);
        t < self.end - self.start
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcReport {
    pub center: Complex64,
    pub radius: f64,
    pub samples: usize,
    pub arcs: Vec<Arc>,
}

impl ArcReport {
    pub fn shell_arcs(&self, period: u32) -> impl Iterator<Item = &Arc> {
        self.arcs
            .iter()
            .filter(move |a| a.class.shell_period() == Some(period))
    }
}

/// Angle of sample `k` of `n`, folded into `(−π, π]` so that samples `k` and
/// `n − k` are exact negatives.
pub(crate) fn sample_angle(k: usize, n: usize) -> f64 {
    if 2 * k <= n {
        TAU * k as f64 / n as f64
    } else {
        -(TAU * (n - k) as f64 / n as f64)
    }
}

pub(crate) fn circle_point(center: Complex64, radius: f64, k: usize, n: usize) -> Complex64 {
    if 2 * k == n {
        return center - radius;
    }
    let t = sample_angle(k, n);
    center + Complex64::new(radius * t.cos(), radius * t.sin())
}

/// Classes at `n` equally spaced points of the circle `|λ − center| = radius`,
/// starting at angle 0 and running counter-clockwise.
pub fn sample_circle(
    params: FamilyParams,
    center: Complex64,
    radius: f64,
    n: usize,
    budget: &OrbitBudget,
) -> Vec<ParamClass> {
    (0..n)
        .into_par_iter()
        .map(|k| classify_parameter(params, circle_point(center, radius, k, n), budget))
        .collect()
}

/// Maximal cyclic runs of equal keys as `(key, first index, length)`. A run
/// that wraps past the last sample is reported once, starting near the end.
pub fn cyclic_runs<K: PartialEq + Clone>(keys: &[K]) -> Vec<(K, usize, usize)> {
    let n = keys.len();
    if n == 0 {
        return Vec::new();
    }
    let Some(first_break) = (1..n).find(|&i| keys[i] != keys[i - 1]) else {
        return vec![(keys[0].clone(), 0, n)];
    };
    // With a break at `first_break`, a run starts there and every run is
    // delimited before we come back to it.
    let mut runs = Vec::new();
    let mut start = first_break;
    let mut len = 0;
    for step in 0..n {
        let i = (first_break + step) % n;
        if len > 0 && keys[i] != keys[start] {
            runs.push((keys[start].clone(), start, len));
            start = i;
            len = 0;
        }
        len += 1;
    }
    runs.push((keys[start].clone(), start, len));
    runs.sort_by_key(|r| r.1);
    runs
}

fn validate(radius: f64, samples: usize) -> Result<(), RenderError> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(RenderError::InvalidScan(format!("radius {radius} must be positive")));
    }
    if samples < 360 {
        return Err(RenderError::InvalidScan(format!(
            "{samples} samples; at least 360 required"
        )));
    }
    Ok(())
}

/// Scans `|λ| = radius` and merges the samples into arcs of equal class.
pub fn circle_scan(
    params: FamilyParams,
    radius: f64,
    samples: usize,
    budget: &OrbitBudget,
) -> Result<ArcReport, RenderError> {
    circle_scan_on(params, Complex64::new(0.0, 0.0), radius, samples, budget)
}

/// [`circle_scan`] around an arbitrary center.
pub fn circle_scan_on(
    params: FamilyParams,
    center: Complex64,
    radius: f64,
    samples: usize,
    budget: &OrbitBudget,
) -> Result<ArcReport, RenderError> {
    validate(radius, samples)?;
    let keys: Vec<ArcClass> = sample_circle(params, center, radius, samples, budget)
        .iter()
        .map(ArcClass::from)
        .collect();
    let step = TAU / samples as f64;
    let arcs = cyclic_runs(&keys)
        .into_iter()
        .map(|(class, first, len)| {
            if len == samples {
                return Arc {
                    class,
                    start: 0.0,
                    end: TAU,
                    samples,
                };
            }
            let start = ((first as f64 - 0.5) * step).rem_euclid(TAU);
            Arc {
                class,
                start,
                end: start + len as f64 * step,
                samples: len,
            }
        })
        .collect();
    Ok(ArcReport {
        center,
        radius,
        samples,
        arcs,
    })
}
