use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{RenderError, Window};
use crate::family::FamilyParams;
use crate::orbit::{classify_parameter, iterate_orbit, CycleMode, OrbitBudget, OrbitOutcome, ParamClass};

/// Flattened description of a cell, shared by coloring and CSV output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellSummary {
    pub label: &'static str,
    pub period: Option<u32>,
    pub mode: Option<CycleMode>,
    pub multiplier: Option<Complex64>,
    pub order: Option<u32>,
}

/// Anything a grid cell can hold.
pub trait CellClass: Clone + Send + Sync {
    fn summary(&self) -> CellSummary;
}

impl CellClass for ParamClass {
    fn summary(&self) -> CellSummary {
        let empty = |label| CellSummary {
            label,
            period: None,
            mode: None,
            multiplier: None,
            order: None,
        };
        match self {
            ParamClass::Shell {
                period,
                mode,
                multiplier,
                ..
            } => CellSummary {
                period: Some(*period),
                mode: *mode,
                multiplier: Some(*multiplier),
                ..empty("shell")
            },
            ParamClass::Capture => empty("capture"),
            ParamClass::VirtualCycle { order } => CellSummary {
                order: Some(*order),
                ..empty("virtual")
            },
            ParamClass::Undecided => empty("undecided"),
        }
    }
}

impl CellClass for OrbitOutcome {
    fn summary(&self) -> CellSummary {
        let empty = |label| CellSummary {
            label,
            period: None,
            mode: None,
            multiplier: None,
            order: None,
        };
        match self {
            OrbitOutcome::Attracted(cycle) => CellSummary {
                period: Some(cycle.period),
                multiplier: Some(cycle.multiplier),
                ..empty("attracted")
            },
            OrbitOutcome::CapturedByZero => empty("captured"),
            OrbitOutcome::PrepoleHit { order } => CellSummary {
                order: Some(*order),
                ..empty("prepole")
            },
            OrbitOutcome::Undecided => empty("undecided"),
        }
    }
}

/// Row-major grid of classified cells; row 0 is the top of the window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassGrid<C> {
    pub window: Window,
    pub params: FamilyParams,
    pub budget: OrbitBudget,
    pub cells: Vec<C>,
}

pub type ParamGrid = ClassGrid<ParamClass>;

impl<C> ClassGrid<C> {
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.window.px_w + ix
    }

    pub fn get(&self, ix: usize, iy: usize) -> Option<&C> {
        if ix < self.window.px_w && iy < self.window.px_h {
            self.cells.get(self.index(ix, iy))
        } else {
            None
        }
    }

    pub fn cell_center(&self, ix: usize, iy: usize) -> Complex64 {
        self.window.cell_center(ix, iy)
    }
}

fn classify_cells<C: Send>(window: &Window, f: impl Fn(Complex64) -> C + Sync) -> Vec<C> {
    (0..window.px_h)
        .into_par_iter()
        .flat_map_iter(|iy| {
            let f = &f;
            (0..window.px_w).map(move |ix| f(window.cell_center(ix, iy)))
        })
        .collect()
}

/// Classifies each cell center of `window` as a parameter.
///
/// Work is spread over the current rayon pool; see [`with_threads`] to pin the
/// worker count. The result does not depend on the schedule.
pub fn render_parameter_plane(
    params: FamilyParams,
    window: &Window,
    budget: &OrbitBudget,
) -> ParamGrid {
    let cells = classify_cells(window, |lambda| classify_parameter(params, lambda, budget));
    ClassGrid {
        window: *window,
        params,
        budget: *budget,
        cells,
    }
}

/// Classifies the orbit of each cell center of `window` under `f_λ`.
pub fn render_dynamical_plane(
    params: FamilyParams,
    lambda: Complex64,
    window: &Window,
    budget: &OrbitBudget,
) -> ClassGrid<OrbitOutcome> {
    let cells = classify_cells(window, |z| {
        iterate_orbit(params, lambda, z, budget)
    });
    ClassGrid {
        window: *window,
        params,
        budget: *budget,
        cells,
    }
}

/// Runs `job` inside a dedicated pool of `threads` workers.
pub fn with_threads<T: Send>(threads: usize, job: impl FnOnce() -> T + Send) -> Result<T, RenderError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| RenderError::ThreadPool(e.to_string()))?;
    Ok(pool.install(job))
}
