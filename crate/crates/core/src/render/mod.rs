//! Grid classification of parameter and dynamical planes, and the raster
//! tools built on it.

mod csv;
mod flood;
mod grid;
mod image;
mod scan;
mod window;

use thiserror::Error;

pub use self::csv::{write_grid_csv, CSV_HEADER};
pub use self::flood::{flood_component, ComponentReport};
pub use self::grid::{
    render_dynamical_plane, render_parameter_plane, with_threads, CellClass, CellSummary,
    ClassGrid, ParamGrid,
};
pub use self::image::{encode_image, write_image, Colormap};
pub use self::scan::{circle_scan, circle_scan_on, cyclic_runs, sample_circle, Arc, ArcClass, ArcReport};
pub use self::window::Window;
pub(crate) use self::scan::circle_point;

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("invalid window: {0}")]
    InvalidWindow(String),
    #[error("invalid circle scan: {0}")]
    InvalidScan(String),
    #[error("seed cell ({0}, {1}) is outside the grid")]
    SeedOutside(usize, usize),
    #[error("seed cell ({0}, {1}) does not satisfy the predicate")]
    SeedRejected(usize, usize),
    #[error("thread pool: {0}")]
    ThreadPool(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
