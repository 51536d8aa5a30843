//! Numerical laboratory for the dynamics of `f_λ(z) = λ·tan^p(z^q)`.

pub mod centers;
pub mod family;
pub mod lab;
pub mod orbit;
pub mod render;

pub use family::{FamilyParams, KernelError, Pole};
pub use num_complex::Complex64;
