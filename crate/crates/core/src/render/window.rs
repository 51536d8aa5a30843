use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::RenderError;

/// Upper bound on `px_w · px_h`.
pub const MAX_CELLS: u64 = 100_000_000;

/// A rectangle of the plane sampled at cell centers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub center: Complex64,
    pub width: f64,
    pub height: f64,
    pub px_w: usize,
    pub px_h: usize,
}

impl Window {
    pub fn new(
        center: Complex64,
        width: f64,
        height: f64,
        px_w: usize,
        px_h: usize,
    ) -> Result<Self, RenderError> {
        let bad = |msg: String| Err(RenderError::InvalidWindow(msg));
        if !(width > 0.0 && height > 0.0 && width.is_finite() && height.is_finite()) {
            return bad(format!("extent {width} x {height} must be positive"));
        }
        if !(center.re.is_finite() && center.im.is_finite()) {
            return bad("center must be finite".into());
        }
        if px_w == 0 || px_h == 0 || px_w as u64 * px_h as u64 > MAX_CELLS {
            return bad(format!("resolution {px_w} x {px_h} out of range"));
        }
        let (dx, dy) = (width / px_w as f64, height / px_h as f64);
        if ((dx - dy) / dx).abs() > 1e-9 {
            return bad(format!("pixel aspect {dx} vs {dy} is not square"));
        }
        Ok(Self {
            center,
            width,
            height,
            px_w,
            px_h,
        })
    }

    /// Square window `[cx ± width/2] × [cy ± width/2]` at `res × res`.
    pub fn square(center: Complex64, width: f64, res: usize) -> Result<Self, RenderError> {
        Self::new(center, width, width, res, res)
    }

    pub fn cell_count(&self) -> usize {
        self.px_w * self.px_h
    }

    pub fn cell_size(&self) -> f64 {
        self.width / self.px_w as f64
    }

    /// Center of cell `(ix, iy)`; row 0 is the top (largest imaginary part).
    ///
    /// Offsets are odd integers times a half cell, so windows centered on the
    /// real axis map mirrored rows to exact conjugates.
    pub fn cell_center(&self, ix: usize, iy: usize) -> Complex64 {
        let hx = self.width / (2 * self.px_w) as f64;
        let hy = self.height / (2 * self.px_h) as f64;
        let ox = (2 * ix as i64 + 1 - self.px_w as i64) as f64;
        let oy = (self.px_h as i64 - 1 - 2 * iy as i64) as f64;
        Complex64::new(self.center.re + ox * hx, self.center.im + oy * hy)
    }

    /// Cell containing `z`, if it lies inside the window.
    pub fn cell_of(&self, z: Complex64) -> Option<(usize, usize)> {
        let fx = (z.re - (self.center.re - self.width / 2.0)) / self.width * self.px_w as f64;
        let fy = ((self.center.im + self.height / 2.0) - z.im) / self.height * self.px_h as f64;
        if fx < 0.0 || fy < 0.0 || fx >= self.px_w as f64 || fy >= self.px_h as f64 {
            return None;
        }
        Some((fx as usize, fy as usize))
    }

    pub fn contains(&self, z: Complex64) -> bool {
        self.cell_of(z).is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_extent_and_aspect() {
        let c = Complex64::new(0.0, 0.0);
        assert!(Window::new(c, 2.0, 1.0, 200, 100).is_ok());
        assert!(Window::new(c, 2.0, 1.0, 200, 200).is_err());
        assert!(Window::new(c, -1.0, 1.0, 10, 10).is_err());
        assert!(Window::new(c, 1.0, 1.0, 0, 0).is_err());
        assert!(Window::new(c, 1.0, 1.0, 20_000, 20_000).is_err());
    }

    #[test]
    fn cell_centers_and_lookup() {
        let w = Window::square(Complex64::new(1.0, -1.0), 4.0, 4).unwrap();
        assert_eq!(w.cell_center(0, 0), Complex64::new(-0.5, 0.5));
        assert_eq!(w.cell_center(3, 3), Complex64::new(2.5, -2.5));
        for iy in 0..4 {
            for ix in 0..4 {
                assert_eq!(w.cell_of(w.cell_center(ix, iy)), Some((ix, iy)));
            }
        }
        assert_eq!(w.cell_of(Complex64::new(10.0, 0.0)), None);
    }

    #[test]
    fn mirrored_rows_are_exact_conjugates() {
        let w = Window::new(Complex64::new(0.3, 0.0), 6.0, 6.0, 37, 37).unwrap();
        for iy in 0..37 {
            for ix in 0..37 {
                assert_eq!(w.cell_center(ix, iy).conj(), w.cell_center(ix, 36 - iy));
            }
        }
    }
}
