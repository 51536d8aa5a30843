use std::io::Write;

use super::{CellClass, CellSummary, ClassGrid, RenderError};

const GOLDEN_ANGLE_DEG: f64 = 137.507_764_050_037_85;

/// Fixed palette: capture green, period 1 yellow, period 2 cyan, later periods
/// stepped around the hue circle by the golden angle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Colormap {
    pub capture: [u8; 3],
    pub virtual_cycle: [u8; 3],
    pub undecided: [u8; 3],
}

impl Default for Colormap {
    fn default() -> Self {
        Self {
            capture: [0, 160, 0],
            virtual_cycle: [255, 255, 255],
            undecided: [0, 0, 0],
        }
    }
}

impl Colormap {
    pub fn period_color(&self, period: u32) -> [u8; 3] {
        match period {
            0 => self.undecided,
            1 => [255, 215, 0],
            2 => [0, 200, 200],
            n => {
                let hue = (180.0 + (n - 2) as f64 * GOLDEN_ANGLE_DEG).rem_euclid(360.0);
                hsv_to_rgb(hue, 1.0, 200.0 / 255.0)
            }
        }
    }

    pub fn color(&self, cell: &CellSummary) -> [u8; 3] {
        match cell.label {
            "shell" | "attracted" => self.period_color(cell.period.unwrap_or(0)),
            "capture" | "captured" => self.capture,
            "virtual" | "prepole" => self.virtual_cycle,
            _ => self.undecided,
        }
    }
}

fn hsv_to_rgb(h: f64, s: f64, v: f64) -> [u8; 3] {
    let c = v * s;
    let hp = h / 60.0;
    let x = c * (1.0 - (hp.rem_euclid(2.0) - 1.0).abs());
    let (r, g, b) = match hp as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = v - c;
    let to_byte = |t: f64| ((t + m) * 255.0).round().clamp(0.0, 255.0) as u8;
    [to_byte(r), to_byte(g), to_byte(b)]
}

/// Binary PPM (P6) of the grid, top row first.
pub fn encode_image<C: CellClass>(grid: &ClassGrid<C>, colormap: &Colormap) -> Vec<u8> {
    let header = format!("P6\n{} {}\n255\n", grid.window.px_w, grid.window.px_h);
    let mut bytes = Vec::with_capacity(header.len() + 3 * grid.cells.len());
    bytes.extend_from_slice(header.as_bytes());
    for cell in &grid.cells {
        bytes.extend_from_slice(&colormap.color(&cell.summary()));
    }
    bytes
}

pub fn write_image<C: CellClass, W: Write>(
    grid: &ClassGrid<C>,
    colormap: &Colormap,
    mut out: W,
) -> Result<(), RenderError> {
    out.write_all(&encode_image(grid, colormap))?;
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbit::{OrbitBudget, ParamClass};
    use crate::render::Window;
    use crate::{Complex64, FamilyParams};

    fn grid(cells: Vec<ParamClass>) -> ClassGrid<ParamClass> {
        let n = cells.len();
        ClassGrid {
            window: Window::new(Complex64::new(0.0, 0.0), n as f64, 1.0, n, 1).unwrap(),
            params: FamilyParams::new(1, 1).unwrap(),
            budget: OrbitBudget::default(),
            cells,
        }
    }

    fn shell(period: u32) -> ParamClass {
        ParamClass::Shell {
            period,
            raw_period: period,
            mode: None,
            multiplier: Complex64::new(0.1, 0.0),
            tracts: 1,
        }
    }

    #[test]
    fn golden_single_capture_pixel() {
        let bytes = encode_image(&grid(vec![ParamClass::Capture]), &Colormap::default());
        assert_eq!(bytes, b"P6\n1 1\n255\n\x00\xa0\x00".to_vec());
    }

    #[test]
    fn golden_period_pixels() {
        let bytes = encode_image(&grid(vec![shell(1), shell(2)]), &Colormap::default());
        assert_eq!(bytes, b"P6\n2 1\n255\n\xff\xd7\x00\x00\xc8\xc8".to_vec());
    }

    #[test]
    fn fixed_entries_and_length() {
        let cells = vec![
            ParamClass::VirtualCycle { order: 3 },
            ParamClass::Undecided,
            shell(3),
            shell(4),
        ];
        let bytes = encode_image(&grid(cells), &Colormap::default());
        let header = b"P6\n4 1\n255\n";
        assert_eq!(bytes.len(), header.len() + 12);
        assert_eq!(&bytes[header.len()..header.len() + 6], &[255, 255, 255, 0, 0, 0]);
        let (c3, c4) = (Colormap::default().period_color(3), Colormap::default().period_color(4));
        assert_ne!(c3, c4);
        assert_ne!(c3, [0, 0, 0]);
    }

    #[test]
    fn hsv_primaries() {
        assert_eq!(hsv_to_rgb(0.0, 1.0, 1.0), [255, 0, 0]);
        assert_eq!(hsv_to_rgb(120.0, 1.0, 1.0), [0, 255, 0]);
        assert_eq!(hsv_to_rgb(240.0, 1.0, 1.0), [0, 0, 255]);
        assert_eq!(hsv_to_rgb(180.0, 1.0, 200.0 / 255.0), [0, 200, 200]);
    }
}
