use std::io::Write;

use super::{CellClass, ClassGrid, RenderError};

pub const CSV_HEADER: &str = "ix,iy,re,im,class,period,mode,mult_re,mult_im,order";

/// One row per cell; absent fields are left empty.
pub fn write_grid_csv<C: CellClass, W: Write>(grid: &ClassGrid<C>, out: W) -> Result<(), RenderError> {
    let mut out = std::io::BufWriter::new(out);
    writeln!(out, "{CSV_HEADER}")?;
    let opt = |v: Option<String>| v.unwrap_or_default();
    for iy in 0..grid.window.px_h {
        for ix in 0..grid.window.px_w {
            let z = grid.cell_center(ix, iy);
            let s = grid.cells[grid.index(ix, iy)].summary();
            writeln!(
                out,
                "{ix},{iy},{:.16e},{:.16e},{},{},{},{},{},{}",
                z.re,
                z.im,
                s.label,
                opt(s.period.map(|p| p.to_string())),
                opt(s.mode.map(|m| m.as_str().to_string())),
                opt(s.multiplier.map(|m| format!("{:.16e}", m.re))),
                opt(s.multiplier.map(|m| format!("{:.16e}", m.im))),
                opt(s.order.map(|o| o.to_string())),
            )?;
        }
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbit::{CycleMode, OrbitBudget, ParamClass};
    use crate::render::Window;
    use crate::{Complex64, FamilyParams};

    #[test]
    fn rows_follow_header() {
        let grid = ClassGrid {
            window: Window::new(Complex64::new(0.0, 0.0), 2.0, 1.0, 2, 1).unwrap(),
            params: FamilyParams::new(1, 1).unwrap(),
            budget: OrbitBudget::default(),
            cells: vec![
                ParamClass::Shell {
                    period: 1,
                    raw_period: 2,
                    mode: Some(CycleMode::DoubledCycle),
                    multiplier: Complex64::new(0.25, -0.5),
                    tracts: 3,
                },
                ParamClass::VirtualCycle { order: 2 },
            ],
        };
        let mut buf = Vec::new();
        write_grid_csv(&grid, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(
            lines[1],
            "0,0,-5.0000000000000000e-1,0.0000000000000000e0,shell,1,doubled,2.5000000000000000e-1,-5.0000000000000000e-1,"
        );
        assert_eq!(lines[2], "1,0,5.0000000000000000e-1,0.0000000000000000e0,virtual,,,,,2");
        assert_eq!(lines.len(), 3);
        let re: f64 = lines[1].split(',').nth(2).unwrap().parse().unwrap();
        assert_eq!(re, -0.5);
    }
}
