use std::collections::VecDeque;

use super::{ClassGrid, RenderError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentReport {
    pub count: usize,
    /// `(ix_min, iy_min, ix_max, iy_max)`, inclusive.
    pub bbox: (usize, usize, usize, usize),
    pub touches_edge: bool,
    /// Row-major indices of the member cells, ascending.
    pub cells: Vec<usize>,
}

/// 4-connected component of cells satisfying `pred` that contains `seed`.
pub fn flood_component<C>(
    grid: &ClassGrid<C>,
    seed: (usize, usize),
    pred: impl Fn(&C) -> bool,
) -> Result<ComponentReport, RenderError> {
    let (w, h) = (grid.window.px_w, grid.window.px_h);
    let (sx, sy) = seed;
    let Some(seed_cell) = grid.get(sx, sy) else {
        return Err(RenderError::SeedOutside(sx, sy));
    };
    if !pred(seed_cell) {
        return Err(RenderError::SeedRejected(sx, sy));
    }
    let mut seen = vec![false; w * h];
    let mut queue = VecDeque::from([(sx, sy)]);
    seen[sy * w + sx] = true;
    let mut cells = Vec::new();
    let mut bbox = (sx, sy, sx, sy);
    let mut touches_edge = false;
    while let Some((x, y)) = queue.pop_front() {
        cells.push(y * w + x);
        bbox = (bbox.0.min(x), bbox.1.min(y), bbox.2.max(x), bbox.3.max(y));
        touches_edge |= x == 0 || y == 0 || x + 1 == w || y + 1 == h;
        let neighbours = [
            (x > 0).then(|| (x - 1, y)),
            (x + 1 < w).then(|| (x + 1, y)),
            (y > 0).then(|| (x, y - 1)),
            (y + 1 < h).then(|| (x, y + 1)),
        ];
        for (nx, ny) in neighbours.into_iter().flatten() {
            let i = ny * w + nx;
            if !seen[i] && pred(&grid.cells[i]) {
                seen[i] = true;
                queue.push_back((nx, ny));
            }
        }
    }
    cells.sort_unstable();
    Ok(ComponentReport {
        count: cells.len(),
        bbox,
        touches_edge,
        cells,
    })
}
