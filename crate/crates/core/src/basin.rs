//! Basins of attracting fixed points on a pixel grid of the dynamical plane.
//!
//! The immediate basin of `p` is approximated by the 4-connected component
//! of converging cells that contains `p`. [`basin_raster`] computes every
//! cell; [`LazyBasin`] answers "is this point in the immediate basin" by a
//! best-first search that only evaluates the cells it visits.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cubic::CubicMap;
use crate::error::{Error, Result};
use crate::grid::{neighbors4, PixelGrid, Resolution, Window};
use crate::orbit::Trap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[repr(u8)]
pub enum CellFate {
    Escaped = 0,
    /// Reached the certified trap around the target.
    Target = 1,
    /// Neither escaped nor reached the target within the budget.
    Bounded = 2,
}

/// Escape-or-trap iteration without cycle detection.
#[inline]
pub fn cell_fate(f: &CubicMap, trap: &Trap, z: Complex64, budget: usize) -> CellFate {
    let r2 = f.escape_radius().powi(2);
    let mut w = z;
    if trap.contains(w) {
        return CellFate::Target;
    }
    for _ in 0..budget {
        w = f.eval(w);
        if w.norm_sqr() >= r2 || !w.re.is_finite() {
            return CellFate::Escaped;
        }
        if trap.contains(w) {
            return CellFate::Target;
        }
    }
    CellFate::Bounded
}

/// Window `[−1.05ρ, 1.05ρ]²` around the disk of radius `ρ` that holds `K(f)`.
pub fn default_dynamic_window(f: &CubicMap) -> Window {
    Window::centered(1.05 * f.filled_julia_bound())
}

fn target_trap(f: &CubicMap, target: Complex64) -> Result<Trap> {
    let multiplier_abs = f.derivative(target).norm();
    let fixed = (f.eval(target) - target).norm() < 1e-9 * (1.0 + target.norm());
    match Trap::around(f, target) {
        Some(t) if fixed => Ok(t),
        _ => Err(Error::NotAttracting {
            target,
            multiplier_abs,
        }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalCell {
    pub point: Complex64,
    /// Component label of the cell containing the point (0 when outside the
    /// window or not converging).
    pub label: u32,
    pub in_immediate_basin: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynRaster {
    pub grid: PixelGrid,
    pub target: Complex64,
    pub budget: usize,
    pub fates: Vec<CellFate>,
    /// Components of equal-fate cells, numbered from 1.
    pub labels: Vec<u32>,
    pub target_label: u32,
    pub critical: [CriticalCell; 2],
}

impl DynRaster {
    pub fn in_immediate_basin(&self, z: Complex64) -> bool {
        self.grid
            .locate(z)
            .map(|(i, j)| self.labels[self.grid.index(i, j)] == self.target_label)
            .unwrap_or(false)
    }

    pub fn immediate_basin_cells(&self) -> usize {
        self.labels.iter().filter(|&&l| l == self.target_label).count()
    }
}

/// Labels 4-connected components of cells with equal fate.
fn label_by_fate(fates: &[CellFate], w: usize, h: usize) -> Vec<u32> {
    let mut labels = vec![0u32; fates.len()];
    let mut next = 0;
    let mut stack = Vec::new();
    for start in 0..fates.len() {
        if labels[start] != 0 {
            continue;
        }
        next += 1;
        labels[start] = next;
        stack.push(start);
        while let Some(p) = stack.pop() {
            for q in neighbors4(p, w, h) {
                if labels[q] == 0 && fates[q] == fates[p] {
                    labels[q] = next;
                    stack.push(q);
                }
            }
        }
    }
    labels
}

/// Fate of every cell center plus the immediate basin of `target`.
pub fn basin_raster(
    f: &CubicMap,
    target: Complex64,
    window: Window,
    resolution: Resolution,
    budget: usize,
) -> Result<DynRaster> {
    window.validate()?;
    let trap = target_trap(f, target)?;
    let grid = PixelGrid::new(window, resolution);
    let (w, h) = (grid.width(), grid.height());
    let fates: Vec<CellFate> = (0..grid.len())
        .into_par_iter()
        .map(|idx| cell_fate(f, &trap, grid.center_of_index(idx), budget))
        .collect();
    let labels = label_by_fate(&fates, w, h);
    let target_label = grid
        .locate(target)
        .map(|(i, j)| grid.index(i, j))
        .filter(|&idx| fates[idx] == CellFate::Target)
        .map(|idx| labels[idx])
        .unwrap_or(0);
    let locate_critical = |c: Complex64| {
        let label = grid
            .locate(c)
            .map(|(i, j)| grid.index(i, j))
            .filter(|&idx| fates[idx] == CellFate::Target)
            .map(|idx| labels[idx])
            .unwrap_or(0);
        CriticalCell {
            point: c,
            label,
            in_immediate_basin: trap.contains(c) || (label != 0 && label == target_label),
        }
    };
    let crit = f.critical_points();
    Ok(DynRaster {
        grid,
        target,
        budget,
        critical: [locate_critical(crit.c_plus), locate_critical(crit.c_minus)],
        fates,
        labels,
        target_label,
    })
}

/// Outcome of an on-demand immediate-basin query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasinAnswer {
    Inside,
    Outside,
    /// The cell budget ran out before the search finished.
    Unknown,
}

impl BasinAnswer {
    pub fn is_inside(self) -> bool {
        self == BasinAnswer::Inside
    }
}

/// Immediate-basin membership computed cell by cell on demand.
///
/// Cell fates are memoized, so repeated queries against the same map (both
/// critical points, successive orbit points) share work.
pub struct LazyBasin {
    f: CubicMap,
    trap: Trap,
    grid: PixelGrid,
    budget: usize,
    /// 0 unknown, 1 target, 2 other.
    cells: Vec<u8>,
    goal: Option<usize>,
    pub evaluated: usize,
}

impl LazyBasin {
    pub fn new(
        f: &CubicMap,
        target: Complex64,
        window: Window,
        resolution: Resolution,
        budget: usize,
    ) -> Result<Self> {
        window.validate()?;
        let trap = target_trap(f, target)?;
        let grid = PixelGrid::new(window, resolution);
        let goal = grid.locate(target).map(|(i, j)| grid.index(i, j));
        Ok(Self {
            f: *f,
            trap,
            grid,
            budget,
            cells: vec![0; grid.len()],
            goal,
            evaluated: 0,
        })
    }

    pub fn trap(&self) -> &Trap {
        &self.trap
    }

    pub fn grid(&self) -> &PixelGrid {
        &self.grid
    }

    fn converges(&mut self, idx: usize) -> bool {
        if self.cells[idx] == 0 {
            self.evaluated += 1;
            let z = self.grid.center_of_index(idx);
            let fate = cell_fate(&self.f, &self.trap, z, self.budget);
            self.cells[idx] = if fate == CellFate::Target { 1 } else { 2 };
        }
        self.cells[idx] == 1
    }

    /// Whether `z` lies in the immediate basin, visiting at most `max_cells`
    /// cells.
    pub fn contains(&mut self, z: Complex64, max_cells: usize) -> BasinAnswer {
        if self.trap.contains(z) {
            return BasinAnswer::Inside;
        }
        let Some(goal) = self.goal else {
            return BasinAnswer::Unknown;
        };
        let Some((i, j)) = self.grid.locate(z) else {
            return BasinAnswer::Outside;
        };
        let start = self.grid.index(i, j);
        if cell_fate(&self.f, &self.trap, z, self.budget) != CellFate::Target {
            return BasinAnswer::Outside;
        }
        if !self.converges(start) {
            return BasinAnswer::Outside;
        }
        let (w, h) = (self.grid.width(), self.grid.height());
        let (gi, gj) = ((goal % w) as i64, (goal / w) as i64);
        let dist = |idx: usize| ((idx % w) as i64 - gi).unsigned_abs() + ((idx / w) as i64 - gj).unsigned_abs();
        let mut seen = vec![false; self.grid.len()];
        let mut heap = BinaryHeap::new();
        seen[start] = true;
        heap.push(Reverse((dist(start), start)));
        let mut visited = 0usize;
        while let Some(Reverse((_, p))) = heap.pop() {
            if p == goal || self.trap.contains(self.grid.center_of_index(p)) {
                return BasinAnswer::Inside;
            }
            visited += 1;
            if visited > max_cells {
                return BasinAnswer::Unknown;
            }
            for q in neighbors4(p, w, h) {
                if !seen[q] {
                    seen[q] = true;
                    if self.converges(q) {
                        heap.push(Reverse((dist(q), q)));
                    }
                }
            }
        }
        BasinAnswer::Outside
    }
}
