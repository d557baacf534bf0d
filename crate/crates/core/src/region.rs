//! Spatial regions as unions of closed boxes, and the coarse cell lattice.

use serde::{Deserialize, Serialize};

use crate::window::WindowFunction;

/// Closed axis-aligned box `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cuboid {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Cuboid {
    fn dim(&self) -> usize {
        self.lo.len()
    }

    fn contains_point(&self, x: &[f64]) -> bool {
        self.lo
            .iter()
            .zip(&self.hi)
            .zip(x)
            .all(|((l, h), v)| *l <= *v && *v <= *h)
    }

    fn contains_box(&self, other: &Cuboid) -> bool {
        (0..self.dim()).all(|a| self.lo[a] <= other.lo[a] && other.hi[a] <= self.hi[a])
    }

    fn intersect(&self, other: &Cuboid) -> Option<Cuboid> {
        let lo: Vec<f64> = self
            .lo
            .iter()
            .zip(&other.lo)
            .map(|(a, b)| a.max(*b))
            .collect();
        let hi: Vec<f64> = self
            .hi
            .iter()
            .zip(&other.hi)
            .map(|(a, b)| a.min(*b))
            .collect();
        lo.iter()
            .zip(&hi)
            .all(|(l, h)| l <= h)
            .then_some(Cuboid { lo, hi })
    }

    /// Meets the half-open cell `[clo, chi)`: positive overlap per axis, or a degenerate
    /// axis whose coordinate lies in the cell.
    fn meets_cell(&self, clo: &[f64], chi: &[f64]) -> bool {
        (0..self.dim()).all(|a| {
            if self.lo[a] == self.hi[a] {
                clo[a] <= self.lo[a] && self.lo[a] < chi[a]
            } else {
                self.lo[a].max(clo[a]) < self.hi[a].min(chi[a])
            }
        })
    }
}

/// Finite union of closed boxes in the torus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpatialRegion {
    dim: usize,
    boxes: Vec<Cuboid>,
}

impl SpatialRegion {
    pub fn empty(dim: usize) -> Self {
        SpatialRegion {
            dim,
            boxes: Vec::new(),
        }
    }

    pub fn full(dim: usize) -> Self {
        Self::from_box(&vec![0.0; dim], &vec![1.0; dim])
    }

    pub fn from_box(lo: &[f64], hi: &[f64]) -> Self {
        assert_eq!(lo.len(), hi.len());
        SpatialRegion {
            dim: lo.len(),
            boxes: vec![Cuboid {
                lo: lo.to_vec(),
                hi: hi.to_vec(),
            }],
        }
    }

    pub fn point(x: &[f64]) -> Self {
        Self::from_box(x, x)
    }

    pub fn from_boxes(dim: usize, boxes: Vec<Cuboid>) -> Self {
        let mut out = SpatialRegion { dim, boxes };
        out.canonicalize();
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn boxes(&self) -> &[Cuboid] {
        &self.boxes
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.boxes.iter().any(|b| b.contains_point(x))
    }

    pub fn union(&self, other: &Self) -> Self {
        let boxes = self.boxes.iter().chain(&other.boxes).cloned().collect();
        Self::from_boxes(self.dim, boxes)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let mut boxes = Vec::new();
        for a in &self.boxes {
            for b in &other.boxes {
                if let Some(c) = a.intersect(b) {
                    boxes.push(c);
                }
            }
        }
        Self::from_boxes(self.dim, boxes)
    }

    /// Cartesian product `A × B`.
    pub fn product(&self, other: &Self) -> Self {
        let mut boxes = Vec::new();
        for a in &self.boxes {
            for b in &other.boxes {
                boxes.push(Cuboid {
                    lo: a.lo.iter().chain(&b.lo).copied().collect(),
                    hi: a.hi.iter().chain(&b.hi).copied().collect(),
                });
            }
        }
        SpatialRegion {
            dim: self.dim + other.dim,
            boxes,
        }
    }

    /// Drops boxes contained in others; merges overlapping intervals in one dimension.
    fn canonicalize(&mut self) {
        if self.dim == 1 {
            let mut spans: Vec<(f64, f64)> =
                self.boxes.iter().map(|b| (b.lo[0], b.hi[0])).collect();
            spans.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut merged: Vec<(f64, f64)> = Vec::new();
            for (lo, hi) in spans {
                match merged.last_mut() {
                    Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
                    _ => merged.push((lo, hi)),
                }
            }
            self.boxes = merged
                .into_iter()
                .map(|(lo, hi)| Cuboid {
                    lo: vec![lo],
                    hi: vec![hi],
                })
                .collect();
            return;
        }
        let mut kept: Vec<Cuboid> = Vec::new();
        for (i, b) in self.boxes.iter().enumerate() {
            let swallowed = self
                .boxes
                .iter()
                .enumerate()
                .any(|(j, c)| j != i && c.contains_box(b) && (!b.contains_box(c) || j < i));
            if !swallowed {
                kept.push(b.clone());
            }
        }
        self.boxes = kept;
    }

    /// True when the region meets the half-open cell, with periodic images.
    pub fn meets_cell(&self, lattice: &CellLattice, cell: usize) -> bool {
        let (clo, chi) = lattice.cell_box(cell);
        let images = 3usize.pow(self.dim as u32);
        for image in 0..images {
            let mut rem = image;
            let mut lo = clo.clone();
            let mut hi = chi.clone();
            for a in 0..self.dim {
                let shift = (rem % 3) as f64 - 1.0;
                rem /= 3;
                lo[a] += shift;
                hi[a] += shift;
            }
            if self.boxes.iter().any(|b| b.meets_cell(&lo, &hi)) {
                return true;
            }
        }
        false
    }

    /// Cells of the lattice met by the region.
    pub fn cells(&self, lattice: &CellLattice) -> Vec<usize> {
        (0..lattice.len())
            .filter(|&c| self.meets_cell(lattice, c))
            .collect()
    }

    /// Flat `[lo0, hi0, lo1, hi1, ...]` per box.
    pub fn to_flat_boxes(&self) -> Vec<Vec<f64>> {
        self.boxes
            .iter()
            .map(|b| b.lo.iter().zip(&b.hi).flat_map(|(l, h)| [*l, *h]).collect())
            .collect()
    }

    pub fn from_flat_boxes(dim: usize, flat: &[Vec<f64>]) -> Option<Self> {
        let mut boxes = Vec::new();
        for b in flat {
            if b.len() != 2 * dim {
                return None;
            }
            boxes.push(Cuboid {
                lo: b.iter().step_by(2).copied().collect(),
                hi: b.iter().skip(1).step_by(2).copied().collect(),
            });
        }
        Some(Self::from_boxes(dim, boxes))
    }
}

/// Coarse lattice of spatial cells centered at `i / per_axis`, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellLattice {
    dim: usize,
    per_axis: usize,
}

impl CellLattice {
    pub const DEFAULT_PER_AXIS: usize = 8;

    pub fn new(dim: usize, per_axis: usize) -> Self {
        assert!(dim >= 1 && per_axis >= 2);
        CellLattice { dim, per_axis }
    }

    pub fn standard(dim: usize) -> Self {
        Self::new(dim, Self::DEFAULT_PER_AXIS)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn per_axis(&self) -> usize {
        self.per_axis
    }

    pub fn len(&self) -> usize {
        self.per_axis.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn width(&self) -> f64 {
        1.0 / self.per_axis as f64
    }

    pub fn axis_indices(&self, cell: usize) -> Vec<usize> {
        let mut out = vec![0; self.dim];
        let mut rem = cell;
        for a in (0..self.dim).rev() {
            out[a] = rem % self.per_axis;
            rem /= self.per_axis;
        }
        out
    }

    pub fn from_axis_indices(&self, idx: &[usize]) -> usize {
        idx.iter()
            .fold(0, |acc, &i| acc * self.per_axis + i % self.per_axis)
    }

    pub fn center(&self, cell: usize) -> Vec<f64> {
        self.axis_indices(cell)
            .iter()
            .map(|&i| i as f64 * self.width())
            .collect()
    }

    /// Half-open cell `[c - w/2, c + w/2)`.
    pub fn cell_box(&self, cell: usize) -> (Vec<f64>, Vec<f64>) {
        let c = self.center(cell);
        let h = 0.5 * self.width();
        (
            c.iter().map(|v| v - h).collect(),
            c.iter().map(|v| v + h).collect(),
        )
    }

    /// Cell whose half-open box holds `x`.
    pub fn cell_of(&self, x: &[f64]) -> usize {
        let idx: Vec<usize> = x
            .iter()
            .map(|v| {
                ((v * self.per_axis as f64 + 0.5).floor() as i64).rem_euclid(self.per_axis as i64)
                    as usize
            })
            .collect();
        self.from_axis_indices(&idx)
    }

    /// Support box of the cell window: the cell enlarged by a quarter cell per side,
    /// so neighboring windows overlap by half a cell.
    pub fn window_box(&self, cell: usize) -> (Vec<f64>, Vec<f64>) {
        let c = self.center(cell);
        let h = 0.75 * self.width();
        (
            c.iter().map(|v| v - h).collect(),
            c.iter().map(|v| v + h).collect(),
        )
    }

    pub fn window(&self, cell: usize) -> WindowFunction {
        let (lo, hi) = self.window_box(cell);
        WindowFunction::bump(&lo, &hi)
    }

    /// Cells whose window is nonzero at `x`.
    pub fn windows_seeing(&self, x: &[f64]) -> Vec<usize> {
        (0..self.len())
            .filter(|&c| self.window(c).eval(x) > 0.0)
            .collect()
    }

    pub fn region_of_cells(&self, cells: &[usize]) -> SpatialRegion {
        let boxes = cells
            .iter()
            .map(|&c| {
                let (lo, hi) = self.cell_box(c);
                Cuboid { lo, hi }
            })
            .collect();
        SpatialRegion::from_boxes(self.dim, boxes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_points_seen_by_one_window() {
        let lattice = CellLattice::standard(1);
        for x in [0.5, 0.35, 0.65] {
            let seen = lattice.windows_seeing(&[x]);
            assert_eq!(seen, vec![lattice.cell_of(&[x])], "x = {x}");
        }
        assert_eq!(lattice.cell_of(&[0.35]), 3);
        assert_eq!(lattice.cell_of(&[0.65]), 5);
    }

    #[test]
    fn point_region_meets_exactly_one_cell() {
        let lattice = CellLattice::standard(2);
        let p = SpatialRegion::point(&[0.5, 0.5625]);
        assert_eq!(p.cells(&lattice).len(), 1);
        let cells = lattice.region_of_cells(&[3, 12]);
        assert_eq!(cells.cells(&lattice), vec![3, 12]);
    }

    #[test]
    fn interval_union_merges() {
        let a = SpatialRegion::from_box(&[0.2], &[0.4]);
        let b = SpatialRegion::from_box(&[0.3], &[0.5]);
        let u = a.union(&b);
        assert_eq!(u.boxes().len(), 1);
        assert_eq!(u.boxes()[0].hi, vec![0.5]);
        assert!(a
            .intersection(&SpatialRegion::from_box(&[0.6], &[0.7]))
            .is_empty());
    }

    #[test]
    fn seam_cell_wraps() {
        let lattice = CellLattice::standard(1);
        let r = SpatialRegion::from_box(&[0.97], &[0.99]);
        assert_eq!(r.cells(&lattice), vec![0]);
    }
}
