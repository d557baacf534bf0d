//! Discretized unit spheres and cones as direction masks.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridSpec;

/// Tolerance for angular comparisons.
pub const ANGLE_TOL: f64 = 1e-12;

/// Factor resolution and ratio layers of the default product grids.
pub const PRODUCT_FACTOR_DIRECTIONS: usize = 72;
pub const PRODUCT_LAYERS: usize = 18;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "grid", rename_all = "snake_case")]
pub enum DirectionGrid {
    /// `{-1, +1}`; index 0 is `-1`.
    Signs,
    /// `count` equally spaced angles `2πi/count`, `count` even.
    Circle { count: usize },
    /// Directions of `(ξ, η)` by factor directions and the angle `atan2(|η|, |ξ|)`
    /// rounded to `layers` steps over `[0, π/2]`.
    Product {
        first: Box<DirectionGrid>,
        second: Box<DirectionGrid>,
        layers: usize,
    },
}

impl DirectionGrid {
    pub fn circle(count: usize) -> Self {
        assert!(
            count >= 4 && count.is_multiple_of(2),
            "circle grids need an even count >= 4"
        );
        DirectionGrid::Circle { count }
    }

    pub fn product(first: DirectionGrid, second: DirectionGrid, layers: usize) -> Self {
        assert!(first.dim() <= 2 && second.dim() <= 2 && layers >= 2);
        DirectionGrid::Product {
            first: Box::new(first),
            second: Box::new(second),
            layers,
        }
    }

    /// Default grid for a dimension: signs, 360 angles, or a product of coarser factors.
    pub fn for_dim(dim: usize) -> Self {
        Self::for_dim_with(dim, 360)
    }

    pub fn for_dim_with(dim: usize, circle: usize) -> Self {
        let factor = |d: usize| {
            if d == 1 {
                DirectionGrid::Signs
            } else {
                DirectionGrid::circle(PRODUCT_FACTOR_DIRECTIONS)
            }
        };
        match dim {
            1 => DirectionGrid::Signs,
            2 => DirectionGrid::circle(circle),
            3 => DirectionGrid::product(factor(1), factor(2), PRODUCT_LAYERS),
            4 => DirectionGrid::product(factor(2), factor(2), PRODUCT_LAYERS),
            _ => panic!("no direction grid in dimension {dim}"),
        }
    }

    /// Grid for directions of `(ξ, η)` with `ξ` on `first`'s sphere and `η` on `second`'s.
    pub fn tensor_of(first: &DirectionGrid, second: &DirectionGrid) -> Self {
        match (first, second) {
            (DirectionGrid::Signs, DirectionGrid::Signs) => DirectionGrid::circle(360),
            _ => DirectionGrid::for_dim(first.dim() + second.dim()),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            DirectionGrid::Signs => 1,
            DirectionGrid::Circle { .. } => 2,
            DirectionGrid::Product { first, second, .. } => first.dim() + second.dim(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            DirectionGrid::Signs => 2,
            DirectionGrid::Circle { count } => *count,
            DirectionGrid::Product {
                first,
                second,
                layers,
            } => {
                let (n1, n2) = (first.len(), second.len());
                n1 + (layers - 1) * n1 * n2 + n2
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Angular step of a circle grid; `π` for signs.
    pub fn step(&self) -> f64 {
        match self {
            DirectionGrid::Signs => PI,
            DirectionGrid::Circle { count } => 2.0 * PI / *count as f64,
            DirectionGrid::Product {
                first,
                second,
                layers,
            } => first
                .step()
                .min(second.step())
                .min(0.5 * PI / *layers as f64),
        }
    }

    /// Unit vector of a grid direction.
    pub fn representative(&self, i: usize) -> Vec<f64> {
        match self {
            DirectionGrid::Signs => vec![if i == 0 { -1.0 } else { 1.0 }],
            DirectionGrid::Circle { count } => {
                let t = 2.0 * PI * i as f64 / *count as f64;
                vec![t.cos(), t.sin()]
            }
            DirectionGrid::Product {
                first,
                second,
                layers,
            } => {
                let (p, a, b) = self.product_parts(i);
                let psi = 0.5 * PI * p as f64 / *layers as f64;
                let mut out = vec![0.0; self.dim()];
                if let Some(a) = a {
                    for (slot, v) in out.iter_mut().zip(first.representative(a)) {
                        *slot = psi.cos() * v;
                    }
                }
                if let Some(b) = b {
                    let d1 = first.dim();
                    for (slot, v) in out[d1..].iter_mut().zip(second.representative(b)) {
                        *slot = psi.sin() * v;
                    }
                }
                out
            }
        }
    }

    /// `(layer, first index, second index)` of a product-grid entry.
    pub fn product_parts(&self, i: usize) -> (usize, Option<usize>, Option<usize>) {
        let DirectionGrid::Product {
            first,
            second,
            layers,
        } = self
        else {
            panic!("product_parts on a non-product grid");
        };
        let (n1, n2) = (first.len(), second.len());
        if i < n1 {
            return (0, Some(i), None);
        }
        let inner = (layers - 1) * n1 * n2;
        if i < n1 + inner {
            let r = i - n1;
            let p = r / (n1 * n2) + 1;
            let ab = r % (n1 * n2);
            return (p, Some(ab / n2), Some(ab % n2));
        }
        (*layers, None, Some(i - n1 - inner))
    }

    fn product_index(&self, p: usize, a: usize, b: usize) -> usize {
        let DirectionGrid::Product {
            first,
            second,
            layers,
        } = self
        else {
            unreachable!()
        };
        let (n1, n2) = (first.len(), second.len());
        if p == 0 {
            a
        } else if p == *layers {
            n1 + (layers - 1) * n1 * n2 + b
        } else {
            n1 + (p - 1) * n1 * n2 + a * n2 + b
        }
    }

    /// Nearest grid direction of a nonzero vector.
    pub fn classify(&self, v: &[f64]) -> Option<usize> {
        match self {
            DirectionGrid::Signs => {
                if v[0] > 0.0 {
                    Some(1)
                } else if v[0] < 0.0 {
                    Some(0)
                } else {
                    None
                }
            }
            DirectionGrid::Circle { count } => {
                if v[0] == 0.0 && v[1] == 0.0 {
                    return None;
                }
                let t = v[1].atan2(v[0]);
                let i = (t * *count as f64 / (2.0 * PI)).round() as i64;
                Some(i.rem_euclid(*count as i64) as usize)
            }
            DirectionGrid::Product {
                first,
                second,
                layers,
            } => {
                let d1 = first.dim();
                let n1: f64 = v[..d1].iter().map(|x| x * x).sum::<f64>().sqrt();
                let n2: f64 = v[d1..].iter().map(|x| x * x).sum::<f64>().sqrt();
                if n1 == 0.0 && n2 == 0.0 {
                    return None;
                }
                let psi = n2.atan2(n1);
                let p = ((psi / (0.5 * PI) * *layers as f64).round() as usize).min(*layers);
                let a = if p < *layers {
                    first.classify(&v[..d1])
                } else {
                    Some(0)
                };
                let b = if p > 0 {
                    second.classify(&v[d1..])
                } else {
                    Some(0)
                };
                match (a, b) {
                    (Some(a), Some(b)) => Some(self.product_index(p, a, b)),
                    _ => None,
                }
            }
        }
    }

    pub fn classify_lattice_point(&self, k: &[i64]) -> Option<usize> {
        let v: Vec<f64> = k.iter().map(|&x| x as f64).collect();
        self.classify(&v)
    }

    /// Grid direction of every lattice point in FFT order (`None` at the origin).
    pub fn classify_lattice(&self, grid: &GridSpec) -> Vec<Option<usize>> {
        assert_eq!(
            grid.dim(),
            self.dim(),
            "direction grid and lattice dimensions differ"
        );
        let dim = grid.dim();
        (0..grid.len())
            .map(|flat| {
                let k = grid.freq(flat);
                self.classify_lattice_point(&k[..dim])
            })
            .collect()
    }

    /// Index of the antipodal direction.
    pub fn antipode(&self, i: usize) -> usize {
        match self {
            DirectionGrid::Signs => 1 - i,
            DirectionGrid::Circle { count } => (i + count / 2) % count,
            DirectionGrid::Product { first, second, .. } => {
                let (p, a, b) = self.product_parts(i);
                let a = a.map_or(0, |a| first.antipode(a));
                let b = b.map_or(0, |b| second.antipode(b));
                self.product_index(p, a, b)
            }
        }
    }

    /// Angle between two grid directions.
    pub fn angle_between(&self, i: usize, j: usize) -> f64 {
        match self {
            DirectionGrid::Signs => {
                if i == j {
                    0.0
                } else {
                    PI
                }
            }
            DirectionGrid::Circle { count } => {
                let d = (i as i64 - j as i64).rem_euclid(*count as i64) as usize;
                d.min(count - d) as f64 * 2.0 * PI / *count as f64
            }
            DirectionGrid::Product { .. } => {
                angle_between_vectors(&self.representative(i), &self.representative(j))
            }
        }
    }
}

pub fn angle_between_vectors(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    (dot / (na * nb)).clamp(-1.0, 1.0).acos()
}

/// A closed cone, as the set of grid directions it contains.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DirectionSet {
    grid: DirectionGrid,
    mask: Vec<bool>,
}

impl DirectionSet {
    pub fn empty(grid: DirectionGrid) -> Self {
        let n = grid.len();
        DirectionSet {
            grid,
            mask: vec![false; n],
        }
    }

    pub fn full(grid: DirectionGrid) -> Self {
        let n = grid.len();
        DirectionSet {
            grid,
            mask: vec![true; n],
        }
    }

    pub fn from_indices(grid: DirectionGrid, indices: &[usize]) -> Self {
        let mut out = Self::empty(grid);
        for &i in indices {
            out.mask[i] = true;
        }
        out
    }

    pub fn from_mask(grid: DirectionGrid, mask: Vec<bool>) -> Self {
        assert_eq!(grid.len(), mask.len());
        DirectionSet { grid, mask }
    }

    /// Directions within `half_angle` of some center (unit or not).
    pub fn from_caps(grid: DirectionGrid, centers: &[Vec<f64>], half_angle: f64) -> Self {
        let mask = (0..grid.len())
            .map(|i| {
                let rep = grid.representative(i);
                centers
                    .iter()
                    .any(|c| angle_between_vectors(&rep, c) <= half_angle + ANGLE_TOL)
            })
            .collect();
        DirectionSet { grid, mask }
    }

    /// Caps around angles (circle grids) or signs (sign grids).
    pub fn from_cap_angles(grid: DirectionGrid, centers: &[f64], half_angle: f64) -> Self {
        let vectors: Vec<Vec<f64>> = match grid {
            DirectionGrid::Signs => centers.iter().map(|s| vec![s.signum()]).collect(),
            _ => centers.iter().map(|t| vec![t.cos(), t.sin()]).collect(),
        };
        Self::from_caps(grid, &vectors, half_angle)
    }

    pub fn positive_ray() -> Self {
        Self::from_indices(DirectionGrid::Signs, &[1])
    }

    pub fn negative_ray() -> Self {
        Self::from_indices(DirectionGrid::Signs, &[0])
    }

    pub fn grid(&self) -> &DirectionGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn contains(&self, i: usize) -> bool {
        self.mask[i]
    }

    pub fn contains_vec(&self, v: &[f64]) -> bool {
        self.grid.classify(v).is_some_and(|i| self.mask[i])
    }

    pub fn indices(&self) -> Vec<usize> {
        (0..self.mask.len()).filter(|&i| self.mask[i]).collect()
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|b| **b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|b| *b)
    }

    pub fn is_full(&self) -> bool {
        self.mask.iter().all(|b| *b)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::DimMismatch(format!(
                "direction grids {:?} and {:?}",
                self.grid, other.grid
            )));
        }
        Ok(())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(bool, bool) -> bool) -> Result<Self> {
        self.check(other)?;
        let mask = self
            .mask
            .iter()
            .zip(&other.mask)
            .map(|(a, b)| f(*a, *b))
            .collect();
        Ok(DirectionSet {
            grid: self.grid.clone(),
            mask,
        })
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a && !b)
    }

    pub fn complement(&self) -> Self {
        DirectionSet {
            grid: self.grid.clone(),
            mask: self.mask.iter().map(|b| !b).collect(),
        }
    }

    pub fn is_subset(&self, other: &Self) -> Result<bool> {
        self.check(other)?;
        Ok(self.mask.iter().zip(&other.mask).all(|(a, b)| !a || *b))
    }

    pub fn intersects(&self, other: &Self) -> Result<bool> {
        self.check(other)?;
        Ok(self.mask.iter().zip(&other.mask).any(|(a, b)| *a && *b))
    }

    /// `-V`.
    pub fn negate(&self) -> Self {
        let mut mask = vec![false; self.mask.len()];
        for i in self.indices() {
            mask[self.grid.antipode(i)] = true;
        }
        DirectionSet {
            grid: self.grid.clone(),
            mask,
        }
    }

    /// Smallest angle from direction `i` to a member; `∞` when empty.
    pub fn distance_to(&self, i: usize) -> f64 {
        if self.mask[i] {
            return 0.0;
        }
        match &self.grid {
            DirectionGrid::Circle { count } => {
                let n = *count;
                for d in 1..=n / 2 {
                    if self.mask[(i + d) % n] || self.mask[(i + n - d) % n] {
                        return d as f64 * self.grid.step();
                    }
                }
                f64::INFINITY
            }
            _ => self
                .indices()
                .into_iter()
                .map(|j| self.grid.angle_between(i, j))
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Directions within angle `rho` of the set.
    pub fn dilate(&self, rho: f64) -> Self {
        let mask = (0..self.mask.len())
            .map(|i| self.distance_to(i) <= rho + ANGLE_TOL)
            .collect();
        DirectionSet {
            grid: self.grid.clone(),
            mask,
        }
    }

    /// Closed `eps`-dilation on the sphere: angular radius `arcsin(eps)`.
    pub fn fatten(&self, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "fattening eps {eps} outside (0, 1)"
            )));
        }
        if self.is_empty() {
            return Ok(self.clone());
        }
        let out = self.dilate(eps.asin());
        if out.is_full() {
            return Err(Error::FattenOverflow);
        }
        Ok(out)
    }

    /// Membership of every lattice point (false at the origin).
    pub fn lattice_mask(&self, grid: &GridSpec) -> Vec<bool> {
        self.grid
            .classify_lattice(grid)
            .into_iter()
            .map(|d| d.is_some_and(|i| self.mask[i]))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cap_counts_by_enumeration() {
        let cap = DirectionSet::from_cap_angles(DirectionGrid::circle(360), &[0.0], PI / 8.0);
        assert_eq!(cap.count(), 45);
        let fine = DirectionSet::from_cap_angles(DirectionGrid::circle(720), &[0.0], PI / 8.0);
        assert_eq!(fine.count(), 91);
        let all = DirectionSet::from_cap_angles(DirectionGrid::circle(360), &[0.0], PI);
        assert!(all.is_full());
        let ray = DirectionSet::from_cap_angles(DirectionGrid::Signs, &[1.0], 3.0);
        assert_eq!(ray, DirectionSet::positive_ray());
    }

    #[test]
    fn fatten_examples() {
        assert_eq!(
            DirectionSet::positive_ray().fatten(0.5).unwrap(),
            DirectionSet::positive_ray()
        );
        let g = DirectionGrid::circle(360);
        let cap = DirectionSet::from_cap_angles(g.clone(), &[0.0], 10f64.to_radians());
        let fat = cap.fatten(5f64.to_radians().sin()).unwrap();
        let target = DirectionSet::from_cap_angles(g.clone(), &[0.0], 15f64.to_radians());
        assert_eq!(fat, target);
        let wide = DirectionSet::from_cap_angles(g, &[0.0], 170f64.to_radians());
        assert_eq!(wide.fatten(0.5).unwrap_err().kind(), "FattenOverflow");
    }

    #[test]
    fn product_grid_roundtrip_and_antipodes() {
        let g = DirectionGrid::for_dim(4);
        for i in (0..g.len()).step_by(97) {
            let rep = g.representative(i);
            assert_eq!(g.classify(&rep), Some(i));
            let anti: Vec<f64> = rep.iter().map(|x| -x).collect();
            assert_eq!(g.classify(&anti), Some(g.antipode(i)));
        }
        let g3 = DirectionGrid::for_dim(3);
        for i in 0..g3.len() {
            assert_eq!(g3.classify(&g3.representative(i)), Some(i));
        }
    }

    #[test]
    fn lattice_classification_skips_origin() {
        let grid = GridSpec::new(2, 16).unwrap();
        let dirs = DirectionGrid::circle(8);
        let cls = dirs.classify_lattice(&grid);
        assert_eq!(cls[0], None);
        assert_eq!(cls[grid.flat_index(&[0, 3]).unwrap()], Some(2));
        assert_eq!(cls[grid.flat_index(&[-2, -2]).unwrap()], Some(5));
    }
}
