//! Closed conic sets `⋃ region × cone`, the tensor-product set and the diagonal pullback.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::directions::{DirectionGrid, DirectionSet};
use crate::error::{Error, Result};
use crate::region::{CellLattice, SpatialRegion};
use crate::synth::{DistributionSpec, CENTRAL_HI, CENTRAL_LO};

#[derive(Debug, Clone, PartialEq)]
pub struct ConicRegionSet {
    grid: DirectionGrid,
    pairs: Vec<(SpatialRegion, DirectionSet)>,
}

impl ConicRegionSet {
    pub fn empty(grid: DirectionGrid) -> Self {
        ConicRegionSet {
            grid,
            pairs: Vec::new(),
        }
    }

    pub fn single(region: SpatialRegion, cone: DirectionSet) -> Self {
        let mut out = Self::empty(cone.grid().clone());
        out.push(region, cone);
        out
    }

    pub fn push(&mut self, region: SpatialRegion, cone: DirectionSet) {
        assert_eq!(
            cone.grid(),
            &self.grid,
            "cone on a different direction grid"
        );
        assert_eq!(
            region.dim(),
            self.grid.dim(),
            "region and cone dimensions differ"
        );
        if !region.is_empty() && !cone.is_empty() {
            self.pairs.push((region, cone));
        }
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn grid(&self) -> &DirectionGrid {
        &self.grid
    }

    pub fn pairs(&self) -> &[(SpatialRegion, DirectionSet)] {
        &self.pairs
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::DimMismatch(
                "conic sets on different direction grids".into(),
            ));
        }
        let mut out = self.clone();
        out.pairs.extend(other.pairs.iter().cloned());
        Ok(out)
    }

    /// Per-cell union of the cones whose region meets the cell.
    pub fn cell_masks(&self, lattice: &CellLattice) -> Vec<DirectionSet> {
        let mut masks = vec![DirectionSet::empty(self.grid.clone()); lattice.len()];
        for (region, cone) in &self.pairs {
            for cell in region.cells(lattice) {
                masks[cell] = masks[cell].union(cone).expect("same grid");
            }
        }
        masks
    }

    pub fn from_cell_masks(lattice: &CellLattice, masks: &[DirectionSet]) -> Self {
        let grid = masks
            .first()
            .map_or(DirectionGrid::for_dim(lattice.dim()), |m| m.grid().clone());
        let mut out = Self::empty(grid);
        for (cell, mask) in masks.iter().enumerate() {
            out.push(lattice.region_of_cells(&[cell]), mask.clone());
        }
        out
    }

    pub fn member(&self, lattice: &CellLattice, cell: usize, direction: usize) -> bool {
        self.pairs
            .iter()
            .any(|(r, c)| c.contains(direction) && r.meets_cell(lattice, cell))
    }

    /// Cells carrying at least one direction.
    pub fn projection(&self, lattice: &CellLattice) -> Vec<usize> {
        self.cell_masks(lattice)
            .iter()
            .enumerate()
            .filter(|(_, m)| !m.is_empty())
            .map(|(c, _)| c)
            .collect()
    }

    /// Cell-level inclusion `self ⊆ other`, with the violating `(cell, direction)` pairs.
    pub fn violations_against(
        &self,
        other: &Self,
        lattice: &CellLattice,
    ) -> Result<Vec<(usize, usize)>> {
        if self.grid != other.grid {
            return Err(Error::DimMismatch(
                "conic sets on different direction grids".into(),
            ));
        }
        let mine = self.cell_masks(lattice);
        let theirs = other.cell_masks(lattice);
        let mut out = Vec::new();
        for (cell, (a, b)) in mine.iter().zip(&theirs).enumerate() {
            for d in a.difference(b)?.indices() {
                out.push((cell, d));
            }
        }
        Ok(out)
    }

    /// Re-expresses every cone on another direction grid of the same dimension.
    pub fn resample(&self, grid: &DirectionGrid) -> Self {
        let mut out = Self::empty(grid.clone());
        for (region, cone) in &self.pairs {
            out.push(region.clone(), resample_cone(cone, grid));
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        let entries: Vec<ConicEntry> = self
            .pairs
            .iter()
            .map(|(region, cone)| ConicEntry {
                boxes: region.to_flat_boxes(),
                cone: ConeDescription::from_set(cone),
            })
            .collect();
        let doc = ConicDocument {
            dim: self.dim(),
            directions: self.grid.clone(),
            entries,
        };
        serde_json::to_string_pretty(&doc).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ConicDocument =
            serde_json::from_str(text).map_err(|e| Error::Serialization(e.to_string()))?;
        if doc.directions.dim() != doc.dim {
            return Err(Error::Serialization(
                "direction grid dimension differs from dim".into(),
            ));
        }
        let mut out = Self::empty(doc.directions.clone());
        for entry in doc.entries {
            let region = SpatialRegion::from_flat_boxes(doc.dim, &entry.boxes)
                .ok_or_else(|| Error::Serialization("box with wrong arity".into()))?;
            out.push(region, entry.cone.to_set(&doc.directions));
        }
        Ok(out)
    }
}

/// Direction `i` of the new grid is kept when its representative classifies into the old cone.
pub fn resample_cone(cone: &DirectionSet, grid: &DirectionGrid) -> DirectionSet {
    if cone.grid() == grid {
        return cone.clone();
    }
    let mask = (0..grid.len())
        .map(|i| cone.contains_vec(&grid.representative(i)))
        .collect();
    DirectionSet::from_mask(grid.clone(), mask)
}

#[derive(Serialize, Deserialize)]
struct ConicDocument {
    dim: usize,
    directions: DirectionGrid,
    entries: Vec<ConicEntry>,
}

#[derive(Serialize, Deserialize)]
struct ConicEntry {
    boxes: Vec<Vec<f64>>,
    cone: ConeDescription,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConeCenter {
    Scalar(f64),
    Vector(Vec<f64>),
}

/// Union of caps: signs in one dimension, angles in radians in two, unit vectors above.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeDescription {
    pub centers: Vec<ConeCenter>,
    pub half_angle: f64,
}

impl ConeDescription {
    /// Exact description of a mask: its member directions with zero half-angle.
    pub fn from_set(cone: &DirectionSet) -> Self {
        let grid = cone.grid();
        let centers = cone
            .indices()
            .into_iter()
            .map(|i| {
                let rep = grid.representative(i);
                match grid {
                    DirectionGrid::Signs => ConeCenter::Scalar(rep[0]),
                    DirectionGrid::Circle { count } => {
                        ConeCenter::Scalar(2.0 * PI * i as f64 / *count as f64)
                    }
                    DirectionGrid::Product { .. } => ConeCenter::Vector(rep),
                }
            })
            .collect();
        ConeDescription {
            centers,
            half_angle: 0.0,
        }
    }

    pub fn to_set(&self, grid: &DirectionGrid) -> DirectionSet {
        let vectors: Vec<Vec<f64>> = self
            .centers
            .iter()
            .map(|c| match (c, grid) {
                (ConeCenter::Scalar(s), DirectionGrid::Signs) => vec![s.signum()],
                (ConeCenter::Scalar(t), _) => vec![t.cos(), t.sin()],
                (ConeCenter::Vector(v), _) => v.clone(),
            })
            .collect();
        DirectionSet::from_caps(grid.clone(), &vectors, self.half_angle)
    }
}

/// No cell carries a direction of `L1` whose antipode lies in `L2`.
pub fn transversal(
    first: &ConicRegionSet,
    second: &ConicRegionSet,
    lattice: &CellLattice,
) -> Result<bool> {
    Ok(antipodal_witnesses(first, second, lattice)?.is_empty())
}

/// `(cell, ω)` with `ω ∈ L1(cell)` and `-ω ∈ L2(cell)`.
pub fn antipodal_witnesses(
    first: &ConicRegionSet,
    second: &ConicRegionSet,
    lattice: &CellLattice,
) -> Result<Vec<(usize, usize)>> {
    if first.dim() != second.dim() || first.dim() != lattice.dim() {
        return Err(Error::DimMismatch(format!(
            "conic sets of dimension {} and {} on a {}-dimensional lattice",
            first.dim(),
            second.dim(),
            lattice.dim()
        )));
    }
    if first.grid() != second.grid() {
        return Err(Error::DimMismatch(
            "conic sets on different direction grids".into(),
        ));
    }
    let a = first.cell_masks(lattice);
    let b = second.cell_masks(lattice);
    let mut out = Vec::new();
    for (cell, (ma, mb)) in a.iter().zip(&b).enumerate() {
        for d in ma.intersection(&mb.negate())?.indices() {
            out.push((cell, d));
        }
    }
    Ok(out)
}

/// `(supp φ × V) ∩ L = ∅` at cell level.
pub fn region_cone_disjoint(
    region: &SpatialRegion,
    cone: &DirectionSet,
    set: &ConicRegionSet,
    lattice: &CellLattice,
) -> Result<bool> {
    if cone.grid() != set.grid() {
        return Err(Error::DimMismatch(
            "cone and conic set on different direction grids".into(),
        ));
    }
    let masks = set.cell_masks(lattice);
    for cell in region.cells(lattice) {
        if masks[cell].intersects(cone)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The product set `(L1 × L2) ∪ (L1 × (U×{0})) ∪ ((O×{0}) × L2)`, kept symbolic.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductConicSet {
    pub first: ConicRegionSet,
    pub second: ConicRegionSet,
    /// `O`: base points allowed when `ξ = 0`.
    pub first_support: SpatialRegion,
    /// `U`: base points allowed when `η = 0`.
    pub second_support: SpatialRegion,
}

impl ProductConicSet {
    /// Product set over the full unit cubes.
    pub fn new(first: ConicRegionSet, second: ConicRegionSet) -> Self {
        let (m, n) = (first.dim(), second.dim());
        ProductConicSet {
            first,
            second,
            first_support: SpatialRegion::full(m),
            second_support: SpatialRegion::full(n),
        }
    }

    pub fn with_supports(mut self, first: SpatialRegion, second: SpatialRegion) -> Self {
        self.first_support = first;
        self.second_support = second;
        self
    }

    fn factor_member(set: &ConicRegionSet, x: &[f64], dir: &[f64]) -> bool {
        set.pairs()
            .iter()
            .any(|(r, c)| r.contains(x) && c.contains_vec(dir))
    }

    /// Pointwise membership of `((x, y), (ξ, η))`, `(ξ, η) ≠ 0`.
    pub fn contains(&self, x: &[f64], y: &[f64], xi: &[f64], eta: &[f64]) -> bool {
        let xi_zero = xi.iter().all(|v| *v == 0.0);
        let eta_zero = eta.iter().all(|v| *v == 0.0);
        if xi_zero && eta_zero {
            return false;
        }
        if !xi_zero && !eta_zero {
            return Self::factor_member(&self.first, x, xi)
                && Self::factor_member(&self.second, y, eta);
        }
        if eta_zero {
            Self::factor_member(&self.first, x, xi) && self.second_support.contains(y)
        } else {
            Self::factor_member(&self.second, y, eta) && self.first_support.contains(x)
        }
    }

    /// Cell-level membership: factor cells, factor lattices, and the direction `(ξ, η)`.
    pub fn contains_cells(
        &self,
        lattices: (&CellLattice, &CellLattice),
        cells: (usize, usize),
        xi: &[f64],
        eta: &[f64],
    ) -> bool {
        let in_first = |dir: &[f64]| {
            self.first
                .grid()
                .classify(dir)
                .is_some_and(|d| self.first.member(lattices.0, cells.0, d))
        };
        let in_second = |dir: &[f64]| {
            self.second
                .grid()
                .classify(dir)
                .is_some_and(|d| self.second.member(lattices.1, cells.1, d))
        };
        let xi_zero = xi.iter().all(|v| *v == 0.0);
        let eta_zero = eta.iter().all(|v| *v == 0.0);
        match (xi_zero, eta_zero) {
            (true, true) => false,
            (false, false) => in_first(xi) && in_second(eta),
            (false, true) => in_first(xi) && self.second_support.meets_cell(lattices.1, cells.1),
            (true, false) => in_second(eta) && self.first_support.meets_cell(lattices.0, cells.0),
        }
    }
}

/// `{(x, x; ξ, -ξ)}`: the conormal of the diagonal.
pub fn in_diagonal_conormal(x: &[f64], y: &[f64], xi: &[f64], eta: &[f64]) -> bool {
    let tol = 1e-12;
    x.iter().zip(y).all(|(a, b)| (a - b).abs() <= tol)
        && xi.iter().zip(eta).all(|(a, b)| (a + b).abs() <= tol)
}

/// `δ*L`: per cell `L1(x) ∪ L2(x) ∪ {positive sums}`; an antipodal pair is a zero sum.
pub fn diagonal_pullback(
    product: &ProductConicSet,
    lattice: &CellLattice,
) -> Result<ConicRegionSet> {
    let (first, second) = (&product.first, &product.second);
    if first.dim() != second.dim() || first.dim() != lattice.dim() || first.dim() > 2 {
        return Err(Error::DimMismatch(format!(
            "diagonal pullback needs equal factor dimensions up to 2, got {} and {}",
            first.dim(),
            second.dim()
        )));
    }
    if first.grid() != second.grid() {
        return Err(Error::DimMismatch(
            "factor cones on different direction grids".into(),
        ));
    }
    let grid = first.grid().clone();
    let a = first.cell_masks(lattice);
    let b = second.cell_masks(lattice);
    let mut out = Vec::with_capacity(lattice.len());
    for (cell, (ma, mb)) in a.iter().zip(&b).enumerate() {
        let mut mask = ma.union(mb)?.mask().to_vec();
        if !ma.is_empty() && !mb.is_empty() {
            for i in ma.indices() {
                let anti = grid.antipode(i);
                if mb.contains(anti) {
                    return Err(Error::TransversalityViolated(format!(
                        "cell {cell}: direction {:?} of L1 meets its antipode in L2",
                        grid.representative(i)
                    )));
                }
                if let DirectionGrid::Circle { count } = grid {
                    let n = count;
                    let reach = |sign: i64| {
                        (1..n / 2)
                            .filter(|&d| {
                                mb.contains(
                                    (i as i64 + sign * d as i64).rem_euclid(n as i64) as usize
                                )
                            })
                            .max()
                            .unwrap_or(0)
                    };
                    let ccw = reach(1);
                    let cw = reach(-1);
                    for d in 0..=ccw {
                        mask[(i + d) % n] = true;
                    }
                    for d in 0..=cw {
                        mask[(i + n - d) % n] = true;
                    }
                }
            }
        }
        out.push(DirectionSet::from_mask(grid.clone(), mask));
    }
    Ok(ConicRegionSet::from_cell_masks(lattice, &out))
}

/// Catalog ground truth for the wave front of a member, on a given direction grid.
pub fn catalog_wavefront(spec: &DistributionSpec, grid: &DirectionGrid) -> ConicRegionSet {
    let m = spec.dim();
    let mut out = ConicRegionSet::empty(grid.clone());
    let full = DirectionSet::full(grid.clone());
    match spec {
        DistributionSpec::Delta { x0 } | DistributionSpec::PowerSingularity { x0, .. } => {
            out.push(SpatialRegion::point(x0), full);
        }
        DistributionSpec::OneSidedPower { x0, .. } => {
            out.push(
                SpatialRegion::point(&[*x0]),
                DirectionSet::from_cap_angles(grid.clone(), &[1.0], 0.0),
            );
        }
        DistributionSpec::Heaviside { x0, normal_angle } => {
            if m == 1 {
                out.push(SpatialRegion::point(x0), full);
            } else {
                let normals = DirectionSet::from_caps(
                    grid.clone(),
                    &[
                        vec![normal_angle.cos(), normal_angle.sin()],
                        vec![-normal_angle.cos(), -normal_angle.sin()],
                    ],
                    0.5 * grid.step(),
                );
                let c = normal_angle.cos().abs();
                let region = if (c - 1.0).abs() < 1e-12 {
                    SpatialRegion::from_box(&[x0[0], CENTRAL_LO], &[x0[0], CENTRAL_HI])
                } else if c < 1e-12 {
                    SpatialRegion::from_box(&[CENTRAL_LO, x0[1]], &[CENTRAL_HI, x0[1]])
                } else {
                    SpatialRegion::from_box(&[CENTRAL_LO; 2], &[CENTRAL_HI; 2])
                };
                out.push(region, normals);
            }
        }
        DistributionSpec::CustomSpectral { x0, cone, .. } => {
            let set = match cone {
                None => full,
                Some(c) => match grid {
                    DirectionGrid::Signs => {
                        DirectionSet::from_cap_angles(grid.clone(), &c.centers, 0.0)
                    }
                    _ => DirectionSet::from_cap_angles(grid.clone(), &c.centers, c.half_angle),
                },
            };
            out.push(SpatialRegion::point(x0), set);
        }
        DistributionSpec::GaussianBump { .. } | DistributionSpec::PlaneChirp { .. } => {}
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn deg(d: f64) -> f64 {
        d.to_radians()
    }

    #[test]
    fn transversality_examples() {
        let lat = CellLattice::standard(1);
        let x0 = SpatialRegion::point(&[0.5]);
        let ray = ConicRegionSet::single(x0.clone(), DirectionSet::positive_ray());
        assert!(transversal(&ray, &ray, &lat).unwrap());
        let line = ConicRegionSet::single(x0, DirectionSet::full(DirectionGrid::Signs));
        assert!(!transversal(&line, &line, &lat).unwrap());

        let lat2 = CellLattice::standard(2);
        let g = DirectionGrid::circle(360);
        let p = SpatialRegion::point(&[0.5, 0.5]);
        let l1 = ConicRegionSet::single(
            p.clone(),
            DirectionSet::from_cap_angles(g.clone(), &[0.0], deg(30.0)),
        );
        let l2 = ConicRegionSet::single(
            p,
            DirectionSet::from_cap_angles(g, &[deg(170.0)], deg(15.0)),
        );
        assert!(!transversal(&l1, &l2, &lat2).unwrap());
    }

    #[test]
    fn pullback_of_rays_and_arcs() {
        let lat = CellLattice::standard(1);
        let x0 = SpatialRegion::point(&[0.5]);
        let ray = ConicRegionSet::single(x0.clone(), DirectionSet::positive_ray());
        let pulled =
            diagonal_pullback(&ProductConicSet::new(ray.clone(), ray.clone()), &lat).unwrap();
        assert_eq!(pulled.cell_masks(&lat), ray.cell_masks(&lat));
        let none = ConicRegionSet::empty(DirectionGrid::Signs);
        let only = diagonal_pullback(&ProductConicSet::new(ray.clone(), none), &lat).unwrap();
        assert_eq!(only.cell_masks(&lat), ray.cell_masks(&lat));
        let line = ConicRegionSet::single(x0, DirectionSet::full(DirectionGrid::Signs));
        let err = diagonal_pullback(&ProductConicSet::new(line, ray), &lat).unwrap_err();
        assert_eq!(err.kind(), "TransversalityViolated");
    }

    #[test]
    fn json_roundtrip() {
        let g = DirectionGrid::circle(360);
        let set = ConicRegionSet::single(
            SpatialRegion::from_box(&[0.4, 0.4], &[0.5, 0.6]),
            DirectionSet::from_cap_angles(g, &[deg(45.0)], deg(10.0)),
        );
        let back = ConicRegionSet::from_json(&set.to_json().unwrap()).unwrap();
        assert_eq!(back, set);
    }

    #[test]
    fn product_membership_branches() {
        let g = DirectionGrid::Signs;
        let l1 = ConicRegionSet::single(SpatialRegion::point(&[0.5]), DirectionSet::positive_ray());
        let l2 = ConicRegionSet::single(SpatialRegion::point(&[0.4]), DirectionSet::negative_ray());
        let prod = ProductConicSet::new(l1, l2.clone());
        assert!(prod.contains(&[0.5], &[0.3], &[2.0], &[0.0]));
        assert!(!prod.contains(&[0.5], &[0.4], &[2.0], &[1.0]));
        assert!(prod.contains(&[0.5], &[0.4], &[2.0], &[-1.0]));
        let empty_first = ProductConicSet::new(ConicRegionSet::empty(g), l2);
        assert!(!empty_first.contains(&[0.5], &[0.4], &[1.0], &[-1.0]));
        assert!(empty_first.contains(&[0.7], &[0.4], &[0.0], &[-1.0]));
        assert!(in_diagonal_conormal(&[0.5], &[0.5], &[1.0], &[-1.0]));
    }
}
