//! Smooth degree-0 cutoffs on direction grids.

use serde::{Deserialize, Serialize};

use crate::directions::{DirectionGrid, DirectionSet, ANGLE_TOL};
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::window::smoothstep;

/// A function of the frequency direction: 1 on `core`, 0 off `fattened`, a smoothstep ramp between.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomogeneousCutoff {
    grid: DirectionGrid,
    values: Vec<f64>,
    /// Half-width of the narrowest transition band, in radians (`∞` when there is none).
    transition: f64,
}

impl HomogeneousCutoff {
    /// Builds the cutoff; `core` must sit in the interior of `fattened`.
    ///
    /// On grids with neighbouring directions the ramp runs from the core to the last
    /// fattened direction, so `S(1/2)` falls on the angular midpoint of the band.
    pub fn new(core: &DirectionSet, fattened: &DirectionSet) -> Result<Self> {
        if core.grid() != fattened.grid() {
            return Err(Error::DimMismatch(
                "cutoff core and fattened cone on different grids".into(),
            ));
        }
        if !core.is_subset(fattened)? {
            return Err(Error::NoTransitionRoom);
        }
        let grid = core.grid().clone();
        let outside = fattened.complement();
        let adjacent = !matches!(grid, DirectionGrid::Signs);
        let step = grid.step();
        if adjacent && !outside.is_empty() {
            for i in core.indices() {
                if outside.distance_to(i) <= step + ANGLE_TOL {
                    return Err(Error::NoTransitionRoom);
                }
            }
        }
        let mut transition = f64::INFINITY;
        let values = (0..grid.len())
            .map(|i| {
                if core.contains(i) {
                    1.0
                } else if !fattened.contains(i) {
                    0.0
                } else {
                    let to_core = core.distance_to(i);
                    let to_edge = outside.distance_to(i) - step;
                    if !to_core.is_finite() {
                        return 0.0;
                    }
                    if !to_edge.is_finite() {
                        return 1.0;
                    }
                    transition = transition.min(0.5 * (to_core + to_edge));
                    smoothstep(to_edge / (to_core + to_edge))
                }
            })
            .collect();
        Ok(HomogeneousCutoff {
            grid,
            values,
            transition,
        })
    }

    /// The indicator of `set` (no transition band).
    pub fn indicator(set: &DirectionSet) -> Self {
        HomogeneousCutoff {
            grid: set.grid().clone(),
            values: set
                .mask()
                .iter()
                .map(|&b| if b { 1.0 } else { 0.0 })
                .collect(),
            transition: f64::INFINITY,
        }
    }

    pub fn grid(&self) -> &DirectionGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, direction: usize) -> f64 {
        self.values[direction]
    }

    pub fn transition(&self) -> f64 {
        self.transition
    }

    /// `supp α`: directions with a positive value.
    pub fn support(&self) -> DirectionSet {
        DirectionSet::from_mask(
            self.grid.clone(),
            self.values.iter().map(|&v| v > 0.0).collect(),
        )
    }

    /// `supp(1 - α)`.
    pub fn complement_support(&self) -> DirectionSet {
        DirectionSet::from_mask(
            self.grid.clone(),
            self.values.iter().map(|&v| v < 1.0).collect(),
        )
    }

    /// `α(ξ) = values(ξ/|ξ|)` at a frequency vector, `α(0) = 0`.
    pub fn eval(&self, xi: &[f64]) -> f64 {
        self.grid.classify(xi).map_or(0.0, |d| self.values[d])
    }

    /// `α` on every lattice point of a spectral grid.
    pub fn lattice_values(&self, grid: &GridSpec) -> Vec<f64> {
        self.grid
            .classify_lattice(grid)
            .into_iter()
            .map(|d| d.map_or(0.0, |i| self.values[i]))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn signs_need_no_transition() {
        let core = DirectionSet::positive_ray();
        let c = HomogeneousCutoff::new(&core, &core).unwrap();
        assert_eq!(c.values(), &[0.0, 1.0]);
    }

    #[test]
    fn equal_caps_have_no_room() {
        let g = DirectionGrid::circle(360);
        let cap = DirectionSet::from_cap_angles(g, &[0.0], 10f64.to_radians());
        assert_eq!(
            HomogeneousCutoff::new(&cap, &cap),
            Err(Error::NoTransitionRoom)
        );
    }

    #[test]
    fn ramp_midpoint_is_half() {
        let g = DirectionGrid::circle(360);
        let core = DirectionSet::from_cap_angles(g.clone(), &[0.0], 10f64.to_radians());
        let fat = DirectionSet::from_cap_angles(g, &[0.0], 20f64.to_radians());
        let c = HomogeneousCutoff::new(&core, &fat).unwrap();
        assert!((c.value(15) - 0.5).abs() < 0.05);
        assert_eq!(c.value(10), 1.0);
        assert_eq!(c.value(21), 0.0);
        assert!((c.transition() - 5f64.to_radians()).abs() < 1e-9);
        let slope = (0..359)
            .map(|i| (c.value(i + 1) - c.value(i)).abs())
            .fold(0.0, f64::max)
            / (PI / 180.0);
        assert!(slope <= 2.0 / c.transition());
    }
}
