//! Constructive cover for the tensor continuity estimate: neighbourhoods, cones and cutoffs
//! for one pair of cells, assembled from known conic sets.

use serde::{Deserialize, Serialize};

use crate::conic::ConicRegionSet;
use crate::cutoff::HomogeneousCutoff;
use crate::directions::{DirectionGrid, DirectionSet};
use crate::error::{Error, Result};
use crate::region::{CellLattice, SpatialRegion};
use crate::window::WindowFunction;

/// Vectors shorter than this count as the zero part of `(ξ, η)`.
const ZERO_PART: f64 = 1e-9;

/// Fattening radii tried, largest first.
const EPS_LADDER: [f64; 8] = [0.5, 0.35, 0.25, 0.15, 0.1, 0.05, 0.025, 0.01];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimCover {
    pub first_cell: usize,
    pub second_cell: usize,
    /// `O'`, `U'`: the window supports.
    pub first_region: SpatialRegion,
    pub second_region: SpatialRegion,
    pub first_window: WindowFunction,
    pub second_window: WindowFunction,
    /// Cones of `L1` over `O'` and of `L2` over `U'`.
    pub w_first: DirectionSet,
    pub w_second: DirectionSet,
    /// Radius with `((W1'∪{0}) × (W2'∪{0})) ∩ Ṽ = ∅` for the fattened cones.
    pub eps: f64,
    pub alpha: HomogeneousCutoff,
    pub beta: HomogeneousCutoff,
}

/// Union of the cones of `set` whose region meets the open box `(lo, hi)`.
pub fn cone_over(set: &ConicRegionSet, lo: &[f64], hi: &[f64]) -> DirectionSet {
    let shrink = 1e-12;
    let lo: Vec<f64> = lo.iter().map(|v| v + shrink).collect();
    let hi: Vec<f64> = hi.iter().map(|v| v - shrink).collect();
    let probe = SpatialRegion::from_box(&lo, &hi);
    let mut out = DirectionSet::empty(set.grid().clone());
    for (region, cone) in set.pairs() {
        if !region.intersection(&probe).is_empty() {
            out = out.union(cone).expect("same grid");
        }
    }
    out
}

/// True when direction `d` of the tensor grid lies in `(A∪{0}) × (B∪{0})`.
pub fn in_closed_product(
    grid: &DirectionGrid,
    d: usize,
    first: &DirectionSet,
    second: &DirectionSet,
) -> bool {
    let v = grid.representative(d);
    let m = first.dim();
    let (xi, eta) = v.split_at(m);
    let zero = |w: &[f64]| w.iter().map(|x| x * x).sum::<f64>().sqrt() < ZERO_PART;
    let (xz, ez) = (zero(xi), zero(eta));
    (xz || first.contains_vec(xi)) && (ez || second.contains_vec(eta)) && !(xz && ez)
}

/// Tensor directions of `vtilde` inside `(A∪{0}) × (B∪{0})`.
pub fn product_hits(
    vtilde: &DirectionSet,
    first: &DirectionSet,
    second: &DirectionSet,
) -> Vec<usize> {
    vtilde
        .indices()
        .into_iter()
        .filter(|&d| in_closed_product(vtilde.grid(), d, first, second))
        .collect()
}

/// Angular dilation that tolerates full and empty sets.
fn widen(w: &DirectionSet, angle: f64) -> DirectionSet {
    if w.is_empty() || w.is_full() || angle <= 0.0 {
        w.clone()
    } else {
        w.dilate(angle)
    }
}

fn cutoff_for(w: &DirectionSet, theta: f64) -> Result<(DirectionSet, HomogeneousCutoff)> {
    let fattened = widen(w, theta);
    if !w.is_full() && fattened.is_full() {
        return Err(Error::FattenOverflow);
    }
    let core = widen(w, 0.5 * theta);
    let cutoff = if core == fattened {
        HomogeneousCutoff::indicator(&core)
    } else {
        HomogeneousCutoff::new(&core, &fattened)?
    };
    Ok((fattened, cutoff))
}

/// Builds the cover at `(first_cell, second_cell)`; fails when no radius separates the cones from `vtilde`.
pub fn claim_cover(
    l1: &ConicRegionSet,
    l2: &ConicRegionSet,
    first: (&CellLattice, usize),
    second: (&CellLattice, usize),
    vtilde: &DirectionSet,
) -> Result<ClaimCover> {
    let (la, ca) = first;
    let (lb, cb) = second;
    if vtilde.dim() != la.dim() + lb.dim() {
        return Err(Error::DimMismatch(format!(
            "cone of dimension {} for factors of dimensions {} and {}",
            vtilde.dim(),
            la.dim(),
            lb.dim()
        )));
    }
    let (alo, ahi) = la.window_box(ca);
    let (blo, bhi) = lb.window_box(cb);
    let w_first = cone_over(l1, &alo, &ahi);
    let w_second = cone_over(l2, &blo, &bhi);
    let hits = product_hits(vtilde, &w_first, &w_second);
    if !hits.is_empty() {
        return Err(Error::ClaimFailed(format!(
            "Ṽ meets (W1∪{{0}})×(W2∪{{0}}) at {} tensor directions, first {:?}",
            hits.len(),
            vtilde.grid().representative(hits[0])
        )));
    }
    for eps in EPS_LADDER {
        let theta = eps.asin();
        let Ok((fa, alpha)) = cutoff_for(&w_first, theta) else {
            continue;
        };
        let Ok((fb, beta)) = cutoff_for(&w_second, theta) else {
            continue;
        };
        if product_hits(vtilde, &fa, &fb).is_empty() {
            return Ok(ClaimCover {
                first_cell: ca,
                second_cell: cb,
                first_region: SpatialRegion::from_box(&alo, &ahi),
                second_region: SpatialRegion::from_box(&blo, &bhi),
                first_window: la.window(ca),
                second_window: lb.window(cb),
                w_first,
                w_second,
                eps,
                alpha,
                beta,
            });
        }
    }
    Err(Error::ClaimFailed(format!(
        "no eps down to {} keeps the fattened cones off Ṽ",
        EPS_LADDER[EPS_LADDER.len() - 1]
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conic::catalog_wavefront;
    use crate::synth::DistributionSpec;

    fn tensor_grid() -> DirectionGrid {
        DirectionGrid::circle(360)
    }

    #[test]
    fn one_sided_pair_has_a_cover() {
        let spec = DistributionSpec::one_sided_power(0.75, 0.5);
        let l = catalog_wavefront(&spec, &DirectionGrid::Signs);
        let lat = CellLattice::standard(1);
        let vt = DirectionSet::from_cap_angles(
            tensor_grid(),
            &[225f64.to_radians()],
            60f64.to_radians(),
        );
        let cover = claim_cover(&l, &l, (&lat, 4), (&lat, 4), &vt).unwrap();
        assert_eq!(cover.w_first, DirectionSet::positive_ray());
        assert_eq!(cover.alpha.values(), &[0.0, 1.0]);
        let hit =
            DirectionSet::from_cap_angles(tensor_grid(), &[45f64.to_radians()], 10f64.to_radians());
        assert!(matches!(
            claim_cover(&l, &l, (&lat, 4), (&lat, 4), &hit),
            Err(Error::ClaimFailed(_))
        ));
    }

    #[test]
    fn axis_directions_count_as_zero_parts() {
        let g = tensor_grid();
        let pos = DirectionSet::positive_ray();
        let none = DirectionSet::empty(DirectionGrid::Signs);
        assert!(in_closed_product(&g, 0, &pos, &none));
        assert!(!in_closed_product(&g, 180, &pos, &none));
        assert!(!in_closed_product(&g, 45, &pos, &none));
        assert!(in_closed_product(&g, 45, &pos, &pos));
    }

    #[test]
    fn away_cells_see_no_cone() {
        let spec = DistributionSpec::delta(&[0.5]);
        let l = catalog_wavefront(&spec, &DirectionGrid::Signs);
        let lat = CellLattice::standard(1);
        assert!(cone_over(&l, &lat.window_box(3).0, &lat.window_box(3).1).is_empty());
        assert!(cone_over(&l, &lat.window_box(4).0, &lat.window_box(4).1).is_full());
    }
}
