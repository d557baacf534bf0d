//! Products of distributions through the diagonal, with their gates and certificates.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::conic::{antipodal_witnesses, diagonal_pullback, ConicRegionSet, ProductConicSet};
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::indices::{
    check_sobolev_product, disjoint_support_indices, product_indices, IndexHypotheses,
};
use crate::region::CellLattice;
use crate::seminorm::{q_seminorm, SeminormRatio};
use crate::spectral::SpectralDistribution;
use crate::window::WindowFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProductMode {
    /// Index gate plus transversality of `L1` and `L2`.
    General,
    /// Disjoint-support gate; `L1` and `L2` must live over disjoint cells.
    DisjointSupport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateRecord {
    pub index_gate: String,
    pub transversality_gate: String,
    pub strictness_notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductCertificate {
    pub mode: ProductMode,
    pub hypotheses: IndexHypotheses,
    /// Derived microlocal order (general mode only).
    pub r: Option<f64>,
    pub s_star: f64,
    pub r_star: f64,
    pub gates: GateRecord,
    /// `δ*L` for the product.
    #[serde(skip)]
    pub l_out: Option<ConicRegionSet>,
}

impl ProductCertificate {
    /// JSON with `δ*L` in the conic-set schema.
    pub fn to_json(&self) -> Result<String> {
        let mut value =
            serde_json::to_value(self).map_err(|e| Error::Serialization(e.to_string()))?;
        if let (Some(set), Some(obj)) = (&self.l_out, value.as_object_mut()) {
            let l_out: serde_json::Value = serde_json::from_str(&set.to_json()?)
                .map_err(|e| Error::Serialization(e.to_string()))?;
            obj.insert("l_out".into(), l_out);
        }
        serde_json::to_string_pretty(&value).map_err(|e| Error::Serialization(e.to_string()))
    }
}

#[derive(Debug, Clone)]
pub struct ProductOutcome {
    pub product: SpectralDistribution,
    pub cert: ProductCertificate,
}

/// `uv := δ*(u⊗v)` on band-limited data, gated by the index and wave front hypotheses.
pub fn multiply(
    u: &SpectralDistribution,
    v: &SpectralDistribution,
    l1: &ConicRegionSet,
    l2: &ConicRegionSet,
    h: &IndexHypotheses,
    mode: ProductMode,
) -> Result<ProductOutcome> {
    u.grid().check_same(v.grid())?;
    if h.m != u.dim() {
        return Err(Error::DimMismatch(format!(
            "hypotheses for m = {} on a {}-dimensional field",
            h.m,
            u.dim()
        )));
    }
    let lattice = CellLattice::standard(u.dim());
    let (bounds, transversality, l_out) = match mode {
        ProductMode::General => {
            let bounds = product_indices(h)?;
            let witnesses = antipodal_witnesses(l1, l2, &lattice)?;
            if let Some(&(cell, d)) = witnesses.first() {
                return Err(Error::TransversalityViolated(format!(
                    "cell {cell} centred at {:?}: direction {:?} of L1 has its antipode in L2 ({} witnesses)",
                    lattice.center(cell),
                    l1.grid().representative(d),
                    witnesses.len()
                )));
            }
            let l_out = diagonal_pullback(&ProductConicSet::new(l1.clone(), l2.clone()), &lattice)?;
            (bounds, "passed".to_string(), l_out)
        }
        ProductMode::DisjointSupport => {
            let bounds = disjoint_support_indices(h)?;
            let a = l1.projection(&lattice);
            let shared: Vec<usize> = l2
                .projection(&lattice)
                .into_iter()
                .filter(|c| a.contains(c))
                .collect();
            if !shared.is_empty() {
                return Err(Error::TransversalityViolated(format!(
                    "disjoint-support mode needs L1 and L2 over disjoint cells, both meet cells {shared:?}"
                )));
            }
            (
                bounds,
                "skipped: supports of L1 and L2 are disjoint".to_string(),
                l1.union(l2)?,
            )
        }
    };
    let product = u.dealiased_product(v)?;
    let cert = ProductCertificate {
        mode,
        hypotheses: *h,
        r: bounds.r,
        s_star: bounds.s_star_max,
        r_star: bounds.r_star_max,
        gates: GateRecord {
            index_gate: "passed".into(),
            transversality_gate: transversality,
            strictness_notes: bounds.strictness_notes,
        },
        l_out: Some(l_out),
    };
    Ok(ProductOutcome { product, cert })
}

/// Band part of `û * v̂` by the direct convolution sum.
pub fn direct_convolution(
    u: &SpectralDistribution,
    v: &SpectralDistribution,
) -> Result<SpectralDistribution> {
    u.grid().check_same(v.grid())?;
    let grid: GridSpec = *u.grid();
    let dim = grid.dim();
    let freqs: Vec<[i64; 4]> = (0..grid.len()).map(|f| grid.freq(f)).collect();
    let half = grid.size() as i64 / 2;
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (fl, a) in u.coeffs().iter().enumerate() {
        if *a == Complex64::new(0.0, 0.0) {
            continue;
        }
        let l = &freqs[fl];
        for (fm, b) in v.coeffs().iter().enumerate() {
            let m = &freqs[fm];
            let mut k = [0i64; 4];
            let mut inside = true;
            for ax in 0..dim {
                k[ax] = l[ax] + m[ax];
                inside &= -half < k[ax] && k[ax] < half;
            }
            if inside {
                if let Some(f) = grid.flat_index(&k[..dim]) {
                    out[f] += a * b;
                }
            }
        }
    }
    SpectralDistribution::from_coeffs(grid, out)
}

/// Largest coefficient gap between the padded pointwise route and the direct convolution,
/// relative to the largest coefficient.
pub fn consistency_check(u: &SpectralDistribution, v: &SpectralDistribution) -> Result<f64> {
    let padded = u.dealiased_product(v)?;
    let direct = direct_convolution(u, v)?;
    let scale = direct.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
    let gap = padded
        .coeffs()
        .iter()
        .zip(direct.coeffs())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    Ok(if scale == 0.0 { gap } else { gap / scale })
}

/// `q_{s_*;φ}(uv)` against `q_{r';φ}(u) q_{r'';φ1}(v)`.
#[allow(clippy::too_many_arguments)]
pub fn sobolev_bound_ratio(
    u: &SpectralDistribution,
    v: &SpectralDistribution,
    phi: &WindowFunction,
    phi1: &WindowFunction,
    s_star: f64,
    r_prime: f64,
    r_double_prime: f64,
) -> Result<SeminormRatio> {
    check_sobolev_product(r_prime, r_double_prime, s_star, u.dim())?;
    let uv = u.dealiased_product(v)?;
    let lhs = q_seminorm(&uv, phi, s_star)?;
    let rhs = q_seminorm(u, phi, r_prime)? * q_seminorm(v, phi1, r_double_prime)?;
    Ok(SeminormRatio::new(lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conic::catalog_wavefront;
    use crate::directions::DirectionGrid;
    use crate::synth::{synthesize, DistributionSpec};

    fn grid(n: usize) -> GridSpec {
        GridSpec::new(1, n).unwrap()
    }

    #[test]
    fn delta_times_heaviside_is_not_transversal() {
        let g = grid(256);
        let (sd, sh) = (
            DistributionSpec::delta(&[0.5]),
            DistributionSpec::heaviside(&[0.5]),
        );
        let (u, v) = (synthesize(&sd, &g).unwrap(), synthesize(&sh, &g).unwrap());
        let l1 = catalog_wavefront(&sd, &DirectionGrid::Signs);
        let l2 = catalog_wavefront(&sh, &DirectionGrid::Signs);
        let h = IndexHypotheses::new(1.0, 1.0, 4.0, 4.0, 1);
        let err = multiply(&u, &v, &l1, &l2, &h, ProductMode::General).unwrap_err();
        assert_eq!(err.kind(), "TransversalityViolated");
    }

    #[test]
    fn one_sided_certificate() {
        let g = grid(512);
        let s = DistributionSpec::one_sided_power(0.75, 0.5);
        let u = synthesize(&s, &g).unwrap();
        let l = catalog_wavefront(&s, &DirectionGrid::Signs);
        let h = IndexHypotheses::new(0.2, 0.2, 6.0, 6.0, 1);
        let out = multiply(&u, &u, &l, &l, &h, ProductMode::General).unwrap();
        assert!((out.cert.s_star + 0.1).abs() < 1e-12);
        assert_eq!(out.cert.r_star, 5.5);
        assert_eq!(out.cert.l_out.as_ref().unwrap(), &l_cells(&l));
        let json = out.cert.to_json().unwrap();
        assert!(json.contains("\"l_out\""));
    }

    fn l_cells(l: &ConicRegionSet) -> ConicRegionSet {
        let lat = CellLattice::standard(1);
        ConicRegionSet::from_cell_masks(&lat, &l.cell_masks(&lat))
    }

    #[test]
    fn routes_agree() {
        let g = grid(128);
        let s = DistributionSpec::one_sided_power(0.75, 0.5);
        let u = synthesize(&s, &g).unwrap();
        let v = synthesize(&DistributionSpec::gaussian(&[0.45], 0.05), &g).unwrap();
        assert!(consistency_check(&u, &u).unwrap() < 1e-10);
        assert!(consistency_check(&u, &v).unwrap() < 1e-10);
    }

    #[test]
    fn zero_field_gives_zero_ratio() {
        let g = grid(256);
        let z = SpectralDistribution::zeros(g);
        let w = crate::synth::central_window(1);
        let r = sobolev_bound_ratio(&z, &z, &w, &w, 0.5, 1.0, 1.0).unwrap();
        assert_eq!((r.lhs, r.ratio), (0.0, 0.0));
    }
}
