//! Four-way cone splitting of a windowed tensor spectrum and the bounds on each piece.

use serde::{Deserialize, Serialize};

use crate::cutoff::HomogeneousCutoff;
use crate::directions::DirectionSet;
use crate::error::{Error, GateCode, Result};
use crate::grid::check_order;
use crate::indices::{tensor_indices, IndexHypotheses};
use crate::spectral::SpectralDistribution;
use crate::window::WindowFunction;

/// Relative slack allowed on the bound and coverage checks.
pub const BOUND_SLACK: f64 = 1e-10;

/// Case by the signs of `(r', r'')`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignCase {
    /// `r', r'' >= 0`
    A,
    /// `r' < 0 <= r''`
    B,
    /// `r'' < 0 <= r'`
    C,
    /// `r', r'' < 0`
    D,
}

impl SignCase {
    pub fn of(h: &IndexHypotheses) -> Self {
        match (h.r_prime >= 0.0, h.r_double_prime >= 0.0) {
            (true, true) => SignCase::A,
            (false, true) => SignCase::B,
            (true, false) => SignCase::C,
            (false, false) => SignCase::D,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            SignCase::A => "a",
            SignCase::B => "b",
            SignCase::C => "c",
            SignCase::D => "d",
        }
    }
}

/// One term against its right-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TermBound {
    pub value: f64,
    /// The seminorm product the term is bounded by (constant excluded).
    pub rhs: f64,
    /// `value / rhs`.
    pub fitted_constant: f64,
    /// Largest weight ratio over the term's integration domain on the lattice.
    pub sup_constant: f64,
    /// `value <= sup_constant · rhs` up to [`BOUND_SLACK`].
    pub holds: bool,
}

impl TermBound {
    fn new(value: f64, rhs: f64, sup_constant: f64) -> Self {
        let fitted_constant = if rhs > 0.0 {
            value / rhs
        } else if value == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        let holds = value <= sup_constant * rhs * (1.0 + BOUND_SLACK) || value == 0.0;
        TermBound {
            value,
            rhs,
            fitted_constant,
            sup_constant,
            holds,
        }
    }
}

/// Factor seminorms entering the bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FactorNorms {
    pub l2_first: f64,
    pub l2_second: f64,
    /// `q_{r';φ1}(u)`, `q_{r'';φ2}(v)`.
    pub q_first: f64,
    pub q_second: f64,
    /// `p_{r1;φ1,C_α}(u)`, `p_{r2;φ2,C_β}(v)`.
    pub p_first: f64,
    pub p_second: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourTermReport {
    pub r: f64,
    pub hypotheses: IndexHypotheses,
    pub case: SignCase,
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    pub i4: f64,
    /// `p_{r;φ1⊗φ2,Ṽ}(u⊗v)`.
    pub total: f64,
    pub norms: FactorNorms,
    pub bound2: TermBound,
    pub bound3: TermBound,
    pub bound4: TermBound,
    /// `I1 + I2 + I3 + I4 >= total` up to [`BOUND_SLACK`].
    pub covers: bool,
}

impl FourTermReport {
    pub fn all_bounds_hold(&self) -> bool {
        self.i1 == 0.0 && self.bound2.holds && self.bound3.holds && self.bound4.holds && self.covers
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Serialization(e.to_string()))
    }
}

struct FactorData {
    coeffs2: Vec<f64>,
    norms: Vec<u64>,
    cutoff: Vec<f64>,
    freqs: Vec<[i64; 4]>,
    dim: usize,
}

impl FactorData {
    fn new(
        u: &SpectralDistribution,
        phi: &WindowFunction,
        cutoff: &HomogeneousCutoff,
    ) -> Result<Self> {
        if cutoff.grid().dim() != u.dim() {
            return Err(Error::DimMismatch(
                "cutoff and factor dimensions differ".into(),
            ));
        }
        let grid = *u.grid();
        let windowed = u.window_multiply(phi)?;
        Ok(FactorData {
            coeffs2: windowed.coeffs().iter().map(|c| c.norm_sqr()).collect(),
            norms: grid.norms_squared(),
            cutoff: cutoff.lattice_values(&grid),
            freqs: (0..grid.len()).map(|f| grid.freq(f)).collect(),
            dim: grid.dim(),
        })
    }

    fn bracket(&self, i: usize, power: f64) -> f64 {
        (1.0 + self.norms[i] as f64).powf(power / 2.0)
    }

    fn q(&self, s: f64) -> f64 {
        (0..self.coeffs2.len())
            .map(|i| self.bracket(i, 2.0 * s) * self.coeffs2[i])
            .sum::<f64>()
            .sqrt()
    }

    /// `p` over the cone where the cutoff is below 1.
    fn p_outside(&self, r: f64) -> f64 {
        (0..self.coeffs2.len())
            .filter(|&i| self.norms[i] > 0 && self.cutoff[i] < 1.0)
            .map(|i| self.bracket(i, 2.0 * r) * self.coeffs2[i])
            .sum::<f64>()
            .sqrt()
    }
}

/// Splits `ℱ(φ1u)(ξ)ℱ(φ2v)(η)` by `α(ξ)` and `β(η)` and evaluates the four weighted pieces over `Ṽ`.
#[allow(clippy::too_many_arguments)]
pub fn four_term_decomposition(
    u: &SpectralDistribution,
    v: &SpectralDistribution,
    phi1: &WindowFunction,
    phi2: &WindowFunction,
    alpha: &HomogeneousCutoff,
    beta: &HomogeneousCutoff,
    vtilde: &DirectionSet,
    r: f64,
    h: &IndexHypotheses,
) -> Result<FourTermReport> {
    check_order(r)?;
    h.validate()?;
    let r_max = tensor_indices(h).r_max;
    if r > r_max + 1e-12 {
        return Err(Error::inadmissible(
            GateCode::TensorOrderTooHigh,
            format!("r = {r} exceeds min{{r1 + min{{0,r''}}, r2 + min{{0,r'}}}} = {r_max}"),
        ));
    }
    if u.grid().size() != v.grid().size() {
        return Err(Error::GridMismatch("factors on different N".into()));
    }
    if vtilde.dim() != u.dim() + v.dim() {
        return Err(Error::DimMismatch(
            "Ṽ must live in the tensor dimension".into(),
        ));
    }
    let a = FactorData::new(u, phi1, alpha)?;
    let b = FactorData::new(v, phi2, beta)?;
    let (low1, low2) = (h.r_prime.min(0.0), h.r_double_prime.min(0.0));
    let grid = vtilde.grid();
    let mut sums = [0.0f64; 5];
    let mut sup = [0.0f64; 3];
    let mut vec = [0.0f64; 8];
    for i in 0..a.coeffs2.len() {
        let (al, n1) = (a.cutoff[i], a.norms[i]);
        for (slot, k) in vec.iter_mut().zip(&a.freqs[i][..a.dim]) {
            *slot = *k as f64;
        }
        for j in 0..b.coeffs2.len() {
            let n2 = b.norms[j];
            if n1 == 0 && n2 == 0 {
                continue;
            }
            for (slot, k) in vec[a.dim..].iter_mut().zip(&b.freqs[j][..b.dim]) {
                *slot = *k as f64;
            }
            let Some(d) = grid.classify(&vec[..a.dim + b.dim]) else {
                continue;
            };
            if !vtilde.contains(d) {
                continue;
            }
            let be = b.cutoff[j];
            if (n1 == 0 || al > 0.0) && (n2 == 0 || be > 0.0) {
                return Err(Error::MaskOverlap(format!(
                    "lattice point {:?} of Ṽ lies in (supp α ∪ {{0}}) × (supp β ∪ {{0}})",
                    &vec[..a.dim + b.dim]
                )));
            }
            let joint = (1.0 + (n1 + n2) as f64).powf(r);
            let w = joint * a.coeffs2[i] * b.coeffs2[j];
            let (ca, cb) = (1.0 - al, 1.0 - be);
            sums[0] += w * (al * be).powi(2);
            sums[1] += w * (al * cb).powi(2);
            sums[2] += w * (ca * be).powi(2);
            sums[3] += w * (ca * cb).powi(2);
            sums[4] += w;
            let root = joint.sqrt();
            let near = a.bracket(i, low1) * b.bracket(j, h.r2);
            let far = a.bracket(i, h.r1) * b.bracket(j, low2);
            if al > 0.0 && be < 1.0 {
                sup[0] = sup[0].max(root / near);
            }
            if be > 0.0 && al < 1.0 {
                sup[1] = sup[1].max(root / far);
            }
            if al < 1.0 && be < 1.0 {
                sup[2] = sup[2].max(root / if n1 <= n2 { near } else { far });
            }
        }
    }
    let [i1, i2, i3, i4, total] = sums.map(f64::sqrt);
    let norms = FactorNorms {
        l2_first: a.q(0.0),
        l2_second: b.q(0.0),
        q_first: a.q(h.r_prime),
        q_second: b.q(h.r_double_prime),
        p_first: a.p_outside(h.r1),
        p_second: b.p_outside(h.r2),
    };
    let (qa, qb) = (a.q(low1), b.q(low2));
    let rhs2 = qa * norms.p_second;
    let rhs3 = norms.p_first * qb;
    let rhs4 = qa * norms.p_second + norms.p_first * qb;
    Ok(FourTermReport {
        r,
        hypotheses: *h,
        case: SignCase::of(h),
        i1,
        i2,
        i3,
        i4,
        total,
        norms,
        bound2: TermBound::new(i2, rhs2, sup[0]),
        bound3: TermBound::new(i3, rhs3, sup[1]),
        bound4: TermBound::new(i4, rhs4, sup[2]),
        covers: i1 + i2 + i3 + i4 >= total * (1.0 - BOUND_SLACK),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::claim::claim_cover;
    use crate::conic::catalog_wavefront;
    use crate::directions::DirectionGrid;
    use crate::grid::GridSpec;
    use crate::region::CellLattice;
    use crate::synth::{synthesize, DistributionSpec};
    use num_complex::Complex64;

    fn setup(
        n: usize,
    ) -> (
        SpectralDistribution,
        SpectralDistribution,
        crate::claim::ClaimCover,
        DirectionSet,
    ) {
        let g = GridSpec::new(1, n).unwrap();
        let su = DistributionSpec::one_sided_power(0.75, 0.5);
        let sv = DistributionSpec::heaviside(&[0.5]);
        let u = synthesize(&su, &g).unwrap();
        let v = synthesize(&sv, &g).unwrap();
        let lat = CellLattice::standard(1);
        let vt = DirectionSet::from_cap_angles(
            DirectionGrid::circle(360),
            &[200f64.to_radians()],
            15f64.to_radians(),
        );
        let l1 = catalog_wavefront(&su, &DirectionGrid::Signs);
        let l2 = catalog_wavefront(&sv, &DirectionGrid::Signs);
        let cover = claim_cover(&l1, &l2, (&lat, 4), (&lat, 2), &vt).unwrap();
        (u, v, cover, vt)
    }

    #[test]
    fn first_term_vanishes_and_pieces_cover() {
        let (u, v, c, vt) = setup(256);
        let h = IndexHypotheses::new(0.2, 0.4, 3.0, 3.0, 1);
        let rep = four_term_decomposition(
            &u,
            &v,
            &c.first_window,
            &c.second_window,
            &c.alpha,
            &c.beta,
            &vt,
            0.5,
            &h,
        )
        .unwrap();
        assert_eq!(rep.i1, 0.0);
        assert!(rep.covers);
        assert!(rep.all_bounds_hold(), "{rep:?}");
        assert_eq!(rep.case, SignCase::A);
    }

    #[test]
    fn every_term_scales_linearly() {
        let (u, v, c, vt) = setup(128);
        let h = IndexHypotheses::new(-0.2, 0.4, 3.0, 3.0, 1);
        let run = |u: &SpectralDistribution| {
            four_term_decomposition(
                u,
                &v,
                &c.first_window,
                &c.second_window,
                &c.alpha,
                &c.beta,
                &vt,
                0.5,
                &h,
            )
            .unwrap()
        };
        let base = run(&u);
        let scaled = run(&u.scaled(Complex64::new(10.0, 0.0)));
        for (x, y) in [
            (base.i2, scaled.i2),
            (base.i3, scaled.i3),
            (base.i4, scaled.i4),
            (base.bound4.rhs, scaled.bound4.rhs),
        ] {
            assert!((y - 10.0 * x).abs() <= 1e-12 * y.abs().max(1e-300));
        }
        assert_eq!(base.case, SignCase::B);
    }

    #[test]
    fn overlapping_cutoffs_are_rejected() {
        let (u, v, c, _) = setup(64);
        let bad =
            DirectionSet::from_cap_angles(DirectionGrid::circle(360), &[0.0], 5f64.to_radians());
        let h = IndexHypotheses::new(0.2, 0.4, 3.0, 3.0, 1);
        let err = four_term_decomposition(
            &u,
            &v,
            &c.first_window,
            &c.second_window,
            &c.alpha,
            &c.beta,
            &bad,
            0.5,
            &h,
        );
        assert!(matches!(err, Err(Error::MaskOverlap(_))));
    }
}
