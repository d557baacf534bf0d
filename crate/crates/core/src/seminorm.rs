//! Weighted L² seminorms of windowed spectra and dyadic shell energies.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::directions::DirectionSet;
use crate::error::{Error, GateCode, Result};
use crate::grid::{check_order, GridSpec};
use crate::spectral::SpectralDistribution;
use crate::window::WindowFunction;

/// Dyadic shell of `|k|² = n2 ≥ 1`: the `j` with `2^j ≤ |k| < 2^{j+1}`.
#[inline]
pub fn shell_of(n2: u64) -> usize {
    debug_assert!(n2 > 0);
    ((63 - n2.leading_zeros()) / 2) as usize
}

/// The windowed spectrum `ℱ(ψu)` with exact integer `|k|²`.
#[derive(Debug, Clone)]
pub struct WindowedSpectrum {
    grid: GridSpec,
    power: Vec<f64>,
    norms: Vec<u64>,
}

impl WindowedSpectrum {
    pub fn new(u: &SpectralDistribution, psi: &WindowFunction) -> Result<Self> {
        let windowed = u.window_multiply(psi)?;
        Ok(Self::from_spectrum(&windowed))
    }

    /// Uses the coefficients as given (already windowed, or unwindowed).
    pub fn from_spectrum(u: &SpectralDistribution) -> Self {
        let grid = *u.grid();
        WindowedSpectrum {
            grid,
            power: u.coeffs().iter().map(|c| c.norm_sqr()).collect(),
            norms: grid.norms_squared(),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// `|ℱ(ψu)(k)|²` in FFT order.
    pub fn power(&self) -> &[f64] {
        &self.power
    }

    pub fn norms_squared(&self) -> &[u64] {
        &self.norms
    }

    pub fn energy(&self) -> f64 {
        self.power.iter().sum()
    }

    /// `(Σ_k <k>^{2s} |ℱ(ψu)(k)|²)^{1/2}`.
    pub fn q(&self, s: f64) -> Result<f64> {
        check_order(s)?;
        let total: f64 = self
            .power
            .iter()
            .zip(&self.norms)
            .map(|(p, n)| p * (1.0 + *n as f64).powf(s))
            .sum();
        Ok(total.sqrt())
    }

    /// `(Σ_{k≠0, k/|k|∈V} <k>^{2r} |ℱ(φu)(k)|²)^{1/2}`.
    pub fn p(&self, cone: &DirectionSet, r: f64) -> Result<f64> {
        self.p_masked(&cone.lattice_mask(&self.grid), r)
    }

    /// Same sum over an explicit lattice mask.
    pub fn p_masked(&self, mask: &[bool], r: f64) -> Result<f64> {
        check_order(r)?;
        let total: f64 = self
            .power
            .iter()
            .zip(&self.norms)
            .zip(mask)
            .filter(|((_, n), m)| **m && **n > 0)
            .map(|((p, n), _)| p * (1.0 + *n as f64).powf(r))
            .sum();
        Ok(total.sqrt())
    }

    /// Shell energies over the lattice, optionally masked.
    pub fn annulus_profile(&self, mask: Option<&[bool]>) -> AnnulusProfile {
        let top = self
            .norms
            .iter()
            .copied()
            .max()
            .map_or(0, |n| if n > 0 { shell_of(n) } else { 0 });
        let mut energies = vec![0.0; top + 1];
        let mut counts = vec![0usize; top + 1];
        for (i, (p, n)) in self.power.iter().zip(&self.norms).enumerate() {
            if *n == 0 || mask.is_some_and(|m| !m[i]) {
                continue;
            }
            let j = shell_of(*n);
            energies[j] += p;
            counts[j] += 1;
        }
        AnnulusProfile {
            j_min: 0,
            energies,
            counts,
        }
    }

    /// Energy histogram keyed by `|k|²`.
    pub fn norm_histogram(&self) -> BTreeMap<u64, f64> {
        let mut hist = BTreeMap::new();
        for (p, n) in self.power.iter().zip(&self.norms) {
            if *p > 0.0 {
                *hist.entry(*n).or_insert(0.0) += p;
            }
        }
        hist
    }
}

/// Energies `E_j` of the dyadic shells `2^j ≤ |k| < 2^{j+1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnulusProfile {
    pub j_min: usize,
    pub energies: Vec<f64>,
    /// Lattice points per shell (inside the mask).
    pub counts: Vec<usize>,
}

impl AnnulusProfile {
    pub fn j_max(&self) -> usize {
        self.j_min + self.energies.len().saturating_sub(1)
    }

    pub fn energy(&self, j: usize) -> f64 {
        self.energies.get(j - self.j_min).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.energies.iter().sum()
    }

    /// `Σ_j 2^{2rj} E_j`, the dyadic surrogate of `p²`.
    pub fn dyadic_weighted(&self, r: f64) -> f64 {
        self.energies
            .iter()
            .enumerate()
            .map(|(i, e)| 2f64.powf(2.0 * r * (i + self.j_min) as f64) * e)
            .sum()
    }

    /// Least-squares slope of `log₂ E_j` against `j` over `[lo, hi]`, skipping nonpositive shells.
    pub fn log_slope(&self, lo: usize, hi: usize) -> Option<f64> {
        let pts: Vec<(f64, f64)> = (lo..=hi.min(self.j_max()))
            .filter(|&j| self.energy(j) > 0.0)
            .map(|j| (j as f64, self.energy(j).log2()))
            .collect();
        least_squares(&pts).map(|(slope, _, _)| slope)
    }
}

/// `(slope, intercept, rms residual)` of a line fit; needs two distinct abscissae.
pub fn least_squares(points: &[(f64, f64)]) -> Option<(f64, f64, f64)> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    Some((slope, intercept, (rss / n).sqrt()))
}

pub fn q_seminorm(u: &SpectralDistribution, psi: &WindowFunction, s: f64) -> Result<f64> {
    check_order(s)?;
    WindowedSpectrum::new(u, psi)?.q(s)
}

pub fn p_seminorm(
    u: &SpectralDistribution,
    phi: &WindowFunction,
    cone: &DirectionSet,
    r: f64,
) -> Result<f64> {
    check_order(r)?;
    if cone.dim() != u.dim() {
        return Err(Error::GridMismatch(format!(
            "cone of dimension {} on a field of dimension {}",
            cone.dim(),
            u.dim()
        )));
    }
    WindowedSpectrum::new(u, phi)?.p(cone, r)
}

pub fn annulus_profile(
    u: &SpectralDistribution,
    phi: &WindowFunction,
    cone: Option<&DirectionSet>,
) -> Result<AnnulusProfile> {
    let spectrum = WindowedSpectrum::new(u, phi)?;
    let mask = cone.map(|c| c.lattice_mask(u.grid()));
    Ok(spectrum.annulus_profile(mask.as_deref()))
}

/// `q_{s;φ⊗ψ}(u⊗v)` from the factor spectra, without forming the product lattice.
///
/// The windowed tensor spectrum is `ℱ(φu)(k) ℱ(ψv)(l)`, so the sum groups by `(|k|², |l|²)`.
pub fn tensor_q(first: &WindowedSpectrum, second: &WindowedSpectrum, s: f64) -> Result<f64> {
    check_order(s)?;
    let a = first.norm_histogram();
    let b = second.norm_histogram();
    let mut total = 0.0;
    for (na, ea) in &a {
        for (nb, eb) in &b {
            total += ea * eb * (1.0 + (na + nb) as f64).powf(s);
        }
    }
    Ok(total.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeminormRatio {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

impl SeminormRatio {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        let ratio = if rhs == 0.0 {
            if lhs == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            lhs / rhs
        };
        SeminormRatio { lhs, rhs, ratio }
    }
}

/// Largest `s` with `s ≤ r' + min{0,r''}` and `s ≤ r'' + min{0,r'}`.
pub fn max_tensor_order(r1: f64, r2: f64) -> f64 {
    (r1 + r2.min(0.0)).min(r2 + r1.min(0.0))
}

/// `q_{s;φ⊗ψ}(u⊗v)` against `q_{r';φ}(u) q_{r'';ψ}(v)`.
pub fn tensor_seminorm_ratio(
    u: &SpectralDistribution,
    v: &SpectralDistribution,
    phi: &WindowFunction,
    psi: &WindowFunction,
    s: f64,
    r_first: f64,
    r_second: f64,
) -> Result<SeminormRatio> {
    for x in [s, r_first, r_second] {
        check_order(x)?;
    }
    let bound = max_tensor_order(r_first, r_second);
    if s > bound + 1e-12 {
        return Err(Error::inadmissible(
            GateCode::TensorOrderTooHigh,
            format!("s = {s} exceeds min{{r' + min{{0,r''}}, r'' + min{{0,r'}}}} = {bound}"),
        ));
    }
    if u.grid().size() != v.grid().size() {
        return Err(Error::GridMismatch("tensor factors on different N".into()));
    }
    let a = WindowedSpectrum::new(u, phi)?;
    let b = WindowedSpectrum::new(v, psi)?;
    let lhs = tensor_q(&a, &b, s)?;
    let rhs = a.q(r_first)? * b.q(r_second)?;
    Ok(SeminormRatio::new(lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::directions::DirectionGrid;
    use crate::synth::{synthesize, DistributionSpec};

    #[test]
    fn shells() {
        assert_eq!(shell_of(1), 0);
        assert_eq!(shell_of(3), 0);
        assert_eq!(shell_of(4), 1);
        assert_eq!(shell_of(15), 1);
        assert_eq!(shell_of(16), 2);
        assert_eq!(shell_of(1 << 20), 10);
    }

    #[test]
    fn full_cone_differs_from_q_by_zero_term() {
        let g = GridSpec::new(2, 32).unwrap();
        let u = synthesize(&DistributionSpec::gaussian(&[0.5, 0.5], 0.05), &g).unwrap();
        let phi = crate::synth::central_window(2);
        let w = WindowedSpectrum::new(&u, &phi).unwrap();
        let full = DirectionSet::full(DirectionGrid::circle(360));
        let p = w.p(&full, 1.0).unwrap();
        let q = w.q(1.0).unwrap();
        assert!(((q * q - p * p) - w.power()[0]).abs() < 1e-12 * q * q);
        assert_eq!(
            w.p(&DirectionSet::empty(DirectionGrid::circle(360)), 1.0)
                .unwrap(),
            0.0
        );
    }

    #[test]
    fn tensor_q_matches_lattice_sum() {
        let g = GridSpec::new(1, 32).unwrap();
        let u = synthesize(&DistributionSpec::heaviside(&[0.5]), &g).unwrap();
        let v = synthesize(&DistributionSpec::delta(&[0.4]), &g).unwrap();
        let a = WindowedSpectrum::from_spectrum(&u);
        let b = WindowedSpectrum::from_spectrum(&v);
        let t = WindowedSpectrum::from_spectrum(&u.tensor_product(&v).unwrap());
        for s in [-1.0, 0.0, 0.7] {
            let direct = t.q(s).unwrap();
            let fast = tensor_q(&a, &b, s).unwrap();
            assert!((direct - fast).abs() < 1e-12 * direct);
        }
    }

    #[test]
    fn inadmissible_tensor_order() {
        let g = GridSpec::new(1, 32).unwrap();
        let u = synthesize(&DistributionSpec::delta(&[0.5]), &g).unwrap();
        let w = WindowFunction::flat(1);
        let err = tensor_seminorm_ratio(&u, &u, &w, &w, 0.5, 1.0, -1.0).unwrap_err();
        assert_eq!(err.kind(), "IndexInadmissible");
        let zero = SpectralDistribution::zeros(g);
        let r = tensor_seminorm_ratio(&zero, &zero, &w, &w, 1.0, 1.0, 1.0).unwrap();
        assert_eq!((r.lhs, r.rhs, r.ratio), (0.0, 0.0, 0.0));
    }
}
