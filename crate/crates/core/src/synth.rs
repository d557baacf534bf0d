//! Catalog of test distributions with known orders and wave fronts.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, MAX_DIM};
use crate::region::SpatialRegion;
use crate::spectral::SpectralDistribution;
use crate::window::{bump, WindowFunction};

/// Box carrying every real-space catalog member.
pub const CENTRAL_LO: f64 = 0.25;
pub const CENTRAL_HI: f64 = 0.75;

/// Caps of directions, as signs in one dimension and angles in two.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapSpec {
    pub centers: Vec<f64>,
    pub half_angle: f64,
}

impl CapSpec {
    /// Continuous membership of a nonzero wavenumber.
    pub fn admits(&self, k: &[i64]) -> bool {
        match k.len() {
            1 => self
                .centers
                .iter()
                .any(|c| c.signum() == (k[0] as f64).signum()),
            _ => {
                let theta = (k[1] as f64).atan2(k[0] as f64);
                self.centers
                    .iter()
                    .any(|c| angle_gap(theta, *c) <= self.half_angle + 1e-12)
            }
        }
    }
}

pub(crate) fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DistributionSpec {
    /// Point mass at `x0`.
    Delta {
        x0: Vec<f64>,
    },
    /// Centered step `w(x)(H(n·(x-x0)) - 1/2)` with `w` the bump on the central box.
    Heaviside {
        x0: Vec<f64>,
        #[serde(default)]
        normal_angle: f64,
    },
    /// `û(k) = 1_{k>0} (1+k)^{-a} e^{-2πikx0}`, one dimension only.
    OneSidedPower {
        a: f64,
        x0: f64,
    },
    /// `w(x)|x-x0|^{-a}` with `a ∈ (0, m)`.
    PowerSingularity {
        a: f64,
        x0: Vec<f64>,
    },
    GaussianBump {
        center: Vec<f64>,
        sigma: f64,
    },
    /// Gaussian-enveloped chirp along a direction, two dimensions only.
    PlaneChirp {
        center: Vec<f64>,
        direction_angle: f64,
        frequency: f64,
        rate: f64,
        sigma: f64,
    },
    /// `û(k) = <k>^{-decay} e^{-2πik·x0}`, optionally restricted to a cone.
    CustomSpectral {
        decay: f64,
        x0: Vec<f64>,
        #[serde(default)]
        cone: Option<CapSpec>,
    },
}

impl DistributionSpec {
    pub fn delta(x0: &[f64]) -> Self {
        DistributionSpec::Delta { x0: x0.to_vec() }
    }

    pub fn heaviside(x0: &[f64]) -> Self {
        DistributionSpec::Heaviside {
            x0: x0.to_vec(),
            normal_angle: 0.0,
        }
    }

    pub fn one_sided_power(a: f64, x0: f64) -> Self {
        DistributionSpec::OneSidedPower { a, x0 }
    }

    pub fn gaussian(center: &[f64], sigma: f64) -> Self {
        DistributionSpec::GaussianBump {
            center: center.to_vec(),
            sigma,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DistributionSpec::Delta { .. } => "delta",
            DistributionSpec::Heaviside { .. } => "heaviside",
            DistributionSpec::OneSidedPower { .. } => "one_sided_power",
            DistributionSpec::PowerSingularity { .. } => "power_singularity",
            DistributionSpec::GaussianBump { .. } => "gaussian_bump",
            DistributionSpec::PlaneChirp { .. } => "plane_chirp",
            DistributionSpec::CustomSpectral { .. } => "custom_spectral",
        }
    }

    /// Spatial dimension implied by the parameters.
    pub fn dim(&self) -> usize {
        match self {
            DistributionSpec::Delta { x0 }
            | DistributionSpec::Heaviside { x0, .. }
            | DistributionSpec::PowerSingularity { x0, .. }
            | DistributionSpec::CustomSpectral { x0, .. } => x0.len(),
            DistributionSpec::OneSidedPower { .. } => 1,
            DistributionSpec::GaussianBump { center, .. }
            | DistributionSpec::PlaneChirp { center, .. } => center.len(),
        }
    }

    /// The point carrying the singularity, if any.
    pub fn singular_point(&self) -> Option<Vec<f64>> {
        match self {
            DistributionSpec::Delta { x0 }
            | DistributionSpec::Heaviside { x0, .. }
            | DistributionSpec::PowerSingularity { x0, .. }
            | DistributionSpec::CustomSpectral { x0, .. } => Some(x0.clone()),
            DistributionSpec::OneSidedPower { x0, .. } => Some(vec![*x0]),
            _ => None,
        }
    }

    /// Global Sobolev order of the ground truth; `None` for smooth members.
    pub fn analytic_order(&self) -> Option<f64> {
        let m = self.dim() as f64;
        match self {
            DistributionSpec::Delta { .. } => Some(-m / 2.0),
            DistributionSpec::Heaviside { .. } => Some(0.5),
            DistributionSpec::OneSidedPower { a, .. } => Some(a - 0.5),
            DistributionSpec::PowerSingularity { a, .. } => Some(m / 2.0 - a),
            DistributionSpec::CustomSpectral { decay, .. } => Some(decay - m / 2.0),
            _ => None,
        }
    }

    pub fn is_smooth(&self) -> bool {
        matches!(
            self,
            DistributionSpec::GaussianBump { .. } | DistributionSpec::PlaneChirp { .. }
        )
    }

    fn validate(&self, grid: &GridSpec) -> Result<()> {
        let m = self.dim();
        let bad = |why: &str| Err(Error::UnsupportedSpec(format!("{}: {why}", self.name())));
        if m != grid.dim() {
            return bad(&format!(
                "parameters are {m}-dimensional, grid is {}-dimensional",
                grid.dim()
            ));
        }
        if m == 0 || m > 2 {
            return bad("base distributions live in one or two dimensions");
        }
        let central = |x: &[f64]| x.iter().all(|v| (CENTRAL_LO..=CENTRAL_HI).contains(v));
        match self {
            DistributionSpec::Delta { x0 } | DistributionSpec::CustomSpectral { x0, .. }
                if !central(x0) =>
            {
                bad("x0 outside the central box")
            }
            DistributionSpec::Heaviside { x0, .. } if !central(x0) => {
                bad("x0 outside the central box")
            }
            DistributionSpec::OneSidedPower { a, x0 } => {
                if !(*a > 0.0 && *a < 2.0) {
                    bad("a must lie in (0, 2)")
                } else if !central(&[*x0]) {
                    bad("x0 outside the central box")
                } else {
                    Ok(())
                }
            }
            DistributionSpec::PowerSingularity { a, x0 } => {
                if !(*a > 0.0 && *a < m as f64) {
                    bad("a must lie in (0, m)")
                } else if !central(x0) {
                    bad("x0 outside the central box")
                } else {
                    Ok(())
                }
            }
            DistributionSpec::GaussianBump { center, sigma } => {
                if !central(center) || !(*sigma > 0.0 && *sigma <= 0.08) {
                    bad("center outside the central box or sigma outside (0, 0.08]")
                } else {
                    Ok(())
                }
            }
            DistributionSpec::PlaneChirp { center, sigma, .. } => {
                if m != 2 {
                    bad("chirps are two-dimensional")
                } else if !central(center) || !(*sigma > 0.0 && *sigma <= 0.08) {
                    bad("center outside the central box or sigma outside (0, 0.08]")
                } else {
                    Ok(())
                }
            }
            DistributionSpec::CustomSpectral { decay, .. } if decay.abs() > 8.0 => {
                bad("decay outside [-8, 8]")
            }
            _ => Ok(()),
        }
    }

    /// Declared real-space support.
    pub fn support_hint(&self) -> Option<SpatialRegion> {
        let m = self.dim();
        match self {
            DistributionSpec::Delta { x0 } => Some(SpatialRegion::point(x0)),
            DistributionSpec::Heaviside { .. } | DistributionSpec::PowerSingularity { .. } => Some(
                SpatialRegion::from_box(&vec![CENTRAL_LO; m], &vec![CENTRAL_HI; m]),
            ),
            _ => None,
        }
    }
}

/// Band-limited representative of a catalog member.
pub fn synthesize(spec: &DistributionSpec, grid: &GridSpec) -> Result<SpectralDistribution> {
    spec.validate(grid)?;
    let grid = *grid;
    let m = grid.dim();
    let out = match spec {
        DistributionSpec::Delta { x0 } => SpectralDistribution::from_fn(grid, |k| phase(k, x0)),
        DistributionSpec::OneSidedPower { a, x0 } => SpectralDistribution::from_fn(grid, |k| {
            if k[0] > 0 {
                phase(k, &[*x0]) * (1.0 + k[0] as f64).powf(-a)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }),
        DistributionSpec::GaussianBump { center, sigma } => {
            SpectralDistribution::from_fn(grid, |k| {
                let amp: f64 = k
                    .iter()
                    .map(|&ka| {
                        sigma
                            * (2.0 * PI).sqrt()
                            * (-2.0 * PI * PI * sigma * sigma * (ka * ka) as f64).exp()
                    })
                    .product();
                phase(k, center) * amp
            })
        }
        DistributionSpec::CustomSpectral { decay, x0, cone } => {
            SpectralDistribution::from_fn(grid, |k| {
                let zero = k.iter().all(|&v| v == 0);
                let admitted = match cone {
                    None => true,
                    Some(c) => !zero && c.admits(k),
                };
                if admitted {
                    let n2: f64 = k.iter().map(|&v| (v * v) as f64).sum();
                    phase(k, x0) * (1.0 + n2).powf(-decay / 2.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
        }
        DistributionSpec::Heaviside { .. }
        | DistributionSpec::PowerSingularity { .. }
        | DistributionSpec::PlaneChirp { .. } => {
            let factor = if m == 1 { 8 } else { 4 };
            let fine = factor * grid.size();
            let samples = sample_real_space(spec, m, fine);
            SpectralDistribution::from_samples(grid, fine, &samples)?
        }
    };
    let mut out = out.with_provenance(spec.name());
    if let Some(hint) = spec.support_hint() {
        out = out.with_support_hint(hint);
    }
    Ok(out)
}

fn phase(k: &[i64], x0: &[f64]) -> Complex64 {
    let dot: f64 = k.iter().zip(x0).map(|(a, b)| *a as f64 * b).sum();
    Complex64::from_polar(1.0, -2.0 * PI * dot)
}

/// The bump carrying real-space members.
pub fn central_window(dim: usize) -> WindowFunction {
    WindowFunction::bump(&vec![CENTRAL_LO; dim], &vec![CENTRAL_HI; dim])
}

fn central_weight(x: &[f64]) -> f64 {
    x.iter()
        .map(|v| bump((2.0 * v - CENTRAL_LO - CENTRAL_HI) / (CENTRAL_HI - CENTRAL_LO)))
        .product()
}

/// Exact real-space values on the `fine`-per-axis grid; singular samples use cell averages.
fn sample_real_space(spec: &DistributionSpec, m: usize, fine: usize) -> Vec<Complex64> {
    let h = 1.0 / fine as f64;
    let total = fine.pow(m as u32);
    let mut out = Vec::with_capacity(total);
    for flat in 0..total {
        let p = GridSpec::sample_point(m, fine, flat);
        let x = &p[..m];
        out.push(Complex64::new(real_value(spec, x, h), 0.0));
    }
    out
}

/// Real-space value at `x`; `h` is the sample spacing used for cell averages.
pub fn real_value(spec: &DistributionSpec, x: &[f64], h: f64) -> f64 {
    let m = x.len();
    match spec {
        DistributionSpec::Heaviside { x0, normal_angle } => {
            let s = if m == 1 {
                x[0] - x0[0]
            } else {
                normal_angle.cos() * (x[0] - x0[0]) + normal_angle.sin() * (x[1] - x0[1])
            };
            let step = if s > 0.0 {
                0.5
            } else if s < 0.0 {
                -0.5
            } else {
                0.0
            };
            central_weight(x) * step
        }
        DistributionSpec::PowerSingularity { a, x0 } => {
            let r2: f64 = x.iter().zip(x0).map(|(u, v)| (u - v) * (u - v)).sum();
            let r = r2.sqrt();
            let w = central_weight(x);
            if r < 1e-12 * h.max(1e-300) || r < 1e-14 {
                if m == 1 {
                    w * (0.5 * h).powf(-a) / (1.0 - a)
                } else {
                    let rho = h / PI.sqrt();
                    w * 2.0 / (2.0 - a) * rho.powf(-a)
                }
            } else {
                w * r.powf(-a)
            }
        }
        DistributionSpec::PlaneChirp {
            center,
            direction_angle,
            frequency,
            rate,
            sigma,
        } => {
            let d = [direction_angle.cos(), direction_angle.sin()];
            let rel: Vec<f64> = x.iter().zip(center).map(|(u, c)| wrap(u - c)).collect();
            let t = d[0] * rel[0] + d[1] * rel[1];
            let r2: f64 = rel.iter().map(|v| v * v).sum();
            (-r2 / (2.0 * sigma * sigma)).exp() * (2.0 * PI * (frequency * t + rate * t * t)).cos()
        }
        DistributionSpec::GaussianBump { center, sigma } => {
            let r2: f64 = x.iter().zip(center).map(|(u, c)| wrap(u - c).powi(2)).sum();
            (-r2 / (2.0 * sigma * sigma)).exp()
        }
        _ => f64::NAN,
    }
}

/// Nearest periodic image of a coordinate difference.
fn wrap(d: f64) -> f64 {
    d - d.round()
}

/// The unimodular spectrum of a point mass, for any dimension up to four.
pub fn delta_spectrum(grid: &GridSpec, x0: &[f64]) -> SpectralDistribution {
    debug_assert!(x0.len() == grid.dim() && grid.dim() <= MAX_DIM);
    SpectralDistribution::from_fn(*grid, |k| phase(k, x0)).with_provenance("delta")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_is_unimodular() {
        let g = GridSpec::new(1, 256).unwrap();
        let u = synthesize(&DistributionSpec::delta(&[0.5]), &g).unwrap();
        for k in -127i64..128 {
            let c = u.coeff(&[k]);
            assert!((c.norm() - 1.0).abs() < 1e-14);
            let expected = if k % 2 == 0 { 1.0 } else { -1.0 };
            assert!((c.re - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn one_sided_power_law() {
        let g = GridSpec::new(1, 256).unwrap();
        let u = synthesize(&DistributionSpec::one_sided_power(0.75, 0.5), &g).unwrap();
        for k in -127i64..=0 {
            assert_eq!(u.coeff(&[k]).norm(), 0.0);
        }
        assert!((u.coeff(&[1]).norm() - 2f64.powf(-0.75)).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_specs() {
        let g1 = GridSpec::new(1, 64).unwrap();
        let g2 = GridSpec::new(2, 64).unwrap();
        let err = |s: DistributionSpec, g: &GridSpec| synthesize(&s, g).unwrap_err().kind();
        assert_eq!(
            err(DistributionSpec::one_sided_power(2.5, 0.5), &g1),
            "UnsupportedSpec"
        );
        assert_eq!(err(DistributionSpec::delta(&[0.1]), &g1), "UnsupportedSpec");
        assert_eq!(err(DistributionSpec::delta(&[0.5]), &g2), "UnsupportedSpec");
        assert_eq!(
            err(DistributionSpec::one_sided_power(0.5, 0.5), &g2),
            "UnsupportedSpec"
        );
        let chirp = DistributionSpec::PlaneChirp {
            center: vec![0.5],
            direction_angle: 0.0,
            frequency: 10.0,
            rate: 0.0,
            sigma: 0.05,
        };
        assert_eq!(err(chirp, &g1), "UnsupportedSpec");
    }

    #[test]
    fn gaussian_is_real() {
        let g = GridSpec::new(2, 64).unwrap();
        let u = synthesize(&DistributionSpec::gaussian(&[0.5, 0.45], 0.05), &g).unwrap();
        assert!(u.hermitian_defect() < 1e-14);
    }

    #[test]
    fn spec_json_roundtrip() {
        let s = DistributionSpec::Heaviside {
            x0: vec![0.5, 0.5],
            normal_angle: 0.3,
        };
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.contains("\"kind\":\"heaviside\""));
        assert_eq!(serde_json::from_str::<DistributionSpec>(&text).unwrap(), s);
    }
}
