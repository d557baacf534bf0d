//! Smooth compactly supported windows on the torus, tensorized per axis.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::region::SpatialRegion;

/// One-dimensional window profile on an interval (coordinates may leave `[0,1)`; evaluation is periodic).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "snake_case")]
pub enum AxisProfile {
    Flat,
    /// `exp(-1/(1-t²))` with `t` mapping `[lo, hi]` onto `[-1, 1]`.
    Bump {
        lo: f64,
        hi: f64,
    },
    /// Equal to 1 on `[lo, hi]`, smoothstep ramps of width `ramp` on either side.
    Plateau {
        lo: f64,
        hi: f64,
        ramp: f64,
    },
}

impl AxisProfile {
    fn eval_line(&self, x: f64) -> f64 {
        match *self {
            AxisProfile::Flat => 1.0,
            AxisProfile::Bump { lo, hi } => {
                let t = (2.0 * x - lo - hi) / (hi - lo);
                bump(t)
            }
            AxisProfile::Plateau { lo, hi, ramp } => {
                if x < lo {
                    smoothstep((x - lo + ramp) / ramp)
                } else if x > hi {
                    smoothstep((hi + ramp - x) / ramp)
                } else {
                    1.0
                }
            }
        }
    }

    /// Periodic evaluation at `x ∈ [0,1)`.
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            AxisProfile::Flat => 1.0,
            _ => self.eval_line(x) + self.eval_line(x - 1.0) + self.eval_line(x + 1.0),
        }
    }

    /// Closed support interval, `None` for the flat profile.
    pub fn interval(&self) -> Option<(f64, f64)> {
        match *self {
            AxisProfile::Flat => None,
            AxisProfile::Bump { lo, hi } => Some((lo, hi)),
            AxisProfile::Plateau { lo, hi, ramp } => Some((lo - ramp, hi + ramp)),
        }
    }
}

/// `exp(-1/(1-t²))` on `|t| < 1`, zero elsewhere.
pub fn bump(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - t * t)).exp()
    }
}

fn bump_density(tau: f64) -> f64 {
    if tau <= 0.0 || tau >= 1.0 {
        0.0
    } else {
        (-1.0 / (tau * (1.0 - tau))).exp()
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn quadrature() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(24))
}

/// `∫_0^t` of the bump density, composite Gauss–Legendre with 8 panels.
fn bump_integral(t: f64) -> f64 {
    let (nodes, weights) = quadrature();
    let panels = 8;
    let h = t / panels as f64;
    let mut acc = 0.0;
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * h;
        for (x, w) in nodes.iter().zip(weights) {
            acc += w * bump_density(mid + 0.5 * h * x);
        }
    }
    acc * 0.5 * h
}

fn bump_total() -> f64 {
    static TOTAL: OnceLock<f64> = OnceLock::new();
    *TOTAL.get_or_init(|| 2.0 * bump_integral(0.5))
}

/// Smooth monotone step: 0 for `t ≤ 0`, 1 for `t ≥ 1`, normalized integral of the bump density in between.
pub fn smoothstep(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else if t <= 0.5 {
        bump_integral(t) / bump_total()
    } else {
        1.0 - bump_integral(1.0 - t) / bump_total()
    }
}

/// A tensor window `scale · Π_axis Π_factor profile(x_axis)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowFunction {
    axes: Vec<Vec<AxisProfile>>,
    scale: f64,
}

impl WindowFunction {
    pub fn flat(dim: usize) -> Self {
        WindowFunction {
            axes: vec![vec![AxisProfile::Flat]; dim],
            scale: 1.0,
        }
    }

    pub fn from_profiles(profiles: Vec<AxisProfile>) -> Self {
        WindowFunction {
            axes: profiles.into_iter().map(|p| vec![p]).collect(),
            scale: 1.0,
        }
    }

    /// Standard bump on the box `[lo, hi]`.
    pub fn bump(lo: &[f64], hi: &[f64]) -> Self {
        Self::from_profiles(
            lo.iter()
                .zip(hi)
                .map(|(&lo, &hi)| AxisProfile::Bump { lo, hi })
                .collect(),
        )
    }

    /// Equal to 1 on the box `[lo, hi]`, vanishing outside its `ramp`-neighborhood.
    pub fn plateau(lo: &[f64], hi: &[f64], ramp: f64) -> Self {
        Self::from_profiles(
            lo.iter()
                .zip(hi)
                .map(|(&lo, &hi)| AxisProfile::Plateau { lo, hi, ramp })
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn scale_factor(&self) -> f64 {
        self.scale
    }

    pub fn scaled(&self, c: f64) -> Self {
        WindowFunction {
            axes: self.axes.clone(),
            scale: self.scale * c,
        }
    }

    /// Pointwise product of two windows of equal dimension.
    pub fn product(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "window dimensions differ");
        let axes = self
            .axes
            .iter()
            .zip(&other.axes)
            .map(|(a, b)| a.iter().chain(b).copied().collect())
            .collect();
        WindowFunction {
            axes,
            scale: self.scale * other.scale,
        }
    }

    /// `(φ⊗ψ)(x, y) = φ(x) ψ(y)`.
    pub fn tensor(&self, other: &Self) -> Self {
        let axes = self.axes.iter().chain(&other.axes).cloned().collect();
        WindowFunction {
            axes,
            scale: self.scale * other.scale,
        }
    }

    pub fn axis_value(&self, axis: usize, x: f64) -> f64 {
        self.axes[axis].iter().map(|p| p.eval(x)).product()
    }

    /// `|ψ̂_axis(q)|` of one axis factor (scale excluded) on the `fine`-point grid, FFT order.
    pub fn axis_spectrum_abs(&self, axis: usize, fine: usize) -> Vec<f64> {
        let mut line: Vec<num_complex::Complex64> = (0..fine)
            .map(|i| {
                num_complex::Complex64::new(self.axis_value(axis, i as f64 / fine as f64), 0.0)
            })
            .collect();
        crate::fft::fft_nd(&mut line, 1, fine, false);
        line.iter().map(|c| c.norm() / fine as f64).collect()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.scale
            * (0..self.dim())
                .map(|a| self.axis_value(a, x[a]))
                .product::<f64>()
    }

    /// Row-major samples on the `m`-point-per-axis grid.
    pub fn samples_on(&self, m: usize) -> Vec<f64> {
        let lines: Vec<Vec<f64>> = (0..self.dim())
            .map(|a| {
                (0..m)
                    .map(|i| self.axis_value(a, i as f64 / m as f64))
                    .collect()
            })
            .collect();
        let mut out = vec![self.scale];
        for line in &lines {
            let mut next = Vec::with_capacity(out.len() * m);
            for base in &out {
                next.extend(line.iter().map(|v| base * v));
            }
            out = next;
        }
        out
    }

    /// Closed box outside which the window vanishes (the unit cube on flat axes).
    pub fn support(&self) -> SpatialRegion {
        let mut lo = Vec::with_capacity(self.dim());
        let mut hi = Vec::with_capacity(self.dim());
        for axis in &self.axes {
            let (mut a, mut b) = (f64::NEG_INFINITY, f64::INFINITY);
            let mut bounded = false;
            for p in axis {
                if let Some((pa, pb)) = p.interval() {
                    a = a.max(pa);
                    b = b.min(pb);
                    bounded = true;
                }
            }
            if !bounded {
                a = 0.0;
                b = 1.0;
            }
            if a > b {
                return SpatialRegion::empty(self.dim());
            }
            lo.push(a);
            hi.push(b);
        }
        SpatialRegion::from_box(&lo, &hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smoothstep_shape() {
        assert_eq!(smoothstep(0.0), 0.0);
        assert_eq!(smoothstep(1.0), 1.0);
        assert!((smoothstep(0.5) - 0.5).abs() < 1e-15);
        let mut prev = 0.0;
        for i in 1..100 {
            let s = smoothstep(i as f64 / 100.0);
            assert!(s >= prev);
            prev = s;
        }
        assert!((smoothstep(0.3) + smoothstep(0.7) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn bump_integral_matches_fine_midpoint_rule() {
        let n = 200_000;
        let h = 0.5 / n as f64;
        let reference: f64 = (0..n).map(|i| bump_density((i as f64 + 0.5) * h) * h).sum();
        assert!((bump_integral(0.5) - reference).abs() < 1e-10 * reference);
    }

    #[test]
    fn plateau_is_one_inside_and_zero_outside() {
        let w = WindowFunction::plateau(&[0.4], &[0.6], 0.05);
        assert_eq!(w.eval(&[0.5]), 1.0);
        assert_eq!(w.eval(&[0.4]), 1.0);
        assert_eq!(w.eval(&[0.34]), 0.0);
        assert!((w.eval(&[0.375]) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn periodic_wrap() {
        let w = WindowFunction::bump(&[-0.1], &[0.1]);
        assert!((w.eval(&[0.95]) - w.eval(&[0.05])).abs() < 1e-15);
        assert!(w.eval(&[0.5]) == 0.0);
    }
}
