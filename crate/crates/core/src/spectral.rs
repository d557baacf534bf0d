//! Band-limited spectral representatives of compactly supported distributions.

use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::fft_nd;
use crate::grid::{GridSpec, MAX_DIM};
use crate::region::SpatialRegion;
use crate::window::WindowFunction;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Fourier coefficients `û(k)` on the lattice of a [`GridSpec`], FFT order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDistribution {
    grid: GridSpec,
    coeffs: Vec<Complex64>,
    support_hint: Option<SpatialRegion>,
    provenance: String,
}

impl SpectralDistribution {
    /// Wraps coefficients, zeroing the Nyquist rows.
    pub fn from_coeffs(grid: GridSpec, mut coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} coefficients for a lattice of {}",
                coeffs.len(),
                grid.len()
            )));
        }
        zero_nyquist(&grid, &mut coeffs);
        Ok(SpectralDistribution {
            grid,
            coeffs,
            support_hint: None,
            provenance: String::new(),
        })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        SpectralDistribution {
            grid,
            coeffs: vec![ZERO; grid.len()],
            support_hint: None,
            provenance: "zero".into(),
        }
    }

    /// Builds coefficients from a closure of the wavenumber vector.
    pub fn from_fn(grid: GridSpec, law: impl Fn(&[i64]) -> Complex64) -> Self {
        let dim = grid.dim();
        let coeffs = (0..grid.len())
            .map(|flat| {
                let k = grid.freq(flat);
                law(&k[..dim])
            })
            .collect();
        let mut out = SpectralDistribution {
            grid,
            coeffs,
            support_hint: None,
            provenance: "custom".into(),
        };
        zero_nyquist(&out.grid, &mut out.coeffs);
        out
    }

    /// Band coefficients of real-space samples on an `M`-point-per-axis grid, `M ≥ N`.
    pub fn from_samples(
        grid: GridSpec,
        samples_per_axis: usize,
        samples: &[Complex64],
    ) -> Result<Self> {
        let dim = grid.dim();
        let m = samples_per_axis;
        if m < grid.size() || !m.is_power_of_two() || samples.len() != m.pow(dim as u32) {
            return Err(Error::GridMismatch(format!(
                "{} samples on {m} per axis cannot feed N = {}",
                samples.len(),
                grid.size()
            )));
        }
        let mut work = samples.to_vec();
        fft_nd(&mut work, dim, m, false);
        let scale = 1.0 / work.len() as f64;
        let mut coeffs = vec![ZERO; grid.len()];
        for (flat, slot) in coeffs.iter_mut().enumerate() {
            let k = grid.freq(flat);
            *slot = work[fine_index(&k[..dim], m)] * scale;
        }
        SpectralDistribution::from_coeffs(grid, coeffs)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: &[i64]) -> Complex64 {
        self.grid.flat_index(k).map_or(ZERO, |i| self.coeffs[i])
    }

    pub fn support_hint(&self) -> Option<&SpatialRegion> {
        self.support_hint.as_ref()
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn with_support_hint(mut self, hint: SpatialRegion) -> Self {
        self.support_hint = Some(hint);
        self
    }

    pub fn with_provenance(mut self, provenance: impl Into<String>) -> Self {
        self.provenance = provenance.into();
        self
    }

    /// `a·u + b·v`, coefficient-wise.
    pub fn linear_combine(a: Complex64, u: &Self, b: Complex64, v: &Self) -> Result<Self> {
        u.grid.check_same(&v.grid)?;
        let coeffs = u
            .coeffs
            .iter()
            .zip(&v.coeffs)
            .map(|(x, y)| a * x + b * y)
            .collect();
        let hint = match (&u.support_hint, &v.support_hint) {
            (Some(p), Some(q)) => Some(p.union(q)),
            _ => None,
        };
        Ok(SpectralDistribution {
            grid: u.grid,
            coeffs,
            support_hint: hint,
            provenance: format!("combine({}, {})", u.provenance, v.provenance),
        })
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|x| *x *= c);
        out
    }

    /// `ℱ(u⊗v)(k, l) = û(k) v̂(l)`.
    pub fn tensor_product(&self, other: &Self) -> Result<Self> {
        if self.grid.size() != other.grid.size() {
            return Err(Error::GridMismatch(format!(
                "tensor factors with N = {} and N = {}",
                self.grid.size(),
                other.grid.size()
            )));
        }
        let dim = self.dim() + other.dim();
        if dim > MAX_DIM {
            return Err(Error::DimensionOverflow(dim));
        }
        let grid = GridSpec::new(dim, self.grid.size())?;
        let mut coeffs = Vec::with_capacity(grid.len());
        for a in &self.coeffs {
            for b in &other.coeffs {
                coeffs.push(a * b);
            }
        }
        let hint = match (&self.support_hint, &other.support_hint) {
            (Some(p), Some(q)) => Some(p.product(q)),
            _ => None,
        };
        Ok(SpectralDistribution {
            grid,
            coeffs,
            support_hint: hint,
            provenance: format!("{}⊗{}", self.provenance, other.provenance),
        })
    }

    /// Samples of the trigonometric interpolant on the `2N` grid.
    pub fn padded_samples(&self) -> Vec<Complex64> {
        let dim = self.dim();
        let fine = 2 * self.grid.size();
        let mut work = vec![ZERO; fine.pow(dim as u32)];
        for (flat, c) in self.coeffs.iter().enumerate() {
            if *c != ZERO {
                let k = self.grid.freq(flat);
                work[fine_index(&k[..dim], fine)] = *c;
            }
        }
        fft_nd(&mut work, dim, fine, true);
        work
    }

    /// Band coefficients of `2N`-grid samples, inverse of [`Self::padded_samples`] on the band.
    fn from_padded(grid: GridSpec, mut work: Vec<Complex64>) -> Self {
        let dim = grid.dim();
        let fine = 2 * grid.size();
        fft_nd(&mut work, dim, fine, false);
        let scale = 1.0 / work.len() as f64;
        let mut coeffs = vec![ZERO; grid.len()];
        for (flat, slot) in coeffs.iter_mut().enumerate() {
            let k = grid.freq(flat);
            *slot = work[fine_index(&k[..dim], fine)] * scale;
        }
        zero_nyquist(&grid, &mut coeffs);
        SpectralDistribution {
            grid,
            coeffs,
            support_hint: None,
            provenance: String::new(),
        }
    }

    /// Dealiased product of two band-limited fields, truncated to the band.
    pub fn dealiased_product(&self, other: &Self) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        let mut a = self.padded_samples();
        let b = other.padded_samples();
        a.iter_mut().zip(&b).for_each(|(x, y)| *x *= y);
        let hint = match (&self.support_hint, &other.support_hint) {
            (Some(p), Some(q)) => Some(p.intersection(q)),
            _ => None,
        };
        let mut out = Self::from_padded(self.grid, a);
        out.support_hint = hint;
        out.provenance = format!("({})·({})", self.provenance, other.provenance);
        Ok(out)
    }

    /// `w·u` with `w` evaluated directly on the `2N` grid.
    pub fn window_multiply(&self, w: &WindowFunction) -> Result<Self> {
        if w.dim() != self.dim() {
            return Err(Error::GridMismatch(format!(
                "window of dimension {} on a field of dimension {}",
                w.dim(),
                self.dim()
            )));
        }
        let fine = 2 * self.grid.size();
        let mut work = self.padded_samples();
        let ws = w.samples_on(fine);
        work.iter_mut().zip(&ws).for_each(|(x, y)| *x *= *y);
        let mut out = Self::from_padded(self.grid, work);
        out.provenance = format!("window·({})", self.provenance);
        Ok(out)
    }

    /// `Σ |û(k)|²`.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Largest `|û(-k) - conj û(k)|`, zero for real-valued fields.
    pub fn hermitian_defect(&self) -> f64 {
        let dim = self.dim();
        let mut worst: f64 = 0.0;
        for (flat, c) in self.coeffs.iter().enumerate() {
            let k = self.grid.freq(flat);
            let neg: Vec<i64> = k[..dim].iter().map(|x| -x).collect();
            let mirror = self.coeff(&neg);
            worst = worst.max((mirror - c.conj()).norm());
        }
        worst
    }

    /// Relative L² distance `‖u - v‖ / ‖v‖` over the lattice.
    pub fn relative_l2_error(&self, reference: &Self) -> Result<f64> {
        self.grid.check_same(&reference.grid)?;
        let num: f64 = self
            .coeffs
            .iter()
            .zip(&reference.coeffs)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        let den = reference.energy();
        Ok(if den == 0.0 {
            num.sqrt()
        } else {
            (num / den).sqrt()
        })
    }

    pub fn header(&self) -> ContainerHeader {
        ContainerHeader {
            dim: self.dim(),
            n: self.grid.size(),
            provenance: self.provenance.clone(),
        }
    }

    /// Binary container: magic, JSON header length and header, then little-endian `f64` pairs.
    pub fn write_binary<W: Write>(&self, mut sink: W) -> Result<()> {
        let header =
            serde_json::to_vec(&self.header()).map_err(|e| Error::Serialization(e.to_string()))?;
        let io = |e: std::io::Error| Error::Serialization(e.to_string());
        sink.write_all(MAGIC).map_err(io)?;
        sink.write_all(&(header.len() as u32).to_le_bytes())
            .map_err(io)?;
        sink.write_all(&header).map_err(io)?;
        for c in &self.coeffs {
            sink.write_all(&c.re.to_le_bytes()).map_err(io)?;
            sink.write_all(&c.im.to_le_bytes()).map_err(io)?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut source: R) -> Result<Self> {
        let io = |e: std::io::Error| Error::Serialization(e.to_string());
        let mut magic = [0u8; 4];
        source.read_exact(&mut magic).map_err(io)?;
        if &magic != MAGIC {
            return Err(Error::Serialization("bad magic".into()));
        }
        let mut len = [0u8; 4];
        source.read_exact(&mut len).map_err(io)?;
        let mut header = vec![0u8; u32::from_le_bytes(len) as usize];
        source.read_exact(&mut header).map_err(io)?;
        let header: ContainerHeader =
            serde_json::from_slice(&header).map_err(|e| Error::Serialization(e.to_string()))?;
        let grid = GridSpec::new(header.dim, header.n)?;
        let mut coeffs = Vec::with_capacity(grid.len());
        let mut pair = [0u8; 16];
        for _ in 0..grid.len() {
            source.read_exact(&mut pair).map_err(io)?;
            let re = f64::from_le_bytes(pair[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(pair[8..].try_into().expect("8 bytes"));
            coeffs.push(Complex64::new(re, im));
        }
        Ok(SpectralDistribution {
            grid,
            coeffs,
            support_hint: None,
            provenance: header.provenance,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = JsonContainer {
            header: self.header(),
            coeffs: self.coeffs.iter().map(|c| [c.re, c.im]).collect(),
        };
        serde_json::to_string(&doc).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: JsonContainer =
            serde_json::from_str(text).map_err(|e| Error::Serialization(e.to_string()))?;
        let grid = GridSpec::new(doc.header.dim, doc.header.n)?;
        let coeffs = doc
            .coeffs
            .iter()
            .map(|p| Complex64::new(p[0], p[1]))
            .collect();
        Ok(SpectralDistribution::from_coeffs(grid, coeffs)?.with_provenance(doc.header.provenance))
    }
}

const MAGIC: &[u8; 4] = b"MSOB";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContainerHeader {
    pub dim: usize,
    pub n: usize,
    pub provenance: String,
}

#[derive(Serialize, Deserialize)]
struct JsonContainer {
    header: ContainerHeader,
    coeffs: Vec<[f64; 2]>,
}

/// Storage index of a wavenumber vector on an `M`-per-axis FFT grid.
pub(crate) fn fine_index(k: &[i64], m: usize) -> usize {
    k.iter().fold(0usize, |acc, &ka| {
        acc * m + ka.rem_euclid(m as i64) as usize
    })
}

fn zero_nyquist(grid: &GridSpec, coeffs: &mut [Complex64]) {
    let n = grid.size();
    let half = n / 2;
    let dim = grid.dim();
    for (flat, c) in coeffs.iter_mut().enumerate() {
        let mut rem = flat;
        for _ in 0..dim {
            if rem % n == half {
                *c = ZERO;
                break;
            }
            rem /= n;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn delta(grid: GridSpec, x0: f64) -> SpectralDistribution {
        SpectralDistribution::from_fn(grid, |k| {
            Complex64::from_polar(1.0, -2.0 * PI * k[0] as f64 * x0)
        })
    }

    #[test]
    fn linear_combination_examples() {
        let g = GridSpec::new(1, 64).unwrap();
        let u = delta(g, 0.5);
        let v = delta(g, 0.3);
        let one = Complex64::new(1.0, 0.0);
        let same =
            SpectralDistribution::linear_combine(one, &u, Complex64::new(0.0, 0.0), &v).unwrap();
        assert_eq!(same.coeffs(), u.coeffs());
        let zero = SpectralDistribution::linear_combine(one, &u, -one, &u).unwrap();
        assert!(zero.coeffs().iter().all(|c| c.norm() == 0.0));
        let five = SpectralDistribution::linear_combine(2.0 * one, &u, 3.0 * one, &u).unwrap();
        for (a, b) in five.coeffs().iter().zip(u.coeffs()) {
            assert!((a - 5.0 * b).norm() < 1e-14);
        }
    }

    #[test]
    fn tensor_of_deltas_is_unimodular_off_nyquist() {
        let g = GridSpec::new(1, 32).unwrap();
        let t = delta(g, 0.5).tensor_product(&delta(g, 0.4)).unwrap();
        for (flat, c) in t.coeffs().iter().enumerate() {
            if !t.grid().is_nyquist(flat) {
                assert!((c.norm() - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn tensor_dimension_overflow() {
        let g2 = GridSpec::new(2, 16).unwrap();
        let g3 = GridSpec::new(3, 16).unwrap();
        let a = SpectralDistribution::zeros(g2);
        let b = SpectralDistribution::zeros(g3);
        assert_eq!(
            a.tensor_product(&b).unwrap_err().kind(),
            "DimensionOverflow"
        );
    }

    #[test]
    fn dealiased_product_matches_direct_convolution() {
        let g = GridSpec::new(1, 16).unwrap();
        let u = SpectralDistribution::from_fn(g, |k| {
            Complex64::new(1.0 / (1.0 + k[0].abs() as f64), k[0] as f64 * 0.1)
        });
        let v = SpectralDistribution::from_fn(g, |k| Complex64::new((k[0] as f64).cos(), 0.5));
        let p = u.dealiased_product(&v).unwrap();
        for k in -7i64..8 {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in -7i64..8 {
                acc += u.coeff(&[j]) * v.coeff(&[k - j]);
            }
            assert!((p.coeff(&[k]) - acc).norm() < 1e-12);
        }
    }

    #[test]
    fn containers_roundtrip() {
        let g = GridSpec::new(2, 16).unwrap();
        let u =
            SpectralDistribution::from_fn(g, |k| Complex64::new(k[0] as f64, k[1] as f64 * 0.5))
                .with_provenance("probe");
        let mut bytes = Vec::new();
        u.write_binary(&mut bytes).unwrap();
        let back = SpectralDistribution::read_binary(bytes.as_slice()).unwrap();
        assert_eq!(back.coeffs(), u.coeffs());
        assert_eq!(back.provenance(), "probe");
        let json = u.to_json().unwrap();
        assert_eq!(
            SpectralDistribution::from_json(&json).unwrap().coeffs(),
            u.coeffs()
        );
    }
}
