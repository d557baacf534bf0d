//! Periodic sampling grids and their integer frequency lattices.
//!
//! A grid of size `N` in dimension `m` samples the torus `[0,1)^m` at
//! `x_n = n / N`. Coefficients are stored row-major (last axis fastest) in
//! FFT order: storage index `i` on an axis carries the wavenumber `i` for
//! `i < N/2` and `i - N` otherwise.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest dimension a field may reach (tensor products of two 2D fields).
pub const MAX_DIM: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridSpec {
    dim: usize,
    size: usize,
}

impl GridSpec {
    pub fn new(dim: usize, size: usize) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::InvalidGrid(format!(
                "dimension {dim} not in 1..={MAX_DIM}"
            )));
        }
        if size < 16 || !size.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "size {size} is not a power of two >= 16"
            )));
        }
        Ok(GridSpec { dim, size })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Number of lattice points, `N^m`.
    pub fn len(&self) -> usize {
        self.size.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Wavenumber carried by storage index `i` on one axis.
    #[inline]
    pub fn wavenumber(&self, i: usize) -> i64 {
        wavenumber(i, self.size)
    }

    /// Storage index of wavenumber `k` on one axis, if it lies in the lattice.
    #[inline]
    pub fn axis_index(&self, k: i64) -> Option<usize> {
        let half = (self.size / 2) as i64;
        if k < -half || k >= half {
            None
        } else if k >= 0 {
            Some(k as usize)
        } else {
            Some((k + self.size as i64) as usize)
        }
    }

    /// Wavenumber vector of a flat storage index.
    pub fn freq(&self, flat: usize) -> [i64; MAX_DIM] {
        let mut out = [0i64; MAX_DIM];
        let mut rem = flat;
        for axis in (0..self.dim).rev() {
            out[axis] = self.wavenumber(rem % self.size);
            rem /= self.size;
        }
        out
    }

    /// Flat storage index of a wavenumber vector, if every component lies in the lattice.
    pub fn flat_index(&self, k: &[i64]) -> Option<usize> {
        let mut flat = 0usize;
        for &ka in k.iter().take(self.dim) {
            flat = flat * self.size + self.axis_index(ka)?;
        }
        Some(flat)
    }

    /// `|k|^2` for every flat index, as exact integers.
    pub fn norms_squared(&self) -> Vec<u64> {
        let axis: Vec<u64> = (0..self.size)
            .map(|i| {
                let k = self.wavenumber(i);
                (k * k) as u64
            })
            .collect();
        let mut out = vec![0u64; self.len()];
        for (flat, slot) in out.iter_mut().enumerate() {
            let mut rem = flat;
            let mut acc = 0u64;
            for _ in 0..self.dim {
                acc += axis[rem % self.size];
                rem /= self.size;
            }
            *slot = acc;
        }
        out
    }

    /// True when `k` has a component equal to `-N/2`, the unpaired Nyquist
    /// row that band limitation always zeroes.
    pub fn is_nyquist(&self, flat: usize) -> bool {
        let half = -((self.size / 2) as i64);
        self.freq(flat)[..self.dim].contains(&half)
    }

    pub fn check_same(&self, other: &GridSpec) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch(format!(
                "(dim {}, N {}) vs (dim {}, N {})",
                self.dim, self.size, other.dim, other.size
            )));
        }
        Ok(())
    }

    /// Spatial coordinates of the sample with flat index `flat` on an `M`-point-per-axis grid.
    pub fn sample_point(dim: usize, m: usize, flat: usize) -> [f64; MAX_DIM] {
        let mut out = [0f64; MAX_DIM];
        let mut rem = flat;
        for axis in (0..dim).rev() {
            out[axis] = (rem % m) as f64 / m as f64;
            rem /= m;
        }
        out
    }
}

#[inline]
pub fn wavenumber(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// Japanese bracket `<k> = (1 + |k|^2)^{1/2}` from `|k|^2`.
#[inline]
pub fn bracket(norm_sq: f64) -> f64 {
    (1.0 + norm_sq).sqrt()
}

/// Sobolev weight `<k>^{2s}` from `|k|^2`.
#[inline]
pub fn sobolev_weight(norm_sq: f64, s: f64) -> f64 {
    (1.0 + norm_sq).powf(s)
}

/// Largest admissible magnitude for a Sobolev exponent.
pub const MAX_ORDER: f64 = 8.0;

pub fn check_order(s: f64) -> Result<()> {
    if !s.is_finite() || s.abs() > MAX_ORDER {
        return Err(Error::WeightOverflow(s));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(GridSpec::new(1, 8).is_err());
        assert!(GridSpec::new(1, 48).is_err());
        assert!(GridSpec::new(0, 16).is_err());
        assert!(GridSpec::new(5, 16).is_err());
        assert!(GridSpec::new(2, 64).is_ok());
    }

    #[test]
    fn index_roundtrip() {
        let g = GridSpec::new(2, 16).unwrap();
        for flat in 0..g.len() {
            let k = g.freq(flat);
            assert_eq!(g.flat_index(&k[..2]), Some(flat));
        }
        assert_eq!(g.axis_index(8), None);
        assert_eq!(g.axis_index(-8), Some(8));
        assert!(g.is_nyquist(g.flat_index(&[-8, 3]).unwrap()));
    }

    #[test]
    fn norms_match_freqs() {
        let g = GridSpec::new(2, 16).unwrap();
        let norms = g.norms_squared();
        for (flat, n) in norms.iter().enumerate() {
            let k = g.freq(flat);
            assert_eq!(*n, (k[0] * k[0] + k[1] * k[1]) as u64);
        }
    }
}
