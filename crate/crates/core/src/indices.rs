//! Index admissibility for tensor products, diagonal products and disjoint-support products.

use serde::{Deserialize, Serialize};

use crate::error::{Error, GateCode, Result};
use crate::grid::MAX_ORDER;

/// Slack required where an inequality must be strict; certified orders at the boundary drop by it.
pub const STRICTNESS_MARGIN: f64 = 1e-6;

/// Two reals closer than this count as coinciding with `m/2`.
const COINCIDENCE_TOL: f64 = 1e-12;

/// Global orders `r', r''`, microlocal orders `r1, r2`, dimension `m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexHypotheses {
    pub r_prime: f64,
    pub r_double_prime: f64,
    pub r1: f64,
    pub r2: f64,
    pub m: usize,
}

impl IndexHypotheses {
    pub fn new(r_prime: f64, r_double_prime: f64, r1: f64, r2: f64, m: usize) -> Self {
        IndexHypotheses {
            r_prime,
            r_double_prime,
            r1,
            r2,
            m,
        }
    }

    /// The same hypotheses with the factors exchanged.
    pub fn swapped(&self) -> Self {
        IndexHypotheses {
            r_prime: self.r_double_prime,
            r_double_prime: self.r_prime,
            r1: self.r2,
            r2: self.r1,
            m: self.m,
        }
    }

    pub fn half_dim(&self) -> f64 {
        self.m as f64 / 2.0
    }

    /// Orders must be finite; only those used as seminorm exponents are held to `|s| <= 8`.
    pub fn validate(&self) -> Result<()> {
        for (name, x) in [
            ("r'", self.r_prime),
            ("r''", self.r_double_prime),
            ("r1", self.r1),
            ("r2", self.r2),
        ] {
            if !x.is_finite() {
                return Err(Error::inadmissible(
                    GateCode::OrderOutOfRange,
                    format!("{name} = {x} is not finite"),
                ));
            }
        }
        if self.m == 0 || self.m > 4 {
            return Err(Error::inadmissible(
                GateCode::OrderOutOfRange,
                format!("dimension m = {} outside 1..=4", self.m),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TensorBounds {
    pub s_max: f64,
    pub r_max: f64,
}

/// `s_max = min{r'+min{0,r''}, r''+min{0,r'}}`, `r_max = min{r1+min{0,r''}, r2+min{0,r'}}`.
pub fn tensor_indices(h: &IndexHypotheses) -> TensorBounds {
    let (a, b) = (h.r_prime, h.r_double_prime);
    TensorBounds {
        s_max: (a + b.min(0.0)).min(b + a.min(0.0)),
        r_max: (h.r1 + b.min(0.0)).min(h.r2 + a.min(0.0)),
    }
}

/// Certified orders of a product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductBounds {
    /// Derived microlocal order; `None` in the disjoint-support route.
    pub r: Option<f64>,
    pub s_star_max: f64,
    pub r_star_max: f64,
    /// Where a strictness margin was applied.
    pub strictness_notes: Vec<String>,
}

fn coincides(x: f64, y: f64) -> bool {
    (x - y).abs() <= COINCIDENCE_TOL
}

/// `min{min{a,b}, a+b-m/2}`, lowered by the margin when the sum term binds and `-s`, `a` or `b` equals `m/2`.
fn certified_order(a: f64, b: f64, half: f64, label: &str, notes: &mut Vec<String>) -> f64 {
    let pair = a.min(b);
    let sum = a + b - half;
    let s = pair.min(sum);
    let strict = coincides(-s, half) || coincides(a, half) || coincides(b, half);
    if strict && sum <= pair + COINCIDENCE_TOL {
        notes.push(format!(
            "{label}: sum bound {sum} made strict by {STRICTNESS_MARGIN}"
        ));
        return s - STRICTNESS_MARGIN;
    }
    s
}

fn global_sum_gate(h: &IndexHypotheses) -> Result<()> {
    let sum = h.r_prime + h.r_double_prime;
    if sum < 0.0 {
        return Err(Error::inadmissible(
            GateCode::NegativeGlobalSum,
            format!("r' + r'' = {sum} < 0"),
        ));
    }
    Ok(())
}

/// The diagonal product gate: `r := min{r1+min{0,r''}, r2+min{0,r'}} > m/2` and `r'+r'' >= 0`.
pub fn product_indices(h: &IndexHypotheses) -> Result<ProductBounds> {
    h.validate()?;
    let half = h.half_dim();
    let r = tensor_indices(h).r_max;
    if r <= half {
        return Err(Error::inadmissible(
            GateCode::MicrolocalOrderTooLow,
            format!("r = min{{r1 + min{{0,r''}}, r2 + min{{0,r'}}}} = {r} <= m/2 = {half}"),
        ));
    }
    global_sum_gate(h)?;
    let mut notes = Vec::new();
    let s = certified_order(h.r_prime, h.r_double_prime, half, "s_*", &mut notes);
    Ok(ProductBounds {
        r: Some(r),
        s_star_max: s,
        r_star_max: r - half,
        strictness_notes: notes,
    })
}

/// The disjoint-support gate: `r1 + r2 >= 0` and `r' + r'' >= 0`.
pub fn disjoint_support_indices(h: &IndexHypotheses) -> Result<ProductBounds> {
    h.validate()?;
    let half = h.half_dim();
    let micro = h.r1 + h.r2;
    if micro < 0.0 {
        return Err(Error::inadmissible(
            GateCode::NegativeMicrolocalSum,
            format!("r1 + r2 = {micro} < 0"),
        ));
    }
    global_sum_gate(h)?;
    let mut notes = Vec::new();
    let s = certified_order(h.r_prime, h.r_double_prime, half, "s_*", &mut notes);
    let r_star = certified_order(h.r1, h.r2, half, "r_*", &mut notes);
    Ok(ProductBounds {
        r: None,
        s_star_max: s,
        r_star_max: r_star,
        strictness_notes: notes,
    })
}

/// Checks a requested `s_*` against `H^{r'} × H^{r''} → H^{s_*}`.
pub fn check_sobolev_product(
    r_prime: f64,
    r_double_prime: f64,
    s_star: f64,
    m: usize,
) -> Result<()> {
    let h = IndexHypotheses::new(r_prime, r_double_prime, 0.0, 0.0, m);
    h.validate()?;
    if !s_star.is_finite() || s_star.abs() > MAX_ORDER {
        return Err(Error::inadmissible(
            GateCode::OrderOutOfRange,
            format!("s_* = {s_star} out of range"),
        ));
    }
    global_sum_gate(&h)?;
    let half = h.half_dim();
    let pair = r_prime.min(r_double_prime);
    if s_star > pair {
        return Err(Error::inadmissible(
            GateCode::ProductOrderAboveFactors,
            format!("s_* = {s_star} > min{{r', r''}} = {pair}"),
        ));
    }
    let sum = r_prime + r_double_prime - half;
    let strict =
        coincides(-s_star, half) || coincides(r_prime, half) || coincides(r_double_prime, half);
    let limit = if strict { sum - STRICTNESS_MARGIN } else { sum };
    if s_star > limit + if strict { 0.0 } else { COINCIDENCE_TOL } {
        return Err(Error::inadmissible(
            GateCode::ProductOrderAboveSum,
            format!(
                "s_* = {s_star} {} r' + r'' - m/2 = {sum}",
                if strict {
                    "is not strictly below"
                } else {
                    "exceeds"
                }
            ),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(e: Error) -> GateCode {
        match e {
            Error::IndexInadmissible { code, .. } => code,
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn tensor_examples() {
        let t = tensor_indices(&IndexHypotheses::new(1.0, 1.0, 2.0, 2.0, 1));
        assert_eq!((t.s_max, t.r_max), (1.0, 2.0));
        let t = tensor_indices(&IndexHypotheses::new(-1.0, 1.0, 2.0, 2.0, 1));
        assert_eq!((t.s_max, t.r_max), (-1.0, 1.0));
        let t = tensor_indices(&IndexHypotheses::new(0.0, 0.0, 3.0, 1.5, 1));
        assert_eq!((t.s_max, t.r_max), (0.0, 1.5));
    }

    #[test]
    fn product_examples() {
        let b = product_indices(&IndexHypotheses::new(0.2, 0.2, 10.0, 10.0, 1)).unwrap();
        assert_eq!(b.r, Some(10.0));
        assert!((b.s_star_max + 0.1).abs() < 1e-15);
        assert_eq!(b.r_star_max, 9.5);
        let e = product_indices(&IndexHypotheses::new(-0.6, 0.2, 10.0, 10.0, 1)).unwrap_err();
        assert_eq!(code(e), GateCode::NegativeGlobalSum);
        let e = product_indices(&IndexHypotheses::new(1.0, 1.0, 0.4, 0.4, 1)).unwrap_err();
        assert_eq!(code(e), GateCode::MicrolocalOrderTooLow);
    }

    #[test]
    fn boundary_r_is_rejected() {
        let e = product_indices(&IndexHypotheses::new(1.0, 1.0, 0.5, 0.5, 1)).unwrap_err();
        assert_eq!(code(e), GateCode::MicrolocalOrderTooLow);
    }

    #[test]
    fn strictness_margin_at_coincidence() {
        // r' = m/2 and the sum term binds: 0.5 + 0.2 - 0.5 = 0.2 = min{0.5, 0.2}.
        let b = product_indices(&IndexHypotheses::new(0.5, 0.2, 5.0, 5.0, 1)).unwrap();
        assert!((b.s_star_max - (0.2 - STRICTNESS_MARGIN)).abs() < 1e-15);
        assert_eq!(b.strictness_notes.len(), 1);
    }

    #[test]
    fn disjoint_examples() {
        let h = IndexHypotheses::new(0.2, 0.2, 0.3, 0.3, 1);
        assert!(product_indices(&h).is_err());
        let b = disjoint_support_indices(&h).unwrap();
        assert!((b.s_star_max + 0.1).abs() < 1e-15);
        assert!((b.r_star_max - 0.1).abs() < 1e-15);
        let e =
            disjoint_support_indices(&IndexHypotheses::new(0.2, 0.2, -0.3, 0.2, 1)).unwrap_err();
        assert_eq!(code(e), GateCode::NegativeMicrolocalSum);
        let b = disjoint_support_indices(&IndexHypotheses::new(1.0, 1.0, 1.0, 1.0, 2)).unwrap();
        assert!((b.s_star_max - (1.0 - STRICTNESS_MARGIN)).abs() < 1e-15);
        assert!((b.r_star_max - (1.0 - STRICTNESS_MARGIN)).abs() < 1e-15);
    }

    #[test]
    fn sobolev_product_gate() {
        assert!(check_sobolev_product(1.0, 1.0, 0.5, 1).is_ok());
        assert!(check_sobolev_product(0.2, 0.2, -0.1, 1).is_ok());
        assert_eq!(
            code(check_sobolev_product(0.2, 0.2, 0.0, 1).unwrap_err()),
            GateCode::ProductOrderAboveSum
        );
        assert_eq!(
            code(check_sobolev_product(2.0, 0.6, 0.7, 1).unwrap_err()),
            GateCode::ProductOrderAboveFactors
        );
        assert_eq!(
            code(check_sobolev_product(0.5, 0.5, 0.5, 1).unwrap_err()),
            GateCode::ProductOrderAboveSum
        );
    }
}
