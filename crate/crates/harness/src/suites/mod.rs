//! Named verification suites, one per acceptance criterion.

use std::time::Instant;

use crate::report::Check;

mod orders;
mod products;
mod properties;
mod tensor;

pub use properties::{transcribed_disjoint_gate, transcribed_product_gate, TranscribedGate};

/// Inputs shared by every suite.
#[derive(Debug, Clone, Copy)]
pub struct SuiteContext {
    pub seed: u64,
}

pub struct SuiteInfo {
    pub name: &'static str,
    pub criterion: usize,
    pub summary: &'static str,
    run: fn(&SuiteContext) -> Vec<Check>,
}

impl SuiteInfo {
    pub fn run(&self, ctx: &SuiteContext) -> Vec<Check> {
        (self.run)(ctx)
    }
}

pub const SUITES: &[SuiteInfo] = &[
    SuiteInfo {
        name: "calibration",
        criterion: 1,
        summary: "global order estimates against closed-form decay",
        run: orders::calibration,
    },
    SuiteInfo {
        name: "tensor-bound",
        criterion: 2,
        summary: "tensor seminorm ratio at the largest admissible order, four sign cases",
        run: tensor::tensor_bound,
    },
    SuiteInfo {
        name: "tensor-wavefront",
        criterion: 3,
        summary: "estimated WF of u⊗v inside the three-term product union",
        run: orders::tensor_wavefront,
    },
    SuiteInfo {
        name: "product-positive",
        criterion: 4,
        summary: "one-sided power squared: certificate, measured orders, δ*L",
        run: products::product_positive,
    },
    SuiteInfo {
        name: "product-rejects",
        criterion: 5,
        summary: "transversality and index gate rejections with exact codes",
        run: products::product_rejects,
    },
    SuiteInfo {
        name: "smooth-restriction",
        criterion: 6,
        summary: "smooth products against real-space multiplication; padded vs direct convolution",
        run: products::smooth_restriction,
    },
    SuiteInfo {
        name: "four-term",
        criterion: 7,
        summary: "four-term split: I1 = 0, term bounds, constant stability, cover",
        run: tensor::four_term,
    },
    SuiteInfo {
        name: "sobolev-bound",
        criterion: 8,
        summary: "multiplication bound ratio stable under refinement",
        run: products::sobolev_bound,
    },
    SuiteInfo {
        name: "disjoint-support",
        criterion: 9,
        summary: "product of steps at separated points through the disjoint-support gate",
        run: products::disjoint_support,
    },
    SuiteInfo {
        name: "gate-soundness",
        criterion: 10,
        summary: "index gates against a direct transcription of the inequalities",
        run: properties::gate_soundness,
    },
    SuiteInfo {
        name: "seminorm-axioms",
        criterion: 11,
        summary: "homogeneity, triangle inequality, order and cone monotonicity",
        run: properties::seminorm_axioms,
    },
];

pub fn find(name: &str) -> Option<&'static SuiteInfo> {
    SUITES.iter().find(|s| s.name == name)
}

pub fn names() -> Vec<&'static str> {
    SUITES.iter().map(|s| s.name).collect()
}

/// Runs `f` and returns its value with the elapsed seconds.
pub(crate) fn clock<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64())
}

/// Relative spread `max/min - 1` of positive values.
pub(crate) fn spread(values: &[f64]) -> f64 {
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    if lo > 0.0 {
        hi / lo - 1.0
    } else if hi == lo {
        0.0
    } else {
        f64::INFINITY
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique_and_cover_every_criterion() {
        let mut n = names();
        n.sort();
        n.dedup();
        assert_eq!(n.len(), SUITES.len());
        let mut c: Vec<usize> = SUITES.iter().map(|s| s.criterion).collect();
        c.sort();
        assert_eq!(c, (1..=11).collect::<Vec<_>>());
    }

    #[test]
    fn spread_of_equal_values_is_zero() {
        assert_eq!(spread(&[2.0, 2.0]), 0.0);
        assert!((spread(&[1.0, 1.2]) - 0.2).abs() < 1e-15);
        assert_eq!(spread(&[0.0, 1.0]), f64::INFINITY);
    }
}
