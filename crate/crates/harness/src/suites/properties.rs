use microsob_core::directions::{DirectionGrid, DirectionSet};
use microsob_core::grid::MAX_ORDER;
use microsob_core::indices::{
    check_sobolev_product, disjoint_support_indices, product_indices, tensor_indices,
    IndexHypotheses, ProductBounds, STRICTNESS_MARGIN,
};
use microsob_core::seminorm::WindowedSpectrum;
use microsob_core::synth::central_window;
use microsob_core::{
    synthesize, DistributionSpec, Error, GateCode, GridSpec, Result, SpectralDistribution,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{clock, SuiteContext};
use crate::corpus;
use crate::report::Check;

/// Outcome of an index gate, written out from the inequalities without the library code.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TranscribedGate {
    pub code: Option<GateCode>,
    pub s_star: f64,
    pub r_star: f64,
}

impl TranscribedGate {
    fn reject(code: GateCode) -> Self {
        TranscribedGate {
            code: Some(code),
            s_star: f64::NAN,
            r_star: f64::NAN,
        }
    }

    pub fn accepted(&self) -> bool {
        self.code.is_none()
    }
}

fn at_half(x: f64, m: usize) -> bool {
    (x - m as f64 / 2.0).abs() <= 1e-12
}

/// `min{a, b, a + b - m/2}`, strictly below the sum term when it binds and `-value`, `a` or `b` is `m/2`.
fn transcribed_order(a: f64, b: f64, m: usize) -> f64 {
    let sum = a + b - m as f64 / 2.0;
    let value = a.min(b).min(sum);
    let sum_binds = sum <= a.min(b) + 1e-12;
    if sum_binds && (at_half(-value, m) || at_half(a, m) || at_half(b, m)) {
        value - STRICTNESS_MARGIN
    } else {
        value
    }
}

pub fn transcribed_product_gate(rp: f64, rpp: f64, r1: f64, r2: f64, m: usize) -> TranscribedGate {
    let r = f64::min(r1 + f64::min(0.0, rpp), r2 + f64::min(0.0, rp));
    if r <= m as f64 / 2.0 {
        return TranscribedGate::reject(GateCode::MicrolocalOrderTooLow);
    }
    if rp + rpp < 0.0 {
        return TranscribedGate::reject(GateCode::NegativeGlobalSum);
    }
    TranscribedGate {
        code: None,
        s_star: transcribed_order(rp, rpp, m),
        r_star: r - m as f64 / 2.0,
    }
}

pub fn transcribed_disjoint_gate(rp: f64, rpp: f64, r1: f64, r2: f64, m: usize) -> TranscribedGate {
    if r1 + r2 < 0.0 {
        return TranscribedGate::reject(GateCode::NegativeMicrolocalSum);
    }
    if rp + rpp < 0.0 {
        return TranscribedGate::reject(GateCode::NegativeGlobalSum);
    }
    TranscribedGate {
        code: None,
        s_star: transcribed_order(rp, rpp, m),
        r_star: transcribed_order(r1, r2, m),
    }
}

fn transcribed_sobolev(rp: f64, rpp: f64, s: f64, m: usize) -> Option<GateCode> {
    let half = m as f64 / 2.0;
    if s.abs() > MAX_ORDER {
        Some(GateCode::OrderOutOfRange)
    } else if rp + rpp < 0.0 {
        Some(GateCode::NegativeGlobalSum)
    } else if s > rp.min(rpp) {
        Some(GateCode::ProductOrderAboveFactors)
    } else if at_half(-s, m) || at_half(rp, m) || at_half(rpp, m) {
        (s > rp + rpp - half - STRICTNESS_MARGIN).then_some(GateCode::ProductOrderAboveSum)
    } else {
        (s > rp + rpp - half + 1e-12).then_some(GateCode::ProductOrderAboveSum)
    }
}

fn observed(result: Result<ProductBounds>) -> TranscribedGate {
    match result {
        Ok(b) => TranscribedGate {
            code: None,
            s_star: b.s_star_max,
            r_star: b.r_star_max,
        },
        Err(Error::IndexInadmissible { code, .. }) => TranscribedGate::reject(code),
        Err(_) => TranscribedGate::reject(GateCode::OrderOutOfRange),
    }
}

fn agrees(a: &TranscribedGate, b: &TranscribedGate) -> bool {
    a.code == b.code
        && (a.code.is_some()
            || ((a.s_star - b.s_star).abs() <= 1e-12 && (a.r_star - b.r_star).abs() <= 1e-12))
}

const GATE_TUPLES: usize = 100_000;
const GATE_SECONDS: f64 = 5.0;

/// An order that lands on the boundaries often: `±m/2`, `0`, quarter steps, or anywhere in range.
fn draw_order(rng: &mut ChaCha8Rng, m: usize) -> f64 {
    let half = m as f64 / 2.0;
    match rng.gen_range(0..6) {
        0 => half,
        1 => -half,
        2 => 0.0,
        3 => rng.gen_range(-8..=16) as f64 * 0.25,
        _ => rng.gen_range(-2.0..4.0),
    }
}

fn random_hypotheses(rng: &mut ChaCha8Rng) -> IndexHypotheses {
    let m = rng.gen_range(1..=3);
    let mut h = IndexHypotheses::new(
        draw_order(rng, m),
        draw_order(rng, m),
        draw_order(rng, m),
        draw_order(rng, m),
        m,
    );
    match rng.gen_range(0..8) {
        0 => h.r_double_prime = -h.r_prime,
        1 => h.r2 = -h.r1,
        2 => h.r1 = m as f64 / 2.0 - h.r_double_prime.min(0.0),
        3 | 4 => {
            h.r_prime = h.r_prime.abs();
            h.r1 += 3.0;
            h.r2 += 3.0;
        }
        _ => {}
    }
    h
}

fn random_s_star(rng: &mut ChaCha8Rng, h: &IndexHypotheses) -> f64 {
    let half = h.half_dim();
    match rng.gen_range(0..5) {
        0 => h.r_prime.min(h.r_double_prime),
        1 => h.r_prime + h.r_double_prime - half,
        2 => -half,
        3 => h.r_prime + h.r_double_prime - half - STRICTNESS_MARGIN / 2.0,
        _ => rng.gen_range(-3.0..3.0),
    }
}

pub(super) fn gate_soundness(ctx: &SuiteContext) -> Vec<Check> {
    let check = Check::new(
        "gate-soundness/random-tuples",
        "gate decisions, codes and certified orders agree with the inequalities written out directly",
        &(ctx.seed, GATE_TUPLES),
    );
    let (counts, secs) = clock(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
        let (mut mismatches, mut accepted, mut first) = (0usize, 0usize, None);
        for _ in 0..GATE_TUPLES {
            let h = random_hypotheses(&mut rng);
            let s = random_s_star(&mut rng, &h);
            let (rp, rpp, r1, r2, m) = (h.r_prime, h.r_double_prime, h.r1, h.r2, h.m);
            let general = observed(product_indices(&h));
            let disjoint = observed(disjoint_support_indices(&h));
            let tensor = tensor_indices(&h);
            let sobolev = check_sobolev_product(rp, rpp, s, m).err().map(|e| match e {
                Error::IndexInadmissible { code, .. } => code,
                _ => GateCode::OrderOutOfRange,
            });
            let tensor_ok = tensor.s_max
                == f64::min(rp + f64::min(0.0, rpp), rpp + f64::min(0.0, rp))
                && tensor.r_max == f64::min(r1 + f64::min(0.0, rpp), r2 + f64::min(0.0, rp));
            let ok = agrees(&general, &transcribed_product_gate(rp, rpp, r1, r2, m))
                && agrees(&disjoint, &transcribed_disjoint_gate(rp, rpp, r1, r2, m))
                && tensor_ok
                && sobolev == transcribed_sobolev(rp, rpp, s, m);
            accepted += usize::from(general.accepted());
            if !ok {
                mismatches += 1;
                first.get_or_insert((h, s));
            }
        }
        (mismatches, accepted, first)
    });
    let (mismatches, accepted, first) = counts;
    let mut check = check
        .measure("tuples", GATE_TUPLES as f64)
        .measure("mismatches", mismatches as f64)
        .measure("general_accepted", accepted as f64)
        .tolerance(format!("zero mismatches, under {GATE_SECONDS} s"))
        .timed(secs)
        .verdict(mismatches == 0 && secs < GATE_SECONDS);
    if let Some((h, s)) = first {
        check = check.note(format!("first mismatch at {h:?}, s_* = {s}"));
    }
    vec![check]
}

const AXIOM_CHECKS: usize = 1000;
const AXIOM_TOL: f64 = 1e-10;

#[derive(Clone, Copy)]
enum Axiom {
    Homogeneity,
    Triangle,
    OrderMonotone,
    ConeMonotone,
}

impl Axiom {
    const ALL: [Axiom; 4] = [
        Axiom::Homogeneity,
        Axiom::Triangle,
        Axiom::OrderMonotone,
        Axiom::ConeMonotone,
    ];

    fn label(self) -> &'static str {
        match self {
            Axiom::Homogeneity => "homogeneity",
            Axiom::Triangle => "triangle",
            Axiom::OrderMonotone => "order-monotonicity",
            Axiom::ConeMonotone => "cone-monotonicity",
        }
    }

    fn statement(self) -> &'static str {
        match self {
            Axiom::Homogeneity => "q_s(cu) = |c| q_s(u) and p_r(cu) = |c| p_r(u)",
            Axiom::Triangle => "q_s(u+v) <= q_s(u) + q_s(v) and p_r(u+v) <= p_r(u) + p_r(v)",
            Axiom::OrderMonotone => "s1 <= s2 implies q_s1 <= q_s2 and p_s1 <= p_s2",
            Axiom::ConeMonotone => "V1 ⊆ V2 implies p_{r,V1} <= p_{r,V2}",
        }
    }
}

struct Pool {
    fields: Vec<SpectralDistribution>,
    grid: DirectionGrid,
}

fn pool(specs: &[(&str, DistributionSpec)], n: usize) -> Result<Pool> {
    let dim = specs[0].1.dim();
    let grid = GridSpec::new(dim, n)?;
    let fields = specs
        .iter()
        .map(|(_, s)| synthesize(s, &grid))
        .collect::<Result<Vec<_>>>()?;
    Ok(Pool {
        fields,
        grid: DirectionGrid::for_dim(dim),
    })
}

fn random_cone(rng: &mut ChaCha8Rng, grid: &DirectionGrid) -> (DirectionSet, DirectionSet) {
    match grid {
        DirectionGrid::Signs => {
            let inner = if rng.gen_bool(0.5) {
                DirectionSet::positive_ray()
            } else {
                DirectionSet::negative_ray()
            };
            let outer = if rng.gen_bool(0.5) {
                DirectionSet::full(grid.clone())
            } else {
                inner.clone()
            };
            (inner, outer)
        }
        _ => {
            let center = rng.gen_range(0.0..std::f64::consts::TAU);
            let small = rng.gen_range(0.05..1.0);
            let large = small + rng.gen_range(0.0..1.5);
            (
                DirectionSet::from_cap_angles(grid.clone(), &[center], small),
                DirectionSet::from_cap_angles(grid.clone(), &[center], large),
            )
        }
    }
}

/// Relative amount by which `lhs <= rhs` fails; zero when it holds.
fn excess(lhs: f64, rhs: f64) -> f64 {
    ((lhs - rhs) / rhs.abs().max(f64::MIN_POSITIVE)).max(0.0)
}

fn one_axiom(axiom: Axiom, pool: &Pool, rng: &mut ChaCha8Rng) -> Result<f64> {
    let psi = central_window(pool.fields[0].dim());
    let u = &pool.fields[rng.gen_range(0..pool.fields.len())];
    let s = rng.gen_range(-3.0..3.0);
    let (inner, outer) = random_cone(rng, &pool.grid);
    let spectrum = |f: &SpectralDistribution| WindowedSpectrum::new(f, &psi);
    let wu = spectrum(u)?;
    Ok(match axiom {
        Axiom::Homogeneity => {
            let c = Complex64::new(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0));
            let wc = spectrum(&u.scaled(c))?;
            let q = (wc.q(s)? - c.norm() * wu.q(s)?).abs() / (c.norm() * wu.q(s)?);
            let p = (wc.p(&outer, s)? - c.norm() * wu.p(&outer, s)?).abs()
                / (c.norm() * wu.p(&outer, s)?).max(f64::MIN_POSITIVE);
            q.max(p)
        }
        Axiom::Triangle => {
            let v = &pool.fields[rng.gen_range(0..pool.fields.len())];
            let c = Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let sum = SpectralDistribution::linear_combine(Complex64::new(1.0, 0.0), u, c, v)?;
            let (ws, wv) = (spectrum(&sum)?, spectrum(&v.scaled(c))?);
            excess(ws.q(s)?, wu.q(s)? + wv.q(s)?).max(excess(
                ws.p(&outer, s)?,
                wu.p(&outer, s)? + wv.p(&outer, s)?,
            ))
        }
        Axiom::OrderMonotone => {
            let t = s + rng.gen_range(0.0..3.0);
            excess(wu.q(s)?, wu.q(t)?).max(excess(wu.p(&outer, s)?, wu.p(&outer, t)?))
        }
        Axiom::ConeMonotone => excess(wu.p(&inner, s)?, wu.p(&outer, s)?),
    })
}

pub(super) fn seminorm_axioms(ctx: &SuiteContext) -> Vec<Check> {
    let pools = match (
        pool(&corpus::extended_1d(), 512),
        pool(&corpus::standard_2d(), 64),
    ) {
        (Ok(a), Ok(b)) => [a, b],
        (Err(e), _) | (_, Err(e)) => {
            return vec![
                Check::new("seminorm-axioms/setup", "corpus synthesis", &ctx.seed).failed_with(&e),
            ]
        }
    };
    let per_axiom = AXIOM_CHECKS / Axiom::ALL.len();
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed ^ 0x5e31);
    let mut out = Vec::new();
    for axiom in Axiom::ALL {
        let check = Check::new(
            format!("seminorm-axioms/{}", axiom.label()),
            axiom.statement(),
            &(ctx.seed, axiom.label(), per_axiom),
        );
        let (result, secs) = clock(|| -> Result<(f64, usize)> {
            let (mut worst, mut failures) = (0.0f64, 0);
            for i in 0..per_axiom {
                let e = one_axiom(axiom, &pools[i % 2], &mut rng)?;
                worst = worst.max(e);
                failures += usize::from(e > AXIOM_TOL);
            }
            Ok((worst, failures))
        });
        out.push(match result {
            Ok((worst, failures)) => check
                .measure("checks", per_axiom as f64)
                .measure("worst_relative_violation", worst)
                .measure("failures", failures as f64)
                .tolerance(format!("relative violation <= {AXIOM_TOL}"))
                .timed(secs)
                .verdict(failures == 0),
            Err(e) => check.failed_with(&e).timed(secs),
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transcription_matches_known_cases() {
        let g = transcribed_product_gate(0.2, 0.2, 6.0, 6.0, 1);
        assert!(g.accepted());
        assert!((g.s_star + 0.1).abs() < 1e-15);
        assert_eq!(g.r_star, 5.5);
        assert_eq!(
            transcribed_product_gate(1.0, 1.0, 0.5, 0.5, 1).code,
            Some(GateCode::MicrolocalOrderTooLow)
        );
        let d = transcribed_disjoint_gate(0.45, 0.45, 0.45, 0.45, 1);
        assert!((d.r_star - 0.4).abs() < 1e-15);
        assert_eq!(
            transcribed_sobolev(0.5, 0.5, 0.5, 1),
            Some(GateCode::ProductOrderAboveSum)
        );
    }

    #[test]
    fn small_gate_run_has_no_mismatch() {
        let c = gate_soundness(&SuiteContext { seed: 7 });
        assert_eq!(c[0].measured["mismatches"], 0.0, "{:?}", c[0].note);
    }
}
