//! Property tests for the structural invariants of each module.

use microsob_core::conic::{diagonal_pullback, transversal, ConicRegionSet, ProductConicSet};
use microsob_core::cutoff::HomogeneousCutoff;
use microsob_core::directions::{DirectionGrid, DirectionSet};
use microsob_core::indices::{product_indices, IndexHypotheses};
use microsob_core::product::{multiply, ProductMode};
use microsob_core::seminorm::WindowedSpectrum;
use microsob_core::synth::central_window;
use microsob_core::wavefront::{FitConfig, OrderField};
use microsob_core::{
    synthesize, CellLattice, DistributionSpec, GridSpec, SpectralDistribution, WindowFunction,
};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Random coefficients up to `band`, mirrored so the field is real.
fn real_field(seed: u64, n: usize, band: i64) -> SpectralDistribution {
    let grid = GridSpec::new(1, n).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half: Vec<Complex64> = (0..=band)
        .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    SpectralDistribution::from_fn(grid, |k| {
        let k = k[0];
        if k.abs() > band {
            c(0.0, 0.0)
        } else if k == 0 {
            c(half[0].re, 0.0)
        } else if k > 0 {
            half[k as usize]
        } else {
            half[(-k) as usize].conj()
        }
    })
}

fn complex_field(seed: u64, n: usize) -> SpectralDistribution {
    let grid = GridSpec::new(1, n).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values: Vec<Complex64> = (0..n)
        .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    SpectralDistribution::from_fn(grid, |k| values[k[0].rem_euclid(n as i64) as usize])
}

fn max_coeff(u: &SpectralDistribution) -> f64 {
    u.coeffs().iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn max_gap(a: &SpectralDistribution, b: &SpectralDistribution) -> f64 {
    a.coeffs()
        .iter()
        .zip(b.coeffs())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn sign_set(pos: bool, neg: bool) -> DirectionSet {
    let mut s = DirectionSet::empty(DirectionGrid::Signs);
    if pos {
        s = s.union(&DirectionSet::positive_ray()).unwrap();
    }
    if neg {
        s = s.union(&DirectionSet::negative_ray()).unwrap();
    }
    s
}

/// A 1D conic set with per-cell sign masks drawn from `bits` (two bits per cell).
fn conic_1d(bits: u16) -> ConicRegionSet {
    let lattice = CellLattice::standard(1);
    let masks: Vec<DirectionSet> = (0..8)
        .map(|cell| sign_set(bits >> (2 * cell) & 1 == 1, bits >> (2 * cell + 1) & 1 == 1))
        .collect();
    ConicRegionSet::from_cell_masks(&lattice, &masks)
}

fn cap(grid: &DirectionGrid, center: f64, half: f64) -> DirectionSet {
    DirectionSet::from_cap_angles(grid.clone(), &[center], half)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn products_and_windows_of_real_fields_stay_hermitian(s1 in any::<u64>(), s2 in any::<u64>()) {
        let (u, v) = (real_field(s1, 128, 40), real_field(s2, 128, 40));
        let uv = u.dealiased_product(&v).unwrap();
        prop_assert!(uv.hermitian_defect() <= 1e-13 * max_coeff(&uv));
        let wu = u.window_multiply(&central_window(1)).unwrap();
        prop_assert!(wu.hermitian_defect() <= 1e-13 * max_coeff(&wu));
    }

    #[test]
    fn window_multiplication_is_associative(seed in any::<u64>(), lo in 0.2f64..0.3, hi in 0.7f64..0.8) {
        let u = real_field(seed, 1024, 6);
        let w1 = central_window(1);
        let w2 = WindowFunction::plateau(&[lo], &[hi], 0.1);
        let stepwise = u.window_multiply(&w1).unwrap().window_multiply(&w2).unwrap();
        let joint = u.window_multiply(&w1.product(&w2)).unwrap();
        let err = stepwise.relative_l2_error(&joint).unwrap();
        prop_assert!(err < 1e-10, "relative L2 gap {err:e}");
    }

    #[test]
    fn tensor_product_is_bilinear(s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>(),
                                  a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let (u, u2, v) = (complex_field(s1, 16), complex_field(s2, 16), complex_field(s3, 16));
        let (a, b) = (c(a, 0.5), c(0.25, b));
        let mixed = SpectralDistribution::linear_combine(a, &u, b, &u2).unwrap();
        let lhs = mixed.tensor_product(&v).unwrap();
        let rhs = SpectralDistribution::linear_combine(
            a, &u.tensor_product(&v).unwrap(), b, &u2.tensor_product(&v).unwrap()).unwrap();
        prop_assert!(max_gap(&lhs, &rhs) <= 1e-14 * max_coeff(&rhs).max(1.0));
    }

    #[test]
    fn tensor_coefficients_are_products(s1 in any::<u64>(), s2 in any::<u64>(), k in -7i64..8, l in -7i64..8) {
        let (u, v) = (complex_field(s1, 16), complex_field(s2, 16));
        let t = u.tensor_product(&v).unwrap();
        prop_assert_eq!(t.coeff(&[k, l]), u.coeff(&[k]) * v.coeff(&[l]));
    }

    #[test]
    fn transversality_is_symmetric(a in any::<u16>(), b in any::<u16>()) {
        let lattice = CellLattice::standard(1);
        let (l1, l2) = (conic_1d(a), conic_1d(b));
        prop_assert_eq!(transversal(&l1, &l2, &lattice).unwrap(), transversal(&l2, &l1, &lattice).unwrap());
    }

    #[test]
    fn transversality_is_symmetric_on_the_circle(c1 in 0.0..TAU, c2 in 0.0..TAU,
                                                h1 in 0.05f64..1.2, h2 in 0.05f64..1.2) {
        let lattice = CellLattice::standard(2);
        let grid = DirectionGrid::circle(72);
        let region = lattice.region_of_cells(&[lattice.cell_of(&[0.5, 0.5])]);
        let l1 = ConicRegionSet::single(region.clone(), cap(&grid, c1, h1));
        let l2 = ConicRegionSet::single(region, cap(&grid, c2, h2));
        prop_assert_eq!(transversal(&l1, &l2, &lattice).unwrap(), transversal(&l2, &l1, &lattice).unwrap());
    }

    #[test]
    fn pullback_grows_with_its_inputs(a in any::<u16>(), extra in any::<u16>(), b in any::<u16>()) {
        let lattice = CellLattice::standard(1);
        let (small, l2) = (conic_1d(a), conic_1d(b));
        let large = conic_1d(a | extra);
        let pull = |l1: &ConicRegionSet| diagonal_pullback(&ProductConicSet::new(l1.clone(), l2.clone()), &lattice);
        if let (Ok(p), Ok(q)) = (pull(&small), pull(&large)) {
            prop_assert!(p.violations_against(&q, &lattice).unwrap().is_empty());
        }
    }

    #[test]
    fn fattening_is_nested(center in 0.0..TAU, half in 0.0f64..1.0, e1 in 0.01f64..0.9, de in 0.0f64..0.09) {
        let grid = DirectionGrid::circle(360);
        let w = cap(&grid, center, half);
        let e2 = e1 + de;
        if let (Ok(f1), Ok(f2)) = (w.fatten(e1), w.fatten(e2)) {
            prop_assert!(w.is_subset(&f1).unwrap());
            prop_assert!(f1.is_subset(&f2).unwrap());
        }
    }

    #[test]
    fn cutoff_and_its_complement_partition_directions(center in 0.0..TAU, half in 0.05f64..1.0,
                                                      room in 0.1f64..0.8) {
        let grid = DirectionGrid::circle(360);
        let core = cap(&grid, center, half);
        let fattened = cap(&grid, center, half + room);
        let alpha = HomogeneousCutoff::new(&core, &fattened).unwrap();
        prop_assert!(alpha.support().union(&alpha.complement_support()).unwrap().is_full());
        for d in 0..grid.len() {
            let a = alpha.value(d);
            prop_assert!((0.0..=1.0).contains(&a));
            if core.contains(d) || !fattened.contains(d) {
                prop_assert_eq!(a * (1.0 - a), 0.0);
            }
        }
    }

    #[test]
    fn seminorms_are_monotone_homogeneous_and_subadditive(s1 in any::<u64>(), s2 in any::<u64>(),
                                                         s in -3.0f64..3.0, ds in 0.0f64..2.0,
                                                         re in -5.0f64..5.0, im in -5.0f64..5.0) {
        let psi = central_window(1);
        let (u, v) = (complex_field(s1, 64), complex_field(s2, 64));
        let wu = WindowedSpectrum::new(&u, &psi).unwrap();
        let pos = DirectionSet::positive_ray();
        let full = DirectionSet::full(DirectionGrid::Signs);
        prop_assert!(wu.q(s).unwrap() <= wu.q(s + ds).unwrap());
        prop_assert!(wu.p(&pos, s).unwrap() <= wu.p(&pos, s + ds).unwrap());
        prop_assert!(wu.p(&pos, s).unwrap() <= wu.p(&full, s).unwrap() * (1.0 + 1e-14));
        let k = c(re, im);
        let wk = WindowedSpectrum::new(&u.scaled(k), &psi).unwrap();
        let expected = k.norm() * wu.q(s).unwrap();
        prop_assert!((wk.q(s).unwrap() - expected).abs() <= 1e-12 * expected);
        let sum = SpectralDistribution::linear_combine(c(1.0, 0.0), &u, c(1.0, 0.0), &v).unwrap();
        let ws = WindowedSpectrum::new(&sum, &psi).unwrap();
        let wv = WindowedSpectrum::new(&v, &psi).unwrap();
        prop_assert!(ws.q(s).unwrap() <= (wu.q(s).unwrap() + wv.q(s).unwrap()) * (1.0 + 1e-12));
    }

    #[test]
    fn bracket_weight_and_shell_sum_agree_within_a_shell_factor(member in 0usize..4, r in -2.0f64..2.0) {
        let specs = [
            DistributionSpec::delta(&[0.5]),
            DistributionSpec::heaviside(&[0.5]),
            DistributionSpec::one_sided_power(0.75, 0.5),
            DistributionSpec::gaussian(&[0.5], 0.05),
        ];
        let u = synthesize(&specs[member], &GridSpec::new(1, 512).unwrap()).unwrap();
        let w = WindowedSpectrum::new(&u, &central_window(1)).unwrap();
        let p2 = w.p(&DirectionSet::full(DirectionGrid::Signs), r).unwrap().powi(2);
        let shells = w.annulus_profile(None).dyadic_weighted(r);
        let factor = 2f64.powf(2.0 * r.abs() + 1.0);
        prop_assert!(p2 <= factor * shells && shells <= factor * p2, "p² = {p2}, shells = {shells}");
    }

    #[test]
    fn product_gate_is_the_two_inequalities(rp in -3.0f64..3.0, rpp in -3.0f64..3.0,
                                            r1 in -1.0f64..6.0, r2 in -1.0f64..6.0, m in 1usize..=3) {
        let h = IndexHypotheses::new(rp, rpp, r1, r2, m);
        let r = (r1 + rpp.min(0.0)).min(r2 + rp.min(0.0));
        let admissible = r > m as f64 / 2.0 && rp + rpp >= 0.0;
        prop_assert_eq!(product_indices(&h).is_ok(), admissible);
    }

    #[test]
    fn multiply_is_commutative_and_bilinear(c1 in 0.35f64..0.65, c2 in 0.35f64..0.65, c3 in 0.35f64..0.65,
                                            a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let grid = GridSpec::new(1, 256).unwrap();
        let g = |x: f64| synthesize(&DistributionSpec::gaussian(&[x], 0.05), &grid).unwrap();
        let (u, u2, v) = (g(c1), g(c2), g(c3));
        let empty = ConicRegionSet::empty(DirectionGrid::Signs);
        let h = IndexHypotheses::new(2.0, 1.5, 4.0, 3.0, 1);
        let mul = |x: &SpectralDistribution, y: &SpectralDistribution, h: &IndexHypotheses| {
            multiply(x, y, &empty, &empty, h, ProductMode::General).unwrap()
        };
        let uv = mul(&u, &v, &h);
        let vu = mul(&v, &u, &h.swapped());
        prop_assert!(max_gap(&uv.product, &vu.product) == 0.0);
        prop_assert_eq!(uv.cert.s_star, vu.cert.s_star);
        prop_assert_eq!(uv.cert.r_star, vu.cert.r_star);
        let (a, b) = (c(a, 0.0), c(b, 0.0));
        let mixed = SpectralDistribution::linear_combine(a, &u, b, &u2).unwrap();
        let lhs = mul(&mixed, &v, &h).product;
        let rhs = SpectralDistribution::linear_combine(a, &uv.product, b, &mul(&u2, &v, &h).product).unwrap();
        prop_assert!(max_gap(&lhs, &rhs) <= 1e-12 * max_coeff(&rhs).max(1e-300));
    }
}

fn order_fields() -> &'static Vec<OrderField> {
    use std::sync::OnceLock;
    static FIELDS: OnceLock<Vec<OrderField>> = OnceLock::new();
    FIELDS.get_or_init(|| {
        let grid = GridSpec::new(1, 1024).unwrap();
        let lattice = CellLattice::standard(1);
        [
            DistributionSpec::delta(&[0.5]),
            DistributionSpec::heaviside(&[0.5]),
            DistributionSpec::one_sided_power(0.75, 0.5),
            DistributionSpec::gaussian(&[0.5], 0.05),
        ]
        .iter()
        .map(|s| {
            OrderField::compute(
                &synthesize(s, &grid).unwrap(),
                &lattice,
                &FitConfig::default(),
            )
            .unwrap()
        })
        .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wavefront_grows_with_the_order(member in 0usize..4, r1 in -2.0f64..4.0, dr in 0.0f64..3.0) {
        let field = &order_fields()[member];
        let (small, large) = (field.wavefront(r1), field.wavefront(r1 + dr));
        let lattice = CellLattice::standard(1);
        prop_assert!(small.set.violations_against(&large.set, &lattice).unwrap().is_empty());
    }
}

#[test]
fn shifting_a_jump_by_one_cell_shifts_its_wavefront() {
    let grid = GridSpec::new(1, 2048).unwrap();
    let lattice = CellLattice::standard(1);
    let cfg = FitConfig::default();
    let wf = |x: f64| {
        let u = synthesize(&DistributionSpec::heaviside(&[x]), &grid).unwrap();
        OrderField::compute(&u, &lattice, &cfg)
            .unwrap()
            .wavefront(1.0)
    };
    let shifted: Vec<_> = [0.375, 0.5, 0.625].map(wf).into_iter().collect();
    for (i, wf) in shifted.iter().enumerate() {
        assert_eq!(wf.cells(), vec![3 + i]);
        assert_eq!(wf.cell_masks()[3 + i], shifted[0].cell_masks()[3]);
    }
}

#[test]
fn smooth_multiplier_does_not_enlarge_the_wavefront() {
    let grid = GridSpec::new(1, 2048).unwrap();
    let lattice = CellLattice::standard(1);
    let cfg = FitConfig::default();
    for spec in [
        DistributionSpec::delta(&[0.5]),
        DistributionSpec::heaviside(&[0.5]),
    ] {
        let u = synthesize(&spec, &grid).unwrap();
        let w = WindowFunction::plateau(&[0.3], &[0.7], 0.1);
        let base = OrderField::compute(&u, &lattice, &cfg).unwrap();
        let damped = OrderField::compute(&u.window_multiply(&w).unwrap(), &lattice, &cfg).unwrap();
        let allowed: Vec<(usize, usize)> = base
            .wavefront(1.0)
            .members()
            .into_iter()
            .chain(damped.undecided())
            .collect();
        for m in damped.wavefront(1.0).members() {
            assert!(allowed.contains(&m), "{spec:?}: {m:?}");
        }
    }
}
