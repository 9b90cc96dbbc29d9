mod common;

use common::{random_hermitian, random_unitary, rng, with_spectrum, SmoothB1, SmoothC};
use pairwalk_core::matrix::{block, max_abs, Blocks, CVec2, C64, IDENTITY2};
use pairwalk_core::spacetime::{dirac_matching, schwarzschild};
use pairwalk_core::synthesis::expansion::first_order_check;
use pairwalk_core::synthesis::general::{block_conditions, general_b, general_b2, phase_z, EtaSign};
use pairwalk_core::synthesis::{
    build_b, build_u, derivative_blocks, synthesize_point, ConstantField, DerivativeMethod, HermitianField,
    SynthesisOptions,
};
use proptest::prelude::*;
use rand::Rng;

fn sign(b: bool) -> EtaSign {
    if b {
        EtaSign::Plus
    } else {
        EtaSign::Minus
    }
}

proptest! {
    #[test]
    fn certificates_hold_for_smooth_fields(seed in any::<u64>(), t in 0.0..1.0f64, x in -2.0..2.0f64) {
        let mut rng = rng(seed);
        let b1 = SmoothB1::random(&mut rng, 3.0, 3.0);
        let c = SmoothC::random(&mut rng, 5.0, 3.0, 3.0);
        let ops = synthesize_point(&b1, &c, t, x, &SynthesisOptions::default()).unwrap();
        prop_assert!(ops.certificates.all_within(1e-10), "{:?}", ops.certificates);
    }

    #[test]
    fn u_constraint_on_the_canonical_path(seed in any::<u64>(), d1 in -0.99..0.99f64, d2 in -0.99..0.99f64) {
        let mut rng = rng(seed);
        let b1 = with_spectrum(&random_unitary(&mut rng), d1, d2);
        let inv = build_b(&b1).unwrap();
        let u = build_u(&inv.b).unwrap();
        let residual = max_abs(&(u * (IDENTITY2 + block(&inv.b, 2) * C64::from(2.0)) - IDENTITY2));
        prop_assert!(residual <= 1e-12);
    }

    #[test]
    fn general_family_satisfies_block_conditions(
        seed in any::<u64>(),
        d1 in -1.0..1.0f64,
        d2 in -1.0..1.0f64,
        case in 0usize..3,
        s1 in any::<bool>(),
        s2 in any::<bool>(),
    ) {
        let mut rng = rng(seed);
        let d2 = match case {
            0 => d2,
            1 => d1,
            _ => -d1,
        };
        let b1 = with_spectrum(&random_unitary(&mut rng), d1, d2);
        let b = general_b(&b1, [sign(s1), sign(s2)], &random_unitary(&mut rng)).unwrap();
        let blocks = Blocks::split(&b);
        for r in block_conditions(&blocks.b1, &blocks.b2, &blocks.b4) {
            prop_assert!(r <= 1e-10);
        }
        prop_assert!(max_abs(&(b - b.adjoint())) <= 1e-12);
        prop_assert!(max_abs(&(blocks.b1 - b1)) <= 1e-12);
    }

    #[test]
    fn gauge_invariance(seed in any::<u64>(), d in 0.0..1.0f64, theta in 0.0..6.3f64, opposite in any::<bool>()) {
        let mut rng = rng(seed);
        let b1 = with_spectrum(&random_unitary(&mut rng), d, if opposite { -d } else { d });
        let spec = pairwalk_core::matrix::hermitian_eig2(&b1).unwrap();
        let k = random_unitary(&mut rng);
        let signs = [EtaSign::Plus, EtaSign::Minus];
        let a = general_b2(&spec, signs, &k).unwrap();
        let b = general_b2(&spec, signs, &(k * phase_z(theta))).unwrap();
        prop_assert!(max_abs(&(a - b)) <= 1e-12);
    }

    #[test]
    fn analytic_and_finite_difference_derivatives_agree(seed in any::<u64>(), t in 0.0..1.0f64, x in -2.0..2.0f64) {
        let mut rng = rng(seed);
        let field = SmoothB1::random(&mut rng, 2.0, 2.0);
        let opts = SynthesisOptions::default();
        let analytic = derivative_blocks(&field, t, x, &opts).unwrap();
        let numeric = derivative_blocks(&field.without_derivatives(), t, x, &opts).unwrap();
        prop_assert_eq!(numeric.method, [DerivativeMethod::FiniteDifference; 2]);
        prop_assert!(max_abs(&(analytic.n - numeric.n)) <= 1e-8);
        prop_assert!(max_abs(&(analytic.m - numeric.m)) <= 1e-8);
    }
}

#[test]
fn first_order_residual_is_second_order() {
    let mut rng = rng(11);
    let opts = SynthesisOptions::default();
    for _ in 0..5 {
        let b1 = SmoothB1::random(&mut rng, 2.0, 2.0);
        let c = SmoothC::random(&mut rng, 2.0, 2.0, 2.0);
        let a = random_hermitian(&mut rng, 1.0);
        let psi = move |x: f64| -> CVec2 { (a * C64::from(x.cos()) + IDENTITY2 * C64::from_polar(1.0, 2.0 * x)).column(1).into_owned() };
        let (t, x) = (rng.random_range(0.0..1.0), rng.random_range(-1.0..1.0));
        let scaled: Vec<f64> = (0..5)
            .map(|k| {
                let eps = 1e-2 / 2f64.powi(k);
                first_order_check(&b1, &c, &psi, t, x, eps, &opts).unwrap().residual / (eps * eps)
            })
            .collect();
        let (lo, hi) = scaled.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &v| (l.min(v), h.max(v)));
        assert!(hi / lo < 1.2, "{scaled:?}");
    }
}

#[test]
fn flat_fields_have_no_derivative_blocks() {
    let (b1, c) = dirac_matching(&pairwalk_core::spacetime::MetricSpec::flat(2.0)).unwrap();
    let ops = synthesize_point(&b1, &c, 0.3, -1.7, &SynthesisOptions::default()).unwrap();
    assert_eq!(max_abs(&ops.n), 0.0);
    assert_eq!(max_abs(&ops.m), 0.0);
}

#[test]
fn schwarzschild_m_block_matches_the_metric_derivative() {
    let metric = schwarzschild(0.5, 1.0, 1.1, 10.0).unwrap();
    let (b1, c) = dirac_matching(&metric).unwrap();
    let ops = synthesize_point(&b1, &c, 0.0, 3.0, &SynthesisOptions::default()).unwrap();
    let re_m = (ops.m + ops.m.adjoint()) * C64::from(0.5);
    // B1 = -(1 - 2M/x) σz, so ∂x B1 = -(2M/x²) σz.
    let h = 1e-5;
    let bp = build_b(&b1.value(0.0, 3.0 + h)).unwrap().b;
    let bm = build_b(&b1.value(0.0, 3.0 - h)).unwrap().b;
    let dx_b = (bp - bm) / C64::from(2.0 * h);
    assert!(max_abs(&(re_m * C64::from(2.0) - dx_b)) <= 1e-6);
    let dx_b1 = block(&dx_b, 1);
    let expected = pairwalk_core::matrix::SIGMA_Z * C64::from(-2.0 * 0.5 / 9.0);
    assert!(max_abs(&(dx_b1 - expected)) <= 1e-6);
}

#[test]
fn schwarzschild_sweep_certificates() {
    let metric = schwarzschild(0.5, 50.0, 1.1, 10.0).unwrap();
    let (b1, c) = dirac_matching(&metric).unwrap();
    for k in 0..100 {
        let x = 1.2 + 4.8 * k as f64 / 99.0;
        let ops = synthesize_point(&b1, &c, 0.0, x, &SynthesisOptions::default()).unwrap();
        assert!(ops.certificates.all_within(1e-10), "x={x}: {:?}", ops.certificates);
    }
}

#[test]
fn constant_fields_have_trivial_drift() {
    let mut rng = rng(5);
    let b1 = with_spectrum(&random_unitary(&mut rng), 0.4, -0.7);
    let c = random_hermitian(&mut rng, 3.0);
    let ops = synthesize_point(&ConstantField(b1), &ConstantField(c), 0.0, 0.0, &SynthesisOptions::default()).unwrap();
    assert_eq!(max_abs(&ops.n), 0.0);
    assert_eq!(max_abs(&ops.m), 0.0);
}
