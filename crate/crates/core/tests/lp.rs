use std::f64::consts::PI;

use boussfrac::lp::cutoff::{eta, phi, phi_n};
use boussfrac::lp::{
    decompose, dyadic_sobolev_sq, project, refinement_drift, scales, verify_coercivity, verify_cordoba, Convex,
    Projection, Verifier, DEFAULT_MODES, EXACT_TOL,
};
use boussfrac::rng::SeedStream;
use boussfrac::spectral::{random_field, Grid, RandomFieldSpec, SpectralField};
use boussfrac::Error;
use proptest::prelude::*;

#[test]
fn partition_of_unity_on_the_band() {
    let g = Grid::new(16.0 * PI, 1024).unwrap();
    let f = SpectralField::zeros(&g);
    let ns = scales(&f);
    for &xi in g.xi() {
        let a = xi.abs();
        if a < 2.0 * g.dxi() || a > 0.5 * g.xi_max() {
            continue;
        }
        let sum: f64 = ns.iter().map(|&n| phi_n(xi, n)).sum();
        assert!((sum - 1.0).abs() <= 1e-10, "xi = {xi}");
    }
}

#[test]
fn cutoff_shape() {
    for i in 0..=400 {
        let x = -3.0 + 6.0 * i as f64 / 400.0;
        assert!((0.0..=1.0).contains(&eta(x)));
        assert!(phi(x) >= 0.0);
        if x.abs() <= 1.0 {
            assert_eq!(eta(x), 1.0);
        }
        if x.abs() >= 2.0 {
            assert_eq!(eta(x), 0.0);
        }
    }
}

#[test]
fn single_mode_blocks() {
    let g = Grid::new(PI, 256).unwrap();
    let n = 8.0;
    let inside = SpectralField::from_fn(&g, |x| (n * x).cos());
    let p = project(&inside, n, Projection::Block).unwrap();
    assert!(p.block.sub(&inside).linf_norm() < 1e-14);
    let outside = SpectralField::from_fn(&g, |x| (8.0 * n * x).cos());
    assert!(project(&outside, n, Projection::Block).unwrap().linf_norm < 1e-14);
    assert!(matches!(
        project(&inside, 4096.0, Projection::Block),
        Err(Error::ScaleOutOfRange { .. })
    ));
}

#[test]
fn almost_orthogonal() {
    let g = Grid::new(20.0, 512).unwrap();
    let f = random_field(&g, &RandomFieldSpec::new(0.0), &mut SeedStream::new(1).rng("ao", 0));
    let ns = scales(&f);
    for &n in &ns {
        let pn = project(&f, n, Projection::Block).unwrap().block;
        for &k in &ns {
            if (n / k).log2().abs() >= 2.0 {
                let pkn = project(&pn, k, Projection::Block).unwrap();
                assert_eq!(pkn.linf_norm, 0.0, "N = {n}, K = {k}");
            }
        }
    }
}

#[test]
fn block_support() {
    let g = Grid::new(20.0, 512).unwrap();
    let f = random_field(&g, &RandomFieldSpec::new(0.0), &mut SeedStream::new(2).rng("support", 0));
    for b in decompose(&f) {
        for (c, &xi) in b.block.coeffs().iter().zip(g.xi()) {
            if xi.abs() < 0.5 * b.scale || xi.abs() > 2.0 * b.scale {
                assert_eq!(c.norm(), 0.0);
            }
        }
    }
}

#[test]
fn sobolev_equivalence_hundred_fields() {
    let g = Grid::new(20.0, 512).unwrap();
    let seeds = SeedStream::new(11);
    for i in 0..100 {
        let s = -1.0 + 3.0 * (i as f64) / 99.0;
        let f = random_field(&g, &RandomFieldSpec::new(0.5), &mut seeds.rng("equiv", i));
        let r = dyadic_sobolev_sq(&f, s) / f.sobolev_norm(s).powi(2);
        assert!((0.125..=8.0).contains(&r), "i = {i}, ratio {r}");
    }
}

#[test]
fn coercivity_single_mode() {
    // sin x, s = 0, lambda = 2: both sides are pi exactly
    let g = Grid::new(PI, 64).unwrap();
    let f = SpectralField::from_fn(&g, f64::sin);
    let lhs = f.g_lambda(2.0).unwrap().inner(&f);
    let fx = f.dx();
    assert!((lhs - PI).abs() < 1e-13);
    assert!((fx.sobolev_norm(0.0).powi(2) - PI).abs() < 1e-13);
}

#[test]
fn coercivity_and_cordoba_hold() {
    for lambda in [0.5, 1.0, 1.5, 2.0] {
        let r = verify_coercivity(100, 0.75, lambda, 7).unwrap();
        assert!(r.pass && r.min_slack.unwrap() >= -EXACT_TOL);
    }
    for lambda in [0.5, 1.0, 1.5] {
        for alpha in Convex::CATALOG {
            let r = verify_cordoba(20, lambda, alpha, 7).unwrap();
            assert!(r.pass, "{} at {lambda}", alpha.name());
        }
    }
}

#[test]
fn cordoba_linear_is_equality() {
    let r = verify_cordoba(20, 1.0, Convex::Linear, 3).unwrap();
    assert!(r.max_ratio.abs() <= EXACT_TOL);
}

#[test]
fn cordoba_square_margin_near_two() {
    // -d_xx(phi^2) + 2 phi phi_xx = -2 phi_x^2
    let g = Grid::new(10.0, 256).unwrap();
    let phi = SpectralField::from_fn(&g, |x| 0.5 * (-(x * x)).exp());
    let lhs = phi.mul(&phi).g_lambda(2.0).unwrap();
    let rhs = phi.mul(&phi.g_lambda(2.0).unwrap()).scale(2.0);
    let px = phi.dx();
    let want = px.mul(&px).scale(-2.0);
    assert!(lhs.sub(&rhs).sub(&want).linf_norm() < 1e-12);
}

#[test]
fn commutator_trivial() {
    let g = Grid::new(10.0, 256).unwrap();
    let f = random_field(&g, &RandomFieldSpec::new(1.0), &mut SeedStream::new(4).rng("c", 0));
    let one = SpectralField::constant(&g, 1.0);
    let zero = SpectralField::zeros(&g);
    assert!(boussfrac::lp::commutator(&one, &f, 4.0).unwrap().linf_norm() < 1e-13);
    assert_eq!(boussfrac::lp::commutator(&f, &zero, 4.0).unwrap().linf_norm(), 0.0);
}

#[test]
fn cm1_stable_across_resolutions() {
    let a = Verifier::new(DEFAULT_MODES, 7).unwrap().cm1(30).unwrap();
    let b = Verifier::new(2 * DEFAULT_MODES, 7).unwrap().cm1(30).unwrap();
    assert!(a.pass && b.pass);
    assert!(refinement_drift(&a, &b) < 0.2);
    let c = Verifier::new(DEFAULT_MODES, 7).unwrap().cm1_constant_f(10).unwrap();
    assert_eq!(c.skipped, c.trials);
    assert!(Verifier::new(DEFAULT_MODES, 7).unwrap().cm1_adversarial().unwrap().pass);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn blocks_reassemble(seed in any::<u64>()) {
        let g = Grid::new(12.0, 256).unwrap();
        let f = random_field(&g, &RandomFieldSpec::new(0.0).zero_mean(), &mut SeedStream::new(seed).rng("sum", 0));
        let mut acc = SpectralField::zeros(&g);
        for b in decompose(&f) {
            acc = acc.add(&b.block);
        }
        prop_assert!(acc.sub(&f).linf_norm() <= 1e-10 * f.linf_norm().max(1.0));
    }

    #[test]
    fn partition_pointwise(xi in 0.01..1.0e4f64) {
        let sum: f64 = (-12..=20).map(|j| phi_n(xi, 2f64.powi(j))).sum();
        prop_assert!((sum - 1.0).abs() <= 1e-10);
    }
}
