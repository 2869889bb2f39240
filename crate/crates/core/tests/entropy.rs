use std::f64::consts::PI;

use boussfrac::dynamics::{evolve, EvolveOptions, Model, ModelParams, State};
use boussfrac::entropy::{
    build_monitors, entropy_density, entropy_flux, entropy_total, flux, orlicz_functional, sigma0, MonitorContext,
    MonitorSpec, OrliczCalibration,
};
use boussfrac::experiments::{mollify, DataKind, InitialData};
use boussfrac::rng::SeedStream;
use boussfrac::spectral::{random_field, Grid, RandomFieldSpec, SpectralField};
use proptest::prelude::*;

const H: f64 = 1e-5;

fn grad(f: impl Fn(f64, f64) -> f64, w: f64, u: f64) -> (f64, f64) {
    ((f(w + H, u) - f(w - H, u)) / (2.0 * H), (f(w, u + H) - f(w, u - H)) / (2.0 * H))
}

#[test]
fn sigma0_oracles() {
    assert_eq!(sigma0(1.0).unwrap(), 0.0);
    assert_eq!(sigma0(0.0).unwrap(), 1.0);
    assert!((sigma0(std::f64::consts::E).unwrap() - 1.0).abs() < 1e-15);
    assert!(sigma0(-0.1).is_err());
}

#[test]
fn sandwich_with_one_constant() {
    let cal = OrliczCalibration::calibrate(10.0).unwrap();
    let g = Grid::new(10.0, 256).unwrap();
    let seeds = SeedStream::new(5);
    for i in 0..200 {
        let raw = random_field(&g, &RandomFieldSpec::new(1.0).zero_mean(), &mut seeds.rng("sandwich", i));
        let amp = 0.05 + 3.0 * (i as f64 / 199.0);
        let mut z = raw.scale(amp / raw.linf_norm());
        if z.min() <= -0.95 {
            z = z.scale(0.95 / -z.min());
        }
        let o = orlicz_functional(&z);
        assert!(o >= 0.0);
        assert!(o <= cal.upper * z.lp_norm(2.0).unwrap().powi(2) * (1.0 + 1e-12), "i = {i}");
    }
}

#[test]
fn jensen_for_every_width() {
    let g = Grid::new(16.0 * PI, 512).unwrap();
    let d = InitialData {
        kind: DataKind::RoughOrlicz,
        amplitude: 0.6,
        floor: 0.1,
        cutoff: 6.0,
        s: 0.75,
        seed: 7,
    };
    let z0 = d.build(&g).unwrap().zeta;
    let o0 = orlicz_functional(&z0);
    for n in [1, 2, 4, 8, 16, 32] {
        let zn = mollify(&z0, n);
        assert!(zn.min() > -1.0);
        assert!(orlicz_functional(&zn) <= o0 + 1e-8, "n = {n}");
    }
}

fn benchmark(eps: f64, data: DataKind, n: usize) -> boussfrac::dynamics::Trajectory {
    let g = Grid::new(16.0 * PI, n).unwrap();
    let d = InitialData {
        kind: data,
        amplitude: 0.3,
        floor: 0.1,
        cutoff: 6.0,
        s: 0.75,
        seed: 7,
    };
    let s0: State = d.build(&g).unwrap();
    let p = ModelParams::new(eps, 1.0, 0.0).unwrap();
    let specs: Vec<MonitorSpec> = ["entropy", "min-principle", "mass", "flux-balance"]
        .iter()
        .map(|t| MonitorSpec::parse(t).unwrap())
        .collect();
    let mut mons = build_monitors(&specs, &MonitorContext { params: p, s: 0.75 });
    evolve(&s0, &Model::new(p), &EvolveOptions::new(2.0).sample_interval(0.02), &mut mons).unwrap()
}

#[test]
fn bump_monitors_pass() {
    for eps in [0.0, 0.1] {
        let tr = benchmark(eps, DataKind::SmoothBump, 512);
        for v in &tr.verdicts {
            assert!(v.pass, "eps {eps}: {} = {:e}", v.monitor, v.value);
        }
    }
}

#[test]
fn dissipative_entropy_decreases() {
    let tr = benchmark(0.1, DataKind::SmoothBump, 256);
    let e = tr.column("entropy").unwrap();
    let t = tr.column("t").unwrap();
    for i in 1..e.len() {
        assert!(e[i] - e[i - 1] <= 1e-6 * (t[i] - t[i - 1]));
    }
    assert!(entropy_total(&tr.final_state) < e[0]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn entropy_pair_compatible(w in 0.05..10.0f64, u in -3.0..3.0f64) {
        let (ew, eu) = grad(entropy_density, w, u);
        let (qw, qu) = grad(entropy_flux, w, u);
        let (f1w, f1u) = grad(|w, u| flux(w, u).0, w, u);
        let (f2w, f2u) = grad(|w, u| flux(w, u).1, w, u);
        prop_assert!((ew * f1w + eu * f2w - qw).abs() < 1e-6);
        prop_assert!((ew * f1u + eu * f2u - qu).abs() < 1e-6);
    }

    #[test]
    fn entropy_convex(w in 0.01..10.0f64, u in -3.0..3.0f64) {
        let h = 1e-4f64.min(0.5 * w);
        let e = entropy_density;
        let ww = (e(w + h, u) - 2.0 * e(w, u) + e(w - h, u)) / (h * h);
        let uu = (e(w, u + h) - 2.0 * e(w, u) + e(w, u - h)) / (h * h);
        let wu = (e(w + h, u + h) - e(w + h, u - h) - e(w - h, u + h) + e(w - h, u - h)) / (4.0 * h * h);
        let tol = 1e-5 * (1.0 + ww.abs());
        prop_assert!(ww >= -tol && uu >= -tol);
        prop_assert!(ww * uu - wu * wu >= -tol * (ww + uu));
    }
}

#[test]
fn zero_state_entropy_is_zero() {
    let g = Grid::new(10.0, 64).unwrap();
    let s = State::new(SpectralField::zeros(&g), SpectralField::zeros(&g), 0.0).unwrap();
    assert_eq!(entropy_total(&s), 0.0);
}
