//! End-to-end acceptance checks, one PASS/FAIL line per criterion.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use boussfrac::dynamics::{
    evolve, kernel_properties, linear_frequency, measured_frequency, EvolveOptions, KernelSpec, Model,
    Scheme, Trajectory,
};
use boussfrac::entropy::{build_monitors, MonitorContext, MonitorSpec, ENTROPY_RATE_TOL, FLUX_BALANCE_TOL, MASS_TOL};
use boussfrac::experiments::{data_of, run_study, DataKind, StudyKind, StudyReport, StudySpec};
use boussfrac::io::{RunReport, SolverConfig};
use boussfrac::lp::cutoff::phi_n;
use boussfrac::lp::{decompose, scales};
use boussfrac::rng::SeedStream;
use boussfrac::spectral::{random_field, Grid, MultiplierSpec, RandomFieldSpec, SpectralField};

struct Outcome {
    pass: bool,
    summary: String,
}

fn outcome(pass: bool, summary: String) -> Outcome {
    Outcome { pass, summary }
}

fn kernel_identities() -> Outcome {
    let mut worst_l1: f64 = 0.0;
    let mut worst_closed: f64 = 0.0;
    let mut worst_self: f64 = 0.0;
    let mut worst_scale: f64 = 0.0;
    let mut ok = true;
    for lambda in [0.5, 1.0, 1.5, 2.0] {
        // eps = 0.1 at t = 1 and t = 10 gives eps t in {0.1, 1}
        let mut scaled = Vec::new();
        for t in [1.0, 10.0] {
            let r = match KernelSpec::new(lambda, 0.1, t).and_then(|s| kernel_properties(&s)) {
                Ok(r) => r,
                Err(e) => return outcome(false, format!("lambda {lambda}, t {t}: {e}")),
            };
            worst_l1 = worst_l1.max((r.l1_norm - 1.0).abs());
            worst_self = worst_self.max(r.self_similarity_residual);
            if let Some(e) = r.closed_form_error {
                worst_closed = worst_closed.max(e);
            }
            scaled.push(r.dx_l1_scaled);
        }
        worst_scale = worst_scale.max((scaled[1] / scaled[0] - 1.0).abs());
    }
    ok &= worst_l1 <= 1e-6 && worst_closed <= 1e-8 && worst_self < 1e-8 && worst_scale <= 0.01;
    outcome(
        ok,
        format!(
            "| |K|_1 - 1 | <= {worst_l1:.2e}, closed form {worst_closed:.2e}, self-similarity {worst_self:.2e}, |K_x|_1 (eps t)^(1/lambda) spread {worst_scale:.2e}"
        ),
    )
}

fn operator_identities() -> Outcome {
    let g = Grid::new(16.0 * PI, 512).unwrap();
    let seeds = SeedStream::new(7);
    let (mut lap, mut helm, mut pars, mut round): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..100 {
        let f = random_field(&g, &RandomFieldSpec::new(1.0), &mut seeds.rng("operators", i));
        let d2 = f.dx().dx().scale(-1.0);
        lap = lap.max(f.g_lambda(2.0).unwrap().sub(&d2).linf_norm() / d2.linf_norm());
        let mu = 0.5 + i as f64 / 20.0;
        let back = f
            .apply_multiplier(&MultiplierSpec::Helmholtz { mu })
            .unwrap()
            .helmholtz_inverse(mu)
            .unwrap();
        helm = helm.max(back.sub(&f).linf_norm() / f.linf_norm());
        pars = pars.max((f.lp_norm(2.0).unwrap() / f.l2_norm() - 1.0).abs());
        let rt = SpectralField::from_samples(&g, f.samples().to_vec()).unwrap();
        round = round.max(rt.sub(&f).linf_norm() / f.linf_norm());
    }
    let mut pou: f64 = 0.0;
    let ns = scales(&SpectralField::zeros(&g));
    for &xi in g.xi() {
        if xi.abs() >= 2.0 * g.dxi() && xi.abs() <= 0.5 * g.xi_max() {
            pou = pou.max((ns.iter().map(|&n| phi_n(xi, n)).sum::<f64>() - 1.0).abs());
        }
    }
    let f = random_field(&g, &RandomFieldSpec::new(0.0).zero_mean(), &mut seeds.rng("blocks", 0));
    let sum = decompose(&f).iter().fold(SpectralField::zeros(&g), |a, b| a.add(&b.block));
    pou = pou.max(sum.sub(&f).linf_norm() / f.linf_norm());
    let ok = lap <= 1e-10 && helm <= 1e-12 && pou <= 1e-10 && pars <= 1e-12 && round <= 1e-12;
    outcome(
        ok,
        format!("g_2 vs -d_xx {lap:.2e}, Helmholtz {helm:.2e}, partition {pou:.2e}, Parseval {pars:.2e}, FFT round trip {round:.2e}"),
    )
}

fn study(kind: StudyKind, overrides: &[&str]) -> Result<StudyReport, String> {
    let mut c = SolverConfig::default();
    c.apply(overrides).map_err(|e| e.to_string())?;
    run_study(&StudySpec { kind, config: c }).map_err(|e| e.to_string())
}

fn failing(r: &StudyReport) -> String {
    let bad: Vec<&str> = r.verdicts.iter().filter(|v| !v.pass).map(|v| v.monitor.as_str()).collect();
    if bad.is_empty() {
        String::new()
    } else {
        format!("; failing: {}", bad.join(", "))
    }
}

fn estimate_suite() -> Outcome {
    match study(StudyKind::EstimateFuzz, &["trials=100", "seed=7"]) {
        Ok(r) => {
            let drift = r
                .verdicts
                .iter()
                .filter(|v| v.monitor.starts_with("drift:"))
                .map(|v| v.value)
                .fold(0.0, f64::max);
            outcome(
                r.pass(),
                format!("{} checks at n = 512, 1024; worst drift {drift:.2e}{}", r.verdicts.len(), failing(&r)),
            )
        }
        Err(e) => outcome(false, e),
    }
}

fn benchmark(eps: f64, data: DataKind, n: usize) -> Result<(Trajectory, f64), String> {
    let mut c = SolverConfig::default();
    c.n_modes = n;
    c.eps = eps;
    c.lambda = 1.0;
    c.amplitude = 0.3;
    c.t_final = 2.0;
    let s0 = data_of(&c, data).build(&Grid::new(c.half_length, n).map_err(|e| e.to_string())?);
    let s0 = s0.map_err(|e| e.to_string())?;
    let specs: Vec<MonitorSpec> = ["entropy", "min-principle", "mass", "flux-balance"]
        .iter()
        .map(|t| MonitorSpec::parse(t).unwrap())
        .collect();
    let mut mons = build_monitors(&specs, &MonitorContext { params: c.params(), s: c.s });
    let opts = EvolveOptions::new(c.t_final).sample_interval(c.sample_interval).sobolev_index(c.s);
    let tr = evolve(&s0, &Model::new(c.params()), &opts, &mut mons).map_err(|e| e.to_string())?;
    let dt = tr.dt;
    Ok((tr, dt))
}

fn conservation() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for eps in [0.0, 0.1] {
        let (tr, dt) = match benchmark(eps, DataKind::SmoothBump, 512) {
            Ok(x) => x,
            Err(e) => return outcome(false, e),
        };
        let v = |m: &str| tr.verdict(m).map(|v| (v.pass, v.value)).unwrap_or((false, f64::NAN));
        let (mp, mass) = v("mass");
        let (ep, ent) = v("entropy");
        let (fp, flux) = v("flux-balance");
        ok &= tr.completed() && mp && ep && fp && mass <= MASS_TOL && flux < FLUX_BALANCE_TOL;
        if eps == 0.0 {
            let e = tr.column("entropy").unwrap();
            let drift = e.iter().map(|x| (x - e[0]).abs()).fold(0.0, f64::max);
            ok &= drift <= dt.powi(4);
            lines.push(format!("eps=0: mass {mass:.1e}, |E-E0| {drift:.1e} (dt^4 = {:.1e}), flux {flux:.1e}", dt.powi(4)));
        } else {
            ok &= ent <= ENTROPY_RATE_TOL;
            lines.push(format!("eps=0.1: mass {mass:.1e}, entropy growth rate {ent:.1e}, flux {flux:.1e}"));
        }
    }
    outcome(ok, lines.join("; "))
}

fn min_principle() -> Outcome {
    let mut ok = true;
    let mut lines = Vec::new();
    for data in [DataKind::SmoothBump, DataKind::NearCavitation] {
        for eps in [0.0, 0.1] {
            match benchmark(eps, data, 512) {
                Ok((tr, _)) => {
                    let v = tr.verdict("min-principle").unwrap();
                    ok &= tr.completed() && v.pass;
                    lines.push(format!("{} eps={eps}: undershoot {:.1e} (tol {:.1e})", data.as_str(), v.value, v.tolerance));
                }
                Err(e) => return outcome(false, e),
            }
        }
    }
    outcome(ok, lines.join("; "))
}

fn eps_convergence() -> Outcome {
    match study(StudyKind::EpsConvergence, &[]) {
        Ok(r) => {
            let order = r.info.get("min_order@n=512").copied().unwrap_or(f64::NAN);
            outcome(r.pass(), format!("strictly decreasing at n = 512, 1024; min observed order {order:.3}{}", failing(&r)))
        }
        Err(e) => outcome(false, e),
    }
}

fn bona_smith() -> Outcome {
    match study(StudyKind::BonaSmith, &["L=8pi", "n=1024"]) {
        Ok(r) => {
            let ratios: Vec<String> = r
                .column("ratio")
                .unwrap_or_default()
                .iter()
                .filter(|x| x.is_finite())
                .map(|x| format!("{x:.3}"))
                .collect();
            outcome(r.pass(), format!("successive ratios [{}]{}", ratios.join(", "), failing(&r)))
        }
        Err(e) => outcome(false, e),
    }
}

fn entropy_construction() -> Outcome {
    match study(StudyKind::EntropyConstruction, &[]) {
        Ok(r) => {
            let b = r.verdict("entropy-bound@n=512").map(|v| v.value).unwrap_or(f64::NAN);
            let j = r.verdict("jensen@n=512").map(|v| v.value).unwrap_or(f64::NAN);
            outcome(r.pass(), format!("bound slack {b:.2e}, Jensen slack {j:.2e}{}", failing(&r)))
        }
        Err(e) => outcome(false, e),
    }
}

fn weak_form() -> Outcome {
    match study(StudyKind::WeakResidual, &[]) {
        Ok(r) => {
            let mms = r.verdict("mms@n=512").map(|v| v.value).unwrap_or(f64::NAN);
            let ord = r.verdict("refinement-order").map(|v| v.value).unwrap_or(f64::NAN);
            outcome(r.pass(), format!("manufactured residual {mms:.2e}, refinement order {ord:.2}{}", failing(&r)))
        }
        Err(e) => outcome(false, e),
    }
}

fn dispersion() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in [1u32, 2, 4] {
        match measured_frequency(k, 1e-3, 1.0, Scheme::Ifrk4) {
            Ok(w) => worst = worst.max((w / linear_frequency(k as f64) - 1.0).abs()),
            Err(e) => return outcome(false, e.to_string()),
        }
    }
    outcome(worst < 1e-6, format!("max relative frequency error {worst:.2e} over k = 1, 2, 4"))
}

fn determinism() -> Outcome {
    let runs: [(StudyKind, &[&str]); 6] = [
        (StudyKind::EpsConvergence, &[]),
        (StudyKind::BonaSmith, &["L=8pi", "n=1024"]),
        (StudyKind::EntropyConstruction, &[]),
        (StudyKind::WeakResidual, &[]),
        (StudyKind::FlowContinuity, &[]),
        (StudyKind::EstimateFuzz, &["trials=100"]),
    ];
    let mut mismatched = Vec::new();
    for (kind, over) in runs {
        let csv = || -> Result<String, String> {
            let mut c = SolverConfig::default();
            c.apply(over).map_err(|e| e.to_string())?;
            let r = run_study(&StudySpec { kind, config: c.clone() }).map_err(|e| e.to_string())?;
            RunReport::from_study(&c, r).to_csv().map_err(|e| e.to_string())
        };
        match (csv(), csv()) {
            (Ok(a), Ok(b)) if a == b => {}
            (Ok(_), Ok(_)) => mismatched.push(kind.as_str()),
            (Err(e), _) | (_, Err(e)) => return outcome(false, format!("{}: {e}", kind.as_str())),
        }
    }
    outcome(
        mismatched.is_empty(),
        if mismatched.is_empty() {
            "all six studies reproduce byte-identical CSV".into()
        } else {
            format!("differing CSV: {}", mismatched.join(", "))
        },
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("kernel identities", kernel_identities),
        ("operator identities", operator_identities),
        ("estimate suite", estimate_suite),
        ("conservation and entropy", conservation),
        ("minimum principle", min_principle),
        ("eps convergence", eps_convergence),
        ("Bona-Smith", bona_smith),
        ("entropy construction", entropy_construction),
        ("weak-form residual", weak_form),
        ("dispersion", dispersion),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("{tag} [{:>2}] {name}: {} ({:.1}s)", i + 1, o.summary, start.elapsed().as_secs_f64());
        if !o.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
