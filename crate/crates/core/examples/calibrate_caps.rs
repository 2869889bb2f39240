//! Prints observed estimate ratios at two resolutions for cap calibration.

use boussfrac::lp::{refinement_drift, Convex, Verifier};

fn main() -> boussfrac::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let trials = 100;
    let coarse = Verifier::new(512, seed)?;
    let fine = Verifier::new(1024, seed)?;
    let show = |a: &boussfrac::lp::EstimateReport, b: &boussfrac::lp::EstimateReport| {
        println!(
            "{:<40} {:?} coarse {:.6e} fine {:.6e} drift {:.3} skipped {}",
            a.name,
            a.params,
            a.max_ratio,
            b.max_ratio,
            refinement_drift(a, b),
            a.skipped
        );
    };
    show(&coarse.cm1(trials)?, &fine.cm1(trials)?);
    show(&coarse.cm1_adversarial()?, &fine.cm1_adversarial()?);
    for (a, b) in coarse.products(trials, 0.75)?.iter().zip(fine.products(trials, 0.75)?.iter()) {
        show(a, b);
    }
    for lambda in [0.5, 1.0, 1.5, 2.0] {
        show(&coarse.coercivity(trials, 0.75, lambda)?, &fine.coercivity(trials, 0.75, lambda)?);
    }
    for lambda in [0.5, 1.0, 1.5] {
        for alpha in Convex::CATALOG {
            show(&coarse.cordoba(trials, lambda, alpha)?, &fine.cordoba(trials, lambda, alpha)?);
        }
    }
    Ok(())
}
