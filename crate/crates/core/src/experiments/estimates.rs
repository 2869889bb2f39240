use serde::{Deserialize, Serialize};

use super::{StudyKind, StudyReport};
use crate::entropy::Verdict;
use crate::error::{Error, Result};
use crate::io::SolverConfig;
use crate::lp::{refinement_drift, Convex, EstimateReport, Verifier, EXACT_TOL};

/// Largest admissible relative change of a max ratio between resolutions.
pub const DRIFT_TOL: f64 = 0.2;
pub const COERCIVITY_LAMBDAS: [f64; 4] = [0.5, 1.0, 1.5, 2.0];
pub const CORDOBA_LAMBDAS: [f64; 3] = [0.5, 1.0, 1.5];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatePair {
    pub coarse: EstimateReport,
    pub fine: EstimateReport,
    pub drift: f64,
}

fn all_reports(v: &Verifier, trials: usize, s: f64, notes: &mut Vec<String>) -> Result<Vec<EstimateReport>> {
    let n = v.grid().len();
    let mut out = Vec::new();
    let mut keep = |r: Result<Vec<EstimateReport>>, label: &str, params: &[(&str, f64)]| -> Result<()> {
        match r {
            Ok(rs) => out.extend(rs),
            Err(Error::Counterexample { estimate, detail }) => {
                let mut f = EstimateReport::failed(label, n, EXACT_TOL);
                f.params = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
                notes.push(format!("{estimate} (n = {n}): {detail}"));
                out.push(f);
            }
            Err(e) => return Err(e),
        }
        Ok(())
    };
    keep(v.cm1(trials).map(|r| vec![r]), "cm1", &[])?;
    keep(v.products(trials, s), "products", &[("s", s)])?;
    for lambda in COERCIVITY_LAMBDAS {
        keep(v.coercivity(trials, s, lambda).map(|r| vec![r]), "gl1", &[("s", s), ("lambda", lambda)])?;
    }
    for lambda in CORDOBA_LAMBDAS {
        for alpha in Convex::CATALOG {
            let label = format!("lem1[{}]", alpha.name());
            keep(v.cordoba(trials, lambda, alpha).map(|r| vec![r]), &label, &[("lambda", lambda)])?;
        }
    }
    Ok(out)
}

/// Every estimate at `n` and `2n` with seeded trials; each must pass its
/// cap at both and move by less than `DRIFT_TOL` between them.
pub fn estimate_suite(c: &SolverConfig) -> Result<StudyReport> {
    let mut rep = StudyReport::new(StudyKind::EstimateFuzz, &["index", "n", "max_ratio", "cap", "drift"]);
    let n = c.n_modes;
    let mut notes = Vec::new();
    let coarse = all_reports(&Verifier::new(n, c.seed)?, c.trials, c.s, &mut notes)?;
    let fine = all_reports(&Verifier::new(2 * n, c.seed)?, c.trials, c.s, &mut notes)?;
    rep.warnings = notes;
    let mut pairs = Vec::new();
    for (i, (a, b)) in coarse.into_iter().zip(fine).enumerate() {
        let drift = refinement_drift(&a, &b);
        let tag = tag(&a);
        for r in [&a, &b] {
            rep.rows.push(vec![i as f64, r.n_modes as f64, r.max_ratio, r.cap, drift]);
            rep.verdicts.push(Verdict {
                monitor: format!("{tag}@n={}", r.n_modes),
                pass: r.pass,
                value: r.max_ratio,
                tolerance: r.cap,
                detail: format!("max ratio over {} trials ({} skipped)", r.trials, r.skipped),
                warning: None,
            });
        }
        rep.verdicts.push(Verdict::check(
            &format!("drift:{tag}"),
            drift,
            DRIFT_TOL,
            "relative change of the max ratio between resolutions".into(),
        ));
        pairs.push(EstimatePair { coarse: a, fine: b, drift });
    }
    rep.details = serde_json::to_value(&pairs)?;
    rep.firewall();
    Ok(rep)
}

/// `name[k=v,...]` for verdict labels.
fn tag(r: &EstimateReport) -> String {
    let p: Vec<String> = r
        .params
        .iter()
        .filter(|(_, v)| v.is_finite())
        .map(|(k, v)| format!("{k}={v}"))
        .collect();
    if p.is_empty() {
        r.name.clone()
    } else {
        format!("{}[{}]", r.name, p.join(","))
    }
}
