//! Rational singularities of zero sets of fundamental semi-invariants.

use serde::{Deserialize, Serialize};

use super::certify::{certify_all_good, Certificate, CertifyOptions, CertifyOutcome, Refutation};
use super::check_form_assumption;
use crate::bfunction::{compute_bfunction, BFunctionFamily};
use crate::linalg::{rat, Rat};
use crate::orbit::{reducedness_report, Reducedness, ZeroSetSpec};
use crate::{Quiver, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootMult {
    #[serde(with = "crate::linalg::serde_rat")]
    pub root: Rat,
    pub mult: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Evidence {
    Certificate(Certificate),
    /// One simple: the roots of the b-function, largest first.
    Hypersurface { roots: Vec<RootMult> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    RationalSingularities(Evidence),
    NotCertified { reason: String, witness: Option<Refutation> },
    NotApplicable { reason: String },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct VerdictOptions {
    pub certify: CertifyOptions,
}

/// The verdict together with the family it was read from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub family: BFunctionFamily,
    pub verdict: Verdict,
}

/// Decides rational singularities of the zero set of the selected semi-invariants
/// (0-based indices into the perpendicular simples, all of them by default).
pub fn rational_singularities_verdict(
    q: &Quiver,
    alpha: &[i64],
    selected: Option<Vec<usize>>,
    opts: VerdictOptions,
) -> Result<VerdictReport> {
    let spec = ZeroSetSpec::new(q, alpha, selected)?;
    let simples: Vec<_> = spec.selected.iter().map(|&j| spec.perp.simples[j].clone()).collect();
    let family = compute_bfunction(q, alpha, &simples)?;
    let verdict = verdict_for(&spec, &family, opts);
    Ok(VerdictReport { family, verdict })
}

fn verdict_for(spec: &ZeroSetSpec, family: &BFunctionFamily, opts: VerdictOptions) -> Verdict {
    if family.r == 1 {
        let roots: Vec<RootMult> = family
            .univariate_roots()
            .expect("one variable")
            .into_iter()
            .map(|(root, mult)| RootMult { root, mult })
            .collect();
        return match roots.first() {
            Some(top) if top.root == rat(-1) && top.mult == 1 => {
                Verdict::RationalSingularities(Evidence::Hypersurface { roots })
            }
            Some(top) => Verdict::NotCertified {
                reason: format!("largest root is {} with multiplicity {}", top.root, top.mult),
                witness: None,
            },
            None => Verdict::NotApplicable { reason: "constant b-function".into() },
        };
    }
    match reducedness_report(spec) {
        Reducedness::Reduced => {}
        Reducedness::NotReduced { component, simple, hom } => {
            return Verdict::NotApplicable {
                reason: format!("not reduced: component {component} has hom {hom} to simple {}", simple + 1),
            }
        }
        Reducedness::Unverified(why) => return Verdict::NotApplicable { reason: why },
    }
    // without the form assumption a certificate proves nothing, but the
    // driver can still find a point that is not good
    let form = check_form_assumption(family);
    match certify_all_good(family, opts.certify) {
        CertifyOutcome::Certified(c) if form => Verdict::RationalSingularities(Evidence::Certificate(c)),
        CertifyOutcome::Certified(_) => Verdict::NotCertified { reason: FORM.into(), witness: None },
        CertifyOutcome::Refuted(r) => {
            let reason = if form { REFUTED.to_string() } else { format!("{FORM}; {REFUTED}") };
            Verdict::NotCertified { reason, witness: Some(r) }
        }
        CertifyOutcome::Inconclusive(why) if form => Verdict::NotCertified { reason: why, witness: None },
        CertifyOutcome::Inconclusive(why) => Verdict::NotCertified { reason: format!("{FORM}; {why}"), witness: None },
    }
}

const FORM: &str = "a bracket has e·γ > a";
const REFUTED: &str = "Z(B̃) has a point that is not good";
