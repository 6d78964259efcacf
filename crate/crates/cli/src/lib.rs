//! Commands behind the `nullcone` binary, returning serializable reports.

pub mod input;

use std::fmt::Write as _;

use anyhow::Context;
use nullcone::analyzer::{
    check_certificate, rational_singularities_verdict, CertifyOptions, Certificate, Evidence, Verdict, VerdictOptions,
    VerdictReport,
};
use nullcone::bfunction::{compute_bfunction, BFunctionFamily};
use nullcone::generic::{generic_decomposition, perp_simples};
use nullcone::orbit::{analyze, Reducedness, ZeroSetSpec};
use nullcone::roots::RootSystem;
use nullcone::{DimVector, Error, Quiver};
use serde::{Deserialize, Serialize};

pub use input::{Preset, Request};
use input::fmt_vector;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecomposeReport {
    pub quiver_type: String,
    pub alpha: DimVector,
    pub generic: Vec<(DimVector, u32)>,
    pub simples: Vec<DimVector>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentJson {
    pub parts: Vec<(DimVector, u32)>,
    pub codim: u32,
    /// `hom(N, S_j)` for the selected simples.
    pub hom_profile: Vec<u32>,
    pub gradient_a: bool,
    /// `"verified"` or `"unverified"`.
    pub gradient_b: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NotReducedWitness {
    pub component: Vec<(DimVector, u32)>,
    /// 1-based index into the perpendicular simples.
    pub simple: usize,
    pub simple_dims: DimVector,
    pub hom: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NullconeReport {
    pub alpha: DimVector,
    pub simples: Vec<DimVector>,
    pub components: Vec<ComponentJson>,
    pub ci: bool,
    /// `"reduced"`, `"not-reduced"` or `"unverified"`.
    pub verdict: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<NotReducedWitness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BFunctionReport {
    pub simples: Vec<DimVector>,
    pub rendered: String,
    pub family: BFunctionFamily,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingularitiesReport {
    pub simples: Vec<DimVector>,
    pub rendered: String,
    pub report: VerdictReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HomReport {
    Pair { v: DimVector, w: DimVector, hom: u32, ext: u32, euler: i64 },
    Table { roots: Vec<DimVector>, hom: Vec<Vec<u32>>, ext: Vec<Vec<u32>> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub ok: bool,
    pub nodes: usize,
    pub depth: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

fn alpha_of(req: &Request) -> anyhow::Result<&DimVector> {
    req.alpha.as_ref().ok_or_else(|| Error::InvalidInput("a dimension vector is required (--dim)".into()).into())
}

fn type_name(q: &Quiver) -> anyhow::Result<String> {
    let (t, n) = q.require_dynkin()?;
    Ok(format!("{t:?}{n}"))
}

pub fn cmd_decompose(req: &Request) -> anyhow::Result<DecomposeReport> {
    let quiver_type = type_name(&req.quiver)?;
    let alpha = alpha_of(req)?;
    let rs = RootSystem::cached(&req.quiver)?;
    let t = generic_decomposition(&rs, alpha)?;
    let perp = perp_simples(&rs, &t)?;
    Ok(DecomposeReport { quiver_type, alpha: alpha.clone(), generic: t.parts, simples: perp.simples })
}

fn zero_set(req: &Request) -> anyhow::Result<ZeroSetSpec> {
    req.quiver.require_dynkin()?;
    Ok(ZeroSetSpec::new(&req.quiver, alpha_of(req)?, req.simples.clone())?)
}

fn selected_simples(spec: &ZeroSetSpec) -> Vec<DimVector> {
    spec.selected.iter().map(|&j| spec.perp.simples[j].clone()).collect()
}

pub fn cmd_nullcone(req: &Request) -> anyhow::Result<NullconeReport> {
    let spec = zero_set(req)?;
    let rep = analyze(&spec);
    let components = rep
        .components
        .iter()
        .map(|c| ComponentJson {
            parts: c.class.parts.clone(),
            codim: c.codim,
            hom_profile: c.hom_to_simples.clone(),
            gradient_a: c.gradient_a,
            gradient_b: if c.gradient_b_witnesses.is_some() { "verified" } else { "unverified" }.into(),
        })
        .collect();
    let (verdict, witness, reason) = match rep.verdict {
        Reducedness::Reduced => ("reduced", None, None),
        Reducedness::NotReduced { component, simple, hom } => (
            "not-reduced",
            Some(NotReducedWitness {
                component: component.parts,
                simple: simple + 1,
                simple_dims: spec.perp.simples[simple].clone(),
                hom,
            }),
            None,
        ),
        Reducedness::Unverified(why) => ("unverified", None, Some(why)),
    };
    Ok(NullconeReport {
        alpha: spec.alpha.clone(),
        simples: selected_simples(&spec),
        components,
        ci: rep.ci,
        verdict: verdict.into(),
        witness,
        reason,
    })
}

pub fn cmd_bfunction(req: &Request) -> anyhow::Result<BFunctionReport> {
    let spec = zero_set(req)?;
    let simples = selected_simples(&spec);
    let family = compute_bfunction(&req.quiver, &spec.alpha, &simples)?;
    let rendered = family.render_univariate().unwrap_or_else(|| family.render());
    Ok(BFunctionReport { simples, rendered, family })
}

pub fn cmd_singularities(req: &Request, certify: CertifyOptions) -> anyhow::Result<SingularitiesReport> {
    let spec = zero_set(req)?;
    let simples = selected_simples(&spec);
    let report = rational_singularities_verdict(&req.quiver, &spec.alpha, req.simples.clone(), VerdictOptions { certify })?;
    let rendered = report.family.render_univariate().unwrap_or_else(|| report.family.render());
    Ok(SingularitiesReport { simples, rendered, report })
}

pub fn cmd_hom(q: &Quiver, pair: Option<(DimVector, DimVector)>) -> anyhow::Result<HomReport> {
    q.require_dynkin()?;
    let rs = RootSystem::cached(q)?;
    Ok(match pair {
        Some((v, w)) => {
            let (i, j) = (rs.index_of(&v)?, rs.index_of(&w)?);
            HomReport::Pair { hom: rs.hom(i, j), ext: rs.ext(i, j), euler: q.euler(&v, &w), v, w }
        }
        None => HomReport::Table { roots: rs.table.roots.clone(), hom: rs.table.hom.clone(), ext: rs.table.ext.clone() },
    })
}

/// Accepts a bare certificate or a saved `singularities` report.
pub fn cmd_verify(json: &str) -> anyhow::Result<VerifyReport> {
    let cert: Certificate = match serde_json::from_str::<Certificate>(json) {
        Ok(c) => c,
        Err(_) => {
            let rep: SingularitiesReport = serde_json::from_str(json)
                .map_err(|e| Error::InvalidInput(format!("neither a certificate nor a report: {e}")))?;
            match rep.report.verdict {
                Verdict::RationalSingularities(Evidence::Certificate(c)) => c,
                _ => return Err(Error::InvalidInput("the report carries no certificate".into()).into()),
            }
        }
    };
    let (nodes, depth) = (cert.root.size(), cert.root.depth());
    Ok(match check_certificate(&cert) {
        Ok(()) => VerifyReport { ok: true, nodes, depth, error: None },
        Err(e) => VerifyReport { ok: false, nodes, depth, error: Some(e) },
    })
}

/// Exit status for a failed command.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    match err.downcast_ref::<Error>() {
        Some(Error::NonDynkin) => 3,
        Some(Error::TerminalRuleInapplicable { .. }) => 4,
        Some(Error::Internal(_)) => 1,
        Some(_) => 2,
        None if err.downcast_ref::<std::io::Error>().is_some() => 2,
        None => 1,
    }
}

fn fmt_class(q: &Quiver, parts: &[(DimVector, u32)]) -> String {
    parts
        .iter()
        .map(|(r, m)| if *m == 1 { fmt_vector(q, r) } else { format!("{}^{m}", fmt_vector(q, r)) })
        .collect::<Vec<_>>()
        .join(" ⊕ ")
}

pub fn text_decompose(q: &Quiver, r: &DecomposeReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "type {}  α = {}", r.quiver_type, fmt_vector(q, &r.alpha));
    let _ = writeln!(s, "generic: {}", fmt_class(q, &r.generic));
    for (k, v) in r.simples.iter().enumerate() {
        let _ = writeln!(s, "S{} = {}", k + 1, fmt_vector(q, v));
    }
    s
}

pub fn text_nullcone(q: &Quiver, r: &NullconeReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "α = {}  simples: {}", fmt_vector(q, &r.alpha), r.simples.iter().map(|v| fmt_vector(q, v)).collect::<Vec<_>>().join(" "));
    for (k, c) in r.components.iter().enumerate() {
        let _ = writeln!(
            s,
            "N{} = {}  codim {}  hom {:?}  (a) {}  (b) {}",
            k + 1,
            fmt_class(q, &c.parts),
            c.codim,
            c.hom_profile,
            c.gradient_a,
            c.gradient_b
        );
    }
    let _ = writeln!(s, "complete intersection: {}", r.ci);
    let _ = write!(s, "verdict: {}", r.verdict);
    if let Some(w) = &r.witness {
        let _ = write!(s, " ({} has hom {} to S{} = {})", fmt_class(q, &w.component), w.hom, w.simple, fmt_vector(q, &w.simple_dims));
    }
    if let Some(why) = &r.reason {
        let _ = write!(s, " ({why})");
    }
    s.push('\n');
    s
}

pub fn text_singularities(r: &SingularitiesReport) -> String {
    let mut s = format!("b-function family: {}\n", r.rendered);
    match &r.report.verdict {
        Verdict::RationalSingularities(Evidence::Certificate(c)) => {
            let _ = writeln!(s, "rational singularities: every point of Z(B̃) is good ({} case nodes, depth {})", c.root.size(), c.root.depth());
        }
        Verdict::RationalSingularities(Evidence::Hypersurface { roots }) => {
            let rs: Vec<String> = roots.iter().map(|r| if r.mult == 1 { r.root.to_string() } else { format!("{}^{}", r.root, r.mult) }).collect();
            let _ = writeln!(s, "rational singularities: largest root -1, simple; roots {}", rs.join(" "));
        }
        Verdict::NotCertified { reason, witness } => {
            let _ = writeln!(s, "not certified: {reason}");
            if let Some(w) = witness {
                let z: Vec<String> = w.z.iter().map(|v| v.to_string()).collect();
                let _ = writeln!(s, "witness z = ({}) lies in Z(B̃) and is not good", z.join(","));
            }
        }
        Verdict::NotApplicable { reason } => {
            let _ = writeln!(s, "not applicable: {reason}");
        }
    }
    s
}

pub fn text_hom(r: &HomReport) -> String {
    let v = |x: &DimVector| format!("({})", x.iter().map(i64::to_string).collect::<Vec<_>>().join(","));
    match r {
        HomReport::Pair { v: a, w: b, hom, ext, euler } => {
            format!("hom({}, {}) = {hom}\next = {ext}\neuler = {euler}\n", v(a), v(b))
        }
        HomReport::Table { roots, hom, ext } => {
            let mut s = String::new();
            for (i, a) in roots.iter().enumerate() {
                for (j, b) in roots.iter().enumerate() {
                    if hom[i][j] > 0 || ext[i][j] > 0 {
                        let _ = writeln!(s, "{} {} hom {} ext {}", v(a), v(b), hom[i][j], ext[i][j]);
                    }
                }
            }
            s
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> anyhow::Result<String> {
    serde_json::to_string_pretty(value).context("serializing report")
}
