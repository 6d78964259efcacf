//! From a b-function family to rational singularities.
//!
//! The generators `b_c` (`e·c = 1`) cut out the locus Z(B̃). A point of it is
//! good when it is `−e` or has `e·z < −r`; if all points are good and the
//! zero set is a reduced complete intersection, it has rational
//! singularities. [`certify_all_good`] proves goodness by case analysis and
//! [`check_certificate`] re-verifies the proof independently.

mod certify;
mod checker;
mod reduce;
mod verdict;

pub use certify::{certify_all_good, CertNode, Certificate, CertifyOptions, CertifyOutcome, Refutation, Rule, SignCert};
pub use checker::check_certificate;
pub use reduce::{reduc_a, reduc_b, ReducA, ReducB};
pub use verdict::{rational_singularities_verdict, Evidence, RootMult, Verdict, VerdictOptions, VerdictReport};

use std::collections::BTreeSet;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::bfunction::{BFunctionFamily, LinearForm};
use crate::linalg::{rat, Rat};
use crate::lp::Constraint;
use crate::{Error, Result};

/// The root locus `coeffs · z = rhs` of one linear factor, with primitive
/// nonnegative integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Hyperplane {
    pub coeffs: Vec<i64>,
    #[serde(with = "crate::linalg::serde_rat")]
    pub rhs: Rat,
}

impl Hyperplane {
    pub fn new(coeffs: Vec<i64>, rhs: Rat) -> Self {
        let g = coeffs.iter().fold(0i64, |acc, &c| acc.gcd(&c));
        if g <= 1 {
            return Hyperplane { coeffs, rhs };
        }
        Hyperplane { coeffs: coeffs.iter().map(|c| c / g).collect(), rhs: rhs / rat(g) }
    }

    pub fn contains(&self, z: &[Rat]) -> bool {
        self.coeffs.iter().zip(z).map(|(&c, v)| rat(c) * v).sum::<Rat>() == self.rhs
    }

    pub fn as_constraint(&self) -> Constraint {
        Constraint::eq(&self.coeffs.iter().map(|&c| rat(c)).collect::<Vec<_>>(), self.rhs.clone())
    }

    /// `Some((i, v))` when the hyperplane is `z_i = v`.
    pub fn fixes(&self) -> Option<(usize, Rat)> {
        let mut nz = self.coeffs.iter().enumerate().filter(|(_, &c)| c != 0);
        let (i, &c) = nz.next()?;
        nz.next().is_none().then(|| (i, &self.rhs / rat(c)))
    }
}

/// `b_c(s) = b_{c⁺}(s + c⁻) · ∏_{c_i<0} binom(s_i, −c_i)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorBc {
    pub c: Vec<i64>,
    pub factors: Vec<LinearForm>,
    /// `(i, −c_i)` for every negative `c_i`.
    pub binomial_factors: Vec<(usize, u64)>,
}

impl GeneratorBc {
    pub fn evaluate(&self, z: &[Rat]) -> Rat {
        let mut v = self.factors.iter().fold(Rat::one(), |acc, f| acc * f.eval(z));
        for &(i, k) in &self.binomial_factors {
            for j in 0..k {
                v *= (&z[i] - rat(j as i64)) / rat(j as i64 + 1);
            }
        }
        v
    }

    pub fn vanishes_at(&self, z: &[Rat]) -> bool {
        self.hyperplanes().iter().any(|h| h.contains(z))
    }

    /// Distinct root hyperplanes, sorted.
    pub fn hyperplanes(&self) -> Vec<Hyperplane> {
        let r = self.c.len();
        let mut out = BTreeSet::new();
        for f in &self.factors {
            let coeffs = f.gamma.iter().map(|g| g.to_integer().to_i64().expect("small coefficient")).collect();
            out.insert(Hyperplane::new(coeffs, -f.constant.clone()));
        }
        for &(i, k) in &self.binomial_factors {
            for v in 0..k {
                let mut coeffs = vec![0; r];
                coeffs[i] = 1;
                out.insert(Hyperplane::new(coeffs, rat(v as i64)));
            }
        }
        out.into_iter().collect()
    }
}

pub fn generator_bc(family: &BFunctionFamily, c: &[i64]) -> Result<GeneratorBc> {
    if c.len() != family.r {
        return Err(Error::DimensionMismatch { expected: family.r, got: c.len() });
    }
    if c.iter().sum::<i64>() != 1 {
        return Err(Error::InvalidInput(format!("generator index {c:?} must satisfy e·c = 1")));
    }
    let plus: Vec<u64> = c.iter().map(|&x| x.max(0) as u64).collect();
    let mut factors = Vec::new();
    for t in &family.terms {
        let d = t.depth(&plus) as i64;
        if d == 0 {
            continue;
        }
        let shift: i64 = t.gamma.iter().zip(c).map(|(&g, &x)| g as i64 * x.min(0)).sum();
        let gamma: Vec<Rat> = t.gamma.iter().map(|&g| rat(g as i64)).collect();
        for i in t.a + 1..=t.b {
            for j in 0..d {
                for _ in 0..t.mult {
                    factors.push(LinearForm { gamma: gamma.clone(), constant: rat(shift + i + j) });
                }
            }
        }
    }
    factors.sort();
    let binomial_factors = c.iter().enumerate().filter(|(_, &x)| x < 0).map(|(i, &x)| (i, (-x) as u64)).collect();
    Ok(GeneratorBc { c: c.to_vec(), factors, binomial_factors })
}

/// `z = −e` or `e·z < −r`.
pub fn is_good(z: &[Rat]) -> bool {
    let r = z.len() as i64;
    z.iter().all(|v| *v == rat(-1)) || z.iter().sum::<Rat>() < rat(-r)
}

/// Every term in the non-unit part satisfies `e·γ ≤ a`.
pub fn check_form_assumption(family: &BFunctionFamily) -> bool {
    family
        .terms
        .iter()
        .filter(|t| t.unit_variable().is_none())
        .all(|t| t.gamma.iter().map(|&g| g as i64).sum::<i64>() <= t.a)
}

/// All integer `c` with `e·c = 1` and `|c_i| ≤ bound`, in lexicographic order.
pub fn generator_indices(r: usize, bound: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut cur = vec![0i64; r];
    fn rec(i: usize, cur: &mut Vec<i64>, sum: i64, bound: i64, out: &mut Vec<Vec<i64>>) {
        let r = cur.len();
        if i + 1 == r {
            let last = 1 - sum;
            if last.abs() <= bound {
                cur[i] = last;
                out.push(cur.clone());
            }
            return;
        }
        for v in -bound..=bound {
            cur[i] = v;
            rec(i + 1, cur, sum + v, bound, out);
        }
    }
    if r > 0 {
        rec(0, &mut cur, 0, bound, &mut out);
    }
    out
}

/// An interval of generator parameters `k` on which one factor vanishes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cover {
    pub source: String,
    pub lo: Option<i64>,
    pub hi: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MemberProof {
    /// `r = 1`: the only generator is `b_(1)`.
    Univariate,
    /// `r = 2`: generators are `c = (1−k, k)`; the covers exhaust `ℤ`.
    Line { covers: Vec<Cover> },
    /// Each `z_i` is a root of the unit brackets in `s_i`, and every `c` has a
    /// positive entry.
    UnitRoots,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Membership {
    Member(MemberProof),
    NonMember { c: Vec<i64> },
    UnknownBeyondBox { bound: i64 },
}

/// Decides whether every generator `b_c` vanishes at `z`. Exact for `r ≤ 2`
/// and whenever each coordinate is a unit root; otherwise a box search.
pub fn membership_in_ztilde(family: &BFunctionFamily, z: &[Rat], box_bound: i64) -> Result<Membership> {
    let r = family.r;
    if z.len() != r {
        return Err(Error::DimensionMismatch { expected: r, got: z.len() });
    }
    if r == 0 {
        return Err(Error::InvalidInput("no variables".into()));
    }
    if r == 1 {
        let g = generator_bc(family, &[1])?;
        return Ok(if g.vanishes_at(z) { Membership::Member(MemberProof::Univariate) } else { Membership::NonMember { c: vec![1] } });
    }
    if r == 2 {
        return line_membership(family, z);
    }
    if (0..r).all(|i| is_unit_root(family, i, &z[i])) {
        return Ok(Membership::Member(MemberProof::UnitRoots));
    }
    for c in generator_indices(r, box_bound) {
        if !generator_bc(family, &c)?.vanishes_at(z) {
            return Ok(Membership::NonMember { c });
        }
    }
    Ok(Membership::UnknownBeyondBox { bound: box_bound })
}

/// `v` is a root of the unit brackets of `b_{e^i}`.
fn is_unit_root(family: &BFunctionFamily, i: usize, v: &Rat) -> bool {
    family.terms.iter().any(|t| {
        t.unit_variable() == Some(i) && {
            let g = t.gamma[i] as i64;
            let s = -(v * rat(g));
            s.is_integer() && s >= rat(t.a + 1) && s <= rat(t.b + g - 1)
        }
    })
}

/// Integer solutions `k` of `p_j k ≤ q_j` for all `j`, as an interval.
fn solve_interval(rows: &[(i64, Rat)]) -> Option<(Option<i64>, Option<i64>)> {
    let mut lo: Option<i64> = None;
    let mut hi: Option<i64> = None;
    for (p, q) in rows {
        match p.signum() {
            1 => {
                let b = (q / rat(*p)).floor().to_integer().to_i64().expect("small bound");
                hi = Some(hi.map_or(b, |h| h.min(b)));
            }
            -1 => {
                let b = (q / rat(*p)).ceil().to_integer().to_i64().expect("small bound");
                lo = Some(lo.map_or(b, |l| l.max(b)));
            }
            _ => {
                if q.is_negative() {
                    return None;
                }
            }
        }
    }
    match (lo, hi) {
        (Some(l), Some(h)) if l > h => None,
        iv => Some(iv),
    }
}

fn line_membership(family: &BFunctionFamily, z: &[Rat]) -> Result<Membership> {
    let mut covers = Vec::new();
    // regime k ≤ 0: c = (1−k, k), c⁺ = (1−k, 0), c⁻ = (0, k)
    // regime k ≥ 1: c⁺ = (0, k), c⁻ = (1−k, 0)
    for t in &family.terms {
        let (g1, g2) = (t.gamma[0] as i64, t.gamma[1] as i64);
        let w = -(rat(g1) * &z[0] + rat(g2) * &z[1]);
        if !w.is_integer() {
            continue;
        }
        let label = t.to_string();
        // vanishing: depth ≥ 1 and a+1 ≤ w − shift ≤ b + depth − 1
        if g1 >= 1 {
            let rows = [
                (0, rat(0)),
                (1, rat(0)),
                (g2, &w - rat(t.a + 1)),
                (g1 - g2, rat(t.b + g1 - 1) - &w),
            ];
            if let Some((lo, hi)) = solve_interval(&rows) {
                covers.push(Cover { source: label.clone(), lo, hi });
            }
        }
        if g2 >= 1 {
            let rows = [(-1, rat(-1)), (-g1, &w - rat(g1 + t.a + 1)), (g1 - g2, rat(t.b - 1 + g1) - &w)];
            if let Some((lo, hi)) = solve_interval(&rows) {
                covers.push(Cover { source: label, lo, hi });
            }
        }
    }
    // binomials: k ≥ 2 kills z₁ ∈ {0..k−2}; k ≤ −1 kills z₂ ∈ {0..−k−1}
    if z[0].is_integer() && !z[0].is_negative() {
        let z1 = z[0].to_integer().to_i64().expect("small");
        covers.push(Cover { source: "binom(s1)".into(), lo: Some(z1 + 2), hi: None });
    }
    if z[1].is_integer() && !z[1].is_negative() {
        let z2 = z[1].to_integer().to_i64().expect("small");
        covers.push(Cover { source: "binom(s2)".into(), lo: None, hi: Some(-z2 - 1) });
    }
    let covered = |k: i64| covers.iter().any(|c| c.lo.map_or(true, |l| l <= k) && c.hi.map_or(true, |h| k <= h));
    let mut candidates: BTreeSet<i64> = [0, 1].into_iter().collect();
    let mut ends = Vec::new();
    for c in &covers {
        for e in [c.lo, c.hi].into_iter().flatten() {
            ends.push(e);
            candidates.extend([e - 1, e + 1]);
        }
    }
    let lowest = ends.iter().copied().chain([0]).min().unwrap_or(0);
    let highest = ends.iter().copied().chain([1]).max().unwrap_or(1);
    candidates.extend([lowest - 1, highest + 1]);
    match candidates.into_iter().find(|&k| !covered(k)) {
        Some(k) => {
            let c = vec![1 - k, k];
            debug_assert!(!generator_bc(family, &c)?.vanishes_at(z));
            Ok(Membership::NonMember { c })
        }
        None => Ok(Membership::Member(MemberProof::Line { covers })),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bfunction::BracketTerm;

    fn pos_family(n: i64) -> BFunctionFamily {
        let t = |g: &[u32], a, b| BracketTerm::new(g.to_vec(), a, b);
        BFunctionFamily::new(
            2,
            vec![
                t(&[0, 1], 0, 4 * n),
                t(&[0, 1], n, 3 * n).with_mult(2),
                t(&[0, 1], 2 * n, 4 * n),
                t(&[1, 0], 0, n),
                t(&[1, 1], n, 4 * n),
                t(&[1, 2], 4 * n, 7 * n),
            ],
        )
    }

    fn z(v: &[i64]) -> Vec<Rat> {
        v.iter().map(|&x| rat(x)).collect()
    }

    #[test]
    fn goodness() {
        assert!(is_good(&z(&[-1, -1, -1])));
        assert!(!is_good(&z(&[9, -7])));
        assert!(is_good(&z(&[-2, -1, -1, -1])));
        assert!(!is_good(&z(&[-1, -1, -1, -1, 0])));
    }

    #[test]
    fn form_assumption() {
        assert!(!check_form_assumption(&pos_family(1)));
        let units = BFunctionFamily::new(2, vec![BracketTerm::new(vec![3, 0], 0, 2)]);
        assert!(check_form_assumption(&units));
    }

    #[test]
    fn generator_with_binomial() {
        let g = generator_bc(&pos_family(1), &[2, -1]).unwrap();
        assert_eq!(g.binomial_factors, vec![(1, 1)]);
        assert!(g.vanishes_at(&z(&[5, 0])));
        // [s]^{12}_{4,7} at c⁺ = (2,0): depth 2, shift −2: s₁+2s₂+3 … s₁+2s₂+6
        let consts: Vec<i64> = g
            .factors
            .iter()
            .filter(|f| f.gamma == vec![rat(1), rat(2)])
            .map(|f| f.constant.to_integer().to_i64().unwrap())
            .collect();
        assert_eq!(consts, vec![3, 4, 4, 5, 5, 6]);
        assert!(generator_bc(&pos_family(1), &[1, 1]).is_err());
    }

    #[test]
    fn line_membership_matches_box_scan() {
        let f = pos_family(1);
        for p in [[9, -7], [-2, 0], [0, -2], [-1, -1], [7, -6], [3, 3], [-3, 1]] {
            let m = membership_in_ztilde(&f, &z(&p), 0).unwrap();
            let scan = (-40..=40).map(|k| vec![1 - k, k]).find(|c| !generator_bc(&f, c).unwrap().vanishes_at(&z(&p)));
            match (&m, scan) {
                (Membership::Member(_), None) => {}
                (Membership::NonMember { c }, Some(_)) => assert!(!generator_bc(&f, c).unwrap().vanishes_at(&z(&p))),
                other => panic!("{p:?}: {other:?}"),
            }
        }
        assert_eq!(membership_in_ztilde(&f, &z(&[9, -7]), 0).unwrap(), Membership::NonMember { c: vec![4, -3] });
        assert!(matches!(membership_in_ztilde(&f, &z(&[-2, 0]), 0).unwrap(), Membership::Member(_)));
    }

    #[test]
    fn unit_roots_and_positive_points() {
        let t = |g: &[u32], a, b| BracketTerm::new(g.to_vec(), a, b);
        let f = BFunctionFamily::new(
            3,
            vec![t(&[1, 0, 0], 0, 2), t(&[0, 1, 0], 0, 2), t(&[0, 0, 1], 0, 1), t(&[1, 1, 1], 3, 5)],
        );
        assert_eq!(membership_in_ztilde(&f, &z(&[-1, -1, -1]), 3).unwrap(), Membership::Member(MemberProof::UnitRoots));
        match membership_in_ztilde(&f, &z(&[5, 5, 5]), 3).unwrap() {
            Membership::NonMember { c } => assert!(!generator_bc(&f, &c).unwrap().vanishes_at(&z(&[5, 5, 5]))),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn indices() {
        let cs = generator_indices(3, 1);
        assert!(cs.iter().all(|c| c.iter().sum::<i64>() == 1 && c.iter().all(|x| x.abs() <= 1)));
        assert_eq!(cs.len(), 6);
    }
}
