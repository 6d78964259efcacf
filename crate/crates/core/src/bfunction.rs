//! Bracket algebra and multi-variable b-functions of semi-invariants.
//!
//! A family is a multiset of brackets `[s]^γ_{a,b}`; at a multiplicity tuple
//! `m` the bracket expands to `∏_{i=a+1}^{b} ∏_{j<γ·m} (γ·s + i + j)`.
//! Families are computed by castling: sink reflections move α and the
//! semi-invariant weights β^j, and each step contributes one bracket quotient.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::linalg::{rat, Rat};
use crate::quiver::{DimVector, Quiver};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BracketTerm {
    pub gamma: Vec<u32>,
    pub a: i64,
    pub b: i64,
    pub mult: u32,
}

impl BracketTerm {
    pub fn new(gamma: Vec<u32>, a: i64, b: i64) -> Self {
        BracketTerm { gamma, a, b, mult: 1 }
    }

    pub fn with_mult(mut self, mult: u32) -> Self {
        self.mult = mult;
        self
    }

    pub fn depth(&self, m: &[u64]) -> u64 {
        self.gamma.iter().zip(m).map(|(&g, &k)| g as u64 * k).sum()
    }

    pub fn is_trivial(&self) -> bool {
        self.a >= self.b || self.gamma.iter().all(|&g| g == 0)
    }

    /// The variable of a term whose `γ` has a single nonzero entry.
    pub fn unit_variable(&self) -> Option<usize> {
        let mut it = self.gamma.iter().enumerate().filter(|(_, &g)| g > 0);
        let (i, _) = it.next()?;
        it.next().is_none().then_some(i)
    }

    /// Expanded forms, each repeated `mult` times.
    pub fn forms(&self, m: &[u64]) -> Vec<LinearForm> {
        let d = self.depth(m) as i64;
        let gamma: Vec<Rat> = self.gamma.iter().map(|&g| rat(g as i64)).collect();
        let mut out = Vec::new();
        for i in self.a + 1..=self.b {
            for j in 0..d {
                for _ in 0..self.mult {
                    out.push(LinearForm { gamma: gamma.clone(), constant: rat(i + j) });
                }
            }
        }
        out
    }

    fn gamma_label(&self) -> String {
        if self.gamma.iter().all(|&g| g < 10) {
            self.gamma.iter().map(|g| g.to_string()).collect()
        } else {
            self.gamma.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(",")
        }
    }
}

impl fmt::Display for BracketTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let core = if self.a == 0 {
            format!("[s]^{{{}}}_{{{}}}", self.gamma_label(), self.b)
        } else {
            format!("[s]^{{{}}}_{{{},{}}}", self.gamma_label(), self.a, self.b)
        };
        if self.mult == 1 {
            write!(f, "{core}")
        } else {
            write!(f, "({core})^{}", self.mult)
        }
    }
}

/// `γ·s + constant`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LinearForm {
    #[serde(with = "crate::linalg::serde_rat_vec")]
    pub gamma: Vec<Rat>,
    #[serde(with = "crate::linalg::serde_rat")]
    pub constant: Rat,
}

impl LinearForm {
    pub fn eval(&self, z: &[Rat]) -> Rat {
        self.gamma.iter().zip(z).map(|(g, v)| g * v).sum::<Rat>() + &self.constant
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, g) in self.gamma.iter().enumerate() {
            if g.is_zero() {
                continue;
            }
            let sign = if g.is_negative() { "-" } else if first { "" } else { "+" };
            let mag = g.abs();
            let coef = if mag.is_one() { String::new() } else { mag.to_string() };
            write!(f, "{sign}{coef}s{}", i + 1)?;
            first = false;
        }
        if first {
            write!(f, "{}", self.constant)
        } else if self.constant.is_negative() {
            write!(f, "-{}", -&self.constant)
        } else if self.constant.is_positive() {
            write!(f, "+{}", self.constant)
        } else {
            Ok(())
        }
    }
}

/// Where a family came from. Variable `i` belongs to `simples[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyMeta {
    pub quiver: String,
    pub alpha: DimVector,
    pub simples: Vec<DimVector>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BFunctionFamily {
    pub r: usize,
    pub terms: Vec<BracketTerm>,
    /// Terms whose `γ` was killed by specialization: `(γ_i, a, b)` in the
    /// specialized variable. They only matter for generators that move it.
    #[serde(default)]
    pub scalars: Vec<BracketTerm>,
    #[serde(default)]
    pub meta: Option<FamilyMeta>,
}

impl BFunctionFamily {
    pub fn new(r: usize, terms: Vec<BracketTerm>) -> Self {
        let mut f = BFunctionFamily { r, terms, scalars: Vec::new(), meta: None };
        f.canonicalize();
        f
    }

    /// Drops trivial terms, merges equal ones and sorts.
    fn canonicalize(&mut self) {
        let mut merged: BTreeMap<(Vec<u32>, i64, i64), u32> = BTreeMap::new();
        for t in self.terms.drain(..) {
            if !t.is_trivial() {
                *merged.entry((t.gamma, t.a, t.b)).or_default() += t.mult;
            }
        }
        self.terms = merged.into_iter().map(|((g, a, b), m)| BracketTerm { gamma: g, a, b, mult: m }).collect();
    }

    pub fn expand(&self, m: &[u64]) -> Vec<LinearForm> {
        let mut out: Vec<LinearForm> = self.terms.iter().flat_map(|t| t.forms(m)).collect();
        out.sort();
        out
    }

    pub fn evaluate(&self, m: &[u64], z: &[Rat]) -> Rat {
        self.terms
            .iter()
            .flat_map(|t| t.forms(m))
            .fold(Rat::one(), |acc, f| acc * f.eval(z))
    }

    /// Sets the 0-based variable `i` to `value` and drops it.
    pub fn specialize(&self, i: usize, value: i64) -> BFunctionFamily {
        self.specialize_rational(i, &rat(value)).expect("integer shifts")
    }

    /// As [`specialize`](Self::specialize); `None` if some shift `γ_i·value` is not an integer.
    pub fn specialize_rational(&self, i: usize, value: &Rat) -> Option<BFunctionFamily> {
        assert!(i < self.r, "variable {i} out of range");
        let mut terms = Vec::new();
        let mut scalars = self.scalars.clone();
        for t in &self.terms {
            let shift = rat(t.gamma[i] as i64) * value;
            if !shift.is_integer() {
                return None;
            }
            let shift = i64::try_from(shift.to_integer()).ok()?;
            let mut g = t.gamma.clone();
            let gi = g.remove(i);
            let moved = BracketTerm { gamma: g, a: t.a + shift, b: t.b + shift, mult: t.mult };
            if moved.gamma.iter().any(|&x| x > 0) {
                terms.push(moved);
            } else {
                scalars.push(BracketTerm { gamma: vec![gi], ..moved });
            }
        }
        let mut f = BFunctionFamily { r: self.r - 1, terms, scalars, meta: None };
        f.canonicalize();
        Some(f)
    }

    /// Reorders variables: new variable `k` is old variable `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> BFunctionFamily {
        assert_eq!(perm.len(), self.r);
        let terms = self
            .terms
            .iter()
            .map(|t| BracketTerm { gamma: perm.iter().map(|&p| t.gamma[p]).collect(), ..t.clone() })
            .collect();
        let mut f = BFunctionFamily { r: self.r, terms, scalars: self.scalars.clone(), meta: None };
        if let Some(m) = &self.meta {
            f.meta = Some(FamilyMeta { simples: perm.iter().map(|&p| m.simples[p].clone()).collect(), ..m.clone() });
        }
        f.canonicalize();
        f
    }

    /// How many brackets contain the layer `i` of each `γ`. Two families
    /// describe the same polynomial for every `m` iff their profiles agree.
    pub fn layer_profile(&self) -> BTreeMap<(Vec<u32>, i64), i64> {
        let mut p = BTreeMap::new();
        for t in &self.terms {
            for i in t.a + 1..=t.b {
                *p.entry((t.gamma.clone(), i)).or_insert(0) += t.mult as i64;
            }
        }
        p
    }

    pub fn same_polynomial(&self, other: &BFunctionFamily) -> bool {
        self.r == other.r && self.layer_profile() == other.layer_profile()
    }

    /// Every constant `i + j` of every expanded form is a positive integer.
    pub fn constants_positive(&self) -> bool {
        self.terms.iter().all(|t| t.a >= 0)
    }

    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "1".into();
        }
        self.terms.iter().map(|t| t.to_string()).collect::<Vec<_>>().join("·")
    }

    /// Single-variable form at `m = 1`, e.g. `s+1` or `(s+1)(2s+3)^2`.
    pub fn render_univariate(&self) -> Option<String> {
        if self.r != 1 {
            return None;
        }
        let mut counts: BTreeMap<(Rat, Rat), u32> = BTreeMap::new();
        for f in self.expand(&[1]) {
            *counts.entry((f.gamma[0].clone(), f.constant)).or_default() += 1;
        }
        let factors: Vec<(String, u32)> = counts
            .into_iter()
            .map(|((g, c), k)| (LinearForm { gamma: vec![g], constant: c }.to_string().replace("s1", "s"), k))
            .collect();
        Some(match factors.as_slice() {
            [] => "1".into(),
            [(f, 1)] => f.clone(),
            _ => factors
                .iter()
                .map(|(f, k)| if *k == 1 { format!("({f})") } else { format!("({f})^{k}") })
                .collect(),
        })
    }

    /// Roots of the single-variable b-function `b_1(s)` with multiplicities,
    /// largest first.
    pub fn univariate_roots(&self) -> Option<Vec<(Rat, u32)>> {
        if self.r != 1 {
            return None;
        }
        let mut roots: BTreeMap<Rat, u32> = BTreeMap::new();
        for f in self.expand(&[1]) {
            *roots.entry(-(&f.constant / &f.gamma[0])).or_default() += 1;
        }
        Some(roots.into_iter().rev().collect())
    }
}

impl fmt::Display for BFunctionFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Checks `[s]^d_{a,b} · [s]^d_{0,a} = [s]^d_{0,b}` by expanding both sides
/// at several multiplicity tuples.
pub fn bracket_identity_check(d: &[u32], a: i64, b: i64) -> bool {
    let r = d.len();
    let mut ms: Vec<Vec<u64>> = vec![vec![1; r], vec![2; r]];
    for i in 0..r {
        let mut m = vec![0; r];
        m[i] = 1;
        ms.push(m);
        ms.push((0..r).map(|k| ((k * 7 + i * 3) % 4) as u64).collect());
    }
    ms.iter().all(|m| bracket_identity_at(d, a, b, m))
}

/// The identity at one tuple `m`.
pub fn bracket_identity_at(d: &[u32], a: i64, b: i64, m: &[u64]) -> bool {
    let term = |lo, hi| BracketTerm::new(d.to_vec(), lo, hi);
    let mut left = term(a, b).forms(m);
    left.extend(term(0, a).forms(m));
    left.sort();
    let mut right = term(0, b).forms(m);
    right.sort();
    left == right
}

/// A quotient of brackets `[s]^γ_{lo,hi}` with `lo > hi` allowed (a denominator).
type RawTerm = (Vec<u32>, i64, i64);

/// Input and output of one Coxeter round.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReflectionState {
    pub quiver: Quiver,
    pub alpha: DimVector,
    pub betas: Vec<DimVector>,
    pub terms: Vec<(Vec<u32>, i64, i64)>,
}

impl ReflectionState {
    pub fn new(q: &Quiver, alpha: &[i64], betas: &[DimVector]) -> Self {
        ReflectionState { quiver: q.clone(), alpha: alpha.to_vec(), betas: betas.to_vec(), terms: Vec::new() }
    }

    /// The accumulated quotient as a family (fails if a denominator survives).
    pub fn family(&self) -> Result<BFunctionFamily> {
        to_family(self.betas.len(), &self.terms)
    }
}

/// One full Coxeter round `α ↦ c(α)`, `β^j ↦ c(β^j)`, adding the bracket
/// `[s]^{(β^1_x,…,β^r_x)}_{c(α)_x, α_x}` for every vertex `x`.
pub fn reflection_step(state: &ReflectionState) -> Result<ReflectionState> {
    let cox = state.quiver.coxeter();
    let ca = cox.apply_coxeter(&state.alpha);
    if let Some(x) = ca.iter().position(|&v| v < 0) {
        return Err(Error::PreconditionFailed(x + 1));
    }
    let cb: Vec<DimVector> = state.betas.iter().map(|b| cox.apply_coxeter(b)).collect();
    if let Some(x) = cb.iter().find_map(|b| b.iter().position(|&v| v < 0)) {
        return Err(Error::PreconditionFailed(x + 1));
    }
    let mut terms = state.terms.clone();
    for x in 0..state.alpha.len() {
        let gamma: Vec<u32> = state.betas.iter().map(|b| b[x] as u32).collect();
        if gamma.iter().any(|&g| g > 0) && ca[x] != state.alpha[x] {
            terms.push((gamma, ca[x], state.alpha[x]));
        }
    }
    Ok(ReflectionState { quiver: state.quiver.clone(), alpha: ca, betas: cb, terms })
}

/// The b-function of the semi-invariants `c_{S_j}`, `S_j` of dimension
/// `simples[j]`, on `Rep(q, α)`.
pub fn compute_bfunction(q: &Quiver, alpha: &[i64], simples: &[DimVector]) -> Result<BFunctionFamily> {
    compute_bfunction_with_order(q, alpha, simples, |sinks| sinks.to_vec())
}

/// As [`compute_bfunction`], trying sinks in the order returned by `order`.
pub fn compute_bfunction_with_order<F>(q: &Quiver, alpha: &[i64], simples: &[DimVector], mut order: F) -> Result<BFunctionFamily>
where
    F: FnMut(&[usize]) -> Vec<usize>,
{
    q.require_dynkin()?;
    q.check_dims(alpha)?;
    for s in simples {
        q.check_dims(s)?;
        if s.iter().any(|&v| v < 0) || s.iter().all(|&v| v == 0) {
            return Err(Error::NotARoot(s.clone()));
        }
    }
    if alpha.iter().any(|&v| v < 0) {
        return Err(Error::InvalidInput(format!("negative dimension vector {alpha:?}")));
    }
    let n = alpha.len();
    let r = simples.len();
    let mut quiver = q.clone();
    let mut a = alpha.to_vec();
    let mut betas = simples.to_vec();
    let mut active = vec![true; r];
    let mut terms: Vec<RawTerm> = Vec::new();
    // every castling step strictly changes the state; the bound is a safety net
    let limit = 200 * n * (1 + a.iter().sum::<i64>() as usize);
    let mut steps = 0;
    while active.iter().any(|&x| x) {
        steps += 1;
        if steps > limit {
            return Err(Error::TerminalRuleInapplicable { partial: render_raw(&terms) });
        }
        let sinks = quiver.sinks();
        let mut moved = false;
        for x in order(&sinks) {
            let mut na = quiver.reflect_vector(x, &a);
            if na[x] < 0 {
                if (0..r).any(|j| active[j] && betas[j][x] != 0) {
                    continue;
                }
                // nothing selected sees x: only the image of the inflow matters
                a[x] += na[x];
                na = quiver.reflect_vector(x, &a);
            }
            let mut retire = Vec::new();
            let mut blocked = false;
            for j in (0..r).filter(|&j| active[j]) {
                let nb = quiver.reflect_vector(x, &betas[j]);
                if nb.iter().any(|&v| v < 0) {
                    if betas[j] == quiver.unit(x) {
                        retire.push(j);
                    } else {
                        blocked = true;
                    }
                }
            }
            if blocked {
                continue;
            }
            let gamma: Vec<u32> = (0..r).map(|j| if active[j] { betas[j][x] as u32 } else { 0 }).collect();
            if gamma.iter().any(|&g| g > 0) && na[x] != a[x] {
                terms.push((gamma, na[x], a[x]));
            }
            for j in (0..r).filter(|&j| active[j]) {
                betas[j] = quiver.reflect_vector(x, &betas[j]);
            }
            for j in retire {
                active[j] = false;
            }
            a = na;
            quiver = quiver.reflect_at(x);
            moved = true;
            break;
        }
        if !moved {
            return Err(Error::TerminalRuleInapplicable { partial: render_raw(&terms) });
        }
    }
    let mut fam = to_family(r, &terms)?;
    if !fam.constants_positive() {
        return Err(Error::Internal(format!("family with nonpositive constants: {fam}")));
    }
    fam.meta = Some(FamilyMeta { quiver: q.to_text(), alpha: alpha.to_vec(), simples: simples.to_vec() });
    Ok(fam)
}

fn render_raw(terms: &[RawTerm]) -> String {
    terms
        .iter()
        .map(|(g, lo, hi)| BracketTerm::new(g.clone(), *lo, *hi).to_string())
        .collect::<Vec<_>>()
        .join("·")
}

/// Cancels quotients layer by layer and regroups the result into maximal runs.
fn to_family(r: usize, terms: &[RawTerm]) -> Result<BFunctionFamily> {
    let mut layers: BTreeMap<Vec<u32>, BTreeMap<i64, i64>> = BTreeMap::new();
    for (g, lo, hi) in terms {
        let (from, to, sign) = if lo < hi { (*lo, *hi, 1) } else { (*hi, *lo, -1) };
        let e = layers.entry(g.clone()).or_default();
        for i in from + 1..=to {
            *e.entry(i).or_insert(0) += sign;
        }
    }
    let mut out = Vec::new();
    for (g, mut counts) in layers {
        counts.retain(|_, v| *v != 0);
        if counts.values().any(|&v| v < 0) {
            return Err(Error::TerminalRuleInapplicable { partial: render_raw(terms) });
        }
        while let Some((&lo, _)) = counts.iter().next() {
            let mut hi = lo;
            while counts.contains_key(&(hi + 1)) {
                hi += 1;
            }
            for i in lo..=hi {
                let c = counts.get_mut(&i).expect("layer present");
                *c -= 1;
                if *c == 0 {
                    counts.remove(&i);
                }
            }
            out.push(BracketTerm::new(g.clone(), lo - 1, hi));
        }
    }
    Ok(BFunctionFamily::new(r, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::presets::{a, e6, e8};

    fn t(g: &[u32], a: i64, b: i64) -> BracketTerm {
        BracketTerm::new(g.to_vec(), a, b)
    }

    #[test]
    fn a2_is_s_plus_one() {
        let f = compute_bfunction(&a(2), &[1, 1], &[vec![0, 1]]).unwrap();
        assert_eq!(f.terms, vec![t(&[1], 0, 1)]);
        assert_eq!(f.render_univariate().unwrap(), "s+1");
        assert_eq!(f.univariate_roots().unwrap(), vec![(rat(-1), 1)]);
    }

    #[test]
    fn a2_round_fails_precondition() {
        let s = ReflectionState::new(&a(2), &[1, 1], &[vec![0, 1]]);
        assert_eq!(reflection_step(&s), Err(Error::PreconditionFailed(1)));
    }

    #[test]
    fn e6_family() {
        let (n, m) = (2, 2);
        let simples = vec![vec![0, 0, 1, 1, 1, 1], vec![0, 1, 1, 1, 1, 0], vec![1, 1, 1, 0, 0, 1], vec![1, 1, 1, 1, 0, 0]];
        let f = compute_bfunction(&e6(), &[n, 2 * n + m, 2 * n + m, 2 * n + m, n, n + m], &simples).unwrap();
        // printed variable k is lexicographic simple [2,0,1,3][k]
        let f = f.permuted(&[2, 0, 1, 3]);
        let want = BFunctionFamily::new(
            4,
            vec![
                t(&[1, 0, 0, 0], 0, n + m),
                t(&[0, 1, 0, 0], 0, n + m),
                t(&[0, 0, 1, 0], 0, n),
                t(&[0, 0, 0, 1], 0, n),
                t(&[0, 0, 1, 1], n, 2 * n + m),
                t(&[0, 1, 1, 0], n + m, 2 * n + m),
                t(&[1, 0, 0, 1], n + m, 2 * n + m),
            ],
        );
        assert!(f.same_polynomial(&want), "{f}");
    }

    #[test]
    fn e8_family_and_rendering() {
        let f = compute_bfunction(&e8(), &[2, 4, 7, 4, 3, 2, 1, 3], &[vec![0, 0, 1, 1, 1, 1, 1, 0], vec![0, 1, 2, 1, 1, 1, 0, 1]]).unwrap();
        let want = BFunctionFamily::new(
            2,
            vec![t(&[0, 1], 0, 4), t(&[0, 1], 1, 3).with_mult(2), t(&[0, 1], 2, 4), t(&[1, 0], 0, 1), t(&[1, 1], 1, 4), t(&[1, 2], 4, 7)],
        );
        assert!(f.same_polynomial(&want), "{f}");
        assert_eq!(want.render(), "[s]^{01}_{4}·([s]^{01}_{1,3})^2·[s]^{01}_{2,4}·[s]^{10}_{1}·[s]^{11}_{1,4}·[s]^{12}_{4,7}");
    }

    #[test]
    fn expansion_of_a_two_variable_bracket() {
        let f = BFunctionFamily::new(2, vec![t(&[1, 2], 4, 7)]);
        let forms = f.expand(&[1, 1]);
        assert_eq!(forms.len(), 9);
        let consts: Vec<Rat> = forms.iter().map(|x| x.constant.clone()).collect();
        let mut want: Vec<Rat> = (5..=7).flat_map(|i| (0..3).map(move |j| rat(i + j))).collect();
        want.sort();
        assert_eq!(consts, want);
        assert!(f.expand(&[0, 0]).is_empty());
    }

    #[test]
    fn specialization_shifts_and_records_scalars() {
        let f = BFunctionFamily::new(2, vec![t(&[1, 1], 3, 6), t(&[0, 1], 0, 2), t(&[2, 0], 0, 5)]);
        let g = f.specialize(0, -2);
        assert_eq!(g.terms, vec![t(&[1], 0, 2), t(&[1], 1, 4)]);
        assert_eq!(g.scalars, vec![t(&[2], -4, 1)]);
    }

    #[test]
    fn identity_examples() {
        assert!(bracket_identity_check(&[1], 2, 5));
        assert!(bracket_identity_check(&[1, 2], 0, 2));
        assert!(bracket_identity_check(&[3], 4, 4));
    }
}
