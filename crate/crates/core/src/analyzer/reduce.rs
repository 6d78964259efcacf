//! The two reductions for Z(B̃), as exact LP problems.
//!
//! (a) If for every choice of one non-unit bracket per variable in `I` the
//! vector `e` is a nonnegative combination `Σ u γ` with `Σ u (a+1)` above the
//! threshold, every bad point has some `z_i` (`i ∈ I`) at a root of the unit
//! brackets of `b_{e^i}`.
//!
//! (b) If `e` is separated from the cone `E_J` and every index outside `J`
//! gets a sign, every point of Z(B̃) has a negative `z_i` (`i ∈ J₊`) or a
//! nonnegative integer `z_i` (`i ∈ J₋`).

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::bfunction::BFunctionFamily;
use crate::linalg::{rat, Rat};
use crate::lp::{Constraint, Outcome, System};

/// A non-unit bracket as seen by reduction (a): its `γ` and lower index `a`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GammaA {
    pub gamma: Vec<u32>,
    pub a: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TupleCert {
    pub tuple: Vec<GammaA>,
    #[serde(with = "crate::linalg::serde_rat_vec")]
    pub u: Vec<Rat>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReducA {
    Applies { certificates: Vec<TupleCert> },
    Fails { tuple: Vec<GammaA> },
}

/// `e = Σ λ γ + Σ μ_j e^j + ν e^i` with the sign of `ν` deciding `J₊`/`J₋`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignCert {
    pub index: usize,
    pub positive: bool,
    #[serde(with = "crate::linalg::serde_rat_vec")]
    pub lambda: Vec<Rat>,
    #[serde(with = "crate::linalg::serde_rat_vec")]
    pub mu: Vec<Rat>,
    #[serde(with = "crate::linalg::serde_rat")]
    pub nu: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReducB {
    pub j: Vec<usize>,
    pub j_plus: Vec<usize>,
    pub j_minus: Vec<usize>,
    /// `y_J = 0`, `y·γ ≤ −1` for `γ ∈ Γ` not supported in `J`, `y·e ≥ 1`.
    #[serde(with = "crate::linalg::serde_rat_vec")]
    pub y: Vec<Rat>,
    pub signs: Vec<SignCert>,
}

pub(crate) fn gammas_for(family: &BFunctionFamily, i: usize) -> Vec<GammaA> {
    let set: BTreeSet<GammaA> = family
        .terms
        .iter()
        .filter(|t| t.unit_variable().is_none() && t.gamma[i] > 0)
        .map(|t| GammaA { gamma: t.gamma.clone(), a: t.a })
        .collect();
    set.into_iter().collect()
}

/// Distinct non-unit `γ`, sorted.
pub(crate) fn non_unit_gammas(family: &BFunctionFamily) -> Vec<Vec<u32>> {
    let set: BTreeSet<Vec<u32>> =
        family.terms.iter().filter(|t| t.unit_variable().is_none()).map(|t| t.gamma.clone()).collect();
    set.into_iter().collect()
}

/// Roots `v` of the unit brackets of `b_{e^i}` (`γ_i v + t = 0`, `a < t < b + γ_i`).
pub(crate) fn unit_roots(family: &BFunctionFamily, i: usize) -> Vec<Rat> {
    let mut set = BTreeSet::new();
    for t in family.terms.iter().filter(|t| t.unit_variable() == Some(i)) {
        let g = t.gamma[i] as i64;
        for s in t.a + 1..t.b + g {
            set.insert(-rat(s) / rat(g));
        }
    }
    set.into_iter().collect()
}

/// Every tuple of the product `Γ_{i₁} × … × Γ_{i_k}`, with repeated entries merged.
pub(crate) fn tuples(family: &BFunctionFamily, set: &[usize]) -> Vec<Vec<GammaA>> {
    let lists: Vec<Vec<GammaA>> = set.iter().map(|&i| gammas_for(family, i)).collect();
    let mut out = vec![Vec::new()];
    for l in &lists {
        let mut next = Vec::new();
        for prefix in &out {
            for g in l {
                let mut p: Vec<GammaA> = prefix.clone();
                p.push(g.clone());
                next.push(p);
            }
        }
        out = next;
    }
    out.into_iter()
        .map(|t| {
            let mut seen = Vec::new();
            for g in t {
                if !seen.contains(&g) {
                    seen.push(g);
                }
            }
            seen
        })
        .collect()
}

/// `u ≥ 0`, `Σ u γ = e`, `Σ u (a+1) > bound`.
fn tuple_lp(tuple: &[GammaA], r: usize, bound: &Rat) -> Option<Vec<Rat>> {
    let k = tuple.len();
    let mut sys = System::new(k);
    for j in 0..k {
        let mut row = vec![rat(0); k];
        row[j] = rat(1);
        sys.push(Constraint::ge(&row, rat(0)));
    }
    for x in 0..r {
        let row: Vec<Rat> = tuple.iter().map(|g| rat(g.gamma[x] as i64)).collect();
        sys.push(Constraint::eq(&row, rat(1)));
    }
    let weights: Vec<Rat> = tuple.iter().map(|g| rat(g.a + 1)).collect();
    sys.push(Constraint::gt(&weights, bound.clone()));
    match sys.solve() {
        Outcome::Feasible(u) => Some(u),
        Outcome::Infeasible(_) => None,
    }
}

/// Reduction (a) for the 0-based variable set `set`, threshold `Σ u(a+1) > bound`.
pub(crate) fn reduc_a_bound(family: &BFunctionFamily, set: &[usize], bound: &Rat) -> ReducA {
    let mut certificates = Vec::new();
    for tuple in tuples(family, set) {
        match tuple_lp(&tuple, family.r, bound) {
            Some(u) => certificates.push(TupleCert { tuple, u }),
            None => return ReducA::Fails { tuple },
        }
    }
    ReducA::Applies { certificates }
}

/// Reduction (a) with the threshold `r` (0-based variable indices).
pub fn reduc_a(family: &BFunctionFamily, set: &[usize]) -> ReducA {
    reduc_a_bound(family, set, &rat(family.r as i64))
}

fn separating_vector(gammas: &[Vec<u32>], j: &[usize], r: usize) -> Option<Vec<Rat>> {
    let mut sys = System::new(r);
    for &x in j {
        let mut row = vec![rat(0); r];
        row[x] = rat(1);
        sys.push(Constraint::eq(&row, rat(0)));
    }
    for g in gammas {
        if (0..r).any(|x| g[x] > 0 && !j.contains(&x)) {
            let row: Vec<Rat> = g.iter().map(|&v| rat(v as i64)).collect();
            sys.push(Constraint::le(&row, rat(-1)));
        }
    }
    sys.push(Constraint::ge(&vec![rat(1); r], rat(1)));
    match sys.solve() {
        Outcome::Feasible(y) => Some(y),
        Outcome::Infeasible(_) => None,
    }
}

fn sign_certificate(gammas: &[Vec<u32>], j: &[usize], i: usize, r: usize, positive: bool) -> Option<SignCert> {
    let (ng, nj) = (gammas.len(), j.len());
    let nv = ng + nj + 1;
    let mut sys = System::new(nv);
    for q in 0..ng {
        let mut row = vec![rat(0); nv];
        row[q] = rat(1);
        sys.push(Constraint::ge(&row, rat(0)));
    }
    for x in 0..r {
        let mut row: Vec<Rat> = gammas.iter().map(|g| rat(g[x] as i64)).collect();
        row.extend(j.iter().map(|&jj| rat((jj == x) as i64)));
        row.push(rat((i == x) as i64));
        sys.push(Constraint::eq(&row, rat(1)));
    }
    let mut nu = vec![rat(0); nv];
    nu[nv - 1] = rat(1);
    sys.push(if positive { Constraint::gt(&nu, rat(0)) } else { Constraint::lt(&nu, rat(0)) });
    match sys.solve() {
        Outcome::Feasible(x) => Some(SignCert {
            index: i,
            positive,
            lambda: x[..ng].to_vec(),
            mu: x[ng..ng + nj].to_vec(),
            nu: x[nv - 1].clone(),
        }),
        Outcome::Infeasible(_) => None,
    }
}

/// Reduction (b): the largest `J` (first in lexicographic order among those
/// of its size) separated from `e` whose complement splits into `J₊ ∪ J₋`.
/// `None` when no `J` qualifies, in particular when `e ∈ E_∅`.
pub fn reduc_b(family: &BFunctionFamily) -> Option<ReducB> {
    let r = family.r;
    let gammas = non_unit_gammas(family);
    separating_vector(&gammas, &[], r)?;
    for size in (0..r).rev() {
        for j in subsets(r, size) {
            let Some(y) = separating_vector(&gammas, &j, r) else { continue };
            let mut signs = Vec::new();
            let mut ok = true;
            for i in (0..r).filter(|i| !j.contains(i)) {
                match sign_certificate(&gammas, &j, i, r, true).or_else(|| sign_certificate(&gammas, &j, i, r, false)) {
                    Some(s) => signs.push(s),
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                let j_plus = signs.iter().filter(|s| s.positive).map(|s| s.index).collect();
                let j_minus = signs.iter().filter(|s| !s.positive).map(|s| s.index).collect();
                return Some(ReducB { j, j_plus, j_minus, y, signs });
            }
        }
    }
    None
}

/// All `size`-subsets of `0..r` in lexicographic order.
pub(crate) fn subsets(r: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, r: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for x in start..r {
            cur.push(x);
            rec(x + 1, r, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, r, size, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bfunction::BracketTerm;

    fn t(g: &[u32], a: i64, b: i64) -> BracketTerm {
        BracketTerm::new(g.to_vec(), a, b)
    }

    fn first(n: i64, m: i64) -> BFunctionFamily {
        BFunctionFamily::new(
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
        )
    }

    #[test]
    fn reduction_a_on_the_e6_family() {
        let ReducA::Applies { certificates } = reduc_a(&first(2, 2), &[0, 1]) else { panic!() };
        assert_eq!(certificates.len(), 1);
        assert_eq!(certificates[0].u, vec![rat(1), rat(1)]);
        assert_eq!(unit_roots(&first(2, 2), 0), (1..=4).rev().map(|k| rat(-k)).collect::<Vec<_>>());
    }

    #[test]
    fn reduction_a_fails_on_the_e8_family() {
        let f = BFunctionFamily::new(2, vec![t(&[0, 1], 0, 4), t(&[1, 0], 0, 1), t(&[1, 1], 1, 4), t(&[1, 2], 4, 7)]);
        match reduc_a(&f, &[0]) {
            ReducA::Fails { tuple } => assert_eq!(tuple, vec![GammaA { gamma: vec![1, 1], a: 1 }]),
            other => panic!("{other:?}"),
        }
        assert_eq!(reduc_b(&f), None);
    }

    #[test]
    fn reduction_b_after_one_specialization() {
        // the paper's b₁: s₁ = −k₁ in the E6 family
        let b1 = first(2, 2).specialize(0, -1);
        let rb = reduc_b(&b1).unwrap();
        assert!(rb.j.is_empty());
        assert_eq!(rb.j_plus, vec![0, 2]);
        assert_eq!(rb.j_minus, vec![1]);
    }

    #[test]
    fn reduction_b_without_gammas() {
        let f = BFunctionFamily::new(3, vec![t(&[1, 0, 0], 0, 2), t(&[0, 1, 0], 0, 2), t(&[0, 0, 1], 0, 2)]);
        let rb = reduc_b(&f).unwrap();
        assert_eq!(rb.j.len(), 2);
        assert_eq!(rb.j_plus.len(), 1);
    }
}
