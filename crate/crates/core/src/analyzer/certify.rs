//! Case analysis proving that every point of Z(B̃) is good.
//!
//! A node describes the bad points still to be ruled out: the free variables,
//! the values of the variables fixed so far (by specializing the family), a
//! polyhedron on the free variables, the remaining threshold `θ` (bad means
//! `e·z ≥ θ` on the free part) and whether every fixed value is `−1`.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::reduce::{reduc_a_bound, subsets, unit_roots, ReducA, SignCert as LemmaSign};
use super::{generator_bc, generator_indices, is_good, membership_in_ztilde, Hyperplane, MemberProof, Membership};
use crate::bfunction::BFunctionFamily;
use crate::linalg::{rat, Rat};
use crate::lp::{Constraint, Farkas, Outcome, System};

pub use super::reduce::SignCert;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fixed {
    pub var: usize,
    #[serde(with = "crate::linalg::serde_rat")]
    pub value: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Rule {
    /// The polyhedron is empty.
    Empty { farkas: Farkas },
    /// Nothing is free and `θ > 0`, or `θ = 0` with every value `−1`.
    Settled,
    /// Nothing is free and the original generator `b_c` is nonzero at the point.
    PointOutside { c: Vec<i64> },
    /// The polyhedron misses `e·z ≥ θ`.
    BelowThreshold { farkas: Farkas },
    /// Every value is `−1` and the polyhedron forces `z_i = −1` for each free `i`.
    AllMinusOne { above: Vec<Farkas>, below: Vec<Farkas> },
    /// No root hyperplane of `b_c` meets the polyhedron.
    NonVanishing { c: Vec<i64>, farkas: Vec<Farkas> },
    /// Reduction (a); children fix `z_i` to each unit root, `i` in `set` order.
    ReducA {
        set: Vec<usize>,
        #[serde(with = "rat_matrix")]
        u: Vec<Vec<Rat>>,
    },
    /// Reduction (b); child `k` adds the negations of conditions `0..k` and condition `k`.
    ReducB {
        j: Vec<usize>,
        #[serde(with = "crate::linalg::serde_rat_vec")]
        y: Vec<Rat>,
        signs: Vec<LemmaSign>,
    },
    /// `b_c` must vanish: one child per root hyperplane.
    Split { c: Vec<i64> },
}

mod rat_matrix {
    use crate::linalg::{parse_rat, Rat};
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &[Vec<Rat>], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(m.iter().map(|row| row.iter().map(|x| x.to_string()).collect::<Vec<_>>()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Rat>>, D::Error> {
        Vec::<Vec<String>>::deserialize(d)?
            .iter()
            .map(|row| row.iter().map(|s| parse_rat(s).ok_or_else(|| D::Error::custom(format!("bad rational {s:?}")))).collect())
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertNode {
    pub vars: Vec<usize>,
    pub fixed: Vec<Fixed>,
    pub constraints: Vec<Constraint>,
    #[serde(with = "crate::linalg::serde_rat")]
    pub theta: Rat,
    pub all_minus_one: bool,
    #[serde(flatten)]
    pub rule: Rule,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<CertNode>,
}

impl CertNode {
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(CertNode::size).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(CertNode::depth).max().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub family: BFunctionFamily,
    pub root: CertNode,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Refutation {
    #[serde(with = "crate::linalg::serde_rat_vec")]
    pub z: Vec<Rat>,
    pub proof: MemberProof,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertifyOutcome {
    Certified(Certificate),
    Refuted(Refutation),
    Inconclusive(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CertifyOptions {
    pub depth_bound: usize,
    /// Generators `c` with `|c_i| ≤ generator_bound` are tried at stuck nodes.
    pub generator_bound: i64,
    /// Box for membership tests of sample points when `r > 2`.
    pub box_bound: i64,
    pub node_limit: usize,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions { depth_bound: 40, generator_bound: 3, box_bound: 4, node_limit: 200_000 }
    }
}

enum Failure {
    Refuted(Refutation),
    Inconclusive(String),
}

#[derive(Clone)]
struct State {
    family: BFunctionFamily,
    vars: Vec<usize>,
    fixed: Vec<Fixed>,
    sys: System,
    theta: Rat,
    flag: bool,
    depth: usize,
}

impl State {
    fn node(&self, rule: Rule, children: Vec<CertNode>) -> CertNode {
        CertNode {
            vars: self.vars.clone(),
            fixed: self.fixed.clone(),
            constraints: self.sys.rows.clone(),
            theta: self.theta.clone(),
            all_minus_one: self.flag,
            rule,
            children,
        }
    }

    fn r(&self) -> usize {
        self.vars.len()
    }

    /// Child fixing the free variable `i` to `v`: specialized when every
    /// shift stays integral, otherwise recorded as an equality.
    fn fix(&self, sys: &System, i: usize, v: &Rat) -> State {
        match self.family.specialize_rational(i, v) {
            Some(family) => {
                let mut vars = self.vars.clone();
                let var = vars.remove(i);
                let mut fixed = self.fixed.clone();
                fixed.push(Fixed { var, value: v.clone() });
                let rows = sys.rows.iter().map(|c| c.substitute(i, v)).collect();
                State {
                    family,
                    vars,
                    fixed,
                    sys: System::from_rows(self.r() - 1, rows),
                    theta: &self.theta - v,
                    flag: self.flag && *v == rat(-1),
                    depth: self.depth + 1,
                }
            }
            None => {
                let mut row = vec![rat(0); self.r()];
                row[i] = rat(1);
                self.with_sys(sys.with(Constraint::eq(&row, v.clone())))
            }
        }
    }

    fn with_sys(&self, sys: System) -> State {
        State { sys, depth: self.depth + 1, ..self.clone() }
    }

    fn on_hyperplane(&self, sys: &System, h: &Hyperplane) -> State {
        match h.fixes() {
            Some((i, v)) => self.fix(sys, i, &v),
            None => self.with_sys(sys.with(h.as_constraint())),
        }
    }
}

pub(crate) fn threshold_row(r: usize, theta: &Rat) -> Constraint {
    Constraint::ge(&vec![rat(1); r], theta.clone())
}

fn unit_row(r: usize, i: usize) -> Vec<Rat> {
    let mut row = vec![rat(0); r];
    row[i] = rat(1);
    row
}

fn farkas_of(sys: &System) -> Option<Farkas> {
    match sys.solve() {
        Outcome::Infeasible(f) => Some(f),
        Outcome::Feasible(_) => None,
    }
}

/// `P ⊆ h`: both open sides of `h` miss `P`.
fn contained_in(sys: &System, h: &Hyperplane) -> bool {
    let row: Vec<Rat> = h.coeffs.iter().map(|&c| rat(c)).collect();
    !sys.with(Constraint::lt(&row, h.rhs.clone())).feasible() && !sys.with(Constraint::gt(&row, h.rhs.clone())).feasible()
}

struct Driver<'a> {
    root: &'a BFunctionFamily,
    opts: CertifyOptions,
    nodes: usize,
}

/// Tries to prove that every point of Z(B̃) for `family` is good.
pub fn certify_all_good(family: &BFunctionFamily, opts: CertifyOptions) -> CertifyOutcome {
    let r = family.r;
    if r == 0 {
        return CertifyOutcome::Inconclusive("family without variables".into());
    }
    let start = State {
        family: BFunctionFamily { meta: None, ..family.clone() },
        vars: (0..r).collect(),
        fixed: Vec::new(),
        sys: System::new(r),
        theta: rat(-(r as i64)),
        flag: true,
        depth: 0,
    };
    let mut d = Driver { root: family, opts, nodes: 0 };
    match d.solve(start) {
        Ok(root) => CertifyOutcome::Certified(Certificate { family: BFunctionFamily { meta: None, ..family.clone() }, root }),
        Err(Failure::Refuted(r)) => CertifyOutcome::Refuted(r),
        Err(Failure::Inconclusive(why)) => CertifyOutcome::Inconclusive(why),
    }
}

impl Driver<'_> {
    fn solve(&mut self, st: State) -> Result<CertNode, Failure> {
        self.nodes += 1;
        if self.nodes > self.opts.node_limit {
            return Err(Failure::Inconclusive(format!("node limit {} reached", self.opts.node_limit)));
        }
        if let Some(f) = farkas_of(&st.sys) {
            return Ok(st.node(Rule::Empty { farkas: f }, vec![]));
        }
        let r = st.r();
        if r == 0 {
            return self.closed_point(&st);
        }
        let sys = st.sys.with(threshold_row(r, &st.theta));
        if let Some(f) = farkas_of(&sys) {
            return Ok(st.node(Rule::BelowThreshold { farkas: f }, vec![]));
        }
        if st.flag {
            if let Some(rule) = all_minus_one(&sys, r) {
                return Ok(st.node(rule, vec![]));
            }
        }
        if st.depth >= self.opts.depth_bound {
            return Err(Failure::Inconclusive(format!("depth bound {} reached", self.opts.depth_bound)));
        }

        // b_{e^i} with no root on P
        let mut unit_gens = Vec::new();
        for i in 0..r {
            let c: Vec<i64> = (0..r).map(|x| (x == i) as i64).collect();
            let hs = generator_bc(&st.family, &c).expect("valid index").hyperplanes();
            if let Some(farkas) = all_infeasible(&sys, &hs) {
                return Ok(st.node(Rule::NonVanishing { c, farkas }, vec![]));
            }
            unit_gens.push((c, hs));
        }

        if let Some(node) = self.try_reduc_a(&st, &sys)? {
            return Ok(node);
        }
        if let Some(node) = self.try_reduc_b(&st, &sys)? {
            return Ok(node);
        }

        // split on the b_{e^i} with fewest live roots
        let mut best: Option<(usize, Vec<i64>, Vec<Hyperplane>)> = None;
        for (c, hs) in unit_gens {
            if let Some(live) = live_count(&sys, &hs) {
                if best.as_ref().map_or(true, |(n, _, _)| live < *n) {
                    best = Some((live, c, hs));
                }
            }
        }
        if let Some((_, c, hs)) = best {
            return self.split(&st, &sys, c, &hs);
        }

        // other generators
        let mut best: Option<(usize, Vec<i64>, Vec<Hyperplane>)> = None;
        for c in generator_indices(r, self.opts.generator_bound) {
            if c.iter().filter(|&&x| x != 0).count() == 1 {
                continue;
            }
            let hs = generator_bc(&st.family, &c).expect("valid index").hyperplanes();
            if let Some(farkas) = all_infeasible(&sys, &hs) {
                return Ok(st.node(Rule::NonVanishing { c, farkas }, vec![]));
            }
            if let Some(live) = live_count(&sys, &hs) {
                if best.as_ref().map_or(true, |(n, _, _)| live < *n) {
                    best = Some((live, c, hs));
                }
            }
        }
        if let Some((_, c, hs)) = best {
            return self.split(&st, &sys, c, &hs);
        }
        self.stuck(&st, &sys)
    }

    fn split(&mut self, st: &State, sys: &System, c: Vec<i64>, hs: &[Hyperplane]) -> Result<CertNode, Failure> {
        let mut children = Vec::with_capacity(hs.len());
        for h in hs {
            children.push(self.solve(st.on_hyperplane(sys, h))?);
        }
        Ok(st.node(Rule::Split { c }, children))
    }

    fn try_reduc_a(&mut self, st: &State, sys: &System) -> Result<Option<CertNode>, Failure> {
        let r = st.r();
        // variables already determined by P are left to the other rules
        let pinned: Vec<bool> = match sys.solve() {
            Outcome::Feasible(x) => (0..r)
                .map(|i| {
                    let h = Hyperplane { coeffs: (0..r).map(|k| (k == i) as i64).collect(), rhs: x[i].clone() };
                    contained_in(sys, &h)
                })
                .collect(),
            Outcome::Infeasible(_) => vec![true; r],
        };
        let bound = -&st.theta;
        let mut best: Option<(usize, Vec<usize>, Vec<Vec<Rat>>)> = None;
        for size in 1..=r {
            for set in subsets(r, size) {
                if set.iter().any(|&i| pinned[i]) {
                    continue;
                }
                let cost: usize = set.iter().map(|&i| unit_roots(&st.family, i).len()).sum();
                if best.as_ref().is_some_and(|(b, _, _)| cost >= *b) {
                    continue;
                }
                if let ReducA::Applies { certificates } = reduc_a_bound(&st.family, &set, &bound) {
                    best = Some((cost, set, certificates.into_iter().map(|t| t.u).collect()));
                }
            }
        }
        let Some((_, set, u)) = best else { return Ok(None) };
        let mut children = Vec::new();
        for &i in &set {
            for v in unit_roots(&st.family, i) {
                children.push(self.solve(st.fix(sys, i, &v))?);
            }
        }
        Ok(Some(st.node(Rule::ReducA { set, u }, children)))
    }

    fn try_reduc_b(&mut self, st: &State, sys: &System) -> Result<Option<CertNode>, Failure> {
        let Some(rb) = super::reduce::reduc_b(&st.family) else { return Ok(None) };
        let conds = reduc_b_conditions(&st.family, &rb.signs);
        if conds.iter().any(|(_, neg)| !sys.with(neg.clone()).feasible()) {
            return Ok(None);
        }
        let mut children = Vec::new();
        let mut acc = sys.clone();
        for (cond, neg) in &conds {
            children.push(self.solve(st.with_sys(acc.with(cond.clone())))?);
            acc = acc.with(neg.clone());
        }
        Ok(Some(st.node(Rule::ReducB { j: rb.j, y: rb.y, signs: rb.signs }, children)))
    }

    /// All variables fixed.
    fn closed_point(&mut self, st: &State) -> Result<CertNode, Failure> {
        if st.theta.is_positive() || (st.flag && st.theta.is_zero()) {
            return Ok(st.node(Rule::Settled, vec![]));
        }
        let z = full_point(self.root.r, &st.fixed, &st.vars, &[]);
        self.judge_point(st, z)
    }

    fn judge_point(&mut self, st: &State, z: Vec<Rat>) -> Result<CertNode, Failure> {
        let membership = membership_in_ztilde(self.root, &z, self.opts.box_bound).expect("arity matches");
        match membership {
            Membership::NonMember { c } if st.r() == 0 => Ok(st.node(Rule::PointOutside { c }, vec![])),
            Membership::Member(proof) if !is_good(&z) => Err(Failure::Refuted(Refutation { z, proof })),
            other => Err(Failure::Inconclusive(format!(
                "no rule applies at the node with fixed {:?}; sample {:?}: {other:?}",
                st.fixed.iter().map(|f| (f.var + 1, f.value.to_string())).collect::<Vec<_>>(),
                z.iter().map(|v| v.to_string()).collect::<Vec<_>>()
            ))),
        }
    }

    fn stuck(&mut self, st: &State, sys: &System) -> Result<CertNode, Failure> {
        let Outcome::Feasible(x) = sys.solve() else {
            unreachable!("feasibility was checked before");
        };
        let z = full_point(self.root.r, &st.fixed, &st.vars, &x);
        self.judge_point(st, z)
    }
}

/// Farkas certificates showing that no hyperplane meets `sys`.
fn all_infeasible(sys: &System, hs: &[Hyperplane]) -> Option<Vec<Farkas>> {
    hs.iter().map(|h| farkas_of(&sys.with(h.as_constraint()))).collect()
}

/// Number of hyperplanes meeting `sys`; `None` if one contains it.
fn live_count(sys: &System, hs: &[Hyperplane]) -> Option<usize> {
    let mut live = 0;
    for h in hs {
        if sys.with(h.as_constraint()).feasible() {
            if contained_in(sys, h) {
                return None;
            }
            live += 1;
        }
    }
    Some(live)
}

fn all_minus_one(sys: &System, r: usize) -> Option<Rule> {
    let mut above = Vec::new();
    let mut below = Vec::new();
    for i in 0..r {
        let row = unit_row(r, i);
        above.push(farkas_of(&sys.with(Constraint::gt(&row, rat(-1))))?);
        below.push(farkas_of(&sys.with(Constraint::lt(&row, rat(-1))))?);
    }
    Some(Rule::AllMinusOne { above, below })
}

/// `(condition, negation)` per signed index: `z_i ≤ −ρ_i` for `J₊` (skipped
/// without unit brackets in `s_i`), `z_i ≥ 0` for `J₋`.
pub(crate) fn reduc_b_conditions(family: &BFunctionFamily, signs: &[LemmaSign]) -> Vec<(Constraint, Constraint)> {
    let r = family.r;
    let mut out = Vec::new();
    for s in signs {
        let row = unit_row(r, s.index);
        if s.positive {
            let rho = family
                .terms
                .iter()
                .filter(|t| t.unit_variable() == Some(s.index))
                .map(|t| rat(t.a + 1) / rat(t.gamma[s.index] as i64))
                .min();
            if let Some(rho) = rho {
                out.push((Constraint::le(&row, -rho.clone()), Constraint::gt(&row, -rho)));
            }
        } else {
            out.push((Constraint::ge(&row, rat(0)), Constraint::lt(&row, rat(0))));
        }
    }
    out
}

/// Assembles an original-coordinate point from fixed values and free values.
pub(crate) fn full_point(r: usize, fixed: &[Fixed], vars: &[usize], free: &[Rat]) -> Vec<Rat> {
    let mut z = vec![rat(0); r];
    for f in fixed {
        z[f.var] = f.value.clone();
    }
    for (k, &v) in vars.iter().enumerate() {
        if let Some(x) = free.get(k) {
            z[v] = x.clone();
        }
    }
    z
}
