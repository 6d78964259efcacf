//! Independent re-verification of a certificate tree.
//!
//! Nothing here calls the driver, the LP solver or the family code: factor
//! lists, unit roots, specializations and Farkas combinations are recomputed
//! from the raw bracket data, and every child is compared against the node it
//! must be.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};

use super::certify::{CertNode, Certificate, Fixed, Rule};
use crate::linalg::{rat, Rat};
use crate::lp::{Constraint, Farkas, Rel};

/// `(γ, a, b)` with `a < b` and `γ ≠ 0`.
type Term = (Vec<i64>, i64, i64);

/// Checks every rule application and every parent/child relation.
pub fn check_certificate(cert: &Certificate) -> Result<(), String> {
    let r = cert.family.r;
    let terms: Vec<Term> = cert
        .family
        .terms
        .iter()
        .filter(|t| t.a < t.b && t.gamma.iter().any(|&g| g > 0))
        .map(|t| (t.gamma.iter().map(|&g| g as i64).collect(), t.a, t.b))
        .collect();
    if terms.iter().any(|t| t.0.len() != r) {
        return Err("term arity differs from r".into());
    }
    let expected = Expect {
        vars: (0..r).collect(),
        fixed: Vec::new(),
        constraints: Vec::new(),
        theta: rat(-(r as i64)),
        flag: true,
    };
    let mut ck = Checker { root_terms: &terms, r };
    ck.node(&cert.root, &expected, "root")
}

#[derive(Clone)]
struct Expect {
    vars: Vec<usize>,
    fixed: Vec<Fixed>,
    constraints: Vec<Constraint>,
    theta: Rat,
    flag: bool,
}

struct Checker<'a> {
    root_terms: &'a [Term],
    r: usize,
}

fn ensure(cond: bool, at: &str, what: &str) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(format!("{at}: {what}"))
    }
}

fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Own Farkas verification.
fn farkas_ok(rows: &[Constraint], n: usize, f: &Farkas) -> bool {
    if f.multipliers.len() != rows.len() {
        return false;
    }
    let mut combo = vec![rat(0); n];
    let mut rhs = rat(0);
    let mut strict = false;
    for (y, c) in f.multipliers.iter().zip(rows) {
        if c.coeffs.len() != n || (c.rel != Rel::Eq && y.is_negative()) {
            return false;
        }
        if y.is_zero() {
            continue;
        }
        for (s, a) in combo.iter_mut().zip(&c.coeffs) {
            *s += y * a;
        }
        rhs += y * &c.rhs;
        strict |= c.rel == Rel::Lt;
    }
    combo.iter().all(Zero::is_zero) && (rhs.is_negative() || (rhs.is_zero() && strict))
}

fn unit(n: usize, i: usize) -> Vec<Rat> {
    (0..n).map(|k| rat((k == i) as i64)).collect()
}

fn support(g: &[i64]) -> usize {
    g.iter().filter(|&&x| x != 0).count()
}

/// Root hyperplanes `(coeffs, rhs)` of `b_c`, primitive and sorted.
fn roots(terms: &[Term], c: &[i64]) -> Vec<(Vec<i64>, Rat)> {
    let mut out = BTreeSet::new();
    for (g, a, b) in terms {
        let d: i64 = g.iter().zip(c).map(|(x, y)| x * y.max(&0)).sum();
        if d == 0 {
            continue;
        }
        let shift: i64 = g.iter().zip(c).map(|(x, y)| x * y.min(&0)).sum();
        let div = g.iter().fold(0i64, |acc, &x| gcd(acc, x));
        for i in a + 1..=*b {
            for j in 0..d {
                let coeffs: Vec<i64> = g.iter().map(|x| x / div).collect();
                out.insert((coeffs, rat(-(shift + i + j)) / rat(div)));
            }
        }
    }
    for (i, &ci) in c.iter().enumerate() {
        for v in 0..(-ci).max(0) {
            let coeffs = (0..c.len()).map(|k| (k == i) as i64).collect();
            out.insert((coeffs, rat(v)));
        }
    }
    out.into_iter().collect()
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn unit_values(terms: &[Term], i: usize) -> Vec<Rat> {
    let mut out = BTreeSet::new();
    for (g, a, b) in terms {
        if support(g) == 1 && g[i] > 0 {
            for t in a + 1..b + g[i] {
                out.insert(rat(-t) / rat(g[i]));
            }
        }
    }
    out.into_iter().collect()
}

/// Specializes variable `i` to `v`; `None` when a shift is not integral.
fn specialize(terms: &[Term], i: usize, v: &Rat) -> Option<Vec<Term>> {
    let mut out = Vec::new();
    for (g, a, b) in terms {
        let shift = rat(g[i]) * v;
        if !shift.is_integer() {
            return None;
        }
        let s: i64 = shift.to_integer().try_into().ok()?;
        let mut g2 = g.clone();
        g2.remove(i);
        if g2.iter().any(|&x| x > 0) {
            out.push((g2, a + s, b + s));
        }
    }
    Some(out)
}

fn substitute(c: &Constraint, i: usize, v: &Rat) -> Constraint {
    let mut coeffs = c.coeffs.clone();
    let a = coeffs.remove(i);
    Constraint { coeffs, rel: c.rel, rhs: &c.rhs - a * v }
}

impl Checker<'_> {
    /// Bracket data at a node: the root family specialized in order.
    fn family_at(&self, fixed: &[Fixed]) -> Option<Vec<Term>> {
        let mut terms = self.root_terms.to_vec();
        let mut vars: Vec<usize> = (0..self.r).collect();
        for f in fixed {
            let i = vars.iter().position(|&v| v == f.var)?;
            terms = specialize(&terms, i, &f.value)?;
            vars.remove(i);
        }
        Some(terms)
    }

    fn fix_child(&self, e: &Expect, terms: &[Term], rows: &[Constraint], i: usize, v: &Rat) -> Expect {
        let n = e.vars.len();
        if specialize(terms, i, v).is_some() {
            let mut vars = e.vars.clone();
            let var = vars.remove(i);
            let mut fixed = e.fixed.clone();
            fixed.push(Fixed { var, value: v.clone() });
            Expect {
                vars,
                fixed,
                constraints: rows.iter().map(|c| substitute(c, i, v)).collect(),
                theta: &e.theta - v,
                flag: e.flag && *v == rat(-1),
            }
        } else {
            let mut constraints = rows.to_vec();
            constraints.push(Constraint { coeffs: unit(n, i), rel: Rel::Eq, rhs: v.clone() });
            Expect { constraints, ..e.clone() }
        }
    }

    fn hyperplane_child(&self, e: &Expect, terms: &[Term], rows: &[Constraint], h: &(Vec<i64>, Rat)) -> Expect {
        if support(&h.0) == 1 {
            let i = h.0.iter().position(|&x| x != 0).expect("support one");
            return self.fix_child(e, terms, rows, i, &(&h.1 / rat(h.0[i])));
        }
        let mut constraints = rows.to_vec();
        constraints.push(Constraint { coeffs: h.0.iter().map(|&x| rat(x)).collect(), rel: Rel::Eq, rhs: h.1.clone() });
        Expect { constraints, ..e.clone() }
    }

    fn node(&mut self, node: &CertNode, e: &Expect, at: &str) -> Result<(), String> {
        ensure(node.vars == e.vars, at, "free variables differ")?;
        ensure(node.fixed == e.fixed, at, "fixed values differ")?;
        ensure(node.constraints == e.constraints, at, "constraints differ")?;
        ensure(node.theta == e.theta, at, "threshold differs")?;
        ensure(node.all_minus_one == e.flag, at, "flag differs")?;
        let n = e.vars.len();
        let terms = self.family_at(&e.fixed).ok_or_else(|| format!("{at}: fixed values cannot be specialized"))?;
        let mut with_threshold = e.constraints.clone();
        with_threshold.push(Constraint { coeffs: vec![rat(-1); n], rel: Rel::Le, rhs: -e.theta.clone() });
        let p = &with_threshold;
        let mut expected_children: Vec<Expect> = Vec::new();
        match &node.rule {
            Rule::Empty { farkas } => ensure(farkas_ok(&e.constraints, n, farkas), at, "bad Farkas certificate for P")?,
            Rule::Settled => ensure(
                n == 0 && (e.theta.is_positive() || (e.flag && e.theta.is_zero())),
                at,
                "settled node is not settled",
            )?,
            Rule::PointOutside { c } => {
                ensure(n == 0, at, "point rule with free variables")?;
                ensure(c.len() == self.r && c.iter().sum::<i64>() == 1, at, "bad generator index")?;
                let mut z = vec![rat(0); self.r];
                for f in &e.fixed {
                    z[f.var] = f.value.clone();
                }
                let hit = roots(self.root_terms, c)
                    .iter()
                    .any(|(g, rhs)| dot(&g.iter().map(|&x| rat(x)).collect::<Vec<_>>(), &z) == *rhs);
                ensure(!hit, at, "generator vanishes at the point")?;
            }
            Rule::BelowThreshold { farkas } => ensure(farkas_ok(p, n, farkas), at, "bad Farkas certificate for the threshold")?,
            Rule::AllMinusOne { above, below } => {
                ensure(e.flag && above.len() == n && below.len() == n, at, "malformed all-minus-one rule")?;
                for i in 0..n {
                    let mut s = p.clone();
                    s.push(Constraint { coeffs: unit(n, i).iter().map(|x| -x).collect(), rel: Rel::Lt, rhs: rat(1) });
                    ensure(farkas_ok(&s, n, &above[i]), at, "z_i > -1 not excluded")?;
                    let mut s = p.clone();
                    s.push(Constraint { coeffs: unit(n, i), rel: Rel::Lt, rhs: rat(-1) });
                    ensure(farkas_ok(&s, n, &below[i]), at, "z_i < -1 not excluded")?;
                }
            }
            Rule::NonVanishing { c, farkas } => {
                ensure(c.len() == n && c.iter().sum::<i64>() == 1, at, "bad generator index")?;
                let hs = roots(&terms, c);
                ensure(hs.len() == farkas.len(), at, "one certificate per root hyperplane expected")?;
                for (h, f) in hs.iter().zip(farkas) {
                    let mut s = p.clone();
                    s.push(Constraint { coeffs: h.0.iter().map(|&x| rat(x)).collect(), rel: Rel::Eq, rhs: h.1.clone() });
                    ensure(farkas_ok(&s, n, f), at, "a root hyperplane meets P")?;
                }
            }
            Rule::ReducA { set, u } => {
                let distinct: BTreeSet<usize> = set.iter().copied().collect();
                ensure(!set.is_empty() && distinct.len() == set.len() && set.iter().all(|&i| i < n), at, "bad index set")?;
                let lists: Vec<Vec<(Vec<i64>, i64)>> = set
                    .iter()
                    .map(|&i| {
                        let s: BTreeSet<(Vec<i64>, i64)> =
                            terms.iter().filter(|(g, _, _)| support(g) > 1 && g[i] > 0).map(|(g, a, _)| (g.clone(), *a)).collect();
                        s.into_iter().collect()
                    })
                    .collect();
                let mut tuples: Vec<Vec<(Vec<i64>, i64)>> = vec![vec![]];
                for l in &lists {
                    tuples = tuples
                        .iter()
                        .flat_map(|pre| {
                            l.iter().map(move |x| {
                                let mut t = pre.clone();
                                if !t.contains(x) {
                                    t.push(x.clone());
                                }
                                t
                            })
                        })
                        .collect();
                }
                ensure(tuples.len() == u.len(), at, "one multiplier vector per tuple expected")?;
                for (tuple, w) in tuples.iter().zip(u) {
                    ensure(w.len() == tuple.len() && w.iter().all(|x| !x.is_negative()), at, "bad multipliers")?;
                    for x in 0..n {
                        let s: Rat = tuple.iter().zip(w).map(|((g, _), wi)| rat(g[x]) * wi).sum();
                        ensure(s == rat(1), at, "multipliers do not sum to e")?;
                    }
                    let weight: Rat = tuple.iter().zip(w).map(|((_, a), wi)| rat(a + 1) * wi).sum();
                    ensure(weight > -e.theta.clone(), at, "weight does not clear the threshold")?;
                }
                for &i in set {
                    for v in unit_values(&terms, i) {
                        expected_children.push(self.fix_child(e, &terms, p, i, &v));
                    }
                }
            }
            Rule::ReducB { j, y, signs } => {
                ensure(y.len() == n && j.iter().all(|&x| x < n), at, "bad separating vector")?;
                ensure(j.iter().all(|&x| y[x].is_zero()), at, "y does not vanish on J")?;
                ensure(y.iter().sum::<Rat>() >= rat(1), at, "y·e < 1")?;
                let gammas: Vec<Vec<i64>> = terms
                    .iter()
                    .filter(|(g, _, _)| support(g) > 1)
                    .map(|(g, _, _)| g.clone())
                    .collect::<BTreeSet<_>>()
                    .into_iter()
                    .collect();
                for g in &gammas {
                    if (0..n).any(|x| g[x] > 0 && !j.contains(&x)) {
                        let v: Rat = g.iter().zip(y).map(|(&a, b)| rat(a) * b).sum();
                        ensure(v <= rat(-1), at, "y does not separate a bracket")?;
                    }
                }
                let outside: Vec<usize> = (0..n).filter(|x| !j.contains(x)).collect();
                ensure(signs.iter().map(|s| s.index).collect::<Vec<_>>() == outside, at, "signs must cover the complement of J")?;
                let mut rows = p.clone();
                for s in signs {
                    ensure(s.lambda.len() == gammas.len() && s.mu.len() == j.len(), at, "malformed sign certificate")?;
                    ensure(s.lambda.iter().all(|l| !l.is_negative()), at, "negative cone coefficient")?;
                    ensure(if s.positive { s.nu.is_positive() } else { s.nu.is_negative() }, at, "sign of nu")?;
                    for x in 0..n {
                        let mut v: Rat = gammas.iter().zip(&s.lambda).map(|(g, l)| rat(g[x]) * l).sum();
                        for (jj, m) in j.iter().zip(&s.mu) {
                            if *jj == x {
                                v += m;
                            }
                        }
                        if s.index == x {
                            v += &s.nu;
                        }
                        ensure(v == rat(1), at, "sign certificate does not represent e")?;
                    }
                    let i = s.index;
                    let cond = if s.positive {
                        let rho = terms
                            .iter()
                            .filter(|(g, _, _)| support(g) == 1 && g[i] > 0)
                            .map(|(g, a, _)| rat(a + 1) / rat(g[i]))
                            .min();
                        rho.map(|rho| {
                            (
                                Constraint { coeffs: unit(n, i), rel: Rel::Le, rhs: -rho.clone() },
                                Constraint { coeffs: unit(n, i).iter().map(|x| -x).collect(), rel: Rel::Lt, rhs: rho },
                            )
                        })
                    } else {
                        Some((
                            Constraint { coeffs: unit(n, i).iter().map(|x| -x).collect(), rel: Rel::Le, rhs: rat(0) },
                            Constraint { coeffs: unit(n, i), rel: Rel::Lt, rhs: rat(0) },
                        ))
                    };
                    if let Some((c, neg)) = cond {
                        let mut child = rows.clone();
                        child.push(c);
                        expected_children.push(Expect { constraints: child, ..e.clone() });
                        rows.push(neg);
                    }
                }
            }
            Rule::Split { c } => {
                ensure(c.len() == n && c.iter().sum::<i64>() == 1, at, "bad generator index")?;
                for h in roots(&terms, c) {
                    expected_children.push(self.hyperplane_child(e, &terms, p, &h));
                }
            }
        }
        ensure(node.children.len() == expected_children.len(), at, "wrong number of children")?;
        for (k, (child, exp)) in node.children.iter().zip(&expected_children).enumerate() {
            self.node(child, exp, &format!("{at}/{k}"))?;
        }
        Ok(())
    }
}
