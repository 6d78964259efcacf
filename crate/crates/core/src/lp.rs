//! Exact feasibility of small systems of rational linear constraints.
//!
//! Fourier–Motzkin elimination with strict inequalities. Every derived row
//! remembers the nonnegative combination of input rows it came from, so an
//! infeasible system yields Farkas multipliers and a feasible one yields a
//! point (integer coordinates preferred) by back-substitution.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::linalg::{rat, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rel {
    Le,
    Lt,
    Eq,
}

/// `coeffs · x  rel  rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Constraint {
    #[serde(with = "crate::linalg::serde_rat_vec")]
    pub coeffs: Vec<Rat>,
    pub rel: Rel,
    #[serde(with = "crate::linalg::serde_rat")]
    pub rhs: Rat,
}

impl Constraint {
    pub fn new(coeffs: Vec<Rat>, rel: Rel, rhs: Rat) -> Self {
        Constraint { coeffs, rel, rhs }
    }

    pub fn le(coeffs: &[Rat], rhs: Rat) -> Self {
        Self::new(coeffs.to_vec(), Rel::Le, rhs)
    }

    pub fn lt(coeffs: &[Rat], rhs: Rat) -> Self {
        Self::new(coeffs.to_vec(), Rel::Lt, rhs)
    }

    pub fn ge(coeffs: &[Rat], rhs: Rat) -> Self {
        Self::new(coeffs.iter().map(|c| -c).collect(), Rel::Le, -rhs)
    }

    pub fn gt(coeffs: &[Rat], rhs: Rat) -> Self {
        Self::new(coeffs.iter().map(|c| -c).collect(), Rel::Lt, -rhs)
    }

    pub fn eq(coeffs: &[Rat], rhs: Rat) -> Self {
        Self::new(coeffs.to_vec(), Rel::Eq, rhs)
    }

    /// The strict negation of an inequality (`≤` becomes `>`, `<` becomes `≥`).
    pub fn negated(&self) -> Option<Constraint> {
        let c: Vec<Rat> = self.coeffs.iter().map(|x| -x).collect();
        match self.rel {
            Rel::Le => Some(Self::new(c, Rel::Lt, -&self.rhs)),
            Rel::Lt => Some(Self::new(c, Rel::Le, -&self.rhs)),
            Rel::Eq => None,
        }
    }

    pub fn holds_at(&self, x: &[Rat]) -> bool {
        let lhs: Rat = self.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
        match self.rel {
            Rel::Le => lhs <= self.rhs,
            Rel::Lt => lhs < self.rhs,
            Rel::Eq => lhs == self.rhs,
        }
    }

    /// Substitute `x_i = v` and drop coordinate `i`.
    pub fn substitute(&self, i: usize, v: &Rat) -> Constraint {
        let mut coeffs = self.coeffs.clone();
        let a = coeffs.remove(i);
        Constraint { coeffs, rel: self.rel, rhs: &self.rhs - a * v }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else if first { "" } else { "+" };
            let mag = c.abs();
            if mag.is_one() {
                write!(f, "{sign}z{}", i + 1)?;
            } else {
                write!(f, "{sign}{mag}z{}", i + 1)?;
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        let op = match self.rel {
            Rel::Le => "<=",
            Rel::Lt => "<",
            Rel::Eq => "=",
        };
        write!(f, " {op} {}", self.rhs)
    }
}

/// Farkas multipliers: one per input row, nonnegative on inequalities.
/// `Σ y_k a_k = 0` and either `Σ y_k b_k < 0`, or `= 0` with a positive weight
/// on a strict row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Farkas {
    #[serde(with = "crate::linalg::serde_rat_vec")]
    pub multipliers: Vec<Rat>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Feasible(Vec<Rat>),
    Infeasible(Farkas),
}

impl Outcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Outcome::Feasible(_))
    }
}

#[derive(Clone, Debug)]
struct Row {
    a: Vec<Rat>,
    b: Rat,
    rel: Rel,
    mult: Vec<Rat>,
}

impl Row {
    fn scale(&mut self, s: &Rat) {
        for x in self.a.iter_mut() {
            *x *= s;
        }
        self.b *= s;
        for y in self.mult.iter_mut() {
            *y *= s;
        }
    }

    /// `p·self + q·other`.
    fn combine(&self, p: &Rat, other: &Row, q: &Rat) -> Row {
        Row {
            a: self.a.iter().zip(&other.a).map(|(x, y)| p * x + q * y).collect(),
            b: p * &self.b + q * &other.b,
            rel: if self.rel == Rel::Lt || other.rel == Rel::Lt { Rel::Lt } else { Rel::Le },
            mult: self.mult.iter().zip(&other.mult).map(|(x, y)| p * x + q * y).collect(),
        }
    }

    /// Scale to a primitive integer coefficient vector (positive factor).
    fn normalize(&mut self) {
        let l = self.a.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let g = self.a.iter().fold(BigInt::zero(), |acc, x| acc.gcd(&(x.numer() * (&l / x.denom()))));
        if g.is_zero() {
            return;
        }
        self.scale(&Rat::new(l, g));
    }

    fn contradiction(&self) -> bool {
        match self.rel {
            Rel::Le => self.b.is_negative(),
            Rel::Lt => !self.b.is_positive(),
            Rel::Eq => !self.b.is_zero(),
        }
    }
}

enum Stage {
    Pivot(Row),
    Bounds(Vec<Row>),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct System {
    pub nvars: usize,
    pub rows: Vec<Constraint>,
}

impl System {
    pub fn new(nvars: usize) -> Self {
        System { nvars, rows: Vec::new() }
    }

    pub fn from_rows(nvars: usize, rows: Vec<Constraint>) -> Self {
        debug_assert!(rows.iter().all(|c| c.coeffs.len() == nvars));
        System { nvars, rows }
    }

    pub fn push(&mut self, c: Constraint) {
        assert_eq!(c.coeffs.len(), self.nvars, "constraint has the wrong arity");
        self.rows.push(c);
    }

    pub fn with(&self, c: Constraint) -> System {
        let mut s = self.clone();
        s.push(c);
        s
    }

    pub fn with_all<I: IntoIterator<Item = Constraint>>(&self, cs: I) -> System {
        let mut s = self.clone();
        for c in cs {
            s.push(c);
        }
        s
    }

    pub fn feasible(&self) -> bool {
        self.solve().is_feasible()
    }

    pub fn solve(&self) -> Outcome {
        let m = self.rows.len();
        let mut rows: Vec<Row> = self
            .rows
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let mut mult = vec![Rat::zero(); m];
                mult[k] = Rat::one();
                Row { a: c.coeffs.clone(), b: c.rhs.clone(), rel: c.rel, mult }
            })
            .collect();
        let mut stages = Vec::with_capacity(self.nvars);
        for v in 0..self.nvars {
            rows = match prune(rows) {
                Ok(r) => r,
                Err(f) => return Outcome::Infeasible(f),
            };
            if let Some(p) = rows.iter().position(|r| r.rel == Rel::Eq && !r.a[v].is_zero()) {
                let pivot = rows.swap_remove(p);
                let next = rows
                    .into_iter()
                    .map(|r| {
                        if r.a[v].is_zero() {
                            r
                        } else {
                            let q = -(&r.a[v] / &pivot.a[v]);
                            let mut out = r.combine(&Rat::one(), &pivot, &q);
                            out.rel = r.rel;
                            out
                        }
                    })
                    .collect();
                stages.push(Stage::Pivot(pivot));
                rows = next;
            } else {
                let (touch, rest): (Vec<Row>, Vec<Row>) = rows.into_iter().partition(|r| !r.a[v].is_zero());
                let mut next = rest;
                for p in touch.iter().filter(|r| r.a[v].is_positive()) {
                    for n in touch.iter().filter(|r| r.a[v].is_negative()) {
                        next.push(p.combine(&-&n.a[v], n, &p.a[v]));
                    }
                }
                stages.push(Stage::Bounds(touch));
                rows = next;
            }
        }
        if let Err(f) = prune(rows) {
            return Outcome::Infeasible(f);
        }
        let mut x = vec![Rat::zero(); self.nvars];
        for (v, stage) in stages.iter().enumerate().rev() {
            x[v] = match stage {
                Stage::Pivot(p) => {
                    let rest: Rat = (v + 1..self.nvars).map(|j| &p.a[j] * &x[j]).sum();
                    (&p.b - rest) / &p.a[v]
                }
                Stage::Bounds(rows) => pick(v, rows, &x),
            };
        }
        debug_assert!(self.rows.iter().all(|c| c.holds_at(&x)));
        Outcome::Feasible(x)
    }

    /// Re-checks a Farkas certificate against this system.
    pub fn check_farkas(&self, f: &Farkas) -> bool {
        if f.multipliers.len() != self.rows.len() {
            return false;
        }
        let mut combo = vec![Rat::zero(); self.nvars];
        let mut rhs = Rat::zero();
        let mut strict = false;
        for (y, c) in f.multipliers.iter().zip(&self.rows) {
            if c.rel != Rel::Eq && y.is_negative() {
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

    pub fn check_point(&self, x: &[Rat]) -> bool {
        x.len() == self.nvars && self.rows.iter().all(|c| c.holds_at(x))
    }
}

/// Drops trivial rows (returning a certificate if one is contradictory) and
/// keeps only the tightest inequality per normalized coefficient vector.
fn prune(rows: Vec<Row>) -> std::result::Result<Vec<Row>, Farkas> {
    let mut out: Vec<Row> = Vec::with_capacity(rows.len());
    let mut seen: HashMap<Vec<Rat>, usize> = HashMap::new();
    for mut r in rows {
        if r.a.iter().all(Zero::is_zero) {
            if r.contradiction() {
                if r.rel == Rel::Eq && r.b.is_positive() {
                    r.scale(&rat(-1));
                }
                return Err(Farkas { multipliers: r.mult });
            }
            continue;
        }
        r.normalize();
        if r.rel == Rel::Eq {
            out.push(r);
            continue;
        }
        match seen.get(&r.a) {
            Some(&k) => {
                let old = &out[k];
                if r.b < old.b || (r.b == old.b && r.rel == Rel::Lt && old.rel == Rel::Le) {
                    out[k] = r;
                }
            }
            None => {
                seen.insert(r.a.clone(), out.len());
                out.push(r);
            }
        }
    }
    Ok(out)
}

/// A value for `x_v` within the bounds of `rows`, given later coordinates.
fn pick(v: usize, rows: &[Row], x: &[Rat]) -> Rat {
    let mut lo: Option<(Rat, bool)> = None;
    let mut hi: Option<(Rat, bool)> = None;
    for r in rows {
        let rest: Rat = (v + 1..x.len()).map(|j| &r.a[j] * &x[j]).sum();
        let bound = (&r.b - rest) / &r.a[v];
        let strict = r.rel == Rel::Lt;
        if r.a[v].is_positive() {
            if hi.as_ref().map_or(true, |(h, s)| bound < *h || (bound == *h && strict && !s)) {
                hi = Some((bound, strict));
            }
        } else if lo.as_ref().map_or(true, |(l, s)| bound > *l || (bound == *l && strict && !s)) {
            lo = Some((bound, strict));
        }
    }
    let above = |t: &Rat| lo.as_ref().map_or(true, |(l, s)| if *s { t > l } else { t >= l });
    let below = |t: &Rat| hi.as_ref().map_or(true, |(h, s)| if *s { t < h } else { t <= h });
    let first_int_above = |l: &Rat, s: bool| {
        let c = l.ceil();
        if s && c == *l {
            c + Rat::one()
        } else {
            c
        }
    };
    let candidate = match (&lo, &hi) {
        (None, None) => rat(0),
        (Some((l, s)), None) => {
            if above(&rat(0)) {
                rat(0)
            } else {
                first_int_above(l, *s)
            }
        }
        (None, Some((h, s))) => {
            if below(&rat(0)) {
                rat(0)
            } else {
                -first_int_above(&-h, *s)
            }
        }
        (Some((l, s)), Some((h, _))) => {
            if above(&rat(0)) && below(&rat(0)) {
                rat(0)
            } else if l.is_positive() {
                first_int_above(l, *s)
            } else {
                -first_int_above(&-h, hi.as_ref().unwrap().1)
            }
        }
    };
    if above(&candidate) && below(&candidate) {
        return candidate;
    }
    match (lo, hi) {
        (Some((l, _)), Some((h, _))) => (l + h) / rat(2),
        _ => unreachable!("a half-bounded interval always contains an integer"),
    }
}
