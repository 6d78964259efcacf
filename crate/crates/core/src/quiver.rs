//! Quivers, the Euler form, the Coxeter transformation and type classification.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Integer vector indexed by the vertices (entry `i` belongs to vertex `i+1`).
pub type DimVector = Vec<i64>;

/// A connected quiver without oriented cycles. Vertices are `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Quiver {
    n: usize,
    /// 0-based (tail, head) pairs.
    arcs: Vec<(usize, usize)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QuiverType {
    A,
    D,
    E,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    Dynkin(QuiverType, usize),
    /// Rank is the number of vertices minus one, so the Kronecker quiver is `ExtendedDynkin(A, 1)`.
    ExtendedDynkin(QuiverType, usize),
    Wild,
}

impl Classification {
    pub fn is_dynkin(&self) -> bool {
        matches!(self, Classification::Dynkin(..))
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::Dynkin(t, r) => write!(f, "{t:?}{r}"),
            Classification::ExtendedDynkin(t, r) => write!(f, "~{t:?}{r}"),
            Classification::Wild => write!(f, "wild"),
        }
    }
}

/// Euler matrix `E` and Coxeter matrix `c = -E^{-1} E^t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EulerData {
    pub euler_matrix: Vec<Vec<i64>>,
    pub coxeter_matrix: Vec<Vec<i64>>,
}

impl EulerData {
    pub fn apply_coxeter(&self, v: &[i64]) -> DimVector {
        mat_vec(&self.coxeter_matrix, v)
    }
}

pub(crate) fn mat_vec(m: &[Vec<i64>], v: &[i64]) -> Vec<i64> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

impl Quiver {
    /// Builds a quiver from 1-based `(tail, head)` arrows.
    pub fn new(n: usize, arrows: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidQuiver("no vertices".into()));
        }
        let mut arcs = Vec::with_capacity(arrows.len());
        for &(t, h) in arrows {
            if t == 0 || h == 0 || t > n || h > n {
                return Err(Error::InvalidQuiver(format!("arrow {t}->{h} out of range 1..={n}")));
            }
            if t == h {
                return Err(Error::InvalidQuiver(format!("loop at vertex {t}")));
            }
            arcs.push((t - 1, h - 1));
        }
        let q = Quiver { n, arcs };
        if q.topological_order().is_none() {
            return Err(Error::InvalidQuiver("oriented cycle".into()));
        }
        if !q.is_connected() {
            return Err(Error::InvalidQuiver("underlying graph is disconnected".into()));
        }
        Ok(q)
    }

    /// Parses the text format: `vertices n` followed by `arrow t h` lines.
    /// Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut n = None;
        let mut arrows = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let bad = || Error::InvalidQuiver(format!("line {}: cannot parse {raw:?}", lineno + 1));
            match toks.as_slice() {
                ["vertices", k] if n.is_none() => n = Some(k.parse::<usize>().map_err(|_| bad())?),
                ["arrow", t, h] if n.is_some() => {
                    arrows.push((t.parse().map_err(|_| bad())?, h.parse().map_err(|_| bad())?))
                }
                _ => return Err(bad()),
            }
        }
        let n = n.ok_or_else(|| Error::InvalidQuiver("missing `vertices` line".into()))?;
        Quiver::new(n, &arrows)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("vertices {}\n", self.n);
        for (t, h) in self.arrows() {
            s.push_str(&format!("arrow {t} {h}\n"));
        }
        s
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    /// 1-based arrows.
    pub fn arrows(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.arcs.iter().map(|&(t, h)| (t + 1, h + 1))
    }

    /// 0-based arrows.
    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    /// 0-based sinks.
    pub fn sinks(&self) -> Vec<usize> {
        (0..self.n).filter(|&x| self.arcs.iter().all(|&(t, _)| t != x)).collect()
    }

    /// The quiver with every arrow at the 0-based vertex `x` reversed.
    pub fn reflect_at(&self, x: usize) -> Quiver {
        let arcs = self
            .arcs
            .iter()
            .map(|&(t, h)| if t == x || h == x { (h, t) } else { (t, h) })
            .collect();
        Quiver { n: self.n, arcs }
    }

    /// Simple reflection `s_x` on a vector: `v_x ↦ Σ_{y adjacent} v_y − v_x` (0-based `x`).
    pub fn reflect_vector(&self, x: usize, v: &[i64]) -> DimVector {
        let mut out = v.to_vec();
        let mut s = 0;
        for &(t, h) in &self.arcs {
            if t == x {
                s += v[h];
            } else if h == x {
                s += v[t];
            }
        }
        out[x] = s - v[x];
        out
    }

    /// Vertex order in which every arrow goes from an earlier to a later vertex.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let mut indeg = vec![0usize; self.n];
        for &(_, h) in &self.arcs {
            indeg[h] += 1;
        }
        let mut stack: Vec<usize> = (0..self.n).rev().filter(|&x| indeg[x] == 0).collect();
        let mut order = Vec::with_capacity(self.n);
        while let Some(x) = stack.pop() {
            order.push(x);
            for &(t, h) in &self.arcs {
                if t == x {
                    indeg[h] -= 1;
                    if indeg[h] == 0 {
                        stack.push(h);
                    }
                }
            }
        }
        (order.len() == self.n).then_some(order)
    }

    /// Sinks first: each vertex is a sink of the quiver obtained by reflecting at the earlier ones.
    pub fn admissible_sink_order(&self) -> Vec<usize> {
        let mut o = self.topological_order().expect("acyclic by construction");
        o.reverse();
        o
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(x) = stack.pop() {
            for &(t, h) in &self.arcs {
                let y = if t == x {
                    h
                } else if h == x {
                    t
                } else {
                    continue;
                };
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen.into_iter().all(|b| b)
    }

    pub fn check_dims(&self, v: &[i64]) -> Result<()> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: v.len() });
        }
        Ok(())
    }

    pub fn euler_matrix(&self) -> Vec<Vec<i64>> {
        let mut e = vec![vec![0i64; self.n]; self.n];
        for (x, row) in e.iter_mut().enumerate() {
            row[x] = 1;
        }
        for &(t, h) in &self.arcs {
            e[t][h] -= 1;
        }
        e
    }

    /// `⟨a,b⟩ = Σ a_x b_x − Σ_arrows a_{ta} b_{ha}`; assumes matching lengths.
    pub fn euler(&self, a: &[i64], b: &[i64]) -> i64 {
        let diag: i64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
        diag - self.arcs.iter().map(|&(t, h)| a[t] * b[h]).sum::<i64>()
    }

    pub fn euler_form(&self, a: &[i64], b: &[i64]) -> Result<i64> {
        self.check_dims(a)?;
        self.check_dims(b)?;
        Ok(self.euler(a, b))
    }

    /// Symmetrized form `(a,b) = ⟨a,b⟩ + ⟨b,a⟩`.
    pub fn symmetric(&self, a: &[i64], b: &[i64]) -> i64 {
        self.euler(a, b) + self.euler(b, a)
    }

    pub fn coxeter(&self) -> EulerData {
        let n = self.n;
        let e = self.euler_matrix();
        // E = I − A with A nilpotent, so E^{-1} = Σ_k A^k counts paths.
        let mut adj = vec![vec![0i64; n]; n];
        for &(t, h) in &self.arcs {
            adj[t][h] += 1;
        }
        let mut inv = identity(n);
        let mut power = identity(n);
        for _ in 1..n {
            power = mat_mul(&power, &adj);
            for i in 0..n {
                for j in 0..n {
                    inv[i][j] += power[i][j];
                }
            }
        }
        let et: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| e[j][i]).collect()).collect();
        let c = mat_mul(&inv, &et)
            .into_iter()
            .map(|row| row.into_iter().map(|x| -x).collect())
            .collect();
        EulerData { euler_matrix: e, coxeter_matrix: c }
    }

    pub fn classify(&self) -> Classification {
        let n = self.n;
        let mut mult = vec![vec![0usize; n]; n];
        for &(t, h) in &self.arcs {
            mult[t][h] += 1;
            mult[h][t] += 1;
        }
        let edges: usize = self.arcs.len();
        let max_mult = mult.iter().flatten().copied().max().unwrap_or(0);
        if max_mult >= 2 {
            return if n == 2 && max_mult == 2 && edges == 2 {
                Classification::ExtendedDynkin(QuiverType::A, 1)
            } else {
                Classification::Wild
            };
        }
        let degree: Vec<usize> = (0..n).map(|x| mult[x].iter().sum()).collect();
        if edges == n {
            // one cycle; extended A only if it is the whole graph
            return if degree.iter().all(|&d| d == 2) {
                Classification::ExtendedDynkin(QuiverType::A, n - 1)
            } else {
                Classification::Wild
            };
        }
        if edges > n {
            return Classification::Wild;
        }
        let branch: Vec<usize> = (0..n).filter(|&x| degree[x] >= 3).collect();
        if branch.is_empty() {
            return Classification::Dynkin(QuiverType::A, n);
        }
        if degree.iter().any(|&d| d >= 5) {
            return Classification::Wild;
        }
        if branch.iter().any(|&x| degree[x] == 4) {
            return if n == 5 && branch.len() == 1 {
                Classification::ExtendedDynkin(QuiverType::D, 4)
            } else {
                Classification::Wild
            };
        }
        let arms = |center: usize| -> Vec<usize> {
            let mut lens = Vec::new();
            for y in 0..n {
                if mult[center][y] == 0 {
                    continue;
                }
                let (mut prev, mut cur, mut len) = (center, y, 1);
                while degree[cur] == 2 {
                    let next = (0..n).find(|&z| mult[cur][z] > 0 && z != prev).unwrap();
                    prev = cur;
                    cur = next;
                    len += 1;
                }
                if degree[cur] >= 3 {
                    len = usize::MAX;
                }
                lens.push(len);
            }
            lens.sort_unstable();
            lens
        };
        match branch.len() {
            1 => match arms(branch[0]).as_slice() {
                [1, 1, _] => Classification::Dynkin(QuiverType::D, n),
                [1, 2, 2] | [1, 2, 3] | [1, 2, 4] => Classification::Dynkin(QuiverType::E, n),
                [2, 2, 2] | [1, 3, 3] | [1, 2, 5] => Classification::ExtendedDynkin(QuiverType::E, n - 1),
                _ => Classification::Wild,
            },
            2 => {
                let ok = branch.iter().all(|&b| {
                    let a = arms(b);
                    a.len() == 3 && a[0] == 1 && a[1] == 1
                });
                if ok {
                    Classification::ExtendedDynkin(QuiverType::D, n - 1)
                } else {
                    Classification::Wild
                }
            }
            _ => Classification::Wild,
        }
    }

    pub fn require_dynkin(&self) -> Result<(QuiverType, usize)> {
        match self.classify() {
            Classification::Dynkin(t, r) => Ok((t, r)),
            _ => Err(Error::NonDynkin),
        }
    }

    /// Unit vector at the 0-based vertex `x`.
    pub fn unit(&self, x: usize) -> DimVector {
        let mut v = vec![0; self.n];
        v[x] = 1;
        v
    }
}

fn identity(n: usize) -> Vec<Vec<i64>> {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    let m = b[0].len();
    let k = b.len();
    let mut out = vec![vec![0; m]; n];
    for i in 0..n {
        for l in 0..k {
            if a[i][l] == 0 {
                continue;
            }
            for j in 0..m {
                out[i][j] += a[i][l] * b[l][j];
            }
        }
    }
    out
}

/// Named orientations used throughout the tests and the CLI presets.
pub mod presets {
    use super::Quiver;

    pub fn a(n: usize) -> Quiver {
        let arrows: Vec<_> = (1..n).map(|i| (i, i + 1)).collect();
        Quiver::new(n, &arrows).unwrap()
    }

    /// D_n with the branch at vertex `n`: arms `1 → n`, `2 → n`, and `3 → 4 → … → n`.
    pub fn d(n: usize) -> Quiver {
        assert!(n >= 4);
        let mut arrows = vec![(1, n), (2, n)];
        for i in 3..n {
            arrows.push((i, i + 1));
        }
        Quiver::new(n, &arrows).unwrap()
    }

    /// E6 with the bottom row `1 → 2 → 3 ← 4 ← 5` and vertex 6 on top of 3.
    pub fn e6() -> Quiver {
        Quiver::new(6, &[(1, 2), (2, 3), (5, 4), (4, 3), (6, 3)]).unwrap()
    }

    pub fn e7() -> Quiver {
        Quiver::new(7, &[(1, 2), (2, 3), (4, 3), (5, 4), (6, 5), (7, 3)]).unwrap()
    }

    /// E8 with the bottom row `1 → 2 → 3 ← 4 ← 5 ← 6 ← 7` and vertex 8 on top of 3.
    pub fn e8() -> Quiver {
        Quiver::new(8, &[(1, 2), (2, 3), (4, 3), (5, 4), (6, 5), (7, 6), (8, 3)]).unwrap()
    }

    pub fn kronecker() -> Quiver {
        Quiver::new(2, &[(1, 2), (1, 2)]).unwrap()
    }
}
