//! Positive roots of Dynkin quivers, explicit indecomposables built with
//! reflection functors, and Hom/Ext dimensions from the map `d^V_W`.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::Zero;
use rand::Rng;
use rayon::prelude::*;

use crate::linalg::{integer_rank, rat, Matrix};
use crate::quiver::{DimVector, Quiver};
use crate::{Error, Result};

/// Positive roots, sorted lexicographically.
pub fn positive_roots(q: &Quiver) -> Result<Vec<DimVector>> {
    q.require_dynkin()?;
    let n = q.vertex_count();
    let mut seen: BTreeSet<DimVector> = (0..n).map(|x| q.unit(x)).collect();
    let mut frontier: Vec<DimVector> = seen.iter().cloned().collect();
    while let Some(v) = frontier.pop() {
        for x in 0..n {
            let w = q.reflect_vector(x, &v);
            if w.iter().all(|&c| c >= 0) && w.iter().any(|&c| c > 0) && seen.insert(w.clone()) {
                frontier.push(w);
            }
        }
    }
    Ok(seen.into_iter().collect())
}

/// A representation: one exact matrix per arrow, in the quiver's arrow order,
/// of shape `dims[head] × dims[tail]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Representation {
    pub quiver: Quiver,
    pub dims: DimVector,
    pub maps: Vec<Matrix>,
}

impl Representation {
    pub fn zero(q: &Quiver, dims: &[i64]) -> Self {
        let maps = q
            .arcs()
            .iter()
            .map(|&(t, h)| Matrix::zeros(dims[h] as usize, dims[t] as usize))
            .collect();
        Representation { quiver: q.clone(), dims: dims.to_vec(), maps }
    }

    /// Simple representation at the 0-based vertex `x`.
    pub fn simple(q: &Quiver, x: usize) -> Self {
        Self::zero(q, &q.unit(x))
    }

    pub fn direct_sum(&self, other: &Representation) -> Result<Representation> {
        if self.quiver != other.quiver {
            return Err(Error::QuiverMismatch);
        }
        let dims: DimVector = self.dims.iter().zip(&other.dims).map(|(a, b)| a + b).collect();
        let mut out = Representation::zero(&self.quiver, &dims);
        for (k, &(t, h)) in self.quiver.arcs().iter().enumerate() {
            let (ht, hh) = (self.dims[t] as usize, self.dims[h] as usize);
            let m = &mut out.maps[k];
            for i in 0..hh {
                for j in 0..ht {
                    m.set(i, j, self.maps[k].get(i, j).clone());
                }
            }
            for i in 0..other.dims[h] as usize {
                for j in 0..other.dims[t] as usize {
                    m.set(hh + i, ht + j, other.maps[k].get(i, j).clone());
                }
            }
        }
        Ok(out)
    }

    /// Conjugates by random invertible integer matrices at every vertex,
    /// producing an isomorphic representation.
    pub fn random_base_change<R: Rng>(&self, rng: &mut R) -> Representation {
        let g: Vec<(Matrix, Matrix)> =
            self.dims.iter().map(|&d| random_invertible(d as usize, rng)).collect();
        let maps = self
            .quiver
            .arcs()
            .iter()
            .enumerate()
            .map(|(k, &(t, h))| g[h].0.mul(&self.maps[k]).mul(&g[t].1))
            .collect();
        Representation { quiver: self.quiver.clone(), dims: self.dims.clone(), maps }
    }

    /// A point of `Rep(Q, dims)` with independent random integer entries in `-range..=range`.
    pub fn random<R: Rng>(q: &Quiver, dims: &[i64], range: i64, rng: &mut R) -> Self {
        let mut v = Representation::zero(q, dims);
        for m in &mut v.maps {
            for i in 0..m.rows {
                for j in 0..m.cols {
                    m.set(i, j, rat(rng.gen_range(-range..=range)));
                }
            }
        }
        v
    }
}

/// A random unimodular matrix and its inverse, as a product of elementary operations.
fn random_invertible<R: Rng>(d: usize, rng: &mut R) -> (Matrix, Matrix) {
    let mut g = Matrix::identity(d);
    let mut gi = Matrix::identity(d);
    if d < 2 {
        return (g, gi);
    }
    for _ in 0..3 * d {
        let i = rng.gen_range(0..d);
        let mut j = rng.gen_range(0..d - 1);
        if j >= i {
            j += 1;
        }
        let c: i64 = rng.gen_range(-2..=2);
        // g ← (I + c E_ij) g,  gi ← gi (I − c E_ij)
        let mut e = Matrix::identity(d);
        e.set(i, j, rat(c));
        let mut ei = Matrix::identity(d);
        ei.set(i, j, rat(-c));
        g = e.mul(&g);
        gi = gi.mul(&ei);
    }
    (g, gi)
}

/// Indecomposable with dimension vector `root`, built along the admissible sink order.
pub fn realize(q: &Quiver, root: &[i64]) -> Result<Representation> {
    realize_with_order(q, root, &q.admissible_sink_order())
}

/// Indecomposable with dimension vector `root`, reflecting at the sinks in the
/// given admissible order (repeated cyclically) until the root becomes simple.
pub fn realize_with_order(q: &Quiver, root: &[i64], order: &[usize]) -> Result<Representation> {
    q.require_dynkin()?;
    q.check_dims(root)?;
    let n = q.vertex_count();
    if order.len() != n {
        return Err(Error::InvalidInput("sink order must list every vertex".into()));
    }
    {
        let mut cur = q.clone();
        for &x in order {
            if !cur.sinks().contains(&x) {
                return Err(Error::InvalidInput(format!("vertex {} is not a sink in turn", x + 1)));
            }
            cur = cur.reflect_at(x);
        }
    }
    if q.euler(root, root) != 1 || root.iter().any(|&c| c < 0) || root.iter().all(|&c| c == 0) {
        return Err(Error::NotARoot(root.to_vec()));
    }
    let mut quivers = vec![q.clone()];
    let mut steps = Vec::new();
    let mut v = root.to_vec();
    for k in 0.. {
        let x = order[k % n];
        if v == q.unit(x) {
            break;
        }
        v = q_last(&quivers).reflect_vector(x, &v);
        if v.iter().any(|&c| c < 0) {
            return Err(Error::NotARoot(root.to_vec()));
        }
        let next = q_last(&quivers).reflect_at(x);
        quivers.push(next);
        steps.push(x);
    }
    let base_x = v.iter().position(|&c| c == 1).unwrap();
    let mut rep = Representation::simple(q_last(&quivers), base_x);
    for &x in steps.iter().rev() {
        quivers.pop();
        rep = reflect_at_source(&rep, x, q_last(&quivers));
    }
    debug_assert_eq!(rep.dims, root);
    Ok(rep)
}

fn q_last(v: &[Quiver]) -> &Quiver {
    v.last().unwrap()
}

/// The reflection functor at a source `x` of `rep.quiver`, landing on `target`
/// (the same quiver with the arrows at `x` reversed).
fn reflect_at_source(rep: &Representation, x: usize, target: &Quiver) -> Representation {
    let arcs = rep.quiver.arcs();
    let out_arcs: Vec<usize> = (0..arcs.len()).filter(|&k| arcs[k].0 == x).collect();
    let dx = rep.dims[x] as usize;
    let total: usize = out_arcs.iter().map(|&k| rep.dims[arcs[k].1] as usize).sum();
    let mut stacked = Matrix::zeros(total, dx);
    let mut offsets = Vec::with_capacity(out_arcs.len());
    let mut off = 0;
    for &k in &out_arcs {
        offsets.push(off);
        let m = &rep.maps[k];
        for i in 0..m.rows {
            for j in 0..m.cols {
                stacked.set(off + i, j, m.get(i, j).clone());
            }
        }
        off += m.rows;
    }
    // cokernel of M(x) → ⊕ M(y): rows of a left-nullspace basis
    let coker = stacked.left_nullspace();
    let mut dims = rep.dims.clone();
    dims[x] = coker.rows as i64;
    let mut maps = rep.maps.clone();
    for (slot, &k) in out_arcs.iter().enumerate() {
        let dy = rep.dims[arcs[k].1] as usize;
        let mut m = Matrix::zeros(coker.rows, dy);
        for i in 0..coker.rows {
            for j in 0..dy {
                m.set(i, j, coker.get(i, offsets[slot] + j).clone());
            }
        }
        maps[k] = m;
    }
    Representation { quiver: target.clone(), dims, maps }
}

/// Matrix of `d^V_W : ⊕_x Hom(V(x),W(x)) → ⊕_a Hom(V(ta),W(ha))`,
/// `φ ↦ (φ(ha)V(a) − W(a)φ(ta))_a`.
///
/// Columns: vertices ascending, each block `φ_x` (a `dimW(x) × dimV(x)` matrix)
/// flattened column-major. Rows: arrows in quiver order, each block flattened
/// column-major the same way.
pub fn hom_matrix_dvw(v: &Representation, w: &Representation) -> Result<Matrix> {
    if v.quiver != w.quiver {
        return Err(Error::QuiverMismatch);
    }
    let q = &v.quiver;
    let n = q.vertex_count();
    let mut col_off = vec![0usize; n + 1];
    for x in 0..n {
        col_off[x + 1] = col_off[x] + (v.dims[x] * w.dims[x]) as usize;
    }
    let arcs = q.arcs();
    let mut row_off = vec![0usize; arcs.len() + 1];
    for (k, &(t, h)) in arcs.iter().enumerate() {
        row_off[k + 1] = row_off[k] + (v.dims[t] * w.dims[h]) as usize;
    }
    let mut d = Matrix::zeros(row_off[arcs.len()], col_off[n]);
    for (k, &(t, h)) in arcs.iter().enumerate() {
        let (vt, wh, vh, wt) = (v.dims[t] as usize, w.dims[h] as usize, v.dims[h] as usize, w.dims[t] as usize);
        let va = &v.maps[k];
        let wa = &w.maps[k];
        for j in 0..vt {
            for i in 0..wh {
                let row = row_off[k] + j * wh + i;
                // φ_h[i][l] · V(a)[l][j]
                for l in 0..vh {
                    let c = va.get(l, j);
                    if !c.is_zero() {
                        let col = col_off[h] + l * wh + i;
                        let val = d.get(row, col) + c;
                        d.set(row, col, val);
                    }
                }
                // − W(a)[i][l] · φ_t[l][j]
                for l in 0..wt {
                    let c = wa.get(i, l);
                    if !c.is_zero() {
                        let col = col_off[t] + j * wt + l;
                        let val = d.get(row, col) - c;
                        d.set(row, col, val);
                    }
                }
            }
        }
    }
    Ok(d)
}

/// `dim Hom(V,W)` as the nullity of `d^V_W`.
pub fn hom_dim(v: &Representation, w: &Representation) -> Result<usize> {
    if v.quiver != w.quiver {
        return Err(Error::QuiverMismatch);
    }
    match hom_matrix_integer(v, w) {
        Some((rows, cols)) => Ok(cols - integer_rank(rows)),
        None => Ok(hom_matrix_dvw(v, w)?.nullity()),
    }
}

/// `d^V_W` with machine integers, laid out as in [`hom_matrix_dvw`]; `None`
/// unless every structure map is integral.
fn hom_matrix_integer(v: &Representation, w: &Representation) -> Option<(Vec<Vec<i128>>, usize)> {
    let q = &v.quiver;
    let n = q.vertex_count();
    let vm: Vec<Vec<i64>> = v.maps.iter().map(Matrix::to_i64).collect::<Option<_>>()?;
    let wm: Vec<Vec<i64>> = w.maps.iter().map(Matrix::to_i64).collect::<Option<_>>()?;
    let mut col_off = vec![0usize; n + 1];
    for x in 0..n {
        col_off[x + 1] = col_off[x] + (v.dims[x] * w.dims[x]) as usize;
    }
    let cols = col_off[n];
    let mut rows = Vec::new();
    for (k, &(t, h)) in q.arcs().iter().enumerate() {
        let (vt, wh, vh, wt) = (v.dims[t] as usize, w.dims[h] as usize, v.dims[h] as usize, w.dims[t] as usize);
        for j in 0..vt {
            for i in 0..wh {
                let mut row = vec![0i128; cols];
                for l in 0..vh {
                    row[col_off[h] + l * wh + i] += vm[k][l * vt + j] as i128;
                }
                for l in 0..wt {
                    row[col_off[t] + j * wt + l] -= wm[k][i * wt + l] as i128;
                }
                rows.push(row);
            }
        }
    }
    Some((rows, cols))
}

/// `dim Ext(V,W) = dim Hom(V,W) − ⟨dim V, dim W⟩`.
pub fn ext_dim(v: &Representation, w: &Representation) -> Result<usize> {
    let h = hom_dim(v, w)? as i64;
    let e = h - v.quiver.euler(&v.dims, &w.dims);
    debug_assert!(e >= 0);
    Ok(e as usize)
}

/// Pairwise Hom/Ext dimensions between the indecomposables of a Dynkin quiver.
#[derive(Clone, Debug)]
pub struct HomTable {
    pub roots: Vec<DimVector>,
    pub hom: Vec<Vec<u32>>,
    pub ext: Vec<Vec<u32>>,
    index: HashMap<DimVector, usize>,
}

impl HomTable {
    pub fn index_of(&self, root: &[i64]) -> Option<usize> {
        self.index.get(root).copied()
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }
}

/// Positive roots, their realizations, and the Hom/Ext table between them.
#[derive(Clone, Debug)]
pub struct RootSystem {
    pub quiver: Quiver,
    pub reps: Vec<Representation>,
    pub table: HomTable,
}

impl RootSystem {
    pub fn new(q: &Quiver) -> Result<Self> {
        Self::with_order(q, &q.admissible_sink_order())
    }

    /// Shared instance for `q`; tables are built once per process.
    pub fn cached(q: &Quiver) -> Result<Arc<Self>> {
        static CACHE: OnceLock<Mutex<HashMap<Quiver, Arc<RootSystem>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(rs) = cache.lock().unwrap().get(q) {
            return Ok(rs.clone());
        }
        let rs = Arc::new(Self::new(q)?);
        cache.lock().unwrap().insert(q.clone(), rs.clone());
        Ok(rs)
    }

    pub fn with_order(q: &Quiver, order: &[usize]) -> Result<Self> {
        let roots = positive_roots(q)?;
        let reps: Vec<Representation> =
            roots.iter().map(|r| realize_with_order(q, r, order)).collect::<Result<_>>()?;
        let m = roots.len();
        let hom: Vec<Vec<u32>> = (0..m)
            .into_par_iter()
            .map(|i| (0..m).map(|j| hom_dim(&reps[i], &reps[j]).unwrap() as u32).collect())
            .collect();
        let ext = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| (hom[i][j] as i64 - q.euler(&roots[i], &roots[j])) as u32)
                    .collect()
            })
            .collect();
        let index = roots.iter().enumerate().map(|(i, r)| (r.clone(), i)).collect();
        Ok(RootSystem { quiver: q.clone(), reps, table: HomTable { roots, hom, ext, index } })
    }

    pub fn roots(&self) -> &[DimVector] {
        &self.table.roots
    }

    pub fn index_of(&self, root: &[i64]) -> Result<usize> {
        self.table.index_of(root).ok_or_else(|| Error::NotARoot(root.to_vec()))
    }

    pub fn hom(&self, i: usize, j: usize) -> u32 {
        self.table.hom[i][j]
    }

    pub fn ext(&self, i: usize, j: usize) -> u32 {
        self.table.ext[i][j]
    }
}

/// The hom table of a quiver, computed from explicit realizations.
pub fn hom_table(q: &Quiver) -> Result<HomTable> {
    Ok(RootSystem::new(q)?.table)
}
