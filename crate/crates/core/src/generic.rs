//! Generic decompositions, prehomogeneity and perpendicular simples.

use std::collections::HashMap;
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::linalg::Rat;
use crate::quiver::{DimVector, Quiver};
use crate::roots::{hom_matrix_dvw, Representation, RootSystem};
use crate::{Error, Result};

/// Isomorphism class: a multiset of positive roots, kept sorted in decreasing
/// lexicographic order of the roots.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RepClass {
    pub parts: Vec<(DimVector, u32)>,
}

impl RepClass {
    pub fn new(mut parts: Vec<(DimVector, u32)>) -> Self {
        parts.retain(|p| p.1 > 0);
        parts.sort_by(|a, b| b.0.cmp(&a.0));
        let mut merged: Vec<(DimVector, u32)> = Vec::with_capacity(parts.len());
        for (r, m) in parts {
            match merged.last_mut() {
                Some(last) if last.0 == r => last.1 += m,
                _ => merged.push((r, m)),
            }
        }
        RepClass { parts: merged }
    }

    pub fn total(&self, n: usize) -> DimVector {
        let mut t = vec![0; n];
        for (r, m) in &self.parts {
            for (x, c) in r.iter().enumerate() {
                t[x] += c * *m as i64;
            }
        }
        t
    }

    pub fn distinct_parts(&self) -> usize {
        self.parts.len()
    }

    /// Index form `(root index, multiplicity)` for fast table lookups.
    pub fn indexed(&self, rs: &RootSystem) -> Result<Vec<(usize, u32)>> {
        self.parts.iter().map(|(r, m)| Ok((rs.index_of(r)?, *m))).collect()
    }

    pub fn from_indexed(rs: &RootSystem, parts: &[(usize, u32)]) -> Self {
        RepClass::new(parts.iter().map(|&(i, m)| (rs.roots()[i].clone(), m)).collect())
    }

    /// Direct sum of the realized indecomposables.
    pub fn representation(&self, rs: &RootSystem) -> Result<Representation> {
        let n = rs.quiver.vertex_count();
        let mut acc = Representation::zero(&rs.quiver, &vec![0; n]);
        for (r, m) in &self.parts {
            let rep = &rs.reps[rs.index_of(r)?];
            for _ in 0..*m {
                acc = acc.direct_sum(rep)?;
            }
        }
        Ok(acc)
    }
}

impl fmt::Display for RepClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self
            .parts
            .iter()
            .map(|(r, m)| {
                let v: Vec<String> = r.iter().map(i64::to_string).collect();
                if *m == 1 {
                    format!("({})", v.join(","))
                } else {
                    format!("({})^{m}", v.join(","))
                }
            })
            .collect();
        write!(f, "{}", items.join(" + "))
    }
}

/// `dim Hom(X, Y)` between classes, by bilinearity over the table.
pub fn class_hom(rs: &RootSystem, x: &[(usize, u32)], y: &[(usize, u32)]) -> u32 {
    let mut s = 0;
    for &(i, a) in x {
        for &(j, b) in y {
            s += a * b * rs.hom(i, j);
        }
    }
    s
}

pub fn class_ext(rs: &RootSystem, x: &[(usize, u32)], y: &[(usize, u32)]) -> u32 {
    let mut s = 0;
    for &(i, a) in x {
        for &(j, b) in y {
            s += a * b * rs.ext(i, j);
        }
    }
    s
}

/// Canonical decomposition: depth-first over roots in decreasing lexicographic
/// order, never combining two roots with an extension in either direction.
pub fn generic_decomposition(rs: &RootSystem, alpha: &[i64]) -> Result<RepClass> {
    let q = &rs.quiver;
    q.check_dims(alpha)?;
    if alpha.iter().any(|&c| c < 0) {
        return Err(Error::InvalidInput(format!("negative dimension vector {alpha:?}")));
    }
    let mut order: Vec<usize> = (0..rs.roots().len()).collect();
    order.sort_by(|&a, &b| rs.roots()[b].cmp(&rs.roots()[a]));
    let mut chosen = Vec::new();
    if dfs_generic(rs, &order, 0, &mut alpha.to_vec(), &mut chosen) {
        Ok(RepClass::from_indexed(rs, &chosen))
    } else {
        Err(Error::Internal(format!("no ext-free decomposition of {alpha:?}")))
    }
}

fn dfs_generic(
    rs: &RootSystem,
    order: &[usize],
    pos: usize,
    rem: &mut DimVector,
    chosen: &mut Vec<(usize, u32)>,
) -> bool {
    if rem.iter().all(|&c| c == 0) {
        return true;
    }
    if pos == order.len() {
        return false;
    }
    let i = order[pos];
    let root = &rs.roots()[i];
    let compatible = chosen.iter().all(|&(j, _)| rs.ext(i, j) == 0 && rs.ext(j, i) == 0);
    let max = if compatible { max_copies(rem, root) } else { 0 };
    for k in (0..=max).rev() {
        sub_scaled(rem, root, k as i64);
        if k > 0 {
            chosen.push((i, k));
        }
        if dfs_generic(rs, order, pos + 1, rem, chosen) {
            return true;
        }
        if k > 0 {
            chosen.pop();
        }
        sub_scaled(rem, root, -(k as i64));
    }
    false
}

pub(crate) fn max_copies(rem: &[i64], root: &[i64]) -> u32 {
    rem.iter()
        .zip(root)
        .filter(|(_, &r)| r > 0)
        .map(|(&a, &r)| (a / r).max(0) as u32)
        .min()
        .unwrap_or(0)
}

pub(crate) fn sub_scaled(rem: &mut [i64], root: &[i64], k: i64) {
    for (a, r) in rem.iter_mut().zip(root) {
        *a -= k * r;
    }
}

/// Whether `Rep(Q, α)` has a dense orbit.
///
/// Dynkin quivers always qualify. Otherwise `ext(V,V)` is computed at seeded
/// random integer points: a zero proves density, and a positive value at every
/// trial is reported as `false`.
pub fn is_prehomogeneous(q: &Quiver, alpha: &[i64]) -> Result<bool> {
    q.check_dims(alpha)?;
    if q.classify().is_dynkin() {
        return Ok(true);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..8 {
        let v = Representation::random(q, alpha, 1000, &mut rng);
        let d = hom_matrix_dvw(&v, &v)?;
        if d.rows == d.rank() {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Dimension vectors of the simple objects of the right perpendicular category of `T`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerpData {
    pub simples: Vec<DimVector>,
    pub r: usize,
}

/// Roots β with `hom(T_i,β) = ext(T_i,β) = 0` for every part, keeping those that
/// are not a sum of two or more such roots. Sorted lexicographically.
pub fn perp_simples(rs: &RootSystem, t: &RepClass) -> Result<PerpData> {
    let parts = t.indexed(rs)?;
    let perp: Vec<usize> = (0..rs.roots().len())
        .filter(|&b| parts.iter().all(|&(i, _)| rs.hom(i, b) == 0 && rs.ext(i, b) == 0))
        .collect();
    let vecs: Vec<&DimVector> = perp.iter().map(|&b| &rs.roots()[b]).collect();
    let mut memo = HashMap::new();
    let mut simples: Vec<DimVector> = vecs
        .iter()
        .filter(|beta| {
            !vecs.iter().any(|g| {
                *g != **beta && le(g, beta) && {
                    let rest: DimVector = beta.iter().zip(g.iter()).map(|(a, b)| a - b).collect();
                    representable(&rest, &vecs, &mut memo)
                }
            })
        })
        .map(|b| (*b).clone())
        .collect();
    simples.sort();
    let r = rs.quiver.vertex_count() - t.distinct_parts();
    if simples.len() != r {
        return Err(Error::Internal(format!(
            "found {} perpendicular simples, expected {r}",
            simples.len()
        )));
    }
    Ok(PerpData { simples, r })
}

fn le(a: &[i64], b: &[i64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn representable(v: &DimVector, gens: &[&DimVector], memo: &mut HashMap<DimVector, bool>) -> bool {
    if v.iter().all(|&c| c == 0) {
        return true;
    }
    if let Some(&b) = memo.get(v) {
        return b;
    }
    let ans = gens.iter().any(|g| {
        le(g, v) && {
            let rest: DimVector = v.iter().zip(g.iter()).map(|(a, b)| a - b).collect();
            representable(&rest, gens, memo)
        }
    });
    memo.insert(v.clone(), ans);
    ans
}

/// `det d^V_S`, the semi-invariant `c^S` evaluated at `V`.
pub fn evaluate_semiinvariant(v: &Representation, s: &Representation) -> Result<Rat> {
    let d = hom_matrix_dvw(v, s)?;
    if d.rows != d.cols {
        return Err(Error::NonSquare { rows: d.rows, cols: d.cols });
    }
    Ok(d.det())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::presets::*;
    use num_traits::Zero;

    #[test]
    fn a2_decompositions() {
        let rs = RootSystem::new(&a(2)).unwrap();
        let t = generic_decomposition(&rs, &[5, 3]).unwrap();
        assert_eq!(t, RepClass::new(vec![(vec![1, 1], 3), (vec![1, 0], 2)]));
        let t = generic_decomposition(&rs, &[1, 1]).unwrap();
        assert_eq!(t, RepClass::new(vec![(vec![1, 1], 1)]));
        let p = perp_simples(&rs, &t).unwrap();
        assert_eq!(p.simples, vec![vec![0, 1]]);
        assert_eq!(p.r, 1);
    }

    #[test]
    fn simple_root_is_its_own_decomposition() {
        let rs = RootSystem::new(&d(4)).unwrap();
        let t = generic_decomposition(&rs, &[0, 0, 1, 0]).unwrap();
        assert_eq!(t, RepClass::new(vec![(vec![0, 0, 1, 0], 1)]));
    }

    #[test]
    fn e6_decomposition_and_simples() {
        let rs = RootSystem::new(&e6()).unwrap();
        let t = generic_decomposition(&rs, &[1, 3, 3, 3, 1, 2]).unwrap();
        assert_eq!(
            t,
            RepClass::new(vec![(vec![0, 1, 1, 1, 0, 1], 1), (vec![1, 2, 2, 2, 1, 1], 1)])
        );
        let p = perp_simples(&rs, &t).unwrap();
        assert_eq!(
            p.simples,
            vec![
                vec![0, 0, 1, 1, 1, 1],
                vec![0, 1, 1, 1, 1, 0],
                vec![1, 1, 1, 0, 0, 1],
                vec![1, 1, 1, 1, 0, 0]
            ]
        );
        let alpha = [1, 3, 3, 3, 1, 2];
        for s in &p.simples {
            assert_eq!(rs.quiver.euler(&alpha, s), 0);
        }
    }

    #[test]
    fn prehomogeneity() {
        assert!(is_prehomogeneous(&a(2), &[4, 7]).unwrap());
        assert!(!is_prehomogeneous(&kronecker(), &[1, 1]).unwrap());
        assert!(is_prehomogeneous(&kronecker(), &[1, 2]).unwrap());
    }

    #[test]
    fn a2_semiinvariant_is_the_arrow_entry() {
        let q = a(2);
        let rs = RootSystem::new(&q).unwrap();
        let mut v = Representation::zero(&q, &[1, 1]);
        v.maps[0].set(0, 0, crate::linalg::rat(7));
        let s = &rs.reps[rs.index_of(&[0, 1]).unwrap()];
        let det = evaluate_semiinvariant(&v, s).unwrap();
        assert_eq!(det.clone() * det, crate::linalg::rat(49));
        let zero = Representation::zero(&q, &[1, 1]);
        assert!(evaluate_semiinvariant(&zero, s).unwrap().is_zero());
        let s1 = &rs.reps[rs.index_of(&[1, 0]).unwrap()];
        assert!(matches!(evaluate_semiinvariant(&v, s1), Err(Error::NonSquare { .. })));
    }
}
