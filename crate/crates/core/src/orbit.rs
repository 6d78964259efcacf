//! Orbits of Dynkin representation spaces: enumeration, the Hom-order,
//! zero sets of semi-invariants, their components, and reducedness.

use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::generic::{
    class_ext, class_hom, generic_decomposition, max_copies, perp_simples, sub_scaled, PerpData,
    RepClass,
};
use crate::quiver::{Classification, DimVector, Quiver, QuiverType};
use crate::roots::RootSystem;
use crate::{Error, Result};

/// Index form of a class: `(root index, multiplicity)` sorted by root index.
pub type Parts = Vec<(usize, u32)>;

/// Calls `f` once for every multiset of positive roots with total `alpha`.
/// Roots are taken in decreasing lexicographic order.
pub fn for_each_class<F: FnMut(&[(usize, u32)])>(rs: &RootSystem, alpha: &[i64], mut f: F) {
    let mut order: Vec<usize> = (0..rs.roots().len()).collect();
    order.sort_by(|&a, &b| rs.roots()[b].cmp(&rs.roots()[a]));
    let n = alpha.len();
    // covers[p][x]: some root at position ≥ p is supported at x
    let mut covers = vec![vec![false; n]; order.len() + 1];
    for p in (0..order.len()).rev() {
        let mut c = covers[p + 1].clone();
        for (x, &v) in rs.roots()[order[p]].iter().enumerate() {
            if v > 0 {
                c[x] = true;
            }
        }
        covers[p] = c;
    }
    let mut rem = alpha.to_vec();
    let mut chosen = Vec::new();
    walk(rs, &order, &covers, 0, &mut rem, &mut chosen, &mut f);
}

fn walk<F: FnMut(&[(usize, u32)])>(
    rs: &RootSystem,
    order: &[usize],
    covers: &[Vec<bool>],
    pos: usize,
    rem: &mut DimVector,
    chosen: &mut Parts,
    f: &mut F,
) {
    if rem.iter().all(|&c| c == 0) {
        let mut parts = chosen.clone();
        parts.sort_unstable();
        f(&parts);
        return;
    }
    if pos == order.len() || rem.iter().zip(&covers[pos]).any(|(&c, &ok)| c > 0 && !ok) {
        return;
    }
    let i = order[pos];
    let root = &rs.roots()[i];
    let max = max_copies(rem, root);
    for k in 0..=max {
        if k > 0 {
            sub_scaled(rem, root, 1);
            chosen.push((i, k));
        }
        walk(rs, order, covers, pos + 1, rem, chosen, f);
        if k > 0 {
            chosen.pop();
        }
    }
    sub_scaled(rem, root, -(max as i64));
}

pub fn enumerate_classes(rs: &RootSystem, alpha: &[i64]) -> Result<Vec<RepClass>> {
    rs.quiver.check_dims(alpha)?;
    let mut out = Vec::new();
    for_each_class(rs, alpha, |p| out.push(RepClass::from_indexed(rs, p)));
    Ok(out)
}

/// Hom profile `X ↦ hom(M, X)` over all positive roots.
/// Stored as `u16` to keep large censuses small.
pub fn hom_profile(rs: &RootSystem, parts: &[(usize, u32)]) -> Vec<u16> {
    let m = rs.roots().len();
    let mut p = vec![0u32; m];
    for &(i, k) in parts {
        for (x, slot) in p.iter_mut().enumerate() {
            *slot += k * rs.hom(i, x);
        }
    }
    p.into_iter().map(|v| u16::try_from(v).expect("hom dimension fits in u16")).collect()
}

fn profile_le(a: &[u16], b: &[u16]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

/// `N` lies in the orbit closure of `M` (Hom-order: `hom(M,X) ≤ hom(N,X)` for all roots `X`).
pub fn degenerates_to(rs: &RootSystem, m: &RepClass, n: &RepClass) -> Result<bool> {
    let k = rs.quiver.vertex_count();
    if m.total(k) != n.total(k) {
        return Err(Error::DimensionMismatch { expected: k, got: k });
    }
    Ok(profile_le(&hom_profile(rs, &m.indexed(rs)?), &hom_profile(rs, &n.indexed(rs)?)))
}

/// The classes of `α` of codimension at most `r` lying in the zero set of all
/// but at most one selected semi-invariant, with their hom profiles.
/// Components and condition-(b) witnesses only ever look at these: a
/// component of the zero set of `r` functions has codimension at most `r`, and
/// a witness degenerates to a component.
#[derive(Debug)]
pub struct Census {
    pub classes: Vec<Parts>,
    pub profiles: Vec<Vec<u16>>,
    /// Number of classes of `α` seen during enumeration, stored or not.
    pub total: usize,
}

/// Zero set of the semi-invariants `c_{S_j}`, `j ∈ selected` (0-based indices
/// into the perpendicular simples).
#[derive(Debug)]
pub struct ZeroSetSpec {
    pub rs: Arc<RootSystem>,
    pub alpha: DimVector,
    pub generic: RepClass,
    pub perp: PerpData,
    pub selected: Vec<usize>,
    simple_idx: Vec<usize>,
    census: OnceLock<Census>,
}

impl ZeroSetSpec {
    /// `selected = None` means every simple, i.e. the nullcone.
    pub fn new(q: &Quiver, alpha: &[i64], selected: Option<Vec<usize>>) -> Result<Self> {
        let rs = RootSystem::cached(q)?;
        let generic = generic_decomposition(&rs, alpha)?;
        let perp = perp_simples(&rs, &generic)?;
        let selected = selected.unwrap_or_else(|| (0..perp.r).collect());
        if selected.is_empty() || selected.iter().any(|&j| j >= perp.r) {
            return Err(Error::InvalidInput(format!(
                "selection {selected:?} must be a nonempty subset of 0..{}",
                perp.r
            )));
        }
        let simple_idx = perp.simples.iter().map(|s| rs.index_of(s)).collect::<Result<_>>()?;
        Ok(ZeroSetSpec {
            rs,
            alpha: alpha.to_vec(),
            generic,
            perp,
            selected,
            simple_idx,
            census: OnceLock::new(),
        })
    }

    pub fn census(&self) -> &Census {
        self.census.get_or_init(|| {
            let mut classes = Vec::new();
            let mut profiles = Vec::new();
            let mut total = 0;
            let need = self.selected.len() - 1;
            for_each_class(&self.rs, &self.alpha, |p| {
                total += 1;
                let hits = self
                    .selected
                    .iter()
                    .filter(|&&j| p.iter().any(|&(i, _)| self.rs.hom(i, self.simple_idx[j]) > 0))
                    .count();
                if hits >= need && class_ext(&self.rs, p, p) as usize <= self.selected.len() {
                    profiles.push(hom_profile(&self.rs, p));
                    classes.push(p.to_vec());
                }
            });
            Census { classes, profiles, total }
        })
    }

    /// `hom(X, S_j)` for the selected `j`, in selection order.
    pub fn hom_to_simples(&self, profile: &[u16]) -> Vec<u32> {
        self.selected.iter().map(|&j| profile[self.simple_idx[j]] as u32).collect()
    }

    fn profile_of(&self, x: &RepClass) -> Result<Vec<u16>> {
        if x.total(self.alpha.len()) != self.alpha {
            return Err(Error::InvalidInput(format!("class {x} does not have dimension {:?}", self.alpha)));
        }
        Ok(hom_profile(&self.rs, &x.indexed(&self.rs)?))
    }

    fn in_zero_of(&self, profile: &[u16], sel: &[usize]) -> bool {
        sel.iter().all(|&j| profile[self.simple_idx[j]] > 0)
    }
}

pub fn in_zero_set(x: &RepClass, spec: &ZeroSetSpec) -> Result<bool> {
    Ok(spec.in_zero_of(&spec.profile_of(x)?, &spec.selected))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentReport {
    pub class: RepClass,
    pub codim: u32,
    pub hom_to_simples: Vec<u32>,
    pub gradient_a: bool,
    /// `(k, X′)` for every selected `k` when all witnesses were found.
    pub gradient_b_witnesses: Option<Vec<(usize, RepClass)>>,
}

/// Hom-order-maximal classes of the zero set, sorted by number of distinct
/// parts and then by their roots.
pub fn components(spec: &ZeroSetSpec) -> Vec<ComponentReport> {
    let census = spec.census();
    let mut zero: Vec<usize> = (0..census.classes.len())
        .filter(|&c| spec.in_zero_of(&census.profiles[c], &spec.selected))
        .collect();
    let weight = |c: usize| census.profiles[c].iter().map(|&v| v as u64).sum::<u64>();
    zero.sort_by_key(|&c| weight(c));
    let mut maximal: Vec<usize> = Vec::new();
    for &c in &zero {
        if !maximal.iter().any(|&m| profile_le(&census.profiles[m], &census.profiles[c])) {
            maximal.push(c);
        }
    }
    let mut reports: Vec<ComponentReport> = maximal
        .into_iter()
        .map(|c| {
            let parts = &census.classes[c];
            let class = RepClass::from_indexed(&spec.rs, parts);
            let hom_to_simples = spec.hom_to_simples(&census.profiles[c]);
            let gradient_a = hom_to_simples.iter().all(|&h| h == 1);
            let gradient_b_witnesses = if gradient_a {
                spec.selected
                    .iter()
                    .map(|&k| witness_for(spec, c, k).map(|w| (k, w)))
                    .collect::<Option<Vec<_>>>()
            } else {
                None
            };
            ComponentReport {
                codim: class_ext(&spec.rs, parts, parts),
                class,
                hom_to_simples,
                gradient_a,
                gradient_b_witnesses,
            }
        })
        .collect();
    reports.sort_by(|a, b| {
        (a.class.distinct_parts(), &a.class).cmp(&(b.class.distinct_parts(), &b.class))
    });
    reports
}

pub fn is_set_theoretic_ci(spec: &ZeroSetSpec, comps: &[ComponentReport]) -> bool {
    comps.iter().all(|c| c.codim as usize == spec.selected.len())
}

/// Condition (a): `hom(X, S_j) = 1` for every selected `j`. False off the zero set.
pub fn gradient_condition_a(x: &RepClass, spec: &ZeroSetSpec) -> Result<bool> {
    let p = spec.profile_of(x)?;
    Ok(spec.hom_to_simples(&p).iter().all(|&h| h == 1))
}

/// A class `X′` in the zero set of the selection without `k`, with
/// `hom(X′, S_j) = 1 − δ_jk`, that degenerates to `X` by a cover in the
/// Hom-order restricted to that zero set. `None` when no such cover exists.
/// `X` must have codimension at most `r`, as every component does.
pub fn gradient_condition_b_witness(
    x: &RepClass,
    spec: &ZeroSetSpec,
    k: usize,
) -> Result<Option<RepClass>> {
    if !spec.selected.contains(&k) {
        return Err(Error::InvalidInput(format!("simple {k} is not selected")));
    }
    let parts = x.indexed(&spec.rs)?;
    if x.total(spec.alpha.len()) != spec.alpha {
        return Err(Error::InvalidInput(format!("class {x} does not have dimension {:?}", spec.alpha)));
    }
    let codim = class_ext(&spec.rs, &parts, &parts) as usize;
    if codim > spec.selected.len() {
        return Err(Error::InvalidInput(format!("class {x} has codimension {codim} > {}", spec.selected.len())));
    }
    let census = spec.census();
    let mut sorted = parts.clone();
    sorted.sort_unstable();
    let c = census
        .classes
        .iter()
        .position(|p| *p == sorted)
        .ok_or_else(|| Error::InvalidInput(format!("class {x} is not in the zero set of all but one selected simple")))?;
    Ok(witness_for(spec, c, k))
}

fn witness_for(spec: &ZeroSetSpec, c: usize, k: usize) -> Option<RepClass> {
    let census = spec.census();
    let target = &census.profiles[c];
    let rest: Vec<usize> = spec.selected.iter().copied().filter(|&j| j != k).collect();
    let pool: Vec<usize> = (0..census.classes.len())
        .filter(|&y| y != c && spec.in_zero_of(&census.profiles[y], &rest))
        .filter(|&y| profile_le(&census.profiles[y], target))
        .collect();
    let wanted: Vec<u32> = spec.selected.iter().map(|&j| u32::from(j != k)).collect();
    let mut candidates: Vec<usize> = pool
        .iter()
        .copied()
        .filter(|&y| spec.hom_to_simples(&census.profiles[y]) == wanted)
        .collect();
    candidates.sort_by(|&a, &b| census.classes[a].cmp(&census.classes[b]));
    candidates.into_iter().find_map(|y| {
        let py = &census.profiles[y];
        let covered = !pool
            .iter()
            .any(|&z| z != y && profile_le(py, &census.profiles[z]) && census.profiles[z] != *py);
        covered.then(|| RepClass::from_indexed(&spec.rs, &census.classes[y]))
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Reducedness {
    Reduced,
    /// A component whose generic class violates condition (a); `simple` is
    /// the 0-based index of the first simple with `hom ≠ 1`.
    NotReduced { component: RepClass, simple: usize, hom: u32 },
    Unverified(String),
}

/// Reducedness through the independent gradient conditions.
///
/// Along a degeneration `hom(−, S_j)` can only grow, so every class in a
/// component's closure has `hom(X, S_j) ≥ hom(N, S_j) ≥ 1` for its generic
/// class `N`; condition (a) is satisfiable in the closure iff `N` satisfies it.
pub fn reducedness_report(spec: &ZeroSetSpec) -> Reducedness {
    let comps = components(spec);
    reducedness_from(spec, &comps)
}

pub fn reducedness_from(spec: &ZeroSetSpec, comps: &[ComponentReport]) -> Reducedness {
    if !is_set_theoretic_ci(spec, comps) {
        return Reducedness::Unverified("zero set is not a set-theoretic complete intersection".into());
    }
    for c in comps {
        if let Some(pos) = c.hom_to_simples.iter().position(|&h| h != 1) {
            return Reducedness::NotReduced {
                component: c.class.clone(),
                simple: spec.selected[pos],
                hom: c.hom_to_simples[pos],
            };
        }
    }
    match comps.iter().find(|c| c.gradient_b_witnesses.is_none()) {
        Some(c) => Reducedness::Unverified(format!("no condition-(b) witness for component {}", c.class)),
        None => Reducedness::Reduced,
    }
}

/// Some class of the nullcone has no extensions with the generic representation in either direction.
pub fn zprime_nonempty(spec: &ZeroSetSpec) -> bool {
    let t = spec.generic.indexed(&spec.rs).expect("generic parts are roots");
    let mut found = false;
    for_each_class(&spec.rs, &spec.alpha, |p| {
        found = found
            || (spec.simple_idx.iter().all(|&s| p.iter().any(|&(i, _)| spec.rs.hom(i, s) > 0))
                && class_ext(&spec.rs, &t, p) == 0
                && class_ext(&spec.rs, p, &t) == 0);
    });
    found
}

/// Some class has `hom(X, S_j) = 1` for every simple.
pub fn h_nonempty(spec: &ZeroSetSpec) -> bool {
    let mut found = false;
    for_each_class(&spec.rs, &spec.alpha, |p| {
        found = found
            || spec.simple_idx.iter().all(|&s| {
                p.iter().map(|&(i, m)| m * spec.rs.hom(i, s)).sum::<u32>() == 1
            });
    });
    found
}

/// `dim Rep(Q, α) = Σ_a α_{ta} α_{ha}`.
pub fn rep_dimension(q: &Quiver, alpha: &[i64]) -> i64 {
    q.arcs().iter().map(|&(t, h)| alpha[t] * alpha[h]).sum()
}

/// Codimension of the orbit of `X` computed from the orbit dimension
/// `Σ α_x² − dim End(X)`.
pub fn orbit_codim(rs: &RootSystem, x: &RepClass) -> Result<i64> {
    let alpha = x.total(rs.quiver.vertex_count());
    let parts = x.indexed(rs)?;
    let end = class_hom(rs, &parts, &parts) as i64;
    let gl: i64 = alpha.iter().map(|a| a * a).sum();
    Ok(rep_dimension(&rs.quiver, &alpha) - (gl - end))
}

/// Constants of the multiplicity bounds: `(general bound, reduced-CI bound)`.
/// The first is `A:1, D/E:2, Ã:1, D̃/Ẽ:3`; the second `A:1`, other Dynkin `2`.
pub fn multiplicity_constants(c: Classification) -> (Option<u32>, Option<u32>) {
    match c {
        Classification::Dynkin(QuiverType::A, _) => (Some(1), Some(1)),
        Classification::Dynkin(_, _) => (Some(2), Some(2)),
        Classification::ExtendedDynkin(QuiverType::A, _) => (Some(1), None),
        Classification::ExtendedDynkin(_, _) => (Some(3), None),
        Classification::Wild => (None, None),
    }
}

/// Summary of a zero set as emitted by the command-line front end.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NullconeReport {
    pub components: Vec<ComponentReport>,
    pub ci: bool,
    pub verdict: Reducedness,
}

pub fn analyze(spec: &ZeroSetSpec) -> NullconeReport {
    let comps = components(spec);
    let ci = is_set_theoretic_ci(spec, &comps);
    let verdict = reducedness_from(spec, &comps);
    NullconeReport { components: comps, ci, verdict }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::presets::*;

    fn cls(parts: &[(&[i64], u32)]) -> RepClass {
        RepClass::new(parts.iter().map(|(r, m)| (r.to_vec(), *m)).collect())
    }

    #[test]
    fn a2_enumeration() {
        let rs = RootSystem::new(&a(2)).unwrap();
        assert_eq!(enumerate_classes(&rs, &[1, 1]).unwrap().len(), 2);
        let c = enumerate_classes(&rs, &[2, 2]).unwrap();
        assert_eq!(c.len(), 3);
        assert!(c.contains(&cls(&[(&[1, 1], 1), (&[1, 0], 1), (&[0, 1], 1)])));
    }

    #[test]
    fn a2_nullcone() {
        let spec = ZeroSetSpec::new(&a(2), &[1, 1], None).unwrap();
        let x = cls(&[(&[1, 0], 1), (&[0, 1], 1)]);
        let t = cls(&[(&[1, 1], 1)]);
        assert!(in_zero_set(&x, &spec).unwrap());
        assert!(!in_zero_set(&t, &spec).unwrap());
        assert!(degenerates_to(&spec.rs, &t, &x).unwrap());
        assert!(!degenerates_to(&spec.rs, &x, &t).unwrap());
        let comps = components(&spec);
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].class, x);
        assert_eq!(comps[0].codim, 1);
        assert!(is_set_theoretic_ci(&spec, &comps));
        assert!(gradient_condition_a(&x, &spec).unwrap());
        assert!(!gradient_condition_a(&t, &spec).unwrap());
        assert_eq!(gradient_condition_b_witness(&x, &spec, 0).unwrap(), Some(t));
        assert_eq!(reducedness_report(&spec), Reducedness::Reduced);
        assert!(zprime_nonempty(&spec));
        assert!(h_nonempty(&spec));
    }

    #[test]
    fn codim_two_ways() {
        let rs = RootSystem::new(&d(4)).unwrap();
        for c in enumerate_classes(&rs, &[2, 2, 2, 4]).unwrap() {
            let parts = c.indexed(&rs).unwrap();
            let ext = class_ext(&rs, &parts, &parts) as i64;
            assert_eq!(orbit_codim(&rs, &c).unwrap(), ext);
        }
    }

    #[test]
    fn constants_table() {
        assert_eq!(multiplicity_constants(a(3).classify()), (Some(1), Some(1)));
        assert_eq!(multiplicity_constants(d(4).classify()), (Some(2), Some(2)));
        assert_eq!(multiplicity_constants(kronecker().classify()), (Some(1), None));
    }

    #[test]
    fn empty_zero_set_has_no_components() {
        // a simple root: T = S_1 and the single perpendicular simple is never hit
        let spec = ZeroSetSpec::new(&a(2), &[1, 0], None).unwrap();
        assert!(components(&spec).is_empty());
    }
}
