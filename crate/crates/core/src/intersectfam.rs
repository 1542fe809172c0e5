//! Families of sets and subspaces with bounded intersections, and free
//! transversals of subspace families.
//!
//! A family `J_1, ..., J_t` of `(m-1)`-subsets of `{1..n}` has the
//! intersection property when `#∩_{i∈I} J_i <= m - #I` for every nonempty
//! `I`. The linear analogue replaces cardinality by dimension. Index sets in
//! violators are 0-based positions in the family.

use std::collections::{BTreeSet, VecDeque};
use std::sync::Arc;

use serde::Serialize;

use crate::error::{internal, precondition, structural, Error, Result};
use crate::gfq::BaseField;
use crate::linalg::{self, Vector};
use crate::subspace::{combinations, enumerate_subspaces, lex_subsets, Subspace, SubspaceFamily};

/// Families with more members than this are not checked exhaustively.
pub const MAX_FAMILY_SIZE: usize = 20;
/// Node cap for the extension searches.
pub const EXTENSION_NODE_BUDGET: usize = 1_000_000;
const MAX_CANDIDATES: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SetFamily {
    pub n: usize,
    pub m: usize,
    pub members: Vec<BTreeSet<usize>>,
}

impl SetFamily {
    /// Members are subsets of `{1..n}` of size `m - 1`.
    pub fn new(n: usize, m: usize, members: Vec<BTreeSet<usize>>) -> Result<Self> {
        if m == 0 {
            return Err(structural("m must be at least 1"));
        }
        for (i, j) in members.iter().enumerate() {
            if j.len() != m - 1 {
                return Err(structural(format!("member {i} has size {}, expected {}", j.len(), m - 1)));
            }
            if j.iter().any(|&x| x == 0 || x > n) {
                return Err(structural(format!("member {i} is not a subset of 1..{n}")));
            }
        }
        Ok(SetFamily { n, m, members })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IntersectionVariant {
    /// `#∩ J_i <= m - #I`
    Strict,
    /// `#∩ J_i <= m - 1 - #I`, the shifted bound
    Weak,
}

fn check_family_size(t: usize) -> Result<()> {
    if t > MAX_FAMILY_SIZE {
        return Err(Error::CapExceeded(format!(
            "family has {t} members; at most {MAX_FAMILY_SIZE} can be checked exhaustively"
        )));
    }
    Ok(())
}

/// `None` when the property holds, otherwise the first violating index set.
pub fn check_set_intersection_property(fam: &SetFamily, variant: IntersectionVariant) -> Result<Option<Vec<usize>>> {
    check_family_size(fam.members.len())?;
    let slack = match variant {
        IntersectionVariant::Strict => 0,
        IntersectionVariant::Weak => 1,
    };
    for idx in lex_subsets(fam.members.len()) {
        let mut acc = fam.members[idx[0]].clone();
        for &i in &idx[1..] {
            acc = acc.intersection(&fam.members[i]).copied().collect();
        }
        if acc.len() + idx.len() + slack > fam.m {
            return Ok(Some(idx));
        }
    }
    Ok(None)
}

/// Violation test restricted to index sets containing the last member.
fn last_member_violates<T>(members: &[T], m: usize, meet_dim: impl Fn(&[usize]) -> Result<usize>) -> Result<bool> {
    let last = members.len() - 1;
    for rest in lex_subsets(last).into_iter().chain(std::iter::once(Vec::new())) {
        let mut idx = rest;
        idx.push(last);
        if meet_dim(&idx)? + idx.len() > m {
            return Ok(true);
        }
    }
    Ok(false)
}

fn extend_by_search<T: Clone>(
    start: Vec<T>,
    target: usize,
    candidates: &[T],
    m: usize,
    meet_dim: impl Fn(&[T], &[usize]) -> Result<usize>,
) -> Result<Vec<T>> {
    let mut members = start;
    let mut nodes = 0usize;
    let mut cursor = vec![0usize];
    // iterative depth-first search; cursor[k] is the next candidate to try
    // at depth k
    let base = members.len();
    while members.len() < target {
        let depth = members.len() - base;
        let mut advanced = false;
        while cursor[depth] < candidates.len() {
            nodes += 1;
            if nodes > EXTENSION_NODE_BUDGET {
                return Err(Error::CapExceeded("extension search exhausted its node budget".into()));
            }
            let c = candidates[cursor[depth]].clone();
            cursor[depth] += 1;
            members.push(c);
            let bad = last_member_violates(&members, m, |idx| meet_dim(&members, idx))?;
            if bad {
                members.pop();
            } else {
                cursor.push(cursor[depth]);
                advanced = true;
                break;
            }
        }
        if !advanced {
            if depth == 0 {
                return Err(internal("no extension exists although the property holds"));
            }
            cursor.pop();
            members.pop();
        }
    }
    Ok(members)
}

/// Adds `(m-1)`-subsets until the family has `m` members, keeping the strict
/// property. Needs the strict property and `n >= m`.
pub fn extend_set_family(fam: &SetFamily) -> Result<SetFamily> {
    let t = fam.members.len();
    if t > fam.m {
        return Err(precondition(format!("family has {t} > m = {} members", fam.m)));
    }
    // with n = m - 1 every member is the whole ground set
    if t < fam.m && fam.n < fam.m {
        return Err(precondition(format!("need n >= m to add members, got n = {}, m = {}", fam.n, fam.m)));
    }
    if let Some(j) = check_set_intersection_property(fam, IntersectionVariant::Strict)? {
        return Err(Error::PropertyViolated { violator: j });
    }
    if t == fam.m {
        return Ok(fam.clone());
    }
    let count = combinations_count(fam.n, fam.m - 1);
    if count > MAX_CANDIDATES as u128 {
        return Err(Error::CapExceeded(format!("{count} candidate subsets")));
    }
    let candidates: Vec<BTreeSet<usize>> = combinations(fam.n, fam.m - 1)
        .into_iter()
        .map(|c| c.into_iter().map(|x| x + 1).collect())
        .collect();
    let members = extend_by_search(fam.members.clone(), fam.m, &candidates, fam.m, |ms, idx| {
        let mut acc = ms[idx[0]].clone();
        for &i in &idx[1..] {
            acc = acc.intersection(&ms[i]).copied().collect();
        }
        Ok(acc.len())
    })?;
    let out = SetFamily::new(fam.n, fam.m, members)?;
    if check_set_intersection_property(&out, IntersectionVariant::Strict)?.is_some() {
        return Err(internal("extended family lost the intersection property"));
    }
    Ok(out)
}

fn combinations_count(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn meet_dim(members: &[Subspace], idx: &[usize]) -> Result<usize> {
    let mut acc = members[idx[0]].clone();
    for &i in &idx[1..] {
        acc = acc.intersect(&members[i])?;
    }
    Ok(acc.dim())
}

fn check_dimension_members(fam: &SubspaceFamily, m: usize) -> Result<()> {
    if m == 0 {
        return Err(structural("m must be at least 1"));
    }
    if let Some((i, s)) = fam.members().iter().enumerate().find(|(_, s)| s.dim() + 1 != m) {
        return Err(structural(format!("member {i} has dimension {}, expected {}", s.dim(), m - 1)));
    }
    Ok(())
}

/// `None` when `dim ∩_{i∈I} U_i <= m - #I` for all nonempty `I`, otherwise
/// the first violating index set.
pub fn check_dimension_intersection_property(fam: &SubspaceFamily, m: usize) -> Result<Option<Vec<usize>>> {
    check_dimension_members(fam, m)?;
    check_family_size(fam.len())?;
    for idx in lex_subsets(fam.len()) {
        if meet_dim(fam.members(), &idx)? + idx.len() > m {
            return Ok(Some(idx));
        }
    }
    Ok(None)
}

/// Hyperplanes of `F_q^dim`, as kernels of covectors whose first nonzero
/// coordinate is 1, in covector index order.
pub fn hyperplanes(field: &Arc<BaseField>, dim: usize) -> Result<Vec<Subspace>> {
    let q = field.q() as u64;
    let total = q.checked_pow(dim as u32).filter(|&t| t <= crate::subspace::MAX_VECTOR_SCAN);
    let Some(total) = total else {
        return Err(Error::CapExceeded("too many hyperplanes to enumerate".into()));
    };
    let mut out = Vec::new();
    for idx in 1..total {
        let v = linalg::vector_from_index(field.q(), dim, idx);
        if v.iter().find(|&&c| c != 0) == Some(&1) {
            out.push(Subspace::span(field.clone(), dim, [v])?.annihilator());
        }
    }
    Ok(out)
}

/// Adds `(m-1)`-dimensional subspaces of `F_q^dim` until there are `m`
/// members, keeping the property.
pub fn extend_dimension_family(field: &Arc<BaseField>, dim: usize, fam: &SubspaceFamily, m: usize) -> Result<SubspaceFamily> {
    check_dimension_members(fam, m)?;
    if fam.members().iter().any(|s| s.ambient() != dim || **s.field() != **field) {
        return Err(structural("family members live in a different space"));
    }
    if m > dim {
        return Err(precondition(format!("need m <= dim, got m = {m}, dim = {dim}")));
    }
    if fam.len() > m {
        return Err(precondition(format!("family has {} > m = {m} members", fam.len())));
    }
    if let Some(j) = check_dimension_intersection_property(fam, m)? {
        return Err(Error::PropertyViolated { violator: j });
    }
    if fam.len() == m {
        return Ok(fam.clone());
    }
    let candidates = if m == dim {
        hyperplanes(field, dim)?
    } else {
        let count = crate::subspace::gaussian_binomial(field.q() as u64, dim, m - 1);
        if count > MAX_CANDIDATES as u128 {
            return Err(Error::CapExceeded(format!("{count} candidate subspaces")));
        }
        enumerate_subspaces(field, dim, m - 1)?
    };
    let members = extend_by_search(fam.members().to_vec(), m, &candidates, m, meet_dim)?;
    let out = SubspaceFamily::new(members)?;
    if check_dimension_intersection_property(&out, m)?.is_some() {
        return Err(internal("extended family lost the intersection property"));
    }
    Ok(out)
}

/// Linearly independent `x_i ∈ U_i`, one per member.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransversalCert {
    pub vectors: Vec<Vector>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", content = "value", rename_all = "snake_case")]
pub enum TransversalOutcome {
    Found(TransversalCert),
    /// `dim Σ_{i∈J} U_i < #J`
    Violator(Vec<usize>),
}

/// A free transversal of `fam` in `F_q^dim`, or an index set violating
/// `dim Σ_{i∈J} U_i >= #J`. Computed as a largest common independent set of
/// the linear matroid on the members' basis vectors and the partition
/// matroid grouping them by member.
pub fn free_transversal(field: &Arc<BaseField>, dim: usize, fam: &SubspaceFamily) -> Result<TransversalOutcome> {
    let t = fam.len();
    if fam.members().iter().any(|s| s.ambient() != dim) {
        return Err(structural("family members live in a different space"));
    }
    let ground: Vec<(usize, Vector)> = fam
        .members()
        .iter()
        .enumerate()
        .flat_map(|(i, s)| s.basis().iter().map(move |v| (i, v.clone())))
        .collect();
    let e = ground.len();
    let mut in_set = vec![false; e];

    let independent = |set: &[usize]| -> bool {
        let rows: Vec<Vector> = set.iter().map(|&k| ground[k].1.clone()).collect();
        linalg::rank(field, &rows, dim) == rows.len()
    };

    let reach = loop {
        let current: Vec<usize> = (0..e).filter(|&k| in_set[k]).collect();
        let used: BTreeSet<usize> = current.iter().map(|&k| ground[k].0).collect();
        let outside: Vec<usize> = (0..e).filter(|&k| !in_set[k]).collect();

        let is_source: Vec<bool> = (0..e)
            .map(|x| {
                !in_set[x] && {
                    let mut s = current.clone();
                    s.push(x);
                    independent(&s)
                }
            })
            .collect();
        let is_sink: Vec<bool> = (0..e).map(|x| !in_set[x] && !used.contains(&ground[x].0)).collect();

        // arcs y -> x when I - y + x is linearly independent, x -> y when
        // x and y belong to the same member
        let mut arcs: Vec<Vec<usize>> = vec![Vec::new(); e];
        for &y in &current {
            for &x in &outside {
                let mut s: Vec<usize> = current.iter().copied().filter(|&k| k != y).collect();
                s.push(x);
                if independent(&s) {
                    arcs[y].push(x);
                }
                if ground[x].0 == ground[y].0 {
                    arcs[x].push(y);
                }
            }
        }

        let mut prev: Vec<Option<usize>> = vec![None; e];
        let mut seen = vec![false; e];
        let mut queue = VecDeque::new();
        for x in 0..e {
            if is_source[x] {
                seen[x] = true;
                queue.push_back(x);
            }
        }
        let mut end = None;
        while let Some(u) = queue.pop_front() {
            if is_sink[u] {
                end = Some(u);
                break;
            }
            for &w in &arcs[u] {
                if !seen[w] {
                    seen[w] = true;
                    prev[w] = Some(u);
                    queue.push_back(w);
                }
            }
        }
        match end {
            Some(mut u) => {
                loop {
                    in_set[u] = !in_set[u];
                    match prev[u] {
                        Some(p) => u = p,
                        None => break,
                    }
                }
                if !independent(&(0..e).filter(|&k| in_set[k]).collect::<Vec<_>>()) {
                    return Err(internal("augmentation broke linear independence"));
                }
            }
            None => break seen,
        }
    };

    let chosen: Vec<usize> = (0..e).filter(|&k| in_set[k]).collect();
    if chosen.len() == t {
        let mut vectors = vec![Vec::new(); t];
        for &k in &chosen {
            vectors[ground[k].0] = ground[k].1.clone();
        }
        if linalg::rank(field, &vectors, dim) != t {
            return Err(internal("transversal is not independent"));
        }
        return Ok(TransversalOutcome::Found(TransversalCert { vectors }));
    }

    // members none of whose basis vectors are reachable
    let violator: Vec<usize> = (0..t)
        .filter(|&i| (0..e).all(|k| ground[k].0 != i || !reach[k]))
        .collect();
    let rows: Vec<Vector> = violator
        .iter()
        .flat_map(|&i| fam.members()[i].basis().iter().cloned())
        .collect();
    if violator.is_empty() || linalg::rank(field, &rows, dim) >= violator.len() {
        return Err(internal("no Rado violator found for a deficient family"));
    }
    Ok(TransversalOutcome::Violator(violator))
}

/// Dual bases adapted to a hyperplane family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DualBasisCert {
    /// The family, extended to `dim` members.
    #[serde(serialize_with = "crate::json::ser_family")]
    pub family: SubspaceFamily,
    pub added: usize,
    /// `x_1, ..., x_dim`
    pub basis: Vec<Vector>,
    /// `ψ_1, ..., ψ_dim` with `ψ_i(x_j) = δ_ij` and `U_i ⊆ ker ψ_i`.
    pub functionals: Vec<Vector>,
    #[serde(serialize_with = "crate::json::ser_subspace_list")]
    pub kernels: Vec<Subspace>,
}

/// For hyperplanes `U_1..U_t` of `F_q^dim` with the intersection property
/// (`m = dim`): extends the family, picks `ψ_i` spanning `U_i^⊥` via a free
/// transversal, and returns the dual basis.
pub fn dual_basis_pipeline(field: &Arc<BaseField>, dim: usize, fam: &SubspaceFamily) -> Result<DualBasisCert> {
    if dim == 0 {
        return Err(precondition("dimension must be positive"));
    }
    let extended = extend_dimension_family(field, dim, fam, dim)?;
    let annihilators = SubspaceFamily::new(extended.members().iter().map(Subspace::annihilator).collect())?;
    let functionals = match free_transversal(field, dim, &annihilators)? {
        TransversalOutcome::Found(c) => c.vectors,
        TransversalOutcome::Violator(j) => {
            return Err(internal(format!("annihilators of an intersecting family have violator {j:?}")))
        }
    };
    let inv = linalg::inverse(field, &functionals).ok_or_else(|| internal("functionals are dependent"))?;
    let basis: Vec<Vector> = (0..dim).map(|j| inv.iter().map(|row| row[j]).collect()).collect();
    let kernels: Vec<Subspace> = functionals
        .iter()
        .map(|psi| Subspace::span(field.clone(), dim, [psi.clone()]).map(|s| s.annihilator()))
        .collect::<Result<_>>()?;

    for (i, psi) in functionals.iter().enumerate() {
        for (j, x) in basis.iter().enumerate() {
            if linalg::dot(field, psi, x) != u32::from(i == j) {
                return Err(internal("functionals are not dual to the basis"));
            }
        }
        if !extended.members()[i].is_subspace_of(&kernels[i]) {
            return Err(internal("member is not inside the kernel of its functional"));
        }
    }
    for i in 0..dim {
        for j in i + 1..dim {
            if extended.members()[i] != extended.members()[j] && !kernels[i].sum(&kernels[j])?.is_full() {
                return Err(internal("kernels of distinct members do not span"));
            }
        }
    }
    Ok(DualBasisCert {
        added: extended.len() - fam.len(),
        family: extended,
        basis,
        functionals,
        kernels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(xs: &[usize]) -> BTreeSet<usize> {
        xs.iter().copied().collect()
    }

    #[test]
    fn set_examples() {
        let fam = SetFamily::new(3, 3, vec![set(&[1, 2]), set(&[1, 3])]).unwrap();
        assert_eq!(check_set_intersection_property(&fam, IntersectionVariant::Strict).unwrap(), None);
        let ext = extend_set_family(&fam).unwrap();
        assert_eq!(ext.members.len(), 3);
        assert_eq!(ext.members[2], set(&[2, 3]));

        let fam = SetFamily::new(3, 3, vec![set(&[1, 2]), set(&[1, 2])]).unwrap();
        assert_eq!(
            check_set_intersection_property(&fam, IntersectionVariant::Strict).unwrap(),
            Some(vec![0, 1])
        );
        assert_eq!(
            extend_set_family(&fam),
            Err(Error::PropertyViolated { violator: vec![0, 1] })
        );
    }

    #[test]
    fn weak_variant_is_stricter() {
        let fam = SetFamily::new(3, 3, vec![set(&[1, 2])]).unwrap();
        assert_eq!(check_set_intersection_property(&fam, IntersectionVariant::Strict).unwrap(), None);
        assert_eq!(
            check_set_intersection_property(&fam, IntersectionVariant::Weak).unwrap(),
            Some(vec![0])
        );
    }

    #[test]
    fn transversal_and_violator() {
        let f = BaseField::prime(2).unwrap();
        let l1 = Subspace::span(f.clone(), 2, [vec![1, 0]]).unwrap();
        let l2 = Subspace::span(f.clone(), 2, [vec![0, 1]]).unwrap();
        let fam = SubspaceFamily::new(vec![l1.clone(), l2]).unwrap();
        match free_transversal(&f, 2, &fam).unwrap() {
            TransversalOutcome::Found(c) => assert_eq!(c.vectors, vec![vec![1, 0], vec![0, 1]]),
            v => panic!("{v:?}"),
        }
        let fam = SubspaceFamily::new(vec![l1.clone(), l1]).unwrap();
        assert_eq!(free_transversal(&f, 2, &fam).unwrap(), TransversalOutcome::Violator(vec![0, 1]));
    }

    #[test]
    fn transversal_needs_augmenting_path() {
        // greedy picks e1 for U_1 = F_2^2 and then fails on U_2 = <e1>
        let f = BaseField::prime(2).unwrap();
        let full = Subspace::full(f.clone(), 2);
        let l1 = Subspace::span(f.clone(), 2, [vec![1, 0]]).unwrap();
        let fam = SubspaceFamily::new(vec![full, l1]).unwrap();
        match free_transversal(&f, 2, &fam).unwrap() {
            TransversalOutcome::Found(c) => {
                assert_eq!(c.vectors[1], vec![1, 0]);
                assert_eq!(linalg::rank(&f, &c.vectors, 2), 2);
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn dual_basis_for_two_planes() {
        let f = BaseField::prime(2).unwrap();
        let u1 = Subspace::span(f.clone(), 3, [vec![1, 0, 0], vec![0, 1, 0]]).unwrap();
        let u2 = Subspace::span(f.clone(), 3, [vec![1, 0, 0], vec![0, 0, 1]]).unwrap();
        let cert = dual_basis_pipeline(&f, 3, &SubspaceFamily::new(vec![u1, u2]).unwrap()).unwrap();
        assert_eq!(cert.family.len(), 3);
        assert_eq!(cert.added, 1);
        assert_eq!(cert.basis.len(), 3);
    }

    #[test]
    fn hyperplane_count() {
        let f = BaseField::prime(3).unwrap();
        assert_eq!(hyperplanes(&f, 3).unwrap().len(), 13);
    }
}
