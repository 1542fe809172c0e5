// Brute-force oracles shared by the integration targets. None of them call
// into the algorithms they check.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use matchkit::gfq::BaseField;
use matchkit::linalg::{self, Vector};
use matchkit::{FieldElement, FieldTower, Subspace};

/// `max over S ⊆ A of #S - #{b : a + b ∉ A for some a ∈ S}` in `Z/n`.
pub fn cyclic_deficiency(n: u64, a: &[u64], b: &[u64]) -> usize {
    let aset: BTreeSet<u64> = a.iter().copied().collect();
    let mut best = 0usize;
    for mask in 0u32..(1 << a.len()) {
        let s: Vec<u64> = (0..a.len()).filter(|i| mask >> i & 1 == 1).map(|i| a[i]).collect();
        let nbrs = b
            .iter()
            .filter(|&&y| s.iter().any(|&x| !aset.contains(&((x + y) % n))))
            .count();
        best = best.max(s.len().saturating_sub(nbrs));
    }
    best
}

/// Whether some bijection `A → B` has `a + f(a) ∉ A` throughout.
pub fn cyclic_perfect_matching(n: u64, a: &[u64], b: &[u64]) -> bool {
    let aset: BTreeSet<u64> = a.iter().copied().collect();
    let mut perm: Vec<usize> = (0..b.len()).collect();
    permutations(&mut perm, 0, &mut |p| {
        a.iter().zip(p).all(|(&x, &j)| !aset.contains(&((x + b[j]) % n)))
    })
}

fn permutations(v: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize]) -> bool) -> bool {
    if k == v.len() {
        return f(v);
    }
    for i in k..v.len() {
        v.swap(k, i);
        if permutations(v, k + 1, f) {
            v.swap(k, i);
            return true;
        }
        v.swap(k, i);
    }
    false
}

pub fn subsets_of_size(universe: &[u64], k: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << universe.len()) {
        if mask.count_ones() as usize == k {
            out.push((0..universe.len()).filter(|i| mask >> i & 1 == 1).map(|i| universe[i]).collect());
        }
    }
    out
}

/// All vectors of `F_q^len`.
pub fn all_vectors(f: &BaseField, len: usize) -> Vec<Vector> {
    let q = f.q() as u64;
    (0..q.pow(len as u32)).map(|i| linalg::vector_from_index(f.q(), len, i)).collect()
}

/// Elements of a subspace by enumerating all coefficient combinations.
pub fn elements(s: &Subspace) -> Vec<Vector> {
    let f = s.field();
    all_vectors(f, s.dim())
        .into_iter()
        .map(|c| linalg::combine(f, &c, s.basis(), s.ambient()))
        .collect()
}

pub fn nonzero_elements(s: &Subspace) -> Vec<Vector> {
    elements(s).into_iter().filter(|v| !linalg::is_zero(v)).collect()
}

/// Every ordered basis of `s`, by brute force over tuples of elements.
pub fn ordered_bases(s: &Subspace) -> Vec<Vec<Vector>> {
    let f = s.field().clone();
    let k = s.dim();
    let els = nonzero_elements(s);
    let mut out = Vec::new();
    let mut cur: Vec<Vector> = Vec::new();
    fn go(f: &BaseField, k: usize, len: usize, els: &[Vector], cur: &mut Vec<Vector>, out: &mut Vec<Vec<Vector>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for e in els {
            cur.push(e.clone());
            if linalg::rank(f, cur, len) == cur.len() {
                go(f, k, len, els, cur, out);
            }
            cur.pop();
        }
    }
    go(&f, k, s.ambient(), &els, &mut cur, &mut out);
    out
}

pub fn mul(t: &FieldTower, x: &[u32], y: &[u32]) -> Vector {
    t.mul(&FieldElement(x.to_vec()), &FieldElement(y.to_vec())).0
}

pub fn span(f: &Arc<BaseField>, len: usize, vs: Vec<Vector>) -> Subspace {
    Subspace::span(f.clone(), len, vs).unwrap()
}

/// Definition of a matched basis: some ordered basis `(b_j)` of `B` with
/// `a_i b ∈ A ⇒ b ∈ span(b_j : j ≠ i)` for every `i` and every `b ∈ B`.
/// Returns such a partner.
pub fn brute_basis_partner(t: &FieldTower, a: &Subspace, basis: &[Vector], b: &Subspace) -> Option<Vec<Vector>> {
    let f = t.base().clone();
    let n = t.n();
    let b_elems = nonzero_elements(b);
    let bad: Vec<Vec<Vector>> = basis
        .iter()
        .map(|ai| b_elems.iter().filter(|y| a.contains(&mul(t, ai, y))).cloned().collect())
        .collect();
    ordered_bases(b).into_iter().find(|cand| {
        (0..basis.len()).all(|i| {
            let others: Vec<Vector> = (0..cand.len()).filter(|&j| j != i).map(|j| cand[j].clone()).collect();
            let h = span(&f, n, others);
            bad[i].iter().all(|y| h.contains(y))
        })
    })
}

/// Every ordered basis of `A` has a partner.
pub fn brute_subspace_matched(t: &FieldTower, a: &Subspace, b: &Subspace) -> bool {
    ordered_bases(a)
        .iter()
        .all(|basis| brute_basis_partner(t, a, basis, b).is_some())
}

/// Span of all products of basis vectors.
pub fn brute_product_span(t: &FieldTower, a: &Subspace, b: &Subspace) -> Subspace {
    let prods = a
        .basis()
        .iter()
        .flat_map(|x| b.basis().iter().map(move |y| (x, y)))
        .map(|(x, y)| mul(t, x, y))
        .collect();
    span(t.base(), t.n(), prods)
}

/// `{x : xW ⊆ W}` by scanning every field element.
pub fn brute_stabilizer(t: &FieldTower, w: &Subspace) -> Subspace {
    let keep = all_vectors(t.base(), t.n())
        .into_iter()
        .filter(|x| w.basis().iter().all(|y| w.contains(&mul(t, x, y))))
        .collect();
    span(t.base(), t.n(), keep)
}

/// Degree of `x` over the base field: least `d ≥ 1` with `x^(q^d) = x`.
pub fn brute_degree(t: &FieldTower, x: &[u32]) -> usize {
    let q = t.q() as u64;
    let x = FieldElement(x.to_vec());
    (1..=t.n())
        .find(|&d| t.pow(&x, q.pow(d as u32)) == x)
        .unwrap()
}

pub fn is_primitive(t: &FieldTower, s: &Subspace) -> bool {
    nonzero_elements(s).iter().all(|x| brute_degree(t, x) == t.n())
}

/// Existence of linearly independent `x_i ∈ U_i`.
pub fn brute_free_transversal(f: &BaseField, len: usize, members: &[Subspace]) -> bool {
    fn go(f: &BaseField, len: usize, members: &[Subspace], cur: &mut Vec<Vector>) -> bool {
        if cur.len() == members.len() {
            return true;
        }
        for x in nonzero_elements(&members[cur.len()]) {
            cur.push(x);
            if linalg::rank(f, cur, len) == cur.len() && go(f, len, members, cur) {
                return true;
            }
            cur.pop();
        }
        false
    }
    go(f, len, members, &mut Vec::new())
}

/// Kernel of a functional as a subspace, by scanning vectors.
pub fn brute_kernel(f: &Arc<BaseField>, len: usize, functional: &[u32]) -> Subspace {
    let vs = all_vectors(f, len)
        .into_iter()
        .filter(|v| linalg::dot(f, functional, v) == 0)
        .collect();
    span(f, len, vs)
}
