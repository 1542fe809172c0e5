//! Finite abelian groups `Z/d_1 x ... x Z/d_k`, their subsets, sumsets and
//! coset structure.
//!
//! Elements are residue vectors ordered lexicographically; every set-valued
//! output is sorted in that order.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{internal, precondition, structural, Error, Result};

/// Largest group order accepted by operations that enumerate the group.
pub const MAX_ENUMERABLE_ORDER: u64 = 1 << 20;

/// A finite abelian group given by its invariant factors.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    factors: Vec<u64>,
    order: u64,
}

impl GroupSpec {
    pub fn new(factors: Vec<u64>) -> Result<Self> {
        if factors.is_empty() {
            return Err(structural("group needs at least one invariant factor"));
        }
        let mut order: u64 = 1;
        for &d in &factors {
            if d == 0 {
                return Err(structural("invariant factors must be >= 1"));
            }
            order = order
                .checked_mul(d)
                .ok_or_else(|| structural("group order overflows u64"))?;
        }
        Ok(GroupSpec { factors, order })
    }

    pub fn cyclic(d: u64) -> Result<Self> {
        Self::new(vec![d])
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub(crate) fn ensure_enumerable(&self) -> Result<()> {
        if self.order > MAX_ENUMERABLE_ORDER {
            return Err(Error::CapExceeded(format!(
                "group order {} exceeds the enumeration cap {}",
                self.order, MAX_ENUMERABLE_ORDER
            )));
        }
        Ok(())
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement(vec![0; self.factors.len()])
    }

    /// Builds an element, rejecting unreduced or mis-sized coordinates.
    pub fn element(&self, coords: Vec<u64>) -> Result<GroupElement> {
        if coords.len() != self.factors.len() {
            return Err(structural(format!(
                "element has {} coordinates, group has {} factors",
                coords.len(),
                self.factors.len()
            )));
        }
        for (c, d) in coords.iter().zip(&self.factors) {
            if c >= d {
                return Err(structural(format!("coordinate {c} not reduced mod {d}")));
            }
        }
        Ok(GroupElement(coords))
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        g.0.len() == self.factors.len() && g.0.iter().zip(&self.factors).all(|(c, d)| c < d)
    }

    fn check(&self, g: &GroupElement) -> Result<()> {
        if self.contains(g) {
            Ok(())
        } else {
            Err(structural(format!("element {g} is not in group {self}")))
        }
    }

    pub fn add(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        self.check(h)?;
        Ok(self.add_unchecked(g, h))
    }

    pub(crate) fn add_unchecked(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        GroupElement(
            g.0.iter()
                .zip(&h.0)
                .zip(&self.factors)
                // c, e < d, so c + (e - d) never underflows when c + e >= d
                .map(|((&c, &e), &d)| if c >= d - e { c - (d - e) } else { c + e })
                .collect(),
        )
    }

    pub fn neg(&self, g: &GroupElement) -> GroupElement {
        GroupElement(
            g.0.iter()
                .zip(&self.factors)
                .map(|(&c, &d)| if c == 0 { 0 } else { d - c })
                .collect(),
        )
    }

    /// All elements in lexicographic order.
    pub fn elements(&self) -> Result<Vec<GroupElement>> {
        self.ensure_enumerable()?;
        let mut out = Vec::with_capacity(self.order as usize);
        let mut cur = vec![0u64; self.factors.len()];
        loop {
            out.push(GroupElement(cur.clone()));
            // odometer with the last coordinate fastest, giving lexicographic order
            let mut i = self.factors.len();
            loop {
                if i == 0 {
                    return Ok(out);
                }
                i -= 1;
                cur[i] += 1;
                if cur[i] < self.factors[i] {
                    break;
                }
                cur[i] = 0;
            }
        }
    }

    /// The cyclic subgroup generated by `b`.
    pub fn subgroup_generated(&self, b: &GroupElement) -> Result<GroupSubset> {
        self.check(b)?;
        let zero = self.zero();
        let mut elements = BTreeSet::new();
        elements.insert(zero.clone());
        let mut cur = b.clone();
        while cur != zero {
            elements.insert(cur.clone());
            cur = self.add_unchecked(&cur, b);
        }
        Ok(GroupSubset {
            parent: self.clone(),
            elements,
        })
    }

    pub fn subset<I>(&self, elements: I) -> Result<GroupSubset>
    where
        I: IntoIterator<Item = GroupElement>,
    {
        let mut set = BTreeSet::new();
        for e in elements {
            self.check(&e)?;
            if !set.insert(e.clone()) {
                return Err(structural(format!("duplicate element {e}")));
            }
        }
        Ok(GroupSubset {
            parent: self.clone(),
            elements: set,
        })
    }

    /// Convenience constructor for subsets of a cyclic group.
    pub fn cyclic_subset(&self, residues: &[u64]) -> Result<GroupSubset> {
        if self.rank() != 1 {
            return Err(structural("cyclic_subset needs a cyclic group"));
        }
        self.subset(residues.iter().map(|&r| GroupElement(vec![r])))
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|d| format!("Z/{d}")).collect();
        write!(f, "{}", parts.join(" x "))
    }
}

/// A residue vector; ordering is lexicographic on coordinates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement(pub(crate) Vec<u64>);

impl GroupElement {
    pub fn coords(&self) -> &[u64] {
        &self.0
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            write!(f, "{}", self.0[0])
        } else {
            let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
            write!(f, "({})", parts.join(","))
        }
    }
}

/// A finite subset of a [`GroupSpec`], kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupSubset {
    parent: GroupSpec,
    elements: BTreeSet<GroupElement>,
}

impl GroupSubset {
    pub fn parent(&self) -> &GroupSpec {
        &self.parent
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.elements.contains(g)
    }

    pub fn iter(&self) -> impl Iterator<Item = &GroupElement> {
        self.elements.iter()
    }

    pub fn to_vec(&self) -> Vec<GroupElement> {
        self.elements.iter().cloned().collect()
    }

    pub fn is_subset(&self, other: &GroupSubset) -> bool {
        self.elements.is_subset(&other.elements)
    }

    /// Translate `g + self`.
    pub fn translate(&self, g: &GroupElement) -> GroupSubset {
        GroupSubset {
            parent: self.parent.clone(),
            elements: self
                .elements
                .iter()
                .map(|a| self.parent.add_unchecked(a, g))
                .collect(),
        }
    }

    /// Exhaustive subgroup test: nonempty, contains 0, closed under addition
    /// and negation.
    pub fn is_subgroup(&self) -> bool {
        let g = &self.parent;
        if !self.contains(&g.zero()) {
            return false;
        }
        self.elements.iter().all(|x| {
            self.contains(&g.neg(x))
                && self
                    .elements
                    .iter()
                    .all(|y| self.contains(&g.add_unchecked(x, y)))
        })
    }
}

fn same_parent(a: &GroupSubset, b: &GroupSubset) -> Result<()> {
    if a.parent != b.parent {
        return Err(structural(format!(
            "subsets live in different groups ({} vs {})",
            a.parent, b.parent
        )));
    }
    Ok(())
}

/// `A + B = {a + b}`.
pub fn sumset(a: &GroupSubset, b: &GroupSubset) -> Result<GroupSubset> {
    same_parent(a, b)?;
    let g = &a.parent;
    let elements = a
        .elements
        .iter()
        .flat_map(|x| b.elements.iter().map(move |y| g.add_unchecked(x, y)))
        .collect();
    Ok(GroupSubset {
        parent: g.clone(),
        elements,
    })
}

/// Witness that `A + B = A`: `B` is a subgroup and `A = rep + B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetStructure {
    pub subgroup: GroupSubset,
    pub rep: GroupElement,
}

/// Returns the coset structure of `(A, B)` when `A + B = A`, `None` otherwise.
///
/// Requires `A`, `B` nonempty with `#A <= #B`. Under that hypothesis `A + B = A`
/// forces `B` to be a subgroup containing 0 with `A` one of its cosets; each of
/// those facts is re-verified and a failure is reported as an internal error.
/// Commutativity is never used.
pub fn coset_structure(a: &GroupSubset, b: &GroupSubset) -> Result<Option<CosetStructure>> {
    same_parent(a, b)?;
    if a.is_empty() || b.is_empty() {
        return Err(precondition("coset_structure needs nonempty A and B"));
    }
    if a.len() > b.len() {
        return Err(precondition(format!(
            "coset_structure needs #A <= #B, got {} > {}",
            a.len(),
            b.len()
        )));
    }
    if sumset(a, b)? != *a {
        return Ok(None);
    }
    if !b.is_subgroup() {
        return Err(internal("A + B = A with #A <= #B but B is not a subgroup"));
    }
    if !b.contains(&a.parent.zero()) {
        return Err(internal("A + B = A but 0 is not in B"));
    }
    let rep = a.elements.iter().next().cloned().expect("nonempty");
    // A = rep + B as a left coset
    let coset = GroupSubset {
        parent: a.parent.clone(),
        elements: b
            .elements
            .iter()
            .map(|y| a.parent.add_unchecked(&rep, y))
            .collect(),
    };
    if coset != *a {
        return Err(internal("A + B = A but A is not a coset of B"));
    }
    Ok(Some(CosetStructure {
        subgroup: b.clone(),
        rep,
    }))
}

/// Largest proper subgroup order and generator count of `Z/p^r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclicReport {
    pub p: u64,
    pub r: u32,
    pub psi: u64,
    pub phi: u64,
}

/// Deterministic Miller-Rabin for 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &w in &WITNESSES {
        if n.is_multiple_of(w) {
            return n == w;
        }
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(acc, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        acc
    };
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'outer: for &w in &WITNESSES {
        let mut x = powmod(w, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

pub fn cyclic_phi_psi(p: u64, r: u32) -> Result<CyclicReport> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if r == 0 {
        return Err(precondition("exponent r must be positive"));
    }
    let order = p
        .checked_pow(r)
        .ok_or_else(|| Error::CapExceeded(format!("{p}^{r} overflows u64")))?;
    let psi = order / p;
    let phi = order - psi;
    if psi + phi != order {
        return Err(internal("psi + phi != p^r"));
    }
    Ok(CyclicReport { p, r, psi, phi })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: u64) -> GroupSpec {
        GroupSpec::cyclic(n).unwrap()
    }

    fn el(g: &GroupSpec, c: &[u64]) -> GroupElement {
        g.element(c.to_vec()).unwrap()
    }

    #[test]
    fn addition_examples() {
        let g = z(6);
        assert_eq!(g.add(&el(&g, &[4]), &el(&g, &[5])).unwrap(), el(&g, &[3]));
        assert_eq!(g.add(&el(&g, &[0]), &el(&g, &[2])).unwrap(), el(&g, &[2]));
        let h = GroupSpec::new(vec![2, 3]).unwrap();
        assert_eq!(
            h.add(&el(&h, &[1, 2]), &el(&h, &[1, 2])).unwrap(),
            el(&h, &[0, 1])
        );
    }

    #[test]
    fn add_rejects_foreign_elements() {
        let g = z(6);
        let h = GroupSpec::new(vec![2, 3]).unwrap();
        assert!(matches!(
            g.add(&el(&g, &[1]), &el(&h, &[1, 1])),
            Err(Error::Structural(_))
        ));
        assert!(g.element(vec![6]).is_err());
    }

    #[test]
    fn huge_groups_are_rejected() {
        assert!(GroupSpec::new(vec![u64::MAX, 2]).is_err());
        assert!(GroupSpec::new(vec![]).is_err());
        assert!(GroupSpec::new(vec![0]).is_err());
        let big = GroupSpec::new(vec![1 << 21]).unwrap();
        assert!(matches!(big.elements(), Err(Error::CapExceeded(_))));
    }

    #[test]
    fn subgroup_examples() {
        let g = z(6);
        let s = g.subgroup_generated(&el(&g, &[3])).unwrap();
        assert_eq!(s, g.cyclic_subset(&[0, 3]).unwrap());
        let s = g.subgroup_generated(&el(&g, &[0])).unwrap();
        assert_eq!(s, g.cyclic_subset(&[0]).unwrap());
        let s = g.subgroup_generated(&el(&g, &[1])).unwrap();
        assert_eq!(s.len(), 6);
        assert!(s.is_subgroup());
    }

    #[test]
    fn sumset_examples() {
        let g = z(6);
        let a = g.cyclic_subset(&[1, 4]).unwrap();
        let b = g.cyclic_subset(&[0, 3]).unwrap();
        assert_eq!(sumset(&a, &b).unwrap(), a);
        let a = g.cyclic_subset(&[2]).unwrap();
        let b = g.cyclic_subset(&[0]).unwrap();
        assert_eq!(sumset(&a, &b).unwrap(), a);
        let g = z(5);
        let a = g.cyclic_subset(&[1, 2]).unwrap();
        let b = g.cyclic_subset(&[3, 4]).unwrap();
        assert_eq!(sumset(&a, &b).unwrap(), g.cyclic_subset(&[0, 1, 4]).unwrap());
    }

    #[test]
    fn coset_examples() {
        let g = z(4);
        let a = g.cyclic_subset(&[1, 3]).unwrap();
        let b = g.cyclic_subset(&[0, 2]).unwrap();
        let cs = coset_structure(&a, &b).unwrap().unwrap();
        assert_eq!(cs.subgroup, b);
        assert_eq!(cs.rep, el(&g, &[1]));

        let g = z(6);
        let a = g.cyclic_subset(&[1, 4]).unwrap();
        let b = g.cyclic_subset(&[0, 3]).unwrap();
        let cs = coset_structure(&a, &b).unwrap().unwrap();
        assert_eq!(cs.rep, el(&g, &[1]));

        let g = z(5);
        let a = g.cyclic_subset(&[1, 2]).unwrap();
        let b = g.cyclic_subset(&[3, 4]).unwrap();
        assert!(coset_structure(&a, &b).unwrap().is_none());
    }

    #[test]
    fn coset_precondition() {
        let g = z(6);
        let a = g.cyclic_subset(&[1, 2, 3]).unwrap();
        let b = g.cyclic_subset(&[0]).unwrap();
        assert!(matches!(coset_structure(&a, &b), Err(Error::Precondition(_))));
        let e = g.cyclic_subset(&[]).unwrap();
        assert!(coset_structure(&e, &b).is_err());
    }

    #[test]
    fn cyclic_report_examples() {
        let r = cyclic_phi_psi(2, 3).unwrap();
        assert_eq!((r.psi, r.phi), (4, 4));
        let r = cyclic_phi_psi(5, 1).unwrap();
        assert_eq!((r.psi, r.phi), (1, 4));
        let r = cyclic_phi_psi(3, 2).unwrap();
        assert_eq!((r.psi, r.phi), (3, 6));
        // brute-force generator count of Z/9
        let g = z(9);
        let gens = g
            .elements()
            .unwrap()
            .iter()
            .filter(|x| g.subgroup_generated(x).unwrap().len() == 9)
            .count();
        assert_eq!(gens as u64, r.phi);
        assert_eq!(cyclic_phi_psi(4, 2), Err(Error::NotPrime(4)));
    }

    #[test]
    fn elements_are_lexicographic() {
        let g = GroupSpec::new(vec![2, 3]).unwrap();
        let els = g.elements().unwrap();
        assert_eq!(els.len(), 6);
        assert!(els.windows(2).all(|w| w[0] < w[1]));
    }
}
