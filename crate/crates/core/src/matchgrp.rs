//! Matchings between subsets of a finite abelian group.
//!
//! `a` may be paired with `b` exactly when `a + b` leaves `A`. The bipartite
//! graph on `A ∪ B` with those edges carries everything: maximum matchings,
//! the deficiency `D(A,B) = max_S (#S - #N(S))` and the relation
//! `M(A,B) = #A - D(A,B)`.

use std::collections::VecDeque;

use serde::Serialize;

use crate::abelian::{sumset, GroupElement, GroupSubset};
use crate::error::{internal, precondition, structural, Result};

/// Subsets of `A` larger than this skip the `2^#A` deficiency oracle.
pub const BRUTE_FORCE_CAP: usize = 20;

const NONE: usize = usize::MAX;

/// The bipartite graph `G_{A,B}`.
#[derive(Debug, Clone)]
pub struct MatchGraph {
    left: Vec<GroupElement>,
    right: Vec<GroupElement>,
    /// `adjacency[i]` lists indices `j` into `right` with `left[i] + right[j] ∉ A`,
    /// ascending.
    adjacency: Vec<Vec<usize>>,
}

impl MatchGraph {
    pub fn left(&self) -> &[GroupElement] {
        &self.left
    }

    pub fn right(&self) -> &[GroupElement] {
        &self.right
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adjacency
    }

    /// `B_a` for the `i`-th element of `A`.
    pub fn neighbours(&self, i: usize) -> impl Iterator<Item = &GroupElement> {
        self.adjacency[i].iter().map(|&j| &self.right[j])
    }

    pub fn has_edge(&self, a: &GroupElement, b: &GroupElement) -> bool {
        let (Ok(i), Ok(j)) = (self.left.binary_search(a), self.right.binary_search(b)) else {
            return false;
        };
        self.adjacency[i].binary_search(&j).is_ok()
    }
}

pub fn build_match_graph(a: &GroupSubset, b: &GroupSubset) -> Result<MatchGraph> {
    if a.parent() != b.parent() {
        return Err(structural("A and B live in different groups"));
    }
    if a.len() != b.len() {
        return Err(structural(format!(
            "matching needs #A = #B, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(structural("matching needs nonempty A and B"));
    }
    let g = a.parent();
    let left = a.to_vec();
    let right = b.to_vec();
    let adjacency = left
        .iter()
        .map(|x| {
            right
                .iter()
                .enumerate()
                .filter(|(_, y)| !a.contains(&g.add_unchecked(x, y)))
                .map(|(j, _)| j)
                .collect()
        })
        .collect();
    Ok(MatchGraph {
        left,
        right,
        adjacency,
    })
}

/// A partial matching: pairs `(a, b)` with `a + b ∉ A`, injective on both sides,
/// sorted by `a`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MatchCertificateG {
    pub pairs: Vec<(GroupElement, GroupElement)>,
}

impl MatchCertificateG {
    pub fn size(&self) -> usize {
        self.pairs.len()
    }

    /// Re-checks the certificate against the graph.
    pub fn verify(&self, g: &MatchGraph) -> bool {
        let mut used_a = vec![false; g.left.len()];
        let mut used_b = vec![false; g.right.len()];
        for (a, b) in &self.pairs {
            let (Ok(i), Ok(j)) = (g.left.binary_search(a), g.right.binary_search(b)) else {
                return false;
            };
            if used_a[i] || used_b[j] || g.adjacency[i].binary_search(&j).is_err() {
                return false;
            }
            used_a[i] = true;
            used_b[j] = true;
        }
        true
    }
}

/// Hopcroft–Karp over the vertices not excluded by the masks. Returns the
/// matching as `mate_left[i] = j` (or `NONE`).
fn hopcroft_karp(
    adjacency: &[Vec<usize>],
    n_right: usize,
    left_alive: &[bool],
    right_alive: &[bool],
) -> Vec<usize> {
    let n_left = adjacency.len();
    let mut mate_l = vec![NONE; n_left];
    let mut mate_r = vec![NONE; n_right];
    let mut dist = vec![0usize; n_left];

    loop {
        // BFS layering from free left vertices
        let mut queue = VecDeque::new();
        for i in 0..n_left {
            if left_alive[i] && mate_l[i] == NONE {
                dist[i] = 0;
                queue.push_back(i);
            } else {
                dist[i] = NONE;
            }
        }
        let mut found = false;
        while let Some(i) = queue.pop_front() {
            for &j in &adjacency[i] {
                if !right_alive[j] {
                    continue;
                }
                match mate_r[j] {
                    NONE => found = true,
                    k if dist[k] == NONE => {
                        dist[k] = dist[i] + 1;
                        queue.push_back(k);
                    }
                    _ => {}
                }
            }
        }
        if !found {
            return mate_l;
        }
        for i in 0..n_left {
            if left_alive[i] && mate_l[i] == NONE {
                augment(i, adjacency, right_alive, &mut mate_l, &mut mate_r, &mut dist);
            }
        }
    }
}

fn augment(
    i: usize,
    adjacency: &[Vec<usize>],
    right_alive: &[bool],
    mate_l: &mut [usize],
    mate_r: &mut [usize],
    dist: &mut [usize],
) -> bool {
    for &j in &adjacency[i] {
        if !right_alive[j] {
            continue;
        }
        let k = mate_r[j];
        let ok = k == NONE
            || (dist[k] == dist[i].wrapping_add(1)
                && augment(k, adjacency, right_alive, mate_l, mate_r, dist));
        if ok {
            mate_l[i] = j;
            mate_r[j] = i;
            return true;
        }
    }
    dist[i] = NONE;
    false
}

fn matching_size(mate_l: &[usize]) -> usize {
    mate_l.iter().filter(|&&j| j != NONE).count()
}

/// A maximum matching; among all maximum matchings the lexicographically least
/// pair list (pairs sorted by `a`, compared in canonical element order).
pub fn max_matching(g: &MatchGraph) -> MatchCertificateG {
    let n_left = g.left.len();
    let n_right = g.right.len();
    let mut left_alive = vec![true; n_left];
    let mut right_alive = vec![true; n_right];
    let target = matching_size(&hopcroft_karp(&g.adjacency, n_right, &left_alive, &right_alive));

    let mut pairs = Vec::with_capacity(target);
    for i in 0..n_left {
        if pairs.len() == target {
            break;
        }
        left_alive[i] = false;
        // if no partner keeps the maximum size, left[i] stays unmatched
        for &j in &g.adjacency[i] {
            if !right_alive[j] {
                continue;
            }
            right_alive[j] = false;
            let rest = matching_size(&hopcroft_karp(&g.adjacency, n_right, &left_alive, &right_alive));
            if pairs.len() + 1 + rest == target {
                pairs.push((g.left[i].clone(), g.right[j].clone()));
                break;
            }
            right_alive[j] = true;
        }
    }
    let cert = MatchCertificateG { pairs };
    debug_assert!(cert.verify(g));
    cert
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DeficiencyMethod {
    /// Value confirmed by exhaustive enumeration over all subsets of `A`.
    BruteForce,
    /// Value from `#A - max matching` only.
    HallDuality,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeficiencyReportG {
    /// Size of a maximum matching.
    #[serde(rename = "M")]
    pub m: usize,
    /// `max_S (#S - #N(S))`.
    #[serde(rename = "D")]
    pub d: usize,
    pub violator: Vec<GroupElement>,
    pub method: DeficiencyMethod,
    pub matching: MatchCertificateG,
    pub sumset_equals_a: bool,
    pub zero_in_b: bool,
}

/// Exhaustive `max over S ⊆ A of #S - #N(S)` with the first maximising mask.
pub fn brute_force_deficiency(g: &MatchGraph) -> (usize, u64) {
    let n = g.left.len();
    assert!(n <= 63);
    let nbr_masks: Vec<u64> = g
        .adjacency
        .iter()
        .map(|js| js.iter().fold(0u64, |m, &j| m | (1 << j)))
        .collect();
    let mut best = (0usize, 0u64);
    for s in 1u64..(1u64 << n) {
        let mut nbrs = 0u64;
        let mut bits = s;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            nbrs |= nbr_masks[i];
            bits &= bits - 1;
        }
        let diff = s.count_ones() as i64 - nbrs.count_ones() as i64;
        if diff > best.0 as i64 {
            best = (diff as usize, s);
        }
    }
    best
}

/// Left vertices reachable by alternating paths from unmatched left vertices.
/// Their neighbourhood is exactly the matched partners, so the set attains
/// `#S - #N(S) = #unmatched`.
fn koenig_violator(g: &MatchGraph, cert: &MatchCertificateG) -> Vec<usize> {
    let n = g.left.len();
    let mut mate_l = vec![NONE; n];
    let mut mate_r = vec![NONE; g.right.len()];
    for (a, b) in &cert.pairs {
        let i = g.left.binary_search(a).expect("left vertex");
        let j = g.right.binary_search(b).expect("right vertex");
        mate_l[i] = j;
        mate_r[j] = i;
    }
    let mut seen = vec![false; n];
    let mut queue: VecDeque<usize> = (0..n).filter(|&i| mate_l[i] == NONE).collect();
    for &i in &queue {
        seen[i] = true;
    }
    while let Some(i) = queue.pop_front() {
        for &j in &g.adjacency[i] {
            let k = mate_r[j];
            if k != NONE && !seen[k] {
                seen[k] = true;
                queue.push_back(k);
            }
        }
    }
    (0..n).filter(|&i| seen[i]).collect()
}

fn neighbourhood_size(g: &MatchGraph, s: &[usize]) -> usize {
    let mut hit = vec![false; g.right.len()];
    for &i in s {
        for &j in &g.adjacency[i] {
            hit[j] = true;
        }
    }
    hit.iter().filter(|&&h| h).count()
}

/// Deficiency of `(A, B)`, computed through matching duality and, when
/// `#A <= BRUTE_FORCE_CAP`, confirmed by exhaustive enumeration.
pub fn deficiency(a: &GroupSubset, b: &GroupSubset) -> Result<DeficiencyReportG> {
    let g = build_match_graph(a, b)?;
    let cert = max_matching(&g);
    if !cert.verify(&g) {
        return Err(internal("maximum matching failed re-verification"));
    }
    let n = g.left.len();
    let m = cert.size();
    let d = n - m;

    let violator_idx = koenig_violator(&g, &cert);
    let attained = violator_idx.len() as i64 - neighbourhood_size(&g, &violator_idx) as i64;
    if attained != d as i64 {
        return Err(internal(format!(
            "violator attains {attained}, expected deficiency {d}"
        )));
    }

    let method = if n <= BRUTE_FORCE_CAP {
        let (bf, _) = brute_force_deficiency(&g);
        if bf != d {
            return Err(internal(format!(
                "duality gives D = {d} but exhaustive search gives {bf}"
            )));
        }
        DeficiencyMethod::BruteForce
    } else {
        DeficiencyMethod::HallDuality
    };

    let sumset_equals_a = sumset(a, b)? == *a;
    if sumset_equals_a != (m == 0) {
        return Err(internal("M(A,B) = 0 must coincide with A + B = A"));
    }

    Ok(DeficiencyReportG {
        m,
        d,
        violator: violator_idx.iter().map(|&i| g.left[i].clone()).collect(),
        method,
        matching: cert,
        sumset_equals_a,
        zero_in_b: b.contains(&a.parent().zero()),
    })
}

/// `b ∈ B` together with a coset `c + <b>` contained in `A`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CosetObstruction {
    pub b: GroupElement,
    pub coset: Vec<GroupElement>,
}

/// Every pair `(b, c + <b>)` with `c + <b> ⊆ A`. An empty list means no `b ∈ B`
/// has a coset of its cyclic subgroup inside `A`, which guarantees a perfect
/// matching.
pub fn coset_free_sufficiency(a: &GroupSubset, b: &GroupSubset) -> Result<Vec<CosetObstruction>> {
    if a.parent() != b.parent() {
        return Err(structural("A and B live in different groups"));
    }
    if a.len() != b.len() {
        return Err(precondition("coset_free_sufficiency needs #A = #B"));
    }
    let g = a.parent();
    let mut out = Vec::new();
    for y in b.iter() {
        let h = g.subgroup_generated(y)?;
        let mut seen: Vec<GroupSubset> = Vec::new();
        for x in a.iter() {
            let coset = h.translate(x);
            if coset.is_subset(a) && !seen.contains(&coset) {
                seen.push(coset);
            }
        }
        seen.sort_by(|p, q| p.iter().cmp(q.iter()));
        out.extend(seen.into_iter().map(|c| CosetObstruction {
            b: y.clone(),
            coset: c.to_vec(),
        }));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::GroupSpec;

    fn cyc(n: u64, a: &[u64], b: &[u64]) -> (GroupSubset, GroupSubset) {
        let g = GroupSpec::cyclic(n).unwrap();
        (g.cyclic_subset(a).unwrap(), g.cyclic_subset(b).unwrap())
    }

    fn e(x: u64) -> GroupElement {
        GroupElement(vec![x])
    }

    #[test]
    fn graph_examples() {
        let (a, b) = cyc(6, &[1, 2, 3, 4, 5], &[1, 2, 3, 4, 5]);
        let g = build_match_graph(&a, &b).unwrap();
        assert!(g.has_edge(&e(1), &e(5)));

        let (a, b) = cyc(5, &[1, 2], &[3, 4]);
        let g = build_match_graph(&a, &b).unwrap();
        assert!(g.has_edge(&e(1), &e(3)));
        assert!(g.has_edge(&e(1), &e(4)));
        assert!(g.has_edge(&e(2), &e(3)));
        assert!(!g.has_edge(&e(2), &e(4)));

        let (a, b) = cyc(3, &[0], &[1]);
        assert!(build_match_graph(&a, &b).unwrap().has_edge(&e(0), &e(1)));
        let (a, b) = cyc(3, &[0], &[0]);
        assert!(!build_match_graph(&a, &b).unwrap().has_edge(&e(0), &e(0)));
    }

    #[test]
    fn graph_rejects_bad_sizes() {
        let (a, b) = cyc(5, &[1, 2], &[3]);
        assert!(build_match_graph(&a, &b).is_err());
        let (a, b) = cyc(5, &[], &[]);
        assert!(build_match_graph(&a, &b).is_err());
    }

    #[test]
    fn matching_examples() {
        let (a, b) = cyc(6, &[1, 2, 3, 4, 5], &[1, 2, 3, 4, 5]);
        let g = build_match_graph(&a, &b).unwrap();
        assert_eq!(max_matching(&g).size(), 5);

        let (a, b) = cyc(4, &[1, 3], &[0, 2]);
        let g = build_match_graph(&a, &b).unwrap();
        assert_eq!(max_matching(&g).size(), 0);

        let (a, b) = cyc(5, &[1, 2], &[3, 4]);
        let g = build_match_graph(&a, &b).unwrap();
        let m = max_matching(&g);
        assert_eq!(m.pairs, vec![(e(1), e(4)), (e(2), e(3))]);
    }

    #[test]
    fn matching_is_lexicographically_least() {
        // Z/7, A = {1,2,3}, B = {1,2,3}: brute-force every perfect matching
        let (a, b) = cyc(7, &[1, 2, 3], &[1, 2, 3]);
        let g = build_match_graph(&a, &b).unwrap();
        let mut best: Option<Vec<(GroupElement, GroupElement)>> = None;
        let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        for p in perms {
            let pairs: Vec<_> = (0..3).map(|i| (g.left[i].clone(), g.right[p[i]].clone())).collect();
            if (MatchCertificateG { pairs: pairs.clone() }).verify(&g) && best.as_ref().is_none_or(|b| pairs < *b) {
                best = Some(pairs);
            }
        }
        assert_eq!(max_matching(&g).pairs, best.unwrap());
    }

    #[test]
    fn deficiency_examples() {
        let (a, b) = cyc(4, &[1, 3], &[0, 2]);
        let r = deficiency(&a, &b).unwrap();
        assert_eq!((r.m, r.d), (0, 2));
        assert_eq!(r.violator, vec![e(1), e(3)]);
        assert!(r.sumset_equals_a);
        assert!(r.zero_in_b);
        assert_eq!(r.method, DeficiencyMethod::BruteForce);

        let (a, b) = cyc(6, &[1, 2, 3, 4, 5], &[1, 2, 3, 4, 5]);
        let r = deficiency(&a, &b).unwrap();
        assert_eq!((r.m, r.d), (5, 0));

        let (a, b) = cyc(2, &[1], &[1]);
        let r = deficiency(&a, &b).unwrap();
        assert_eq!((r.m, r.d), (1, 0));
    }

    #[test]
    fn deficiency_beyond_cap_uses_duality() {
        let n = 50u64;
        let a: Vec<u64> = (0..25).collect();
        let b: Vec<u64> = (1..26).collect();
        let (a, b) = cyc(n, &a, &b);
        let r = deficiency(&a, &b).unwrap();
        assert_eq!(r.method, DeficiencyMethod::HallDuality);
        assert_eq!(r.m + r.d, 25);
    }

    #[test]
    fn coset_obstruction_examples() {
        let (a, b) = cyc(6, &[1, 2, 3, 4, 5], &[1, 2, 3, 4, 5]);
        let obs = coset_free_sufficiency(&a, &b).unwrap();
        assert!(obs.contains(&CosetObstruction {
            b: e(3),
            coset: vec![e(1), e(4)]
        }));

        let (a, b) = cyc(5, &[1, 2], &[3, 4]);
        assert!(coset_free_sufficiency(&a, &b).unwrap().is_empty());

        let (a, b) = cyc(4, &[1, 3], &[1, 2]);
        let obs = coset_free_sufficiency(&a, &b).unwrap();
        assert_eq!(
            obs,
            vec![CosetObstruction {
                b: e(2),
                coset: vec![e(1), e(3)]
            }]
        );
    }
}
