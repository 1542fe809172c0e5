mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use matchkit::abelian::{coset_structure, cyclic_phi_psi, sumset, GroupSpec};
use matchkit::gfq::{largest_proper_divisor, BaseField};
use matchkit::harness::{conjecture_linear_deficiency, verify_linear_deficiency_run, RunConfig};
use matchkit::intersectfam::*;
use matchkit::linalg::{self, Vector};
use matchkit::matchgrp::{build_match_graph, coset_free_sufficiency, deficiency, max_matching};
use matchkit::matchlin::*;
use matchkit::report;
use matchkit::subspace::{kneser_bound_check, product_span, stabilizer};
use matchkit::{FieldElement, FieldTower, Subspace, SubspaceFamily};

use common::*;

const TOWERS: [(u64, u32, usize); 6] = [(2, 1, 2), (2, 1, 3), (2, 1, 4), (3, 1, 2), (2, 2, 2), (5, 1, 2)];

fn tower(i: usize) -> FieldTower {
    let (p, r, n) = TOWERS[i];
    FieldTower::new(p, r, n).unwrap()
}

fn raw_vectors(q: u32, n: usize, max: usize) -> impl Strategy<Value = Vec<Vector>> {
    prop::collection::vec(prop::collection::vec(0..q, n), 0..=max)
}

fn sub(t: &FieldTower, vs: Vec<Vector>) -> Subspace {
    span(t.base(), t.n(), vs)
}

fn residues(n: u64, max: usize) -> impl Strategy<Value = Vec<u64>> {
    prop::collection::btree_set(0..n, 1..=max).prop_map(|s| s.into_iter().collect())
}

/// Tower index plus up to `k` raw vectors for each of three subspaces.
fn tower_and_three(k: usize) -> impl Strategy<Value = (usize, Vec<Vector>, Vec<Vector>, Vec<Vector>)> {
    (0..TOWERS.len()).prop_flat_map(move |i| {
        let (p, r, n) = TOWERS[i];
        let q = p.pow(r) as u32;
        (Just(i), raw_vectors(q, n, k), raw_vectors(q, n, k), raw_vectors(q, n, k))
    })
}

proptest! {
    #[test]
    fn absorption_iff_coset((n, a, b) in (2u64..=12).prop_flat_map(|n| (Just(n), residues(n, 6), residues(n, 12)))) {
        prop_assume!(a.len() <= b.len());
        let g = GroupSpec::cyclic(n).unwrap();
        let (ga, gb) = (g.cyclic_subset(&a).unwrap(), g.cyclic_subset(&b).unwrap());
        let absorbs = sumset(&ga, &gb).unwrap() == ga;
        let c = coset_structure(&ga, &gb).unwrap();
        prop_assert_eq!(c.is_some(), absorbs);
        if c.is_some() {
            prop_assert!(gb.contains(&g.zero()));
            for x in gb.iter() {
                for y in gb.iter() {
                    prop_assert!(gb.contains(&g.add(x, y).unwrap()));
                }
            }
        }
    }

    #[test]
    fn sumset_commutes_and_translates((n, a, b, s) in (2u64..=20).prop_flat_map(|n| (Just(n), residues(n, 8), residues(n, 8), 0..n))) {
        let g = GroupSpec::cyclic(n).unwrap();
        let (ga, gb) = (g.cyclic_subset(&a).unwrap(), g.cyclic_subset(&b).unwrap());
        prop_assert_eq!(sumset(&ga, &gb).unwrap(), sumset(&gb, &ga).unwrap());
        let single = g.cyclic_subset(&[s]).unwrap();
        prop_assert_eq!(sumset(&ga, &single).unwrap().len(), ga.len());
    }

    #[test]
    fn cyclic_counts_add_up(p in prop::sample::select(vec![2u64, 3, 5, 7, 11, 13, 101]), r in 1u32..=6) {
        let c = cyclic_phi_psi(p, r).unwrap();
        prop_assert_eq!(c.psi, p.pow(r - 1));
        prop_assert_eq!(c.psi + c.phi, p.pow(r));
    }

    #[test]
    fn matching_deficiency_duality((n, a, b) in (2u64..=24).prop_flat_map(|n| {
        let k = 1..=(n as usize).min(10);
        (Just(n), k).prop_flat_map(move |(n, k)| {
            (Just(n), prop::collection::btree_set(0..n, k), prop::collection::btree_set(0..n, k))
        })
    })) {
        let a: Vec<u64> = a.into_iter().collect();
        let b: Vec<u64> = b.into_iter().collect();
        let g = GroupSpec::cyclic(n).unwrap();
        let (ga, gb) = (g.cyclic_subset(&a).unwrap(), g.cyclic_subset(&b).unwrap());
        let graph = build_match_graph(&ga, &gb).unwrap();
        let cert = max_matching(&graph);
        prop_assert!(cert.verify(&graph));
        let d = cyclic_deficiency(n, &a, &b);
        prop_assert_eq!(cert.size() + d, a.len());
        // Hall: perfect iff no deficient S
        prop_assert_eq!(cert.size() == a.len(), d == 0);
        prop_assert_eq!(cyclic_perfect_matching(n, &a, &b), d == 0);

        let rep = deficiency(&ga, &gb).unwrap();
        prop_assert_eq!((rep.m, rep.d), (cert.size(), d));
        let s: Vec<u64> = rep.violator.iter().map(|x| x.coords()[0]).collect();
        let aset: BTreeSet<u64> = a.iter().copied().collect();
        let nbrs = b.iter().filter(|&&y| s.iter().any(|&x| !aset.contains(&((x + y) % n)))).count();
        prop_assert_eq!(s.len() - nbrs.min(s.len()), d);

        if coset_free_sufficiency(&ga, &gb).unwrap().is_empty() {
            prop_assert_eq!(cert.size(), a.len());
        }
    }

    #[test]
    fn degree_is_least_fixing_power(i in 0..TOWERS.len(), idx in any::<u64>()) {
        let t = tower(i);
        let x = t.from_index(idx % t.order());
        prop_assume!(!x.is_zero());
        prop_assert_eq!(t.degree_over_base(&x), brute_degree(&t, x.coeffs()));
    }

    #[test]
    fn subfields_are_closed(i in 0..TOWERS.len(), x in any::<u64>(), y in any::<u64>()) {
        let t = tower(i);
        for d in (1..=t.n()).filter(|d| t.n().is_multiple_of(*d)) {
            let s = t.fixed_space(d);
            prop_assert_eq!(s.dim(), d);
            prop_assert!(s.contains(t.one().coeffs()));
            let els = elements(&s);
            let a = FieldElement(els[(x % els.len() as u64) as usize].clone());
            let b = FieldElement(els[(y % els.len() as u64) as usize].clone());
            prop_assert!(s.contains(t.mul(&a, &b).coeffs()));
            if !a.is_zero() {
                prop_assert!(s.contains(t.inv(&a).unwrap().coeffs()));
            }
        }
    }

    #[test]
    fn psi_is_largest_proper_divisor(n in 1usize..=6) {
        let t = FieldTower::new(2, 1, n).unwrap();
        let r = psi_phi(&t, PsiPhiMode::Exhaustive).unwrap();
        let want = if n == 1 { 0 } else { largest_proper_divisor(n) };
        prop_assert_eq!(r.psi, want);
        prop_assert_eq!(r.psi + r.phi, n.max(1));
        prop_assert!(is_primitive(&t, &r.witness_subspace));
    }

    #[test]
    fn rref_is_canonical((i, a, mix, _) in tower_and_three(4)) {
        let t = tower(i);
        let s = sub(&t, a.clone());
        let f = t.base();
        prop_assert_eq!(sub(&t, s.basis().to_vec()), s.clone());
        // any spanning set of the same space gives the same basis
        let mut gens: Vec<Vector> = s.basis().to_vec();
        for coeffs in mix.iter() {
            let c: Vec<u32> = coeffs.iter().take(s.dim()).copied().chain(std::iter::repeat(0)).take(s.dim()).collect();
            gens.push(linalg::combine(f, &c, s.basis(), t.n()));
        }
        gens.reverse();
        prop_assert_eq!(sub(&t, gens), s.clone());
        for v in &a {
            prop_assert!(s.contains(v));
        }
    }

    #[test]
    fn dimension_formula_and_modular_law((i, a, b, c) in tower_and_three(3)) {
        let t = tower(i);
        let (a, b, c) = (sub(&t, a), sub(&t, b), sub(&t, c));
        let sum = a.sum(&b).unwrap();
        let cap = a.intersect(&b).unwrap();
        prop_assert_eq!(a.dim() + b.dim(), sum.dim() + cap.dim());
        prop_assert!(cap.is_subspace_of(&a) && cap.is_subspace_of(&b));
        prop_assert!(a.is_subspace_of(&sum) && b.is_subspace_of(&sum));
        // A ⊆ A + C, so A + (B ∩ (A + C)) = (A + B) ∩ (A + C)
        let big = a.sum(&c).unwrap();
        prop_assert_eq!(
            a.sum(&b.intersect(&big).unwrap()).unwrap(),
            a.sum(&b).unwrap().intersect(&big).unwrap()
        );
        if cap.is_zero() && sum.intersect(&c).unwrap().is_zero() {
            prop_assert!(a.sum(&c).unwrap().intersect(&b).unwrap().is_zero());
        }
    }

    #[test]
    fn annihilator_duality((i, a, b, _) in tower_and_three(3)) {
        let t = tower(i);
        let (a, b) = (sub(&t, a), sub(&t, b));
        let ann = a.annihilator();
        prop_assert_eq!(a.dim() + ann.dim(), t.n());
        for f in ann.basis() {
            for v in a.basis() {
                prop_assert_eq!(linalg::dot(t.base(), f, v), 0);
            }
        }
        prop_assert_eq!(
            a.intersect(&b).unwrap().annihilator(),
            ann.sum(&b.annihilator()).unwrap()
        );
    }

    #[test]
    fn stabilizer_is_a_subfield((i, w, _, _) in tower_and_three(3)) {
        let t = tower(i);
        let w = sub(&t, w);
        prop_assume!(!w.is_zero());
        let st = stabilizer(&t, &w).unwrap();
        prop_assert_eq!(st.clone(), brute_stabilizer(&t, &w));
        prop_assert!(st.contains(t.one().coeffs()));
        for x in st.basis() {
            for y in st.basis() {
                prop_assert!(st.contains(&mul(&t, x, y)));
            }
        }
    }

    #[test]
    fn product_span_is_monotone_and_bounded((i, a, extra, b) in tower_and_three(3)) {
        let t = tower(i);
        let a0 = sub(&t, a.clone());
        let a1 = sub(&t, a.into_iter().chain(extra).collect());
        let b = sub(&t, b);
        prop_assume!(!a0.is_zero() && !b.is_zero());
        let p0 = product_span(&t, &a0, &b).unwrap();
        prop_assert_eq!(p0.clone(), brute_product_span(&t, &a0, &b));
        prop_assert!(p0.is_subspace_of(&product_span(&t, &a1, &b).unwrap()));
        prop_assert!(kneser_bound_check(&t, &a0, &b).unwrap().holds);
    }
}

fn tower_and_pair() -> impl Strategy<Value = (usize, usize, Vec<Vector>, Vec<Vector>)> {
    (0..TOWERS.len()).prop_flat_map(|i| {
        let (p, r, n) = TOWERS[i];
        let q = p.pow(r) as u32;
        (1..=n).prop_flat_map(move |k| {
            let v = prop::collection::vec(prop::collection::vec(0..q, n), k + 2);
            (Just(i), Just(k), v.clone(), v)
        })
    })
}

/// First `k` independent vectors among `vs`, in order.
fn independent_prefix(f: &BaseField, n: usize, vs: &[Vector], k: usize) -> Option<Vec<Vector>> {
    let mut out: Vec<Vector> = Vec::new();
    for v in vs {
        out.push(v.clone());
        if linalg::rank(f, &out, n) < out.len() {
            out.pop();
        }
        if out.len() == k {
            return Some(out);
        }
    }
    None
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn basis_criterion_matches_definition((i, k, av, bv) in tower_and_pair()) {
        let t = tower(i);
        let f = t.base();
        let basis = independent_prefix(f, t.n(), &av, k);
        let bb = independent_prefix(f, t.n(), &bv, k);
        prop_assume!(basis.is_some() && bb.is_some());
        let basis = basis.unwrap();
        let a = sub(&t, basis.clone());
        let b = sub(&t, bb.unwrap());
        let seq = BasisSeq::of(&t, &a, basis.iter().cloned().map(FieldElement).collect()).unwrap();
        let ex = check_basis_matched(&t, &seq, &b, BasisMatchMode::ExhaustiveJ).unwrap();
        let ra = check_basis_matched(&t, &seq, &b, BasisMatchMode::Rado).unwrap();
        prop_assert_eq!(ex.matched, ra.matched);
        prop_assert_eq!(ex.matched, brute_basis_partner(&t, &a, &basis, &b).is_some());
        for r in [&ex, &ra] {
            if let Some(p) = &r.partner_basis {
                prop_assert!(verify_partner(&t, &seq, &b, p).unwrap());
            }
            prop_assert_eq!(r.matched, r.partner_basis.is_some());
        }
        let (worst, _) = basis_deficiency(&t, &seq, &b).unwrap();
        prop_assert_eq!(worst == 0, ex.matched);
    }

    #[test]
    fn subspace_verdicts_respect_theorems((i, k, av, bv) in tower_and_pair()) {
        let t = tower(i);
        let f = t.base();
        let (Some(ab), Some(bb)) = (independent_prefix(f, t.n(), &av, k), independent_prefix(f, t.n(), &bv, k)) else {
            return Ok(());
        };
        let (a, b) = (sub(&t, ab), sub(&t, bb));
        let v = subspace_matched(&t, &a, &b, DEFAULT_BASIS_BUDGET, 3).unwrap();
        prop_assert_eq!(v.is_matched(), brute_subspace_matched(&t, &a, &b));
        if translate_obstructions(&t, &a, &b).unwrap().is_empty() {
            prop_assert!(v.is_matched());
        }
        if k > 1 && v.is_matched() {
            prop_assert!(!product_span_neq_check(&t, &a, &b).unwrap().product_equals_a);
        }
    }

    #[test]
    fn transversal_agrees_with_search(
        dim in 2usize..=4,
        raw in prop::collection::vec(prop::collection::vec(prop::collection::vec(0u32..2, 4), 0..=2), 1..=4),
    ) {
        let f = BaseField::prime(2).unwrap();
        let members: Vec<Subspace> = raw
            .into_iter()
            .map(|vs| span(&f, dim, vs.into_iter().map(|v| v[..dim].to_vec()).collect()))
            .collect();
        let fam = SubspaceFamily::new(members.clone()).unwrap();
        let exists = brute_free_transversal(&f, dim, &members);
        match free_transversal(&f, dim, &fam).unwrap() {
            TransversalOutcome::Found(c) => {
                prop_assert!(exists);
                prop_assert!(c.vectors.iter().zip(&members).all(|(v, u)| u.contains(v)));
                prop_assert_eq!(linalg::rank(&f, &c.vectors, dim), members.len());
            }
            TransversalOutcome::Violator(j) => {
                prop_assert!(!exists);
                let gens: Vec<Vector> = j.iter().flat_map(|&i| members[i].basis().to_vec()).collect();
                prop_assert!(linalg::rank(&f, &gens, dim) < j.len());
            }
        }
    }

    #[test]
    fn set_and_dimension_checkers_agree(
        (n, m, raw) in (2usize..=5).prop_flat_map(|n| (Just(n), 2..=n + 1)).prop_flat_map(|(n, m)| {
            (Just(n), Just(m), prop::collection::vec(prop::sample::subsequence((1..=n).collect::<Vec<_>>(), m - 1), 1..m))
        })
    ) {
        let members: Vec<BTreeSet<usize>> = raw.into_iter().map(|v| v.into_iter().collect()).collect();
        let sets = SetFamily::new(n, m, members.clone()).unwrap();
        let f = BaseField::prime(2).unwrap();
        let unit = |j: usize| (1..=n).map(|x| u32::from(x == j)).collect::<Vec<u32>>();
        let spaces = SubspaceFamily::new(
            members.iter().map(|s| span(&f, n, s.iter().map(|&j| unit(j)).collect())).collect(),
        )
        .unwrap();
        let by_sets = check_set_intersection_property(&sets, IntersectionVariant::Strict).unwrap();
        let by_dims = check_dimension_intersection_property(&spaces, m).unwrap();
        prop_assert_eq!(by_sets.is_none(), by_dims.is_none());
        if n < m {
            let refused = matches!(
                extend_set_family(&sets),
                Err(matchkit::Error::Precondition(_)) | Err(matchkit::Error::PropertyViolated { .. })
            );
            prop_assert!(refused);
        }
        if by_sets.is_none() && n >= m {
            let ext = extend_set_family(&sets).unwrap();
            prop_assert_eq!(ext.members.len(), m);
            prop_assert_eq!(&ext.members[..members.len()], &members[..]);
            prop_assert_eq!(check_set_intersection_property(&ext, IntersectionVariant::Strict).unwrap(), None);
        }
    }

    #[test]
    fn dimension_extension_is_verified(n in 2usize..=4, picks in prop::collection::vec(any::<prop::sample::Index>(), 1..=3)) {
        let f = BaseField::prime(2).unwrap();
        let hs = hyperplanes(&f, n).unwrap();
        let members: Vec<Subspace> = picks.iter().take(n - 1).map(|ix| ix.get(&hs).clone()).collect();
        let fam = SubspaceFamily::new(members.clone()).unwrap();
        prop_assume!(check_dimension_intersection_property(&fam, n).unwrap().is_none());
        let ext = extend_dimension_family(&f, n, &fam, n).unwrap();
        prop_assert_eq!(ext.len(), n);
        prop_assert_eq!(&ext.members()[..members.len()], &members[..]);
        prop_assert_eq!(check_dimension_intersection_property(&ext, n).unwrap(), None);

        let cert = dual_basis_pipeline(&f, n, &fam).unwrap();
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(linalg::dot(&f, &cert.functionals[i], &cert.basis[j]), u32::from(i == j));
            }
        }
        let fm = cert.family.members();
        for i in 0..n {
            prop_assert!(fm[i].is_subspace_of(&cert.kernels[i]));
            prop_assert_eq!(cert.kernels[i].clone(), brute_kernel(&f, n, &cert.functionals[i]));
            for j in 0..n {
                if fm[i] != fm[j] {
                    prop_assert!(cert.kernels[i].sum(&cert.kernels[j]).unwrap().is_full());
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn harness_runs_are_deterministic(seed in any::<u64>(), n in 2usize..=3) {
        let t = FieldTower::new(2, 1, n).unwrap();
        let cfg = RunConfig { seed, ..RunConfig::default() };
        let first = conjecture_linear_deficiency(&t, None, &cfg).unwrap();
        let second = conjecture_linear_deficiency(&t, None, &cfg).unwrap();
        prop_assert_eq!(report::to_json(&first), report::to_json(&second));
        prop_assert_eq!(first.config.seed, seed);
        prop_assert_eq!(verify_linear_deficiency_run(&first).unwrap(), first.cases.len());
    }
}
