//! Linear matchings between `F_q`-subspaces of `F_{q^n}`.
//!
//! An ordered basis `(a_1, ..., a_k)` of `A` is matched to a basis
//! `(b_1, ..., b_k)` of `B` when `a_i^{-1}A ∩ B ⊆ <b_j : j ≠ i>` for every `i`.
//! A basis can be matched to some basis of `B` exactly when
//! `dim ∩_{i∈J} (a_i^{-1}A ∩ B) <= k - #J` for all nonempty `J`. Passing to
//! annihilators inside `B^*` turns that condition into Rado's condition for a
//! free transversal, and the transversal itself is the dual of a partner
//! basis.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{internal, precondition, structural, Error, Result};
use crate::gfq::{FieldElement, FieldTower, MAX_SWEEP_ORDER};
use crate::intersectfam::{free_transversal, TransversalOutcome};
use crate::linalg::{self, Vector};
use crate::subspace::{
    combinations, enumerate_subspaces, find_uncovered_vector, is_primitive_subspace, lex_subsets,
    product_span, scale, translates_into, Subspace, SubspaceFamily,
};

/// Default cap on ordered bases enumerated by [`subspace_matched`].
pub const DEFAULT_BASIS_BUDGET: u128 = 1_000_000;
/// Seed for the sampling fallback of [`subspace_matched`].
pub const DEFAULT_SAMPLE_SEED: u64 = 0x6d61_7463_686b_6974;
const SAMPLE_COUNT: usize = 256;

/// An ordered basis of a subspace of `F_{q^n}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisSeq {
    vectors: Vec<FieldElement>,
    parent: Subspace,
}

impl BasisSeq {
    /// The ordered basis `vectors` of the subspace they span.
    pub fn new(tower: &FieldTower, vectors: Vec<FieldElement>) -> Result<Self> {
        if vectors.iter().any(|v| !tower.contains(v)) {
            return Err(structural("basis vector is not an element of the tower"));
        }
        let parent = Subspace::in_tower(tower, vectors.iter().cloned())?;
        if parent.dim() != vectors.len() {
            return Err(structural("basis vectors are linearly dependent"));
        }
        Ok(BasisSeq { vectors, parent })
    }

    /// Checks that `vectors` is a basis of `parent`.
    pub fn of(tower: &FieldTower, parent: &Subspace, vectors: Vec<FieldElement>) -> Result<Self> {
        let seq = Self::new(tower, vectors)?;
        if seq.parent != *parent {
            return Err(structural("vectors do not span the given subspace"));
        }
        Ok(seq)
    }

    pub fn vectors(&self) -> &[FieldElement] {
        &self.vectors
    }

    pub fn parent(&self) -> &Subspace {
        &self.parent
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisMatchMode {
    ExhaustiveJ,
    Rado,
}

/// `(J, dim ∩_{i∈J} (a_i^{-1}A ∩ B))` pairs.
pub type CriterionDims = Vec<(Vec<usize>, usize)>;

/// Outcome of [`check_basis_matched`]. Index sets are 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BasisMatchReport {
    pub matched: bool,
    pub mode: BasisMatchMode,
    pub violating_j: Option<Vec<usize>>,
    /// `(J, dim ∩_{i∈J} (a_i^{-1}A ∩ B))` for every inspected `J`.
    pub criterion_dims: CriterionDims,
    pub partner_basis: Option<Vec<FieldElement>>,
}

/// `a_i^{-1}A ∩ B` for each basis vector.
pub fn criterion_spaces(tower: &FieldTower, basis: &BasisSeq, b: &Subspace) -> Result<Vec<Subspace>> {
    basis
        .vectors
        .iter()
        .map(|a| {
            let inv = tower.inv(a)?;
            scale(tower, &inv, &basis.parent)?.intersect(b)
        })
        .collect()
}

fn intersection_dim(spaces: &[Subspace], j: &[usize]) -> Result<usize> {
    let mut acc = spaces[j[0]].clone();
    for &i in &j[1..] {
        acc = acc.intersect(&spaces[i])?;
    }
    Ok(acc.dim())
}

/// Largest `#J` over index sets violating the dimension criterion, with the
/// full table of criterion dimensions.
pub fn basis_deficiency(tower: &FieldTower, basis: &BasisSeq, b: &Subspace) -> Result<(usize, CriterionDims)> {
    let k = basis.len();
    let spaces = criterion_spaces(tower, basis, b)?;
    let mut dims = Vec::new();
    let mut worst = 0;
    for j in lex_subsets(k) {
        let d = intersection_dim(&spaces, &j)?;
        if d + j.len() > k {
            worst = worst.max(j.len());
        }
        dims.push((j, d));
    }
    Ok((worst, dims))
}

/// A partner basis for `basis` inside `B` via a free transversal of the
/// annihilators `(a_i^{-1}A ∩ B)^⊥ ⊆ B^*`, or the Rado violator.
fn partner_via_transversal(
    tower: &FieldTower,
    spaces: &[Subspace],
    b: &Subspace,
) -> Result<std::result::Result<Vec<FieldElement>, Vec<usize>>> {
    let f = tower.base();
    let k = b.dim();
    let annihilators = spaces
        .iter()
        .map(|c| {
            let coords = c
                .basis()
                .iter()
                .map(|v| b.coordinates(v).ok_or_else(|| internal("criterion space escapes B")))
                .collect::<Result<Vec<_>>>()?;
            Ok(Subspace::span(f.clone(), k, coords)?.annihilator())
        })
        .collect::<Result<Vec<_>>>()?;
    let fam = SubspaceFamily::new(annihilators)?;
    match free_transversal(f, k, &fam)? {
        TransversalOutcome::Violator(j) => Ok(Err(j)),
        TransversalOutcome::Found(cert) => {
            // rows psi_i; partner coordinates are the columns of the inverse
            let inv = linalg::inverse(f, &cert.vectors)
                .ok_or_else(|| internal("free transversal is not a basis of B^*"))?;
            let partner = (0..k)
                .map(|j| {
                    let col: Vec<u32> = inv.iter().map(|row| row[j]).collect();
                    FieldElement(b.from_coordinates(&col))
                })
                .collect();
            Ok(Ok(partner))
        }
    }
}

/// Checks the containment definition directly.
pub fn verify_partner(tower: &FieldTower, basis: &BasisSeq, b: &Subspace, partner: &[FieldElement]) -> Result<bool> {
    let k = basis.len();
    if partner.len() != k {
        return Ok(false);
    }
    let pb = Subspace::in_tower(tower, partner.iter().cloned())?;
    if pb != *b {
        return Ok(false);
    }
    let spaces = criterion_spaces(tower, basis, b)?;
    for (i, c) in spaces.iter().enumerate() {
        let others = Subspace::in_tower(
            tower,
            partner
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, v)| v.clone()),
        )?;
        if !c.is_subspace_of(&others) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Decides whether the ordered basis can be matched to some basis of `B`.
pub fn check_basis_matched(
    tower: &FieldTower,
    basis: &BasisSeq,
    b: &Subspace,
    mode: BasisMatchMode,
) -> Result<BasisMatchReport> {
    let k = basis.len();
    if k == 0 {
        return Err(precondition("basis matching needs dimension >= 1"));
    }
    if b.dim() != k {
        return Err(structural(format!(
            "dimension mismatch: basis has {k} vectors, B has dimension {}",
            b.dim()
        )));
    }
    if b.ambient() != tower.n() || **b.field() != **tower.base() {
        return Err(structural("B does not live in this tower"));
    }
    let spaces = criterion_spaces(tower, basis, b)?;

    let mut report = match mode {
        BasisMatchMode::ExhaustiveJ => {
            let mut dims = Vec::new();
            let mut violator = None;
            for j in lex_subsets(k) {
                let d = intersection_dim(&spaces, &j)?;
                if violator.is_none() && d + j.len() > k {
                    violator = Some(j.clone());
                }
                dims.push((j, d));
            }
            let partner = if violator.is_none() {
                match partner_via_transversal(tower, &spaces, b)? {
                    Ok(p) => Some(p),
                    Err(j) => {
                        return Err(internal(format!(
                            "dimension criterion holds but the transversal route found violator {j:?}"
                        )))
                    }
                }
            } else {
                None
            };
            BasisMatchReport {
                matched: violator.is_none(),
                mode,
                violating_j: violator,
                criterion_dims: dims,
                partner_basis: partner,
            }
        }
        BasisMatchMode::Rado => match partner_via_transversal(tower, &spaces, b)? {
            Ok(p) => BasisMatchReport {
                matched: true,
                mode,
                violating_j: None,
                criterion_dims: Vec::new(),
                partner_basis: Some(p),
            },
            Err(j) => {
                let d = intersection_dim(&spaces, &j)?;
                if d + j.len() <= k {
                    return Err(internal(format!("Rado violator {j:?} does not violate the criterion")));
                }
                BasisMatchReport {
                    matched: false,
                    mode,
                    violating_j: Some(j.clone()),
                    criterion_dims: vec![(j, d)],
                    partner_basis: None,
                }
            }
        },
    };
    if let Some(p) = &report.partner_basis {
        if !verify_partner(tower, basis, b, p)? {
            return Err(internal("constructed partner basis fails the containment definition"));
        }
    }
    report.criterion_dims.sort();
    Ok(report)
}

/// Number of ordered bases of a `k`-dimensional space over `F_q`, saturating.
pub fn ordered_basis_count(q: u64, k: usize) -> u128 {
    let qk = (q as u128).saturating_pow(k as u32);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(qk - (q as u128).pow(i as u32)))
}

/// Every basis of `A` up to reordering and rescaling of its vectors, as
/// lists of projective points in canonical order. The matching criterion is
/// invariant under both operations, so these represent all ordered bases.
pub fn basis_frames(a: &Subspace) -> Result<Vec<Vec<Vector>>> {
    let pts = a.projective_points()?;
    let k = a.dim();
    let f = a.field();
    Ok(combinations(pts.len(), k)
        .into_iter()
        .map(|idx| idx.into_iter().map(|i| pts[i].clone()).collect::<Vec<_>>())
        .filter(|vs| linalg::rank(f, vs, a.ambient()) == k)
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum SubspaceMatchVerdict {
    Matched { exact: bool, method: String },
    Unmatched { witness: Vec<FieldElement>, method: String },
    Unknown { sampled: usize },
}

impl SubspaceMatchVerdict {
    pub fn is_matched(&self) -> bool {
        matches!(self, SubspaceMatchVerdict::Matched { .. })
    }

    pub fn is_unmatched(&self) -> bool {
        matches!(self, SubspaceMatchVerdict::Unmatched { .. })
    }
}

fn verified_witness(tower: &FieldTower, a: &Subspace, b: &Subspace, witness: Vec<FieldElement>, method: &str) -> Result<SubspaceMatchVerdict> {
    let seq = BasisSeq::of(tower, a, witness.clone())?;
    if check_basis_matched(tower, &seq, b, BasisMatchMode::ExhaustiveJ)?.matched {
        return Err(internal("witness basis is matched after all"));
    }
    Ok(SubspaceMatchVerdict::Unmatched {
        witness,
        method: method.to_string(),
    })
}

/// Whether every basis of `A` can be matched to a basis of `B`.
///
/// Exact by enumeration when `A` has at most `budget` ordered bases. Beyond
/// that: the `<AB> = A` obstruction, seeded random bases, and finally the
/// sufficient conditions (translate-free, primitive `B`, `A ∩ <AB> = 0`);
/// otherwise `Unknown`.
pub fn subspace_matched(tower: &FieldTower, a: &Subspace, b: &Subspace, budget: u128, seed: u64) -> Result<SubspaceMatchVerdict> {
    if a.dim() != b.dim() {
        return Err(precondition("subspace matching needs equal dimensions"));
    }
    let k = a.dim();
    if k == 0 {
        return Ok(SubspaceMatchVerdict::Matched {
            exact: true,
            method: "empty".into(),
        });
    }
    if ordered_basis_count(tower.q() as u64, k) <= budget {
        for frame in basis_frames(a)? {
            let seq = BasisSeq::of(tower, a, frame.into_iter().map(FieldElement).collect())?;
            if !check_basis_matched(tower, &seq, b, BasisMatchMode::ExhaustiveJ)?.matched {
                return Ok(SubspaceMatchVerdict::Unmatched {
                    witness: seq.vectors,
                    method: "exhaustive".into(),
                });
            }
        }
        return Ok(SubspaceMatchVerdict::Matched {
            exact: true,
            method: "exhaustive".into(),
        });
    }

    let report = product_span_neq_check(tower, a, b)?;
    if let Some(rep) = report.rep {
        // a basis starting at rep has rep^{-1}A ∩ B = B, violating J = {1}
        let completed = a.complete_basis(&[rep.0])?;
        return verified_witness(tower, a, b, completed.into_iter().map(FieldElement).collect(), "product_span_equals_a");
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = a.projective_points()?;
    for _ in 0..SAMPLE_COUNT {
        let mut chosen: Vec<Vector> = Vec::with_capacity(k);
        let mut order: Vec<usize> = (0..pts.len()).collect();
        order.shuffle(&mut rng);
        for i in order {
            let mut trial = chosen.clone();
            trial.push(pts[i].clone());
            if linalg::rank(tower.base(), &trial, tower.n()) == trial.len() {
                chosen = trial;
                if chosen.len() == k {
                    break;
                }
            }
        }
        let seq = BasisSeq::of(tower, a, chosen.into_iter().map(FieldElement).collect())?;
        if !check_basis_matched(tower, &seq, b, BasisMatchMode::ExhaustiveJ)?.matched {
            return verified_witness(tower, a, b, seq.vectors, "sampled");
        }
    }

    if translate_obstructions(tower, a, b)?.is_empty() {
        return Ok(SubspaceMatchVerdict::Matched {
            exact: true,
            method: "no_translate_obstruction".into(),
        });
    }
    if k > 1 && (tower.q() as u64).saturating_pow(k as u32) <= MAX_SWEEP_ORDER && is_primitive_subspace(tower, b)? {
        return Ok(SubspaceMatchVerdict::Matched {
            exact: true,
            method: "primitive_b".into(),
        });
    }
    if a.intersect(&product_span(tower, a, b)?)?.is_zero() {
        return Ok(SubspaceMatchVerdict::Matched {
            exact: true,
            method: "a_disjoint_from_product_span".into(),
        });
    }
    Ok(SubspaceMatchVerdict::Unknown { sampled: SAMPLE_COUNT })
}

/// `x·F_q(b) ⊆ A` for nonzero `x`, grouped by the subfield generated by `b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TranslateObstruction {
    /// Least `b ∈ B \ {0}` generating this subfield.
    pub b: FieldElement,
    /// `[F_q(b) : F_q]`.
    pub degree: usize,
    /// Basis of `{x : x·F_q(b) ⊆ A}` (nonzero).
    #[serde(serialize_with = "crate::json::ser_subspace_basis")]
    pub solutions: Subspace,
}

/// Every subfield `F_q(b)`, `b ∈ B \ {0}`, having a nontrivial linear translate
/// inside `A`. Empty means `A` is matched to `B`.
pub fn translate_obstructions(tower: &FieldTower, a: &Subspace, b: &Subspace) -> Result<Vec<TranslateObstruction>> {
    if a.dim() != b.dim() {
        return Err(precondition("translate_obstructions needs equal dimensions"));
    }
    let mut elems: Vec<FieldElement> = b.vectors()?.into_iter().map(FieldElement).collect();
    elems.sort_by_key(|x| tower.index_of(x));
    let mut by_degree: BTreeMap<usize, FieldElement> = BTreeMap::new();
    for x in elems.into_iter().filter(|x| !x.is_zero()) {
        by_degree.entry(tower.degree_over_base(&x)).or_insert(x);
    }
    let mut out = Vec::new();
    for (degree, rep) in by_degree {
        let sub = tower.fixed_space(degree);
        let solutions = translates_into(tower, &sub, a)?;
        if !solutions.is_zero() {
            out.push(TranslateObstruction {
                b: rep,
                degree,
                solutions,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProductSpanReport {
    pub product_equals_a: bool,
    pub dim_product: usize,
    /// `B`, verified to be a subfield, when `<AB> = A`.
    #[serde(serialize_with = "crate::json::ser_opt_subspace_basis")]
    pub subfield: Option<Subspace>,
    /// `a` with `A = aB`, when `<AB> = A`.
    pub rep: Option<FieldElement>,
}

/// Compares `<AB>` with `A`. When they coincide, `B` must be a subfield and
/// `A` a translate `aB`; both facts are re-verified.
pub fn product_span_neq_check(tower: &FieldTower, a: &Subspace, b: &Subspace) -> Result<ProductSpanReport> {
    if a.is_zero() || a.dim() > b.dim() {
        return Err(precondition("need 0 < dim A <= dim B"));
    }
    let prod = product_span(tower, a, b)?;
    if prod != *a {
        return Ok(ProductSpanReport {
            product_equals_a: false,
            dim_product: prod.dim(),
            subfield: None,
            rep: None,
        });
    }
    if !crate::subspace::is_subfield(tower, b)? {
        return Err(internal("<AB> = A but B is not a subfield"));
    }
    let rep = FieldElement(a.basis()[0].clone());
    if scale(tower, &rep, b)? != *a {
        return Err(internal("<AB> = A but A is not a translate of B"));
    }
    Ok(ProductSpanReport {
        product_equals_a: true,
        dim_product: prod.dim(),
        subfield: Some(b.clone()),
        rep: Some(rep),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PsiPhiMode {
    Greedy,
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PsiPhiReport {
    pub psi: usize,
    pub phi: usize,
    #[serde(serialize_with = "crate::json::ser_subspace_basis")]
    pub witness_subspace: Subspace,
    /// Maximality of `phi` was proved by enumerating all `(phi+1)`-dimensional
    /// subspaces.
    pub exhaustive: bool,
    /// Every nonzero element of the witness was checked to be primitive.
    pub witness_verified: bool,
}

/// Proper subfields of the tower, as a family.
pub fn proper_subfields(tower: &FieldTower) -> Result<SubspaceFamily> {
    SubspaceFamily::new(
        tower
            .subfield_lattice()
            .into_iter()
            .filter(|d| d.d < tower.n())
            .map(|d| d.subspace)
            .collect(),
    )
}

/// `psi`: degree of the largest proper intermediate field. `phi`: dimension of
/// the largest primitive subspace.
pub fn psi_phi(tower: &FieldTower, mode: PsiPhiMode) -> Result<PsiPhiReport> {
    let n = tower.n();
    let full = Subspace::full(tower.base().clone(), n);
    if n == 1 {
        // psi = 0 by convention: F_q has no proper intermediate field
        return Ok(PsiPhiReport {
            psi: 0,
            phi: 1,
            witness_subspace: full,
            exhaustive: true,
            witness_verified: true,
        });
    }
    let psi = tower.largest_proper_divisor();
    let fam = proper_subfields(tower)?;
    let witness = match max_trivial_intersector(&fam) {
        Ok(t) => t.subspace,
        Err(Error::TrivialIntersectorBound { .. }) if mode == PsiPhiMode::Exhaustive => {
            // fall back to a search over subspaces, largest first
            let mut found = None;
            for dim in (1..=n - psi).rev() {
                found = enumerate_subspaces(tower.base(), n, dim)?
                    .into_iter()
                    .find(|s| fam.members().iter().all(|m| m.intersect(s).map(|z| z.is_zero()).unwrap_or(false)));
                if found.is_some() {
                    break;
                }
            }
            found.ok_or_else(|| internal("no primitive line exists"))?
        }
        Err(e) => return Err(e),
    };
    let phi = witness.dim();
    let witness_verified = is_primitive_subspace(tower, &witness)?;
    if !witness_verified {
        return Err(internal("witness subspace contains a non-primitive element"));
    }
    let exhaustive = if mode == PsiPhiMode::Exhaustive {
        if phi < n {
            for s in enumerate_subspaces(tower.base(), n, phi + 1)? {
                if is_primitive_subspace(tower, &s)? {
                    return Err(internal(format!("found a primitive subspace of dimension {}", phi + 1)));
                }
            }
        }
        if psi + phi != n {
            return Err(internal(format!("psi + phi = {} != n = {n}", psi + phi)));
        }
        true
    } else {
        false
    };
    Ok(PsiPhiReport {
        psi,
        phi,
        witness_subspace: witness,
        exhaustive,
        witness_verified,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrivialIntersector {
    #[serde(serialize_with = "crate::json::ser_subspace_basis")]
    pub subspace: Subspace,
    /// Largest member dimension.
    pub s: usize,
    /// Every vector outside `T` was shown to break `T ∩ S = 0` for some `S`.
    pub maximality_verified: bool,
}

/// A subspace `T` with `T ∩ S = 0` for every member and `dim T = N - s`,
/// grown one least uncovered vector of `∪ (S + T)` at a time. Needs at most
/// `q` members.
pub fn max_trivial_intersector(fam: &SubspaceFamily) -> Result<TrivialIntersector> {
    let Some(first) = fam.members().first() else {
        return Err(precondition("family must be nonempty"));
    };
    let field = first.field().clone();
    let n = first.ambient();
    let q = field.q();
    if fam.len() > q as usize {
        return Err(Error::TrivialIntersectorBound {
            members: fam.len(),
            q: q as u64,
        });
    }
    if fam.members().iter().any(Subspace::is_full) {
        return Err(precondition("family members must be proper subspaces"));
    }
    let s = fam.s_max();
    let target = n - s;
    let mut t = Subspace::zero(field.clone(), n);
    while t.dim() < target {
        let shifted = SubspaceFamily::new(fam.members().iter().map(|m| m.sum(&t)).collect::<Result<Vec<_>>>()?)?;
        let v = find_uncovered_vector(&shifted)?;
        t = t.sum(&Subspace::span(field.clone(), n, [v])?)?;
    }
    for m in fam.members() {
        if !m.intersect(&t)?.is_zero() {
            return Err(internal("greedy T meets a family member"));
        }
    }
    let total = (q as u64).saturating_pow(n as u32);
    let maximality_verified = if total <= MAX_SWEEP_ORDER {
        for idx in 0..total {
            let v = linalg::vector_from_index(q, n, idx);
            if t.contains(&v) {
                continue;
            }
            let ext = t.sum(&Subspace::span(field.clone(), n, [v])?)?;
            let blocked = fam
                .members()
                .iter()
                .map(|m| m.intersect(&ext).map(|z| !z.is_zero()))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .any(|b| b);
            if !blocked {
                return Err(internal("greedy T is not maximal"));
            }
        }
        true
    } else {
        false
    };
    Ok(TrivialIntersector {
        subspace: t,
        s,
        maximality_verified,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TranslatedPart {
    /// Index into the primitive partition.
    pub i: usize,
    pub alpha: FieldElement,
    #[serde(serialize_with = "crate::json::ser_subspace_basis")]
    pub part: Subspace,
}

/// A partition of `F_{q^n} \ {0}` into `M`, `W` and the graphs
/// `W_{i,α} = {w + α T_i(w) : w ∈ W_i}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionPlan {
    #[serde(serialize_with = "crate::json::ser_subspace_basis")]
    pub subfield_part: Subspace,
    #[serde(serialize_with = "crate::json::ser_subspace_basis")]
    pub primitive_part: Subspace,
    #[serde(serialize_with = "crate::json::ser_subspace_list")]
    pub primitive_partition: Vec<Subspace>,
    pub translated_parts: Vec<TranslatedPart>,
    /// `T_i` as images of the RREF basis of `W_i`.
    pub maps: Vec<Vec<(FieldElement, FieldElement)>>,
    /// `Σ (q^dim - 1)` over all parts.
    pub nonzero_count: u64,
    /// Each nonzero element was checked to lie in exactly one part.
    pub coverage_verified: bool,
}

impl PartitionPlan {
    pub fn parts(&self) -> Vec<&Subspace> {
        let mut v = vec![&self.subfield_part, &self.primitive_part];
        v.extend(self.translated_parts.iter().map(|p| &p.part));
        v
    }
}

const PARTITION_SEARCH_NODES: usize = 1_000_000;

/// Splits `F_q^dim` into subspaces of the given dimensions, by exact-cover
/// backtracking on the least uncovered vector.
fn partition_space(field: &std::sync::Arc<crate::gfq::BaseField>, dim: usize, dims: &[usize]) -> Result<Vec<Subspace>> {
    let q = field.q() as u64;
    let total = q.pow(dim as u32);
    let mut remaining: BTreeMap<usize, usize> = BTreeMap::new();
    for &d in dims {
        *remaining.entry(d).or_default() += 1;
    }
    let mut candidates: BTreeMap<usize, Vec<(Subspace, Vec<u64>)>> = BTreeMap::new();
    for &d in remaining.keys() {
        let subs = enumerate_subspaces(field, dim, d)?;
        let with_idx = subs
            .into_iter()
            .map(|s| {
                let idx: Vec<u64> = s
                    .vectors()
                    .expect("small subspace")
                    .iter()
                    .map(|v| linalg::vector_index(field.q(), v))
                    .filter(|&i| i != 0)
                    .collect();
                (s, idx)
            })
            .collect();
        candidates.insert(d, with_idx);
    }
    let mut covered = vec![false; total as usize];
    covered[0] = true;
    let mut chosen = Vec::new();
    let mut nodes = 0usize;

    fn rec(
        covered: &mut Vec<bool>,
        remaining: &mut BTreeMap<usize, usize>,
        candidates: &BTreeMap<usize, Vec<(Subspace, Vec<u64>)>>,
        chosen: &mut Vec<Subspace>,
        nodes: &mut usize,
    ) -> Result<bool> {
        *nodes += 1;
        if *nodes > PARTITION_SEARCH_NODES {
            return Err(Error::CapExceeded("partition search exhausted its node budget".into()));
        }
        let Some(v) = covered.iter().position(|&c| !c) else {
            return Ok(remaining.values().all(|&c| c == 0));
        };
        let dims: Vec<usize> = remaining.iter().filter(|(_, &c)| c > 0).map(|(&d, _)| d).collect();
        for d in dims.into_iter().rev() {
            for (s, idx) in &candidates[&d] {
                if !idx.contains(&(v as u64)) || idx.iter().any(|&i| covered[i as usize]) {
                    continue;
                }
                for &i in idx {
                    covered[i as usize] = true;
                }
                *remaining.get_mut(&d).unwrap() -= 1;
                chosen.push(s.clone());
                if rec(covered, remaining, candidates, chosen, nodes)? {
                    return Ok(true);
                }
                chosen.pop();
                *remaining.get_mut(&d).unwrap() += 1;
                for &i in idx {
                    covered[i as usize] = false;
                }
            }
        }
        Ok(false)
    }

    if rec(&mut covered, &mut remaining, &candidates, &mut chosen, &mut nodes)? {
        Ok(chosen)
    } else {
        Err(precondition(format!("no subspace partition of F_{q}^{dim} with dimensions {dims:?}")))
    }
}

/// Builds the partition from the largest primitive subspace `W`, the largest
/// proper subfield `M`, and a subspace partition of `W` with the requested
/// part dimensions (default: `W` itself).
pub fn build_partition(tower: &FieldTower, primitive_partition_dims: Option<&[usize]>) -> Result<PartitionPlan> {
    let n = tower.n();
    if n < 2 {
        return Err(precondition("partition needs n >= 2"));
    }
    let f = tower.base().clone();
    let q = f.q() as u64;
    let pp = match psi_phi(tower, PsiPhiMode::Greedy) {
        Ok(r) => r,
        Err(Error::TrivialIntersectorBound { .. }) => psi_phi(tower, PsiPhiMode::Exhaustive)?,
        Err(e) => return Err(e),
    };
    let (psi, phi) = (pp.psi, pp.phi);
    let w = pp.witness_subspace;
    let m = tower.fixed_space(psi);

    let dims: Vec<usize> = primitive_partition_dims.map(<[usize]>::to_vec).unwrap_or_else(|| vec![phi]);
    if dims.is_empty() || dims.contains(&0) {
        return Err(precondition("partition dimensions must be positive"));
    }
    if let Some(&t) = dims.iter().find(|&&t| t > psi) {
        return Err(precondition(format!(
            "part dimension {t} exceeds psi = {psi}; no injective map into M exists"
        )));
    }
    let count: u64 = dims.iter().map(|&t| q.pow(t as u32) - 1).sum();
    if count != q.pow(phi as u32) - 1 {
        return Err(precondition(format!(
            "dimensions {dims:?} cannot partition a space of dimension {phi}"
        )));
    }

    // partition W in its own coordinates, then map back
    let parts_local = partition_space(&f, phi, &dims)?;
    let primitive_partition: Vec<Subspace> = parts_local
        .iter()
        .map(|s| Subspace::span(f.clone(), n, s.basis().iter().map(|c| w.from_coordinates(c))))
        .collect::<Result<_>>()?;

    let m_basis = m.basis_elements();
    let maps: Vec<Vec<(FieldElement, FieldElement)>> = primitive_partition
        .iter()
        .map(|wi| {
            wi.basis_elements()
                .into_iter()
                .zip(m_basis.iter().cloned())
                .collect()
        })
        .collect();

    let alphas: Vec<FieldElement> = m
        .vectors()?
        .into_iter()
        .map(FieldElement)
        .filter(|x| !x.is_zero())
        .collect();
    let mut translated_parts = Vec::new();
    for (i, map) in maps.iter().enumerate() {
        for alpha in &alphas {
            let part = Subspace::in_tower(
                tower,
                map.iter()
                    .map(|(wv, mv)| tower.add(wv, &tower.mul(alpha, mv))),
            )?;
            if part.dim() != map.len() {
                return Err(internal("translated part lost dimension"));
            }
            translated_parts.push(TranslatedPart {
                i,
                alpha: alpha.clone(),
                part,
            });
        }
    }

    let mut plan = PartitionPlan {
        subfield_part: m,
        primitive_part: w,
        primitive_partition,
        translated_parts,
        maps,
        nonzero_count: 0,
        coverage_verified: false,
    };
    let parts = plan.parts();
    let nonzero_count: u64 = parts.iter().map(|s| q.pow(s.dim() as u32) - 1).sum();
    if nonzero_count != q.pow(n as u32) - 1 {
        return Err(internal("partition counting identity fails"));
    }
    for (i, x) in parts.iter().enumerate() {
        for y in &parts[i + 1..] {
            if !x.intersect(y)?.is_zero() {
                return Err(internal("two partition parts share a nonzero element"));
            }
        }
    }
    let mut coverage_verified = false;
    if tower.order() <= MAX_SWEEP_ORDER {
        for x in tower.elements()?.filter(|x| !x.is_zero()) {
            let hits = parts.iter().filter(|s| s.contains(&x.0)).count();
            if hits != 1 {
                return Err(internal(format!("element {x} lies in {hits} parts")));
            }
        }
        coverage_verified = true;
    }
    plan.nonzero_count = nonzero_count;
    plan.coverage_verified = coverage_verified;
    Ok(plan)
}
