//! Exploration harness for two open problems about linear matchings.
//!
//! `linear_deficiency` sweeps pairs of equal-dimensional subspaces and
//! compares the largest matched sub-pair dimension `M` with `dim A - D`,
//! where `D` is the worst basis deficiency. `divisor_family` tests the
//! predicted size of the largest subspace meeting a divisor-indexed family
//! trivially. Neither claim is asserted; reports carry completeness flags
//! and are re-checked by [`verify_linear_deficiency_run`] and
//! [`verify_divisor_family_run`], which recompute everything from element
//! sets.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{precondition, structural, Error, Result};
use crate::gfq::{divisors, largest_proper_divisor, BaseField, FieldElement, FieldTower};
use crate::linalg::{self, Vector};
use crate::matchlin::{basis_deficiency, basis_frames, ordered_basis_count, subspace_matched, BasisSeq};
use crate::subspace::{enumerate_subspaces, gaussian_binomial, product_span, Subspace};

pub const SCHEMA_VERSION: &str = "matchkit-report/1";

const LINEAR_READINGS: &[&str] = &[
    "D(A,B) is the maximum of the basis deficiency over all ordered bases of A; bases are enumerated up to reordering and rescaling, which leave the deficiency unchanged",
    "M(A,B) is the largest dim A0 over pairs A0 <= A, B0 <= B with dim A0 = dim B0 and A0 matched to B0",
    "pairs with A matched to B are skipped as outside the hypothesis",
    "pairs with <AB> = A record M = 0 by convention; m_raw holds the sub-pair maximum for audit",
    "D_excess is the alternative reading max(dim ∩ + #J - dim A) over bases and J, mirroring #S - #N(S) for groups",
];

const DIVISOR_READINGS: &[&str] = &[
    "members V_i are indexed by the proper divisors i of n with dim V_i = i and V_i ∩ V_j = V_gcd(i,j)",
    "the predicted dimension is n minus the largest proper divisor of n",
];

/// Seed and caps shared by every harness run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    /// Ordered bases a single subspace may have before it is not enumerated.
    pub basis_budget: u64,
    /// Pairs per dimension before the sweep switches to seeded sampling.
    pub pair_cap: u64,
    /// Subspaces a single exhaustive search may enumerate.
    pub subspace_cap: u64,
    /// Randomized families attempted by `divisor_family`.
    pub trials: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            basis_budget: 1_000_000,
            pair_cap: 10_000,
            subspace_cap: 1 << 16,
            trials: 8,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.basis_budget == 0 || self.pair_cap == 0 || self.subspace_cap == 0 {
            return Err(precondition("all caps must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseStatus {
    Evaluated,
    SkippedMatched,
    ProductSpanEqualsA,
    OverBudget,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisDeficiency {
    pub basis: Vec<Vector>,
    #[serde(rename = "D")]
    pub d: usize,
    pub excess: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearDeficiencyReport {
    pub index: usize,
    pub dim: usize,
    /// RREF bases.
    pub a: Vec<Vector>,
    pub b: Vec<Vector>,
    pub status: CaseStatus,
    pub d_per_basis: Vec<BasisDeficiency>,
    #[serde(rename = "D")]
    pub d: Option<usize>,
    #[serde(rename = "M")]
    pub m: Option<usize>,
    pub m_raw: Option<usize>,
    pub conjecture_holds: Option<bool>,
    #[serde(rename = "D_excess")]
    pub d_excess: Option<usize>,
    pub excess_holds: Option<bool>,
    pub enumeration_complete: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearSummary {
    pub pairs: usize,
    pub evaluated: usize,
    pub skipped_matched: usize,
    pub product_span_equals_a: usize,
    pub over_budget: usize,
    pub holds: usize,
    pub fails: usize,
    pub excess_holds: usize,
    pub excess_fails: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearDeficiencyRun {
    pub schema_version: String,
    pub command: String,
    pub p: u32,
    pub r: u32,
    pub q: u32,
    pub n: usize,
    pub config: RunConfig,
    pub readings: Vec<String>,
    pub complete: bool,
    pub summary: LinearSummary,
    pub cases: Vec<LinearDeficiencyReport>,
}

fn elements_of(v: &[Vector]) -> Vec<FieldElement> {
    v.iter().cloned().map(FieldElement).collect()
}

/// Subspaces of `s` of dimension `j`, as subspaces of the ambient space.
fn subspaces_within(s: &Subspace, j: usize) -> Result<Vec<Subspace>> {
    enumerate_subspaces(s.field(), s.dim(), j)?
        .into_iter()
        .map(|local| Subspace::span(s.field().clone(), s.ambient(), local.basis().iter().map(|c| s.from_coordinates(c))))
        .collect()
}

fn worst_basis_deficiency(tower: &FieldTower, a: &Subspace, b: &Subspace) -> Result<Vec<BasisDeficiency>> {
    basis_frames(a)?
        .into_iter()
        .map(|frame| {
            let seq = BasisSeq::of(tower, a, elements_of(&frame))?;
            let (d, dims) = basis_deficiency(tower, &seq, b)?;
            let k = frame.len();
            let excess = dims.iter().map(|(j, dim)| (dim + j.len()).saturating_sub(k)).max().unwrap_or(0);
            Ok(BasisDeficiency { basis: frame, d, excess })
        })
        .collect()
}

/// Largest matched sub-pair dimension below `dim A`, or `None` when some
/// sub-pair exceeded the basis budget.
fn largest_matched_subpair(tower: &FieldTower, a: &Subspace, b: &Subspace, cfg: &RunConfig) -> Result<Option<usize>> {
    let q = tower.q() as u64;
    for j in (1..a.dim()).rev() {
        if ordered_basis_count(q, j) > cfg.basis_budget as u128 {
            return Ok(None);
        }
        let subs_a = subspaces_within(a, j)?;
        let subs_b = subspaces_within(b, j)?;
        for a0 in &subs_a {
            for b0 in &subs_b {
                if subspace_matched(tower, a0, b0, cfg.basis_budget as u128, cfg.seed)?.is_matched() {
                    return Ok(Some(j));
                }
            }
        }
    }
    Ok(Some(0))
}

fn evaluate_pair(tower: &FieldTower, index: usize, a: &Subspace, b: &Subspace, cfg: &RunConfig) -> Result<LinearDeficiencyReport> {
    let k = a.dim();
    let mut case = LinearDeficiencyReport {
        index,
        dim: k,
        a: a.basis().to_vec(),
        b: b.basis().to_vec(),
        status: CaseStatus::OverBudget,
        d_per_basis: Vec::new(),
        d: None,
        m: None,
        m_raw: None,
        conjecture_holds: None,
        d_excess: None,
        excess_holds: None,
        enumeration_complete: false,
    };
    if ordered_basis_count(tower.q() as u64, k) > cfg.basis_budget as u128 {
        return Ok(case);
    }
    let product_is_a = product_span(tower, a, b)? == *a;
    if !product_is_a && subspace_matched(tower, a, b, cfg.basis_budget as u128, cfg.seed)?.is_matched() {
        case.status = CaseStatus::SkippedMatched;
        case.enumeration_complete = true;
        return Ok(case);
    }
    case.d_per_basis = worst_basis_deficiency(tower, a, b)?;
    let d = case.d_per_basis.iter().map(|x| x.d).max().unwrap_or(0);
    let excess = case.d_per_basis.iter().map(|x| x.excess).max().unwrap_or(0);
    case.d = Some(d);
    case.d_excess = Some(excess);
    let m = largest_matched_subpair(tower, a, b, cfg)?;
    case.enumeration_complete = m.is_some();
    if product_is_a {
        case.status = CaseStatus::ProductSpanEqualsA;
        case.m = Some(0);
        case.m_raw = m;
    } else {
        case.status = CaseStatus::Evaluated;
        case.m = m;
        case.conjecture_holds = m.map(|m| m + d == k);
        case.excess_holds = m.map(|m| m + excess == k);
    }
    Ok(case)
}

/// Sweeps pairs `(A, B)` of subspaces of `F_{q^n}` with `dim A = dim B`.
pub fn conjecture_linear_deficiency(tower: &FieldTower, dims: Option<&[usize]>, cfg: &RunConfig) -> Result<LinearDeficiencyRun> {
    cfg.validate()?;
    let n = tower.n();
    let dims: Vec<usize> = match dims {
        Some(d) => d.to_vec(),
        None => (1..=n).collect(),
    };
    if let Some(&k) = dims.iter().find(|&&k| k == 0 || k > n) {
        return Err(precondition(format!("dimension {k} outside 1..={n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut complete = true;
    let mut cases = Vec::new();
    for &k in &dims {
        if gaussian_binomial(tower.q() as u64, n, k) > cfg.subspace_cap as u128 {
            complete = false;
            continue;
        }
        let subs = enumerate_subspaces(tower.base(), n, k)?;
        let total = subs.len() * subs.len();
        let picks: Vec<usize> = if total as u64 <= cfg.pair_cap {
            (0..total).collect()
        } else {
            complete = false;
            let mut v = sample(&mut rng, total, cfg.pair_cap as usize).into_vec();
            v.sort_unstable();
            v
        };
        for idx in picks {
            let (a, b) = (&subs[idx / subs.len()], &subs[idx % subs.len()]);
            let case = evaluate_pair(tower, cases.len(), a, b, cfg)?;
            complete &= case.enumeration_complete;
            cases.push(case);
        }
    }
    let mut summary = LinearSummary {
        pairs: cases.len(),
        ..Default::default()
    };
    for c in &cases {
        match c.status {
            CaseStatus::Evaluated => summary.evaluated += 1,
            CaseStatus::SkippedMatched => summary.skipped_matched += 1,
            CaseStatus::ProductSpanEqualsA => summary.product_span_equals_a += 1,
            CaseStatus::OverBudget => summary.over_budget += 1,
        }
        match c.conjecture_holds {
            Some(true) => summary.holds += 1,
            Some(false) => summary.fails += 1,
            None => {}
        }
        match c.excess_holds {
            Some(true) => summary.excess_holds += 1,
            Some(false) => summary.excess_fails += 1,
            None => {}
        }
    }
    Ok(LinearDeficiencyRun {
        schema_version: SCHEMA_VERSION.into(),
        command: "linear-deficiency".into(),
        p: tower.p(),
        r: tower.r(),
        q: tower.q(),
        n,
        config: cfg.clone(),
        readings: LINEAR_READINGS.iter().map(|s| s.to_string()).collect(),
        complete,
        summary,
        cases,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisorMember {
    pub divisor: usize,
    pub basis: Vec<Vector>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    Subfield,
    Random,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisorFamilyReport {
    pub index: usize,
    pub kind: FamilyKind,
    pub family: Vec<DivisorMember>,
    pub conditions_verified: bool,
    pub max_trivial_dim: usize,
    pub witness: Vec<Vector>,
    /// Every subspace of dimension `max_trivial_dim + 1` was checked.
    pub maximality_exhaustive: bool,
    pub predicted: usize,
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisorFamilyRun {
    pub schema_version: String,
    pub command: String,
    pub p: u32,
    pub r: u32,
    pub q: u32,
    pub n: usize,
    pub config: RunConfig,
    pub readings: Vec<String>,
    pub trials_skipped: u64,
    pub complete: bool,
    pub reports: Vec<DivisorFamilyReport>,
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn family_conditions_hold(members: &[(usize, Subspace)]) -> Result<bool> {
    for (i, v) in members {
        if v.dim() != *i {
            return Ok(false);
        }
    }
    for (x, (i, vi)) in members.iter().enumerate() {
        for (j, vj) in &members[x + 1..] {
            let g = gcd(*i, *j);
            let Some((_, vg)) = members.iter().find(|(d, _)| *d == g) else {
                return Ok(false);
            };
            if vi.intersect(vj)? != *vg {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn random_divisor_family(field: &Arc<BaseField>, n: usize, rng: &mut ChaCha8Rng) -> Result<Option<Vec<(usize, Subspace)>>> {
    let q = field.q();
    let mut members: Vec<(usize, Subspace)> = Vec::new();
    for d in divisors(n).into_iter().filter(|&d| d < n) {
        let mut base = Subspace::zero(field.clone(), n);
        for (e, v) in &members {
            if d % e == 0 {
                base = base.sum(v)?;
            }
        }
        if base.dim() > d {
            return Ok(None);
        }
        let mut found = None;
        for _ in 0..64 {
            let mut cand = base.clone();
            while cand.dim() < d {
                let v: Vector = (0..n).map(|_| rng.gen_range(0..q)).collect();
                cand = cand.sum(&Subspace::span(field.clone(), n, [v])?)?;
            }
            if cand.dim() != d {
                continue;
            }
            let mut trial = members.clone();
            trial.push((d, cand));
            if family_conditions_hold(&trial)? {
                found = Some(trial);
                break;
            }
        }
        match found {
            Some(t) => members = t,
            None => return Ok(None),
        }
    }
    Ok(Some(members))
}

/// Largest subspace meeting every member trivially, searched from the top
/// dimension down; `None` if an enumeration would exceed the cap.
fn largest_trivial_intersector(field: &Arc<BaseField>, n: usize, members: &[Subspace], cap: u64) -> Result<Option<Subspace>> {
    for d in (0..=n).rev() {
        if gaussian_binomial(field.q() as u64, n, d) > cap as u128 {
            return Ok(None);
        }
        for s in enumerate_subspaces(field, n, d)? {
            let mut ok = true;
            for m in members {
                if !m.intersect(&s)?.is_zero() {
                    ok = false;
                    break;
                }
            }
            if ok {
                return Ok(Some(s));
            }
        }
    }
    Ok(Some(Subspace::zero(field.clone(), n)))
}

fn divisor_report(index: usize, kind: FamilyKind, members: Vec<(usize, Subspace)>, n: usize, cfg: &RunConfig) -> Result<Option<DivisorFamilyReport>> {
    let conditions_verified = family_conditions_hold(&members)?;
    if !conditions_verified {
        return Err(crate::error::internal("constructed divisor family violates its conditions"));
    }
    let field = members[0].1.field().clone();
    let subs: Vec<Subspace> = members.iter().map(|(_, s)| s.clone()).collect();
    let Some(t) = largest_trivial_intersector(&field, n, &subs, cfg.subspace_cap)? else {
        return Ok(None);
    };
    let predicted = n - largest_proper_divisor(n);
    Ok(Some(DivisorFamilyReport {
        index,
        kind,
        family: members
            .into_iter()
            .map(|(divisor, s)| DivisorMember {
                divisor,
                basis: s.basis().to_vec(),
            })
            .collect(),
        conditions_verified,
        max_trivial_dim: t.dim(),
        witness: t.basis().to_vec(),
        maximality_exhaustive: true,
        predicted,
        matches: t.dim() == predicted,
    }))
}

/// Tests the predicted maximal dimension on the subfield family and on
/// `cfg.trials` random families.
pub fn question_divisor_family(tower: &FieldTower, cfg: &RunConfig) -> Result<DivisorFamilyRun> {
    cfg.validate()?;
    let n = tower.n();
    if divisors(n).len() <= 2 {
        return Err(precondition(format!(
            "n = {n} has no proper divisor above 1; the family is degenerate"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut reports = Vec::new();
    let mut complete = true;
    let subfields: Vec<(usize, Subspace)> = tower
        .subfield_lattice()
        .into_iter()
        .filter(|d| d.d < n)
        .map(|d| (d.d, d.subspace))
        .collect();
    match divisor_report(0, FamilyKind::Subfield, subfields, n, cfg)? {
        Some(r) => reports.push(r),
        None => complete = false,
    }
    let mut skipped = 0;
    for _ in 0..cfg.trials {
        match random_divisor_family(tower.base(), n, &mut rng)? {
            None => skipped += 1,
            Some(members) => match divisor_report(reports.len(), FamilyKind::Random, members, n, cfg)? {
                Some(r) => reports.push(r),
                None => complete = false,
            },
        }
    }
    Ok(DivisorFamilyRun {
        schema_version: SCHEMA_VERSION.into(),
        command: "divisor-family".into(),
        p: tower.p(),
        r: tower.r(),
        q: tower.q(),
        n,
        config: cfg.clone(),
        readings: DIVISOR_READINGS.iter().map(|s| s.to_string()).collect(),
        trials_skipped: skipped,
        complete,
        reports,
    })
}

// ---- independent verification from element sets

struct RawSpace {
    q: u32,
    elems: BTreeSet<Vector>,
}

impl RawSpace {
    fn span(field: &BaseField, n: usize, basis: &[Vector]) -> Self {
        let q = field.q();
        let k = basis.len();
        let total = (q as u64).pow(k as u32);
        let elems = (0..total)
            .map(|i| linalg::combine(field, &linalg::vector_from_index(q, k, i), basis, n))
            .collect();
        RawSpace { q, elems }
    }

    fn dim(&self) -> usize {
        let mut d = 0;
        let mut size = 1usize;
        while size < self.elems.len() {
            size *= self.q as usize;
            d += 1;
        }
        d
    }
}

/// `max #J` with `dim ∩_J {b ∈ B : a_j b ∈ A} > k - #J`, and the largest
/// excess `dim ∩_J + #J - k`, from element sets.
fn raw_basis_deficiency(tower: &FieldTower, basis: &[Vector], a: &RawSpace, b: &RawSpace) -> (usize, usize) {
    let k = basis.len();
    let crit: Vec<BTreeSet<Vector>> = basis
        .iter()
        .map(|ai| {
            let ai = FieldElement(ai.clone());
            b.elems
                .iter()
                .filter(|x| a.elems.contains(&tower.mul(&ai, &FieldElement((*x).clone())).0))
                .cloned()
                .collect()
        })
        .collect();
    let (mut worst, mut excess) = (0, 0);
    for mask in 1u32..(1 << k) {
        let mut acc: Option<BTreeSet<Vector>> = None;
        for (i, c) in crit.iter().enumerate() {
            if mask & (1 << i) != 0 {
                acc = Some(match acc {
                    None => c.clone(),
                    Some(s) => s.intersection(c).cloned().collect(),
                });
            }
        }
        let size = mask.count_ones() as usize;
        let d = RawSpace {
            q: a.q,
            elems: acc.unwrap_or_default(),
        }
        .dim();
        if d + size > k {
            worst = worst.max(size);
            excess = excess.max(d + size - k);
        }
    }
    (worst, excess)
}

fn raw_matched(tower: &FieldTower, a: &Subspace, b: &Subspace) -> Result<bool> {
    let f = tower.base();
    let ra = RawSpace::span(f, tower.n(), a.basis());
    let rb = RawSpace::span(f, tower.n(), b.basis());
    for frame in basis_frames(a)? {
        if raw_basis_deficiency(tower, &frame, &ra, &rb).0 > 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

fn raw_subpair_max(tower: &FieldTower, a: &Subspace, b: &Subspace) -> Result<usize> {
    for j in (1..a.dim()).rev() {
        for a0 in subspaces_within(a, j)? {
            for b0 in subspaces_within(b, j)? {
                if raw_matched(tower, &a0, &b0)? {
                    return Ok(j);
                }
            }
        }
    }
    Ok(0)
}

fn factorials(k: usize) -> u128 {
    (1..=k as u128).product()
}

/// Recomputes every verdict of a linear-deficiency run. Returns the number
/// of cases checked.
pub fn verify_linear_deficiency_run(run: &LinearDeficiencyRun) -> Result<usize> {
    let tower = FieldTower::new(run.p as u64, run.r, run.n)?;
    let f = tower.base().clone();
    let n = run.n;
    let fail = |i: usize, what: &str| Err(structural(format!("case {i}: {what}")));
    for c in &run.cases {
        let a = Subspace::from_rref(f.clone(), n, c.a.clone())?;
        let b = Subspace::from_rref(f.clone(), n, c.b.clone())?;
        if a.dim() != c.dim || b.dim() != c.dim {
            return fail(c.index, "dimension mismatch");
        }
        if c.status == CaseStatus::OverBudget {
            continue;
        }
        let ra = RawSpace::span(&f, n, a.basis());
        let rb = RawSpace::span(&f, n, b.basis());
        let products = ra.elems.iter().flat_map(|x| {
            rb.elems
                .iter()
                .map(|y| tower.mul(&FieldElement(x.clone()), &FieldElement(y.clone())).0)
                .collect::<Vec<_>>()
        });
        let product_is_a = Subspace::span(f.clone(), n, products)? == a;
        match c.status {
            CaseStatus::SkippedMatched => {
                if product_is_a || !raw_matched(&tower, &a, &b)? {
                    return fail(c.index, "skipped pair is not matched");
                }
                continue;
            }
            CaseStatus::ProductSpanEqualsA if !product_is_a => return fail(c.index, "<AB> differs from A"),
            CaseStatus::Evaluated if product_is_a => return fail(c.index, "<AB> equals A"),
            _ => {}
        }
        let q = tower.q() as u64;
        let frames_expected = ordered_basis_count(q, c.dim) / (factorials(c.dim) * ((q - 1) as u128).pow(c.dim as u32));
        if c.d_per_basis.len() as u128 != frames_expected {
            return fail(c.index, "basis enumeration is incomplete");
        }
        let mut seen = BTreeSet::new();
        let (mut worst, mut worst_excess) = (0, 0);
        for entry in &c.d_per_basis {
            let span = Subspace::span(f.clone(), n, entry.basis.clone())?;
            if span != a || entry.basis.len() != c.dim {
                return fail(c.index, "listed basis does not span A");
            }
            let key: BTreeSet<Vector> = entry.basis.iter().cloned().collect();
            if !seen.insert(key) {
                return fail(c.index, "basis listed twice");
            }
            let (d, excess) = raw_basis_deficiency(&tower, &entry.basis, &ra, &rb);
            if d != entry.d || excess != entry.excess {
                return fail(c.index, "basis deficiency differs from recomputation");
            }
            worst = worst.max(d);
            worst_excess = worst_excess.max(excess);
        }
        if c.d != Some(worst) || c.d_excess != Some(worst_excess) {
            return fail(c.index, "D differs from recomputation");
        }
        if c.status == CaseStatus::Evaluated && worst == 0 {
            return fail(c.index, "evaluated pair is matched");
        }
        if c.enumeration_complete {
            let m = raw_subpair_max(&tower, &a, &b)?;
            match c.status {
                CaseStatus::Evaluated => {
                    if c.m != Some(m)
                        || c.conjecture_holds != Some(m + worst == c.dim)
                        || c.excess_holds != Some(m + worst_excess == c.dim)
                    {
                        return fail(c.index, "M or verdict differs from recomputation");
                    }
                }
                _ => {
                    if c.m != Some(0) || c.m_raw != Some(m) {
                        return fail(c.index, "recorded M differs from recomputation");
                    }
                }
            }
        }
    }
    Ok(run.cases.len())
}

/// Recomputes every divisor-family report. Returns the number checked.
pub fn verify_divisor_family_run(run: &DivisorFamilyRun) -> Result<usize> {
    let tower = FieldTower::new(run.p as u64, run.r, run.n)?;
    let f = tower.base().clone();
    let n = run.n;
    let predicted = n - largest_proper_divisor(n);
    for r in &run.reports {
        let fail = |what: &str| Err::<usize, Error>(structural(format!("report {}: {what}", r.index)));
        let members: Vec<(usize, Subspace)> = r
            .family
            .iter()
            .map(|m| Ok((m.divisor, Subspace::from_rref(f.clone(), n, m.basis.clone())?)))
            .collect::<Result<_>>()?;
        let expected: Vec<usize> = divisors(n).into_iter().filter(|&d| d < n).collect();
        if members.iter().map(|(d, _)| *d).collect::<Vec<_>>() != expected || !family_conditions_hold(&members)? {
            return fail("family conditions fail");
        }
        let raw: Vec<RawSpace> = members.iter().map(|(_, s)| RawSpace::span(&f, n, s.basis())).collect();
        let meets_trivially = |t: &[Vector]| {
            let rt = RawSpace::span(&f, n, t);
            raw.iter().all(|m| m.elems.intersection(&rt.elems).count() == 1)
        };
        let w = Subspace::from_rref(f.clone(), n, r.witness.clone())?;
        if w.dim() != r.max_trivial_dim || !meets_trivially(w.basis()) {
            return fail("witness does not meet the family trivially");
        }
        if r.maximality_exhaustive && r.max_trivial_dim < n {
            for s in enumerate_subspaces(&f, n, r.max_trivial_dim + 1)? {
                if meets_trivially(s.basis()) {
                    return fail("a larger trivially-meeting subspace exists");
                }
            }
        }
        if r.predicted != predicted || r.matches != (r.max_trivial_dim == predicted) {
            return fail("prediction recorded incorrectly");
        }
    }
    Ok(run.reports.len())
}
