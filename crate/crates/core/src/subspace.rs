//! `F_q`-subspaces of `F_q^N` (and of `F_{q^n}` viewed as `F_q^n`), kept in
//! reduced row echelon form so that equality is matrix equality.
//!
//! Vectors are enumerated in lexicographic order of coordinates; every "first
//! witness" returned here is the least vector in that order.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{internal, precondition, structural, Error, Result};
use crate::gfq::{BaseField, FieldElement, FieldTower, MAX_SWEEP_ORDER};
use crate::linalg::{self, Vector};

/// Largest vector-space order scanned by exhaustive vector searches.
pub const MAX_VECTOR_SCAN: u64 = 1 << 24;
/// Largest number of subspaces materialised by [`enumerate_subspaces`].
pub const MAX_SUBSPACE_ENUMERATION: u128 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    field: Arc<BaseField>,
    ambient: usize,
    basis: Vec<Vector>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(field: Arc<BaseField>, ambient: usize) -> Self {
        Subspace {
            field,
            ambient,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(field: Arc<BaseField>, ambient: usize) -> Self {
        let basis = (0..ambient)
            .map(|i| {
                let mut v = vec![0; ambient];
                v[i] = 1;
                v
            })
            .collect();
        Subspace {
            field,
            ambient,
            basis,
            pivots: (0..ambient).collect(),
        }
    }

    /// Canonical subspace spanned by `vectors`.
    pub fn span<I>(field: Arc<BaseField>, ambient: usize, vectors: I) -> Result<Self>
    where
        I: IntoIterator<Item = Vector>,
    {
        let mut rows: Vec<Vector> = Vec::new();
        for v in vectors {
            if v.len() != ambient {
                return Err(structural(format!(
                    "vector of length {} in a space of dimension {ambient}",
                    v.len()
                )));
            }
            if v.iter().any(|&c| c >= field.q()) {
                return Err(structural("vector entry out of range for F_q"));
            }
            rows.push(v);
        }
        let pivots = linalg::rref(&field, &mut rows, ambient);
        Ok(Subspace {
            field,
            ambient,
            basis: rows,
            pivots,
        })
    }

    /// Accepts `rows` only when they already are the canonical RREF basis.
    pub fn from_rref(field: Arc<BaseField>, ambient: usize, rows: Vec<Vector>) -> Result<Self> {
        let canonical = Self::span(field, ambient, rows.clone())?;
        if canonical.basis != rows {
            return Err(Error::NotRref {
                suggestion: format!("{:?}", canonical.basis),
            });
        }
        Ok(canonical)
    }

    pub fn in_tower<I>(tower: &FieldTower, elements: I) -> Result<Self>
    where
        I: IntoIterator<Item = FieldElement>,
    {
        Self::span(tower.base().clone(), tower.n(), elements.into_iter().map(|e| e.0))
    }

    pub fn field(&self) -> &Arc<BaseField> {
        &self.field
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    pub fn basis_elements(&self) -> Vec<FieldElement> {
        self.basis.iter().cloned().map(FieldElement).collect()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.ambient
    }

    pub fn is_proper(&self) -> bool {
        !self.is_full()
    }

    fn residual(&self, v: &[u32]) -> Vector {
        let f = &self.field;
        let mut r = v.to_vec();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            let c = r[p];
            if c != 0 {
                for (x, &b) in r.iter_mut().zip(row) {
                    *x = f.sub(*x, f.mul(c, b));
                }
            }
        }
        r
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        v.len() == self.ambient && linalg::is_zero(&self.residual(v))
    }

    /// Coordinates of `v` in the RREF basis, or `None` when `v ∉ self`.
    pub fn coordinates(&self, v: &[u32]) -> Option<Vec<u32>> {
        if !self.contains(v) {
            return None;
        }
        Some(self.pivots.iter().map(|&p| v[p]).collect())
    }

    pub fn from_coordinates(&self, coords: &[u32]) -> Vector {
        linalg::combine(&self.field, coords, &self.basis, self.ambient)
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.ambient == other.ambient && self.basis.iter().all(|v| other.contains(v))
    }

    fn same_ambient(&self, other: &Subspace) -> Result<()> {
        if self.ambient != other.ambient || self.field != other.field {
            return Err(structural(format!(
                "subspaces of different spaces (F_{}^{} vs F_{}^{})",
                self.field.q(),
                self.ambient,
                other.field.q(),
                other.ambient
            )));
        }
        Ok(())
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.same_ambient(other)?;
        Self::span(
            self.field.clone(),
            self.ambient,
            self.basis.iter().chain(&other.basis).cloned(),
        )
    }

    /// Zassenhaus: row-reduce `[a | a]` over `[b | 0]`; rows with vanishing
    /// left half span the intersection in their right half.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.same_ambient(other)?;
        let n = self.ambient;
        let mut rows: Vec<Vector> = self
            .basis
            .iter()
            .map(|a| a.iter().chain(a.iter()).copied().collect())
            .chain(
                other
                    .basis
                    .iter()
                    .map(|b| b.iter().copied().chain(std::iter::repeat_n(0, n)).collect()),
            )
            .collect();
        linalg::rref(&self.field, &mut rows, 2 * n);
        let inter = rows
            .into_iter()
            .filter(|r| linalg::is_zero(&r[..n]))
            .map(|r| r[n..].to_vec());
        Self::span(self.field.clone(), n, inter)
    }

    /// `{y : y·v = 0 for all v ∈ self}` under the standard pairing; this is
    /// `self^⊥` with covectors written in the dual basis.
    pub fn annihilator(&self) -> Subspace {
        let k = linalg::kernel(&self.field, &self.basis, self.ambient);
        Self::span(self.field.clone(), self.ambient, k).expect("kernel is well formed")
    }

    /// All `q^dim` vectors, in the order of their coordinate index.
    pub fn vectors(&self) -> Result<Vec<Vector>> {
        let q = self.field.q() as u64;
        let count = q
            .checked_pow(self.dim() as u32)
            .filter(|&c| c <= MAX_VECTOR_SCAN)
            .ok_or_else(|| Error::CapExceeded(format!("subspace of dimension {} too large to list", self.dim())))?;
        Ok((0..count)
            .map(|i| self.from_coordinates(&linalg::vector_from_index(self.field.q(), self.dim(), i)))
            .collect())
    }

    /// Nonzero vectors, one per 1-dimensional subspace (first nonzero
    /// coordinate equal to 1).
    pub fn projective_points(&self) -> Result<Vec<Vector>> {
        let q = self.field.q();
        let k = self.dim();
        let total = (q as u64)
            .checked_pow(k as u32)
            .filter(|&c| c <= MAX_VECTOR_SCAN)
            .ok_or_else(|| Error::CapExceeded("too many points".into()))?;
        Ok((1..total)
            .map(|i| linalg::vector_from_index(q, k, i))
            .filter(|c| c.iter().find(|&&x| x != 0) == Some(&1))
            .map(|c| self.from_coordinates(&c))
            .collect())
    }

    /// Extends a linearly independent list inside `self` to a basis of `self`,
    /// appending RREF rows as needed.
    pub fn complete_basis(&self, start: &[Vector]) -> Result<Vec<Vector>> {
        let f = &self.field;
        let mut out: Vec<Vector> = start.to_vec();
        if out.iter().any(|v| !self.contains(v)) {
            return Err(precondition("vectors to extend must lie in the subspace"));
        }
        if linalg::rank(f, &out, self.ambient) != out.len() {
            return Err(precondition("vectors to extend must be linearly independent"));
        }
        for b in &self.basis {
            let mut trial = out.clone();
            trial.push(b.clone());
            if linalg::rank(f, &trial, self.ambient) == trial.len() {
                out = trial;
            }
        }
        Ok(out)
    }
}

/// Gaussian binomial coefficient `[n choose k]_q`, saturating.
pub fn gaussian_binomial(q: u64, n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let q = q as u128;
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        num = num.saturating_mul(q.saturating_pow((n - i) as u32).saturating_sub(1));
        den = den.saturating_mul(q.saturating_pow((i + 1) as u32).saturating_sub(1));
    }
    if num == u128::MAX {
        return u128::MAX;
    }
    num / den
}

/// Every `k`-dimensional subspace of `F_q^ambient`, ordered by pivot set
/// (lexicographic) and then by free entries.
pub fn enumerate_subspaces(field: &Arc<BaseField>, ambient: usize, k: usize) -> Result<Vec<Subspace>> {
    let count = gaussian_binomial(field.q() as u64, ambient, k);
    if count > MAX_SUBSPACE_ENUMERATION {
        return Err(Error::CapExceeded(format!(
            "{count} subspaces of dimension {k} in F_{}^{ambient} exceed the enumeration cap",
            field.q()
        )));
    }
    let mut out = Vec::with_capacity(count as usize);
    let q = field.q() as u64;
    for pivots in combinations(ambient, k) {
        // free slots: (row, col) with col > pivot[row] and col not a pivot
        let free: Vec<(usize, usize)> = pivots
            .iter()
            .enumerate()
            .flat_map(|(i, &p)| {
                let pivots = &pivots;
                (p + 1..ambient)
                    .filter(move |c| !pivots.contains(c))
                    .map(move |c| (i, c))
            })
            .collect();
        let total = q.pow(free.len() as u32);
        for idx in 0..total {
            let vals = linalg::vector_from_index(field.q(), free.len(), idx);
            let mut basis = vec![vec![0u32; ambient]; k];
            for (i, &p) in pivots.iter().enumerate() {
                basis[i][p] = 1;
            }
            for (&(i, c), &v) in free.iter().zip(&vals) {
                basis[i][c] = v;
            }
            out.push(Subspace {
                field: field.clone(),
                ambient,
                basis,
                pivots: pivots.clone(),
            });
        }
    }
    Ok(out)
}

/// `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Nonempty subsets of `0..t` as sorted index lists, in lexicographic order.
pub fn lex_subsets(t: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, t: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        for i in start..t {
            cur.push(i);
            out.push(cur.clone());
            rec(i + 1, t, cur, out);
            cur.pop();
        }
    }
    rec(0, t, &mut cur, &mut out);
    out
}

/// An ordered list of subspaces of one ambient space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubspaceFamily {
    members: Vec<Subspace>,
}

impl SubspaceFamily {
    pub fn new(members: Vec<Subspace>) -> Result<Self> {
        if let Some(first) = members.first() {
            for m in &members[1..] {
                first.same_ambient(m)?;
            }
        }
        Ok(SubspaceFamily { members })
    }

    pub fn members(&self) -> &[Subspace] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Largest member dimension.
    pub fn s_max(&self) -> usize {
        self.members.iter().map(Subspace::dim).max().unwrap_or(0)
    }

    pub fn covers(&self, v: &[u32]) -> bool {
        self.members.iter().any(|m| m.contains(v))
    }
}

fn check_tower_subspace(tower: &FieldTower, s: &Subspace) -> Result<()> {
    if s.ambient != tower.n() || **s.field() != **tower.base() {
        return Err(structural("subspace does not live in this field tower"));
    }
    Ok(())
}

/// `<AB>`: span of all pairwise products of basis vectors.
pub fn product_span(tower: &FieldTower, a: &Subspace, b: &Subspace) -> Result<Subspace> {
    check_tower_subspace(tower, a)?;
    check_tower_subspace(tower, b)?;
    let prods: Vec<Vector> = a
        .basis
        .iter()
        .flat_map(|x| {
            b.basis
                .iter()
                .map(move |y| tower.mul(&FieldElement(x.clone()), &FieldElement(y.clone())).0)
        })
        .collect();
    Subspace::span(a.field.clone(), a.ambient, prods)
}

/// `cA = {ca : a ∈ A}`.
pub fn scale(tower: &FieldTower, c: &FieldElement, a: &Subspace) -> Result<Subspace> {
    check_tower_subspace(tower, a)?;
    if !tower.contains(c) {
        return Err(structural("scalar is not an element of the tower"));
    }
    if c.is_zero() {
        return Err(precondition("cannot scale a subspace by 0"));
    }
    Subspace::span(
        a.field.clone(),
        a.ambient,
        a.basis.iter().map(|x| tower.mul(c, &FieldElement(x.clone())).0),
    )
}

/// `{x : x·w_j ∈ W}` for every basis vector `w_j`, as the kernel of the
/// stacked constraints `h·(M_{w_j} x) = 0` over annihilator rows `h` of `W`.
fn multiplier_space(tower: &FieldTower, multiplicands: &[Vector], target: &Subspace) -> Subspace {
    let f = tower.base();
    let n = tower.n();
    let ann = target.annihilator();
    let mut rows = Vec::new();
    for w in multiplicands {
        // x·w = M_w x, so h·(M_w x) = (h^T M_w) x
        let m = tower.mul_matrix(&FieldElement(w.clone()));
        for h in ann.basis() {
            let row: Vector = (0..n)
                .map(|col| {
                    h.iter()
                        .zip(&m)
                        .fold(0, |acc, (&hi, mrow)| f.add(acc, f.mul(hi, mrow[col])))
                })
                .collect();
            rows.push(row);
        }
    }
    Subspace::span(f.clone(), n, linalg::kernel(f, &rows, n)).expect("kernel is well formed")
}

/// `{x ∈ F : xW ⊆ W}`.
pub fn stabilizer(tower: &FieldTower, w: &Subspace) -> Result<Subspace> {
    check_tower_subspace(tower, w)?;
    if w.is_zero() {
        return Err(precondition("stabilizer of the zero subspace is the whole field"));
    }
    let m = multiplier_space(tower, &w.basis, w);
    if !m.contains(&tower.one().0) {
        return Err(internal("stabilizer does not contain 1"));
    }
    if !is_subfield(tower, &m)? {
        return Err(internal("stabilizer is not multiplicatively closed"));
    }
    Ok(m)
}

/// `{x : x·S ⊆ A}` for an arbitrary `S`.
pub fn translates_into(tower: &FieldTower, s: &Subspace, a: &Subspace) -> Result<Subspace> {
    check_tower_subspace(tower, s)?;
    check_tower_subspace(tower, a)?;
    Ok(multiplier_space(tower, &s.basis, a))
}

/// Contains 1 and is closed under multiplication.
pub fn is_subfield(tower: &FieldTower, s: &Subspace) -> Result<bool> {
    check_tower_subspace(tower, s)?;
    if !s.contains(&tower.one().0) {
        return Ok(false);
    }
    Ok(product_span(tower, s, s)?.is_subspace_of(s))
}

/// Every nonzero element generates `F_{q^n}` over `F_q`. Checked
/// exhaustively over the subspace, capped at [`MAX_SWEEP_ORDER`] elements.
pub fn is_primitive_subspace(tower: &FieldTower, s: &Subspace) -> Result<bool> {
    check_tower_subspace(tower, s)?;
    if (tower.q() as u64).saturating_pow(s.dim() as u32) > MAX_SWEEP_ORDER {
        return Err(Error::CapExceeded("primitivity sweep too large".into()));
    }
    // a nonzero element is primitive iff some scalar multiple is; projective points suffice
    Ok(s
        .projective_points()?
        .into_iter()
        .all(|v| tower.is_primitive_element(&FieldElement(v))))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KneserReport {
    pub dim_a: usize,
    pub dim_b: usize,
    pub dim_product: usize,
    pub dim_stabilizer: usize,
    pub holds: bool,
}

/// `dim <AB> >= dim A + dim B - dim M` with `M` the stabilizer of `<AB>`.
pub fn kneser_bound_check(tower: &FieldTower, a: &Subspace, b: &Subspace) -> Result<KneserReport> {
    if a.is_zero() || b.is_zero() {
        return Err(precondition("Kneser bound needs nonzero A and B"));
    }
    let prod = product_span(tower, a, b)?;
    let stab = stabilizer(tower, &prod)?;
    let holds = prod.dim() + stab.dim() >= a.dim() + b.dim();
    Ok(KneserReport {
        dim_a: a.dim(),
        dim_b: b.dim(),
        dim_product: prod.dim(),
        dim_stabilizer: stab.dim(),
        holds,
    })
}

/// The least vector (canonical order) outside every member.
///
/// A family of at most `q` proper subspaces never covers the space; larger
/// families are refused with [`Error::CoveringBound`].
pub fn find_uncovered_vector(fam: &SubspaceFamily) -> Result<Vector> {
    let Some(first) = fam.members.first() else {
        return Err(precondition("find_uncovered_vector needs the ambient space of a nonempty family"));
    };
    let q = first.field.q();
    if fam.len() > q as usize {
        return Err(Error::CoveringBound {
            members: fam.len(),
            q: q as u64,
        });
    }
    if fam.members.iter().any(Subspace::is_full) {
        return Err(precondition("family members must be proper subspaces"));
    }
    let n = first.ambient;
    let total = (q as u64)
        .checked_pow(n as u32)
        .filter(|&t| t <= MAX_VECTOR_SCAN)
        .ok_or_else(|| Error::CapExceeded("vector scan too large".into()))?;
    (0..total)
        .map(|i| linalg::vector_from_index(q, n, i))
        .find(|v| !fam.covers(v))
        .ok_or_else(|| internal("at most q proper subspaces covered the whole space"))
}

#[derive(Debug, Clone, Serialize)]
pub struct LinearCovering {
    pub q: u32,
    pub dim: usize,
    #[serde(serialize_with = "crate::json::ser_family")]
    pub family: SubspaceFamily,
    /// Every vector was checked to lie in some member.
    pub cover_verified: bool,
    /// Number of `q`-member subfamilies shown not to cover.
    pub subfamilies_uncovered: usize,
}

/// `q + 1` hyperplanes through a fixed codimension-2 subspace, which cover
/// `F_q^dim`; no `q` of them do.
pub fn linear_covering(field: &Arc<BaseField>, dim: usize) -> Result<LinearCovering> {
    if dim < 2 {
        return Err(precondition("linear coverings need dimension >= 2"));
    }
    let q = field.q();
    let unit = |i: usize| {
        let mut v = vec![0u32; dim];
        v[i] = 1;
        v
    };
    let common: Vec<Vector> = (2..dim).map(unit).collect();
    let mut members = Vec::with_capacity(q as usize + 1);
    // hyperplanes containing the common part are common + line of F_q^2
    members.push(Subspace::span(
        field.clone(),
        dim,
        common.iter().cloned().chain([unit(0)]),
    )?);
    members.push(Subspace::span(
        field.clone(),
        dim,
        common.iter().cloned().chain([unit(1)]),
    )?);
    for lambda in 1..q {
        let mut v = unit(0);
        v[1] = lambda;
        members.push(Subspace::span(field.clone(), dim, common.iter().cloned().chain([v]))?);
    }
    let family = SubspaceFamily::new(members)?;

    let total = (q as u64).saturating_pow(dim as u32);
    let cover_verified = if total <= MAX_SWEEP_ORDER {
        if !(0..total).all(|i| family.covers(&linalg::vector_from_index(q, dim, i))) {
            return Err(internal("constructed hyperplanes do not cover the space"));
        }
        true
    } else {
        false
    };

    let mut subfamilies_uncovered = 0;
    for skip in 0..family.len() {
        let sub = SubspaceFamily::new(
            family
                .members
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .map(|(_, m)| m.clone())
                .collect(),
        )?;
        let v = find_uncovered_vector(&sub)?;
        if sub.covers(&v) {
            return Err(internal("find_uncovered_vector returned a covered vector"));
        }
        subfamilies_uncovered += 1;
    }
    Ok(LinearCovering {
        q,
        dim,
        family,
        cover_verified,
        subfamilies_uncovered,
    })
}
