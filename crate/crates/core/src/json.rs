//! JSON wire formats for CLI inputs and reports.
//!
//! `F_q` scalars are written as integers whose little-endian base-`p` digits
//! are the coefficients over `F_p`. On input a scalar may also be an array
//! of `r` digits. An element of `F_{q^n}` is an array of `n` scalars; input
//! additionally accepts its integer index or a flat array of `n·r` digits.
//! Subspaces are given by their RREF basis and rejected otherwise.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::ser::SerializeSeq;
use serde::{Deserialize, Serialize, Serializer};
use serde_json::Value;

use crate::abelian::{GroupElement, GroupSpec, GroupSubset};
use crate::error::{structural, Error, Result};
use crate::gfq::{BaseField, FieldElement, FieldTower};
use crate::intersectfam::SetFamily;
use crate::linalg::Vector;
use crate::subspace::{Subspace, SubspaceFamily};

fn parse_err(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

fn from_str<T: for<'de> Deserialize<'de>>(s: &str) -> Result<T> {
    serde_json::from_str(s).map_err(parse_err)
}

pub fn ser_subspace_basis<S: Serializer>(s: &Subspace, ser: S) -> std::result::Result<S::Ok, S::Error> {
    s.basis().serialize(ser)
}

pub fn ser_opt_subspace_basis<S: Serializer>(s: &Option<Subspace>, ser: S) -> std::result::Result<S::Ok, S::Error> {
    s.as_ref().map(Subspace::basis).serialize(ser)
}

pub fn ser_subspace_list<S: Serializer>(list: &[Subspace], ser: S) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = ser.serialize_seq(Some(list.len()))?;
    for s in list {
        seq.serialize_element(s.basis())?;
    }
    seq.end()
}

pub fn ser_family<S: Serializer>(fam: &SubspaceFamily, ser: S) -> std::result::Result<S::Ok, S::Error> {
    ser_subspace_list(fam.members(), ser)
}

// ---- groups

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupWire {
    pub factors: Vec<u64>,
}

impl GroupWire {
    pub fn of(g: &GroupSpec) -> Self {
        GroupWire {
            factors: g.factors().to_vec(),
        }
    }

    pub fn build(&self) -> Result<GroupSpec> {
        GroupSpec::new(self.factors.clone())
    }
}

/// An element as `[c1, ..., ck]`, or a bare integer in a cyclic group.
pub fn parse_group_element(g: &GroupSpec, v: &Value) -> Result<GroupElement> {
    let coords = match v {
        Value::Number(_) => vec![as_u64(v)?],
        Value::Array(items) => items.iter().map(as_u64).collect::<Result<_>>()?,
        _ => return Err(Error::Parse("group element must be an array or integer".into())),
    };
    g.element(coords)
}

pub fn parse_group_subset(g: &GroupSpec, v: &Value) -> Result<GroupSubset> {
    let Value::Array(items) = v else {
        return Err(Error::Parse("subset must be an array of elements".into()));
    };
    let elems = items.iter().map(|x| parse_group_element(g, x)).collect::<Result<Vec<_>>>()?;
    g.subset(elems)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupPairWire {
    group: GroupWire,
    a: Value,
    b: Value,
}

/// `{"group": {"factors": [...]}, "a": [...], "b": [...]}`
pub fn parse_group_pair(s: &str) -> Result<(GroupSpec, GroupSubset, GroupSubset)> {
    let w: GroupPairWire = from_str(s)?;
    let g = w.group.build()?;
    let a = parse_group_subset(&g, &w.a)?;
    let b = parse_group_subset(&g, &w.b)?;
    Ok((g, a, b))
}

// ---- fields

fn as_u64(v: &Value) -> Result<u64> {
    v.as_u64()
        .ok_or_else(|| Error::Parse(format!("expected a non-negative integer, got {v}")))
}

fn as_u32(v: &Value) -> Result<u32> {
    u32::try_from(as_u64(v)?).map_err(|_| Error::Parse(format!("integer {v} out of range")))
}

/// One `F_q` scalar: an integer below `q` or an array of `r` digits.
pub fn parse_scalar(f: &BaseField, v: &Value) -> Result<u32> {
    match v {
        Value::Array(digits) => {
            if digits.len() != f.r() as usize {
                return Err(structural(format!("scalar needs {} digits, got {}", f.r(), digits.len())));
            }
            let d = digits.iter().map(as_u32).collect::<Result<Vec<_>>>()?;
            f.from_digits(&d)
        }
        _ => {
            let c = as_u64(v)?;
            if c >= f.q() as u64 {
                return Err(structural(format!("scalar {c} out of range for F_{}", f.q())));
            }
            Ok(c as u32)
        }
    }
}

/// A vector of `len` scalars, or a flat array of `len·r` digits.
pub fn parse_vector(f: &BaseField, len: usize, v: &Value) -> Result<Vector> {
    let Value::Array(items) = v else {
        return Err(Error::Parse(format!("expected an array of {len} scalars")));
    };
    let r = f.r() as usize;
    if r > 1 && items.len() == len * r && items.len() != len {
        let digits = items.iter().map(as_u32).collect::<Result<Vec<_>>>()?;
        return digits.chunks(r).map(|d| f.from_digits(d)).collect();
    }
    if items.len() != len {
        return Err(structural(format!("expected {len} scalars, got {}", items.len())));
    }
    items.iter().map(|x| parse_scalar(f, x)).collect()
}

pub fn parse_field_element(t: &FieldTower, v: &Value) -> Result<FieldElement> {
    if let Value::Number(_) = v {
        let idx = as_u64(v)?;
        if idx >= t.order() {
            return Err(structural(format!("element index {idx} out of range for a field of order {}", t.order())));
        }
        return Ok(t.from_index(idx));
    }
    Ok(FieldElement(parse_vector(t.base(), t.n(), v)?))
}

fn default_r() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TowerWire {
    pub p: u64,
    #[serde(default = "default_r")]
    pub r: u32,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_modulus: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub top_modulus: Option<Vec<Value>>,
}

impl TowerWire {
    pub fn of(t: &FieldTower) -> Self {
        TowerWire {
            p: t.p() as u64,
            r: t.r(),
            n: t.n(),
            base_modulus: Some(t.base().modulus().to_vec()),
            top_modulus: Some(t.top_modulus().iter().map(|&c| Value::from(c)).collect()),
        }
    }

    pub fn build(&self) -> Result<FieldTower> {
        let base = match &self.base_modulus {
            Some(m) => {
                if m.len() != self.r as usize + 1 {
                    return Err(structural("base modulus degree differs from r"));
                }
                BaseField::with_modulus(self.p, m.clone())?
            }
            None => BaseField::new(self.p, self.r)?,
        };
        match &self.top_modulus {
            None => FieldTower::over(base, self.n),
            Some(m) => {
                if m.len().checked_sub(1) != Some(self.n) {
                    return Err(structural("top modulus degree differs from n"));
                }
                let coeffs = m.iter().map(|c| parse_scalar(&base, c)).collect::<Result<Vec<_>>>()?;
                FieldTower::with_moduli(self.p, base.modulus().to_vec(), coeffs)
            }
        }
    }
}

pub fn parse_tower(s: &str) -> Result<FieldTower> {
    from_str::<TowerWire>(s)?.build()
}

fn parse_rref_subspace(field: &Arc<BaseField>, ambient: usize, v: &Value) -> Result<Subspace> {
    let Value::Array(rows) = v else {
        return Err(Error::Parse("basis must be an array of vectors".into()));
    };
    let rows = rows
        .iter()
        .map(|r| parse_vector(field, ambient, r))
        .collect::<Result<Vec<_>>>()?;
    Subspace::from_rref(field.clone(), ambient, rows)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct SubspaceWire {
    tower: TowerWire,
    basis: Value,
}

/// `{"tower": {...}, "basis": [...]}` with the basis in RREF.
pub fn parse_subspace(s: &str) -> Result<(FieldTower, Subspace)> {
    let w: SubspaceWire = from_str(s)?;
    let t = w.tower.build()?;
    let sub = parse_rref_subspace(t.base(), t.n(), &w.basis)?;
    Ok((t, sub))
}

pub fn parse_element_list(t: &FieldTower, v: &Value) -> Result<Vec<FieldElement>> {
    let Value::Array(items) = v else {
        return Err(Error::Parse("expected an array of field elements".into()));
    };
    items.iter().map(|x| parse_field_element(t, x)).collect()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct BasisPairWire {
    tower: TowerWire,
    basis: Value,
    b: Value,
}

/// `{"tower", "basis": ordered basis of A, "b": RREF basis of B}`
pub fn parse_basis_pair(s: &str) -> Result<(FieldTower, Vec<FieldElement>, Subspace)> {
    let w: BasisPairWire = from_str(s)?;
    let t = w.tower.build()?;
    let basis = parse_element_list(&t, &w.basis)?;
    let b = parse_rref_subspace(t.base(), t.n(), &w.b)?;
    Ok((t, basis, b))
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct SubspacePairWire {
    tower: TowerWire,
    a: Value,
    b: Value,
}

/// `{"tower", "a", "b"}` with both bases in RREF.
pub fn parse_subspace_pair(s: &str) -> Result<(FieldTower, Subspace, Subspace)> {
    let w: SubspacePairWire = from_str(s)?;
    let t = w.tower.build()?;
    let a = parse_rref_subspace(t.base(), t.n(), &w.a)?;
    let b = parse_rref_subspace(t.base(), t.n(), &w.b)?;
    Ok((t, a, b))
}

// ---- families

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetFamilyWire {
    pub n: usize,
    pub m: usize,
    pub members: Vec<Vec<usize>>,
}

/// `{"n", "m", "members": [[1, 2], ...]}`
pub fn parse_set_family(s: &str) -> Result<SetFamily> {
    let w: SetFamilyWire = from_str(s)?;
    let mut members = Vec::with_capacity(w.members.len());
    for (i, m) in w.members.into_iter().enumerate() {
        let set: BTreeSet<usize> = m.iter().copied().collect();
        if set.len() != m.len() {
            return Err(structural(format!("member {i} repeats an element")));
        }
        members.push(set);
    }
    SetFamily::new(w.n, w.m, members)
}

pub fn set_family_to_wire(f: &SetFamily) -> SetFamilyWire {
    SetFamilyWire {
        n: f.n,
        m: f.m,
        members: f.members.iter().map(|s| s.iter().copied().collect()).collect(),
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct SubspaceFamilyWire {
    p: u64,
    #[serde(default = "default_r")]
    r: u32,
    #[serde(default)]
    base_modulus: Option<Vec<u32>>,
    dim: usize,
    #[serde(default)]
    m: Option<usize>,
    members: Vec<Value>,
}

/// A family of subspaces of `F_q^dim` with an optional intersection
/// parameter `m`.
#[derive(Debug, Clone)]
pub struct ParsedSubspaceFamily {
    pub field: Arc<BaseField>,
    pub dim: usize,
    pub m: Option<usize>,
    pub family: SubspaceFamily,
}

/// Ambient dimensions above this are rejected at parse time.
pub const MAX_FAMILY_AMBIENT: usize = 64;

/// `{"p", "r", "dim", "m"?, "members": [basis, ...]}`, bases in RREF.
pub fn parse_subspace_family(s: &str) -> Result<ParsedSubspaceFamily> {
    let w: SubspaceFamilyWire = from_str(s)?;
    let field = match w.base_modulus {
        Some(m) => {
            if m.len() != w.r as usize + 1 {
                return Err(structural("base modulus degree differs from r"));
            }
            BaseField::with_modulus(w.p, m)?
        }
        None => BaseField::new(w.p, w.r)?,
    };
    if w.dim == 0 || w.dim > MAX_FAMILY_AMBIENT {
        return Err(structural(format!("dim must be in 1..={MAX_FAMILY_AMBIENT}")));
    }
    let members = w
        .members
        .iter()
        .map(|b| parse_rref_subspace(&field, w.dim, b))
        .collect::<Result<Vec<_>>>()?;
    Ok(ParsedSubspaceFamily {
        field,
        dim: w.dim,
        m: w.m,
        family: SubspaceFamily::new(members)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_pair() {
        let (g, a, b) = parse_group_pair(r#"{"group":{"factors":[6]},"a":[1,[2]],"b":[[3],4]}"#).unwrap();
        assert_eq!(g.order(), 6);
        assert_eq!(a.len(), 2);
        assert_eq!(b.len(), 2);
        assert!(parse_group_pair(r#"{"group":{"factors":[6]},"a":[1,1],"b":[2,3]}"#).is_err());
        assert!(parse_group_pair(r#"{"group":{"factors":[6]},"a":[7],"b":[2]}"#).is_err());
    }

    #[test]
    fn tower_roundtrip() {
        let t = parse_tower(r#"{"p":3,"r":2,"n":2}"#).unwrap();
        let w = TowerWire::of(&t);
        let again = w.build().unwrap();
        assert_eq!(again.top_modulus(), t.top_modulus());
        assert!(matches!(parse_tower(r#"{"p":4,"n":2}"#), Err(Error::NotPrime(4))));
        assert!(parse_tower(r#"{"p":2,"n":2,"top_modulus":[0,0,1]}"#).is_err());
    }

    #[test]
    fn element_forms() {
        let t = FieldTower::new(3, 2, 2).unwrap();
        let a = parse_field_element(&t, &serde_json::json!([4, 0])).unwrap();
        let b = parse_field_element(&t, &serde_json::json!([[1, 1], 0])).unwrap();
        let c = parse_field_element(&t, &serde_json::json!([1, 1, 0, 0])).unwrap();
        let d = parse_field_element(&t, &serde_json::json!(36)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert_eq!(a, d);
    }

    #[test]
    fn non_rref_gets_suggestion() {
        let e = parse_subspace(r#"{"tower":{"p":2,"n":3},"basis":[[1,1,0],[0,1,0]]}"#).unwrap_err();
        assert_eq!(
            e,
            Error::NotRref {
                suggestion: "[[1, 0, 0], [0, 1, 0]]".into()
            }
        );
    }

    #[test]
    fn families() {
        let f = parse_set_family(r#"{"n":3,"m":3,"members":[[1,2],[2,3]]}"#).unwrap();
        assert_eq!(f.members.len(), 2);
        assert!(parse_set_family(r#"{"n":3,"m":3,"members":[[1,1]]}"#).is_err());
        let p = parse_subspace_family(r#"{"p":2,"dim":3,"members":[[[1,0,0],[0,1,0]]]}"#).unwrap();
        assert_eq!(p.family.len(), 1);
        assert_eq!(p.m, None);
    }
}
