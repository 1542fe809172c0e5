//! Matchings in finite abelian groups and their linear analogue for
//! subspaces of finite field extensions.
//!
//! The group side decides when `A` can be matched to `B` (a bijection with
//! `a + f(a) ∉ A`) and measures the deficiency. The linear side works with
//! `F_q`-subspaces of `F_{q^n}`: matched bases, primitive subspaces, subspace
//! partitions, and families with bounded intersections.

pub mod abelian;
pub mod error;
pub mod gfq;
pub mod harness;
pub mod intersectfam;
pub mod json;
pub mod linalg;
pub mod matchgrp;
pub mod matchlin;
pub mod report;
pub mod subspace;

pub use error::{Error, Result};
pub use gfq::{BaseField, FieldElement, FieldTower};
pub use subspace::{Subspace, SubspaceFamily};
