//! JSON forms of lattices and isometries.
//!
//! Rationals are written as `"p/q"` strings (or `"p"`), integers as numbers.

use crate::disc::{DiscError, Isometry};
use crate::lattice::{Lattice, LatticeError, RelativeLattice};
use crate::linalg::{parse_rat, rat_string, Matrix, QVec};
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SerialError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad rational {0:?}")]
    Rational(String),
    #[error("Gram entries are not machine integers")]
    Overflow,
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Disc(#[from] DiscError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeJson {
    pub name: String,
    pub rank: usize,
    pub gram: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis_labels: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelativeLatticeJson {
    pub name: String,
    pub rank: usize,
    pub gram: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis_labels: Option<Vec<String>>,
    pub reference: LatticeJson,
    pub basis: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsometryJson {
    pub lattice: String,
    pub matrix: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

fn int_rows(m: &Matrix) -> Result<Vec<Vec<i64>>, SerialError> {
    m.to_i64_rows().ok_or(SerialError::Overflow)
}

pub fn lattice_to_json(l: &Lattice) -> Result<LatticeJson, SerialError> {
    Ok(LatticeJson {
        name: l.label().to_string(),
        rank: l.rank(),
        gram: int_rows(l.gram())?,
        basis_labels: l.basis_labels().map(<[String]>::to_vec),
    })
}

pub fn lattice_from_json(j: &LatticeJson) -> Result<Lattice, SerialError> {
    let l = Lattice::from_i64(j.name.clone(), &j.gram)?;
    Ok(match &j.basis_labels {
        Some(names) => l.with_basis_labels(names.clone()),
        None => l,
    })
}

/// `name` labels the sublattice; its Gram is on the stored basis.
pub fn relative_to_json(name: &str, l: &RelativeLattice) -> Result<RelativeLatticeJson, SerialError> {
    Ok(RelativeLatticeJson {
        name: name.to_string(),
        rank: l.rank(),
        gram: int_rows(l.gram())?,
        basis_labels: None,
        reference: lattice_to_json(l.reference())?,
        basis: l.basis().iter().map(|v| v.iter().map(rat_string).collect()).collect(),
    })
}

pub fn relative_from_json(j: &RelativeLatticeJson) -> Result<RelativeLattice, SerialError> {
    let reference = Arc::new(lattice_from_json(&j.reference)?);
    let basis = j
        .basis
        .iter()
        .map(|row| row.iter().map(|s| parse_rat(s).ok_or_else(|| SerialError::Rational(s.clone()))).collect())
        .collect::<Result<Vec<QVec>, _>>()?;
    Ok(RelativeLattice::new(reference, &basis)?)
}

pub fn isometry_to_json(iso: &Isometry) -> IsometryJson {
    IsometryJson { lattice: iso.lattice.clone(), matrix: iso.to_i64_rows(), name: Some(iso.name.clone()) }
}

/// Checks the matrix against the Gram of `l` before accepting it.
pub fn isometry_from_json(j: &IsometryJson, l: &RelativeLattice) -> Result<Isometry, SerialError> {
    let name = j.name.clone().unwrap_or_else(|| "loaded".into());
    Ok(Isometry::new(name, j.lattice.clone(), l.gram(), Matrix::from_i64(&j.matrix))?)
}

/// Reads a generator file: a JSON list of isometries.
pub fn parse_generator_file(text: &str) -> Result<Vec<IsometryJson>, SerialError> {
    Ok(serde_json::from_str(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn relative_roundtrip() {
        let k12 = catalog::k12();
        let j = relative_to_json("K12", &k12).unwrap();
        let text = serde_json::to_string(&j).unwrap();
        let back: RelativeLatticeJson = serde_json::from_str(&text).unwrap();
        assert_eq!(relative_from_json(&back).unwrap(), k12);
    }

    #[test]
    fn isometry_roundtrip() {
        let e6 = RelativeLattice::whole(Arc::new(catalog::e6()));
        let neg = Isometry::negation("E6", 6);
        let j = isometry_to_json(&neg);
        assert_eq!(isometry_from_json(&j, &e6).unwrap().matrix(), neg.matrix());
        let bad = IsometryJson { lattice: "E6".into(), matrix: vec![vec![0; 6]; 6], name: None };
        assert!(isometry_from_json(&bad, &e6).is_err());
    }
}
