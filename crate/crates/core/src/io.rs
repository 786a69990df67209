//! JSON documents read and written by the command-line tool.
//!
//! Files carry vectors in the order of the normals in the input file. The
//! library works in canonical order; the helpers here translate both ways.

use std::collections::BTreeMap;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::classification::ClassificationResult;
use crate::error::{check_vector, Error, Result};
use crate::geometry::{validate_normals, NormalSet, RawNormals, SupportVector};
use crate::polytope::{Halfspace, PolytopeRep};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportFile {
    pub b: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaFile {
    pub gamma: Vec<f64>,
}

pub fn parse_json<T: DeserializeOwned>(text: &str, source_name: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        source_name: source_name.into(),
        message: e.to_string(),
    })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_json(&text, &path.display().to_string())
}

pub fn read_normals(path: &Path) -> Result<NormalSet> {
    validate_normals(&read_json::<RawNormals>(path)?)
}

/// Reads `{"b": [...]}` in input order and returns it in canonical order.
pub fn read_support(path: &Path, u: &NormalSet) -> Result<SupportVector> {
    let f: SupportFile = read_json(path)?;
    check_vector(&f.b, u.len())?;
    SupportVector::new(u.to_canonical(&f.b))
}

/// Reads `{"gamma": [...]}` in input order and returns it in canonical order.
pub fn read_gamma(path: &Path, u: &NormalSet) -> Result<Vec<f64>> {
    let f: GammaFile = read_json(path)?;
    check_vector(&f.gamma, u.len())?;
    Ok(u.to_canonical(&f.gamma))
}

fn to_input_index(u: &NormalSet, k: usize) -> usize {
    u.order()[k]
}

fn indices_to_input(u: &NormalSet, idx: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = idx.iter().map(|&k| to_input_index(u, k)).collect();
    out.sort_unstable();
    out
}

/// Relabels every index of a classification from canonical to input order.
pub fn classification_to_input(u: &NormalSet, c: &ClassificationResult) -> ClassificationResult {
    let map = |k: &usize| to_input_index(u, *k);
    ClassificationResult {
        delta: indices_to_input(u, &c.delta),
        square: indices_to_input(u, &c.square),
        adjacency: c
            .adjacency
            .iter()
            .map(|(k, v)| (map(k), indices_to_input(u, v)))
            .collect(),
        antipode: c.antipode.iter().map(|(k, v)| (map(k), map(v))).collect(),
        reducible: c.reducible,
        witness: c.witness.iter().map(|(k, w)| (map(k), *w)).collect::<BTreeMap<_, _>>(),
    }
}

/// Permutes every coordinate vector of `rep` from canonical to input order.
pub fn polytope_to_input(u: &NormalSet, rep: &PolytopeRep) -> PolytopeRep {
    PolytopeRep {
        halfspaces: rep
            .halfspaces
            .iter()
            .map(|h| Halfspace {
                a: u.to_input_order(&h.a),
                rhs: h.rhs,
            })
            .collect(),
        equality_rhs: rep.equality_rhs,
        vertices: rep.vertices.iter().map(|v| u.to_input_order(v)).collect(),
        dim: rep.dim,
    }
}
