//! Triangle-capable normals `U_Δ`, trapezoid-only normals `U_□` and their
//! adjacency sets.
//!
//! Every set is computed by an exhaustive scan over the definitions; `m` is
//! small in every use.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{angle_of, max_angular_gap, NormalSet, Vec2};
use crate::tol;

/// True iff the positive hull of `vectors` is the whole plane.
///
/// Decided by the angular gap scan: every cyclic gap must be strictly below π.
pub fn positively_spans(vectors: &[Vec2]) -> bool {
    let mut angles: Vec<f64> = vectors.iter().map(angle_of).collect();
    angles.sort_by(f64::total_cmp);
    max_angular_gap(&angles) < std::f64::consts::PI - tol::ANGLE
}

fn spans_indices(u: &NormalSet, idx: &[usize]) -> bool {
    let v: Vec<Vec2> = idx.iter().map(|&i| u.vector(i)).collect();
    positively_spans(&v)
}

/// Indices `i` for which some pair `j, k` makes `{u_i, u_j, u_k}` positively spanning.
pub fn compute_u_delta(u: &NormalSet) -> Vec<usize> {
    let m = u.len();
    (0..m)
        .filter(|&i| {
            (0..m).any(|j| {
                j != i && ((j + 1)..m).any(|k| k != i && spans_indices(u, &[i, j, k]))
            })
        })
        .collect()
}

/// Complement of [`compute_u_delta`], with each member checked for an antipode
/// and a hemisphere witness.
pub fn compute_u_square(u: &NormalSet) -> Result<Vec<usize>> {
    let delta = compute_u_delta(u);
    let square: Vec<usize> = (0..u.len()).filter(|i| !delta.contains(i)).collect();
    for &i in &square {
        if u.antipode(i).is_none() {
            return Err(Error::InternalInvariantViolation(format!(
                "normal {i} is in U_square but its antipode is missing"
            )));
        }
        hemisphere_witness_unchecked(u, i)?;
    }
    Ok(square)
}

fn require_square(u: &NormalSet, i: usize) -> Result<usize> {
    if i >= u.len() || compute_u_delta(u).contains(&i) {
        return Err(Error::NotSquareIndex { index: i });
    }
    u.antipode(i).ok_or_else(|| {
        Error::InternalInvariantViolation(format!("U_square member {i} has no antipode"))
    })
}

/// `U_{□,u_i}`: indices `k` for which a partner `l` makes `{u_i, -u_i, u_k, u_l}`
/// positively spanning.
pub fn adjacent_set(u: &NormalSet, i: usize) -> Result<Vec<usize>> {
    let anti = require_square(u, i)?;
    Ok(adjacent_unchecked(u, i, anti))
}

fn adjacent_unchecked(u: &NormalSet, i: usize, anti: usize) -> Vec<usize> {
    let m = u.len();
    (0..m)
        .filter(|&k| {
            k != i
                && k != anti
                && (0..m).any(|l| l != i && l != anti && l != k && spans_indices(u, &[i, anti, k, l]))
        })
        .collect()
}

/// A direction `d` with `<-u_i, d> > 0` and `<v, d> <= 0` for every other `v` in `U`,
/// i.e. an open hemisphere isolating `-u_i`.
pub fn hemisphere_witness(u: &NormalSet, i: usize) -> Result<Vec2> {
    require_square(u, i)?;
    hemisphere_witness_unchecked(u, i)
}

fn hemisphere_witness_unchecked(u: &NormalSet, i: usize) -> Result<Vec2> {
    let anti = u.antipode(i).ok_or_else(|| {
        Error::InternalInvariantViolation(format!("U_square member {i} has no antipode"))
    })?;
    let target = -u.vector(i);
    let mut candidates = vec![target];
    for v in u.vectors() {
        let p = Vec2::new(-v.y, v.x);
        candidates.push(p);
        candidates.push(-p);
    }
    let feasible = |d: &Vec2| {
        target.dot(d) > 1e-12
            && u
                .vectors()
                .iter()
                .enumerate()
                .all(|(k, v)| k == anti || v.dot(d) <= 1e-12)
    };
    candidates
        .into_iter()
        .filter(feasible)
        .fold(None, |best: Option<Vec2>, d| match best {
            Some(b) if b.dot(&target) >= d.dot(&target) => Some(b),
            _ => Some(d),
        })
        .ok_or_else(|| {
            Error::InternalInvariantViolation(format!(
                "no open hemisphere isolates the antipode of U_square member {i}"
            ))
        })
}

/// The two antipodal pairs when `U = {±u, ±v}`.
pub fn is_reducible(u: &NormalSet) -> Option<[[usize; 2]; 2]> {
    if u.len() != 4 {
        return None;
    }
    let a = u.antipode(0)?;
    let rest: Vec<usize> = (1..4).filter(|&k| k != a).collect();
    (u.antipode(rest[0]) == Some(rest[1])).then_some([[0, a], [rest[0], rest[1]]])
}

/// No two normals are parallel; for distinct unit vectors, no antipodal pair.
pub fn is_general_position(u: &NormalSet) -> bool {
    (0..u.len()).all(|i| u.antipode(i).is_none())
}

/// Structural sets of a normal set, all in canonical indices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationResult {
    pub delta: Vec<usize>,
    pub square: Vec<usize>,
    pub adjacency: BTreeMap<usize, Vec<usize>>,
    pub antipode: BTreeMap<usize, usize>,
    pub reducible: bool,
    pub witness: BTreeMap<usize, [f64; 2]>,
}

impl ClassificationResult {
    pub fn is_square(&self, i: usize) -> bool {
        self.square.contains(&i)
    }

    /// Checks the structural laws: partition, `|U_□| ∈ {0,1,2,4}`, antipodes,
    /// `|U_□| = 4` iff reducible, and witness inequalities.
    pub fn check_laws(&self, u: &NormalSet) -> Result<()> {
        let m = u.len();
        let fail = |msg: String| Err(Error::InternalInvariantViolation(msg));
        let mut all: Vec<usize> = self.delta.iter().chain(&self.square).copied().collect();
        all.sort_unstable();
        if all != (0..m).collect::<Vec<_>>() {
            return fail("U_delta and U_square do not partition U".into());
        }
        if ![0, 1, 2, 4].contains(&self.square.len()) {
            return fail(format!("|U_square| = {}", self.square.len()));
        }
        if (self.square.len() == 4) != self.reducible {
            return fail("|U_square| = 4 disagrees with reducibility".into());
        }
        for &i in &self.square {
            let Some(&j) = self.antipode.get(&i) else {
                return fail(format!("U_square member {i} lacks an antipode"));
            };
            let Some(d) = self.witness.get(&i) else {
                return fail(format!("U_square member {i} lacks a witness"));
            };
            let d = Vec2::new(d[0], d[1]);
            if u.vector(j).dot(&d) <= 0.0 {
                return fail(format!("witness of {i} does not contain the antipode"));
            }
            if (0..m).any(|k| k != j && u.vector(k).dot(&d) > 1e-12) {
                return fail(format!("witness of {i} contains another normal"));
            }
        }
        Ok(())
    }
}

pub fn classify(u: &NormalSet) -> Result<ClassificationResult> {
    let delta = compute_u_delta(u);
    let square = compute_u_square(u)?;
    let antipode: BTreeMap<usize, usize> = (0..u.len())
        .filter_map(|i| u.antipode(i).map(|j| (i, j)))
        .collect();
    let mut adjacency = BTreeMap::new();
    let mut witness = BTreeMap::new();
    for &i in &square {
        adjacency.insert(i, adjacent_unchecked(u, i, antipode[&i]));
        let d = hemisphere_witness_unchecked(u, i)?;
        witness.insert(i, [d.x, d.y]);
    }
    Ok(ClassificationResult {
        delta,
        square,
        adjacency,
        antipode,
        reducible: is_reducible(u).is_some(),
        witness,
    })
}
