//! The subspace concentration polytope `P_scc(U)` and the closed convex hull
//! `K_U` of the unit-area cone-volume set, in vertex and halfspace form.
//!
//! Both live in the hyperplane `<1, x> = 1` of `R^m`. Vertices come straight
//! from their closed-form descriptions; halfspace forms are emitted as listed
//! (redundant) and can be reduced to facets with [`irredundant_facets`].

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::classification::ClassificationResult;
use crate::error::{check_vector, Error, Result};
use crate::geometry::NormalSet;

/// Slack below which a constraint counts as tight in rank tests.
pub const TIGHT: f64 = 1e-9;

/// `<a, x> <= rhs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub a: Vec<f64>,
    pub rhs: f64,
}

impl Halfspace {
    fn sparse(m: usize, terms: &[(usize, f64)], rhs: f64) -> Self {
        let mut a = vec![0.0; m];
        for &(i, c) in terms {
            a[i] += c;
        }
        Self { a, rhs }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.a.iter().zip(x).map(|(a, x)| a * x).sum()
    }

    pub fn slack(&self, x: &[f64]) -> f64 {
        self.rhs - self.value(x)
    }
}

/// A polytope in `{x : <1, x> = equality_rhs}` with both descriptions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolytopeRep {
    pub halfspaces: Vec<Halfspace>,
    pub equality_rhs: f64,
    pub vertices: Vec<Vec<f64>>,
    pub dim: usize,
}

impl PolytopeRep {
    fn new(halfspaces: Vec<Halfspace>, vertices: Vec<Vec<f64>>) -> Self {
        let dim = affine_rank(&vertices, TIGHT);
        Self {
            halfspaces,
            equality_rhs: 1.0,
            vertices,
            dim,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.vertices
            .first()
            .map(Vec::len)
            .or_else(|| self.halfspaces.first().map(|h| h.a.len()))
            .unwrap_or(0)
    }

    /// Inequalities including the defining equality, as counted in the literature.
    pub fn raw_constraint_count(&self) -> usize {
        self.halfspaces.len() + 1
    }

    pub fn contains(&self, x: &[f64], eps: f64) -> bool {
        contains(self, x, eps)
    }

    /// Rank of the active constraints (including the equality) at `x`.
    pub fn active_rank(&self, x: &[f64]) -> usize {
        let m = x.len();
        let mut rows: Vec<Vec<f64>> = vec![vec![1.0; m]];
        rows.extend(
            self.halfspaces
                .iter()
                .filter(|h| h.slack(x).abs() <= TIGHT)
                .map(|h| h.a.clone()),
        );
        matrix_rank(&rows, TIGHT)
    }
}

fn matrix_rank(rows: &[Vec<f64>], eps: f64) -> usize {
    if rows.is_empty() || rows[0].is_empty() {
        return 0;
    }
    let m = DMatrix::from_fn(rows.len(), rows[0].len(), |r, c| rows[r][c]);
    m.rank(eps)
}

/// Dimension of the affine hull of `points`.
pub fn affine_rank(points: &[Vec<f64>], eps: f64) -> usize {
    if points.len() < 2 {
        return 0;
    }
    let base = &points[0];
    let diffs: Vec<Vec<f64>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    matrix_rank(&diffs, eps)
}

fn midpoint(m: usize, i: usize, j: usize) -> Vec<f64> {
    let mut v = vec![0.0; m];
    v[i] = 0.5;
    v[j] = 0.5;
    v
}

fn unit(m: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; m];
    v[i] = 1.0;
    v
}

fn push_unique(out: &mut Vec<Vec<f64>>, v: Vec<f64>) {
    if !out.iter().any(|w| w == &v) {
        out.push(v);
    }
}

fn nonnegativity(m: usize) -> impl Iterator<Item = Halfspace> {
    (0..m).map(move |i| Halfspace::sparse(m, &[(i, -1.0)], 0.0))
}

/// Vertices `(e_i + e_j) / 2` of `P_scc(U)` over linearly independent pairs.
pub fn pscc_vertices(u: &NormalSet) -> Vec<Vec<f64>> {
    let m = u.len();
    let mut out = Vec::new();
    for i in 0..m {
        for j in (i + 1)..m {
            if u.antipode(i) != Some(j) {
                push_unique(&mut out, midpoint(m, i, j));
            }
        }
    }
    out
}

/// `P_scc(U)` with one rank-one constraint per line spanned by members of `U`:
/// `x_i + x_j <= 1/2` for an antipodal pair, `x_i <= 1/2` otherwise.
pub fn pscc_halfspaces(u: &NormalSet) -> PolytopeRep {
    let m = u.len();
    let mut hs: Vec<Halfspace> = nonnegativity(m).collect();
    for i in 0..m {
        match u.antipode(i) {
            Some(j) if j > i => hs.push(Halfspace::sparse(m, &[(i, 1.0), (j, 1.0)], 0.5)),
            Some(_) => {}
            None => hs.push(Halfspace::sparse(m, &[(i, 1.0)], 0.5)),
        }
    }
    PolytopeRep::new(hs, pscc_vertices(u))
}

/// Vertices of `cl(conv(C_cv(U)))`: `e_i` for `i ∈ U_Δ` and `(e_i + e_j) / 2`
/// for `i ∈ U_□`, `j ∈ U_{□,u_i}`.
pub fn hull_vertices(u: &NormalSet, cls: &ClassificationResult) -> Vec<Vec<f64>> {
    let m = u.len();
    let mut out = Vec::new();
    for &i in &cls.delta {
        push_unique(&mut out, unit(m, i));
    }
    for &i in &cls.square {
        for &j in &cls.adjacency[&i] {
            let (a, b) = (i.min(j), i.max(j));
            push_unique(&mut out, midpoint(m, a, b));
        }
    }
    out
}

/// The halfspace form of `K_U`, exactly in the order
/// `x_i <= 1` (U_Δ), `x_i + x_j / 2 <= 1/2` (antipodal square pairs),
/// `x_i + x_k <= 1` (adjacent pairs), `-x_i <= 0`.
///
/// For a parallelogram these rows alone leave a three-dimensional polytope
/// (it contains `(1/3, 0, 1/3, 1/3)`), while the hull is two-dimensional. The
/// line rows `x_i + x_j <= 1/2` of both antipodal pairs are then inserted
/// before nonnegativity so that the halfspaces describe the hull exactly.
pub fn ku_halfspaces(u: &NormalSet, cls: &ClassificationResult) -> PolytopeRep {
    let m = u.len();
    let mut hs = Vec::new();
    for &i in &cls.delta {
        hs.push(Halfspace::sparse(m, &[(i, 1.0)], 1.0));
    }
    for &i in &cls.square {
        let j = cls.antipode[&i];
        hs.push(Halfspace::sparse(m, &[(i, 1.0), (j, 0.5)], 0.5));
    }
    for &i in &cls.square {
        for &k in &cls.adjacency[&i] {
            hs.push(Halfspace::sparse(m, &[(i, 1.0), (k, 1.0)], 1.0));
        }
    }
    if cls.reducible {
        for (&i, &j) in cls.antipode.iter().filter(|(i, j)| i < j) {
            hs.push(Halfspace::sparse(m, &[(i, 1.0), (j, 1.0)], 0.5));
        }
    }
    hs.extend(nonnegativity(m));
    PolytopeRep::new(hs, hull_vertices(u, cls))
}

/// Keeps the halfspaces that define facets relative to the given vertices.
///
/// A halfspace is a facet iff its tight vertices have affine rank `dim - 1`
/// and it is not tight on every vertex. Halfspaces with identical tight sets
/// define the same facet; the first is kept.
pub fn irredundant_facets(rep: &PolytopeRep) -> Result<PolytopeRep> {
    let found = affine_rank(&rep.vertices, TIGHT);
    if found != rep.dim || rep.dim == 0 {
        return Err(Error::DimensionMismatch {
            declared: rep.dim,
            found,
        });
    }
    let mut seen: Vec<Vec<usize>> = Vec::new();
    let mut kept = Vec::new();
    for h in &rep.halfspaces {
        let tight: Vec<usize> = rep
            .vertices
            .iter()
            .enumerate()
            .filter(|(_, v)| h.slack(v).abs() <= TIGHT)
            .map(|(k, _)| k)
            .collect();
        if tight.len() == rep.vertices.len() || seen.contains(&tight) {
            continue;
        }
        let pts: Vec<Vec<f64>> = tight.iter().map(|&k| rep.vertices[k].clone()).collect();
        if !pts.is_empty() && affine_rank(&pts, TIGHT) + 1 == rep.dim {
            seen.push(tight);
            kept.push(h.clone());
        }
    }
    Ok(PolytopeRep {
        halfspaces: kept,
        equality_rhs: rep.equality_rhs,
        vertices: rep.vertices.clone(),
        dim: rep.dim,
    })
}

/// `|<1, x> - 1| <= eps` and every halfspace holds within `eps`.
pub fn contains(rep: &PolytopeRep, x: &[f64], eps: f64) -> bool {
    if check_vector(x, rep.ambient_dim()).is_err() {
        return false;
    }
    (x.iter().sum::<f64>() - rep.equality_rhs).abs() <= eps
        && rep.halfspaces.iter().all(|h| h.value(x) <= h.rhs + eps)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructurePredicates {
    /// `cl(conv(C_cv(U))) = P_scc(U)`, the parallelogram case.
    pub equals_pscc: bool,
    /// `cl(conv(C_cv(U))) = conv{e_1, ..., e_m}`.
    pub equals_hypersimplex: bool,
}

pub fn structure_predicates(cls: &ClassificationResult) -> StructurePredicates {
    StructurePredicates {
        equals_pscc: cls.square.len() == 4,
        equals_hypersimplex: cls.square.is_empty(),
    }
}
