//! Polygons `P(U, b)` and their cone-volume vectors.
//!
//! A [`NormalSet`] is stored in canonical order: counterclockwise by angle,
//! starting at the smallest angle in `[0, 2π)`. The permutation back to the
//! caller's order is kept in [`NormalSet::order`].

use std::f64::consts::{PI, TAU};

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{check_vector, Error, Result};
use crate::tol;

pub type Vec2 = Vector2<f64>;

/// Raw normal-set input, as read from JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawNormals {
    Vectors { normals: Vec<[f64; 2]> },
    AnglesDeg { angles_deg: Vec<f64> },
}

/// Angle of `v` in `[0, 2π)`.
pub fn angle_of(v: &Vec2) -> f64 {
    let a = v.y.atan2(v.x);
    let a = if a < 0.0 { a + TAU } else { a };
    if a >= TAU {
        0.0
    } else {
        a
    }
}

/// Cyclic distance between two angles, in `[0, π]`.
pub fn angular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Largest gap between cyclically consecutive entries of sorted angles.
///
/// A single angle has gap `2π`; an empty slice has gap `2π` as well.
pub fn max_angular_gap(sorted: &[f64]) -> f64 {
    if sorted.len() < 2 {
        return TAU;
    }
    let mut gap = sorted[0] + TAU - sorted[sorted.len() - 1];
    for w in sorted.windows(2) {
        gap = gap.max(w[1] - w[0]);
    }
    gap
}

/// A validated set of `m >= 3` distinct unit normals positively spanning the plane.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalSet {
    vectors: Vec<Vec2>,
    angles: Vec<f64>,
    order: Vec<usize>,
}

impl NormalSet {
    pub fn from_vectors(raw: &[[f64; 2]]) -> Result<Self> {
        let mut vectors = Vec::with_capacity(raw.len());
        for (index, p) in raw.iter().enumerate() {
            if !p[0].is_finite() || !p[1].is_finite() {
                return Err(Error::NonFinite { index });
            }
            let v = Vec2::new(p[0], p[1]);
            let norm = v.norm();
            if (norm - 1.0).abs() > tol::UNIT {
                return Err(Error::NotUnit { index, norm });
            }
            vectors.push(v);
        }
        Self::build(vectors)
    }

    pub fn from_angles_deg(angles: &[f64]) -> Result<Self> {
        let mut vectors = Vec::with_capacity(angles.len());
        for (index, a) in angles.iter().enumerate() {
            if !a.is_finite() {
                return Err(Error::NonFinite { index });
            }
            let (s, c) = a.to_radians().sin_cos();
            vectors.push(Vec2::new(snap(c), snap(s)));
        }
        Self::build(vectors)
    }

    fn build(vectors: Vec<Vec2>) -> Result<Self> {
        let m = vectors.len();
        if m < 3 {
            return Err(Error::TooFewNormals { count: m });
        }
        let raw_angles: Vec<f64> = vectors.iter().map(angle_of).collect();
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&i, &j| raw_angles[i].total_cmp(&raw_angles[j]));
        let angles: Vec<f64> = order.iter().map(|&i| raw_angles[i]).collect();

        for k in 0..m {
            let next = (k + 1) % m;
            let distance = angular_distance(angles[k], angles[next]);
            if distance <= tol::ANGLE {
                let (a, b) = (order[k], order[next]);
                return Err(Error::DuplicateNormal {
                    first: a.min(b),
                    second: a.max(b),
                    distance,
                });
            }
        }
        let max_gap = max_angular_gap(&angles);
        if max_gap >= PI - tol::ANGLE {
            return Err(Error::NotPositivelySpanning { max_gap });
        }
        let vectors = order.iter().map(|&i| vectors[i]).collect();
        Ok(Self {
            vectors,
            angles,
            order,
        })
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[Vec2] {
        &self.vectors
    }

    pub fn vector(&self, i: usize) -> Vec2 {
        self.vectors[i]
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    /// `order()[k]` is the caller's index of the normal stored at canonical index `k`.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Index `j` with `u_j = -u_i`, if present.
    pub fn antipode(&self, i: usize) -> Option<usize> {
        let target = (self.angles[i] + PI).rem_euclid(TAU);
        (0..self.len()).find(|&j| j != i && angular_distance(self.angles[j], target) < tol::ANGLE)
    }

    /// The normals at the given canonical indices, re-validated.
    ///
    /// The subset's `order` maps into this set's canonical indices.
    pub fn subset(&self, indices: &[usize]) -> Result<NormalSet> {
        let vectors: Vec<Vec2> = indices.iter().map(|&i| self.vectors[i]).collect();
        let mut sub = Self::build(vectors)?;
        sub.order = sub.order.iter().map(|&k| indices[k]).collect();
        Ok(sub)
    }

    /// Reorders a vector given in the caller's order into canonical order.
    pub fn to_canonical(&self, input: &[f64]) -> Vec<f64> {
        self.order.iter().map(|&i| input[i]).collect()
    }

    /// Reorders a canonical vector back into the caller's order.
    pub fn to_input_order(&self, canonical: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; canonical.len()];
        for (k, &i) in self.order.iter().enumerate() {
            out[i] = canonical[k];
        }
        out
    }
}

fn snap(x: f64) -> f64 {
    if x.abs() < 1e-15 {
        0.0
    } else {
        x
    }
}

/// Validates raw normals into a canonical [`NormalSet`].
pub fn validate_normals(raw: &RawNormals) -> Result<NormalSet> {
    match raw {
        RawNormals::Vectors { normals } => NormalSet::from_vectors(normals),
        RawNormals::AnglesDeg { angles_deg } => NormalSet::from_angles_deg(angles_deg),
    }
}

/// Right-hand side `b >= 0` of `P(U, b)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SupportVector(Vec<f64>);

impl SupportVector {
    pub fn new(b: Vec<f64>) -> Result<Self> {
        if let Some(index) = b.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        if let Some(index) = b.iter().position(|&x| x < 0.0) {
            return Err(Error::NegativeEntry {
                index,
                value: b[index],
            });
        }
        Ok(Self(b))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn scaled(&self, factor: f64) -> SupportVector {
        SupportVector(self.0.iter().map(|x| x * factor).collect())
    }

    fn max(&self) -> f64 {
        self.0.iter().copied().fold(0.0, f64::max)
    }
}

/// The polygon `P(U, b)` in vertex form.
#[derive(Clone, Debug, PartialEq)]
pub struct Polygon2D {
    /// Counterclockwise vertices.
    pub vertices: Vec<Vec2>,
    /// `facet_of[k]` is the constraint supporting the edge `vertices[k] -> vertices[k+1]`.
    pub facet_of: Vec<Option<usize>>,
    /// Edge length per constraint (zero when inactive).
    pub facet_lengths: Vec<f64>,
    pub area: f64,
    /// Set when the intersection has empty interior (`area <= tol::AREA`).
    pub degenerate: bool,
}

impl Polygon2D {
    pub fn is_active(&self, i: usize) -> bool {
        self.facet_lengths[i] > 0.0
    }

    /// Active constraints in counterclockwise edge order.
    pub fn active_facets(&self) -> Vec<usize> {
        self.facet_of.iter().flatten().copied().collect()
    }

    /// Support function `max_{x in P} <u, x>`.
    pub fn support(&self, u: &Vec2) -> f64 {
        self.vertices
            .iter()
            .map(|v| u.dot(v))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Smallest cross product of consecutive edge vectors.
    pub fn min_turn(&self) -> f64 {
        let n = self.vertices.len();
        (0..n)
            .map(|k| {
                let a = self.vertices[(k + 1) % n] - self.vertices[k];
                let b = self.vertices[(k + 2) % n] - self.vertices[(k + 1) % n];
                a.perp(&b)
            })
            .fold(f64::INFINITY, f64::min)
    }
}

pub(crate) fn shoelace(points: &[Vec2]) -> f64 {
    let n = points.len();
    if n < 3 {
        return 0.0;
    }
    0.5 * (0..n)
        .map(|k| points[k].perp(&points[(k + 1) % n]))
        .sum::<f64>()
}

fn check_support(u: &NormalSet, b: &SupportVector) -> Result<()> {
    check_vector(b.as_slice(), u.len())
}

/// Intersects the halfplanes `<u_i, x> <= b_i`.
///
/// The result is computed by clipping a box that contains every pairwise
/// intersection of constraint lines, hence every vertex of the polygon.
/// Degenerate intersections (empty interior) are flagged, not rejected.
pub fn intersect_halfplanes(u: &NormalSet, b: &SupportVector) -> Result<Polygon2D> {
    check_support(u, b)?;
    let m = u.len();
    let bs = b.as_slice();
    let scale = b.max().max(1.0);
    let edge_tol = tol::AREA * scale;

    let mut radius: f64 = 0.0;
    for i in 0..m {
        for j in (i + 1)..m {
            let (ui, uj) = (u.vector(i), u.vector(j));
            let det = ui.perp(&uj);
            if det.abs() < 1e-12 {
                continue;
            }
            let x = (bs[i] * uj.y - bs[j] * ui.y) / det;
            let y = (ui.x * bs[j] - uj.x * bs[i]) / det;
            radius = radius.max(x.abs()).max(y.abs());
        }
    }
    let r = radius + scale + 1.0;
    let mut pts = vec![
        Vec2::new(-r, -r),
        Vec2::new(r, -r),
        Vec2::new(r, r),
        Vec2::new(-r, r),
    ];
    let mut labels: Vec<Option<usize>> = vec![None; 4];

    for i in 0..m {
        let (p, l) = clip(&pts, &labels, &u.vector(i), bs[i], i, 1e-13 * r);
        let (p, l) = merge_short_edges(p, l, edge_tol);
        pts = p;
        labels = l;
        if pts.len() < 3 {
            break;
        }
    }

    let area = shoelace(&pts);
    let degenerate = pts.len() < 3 || area <= tol::AREA;
    let mut facet_lengths = vec![0.0; m];
    if degenerate {
        return Ok(Polygon2D {
            vertices: pts,
            facet_of: labels,
            facet_lengths,
            area: area.max(0.0),
            degenerate,
        });
    }
    let n = pts.len();
    for k in 0..n {
        match labels[k] {
            Some(i) => facet_lengths[i] += (pts[(k + 1) % n] - pts[k]).norm(),
            None => {
                return Err(Error::InternalInvariantViolation(
                    "halfplane intersection is unbounded for a positively spanning normal set"
                        .into(),
                ))
            }
        }
    }
    Ok(Polygon2D {
        vertices: pts,
        facet_of: labels,
        facet_lengths,
        area,
        degenerate,
    })
}

/// Sutherland-Hodgman step for one halfplane; the new edge is labelled `label`.
fn clip(
    pts: &[Vec2],
    labels: &[Option<usize>],
    normal: &Vec2,
    rhs: f64,
    label: usize,
    inside_tol: f64,
) -> (Vec<Vec2>, Vec<Option<usize>>) {
    let n = pts.len();
    let slack: Vec<f64> = pts.iter().map(|p| normal.dot(p) - rhs).collect();
    let mut out_p = Vec::with_capacity(n + 1);
    let mut out_l = Vec::with_capacity(n + 1);
    for k in 0..n {
        let next = (k + 1) % n;
        let (sc, sn) = (slack[k], slack[next]);
        let cur_in = sc <= inside_tol;
        let next_in = sn <= inside_tol;
        match (cur_in, next_in) {
            (true, true) => {
                out_p.push(pts[k]);
                out_l.push(labels[k]);
            }
            (true, false) => {
                out_p.push(pts[k]);
                out_l.push(labels[k]);
                let t = sc / (sc - sn);
                out_p.push(pts[k] + (pts[next] - pts[k]) * t.clamp(0.0, 1.0));
                out_l.push(Some(label));
            }
            (false, true) => {
                let t = sc / (sc - sn);
                out_p.push(pts[k] + (pts[next] - pts[k]) * t.clamp(0.0, 1.0));
                out_l.push(labels[k]);
            }
            (false, false) => {}
        }
    }
    (out_p, out_l)
}

/// Drops edges shorter than `tol`, keeping the label of the following edge.
fn merge_short_edges(
    mut pts: Vec<Vec2>,
    mut labels: Vec<Option<usize>>,
    tol: f64,
) -> (Vec<Vec2>, Vec<Option<usize>>) {
    let mut k = 0;
    while pts.len() > 1 && k < pts.len() {
        let next = (k + 1) % pts.len();
        if (pts[next] - pts[k]).norm() <= tol {
            pts.remove(k);
            labels.remove(k);
        } else {
            k += 1;
        }
    }
    (pts, labels)
}

/// Cone-volume vector `gamma(U, b)`, entries `b_i * |F_i| / 2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeVolumeVector {
    pub gamma: Vec<f64>,
    /// Set when `P(U, b)` has empty interior; `gamma` is then zero.
    pub degenerate: bool,
}

impl ConeVolumeVector {
    pub fn sum(&self) -> f64 {
        self.gamma.iter().sum()
    }
}

pub fn cone_volume_vector(u: &NormalSet, b: &SupportVector) -> Result<ConeVolumeVector> {
    let poly = intersect_halfplanes(u, b)?;
    Ok(cone_volumes_of(&poly, b))
}

pub(crate) fn cone_volumes_of(poly: &Polygon2D, b: &SupportVector) -> ConeVolumeVector {
    if poly.degenerate {
        return ConeVolumeVector {
            gamma: vec![0.0; b.len()],
            degenerate: true,
        };
    }
    let gamma = b
        .as_slice()
        .iter()
        .zip(&poly.facet_lengths)
        .map(|(bi, len)| 0.5 * bi * len)
        .collect();
    ConeVolumeVector {
        gamma,
        degenerate: false,
    }
}

/// Rescales `b` so that `P(U, b)` has area 1.
pub fn normalize_to_unit_area(u: &NormalSet, b: &SupportVector) -> Result<SupportVector> {
    let poly = intersect_halfplanes(u, b)?;
    if poly.degenerate {
        return Err(Error::DegeneratePolygon { area: poly.area });
    }
    Ok(b.scaled(1.0 / poly.area.sqrt()))
}

/// Normal set and support numbers of the image `A · P(U, b)` for `|det A| = 1`.
///
/// The returned normal set is re-sorted; its `order` maps each new canonical
/// index to the index of the source normal in `u`.
pub fn transform_unimodular(
    u: &NormalSet,
    b: &SupportVector,
    a: &Matrix2<f64>,
) -> Result<(NormalSet, SupportVector)> {
    check_support(u, b)?;
    let det = a.determinant();
    if (det.abs() - 1.0).abs() > tol::DET {
        return Err(Error::NotUnimodular { det });
    }
    let poly = intersect_halfplanes(u, b)?;
    if poly.degenerate {
        return Err(Error::DegeneratePolygon { area: poly.area });
    }
    let inv_t = a
        .try_inverse()
        .ok_or(Error::NotUnimodular { det })?
        .transpose();
    let mut normals = Vec::with_capacity(u.len());
    let mut supports = Vec::with_capacity(u.len());
    for (i, ui) in u.vectors().iter().enumerate() {
        let w = inv_t * ui;
        let len = w.norm();
        let n = w / len;
        normals.push([n.x, n.y]);
        supports.push(b.as_slice()[i] / len);
    }
    let image = NormalSet::from_vectors(&normals)?;
    let image_b = SupportVector::new(image.to_canonical(&supports))?;
    Ok((image, image_b))
}

/// A finite Borel measure on the circle supported on a normal set.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteMeasure {
    normals: NormalSet,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    /// `weights` are in canonical order of `normals` and must be strictly positive.
    pub fn new(normals: NormalSet, weights: Vec<f64>) -> Result<Self> {
        check_vector(&weights, normals.len())?;
        if let Some(index) = weights.iter().position(|&w| w <= 0.0) {
            return Err(Error::NegativeEntry {
                index,
                value: weights[index],
            });
        }
        Ok(Self { normals, weights })
    }

    pub fn normals(&self) -> &NormalSet {
        &self.normals
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Mass of the line through `u_i`.
    pub fn line_mass(&self, i: usize) -> f64 {
        self.weights[i] + self.normals.antipode(i).map_or(0.0, |j| self.weights[j])
    }

    /// The subspace concentration inequality `mu(L) <= mu(S^1) / 2` for every line `L`.
    pub fn satisfies_subspace_concentration(&self, eps: f64) -> bool {
        let half = 0.5 * self.total_mass();
        (0..self.normals.len()).all(|i| self.line_mass(i) <= half + eps)
    }
}
