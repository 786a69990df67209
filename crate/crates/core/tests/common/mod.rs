//! Independent oracles and generators shared by the integration tests.
//!
//! Nothing here calls into the crate's geometry beyond constructing inputs;
//! every answer is recomputed from first principles.

#![allow(dead_code)]

use std::f64::consts::PI;

use conevol::NormalSet;
use nalgebra::{DMatrix, DVector, Vector2};
use proptest::prelude::*;

pub type V2 = Vector2<f64>;

pub fn trapezoid() -> NormalSet {
    let h = 0.5f64.sqrt();
    NormalSet::from_vectors(&[[0.0, 1.0], [-1.0, 0.0], [0.0, -1.0], [h, h]]).unwrap()
}

pub fn square() -> NormalSet {
    NormalSet::from_angles_deg(&[0.0, 90.0, 180.0, 270.0]).unwrap()
}

pub fn hexagon() -> NormalSet {
    NormalSet::from_angles_deg(&[0.0, 60.0, 120.0, 180.0, 240.0, 300.0]).unwrap()
}

pub fn pentagon() -> NormalSet {
    NormalSet::from_angles_deg(&[10.0, 100.0, 170.0, 260.0, 300.0]).unwrap()
}

pub fn sup_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// `pos(U) = R^2` iff no nonzero `d` has `<u, d> <= 0` for all `u`.
///
/// Such a `d`, if any, can be rotated until it is orthogonal to some member,
/// so the candidates `+-perp(u_i)` suffice.
pub fn spans_by_separation(vs: &[V2]) -> bool {
    if vs.len() < 3 {
        return false;
    }
    for v in vs {
        for d in [V2::new(-v.y, v.x), V2::new(v.y, -v.x)] {
            if vs.iter().all(|w| w.dot(&d) <= 1e-12) {
                return false;
            }
        }
    }
    true
}

/// Triangle-capable indices by brute force over triples.
pub fn delta_oracle(u: &NormalSet) -> Vec<usize> {
    let m = u.len();
    let v = u.vectors();
    (0..m)
        .filter(|&i| {
            (0..m).any(|j| {
                (0..m).any(|k| i != j && j != k && i != k && spans_by_separation(&[v[i], v[j], v[k]]))
            })
        })
        .collect()
}

/// Polygon `P(U, b)` by pairwise line intersections: the feasible
/// intersection points, sorted by angle about their mean.
pub struct OraclePolygon {
    pub vertices: Vec<V2>,
    pub area: f64,
    pub facet_lengths: Vec<f64>,
}

pub fn polygon_oracle(u: &[V2], b: &[f64]) -> OraclePolygon {
    let m = u.len();
    let scale = b.iter().fold(1.0f64, |a, &x| a.max(x));
    let feas = 1e-9 * scale;
    let mut pts: Vec<V2> = Vec::new();
    for i in 0..m {
        for j in (i + 1)..m {
            let a = nalgebra::Matrix2::new(u[i].x, u[i].y, u[j].x, u[j].y);
            if a.determinant().abs() < 1e-12 {
                continue;
            }
            let x = a.lu().solve(&V2::new(b[i], b[j])).unwrap();
            if u.iter().zip(b).all(|(uk, bk)| uk.dot(&x) <= bk + feas)
                && !pts.iter().any(|p| (p - x).norm() <= 1e-9 * scale)
            {
                pts.push(x);
            }
        }
    }
    let mut lengths = vec![0.0; m];
    if pts.len() < 3 {
        return OraclePolygon {
            vertices: pts,
            area: 0.0,
            facet_lengths: lengths,
        };
    }
    let c = pts.iter().fold(V2::zeros(), |a, p| a + p) / pts.len() as f64;
    pts.sort_by(|p, q| {
        let ap = (p.y - c.y).atan2(p.x - c.x);
        let aq = (q.y - c.y).atan2(q.x - c.x);
        ap.total_cmp(&aq)
    });
    let n = pts.len();
    let area = 0.5
        * (0..n)
            .map(|k| pts[k].x * pts[(k + 1) % n].y - pts[(k + 1) % n].x * pts[k].y)
            .sum::<f64>();
    for i in 0..m {
        let on: Vec<&V2> = pts
            .iter()
            .filter(|p| (u[i].dot(p) - b[i]).abs() <= feas)
            .collect();
        let mut best = 0.0f64;
        for p in &on {
            for q in &on {
                best = best.max((*p - *q).norm());
            }
        }
        lengths[i] = best;
    }
    OraclePolygon {
        vertices: pts,
        area,
        facet_lengths: lengths,
    }
}

pub fn cone_volumes_oracle(u: &[V2], b: &[f64]) -> (Vec<f64>, f64) {
    let p = polygon_oracle(u, b);
    (
        b.iter().zip(&p.facet_lengths).map(|(bi, l)| 0.5 * bi * l).collect(),
        p.area,
    )
}

/// Vertices of `{x : <1, x> = 1, <a_k, x> <= r_k}` by trying every set of
/// `m - 1` constraints together with the equality.
pub fn enumerate_vertices(rows: &[(Vec<f64>, f64)], m: usize) -> Vec<Vec<f64>> {
    let mut uniq: Vec<(Vec<f64>, f64)> = Vec::new();
    for r in rows {
        if !uniq.contains(r) {
            uniq.push(r.clone());
        }
    }
    let k = m - 1;
    let mut out: Vec<Vec<f64>> = Vec::new();
    let mut pick: Vec<usize> = (0..k).collect();
    if uniq.len() < k {
        return out;
    }
    loop {
        let mut a = DMatrix::<f64>::zeros(m, m);
        let mut rhs = DVector::<f64>::zeros(m);
        for c in 0..m {
            a[(0, c)] = 1.0;
        }
        rhs[0] = 1.0;
        for (r, &p) in pick.iter().enumerate() {
            for c in 0..m {
                a[(r + 1, c)] = uniq[p].0[c];
            }
            rhs[r + 1] = uniq[p].1;
        }
        if a.clone().svd(false, false).singular_values.min() > 1e-9 {
            if let Some(x) = a.lu().solve(&rhs) {
                let x: Vec<f64> = x.iter().copied().collect();
                let feasible = uniq
                    .iter()
                    .all(|(row, r)| row.iter().zip(&x).map(|(p, q)| p * q).sum::<f64>() <= r + 1e-9);
                if feasible && !out.iter().any(|v| sup_dist(v, &x) <= 1e-9) {
                    out.push(x);
                }
            }
        }
        // next combination
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if pick[i] < uniq.len() - k + i {
                pick[i] += 1;
                for j in (i + 1)..k {
                    pick[j] = pick[j - 1] + 1;
                }
                break;
            }
        }
    }
}

pub fn same_point_set(a: &[Vec<f64>], b: &[Vec<f64>], eps: f64) -> bool {
    a.len() == b.len()
        && a.iter().all(|v| b.iter().any(|w| sup_dist(v, w) <= eps))
        && b.iter().all(|v| a.iter().any(|w| sup_dist(v, w) <= eps))
}

/// Closed-form cone-volume set of a trapezoid in its frame `(g1, g2, g3, g4)`.
///
/// Unit-area trapezoids with the origin inside are parametrized by the share
/// `p` in `(1/2, 1]` of the long base and the height fraction `a` in `[0, 1]`
/// of the origin: `g1 = a (1 - p)`, `g3 = (1 - a) p`; the legs split the rest
/// freely. Eliminating `a` leaves `p^2 - (1 - g1 + g3) p + g3 = 0`.
pub fn trapezoid_param_oracle(g: [f64; 4]) -> bool {
    let [g1, _, g3, _] = g;
    if g1 == 0.0 && g3 <= 1.0 {
        // p = 1 is the triangle u2, u3, u4
        return true;
    }
    let bb = 1.0 - g1 + g3;
    let disc = bb * bb - 4.0 * g3;
    if disc < 0.0 {
        return false;
    }
    [0.5 * (bb - disc.sqrt()), 0.5 * (bb + disc.sqrt())]
        .into_iter()
        .any(|p| p > 0.5 && p <= 1.0 && (p == 1.0 || g1 / (1.0 - p) <= 1.0))
}

/// Random valid normal set with `m` normals; `pairs` members get their
/// antipode inserted by exact vector negation.
pub fn normal_set_strategy(min: usize, max: usize) -> impl Strategy<Value = NormalSet> {
    (
        proptest::collection::vec(0.0f64..2.0 * PI, min..=max),
        proptest::collection::vec(any::<bool>(), max),
    )
        .prop_filter_map("not a valid normal set", move |(angles, flags)| {
            let mut vs: Vec<[f64; 2]> = angles.iter().map(|a| [a.cos(), a.sin()]).collect();
            for (k, f) in flags.iter().enumerate() {
                if *f && k < angles.len() && vs.len() < max {
                    let v = vs[k];
                    vs.push([-v[0], -v[1]]);
                }
            }
            NormalSet::from_vectors(&vs).ok().filter(|u| has_clear_gaps(u))
        })
}

/// Rejects near-coincident or near-pi configurations where tolerance
/// decisions would make oracle comparisons ill-posed.
pub fn has_clear_gaps(u: &NormalSet) -> bool {
    let a = u.angles();
    let m = a.len();
    let gaps: Vec<f64> = (0..m)
        .map(|k| {
            let next = if k + 1 == m { a[0] + 2.0 * PI } else { a[k + 1] };
            next - a[k]
        })
        .collect();
    if gaps.iter().any(|&g| g < 1e-3 || (g - PI).abs() < 1e-3) {
        return false;
    }
    // no triple is within 1e-3 of a half turn configuration except exact antipodes
    for i in 0..m {
        for j in 0..m {
            if i == j {
                continue;
            }
            let d = (a[j] - a[i]).rem_euclid(2.0 * PI);
            if (d - PI).abs() < 1e-3 && (d - PI).abs() > 1e-9 {
                return false;
            }
        }
    }
    true
}

pub fn support_strategy(m: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(0.05f64..2.0, m)
}

/// Deterministic fuzzed normal sets for the acceptance runs.
pub fn fuzz_normal_sets(count: usize, min: usize, max: usize, seed: u64) -> Vec<NormalSet> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let m = rng.random_range(min..=max);
        let mut vs: Vec<[f64; 2]> = Vec::new();
        while vs.len() < m {
            let a = rng.random_range(0.0..2.0 * PI);
            vs.push([a.cos(), a.sin()]);
            if vs.len() < m && rng.random_bool(0.35) {
                let v = vs[vs.len() - 1];
                vs.push([-v[0], -v[1]]);
            }
        }
        // some sets get a member whose antipode is isolated on one side
        if m >= 4 && rng.random_bool(0.3) {
            let a = rng.random_range(0.0..2.0 * PI);
            let at = |t: f64| [t.cos(), t.sin()];
            vs = vec![at(a), at(a + PI)];
            let perp = at(a - PI / 2.0);
            let both_perps = rng.random_bool(0.2);
            for k in 0..(m - 2) {
                let theta = match k {
                    0 => rng.random_range(0.0..PI / 2.0),
                    1 => rng.random_range(PI / 2.0..PI),
                    _ => rng.random_range(0.0..PI),
                };
                vs.push(at(a - PI / 2.0 + theta));
            }
            if both_perps {
                vs[2] = perp;
                vs[3] = [-perp[0], -perp[1]];
            }
        }
        if let Ok(u) = NormalSet::from_vectors(&vs) {
            if has_clear_gaps(&u) {
                out.push(u);
            }
        }
    }
    out
}
