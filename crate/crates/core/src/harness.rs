//! Random cone-volume vectors and the structural checks run on them.
//!
//! Every draw uses its own ChaCha stream keyed by `(seed, draw index)`, so
//! batches are reproducible and identical whether drawn serially or in
//! parallel.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classification::{classify, positively_spans, ClassificationResult};
use crate::error::{Error, Result};
use crate::geometry::{cone_volumes_of, intersect_halfplanes, ConeVolumeVector, NormalSet, SupportVector};
use crate::polytope::{hull_vertices, ku_halfspaces, PolytopeRep};
use crate::quad::{quad_canonicalize, quad_membership};

/// Redraws allowed per sample before giving up.
pub const MAX_RETRIES: usize = 64;
/// Tolerance of every check.
pub const CHECK_TOL: f64 = 1e-9;

/// Streams at or above this offset are reserved for hull-gap augmentation.
const AUGMENT_STREAM: u64 = 1 << 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Distribution {
    /// iid uniform on `(0, 1]`.
    Uniform01,
    /// iid exponential with rate 1.
    Exp,
    /// Uniform, then one coordinate scaled by `10^-k`, `k` uniform in `1..=6`.
    NearDegenerate,
}

impl Distribution {
    pub const ALL: [Distribution; 3] = [
        Distribution::Uniform01,
        Distribution::Exp,
        Distribution::NearDegenerate,
    ];
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Distribution::Uniform01 => "uniform01",
            Distribution::Exp => "exp",
            Distribution::NearDegenerate => "nearDegenerate",
        })
    }
}

impl FromStr for Distribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform01" => Ok(Distribution::Uniform01),
            "exp" => Ok(Distribution::Exp),
            "nearDegenerate" => Ok(Distribution::NearDegenerate),
            other => Err(Error::InvalidOptions(format!(
                "unknown distribution {other:?} (expected uniform01, exp or nearDegenerate)"
            ))),
        }
    }
}

/// Normalized cone-volume vectors with the support numbers that produced them.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleBatch {
    pub normals: NormalSet,
    pub gammas: Vec<ConeVolumeVector>,
    /// Unit-area support numbers, one per gamma.
    pub supports: Vec<SupportVector>,
    pub seed: u64,
    pub dist: Distribution,
}

impl SampleBatch {
    pub fn len(&self) -> usize {
        self.gammas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gammas.is_empty()
    }
}

fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn uniform01(rng: &mut ChaCha8Rng) -> f64 {
    1.0 - rng.random::<f64>()
}

pub fn draw_support(rng: &mut ChaCha8Rng, m: usize, dist: Distribution) -> Vec<f64> {
    match dist {
        Distribution::Uniform01 => (0..m).map(|_| uniform01(rng)).collect(),
        Distribution::Exp => (0..m).map(|_| rng.sample(Exp1)).collect(),
        Distribution::NearDegenerate => {
            let mut b: Vec<f64> = (0..m).map(|_| uniform01(rng)).collect();
            let i = rng.random_range(0..m);
            let k = rng.random_range(1..=6);
            b[i] *= 10f64.powi(-k);
            b
        }
    }
}

/// Each coordinate is shrunk by `10^-k` with probability one half.
fn draw_multi_degenerate(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    (0..m)
        .map(|_| {
            let x = uniform01(rng);
            if rng.random_bool(0.5) {
                x * 10f64.powi(-rng.random_range(1..=6))
            } else {
                x
            }
        })
        .collect()
}

/// Draws until the polygon has interior, then rescales to unit area.
fn sample_one(
    u: &NormalSet,
    rng: &mut ChaCha8Rng,
    draw: impl Fn(&mut ChaCha8Rng) -> Vec<f64>,
) -> Result<(ConeVolumeVector, SupportVector)> {
    for _ in 0..MAX_RETRIES {
        let b = SupportVector::new(draw(rng))?;
        let poly = intersect_halfplanes(u, &b)?;
        if poly.degenerate {
            continue;
        }
        let b = b.scaled(1.0 / poly.area.sqrt());
        let poly = intersect_halfplanes(u, &b)?;
        if poly.degenerate {
            continue;
        }
        return Ok((cone_volumes_of(&poly, &b), b));
    }
    Err(Error::TooManyDegenerateDraws {
        attempts: MAX_RETRIES,
    })
}

pub fn sample_cone_volumes(u: &NormalSet, count: usize, seed: u64, dist: Distribution) -> Result<SampleBatch> {
    if count == 0 {
        return Err(Error::InvalidOptions("count must be at least 1".into()));
    }
    let m = u.len();
    let draws: Vec<(ConeVolumeVector, SupportVector)> = (0..count as u64)
        .into_par_iter()
        .map(|k| sample_one(u, &mut stream(seed, k), |r| draw_support(r, m, dist)))
        .collect::<Result<_>>()?;
    let (gammas, supports) = draws.into_iter().unzip();
    Ok(SampleBatch {
        normals: u.clone(),
        gammas,
        supports,
        seed,
        dist,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub trials: usize,
    pub passed: usize,
    /// Largest violation seen, recorded even when every trial passes.
    pub worst_violation: f64,
}

impl CheckResult {
    fn new(name: &str) -> Self {
        Self {
            name: name.into(),
            trials: 0,
            passed: 0,
            worst_violation: 0.0,
        }
    }

    fn record(&mut self, violation: f64) {
        self.trials += 1;
        if violation <= CHECK_TOL {
            self.passed += 1;
        }
        if violation > self.worst_violation || violation.is_nan() {
            self.worst_violation = violation;
        }
    }

    pub fn ok(&self) -> bool {
        self.passed == self.trials
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub count: usize,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(CheckResult::ok)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Largest violation of `rep` at `x`: halfspace excess or equality defect.
pub fn hull_violation(rep: &PolytopeRep, x: &[f64]) -> f64 {
    let eq = (x.iter().sum::<f64>() - rep.equality_rhs).abs();
    rep.halfspaces
        .iter()
        .map(|h| h.value(x) - h.rhs)
        .fold(eq, f64::max)
        .max(0.0)
}

/// Decrease of `gamma_s` when a facet adjacent to a square normal is deleted.
///
/// Works on the active normals of `P(U, b)` so that every normal defines a
/// facet. Only deletions that keep the polygon bounded are tried. Returns one
/// entry per deletion.
pub fn monotonicity_violations(u: &NormalSet, b: &SupportVector) -> Result<Vec<f64>> {
    let poly = intersect_halfplanes(u, b)?;
    if poly.degenerate {
        return Ok(Vec::new());
    }
    let mut active = poly.active_facets();
    active.sort_unstable();
    if active.len() <= 4 {
        return Ok(Vec::new());
    }
    let sub = u.subset(&active)?;
    let sub_b = SupportVector::new(sub.order().iter().map(|&i| b.as_slice()[i]).collect())?;
    let base = cone_volumes_of(&intersect_halfplanes(&sub, &sub_b)?, &sub_b);
    let base_area = base.sum();
    let cls = classify(&sub)?;
    let n = sub.len();
    let mut out = Vec::new();
    for &s in &cls.square {
        for i in [(s + n - 1) % n, (s + 1) % n] {
            let keep: Vec<usize> = (0..n).filter(|&k| k != i).collect();
            let vecs: Vec<_> = keep.iter().map(|&k| sub.vector(k)).collect();
            if !positively_spans(&vecs) {
                continue;
            }
            let rest = sub.subset(&keep)?;
            let rest_b = SupportVector::new(rest.order().iter().map(|&k| sub_b.as_slice()[k]).collect())?;
            let p = intersect_halfplanes(&rest, &rest_b)?;
            let g = cone_volumes_of(&p, &rest_b);
            let pos = rest.order().iter().position(|&k| k == s).ok_or_else(|| {
                Error::InternalInvariantViolation("square normal vanished after deletion".into())
            })?;
            let before = base.gamma[s] / base_area;
            let after = g.gamma[pos] / p.area;
            out.push((before - after).max(0.0));
        }
    }
    Ok(out)
}

fn run_checks(
    u: &NormalSet,
    cls: &ClassificationResult,
    batches: &[SampleBatch],
    checks: &mut [CheckResult; 6],
) -> Result<()> {
    let ku = ku_halfspaces(u, cls);
    let quad = u.len() == 4 && quad_canonicalize(u).is_ok();
    for batch in batches {
        for (cv, b) in batch.gammas.iter().zip(&batch.supports) {
            let g = &cv.gamma;
            checks[0].record(hull_violation(&ku, g));
            for &i in &cls.square {
                checks[1].record(g[i] - 0.5);
                let j = cls.antipode[&i];
                checks[2].record(g[i] + 0.5 * g[j] - 0.5);
            }
            for v in monotonicity_violations(u, b)? {
                checks[3].record(v);
            }
            if quad {
                checks[5].record(if quad_membership(u, g, true)? { 0.0 } else { 1.0 });
            }
        }
    }
    Ok(())
}

/// Samples `count` vectors from each distribution and runs every structural check.
pub fn verify_suite(u: &NormalSet, count: usize, seed: u64) -> Result<VerifyReport> {
    let cls = classify(u)?;
    let batches: Vec<SampleBatch> = Distribution::ALL
        .iter()
        .enumerate()
        .map(|(k, &d)| sample_cone_volumes(u, count, seed.wrapping_add(k as u64), d))
        .collect::<Result<_>>()?;
    let mut checks = [
        CheckResult::new("hull_containment"),
        CheckResult::new("square_mass_at_most_half"),
        CheckResult::new("antipodal_inequality"),
        CheckResult::new("monotonicity"),
        CheckResult::new("classification_laws"),
        CheckResult::new("quad_oracle_agreement"),
    ];
    run_checks(u, &cls, &batches, &mut checks)?;
    checks[4].record(if cls.check_laws(u).is_ok() { 0.0 } else { 1.0 });
    Ok(VerifyReport {
        seed,
        count,
        checks: checks.into(),
    })
}

/// Largest sup-norm distance from a hull vertex to its nearest sampled vector.
///
/// The batch is augmented with as many draws in which several coordinates
/// are shrunk at once; vertices that need two vanishing supports are out of
/// reach of single-coordinate perturbations.
pub fn empirical_hull_gap(u: &NormalSet, batch: &SampleBatch) -> Result<f64> {
    let m = u.len();
    if batch.len() < m + 1 {
        return Err(Error::InvalidOptions(format!(
            "batch of {} is smaller than m + 1 = {}",
            batch.len(),
            m + 1
        )));
    }
    let extra: Vec<ConeVolumeVector> = (0..batch.len() as u64)
        .into_par_iter()
        .map(|k| {
            sample_one(u, &mut stream(batch.seed, AUGMENT_STREAM + k), |r| {
                draw_multi_degenerate(r, m)
            })
            .map(|(g, _)| g)
        })
        .collect::<Result<_>>()?;
    let verts = hull_vertices(u, &classify(u)?);
    let pool: Vec<&Vec<f64>> = batch.gammas.iter().chain(&extra).map(|g| &g.gamma).collect();
    Ok(verts
        .par_iter()
        .map(|v| {
            pool.iter()
                .map(|g| g.iter().zip(v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| 0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trapezoid() -> NormalSet {
        let h = 0.5f64.sqrt();
        NormalSet::from_vectors(&[[0.0, 1.0], [-1.0, 0.0], [0.0, -1.0], [h, h]]).unwrap()
    }

    fn square() -> NormalSet {
        NormalSet::from_angles_deg(&[0.0, 90.0, 180.0, 270.0]).unwrap()
    }

    #[test]
    fn square_pair_sums() {
        let batch = sample_cone_volumes(&square(), 3, 7, Distribution::Uniform01).unwrap();
        assert_eq!(batch.len(), 3);
        for cv in &batch.gammas {
            let g = &cv.gamma;
            assert!((g[0] + g[2] - 0.5).abs() < 1e-12);
            assert!((g[1] + g[3] - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn deterministic_batches() {
        for d in Distribution::ALL {
            let a = sample_cone_volumes(&trapezoid(), 5, 11, d).unwrap();
            let b = sample_cone_volumes(&trapezoid(), 5, 11, d).unwrap();
            assert_eq!(a, b);
            for cv in &a.gammas {
                assert!((cv.sum() - 1.0).abs() < 1e-9);
            }
        }
        let a = sample_cone_volumes(&trapezoid(), 1, 11, Distribution::Exp).unwrap();
        let b = sample_cone_volumes(&trapezoid(), 5, 11, Distribution::Exp).unwrap();
        assert_eq!(a.gammas[0], b.gammas[0]);
    }

    #[test]
    fn distribution_names() {
        for d in Distribution::ALL {
            assert_eq!(d.to_string().parse::<Distribution>().unwrap(), d);
        }
        assert!("normal".parse::<Distribution>().is_err());
        assert!(sample_cone_volumes(&square(), 0, 1, Distribution::Exp).is_err());
    }

    #[test]
    fn verify_trapezoid() {
        let r = verify_suite(&trapezoid(), 2000, 3).unwrap();
        assert!(r.all_passed(), "{r:?}");
        assert!(r.check("quad_oracle_agreement").unwrap().trials == 6000);
        assert_eq!(r.check("square_mass_at_most_half").unwrap().trials, 6000);
        assert_eq!(r, verify_suite(&trapezoid(), 2000, 3).unwrap());
    }

    #[test]
    fn verify_hexagon() {
        let u = NormalSet::from_angles_deg(&[0.0, 60.0, 120.0, 180.0, 240.0, 300.0]).unwrap();
        let r = verify_suite(&u, 1000, 5).unwrap();
        assert!(r.all_passed(), "{r:?}");
        assert_eq!(r.check("quad_oracle_agreement").unwrap().trials, 0);
    }

    #[test]
    fn monotonicity_applies_with_square_normal() {
        // 90 deg has its antipode isolated below the axis
        let u = NormalSet::from_angles_deg(&[0.0, 60.0, 90.0, 120.0, 180.0, 270.0]).unwrap();
        let c = classify(&u).unwrap();
        assert_eq!(c.square, vec![2]);
        let b = SupportVector::new(vec![1.0, 1.1, 1.0, 1.1, 1.0, 1.0]).unwrap();
        let v = monotonicity_violations(&u, &b).unwrap();
        assert!(!v.is_empty());
        assert!(v.iter().all(|&x| x <= 1e-12));
        let r = verify_suite(&u, 500, 9).unwrap();
        assert!(r.check("monotonicity").unwrap().trials > 0);
        assert!(r.all_passed(), "{r:?}");
    }

    #[test]
    fn hull_gap_small() {
        let u = trapezoid();
        let batch = sample_cone_volumes(&u, 20000, 1, Distribution::NearDegenerate).unwrap();
        let gap = empirical_hull_gap(&u, &batch).unwrap();
        assert!(gap < 0.05, "gap {gap}");
        let small = sample_cone_volumes(&u, 3, 1, Distribution::Exp).unwrap();
        assert!(empirical_hull_gap(&u, &small).is_err());
    }
}
