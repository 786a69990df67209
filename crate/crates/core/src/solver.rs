//! Numerical inversion of the cone-volume map and the membership pipeline.
//!
//! [`solve`] searches for `b >= 0` with `vol P(U, b) = 1` and `gamma(U, b)`
//! close to a target. The unknowns are log support numbers; each iteration
//! takes a damped Gauss-Newton step on the residual of the area-normalized
//! cone volumes, projects back to unit area by `b <- b / sqrt(vol)` and pulls
//! inactive constraints onto the polygon so they can become active again.
//! Solutions of the log-Minkowski problem are saddle points of the usual
//! variational functional, so a plain ascent on it does not converge; the
//! residual formulation has exactly the solutions as its zeros.
//!
//! Zero target entries are handled first by dropping the normals (when the
//! rest still spans the plane) and re-inserting them at their support value,
//! and otherwise by fixing `b_i = 0`, a facet through the origin.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classification::{classify, is_general_position, positively_spans};
use crate::error::{Error, Result};
use crate::geometry::{cone_volume_vector, intersect_halfplanes, NormalSet, Polygon2D, SupportVector};
use crate::polytope::{ku_halfspaces, pscc_halfspaces};
use crate::quad::{check_normalized, quad_canonicalize, quad_membership};
use crate::tol;

/// Finite-difference step in log support numbers.
const FD_STEP: f64 = 1e-7;
/// Largest allowed max/min ratio of free support numbers.
const RATIO_LIMIT: f64 = 1e8;
/// Per-iteration cap on `|delta t|`.
const MAX_LOG_STEP: f64 = 1.0;
/// Slack for the strict sufficient conditions.
const STRICT: f64 = 1e-9;
/// Tolerance of the necessary hull test.
const HULL_EPS: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    /// Target sup-norm residual.
    pub tol: f64,
    pub max_iters: usize,
    pub restarts: usize,
    /// Initial damping of the Gauss-Newton step.
    pub step0: f64,
    pub seed: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iters: 5000,
            restarts: 8,
            step0: 0.1,
            seed: 0,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(Error::InvalidOptions(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidOptions("max_iters must be at least 1".into()));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidOptions("restarts must be at least 1".into()));
        }
        if !(self.step0 > 0.0) || !self.step0.is_finite() {
            return Err(Error::InvalidOptions(format!(
                "step0 must be positive, got {}",
                self.step0
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Solved,
    ResidualFloor,
    /// Every iterate had empty interior (the target forces a degenerate polygon).
    Degenerated,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub b: SupportVector,
    /// Sup-norm distance between the recomputed `gamma(U, b)` and the target.
    pub residual: f64,
    pub iterations: usize,
}

/// Edge lengths of `P(U, b)`, the partial derivatives of its area in `b`.
pub fn volume_gradient(u: &NormalSet, b: &SupportVector) -> Result<Vec<f64>> {
    let poly = intersect_halfplanes(u, b)?;
    if poly.degenerate {
        return Err(Error::DegeneratePolygon { area: poly.area });
    }
    Ok(poly.facet_lengths)
}

/// Rejects negative or non-normalized targets.
pub(crate) fn validate_target(gamma: &[f64], m: usize) -> Result<()> {
    match check_normalized(gamma, m) {
        Err(Error::NegativeEntry { index, value }) => Err(Error::InvalidTarget(format!(
            "entry {index} is negative ({value})"
        ))),
        Err(Error::NotNormalized { sum }) => Err(Error::InvalidTarget(format!(
            "entries sum to {sum}, expected 1"
        ))),
        other => other,
    }
}

struct Eval {
    gamma: Vec<f64>,
    area: f64,
    poly: Polygon2D,
}

fn evaluate(u: &NormalSet, b: &[f64]) -> Result<Option<Eval>> {
    let sv = SupportVector::new(b.to_vec())?;
    let poly = intersect_halfplanes(u, &sv)?;
    if poly.degenerate {
        return Ok(None);
    }
    let area = poly.area;
    let gamma = b
        .iter()
        .zip(&poly.facet_lengths)
        .map(|(bi, l)| 0.5 * bi * l / area)
        .collect();
    Ok(Some(Eval { gamma, area, poly }))
}

fn sup_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

struct Outcome {
    b: Vec<f64>,
    residual: f64,
    iterations: usize,
    found_interior: bool,
}

/// One damped Gauss-Newton run from a random start; entries outside `free` stay 0.
fn run_restart(
    u: &NormalSet,
    target: &[f64],
    free: &[usize],
    opts: &SolveOptions,
    restart: usize,
) -> Result<Outcome> {
    let m = u.len();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(restart as u64);
    let mut b = vec![0.0; m];
    for &i in free {
        b[i] = rng.random_range(0.5..=1.5);
    }
    let mut best = Outcome {
        b: b.clone(),
        residual: f64::INFINITY,
        iterations: 0,
        found_interior: false,
    };
    let Some(mut cur) = evaluate(u, &b)? else {
        return Ok(best);
    };
    let mut lambda = opts.step0;

    for it in 0..opts.max_iters {
        let s = cur.area.sqrt();
        b.iter_mut().for_each(|x| *x /= s);
        let scale = b.iter().fold(0.0f64, |a, &x| a.max(x));
        for &i in free {
            if !cur.poly.is_active(i) {
                let h = cur.poly.support(&u.vector(i)) / s;
                if h > 1e-12 * scale {
                    b[i] = h;
                }
            }
        }
        let residual = sup_dist(&cur.gamma, target);
        if residual < best.residual {
            best = Outcome {
                b: b.clone(),
                residual,
                iterations: it,
                found_interior: true,
            };
        }
        if residual <= opts.tol {
            return Ok(best);
        }
        let lo = free.iter().map(|&i| b[i]).fold(f64::INFINITY, f64::min);
        let hi = free.iter().map(|&i| b[i]).fold(0.0, f64::max);
        if hi > RATIO_LIMIT * lo {
            break;
        }

        let n = free.len();
        let t: Vec<f64> = free.iter().map(|&i| b[i].ln()).collect();
        let with_t = |t: &[f64]| {
            let mut bb = b.clone();
            for (k, &i) in free.iter().enumerate() {
                bb[i] = t[k].exp();
            }
            bb
        };
        let mut jac = DMatrix::<f64>::zeros(m, n);
        for k in 0..n {
            let mut tp = t.clone();
            tp[k] += FD_STEP;
            let mut tm = t.clone();
            tm[k] -= FD_STEP;
            let plus = evaluate(u, &with_t(&tp))?;
            let minus = evaluate(u, &with_t(&tm))?;
            let (gp, gm, h) = match (&plus, &minus) {
                (Some(p), Some(q)) => (&p.gamma, &q.gamma, 2.0 * FD_STEP),
                (Some(p), None) => (&p.gamma, &cur.gamma, FD_STEP),
                (None, Some(q)) => (&cur.gamma, &q.gamma, FD_STEP),
                (None, None) => continue,
            };
            for r in 0..m {
                jac[(r, k)] = (gp[r] - gm[r]) / h;
            }
        }
        let r = DVector::from_iterator(m, cur.gamma.iter().zip(target).map(|(g, t)| g - t));
        let jtj = jac.transpose() * &jac;
        let grad = jac.transpose() * &r;
        let cost = sq_dist(&cur.gamma, target);

        let mut accepted = None;
        while accepted.is_none() && lambda < 1e12 {
            let mut a = jtj.clone();
            for k in 0..n {
                a[(k, k)] += lambda * (jtj[(k, k)] + 1e-9);
            }
            let Some(delta) = a.lu().solve(&(-&grad)) else {
                lambda *= 8.0;
                continue;
            };
            let cap = delta.amax();
            let mut step = if cap > MAX_LOG_STEP {
                delta * (MAX_LOG_STEP / cap)
            } else {
                delta
            };
            for _ in 0..8 {
                let tn: Vec<f64> = t.iter().zip(step.iter()).map(|(a, d)| a + d).collect();
                let bn = with_t(&tn);
                if let Some(e) = evaluate(u, &bn)? {
                    if e.area > tol::AREA && sq_dist(&e.gamma, target) < cost {
                        accepted = Some((bn, e));
                        break;
                    }
                }
                step *= 0.5;
            }
            if accepted.is_none() {
                lambda *= 8.0;
            }
        }
        let Some((bn, e)) = accepted else {
            break;
        };
        lambda = (lambda / 3.0).max(1e-12);
        b = bn;
        cur = e;
        best.iterations = best.iterations.max(it + 1);
    }
    Ok(best)
}

fn finish(u: &NormalSet, target: &[f64], b: Vec<f64>, iterations: usize, tol: f64) -> Result<SolveResult> {
    let sv = SupportVector::new(b)?;
    let poly = intersect_halfplanes(u, &sv)?;
    if poly.degenerate {
        return Ok(SolveResult {
            status: SolveStatus::Degenerated,
            b: sv,
            residual: f64::INFINITY,
            iterations,
        });
    }
    let sv = sv.scaled(1.0 / poly.area.sqrt());
    // recompute from scratch: the reported residual never trusts the iteration state
    let cv = cone_volume_vector(u, &sv)?;
    let residual = sup_dist(&cv.gamma, target);
    let unit = (cv.sum() - 1.0).abs() <= tol::SUM;
    let status = if !cv.degenerate && unit && residual <= tol {
        SolveStatus::Solved
    } else {
        SolveStatus::ResidualFloor
    };
    Ok(SolveResult {
        status,
        b: sv,
        residual,
        iterations,
    })
}

fn solve_clamped(u: &NormalSet, target: &[f64], free: &[usize], opts: &SolveOptions) -> Result<SolveResult> {
    let outcomes: Vec<Outcome> = (0..opts.restarts)
        .into_par_iter()
        .map(|r| run_restart(u, target, free, opts, r))
        .collect::<Result<_>>()?;
    if outcomes.iter().all(|o| !o.found_interior) {
        return Ok(SolveResult {
            status: SolveStatus::Degenerated,
            b: SupportVector::new(outcomes[0].b.clone())?,
            residual: f64::INFINITY,
            iterations: 0,
        });
    }
    let chosen = outcomes
        .iter()
        .position(|o| o.residual <= opts.tol)
        .unwrap_or_else(|| {
            // first minimum wins ties
            (0..outcomes.len()).fold(0, |best, k| {
                if outcomes[k].residual < outcomes[best].residual {
                    k
                } else {
                    best
                }
            })
        });
    let o = &outcomes[chosen];
    finish(u, target, o.b.clone(), o.iterations, opts.tol)
}

/// Searches for a unit-area `P(U, b)` with cone-volume vector `gamma` (canonical order).
pub fn solve(u: &NormalSet, gamma: &[f64], opts: &SolveOptions) -> Result<SolveResult> {
    opts.validate()?;
    validate_target(gamma, u.len())?;
    let m = u.len();
    let positive: Vec<usize> = (0..m).filter(|&i| gamma[i] > 0.0).collect();
    if positive.len() == m {
        return solve_clamped(u, gamma, &positive, opts);
    }

    let mut dropped = None;
    let kept: Vec<_> = positive.iter().map(|&i| u.vector(i)).collect();
    if positive.len() >= 3 && positively_spans(&kept) {
        let sub = u.subset(&positive)?;
        // sub is re-sorted; its order maps back into canonical indices of u
        let sub_gamma: Vec<f64> = sub.order().iter().map(|&i| gamma[i]).collect();
        let r = solve_clamped(&sub, &sub_gamma, &(0..sub.len()).collect::<Vec<_>>(), opts)?;
        if r.status != SolveStatus::Degenerated {
            let poly = intersect_halfplanes(&sub, &r.b)?;
            let mut b = vec![0.0; m];
            for (k, &i) in sub.order().iter().enumerate() {
                b[i] = r.b.as_slice()[k];
            }
            for i in (0..m).filter(|i| !positive.contains(i)) {
                b[i] = poly.support(&u.vector(i)).max(0.0);
            }
            let full = finish(u, gamma, b, r.iterations, opts.tol)?;
            if full.status == SolveStatus::Solved {
                return Ok(full);
            }
            dropped = Some(full);
        }
    }
    let clamped = solve_clamped(u, gamma, &positive, opts)?;
    Ok(match dropped {
        Some(d) if clamped.status != SolveStatus::Solved && d.residual < clamped.residual => d,
        _ => clamped,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    NoOutsideHull,
    NoExactOracle,
    YesExactOracle,
    YesGeneralPosition,
    YesRelintPscc,
    YesStancuInequality,
    YesSolved,
    Unknown,
}

impl Verdict {
    /// `Some(true)` for a proven member, `Some(false)` for a proven non-member.
    pub fn decided(self) -> Option<bool> {
        match self {
            Verdict::NoOutsideHull | Verdict::NoExactOracle => Some(false),
            Verdict::Unknown => None,
            _ => Some(true),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MembershipVerdict {
    pub verdict: Verdict,
    pub witness: Option<SupportVector>,
    pub citation: String,
    pub residual: Option<f64>,
}

impl MembershipVerdict {
    fn rule(verdict: Verdict, citation: &str) -> Self {
        Self {
            verdict,
            witness: None,
            citation: citation.into(),
            residual: None,
        }
    }
}

/// The exact four-normal decision, when it applies (four normals with an antipodal pair).
pub fn exact_verdict(u: &NormalSet, gamma: &[f64], closure: bool) -> Result<Option<MembershipVerdict>> {
    if u.len() != 4 || quad_canonicalize(u).is_err() {
        return Ok(None);
    }
    validate_target(gamma, 4)?;
    let yes = quad_membership(u, gamma, closure)?;
    let citation = if quad_canonicalize(u)?.is_parallelogram {
        "parallelogram: each antipodal pair carries half the mass"
    } else if closure {
        "trapezoid characterization, weak inequalities (closure)"
    } else {
        "trapezoid characterization"
    };
    Ok(Some(MembershipVerdict::rule(
        if yes {
            Verdict::YesExactOracle
        } else {
            Verdict::NoExactOracle
        },
        citation,
    )))
}

/// Decides whether `gamma` (canonical order) is a cone-volume vector of a unit-area `P(U, b)`.
///
/// Rules are tried in order: the necessary hull test, the exact four-normal
/// oracle, general position with positive entries, the relative interior of
/// `P_scc(U)`, the strict antipodal-pair inequality for `m > 4`, and finally
/// the numerical solver. With `closure` the four-normal oracle decides
/// membership in the closure instead.
pub fn decide_membership(
    u: &NormalSet,
    gamma: &[f64],
    opts: &SolveOptions,
    closure: bool,
) -> Result<MembershipVerdict> {
    let m = u.len();
    validate_target(gamma, m)?;
    let cls = classify(u)?;
    if !ku_halfspaces(u, &cls).contains(gamma, HULL_EPS) {
        return Ok(MembershipVerdict::rule(
            Verdict::NoOutsideHull,
            "violates a necessary inequality of K_U",
        ));
    }
    if let Some(v) = exact_verdict(u, gamma, closure)? {
        return Ok(v);
    }
    let positive = gamma.iter().all(|&g| g > 0.0);
    if positive && is_general_position(u) {
        return Ok(MembershipVerdict::rule(
            Verdict::YesGeneralPosition,
            "general position: every positive normalized vector is attained",
        ));
    }
    let pscc = pscc_halfspaces(u);
    if positive && pscc.halfspaces.iter().all(|h| h.slack(gamma) > STRICT) {
        return Ok(MembershipVerdict::rule(
            Verdict::YesRelintPscc,
            "relative interior of P_scc(U)",
        ));
    }
    let pairs: Vec<(usize, usize)> = (0..m)
        .filter_map(|i| u.antipode(i).filter(|&j| j > i).map(|j| (i, j)))
        .collect();
    if m > 4 && positive && !pairs.is_empty() && pairs.iter().all(|&(j, k)| gamma[j] + gamma[k] < 0.5 - STRICT) {
        return Ok(MembershipVerdict::rule(
            Verdict::YesStancuInequality,
            "strict antipodal-pair inequality for more than four normals",
        ));
    }
    let r = solve(u, gamma, opts)?;
    Ok(if r.status == SolveStatus::Solved {
        MembershipVerdict {
            verdict: Verdict::YesSolved,
            witness: Some(r.b),
            citation: "numerical witness".into(),
            residual: Some(r.residual),
        }
    } else {
        MembershipVerdict {
            verdict: Verdict::Unknown,
            witness: None,
            citation: "no rule applies and the solver found no witness".into(),
            residual: Some(r.residual),
        }
    })
}
