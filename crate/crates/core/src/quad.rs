//! Exact membership in the cone-volume set for four normals with an antipodal pair.
//!
//! A trapezoid frame `(u1, u2, u3, u4)` is counterclockwise with `u1 = -u3`,
//! where `u3` is the pair member isolated by an open hemisphere. A vector
//! `gamma` (in that frame) is a cone-volume vector iff
//!
//! - `g1 + g3 < g2 + g4`, or
//! - `g1 + g3 >= g2 + g4 >= 2 sqrt(g1 g3)` and `g1 < g3`.
//!
//! The characterization is exact for `gamma >= 0` including zero entries:
//! these come from `b_i = 0` (facet through the origin), not from dropping
//! the normal. Parallelograms are exactly `P_scc(U)`: each antipodal pair
//! carries half the mass.

use serde::{Deserialize, Serialize};

use crate::classification::classify;
use crate::error::{check_vector, Error, Result};
use crate::geometry::NormalSet;
use crate::tol;

/// Slack used on the weak inequalities of the closure.
pub const CLOSURE_TOL: f64 = 1e-9;

/// Relabeling of a four-normal set into the standard trapezoid frame.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadLabeling {
    /// Canonical indices of `(u1, u2, u3, u4)`.
    pub frame: [usize; 4],
    /// Antipodal pairs `(i, j)`, `i < j`, canonical indices.
    pub pairs: Vec<(usize, usize)>,
    pub is_parallelogram: bool,
}

impl QuadLabeling {
    /// Index playing the `u3` role (the hemisphere-isolated member).
    pub fn isolated(&self) -> usize {
        self.frame[2]
    }

    /// `gamma` (canonical order) read in the frame.
    pub fn in_frame(&self, gamma: &[f64]) -> [f64; 4] {
        self.frame.map(|k| gamma[k])
    }
}

pub fn quad_canonicalize(u: &NormalSet) -> Result<QuadLabeling> {
    if u.len() != 4 {
        return Err(Error::NotQuadrilateral { count: u.len() });
    }
    let pairs: Vec<(usize, usize)> = (0..4)
        .filter_map(|i| u.antipode(i).filter(|&j| j > i).map(|j| (i, j)))
        .collect();
    if pairs.is_empty() {
        return Err(Error::NoAntipodalPair);
    }
    let cyclic = |s: usize| [s, (s + 1) % 4, (s + 2) % 4, (s + 3) % 4];
    if pairs.len() == 2 {
        return Ok(QuadLabeling {
            frame: cyclic(0),
            pairs,
            is_parallelogram: true,
        });
    }
    let cls = classify(u)?;
    let [s] = cls.square[..] else {
        return Err(Error::InternalInvariantViolation(format!(
            "trapezoid normal set has |U_square| = {}",
            cls.square.len()
        )));
    };
    let frame = cyclic(s);
    if u.antipode(s) != Some(frame[2]) {
        return Err(Error::InternalInvariantViolation(
            "antipode of the trapezoid's square normal is not opposite in cyclic order".into(),
        ));
    }
    Ok(QuadLabeling {
        frame,
        pairs,
        is_parallelogram: false,
    })
}

/// Checks `gamma >= 0`, finite, length 4 and `sum = 1`.
pub(crate) fn check_normalized(gamma: &[f64], m: usize) -> Result<()> {
    check_vector(gamma, m)?;
    if let Some(index) = gamma.iter().position(|&g| g < 0.0) {
        return Err(Error::NegativeEntry {
            index,
            value: gamma[index],
        });
    }
    let sum: f64 = gamma.iter().sum();
    if (sum - 1.0).abs() > tol::SUM {
        return Err(Error::NotNormalized { sum });
    }
    Ok(())
}

/// Trapezoid test on `gamma` given in canonical order.
///
/// With `closure` the weak inequalities (membership in the closure) are used.
pub fn trapezoid_membership(labeling: &QuadLabeling, gamma: &[f64], closure: bool) -> Result<bool> {
    if labeling.is_parallelogram {
        return Err(Error::NotTrapezoid);
    }
    check_normalized(gamma, 4)?;
    let [g1, g2, g3, g4] = labeling.in_frame(gamma);
    let (pair, legs) = (g1 + g3, g2 + g4);
    let mean = 2.0 * (g1 * g3).sqrt();
    Ok(if closure {
        pair <= legs + CLOSURE_TOL || (legs >= mean - CLOSURE_TOL && g1 <= g3 + CLOSURE_TOL)
    } else {
        // the root guards rounding of sqrt on exact-boundary inputs only
        pair < legs || (legs >= mean - 1e-12 && g1 < g3)
    })
}

pub fn parallelogram_membership(labeling: &QuadLabeling, gamma: &[f64]) -> Result<bool> {
    if !labeling.is_parallelogram {
        return Err(Error::NotParallelogram);
    }
    check_normalized(gamma, 4)?;
    let (i, j) = labeling.pairs[0];
    Ok((gamma[i] + gamma[j] - 0.5).abs() <= tol::SUM)
}

/// Dispatches to the trapezoid or parallelogram test.
pub fn quad_membership(u: &NormalSet, gamma: &[f64], closure: bool) -> Result<bool> {
    let labeling = quad_canonicalize(u)?;
    if labeling.is_parallelogram {
        parallelogram_membership(&labeling, gamma)
    } else {
        trapezoid_membership(&labeling, gamma, closure)
    }
}
