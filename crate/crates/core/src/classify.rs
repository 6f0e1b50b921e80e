//! Strict positive definiteness levels from the structure of `J_K`, and the
//! coefficient walk from `S^infinity` down to a finite sphere.

use std::collections::HashMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gegenbauer::{monomial_decomposition, Degree, ExpansionCoefficients, SphereDim};
use crate::kernel::{CoefficientScheme, PerQuadrant, SchemeBody};

/// Tail allowed when truncating the sum in [`dimension_walk`].
pub const WALK_TOLERANCE: f64 = 1e-12;

/// Ordered from weakest to strongest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Level {
    #[serde(rename = "PD_ONLY")]
    PdOnly,
    #[serde(rename = "DC_SPD_ONLY")]
    DcSpdOnly,
    #[serde(rename = "SPD")]
    Spd,
}

impl Level {
    pub fn as_str(self) -> &'static str {
        match self {
            Level::PdOnly => "PD_ONLY",
            Level::DcSpdOnly => "DC_SPD_ONLY",
            Level::Spd => "SPD",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reasons {
    pub even_sum_infinite: bool,
    pub odd_sum_infinite: bool,
    pub joint_unbounded: PerQuadrant<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub level: Level,
    pub reasons: Reasons,
    /// Set for sparse schemes, whose finite support rules out both strict levels.
    pub finite_support_caveat: bool,
}

/// Classifies `s`:
/// - `SPD` iff every parity quadrant of `J_K` has a sequence with both indices unbounded;
/// - `DC_SPD_ONLY` iff otherwise both `{k + l even}` and `{k + l odd}` parts are infinite;
/// - `PD_ONLY` otherwise.
pub fn classify(s: &CoefficientScheme) -> Result<Verdict> {
    let iq = s.index_quadrants()?;
    let joint = iq.joint_unbounded();
    let spd = joint.iter().all(|(_, &b)| b);
    let dc = iq.even_sum_infinite && iq.odd_sum_infinite;
    debug_assert!(!spd || dc);
    let level = if spd {
        Level::Spd
    } else if dc {
        Level::DcSpdOnly
    } else {
        Level::PdOnly
    };
    Ok(Verdict {
        level,
        reasons: Reasons {
            even_sum_infinite: iq.even_sum_infinite,
            odd_sum_infinite: iq.odd_sum_infinite,
            joint_unbounded: joint,
        },
        finite_support_caveat: s.is_sparse(),
    })
}

/// Coefficients `c_{k,l} = sum_n c(k + 2n, m, n) a_{k+2n,l}` of a kernel on
/// `S^infinity x S^M` re-expanded in `P_k^m(t) P_l^M(s)`, for `k <= kmax`, `l <= lmax`.
///
/// `c(K, m, j)` is the coefficient of `P_{K-2j}^m` in `t^K`.
pub fn dimension_walk(
    s: &CoefficientScheme,
    target_m: SphereDim,
    kmax: Degree,
    lmax: Degree,
) -> Result<DMatrix<f64>> {
    if s.m().is_finite() {
        return Err(Error::PreconditionFailed(format!(
            "dimension walk starts from S^inf, scheme has m = {}",
            s.m()
        )));
    }
    target_m.require_finite()?;
    let mut cache: HashMap<Degree, ExpansionCoefficients> = HashMap::new();
    let mut walk = |big_k: Degree| -> Result<ExpansionCoefficients> {
        if let Some(e) = cache.get(&big_k) {
            return Ok(e.clone());
        }
        let e = monomial_decomposition(big_k, target_m)?;
        cache.insert(big_k, e.clone());
        Ok(e)
    };
    let mut out = DMatrix::<f64>::zeros(kmax + 1, lmax + 1);
    match s.body() {
        SchemeBody::Sparse(terms) => {
            for term in terms.iter().filter(|t| t.l <= lmax) {
                for (k, c) in walk(term.k)?.entries {
                    if k <= kmax {
                        out[(k, term.l)] += c * term.a;
                    }
                }
            }
        }
        SchemeBody::Parameterized(p) => {
            // c(K, m, j) <= 1 and P^M_l(1) >= 1, so the rows K >= cutoff are
            // covered by the family's tail bound.
            let (cutoff, _) = p
                .family
                .truncation(s.m(), s.big_m(), WALK_TOLERANCE)
                .ok_or_else(|| Error::MissingTailBound(p.family.id().to_string()))?;
            for big_k in 0..cutoff.max(kmax + 1) {
                let expansion = walk(big_k)?;
                for l in 0..=lmax {
                    let a = s.coefficient(big_k, l);
                    if a == 0.0 {
                        continue;
                    }
                    for &(k, c) in &expansion.entries {
                        if k <= kmax {
                            out[(k, l)] += c * a;
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}
