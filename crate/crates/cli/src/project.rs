//! Kernel sources for `project`: builtin closed forms and sampled grids.

use spherekern::gegenbauer::{Degree, SphereDim};
use spherekern::kernel::generating_function;

use crate::config::SampleGrid;
use crate::failure::Failure;

/// Closed-form kernels available without a samples file.
#[derive(Debug, Clone, Copy)]
pub enum Builtin {
    /// `c * G_m(r, t) * G_M(q, s)`; `r`, `q` may be negative.
    Geometric { c: f64, r: f64, q: f64 },
    Constant { c: f64 },
}

impl Builtin {
    pub fn validate(&self) -> Result<(), Failure> {
        match *self {
            Builtin::Geometric { c, r, q } => {
                for (name, v) in [("r", r), ("q", q)] {
                    if v.is_nan() || v.abs() >= 1.0 {
                        return Err(Failure::parse(format!("--{name} must satisfy |{name}| < 1, found {v}")));
                    }
                }
                if !c.is_finite() {
                    return Err(Failure::parse(format!("--c must be finite, found {c}")));
                }
            }
            Builtin::Constant { c } if !c.is_finite() => {
                return Err(Failure::parse(format!("--c must be finite, found {c}")));
            }
            Builtin::Constant { .. } => {}
        }
        Ok(())
    }

    pub fn eval(&self, m: SphereDim, big_m: SphereDim, t: f64, s: f64) -> f64 {
        match *self {
            Builtin::Geometric { c, r, q } => {
                c * generating_function(m, r, t) * generating_function(big_m, q, s)
            }
            Builtin::Constant { c } => c,
        }
    }
}

/// Sample grid with local bicubic Lagrange interpolation.
///
/// Interpolation error is `O(h^4)` in the grid spacing `h` for smooth kernels.
#[derive(Debug)]
pub struct Interpolant {
    grid: SampleGrid,
}

const COVER_TOL: f64 = 1e-12;

fn check_axis(name: &str, axis: &[f64], needed: usize) -> Result<(), Failure> {
    if axis.len() < needed {
        return Err(Failure::parse(format!(
            "insufficient sampling: `{name}` has {} values, at least {needed} needed",
            axis.len()
        )));
    }
    if axis.iter().any(|v| !v.is_finite()) || axis.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Failure::parse(format!("field `{name}` must be finite and strictly increasing")));
    }
    if axis[0] > -1.0 + COVER_TOL || axis[axis.len() - 1] < 1.0 - COVER_TOL {
        return Err(Failure::parse(format!(
            "insufficient sampling: `{name}` must cover [-1, 1], covers [{}, {}]",
            axis[0],
            axis[axis.len() - 1]
        )));
    }
    Ok(())
}

/// Indices of the four grid nodes nearest to `x` (a clamped stencil).
fn stencil(axis: &[f64], x: f64) -> [usize; 4] {
    let i = axis.partition_point(|v| *v <= x).clamp(1, axis.len() - 1) - 1;
    let start = i.saturating_sub(1).min(axis.len() - 4);
    [start, start + 1, start + 2, start + 3]
}

fn lagrange_weights(axis: &[f64], nodes: [usize; 4], x: f64) -> [f64; 4] {
    let mut w = [1.0; 4];
    for (a, &i) in nodes.iter().enumerate() {
        for &j in &nodes {
            if i != j {
                w[a] *= (x - axis[j]) / (axis[i] - axis[j]);
            }
        }
    }
    w
}

impl Interpolant {
    /// Requires at least `2 (kmax + lmax + 8)` values per axis covering `[-1, 1]`.
    pub fn new(grid: SampleGrid, kmax: Degree, lmax: Degree) -> Result<Self, Failure> {
        let needed = 2 * (kmax + lmax + 8);
        check_axis("t", &grid.t, needed)?;
        check_axis("s", &grid.s, needed)?;
        if grid.values.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Failure::parse("field `values` contains a non-finite entry"));
        }
        Ok(Interpolant { grid })
    }

    pub fn eval(&self, t: f64, s: f64) -> f64 {
        let g = &self.grid;
        let it = stencil(&g.t, t);
        let is = stencil(&g.s, s);
        let wt = lagrange_weights(&g.t, it, t);
        let ws = lagrange_weights(&g.s, is, s);
        let mut total = 0.0;
        for (a, &i) in it.iter().enumerate() {
            for (b, &j) in is.iter().enumerate() {
                total += wt[a] * ws[b] * g.values[i][j];
            }
        }
        total
    }
}
