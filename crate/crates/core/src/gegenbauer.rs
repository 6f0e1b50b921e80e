//! Gegenbauer polynomials `P_k^m = C_k^{(m-1)/2}` and the machinery built on them.
//!
//! Conventions:
//! - `m` is the dimension of the sphere `S^m` in `R^{m+1}`; the polynomial
//!   parameter is `lambda = (m - 1) / 2`, so `m = 2` gives Legendre polynomials
//!   and `m = 3` Chebyshev polynomials of the second kind.
//! - The normalization is the standard ultraspherical one, `C_1^lambda(t) = 2 lambda t`.
//! - On `S^infinity` the polynomial `P_k` is replaced by the monomial `t^k`.
//!
//! Expansion coefficients (Chebyshev, monomial and linearization) are obtained
//! by projection with Gauss quadrature, using `ceil(sum of degrees / 2) + 4` nodes.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Polynomial degree.
pub type Degree = usize;

/// Arguments within this distance outside `[-1, 1]` are clamped.
pub const CLAMP_TOLERANCE: f64 = 1e-12;

const NEWTON_TOLERANCE: f64 = 1e-14;
const NEWTON_MAX_ITERATIONS: usize = 100;
const PROJECTION_HEADROOM: usize = 4;

/// Dimension `m >= 2` of a sphere `S^m`, or the Hilbert sphere `S^infinity`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct SphereDim(Option<u32>);

impl SphereDim {
    pub const INFINITY: SphereDim = SphereDim(None);

    /// Finite dimension. Circles and below are rejected.
    pub fn finite(m: i64) -> Result<Self> {
        if m < 2 || m > u32::MAX as i64 {
            return Err(Error::UnsupportedDimension(m));
        }
        Ok(SphereDim(Some(m as u32)))
    }

    pub fn get(self) -> Option<u32> {
        self.0
    }

    pub fn is_finite(self) -> bool {
        self.0.is_some()
    }

    pub fn require_finite(self) -> Result<u32> {
        self.0.ok_or(Error::RequiresFiniteDimension)
    }

    /// Ultraspherical parameter `(m - 1) / 2`.
    pub fn lambda(self) -> Result<f64> {
        Ok((self.require_finite()? as f64 - 1.0) / 2.0)
    }

    /// Ambient dimension `m + 1` of the unit vectors, finite only.
    pub fn ambient(self) -> Result<usize> {
        Ok(self.require_finite()? as usize + 1)
    }

    /// `m ∧ M`.
    pub fn meet(self, other: SphereDim) -> SphereDim {
        self.min(other)
    }
}

impl Ord for SphereDim {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.0, other.0) {
            (Some(a), Some(b)) => a.cmp(&b),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => Ordering::Equal,
        }
    }
}

impl PartialOrd for SphereDim {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for SphereDim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for SphereDim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Some(m) => write!(f, "{m}"),
            None => write!(f, "inf"),
        }
    }
}

impl Serialize for SphereDim {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0 {
            Some(m) => serializer.serialize_u32(m),
            None => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for SphereDim {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Int(m) => SphereDim::finite(m).map_err(serde::de::Error::custom),
            Raw::Text(s) if s == "inf" || s == "infinity" => Ok(SphereDim::INFINITY),
            Raw::Text(s) => Err(serde::de::Error::custom(format!(
                "expected an integer or \"inf\", found \"{s}\""
            ))),
        }
    }
}

/// Clamps `t` into `[-1, 1]`, rejecting values further than [`CLAMP_TOLERANCE`] outside.
pub fn clamp_argument(t: f64) -> Result<f64> {
    if !t.is_finite() || t.abs() > 1.0 + CLAMP_TOLERANCE {
        return Err(Error::Domain { value: t });
    }
    Ok(t.clamp(-1.0, 1.0))
}

/// `P_k^m(t)` by the three-term recurrence.
pub fn eval_gegenbauer(k: Degree, m: SphereDim, t: f64) -> Result<f64> {
    let lambda = m.lambda()?;
    let t = clamp_argument(t)?;
    Ok(recurrence(k, lambda, t))
}

fn recurrence(k: Degree, lambda: f64, t: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 2.0 * lambda * t;
    for n in 1..k {
        let nf = n as f64;
        let next = (2.0 * (nf + lambda) * t * cur - (nf + 2.0 * lambda - 1.0) * prev) / (nf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Writes `P_0(t), ..., P_{out.len()-1}(t)` in the basis of `dim` (monomials on `S^infinity`).
/// `t` must already be clamped.
pub(crate) fn fill_basis(dim: SphereDim, t: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    match dim.get() {
        None => {
            for k in 1..out.len() {
                out[k] = out[k - 1] * t;
            }
        }
        Some(m) => {
            let lambda = (m as f64 - 1.0) / 2.0;
            if out.len() > 1 {
                out[1] = 2.0 * lambda * t;
            }
            for n in 1..out.len().saturating_sub(1) {
                let nf = n as f64;
                out[n + 1] = (2.0 * (nf + lambda) * t * out[n]
                    - (nf + 2.0 * lambda - 1.0) * out[n - 1])
                    / (nf + 1.0);
            }
        }
    }
}

/// Basis polynomial of degree `k` for `dim`: Gegenbauer when finite, `t^k` on `S^infinity`.
pub fn eval_basis(k: Degree, dim: SphereDim, t: f64) -> Result<f64> {
    match dim.get() {
        Some(_) => eval_gegenbauer(k, dim, t),
        None => eval_monomial(k, t),
    }
}

/// `t^k` (the `S^infinity` basis).
pub fn eval_monomial(k: Degree, t: f64) -> Result<f64> {
    let t = clamp_argument(t)?;
    Ok(powi(t, k))
}

fn powi(t: f64, k: Degree) -> f64 {
    match i32::try_from(k) {
        Ok(k) => t.powi(k),
        Err(_) => t.powf(k as f64),
    }
}

/// `P_k^m(1) = binom(k + m - 2, k)`; equals 1 for every `k` on `S^infinity`.
pub fn value_at_one(k: Degree, m: SphereDim) -> Result<f64> {
    let lambda = m.lambda()?;
    Ok(value_at_one_lambda(k, lambda))
}

pub(crate) fn basis_value_at_one(k: Degree, dim: SphereDim) -> f64 {
    match dim.get() {
        None => 1.0,
        Some(m) => value_at_one_lambda(k, (m as f64 - 1.0) / 2.0),
    }
}

fn value_at_one_lambda(k: Degree, lambda: f64) -> f64 {
    (0..k).fold(1.0, |acc, i| {
        let i = i as f64;
        acc * (2.0 * lambda + i) / (i + 1.0)
    })
}

/// `R_k^m(t) = P_k^m(t) / P_k^m(1)`.
pub fn eval_normalized(k: Degree, m: SphereDim, t: f64) -> Result<f64> {
    Ok(eval_gegenbauer(k, m, t)? / value_at_one(k, m)?)
}

/// Chebyshev polynomial of the first kind, `T_k(cos theta) = cos(k theta)`.
pub fn eval_chebyshev(k: Degree, t: f64) -> Result<f64> {
    let t = clamp_argument(t)?;
    Ok((k as f64 * t.acos()).cos())
}

/// Surface area `2 pi^{d/2} / Gamma(d/2)` of the unit sphere in `R^d`.
pub fn surface_area(d: u32) -> f64 {
    assert!(d >= 1, "surface_area is defined for d >= 1");
    let half = d as f64 / 2.0;
    2.0 * (half * PI.ln() - ln_gamma_half(d)).exp()
}

/// `ln Gamma(d / 2)` for a positive integer `d`.
fn ln_gamma_half(d: u32) -> f64 {
    let (mut acc, mut x) = if d.is_multiple_of(2) { (0.0, 1.0) } else { (0.5 * PI.ln(), 0.5) };
    let target = d as f64 / 2.0;
    while x < target {
        acc += x.ln();
        x += 1.0;
    }
    acc
}

/// `int_{-1}^{1} (1 - t^2)^{(m-2)/2} dt = tau_{m+1} / tau_m`, via `mass(m + 2) = mass(m) m / (m + 1)`.
pub fn weight_mass(m: SphereDim) -> Result<f64> {
    let m = m.require_finite()?;
    let (mut mass, mut cur) = if m % 2 == 0 { (2.0, 2u32) } else { (PI / 2.0, 3u32) };
    while cur < m {
        mass *= cur as f64 / (cur as f64 + 1.0);
        cur += 2;
    }
    Ok(mass)
}

/// Squared norm `int P_n^m(t)^2 (1 - t^2)^{(m-2)/2} dt`:
/// `tau_{m+1}/tau_m * (m-1)/(2n+m-1) * P_n^m(1)`.
pub fn orthogonality_constant(n: Degree, m: SphereDim) -> Result<f64> {
    let mf = m.require_finite()? as f64;
    Ok(weight_mass(m)? * (mf - 1.0) / (2.0 * n as f64 + mf - 1.0) * value_at_one(n, m)?)
}

/// Quadrature value of `int P_n P_k w` next to the closed-form right-hand side.
pub fn orthogonality_check(n: Degree, k: Degree, m: SphereDim) -> Result<(f64, f64)> {
    let lambda = m.lambda()?;
    let rule = quadrature_rule(m, (n + k).div_ceil(2) + PROJECTION_HEADROOM)?;
    let lhs = rule.integrate(|t| recurrence(n, lambda, t) * recurrence(k, lambda, t));
    let rhs = if n == k { orthogonality_constant(n, m)? } else { 0.0 };
    Ok((lhs, rhs))
}

/// Gauss rule for the weight `(1 - t^2)^{(m-2)/2}` on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.pairs().map(|(t, w)| w * f(t)).sum()
    }
}

/// Recurrence coefficient `beta_j` of the monic Gegenbauer polynomials.
fn monic_beta(j: usize, lambda: f64) -> f64 {
    let j = j as f64;
    j * (j + 2.0 * lambda - 1.0) / (4.0 * (j + lambda) * (j + lambda - 1.0))
}

/// Orthonormal polynomial `p_n` and its derivative at `t`.
fn orthonormal_with_derivative(n: usize, offdiag: &[f64], p0: f64, t: f64) -> (f64, f64) {
    let (mut p_prev, mut p) = (0.0, p0);
    let (mut d_prev, mut d) = (0.0, 0.0);
    for j in 0..n {
        let b_next = offdiag[j];
        let b_cur = if j == 0 { 0.0 } else { offdiag[j - 1] };
        let p_next = (t * p - b_cur * p_prev) / b_next;
        let d_next = (p + t * d - b_cur * d_prev) / b_next;
        p_prev = p;
        p = p_next;
        d_prev = d;
        d = d_next;
    }
    (p, d)
}

/// Gauss-Gegenbauer rule with `nodes` points, exact through degree `2 nodes - 1`.
///
/// Nodes start from the eigenvalues of the Jacobi matrix and are polished by
/// Newton iteration on the orthonormal recurrence polynomial.
pub fn quadrature_rule(m: SphereDim, nodes: usize) -> Result<QuadratureRule> {
    let lambda = m.lambda()?;
    if nodes == 0 {
        return Err(Error::PreconditionFailed(
            "a quadrature rule needs at least one node".into(),
        ));
    }
    let n = nodes;
    // offdiag[j - 1] = sqrt(beta_j), j = 1..=n
    let offdiag: Vec<f64> = (1..=n).map(|j| monic_beta(j, lambda).sqrt()).collect();

    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for j in 0..n - 1 {
        jacobi[(j, j + 1)] = offdiag[j];
        jacobi[(j + 1, j)] = offdiag[j];
    }
    let mut x: Vec<f64> = jacobi.symmetric_eigenvalues().iter().copied().collect();
    x.sort_by(|a, b| a.total_cmp(b));

    let mass = weight_mass(m)?;
    let p0 = 1.0 / mass.sqrt();
    for xi in x.iter_mut() {
        let mut converged = false;
        for _ in 0..NEWTON_MAX_ITERATIONS {
            let (p, dp) = orthonormal_with_derivative(n, &offdiag, p0, *xi);
            let step = p / dp;
            if !step.is_finite() {
                break;
            }
            *xi -= step;
            if step.abs() <= NEWTON_TOLERANCE {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::QuadratureNoConvergence { nodes });
        }
    }
    // symmetric weight: enforce x_{n-1-i} = -x_i
    for i in 0..n / 2 {
        let half = 0.5 * (x[n - 1 - i] - x[i]);
        x[i] = -half;
        x[n - 1 - i] = half;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }

    let weights = x
        .iter()
        .map(|&t| {
            let (mut p_prev, mut p) = (0.0, p0);
            let mut sum = p * p;
            for j in 0..n - 1 {
                let b_cur = if j == 0 { 0.0 } else { offdiag[j - 1] };
                let p_next = (t * p - b_cur * p_prev) / offdiag[j];
                p_prev = p;
                p = p_next;
                sum += p * p;
            }
            1.0 / sum
        })
        .collect();
    Ok(QuadratureRule { nodes: x, weights })
}

/// Polynomial family an [`ExpansionCoefficients`] refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    /// Chebyshev polynomials of the first kind.
    Chebyshev,
    /// `P_n^m` for the given dimension.
    Gegenbauer(SphereDim),
}

/// Sparse list of `(degree, coefficient)` pairs in a fixed basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionCoefficients {
    pub basis: Basis,
    pub entries: Vec<(Degree, f64)>,
}

impl ExpansionCoefficients {
    pub fn new(basis: Basis, entries: Vec<(Degree, f64)>) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for &(d, v) in &entries {
            if !v.is_finite() {
                return Err(Error::InvalidScheme(format!("non-finite coefficient at degree {d}")));
            }
            if !seen.insert(d) {
                return Err(Error::InvalidScheme(format!("duplicate degree {d}")));
            }
        }
        Ok(Self { basis, entries })
    }

    /// Coefficient of `degree`, zero when absent.
    pub fn coefficient(&self, degree: Degree) -> f64 {
        self.entries
            .iter()
            .find(|(d, _)| *d == degree)
            .map_or(0.0, |(_, v)| *v)
    }

    pub fn max_degree(&self) -> Option<Degree> {
        self.entries.iter().map(|(d, _)| *d).max()
    }

    /// Sum of the expansion at `t`.
    pub fn evaluate(&self, t: f64) -> Result<f64> {
        let t = clamp_argument(t)?;
        let Some(top) = self.max_degree() else {
            return Ok(0.0);
        };
        match self.basis {
            Basis::Chebyshev => {
                let theta = t.acos();
                Ok(self
                    .entries
                    .iter()
                    .map(|&(d, v)| v * (d as f64 * theta).cos())
                    .sum())
            }
            Basis::Gegenbauer(dim) => {
                let mut values = vec![0.0; top + 1];
                fill_basis(dim, t, &mut values);
                Ok(self.entries.iter().map(|&(d, v)| v * values[d]).sum())
            }
        }
    }
}

/// Projects `f` onto `P_d^m` for each requested degree, integrating with `nodes` points.
fn project_gegenbauer<F: Fn(f64) -> f64>(
    f: F,
    m: SphereDim,
    degrees: &[Degree],
    nodes: usize,
) -> Result<Vec<(Degree, f64)>> {
    let Some(&top) = degrees.iter().max() else {
        return Ok(Vec::new());
    };
    let rule = quadrature_rule(m, nodes)?;
    let mut sums = vec![0.0; degrees.len()];
    let mut values = vec![0.0; top + 1];
    for (t, w) in rule.pairs() {
        fill_basis(m, t, &mut values);
        let ft = w * f(t);
        for (sum, &d) in sums.iter_mut().zip(degrees) {
            *sum += ft * values[d];
        }
    }
    degrees
        .iter()
        .zip(sums)
        .map(|(&d, s)| Ok((d, s / orthogonality_constant(d, m)?)))
        .collect()
}

/// Degrees `k, k-2, ..., k mod 2`.
fn same_parity_degrees(k: Degree) -> Vec<Degree> {
    (0..=k / 2).map(|j| k - 2 * j).collect()
}

/// Coefficients `c_k^m(j)` with `P_k^m = sum_j c_k^m(j) T_{k-2j}`.
pub fn chebyshev_expansion(k: Degree, m: SphereDim) -> Result<ExpansionCoefficients> {
    let lambda = m.lambda()?;
    let nodes = k + PROJECTION_HEADROOM;
    let thetas: Vec<f64> = (0..nodes)
        .map(|i| (2 * i + 1) as f64 * PI / (2 * nodes) as f64)
        .collect();
    let values: Vec<f64> = thetas.iter().map(|th| recurrence(k, lambda, th.cos())).collect();
    let entries = same_parity_degrees(k)
        .into_iter()
        .map(|d| {
            let sum: f64 = thetas
                .iter()
                .zip(&values)
                .map(|(th, p)| p * (d as f64 * th).cos())
                .sum();
            let scale = if d == 0 { 1.0 } else { 2.0 };
            (d, scale * sum / nodes as f64)
        })
        .collect();
    ExpansionCoefficients::new(Basis::Chebyshev, entries)
}

/// Coefficients `c(k, m, j)` with `t^k = sum_j c(k, m, j) P_{k-2j}^m(t)`.
pub fn monomial_decomposition(k: Degree, m: SphereDim) -> Result<ExpansionCoefficients> {
    m.require_finite()?;
    let entries = project_gegenbauer(
        |t| powi(t, k),
        m,
        &same_parity_degrees(k),
        k + PROJECTION_HEADROOM,
    )?;
    ExpansionCoefficients::new(Basis::Gegenbauer(m), entries)
}

/// Coefficients `alpha_j` with `P_k^m P_l^M = sum_j alpha_j P_{k+l-2j}^{m ∧ M}`.
pub fn linearization(
    k: Degree,
    l: Degree,
    m: SphereDim,
    big_m: SphereDim,
) -> Result<ExpansionCoefficients> {
    let lambda_x = m.lambda()?;
    let lambda_w = big_m.lambda()?;
    let target = m.meet(big_m);
    let entries = project_gegenbauer(
        |t| recurrence(k, lambda_x, t) * recurrence(l, lambda_w, t),
        target,
        &same_parity_degrees(k + l),
        k + l + PROJECTION_HEADROOM,
    )?;
    ExpansionCoefficients::new(Basis::Gegenbauer(target), entries)
}
