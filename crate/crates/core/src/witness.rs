//! Gram matrices, quadratic forms, residual systems and constructive witnesses
//! (nonzero `c` with `c^T A c = 0`) for kernels that are not strictly positive definite.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gegenbauer::{basis_value_at_one, fill_basis, Degree, SphereDim};
use crate::geometry::{
    circle_embed_points, dot, random_point_set, random_unit, AntipodalFreeDecomposition,
    ProductPoint, ProductPointSet, QuadrantVector,
};
use crate::kernel::{CoefficientScheme, KernelEvaluator, PerQuadrant, Quadrant, QuadrantInfo};

/// Null vectors are reported when `lambda_min <= EIGEN_FACTOR * n * max_diag`.
pub const EIGEN_FACTOR: f64 = 1e-9;

/// A doubling candidate is accepted when `|c^T A c| <= WITNESS_FACTOR * trace(A)`.
pub const WITNESS_FACTOR: f64 = 1e-10;

/// Random residual sample sites, in addition to the data points.
pub const DEFAULT_RESIDUAL_SAMPLES: usize = 64;

/// Largest half-size tried by [`antipodal_doubling_witness`].
pub const MAX_DOUBLING_HALF: usize = 512;

#[derive(Debug, Clone, PartialEq)]
pub struct GramReport {
    pub matrix: DMatrix<f64>,
    pub min_eigenvalue: f64,
    /// Unit eigenvector of `min_eigenvalue` when it is below `threshold`.
    pub null_vector: Option<DVector<f64>>,
    pub threshold: f64,
}

impl GramReport {
    pub fn from_matrix(matrix: DMatrix<f64>) -> Result<Self> {
        let n = matrix.nrows();
        if n == 0 {
            return Err(Error::InvalidPoints("empty point set".into()));
        }
        let eig = SymmetricEigen::new(matrix.clone());
        let (idx, &min_eigenvalue) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("nonempty spectrum");
        let max_diag = matrix.diagonal().max();
        let threshold = EIGEN_FACTOR * n as f64 * max_diag;
        let null_vector = (min_eigenvalue <= threshold).then(|| {
            let mut v = eig.eigenvectors.column(idx).into_owned();
            // fix the sign so the largest entry is positive
            let pivot = v.iter().copied().fold(0.0f64, |a, b| if b.abs() > a.abs() { b } else { a });
            if pivot < 0.0 {
                v.neg_mut();
            }
            v
        });
        Ok(GramReport {
            matrix,
            min_eigenvalue,
            null_vector,
            threshold,
        })
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }
}

fn check_dims(s: &CoefficientScheme, pts: &ProductPointSet) -> Result<()> {
    for (want, got) in [(s.m(), pts.m()), (s.big_m(), pts.big_m())] {
        if want != got {
            return Err(Error::DimensionMismatch {
                expected: format!("S^{} x S^{}", s.m(), s.big_m()),
                found: format!("points on S^{} x S^{}", pts.m(), pts.big_m()),
            });
        }
    }
    Ok(())
}

/// `A_{mu nu} = K_r(x_mu . x_nu, w_mu . w_nu)`, rows in parallel.
pub fn gram_matrix(ev: &KernelEvaluator, pts: &ProductPointSet) -> Result<DMatrix<f64>> {
    let p = pts.points();
    let n = p.len();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i..n)
                .map(|j| ev.eval(dot(&p[i].x, &p[j].x), dot(&p[i].w, &p[j].w)))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let mut a = DMatrix::<f64>::zeros(n, n);
    for (i, row) in rows.into_iter().enumerate() {
        for (off, v) in row.into_iter().enumerate() {
            a[(i, i + off)] = v;
            a[(i + off, i)] = v;
        }
    }
    Ok(a)
}

pub fn gram(s: &CoefficientScheme, pts: &ProductPointSet, tol: f64) -> Result<GramReport> {
    check_dims(s, pts)?;
    let ev = s.evaluator(tol)?;
    GramReport::from_matrix(gram_matrix(&ev, pts)?)
}

/// `c^T A c`.
pub fn quadratic_form(matrix: &DMatrix<f64>, c: &[f64]) -> Result<f64> {
    if c.len() != matrix.nrows() {
        return Err(Error::LengthMismatch {
            expected: matrix.nrows(),
            found: c.len(),
        });
    }
    let v = DVector::from_column_slice(c);
    Ok(v.dot(&(matrix * &v)))
}

/// `c^T A c` for the Gram matrix of `s` on `pts`.
pub fn scheme_quadratic_form(
    s: &CoefficientScheme,
    pts: &ProductPointSet,
    c: &[f64],
    tol: f64,
) -> Result<f64> {
    check_dims(s, pts)?;
    quadratic_form(&gram_matrix(&s.evaluator(tol)?, pts)?, c)
}

/// `samples` seeded random sites followed by every data point.
fn sample_sites(
    m: SphereDim,
    big_m: SphereDim,
    data: &[ProductPoint],
    samples: usize,
    seed: u64,
) -> Result<Vec<ProductPoint>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sites = Vec::with_capacity(samples + data.len());
    for _ in 0..samples {
        sites.push(ProductPoint::new(random_unit(m, &mut rng)?, random_unit(big_m, &mut rng)?));
    }
    sites.extend(data.iter().cloned());
    Ok(sites)
}

fn basis_rows(dim: SphereDim, top: Degree, anchors: &[&[f64]], site: &[f64]) -> DMatrix<f64> {
    let mut out = DMatrix::<f64>::zeros(anchors.len(), top + 1);
    let mut row = vec![0.0; top + 1];
    for (i, a) in anchors.iter().enumerate() {
        fill_basis(dim, dot(a, site).clamp(-1.0, 1.0), &mut row);
        for (j, v) in row.iter().enumerate() {
            out[(i, j)] = *v;
        }
    }
    out
}

/// `sup |sum_mu c_mu P_k^m(x_mu . x) P_l^M(w_mu . w)|` over `pairs` and `sites`.
fn residual_sup(
    m: SphereDim,
    big_m: SphereDim,
    pairs: &[(Degree, Degree)],
    data: &[ProductPoint],
    c: &[f64],
    sites: &[ProductPoint],
) -> f64 {
    if pairs.is_empty() || data.is_empty() {
        return 0.0;
    }
    let k_top = pairs.iter().map(|p| p.0).max().unwrap_or(0);
    let l_top = pairs.iter().map(|p| p.1).max().unwrap_or(0);
    let xs: Vec<&[f64]> = data.iter().map(|p| p.x.as_slice()).collect();
    let ws: Vec<&[f64]> = data.iter().map(|p| p.w.as_slice()).collect();
    let cvec = DVector::from_column_slice(c);
    sites
        .par_iter()
        .map(|site| {
            let px = basis_rows(m, k_top, &xs, &site.x);
            let mut pw = basis_rows(big_m, l_top, &ws, &site.w);
            for (mut row, ci) in pw.row_iter_mut().zip(cvec.iter()) {
                row *= *ci;
            }
            let sums = px.transpose() * pw;
            pairs.iter().map(|&(k, l)| sums[(k, l)].abs()).fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

fn check_len(pts: &ProductPointSet, c: &[f64]) -> Result<()> {
    if c.len() != pts.len() {
        return Err(Error::LengthMismatch {
            expected: pts.len(),
            found: c.len(),
        });
    }
    Ok(())
}

/// Sup over `J_K` and the sample sites of `|sum_mu c_mu P_k^m(x_mu . x) P_l^M(w_mu . w)|`.
///
/// The sites are `samples` seeded random points plus the data points themselves.
/// Vanishes (numerically) iff `c^T A c` does.
pub fn residual_check(
    s: &CoefficientScheme,
    pts: &ProductPointSet,
    c: &[f64],
    samples: usize,
    seed: u64,
) -> Result<f64> {
    let terms = s.sparse_terms()?;
    check_dims(s, pts)?;
    check_len(pts, c)?;
    let pairs: Vec<(Degree, Degree)> = terms.iter().map(|t| (t.k, t.l)).collect();
    let sites = sample_sites(s.m(), s.big_m(), pts.points(), samples, seed)?;
    Ok(residual_sup(s.m(), s.big_m(), &pairs, pts.points(), c, &sites))
}

/// Scale against which [`residual_check`] counts as zero:
/// `1e-7 * |c|_1 * max_{J_K} P_k^m(1) P_l^M(1)`.
pub fn residual_tolerance(s: &CoefficientScheme, c: &[f64]) -> Result<f64> {
    let peak = s
        .sparse_terms()?
        .iter()
        .map(|t| basis_value_at_one(t.k, s.m()) * basis_value_at_one(t.l, s.big_m()))
        .fold(0.0, f64::max);
    Ok(1e-7 * c.iter().map(|v| v.abs()).sum::<f64>() * peak)
}

/// Single-sphere analogue of [`residual_check`]: sup over degrees with positive
/// coefficient and over the sites of `|sum_mu c_mu P_k^m(x_mu . x)|`.
pub fn single_sphere_residual(
    dim: SphereDim,
    coeffs: &[(Degree, f64)],
    pts: &[Vec<f64>],
    c: &[f64],
    samples: usize,
    seed: u64,
) -> Result<f64> {
    let len = dim.ambient()?;
    if c.len() != pts.len() {
        return Err(Error::LengthMismatch {
            expected: pts.len(),
            found: c.len(),
        });
    }
    if let Some(p) = pts.iter().find(|p| p.len() != len) {
        return Err(Error::DimensionMismatch {
            expected: format!("vectors of length {len}"),
            found: format!("length {}", p.len()),
        });
    }
    let degrees: Vec<Degree> = coeffs.iter().filter(|(_, a)| *a > 0.0).map(|(d, _)| *d).collect();
    let Some(&top) = degrees.iter().max() else {
        return Ok(0.0);
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sites = Vec::with_capacity(samples + pts.len());
    for _ in 0..samples {
        sites.push(random_unit(dim, &mut rng)?);
    }
    sites.extend(pts.iter().cloned());
    let anchors: Vec<&[f64]> = pts.iter().map(|p| p.as_slice()).collect();
    let cvec = DVector::from_column_slice(c);
    Ok(sites
        .par_iter()
        .map(|site| {
            let sums = basis_rows(dim, top, &anchors, site).transpose() * &cvec;
            degrees.iter().map(|&d| sums[d].abs()).fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max))
}

/// Which coordinate of the `(0,0)` block is bounded, as a bound on half the degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaBound {
    /// Every `k` in `J^{0,0}` is at most `2 k0`.
    K(Degree),
    /// Every `l` in `J^{0,0}` is at most `2 l0`.
    L(Degree),
}

impl GammaBound {
    fn half(self) -> Degree {
        match self {
            GammaBound::K(v) | GammaBound::L(v) => v,
        }
    }
}

/// Smallest odd `n > 4 k0 + 1`.
pub fn gamma_n(k0: Degree) -> usize {
    4 * k0 + 3
}

/// `c_mu = 2 (-1)^mu cos(pi mu / n)`, `mu = 1..=n`.
pub fn gamma_coefficients(n: usize) -> Vec<f64> {
    (1..=n)
        .map(|mu| {
            let sign = if mu % 2 == 0 { 1.0 } else { -1.0 };
            2.0 * sign * (std::f64::consts::PI * mu as f64 / n as f64).cos()
        })
        .collect()
}

/// `QF = sum_{mu,nu} c_mu c_nu sum_{k <= k0} P_{2k}^m(x_mu . x_nu)` on `n` circle points,
/// together with the scale `sum |c_mu c_nu|`.
pub fn gamma_quadratic_form(k0: Degree, n: usize, dim: SphereDim) -> Result<(f64, f64)> {
    let xs = circle_embed_points(n, dim)?;
    let c = gamma_coefficients(n);
    let mut basis = vec![0.0; 2 * k0 + 1];
    let mut qf = 0.0;
    for (a, xa) in xs.iter().enumerate() {
        for (b, xb) in xs.iter().enumerate() {
            fill_basis(dim, dot(xa, xb).clamp(-1.0, 1.0), &mut basis);
            let block: f64 = (0..=k0).map(|k| basis[2 * k]).sum();
            qf += c[a] * c[b] * block;
        }
    }
    let l1: f64 = c.iter().map(|v| v.abs()).sum();
    Ok((qf, l1 * l1))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum WitnessKind {
    /// Circle construction on `n` points per factor; `lifted` when the
    /// `(0,0)` block coefficients were spread over `(+-x, +-w)`.
    Gamma { n: usize, bound: GammaBound, lifted: bool },
    AntipodalDoubling { half: usize },
    EmptyQuadrant { quadrant: Quadrant },
}

/// Points and a nonzero `c` with `c^T A c` numerically zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub points: ProductPointSet,
    pub coefficients: Vec<f64>,
    pub quadratic_form_value: f64,
    pub residual_sup: f64,
    pub trace: f64,
    /// `sum_{mu,nu} |c_mu| |c_nu| K_r(1, 1)`.
    pub scale: f64,
    pub kind: WitnessKind,
}

impl Witness {
    /// `|c^T A c| <= 1e-8 * scale`.
    pub fn is_certified(&self) -> bool {
        self.quadratic_form_value.abs() <= 1e-8 * self.scale
    }
}

#[allow(clippy::too_many_arguments)]
fn finish_witness(
    s: &CoefficientScheme,
    ev: &KernelEvaluator,
    points: ProductPointSet,
    coefficients: Vec<f64>,
    matrix: Option<DMatrix<f64>>,
    kind: WitnessKind,
    samples: usize,
    seed: u64,
) -> Result<Witness> {
    let matrix = match matrix {
        Some(a) => a,
        None => gram_matrix(ev, &points)?,
    };
    let qf = quadratic_form(&matrix, &coefficients)?;
    let pairs: Vec<(Degree, Degree)> = ev.terms().iter().map(|t| (t.k, t.l)).collect();
    let sites = sample_sites(s.m(), s.big_m(), points.points(), samples, seed)?;
    let residual = residual_sup(s.m(), s.big_m(), &pairs, points.points(), &coefficients, &sites);
    let l1: f64 = coefficients.iter().map(|v| v.abs()).sum();
    Ok(Witness {
        trace: matrix.trace(),
        scale: l1 * l1 * ev.value_at_ones(),
        points,
        coefficients,
        quadratic_form_value: qf,
        residual_sup: residual,
        kind,
    })
}

/// Spreads quadrant coefficients `d` on representatives over the points
/// `(+-x'_p, +-w'_p)` with coefficients `walsh_split(d)`.
///
/// For any kernel, the quadratic form of the result is the sum over quadrants
/// of the `(i, j)`-part of the kernel evaluated against `d^{i,j}`.
pub fn lift_block_witness(
    reps: &ProductPointSet,
    d: &QuadrantVector,
) -> Result<(ProductPointSet, Vec<f64>)> {
    if d.len() != reps.len() {
        return Err(Error::LengthMismatch {
            expected: reps.len(),
            found: d.len(),
        });
    }
    let e = d.walsh_split();
    let mut points = Vec::with_capacity(4 * reps.len());
    let mut coeffs = Vec::with_capacity(4 * reps.len());
    for (p, rep) in reps.points().iter().enumerate() {
        for q in Quadrant::ALL {
            let (i, j) = q.parities();
            let sx = if i == 1 { -1.0 } else { 1.0 };
            let sw = if j == 1 { -1.0 } else { 1.0 };
            points.push(ProductPoint::new(
                rep.x.iter().map(|v| sx * v).collect(),
                rep.w.iter().map(|v| sw * v).collect(),
            ));
            coeffs.push(e.get(q)[p]);
        }
    }
    Ok((ProductPointSet::new(reps.m(), reps.big_m(), points)?, coeffs))
}

/// Per-representative quadrant coefficients `d = walsh_combine(e)`, where
/// `e^{i,j}_p` is the coefficient of the original point `((-1)^i x'_p, (-1)^j w'_p)`.
pub fn quadrant_coefficients(
    decomposition: &AntipodalFreeDecomposition,
    c: &[f64],
) -> Result<QuadrantVector> {
    if c.len() != decomposition.map.len() {
        return Err(Error::LengthMismatch {
            expected: decomposition.map.len(),
            found: c.len(),
        });
    }
    let n = decomposition.representatives.len();
    let mut e: PerQuadrant<Vec<f64>> = PerQuadrant::from_fn(|_| vec![0.0; n]);
    for (s, &value) in decomposition.map.iter().zip(c) {
        let q = Quadrant::from_parities(usize::from(s.sign_x < 0), usize::from(s.sign_w < 0));
        e[q][s.rep] += value;
    }
    Ok(QuadrantVector::new(e)?.walsh_combine())
}

/// Residual of each quadrant system `sum_p d^{i,j}_p P_k(x'_p . x) P_l(w'_p . w)`, `(k, l) in J^{i,j}`,
/// for the quadrant coefficients of `c` on `pts`.
pub fn block_residuals(
    s: &CoefficientScheme,
    pts: &ProductPointSet,
    c: &[f64],
    samples: usize,
    seed: u64,
) -> Result<PerQuadrant<f64>> {
    let terms = s.sparse_terms()?;
    check_dims(s, pts)?;
    check_len(pts, c)?;
    let dec = crate::geometry::extract_antipodal_free(pts);
    let d = quadrant_coefficients(&dec, c)?;
    let reps = dec.representatives.points();
    let sites = sample_sites(s.m(), s.big_m(), reps, samples, seed)?;
    Ok(PerQuadrant::from_fn(|q| {
        let pairs: Vec<(Degree, Degree)> = terms
            .iter()
            .filter(|t| q.contains(t.k, t.l))
            .map(|t| (t.k, t.l))
            .collect();
        residual_sup(s.m(), s.big_m(), &pairs, reps, d.get(q), &sites)
    }))
}

fn bounded_by(info: &QuadrantInfo, bound: GammaBound) -> bool {
    if info.is_empty() {
        return true;
    }
    let limit = 2 * bound.half();
    match bound {
        GammaBound::K(_) => !info.flags.k_unbounded && info.k_max.is_some_and(|k| k <= limit),
        GammaBound::L(_) => !info.flags.l_unbounded && info.l_max.is_some_and(|l| l <= limit),
    }
}

/// Witness from the circle construction for a scheme whose `(0,0)` block is
/// bounded in `k` (or in `l`) by `2 k0`.
///
/// With `n = 4 k0 + 3` and `c_mu` from [`gamma_coefficients`], the coefficients
/// `d_{mu nu} = c_mu c_nu` on `(x_mu, w_nu)` annihilate every `P_{2k}^m`, `k <= k0`,
/// in the bounded factor. When the `(1, .)` quadrants (or `(., 1)` for an `l`
/// bound) are empty and the rest of `J_K` obeys the same bound, these `n^2`
/// points already form the witness; otherwise `d` is lifted to `(+-x, +-w)`.
pub fn gamma_witness(
    s: &CoefficientScheme,
    bound: GammaBound,
    tol: f64,
    samples: usize,
    seed: u64,
) -> Result<Witness> {
    let iq = s.index_quadrants()?;
    let q = &iq.quadrants;
    if !bounded_by(&q.q00, bound) {
        return Err(Error::PreconditionFailed(format!(
            "the (0,0) block is not bounded by {bound:?} (degree {})",
            2 * bound.half()
        )));
    }
    let direct = match bound {
        GammaBound::K(_) => q.q10.is_empty() && q.q11.is_empty() && bounded_by(&q.q01, bound),
        GammaBound::L(_) => q.q01.is_empty() && q.q11.is_empty() && bounded_by(&q.q10, bound),
    };
    let ev = s.evaluator(tol)?;
    let n = gamma_n(bound.half());
    let xs = circle_embed_points(n, s.m())?;
    let ws = circle_embed_points(n, s.big_m())?;
    let c = gamma_coefficients(n);
    let mut grid = Vec::with_capacity(n * n);
    let mut d = Vec::with_capacity(n * n);
    for (a, x) in xs.iter().enumerate() {
        for (b, w) in ws.iter().enumerate() {
            grid.push(ProductPoint::new(x.clone(), w.clone()));
            d.push(c[a] * c[b]);
        }
    }
    let grid = ProductPointSet::new(s.m(), s.big_m(), grid)?;
    let (points, coefficients) = if direct {
        (grid, d)
    } else {
        let mut block = QuadrantVector::zeros(n * n).values().clone();
        block.q00 = d;
        lift_block_witness(&grid, &QuadrantVector::new(block)?)?
    };
    let kind = WitnessKind::Gamma {
        n,
        bound,
        lifted: !direct,
    };
    finish_witness(s, &ev, points, coefficients, None, kind, samples, seed)
}

/// Four-point witness `(+-x, +-w)` for a scheme with an empty parity quadrant.
pub fn empty_quadrant_witness(
    s: &CoefficientScheme,
    quadrant: Quadrant,
    tol: f64,
    samples: usize,
    seed: u64,
) -> Result<Witness> {
    let iq = s.index_quadrants()?;
    if !iq.quadrants[quadrant].is_empty() {
        return Err(Error::PreconditionFailed(format!("quadrant {quadrant} is not empty")));
    }
    let ev = s.evaluator(tol)?;
    let rep = random_point_set(s.m(), s.big_m(), 1, seed)?;
    let mut block = QuadrantVector::zeros(1).values().clone();
    block[quadrant] = vec![4.0];
    let (points, coefficients) = lift_block_witness(&rep, &QuadrantVector::new(block)?)?;
    let kind = WitnessKind::EmptyQuadrant { quadrant };
    finish_witness(s, &ev, points, coefficients, None, kind, samples, seed)
}

/// Searches `2n` points `x_{n+j} = -x_j`, `w_{n+j} = -w_j` for `n = 1, 2, 4, ...,`
/// [`MAX_DOUBLING_HALF`] until the Gram matrix has a null vector with
/// `|c^T A c| <= 1e-10 trace(A)`.
///
/// Needs the even-sum or the odd-sum part of `J_K` to be finite; the rank of
/// the Gram matrix is then bounded independently of `n`.
pub fn antipodal_doubling_witness(s: &CoefficientScheme, tol: f64, seed: u64) -> Result<Witness> {
    antipodal_doubling_search(s, tol, seed, MAX_DOUBLING_HALF)
}

/// [`antipodal_doubling_witness`] with the half-size capped at `max_half`.
pub fn antipodal_doubling_search(
    s: &CoefficientScheme,
    tol: f64,
    seed: u64,
    max_half: usize,
) -> Result<Witness> {
    let iq = s.index_quadrants()?;
    if iq.even_sum_infinite && iq.odd_sum_infinite {
        return Err(Error::PreconditionFailed(
            "both the even-sum and the odd-sum parts of J_K are infinite".into(),
        ));
    }
    let ev = s.evaluator(tol)?;
    let mut last_min = f64::NAN;
    let mut half = 1;
    while half <= max_half {
        let base = random_point_set(s.m(), s.big_m(), half, seed.wrapping_add(half as u64))?;
        let mut points = base.points().to_vec();
        points.extend(base.points().iter().map(|p| {
            ProductPoint::new(p.x.iter().map(|v| -v).collect(), p.w.iter().map(|v| -v).collect())
        }));
        let points = ProductPointSet::new(s.m(), s.big_m(), points)?;
        let report = GramReport::from_matrix(gram_matrix(&ev, &points)?)?;
        last_min = report.min_eigenvalue;
        if let Some(v) = &report.null_vector {
            let c: Vec<f64> = v.iter().copied().collect();
            let qf = quadratic_form(&report.matrix, &c)?;
            if qf.abs() <= WITNESS_FACTOR * report.trace() {
                let kind = WitnessKind::AntipodalDoubling { half };
                return finish_witness(
                    s,
                    &ev,
                    points,
                    c,
                    Some(report.matrix),
                    kind,
                    DEFAULT_RESIDUAL_SAMPLES,
                    seed,
                );
            }
        }
        half *= 2;
    }
    Err(Error::SearchExhausted {
        max_half,
        last_min_eigenvalue: last_min,
    })
}
