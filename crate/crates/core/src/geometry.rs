//! Points on `S^m x S^M`, antipodal-free folding and the Walsh block transform.

use std::f64::consts::PI;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gegenbauer::SphereDim;
use crate::kernel::{PerQuadrant, Quadrant};

/// Inputs whose norm is within this of 1 are renormalized; others are rejected.
pub const NORMALIZE_SLACK: f64 = 1e-6;

/// Two vectors closer than this in every coordinate are the same point.
pub const COINCIDENCE_TOL: f64 = 1e-12;

/// A dot product at or below `-1 + ANTIPODAL_TOL` marks an antipodal pair.
pub const ANTIPODAL_TOL: f64 = 1e-10;

/// Smallest coordinate magnitude used to fix the canonical sign.
const SIGN_PIVOT: f64 = 1e-9;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn same_vector(a: &[f64], b: &[f64]) -> bool {
    max_diff(a, b) <= COINCIDENCE_TOL
}

fn is_antipodal(a: &[f64], b: &[f64]) -> bool {
    dot(a, b) <= -1.0 + ANTIPODAL_TOL
}

fn normalized(v: &[f64], what: &str) -> Result<Vec<f64>> {
    if v.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidPoints(format!("{what} has a non-finite coordinate")));
    }
    let norm = dot(v, v).sqrt();
    if (norm - 1.0).abs() > NORMALIZE_SLACK {
        return Err(Error::InvalidPoints(format!(
            "{what} has norm {norm}, too far from 1 to renormalize"
        )));
    }
    Ok(v.iter().map(|c| c / norm).collect())
}

/// Flips `v` so its first coordinate of magnitude above `1e-9` is positive.
/// Returns the flipped vector and the sign `s` with `v = s * flipped`.
fn canonical(v: &[f64]) -> (Vec<f64>, f64) {
    let sign = match v.iter().find(|c| c.abs() > SIGN_PIVOT) {
        Some(c) if *c < 0.0 => -1.0,
        _ => 1.0,
    };
    (v.iter().map(|c| sign * c).collect(), sign)
}

/// A point `(x, w)` of `S^m x S^M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductPoint {
    pub x: Vec<f64>,
    pub w: Vec<f64>,
}

impl ProductPoint {
    pub fn new(x: Vec<f64>, w: Vec<f64>) -> Self {
        ProductPoint { x, w }
    }

    fn coincides(&self, other: &ProductPoint) -> bool {
        same_vector(&self.x, &other.x) && same_vector(&self.w, &other.w)
    }
}

/// Pairwise distinct points on `S^m x S^M` with finite `m`, `M`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductPointSet {
    m: SphereDim,
    big_m: SphereDim,
    points: Vec<ProductPoint>,
}

impl ProductPointSet {
    /// Validates lengths and distinctness and renormalizes each slot.
    pub fn new(m: SphereDim, big_m: SphereDim, points: Vec<ProductPoint>) -> Result<Self> {
        let dx = m.ambient()?;
        let dw = big_m.ambient()?;
        let mut clean: Vec<ProductPoint> = Vec::with_capacity(points.len());
        for (i, p) in points.into_iter().enumerate() {
            if p.x.len() != dx {
                return Err(Error::DimensionMismatch {
                    expected: format!("x of length {dx}"),
                    found: format!("point {i} with x of length {}", p.x.len()),
                });
            }
            if p.w.len() != dw {
                return Err(Error::DimensionMismatch {
                    expected: format!("w of length {dw}"),
                    found: format!("point {i} with w of length {}", p.w.len()),
                });
            }
            let p = ProductPoint {
                x: normalized(&p.x, &format!("point {i}, x"))?,
                w: normalized(&p.w, &format!("point {i}, w"))?,
            };
            if let Some(j) = clean.iter().position(|q| q.coincides(&p)) {
                return Err(Error::InvalidPoints(format!("points {j} and {i} coincide")));
            }
            clean.push(p);
        }
        Ok(ProductPointSet {
            m,
            big_m,
            points: clean,
        })
    }

    pub fn m(&self) -> SphereDim {
        self.m
    }

    pub fn big_m(&self) -> SphereDim {
        self.big_m
    }

    pub fn points(&self) -> &[ProductPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// No `x_p . x_q = -1` and no `w_p . w_q = -1` for `p != q`.
    pub fn is_antipodal_free(&self) -> bool {
        let pts = &self.points;
        (0..pts.len()).all(|p| {
            (p + 1..pts.len()).all(|q| {
                !is_antipodal(&pts[p].x, &pts[q].x) && !is_antipodal(&pts[p].w, &pts[q].w)
            })
        })
    }

    /// All `x_mu` pairwise distinct and all `w_mu` pairwise distinct.
    pub fn has_distinct_components(&self) -> bool {
        let pts = &self.points;
        (0..pts.len()).all(|p| {
            (p + 1..pts.len())
                .all(|q| !same_vector(&pts[p].x, &pts[q].x) && !same_vector(&pts[p].w, &pts[q].w))
        })
    }
}

/// Where an original point sits relative to its representative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SignedRep {
    pub rep: usize,
    pub sign_x: i8,
    pub sign_w: i8,
}

/// Representatives `(x'_p, w'_p)` with every input point equal to some `(+-x'_p, +-w'_p)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AntipodalFreeDecomposition {
    pub representatives: ProductPointSet,
    pub map: Vec<SignedRep>,
}

impl AntipodalFreeDecomposition {
    /// `(sign_x x'_p, sign_w w'_p)` for original point `mu`.
    pub fn reconstruct(&self, mu: usize) -> ProductPoint {
        let s = self.map[mu];
        let rep = &self.representatives.points()[s.rep];
        ProductPoint {
            x: rep.x.iter().map(|c| f64::from(s.sign_x) * c).collect(),
            w: rep.w.iter().map(|c| f64::from(s.sign_w) * c).collect(),
        }
    }
}

/// Folds `pts` onto canonical sign representatives.
///
/// The `x` and `w` slots are normalized separately; representatives are the
/// distinct normalized pairs in order of first occurrence.
pub fn extract_antipodal_free(pts: &ProductPointSet) -> AntipodalFreeDecomposition {
    let mut reps: Vec<ProductPoint> = Vec::new();
    let mut map = Vec::with_capacity(pts.len());
    for p in pts.points() {
        let (x, sx) = canonical(&p.x);
        let (w, sw) = canonical(&p.w);
        let candidate = ProductPoint { x, w };
        let rep = match reps.iter().position(|r| r.coincides(&candidate)) {
            Some(i) => i,
            None => {
                reps.push(candidate);
                reps.len() - 1
            }
        };
        map.push(SignedRep {
            rep,
            sign_x: sx as i8,
            sign_w: sw as i8,
        });
    }
    AntipodalFreeDecomposition {
        representatives: ProductPointSet {
            m: pts.m(),
            big_m: pts.big_m(),
            points: reps,
        },
        map,
    }
}

/// One real coefficient per representative for each parity quadrant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadrantVector {
    values: PerQuadrant<Vec<f64>>,
}

impl QuadrantVector {
    pub fn new(values: PerQuadrant<Vec<f64>>) -> Result<Self> {
        let n = values.q00.len();
        for (q, v) in values.iter() {
            if v.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    found: v.len(),
                });
            }
            if v.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidScheme(format!("non-finite entry in quadrant {q}")));
            }
        }
        Ok(QuadrantVector { values })
    }

    pub fn zeros(n: usize) -> Self {
        QuadrantVector {
            values: PerQuadrant::from_fn(|_| vec![0.0; n]),
        }
    }

    pub fn len(&self) -> usize {
        self.values.q00.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, q: Quadrant) -> &[f64] {
        &self.values[q]
    }

    pub fn values(&self) -> &PerQuadrant<Vec<f64>> {
        &self.values
    }

    fn butterfly(&self, scale: f64) -> Self {
        let v = &self.values;
        let n = self.len();
        let mut out = PerQuadrant::from_fn(|_| Vec::with_capacity(n));
        for i in 0..n {
            let (c00, c10, c01, c11) = (v.q00[i], v.q10[i], v.q01[i], v.q11[i]);
            out.q00.push((c00 + c10 + c01 + c11) * scale);
            out.q10.push((c00 - c10 + c01 - c11) * scale);
            out.q01.push((c00 + c10 - c01 - c11) * scale);
            out.q11.push((c00 - c10 - c01 + c11) * scale);
        }
        QuadrantVector { values: out }
    }

    /// `d^{i,j} = sum_{a,b} (-1)^{ia + jb} c^{a,b}`, per point.
    pub fn walsh_combine(&self) -> Self {
        self.butterfly(1.0)
    }

    /// Inverse of [`walsh_combine`](Self::walsh_combine).
    pub fn walsh_split(&self) -> Self {
        self.butterfly(0.25)
    }
}

/// `x_mu = (cos(2 pi mu / n), sin(2 pi mu / n), 0, ..., 0)` for `mu = 1..=n`.
pub fn circle_embed_points(n: usize, dim: SphereDim) -> Result<Vec<Vec<f64>>> {
    let len = dim.ambient()?;
    if n == 0 {
        return Err(Error::PreconditionFailed("circle_embed_points needs n >= 1".into()));
    }
    Ok((1..=n)
        .map(|mu| {
            let angle = 2.0 * PI * (mu % n) as f64 / n as f64;
            let mut v = vec![0.0; len];
            v[0] = angle.cos();
            v[1] = angle.sin();
            v
        })
        .collect())
}

/// Uniform point on `S^dim` drawn from `rng` (normalized Gaussian).
pub fn random_unit<R: Rng + ?Sized>(dim: SphereDim, rng: &mut R) -> Result<Vec<f64>> {
    let len = dim.ambient()?;
    loop {
        let v: Vec<f64> = (0..len).map(|_| rng.sample(StandardNormal)).collect();
        let norm = dot(&v, &v).sqrt();
        if norm > 1e-6 {
            return Ok(v.into_iter().map(|c| c / norm).collect());
        }
    }
}

/// [`random_unit`] from a fresh generator seeded with `seed`.
pub fn random_unit_seeded(dim: SphereDim, seed: u64) -> Result<Vec<f64>> {
    random_unit(dim, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// `n` seeded random points on `S^m x S^M`.
pub fn random_point_set(m: SphereDim, big_m: SphereDim, n: usize, seed: u64) -> Result<ProductPointSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(n);
    for _ in 0..n {
        points.push(ProductPoint {
            x: random_unit(m, &mut rng)?,
            w: random_unit(big_m, &mut rng)?,
        });
    }
    ProductPointSet::new(m, big_m, points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dim(m: i64) -> SphereDim {
        SphereDim::finite(m).unwrap()
    }

    fn neg(v: &[f64]) -> Vec<f64> {
        v.iter().map(|c| -c).collect()
    }

    fn set(points: Vec<ProductPoint>) -> ProductPointSet {
        ProductPointSet::new(dim(2), dim(2), points).unwrap()
    }

    #[test]
    fn ingest_normalizes_and_rejects() {
        let p = ProductPoint::new(vec![1.0 + 5e-7, 0.0, 0.0], vec![0.0, 1.0, 0.0]);
        let s = set(vec![p]);
        assert_eq!(s.points()[0].x, vec![1.0, 0.0, 0.0]);

        let far = ProductPoint::new(vec![1.1, 0.0, 0.0], vec![0.0, 1.0, 0.0]);
        assert!(ProductPointSet::new(dim(2), dim(2), vec![far]).is_err());

        let short = ProductPoint::new(vec![1.0, 0.0], vec![0.0, 1.0, 0.0]);
        assert!(matches!(
            ProductPointSet::new(dim(2), dim(2), vec![short]),
            Err(Error::DimensionMismatch { .. })
        ));

        let a = ProductPoint::new(vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]);
        assert!(ProductPointSet::new(dim(2), dim(2), vec![a.clone(), a.clone()]).is_err());
        // same x, different w is fine
        let b = ProductPoint::new(vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]);
        assert_eq!(set(vec![a, b]).len(), 2);

        assert!(ProductPointSet::new(SphereDim::INFINITY, dim(2), vec![]).is_err());
    }

    #[test]
    fn antipodal_pair_folds_to_one() {
        let x = random_unit_seeded(dim(2), 1).unwrap();
        let w = random_unit_seeded(dim(2), 2).unwrap();
        let pts = set(vec![ProductPoint::new(x.clone(), w.clone()), ProductPoint::new(neg(&x), neg(&w))]);
        let dec = extract_antipodal_free(&pts);
        assert_eq!(dec.representatives.len(), 1);
        let (m0, m1) = (dec.map[0], dec.map[1]);
        assert_eq!((m0.sign_x * m1.sign_x, m0.sign_w * m1.sign_w), (-1, -1));
        for mu in 0..2 {
            assert_eq!(dec.reconstruct(mu), pts.points()[mu]);
        }
    }

    #[test]
    fn four_sign_patterns_fold_to_one() {
        let x = vec![0.6, 0.8, 0.0];
        let w = vec![0.0, 0.6, -0.8];
        let pts = set(vec![
            ProductPoint::new(x.clone(), w.clone()),
            ProductPoint::new(neg(&x), w.clone()),
            ProductPoint::new(x.clone(), neg(&w)),
            ProductPoint::new(neg(&x), neg(&w)),
        ]);
        let dec = extract_antipodal_free(&pts);
        assert_eq!(dec.representatives.len(), 1);
        let signs: Vec<(i8, i8)> = dec.map.iter().map(|s| (s.sign_x, s.sign_w)).collect();
        // w has first big coordinate 0.6 > 0
        assert_eq!(signs, vec![(1, 1), (-1, 1), (1, -1), (-1, -1)]);
        // brute force: the representative is the unique sign choice with canonical signs
        let rep = &dec.representatives.points()[0];
        assert_eq!((rep.x.clone(), rep.w.clone()), (x, w));
    }

    #[test]
    fn antipodal_free_input_keeps_every_point() {
        let pts = random_point_set(dim(3), dim(2), 12, 9).unwrap();
        assert!(pts.is_antipodal_free());
        let dec = extract_antipodal_free(&pts);
        assert_eq!(dec.representatives.len(), 12);
        for (mu, p) in pts.points().iter().enumerate() {
            let rep = &dec.representatives.points()[dec.map[mu].rep];
            let (cx, _) = canonical(&p.x);
            assert_eq!(rep.x, cx);
            assert_eq!(&dec.reconstruct(mu), p);
        }
    }

    #[test]
    fn circle_points() {
        assert_eq!(circle_embed_points(1, dim(2)).unwrap(), vec![vec![1.0, 0.0, 0.0]]);
        let four = set(circle_embed_points(4, dim(2))
            .unwrap()
            .into_iter()
            .zip(random_point_set(dim(2), dim(2), 4, 0).unwrap().points())
            .map(|(x, p)| ProductPoint::new(x, p.w.clone()))
            .collect());
        assert!(!four.is_antipodal_free());
        let p4 = circle_embed_points(4, dim(2)).unwrap();
        assert!(is_antipodal(&p4[0], &p4[2]));

        let seven = circle_embed_points(7, dim(2)).unwrap();
        let mut pairs = 0;
        for a in 0..7 {
            for b in a + 1..7 {
                let d = dot(&seven[a], &seven[b]);
                assert!((d.abs() - 1.0).abs() > 1e-3);
                let want = (2.0 * PI * (a as f64 - b as f64) / 7.0).cos();
                assert!((d - want).abs() < 1e-14);
                pairs += 1;
            }
        }
        assert_eq!(pairs, 21);
        assert!(circle_embed_points(0, dim(2)).is_err());
    }

    #[test]
    fn random_units() {
        let a = random_unit_seeded(dim(4), 17).unwrap();
        assert_eq!(a, random_unit_seeded(dim(4), 17).unwrap());
        assert!((dot(&a, &a).sqrt() - 1.0).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut mean = [0.0; 3];
        let n = 10_000;
        for _ in 0..n {
            let v = random_unit(dim(2), &mut rng).unwrap();
            for (m, c) in mean.iter_mut().zip(&v) {
                *m += c / n as f64;
            }
        }
        assert!(mean.iter().all(|m| m.abs() < 0.05), "{mean:?}");
    }

    fn qv(c: [f64; 4]) -> QuadrantVector {
        QuadrantVector::new(PerQuadrant {
            q00: vec![c[0]],
            q10: vec![c[1]],
            q01: vec![c[2]],
            q11: vec![c[3]],
        })
        .unwrap()
    }

    fn flat(v: &QuadrantVector) -> [f64; 4] {
        [v.get(Quadrant::EvenEven)[0], v.get(Quadrant::OddEven)[0], v.get(Quadrant::EvenOdd)[0], v.get(Quadrant::OddOdd)[0]]
    }

    #[test]
    fn walsh_examples() {
        assert_eq!(flat(&qv([1.0, 1.0, 1.0, 1.0]).walsh_combine()), [4.0, 0.0, 0.0, 0.0]);
        assert_eq!(flat(&qv([1.0, 0.0, 0.0, 0.0]).walsh_combine()), [1.0, 1.0, 1.0, 1.0]);
        assert_eq!(flat(&qv([1.0, 2.0, 3.0, 4.0]).walsh_combine()), [10.0, -2.0, -4.0, 0.0]);
        assert_eq!(flat(&qv([4.0, 0.0, 0.0, 0.0]).walsh_split()), [1.0, 1.0, 1.0, 1.0]);
        assert_eq!(flat(&qv([-3.0, 0.0, 0.0, 0.0]).walsh_split()), [-0.75; 4]);
        assert_eq!(flat(&QuadrantVector::zeros(1).walsh_split()), [0.0; 4]);
        let bad = PerQuadrant { q00: vec![1.0], q10: vec![], q01: vec![1.0], q11: vec![1.0] };
        assert!(QuadrantVector::new(bad).is_err());
    }

    proptest! {
        #[test]
        fn walsh_roundtrip_exact_on_integers(c in prop::collection::vec(-1_000_000i64..1_000_000, 4 * 5)) {
            let f: Vec<f64> = c.iter().map(|&v| v as f64).collect();
            let v = QuadrantVector::new(PerQuadrant {
                q00: f[0..5].to_vec(), q10: f[5..10].to_vec(), q01: f[10..15].to_vec(), q11: f[15..20].to_vec(),
            }).unwrap();
            prop_assert_eq!(v.walsh_combine().walsh_split(), v.clone());
            prop_assert_eq!(v.walsh_split().walsh_combine(), v);
        }

        #[test]
        fn walsh_roundtrip_close_on_reals(c in prop::array::uniform4(-1e3f64..1e3)) {
            let back = flat(&qv(c).walsh_combine().walsh_split());
            for (a, b) in back.iter().zip(&c) {
                prop_assert!((a - b).abs() <= 1e-12 * 1e3);
            }
        }

        #[test]
        fn folding_is_sound(seed in 0u64..500, flips in prop::collection::vec(0u8..4, 1..8)) {
            // a few base points, each repeated under random sign flips
            let base = random_point_set(dim(2), dim(3), 3, seed).unwrap();
            let mut pts: Vec<ProductPoint> = Vec::new();
            for (i, f) in flips.iter().enumerate() {
                let b = &base.points()[i % 3];
                let x = if f & 1 == 1 { neg(&b.x) } else { b.x.clone() };
                let w = if f & 2 == 2 { neg(&b.w) } else { b.w.clone() };
                let p = ProductPoint::new(x, w);
                if !pts.iter().any(|q| q.coincides(&p)) {
                    pts.push(p);
                }
            }
            let set = ProductPointSet::new(dim(2), dim(3), pts).unwrap();
            let dec = extract_antipodal_free(&set);
            prop_assert!(dec.representatives.len() <= set.len());
            prop_assert!(dec.representatives.len() <= 3);
            prop_assert!(dec.representatives.is_antipodal_free());
            for mu in 0..set.len() {
                prop_assert!(dec.reconstruct(mu).coincides(&set.points()[mu]));
            }
        }
    }
}
