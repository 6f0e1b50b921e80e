//! Coefficient schemes `a_{k,l}` and the isotropic part
//! `K_r(t, s) = sum a_{k,l} P_k^m(t) P_l^M(s)` they define.
//!
//! A scheme stores only strictly positive coefficients, so the support
//! `J_K = {(k, l) : a_{k,l} > 0}` is exactly what is stored (sparse schemes)
//! or what the support mask admits (parameterized schemes).

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Index, IndexMut};
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gegenbauer::{
    self, basis_value_at_one, clamp_argument, fill_basis, Basis, Degree, ExpansionCoefficients,
    SphereDim,
};

/// Largest cutoff searched when truncating a parameterized family.
const MAX_CUTOFF: Degree = 100_000;

/// Membership window used to spot-check custom masks.
pub const MASK_SAMPLE_WINDOW: Degree = 200;

/// Parity class `(k mod 2, l mod 2)` of an index pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Quadrant {
    #[serde(rename = "0,0")]
    EvenEven,
    #[serde(rename = "1,0")]
    OddEven,
    #[serde(rename = "0,1")]
    EvenOdd,
    #[serde(rename = "1,1")]
    OddOdd,
}

impl Quadrant {
    /// In the order (0,0), (1,0), (0,1), (1,1).
    pub const ALL: [Quadrant; 4] = [
        Quadrant::EvenEven,
        Quadrant::OddEven,
        Quadrant::EvenOdd,
        Quadrant::OddOdd,
    ];

    pub fn of(k: Degree, l: Degree) -> Self {
        Self::from_parities(k % 2, l % 2)
    }

    /// Panics unless both parities are 0 or 1.
    pub fn from_parities(i: usize, j: usize) -> Self {
        match (i, j) {
            (0, 0) => Quadrant::EvenEven,
            (1, 0) => Quadrant::OddEven,
            (0, 1) => Quadrant::EvenOdd,
            (1, 1) => Quadrant::OddOdd,
            _ => panic!("parities must be 0 or 1, got ({i}, {j})"),
        }
    }

    /// `(i, j)` with `i = k mod 2`, `j = l mod 2`.
    pub fn parities(self) -> (usize, usize) {
        match self {
            Quadrant::EvenEven => (0, 0),
            Quadrant::OddEven => (1, 0),
            Quadrant::EvenOdd => (0, 1),
            Quadrant::OddOdd => (1, 1),
        }
    }

    pub fn contains(self, k: Degree, l: Degree) -> bool {
        Quadrant::of(k, l) == self
    }

    pub fn is_even_sum(self) -> bool {
        let (i, j) = self.parities();
        (i + j) % 2 == 0
    }
}

impl fmt::Display for Quadrant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (i, j) = self.parities();
        write!(f, "({i},{j})")
    }
}

/// One value per parity quadrant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PerQuadrant<T> {
    #[serde(rename = "0,0")]
    pub q00: T,
    #[serde(rename = "1,0")]
    pub q10: T,
    #[serde(rename = "0,1")]
    pub q01: T,
    #[serde(rename = "1,1")]
    pub q11: T,
}

impl<T> PerQuadrant<T> {
    pub fn from_fn(mut f: impl FnMut(Quadrant) -> T) -> Self {
        PerQuadrant {
            q00: f(Quadrant::EvenEven),
            q10: f(Quadrant::OddEven),
            q01: f(Quadrant::EvenOdd),
            q11: f(Quadrant::OddOdd),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (Quadrant, &T)> {
        Quadrant::ALL.into_iter().map(move |q| (q, &self[q]))
    }

    pub fn map<U>(&self, mut f: impl FnMut(Quadrant, &T) -> U) -> PerQuadrant<U> {
        PerQuadrant::from_fn(|q| f(q, &self[q]))
    }
}

impl<T> Index<Quadrant> for PerQuadrant<T> {
    type Output = T;
    fn index(&self, q: Quadrant) -> &T {
        match q {
            Quadrant::EvenEven => &self.q00,
            Quadrant::OddEven => &self.q10,
            Quadrant::EvenOdd => &self.q01,
            Quadrant::OddOdd => &self.q11,
        }
    }
}

impl<T> IndexMut<Quadrant> for PerQuadrant<T> {
    fn index_mut(&mut self, q: Quadrant) -> &mut T {
        match q {
            Quadrant::EvenEven => &mut self.q00,
            Quadrant::OddEven => &mut self.q10,
            Quadrant::EvenOdd => &mut self.q01,
            Quadrant::OddOdd => &mut self.q11,
        }
    }
}

/// Unboundedness of a quadrant of `J_K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct QuadrantFlags {
    /// The `k` coordinates are unbounded.
    pub k_unbounded: bool,
    /// The `l` coordinates are unbounded.
    pub l_unbounded: bool,
    /// Some sequence in the quadrant has both coordinates tending to infinity.
    pub joint_unbounded: bool,
}

impl QuadrantFlags {
    pub const FULL: QuadrantFlags = QuadrantFlags {
        k_unbounded: true,
        l_unbounded: true,
        joint_unbounded: true,
    };
    pub const BOUNDED: QuadrantFlags = QuadrantFlags {
        k_unbounded: false,
        l_unbounded: false,
        joint_unbounded: false,
    };

    /// A subset of `Z_+^2` is infinite iff one coordinate is unbounded.
    pub fn infinite(&self) -> bool {
        self.k_unbounded || self.l_unbounded
    }
}

/// User-supplied support predicate with declared unboundedness metadata.
#[derive(Clone)]
pub struct CustomMask {
    label: String,
    predicate: Arc<dyn Fn(Degree, Degree) -> bool + Send + Sync>,
    declared: PerQuadrant<QuadrantFlags>,
}

impl CustomMask {
    pub fn new(
        label: impl Into<String>,
        predicate: impl Fn(Degree, Degree) -> bool + Send + Sync + 'static,
        declared: PerQuadrant<QuadrantFlags>,
    ) -> Self {
        CustomMask {
            label: label.into(),
            predicate: Arc::new(predicate),
            declared,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn declared(&self) -> &PerQuadrant<QuadrantFlags> {
        &self.declared
    }

    pub fn contains(&self, k: Degree, l: Degree) -> bool {
        (self.predicate)(k, l)
    }
}

impl fmt::Debug for CustomMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomMask")
            .field("label", &self.label)
            .field("declared", &self.declared)
            .finish_non_exhaustive()
    }
}

/// Which `(k, l)` of a full-support family belong to `J_K`.
#[derive(Debug, Clone)]
pub enum SupportMask {
    All,
    EvenSum,
    OddSum,
    Quadrants(BTreeSet<Quadrant>),
    Custom(CustomMask),
}

impl SupportMask {
    pub fn contains(&self, k: Degree, l: Degree) -> bool {
        match self {
            SupportMask::All => true,
            SupportMask::EvenSum => (k + l).is_multiple_of(2),
            SupportMask::OddSum => (k + l) % 2 == 1,
            SupportMask::Quadrants(set) => set.contains(&Quadrant::of(k, l)),
            SupportMask::Custom(custom) => custom.contains(k, l),
        }
    }

    /// Quadrants fully included by a structural mask; `None` for custom masks.
    fn included_quadrants(&self) -> Option<BTreeSet<Quadrant>> {
        let all = Quadrant::ALL.into_iter();
        Some(match self {
            SupportMask::All => all.collect(),
            SupportMask::EvenSum => all.filter(|q| q.is_even_sum()).collect(),
            SupportMask::OddSum => all.filter(|q| !q.is_even_sum()).collect(),
            SupportMask::Quadrants(set) => set.clone(),
            SupportMask::Custom(_) => return None,
        })
    }
}

/// A parameterized coefficient family `a_{k,l}`, positive for every `(k, l)`.
pub trait CoefficientFamily: fmt::Debug + Send + Sync {
    fn id(&self) -> &str;

    fn parameters(&self) -> Vec<(String, f64)>;

    /// `a_{k,l}` before masking.
    fn coefficient(&self, k: Degree, l: Degree) -> f64;

    /// Rectangular cutoff `(K, L)` such that the sum of `a_{k,l} P_k^m(1) P_l^M(1)`
    /// over all `(k, l)` outside `[0, K) x [0, L)` is at most `tol`.
    /// `None` when the family cannot certify a tail bound.
    fn truncation(&self, m: SphereDim, big_m: SphereDim, tol: f64) -> Option<(Degree, Degree)>;

    /// Closed form of the masked kernel, when known.
    fn closed_form(
        &self,
        _mask: &SupportMask,
        _m: SphereDim,
        _big_m: SphereDim,
        _t: f64,
        _s: f64,
    ) -> Option<f64> {
        None
    }
}

/// `a_{k,l} = c r^k q^l` with `c > 0` and `0 < r, q < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometricFamily {
    pub c: f64,
    pub r: f64,
    pub q: f64,
}

impl GeometricFamily {
    pub fn new(c: f64, r: f64, q: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidScheme(format!("geometric scale c = {c} must be positive")));
        }
        for (name, v) in [("r", r), ("q", q)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::InvalidScheme(format!(
                    "geometric ratio {name} = {v} must lie in (0, 1)"
                )));
            }
        }
        Ok(GeometricFamily { c, r, q })
    }
}

/// `sum_k r^k P_k(t)` in the basis of `dim`: `(1 - 2rt + r^2)^{-(m-1)/2}`, or `1/(1 - rt)`
/// on `S^infinity`. Valid for `|r| < 1`.
pub fn generating_function(dim: SphereDim, r: f64, t: f64) -> f64 {
    match dim.get() {
        Some(m) => (1.0 - 2.0 * r * t + r * r).powf(-(m as f64 - 1.0) / 2.0),
        None => 1.0 / (1.0 - r * t),
    }
}

/// `sum_k r^k P_k(1)` exactly.
fn basis_total(dim: SphereDim, r: f64) -> f64 {
    generating_function(dim, r, 1.0)
}

/// Upper bound on `sum_{k >= start} r^k P_k(1)` from the ratio test: for
/// `k >= start` the ratio of consecutive terms is at most `r (start + m - 1) / (start + 1)`.
fn tail_bound(dim: SphereDim, r: f64, start: Degree, first_term: f64) -> f64 {
    let ratio = match dim.get() {
        None => r,
        Some(m) => r * (start as f64 + m as f64 - 1.0) / (start as f64 + 1.0),
    };
    if ratio < 1.0 {
        first_term / (1.0 - ratio)
    } else {
        f64::INFINITY
    }
}

/// Smallest `K` with `sum_{k >= K} r^k P_k(1) <= budget`.
fn smallest_cutoff(dim: SphereDim, r: f64, budget: f64) -> Option<Degree> {
    let mut term = 1.0; // r^K P_K(1)
    for cutoff in 0..=MAX_CUTOFF {
        if tail_bound(dim, r, cutoff, term) <= budget {
            return Some(cutoff);
        }
        let growth = match dim.get() {
            None => 1.0,
            Some(m) => (cutoff as f64 + m as f64 - 1.0) / (cutoff as f64 + 1.0),
        };
        term *= r * growth;
    }
    None
}

impl CoefficientFamily for GeometricFamily {
    fn id(&self) -> &str {
        "geometric"
    }

    fn parameters(&self) -> Vec<(String, f64)> {
        vec![("c".into(), self.c), ("r".into(), self.r), ("q".into(), self.q)]
    }

    fn coefficient(&self, k: Degree, l: Degree) -> f64 {
        self.c * self.r.powf(k as f64) * self.q.powf(l as f64)
    }

    fn truncation(&self, m: SphereDim, big_m: SphereDim, tol: f64) -> Option<(Degree, Degree)> {
        // tail <= c [T_r(K) S_q + S_r T_q(L)], each half given tol / 2
        let total_x = basis_total(m, self.r);
        let total_w = basis_total(big_m, self.q);
        let k_cut = smallest_cutoff(m, self.r, tol / (2.0 * self.c * total_w))?;
        let l_cut = smallest_cutoff(big_m, self.q, tol / (2.0 * self.c * total_x))?;
        Some((k_cut, l_cut))
    }

    fn closed_form(
        &self,
        mask: &SupportMask,
        m: SphereDim,
        big_m: SphereDim,
        t: f64,
        s: f64,
    ) -> Option<f64> {
        let quadrants = mask.included_quadrants()?;
        // quadrant (i, j) = 1/4 sum_{sx, sw = +-1} sx^i sw^j G(sx r, t) H(sw q, s)
        let signs = [1.0f64, -1.0];
        let mut total = 0.0;
        for q in quadrants {
            let (i, j) = q.parities();
            for sx in signs {
                for sw in signs {
                    let weight = sx.powi(i as i32) * sw.powi(j as i32);
                    total += weight
                        * generating_function(m, sx * self.r, t)
                        * generating_function(big_m, sw * self.q, s);
                }
            }
        }
        Some(self.c * total / 4.0)
    }
}

/// One stored coefficient `a_{k,l} > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub k: Degree,
    pub l: Degree,
    pub a: f64,
}

#[derive(Debug, Clone)]
pub struct ParameterizedScheme {
    pub family: Arc<dyn CoefficientFamily>,
    pub mask: SupportMask,
}

#[derive(Debug, Clone)]
pub enum SchemeBody {
    /// Finitely many positive coefficients, sorted by `(k, l)`.
    Sparse(Vec<Term>),
    Parameterized(ParameterizedScheme),
}

/// The coefficients `a_{k,l}` of a kernel on `S^m x S^M`.
#[derive(Debug, Clone)]
pub struct CoefficientScheme {
    m: SphereDim,
    big_m: SphereDim,
    body: SchemeBody,
}

impl CoefficientScheme {
    /// Finite scheme from `(k, l, a)` triples. Every `a` must be finite and positive;
    /// zero coefficients are not part of `J_K` and must be omitted.
    pub fn sparse(
        m: SphereDim,
        big_m: SphereDim,
        entries: impl IntoIterator<Item = (Degree, Degree, f64)>,
    ) -> Result<Self> {
        let mut terms: Vec<Term> = entries
            .into_iter()
            .map(|(k, l, a)| Term { k, l, a })
            .collect();
        for term in &terms {
            if !(term.a.is_finite() && term.a > 0.0) {
                return Err(Error::InvalidScheme(format!(
                    "coefficient a[{},{}] = {} must be finite and positive",
                    term.k, term.l, term.a
                )));
            }
        }
        terms.sort_by_key(|t| (t.k, t.l));
        if let Some(w) = terms.windows(2).find(|w| (w[0].k, w[0].l) == (w[1].k, w[1].l)) {
            return Err(Error::InvalidScheme(format!(
                "duplicate coefficient for ({}, {})",
                w[0].k, w[0].l
            )));
        }
        Ok(CoefficientScheme {
            m,
            big_m,
            body: SchemeBody::Sparse(terms),
        })
    }

    pub fn geometric(
        m: SphereDim,
        big_m: SphereDim,
        c: f64,
        r: f64,
        q: f64,
        mask: SupportMask,
    ) -> Result<Self> {
        let family = GeometricFamily::new(c, r, q)?;
        Ok(Self::parameterized(m, big_m, Arc::new(family), mask))
    }

    pub fn parameterized(
        m: SphereDim,
        big_m: SphereDim,
        family: Arc<dyn CoefficientFamily>,
        mask: SupportMask,
    ) -> Self {
        CoefficientScheme {
            m,
            big_m,
            body: SchemeBody::Parameterized(ParameterizedScheme { family, mask }),
        }
    }

    pub fn m(&self) -> SphereDim {
        self.m
    }

    pub fn big_m(&self) -> SphereDim {
        self.big_m
    }

    pub fn body(&self) -> &SchemeBody {
        &self.body
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.body, SchemeBody::Sparse(_))
    }

    /// Stored terms of a sparse scheme.
    pub fn sparse_terms(&self) -> Result<&[Term]> {
        match &self.body {
            SchemeBody::Sparse(terms) => Ok(terms),
            SchemeBody::Parameterized(_) => Err(Error::RequiresSparse),
        }
    }

    /// `a_{k,l}`, zero outside `J_K`.
    pub fn coefficient(&self, k: Degree, l: Degree) -> f64 {
        match &self.body {
            SchemeBody::Sparse(terms) => terms
                .binary_search_by_key(&(k, l), |t| (t.k, t.l))
                .map_or(0.0, |i| terms[i].a),
            SchemeBody::Parameterized(p) => {
                if p.mask.contains(k, l) {
                    p.family.coefficient(k, l)
                } else {
                    0.0
                }
            }
        }
    }

    /// Finite term list whose neglected tail at `(1, 1)` is at most `tol`.
    pub fn evaluator(&self, tol: f64) -> Result<KernelEvaluator> {
        let (terms, neglected) = match &self.body {
            SchemeBody::Sparse(terms) => (terms.clone(), 0.0),
            SchemeBody::Parameterized(p) => {
                if tol.is_nan() || tol <= 0.0 {
                    return Err(Error::PreconditionFailed(format!(
                        "truncation tolerance must be positive, got {tol}"
                    )));
                }
                let (k_cut, l_cut) = p
                    .family
                    .truncation(self.m, self.big_m, tol)
                    .ok_or_else(|| Error::MissingTailBound(p.family.id().to_string()))?;
                let mut terms = Vec::new();
                for k in 0..k_cut {
                    for l in 0..l_cut {
                        if p.mask.contains(k, l) {
                            let a = p.family.coefficient(k, l);
                            if a > 0.0 {
                                terms.push(Term { k, l, a });
                            }
                        }
                    }
                }
                (terms, tol)
            }
        };
        Ok(KernelEvaluator::new(self.m, self.big_m, terms, neglected))
    }

    /// `K_r(t, s)` with neglected tail at most `tol` (exact for sparse schemes).
    pub fn eval(&self, t: f64, s: f64, tol: f64) -> Result<f64> {
        self.evaluator(tol)?.eval(t, s)
    }

    /// Summability certificate `sum a_{k,l} P_k^m(1) P_l^M(1)` over the terms kept at `tol`.
    pub fn certificate(&self, tol: f64) -> Result<f64> {
        Ok(self.evaluator(tol)?.value_at_ones())
    }

    /// Closed form of a parameterized kernel, when its family provides one.
    pub fn closed_form(&self, t: f64, s: f64) -> Option<f64> {
        match &self.body {
            SchemeBody::Sparse(_) => None,
            SchemeBody::Parameterized(p) => {
                p.family.closed_form(&p.mask, self.m, self.big_m, t, s)
            }
        }
    }

    /// The quadrant partition of `J_K` with unboundedness flags.
    pub fn index_quadrants(&self) -> Result<IndexQuadrants> {
        let quadrants = match &self.body {
            SchemeBody::Sparse(terms) => PerQuadrant::from_fn(|q| {
                let members: Vec<(Degree, Degree)> = terms
                    .iter()
                    .filter(|t| q.contains(t.k, t.l))
                    .map(|t| (t.k, t.l))
                    .collect();
                QuadrantInfo::finite(members)
            }),
            SchemeBody::Parameterized(p) => match &p.mask {
                SupportMask::Custom(custom) => custom_quadrants(custom)?,
                mask => {
                    let included = mask.included_quadrants().unwrap_or_default();
                    PerQuadrant::from_fn(|q| {
                        if included.contains(&q) {
                            QuadrantInfo {
                                membership: Membership::Infinite(format!(
                                    "every (k, l) with parity {q} ({} family)",
                                    p.family.id()
                                )),
                                flags: QuadrantFlags::FULL,
                                k_max: None,
                                l_max: None,
                            }
                        } else {
                            QuadrantInfo::finite(Vec::new())
                        }
                    })
                }
            },
        };
        Ok(IndexQuadrants::from_quadrants(quadrants))
    }
}

/// Checks declared custom-mask flags against membership in `[0, W]^2`, `W` = [`MASK_SAMPLE_WINDOW`].
///
/// An unbounded claim needs a sampled member beyond `W / 2` in that coordinate
/// (both coordinates for a joint claim); a bounded claim is rejected when a
/// member appears beyond `3 W / 4`.
fn custom_quadrants(custom: &CustomMask) -> Result<PerQuadrant<QuadrantInfo>> {
    let window = MASK_SAMPLE_WINDOW;
    let half = window / 2;
    let late = 3 * window / 4;
    let mut members: PerQuadrant<Vec<(Degree, Degree)>> = PerQuadrant::default();
    for k in 0..=window {
        for l in 0..=window {
            if custom.contains(k, l) {
                members[Quadrant::of(k, l)].push((k, l));
            }
        }
    }
    let mut out = Vec::with_capacity(4);
    for q in Quadrant::ALL {
        let flags = custom.declared()[q];
        let seen = &members[q];
        let fail = |what: &str| {
            Err(Error::MaskInconsistent(format!(
                "mask `{}`, quadrant {q}: {what}",
                custom.label()
            )))
        };
        if flags.joint_unbounded && !(flags.k_unbounded && flags.l_unbounded) {
            return fail("joint_unbounded requires both k and l unbounded");
        }
        let max_k = seen.iter().map(|p| p.0).max();
        let max_l = seen.iter().map(|p| p.1).max();
        let max_min = seen.iter().map(|p| p.0.min(p.1)).max();
        let reaches = |v: Option<Degree>, bound: Degree| v.is_some_and(|v| v >= bound);
        let passes = |v: Option<Degree>, bound: Degree| v.is_some_and(|v| v > bound);
        if flags.k_unbounded && !reaches(max_k, half) {
            return fail("k declared unbounded but no sampled member has large k");
        }
        if flags.l_unbounded && !reaches(max_l, half) {
            return fail("l declared unbounded but no sampled member has large l");
        }
        if flags.joint_unbounded && !reaches(max_min, half) {
            return fail("declared jointly unbounded but no sampled member has both indices large");
        }
        if !flags.k_unbounded && passes(max_k, late) {
            return fail("k declared bounded but sampled members keep growing in k");
        }
        if !flags.l_unbounded && passes(max_l, late) {
            return fail("l declared bounded but sampled members keep growing in l");
        }
        if !flags.joint_unbounded && passes(max_min, late) {
            return fail("declared not jointly unbounded but sampled members grow in both indices");
        }
        let info = if flags.infinite() {
            QuadrantInfo {
                membership: Membership::Infinite(format!("custom mask `{}`", custom.label())),
                flags,
                k_max: if flags.k_unbounded { None } else { max_k },
                l_max: if flags.l_unbounded { None } else { max_l },
            }
        } else {
            QuadrantInfo::finite(seen.clone())
        };
        out.push(info);
    }
    let mut it = out.into_iter();
    Ok(PerQuadrant::from_fn(|_| it.next().expect("four quadrants")))
}

/// Description of the members of one quadrant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    Finite(Vec<(Degree, Degree)>),
    Infinite(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadrantInfo {
    pub membership: Membership,
    pub flags: QuadrantFlags,
    /// Largest `k` in the quadrant when the `k` coordinates are bounded and the quadrant is nonempty.
    pub k_max: Option<Degree>,
    /// Largest `l`, same convention.
    pub l_max: Option<Degree>,
}

impl QuadrantInfo {
    fn finite(members: Vec<(Degree, Degree)>) -> Self {
        QuadrantInfo {
            k_max: members.iter().map(|p| p.0).max(),
            l_max: members.iter().map(|p| p.1).max(),
            membership: Membership::Finite(members),
            flags: QuadrantFlags::BOUNDED,
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(&self.membership, Membership::Finite(v) if v.is_empty())
    }
}

/// The four sets `J_K^{i,j}` and the parity-class infinitude flags of `J_K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexQuadrants {
    pub quadrants: PerQuadrant<QuadrantInfo>,
    /// `{(k, l) in J_K : k + l even}` is infinite.
    pub even_sum_infinite: bool,
    /// `{(k, l) in J_K : k + l odd}` is infinite.
    pub odd_sum_infinite: bool,
}

impl IndexQuadrants {
    fn from_quadrants(quadrants: PerQuadrant<QuadrantInfo>) -> Self {
        let inf = |q: Quadrant| quadrants[q].flags.infinite();
        IndexQuadrants {
            even_sum_infinite: inf(Quadrant::EvenEven) || inf(Quadrant::OddOdd),
            odd_sum_infinite: inf(Quadrant::OddEven) || inf(Quadrant::EvenOdd),
            quadrants,
        }
    }

    pub fn joint_unbounded(&self) -> PerQuadrant<bool> {
        self.quadrants.map(|_, info| info.flags.joint_unbounded)
    }
}

/// A finite list of terms ready for repeated evaluation.
#[derive(Debug, Clone)]
pub struct KernelEvaluator {
    m: SphereDim,
    big_m: SphereDim,
    terms: Vec<Term>,
    k_top: Degree,
    l_top: Degree,
    neglected: f64,
}

impl KernelEvaluator {
    fn new(m: SphereDim, big_m: SphereDim, terms: Vec<Term>, neglected: f64) -> Self {
        let k_top = terms.iter().map(|t| t.k).max().unwrap_or(0);
        let l_top = terms.iter().map(|t| t.l).max().unwrap_or(0);
        KernelEvaluator {
            m,
            big_m,
            terms,
            k_top,
            l_top,
            neglected,
        }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn dims(&self) -> (SphereDim, SphereDim) {
        (self.m, self.big_m)
    }

    /// Upper bound on the dropped part of the series at `(1, 1)`.
    pub fn neglected_tail(&self) -> f64 {
        self.neglected
    }

    pub fn eval(&self, t: f64, s: f64) -> Result<f64> {
        let t = clamp_argument(t)?;
        let s = clamp_argument(s)?;
        let mut pt = vec![0.0; self.k_top + 1];
        let mut ps = vec![0.0; self.l_top + 1];
        fill_basis(self.m, t, &mut pt);
        fill_basis(self.big_m, s, &mut ps);
        Ok(self.terms.iter().map(|term| term.a * pt[term.k] * ps[term.l]).sum())
    }

    /// `sum a_{k,l} P_k^m(1) P_l^M(1)` over the kept terms.
    pub fn value_at_ones(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.a * basis_value_at_one(t.k, self.m) * basis_value_at_one(t.l, self.big_m))
            .sum()
    }
}

/// `K_r(t, s)` for `scheme`, truncated to a neglected tail of at most `tol`.
pub fn eval_kernel(scheme: &CoefficientScheme, t: f64, s: f64, tol: f64) -> Result<f64> {
    scheme.eval(t, s, tol)
}

/// Coefficients `a_{k,l}`, `k <= kmax`, `l <= lmax`, of a black-box kernel on
/// `[-1, 1]^2`, by tensor Gauss quadrature with `kmax + lmax + 8` nodes per axis.
pub fn project_coefficients<F>(
    kernel: F,
    m: SphereDim,
    big_m: SphereDim,
    kmax: Degree,
    lmax: Degree,
) -> Result<DMatrix<f64>>
where
    F: Fn(f64, f64) -> f64,
{
    let nodes = kmax + lmax + 8;
    let rule_x = gegenbauer::quadrature_rule(m, nodes)?;
    let rule_w = gegenbauer::quadrature_rule(big_m, nodes)?;
    let basis_matrix = |dim: SphereDim, nodes: &[f64], top: Degree| {
        let mut out = DMatrix::<f64>::zeros(nodes.len(), top + 1);
        let mut row = vec![0.0; top + 1];
        for (i, &t) in nodes.iter().enumerate() {
            fill_basis(dim, t, &mut row);
            for (j, v) in row.iter().enumerate() {
                out[(i, j)] = *v;
            }
        }
        out
    };
    let px = basis_matrix(m, rule_x.nodes(), kmax);
    let pw = basis_matrix(big_m, rule_w.nodes(), lmax);
    let weighted = DMatrix::from_fn(nodes, nodes, |i, j| {
        rule_x.weights()[i] * rule_w.weights()[j] * kernel(rule_x.nodes()[i], rule_w.nodes()[j])
    });
    let mut coeffs = px.transpose() * weighted * pw;
    for k in 0..=kmax {
        let hk = gegenbauer::orthogonality_constant(k, m)?;
        for l in 0..=lmax {
            coeffs[(k, l)] /= hk * gegenbauer::orthogonality_constant(l, big_m)?;
        }
    }
    Ok(coeffs)
}

/// Single-sphere coefficients `b_n` of `t -> K_r(t, t)` in `P_n^{m ∧ M}`.
pub fn restrict_diagonal(scheme: &CoefficientScheme) -> Result<ExpansionCoefficients> {
    let terms = scheme.sparse_terms()?;
    let target = scheme.m().meet(scheme.big_m());
    target.require_finite()?;
    scheme.big_m().require_finite()?;
    let top = terms.iter().map(|t| t.k + t.l).max().unwrap_or(0);
    let mut b = vec![0.0; top + 1];
    let mut used = vec![false; top + 1];
    for term in terms {
        let alpha = gegenbauer::linearization(term.k, term.l, scheme.m(), scheme.big_m())?;
        for &(d, v) in &alpha.entries {
            b[d] += term.a * v;
            used[d] = true;
        }
    }
    let entries = (0..=top).rev().filter(|&d| used[d]).map(|d| (d, b[d])).collect();
    ExpansionCoefficients::new(Basis::Gegenbauer(target), entries)
}
