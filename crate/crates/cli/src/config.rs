//! Kernel configuration, point files and projection sample grids.

use std::collections::BTreeSet;
use std::path::Path;

use serde::Deserialize;
use spherekern::gegenbauer::SphereDim;
use spherekern::geometry::{ProductPoint, ProductPointSet};
use spherekern::kernel::{CoefficientScheme, Quadrant, SupportMask};

use crate::failure::Failure;

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum DimSpec {
    Int(i64),
    Text(String),
}

impl DimSpec {
    pub fn resolve(&self, field: &str) -> Result<SphereDim, Failure> {
        match self {
            DimSpec::Int(m) => SphereDim::finite(*m).map_err(|e| Failure::from(e).context(field)),
            DimSpec::Text(t) if matches!(t.as_str(), "inf" | "infinity") => Ok(SphereDim::INFINITY),
            DimSpec::Text(t) => Err(Failure::parse(format!(
                "field `{field}`: expected an integer or \"inf\", found \"{t}\""
            ))),
        }
    }
}

impl std::str::FromStr for DimSpec {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s.parse::<i64>() {
            Ok(m) => DimSpec::Int(m),
            Err(_) => DimSpec::Text(s.to_string()),
        })
    }
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum MaskSpec {
    Named(String),
    Quadrants(Vec<(u8, u8)>),
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum SchemeSpec {
    Sparse {
        entries: Vec<(usize, usize, f64)>,
    },
    Geometric {
        #[serde(default = "one")]
        c: f64,
        r: f64,
        q: f64,
        #[serde(default)]
        mask: Option<MaskSpec>,
    },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TruncationSpec {
    tol: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigSpec {
    m: DimSpec,
    #[serde(rename = "M")]
    big_m: DimSpec,
    scheme: SchemeSpec,
    #[serde(default)]
    truncation: Option<TruncationSpec>,
}

/// A validated kernel configuration.
#[derive(Debug)]
pub struct Config {
    pub scheme: CoefficientScheme,
    /// Truncation tolerance from the file, if given.
    pub tol: Option<f64>,
}

pub fn read_file(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| Failure::parse(format!("cannot read {}: {e}", path.display())))
}

fn parse_json<'a, T: Deserialize<'a>>(bytes: &'a [u8], what: &str) -> Result<T, Failure> {
    serde_json::from_slice(bytes).map_err(|e| Failure::parse(format!("{what}: {e}")))
}

fn mask_from(spec: Option<MaskSpec>) -> Result<SupportMask, Failure> {
    Ok(match spec {
        None => SupportMask::All,
        Some(MaskSpec::Named(name)) => match name.as_str() {
            "all" => SupportMask::All,
            "even_sum" => SupportMask::EvenSum,
            "odd_sum" => SupportMask::OddSum,
            other => {
                return Err(Failure::parse(format!(
                    "field `scheme.mask`: unknown mask \"{other}\" (expected all, even_sum, odd_sum or a list of [i, j])"
                )))
            }
        },
        Some(MaskSpec::Quadrants(list)) => {
            let mut set = BTreeSet::new();
            for (idx, (i, j)) in list.into_iter().enumerate() {
                if i > 1 || j > 1 {
                    return Err(Failure::parse(format!(
                        "field `scheme.mask[{idx}]`: parities must be 0 or 1, found [{i}, {j}]"
                    )));
                }
                set.insert(Quadrant::from_parities(i.into(), j.into()));
            }
            SupportMask::Quadrants(set)
        }
    })
}

pub fn parse_config(bytes: &[u8]) -> Result<Config, Failure> {
    let spec: ConfigSpec = parse_json(bytes, "config")?;
    let m = spec.m.resolve("m")?;
    let big_m = spec.big_m.resolve("M")?;
    let scheme = match spec.scheme {
        SchemeSpec::Sparse { entries } => CoefficientScheme::sparse(m, big_m, entries),
        SchemeSpec::Geometric { c, r, q, mask } => {
            CoefficientScheme::geometric(m, big_m, c, r, q, mask_from(mask)?)
        }
    }
    .map_err(|e| Failure::from(e).context("scheme"))?;
    let tol = match spec.truncation {
        Some(TruncationSpec { tol }) if !(tol > 0.0 && tol.is_finite()) => {
            return Err(Failure::parse(format!(
                "field `truncation.tol`: must be positive, found {tol}"
            )))
        }
        Some(t) => Some(t.tol),
        None => None,
    };
    Ok(Config { scheme, tol })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PointSpec {
    x: Vec<f64>,
    w: Vec<f64>,
}

pub fn parse_points(bytes: &[u8], m: SphereDim, big_m: SphereDim) -> Result<ProductPointSet, Failure> {
    let raw: Vec<PointSpec> = parse_json(bytes, "points")?;
    let points = raw.into_iter().map(|p| ProductPoint::new(p.x, p.w)).collect();
    ProductPointSet::new(m, big_m, points).map_err(|e| Failure::from(e).context("points"))
}

/// Kernel values `values[i][j] = K(t[i], s[j])` on a rectangular grid.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleGrid {
    pub t: Vec<f64>,
    pub s: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

pub fn parse_samples(bytes: &[u8]) -> Result<SampleGrid, Failure> {
    let grid: SampleGrid = parse_json(bytes, "samples")?;
    if grid.values.len() != grid.t.len() {
        return Err(Failure::parse(format!(
            "field `values`: {} rows for {} values of t",
            grid.values.len(),
            grid.t.len()
        )));
    }
    if let Some((i, row)) = grid.values.iter().enumerate().find(|(_, r)| r.len() != grid.s.len()) {
        return Err(Failure::parse(format!(
            "field `values[{i}]`: {} entries for {} values of s",
            row.len(),
            grid.s.len()
        )));
    }
    Ok(grid)
}
