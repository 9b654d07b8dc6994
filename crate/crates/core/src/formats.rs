//! JSON formats for models, filtrations and exported bodies. Exact rationals are `"p/q"` strings.

use std::path::Path;
use std::sync::Arc;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filtrations::{AffinePiece, WeightFiltration};
use crate::lattice::rational::{format_rational, parse_rational, Rational};
use crate::lattice::{Halfspace, RationalPolytope};
use crate::models::{FlagMap, ToricModel};

/// `#[serde(with = "rational_string")]` for a single [`Rational`].
pub mod rational_string {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InequalitySpec {
    pub a: Vec<String>,
    pub b: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlagMapSpec {
    pub matrix: Vec<Vec<i64>>,
    #[serde(default)]
    pub translation: Option<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Projective,
    Polytope,
}

/// `{ "type": "projective"|"polytope", "d", "k", "hrep"/"vertices", "flag_map" }`.
///
/// `hrep` rows read `⟨a, x⟩ >= b`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSpec {
    #[serde(rename = "type")]
    pub kind: ModelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hrep: Option<Vec<InequalitySpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flag_map: Option<FlagMapSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiltrationSpec {
    pub pieces: Vec<InequalitySpec>,
}

fn parse_field(field: &str, s: &str) -> Result<Rational> {
    parse_rational(s).map_err(|_| Error::Parse {
        field: field.into(),
        value: s.into(),
    })
}

fn parse_vec(field: &str, v: &[String]) -> Result<Vec<Rational>> {
    v.iter()
        .enumerate()
        .map(|(i, s)| parse_field(&format!("{field}[{i}]"), s))
        .collect()
}

fn strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

fn parse_json<T: for<'de> Deserialize<'de>>(what: &str, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        field: what.into(),
        value: e.to_string(),
    })
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse {
        field: "path".into(),
        value: format!("{}: {e}", path.display()),
    })
}

fn dim_of(spec: &ModelSpec) -> Result<usize> {
    if let Some(d) = spec.d {
        return Ok(d);
    }
    let from_rows = spec
        .hrep
        .as_ref()
        .and_then(|h| h.first())
        .map(|r| r.a.len())
        .or_else(|| spec.vertices.as_ref().and_then(|v| v.first()).map(Vec::len));
    from_rows.ok_or_else(|| Error::Parse {
        field: "d".into(),
        value: "missing".into(),
    })
}

impl FlagMapSpec {
    pub fn to_flag(&self, d: usize) -> Result<FlagMap> {
        let matrix: Vec<Vec<BigInt>> = self
            .matrix
            .iter()
            .map(|row| row.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        let translation = self
            .translation
            .clone()
            .unwrap_or_else(|| vec![0; d])
            .into_iter()
            .map(BigInt::from)
            .collect();
        FlagMap::new(matrix, translation)
    }

    pub fn from_flag(flag: &FlagMap) -> Result<Self> {
        let small = |x: &BigInt| {
            i64::try_from(x).map_err(|_| Error::OutOfRange {
                what: "flag_map entry".into(),
                constraint: "fits in i64".into(),
                value: x.to_string(),
            })
        };
        Ok(Self {
            matrix: flag
                .matrix()
                .iter()
                .map(|row| row.iter().map(small).collect())
                .collect::<Result<_>>()?,
            translation: Some(
                flag.translation()
                    .iter()
                    .map(small)
                    .collect::<Result<_>>()?,
            ),
        })
    }
}

impl ModelSpec {
    pub fn to_model(&self) -> Result<ToricModel> {
        let d = dim_of(self)?;
        let flag = match &self.flag_map {
            Some(f) => f.to_flag(d)?,
            None => FlagMap::identity(d),
        };
        match self.kind {
            ModelKind::Projective => {
                let k = self.k.unwrap_or(1);
                ToricModel::projective_space(d, k)?.with_flag(flag)
            }
            ModelKind::Polytope => match (&self.hrep, &self.vertices) {
                (Some(rows), _) => {
                    let hrep = rows
                        .iter()
                        .enumerate()
                        .map(|(i, r)| {
                            Ok(Halfspace::new(
                                parse_vec(&format!("hrep[{i}].a"), &r.a)?,
                                parse_field(&format!("hrep[{i}].b"), &r.b)?,
                            ))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    ToricModel::from_hrep(d, hrep, flag)
                }
                (None, Some(vs)) => {
                    let pts = vs
                        .iter()
                        .enumerate()
                        .map(|(i, v)| parse_vec(&format!("vertices[{i}]"), v))
                        .collect::<Result<Vec<_>>>()?;
                    ToricModel::from_vertices(d, &pts, flag)
                }
                (None, None) => Err(Error::Parse {
                    field: "hrep/vertices".into(),
                    value: "missing".into(),
                }),
            },
        }
    }

    /// Describes `model` by its vertices and flag map.
    pub fn from_model(model: &ToricModel) -> Result<Self> {
        Ok(Self {
            kind: ModelKind::Polytope,
            d: Some(model.dim()),
            k: None,
            hrep: None,
            vertices: Some(
                model
                    .polytope()
                    .vertices()
                    .iter()
                    .map(|v| strings(v))
                    .collect(),
            ),
            flag_map: if model.flag_map().is_identity() {
                None
            } else {
                Some(FlagMapSpec::from_flag(model.flag_map())?)
            },
        })
    }
}

impl FiltrationSpec {
    pub fn to_filtration(&self, model: Arc<ToricModel>) -> Result<WeightFiltration> {
        let pieces = self
            .pieces
            .iter()
            .enumerate()
            .map(|(i, p)| {
                Ok(AffinePiece::new(
                    parse_vec(&format!("pieces[{i}].a"), &p.a)?,
                    parse_field(&format!("pieces[{i}].b"), &p.b)?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        WeightFiltration::new(model, pieces)
    }

    pub fn from_filtration(filt: &WeightFiltration) -> Self {
        Self {
            pieces: filt
                .pieces()
                .iter()
                .map(|p| InequalitySpec {
                    a: strings(&p.a),
                    b: format_rational(&p.b),
                })
                .collect(),
        }
    }
}

pub fn parse_model(text: &str) -> Result<ToricModel> {
    parse_json::<ModelSpec>("model", text)?.to_model()
}

pub fn parse_filtration(text: &str, model: Arc<ToricModel>) -> Result<WeightFiltration> {
    parse_json::<FiltrationSpec>("filtration", text)?.to_filtration(model)
}

pub fn load_model(path: &Path) -> Result<ToricModel> {
    parse_model(&read(path)?)
}

pub fn load_filtration(path: &Path, model: Arc<ToricModel>) -> Result<WeightFiltration> {
    parse_filtration(&read(path)?, model)
}

/// Exported polytope: vertices and irredundant inequalities, reloadable as a polytope model
/// when the vertices are integral.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BodyExport {
    #[serde(rename = "type")]
    pub kind: ModelKind,
    pub d: usize,
    pub volume: String,
    pub vertices: Vec<Vec<String>>,
    pub hrep: Vec<InequalitySpec>,
}

impl BodyExport {
    pub fn new(p: &RationalPolytope) -> Self {
        Self {
            kind: ModelKind::Polytope,
            d: p.dim(),
            volume: format_rational(&p.volume()),
            vertices: p.vertices().iter().map(|v| strings(v)).collect(),
            hrep: p
                .facets()
                .iter()
                .map(|h| InequalitySpec {
                    a: strings(&h.normal),
                    b: format_rational(&h.offset),
                })
                .collect(),
        }
    }

    pub fn to_polytope(&self) -> Result<RationalPolytope> {
        let pts = self
            .vertices
            .iter()
            .enumerate()
            .map(|(i, v)| parse_vec(&format!("vertices[{i}]"), v))
            .collect::<Result<Vec<_>>>()?;
        RationalPolytope::from_vertices(self.d, &pts)
    }
}

pub fn parse_body(text: &str) -> Result<RationalPolytope> {
    parse_json::<BodyExport>("body", text)?.to_polytope()
}
