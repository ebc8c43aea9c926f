//! Global cohomology from a finite good cover.
//!
//! Each chart and each nonempty overlap contributes its exterior-algebra
//! model; the Čech differential is built from the induced restriction maps and
//! the column differential is zero. Total cohomology of that double complex is
//! the cohomology of the space for the supported gluing classes.

mod complex;
mod refine;

pub use complex::{
    build_compact_complex, build_total_complex, pd_symmetry_check, total_betti, total_compact_betti, BettiTable,
    Block, DualityReport, TotalComplex,
};
pub use refine::{family_h1_check, refinement_manifest, FamilyProjection, FamilyReport};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::chart::{chart_cohomology, restriction_map, ChartModel, ChartSignature, RestrictionMap};
use crate::error::{Error, ManifestIssue, Result};
use crate::lattice::{IntegerMatrix, QMatrix, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GluingClass {
    /// Every polytope has full unbounded span; only the nerve survives.
    Quadrant,
    /// Constant-coefficient monomial transition maps.
    PureMonomial,
    /// Monomial maps with non-constant coefficients; refused.
    General,
}

impl fmt::Display for GluingClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GluingClass::Quadrant => "quadrant",
            GluingClass::PureMonomial => "pure-monomial",
            GluingClass::General => "general",
        })
    }
}

impl FromStr for GluingClass {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "quadrant" | "quadrant-class" => Ok(GluingClass::Quadrant),
            "pure-monomial" | "monomial" => Ok(GluingClass::PureMonomial),
            "general" => Ok(GluingClass::General),
            other => Err(format!("unknown gluing class `{other}`")),
        }
    }
}

/// A nonempty intersection of two or more charts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Overlap {
    pub signature: ChartSignature,
    /// Exponent matrix `m_i x m_I` of the inclusion into each member chart `i`.
    pub maps: BTreeMap<String, IntegerMatrix>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverManifest {
    pub charts: BTreeMap<String, ChartSignature>,
    /// Keyed by the sorted member ids; unlisted subsets are empty.
    pub overlaps: BTreeMap<Vec<String>, Overlap>,
    pub gluing_class: GluingClass,
    pub oriented: bool,
}

impl CoverManifest {
    pub fn new(gluing_class: GluingClass) -> Self {
        CoverManifest { charts: BTreeMap::new(), overlaps: BTreeMap::new(), gluing_class, oriented: true }
    }

    pub fn add_chart(&mut self, id: impl Into<String>, sig: ChartSignature) -> &mut Self {
        self.charts.insert(id.into(), sig);
        self
    }

    pub fn add_overlap<S: AsRef<str>>(
        &mut self,
        members: &[S],
        sig: ChartSignature,
        maps: &[(S, IntegerMatrix)],
    ) -> &mut Self {
        let mut key: Vec<String> = members.iter().map(|s| s.as_ref().to_string()).collect();
        key.sort();
        let maps = maps.iter().map(|(id, a)| (id.as_ref().to_string(), a.clone())).collect();
        self.overlaps.insert(key, Overlap { signature: sig, maps });
        self
    }

    /// Same manifest with chart ids renamed by `f`.
    pub fn relabel(&self, f: impl Fn(&str) -> String) -> CoverManifest {
        let charts = self.charts.iter().map(|(k, v)| (f(k), v.clone())).collect();
        let overlaps = self
            .overlaps
            .iter()
            .map(|(k, o)| {
                let mut key: Vec<String> = k.iter().map(|s| f(s)).collect();
                key.sort();
                let maps = o.maps.iter().map(|(id, a)| (f(id), a.clone())).collect();
                (key, Overlap { signature: o.signature.clone(), maps })
            })
            .collect();
        CoverManifest { charts, overlaps, gluing_class: self.gluing_class, oriented: self.oriented }
    }
}

/// A manifest that passed every structural check, with its models and all
/// restriction maps between nerve simplices precomputed.
#[derive(Clone, Debug)]
pub struct ValidatedManifest {
    pub manifest: CoverManifest,
    pub dimension: usize,
    /// Nerve simplices as sorted index tuples into `ids`, grouped by size - 1.
    pub simplices: Vec<Vec<Vec<usize>>>,
    pub ids: Vec<String>,
    pub models: BTreeMap<Vec<usize>, ChartModel>,
    /// `(face, simplex)` with `face` one vertex smaller.
    pub restrictions: BTreeMap<(Vec<usize>, Vec<usize>), RestrictionMap>,
}

impl ValidatedManifest {
    pub fn signature(&self, simplex: &[usize]) -> &ChartSignature {
        &self.models[simplex].signature
    }
}

pub fn validate_manifest(m: &CoverManifest) -> Result<ValidatedManifest> {
    let mut issues = Vec::new();
    let ids: Vec<String> = m.charts.keys().cloned().collect();
    let index: BTreeMap<&str, usize> = ids.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();

    let expected = m.charts.values().next().map(ChartSignature::total_dim).unwrap_or(0);
    let mut all: Vec<(Vec<String>, &ChartSignature)> =
        m.charts.iter().map(|(id, s)| (vec![id.clone()], s)).collect();
    all.extend(m.overlaps.iter().map(|(k, o)| (k.clone(), &o.signature)));

    for (subset, sig) in &all {
        if sig.total_dim() != expected {
            issues.push(ManifestIssue::DimensionMismatch {
                subset: subset.clone(),
                expected,
                found: sig.total_dim(),
            });
        }
        if sig.polytope.is_empty() {
            issues.push(ManifestIssue::EmptyPolytope { subset: subset.clone() });
        }
    }

    for (subset, o) in &m.overlaps {
        if subset.len() < 2 {
            issues.push(ManifestIssue::TrivialOverlap { subset: subset.clone() });
            continue;
        }
        for id in subset {
            if !index.contains_key(id.as_str()) {
                issues.push(ManifestIssue::UnknownChart { subset: subset.clone(), chart: id.clone() });
            } else if !o.maps.contains_key(id) {
                issues.push(ManifestIssue::MissingMap { subset: subset.clone(), chart: id.clone() });
            }
        }
        for id in o.maps.keys() {
            if !subset.contains(id) {
                issues.push(ManifestIssue::BadGluing {
                    subset: subset.clone(),
                    chart: id.clone(),
                    reason: "chart is not a member of this overlap".into(),
                });
            }
        }
        if subset.len() > 2 {
            for skip in 0..subset.len() {
                let face: Vec<String> =
                    subset.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, s)| s.clone()).collect();
                if !m.overlaps.contains_key(&face) {
                    issues.push(ManifestIssue::InconsistentNerve { subset: subset.clone(), missing: face });
                }
            }
        }
    }
    if !issues.is_empty() {
        return Err(Error::InvalidManifest(issues));
    }

    let mut models = BTreeMap::new();
    for (subset, sig) in &all {
        let key: Vec<usize> = subset.iter().map(|s| index[s.as_str()]).collect();
        let model = chart_cohomology(sig)?;
        if m.gluing_class == GluingClass::Quadrant && model.k != sig.m() {
            issues.push(ManifestIssue::NotQuadrant { subset: subset.clone(), k: model.k, m: sig.m() });
        }
        models.insert(key, model);
    }

    let mut restrictions = BTreeMap::new();
    for (subset, o) in &m.overlaps {
        let key: Vec<usize> = subset.iter().map(|s| index[s.as_str()]).collect();
        for skip in 0..key.len() {
            let face: Vec<usize> = key.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect();
            let exponents = if face.len() == 1 {
                Ok(o.maps[&ids[face[0]]].clone())
            } else {
                derived_exponents(m, &ids, &face, &models[&face], o)
            };
            let chart = ids[key[skip]].clone();
            match exponents.and_then(|a| restriction_map(&models[&face], &models[&key], &a)) {
                Ok(r) => {
                    restrictions.insert((face, key.clone()), r);
                }
                Err(e) => issues.push(ManifestIssue::BadGluing {
                    subset: subset.clone(),
                    chart: if face.len() == 1 { ids[face[0]].clone() } else { format!("overlap without {chart}") },
                    reason: e.to_string(),
                }),
            }
        }
    }
    if !issues.is_empty() {
        return Err(Error::InvalidManifest(issues));
    }

    let mut simplices: Vec<Vec<Vec<usize>>> = Vec::new();
    let keys: BTreeSet<Vec<usize>> = models.keys().cloned().collect();
    for k in keys {
        let p = k.len() - 1;
        if simplices.len() <= p {
            simplices.resize(p + 1, Vec::new());
        }
        simplices[p].push(k);
    }
    Ok(ValidatedManifest { manifest: m.clone(), dimension: expected, simplices, ids, models, restrictions })
}

/// Exponents of the inclusion `U_J -> U_I` (`I` a face of `J`, `|I| >= 2`),
/// recovered from the maps of both into the charts of `I`.
///
/// Solves `A_{i,I} X = A_{i,J}` for all `i` in `I` simultaneously. When the
/// stacked system is underdetermined, the induced `H^1` map is still well
/// defined provided every class of `U_I` is a combination of pulled-back
/// chart classes, which is checked.
fn derived_exponents(
    m: &CoverManifest,
    ids: &[String],
    face: &[usize],
    face_model: &ChartModel,
    simplex: &Overlap,
) -> Result<IntegerMatrix> {
    let face_key: Vec<String> = face.iter().map(|&i| ids[i].clone()).collect();
    let face_overlap = &m.overlaps[&face_key];
    let mi = face_overlap.signature.m();
    let mj = simplex.signature.m();
    let mut lhs: Option<QMatrix> = None;
    let mut rhs: Option<QMatrix> = None;
    for id in &face_key {
        let a_face = face_overlap.maps[id].to_rational();
        let a_simplex = simplex.maps[id].to_rational();
        if a_face.cols() != mi || a_simplex.cols() != mj || a_face.rows() != a_simplex.rows() {
            return Err(Error::ShapeError {
                expected: (a_face.rows(), mj),
                found: (a_simplex.rows(), a_simplex.cols()),
            });
        }
        lhs = Some(match lhs {
            None => a_face,
            Some(l) => l.vstack(&a_face),
        });
        rhs = Some(match rhs {
            None => a_simplex,
            Some(r) => r.vstack(&a_simplex),
        });
    }
    let (lhs, rhs) = (lhs.expect("face is nonempty"), rhs.expect("face is nonempty"));
    let x = lhs
        .solve(&rhs)
        .ok_or_else(|| Error::GluingError("maps into the member charts do not factor through the overlap".into()))?;
    if lhs.rank() < mi {
        let rows = lhs.rank();
        for c in face_model.generators() {
            let cv: Vec<Rat> = c.iter().map(|v| Rat::from_integer(v.clone())).collect();
            let stacked = lhs.vstack(&QMatrix::from_rows(vec![cv], mi));
            if stacked.transpose().rank() > rows {
                return Err(Error::GluingError(
                    "overlap classes are not determined by the member charts".into(),
                ));
            }
        }
    }
    x.to_integer()
        .ok_or_else(|| Error::GluingError("inclusion between overlaps has non-integral exponents".into()))
}
