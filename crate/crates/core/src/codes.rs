//! Linear codes from arcs.  The 3 x k matrix of arc-point coordinates
//! generates a [k, 3, k - n] code, where n is the largest line intersection;
//! the arc is complete exactly when the code cannot be lengthened.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::analysis::{extend_and_recheck, AnalysisError, CharacterSpectrum, PairCensus, ScanMode};
use crate::curves::PlaneArc;
use crate::finite_field::{Elem, FieldContext};

/// Codeword enumeration visits at most this many (functional, column) pairs.
pub const ENUMERATION_WORK_LIMIT: u64 = 1 << 29;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodeError {
    #[error("arc points are collinear; the matrix has rank below 3")]
    Collinear,
    #[error("codeword enumeration needs {work} steps (limit {limit}) and no spectrum was supplied")]
    BoundExceeded { work: u64, limit: u64 },
    #[error("the two distance computations disagree: enumeration {enumeration}, spectrum {spectrum}")]
    Disagreement { enumeration: u64, spectrum: u64 },
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

#[derive(Clone, Debug)]
pub struct ArcCode {
    field: Arc<FieldContext>,
    columns: Vec<[Elem; 3]>,
}

/// Rank of a list of vectors in GF(Q)^3.
fn rank3(f: &FieldContext, rows: &[[Elem; 3]]) -> usize {
    let mut basis: Vec<[Elem; 3]> = Vec::new();
    for r in rows {
        let mut v = *r;
        for b in &basis {
            let pivot = b.iter().position(|x| !x.is_zero()).expect("basis rows are nonzero");
            if !v[pivot].is_zero() {
                let c = f.div(v[pivot], b[pivot]).expect("pivot is nonzero");
                for i in 0..3 {
                    v[i] = f.sub(v[i], f.mul(c, b[i]));
                }
            }
        }
        if v.iter().any(|x| !x.is_zero()) {
            basis.push(v);
            if basis.len() == 3 {
                break;
            }
        }
    }
    basis.len()
}

/// Columns are the normalized arc points in arc index order.
pub fn code_from_arc(arc: &PlaneArc) -> Result<ArcCode, CodeError> {
    let columns: Vec<[Elem; 3]> = arc.points().into_iter().map(|p| p.0).collect();
    let field = arc.plane().field().clone();
    if rank3(&field, &columns) < 3 {
        return Err(CodeError::Collinear);
    }
    Ok(ArcCode { field, columns })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub enumeration: Option<u64>,
    pub spectrum: Option<u64>,
    pub d: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeParameters {
    pub k: u64,
    pub dim: u64,
    pub d: u64,
}

impl ArcCode {
    pub fn field(&self) -> &Arc<FieldContext> {
        &self.field
    }

    pub fn length(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[[Elem; 3]] {
        &self.columns
    }

    pub fn rank(&self) -> usize {
        rank3(&self.field, &self.columns)
    }

    /// Minimum weight over all nonzero codewords `(f(c_1), ..., f(c_k))`.
    pub fn min_distance_by_enumeration(&self) -> Result<u64, CodeError> {
        let q = self.field.order();
        let k = self.columns.len() as u64;
        let work = q.saturating_pow(3).saturating_mul(k);
        if work > ENUMERATION_WORK_LIMIT {
            return Err(CodeError::BoundExceeded { work, limit: ENUMERATION_WORK_LIMIT });
        }
        let f = &self.field;
        let weight = |code: u64| -> u64 {
            let u = f.element(code % q).expect("in range");
            let v = f.element(code / q % q).expect("in range");
            let w = f.element(code / (q * q)).expect("in range");
            self.columns
                .iter()
                .filter(|c| !f.add(f.add(f.mul(u, c[0]), f.mul(v, c[1])), f.mul(w, c[2])).is_zero())
                .count() as u64
        };
        Ok((1..q * q * q).into_par_iter().map(weight).min().expect("q^3 > 1"))
    }

    /// `d` by enumeration when affordable and as `k - n` when a spectrum is
    /// given; both must agree when both are available.
    pub fn min_distance(&self, spectrum: Option<&CharacterSpectrum>) -> Result<DistanceReport, CodeError> {
        let by_spectrum = spectrum.map(|s| self.columns.len() as u64 - s.n() as u64);
        let enumeration = match self.min_distance_by_enumeration() {
            Ok(d) => Some(d),
            Err(e @ CodeError::BoundExceeded { .. }) if by_spectrum.is_none() => return Err(e),
            Err(CodeError::BoundExceeded { .. }) => None,
            Err(e) => return Err(e),
        };
        if let (Some(a), Some(b)) = (enumeration, by_spectrum) {
            if a != b {
                return Err(CodeError::Disagreement { enumeration: a, spectrum: b });
            }
        }
        let d = enumeration.or(by_spectrum).expect("one method ran");
        Ok(DistanceReport { enumeration, spectrum: by_spectrum, d })
    }

    /// Generator reading: `[k, 3, d]`.
    pub fn parameters(&self, d: u64) -> CodeParameters {
        CodeParameters { k: self.columns.len() as u64, dim: 3, d }
    }

    /// Parity-check reading: `[k, k-3, d']`, where `d'` is the least number of
    /// dependent columns; 3 if some three arc points are collinear, else 4.
    pub fn dual_parameters(&self, n: u32) -> CodeParameters {
        let k = self.columns.len() as u64;
        let d = if n >= 3 { 3 } else { 4.min(k) };
        CodeParameters { k, dim: k - 3, d }
    }

    /// One row per coordinate, entries in polynomial notation.
    pub fn matrix_text(&self) -> String {
        (0..3)
            .map(|i| self.columns.iter().map(|c| self.field.format(c[i])).collect::<Vec<_>>().join(" "))
            .collect::<Vec<_>>()
            .join("\n")
            + "\n"
    }

    pub fn parameters_json(&self, report: &DistanceReport, n: u32) -> Value {
        let p = self.parameters(report.d);
        let dual = self.dual_parameters(n);
        json!({
            "k": p.k,
            "dim": p.dim,
            "d": p.d,
            "field": self.field.descriptor(),
            "d_enumeration": report.enumeration,
            "d_spectrum": report.spectrum,
            "parity_check_reading": { "k": dual.k, "dim": dual.dim, "d": dual.d },
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extendibility {
    pub n: u32,
    pub complete: bool,
    pub extendible: bool,
    /// An uncovered point whose addition keeps the maximum character at n.
    pub witness: Option<String>,
    pub witness_validated: bool,
}

/// Extendible iff some off-arc point lies on no n-secant; such a point is
/// added and the spectrum rechecked.
pub fn extendibility_report(arc: &PlaneArc) -> Result<Extendibility, CodeError> {
    let census = PairCensus::compute(arc);
    let n = census.spectrum().n();
    let cov = census.coverage(n, ScanMode::Parallel);
    drop(census);
    let plane = arc.plane();
    let (witness, witness_validated) = match cov.uncovered_off.first() {
        None => (None, false),
        Some(&p) => {
            let ok = extend_and_recheck(arc, &[p], n).is_ok_and(|e| e.spectrum.n() == n);
            (Some(plane.format_point(&plane.point_at(p).map_err(AnalysisError::from)?)), ok)
        }
    };
    Ok(Extendibility { n, complete: cov.is_complete, extendible: !cov.is_complete, witness, witness_validated })
}
