//! Character spectra, n-secant inventories, coverage (completeness) scans and
//! arc extension.
//!
//! Everything starts from the pair census: the joining line of every pair of
//! arc points, counted per line.  A line meeting the arc in `c >= 2` points is
//! hit by exactly `c(c-1)/2` pairs, so the census determines all lines with
//! `c >= 2`; the counts for `c = 1` and `c = 0` follow from double counting.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::bitmap::{AtomicBitmap, Bitmap};
use crate::curves::{CurveError, Family, PlaneArc};
use crate::finite_field::{Elem, FieldError};
use crate::plane::{Plane, PlaneError, ProjectiveLine, ProjectivePoint};
use crate::polynomial::{hermitian_tangent_poly, PolyError, Polynomial};

/// Reports list at most this many points verbatim.
pub const REPORT_SAMPLE_LIMIT: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Plane(#[from] PlaneError),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("point {0} already lies on the arc")]
    AlreadyInArc(String),
    #[error("extension raises the maximum character from {expected} to {found}")]
    CharacterRaised { expected: u32, found: u32 },
    #[error("tangent lines are only defined for the Hermitian and BKS families")]
    UnsupportedFamily,
    #[error("q = {0} must be odd for the BKS family")]
    EvenQ(u64),
}

/// Number of lines meeting the arc in exactly `c` points, for every `c`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterSpectrum {
    pub order: u64,
    pub k: u64,
    pub counts: BTreeMap<u32, u64>,
}

impl CharacterSpectrum {
    /// The largest intersection number that occurs.
    pub fn n(&self) -> u32 {
        self.counts.iter().rev().find(|(_, &v)| v > 0).map(|(&c, _)| c).unwrap_or(0)
    }

    /// Characters with a nonzero line count.
    pub fn support(&self) -> Vec<u32> {
        self.counts.iter().filter(|(_, &v)| v > 0).map(|(&c, _)| c).collect()
    }

    pub fn count(&self, c: u32) -> u64 {
        self.counts.get(&c).copied().unwrap_or(0)
    }

    /// `sum N_c = Q^2+Q+1` and `sum c N_c = k(Q+1)`.
    pub fn mass_identities_hold(&self) -> bool {
        let q = self.order;
        let lines: u64 = self.counts.values().sum();
        let incidences: u64 = self.counts.iter().map(|(&c, &v)| c as u64 * v).sum();
        lines == q * q + q + 1 && incidences == self.k * (q + 1)
    }
}

/// Per-line intersection numbers for every line meeting the arc at least twice.
pub struct PairCensus<'a> {
    arc: &'a PlaneArc,
    points: Vec<ProjectivePoint>,
    /// `(line index, c)`, sorted by line index, `c >= 2`.
    lines: Vec<(u64, u32)>,
    member: Bitmap,
}

fn pairs_to_points(pairs: u64) -> u32 {
    // Solve c(c-1)/2 = pairs.
    let disc = 1 + 8 * pairs;
    let s = num_integer::Roots::sqrt(&disc);
    assert_eq!(s * s, disc, "pair count {pairs} is not triangular");
    ((1 + s) / 2) as u32
}

impl<'a> PairCensus<'a> {
    pub fn compute(arc: &'a PlaneArc) -> Self {
        let plane = arc.plane();
        let points = arc.points();
        let mut member = Bitmap::new(plane.size() as usize);
        for &i in arc.indices() {
            member.set(i as usize);
        }
        let k = points.len();
        let mut keys: Vec<u64> = (0..k)
            .into_par_iter()
            .flat_map_iter(|i| {
                let points = &points;
                (i + 1..k).map(move |j| plane.join_index(&points[i], &points[j]))
            })
            .collect();
        keys.par_sort_unstable();
        let mut lines = Vec::new();
        let mut i = 0;
        while i < keys.len() {
            let mut j = i;
            while j < keys.len() && keys[j] == keys[i] {
                j += 1;
            }
            lines.push((keys[i], pairs_to_points((j - i) as u64)));
            i = j;
        }
        PairCensus { arc, points, lines, member }
    }

    pub fn arc(&self) -> &PlaneArc {
        self.arc
    }

    fn plane(&self) -> &Plane {
        self.arc.plane()
    }

    fn lookup(&self, line: u64) -> Option<u32> {
        self.lines.binary_search_by_key(&line, |&(l, _)| l).ok().map(|i| self.lines[i].1)
    }

    /// Exact `|line ∩ arc|`.
    pub fn intersection(&self, line: u64) -> u32 {
        if let Some(c) = self.lookup(line) {
            return c;
        }
        let l = self.plane().line_at(line).expect("valid line index");
        let mut c = 0;
        self.plane().for_each_point_on(&l, |p| c += self.member.get(p as usize) as u32);
        c
    }

    /// Lines through some arc point that meet the arc nowhere else.
    fn tangent_lines(&self) -> Vec<u64> {
        let mut out = Vec::new();
        for p in &self.points {
            self.plane().for_each_line_through(p, |l| {
                if self.lookup(l).is_none() {
                    out.push(l);
                }
            });
        }
        out.sort_unstable();
        out
    }

    pub fn spectrum(&self) -> CharacterSpectrum {
        let q = self.plane().order();
        let k = self.points.len() as u64;
        let mut counts: BTreeMap<u32, u64> = BTreeMap::new();
        for &(_, c) in &self.lines {
            *counts.entry(c).or_insert(0) += 1;
        }
        let multi: u64 = counts.iter().map(|(&c, &v)| c as u64 * v).sum();
        let n1 = k * (q + 1) - multi;
        let touched: u64 = counts.values().sum::<u64>() + n1;
        counts.insert(1, n1);
        counts.insert(0, q * q + q + 1 - touched);
        counts.retain(|_, v| *v > 0);
        CharacterSpectrum { order: q, k, counts }
    }

    /// Indices of all lines meeting the arc in exactly `n` points, ascending.
    pub fn secant_lines(&self, n: u32) -> Vec<u64> {
        match n {
            0 => {
                let mut hit = Bitmap::new(self.plane().size() as usize);
                for &(l, _) in &self.lines {
                    hit.set(l as usize);
                }
                for l in self.tangent_lines() {
                    hit.set(l as usize);
                }
                hit.zeros().map(|l| l as u64).collect()
            }
            1 => self.tangent_lines(),
            _ => self.lines.iter().filter(|&&(_, c)| c == n).map(|&(l, _)| l).collect(),
        }
    }

    /// Number of `n`-secants through `p`.
    pub fn secants_through(&self, p: &ProjectivePoint, n: u32) -> u64 {
        let mut count = 0;
        self.plane().for_each_line_through(p, |l| {
            let c = if n >= 2 { self.lookup(l).unwrap_or(0) } else { self.intersection(l) };
            count += (c == n) as u64;
        });
        count
    }

    /// Marks every point on every `n`-secant and lists the unmarked points.
    pub fn coverage(&self, n: u32, mode: ScanMode) -> CoverageReport {
        let plane = self.plane();
        let size = plane.size() as usize;
        let secants = self.secant_lines(n);
        let marked = match mode {
            ScanMode::Parallel => {
                let shared = AtomicBitmap::new(size);
                secants.par_iter().for_each(|&l| {
                    let line = plane.line_at(l).expect("valid line index");
                    plane.for_each_point_on(&line, |p| shared.set(p as usize));
                });
                shared.into_bitmap()
            }
            ScanMode::Serial => {
                let mut bits = Bitmap::new(size);
                for &l in &secants {
                    let line = plane.line_at(l).expect("valid line index");
                    plane.for_each_point_on(&line, |p| bits.set(p as usize));
                }
                bits
            }
        };
        let (mut off, mut on) = (Vec::new(), Vec::new());
        for p in marked.zeros() {
            if self.member.get(p) {
                on.push(p as u64);
            } else {
                off.push(p as u64);
            }
        }
        CoverageReport { n, secant_count: secants.len() as u64, is_complete: off.is_empty(), uncovered_off: off, uncovered_on: on }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScanMode {
    Parallel,
    Serial,
}

/// Points left unmarked by the `n`-secants of an arc.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverageReport {
    pub n: u32,
    pub secant_count: u64,
    pub is_complete: bool,
    pub uncovered_off: Vec<u64>,
    pub uncovered_on: Vec<u64>,
}

/// Order `s` of the smallest subplane PG(2, s) containing `p`.
pub fn smallest_subplane(plane: &Plane, p: &ProjectivePoint) -> u64 {
    let f = plane.field();
    let pr = f.characteristic() as u64;
    (1..=f.degree())
        .filter(|j| f.degree() % j == 0)
        .map(|j| pr.pow(j))
        .find(|&s| plane.in_subplane(p, s).expect("s is a subfield order"))
        .expect("the whole plane is a subplane")
}

fn point_list_json(plane: &Plane, pts: &[u64]) -> Value {
    let mut breakdown: BTreeMap<u64, u64> = BTreeMap::new();
    for &i in pts {
        let p = plane.point_at(i).expect("valid point index");
        *breakdown.entry(smallest_subplane(plane, &p)).or_insert(0) += 1;
    }
    let sample: Vec<String> = pts
        .iter()
        .take(REPORT_SAMPLE_LIMIT)
        .map(|&i| plane.format_point(&plane.point_at(i).expect("valid point index")))
        .collect();
    let breakdown: BTreeMap<String, u64> = breakdown.into_iter().map(|(s, c)| (format!("PG(2,{s})"), c)).collect();
    json!({ "count": pts.len(), "sample": sample, "subplane_breakdown": breakdown })
}

impl CoverageReport {
    /// `{arc, spectrum, n, is_complete, uncovered_off, uncovered_on}`.
    pub fn to_json(&self, arc: &PlaneArc, spectrum: &CharacterSpectrum) -> Value {
        let plane = arc.plane();
        json!({
            "arc": {
                "family": arc.meta().family,
                "q": arc.meta().q,
                "r": arc.meta().r,
                "construction": arc.meta().construction,
                "field": plane.field().descriptor(),
                "k": arc.len(),
            },
            "spectrum": spectrum.counts,
            "n": self.n,
            "secant_count": self.secant_count,
            "is_complete": self.is_complete,
            "uncovered_off": point_list_json(plane, &self.uncovered_off),
            "uncovered_on": point_list_json(plane, &self.uncovered_on),
        })
    }
}

pub fn spectrum(arc: &PlaneArc) -> CharacterSpectrum {
    PairCensus::compute(arc).spectrum()
}

/// Lines meeting the arc in exactly `n` points.
pub fn full_secants(arc: &PlaneArc, n: u32) -> Vec<ProjectiveLine> {
    let census = PairCensus::compute(arc);
    census.secant_lines(n).into_iter().map(|l| arc.plane().line_at(l).expect("valid line index")).collect()
}

pub fn coverage(arc: &PlaneArc, n: u32) -> CoverageReport {
    PairCensus::compute(arc).coverage(n, ScanMode::Parallel)
}

pub fn secants_through(arc: &PlaneArc, p: &ProjectivePoint, n: u32) -> u64 {
    PairCensus::compute(arc).secants_through(p, n)
}

#[derive(Clone, Debug)]
pub struct Extension {
    pub arc: PlaneArc,
    pub spectrum: CharacterSpectrum,
    pub coverage: CoverageReport,
}

/// Adds `extra` to the arc, then recomputes the spectrum and the coverage by
/// `n`-secants.  Fails if a point is already on the arc or the maximum
/// character grows beyond `n`.
pub fn extend_and_recheck(arc: &PlaneArc, extra: &[u64], n: u32) -> Result<Extension, AnalysisError> {
    let plane = arc.plane();
    for &e in extra {
        let p = plane.point_at(e)?;
        if arc.contains(e) {
            return Err(AnalysisError::AlreadyInArc(plane.format_point(&p)));
        }
    }
    let grown = arc.union(extra)?;
    let census = PairCensus::compute(&grown);
    let spectrum = census.spectrum();
    if spectrum.n() > n {
        return Err(AnalysisError::CharacterRaised { expected: n, found: spectrum.n() });
    }
    let coverage = census.coverage(n, ScanMode::Parallel);
    drop(census);
    Ok(Extension { arc: grown, spectrum, coverage })
}

/// A tangent through an affine point; `slope` is `None` for a vertical line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TangentLine {
    pub slope: Option<Elem>,
    pub line: ProjectiveLine,
}

/// The line `Y - b = m (X - a)`, i.e. `[m : -1 : b - ma]`.
pub fn slope_line(plane: &Plane, a: Elem, b: Elem, m: Elem) -> ProjectiveLine {
    let f = plane.field();
    plane.line(m, f.neg(Elem::ONE), f.sub(b, f.mul(m, a))).expect("v = -1 is nonzero")
}

/// Tangent lines through the affine point `(a, b)` with coordinates in the plane's field.
///
/// Hermitian: slopes are the roots of `T^{q+1} + (Ta-b)^q + Ta - b`.
/// BKS: slopes are the roots of `2am^2 - 2mb + 1`; for `a = 0` the vertical line `X = 0`
/// is tangent as well.
pub fn tangent_lines_through(plane: &Plane, family: Family, q: u64, a: Elem, b: Elem) -> Result<Vec<TangentLine>, AnalysisError> {
    let f = plane.field();
    let slopes: Vec<Elem> = match family {
        Family::Hermitian => hermitian_tangent_poly(f, q, a, b)?.roots_in_field()?.into_iter().map(|r| r.value).collect(),
        Family::Bks => {
            if q % 2 == 0 {
                return Err(AnalysisError::EvenQ(q));
            }
            let two = f.from_int(2);
            let quad = Polynomial::new(f, vec![Elem::ONE, f.neg(f.mul(two, b)), f.mul(two, a)]);
            if quad.degree() == Some(0) {
                Vec::new()
            } else {
                quad.roots_in_field()?.into_iter().map(|r| r.value).collect()
            }
        }
        Family::Custom => return Err(AnalysisError::UnsupportedFamily),
    };
    let mut out: Vec<TangentLine> =
        slopes.into_iter().map(|m| TangentLine { slope: Some(m), line: slope_line(plane, a, b, m) }).collect();
    if family == Family::Bks && a.is_zero() {
        out.push(TangentLine { slope: None, line: plane.line(Elem::ONE, Elem::ZERO, Elem::ZERO)? });
    }
    Ok(out)
}
