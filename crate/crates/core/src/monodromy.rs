//! Cycle-type distributions of the candidate monodromy groups, specialization
//! censuses of the pencil polynomial families, and finite checks of the
//! Galois-closure towers.
//!
//! A census runs over every parameter value of a field.  Unramified values give
//! the factorization pattern of the specialized polynomial, which is the cycle
//! type of a Frobenius element acting on the roots.

use std::collections::BTreeMap;
use std::io::Write;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::curves::bks_form;
use crate::finite_field::{field_of_order, Elem, FieldContext, FieldError};
use crate::partition::{CycleType, FactorizationPattern, Partition};
use crate::polynomial::{
    bks_line_poly_monic, bks_monic_parameter, bks_onpoint_poly, bks_tangent_value, calibration_omega,
    calibration_poly, hermitian_curve_value, hermitian_line_poly, hermitian_onpoint_poly, hermitian_tangent_poly,
    CalibrationFamily, LineFamily, PolyError, Polynomial,
};

pub const PGL2_MAX_Q: u64 = 16;
pub const AGL1_MAX_Q: u64 = 64;
pub const SYM_MAX_N: u32 = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MonodromyError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("{what} = {value} is outside the supported range (at most {max})")]
    OutOfRange { what: &'static str, value: u64, max: u64 },
    #[error("family precondition violated: {0}")]
    Precondition(String),
    #[error("census degree {census} differs from group degree {group}")]
    DegreeMismatch { census: u32, group: u32 },
    #[error("field too small: {0}")]
    FieldTooSmall(String),
    #[error("censuses of different families or fields cannot be merged")]
    MergeMismatch,
}

// --- group distributions --------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupCycleDistribution {
    pub name: String,
    pub degree: u32,
    pub order: u64,
    pub counts: BTreeMap<CycleType, u64>,
}

impl GroupCycleDistribution {
    fn from_permutations<I: IntoIterator<Item = Vec<u32>>>(name: String, degree: u32, perms: I) -> Self {
        let mut counts = BTreeMap::new();
        let mut order = 0;
        for p in perms {
            *counts.entry(cycle_type(&p)).or_insert(0) += 1;
            order += 1;
        }
        GroupCycleDistribution { name, degree, order, counts }
    }

    pub fn contains_type(&self, t: &CycleType) -> bool {
        self.counts.contains_key(t)
    }

    /// Proportion of group elements of type `t`.
    pub fn frequency(&self, t: &CycleType) -> f64 {
        self.counts.get(t).copied().unwrap_or(0) as f64 / self.order as f64
    }

    pub fn to_json(&self) -> Value {
        let types: Vec<Value> = self.counts.iter().map(|(t, c)| json!({ "parts": t.parts(), "count": c })).collect();
        json!({ "group": self.name, "degree": self.degree, "order": self.order, "types": types })
    }
}

/// Cycle type of a permutation of `0..n` given as an image table.
pub fn cycle_type(perm: &[u32]) -> CycleType {
    let mut seen = vec![false; perm.len()];
    let mut parts = Vec::new();
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i] as usize;
            len += 1;
        }
        parts.push(len);
    }
    Partition::from_parts(parts)
}

fn small_field(q: u64, max: u64, what: &'static str) -> Result<Arc<FieldContext>, MonodromyError> {
    if q < 2 || q > max {
        return Err(MonodromyError::OutOfRange { what, value: q, max });
    }
    Ok(field_of_order(q)?)
}

/// PGL(2,q) on the q+1 points of the projective line; point `x` is `(x:1)`, point `q` is `(1:0)`.
pub fn pgl2_distribution(q: u64) -> Result<GroupCycleDistribution, MonodromyError> {
    let f = small_field(q, PGL2_MAX_Q, "q")?;
    let els: Vec<Elem> = f.elements()?.collect();
    let inf = q as u32;
    let mut perms = Vec::new();
    // One representative per scalar class: the first nonzero entry of (a, b) is 1.
    for &a in &els {
        for &b in &els {
            if a != Elem::ONE && !(a.is_zero() && b == Elem::ONE) {
                continue;
            }
            for &c in &els {
                for &d in &els {
                    if f.sub(f.mul(a, d), f.mul(b, c)).is_zero() {
                        continue;
                    }
                    let image = |num: Elem, den: Elem| -> u32 {
                        if den.is_zero() {
                            inf
                        } else {
                            f.div(num, den).expect("nonzero").code()
                        }
                    };
                    let mut p: Vec<u32> = els.iter().map(|&x| image(f.add(f.mul(a, x), b), f.add(f.mul(c, x), d))).collect();
                    p.push(image(a, c));
                    perms.push(p);
                }
            }
        }
    }
    Ok(GroupCycleDistribution::from_permutations(format!("PGL(2,{q})"), q as u32 + 1, perms))
}

/// AGL(1,q) acting on GF(q).
pub fn agl1_distribution(q: u64) -> Result<GroupCycleDistribution, MonodromyError> {
    let f = small_field(q, AGL1_MAX_Q, "q")?;
    let els: Vec<Elem> = f.elements()?.collect();
    let perms = els.iter().filter(|a| !a.is_zero()).flat_map(|&a| {
        let (f, els) = (&f, &els);
        els.iter().map(move |&b| els.iter().map(|&x| f.add(f.mul(a, x), b).code()).collect::<Vec<u32>>())
    });
    Ok(GroupCycleDistribution::from_permutations(format!("AGL(1,{q})"), q as u32, perms.collect::<Vec<_>>()))
}

/// Sym(n) by the class-size formula `n! / prod k^{m_k} m_k!`.
pub fn symmetric_distribution(n: u32) -> Result<GroupCycleDistribution, MonodromyError> {
    if n == 0 || n > SYM_MAX_N {
        return Err(MonodromyError::OutOfRange { what: "n", value: n as u64, max: SYM_MAX_N as u64 });
    }
    let fact = |k: u32| (1..=k as u128).product::<u128>();
    let mut counts = BTreeMap::new();
    for parts in partitions(n, n) {
        let t = Partition::from_parts(parts);
        let denom: u128 = t.counts().iter().map(|(&k, &m)| (k as u128).pow(m) * fact(m)).product();
        counts.insert(t, (fact(n) / denom) as u64);
    }
    Ok(GroupCycleDistribution { name: format!("Sym({n})"), degree: n, order: fact(n) as u64, counts })
}

fn partitions(n: u32, max: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![vec![]];
    }
    (1..=max.min(n))
        .rev()
        .flat_map(|k| {
            partitions(n - k, k).into_iter().map(move |mut rest| {
                rest.insert(0, k);
                rest
            })
        })
        .collect()
}

/// The cyclic group of order n in its regular action: phi(d) elements of type d^{n/d}.
pub fn cyclic_regular_distribution(n: u32) -> GroupCycleDistribution {
    let mut counts = BTreeMap::new();
    for d in (1..=n).filter(|d| n % d == 0) {
        let phi = (1..=d).filter(|&k| num_integer::gcd(k, d) == 1).count() as u64;
        counts.insert(Partition::from_counts([(d, n / d)]), phi);
    }
    GroupCycleDistribution { name: format!("C{n}"), degree: n, order: n as u64, counts }
}

/// The additive group of GF(q) acting on itself by translation.
pub fn elementary_abelian_distribution(q: u64) -> Result<GroupCycleDistribution, MonodromyError> {
    let (p, _) = crate::finite_field::prime_power(q).ok_or(MonodromyError::Field(FieldError::NotPrimePower(q)))?;
    let n = q as u32;
    let mut counts = BTreeMap::new();
    counts.insert(Partition::identity(n), 1);
    if q > 1 {
        counts.insert(Partition::from_counts([(p as u32, n / p as u32)]), q - 1);
    }
    Ok(GroupCycleDistribution { name: format!("E({q})"), degree: n, order: q, counts })
}

// --- censuses -------------------------------------------------------------------

/// A pencil family with its fixed parameters; the census variable is the slope `m`
/// (or `t` for the calibration families).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CensusFamily {
    /// Lines through an affine point off the Hermitian curve.
    HermitianLine { a: Elem, b: Elem },
    /// Lines through a point of the Hermitian curve, that point removed.
    HermitianOnPoint { a: Elem, b: Elem },
    /// Lines through a point off the BKS curve, in the monic parameter.
    BksLine { a: Elem, b: Elem },
    /// Lines through the BKS curve point with parameter `t`, that point removed.
    BksOnPoint { t: Elem },
    Calibration(CalibrationFamily),
}

impl CensusFamily {
    pub fn id(&self) -> &'static str {
        match self {
            CensusFamily::HermitianLine { .. } => "hermitian-line",
            CensusFamily::HermitianOnPoint { .. } => "hermitian-onpoint",
            CensusFamily::BksLine { .. } => "bks-line",
            CensusFamily::BksOnPoint { .. } => "bks-onpoint",
            CensusFamily::Calibration(CalibrationFamily::HermitianI) => "calibration-i",
            CensusFamily::Calibration(CalibrationFamily::HermitianII) => "calibration-ii",
        }
    }

    pub fn degree(&self, q: u64) -> u32 {
        match self {
            CensusFamily::HermitianLine { .. }
            | CensusFamily::BksLine { .. }
            | CensusFamily::Calibration(CalibrationFamily::HermitianI) => q as u32 + 1,
            _ => q as u32,
        }
    }

    /// The group the census is expected to sample.
    pub fn group(&self, q: u64) -> Result<GroupCycleDistribution, MonodromyError> {
        match self {
            CensusFamily::HermitianLine { .. } | CensusFamily::BksLine { .. } => pgl2_distribution(q),
            CensusFamily::HermitianOnPoint { .. } | CensusFamily::BksOnPoint { .. } => agl1_distribution(q),
            CensusFamily::Calibration(CalibrationFamily::HermitianI) => Ok(cyclic_regular_distribution(q as u32 + 1)),
            CensusFamily::Calibration(CalibrationFamily::HermitianII) => elementary_abelian_distribution(q),
        }
    }

    pub fn describe(&self, ctx: &FieldContext) -> String {
        match *self {
            CensusFamily::HermitianLine { a, b }
            | CensusFamily::HermitianOnPoint { a, b }
            | CensusFamily::BksLine { a, b } => format!("a={},b={}", ctx.format(a), ctx.format(b)),
            CensusFamily::BksOnPoint { t } => format!("t={}", ctx.format(t)),
            CensusFamily::Calibration(_) => String::new(),
        }
    }

    fn check(&self, ctx: &Arc<FieldContext>, q: u64) -> Result<Option<Elem>, MonodromyError> {
        let fail = |s: &str| Err(MonodromyError::Precondition(s.to_string()));
        match *self {
            CensusFamily::HermitianLine { a, b } => {
                ctx.subfield_degree(q * q)?;
                if hermitian_curve_value(ctx, q, a, b).is_zero() {
                    return fail("a^(q+1) + b^q + b must be nonzero");
                }
            }
            CensusFamily::HermitianOnPoint { a, b } => {
                ctx.subfield_degree(q * q)?;
                if !hermitian_curve_value(ctx, q, a, b).is_zero() {
                    return fail("(a, b) must lie on the Hermitian curve");
                }
            }
            CensusFamily::BksLine { a, b } => {
                odd(q)?;
                ctx.subfield_degree(q)?;
                if bks_form(ctx, q, [a, b, Elem::ONE])[0].is_zero() {
                    return fail("(a, b) must lie off the BKS curve");
                }
            }
            CensusFamily::BksOnPoint { t } => {
                odd(q)?;
                ctx.subfield_degree(q)?;
                let in_q2 = match ctx.subfield_degree(q * q) {
                    Ok(_) => ctx.in_subfield(t, q * q)?,
                    Err(_) => ctx.in_subfield(t, q)?,
                };
                if in_q2 {
                    return fail("t must lie outside GF(q^2)");
                }
            }
            CensusFamily::Calibration(CalibrationFamily::HermitianI) => {
                ctx.subfield_degree(q)?;
            }
            CensusFamily::Calibration(CalibrationFamily::HermitianII) => {
                ctx.subfield_degree(q)?;
                return match calibration_omega(ctx, q) {
                    Some(w) => Ok(Some(w)),
                    None => fail("the field has no omega with omega^(q-1) = -1"),
                };
            }
        }
        Ok(None)
    }

    /// The specialized polynomial, or `None` for an excluded parameter.
    fn specialize(&self, ctx: &Arc<FieldContext>, q: u64, m: Elem, omega: Option<Elem>) -> Result<Option<Polynomial>, PolyError> {
        Ok(Some(match *self {
            CensusFamily::HermitianLine { a, b } => hermitian_line_poly(ctx, q, a, b, m)?,
            CensusFamily::HermitianOnPoint { a, b } => hermitian_onpoint_poly(ctx, q, a, b, m)?,
            CensusFamily::BksLine { a, b } => match bks_monic_parameter(ctx, m) {
                Some(mu) => bks_line_poly_monic(ctx, q, a, b, mu)?,
                None => return Ok(None),
            },
            CensusFamily::BksOnPoint { t } => bks_onpoint_poly(ctx, q, t, m)?,
            CensusFamily::Calibration(c) => calibration_poly(ctx, c, q, m, omega)?,
        }))
    }
}

fn odd(q: u64) -> Result<(), MonodromyError> {
    if q % 2 == 0 {
        return Err(PolyError::EvenQ(q).into());
    }
    Ok(())
}

/// What a single parameter value contributed to a census.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pattern(FactorizationPattern),
    Ramified,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecializationRecord {
    pub m: Elem,
    pub outcome: Outcome,
}

/// Per-parameter outcomes over the whole field, in code order.
///
/// BKS line censuses run over the original slope `m`; the slopes 0 and 1/2 have
/// no monic parameter and are counted as skipped.
pub fn specialization_records(
    ctx: &Arc<FieldContext>,
    q: u64,
    family: CensusFamily,
) -> Result<Vec<SpecializationRecord>, MonodromyError> {
    let omega = family.check(ctx, q)?;
    let els: Vec<Elem> = ctx.elements()?.collect();
    els.par_iter()
        .map(|&m| {
            let outcome = match family.specialize(ctx, q, m, omega)? {
                None => Outcome::Skipped,
                Some(f) if !f.is_squarefree() => Outcome::Ramified,
                Some(f) => Outcome::Pattern(f.ddf_pattern()?),
            };
            Ok(SpecializationRecord { m, outcome })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub group: String,
    pub samples: u64,
    pub support_ok: bool,
    pub unexpected: Vec<FactorizationPattern>,
    pub total_variation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CensusReport {
    pub family: String,
    /// One entry per pooled parameter choice.
    pub params: Vec<String>,
    pub field: String,
    pub field_order: u64,
    pub degree: u32,
    #[serde(with = "pattern_counts")]
    pub patterns: BTreeMap<FactorizationPattern, u64>,
    pub ramified: u64,
    pub skipped: u64,
    pub comparison: Option<Comparison>,
}

impl CensusReport {
    pub fn from_records(ctx: &FieldContext, q: u64, family: CensusFamily, records: &[SpecializationRecord]) -> Self {
        let mut patterns = BTreeMap::new();
        let (mut ramified, mut skipped) = (0, 0);
        for r in records {
            match &r.outcome {
                Outcome::Pattern(p) => *patterns.entry(p.clone()).or_insert(0) += 1,
                Outcome::Ramified => ramified += 1,
                Outcome::Skipped => skipped += 1,
            }
        }
        CensusReport {
            family: family.id().to_string(),
            params: vec![family.describe(ctx)],
            field: ctx.descriptor(),
            field_order: ctx.order(),
            degree: family.degree(q),
            patterns,
            ramified,
            skipped,
            comparison: None,
        }
    }

    /// Unramified specializations tallied.
    pub fn samples(&self) -> u64 {
        self.patterns.values().sum()
    }

    /// Every parameter value of every pooled run is accounted for exactly once.
    pub fn is_conserved(&self) -> bool {
        self.ramified + self.skipped + self.samples() == self.field_order * self.params.len() as u64
    }

    /// Pools another census of the same family over the same field.
    pub fn merge(&mut self, other: &CensusReport) -> Result<(), MonodromyError> {
        if self.family != other.family || self.field != other.field || self.degree != other.degree {
            return Err(MonodromyError::MergeMismatch);
        }
        self.params.extend(other.params.iter().cloned());
        for (p, c) in &other.patterns {
            *self.patterns.entry(p.clone()).or_insert(0) += c;
        }
        self.ramified += other.ramified;
        self.skipped += other.skipped;
        self.comparison = None;
        Ok(())
    }
}

mod pattern_counts {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Entry {
        pattern: FactorizationPattern,
        count: u64,
    }

    pub fn serialize<S: Serializer>(map: &BTreeMap<FactorizationPattern, u64>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(map.iter().map(|(p, &count)| Entry { pattern: p.clone(), count }))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<FactorizationPattern, u64>, D::Error> {
        Ok(Vec::<Entry>::deserialize(d)?.into_iter().map(|e| (e.pattern, e.count)).collect())
    }
}

pub fn specialization_census(ctx: &Arc<FieldContext>, q: u64, family: CensusFamily) -> Result<CensusReport, MonodromyError> {
    let records = specialization_records(ctx, q, family)?;
    Ok(CensusReport::from_records(ctx, q, family, &records))
}

/// Support check and total-variation distance of the census against the group.
pub fn compare_distribution(census: &CensusReport, dist: &GroupCycleDistribution) -> Result<Comparison, MonodromyError> {
    if census.degree != dist.degree {
        return Err(MonodromyError::DegreeMismatch { census: census.degree, group: dist.degree });
    }
    let n = census.samples();
    if n == 0 {
        return Err(MonodromyError::Precondition("census has no unramified samples".into()));
    }
    let unexpected: Vec<_> = census.patterns.keys().filter(|p| !dist.contains_type(p)).cloned().collect();
    let mut keys: Vec<&Partition> = census.patterns.keys().chain(dist.counts.keys()).collect();
    keys.sort();
    keys.dedup();
    let tv = 0.5
        * keys
            .iter()
            .map(|k| {
                let obs = census.patterns.get(*k).copied().unwrap_or(0) as f64 / n as f64;
                (obs - dist.frequency(k)).abs()
            })
            .sum::<f64>();
    Ok(Comparison {
        group: dist.name.clone(),
        samples: n,
        support_ok: unexpected.is_empty(),
        unexpected,
        total_variation: tv,
    })
}

/// Sample-size dependent tolerance on the total-variation distance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TvThresholds {
    pub large_samples: u64,
    pub large_tolerance: f64,
    pub small_samples: u64,
    pub small_tolerance: f64,
}

impl Default for TvThresholds {
    fn default() -> Self {
        TvThresholds { large_samples: 5000, large_tolerance: 0.05, small_samples: 500, small_tolerance: 0.15 }
    }
}

impl TvThresholds {
    /// `None` below the small-sample threshold: too few samples to judge.
    pub fn tolerance(&self, samples: u64) -> Option<f64> {
        if samples >= self.large_samples {
            Some(self.large_tolerance)
        } else if samples >= self.small_samples {
            Some(self.small_tolerance)
        } else {
            None
        }
    }
}

/// One row per parameter value: `m,outcome,pattern`.
pub fn write_census_csv<W: Write>(
    ctx: &FieldContext,
    records: &[SpecializationRecord],
    out: W,
) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["m", "outcome", "pattern"])?;
    for r in records {
        let (kind, pat) = match &r.outcome {
            Outcome::Pattern(p) => ("unramified", p.to_string()),
            Outcome::Ramified => ("ramified", String::new()),
            Outcome::Skipped => ("skipped", String::new()),
        };
        w.write_record([ctx.format(r.m), kind.to_string(), pat])?;
    }
    w.flush()?;
    Ok(())
}

/// A census family without its parameters, for seeded sampling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    HermitianLine,
    HermitianOnPoint,
    BksLine,
    BksOnPoint,
    CalibrationI,
    CalibrationII,
}

/// Give up after this many consecutive rejected parameter draws.
const MAX_REJECTIONS: usize = 10_000;

impl FamilyKind {
    pub const ALL: [FamilyKind; 6] = [
        FamilyKind::HermitianLine,
        FamilyKind::HermitianOnPoint,
        FamilyKind::BksLine,
        FamilyKind::BksOnPoint,
        FamilyKind::CalibrationI,
        FamilyKind::CalibrationII,
    ];

    pub fn id(self) -> &'static str {
        match self {
            FamilyKind::HermitianLine => "hermitian-line",
            FamilyKind::HermitianOnPoint => "hermitian-onpoint",
            FamilyKind::BksLine => "bks-line",
            FamilyKind::BksOnPoint => "bks-onpoint",
            FamilyKind::CalibrationI => "calibration-i",
            FamilyKind::CalibrationII => "calibration-ii",
        }
    }

    pub fn group(self, q: u64) -> Result<GroupCycleDistribution, MonodromyError> {
        match self {
            FamilyKind::HermitianLine | FamilyKind::BksLine => pgl2_distribution(q),
            FamilyKind::HermitianOnPoint | FamilyKind::BksOnPoint => agl1_distribution(q),
            FamilyKind::CalibrationI => Ok(cyclic_regular_distribution(q as u32 + 1)),
            FamilyKind::CalibrationII => elementary_abelian_distribution(q),
        }
    }

    /// Whether the field and q admit this family at all.
    pub fn admissible(self, ctx: &FieldContext, q: u64) -> bool {
        match self {
            FamilyKind::HermitianLine | FamilyKind::HermitianOnPoint => ctx.subfield_degree(q * q).is_ok(),
            FamilyKind::BksLine | FamilyKind::BksOnPoint => q % 2 == 1 && ctx.subfield_degree(q).is_ok(),
            FamilyKind::CalibrationI | FamilyKind::CalibrationII => ctx.subfield_degree(q).is_ok(),
        }
    }

    /// Draws parameters until the family precondition holds.
    pub fn random_instance<R: Rng>(self, ctx: &Arc<FieldContext>, q: u64, rng: &mut R) -> Result<CensusFamily, MonodromyError> {
        let mut draw = || ctx.element(rng.gen_range(0..ctx.order())).expect("code in range");
        for _ in 0..MAX_REJECTIONS {
            let fam = match self {
                FamilyKind::HermitianLine => CensusFamily::HermitianLine { a: draw(), b: draw() },
                FamilyKind::HermitianOnPoint => {
                    let a = draw();
                    // b^q + b = -a^{q+1}
                    let mut v = vec![Elem::ZERO; q as usize + 1];
                    v[0] = ctx.pow_u64(a, q + 1);
                    v[1] = Elem::ONE;
                    v[q as usize] = Elem::ONE;
                    let roots = Polynomial::new(ctx, v).roots_in_field()?;
                    if roots.is_empty() {
                        continue;
                    }
                    let pick = (draw().code() as usize) % roots.len();
                    CensusFamily::HermitianOnPoint { a, b: roots[pick].value }
                }
                FamilyKind::BksLine => CensusFamily::BksLine { a: draw(), b: draw() },
                FamilyKind::BksOnPoint => CensusFamily::BksOnPoint { t: draw() },
                FamilyKind::CalibrationI => CensusFamily::Calibration(CalibrationFamily::HermitianI),
                FamilyKind::CalibrationII => CensusFamily::Calibration(CalibrationFamily::HermitianII),
            };
            match fam.check(ctx, q) {
                Ok(_) => return Ok(fam),
                Err(MonodromyError::Precondition(_)) => continue,
                Err(e) => return Err(e),
            }
        }
        Err(MonodromyError::Precondition(format!("no admissible parameters found for {}", self.id())))
    }
}

impl FamilyKind {
    /// The first instance drawn from a ChaCha8 stream with this seed.
    pub fn seeded_instance(self, ctx: &Arc<FieldContext>, q: u64, seed: u64) -> Result<CensusFamily, MonodromyError> {
        self.random_instance(ctx, q, &mut ChaCha8Rng::seed_from_u64(seed))
    }
}

/// Pools censuses over seeded random parameter choices until at least
/// `min_samples` unramified specializations are tallied.  Calibration families
/// have no free parameters and are run once.
pub fn pooled_census(
    ctx: &Arc<FieldContext>,
    q: u64,
    kind: FamilyKind,
    seed: u64,
    min_samples: u64,
) -> Result<CensusReport, MonodromyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pooled: Option<CensusReport> = None;
    loop {
        let fam = kind.random_instance(ctx, q, &mut rng)?;
        let c = specialization_census(ctx, q, fam)?;
        match pooled.as_mut() {
            None => pooled = Some(c),
            Some(p) => p.merge(&c)?,
        }
        let p = pooled.as_ref().expect("set above");
        if matches!(kind, FamilyKind::CalibrationI | FamilyKind::CalibrationII) || p.samples() >= min_samples {
            return Ok(pooled.expect("set above"));
        }
    }
}

// --- closure towers -------------------------------------------------------------

/// Off-curve line families whose closures are PGL(2,q) towers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TowerFamily {
    Hermitian { a: Elem, b: Elem },
    /// `m0` is the monic parameter.
    Bks { a: Elem, b: Elem },
}

impl TowerFamily {
    fn poly(&self, ctx: &Arc<FieldContext>, q: u64, m: Elem) -> Result<Polynomial, PolyError> {
        match *self {
            TowerFamily::Hermitian { a, b } => hermitian_line_poly(ctx, q, a, b, m),
            TowerFamily::Bks { a, b } => bks_line_poly_monic(ctx, q, a, b, m),
        }
    }

    /// The coefficient written `m^q` in the Hermitian system and `m` in the BKS one.
    fn twist(&self, ctx: &FieldContext, q: u64, m: Elem) -> Elem {
        match self {
            TowerFamily::Hermitian { .. } => ctx.pow_u64(m, q),
            TowerFamily::Bks { .. } => m,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerVerdict {
    pub roots: usize,
    pub derivative_checks: usize,
    pub kummer_checks: usize,
    pub tuples: usize,
    pub automorphism_checks: usize,
    pub violations: Vec<String>,
}

impl TowerVerdict {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Slopes in the field whose specialization is squarefree and splits completely.
pub fn totally_split_parameters(
    ctx: &Arc<FieldContext>,
    q: u64,
    family: TowerFamily,
    limit: usize,
) -> Result<Vec<Elem>, MonodromyError> {
    let mut out = Vec::new();
    for m in ctx.elements()? {
        let f = family.poly(ctx, q, m)?;
        if f.is_squarefree() && f.distinct_root_count()? as u64 == q + 1 {
            out.push(m);
            if out.len() == limit {
                break;
            }
        }
    }
    Ok(out)
}

/// Checks the closure tower at a totally split specialization `m0`.
///
/// For every root `u`: the twisted derivative at `u` has exactly the roots
/// `u' - u`; for every such root `v`, a `w` with
/// `w^{q-1} = (v + u + c)/(u + c)` exists iff the power test says so; every
/// resulting tuple satisfies the three tower equations, and so do its images
/// under the three generating automorphisms.
pub fn tower_consistency(
    ctx: &Arc<FieldContext>,
    q: u64,
    family: TowerFamily,
    m0: Elem,
) -> Result<TowerVerdict, MonodromyError> {
    let f = family.poly(ctx, q, m0)?;
    let roots: Vec<Elem> = f.roots_in_field()?.into_iter().map(|r| r.value).collect();
    if !f.is_squarefree() || roots.len() as u64 != q + 1 {
        return Err(MonodromyError::Precondition(format!(
            "specialization at m0 = {} does not split into distinct linear factors",
            ctx.format(m0)
        )));
    }
    let c = family.twist(ctx, q, m0);
    let mut verdict = TowerVerdict { roots: roots.len(), ..Default::default() };
    let e2 = |u: Elem, v: Elem| {
        let t = ctx.add(ctx.pow_u64(v, q), ctx.mul(ctx.add(u, c), ctx.pow_u64(v, q - 1)));
        ctx.add(t, ctx.add(ctx.pow_u64(u, q), m0))
    };
    let e3 = |u: Elem, v: Elem, w: Elem| {
        let uc = ctx.add(u, c);
        ctx.sub(ctx.add(v, uc), ctx.mul(uc, ctx.pow_u64(w, q - 1)))
    };
    let holds = |u: Elem, v: Elem, w: Elem| f.eval(u).is_zero() && e2(u, v).is_zero() && e3(u, v, w).is_zero();
    let fq_star: Vec<Elem> = ctx.subfield_elements(q)?.into_iter().filter(|x| !x.is_zero()).collect();
    let show = |t: (Elem, Elem, Elem)| format!("(u,v,w)=({},{},{})", ctx.format(t.0), ctx.format(t.1), ctx.format(t.2));

    for &u in &roots {
        // The shifted polynomial has no constant term since f(u) = 0.
        let shifted = f.shift(u);
        let f1 = Polynomial::new(ctx, shifted.coeffs()[1..].to_vec());
        let mut closed = vec![Elem::ZERO; q as usize + 1];
        closed[0] = ctx.add(m0, ctx.pow_u64(u, q));
        closed[q as usize - 1] = ctx.add(closed[q as usize - 1], ctx.add(u, c));
        closed[q as usize] = Elem::ONE;
        if f1 != Polynomial::new(ctx, closed) {
            verdict.violations.push(format!("twisted derivative at u={} differs from its closed form", ctx.format(u)));
        }
        let mut got: Vec<Elem> = f1.roots_in_field()?.into_iter().map(|r| r.value).collect();
        let mut want: Vec<Elem> = roots.iter().filter(|&&x| x != u).map(|&x| ctx.sub(x, u)).collect();
        got.sort();
        want.sort();
        verdict.derivative_checks += 1;
        if got != want {
            verdict.violations.push(format!("roots of the twisted derivative at u={} are not the differences", ctx.format(u)));
        }

        for &v in &want {
            let uc = ctx.add(u, c);
            let x = ctx.div(ctx.add(v, uc), uc)?;
            let kummer = Polynomial::new(ctx, {
                let mut k = vec![Elem::ZERO; q as usize];
                k[0] = ctx.neg(x);
                k[q as usize - 1] = ctx.add(k[q as usize - 1], Elem::ONE);
                k
            });
            let ws: Vec<Elem> = kummer.roots_in_field()?.into_iter().map(|r| r.value).collect();
            verdict.kummer_checks += 1;
            if ctx.is_nonzero_power(x, q - 1) != !ws.is_empty() {
                verdict.violations.push(format!("power test and root search disagree at u={} v={}", ctx.format(u), ctx.format(v)));
            }
            for &w in &ws {
                verdict.tuples += 1;
                if !holds(u, v, w) {
                    verdict.violations.push(format!("{} fails the tower equations", show((u, v, w))));
                    continue;
                }
                let mut images = vec![
                    (ctx.add(u, v), ctx.neg(v), ctx.inv(w)?),
                    (u, ctx.div(ctx.mul(v, w), ctx.add(w, Elem::ONE))?, ctx.add(w, Elem::ONE)),
                ];
                images.extend(fq_star.iter().map(|&l| (u, v, ctx.mul(l, w))));
                for img in images {
                    verdict.automorphism_checks += 1;
                    if !holds(img.0, img.1, img.2) {
                        verdict.violations.push(format!("image {} of {} fails the tower equations", show(img), show((u, v, w))));
                    }
                }
            }
        }
    }
    Ok(verdict)
}

// --- ramified slopes ----------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RamifiedCount {
    pub count: u64,
    pub expected: u64,
    /// Slopes with a non-squarefree specialization, in code order.
    pub slopes: Vec<String>,
    /// The vertical line is tangent (BKS with a = 0).
    pub vertical: bool,
}

impl RamifiedCount {
    pub fn matches(&self) -> bool {
        self.count == self.expected
    }
}

/// BKS line polynomial for any slope, including the excluded ones.
fn bks_line_raw(ctx: &Arc<FieldContext>, q: u64, a: Elem, b: Elem, m: Elem) -> Polynomial {
    let two = ctx.from_int(2);
    let c1 = ctx.sub(ctx.mul(two, m), Elem::ONE);
    let mut v = vec![Elem::ZERO; q as usize + 2];
    v[0] = ctx.add(ctx.mul(m, ctx.sub(two, a)), ctx.sub(b, two));
    v[1] = c1;
    v[q as usize] = c1;
    v[q as usize + 1] = ctx.mul(two, m);
    Polynomial::new(ctx, v)
}

/// Counts tangent lines through `(a, b)` by scanning every slope of `ctx` for a
/// non-squarefree specialization.  The field must contain every tangent slope.
pub fn ramified_place_count(
    ctx: &Arc<FieldContext>,
    q: u64,
    family: LineFamily,
    a: Elem,
    b: Elem,
) -> Result<RamifiedCount, MonodromyError> {
    let (expected, vertical) = match family {
        LineFamily::Hermitian => {
            CensusFamily::HermitianLine { a, b }.check(ctx, q)?;
            let g = hermitian_tangent_poly(ctx, q, a, b)?;
            if g.distinct_root_count()? as u64 != q + 1 {
                return Err(MonodromyError::FieldTooSmall("the tangent slope polynomial does not split".into()));
            }
            (q + 1, false)
        }
        LineFamily::Bks => {
            CensusFamily::BksLine { a, b }.check(ctx, q)?;
            let disc = ctx.sub(ctx.mul(b, b), ctx.mul(ctx.from_int(2), a));
            if !a.is_zero() && !disc.is_zero() && !ctx.is_nonzero_power(disc, 2) {
                return Err(MonodromyError::FieldTooSmall("b^2 - 2a is not a square".into()));
            }
            (if disc.is_zero() { 1 } else { 2 }, a.is_zero())
        }
    };
    let els: Vec<Elem> = ctx.elements()?.collect();
    let hits: Vec<Elem> = els
        .par_iter()
        .filter_map(|&m| {
            let f = match family {
                LineFamily::Hermitian => hermitian_line_poly(ctx, q, a, b, m).ok()?,
                LineFamily::Bks => bks_line_raw(ctx, q, a, b, m),
            };
            (!f.is_squarefree()).then_some(m)
        })
        .collect();
    if family == LineFamily::Bks {
        debug_assert!(hits.iter().all(|&m| bks_tangent_value(ctx, a, b, m).is_zero()));
    }
    Ok(RamifiedCount {
        count: hits.len() as u64 + vertical as u64,
        expected,
        slopes: hits.iter().map(|&m| ctx.format(m)).collect(),
        vertical,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_field::build_field;

    fn types(d: &GroupCycleDistribution) -> Vec<(String, u64)> {
        d.counts.iter().map(|(t, &c)| (t.to_string(), c)).collect()
    }

    #[test]
    fn pgl2_small_cases() {
        let d = pgl2_distribution(2).unwrap();
        assert_eq!((d.degree, d.order), (3, 6));
        assert_eq!(types(&d), vec![("1+1+1".into(), 1), ("2+1".into(), 3), ("3".into(), 2)]);
        let d = pgl2_distribution(3).unwrap();
        assert_eq!(d.order, 24);
        assert_eq!(d.counts[&"2+2".parse().unwrap()], 3);
        assert_eq!(d.counts[&"4".parse().unwrap()], 6);
        assert!(pgl2_distribution(17).is_err());
    }

    #[test]
    fn agl1_q5() {
        let d = agl1_distribution(5).unwrap();
        assert_eq!(d.order, 20);
        assert_eq!(d.counts[&"4+1".parse().unwrap()], 10);
        assert_eq!(d.counts[&"2+2+1".parse().unwrap()], 5);
    }

    #[test]
    fn symmetric_and_regular_groups() {
        let s = symmetric_distribution(4).unwrap();
        assert_eq!(s.order, 24);
        assert_eq!(s.counts.values().sum::<u64>(), 24);
        assert_eq!(s.counts[&"2+1+1".parse().unwrap()], 6);
        let c = cyclic_regular_distribution(6);
        assert_eq!(c.counts.values().sum::<u64>(), 6);
        assert_eq!(c.counts[&"6".parse().unwrap()], 2);
        let e = elementary_abelian_distribution(9).unwrap();
        assert_eq!(e.counts[&"3+3+3".parse().unwrap()], 8);
    }

    #[test]
    fn compare_with_itself_is_zero() {
        let f = build_field(3, 4, None).unwrap();
        let fam = CensusFamily::Calibration(CalibrationFamily::HermitianII);
        let mut census = specialization_census(&f, 3, fam).unwrap();
        let g = fam.group(3).unwrap();
        census.patterns = g.counts.clone();
        let c = compare_distribution(&census, &g).unwrap();
        assert!(c.support_ok && c.total_variation.abs() < 1e-12);
        assert!(matches!(compare_distribution(&census, &pgl2_distribution(3).unwrap()), Err(MonodromyError::DegreeMismatch { .. })));
    }

    #[test]
    fn bks_excluded_slopes_are_skipped() {
        let f = build_field(3, 3, None).unwrap();
        let fam = CensusFamily::BksLine { a: f.from_int(1), b: f.generator() };
        let census = specialization_census(&f, 3, fam).unwrap();
        assert_eq!(census.skipped, 2);
        assert!(census.is_conserved());
    }

    #[test]
    fn third_map_with_unit_scalar_is_identity() {
        // Every tuple is checked under lambda = 1 among the F_q^* images; here
        // only the tuple bookkeeping is exercised at q = 2 where F_q^* = {1}.
        let f = build_field(2, 6, None).unwrap();
        let fam = TowerFamily::Hermitian { a: f.generator(), b: Elem::ONE };
        let m0 = totally_split_parameters(&f, 2, fam, 1).unwrap()[0];
        let v = tower_consistency(&f, 2, fam, m0).unwrap();
        assert!(v.pass(), "{:?}", v.violations);
        assert_eq!(v.automorphism_checks, 3 * v.tuples);
    }
}
