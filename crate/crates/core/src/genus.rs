//! Genera of the Galois closures and the Hasse-Weil gates that guarantee an
//! unramified rational place.  Integer arithmetic throughout.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::finite_field::prime_power;

/// Gates are searched up to this exponent.
pub const MAX_GATE_EXPONENT: u32 = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenusError {
    #[error("q = {0} is not a prime power")]
    NotPrimePower(u64),
    #[error("case {0} needs odd q, got {1}")]
    Parity(ClosureCase, u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosureCase {
    HermitianOffcurve,
    HermitianOnpoint,
    BksGeneralDistinct,
    BksGeneralEqual,
    BksSpecial,
}

impl ClosureCase {
    pub const ALL: [ClosureCase; 5] = [
        ClosureCase::HermitianOffcurve,
        ClosureCase::HermitianOnpoint,
        ClosureCase::BksGeneralDistinct,
        ClosureCase::BksGeneralEqual,
        ClosureCase::BksSpecial,
    ];

    pub fn is_bks(self) -> bool {
        !matches!(self, ClosureCase::HermitianOffcurve | ClosureCase::HermitianOnpoint)
    }

    pub fn name(self) -> &'static str {
        match self {
            ClosureCase::HermitianOffcurve => "hermitian_offcurve",
            ClosureCase::HermitianOnpoint => "hermitian_onpoint",
            ClosureCase::BksGeneralDistinct => "bks_general_distinct",
            ClosureCase::BksGeneralEqual => "bks_general_equal",
            ClosureCase::BksSpecial => "bks_special",
        }
    }
}

impl fmt::Display for ClosureCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ClosureCase {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ClosureCase::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| format!("unknown closure case {s:?}"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosureProfile {
    pub case: ClosureCase,
    pub q: u64,
    pub genus: BigUint,
    /// Places of the closure ramified over the slope line.
    pub ramified: BigUint,
    /// The plane is over GF(q^{exponent_factor * r}).
    pub exponent_factor: u32,
}

fn check(case: ClosureCase, q: u64) -> Result<(), GenusError> {
    prime_power(q).ok_or(GenusError::NotPrimePower(q))?;
    if case.is_bks() && q % 2 == 0 {
        return Err(GenusError::Parity(case, q));
    }
    Ok(())
}

/// `2g - 2` of the closure, straight from the case formula.
pub fn closure_euler(case: ClosureCase, q: u64) -> Result<BigInt, GenusError> {
    check(case, q)?;
    let q = BigInt::from(q);
    let two = BigInt::from(2);
    Ok(match case {
        ClosureCase::HermitianOffcurve => q.pow(4) - q.pow(2) - &two * &q - &two,
        ClosureCase::HermitianOnpoint => &q * (&q - BigInt::one()).pow(2) - &two,
        ClosureCase::BksGeneralDistinct => &two * q.pow(2) - &two * &q - BigInt::from(4),
        ClosureCase::BksGeneralEqual => q.pow(2) - &q - &two,
        ClosureCase::BksSpecial => -two,
    })
}

pub fn closure_genus(case: ClosureCase, q: u64) -> Result<BigUint, GenusError> {
    let e = closure_euler(case, q)? + BigInt::from(2);
    debug_assert!(e >= BigInt::zero() && &e % BigInt::from(2) == BigInt::zero());
    Ok((e / BigInt::from(2)).to_biguint().expect("genus is nonnegative"))
}

pub fn closure_profile(case: ClosureCase, q: u64) -> Result<ClosureProfile, GenusError> {
    let genus = closure_genus(case, q)?;
    let qb = BigUint::from(q);
    let ramified = match case {
        ClosureCase::HermitianOffcurve => (&qb + 1u32).pow(2),
        // One short orbit of q+1 places.
        ClosureCase::HermitianOnpoint | ClosureCase::BksGeneralEqual => &qb + 1u32,
        ClosureCase::BksGeneralDistinct | ClosureCase::BksSpecial => qb.pow(2) + 1u32,
    };
    let exponent_factor = if case.is_bks() { 1 } else { 2 };
    Ok(ClosureProfile { case, q, genus, ramified, exponent_factor })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateVerdict {
    pub holds: bool,
    /// N is a perfect square, so `sqrt(N)` in the bound is an integer.
    pub sqrt_exact: bool,
}

/// Whether `N + 1 - 2g sqrt(N) > ramified`, decided exactly by squaring.
pub fn hasse_weil_gate(n: &BigUint, g: &BigUint, ramified: &BigUint) -> GateVerdict {
    let root = n.sqrt();
    let sqrt_exact = &root * &root == *n;
    let lhs = BigInt::from(n.clone()) + BigInt::one() - BigInt::from(ramified.clone());
    let holds = if lhs <= BigInt::zero() {
        false
    } else {
        let l = lhs.to_biguint().expect("positive");
        &l * &l > BigUint::from(4u32) * g * g * n
    };
    GateVerdict { holds, sqrt_exact }
}

impl ClosureProfile {
    pub fn field_order(&self, r: u32) -> BigUint {
        BigUint::from(self.q).pow(self.exponent_factor * r)
    }

    pub fn gate(&self, r: u32) -> GateVerdict {
        hasse_weil_gate(&self.field_order(r), &self.genus, &self.ramified)
    }

    /// Smallest `r >= 1` at which the gate holds.
    pub fn minimal_r(&self) -> Option<u32> {
        (1..=MAX_GATE_EXPONENT).find(|&r| self.gate(r).holds)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GuaranteeRow {
    pub case: ClosureCase,
    /// `(q, minimal r)`; q values the case does not admit are absent.
    pub entries: Vec<(u64, Option<u32>)>,
}

/// Minimal guaranteed exponent per case for every prime power `2 <= q <= q_max`.
pub fn guarantee_table(q_max: u64) -> Vec<GuaranteeRow> {
    ClosureCase::ALL
        .iter()
        .map(|&case| GuaranteeRow {
            case,
            entries: (2..=q_max)
                .filter_map(|q| closure_profile(case, q).ok().map(|p| (q, p.minimal_r())))
                .collect(),
        })
        .collect()
}

pub fn guarantee_table_text(rows: &[GuaranteeRow]) -> String {
    let mut out = String::new();
    for row in rows {
        out.push_str(&format!("{:<22}", row.case.name()));
        for (q, r) in &row.entries {
            let r = r.map_or("-".to_string(), |r| r.to_string());
            out.push_str(&format!(" q={q:<3} r={r:<3}"));
        }
        out.truncate(out.trim_end().len());
        out.push('\n');
    }
    out
}

pub fn guarantee_table_json(rows: &[GuaranteeRow]) -> Value {
    Value::Array(
        rows.iter()
            .map(|row| {
                let entries: Vec<Value> = row.entries.iter().map(|(q, r)| json!({ "q": q, "min_r": r })).collect();
                json!({ "case": row.case.name(), "entries": entries })
            })
            .collect(),
    )
}

impl ClosureProfile {
    pub fn to_json(&self) -> Value {
        json!({
            "case": self.case.name(),
            "q": self.q,
            "genus": self.genus.to_string(),
            "ramified": self.ramified.to_string(),
            "two_g_minus_two": (BigInt::from(self.genus.clone()) * BigInt::from(2) - BigInt::from(2)).to_string(),
            "field": if self.exponent_factor == 2 { "GF(q^(2r))" } else { "GF(q^r)" },
        })
    }
}
