//! Univariate polynomials over a [`FieldContext`], plus the line-pencil
//! polynomial families attached to the Hermitian and BKS curves.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::finite_field::{Elem, FieldContext, FieldError};
use crate::partition::FactorizationPattern;

/// Fields at most this large are root-scanned element by element.
pub const ROOT_SCAN_LIMIT: u64 = 1 << 12;

const SPLIT_SEED: u64 = 0x5eed_0f_7007;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("polynomials belong to different fields")]
    ContextMismatch,
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("gcd of two zero polynomials is undefined")]
    ZeroGcd,
    #[error("polynomial is not squarefree")]
    NotSquarefree,
    #[error("polynomial must have degree at least 1")]
    Constant,
    #[error("q = {0} must be odd for this family")]
    EvenQ(u64),
    #[error("slope {0} is excluded for this family")]
    ExcludedSlope(String),
    #[error("({0}, {1}) does not lie on the curve")]
    NotOnCurve(String, String),
    #[error("omega must satisfy omega^(q-1) = -1")]
    BadOmega,
    #[error("nondegeneracy condition fails: {0}")]
    Degenerate(String),
}

/// Coefficients are stored lowest degree first with no trailing zeros.
#[derive(Clone)]
pub struct Polynomial {
    ctx: Arc<FieldContext>,
    coeffs: Vec<Elem>,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && (Arc::ptr_eq(&self.ctx, &other.ctx) || *self.ctx == *other.ctx)
    }
}

impl Eq for Polynomial {}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// `c0 + c1*X + c2*X^2 + ...`, zero terms omitted.
impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let mut terms = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut cs = self.ctx.format(c);
            if cs.contains('+') {
                cs = format!("({cs})");
            }
            terms.push(match i {
                0 => cs,
                _ => {
                    let mono = if i == 1 { "X".to_string() } else { format!("X^{i}") };
                    if c == Elem::ONE {
                        mono
                    } else {
                        format!("{cs}*{mono}")
                    }
                }
            });
        }
        f.write_str(&terms.join(" + "))
    }
}

/// A distinct root in the coefficient field.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Root {
    pub value: Elem,
    pub multiple: bool,
}

fn trim(v: &mut Vec<Elem>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

impl Polynomial {
    pub fn new(ctx: &Arc<FieldContext>, mut coeffs: Vec<Elem>) -> Self {
        trim(&mut coeffs);
        Polynomial { ctx: ctx.clone(), coeffs }
    }

    /// Coefficients given as prime-field integers, lowest degree first.
    pub fn from_ints(ctx: &Arc<FieldContext>, coeffs: &[i64]) -> Self {
        Self::new(ctx, coeffs.iter().map(|&c| ctx.from_int(c)).collect())
    }

    pub fn zero(ctx: &Arc<FieldContext>) -> Self {
        Self::new(ctx, Vec::new())
    }

    pub fn constant(ctx: &Arc<FieldContext>, c: Elem) -> Self {
        Self::new(ctx, vec![c])
    }

    /// `c * X^deg`
    pub fn monomial(ctx: &Arc<FieldContext>, c: Elem, deg: usize) -> Self {
        let mut v = vec![Elem::ZERO; deg + 1];
        v[deg] = c;
        Self::new(ctx, v)
    }

    pub fn x(ctx: &Arc<FieldContext>) -> Self {
        Self::monomial(ctx, Elem::ONE, 1)
    }

    pub fn context(&self) -> &Arc<FieldContext> {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Elem {
        self.coeffs.get(i).copied().unwrap_or(Elem::ZERO)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Elem {
        self.coeffs.last().copied().unwrap_or(Elem::ZERO)
    }

    /// Header line with the field descriptor, then the polynomial.
    pub fn to_text(&self) -> String {
        format!("{}\n{}\n", self.ctx.descriptor(), self)
    }

    fn check(&self, other: &Self) -> Result<(), PolyError> {
        if Arc::ptr_eq(&self.ctx, &other.ctx) || *self.ctx == *other.ctx {
            Ok(())
        } else {
            Err(PolyError::ContextMismatch)
        }
    }

    fn wrap(&self, coeffs: Vec<Elem>) -> Self {
        Self::new(&self.ctx, coeffs)
    }

    pub fn add(&self, other: &Self) -> Result<Self, PolyError> {
        self.check(other)?;
        Ok(self.add_raw(other))
    }

    fn add_raw(&self, other: &Self) -> Self {
        let f = &self.ctx;
        let n = self.coeffs.len().max(other.coeffs.len());
        self.wrap((0..n).map(|i| f.add(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.check(other)?;
        Ok(self.add_raw(&other.neg()))
    }

    pub fn neg(&self) -> Self {
        self.wrap(self.coeffs.iter().map(|&c| self.ctx.neg(c)).collect())
    }

    pub fn scale(&self, c: Elem) -> Self {
        self.wrap(self.coeffs.iter().map(|&x| self.ctx.mul(x, c)).collect())
    }

    pub fn mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.check(other)?;
        Ok(self.mul_raw(other))
    }

    fn mul_raw(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(&self.ctx);
        }
        let f = &self.ctx;
        let mut out = vec![Elem::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        self.wrap(out)
    }

    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self), PolyError> {
        self.check(divisor)?;
        self.div_rem_raw(divisor)
    }

    fn div_rem_raw(&self, divisor: &Self) -> Result<(Self, Self), PolyError> {
        let db = divisor.degree().ok_or(PolyError::DivisionByZero)?;
        let f = &self.ctx;
        let mut r = self.coeffs.clone();
        if r.len() <= db {
            return Ok((Self::zero(f), self.clone()));
        }
        let inv = f.inv(divisor.leading())?;
        let mut quot = vec![Elem::ZERO; r.len() - db];
        for d in (db..r.len()).rev() {
            let c = f.mul(r[d], inv);
            if c.is_zero() {
                continue;
            }
            quot[d - db] = c;
            for (i, &x) in divisor.coeffs.iter().enumerate() {
                r[d - db + i] = f.sub(r[d - db + i], f.mul(c, x));
            }
        }
        r.truncate(db);
        Ok((self.wrap(quot), self.wrap(r)))
    }

    pub fn rem(&self, divisor: &Self) -> Result<Self, PolyError> {
        Ok(self.div_rem(divisor)?.1)
    }

    /// Scaled to leading coefficient 1; the zero polynomial stays zero.
    pub fn monic(&self) -> Self {
        match self.coeffs.last() {
            None => self.clone(),
            Some(&lc) => self.scale(self.ctx.inv(lc).expect("leading coefficient is nonzero")),
        }
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &Self) -> Result<Self, PolyError> {
        self.check(other)?;
        if self.is_zero() && other.is_zero() {
            return Err(PolyError::ZeroGcd);
        }
        Ok(self.gcd_raw(other))
    }

    fn gcd_raw(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.div_rem_raw(&b).expect("divisor is nonzero").1;
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> Self {
        let f = &self.ctx;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| f.mul(c, f.from_int(i as i64 % f.characteristic() as i64)))
            .collect();
        self.wrap(coeffs)
    }

    pub fn eval(&self, x: Elem) -> Elem {
        let f = &self.ctx;
        self.coeffs.iter().rev().fold(Elem::ZERO, |acc, &c| f.add(f.mul(acc, x), c))
    }

    /// `self^exp mod modulus`.
    pub fn mod_pow(&self, exp: &BigUint, modulus: &Self) -> Result<Self, PolyError> {
        self.check(modulus)?;
        let mut base = self.div_rem_raw(modulus)?.1;
        let mut acc = Self::constant(&self.ctx, Elem::ONE).div_rem_raw(modulus)?.1;
        for i in 0..exp.bits() {
            if exp.bit(i) {
                acc = acc.mul_raw(&base).div_rem_raw(modulus)?.1;
            }
            if i + 1 < exp.bits() {
                base = base.mul_raw(&base).div_rem_raw(modulus)?.1;
            }
        }
        Ok(acc)
    }

    fn mod_pow_u64(&self, exp: u64, modulus: &Self) -> Self {
        self.mod_pow(&BigUint::from(exp), modulus).expect("modulus is nonzero and in the same field")
    }

    /// `f(T + u)`.
    pub fn shift(&self, u: Elem) -> Self {
        let lin = self.wrap(vec![u, Elem::ONE]);
        self.coeffs
            .iter()
            .rev()
            .fold(Self::zero(&self.ctx), |acc, &c| acc.mul_raw(&lin).add_raw(&Self::constant(&self.ctx, c)))
    }

    /// Drops the factor `T^k` for the largest `k` dividing the polynomial.
    pub fn strip_x_power(&self) -> (usize, Self) {
        let k = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        (k, self.wrap(self.coeffs[k..].to_vec()))
    }

    /// True iff `gcd(f, f')` is constant; false when `f' = 0`.
    pub fn is_squarefree(&self) -> bool {
        let d = self.derivative();
        if d.is_zero() {
            return false;
        }
        self.gcd_raw(&d).degree() == Some(0)
    }

    /// Distinct roots in the coefficient field, ascending by code.
    pub fn roots_in_field(&self) -> Result<Vec<Root>, PolyError> {
        if self.is_zero() {
            return Err(PolyError::Constant);
        }
        let deriv = self.derivative();
        let tag = |value: Elem| Root { value, multiple: deriv.eval(value).is_zero() };
        if self.ctx.order() <= ROOT_SCAN_LIMIT {
            return Ok(self.ctx.elements()?.filter(|&x| self.eval(x).is_zero()).map(tag).collect());
        }
        let mut roots = Vec::new();
        let (k, rest) = self.strip_x_power();
        if k > 0 {
            roots.push(Elem::ZERO);
        }
        if rest.degree().unwrap_or(0) > 0 {
            let f = rest.monic();
            // The product of the distinct linear factors is gcd(f, X^Q - X).
            let xq = Self::x(&self.ctx).mod_pow_u64(self.ctx.order(), &f);
            let split = f.gcd_raw(&xq.add_raw(&Self::x(&self.ctx).neg()));
            let mut rng = ChaCha8Rng::seed_from_u64(SPLIT_SEED);
            split.split_linear(&mut rng, &mut roots);
        }
        roots.sort_unstable();
        Ok(roots.into_iter().map(tag).collect())
    }

    /// Equal-degree splitting of a monic squarefree product of linear factors.
    fn split_linear(&self, rng: &mut ChaCha8Rng, out: &mut Vec<Elem>) {
        let f = &self.ctx;
        match self.degree() {
            None | Some(0) => return,
            Some(1) => {
                out.push(f.neg(self.coeffs[0]));
                return;
            }
            _ => {}
        }
        let deg = self.degree().unwrap();
        loop {
            let delta = f.element(rng.gen_range(1..f.order())).expect("code in range");
            let h = if f.characteristic() == 2 {
                // Absolute trace of delta*X modulo self.
                let mut t = self.wrap(vec![Elem::ZERO, delta]).div_rem_raw(self).unwrap().1;
                let mut acc = t.clone();
                for _ in 1..f.degree() {
                    t = t.mul_raw(&t).div_rem_raw(self).unwrap().1;
                    acc = acc.add_raw(&t);
                }
                acc
            } else {
                let base = self.wrap(vec![delta, Elem::ONE]);
                base.mod_pow_u64((f.order() - 1) / 2, self).add_raw(&Self::constant(f, f.neg(Elem::ONE)))
            };
            let g = self.gcd_raw(&h);
            let dg = g.degree().unwrap_or(0);
            if dg > 0 && dg < deg {
                let other = self.div_rem_raw(&g).unwrap().0;
                g.split_linear(rng, out);
                other.split_linear(rng, out);
                return;
            }
        }
    }

    pub fn distinct_root_count(&self) -> Result<usize, PolyError> {
        Ok(self.roots_in_field()?.len())
    }

    /// Degrees of the irreducible factors of a squarefree polynomial, via
    /// iterated `gcd(f, X^{Q^d} - X)`.
    pub fn ddf_pattern(&self) -> Result<FactorizationPattern, PolyError> {
        let deg = self.degree().filter(|&d| d >= 1).ok_or(PolyError::Constant)?;
        if !self.is_squarefree() {
            return Err(PolyError::NotSquarefree);
        }
        let q = self.ctx.order();
        let x = Self::x(&self.ctx);
        let mut f = self.monic();
        let mut h = x.div_rem_raw(&f)?.1;
        let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
        let mut d = 1usize;
        let mut remaining = deg;
        while remaining >= 2 * d {
            h = h.mod_pow_u64(q, &f);
            let g = f.gcd_raw(&h.add_raw(&x.neg()));
            let dg = g.degree().unwrap_or(0);
            if dg > 0 {
                counts.insert(d as u32, (dg / d) as u32);
                f = f.div_rem_raw(&g)?.0;
                h = h.div_rem_raw(&f)?.1;
                remaining -= dg;
            }
            d += 1;
        }
        if remaining > 0 {
            *counts.entry(remaining as u32).or_insert(0) += 1;
        }
        Ok(FactorizationPattern::from_counts(counts))
    }
}

// --- polynomial families ------------------------------------------------------

fn require_odd(q: u64) -> Result<(), PolyError> {
    if q % 2 == 0 {
        Err(PolyError::EvenQ(q))
    } else {
        Ok(())
    }
}

/// Checks that `q` is a power of the characteristic with GF(q^2) inside the field.
fn require_hermitian_field(ctx: &FieldContext, q: u64) -> Result<(), PolyError> {
    ctx.subfield_degree(q * q)?;
    Ok(())
}

/// `m^{q+1} + (ma - b)^q + (ma - b)`; zero exactly when the line of slope `m`
/// through `(a, b)` is tangent to the Hermitian curve.
pub fn hermitian_tangent_value(ctx: &FieldContext, q: u64, a: Elem, b: Elem, m: Elem) -> Elem {
    let c = ctx.sub(ctx.mul(m, a), b);
    ctx.add(ctx.add(ctx.pow_u64(m, q + 1), ctx.pow_u64(c, q)), c)
}

/// `a^{q+1} + b^q + b`; zero iff `(a, b)` lies on the Hermitian curve.
pub fn hermitian_curve_value(ctx: &FieldContext, q: u64, a: Elem, b: Elem) -> Elem {
    ctx.add(ctx.add(ctx.pow_u64(a, q + 1), ctx.pow_u64(b, q)), b)
}

/// `X^{q+1} + m^q X^q + m X - ((ma - b)^q + ma - b)`: abscissae of the
/// intersections of the Hermitian curve with the line of slope `m` through `(a, b)`.
pub fn hermitian_line_poly(ctx: &Arc<FieldContext>, q: u64, a: Elem, b: Elem, m: Elem) -> Result<Polynomial, PolyError> {
    require_hermitian_field(ctx, q)?;
    let c = ctx.sub(ctx.mul(m, a), b);
    let c0 = ctx.neg(ctx.add(ctx.pow_u64(c, q), c));
    let mut v = vec![Elem::ZERO; q as usize + 2];
    v[0] = c0;
    v[1] = m;
    v[q as usize] = ctx.pow_u64(m, q);
    v[q as usize + 1] = Elem::ONE;
    Ok(Polynomial::new(ctx, v))
}

/// `G(T) = T^{q+1} + (Ta - b)^q + Ta - b`, whose roots are the tangent slopes through `(a, b)`.
pub fn hermitian_tangent_poly(ctx: &Arc<FieldContext>, q: u64, a: Elem, b: Elem) -> Result<Polynomial, PolyError> {
    require_hermitian_field(ctx, q)?;
    let mut v = vec![Elem::ZERO; q as usize + 2];
    v[0] = ctx.neg(ctx.add(ctx.pow_u64(b, q), b));
    v[1] = a;
    v[q as usize] = ctx.add(v[q as usize], ctx.pow_u64(a, q));
    v[q as usize + 1] = Elem::ONE;
    Ok(Polynomial::new(ctx, v))
}

/// `T^q + (a + m^q) T^{q-1} + (m + a^q)` for `(a, b)` on the Hermitian curve.
pub fn hermitian_onpoint_poly(ctx: &Arc<FieldContext>, q: u64, a: Elem, b: Elem, m: Elem) -> Result<Polynomial, PolyError> {
    require_hermitian_field(ctx, q)?;
    if !hermitian_curve_value(ctx, q, a, b).is_zero() {
        return Err(PolyError::NotOnCurve(ctx.format(a), ctx.format(b)));
    }
    let mut v = vec![Elem::ZERO; q as usize + 1];
    v[0] = ctx.add(m, ctx.pow_u64(a, q));
    v[q as usize - 1] = ctx.add(v[q as usize - 1], ctx.add(a, ctx.pow_u64(m, q)));
    v[q as usize] = Elem::ONE;
    Ok(Polynomial::new(ctx, v))
}

/// `2am^2 - 2mb + 1`; zero iff the slope-`m` line through `(a, b)` is tangent to the BKS curve.
pub fn bks_tangent_value(ctx: &FieldContext, a: Elem, b: Elem, m: Elem) -> Elem {
    let two = ctx.from_int(2);
    let t1 = ctx.mul(ctx.mul(two, a), ctx.mul(m, m));
    let t2 = ctx.mul(ctx.mul(two, m), b);
    ctx.add(ctx.sub(t1, t2), Elem::ONE)
}

fn half(ctx: &FieldContext) -> Elem {
    ctx.inv(ctx.from_int(2)).expect("characteristic is odd")
}

/// `2m T^{q+1} + (2m-1) T^q + (2m-1) T + m(2-a) + b - 2`: parameters of the
/// BKS curve points on the line `Y = m(X - a) + b`.
pub fn bks_line_poly(ctx: &Arc<FieldContext>, q: u64, a: Elem, b: Elem, m: Elem) -> Result<Polynomial, PolyError> {
    require_odd(q)?;
    ctx.subfield_degree(q)?;
    if m.is_zero() || m == half(ctx) {
        return Err(PolyError::ExcludedSlope(ctx.format(m)));
    }
    let two = ctx.from_int(2);
    let two_m = ctx.mul(two, m);
    let c1 = ctx.sub(two_m, Elem::ONE);
    let c0 = ctx.add(ctx.mul(m, ctx.sub(two, a)), ctx.sub(b, two));
    let mut v = vec![Elem::ZERO; q as usize + 2];
    v[0] = c0;
    v[1] = c1;
    v[q as usize] = c1;
    v[q as usize + 1] = two_m;
    Ok(Polynomial::new(ctx, v))
}

/// The slope reparametrization `m -> (2m - 1)/(2m)` taking [`bks_line_poly`] to
/// [`bks_line_poly_monic`]; `None` for the excluded slopes 0 and 1/2.
pub fn bks_monic_parameter(ctx: &FieldContext, m: Elem) -> Option<Elem> {
    if m.is_zero() || m == half(ctx) {
        return None;
    }
    let two_m = ctx.mul(ctx.from_int(2), m);
    Some(ctx.div(ctx.sub(two_m, Elem::ONE), two_m).expect("m is nonzero"))
}

/// `T^{q+1} + mu T^q + mu T - (b-2)(mu-1) - a/2 + 1`, the monic form of
/// [`bks_line_poly`] under `mu = (2m-1)/(2m)`.
pub fn bks_line_poly_monic(ctx: &Arc<FieldContext>, q: u64, a: Elem, b: Elem, mu: Elem) -> Result<Polynomial, PolyError> {
    require_odd(q)?;
    ctx.subfield_degree(q)?;
    let two = ctx.from_int(2);
    let prod = ctx.mul(ctx.sub(b, two), ctx.sub(mu, Elem::ONE));
    let c0 = ctx.add(ctx.neg(ctx.add(prod, ctx.mul(a, half(ctx)))), Elem::ONE);
    let mut v = vec![Elem::ZERO; q as usize + 2];
    v[0] = c0;
    v[1] = mu;
    v[q as usize] = mu;
    v[q as usize + 1] = Elem::ONE;
    Ok(Polynomial::new(ctx, v))
}

/// `T^q + (m + t) T^{q-1} + m + t^q`, the pencil polynomial at the curve point with parameter `t`.
pub fn bks_onpoint_poly(ctx: &Arc<FieldContext>, q: u64, t: Elem, m: Elem) -> Result<Polynomial, PolyError> {
    require_odd(q)?;
    ctx.subfield_degree(q)?;
    let mut v = vec![Elem::ZERO; q as usize + 1];
    v[0] = ctx.add(m, ctx.pow_u64(t, q));
    v[q as usize - 1] = ctx.add(v[q as usize - 1], ctx.add(m, t));
    v[q as usize] = Elem::ONE;
    Ok(Polynomial::new(ctx, v))
}

/// The two calibration families whose monodromy is a regular group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CalibrationFamily {
    /// `X^{q+1} + t^{q+1} + 1`; cyclic of order q+1.
    HermitianI,
    /// `X^q - X - omega t^{q+1}`; elementary abelian of order q.
    HermitianII,
}

pub fn calibration_poly(
    ctx: &Arc<FieldContext>,
    family: CalibrationFamily,
    q: u64,
    t: Elem,
    omega: Option<Elem>,
) -> Result<Polynomial, PolyError> {
    ctx.log_p(q)?;
    let tq1 = ctx.pow_u64(t, q + 1);
    match family {
        CalibrationFamily::HermitianI => {
            let mut v = vec![Elem::ZERO; q as usize + 2];
            v[0] = ctx.add(tq1, Elem::ONE);
            v[q as usize + 1] = Elem::ONE;
            Ok(Polynomial::new(ctx, v))
        }
        CalibrationFamily::HermitianII => {
            let w = omega.ok_or(PolyError::BadOmega)?;
            if ctx.pow_u64(w, q - 1) != ctx.neg(Elem::ONE) {
                return Err(PolyError::BadOmega);
            }
            let mut v = vec![Elem::ZERO; q as usize + 1];
            v[0] = ctx.neg(ctx.mul(w, tq1));
            v[1] = ctx.neg(Elem::ONE);
            v[q as usize] = Elem::ONE;
            Ok(Polynomial::new(ctx, v))
        }
    }
}

/// Smallest-code `omega` with `omega^{q-1} = -1`, if the field has one.
pub fn calibration_omega(ctx: &FieldContext, q: u64) -> Option<Elem> {
    let minus_one = ctx.neg(Elem::ONE);
    (1..ctx.order())
        .map(|c| ctx.element(c).expect("code in range"))
        .find(|&w| ctx.pow_u64(w, q - 1) == minus_one)
}

// --- Bluher root law ------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LineFamily {
    Hermitian,
    Bks,
}

#[derive(Clone, Debug)]
pub struct BluherVerdict {
    pub pass: bool,
    pub distinct_roots: usize,
    pub squarefree: bool,
    /// The offending polynomial when `pass` is false.
    pub witness: Option<Polynomial>,
}

/// Checks that the family polynomial at `(a, b, m)` is squarefree and has
/// 0, 1, 2 or q+1 roots in the field.  Degenerate parameters are errors.
pub fn bluher_check(
    ctx: &Arc<FieldContext>,
    family: LineFamily,
    q: u64,
    a: Elem,
    b: Elem,
    m: Elem,
) -> Result<BluherVerdict, PolyError> {
    let f = match family {
        LineFamily::Hermitian => {
            if hermitian_tangent_value(ctx, q, a, b, m).is_zero() {
                return Err(PolyError::Degenerate("m^(q+1) + (ma-b)^q + (ma-b) = 0".into()));
            }
            hermitian_line_poly(ctx, q, a, b, m)?
        }
        LineFamily::Bks => {
            let f = bks_line_poly(ctx, q, a, b, m)?;
            if bks_tangent_value(ctx, a, b, m).is_zero() {
                return Err(PolyError::Degenerate("2am^2 - 2mb + 1 = 0".into()));
            }
            f
        }
    };
    let distinct_roots = f.distinct_root_count()?;
    let squarefree = f.is_squarefree();
    let pass = squarefree && (distinct_roots <= 2 || distinct_roots as u64 == q + 1);
    Ok(BluherVerdict { pass, distinct_roots, squarefree, witness: (!pass).then_some(f) })
}
