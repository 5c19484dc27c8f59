//! Exact arithmetic in GF(p^m).
//!
//! Elements are stored as integer codes: the coefficient vector
//! `(c0, c1, ..., c_{m-1})` of the polynomial-basis representative is read as
//! the base-`p` number `c0 + c1*p + ... + c_{m-1}*p^{m-1}`.  Code order is the
//! enumeration order and the order used to pick the default modulus.
//!
//! Small fields get exp/log tables (and, for odd `p`, an addition table);
//! larger ones fall back to schoolbook multiplication modulo the field
//! polynomial.  Subfield, trace and norm computations only ever use Frobenius
//! powering.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

/// Default cap on the number of elements any enumeration may visit.
pub const DEFAULT_ENUMERATION_BOUND: u64 = 20_000_000;

/// Largest field order supported for element arithmetic.
pub const MAX_FIELD_ORDER: u64 = 1 << 30;

const LOG_TABLE_LIMIT: u64 = 1 << 20;
const ADD_TABLE_LIMIT: u64 = 1024;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {0} exceeds the supported maximum {MAX_FIELD_ORDER}")]
    TooLarge(String),
    #[error("modulus must be monic of degree {0} with coefficients below p")]
    BadModulus(u32),
    #[error("modulus {0} is reducible")]
    Reducible(String),
    #[error("elements belong to different fields")]
    ContextMismatch,
    #[error("zero has no inverse")]
    ZeroInverse,
    #[error("{0} is not a power of the characteristic {1}")]
    NotPowerOfP(u64, u32),
    #[error("GF({sub}) is not a subfield of GF({order})")]
    NotSubfield { sub: u64, order: u64 },
    #[error("enumerating {order} elements exceeds the bound {bound}")]
    BoundExceeded { order: u64, bound: u64 },
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("cannot parse field element {0:?}")]
    Parse(String),
    #[error("element code {0} is out of range")]
    BadCode(u64),
}

/// A field element code, meaningful only together with its [`FieldContext`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Elem(u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    #[inline]
    pub fn code(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

struct LogTables {
    // exp has length 2(Q-1) so a product of two logs never needs a reduction.
    exp: Vec<u32>,
    log: Vec<u32>,
}

/// Descriptor and arithmetic engine for GF(p^m).
pub struct FieldContext {
    p: u32,
    m: u32,
    order: u64,
    modulus: Vec<u32>,
    logs: Option<LogTables>,
    add_table: Option<Vec<u16>>,
    neg_table: Option<Vec<u32>>,
    enumeration_bound: u64,
}

impl fmt::Debug for FieldContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.descriptor())
    }
}

impl PartialEq for FieldContext {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.modulus == other.modulus
    }
}

impl Eq for FieldContext {}

/// Builds GF(p^m), choosing the smallest monic irreducible modulus when none is given.
pub fn build_field(p: u32, m: u32, modulus: Option<&[u32]>) -> Result<Arc<FieldContext>, FieldError> {
    FieldContext::new(p, m, modulus, DEFAULT_ENUMERATION_BOUND).map(Arc::new)
}

/// Inverse of [`FieldContext::descriptor`]: `GF(p^m; modulus=c0,...,cm)`.
pub fn field_from_descriptor(s: &str) -> Result<Arc<FieldContext>, FieldError> {
    let bad = || FieldError::Parse(s.to_string());
    let inner = s.trim().strip_prefix("GF(").and_then(|t| t.strip_suffix(')')).ok_or_else(bad)?;
    let (pm, modulus) = inner.split_once("; modulus=").ok_or_else(bad)?;
    let (p, m) = pm.split_once('^').ok_or_else(bad)?;
    let p: u32 = p.parse().map_err(|_| bad())?;
    let m: u32 = m.parse().map_err(|_| bad())?;
    let coeffs = modulus.split(',').map(|c| c.trim().parse::<u32>().map_err(|_| bad())).collect::<Result<Vec<_>, _>>()?;
    build_field(p, m, Some(&coeffs))
}

/// Builds GF(q) for a prime power `q` with the default modulus.
pub fn field_of_order(q: u64) -> Result<Arc<FieldContext>, FieldError> {
    let (p, e) = prime_power(q).ok_or(FieldError::NotPrimePower(q))?;
    build_field(p as u32, e, None)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `n = p^e` with `p` prime, if possible.
pub fn prime_power(n: u64) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    let mut p = 2u64;
    while p * p <= n && n % p != 0 {
        p += 1;
    }
    if n % p != 0 {
        p = n;
    }
    let mut e = 0;
    let mut rest = n;
    while rest % p == 0 {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p, e))
}

fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

impl FieldContext {
    pub fn new(p: u32, m: u32, modulus: Option<&[u32]>, enumeration_bound: u64) -> Result<Self, FieldError> {
        if !is_prime(p as u64) {
            return Err(FieldError::NotPrime(p as u64));
        }
        if m == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let order = (p as u64)
            .checked_pow(m)
            .filter(|&q| q <= MAX_FIELD_ORDER)
            .ok_or_else(|| FieldError::TooLarge(format!("{p}^{m}")))?;
        let modulus = match modulus {
            Some(c) => {
                if c.len() != m as usize + 1 || c[m as usize] != 1 || c.iter().any(|&x| x >= p) {
                    return Err(FieldError::BadModulus(m));
                }
                if !gfp::is_irreducible(c, p) {
                    return Err(FieldError::Reducible(gfp::format(c)));
                }
                c.to_vec()
            }
            None => gfp::smallest_irreducible(p, m),
        };
        let mut ctx = FieldContext {
            p,
            m,
            order,
            modulus,
            logs: None,
            add_table: None,
            neg_table: None,
            enumeration_bound,
        };
        if p != 2 && order <= ADD_TABLE_LIMIT {
            let q = order as u32;
            let mut add = vec![0u16; (q * q) as usize];
            let mut neg = vec![0u32; q as usize];
            for a in 0..q {
                neg[a as usize] = ctx.neg_digits(a);
                for b in 0..q {
                    add[(a * q + b) as usize] = ctx.add_digits(a, b) as u16;
                }
            }
            ctx.add_table = Some(add);
            ctx.neg_table = Some(neg);
        }
        if order <= LOG_TABLE_LIMIT && order > 2 {
            let g = ctx.find_primitive();
            let n = (order - 1) as usize;
            let mut exp = vec![0u32; 2 * n];
            let mut log = vec![0u32; order as usize];
            let mut x = 1u32;
            for i in 0..n {
                exp[i] = x;
                log[x as usize] = i as u32;
                x = ctx.mul_slow(x, g.0);
            }
            for i in n..2 * n {
                exp[i] = exp[i - n];
            }
            ctx.logs = Some(LogTables { exp, log });
        }
        Ok(ctx)
    }

    fn find_primitive(&self) -> Elem {
        if self.order == 2 {
            return Elem::ONE;
        }
        let n = self.order - 1;
        let factors = distinct_prime_factors(n);
        (1..self.order as u32)
            .map(Elem)
            .find(|&g| factors.iter().all(|&l| self.pow_slow(g.0, n / l) != 1))
            .expect("multiplicative group of a finite field is cyclic")
    }

    #[inline]
    pub fn characteristic(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.m
    }

    /// Number of elements Q = p^m.
    #[inline]
    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn order_big(&self) -> BigUint {
        BigUint::from(self.p).pow(self.m)
    }

    /// Modulus coefficients, constant term first, ending with the leading 1.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn enumeration_bound(&self) -> u64 {
        self.enumeration_bound
    }

    /// `GF(p^m; modulus=c0,c1,...,1)`
    pub fn descriptor(&self) -> String {
        let coeffs: Vec<String> = self.modulus.iter().map(|c| c.to_string()).collect();
        format!("GF({}^{}; modulus={})", self.p, self.m, coeffs.join(","))
    }

    pub fn element(&self, code: u64) -> Result<Elem, FieldError> {
        if code >= self.order {
            return Err(FieldError::BadCode(code));
        }
        Ok(Elem(code as u32))
    }

    /// The image of an integer in the prime field.
    pub fn from_int(&self, n: i64) -> Elem {
        Elem(n.rem_euclid(self.p as i64) as u32)
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<Elem, FieldError> {
        if coeffs.len() > self.m as usize || coeffs.iter().any(|&c| c >= self.p) {
            return Err(FieldError::Parse(format!("{coeffs:?}")));
        }
        Ok(Elem(coeffs.iter().rev().fold(0u32, |acc, &c| acc * self.p + c)))
    }

    pub fn coeffs(&self, x: Elem) -> Vec<u32> {
        let mut v = x.0;
        (0..self.m)
            .map(|_| {
                let d = v % self.p;
                v /= self.p;
                d
            })
            .collect()
    }

    /// The class of X modulo the field polynomial.
    pub fn generator(&self) -> Elem {
        if self.m == 1 {
            Elem(self.modulus[0].wrapping_neg().wrapping_add(self.p) % self.p)
        } else {
            Elem(self.p)
        }
    }

    pub fn primitive_element(&self) -> Elem {
        match &self.logs {
            Some(t) if self.order > 2 => Elem(t.exp[1]),
            _ => self.find_primitive(),
        }
    }

    // --- digit-level helpers -------------------------------------------------

    fn add_digits(&self, mut a: u32, mut b: u32) -> u32 {
        let p = self.p;
        let mut r = 0;
        let mut place = 1;
        while a != 0 || b != 0 {
            let s = a % p + b % p;
            r += if s >= p { s - p } else { s } * place;
            a /= p;
            b /= p;
            place *= p;
        }
        r
    }

    fn neg_digits(&self, mut a: u32) -> u32 {
        let p = self.p;
        let mut r = 0;
        let mut place = 1;
        while a != 0 {
            let d = a % p;
            if d != 0 {
                r += (p - d) * place;
            }
            a /= p;
            place *= p;
        }
        r
    }

    fn mul_slow(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let m = self.m as usize;
        if self.p == 2 {
            let (a, b) = (a as u64, b as u64);
            let mut prod = 0u64;
            for i in 0..m {
                if (b >> i) & 1 == 1 {
                    prod ^= a << i;
                }
            }
            let poly = self.modulus.iter().enumerate().fold(0u64, |acc, (i, &c)| acc | ((c as u64) << i));
            for deg in (m..=2 * m - 2).rev() {
                if (prod >> deg) & 1 == 1 {
                    prod ^= poly << (deg - m);
                }
            }
            return prod as u32;
        }
        let p = self.p as u64;
        let da = self.coeffs(Elem(a));
        let db = self.coeffs(Elem(b));
        let mut prod = [0u64; 64];
        for (i, &x) in da.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
            }
        }
        for deg in (m..=2 * m - 2).rev() {
            let c = prod[deg] % p;
            if c == 0 {
                continue;
            }
            for i in 0..m {
                let sub = c * self.modulus[i] as u64 % p;
                prod[deg - m + i] = (prod[deg - m + i] + p - sub) % p;
            }
            prod[deg] = 0;
        }
        (0..m).rev().fold(0u64, |acc, i| acc * p + prod[i] % p) as u32
    }

    fn pow_slow(&self, mut base: u32, mut e: u64) -> u32 {
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_slow(acc, base);
            }
            base = self.mul_slow(base, base);
            e >>= 1;
        }
        acc
    }

    // --- arithmetic ----------------------------------------------------------

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        if self.p == 2 {
            return Elem(a.0 ^ b.0);
        }
        match &self.add_table {
            Some(t) => Elem(t[(a.0 as u64 * self.order + b.0 as u64) as usize] as u32),
            None => Elem(self.add_digits(a.0, b.0)),
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        if self.p == 2 {
            return a;
        }
        match &self.neg_table {
            Some(t) => Elem(t[a.0 as usize]),
            None => Elem(self.neg_digits(a.0)),
        }
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a.0 == 0 || b.0 == 0 {
            return Elem::ZERO;
        }
        match &self.logs {
            Some(t) => Elem(t.exp[(t.log[a.0 as usize] + t.log[b.0 as usize]) as usize]),
            None => Elem(self.mul_slow(a.0, b.0)),
        }
    }

    pub fn inv(&self, a: Elem) -> Result<Elem, FieldError> {
        if a.is_zero() {
            return Err(FieldError::ZeroInverse);
        }
        Ok(match &self.logs {
            Some(t) => {
                let n = (self.order - 1) as u32;
                Elem(t.exp[((n - t.log[a.0 as usize]) % n) as usize])
            }
            None => Elem(self.pow_slow(a.0, self.order - 2)),
        })
    }

    /// Division; `b` must be nonzero.
    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow_u64(&self, a: Elem, e: u64) -> Elem {
        if e == 0 {
            return Elem::ONE;
        }
        if a.is_zero() {
            return Elem::ZERO;
        }
        let n = self.order - 1;
        match &self.logs {
            Some(t) => {
                let l = (t.log[a.0 as usize] as u64 * (e % n)) % n;
                Elem(t.exp[l as usize])
            }
            None => Elem(self.pow_slow(a.0, e % n)),
        }
    }

    /// `a^e` for an arbitrary-precision exponent.
    pub fn pow(&self, a: Elem, e: &BigUint) -> Elem {
        if e.is_zero() {
            return Elem::ONE;
        }
        if a.is_zero() {
            return Elem::ZERO;
        }
        let reduced = (e % (self.order - 1)).to_u64().expect("reduced exponent fits in u64");
        if reduced == 0 {
            return Elem::ONE;
        }
        self.pow_u64(a, reduced)
    }

    /// The exponent `j` with `s = p^j`.
    pub fn log_p(&self, s: u64) -> Result<u32, FieldError> {
        let mut j = 0;
        let mut v = s;
        while v > 1 && v % self.p as u64 == 0 {
            v /= self.p as u64;
            j += 1;
        }
        if v != 1 {
            return Err(FieldError::NotPowerOfP(s, self.p));
        }
        Ok(j)
    }

    /// Degree `j` of the subfield GF(s), s = p^j, checking `j | m`.
    pub fn subfield_degree(&self, s: u64) -> Result<u32, FieldError> {
        let j = self.log_p(s).map_err(|_| FieldError::NotSubfield { sub: s, order: self.order })?;
        if j == 0 || self.m % j != 0 {
            return Err(FieldError::NotSubfield { sub: s, order: self.order });
        }
        Ok(j)
    }

    /// `x^s` for `s` a power of the characteristic.
    pub fn frobenius(&self, x: Elem, s: u64) -> Result<Elem, FieldError> {
        let j = self.log_p(s)? % self.m;
        Ok(self.pow_u64(x, (self.p as u64).pow(j)))
    }

    pub fn in_subfield(&self, x: Elem, s: u64) -> Result<bool, FieldError> {
        self.subfield_degree(s)?;
        Ok(self.pow_u64(x, s) == x)
    }

    /// Trace from GF(Q) down to GF(s).
    pub fn rel_trace(&self, x: Elem, s: u64) -> Result<Elem, FieldError> {
        let j = self.subfield_degree(s)?;
        let mut acc = Elem::ZERO;
        let mut y = x;
        for _ in 0..self.m / j {
            acc = self.add(acc, y);
            y = self.pow_u64(y, s);
        }
        Ok(acc)
    }

    /// Norm from GF(Q) down to GF(s).
    pub fn rel_norm(&self, x: Elem, s: u64) -> Result<Elem, FieldError> {
        let j = self.subfield_degree(s)?;
        let mut acc = Elem::ONE;
        let mut y = x;
        for _ in 0..self.m / j {
            acc = self.mul(acc, y);
            y = self.pow_u64(y, s);
        }
        Ok(acc)
    }

    /// Whether `x` is a nonzero `k`-th power.
    pub fn is_nonzero_power(&self, x: Elem, k: u64) -> bool {
        if x.is_zero() {
            return false;
        }
        let n = self.order - 1;
        let g = num_integer::gcd(k, n);
        self.pow_u64(x, n / g) == Elem::ONE
    }

    /// All elements in code order.
    pub fn elements(&self) -> Result<impl Iterator<Item = Elem> + Clone, FieldError> {
        if self.order > self.enumeration_bound {
            return Err(FieldError::BoundExceeded { order: self.order, bound: self.enumeration_bound });
        }
        Ok((0..self.order as u32).map(Elem))
    }

    /// Elements of the subfield GF(s) in code order of the ambient field.
    pub fn subfield_elements(&self, s: u64) -> Result<Vec<Elem>, FieldError> {
        self.subfield_degree(s)?;
        if s == self.order {
            return Ok(self.elements()?.collect());
        }
        // GF(s)* is generated by g^((Q-1)/(s-1)).
        let g = self.primitive_element();
        let h = self.pow_u64(g, (self.order - 1) / (s - 1));
        let mut out = Vec::with_capacity(s as usize);
        out.push(Elem::ZERO);
        let mut x = Elem::ONE;
        for _ in 0..s - 1 {
            out.push(x);
            x = self.mul(x, h);
        }
        out.sort_unstable();
        Ok(out)
    }

    // --- text form -----------------------------------------------------------

    /// Polynomial-basis notation, lowest degree first: `1+2*g+g^2`.
    pub fn format(&self, x: Elem) -> String {
        if x.is_zero() {
            return "0".to_string();
        }
        if self.m == 1 {
            return x.0.to_string();
        }
        let mut terms = Vec::new();
        for (i, c) in self.coeffs(x).into_iter().enumerate() {
            if c == 0 {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => "g".to_string(),
                _ => format!("g^{i}"),
            };
            terms.push(match (c, i) {
                (_, 0) => c.to_string(),
                (1, _) => mono,
                _ => format!("{c}*{mono}"),
            });
        }
        terms.join("+")
    }

    /// Inverse of [`format`](Self::format); also accepts `#<code>`.
    pub fn parse(&self, s: &str) -> Result<Elem, FieldError> {
        let err = || FieldError::Parse(s.to_string());
        let s = s.trim();
        if let Some(code) = s.strip_prefix('#') {
            let code: u64 = code.parse().map_err(|_| err())?;
            return self.element(code);
        }
        let mut coeffs = vec![0u64; self.m as usize];
        for term in s.split('+') {
            let term = term.trim();
            if term.is_empty() {
                return Err(err());
            }
            let (coef, mono) = match term.split_once('*') {
                Some((c, m)) => (c.trim().parse::<u64>().map_err(|_| err())?, Some(m.trim())),
                None if term.starts_with('g') => (1, Some(term)),
                None => (term.parse::<u64>().map_err(|_| err())?, None),
            };
            let deg = match mono {
                None => 0,
                Some("g") => 1,
                Some(m) => m.strip_prefix("g^").and_then(|d| d.parse::<usize>().ok()).ok_or_else(err)?,
            };
            if deg >= self.m as usize || (deg > 0 && self.m == 1) {
                return Err(err());
            }
            coeffs[deg] = (coeffs[deg] + coef) % self.p as u64;
        }
        Ok(Elem(coeffs.iter().rev().fold(0u64, |acc, &c| acc * self.p as u64 + c) as u32))
    }
}

/// A field element bundled with its context; operations check that both
/// operands live in the same field.
#[derive(Clone)]
pub struct FieldElement {
    ctx: Arc<FieldContext>,
    value: Elem,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.ctx.format(self.value))
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.ctx.format(self.value))
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value && (Arc::ptr_eq(&self.ctx, &other.ctx) || *self.ctx == *other.ctx)
    }
}

impl Eq for FieldElement {}

impl FieldElement {
    pub fn new(ctx: &Arc<FieldContext>, value: Elem) -> Self {
        FieldElement { ctx: ctx.clone(), value }
    }

    pub fn zero(ctx: &Arc<FieldContext>) -> Self {
        Self::new(ctx, Elem::ZERO)
    }

    pub fn one(ctx: &Arc<FieldContext>) -> Self {
        Self::new(ctx, Elem::ONE)
    }

    pub fn context(&self) -> &Arc<FieldContext> {
        &self.ctx
    }

    pub fn value(&self) -> Elem {
        self.value
    }

    pub fn coeffs(&self) -> Vec<u32> {
        self.ctx.coeffs(self.value)
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    fn same(&self, other: &Self) -> Result<(), FieldError> {
        if Arc::ptr_eq(&self.ctx, &other.ctx) || *self.ctx == *other.ctx {
            Ok(())
        } else {
            Err(FieldError::ContextMismatch)
        }
    }

    fn wrap(&self, value: Elem) -> Self {
        FieldElement { ctx: self.ctx.clone(), value }
    }

    pub fn add(&self, other: &Self) -> Result<Self, FieldError> {
        self.same(other)?;
        Ok(self.wrap(self.ctx.add(self.value, other.value)))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, FieldError> {
        self.same(other)?;
        Ok(self.wrap(self.ctx.sub(self.value, other.value)))
    }

    pub fn mul(&self, other: &Self) -> Result<Self, FieldError> {
        self.same(other)?;
        Ok(self.wrap(self.ctx.mul(self.value, other.value)))
    }

    pub fn neg(&self) -> Self {
        self.wrap(self.ctx.neg(self.value))
    }

    pub fn inv(&self) -> Result<Self, FieldError> {
        Ok(self.wrap(self.ctx.inv(self.value)?))
    }

    pub fn pow(&self, e: &BigUint) -> Self {
        self.wrap(self.ctx.pow(self.value, e))
    }

    pub fn frobenius(&self, s: u64) -> Result<Self, FieldError> {
        Ok(self.wrap(self.ctx.frobenius(self.value, s)?))
    }

    pub fn in_subfield(&self, s: u64) -> Result<bool, FieldError> {
        self.ctx.in_subfield(self.value, s)
    }

    pub fn rel_trace(&self, s: u64) -> Result<Self, FieldError> {
        Ok(self.wrap(self.ctx.rel_trace(self.value, s)?))
    }

    pub fn rel_norm(&self, s: u64) -> Result<Self, FieldError> {
        Ok(self.wrap(self.ctx.rel_norm(self.value, s)?))
    }
}

/// Dense polynomials over the prime field, used only to vet and pick moduli.
mod gfp {
    fn trim(v: &mut Vec<u64>) {
        while v.last() == Some(&0) {
            v.pop();
        }
    }

    fn rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut r = a.to_vec();
        trim(&mut r);
        let db = b.len() - 1;
        let inv = inv_mod(b[db], p);
        while r.len() > db {
            let d = r.len() - 1;
            let c = r[d] * inv % p;
            for i in 0..=db {
                r[d - db + i] = (r[d - db + i] + p - c * b[i] % p) % p;
            }
            trim(&mut r);
        }
        r
    }

    fn mulmod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut prod = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        rem(&prod, f, p)
    }

    fn inv_mod(a: u64, p: u64) -> u64 {
        let mut acc = 1;
        let mut base = a % p;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        acc
    }

    fn gcd(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> Vec<u64> {
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    /// Ben-Or: f of degree m is irreducible iff gcd(f, X^{p^i} - X) = 1 for i <= m/2.
    pub fn is_irreducible(f: &[u32], p: u32) -> bool {
        let p = p as u64;
        let f: Vec<u64> = f.iter().map(|&c| c as u64).collect();
        let m = f.len() - 1;
        if m == 1 {
            return true;
        }
        if f[0] == 0 {
            return false;
        }
        let x = rem(&[0, 1], &f, p);
        let mut h = x.clone();
        for _ in 1..=m / 2 {
            // h <- h^p mod f
            let mut acc = vec![1u64];
            let mut base = h.clone();
            let mut e = p;
            while e > 0 {
                if e & 1 == 1 {
                    acc = mulmod(&acc, &base, &f, p);
                }
                base = mulmod(&base, &base, &f, p);
                e >>= 1;
            }
            h = acc;
            let mut diff = h.clone();
            diff.resize(diff.len().max(2), 0);
            diff[1] = (diff[1] + p - 1) % p;
            if gcd(f.clone(), diff, p).len() > 1 {
                return false;
            }
        }
        true
    }

    pub fn smallest_irreducible(p: u32, m: u32) -> Vec<u32> {
        let count = (p as u64).pow(m);
        (0..count)
            .map(|code| {
                let mut c: Vec<u32> = Vec::with_capacity(m as usize + 1);
                let mut v = code;
                for _ in 0..m {
                    c.push((v % p as u64) as u32);
                    v /= p as u64;
                }
                c.push(1);
                c
            })
            .find(|c| is_irreducible(c, p))
            .expect("irreducible polynomials exist in every degree")
    }

    pub fn format(c: &[u32]) -> String {
        c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_moduli() {
        assert_eq!(build_field(2, 1, None).unwrap().modulus(), &[0, 1]);
        assert_eq!(build_field(2, 4, None).unwrap().modulus(), &[1, 1, 0, 0, 1]);
        assert_eq!(build_field(3, 2, None).unwrap().modulus(), &[1, 0, 1]);
        assert_eq!(build_field(2, 2, None).unwrap().descriptor(), "GF(2^2; modulus=1,1,1)");
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(build_field(4, 1, None).unwrap_err(), FieldError::NotPrime(4));
        assert!(matches!(build_field(2, 2, Some(&[1, 0, 1])), Err(FieldError::Reducible(_))));
        assert!(matches!(build_field(3, 2, Some(&[1, 0, 2])), Err(FieldError::BadModulus(2))));
        assert!(matches!(build_field(2, 31, None), Err(FieldError::TooLarge(_))));
    }

    #[test]
    fn gf4_products() {
        let f = build_field(2, 2, None).unwrap();
        let a = f.generator();
        assert_eq!(f.mul(a, a), f.add(a, Elem::ONE));
        assert_eq!(f.inv(Elem::ONE).unwrap(), Elem::ONE);
        assert_eq!(f.inv(Elem::ZERO), Err(FieldError::ZeroInverse));
        assert_eq!(f.rel_trace(a, 2).unwrap(), Elem::ONE);
    }

    #[test]
    fn gf9_frobenius_negates_generator() {
        let f = build_field(3, 2, None).unwrap();
        let a = f.generator();
        assert_eq!(f.frobenius(a, 3).unwrap(), f.neg(a));
        assert_eq!(f.frobenius(Elem::ZERO, 3).unwrap(), Elem::ZERO);
        assert!(matches!(f.frobenius(a, 6), Err(FieldError::NotPowerOfP(6, 3))));
    }

    #[test]
    fn gf81_primitive_not_in_gf9() {
        let f = build_field(3, 4, None).unwrap();
        let g = f.primitive_element();
        assert!(!f.in_subfield(g, 9).unwrap());
        assert!(f.in_subfield(Elem::ONE, 3).unwrap());
        assert!(matches!(f.in_subfield(g, 27), Err(FieldError::NotSubfield { .. })));
        assert_eq!(f.subfield_elements(9).unwrap().len(), 9);
    }

    #[test]
    fn slow_and_table_paths_agree() {
        let f = build_field(3, 5, None).unwrap();
        for a in 0..f.order() as u32 {
            let b = (a * 7 + 11) % f.order() as u32;
            assert_eq!(f.mul(Elem(a), Elem(b)).0, f.mul_slow(a, b));
            assert_eq!(f.add(Elem(a), Elem(b)).0, f.add_digits(a, b));
        }
    }

    #[test]
    fn text_round_trip() {
        let f = build_field(3, 3, None).unwrap();
        for x in f.elements().unwrap() {
            assert_eq!(f.parse(&f.format(x)).unwrap(), x);
        }
        assert_eq!(f.parse("#5").unwrap(), Elem(5));
        assert!(f.parse("g^3").is_err());
    }

    #[test]
    fn enumeration_order_and_bound() {
        let f = build_field(2, 2, None).unwrap();
        let all: Vec<_> = f.elements().unwrap().collect();
        assert_eq!(all.len(), 4);
        assert_eq!(all[0], Elem::ZERO);
        let small = FieldContext::new(2, 4, None, 8).unwrap();
        assert!(matches!(small.elements(), Err(FieldError::BoundExceeded { .. })));
    }

    #[test]
    fn checked_elements_detect_mismatch() {
        let a = build_field(2, 2, None).unwrap();
        let b = build_field(3, 1, None).unwrap();
        let x = FieldElement::one(&a);
        let y = FieldElement::one(&b);
        assert_eq!(x.add(&y), Err(FieldError::ContextMismatch));
        let a2 = build_field(2, 2, None).unwrap();
        assert_eq!(x.add(&FieldElement::one(&a2)).unwrap(), FieldElement::zero(&a));
    }

    #[test]
    fn descriptor_round_trip() {
        let f = build_field(3, 4, None).unwrap();
        let g = field_from_descriptor(&f.descriptor()).unwrap();
        assert_eq!(g.descriptor(), f.descriptor());
        assert!(field_from_descriptor("GF(4)").is_err());
    }
}
