//! The projective plane PG(2, Q) over a [`FieldContext`].
//!
//! Points and lines are normalized so the first nonzero coordinate is 1 and
//! are indexed by a mixed-radix code:
//!
//! ```text
//! (1:y:z) -> y*Q + z
//! (0:1:z) -> Q^2 + z
//! (0:0:1) -> Q^2 + Q
//! ```
//!
//! Lines `[u:v:w]` use the same code on their dual coordinates.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::finite_field::{Elem, FieldContext, FieldError};

/// Default largest plane order accepted by [`Plane::new`].
pub const DEFAULT_MAX_PLANE_ORDER: u64 = 1024;

/// Environment variable overriding [`DEFAULT_MAX_PLANE_ORDER`].
pub const MAX_PLANE_ENV: &str = "ARCFORGE_MAX_PLANE";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlaneError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("PG(2,{order}) exceeds the plane bound {bound}")]
    TooLarge { order: u64, bound: u64 },
    #[error("the zero vector is not a projective point or line")]
    ZeroVector,
    #[error("join or meet of identical arguments")]
    Identical,
    #[error("index {0} is out of range")]
    BadIndex(u64),
    #[error("cannot parse point {0:?}")]
    Parse(String),
}

/// A normalized homogeneous triple.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjectivePoint(pub [Elem; 3]);

/// A normalized dual triple `[u:v:w]`, incident with `(x:y:z)` iff `ux+vy+wz = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjectiveLine(pub [Elem; 3]);

/// Resolves the plane bound from [`MAX_PLANE_ENV`], falling back to the default.
pub fn max_plane_order() -> u64 {
    std::env::var(MAX_PLANE_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_PLANE_ORDER)
}

#[derive(Clone)]
pub struct Plane {
    ctx: Arc<FieldContext>,
    q: u64,
}

impl fmt::Debug for Plane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PG(2,{})", self.q)
    }
}

impl PartialEq for Plane {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.ctx, &other.ctx) || *self.ctx == *other.ctx
    }
}

impl Plane {
    /// Uses the bound from [`max_plane_order`].
    pub fn new(ctx: &Arc<FieldContext>) -> Result<Self, PlaneError> {
        Self::with_bound(ctx, max_plane_order())
    }

    pub fn with_bound(ctx: &Arc<FieldContext>, bound: u64) -> Result<Self, PlaneError> {
        let q = ctx.order();
        if q > bound {
            return Err(PlaneError::TooLarge { order: q, bound });
        }
        Ok(Plane { ctx: ctx.clone(), q })
    }

    pub fn field(&self) -> &Arc<FieldContext> {
        &self.ctx
    }

    pub fn order(&self) -> u64 {
        self.q
    }

    /// Q^2 + Q + 1, the number of points and of lines.
    pub fn size(&self) -> u64 {
        self.q * self.q + self.q + 1
    }

    fn normalize(&self, c: [Elem; 3]) -> Result<[Elem; 3], PlaneError> {
        let f = &self.ctx;
        let lead = c.iter().copied().find(|e| !e.is_zero()).ok_or(PlaneError::ZeroVector)?;
        if lead == Elem::ONE {
            return Ok(c);
        }
        let inv = f.inv(lead)?;
        Ok([f.mul(c[0], inv), f.mul(c[1], inv), f.mul(c[2], inv)])
    }

    pub fn point(&self, x: Elem, y: Elem, z: Elem) -> Result<ProjectivePoint, PlaneError> {
        Ok(ProjectivePoint(self.normalize([x, y, z])?))
    }

    pub fn line(&self, u: Elem, v: Elem, w: Elem) -> Result<ProjectiveLine, PlaneError> {
        Ok(ProjectiveLine(self.normalize([u, v, w])?))
    }

    /// The point `(x:y:1)`.
    pub fn affine_point(&self, x: Elem, y: Elem) -> ProjectivePoint {
        self.point(x, y, Elem::ONE).expect("z = 1 is nonzero")
    }

    /// Affine coordinates `(x/z, y/z)` when `z != 0`.
    pub fn to_affine(&self, p: &ProjectivePoint) -> Option<(Elem, Elem)> {
        let [x, y, z] = p.0;
        let zi = self.ctx.inv(z).ok()?;
        Some((self.ctx.mul(x, zi), self.ctx.mul(y, zi)))
    }

    fn encode(&self, c: &[Elem; 3]) -> u64 {
        let q = self.q;
        if c[0] == Elem::ONE {
            c[1].code() as u64 * q + c[2].code() as u64
        } else if c[1] == Elem::ONE {
            q * q + c[2].code() as u64
        } else {
            q * q + q
        }
    }

    fn decode(&self, idx: u64) -> Result<[Elem; 3], PlaneError> {
        let q = self.q;
        let e = |c: u64| self.ctx.element(c).expect("code below Q");
        if idx < q * q {
            Ok([Elem::ONE, e(idx / q), e(idx % q)])
        } else if idx < q * q + q {
            Ok([Elem::ZERO, Elem::ONE, e(idx - q * q)])
        } else if idx == q * q + q {
            Ok([Elem::ZERO, Elem::ZERO, Elem::ONE])
        } else {
            Err(PlaneError::BadIndex(idx))
        }
    }

    pub fn point_index(&self, p: &ProjectivePoint) -> u64 {
        self.encode(&p.0)
    }

    pub fn line_index(&self, l: &ProjectiveLine) -> u64 {
        self.encode(&l.0)
    }

    pub fn point_at(&self, idx: u64) -> Result<ProjectivePoint, PlaneError> {
        self.decode(idx).map(ProjectivePoint)
    }

    pub fn line_at(&self, idx: u64) -> Result<ProjectiveLine, PlaneError> {
        self.decode(idx).map(ProjectiveLine)
    }

    fn dot(&self, a: &[Elem; 3], b: &[Elem; 3]) -> Elem {
        let f = &self.ctx;
        f.add(f.add(f.mul(a[0], b[0]), f.mul(a[1], b[1])), f.mul(a[2], b[2]))
    }

    pub fn incident(&self, p: &ProjectivePoint, l: &ProjectiveLine) -> bool {
        self.dot(&p.0, &l.0).is_zero()
    }

    fn cross(&self, a: &[Elem; 3], b: &[Elem; 3]) -> [Elem; 3] {
        let f = &self.ctx;
        let m = |i: usize, j: usize| f.sub(f.mul(a[i], b[j]), f.mul(a[j], b[i]));
        [m(1, 2), m(2, 0), m(0, 1)]
    }

    /// The line through two distinct points.
    pub fn join(&self, p: &ProjectivePoint, r: &ProjectivePoint) -> Result<ProjectiveLine, PlaneError> {
        if p == r {
            return Err(PlaneError::Identical);
        }
        Ok(ProjectiveLine(self.normalize(self.cross(&p.0, &r.0))?))
    }

    /// Index of the joining line, for points already known to differ.
    pub(crate) fn join_index(&self, p: &ProjectivePoint, r: &ProjectivePoint) -> u64 {
        self.encode(&self.normalize(self.cross(&p.0, &r.0)).expect("points are distinct"))
    }

    /// The intersection of two distinct lines.
    pub fn meet(&self, l: &ProjectiveLine, m: &ProjectiveLine) -> Result<ProjectivePoint, PlaneError> {
        if l == m {
            return Err(PlaneError::Identical);
        }
        Ok(ProjectivePoint(self.normalize(self.cross(&l.0, &m.0))?))
    }

    /// Calls `visit` with the index of every point incident with the dual triple `c`,
    /// which must already be normalized.
    fn for_each_incident(&self, c: &[Elem; 3], mut visit: impl FnMut(u64)) {
        let f = &self.ctx;
        let q = self.q;
        let [u, v, w] = *c;
        let codes = (0..q as u32).map(|k| f.element(k as u64).expect("code below Q"));
        if u == Elem::ONE {
            if !w.is_zero() {
                // z = -(1 + v*y)/w
                let winv = f.inv(w).expect("w is nonzero");
                let c0 = f.neg(winv);
                let c1 = f.neg(f.mul(v, winv));
                for y in codes {
                    let z = f.add(c0, f.mul(c1, y));
                    visit(y.code() as u64 * q + z.code() as u64);
                }
                visit(q * q + c1.code() as u64);
            } else if !v.is_zero() {
                let y = f.neg(f.inv(v).expect("v is nonzero"));
                for z in codes {
                    visit(y.code() as u64 * q + z.code() as u64);
                }
                visit(q * q + q);
            } else {
                for z in 0..q {
                    visit(q * q + z);
                }
                visit(q * q + q);
            }
        } else if v == Elem::ONE {
            // y = -w*z
            let nw = f.neg(w);
            for z in codes {
                visit(f.mul(nw, z).code() as u64 * q + z.code() as u64);
            }
            if w.is_zero() {
                visit(q * q + q);
            } else {
                visit(q * q + f.neg(f.inv(w).expect("w is nonzero")).code() as u64);
            }
        } else {
            for y in 0..q {
                visit(y * q);
            }
            visit(q * q);
        }
    }

    /// Indices of the Q+1 points on `l`.
    pub fn for_each_point_on(&self, l: &ProjectiveLine, visit: impl FnMut(u64)) {
        self.for_each_incident(&l.0, visit);
    }

    /// Indices of the Q+1 lines through `p`.
    pub fn for_each_line_through(&self, p: &ProjectivePoint, visit: impl FnMut(u64)) {
        self.for_each_incident(&p.0, visit);
    }

    pub fn points_on(&self, l: &ProjectiveLine) -> Vec<ProjectivePoint> {
        let mut out = Vec::with_capacity(self.q as usize + 1);
        self.for_each_point_on(l, |i| out.push(self.point_at(i).expect("valid index")));
        out
    }

    pub fn pencil(&self, p: &ProjectivePoint) -> Vec<ProjectiveLine> {
        let mut out = Vec::with_capacity(self.q as usize + 1);
        self.for_each_line_through(p, |i| out.push(self.line_at(i).expect("valid index")));
        out
    }

    /// True iff every normalized coordinate lies in GF(s).
    pub fn in_subplane(&self, p: &ProjectivePoint, s: u64) -> Result<bool, PlaneError> {
        for &c in &p.0 {
            if !self.ctx.in_subfield(c, s)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn points(&self) -> impl Iterator<Item = ProjectivePoint> + '_ {
        (0..self.size()).map(|i| self.point_at(i).expect("valid index"))
    }

    pub fn lines(&self) -> impl Iterator<Item = ProjectiveLine> + '_ {
        (0..self.size()).map(|i| self.line_at(i).expect("valid index"))
    }

    /// `(x:y:z)` in polynomial-basis notation.
    pub fn format_point(&self, p: &ProjectivePoint) -> String {
        let [x, y, z] = p.0;
        format!("({}:{}:{})", self.ctx.format(x), self.ctx.format(y), self.ctx.format(z))
    }

    pub fn format_line(&self, l: &ProjectiveLine) -> String {
        let [u, v, w] = l.0;
        format!("[{}:{}:{}]", self.ctx.format(u), self.ctx.format(v), self.ctx.format(w))
    }

    /// Inverse of [`format_point`](Self::format_point); the result is normalized.
    pub fn parse_point(&self, s: &str) -> Result<ProjectivePoint, PlaneError> {
        let err = || PlaneError::Parse(s.to_string());
        let inner = s.trim().strip_prefix('(').and_then(|t| t.strip_suffix(')')).ok_or_else(err)?;
        let parts: Vec<&str> = inner.split(':').collect();
        if parts.len() != 3 {
            return Err(err());
        }
        let mut c = [Elem::ZERO; 3];
        for (slot, part) in c.iter_mut().zip(parts) {
            *slot = self.ctx.parse(part).map_err(|_| err())?;
        }
        self.point(c[0], c[1], c[2])
    }
}
