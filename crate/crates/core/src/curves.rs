//! Point sets of the Hermitian curve, the BKS curve, the conic `Y^2 = 2XZ`
//! and the BKS nodes, as sorted index lists in a [`Plane`].

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::finite_field::{field_of_order, Elem, FieldContext, FieldError};
use crate::plane::{Plane, PlaneError, ProjectivePoint};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CurveError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Plane(#[from] PlaneError),
    #[error("q = {0} must be odd for the BKS curve")]
    EvenQ(u64),
    #[error("q = {0} is not a prime power")]
    BadQ(u64),
    #[error("r must be at least 1")]
    BadR,
    #[error("malformed arc document: {0}")]
    Document(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Hermitian,
    Bks,
    Custom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    Implicit,
    Parametric,
    Custom,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcMeta {
    pub family: Family,
    pub q: Option<u64>,
    pub r: Option<u32>,
    pub construction: Construction,
}

impl ArcMeta {
    pub fn custom() -> Self {
        ArcMeta { family: Family::Custom, q: None, r: None, construction: Construction::Custom }
    }
}

/// A set of points of a plane, held as strictly increasing point indices.
#[derive(Clone, Debug)]
pub struct PlaneArc {
    plane: Plane,
    points: Vec<u64>,
    meta: ArcMeta,
}

/// Serialized arc: `{family, q, r, construction, field, points: ["(x:y:z)", ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ArcDocument {
    #[serde(flatten)]
    pub meta: ArcMeta,
    pub field: String,
    pub size: usize,
    pub points: Vec<String>,
}

impl PlaneArc {
    /// Sorts and deduplicates; every index must be a plane point.
    pub fn from_indices(plane: &Plane, mut points: Vec<u64>, meta: ArcMeta) -> Result<Self, CurveError> {
        points.sort_unstable();
        points.dedup();
        if let Some(&last) = points.last() {
            if last >= plane.size() {
                return Err(PlaneError::BadIndex(last).into());
            }
        }
        Ok(PlaneArc { plane: plane.clone(), points, meta })
    }

    pub fn plane(&self) -> &Plane {
        &self.plane
    }

    pub fn meta(&self) -> &ArcMeta {
        &self.meta
    }

    pub fn indices(&self) -> &[u64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, idx: u64) -> bool {
        self.points.binary_search(&idx).is_ok()
    }

    pub fn contains_point(&self, p: &ProjectivePoint) -> bool {
        self.contains(self.plane.point_index(p))
    }

    pub fn points(&self) -> Vec<ProjectivePoint> {
        self.points.iter().map(|&i| self.plane.point_at(i).expect("stored indices are valid")).collect()
    }

    /// The union with `extra`, keeping this arc's metadata.
    pub fn union(&self, extra: &[u64]) -> Result<Self, CurveError> {
        let mut all = self.points.clone();
        all.extend_from_slice(extra);
        Self::from_indices(&self.plane, all, self.meta.clone())
    }

    pub fn to_document(&self) -> ArcDocument {
        ArcDocument {
            meta: self.meta.clone(),
            field: self.plane.field().descriptor(),
            size: self.points.len(),
            points: self.points().iter().map(|p| self.plane.format_point(p)).collect(),
        }
    }

    /// Rebuilds an arc in `plane` from a document, checking the field descriptor.
    pub fn from_document(plane: &Plane, doc: &ArcDocument) -> Result<Self, CurveError> {
        if doc.field != plane.field().descriptor() {
            return Err(CurveError::Document(format!("field {} does not match {}", doc.field, plane.field().descriptor())));
        }
        let pts = doc
            .points
            .iter()
            .map(|s| plane.parse_point(s).map(|p| plane.point_index(&p)))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_indices(plane, pts, doc.meta.clone())
    }
}

/// Validates and canonicalizes an arbitrary point set.
pub fn custom_arc(plane: &Plane, points: &[ProjectivePoint]) -> Result<PlaneArc, CurveError> {
    let idx = points.iter().map(|p| plane.point_index(p)).collect();
    PlaneArc::from_indices(plane, idx, ArcMeta::custom())
}

fn check_q(q: u64) -> Result<(), CurveError> {
    crate::finite_field::prime_power(q).map(|_| ()).ok_or(CurveError::BadQ(q))
}

fn plane_of_order(order: u64) -> Result<Plane, CurveError> {
    let ctx = field_of_order(order)?;
    Ok(Plane::new(&ctx)?)
}

/// Size of the Hermitian arc in PG(2, q^{2r}): `q^{2r} + 1 + q^{r+1}(q-1)` for
/// odd `r`, `q^{2r} + 1 - q^{r+1}(q-1)` for even `r`.
pub fn hermitian_arc_size(q: u64, r: u32) -> i128 {
    let q = q as i128;
    let base = q.pow(2 * r) + 1;
    let delta = q.pow(r + 1) * (q - 1);
    if r % 2 == 1 {
        base + delta
    } else {
        base - delta
    }
}

/// Points of `X^{q+1} + Y^q Z + Y Z^q = 0` in PG(2, q^{2r}).
pub fn hermitian_arc(q: u64, r: u32) -> Result<PlaneArc, CurveError> {
    check_q(q)?;
    if r == 0 {
        return Err(CurveError::BadR);
    }
    let order = q.checked_pow(2 * r).ok_or(CurveError::BadQ(q))?;
    let plane = plane_of_order(order)?;
    hermitian_arc_in(&plane, q, r)
}

/// As [`hermitian_arc`], in a caller-supplied plane of order q^{2r}.
pub fn hermitian_arc_in(plane: &Plane, q: u64, r: u32) -> Result<PlaneArc, CurveError> {
    let f = plane.field().clone();
    f.subfield_degree(q * q)?;
    // Preimages of y -> y^q + y, bucketed by image.
    let n = f.order() as usize;
    let mut buckets: Vec<Vec<Elem>> = vec![Vec::new(); n];
    for y in f.elements()? {
        let t = f.add(f.pow_u64(y, q), y);
        buckets[t.code() as usize].push(y);
    }
    let mut pts = Vec::new();
    for x in f.elements()? {
        let rhs = f.neg(f.pow_u64(x, q + 1));
        for &y in &buckets[rhs.code() as usize] {
            pts.push(plane.point_index(&plane.affine_point(x, y)));
        }
    }
    pts.push(plane.point_index(&plane.point(Elem::ZERO, Elem::ONE, Elem::ZERO)?));
    PlaneArc::from_indices(
        plane,
        pts,
        ArcMeta { family: Family::Hermitian, q: Some(q), r: Some(r), construction: Construction::Implicit },
    )
}

fn check_odd(q: u64) -> Result<(), CurveError> {
    check_q(q)?;
    if q % 2 == 0 {
        return Err(CurveError::EvenQ(q));
    }
    Ok(())
}

/// `P(t) = (2(t+1)^{q+1} : 2 + t + t^q : 1)`.
pub fn bks_point(plane: &Plane, q: u64, t: Elem) -> ProjectivePoint {
    let f = plane.field();
    let two = f.from_int(2);
    let x = f.mul(two, f.pow_u64(f.add(t, Elem::ONE), q + 1));
    let y = f.add(f.add(two, t), f.pow_u64(t, q));
    plane.affine_point(x, y)
}

/// `{P(t) : t in GF(q^r)} + {(1:0:0)}`, with `t` and `t^q` merged for
/// `t in GF(q^2) \ GF(q)`.
pub fn bks_arc_parametric(q: u64, r: u32) -> Result<PlaneArc, CurveError> {
    check_odd(q)?;
    if r == 0 {
        return Err(CurveError::BadR);
    }
    let plane = plane_of_order(q.checked_pow(r).ok_or(CurveError::BadQ(q))?)?;
    bks_arc_parametric_in(&plane, q, r)
}

pub fn bks_arc_parametric_in(plane: &Plane, q: u64, r: u32) -> Result<PlaneArc, CurveError> {
    check_odd(q)?;
    let f = plane.field().clone();
    f.subfield_degree(q)?;
    let has_quadratic = f.degree() % (2 * f.log_p(q)?) == 0;
    let mut pts = Vec::with_capacity(f.order() as usize + 1);
    for t in f.elements()? {
        if has_quadratic {
            let tq = f.pow_u64(t, q);
            // P(t) = P(t^q) for conjugate pairs; keep the smaller code.
            if tq != t && f.pow_u64(tq, q) == t && tq < t {
                continue;
            }
        }
        pts.push(plane.point_index(&bks_point(plane, q, t)));
    }
    pts.push(plane.point_index(&plane.point(Elem::ONE, Elem::ZERO, Elem::ZERO)?));
    PlaneArc::from_indices(
        plane,
        pts,
        ArcMeta { family: Family::Bks, q: Some(q), r: Some(r), construction: Construction::Parametric },
    )
}

/// `F(X,Y,Z) = Y^{q+1} - X^q Z - X Z^q + (Y^2 - 2XZ)^{(q+1)/2}` and its three partial derivatives.
pub fn bks_form(f: &FieldContext, q: u64, c: [Elem; 3]) -> [Elem; 4] {
    let [x, y, z] = c;
    let two = f.from_int(2);
    let s = f.sub(f.mul(y, y), f.mul(two, f.mul(x, z)));
    let se = f.pow_u64(s, (q - 1) / 2);
    let xq = f.pow_u64(x, q);
    let zq = f.pow_u64(z, q);
    let yq = f.pow_u64(y, q);
    let value = f.add(
        f.sub(f.sub(f.mul(yq, y), f.mul(xq, z)), f.mul(x, zq)),
        f.mul(se, s),
    );
    let fx = f.neg(f.add(zq, f.mul(z, se)));
    let fy = f.add(yq, f.mul(y, se));
    let fz = f.neg(f.add(xq, f.mul(x, se)));
    [value, fx, fy, fz]
}

/// All points of PG(2, q^r) on the homogenized BKS curve, nodes included.
pub fn bks_arc_implicit(q: u64, r: u32) -> Result<PlaneArc, CurveError> {
    check_odd(q)?;
    if r == 0 {
        return Err(CurveError::BadR);
    }
    let plane = plane_of_order(q.checked_pow(r).ok_or(CurveError::BadQ(q))?)?;
    bks_arc_implicit_in(&plane, q, r)
}

pub fn bks_arc_implicit_in(plane: &Plane, q: u64, r: u32) -> Result<PlaneArc, CurveError> {
    check_odd(q)?;
    let f: Arc<FieldContext> = plane.field().clone();
    f.subfield_degree(q)?;
    let elems: Vec<Elem> = f.elements()?.collect();
    let mut pts: Vec<u64> = elems
        .par_iter()
        .flat_map_iter(|&x| {
            let f = &f;
            let plane = &plane;
            elems.iter().filter_map(move |&y| {
                bks_form(f, q, [x, y, Elem::ONE])[0].is_zero().then(|| plane.point_index(&plane.affine_point(x, y)))
            })
        })
        .collect();
    // On Z = 0 the equation reduces to 2Y^{q+1} = 0.
    pts.push(plane.point_index(&plane.point(Elem::ONE, Elem::ZERO, Elem::ZERO)?));
    PlaneArc::from_indices(
        plane,
        pts,
        ArcMeta { family: Family::Bks, q: Some(q), r: Some(r), construction: Construction::Implicit },
    )
}

/// Normalized points of the subplane PG(2, s) inside `plane`, by index.
pub fn subplane_points(plane: &Plane, s: u64) -> Result<Vec<u64>, CurveError> {
    let sub = plane.field().subfield_elements(s)?;
    let mut out = Vec::with_capacity((s * s + s + 1) as usize);
    for &y in &sub {
        for &z in &sub {
            out.push(plane.point_index(&plane.point(Elem::ONE, y, z)?));
        }
    }
    for &z in &sub {
        out.push(plane.point_index(&plane.point(Elem::ZERO, Elem::ONE, z)?));
    }
    out.push(plane.point_index(&plane.point(Elem::ZERO, Elem::ZERO, Elem::ONE)?));
    out.sort_unstable();
    Ok(out)
}

/// Singular points of the BKS curve; they all lie in PG(2, q).
pub fn node_set(plane: &Plane, q: u64) -> Result<Vec<u64>, CurveError> {
    check_odd(q)?;
    let f = plane.field();
    let mut out = Vec::new();
    for idx in subplane_points(plane, q)? {
        let p = plane.point_at(idx)?;
        if bks_form(f, q, p.0).iter().all(|e| e.is_zero()) {
            out.push(idx);
        }
    }
    Ok(out)
}

/// Points of the conic `Y^2 = 2XZ`: `(1 : y : y^2/2)` and `(0:0:1)`.
pub fn conic_points(plane: &Plane) -> Result<Vec<u64>, CurveError> {
    let f = plane.field();
    let half = f.inv(f.from_int(2))?;
    let mut out: Vec<u64> = f
        .elements()?
        .map(|y| plane.point_index(&plane.point(Elem::ONE, y, f.mul(half, f.mul(y, y))).expect("x = 1")))
        .collect();
    out.push(plane.point_index(&plane.point(Elem::ZERO, Elem::ZERO, Elem::ONE)?));
    out.sort_unstable();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermitian_small_sizes() {
        assert_eq!(hermitian_arc(2, 1).unwrap().len(), 9);
        assert_eq!(hermitian_arc_size(2, 3), 81);
        let h = hermitian_arc(2, 2).unwrap();
        assert_eq!(h.len(), 9);
        assert!(h.points().iter().all(|p| h.plane().in_subplane(p, 4).unwrap()));
    }

    #[test]
    fn bks_sizes_q3() {
        assert_eq!(bks_arc_implicit(3, 1).unwrap().len(), 7);
        for (r, size) in [(2, 7), (4, 79)] {
            let par = bks_arc_parametric(3, r).unwrap();
            assert_eq!(par.len(), size);
            assert_eq!(bks_arc_implicit(3, r).unwrap().indices(), par.indices());
        }
        assert_eq!(bks_arc_implicit(2, 2).unwrap_err(), CurveError::EvenQ(2));
    }

    #[test]
    fn nodes_and_conic() {
        let pg = plane_of_order(9).unwrap();
        assert_eq!(node_set(&pg, 3).unwrap().len(), 3);
        assert_eq!(conic_points(&pg).unwrap().len(), 10);
        let pg5 = plane_of_order(5).unwrap();
        assert_eq!(node_set(&pg5, 5).unwrap().len(), 10);
    }

    #[test]
    fn custom_arc_canonicalizes() {
        let h = hermitian_arc(2, 1).unwrap();
        let pg = h.plane().clone();
        let off = pg.points().find(|p| !h.contains_point(p)).unwrap();
        let mut pts = h.points();
        pts.push(off);
        pts.push(off);
        let c = custom_arc(&pg, &pts).unwrap();
        assert_eq!(c.len(), 10);
        assert_eq!(custom_arc(&pg, &c.points()).unwrap().indices(), c.indices());
        assert_eq!(custom_arc(&pg, &[off]).unwrap().len(), 1);
    }

    #[test]
    fn document_round_trip() {
        let h = hermitian_arc(2, 1).unwrap();
        let doc = h.to_document();
        assert_eq!(doc.points.len(), 9);
        let back = PlaneArc::from_document(h.plane(), &doc).unwrap();
        assert_eq!(back.indices(), h.indices());
        assert_eq!(back.meta(), h.meta());
    }
}
