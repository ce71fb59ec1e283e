//! The ambient Kähler surface S²(c1) × S²(c2) sitting inside ℝ⁶ = ℝ³ × ℝ³.
//!
//! Points and tangent vectors are stored as plain `Vector6` values whose first
//! three entries live in the first factor. The complex structure acts on each
//! factor by a scaled cross product with the position vector, and the product
//! structure `P` flips the sign of the first factor.

use nalgebra::{Vector3, Vector6};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{GeomError, Result};

pub type Vec3 = Vector3<f64>;
pub type Vec6 = Vector6<f64>;
/// Componentwise complexification of an ambient vector.
pub type CVec6 = Vector6<Complex64>;

/// Relative tolerance for points to count as lying on S²(c1) × S²(c2).
pub const ON_MANIFOLD_TOL: f64 = 1e-12;
/// Relative tolerance used by [`Ambient::j`] to reject non-tangent input.
pub const TANGENCY_TOL: f64 = 1e-8;

/// The curvature pair of the two sphere factors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Params {
    c1: f64,
    c2: f64,
}

impl Params {
    /// Rejects anything but `c1 > c2 > 0`.
    pub fn new(c1: f64, c2: f64) -> Result<Self> {
        if !(c1.is_finite() && c2.is_finite() && c2 > 0.0 && c1 > c2) {
            return Err(GeomError::InvalidParams { c1, c2 });
        }
        Ok(Self { c1, c2 })
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }

    /// `c1 - c2`, strictly positive.
    pub fn diff(&self) -> f64 {
        self.c1 - self.c2
    }

    /// `c1 + c2`.
    pub fn sum(&self) -> f64 {
        self.c1 + self.c2
    }

    /// The double point `a = ((0,0,1/√c1), (0,0,1/√c2))` of the catalog immersions.
    pub fn base_point(&self) -> ProductPoint {
        ProductPoint {
            p1: Vec3::new(0.0, 0.0, 1.0 / self.c1.sqrt()),
            p2: Vec3::new(0.0, 0.0, 1.0 / self.c2.sqrt()),
        }
    }

    /// `â = (-a1, a2)`.
    pub fn twisted_base_point(&self) -> Vec6 {
        let a = self.base_point();
        ProductPoint::join(&-a.p1, &a.p2)
    }
}

/// A point of S²(c1) × S²(c2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductPoint {
    pub p1: Vec3,
    pub p2: Vec3,
}

impl ProductPoint {
    pub fn new(params: &Params, p1: Vec3, p2: Vec3) -> Result<Self> {
        let pt = Self { p1, p2 };
        let residual = pt.manifold_residual(params);
        if !(residual <= ON_MANIFOLD_TOL) {
            return Err(GeomError::OffManifold { residual });
        }
        Ok(pt)
    }

    pub fn from_vec6(params: &Params, v: &Vec6) -> Result<Self> {
        let (p1, p2) = Self::split(v);
        Self::new(params, p1, p2)
    }

    pub fn to_vec6(&self) -> Vec6 {
        Self::join(&self.p1, &self.p2)
    }

    /// Relative defect `max_i | c_i |p_i|² - 1 |`.
    pub fn manifold_residual(&self, params: &Params) -> f64 {
        let r1 = (params.c1 * self.p1.norm_squared() - 1.0).abs();
        let r2 = (params.c2 * self.p2.norm_squared() - 1.0).abs();
        r1.max(r2)
    }

    pub fn split(v: &Vec6) -> (Vec3, Vec3) {
        (
            Vec3::new(v[0], v[1], v[2]),
            Vec3::new(v[3], v[4], v[5]),
        )
    }

    pub fn join(a: &Vec3, b: &Vec3) -> Vec6 {
        Vec6::new(a[0], a[1], a[2], b[0], b[1], b[2])
    }
}

/// Which unit normal of each sphere factor the complex structure rotates about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum JOrientation {
    /// `J u = √c (p × u)`.
    Outward,
    /// `J u = -√c (p × u)`.
    Inward,
}

impl JOrientation {
    pub fn sign(self) -> f64 {
        match self {
            JOrientation::Outward => 1.0,
            JOrientation::Inward => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            JOrientation::Outward => JOrientation::Inward,
            JOrientation::Inward => JOrientation::Outward,
        }
    }
}

/// The product P(v1, v2) = (-v1, v2).
pub fn apply_p(v: &Vec6) -> Vec6 {
    Vec6::new(-v[0], -v[1], -v[2], v[3], v[4], v[5])
}

pub fn apply_p_complex(v: &CVec6) -> CVec6 {
    CVec6::new(-v[0], -v[1], -v[2], v[3], v[4], v[5])
}

/// Complex-bilinear pairing (no conjugation).
pub fn cdot(a: &CVec6, b: &CVec6) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

pub fn complexify(re: &Vec6, im: &Vec6) -> CVec6 {
    CVec6::from_fn(|i, _| Complex64::new(re[i], im[i]))
}

pub fn real_part(v: &CVec6) -> Vec6 {
    v.map(|z| z.re)
}

pub fn imag_part(v: &CVec6) -> Vec6 {
    v.map(|z| z.im)
}

/// Ambient structure: curvature pair plus the orientation of `J`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ambient {
    pub params: Params,
    pub orientation: JOrientation,
}

impl Ambient {
    pub fn new(params: Params) -> Self {
        Self {
            params,
            orientation: JOrientation::Outward,
        }
    }

    pub fn with_orientation(params: Params, orientation: JOrientation) -> Self {
        Self {
            params,
            orientation,
        }
    }

    /// Orthogonal projection of `w` onto the tangent space at `pt`.
    pub fn project(&self, pt: &ProductPoint, w: &Vec6) -> Vec6 {
        let (w1, w2) = ProductPoint::split(w);
        let c1 = self.params.c1;
        let c2 = self.params.c2;
        let t1 = w1 - pt.p1 * (c1 * w1.dot(&pt.p1));
        let t2 = w2 - pt.p2 * (c2 * w2.dot(&pt.p2));
        ProductPoint::join(&t1, &t2)
    }

    pub fn project_complex(&self, pt: &ProductPoint, w: &CVec6) -> CVec6 {
        complexify(
            &self.project(pt, &real_part(w)),
            &self.project(pt, &imag_part(w)),
        )
    }

    /// Normal components of `v` relative to its size; zero for tangent vectors.
    pub fn tangency_residual(&self, pt: &ProductPoint, v: &Vec6) -> f64 {
        let (v1, v2) = ProductPoint::split(v);
        let scale = v.norm();
        if scale == 0.0 {
            return 0.0;
        }
        let n1 = (v1.dot(&pt.p1) * self.params.c1.sqrt()).abs();
        let n2 = (v2.dot(&pt.p2) * self.params.c2.sqrt()).abs();
        n1.max(n2) / scale
    }

    /// Complex structure on a tangent vector.
    pub fn j(&self, pt: &ProductPoint, v: &Vec6) -> Result<Vec6> {
        let residual = self.tangency_residual(pt, v);
        if residual > TANGENCY_TOL {
            return Err(GeomError::NotTangent { residual });
        }
        Ok(self.j_unchecked(pt, v))
    }

    /// Complex structure without the tangency check; callers project first.
    pub fn j_unchecked(&self, pt: &ProductPoint, v: &Vec6) -> Vec6 {
        let (v1, v2) = ProductPoint::split(v);
        let s = self.orientation.sign();
        let j1 = pt.p1.cross(&v1) * (s * self.params.c1.sqrt());
        let j2 = pt.p2.cross(&v2) * (s * self.params.c2.sqrt());
        ProductPoint::join(&j1, &j2)
    }

    pub fn j_complex(&self, pt: &ProductPoint, v: &CVec6) -> CVec6 {
        complexify(
            &self.j_unchecked(pt, &real_part(v)),
            &self.j_unchecked(pt, &imag_part(v)),
        )
    }

    /// Kähler form `ω(u, v) = ⟨J u, v⟩`.
    pub fn kahler_form(&self, pt: &ProductPoint, u: &Vec6, v: &Vec6) -> Result<f64> {
        let residual = self.tangency_residual(pt, v);
        if residual > TANGENCY_TOL {
            return Err(GeomError::NotTangent { residual });
        }
        Ok(self.j(pt, u)?.dot(v))
    }

    /// `ω₁(u₁, v₁) = ⟨J¹ u₁, v₁⟩` on the first factor only.
    pub fn first_factor_form(&self, pt: &ProductPoint, u: &Vec6, v: &Vec6) -> f64 {
        let (u1, _) = ProductPoint::split(u);
        let (v1, _) = ProductPoint::split(v);
        let s = self.orientation.sign();
        pt.p1.cross(&u1).dot(&v1) * (s * self.params.c1.sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params() -> Params {
        Params::new(4.0, 1.0).unwrap()
    }

    fn point_from_angles(p: &Params, a: [f64; 4]) -> ProductPoint {
        let sph = |th: f64, ph: f64, c: f64| {
            Vec3::new(th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()) / c.sqrt()
        };
        ProductPoint::new(p, sph(a[0], a[1], p.c1()), sph(a[2], a[3], p.c2())).unwrap()
    }

    #[test]
    fn params_reject_bad_pairs() {
        assert!(Params::new(1.0, 4.0).is_err());
        assert!(Params::new(2.0, 2.0).is_err());
        assert!(Params::new(2.0, -1.0).is_err());
        assert!(Params::new(f64::NAN, 1.0).is_err());
        let p = params();
        let a = p.base_point();
        assert!((a.p1.norm_squared() - 0.25).abs() < 1e-15);
        assert!((a.p2.norm_squared() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn off_manifold_rejected() {
        let p = params();
        let err = ProductPoint::new(&p, Vec3::new(0.0, 0.0, 1.0), Vec3::new(0.0, 0.0, 1.0));
        assert!(matches!(err, Err(GeomError::OffManifold { .. })));
    }

    #[test]
    fn normal_direction_is_annihilated() {
        let p = params();
        let amb = Ambient::new(p);
        let pt = point_from_angles(&p, [0.3, 1.0, 2.0, -0.4]);
        let w = ProductPoint::join(&pt.p1, &Vec3::zeros());
        assert!(amb.project(&pt, &w).norm() < 1e-15);
    }

    #[test]
    fn j_on_the_north_pole() {
        let p = params();
        let amb = Ambient::new(p);
        let pt = p.base_point();
        let v = Vec6::new(1.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        let jv = amb.j(&pt, &v).unwrap();
        assert!((jv - Vec6::new(0.0, 1.0, 0.0, 0.0, 0.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn j_rejects_normal_input() {
        let p = params();
        let amb = Ambient::new(p);
        let pt = p.base_point();
        let v = Vec6::new(0.0, 0.0, 1.0, 0.0, 0.0, 0.0);
        assert!(matches!(amb.j(&pt, &v), Err(GeomError::NotTangent { .. })));
    }

    #[test]
    fn p_definition() {
        let v = Vec6::new(1.0, 0.0, 0.0, 0.0, 1.0, 0.0);
        assert_eq!(apply_p(&v), Vec6::new(-1.0, 0.0, 0.0, 0.0, 1.0, 0.0));
    }

    #[test]
    fn projection_has_rank_four() {
        let p = params();
        let amb = Ambient::new(p);
        let pt = point_from_angles(&p, [1.1, 0.2, 0.7, 2.5]);
        let m = nalgebra::Matrix6::from_fn(|i, j| amb.project(&pt, &Vec6::ith(j, 1.0))[i]);
        assert!((m * m - m).norm() < 1e-14);
        assert_eq!(m.rank(1e-10), 4);
    }

    proptest! {
        #[test]
        fn structure_identities(
            a in proptest::array::uniform4(-3.0f64..3.0),
            w in proptest::array::uniform6(-2.0f64..2.0),
            u in proptest::array::uniform6(-2.0f64..2.0),
        ) {
            let p = params();
            let pt = point_from_angles(&p, a);
            for orientation in [JOrientation::Outward, JOrientation::Inward] {
                let amb = Ambient::with_orientation(p, orientation);
                let v = amb.project(&pt, &Vec6::from_row_slice(&w));
                let x = amb.project(&pt, &Vec6::from_row_slice(&u));
                let scale = 1.0 + v.norm() * x.norm();
                // tangency and idempotence
                prop_assert!(v.dot(&ProductPoint::join(&pt.p1, &Vec3::zeros())).abs() < 1e-12);
                prop_assert!(v.dot(&ProductPoint::join(&Vec3::zeros(), &pt.p2)).abs() < 1e-12);
                prop_assert!((amb.project(&pt, &v) - v).norm() < 1e-12 * scale);
                let jv = amb.j(&pt, &v).unwrap();
                prop_assert!((amb.j(&pt, &jv).unwrap() + v).norm() < 1e-12 * scale);
                prop_assert!((jv.norm() - v.norm()).abs() < 1e-12 * scale);
                prop_assert!((apply_p(&apply_p(&v)) - v).norm() == 0.0);
                prop_assert!((apply_p(&v).norm() - v.norm()).abs() < 1e-15 * scale);
                prop_assert!((apply_p(&v).dot(&apply_p(&x)) - v.dot(&x)).abs() < 1e-12 * scale);
                prop_assert!((amb.j(&pt, &apply_p(&v)).unwrap() - apply_p(&jv)).norm() < 1e-12 * scale);
                prop_assert!(amb.kahler_form(&pt, &v, &v).unwrap().abs() < 1e-12 * scale);
                prop_assert!((amb.kahler_form(&pt, &v, &jv).unwrap() - v.norm_squared()).abs() < 1e-12 * scale);
                let sym = amb.kahler_form(&pt, &v, &x).unwrap() + amb.kahler_form(&pt, &x, &v).unwrap();
                prop_assert!(sym.abs() < 1e-12 * scale);
            }
        }
    }
}
