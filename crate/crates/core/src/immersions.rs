//! Closed-form catalog: the Lagrangian family `Φ_t`, the distinguished sphere
//! `Φ_0` (coded separately), Lawlor cylinders and their inverted minimal
//! embeddings, chart conversions, the Hamiltonian potential, the closed-form
//! area and `div JH`, and the fixtures used to validate the calculus layer.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::ambient::{Params, ProductPoint, Vec6};
use crate::calculus::{ClosedForm, Real};
use crate::error::{GeomError, Result};

/// Dilation applied to the Lawlor pair `(F_t, G_t)` inside the minimal
/// embedding; with it the inversion about the base point reproduces `Φ_t`.
pub const MINIMAL_HAT_SCALE: f64 = 0.25;

/// A point of the unit sphere written as `(z, x) ∈ ℂ × ℝ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePoint {
    pub z: Complex64,
    pub x: f64,
}

impl SpherePoint {
    pub fn new(z: Complex64, x: f64) -> Result<Self> {
        let residual = (z.norm_sqr() + x * x - 1.0).abs();
        if !(residual <= 1e-12) {
            return Err(GeomError::OffManifold { residual });
        }
        Ok(Self { z, x })
    }

    /// `z = √(1-x²) e^{iθ}`.
    pub fn from_theta_x(theta: f64, x: f64) -> Result<Self> {
        if !(x.abs() <= 1.0) {
            return Err(GeomError::Domain(format!("|x| = {} exceeds 1", x.abs())));
        }
        Ok(Self {
            z: Complex64::from_polar((1.0 - x * x).sqrt(), theta),
            x,
        })
    }
}

/// A point in one of the two charts of the sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "chart", rename_all = "snake_case")]
pub enum ChartPoint {
    /// `(s1, s2) ∈ ℝ × ℝ/2π`, conformal for every `Φ_t`.
    Cylinder { s1: f64, s2: f64 },
    /// `(θ, x) ∈ ℝ/2π × (-1, 1)`.
    Sphere { theta: f64, x: f64 },
}

impl ChartPoint {
    pub fn to_sphere_chart(self) -> Result<Self> {
        match self {
            ChartPoint::Cylinder { s1, s2 } => Ok(ChartPoint::Sphere {
                theta: s2,
                x: s1.tanh(),
            }),
            sp @ ChartPoint::Sphere { .. } => sp.validated(),
        }
    }

    pub fn to_cylinder_chart(self) -> Result<Self> {
        match self.validated()? {
            ChartPoint::Sphere { theta, x } => Ok(ChartPoint::Cylinder {
                s1: x.atanh(),
                s2: theta,
            }),
            cp => Ok(cp),
        }
    }

    fn validated(self) -> Result<Self> {
        match self {
            ChartPoint::Sphere { x, .. } if !(x.abs() < 1.0) => {
                Err(GeomError::Domain(format!("sphere chart needs |x| < 1, got {x}")))
            }
            cp => Ok(cp),
        }
    }

    pub fn to_sphere_point(self) -> Result<SpherePoint> {
        match self {
            ChartPoint::Cylinder { s1, s2 } => Ok(cyl_to_sphere(s1, s2)),
            ChartPoint::Sphere { theta, x } => SpherePoint::from_theta_x(theta, x),
        }
    }

    /// The raw chart coordinates `(u, v)`.
    pub fn coords(self) -> (f64, f64) {
        match self {
            ChartPoint::Cylinder { s1, s2 } => (s1, s2),
            ChartPoint::Sphere { theta, x } => (theta, x),
        }
    }

    /// `x` of the corresponding sphere point.
    pub fn height(self) -> f64 {
        match self {
            ChartPoint::Cylinder { s1, .. } => s1.tanh(),
            ChartPoint::Sphere { x, .. } => x,
        }
    }
}

/// The deformation parameter with its hyperbolic functions cached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyParam {
    pub t: f64,
    pub sinh: f64,
    pub cosh: f64,
}

impl FamilyParam {
    pub fn new(t: f64) -> Self {
        Self {
            t,
            sinh: t.sinh(),
            cosh: t.cosh(),
        }
    }
}

/// Generic `Φ_t(z, x)` with `z = z_re + i z_im`.
pub fn phi_family_components<S: Real>(params: &Params, fp: &FamilyParam, z_re: S, z_im: S, x: S) -> [S; 6] {
    let (c1, c2) = (params.c1(), params.c2());
    let (st, ct) = (fp.sinh, fp.cosh);
    let (st2, ct2) = (st * st, ct * ct);
    let root_d = params.diff().sqrt();
    let x2 = x * x;
    let den = x2 * (c1 * st2 - c2 * ct2) + (c1 * ct2 - c2 * st2);
    let k = den.recip() * (2.0 * root_d);
    // (s_t + i c_t x) z
    let a_re = z_re * st - x * z_im * ct;
    let a_im = z_im * st + x * z_re * ct;
    let a3 = (x2 * (c1 * st2 + 2.0 * c1 - c2 * ct2) + (c1 * ct2 - 2.0 * c1 - c2 * st2))
        / (2.0 * c1.sqrt() * root_d);
    // (c_t + i s_t x) z̄
    let b_re = z_re * ct + x * z_im * st;
    let b_im = x * z_re * st - z_im * ct;
    let b3 = (x2 * (c1 * st2 + 2.0 * c2 - c2 * ct2) + (c1 * ct2 - 2.0 * c2 - c2 * st2))
        / (2.0 * c2.sqrt() * root_d);
    [k * a_re, k * a_im, k * a3, k * b_re, k * b_im, k * b3]
}

/// `Φ_0(z, x)` coded directly from its own closed form, independently of
/// [`phi_family_components`].
pub fn phi_zero_components<S: Real>(params: &Params, z_re: S, z_im: S, x: S) -> [S; 6] {
    let (c1, c2) = (params.c1(), params.c2());
    let root_d = params.diff().sqrt();
    let x2 = x * x;
    let k = (x2 * -c2 + c1).recip() * (2.0 * root_d);
    // i x z
    let a_re = -(x * z_im);
    let a_im = x * z_re;
    let a3 = (x2 * (2.0 * c1 - c2) - c1) / (2.0 * c1.sqrt() * root_d);
    let b3 = (x2 * c2 + (c1 - 2.0 * c2)) / (2.0 * c2.sqrt() * root_d);
    [k * a_re, k * a_im, k * a3, k * z_re, -(k * z_im), k * b3]
}

fn family_denominator(params: &Params, fp: &FamilyParam, x: f64) -> f64 {
    let (c1, c2) = (params.c1(), params.c2());
    let (st2, ct2) = (fp.sinh * fp.sinh, fp.cosh * fp.cosh);
    (c1 * ct2 - c2 * st2) + (c1 * st2 - c2 * ct2) * x * x
}

pub fn phi_family(params: &Params, t: f64, sp: &SpherePoint) -> Result<ProductPoint> {
    let sp = SpherePoint::new(sp.z, sp.x)?;
    let fp = FamilyParam::new(t);
    let den = family_denominator(params, &fp, sp.x);
    if !(den > 0.0) {
        return Err(GeomError::Numeric(format!("family denominator {den} not positive")));
    }
    let out = phi_family_components(params, &fp, sp.z.re, sp.z.im, sp.x);
    ProductPoint::from_vec6(params, &Vec6::from_row_slice(&out))
}

pub fn phi_zero(params: &Params, sp: &SpherePoint) -> Result<ProductPoint> {
    let sp = SpherePoint::new(sp.z, sp.x)?;
    let out = phi_zero_components(params, sp.z.re, sp.z.im, sp.x);
    ProductPoint::from_vec6(params, &Vec6::from_row_slice(&out))
}

/// The conformal map `(s1, s2) ↦ (e^{i s2} / cosh s1, tanh s1)`.
pub fn cyl_to_sphere(s1: f64, s2: f64) -> SpherePoint {
    SpherePoint {
        z: Complex64::from_polar(1.0 / s1.cosh(), s2),
        x: s1.tanh(),
    }
}

/// Lawlor's cylinder `(F_t, G_t)`, scaled by `√(c1 - c2)`.
pub fn lawlor_chart(params: &Params, t: f64, s1: f64, s2: f64) -> (Complex64, Complex64) {
    let r = params.diff().sqrt();
    let (st, ct) = (t.sinh(), t.cosh());
    let (ss, cs) = (s1.sinh(), s1.cosh());
    let f = Complex64::new(st * cs, ct * ss) * Complex64::from_polar(r, s2);
    let g = Complex64::new(ct * cs, st * ss) * Complex64::from_polar(r, -s2);
    (f, g)
}

pub fn minimal_hat_components<S: Real>(params: &Params, fp: &FamilyParam, s1: S, s2: S) -> [S; 6] {
    let r = params.diff().sqrt() * MINIMAL_HAT_SCALE;
    let (st, ct) = (fp.sinh, fp.cosh);
    let (ss, cs) = (s1.sinh(), s1.cosh());
    let (sn, cn) = (s2.sin(), s2.cos());
    // (st cosh s1 + i ct sinh s1)(cos s2 + i sin s2)
    let fa = cs * st;
    let fb = ss * ct;
    // (ct cosh s1 + i st sinh s1)(cos s2 - i sin s2)
    let ga = cs * ct;
    let gb = ss * st;
    [
        (fa * cn - fb * sn) * r,
        (fa * sn + fb * cn) * r,
        S::cst(-params.c1().sqrt() * MINIMAL_HAT_SCALE),
        (ga * cn + gb * sn) * r,
        (gb * cn - ga * sn) * r,
        S::cst(-params.c2().sqrt() * MINIMAL_HAT_SCALE),
    ]
}

/// The complete minimal embedding whose inversion about the base point is `Φ_t`.
pub fn minimal_hat(params: &Params, t: f64, s1: f64, s2: f64) -> Vec6 {
    Vec6::from_row_slice(&minimal_hat_components(params, &FamilyParam::new(t), s1, s2))
}

/// Inversion `w ↦ center + w / |w|²`.
pub fn invert_at(center: &Vec6, w: &Vec6) -> Result<Vec6> {
    let n2 = w.norm_squared();
    if !(n2.sqrt() >= 1e-14) {
        return Err(GeomError::Domain(format!("inversion pole: |w| = {:e}", n2.sqrt())));
    }
    Ok(center + w / n2)
}

/// The Hamiltonian potential `f` generating `Φ_t` at `t = 0`, as a function of `x`.
pub fn hamiltonian_potential_x<S: Real>(params: &Params, x: S) -> S {
    let (c1, c2) = (params.c1(), params.c2());
    let d = params.diff();
    let pref = 2.0 * d / (c1 * c2);
    let rational = x * d / (x * x * -c2 + c1);
    let log_term = (x * (c2 / c1).sqrt()).atanh() * (params.sum() / (c1 * c2).sqrt());
    (rational - log_term) * pref
}

pub fn hamiltonian_potential(params: &Params, sp: &SpherePoint) -> f64 {
    hamiltonian_potential_x(params, sp.x)
}

/// `t* = ½ arccosh((c1 + c2)/(c1 - c2))`, where the area formula changes branch.
pub fn area_branch_point(params: &Params) -> f64 {
    0.5 * (params.sum() / params.diff()).acosh()
}

/// `(S(y) - 1)/y` with `S(y) = artanh(√y)/√y` for `y > 0`, `arctan(√-y)/√-y`
/// for `y < 0`; both are `Σ y^k / (2k+1)`.
fn area_series_tail(y: f64) -> f64 {
    if y.abs() < 1e-2 {
        let mut sum = 0.0;
        let mut p = 1.0;
        for k in 1..=16 {
            sum += p / (2 * k + 1) as f64;
            p *= y;
        }
        sum
    } else if y > 0.0 {
        let r = y.sqrt();
        (r.atanh() / r - 1.0) / y
    } else {
        let r = (-y).sqrt();
        (r.atan() / r - 1.0) / y
    }
}

/// Area of the metric induced by `Φ_t`.
///
/// Branches are selected by comparing `d = (c1 - c2) cosh 2t` with
/// `s = c1 + c2` exactly. Inside the outer branches the formula is rewritten
/// in terms of `y = (s - d)/(s + d)` so that it stays accurate as `d → s`.
pub fn closed_area(params: &Params, t: f64) -> f64 {
    let s = params.sum();
    let d = params.diff() * (2.0 * t).cosh();
    if d == s {
        return 64.0 * PI / (3.0 * s);
    }
    let y = (s - d) / (s + d);
    32.0 * PI / ((s + d) * (s + d)) * ((s + 2.0 * d) - 2.0 * d * d / (s + d) * area_series_tail(y))
}

/// The three-branch area formula transcribed literally; loses accuracy near
/// the branch point and is kept as a cross-check.
pub fn closed_area_literal(params: &Params, t: f64) -> f64 {
    let s = params.sum();
    let d = params.diff() * (2.0 * t).cosh();
    if d < s {
        let q = ((s - d) / (s + d)).sqrt();
        32.0 * PI / (s * s - d * d) * (s - 2.0 * d * d / (s * s - d * d).sqrt() * q.atanh())
    } else if d == s {
        64.0 * PI / (3.0 * s)
    } else {
        let q = ((d - s) / (d + s)).sqrt();
        32.0 * PI / (s * s - d * d) * (s - 2.0 * d * d / (d * d - s * s).sqrt() * q.atan())
    }
}

/// `(div JH_t)(z, x) = (c2 - c1) sinh(2t) x / (2(1 + x²))`.
pub fn closed_div_jh(params: &Params, t: f64, sp: &SpherePoint) -> f64 {
    closed_div_jh_x(params, t, sp.x)
}

pub fn closed_div_jh_x(params: &Params, t: f64, x: f64) -> f64 {
    -params.diff() * (2.0 * t).sinh() * x / (2.0 * (1.0 + x * x))
}

/// Which sphere chart a catalog immersion is evaluated in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Chart {
    Cylinder,
    Sphere,
}

/// Orientation of the cylinder chart: `Reflected` evaluates at `(s1, -s2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChartOrientation {
    Standard,
    Reflected,
}

/// Which closed form to use for the sphere map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coding {
    Family(FamilyParam),
    Zero,
}

/// A catalog immersion of the sphere in a chosen chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereImmersion {
    pub params: Params,
    pub coding: Coding,
    pub chart: Chart,
    pub orientation: ChartOrientation,
}

impl SphereImmersion {
    /// `Φ_t` in the cylinder chart with the standard orientation.
    pub fn family(params: Params, t: f64) -> Self {
        Self {
            params,
            coding: Coding::Family(FamilyParam::new(t)),
            chart: Chart::Cylinder,
            orientation: ChartOrientation::Standard,
        }
    }

    /// `Φ_0` from its own closed form.
    pub fn zero(params: Params) -> Self {
        Self {
            params,
            coding: Coding::Zero,
            chart: Chart::Cylinder,
            orientation: ChartOrientation::Standard,
        }
    }

    pub fn in_chart(mut self, chart: Chart) -> Self {
        self.chart = chart;
        self
    }

    pub fn with_orientation(mut self, orientation: ChartOrientation) -> Self {
        self.orientation = orientation;
        self
    }

    pub fn t(&self) -> f64 {
        match self.coding {
            Coding::Family(fp) => fp.t,
            Coding::Zero => 0.0,
        }
    }

    /// The sphere height `x` at chart coordinates `(u, v)`.
    pub fn height(&self, u: f64, v: f64) -> f64 {
        match self.chart {
            Chart::Cylinder => u.tanh(),
            Chart::Sphere => v,
        }
    }
}

impl ClosedForm for SphereImmersion {
    fn eval<S: Real>(&self, u: S, v: S) -> [S; 6] {
        let v = match self.orientation {
            ChartOrientation::Standard => v,
            ChartOrientation::Reflected => -v,
        };
        let (z_re, z_im, x) = match self.chart {
            Chart::Cylinder => {
                let r = u.cosh().recip();
                (v.cos() * r, v.sin() * r, u.tanh())
            }
            Chart::Sphere => {
                let r = (S::cst(1.0) - v * v).sqrt();
                (u.cos() * r, u.sin() * r, v)
            }
        };
        match self.coding {
            Coding::Family(fp) => phi_family_components(&self.params, &fp, z_re, z_im, x),
            Coding::Zero => phi_zero_components(&self.params, z_re, z_im, x),
        }
    }

    fn check_domain(&self, u: f64, v: f64) -> Result<()> {
        if !(u.is_finite() && v.is_finite()) {
            return Err(GeomError::Domain(format!("non-finite chart point ({u}, {v})")));
        }
        if self.chart == Chart::Sphere && !(v.abs() < 1.0) {
            return Err(GeomError::Domain(format!("sphere chart needs |x| < 1, got {v}")));
        }
        Ok(())
    }
}

/// The minimal embedding as a chart map over `(s1, s2)`; lands in ℝ⁶, not on
/// the product of spheres.
#[derive(Debug, Clone, Copy)]
pub struct MinimalHatMap {
    pub params: Params,
    pub fp: FamilyParam,
}

impl ClosedForm for MinimalHatMap {
    fn eval<S: Real>(&self, u: S, v: S) -> [S; 6] {
        minimal_hat_components(&self.params, &self.fp, u, v)
    }
}

/// Product of two latitude circles, a Lagrangian torus with `C ≡ 0`.
#[derive(Debug, Clone, Copy)]
pub struct ProductTorus {
    pub params: Params,
    pub x1: f64,
    pub x2: f64,
    r1: f64,
    r2: f64,
}

pub fn product_torus(params: &Params, x1: f64, x2: f64) -> Result<ProductTorus> {
    let r1sq = 1.0 / params.c1() - x1 * x1;
    let r2sq = 1.0 / params.c2() - x2 * x2;
    if !(r1sq > 0.0 && r2sq > 0.0) {
        return Err(GeomError::Domain(format!(
            "degenerate latitude circle at heights ({x1}, {x2})"
        )));
    }
    Ok(ProductTorus {
        params: *params,
        x1,
        x2,
        r1: r1sq.sqrt(),
        r2: r2sq.sqrt(),
    })
}

impl ClosedForm for ProductTorus {
    fn eval<S: Real>(&self, u: S, v: S) -> [S; 6] {
        [
            u.cos() * self.r1,
            u.sin() * self.r1,
            S::cst(self.x1),
            v.cos() * self.r2,
            v.sin() * self.r2,
            S::cst(self.x2),
        ]
    }
}

/// Round sphere S²(c1) in the `(θ, x)` chart, paired with the base point of
/// the second factor.
#[derive(Debug, Clone, Copy)]
pub struct RoundSphere {
    pub params: Params,
}

impl ClosedForm for RoundSphere {
    fn eval<S: Real>(&self, u: S, v: S) -> [S; 6] {
        let k = 1.0 / self.params.c1().sqrt();
        let r = (S::cst(1.0) - v * v).sqrt() * k;
        [
            u.cos() * r,
            u.sin() * r,
            v * k,
            S::cst(0.0),
            S::cst(0.0),
            S::cst(1.0 / self.params.c2().sqrt()),
        ]
    }

    fn check_domain(&self, _u: f64, v: f64) -> Result<()> {
        if !(v.abs() < 1.0) {
            return Err(GeomError::Domain(format!("sphere chart needs |x| < 1, got {v}")));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::ChartMap;
    use proptest::prelude::*;

    fn params() -> Params {
        Params::new(4.0, 1.0).unwrap()
    }

    fn close(a: &Vec6, b: [f64; 6], tol: f64) -> bool {
        (a - Vec6::from_row_slice(&b)).amax() <= tol
    }

    #[test]
    fn poles_map_to_the_base_point() {
        let p = params();
        for x in [1.0, -1.0] {
            let sp = SpherePoint::new(Complex64::new(0.0, 0.0), x).unwrap();
            let q = phi_family(&p, 0.0, &sp).unwrap().to_vec6();
            assert!(close(&q, [0.0, 0.0, 0.5, 0.0, 0.0, 1.0], 1e-15));
            let q0 = phi_zero(&p, &sp).unwrap().to_vec6();
            assert!(close(&q0, [0.0, 0.0, 0.5, 0.0, 0.0, 1.0], 1e-15));
        }
    }

    #[test]
    fn equator_values() {
        let p = params();
        let sp = SpherePoint::new(Complex64::new(1.0, 0.0), 0.0).unwrap();
        let h = 3f64.sqrt() / 2.0;
        let expected = [0.0, 0.0, -0.5, h, 0.0, 0.5];
        assert!(close(&phi_family(&p, 0.0, &sp).unwrap().to_vec6(), expected, 1e-15));
        assert!(close(&phi_zero(&p, &sp).unwrap().to_vec6(), expected, 1e-15));
        let q = phi_family(&p, 1.0, &sp).unwrap().to_vec6();
        assert!(close(&q, [0.499926, 0.0, 0.008799, 0.656419, 0.0, 0.754396], 1e-5));
    }

    #[test]
    fn off_sphere_input_rejected() {
        let p = params();
        let bad = SpherePoint {
            z: Complex64::new(1.0, 0.0),
            x: 0.5,
        };
        assert!(phi_family(&p, 0.0, &bad).is_err());
        assert!(phi_zero(&p, &bad).is_err());
    }

    #[test]
    fn lawlor_base_value() {
        let (f, g) = lawlor_chart(&params(), 0.0, 0.0, 0.0);
        assert!(f.norm() < 1e-15);
        assert!((g - Complex64::new(3f64.sqrt(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn minimal_hat_base_value() {
        let p = params();
        let w = minimal_hat(&p, 0.0, 0.0, 0.0);
        let r3 = 3f64.sqrt();
        assert!(close(&w, [0.0, 0.0, -0.5, r3 / 4.0, 0.0, -0.25], 1e-15));
    }

    #[test]
    fn inversion_basics() {
        let w = Vec6::new(1.0, -2.0, 0.5, 0.0, 3.0, 1.0);
        let z = Vec6::zeros();
        let once = invert_at(&z, &w).unwrap();
        assert!((once - w / w.norm_squared()).norm() < 1e-16);
        assert!((invert_at(&z, &once).unwrap() - w).norm() < 1e-14);
        assert!(invert_at(&z, &Vec6::zeros()).is_err());
    }

    #[test]
    fn inversion_spot_value() {
        let p = params();
        let a = p.base_point().to_vec6();
        let q = invert_at(&a, &minimal_hat(&p, 1.0, 0.0, 0.0)).unwrap();
        assert!(close(&q, [0.499922, 0.0, 0.008799, 0.656416, 0.0, 0.754399], 1e-5));
    }

    #[test]
    fn cylinder_chart_limits() {
        let sp = cyl_to_sphere(0.0, 0.0);
        assert!((sp.z - Complex64::new(1.0, 0.0)).norm() < 1e-16 && sp.x == 0.0);
        let far = cyl_to_sphere(20.0, 1.0);
        assert!(far.z.norm() < 5e-9);
        assert!((far.x - 1.0).abs() < 1e-15);
    }

    #[test]
    fn chart_point_conversions() {
        let cp = ChartPoint::Cylinder { s1: 0.7, s2: 2.0 };
        let sp = cp.to_sphere_chart().unwrap();
        let back = sp.to_cylinder_chart().unwrap();
        let (s1, s2) = back.coords();
        assert!((s1 - 0.7).abs() < 1e-14 && s2 == 2.0);
        assert!(ChartPoint::Sphere { theta: 0.0, x: 1.0 }.to_cylinder_chart().is_err());
    }

    #[test]
    fn potential_values() {
        let p = params();
        let at = |x: f64| hamiltonian_potential_x(&p, x);
        assert_eq!(at(0.0), 0.0);
        let expected = 1.5 * (1.0 - 2.5 * 0.5f64.atanh());
        assert!((at(1.0) - expected).abs() < 1e-14);
        assert!((at(1.0) + 0.559899).abs() < 1e-5);
    }

    #[test]
    fn div_jh_closed_form_values() {
        let p = params();
        assert_eq!(closed_div_jh_x(&p, 0.0, 0.7), 0.0);
        assert_eq!(closed_div_jh_x(&p, 0.8, 0.0), 0.0);
        let v = closed_div_jh_x(&p, 1.0, 1.0);
        assert!((v + 3.0 * 2f64.sinh() / 4.0).abs() < 1e-15);
        assert!((v + 2.720145).abs() < 1e-5);
    }

    #[test]
    fn area_values() {
        let p = params();
        // Frozen from the literal branch formula and confirmed by quadrature
        // (see integrals tests).
        assert!((closed_area(&p, 0.0) - 15.884661207393).abs() < 1e-9);
        assert!((closed_area(&p, 1.0) - 8.834344504748).abs() < 1e-9);
        let ts = area_branch_point(&p);
        assert!((ts - 0.5 * (5.0f64 / 3.0).acosh()).abs() < 1e-15);
        assert!((closed_area(&p, ts) - 64.0 * PI / 15.0).abs() < 1e-12);
        assert!((64.0 * PI / 15.0 - 13.404129).abs() < 1e-5);
    }

    #[test]
    fn area_branch_continuity() {
        let p = params();
        let ts = area_branch_point(&p);
        let mid = 64.0 * PI / (3.0 * p.sum());
        for t in [ts - 1e-6, ts + 1e-6, ts - 1e-9, ts + 1e-9] {
            assert!((closed_area(&p, t) - mid).abs() <= 1e-4 * mid);
        }
    }

    #[test]
    fn stable_area_matches_literal_away_from_branch_point() {
        let p = params();
        for t in [0.0, 0.1, 0.3, 0.45, 0.65, 0.8, 1.0, 2.0, 3.0, 5.0] {
            let a = closed_area(&p, t);
            let b = closed_area_literal(&p, t);
            assert!((a - b).abs() <= 1e-12 * a, "t={t}: {a} vs {b}");
        }
    }

    #[test]
    fn torus_rejects_degenerate_circles() {
        let p = params();
        assert!(product_torus(&p, 0.5, 0.0).is_err());
        assert!(product_torus(&p, 0.0, -1.0).is_err());
        assert!(product_torus(&p, 0.2, 0.3).is_ok());
    }

    #[test]
    fn sphere_chart_domain() {
        let m = SphereImmersion::family(params(), 0.0).in_chart(Chart::Sphere);
        assert!(m.value(0.3, 1.0).is_err());
        assert!(m.value(0.3, 0.99).is_ok());
    }

    proptest! {
        #[test]
        fn catalog_lands_on_manifold(
            t in -2.0f64..2.0,
            s1 in -4.0f64..4.0,
            s2 in 0.0f64..6.3,
            x1 in -0.49f64..0.49,
            x2 in -0.99f64..0.99,
        ) {
            let p = params();
            let fam = SphereImmersion::family(p, t);
            let q = fam.value(s1, s2).unwrap();
            let pt = ProductPoint::from_vec6(&p, &q).unwrap();
            prop_assert!(pt.manifold_residual(&p) <= 1e-12);
            let zero = SphereImmersion::zero(p).value(s1, s2).unwrap();
            prop_assert!(ProductPoint::from_vec6(&p, &zero).is_ok());
            let torus = product_torus(&p, x1, x2).unwrap();
            prop_assert!(ProductPoint::from_vec6(&p, &torus.value(s1, s2).unwrap()).is_ok());
        }

        #[test]
        fn zero_coding_agrees_with_family(theta in 0.0f64..6.3, x in -1.0f64..1.0) {
            let p = params();
            let sp = SpherePoint::from_theta_x(theta, x).unwrap();
            let a = phi_zero(&p, &sp).unwrap().to_vec6();
            let b = phi_family(&p, 0.0, &sp).unwrap().to_vec6();
            prop_assert!((a - b).amax() <= 1e-12);
        }

        #[test]
        fn lawlor_membership(t in -2.0f64..2.0, s1 in -3.0f64..3.0, s2 in 0.0f64..6.3) {
            let p = params();
            let (f, g) = lawlor_chart(&p, t, s1, s2);
            let scale = 1.0 + f.norm_sqr() + g.norm_sqr();
            prop_assert!((f.norm_sqr() - g.norm_sqr() + 3.0).abs() <= 1e-12 * scale);
            prop_assert!(((f * g).re - 3.0 * t.sinh() * t.cosh()).abs() <= 1e-12 * scale);
        }

        #[test]
        fn minimal_hat_affine_constraints(t in -2.0f64..2.0, s1 in -3.0f64..3.0, s2 in 0.0f64..6.3) {
            let p = params();
            let w = minimal_hat(&p, t, s1, s2);
            prop_assert!((w.dot(&p.base_point().to_vec6()) + 0.5).abs() <= 1e-15);
            prop_assert!(w.dot(&p.twisted_base_point()).abs() <= 1e-15);
        }

        #[test]
        fn potential_is_odd(x in -1.0f64..1.0) {
            let p = params();
            prop_assert!((hamiltonian_potential_x(&p, x) + hamiltonian_potential_x(&p, -x)).abs() <= 1e-15);
        }

        #[test]
        fn area_is_even(t in 0.0f64..4.0) {
            let p = params();
            prop_assert_eq!(closed_area(&p, t), closed_area(&p, -t));
            prop_assert!(closed_area(&p, t) > 0.0);
        }

        #[test]
        fn rotational_equivariance(t in -1.5f64..1.5, s1 in -3.0f64..3.0, s2 in 0.0f64..6.3, alpha in 0.0f64..6.3) {
            let p = params();
            let fam = SphereImmersion::family(p, t);
            let a = fam.value(s1, s2 + alpha).unwrap();
            let b = fam.value(s1, s2).unwrap();
            let rot = |x: f64, y: f64, ang: f64| (x * ang.cos() - y * ang.sin(), x * ang.sin() + y * ang.cos());
            let (x1, y1) = rot(b[0], b[1], alpha);
            let (x2, y2) = rot(b[3], b[4], -alpha);
            let expected = Vec6::new(x1, y1, b[2], x2, y2, b[5]);
            prop_assert!((a - expected).amax() <= 1e-12);
        }
    }
}
