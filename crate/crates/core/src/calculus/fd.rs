//! Central-difference operators for fields derived from jet-exact geometry.
//!
//! Closed-form maps are differentiated exactly to second order by jets; any
//! quantity that needs one more derivative (curvature, divergence of `JH`,
//! Laplacians of `C` and `log|H|`, the normal connection) is differenced here.
//! Every operator is `O(h²)`; [`richardson`] evaluates at `2h`, `h`, `h/2` to
//! extrapolate and to estimate the observed order.

use std::ops::{Add, Mul, Sub};

use nalgebra::Matrix3;
use num_complex::Complex64;

use crate::ambient::{Ambient, Vec6};
use crate::calculus::chart::ChartMap;
use crate::calculus::geometry::{metric_derivatives, LocalGeometry};
use crate::error::{GeomError, Result};

/// Default finite-difference step.
pub const DEFAULT_STEP: f64 = 1e-3;

/// A surface: a chart map together with the ambient structure it lives in.
#[derive(Clone, Copy)]
pub struct Surface<'a> {
    pub ambient: Ambient,
    pub map: &'a dyn ChartMap,
}

impl<'a> Surface<'a> {
    pub fn new(ambient: Ambient, map: &'a dyn ChartMap) -> Self {
        Self { ambient, map }
    }

    pub fn geometry(&self, u: f64, v: f64) -> Result<LocalGeometry> {
        LocalGeometry::compute(&self.ambient, self.map, u, v)
    }
}

/// Values that can be combined linearly and measured.
pub trait FdValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn magnitude(&self) -> f64;
}

impl FdValue for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl FdValue for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Evaluations of an `O(h²)` operator at steps `2h`, `h` and `h/2`.
#[derive(Debug, Clone, Copy)]
pub struct Richardson<T> {
    pub h: f64,
    pub coarse: T,
    pub mid: T,
    pub fine: T,
}

impl<T: FdValue> Richardson<T> {
    /// `(4 f(h/2) - f(h)) / 3`, which cancels the `h²` error term.
    pub fn extrapolated(&self) -> T {
        (self.fine * 4.0 - self.mid) * (1.0 / 3.0)
    }

    /// `(|f(2h) - f(h)|, |f(h) - f(h/2)|)`.
    pub fn diffs(&self) -> (f64, f64) {
        (
            (self.coarse - self.mid).magnitude(),
            (self.mid - self.fine).magnitude(),
        )
    }

    /// Observed convergence order `log2(|f(2h)-f(h)| / |f(h)-f(h/2)|)`.
    pub fn order(&self) -> Option<f64> {
        let (a, b) = self.diffs();
        (a > 0.0 && b > 0.0).then(|| (a / b).log2())
    }
}

pub fn richardson<T: FdValue>(h: f64, f: impl Fn(f64) -> Result<T>) -> Result<Richardson<T>> {
    Ok(Richardson {
        h,
        coarse: f(2.0 * h)?,
        mid: f(h)?,
        fine: f(0.5 * h)?,
    })
}

/// Aggregate order over many Richardson ladders, robust to points where the
/// truncation error happens to vanish.
pub fn aggregate_order(diffs: impl IntoIterator<Item = (f64, f64)>) -> Option<f64> {
    let (a, b) = diffs
        .into_iter()
        .fold((0.0, 0.0), |(sa, sb), (a, b)| (sa + a, sb + b));
    (a > 0.0 && b > 0.0).then(|| (a / b).log2())
}

fn check_step(h: f64) -> Result<()> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(GeomError::Domain(format!("finite-difference step {h} must be positive")))
    }
}

/// Brioschi's formula for the Gauss curvature from metric coefficients.
#[allow(clippy::too_many_arguments)]
pub fn brioschi(
    (e, f, g): (f64, f64, f64),
    [eu, ev, fu, fv, gu, gv]: [f64; 6],
    e_vv: f64,
    f_uv: f64,
    g_uu: f64,
) -> f64 {
    let m1 = Matrix3::new(
        -0.5 * e_vv + f_uv - 0.5 * g_uu,
        0.5 * eu,
        fu - 0.5 * ev,
        fv - 0.5 * gu,
        e,
        f,
        0.5 * gv,
        f,
        g,
    );
    let m2 = Matrix3::new(0.0, 0.5 * ev, 0.5 * gu, 0.5 * ev, e, f, 0.5 * gu, f, g);
    let det = e * g - f * f;
    (m1.determinant() - m2.determinant()) / (det * det)
}

/// Intrinsic Gauss curvature: jet-exact metric and first derivatives, central
/// differences of those first derivatives for the second ones.
pub fn gauss_curvature(map: &dyn ChartMap, u: f64, v: f64, h: f64) -> Result<f64> {
    check_step(h)?;
    let c = map.jet(u, v)?;
    let md = |uu: f64, vv: f64| map.jet(uu, vv).map(|fr| metric_derivatives(&fr));
    let up = md(u + h, v)?;
    let um = md(u - h, v)?;
    let vp = md(u, v + h)?;
    let vm = md(u, v - h)?;
    let e_vv = (vp[1] - vm[1]) / (2.0 * h);
    let g_uu = (up[4] - um[4]) / (2.0 * h);
    let f_uv = 0.25 * ((up[3] - um[3]) + (vp[2] - vm[2])) / h;
    let e = c.d1.dot(&c.d1);
    let f = c.d1.dot(&c.d2);
    let g = c.d2.dot(&c.d2);
    let k = brioschi((e, f, g), metric_derivatives(&c), e_vv, f_uv, g_uu);
    if !k.is_finite() {
        return Err(GeomError::Numeric(format!("non-finite curvature at ({u}, {v})")));
    }
    Ok(k)
}

pub fn gauss_curvature_richardson(map: &dyn ChartMap, u: f64, v: f64, h: f64) -> Result<Richardson<f64>> {
    richardson(h, |hh| gauss_curvature(map, u, v, hh))
}

/// `(1/√g) ∂_i(√g X^i)` for a field given by its chart components.
pub fn divergence_coords(
    s: &Surface,
    field: &dyn Fn(&LocalGeometry) -> Result<[f64; 2]>,
    u: f64,
    v: f64,
    h: f64,
) -> Result<f64> {
    check_step(h)?;
    let flux = |uu: f64, vv: f64, i: usize| -> Result<f64> {
        let g = s.geometry(uu, vv)?;
        Ok(g.sqrt_det() * field(&g)?[i])
    };
    let center = s.geometry(u, v)?;
    let d = (flux(u + h, v, 0)? - flux(u - h, v, 0)?) + (flux(u, v + h, 1)? - flux(u, v - h, 1)?);
    Ok(d / (2.0 * h) / center.sqrt_det())
}

/// Divergence of a tangent vector field given as an ambient vector.
pub fn divergence(
    s: &Surface,
    field: &dyn Fn(&LocalGeometry) -> Result<Vec6>,
    u: f64,
    v: f64,
    h: f64,
) -> Result<f64> {
    divergence_coords(s, &|g| Ok(g.tangent_coords(&field(g)?)), u, v, h)
}

/// Laplace–Beltrami `(1/√g) ∂_i(√g g^{ij} ∂_j f)` on the compact stencil:
/// fluxes at the half-step points, each with a central difference of width `h`.
pub fn laplace_beltrami(
    s: &Surface,
    scalar: &dyn Fn(&LocalGeometry) -> Result<f64>,
    u: f64,
    v: f64,
    h: f64,
) -> Result<f64> {
    check_step(h)?;
    let f = |uu: f64, vv: f64| -> Result<f64> { scalar(&s.geometry(uu, vv)?) };
    let half = 0.5 * h;
    let flux = |uu: f64, vv: f64, i: usize| -> Result<f64> {
        let g = s.geometry(uu, vv)?;
        let du = (f(uu + half, vv)? - f(uu - half, vv)?) / h;
        let dv = (f(uu, vv + half)? - f(uu, vv - half)?) / h;
        Ok(g.sqrt_det() * (g.inv[i][0] * du + g.inv[i][1] * dv))
    };
    let center = s.geometry(u, v)?;
    let d = (flux(u + half, v, 0)? - flux(u - half, v, 0)?)
        + (flux(u, v + half, 1)? - flux(u, v - half, 1)?);
    Ok(d / h / center.sqrt_det())
}

/// `|∇f|² = g^{ij} ∂_i f ∂_j f` with central differences.
pub fn gradient_norm2(
    s: &Surface,
    scalar: &dyn Fn(&LocalGeometry) -> Result<f64>,
    u: f64,
    v: f64,
    h: f64,
) -> Result<f64> {
    check_step(h)?;
    let f = |uu: f64, vv: f64| -> Result<f64> { scalar(&s.geometry(uu, vv)?) };
    let g = s.geometry(u, v)?;
    let du = (f(u + h, v)? - f(u - h, v)?) / (2.0 * h);
    let dv = (f(u, v + h)? - f(u, v - h)?) / (2.0 * h);
    Ok(g.inv[0][0] * du * du + 2.0 * g.inv[0][1] * du * dv + g.inv[1][1] * dv * dv)
}

/// `∂_w̄ f = ½(∂_u + i ∂_v) f` for a complex scalar field.
pub fn dbar(
    s: &Surface,
    field: &dyn Fn(&LocalGeometry) -> Result<Complex64>,
    u: f64,
    v: f64,
    h: f64,
) -> Result<Complex64> {
    check_step(h)?;
    let f = |uu: f64, vv: f64| -> Result<Complex64> { field(&s.geometry(uu, vv)?) };
    let du = (f(u + h, v)? - f(u - h, v)?) / (2.0 * h);
    let dv = (f(u, v + h)? - f(u, v - h)?) / (2.0 * h);
    Ok((du + Complex64::i() * dv) * 0.5)
}

/// `|∇⊥H|²`: difference the mean-curvature field, then project each partial
/// onto the normal bundle of the surface inside S²×S².
pub fn normal_connection_norm2(s: &Surface, u: f64, v: f64, h: f64) -> Result<f64> {
    check_step(h)?;
    let hv = |uu: f64, vv: f64| -> Result<Vec6> { Ok(s.geometry(uu, vv)?.h) };
    let g = s.geometry(u, v)?;
    let du = (hv(u + h, v)? - hv(u - h, v)?) / (2.0 * h);
    let dv = (hv(u, v + h)? - hv(u, v - h)?) / (2.0 * h);
    let n = [g.normal_part(&du), g.normal_part(&dv)];
    Ok(g.contract(&n, &n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brioschi_on_flat_polar_metric() {
        // E = 1, F = 0, G = r²: flat.
        let r: f64 = 1.7;
        let k = brioschi((1.0, 0.0, r * r), [0.0, 0.0, 0.0, 0.0, 2.0 * r, 0.0], 0.0, 0.0, 2.0);
        assert!(k.abs() < 1e-15);
    }

    #[test]
    fn brioschi_on_round_sphere_metric() {
        // E = 1, G = sin²u on the unit sphere.
        let u: f64 = 0.8;
        let (s, c) = u.sin_cos();
        let k = brioschi(
            (1.0, 0.0, s * s),
            [0.0, 0.0, 0.0, 0.0, 2.0 * s * c, 0.0],
            0.0,
            0.0,
            2.0 * (c * c - s * s),
        );
        assert!((k - 1.0).abs() < 1e-14);
    }

    #[test]
    fn richardson_recovers_quadratic_order() {
        let f = |h: f64| -> Result<f64> { Ok(((1.0 + h).exp() - (1.0 - h).exp()) / (2.0 * h)) };
        let r = richardson(1e-2, f).unwrap();
        let order = r.order().unwrap();
        assert!((order - 2.0).abs() < 0.01, "order {order}");
        assert!((r.extrapolated() - 1f64.exp()).abs() < 1e-9);
    }

    #[test]
    fn aggregate_order_ignores_zero_ladders() {
        let o = aggregate_order([(4e-6, 1e-6), (0.0, 0.0), (8e-6, 2e-6)]).unwrap();
        assert!((o - 2.0).abs() < 1e-12);
        assert!(aggregate_order([(0.0, 0.0)]).is_none());
    }

    #[test]
    fn rejects_bad_step() {
        assert!(check_step(0.0).is_err());
        assert!(check_step(-1.0).is_err());
        assert!(check_step(f64::NAN).is_err());
    }
}
