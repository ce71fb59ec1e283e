//! Pointwise extrinsic geometry of a surface in S²(c1) × S²(c2) from a 2-jet.

use num_complex::Complex64;

use crate::ambient::{apply_p_complex, cdot, complexify, Ambient, CVec6, ProductPoint, Vec6};
use crate::calculus::chart::{ChartMap, Frame};
use crate::error::{GeomError, Result};

/// Relative tolerance of the conformality certificate.
pub const CONFORMAL_TOL: f64 = 1e-10;
/// Slack on the bound |C| ≤ 1/2 for Lagrangian surfaces.
pub const JACOBIAN_BOUND_SLACK: f64 = 1e-12;

/// First derivatives `[E_u, E_v, F_u, F_v, G_u, G_v]` of the induced metric.
pub fn metric_derivatives(fr: &Frame) -> [f64; 6] {
    [
        2.0 * fr.d1.dot(&fr.d11),
        2.0 * fr.d1.dot(&fr.d12),
        fr.d11.dot(&fr.d2) + fr.d1.dot(&fr.d12),
        fr.d12.dot(&fr.d2) + fr.d1.dot(&fr.d22),
        2.0 * fr.d2.dot(&fr.d12),
        2.0 * fr.d2.dot(&fr.d22),
    ]
}

/// Everything the identity checks need at one chart point.
#[derive(Debug, Clone)]
pub struct LocalGeometry {
    pub ambient: Ambient,
    pub u: f64,
    pub v: f64,
    pub point: ProductPoint,
    pub frame: Frame,
    /// Induced metric `E du² + 2F du dv + G dv²`.
    pub e: f64,
    pub f: f64,
    pub g: f64,
    pub det: f64,
    /// Inverse metric `[[g^11, g^12], [g^12, g^22]]`.
    pub inv: [[f64; 2]; 2],
    /// `max(|E-G|, |F|) / E`.
    pub conformal_defect: f64,
    /// `ω(Φ_u, Φ_v) / √det g`.
    pub lagrangian_defect: f64,
    /// `δΦ = ½(Φ_u - iΦ_v)`.
    pub delta: CVec6,
    /// Ambient covariant derivative `∇_{∂w} ∂w Φ`.
    pub delta_delta: CVec6,
    /// Second fundamental form `σ(∂u,∂u), σ(∂u,∂v), σ(∂v,∂v)`.
    pub sigma: [Vec6; 3],
    pub sigma2: f64,
    /// Mean curvature vector in S²×S² (half the trace of σ).
    pub h: Vec6,
    pub jh: Vec6,
    /// Mean curvature vector of the same surface viewed in ℝ⁶.
    pub h_tilde: Vec6,
    /// Associated Jacobian, from the pull-back of the first Kähler form.
    pub c: f64,
    /// Gauss curvature, filled in on demand by the finite-difference layer.
    pub k: Option<f64>,
}

impl LocalGeometry {
    pub fn compute<M: ChartMap + ?Sized>(ambient: &Ambient, map: &M, u: f64, v: f64) -> Result<Self> {
        let frame = map.jet(u, v)?;
        Self::from_frame(ambient, frame, u, v)
    }

    pub fn from_frame(ambient: &Ambient, frame: Frame, u: f64, v: f64) -> Result<Self> {
        let point = ProductPoint::from_vec6(&ambient.params, &frame.value)?;
        let (p1, p2) = (frame.d1, frame.d2);
        let e = p1.dot(&p1);
        let f = p1.dot(&p2);
        let g = p2.dot(&p2);
        let det = e * g - f * f;
        if !(det > 0.0) || !det.is_finite() {
            return Err(GeomError::DegenerateMetric { det });
        }
        let inv = [[g / det, -f / det], [-f / det, e / det]];
        let tangent_part = |w: &Vec6| {
            let a = w.dot(&p1);
            let b = w.dot(&p2);
            p1 * (inv[0][0] * a + inv[0][1] * b) + p2 * (inv[1][0] * a + inv[1][1] * b)
        };
        let normal = |w: &Vec6| {
            let w = ambient.project(&point, w);
            w - tangent_part(&w)
        };
        let second = [frame.d11, frame.d12, frame.d22];
        let sigma = [normal(&second[0]), normal(&second[1]), normal(&second[2])];
        let idx = |i: usize, j: usize| if i + j == 0 { 0 } else if i + j == 1 { 1 } else { 2 };
        let mut h = Vec6::zeros();
        let mut h_tilde = Vec6::zeros();
        for i in 0..2 {
            for j in 0..2 {
                let s = second[idx(i, j)];
                h += sigma[idx(i, j)] * (0.5 * inv[i][j]);
                h_tilde += (s - tangent_part(&s)) * (0.5 * inv[i][j]);
            }
        }
        let mut sigma2 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        sigma2 += inv[i][k] * inv[j][l] * sigma[idx(i, j)].dot(&sigma[idx(k, l)]);
                    }
                }
            }
        }
        let jh = ambient.j_unchecked(&point, &h);
        let sqrt_det = det.sqrt();
        let lagrangian_defect = ambient.j_unchecked(&point, &p1).dot(&p2) / sqrt_det;
        let c = ambient.first_factor_form(&point, &p1, &p2) / sqrt_det;
        let conformal_defect = (e - g).abs().max(f.abs()) / e;

        let half = Complex64::new(0.5, 0.0);
        let delta = complexify(&p1, &-p2) * half;
        let dd = complexify(&(frame.d11 - frame.d22), &(frame.d12 * -2.0)) * Complex64::new(0.25, 0.0);
        let delta_delta = ambient.project_complex(&point, &dd);

        let geom = Self {
            ambient: *ambient,
            u,
            v,
            point,
            frame,
            e,
            f,
            g,
            det,
            inv,
            conformal_defect,
            lagrangian_defect,
            delta,
            delta_delta,
            sigma,
            sigma2,
            h,
            jh,
            h_tilde,
            c,
            k: None,
        };
        geom.check_invariants()?;
        Ok(geom)
    }

    fn check_invariants(&self) -> Result<()> {
        let all_finite = self.h.iter().chain(self.h_tilde.iter()).all(|x| x.is_finite())
            && self.sigma2.is_finite()
            && self.c.is_finite();
        if !all_finite {
            return Err(GeomError::Numeric(format!(
                "non-finite geometry at ({}, {})",
                self.u, self.v
            )));
        }
        // Relative to |H̃| too, so totally geodesic surfaces (H = 0 up to
        // rounding) pass.
        let hn = self.h.norm().max(self.h_tilde.norm());
        if hn > 0.0 {
            let t1 = (self.h.dot(&self.frame.d1) / (hn * self.e.sqrt())).abs();
            let t2 = (self.h.dot(&self.frame.d2) / (hn * self.g.sqrt())).abs();
            if t1.max(t2) > 1e-10 {
                return Err(GeomError::Numeric(format!(
                    "mean curvature not normal (defect {:e})",
                    t1.max(t2)
                )));
            }
        }
        if self.lagrangian_defect.abs() < 1e-8 && self.c.abs() > 0.5 + JACOBIAN_BOUND_SLACK {
            return Err(GeomError::Numeric(format!(
                "associated Jacobian {} violates |C| <= 1/2",
                self.c
            )));
        }
        Ok(())
    }

    pub fn sqrt_det(&self) -> f64 {
        self.det.sqrt()
    }

    pub fn h2(&self) -> f64 {
        self.h.norm_squared()
    }

    pub fn is_conformal(&self) -> bool {
        self.conformal_defect <= CONFORMAL_TOL
    }

    /// Conformal factor `e^{2u}`; fails outside conformal charts.
    pub fn conformal_factor(&self) -> Result<f64> {
        if self.is_conformal() {
            Ok(0.5 * (self.e + self.g))
        } else {
            Err(GeomError::NotConformal {
                defect: self.conformal_defect,
            })
        }
    }

    pub fn delta_bar(&self) -> CVec6 {
        self.delta.map(|z| z.conj())
    }

    /// Coordinates `X^i = g^{ij}⟨w, Φ_j⟩` of the tangential part of `w`.
    pub fn tangent_coords(&self, w: &Vec6) -> [f64; 2] {
        let a = w.dot(&self.frame.d1);
        let b = w.dot(&self.frame.d2);
        [
            self.inv[0][0] * a + self.inv[0][1] * b,
            self.inv[1][0] * a + self.inv[1][1] * b,
        ]
    }

    /// Component of `w` normal to the surface but tangent to S²×S².
    pub fn normal_part(&self, w: &Vec6) -> Vec6 {
        let w = self.ambient.project(&self.point, w);
        let x = self.tangent_coords(&w);
        w - self.frame.d1 * x[0] - self.frame.d2 * x[1]
    }

    /// `g^{ij} ⟨a_i, b_j⟩` for two pairs of vectors indexed by chart direction.
    pub fn contract(&self, a: &[Vec6; 2], b: &[Vec6; 2]) -> f64 {
        let mut s = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                s += self.inv[i][j] * a[i].dot(&b[j]);
            }
        }
        s
    }

    pub fn metric_derivatives(&self) -> [f64; 6] {
        metric_derivatives(&self.frame)
    }

    /// `|dφ(e1)|² + |dφ(e2)|²` and the same for ψ, for an orthonormal frame.
    pub fn factor_norm_sums(&self) -> (f64, f64) {
        let split = |w: &Vec6| (w.fixed_rows::<3>(0).into_owned(), w.fixed_rows::<3>(3).into_owned());
        let (a1, b1) = split(&self.frame.d1);
        let (a2, b2) = split(&self.frame.d2);
        let tr = |x1: &nalgebra::Vector3<f64>, x2: &nalgebra::Vector3<f64>| {
            self.inv[0][0] * x1.dot(x1) + 2.0 * self.inv[0][1] * x1.dot(x2) + self.inv[1][1] * x2.dot(x2)
        };
        (tr(&a1, &a2), tr(&b1, &b2))
    }

    /// Associated Jacobian through the complexified frame, `-i e^{-2u}⟨PδΦ, Jδ̄Φ⟩`.
    pub fn c_from_frame(&self) -> Result<f64> {
        let e2u = self.conformal_factor()?;
        let pd = apply_p_complex(&self.delta);
        let jdb = self.ambient.j_complex(&self.point, &self.delta_bar());
        Ok((Complex64::new(0.0, -1.0) * cdot(&pd, &jdb) / e2u).re)
    }

    /// `⟨δΦ, PδΦ⟩`.
    pub fn hopf_p(&self) -> Result<Complex64> {
        self.conformal_factor()?;
        Ok(cdot(&self.delta, &apply_p_complex(&self.delta)))
    }

    /// `⟨H, JδΦ⟩`.
    pub fn h_j_delta(&self) -> Result<Complex64> {
        self.conformal_factor()?;
        let jd = self.ambient.j_complex(&self.point, &self.delta);
        Ok(cdot(&complexify(&self.h, &Vec6::zeros()), &jd))
    }

    /// `⟨δδΦ, JδΦ⟩`.
    pub fn dd_j_delta(&self) -> Result<Complex64> {
        self.conformal_factor()?;
        let jd = self.ambient.j_complex(&self.point, &self.delta);
        Ok(cdot(&self.delta_delta, &jd))
    }

    pub fn with_k(mut self, k: f64) -> Self {
        self.k = Some(k);
        self
    }
}
