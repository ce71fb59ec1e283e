//! Quadrature over the immersed sphere and the global checks built on it.
//!
//! Nodes are Gauss–Legendre in the height `x` and uniform in the angle `θ`;
//! geometry is evaluated in the cylinder chart at `s1 = artanh x`, `s2 = θ`,
//! so the area element is `√det g / (1 - x²) dθ dx`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::ambient::{Ambient, Params};
use crate::calculus::{self as calc, ChartMap, LocalGeometry, Surface};
use crate::error::{GeomError, Result};
use crate::identities::{poly_coefficients, Setup};
use crate::immersions::{area_branch_point, closed_area, Chart};

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
            }
            dp = nf * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let wt = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wt;
        w[n - 1 - i] = wt;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// Fixed-order pairwise sum, independent of thread scheduling.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 8 {
        v.iter().sum()
    } else {
        let (a, b) = v.split_at(v.len() / 2);
        pairwise_sum(a) + pairwise_sum(b)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct QuadratureGrid {
    pub n_x: usize,
    pub n_theta: usize,
    #[serde(skip)]
    pub x: Vec<f64>,
    #[serde(skip)]
    pub x_weights: Vec<f64>,
    /// Nodes are mapped affinely onto `[-band, band]`.
    pub band: f64,
}

impl QuadratureGrid {
    pub fn new(n_x: usize, n_theta: usize) -> Result<Self> {
        Self::banded(n_x, n_theta, 1.0)
    }

    /// Grid covering only `|x| ≤ band`.
    pub fn banded(n_x: usize, n_theta: usize, band: f64) -> Result<Self> {
        if n_x < 2 || n_theta < 2 {
            return Err(GeomError::Domain(format!("grid {n_x}x{n_theta} too small")));
        }
        if !(band > 0.0 && band <= 1.0) {
            return Err(GeomError::Domain(format!("band {band} outside (0, 1]")));
        }
        let (x, w) = gauss_legendre(n_x);
        Ok(Self {
            n_x,
            n_theta,
            x: x.iter().map(|v| v * band).collect(),
            x_weights: w.iter().map(|v| v * band).collect(),
            band,
        })
    }

    pub fn doubled(&self) -> Result<Self> {
        Self::banded(2 * self.n_x, 2 * self.n_theta, self.band)
    }

    pub fn theta(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.n_theta as f64
    }

    pub fn theta_weight(&self) -> f64 {
        2.0 * PI / self.n_theta as f64
    }
}

pub type Density<'a> = dyn Fn(&LocalGeometry) -> Result<f64> + Sync + 'a;

/// `∫ density dA` of a chart map given in the cylinder or sphere chart.
pub fn integrate_map(
    ambient: &Ambient,
    map: &dyn ChartMap,
    chart: Chart,
    density: &Density,
    grid: &QuadratureGrid,
) -> Result<f64> {
    let rows: Vec<f64> = (0..grid.n_x)
        .into_par_iter()
        .map(|i| {
            let x = grid.x[i];
            let mut row = Vec::with_capacity(grid.n_theta);
            for j in 0..grid.n_theta {
                let th = grid.theta(j);
                let (g, jac) = match chart {
                    Chart::Cylinder => (
                        LocalGeometry::compute(ambient, map, x.atanh(), th)?,
                        1.0 / ((1.0 - x) * (1.0 + x)),
                    ),
                    Chart::Sphere => (LocalGeometry::compute(ambient, map, th, x)?, 1.0),
                };
                row.push(density(&g)? * g.sqrt_det() * jac);
            }
            Ok(pairwise_sum(&row) * grid.x_weights[i])
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(pairwise_sum(&rows) * grid.theta_weight())
}

/// `∫ density dA` over the member of the family described by `setup`.
pub fn integrate(setup: &Setup, density: &Density, grid: &QuadratureGrid) -> Result<f64> {
    integrate_map(&setup.ambient(), &setup.immersion(), Chart::Cylinder, density, grid)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TolKind {
    Absolute,
    Relative,
}

#[derive(Debug, Clone, Serialize)]
pub struct GlobalCheck {
    pub id: String,
    pub anchor: &'static str,
    pub t: f64,
    pub value: f64,
    pub expected: f64,
    pub abs_err: f64,
    pub rel_err: Option<f64>,
    pub tol: Option<f64>,
    pub tol_kind: TolKind,
    pub gated: bool,
    /// Change of the value when both grid dimensions double.
    pub refinement: Option<f64>,
    pub note: Option<String>,
}

impl GlobalCheck {
    #[allow(clippy::too_many_arguments)]
    fn new(
        id: &'static str,
        anchor: &'static str,
        t: f64,
        value: f64,
        expected: f64,
        tol: Option<f64>,
        tol_kind: TolKind,
    ) -> Self {
        let abs_err = (value - expected).abs();
        Self {
            id: id.to_string(),
            anchor,
            t,
            value,
            expected,
            abs_err,
            rel_err: (expected != 0.0).then(|| abs_err / expected.abs()),
            tol,
            tol_kind,
            gated: tol.is_some(),
            refinement: None,
            note: None,
        }
    }

    pub fn error(&self) -> f64 {
        match self.tol_kind {
            TolKind::Absolute => self.abs_err,
            TolKind::Relative => self.rel_err.unwrap_or(self.abs_err),
        }
    }

    pub fn passes(&self) -> bool {
        let within = |tol: f64| self.error() <= tol && self.refinement.is_none_or(|r| r <= tol);
        self.tol.is_none_or(within)
    }
}

/// Which global quantities to compute.
#[derive(Debug, Clone, Copy)]
pub struct GlobalOptions {
    /// Recompute every gated integral on the doubled grid.
    pub refine: bool,
    /// Bands for the report-only Bochner integral (`t = 0` only).
    pub bochner_bands: &'static [f64],
    pub gauss_bonnet: bool,
}

impl Default for GlobalOptions {
    fn default() -> Self {
        Self {
            refine: false,
            bochner_bands: &[0.95, 0.99],
            gauss_bonnet: true,
        }
    }
}

struct Integrands {
    area: f64,
    eight_pi: f64,
    willmore: f64,
    jacobian: f64,
}

fn jet_integrals(setup: &Setup, grid: &QuadratureGrid) -> Result<Integrands> {
    let quarter = setup.params.sum() / 4.0;
    // All four densities from one pass over the grid.
    let parts: [&Density; 4] = [
        &|_g| Ok(1.0),
        &|g| Ok(g.h2() + quarter),
        &|g| Ok(g.h_tilde.norm_squared()),
        &|g| Ok(g.c),
    ];
    let vals = parts
        .iter()
        .map(|d| integrate(setup, *d, grid))
        .collect::<Result<Vec<f64>>>()?;
    Ok(Integrands {
        area: vals[0],
        eight_pi: vals[1],
        willmore: vals[2],
        jacobian: vals[3],
    })
}

/// `∫ K dA` with `K` from the intrinsic (Brioschi) curvature.
pub fn total_curvature(setup: &Setup, grid: &QuadratureGrid) -> Result<f64> {
    let imm = setup.immersion();
    let h = setup.fd_step;
    integrate(
        setup,
        &|g| Ok(calc::gauss_curvature_richardson(&imm, g.u, g.v, h)?.extrapolated()),
        grid,
    )
}

/// Bochner integral `∫(K|H|² + |∇⊥H|²) dA` over `|x| ≤ band`, with the area
/// of the excluded caps.
pub fn bochner_integral(setup: &Setup, n_x: usize, n_theta: usize, band: f64) -> Result<(f64, f64)> {
    let grid = QuadratureGrid::banded(n_x, n_theta, band)?;
    let imm = setup.immersion();
    let surf = Surface::new(setup.ambient(), &imm);
    let h = setup.fd_step;
    let val = integrate(
        setup,
        &|g| {
            let k = calc::gauss_curvature_richardson(&imm, g.u, g.v, h)?.extrapolated();
            let perp = calc::richardson(h, |hh| calc::normal_connection_norm2(&surf, g.u, g.v, hh))?;
            Ok(k * g.h2() + perp.extrapolated())
        },
        &grid,
    )?;
    let inside = integrate(setup, &|_g| Ok(1.0), &grid)?;
    Ok((val, closed_area(&setup.params, setup.t) - inside))
}

pub const AREA_TOL: f64 = 1e-5;
pub const EIGHT_PI_TOL: f64 = 2e-4;
pub const DEGREE_TOL: f64 = 1e-6;
pub const GAUSS_BONNET_TOL: f64 = 1e-3;

/// Global checks on one member of the family.
pub fn global_checks(setup: &Setup, grid: &QuadratureGrid, opts: &GlobalOptions) -> Result<Vec<GlobalCheck>> {
    let t = setup.t;
    let eight_pi = 8.0 * PI;
    let base = jet_integrals(setup, grid)?;
    let fine = if opts.refine {
        Some(jet_integrals(setup, &grid.doubled()?)?)
    } else {
        None
    };
    let mut out = Vec::new();

    let mut area = GlobalCheck::new(
        "area_vs_closed",
        "∫ dA = A(t), closed form in s = c1+c2, d = (c1-c2)cosh 2t",
        t,
        base.area,
        closed_area(&setup.params, t),
        Some(AREA_TOL),
        TolKind::Relative,
    );
    area.refinement = fine.as_ref().map(|f| (f.area - base.area).abs() / base.area);
    out.push(area);

    let mut ep = GlobalCheck::new(
        "eight_pi",
        "∫ (|H|² + (c1+c2)/4) dA = 8π",
        t,
        base.eight_pi,
        eight_pi,
        Some(EIGHT_PI_TOL),
        TolKind::Absolute,
    );
    ep.refinement = fine.as_ref().map(|f| (f.eight_pi - base.eight_pi).abs());
    out.push(ep);

    let mut wf = GlobalCheck::new(
        "willmore",
        "∫ |H̃|² dA = 8π, H̃ = H - (c1φ, c2ψ)/2 the mean curvature in ℝ⁶",
        t,
        base.willmore,
        eight_pi,
        Some(EIGHT_PI_TOL),
        TolKind::Absolute,
    );
    wf.refinement = fine.as_ref().map(|f| (f.willmore - base.willmore).abs());
    out.push(wf);

    let tol = DEGREE_TOL * base.area;
    let mut dz = GlobalCheck::new(
        "degree_zero",
        "∫ C dA = 0 (both factor maps have degree zero)",
        t,
        base.jacobian,
        0.0,
        Some(tol),
        TolKind::Absolute,
    );
    dz.refinement = fine.as_ref().map(|f| (f.jacobian - base.jacobian).abs());
    dz.note = Some(format!("tolerance is {DEGREE_TOL:e} times the area"));
    out.push(dz);

    if opts.gauss_bonnet {
        let kt = total_curvature(setup, grid)?;
        let mut gb = GlobalCheck::new(
            "gauss_bonnet",
            "∫ K dA = 4π with K from the intrinsic metric",
            t,
            kt,
            4.0 * PI,
            Some(GAUSS_BONNET_TOL),
            TolKind::Relative,
        );
        if opts.refine {
            let kf = total_curvature(setup, &grid.doubled()?)?;
            gb.refinement = Some((kf - kt).abs() / (4.0 * PI));
        }
        out.push(gb);
    }

    if t == 0.0 {
        for &band in opts.bochner_bands {
            let (val, excluded) = bochner_integral(setup, grid.n_x, grid.n_theta.min(64), band)?;
            let mut b = GlobalCheck::new(
                "bochner",
                "∫ (K|H|² + |∇⊥H|²) dA = 0 over |x| ≤ band",
                t,
                val,
                0.0,
                None,
                TolKind::Absolute,
            );
            b.id = format!("bochner_band_{}", (band * 100.0).round());
            b.note = Some(format!("band {band}: excluded cap area {excluded:.6e}; report-only"));
            out.push(b);
        }
    }
    Ok(out)
}

/// Pointwise `K|H|² + |∇⊥H|²` and the displayed polynomial at `t = 0`.
pub fn bochner_density(setup: &Setup, u: f64, v: f64) -> Result<(f64, f64)> {
    let imm = setup.immersion();
    let surf = Surface::new(setup.ambient(), &imm);
    let g = surf.geometry(u, v)?;
    let k = calc::gauss_curvature_richardson(&imm, u, v, setup.fd_step)?.extrapolated();
    let perp = calc::normal_connection_norm2(&surf, u, v, setup.fd_step)?;
    let (a, b, c) = poly_coefficients(&setup.params, g.c);
    let h2 = g.h2();
    Ok((k * h2 + perp, a * h2 * h2 + b * h2 + c))
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanRow {
    pub t: f64,
    pub a_closed: f64,
    pub a_quad: Option<f64>,
    pub rel_err: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanAnalysis {
    pub argmax_t: f64,
    /// `max |A(t) - A(-t)|` over mirrored samples.
    pub evenness_defect: f64,
    pub strictly_decreasing_on_positive: bool,
    /// Central second difference of `A` at `0` with step 0.05.
    pub second_difference_at_zero: f64,
    /// `A(t_max) / A(0)`.
    pub end_ratio: f64,
    /// Jump across `t*` measured at `t* ± 1e-6`, relative to `A(t*)`.
    pub branch_jump: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AreaScan {
    pub rows: Vec<ScanRow>,
    pub analysis: ScanAnalysis,
}

/// Tabulate `A(t)` on a uniform grid of `steps` values, optionally with quadrature.
pub fn area_scan(
    params: &Params,
    t_min: f64,
    t_max: f64,
    steps: usize,
    grid: Option<&QuadratureGrid>,
) -> Result<AreaScan> {
    if !(t_min < t_max) || !t_min.is_finite() || !t_max.is_finite() {
        return Err(GeomError::Domain(format!("empty scan range [{t_min}, {t_max}]")));
    }
    if steps < 3 {
        return Err(GeomError::Domain(format!("scan needs at least 3 steps, got {steps}")));
    }
    let ts: Vec<f64> = (0..steps)
        .map(|i| t_min + (t_max - t_min) * i as f64 / (steps - 1) as f64)
        .collect();
    let rows = ts
        .iter()
        .map(|&t| {
            let a_closed = closed_area(params, t);
            let a_quad = match grid {
                Some(g) => Some(integrate(&Setup::new(*params, t), &|_g| Ok(1.0), g)?),
                None => None,
            };
            Ok(ScanRow {
                t,
                a_closed,
                a_quad,
                rel_err: a_quad.map(|q| (q - a_closed).abs() / a_closed),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let argmax_t = rows
        .iter()
        .fold((f64::NEG_INFINITY, 0.0), |(best, bt), r| {
            if r.a_closed > best {
                (r.a_closed, r.t)
            } else {
                (best, bt)
            }
        })
        .1;
    let evenness_defect = ts
        .iter()
        .map(|&t| (closed_area(params, t) - closed_area(params, -t)).abs())
        .fold(0.0, f64::max);
    let positive: Vec<&ScanRow> = rows.iter().filter(|r| r.t >= 0.0).collect();
    let strictly_decreasing_on_positive = positive.windows(2).all(|w| w[1].a_closed < w[0].a_closed);
    let step = 0.05;
    let second_difference_at_zero =
        (closed_area(params, step) - 2.0 * closed_area(params, 0.0) + closed_area(params, -step)) / (step * step);
    let ts_star = area_branch_point(params);
    let mid = closed_area(params, ts_star);
    let branch_jump = (closed_area(params, ts_star - 1e-6) - mid)
        .abs()
        .max((closed_area(params, ts_star + 1e-6) - mid).abs())
        / mid;
    Ok(AreaScan {
        rows,
        analysis: ScanAnalysis {
            argmax_t,
            evenness_defect,
            strictly_decreasing_on_positive,
            second_difference_at_zero,
            end_ratio: closed_area(params, t_max) / closed_area(params, 0.0),
            branch_jump,
        },
    })
}
