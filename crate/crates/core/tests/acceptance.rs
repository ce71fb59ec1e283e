//! Acceptance run on the reference instance c1 = 4, c2 = 1: grid 200x256,
//! step 1e-3, 1000 sample points. Prints one line per criterion and exits
//! nonzero if any criterion fails.

use std::f64::consts::PI;
use std::time::Instant;

use lagsphere::identities::{Calibration, Setup};
use lagsphere::immersions::{
    area_branch_point, closed_area, cyl_to_sphere, invert_at, lawlor_chart, minimal_hat, phi_family,
};
use lagsphere::integrals::{area_scan, global_checks, GlobalCheck, GlobalOptions, QuadratureGrid};
use lagsphere::report::{sample_points, verify_member, MemberReport, RunConfig, Status};
use lagsphere::{calculus as calc, Params};

const GRID: (usize, usize) = (200, 256);

fn params() -> Params {
    Params::new(4.0, 1.0).unwrap()
}

fn config() -> RunConfig {
    RunConfig {
        grid: GRID,
        samples: 1000,
        seed: 2024,
        ..RunConfig::default()
    }
}

fn globals_at(t: f64) -> Vec<GlobalCheck> {
    let grid = QuadratureGrid::new(GRID.0, GRID.1).unwrap();
    let opts = GlobalOptions {
        bochner_bands: &[],
        ..GlobalOptions::default()
    };
    global_checks(&Setup::new(params(), t), &grid, &opts).unwrap()
}

fn find<'a>(v: &'a [GlobalCheck], id: &str) -> &'a GlobalCheck {
    v.iter().find(|g| g.id == id).unwrap()
}

/// The branch formula for the area, written out directly.
fn area_oracle(t: f64) -> f64 {
    let (s, d) = (5.0f64, 3.0 * (2.0 * t).cosh());
    if d < s {
        32.0 * PI / (s * s - d * d)
            * (s - 2.0 * d * d / (s * s - d * d).sqrt() * ((s - d).sqrt() / (s + d).sqrt()).atanh())
    } else {
        32.0 * PI / (s * s - d * d)
            * (s - 2.0 * d * d / (d * d - s * s).sqrt() * ((d - s).sqrt() / (d + s).sqrt()).atan())
    }
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn crit_eight_pi(id: &str, by_t: &[(f64, Vec<GlobalCheck>)]) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for (t, g) in by_t {
        let c = find(g, id);
        worst = worst.max((c.value - 8.0 * PI).abs());
        parts.push(format!("t={t}: {:.8}", c.value));
    }
    outcome(worst <= 2e-4, format!("{} (max |err| {worst:.2e}, tol 2e-4)", parts.join(", ")))
}

fn crit_area(by_t: &[(f64, Vec<GlobalCheck>)]) -> Outcome {
    let p = params();
    let mut ok = true;
    let mut worst_quad: f64 = 0.0;
    for (t, g) in by_t.iter().filter(|(t, _)| [0.0, 0.3, 1.0].contains(t)) {
        let c = find(g, "area_vs_closed");
        let closed = closed_area(&p, *t);
        let rel = (c.value - closed).abs() / closed;
        worst_quad = worst_quad.max(rel);
        ok &= rel <= 1e-5;
        ok &= (closed - area_oracle(*t)).abs() <= 1e-12 * closed;
    }
    // Frozen from the branch formula above; quadrature agrees to 1e-10.
    let a0 = closed_area(&p, 0.0);
    let a1 = closed_area(&p, 1.0);
    ok &= (a0 - 15.884661207393).abs() <= 1e-9;
    ok &= (a1 - 8.834344504748).abs() <= 1e-9;
    let ts = area_branch_point(&p);
    let a_star = closed_area(&p, ts);
    ok &= (a_star - 64.0 * PI / 15.0).abs() <= 1e-5;
    let jump = [ts - 1e-6, ts + 1e-6]
        .iter()
        .map(|&t| (closed_area(&p, t) - a_star).abs() / a_star)
        .fold(0.0, f64::max);
    ok &= jump <= 1e-4;
    outcome(
        ok,
        format!(
            "quad vs closed max rel {worst_quad:.2e}; A(0)={a0:.6} A(1)={a1:.6} A(t*)={a_star:.6}; jump at t* {jump:.1e}"
        ),
    )
}

fn crit_degree(by_t: &[(f64, Vec<GlobalCheck>)]) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (t, g) in by_t.iter().filter(|(t, _)| [0.0, 1.0].contains(t)) {
        let c = find(g, "degree_zero");
        let area = find(g, "area_vs_closed").value;
        ok &= c.value.abs() <= 1e-6 * area;
        parts.push(format!("t={t}: {:.2e}", c.value));
    }
    outcome(ok, format!("∫C dA {} (tol 1e-6·area)", parts.join(", ")))
}

fn crit_gauss_bonnet(by_t: &[(f64, Vec<GlobalCheck>)]) -> Outcome {
    let mut worst: f64 = 0.0;
    for (_, g) in by_t {
        let c = find(g, "gauss_bonnet");
        worst = worst.max((c.value - 4.0 * PI).abs() / (4.0 * PI));
    }
    outcome(worst <= 1e-3, format!("max rel err of ∫K dA vs 4π: {worst:.2e} over all t"))
}

fn summary<'a>(m: &'a MemberReport, id: &str) -> &'a lagsphere::report::IdentitySummary {
    m.identities.iter().find(|s| s.id == id).unwrap()
}

fn crit_exact(m: &MemberReport) -> Outcome {
    let ids = [
        "theta",
        "hoc",
        "esfera2",
        "koh",
        "s0_membership",
        "lagrangian",
        "norm_sum",
        "frenet3",
        "moduli",
    ];
    let mut worst = (0.0f64, "");
    let mut ok = true;
    for id in ids {
        let s = summary(m, id);
        ok &= s.samples == 1000 && s.max_residual <= 1e-9;
        if s.max_residual >= worst.0 {
            worst = (s.max_residual, id);
        }
    }
    outcome(ok, format!("max residual {:.2e} ({}) over 1000 points", worst.0, worst.1))
}

fn crit_fd(m: &MemberReport) -> Outcome {
    let ids = ["xi", "grad_c", "delta_c", "lalog2", "lalog_k", "d_maslov", "ham_stat", "g_zbar"];
    let mut ok = true;
    let mut worst = (0.0f64, "");
    let mut min_order = f64::INFINITY;
    for id in ids {
        let s = summary(m, id);
        ok &= s.max_residual <= 1e-4 && s.samples > 0;
        if let Some(o) = s.order {
            ok &= o >= 1.9;
            min_order = min_order.min(o);
        } else {
            // Only xi is jet-exact; every other entry must carry an order.
            ok &= id == "xi";
        }
        if s.max_residual >= worst.0 {
            worst = (s.max_residual, id);
        }
    }
    let setup = Setup::new(params(), 0.0);
    let imm = setup.immersion();
    let surf = calc::Surface::new(setup.ambient(), &imm);
    let grad = calc::richardson(1e-3, |h| calc::gradient_norm2(&surf, &|g| Ok(g.c), 0.0, 0.0, h))
        .unwrap()
        .extrapolated();
    let lap_log = calc::richardson(1e-3, |h| {
        calc::laplace_beltrami(&surf, &|g| Ok(0.5 * g.h2().ln()), 0.0, 0.0, h)
    })
    .unwrap()
    .extrapolated();
    ok &= (grad - 4.0 / 3.0).abs() <= 1e-4;
    ok &= (lap_log + 8.0 / 3.0).abs() <= 1e-4;
    outcome(
        ok,
        format!(
            "max residual {:.2e} ({}), min order {min_order:.3}; equator |∇C|²={grad:.8} Δlog|H|={lap_log:.8}",
            worst.0, worst.1
        ),
    )
}

fn crit_stationarity(m0: &MemberReport, others: &[MemberReport]) -> Outcome {
    let p = params();
    let setup = Setup::new(p, 0.0);
    let imm = setup.immersion();
    let surf = calc::Surface::new(setup.ambient(), &imm);
    let mut sup: f64 = 0.0;
    for cp in sample_points(1000, 7, Some(0.95)) {
        let (s1, s2) = cp.coords();
        let d = calc::richardson(1e-3, |h| calc::divergence(&surf, &|g| Ok(g.jh), s1, s2, h))
            .unwrap()
            .extrapolated();
        sup = sup.max(d.abs());
    }
    let mut ok = sup <= 5e-6 * p.diff() && summary(m0, "div_match").status == Status::Pass;
    let mut parts = Vec::new();
    for m in others.iter().filter(|m| m.t == 0.3 || m.t == 1.0) {
        let s = summary(m, "div_match");
        ok &= s.max_residual <= 5e-6;
        ok &= m.discrimination.as_ref().is_some_and(|d| d.holds);
        parts.push(format!("t={}: {:.2e}", m.t, s.max_residual));
    }
    outcome(
        ok,
        format!("sup|div JH| at t=0 {sup:.2e}; div_match rel {}", parts.join(", ")),
    )
}

fn crit_inversion() -> Outcome {
    let p = params();
    let a = p.base_point().to_vec6();
    let mut dev: f64 = 0.0;
    let mut member: f64 = 0.0;
    for t in [0.0, 0.5, 1.0] {
        for i in 0..=60 {
            for j in 0..24 {
                let s1 = -3.0 + 0.1 * i as f64;
                let s2 = 2.0 * PI * j as f64 / 24.0;
                let inv = invert_at(&a, &minimal_hat(&p, t, s1, s2)).unwrap();
                let direct = phi_family(&p, t, &cyl_to_sphere(s1, s2)).unwrap().to_vec6();
                dev = dev.max((inv - direct).amax());
                let (f, g) = lawlor_chart(&p, t, s1, s2);
                let scale = 1.0 + f.norm_sqr() + g.norm_sqr();
                member = member
                    .max((f.norm_sqr() - g.norm_sqr() + p.diff()).abs() / scale)
                    .max(((f * g).re - p.diff() * t.sinh() * t.cosh()).abs() / scale);
            }
        }
    }
    outcome(
        dev <= 1e-10 && member <= 1e-10,
        format!("sup deviation {dev:.2e}, Lawlor membership {member:.2e}"),
    )
}

fn crit_variation(m: &MemberReport) -> Outcome {
    let s = summary(m, "variation_field");
    outcome(
        s.status == Status::Pass && s.max_residual <= 1e-5,
        format!(
            "max |n(∂tΦ) - J∇f| {:.2e} over {} points, order {:.3}",
            s.max_residual,
            s.samples,
            s.order.unwrap_or(f64::NAN)
        ),
    )
}

fn crit_scan() -> Outcome {
    let scan = area_scan(&params(), -3.0, 3.0, 121, None).unwrap();
    let a = &scan.analysis;
    let ok = a.argmax_t == 0.0
        && a.strictly_decreasing_on_positive
        && a.second_difference_at_zero < 0.0
        && a.end_ratio <= 0.12;
    outcome(
        ok,
        format!(
            "argmax t={}, decreasing {}, A''(0)≈{:.4}, A(3)/A(0)={:.4}",
            a.argmax_t, a.strictly_decreasing_on_positive, a.second_difference_at_zero, a.end_ratio
        ),
    )
}

fn crit_report_only(cfg: &RunConfig) -> Outcome {
    let p = params();
    let report = verify_member(cfg, p, 0.0).unwrap();
    let mut ok = true;
    for id in ["perp_h_closed", "poly_abc"] {
        let s = summary(&report, id);
        ok &= !s.gated && s.status == Status::ReportOnly && s.max_residual.is_finite();
    }
    let boch: Vec<&GlobalCheck> = report.globals.iter().filter(|g| g.id.starts_with("bochner")).collect();
    ok &= boch.len() == 2 && boch.iter().all(|g| !g.gated && g.value.is_finite() && g.passes());
    let gated_pass = report.identities.iter().filter(|s| s.gated).all(|s| s.passes())
        && report.globals.iter().filter(|g| g.gated).all(|g| g.passes());
    ok &= report.pass == gated_pass;
    let full = lagsphere::report::run_verify(&RunConfig { samples: 50, ..cfg.clone() }).unwrap();
    ok &= full.meta.notes.iter().any(|n| n.contains("report-only"));
    outcome(
        ok,
        format!(
            "perp_h_closed {:.3e}, poly_abc {:.3e}, bochner {}; member pass {}",
            summary(&report, "perp_h_closed").max_residual,
            summary(&report, "poly_abc").max_residual,
            boch.iter().map(|g| format!("{:.4}", g.value)).collect::<Vec<_>>().join("/"),
            report.pass
        ),
    )
}

fn main() {
    let start = Instant::now();
    assert_eq!(lagsphere::identities::calibrate(&params()).unwrap(), Calibration::FROZEN);
    let cfg = config();
    let ts = [0.0, 0.3, 0.549306, 1.0];
    let by_t: Vec<(f64, Vec<GlobalCheck>)> = ts.iter().map(|&t| (t, globals_at(t))).collect();
    let no_bochner = RunConfig { bochner: false, ..cfg.clone() };
    let m0 = verify_member(&no_bochner, params(), 0.0).unwrap();
    let others: Vec<MemberReport> = [0.3, 1.0]
        .iter()
        .map(|&t| verify_member(&no_bochner, params(), t).unwrap())
        .collect();

    let results = [
        ("eight-pi identity", crit_eight_pi("eight_pi", &by_t)),
        ("Willmore identity", crit_eight_pi("willmore", &by_t)),
        ("area closed form", crit_area(&by_t)),
        ("degree zero", crit_degree(&by_t)),
        ("Gauss-Bonnet", crit_gauss_bonnet(&by_t)),
        ("jet-exact pointwise suite", crit_exact(&m0)),
        ("finite-difference pointwise suite", crit_fd(&m0)),
        ("stationarity discrimination", crit_stationarity(&m0, &others)),
        ("inversion construction", crit_inversion()),
        ("variation field", crit_variation(&m0)),
        ("area scan", crit_scan()),
        ("report-only computations", crit_report_only(&cfg)),
    ];
    let mut failed = 0;
    for (i, (name, o)) in results.iter().enumerate() {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {tag} {name}: {}", i + 1, o.detail);
        failed += usize::from(!o.pass);
    }
    let elapsed = start.elapsed().as_secs_f64();
    let in_budget = elapsed <= 60.0;
    println!(
        "runtime {} {elapsed:.1}s (budget 60s)",
        if in_budget { "PASS" } else { "FAIL" }
    );
    if failed > 0 || !in_budget {
        eprintln!("{failed} criteria failed");
        std::process::exit(1);
    }
}
