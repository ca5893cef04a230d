//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::process::ExitCode;
use std::time::Instant;

use otsfd::experiments::{advection_2d_run, lookup, starfish_run, RunContext, RunOptions};
use otsfd::grid::CORNER_STENCIL;
use otsfd::harness::{
    boundary_concentration, boundary_samples, default_timing_cases, first_step_probe, run_study, timing_study,
    ConvergenceReport, StudyConfig, TimingReport,
};
use otsfd::linalg::{solve_banded, solve_cg, solve_tridiagonal, BandedMatrix, CgOptions};
use otsfd::solvers_1d::SchemeVariant;
use otsfd::sources::{fixture, pde_residual, Pde, FIXTURE_NAMES};
use otsfd::stencil::{bilaplacian_1d_o4, laplacian_1d_c2, laplacian_9pt_at, ScalarField1D, ScalarField2D};
use otsfd::{TimeStepPolicy, UniformGrid1D, UniformGrid2D};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn study(name: &str, variant: SchemeVariant) -> ConvergenceReport {
    run_study(&StudyConfig::new(name, variant).expect("registered")).expect("study runs")
}

fn ots_nidc(name: &str) -> ConvergenceReport {
    study(name, SchemeVariant::OTS_NIDC)
}

fn ots_plain(name: &str) -> ConvergenceReport {
    study(name, SchemeVariant::new(false, TimeStepPolicy::Optimal))
}

fn suboptimal(name: &str) -> ConvergenceReport {
    study(name, SchemeVariant::new(false, lookup(name).unwrap().suboptimal))
}

fn default_variant(name: &str) -> ConvergenceReport {
    study(name, lookup(name).unwrap().default_variant())
}

fn order(r: &ConvergenceReport) -> f64 {
    if r.failures().next().is_some() {
        return f64::NAN;
    }
    r.order().unwrap_or(f64::NAN)
}

fn unit_cfl() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for fx in ["advection-smooth", "advection-square"] {
        let cfg = StudyConfig::new("advection-1d", SchemeVariant::new(false, TimeStepPolicy::Optimal))
            .unwrap()
            .with_fixture(fx);
        let r = run_study(&cfg).unwrap();
        assert_eq!(r.rows.iter().map(|x| x.n).collect::<Vec<_>>(), vec![50, 100, 200, 400]);
        worst = worst.max(if r.failures().next().is_some() { f64::INFINITY } else { r.max_error() });
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(worst <= 1e-12 && secs < 1.0, format!("max error {worst:.2e} (<= 1e-12), runtime {secs:.3} s (< 1 s)"))
}

fn advection_2d() -> Outcome {
    let start = Instant::now();
    let e = lookup("advection-2d").unwrap();
    let fx = e.default_fixture().unwrap();
    let opts = RunOptions::default();
    let ctx = |variant| RunContext { experiment: e, n: 99, variant, final_time: 3.0, fixture: &fx, options: &opts };
    let (u, opt) = advection_2d_run(&ctx(SchemeVariant::OTS_NIDC)).unwrap();
    let (_, sub) = advection_2d_run(&ctx(SchemeVariant::new(false, e.suboptimal))).unwrap();
    let secs = start.elapsed().as_secs_f64();

    // The optimal run must be the initial field shifted by `steps` nodes along each axis.
    let g = u.grid.clone();
    let u0 = ScalarField2D::from_fn(g.clone(), 0.0, |x, y| fx.exact.value(x, y, 0.0));
    let k = opt.steps as isize;
    let (mut shifted, mut ones) = (true, 0usize);
    for j in 0..g.ny as isize - k {
        for i in 0..g.nx as isize - k {
            let (a, b) = (u.get(i, j), u0.get(i + k, j + k));
            shifted &= a.to_bits() == b.to_bits();
            ones += (a == 1.0) as usize;
        }
    }
    // Extreme pulse nodes along each axis direction keep the value 1.
    let pulse: Vec<(isize, isize)> = (0..g.ny as isize)
        .flat_map(|j| (0..g.nx as isize).map(move |i| (i, j)))
        .filter(|&(i, j)| u.get(i, j) != 0.0)
        .collect();
    let extremes = [
        pulse.iter().min_by_key(|p| p.0),
        pulse.iter().max_by_key(|p| p.0),
        pulse.iter().min_by_key(|p| p.1),
        pulse.iter().max_by_key(|p| p.1),
    ];
    let corners_exact = extremes.iter().all(|p| p.is_some_and(|&(i, j)| u.get(i, j) == 1.0));
    let pass = opt.error_linf <= 1e-12 && shifted && corners_exact && ones > 0 && sub.error_linf >= 0.1 && secs < 5.0;
    outcome(
        pass,
        format!(
            "optimal error {:.1e}, exact shift {shifted}, corner values exact {corners_exact}; suboptimal error {:.3} (O(1)); runtime {secs:.2} s",
            opt.error_linf, sub.error_linf
        ),
    )
}

fn kpy() -> Outcome {
    let (a, b) = (order(&ots_nidc("wave-1d-kpy")), order(&suboptimal("wave-1d-kpy")));
    outcome(a >= 3.7 && b <= 2.3, format!("OTS-NIDC order {a:.3} (>= 3.7), suboptimal {b:.3} (<= 2.3)"))
}

fn first_step() -> Outcome {
    let p = first_step_probe(20, 4).unwrap();
    let (o3, o5) = (order(&p.third_order), order(&p.fifth_order));
    let drop = o5 - o3;
    outcome(drop >= 0.7, format!("fifth-order start {o5:.3}, third-order start {o3:.3}, drop {drop:.3} (>= 0.7)"))
}

fn diffusion_fe() -> Outcome {
    let (a, b) = (order(&ots_nidc("diffusion-1d-fe")), order(&ots_plain("diffusion-1d-fe")));
    outcome(a >= 3.7 && b <= 2.3, format!("OTS + correction {a:.3} (>= 3.7), OTS without correction {b:.3} (<= 2.3)"))
}

fn dufort_frankel() -> Outcome {
    let name = "diffusion-1d-dufort-frankel";
    let (a, b, c) = (order(&ots_nidc(name)), order(&suboptimal(name)), order(&ots_plain(name)));
    outcome(
        a >= 3.7 && b <= 2.3 && c <= 2.3,
        format!("OTS-NIDC {a:.3} (>= 3.7), dt = dx^2/4 {b:.3} (<= 2.3), OTS uncorrected {c:.3} (<= 2.3)"),
    )
}

fn burgers() -> Outcome {
    let (a, b) = (order(&ots_nidc("burgers-1d")), order(&suboptimal("burgers-1d")));
    outcome(a >= 3.6 && b <= 2.3, format!("OTS-NIDC {a:.3} (>= 3.6), dt = dx^2/(4 nu) uncorrected {b:.3} (<= 2.3)"))
}

fn parabolic4() -> Outcome {
    let a = order(&ots_nidc("parabolic4-1d-fe"));
    let b = order(&suboptimal("parabolic4-1d-fe"));
    let c = order(&default_variant("parabolic4-1d-cn2"));
    outcome(
        a >= 5.5 && (3.6..=4.4).contains(&b) && c <= 2.4,
        format!("OTS-NIDC {a:.3} (>= 5.5), suboptimal FE {b:.3} (3.6..4.4), CN 5-point {c:.3} (<= 2.4)"),
    )
}

fn diffusion_2d() -> Outcome {
    let a = order(&ots_nidc("diffusion-2d-9pt"));
    let b = order(&suboptimal("diffusion-2d-9pt"));
    let c = order(&default_variant("diffusion-2d-cn5"));
    outcome(
        a >= 3.7 && b <= 2.3 && c <= 2.3,
        format!("OTS-NIDC {a:.3} (>= 3.7), suboptimal {b:.3} (<= 2.3), CN 5-point {c:.3} (<= 2.3)"),
    )
}

fn starfish() -> Outcome {
    let r = ots_nidc("diffusion-2d-starfish");
    let ns: Vec<usize> = r.rows.iter().map(|x| x.n).collect();
    let a = order(&r);
    let b = order(&suboptimal("diffusion-2d-starfish"));

    let e = lookup("diffusion-2d-starfish").unwrap();
    let fx = e.default_fixture().unwrap();
    let opts = RunOptions::default();
    let ctx = RunContext {
        experiment: e,
        n: 100,
        variant: SchemeVariant::OTS_NIDC,
        final_time: e.final_time,
        fixture: &fx,
        options: &opts,
    };
    let run = starfish_run(&ctx).unwrap();
    let errs = run.nodal_errors(&fx.exact);
    let g = &run.cls.grid;
    let pts: Vec<(f64, f64)> = errs.iter().map(|&(i, j, _)| (g.x(i as isize), g.y(j as isize))).collect();
    let ev: Vec<f64> = errs.iter().map(|x| x.2).collect();
    let frac = boundary_concentration(&pts, &ev, &boundary_samples(&run.cls), 0.25, 3.0 * g.dx).unwrap_or(0.0);
    outcome(
        a >= 3.5 && b <= 2.4 && frac >= 0.9 && ns == [50, 100, 200, 400],
        format!(
            "OTS-NIDC {a:.3} over N = {ns:?} (>= 3.5), suboptimal {b:.3} (<= 2.4), large errors within 3 dx of boundary at N = 100: {:.1}% (>= 90%)",
            100.0 * frac
        ),
    )
}

fn timing() -> Outcome {
    let reports = timing_study(&default_timing_cases().unwrap()).unwrap();
    let find = |name: &str| reports.iter().find(|t| t.report.experiment == name).unwrap();
    let mut detail = Vec::new();
    let mut pass = true;
    for t in &reports {
        let s = t.slope.unwrap_or(f64::NAN);
        pass &= s < 0.0;
        let band = match t.expected {
            Some(x) => format!(" vs {x:.3}{}", if (s - x).abs() <= 0.25 { "" } else { " (outside +-0.25)" }),
            None => String::new(),
        };
        detail.push(format!("{} {s:.2}{band}", t.report.experiment));
    }
    let fe: &TimingReport = find("diffusion-2d-9pt");
    let dominates = fe.dominates(find("diffusion-2d-cn5")) == Some(true);
    pass &= dominates;
    detail.push(format!("2D OTS-NIDC beats CN at equal error: {dominates}"));
    outcome(pass, format!("slopes: {}", detail.join("; ")))
}

fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}

fn oracles() -> Outcome {
    let mut failures = Vec::new();
    let mut check = |ok: bool, what: &str| {
        if !ok {
            failures.push(what.to_string());
        }
    };

    // Weight evaluation on polynomials the stencils must differentiate exactly.
    let grid = UniformGrid1D::new(-1.0, 1.0, 21, 3).unwrap();
    let quad = ScalarField1D::from_fn(grid.clone(), 0.0, |x| 3.0 * x * x - x + 2.0);
    check(laplacian_1d_c2(&quad).unwrap().iter().all(|v| (v - 6.0).abs() < 1e-9), "3-point Laplacian of a quadratic");
    let p5 = ScalarField1D::from_fn(grid, 0.0, |x| x.powi(5) + x.powi(4));
    check(
        bilaplacian_1d_o4(&p5).unwrap().iter().zip(0..).all(|(v, i)| {
            let x = -1.0 + 0.1 * i as f64;
            (v - (120.0 * x + 24.0)).abs() < 1e-7
        }),
        "7-point bilaplacian of a quintic",
    );
    check((CORNER_STENCIL.iter().map(|(_, w)| w).sum::<f64>() - 1.0).abs() < 1e-15, "corner weights sum to one");
    let corner_x: f64 = CORNER_STENCIL.iter().map(|((p, _), w)| w * *p as f64).sum();
    let corner_xy: f64 = CORNER_STENCIL.iter().map(|((p, q), w)| w * (*p as f64) * (*q as f64)).sum();
    check(corner_x == 1.0 && corner_xy == 1.0, "corner stencil reproduces x and xy at (1, 1)");

    // Eigenmode amplification of the nine-point Laplacian: symbol (4c^2 + 16c - 20)/(6h^2).
    let g2 = UniformGrid2D::square(0.0, 1.0, 11, 0).unwrap();
    let (kx, ky) = (1.3, 2.1);
    let f = ScalarField2D::from_fn(g2.clone(), 0.0, |x, y| (kx * x).sin() * (ky * y).sin());
    let h = g2.dx;
    let (cx, cy) = ((kx * h).cos(), (ky * h).cos());
    let symbol = (4.0 * cx * cy + 8.0 * (cx + cy) - 20.0) / (6.0 * h * h);
    check(
        (1..10).all(|j| (1..10).all(|i| (laplacian_9pt_at(&f, i, j) - symbol * f.get(i, j)).abs() < 1e-10)),
        "nine-point eigenmode symbol",
    );

    // Manufactured residuals vanish.
    for &name in FIXTURE_NAMES {
        let fx = fixture(name).unwrap();
        let pde = match name {
            "wave-manufactured" => Pde::Wave1D { c: fx.coefficient },
            "diffusion-manufactured" => Pde::Diffusion1D { d: fx.coefficient },
            "parabolic4-manufactured" => Pde::Parabolic4 { kappa: fx.coefficient },
            "diffusion2d-manufactured" => Pde::Diffusion2D { d: fx.coefficient },
            _ => continue,
        };
        let worst = (0..50)
            .map(|k| {
                let s = k as f64 / 50.0;
                pde_residual(pde, &fx.exact, &fx.source, 0.9 * s + 0.05, 0.3 - 0.4 * s, 0.7 * s).abs()
            })
            .fold(0.0, f64::max);
        check(worst < 1e-10, &format!("{name} residual {worst:.1e}"));
    }

    // Banded and tridiagonal solves against a dense elimination; CG against the tridiagonal solve.
    let n = 12;
    let mut a = BandedMatrix::zeros(n, 2, 2);
    let mut dense = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in -2i64..=2 {
            let j = i as i64 + k;
            if (0..n as i64).contains(&j) {
                let v = if k == 0 { 7.0 + i as f64 * 0.1 } else { -1.0 / (1.0 + k.abs() as f64 + 0.05 * i as f64) };
                a.set(i, j as usize, v);
                dense[i][j as usize] = v;
            }
        }
    }
    let b: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).sin()).collect();
    let xb = solve_banded(&a, &b).unwrap();
    let xd = dense_solve(dense, b.clone());
    check(xb.iter().zip(&xd).all(|(p, q)| (p - q).abs() < 1e-12), "banded solve vs dense elimination");
    let (sub, diag, sup) = (vec![-1.0; n], vec![2.5; n], vec![-1.0; n]);
    let xt = solve_tridiagonal(&sub, &diag, &sup, &b).unwrap();
    let mut xc = vec![0.0; n];
    solve_cg(
        |x, out| {
            for i in 0..n {
                out[i] = 2.5 * x[i] - if i > 0 { x[i - 1] } else { 0.0 } - if i + 1 < n { x[i + 1] } else { 0.0 };
            }
        },
        &b,
        &mut xc,
        CgOptions { rel_tol: 1e-14, max_iter: 100 },
    )
    .unwrap();
    check(xt.iter().zip(&xc).all(|(p, q)| (p - q).abs() < 1e-12), "CG vs tridiagonal solve");

    let pass = failures.is_empty();
    outcome(pass, if pass { "stencil weights, eigenmode, residual and dense-solve oracles agree".into() } else { failures.join("; ") })
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("unit CFL exactness (1D advection)", unit_cfl),
        ("2D advection exact shift", advection_2d),
        ("KPY wave convergence", kpy),
        ("first-step degradation", first_step),
        ("1D diffusion forward Euler", diffusion_fe),
        ("DuFort-Frankel", dufort_frankel),
        ("Burgers Re = 10", burgers),
        ("fourth-order parabolic", parabolic4),
        ("2D diffusion, regular domain", diffusion_2d),
        ("2D diffusion, starfish domain", starfish),
        ("timing trends", timing),
        ("stencil and oracle suites", oracles),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let o = run();
        println!("{} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += !o.pass as usize;
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
