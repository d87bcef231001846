//! End-to-end acceptance suite. Each criterion prints one PASS/FAIL line with
//! its measured values and runtime; the test fails if any criterion fails.
//!
//! Everything runs inside one test so the runtimes are not distorted by
//! other tests competing for cores.

use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;
use ptdiff::density::{Coordinate, DensityField, Measure, Sampling};
use ptdiff::ground_state::{annihilation_residual, annihilation_residual_where, build_ground_state, count_modes, Family};
use ptdiff::operator::{adjoint_residual, assemble, spectrum_check, Grid1D, OperatorSpec, Variant};
use ptdiff::runner::config::load_config;
use ptdiff::runner::simulate::simulate;
use ptdiff::runner::tools::{monomial_scaling_request, run_map_osp};
use ptdiff::scaling::{classify_regime, fit_scaling, osp_to_pt, pt_to_osp, MsdSeries, Regime, ScalingError};
use ptdiff::solvers::solve;
use ptdiff::spectral::{
    bessel_transform, eigenrelation_residual, gft_kernel_samples, wft_forward, BesselBranch, BesselKernelSpec,
    GftKernel, KGrid, KMode,
};
use ptdiff::transform::PointTransform;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

fn config(name: &str, overrides: &[&str]) -> ptdiff::runner::ValidatedRun {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs").join(name);
    let overrides: Vec<String> = overrides.iter().map(|s| s.to_string()).collect();
    load_config(&path, &overrides).unwrap().validate().unwrap()
}

fn transforms() -> Vec<(&'static str, PointTransform)> {
    vec![
        ("x", PointTransform::identity()),
        ("x+x^3", PointTransform::polynomial(&[1.0, 0.0, 1.0]).unwrap()),
        ("sgn(x)|x|^3", PointTransform::monomial(3.0).unwrap()),
    ]
}

fn within(v: f64, lo: f64, hi: f64) -> bool {
    v >= lo && v <= hi
}

fn mass_ok(mass: &ptdiff::runner::simulate::MassSummary) -> bool {
    mass.max_unexplained_drift < 1e-8 && mass.total_leakage.abs() < 1e-10
}

fn normal_baseline() -> Outcome {
    let out = simulate(&config("normal_baseline.json", &[])).unwrap();
    let fit = &out.summary.fits.as_ref().unwrap().x;
    let pass = (fit.fit.exponent - 1.0).abs() <= 0.01 && (fit.prefactor / 2.0 - 1.0).abs() <= 0.02 && mass_ok(&out.summary.mass);
    Outcome::new(
        pass,
        format!(
            "exponent {:.6}, prefactor {:.6} (2D = 2), drift {:.1e}, leakage {:.1e}",
            fit.fit.exponent, fit.prefactor, out.summary.mass.max_unexplained_drift, out.summary.mass.total_leakage
        ),
    )
}

fn cubic_run() -> ptdiff::runner::simulate::SimulationOutput {
    simulate(&config("cubic_w_coordinate.json", &[])).unwrap()
}

fn cubic_w_exponent(out: &ptdiff::runner::simulate::SimulationOutput) -> Outcome {
    let fit = &out.summary.fits.as_ref().unwrap().w;
    let [lo, hi] = out.summary.fit_window.unwrap();
    let decades = (hi / lo).log10();
    let pass = (fit.fit.exponent - 1.0).abs() <= 0.02 && decades >= 2.0 - 1e-9 && mass_ok(&out.summary.mass);
    Outcome::new(
        pass,
        format!(
            "msd_w exponent {:.6} over [{lo:e}, {hi:e}] ({decades:.1} decades), drift {:.1e}, leakage {:.1e}",
            fit.fit.exponent, out.summary.mass.max_unexplained_drift, out.summary.mass.total_leakage
        ),
    )
}

fn cubic_x_crossover(out: &ptdiff::runner::simulate::SimulationOutput) -> Outcome {
    let c = &out.summary.crossover.as_ref().unwrap().x;
    let pass = !c.no_knee
        && within(c.early.exponent, 0.9, 1.05)
        && within(c.late.exponent, 0.30, 0.37)
        && c.knee_time.is_finite();
    Outcome::new(
        pass,
        format!(
            "early {:.4}, late {:.4}, knee at t = {:.4}",
            c.early.exponent, c.late.exponent, c.knee_time
        ),
    )
}

fn monomial_sweep() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (beta, want) in [
        (0.5, Regime::SuperDiffusive),
        (2.0, Regime::SubDiffusive),
        (3.0, Regime::SubDiffusive),
    ] {
        let (req, window) = monomial_scaling_request(beta, 1.0).unwrap();
        let sol = solve(&req).unwrap();
        let series = MsdSeries::from_solution(&sol).unwrap();
        let fit = fit_scaling(&series, Coordinate::X, window).unwrap();
        let regime = classify_regime(fit.exponent).unwrap();
        let ok = (fit.exponent - 1.0 / beta).abs() <= 0.05 && regime == want;
        pass &= ok;
        parts.push(format!("β={beta}: {:.4} vs {:.4} {regime:?}", fit.exponent, 1.0 / beta));
    }
    Outcome::new(pass, parts.join("; "))
}

fn operator_properties() -> Outcome {
    let grid = Grid1D::symmetric(2.0, 256).unwrap();
    let mut band_sym = 0.0_f64;
    let mut adjoint = 0.0_f64;
    let mut top = f64::NEG_INFINITY;
    let mut count = 0;
    for (_, pt) in transforms() {
        for alpha in [0.0, 0.3, 0.5, 1.0] {
            for variant in [Variant::Delta1, Variant::Delta2, Variant::Delta3, Variant::Delta4] {
                let op = assemble(&OperatorSpec::new(variant, alpha, pt.clone(), 1.0).unwrap(), &grid).unwrap();
                match variant {
                    Variant::Delta1 | Variant::Delta2 => {
                        let b = &op.band;
                        let worst = b.sub.iter().zip(&b.sup).fold(0.0_f64, |m, (l, u)| m.max((l - u).abs()));
                        band_sym = band_sym.max(worst / b.max_abs());
                    }
                    Variant::Delta3 | Variant::Delta4 => adjoint = adjoint.max(adjoint_residual(&op)),
                }
                top = top.max(spectrum_check(&op).unwrap());
                count += 1;
            }
        }
    }
    let pass = band_sym <= 1e-14 && adjoint < 1e-12 && top <= 1e-10;
    Outcome::new(
        pass,
        format!("{count} operators: band asymmetry {band_sym:.1e}, weighted adjoint {adjoint:.1e}, max eigenvalue {top:.1e}"),
    )
}

fn transform_fixed_points() -> Outcome {
    // W-Fourier transform of exp(-W²/2) under dW for the cubic transform.
    let pt = PointTransform::polynomial(&[1.0, 0.0, 1.0]).unwrap();
    let s = Arc::new(Sampling::new(&pt, &Grid1D::symmetric(2.5, 4000).unwrap()).unwrap());
    let values = s.w.iter().map(|w| (-0.5 * w * w).exp()).collect();
    let rho = DensityField::new(s.clone(), Coordinate::W, Measure::Dw, 0.0, values).unwrap();
    let kg = Arc::new(KGrid::new(6.0, 121, KMode::UniformK, &pt).unwrap());
    let spec = wft_forward(&rho, &kg).unwrap();
    let wft = kg
        .big_k
        .iter()
        .zip(&spec.values)
        .map(|(k, v)| (v - Complex64::new((-0.5 * k * k).exp(), 0.0)).norm())
        .fold(0.0, f64::max);

    // β = 1 Bessel kernels against the plane wave.
    let mut collapse = 0.0_f64;
    for (branch, sign) in [(BesselBranch::Phi, -1.0), (BesselBranch::PhiTilde, 1.0)] {
        let k = BesselKernelSpec::new(1.0, branch).unwrap();
        for i in 0..=2000 {
            let eta = -50.0 + i as f64 * 0.05;
            let (sn, c) = (sign * eta).sin_cos();
            let want = Complex64::new(c, sn) / (2.0 * std::f64::consts::PI).sqrt();
            collapse = collapse.max((k.eval(eta) - want).norm());
        }
    }

    // β = 2: exp(-x⁴/2) maps to exp(-k⁴/2) under the Φ branch.
    let quartic = PointTransform::monomial(2.0).unwrap();
    let s = Arc::new(Sampling::new(&quartic, &Grid1D::symmetric(4.0, 4000).unwrap()).unwrap());
    let values = s.x.iter().map(|x| (-0.5 * x.powi(4)).exp()).collect();
    let rho = DensityField::new(s, Coordinate::X, Measure::Dx, 0.0, values).unwrap();
    let kg = Arc::new(KGrid::new(2.5, 101, KMode::UniformK, &PointTransform::identity()).unwrap());
    let kernel = BesselKernelSpec::new(2.0, BesselBranch::Phi).unwrap();
    let spec = bessel_transform(&rho, &kernel, &kg).unwrap();
    let stretched = kg
        .k
        .iter()
        .zip(&spec.values)
        .map(|(k, v)| (v - Complex64::new((-0.5 * k.powi(4)).exp(), 0.0)).norm())
        .fold(0.0, f64::max);

    let pass = wft < 1e-8 && collapse < 1e-10 && stretched < 1e-6;
    Outcome::new(
        pass,
        format!("W-FT Gaussian {wft:.1e}, β=1 collapse {collapse:.1e}, β=2 stretched Gaussian {stretched:.1e}"),
    )
}

fn eigenrelation_convergence() -> Outcome {
    let pt = PointTransform::polynomial(&[1.0, 0.0, 1.0]).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for alpha in [0.0, 0.3] {
        for big_k in [1.0, 2.0] {
            let residual = |n: usize| {
                let grid = Grid1D::symmetric(1.5, n).unwrap();
                let op = assemble(&OperatorSpec::new(Variant::Delta3, alpha, pt.clone(), 1.0).unwrap(), &grid).unwrap();
                let s = Sampling::new(&pt, &grid).unwrap();
                eigenrelation_residual(&op, &gft_kernel_samples(&s, GftKernel::Phi, alpha, big_k), big_k)
            };
            let r: Vec<f64> = [400, 800, 1600].iter().map(|&n| residual(n)).collect();
            let ratios = [r[0] / r[1], r[1] / r[2]];
            pass &= ratios.iter().all(|&q| within(q, 3.6, 4.4));
            parts.push(format!("α={alpha} K={big_k}: {:.3}, {:.3}", ratios[0], ratios[1]));
        }
    }
    Outcome::new(pass, format!("ratios per doubling {}", parts.join("; ")))
}

fn cross_method() -> Outcome {
    let out = simulate(&config("cubic_snapshots.json", &["times=[0.05,0.2,1.0]"])).unwrap();
    let checks = &out.summary.cross_check;
    let pass = checks.len() == 2 && checks.iter().all(|c| c.pass && c.worst < 1e-4);
    let parts: Vec<String> = checks
        .iter()
        .map(|c| format!("{} vs {}: {:.1e}", out.summary.method, c.method, c.worst))
        .collect();
    Outcome::new(pass, parts.join("; "))
}

fn ground_states() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, pt) in transforms() {
        let half = match name {
            "x" => 10.0,
            _ => 3.0,
        };
        let degenerate = pt.monomial_beta().is_some_and(|b| b != 1.0);
        for alpha in [0.0, 0.5] {
            for family in [Family::H1H3, Family::H2H4] {
                let residual = |n: usize| {
                    let grid = Grid1D::symmetric(half, n).unwrap();
                    let gs = build_ground_state(family, alpha, &pt, &grid).unwrap();
                    let h = grid.h();
                    if degenerate {
                        annihilation_residual_where(&gs, |x| x.abs() > 1.5 * h)
                    } else {
                        annihilation_residual(&gs)
                    }
                };
                let (a, b) = (residual(4000), residual(8000));
                let mut ok = within(a / b, 3.6, 4.4);
                if name == "x" {
                    ok &= b < 1e-6;
                }
                pass &= ok;
                parts.push(format!("{name} α={alpha} {family}: {b:.1e} (x{:.2})", a / b));
            }
        }
    }
    let cubic = PointTransform::polynomial(&[1.0, 0.0, 1.0]).unwrap();
    let grid = Grid1D::symmetric(3.0, 3000).unwrap();
    let partner = count_modes(&build_ground_state(Family::H2H4, 0.0, &cubic, &grid).unwrap());
    let primary = count_modes(&build_ground_state(Family::H1H3, 0.0, &cubic, &grid).unwrap());
    pass &= partner == 2 && primary == 1;
    parts.push(format!("x+x^3 modes: partner {partner}, primary {primary}"));
    Outcome::new(pass, parts.join("; "))
}

fn osp_map() -> Outcome {
    let mut pass = true;
    for (c, g) in [(1.0, 0.0), (2.0, 2.0), (1.5, 3.0), (0.5, -1.0)] {
        let (pt, p) = osp_to_pt(c, g, 1.0).unwrap();
        let beta = g / 2.0 - c + 2.0;
        pass &= p.beta == beta && pt.monomial_beta() == Some(beta) && p.scale == c * c * beta * beta;
    }
    let mut round_trip = true;
    for i in 1..=32 {
        for j in 1..=16 {
            let (beta, c) = (i as f64 / 8.0, j as f64 / 8.0);
            let g = pt_to_osp(beta, c);
            round_trip &= osp_to_pt(c, g, 1.0).unwrap().1.beta == beta;
        }
    }
    let rejected = matches!(osp_to_pt(3.0, 2.0, 1.0), Err(ScalingError::NonPositiveBeta(_)))
        && run_map_osp(3.0, 2.0, 1.0, false).map_err(|e| e.exit_code()).err() == Some(2);
    pass &= round_trip && rejected;
    Outcome::new(
        pass,
        format!("arithmetic exact, round trip {round_trip}, c=3 g=2 rejected {rejected}"),
    )
}

#[test]
fn acceptance_criteria() {
    let mut results: Vec<(u32, &str, f64, f64, Outcome)> = Vec::new();
    let mut run = |id: u32, name: &'static str, budget: f64, extra: f64, f: &dyn Fn() -> Outcome| {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64() + extra;
        results.push((id, name, secs, budget, outcome));
    };

    run(1, "normal-diffusion baseline", 10.0, 0.0, &normal_baseline);
    // Criteria 2 and 3 share one run; its time is charged to both.
    let start = Instant::now();
    let cubic = cubic_run();
    let cubic_secs = start.elapsed().as_secs_f64();
    run(2, "cubic transform, W-coordinate MSD", 30.0, cubic_secs, &|| cubic_w_exponent(&cubic));
    run(3, "cubic transform, x-coordinate crossover", 60.0, cubic_secs, &|| cubic_x_crossover(&cubic));
    run(4, "monomial scaling sweep", 180.0, 0.0, &monomial_sweep);
    run(5, "operator properties", 30.0, 0.0, &operator_properties);
    run(6, "transform fixed points", 60.0, 0.0, &transform_fixed_points);
    run(7, "eigenrelation convergence", 60.0, 0.0, &eigenrelation_convergence);
    run(8, "cross-method agreement", 60.0, 0.0, &cross_method);
    run(9, "ground states", 30.0, 0.0, &ground_states);
    run(10, "fractal-diffusion map", 1.0, 0.0, &osp_map);

    let mut failed = Vec::new();
    for (id, name, secs, budget, outcome) in &results {
        let ok = outcome.pass && secs < budget;
        println!(
            "[{}] criterion {id:>2} {name}: {} ({secs:.2} s, budget {budget} s)",
            if ok { "PASS" } else { "FAIL" },
            outcome.detail
        );
        if !ok {
            failed.push(*id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
