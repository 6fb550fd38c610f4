//! Command-line front end: Monte Carlo sweeps against the semicircular law,
//! rate fitting from saved CSVs, structural/inequality verification suites,
//! and Bai-bound certification.
//!
//! Exit codes: 0 all acceptance verdicts pass, 1 numerical failure,
//! 2 config error.

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use qsd::ensemble::{sample_matrix, scaled_matrix, EntryLawSpec, QSelfDualMatrix};
use qsd::experiments::{
    emit_report, fit_rate, parse_config, read_rows_csv, run_sweep, summary_json,
    DistanceField, ExperimentError,
};
use qsd::quaternion::{qmul, quat_to_block, Quaternion};
use qsd::resolvent::{
    epsilon_all, is_type2, minor_resolvent, resolvent, sample_type2, type1_residual,
    verify_inverse_type1,
};
use qsd::rng::mix;
use qsd::spectra::{
    esd, even_multiplicity_check, expand_hermitian, hermitian_eigenvalues, levy_distance,
    sup_distance, Cdf,
};
use qsd::stieltjes::{
    bai_bound, empirical_stieltjes, sample_empirical_transform, semicircle_stieltjes,
    BaiBoundParams, ComplexPoint, SemicircleLaw,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "qsd", about = "Quaternion self-dual random matrix experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a config-driven Monte Carlo sweep and write reports.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Fit a log-log rate to a previously written sweep CSV.
    Rate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the structural / inequality verification suites.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long, default_value_t = 20260811)]
        seed: u64,
    },
    /// Certify the Kolmogorov-distance bound row by row.
    Bound {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Suite {
    Structural,
    Inequalities,
    All,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Sweep { config } => cmd_sweep(&config),
        Command::Rate { input, out } => cmd_rate(&input, &out),
        Command::Verify { suite, seed } => cmd_verify(suite, seed),
        Command::Bound { config } => cmd_bound(&config),
    }
}

fn config_exit(err: &ExperimentError) -> ExitCode {
    eprintln!("error: {err}");
    match err {
        ExperimentError::Config(_) | ExperimentError::Io { .. } => ExitCode::from(2),
        _ => ExitCode::from(1),
    }
}

fn cmd_sweep(path: &PathBuf) -> ExitCode {
    let config = match parse_config(path) {
        Ok(c) => c,
        Err(e) => return config_exit(&e),
    };
    let output = match run_sweep(&config) {
        Ok(o) => o,
        Err(e) => return config_exit(&e),
    };
    if let Err(e) = emit_report(&output, &config) {
        return config_exit(&e);
    }
    let summary = summary_json(&output, &config);
    for stats in &summary.per_n {
        println!(
            "n = {:5}: mean kolmogorov = {:.6} (se {:.2e}, {} rows, {} failures)",
            stats.n, stats.mean_kolmogorov, stats.se_kolmogorov, stats.rows, stats.failures
        );
    }
    for row in &summary.expected_esd {
        println!(
            "n = {:5}: expected-ESD kolmogorov = {:.6} ({} reps pooled)",
            row.n, row.kolmogorov, row.reps_used
        );
    }
    if let Some(fit) = &summary.kolmogorov_fit {
        println!(
            "kolmogorov fit: slope = {:.4}, intercept = {:.4}, residual se = {:.2e}",
            fit.slope, fit.intercept, fit.residual_se
        );
    }
    let v = &summary.verdicts;
    println!(
        "verdicts: monotone={} slope={} C(n)={} expected-esd={} bound={} failures={}",
        v.monotone_decreasing,
        v.slope_within_bound,
        v.cn_bounded,
        v.expected_esd_bounded,
        v.bai_dominates,
        v.no_row_failures
    );
    if v.all_pass {
        println!("all acceptance verdicts pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance verdicts FAILED");
        ExitCode::from(1)
    }
}

fn cmd_rate(input: &PathBuf, out: &PathBuf) -> ExitCode {
    let rows = match read_rows_csv(input) {
        Ok(r) => r,
        Err(e) => return config_exit(&e),
    };
    let kolmogorov = match fit_rate(&rows, DistanceField::Kolmogorov) {
        Ok(f) => f,
        Err(e) => return config_exit(&e),
    };
    let levy = fit_rate(&rows, DistanceField::Levy).ok();
    println!(
        "kolmogorov: slope = {:.4}, intercept = {:.4}, C_max = {:.4}",
        kolmogorov.slope, kolmogorov.intercept, kolmogorov.c_max
    );
    let json = serde_json::json!({
        "kolmogorov_fit": kolmogorov,
        "levy_fit": levy,
    });
    match std::fs::write(out, serde_json::to_string_pretty(&json).unwrap()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error writing {}: {e}", out.display());
            ExitCode::from(2)
        }
    }
}

fn cmd_bound(path: &PathBuf) -> ExitCode {
    let config = match parse_config(path) {
        Ok(c) => c,
        Err(e) => return config_exit(&e),
    };
    if config.bai.is_none() {
        eprintln!("error: bound certification requires bai_a, bai_A, bai_B in the config");
        return ExitCode::from(2);
    }
    let output = match run_sweep(&config) {
        Ok(o) => o,
        Err(e) => return config_exit(&e),
    };
    if let Err(e) = emit_report(&output, &config) {
        return config_exit(&e);
    }
    let mut all_hold = true;
    for row in &output.rows {
        match (row.kolmogorov, row.bai_bound, &row.error) {
            (Some(k), Some(b), None) => {
                let ok = b >= k;
                all_hold &= ok;
                println!(
                    "n = {:5} rep {:3}: kolmogorov = {:.6}, bound = {:.6}  [{}]",
                    row.n,
                    row.rep,
                    k,
                    b,
                    if ok { "ok" } else { "VIOLATED" }
                );
            }
            _ => {
                all_hold = false;
                println!(
                    "n = {:5} rep {:3}: FAILED ({})",
                    row.n,
                    row.rep,
                    row.error.as_deref().unwrap_or("missing bound")
                );
            }
        }
    }
    if all_hold {
        println!("bound certified: RHS >= Kolmogorov distance on every row");
        ExitCode::SUCCESS
    } else {
        println!("bound certification FAILED");
        ExitCode::from(1)
    }
}

struct Check {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check {
        name,
        passed,
        detail,
    }
}

fn gse_scaled(n: usize, seed: u64) -> (QSelfDualMatrix, QSelfDualMatrix) {
    let spec = EntryLawSpec::gse(1.0).unwrap();
    let y = sample_matrix(&spec, n, seed).unwrap();
    let s = scaled_matrix(&y).unwrap();
    (y, s)
}

fn structural_checks(seed: u64) -> Vec<Check> {
    let mut out = Vec::new();

    // quaternion block homomorphism on random unit pairs
    let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, 1, 0, 0));
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let rand_quat = |rng: &mut ChaCha8Rng| {
            let q = Quaternion::new(
                rng.gen::<f64>() - 0.5,
                rng.gen::<f64>() - 0.5,
                rng.gen::<f64>() - 0.5,
                rng.gen::<f64>() - 0.5,
            );
            q.scale(1.0 / q.norm().max(1e-9))
        };
        let p = rand_quat(&mut rng);
        let q = rand_quat(&mut rng);
        let lhs = quat_to_block(qmul(p, q));
        let rhs = quat_to_block(p).matmul(&quat_to_block(q));
        worst = worst.max(lhs.max_abs_diff(&rhs));
    }
    out.push(check(
        "block homomorphism (10^4 unit pairs)",
        worst <= 1e-14,
        format!("max residual {worst:.2e}"),
    ));

    // exact Hermitian expansion
    let (_, s) = gse_scaled(32, mix(seed, 2, 0, 0));
    let h = expand_hermitian(&s);
    out.push(check(
        "expansion Hermitian symmetry",
        h.hermitian_residual() == 0.0,
        format!("residual {:.2e}", h.hermitian_residual()),
    ));

    // even multiplicity pairing
    let spectrum = hermitian_eigenvalues(&h, 1e-14).unwrap();
    let pairing = even_multiplicity_check(&spectrum, 1e-8);
    out.push(check(
        "even-multiplicity pairing (n=32)",
        pairing.is_ok(),
        match &pairing {
            Ok(r) => format!("max relative gap {:.2e}", r.max_rel_gap),
            Err(e) => e.to_string(),
        },
    ));

    // resolvents are Type-I
    let mut worst = 0.0_f64;
    for i in 0..20u64 {
        let (_, s) = gse_scaled(20, mix(seed, 3, i, 0));
        let h = expand_hermitian(&s);
        let z = ComplexPoint::new(0.7, 0.5);
        let d = resolvent(&h, z).unwrap();
        worst = worst.max(type1_residual(&d.mat).unwrap());
        if !is_type2(&h.shifted(Complex64::new(0.3, 0.0)), 1e-12).unwrap() {
            worst = f64::INFINITY;
        }
    }
    out.push(check(
        "resolvents Type-I / shifted expansions Type-II",
        worst <= 1e-10,
        format!("max Type-I residual {worst:.2e}"),
    ));

    // random Type-II inverses
    let mut worst = 0.0_f64;
    for i in 0..20u64 {
        let m = sample_type2(20, mix(seed, 4, i, 0));
        match verify_inverse_type1(&m, 1e-10) {
            Ok(r) if r.passed => worst = worst.max(r.type1_residual),
            _ => worst = f64::INFINITY,
        }
    }
    out.push(check(
        "inverse of random Type-II is Type-I (20 seeds, 2n=40)",
        worst <= 1e-10,
        format!("max residual {worst:.2e}"),
    ));

    // epsilon_k scalar structure and the xi identity
    let spec = EntryLawSpec::gse(1.0).unwrap();
    let y = sample_matrix(&spec, 32, mix(seed, 5, 0, 0)).unwrap();
    let z = ComplexPoint::new(0.5, 0.3);
    let (eps, esn, _) = epsilon_all(&y, z, None).unwrap();
    let max_dev = eps
        .iter()
        .map(|e| e.scalar_deviation)
        .fold(0.0_f64, f64::max);
    out.push(check(
        "epsilon_k scalar structure (n=32, all k)",
        max_dev <= 1e-10,
        format!("max scalar deviation {max_dev:.2e}"),
    ));
    let t = (z.as_complex() + esn).inv();
    let mut worst = 0.0_f64;
    for e in &eps {
        let xi = e.xi(z, esn);
        let recon = [
            t + t * (xi[0] * e.value[0] + xi[1] * e.value[2]),
            t * (xi[0] * e.value[1] + xi[1] * e.value[3]),
            t * (xi[2] * e.value[0] + xi[3] * e.value[2]),
            t + t * (xi[2] * e.value[1] + xi[3] * e.value[3]),
        ];
        for (a, b) in xi.iter().zip(recon.iter()) {
            worst = worst.max((a - b).norm());
        }
    }
    out.push(check(
        "xi resolvent identity",
        worst <= 1e-10,
        format!("max residual {worst:.2e}"),
    ));

    out
}

fn inequality_checks(seed: u64) -> Vec<Check> {
    let mut out = Vec::new();
    let law = SemicircleLaw::new(1.0);

    // trace interlacing
    let (_, s) = gse_scaled(24, mix(seed, 10, 0, 0));
    let h = expand_hermitian(&s);
    let mut ok = true;
    let mut max_ratio = 0.0_f64;
    for &v in &[0.1, 0.3, 1.0] {
        let z = ComplexPoint::new(0.2, v);
        let d = resolvent(&h, z).unwrap();
        for k in 0..24 {
            let ctx = minor_resolvent(&h, k, z).unwrap();
            let gap = (d.trace() - ctx.tr_d_k()).norm();
            max_ratio = max_ratio.max(gap * v / 2.0);
            ok &= gap <= 2.0 / v + 1e-10;
        }
    }
    out.push(check(
        "trace interlacing |tr D - tr D_k| <= 2/v",
        ok,
        format!("max gap/(2/v) = {max_ratio:.3}"),
    ));

    // rank and Levy perturbation bounds
    let mut ok = true;
    let mut detail = String::new();
    for &n in &[8usize, 32] {
        for rep in 0..10u64 {
            let (y, s) = gse_scaled(n, mix(seed, 11, n as u64, rep));
            let mut y2 = y.clone();
            let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, 12, n as u64, rep));
            let q = Quaternion::new(rng.gen(), rng.gen(), rng.gen(), rng.gen());
            y2.set_upper(0, 1, q);
            let s2 = scaled_matrix(&y2).unwrap();
            let f1 = esd(&hermitian_eigenvalues(&expand_hermitian(&s), 1e-14).unwrap());
            let f2 = esd(&hermitian_eigenvalues(&expand_hermitian(&s2), 1e-14).unwrap());
            let ks = sup_distance(Cdf::Step(&f1), Cdf::Step(&f2));
            if ks > 4.0 / (2.0 * n as f64) + 1e-12 {
                ok = false;
                detail = format!("rank bound violated at n={n}: {ks}");
            }
            let h1 = expand_hermitian(&s);
            let h2 = expand_hermitian(&s2);
            let diff = h1.as_matrix().sub(h2.as_matrix());
            let levy = levy_distance(&f1, Cdf::Step(&f2));
            let bound = diff.frobenius_sq() / (2.0 * n as f64);
            if levy.powi(3) > bound + 1e-12 {
                ok = false;
                detail = format!("Levy bound violated at n={n}: {} > {bound}", levy.powi(3));
            }
        }
    }
    out.push(check(
        "one-entry perturbation: rank and Levy bounds",
        ok,
        if detail.is_empty() {
            "all instances within bounds".to_string()
        } else {
            detail
        },
    ));

    // transform magnitude bounds
    let (_, s) = gse_scaled(48, mix(seed, 13, 0, 0));
    let spectrum = hermitian_eigenvalues(&expand_hermitian(&s), 1e-14).unwrap();
    let mut ok = true;
    let mut max_contract = 0.0_f64;
    for &v in &[0.05, 0.1, 0.3, 1.0] {
        for i in 0..40 {
            let u = -5.0 + 10.0 * i as f64 / 39.0;
            let z = ComplexPoint::new(u, v);
            let sn = empirical_stieltjes(&spectrum, z);
            ok &= sn.norm() <= std::f64::consts::PI / v + 1e-12;
            let sc = semicircle_stieltjes(z);
            max_contract = max_contract.max(sc.norm());
            ok &= sc.norm() < 1.0;
            ok &= (sc * sc + z.as_complex() * sc + Complex64::new(1.0, 0.0)).norm() <= 1e-12;
        }
    }
    out.push(check(
        "transform bounds: |s_n| <= pi/v, |s| < 1, quadratic residual",
        ok,
        format!("max |s| = {max_contract:.6}"),
    ));

    // Bai bound dominates the measured distance
    let mut ok = true;
    let mut min_slack = f64::INFINITY;
    for rep in 0..5u64 {
        let (_, s) = gse_scaled(64, mix(seed, 14, rep, 0));
        let spectrum = hermitian_eigenvalues(&expand_hermitian(&s), 1e-14).unwrap();
        let v = (64.0_f64).powf(-0.5);
        let params = BaiBoundParams::defaults(v).unwrap();
        let grid = sample_empirical_transform(&spectrum, v, params.big_a, v / 10.0);
        let f = esd(&spectrum);
        let bound = bai_bound(&grid, &law, &f, &params).unwrap();
        let ks = sup_distance(Cdf::Step(&f), Cdf::Semicircle(&law));
        ok &= bound.value >= ks;
        min_slack = min_slack.min(bound.value - ks);
        // Levy never exceeds Kolmogorov
        let l = levy_distance(&f, Cdf::Semicircle(&law));
        ok &= l <= ks + 1e-9;
    }
    out.push(check(
        "bound certification at n=64 (5 reps)",
        ok,
        format!("min slack {min_slack:.4}"),
    ));

    out
}

fn cmd_verify(suite: Suite, seed: u64) -> ExitCode {
    let mut checks = Vec::new();
    if suite != Suite::Inequalities {
        checks.extend(structural_checks(seed));
    }
    if suite != Suite::Structural {
        checks.extend(inequality_checks(seed));
    }
    let mut failures = 0;
    for c in &checks {
        println!(
            "{} {:55} {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
        if !c.passed {
            failures += 1;
        }
    }
    if failures == 0 {
        println!("{} checks passed", checks.len());
        ExitCode::SUCCESS
    } else {
        println!("{failures} of {} checks FAILED", checks.len());
        ExitCode::from(1)
    }
}
