//! Command line driver.
//!
//! Subcommands:
//!   coeffs    dump multiplier functions and divergence coefficients as CSV
//!   certify   run the full certificate suite, emit a JSON report
//!   divcheck  finite-difference check of the divergence identity
//!   evolve    evolve a Gaussian pulse and record energy diagnostics
//!
//! Exit codes: 0 success / all certificates pass; 1 certificate violation
//! or instability; 2 usage or configuration error. Data files carry a
//! `# config_hash=…` header; timestamps never enter data files.

mod config;
mod output;

use clap::{Args, Parser, Subcommand};
use config::{config_hash, parse_config, Mode, RunConfig};
use exkerr_core::certifier::{certify_all, divergence_refinement, CheckBox, CurrentMode};
use exkerr_core::diagnostics::evolve;
use exkerr_core::fields::ManufacturedField;
use exkerr_core::solver::{Boundary, EvolveSpec};
use exkerr_core::{Error, MultiplierSet, Params};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "exkerr",
    about = "Axisymmetric waves on extremal Kerr: multiplier currents, certificates, evolution"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// JSON configuration file; defaults are used when omitted
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for data files
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Dotted-path overrides, e.g. --set multiplier.r_e=1.05
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Dump coefficient samples as CSV
    Coeffs(CommonArgs),
    /// Run every inequality certificate and the divergence checks
    Certify(CommonArgs),
    /// Richardson-refined divergence identity check
    Divcheck(CommonArgs),
    /// Evolve axisymmetric initial data and record diagnostics
    Evolve(CommonArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mode, args) = match &cli.command {
        Command::Coeffs(a) => (Mode::Coeffs, a),
        Command::Certify(a) => (Mode::Certify, a),
        Command::Divcheck(a) => (Mode::Divcheck, a),
        Command::Evolve(a) => (Mode::Evolve, a),
    };
    match run(mode, args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn run(mode: Mode, args: &CommonArgs) -> Result<ExitCode, Error> {
    let text = match &args.config {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?,
        None => "{}".to_string(),
    };
    let cfg = parse_config(&text, &args.set)?;
    let hash = config_hash(&cfg);
    std::fs::create_dir_all(&args.out)
        .map_err(|e| Error::Config(format!("cannot create {}: {e}", args.out.display())))?;

    match mode {
        Mode::Coeffs => cmd_coeffs(&cfg, &hash, args),
        Mode::Certify => cmd_certify(&cfg, &hash, args),
        Mode::Divcheck => cmd_divcheck(&cfg, &hash, args),
        Mode::Evolve => cmd_evolve(&cfg, &hash, args),
    }
}

fn build_set(cfg: &RunConfig) -> Result<MultiplierSet, Error> {
    let params = Params::new(cfg.mass)?;
    MultiplierSet::build(params, cfg.multiplier.r_e, cfg.multiplier.eta)
}

fn cmd_coeffs(cfg: &RunConfig, hash: &str, args: &CommonArgs) -> Result<ExitCode, Error> {
    let ms = build_set(cfg)?;
    let path = args.out.join("coeffs.csv");
    let n = cfg.coeffs.n.max(2);
    let rows = output::write_coeffs_csv(&path, &ms, hash, n, cfg.coeffs.r_max)?;
    println!(
        "{}",
        serde_json::json!({
            "mode": "coeffs",
            "config_hash": hash,
            "rows": rows,
            "c1": ms.c1,
            "delta_display": ms.delta_display,
            "delta_t": ms.delta_t,
            "file": path.display().to_string(),
        })
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_certify(cfg: &RunConfig, hash: &str, args: &CommonArgs) -> Result<ExitCode, Error> {
    let ms = build_set(cfg)?;
    let report = certify_all(&ms, cfg.certify.grid_n)?;
    let path = args.out.join("certify.json");
    let mut doc = serde_json::to_value(&report).expect("report serializes");
    doc["config_hash"] = serde_json::Value::String(hash.to_string());
    std::fs::write(&path, serde_json::to_string_pretty(&doc).unwrap())
        .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
    for c in &report.certificates {
        println!(
            "{} {:<22} min_margin {:+.3e} at r = {:.6}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.min_margin,
            c.argmin_r
        );
    }
    for d in &report.divergence {
        println!(
            "{} divergence[{}/{}] slopes {:?} finest {:.3e}",
            if d.order_ok && d.finest_ok { "PASS" } else { "FAIL" },
            d.field,
            d.mode,
            d.slopes
                .iter()
                .map(|s| (s * 100.0).round() / 100.0)
                .collect::<Vec<_>>(),
            d.residuals.last().unwrap()
        );
    }
    println!(
        "{}",
        serde_json::json!({
            "mode": "certify",
            "config_hash": hash,
            "all_passed": report.all_passed,
            "kappa0": report.kappa0,
            "delta_display": report.delta_display,
            "delta_t": report.delta_t,
            "file": path.display().to_string(),
        })
    );
    Ok(if report.all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_divcheck(cfg: &RunConfig, hash: &str, args: &CommonArgs) -> Result<ExitCode, Error> {
    let ms = build_set(cfg)?;
    let bx = CheckBox::standard(cfg.mass);
    let mut checks = Vec::new();
    let mut ok = true;
    for field in ManufacturedField::CATALOG {
        let (res, slopes) = divergence_refinement(
            &ms,
            field,
            CurrentMode::Full,
            &bx,
            cfg.divcheck.h0,
            cfg.divcheck.levels,
        );
        let order_ok = slopes.iter().all(|s| (s - 4.0).abs() <= 0.2);
        let finest_ok = *res.last().unwrap() < 1e-6;
        ok &= order_ok && finest_ok;
        println!(
            "{} {:<28} slopes {:?} residuals {:?}",
            if order_ok && finest_ok { "PASS" } else { "FAIL" },
            field.name(),
            slopes
                .iter()
                .map(|s| (s * 1000.0).round() / 1000.0)
                .collect::<Vec<_>>(),
            res
        );
        checks.push(serde_json::json!({
            "field": field.name(),
            "residuals": res,
            "slopes": slopes,
            "order_ok": order_ok,
            "finest_ok": finest_ok,
        }));
    }
    let path = args.out.join("divcheck.json");
    let doc = serde_json::json!({"config_hash": hash, "checks": checks, "all_passed": ok});
    std::fs::write(&path, serde_json::to_string_pretty(&doc).unwrap())
        .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
    println!(
        "{}",
        serde_json::json!({"mode": "divcheck", "config_hash": hash, "all_passed": ok})
    );
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_evolve(cfg: &RunConfig, hash: &str, args: &CommonArgs) -> Result<ExitCode, Error> {
    let params = Params::new(cfg.mass)?;
    let spec = EvolveSpec {
        params,
        rstar_min: cfg.grid.rstar_min,
        rstar_max: cfg.grid.rstar_max,
        nr: cfg.grid.nr,
        ntheta: cfg.grid.ntheta,
        cfl: cfg.cfl,
        t_end: cfg.t_end,
        output_every: cfg.output_every,
        amplitude: cfg.data.amplitude,
        r0star: cfg.data.r0star,
        sigma: cfg.data.sigma,
        ell: cfg.data.ell,
        boundary: Boundary::Absorbing,
        r_e: cfg.multiplier.r_e,
    };
    let out = evolve(&spec)?;
    let series_path = args.out.join("series.csv");
    output::write_series_csv(&series_path, &out.series, hash)?;
    let summary_path = args.out.join("summary.json");
    let doc = serde_json::json!({
        "config_hash": hash,
        "E0": out.summary.e0,
        "C_est": out.summary.c_est,
        "corollary_const": out.summary.corollary_const,
        "ebc": out.summary.ebc,
        "neartrap_per_e0": out.summary.neartrap_per_e0,
        "e_z": out.summary.e_z,
        "steps": out.summary.steps,
        "dt": out.summary.dt,
    });
    std::fs::write(&summary_path, serde_json::to_string_pretty(&doc).unwrap())
        .map_err(|e| Error::Config(format!("cannot write {}: {e}", summary_path.display())))?;
    println!("{doc}");
    Ok(ExitCode::SUCCESS)
}
