//! `hckit` — reproducible verification, tracing and quadrature runs over the
//! Heisenberg calculus catalog.
//!
//! Exit codes: 0 all checks pass, 1 a check failed (partial output is still
//! written), 2 usage or configuration error. Identical invocations with the
//! same seed produce byte-identical reports. `HCKIT_THREADS` caps the rayon
//! thread pool.

use clap::{Parser, Subcommand, ValueEnum};
use hckit_core::catalog::{self, Loaded, Params, VerifyOpts};
use hckit_core::curves::{trace, TraceMode};
use hckit_core::moduli::{admissibility_margin, energy, modulus_upper_bound};
use hckit_core::qc::SupSampler;
use hckit_core::report::{
    DistortionReport, ModulusReport, OperatorReport, RelationReport, SCHEMA_VERSION,
};
use hckit_core::{Error, HPoint};
use serde::Deserialize;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const DEFAULT_SEED: u64 = 0xC0FFEE;

#[derive(Parser)]
#[command(name = "hckit", version, about = "Heisenberg calculus toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Horizontal,
    Vertical,
}

#[derive(Subcommand)]
enum Command {
    /// Run every closed-form check of a catalog example (ex1, ex2, cyl,
    /// d_domain, ex3) and write a JSON report.
    Verify {
        example: String,
        /// JSON parameter file {"example": ..., "params": {...}}.
        #[arg(long)]
        params: Option<PathBuf>,
        /// Override the generic defect tolerance (sharper stated tolerances
        /// stay pinned).
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Per-axis size of the verification grids.
        #[arg(long, default_value_t = 32)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Trace a trajectory of a catalog differential and export it as CSV.
    Trace {
        /// Differential identifier: dz2, pi_dw2, pi_dw2_over_w2.
        qd: String,
        /// Start point as "x,y,t".
        #[arg(long, allow_hyphen_values = true)]
        start: String,
        #[arg(long, value_enum)]
        mode: Mode,
        /// +1 or -1: root of the direction field at the start.
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        orientation: f64,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        #[arg(long = "step-size", default_value_t = 1e-3)]
        step_size: f64,
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Admissibility margin, energy and modulus upper bound of a density on
    /// a curve family.
    Modulus {
        family: String,
        density: String,
        #[arg(long)]
        params: Option<PathBuf>,
        /// Curves per family parameter in the admissibility grid.
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Distortion report of a catalog map: sampled maximal distortion,
    /// contact defect and Beltrami bound.
    Distortion {
        map: String,
        #[arg(long)]
        params: Option<PathBuf>,
        /// Per-axis grid for the essential-sup scan.
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Optional density identifier for a mean-distortion integral.
        #[arg(long)]
        density: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Holomorphy-operator defects of a catalog differential at random
    /// domain points, plus optionally the operator-relation suite.
    Operators {
        qd: String,
        #[arg(long, default_value_t = 1000)]
        points: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Also report the d/D relation defects on a seeded random polynomial.
        #[arg(long)]
        relations: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Optional overrides from the parameter file, overlaid on the example's
/// defaults.
#[derive(Debug, Default, Deserialize)]
struct PartialParams {
    a: Option<f64>,
    b: Option<f64>,
    c: Option<f64>,
    a_p: Option<f64>,
    b_p: Option<f64>,
    c_p: Option<f64>,
    k: Option<f64>,
    #[serde(alias = "D")]
    d: Option<f64>,
}

#[derive(Debug, Deserialize)]
struct ParamsFile {
    example: Option<String>,
    #[serde(default)]
    params: PartialParams,
}

fn load_params(path: Option<&Path>, example: &str) -> anyhow::Result<Params> {
    let mut p = Params::default_for(example);
    if let Some(path) = path {
        let text = std::fs::read_to_string(path)?;
        let file: ParamsFile = serde_json::from_str(&text)?;
        if let Some(ex) = &file.example {
            anyhow::ensure!(
                ex == example,
                "parameter file is for example '{ex}', requested '{example}'"
            );
        }
        let o = file.params;
        if let Some(v) = o.a {
            p.a = v;
        }
        if let Some(v) = o.b {
            p.b = v;
        }
        if let Some(v) = o.c {
            p.c = v;
        }
        if let Some(v) = o.a_p {
            p.a_p = v;
        }
        if let Some(v) = o.b_p {
            p.b_p = v;
        }
        if let Some(v) = o.c_p {
            p.c_p = v;
        }
        if let Some(v) = o.k {
            p.k = v;
        }
        if let Some(v) = o.d {
            p.d = v;
        }
    }
    Ok(p)
}

fn emit(json: &str, out: Option<&Path>) -> anyhow::Result<()> {
    println!("{json}");
    if let Some(path) = out {
        let mut f = std::fs::File::create(path)?;
        writeln!(f, "{json}")?;
    }
    Ok(())
}

fn parse_start(s: &str) -> anyhow::Result<HPoint> {
    let parts: Vec<&str> = s.split(',').collect();
    anyhow::ensure!(parts.len() == 3, "start must be \"x,y,t\"");
    let x: f64 = parts[0].trim().parse()?;
    let y: f64 = parts[1].trim().parse()?;
    let t: f64 = parts[2].trim().parse()?;
    Ok(HPoint::from_parts(x, y, t))
}

fn write_csv(
    path: Option<&Path>,
    curve: &hckit_core::curves::LegendrianCurve,
) -> anyhow::Result<()> {
    let mut text = String::from("s,re_z,im_z,t,re_vz,im_vz,legendrian_defect\n");
    for smp in &curve.samples {
        let defect = (smp.vel_t + 2.0 * (smp.point.z.conj() * smp.vel_z).im).abs();
        text.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            smp.s, smp.point.z.re, smp.point.z.im, smp.point.t, smp.vel_z.re, smp.vel_z.im, defect
        ));
    }
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

/// 2 = configuration problem, 1 = genuine check failure.
fn classify_error(e: &Error) -> u8 {
    match e {
        Error::UnknownIdentifier(_)
        | Error::ParameterConstraintViolated(_)
        | Error::OriginNotRepresentable
        | Error::DomainError(_) => 2,
        _ => 1,
    }
}

fn run() -> anyhow::Result<u8> {
    if let Ok(threads) = std::env::var("HCKIT_THREADS") {
        let n: usize = threads.parse()?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .ok();
    }
    let cli = Cli::parse();
    match cli.command {
        Command::Verify { example, params, tol, seed, grid, out } => {
            let p = load_params(params.as_deref(), &example)?;
            let opts = VerifyOpts {
                grid,
                seed,
                defect_tol: tol.unwrap_or(1e-8),
            };
            match catalog::verify(&example, &p, &opts) {
                Ok(report) => {
                    emit(&serde_json::to_string_pretty(&report)?, out.as_deref())?;
                    Ok(if report.all_pass { 0 } else { 1 })
                }
                Err(e) => {
                    eprintln!("verify {example}: {e}");
                    Ok(classify_error(&e))
                }
            }
        }
        Command::Trace { qd, start, mode, orientation, steps, step_size, params, out } => {
            let p = load_params(params.as_deref(), &qd)?;
            let differential = match catalog::load(&qd, &p)? {
                Loaded::Differential(q) => q,
                _ => anyhow::bail!("'{qd}' is not a quadratic differential"),
            };
            let start = parse_start(&start)?;
            let mode = match mode {
                Mode::Horizontal => TraceMode::Horizontal,
                Mode::Vertical => TraceMode::Vertical,
            };
            match trace(&differential, start, mode, orientation, step_size, steps) {
                Ok(curve) => {
                    write_csv(out.as_deref(), &curve)?;
                    Ok(0)
                }
                Err(failure) => {
                    eprintln!("trace stopped early: {}", failure.error);
                    write_csv(out.as_deref(), &failure.partial)?;
                    Ok(1)
                }
            }
        }
        Command::Modulus { family, density, params, grid, out } => {
            let p = load_params(params.as_deref(), "ex2")?;
            let fam = match catalog::load(&family, &p)? {
                Loaded::Family(f) => f,
                _ => anyhow::bail!("'{family}' is not a curve family"),
            };
            let rho = match catalog::load(&density, &p)? {
                Loaded::Density(d) => d,
                _ => anyhow::bail!("'{density}' is not a density"),
            };
            let margin = admissibility_margin(&rho, &fam, grid);
            let e = energy(&rho, 8).map_err(|err| anyhow::anyhow!("{err}"))?;
            let (bound, code) = match modulus_upper_bound(&fam, &rho, grid, 8, 1e-9) {
                Ok(b) => (Some(b), 0),
                Err(Error::NotAdmissible { .. }) => (None, 1),
                Err(err) => return Err(anyhow::anyhow!("{err}")),
            };
            let report = ModulusReport {
                schema: SCHEMA_VERSION,
                family: fam.name.clone(),
                density: rho.name.clone(),
                margin,
                energy: e,
                modulus_upper_bound: bound,
                inequalities: vec![],
            };
            emit(&serde_json::to_string_pretty(&report)?, out.as_deref())?;
            Ok(code)
        }
        Command::Distortion { map, params, grid, seed, density, out } => {
            let p = load_params(params.as_deref(), &map)?;
            let named = match catalog::load(&map, &p)? {
                Loaded::Map(m) => *m,
                _ => anyhow::bail!("'{map}' is not a map"),
            };
            let sampler = SupSampler { grid_n: grid, random_n: 10_000, seed };
            let k_max = hckit_core::qc::max_distortion(&named.map, &sampler)
                .map_err(|e| anyhow::anyhow!("{e}"))?;
            let points = sampler.points(named.map.domain());
            let contact = named.map.max_contact_defect(&points);
            let mut beltrami_sup = 0.0f64;
            for &pt in &points {
                if let Ok(mu) = named.map.beltrami(pt) {
                    beltrami_sup = beltrami_sup.max(mu.norm());
                }
            }
            let mean = match density {
                Some(id) => {
                    let rho = match catalog::load(&id, &p)? {
                        Loaded::Density(d) => d,
                        _ => anyhow::bail!("'{id}' is not a density"),
                    };
                    Some(
                        hckit_core::qc::mean_distortion(&named.map, &rho, 8)
                            .map_err(|e| anyhow::anyhow!("{e}"))?,
                    )
                }
                None => None,
            };
            let report = DistortionReport {
                schema: SCHEMA_VERSION,
                map: named.id.clone(),
                k_max,
                mean_distortion: mean,
                contact_defect_max: contact,
                beltrami_sup,
            };
            emit(&serde_json::to_string_pretty(&report)?, out.as_deref())?;
            Ok(if beltrami_sup < 1.0 { 0 } else { 1 })
        }
        Command::Operators { qd, points, seed, relations, out } => {
            let p = load_params(params_path_none(), &qd)?;
            let differential = match catalog::load(&qd, &p)? {
                Loaded::Differential(q) => q,
                _ => anyhow::bail!("'{qd}' is not a quadratic differential"),
            };
            use hckit_core::quad_diff::{b2, d2prime, d2second, max_defect};
            let pts = hckit_core::sampling::seeded_sample(differential.domain(), points, seed);
            let d2p = max_defect(&d2prime(&differential), &pts);
            let d2s = max_defect(&d2second(&differential), &pts);
            let b2m = max_defect(&b2(&differential), &pts);
            let report = OperatorReport {
                schema: SCHEMA_VERSION,
                subject: differential.name.clone(),
                points,
                seed,
                d2prime_max: d2p,
                d2second_max: d2s,
                b2_max: b2m,
                b2_vanishes: b2m < 1e-10,
            };
            let mut json = serde_json::to_string_pretty(&report)?;
            if relations {
                let (field, sample) =
                    hckit_core::sampling::seeded_polynomial_and_points(seed.wrapping_add(1), 100);
                let rel = RelationReport {
                    schema: SCHEMA_VERSION,
                    field: field.name().to_string(),
                    points: sample.len(),
                    relations: hckit_core::rumin::identity_suite(&field, &sample),
                };
                json = format!(
                    "{{\n\"operators\": {json},\n\"relations\": {}\n}}",
                    serde_json::to_string_pretty(&rel)?
                );
            }
            emit(&json, out.as_deref())?;
            let pass = d2p < 1e-9 && d2s < 1e-9;
            Ok(if pass { 0 } else { 1 })
        }
    }
}

fn params_path_none() -> Option<&'static Path> {
    None
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("hckit: {e}");
            ExitCode::from(2)
        }
    }
}
