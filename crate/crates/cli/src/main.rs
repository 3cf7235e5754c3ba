//! `sdwt`: run transforms, verification suites and exports from a JSON config.
//!
//! Exit codes: 0 success, 1 failed check or runtime error, 2 usage or
//! configuration error. Errors are printed to stderr as one JSON object.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use serde_json::json;

use sdwt::config::RunConfig;
use sdwt::engine::sdwt_batch;
use sdwt::fock::{build_u_normal_ordered, build_u_quadrature};
use sdwt::io::{self, CoefficientHeader, SliceSpec};
use sdwt::kernel::{sample_kernel, LensFresnelKernel};
use sdwt::verify::{run_suite, Suite};
use sdwt::{symplectic_from_hyperbolic, Axis, SdwtError, TransformPoint, C64};

#[derive(Parser, Debug)]
#[command(name = "sdwt", version, about = "Symplectic-dilation wavelet transform driver")]
struct Cli {
    /// JSON run configuration; defaults apply to missing keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `out_dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; falls back to SDWT_THREADS, then to all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for randomized checks (overrides `seed`).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Dotted-path override such as `sampling.n_phi=8`; repeatable.
    #[arg(long = "set", global = true, value_name = "PATH=VALUE")]
    overrides: Vec<String>,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand, Debug)]
enum Verb {
    /// Transform a sampled signal over the configured parameter sampling.
    Transform {
        /// Signal file (overrides `input`).
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Run a verification suite and write a JSON report.
    Verify {
        /// transform, parseval, inversion, admissibility, fock, kernel or all.
        #[arg(long, default_value = "all", value_parser = parse_suite)]
        suite: Suite,
    },
    /// Extract |W| and arg W over a two-parameter slice of a coefficient file.
    Plotdata {
        #[arg(long)]
        coefficients: PathBuf,
        /// `x,y[,name=value...]`, e.g. `a,b,mu=0.3`.
        #[arg(long)]
        slice: String,
    },
    /// Export the lens–Fresnel kernel record and a sampled kernel matrix.
    Kernel,
    /// Export the generalized squeezing operator in both constructions.
    Fock {
        #[arg(long, default_value_t = 0.3)]
        mu: f64,
        #[arg(long, default_value_t = 0.0)]
        phi: f64,
        #[arg(long, default_value_t = 0.0)]
        theta: f64,
        #[arg(long, default_value_t = 1.5)]
        a: f64,
    },
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: SdwtError| e.to_string())
}

/// Bad invocation or configuration; exits with 2.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn load_config(cli: &Cli) -> anyhow::Result<RunConfig> {
    let base = match &cli.config {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Usage(format!("reading {}: {e}", p.display())))?;
            RunConfig::from_json(&text).map_err(|e| Usage(format!("{}: {e}", p.display())))?
        }
        None => RunConfig::default(),
    };
    let mut cfg = base.with_overrides(&cli.overrides).map_err(|e| Usage(e.to_string()))?;
    if let Some(out) = &cli.out {
        cfg.out_dir = out.to_string_lossy().into_owned();
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    cfg.validate()
        .map_err(|e| Usage(format!("invalid configuration: {e}")))?;
    Ok(cfg)
}

fn thread_count(cli: &Cli) -> anyhow::Result<Option<usize>> {
    if let Some(n) = cli.threads {
        return Ok(Some(n));
    }
    match std::env::var("SDWT_THREADS") {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Usage(format!("SDWT_THREADS={v:?} is not a thread count")).into()),
        Err(_) => Ok(None),
    }
}

fn write(dir: &Path, name: &str, text: &str) -> anyhow::Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

fn run(cli: &Cli) -> anyhow::Result<bool> {
    let cfg = load_config(cli)?;
    let out = PathBuf::from(&cfg.out_dir);
    match &cli.verb {
        Verb::Transform { input } => {
            let path = input
                .clone()
                .or_else(|| cfg.input.as_ref().map(PathBuf::from))
                .ok_or_else(|| Usage("transform needs --input or `input` in the config".into()))?;
            let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
            let g = io::read_field(&text)?;
            let w = cfg.wavelet.build()?;
            let sampling = cfg.sampling.resolve(&g.grid)?;
            let field = sdwt_batch(&g, w.as_ref(), &sampling, &cfg.quadrature)?;
            let header = CoefficientHeader {
                meta: field.meta.clone(),
                wavelet: w.name(),
                seed: cfg.seed,
            };
            let file = write(&out, "coefficients.csv", &io::write_coefficients(&field, &header))?;
            let max_abs = field.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
            let summary = json!({
                "points": field.len(),
                "max_abs": max_abs,
                "max_err_est": field.err_est.iter().cloned().fold(0.0, f64::max),
                "seed": cfg.seed,
                "coefficients": file,
            });
            write(&out, "summary.json", &serde_json::to_string_pretty(&summary)?)?;
            println!("{}", serde_json::to_string(&summary)?);
            Ok(true)
        }
        Verb::Verify { suite } => {
            let (report, timings) = run_suite(*suite, &cfg);
            write(&out, "report.json", &report.to_json())?;
            write(&out, "timings.json", &serde_json::to_string_pretty(&timings)?)?;
            for e in &report.entries {
                let value = e.computed.map_or("n/a".to_string(), |v| format!("{v:.3e}"));
                println!("{} {} = {value}", if e.pass { "PASS" } else { "FAIL" }, e.check);
            }
            println!(
                "{}: {}",
                report.suite,
                if report.pass {
                    "all checks passed"
                } else {
                    "some checks failed"
                }
            );
            Ok(report.pass)
        }
        Verb::Plotdata { coefficients, slice } => {
            let text =
                fs::read_to_string(coefficients).with_context(|| format!("reading {}", coefficients.display()))?;
            let (field, _) = io::read_coefficients(&text)?;
            let csv = io::plot_slice(&field, &SliceSpec::parse(slice)?)?;
            let file = write(&out, "plot.csv", &csv)?;
            println!("{}", json!({ "rows": csv.lines().count() - 1, "file": file }));
            Ok(true)
        }
        Verb::Kernel => {
            let k = &cfg.kernel;
            let sym = symplectic_from_hyperbolic(k.mu, k.phi, k.theta)?;
            let kernel = LensFresnelKernel::from_sr(sym.s(), sym.r(), k.a)?;
            let axis = Axis::symmetric(0.0, k.eta_radius, k.eta_count)?;
            let values = sample_kernel(&kernel, &axis)?;
            write(&out, "kernel.json", &serde_json::to_string_pretty(&kernel)?)?;
            let file = write(&out, "kernel.csv", &io::write_kernel(&kernel, &axis, &values))?;
            println!("{}", json!({ "kernel": kernel, "file": file }));
            Ok(true)
        }
        Verb::Fock { mu, phi, theta, a } => {
            let space = cfg.fock.operator_space()?;
            let tp = TransformPoint::from_hyperbolic(*mu, *phi, *theta, C64::new(0.0, 0.0), *a, 0.0)?;
            let quad = build_u_quadrature(&tp, space, &cfg.fock.quadrature())?;
            let normal = build_u_normal_ordered(tp.sym.s(), tp.sym.r(), *a, space)?;
            write(&out, "u_quadrature.csv", &io::write_operator(&quad))?;
            write(&out, "u_normal_ordered.csv", &io::write_operator(&normal))?;
            let summary = json!({
                "cutoff": space.cutoff(),
                "nodes": cfg.fock.nodes,
                "block_deviation_n_le_3": quad.block_deviation(&normal, 3),
            });
            write(&out, "fock_summary.json", &serde_json::to_string_pretty(&summary)?)?;
            println!("{}", serde_json::to_string(&summary)?);
            Ok(true)
        }
    }
}

fn report_error(err: &anyhow::Error) -> u8 {
    let (kind, code) = if err.downcast_ref::<Usage>().is_some() {
        ("Usage", 2)
    } else if let Some(e) = err.downcast_ref::<SdwtError>() {
        (e.kind(), 1)
    } else {
        ("Io", 1)
    };
    eprintln!("{}", json!({ "error": kind, "message": format!("{err:#}") }));
    code
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = match thread_count(&cli) {
        Ok(t) => t,
        Err(e) => return ExitCode::from(report_error(&e)),
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => return ExitCode::from(report_error(&Usage(e.to_string()).into())),
    };
    match pool.install(|| run(&cli)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => ExitCode::from(report_error(&e)),
    }
}
