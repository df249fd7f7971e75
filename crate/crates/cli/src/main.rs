//! Command-line surface: classify polynomial vector fields, validate and
//! enumerate combinatorial data sets, realize invariants, and render SVG
//! figures.
//!
//! Exit codes: 0 success, 1 usage or malformed input, 2 inconclusive
//! classification, 3 invalid data set, 4 realization failure.

mod complexarg;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use polyvf_core::comb::{enumerate_data_sets, CombinatorialDataSet};
use polyvf_core::invariants::{assemble, AnalyticInvariant, ChecksLevel, InvariantError};
use polyvf_core::json;
use polyvf_core::poly::Polynomial;
use polyvf_core::realizer::{realize, RealizationProblem, RealizeError, SolverOptions};
use polyvf_core::svg::{disk_model, phase_portrait, RenderMode, RenderSpec};
use polyvf_core::tracer::{Fate, TraceConfig};
use std::io::Write;
use std::process::ExitCode;

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_INVALID_DATA_SET: u8 = 3;
const EXIT_REALIZATION: u8 = 4;

#[derive(Parser)]
#[command(
    name = "polyvf",
    about = "Classification of complex polynomial vector fields ż = P(z)",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a monic centered polynomial: combinatorial data set,
    /// analytic invariant, residues, zones, and cross-checks.
    Classify {
        /// Comma-separated complex coefficients in ascending powers,
        /// e.g. "-1,0,1" or "0.5+0.3i,0,1".
        #[arg(long, allow_hyphen_values = true)]
        coeffs: String,
        /// Output path for the classification JSON (default stdout).
        #[arg(long)]
        out: Option<String>,
        /// Write a phase-portrait SVG here.
        #[arg(long)]
        svg: Option<String>,
        /// Write sampled traces as JSON lines [label, t, re, im].
        #[arg(long)]
        dump_traces: Option<String>,
        /// Integrator relative tolerance override.
        #[arg(long)]
        tol: Option<f64>,
        /// Start radius override.
        #[arg(long)]
        start_radius: Option<f64>,
        /// Escape radius override.
        #[arg(long)]
        escape_radius: Option<f64>,
    },
    /// Validate a combinatorial data set JSON file.
    Validate {
        /// Path to {"d", "classes", "H"} JSON (or "-" for stdin).
        #[arg(long, value_name = "PATH")]
        r#in: String,
    },
    /// Enumerate all valid data sets of a degree, one JSON per line.
    Enumerate {
        #[arg(long)]
        d: usize,
        /// Restrict to structurally stable data sets.
        #[arg(long)]
        stable: bool,
        #[arg(long)]
        out: Option<String>,
    },
    /// Realize a (data set, analytic invariant) target as a polynomial.
    Realize {
        /// Path to {"data_set", "alphas", "taus"} JSON (or "-").
        #[arg(long, value_name = "PATH")]
        r#in: String,
        #[arg(long)]
        out: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Maximum Newton iterations per restart.
        #[arg(long)]
        max_iter: Option<usize>,
    },
    /// Render a data set (disk model) or polynomial (phase portrait).
    Render {
        /// Path to a data-set or polynomial JSON (or "-").
        #[arg(long, value_name = "PATH")]
        r#in: String,
        #[arg(long, value_enum, default_value = "disk-model")]
        mode: Mode,
        #[arg(long, default_value_t = 640)]
        size: u32,
        /// Draw essential transversals (disk model).
        #[arg(long, default_value_t = true)]
        transversals: bool,
        /// Annotate the ends e_ℓ.
        #[arg(long)]
        ends: bool,
        /// Draw labels.
        #[arg(long, default_value_t = true)]
        labels: bool,
        /// Annotate residues (phase portrait).
        #[arg(long)]
        residues: bool,
        #[arg(long)]
        out: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    DiskModel,
    PhasePortrait,
}

fn main() -> ExitCode {
    init_thread_pool();
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(Failure { code, message }) => {
            eprintln!("error: {message}");
            code
        }
    };
    ExitCode::from(code)
}

/// Caps the worker count from POLYVF_THREADS.
fn init_thread_pool() {
    #[cfg(feature = "parallel")]
    if let Ok(v) = std::env::var("POLYVF_THREADS") {
        if let Ok(threads) = v.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(threads.max(1))
                .build_global();
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Classify {
            coeffs,
            out,
            svg,
            dump_traces,
            tol,
            start_radius,
            escape_radius,
        } => cmd_classify(&coeffs, out, svg, dump_traces, tol, start_radius, escape_radius),
        Command::Validate { r#in } => cmd_validate(&r#in),
        Command::Enumerate { d, stable, out } => cmd_enumerate(d, stable, out),
        Command::Realize {
            r#in,
            out,
            seed,
            max_iter,
        } => cmd_realize(&r#in, out, seed, max_iter),
        Command::Render {
            r#in,
            mode,
            size,
            transversals,
            ends,
            labels,
            residues,
            out,
        } => cmd_render(&r#in, mode, size, transversals, ends, labels, residues, out),
    }
}

fn read_input(path: &str) -> Result<String, Failure> {
    if path == "-" {
        let mut buf = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut buf)
            .map_err(|e| Failure::usage(format!("cannot read stdin: {e}")))?;
        Ok(buf)
    } else {
        std::fs::read_to_string(path)
            .map_err(|e| Failure::usage(format!("cannot read {path}: {e}")))
    }
}

fn write_output(path: Option<&str>, content: &str) -> Result<(), Failure> {
    match path {
        None => {
            print!("{content}");
            std::io::stdout().flush().ok();
            Ok(())
        }
        Some(p) => std::fs::write(p, content)
            .map_err(|e| Failure::usage(format!("cannot write {p}: {e}"))),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_classify(
    coeffs: &str,
    out: Option<String>,
    svg: Option<String>,
    dump_traces: Option<String>,
    tol: Option<f64>,
    start_radius: Option<f64>,
    escape_radius: Option<f64>,
) -> Result<u8, Failure> {
    let parsed: Result<Vec<Complex64>, String> = coeffs
        .split(',')
        .map(|s| complexarg::parse_complex(s.trim()))
        .collect();
    let coeffs = parsed.map_err(Failure::usage)?;
    let p = Polynomial::new(coeffs).map_err(|e| Failure::usage(e.to_string()))?;

    let cfg = build_config(&p, tol, start_radius, escape_radius).map_err(Failure::usage)?;
    let classification = match assemble(&p, cfg, ChecksLevel::Full) {
        Ok(c) => c,
        Err(e @ InvariantError::Trace(_)) => {
            return Err(Failure {
                code: EXIT_INCONCLUSIVE,
                message: e.to_string(),
            })
        }
        Err(e) => {
            return Err(Failure {
                code: EXIT_INCONCLUSIVE,
                message: e.to_string(),
            })
        }
    };

    write_output(
        out.as_deref(),
        &(classification.to_canonical_json() + "\n"),
    )?;

    if let Some(svg_path) = svg {
        let spec = RenderSpec {
            mode: RenderMode::PhasePortrait,
            ..Default::default()
        };
        write_output(Some(&svg_path), &phase_portrait(&classification, &spec))?;
    }
    if let Some(dump) = dump_traces {
        let mut lines = String::new();
        for t in &classification.traces.traces {
            for &(time, z) in &t.samples {
                lines.push_str(&format!(
                    "[{},{},{},{}]\n",
                    t.label,
                    json::fmt_f64(time),
                    json::fmt_f64(z.re),
                    json::fmt_f64(z.im)
                ));
            }
        }
        write_output(Some(&dump), &lines)?;
    }
    let _ = classification
        .traces
        .traces
        .iter()
        .filter(|t| matches!(t.fate, Fate::Homoclinic { .. }))
        .count();
    Ok(EXIT_OK)
}

fn build_config(
    p: &Polynomial,
    tol: Option<f64>,
    start_radius: Option<f64>,
    escape_radius: Option<f64>,
) -> Result<Option<TraceConfig>, String> {
    if tol.is_none() && start_radius.is_none() && escape_radius.is_none() {
        return Ok(None);
    }
    let equilibria =
        polyvf_core::poly::find_roots(p, polyvf_core::poly::CLUSTER_TOL).map_err(|e| e.to_string())?;
    let mut cfg = TraceConfig::for_polynomial(p, &equilibria);
    if let Some(t) = tol {
        if t <= 0.0 {
            return Err("tolerance must be positive".into());
        }
        cfg.rel_tol = t;
    }
    if let Some(r) = start_radius {
        cfg = cfg.with_start_radius(r);
    }
    if let Some(r) = escape_radius {
        if r <= cfg.start_radius {
            return Err("escape radius must exceed the start radius".into());
        }
        cfg.escape_radius = r;
    }
    Ok(Some(cfg))
}

fn cmd_validate(path: &str) -> Result<u8, Failure> {
    let text = read_input(path)?;
    let ds = CombinatorialDataSet::parse_json(&text)
        .map_err(|e| Failure::usage(format!("malformed data set: {e}")))?;
    let report = ds.validate();
    println!("condition 1 (non-crossing):        {}", pass(report.condition1));
    println!("condition 2 (homoclinic marking):  {}", pass(report.condition2));
    println!("condition 3 (cell typing):         {}", pass(report.condition3));
    if let Some(cell) = &report.offending_cell {
        println!("  offending cell ends: {:?}", cell);
    }
    if let Some(props) = report.decomposition_properties {
        println!("decomposition properties:          {}", pass(props));
    }
    if let Some(chi) = report.euler_characteristic {
        println!("euler characteristic:              {chi}");
    }
    if report.valid() {
        let counting = ds
            .counting_identities()
            .map_err(|e| Failure::usage(e.to_string()))?;
        println!(
            "counting identities:               {}",
            pass(counting.all_hold())
        );
        println!("valid: yes");
        Ok(EXIT_OK)
    } else {
        println!("valid: no");
        Err(Failure {
            code: EXIT_INVALID_DATA_SET,
            message: "data set is not a valid combinatorial invariant".into(),
        })
    }
}

fn pass(b: bool) -> &'static str {
    if b {
        "pass"
    } else {
        "FAIL"
    }
}

fn cmd_enumerate(d: usize, stable: bool, out: Option<String>) -> Result<u8, Failure> {
    let sets = if stable {
        polyvf_core::comb::enumerate_structurally_stable(d)
    } else {
        enumerate_data_sets(d)
    }
    .map_err(|e| Failure::usage(e.to_string()))?;
    let mut body = String::new();
    for ds in &sets {
        body.push_str(&ds.to_canonical_json());
        body.push('\n');
    }
    body.push_str(&format!("count: {}\n", sets.len()));
    write_output(out.as_deref(), &body)?;
    Ok(EXIT_OK)
}

fn cmd_realize(
    path: &str,
    out: Option<String>,
    seed: Option<u64>,
    max_iter: Option<usize>,
) -> Result<u8, Failure> {
    let text = read_input(path)?;
    let value = json::parse_value(&text).map_err(|e| Failure::usage(format!("malformed JSON: {e}")))?;
    let ds_value = json::get(&value, "data_set").map_err(Failure::usage)?;
    let ds = CombinatorialDataSet::from_json_value(ds_value)
        .map_err(|e| Failure::usage(format!("malformed data set: {e}")))?;
    if !ds.is_valid() {
        return Err(Failure {
            code: EXIT_INVALID_DATA_SET,
            message: format!("invalid data set: {}", ds.to_canonical_json()),
        });
    }
    let alphas_v = json::as_array(json::get(&value, "alphas").map_err(Failure::usage)?, "alphas")
        .map_err(Failure::usage)?;
    let alphas: Result<Vec<Complex64>, String> = alphas_v
        .iter()
        .map(|a| json::as_complex(a, "alpha"))
        .collect();
    let taus_v = json::as_array(json::get(&value, "taus").map_err(Failure::usage)?, "taus")
        .map_err(Failure::usage)?;
    let taus: Result<Vec<f64>, String> = taus_v.iter().map(|t| json::as_f64(t, "tau")).collect();
    let target = AnalyticInvariant {
        alphas: alphas.map_err(Failure::usage)?,
        taus: taus.map_err(Failure::usage)?,
    };

    let mut options = SolverOptions::default();
    if let Some(s) = seed {
        options.seed = s;
    }
    if let Some(m) = max_iter {
        options.max_iterations = m;
    }
    let mut prob = RealizationProblem::new(ds, target);
    prob.options = options;

    match realize(&prob) {
        Ok(p) => {
            write_output(out.as_deref(), &(p.to_canonical_json() + "\n"))?;
            Ok(EXIT_OK)
        }
        Err(e @ RealizeError::InvalidDataSet(_)) => Err(Failure {
            code: EXIT_INVALID_DATA_SET,
            message: e.to_string(),
        }),
        Err(
            e @ (RealizeError::ShapeMismatch { .. }
            | RealizeError::AlphaNotInUpperHalfPlane(_, _)
            | RealizeError::TauNotPositive(_, _)),
        ) => Err(Failure::usage(e.to_string())),
        Err(e) => Err(Failure {
            code: EXIT_REALIZATION,
            message: e.to_string(),
        }),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_render(
    path: &str,
    mode: Mode,
    size: u32,
    transversals: bool,
    ends: bool,
    labels: bool,
    residues: bool,
    out: Option<String>,
) -> Result<u8, Failure> {
    if size == 0 {
        return Err(Failure::usage("canvas size must be positive"));
    }
    let text = read_input(path)?;
    let value = json::parse_value(&text).map_err(|e| Failure::usage(format!("malformed JSON: {e}")))?;
    let spec = RenderSpec {
        mode: match mode {
            Mode::DiskModel => RenderMode::DiskModel,
            Mode::PhasePortrait => RenderMode::PhasePortrait,
        },
        size,
        transversals,
        ends,
        labels,
        residues,
    };
    let svg = match mode {
        Mode::DiskModel => {
            let ds = CombinatorialDataSet::from_json_value(&value)
                .map_err(|e| Failure::usage(format!("malformed data set: {e}")))?;
            if !ds.is_valid() {
                return Err(Failure {
                    code: EXIT_INVALID_DATA_SET,
                    message: format!("invalid data set: {}", ds.to_canonical_json()),
                });
            }
            disk_model(&ds, &spec)
        }
        Mode::PhasePortrait => {
            let p = Polynomial::from_json_value(&value)
                .map_err(|e| Failure::usage(format!("malformed polynomial: {e}")))?;
            let classification = assemble(&p, None, ChecksLevel::Full).map_err(|e| Failure {
                code: EXIT_INCONCLUSIVE,
                message: e.to_string(),
            })?;
            phase_portrait(&classification, &spec)
        }
    };
    write_output(out.as_deref(), &svg)?;
    Ok(EXIT_OK)
}
