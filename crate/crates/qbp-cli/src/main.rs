//! `qbp` command line: Monte Carlo sweeps, the trapping-set suite, and code
//! inspection.

mod report;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};

use qbp::bp::{DecoderConfig, Schedule, Variant};
use qbp::code::{build_planar, build_toric, build_xzzx, load_code, CodeSpec};
use qbp::harness::run_batch;
use qbp::noise::NoiseModel;
use qbp::trapping::{
    build_ts40, detect_oscillation, trap_suite, trace_decode, ts40_error, write_trace,
};
use qbp::QbpError;

use report::{render_csv, JsonReport, Row, RowRef, RunManifest};

#[derive(Parser)]
#[command(name = "qbp", version, about = "GF(4) belief-propagation decoding toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run Monte Carlo decoding sweeps and emit CSV/JSON rows.
    Simulate(SimulateArgs),
    /// Run the (4,0) trapping-set experiments.
    Trap(TrapArgs),
    /// Print code parameters and validation results.
    Codeinfo(CodeinfoArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Code family: planar | toric | xzzx | file:PATH
    #[arg(long)]
    code: String,
    /// Lattice sizes, comma separated (ignored for file codes).
    #[arg(long, short = 'L', value_delimiter = ',')]
    l: Vec<usize>,
    /// Decoders, comma separated: plain, momentum, adagrad, ewainit, mbp,
    /// ambp, bp_ots, ewainit_ots, aewa.
    #[arg(long, value_delimiter = ',', default_value = "plain")]
    decoder: Vec<String>,
    #[arg(long, default_value = "parallel")]
    schedule: String,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    gamma: f64,
    #[arg(long, default_value_t = 1e-8)]
    epsilon: f64,
    /// OTS firing period.
    #[arg(long = "T", default_value_t = 9)]
    ots_period: usize,
    /// OTS prior overwrite strength.
    #[arg(long = "C", default_value_t = 20.0)]
    ots_strength: f64,
    #[arg(long, default_value_t = 100)]
    iter_max: usize,
    /// Adaptive sweep list, comma separated and descending.
    #[arg(long, value_delimiter = ',')]
    alpha_list: Vec<f64>,
    /// Physical error rates: single value, comma list, or start:stop:step.
    #[arg(long)]
    p: String,
    /// Channel bias eta_x,eta_y,eta_z (defaults to depolarizing).
    #[arg(long)]
    eta: Option<String>,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (0 = all cores). Falls back to QBP_WORKERS.
    #[arg(long)]
    workers: Option<usize>,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a JSON report (results + manifest).
    #[arg(long)]
    json: Option<PathBuf>,
    /// Suppress timing columns and manifest timestamps for byte-reproducible
    /// output.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args)]
struct TrapArgs {
    /// Run a single decoder instead of the full suite.
    #[arg(long)]
    decoder: Option<String>,
    #[arg(long, default_value = "parallel")]
    schedule: String,
    #[arg(long, default_value_t = 50)]
    iter_max: usize,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    gamma: f64,
    #[arg(long = "T", default_value_t = 9)]
    ots_period: usize,
    #[arg(long = "C", default_value_t = 20.0)]
    ots_strength: f64,
    /// Write the per-iteration trace of a single-decoder run to this file.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct CodeinfoArgs {
    /// Code family: planar | toric | xzzx | file:PATH
    #[arg(long)]
    code: String,
    #[arg(long, short = 'L')]
    l: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Trap(args) => cmd_trap(args),
        Command::Codeinfo(args) => cmd_codeinfo(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                QbpError::Config(_) | QbpError::Parse(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

/// Resolve `--code`/`--L` into concrete codes tagged with family and size.
fn resolve_codes(
    family: &str,
    sizes: &[usize],
) -> Result<Vec<(String, Option<usize>, CodeSpec)>, QbpError> {
    if let Some(path) = family.strip_prefix("file:") {
        let code = load_code(path)?;
        return Ok(vec![("file".into(), None, code)]);
    }
    let build: fn(usize) -> Result<CodeSpec, QbpError> = match family {
        "planar" => build_planar,
        "toric" => build_toric,
        "xzzx" => build_xzzx,
        other => {
            return Err(QbpError::Config(format!(
                "unknown code family '{other}' (expected planar, toric, xzzx, or file:PATH)"
            )))
        }
    };
    if sizes.is_empty() {
        return Err(QbpError::Config("--L required for lattice codes".into()));
    }
    sizes
        .iter()
        .map(|&l| Ok((family.to_string(), Some(l), build(l)?)))
        .collect()
}

fn parse_schedule(s: &str) -> Result<Schedule, QbpError> {
    match s {
        "parallel" | "flooding" => Ok(Schedule::Parallel),
        "serial" | "layered" => Ok(Schedule::Serial),
        other => Err(QbpError::Config(format!("unknown schedule '{other}'"))),
    }
}

fn parse_variant(s: &str) -> Result<Variant, QbpError> {
    Variant::parse(s).ok_or_else(|| QbpError::Config(format!("unknown decoder '{s}'")))
}

/// `0.05`, `0.01,0.02`, or inclusive `start:stop:step`.
fn parse_p_values(spec: &str) -> Result<Vec<f64>, QbpError> {
    let bad = |what: &str| QbpError::Config(format!("malformed p range '{spec}': {what}"));
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected start:stop:step"));
        }
        let nums: Vec<f64> = parts
            .iter()
            .map(|t| t.parse().map_err(|_| bad("non-numeric field")))
            .collect::<Result<_, _>>()?;
        let (start, stop, step) = (nums[0], nums[1], nums[2]);
        if step <= 0.0 || stop < start {
            return Err(bad("need step > 0 and stop >= start"));
        }
        let mut out = Vec::new();
        let mut k = 0usize;
        loop {
            let v = start + step * k as f64;
            if v > stop + 1e-12 {
                break;
            }
            out.push(v);
            k += 1;
        }
        return Ok(out);
    }
    spec.split(',')
        .map(|t| t.trim().parse().map_err(|_| bad("non-numeric value")))
        .collect()
}

fn parse_bias(spec: Option<&str>) -> Result<(f64, f64, f64), QbpError> {
    let Some(spec) = spec else {
        return Ok((1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0));
    };
    let parts: Vec<f64> = spec
        .split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| QbpError::Config(format!("malformed bias '{spec}'")))
        })
        .collect::<Result<_, _>>()?;
    if parts.len() != 3 {
        return Err(QbpError::Config(format!(
            "bias needs three components, got '{spec}'"
        )));
    }
    Ok((parts[0], parts[1], parts[2]))
}

fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

fn cmd_simulate(args: SimulateArgs) -> Result<ExitCode, QbpError> {
    let codes = resolve_codes(&args.code, &args.l)?;
    let schedule = parse_schedule(&args.schedule)?;
    let bias = parse_bias(args.eta.as_deref())?;
    let ps = parse_p_values(&args.p)?;
    if ps.is_empty() {
        return Err(QbpError::Config("empty p grid".into()));
    }
    let workers = args
        .workers
        .or_else(|| {
            std::env::var("QBP_WORKERS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(0);

    let mut configs = Vec::new();
    for name in &args.decoder {
        let variant = parse_variant(name)?;
        let config = DecoderConfig {
            variant,
            schedule,
            alpha: args.alpha,
            gamma: args.gamma,
            epsilon: args.epsilon,
            ots_period: args.ots_period,
            ots_strength: args.ots_strength,
            iter_max: args.iter_max,
            alpha_list: args.alpha_list.clone(),
            ..DecoderConfig::default()
        };
        config.validate()?;
        configs.push(config);
    }

    let started = if args.no_timing { 0 } else { now_ms() };
    let mut rows = Vec::new();
    for (family, l, code) in &codes {
        for config in &configs {
            for &p in &ps {
                let model = NoiseModel::biased(p, bias)?;
                let stats = run_batch(code, &model, config, args.trials, args.seed, workers)?;
                rows.push(Row::from_stats(family, *l, &stats, !args.no_timing));
            }
        }
    }
    let finished = if args.no_timing { 0 } else { now_ms() };

    let csv = render_csv(&rows);
    match &args.out {
        Some(path) => fs::write(path, &csv)?,
        None => print!("{csv}"),
    }
    if let Some(path) = &args.json {
        let manifest = RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command_line: std::env::args().collect(),
            master_seed: args.seed,
            workers,
            started_unix_ms: started,
            finished_unix_ms: finished,
            rows: rows
                .iter()
                .enumerate()
                .map(|(index, r)| RowRef {
                    index,
                    name: r.name.clone(),
                    decoder: r.decoder.clone(),
                    p: r.p,
                })
                .collect(),
        };
        let json = serde_json::to_string_pretty(&JsonReport {
            manifest: &manifest,
            results: &rows,
        })
        .map_err(|e| QbpError::Internal(format!("json: {e}")))?;
        fs::write(path, json)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_trap(args: TrapArgs) -> Result<ExitCode, QbpError> {
    if let Some(decoder) = &args.decoder {
        let variant = parse_variant(decoder)?;
        let schedule = parse_schedule(&args.schedule)?;
        let config = DecoderConfig {
            variant,
            schedule,
            alpha: args.alpha,
            gamma: args.gamma,
            ots_period: args.ots_period,
            ots_strength: args.ots_strength,
            iter_max: args.iter_max,
            ..DecoderConfig::default()
        };
        config.validate()?;
        let code = build_ts40();
        let syndrome = code.syndrome_of(&ts40_error());
        let priors =
            qbp::noise::PriorSet::uniform(&NoiseModel::depolarizing(0.01)?, code.n_qubits());
        let (outcome, trace) = trace_decode(&code, &syndrome, &priors, &config)?;
        if let Some(path) = &args.trace {
            let mut buf = Vec::new();
            write_trace(&trace, &mut buf)?;
            fs::write(path, buf)?;
        }
        if outcome.converged {
            println!(
                "{} {}: converged, iterations = {}",
                variant.as_str(),
                schedule.as_str(),
                outcome.iterations
            );
        } else {
            let osc = detect_oscillation(&trace, 8);
            println!(
                "{} {}: not converged in {} iterations, oscillation = {}",
                variant.as_str(),
                schedule.as_str(),
                args.iter_max,
                osc.map(|p| p.to_string()).unwrap_or_else(|| "none".into())
            );
        }
        return Ok(ExitCode::SUCCESS);
    }

    let cells = trap_suite(args.iter_max)?;
    println!("(4,0) trapping set, X errors on qubits 1,2 (syndrome [1,0,1,0]), p = 0.01, iter_max = {}", args.iter_max);
    println!("{:<14} {:<10} {:<8} {:<12} {}", "algorithm", "schedule", "alpha", "result", "oscillation");
    for cell in cells {
        let alpha = cell
            .alpha
            .map(|a| format!("{a}"))
            .unwrap_or_else(|| "-".into());
        let result = if cell.converged {
            format!("iter={}", cell.iterations)
        } else {
            "no conv".into()
        };
        let osc = cell
            .oscillation
            .map(|p| format!("period {p}"))
            .unwrap_or_default();
        println!(
            "{:<14} {:<10} {:<8} {:<12} {}",
            cell.algorithm,
            cell.schedule.as_str(),
            alpha,
            result,
            osc
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_codeinfo(args: CodeinfoArgs) -> Result<ExitCode, QbpError> {
    let sizes: Vec<usize> = args.l.into_iter().collect();
    let codes = resolve_codes(&args.code, &sizes)?;
    let (_, _, code) = &codes[0];
    println!("name: {}", code.name());
    match code.validate() {
        Ok(report) => {
            let d = code
                .distance()
                .map(|d| d.to_string())
                .unwrap_or_else(|| "?".into());
            println!("[[{}, {}, {}]] valid", report.n, report.k, d);
            println!("checks: {}  rank: {}", code.n_checks(), report.rank);
            println!("row weights: {}", histogram(&report.row_weight_hist));
            println!("col weights: {}", histogram(&report.col_weight_hist));
            Ok(ExitCode::SUCCESS)
        }
        Err(e) => {
            println!("INVALID: {e}");
            Ok(ExitCode::from(3))
        }
    }
}

fn histogram(hist: &[usize]) -> String {
    hist.iter()
        .enumerate()
        .filter(|&(_, &count)| count > 0)
        .map(|(w, count)| format!("{w}:{count}"))
        .collect::<Vec<_>>()
        .join(" ")
}
