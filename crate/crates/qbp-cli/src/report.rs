//! Result rows, CSV rendering, and the run manifest.

use serde::Serialize;

use qbp::harness::RunStats;

pub const CSV_HEADER: &str = "code,name,L,N,K,decoder,schedule,alpha,gamma,T,C,iter_max,p,\
eta_x,eta_y,eta_z,trials,successes,undetected,unconverged,ler,ler_ci_low,ler_ci_high,\
mean_iters_all,mean_iters_conv,mean_ms,seed";

/// One results row; field order mirrors the CSV columns.
#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub code: String,
    pub name: String,
    pub l: Option<usize>,
    pub n: usize,
    pub k: usize,
    pub decoder: String,
    pub schedule: String,
    pub alpha: f64,
    pub gamma: f64,
    pub t: usize,
    pub c: f64,
    pub iter_max: usize,
    pub p: f64,
    pub eta_x: f64,
    pub eta_y: f64,
    pub eta_z: f64,
    pub trials: u64,
    pub successes: u64,
    pub undetected: u64,
    pub unconverged: u64,
    pub ler: f64,
    pub ler_ci_low: f64,
    pub ler_ci_high: f64,
    pub mean_iters_all: f64,
    pub mean_iters_conv: f64,
    /// Suppressed (empty column) under --no-timing.
    pub mean_ms: Option<f64>,
    pub seed: u64,
}

impl Row {
    pub fn from_stats(family: &str, l: Option<usize>, stats: &RunStats, with_timing: bool) -> Row {
        let (ci_low, ci_high) = stats.ler_confidence();
        Row {
            code: family.to_string(),
            name: stats.code_name.clone(),
            l,
            n: stats.n_qubits,
            k: stats.n_logical,
            decoder: stats.config.variant.as_str().to_string(),
            schedule: stats.config.schedule.as_str().to_string(),
            alpha: stats.config.alpha,
            gamma: stats.config.gamma,
            t: stats.config.ots_period,
            c: stats.config.ots_strength,
            iter_max: stats.config.iter_max,
            p: stats.noise.p_total,
            eta_x: stats.noise.bias.0,
            eta_y: stats.noise.bias.1,
            eta_z: stats.noise.bias.2,
            trials: stats.trials,
            successes: stats.successes,
            undetected: stats.undetected,
            unconverged: stats.unconverged,
            ler: stats.logical_error_rate(),
            ler_ci_low: ci_low,
            ler_ci_high: ci_high,
            mean_iters_all: stats.mean_iterations,
            mean_iters_conv: stats.mean_iterations_converged,
            mean_ms: with_timing.then_some(stats.mean_wall_time_ms),
            seed: stats.master_seed,
        }
    }

    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.code,
            self.name,
            self.l.map(|v| v.to_string()).unwrap_or_default(),
            self.n,
            self.k,
            self.decoder,
            self.schedule,
            self.alpha,
            self.gamma,
            self.t,
            self.c,
            self.iter_max,
            self.p,
            self.eta_x,
            self.eta_y,
            self.eta_z,
            self.trials,
            self.successes,
            self.undetected,
            self.unconverged,
            self.ler,
            self.ler_ci_low,
            self.ler_ci_high,
            self.mean_iters_all,
            self.mean_iters_conv,
            self.mean_ms.map(|v| v.to_string()).unwrap_or_default(),
            self.seed,
        )
    }
}

pub fn render_csv(rows: &[Row]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.to_csv_line());
        out.push('\n');
    }
    out
}

/// Everything needed to bit-reproduce a simulate run (timings aside).
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub command_line: Vec<String>,
    pub master_seed: u64,
    pub workers: usize,
    /// Unix milliseconds; zeroed under --no-timing.
    pub started_unix_ms: u64,
    pub finished_unix_ms: u64,
    pub rows: Vec<RowRef>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RowRef {
    pub index: usize,
    pub name: String,
    pub decoder: String,
    pub p: f64,
}

#[derive(Debug, Serialize)]
pub struct JsonReport<'a> {
    pub manifest: &'a RunManifest,
    pub results: &'a [Row],
}
