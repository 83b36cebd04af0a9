//! LLR-BP4 decoding: the message-passing engine, scheduling, and all decoder
//! variants (plain, Momentum, AdaGrad, EWAInit, MBP, adaptive sweeps, OTS).
//!
//! Messages are scalar log-likelihood ratios of "commutes with the check
//! entry" vs "anticommutes"; per-qubit beliefs are LLR triples over the
//! three Pauli errors. All stored messages and posteriors are clamped to
//! `[-CLAMP, CLAMP]`.

mod energy;
mod engine;

pub use energy::{energy, energy_gradient};

use serde::{Deserialize, Serialize};

use crate::code::{CodeSpec, TannerGraph};
use crate::noise::PriorSet;
use crate::pauli::{Pauli, PauliVector, Syndrome};
use crate::QbpError;

/// Saturation bound (nats) for messages and posteriors.
pub const CLAMP: f64 = 30.0;

/// Guard on |prod tanh| before the atanh in the check update.
pub const EPS_TANH: f64 = 1e-12;

#[inline]
pub(crate) fn clamp_llr(v: f64) -> f64 {
    v.clamp(-CLAMP, CLAMP)
}

/// Per-qubit LLR triple over the Pauli errors (X, Y, Z), in nats.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LlrTriple {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl LlrTriple {
    pub fn new(x: f64, y: f64, z: f64) -> LlrTriple {
        LlrTriple { x, y, z }
    }

    pub fn splat(v: f64) -> LlrTriple {
        LlrTriple::new(v, v, v)
    }

    pub fn zero() -> LlrTriple {
        LlrTriple::default()
    }

    #[inline]
    pub fn get(&self, w: Pauli) -> f64 {
        match w {
            Pauli::X => self.x,
            Pauli::Y => self.y,
            Pauli::Z => self.z,
            Pauli::I => panic!("no LLR component for the identity"),
        }
    }

    #[inline]
    pub fn set(&mut self, w: Pauli, v: f64) {
        match w {
            Pauli::X => self.x = v,
            Pauli::Y => self.y = v,
            Pauli::Z => self.z = v,
            Pauli::I => panic!("no LLR component for the identity"),
        }
    }

    #[inline]
    pub fn map(self, f: impl Fn(f64) -> f64) -> LlrTriple {
        LlrTriple::new(f(self.x), f(self.y), f(self.z))
    }

    #[inline]
    pub fn clamped(self) -> LlrTriple {
        self.map(clamp_llr)
    }

    /// Add `m` to the two components that anticommute with `h`.
    #[inline]
    pub fn add_anticommuting(mut self, h: Pauli, m: f64) -> LlrTriple {
        match h {
            Pauli::X => {
                self.y += m;
                self.z += m;
            }
            Pauli::Y => {
                self.x += m;
                self.z += m;
            }
            Pauli::Z => {
                self.x += m;
                self.y += m;
            }
            Pauli::I => {}
        }
        self
    }

    pub fn min_abs(&self) -> f64 {
        self.x.abs().min(self.y.abs()).min(self.z.abs())
    }

    pub fn max_abs(&self) -> f64 {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }
}

impl std::ops::Add for LlrTriple {
    type Output = LlrTriple;
    fn add(self, o: LlrTriple) -> LlrTriple {
        LlrTriple::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl std::ops::Sub for LlrTriple {
    type Output = LlrTriple;
    fn sub(self, o: LlrTriple) -> LlrTriple {
        LlrTriple::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl std::ops::Mul<LlrTriple> for f64 {
    type Output = LlrTriple;
    fn mul(self, t: LlrTriple) -> LlrTriple {
        LlrTriple::new(self * t.x, self * t.y, self * t.z)
    }
}

/// Message-passing order within an iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Schedule {
    /// Flooding: all check updates, then all variable updates.
    Parallel,
    /// Layered: per qubit in ascending index order, refresh that qubit's
    /// incoming check messages from the latest variable messages, then
    /// update its outgoing messages.
    Serial,
}

impl Schedule {
    pub fn as_str(&self) -> &'static str {
        match self {
            Schedule::Parallel => "parallel",
            Schedule::Serial => "serial",
        }
    }
}

/// Decoder family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Plain,
    Momentum,
    Adagrad,
    Ewainit,
    Mbp,
    Ambp,
    BpOts,
    EwainitOts,
    Aewa,
}

impl Variant {
    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::Plain => "plain",
            Variant::Momentum => "momentum",
            Variant::Adagrad => "adagrad",
            Variant::Ewainit => "ewainit",
            Variant::Mbp => "mbp",
            Variant::Ambp => "ambp",
            Variant::BpOts => "bp_ots",
            Variant::EwainitOts => "ewainit_ots",
            Variant::Aewa => "aewa",
        }
    }

    pub fn parse(s: &str) -> Option<Variant> {
        Some(match s {
            "plain" | "bp" | "llrbp4" => Variant::Plain,
            "momentum" => Variant::Momentum,
            "adagrad" => Variant::Adagrad,
            "ewainit" => Variant::Ewainit,
            "mbp" => Variant::Mbp,
            "ambp" => Variant::Ambp,
            "bp_ots" | "bp-ots" => Variant::BpOts,
            "ewainit_ots" | "ewainit-ots" => Variant::EwainitOts,
            "aewa" => Variant::Aewa,
            _ => return None,
        })
    }
}

/// Full decoder configuration. Field defaults follow the simulation setup:
/// `iter_max = 100`, AdaGrad boost `alpha = 5`, `epsilon = 1e-8`, OTS
/// `T = 9`, `C = 20`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecoderConfig {
    pub variant: Variant,
    pub schedule: Schedule,
    pub alpha: f64,
    pub gamma: f64,
    pub epsilon: f64,
    /// OTS firing period T.
    pub ots_period: usize,
    /// OTS prior overwrite magnitude C.
    pub ots_strength: f64,
    pub iter_max: usize,
    /// Descending step-size sweep for the adaptive variants; empty selects
    /// the per-variant default.
    pub alpha_list: Vec<f64>,
    /// Momentum normally fixes alpha = 1 or gamma = 0; set this to tune both.
    pub allow_free_hyperparams: bool,
    pub record_trace: bool,
}

impl Default for DecoderConfig {
    fn default() -> DecoderConfig {
        DecoderConfig {
            variant: Variant::Plain,
            schedule: Schedule::Parallel,
            alpha: 1.0,
            gamma: 0.0,
            epsilon: 1e-8,
            ots_period: 9,
            ots_strength: 20.0,
            iter_max: 100,
            alpha_list: Vec::new(),
            allow_free_hyperparams: false,
            record_trace: false,
        }
    }
}

impl DecoderConfig {
    pub fn plain() -> DecoderConfig {
        DecoderConfig::default()
    }

    pub fn momentum(alpha: f64, gamma: f64) -> DecoderConfig {
        DecoderConfig {
            variant: Variant::Momentum,
            alpha,
            gamma,
            ..DecoderConfig::default()
        }
    }

    pub fn adagrad(alpha: f64) -> DecoderConfig {
        DecoderConfig {
            variant: Variant::Adagrad,
            alpha,
            ..DecoderConfig::default()
        }
    }

    pub fn ewainit(alpha: f64) -> DecoderConfig {
        DecoderConfig {
            variant: Variant::Ewainit,
            alpha,
            ..DecoderConfig::default()
        }
    }

    pub fn mbp(alpha: f64) -> DecoderConfig {
        DecoderConfig {
            variant: Variant::Mbp,
            alpha,
            ..DecoderConfig::default()
        }
    }

    pub fn ambp() -> DecoderConfig {
        DecoderConfig {
            variant: Variant::Ambp,
            ..DecoderConfig::default()
        }
    }

    pub fn aewa() -> DecoderConfig {
        DecoderConfig {
            variant: Variant::Aewa,
            ..DecoderConfig::default()
        }
    }

    pub fn bp_ots(period: usize, strength: f64) -> DecoderConfig {
        DecoderConfig {
            variant: Variant::BpOts,
            ots_period: period,
            ots_strength: strength,
            ..DecoderConfig::default()
        }
    }

    pub fn ewainit_ots(alpha: f64, period: usize, strength: f64) -> DecoderConfig {
        DecoderConfig {
            variant: Variant::EwainitOts,
            alpha,
            ots_period: period,
            ots_strength: strength,
            ..DecoderConfig::default()
        }
    }

    pub fn serial(mut self) -> DecoderConfig {
        self.schedule = Schedule::Serial;
        self
    }

    pub fn parallel(mut self) -> DecoderConfig {
        self.schedule = Schedule::Parallel;
        self
    }

    pub fn with_iter_max(mut self, iter_max: usize) -> DecoderConfig {
        self.iter_max = iter_max;
        self
    }

    pub fn with_trace(mut self) -> DecoderConfig {
        self.record_trace = true;
        self
    }

    pub fn with_alpha_list(mut self, list: Vec<f64>) -> DecoderConfig {
        self.alpha_list = list;
        self
    }

    /// Step-size sweep for the adaptive variants: 11 uniform values over
    /// [1, 0.5] for AMBP and over [1, 0] for AEWA-BP.
    pub fn default_alpha_list(variant: Variant) -> Vec<f64> {
        let (lo, n) = match variant {
            Variant::Ambp => (0.5, 11),
            Variant::Aewa => (0.0, 11),
            _ => return Vec::new(),
        };
        (0..n)
            .map(|i| 1.0 - (1.0 - lo) * i as f64 / (n - 1) as f64)
            .collect()
    }

    pub fn validate(&self) -> Result<(), QbpError> {
        if self.iter_max < 1 {
            return Err(QbpError::Config("iter_max must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return Err(QbpError::Config(format!(
                "gamma must lie in [0, 1), got {}",
                self.gamma
            )));
        }
        if self.epsilon <= 0.0 {
            return Err(QbpError::Config("epsilon must be positive".into()));
        }
        if self.ots_period < 1 {
            return Err(QbpError::Config("OTS period T must be at least 1".into()));
        }
        match self.variant {
            Variant::Momentum => {
                if self.alpha != 1.0 && self.gamma != 0.0 && !self.allow_free_hyperparams {
                    return Err(QbpError::Config(
                        "momentum fixes alpha = 1 or gamma = 0; set allow_free_hyperparams to tune both"
                            .into(),
                    ));
                }
            }
            Variant::Ewainit | Variant::EwainitOts => {
                if !(self.alpha > 0.0 && self.alpha <= 1.0) {
                    return Err(QbpError::Config(format!(
                        "EWAInit needs 0 < alpha <= 1, got {}",
                        self.alpha
                    )));
                }
            }
            Variant::Mbp => {
                if self.alpha <= 0.0 {
                    return Err(QbpError::Config("MBP needs alpha > 0".into()));
                }
            }
            Variant::Ambp | Variant::Aewa => {
                let list = if self.alpha_list.is_empty() {
                    DecoderConfig::default_alpha_list(self.variant)
                } else {
                    self.alpha_list.clone()
                };
                if list.is_empty() {
                    return Err(QbpError::Config("alpha_list must be nonempty".into()));
                }
                if list.windows(2).any(|w| w[1] >= w[0]) {
                    return Err(QbpError::Config(
                        "alpha_list must be strictly descending".into(),
                    ));
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// Per-iteration decoder state snapshot.
#[derive(Debug, Clone)]
pub struct IterationRecord {
    pub hard_decision: PauliVector,
    pub posteriors: Vec<LlrTriple>,
    /// Per-qubit sums of anticommuting check messages this iteration (the
    /// S terms of the closed-form posterior expansions).
    pub msg_sums: Vec<LlrTriple>,
}

/// Full decode trace; `records[t-1]` reflects state after iteration `t`.
#[derive(Debug, Clone, Default)]
pub struct IterationTrace {
    pub records: Vec<IterationRecord>,
}

impl IterationTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn hard_decisions(&self) -> impl Iterator<Item = &PauliVector> {
        self.records.iter().map(|r| &r.hard_decision)
    }
}

/// Result of a decode call.
#[derive(Debug, Clone)]
pub struct DecodeOutcome {
    pub converged: bool,
    pub estimate: PauliVector,
    /// Iterations used; for adaptive sweeps, total across all inner runs.
    pub iterations: usize,
    /// Step size that converged, for adaptive sweeps.
    pub alpha_star: Option<f64>,
    pub trace: Option<IterationTrace>,
}

/// `ln((1 + e^{-t_h}) / (e^{-t_x} + e^{-t_y} + e^{-t_z} - e^{-t_h}))`:
/// the LLR of "the error commutes with `h`" under beliefs `t`, computed in
/// log-domain and clamped.
pub fn lambda_fn(h: Pauli, t: LlrTriple) -> f64 {
    debug_assert!(h != Pauli::I);
    let (a, b) = match h {
        Pauli::X => (t.y, t.z),
        Pauli::Y => (t.x, t.z),
        Pauli::Z => (t.x, t.y),
        Pauli::I => unreachable!(),
    };
    clamp_llr(softplus(-t.get(h)) - logsumexp2(-a, -b))
}

/// ln(1 + e^x), stable for large |x|.
#[inline]
fn softplus(x: f64) -> f64 {
    if x > 35.0 {
        x
    } else {
        x.exp().ln_1p()
    }
}

#[inline]
fn logsumexp2(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Check-node feedback from the extrinsic inputs (messages from all
/// neighbors except the target): `(-1)^s * 2 atanh(prod tanh(m/2))`.
pub fn check_update(extrinsic_inputs: &[f64], syndrome_bit: u8) -> f64 {
    let mut prod = 1.0;
    for &m in extrinsic_inputs {
        prod *= (m / 2.0).tanh();
    }
    check_message_from_product(prod, syndrome_bit)
}

#[inline]
pub(crate) fn check_message_from_product(prod: f64, syndrome_bit: u8) -> f64 {
    let bound = 1.0 - EPS_TANH;
    let p = prod.clamp(-bound, bound);
    let sgn = if syndrome_bit == 1 { -1.0 } else { 1.0 };
    clamp_llr(sgn * 2.0 * p.atanh())
}

/// Hard decision for one qubit: identity when every component is positive,
/// otherwise the smallest component with ties broken X < Y < Z. An exact
/// zero counts as the error side.
pub fn hard_decision(q: &LlrTriple) -> Pauli {
    if q.x > 0.0 && q.y > 0.0 && q.z > 0.0 {
        return Pauli::I;
    }
    let mut best = Pauli::X;
    let mut best_v = q.x;
    for w in [Pauli::Y, Pauli::Z] {
        if q.get(w) < best_v {
            best = w;
            best_v = q.get(w);
        }
    }
    best
}

/// Hard decision across all qubits.
pub fn hard_decision_vector(qs: &[LlrTriple]) -> PauliVector {
    let mut e = PauliVector::identity(qs.len());
    for (j, q) in qs.iter().enumerate() {
        e.set(j, hard_decision(q));
    }
    e
}

/// Run exactly `iterations` message-passing sweeps with no convergence exit
/// and return the posterior triples. On a cycle-free graph the result equals
/// the exact conditional marginals once `iterations` reaches the tree
/// diameter.
pub fn posteriors_after(
    code: &CodeSpec,
    syndrome: &Syndrome,
    priors: &PriorSet,
    config: &DecoderConfig,
    iterations: usize,
) -> Result<Vec<LlrTriple>, QbpError> {
    config.validate()?;
    let graph = TannerGraph::from_code(code);
    if syndrome.len() != graph.n_checks || priors.len() != graph.n_qubits {
        return Err(QbpError::LengthMismatch {
            left: syndrome.len(),
            right: graph.n_checks,
        });
    }
    Ok(engine::run_beliefs(&graph, syndrome, priors, config, iterations))
}

/// Decode a syndrome on a code. Builds the Tanner graph on the fly; use
/// [`decode_on_graph`] to amortize graph construction across many calls.
pub fn decode(
    code: &CodeSpec,
    syndrome: &Syndrome,
    priors: &PriorSet,
    config: &DecoderConfig,
) -> Result<DecodeOutcome, QbpError> {
    let graph = TannerGraph::from_code(code);
    decode_on_graph(&graph, syndrome, priors, config)
}

/// Decode on a prebuilt Tanner graph.
pub fn decode_on_graph(
    graph: &TannerGraph,
    syndrome: &Syndrome,
    priors: &PriorSet,
    config: &DecoderConfig,
) -> Result<DecodeOutcome, QbpError> {
    config.validate()?;
    if syndrome.len() != graph.n_checks {
        return Err(QbpError::LengthMismatch {
            left: syndrome.len(),
            right: graph.n_checks,
        });
    }
    if priors.len() != graph.n_qubits {
        return Err(QbpError::LengthMismatch {
            left: priors.len(),
            right: graph.n_qubits,
        });
    }
    match config.variant {
        Variant::Ambp | Variant::Aewa => adaptive_decode(graph, syndrome, priors, config),
        _ => Ok(engine::run(graph, syndrome, priors, config)),
    }
}

/// Adaptive step-size sweep: run the inner decoder for each alpha in
/// descending order and return the first converged outcome together with
/// its alpha. On total failure the last outcome is returned with the
/// accumulated iteration count.
fn adaptive_decode(
    graph: &TannerGraph,
    syndrome: &Syndrome,
    priors: &PriorSet,
    config: &DecoderConfig,
) -> Result<DecodeOutcome, QbpError> {
    let list = if config.alpha_list.is_empty() {
        DecoderConfig::default_alpha_list(config.variant)
    } else {
        config.alpha_list.clone()
    };
    let inner_variant = match config.variant {
        Variant::Ambp => Variant::Mbp,
        Variant::Aewa => Variant::Ewainit,
        _ => unreachable!(),
    };
    let mut total_iters = 0;
    let mut last: Option<DecodeOutcome> = None;
    for &alpha in &list {
        let inner = DecoderConfig {
            variant: inner_variant,
            alpha,
            alpha_list: Vec::new(),
            ..config.clone()
        };
        let out = engine::run(graph, syndrome, priors, &inner);
        total_iters += out.iterations;
        if out.converged {
            return Ok(DecodeOutcome {
                iterations: total_iters,
                alpha_star: Some(alpha),
                ..out
            });
        }
        last = Some(out);
    }
    let mut out = last.expect("alpha_list validated nonempty");
    out.iterations = total_iters;
    out.alpha_star = None;
    Ok(out)
}

/// Closed-form EWAInit posterior: `Q(t) = Pi0 + sum_k (1-alpha)^k S(t-k)`,
/// where `msg_sums[k][j]` holds iteration k+1's per-qubit anticommuting
/// message sums. Oracle for the parallel-schedule decoder.
pub fn ewainit_closed_form(
    msg_sums: &[Vec<LlrTriple>],
    prior0: &[LlrTriple],
    alpha: f64,
    t: usize,
) -> Result<Vec<LlrTriple>, QbpError> {
    closed_form(msg_sums, prior0, t, |k| (1.0 - alpha).powi(k as i32))
}

/// Closed-form Momentum posterior at gamma = 0:
/// `Q(t) = Pi0 + sum_k alpha (1-alpha)^k S(t-k)`.
pub fn momentum_closed_form(
    msg_sums: &[Vec<LlrTriple>],
    prior0: &[LlrTriple],
    alpha: f64,
    t: usize,
) -> Result<Vec<LlrTriple>, QbpError> {
    closed_form(msg_sums, prior0, t, |k| alpha * (1.0 - alpha).powi(k as i32))
}

fn closed_form(
    msg_sums: &[Vec<LlrTriple>],
    prior0: &[LlrTriple],
    t: usize,
    coeff: impl Fn(usize) -> f64,
) -> Result<Vec<LlrTriple>, QbpError> {
    if msg_sums.len() < t || t == 0 {
        return Err(QbpError::Config(format!(
            "trace holds {} iterations, need {t}",
            msg_sums.len()
        )));
    }
    let n = prior0.len();
    let mut q = prior0.to_vec();
    for k in 0..t {
        let c = coeff(k);
        let s_t_minus_k = &msg_sums[t - k - 1];
        for j in 0..n {
            q[j] = q[j] + c * s_t_minus_k[j];
        }
    }
    Ok(q)
}
