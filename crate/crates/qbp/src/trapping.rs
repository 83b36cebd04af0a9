//! The (4,0) trapping-set laboratory: the standalone four-qubit code, traced
//! decoding, oscillation detection, and the iteration-count comparison suite
//! across decoder variants.

use std::io::Write;

use crate::bp::{
    decode, DecodeOutcome, DecoderConfig, IterationTrace, Schedule, Variant,
};
use crate::code::CodeSpec;
use crate::noise::{NoiseModel, PriorSet};
use crate::pauli::{Pauli, PauliVector, Syndrome};
use crate::QbpError;

/// The smallest surface-code trapping set as a standalone code: four qubits
/// and four weight-2 Z-checks on a ring, check `i` touching qubits `i` and
/// `i+1 mod 4`. The Tanner graph is a single 8-cycle with every node of
/// degree 2.
pub fn build_ts40() -> CodeSpec {
    let rows = (0..4)
        .map(|i| vec![(i, Pauli::Z), ((i + 1) % 4, Pauli::Z)])
        .collect();
    CodeSpec::new("ts40", 4, rows, vec![]).expect("ts40 construction is static")
}

/// The canonical injected error: X on qubits 1 and 2, which share check 1.
/// Its syndrome is literally `[1, 0, 1, 0]`.
pub fn ts40_error() -> PauliVector {
    PauliVector::parse("IXXI").expect("static pattern")
}

/// Decode with full per-iteration tracing. Semantics are identical to the
/// untraced decode.
pub fn trace_decode(
    code: &CodeSpec,
    syndrome: &Syndrome,
    priors: &PriorSet,
    config: &DecoderConfig,
) -> Result<(DecodeOutcome, IterationTrace), QbpError> {
    let mut cfg = config.clone();
    cfg.record_trace = true;
    let mut out = decode(code, syndrome, priors, &cfg)?;
    let trace = out.trace.take().unwrap_or_default();
    Ok((out, trace))
}

/// Detect a periodic hard-decision oscillation over the last half of a
/// trace.
///
/// Returns the number of distinct hard-decision states in the repeating
/// cycle (the states the decoder oscillates between), e.g. 2 for the
/// all-X / all-I limit cycle of plain BP on the trapping set. A constant
/// tail returns `None`: a settled decoder is not oscillating and is
/// reported separately by its convergence flag. Traces too short for
/// `period_max` are truncated to the longest testable period.
pub fn detect_oscillation(trace: &IterationTrace, period_max: usize) -> Option<usize> {
    let decisions: Vec<&PauliVector> = trace.hard_decisions().collect();
    if decisions.len() < 2 {
        return None;
    }
    let window = &decisions[decisions.len() / 2..];
    let pm = period_max.min(window.len().saturating_sub(1));
    let shift_period = (1..=pm).find(|&p| {
        window
            .iter()
            .zip(window.iter().skip(p))
            .all(|(a, b)| a == b)
    })?;
    if shift_period == 1 {
        return None; // constant tail
    }
    let mut distinct: Vec<&PauliVector> = Vec::new();
    for d in &window[..shift_period] {
        if !distinct.contains(d) {
            distinct.push(d);
        }
    }
    Some(distinct.len())
}

/// Export a trace as line-delimited records, one row per (iteration, qubit):
/// `iteration,qubit,q_x,q_y,q_z,decision`.
pub fn write_trace<W: Write>(trace: &IterationTrace, mut w: W) -> std::io::Result<()> {
    writeln!(w, "iteration,qubit,q_x,q_y,q_z,decision")?;
    for (t, rec) in trace.records.iter().enumerate() {
        for (j, q) in rec.posteriors.iter().enumerate() {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                t + 1,
                j,
                q.x,
                q.y,
                q.z,
                rec.hard_decision.get(j).to_char()
            )?;
        }
    }
    Ok(())
}

/// One cell of the iteration-count comparison table.
#[derive(Debug, Clone)]
pub struct TrapCell {
    pub algorithm: &'static str,
    pub variant: Variant,
    pub schedule: Schedule,
    pub alpha: Option<f64>,
    pub converged: bool,
    pub iterations: usize,
    /// Oscillation state count for non-converged cells.
    pub oscillation: Option<usize>,
}

/// Run every decoder variant on the canonical trapping-set instance with the
/// hyperparameters used in the comparison table (AdaGrad boost 5, Momentum
/// gamma 0 with the best swept alpha per schedule, MBP/EWAInit alpha 0.5,
/// BP-OTS T = 9, C = 20) and a-priori depolarizing probability 0.01.
pub fn trap_suite(iter_max: usize) -> Result<Vec<TrapCell>, QbpError> {
    let code = build_ts40();
    let syndrome = code.syndrome_of(&ts40_error());
    let model = NoiseModel::depolarizing(0.01)?;
    let priors = PriorSet::uniform(&model, code.n_qubits());

    let cells: Vec<(&'static str, DecoderConfig)> = vec![
        ("LLR-BP4", DecoderConfig::plain()),
        ("LLR-BP4", DecoderConfig::plain().serial()),
        ("MBP", DecoderConfig::mbp(0.5)),
        ("MBP", DecoderConfig::mbp(0.5).serial()),
        ("BP-OTS", DecoderConfig::bp_ots(9, 20.0)),
        ("BP-OTS", DecoderConfig::bp_ots(9, 20.0).serial()),
        ("EWAInit-BP", DecoderConfig::ewainit(0.5)),
        ("EWAInit-BP", DecoderConfig::ewainit(0.5).serial()),
        ("AdaGrad-BP", DecoderConfig::adagrad(5.0)),
        ("AdaGrad-BP", DecoderConfig::adagrad(5.0).serial()),
        ("Momentum-BP", DecoderConfig::momentum(0.5, 0.0)),
        ("Momentum-BP", DecoderConfig::momentum(0.6, 0.0).serial()),
    ];

    let mut out = Vec::with_capacity(cells.len());
    for (name, cfg) in cells {
        let cfg = cfg.with_iter_max(iter_max);
        let (outcome, trace) = trace_decode(&code, &syndrome, &priors, &cfg)?;
        let oscillation = if outcome.converged {
            None
        } else {
            detect_oscillation(&trace, 8)
        };
        out.push(TrapCell {
            algorithm: name,
            variant: cfg.variant,
            schedule: cfg.schedule,
            alpha: match cfg.variant {
                Variant::Plain | Variant::Adagrad | Variant::BpOts => None,
                _ => Some(cfg.alpha),
            },
            converged: outcome.converged,
            iterations: outcome.iterations,
            oscillation,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::TannerGraph;

    #[test]
    fn ts40_structure() {
        let code = build_ts40();
        assert_eq!(code.n_qubits(), 4);
        assert_eq!(code.n_checks(), 4);
        for row in code.rows() {
            assert_eq!(row.len(), 2);
        }
        let report = code.validate().unwrap();
        assert_eq!(report.col_weight_hist[2], 4);
        assert_eq!(report.k, 1); // ring of 4 checks has rank 3
        let graph = TannerGraph::from_code(&code);
        assert_eq!(graph.girth(), Some(8));
    }

    #[test]
    fn canonical_error_syndrome() {
        let code = build_ts40();
        let s = code.syndrome_of(&ts40_error());
        assert_eq!(s.bits, vec![1, 0, 1, 0]);
    }

    #[test]
    fn plain_parallel_oscillates_between_all_x_and_all_i() {
        let code = build_ts40();
        let syndrome = code.syndrome_of(&ts40_error());
        let model = NoiseModel::depolarizing(0.01).unwrap();
        let priors = PriorSet::uniform(&model, 4);
        let cfg = DecoderConfig::plain().with_iter_max(50);
        let (out, trace) = trace_decode(&code, &syndrome, &priors, &cfg).unwrap();
        assert!(!out.converged);
        assert_eq!(out.iterations, 50);
        // the limit cycle visits exactly the all-I and all-X states
        let all_i = PauliVector::identity(4);
        let all_x = PauliVector::parse("XXXX").unwrap();
        for hd in trace.hard_decisions() {
            assert!(hd == &all_i || hd == &all_x, "unexpected state {hd}");
        }
        assert_eq!(detect_oscillation(&trace, 8), Some(2));
    }

    #[test]
    fn traced_decode_is_transparent() {
        let code = build_ts40();
        let syndrome = code.syndrome_of(&ts40_error());
        let model = NoiseModel::depolarizing(0.01).unwrap();
        let priors = PriorSet::uniform(&model, 4);
        for cfg in [
            DecoderConfig::plain().with_iter_max(50),
            DecoderConfig::ewainit(0.5).serial().with_iter_max(50),
        ] {
            let plainly = decode(&code, &syndrome, &priors, &cfg).unwrap();
            let (traced, trace) = trace_decode(&code, &syndrome, &priors, &cfg).unwrap();
            assert_eq!(plainly.converged, traced.converged);
            assert_eq!(plainly.iterations, traced.iterations);
            assert_eq!(plainly.estimate, traced.estimate);
            assert_eq!(trace.len(), traced.iterations);
        }
    }

    #[test]
    fn detect_oscillation_on_synthetic_traces() {
        use crate::bp::{IterationRecord, LlrTriple};
        let states: Vec<PauliVector> = ["IIII", "XXXX", "ZZZZ"]
            .iter()
            .map(|s| PauliVector::parse(s).unwrap())
            .collect();
        let mk = |seq: &[usize]| IterationTrace {
            records: seq
                .iter()
                .map(|&i| IterationRecord {
                    hard_decision: states[i].clone(),
                    posteriors: vec![LlrTriple::zero(); 4],
                    msg_sums: vec![LlrTriple::zero(); 4],
                })
                .collect(),
        };
        // period-3 cycle
        let t = mk(&[0, 1, 2, 0, 1, 2, 0, 1, 2, 0, 1, 2]);
        assert_eq!(detect_oscillation(&t, 4), Some(3));
        // constant tail reports no oscillation
        let t = mk(&[0, 1, 0, 1, 2, 2, 2, 2, 2, 2]);
        assert_eq!(detect_oscillation(&t, 4), None);
        // alternating two states
        let t = mk(&[0, 1, 0, 1, 0, 1, 0, 1]);
        assert_eq!(detect_oscillation(&t, 4), Some(2));
    }

    #[test]
    fn cyclic_relabeling_preserves_parallel_behavior() {
        // shift the whole instance (qubits, checks, error) by k; parallel
        // scheduling is equivariant, so iteration counts and convergence
        // verdicts are invariant
        let model = NoiseModel::depolarizing(0.01).unwrap();
        for k in 0..4usize {
            let rows = (0..4)
                .map(|i| {
                    vec![
                        ((i + k) % 4, Pauli::Z),
                        ((i + k + 1) % 4, Pauli::Z),
                    ]
                })
                .collect();
            let code = CodeSpec::new("ts40-shift", 4, rows, vec![]).unwrap();
            let mut e = PauliVector::identity(4);
            e.set((1 + k) % 4, Pauli::X);
            e.set((2 + k) % 4, Pauli::X);
            let s = code.syndrome_of(&e);
            assert_eq!(s.bits, vec![1, 0, 1, 0]);
            let priors = PriorSet::uniform(&model, 4);
            for cfg in [
                DecoderConfig::plain().with_iter_max(50),
                DecoderConfig::adagrad(5.0).with_iter_max(50),
                DecoderConfig::ewainit(0.5).with_iter_max(50),
            ] {
                let out = decode(&code, &s, &priors, &cfg).unwrap();
                assert!(!out.converged, "shift {k} {:?}", cfg.variant);
                assert_eq!(out.iterations, 50);
            }
        }
    }

    #[test]
    fn bp_ots_breaks_the_set_at_t_plus_two() {
        let code = build_ts40();
        let syndrome = code.syndrome_of(&ts40_error());
        let model = NoiseModel::depolarizing(0.01).unwrap();
        let priors = PriorSet::uniform(&model, 4);
        for t in [3usize, 5, 9] {
            let cfg = DecoderConfig::bp_ots(t, 20.0).with_iter_max(50);
            let out = decode(&code, &syndrome, &priors, &cfg).unwrap();
            assert!(out.converged, "T={t}");
            assert_eq!(out.iterations, t + 2, "T={t}");
        }
    }

    #[test]
    fn bp_ots_with_period_beyond_iter_max_matches_plain() {
        let code = build_ts40();
        let syndrome = code.syndrome_of(&ts40_error());
        let model = NoiseModel::depolarizing(0.01).unwrap();
        let priors = PriorSet::uniform(&model, 4);
        let plain = decode(
            &code,
            &syndrome,
            &priors,
            &DecoderConfig::plain().with_iter_max(20).with_trace(),
        )
        .unwrap();
        let ots = decode(
            &code,
            &syndrome,
            &priors,
            &DecoderConfig::bp_ots(50, 20.0).with_iter_max(20).with_trace(),
        )
        .unwrap();
        assert_eq!(plain.converged, ots.converged);
        assert_eq!(plain.iterations, ots.iterations);
        for (a, b) in plain
            .trace
            .unwrap()
            .records
            .iter()
            .zip(&ots.trace.unwrap().records)
        {
            assert_eq!(a.hard_decision, b.hard_decision);
        }
    }

    #[test]
    fn trace_export_format() {
        let code = build_ts40();
        let syndrome = code.syndrome_of(&ts40_error());
        let model = NoiseModel::depolarizing(0.01).unwrap();
        let priors = PriorSet::uniform(&model, 4);
        let cfg = DecoderConfig::plain().with_iter_max(3);
        let (_, trace) = trace_decode(&code, &syndrome, &priors, &cfg).unwrap();
        let mut buf = Vec::new();
        write_trace(&trace, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "iteration,qubit,q_x,q_y,q_z,decision");
        assert_eq!(lines.len(), 1 + 3 * 4);
        assert!(lines[1].starts_with("1,0,"));
    }
}
