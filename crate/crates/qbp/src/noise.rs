//! I.i.d. Pauli channels and the prior LLR triples they induce.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bp::LlrTriple;
use crate::pauli::{Pauli, PauliVector};
use crate::QbpError;

/// Probability floor for bias components when converting to LLRs; keeps the
/// lambda function finite on pure-bias channels.
const P_FLOOR: f64 = 1e-12;

/// Memoryless Pauli channel: total error probability and an (X, Y, Z) bias
/// that sums to one. Per-qubit probabilities are `p_W = p_total * eta_W`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub p_total: f64,
    pub bias: (f64, f64, f64),
}

impl NoiseModel {
    /// Equal X/Y/Z likelihood, `p/3` each.
    pub fn depolarizing(p_total: f64) -> Result<NoiseModel, QbpError> {
        NoiseModel::biased(p_total, (1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0))
    }

    pub fn biased(p_total: f64, bias: (f64, f64, f64)) -> Result<NoiseModel, QbpError> {
        if !(0.0..1.0).contains(&p_total) {
            return Err(QbpError::Config(format!(
                "p_total must lie in [0, 1), got {p_total}"
            )));
        }
        let (x, y, z) = bias;
        if x < 0.0 || y < 0.0 || z < 0.0 || (x + y + z - 1.0).abs() > 1e-9 {
            return Err(QbpError::Config(format!(
                "bias must be nonnegative and sum to 1, got {bias:?}"
            )));
        }
        Ok(NoiseModel { p_total, bias })
    }

    pub fn p_x(&self) -> f64 {
        self.p_total * self.bias.0
    }

    pub fn p_y(&self) -> f64 {
        self.p_total * self.bias.1
    }

    pub fn p_z(&self) -> f64 {
        self.p_total * self.bias.2
    }

    /// Channel prior expressed as one LLR triple, `Pi_W = ln((1-p_W)/p_W)`
    /// componentwise, identical for every qubit. Zero components are floored
    /// at `1e-12` before the log.
    pub fn priors(&self) -> LlrTriple {
        let llr = |p: f64| {
            let p = p.max(P_FLOOR);
            ((1.0 - p) / p).ln()
        };
        LlrTriple::new(llr(self.p_x()), llr(self.p_y()), llr(self.p_z()))
    }
}

/// Deterministic per-trial randomness: `(master_seed, stream_index)` fully
/// determines the sampled error, independent of worker count or platform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngStream {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_index: u64) -> RngStream {
        RngStream {
            master_seed,
            stream_index,
        }
    }

    fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_index);
        rng
    }
}

/// Draw an i.i.d. Pauli error of length `n` from the channel.
pub fn sample_error(model: &NoiseModel, n: usize, stream: RngStream) -> PauliVector {
    let mut rng = stream.rng();
    let (px, py) = (model.p_x(), model.p_y());
    let p_total = model.p_total;
    let mut e = PauliVector::identity(n);
    for j in 0..n {
        let u: f64 = rng.random();
        if u < p_total {
            let p = if u < px {
                Pauli::X
            } else if u < px + py {
                Pauli::Y
            } else {
                Pauli::Z
            };
            e.set(j, p);
        }
    }
    e
}

/// Channel prior triple, exposed as a free function to mirror the channel
/// API surface.
pub fn priors_from_channel(model: &NoiseModel) -> LlrTriple {
    model.priors()
}

/// Per-qubit prior triples. Uniform when derived from a channel, but kept
/// per-qubit so codes with site-dependent priors use the same path.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorSet {
    triples: Vec<LlrTriple>,
}

impl PriorSet {
    pub fn uniform(model: &NoiseModel, n: usize) -> PriorSet {
        PriorSet {
            triples: vec![model.priors(); n],
        }
    }

    pub fn from_triples(triples: Vec<LlrTriple>) -> PriorSet {
        PriorSet { triples }
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn as_slice(&self) -> &[LlrTriple] {
        &self.triples
    }
}

impl std::ops::Index<usize> for PriorSet {
    type Output = LlrTriple;

    fn index(&self, j: usize) -> &LlrTriple {
        &self.triples[j]
    }
}
