//! Syndrome-mismatch energy function and its exact gradient.
//!
//! `J(Q) = -sum_i 2 atanh((-1)^{s_i} prod_{j in N(c_i)} tanh(lambda_{H_ij}(Q_j)/2))`.
//! Each BP posterior update acts like one gradient-descent step on J with a
//! simplified step size; the exact gradient here serves as a test oracle for
//! that correspondence.

use super::{LlrTriple, EPS_TANH};
use crate::code::TannerGraph;
use crate::pauli::{Pauli, Syndrome};

/// Raw lambda without clamping; the energy oracle needs the smooth value.
fn lambda_raw(h: Pauli, t: LlrTriple) -> f64 {
    let (a, b) = match h {
        Pauli::X => (t.y, t.z),
        Pauli::Y => (t.x, t.z),
        Pauli::Z => (t.x, t.y),
        Pauli::I => unreachable!(),
    };
    let num = (-t.get(h)).exp().ln_1p();
    let (hi, lo) = if -a >= -b { (-a, -b) } else { (-b, -a) };
    num - (hi + (lo - hi).exp().ln_1p())
}

pub fn energy(graph: &TannerGraph, syndrome: &Syndrome, q: &[LlrTriple]) -> f64 {
    let bound = 1.0 - EPS_TANH;
    let mut j_total = 0.0;
    for i in 0..graph.n_checks {
        let mut prod = if syndrome.bits[i] == 1 { -1.0 } else { 1.0 };
        for e in graph.check_edges(i) {
            prod *= (lambda_raw(graph.edge_pauli(e), q[graph.edge_qubit(e)]) / 2.0).tanh();
        }
        j_total -= 2.0 * prod.clamp(-bound, bound).atanh();
    }
    j_total
}

/// Exact partial derivatives of [`energy`] with respect to every posterior
/// component, including both the anticommuting ratio terms and the
/// commuting-component terms of the lambda derivative.
pub fn energy_gradient(graph: &TannerGraph, syndrome: &Syndrome, q: &[LlrTriple]) -> Vec<LlrTriple> {
    let mut grad = vec![LlrTriple::zero(); graph.n_qubits];
    let mut lambdas: Vec<f64> = Vec::new();
    let mut tanhs: Vec<f64> = Vec::new();
    for i in 0..graph.n_checks {
        let range = graph.check_edges(i);
        lambdas.clear();
        tanhs.clear();
        for e in range.clone() {
            let l = lambda_raw(graph.edge_pauli(e), q[graph.edge_qubit(e)]);
            lambdas.push(l);
            tanhs.push((l / 2.0).tanh());
        }
        let sgn = if syndrome.bits[i] == 1 { -1.0 } else { 1.0 };
        let p_full: f64 = sgn * tanhs.iter().product::<f64>();
        for (k, e) in range.enumerate() {
            let j = graph.edge_qubit(e);
            let h = graph.edge_pauli(e);
            // product over the other edges, syndrome sign included
            let m_tilde = if tanhs[k] != 0.0 {
                p_full / tanhs[k]
            } else {
                sgn * tanhs
                    .iter()
                    .enumerate()
                    .filter(|&(k2, _)| k2 != k)
                    .map(|(_, t)| t)
                    .product::<f64>()
            };
            let prefactor =
                -2.0 / (1.0 - p_full * p_full) * m_tilde * 0.5 * (1.0 - tanhs[k] * tanhs[k]);
            let u = q[j].map(|v| (-v).exp());
            let uh = u.get(h);
            let denom_a = 1.0 + uh;
            let denom_b = u.x + u.y + u.z - uh;
            for w in Pauli::XYZ {
                let dl = if w == h {
                    -uh / denom_a
                } else {
                    u.get(w) / denom_b
                };
                let g = grad[j].get(w) + prefactor * dl;
                grad[j].set(w, g);
            }
        }
    }
    grad
}
