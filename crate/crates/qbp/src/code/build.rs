//! Code families: repetition seeds, the CSS hypergraph product, unrotated
//! toric and planar surface codes, and the XZZX surface code on a periodic
//! lattice.

use super::matrix::BinaryMatrix;
use super::CodeSpec;
use crate::pauli::Pauli;
use crate::QbpError;

/// Parity-check matrix of the `[n, 1]` repetition code. Periodic gives the
/// n x n circulant with 1s at (i,i) and (i,i+1 mod n); open gives the
/// (n-1) x n chain.
pub fn repetition_check(n: usize, periodic: bool) -> Result<BinaryMatrix, QbpError> {
    if n < 2 {
        return Err(QbpError::Construction(format!(
            "repetition code needs n >= 2, got {n}"
        )));
    }
    let rows = if periodic { n } else { n - 1 };
    let mut m = BinaryMatrix::new(rows, n);
    for i in 0..rows {
        m.set(i, i)?;
        m.set(i, (i + 1) % n)?;
    }
    Ok(m)
}

/// CSS hypergraph product of two classical parity-check matrices.
///
/// Qubits are laid out as block A (n1 x n2 grid, index `i*n2 + j`) followed
/// by block B (m1 x m2 grid, offset `n1*n2`, index `r*m2 + l`). X-checks are
/// `[H1 (x) I | I (x) H2^T]`, Z-checks `[I (x) H2 | H1^T (x) I]`.
pub fn hypergraph_product(h1: &BinaryMatrix, h2: &BinaryMatrix) -> Result<CodeSpec, QbpError> {
    let (m1, n1) = (h1.rows(), h1.cols());
    let (m2, n2) = (h2.rows(), h2.cols());
    let n = n1 * n2 + m1 * m2;
    let block_b = n1 * n2;
    let mut rows: Vec<Vec<(usize, Pauli)>> = Vec::with_capacity(m1 * n2 + n1 * m2);
    for r in 0..m1 {
        for j in 0..n2 {
            let mut row = Vec::new();
            for &c in h1.row(r) {
                row.push((c * n2 + j, Pauli::X));
            }
            for l in 0..m2 {
                if h2.get(l, j) {
                    row.push((block_b + r * m2 + l, Pauli::X));
                }
            }
            rows.push(row);
        }
    }
    for i in 0..n1 {
        for l in 0..m2 {
            let mut row = Vec::new();
            for &c in h2.row(l) {
                row.push((i * n2 + c, Pauli::Z));
            }
            for r in 0..m1 {
                if h1.get(r, i) {
                    row.push((block_b + r * m2 + l, Pauli::Z));
                }
            }
            rows.push(row);
        }
    }
    CodeSpec::new(format!("hgp-{m1}x{n1}-{m2}x{n2}"), n, rows, vec![])
}

/// `[[2L^2, 2, L]]` toric code: hypergraph product of two periodic
/// repetition codes.
pub fn build_toric(l: usize) -> Result<CodeSpec, QbpError> {
    if l < 2 {
        return Err(QbpError::Construction(format!("toric code needs L >= 2, got {l}")));
    }
    let h = repetition_check(l, true)?;
    let mut code = hypergraph_product(&h, &h)?;
    code.set_name(format!("toric-L{l}"));
    Ok(code)
}

/// `[[2L^2 - 2L + 1, 1, L]]` planar surface code: hypergraph product of two
/// open repetition codes.
pub fn build_planar(l: usize) -> Result<CodeSpec, QbpError> {
    if l < 2 {
        return Err(QbpError::Construction(format!("planar code needs L >= 2, got {l}")));
    }
    let h = repetition_check(l, false)?;
    let mut code = hypergraph_product(&h, &h)?;
    code.set_name(format!("planar-L{l}"));
    Ok(code)
}

/// XZZX surface code on an L x L periodic lattice: one weight-4 stabilizer
/// per plaquette, applying X to the (i,j)/(i+1,j+1) diagonal and Z to the
/// (i,j+1)/(i+1,j) anti-diagonal.
///
/// All plaquettes commute for every L; the rank leaves K = 2 when L is even
/// and K = 1 when L is odd (an odd-order translation group admits no second
/// stabilizer product relation). Construction fails if validation does.
pub fn build_xzzx(l: usize) -> Result<CodeSpec, QbpError> {
    if l < 2 {
        return Err(QbpError::Construction(format!("XZZX code needs L >= 2, got {l}")));
    }
    let n = l * l;
    let q = |i: usize, j: usize| (i % l) * l + (j % l);
    let mut rows = Vec::with_capacity(n);
    for i in 0..l {
        for j in 0..l {
            rows.push(vec![
                (q(i, j), Pauli::X),
                (q(i, j + 1), Pauli::Z),
                (q(i + 1, j), Pauli::Z),
                (q(i + 1, j + 1), Pauli::X),
            ]);
        }
    }
    let mut code = CodeSpec::new(format!("xzzx-L{l}"), n, rows, vec![])?;
    code.validate()?;
    code.set_name(format!("xzzx-L{l}"));
    Ok(code)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{gf2_rank, symplectic_bits, BitVec};

    #[test]
    fn repetition_shapes_and_ranks() {
        let p = repetition_check(3, true).unwrap();
        assert_eq!((p.rows(), p.cols()), (3, 3));
        assert_eq!(p.rank(), 2);
        let o = repetition_check(3, false).unwrap();
        assert_eq!((o.rows(), o.cols()), (2, 3));
        assert_eq!(o.rank(), 2);
        let p5 = repetition_check(5, true).unwrap();
        for r in 0..5 {
            assert_eq!(p5.row_weight(r), 2);
        }
        assert_eq!(p5.col_weights(), vec![2; 5]);
        assert!(repetition_check(1, true).is_err());
    }

    #[test]
    fn toric_parameters() {
        for l in 2..=5 {
            let code = build_toric(l).unwrap();
            assert_eq!(code.n_qubits(), 2 * l * l, "L={l}");
            assert_eq!(code.n_logical(), 2, "L={l}");
            let report = code.validate().unwrap();
            assert_eq!(report.k, 2);
        }
    }

    #[test]
    fn toric_l4_all_weights_four() {
        let code = build_toric(4).unwrap();
        assert_eq!(code.n_qubits(), 32);
        for row in code.rows() {
            assert_eq!(row.len(), 4);
        }
        // every qubit has Tanner degree 4
        let report = code.validate().unwrap();
        assert_eq!(report.col_weight_hist[4], 32);
    }

    #[test]
    fn planar_parameters() {
        for l in 2..=9 {
            let code = build_planar(l).unwrap();
            assert_eq!(code.n_qubits(), 2 * l * l - 2 * l + 1, "L={l}");
            assert_eq!(code.n_logical(), 1, "L={l}");
        }
    }

    #[test]
    fn planar_matches_generic_hgp_parameters() {
        for l in 2..=9 {
            let h = repetition_check(l, false).unwrap();
            let hgp = hypergraph_product(&h, &h).unwrap();
            let planar = build_planar(l).unwrap();
            assert_eq!(hgp.n_qubits(), planar.n_qubits());
            assert_eq!(hgp.n_logical(), planar.n_logical());
        }
    }

    #[test]
    fn planar_boundary_degrees() {
        let code = build_planar(3).unwrap();
        let report = code.validate().unwrap();
        // boundary qubits touch 2 or 3 checks, interior ones 4
        assert_eq!(report.col_weight_hist.len(), 5);
        assert!(report.col_weight_hist[2] > 0);
        assert!(report.col_weight_hist[3] > 0);
        assert_eq!(report.col_weight_hist[0] + report.col_weight_hist[1], 0);
    }

    #[test]
    fn hgp_k_matches_independent_rank_oracle() {
        let h1 = repetition_check(4, true).unwrap();
        let h2 = repetition_check(3, false).unwrap();
        let code = hypergraph_product(&h1, &h2).unwrap();
        let n = code.n_qubits();
        let dense: Vec<BitVec> = (0..code.n_checks())
            .map(|i| symplectic_bits(code.row_operator(i), n))
            .collect();
        let rank = gf2_rank(dense);
        assert_eq!(code.n_logical(), n - rank);
        code.validate().unwrap();
    }

    #[test]
    fn xzzx_parameters_and_commutation() {
        for l in 2..=7 {
            let code = build_xzzx(l).unwrap();
            assert_eq!(code.n_qubits(), l * l);
            for row in code.rows() {
                assert_eq!(row.len(), 4);
            }
            let expected_k = if l % 2 == 0 { 2 } else { 1 };
            assert_eq!(code.n_logical(), expected_k, "L={l}");
            code.validate().unwrap();
        }
    }
}
