//! Stabilizer codes as sparse GF(4) check matrices, plus the Tanner-graph
//! view consumed by the decoders.

mod build;
mod io;
mod logicals;
mod matrix;

pub use build::{build_planar, build_toric, build_xzzx, hypergraph_product, repetition_check};
pub use io::{load_code, save_code};
pub use logicals::compute_logicals;
pub use matrix::{gf2_rank, nullspace, reduce_basis, reduce_mod, BinaryMatrix, BitVec};

use crate::pauli::{commute, Pauli, PauliVector, Syndrome};
use crate::QbpError;

/// How a residual operator relates to the code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResidualClass {
    /// Zero syndrome and commutes with every logical: an element of the
    /// stabilizer group (degenerate success).
    InStabilizer,
    /// Zero syndrome but anticommutes with some logical operator.
    Logical,
    /// Nonzero syndrome.
    Detected,
}

/// A stabilizer code: M sparse GF(4) check rows over N qubits, logical
/// operator pairs, and `[[N, K, D]]` metadata (D optional).
#[derive(Debug, Clone)]
pub struct CodeSpec {
    name: String,
    n_qubits: usize,
    n_logical: usize,
    distance: Option<usize>,
    /// Per-check entries, sorted by qubit index. Identity entries are absent.
    rows: Vec<Vec<(usize, Pauli)>>,
    /// Bit-packed row supports for word-parallel syndrome extraction.
    row_ops: Vec<PauliVector>,
    /// Logical pairs, each (anti)commuting as a symplectic pair.
    logicals: Vec<(PauliVector, PauliVector)>,
}

/// Summary returned by [`CodeSpec::validate`].
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub n: usize,
    pub k: usize,
    pub rank: usize,
    /// Histogram over row weights: `row_weight_hist[w]` rows have weight `w`.
    pub row_weight_hist: Vec<usize>,
    pub col_weight_hist: Vec<usize>,
}

impl CodeSpec {
    /// Build a code from sparse check rows. `logicals` may be empty, in which
    /// case they are computed from the GF(2) kernel of the symplectic form.
    pub fn new(
        name: impl Into<String>,
        n_qubits: usize,
        rows: Vec<Vec<(usize, Pauli)>>,
        logicals: Vec<(PauliVector, PauliVector)>,
    ) -> Result<CodeSpec, QbpError> {
        let mut sorted_rows = rows;
        for (i, row) in sorted_rows.iter_mut().enumerate() {
            row.sort_by_key(|&(c, _)| c);
            for w in row.windows(2) {
                if w[0].0 == w[1].0 {
                    return Err(QbpError::Construction(format!(
                        "duplicate entry for qubit {} in check {i}",
                        w[0].0
                    )));
                }
            }
            if let Some(&(c, _)) = row.last() {
                if c >= n_qubits {
                    return Err(QbpError::Construction(format!(
                        "check {i} references qubit {c} but N = {n_qubits}"
                    )));
                }
            }
            if row.iter().any(|&(_, p)| p == Pauli::I) {
                return Err(QbpError::Construction(format!(
                    "check {i} contains an explicit identity entry"
                )));
            }
        }
        let row_ops: Vec<PauliVector> = sorted_rows
            .iter()
            .map(|row| {
                let mut v = PauliVector::identity(n_qubits);
                for &(c, p) in row {
                    v.set(c, p);
                }
                v
            })
            .collect();
        let rank = symplectic_rank(&row_ops, n_qubits);
        // anticommuting row sets can exceed rank N; validate() rejects them
        let k = n_qubits.saturating_sub(rank);
        let logicals = if logicals.is_empty() && k > 0 {
            logicals::compute_logicals(&row_ops, n_qubits, k)?
        } else {
            logicals
        };
        Ok(CodeSpec {
            name: name.into(),
            n_qubits,
            n_logical: k,
            distance: None,
            rows: sorted_rows,
            row_ops,
            logicals,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_checks(&self) -> usize {
        self.rows.len()
    }

    pub fn n_logical(&self) -> usize {
        self.n_logical
    }

    pub fn distance(&self) -> Option<usize> {
        self.distance
    }

    pub fn set_distance(&mut self, d: Option<usize>) {
        self.distance = d;
    }

    pub fn row(&self, i: usize) -> &[(usize, Pauli)] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Vec<(usize, Pauli)>] {
        &self.rows
    }

    /// Check row `i` as a Pauli operator.
    pub fn row_operator(&self, i: usize) -> &PauliVector {
        &self.row_ops[i]
    }

    pub fn logicals(&self) -> &[(PauliVector, PauliVector)] {
        &self.logicals
    }

    pub fn set_logicals(&mut self, logicals: Vec<(PauliVector, PauliVector)>) {
        self.n_logical = logicals.len();
        self.logicals = logicals;
    }

    /// Syndrome of an error pattern: bit `i` is the symplectic inner product
    /// of check `i` with `e`.
    pub fn syndrome_of(&self, e: &PauliVector) -> Syndrome {
        debug_assert_eq!(e.len(), self.n_qubits);
        let bits = self
            .row_ops
            .iter()
            .map(|row| {
                let mut acc = 0u32;
                for i in 0..row.x_words().len() {
                    acc ^= (row.x_words()[i] & e.z_words()[i]).count_ones()
                        ^ (row.z_words()[i] & e.x_words()[i]).count_ones();
                }
                (acc & 1) as u8
            })
            .collect();
        Syndrome { bits }
    }

    /// Classify a residual operator (typically `estimate * error`).
    pub fn classify_residual(&self, r: &PauliVector) -> Result<ResidualClass, QbpError> {
        if !self.syndrome_of(r).is_zero() {
            return Ok(ResidualClass::Detected);
        }
        if self.logicals.is_empty() {
            return Err(QbpError::MissingLogicals);
        }
        for (a, b) in &self.logicals {
            if r.commutation(a) == 1 || r.commutation(b) == 1 {
                return Ok(ResidualClass::Logical);
            }
        }
        Ok(ResidualClass::InStabilizer)
    }

    /// Assert every structural invariant; on success return rank, K, and
    /// weight histograms. The first violated invariant is reported with the
    /// offending indices.
    pub fn validate(&self) -> Result<ValidationReport, QbpError> {
        let m = self.rows.len();
        for a in 0..m {
            for b in (a + 1)..m {
                if self.row_ops[a].commutation(&self.row_ops[b]) == 1 {
                    return Err(QbpError::CommutationViolation { row_a: a, row_b: b });
                }
            }
        }
        let rank = symplectic_rank(&self.row_ops, self.n_qubits);
        let computed_k = self.n_qubits.saturating_sub(rank);
        if computed_k != self.n_logical {
            return Err(QbpError::KMismatch {
                stored: self.n_logical,
                computed: computed_k,
            });
        }
        for (pi, (a, b)) in self.logicals.iter().enumerate() {
            for (op, half) in [(a, 0), (b, 1)] {
                if !self.syndrome_of(op).is_zero() {
                    let row = self
                        .syndrome_of(op)
                        .bits
                        .iter()
                        .position(|&s| s == 1)
                        .unwrap_or(0);
                    return Err(QbpError::LogicalAgainstCheck {
                        index: 2 * pi + half,
                        row,
                    });
                }
            }
            if a.commutation(b) != 1 {
                return Err(QbpError::LogicalPairing { pair: pi });
            }
        }
        for pi in 0..self.logicals.len() {
            for pj in (pi + 1)..self.logicals.len() {
                let (ai, bi) = &self.logicals[pi];
                let (aj, bj) = &self.logicals[pj];
                if ai.commutation(aj) == 1
                    || ai.commutation(bj) == 1
                    || bi.commutation(aj) == 1
                    || bi.commutation(bj) == 1
                {
                    return Err(QbpError::LogicalCrossTalk {
                        pair_a: pi,
                        pair_b: pj,
                    });
                }
            }
        }
        let max_row = self.rows.iter().map(Vec::len).max().unwrap_or(0);
        let mut row_weight_hist = vec![0; max_row + 1];
        for row in &self.rows {
            row_weight_hist[row.len()] += 1;
        }
        let mut col_w = vec![0usize; self.n_qubits];
        for row in &self.rows {
            for &(c, _) in row {
                col_w[c] += 1;
            }
        }
        let max_col = col_w.iter().copied().max().unwrap_or(0);
        let mut col_weight_hist = vec![0; max_col + 1];
        for w in col_w {
            col_weight_hist[w] += 1;
        }
        Ok(ValidationReport {
            n: self.n_qubits,
            k: computed_k,
            rank,
            row_weight_hist,
            col_weight_hist,
        })
    }

    /// Degree of qubit `j` in the Tanner graph.
    pub fn qubit_degree(&self, j: usize) -> usize {
        self.rows.iter().filter(|row| row.iter().any(|&(c, _)| c == j)).count()
    }
}

/// GF(2) rank of the symplectic representation `[X | Z]` of the checks.
pub fn symplectic_rank(rows: &[PauliVector], n: usize) -> usize {
    let dense: Vec<BitVec> = rows.iter().map(|r| symplectic_bits(r, n)).collect();
    gf2_rank(dense)
}

/// Pack an operator into a length-2N bit vector laid out as `[x | z]`.
pub fn symplectic_bits(op: &PauliVector, n: usize) -> BitVec {
    let mut v = BitVec::zeros(2 * n);
    for j in 0..n {
        let p = op.get(j);
        if p.x_bit() == 1 {
            v.set(j, true);
        }
        if p.z_bit() == 1 {
            v.set(n + j, true);
        }
    }
    v
}

/// Inverse of [`symplectic_bits`].
pub fn operator_from_bits(v: &BitVec, n: usize) -> PauliVector {
    let mut op = PauliVector::identity(n);
    for j in 0..n {
        op.set(j, Pauli::from_bits(u64::from(v.get(j)), u64::from(v.get(n + j))));
    }
    op
}

/// Symplectic inner product of two `[x | z]` bit vectors.
pub fn symplectic_dot(a: &BitVec, b: &BitVec, n: usize) -> u8 {
    let mut acc = 0u8;
    for j in 0..n {
        acc ^= (a.get(j) & b.get(n + j)) as u8;
        acc ^= (a.get(n + j) & b.get(j)) as u8;
    }
    acc
}

/// Sparse Tanner graph with a flat edge arena: check-major CSR plus a
/// qubit-major view over the same edge ids.
#[derive(Debug, Clone)]
pub struct TannerGraph {
    pub n_checks: usize,
    pub n_qubits: usize,
    check_ptr: Vec<u32>,
    edge_qubit: Vec<u32>,
    edge_check: Vec<u32>,
    edge_pauli: Vec<Pauli>,
    qubit_ptr: Vec<u32>,
    qubit_edges: Vec<u32>,
}

impl TannerGraph {
    pub fn from_code(code: &CodeSpec) -> TannerGraph {
        let m = code.n_checks();
        let n = code.n_qubits();
        let mut check_ptr = Vec::with_capacity(m + 1);
        let mut edge_qubit = Vec::new();
        let mut edge_check = Vec::new();
        let mut edge_pauli = Vec::new();
        check_ptr.push(0);
        for (i, row) in code.rows().iter().enumerate() {
            for &(c, p) in row {
                edge_qubit.push(c as u32);
                edge_check.push(i as u32);
                edge_pauli.push(p);
            }
            check_ptr.push(edge_qubit.len() as u32);
        }
        let mut qubit_ptr = vec![0u32; n + 1];
        for &q in &edge_qubit {
            qubit_ptr[q as usize + 1] += 1;
        }
        for j in 0..n {
            qubit_ptr[j + 1] += qubit_ptr[j];
        }
        let mut fill = qubit_ptr.clone();
        let mut qubit_edges = vec![0u32; edge_qubit.len()];
        // edge ids ascend with check index, so each qubit's list is in
        // ascending check order
        for (eid, &q) in edge_qubit.iter().enumerate() {
            qubit_edges[fill[q as usize] as usize] = eid as u32;
            fill[q as usize] += 1;
        }
        TannerGraph {
            n_checks: m,
            n_qubits: n,
            check_ptr,
            edge_qubit,
            edge_check,
            edge_pauli,
            qubit_ptr,
            qubit_edges,
        }
    }

    pub fn n_edges(&self) -> usize {
        self.edge_qubit.len()
    }

    /// Edge ids of check `i`, in ascending qubit order.
    #[inline]
    pub fn check_edges(&self, i: usize) -> std::ops::Range<usize> {
        self.check_ptr[i] as usize..self.check_ptr[i + 1] as usize
    }

    /// Edge ids of qubit `j`, in ascending check order.
    #[inline]
    pub fn qubit_edges(&self, j: usize) -> &[u32] {
        &self.qubit_edges[self.qubit_ptr[j] as usize..self.qubit_ptr[j + 1] as usize]
    }

    #[inline]
    pub fn edge_qubit(&self, eid: usize) -> usize {
        self.edge_qubit[eid] as usize
    }

    #[inline]
    pub fn edge_check(&self, eid: usize) -> usize {
        self.edge_check[eid] as usize
    }

    #[inline]
    pub fn edge_pauli(&self, eid: usize) -> Pauli {
        self.edge_pauli[eid]
    }

    /// 1 iff error symbol `w` flips the parity seen by edge `eid`.
    #[inline]
    pub fn edge_anticommutes(&self, eid: usize, w: Pauli) -> bool {
        commute(w, self.edge_pauli[eid]) == 1
    }

    /// Girth of the bipartite graph (length of its shortest cycle), found by
    /// BFS from every check node. Returns `None` for forests.
    pub fn girth(&self) -> Option<usize> {
        // node ids: checks 0..m, qubits m..m+n
        let m = self.n_checks;
        let total = m + self.n_qubits;
        let neighbors = |u: usize| -> Vec<usize> {
            if u < m {
                self.check_edges(u).map(|e| m + self.edge_qubit(e)).collect()
            } else {
                self.qubit_edges(u - m)
                    .iter()
                    .map(|&e| self.edge_check(e as usize))
                    .collect()
            }
        };
        let mut best: Option<usize> = None;
        for start in 0..total {
            let mut dist = vec![usize::MAX; total];
            let mut parent = vec![usize::MAX; total];
            let mut queue = std::collections::VecDeque::new();
            dist[start] = 0;
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                for v in neighbors(u) {
                    if dist[v] == usize::MAX {
                        dist[v] = dist[u] + 1;
                        parent[v] = u;
                        queue.push_back(v);
                    } else if parent[u] != v {
                        let cycle = dist[u] + dist[v] + 1;
                        if best.is_none_or(|b| cycle < b) {
                            best = Some(cycle);
                        }
                    }
                }
            }
        }
        best
    }
}

/// Smallest weight of a zero-syndrome pattern that anticommutes with some
/// logical, searching all patterns of weight at most `max_weight`. Brute
/// force; feasible only for small codes.
pub fn min_logical_weight(code: &CodeSpec, max_weight: usize) -> Option<usize> {
    let n = code.n_qubits();
    let mut pattern = PauliVector::identity(n);
    fn rec(
        code: &CodeSpec,
        pattern: &mut PauliVector,
        start: usize,
        left: usize,
    ) -> bool {
        if left == 0 {
            return code.syndrome_of(pattern).is_zero()
                && matches!(code.classify_residual(pattern), Ok(ResidualClass::Logical));
        }
        let n = code.n_qubits();
        if start + left > n {
            return false;
        }
        for j in start..=(n - left) {
            for p in Pauli::XYZ {
                pattern.set(j, p);
                if rec(code, pattern, j + 1, left - 1) {
                    return true;
                }
            }
            pattern.set(j, Pauli::I);
        }
        false
    }
    (1..=max_weight).find(|&w| rec(code, &mut pattern, 0, w))
}
