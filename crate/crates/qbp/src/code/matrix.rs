//! GF(2) matrices: a sparse form for classical seed codes and a bit-packed
//! dense form for rank, kernel, and row-space reductions.

use crate::QbpError;

/// Sparse binary matrix over GF(2), stored as sorted column indices per row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<usize>>,
}

impl BinaryMatrix {
    pub fn new(rows: usize, cols: usize) -> BinaryMatrix {
        BinaryMatrix {
            rows,
            cols,
            entries: vec![Vec::new(); rows],
        }
    }

    pub fn from_rows(rows: usize, cols: usize, ones: &[(usize, usize)]) -> Result<BinaryMatrix, QbpError> {
        let mut m = BinaryMatrix::new(rows, cols);
        for &(r, c) in ones {
            m.set(r, c)?;
        }
        Ok(m)
    }

    pub fn set(&mut self, r: usize, c: usize) -> Result<(), QbpError> {
        if r >= self.rows || c >= self.cols {
            return Err(QbpError::Construction(format!(
                "entry ({r},{c}) out of bounds for {}x{}",
                self.rows, self.cols
            )));
        }
        let row = &mut self.entries[r];
        match row.binary_search(&c) {
            Ok(_) => {}
            Err(pos) => row.insert(pos, c),
        }
        Ok(())
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.entries[r].binary_search(&c).is_ok()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[usize] {
        &self.entries[r]
    }

    pub fn row_weight(&self, r: usize) -> usize {
        self.entries[r].len()
    }

    pub fn col_weights(&self) -> Vec<usize> {
        let mut w = vec![0; self.cols];
        for row in &self.entries {
            for &c in row {
                w[c] += 1;
            }
        }
        w
    }

    pub fn rank(&self) -> usize {
        let dense: Vec<BitVec> = (0..self.rows)
            .map(|r| {
                let mut v = BitVec::zeros(self.cols);
                for &c in &self.entries[r] {
                    v.set(c, true);
                }
                v
            })
            .collect();
        gf2_rank(dense)
    }
}

/// Bit-packed GF(2) row vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitVec {
    pub words: Vec<u64>,
    len: usize,
}

impl BitVec {
    pub fn zeros(len: usize) -> BitVec {
        BitVec {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: bool) {
        let (w, b) = (i / 64, i % 64);
        if v {
            self.words[w] |= 1 << b;
        } else {
            self.words[w] &= !(1 << b);
        }
    }

    #[inline]
    pub fn xor_assign(&mut self, other: &BitVec) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn first_one(&self) -> Option<usize> {
        for (wi, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(wi * 64 + w.trailing_zeros() as usize);
            }
        }
        None
    }

    /// Dot product over GF(2).
    pub fn dot(&self, other: &BitVec) -> u8 {
        let mut acc = 0u32;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= (a & b).count_ones();
        }
        (acc & 1) as u8
    }
}

/// Rank of a set of GF(2) row vectors (consumes the rows).
pub fn gf2_rank(rows: Vec<BitVec>) -> usize {
    reduce_basis(rows).len()
}

/// Reduce rows to an independent basis, each with a distinct leading column.
pub fn reduce_basis(rows: Vec<BitVec>) -> Vec<BitVec> {
    let mut basis: Vec<BitVec> = Vec::new();
    for mut row in rows {
        loop {
            let Some(lead) = row.first_one() else { break };
            match basis.iter().find(|b| b.first_one() == Some(lead)) {
                Some(b) => {
                    let b = b.clone();
                    row.xor_assign(&b);
                }
                None => {
                    basis.push(row);
                    break;
                }
            }
        }
    }
    basis.sort_by_key(|b| b.first_one());
    basis
}

/// Reduce `v` modulo the span of `basis` (basis rows must have distinct
/// leading columns, as produced by [`reduce_basis`]).
pub fn reduce_mod(v: &mut BitVec, basis: &[BitVec]) {
    loop {
        let Some(lead) = v.first_one() else { return };
        match basis.iter().find(|b| b.first_one() == Some(lead)) {
            Some(b) => v.xor_assign(b),
            None => return,
        }
    }
}

/// Basis of the nullspace { v : A v = 0 } of an m x n GF(2) matrix given by
/// its rows.
pub fn nullspace(rows: &[BitVec], n: usize) -> Vec<BitVec> {
    // Gauss-Jordan on a working copy, tracking pivot columns.
    let mut work: Vec<BitVec> = rows.to_vec();
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; n];
    let mut pivot_rows: Vec<usize> = Vec::new();
    let mut next = 0usize;
    for col in 0..n {
        let Some(r) = (next..work.len()).find(|&r| work[r].get(col)) else {
            continue;
        };
        work.swap(next, r);
        let pivot = work[next].clone();
        for (r2, row) in work.iter_mut().enumerate() {
            if r2 != next && row.get(col) {
                row.xor_assign(&pivot);
            }
        }
        pivot_of_col[col] = Some(next);
        pivot_rows.push(col);
        next += 1;
        if next == work.len() {
            break;
        }
    }
    let mut basis = Vec::new();
    for free in 0..n {
        if pivot_of_col[free].is_some() {
            continue;
        }
        let mut v = BitVec::zeros(n);
        v.set(free, true);
        for (&pcol, &prow) in pivot_rows.iter().zip(pivot_of_col.iter().flatten()) {
            if work[prow].get(free) {
                v.set(pcol, true);
            }
        }
        basis.push(v);
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bv(bits: &[u8]) -> BitVec {
        let mut v = BitVec::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b == 1);
        }
        v
    }

    #[test]
    fn rank_of_circulant() {
        // n x n circulant with 1s at (i,i),(i,i+1) has rank n-1
        for n in [3usize, 5, 8] {
            let mut m = BinaryMatrix::new(n, n);
            for i in 0..n {
                m.set(i, i).unwrap();
                m.set(i, (i + 1) % n).unwrap();
            }
            assert_eq!(m.rank(), n - 1);
        }
    }

    #[test]
    fn rank_of_chain() {
        let mut m = BinaryMatrix::new(2, 3);
        m.set(0, 0).unwrap();
        m.set(0, 1).unwrap();
        m.set(1, 1).unwrap();
        m.set(1, 2).unwrap();
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn nullspace_members_annihilate() {
        let rows = vec![bv(&[1, 1, 0, 1]), bv(&[0, 1, 1, 0])];
        let ns = nullspace(&rows, 4);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            for r in &rows {
                assert_eq!(r.dot(v), 0);
            }
        }
    }

    #[test]
    fn reduce_mod_row_space() {
        let basis = reduce_basis(vec![bv(&[1, 1, 0]), bv(&[0, 1, 1])]);
        let mut v = bv(&[1, 0, 1]); // sum of the two rows
        reduce_mod(&mut v, &basis);
        assert!(v.is_zero());
        let mut w = bv(&[1, 0, 0]);
        reduce_mod(&mut w, &basis);
        assert!(!w.is_zero());
    }

    #[test]
    fn out_of_bounds_entry_rejected() {
        let mut m = BinaryMatrix::new(2, 2);
        assert!(m.set(0, 2).is_err());
        assert!(m.set(2, 0).is_err());
    }
}
