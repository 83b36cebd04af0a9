//! Logical operator extraction: GF(2) kernel of the symplectic form, reduced
//! modulo the stabilizer row space, paired by symplectic Gram-Schmidt, then
//! greedily weight-minimized over stabilizer additions.

use super::matrix::{nullspace, reduce_basis, reduce_mod, BitVec};
use super::{operator_from_bits, symplectic_bits, symplectic_dot};
use crate::pauli::PauliVector;
use crate::QbpError;

pub fn compute_logicals(
    rows: &[PauliVector],
    n: usize,
    k: usize,
) -> Result<Vec<(PauliVector, PauliVector)>, QbpError> {
    if k == 0 {
        return Ok(Vec::new());
    }
    let stab: Vec<BitVec> = rows.iter().map(|r| symplectic_bits(r, n)).collect();
    // commutation with (hx|hz) is a GF(2) dot with the swapped vector (hz|hx)
    let constraints: Vec<BitVec> = stab
        .iter()
        .map(|row| {
            let mut sw = BitVec::zeros(2 * n);
            for j in 0..n {
                sw.set(j, row.get(n + j));
                sw.set(n + j, row.get(j));
            }
            sw
        })
        .collect();
    let normalizer = nullspace(&constraints, 2 * n);
    let stab_basis = reduce_basis(stab);

    // quotient N(S) / S: representatives independent modulo the joint span
    // of the stabilizers and the representatives picked so far
    let mut reps: Vec<BitVec> = Vec::new();
    let mut joint = stab_basis.clone();
    for v in normalizer {
        let mut r = v;
        reduce_mod(&mut r, &joint);
        if !r.is_zero() {
            let lead = r.first_one();
            let pos = joint.partition_point(|b| b.first_one() < lead);
            joint.insert(pos, r.clone());
            reps.push(r);
            if reps.len() == 2 * k {
                break;
            }
        }
    }
    if reps.len() != 2 * k {
        return Err(QbpError::Construction(format!(
            "expected {} logical representatives, found {}",
            2 * k,
            reps.len()
        )));
    }

    // symplectic Gram-Schmidt: peel off anticommuting pairs and make the
    // remainder commute with both
    let mut pool = reps;
    let mut pairs = Vec::with_capacity(k);
    while !pool.is_empty() {
        let a = pool.remove(0);
        let Some(pos) = pool.iter().position(|b| symplectic_dot(&a, b, n) == 1) else {
            return Err(QbpError::Construction(
                "logical representative with no symplectic partner".into(),
            ));
        };
        let b = pool.remove(pos);
        for u in pool.iter_mut() {
            if symplectic_dot(u, &b, n) == 1 {
                u.xor_assign(&a);
            }
            if symplectic_dot(u, &a, n) == 1 {
                u.xor_assign(&b);
            }
        }
        pairs.push((minimize(a, &stab_basis, n), minimize(b, &stab_basis, n)));
    }

    Ok(pairs
        .into_iter()
        .map(|(a, b)| (operator_from_bits(&a, n), operator_from_bits(&b, n)))
        .collect())
}

fn pauli_weight(v: &BitVec, n: usize) -> usize {
    (0..n).filter(|&j| v.get(j) || v.get(n + j)).count()
}

/// Greedy descent: keep adding whichever stabilizer basis element lowers the
/// operator weight until none does.
fn minimize(mut v: BitVec, stab_basis: &[BitVec], n: usize) -> BitVec {
    let mut w = pauli_weight(&v, n);
    loop {
        let mut improved = false;
        for s in stab_basis {
            let mut cand = v.clone();
            cand.xor_assign(s);
            let cw = pauli_weight(&cand, n);
            if cw < w {
                v = cand;
                w = cw;
                improved = true;
            }
        }
        if !improved {
            return v;
        }
    }
}
