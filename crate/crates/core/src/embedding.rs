//! Exact simulation of a classical HMM by a quantum one with the same number
//! of internal states.
//!
//! Each transition `y -> x` emitting `i` becomes the rank-one Kraus operator
//! `sqrt(T_i[x][y]) |x><y|`, and `p0` becomes the diagonal state `diag(p0)`.
//! Such operators send any state to a diagonal one, so coherences never
//! matter and the quantum word probabilities equal the classical ones.

use crate::classical::HmmModel;
use crate::error::Result;
use crate::linalg::{hermitian_log_of_unitary, ComplexMatrix, C64};
use crate::optimize::params::{params_from_hermitian, HqmmParameterization};
use crate::quantum::{DensityMatrix, HqmmModel, KrausSet};
use crate::word::Symbol;

/// Kraus operators of the embedded channel for symbol `s`, in `(x, y)`
/// row-major order, zero-weight transitions omitted.
fn embedded_ops(hmm: &HmmModel, s: Symbol) -> Vec<ComplexMatrix> {
    let n = hmm.n_states();
    let t = hmm.transition(s);
    let mut ops = Vec::new();
    for x in 0..n {
        for y in 0..n {
            let weight = t[(x, y)];
            if weight > 0.0 {
                let mut k = ComplexMatrix::zeros(n, n);
                k[(x, y)] = C64::new(weight.sqrt(), 0.0);
                ops.push(k);
            }
        }
    }
    ops
}

/// The quantum model reproducing every word probability of `hmm`.
///
/// A symbol that the HMM never emits keeps a single zero operator so the
/// per-symbol lists stay nonempty.
pub fn embed_hmm(hmm: &HmmModel) -> Result<HqmmModel> {
    hmm.validate(crate::classical::DEFAULT_TOL).into_result()?;
    let n = hmm.n_states();
    let mut lists = Symbol::ALL.map(|s| embedded_ops(hmm, s));
    for list in &mut lists {
        if list.is_empty() {
            list.push(ComplexMatrix::zeros(n, n));
        }
    }
    let [zero, one] = lists;
    HqmmModel::from_parts(KrausSet::new(zero, one)?, DensityMatrix::from_diagonal(hmm.p0()))
}

/// Parameters that decode (through [`crate::optimize::params_to_hqmm`]) to a
/// model with the same word probabilities as `embed_hmm(hmm)`.
///
/// The embedded operators are padded with zeros to the parameterization's
/// slot counts and stacked into the isometry `V|s> = sum_j K_j|s> ⊗ |j>`.
/// `V` fills the ancilla-`|0>` columns of a unitary completed by Gram-Schmidt,
/// whose Hermitian logarithm gives the generator parameters. The initial
/// state is the pure state with amplitudes `sqrt(p0)`; the rank-one embedded
/// operators discard coherences, so it behaves like `diag(p0)`.
///
/// Returns `None` when some symbol has fewer than `n_states^2` slots or the
/// dimensions disagree.
pub fn classical_point_in_quantum_space(
    hmm: &HmmModel,
    parameterization: &HqmmParameterization,
) -> Option<Vec<f64>> {
    let n = hmm.n_states();
    if parameterization.dim != n
        || parameterization.kraus_per_symbol.iter().any(|&m| m < n * n)
        || !hmm.validate(crate::classical::DEFAULT_TOL).is_valid()
    {
        return None;
    }
    let mut slots: Vec<ComplexMatrix> = Vec::new();
    for s in Symbol::ALL {
        let mut ops = embedded_ops(hmm, s);
        ops.resize(parameterization.kraus_per_symbol[s.index()], ComplexMatrix::zeros(n, n));
        slots.extend(ops);
    }
    let a = slots.len();
    let big = n * a;

    // Columns s * a of the unitary hold the isometry.
    let mut columns: Vec<Option<Vec<C64>>> = vec![None; big];
    for s in 0..n {
        let col: Vec<C64> = (0..big).map(|row| slots[row % a][(row / a, s)]).collect();
        columns[s * a] = Some(col);
    }
    let mut basis: Vec<Vec<C64>> = columns.iter().flatten().cloned().collect();
    let mut candidates = 0..big;
    for slot in columns.iter_mut().filter(|c| c.is_none()) {
        let v = loop {
            let e = candidates.next()?;
            let mut v = vec![C64::new(0.0, 0.0); big];
            v[e] = C64::new(1.0, 0.0);
            for _ in 0..2 {
                for b in &basis {
                    let proj: C64 = b.iter().zip(&v).map(|(bi, vi)| bi.conj() * vi).sum();
                    for (vi, bi) in v.iter_mut().zip(b) {
                        *vi -= proj * bi;
                    }
                }
            }
            let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if norm > 0.5 {
                break v.into_iter().map(|x| x / norm).collect::<Vec<_>>();
            }
        };
        basis.push(v.clone());
        *slot = Some(v);
    }
    let u = ComplexMatrix::from_fn(big, big, |r, c| columns[c].as_ref().unwrap()[r]);
    let h = hermitian_log_of_unitary(&u).ok()?;

    let mut theta = params_from_hermitian(&h);
    for &p in hmm.p0() {
        theta.push(p.max(0.0).sqrt());
        theta.push(0.0);
    }
    Some(theta)
}
