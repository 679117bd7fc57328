//! Smooth, total maps from unconstrained real vectors onto the feasible sets
//! of classical and quantum models.

use crate::classical::HmmModel;
use crate::error::{Error, Result};
use crate::linalg::{eigh, ComplexMatrix, RealMatrix, C64};
use crate::quantum::{DensityMatrix, HqmmModel, KrausSet, PureState};

/// Number of parameters describing an `n_states` classical model: one group
/// of `2 n` per source column of `[T_0; T_1]`, then `n` for `p0`.
pub fn hmm_param_len(n_states: usize) -> usize {
    2 * n_states * n_states + n_states
}

/// `x_j = theta_j^2 / sum theta^2`; the all-zero group maps to uniform.
fn squared_normalize(group: &[f64]) -> Vec<f64> {
    let total: f64 = group.iter().map(|x| x * x).sum();
    if total > 0.0 && total.is_finite() {
        group.iter().map(|x| x * x / total).collect()
    } else {
        vec![1.0 / group.len() as f64; group.len()]
    }
}

/// Decodes a classical model. Column `y` of `[T_0; T_1]` is
/// `theta[2ny .. 2n(y+1)]` in the order `T_0[0][y], ..., T_0[n-1][y],
/// T_1[0][y], ..., T_1[n-1][y]`; the trailing `n` entries give `p0`.
pub fn params_to_hmm(theta: &[f64], n_states: usize) -> Result<HmmModel> {
    let n = n_states;
    let expected = hmm_param_len(n);
    if theta.len() != expected || n == 0 {
        return Err(Error::ParamLength {
            got: theta.len(),
            expected,
        });
    }
    let mut t0 = RealMatrix::zeros(n, n);
    let mut t1 = RealMatrix::zeros(n, n);
    for (y, group) in theta[..2 * n * n].chunks(2 * n).enumerate() {
        let col = squared_normalize(group);
        for x in 0..n {
            t0[(x, y)] = col[x];
            t1[(x, y)] = col[n + x];
        }
    }
    let p0 = squared_normalize(&theta[2 * n * n..]);
    HmmModel::from_parts(t0, t1, p0)
}

/// Inverse of [`params_to_hmm`] up to the sign freedom: square roots of the
/// model's entries.
pub fn hmm_to_params(model: &HmmModel) -> Vec<f64> {
    let n = model.n_states();
    let mut theta = Vec::with_capacity(hmm_param_len(n));
    for y in 0..n {
        for t in [model.t0(), model.t1()] {
            for x in 0..n {
                theta.push(t[(x, y)].max(0.0).sqrt());
            }
        }
    }
    theta.extend(model.p0().iter().map(|p| p.max(0.0).sqrt()));
    theta
}

/// Shape of the quantum search space: a Hermitian generator on
/// `system ⊗ ancilla` with ancilla dimension `sum(kraus_per_symbol)`, plus a
/// pure initial state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HqmmParameterization {
    pub dim: usize,
    pub kraus_per_symbol: [usize; 2],
}

impl HqmmParameterization {
    pub fn new(dim: usize, kraus_per_symbol: [usize; 2]) -> Result<Self> {
        if dim == 0 || kraus_per_symbol.contains(&0) {
            return Err(Error::Unsupported(format!(
                "parameterization needs dim >= 1 and at least one Kraus operator per symbol, got dim {dim}, {kraus_per_symbol:?}"
            )));
        }
        Ok(HqmmParameterization {
            dim,
            kraus_per_symbol,
        })
    }

    /// One qubit with `m` Kraus operators per symbol.
    pub fn qubit(m: usize) -> Result<Self> {
        Self::new(2, [m, m])
    }

    pub fn ancilla_dim(&self) -> usize {
        self.kraus_per_symbol[0] + self.kraus_per_symbol[1]
    }

    pub fn unitary_dim(&self) -> usize {
        self.dim * self.ancilla_dim()
    }

    pub fn hermitian_len(&self) -> usize {
        self.unitary_dim() * self.unitary_dim()
    }

    pub fn state_len(&self) -> usize {
        2 * self.dim
    }

    pub fn len(&self) -> usize {
        self.hermitian_len() + self.state_len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Hermitian matrix from `n^2` reals: the `n` diagonal entries first, then
/// `(re, im)` for each upper off-diagonal entry in row-major order.
pub fn hermitian_from_params(values: &[f64], n: usize) -> ComplexMatrix {
    debug_assert_eq!(values.len(), n * n);
    let mut h = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        h[(i, i)] = C64::new(values[i], 0.0);
    }
    let mut k = n;
    for r in 0..n {
        for c in r + 1..n {
            let z = C64::new(values[k], values[k + 1]);
            h[(r, c)] = z;
            h[(c, r)] = z.conj();
            k += 2;
        }
    }
    h
}

/// Inverse of [`hermitian_from_params`] (reads the upper triangle).
pub fn params_from_hermitian(h: &ComplexMatrix) -> Vec<f64> {
    let n = h.rows();
    let mut out: Vec<f64> = (0..n).map(|i| h[(i, i)].re).collect();
    for r in 0..n {
        for c in r + 1..n {
            out.push(h[(r, c)].re);
            out.push(h[(r, c)].im);
        }
    }
    out
}

/// Kraus operators of the dilation `exp(iH)`, same as
/// `dilation_to_kraus(&unitary_from_hermitian(h)?, ...)` but only the
/// ancilla-`|0>` columns of the unitary are formed.
fn dilation_kraus_from_generator(h: &ComplexMatrix, p: &HqmmParameterization) -> Result<KrausSet> {
    let eig = eigh(h, 1e-9)?;
    let n = p.unitary_dim();
    let a = p.ancilla_dim();
    let w = &eig.vectors;
    let phases: Vec<C64> = eig.values.iter().map(|&x| C64::from_polar(1.0, x)).collect();
    // columns[s][row] = U[row][s * a]
    let columns: Vec<Vec<C64>> = (0..p.dim)
        .map(|s| {
            let coef: Vec<C64> = (0..n).map(|k| phases[k] * w[(s * a, k)].conj()).collect();
            (0..n)
                .map(|row| (0..n).map(|k| w[(row, k)] * coef[k]).sum())
                .collect()
        })
        .collect();
    let mut ops: Vec<ComplexMatrix> = (0..a)
        .map(|j| ComplexMatrix::from_fn(p.dim, p.dim, |x, s| columns[s][x * a + j]))
        .collect();
    let one = ops.split_off(p.kraus_per_symbol[0]);
    KrausSet::new(ops, one)
}

/// Decodes a quantum model: `U = exp(iH)` is turned into Kraus operators
/// as in [`crate::quantum::dilation_to_kraus`], and the trailing `(re, im)` pairs give the
/// initial pure state (`|0>` when they are all zero).
pub fn params_to_hqmm(theta: &[f64], p: &HqmmParameterization) -> Result<HqmmModel> {
    if theta.len() != p.len() {
        return Err(Error::ParamLength {
            got: theta.len(),
            expected: p.len(),
        });
    }
    let (gen, state) = theta.split_at(p.hermitian_len());
    let h = hermitian_from_params(gen, p.unitary_dim());
    let kraus = dilation_kraus_from_generator(&h, p)?;
    let amps: Vec<C64> = state.chunks(2).map(|c| C64::new(c[0], c[1])).collect();
    let psi = PureState::new(amps).unwrap_or_else(|_| PureState::basis(p.dim, 0));
    HqmmModel::from_parts(kraus, DensityMatrix::from_pure(&psi))
}
