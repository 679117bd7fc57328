//! Small dense real and complex matrices and a cyclic Jacobi eigensolver for
//! Hermitian matrices.
//!
//! Everything here targets the tiny fixed sizes used by one-bit and one-qubit
//! machines and their dilations (at most 16x16), so storage is a flat
//! row-major `Vec` and all products are naive triple loops.

use std::ops::{Add, Index, IndexMut, Mul};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Jacobi stops once the off-diagonal Frobenius norm is below this fraction
/// of the full norm (and never later than `JACOBI_MAX_SWEEPS`).
const JACOBI_OFF_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 30;

#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RealMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::Dimension("ragged matrix rows".into()));
        }
        Ok(RealMatrix {
            rows: n_rows,
            cols: n_cols,
            data: rows.concat(),
        })
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.cols.max(1)).map(<[f64]>::to_vec).collect()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[f64] {
        &self.data
    }

    pub fn column_sum(&self, col: usize) -> f64 {
        (0..self.rows).map(|r| self[(r, col)]).sum()
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.cols);
        self.data
            .chunks(self.cols)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }
}

impl Index<(usize, usize)> for RealMatrix {
    type Output = f64;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for RealMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        &mut self.data[r * self.cols + c]
    }
}

impl Add for &RealMatrix {
    type Output = RealMatrix;
    fn add(self, rhs: &RealMatrix) -> RealMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        RealMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_real(m: &RealMatrix) -> Self {
        ComplexMatrix {
            rows: m.rows,
            cols: m.cols,
            data: m.data.iter().map(|&x| C64::new(x, 0.0)).collect(),
        }
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::Dimension("ragged matrix rows".into()));
        }
        Ok(ComplexMatrix {
            rows: n_rows,
            cols: n_cols,
            data: rows.concat(),
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    pub fn diagonal(diag: &[C64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// `|u><v|`
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        Self::from_fn(u.len(), v.len(), |r, c| u[r] * v[c].conj())
    }

    pub fn to_rows(&self) -> Vec<Vec<C64>> {
        self.data.chunks(self.cols.max(1)).map(<[C64]>::to_vec).collect()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        debug_assert_eq!(v.len(), self.cols);
        self.data
            .chunks(self.cols)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Max-abs entrywise distance.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Max-abs deviation from Hermiticity, `max |A - A^dagger|`.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut dev: f64 = 0.0;
        for r in 0..n {
            for c in r..n {
                dev = dev.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        dev
    }

    /// Max-abs deviation of `A^dagger A` from the identity.
    pub fn unitary_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.adjoint().mul(self).max_abs_diff(&Self::identity(self.rows))
    }

    /// `A rho A^dagger`
    pub fn sandwich(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        &(self * rho) * &self.adjoint()
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        Self::from_fn(self.rows * rhs.rows, self.cols * rhs.cols, |r, c| {
            self[(r / rhs.rows, c / rhs.cols)] * rhs[(r % rhs.rows, c % rhs.cols)]
        })
    }

    pub fn mul(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self * rhs
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let rhs_row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let out_row = &mut out.data[r * rhs.cols..(r + 1) * rhs.cols];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

/// Eigendecomposition `A = V diag(values) V^dagger` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Eigenvalues, ascending.
    pub values: Vec<f64>,
    /// Unitary matrix whose columns are the matching eigenvectors.
    pub vectors: ComplexMatrix,
    pub sweeps: usize,
}

/// Cyclic Jacobi eigensolver for Hermitian matrices.
///
/// Only the upper triangle's partner entries are assumed to be conjugates; the
/// input is symmetrized as `(A + A^dagger) / 2` first. Rejects input whose
/// Hermitian deviation exceeds `tol`.
pub fn eigh(a: &ComplexMatrix, tol: f64) -> Result<HermitianEigen> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "eigh needs a square matrix, got {}x{}",
            a.rows, a.cols
        )));
    }
    let dev = a.hermitian_deviation();
    if dev > tol || !dev.is_finite() {
        return Err(Error::NotHermitian(dev));
    }
    let n = a.rows;
    let mut m = ComplexMatrix::from_fn(n, n, |r, c| (a[(r, c)] + a[(c, r)].conj()) * 0.5);
    let mut v = ComplexMatrix::identity(n);
    let total = m.frobenius();
    let target = JACOBI_OFF_TOL * total.max(f64::MIN_POSITIVE);

    let mut sweeps = 0;
    while sweeps < JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&m) <= target {
            break;
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(HermitianEigen {
        values,
        vectors,
        sweeps,
    })
}

fn off_diagonal_norm(m: &ComplexMatrix) -> f64 {
    let n = m.rows;
    let mut s = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                s += m[(r, c)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One Jacobi rotation `m <- J^dagger m J`, `v <- v J` annihilating `m[p][q]`.
///
/// With `m[p][q] = r e^{i alpha}` the rotation is
/// `J[p][p] = J[q][q] = c`, `J[p][q] = s e^{i alpha}`, `J[q][p] = -s e^{-i alpha}`.
/// Only rows `p`, `q` are computed; columns follow from Hermiticity.
fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let n = m.rows;
    let apq = m.data[p * n + q];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = m.data[p * n + p].re;
    let aqq = m.data[q * n + q].re;
    // Skip rotations that cannot change the diagonal in floating point.
    if app.abs() + 100.0 * r == app.abs() && aqq.abs() + 100.0 * r == aqq.abs() {
        m.data[p * n + q] = ZERO;
        m.data[q * n + p] = ZERO;
        return;
    }
    let phase = apq / r;
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta == 0.0 {
        1.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s_phase = phase * (t * c); // s e^{i alpha}
    let s_phase_conj = s_phase.conj(); // s e^{-i alpha}

    // Rows p and q are contiguous; update them and mirror into the columns.
    let data = &mut m.data;
    let (lo, hi) = data.split_at_mut(q * n);
    let row_p = &mut lo[p * n..(p + 1) * n];
    let row_q = &mut hi[..n];
    for (a, b) in row_p.iter_mut().zip(row_q.iter_mut()) {
        let (mp, mq) = (*a, *b);
        *a = mp * c - mq * s_phase;
        *b = mp * s_phase_conj + mq * c;
    }
    for k in 0..n {
        if k != p && k != q {
            data[k * n + p] = data[p * n + k].conj();
            data[k * n + q] = data[q * n + k].conj();
        }
    }
    data[p * n + p] = C64::new(app - t * r, 0.0);
    data[q * n + q] = C64::new(aqq + t * r, 0.0);
    data[p * n + q] = ZERO;
    data[q * n + p] = ZERO;

    let vd = &mut v.data;
    for k in 0..n {
        let vkp = vd[k * n + p];
        let vkq = vd[k * n + q];
        vd[k * n + p] = vkp * c - vkq * s_phase_conj;
        vd[k * n + q] = vkp * s_phase + vkq * c;
    }
}

/// `V diag(f(lambda)) V^dagger` for a Hermitian eigendecomposition.
pub fn spectral_map(eig: &HermitianEigen, f: impl Fn(f64) -> C64) -> ComplexMatrix {
    let n = eig.values.len();
    let v = &eig.vectors;
    let fvals: Vec<C64> = eig.values.iter().map(|&x| f(x)).collect();
    ComplexMatrix::from_fn(n, n, |r, c| {
        (0..n).map(|k| v[(r, k)] * fvals[k] * v[(c, k)].conj()).sum()
    })
}

/// `exp(i h)` for Hermitian `h`, via [`eigh`]. The result is unitary.
pub fn unitary_from_hermitian(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = eigh(h, 1e-9)?;
    Ok(spectral_map(&eig, |x| C64::from_polar(1.0, x)))
}

/// A Hermitian `h` with `exp(i h) = u` for unitary `u`, eigenvalues in `(-pi, pi]`.
///
/// A unitary is normal, so its Hermitian and anti-Hermitian parts commute and
/// share eigenvectors. A generic real combination of the two parts is
/// diagonalized with [`eigh`]; the result is accepted once it also
/// diagonalizes `u` to within `1e-12`.
pub fn hermitian_log_of_unitary(u: &ComplexMatrix) -> Result<ComplexMatrix> {
    let dev = u.unitary_deviation();
    if dev > 1e-9 || !dev.is_finite() {
        return Err(Error::NotUnitary(dev));
    }
    let n = u.rows;
    let ud = u.adjoint();
    let half = C64::new(0.5, 0.0);
    let herm = (u + &ud).scale(half);
    let anti = ComplexMatrix::from_fn(n, n, |r, c| (u[(r, c)] - ud[(r, c)]) * C64::new(0.0, -0.5));

    let mut best: Option<(f64, ComplexMatrix)> = None;
    for mix in [0.618_033_988_749_894_8, 1.414_213_562_373_095, -0.377_964_473_009_227_2, 2.718_281_828_459_045] {
        let combo = &herm + &anti.scale(C64::new(mix, 0.0));
        let eig = eigh(&combo, 1e-9)?;
        let w = &eig.vectors;
        let d = &(&w.adjoint() * u) * w;
        let mut off: f64 = 0.0;
        for r in 0..n {
            for c in 0..n {
                if r != c {
                    off = off.max(d[(r, c)].norm());
                }
            }
        }
        let phases: Vec<f64> = (0..n).map(|i| d[(i, i)].arg()).collect();
        let h = ComplexMatrix::from_fn(n, n, |r, c| {
            (0..n)
                .map(|k| w[(r, k)] * phases[k] * w[(c, k)].conj())
                .sum()
        });
        if off < 1e-12 {
            return Ok(h);
        }
        if best.as_ref().is_none_or(|(b, _)| off < *b) {
            best = Some((off, h));
        }
    }
    let (off, h) = best.expect("at least one attempt");
    if off < 1e-9 {
        Ok(h)
    } else {
        Err(Error::InvalidModel(format!(
            "could not diagonalize unitary (residual {off:e})"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn random_hermitian(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
        let mut h = ComplexMatrix::zeros(n, n);
        for r in 0..n {
            h[(r, r)] = C64::new(rng.random_range(-2.0..2.0), 0.0);
            for c in r + 1..n {
                let z = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                h[(r, c)] = z;
                h[(c, r)] = z.conj();
            }
        }
        h
    }

    #[test]
    fn eigh_reconstructs_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1, 2, 3, 4, 8, 16] {
            for _ in 0..20 {
                let h = random_hermitian(n, &mut rng);
                let eig = eigh(&h, 1e-12).unwrap();
                let back = spectral_map(&eig, |x| C64::new(x, 0.0));
                assert!(back.max_abs_diff(&h) < 1e-12, "n={n}");
                assert!(eig.vectors.unitary_deviation() < 1e-12);
                assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
            }
        }
    }

    #[test]
    fn eigh_matches_closed_form_2x2() {
        // [[a, b],[b*, d]] has eigenvalues (a+d)/2 ± sqrt(((a-d)/2)^2 + |b|^2)
        let (a, d, b) = (0.3, -1.1, C64::new(0.4, -0.7));
        let h = ComplexMatrix::from_rows(&[
            vec![C64::new(a, 0.0), b],
            vec![b.conj(), C64::new(d, 0.0)],
        ])
        .unwrap();
        let eig = eigh(&h, 1e-12).unwrap();
        let mid = (a + d) / 2.0;
        let rad = (((a - d) / 2.0).powi(2) + b.norm_sqr()).sqrt();
        assert!((eig.values[0] - (mid - rad)).abs() < 1e-14);
        assert!((eig.values[1] - (mid + rad)).abs() < 1e-14);
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let m = ComplexMatrix::from_rows(&[vec![ONE, ONE], vec![ZERO, ONE]]).unwrap();
        assert!(matches!(eigh(&m, 1e-9), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let u = unitary_from_hermitian(&ComplexMatrix::zeros(4, 4)).unwrap();
        assert!(u.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-15);
    }

    #[test]
    fn exp_of_pi_z_is_minus_identity() {
        let pi = std::f64::consts::PI;
        let h = ComplexMatrix::diagonal(&[C64::new(pi, 0.0), C64::new(-pi, 0.0)]);
        let u = unitary_from_hermitian(&h).unwrap();
        assert!(u.max_abs_diff(&ComplexMatrix::identity(2).scale(-ONE)) < 1e-15);
    }

    #[test]
    fn exp_matches_taylor_series() {
        // Independent route: truncated power series with scaling and squaring.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let h = random_hermitian(4, &mut rng);
            let scaled = h.scale(C64::new(0.0, 1.0 / 64.0));
            let mut term = ComplexMatrix::identity(4);
            let mut sum = ComplexMatrix::identity(4);
            for k in 1..30 {
                term = (&term * &scaled).scale(C64::new(1.0 / k as f64, 0.0));
                sum = &sum + &term;
            }
            for _ in 0..6 {
                sum = &sum * &sum;
            }
            let u = unitary_from_hermitian(&h).unwrap();
            assert!(u.max_abs_diff(&sum) < 1e-11);
        }
    }

    #[test]
    fn random_exponentials_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let h = random_hermitian(4, &mut rng);
            let u = unitary_from_hermitian(&h).unwrap();
            assert!(u.unitary_deviation() < 1e-10);
        }
    }

    #[test]
    fn log_inverts_exp() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [2, 4, 8, 16] {
            for _ in 0..10 {
                let h = random_hermitian(n, &mut rng);
                let u = unitary_from_hermitian(&h).unwrap();
                let back = unitary_from_hermitian(&hermitian_log_of_unitary(&u).unwrap()).unwrap();
                assert!(back.max_abs_diff(&u) < 1e-11, "n={n}");
            }
        }
    }

    #[test]
    fn log_handles_degenerate_spectra() {
        let swap = ComplexMatrix::from_fn(4, 4, |r, c| {
            let (a, b) = (r / 2, r % 2);
            if c == b * 2 + a {
                ONE
            } else {
                ZERO
            }
        });
        for u in [ComplexMatrix::identity(4), swap, ComplexMatrix::identity(4).scale(-ONE)] {
            let back = unitary_from_hermitian(&hermitian_log_of_unitary(&u).unwrap()).unwrap();
            assert!(back.max_abs_diff(&u) < 1e-12);
        }
    }

    #[test]
    fn kron_shapes_and_values() {
        let a = ComplexMatrix::from_rows(&[vec![ONE, C64::new(2.0, 0.0)]]).unwrap();
        let b = ComplexMatrix::identity(2);
        let k = a.kron(&b);
        assert_eq!((k.rows(), k.cols()), (2, 4));
        assert_eq!(k[(1, 3)], C64::new(2.0, 0.0));
        assert_eq!(k[(0, 1)], ZERO);
    }
}
