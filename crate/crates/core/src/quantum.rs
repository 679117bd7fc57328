//! Hidden quantum Markov models: a density matrix evolved by a complete set
//! of Kraus operators grouped by output symbol.
//!
//! Emitting symbol `i` from `rho` happens with probability
//! `sum_m Tr(K_i^m rho K_i^m^dagger)` and leaves the machine in the normalized
//! image of the unnormalized map `E_i(rho) = sum_m K_i^m rho K_i^m^dagger`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{eigh, ComplexMatrix, C64};
use crate::rng::rng_from_seed;
use crate::validation::{ValidationReport, Violation};
use crate::word::{Symbol, Word};

pub use crate::linalg::unitary_from_hermitian;

/// Default tolerance for Kraus completeness and density-matrix checks.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Below this probability a symbol is treated as impossible by [`HqmmModel::filter`].
pub const IMPOSSIBLE_PROB: f64 = 1e-14;
/// Largest number of Kraus-index tuples the branch oracle will enumerate.
pub const BRANCH_CAP: usize = 1_000_000;
/// Unitarity tolerance for dilations and generator unitaries.
pub const UNITARY_TOL: f64 = 1e-9;

/// A normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState(Vec<C64>);

impl PureState {
    /// Normalizes `amplitudes`; rejects the zero vector.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidModel("pure state has zero norm".into()));
        }
        Ok(PureState(amplitudes.into_iter().map(|a| a / norm).collect()))
    }

    /// Computational basis state `|index>` in dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = vec![C64::new(0.0, 0.0); dim];
        v[index] = C64::new(1.0, 0.0);
        PureState(v)
    }

    /// `(|0> + |1>) / sqrt 2`
    pub fn plus() -> Self {
        Self::new(vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)]).unwrap()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    /// Checks every invariant at `tol`.
    pub fn new(m: ComplexMatrix, tol: f64) -> Result<Self> {
        let report = density_violations(&m, tol);
        if !report.is_empty() {
            return Err(Error::InvalidModel(
                ValidationReport { violations: report }.to_string(),
            ));
        }
        Ok(DensityMatrix(m))
    }

    /// Wraps `m` without checks; [`HqmmModel::validate`] will still inspect it.
    pub fn new_unchecked(m: ComplexMatrix) -> Self {
        DensityMatrix(m)
    }

    pub fn from_pure(psi: &PureState) -> Self {
        DensityMatrix(ComplexMatrix::outer(psi.amplitudes(), psi.amplitudes()))
    }

    /// `diag(p)` for a probability vector `p`.
    pub fn from_diagonal(p: &[f64]) -> Self {
        let d: Vec<C64> = p.iter().map(|&x| C64::new(x, 0.0)).collect();
        DensityMatrix(ComplexMatrix::diagonal(&d))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::from_diagonal(&vec![1.0 / dim as f64; dim])
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(eigh(&self.0, 1e-6)?.values)
    }

    pub fn violations(&self, tol: f64) -> Vec<Violation> {
        density_violations(&self.0, tol)
    }
}

fn density_violations(m: &ComplexMatrix, tol: f64) -> Vec<Violation> {
    let mut out = Vec::new();
    let deviation = m.hermitian_deviation();
    if !(deviation <= tol) {
        out.push(Violation::NotHermitian { deviation });
    }
    let trace = m.trace();
    if !((trace.re - 1.0).abs() <= tol && trace.im.abs() <= tol) {
        out.push(Violation::Trace { trace: trace.re });
    }
    // The eigenvalue check needs a (nearly) Hermitian input.
    if deviation.is_finite() && m.is_square() {
        if let Ok(eig) = eigh(m, f64::INFINITY) {
            let value = eig.values.first().copied().unwrap_or(0.0);
            if value < -tol {
                out.push(Violation::NegativeEigenvalue { value });
            }
        }
    }
    out
}

/// Kraus operators grouped by the symbol they emit.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    ops: [Vec<ComplexMatrix>; 2],
}

impl KrausSet {
    /// Shape-checked constructor: every operator must be `d x d` for one `d`
    /// and each symbol needs at least one operator.
    pub fn new(zero: Vec<ComplexMatrix>, one: Vec<ComplexMatrix>) -> Result<Self> {
        let dim = zero
            .first()
            .or(one.first())
            .map(ComplexMatrix::rows)
            .ok_or_else(|| Error::Dimension("Kraus set is empty".into()))?;
        if zero.is_empty() || one.is_empty() {
            return Err(Error::Dimension(
                "every symbol needs at least one Kraus operator".into(),
            ));
        }
        for k in zero.iter().chain(&one) {
            if k.rows() != dim || k.cols() != dim {
                return Err(Error::Dimension(format!(
                    "Kraus operator is {}x{}, expected {dim}x{dim}",
                    k.rows(),
                    k.cols()
                )));
            }
        }
        Ok(KrausSet { ops: [zero, one] })
    }

    pub fn dim(&self) -> usize {
        self.ops[0][0].rows()
    }

    pub fn ops(&self, s: Symbol) -> &[ComplexMatrix] {
        &self.ops[s.index()]
    }

    /// Number of operators `M_i` per symbol.
    pub fn counts(&self) -> [usize; 2] {
        [self.ops[0].len(), self.ops[1].len()]
    }

    /// `max |sum_i sum_m K^dagger K - I|`.
    pub fn completeness_deviation(&self) -> f64 {
        let d = self.dim();
        let mut sum = ComplexMatrix::zeros(d, d);
        for k in self.ops.iter().flatten() {
            sum = &sum + &(&k.adjoint() * k);
        }
        sum.max_abs_diff(&ComplexMatrix::identity(d))
    }

    /// Applies the first set with probability `p` and the second otherwise:
    /// operators scaled by `sqrt p` and `sqrt(1 - p)`, per-symbol lists joined.
    pub fn mixture(p: f64, a: &KrausSet, b: &KrausSet) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidModel(format!(
                "mixture weight {p} outside [0, 1]"
            )));
        }
        if a.dim() != b.dim() {
            return Err(Error::Dimension("mixture of Kraus sets of different dimension".into()));
        }
        let (sa, sb) = (C64::new(p.sqrt(), 0.0), C64::new((1.0 - p).sqrt(), 0.0));
        let join = |s: usize| -> Vec<ComplexMatrix> {
            a.ops[s]
                .iter()
                .map(|k| k.scale(sa))
                .chain(b.ops[s].iter().map(|k| k.scale(sb)))
                .collect()
        };
        KrausSet::new(join(0), join(1))
    }

    /// `E_i(rho) = sum_m K_i^m rho K_i^m^dagger`, unnormalized.
    pub fn apply_symbol(&self, rho: &ComplexMatrix, s: Symbol) -> ComplexMatrix {
        let d = rho.rows();
        self.ops[s.index()]
            .iter()
            .fold(ComplexMatrix::zeros(d, d), |acc, k| &acc + &k.sandwich(rho))
    }
}

/// A hidden quantum Markov model over the binary alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct HqmmModel {
    kraus: KrausSet,
    rho0: DensityMatrix,
}

impl HqmmModel {
    /// Shape check only; see [`HqmmModel::validate`].
    pub fn from_parts(kraus: KrausSet, rho0: DensityMatrix) -> Result<Self> {
        let d = kraus.dim();
        if rho0.0.rows() != d || rho0.0.cols() != d {
            return Err(Error::Dimension(format!(
                "rho0 is {}x{}, Kraus operators are {d}x{d}",
                rho0.0.rows(),
                rho0.0.cols()
            )));
        }
        Ok(HqmmModel { kraus, rho0 })
    }

    /// Builds and validates at [`DEFAULT_TOL`].
    pub fn new(kraus: KrausSet, rho0: DensityMatrix) -> Result<Self> {
        let m = Self::from_parts(kraus, rho0)?;
        m.validate(DEFAULT_TOL).into_result()?;
        Ok(m)
    }

    /// `K_0 = K_1 = I / sqrt 2`: fair coin, state untouched.
    pub fn half_identity(rho0: DensityMatrix) -> Self {
        let k = ComplexMatrix::identity(rho0.dim()).scale(C64::new(0.5f64.sqrt(), 0.0));
        Self::new(KrausSet::new(vec![k.clone()], vec![k]).unwrap(), rho0).unwrap()
    }

    /// `K_0 = |0><0|`, `K_1 = |1><1|`: a projective measurement.
    pub fn projective(rho0: DensityMatrix) -> Self {
        let p0 = ComplexMatrix::outer(PureState::basis(2, 0).amplitudes(), PureState::basis(2, 0).amplitudes());
        let p1 = ComplexMatrix::outer(PureState::basis(2, 1).amplitudes(), PureState::basis(2, 1).amplitudes());
        Self::new(KrausSet::new(vec![p0], vec![p1]).unwrap(), rho0).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.kraus.dim()
    }

    pub fn kraus(&self) -> &KrausSet {
        &self.kraus
    }

    pub fn rho0(&self) -> &DensityMatrix {
        &self.rho0
    }

    /// Reports the completeness deviation and any problems with `rho0`.
    pub fn validate(&self, tol: f64) -> ValidationReport {
        let mut violations = Vec::new();
        let deviation = self.kraus.completeness_deviation();
        if !(deviation <= tol) {
            violations.push(Violation::Completeness { deviation });
        }
        violations.extend(self.rho0.violations(tol));
        ValidationReport { violations }
    }

    fn check_dim(&self, rho: &DensityMatrix) -> Result<()> {
        if rho.dim() != self.dim() {
            return Err(Error::Dimension(format!(
                "state has dimension {}, model has {}",
                rho.dim(),
                self.dim()
            )));
        }
        Ok(())
    }

    /// `sum_m Tr(K_i^m rho K_i^m^dagger)`, clamped to `[0, 1]`.
    pub fn symbol_probability(&self, rho: &DensityMatrix, s: Symbol) -> Result<f64> {
        self.check_dim(rho)?;
        Ok(self
            .kraus
            .apply_symbol(&rho.0, s)
            .trace()
            .re
            .clamp(0.0, 1.0))
    }

    /// Conditional update after observing `s`: the normalized post-measurement
    /// state and the probability of `s`.
    pub fn filter(&self, rho: &DensityMatrix, s: Symbol) -> Result<(DensityMatrix, f64)> {
        self.check_dim(rho)?;
        let next = self.kraus.apply_symbol(&rho.0, s);
        let prob = next.trace().re;
        if !(prob >= IMPOSSIBLE_PROB) {
            return Err(Error::ImpossibleSymbol {
                symbol: s.value(),
                prob,
            });
        }
        Ok((
            DensityMatrix(next.scale(C64::new(1.0 / prob, 0.0))),
            prob.min(1.0),
        ))
    }

    /// Probability of observing `word` from `rho0`, folding `E_i` over the
    /// symbols in order.
    pub fn word_probability(&self, word: &Word) -> f64 {
        let mut rho = self.rho0.0.clone();
        for &s in word.symbols() {
            rho = self.kraus.apply_symbol(&rho, s);
        }
        rho.trace().re.max(0.0)
    }

    /// `sum_i sum_m K_i^m rho K_i^m^dagger`, the state when the output is ignored.
    pub fn marginal_step(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.check_dim(rho)?;
        let out = Symbol::ALL
            .iter()
            .fold(ComplexMatrix::zeros(self.dim(), self.dim()), |acc, &s| {
                &acc + &self.kraus.apply_symbol(&rho.0, s)
            });
        Ok(DensityMatrix(out))
    }

    /// Draws a word: one uniform variate per step picks 0 when below the
    /// probability of 0, then the state is filtered on the drawn symbol.
    /// Symbols below [`IMPOSSIBLE_PROB`] are never drawn.
    pub fn sample(&self, length: usize, seed: u64) -> Result<Word> {
        let mut rng = rng_from_seed(seed);
        let mut rho = self.rho0.clone();
        let mut word = Word::empty();
        for _ in 0..length {
            let p0 = self.symbol_probability(&rho, Symbol::ZERO)?;
            let u = rng.random::<f64>();
            let s = if p0 < IMPOSSIBLE_PROB {
                Symbol::ONE
            } else if 1.0 - p0 < IMPOSSIBLE_PROB || u < p0 {
                Symbol::ZERO
            } else {
                Symbol::ONE
            };
            rho = self.filter(&rho, s)?.0;
            word.push(s);
        }
        Ok(word)
    }

    /// Sums `Tr(A rho0 A^dagger)` over every Kraus-index tuple, where `A` is
    /// the ordered product `K_{i_L}^{m_L} ... K_{i_1}^{m_1}`.
    pub fn branch_oracle(&self, word: &Word) -> Result<f64> {
        let counts: Vec<usize> = word
            .symbols()
            .iter()
            .map(|s| self.kraus.ops(*s).len())
            .collect();
        let mut branches: usize = 1;
        for &c in &counts {
            branches = branches.saturating_mul(c);
            if branches > BRANCH_CAP {
                return Err(Error::CapExceeded {
                    what: "Kraus branches",
                    value: branches,
                    cap: BRANCH_CAP,
                });
            }
        }
        let d = self.dim();
        let mut idx = vec![0usize; counts.len()];
        let mut total = 0.0;
        for _ in 0..branches {
            let mut a = ComplexMatrix::identity(d);
            for (t, s) in word.symbols().iter().enumerate() {
                a = &self.kraus.ops(*s)[idx[t]] * &a;
            }
            total += a.sandwich(&self.rho0.0).trace().re;
            // odometer increment
            for t in 0..idx.len() {
                idx[t] += 1;
                if idx[t] < counts[t] {
                    break;
                }
                idx[t] = 0;
            }
        }
        Ok(total)
    }
}

/// Kraus operators of a system coupled to a fresh ancilla in `|0>`.
///
/// `u` acts on `system ⊗ ancilla` with ancilla dimension `a = sum(partition)`
/// and basis index `s * a + j`. Ancilla outcome `j` gives
/// `K_j = (I ⊗ <j|) U (I ⊗ |0>)`; outcomes are handed to the symbols in order,
/// the first `partition[0]` to symbol 0 and the next `partition[1]` to symbol 1.
pub fn dilation_to_kraus(u: &ComplexMatrix, dim: usize, partition: [usize; 2]) -> Result<KrausSet> {
    if partition.contains(&0) {
        return Err(Error::Dimension("each symbol needs at least one ancilla outcome".into()));
    }
    let a = partition[0] + partition[1];
    if u.rows() != dim * a || u.cols() != dim * a {
        return Err(Error::Dimension(format!(
            "dilation unitary is {}x{}, expected {n}x{n}",
            u.rows(),
            u.cols(),
            n = dim * a
        )));
    }
    let dev = u.unitary_deviation();
    if !(dev <= UNITARY_TOL) {
        return Err(Error::NotUnitary(dev));
    }
    Ok(dilation_to_kraus_unchecked(u, dim, partition))
}

pub(crate) fn dilation_to_kraus_unchecked(
    u: &ComplexMatrix,
    dim: usize,
    partition: [usize; 2],
) -> KrausSet {
    let a = partition[0] + partition[1];
    let mut ops: Vec<ComplexMatrix> = (0..a)
        .map(|j| ComplexMatrix::from_fn(dim, dim, |x, s| u[(x * a + j, s * a)]))
        .collect();
    let one = ops.split_off(partition[0]);
    KrausSet { ops: [ops, one] }
}

/// Quantum finite-state generator: apply `u`, then measure in the
/// computational basis, so `K_i = |i><i| U`. The model starts in `|psi0>`.
pub fn qfsg_to_hqmm(u: &ComplexMatrix, psi0: &PureState) -> Result<HqmmModel> {
    if u.rows() != 2 || u.cols() != 2 || psi0.dim() != 2 {
        return Err(Error::Dimension(
            "a binary projective generator acts on one qubit".into(),
        ));
    }
    let dev = u.unitary_deviation();
    if !(dev <= UNITARY_TOL) {
        return Err(Error::NotUnitary(dev));
    }
    let proj = |i: usize| {
        let e = PureState::basis(2, i);
        &ComplexMatrix::outer(e.amplitudes(), e.amplitudes()) * u
    };
    HqmmModel::from_parts(
        KrausSet::new(vec![proj(0)], vec![proj(1)])?,
        DensityMatrix::from_pure(psi0),
    )
}

/// Real rotation `[[cos t, -sin t], [sin t, cos t]]`.
pub fn rotation(theta: f64) -> ComplexMatrix {
    let (s, c) = theta.sin_cos();
    ComplexMatrix::from_rows(&[
        vec![C64::new(c, 0.0), C64::new(-s, 0.0)],
        vec![C64::new(s, 0.0), C64::new(c, 0.0)],
    ])
    .unwrap()
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::linalg::hermitian_log_of_unitary;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn ket0() -> DensityMatrix {
        DensityMatrix::from_pure(&PureState::basis(2, 0))
    }

    pub(crate) fn random_hermitian(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
        let mut h = ComplexMatrix::zeros(n, n);
        for r in 0..n {
            h[(r, r)] = C64::new(rng.random_range(-3.0..3.0), 0.0);
            for c in r + 1..n {
                let z = C64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
                h[(r, c)] = z;
                h[(c, r)] = z.conj();
            }
        }
        h
    }

    pub(crate) fn random_state(dim: usize, rng: &mut impl Rng) -> DensityMatrix {
        // Mixture of two random pure states.
        let mut psi = || {
            PureState::new(
                (0..dim)
                    .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                    .collect(),
            )
            .unwrap()
        };
        let (a, b) = (psi(), psi());
        let p = 0.3;
        let m = &ComplexMatrix::outer(a.amplitudes(), a.amplitudes()).scale(C64::new(p, 0.0))
            + &ComplexMatrix::outer(b.amplitudes(), b.amplitudes()).scale(C64::new(1.0 - p, 0.0));
        DensityMatrix::new(m, 1e-12).unwrap()
    }

    pub(crate) fn random_dilated_model(
        dim: usize,
        partition: [usize; 2],
        rng: &mut impl Rng,
    ) -> HqmmModel {
        let n = dim * (partition[0] + partition[1]);
        let u = unitary_from_hermitian(&random_hermitian(n, rng)).unwrap();
        let kraus = dilation_to_kraus(&u, dim, partition).unwrap();
        HqmmModel::new(kraus, random_state(dim, rng)).unwrap()
    }

    #[test]
    fn validate_examples() {
        assert!(HqmmModel::half_identity(ket0()).validate(1e-12).is_valid());
        assert!(HqmmModel::projective(ket0()).validate(1e-12).is_valid());

        let id = ComplexMatrix::identity(2);
        let m = HqmmModel::from_parts(KrausSet::new(vec![id.clone()], vec![id]).unwrap(), ket0())
            .unwrap();
        let r = m.validate(DEFAULT_TOL);
        assert_eq!(
            r.violations,
            vec![Violation::Completeness { deviation: 1.0 }]
        );
    }

    #[test]
    fn validate_reports_bad_rho0() {
        let rho = ComplexMatrix::diagonal(&[C64::new(1.5, 0.0), C64::new(-0.5, 0.0)]);
        let m = HqmmModel::from_parts(
            HqmmModel::half_identity(ket0()).kraus().clone(),
            DensityMatrix::new_unchecked(rho),
        )
        .unwrap();
        let r = m.validate(DEFAULT_TOL);
        assert!(r
            .violations
            .iter()
            .any(|v| matches!(v, Violation::NegativeEigenvalue { .. })));

        let mut rho = ComplexMatrix::identity(2).scale(C64::new(0.5, 0.0));
        rho[(0, 1)] = C64::new(0.1, 0.0);
        let m = HqmmModel::from_parts(
            HqmmModel::half_identity(ket0()).kraus().clone(),
            DensityMatrix::new_unchecked(rho),
        )
        .unwrap();
        assert!(matches!(
            m.validate(DEFAULT_TOL).violations[..],
            [Violation::NotHermitian { .. }]
        ));
    }

    #[test]
    fn structural_errors() {
        let a = ComplexMatrix::identity(2);
        let b = ComplexMatrix::identity(3);
        assert!(matches!(
            KrausSet::new(vec![a.clone()], vec![b]),
            Err(Error::Dimension(_))
        ));
        assert!(KrausSet::new(vec![a.clone()], vec![]).is_err());
        let k = KrausSet::new(vec![a.clone()], vec![a]).unwrap();
        assert!(HqmmModel::from_parts(k, DensityMatrix::maximally_mixed(3)).is_err());
    }

    #[test]
    fn symbol_probability_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let half = HqmmModel::half_identity(ket0());
        let rho = random_state(2, &mut rng);
        assert!((half.symbol_probability(&rho, Symbol::ZERO).unwrap() - 0.5).abs() < 1e-15);

        let proj = HqmmModel::projective(ket0());
        assert_eq!(proj.symbol_probability(&ket0(), Symbol::ZERO).unwrap(), 1.0);
        assert_eq!(proj.symbol_probability(&ket0(), Symbol::ONE).unwrap(), 0.0);
    }

    #[test]
    fn rotation_coin_probability() {
        // K_i = |i><i| R(theta); from |0>, R|0> = (cos t, sin t), so P(0) = cos^2 t.
        let theta = PI / 6.0;
        let m = qfsg_to_hqmm(&rotation(theta), &PureState::basis(2, 0)).unwrap();
        let p0 = m.symbol_probability(m.rho0(), Symbol::ZERO).unwrap();
        assert!((p0 - 0.75).abs() < 1e-15);
    }

    #[test]
    fn filter_examples() {
        let proj = HqmmModel::projective(ket0());
        let plus = DensityMatrix::from_pure(&PureState::plus());
        let (next, prob) = proj.filter(&plus, Symbol::ZERO).unwrap();
        assert!((prob - 0.5).abs() < 1e-15);
        assert!(next.matrix().max_abs_diff(ket0().matrix()) < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rho = random_state(2, &mut rng);
        let half = HqmmModel::half_identity(ket0());
        let (next, prob) = half.filter(&rho, Symbol::ONE).unwrap();
        assert!((prob - 0.5).abs() < 1e-15);
        assert!(next.matrix().max_abs_diff(rho.matrix()) < 1e-15);
    }

    #[test]
    fn filter_signals_impossible_symbol() {
        let proj = HqmmModel::projective(ket0());
        assert!(matches!(
            proj.filter(&ket0(), Symbol::ONE),
            Err(Error::ImpossibleSymbol { symbol: 1, .. })
        ));
    }

    #[test]
    fn filter_on_random_dilations() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..50 {
            let m = random_dilated_model(2, [2, 2], &mut rng);
            let rho = random_state(2, &mut rng);
            for s in Symbol::ALL {
                let (next, prob) = m.filter(&rho, s).unwrap();
                let direct = m.symbol_probability(&rho, s).unwrap();
                assert!((prob - direct).abs() < 1e-12);
                assert!(next.violations(1e-9).is_empty());
            }
        }
    }

    #[test]
    fn word_probability_examples() {
        let half = HqmmModel::half_identity(ket0());
        assert!((half.word_probability(&w("10001")) - 0.03125).abs() < 1e-16);
        let proj = HqmmModel::projective(ket0());
        assert_eq!(proj.word_probability(&w("000")), 1.0);
        assert_eq!(proj.word_probability(&w("010")), 0.0);
    }

    #[test]
    fn marginal_step_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let rho = random_state(2, &mut rng);
        let half = HqmmModel::half_identity(ket0());
        assert!(half.marginal_step(&rho).unwrap().matrix().max_abs_diff(rho.matrix()) < 1e-15);

        let proj = HqmmModel::projective(ket0());
        let out = proj
            .marginal_step(&DensityMatrix::from_pure(&PureState::plus()))
            .unwrap();
        assert!(out.matrix().max_abs_diff(DensityMatrix::maximally_mixed(2).matrix()) < 1e-15);
    }

    #[test]
    fn marginal_step_is_trace_preserving_and_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for dim in [2, 3, 4] {
            for _ in 0..40 {
                let m = random_dilated_model(dim, [2, 2], &mut rng);
                let rho = random_state(dim, &mut rng);
                let out = m.marginal_step(&rho).unwrap();
                assert!((out.trace() - 1.0).abs() < 1e-12);
                assert!(out.eigenvalues().unwrap()[0] >= -1e-10);
            }
        }
    }

    #[test]
    fn sample_examples() {
        let proj = HqmmModel::projective(ket0());
        for seed in [0, 3, 12345] {
            assert_eq!(proj.sample(5, seed).unwrap().to_string(), "00000");
        }
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let m = random_dilated_model(2, [2, 2], &mut rng);
        assert_eq!(m.sample(30, 8).unwrap(), m.sample(30, 8).unwrap());
    }

    #[test]
    fn branch_oracle_examples() {
        let half = HqmmModel::half_identity(ket0());
        assert!((half.branch_oracle(&w("01")).unwrap() - 0.25).abs() < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let single = random_dilated_model(2, [1, 1], &mut rng);
        for word in Word::all_of_length(4) {
            let a = single.branch_oracle(&word).unwrap();
            assert!((a - single.word_probability(&word)).abs() < 1e-13);
        }
    }

    #[test]
    fn branch_oracle_matches_fold() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let mut worst: f64 = 0.0;
        for _ in 0..30 {
            let m = random_dilated_model(2, [2, 2], &mut rng);
            for len in 0..=5 {
                for word in Word::all_of_length(len) {
                    worst = worst.max((m.branch_oracle(&word).unwrap() - m.word_probability(&word)).abs());
                }
            }
        }
        assert!(worst < 1e-12, "worst {worst:e}");
    }

    #[test]
    fn branch_oracle_cap() {
        let k = ComplexMatrix::identity(2).scale(C64::new(0.5, 0.0));
        let ks = KrausSet::new(vec![k.clone(); 2], vec![k; 2]).unwrap();
        let m = HqmmModel::from_parts(ks, ket0()).unwrap();
        let long = Word::all_of_length(20).next().unwrap();
        assert!(matches!(m.branch_oracle(&long), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn dilation_of_identity() {
        let ks = dilation_to_kraus(&ComplexMatrix::identity(4), 2, [1, 1]).unwrap();
        assert!(ks.ops(Symbol::ZERO)[0].max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
        assert_eq!(ks.ops(Symbol::ONE)[0].max_abs(), 0.0);
        assert!(ks.completeness_deviation() < 1e-15);
    }

    #[test]
    fn dilation_of_swap() {
        // SWAP |s, 0> = |0, s>: outcome j is the old system state, system ends in |0>.
        let swap = ComplexMatrix::from_fn(4, 4, |r, c| {
            if r == (c % 2) * 2 + c / 2 {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let ks = dilation_to_kraus(&swap, 2, [1, 1]).unwrap();
        assert!(ks.completeness_deviation() < 1e-15);
        // K_0 = |0><0|, K_1 = |0><1|
        assert_eq!(ks.ops(Symbol::ZERO)[0][(0, 0)], C64::new(1.0, 0.0));
        assert_eq!(ks.ops(Symbol::ONE)[0][(0, 1)], C64::new(1.0, 0.0));
    }

    #[test]
    fn dilation_rejects_bad_input() {
        let mut u = ComplexMatrix::identity(4);
        u[(0, 0)] = C64::new(2.0, 0.0);
        assert!(matches!(
            dilation_to_kraus(&u, 2, [1, 1]),
            Err(Error::NotUnitary(_))
        ));
        assert!(dilation_to_kraus(&ComplexMatrix::identity(6), 2, [1, 1]).is_err());
        assert!(dilation_to_kraus(&ComplexMatrix::identity(4), 2, [2, 0]).is_err());
    }

    #[test]
    fn random_dilations_are_complete() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..100 {
            let u = unitary_from_hermitian(&random_hermitian(8, &mut rng)).unwrap();
            let ks = dilation_to_kraus(&u, 2, [2, 2]).unwrap();
            assert!(ks.completeness_deviation() < 1e-10);
        }
    }

    #[test]
    fn qfsg_examples() {
        let m = qfsg_to_hqmm(&ComplexMatrix::identity(2), &PureState::basis(2, 0)).unwrap();
        assert_eq!(m.word_probability(&w("0000")), 1.0);
        let m = qfsg_to_hqmm(&rotation(PI / 4.0), &PureState::basis(2, 0)).unwrap();
        let p = m.symbol_probability(m.rho0(), Symbol::ZERO).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        let mut bad = ComplexMatrix::identity(2);
        bad[(0, 1)] = C64::new(1.0, 0.0);
        assert!(qfsg_to_hqmm(&bad, &PureState::basis(2, 0)).is_err());
    }

    #[test]
    fn qfsg_born_rule_on_random_unitaries() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..100 {
            let u = unitary_from_hermitian(&random_hermitian(2, &mut rng)).unwrap();
            let psi = PureState::new(vec![
                C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
            ])
            .unwrap();
            let m = qfsg_to_hqmm(&u, &psi).unwrap();
            assert!(m.validate(1e-10).is_valid());
            let upsi = u.mul_vec(psi.amplitudes());
            for s in Symbol::ALL {
                let born = upsi[s.index()].norm_sqr();
                assert!((m.symbol_probability(m.rho0(), s).unwrap() - born).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn mixtures_stay_complete() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        for _ in 0..50 {
            let a = random_dilated_model(2, [1, 1], &mut rng);
            let b = random_dilated_model(2, [1, 1], &mut rng);
            let p = rng.random::<f64>();
            let mix = KrausSet::mixture(p, a.kraus(), b.kraus()).unwrap();
            assert_eq!(mix.counts(), [2, 2]);
            assert!(mix.completeness_deviation() < 1e-10);
        }
        let a = HqmmModel::half_identity(ket0());
        assert!(KrausSet::mixture(1.5, a.kraus(), a.kraus()).is_err());
    }

    #[test]
    fn filter_product_equals_word_probability() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let m = random_dilated_model(2, [2, 2], &mut rng);
            for word in Word::all_of_length(5) {
                let mut rho = m.rho0().clone();
                let mut prod = 1.0;
                for &s in word.symbols() {
                    let (next, p) = m.filter(&rho, s).unwrap();
                    prod *= p;
                    rho = next;
                }
                assert!((prod - m.word_probability(&word)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn hermitian_log_roundtrip_through_dilation() {
        let mut rng = ChaCha8Rng::seed_from_u64(18);
        let u = unitary_from_hermitian(&random_hermitian(8, &mut rng)).unwrap();
        let h = hermitian_log_of_unitary(&u).unwrap();
        let a = dilation_to_kraus(&u, 2, [2, 2]).unwrap();
        let b = dilation_to_kraus(&unitary_from_hermitian(&h).unwrap(), 2, [2, 2]).unwrap();
        for s in Symbol::ALL {
            for (x, y) in a.ops(s).iter().zip(b.ops(s)) {
                assert!(x.max_abs_diff(y) < 1e-11);
            }
        }
    }
}
