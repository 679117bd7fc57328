//! Transition-emitting (Mealy) hidden Markov models over the binary alphabet.
//!
//! A model is a pair of substochastic matrices `T_0`, `T_1` and an initial
//! distribution `p0`. Entry `T_i[x][y]` is the probability of moving from
//! state `y` to state `x` while emitting `i`: rows are destinations, columns
//! are sources, and distributions are column vectors evolved as `p' = T p`.

use std::collections::BTreeMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::validation::{ValidationReport, Violation};
use crate::linalg::RealMatrix;
use crate::rng::rng_from_seed;
use crate::word::{Symbol, Word};

/// Default tolerance for structural validation.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Longest word the path-sum oracle accepts.
pub const PATH_SUM_MAX_LEN: usize = 12;
/// Longest word length [`HmmModel::word_distribution`] enumerates.
pub const DISTRIBUTION_MAX_LEN: usize = 16;

/// A Mealy HMM with binary output.
#[derive(Debug, Clone, PartialEq)]
pub struct HmmModel {
    transitions: [RealMatrix; 2],
    p0: Vec<f64>,
}

impl HmmModel {
    /// Builds a model after checking only that all shapes agree. Use
    /// [`HmmModel::validate`] (or [`HmmModel::new`]) for the numeric checks.
    pub fn from_parts(t0: RealMatrix, t1: RealMatrix, p0: Vec<f64>) -> Result<Self> {
        let n = p0.len();
        if n == 0 {
            return Err(Error::Dimension("model needs at least one state".into()));
        }
        for (i, t) in [&t0, &t1].into_iter().enumerate() {
            if t.rows() != n || t.cols() != n {
                return Err(Error::Dimension(format!(
                    "t{i} is {}x{}, expected {n}x{n} to match p0",
                    t.rows(),
                    t.cols()
                )));
            }
        }
        Ok(HmmModel {
            transitions: [t0, t1],
            p0,
        })
    }

    /// Builds and validates at [`DEFAULT_TOL`].
    pub fn new(t0: RealMatrix, t1: RealMatrix, p0: Vec<f64>) -> Result<Self> {
        let m = Self::from_parts(t0, t1, p0)?;
        m.validate(DEFAULT_TOL).into_result()?;
        Ok(m)
    }

    /// Emits 0 or 1 with probability one half, state unchanged.
    pub fn fair_coin() -> Self {
        let half = RealMatrix::from_rows(&[vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap();
        Self::new(half.clone(), half, vec![1.0, 0.0]).unwrap()
    }

    /// Deterministic machine emitting `1010...` from state 0.
    pub fn alternator() -> Self {
        let t0 = RealMatrix::from_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        let t1 = RealMatrix::from_rows(&[vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        Self::new(t0, t1, vec![1.0, 0.0]).unwrap()
    }

    pub fn n_states(&self) -> usize {
        self.p0.len()
    }

    pub fn transition(&self, s: Symbol) -> &RealMatrix {
        &self.transitions[s.index()]
    }

    pub fn t0(&self) -> &RealMatrix {
        &self.transitions[0]
    }

    pub fn t1(&self) -> &RealMatrix {
        &self.transitions[1]
    }

    pub fn p0(&self) -> &[f64] {
        &self.p0
    }

    /// Same transitions, different initial distribution (shape-checked only).
    pub fn with_initial(&self, p0: Vec<f64>) -> Result<Self> {
        Self::from_parts(self.transitions[0].clone(), self.transitions[1].clone(), p0)
    }

    /// Reports every entry outside `[-tol, 1 + tol]`, every column of
    /// `T_0 + T_1` whose sum is off by more than `tol`, and problems with `p0`.
    pub fn validate(&self, tol: f64) -> ValidationReport {
        let n = self.n_states();
        let mut violations = Vec::new();
        let in_range = |x: f64| x.is_finite() && x >= -tol && x <= 1.0 + tol;
        for (sym, t) in self.transitions.iter().enumerate() {
            for row in 0..n {
                for col in 0..n {
                    let value = t[(row, col)];
                    if !in_range(value) {
                        violations.push(Violation::EntryRange {
                            symbol: sym as u8,
                            row,
                            col,
                            value,
                        });
                    }
                }
            }
        }
        for col in 0..n {
            let sum = self.transitions[0].column_sum(col) + self.transitions[1].column_sum(col);
            if !((sum - 1.0).abs() <= tol) {
                violations.push(Violation::ColumnSum { col, sum });
            }
        }
        for (index, &value) in self.p0.iter().enumerate() {
            if !in_range(value) {
                violations.push(Violation::InitialEntry { index, value });
            }
        }
        let sum: f64 = self.p0.iter().sum();
        if !((sum - 1.0).abs() <= tol) {
            violations.push(Violation::InitialSum { sum });
        }
        ValidationReport { violations }
    }

    fn ensure_valid(&self) -> Result<()> {
        self.validate(DEFAULT_TOL).into_result()
    }

    /// Probability that the next `word.len()` outputs spell `word`, starting
    /// from `p0`: `1^T T_{i_L} ... T_{i_1} p0` with the first symbol's matrix
    /// applied first.
    pub fn word_probability(&self, word: &Word) -> Result<f64> {
        self.ensure_valid()?;
        Ok(self.word_probability_unchecked(word))
    }

    pub(crate) fn word_probability_unchecked(&self, word: &Word) -> f64 {
        let mut p = self.p0.clone();
        for &s in word.symbols() {
            p = self.transitions[s.index()].mul_vec(&p);
        }
        p.iter().sum::<f64>().max(0.0)
    }

    /// One conditional update: returns `T_i p` (unnormalized) and its total
    /// mass, the probability of emitting `i` from `p`. When that probability
    /// is zero the zero vector is returned as is.
    pub fn filter(&self, p: &[f64], s: Symbol) -> Result<(Vec<f64>, f64)> {
        self.check_len(p)?;
        let next = self.transitions[s.index()].mul_vec(p);
        let prob = next.iter().sum();
        Ok((next, prob))
    }

    /// `(T_0 + T_1) p`, the state evolution with the output ignored.
    pub fn marginal_step(&self, p: &[f64]) -> Result<Vec<f64>> {
        self.check_len(p)?;
        Ok((&self.transitions[0] + &self.transitions[1]).mul_vec(p))
    }

    fn check_len(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.n_states() {
            return Err(Error::Dimension(format!(
                "state vector has {} entries, model has {} states",
                p.len(),
                self.n_states()
            )));
        }
        Ok(())
    }

    /// Draws a word of length `length`.
    ///
    /// The initial state is drawn from `p0`. Each step then draws one uniform
    /// variate and picks the joint outcome `(i, x)` from the current state's
    /// column, scanning symbol-major: `(0, 0), (0, 1), ..., (1, n-1)`.
    pub fn sample(&self, length: usize, seed: u64) -> Result<Word> {
        self.ensure_valid()?;
        let mut rng = rng_from_seed(seed);
        let n = self.n_states();
        let mut state = pick(&self.p0, rng.random::<f64>());
        let mut word = Word::empty();
        let mut weights = vec![0.0; 2 * n];
        for _ in 0..length {
            for (sym, t) in self.transitions.iter().enumerate() {
                for x in 0..n {
                    weights[sym * n + x] = t[(x, state)];
                }
            }
            let outcome = pick(&weights, rng.random::<f64>());
            word.push(Symbol::ALL[outcome / n]);
            state = outcome % n;
        }
        Ok(word)
    }

    /// Sums `p0[y_0] * prod_t T_{i_t}[y_t][y_{t-1}]` over every state path.
    /// Exponential in the word length; independent of the matrix product.
    pub fn path_sum_oracle(&self, word: &Word) -> Result<f64> {
        if word.len() > PATH_SUM_MAX_LEN {
            return Err(Error::CapExceeded {
                what: "word length",
                value: word.len(),
                cap: PATH_SUM_MAX_LEN,
            });
        }
        let n = self.n_states();
        let steps = word.len() + 1;
        let n_paths = n.pow(steps as u32);
        let mut total = 0.0;
        let mut path = vec![0usize; steps];
        for code in 0..n_paths {
            let mut c = code;
            for slot in path.iter_mut() {
                *slot = c % n;
                c /= n;
            }
            let mut weight = self.p0[path[0]];
            for (t, s) in word.symbols().iter().enumerate() {
                weight *= self.transitions[s.index()][(path[t + 1], path[t])];
            }
            total += weight;
        }
        Ok(total)
    }

    /// Probabilities of all `2^length` words, keyed by word.
    pub fn word_distribution(&self, length: usize) -> Result<BTreeMap<Word, f64>> {
        if length > DISTRIBUTION_MAX_LEN {
            return Err(Error::CapExceeded {
                what: "word length",
                value: length,
                cap: DISTRIBUTION_MAX_LEN,
            });
        }
        self.ensure_valid()?;
        Ok(Word::all_of_length(length)
            .map(|w| {
                let p = self.word_probability_unchecked(&w);
                (w, p)
            })
            .collect())
    }
}

/// Index chosen by inverse-CDF lookup of `u` in `weights`; falls back to the
/// last positive weight when roundoff leaves `u` past the total.
fn pick(weights: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
}
