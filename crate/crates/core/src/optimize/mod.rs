//! Maximizing the probability of a word over all classical or all quantum
//! models, and sweeping that comparison across a word family.

mod grid;
mod nelder_mead;
pub mod params;

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::classical::HmmModel;
use crate::embedding::classical_point_in_quantum_space;
use crate::error::Result;
use crate::quantum::HqmmModel;
use crate::rng::{mix, rng_from_seed};
use crate::word::{Word, WordTemplate};

pub use grid::grid_search_hmm;
pub use nelder_mead::{nelder_mead, SimplexOutcome, SimplexSettings};
pub use params::{
    hermitian_from_params, hmm_param_len, hmm_to_params, params_from_hermitian, params_to_hmm,
    params_to_hqmm, HqmmParameterization,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Classical,
    Quantum,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Classical => "classical",
            Family::Quantum => "quantum",
        }
    }
}

/// Multi-start settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_evals: usize,
    /// Standard deviation of the random starting points.
    pub init_scale: f64,
    /// Offset of the initial simplex vertices.
    pub simplex_step: f64,
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    pub tol: f64,
    pub seed: u64,
}

impl OptimizerConfig {
    /// 64 restarts of 5 000 evaluations.
    pub fn classical_default() -> Self {
        OptimizerConfig {
            restarts: 64,
            max_evals: 5_000,
            init_scale: 1.0,
            simplex_step: 0.5,
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            tol: 1e-10,
            seed: 0,
        }
    }

    /// 64 restarts of 20 000 evaluations.
    pub fn quantum_default() -> Self {
        OptimizerConfig {
            max_evals: 20_000,
            ..Self::classical_default()
        }
    }

    pub fn with_restarts(self, restarts: usize) -> Self {
        OptimizerConfig { restarts, ..self }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        OptimizerConfig { seed, ..self }
    }

    pub fn with_max_evals(self, max_evals: usize) -> Self {
        OptimizerConfig { max_evals, ..self }
    }

    fn simplex(&self) -> SimplexSettings {
        SimplexSettings {
            max_evals: self.max_evals,
            initial_step: self.simplex_step,
            reflection: self.reflection,
            expansion: self.expansion,
            contraction: self.contraction,
            shrink: self.shrink,
            tol: self.tol,
        }
    }
}

/// Which feasible set to search.
#[derive(Debug, Clone, Copy)]
pub enum SearchSpace<'a> {
    Classical {
        n_states: usize,
    },
    Quantum {
        parameterization: HqmmParameterization,
        /// Classical model whose embedding seeds restart 0, when the slot
        /// counts allow it.
        warm_start: Option<&'a HmmModel>,
    },
}

impl SearchSpace<'_> {
    pub fn family(&self) -> Family {
        match self {
            SearchSpace::Classical { .. } => Family::Classical,
            SearchSpace::Quantum { .. } => Family::Quantum,
        }
    }

    fn param_len(&self) -> usize {
        match self {
            SearchSpace::Classical { n_states } => hmm_param_len(*n_states),
            SearchSpace::Quantum {
                parameterization, ..
            } => parameterization.len(),
        }
    }

    fn objective(&self, word: &Word, theta: &[f64]) -> f64 {
        match self {
            SearchSpace::Classical { n_states } => params_to_hmm(theta, *n_states)
                .map(|m| m.word_probability_unchecked(word))
                .unwrap_or(0.0),
            SearchSpace::Quantum {
                parameterization, ..
            } => params_to_hqmm(theta, parameterization)
                .map(|m| m.word_probability(word))
                .unwrap_or(0.0),
        }
    }
}

/// A decoded optimum.
#[derive(Debug, Clone, PartialEq)]
pub enum DecodedModel {
    Hmm(HmmModel),
    Hqmm(HqmmModel),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub family: Family,
    pub word: Word,
    pub best_value: f64,
    pub best_params: Vec<f64>,
    /// Restart that produced `best_value` (lowest index on ties).
    pub best_restart: usize,
    pub restart_values: Vec<f64>,
    pub evaluations: usize,
    /// `Some(true)` when quantum restart 0 started from a classical model.
    pub warm_started: Option<bool>,
    pub model: DecodedModel,
}

/// Runs `config.restarts` independent simplex searches for the most likely
/// model of `word` and keeps the best.
///
/// Restart `r` starts from `init_scale * N(0, 1)` draws seeded with
/// `mix(config.seed, r)`, except quantum restart 0, which starts from the
/// embedding of the warm-start model when one is given and fits. Restarts
/// may run in parallel; results are merged in restart order.
pub fn maximize_word_probability(
    space: SearchSpace<'_>,
    word: &Word,
    config: &OptimizerConfig,
) -> Result<OptimizationResult> {
    let len = space.param_len();
    let warm = match space {
        SearchSpace::Quantum {
            parameterization,
            warm_start: Some(hmm),
        } => classical_point_in_quantum_space(hmm, &parameterization),
        _ => None,
    };
    let settings = config.simplex();
    let outcomes: Vec<SimplexOutcome> = (0..config.restarts.max(1))
        .into_par_iter()
        .map(|r| {
            let start = match (&warm, r) {
                (Some(theta), 0) => theta.clone(),
                _ => {
                    let mut rng = rng_from_seed(mix(config.seed, r as u64));
                    (0..len)
                        .map(|_| {
                            let z: f64 = StandardNormal.sample(&mut rng);
                            config.init_scale * z
                        })
                        .collect()
                }
            };
            nelder_mead(|theta| space.objective(word, theta), &start, &settings)
        })
        .collect();

    let mut best_restart = 0;
    for (r, o) in outcomes.iter().enumerate() {
        if o.value > outcomes[best_restart].value {
            best_restart = r;
        }
    }
    let best = &outcomes[best_restart];
    let model = match space {
        SearchSpace::Classical { n_states } => {
            DecodedModel::Hmm(params_to_hmm(&best.best, n_states)?)
        }
        SearchSpace::Quantum {
            parameterization, ..
        } => DecodedModel::Hqmm(params_to_hqmm(&best.best, &parameterization)?),
    };
    Ok(OptimizationResult {
        family: space.family(),
        word: word.clone(),
        best_value: best.value,
        best_params: best.best.clone(),
        best_restart,
        restart_values: outcomes.iter().map(|o| o.value).collect(),
        evaluations: outcomes.iter().map(|o| o.evals).sum(),
        warm_started: match space {
            SearchSpace::Classical { .. } => None,
            SearchSpace::Quantum { .. } => Some(warm.is_some()),
        },
        model,
    })
}

/// Classical search followed by a quantum search warm-started from the
/// classical optimum.
pub fn compare_word(
    word: &Word,
    parameterization: HqmmParameterization,
    classical: &OptimizerConfig,
    quantum: &OptimizerConfig,
) -> Result<(OptimizationResult, OptimizationResult)> {
    let c = maximize_word_probability(SearchSpace::Classical { n_states: parameterization.dim }, word, classical)?;
    let hmm = match &c.model {
        DecodedModel::Hmm(m) => m.clone(),
        DecodedModel::Hqmm(_) => unreachable!("classical search decodes to an HMM"),
    };
    let q = maximize_word_probability(
        SearchSpace::Quantum {
            parameterization,
            warm_start: Some(&hmm),
        },
        word,
        quantum,
    )?;
    Ok((c, q))
}

/// One point of the classical/quantum comparison curve.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveRow {
    pub k: usize,
    pub word: Word,
    pub classical_max: f64,
    pub quantum_max: f64,
    pub gap: f64,
    /// Quantum restart count.
    pub restarts: usize,
    /// Objective evaluations across both searches.
    pub evaluations: usize,
}

/// Compares the two families on `template` for each `k` in `k_range`.
/// The searches for `k` use master seed `mix(seed, k)` of their configs.
pub fn sweep_curve(
    template: &WordTemplate,
    k_range: std::ops::RangeInclusive<usize>,
    parameterization: HqmmParameterization,
    classical: &OptimizerConfig,
    quantum: &OptimizerConfig,
) -> Result<Vec<CurveRow>> {
    k_range
        .map(|k| {
            let word = template.instantiate(k);
            let (c, q) = compare_word(
                &word,
                parameterization,
                &classical.with_seed(mix(classical.seed, k as u64)),
                &quantum.with_seed(mix(quantum.seed, k as u64)),
            )?;
            Ok(CurveRow {
                k,
                word,
                classical_max: c.best_value,
                quantum_max: q.best_value,
                gap: q.best_value - c.best_value,
                restarts: quantum.restarts,
                evaluations: c.evaluations + q.evaluations,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn small(restarts: usize, evals: usize) -> OptimizerConfig {
        OptimizerConfig::classical_default()
            .with_restarts(restarts)
            .with_max_evals(evals)
            .with_seed(7)
    }

    #[test]
    fn classical_single_one() {
        let r = maximize_word_probability(SearchSpace::Classical { n_states: 2 }, &w("1"), &small(4, 2000)).unwrap();
        assert!(r.best_value >= 1.0 - 1e-9);
        assert_eq!(r.restart_values.len(), 4);
        assert!(r.warm_started.is_none());
    }

    #[test]
    fn classical_alternation() {
        let r = maximize_word_probability(SearchSpace::Classical { n_states: 2 }, &w("10"), &small(8, 5000)).unwrap();
        assert!(r.best_value >= 1.0 - 1e-6, "{}", r.best_value);
    }

    #[test]
    fn best_value_is_max_of_restarts_and_decodes() {
        let r = maximize_word_probability(SearchSpace::Classical { n_states: 2 }, &w("1001"), &small(6, 1500)).unwrap();
        let max = r.restart_values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(r.best_value, max);
        assert_eq!(r.restart_values[r.best_restart], max);
        assert!(r.restart_values[..r.best_restart].iter().all(|&v| v < max));
        let DecodedModel::Hmm(m) = &r.model else { panic!() };
        assert_eq!(m.word_probability(&w("1001")).unwrap(), r.best_value);
    }

    #[test]
    fn restarts_are_prefix_stable() {
        let a = maximize_word_probability(SearchSpace::Classical { n_states: 2 }, &w("101"), &small(3, 800)).unwrap();
        let b = maximize_word_probability(SearchSpace::Classical { n_states: 2 }, &w("101"), &small(6, 800)).unwrap();
        assert_eq!(a.restart_values[..], b.restart_values[..3]);
        assert!(b.best_value >= a.best_value);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let p = HqmmParameterization::qubit(1).unwrap();
        let cfg = small(2, 1500);
        let run = || {
            maximize_word_probability(
                SearchSpace::Quantum { parameterization: p, warm_start: None },
                &w("101"),
                &cfg,
            )
            .unwrap()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn quantum_single_one_with_one_operator() {
        let p = HqmmParameterization::qubit(1).unwrap();
        let r = maximize_word_probability(
            SearchSpace::Quantum { parameterization: p, warm_start: None },
            &w("1"),
            &small(4, 3000),
        )
        .unwrap();
        assert!(r.best_value >= 1.0 - 1e-6, "{}", r.best_value);
        assert_eq!(r.warm_started, Some(false));
    }

    #[test]
    fn warm_start_dominates_classical() {
        let p = HqmmParameterization::qubit(4).unwrap();
        let (c, q) = compare_word(&w("1001"), p, &small(8, 3000), &small(1, 400)).unwrap();
        assert_eq!(q.warm_started, Some(true));
        assert!(q.best_value >= c.best_value - 1e-6);
    }

    #[test]
    fn grid_floor_for_1001() {
        let grid = grid_search_hmm(&w("1001"), 0.1).unwrap();
        let r = maximize_word_probability(SearchSpace::Classical { n_states: 2 }, &w("1001"), &small(32, 5000)).unwrap();
        assert!(r.best_value >= grid - 1e-9);
    }

    #[test]
    fn sweep_first_row_is_certain() {
        let p = HqmmParameterization::qubit(1).unwrap();
        let rows = sweep_curve(&WordTemplate::one_zeros_one(), 0..=0, p, &small(4, 2000), &small(2, 1000)).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].word.to_string(), "11");
        assert!(rows[0].classical_max >= 1.0 - 1e-6);
        assert_eq!(rows[0].gap, rows[0].quantum_max - rows[0].classical_max);
    }
}
