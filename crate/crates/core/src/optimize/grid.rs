//! Exhaustive lattice search over two-state classical models.

use crate::error::{Error, Result};
use crate::word::Word;

const STEPS: [f64; 3] = [0.05, 0.1, 0.2];

/// All points of the probability simplex in `R^4` with coordinates on the
/// lattice `{0, 1/d, ..., 1}`.
fn simplex_lattice(d: usize) -> Vec<[f64; 4]> {
    let mut pts = Vec::new();
    for a in 0..=d {
        for b in 0..=d - a {
            for c in 0..=d - a - b {
                let e = d - a - b - c;
                pts.push([a, b, c, e].map(|v| v as f64 / d as f64));
            }
        }
    }
    pts
}

/// Best probability of `word` over two-state models whose source columns of
/// `[T_0; T_1]` lie on the lattice with spacing `step` and whose `p0` is a
/// vertex. `step` must be 0.05, 0.1 or 0.2.
pub fn grid_search_hmm(word: &Word, step: f64) -> Result<f64> {
    if !STEPS.iter().any(|s| (s - step).abs() < 1e-12) {
        return Err(Error::Unsupported(format!(
            "grid step {step} (supported: 0.05, 0.1, 0.2)"
        )));
    }
    let d = (1.0 / step).round() as usize;
    let lattice = simplex_lattice(d);
    let mut best: f64 = 0.0;
    for c0 in &lattice {
        for c1 in &lattice {
            // Column y of [T_0; T_1] is (T_0[0][y], T_0[1][y], T_1[0][y], T_1[1][y]).
            let t = [
                [[c0[0], c1[0]], [c0[1], c1[1]]],
                [[c0[2], c1[2]], [c0[3], c1[3]]],
            ];
            // Propagate both vertex starts at once: columns of the product.
            let mut m = [[1.0, 0.0], [0.0, 1.0]];
            for s in word.symbols() {
                let ti = &t[s.index()];
                m = [
                    [
                        ti[0][0] * m[0][0] + ti[0][1] * m[1][0],
                        ti[0][0] * m[0][1] + ti[0][1] * m[1][1],
                    ],
                    [
                        ti[1][0] * m[0][0] + ti[1][1] * m[1][0],
                        ti[1][0] * m[0][1] + ti[1][1] * m[1][1],
                    ],
                ];
            }
            best = best.max(m[0][0] + m[1][0]).max(m[0][1] + m[1][1]);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_sizes() {
        // C(d + 3, 3) points
        assert_eq!(simplex_lattice(5).len(), 56);
        assert_eq!(simplex_lattice(20).len(), 1771);
    }

    #[test]
    fn single_one_is_certain() {
        for step in STEPS {
            let v = grid_search_hmm(&"1".parse().unwrap(), step).unwrap();
            assert!((v - 1.0).abs() < 1e-12);
        }
        let v = grid_search_hmm(&"11".parse().unwrap(), 0.2).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unsupported_step_rejected() {
        assert!(grid_search_hmm(&"1".parse().unwrap(), 0.3).is_err());
    }

    #[test]
    fn finer_grid_never_worse_when_nested() {
        // The 0.2 lattice is a subset of the 0.1 lattice.
        let w: Word = "101".parse().unwrap();
        assert!(grid_search_hmm(&w, 0.1).unwrap() >= grid_search_hmm(&w, 0.2).unwrap());
    }
}
