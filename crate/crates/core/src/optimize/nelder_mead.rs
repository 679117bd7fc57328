//! Nelder-Mead simplex search, maximizing.

/// Coefficients and stopping rules for one simplex run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexSettings {
    pub max_evals: usize,
    /// Offset of the initial vertices along each coordinate axis.
    pub initial_step: f64,
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    /// Stop once best and worst vertex values differ by less than this.
    pub tol: f64,
}

impl Default for SimplexSettings {
    fn default() -> Self {
        SimplexSettings {
            max_evals: 5_000,
            initial_step: 0.5,
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexOutcome {
    pub best: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    pub converged: bool,
}

/// Counts evaluations and remembers the best point ever seen. NaN counts as
/// minus infinity.
struct Tracker<F> {
    f: F,
    evals: usize,
    best: Vec<f64>,
    best_value: f64,
}

impl<F: FnMut(&[f64]) -> f64> Tracker<F> {
    fn eval(&mut self, x: &[f64]) -> f64 {
        let v = (self.f)(x);
        let v = if v.is_nan() { f64::NEG_INFINITY } else { v };
        self.evals += 1;
        if v > self.best_value {
            self.best_value = v;
            self.best.clear();
            self.best.extend_from_slice(x);
        }
        v
    }
}

fn vertex_sum(simplex: &[(Vec<f64>, f64)], n: usize) -> Vec<f64> {
    let mut sum = vec![0.0; n];
    for (x, _) in simplex {
        for (s, xi) in sum.iter_mut().zip(x) {
            *s += xi;
        }
    }
    sum
}

fn replace_worst(simplex: &mut [(Vec<f64>, f64)], sum: &mut [f64], new: (Vec<f64>, f64)) {
    let last = simplex.len() - 1;
    for ((s, old), x) in sum.iter_mut().zip(&simplex[last].0).zip(&new.0) {
        *s += x - old;
    }
    simplex[last] = new;
}

fn affine(c: &[f64], towards: &[f64], coef: f64) -> Vec<f64> {
    c.iter().zip(towards).map(|(ci, ti)| ci + coef * (ti - ci)).collect()
}

/// Maximizes `objective` from `start`.
///
/// Vertices are kept sorted best first. Each iteration reflects the worst
/// vertex through the centroid of the others, tries an expansion when the
/// reflection beats the best vertex, contracts (outside or inside) when it
/// does not beat the second worst, and shrinks towards the best vertex when
/// the contraction fails too. The run ends when the value spread falls below
/// `tol` or the next step would exceed `max_evals`.
pub fn nelder_mead<F>(objective: F, start: &[f64], settings: &SimplexSettings) -> SimplexOutcome
where
    F: FnMut(&[f64]) -> f64,
{
    let n = start.len();
    let mut t = Tracker {
        f: objective,
        evals: 0,
        best: start.to_vec(),
        best_value: f64::NEG_INFINITY,
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let v = t.eval(start);
    simplex.push((start.to_vec(), v));
    for i in 0..n {
        if t.evals >= settings.max_evals {
            break;
        }
        let mut x = start.to_vec();
        x[i] += settings.initial_step;
        let v = t.eval(&x);
        simplex.push((x, v));
    }

    let mut converged = false;
    // Running sum of all vertices, refreshed every n iterations and after shrinks.
    let mut sum = vertex_sum(&simplex, start.len());
    let mut since_resum = 0;
    if simplex.len() == n + 1 && n > 0 {
        loop {
            simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
            let spread = simplex[0].1 - simplex[n].1;
            if spread < settings.tol || (simplex[0].1 == simplex[n].1) {
                converged = true;
                break;
            }
            // Worst case this iteration needs two evaluations before a shrink.
            if t.evals + 2 > settings.max_evals {
                break;
            }

            if since_resum >= n {
                sum = vertex_sum(&simplex, n);
                since_resum = 0;
            }
            since_resum += 1;
            let centroid: Vec<f64> = sum
                .iter()
                .zip(&simplex[n].0)
                .map(|(s, w)| (s - w) / n as f64)
                .collect();
            let worst = simplex[n].0.clone();
            let (f_best, f_second_worst, f_worst) = (simplex[0].1, simplex[n - 1].1, simplex[n].1);

            let xr = affine(&centroid, &worst, -settings.reflection);
            let fr = t.eval(&xr);

            if fr > f_best {
                let xe = affine(&centroid, &xr, settings.expansion);
                let fe = t.eval(&xe);
                let new = if fe > fr { (xe, fe) } else { (xr, fr) };
                replace_worst(&mut simplex, &mut sum, new);
                continue;
            }
            if fr > f_second_worst {
                replace_worst(&mut simplex, &mut sum, (xr, fr));
                continue;
            }
            let (xc, fc, accept) = if fr > f_worst {
                let xc = affine(&centroid, &xr, settings.contraction);
                let fc = t.eval(&xc);
                let ok = fc >= fr;
                (xc, fc, ok)
            } else {
                let xc = affine(&centroid, &worst, settings.contraction);
                let fc = t.eval(&xc);
                let ok = fc > f_worst;
                (xc, fc, ok)
            };
            if accept {
                replace_worst(&mut simplex, &mut sum, (xc, fc));
                continue;
            }
            if t.evals + n > settings.max_evals {
                break;
            }
            let anchor = simplex[0].0.clone();
            for vertex in simplex.iter_mut().skip(1) {
                let x = affine(&anchor, &vertex.0, settings.shrink);
                let v = t.eval(&x);
                *vertex = (x, v);
            }
            sum = vertex_sum(&simplex, n);
            since_resum = 0;
        }
    }

    SimplexOutcome {
        best: t.best,
        value: t.best_value,
        evals: t.evals,
        converged,
    }
}
