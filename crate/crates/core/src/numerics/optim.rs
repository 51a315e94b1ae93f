//! Nelder–Mead downhill simplex.

use super::NumericsError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    /// Converged once every vertex lies within `tol` (max-norm) of the best one.
    pub tol: f64,
    /// Budget on objective evaluations.
    pub max_iter: usize,
    /// Edge length of the initial simplex, per coordinate.
    pub initial_step: f64,
    /// Fresh simplices built around the incumbent after the first run.
    pub restarts: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 5000,
            initial_step: 0.1,
            restarts: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub converged: bool,
    pub evaluations: usize,
}

fn diameter(simplex: &[Vec<f64>]) -> f64 {
    let best = &simplex[0];
    simplex[1..]
        .iter()
        .flat_map(|v| v.iter().zip(best).map(|(a, b)| (a - b).abs()))
        .fold(0.0, f64::max)
}

struct Run {
    x: Vec<f64>,
    value: f64,
    converged: bool,
    evaluations: usize,
}

fn run_simplex<F: FnMut(&[f64]) -> f64>(
    objective: &mut F,
    start: &[f64],
    start_value: f64,
    step: f64,
    tol: f64,
    budget: usize,
) -> Run {
    let n = start.len();
    let mut eval = |x: &[f64], count: &mut usize| {
        *count += 1;
        let v = objective(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut evaluations = 0;
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    let mut values: Vec<f64> = Vec::with_capacity(n + 1);
    simplex.push(start.to_vec());
    values.push(start_value);
    for i in 0..n {
        let mut v = start.to_vec();
        v[i] += step;
        values.push(eval(&v, &mut evaluations));
        simplex.push(v);
    }

    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    loop {
        // Stable sort keeps earlier vertices first among ties.
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        if diameter(&simplex) < tol {
            return Run {
                x: simplex.swap_remove(0),
                value: values[0],
                converged: true,
                evaluations,
            };
        }
        if evaluations >= budget {
            return Run {
                x: simplex.swap_remove(0),
                value: values[0],
                converged: false,
                evaluations,
            };
        }

        let mut centroid = vec![0.0; n];
        for v in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / n as f64;
            }
        }
        let towards = |coef: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n])
                .map(|(c, w)| c + coef * (c - w))
                .collect()
        };

        let reflected = towards(alpha);
        let fr = eval(&reflected, &mut evaluations);
        if fr < values[0] {
            let expanded = towards(alpha * gamma);
            let fe = eval(&expanded, &mut evaluations);
            if fe < fr {
                simplex[n] = expanded;
                values[n] = fe;
            } else {
                simplex[n] = reflected;
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            simplex[n] = reflected;
            values[n] = fr;
            continue;
        }
        let (contracted, fc) = if fr < values[n] {
            let c = towards(alpha * rho);
            let fc = eval(&c, &mut evaluations);
            (c, fc)
        } else {
            let c = towards(-rho);
            let fc = eval(&c, &mut evaluations);
            (c, fc)
        };
        if fc < values[n].min(fr) {
            simplex[n] = contracted;
            values[n] = fc;
            continue;
        }
        // Shrink towards the best vertex.
        let best = simplex[0].clone();
        for i in 1..=n {
            for (x, b) in simplex[i].iter_mut().zip(&best) {
                *x = b + sigma * (*x - b);
            }
            values[i] = eval(&simplex[i], &mut evaluations);
        }
    }
}

/// Minimises `objective` from `start`.
///
/// After the first simplex collapses, the search is restarted from fresh
/// simplices around the incumbent (at most `opts.restarts` times) until a restart
/// fails to improve it; a run that exhausts `max_iter` is reported with
/// `converged = false` and its best point.
pub fn nelder_mead_minimize<F: FnMut(&[f64]) -> f64>(
    mut objective: F,
    start: &[f64],
    opts: &NelderMeadOptions,
) -> Result<Minimum, NumericsError> {
    if start.is_empty() {
        return Err(NumericsError::Domain("start vector must be non-empty".into()));
    }
    if !(opts.tol > 0.0) || !(opts.initial_step > 0.0) {
        return Err(NumericsError::Domain(
            "Nelder-Mead tolerance and initial step must be positive".into(),
        ));
    }
    let f0 = objective(start);
    if !f0.is_finite() {
        return Err(NumericsError::NonFinite { at: f0 });
    }
    let mut total_evals = 1;
    let mut run = run_simplex(
        &mut objective,
        start,
        f0,
        opts.initial_step,
        opts.tol,
        opts.max_iter.saturating_sub(1),
    );
    total_evals += run.evaluations;
    for _ in 0..opts.restarts {
        let budget = opts.max_iter.saturating_sub(total_evals);
        if budget == 0 {
            break;
        }
        let step = if run.converged {
            (opts.initial_step * 0.1).max(10.0 * opts.tol)
        } else {
            opts.initial_step
        };
        let next = run_simplex(&mut objective, &run.x, run.value, step, opts.tol, budget);
        total_evals += next.evaluations;
        // A restart from a collapsed simplex that finds nothing better confirms it.
        let improved = next.value < run.value - 1e-12 * run.value.abs().max(1.0);
        let was_converged = run.converged;
        if next.value <= run.value {
            run = Run {
                converged: next.converged,
                ..next
            };
        }
        if was_converged && !improved {
            run.converged = true;
            break;
        }
    }
    Ok(Minimum {
        x: run.x,
        value: run.value,
        converged: run.converged,
        evaluations: total_evals,
    })
}
