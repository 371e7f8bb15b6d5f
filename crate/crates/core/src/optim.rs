//! Small L-BFGS minimizer with backtracking line search, used by the
//! fiducial search. Works on plain `f64` slices; the caller supplies a
//! combined value-and-gradient callback and an optional projection applied
//! after every accepted step (e.g. renormalization).

/// Termination settings for [`minimize`].
pub(crate) struct Options {
    pub max_iters: usize,
    /// Stop as soon as the objective falls to this value or below.
    pub f_target: f64,
    /// Stop when the sup-norm of the gradient falls below this.
    pub grad_tol: f64,
    /// Number of curvature pairs retained.
    pub memory: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            max_iters: 4000,
            f_target: 0.0,
            grad_tol: 1e-13,
            memory: 10,
        }
    }
}

pub(crate) struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    #[allow(dead_code)]
    pub iterations: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sup_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Minimizes `f` starting from `x0`.
///
/// `eval` writes the gradient into its second argument and returns the value.
/// `project` is applied to the iterate after every accepted line-search step.
pub(crate) fn minimize<E, P>(eval: E, project: P, x0: &[f64], opts: &Options) -> Minimum
where
    E: Fn(&[f64], &mut [f64]) -> f64,
    P: Fn(&mut [f64]),
{
    let n = x0.len();
    let mut x = x0.to_vec();
    project(&mut x);

    let mut grad = vec![0.0; n];
    let mut f = eval(&x, &mut grad);

    // Curvature history for the two-loop recursion.
    let mut s_hist: Vec<Vec<f64>> = Vec::new();
    let mut y_hist: Vec<Vec<f64>> = Vec::new();
    let mut rho_hist: Vec<f64> = Vec::new();

    let mut iterations = 0;
    while iterations < opts.max_iters && f > opts.f_target && sup_norm(&grad) > opts.grad_tol {
        iterations += 1;

        // Two-loop recursion for the search direction.
        let mut dir: Vec<f64> = grad.iter().map(|g| -g).collect();
        let k = s_hist.len();
        let mut alphas = vec![0.0; k];
        for i in (0..k).rev() {
            let alpha = rho_hist[i] * dot(&s_hist[i], &dir);
            alphas[i] = alpha;
            for (d, y) in dir.iter_mut().zip(&y_hist[i]) {
                *d -= alpha * y;
            }
        }
        if k > 0 {
            let last = k - 1;
            let yy = dot(&y_hist[last], &y_hist[last]);
            if yy > 0.0 {
                let gamma = 1.0 / (rho_hist[last] * yy);
                for d in dir.iter_mut() {
                    *d *= gamma;
                }
            }
        }
        for i in 0..k {
            let beta = rho_hist[i] * dot(&y_hist[i], &dir);
            for (d, s) in dir.iter_mut().zip(&s_hist[i]) {
                *d += (alphas[i] - beta) * s;
            }
        }

        let mut slope = dot(&grad, &dir);
        if slope >= 0.0 {
            // Not a descent direction; fall back to steepest descent.
            dir = grad.iter().map(|g| -g).collect();
            slope = -dot(&grad, &grad);
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
        }

        // Backtracking Armijo line search.
        let mut step = 1.0;
        let mut trial = vec![0.0; n];
        let mut trial_grad = vec![0.0; n];
        let mut accepted = false;
        for _ in 0..60 {
            for ((t, xi), di) in trial.iter_mut().zip(&x).zip(&dir) {
                *t = xi + step * di;
            }
            project(&mut trial);
            let f_trial = eval(&trial, &mut trial_grad);
            if f_trial <= f + 1e-4 * step * slope {
                // Curvature update.
                let s: Vec<f64> = trial.iter().zip(&x).map(|(a, b)| a - b).collect();
                let y: Vec<f64> = trial_grad.iter().zip(&grad).map(|(a, b)| a - b).collect();
                let sy = dot(&s, &y);
                if sy > 1e-300 {
                    if s_hist.len() == opts.memory {
                        s_hist.remove(0);
                        y_hist.remove(0);
                        rho_hist.remove(0);
                    }
                    s_hist.push(s);
                    y_hist.push(y);
                    rho_hist.push(1.0 / sy);
                }
                x.copy_from_slice(&trial);
                grad.copy_from_slice(&trial_grad);
                f = f_trial;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            if s_hist.is_empty() {
                break; // Stalled even along steepest descent.
            }
            // Drop stale curvature information and retry from scratch.
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
        }
    }

    Minimum { x, f, iterations }
}
