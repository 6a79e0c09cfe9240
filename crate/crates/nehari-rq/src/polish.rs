//! Damped Newton refinement of discrete Euler-Lagrange critical points.

use crate::gridfield::{node_volumes, DiscreteFunction, ProblemFamily};
use crate::linalg::solve_dense;

/// Damped Newton refinement of `∇Φ(u) = 0` from a near-critical seed.
/// Returns the refined function, its final residual, and whether the target
/// was met.
pub(crate) fn polish_critical_point(
    u0: &DiscreteFunction,
    family: &ProblemFamily,
    target: f64,
    max_iters: usize,
) -> (DiscreteFunction, f64) {
    let vols = node_volumes(&u0.domain);
    let res_of = |g: &[f64]| {
        g.iter()
            .zip(vols.iter())
            .fold(0.0f64, |m, (gi, vi)| m.max((gi / vi).abs()))
    };
    let n = u0.values.len();
    let floor_norm = u0.max_abs();
    let mut u = u0.clone();
    let mut g = family.energy_gradient(&u);
    let mut r = res_of(&g);
    for _ in 0..max_iters {
        if r < target || !r.is_finite() {
            break;
        }
        // Finite-difference Jacobian of the gradient (the energy Hessian).
        let mut jac = vec![0.0; n * n];
        for col in 0..n {
            let h = 1e-7 * (1.0 + u.values[col].abs());
            let saved = u.values[col];
            u.values[col] = saved + h;
            let gp = family.energy_gradient(&u);
            u.values[col] = saved;
            for row in 0..n {
                jac[row * n + col] = (gp[row] - g[row]) / h;
            }
        }
        let mut rhs: Vec<f64> = g.iter().map(|x| -x).collect();
        let delta = match solve_dense(&mut jac, &mut rhs, n) {
            Some(d) => d,
            None => break,
        };
        let mut accepted = false;
        let mut step = 1.0;
        for _ in 0..25 {
            let mut trial = u.clone();
            for i in 0..n {
                trial.values[i] += step * delta[i];
            }
            let gt = family.energy_gradient(&trial);
            let rt = res_of(&gt);
            // The zero function is a residual-zero attractor; refuse steps
            // that collapse the iterate instead of refining it.
            if rt.is_finite() && rt < r && trial.max_abs() > 0.25 * floor_norm {
                u = trial;
                g = gt;
                r = rt;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (u, r)
}

