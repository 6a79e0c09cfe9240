//! Extremal values of 0-homogeneous quotients over the discrete function
//! space, by normalized multi-start projected gradient descent.
//!
//! The descent is generic over a black-box quotient: gradients are central
//! finite differences in nodal coordinates, the trial step starts from a
//! safeguarded Barzilai-Borwein length and backtracks under an Armijo test,
//! and the iterate is renormalized after every accepted step (free by
//! 0-homogeneity). Iterates may be projected onto the nonnegative cone.
//! Starts are independent, seeded, and merged deterministically by
//! (value, start index), so parallel execution cannot change the result.

use crate::fibering::{Exponents3, Exponents4};
use crate::gridfield::{integrate, DiscreteFunction, Domain};
use crate::quotients::{self, Flavor};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Armijo sufficient-decrease constant.
const ARMIJO_C1: f64 = 1e-4;
/// Backtracking shrink factor.
const BACKTRACK: f64 = 0.5;
/// Maximum backtracking halvings before a step counts as stalled.
const MAX_BACKTRACKS: usize = 48;
/// Relative drift allowed in the 0-homogeneity check `f(2u) vs f(u)`.
const HOMOGENEITY_TOL: f64 = 1e-6;

/// How iterates are normalized after each step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Normalization {
    /// Sup-norm of the nodal values fixed to 1.
    MaxAbs,
    /// `∫|u|^r = 1` on the domain's quadrature.
    Lp(f64),
}

/// Controls for [`minimize_quotient`] and the named extremal estimators.
#[derive(Debug, Clone)]
pub struct DescentOptions {
    pub starts: usize,
    pub max_iters: usize,
    /// Tolerance on the sup-norm of the projected gradient, relative to
    /// max(1, |value|).
    pub tol_grad: f64,
    /// Relative step of the central-difference descent gradient.
    pub fd_step: f64,
    pub seed: u64,
    /// Project iterates onto nonnegative nodal values.
    pub positivity: bool,
    pub normalization: Normalization,
}

impl Default for DescentOptions {
    fn default() -> Self {
        DescentOptions {
            starts: 4,
            max_iters: 4000,
            tol_grad: 1e-7,
            fd_step: 1e-6,
            seed: 0,
            positivity: true,
            normalization: Normalization::MaxAbs,
        }
    }
}

/// An estimated quotient extremal value with its minimizer and diagnostics.
#[derive(Debug, Clone)]
pub struct ExtremalEstimate {
    pub value: f64,
    pub minimizer: DiscreteFunction,
    pub starts: usize,
    /// Best value reached by each start; infeasible starts carry +inf.
    pub per_start_values: Vec<f64>,
    /// Iterations used by the winning start.
    pub iterations: usize,
    /// Final projected-gradient sup-norm of the winning start.
    pub grad_norm: f64,
    /// Whether the winning start met the gradient tolerance.
    pub converged: bool,
    pub resolution: Vec<usize>,
}

struct StartOutcome {
    value: f64,
    u: Option<DiscreteFunction>,
    iterations: usize,
    grad_norm: f64,
    converged: bool,
}

fn lp_norm(u: &DiscreteFunction, r: f64) -> f64 {
    integrate(u, &[r], 2.0)
        .map(|b| b.lebesgue(r).unwrap().powf(1.0 / r))
        .unwrap_or(0.0)
}

fn normalize(u: &mut DiscreteFunction, normalization: Normalization) -> bool {
    let s = match normalization {
        Normalization::MaxAbs => u.max_abs(),
        Normalization::Lp(r) => lp_norm(u, r),
    };
    if !(s > 0.0) || !s.is_finite() {
        return false;
    }
    for v in &mut u.values {
        *v /= s;
    }
    true
}

/// Central-difference gradient of `f` in nodal coordinates. Falls back to
/// one-sided differences when a probe leaves the quotient's domain.
fn fd_gradient<F>(f: &F, u: &DiscreteFunction, f0: f64, h: f64) -> Vec<f64>
where
    F: Fn(&DiscreteFunction) -> f64 + Sync,
{
    let n = u.values.len();
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut probe = u.clone();
            probe.values[i] = u.values[i] + h;
            let fp = f(&probe);
            probe.values[i] = u.values[i] - h;
            let fm = f(&probe);
            if fp.is_finite() && fm.is_finite() {
                (fp - fm) / (2.0 * h)
            } else if fp.is_finite() {
                (fp - f0) / h
            } else if fm.is_finite() {
                (f0 - fm) / h
            } else {
                0.0
            }
        })
        .collect()
}

/// Projected gradient for the nonnegative cone: at an active bound only the
/// inward component counts.
fn projected_gradient(g: &[f64], u: &[f64], positivity: bool) -> Vec<f64> {
    if !positivity {
        return g.to_vec();
    }
    g.iter()
        .zip(u.iter())
        .map(|(&gi, &ui)| if ui > 0.0 { gi } else { gi.min(0.0) })
        .collect()
}

fn descend_one<F>(
    f: &F,
    start: DiscreteFunction,
    opts: &DescentOptions,
) -> StartOutcome
where
    F: Fn(&DiscreteFunction) -> f64 + Sync,
{
    let infeasible = StartOutcome {
        value: f64::INFINITY,
        u: None,
        iterations: 0,
        grad_norm: f64::INFINITY,
        converged: false,
    };
    let mut u = start;
    if opts.positivity {
        for v in &mut u.values {
            *v = v.max(0.0);
        }
    }
    if !normalize(&mut u, opts.normalization) {
        return infeasible;
    }
    let mut fval = f(&u);
    if !fval.is_finite() {
        return infeasible;
    }
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
    let mut grad_norm = f64::INFINITY;
    let mut converged = false;
    let mut iters = 0;
    for it in 0..opts.max_iters {
        iters = it + 1;
        let h = opts.fd_step * u.max_abs().max(1e-3);
        let g = fd_gradient(f, &u, fval, h);
        let pg = projected_gradient(&g, &u.values, opts.positivity);
        grad_norm = pg.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if grad_norm <= opts.tol_grad * fval.abs().max(1.0) {
            converged = true;
            break;
        }
        // Barzilai-Borwein trial step, safeguarded; plain scaled step on the
        // first iteration.
        let default_step = 0.1 * u.max_abs().max(1e-6) / grad_norm;
        let mut step = match &prev {
            Some((pu, pg_old)) => {
                let mut ss = 0.0;
                let mut sy = 0.0;
                for i in 0..u.values.len() {
                    let s = u.values[i] - pu[i];
                    let y = g[i] - pg_old[i];
                    ss += s * s;
                    sy += s * y;
                }
                if sy > 0.0 && ss > 0.0 {
                    (ss / sy).clamp(1e-6 * default_step, 1e6 * default_step)
                } else {
                    default_step
                }
            }
            None => default_step,
        };
        let mut accepted = false;
        for _ in 0..MAX_BACKTRACKS {
            let mut v = u.clone();
            for i in 0..v.values.len() {
                v.values[i] = u.values[i] - step * g[i];
                if opts.positivity && v.values[i] < 0.0 {
                    v.values[i] = 0.0;
                }
            }
            if v.is_zero() {
                step *= BACKTRACK;
                continue;
            }
            let fv = f(&v);
            // Armijo decrease along the actual (projected) displacement.
            let dec: f64 = g
                .iter()
                .zip(u.values.iter().zip(v.values.iter()))
                .map(|(&gi, (&ui, &vi))| gi * (ui - vi))
                .sum();
            if fv.is_finite() && fv <= fval - ARMIJO_C1 * dec && dec >= 0.0 {
                prev = Some((u.values.clone(), g.clone()));
                u = v;
                debug_assert!(fv <= fval + 1e-12 * fval.abs().max(1.0), "monotone descent");
                fval = fv;
                if !normalize(&mut u, opts.normalization) {
                    return infeasible;
                }
                accepted = true;
                break;
            }
            step *= BACKTRACK;
        }
        if !accepted {
            break;
        }
    }
    StartOutcome {
        value: fval,
        u: Some(u),
        iterations: iters,
        grad_norm,
        converged,
    }
}

/// Principal smooth positive mode of the domain, the first multi-start seed.
pub fn smooth_mode(domain: &Domain) -> DiscreteFunction {
    use std::f64::consts::PI;
    match domain {
        Domain::Interval { length, .. } => {
            let l = *length;
            DiscreteFunction::sample(domain.clone(), move |x| (PI * x[0] / l).sin())
        }
        Domain::Rectangle { lengths, .. } => {
            let l = *lengths;
            DiscreteFunction::sample(domain.clone(), move |x| {
                (PI * x[0] / l[0]).sin() * (PI * x[1] / l[1]).sin()
            })
        }
        Domain::Radial { radius, .. } => {
            let r0 = *radius;
            DiscreteFunction::sample(domain.clone(), move |x| (PI * x[0] / (2.0 * r0)).cos())
        }
    }
}

fn random_hat(domain: &Domain, rng: &mut ChaCha8Rng) -> DiscreteFunction {
    match domain {
        Domain::Interval { length, .. } => {
            let c = rng.gen_range(0.2..0.8) * length;
            let w = rng.gen_range(0.1..0.4) * length;
            DiscreteFunction::sample(domain.clone(), move |x| {
                (1.0 - (x[0] - c).abs() / w).max(0.0)
            })
        }
        Domain::Rectangle { lengths, .. } => {
            let cx = rng.gen_range(0.2..0.8) * lengths[0];
            let cy = rng.gen_range(0.2..0.8) * lengths[1];
            let wx = rng.gen_range(0.1..0.4) * lengths[0];
            let wy = rng.gen_range(0.1..0.4) * lengths[1];
            DiscreteFunction::sample(domain.clone(), move |x| {
                (1.0 - (x[0] - cx).abs() / wx).max(0.0) * (1.0 - (x[1] - cy).abs() / wy).max(0.0)
            })
        }
        Domain::Radial { radius, .. } => {
            let w = rng.gen_range(0.1..0.6) * radius;
            DiscreteFunction::sample(domain.clone(), move |x| (1.0 - x[0] / w).max(0.0))
        }
    }
}

fn random_field(domain: &Domain, rng: &mut ChaCha8Rng) -> DiscreteFunction {
    let n = domain.interior_len();
    let mut values: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    // A couple of local averaging passes keep the gradient integrals sane
    // on 1D-indexed grids.
    if !matches!(domain, Domain::Rectangle { .. }) {
        for _ in 0..2 {
            let old = values.clone();
            for i in 0..n {
                let left = if i > 0 { old[i - 1] } else { 0.0 };
                let right = if i + 1 < n { old[i + 1] } else { 0.0 };
                values[i] = 0.25 * left + 0.5 * old[i] + 0.25 * right;
            }
        }
    }
    DiscreteFunction {
        domain: domain.clone(),
        values,
    }
}

/// Deterministic multi-start seeds: the smooth mode, then alternating
/// random-center hats and seeded positive fields.
pub fn start_functions(domain: &Domain, starts: usize, seed: u64) -> Vec<DiscreteFunction> {
    let mut out = vec![smooth_mode(domain)];
    let mut k = 1u64;
    while out.len() < starts {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ k.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        if k % 2 == 1 {
            out.push(random_hat(domain, &mut rng));
        } else {
            out.push(random_field(domain, &mut rng));
        }
        k += 1;
    }
    out
}

/// Minimize a 0-homogeneous quotient over the discrete function space from
/// the given start functions. Starts run in parallel; the best outcome by
/// (value, start index) wins.
pub(crate) fn minimize_with_starts<F>(
    f: &F,
    domain: &Domain,
    opts: &DescentOptions,
    starts: Vec<DiscreteFunction>,
) -> Result<ExtremalEstimate>
where
    F: Fn(&DiscreteFunction) -> f64 + Sync,
{
    if starts.is_empty() {
        return Err(Error::InvalidInput("need at least one start".into()));
    }
    // 0-homogeneity check on the first feasible start.
    let mut checked = false;
    for s in &starts {
        let mut u = s.clone();
        if opts.positivity {
            for v in &mut u.values {
                *v = v.max(0.0);
            }
        }
        if !normalize(&mut u, opts.normalization) {
            continue;
        }
        let f1 = f(&u);
        if !f1.is_finite() {
            continue;
        }
        let f2 = f(&u.scaled(2.0));
        let drift = (f2 - f1).abs() / f1.abs().max(1e-300);
        if drift > HOMOGENEITY_TOL {
            return Err(Error::NotHomogeneous { drift });
        }
        checked = true;
        break;
    }
    if !checked {
        return Err(Error::InfeasibleParameter { lambda: f64::NAN });
    }
    let outcomes: Vec<StartOutcome> = starts
        .into_par_iter()
        .map(|s| descend_one(f, s, opts))
        .collect();
    let per_start_values: Vec<f64> = outcomes.iter().map(|o| o.value).collect();
    let best = outcomes
        .iter()
        .enumerate()
        .filter(|(_, o)| o.u.is_some())
        .min_by(|(i, a), (j, b)| {
            a.value
                .partial_cmp(&b.value)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(i.cmp(j))
        });
    let (_, best) = best.ok_or(Error::InfeasibleParameter { lambda: f64::NAN })?;
    Ok(ExtremalEstimate {
        value: best.value,
        minimizer: best.u.clone().expect("feasible start has a minimizer"),
        starts: per_start_values.len(),
        per_start_values,
        iterations: best.iterations,
        grad_norm: best.grad_norm,
        converged: best.converged,
        resolution: domain.resolution(),
    })
}

/// Minimize an arbitrary 0-homogeneous quotient over the domain.
///
/// The quotient returns its value at a nonzero function, or any non-finite
/// value where it is undefined; undefined probes act as +inf barriers.
pub fn minimize_quotient<F>(
    quotient: F,
    domain: &Domain,
    opts: &DescentOptions,
) -> Result<ExtremalEstimate>
where
    F: Fn(&DiscreteFunction) -> f64 + Sync,
{
    let starts = start_functions(domain, opts.starts.max(1), opts.seed);
    minimize_with_starts(&quotient, domain, opts, starts)
}

/// Descent-vs-oracle gradient agreement: the sup-norm distance between the
/// descent gradient (default step) and a central difference with step `h`,
/// relative to the oracle gradient's sup-norm.
pub fn gradient_check<F>(quotient: F, u: &DiscreteFunction, h: f64) -> f64
where
    F: Fn(&DiscreteFunction) -> f64 + Sync,
{
    let f0 = quotient(u);
    let descent_h = 1e-6 * u.max_abs().max(1e-3);
    let g1 = fd_gradient(&quotient, u, f0, descent_h);
    let g2 = fd_gradient(&quotient, u, f0, h);
    let scale = g2.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let diff = g1
        .iter()
        .zip(g2.iter())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    if scale == 0.0 {
        if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        diff / scale
    }
}

fn coeffs3_of(u: &DiscreteFunction, exp: &Exponents3) -> Option<crate::fibering::FiberCoeffs3> {
    let b = integrate(u, &[exp.q, exp.gamma], exp.p).ok()?;
    crate::fibering::FiberCoeffs3::new(
        b.grad_p,
        b.lebesgue(exp.q).unwrap(),
        b.lebesgue(exp.gamma).unwrap(),
        *exp,
    )
    .ok()
}

fn coeffs4_of(u: &DiscreteFunction, exp: &Exponents4) -> Option<crate::fibering::FiberCoeffs4> {
    let b = integrate(u, &[exp.q, exp.alpha, exp.gamma], exp.p).ok()?;
    crate::fibering::FiberCoeffs4::new(
        b.grad_p,
        b.lebesgue(exp.q).unwrap(),
        b.lebesgue(exp.alpha).unwrap(),
        b.lebesgue(exp.gamma).unwrap(),
        *exp,
    )
    .ok()
}

/// Extremal value of the three-term quotient `lambda(u)` over the domain.
pub fn lambda_star(
    domain: &Domain,
    exp: &Exponents3,
    opts: &DescentOptions,
) -> Result<ExtremalEstimate> {
    if !exp.subcritical_for(domain.dim()) {
        return Err(Error::Precondition(format!(
            "gamma = {} is not subcritical for dimension {}",
            exp.gamma,
            domain.dim()
        )));
    }
    let e = *exp;
    let mut o = opts.clone();
    o.normalization = Normalization::Lp(e.gamma);
    let f = move |u: &DiscreteFunction| match coeffs3_of(u, &e) {
        Some(c) => quotients::lambda_u(&c).value,
        None => f64::INFINITY,
    };
    minimize_quotient(f, domain, &o)
}

/// Extremal value of the four-term quotient `lambda_n(u)`.
pub fn lambda_n_star(
    domain: &Domain,
    exp: &Exponents4,
    opts: &DescentOptions,
) -> Result<ExtremalEstimate> {
    lambda_star_4(domain, exp, opts, Flavor::N)
}

/// Extremal value of the four-term quotient `lambda_e(u)`.
pub fn lambda_e_star(
    domain: &Domain,
    exp: &Exponents4,
    opts: &DescentOptions,
) -> Result<ExtremalEstimate> {
    lambda_star_4(domain, exp, opts, Flavor::E)
}

fn lambda_star_4(
    domain: &Domain,
    exp: &Exponents4,
    opts: &DescentOptions,
    flavor: Flavor,
) -> Result<ExtremalEstimate> {
    if !exp.subcritical_for(domain.dim()) {
        return Err(Error::Precondition(format!(
            "gamma = {} is not subcritical for dimension {}",
            exp.gamma,
            domain.dim()
        )));
    }
    let e = *exp;
    let mut o = opts.clone();
    o.normalization = Normalization::Lp(e.gamma);
    let f = move |u: &DiscreteFunction| match coeffs4_of(u, &e) {
        Some(c) => match flavor {
            Flavor::N => quotients::lambda_n_quotient(&c).value,
            Flavor::E => quotients::lambda_e_quotient(&c).value,
        },
        None => f64::INFINITY,
    };
    minimize_quotient(f, domain, &o)
}

/// Which member of a μ-quotient pair to minimize.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MuSign {
    Plus,
    Minus,
}

/// Extremal value of `mu^{flavor,±}_λ(u)` at a fixed admissible λ.
pub fn mu_extremal(
    domain: &Domain,
    exp: &Exponents4,
    lambda: f64,
    sign: MuSign,
    flavor: Flavor,
    opts: &DescentOptions,
) -> Result<ExtremalEstimate> {
    if !(lambda > 0.0) {
        return Err(Error::Precondition(format!(
            "mu-quotient extremal needs lambda > 0, got {lambda}"
        )));
    }
    let e = *exp;
    let mut o = opts.clone();
    o.normalization = Normalization::Lp(e.gamma);
    let f = move |u: &DiscreteFunction| {
        let c = match coeffs4_of(u, &e) {
            Some(c) => c,
            None => return f64::INFINITY,
        };
        match quotients::mu_pm_quotients(&c, lambda, flavor) {
            Ok((plus, minus)) => match sign {
                MuSign::Plus => plus.value,
                MuSign::Minus => minus.value,
            },
            Err(_) => f64::INFINITY,
        }
    };
    minimize_quotient(f, domain, &o).map_err(|err| match err {
        // Every start infeasible means lambda exceeds the admissible window.
        Error::InfeasibleParameter { .. } => Error::Precondition(format!(
            "lambda = {lambda} is outside the admissible window for the mu-quotient"
        )),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn e3() -> Exponents3 {
        Exponents3::new(1.5, 2.0, 3.0).unwrap()
    }

    #[test]
    fn constant_quotient_is_immediately_stationary() {
        let d = Domain::interval(1.0, 21).unwrap();
        let est = minimize_quotient(|_u| 7.0, &d, &DescentOptions::default()).unwrap();
        assert_eq!(est.value, 7.0);
        assert!(est.converged);
        assert_eq!(est.grad_norm, 0.0);
        assert_eq!(est.iterations, 1);
    }

    #[test]
    fn quadratic_ratio_reproduces_dirichlet_eigenvalue() {
        let d = Domain::interval(1.0, 51).unwrap();
        let ratio = |u: &DiscreteFunction| {
            let b = integrate(u, &[2.0], 2.0).unwrap();
            let m = b.lebesgue(2.0).unwrap();
            if m > 0.0 {
                b.grad_p / m
            } else {
                f64::INFINITY
            }
        };
        let mut opts = DescentOptions::default();
        opts.starts = 3;
        let est = minimize_quotient(ratio, &d, &opts).unwrap();
        assert!(
            (est.value - PI * PI).abs() < 0.01 * PI * PI,
            "value {} vs pi^2",
            est.value
        );
    }

    #[test]
    fn homogeneity_violation_is_rejected() {
        let d = Domain::interval(1.0, 11).unwrap();
        let f = |u: &DiscreteFunction| {
            let b = integrate(u, &[2.0], 2.0).unwrap();
            b.lebesgue(2.0).unwrap()
        };
        assert!(matches!(
            minimize_quotient(f, &d, &DescentOptions::default()),
            Err(Error::NotHomogeneous { .. })
        ));
    }

    #[test]
    fn lambda_star_bounds_trial_functions() {
        let d = Domain::interval(1.0, 41).unwrap();
        let mut opts = DescentOptions::default();
        opts.starts = 2;
        opts.max_iters = 800;
        let est = lambda_star(&d, &e3(), &opts).unwrap();
        assert!(est.value > 0.0 && est.value.is_finite());
        // Infimum bound at the hat trial function.
        let hat = DiscreteFunction::sample(d, |x| 1.0 - (2.0 * x[0] - 1.0).abs());
        let c = coeffs3_of(&hat, &e3()).unwrap();
        assert!(est.value <= quotients::lambda_u(&c).value + 1e-9);
    }

    #[test]
    fn supercritical_exponents_are_rejected() {
        let d = Domain::radial(5.0, 41, 3).unwrap();
        // p* = 6 for p = 2 in 3D.
        let e = Exponents3::new(1.5, 2.0, 6.5).unwrap();
        assert!(matches!(
            lambda_star(&d, &e, &DescentOptions::default()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn gradient_check_on_smooth_quotients() {
        let d = Domain::interval(1.0, 31).unwrap();
        let u = DiscreteFunction::sample(d.clone(), |x| {
            (PI * x[0]).sin() + 0.2 * (2.0 * PI * x[0]).sin().abs()
        });
        let ratio = |w: &DiscreteFunction| {
            let b = integrate(w, &[2.0], 2.0).unwrap();
            let m = b.lebesgue(2.0).unwrap();
            if m > 0.0 {
                b.grad_p / m
            } else {
                f64::INFINITY
            }
        };
        assert!(gradient_check(ratio, &u, 1e-5) < 1e-6);
        let e = e3();
        let lam = move |w: &DiscreteFunction| match coeffs3_of(w, &e) {
            Some(c) => quotients::lambda_u(&c).value,
            None => f64::INFINITY,
        };
        assert!(gradient_check(lam, &u, 1e-5) < 1e-5);
        // Constant quotient: both gradients vanish identically.
        assert_eq!(gradient_check(|_| 3.0, &u, 1e-5), 0.0);
    }

    #[test]
    fn normalization_is_free_by_homogeneity() {
        let d = Domain::interval(1.0, 31).unwrap();
        let e = e3();
        let u = DiscreteFunction::sample(d, |x| x[0] * (1.0 - x[0]) + 0.1);
        let f = |w: &DiscreteFunction| quotients::lambda_u(&coeffs3_of(w, &e).unwrap()).value;
        let mut v = u.clone();
        assert!(normalize(&mut v, Normalization::Lp(e.gamma)));
        assert!((f(&u) - f(&v)).abs() <= 1e-12 * f(&u).abs());
    }

    #[test]
    fn identical_seed_gives_identical_estimate() {
        let d = Domain::interval(1.0, 31).unwrap();
        let mut opts = DescentOptions::default();
        opts.starts = 3;
        opts.max_iters = 200;
        opts.seed = 42;
        let a = lambda_star(&d, &e3(), &opts).unwrap();
        let b = lambda_star(&d, &e3(), &opts).unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!(a.minimizer.values, b.minimizer.values);
        assert_eq!(a.per_start_values, b.per_start_values);
    }

    #[test]
    fn mu_extremal_rejects_bad_lambda() {
        let d = Domain::interval(1.0, 21).unwrap();
        let e = Exponents4::new(1.2, 1.5, 2.0, 3.0).unwrap();
        assert!(matches!(
            mu_extremal(&d, &e, -1.0, MuSign::Plus, Flavor::N, &DescentOptions::default()),
            Err(Error::Precondition(_))
        ));
        // Far above every lambda_n(u): no start is feasible.
        assert!(matches!(
            mu_extremal(&d, &e, 1e9, MuSign::Plus, Flavor::N, &DescentOptions::default()),
            Err(Error::Precondition(_))
        ));
    }
}
