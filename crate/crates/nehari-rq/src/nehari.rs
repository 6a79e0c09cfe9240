//! Nehari-manifold minimizers, branch continuation, and the numerical
//! applicability limit.
//!
//! Solutions are found by minimizing the projected energy `u -> Φ(t(u) u)`
//! over the normalized nonnegative cone, where `t(u)` is the fiber critical
//! point of the requested branch. The projection removes the manifold
//! constraint, and the objective inherits 0-homogeneity, so the descent
//! engine from [`crate::extremal`] applies unchanged. Accepted minimizers
//! are refined by a damped Newton iteration on the discrete Euler-Lagrange
//! gradient, which realizes the Lagrange-multiplier step: away from the
//! degenerate set, fiber-critical minimizers are unconstrained critical
//! points of the energy.

use crate::extremal::{minimize_with_starts, start_functions, DescentOptions, Normalization};
use crate::fibering::{
    phi_fiber_3, phi_fiber_4, CriticalPoint, CurvatureSign, Exponents3, Exponents4,
    FiberCoeffs3, FiberCoeffs4,
};
use crate::gridfield::{integrate, residual, DiscreteFunction, Domain, ProblemFamily};
use crate::polish::polish_critical_point;
use crate::quotients::{self, Flavor};
use crate::{Error, Result};
use std::io::Write;

/// Default sup-norm residual accepted for a solution.
pub const TOL_RES: f64 = 1e-6;
/// Default tolerance on the fiber derivative at t = 1 (manifold membership).
pub const TOL_FIBER: f64 = 1e-9;
/// Relative band below which the fiber second derivative is degenerate.
pub const TOL_PHI2_DEGENERATE: f64 = 1e-8;

/// Which extremal of the fibering map a solution sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// Fiber local minimum of the three-term energy (ground-state branch).
    Plus,
    /// Fiber local maximum of the three-term energy.
    Minus,
    /// Middle fiber point of the four-term energy (positive curvature).
    Rn1,
    /// Outer fiber point of the four-term energy with negative energy.
    Rn2,
}

/// Solver controls for the Nehari minimizations.
#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub descent: DescentOptions,
    pub tol_res: f64,
    pub tol_fiber: f64,
    /// Refine the scaled minimizer by damped Newton on the energy gradient.
    pub polish: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            descent: DescentOptions::default(),
            tol_res: TOL_RES,
            tol_fiber: TOL_FIBER,
            polish: true,
        }
    }
}

/// A located Nehari-manifold extremal with its verification data.
#[derive(Debug, Clone)]
pub struct NehariSolution {
    pub u: DiscreteFunction,
    pub family: ProblemFamily,
    pub branch: Branch,
    /// Energy value Φ(u).
    pub energy: f64,
    /// Fiber derivative at t = 1 (manifold membership defect).
    pub fiber_d1: f64,
    /// Fiber second derivative at t = 1.
    pub phi2: f64,
    pub residual: f64,
    /// λ < λ(u) for the three-term branches; per-u μ-window membership for
    /// the four-term branches.
    pub admissible: bool,
    /// |phi2| fell inside the degenerate band.
    pub degenerate: bool,
    pub converged: bool,
}

impl NehariSolution {
    pub fn lambda(&self) -> f64 {
        match &self.family {
            ProblemFamily::ConvexConcave { lambda, .. } => *lambda,
            ProblemFamily::FourTerm { lambda, .. } => *lambda,
            ProblemFamily::ZeroMass { .. } => unreachable!("not a Nehari family"),
        }
    }

    pub fn mu(&self) -> Option<f64> {
        match &self.family {
            ProblemFamily::FourTerm { mu, .. } => Some(*mu),
            _ => None,
        }
    }
}

fn coeffs3_of(u: &DiscreteFunction, exp: &Exponents3) -> Option<FiberCoeffs3> {
    let b = integrate(u, &[exp.q, exp.gamma], exp.p).ok()?;
    FiberCoeffs3::new(
        b.grad_p,
        b.lebesgue(exp.q).unwrap(),
        b.lebesgue(exp.gamma).unwrap(),
        *exp,
    )
    .ok()
}

fn coeffs4_of(u: &DiscreteFunction, exp: &Exponents4) -> Option<FiberCoeffs4> {
    let b = integrate(u, &[exp.q, exp.alpha, exp.gamma], exp.p).ok()?;
    FiberCoeffs4::new(
        b.grad_p,
        b.lebesgue(exp.q).unwrap(),
        b.lebesgue(exp.alpha).unwrap(),
        b.lebesgue(exp.gamma).unwrap(),
        *exp,
    )
    .ok()
}

/// Fast three-term fiber roots: bisection on either side of the closed-form
/// quotient maximizer instead of the full sign scan. Agrees with
/// [`critical_points_3term`]; used in the descent hot path.
fn fiber_roots_3term_fast(c: &FiberCoeffs3, lambda: f64) -> Option<(f64, f64)> {
    let e = c.exp;
    let lu = quotients::lambda_u(c).value;
    if !(lambda > 0.0) || lambda >= lu * (1.0 - 1e-12) {
        return None;
    }
    // ψ(t) = a t^{p-q} − λ b_q − c t^{γ-q}; negative at both ends, positive
    // at the quotient maximizer.
    let psi = |t: f64| {
        c.a * crate::gridfield::pow_abs(t, e.p - e.q) - lambda * c.b_q
            - c.c * crate::gridfield::pow_abs(t, e.gamma - e.q)
    };
    let s_star = quotients::s_max(c);
    let bisect = |mut lo: f64, mut hi: f64, rising: bool| -> f64 {
        for _ in 0..120 {
            if (hi - lo) <= 1e-15 * hi {
                break;
            }
            let mid = 0.5 * (lo + hi);
            let below = psi(mid) < 0.0;
            if below == rising {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let mut t_lo = 0.5 * s_star;
    let mut guard = 0;
    while psi(t_lo) >= 0.0 {
        t_lo *= 0.5;
        guard += 1;
        if guard > 300 {
            return None;
        }
    }
    let t_plus = bisect(t_lo, s_star, true);
    let mut t_hi = 2.0 * s_star;
    guard = 0;
    while psi(t_hi) >= 0.0 {
        t_hi *= 2.0;
        guard += 1;
        if guard > 300 {
            return None;
        }
    }
    let t_minus = bisect(s_star, t_hi, false);
    Some((t_plus, t_minus))
}

/// Fast four-term fiber roots, classified, using the level-set geometry of
/// the four-term quotient: its fiber critical points split the ray into
/// monotone pieces, one bisection per crossing.
fn fiber_roots_4term_fast(
    c: &FiberCoeffs4,
    lambda: f64,
    mu: f64,
) -> Vec<CriticalPoint> {
    let rn = |t: f64| quotients::rn_lambda_4term(c, lambda, t).expect("t > 0");
    let bisect = |mut lo: f64, mut hi: f64, descending: bool| -> f64 {
        for _ in 0..120 {
            if (hi - lo) <= 1e-15 * hi {
                break;
            }
            let mid = 0.5 * (lo + hi);
            let above = rn(mid) > mu;
            if above == descending {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let mut out = Vec::new();
    let mut push = |t: f64, curv: CurvatureSign| out.push(CriticalPoint { t, curvature: curv });
    match quotients::t_pm(c, lambda, Flavor::N) {
        Ok((tn_plus, tn_minus)) => {
            let mu_plus = rn(tn_plus);
            let mu_minus = rn(tn_minus);
            // Descending head: +inf down to the local minimum value.
            if mu > mu_plus {
                let mut lo = 0.5 * tn_plus;
                let mut guard = 0;
                while rn(lo) <= mu {
                    lo *= 0.5;
                    guard += 1;
                    if guard > 300 {
                        break;
                    }
                }
                push(bisect(lo, tn_plus, true), CurvatureSign::Negative);
            }
            // Rising middle: local minimum up to the local maximum.
            if mu > mu_plus && mu < mu_minus {
                push(bisect(tn_plus, tn_minus, false), CurvatureSign::Positive);
            }
            // Descending tail.
            if mu < mu_minus {
                let mut hi = 2.0 * tn_minus;
                let mut guard = 0;
                while rn(hi) >= mu {
                    hi *= 2.0;
                    guard += 1;
                    if guard > 300 {
                        break;
                    }
                }
                push(bisect(tn_minus, hi, true), CurvatureSign::Negative);
            }
        }
        Err(_) => {
            // λ at or above the quotient's fiber maximum: R^n_λ(t·) is
            // monotone decreasing, a single crossing.
            let anchor = quotients::t_n(c);
            let mut lo = anchor;
            let mut guard = 0;
            while rn(lo) <= mu {
                lo *= 0.5;
                guard += 1;
                if guard > 300 {
                    return out;
                }
            }
            let mut hi = anchor;
            guard = 0;
            while rn(hi) >= mu {
                hi *= 2.0;
                guard += 1;
                if guard > 300 {
                    return out;
                }
            }
            push(bisect(lo, hi, true), CurvatureSign::Negative);
        }
    }
    out
}

/// Scale the function onto the Nehari manifold along its own ray:
/// returns `t^{±}_λ(u) u` and the fiber point used.
pub fn project_to_nehari(
    u: &DiscreteFunction,
    lambda: f64,
    branch: Branch,
    exp: &Exponents3,
) -> Result<(DiscreteFunction, f64)> {
    let c = coeffs3_of(u, exp).ok_or_else(|| {
        Error::InvalidInput("projection needs a nonzero function".into())
    })?;
    let lu = quotients::lambda_u(&c).value;
    if (lambda - lu).abs() <= 1e-9 * lu {
        return Err(Error::DegenerateProjection { lambda });
    }
    if lambda > lu {
        return Err(Error::ProjectionNonexistent {
            lambda,
            lambda_u: lu,
        });
    }
    let (t_plus, t_minus) = fiber_roots_3term_fast(&c, lambda).ok_or(
        Error::ProjectionNonexistent {
            lambda,
            lambda_u: lu,
        },
    )?;
    let t = match branch {
        Branch::Plus => t_plus,
        Branch::Minus => t_minus,
        _ => {
            return Err(Error::InvalidInput(
                "three-term projection supports the plus and minus branches".into(),
            ))
        }
    };
    Ok((u.scaled(t), t))
}

fn phi2_scale_3(c: &FiberCoeffs3, lambda: f64) -> f64 {
    let e = c.exp;
    c.a * (e.p - 1.0) + lambda.abs() * c.b_q * (e.q - 1.0) + c.c * (e.gamma - 1.0)
}

fn phi2_scale_4(c: &FiberCoeffs4, lambda: f64, mu: f64) -> f64 {
    let e = c.exp;
    c.a * (e.p - 1.0)
        + lambda.abs() * c.b_q * (e.q - 1.0)
        + mu.abs() * c.b_alpha * (e.alpha - 1.0)
        + c.c * (e.gamma - 1.0)
}

fn finish_3term(
    scaled: DiscreteFunction,
    lambda: f64,
    branch: Branch,
    exp: &Exponents3,
    opts: &SolveOptions,
) -> Result<NehariSolution> {
    let family = ProblemFamily::ConvexConcave { exp: *exp, lambda };
    let (u, res) = if opts.polish {
        polish_critical_point(&scaled, &family, (opts.tol_res * 1e-3).min(1e-9), 30)
    } else {
        let r = residual(&scaled, &family)?;
        (scaled, r)
    };
    let c = coeffs3_of(&u, exp)
        .ok_or_else(|| Error::InvalidInput("solution collapsed to zero".into()))?;
    let jet = phi_fiber_3(&c, lambda, 1.0)?;
    let energy = family.energy(&u)?;
    let lu = quotients::lambda_u(&c).value;
    let degenerate = jet.d2.abs() < TOL_PHI2_DEGENERATE * phi2_scale_3(&c, lambda);
    Ok(NehariSolution {
        u,
        family,
        branch,
        energy,
        fiber_d1: jet.d1,
        phi2: jet.d2,
        residual: res,
        admissible: lambda < lu && !degenerate,
        degenerate,
        // The descent stalling on its gradient tolerance is a diagnostic,
        // not a failure: the refined residual is the solution gate.
        converged: res < opts.tol_res,
    })
}

fn solve_m_objective(
    exp: Exponents3,
    lambda: f64,
    branch: Branch,
) -> impl Fn(&DiscreteFunction) -> f64 + Sync {
    move |u: &DiscreteFunction| {
        let c = match coeffs3_of(u, &exp) {
            Some(c) => c,
            None => return f64::INFINITY,
        };
        let (t_plus, t_minus) = match fiber_roots_3term_fast(&c, lambda) {
            Some(pair) => pair,
            None => return f64::INFINITY,
        };
        let t = match branch {
            Branch::Plus => t_plus,
            _ => t_minus,
        };
        let jet = phi_fiber_3(&c, lambda, t).expect("fiber root is positive");
        // On-manifold energy identity (the coercivity reduction): since the
        // fiber derivative vanishes at t, the energy equals its two-term
        // reduced form.
        #[cfg(debug_assertions)]
        {
            let e = exp;
            let at = c.a * crate::gridfield::pow_abs(t, e.p);
            let bt = c.b_q * crate::gridfield::pow_abs(t, e.q);
            let reduced = (e.gamma - e.p) / (e.p * e.gamma) * at
                - lambda * (e.gamma - e.q) / (e.q * e.gamma) * bt;
            debug_assert!(
                (jet.value - reduced).abs() <= 1e-8 * (at + bt.abs() + 1e-300),
                "on-manifold energy identity violated"
            );
        }
        jet.value
    }
}

fn solve_m_with_starts(
    lambda: f64,
    branch: Branch,
    domain: &Domain,
    exp: &Exponents3,
    opts: &SolveOptions,
    starts: Vec<DiscreteFunction>,
) -> Result<NehariSolution> {
    if !(lambda > 0.0) {
        return Err(Error::Precondition(format!(
            "Nehari minimization needs lambda > 0, got {lambda}"
        )));
    }
    let mut dopts = opts.descent.clone();
    dopts.normalization = Normalization::Lp(exp.gamma);
    let objective = solve_m_objective(*exp, lambda, branch);
    let est = minimize_with_starts(&objective, domain, &dopts, starts).map_err(|e| match e {
        Error::InfeasibleParameter { .. } => Error::InfeasibleParameter { lambda },
        other => other,
    })?;
    let (scaled, _t) = project_to_nehari(&est.minimizer, lambda, branch, exp)?;
    finish_3term(scaled, lambda, branch, exp, opts)
}

/// Minimize the energy over the plus or minus Nehari branch by fibered
/// multi-start descent, then refine to an unconstrained critical point.
pub fn solve_m(
    lambda: f64,
    branch: Branch,
    domain: &Domain,
    exp: &Exponents3,
    opts: &SolveOptions,
) -> Result<NehariSolution> {
    if !matches!(branch, Branch::Plus | Branch::Minus) {
        return Err(Error::InvalidInput(
            "solve_m handles the plus and minus branches".into(),
        ));
    }
    let starts = start_functions(domain, opts.descent.starts.max(1), opts.descent.seed);
    solve_m_with_starts(lambda, branch, domain, exp, opts, starts)
}

/// Estimated extremal-value windows for the four-term minimizations.
#[derive(Debug, Clone, Copy)]
pub struct MuWindow {
    pub lambda_e: f64,
    pub lambda_n: f64,
    pub mu_e_plus: f64,
    pub mu_e_minus: f64,
    pub mu_n_minus: f64,
}

/// Minimize the four-term energy over one of the two constrained Nehari
/// subsets, inside the estimated parameter windows.
pub fn solve_three_term(
    lambda: f64,
    mu: f64,
    branch: Branch,
    domain: &Domain,
    exp: &Exponents4,
    window: &MuWindow,
    opts: &SolveOptions,
) -> Result<NehariSolution> {
    match branch {
        Branch::Rn1 => {
            if !(lambda > 0.0 && lambda < window.lambda_e) {
                return Err(Error::Precondition(format!(
                    "rn1 needs lambda in (0, {}), got {lambda}",
                    window.lambda_e
                )));
            }
            if !(mu > window.mu_e_plus && mu < window.mu_n_minus) {
                return Err(Error::Precondition(format!(
                    "rn1 needs mu in ({}, {}), got {mu}",
                    window.mu_e_plus, window.mu_n_minus
                )));
            }
        }
        Branch::Rn2 => {
            if !(lambda > 0.0 && lambda < window.lambda_n) {
                return Err(Error::Precondition(format!(
                    "rn2 needs lambda in (0, {}), got {lambda}",
                    window.lambda_n
                )));
            }
            if !(mu > window.mu_e_minus && mu < window.mu_n_minus) {
                return Err(Error::Precondition(format!(
                    "rn2 needs mu in ({}, {}), got {mu}",
                    window.mu_e_minus, window.mu_n_minus
                )));
            }
        }
        _ => {
            return Err(Error::InvalidInput(
                "solve_three_term handles the rn1 and rn2 branches".into(),
            ))
        }
    }
    let e = *exp;
    let objective = move |u: &DiscreteFunction| {
        let c = match coeffs4_of(u, &e) {
            Some(c) => c,
            None => return f64::INFINITY,
        };
        let roots = fiber_roots_4term_fast(&c, lambda, mu);
        match branch {
            Branch::Rn1 => {
                // Middle point: rising branch of the level quotient.
                match roots.iter().find(|p| p.curvature == CurvatureSign::Positive) {
                    Some(p) => phi_fiber_4(&c, lambda, mu, p.t).expect("root > 0").value,
                    None => f64::INFINITY,
                }
            }
            Branch::Rn2 => {
                // Outermost descending crossing, subject to negative energy
                // (the open constraint R^e < mu).
                match roots
                    .iter()
                    .rev()
                    .find(|p| p.curvature == CurvatureSign::Negative)
                {
                    Some(p) => {
                        let v = phi_fiber_4(&c, lambda, mu, p.t).expect("root > 0").value;
                        if v < 0.0 {
                            v
                        } else {
                            f64::INFINITY
                        }
                    }
                    None => f64::INFINITY,
                }
            }
            _ => unreachable!(),
        }
    };
    let mut dopts = opts.descent.clone();
    dopts.normalization = Normalization::Lp(exp.gamma);
    let starts = start_functions(domain, dopts.starts.max(1), dopts.seed);
    let est = minimize_with_starts(&objective, domain, &dopts, starts).map_err(|e| match e {
        Error::InfeasibleParameter { .. } => Error::InfeasibleParameter { lambda },
        other => other,
    })?;
    // Scale onto the chosen fiber point.
    let c = coeffs4_of(&est.minimizer, exp)
        .ok_or_else(|| Error::InvalidInput("minimizer collapsed to zero".into()))?;
    let roots = fiber_roots_4term_fast(&c, lambda, mu);
    let t = match branch {
        Branch::Rn1 => roots
            .iter()
            .find(|p| p.curvature == CurvatureSign::Positive)
            .map(|p| p.t),
        _ => roots
            .iter()
            .rev()
            .find(|p| p.curvature == CurvatureSign::Negative)
            .map(|p| p.t),
    }
    .ok_or(Error::InfeasibleParameter { lambda })?;
    let scaled = est.minimizer.scaled(t);

    let family = ProblemFamily::FourTerm {
        exp: *exp,
        lambda,
        mu,
    };
    let (u, res) = if opts.polish {
        polish_critical_point(&scaled, &family, (opts.tol_res * 1e-3).min(1e-9), 30)
    } else {
        let r = residual(&scaled, &family)?;
        (scaled, r)
    };
    let cu = coeffs4_of(&u, exp)
        .ok_or_else(|| Error::InvalidInput("solution collapsed to zero".into()))?;
    let jet = phi_fiber_4(&cu, lambda, mu, 1.0)?;
    let energy = family.energy(&u)?;
    let degenerate = jet.d2.abs() < TOL_PHI2_DEGENERATE * phi2_scale_4(&cu, lambda, mu);
    // Per-function window admissibility at the solution: the rn1 point
    // needs mu in (mu^{e,+}(u), mu^{n,-}(u)); the rn2 point needs
    // mu < mu^{n,-}(u) together with the open constraint R^e < mu, which at
    // the solution is the negative-energy condition.
    let n_minus = quotients::mu_pm_quotients(&cu, lambda, Flavor::N)
        .map(|(_, m)| m.value)
        .unwrap_or(f64::NEG_INFINITY);
    let admissible = !degenerate
        && match branch {
            Branch::Rn1 => {
                let e_plus = quotients::mu_pm_quotients(&cu, lambda, Flavor::E)
                    .map(|(p, _)| p.value)
                    .unwrap_or(f64::INFINITY);
                mu > e_plus && mu < n_minus
            }
            _ => mu < n_minus && energy < 0.0,
        };
    Ok(NehariSolution {
        u,
        family,
        branch,
        energy,
        fiber_d1: jet.d1,
        phi2: jet.d2,
        residual: res,
        admissible,
        degenerate,
        converged: res < opts.tol_res,
    })
}

/// One record of a continuation sweep.
#[derive(Debug, Clone)]
pub struct BranchRow {
    pub lambda: f64,
    pub mu: Option<f64>,
    pub energy: f64,
    /// ∫|u|^γ of the solution.
    pub norm_gamma: f64,
    pub residual: f64,
    pub admissible: bool,
    pub phi2: f64,
    pub solved: bool,
}

/// Per-λ records of a warm-started continuation sweep, with the bracket
/// around the numerical applicability limit when a failure was crossed.
#[derive(Debug, Clone, Default)]
pub struct BranchDiagram {
    pub rows: Vec<BranchRow>,
    /// Largest λ at which an admissible solution was found.
    pub lambda_f_numeric: Option<f64>,
    /// Bisection bracket (admissible, failed) around the limit.
    pub limit_bracket: Option<(f64, f64)>,
}

fn failed_row(lambda: f64) -> BranchRow {
    BranchRow {
        lambda,
        mu: None,
        energy: f64::NAN,
        norm_gamma: f64::NAN,
        residual: f64::NAN,
        admissible: false,
        phi2: f64::NAN,
        solved: false,
    }
}

fn row_of(sol: &NehariSolution) -> BranchRow {
    let norm_gamma = match &sol.family {
        ProblemFamily::ConvexConcave { exp, .. } => integrate(&sol.u, &[exp.gamma], exp.p)
            .map(|b| b.lebesgue(exp.gamma).unwrap())
            .unwrap_or(f64::NAN),
        ProblemFamily::FourTerm { exp, .. } => integrate(&sol.u, &[exp.gamma], exp.p)
            .map(|b| b.lebesgue(exp.gamma).unwrap())
            .unwrap_or(f64::NAN),
        ProblemFamily::ZeroMass { .. } => f64::NAN,
    };
    BranchRow {
        lambda: sol.lambda(),
        mu: sol.mu(),
        energy: sol.energy,
        norm_gamma,
        residual: sol.residual,
        admissible: sol.admissible,
        phi2: sol.phi2,
        solved: true,
    }
}

/// Warm-started sweep of [`solve_m`] over an increasing λ grid. When a step
/// fails after a success, the failure point is bracketed by bisection (up to
/// 20 halvings) and the bracket rows join the diagram.
pub fn continue_branch(
    lambda_grid: &[f64],
    branch: Branch,
    domain: &Domain,
    exp: &Exponents3,
    opts: &SolveOptions,
) -> Result<BranchDiagram> {
    if lambda_grid.is_empty() {
        return Ok(BranchDiagram::default());
    }
    for w in lambda_grid.windows(2) {
        if !(w[0] < w[1]) {
            return Err(Error::InvalidInput(
                "lambda grid must be strictly increasing".into(),
            ));
        }
    }
    if !(lambda_grid[0] > 0.0) {
        return Err(Error::InvalidInput("lambda grid must be positive".into()));
    }
    let mut rows: Vec<BranchRow> = Vec::new();
    let mut warm: Option<DiscreteFunction> = None;
    let mut lambda_f: Option<f64> = None;
    let mut bracket: Option<(f64, f64)> = None;
    let attempt = |lambda: f64, warm: &Option<DiscreteFunction>| -> Option<NehariSolution> {
        let mut starts = Vec::new();
        if let Some(w) = warm {
            starts.push(w.clone());
        }
        starts.extend(start_functions(
            domain,
            opts.descent.starts.max(1),
            opts.descent.seed,
        ));
        solve_m_with_starts(lambda, branch, domain, exp, opts, starts).ok()
    };
    for (k, &lambda) in lambda_grid.iter().enumerate() {
        match attempt(lambda, &warm) {
            Some(sol) if sol.admissible && sol.converged => {
                warm = Some(sol.u.clone());
                lambda_f = Some(lambda);
                rows.push(row_of(&sol));
            }
            outcome => {
                rows.push(match outcome {
                    Some(sol) => row_of(&sol),
                    None => failed_row(lambda),
                });
                // Bracket the limit between the last success and this
                // failure, once.
                if bracket.is_none() && k > 0 && lambda_f.is_some() {
                    let mut lo = lambda_f.unwrap();
                    let mut hi = lambda;
                    for _ in 0..20 {
                        let mid = 0.5 * (lo + hi);
                        match attempt(mid, &warm) {
                            Some(sol) if sol.admissible && sol.converged => {
                                warm = Some(sol.u.clone());
                                lambda_f = Some(mid);
                                rows.push(row_of(&sol));
                                lo = mid;
                            }
                            outcome => {
                                rows.push(match outcome {
                                    Some(sol) => row_of(&sol),
                                    None => failed_row(mid),
                                });
                                hi = mid;
                            }
                        }
                    }
                    bracket = Some((lo, hi));
                }
            }
        }
    }
    rows.sort_by(|a, b| a.lambda.partial_cmp(&b.lambda).unwrap());
    rows.dedup_by(|a, b| a.lambda == b.lambda);
    Ok(BranchDiagram {
        rows,
        lambda_f_numeric: lambda_f,
        limit_bracket: bracket,
    })
}

/// Write a diagram with the frozen column contract
/// `lambda,mu,energy,norm_gamma,residual,admissible,phi2`.
pub fn write_branch_csv<W: Write>(diagram: &BranchDiagram, w: &mut W) -> Result<()> {
    writeln!(w, "lambda,mu,energy,norm_gamma,residual,admissible,phi2")?;
    for r in &diagram.rows {
        let mu = r.mu.map(|m| format!("{m:.16e}")).unwrap_or_default();
        writeln!(
            w,
            "{:.16e},{},{:.16e},{:.16e},{:.16e},{},{:.16e}",
            r.lambda, mu, r.energy, r.norm_gamma, r.residual, r.admissible, r.phi2
        )?;
    }
    Ok(())
}

/// One verification check of a solution.
#[derive(Debug, Clone)]
pub struct VerifyCheck {
    pub name: &'static str,
    pub passed: bool,
    pub value: f64,
}

/// Recomputed pass/fail report for a claimed solution.
#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub checks: Vec<VerifyCheck>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Recompute residual, fiber membership, curvature sign, and admissibility
/// for a claimed solution.
pub fn verify(sol: &NehariSolution, opts: &SolveOptions) -> VerifyReport {
    let mut checks = Vec::new();
    let nonzero = !sol.u.is_zero();
    checks.push(VerifyCheck {
        name: "nonzero",
        passed: nonzero,
        value: sol.u.max_abs(),
    });
    let res = residual(&sol.u, &sol.family).unwrap_or(f64::INFINITY);
    checks.push(VerifyCheck {
        name: "residual",
        passed: res < opts.tol_res,
        value: res,
    });
    let (d1, d2, scale, admissible) = match &sol.family {
        ProblemFamily::ConvexConcave { exp, lambda } => match coeffs3_of(&sol.u, exp) {
            Some(c) => {
                let jet = phi_fiber_3(&c, *lambda, 1.0).expect("t = 1");
                let lu = quotients::lambda_u(&c).value;
                (
                    jet.d1,
                    jet.d2,
                    c.a + lambda.abs() * c.b_q + c.c,
                    *lambda < lu,
                )
            }
            None => (f64::INFINITY, 0.0, 1.0, false),
        },
        ProblemFamily::FourTerm { exp, lambda, mu } => match coeffs4_of(&sol.u, exp) {
            Some(c) => {
                let jet = phi_fiber_4(&c, *lambda, *mu, 1.0).expect("t = 1");
                (
                    jet.d1,
                    jet.d2,
                    c.a + lambda.abs() * c.b_q + mu.abs() * c.b_alpha + c.c,
                    sol.admissible,
                )
            }
            None => (f64::INFINITY, 0.0, 1.0, false),
        },
        ProblemFamily::ZeroMass { .. } => (f64::INFINITY, 0.0, 1.0, false),
    };
    checks.push(VerifyCheck {
        name: "fiber_membership",
        passed: d1.abs() < opts.tol_fiber.max(1e-12) * scale.max(1e-300) * 1e3
            || d1.abs() < opts.tol_res * scale,
        value: d1,
    });
    let sign_ok = match sol.branch {
        Branch::Plus | Branch::Rn1 => d2 > 0.0,
        Branch::Minus | Branch::Rn2 => d2 < 0.0,
    };
    checks.push(VerifyCheck {
        name: "curvature_sign",
        passed: sign_ok || sol.degenerate,
        value: d2,
    });
    checks.push(VerifyCheck {
        name: "admissible",
        passed: admissible,
        value: if admissible { 1.0 } else { 0.0 },
    });
    VerifyReport { checks }
}
