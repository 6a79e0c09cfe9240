//! Subcommand implementations. Every command writes machine-readable
//! artifacts atomically under the output directory and prints a one-line
//! summary to stdout.

use crate::config::Config;
use crate::output::{csv_f64, to_json_bytes, write_atomic};
use anyhow::{anyhow, bail, Result};
use nehari_rq::extremal::{
    lambda_e_star, lambda_n_star, lambda_star, mu_extremal, ExtremalEstimate, MuSign,
};
use nehari_rq::fibering::{phi_fiber_3, phi_fiber_4, FiberCoeffs3, FiberCoeffs4};
use nehari_rq::gridfield::write_csv;
use nehari_rq::nehari::{
    continue_branch, solve_m, solve_three_term, verify, write_branch_csv, Branch, MuWindow,
    NehariSolution,
};
use nehari_rq::quotients::{
    self, lambda_e_quotient, lambda_e_ratio, lambda_e_ratio_alt, lambda_e_u, lambda_n_constant,
    lambda_n_constant_alt, lambda_n_quotient, lambda_u, mu_pm_quotients, Flavor,
};
use nehari_rq::zeromass::solve_prescribed_energy;
use serde::Serialize;
use std::path::{Path, PathBuf};

type ProfileFn = Box<dyn Fn(f64) -> f64>;

pub struct Context {
    pub config: Config,
    pub out_dir: PathBuf,
    pub seed: Option<u64>,
    pub grid_refine: u32,
}

impl Context {
    fn path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }
}

fn coeffs3(cfg: &Config, a: f64, b_q: f64, c: f64) -> Result<FiberCoeffs3> {
    FiberCoeffs3::new(a, b_q, c, cfg.exponents3()?).map_err(|e| anyhow!("{e}"))
}

fn coeffs4(cfg: &Config, a: f64, b_q: f64, b_alpha: f64, c: f64) -> Result<FiberCoeffs4> {
    FiberCoeffs4::new(a, b_q, b_alpha, c, cfg.exponents4()?).map_err(|e| anyhow!("{e}"))
}

pub fn run_fiber(ctx: &Context) -> Result<()> {
    let cfg = &ctx.config;
    let f = cfg
        .fiber
        .as_ref()
        .ok_or_else(|| anyhow!("fiber: section required"))?;
    let mut csv = String::from("t,phi,dphi,ddphi\n");
    let n = f.samples.max(2);
    for k in 0..n {
        let t = f.t_min + (f.t_max - f.t_min) * k as f64 / (n - 1) as f64;
        if !(t > 0.0) {
            continue;
        }
        let jet = match cfg.problem.family.as_str() {
            "four-term" => {
                let mu = f
                    .mu
                    .ok_or_else(|| anyhow!("fiber.mu: required for four-term"))?;
                let b_alpha = f
                    .b_alpha
                    .ok_or_else(|| anyhow!("fiber.b_alpha: required for four-term"))?;
                let c4 = coeffs4(cfg, f.a, f.b_q, b_alpha, f.c)?;
                phi_fiber_4(&c4, f.lambda, mu, t)?
            }
            _ => {
                let c3 = coeffs3(cfg, f.a, f.b_q, f.c)?;
                phi_fiber_3(&c3, f.lambda, t)?
            }
        };
        csv.push_str(&format!(
            "{},{},{},{}\n",
            csv_f64(t),
            csv_f64(jet.value),
            csv_f64(jet.d1),
            csv_f64(jet.d2)
        ));
    }
    let path = ctx.path("fiber.csv");
    write_atomic(&path, csv.as_bytes())?;
    println!("fiber: wrote {} samples to {}", n, path.display());
    Ok(())
}

#[derive(Serialize)]
struct QuotientOut {
    kind: String,
    value: f64,
    realizer_t: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    mu_minus: Option<MuOut>,
    inputs: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    diagnostics: Option<serde_json::Value>,
}

#[derive(Serialize)]
struct MuOut {
    value: f64,
    realizer_t: f64,
}

pub fn run_quotient(ctx: &Context) -> Result<()> {
    let cfg = &ctx.config;
    let q = cfg
        .quotient
        .as_ref()
        .ok_or_else(|| anyhow!("quotient: section required"))?;
    let inputs = serde_json::json!({
        "a": q.a, "b_q": q.b_q, "b_alpha": q.b_alpha, "c": q.c,
        "q": cfg.problem.q, "p": cfg.problem.p,
        "alpha": cfg.problem.alpha, "gamma": cfg.problem.gamma,
        "lambda": q.lambda,
    });
    let need4 = |q: &crate::config::Quotient| -> Result<f64> {
        q.b_alpha
            .ok_or_else(|| anyhow!("quotient.b_alpha: required for four-term kinds"))
    };
    let (out, profile): (QuotientOut, Option<ProfileFn>) = match q.kind.as_str() {
        "lambda" => {
            let c = coeffs3(cfg, q.a, q.b_q, q.c)?;
            let v = lambda_u(&c);
            let cc = c;
            (
                QuotientOut {
                    kind: q.kind.clone(),
                    value: v.value,
                    realizer_t: v.realizer_t,
                    mu_minus: None,
                    inputs,
                    diagnostics: None,
                },
                Some(Box::new(move |t| quotients::rn_3term(&cc, t).unwrap_or(f64::NAN))),
            )
        }
        "lambda-e" => {
            let c = coeffs3(cfg, q.a, q.b_q, q.c)?;
            let v = lambda_e_u(&c);
            let e3 = cfg.exponents3()?;
            let diag = serde_json::json!({
                "ratio_to_lambda": lambda_e_ratio(&e3),
                "ratio_to_lambda_alt_form": lambda_e_ratio_alt(&e3),
            });
            let cc = c;
            (
                QuotientOut {
                    kind: q.kind.clone(),
                    value: v.value,
                    realizer_t: v.realizer_t,
                    mu_minus: None,
                    inputs,
                    diagnostics: Some(diag),
                },
                Some(Box::new(move |t| quotients::re_3term(&cc, t).unwrap_or(f64::NAN))),
            )
        }
        "lambda-n-4" => {
            let c = coeffs4(cfg, q.a, q.b_q, need4(q)?, q.c)?;
            let v = lambda_n_quotient(&c);
            let e4 = cfg.exponents4()?;
            let diag = serde_json::json!({
                "unit_coefficient_constant": lambda_n_constant(&e4),
                "unit_coefficient_constant_alt_form": lambda_n_constant_alt(&e4),
            });
            let cc = c;
            (
                QuotientOut {
                    kind: q.kind.clone(),
                    value: v.value,
                    realizer_t: v.realizer_t,
                    mu_minus: None,
                    inputs,
                    diagnostics: Some(diag),
                },
                Some(Box::new(move |t| {
                    quotients::lambda_n_fiber(&cc, t).unwrap_or(f64::NAN)
                })),
            )
        }
        "lambda-e-4" => {
            let c = coeffs4(cfg, q.a, q.b_q, need4(q)?, q.c)?;
            let v = lambda_e_quotient(&c);
            let cc = c;
            (
                QuotientOut {
                    kind: q.kind.clone(),
                    value: v.value,
                    realizer_t: v.realizer_t,
                    mu_minus: None,
                    inputs,
                    diagnostics: None,
                },
                Some(Box::new(move |t| {
                    quotients::lambda_e_fiber(&cc, t).unwrap_or(f64::NAN)
                })),
            )
        }
        "mu-pm-n" | "mu-pm-e" => {
            let c = coeffs4(cfg, q.a, q.b_q, need4(q)?, q.c)?;
            let lambda = q
                .lambda
                .ok_or_else(|| anyhow!("quotient.lambda: required for mu-pm kinds"))?;
            let flavor = if q.kind.ends_with('n') { Flavor::N } else { Flavor::E };
            let (plus, minus) = mu_pm_quotients(&c, lambda, flavor)?;
            let cc = c;
            (
                QuotientOut {
                    kind: q.kind.clone(),
                    value: plus.value,
                    realizer_t: plus.realizer_t,
                    mu_minus: Some(MuOut {
                        value: minus.value,
                        realizer_t: minus.realizer_t,
                    }),
                    inputs,
                    diagnostics: None,
                },
                Some(Box::new(move |t| match flavor {
                    Flavor::N => quotients::rn_lambda_4term(&cc, lambda, t).unwrap_or(f64::NAN),
                    Flavor::E => quotients::re_lambda_4term(&cc, lambda, t).unwrap_or(f64::NAN),
                })),
            )
        }
        other => bail!("quotient.kind: unknown kind {other:?}"),
    };
    let path = ctx.path("quotient.json");
    write_atomic(&path, &to_json_bytes(&out)?)?;
    if q.profile {
        if let Some(f) = profile {
            let mut csv = String::from("t,value\n");
            for k in 0..400 {
                let t = 1e-3 * (1e4f64).powf(k as f64 / 399.0);
                csv.push_str(&format!("{},{}\n", csv_f64(t), csv_f64(f(t))));
            }
            write_atomic(&ctx.path("quotient_profile.csv"), csv.as_bytes())?;
        }
    }
    println!(
        "quotient: {} = {:.6e} at t = {:.6e} -> {}",
        out.kind,
        out.value,
        out.realizer_t,
        path.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct ExtremalOut {
    name: String,
    value: f64,
    grid: Vec<usize>,
    starts: usize,
    per_start_values: Vec<f64>,
    diagnostics: ExtremalDiag,
}

#[derive(Serialize)]
struct ExtremalDiag {
    iterations: usize,
    grad_norm: f64,
    converged: bool,
}

fn extremal_out(name: &str, est: &ExtremalEstimate) -> ExtremalOut {
    ExtremalOut {
        name: name.to_string(),
        value: est.value,
        grid: est.resolution.clone(),
        starts: est.starts,
        per_start_values: est.per_start_values.clone(),
        diagnostics: ExtremalDiag {
            iterations: est.iterations,
            grad_norm: est.grad_norm,
            converged: est.converged,
        },
    }
}

pub fn run_extremal(ctx: &Context) -> Result<()> {
    let cfg = &ctx.config;
    let x = cfg
        .extremal
        .as_ref()
        .ok_or_else(|| anyhow!("extremal: section required"))?;
    let domain = cfg.domain(ctx.grid_refine)?;
    let opts = cfg.descent_options(ctx.seed);
    let est = match x.name.as_str() {
        "lambda-star" => lambda_star(&domain, &cfg.exponents3()?, &opts)?,
        "lambda-n-star" => lambda_n_star(&domain, &cfg.exponents4()?, &opts)?,
        "lambda-e-star" => lambda_e_star(&domain, &cfg.exponents4()?, &opts)?,
        "mu-extremal" => {
            let lambda = x
                .lambda
                .ok_or_else(|| anyhow!("extremal.lambda: required for mu-extremal"))?;
            let sign = match x.sign.as_deref() {
                Some("plus") => MuSign::Plus,
                Some("minus") => MuSign::Minus,
                other => bail!("extremal.sign: need \"plus\" or \"minus\", got {other:?}"),
            };
            let flavor = match x.flavor.as_deref() {
                Some("n") => Flavor::N,
                Some("e") => Flavor::E,
                other => bail!("extremal.flavor: need \"n\" or \"e\", got {other:?}"),
            };
            mu_extremal(&domain, &cfg.exponents4()?, lambda, sign, flavor, &opts)?
        }
        other => bail!("extremal.name: unknown estimator {other:?}"),
    };
    let out = extremal_out(&x.name, &est);
    let path = ctx.path("extremal.json");
    write_atomic(&path, &to_json_bytes(&out)?)?;
    if x.write_minimizer {
        let mut buf = Vec::new();
        write_csv(&est.minimizer, &mut buf)?;
        write_atomic(&ctx.path("minimizer.csv"), &buf)?;
    }
    println!(
        "extremal: {} = {:.8e} over {:?} -> {}",
        x.name,
        est.value,
        est.resolution,
        path.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct SolutionOut {
    branch: String,
    lambda: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    mu: Option<f64>,
    energy: f64,
    phi2: f64,
    fiber_derivative: f64,
    residual: f64,
    admissible: bool,
    degenerate: bool,
    converged: bool,
    verify: Vec<VerifyOut>,
}

#[derive(Serialize)]
struct VerifyOut {
    name: String,
    passed: bool,
    value: f64,
}

fn solution_out(branch: &str, sol: &NehariSolution, opts: &nehari_rq::nehari::SolveOptions) -> SolutionOut {
    let report = verify(sol, opts);
    SolutionOut {
        branch: branch.to_string(),
        lambda: sol.lambda(),
        mu: sol.mu(),
        energy: sol.energy,
        phi2: sol.phi2,
        fiber_derivative: sol.fiber_d1,
        residual: sol.residual,
        admissible: sol.admissible,
        degenerate: sol.degenerate,
        converged: sol.converged,
        verify: report
            .checks
            .iter()
            .map(|c| VerifyOut {
                name: c.name.to_string(),
                passed: c.passed,
                value: c.value,
            })
            .collect(),
    }
}

pub fn run_ground_state(ctx: &Context) -> Result<()> {
    let cfg = &ctx.config;
    let g = cfg
        .ground_state
        .as_ref()
        .ok_or_else(|| anyhow!("ground-state: section required"))?;
    let domain = cfg.domain(ctx.grid_refine)?;
    let opts = cfg.solve_options(ctx.seed);
    let sol = match g.branch.as_str() {
        "plus" | "minus" => {
            let branch = if g.branch == "plus" { Branch::Plus } else { Branch::Minus };
            solve_m(g.lambda, branch, &domain, &cfg.exponents3()?, &opts)?
        }
        "rn1" | "rn2" => {
            let branch = if g.branch == "rn1" { Branch::Rn1 } else { Branch::Rn2 };
            let e4 = cfg.exponents4()?;
            let mu = g
                .mu
                .ok_or_else(|| anyhow!("ground-state.mu: required for rn1/rn2"))?;
            let window = match &g.window {
                Some(w) => MuWindow {
                    lambda_e: w.lambda_e,
                    lambda_n: w.lambda_n,
                    mu_e_plus: w.mu_e_plus,
                    mu_e_minus: w.mu_e_minus,
                    mu_n_minus: w.mu_n_minus,
                },
                None => {
                    // Estimate the admissibility windows on the same grid.
                    let dopts = cfg.descent_options(ctx.seed);
                    let le = lambda_e_star(&domain, &e4, &dopts)?;
                    let ln = lambda_n_star(&domain, &e4, &dopts)?;
                    let ep = mu_extremal(&domain, &e4, g.lambda, MuSign::Plus, Flavor::E, &dopts)?;
                    let em = mu_extremal(&domain, &e4, g.lambda, MuSign::Minus, Flavor::E, &dopts)?;
                    let nm = mu_extremal(&domain, &e4, g.lambda, MuSign::Minus, Flavor::N, &dopts)?;
                    MuWindow {
                        lambda_e: le.value,
                        lambda_n: ln.value,
                        mu_e_plus: ep.value,
                        mu_e_minus: em.value,
                        mu_n_minus: nm.value,
                    }
                }
            };
            solve_three_term(g.lambda, mu, branch, &domain, &e4, &window, &opts)?
        }
        other => bail!("ground-state.branch: unknown branch {other:?}"),
    };
    let out = solution_out(&g.branch, &sol, &opts);
    let path = ctx.path("ground_state.json");
    write_atomic(&path, &to_json_bytes(&out)?)?;
    let mut buf = Vec::new();
    write_csv(&sol.u, &mut buf)?;
    write_atomic(&ctx.path("solution.csv"), &buf)?;
    println!(
        "ground-state: branch {} at lambda = {:.6e}: energy {:.6e}, residual {:.2e} -> {}",
        g.branch,
        sol.lambda(),
        sol.energy,
        sol.residual,
        path.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct BranchOut {
    rows: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda_f_numeric: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    limit_bracket: Option<(f64, f64)>,
}

pub fn run_branch(ctx: &Context) -> Result<()> {
    let cfg = &ctx.config;
    let b = cfg
        .branch
        .as_ref()
        .ok_or_else(|| anyhow!("branch: section required"))?;
    let domain = cfg.domain(ctx.grid_refine)?;
    let opts = cfg.solve_options(ctx.seed);
    let grid: Vec<f64> = (0..b.count)
        .map(|k| {
            b.lambda_min + (b.lambda_max - b.lambda_min) * k as f64 / (b.count - 1) as f64
        })
        .collect();
    let diagram = continue_branch(&grid, Branch::Plus, &domain, &cfg.exponents3()?, &opts)?;
    let mut buf = Vec::new();
    write_branch_csv(&diagram, &mut buf)?;
    let csv_path = ctx.path("branch.csv");
    write_atomic(&csv_path, &buf)?;
    let out = BranchOut {
        rows: diagram.rows.len(),
        lambda_f_numeric: diagram.lambda_f_numeric,
        limit_bracket: diagram.limit_bracket,
    };
    write_atomic(&ctx.path("branch.json"), &to_json_bytes(&out)?)?;
    println!(
        "branch: {} rows, limit {:?} -> {}",
        diagram.rows.len(),
        diagram.lambda_f_numeric,
        csv_path.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct ZeroMassOut {
    mu_bar: f64,
    mu_hat: f64,
    energy: f64,
    energy_achieved: f64,
    checks: ZeroMassChecks,
    residual: f64,
    truncation_warning: bool,
    converged: bool,
    output_radius: f64,
}

#[derive(Serialize)]
struct ZeroMassChecks {
    sigma: f64,
    t: f64,
}

pub fn run_zero_mass(ctx: &Context) -> Result<()> {
    let cfg = &ctx.config;
    let params = cfg.zero_mass_params(ctx.grid_refine)?;
    let opts = cfg.descent_options(ctx.seed);
    let sol = solve_prescribed_energy(&params, &opts)?;
    let out = ZeroMassOut {
        mu_bar: sol.mu_bar,
        mu_hat: sol.mu_hat,
        energy: params.energy,
        energy_achieved: sol.energy_achieved,
        checks: ZeroMassChecks {
            sigma: sol.sigma_check,
            t: sol.t_check,
        },
        residual: sol.residual,
        truncation_warning: sol.truncation_warning,
        converged: sol.converged,
        output_radius: match sol.u.domain {
            nehari_rq::gridfield::Domain::Radial { radius, .. } => radius,
            _ => f64::NAN,
        },
    };
    let path = ctx.path("zero_mass.json");
    write_atomic(&path, &to_json_bytes(&out)?)?;
    let write_profile = cfg.zero_mass.as_ref().map(|z| z.write_profile).unwrap_or(true);
    if write_profile {
        let mut csv = String::from("r,value\n");
        for (i, v) in sol.u.values.iter().enumerate() {
            csv.push_str(&format!(
                "{},{}\n",
                csv_f64(sol.u.domain.coords(i)[0]),
                csv_f64(*v)
            ));
        }
        write_atomic(&ctx.path("profile.csv"), csv.as_bytes())?;
    }
    println!(
        "zero-mass: mu_hat = {:.8e}, residual {:.2e}, checks ({:.2e}, {:.2e}) -> {}",
        sol.mu_hat,
        sol.residual,
        (sol.sigma_check - 1.0).abs(),
        (sol.t_check - 1.0).abs(),
        path.display()
    );
    Ok(())
}

/// Family invariant suites behind `check`; returns the failed-check count.
pub fn run_check(family: &str, out_dir: &Path) -> Result<usize> {
    let mut results: Vec<(String, bool, String)> = Vec::new();
    let mut record = |name: &str, passed: bool, detail: String| {
        println!("check {name}: {}", if passed { "ok" } else { "FAIL" });
        results.push((name.to_string(), passed, detail));
    };
    match family {
        "convex-concave" => crate::checks::convex_concave(&mut record)?,
        "four-term" => crate::checks::four_term(&mut record)?,
        "zero-mass" => crate::checks::zero_mass(&mut record)?,
        other => bail!("check: unknown family {other:?}"),
    }
    #[derive(Serialize)]
    struct CheckOut {
        family: String,
        passed: usize,
        failed: usize,
        checks: Vec<CheckRow>,
    }
    #[derive(Serialize)]
    struct CheckRow {
        name: String,
        passed: bool,
        detail: String,
    }
    let failed = results.iter().filter(|r| !r.1).count();
    let out = CheckOut {
        family: family.to_string(),
        passed: results.len() - failed,
        failed,
        checks: results
            .iter()
            .map(|(n, p, d)| CheckRow {
                name: n.clone(),
                passed: *p,
                detail: d.clone(),
            })
            .collect(),
    };
    write_atomic(&out_dir.join("check.json"), &to_json_bytes(&out)?)?;
    println!(
        "check: family {} -> {} passed, {} failed",
        family,
        out.passed,
        out.failed
    );
    Ok(failed)
}
