//! Flat TOML experiment configuration: one documented schema shared by all
//! subcommands. Sections are optional except where the chosen subcommand
//! needs them; validation reports field-level messages.

use anyhow::{anyhow, bail, Context, Result};
use nehari_rq::extremal::DescentOptions;
use nehari_rq::fibering::{Exponents3, Exponents4};
use nehari_rq::gridfield::Domain;
use nehari_rq::nehari::SolveOptions;
use nehari_rq::zeromass::ZeroMassParams;
use serde::Deserialize;
use std::path::Path;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub problem: Problem,
    pub domain: Option<DomainSpec>,
    #[serde(default)]
    pub solver: Solver,
    pub fiber: Option<Fiber>,
    pub quotient: Option<Quotient>,
    pub extremal: Option<Extremal>,
    #[serde(rename = "ground-state")]
    pub ground_state: Option<GroundState>,
    pub branch: Option<BranchCfg>,
    #[serde(rename = "zero-mass")]
    pub zero_mass: Option<ZeroMass>,
    #[serde(default)]
    pub output: Output,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Problem {
    /// "convex-concave" (three-term), "four-term", or "zero-mass".
    pub family: String,
    pub q: f64,
    pub p: f64,
    pub gamma: Option<f64>,
    pub alpha: Option<f64>,
    /// Prescribed energy (zero-mass family).
    pub energy: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    /// "interval", "rectangle", or "radial".
    pub kind: String,
    pub extent: Vec<f64>,
    pub resolution: Vec<usize>,
    pub dimension: Option<u32>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Solver {
    pub seed: u64,
    pub starts: usize,
    pub max_iters: usize,
    pub tol_grad: f64,
    pub tol_res: f64,
    pub positivity: bool,
}

impl Default for Solver {
    fn default() -> Self {
        Solver {
            seed: 0,
            starts: 4,
            max_iters: 1200,
            tol_grad: 1e-7,
            tol_res: 1e-6,
            positivity: true,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fiber {
    pub a: f64,
    pub b_q: f64,
    pub b_alpha: Option<f64>,
    pub c: f64,
    pub lambda: f64,
    pub mu: Option<f64>,
    #[serde(default = "default_t_min")]
    pub t_min: f64,
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_t_min() -> f64 {
    1e-3
}
fn default_t_max() -> f64 {
    10.0
}
fn default_samples() -> usize {
    400
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Quotient {
    /// "lambda", "lambda-e", "lambda-n-4", "lambda-e-4", "mu-pm-n", "mu-pm-e".
    pub kind: String,
    pub a: f64,
    pub b_q: f64,
    pub b_alpha: Option<f64>,
    pub c: f64,
    pub lambda: Option<f64>,
    #[serde(default)]
    pub profile: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Extremal {
    /// "lambda-star", "lambda-n-star", "lambda-e-star", "mu-extremal".
    pub name: String,
    pub lambda: Option<f64>,
    /// "plus" or "minus" (mu-extremal).
    pub sign: Option<String>,
    /// "n" or "e" (mu-extremal).
    pub flavor: Option<String>,
    #[serde(default)]
    pub write_minimizer: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundState {
    /// "plus", "minus", "rn1", "rn2".
    pub branch: String,
    pub lambda: f64,
    pub mu: Option<f64>,
    pub window: Option<WindowCfg>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowCfg {
    pub lambda_e: f64,
    pub lambda_n: f64,
    pub mu_e_plus: f64,
    pub mu_e_minus: f64,
    pub mu_n_minus: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchCfg {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub count: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZeroMass {
    #[serde(default)]
    pub write_profile: bool,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct Output {
    pub dir: Option<String>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg: Config = toml::from_str(&text).context("parsing config")?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        match self.problem.family.as_str() {
            "convex-concave" => {
                let gamma = self
                    .problem
                    .gamma
                    .ok_or_else(|| anyhow!("problem.gamma: required for convex-concave"))?;
                Exponents3::new(self.problem.q, self.problem.p, gamma)
                    .map_err(|e| anyhow!("problem exponents: {e}"))?;
            }
            "four-term" => {
                let gamma = self
                    .problem
                    .gamma
                    .ok_or_else(|| anyhow!("problem.gamma: required for four-term"))?;
                let alpha = self
                    .problem
                    .alpha
                    .ok_or_else(|| anyhow!("problem.alpha: required for four-term"))?;
                Exponents4::new(self.problem.q, alpha, self.problem.p, gamma)
                    .map_err(|e| anyhow!("problem exponents: {e}"))?;
            }
            "zero-mass" => {
                let energy = self
                    .problem
                    .energy
                    .ok_or_else(|| anyhow!("problem.energy: required for zero-mass"))?;
                if !(energy > 0.0) {
                    bail!("problem.energy: must be positive, got {energy}");
                }
            }
            other => bail!("problem.family: unknown family {other:?}"),
        }
        if !(self.solver.tol_grad > 0.0) {
            bail!("solver.tol_grad: must be positive");
        }
        if !(self.solver.tol_res > 0.0) {
            bail!("solver.tol_res: must be positive");
        }
        if let Some(b) = &self.branch {
            if !(b.lambda_min > 0.0 && b.lambda_min < b.lambda_max) {
                bail!("branch: need 0 < lambda_min < lambda_max");
            }
            if b.count < 2 {
                bail!("branch.count: need at least 2 grid points");
            }
        }
        Ok(())
    }

    pub fn exponents3(&self) -> Result<Exponents3> {
        let gamma = self
            .problem
            .gamma
            .ok_or_else(|| anyhow!("problem.gamma: required"))?;
        Exponents3::new(self.problem.q, self.problem.p, gamma)
            .map_err(|e| anyhow!("problem exponents: {e}"))
    }

    pub fn exponents4(&self) -> Result<Exponents4> {
        let gamma = self
            .problem
            .gamma
            .ok_or_else(|| anyhow!("problem.gamma: required"))?;
        let alpha = self
            .problem
            .alpha
            .ok_or_else(|| anyhow!("problem.alpha: required"))?;
        Exponents4::new(self.problem.q, alpha, self.problem.p, gamma)
            .map_err(|e| anyhow!("problem exponents: {e}"))
    }

    /// Build the domain, refining each axis by `2^grid_refine`.
    pub fn domain(&self, grid_refine: u32) -> Result<Domain> {
        let spec = self
            .domain
            .as_ref()
            .ok_or_else(|| anyhow!("domain: section required for this subcommand"))?;
        let d = match spec.kind.as_str() {
            "interval" => {
                if spec.extent.len() != 1 || spec.resolution.len() != 1 {
                    bail!("domain: interval needs one extent and one resolution entry");
                }
                Domain::interval(spec.extent[0], spec.resolution[0])
            }
            "rectangle" => {
                if spec.extent.len() != 2 || spec.resolution.len() != 2 {
                    bail!("domain: rectangle needs two extent and two resolution entries");
                }
                Domain::rectangle(
                    [spec.extent[0], spec.extent[1]],
                    [spec.resolution[0], spec.resolution[1]],
                )
            }
            "radial" => {
                if spec.extent.len() != 1 || spec.resolution.len() != 1 {
                    bail!("domain: radial needs one extent and one resolution entry");
                }
                let dim = spec
                    .dimension
                    .ok_or_else(|| anyhow!("domain.dimension: required for radial"))?;
                Domain::radial(spec.extent[0], spec.resolution[0], dim)
            }
            other => bail!("domain.kind: unknown kind {other:?}"),
        }
        .map_err(|e| anyhow!("domain: {e}"))?;
        Ok(d.refined(1usize << grid_refine))
    }

    pub fn zero_mass_params(&self, grid_refine: u32) -> Result<ZeroMassParams> {
        let energy = self
            .problem
            .energy
            .ok_or_else(|| anyhow!("problem.energy: required"))?;
        match self.domain(grid_refine)? {
            Domain::Radial { radius, nodes, dim } => {
                ZeroMassParams::new(dim, self.problem.p, self.problem.q, energy, radius, nodes)
                    .map_err(|e| anyhow!("zero-mass parameters: {e}"))
            }
            _ => bail!("domain.kind: zero-mass needs a radial domain"),
        }
    }

    pub fn descent_options(&self, seed_override: Option<u64>) -> DescentOptions {
        DescentOptions {
            seed: seed_override.unwrap_or(self.solver.seed),
            starts: self.solver.starts,
            max_iters: self.solver.max_iters,
            tol_grad: self.solver.tol_grad,
            positivity: self.solver.positivity,
            ..DescentOptions::default()
        }
    }

    pub fn solve_options(&self, seed_override: Option<u64>) -> SolveOptions {
        SolveOptions {
            descent: self.descent_options(seed_override),
            tol_res: self.solver.tol_res,
            ..SolveOptions::default()
        }
    }
}
