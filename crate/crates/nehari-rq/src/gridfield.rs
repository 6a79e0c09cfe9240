//! Grids, discrete functions, quadrature, and weak-form residuals.
//!
//! Functions live on uniform grids over a 1D interval, a 2D rectangle (zero
//! Dirichlet boundary), or a radial ball (weight `omega_{N-1} r^{N-1}`,
//! forced to zero at the truncation radius). Integrals use the cell-wise
//! midpoint rule with cell differences for gradients, so every integral is
//! exactly positively homogeneous in the nodal values: quadrature commutes
//! with scalar scaling.
//!
//! The weak-form residual of each problem family is the nodal gradient of
//! the discrete energy divided by the lumped node volume. It vanishes
//! exactly at discrete solutions and converges to the strong-form residual
//! under refinement.

use crate::fibering::{Exponents3, Exponents4};
use crate::{Error, Result};
use std::io::{BufRead, Write};

/// |x|^r with fast paths for the small integer and half-integer exponents
/// that dominate the solver hot loops.
#[inline]
pub(crate) fn pow_abs(x: f64, r: f64) -> f64 {
    let a = x.abs();
    if r == 2.0 {
        return a * a;
    }
    if r == 3.0 {
        return a * a * a;
    }
    if r == 4.0 {
        let s = a * a;
        return s * s;
    }
    if r == 1.5 {
        return a * a.sqrt();
    }
    if r == 2.5 {
        return a * a * a.sqrt();
    }
    if r == 1.0 {
        return a;
    }
    if r == 0.5 {
        return a.sqrt();
    }
    a.powf(r)
}

/// |x|^{r-1} sign(x), the derivative of |x|^r / r: zero at x = 0 for r > 1.
#[inline]
pub(crate) fn pow_signed(x: f64, r: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    pow_abs(x, r - 1.0) * x.signum()
}

/// Surface area of the unit sphere in `R^n`: `2 pi^{n/2} / Gamma(n/2)`.
pub fn unit_sphere_area(n: u32) -> f64 {
    use std::f64::consts::PI;
    // Gamma(n/2) by the recurrence Gamma(x+1) = x Gamma(x).
    let half = n as f64 / 2.0;
    let mut x = if n % 2 == 0 { 1.0 } else { 0.5 };
    let mut g = if n % 2 == 0 { 1.0 } else { PI.sqrt() };
    while x + 0.5 < half + 0.25 {
        g *= x;
        x += 1.0;
    }
    2.0 * PI.powf(half) / g
}

/// Discretization domain: extent, node counts (including boundary nodes),
/// and spatial dimension.
#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    /// Interval (0, length) with zero boundary values.
    Interval { length: f64, nodes: usize },
    /// Rectangle (0, lx) x (0, ly) with zero boundary values.
    Rectangle { lengths: [f64; 2], nodes: [usize; 2] },
    /// Ball of the given truncation radius in dimension `dim >= 3`;
    /// functions are radial and vanish at r = radius.
    Radial { radius: f64, nodes: usize, dim: u32 },
}

impl Domain {
    pub fn interval(length: f64, nodes: usize) -> Result<Self> {
        if !(length > 0.0) || nodes < 3 {
            return Err(Error::InvalidInput(format!(
                "interval needs length > 0 and nodes >= 3, got {length}, {nodes}"
            )));
        }
        Ok(Domain::Interval { length, nodes })
    }

    pub fn rectangle(lengths: [f64; 2], nodes: [usize; 2]) -> Result<Self> {
        if !(lengths[0] > 0.0 && lengths[1] > 0.0) || nodes[0] < 3 || nodes[1] < 3 {
            return Err(Error::InvalidInput(format!(
                "rectangle needs positive sides and nodes >= 3 per axis, got {lengths:?}, {nodes:?}"
            )));
        }
        Ok(Domain::Rectangle { lengths, nodes })
    }

    pub fn radial(radius: f64, nodes: usize, dim: u32) -> Result<Self> {
        if !(radius > 0.0) || nodes < 3 {
            return Err(Error::InvalidInput(format!(
                "radial domain needs radius > 0 and nodes >= 3, got {radius}, {nodes}"
            )));
        }
        if dim < 3 {
            return Err(Error::InvalidInput(format!(
                "radial domain needs dimension >= 3, got {dim}"
            )));
        }
        Ok(Domain::Radial { radius, nodes, dim })
    }

    /// Spatial dimension N.
    pub fn dim(&self) -> u32 {
        match self {
            Domain::Interval { .. } => 1,
            Domain::Rectangle { .. } => 2,
            Domain::Radial { dim, .. } => *dim,
        }
    }

    /// Grid spacing per axis.
    pub fn spacing(&self) -> Vec<f64> {
        match self {
            Domain::Interval { length, nodes } => vec![length / (nodes - 1) as f64],
            Domain::Rectangle { lengths, nodes } => vec![
                lengths[0] / (nodes[0] - 1) as f64,
                lengths[1] / (nodes[1] - 1) as f64,
            ],
            Domain::Radial { radius, nodes, .. } => vec![radius / (nodes - 1) as f64],
        }
    }

    /// Number of interior nodes (the length of a nodal value array).
    pub fn interior_len(&self) -> usize {
        match self {
            Domain::Interval { nodes, .. } => nodes - 2,
            Domain::Rectangle { nodes, .. } => (nodes[0] - 2) * (nodes[1] - 2),
            // r = 0 is a genuine unknown; only r = radius is constrained.
            Domain::Radial { nodes, .. } => nodes - 1,
        }
    }

    /// Node counts per axis, including boundary nodes.
    pub fn resolution(&self) -> Vec<usize> {
        match self {
            Domain::Interval { nodes, .. } => vec![*nodes],
            Domain::Rectangle { nodes, .. } => vec![nodes[0], nodes[1]],
            Domain::Radial { nodes, .. } => vec![*nodes],
        }
    }

    /// Same domain with every axis cell count scaled by `factor`, for
    /// refinement studies.
    pub fn refined(&self, factor: usize) -> Domain {
        match *self {
            Domain::Interval { length, nodes } => Domain::Interval {
                length,
                nodes: (nodes - 1) * factor + 1,
            },
            Domain::Rectangle { lengths, nodes } => Domain::Rectangle {
                lengths,
                nodes: [(nodes[0] - 1) * factor + 1, (nodes[1] - 1) * factor + 1],
            },
            Domain::Radial { radius, nodes, dim } => Domain::Radial {
                radius,
                nodes: (nodes - 1) * factor + 1,
                dim,
            },
        }
    }

    /// Coordinates of interior node `i`, matching the value array layout.
    pub fn coords(&self, i: usize) -> Vec<f64> {
        match self {
            Domain::Interval { .. } => {
                let h = self.spacing()[0];
                vec![(i + 1) as f64 * h]
            }
            Domain::Rectangle { nodes, .. } => {
                let h = self.spacing();
                let ny = nodes[1] - 2;
                let ix = i / ny + 1;
                let iy = i % ny + 1;
                vec![ix as f64 * h[0], iy as f64 * h[1]]
            }
            Domain::Radial { .. } => {
                let h = self.spacing()[0];
                vec![i as f64 * h]
            }
        }
    }
}

/// Nodal values of a function over the interior nodes of a domain.
/// Boundary values are implicitly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteFunction {
    pub domain: Domain,
    pub values: Vec<f64>,
}

impl DiscreteFunction {
    pub fn new(domain: Domain, values: Vec<f64>) -> Result<Self> {
        if values.len() != domain.interior_len() {
            return Err(Error::InvalidInput(format!(
                "value array length {} does not match interior node count {}",
                values.len(),
                domain.interior_len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index: i });
        }
        Ok(DiscreteFunction { domain, values })
    }

    pub fn zero(domain: Domain) -> Self {
        let n = domain.interior_len();
        DiscreteFunction {
            domain,
            values: vec![0.0; n],
        }
    }

    /// Sample `f` at the interior node coordinates.
    pub fn sample<F: Fn(&[f64]) -> f64>(domain: Domain, f: F) -> Self {
        let n = domain.interior_len();
        let values = (0..n).map(|i| f(&domain.coords(i))).collect();
        DiscreteFunction { domain, values }
    }

    pub fn scaled(&self, t: f64) -> Self {
        DiscreteFunction {
            domain: self.domain.clone(),
            values: self.values.iter().map(|v| t * v).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }
}

/// The scalar integrals of a function: `grad_p = ∫|∇u|^p` and one
/// `∫|u|^r` per requested exponent.
#[derive(Debug, Clone)]
pub struct IntegralBundle {
    pub grad_exponent: f64,
    pub grad_p: f64,
    pub lebesgue: Vec<(f64, f64)>,
}

impl IntegralBundle {
    /// `∫|u|^r` for a previously requested exponent.
    pub fn lebesgue(&self, r: f64) -> Option<f64> {
        self.lebesgue
            .iter()
            .find(|(e, _)| *e == r)
            .map(|(_, v)| *v)
    }
}

const GHOST: usize = usize::MAX;

/// One quadrature cell: midpoint value, gradient components, and the
/// sensitivities of both with respect to each corner's nodal value.
struct Cell {
    weight: f64,
    mid: f64,
    grad: [f64; 2],
    /// (interior index or GHOST, d mid / d v, [d grad0 / d v, d grad1 / d v])
    corners: [(usize, f64, [f64; 2]); 4],
    ncorners: usize,
}

impl Cell {
    #[inline]
    fn grad_sq(&self) -> f64 {
        self.grad[0] * self.grad[0] + self.grad[1] * self.grad[1]
    }
}

fn visit_cells<F: FnMut(&Cell)>(u: &DiscreteFunction, mut f: F) {
    match &u.domain {
        Domain::Interval { nodes, .. } => {
            let h = u.domain.spacing()[0];
            let val = |j: usize| if j == 0 || j == nodes - 1 { 0.0 } else { u.values[j - 1] };
            let idx = |j: usize| if j == 0 || j == nodes - 1 { GHOST } else { j - 1 };
            for c in 0..nodes - 1 {
                let (v0, v1) = (val(c), val(c + 1));
                f(&Cell {
                    weight: h,
                    mid: 0.5 * (v0 + v1),
                    grad: [(v1 - v0) / h, 0.0],
                    corners: [
                        (idx(c), 0.5, [-1.0 / h, 0.0]),
                        (idx(c + 1), 0.5, [1.0 / h, 0.0]),
                        (GHOST, 0.0, [0.0, 0.0]),
                        (GHOST, 0.0, [0.0, 0.0]),
                    ],
                    ncorners: 2,
                });
            }
        }
        Domain::Rectangle { nodes, .. } => {
            let h = u.domain.spacing();
            let (nx, ny) = (nodes[0], nodes[1]);
            let nyi = ny - 2;
            let val = |i: usize, j: usize| {
                if i == 0 || i == nx - 1 || j == 0 || j == ny - 1 {
                    0.0
                } else {
                    u.values[(i - 1) * nyi + (j - 1)]
                }
            };
            let idx = |i: usize, j: usize| {
                if i == 0 || i == nx - 1 || j == 0 || j == ny - 1 {
                    GHOST
                } else {
                    (i - 1) * nyi + (j - 1)
                }
            };
            let w = h[0] * h[1];
            let gx = 1.0 / (2.0 * h[0]);
            let gy = 1.0 / (2.0 * h[1]);
            for i in 0..nx - 1 {
                for j in 0..ny - 1 {
                    let v00 = val(i, j);
                    let v10 = val(i + 1, j);
                    let v01 = val(i, j + 1);
                    let v11 = val(i + 1, j + 1);
                    let dx = ((v10 - v00) + (v11 - v01)) * gx;
                    let dy = ((v01 - v00) + (v11 - v10)) * gy;
                    f(&Cell {
                        weight: w,
                        mid: 0.25 * (v00 + v10 + v01 + v11),
                        grad: [dx, dy],
                        corners: [
                            (idx(i, j), 0.25, [-gx, -gy]),
                            (idx(i + 1, j), 0.25, [gx, -gy]),
                            (idx(i, j + 1), 0.25, [-gx, gy]),
                            (idx(i + 1, j + 1), 0.25, [gx, gy]),
                        ],
                        ncorners: 4,
                    });
                }
            }
        }
        Domain::Radial { nodes, dim, .. } => {
            let h = u.domain.spacing()[0];
            let omega = unit_sphere_area(*dim);
            let rpow = (*dim - 1) as f64;
            let val = |j: usize| if j == nodes - 1 { 0.0 } else { u.values[j] };
            let idx = |j: usize| if j == nodes - 1 { GHOST } else { j };
            for c in 0..nodes - 1 {
                let (v0, v1) = (val(c), val(c + 1));
                let r_mid = (c as f64 + 0.5) * h;
                f(&Cell {
                    weight: omega * pow_abs(r_mid, rpow) * h,
                    mid: 0.5 * (v0 + v1),
                    grad: [(v1 - v0) / h, 0.0],
                    corners: [
                        (idx(c), 0.5, [-1.0 / h, 0.0]),
                        (idx(c + 1), 0.5, [1.0 / h, 0.0]),
                        (GHOST, 0.0, [0.0, 0.0]),
                        (GHOST, 0.0, [0.0, 0.0]),
                    ],
                    ncorners: 2,
                });
            }
        }
    }
}

/// Cell-midpoint quadrature of `∫|u|^r` for each requested exponent and
/// `∫|∇u|^p` for the gradient exponent.
pub fn integrate(
    u: &DiscreteFunction,
    exponents: &[f64],
    grad_exponent: f64,
) -> Result<IntegralBundle> {
    for &r in exponents {
        if !(r > 1.0) {
            return Err(Error::InvalidInput(format!(
                "lebesgue exponent must exceed 1, got {r}"
            )));
        }
    }
    if !(grad_exponent > 1.0) {
        return Err(Error::InvalidInput(format!(
            "gradient exponent must exceed 1, got {grad_exponent}"
        )));
    }
    if let Some(i) = u.values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index: i });
    }
    let mut grad_p = 0.0;
    let mut leb = vec![0.0; exponents.len()];
    let half_p = grad_exponent / 2.0;
    visit_cells(u, |cell| {
        let gsq = cell.grad_sq();
        if gsq > 0.0 {
            grad_p += cell.weight * pow_abs(gsq, half_p);
        }
        if cell.mid != 0.0 {
            for (k, &r) in exponents.iter().enumerate() {
                leb[k] += cell.weight * pow_abs(cell.mid, r);
            }
        }
    });
    Ok(IntegralBundle {
        grad_exponent,
        grad_p,
        lebesgue: exponents.iter().copied().zip(leb).collect(),
    })
}

/// Nodal gradient of `∫|∇u|^p` with respect to the interior values.
pub fn dirichlet_gradient(u: &DiscreteFunction, p: f64) -> Vec<f64> {
    let mut g = vec![0.0; u.values.len()];
    visit_cells(u, |cell| {
        let gsq = cell.grad_sq();
        if gsq == 0.0 {
            return;
        }
        // d(w |g|^p)/dv = w p |g|^{p-2} (g . dg/dv)
        let scale = cell.weight * p * pow_abs(gsq, (p - 2.0) / 2.0);
        for &(i, _, dgrad) in cell.corners.iter().take(cell.ncorners) {
            if i != GHOST {
                g[i] += scale * (cell.grad[0] * dgrad[0] + cell.grad[1] * dgrad[1]);
            }
        }
    });
    g
}

/// Nodal gradient of `∫|u|^r` with respect to the interior values.
pub fn lebesgue_gradient(u: &DiscreteFunction, r: f64) -> Vec<f64> {
    let mut g = vec![0.0; u.values.len()];
    visit_cells(u, |cell| {
        if cell.mid == 0.0 {
            return;
        }
        let scale = cell.weight * r * pow_signed(cell.mid, r);
        for &(i, dmid, _) in cell.corners.iter().take(cell.ncorners) {
            if i != GHOST {
                g[i] += scale * dmid;
            }
        }
    });
    g
}

/// Accumulate `coef * d²(∫|∇u|^p)/du²` into a dense row-major matrix.
pub fn add_dirichlet_hessian(u: &DiscreteFunction, p: f64, coef: f64, out: &mut [f64]) {
    let n = u.values.len();
    debug_assert_eq!(out.len(), n * n);
    visit_cells(u, |cell| {
        let gsq = cell.grad_sq();
        // d²(w |g|^p) = w p [ (p-2)|g|^{p-4} (g.dg)(g.dg') + |g|^{p-2} dg.dg' ].
        let (f1, f2) = if gsq > 0.0 {
            (
                pow_abs(gsq, (p - 2.0) / 2.0),
                (p - 2.0) * pow_abs(gsq, (p - 4.0) / 2.0),
            )
        } else {
            (0.0, 0.0)
        };
        for &(i, _, dgi) in cell.corners.iter().take(cell.ncorners) {
            if i == GHOST {
                continue;
            }
            let gdi = cell.grad[0] * dgi[0] + cell.grad[1] * dgi[1];
            for &(j, _, dgj) in cell.corners.iter().take(cell.ncorners) {
                if j == GHOST {
                    continue;
                }
                let gdj = cell.grad[0] * dgj[0] + cell.grad[1] * dgj[1];
                let ddot = dgi[0] * dgj[0] + dgi[1] * dgj[1];
                out[i * n + j] += coef * cell.weight * p * (f2 * gdi * gdj + f1 * ddot);
            }
        }
    });
}

/// Accumulate `coef * d²(∫|u|^r)/du²` into a dense row-major matrix.
pub fn add_lebesgue_hessian(u: &DiscreteFunction, r: f64, coef: f64, out: &mut [f64]) {
    let n = u.values.len();
    debug_assert_eq!(out.len(), n * n);
    visit_cells(u, |cell| {
        if cell.mid == 0.0 {
            return;
        }
        let f = r * (r - 1.0) * pow_abs(cell.mid, r - 2.0);
        for &(i, dmi, _) in cell.corners.iter().take(cell.ncorners) {
            if i == GHOST {
                continue;
            }
            for &(j, dmj, _) in cell.corners.iter().take(cell.ncorners) {
                if j == GHOST {
                    continue;
                }
                out[i * n + j] += coef * cell.weight * f * dmi * dmj;
            }
        }
    });
}

/// Lumped volume of each interior node: the quadrature mass a nodal
/// perturbation sees. Divides energy gradients into strong-form residuals.
pub fn node_volumes(domain: &Domain) -> Vec<f64> {
    let u = DiscreteFunction::zero(domain.clone());
    let mut v = vec![0.0; u.values.len()];
    visit_cells(&u, |cell| {
        for &(i, dmid, _) in cell.corners.iter().take(cell.ncorners) {
            if i != GHOST {
                v[i] += cell.weight * dmid;
            }
        }
    });
    v
}

/// Resample a radial function under the dilation `x -> x / sigma` by linear
/// interpolation; values beyond the original support are zero.
pub fn dilate(u: &DiscreteFunction, sigma: f64) -> Result<DiscreteFunction> {
    let (radius, nodes) = match u.domain {
        Domain::Radial { radius, nodes, .. } => (radius, nodes),
        _ => {
            return Err(Error::InvalidInput(
                "dilate is defined on radial domains only".into(),
            ))
        }
    };
    if !(sigma > 0.0) {
        return Err(Error::InvalidInput(format!(
            "dilation factor must be positive, got {sigma}"
        )));
    }
    let h = u.domain.spacing()[0];
    // Support radius: one cell beyond the last nonzero node, capped at R.
    let support = u
        .values
        .iter()
        .rposition(|&v| v != 0.0)
        .map(|j| ((j + 1) as f64 * h).min(radius))
        .unwrap_or(0.0);
    if sigma * support > radius * (1.0 + 1e-12) {
        return Err(Error::DilationOverflow {
            support,
            sigma,
            radius,
        });
    }
    let interp = |r: f64| -> f64 {
        if r >= radius {
            return 0.0;
        }
        let x = r / h;
        let j = x.floor() as usize;
        let frac = x - j as f64;
        let vj = if j >= nodes - 1 { 0.0 } else { u.values[j] };
        let vj1 = if j + 1 >= nodes - 1 { 0.0 } else { u.values[j + 1] };
        vj * (1.0 - frac) + vj1 * frac
    };
    let values = (0..nodes - 1)
        .map(|j| interp(j as f64 * h / sigma))
        .collect();
    DiscreteFunction::new(u.domain.clone(), values)
}

/// The three problem families whose weak-form residuals the grid evaluates.
#[derive(Debug, Clone)]
pub enum ProblemFamily {
    /// `-Δ_p u = λ|u|^{q-2}u + |u|^{γ-2}u`, zero Dirichlet data.
    ConvexConcave { exp: Exponents3, lambda: f64 },
    /// `-Δ_p u = |u|^{γ-2}u + μ|u|^{α-2}u - λ|u|^{q-2}u`, zero Dirichlet data.
    FourTerm {
        exp: Exponents4,
        lambda: f64,
        mu: f64,
    },
    /// `-Δu - μ|u|^{p-2}u + |u|^{q-2}u = 0` on a truncated radial ball.
    ZeroMass { p: f64, q: f64, mu: f64 },
}

impl ProblemFamily {
    /// Discrete energy whose critical points are the weak solutions.
    pub fn energy(&self, u: &DiscreteFunction) -> Result<f64> {
        match self {
            ProblemFamily::ConvexConcave { exp, lambda } => {
                let b = integrate(u, &[exp.q, exp.gamma], exp.p)?;
                Ok(b.grad_p / exp.p - lambda * b.lebesgue(exp.q).unwrap() / exp.q
                    - b.lebesgue(exp.gamma).unwrap() / exp.gamma)
            }
            ProblemFamily::FourTerm { exp, lambda, mu } => {
                let b = integrate(u, &[exp.q, exp.alpha, exp.gamma], exp.p)?;
                Ok(b.grad_p / exp.p + lambda * b.lebesgue(exp.q).unwrap() / exp.q
                    - mu * b.lebesgue(exp.alpha).unwrap() / exp.alpha
                    - b.lebesgue(exp.gamma).unwrap() / exp.gamma)
            }
            ProblemFamily::ZeroMass { p, q, mu } => {
                let b = integrate(u, &[*p, *q], 2.0)?;
                Ok(b.grad_p / 2.0 - mu * b.lebesgue(*p).unwrap() / p
                    + b.lebesgue(*q).unwrap() / q)
            }
        }
    }

    /// Nodal gradient of the discrete energy.
    pub fn energy_gradient(&self, u: &DiscreteFunction) -> Vec<f64> {
        match self {
            ProblemFamily::ConvexConcave { exp, lambda } => {
                let ga = dirichlet_gradient(u, exp.p);
                let gq = lebesgue_gradient(u, exp.q);
                let gc = lebesgue_gradient(u, exp.gamma);
                (0..u.values.len())
                    .map(|i| ga[i] / exp.p - lambda * gq[i] / exp.q - gc[i] / exp.gamma)
                    .collect()
            }
            ProblemFamily::FourTerm { exp, lambda, mu } => {
                let ga = dirichlet_gradient(u, exp.p);
                let gq = lebesgue_gradient(u, exp.q);
                let gal = lebesgue_gradient(u, exp.alpha);
                let gc = lebesgue_gradient(u, exp.gamma);
                (0..u.values.len())
                    .map(|i| {
                        ga[i] / exp.p + lambda * gq[i] / exp.q - mu * gal[i] / exp.alpha
                            - gc[i] / exp.gamma
                    })
                    .collect()
            }
            ProblemFamily::ZeroMass { p, q, mu } => {
                let gt = dirichlet_gradient(u, 2.0);
                let gp = lebesgue_gradient(u, *p);
                let gq = lebesgue_gradient(u, *q);
                (0..u.values.len())
                    .map(|i| gt[i] / 2.0 - mu * gp[i] / p + gq[i] / q)
                    .collect()
            }
        }
    }
}

/// Sup-norm of the discrete weak-form residual: the energy gradient scaled
/// by the lumped node volumes. Zero exactly at discrete solutions.
pub fn residual(u: &DiscreteFunction, family: &ProblemFamily) -> Result<f64> {
    Ok(residual_profile(u, family)?
        .iter()
        .fold(0.0, |m, r| m.max(r.abs())))
}

/// Per-node weak-form residual values.
pub fn residual_profile(u: &DiscreteFunction, family: &ProblemFamily) -> Result<Vec<f64>> {
    if let Some(i) = u.values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index: i });
    }
    let g = family.energy_gradient(u);
    let v = node_volumes(&u.domain);
    Ok(g.iter().zip(v.iter()).map(|(gi, vi)| gi / vi).collect())
}

/// Write the function as CSV with header `index,coord...,value`.
pub fn write_csv<W: Write>(u: &DiscreteFunction, w: &mut W) -> Result<()> {
    let coord_names: &[&str] = match u.domain {
        Domain::Interval { .. } => &["x"],
        Domain::Rectangle { .. } => &["x", "y"],
        Domain::Radial { .. } => &["r"],
    };
    write!(w, "index")?;
    for c in coord_names {
        write!(w, ",{c}")?;
    }
    writeln!(w, ",value")?;
    for (i, v) in u.values.iter().enumerate() {
        write!(w, "{i}")?;
        for c in u.domain.coords(i) {
            write!(w, ",{c:.16e}")?;
        }
        writeln!(w, ",{v:.16e}")?;
    }
    Ok(())
}

/// Read nodal values written by [`write_csv`] back onto the given domain.
pub fn read_csv<R: BufRead>(domain: Domain, r: R) -> Result<DiscreteFunction> {
    let mut values = vec![0.0; domain.interior_len()];
    let mut seen = vec![false; values.len()];
    for (ln, line) in r.lines().enumerate() {
        let line = line?;
        if ln == 0 || line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.trim().split(',').collect();
        if fields.len() < 2 {
            return Err(Error::Parse(format!("line {}: too few fields", ln + 1)));
        }
        let idx: usize = fields[0]
            .parse()
            .map_err(|e| Error::Parse(format!("line {}: bad index: {e}", ln + 1)))?;
        let val: f64 = fields[fields.len() - 1]
            .parse()
            .map_err(|e| Error::Parse(format!("line {}: bad value: {e}", ln + 1)))?;
        if idx >= values.len() {
            return Err(Error::Parse(format!(
                "line {}: index {idx} out of range for {} interior nodes",
                ln + 1,
                values.len()
            )));
        }
        values[idx] = val;
        seen[idx] = true;
    }
    if let Some(miss) = seen.iter().position(|s| !s) {
        return Err(Error::Parse(format!("missing row for node index {miss}")));
    }
    DiscreteFunction::new(domain, values)
}
