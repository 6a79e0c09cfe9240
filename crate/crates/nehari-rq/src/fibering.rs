//! One-variable fibering maps and their classified critical points.
//!
//! Every functional in this crate restricts along rays `t -> F(t u)` to a
//! generalized polynomial in `t` whose coefficients are the scalar integrals
//! of `u`. This module owns those coefficient bundles, evaluates the energy
//! fibering maps with analytic first and second derivatives, and locates all
//! positive critical points by a sign scan over a geometric grid followed by
//! bisection.

use crate::gridfield::pow_abs;
use crate::{Error, Result};

/// Relative tolerance on the normalized fiber derivative at a reported root.
pub const TOL_ROOT: f64 = 1e-10;
/// Relative band below which a second derivative counts as degenerate.
pub const TOL_DEGENERATE: f64 = 1e-8;
/// Default geometric bracketing grid.
pub const SCAN_T_MIN: f64 = 1e-4;
pub const SCAN_T_MAX: f64 = 1e3;
pub const SCAN_BRACKETS: usize = 512;

/// Exponent triple with `1 < q < p < gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponents3 {
    pub q: f64,
    pub p: f64,
    pub gamma: f64,
}

impl Exponents3 {
    pub fn new(q: f64, p: f64, gamma: f64) -> Result<Self> {
        if !(1.0 < q && q < p && p < gamma) {
            return Err(Error::BadExponents(format!(
                "need 1 < q < p < gamma, got q = {q}, p = {p}, gamma = {gamma}"
            )));
        }
        Ok(Exponents3 { q, p, gamma })
    }

    /// Check `gamma < p*` for the given spatial dimension.
    pub fn subcritical_for(&self, dim: u32) -> bool {
        let n = dim as f64;
        self.p >= n || self.gamma < self.p * n / (n - self.p)
    }
}

/// Exponent quadruple with `1 < q < alpha < p < gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponents4 {
    pub q: f64,
    pub alpha: f64,
    pub p: f64,
    pub gamma: f64,
}

impl Exponents4 {
    pub fn new(q: f64, alpha: f64, p: f64, gamma: f64) -> Result<Self> {
        if !(1.0 < q && q < alpha && alpha < p && p < gamma) {
            return Err(Error::BadExponents(format!(
                "need 1 < q < alpha < p < gamma, got q = {q}, alpha = {alpha}, p = {p}, gamma = {gamma}"
            )));
        }
        Ok(Exponents4 {
            q,
            alpha,
            p,
            gamma,
        })
    }

    pub fn subcritical_for(&self, dim: u32) -> bool {
        let n = dim as f64;
        self.p >= n || self.gamma < self.p * n / (n - self.p)
    }
}

/// Scalar integrals reducing the three-term energy to a one-variable map:
/// `a = ∫|∇u|^p`, `b_q = ∫|u|^q`, `c = ∫|u|^γ`.
#[derive(Debug, Clone, Copy)]
pub struct FiberCoeffs3 {
    pub a: f64,
    pub b_q: f64,
    pub c: f64,
    pub exp: Exponents3,
}

impl FiberCoeffs3 {
    pub fn new(a: f64, b_q: f64, c: f64, exp: Exponents3) -> Result<Self> {
        if !(a > 0.0 && b_q > 0.0 && c > 0.0) {
            return Err(Error::BadCoefficients(format!(
                "a = {a}, b_q = {b_q}, c = {c}"
            )));
        }
        Ok(FiberCoeffs3 { a, b_q, c, exp })
    }

    /// Coefficients of `t u`: `(a t^p, b_q t^q, c t^γ)`.
    pub fn rescaled(&self, t: f64) -> FiberCoeffs3 {
        FiberCoeffs3 {
            a: self.a * pow_abs(t, self.exp.p),
            b_q: self.b_q * pow_abs(t, self.exp.q),
            c: self.c * pow_abs(t, self.exp.gamma),
            exp: self.exp,
        }
    }
}

/// Scalar integrals of the four-term energy: adds `b_alpha = ∫|u|^α`.
#[derive(Debug, Clone, Copy)]
pub struct FiberCoeffs4 {
    pub a: f64,
    pub b_q: f64,
    pub b_alpha: f64,
    pub c: f64,
    pub exp: Exponents4,
}

impl FiberCoeffs4 {
    pub fn new(a: f64, b_q: f64, b_alpha: f64, c: f64, exp: Exponents4) -> Result<Self> {
        if !(a > 0.0 && b_q > 0.0 && b_alpha > 0.0 && c > 0.0) {
            return Err(Error::BadCoefficients(format!(
                "a = {a}, b_q = {b_q}, b_alpha = {b_alpha}, c = {c}"
            )));
        }
        Ok(FiberCoeffs4 {
            a,
            b_q,
            b_alpha,
            c,
            exp,
        })
    }

    pub fn rescaled(&self, t: f64) -> FiberCoeffs4 {
        FiberCoeffs4 {
            a: self.a * pow_abs(t, self.exp.p),
            b_q: self.b_q * pow_abs(t, self.exp.q),
            b_alpha: self.b_alpha * pow_abs(t, self.exp.alpha),
            c: self.c * pow_abs(t, self.exp.gamma),
            exp: self.exp,
        }
    }
}

/// Value and first two t-derivatives of a fibering map at one point.
#[derive(Debug, Clone, Copy)]
pub struct FiberJet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

/// Three-term energy fiber `Φ(tu) = a t^p/p − λ b_q t^q/q − c t^γ/γ`
/// with analytic derivatives.
pub fn phi_fiber_3(coeffs: &FiberCoeffs3, lambda: f64, t: f64) -> Result<FiberJet> {
    if !(t > 0.0) {
        return Err(Error::NonPositiveT(t));
    }
    let e = coeffs.exp;
    let (a, b, c) = (coeffs.a, coeffs.b_q, coeffs.c);
    let tp = pow_abs(t, e.p);
    let tq = pow_abs(t, e.q);
    let tg = pow_abs(t, e.gamma);
    Ok(FiberJet {
        value: a * tp / e.p - lambda * b * tq / e.q - c * tg / e.gamma,
        d1: (a * tp - lambda * b * tq - c * tg) / t,
        d2: (a * (e.p - 1.0) * tp - lambda * b * (e.q - 1.0) * tq - c * (e.gamma - 1.0) * tg)
            / (t * t),
    })
}

/// Four-term energy fiber
/// `Φ(tu) = a t^p/p + λ b_q t^q/q − μ b_α t^α/α − c t^γ/γ`.
pub fn phi_fiber_4(coeffs: &FiberCoeffs4, lambda: f64, mu: f64, t: f64) -> Result<FiberJet> {
    if !(t > 0.0) {
        return Err(Error::NonPositiveT(t));
    }
    let e = coeffs.exp;
    let (a, bq, ba, c) = (coeffs.a, coeffs.b_q, coeffs.b_alpha, coeffs.c);
    let tp = pow_abs(t, e.p);
    let tq = pow_abs(t, e.q);
    let ta = pow_abs(t, e.alpha);
    let tg = pow_abs(t, e.gamma);
    Ok(FiberJet {
        value: a * tp / e.p + lambda * bq * tq / e.q - mu * ba * ta / e.alpha
            - c * tg / e.gamma,
        d1: (a * tp + lambda * bq * tq - mu * ba * ta - c * tg) / t,
        d2: (a * (e.p - 1.0) * tp + lambda * bq * (e.q - 1.0) * tq
            - mu * ba * (e.alpha - 1.0) * ta
            - c * (e.gamma - 1.0) * tg)
            / (t * t),
    })
}

/// Sign of the fiber second derivative at a critical point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurvatureSign {
    Negative,
    Zero,
    Positive,
}

/// One located critical point of a fibering map.
#[derive(Debug, Clone, Copy)]
pub struct CriticalPoint {
    pub t: f64,
    pub curvature: CurvatureSign,
}

/// All positive critical points of a fibering map, in increasing t order,
/// together with the brackets that isolated them.
#[derive(Debug, Clone)]
pub struct CriticalPointSet {
    pub points: Vec<CriticalPoint>,
    pub brackets: Vec<(f64, f64)>,
}

impl CriticalPointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// First point with nonnegative curvature (fiber local minimum).
    pub fn plus_point(&self) -> Option<&CriticalPoint> {
        self.points
            .iter()
            .find(|p| p.curvature != CurvatureSign::Negative)
    }

    /// Last point with nonpositive curvature (fiber local maximum).
    pub fn minus_point(&self) -> Option<&CriticalPoint> {
        self.points
            .iter()
            .rev()
            .find(|p| p.curvature != CurvatureSign::Positive)
    }
}

/// Scan controls for the bracketing grid.
#[derive(Debug, Clone, Copy)]
pub struct ScanOptions {
    pub t_min: f64,
    pub t_max: f64,
    pub brackets: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            t_min: SCAN_T_MIN,
            t_max: SCAN_T_MAX,
            brackets: SCAN_BRACKETS,
        }
    }
}

/// Locate roots of `deriv` by sign changes over a geometric grid, refined by
/// bisection. `sign_at_zero` is the analytic sign of the derivative in the
/// t -> 0+ limit; when the scan window starts on the wrong sign the grid is
/// extended downward so boundary roots are not missed. The window is always
/// extended upward until the derivative has gone negative (every fiber here
/// ends on a `-c t^{γ-q}` tail).
fn scan_roots<D>(deriv: D, opts: &ScanOptions, sign_at_zero: f64) -> (Vec<f64>, Vec<(f64, f64)>)
where
    D: Fn(f64) -> f64,
{
    let n = opts.brackets;
    let ratio = (opts.t_max / opts.t_min).powf(1.0 / n as f64);
    let mut grid = Vec::with_capacity(n + 1);
    let mut t_lo = opts.t_min;
    if sign_at_zero != 0.0 {
        let mut guard = 0;
        while deriv(t_lo) * sign_at_zero < 0.0 && t_lo > 1e-120 && guard < 500 {
            t_lo /= ratio;
            grid.push(t_lo);
            guard += 1;
        }
        grid.reverse();
    }
    for k in 0..=n {
        grid.push(opts.t_min * ratio.powi(k as i32));
    }
    {
        let mut t_hi = *grid.last().unwrap();
        let mut guard = 0;
        while deriv(t_hi) >= 0.0 && t_hi < 1e120 && guard < 500 {
            t_hi *= ratio;
            grid.push(t_hi);
            guard += 1;
        }
    }

    let mut roots = Vec::new();
    let mut brackets = Vec::new();
    let mut prev_t = grid[0];
    let mut prev_f = deriv(prev_t);
    for &t in &grid[1..] {
        let f_hi = deriv(t);
        if prev_f == 0.0 {
            roots.push(prev_t);
            brackets.push((prev_t, prev_t));
        } else if prev_f * f_hi < 0.0 {
            let (mut lo, mut hi) = (prev_t, t);
            let mut flo = prev_f;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if (hi - lo) <= 1e-15 * mid {
                    break;
                }
                let fm = deriv(mid);
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if flo * fm < 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            roots.push(0.5 * (lo + hi));
            brackets.push((prev_t, t));
        }
        prev_t = t;
        prev_f = f_hi;
    }
    (roots, brackets)
}

/// Merge roots that collide within relative tolerance into one point.
fn dedup_roots(mut roots: Vec<f64>) -> (Vec<f64>, bool) {
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut merged = false;
    let mut out: Vec<f64> = Vec::with_capacity(roots.len());
    for r in roots {
        if let Some(last) = out.last() {
            if (r - last) <= 1e-7 * r {
                merged = true;
                continue;
            }
        }
        out.push(r);
    }
    (out, merged)
}

fn classify(d2: f64, d2_scale: f64) -> CurvatureSign {
    if d2.abs() < TOL_DEGENERATE * d2_scale {
        CurvatureSign::Zero
    } else if d2 > 0.0 {
        CurvatureSign::Positive
    } else {
        CurvatureSign::Negative
    }
}

/// Critical points of the three-term fiber `t -> Φ_λ(tu)`.
///
/// Returns zero, one degenerate, or two classified points; never more than
/// two. The tangency case (derivative touching zero without a sign change)
/// is detected at the analytic fiber maximum of the associated quotient.
pub fn critical_points_3term(
    coeffs: &FiberCoeffs3,
    lambda: f64,
    opts: &ScanOptions,
) -> CriticalPointSet {
    let e = coeffs.exp;
    // Work with ψ(t) = Φ'(t)/t^{q-1} = a t^{p-q} − λ b_q − c t^{γ-q}:
    // same roots, better scaling over the geometric grid.
    let psi = |t: f64| {
        coeffs.a * pow_abs(t, e.p - e.q) - lambda * coeffs.b_q
            - coeffs.c * pow_abs(t, e.gamma - e.q)
    };
    // ψ(0+) = −λ b_q; for λ = 0 the a t^{p-q} term leads and ψ(0+) = 0+.
    let sign_at_zero = if lambda != 0.0 { -lambda } else { 1.0 };
    let (raw, brackets) = scan_roots(psi, opts, sign_at_zero);
    let (mut roots, _) = dedup_roots(raw);

    // Tangency completion: ψ peaks at the closed-form maximizer; if the scan
    // found nothing there but the peak value vanishes within tolerance, the
    // fiber has a degenerate critical point.
    if roots.is_empty() && lambda > 0.0 {
        let t_star = ((e.p - e.q) * coeffs.a / ((e.gamma - e.q) * coeffs.c))
            .powf(1.0 / (e.gamma - e.p));
        let scale = coeffs.a * pow_abs(t_star, e.p - e.q)
            + lambda.abs() * coeffs.b_q
            + coeffs.c * pow_abs(t_star, e.gamma - e.q);
        if psi(t_star).abs() <= 1e-9 * scale {
            roots.push(t_star);
        }
    }

    let points: Vec<CriticalPoint> = roots
        .iter()
        .map(|&t| {
            let jet = phi_fiber_3(coeffs, lambda, t).expect("t > 0 by construction");
            let d2_scale = (coeffs.a * (e.p - 1.0) * pow_abs(t, e.p)
                + lambda.abs() * coeffs.b_q * (e.q - 1.0) * pow_abs(t, e.q)
                + coeffs.c * (e.gamma - 1.0) * pow_abs(t, e.gamma))
                / (t * t);
            CriticalPoint {
                t,
                curvature: classify(jet.d2, d2_scale),
            }
        })
        .collect();
    assert!(points.len() <= 2, "three-term fiber admits at most two critical points");
    CriticalPointSet { points, brackets }
}

/// Critical points of the four-term fiber `t -> Φ_{λ,μ}(tu)`.
///
/// Returns up to three classified points ordered by t; the middle point, when
/// all three exist, has nonnegative curvature and the outer two nonpositive.
pub fn critical_points_4term(
    coeffs: &FiberCoeffs4,
    lambda: f64,
    mu: f64,
    opts: &ScanOptions,
) -> CriticalPointSet {
    let e = coeffs.exp;
    // ψ(t) = Φ'(t)/t^{q-1}.
    let psi = |t: f64| {
        coeffs.a * pow_abs(t, e.p - e.q) + lambda * coeffs.b_q
            - mu * coeffs.b_alpha * pow_abs(t, e.alpha - e.q)
            - coeffs.c * pow_abs(t, e.gamma - e.q)
    };
    // ψ(0+) = λ b_q; with λ = 0 the smallest surviving exponent leads.
    let sign_at_zero = if lambda != 0.0 {
        lambda
    } else if mu != 0.0 {
        -mu
    } else {
        1.0
    };
    let (raw, brackets) = scan_roots(psi, opts, sign_at_zero);
    let (roots, _) = dedup_roots(raw);
    let points: Vec<CriticalPoint> = roots
        .iter()
        .map(|&t| {
            let jet = phi_fiber_4(coeffs, lambda, mu, t).expect("t > 0 by construction");
            let d2_scale = (coeffs.a * (e.p - 1.0) * pow_abs(t, e.p)
                + lambda.abs() * coeffs.b_q * (e.q - 1.0) * pow_abs(t, e.q)
                + mu.abs() * coeffs.b_alpha * (e.alpha - 1.0) * pow_abs(t, e.alpha)
                + coeffs.c * (e.gamma - 1.0) * pow_abs(t, e.gamma))
                / (t * t);
            CriticalPoint {
                t,
                curvature: classify(jet.d2, d2_scale),
            }
        })
        .collect();
    assert!(points.len() <= 3, "four-term fiber admits at most three critical points");
    CriticalPointSet { points, brackets }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e3() -> Exponents3 {
        Exponents3::new(1.5, 2.0, 3.0).unwrap()
    }

    fn unit_c3() -> FiberCoeffs3 {
        FiberCoeffs3::new(1.0, 1.0, 1.0, e3()).unwrap()
    }

    fn e4() -> Exponents4 {
        Exponents4::new(1.2, 1.5, 2.0, 3.0).unwrap()
    }

    fn unit_c4() -> FiberCoeffs4 {
        FiberCoeffs4::new(1.0, 1.0, 1.0, 1.0, e4()).unwrap()
    }

    #[test]
    fn exponent_orderings_are_enforced() {
        assert!(Exponents3::new(2.0, 1.5, 3.0).is_err());
        assert!(Exponents3::new(0.9, 2.0, 3.0).is_err());
        assert!(Exponents4::new(1.2, 2.0, 1.5, 3.0).is_err());
        assert!(Exponents3::new(1.5, 2.0, 3.0).unwrap().subcritical_for(2));
        // p* = 6 in 3D for p = 2; gamma = 7 is supercritical.
        assert!(!Exponents3::new(1.5, 2.0, 7.0).unwrap().subcritical_for(3));
    }

    #[test]
    fn phi_values_at_unit_t() {
        // λ = 0: 1/2 − 1/3 = 1/6.
        let j = phi_fiber_3(&unit_c3(), 0.0, 1.0).unwrap();
        assert!((j.value - 1.0 / 6.0).abs() < 1e-15);
        // λ = 0.2: 1/2 − 0.2/1.5 − 1/3.
        let j = phi_fiber_3(&unit_c3(), 0.2, 1.0).unwrap();
        assert!((j.value - (0.5 - 0.2 / 1.5 - 1.0 / 3.0)).abs() < 1e-15);
        assert!(phi_fiber_3(&unit_c3(), 0.2, 0.0).is_err());
        assert!(phi_fiber_3(&unit_c3(), 0.2, -1.0).is_err());
    }

    #[test]
    fn phi_derivatives_match_finite_differences() {
        let c = FiberCoeffs3::new(1.3, 0.8, 2.1, e3()).unwrap();
        let t = 0.7;
        let h = 1e-6;
        let j = phi_fiber_3(&c, 0.2, t).unwrap();
        let fp = phi_fiber_3(&c, 0.2, t + h).unwrap().value;
        let fm = phi_fiber_3(&c, 0.2, t - h).unwrap().value;
        let fd1 = (fp - fm) / (2.0 * h);
        assert!((j.d1 - fd1).abs() <= 1e-6 * j.d1.abs().max(1.0));
        let fd2 = (fp - 2.0 * j.value + fm) / (h * h);
        assert!((j.d2 - fd2).abs() <= 1e-3 * j.d2.abs().max(1.0));

        let c4 = FiberCoeffs4::new(0.9, 1.1, 0.7, 1.4, e4()).unwrap();
        let j4 = phi_fiber_4(&c4, 0.1, 0.5, t).unwrap();
        let fp = phi_fiber_4(&c4, 0.1, 0.5, t + h).unwrap().value;
        let fm = phi_fiber_4(&c4, 0.1, 0.5, t - h).unwrap().value;
        assert!((j4.d1 - (fp - fm) / (2.0 * h)).abs() <= 1e-6 * j4.d1.abs().max(1.0));
    }

    #[test]
    fn two_critical_points_below_threshold() {
        // Φ'(t) = t − 0.2 t^{0.5} − t²; sign-scan roots near 0.0437 and 0.772.
        let set = critical_points_3term(&unit_c3(), 0.2, &ScanOptions::default());
        assert_eq!(set.len(), 2);
        let t_plus = set.points[0];
        let t_minus = set.points[1];
        assert!((t_plus.t - 0.0437).abs() < 2e-4);
        assert!((t_minus.t - 0.772).abs() < 1e-3);
        assert_eq!(t_plus.curvature, CurvatureSign::Positive);
        assert_eq!(t_minus.curvature, CurvatureSign::Negative);
        for p in &set.points {
            let jet = phi_fiber_3(&unit_c3(), 0.2, p.t).unwrap();
            assert!(jet.d1.abs() < TOL_ROOT * p.t.max(1.0));
        }
    }

    #[test]
    fn no_critical_points_above_threshold() {
        // λ(u) ≈ 0.3849 for unit coefficients; 0.5 exceeds it.
        let set = critical_points_3term(&unit_c3(), 0.5, &ScanOptions::default());
        assert!(set.is_empty());
    }

    #[test]
    fn tangency_gives_single_degenerate_point() {
        // λ(u) = 2/(3 sqrt 3) for unit coefficients; the fiber derivative is
        // tangent to zero at s_max = 1/3.
        let lambda_u = 2.0 / (3.0 * 3.0f64.sqrt());
        let set = critical_points_3term(&unit_c3(), lambda_u, &ScanOptions::default());
        assert_eq!(set.len(), 1);
        assert_eq!(set.points[0].curvature, CurvatureSign::Zero);
        assert!((set.points[0].t - 1.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn nonpositive_lambda_gives_single_maximum() {
        for lambda in [0.0, -0.4, -2.0] {
            let set = critical_points_3term(&unit_c3(), lambda, &ScanOptions::default());
            assert_eq!(set.len(), 1, "lambda = {lambda}");
            assert_eq!(set.points[0].curvature, CurvatureSign::Negative);
        }
    }

    #[test]
    fn four_term_window_gives_three_points() {
        // λ = 0.1, μ inside the (μ^{n,+}(u), μ^{n,-}(u)) window.
        let set = critical_points_4term(&unit_c4(), 0.1, 0.49, &ScanOptions::default());
        assert_eq!(set.len(), 3);
        assert_eq!(set.points[0].curvature, CurvatureSign::Negative);
        assert_eq!(set.points[1].curvature, CurvatureSign::Positive);
        assert_eq!(set.points[2].curvature, CurvatureSign::Negative);
        let ts: Vec<f64> = set.points.iter().map(|p| p.t).collect();
        assert!(ts[0] < ts[1] && ts[1] < ts[2]);
    }

    #[test]
    fn four_term_large_mu_gives_single_maximum() {
        let set = critical_points_4term(&unit_c4(), 0.1, 10.0, &ScanOptions::default());
        assert_eq!(set.len(), 1);
        assert_eq!(set.points[0].curvature, CurvatureSign::Negative);
    }

    #[test]
    fn scan_count_matches_brute_force_sign_changes() {
        // Brute-force oracle: count sign changes of Φ' over a dense
        // geometric grid and compare with the solver's point count.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let c = FiberCoeffs3::new(
                rng.gen_range(0.1..10.0),
                rng.gen_range(0.1..10.0),
                rng.gen_range(0.1..10.0),
                e3(),
            )
            .unwrap();
            let lambda = rng.gen_range(-0.5..1.0);
            let set = critical_points_3term(&c, lambda, &ScanOptions::default());
            let mut changes = 0;
            let mut prev = phi_fiber_3(&c, lambda, SCAN_T_MIN).unwrap().d1;
            for k in 1..10_000 {
                let t = SCAN_T_MIN * (SCAN_T_MAX / SCAN_T_MIN).powf(k as f64 / 9999.0);
                let d = phi_fiber_3(&c, lambda, t).unwrap().d1;
                if prev * d < 0.0 {
                    changes += 1;
                }
                prev = d;
            }
            let degenerate = set
                .points
                .iter()
                .any(|p| p.curvature == CurvatureSign::Zero);
            if !degenerate {
                assert_eq!(set.len(), changes, "lambda = {lambda}");
            }
        }
    }
}
