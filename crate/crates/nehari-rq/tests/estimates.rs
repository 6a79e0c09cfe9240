//! Estimator-level properties: refinement stability, multi-start
//! self-consistency, infimum bounds against trial functions, the
//! applicability threshold cross-check, and the estimate-level mu ordering.

use nehari_rq::extremal::{
    lambda_e_star, lambda_n_star, lambda_star, mu_extremal, DescentOptions, MuSign,
};
use nehari_rq::fibering::{critical_points_3term, Exponents3, Exponents4, FiberCoeffs3, ScanOptions};
use nehari_rq::gridfield::{integrate, DiscreteFunction, Domain};
use nehari_rq::quotients::{lambda_e_quotient, lambda_n_quotient, lambda_u, Flavor};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn e3() -> Exponents3 {
    Exponents3::new(1.5, 2.0, 3.0).unwrap()
}

fn e4() -> Exponents4 {
    Exponents4::new(1.2, 1.5, 2.0, 3.0).unwrap()
}

fn coeffs3(u: &DiscreteFunction, e: &Exponents3) -> FiberCoeffs3 {
    let b = integrate(u, &[e.q, e.gamma], e.p).unwrap();
    FiberCoeffs3::new(
        b.grad_p,
        b.lebesgue(e.q).unwrap(),
        b.lebesgue(e.gamma).unwrap(),
        *e,
    )
    .unwrap()
}

#[test]
fn lambda_star_is_stable_under_refinement_and_across_starts() {
    let e = e3();
    let mut opts = DescentOptions::default();
    opts.starts = 4;
    opts.max_iters = 3000;
    let coarse = lambda_star(&Domain::interval(1.0, 100).unwrap(), &e, &opts).unwrap();
    let fine = lambda_star(&Domain::interval(1.0, 200).unwrap(), &e, &opts).unwrap();
    let drift = (coarse.value - fine.value).abs() / fine.value;
    assert!(drift < 1e-3, "refinement drift {drift}");
    // Feasible starts all descend to the same basin value.
    for est in [&coarse, &fine] {
        for v in est.per_start_values.iter().filter(|v| v.is_finite()) {
            assert!(
                (v - est.value).abs() / est.value < 1e-4,
                "per-start spread {v} vs {}",
                est.value
            );
        }
    }
}

#[test]
fn lambda_star_threshold_splits_the_fiber_census() {
    // Just below the estimate the minimizer's fiber has the two-point
    // geometry; just above it has none.
    let e = e3();
    let d = Domain::interval(1.0, 100).unwrap();
    let mut opts = DescentOptions::default();
    opts.starts = 3;
    opts.max_iters = 2000;
    let est = lambda_star(&d, &e, &opts).unwrap();
    let c = coeffs3(&est.minimizer, &e);
    let scan = ScanOptions::default();
    assert_eq!(critical_points_3term(&c, 0.99 * est.value, &scan).len(), 2);
    assert_eq!(critical_points_3term(&c, 1.01 * est.value, &scan).len(), 0);
}

#[test]
fn estimates_bound_trial_quotients_from_below() {
    let e = e3();
    let d = Domain::interval(1.0, 80).unwrap();
    let mut opts = DescentOptions::default();
    opts.starts = 3;
    opts.max_iters = 1500;
    let est = lambda_star(&d, &e, &opts).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..20 {
        let (center, width): (f64, f64) = (rng.gen_range(0.2..0.8), rng.gen_range(0.1..0.4));
        let trial = DiscreteFunction::sample(d.clone(), move |x| {
            (1.0 - (x[0] - center).abs() / width).max(0.0)
        });
        if trial.is_zero() {
            continue;
        }
        let c = coeffs3(&trial, &e);
        assert!(est.value <= lambda_u(&c).value * (1.0 + 1e-9));
    }
}

#[test]
fn four_term_estimates_are_ordered() {
    let e = e4();
    let d = Domain::interval(1.0, 80).unwrap();
    let mut opts = DescentOptions::default();
    opts.starts = 3;
    opts.max_iters = 900;
    let le = lambda_e_star(&d, &e, &opts).unwrap();
    let ln = lambda_n_star(&d, &e, &opts).unwrap();
    assert!(0.0 < le.value && le.value < ln.value);
    let lambda = 0.5 * le.value;
    let np = mu_extremal(&d, &e, lambda, MuSign::Plus, Flavor::N, &opts).unwrap();
    let ep = mu_extremal(&d, &e, lambda, MuSign::Plus, Flavor::E, &opts).unwrap();
    let em = mu_extremal(&d, &e, lambda, MuSign::Minus, Flavor::E, &opts).unwrap();
    let nm = mu_extremal(&d, &e, lambda, MuSign::Minus, Flavor::N, &opts).unwrap();
    assert!(
        0.0 < np.value && np.value < ep.value && ep.value < em.value && em.value < nm.value,
        "estimate ordering: {} {} {} {}",
        np.value,
        ep.value,
        em.value,
        nm.value
    );
    // Infimum bounds at the smooth trial mode.
    let trial = nehari_rq::extremal::smooth_mode(&d);
    let b = integrate(&trial, &[e.q, e.alpha, e.gamma], e.p).unwrap();
    let c = nehari_rq::fibering::FiberCoeffs4::new(
        b.grad_p,
        b.lebesgue(e.q).unwrap(),
        b.lebesgue(e.alpha).unwrap(),
        b.lebesgue(e.gamma).unwrap(),
        e,
    )
    .unwrap();
    assert!(le.value <= lambda_e_quotient(&c).value * (1.0 + 1e-9));
    assert!(ln.value <= lambda_n_quotient(&c).value * (1.0 + 1e-9));
}
