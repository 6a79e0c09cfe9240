//! Built-in invariant suites for `check --family ...`: quick seeded
//! replications of the per-family structural properties.

use anyhow::Result;
use nehari_rq::extremal::{lambda_star, DescentOptions};
use nehari_rq::fibering::{
    critical_points_3term, CurvatureSign, Exponents3, Exponents4, FiberCoeffs3, FiberCoeffs4,
    ScanOptions,
};
use nehari_rq::gridfield::Domain;
use nehari_rq::nehari::{solve_m, Branch, SolveOptions};
use nehari_rq::quotients::{
    lambda_e_quotient, lambda_e_u, lambda_n_quotient, lambda_u, mu_pm_quotients, rn_lambda_4term,
    s_e_max, s_max, t_e, Flavor,
};
use nehari_rq::zeromass::{
    mu_e, mu_e_from_mu, mu_of, nonexistence_certificate, RadialIntegrals, ZeroMassParams,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Recorder<'a> = dyn FnMut(&str, bool, String) + 'a;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

pub fn convex_concave(record: &mut Recorder) -> Result<()> {
    let e = Exponents3::new(1.5, 2.0, 3.0).unwrap();
    let unit = FiberCoeffs3::new(1.0, 1.0, 1.0, e).unwrap();
    record(
        "worked values (s_max, lambda, s_e_max, lambda_e)",
        rel(s_max(&unit), 1.0 / 3.0) < 1e-10
            && rel(lambda_u(&unit).value, 2.0 / (3.0 * 3.0f64.sqrt())) < 1e-10
            && rel(s_e_max(&unit), 0.5) < 1e-10
            && rel(lambda_e_u(&unit).value, 1.0 / (2.0 * 2.0f64.sqrt())) < 1e-10,
        format!("lambda(u) = {}", lambda_u(&unit).value),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut homogeneous = true;
    let mut ordered = true;
    let mut census = true;
    let scan = ScanOptions::default();
    for _ in 0..20 {
        let c = FiberCoeffs3::new(
            rng.gen_range(0.1..10.0),
            rng.gen_range(0.1..10.0),
            rng.gen_range(0.1..10.0),
            e,
        )
        .unwrap();
        let l = lambda_u(&c).value;
        for t in [0.5, 2.0, 10.0] {
            homogeneous &= rel(lambda_u(&c.rescaled(t)).value, l) < 1e-10;
        }
        ordered &= lambda_e_u(&c).value < l;
        census &= critical_points_3term(&c, 0.9 * l, &scan).len() == 2;
        census &= critical_points_3term(&c, 1.1 * l, &scan).is_empty();
        let at = critical_points_3term(&c, l, &scan);
        census &= at.len() == 1 && at.points[0].curvature == CurvatureSign::Zero;
    }
    record("0-homogeneity of lambda(u)", homogeneous, String::new());
    record("ordering lambda_e(u) < lambda(u)", ordered, String::new());
    record("critical point census (2 / 0 / 1 degenerate)", census, String::new());

    // Desk-scale two-branch solve.
    let d = Domain::interval(1.0, 41).unwrap();
    let dopts = DescentOptions {
        starts: 2,
        max_iters: 500,
        ..DescentOptions::default()
    };
    let star = lambda_star(&d, &e, &dopts)?;
    let opts = SolveOptions {
        descent: dopts,
        ..SolveOptions::default()
    };
    let lambda = 0.5 * star.value;
    let plus = solve_m(lambda, Branch::Plus, &d, &e, &opts)?;
    let minus = solve_m(lambda, Branch::Minus, &d, &e, &opts)?;
    record(
        "two distinct branch solutions",
        plus.residual < opts.tol_res
            && minus.residual < opts.tol_res
            && plus.energy < 0.0
            && plus.phi2 > 0.0
            && minus.phi2 < 0.0,
        format!("energies {:.5} / {:.5}", plus.energy, minus.energy),
    );
    Ok(())
}

pub fn four_term(record: &mut Recorder) -> Result<()> {
    let e = Exponents4::new(1.2, 1.5, 2.0, 3.0).unwrap();
    let unit = FiberCoeffs4::new(1.0, 1.0, 1.0, 1.0, e).unwrap();
    record(
        "worked values (t_n, lambda_n, t_e, lambda_e)",
        rel(lambda_n_quotient(&unit).realizer_t, 4.0 / 27.0) < 1e-10
            && rel(lambda_n_quotient(&unit).value, 0.200970922605180) < 1e-9
            && rel(lambda_e_quotient(&unit).realizer_t, 2.0 / 9.0) < 1e-10
            && rel(lambda_e_quotient(&unit).value, 0.166785189940816) < 1e-9,
        format!("lambda_n(u) = {}", lambda_n_quotient(&unit).value),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let mut ordered = true;
    let mut interlaced = true;
    let mut level_consistent = true;
    for _ in 0..20 {
        let c = FiberCoeffs4::new(
            rng.gen_range(0.2..5.0),
            rng.gen_range(0.2..5.0),
            rng.gen_range(0.2..5.0),
            rng.gen_range(0.2..5.0),
            e,
        )
        .unwrap();
        let le = lambda_e_quotient(&c).value;
        let ln = lambda_n_quotient(&c).value;
        ordered &= le < ln;
        let lambda = 0.5 * le;
        let (np, nm) = mu_pm_quotients(&c, lambda, Flavor::N)?;
        let (ep, em) = mu_pm_quotients(&c, lambda, Flavor::E)?;
        ordered &= np.value < ep.value && ep.value < em.value && em.value < nm.value;
        interlaced &= np.realizer_t < ep.realizer_t
            && ep.realizer_t < t_e(&c)
            && t_e(&c) < nm.realizer_t
            && nm.realizer_t < em.realizer_t;
        // Level-set identity at the minus point.
        level_consistent &=
            rel(rn_lambda_4term(&c, lambda, nm.realizer_t)?, nm.value) < 1e-9;
    }
    record("orderings (lambda and mu chains)", ordered, String::new());
    record("fiber point interlacing", interlaced, String::new());
    record("level-set consistency", level_consistent, String::new());
    Ok(())
}

pub fn zero_mass(record: &mut Recorder) -> Result<()> {
    let p = ZeroMassParams::new(3, 4.0, 3.0, 1.0, 30.0, 201).unwrap();
    record(
        "worked constants (c_N^E, c_pqNE, c(p,q,N))",
        rel(p.c_n_e(), 1.0 / 27.0) < 1e-12
            && rel(p.c_pqne()?, 1.0 / 9.0) < 1e-12
            && rel(p.c_pqn()?, 2.0 / 9.0f64.powf(1.0 / 3.0)) < 1e-12,
        format!("c(p,q,N) = {}", p.c_pqn()?),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    let mut homogeneous = true;
    let mut linked = true;
    for _ in 0..20 {
        let ints = RadialIntegrals {
            t_grad: rng.gen_range(0.2..20.0),
            a_p: rng.gen_range(0.2..20.0),
            b_q: rng.gen_range(0.2..20.0),
        };
        let base = mu_e(&ints, &p)?.value;
        for t in [0.5, 2.0] {
            for sigma in [0.5, 2.0] {
                homogeneous &= rel(mu_e(&ints.rescaled(t, sigma, &p), &p)?.value, base) < 1e-10;
            }
        }
        linked &= rel(mu_e_from_mu(mu_of(&ints, &p), &p)?, base) < 1e-10;
    }
    record("multi-homogeneity of mu^E", homogeneous, String::new());
    record("mu^E reconstructed from mu", linked, String::new());
    let rev = ZeroMassParams::new(3, 3.0, 4.0, 1.0, 30.0, 201).unwrap();
    let cert = nonexistence_certificate(&rev, 0)?;
    record(
        "nonexistence certificate for p < q",
        cert.min_fiber_slope > 0.0 && cert.sobolev_margin > 0.0 && cert.order_margin > 0.0,
        format!("min fiber slope {}", cert.min_fiber_slope),
    );
    Ok(())
}
