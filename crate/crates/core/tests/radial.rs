use hardylab::cli::{random_hardy_profile, random_log_profile};
use hardylab::radial::{
    gradient_energy, gradient_l1_lorentz_identity, graded_grid, hardy_gap, inverse_magical_transform,
    log_integration_by_parts, log_transform, magical_transform, trapezoid, uniform_grid, unit_ball_volume,
    weighted_integral, LOG_RADIUS,
};
use hardylab::{Domain, Error, RadialProfile};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn weighted_integral_examples() {
    let w3 = unit_ball_volume(3);
    let one = RadialProfile::sample(uniform_grid(0.0, 1.0, 20000), |_| 1.0, false).unwrap();
    assert!(rel(weighted_integral(&one, 0.0, 3).unwrap(), w3) < 1e-8);
    assert!(rel(weighted_integral(&one, -1.0, 3).unwrap(), 1.5 * w3) < 1e-12);

    // p(r) = r with weight -2 in N = 3, against a 10⁶-point midpoint rule
    let p = RadialProfile::sample(uniform_grid(0.0, 1.0, 1000), |r| r, false).unwrap();
    let m = 1_000_000;
    let oracle: f64 = (0..m).map(|i| (i as f64 + 0.5) / m as f64).sum::<f64>() / m as f64 * 3.0 * w3;
    assert!(rel(weighted_integral(&p, -2.0, 3).unwrap(), oracle) <= 1e-8);
}

#[test]
fn weighted_integral_rejects_singular_weight_at_origin() {
    let p = RadialProfile::sample(uniform_grid(0.0, 1.0, 100), |_| 1.0, false).unwrap();
    assert!(matches!(weighted_integral(&p, -3.0, 3), Err(Error::SingularIntegrand(_))));
    let shell = RadialProfile::sample(uniform_grid(1e-3, 1.0, 100), |_| 1.0, false).unwrap();
    assert!(weighted_integral(&shell, -3.0, 3).is_ok());
}

#[test]
fn trapezoid_is_second_order() {
    let w3 = unit_ball_volume(3);
    let exact = 3.0 * w3 / 5.0; // 3ω ∫ r² · r² dr
    let err = |m: usize| {
        let p = RadialProfile::sample(uniform_grid(0.0, 1.0, m), |r| r * r, false).unwrap();
        (weighted_integral(&p, 0.0, 3).unwrap() - exact).abs()
    };
    for m in [64, 128, 256, 512] {
        let ratio = err(m) / err(2 * m);
        assert!((3.5..4.5).contains(&ratio), "m = {m}: ratio {ratio}");
    }
}

#[test]
fn gradient_energy_examples() {
    let w3 = unit_ball_volume(3);
    let (delta, r_max, slope) = (0.1, 2.0, 1.0 / 1.9);
    let lin = RadialProfile::sample(uniform_grid(delta, r_max, 20000), |r| (r_max - r) * slope, true).unwrap();
    let exact = w3 * slope * slope * (r_max.powi(3) - delta.powi(3));
    assert!(rel(gradient_energy(&lin, 3).unwrap(), exact) < 1e-8);

    let zero = RadialProfile::sample(uniform_grid(0.0, 1.0, 64), |_| 0.0, true).unwrap();
    assert_eq!(gradient_energy(&zero, 3).unwrap(), 0.0);

    let para = RadialProfile::sample(uniform_grid(0.0, 1.0, 4096), |r| 1.0 - r * r, true).unwrap();
    assert!(rel(gradient_energy(&para, 3).unwrap(), 12.0 * w3 / 5.0) <= 1e-4);

    let short = RadialProfile::new(vec![0.0, 1.0], vec![1.0, 0.0], true).unwrap();
    assert!(matches!(gradient_energy(&short, 3), Err(Error::Resolution(_))));
}

#[test]
fn hardy_gap_examples() {
    let dom = Domain::unit_ball(3).unwrap();
    let zero = RadialProfile::sample(uniform_grid(1e-4, 1.0, 64), |_| 0.0, true).unwrap();
    assert_eq!(hardy_gap(&zero, &dom).unwrap(), 0.0);

    let delta: f64 = 1e-4;
    let u = RadialProfile::sample(uniform_grid(delta, 1.0, 8192), |r| 1.0 - r, true).unwrap();
    let gap = hardy_gap(&u, &dom).unwrap();
    // ω(1 - δ³) - ¼·3ω·(1 - δ)³/3
    let w3 = dom.omega_n;
    let exact = w3 * (1.0 - delta.powi(3)) - 0.25 * w3 * (1.0 - delta).powi(3);
    assert!(gap > 0.0);
    assert!(rel(gap, exact) <= 1e-4);

    let from_origin = RadialProfile::sample(uniform_grid(0.0, 1.0, 64), |r| 1.0 - r, true).unwrap();
    assert!(matches!(hardy_gap(&from_origin, &dom), Err(Error::Precondition(_))));
}

#[test]
fn magical_transform_examples() {
    for dim in [3u32, 5] {
        let k = (dim as f64 - 2.0) / 2.0;
        let u = RadialProfile::sample(uniform_grid(0.1, 1.0, 50), |r| r.powf(-k), false).unwrap();
        let v = magical_transform(&u, dim);
        assert!(v.values().iter().all(|x| (x - 1.0).abs() < 1e-14));
    }
    let z = RadialProfile::sample(uniform_grid(0.0, 1.0, 10), |_| 0.0, true).unwrap();
    assert!(magical_transform(&z, 3).values().iter().all(|x| *x == 0.0));
    let bad = RadialProfile::sample(uniform_grid(0.0, 1.0, 10), |r| 1.0 - r, true).unwrap();
    assert!(matches!(inverse_magical_transform(&bad, 3), Err(Error::SingularIntegrand(_))));
}

#[test]
fn magical_transform_carries_the_integrand_identity() {
    // Nω[∫(u')² r^{N-1} - ((N-2)²/4)∫u² r^{N-3}] = Nω∫(v')² r, up to the
    // boundary term k u(δ)² δ^{N-2} at the cutoff.
    for dim in [3u32, 4, 6] {
        let dom = Domain::unit_ball(dim).unwrap();
        let grid = graded_grid(1e-5, 1.0, 8192).unwrap();
        let u = RadialProfile::sample(grid, |r| 1.0 - r * r, true).unwrap();
        let lhs = hardy_gap(&u, &dom).unwrap();
        let v = magical_transform(&u, dim);
        let dv = v.derivative().unwrap();
        let y: Vec<f64> = v.grid().iter().zip(&dv).map(|(r, d)| d * d * r).collect();
        let rhs = dom.sphere_area() * trapezoid(v.grid(), &y);
        assert!(rel(lhs, rhs) <= 1e-4, "N = {dim}: {lhs} vs {rhs}");
    }
}

#[test]
fn random_profiles_satisfy_hardy() {
    for dim in [3u32, 4, 7] {
        let dom = Domain::new(dim, 2.5).unwrap();
        let grid = graded_grid(1e-6 * dom.radius, dom.radius, 8192).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(dim as u64);
        for _ in 0..50 {
            let u = random_hardy_profile(&mut rng, &dom, &grid).unwrap();
            let gap = hardy_gap(&u, &dom).unwrap();
            let scale = gradient_energy(&u, dim).unwrap();
            assert!(gap >= -1e-6 * scale, "N = {dim}: gap {gap}, scale {scale}");
        }
    }
}

#[test]
fn log_transform_examples() {
    let grid = uniform_grid(1e-3, LOG_RADIUS, 200);
    let zero = RadialProfile::sample(grid.clone(), |_| 0.0, true).unwrap();
    let t = log_transform(&zero, 3).unwrap();
    assert!(t.profile.values().iter().all(|x| *x == 0.0));
    assert!(t.warning.is_none());

    let v = RadialProfile::sample(grid.clone(), |r| LOG_RADIUS - r, true).unwrap();
    let t = log_transform(&v, 3).unwrap();
    let i = 57;
    let r = grid[i];
    let direct = (LOG_RADIUS - r) * r.powf(-0.5) * (-r.ln()).sqrt();
    assert!(rel(t.profile.values()[i], direct) < 1e-14);
    // v(δ) log δ is far from 0 here
    assert!(t.warning.is_some());

    let outside = RadialProfile::sample(uniform_grid(1e-3, 0.5, 20), |r| 0.5 - r, true).unwrap();
    assert!(matches!(log_transform(&outside, 3), Err(Error::InvalidArgument(_))));
}

#[test]
fn log_integration_by_parts_on_random_profiles() {
    let grid = graded_grid(1e-8, LOG_RADIUS, 8192).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for _ in 0..20 {
        let v = random_log_profile(&mut rng, &grid).unwrap();
        let (lhs, rhs) = log_integration_by_parts(&v).unwrap();
        assert!(rel(lhs, rhs) <= 1e-6, "{lhs} vs {rhs}");
    }
}

#[test]
fn gradient_l1_lorentz_identity_examples() {
    let dom = Domain::ball(3, 1.5).unwrap();
    let r_max = dom.radius;
    let u = RadialProfile::sample(uniform_grid(0.0, r_max, 4096), |r| r_max - r, true).unwrap();
    let (lhs, rhs) = gradient_l1_lorentz_identity(&u, &dom).unwrap();
    assert!(rel(lhs, dom.omega_n * r_max.powi(3)) < 1e-6);
    assert!(rel(rhs, lhs) <= 1e-6, "{lhs} vs {rhs}");

    let zero = RadialProfile::sample(uniform_grid(0.0, r_max, 64), |_| 0.0, true).unwrap();
    assert_eq!(gradient_l1_lorentz_identity(&zero, &dom).unwrap(), (0.0, 0.0));

    let dom4 = Domain::ball(4, 1.2).unwrap();
    let r4 = dom4.radius;
    let u = RadialProfile::sample(uniform_grid(0.0, r4, 4096), |r| r4 * r4 - r * r, true).unwrap();
    let (lhs, rhs) = gradient_l1_lorentz_identity(&u, &dom4).unwrap();
    assert!(rel(rhs, lhs) <= 1e-6, "{lhs} vs {rhs}");

    let rising = RadialProfile::sample(uniform_grid(0.0, 1.0, 64), |r| r * (1.0 - r), true).unwrap();
    assert!(matches!(
        gradient_l1_lorentz_identity(&rising, &Domain::unit_ball(3).unwrap()),
        Err(Error::Precondition(_))
    ));
}

proptest! {
    #[test]
    fn magical_round_trip(values in prop::collection::vec(-10.0f64..10.0, 8..40), dim in 3u32..9) {
        let grid = uniform_grid(0.01, 2.0, values.len() - 1);
        let u = RadialProfile::new(grid, values, false).unwrap();
        let back = inverse_magical_transform(&magical_transform(&u, dim), dim).unwrap();
        for (a, b) in back.values().iter().zip(u.values()) {
            prop_assert!((a - b).abs() <= 1e-14 * b.abs().max(1e-300));
        }
    }

    #[test]
    fn domain_volume_matches_radius(dim in 3u32..20, volume in 0.01f64..100.0) {
        let d = Domain::new(dim, volume).unwrap();
        prop_assert!(((d.omega_n * d.radius.powi(dim as i32) - volume) / volume).abs() <= 1e-12);
        prop_assert!(d.crit_exp > 2.0);
    }
}
