use hardylab::constants::{
    brezis_vazquez, check_thm5_range, hardy_constant, records, thm1_constant, thm1_weighted_constant, thm2_constant,
    thm4_constants, thm5_alpha, thm5_constant, thm5_range, ConstantId,
};
use hardylab::radial::unit_ball_volume;
use hardylab::special::spectral_constants;
use hardylab::varmin::disk_dirichlet_eigenvalue;
use hardylab::{Domain, Error};
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn hardy_constant_examples() {
    assert_eq!(hardy_constant(3).unwrap(), 0.25);
    assert_eq!(hardy_constant(4).unwrap(), 1.0);
    assert_eq!(hardy_constant(10).unwrap(), 16.0);
    assert!(matches!(hardy_constant(2), Err(Error::InvalidArgument(_))));
}

#[test]
fn thm1_examples() {
    let dom = Domain::unit_ball(3).unwrap();
    let v0 = spectral_constants().v0;
    let c = thm1_constant(&dom);
    assert!(rel(c, unit_ball_volume(3).powf(1.0 / 3.0) * v0) < 1e-14);
    assert!((c - 2.3307).abs() < 1e-4);
    assert!(rel(thm1_weighted_constant(&dom), v0) < 1e-14);
    let big = Domain::new(3, 8.0 * dom.volume).unwrap();
    assert!(rel(thm1_constant(&big), 0.5 * c) < 1e-14);
}

#[test]
fn thm2_examples() {
    let dom = Domain::unit_ball(3).unwrap();
    let c = thm2_constant(&dom, 1.0).unwrap();
    assert!(rel(c, 31.25 / (3.0 * dom.omega_n)) < 1e-14);
    assert!((c - 2.4868).abs() < 1e-4);
    for dim in [3u32, 4, 7] {
        let n = dim as f64;
        for volume in [0.3, 1.0, 5.0] {
            let d = Domain::new(dim, volume).unwrap();
            let want = n * n * d.omega_n.powf(2.0 / n) / (4.0 * volume);
            assert!(rel(thm2_constant(&d, n / (n - 1.0)).unwrap(), want) < 1e-13);
        }
    }
    assert!(matches!(thm2_constant(&dom, 0.9), Err(Error::InvalidArgument(_))));
    assert!(matches!(thm2_constant(&dom, 6.0), Err(Error::InvalidArgument(_))));
}

#[test]
fn thm4_examples() {
    let dom = Domain::unit_ball(3).unwrap();
    let (text, stmt) = thm4_constants(&dom);
    assert!((text - 0.13428).abs() < 1e-5);
    assert!((stmt - 0.03206).abs() < 1e-5);
    for dim in [3u32, 5, 8] {
        let d = Domain::new(dim, 2.0).unwrap();
        let (t, s) = thm4_constants(&d);
        assert!(rel(t / s, d.omega_n) < 1e-14);
    }
}

#[test]
fn thm5_examples() {
    let (lo, text) = thm5_range(3);
    assert_eq!(text, "6/7");
    assert!((lo - 6.0 / 7.0).abs() < 1e-15);
    assert_eq!(thm5_range(4).1, "4/5");
    let dom = Domain::new(3, 1.0).unwrap();
    // exact value 0.7545351...; the printed approximation is 0.75455
    assert!((thm5_constant(&dom, 0.9).unwrap() - 0.75455).abs() < 5e-5);
    assert!((thm5_alpha(3, 0.9) - 1.0 / 3.0).abs() < 1e-15);
    for p in [0.5, 6.0 / 7.0, 1.0] {
        match check_thm5_range(3, p) {
            Err(Error::InvalidArgument(msg)) => assert!(msg.contains("(6/7, 1)"), "{msg}"),
            other => panic!("p = {p}: {other:?}"),
        }
    }
}

#[test]
fn thm5_tends_to_gradient_l1_constant() {
    for dim in [3u32, 4, 6] {
        let dom = Domain::new(dim, 1.7).unwrap();
        let below = thm5_constant(&dom, 1.0 - 1e-6).unwrap();
        let (text, _) = thm4_constants(&dom);
        assert!(rel(below, text) < 1e-5, "N = {dim}");
    }
}

#[test]
fn brezis_vazquez_examples() {
    let sc = spectral_constants();
    let unit = Domain::unit_ball(3).unwrap();
    assert!(rel(brezis_vazquez(&unit), sc.lambda2) < 1e-13);
    assert!((brezis_vazquez(&unit) - 5.7832).abs() < 1e-4);
    let two = Domain::ball(4, 2.0).unwrap();
    assert!(rel(brezis_vazquez(&two), sc.lambda2 / 4.0) < 1e-13);
    let eig = disk_dirichlet_eigenvalue(4096).unwrap().eigenvalue;
    assert!(rel(eig, brezis_vazquez(&unit)) <= 1e-3);
}

#[test]
fn dimensional_scaling() {
    for dim in [3u32, 5] {
        let n = dim as f64;
        let base = Domain::new(dim, 1.3).unwrap();
        let p2 = 1.2;
        let p5 = 0.5 * (thm5_range(dim).0 + 1.0);
        let a = n / p2 - n / 2.0 + 1.0;
        for t in [0.5_f64, 2.0] {
            let scaled = Domain::new(dim, t.powi(dim as i32) * base.volume).unwrap();
            assert!(rel(thm1_constant(&scaled), thm1_constant(&base) / t) < 1e-13);
            assert!(rel(thm1_weighted_constant(&scaled), thm1_weighted_constant(&base) / t) < 1e-13);
            assert!(rel(
                thm2_constant(&scaled, p2).unwrap(),
                thm2_constant(&base, p2).unwrap() * t.powf(-2.0 * a)
            ) < 1e-13);
            let (ts, ss) = thm4_constants(&scaled);
            let (tb, sb) = thm4_constants(&base);
            assert!(rel(ts, tb * t.powf(-n)) < 1e-13);
            assert!(rel(ss, sb * t.powf(-n)) < 1e-13);
            assert!(rel(
                thm5_constant(&scaled, p5).unwrap(),
                thm5_constant(&base, p5).unwrap() * t.powf(-n * (2.0 / p5 - 1.0))
            ) < 1e-13);
            assert!(rel(brezis_vazquez(&scaled), brezis_vazquez(&base) / (t * t)) < 1e-13);
        }
    }
}

#[test]
fn records_cover_every_constant() {
    let dom = Domain::new(3, 4.18879).unwrap();
    let all = records(&dom, Some(1.0), None).unwrap();
    let ids: Vec<&str> = all.iter().map(|r| r.id.as_str()).collect();
    for id in ["hardy", "brezis_vazquez", "thm1", "thm2", "thm4_text", "thm4_stmt"] {
        assert!(ids.contains(&id), "{id} missing from {ids:?}");
    }
    assert!(all.iter().all(|r| r.value > 0.0 && !r.formula_text.is_empty()));
    let hardy = all.iter().find(|r| r.id == ConstantId::Hardy).unwrap();
    assert_eq!(hardy.value, 0.25);

    let with_thm5 = records(&dom, Some(0.9), None).unwrap();
    let thm5 = with_thm5.iter().find(|r| r.id == ConstantId::Thm5).unwrap();
    assert!((thm5.params.alpha.unwrap() - 1.0 / 3.0).abs() < 1e-15);
    assert!(records(&dom, Some(0.5), None).is_err());
}

proptest! {
    #[test]
    fn constants_are_positive(dim in 3u32..12, volume in 0.01f64..50.0, s in 0.01f64..0.99) {
        let dom = Domain::new(dim, volume).unwrap();
        let n = dim as f64;
        let p2 = 1.0 + s * (2.0 * n / (n - 2.0) - 1.0);
        let (lo, _) = thm5_range(dim);
        let p5 = lo + s * (1.0 - lo);
        prop_assert!(thm1_constant(&dom) > 0.0);
        prop_assert!(thm2_constant(&dom, p2).unwrap() > 0.0);
        prop_assert!(thm5_constant(&dom, p5).unwrap() > 0.0);
        prop_assert!(brezis_vazquez(&dom) > 0.0);
        let (t, st) = thm4_constants(&dom);
        prop_assert!(t > 0.0 && st > 0.0);
    }
}
