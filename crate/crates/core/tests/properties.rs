//! Cross-module invariants: gradient consistency, projection geometry,
//! monotonicity of the max-min objectives, and the solver-level ordering
//! properties that the closed forms predict.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use polarmax_core::continuous::counting_measure;
use polarmax_core::covering::circle_unconstrained_cover;
use polarmax_core::domain::Domain;
use polarmax_core::geom;
use polarmax_core::kernel::{eval_gradient, eval_kernel, KernelSpec};
use polarmax_core::polarization::{polarization_value, total_potential, Configuration};
use polarmax_core::procedures::non_concentration_census;
use polarmax_core::solver::{
    circle_optimal_radius, maximize_polarization, SolveMode, SolveOptions,
};

fn random_point(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> Vec<f64> {
    (0..dim).map(|_| scale * (2.0 * rng.gen::<f64>() - 1.0)).collect()
}

#[test]
fn gradients_match_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut checked = 0;
    while checked < 100 {
        let dim = 2 + (checked % 3);
        let spec = match checked % 4 {
            0 | 1 => KernelSpec::riesz(-3.0 + 7.0 * rng.gen::<f64>()),
            2 => KernelSpec::riesz(0.0),
            _ => KernelSpec::inner_power(2 * (1 + checked as u32 % 3)).unwrap(),
        };
        let x = random_point(&mut rng, dim, 3.0);
        let y = random_point(&mut rng, dim, 3.0);
        let r = geom::dist(&x, &y);
        if !(0.1..=10.0).contains(&r) {
            continue;
        }
        let g = eval_gradient(&spec, &x, &y).unwrap();
        let h = 1e-5;
        let mut max_rel = 0.0_f64;
        for i in 0..dim {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[i] += h;
            xm[i] -= h;
            let fd = (eval_kernel(&spec, &xp, &y).unwrap()
                - eval_kernel(&spec, &xm, &y).unwrap())
                / (2.0 * h);
            let scale = g.iter().map(|c| c.abs()).fold(1e-8, f64::max);
            max_rel = max_rel.max((g[i] - fd).abs() / scale);
        }
        assert!(max_rel <= 1e-5, "{spec:?}: rel err {max_rel}");
        checked += 1;
    }
}

proptest! {
    #[test]
    fn riesz_values_decrease_in_distance(
        s in -4.0..5.0f64,
        r1 in 1e-3..10.0f64,
        bump in 1e-3..5.0f64,
    ) {
        let r2 = r1 + bump;
        let v1 = KernelSpec::riesz_profile(s, r1);
        let v2 = KernelSpec::riesz_profile(s, r2);
        prop_assert!(v1 > v2, "s={s}: f({r1})={v1} <= f({r2})={v2}");
    }

    #[test]
    fn census_is_monotone_in_eps(
        seed in 0u64..1000,
        eps1 in 0.01..1.0f64,
        bump in 0.0..1.0f64,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<Vec<f64>> = (0..6).map(|_| random_point(&mut rng, 2, 1.5)).collect();
        let config = Configuration::new(pts).unwrap();
        let domain = Domain::unit_circle();
        let c1 = non_concentration_census(&config, &domain, eps1).unwrap();
        let c2 = non_concentration_census(&config, &domain, eps1 + bump).unwrap();
        prop_assert!(c2 <= c1);
    }

    #[test]
    fn counting_measure_weights_sum_to_one(seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 1 + (seed as usize % 7);
        let mut pts: Vec<Vec<f64>> = (0..n).map(|_| random_point(&mut rng, 2, 1.0)).collect();
        pts.push(pts[0].clone()); // force one duplicate
        let mu = counting_measure(&Configuration::new(pts).unwrap());
        let total: f64 = mu.weights.iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        prop_assert!(mu.weights.iter().all(|w| *w > 0.0));
    }
}

#[test]
fn inner_power_is_rotation_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for p in [2usize, 3, 4] {
        let spec = KernelSpec::inner_power(4).unwrap();
        for _ in 0..40 {
            let x = unit(&mut rng, p);
            let y = unit(&mut rng, p);
            let before = eval_kernel(&spec, &x, &y).unwrap();
            // random rotation as a product of Givens rotations
            let (mut rx, mut ry) = (x.clone(), y.clone());
            for i in 0..p {
                for j in i + 1..p {
                    let t = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
                    givens(&mut rx, i, j, t);
                    givens(&mut ry, i, j, t);
                }
            }
            let after = eval_kernel(&spec, &rx, &ry).unwrap();
            assert!((before - after).abs() <= 1e-12, "p={p}: {before} vs {after}");
        }
    }
}

fn unit(rng: &mut ChaCha8Rng, p: usize) -> Vec<f64> {
    loop {
        let v = random_point(rng, p, 1.0);
        let n = geom::norm(&v);
        if n > 1e-3 {
            return geom::scale(&v, 1.0 / n);
        }
    }
}

fn givens(v: &mut [f64], i: usize, j: usize, theta: f64) {
    let (c, s) = (theta.cos(), theta.sin());
    let (a, b) = (v[i], v[j]);
    v[i] = c * a - s * b;
    v[j] = s * a + c * b;
}

#[test]
fn projections_are_idempotent_and_nonexpansive() {
    let shapes = [
        Domain::unit_circle(),
        Domain::Ball {
            p: 3,
            radius: 1.5,
            center: vec![0.5, 0.0, -0.5],
        },
        Domain::Cube {
            p: 2,
            side: 2.0,
            corner: vec![-1.0, -1.0],
        },
        Domain::PointCloud {
            points: vec![
                vec![0.0, 0.0],
                vec![2.0, 0.5],
                vec![0.5, 2.0],
                vec![1.0, 1.0],
                vec![-0.5, 0.8],
            ],
        },
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for domain in &shapes {
        let dim = domain.ambient_dim();
        for _ in 0..250 {
            let x = random_point(&mut rng, dim, 4.0);
            let y = random_point(&mut rng, dim, 4.0);
            let px = domain.project_hull(&x).unwrap();
            let py = domain.project_hull(&y).unwrap();
            let ppx = domain.project_hull(&px).unwrap();
            assert!(geom::dist(&px, &ppx) <= 1e-9, "{domain:?} not idempotent");
            assert!(
                geom::dist(&px, &py) <= geom::dist(&x, &y) + 1e-9,
                "{domain:?} expanded {} -> {}",
                geom::dist(&x, &y),
                geom::dist(&px, &py)
            );
        }
    }
}

#[test]
fn hull_projection_never_lowers_the_potential_sum() {
    // moving an outside charge to its hull projection helps everywhere on A
    let domain = Domain::unit_circle();
    let sample = domain.sample(256, 0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for s in [2.0, 0.0, -1.0] {
        let spec = KernelSpec::riesz(s);
        for _ in 0..50 {
            let x = geom::scale(&unit(&mut rng, 2), 1.0 + 3.0 * rng.gen::<f64>());
            let proj = domain.project_hull(&x).unwrap();
            for y in &sample {
                let before = eval_kernel(&spec, &x, y).unwrap();
                let after = eval_kernel(&spec, &proj, y).unwrap();
                assert!(after >= before - 1e-12);
            }
        }
    }
}

#[test]
fn smaller_target_set_never_lowers_the_min() {
    // an arc of the circle, exercised as a sampled subset
    let full: Vec<Vec<f64>> = Domain::unit_circle().sample(512, 0).unwrap();
    let arc = Domain::PointCloud {
        points: full[..128].to_vec(),
    };
    let circle = Domain::PointCloud { points: full };
    let spec = KernelSpec::riesz(1.5);
    let mut rng = ChaCha8Rng::seed_from_u64(64);
    for _ in 0..20 {
        let pts: Vec<Vec<f64>> = (0..5).map(|_| random_point(&mut rng, 2, 0.9)).collect();
        let config = Configuration::new(pts).unwrap();
        let on_arc = polarization_value(&spec, &arc, &config, 1).unwrap().value;
        let on_circle = polarization_value(&spec, &circle, &config, 1).unwrap().value;
        assert!(on_arc >= on_circle - 1e-12);
    }
}

fn quick_opts(seed: u64) -> SolveOptions {
    SolveOptions {
        restarts: 3,
        iterations: 200,
        resolution: 1024,
        seed,
        ..SolveOptions::default()
    }
}

#[test]
fn two_plate_on_superset_dominates_constrained() {
    // points allowed anywhere in the disk do at least as well as points
    // constrained to the circle
    let circle = Domain::unit_circle();
    let disk = Domain::Ball {
        p: 2,
        radius: 1.0,
        center: vec![0.0, 0.0],
    };
    let spec = KernelSpec::riesz(2.0);
    let n = 4;
    let (_, constrained) = maximize_polarization(
        &spec,
        &circle,
        n,
        &quick_opts(5).with_mode(SolveMode::ConstrainedToA),
    )
    .unwrap();
    let (_, two_plate) = maximize_polarization(
        &spec,
        &circle,
        n,
        &quick_opts(5).with_mode(SolveMode::ConstrainedToB(disk)),
    )
    .unwrap();
    assert!(
        two_plate.value >= constrained.value - 1e-6,
        "{} vs {}",
        two_plate.value,
        constrained.value
    );
}

#[test]
fn returned_value_dominates_every_closed_form_start() {
    let spec = KernelSpec::riesz(2.0);
    let domain = Domain::unit_circle();
    let n = 8;
    let (_, report) = maximize_polarization(&spec, &domain, n, &quick_opts(13)).unwrap();
    // candidates the solver is seeded with
    let origin = Configuration::new(vec![vec![0.0, 0.0]; n]).unwrap();
    let r_bar = circle_optimal_radius(n, 2.0).unwrap();
    let ngon = Configuration::new(
        (0..n)
            .map(|j| {
                let t = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
                vec![r_bar * t.cos(), r_bar * t.sin()]
            })
            .collect(),
    )
    .unwrap();
    for candidate in [origin, ngon] {
        let v = polarization_value(&spec, &domain, &candidate, 1024)
            .unwrap()
            .value;
        assert!(report.value >= v - 1e-9, "{} vs candidate {v}", report.value);
    }
}

#[test]
fn riesz_bridge_converges_to_covering_radius() {
    // (P_s*)^{-1/s} sits below eta* by the multiplicity factor (the optimal
    // covering value is ~ k * eta*^{-s} for the k nearest centers) and the
    // gap shrinks monotonically as s grows
    let n = 4;
    let eta_star = circle_unconstrained_cover(n).unwrap().eta;
    let mut previous_gap = f64::INFINITY;
    for s in [16.0, 32.0, 64.0] {
        let (_, report) = maximize_polarization(
            &KernelSpec::riesz(s),
            &Domain::unit_circle(),
            n,
            &SolveOptions {
                restarts: 2,
                iterations: 240,
                resolution: 2048,
                seed: 77,
                ..SolveOptions::default()
            },
        )
        .unwrap();
        let bridge = report.value.powf(-1.0 / s);
        assert!(bridge <= eta_star + 1e-2, "s={s}: {bridge} above {eta_star}");
        let gap = (eta_star - bridge).abs();
        assert!(
            gap <= previous_gap + 1e-2,
            "s={s}: gap {gap} grew past {previous_gap}"
        );
        previous_gap = gap;
    }
    assert!(previous_gap <= 1e-2, "gap at s=64 is {previous_gap}");
}

#[test]
fn optimal_configurations_spread_toward_uniform_mass() {
    // normalized counting measures of the optimizers approach the uniform
    // distribution: window mass within 0.1 of the window fraction
    let spec = KernelSpec::riesz(0.5);
    let domain = Domain::unit_circle();
    for (n, tol) in [(16usize, 0.2), (64, 0.12), (128, 0.1)] {
        let (config, _) = maximize_polarization(
            &spec,
            &domain,
            n,
            &SolveOptions {
                restarts: 1,
                iterations: 200,
                resolution: (32 * n).max(1024),
                seed: 3,
                ..SolveOptions::default()
            },
        )
        .unwrap();
        let mu = counting_measure(&config);
        // eight half-overlapping windows of width pi/2
        for w in 0..8 {
            let lo = w as f64 * std::f64::consts::FRAC_PI_4;
            let hi = lo + std::f64::consts::FRAC_PI_2;
            let mass: f64 = mu
                .support
                .iter()
                .zip(&mu.weights)
                .filter(|(q, _)| {
                    let mut a = q[1].atan2(q[0]).rem_euclid(2.0 * std::f64::consts::PI);
                    if a < lo {
                        a += 2.0 * std::f64::consts::PI;
                    }
                    a >= lo && a < hi
                })
                .map(|(_, w)| w)
                .sum();
            assert!(
                (mass - 0.25).abs() <= tol,
                "n={n} window {w}: mass {mass}"
            );
        }
    }
}

#[test]
fn polarization_report_mode_tracks_solve_mode() {
    let spec = KernelSpec::riesz(1.0);
    let domain = Domain::unit_circle();
    let (_, unconstrained) =
        maximize_polarization(&spec, &domain, 2, &quick_opts(1)).unwrap();
    let (_, constrained) = maximize_polarization(
        &spec,
        &domain,
        2,
        &quick_opts(1).with_mode(SolveMode::ConstrainedToA),
    )
    .unwrap();
    assert_ne!(
        format!("{:?}", unconstrained.mode),
        format!("{:?}", constrained.mode)
    );
}

#[test]
fn singular_stack_on_target_reports_infinity() {
    // a charge sitting exactly on a sampled target point saturates
    let domain = Domain::PointCloud {
        points: vec![vec![0.0, 0.0], vec![1.0, 0.0]],
    };
    let config = Configuration::new(vec![vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
    let report = polarization_value(&KernelSpec::riesz(2.0), &domain, &config, 1).unwrap();
    assert!(report.value.is_infinite());
    let finite = total_potential(
        &KernelSpec::riesz(2.0),
        &config,
        &[0.5, 0.0],
    )
    .unwrap();
    assert!(finite.is_finite());
}
