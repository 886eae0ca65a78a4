//! Best covering: closed forms on the circle, the constrained/unconstrained
//! transfer on spheres, and a numeric minimax descent for everything else.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::geom::{self, Point};
use crate::polarization::{covering_radius, Configuration};
use crate::solver::{simplex_configuration, SolveMode, SolveOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverMode {
    Constrained,
    Unconstrained,
}

/// A covering configuration together with its covering radius.
#[derive(Clone, Debug, Serialize)]
pub struct CoverReport {
    pub eta: f64,
    pub config: Configuration,
    pub mode: CoverMode,
}

/// Optimal unconstrained `n`-point covering of the unit circle: all points
/// at the origin for `n <= 2` (radius 1), otherwise the side midpoints of
/// the inscribed regular `n`-gon (radius `sin(pi/n)`).
pub fn circle_unconstrained_cover(n: usize) -> Result<CoverReport> {
    if n < 1 {
        return Err(Error::invalid("covering needs n >= 1"));
    }
    let (points, eta) = if n <= 2 {
        (vec![vec![0.0, 0.0]; n], 1.0)
    } else {
        let rho = (std::f64::consts::PI / n as f64).cos();
        let pts = (0..n)
            .map(|j| {
                let t = (2.0 * j as f64 + 1.0) * std::f64::consts::PI / n as f64;
                vec![rho * t.cos(), rho * t.sin()]
            })
            .collect();
        (pts, (std::f64::consts::PI / n as f64).sin())
    };
    Ok(CoverReport {
        eta,
        config: Configuration::new(points)?,
        mode: CoverMode::Unconstrained,
    })
}

/// Transfer a constrained covering of the unit sphere to the unconstrained
/// one: given the constrained radius `eta` and the on-sphere configuration,
/// solve `eta^2 = (1 - sqrt(1 - rho^2))^2 + rho^2` for `rho` by bisection,
/// scale the configuration by `r = sqrt(1 - rho^2)` and return
/// `(r, eta_star = rho, scaled)`.
pub fn sphere_transfer(
    eta: f64,
    config: &Configuration,
) -> Result<(f64, f64, Configuration)> {
    if !(eta > 0.0 && eta < std::f64::consts::SQRT_2) {
        return Err(Error::invalid("transfer needs eta in (0, sqrt(2))"));
    }
    let target = eta * eta;
    let h = |rho: f64| {
        let w = (1.0 - rho * rho).max(0.0).sqrt();
        (1.0 - w) * (1.0 - w) + rho * rho
    };
    let mut lo = 0.0;
    let mut hi = eta.min(1.0);
    // h is increasing on (0, 1)
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    let rho = 0.5 * (lo + hi);
    let r = (1.0 - rho * rho).max(0.0).sqrt();
    let scaled = Configuration::new(
        config
            .points()
            .iter()
            .map(|q| geom::scale(q, r))
            .collect(),
    )?;
    Ok((r, rho, scaled))
}

/// Minimize the covering radius of `n` points over `A` by annealed softmax
/// descent of the max-min distance, with closed-form warm starts and a final
/// pattern-search polish on the hard objective.
pub fn minimize_covering(
    domain: &Domain,
    n: usize,
    opts: &SolveOptions,
    mode: CoverMode,
) -> Result<CoverReport> {
    if n < 1 {
        return Err(Error::invalid("covering needs n >= 1"));
    }
    let sample = domain.sample(opts.resolution, opts.seed)?;
    let warm = cover_warm_starts(domain, n, mode);
    let total = warm.len() + opts.restarts;
    let solve_mode = match mode {
        CoverMode::Constrained => SolveMode::ConstrainedToA,
        CoverMode::Unconstrained => SolveMode::Unconstrained,
    };

    let outcomes: Vec<Option<(f64, Vec<Point>)>> = (0..total)
        .into_par_iter()
        .map(|ri| {
            let init = if ri < warm.len() {
                warm[ri].clone()
            } else {
                let mut rng =
                    ChaCha8Rng::seed_from_u64(opts.seed.wrapping_mul(0x2545_f491_4f6c_dd1d) ^ ri as u64);
                (0..n)
                    .map(|_| match mode {
                        CoverMode::Constrained => domain.random_on_set(&mut rng),
                        CoverMode::Unconstrained => domain.random_in_hull(&mut rng),
                    })
                    .collect()
            };
            descend_covering(domain, &sample, init, opts, &solve_mode)
        })
        .collect();

    let mut best: Option<(f64, Vec<Point>)> = None;
    for out in outcomes.into_iter().flatten() {
        let replace = match &best {
            None => true,
            Some((eta, _)) => out.0 < *eta,
        };
        if replace {
            best = Some(out);
        }
    }
    let (_, points) = best.ok_or_else(|| Error::SolverFailure("no covering produced".into()))?;
    let config = Configuration::new(points)?;
    let eta = covering_radius(&config, domain, opts.resolution)?;
    Ok(CoverReport { eta, config, mode })
}

fn cover_warm_starts(domain: &Domain, n: usize, mode: CoverMode) -> Vec<Vec<Point>> {
    let mut starts = Vec::new();
    match domain {
        Domain::Sphere { p, radius, center } => {
            if mode == CoverMode::Unconstrained {
                if n <= *p {
                    starts.push(vec![center.clone(); n]);
                }
                if *p == 2 {
                    if let Ok(rep) = circle_unconstrained_cover(n) {
                        starts.push(
                            rep.config
                                .points()
                                .iter()
                                .map(|q| geom::add(&geom::scale(q, *radius), center))
                                .collect(),
                        );
                    }
                }
            }
            if *p == 2 {
                // inscribed n-gon covers the circle with radius 2 sin(pi/2n)
                starts.push(
                    (0..n)
                        .map(|j| {
                            let t = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
                            vec![center[0] + radius * t.cos(), center[1] + radius * t.sin()]
                        })
                        .collect(),
                );
            } else if let Ok(pts) = domain.sample(n, 0) {
                let on_sphere = pts[..n].to_vec();
                if mode == CoverMode::Unconstrained {
                    if let Ok(config) = Configuration::new(on_sphere.clone()) {
                        if let Ok(eta) = covering_radius(&config, domain, 1024) {
                            if let Ok((_, _, scaled)) = sphere_transfer(eta / radius, &config) {
                                starts.push(
                                    scaled
                                        .points()
                                        .iter()
                                        .map(|q| q.clone())
                                        .collect(),
                                );
                            }
                        }
                    }
                }
                starts.push(on_sphere);
            }
            if n == p + 1 {
                if let Ok(simplex) = simplex_configuration(*p, 0.5 * radius, center) {
                    starts.push(simplex.into_points());
                }
            }
        }
        Domain::Interval { a, b } => {
            // equal partition midpoints
            starts.push(
                (0..n)
                    .map(|j| vec![a + (b - a) * (2.0 * j as f64 + 1.0) / (2.0 * n as f64)])
                    .collect(),
            );
        }
        _ => {
            if let Ok(pts) = domain.sample(n, 0) {
                if pts.len() >= n {
                    starts.push(pts[..n].to_vec());
                }
            }
        }
    }
    starts
}

/// Smoothed max-min-distance descent followed by a hard polish.
fn descend_covering(
    domain: &Domain,
    sample: &[Point],
    init: Vec<Point>,
    opts: &SolveOptions,
    mode: &SolveMode,
) -> Option<(f64, Vec<Point>)> {
    let mut points = init;
    project_cover(&mut points, domain, mode).ok()?;
    let dim = points[0].len();
    // the max-min distance is a tent function, so the raw sample max
    // understates it by O(mesh); rank candidates by the polished radius
    let hard = |pts: &[Point]| -> f64 {
        Configuration::new(pts.to_vec())
            .ok()
            .and_then(|c| covering_radius(&c, domain, sample.len()).ok())
            .unwrap_or(f64::INFINITY)
    };
    let mut best_pts = points.clone();
    let mut best_eta = hard(&points);

    let stages = opts.beta_stages;
    let ratio = (opts.beta_max / opts.beta0).powf(1.0 / (stages.max(2) - 1) as f64);
    let iters = (opts.iterations / stages).max(1);
    let mut step = opts.step * domain.scale();
    for stage in 0..stages {
        let beta = opts.beta0 * ratio.powi(stage as i32);
        for _ in 0..iters {
            let (obj, grad) = smooth_cover_objective(&points, sample, beta, dim);
            let gnorm2: f64 = grad.iter().map(|g| g * g).sum();
            if gnorm2 < 1e-30 {
                break;
            }
            let mut alpha = step;
            let mut accepted = false;
            for _ in 0..25 {
                let mut trial: Vec<Point> = points
                    .iter()
                    .enumerate()
                    .map(|(i, x)| {
                        let mut q = x.clone();
                        for (c, qc) in q.iter_mut().enumerate() {
                            *qc -= alpha * grad[i * dim + c];
                        }
                        q
                    })
                    .collect();
                if project_cover(&mut trial, domain, mode).is_err() {
                    return None;
                }
                let trial_obj = smooth_cover_objective(&trial, sample, beta, dim).0;
                if trial_obj < obj - 1e-4 * alpha * gnorm2 {
                    points = trial;
                    step = alpha * 1.2;
                    accepted = true;
                    break;
                }
                alpha *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        let eta = hard(&points);
        if eta < best_eta {
            best_eta = eta;
            best_pts = points.clone();
        }
    }
    // pattern-search polish of the hard objective
    let mut h = domain.mesh_scale(sample.len()).max(1e-4 * domain.scale());
    for _ in 0..40 {
        let mut improved = false;
        for i in 0..best_pts.len() {
            for c in 0..dim {
                for sgn in [1.0, -1.0] {
                    let mut trial = best_pts.clone();
                    trial[i][c] += sgn * h;
                    if project_cover(&mut trial, domain, mode).is_err() {
                        continue;
                    }
                    let eta = hard(&trial);
                    if eta < best_eta - 1e-15 {
                        best_eta = eta;
                        best_pts = trial;
                        improved = true;
                    }
                }
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    Some((best_eta, best_pts))
}

fn project_cover(points: &mut Vec<Point>, domain: &Domain, mode: &SolveMode) -> Result<()> {
    for q in points.iter_mut() {
        *q = match mode {
            SolveMode::ConstrainedToA => domain.project_onto_set(q)?,
            _ => domain.project_hull(q)?,
        };
    }
    Ok(())
}

/// log-sum-exp max over sample points of the softmin distance to the
/// configuration; returns the objective and its gradient.
fn smooth_cover_objective(
    points: &[Point],
    sample: &[Point],
    beta: f64,
    dim: usize,
) -> (f64, Vec<f64>) {
    let n = points.len();
    let m = sample.len();
    let mut dmin = vec![0.0; m];
    let mut inner_w = vec![0.0; m * n];
    for (j, y) in sample.iter().enumerate() {
        let dists: Vec<f64> = points.iter().map(|x| geom::dist(x, y)).collect();
        let dlo = dists.iter().cloned().fold(f64::INFINITY, f64::min);
        let mut z = 0.0;
        for (i, d) in dists.iter().enumerate() {
            let w = (-beta * (d - dlo)).exp();
            inner_w[j * n + i] = w;
            z += w;
        }
        for i in 0..n {
            inner_w[j * n + i] /= z;
        }
        dmin[j] = dlo - z.ln() / beta + (n as f64).ln() / beta;
    }
    let dhi = dmin.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut zsum = 0.0;
    let outer_w: Vec<f64> = dmin.iter().map(|d| {
        let w = (beta * (d - dhi)).exp();
        zsum += w;
        w
    }).collect();
    let obj = dhi + (zsum / m as f64).ln() / beta;
    let mut grad = vec![0.0; n * dim];
    for (j, y) in sample.iter().enumerate() {
        let wj = outer_w[j] / zsum;
        if wj < 1e-300 {
            continue;
        }
        for (i, x) in points.iter().enumerate() {
            let d = geom::dist(x, y);
            if d < 1e-12 {
                continue;
            }
            let w = wj * inner_w[j * n + i] / d;
            for c in 0..dim {
                grad[i * dim + c] += w * (x[c] - y[c]);
            }
        }
    }
    (obj, grad)
}
