//! Maximization of the min-potential over `N`-point configurations.
//!
//! The non-smooth objective `min_y sum_i K(x_i, y)` is ascended through a
//! softmin surrogate `-(1/beta) log sum_j exp(-beta F_j)` over the sampled
//! target points, with `beta` annealed geometrically. Every iterate is
//! projected back to the feasible region (the convex hull of `A` in the
//! unconstrained mode, `A` or `B` in the constrained modes). Restarts run in
//! parallel; the returned configuration is the best hard-min value seen
//! anywhere, with ties broken by restart index so the result is identical
//! under any thread count. Restart 0..w are warm starts (closed-form
//! candidates for circles and spheres), the rest are seeded random draws
//! from the hull.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::geom::{self, Point};
use crate::kernel::{self, KernelSpec};
use crate::polarization::{polarization_value, Configuration, EvalMode, PolarizationReport};

/// Where the configuration points are allowed to live.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMode {
    /// Points range over `conv(A)`; optimal configurations never leave it.
    Unconstrained,
    /// Points constrained to the target set itself.
    ConstrainedToA,
    /// Two-plate problem: points constrained to a second set `B`.
    ConstrainedToB(Domain),
}

/// Knobs for the multistart ascent.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveOptions {
    /// Random restarts in addition to the warm starts.
    pub restarts: usize,
    /// Total ascent iterations per restart, split across the beta stages.
    pub iterations: usize,
    /// Softmin inverse temperature schedule (geometric).
    pub beta0: f64,
    pub beta_max: f64,
    pub beta_stages: usize,
    /// Initial step as a fraction of the domain scale.
    pub step: f64,
    /// Relative objective-change tolerance for early stage exit.
    pub tolerance: f64,
    pub seed: u64,
    pub mode: SolveMode,
    /// Sample size for the inner minimization.
    pub resolution: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            restarts: 8,
            iterations: 400,
            beta0: 10.0,
            beta_max: 1e5,
            beta_stages: 20,
            step: 0.1,
            tolerance: 1e-10,
            seed: 0,
            mode: SolveMode::Unconstrained,
            resolution: 1024,
        }
    }
}

impl SolveOptions {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_mode(mut self, mode: SolveMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_resolution(mut self, resolution: usize) -> Self {
        self.resolution = resolution;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.restarts < 1 {
            return Err(Error::invalid("need at least one restart"));
        }
        if !(self.beta0 > 0.0 && self.beta0 < self.beta_max) {
            return Err(Error::invalid("beta schedule needs 0 < beta0 < beta_max"));
        }
        if self.beta_stages < 1 || self.iterations < self.beta_stages {
            return Err(Error::invalid("iterations must cover every beta stage"));
        }
        Ok(())
    }
}

struct RestartOutcome {
    value: f64,
    config: Configuration,
}

/// Best configuration for `max_omega min_y sum_i K(x_i, y)` over all
/// restarts, judged by the hard (polished) min value.
pub fn maximize_polarization(
    spec: &KernelSpec,
    domain: &Domain,
    n: usize,
    opts: &SolveOptions,
) -> Result<(Configuration, PolarizationReport)> {
    opts.validate()?;
    if n < 1 {
        return Err(Error::invalid("need at least one configuration point"));
    }
    let sample = domain.sample(opts.resolution, opts.seed)?;
    let warm = warm_starts(spec, domain, n, &opts.mode);
    let total = warm.len() + opts.restarts;

    let outcomes: Vec<Option<RestartOutcome>> = (0..total)
        .into_par_iter()
        .map(|ri| {
            let init = if ri < warm.len() {
                warm[ri].clone()
            } else {
                random_start(domain, n, &opts.mode, opts.seed, ri as u64)
            };
            run_restart(spec, domain, &sample, init, opts)
        })
        .collect();

    let mut best: Option<(usize, RestartOutcome)> = None;
    for (ri, out) in outcomes.into_iter().enumerate() {
        if let Some(out) = out {
            let replace = match &best {
                None => true,
                Some((_, cur)) => out.value > cur.value,
            };
            if replace {
                best = Some((ri, out));
            }
        }
    }
    let (_, best) = best.ok_or_else(|| {
        Error::SolverFailure("objective was non-finite at every restart".into())
    })?;
    let mut best = best;
    if matches!(domain, Domain::Interval { .. }) {
        // 1-D boundary layers equalize through a long cascade of coordinate
        // moves; run it once on the winning restart
        let mut pts = best.config.clone().into_points();
        hard_pattern_polish(spec, domain, &sample, &opts.mode, &mut pts, 250);
        if let Ok(config) = Configuration::new(pts) {
            if let Ok(rep) = polarization_value(spec, domain, &config, opts.resolution) {
                if rep.value > best.value {
                    best = RestartOutcome {
                        value: rep.value,
                        config,
                    };
                }
            }
        }
    }
    let mut report = polarization_value(spec, domain, &best.config, opts.resolution)?;
    report.mode = match opts.mode {
        SolveMode::Unconstrained => EvalMode::Unconstrained,
        SolveMode::ConstrainedToA => EvalMode::Constrained,
        SolveMode::ConstrainedToB(_) => EvalMode::TwoPlate,
    };
    Ok((best.config, report))
}

fn project_points(
    points: &mut Vec<Point>,
    domain: &Domain,
    mode: &SolveMode,
) -> Result<()> {
    for q in points.iter_mut() {
        *q = match mode {
            SolveMode::Unconstrained => domain.project_hull(q)?,
            SolveMode::ConstrainedToA => domain.project_onto_set(q)?,
            SolveMode::ConstrainedToB(b) => b.project_onto_set(q)?,
        };
    }
    Ok(())
}

/// Softmin of the sampled potentials and its gradient with respect to the
/// flattened configuration. Sample points at saturated `+inf` potential get
/// weight zero, so singular values are never averaged.
fn softmin_objective(
    spec: &KernelSpec,
    points: &[Point],
    sample: &[Point],
    beta: f64,
    grad: Option<&mut [f64]>,
) -> f64 {
    let dim = points[0].len();
    let values: Vec<f64> = sample
        .iter()
        .map(|y| {
            let mut t = 0.0;
            for x in points {
                let v = kernel::eval_kernel(spec, x, y).unwrap_or(f64::INFINITY);
                t += v;
                if t == f64::INFINITY {
                    break;
                }
            }
            t
        })
        .collect();
    let fmin = values.iter().cloned().fold(f64::INFINITY, f64::min);
    if !fmin.is_finite() {
        return fmin;
    }
    let mut zsum = 0.0;
    let weights: Vec<f64> = values
        .iter()
        .map(|&f| {
            if f.is_finite() {
                let w = (-beta * (f - fmin)).exp();
                zsum += w;
                w
            } else {
                0.0
            }
        })
        .collect();
    if let Some(grad) = grad {
        grad.fill(0.0);
        for (j, y) in sample.iter().enumerate() {
            let w = weights[j] / zsum;
            if w < 1e-300 {
                continue;
            }
            for (i, x) in points.iter().enumerate() {
                if let Ok(g) = kernel::eval_gradient(spec, x, y) {
                    for (c, gc) in g.iter().enumerate() {
                        grad[i * dim + c] += w * gc;
                    }
                }
            }
        }
    }
    fmin - zsum.ln() / beta
}

fn run_restart(
    spec: &KernelSpec,
    domain: &Domain,
    sample: &[Point],
    init: Vec<Point>,
    opts: &SolveOptions,
) -> Option<RestartOutcome> {
    let mut points = init;
    if project_points(&mut points, domain, &opts.mode).is_err() {
        return None;
    }
    let dim = points[0].len();
    let nvars = points.len() * dim;
    let mut grad = vec![0.0; nvars];

    let hard = |pts: &[Point]| -> Option<f64> {
        let config = Configuration::new(pts.to_vec()).ok()?;
        polarization_value(spec, domain, &config, sample.len())
            .ok()
            .map(|r| r.value)
    };

    let mut best_pts = points.clone();
    let mut best_val = hard(&points)?;
    if !best_val.is_finite() && best_val != f64::INFINITY {
        return None;
    }

    let stages = opts.beta_stages;
    let iters_per_stage = (opts.iterations / stages).max(1);
    let ratio = (opts.beta_max / opts.beta0).powf(1.0 / (stages.max(2) - 1) as f64);
    let mut step = opts.step * domain.scale().max(1e-12);

    for stage in 0..stages {
        let beta = opts.beta0 * ratio.powi(stage as i32);
        let mut obj = softmin_objective(spec, &points, sample, beta, Some(&mut grad));
        if !obj.is_finite() {
            break;
        }
        let mut stalls = 0usize;
        for _ in 0..iters_per_stage {
            let gnorm2: f64 = grad.iter().map(|g| g * g).sum();
            if gnorm2 < 1e-30 {
                break;
            }
            // backtracking line search on the projected trial point
            let mut alpha = step;
            let mut accepted = false;
            for _ in 0..30 {
                let mut trial: Vec<Point> = points
                    .iter()
                    .enumerate()
                    .map(|(i, x)| {
                        let mut q = x.clone();
                        for (c, qc) in q.iter_mut().enumerate() {
                            *qc += alpha * grad[i * dim + c];
                        }
                        q
                    })
                    .collect();
                if project_points(&mut trial, domain, &opts.mode).is_err() {
                    return None;
                }
                let trial_obj = softmin_objective(spec, &trial, sample, beta, None);
                if trial_obj > obj + 1e-4 * alpha * gnorm2 && trial_obj.is_finite() {
                    points = trial;
                    obj = softmin_objective(spec, &points, sample, beta, Some(&mut grad));
                    step = (alpha * 1.3).min(opts.step * domain.scale() * 10.0);
                    accepted = true;
                    break;
                }
                alpha *= 0.5;
            }
            if !accepted {
                stalls += 1;
                if stalls >= 2 {
                    break;
                }
            }
        }
        if let Some(v) = hard(&points) {
            if v > best_val {
                best_val = v;
                best_pts = points.clone();
            }
        }
        if step < opts.tolerance * domain.scale() {
            break;
        }
    }
    // For small problems, finish with a pattern search on the hard sampled
    // objective; the smooth ascent can leave heterogeneous 1-D layouts
    // (boundary layers on intervals) short of the max-min optimum.
    if nvars <= 160 {
        hard_pattern_polish(spec, domain, sample, &opts.mode, &mut best_pts, 30);
        if let Some(v) = hard(&best_pts) {
            best_val = best_val.max(v);
        }
    }
    Configuration::new(best_pts).ok().map(|config| RestartOutcome {
        value: best_val,
        config,
    })
}

/// Coordinate pattern search on the raw sampled min-potential.
fn hard_pattern_polish(
    spec: &KernelSpec,
    domain: &Domain,
    sample: &[Point],
    mode: &SolveMode,
    points: &mut Vec<Point>,
    rounds: usize,
) {
    let eval = |pts: &[Point]| -> f64 {
        sample
            .iter()
            .map(|y| {
                let mut t = 0.0;
                for x in pts {
                    t += kernel::eval_kernel(spec, x, y).unwrap_or(f64::INFINITY);
                    if t == f64::INFINITY {
                        break;
                    }
                }
                t
            })
            .fold(f64::INFINITY, f64::min)
    };
    let dim = points[0].len();
    let mut best = eval(points);
    if !best.is_finite() {
        return;
    }
    let mut h = domain.scale() / points.len() as f64;
    for _ in 0..rounds {
        let mut improved = false;
        for i in 0..points.len() {
            for c in 0..dim {
                for sgn in [1.0, -1.0] {
                    let mut trial = points.clone();
                    trial[i][c] += sgn * h;
                    if project_points(&mut trial, domain, mode).is_err() {
                        continue;
                    }
                    let v = eval(&trial);
                    if v > best {
                        best = v;
                        *points = trial;
                        improved = true;
                    }
                }
            }
        }
        if !improved {
            h *= 0.5;
            if h < 1e-12 * domain.scale() {
                break;
            }
        }
    }
}

fn random_start(domain: &Domain, n: usize, mode: &SolveMode, seed: u64, restart: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ restart);
    (0..n)
        .map(|_| match mode {
            SolveMode::Unconstrained => domain.random_in_hull(&mut rng),
            SolveMode::ConstrainedToA => domain.random_on_set(&mut rng),
            SolveMode::ConstrainedToB(b) => b.random_on_set(&mut rng),
        })
        .collect()
}

/// Closed-form candidates seeded as restart 0..w so known optima are never
/// missed by the stochastic initialization.
fn warm_starts(
    spec: &KernelSpec,
    domain: &Domain,
    n: usize,
    mode: &SolveMode,
) -> Vec<Vec<Point>> {
    let mut starts: Vec<Vec<Point>> = Vec::new();
    match mode {
        SolveMode::Unconstrained => {
            if let Domain::Sphere { p, radius, center } = domain {
                // stacked center: optimal for N <= p and for s <= p-2
                starts.push(vec![center.clone(); n]);
                if *p == 2 && n >= 3 {
                    let mut radii = vec![std::f64::consts::FRAC_PI_2.cos()];
                    if let KernelSpec::Riesz { s } = spec {
                        if *s > 0.0 {
                            if let Ok(rb) = circle_optimal_radius(n, *s) {
                                radii.push(rb);
                            }
                        }
                    }
                    radii.push((std::f64::consts::PI / n as f64).cos());
                    for r in radii {
                        starts.push(ngon(n, r * radius, center, 0.0));
                    }
                }
                if n == p + 1 {
                    for rho in [0.25, 0.5, 0.75] {
                        if let Ok(simplex) = simplex_configuration(*p, rho * radius, center) {
                            starts.push(simplex.into_points());
                        }
                    }
                }
            } else {
                // centroid stack is a harmless generic candidate
                if let Ok(sample) = domain.sample(64.min(16 * n), 0) {
                    starts.push(vec![geom::mean(&sample); n]);
                }
                if let Domain::Interval { a, b } = domain {
                    // cell midpoints, and a variant with the edge charges
                    // pulled closer to the endpoints (the endpoint potential
                    // equalizes near offset 0.34 of a cell)
                    starts.push(
                        (0..n)
                            .map(|j| vec![a + (b - a) * (2.0 * j as f64 + 1.0) / (2.0 * n as f64)])
                            .collect(),
                    );
                    let c = 0.34;
                    let h = 1.0 / (n as f64 - 1.0 + 2.0 * c);
                    starts.push(
                        (0..n)
                            .map(|j| vec![a + (b - a) * (c + j as f64) * h])
                            .collect(),
                    );
                }
            }
        }
        SolveMode::ConstrainedToA => starts.extend(on_set_starts(domain, n)),
        SolveMode::ConstrainedToB(b) => starts.extend(on_set_starts(b, n)),
    }
    starts
}

fn on_set_starts(domain: &Domain, n: usize) -> Vec<Vec<Point>> {
    let mut starts = Vec::new();
    match domain {
        Domain::Sphere { p, radius, center } if *p == 2 => {
            starts.push(ngon(n, *radius, center, 0.0));
        }
        _ => {
            if let Ok(sample) = domain.sample(n, 0) {
                if sample.len() >= n {
                    starts.push(sample[..n].to_vec());
                }
            }
        }
    }
    starts
}

fn ngon(n: usize, radius: f64, center: &[f64], phase: f64) -> Vec<Point> {
    (0..n)
        .map(|j| {
            let t = 2.0 * std::f64::consts::PI * j as f64 / n as f64 + phase;
            vec![center[0] + radius * t.cos(), center[1] + radius * t.sin()]
        })
        .collect()
}

/// Min potential over the unit circle of a regular `n`-gon of radius `r`,
/// for the Riesz kernel with exponent `s > 0`. The minimum sits at the arc
/// midpoints, so the value is the sum over vertices of the chordal kernel
/// at angles `(2j-1) pi / n`:
/// `sum_j (r^2 + 1 - 2 r cos((2j-1) pi / n))^{-s/2}`.
pub fn circle_radial_objective(n: usize, s: f64, r: f64) -> f64 {
    (1..=n)
        .map(|j| {
            let t = (2.0 * j as f64 - 1.0) * std::f64::consts::PI / n as f64;
            let chord2 = r * r + 1.0 - 2.0 * r * t.cos();
            chord2.powf(-s / 2.0)
        })
        .sum()
}

fn circle_radial_derivatives(n: usize, s: f64, r: f64) -> (f64, f64) {
    let mut d1 = 0.0;
    let mut d2 = 0.0;
    for j in 1..=n {
        let t = (2.0 * j as f64 - 1.0) * std::f64::consts::PI / n as f64;
        let c = t.cos();
        let chord2 = r * r + 1.0 - 2.0 * r * c;
        let base = chord2.powf(-s / 2.0 - 1.0);
        let dc = 2.0 * r - 2.0 * c;
        d1 += -(s / 2.0) * base * dc;
        d2 += (s / 2.0) * (s / 2.0 + 1.0) * chord2.powf(-s / 2.0 - 2.0) * dc * dc
            - (s / 2.0) * base * 2.0;
    }
    (d1, d2)
}

/// Radius in `[0, 1]` maximizing [`circle_radial_objective`]: a coarse scan
/// brackets the maximum, golden-section narrows it to 1e-12 and a few Newton
/// steps on the derivative polish the first-order residual.
pub fn circle_optimal_radius(n: usize, s: f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::invalid("radial optimum needs n >= 3"));
    }
    if s <= 0.0 {
        return Err(Error::invalid("radial optimum needs s > 0"));
    }
    let g = |r: f64| circle_radial_objective(n, s, r);
    let coarse = 2000usize;
    let mut arg = 0usize;
    let mut best = f64::NEG_INFINITY;
    for i in 0..=coarse {
        let r = i as f64 / coarse as f64;
        let v = g(r);
        if v > best {
            best = v;
            arg = i;
        }
    }
    let mut lo = (arg.saturating_sub(1)) as f64 / coarse as f64;
    let mut hi = ((arg + 1).min(coarse)) as f64 / coarse as f64;

    let phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let mut f1 = g(x1);
    let mut f2 = g(x2);
    while hi - lo > 1e-13 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = g(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = g(x1);
        }
    }
    let mut r = 0.5 * (lo + hi);
    // Newton polish on g'(r) = 0 when the maximum is interior
    if r > 1e-9 && r < 1.0 - 1e-9 {
        for _ in 0..40 {
            let (d1, d2) = circle_radial_derivatives(n, s, r);
            if d2 == 0.0 {
                break;
            }
            let next = (r - d1 / d2).clamp(0.0, 1.0);
            if (next - r).abs() < 1e-16 {
                r = next;
                break;
            }
            r = next;
        }
    }
    Ok(r)
}

/// Quadratic form whose sign controls convexity of the chordal profile
/// `t -> (1 + r^2 - 2 r cos t)^{-s/2}`: the profile is convex wherever
/// `2 (1 + r^2) x + r (-4 + 2 s (x^2 - 1)) <= 0` for `x = cos t`.
pub fn profile_curvature_form(r: f64, s: f64, x: f64) -> f64 {
    2.0 * (1.0 + r * r) * x + r * (-4.0 + 2.0 * s * (x * x - 1.0))
}

/// Threshold data deciding when a two-plate optimum on concentric circles is
/// the regular `n`-gon.
#[derive(Clone, Debug, Serialize)]
pub struct CircleThresholds {
    pub n: usize,
    pub s: f64,
    /// Radius maximizing the unconstrained `n`-gon objective.
    pub r_bar: f64,
    /// Largest ring radius for which the `n`-gon conclusion holds; the
    /// admissible band is `[1/radius_limit, radius_limit]`.
    pub radius_limit: f64,
}

impl CircleThresholds {
    /// Largest `cos t` up to which the chordal profile at ring radius `r`
    /// stays convex.
    pub fn x_of_r(&self, r: f64) -> f64 {
        x_threshold(r, self.s)
    }

    /// Convexity condition `cos(pi/n) <= x_{r,s}`.
    pub fn convexity_holds(&self, r: f64) -> bool {
        (std::f64::consts::PI / self.n as f64).cos() <= self.x_of_r(r)
    }

    /// Band condition `1/radius_limit <= r <= radius_limit`.
    pub fn band_contains(&self, r: f64) -> bool {
        r >= 1.0 / self.radius_limit && r <= self.radius_limit
    }
}

/// Positive root in `x` of the curvature form, written in a cancellation
/// free way (the naive quotient loses digits as `r -> 0`).
fn x_threshold(r: f64, s: f64) -> f64 {
    let a = 1.0 + r * r;
    let disc = (a * a + 4.0 * r * r * s * (2.0 + s)).sqrt();
    2.0 * r * (2.0 + s) / (disc + a)
}

fn radius_limit(n: usize, s: f64) -> f64 {
    let t = std::f64::consts::PI / n as f64;
    let (sn, cs) = (t.sin(), t.cos());
    0.5 / cs * (s * sn * sn + 2.0 + (sn * sn * ((s + 2.0) * (s + 2.0) - s * s * cs * cs)).sqrt())
}

/// Thresholds for the concentric-circles two-plate problem at `(n, s)`.
pub fn concentric_thresholds(n: usize, s: f64) -> Result<CircleThresholds> {
    if n < 2 {
        return Err(Error::invalid("thresholds need n >= 2"));
    }
    if s <= 0.0 {
        return Err(Error::invalid("thresholds need s > 0"));
    }
    let r_bar = if n >= 3 { circle_optimal_radius(n, s)? } else { 0.0 };
    Ok(CircleThresholds {
        n,
        s,
        r_bar,
        radius_limit: radius_limit(n, s),
    })
}

/// Vertices of a regular `p`-simplex: `p + 1` pairwise equidistant points at
/// the given distance from `center`, with centroid `center`.
pub fn simplex_configuration(p: usize, radius: f64, center: &[f64]) -> Result<Configuration> {
    if p < 1 {
        return Err(Error::invalid("simplex needs p >= 1"));
    }
    if center.len() != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            got: center.len(),
        });
    }
    // Start from the standard basis of R^{p+1} centered at its mean, then
    // rotate the hyperplane {sum = 0} onto R^p x {0} with the Householder
    // reflection that swaps e_{p+1} and the normalized all-ones vector.
    let m = p + 1;
    let ones = 1.0 / (m as f64).sqrt();
    let mut v = vec![0.0; m];
    for (i, vi) in v.iter_mut().enumerate() {
        *vi = if i == m - 1 { ones - 1.0 } else { ones };
    }
    let vnorm2: f64 = geom::dot(&v, &v);
    let mut pts = Vec::with_capacity(m);
    for i in 0..m {
        let mut e = vec![-1.0 / m as f64; m];
        e[i] += 1.0;
        // reflect: e - 2 v <v,e> / <v,v>
        let c = 2.0 * geom::dot(&v, &e) / vnorm2;
        geom::axpy(&mut e, -c, &v);
        // last coordinate is now ~0; drop it and rescale to the target radius
        e.truncate(p);
        let norm = geom::norm(&e);
        let mut q = geom::scale(&e, radius / norm);
        for (qc, cc) in q.iter_mut().zip(center) {
            *qc += cc;
        }
        pts.push(q);
    }
    Configuration::new(pts)
}

/// Minimum distance from any configuration point to the sphere surface.
pub fn stay_away_check(config: &Configuration, sphere: &Domain) -> Result<f64> {
    match sphere {
        Domain::Sphere { .. } => Ok(config
            .points()
            .iter()
            .map(|x| sphere.distance_to(x).unwrap_or(f64::INFINITY))
            .fold(f64::INFINITY, f64::min)),
        _ => Err(Error::invalid("stay-away check expects a sphere")),
    }
}

/// Quotient out the rotation: rotate so the first point has angle 0 and
/// return `(radius, angle)` pairs sorted by angle.
pub fn canonicalize_on_circle(config: &Configuration) -> Vec<(f64, f64)> {
    let base = config.points()[0][1].atan2(config.points()[0][0]);
    let mut out: Vec<(f64, f64)> = config
        .points()
        .iter()
        .map(|q| {
            let r = geom::norm(q);
            let a = (q[1].atan2(q[0]) - base).rem_euclid(2.0 * std::f64::consts::PI);
            (r, a)
        })
        .collect();
    out.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    out
}

/// Consecutive angular gaps of the canonicalized configuration (wrapping).
pub fn circle_gaps(config: &Configuration) -> Vec<f64> {
    let canon = canonicalize_on_circle(config);
    let n = canon.len();
    (0..n)
        .map(|i| {
            let next = canon[(i + 1) % n].1 + if i + 1 == n { 2.0 * std::f64::consts::PI } else { 0.0 };
            next - canon[i].1
        })
        .collect()
}
