//! Max-min objective evaluation for fixed configurations.
//!
//! The inner infimum over the target set is replaced by a minimum over a
//! deterministic sample followed by a local polish: 25 rounds of pattern
//! search along the set parametrization around the discrete witness. The
//! polish turns the O(mesh) discretization bias into something far below the
//! tolerances used by the tests.

use serde::Serialize;

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::geom::{self, Point};
use crate::kernel::{self, KernelSpec};

const POLISH_STEPS: usize = 25;

/// Ordered multiset of `N` points in `R^p` (repetitions allowed).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Configuration {
    points: Vec<Point>,
}

impl Configuration {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("configuration needs at least one point"));
        }
        let dim = points[0].len();
        if points.iter().any(|q| q.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: points.iter().map(Vec::len).find(|l| *l != dim).unwrap(),
            });
        }
        Ok(Configuration { points })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn push(&mut self, point: Point) -> Result<()> {
        if point.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: point.len(),
            });
        }
        self.points.push(point);
        Ok(())
    }

    pub fn into_points(self) -> Vec<Point> {
        self.points
    }
}

/// How the configuration was constrained when it was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalMode {
    Constrained,
    Unconstrained,
    TwoPlate,
}

/// Result of evaluating the min-potential of a configuration over a set.
#[derive(Clone, Debug, Serialize)]
pub struct PolarizationReport {
    /// `min_y sum_i K(x_i, y)` over the polished sample.
    pub value: f64,
    /// Argmin point after polish.
    pub witness: Point,
    pub resolution: usize,
    pub kernel: KernelSpec,
    pub mode: EvalMode,
}

/// `sum_i K(x_i, y)`, saturating at `+inf`.
pub fn total_potential(spec: &KernelSpec, config: &Configuration, y: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    for x in config.points() {
        let v = kernel::eval_kernel(spec, x, y)?;
        if v == f64::INFINITY {
            return Ok(f64::INFINITY);
        }
        total += v;
    }
    Ok(total)
}

/// Pattern search for an extremum of `f` over the set, starting from the
/// discrete argoptimum. Moves stay on the set via projection; the step
/// halves whenever no direction improves.
pub(crate) fn polish_on_set<F>(
    domain: &Domain,
    start: &[f64],
    mut f: F,
    h0: f64,
    maximize: bool,
) -> (Point, f64)
where
    F: FnMut(&[f64]) -> f64,
{
    let dirs = domain.polish_dirs(start);
    let mut best = start.to_vec();
    let mut best_val = f(start);
    if dirs.is_empty() || h0 <= 0.0 {
        return (best, best_val);
    }
    let better = |a: f64, b: f64| if maximize { a > b } else { a < b };
    let mut h = h0;
    for _ in 0..POLISH_STEPS {
        let dirs = domain.polish_dirs(&best);
        let mut improved = false;
        for d in &dirs {
            for sgn in [1.0, -1.0] {
                let mut cand = best.clone();
                geom::axpy(&mut cand, sgn * h, d);
                if let Ok(proj) = domain.project_onto_set(&cand) {
                    let v = f(&proj);
                    if better(v, best_val) {
                        best = proj;
                        best_val = v;
                        improved = true;
                    }
                }
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    (best, best_val)
}

/// Minimum of the configuration's potential over a sampled-and-polished
/// copy of `A`, together with the witness argmin.
pub fn polarization_value(
    spec: &KernelSpec,
    domain: &Domain,
    config: &Configuration,
    resolution: usize,
) -> Result<PolarizationReport> {
    let sample = domain.sample(resolution, 0)?;
    let mut best = f64::INFINITY;
    let mut arg = 0;
    for (j, y) in sample.iter().enumerate() {
        let v = total_potential(spec, config, y)?;
        if v < best {
            best = v;
            arg = j;
        }
    }
    let (witness, value) = if best.is_finite() {
        polish_on_set(
            domain,
            &sample[arg],
            |y| total_potential(spec, config, y).unwrap_or(f64::INFINITY),
            domain.mesh_scale(resolution),
            false,
        )
    } else {
        // every sample point sits on a singular charge; report as-is
        (sample[arg].clone(), best)
    };
    Ok(PolarizationReport {
        value,
        witness,
        resolution,
        kernel: spec.clone(),
        mode: EvalMode::Constrained,
    })
}

/// Largest distance from a (polished) point of `A` to its nearest
/// configuration point.
pub fn covering_radius(
    config: &Configuration,
    domain: &Domain,
    resolution: usize,
) -> Result<f64> {
    let sample = domain.sample(resolution, 0)?;
    let nearest = |y: &[f64]| {
        config
            .points()
            .iter()
            .map(|x| geom::dist(x, y))
            .fold(f64::INFINITY, f64::min)
    };
    // The max-min distance is a tent function with one peak per gap, and
    // nearby peaks can differ by less than the sampling error. Polish the
    // best handful of well-separated candidates and keep the largest.
    let mut order: Vec<usize> = (0..sample.len()).collect();
    let values: Vec<f64> = sample.iter().map(|y| nearest(y)).collect();
    order.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).unwrap().then(a.cmp(&b)));
    let mesh = domain.mesh_scale(resolution);
    let mut seeds: Vec<usize> = Vec::new();
    for &j in &order {
        if seeds.len() >= 8 {
            break;
        }
        if seeds
            .iter()
            .all(|&k| geom::dist(&sample[j], &sample[k]) > 2.0 * mesh)
        {
            seeds.push(j);
        }
    }
    let mut best = values[order[0]];
    for j in seeds {
        let (_, v) = polish_on_set(domain, &sample[j], nearest, mesh, true);
        best = best.max(v);
    }
    Ok(best)
}

/// Certificate produced by [`covering_lower_bound`].
#[derive(Clone, Debug, Serialize)]
pub struct CoverCertificate {
    /// Covering radius achieved by the greedy centers.
    pub radius: f64,
    /// `(2 radius)^{-s}`, a lower bound for the unconstrained polarization
    /// value at the same `N` (up to sampling error).
    pub bound: f64,
    /// The `N` centers; all of them lie on `A`.
    pub centers: Configuration,
}

/// Greedy farthest-point covering of the `A`-sample by `N` points of `A`,
/// yielding the lower-bound certificate `(2r)^{-s}` for Riesz `s > 0`.
///
/// The traversal is seeded at the sample point of lowest index; a
/// deterministic recentering pass then replaces each center by the 1-center
/// of its cluster, which is what makes small-`N` certificates (a single
/// midpoint on an interval) come out right.
pub fn covering_lower_bound(
    spec: &KernelSpec,
    domain: &Domain,
    n: usize,
    resolution: usize,
) -> Result<CoverCertificate> {
    let s = match *spec {
        KernelSpec::Riesz { s } if s > 0.0 => s,
        _ => {
            return Err(Error::invalid(
                "covering lower bound requires a Riesz kernel with s > 0",
            ))
        }
    };
    if n < 1 {
        return Err(Error::invalid("need at least one center"));
    }
    let sample = domain.sample(resolution, 0)?;
    let mut centers: Vec<usize> = vec![0];
    let mut dist_to_centers: Vec<f64> = sample.iter().map(|y| geom::dist(y, &sample[0])).collect();
    while centers.len() < n.min(sample.len()) {
        let (mut far, mut far_d) = (0, -1.0);
        for (j, d) in dist_to_centers.iter().enumerate() {
            if *d > far_d {
                far_d = *d;
                far = j;
            }
        }
        centers.push(far);
        for (j, d) in dist_to_centers.iter_mut().enumerate() {
            *d = d.min(geom::dist(&sample[j], &sample[far]));
        }
    }
    // recentering: swap each center for the 1-center of its cluster
    for _ in 0..2 {
        let assign: Vec<usize> = sample
            .iter()
            .map(|y| {
                let mut best = (f64::INFINITY, 0);
                for (c, &ci) in centers.iter().enumerate() {
                    let d = geom::dist(y, &sample[ci]);
                    if d < best.0 {
                        best = (d, c);
                    }
                }
                best.1
            })
            .collect();
        for c in 0..centers.len() {
            let members: Vec<usize> = (0..sample.len()).filter(|j| assign[*j] == c).collect();
            if members.is_empty() {
                continue;
            }
            let mut best = (f64::INFINITY, centers[c]);
            for &cand in &members {
                let radius = members
                    .iter()
                    .map(|&j| geom::dist(&sample[cand], &sample[j]))
                    .fold(0.0, f64::max);
                if radius < best.0 {
                    best = (radius, cand);
                }
            }
            centers[c] = best.1;
        }
    }
    let mut pts: Vec<Point> = centers.iter().map(|&i| sample[i].clone()).collect();
    while pts.len() < n {
        pts.push(sample[0].clone()); // duplicate centers are allowed
    }
    let config = Configuration::new(pts)?;
    let radius = covering_radius(&config, domain, resolution)?;
    Ok(CoverCertificate {
        radius,
        bound: (2.0 * radius).powf(-s),
        centers: config,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn origin_config(n: usize, dim: usize) -> Configuration {
        Configuration::new(vec![vec![0.0; dim]; n]).unwrap()
    }

    #[test]
    fn origin_triple_on_sphere_has_value_three() {
        // three charges at the center of S^2 see every sphere point at
        // distance one
        let report = polarization_value(
            &KernelSpec::riesz(2.0),
            &Domain::unit_sphere(3),
            &origin_config(3, 3),
            600,
        )
        .unwrap();
        assert!((report.value - 3.0).abs() < 1e-10);
    }

    #[test]
    fn inscribed_square_value_matches_angular_brute_force() {
        let square = Configuration::new(
            (0..4)
                .map(|j| {
                    let t = std::f64::consts::FRAC_PI_2 * j as f64;
                    vec![t.cos(), t.sin()]
                })
                .collect(),
        )
        .unwrap();
        let spec = KernelSpec::riesz(2.0);
        // independent oracle: dense angular scan
        let mut oracle = f64::INFINITY;
        for k in 0..100_000 {
            let t = 2.0 * std::f64::consts::PI * k as f64 / 100_000.0;
            let y = vec![t.cos(), t.sin()];
            oracle = oracle.min(total_potential(&spec, &square, &y).unwrap());
        }
        let report =
            polarization_value(&spec, &Domain::unit_circle(), &square, 4096).unwrap();
        assert!((report.value - oracle).abs() < 1e-8, "{}", report.value);
        assert!((report.value - 4.0).abs() < 1e-9);
        // witness sits at an arc midpoint
        let ang = report.witness[1].atan2(report.witness[0]);
        let rem = (ang / (std::f64::consts::FRAC_PI_2 / 1.0)).rem_euclid(1.0);
        assert!((rem - 0.5).abs() < 1e-3, "witness angle {ang}");
    }

    #[test]
    fn log_kernel_origin_stack_is_zero() {
        let report = polarization_value(
            &KernelSpec::riesz(0.0),
            &Domain::unit_circle(),
            &origin_config(5, 2),
            512,
        )
        .unwrap();
        assert!(report.value.abs() < 1e-12);
    }

    #[test]
    fn report_value_matches_witness_potential() {
        let config = Configuration::new(vec![vec![0.3, 0.1], vec![-0.2, 0.4]]).unwrap();
        let spec = KernelSpec::riesz(1.0);
        let report =
            polarization_value(&spec, &Domain::unit_circle(), &config, 1024).unwrap();
        let recomputed = total_potential(&spec, &config, &report.witness).unwrap();
        assert!((report.value - recomputed).abs() < 1e-10);
    }

    #[test]
    fn covering_radius_closed_forms() {
        let d2 = Domain::unit_sphere(2);
        assert!((covering_radius(&origin_config(1, 2), &d2, 512).unwrap() - 1.0).abs() < 1e-9);

        let mid: Vec<Point> = (0..4)
            .map(|j| {
                let t = (2.0 * j as f64 + 1.0) * std::f64::consts::FRAC_PI_4;
                let r = std::f64::consts::FRAC_PI_4.cos();
                vec![r * t.cos(), r * t.sin()]
            })
            .collect();
        let eta = covering_radius(&Configuration::new(mid).unwrap(), &d2, 4096).unwrap();
        assert!((eta - std::f64::consts::FRAC_PI_4.sin()).abs() < 1e-9);

        let square: Vec<Point> = (0..4)
            .map(|j| {
                let t = std::f64::consts::FRAC_PI_2 * j as f64;
                vec![t.cos(), t.sin()]
            })
            .collect();
        let eta = covering_radius(&Configuration::new(square).unwrap(), &d2, 4096).unwrap();
        assert!((eta - 2.0 * (std::f64::consts::PI / 8.0).sin()).abs() < 1e-9);
    }

    #[test]
    fn appending_a_point_is_monotone() {
        let spec = KernelSpec::riesz(1.5);
        let domain = Domain::unit_circle();
        let mut config = Configuration::new(vec![vec![0.2, 0.0]]).unwrap();
        let mut prev_value = polarization_value(&spec, &domain, &config, 512)
            .unwrap()
            .value;
        let mut prev_eta = covering_radius(&config, &domain, 512).unwrap();
        for q in [vec![-0.4, 0.3], vec![0.0, -0.6], vec![0.5, 0.5]] {
            config.push(q).unwrap();
            let value = polarization_value(&spec, &domain, &config, 512).unwrap().value;
            let eta = covering_radius(&config, &domain, 512).unwrap();
            assert!(value >= prev_value - 1e-12);
            assert!(eta <= prev_eta + 1e-12);
            prev_value = value;
            prev_eta = eta;
        }
    }

    #[test]
    fn interval_single_center_certificate() {
        let cert = covering_lower_bound(
            &KernelSpec::riesz(1.0),
            &Domain::Interval { a: 0.0, b: 1.0 },
            1,
            513,
        )
        .unwrap();
        assert!((cert.radius - 0.5).abs() < 2e-3, "radius {}", cert.radius);
        assert!((cert.bound - 1.0).abs() < 5e-3, "bound {}", cert.bound);
        assert!((cert.centers.points()[0][0] - 0.5).abs() < 2e-3);
    }

    #[test]
    fn circle_greedy_cover_is_near_optimal() {
        // 8 centers constrained to the circle cannot beat the equally
        // spaced covering radius 2 sin(pi/16)
        let opt = 2.0 * (std::f64::consts::PI / 16.0).sin();
        let cert = covering_lower_bound(
            &KernelSpec::riesz(2.0),
            &Domain::unit_circle(),
            8,
            2048,
        )
        .unwrap();
        assert!(cert.radius >= opt - 1e-6);
        assert!(cert.radius <= 2.0 * opt, "greedy radius {}", cert.radius);
        assert!(cert.bound <= (2.0 * opt).powf(-2.0) + 1e-9);
        for c in cert.centers.points() {
            assert!((geom::norm(c) - 1.0).abs() < 1e-12); // touched to A
        }
    }

    #[test]
    fn sphere_certificate_centers_stay_on_sphere() {
        let cert = covering_lower_bound(
            &KernelSpec::riesz(4.0),
            &Domain::unit_sphere(3),
            3,
            800,
        )
        .unwrap();
        assert!(cert.bound > 0.0);
        for c in cert.centers.points() {
            assert!((geom::norm(c) - 1.0).abs() < 1e-12);
        }
        // the all-at-origin radius 1 is never produced
        assert!(cert.radius < 2.0 && cert.radius > 0.5);
    }
}
