//! Compact target sets: geometry, deterministic sampling for the inner
//! minimization, distances and convex-hull projection.
//!
//! Samplers are deterministic functions of `(shape, resolution)`: uniform
//! angles on circles, a generalized spiral on the 2-sphere, product-of-angles
//! grids on higher spheres (ambient dimension up to 5), endpoint-inclusive
//! grids on cubes and intervals, sunflower-style spirals inside balls. Point
//! clouds sample as themselves.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{self, Point};

/// A compact subset of `R^p`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Domain {
    /// Sphere `S^{p-1}` of the given radius; `p = 2` is a circle.
    Sphere { p: usize, radius: f64, center: Point },
    /// Solid ball.
    Ball { p: usize, radius: f64, center: Point },
    /// Axis-aligned solid cube with the given corner and side length.
    Cube { p: usize, side: f64, corner: Point },
    /// Closed interval `[a, b]` in `R^1`.
    Interval { a: f64, b: f64 },
    /// Finite set of points (its own sample).
    PointCloud { points: Vec<Point> },
}

impl Domain {
    pub fn circle(radius: f64, center: [f64; 2]) -> Self {
        Domain::Sphere {
            p: 2,
            radius,
            center: center.to_vec(),
        }
    }

    pub fn unit_circle() -> Self {
        Domain::circle(1.0, [0.0, 0.0])
    }

    /// `S^{p-1}` of radius 1 centered at the origin of `R^p`.
    pub fn unit_sphere(p: usize) -> Self {
        Domain::Sphere {
            p,
            radius: 1.0,
            center: vec![0.0; p],
        }
    }

    pub fn ambient_dim(&self) -> usize {
        match self {
            Domain::Sphere { p, .. } | Domain::Ball { p, .. } | Domain::Cube { p, .. } => *p,
            Domain::Interval { .. } => 1,
            Domain::PointCloud { points } => points.first().map_or(0, |q| q.len()),
        }
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim(),
                got: x.len(),
            });
        }
        Ok(())
    }

    /// A length scale of the set, used for step sizing.
    pub fn scale(&self) -> f64 {
        match self {
            Domain::Sphere { radius, .. } | Domain::Ball { radius, .. } => *radius,
            Domain::Cube { side, .. } => *side,
            Domain::Interval { a, b } => (b - a).abs(),
            Domain::PointCloud { points } => {
                let c = geom::mean(points);
                points
                    .iter()
                    .map(|q| geom::dist(q, &c))
                    .fold(0.0, f64::max)
                    .max(1e-12)
            }
        }
    }

    /// Deterministic quasi-uniform sample of exactly `resolution` points
    /// (point clouds return themselves and ignore `resolution`). The `seed`
    /// is accepted for interface stability; every sampler here is already
    /// deterministic and ignores it.
    pub fn sample(&self, resolution: usize, _seed: u64) -> Result<Vec<Point>> {
        self.sample_with_phase(resolution, false)
    }

    /// Same mesh shifted by half a cell, used to keep two overlapping sets
    /// from producing coincident sample atoms.
    pub fn sample_offset(&self, resolution: usize) -> Result<Vec<Point>> {
        self.sample_with_phase(resolution, true)
    }

    fn sample_with_phase(&self, n: usize, half_phase: bool) -> Result<Vec<Point>> {
        if n < 1 {
            return Err(Error::invalid("resolution must be >= 1"));
        }
        let phase = if half_phase { 0.5 } else { 0.0 };
        match self {
            Domain::Sphere { p, radius, center } => {
                let dirs = unit_sphere_sample(*p, n, phase)?;
                Ok(dirs
                    .into_iter()
                    .map(|d| geom::add(&geom::scale(&d, *radius), center))
                    .collect())
            }
            Domain::Ball { p, radius, center } => {
                let dirs = unit_sphere_sample(*p, n, phase)?;
                Ok(dirs
                    .into_iter()
                    .enumerate()
                    .map(|(i, d)| {
                        let r = ((i as f64 + 0.5 + phase) / n as f64).powf(1.0 / *p as f64);
                        geom::add(&geom::scale(&d, r * radius), center)
                    })
                    .collect())
            }
            Domain::Cube { p, side, corner } => Ok(cube_grid(*p, n, phase)
                .into_iter()
                .map(|u| geom::add(&geom::scale(&u, *side), corner))
                .collect()),
            Domain::Interval { a, b } => Ok(line_grid(n, phase)
                .into_iter()
                .map(|u| vec![a + u * (b - a)])
                .collect()),
            Domain::PointCloud { points } => Ok(points.clone()),
        }
    }

    /// Euclidean distance from `x` to the set.
    pub fn distance_to(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        Ok(match self {
            Domain::Sphere { radius, center, .. } => (geom::dist(x, center) - radius).abs(),
            Domain::Ball { radius, center, .. } => (geom::dist(x, center) - radius).max(0.0),
            Domain::Cube { side, corner, .. } => x
                .iter()
                .zip(corner)
                .map(|(xi, ci)| {
                    let d = (ci - xi).max(xi - (ci + side)).max(0.0);
                    d * d
                })
                .sum::<f64>()
                .sqrt(),
            Domain::Interval { a, b } => (a - x[0]).max(x[0] - b).max(0.0),
            Domain::PointCloud { points } => points
                .iter()
                .map(|q| geom::dist(x, q))
                .fold(f64::INFINITY, f64::min),
        })
    }

    /// Nearest point of the convex hull of the set.
    pub fn project_hull(&self, x: &[f64]) -> Result<Point> {
        self.check_dim(x)?;
        Ok(match self {
            Domain::Sphere { radius, center, .. } | Domain::Ball { radius, center, .. } => {
                clamp_to_ball(x, center, *radius)
            }
            Domain::Cube { side, corner, .. } => x
                .iter()
                .zip(corner)
                .map(|(xi, ci)| xi.clamp(*ci, ci + side))
                .collect(),
            Domain::Interval { a, b } => vec![x[0].clamp(*a, *b)],
            Domain::PointCloud { points } => project_hull_of_points(points, x),
        })
    }

    /// Nearest point of the set itself (used by constrained solve modes).
    pub fn project_onto_set(&self, x: &[f64]) -> Result<Point> {
        self.check_dim(x)?;
        Ok(match self {
            Domain::Sphere { radius, center, .. } => {
                let d = geom::sub(x, center);
                let n = geom::norm(&d);
                if n == 0.0 {
                    // center is equidistant from the whole sphere; pick a fixed point
                    let mut q = center.clone();
                    q[0] += radius;
                    q
                } else {
                    geom::add(&geom::scale(&d, radius / n), center)
                }
            }
            Domain::Ball { .. } | Domain::Cube { .. } | Domain::Interval { .. } => {
                self.project_hull(x)?
            }
            Domain::PointCloud { points } => {
                let (mut best, mut arg) = (f64::INFINITY, 0);
                for (i, q) in points.iter().enumerate() {
                    let d = geom::dist(x, q);
                    if d < best {
                        best = d;
                        arg = i;
                    }
                }
                points[arg].clone()
            }
        })
    }

    /// Approximate mesh width of an `n`-point sample, for polish step sizing.
    pub fn mesh_scale(&self, n: usize) -> f64 {
        let n = n.max(1) as f64;
        match self {
            Domain::Sphere { p, radius, .. } => match p {
                0 | 1 | 2 => 2.0 * std::f64::consts::PI * radius / n,
                _ => radius * (12.0 / n).powf(1.0 / (*p as f64 - 1.0)),
            },
            Domain::Ball { p, radius, .. } => 2.0 * radius / n.powf(1.0 / *p as f64),
            Domain::Cube { p, side, .. } => side / n.powf(1.0 / *p as f64),
            Domain::Interval { a, b } => (b - a).abs() / n,
            Domain::PointCloud { .. } => 0.0,
        }
    }

    /// Directions along which a point of the set can be perturbed while the
    /// projection keeps it in the set; used by the witness polish.
    pub fn polish_dirs(&self, y: &[f64]) -> Vec<Point> {
        match self {
            Domain::Sphere { p, center, .. } => {
                // tangent basis at y: ambient axes minus their radial part
                let radial = geom::sub(y, center);
                let rn = geom::norm(&radial);
                if rn == 0.0 {
                    return Vec::new();
                }
                let unit = geom::scale(&radial, 1.0 / rn);
                let mut dirs = Vec::new();
                for i in 0..*p {
                    let mut e = vec![0.0; *p];
                    e[i] = 1.0;
                    let radial_part = geom::dot(&e, &unit);
                    geom::axpy(&mut e, -radial_part, &unit);
                    let n = geom::norm(&e);
                    if n > 1e-9 {
                        dirs.push(geom::scale(&e, 1.0 / n));
                    }
                }
                dirs
            }
            Domain::Ball { p, .. } | Domain::Cube { p, .. } => (0..*p)
                .map(|i| {
                    let mut e = vec![0.0; *p];
                    e[i] = 1.0;
                    e
                })
                .collect(),
            Domain::Interval { .. } => vec![vec![1.0]],
            Domain::PointCloud { .. } => Vec::new(),
        }
    }

    /// Uniform random point in the convex hull of the set.
    pub fn random_in_hull<R: Rng>(&self, rng: &mut R) -> Point {
        match self {
            Domain::Sphere { p, radius, center } | Domain::Ball { p, radius, center } => {
                let dir = random_unit(*p, rng);
                let r = radius * rng.gen::<f64>().powf(1.0 / *p as f64);
                geom::add(&geom::scale(&dir, r), center)
            }
            Domain::Cube { p, side, corner } => (0..*p)
                .map(|i| corner[i] + side * rng.gen::<f64>())
                .collect(),
            Domain::Interval { a, b } => vec![a + (b - a) * rng.gen::<f64>()],
            Domain::PointCloud { points } => {
                let mut w: Vec<f64> = (0..points.len())
                    .map(|_| -rng.gen::<f64>().max(1e-300).ln())
                    .collect();
                let total: f64 = w.iter().sum();
                for wi in &mut w {
                    *wi /= total;
                }
                let mut out = vec![0.0; self.ambient_dim()];
                for (wi, q) in w.iter().zip(points) {
                    geom::axpy(&mut out, *wi, q);
                }
                out
            }
        }
    }

    /// Uniform-ish random point of the set itself.
    pub fn random_on_set<R: Rng>(&self, rng: &mut R) -> Point {
        match self {
            Domain::Sphere { p, radius, center } => {
                geom::add(&geom::scale(&random_unit(*p, rng), *radius), center)
            }
            Domain::PointCloud { points } => points[rng.gen_range(0..points.len())].clone(),
            _ => self.random_in_hull(rng),
        }
    }
}

fn clamp_to_ball(x: &[f64], center: &[f64], radius: f64) -> Point {
    let d = geom::sub(x, center);
    let n = geom::norm(&d);
    if n <= radius {
        x.to_vec()
    } else {
        geom::add(&geom::scale(&d, radius / n), center)
    }
}

fn random_unit<R: Rng>(p: usize, rng: &mut R) -> Point {
    loop {
        let v: Point = (0..p).map(|_| standard_normal(rng)).collect();
        let n = geom::norm(&v);
        if n > 1e-12 {
            return geom::scale(&v, 1.0 / n);
        }
    }
}

fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    // Box-Muller; two uniforms per normal keeps the stream layout simple.
    let u1: f64 = rng.gen::<f64>().max(1e-300);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Endpoint-inclusive grid on `[0, 1]`; half-phase switches to cell centers.
fn line_grid(n: usize, phase: f64) -> Vec<f64> {
    if phase > 0.0 {
        return (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
    }
    if n == 1 {
        return vec![0.5];
    }
    (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
}

/// Exactly `n` points of a uniform grid on the unit cube, taken with an even
/// stride from the smallest per-axis grid that is large enough.
fn cube_grid(p: usize, n: usize, phase: f64) -> Vec<Point> {
    let m = (n as f64).powf(1.0 / p as f64).ceil() as usize;
    let total = m.pow(p as u32);
    let axis = line_grid(m, phase);
    (0..n)
        .map(|k| {
            let mut idx = k * total / n;
            let mut pt = vec![0.0; p];
            for c in pt.iter_mut().rev() {
                *c = axis[idx % m];
                idx /= m;
            }
            pt
        })
        .collect()
}

/// Deterministic quasi-uniform sample of the unit sphere `S^{p-1}`.
fn unit_sphere_sample(p: usize, n: usize, phase: f64) -> Result<Vec<Point>> {
    match p {
        0 => Err(Error::invalid("sphere needs ambient dimension >= 1")),
        1 => Ok((0..n).map(|i| vec![if i % 2 == 0 { 1.0 } else { -1.0 }]).collect()),
        2 => Ok((0..n)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * (i as f64 + phase) / n as f64;
                vec![t.cos(), t.sin()]
            })
            .collect()),
        3 => Ok(spiral_sphere(n, phase)),
        4 | 5 => Ok(angle_product_sphere(p, n, phase)),
        _ => Err(Error::UnsupportedSphereDim(p)),
    }
}

/// Generalized (golden-angle) spiral on S^2.
fn spiral_sphere(n: usize, phase: f64) -> Vec<Point> {
    let golden = std::f64::consts::PI * (3.0 - 5.0_f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5 + phase) / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let t = golden * (i as f64 + phase);
            vec![r * t.cos(), r * t.sin(), z]
        })
        .collect()
}

/// Product-of-angles grid on `S^{p-1}` for p in {4, 5}: interior polar
/// angles, uniform azimuth, strided down to exactly `n` points.
fn angle_product_sphere(p: usize, n: usize, phase: f64) -> Vec<Point> {
    let k = p - 1; // number of angles
    let m = ((n as f64 / 2.0).powf(1.0 / k as f64).ceil() as usize).max(2);
    let m_az = 2 * m;
    let total = m.pow((k - 1) as u32) * m_az;
    let polar: Vec<f64> = (0..m)
        .map(|i| std::f64::consts::PI * (i as f64 + 0.5 + phase) / m as f64)
        .collect();
    let azimuth: Vec<f64> = (0..m_az)
        .map(|i| 2.0 * std::f64::consts::PI * (i as f64 + phase) / m_az as f64)
        .collect();
    (0..n)
        .map(|j| {
            let mut idx = j * total / n;
            let az = azimuth[idx % m_az];
            idx /= m_az;
            let mut angles = Vec::with_capacity(k);
            for _ in 0..k - 1 {
                angles.push(polar[idx % m]);
                idx /= m;
            }
            angles.push(az);
            // spherical to cartesian
            let mut pt = Vec::with_capacity(p);
            let mut sin_prod = 1.0;
            for a in angles.iter().take(k - 1) {
                pt.push(sin_prod * a.cos());
                sin_prod *= a.sin();
            }
            pt.push(sin_prod * angles[k - 1].cos());
            pt.push(sin_prod * angles[k - 1].sin());
            pt
        })
        .collect()
}

/// Nearest point of `conv(points)`, computed in the weight space of convex
/// combinations: a projected-gradient warm phase followed by an active-set
/// refinement of the face least-squares problem. Plain projected gradient
/// alone stalls sublinearly on degenerate supports, which is not good
/// enough for the 1e-10 idempotence tolerance.
fn project_hull_of_points(points: &[Point], x: &[f64]) -> Point {
    let m = points.len();
    if m == 1 {
        return points[0].clone();
    }
    // Lipschitz constant of the gradient 2 A^T (A w - x) via power iteration
    let mut v = vec![1.0 / (m as f64).sqrt(); m];
    let mut lmax = 1.0;
    for _ in 0..12 {
        let av = combine(points, &v);
        let mut atav: Vec<f64> = points.iter().map(|q| geom::dot(q, &av)).collect();
        let n = geom::norm(&atav);
        if n < 1e-300 {
            break;
        }
        for w in &mut atav {
            *w /= n;
        }
        lmax = n;
        v = atav;
    }
    let step = 1.0 / (2.0 * lmax.max(1e-12) * 1.05);

    let mut w = vec![1.0 / m as f64; m];
    for _ in 0..100 {
        let resid = geom::sub(&combine(points, &w), x);
        let grad: Vec<f64> = points.iter().map(|q| 2.0 * geom::dot(q, &resid)).collect();
        let mut next: Vec<f64> = w.iter().zip(&grad).map(|(wi, g)| wi - step * g).collect();
        project_simplex(&mut next);
        let d: Vec<f64> = next.iter().zip(&w).map(|(n, o)| n - o).collect();
        let ad = combine(points, &d);
        let ad2 = geom::dot(&ad, &ad);
        let t = if ad2 > 0.0 {
            (-geom::dot(&resid, &ad) / ad2).clamp(0.0, 1.0)
        } else {
            1.0
        };
        let mut delta = 0.0_f64;
        for (wi, di) in w.iter_mut().zip(&d) {
            let upd = t * di;
            delta = delta.max(upd.abs());
            *wi += upd;
        }
        if delta <= 1e-12 {
            break;
        }
    }
    active_set_refine(points, x, &mut w);
    combine(points, &w)
}

fn combine(points: &[Point], w: &[f64]) -> Point {
    let mut out = vec![0.0; points[0].len()];
    for (wi, q) in w.iter().zip(points) {
        geom::axpy(&mut out, *wi, q);
    }
    out
}

/// Primal active-set loop for `min |A w - x|^2` over the simplex: solve the
/// equality-constrained least squares on the current support, step to the
/// first blocking weight when the face solution leaves the simplex, and add
/// the most violating off-support index until the KKT conditions hold.
fn active_set_refine(points: &[Point], x: &[f64], w: &mut [f64]) {
    let m = points.len();
    let mut support: Vec<usize> = (0..m).filter(|&i| w[i] > 1e-12).collect();
    if support.is_empty() {
        support.push(0);
        w[0] = 1.0;
    }
    for _ in 0..3 * m + 10 {
        // inner drop loop
        for _ in 0..m + 1 {
            let ws = face_least_squares(points, x, &support);
            let feasible = ws.iter().all(|&v| v >= -1e-13);
            if feasible {
                for wi in w.iter_mut() {
                    *wi = 0.0;
                }
                for (&i, &v) in support.iter().zip(&ws) {
                    w[i] = v.max(0.0);
                }
                break;
            }
            // step from w|_S toward ws until the first weight hits zero
            let current: Vec<f64> = support.iter().map(|&i| w[i]).collect();
            let mut alpha = 1.0_f64;
            let mut blocker = None;
            for (k, (&c, &t)) in current.iter().zip(&ws).enumerate() {
                if t < 0.0 && c > t {
                    let a = c / (c - t);
                    if a < alpha {
                        alpha = a;
                        blocker = Some(k);
                    }
                }
            }
            for (k, &i) in support.iter().enumerate() {
                w[i] = current[k] + alpha * (ws[k] - current[k]);
            }
            match blocker {
                Some(k) => {
                    w[support[k]] = 0.0;
                    support.remove(k);
                    if support.is_empty() {
                        return;
                    }
                }
                None => break,
            }
        }
        // KKT: on the face, gradient components over the support share a
        // common multiplier; an off-support index with a smaller component
        // can still improve the fit
        let resid = geom::sub(&combine(points, w), x);
        let grad: Vec<f64> = points.iter().map(|q| 2.0 * geom::dot(q, &resid)).collect();
        let lam = support.iter().map(|&i| grad[i]).sum::<f64>() / support.len() as f64;
        let mut add = None;
        let mut worst = -1e-11;
        for j in 0..m {
            if support.contains(&j) {
                continue;
            }
            let gap = grad[j] - lam;
            if gap < worst {
                worst = gap;
                add = Some(j);
            }
        }
        match add {
            Some(j) => support.push(j),
            None => break,
        }
    }
}

/// Solve `min |A_S u - x|^2` subject to `sum u = 1` on the support via the
/// KKT normal equations (tiny dense system).
fn face_least_squares(points: &[Point], x: &[f64], support: &[usize]) -> Vec<f64> {
    let k = support.len();
    let mut mat = vec![vec![0.0; k + 1]; k + 1];
    let mut rhs = vec![0.0; k + 1];
    for (a, &i) in support.iter().enumerate() {
        for (b, &j) in support.iter().enumerate() {
            mat[a][b] = 2.0 * geom::dot(&points[i], &points[j]);
        }
        mat[a][a] += 1e-12; // ridge against affinely dependent supports
        mat[a][k] = 1.0;
        mat[k][a] = 1.0;
        rhs[a] = 2.0 * geom::dot(&points[i], x);
    }
    rhs[k] = 1.0;
    let sol = solve_dense(&mut mat, &mut rhs);
    sol[..k].to_vec()
}

/// Gaussian elimination with partial pivoting; consumes its inputs.
fn solve_dense(mat: &mut [Vec<f64>], rhs: &mut [f64]) -> Vec<f64> {
    let n = rhs.len();
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if mat[r][col].abs() > mat[piv][col].abs() {
                piv = r;
            }
        }
        mat.swap(col, piv);
        rhs.swap(col, piv);
        let diag = mat[col][col];
        if diag.abs() < 1e-300 {
            continue;
        }
        for r in col + 1..n {
            let f = mat[r][col] / diag;
            if f == 0.0 {
                continue;
            }
            for c in col..n {
                mat[r][c] -= f * mat[col][c];
            }
            rhs[r] -= f * rhs[col];
        }
    }
    let mut sol = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for c in row + 1..n {
            acc -= mat[row][c] * sol[c];
        }
        sol[row] = if mat[row][row].abs() < 1e-300 {
            0.0
        } else {
            acc / mat[row][row]
        };
    }
    sol
}

/// Euclidean projection onto the probability simplex (sort-based).
fn project_simplex(w: &mut [f64]) {
    let mut u = w.to_vec();
    u.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut css = 0.0;
    let mut rho = 0;
    let mut theta = 0.0;
    for (i, ui) in u.iter().enumerate() {
        css += ui;
        let t = (css - 1.0) / (i + 1) as f64;
        if ui - t > 0.0 {
            rho = i;
            theta = t;
        }
    }
    let _ = rho;
    for wi in w.iter_mut() {
        *wi = (*wi - theta).max(0.0);
    }
}

/// Load one point per row from a simple comma-separated file. Blank lines
/// and lines starting with `#` are skipped.
pub fn load_point_cloud_csv(path: &std::path::Path) -> Result<Vec<Point>> {
    let text = std::fs::read_to_string(path)?;
    let mut points = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row: std::result::Result<Point, _> = line
            .split(',')
            .map(|tok| tok.trim().parse::<f64>())
            .collect();
        let row = row.map_err(|e| {
            Error::invalid(format!("bad number on line {}: {e}", lineno + 1))
        })?;
        if let Some(first) = points.first() {
            let first: &Point = first;
            if first.len() != row.len() {
                return Err(Error::invalid(format!(
                    "row {} has {} fields, expected {}",
                    lineno + 1,
                    row.len(),
                    first.len()
                )));
            }
        }
        points.push(row);
    }
    if points.is_empty() {
        return Err(Error::invalid("point cloud file has no rows"));
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_sample_hits_exact_angles() {
        let pts = Domain::unit_circle().sample(4, 0).unwrap();
        let want = [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]];
        for (p, w) in pts.iter().zip(want.iter()) {
            assert!(geom::dist(p, w) < 1e-12);
        }
    }

    #[test]
    fn interval_sample_is_endpoint_inclusive() {
        let d = Domain::Interval { a: 0.0, b: 1.0 };
        let pts = d.sample(3, 0).unwrap();
        assert_eq!(
            pts,
            vec![vec![0.0], vec![0.5], vec![1.0]]
        );
    }

    #[test]
    fn sphere_samples_lie_on_sphere() {
        for p in 2..=5 {
            let d = Domain::unit_sphere(p);
            let pts = d.sample(500, 0).unwrap();
            assert_eq!(pts.len(), 500);
            for q in &pts {
                assert!((geom::norm(q) - 1.0).abs() <= 1e-12);
            }
        }
        assert!(matches!(
            Domain::unit_sphere(6).sample(10, 0),
            Err(Error::UnsupportedSphereDim(6))
        ));
    }

    #[test]
    fn samples_are_deterministic() {
        for d in [
            Domain::unit_sphere(3),
            Domain::Ball {
                p: 2,
                radius: 1.0,
                center: vec![0.0, 0.0],
            },
            Domain::Cube {
                p: 2,
                side: 1.0,
                corner: vec![0.0, 0.0],
            },
        ] {
            assert_eq!(d.sample(97, 7).unwrap(), d.sample(97, 7).unwrap());
        }
    }

    #[test]
    fn distances_match_hand_values() {
        let s = Domain::unit_circle();
        assert_eq!(s.distance_to(&[2.0, 0.0]).unwrap(), 1.0);
        let b = Domain::Ball {
            p: 2,
            radius: 1.0,
            center: vec![0.0, 0.0],
        };
        assert_eq!(b.distance_to(&[0.5, 0.0]).unwrap(), 0.0);
        let c = Domain::Cube {
            p: 2,
            side: 1.0,
            corner: vec![0.0, 0.0],
        };
        assert!((c.distance_to(&[2.0, 2.0]).unwrap() - 2.0_f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn hull_projection_examples() {
        let s = Domain::unit_circle();
        assert_eq!(s.project_hull(&[3.0, 0.0]).unwrap(), vec![1.0, 0.0]);
        assert_eq!(s.project_hull(&[0.2, 0.1]).unwrap(), vec![0.2, 0.1]);
        let cloud = Domain::PointCloud {
            points: vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]],
        };
        let proj = cloud.project_hull(&[1.0, 1.0]).unwrap();
        assert!(geom::dist(&proj, &[0.5, 0.5]) < 1e-8, "{proj:?}");
    }

    #[test]
    fn hull_projection_is_idempotent() {
        let shapes = [
            Domain::unit_circle(),
            Domain::Cube {
                p: 3,
                side: 2.0,
                corner: vec![-1.0, -1.0, -1.0],
            },
            Domain::PointCloud {
                points: vec![vec![0.0, 0.0], vec![2.0, 0.5], vec![0.5, 2.0], vec![1.0, 1.0]],
            },
        ];
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(5);
        for d in &shapes {
            for _ in 0..50 {
                let x: Point = (0..d.ambient_dim()).map(|_| 6.0 * rng.gen::<f64>() - 3.0).collect();
                let p1 = d.project_hull(&x).unwrap();
                let p2 = d.project_hull(&p1).unwrap();
                assert!(geom::dist(&p1, &p2) <= 1e-9);
            }
        }
    }

    #[test]
    fn circle_mesh_norm_is_tight() {
        // every point of a 10n reference grid is within arc pi/n of the sample
        let n = 64;
        let d = Domain::unit_circle();
        let sample = d.sample(n, 0).unwrap();
        let fine = d.sample(10 * n, 0).unwrap();
        let max_chord = fine
            .iter()
            .map(|y| {
                sample
                    .iter()
                    .map(|x| geom::dist(x, y))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max);
        // arc pi/n corresponds to chord 2 sin(pi/2n)
        assert!(max_chord <= 2.0 * (std::f64::consts::PI / (2.0 * n as f64)).sin() + 1e-12);
    }

    #[test]
    fn point_cloud_csv_roundtrip() {
        let dir = std::env::temp_dir().join("polarmax_core_csv_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("cloud.csv");
        std::fs::write(&path, "# comment\n0.0, 1.0\n2.5,-3.5\n").unwrap();
        let pts = load_point_cloud_csv(&path).unwrap();
        assert_eq!(pts, vec![vec![0.0, 1.0], vec![2.5, -3.5]]);
    }
}
