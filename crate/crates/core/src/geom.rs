//! Dense vector helpers. Points are plain `Vec<f64>`; the ambient dimension
//! varies per problem, so nothing here is fixed-size.

pub type Point = Vec<f64>;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Point {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Point {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[f64], c: f64) -> Point {
    a.iter().map(|x| c * x).collect()
}

/// `a += c * b` in place.
pub fn axpy(a: &mut [f64], c: f64, b: &[f64]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x += c * y;
    }
}

pub fn mean(points: &[Point]) -> Point {
    let dim = points[0].len();
    let mut out = vec![0.0; dim];
    for p in points {
        axpy(&mut out, 1.0, p);
    }
    scale(&out, 1.0 / points.len() as f64)
}

/// Angle in `[0, pi]` between two nonzero vectors.
pub fn angle_between(a: &[f64], b: &[f64]) -> f64 {
    let c = dot(a, b) / (norm(a) * norm(b));
    c.clamp(-1.0, 1.0).acos()
}
