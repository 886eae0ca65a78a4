//! Continuous two-plate problem: the measure game
//! `sup_{mu on B} inf_{x in A} int K(x, y) dmu(y)` solved on samples by
//! mirror-prox multiplicative weights with averaged iterates, plus the
//! closed-form moment constants on spheres.

use rayon::prelude::*;
use serde::Serialize;

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::geom::{self, Point};
use crate::kernel::{self, KernelSpec};
use crate::polarization::Configuration;
use crate::special;

/// Finitely supported probability measure.
#[derive(Clone, Debug, Serialize)]
pub struct DiscreteMeasure {
    pub support: Vec<Point>,
    pub weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(support: Vec<Point>, weights: Vec<f64>) -> Result<Self> {
        if support.len() != weights.len() || support.is_empty() {
            return Err(Error::invalid("measure needs matching nonempty support/weights"));
        }
        if weights.iter().any(|w| *w < 0.0) {
            return Err(Error::invalid("measure weights must be nonnegative"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!("weights sum to {total}, not 1")));
        }
        Ok(DiscreteMeasure { support, weights })
    }

    /// Potential `int K(x, y) dmu(y)` at `x`.
    pub fn potential(&self, spec: &KernelSpec, x: &[f64]) -> Result<f64> {
        let mut acc = 0.0;
        for (y, w) in self.support.iter().zip(&self.weights) {
            let v = kernel::eval_kernel(spec, x, y)?;
            if v == f64::INFINITY && *w > 0.0 {
                return Ok(f64::INFINITY);
            }
            acc += w * v.max(f64::NEG_INFINITY);
        }
        Ok(acc)
    }
}

/// Uniform counting measure of a configuration, duplicates merged.
pub fn counting_measure(config: &Configuration) -> DiscreteMeasure {
    let n = config.len() as f64;
    let mut support: Vec<Point> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    for q in config.points() {
        let key: Vec<u64> = q.iter().map(|c| c.to_bits()).collect();
        let found = support
            .iter()
            .position(|p| p.iter().map(|c| c.to_bits()).collect::<Vec<_>>() == key);
        match found {
            Some(i) => weights[i] += 1.0 / n,
            None => {
                support.push(q.clone());
                weights.push(1.0 / n);
            }
        }
    }
    DiscreteMeasure { support, weights }
}

/// Outcome of the sampled matrix game.
#[derive(Clone, Debug, Serialize)]
pub struct GameSolution {
    /// `min` over the A-sample of the averaged measure's potential.
    pub value: f64,
    pub measure: DiscreteMeasure,
    /// Nonnegative primal-dual gap of the averaged strategies.
    pub duality_gap: f64,
    pub iterations: usize,
    /// False when the iteration budget ran out above the gap target.
    pub converged: bool,
}

/// Continuous two-plate constant on samples of `A` and `B`.
///
/// Sample atoms of `B` are shifted by half a mesh cell when a singular
/// kernel would otherwise see coincident pairs. The game is solved by
/// mirror-prox (extragradient) multiplicative weights on both players with
/// averaged half-step iterates; the duality gap of the averages certifies
/// the answer. The gap target is `1e-4 * max(1, |value|)`.
pub fn chebyshev_constant(
    spec: &KernelSpec,
    set_a: &Domain,
    set_b: &Domain,
    res_a: usize,
    res_b: usize,
    iterations: usize,
) -> Result<GameSolution> {
    let xs = set_a.sample(res_a, 0)?;
    let mut ys = set_b.sample(res_b, 0)?;
    if spec.singular_at_zero() && min_cross_distance(&xs, &ys) < 1e-9 {
        ys = set_b.sample_offset(res_b)?;
        if min_cross_distance(&xs, &ys) < 1e-9 {
            return Err(Error::invalid(
                "sample collision persists; separate A and B or lower the resolution",
            ));
        }
    }
    // payoff[i][j] = K(x_i, y_j); rows minimize, columns maximize
    let payoff: Vec<Vec<f64>> = xs
        .par_iter()
        .map(|x| {
            ys.iter()
                .map(|y| kernel::eval_kernel(spec, x, y).unwrap_or(f64::INFINITY))
                .collect()
        })
        .collect();
    if payoff.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::invalid("kernel is not bounded on the sampled A x B"));
    }

    let (na, nb) = (xs.len(), ys.len());
    let scale = payoff
        .iter()
        .flatten()
        .fold(0.0_f64, |m, v| m.max(v.abs()))
        .max(1e-12);
    let eta = 0.5 / scale;

    let mut row = vec![1.0 / na as f64; na];
    let mut col = vec![1.0 / nb as f64; nb];
    let mut row_avg = vec![0.0; na];
    let mut col_avg = vec![0.0; nb];
    let mut value = 0.0;
    let mut gap = f64::INFINITY;
    let mut done_iters = 0;
    let check_every = 64;

    for t in 1..=iterations {
        // half step
        let row_half = mwu_step(&row, &mat_vec(&payoff, &col), -eta);
        let col_half = mwu_step(&col, &mat_t_vec(&payoff, &row), eta);
        // full step uses the half-step opponent
        row = mwu_step(&row, &mat_vec(&payoff, &col_half), -eta);
        col = mwu_step(&col, &mat_t_vec(&payoff, &row_half), eta);
        for (a, h) in row_avg.iter_mut().zip(&row_half) {
            *a += h;
        }
        for (a, h) in col_avg.iter_mut().zip(&col_half) {
            *a += h;
        }
        done_iters = t;
        if t % check_every == 0 || t == iterations {
            let ybar = normalized(&col_avg);
            let xbar = normalized(&row_avg);
            let col_payout = mat_vec(&payoff, &ybar);
            let row_payout = mat_t_vec(&payoff, &xbar);
            let primal = col_payout.iter().cloned().fold(f64::INFINITY, f64::min);
            let dual = row_payout.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            value = primal;
            gap = dual - primal;
            if gap <= 1e-4 * value.abs().max(1.0) {
                break;
            }
        }
    }
    let weights = normalized(&col_avg);
    let converged = gap <= 1e-4 * value.abs().max(1.0);
    Ok(GameSolution {
        value,
        measure: DiscreteMeasure::new(ys, weights)?,
        duality_gap: gap.max(0.0),
        iterations: done_iters,
        converged,
    })
}

fn min_cross_distance(xs: &[Point], ys: &[Point]) -> f64 {
    let mut best = f64::INFINITY;
    for x in xs {
        for y in ys {
            best = best.min(geom::dist(x, y));
        }
    }
    best
}

fn mat_vec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter().map(|row| geom::dot(row, v)).collect()
}

fn mat_t_vec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    let cols = m[0].len();
    let mut out = vec![0.0; cols];
    for (row, vi) in m.iter().zip(v) {
        if *vi == 0.0 {
            continue;
        }
        for (o, r) in out.iter_mut().zip(row) {
            *o += vi * r;
        }
    }
    out
}

fn mwu_step(w: &[f64], payout: &[f64], eta: f64) -> Vec<f64> {
    let hi = payout
        .iter()
        .zip(w)
        .filter(|(_, wi)| **wi > 0.0)
        .map(|(p, _)| eta * p)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<f64> = w
        .iter()
        .zip(payout)
        .map(|(wi, p)| wi * (eta * p - hi).exp())
        .collect();
    let z: f64 = out.iter().sum();
    for o in &mut out {
        *o /= z;
    }
    out
}

fn normalized(v: &[f64]) -> Vec<f64> {
    let z: f64 = v.iter().sum();
    v.iter().map(|x| x / z).collect()
}

/// `T` for the kernel `<x,y>^k` on `S^{p-1}`: the mean of `<x0, .>^k`
/// against the uniform measure,
/// `Gamma(p/2) Gamma((k+1)/2) / (sqrt(pi) Gamma((p+k)/2))`.
///
/// For even `k` the gamma ratio telescopes to the exact rational
/// `(k-1)!! / (p (p+2) ... (p+k-2))`, which is what this returns; odd `k`
/// is rejected.
pub fn sphere_moment_constant(p: usize, k: u32) -> Result<f64> {
    if p < 2 {
        return Err(Error::invalid("moment constant needs p >= 2"));
    }
    if k % 2 != 0 {
        return Err(Error::invalid("moment constant is derived for even k only"));
    }
    let mut value = 1.0;
    let mut odd = 1.0;
    let mut denom = p as f64;
    for _ in 0..(k / 2) {
        value *= odd / denom;
        odd += 2.0;
        denom += 2.0;
    }
    Ok(value)
}

/// Same constant straight from the Lanczos gamma; used to cross-check the
/// exact product.
#[allow(dead_code)]
pub(crate) fn sphere_moment_constant_gamma(p: usize, k: u32) -> f64 {
    special::gamma(p as f64 / 2.0) * special::gamma((k as f64 + 1.0) / 2.0)
        / (std::f64::consts::PI.sqrt() * special::gamma((p as f64 + k as f64) / 2.0))
}
