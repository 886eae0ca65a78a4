//! Pairwise potentials and their spatial gradients.
//!
//! The Riesz family covers three branches keyed on the exponent `s`:
//! `|x-y|^{-s}` for `s > 0`, `-log|x-y|` at `s = 0` and `-|x-y|^{|s|}` for
//! `s < 0`. All branches are strictly decreasing in the distance. Singular
//! evaluations (coincident points with `s >= 0`) return `f64::INFINITY` so
//! that max-min objectives can take minima over them without averaging.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{self, Point};

/// Tolerance for the unit-circle membership check of geodesic kernels.
const CIRCLE_TOL: f64 = 1e-8;

/// A pairwise potential `K(x, y)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelSpec {
    /// Riesz potential with exponent `s` (all three sign branches).
    Riesz { s: f64 },
    /// `<x, y>^k` for a nonnegative even integer `k`; natural on spheres.
    InnerPower { k: u32 },
    /// Radial profile `t -> (R^2 + 1 - 2 R cos t)^{-s/2}` of the geodesic
    /// angle `t` between two points of the unit circle. This is the chordal
    /// Riesz potential seen from a concentric ring of radius `R`.
    GeodesicRadial { ring_radius: f64, s: f64 },
}

impl KernelSpec {
    pub fn riesz(s: f64) -> Self {
        KernelSpec::Riesz { s }
    }

    pub fn inner_power(k: u32) -> Result<Self> {
        if k % 2 != 0 {
            return Err(Error::invalid(format!(
                "inner-product power must be even, got {k}"
            )));
        }
        Ok(KernelSpec::InnerPower { k })
    }

    pub fn geodesic_radial(ring_radius: f64, s: f64) -> Result<Self> {
        if ring_radius <= 0.0 || s <= 0.0 {
            return Err(Error::invalid("geodesic profile needs R > 0 and s > 0"));
        }
        Ok(KernelSpec::GeodesicRadial { ring_radius, s })
    }

    /// True when `K(x, x)` diverges.
    pub fn singular_at_zero(&self) -> bool {
        match *self {
            KernelSpec::Riesz { s } => s >= 0.0,
            KernelSpec::InnerPower { .. } => false,
            KernelSpec::GeodesicRadial { ring_radius, .. } => (ring_radius - 1.0).abs() == 0.0,
        }
    }

    /// Riesz value as a function of the pairwise distance `r >= 0`.
    pub fn riesz_profile(s: f64, r: f64) -> f64 {
        if s > 0.0 {
            if r == 0.0 {
                f64::INFINITY
            } else {
                r.powf(-s)
            }
        } else if s == 0.0 {
            if r == 0.0 {
                f64::INFINITY
            } else {
                -r.ln()
            }
        } else {
            -r.powf(-s)
        }
    }

    /// Geodesic profile value at angle `t` in `[0, pi]`.
    pub fn geodesic_profile(ring_radius: f64, s: f64, t: f64) -> f64 {
        let chord2 = ring_radius * ring_radius + 1.0 - 2.0 * ring_radius * t.cos();
        if chord2 <= 0.0 {
            f64::INFINITY
        } else {
            chord2.powf(-s / 2.0)
        }
    }
}

fn check_dims(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    Ok(())
}

fn check_on_unit_circle(x: &[f64]) -> Result<()> {
    if x.len() != 2 || (geom::norm(x) - 1.0).abs() > CIRCLE_TOL {
        return Err(Error::OffUnitCircle);
    }
    Ok(())
}

/// Evaluate `K(x, y)`; singular coincidences yield `+inf`.
pub fn eval_kernel(spec: &KernelSpec, x: &[f64], y: &[f64]) -> Result<f64> {
    check_dims(x, y)?;
    match *spec {
        KernelSpec::Riesz { s } => Ok(KernelSpec::riesz_profile(s, geom::dist(x, y))),
        KernelSpec::InnerPower { k } => Ok(geom::dot(x, y).powi(k as i32)),
        KernelSpec::GeodesicRadial { ring_radius, s } => {
            check_on_unit_circle(x)?;
            check_on_unit_circle(y)?;
            let t = geom::dot(x, y).clamp(-1.0, 1.0).acos();
            Ok(KernelSpec::geodesic_profile(ring_radius, s, t))
        }
    }
}

/// Gradient of `K(x, y)` with respect to `x`. Requires `x != y` for the
/// singular branches.
pub fn eval_gradient(spec: &KernelSpec, x: &[f64], y: &[f64]) -> Result<Point> {
    check_dims(x, y)?;
    match *spec {
        KernelSpec::Riesz { s } => {
            let r = geom::dist(x, y);
            if r == 0.0 {
                return Err(Error::CoincidentPoints);
            }
            let diff = geom::sub(x, y);
            let factor = if s == 0.0 {
                -1.0 / (r * r)
            } else {
                -s.abs() * r.powf(-s - 2.0)
            };
            Ok(geom::scale(&diff, factor))
        }
        KernelSpec::InnerPower { k } => {
            if k == 0 {
                return Ok(vec![0.0; x.len()]);
            }
            let u = geom::dot(x, y);
            Ok(geom::scale(y, k as f64 * u.powi(k as i32 - 1)))
        }
        KernelSpec::GeodesicRadial { ring_radius, s } => {
            check_on_unit_circle(x)?;
            check_on_unit_circle(y)?;
            let u = geom::dot(x, y).clamp(-1.0, 1.0);
            let t = u.acos();
            let chord2 = ring_radius * ring_radius + 1.0 - 2.0 * ring_radius * t.cos();
            if chord2 <= 0.0 {
                return Err(Error::CoincidentPoints);
            }
            // d/dx f(acos<x,y>) collapses to s R f(t)^{1+2/s} y because the
            // sin t factors cancel.
            let factor = s * ring_radius * chord2.powf(-s / 2.0 - 1.0);
            Ok(geom::scale(y, factor))
        }
    }
}
