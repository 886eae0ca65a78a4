//! Large-`N` normalization factors, reference constants and zeta sums.

use rayon::prelude::*;
use serde::Serialize;

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::kernel::KernelSpec;
use crate::solver::{maximize_polarization, SolveOptions};
use crate::special;

/// Renormalization factor: `N^{s/d}` for `s > d`, `N log N` at `s = d`,
/// `N` for `s < d`. Branch selection is by exact comparison of `s` and `d`;
/// note that at the seam `N^{s/d} = N` while the `N log N` branch exceeds
/// `N` for `N >= 3`.
pub fn tau(s: f64, d: f64, n: usize) -> f64 {
    let nf = n as f64;
    if s > d {
        nf.powf(s / d)
    } else if s == d {
        nf * nf.ln()
    } else {
        nf
    }
}

/// Volume of the unit ball in `R^d`.
pub fn unit_ball_volume(d: u32) -> f64 {
    std::f64::consts::PI.powf(d as f64 / 2.0) / special::gamma(d as f64 / 2.0 + 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaStatus {
    Exact,
    Conjectured,
}

/// Known reference values of the asymptotic polarization constant.
///
/// `s = d` gives the unit-ball volume; `d = 1, s > 1` gives
/// `2 zeta(s) (2^s - 1)`; `d = 2, s > 2` gives the hexagonal-lattice value
/// `(3^{s/2} - 1) zeta_hex(s) / 2`, which is only conjectured and is flagged
/// as such. Anything else returns `None`.
pub fn sigma_reference(s: f64, d: u32) -> Option<(f64, SigmaStatus)> {
    if d == 0 {
        return None;
    }
    if s == d as f64 {
        return Some((unit_ball_volume(d), SigmaStatus::Exact));
    }
    if d == 1 && s > 1.0 {
        let z = riemann_zeta(s).ok()?;
        return Some((2.0 * z * (2f64.powf(s) - 1.0), SigmaStatus::Exact));
    }
    if d == 2 && s > 2.0 {
        let z = epstein_zeta_hex_factored(s).ok()?;
        return Some(((3f64.powf(s / 2.0) - 1.0) * z / 2.0, SigmaStatus::Conjectured));
    }
    None
}

// Bernoulli numbers B_2 .. B_12 for the Euler-Maclaurin tail.
const BERNOULLI: [f64; 6] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
];

/// Hurwitz zeta `sum_{k>=0} (k + a)^{-s}` by Euler-Maclaurin, absolute
/// error well under 1e-12 for `s > 1`, `a > 0`.
pub fn hurwitz_zeta(s: f64, a: f64) -> Result<f64> {
    if s <= 1.0 {
        return Err(Error::invalid("hurwitz zeta needs s > 1"));
    }
    if a <= 0.0 {
        return Err(Error::invalid("hurwitz zeta needs a > 0"));
    }
    let m = 24usize;
    let mut acc = 0.0;
    for k in 0..m {
        acc += (k as f64 + a).powf(-s);
    }
    let edge = m as f64 + a;
    acc += edge.powf(1.0 - s) / (s - 1.0);
    acc += 0.5 * edge.powf(-s);
    // correction terms B_{2k}/(2k)! * (s)_{2k-1} * edge^{-s-2k+1}
    let mut rising = s; // (s)_{1}
    let mut fact = 2.0; // (2k)! with k = 1
    for (i, b) in BERNOULLI.iter().enumerate() {
        let k = i + 1;
        acc += b / fact * rising * edge.powf(-s - (2 * k - 1) as f64);
        // advance (s)_{2k-1} -> (s)_{2k+1} and (2k)! -> (2k+2)!
        rising *= (s + (2 * k - 1) as f64) * (s + (2 * k) as f64);
        fact *= ((2 * k + 1) * (2 * k + 2)) as f64;
    }
    Ok(acc)
}

/// Riemann zeta for `s > 1`.
pub fn riemann_zeta(s: f64) -> Result<f64> {
    hurwitz_zeta(s, 1.0)
}

/// Dirichlet L-function for the quadratic character mod 3.
fn dirichlet_l3(s: f64) -> Result<f64> {
    Ok(3f64.powf(-s) * (hurwitz_zeta(s, 1.0 / 3.0)? - hurwitz_zeta(s, 2.0 / 3.0)?))
}

/// Hexagonal-lattice zeta by direct summation over `0 < |v| <= cutoff` with
/// a rigorous integral tail bound; returns `(value, tail_bound)`. The norm
/// form is `(n + m/2)^2 + 3 m^2 / 4 = m^2 + mn + n^2` with minimal norm 1.
pub fn epstein_zeta_hex(s: f64, radius_cutoff: f64) -> Result<(f64, f64)> {
    if s <= 2.0 {
        return Err(Error::invalid("hexagonal zeta sum converges for s > 2 only"));
    }
    let r2 = radius_cutoff * radius_cutoff;
    if radius_cutoff < 2.0 {
        return Err(Error::invalid("cutoff too small"));
    }
    let m_max = (radius_cutoff * 2.0 / 3f64.sqrt()).ceil() as i64;
    let mut acc = 0.0;
    for m in -m_max..=m_max {
        let mf = m as f64;
        let half_width = (r2 - 0.75 * mf * mf).max(0.0).sqrt();
        let n_lo = (-mf / 2.0 - half_width).floor() as i64;
        let n_hi = (-mf / 2.0 + half_width).ceil() as i64;
        for n in n_lo..=n_hi {
            if m == 0 && n == 0 {
                continue;
            }
            let nf = n as f64;
            let q = mf * mf + mf * nf + nf * nf;
            if q <= r2 {
                acc += q.powf(-s / 2.0);
            }
        }
    }
    // Voronoi-cell comparison: cells have area det = sqrt(3)/2 and fit in a
    // ball of the covering radius c = 1/sqrt(3), so the tail is at most
    // (2 pi / det) * int_{R - 2c}^inf (u + c) u^{-s} du.
    let det = 3f64.sqrt() / 2.0;
    let c = 1.0 / 3f64.sqrt();
    let base = radius_cutoff - 2.0 * c;
    let tail = (2.0 * std::f64::consts::PI / det)
        * (base.powf(2.0 - s) / (s - 2.0) + c * base.powf(1.0 - s) / (s - 1.0));
    Ok((acc, tail))
}

/// Fast evaluation of the same lattice sum through the classical
/// factorization `6 zeta(s/2) L_{-3}(s/2)` of the quadratic form
/// `m^2 + mn + n^2`; accurate to ~1e-13 and used for reference values.
pub fn epstein_zeta_hex_factored(s: f64) -> Result<f64> {
    if s <= 2.0 {
        return Err(Error::invalid("hexagonal zeta needs s > 2"));
    }
    let w = s / 2.0;
    Ok(6.0 * riemann_zeta(w)? * dirichlet_l3(w)?)
}

/// One polarization solve per `N` with the values normalized by `tau`.
#[derive(Clone, Debug, Serialize)]
pub struct AsymptoticRun {
    pub s: f64,
    pub d: f64,
    pub ns: Vec<usize>,
    pub values: Vec<f64>,
    pub ratios: Vec<f64>,
    /// Affine fit `(slope, intercept)` of the last three ratios against
    /// `1/N`; the intercept is the empirical limit constant.
    pub fit: Option<(f64, f64)>,
    /// Index of the first `N` whose solve failed, if any; earlier results
    /// are retained.
    pub failed_at: Option<usize>,
}

/// Run the solver across `ns` and report `value / tau(s, d, N)` ratios with
/// a `1/N` extrapolation of the last three points.
pub fn h_star_ratio_run(
    spec: &KernelSpec,
    domain: &Domain,
    d: f64,
    ns: &[usize],
    opts: &SolveOptions,
) -> Result<AsymptoticRun> {
    let s = match *spec {
        KernelSpec::Riesz { s } => s,
        _ => return Err(Error::invalid("ratio runs are defined for Riesz kernels")),
    };
    if ns.is_empty() || ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("ns must be strictly increasing"));
    }
    let solves: Vec<Result<f64>> = ns
        .par_iter()
        .map(|&n| {
            let mut o = opts.clone();
            o.resolution = opts.resolution.max(32 * n);
            maximize_polarization(spec, domain, n, &o).map(|(_, rep)| rep.value)
        })
        .collect();
    let mut values = Vec::new();
    let mut failed_at = None;
    for (i, r) in solves.into_iter().enumerate() {
        match r {
            Ok(v) => values.push(v),
            Err(_) => {
                failed_at = Some(i);
                break;
            }
        }
    }
    let ratios: Vec<f64> = values
        .iter()
        .zip(ns)
        .map(|(v, &n)| v / tau(s, d, n))
        .collect();
    let fit = fit_last_three(ns, &ratios);
    Ok(AsymptoticRun {
        s,
        d,
        ns: ns[..values.len()].to_vec(),
        values,
        ratios,
        fit,
        failed_at,
    })
}

fn fit_last_three(ns: &[usize], ratios: &[f64]) -> Option<(f64, f64)> {
    if ratios.len() < 3 {
        return None;
    }
    let k = ratios.len();
    let xs: Vec<f64> = ns[k - 3..k].iter().map(|&n| 1.0 / n as f64).collect();
    let ys = &ratios[k - 3..k];
    let xm = xs.iter().sum::<f64>() / 3.0;
    let ym = ys.iter().sum::<f64>() / 3.0;
    let sxx: f64 = xs.iter().map(|x| (x - xm) * (x - xm)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    let slope = sxy / sxx;
    Some((slope, ym - slope * xm))
}
