//! Periodic points of the cubic, found as roots of `f^{∘n}(z) − z`.
//!
//! Roots of exact period `n` come from an Aberth–Ehrlich iteration on
//! `f^{∘n}(z) − z` with the roots of lower periods deflated implicitly.
//! The polynomial is never expanded: values and log-derivatives come from
//! iterating the map, which keeps the computation stable at degree 3⁶.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cubic::CubicMap;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodicPoint {
    pub point: Complex64,
    pub period: u32,
    pub multiplier: Complex64,
    /// Residual `|f^{∘n}(z) − z|` after polishing.
    pub residual: f64,
    pub converged: bool,
}

/// A cycle given by one representative point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cycle {
    pub points: Vec<Complex64>,
    pub period: u32,
    pub multiplier: Complex64,
    pub converged: bool,
}

/// Number of points of exact period `n` for a cubic (with multiplicity).
pub fn exact_period_count(n: u32) -> usize {
    let mut total = 0i64;
    for d in 1..=n {
        if n % d == 0 {
            total += mobius(n / d) * 3i64.pow(d);
        }
    }
    total as usize
}

fn mobius(mut n: u32) -> i64 {
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// `p'/p` for `p(z) = f^{∘n}(z) − z`, robust to orbits that blow up.
fn log_derivative(f: &CubicMap, z: Complex64, n: u32) -> Complex64 {
    let mut w = z;
    let mut d = Complex64::new(1.0, 0.0);
    for k in 0..n {
        if w.norm() > 1e40 {
            // far out: f^{∘n}'/f^{∘n} ≈ 3^{n−k} (f^{∘k})'/f^{∘k}
            let remaining = 3f64.powi((n - k) as i32);
            return d / w * remaining;
        }
        d *= f.derivative(w);
        w = f.eval(w);
    }
    let p = w - z;
    if p == ZERO {
        return Complex64::new(f64::INFINITY, 0.0);
    }
    (d - 1.0) / p
}

fn polish(f: &CubicMap, z: Complex64, n: u32) -> Complex64 {
    let mut w = z;
    for _ in 0..6 {
        let (fw, d) = f.iterate_with_derivative(w, n as usize);
        let denom = d - 1.0;
        if denom.norm() < 1e-300 {
            break;
        }
        let step = (fw - w) / denom;
        if !step.re.is_finite() || !step.im.is_finite() {
            break;
        }
        w -= step;
        if step.norm() < 1e-16 * (1.0 + w.norm()) {
            break;
        }
    }
    // reject jumps to a different root
    if (w - z).norm() < 1e-6 * (1.0 + z.norm()) {
        w
    } else {
        z
    }
}

fn aberth(f: &CubicMap, n: u32, known: &[Complex64], count: usize) -> (Vec<Complex64>, bool) {
    if count == 0 {
        return (Vec::new(), true);
    }
    let radius = f.filled_julia_bound();
    let mut roots: Vec<Complex64> = (0..count)
        .map(|k| {
            let angle = std::f64::consts::TAU * (k as f64 + 0.37) / count as f64;
            Complex64::from_polar(radius * (0.6 + 0.3 * ((k * 7 % 11) as f64 / 11.0)), angle)
        })
        .collect();
    let mut done = vec![false; count];
    let max_iter = 800;
    for _ in 0..max_iter {
        let mut all_done = true;
        for i in 0..count {
            if done[i] {
                continue;
            }
            let z = roots[i];
            let mut ratio = log_derivative(f, z, n);
            if !ratio.re.is_finite() {
                done[i] = true;
                continue;
            }
            for &k in known {
                let diff = z - k;
                if diff != ZERO {
                    ratio -= diff.inv();
                }
            }
            let mut repulsion = ZERO;
            for (j, &w) in roots.iter().enumerate() {
                if j != i {
                    let diff = z - w;
                    if diff != ZERO {
                        repulsion += diff.inv();
                    }
                }
            }
            let denom = ratio - repulsion;
            if denom == ZERO || !denom.re.is_finite() {
                done[i] = true;
                continue;
            }
            let step = denom.inv();
            roots[i] = z - step;
            if step.norm() < 1e-14 * (1.0 + z.norm()) {
                done[i] = true;
            } else {
                all_done = false;
            }
        }
        if all_done {
            return (roots, true);
        }
    }
    (roots, false)
}

/// All points of exact period `n`, with lower periods supplied by the caller
/// (all points of every proper divisor period, with multiplicity).
fn exact_period_points(f: &CubicMap, n: u32, lower: &[Complex64]) -> Vec<PeriodicPoint> {
    let count = 3usize.pow(n) - lower.len();
    let (roots, all_converged) = if n == 1 {
        (f.fixed_points().into_iter().map(|p| p.point).collect(), true)
    } else {
        aberth(f, n, lower, count)
    };
    roots
        .into_iter()
        .map(|z| {
            let z = if n == 1 { z } else { polish(f, z, n) };
            let (fz, mu) = f.iterate_with_derivative(z, n as usize);
            let residual = (fz - z).norm();
            PeriodicPoint {
                point: z,
                period: n,
                multiplier: mu,
                residual,
                converged: residual.is_finite()
                    && (all_converged || residual < 1e-8 * (1.0 + z.norm())),
            }
        })
        .collect()
}

/// Periodic points grouped by exact period `1..=period_max`.
pub fn periodic_points_up_to(f: &CubicMap, period_max: u32) -> Vec<Vec<PeriodicPoint>> {
    let mut by_period: Vec<Vec<PeriodicPoint>> = Vec::with_capacity(period_max as usize);
    for n in 1..=period_max {
        let lower: Vec<Complex64> = (1..n)
            .filter(|d| n % d == 0)
            .flat_map(|d| by_period[(d - 1) as usize].iter().map(|p| p.point))
            .collect();
        by_period.push(exact_period_points(f, n, &lower));
    }
    by_period
}

/// Every root of `f^{∘n}(z) − z` with multiplicity.
pub fn roots_of_iterate_minus_identity(f: &CubicMap, n: u32) -> Vec<PeriodicPoint> {
    let all = periodic_points_up_to(f, n);
    (1..=n)
        .filter(|d| n % d == 0)
        .flat_map(|d| all[(d - 1) as usize].clone())
        .collect()
}

/// Groups points of one exact period into cycles.
pub fn group_cycles(f: &CubicMap, points: &[PeriodicPoint]) -> Vec<Cycle> {
    let mut used = vec![false; points.len()];
    let mut cycles = Vec::new();
    for i in 0..points.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let start = points[i];
        let n = start.period as usize;
        let mut members = vec![start.point];
        let mut z = start.point;
        let mut converged = start.converged;
        for _ in 1..n {
            z = f.eval(z);
            // nearest unused point stands in for the image
            let best = points
                .iter()
                .enumerate()
                .filter(|(j, _)| !used[*j])
                .min_by(|a, b| {
                    (a.1.point - z)
                        .norm()
                        .total_cmp(&(b.1.point - z).norm())
                });
            if let Some((j, p)) = best {
                if (p.point - z).norm() < 1e-6 * (1.0 + z.norm()) {
                    used[j] = true;
                    members.push(p.point);
                    converged &= p.converged;
                    continue;
                }
            }
            members.push(z);
        }
        cycles.push(Cycle {
            points: members,
            period: start.period,
            multiplier: start.multiplier,
            converged,
        });
    }
    cycles
}
