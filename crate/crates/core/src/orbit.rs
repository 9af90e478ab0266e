//! Orbit iteration with escape, trap and cycle detection.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cubic::CubicMap;
use crate::error::{Error, Result};

/// Relative tolerance for "two orbit points coincide".
pub const CONVERGENCE_TOL: f64 = 1e-8;
/// A cycle counts as attracting when `|μ| < 1 − ATTRACTING_MARGIN`.
pub const ATTRACTING_MARGIN: f64 = 1e-6;
/// Longest cycle Brent's search will report.
pub const PERIOD_CAP: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag")]
pub enum Fate {
    Escaped,
    AttractedToPoint { point: Complex64, period: u32 },
    /// Entered a certified contraction disk around the origin.
    AttractedToZeroBasin,
    BoundedUndecided,
}

impl Fate {
    pub fn escaped(&self) -> bool {
        matches!(self, Fate::Escaped)
    }

    pub fn is_bounded(&self) -> bool {
        !self.escaped()
    }

    /// True when the orbit provably or numerically converges to the origin.
    pub fn converges_to_zero(&self) -> bool {
        match self {
            Fate::AttractedToZeroBasin => true,
            Fate::AttractedToPoint { point, period } => *period == 1 && point.norm() < 1e-6,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitRecord {
    pub seed: Complex64,
    /// The seed followed by every computed iterate; `len() == steps_used + 1`
    /// when recording is on.
    pub points: Vec<Complex64>,
    pub fate: Fate,
    pub steps_used: usize,
}

/// A disk around an attracting fixed point `p` that `f` maps into itself,
/// contracting by at least `(1 + |μ|) / 2`.
///
/// Uses the exact expansion `f(p + h) − p = μh + (b + 3p)h² + h³`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trap {
    pub center: Complex64,
    pub radius: f64,
    radius_sq: f64,
}

impl Trap {
    pub fn around(f: &CubicMap, p: Complex64) -> Option<Trap> {
        let mu = f.derivative(p).norm();
        if mu >= 1.0 {
            return None;
        }
        let beta = (f.b + 3.0 * p).norm();
        let delta = 0.5 * (1.0 - mu);
        let radius = 2.0 * delta / (beta + (beta * beta + 4.0 * delta).sqrt());
        // keep strictly inside the bound to absorb rounding
        let radius = 0.999 * radius;
        if radius.is_finite() && radius > 0.0 {
            Some(Trap {
                center: p,
                radius,
                radius_sq: radius * radius,
            })
        } else {
            None
        }
    }

    #[inline]
    pub fn contains(&self, z: Complex64) -> bool {
        (z - self.center).norm_sqr() < self.radius_sq
    }
}

#[derive(Debug, Clone)]
pub struct OrbitConfig {
    pub budget: usize,
    pub record: bool,
    pub traps: Vec<Trap>,
    /// Run Brent cycle detection; traps and escape are always checked.
    pub detect_cycles: bool,
}

impl OrbitConfig {
    pub fn new(budget: usize) -> Self {
        Self {
            budget,
            record: false,
            traps: Vec::new(),
            detect_cycles: true,
        }
    }

    pub fn recording(mut self) -> Self {
        self.record = true;
        self
    }

    /// Adds the certified trap around the origin when it is attracting.
    pub fn with_zero_trap(mut self, f: &CubicMap) -> Self {
        if let Some(t) = Trap::around(f, Complex64::new(0.0, 0.0)) {
            self.traps.push(t);
        }
        self
    }

    pub fn with_trap(mut self, trap: Trap) -> Self {
        self.traps.push(trap);
        self
    }
}

#[inline]
fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() < CONVERGENCE_TOL * (1.0 + a.norm())
}

fn divisors(n: usize) -> impl Iterator<Item = usize> {
    (1..=n).filter(move |d| n % d == 0)
}

/// Newton refinement of a periodic point on `f^{∘n}(w) = w`.
fn refine_periodic(f: &CubicMap, z: Complex64, n: usize) -> Complex64 {
    let mut w = z;
    for _ in 0..8 {
        let (fw, d) = f.iterate_with_derivative(w, n);
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
    // only accept a refinement that stays on the detected cycle
    if (w - z).norm() < 1e-4 * (1.0 + z.norm()) {
        w
    } else {
        z
    }
}

/// Confirms a cycle candidate: minimal period dividing `lam`, attracting
/// multiplier.
fn confirm_cycle(f: &CubicMap, z: Complex64, lam: usize) -> Option<(Complex64, u32)> {
    let period = divisors(lam).find(|&d| close(f.iterate_with_derivative(z, d).0, z))?;
    let point = refine_periodic(f, z, period);
    let mu = f.cycle_multiplier(point, period).norm();
    if mu < 1.0 - ATTRACTING_MARGIN {
        Some((point, period as u32))
    } else {
        None
    }
}

/// Iterates `seed` until it escapes, enters a trap, settles on an attracting
/// cycle, or the budget runs out.
pub fn iterate_orbit_with(f: &CubicMap, seed: Complex64, cfg: &OrbitConfig) -> OrbitRecord {
    let radius = f.escape_radius();
    let radius_sq = radius * radius;
    let mut points = Vec::new();
    if cfg.record {
        points.reserve(cfg.budget.min(1 << 16) + 1);
        points.push(seed);
    }

    let trapped = |z: Complex64| cfg.traps.iter().find(|t| t.contains(z));
    let trap_fate = |t: &Trap| {
        if t.center == Complex64::new(0.0, 0.0) {
            Fate::AttractedToZeroBasin
        } else {
            Fate::AttractedToPoint {
                point: t.center,
                period: 1,
            }
        }
    };

    let mut z = seed;
    let mut tortoise = seed;
    let mut power = 1usize;
    let mut lam = 0usize;
    let mut fate = Fate::BoundedUndecided;
    let mut steps = 0usize;

    if let Some(t) = trapped(z) {
        return OrbitRecord {
            seed,
            points,
            fate: trap_fate(t),
            steps_used: 0,
        };
    }

    while steps < cfg.budget {
        z = f.eval(z);
        steps += 1;
        if cfg.record {
            points.push(z);
        }
        if z.norm_sqr() >= radius_sq || !z.re.is_finite() || !z.im.is_finite() {
            fate = Fate::Escaped;
            break;
        }
        if let Some(t) = trapped(z) {
            fate = trap_fate(t);
            break;
        }
        if !cfg.detect_cycles {
            continue;
        }
        lam += 1;
        if close(z, tortoise) {
            if let Some((point, period)) = confirm_cycle(f, z, lam) {
                fate = Fate::AttractedToPoint { point, period };
                break;
            }
            tortoise = z;
            lam = 0;
            continue;
        }
        if lam == power {
            tortoise = z;
            power = (power * 2).min(PERIOD_CAP);
            lam = 0;
        }
    }

    OrbitRecord {
        seed,
        points,
        fate,
        steps_used: steps,
    }
}

/// Records the full orbit of `seed` with Brent cycle detection.
pub fn iterate_orbit(f: &CubicMap, seed: Complex64, budget: usize) -> Result<OrbitRecord> {
    if budget == 0 {
        return Err(Error::ZeroBudget);
    }
    Ok(iterate_orbit_with(f, seed, &OrbitConfig::new(budget).recording()))
}

/// Fate only, without recording points.
pub fn orbit_fate(f: &CubicMap, seed: Complex64, cfg: &OrbitConfig) -> (Fate, usize) {
    let rec = iterate_orbit_with(
        f,
        seed,
        &OrbitConfig {
            record: false,
            ..cfg.clone()
        },
    );
    (rec.fate, rec.steps_used)
}

/// Escape test only; returns the escape step if any.
#[inline]
pub fn escape_time(f: &CubicMap, seed: Complex64, budget: usize) -> Option<usize> {
    let r2 = f.escape_radius().powi(2);
    let mut z = seed;
    for n in 1..=budget {
        z = f.eval(z);
        if z.norm_sqr() >= r2 || !z.re.is_finite() {
            return Some(n);
        }
    }
    None
}
