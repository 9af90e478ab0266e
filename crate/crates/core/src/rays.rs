//! External rays: Green function, ray continuation by Newton's method on the
//! Böttcher equation, co-landing census of periodic rays, and persistence of
//! co-landing under perturbation.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::TAU;
use std::fmt;
use std::hash::{Hash, Hasher};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{classify, Budgets, ComponentTag};
use crate::cubic::CubicMap;
use crate::error::{Error, Result};
use crate::petal::rotation_number;

/// A rational angle `num/den` in `[0, 1)`, kept as given so tripling stays
/// exact. Equality and hashing use the reduced fraction.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RationalAngle {
    pub num: u64,
    pub den: u64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow3_mod(n: u32, m: u64) -> u64 {
    let (mut result, mut base, mut e) = (1 % m, 3 % m, n);
    while e > 0 {
        if e & 1 == 1 {
            result = mul_mod(result, base, m);
        }
        base = mul_mod(base, base, m);
        e >>= 1;
    }
    result
}

impl RationalAngle {
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0, "angle denominator must be positive");
        Self {
            num: num % den,
            den,
        }
    }

    pub fn reduced(&self) -> (u64, u64) {
        let g = gcd(self.num, self.den).max(1);
        (self.num / g, self.den / g)
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `3θ mod 1`.
    pub fn triple(&self) -> Self {
        Self::new(mul_mod(self.num, 3, self.den), self.den)
    }

    /// `3ⁿθ mod 1` as a float in `[0, 1)`.
    pub fn fraction_after(&self, n: u32) -> f64 {
        mul_mod(self.num, pow3_mod(n, self.den), self.den) as f64 / self.den as f64
    }

    /// Exact period under tripling, if periodic within 64 steps.
    pub fn period(&self) -> Option<u32> {
        let mut a = self.triple();
        for k in 1..=64 {
            if a == *self {
                return Some(k);
            }
            a = a.triple();
        }
        None
    }
}

impl PartialEq for RationalAngle {
    fn eq(&self, other: &Self) -> bool {
        self.num as u128 * other.den as u128 == other.num as u128 * self.den as u128
    }
}

impl Eq for RationalAngle {}

impl Hash for RationalAngle {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.reduced().hash(state);
    }
}

impl PartialOrd for RationalAngle {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RationalAngle {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

impl fmt::Display for RationalAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (p, q) = self.reduced();
        write!(f, "{p}/{q}")
    }
}

/// Largest supported denominator `3ⁿ − 1`.
pub const MAX_ANGLE_DENOMINATOR: u64 = 1 << 20;

/// All angles `p/(3ⁿ − 1)`, i.e. every angle whose period divides `n`.
pub fn periodic_angles(n: u32) -> Result<Vec<RationalAngle>> {
    if n == 0 || n > 40 || 3u64.pow(n) - 1 > MAX_ANGLE_DENOMINATOR {
        return Err(Error::PeriodCap { got: n, max: 12 });
    }
    let den = 3u64.pow(n) - 1;
    Ok((0..den).map(|p| RationalAngle::new(p, den)).collect())
}

/// Angles of exact period `n` under tripling.
pub fn exact_period_angles(n: u32) -> Result<Vec<RationalAngle>> {
    Ok(periodic_angles(n)?
        .into_iter()
        .filter(|a| a.period() == Some(n))
        .collect())
}

/// Orbits are followed until `|z|` passes this before the tail estimate.
const GREEN_ESCAPE: f64 = 1e50;

/// Green function `lim 3⁻ⁿ log⁺|fⁿ(z)|`; 0 when the orbit stays bounded
/// for `budget` steps.
pub fn green(f: &CubicMap, z: Complex64, budget: usize) -> f64 {
    let mut w = z;
    let mut scale = 1.0;
    for _ in 0..=budget {
        let m = w.norm();
        if !m.is_finite() {
            return f64::NAN;
        }
        if m > GREEN_ESCAPE {
            let inv = w.inv();
            let tail = (1.0 + f.b * inv + f.lambda * inv * inv).norm().ln();
            return scale * (m.ln() + 0.5 * tail);
        }
        w = f.eval(w);
        scale /= 3.0;
    }
    0.0
}

/// Approximate inverse Böttcher map near infinity,
/// `ψ(W) = W − b/3 − (λ/3 − b²/9)/W`.
fn inverse_bottcher(f: &CubicMap, w: Complex64) -> Complex64 {
    let beta0 = f.b / 3.0;
    let beta1 = f.lambda / 3.0 - f.b * f.b / 9.0;
    w - beta0 - beta1 / w
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RayStatus {
    Landed,
    Stalled,
    HitCriticalValue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayTrace {
    pub angle: RationalAngle,
    /// From large modulus inward.
    pub points: Vec<Complex64>,
    /// Potential of each point.
    pub potentials: Vec<f64>,
    pub landing: Option<Complex64>,
    pub status: RayStatus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RayParams {
    pub steps_per_level: usize,
    pub levels: usize,
}

impl Default for RayParams {
    fn default() -> Self {
        Self {
            steps_per_level: 32,
            levels: 60,
        }
    }
}

/// Depth `n` is the least with `3ⁿ t ≥ ln 10⁴`, so the target
/// `W = exp(3ⁿ(t + 2πiθ))` has `|W| ≥ 10⁴` and `ψ` is accurate there.
const BOTTCHER_LOG_RADIUS: f64 = 9.210340371976184;
const LANDING_STEP: f64 = 1e-9;
const MAX_DEPTH: u32 = 200;

fn depth_for(t: f64) -> Option<u32> {
    let mut n = 0;
    let mut s = t;
    while s < BOTTCHER_LOG_RADIUS {
        s *= 3.0;
        n += 1;
        if n > MAX_DEPTH {
            return None;
        }
    }
    Some(n)
}

/// Solves `fⁿ(z) = target` by Newton's method from `z0`.
fn newton_preimage(f: &CubicMap, z0: Complex64, n: u32, target: Complex64) -> Option<Complex64> {
    let mut z = z0;
    for _ in 0..40 {
        let (fz, d) = f.iterate_with_derivative(z, n as usize);
        if !(fz.re.is_finite() && fz.im.is_finite() && d.re.is_finite() && d.im.is_finite()) {
            return None;
        }
        if d.norm() < 1e-280 {
            return None;
        }
        let step = (fz - target) / d;
        z -= step;
        if step.norm() <= 1e-15 * (1.0 + z.norm()) {
            return Some(z);
        }
    }
    // accept a converged-to-rounding result
    let (fz, _) = f.iterate_with_derivative(z, n as usize);
    ((fz - target).norm() <= 1e-9 * target.norm()).then_some(z)
}

fn ray_point(f: &CubicMap, angle: &RationalAngle, t: f64, z0: Complex64) -> Option<Complex64> {
    let n = depth_for(t)?;
    let scale = 3f64.powi(n as i32);
    let w = Complex64::from_polar((scale * t).exp(), TAU * angle.fraction_after(n));
    newton_preimage(f, z0, n, inverse_bottcher(f, w))
}

/// Refines a landing estimate on the periodic point it approximates.
fn refine_landing(f: &CubicMap, z: Complex64, period: u32) -> Option<Complex64> {
    let mut w = z;
    for _ in 0..20 {
        let (fw, d) = f.iterate_with_derivative(w, period as usize);
        let denom = d - 1.0;
        if denom.norm() < 1e-300 {
            return None;
        }
        let step = (fw - w) / denom;
        if !(step.re.is_finite() && step.im.is_finite()) {
            return None;
        }
        w -= step;
        if step.norm() < 1e-15 * (1.0 + w.norm()) {
            break;
        }
    }
    ((w - z).norm() < 1e-6).then_some(w)
}

/// Follows the ray of argument `theta` from potential `ln(2R)` inward,
/// halving the potential each level.
pub fn trace_ray(f: &CubicMap, theta: RationalAngle, params: RayParams) -> RayTrace {
    let t0 = (2.0 * f.escape_radius()).ln();
    let mut points = Vec::with_capacity(params.levels * params.steps_per_level + 1);
    let mut potentials = Vec::with_capacity(points.capacity());
    let mut status = RayStatus::Stalled;

    let guess = inverse_bottcher(f, Complex64::from_polar(t0.exp(), TAU * theta.to_f64()));
    let Some(mut z) = ray_point(f, &theta, t0, guess) else {
        return RayTrace {
            angle: theta,
            points,
            potentials,
            landing: None,
            status: RayStatus::HitCriticalValue,
        };
    };
    points.push(z);
    potentials.push(t0);

    let ratio = 0.5f64.powf(1.0 / params.steps_per_level as f64);
    let mut t = t0;
    'outer: for _ in 0..params.levels * params.steps_per_level {
        let t_next = t * ratio;
        // shorten the step near trouble before giving up
        let mut sub = 1usize;
        let next = loop {
            let mut ok = true;
            let mut w = z;
            let mut s = t;
            let q = (t_next / t).powf(1.0 / sub as f64);
            for _ in 0..sub {
                s *= q;
                match ray_point(f, &theta, s, w) {
                    Some(v) => w = v,
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                break w;
            }
            sub *= 2;
            if sub > 64 {
                status = RayStatus::HitCriticalValue;
                break 'outer;
            }
        };
        let step = (next - z).norm();
        z = next;
        t = t_next;
        points.push(z);
        potentials.push(t);
        if step < LANDING_STEP {
            status = RayStatus::Landed;
            break;
        }
    }

    let landing = (status == RayStatus::Landed).then(|| {
        theta
            .period()
            .and_then(|p| refine_landing(f, z, p))
            .unwrap_or(z)
    });
    RayTrace {
        angle: theta,
        points,
        potentials,
        landing,
        status,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColandingPair {
    pub alpha: RationalAngle,
    pub beta: RationalAngle,
    pub landing_point: Complex64,
    /// Period of the landing point.
    pub period: u32,
    pub multiplier: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandingCluster {
    pub angles: Vec<RationalAngle>,
    pub landing_point: Complex64,
    pub period: u32,
    pub multiplier: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Census {
    pub max_period: u32,
    pub traced: usize,
    pub landed: usize,
    pub stalled: usize,
    pub hit_critical: usize,
    pub clusters: Vec<LandingCluster>,
    pub pairs: Vec<ColandingPair>,
}

pub const CENSUS_PERIOD_MAX: u32 = 4;
pub const CLUSTER_RADIUS: f64 = 1e-5;

/// Traces every periodic angle of period up to `max_period`, clusters the
/// landing points, and keeps clusters of two or more rays landing at a
/// repelling periodic point.
pub fn colanding_census(f: &CubicMap, max_period: u32, params: RayParams) -> Result<Census> {
    let angles = census_angles(max_period)?;
    let traces: Vec<RayTrace> = angles
        .par_iter()
        .map(|&a| trace_ray(f, a, params))
        .collect();
    Ok(census_from_traces(f, max_period, &traces))
}

/// Angles of exact period `1..=max_period`, checked against
/// [`CENSUS_PERIOD_MAX`].
pub fn census_angles(max_period: u32) -> Result<Vec<RationalAngle>> {
    if max_period == 0 || max_period > CENSUS_PERIOD_MAX {
        return Err(Error::PeriodCap {
            got: max_period,
            max: CENSUS_PERIOD_MAX,
        });
    }
    Ok((1..=max_period)
        .map(exact_period_angles)
        .collect::<Result<Vec<_>>>()?
        .concat())
}

pub fn census_from_traces(f: &CubicMap, max_period: u32, traces: &[RayTrace]) -> Census {
    let mut census = Census {
        max_period,
        traced: traces.len(),
        landed: 0,
        stalled: 0,
        hit_critical: 0,
        clusters: Vec::new(),
        pairs: Vec::new(),
    };
    let mut landed: Vec<(RationalAngle, Complex64)> = Vec::new();
    for tr in traces {
        match (tr.status, tr.landing) {
            (RayStatus::Landed, Some(x)) => landed.push((tr.angle, x)),
            (RayStatus::HitCriticalValue, _) => census.hit_critical += 1,
            _ => census.stalled += 1,
        }
    }
    census.landed = landed.len();

    // single-linkage clustering on a coarse spatial hash
    let cell = |z: Complex64| {
        (
            (z.re / CLUSTER_RADIUS).floor() as i64,
            (z.im / CLUSTER_RADIUS).floor() as i64,
        )
    };
    let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (k, (_, x)) in landed.iter().enumerate() {
        buckets.entry(cell(*x)).or_default().push(k);
    }
    let mut parent: Vec<usize> = (0..landed.len()).collect();
    fn find(parent: &mut [usize], k: usize) -> usize {
        let mut r = k;
        while parent[r] != r {
            r = parent[r];
        }
        let mut k = k;
        while parent[k] != r {
            let next = parent[k];
            parent[k] = r;
            k = next;
        }
        r
    }
    for (k, (_, x)) in landed.iter().enumerate() {
        let (ci, cj) = cell(*x);
        for di in -1..=1 {
            for dj in -1..=1 {
                if let Some(others) = buckets.get(&(ci + di, cj + dj)) {
                    for &o in others {
                        if o > k && (landed[o].1 - x).norm() < CLUSTER_RADIUS {
                            let (a, b) = (find(&mut parent, k), find(&mut parent, o));
                            parent[a] = b;
                        }
                    }
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for k in 0..landed.len() {
        let r = find(&mut parent, k);
        groups.entry(r).or_default().push(k);
    }

    for members in groups.values().filter(|m| m.len() >= 2) {
        let x = landed[members[0]].1;
        let Some(period) = (1..=max_period).find(|&p| {
            (f.iterate_with_derivative(x, p as usize).0 - x).norm() < 1e-6
        }) else {
            continue;
        };
        let multiplier = f.cycle_multiplier(x, period as usize);
        if multiplier.norm() <= 1.0 {
            continue;
        }
        let mut angles: Vec<RationalAngle> = members.iter().map(|&k| landed[k].0).collect();
        angles.sort();
        for i in 0..angles.len() {
            for j in i + 1..angles.len() {
                census.pairs.push(ColandingPair {
                    alpha: angles[i],
                    beta: angles[j],
                    landing_point: x,
                    period,
                    multiplier,
                });
            }
        }
        census.clusters.push(LandingCluster {
            angles,
            landing_point: x,
            period,
            multiplier,
        });
    }
    census
        .pairs
        .sort_by(|a, b| (a.alpha, a.beta).cmp(&(b.alpha, b.beta)));
    census
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersistentPair {
    pub alpha: RationalAngle,
    pub beta: RationalAngle,
    /// Landing point at each `ε`, in the order of `eps_sequence`.
    pub landings: Vec<Complex64>,
    /// `|x(ε_last) − x(ε_prev)|`.
    pub final_gap: f64,
    pub cauchy: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersistenceReport {
    pub eps_sequence: Vec<f64>,
    pub census_sizes: Vec<usize>,
    pub matched: Vec<PersistentPair>,
    pub witnesses: usize,
    pub message: String,
}

pub const CAUCHY_TOL: f64 = 1e-4;

/// Whether `perturb(f, ε)` classifies as an attracting capture.
pub fn perturbation_is_capture(f: &CubicMap, eps: f64, budgets: &Budgets) -> Result<bool> {
    let g = f.perturb(eps)?;
    Ok(classify(&g, &budgets.for_perturbation(eps))?.tag == ComponentTag::AttractingCapture)
}

/// Runs the census on `perturb(f, ε)` for each `ε` and follows co-landing
/// pairs present at every `ε`.
///
/// `f` must be parabolic at 0 and every perturbation must classify as an
/// attracting capture.
pub fn cutpoint_persistence(
    f: &CubicMap,
    eps_sequence: &[f64],
    max_period: u32,
    params: RayParams,
    budgets: &Budgets,
) -> Result<PersistenceReport> {
    if rotation_number(f.lambda, 64)?.is_none() {
        return Err(Error::Precondition("multiplier is not a root of unity".into()));
    }
    if eps_sequence.len() < 2 {
        return Err(Error::Precondition("need at least two perturbation sizes".into()));
    }
    for &eps in eps_sequence {
        if !perturbation_is_capture(f, eps, budgets)? {
            return Err(Error::Precondition(format!(
                "perturbation at eps = {eps} is not an attracting capture"
            )));
        }
    }
    let censuses = eps_sequence
        .iter()
        .map(|&eps| colanding_census(&f.perturb(eps)?, max_period, params))
        .collect::<Result<Vec<_>>>()?;
    let mut common: BTreeMap<(RationalAngle, RationalAngle), Vec<Complex64>> = censuses[0]
        .pairs
        .iter()
        .map(|p| ((p.alpha, p.beta), vec![p.landing_point]))
        .collect();
    for c in &censuses[1..] {
        let here: HashMap<(RationalAngle, RationalAngle), Complex64> = c
            .pairs
            .iter()
            .map(|p| ((p.alpha, p.beta), p.landing_point))
            .collect();
        common.retain(|k, v| match here.get(k) {
            Some(&x) => {
                v.push(x);
                true
            }
            None => false,
        });
    }
    let matched: Vec<PersistentPair> = common
        .into_iter()
        .map(|((alpha, beta), landings)| {
            let n = landings.len();
            let final_gap = (landings[n - 1] - landings[n - 2]).norm();
            PersistentPair {
                alpha,
                beta,
                landings,
                final_gap,
                cauchy: final_gap < CAUCHY_TOL,
            }
        })
        .collect();
    let witnesses = matched.iter().filter(|p| p.cauchy).count();
    let message = if censuses.iter().all(|c| c.pairs.is_empty()) {
        "no witnesses at this budget".to_string()
    } else {
        format!("{witnesses} of {} matched pairs converge", matched.len())
    };
    Ok(PersistenceReport {
        eps_sequence: eps_sequence.to_vec(),
        census_sizes: censuses.iter().map(|c| c.pairs.len()).collect(),
        matched,
        witnesses,
        message,
    })
}

/// Grid search over `b` at a parabolic `λ` for a map whose co-landing
/// pairs persist under perturbation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaptureSearch {
    pub lambda: Complex64,
    pub window: crate::grid::Window,
    /// Coarse grid step; candidates are maps with `perturb(f, eps[0])` of
    /// capture type.
    pub coarse_step: f64,
    /// Local refinement: `(2k + 1)²` points at this spacing per candidate.
    pub fine_step: f64,
    pub fine_radius: i32,
    pub eps_sequence: Vec<f64>,
    pub max_period: u32,
}

impl Default for CaptureSearch {
    fn default() -> Self {
        Self {
            lambda: Complex64::new(1.0, 0.0),
            window: crate::grid::Window::centered(2.5),
            coarse_step: 0.05,
            fine_step: 0.01,
            fine_radius: 4,
            eps_sequence: vec![1e-2, 1e-3, 1e-4],
            max_period: CENSUS_PERIOD_MAX,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaptureSearchLog {
    pub coarse_points: usize,
    pub candidates: Vec<Complex64>,
    pub refined_points: usize,
    /// Smallest final gap seen over all matched pairs, with its map.
    pub best_gap: Option<(Complex64, f64)>,
    pub witness_b: Option<Complex64>,
    pub report: Option<PersistenceReport>,
}

/// Scans the coarse grid for capture-type candidates, then refines around
/// each candidate until a map with a Cauchy co-landing pair is found.
pub fn search_persistent_cutpoints(
    search: &CaptureSearch,
    params: RayParams,
    budgets: &Budgets,
) -> Result<CaptureSearchLog> {
    let w = search.window;
    let nx = (w.width() / search.coarse_step).round() as usize;
    let ny = (w.height() / search.coarse_step).round() as usize;
    let first_eps = search.eps_sequence[0];
    let coarse: Vec<Complex64> = (0..nx * ny)
        .map(|k| {
            Complex64::new(
                w.x0 + search.coarse_step * ((k / ny) as f64 + 0.5),
                w.y0 + search.coarse_step * ((k % ny) as f64 + 0.5),
            )
        })
        .collect();
    let flags: Vec<bool> = coarse
        .par_iter()
        .map(|&b| perturbation_is_capture(&CubicMap::new(search.lambda, b), first_eps, budgets))
        .collect::<Result<_>>()?;
    let candidates: Vec<Complex64> = coarse
        .iter()
        .zip(&flags)
        .filter(|(_, &c)| c)
        .map(|(&b, _)| b)
        .collect();
    let mut log = CaptureSearchLog {
        coarse_points: coarse.len(),
        candidates: candidates.clone(),
        refined_points: 0,
        best_gap: None,
        witness_b: None,
        report: None,
    };
    let r = search.fine_radius;
    for &centre in &candidates {
        for i in -r..=r {
            for j in -r..=r {
                let b = centre + Complex64::new(i as f64, j as f64) * search.fine_step;
                let f = CubicMap::new(search.lambda, b);
                log.refined_points += 1;
                if !perturbation_is_capture(&f, first_eps, budgets)? {
                    continue;
                }
                let report = match cutpoint_persistence(
                    &f,
                    &search.eps_sequence,
                    search.max_period,
                    params,
                    budgets,
                ) {
                    Ok(rep) => rep,
                    Err(Error::Precondition(_)) => continue,
                    Err(e) => return Err(e),
                };
                for m in &report.matched {
                    if log.best_gap.map_or(true, |(_, g)| m.final_gap < g) {
                        log.best_gap = Some((b, m.final_gap));
                    }
                }
                if report.witnesses > 0 {
                    log.witness_b = Some(b);
                    log.report = Some(report);
                    return Ok(log);
                }
            }
        }
    }
    Ok(log)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn angle_arithmetic() {
        let a = RationalAngle::new(1, 8);
        assert_eq!(a.triple(), RationalAngle::new(3, 8));
        assert_eq!(a.triple().triple(), a);
        assert_eq!(a.period(), Some(2));
        assert_eq!(RationalAngle::new(2, 8), RationalAngle::new(1, 4));
        assert_eq!(RationalAngle::new(4, 8).to_string(), "1/2");
        assert!((RationalAngle::new(5, 26).fraction_after(2) - 45.0 / 26.0 % 1.0).abs() < 1e-15);
    }

    #[test]
    fn periodic_angle_sets() {
        let one = exact_period_angles(1).unwrap();
        assert_eq!(one, vec![RationalAngle::new(0, 1), RationalAngle::new(1, 2)]);
        let two = exact_period_angles(2).unwrap();
        let expected: Vec<_> = [1, 2, 3, 5, 6, 7].iter().map(|&p| RationalAngle::new(p, 8)).collect();
        assert_eq!(two, expected);
        assert_eq!(periodic_angles(3).unwrap().len(), 26);
        assert_eq!(exact_period_angles(3).unwrap().len(), 24);
        assert!(periodic_angles(13).is_err());
    }

    #[test]
    fn green_of_cube() {
        let f = CubicMap::from_parts(0., 0., 0., 0.);
        let z = Complex64::from_polar(std::f64::consts::E, 0.3);
        assert!((green(&f, z, 100) - 1.0).abs() < 1e-12);
        assert_eq!(green(&f, c(0.5, 0.2), 100), 0.0);
    }

    #[test]
    fn cube_rays_land_at_roots_of_unity() {
        let f = CubicMap::from_parts(0., 0., 0., 0.);
        let r0 = trace_ray(&f, RationalAngle::new(0, 2), RayParams::default());
        assert_eq!(r0.status, RayStatus::Landed);
        assert!((r0.landing.unwrap() - 1.0).norm() < 1e-6);
        let r1 = trace_ray(&f, RationalAngle::new(1, 2), RayParams::default());
        assert_eq!(r1.status, RayStatus::Landed);
        assert!((r1.landing.unwrap() + 1.0).norm() < 1e-6);
        // points follow the radial line
        for z in &r0.points {
            assert!(z.im.abs() < 1e-9 && z.re > 0.999);
        }
    }

    #[test]
    fn ray_zero_of_symmetric_map_lands_at_repelling_fixed_point() {
        let f = CubicMap::from_parts(0.5, 0., 0., 0.);
        let r = trace_ray(&f, RationalAngle::new(0, 2), RayParams::default());
        assert_eq!(r.status, RayStatus::Landed);
        let x = r.landing.unwrap();
        assert!((x - 0.5f64.sqrt()).norm() < 1e-6, "{x}");
        assert!((f.derivative(x) - 2.0).norm() < 1e-5);
    }

    #[test]
    fn green_decreases_along_ray() {
        let f = CubicMap::from_parts(0.2, 0.1, 0.6, -0.3);
        let r = trace_ray(&f, RationalAngle::new(3, 8), RayParams::default());
        let g: Vec<f64> = r.points.iter().map(|&z| green(&f, z, 10_000)).collect();
        for w in g.windows(2) {
            assert!(w[1] < w[0]);
        }
        // one level halves the potential
        for k in (0..g.len().saturating_sub(33)).step_by(32).take(10) {
            let ratio = g[k + 32] / g[k];
            assert!((ratio - 0.5).abs() < 0.025, "{ratio}");
        }
    }

    #[test]
    fn cube_census_is_empty() {
        let f = CubicMap::from_parts(0., 0., 0., 0.);
        let census = colanding_census(&f, 3, RayParams::default()).unwrap();
        assert_eq!(census.traced, 2 + 6 + 24);
        assert_eq!(census.landed, census.traced);
        assert!(census.pairs.is_empty());
    }

    #[test]
    fn census_rejects_deep_periods() {
        let f = CubicMap::from_parts(0., 0., 0., 0.);
        assert!(colanding_census(&f, 5, RayParams::default()).is_err());
    }

    #[test]
    fn odd_map_rays_are_symmetric() {
        let f = CubicMap::from_parts(0.3, 0.2, 0., 0.);
        for p in [1u64, 3, 5] {
            let a = RationalAngle::new(p, 8);
            let b = RationalAngle::new(p + 4, 8);
            let (ra, rb) = (trace_ray(&f, a, RayParams::default()), trace_ray(&f, b, RayParams::default()));
            if let (Some(x), Some(y)) = (ra.landing, rb.landing) {
                assert!((x + y).norm() < 1e-6);
            }
        }
    }
}
