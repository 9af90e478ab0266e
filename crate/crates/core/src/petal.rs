//! Parabolic germs at the origin and their attracting petals.
//!
//! When `λ = exp(2πi p/q)` the `q`-th iterate has the form
//! `z + a z^{m+1} + O(z^{m+2})` with `m ∈ {q, 2q}`. In the coordinate
//! `w = z^{−m}` the return map is close to `w ↦ w − m a`, so the half-plane
//! `Re(w ā) < −M` pulled back into an attracting sector is a petal.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cubic::CubicMap;
use crate::error::{Error, Result};
use crate::orbit::{orbit_fate, Fate, OrbitConfig};
use crate::periodic::roots_of_iterate_minus_identity;
use crate::poly::{compose_q, PolyCoeffs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RotationNumber {
    pub p: u32,
    pub q: u32,
}

/// Detects `λ = exp(2πi p/q)` for the smallest `q ≤ q_max`.
///
/// Returns `Ok(None)` when no such `q` exists (irrational regime at this
/// depth) and an error when `λ` is not on the unit circle.
pub fn rotation_number(lambda: Complex64, q_max: u32) -> Result<Option<RotationNumber>> {
    let modulus = lambda.norm();
    if (modulus - 1.0).abs() > 1e-10 {
        return Err(Error::NotOnUnitCircle(modulus));
    }
    let mut power = Complex64::new(1.0, 0.0);
    for q in 1..=q_max {
        power *= lambda;
        if (power - 1.0).norm() < 1e-9 {
            let turns = lambda.arg() / TAU;
            let p = ((turns * q as f64).round() as i64).rem_euclid(q as i64) as u32;
            return Ok(Some(RotationNumber { p, q }));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PetalSpec {
    pub rotation: RotationNumber,
    /// Number of attracting petals, `q` or `2q`.
    pub m: usize,
    /// Leading coefficient of `f^{∘q}(z) − z`.
    pub a: Complex64,
    /// Half-plane depth `M`.
    pub depth: f64,
    pub disk_radius: f64,
    pub sector_index: usize,
}

impl PetalSpec {
    pub fn with_sector(mut self, sector_index: usize) -> Self {
        self.sector_index = sector_index % self.m;
        self
    }

    pub fn with_depth(mut self, depth: f64) -> Self {
        self.depth = depth;
        self
    }

    /// Sector the map `f` sends this petal's sector to.
    pub fn image_sector(&self) -> usize {
        let shift = self.rotation.p as usize * (self.m / self.rotation.q as usize);
        (self.sector_index + shift) % self.m
    }

    /// Argument of the repelling direction opening sector `k`.
    pub fn repelling_angle(&self, k: usize) -> f64 {
        (-self.a.arg() + TAU * k as f64) / self.m as f64
    }
}

/// Taylor coefficients of `f^{∘q}` and the parabolic data read from them.
pub fn parabolic_germ(f: &CubicMap, rot: RotationNumber) -> Result<PetalSpec> {
    let germ = germ_data(f, rot)?;
    let disk_radius = default_disk_radius(f, rot.q, germ.m);
    let mut spec = PetalSpec {
        rotation: rot,
        m: germ.m,
        a: germ.a,
        depth: 1.0,
        disk_radius,
        sector_index: 0,
    };
    spec.depth = default_depth(f, &spec);
    Ok(spec)
}

/// `(m, a)` together with the composed polynomial.
#[derive(Debug, Clone)]
pub struct GermData {
    pub m: usize,
    pub a: Complex64,
    pub coefficients: PolyCoeffs,
}

pub fn germ_data(f: &CubicMap, rot: RotationNumber) -> Result<GermData> {
    let q = rot.q;
    let residual = (f.lambda.powu(q) - 1.0).norm();
    if residual > 1e-9 {
        return Err(Error::NotParabolic { q, residual });
    }
    let poly = compose_q(f, q)?;
    let threshold = 1e-9 * poly.max_abs();
    let max_order = 2 * q as usize + 1;
    let k = (2..=max_order)
        .find(|&k| poly.coefficient(k).norm() > threshold)
        .ok_or(Error::DegenerateGerm { max_order })?;
    let m = k - 1;
    if m != q as usize && m != 2 * q as usize {
        return Err(Error::UnexpectedGermOrder { m, q });
    }
    Ok(GermData {
        m,
        a: poly.coefficient(k),
        coefficients: poly,
    })
}

/// Half the distance from 0 to the nearest other root of `f^{∘q}(z) = z`,
/// capped at 0.5. The `m + 1` roots nearest the origin belong to the
/// parabolic point itself and are skipped.
pub fn default_disk_radius(f: &CubicMap, q: u32, m: usize) -> f64 {
    let mut dists: Vec<f64> = roots_of_iterate_minus_identity(f, q)
        .iter()
        .map(|p| p.point.norm())
        .collect();
    dists.sort_by(f64::total_cmp);
    let nearest_other = dists.get(m + 1).copied().unwrap_or(1.0);
    (0.5 * nearest_other).min(0.5)
}

/// Smallest power of two `≥ 8/|a|` for which every sector passes the petal
/// property check on 10³ samples.
pub fn default_depth(f: &CubicMap, spec: &PetalSpec) -> f64 {
    let start = (8.0 / spec.a.norm()).log2().ceil();
    let mut depth = 2f64.powf(start);
    for _ in 0..48 {
        let candidate = spec.with_depth(depth);
        let ok = (0..spec.m).all(|k| {
            check_petal_properties(f, &candidate.with_sector(k), 1000).violation_count() == 0
        });
        if ok {
            return depth;
        }
        depth *= 2.0;
    }
    depth
}

/// The `m` unit vectors `v` with `a v^m > 0`.
pub fn repelling_vectors(spec: &PetalSpec) -> Vec<Complex64> {
    (0..spec.m)
        .map(|k| Complex64::from_polar(1.0, spec.repelling_angle(k)))
        .collect()
}

/// Position of `angle` inside sector `k` as a fraction of the sector width,
/// in `[0, 1)`.
fn sector_fraction(spec: &PetalSpec, angle: f64, k: usize) -> f64 {
    let width = TAU / spec.m as f64;
    let start = spec.repelling_angle(k);
    (angle - start).rem_euclid(TAU) / width
}

/// Membership in the petal of sector `spec.sector_index`. The origin belongs
/// to every petal; points on a repelling ray do not.
pub fn petal_membership(spec: &PetalSpec, z: Complex64) -> bool {
    if z == Complex64::new(0.0, 0.0) {
        return true;
    }
    if z.norm() >= spec.disk_radius {
        return false;
    }
    let frac = sector_fraction(spec, z.arg(), spec.sector_index);
    if !(frac > 0.0 && frac < 1.0) {
        return false;
    }
    let w = z.powi(-(spec.m as i32));
    (w * spec.a.conj()).re < -spec.depth
}

/// Membership in any of the `m` petals.
pub fn in_any_petal(spec: &PetalSpec, z: Complex64) -> Option<usize> {
    (0..spec.m).find(|&k| petal_membership(&spec.with_sector(k), z))
}

/// Closed polyline around the petal of `spec.sector_index`, starting and
/// ending at the origin. The petal is star-shaped about 0, so the boundary
/// is the half-plane curve `ā z^{-m} = −M + it` with its radius clipped to
/// the disk.
pub fn petal_outline(spec: &PetalSpec, n: usize) -> Vec<Complex64> {
    let n = n.max(8);
    let m = spec.m as f64;
    let k = spec.sector_index as f64;
    let mut out = Vec::with_capacity(n + 2);
    out.push(Complex64::new(0.0, 0.0));
    for s in 1..n {
        // ψ ∈ (−π/2, π/2) runs along the line Re u = −M.
        let psi = -FRAC_PI_2 + PI * s as f64 / n as f64;
        let u = Complex64::new(-spec.depth, spec.depth * psi.tan());
        let arg_u = u.arg().rem_euclid(TAU);
        let arg = (-spec.a.arg() - arg_u + TAU * (k + 1.0)) / m;
        let radius = (spec.a.norm() / u.norm()).powf(1.0 / m).min(spec.disk_radius);
        out.push(Complex64::from_polar(radius, arg));
    }
    out.push(Complex64::new(0.0, 0.0));
    out
}

/// Draws points of the petal. Half-plane points are drawn with a
/// log-uniform depth so the boundary is well represented.
pub fn sample_petal(spec: &PetalSpec, n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit_a = spec.a / spec.a.norm();
    let base = spec.depth / spec.a.norm();
    let width = TAU / spec.m as f64;
    let start = spec.repelling_angle(spec.sector_index);
    let mut out = Vec::with_capacity(n);
    let mut tries = 0usize;
    while out.len() < n && tries < 200 * n.max(1) {
        tries += 1;
        let s = 10f64.powf(rng.gen_range(0.0..3.0)) - 1.0;
        let t = rng.gen_range(-1.0..1.0) * 3.0 * (1.0 + s);
        // Re(w ā) = |a| Re(u) with u = w conj(â)
        let u = Complex64::new(-base * (1.0 + s) - 1e-12 * base, base * t);
        let w = unit_a * u;
        let modulus = w.norm().powf(-1.0 / spec.m as f64);
        let base_angle = -w.arg() / spec.m as f64;
        let z = (0..spec.m)
            .map(|k| base_angle + width * k as f64)
            .find(|&phi| {
                let frac = (phi - start).rem_euclid(TAU) / width;
                frac > 0.0 && frac < 1.0
            })
            .map(|phi| Complex64::from_polar(modulus, phi));
        if let Some(z) = z {
            if petal_membership(spec, z) {
                out.push(z);
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PetalProperty {
    /// `tP ⊂ P` for `t ∈ [0, 1]`.
    Scaling,
    /// `f^{∘q}(P) ⊂ P` and orbits drift to the origin.
    Invariance,
    /// `f(P)` lies in the petal of the image sector.
    Image,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PetalViolation {
    pub property: PetalProperty,
    pub z: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PetalCheckReport {
    pub samples: usize,
    pub sector_index: usize,
    pub depth: f64,
    pub scaling_violations: usize,
    pub invariance_violations: usize,
    pub image_violations: usize,
    /// At most 16 counterexamples are kept.
    pub counterexamples: Vec<PetalViolation>,
}

impl PetalCheckReport {
    pub fn violation_count(&self) -> usize {
        self.scaling_violations + self.invariance_violations + self.image_violations
    }
}

/// Steps of `f^{∘q}` followed when checking drift toward the origin.
const DRIFT_STEPS: usize = 64;

fn iterate_n(f: &CubicMap, z: Complex64, n: u32) -> Complex64 {
    (0..n).fold(z, |acc, _| f.eval(acc))
}

/// Samples the petal and checks the three petal properties on each sample.
pub fn check_petal_properties(f: &CubicMap, spec: &PetalSpec, n_samples: usize) -> PetalCheckReport {
    let samples = sample_petal(spec, n_samples, 0x5eed ^ spec.sector_index as u64);
    let q = spec.rotation.q;
    let image_spec = spec.with_sector(spec.image_sector());
    let drift_rate = spec.m as f64 * spec.a.norm_sqr();
    let mut report = PetalCheckReport {
        samples: samples.len(),
        sector_index: spec.sector_index,
        depth: spec.depth,
        scaling_violations: 0,
        invariance_violations: 0,
        image_violations: 0,
        counterexamples: Vec::new(),
    };
    let note = |report: &mut PetalCheckReport, property, z| {
        if report.counterexamples.len() < 16 {
            report.counterexamples.push(PetalViolation { property, z });
        }
    };

    for &z in &samples {
        if !(1..=9).all(|k| petal_membership(spec, z * (k as f64 / 10.0))) {
            report.scaling_violations += 1;
            note(&mut report, PetalProperty::Scaling, z);
        }

        let fatou = |z: Complex64| (z.powi(-(spec.m as i32)) * spec.a.conj()).re;
        let start = fatou(z);
        let mut w = z;
        let mut stayed = true;
        for _ in 0..DRIFT_STEPS {
            w = iterate_n(f, w, q);
            if !petal_membership(spec, w) {
                stayed = false;
                break;
            }
        }
        let drifted = stayed && fatou(w) <= start - 0.5 * DRIFT_STEPS as f64 * drift_rate;
        if !drifted {
            report.invariance_violations += 1;
            note(&mut report, PetalProperty::Invariance, z);
        }

        if !petal_membership(&image_spec, f.eval(z)) {
            report.image_violations += 1;
            note(&mut report, PetalProperty::Image, z);
        }
    }
    report
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbedBasinReport {
    pub eps: f64,
    pub samples: usize,
    pub failures: usize,
    pub failure_fraction: f64,
    pub budget: usize,
}

/// Iteration budget for orbits of `g_{f,ε}` near a parabolic point; the
/// contraction at the origin is only `1 − ε` per step.
pub fn perturbed_budget(eps: f64) -> usize {
    ((200.0 / eps) as usize).clamp(20_000, 5_000_000)
}

/// Fraction of sampled petal points that fail to converge to the origin
/// under `g = perturb(f, ε)`.
pub fn petal_in_perturbed_basin(
    f: &CubicMap,
    spec: &PetalSpec,
    eps: f64,
    n_samples: usize,
) -> Result<PerturbedBasinReport> {
    let g = f.perturb(eps)?;
    let budget = perturbed_budget(eps);
    let cfg = OrbitConfig::new(budget).with_zero_trap(&g);
    let samples = sample_petal(spec, n_samples, 0xba51 ^ spec.sector_index as u64);
    let failures = samples
        .iter()
        .filter(|&&z| {
            let (fate, _) = orbit_fate(&g, z, &cfg);
            !fate.converges_to_zero()
        })
        .count();
    Ok(PerturbedBasinReport {
        eps,
        samples: samples.len(),
        failures,
        failure_fraction: if samples.is_empty() {
            0.0
        } else {
            failures as f64 / samples.len() as f64
        },
        budget,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbedSweep {
    pub reports: Vec<PerturbedBasinReport>,
    /// Smallest tested ε whose failure fraction is zero.
    pub minimal_clean_eps: Option<f64>,
    /// Failure fraction never increases as ε decreases along the sweep.
    pub monotone: bool,
}

pub fn perturbed_basin_sweep(
    f: &CubicMap,
    spec: &PetalSpec,
    eps_values: &[f64],
    n_samples: usize,
) -> Result<PerturbedSweep> {
    let mut ordered = eps_values.to_vec();
    ordered.sort_by(|a, b| b.total_cmp(a));
    let reports = ordered
        .iter()
        .map(|&eps| petal_in_perturbed_basin(f, spec, eps, n_samples))
        .collect::<Result<Vec<_>>>()?;
    let monotone = reports
        .windows(2)
        .all(|w| w[1].failure_fraction <= w[0].failure_fraction);
    let minimal_clean_eps = reports
        .iter()
        .filter(|r| r.failures == 0)
        .map(|r| r.eps)
        .min_by(f64::total_cmp);
    Ok(PerturbedSweep {
        reports,
        minimal_clean_eps,
        monotone,
    })
}

/// Fitted exponent `e` in `|f^{∘q}(z) − z − a z^{m+1}| ~ |z|^e`, from the
/// composed coefficients at random points with `|z| ∈ [10⁻², 10⁻¹]`.
pub fn germ_residual_exponent(germ: &GermData, n_samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tail = PolyCoeffs::new(germ.coefficients.coefficients[germ.m + 2..].to_vec());
    let mut xs = Vec::with_capacity(n_samples);
    let mut ys = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let r = 10f64.powf(rng.gen_range(-2.0..-1.0));
        let z = Complex64::from_polar(r, rng.gen_range(0.0..TAU));
        // residual = z^{m+2} · tail(z)
        let residual = z.powi(germ.m as i32 + 2) * tail.eval(z);
        let value = residual.norm();
        if value > 0.0 {
            xs.push(r.ln());
            ys.push(value.ln());
        }
    }
    least_squares_slope(&xs, &ys)
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    if n < 2.0 {
        return f64::NAN;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Whether the orbit of `z` under `f` eventually lands in a petal;
/// returns the first such iterate index.
pub fn petal_capture_time(
    f: &CubicMap,
    spec: &PetalSpec,
    z: Complex64,
    budget: usize,
) -> Option<usize> {
    let radius = f.escape_radius();
    let mut w = z;
    for k in 0..=budget {
        if in_any_petal(spec, w).is_some() {
            return Some(k);
        }
        w = f.eval(w);
        if w.norm() >= radius {
            return None;
        }
    }
    None
}

/// Convergence of the orbit to the origin under the perturbed map; used by
/// the examples and the CLI report.
pub fn perturbed_fate(f: &CubicMap, eps: f64, z: Complex64) -> Result<Fate> {
    let g = f.perturb(eps)?;
    let cfg = OrbitConfig::new(perturbed_budget(eps)).with_zero_trap(&g);
    Ok(orbit_fate(&g, z, &cfg).0)
}
