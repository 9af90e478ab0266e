//! Dynamical classification of a single map: principal critical point,
//! Siegel disk probing, the component-type decision tree, and the scan for
//! neutral cycles.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basin::{cell_fate, default_dynamic_window, BasinAnswer, CellFate, LazyBasin};
use crate::cubic::CubicMap;
use crate::error::{Error, Result};
use crate::grid::Resolution;
use crate::orbit::{escape_time, iterate_orbit_with, Fate, OrbitConfig, Trap};
use crate::periodic::{group_cycles, periodic_points_up_to, Cycle};
use crate::petal::{in_any_petal, parabolic_germ, rotation_number};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Largest denominator tried when deciding whether a unimodular multiplier
/// is a root of unity.
pub const ROTATION_Q_MAX: u32 = 64;

/// Perturbation sizes used for maps with `|λ| = 1`.
pub const PRINCIPAL_EPS: [f64; 3] = [1e-2, 1e-3, 1e-4];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budgets {
    /// Iterations for critical orbits.
    pub orbit: usize,
    /// Iterations per cell of the dynamical sub-raster.
    pub dynamic: usize,
    pub dynamic_resolution: u32,
    /// Cells a single immediate-basin query may visit.
    pub max_cells: usize,
    /// Iterations per seed in the Siegel probe.
    pub siegel: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Self {
            orbit: 4096,
            dynamic: 512,
            dynamic_resolution: 256,
            max_cells: 16384,
            siegel: 2000,
        }
    }
}

impl Budgets {
    /// Budgets large enough to see convergence under `perturb(f, ε)`, whose
    /// contraction near the origin is only `1 − ε`.
    pub fn for_perturbation(&self, eps: f64) -> Budgets {
        let slow = (30.0 / eps).ceil() as usize;
        Budgets {
            orbit: self.orbit.max(slow),
            dynamic: self.dynamic.max(slow),
            ..*self
        }
    }
}

/// Whether each critical point of `f` lies in the immediate basin of the
/// attracting fixed point `target`.
pub fn critical_points_in_immediate_basin(
    f: &CubicMap,
    target: Complex64,
    budgets: &Budgets,
) -> Result<[BasinAnswer; 2]> {
    let res = Resolution::square(budgets.dynamic_resolution)?;
    let trap = Trap::around(f, target).ok_or(Error::NotAttracting {
        target,
        multiplier_abs: f.derivative(target).norm(),
    })?;
    let crit = f.critical_points().as_array();
    let converging = crit.map(|c| cell_fate(f, &trap, c, budgets.orbit) == CellFate::Target);
    let mut lazy: Option<LazyBasin> = None;
    let mut out = [BasinAnswer::Outside; 2];
    for k in 0..2 {
        if !converging[k] {
            continue;
        }
        if lazy.is_none() {
            lazy = Some(LazyBasin::new(f, target, default_dynamic_window(f), res, budgets.dynamic)?);
        }
        out[k] = lazy.as_mut().unwrap().contains(crit[k], budgets.max_cells);
    }
    Ok(out)
}

/// Both critical points in the immediate basin of one attracting fixed point.
pub fn in_principal_hyperbolic(f: &CubicMap, budgets: &Budgets) -> bool {
    f.fixed_points()
        .iter()
        .filter(|p| p.multiplier.norm() < 1.0)
        .any(|p| {
            critical_points_in_immediate_basin(f, p.point, budgets)
                .map(|a| a.iter().all(|x| x.is_inside()))
                .unwrap_or(false)
        })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum PrincipalVerdict {
    One,
    Both,
    Undecided,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsOutcome {
    /// `0` when the map itself was tested.
    pub eps: f64,
    pub in_basin: [BasinAnswer; 2],
    /// Index into `critical_points(f).as_array()` of the single critical
    /// point in the basin, mapped back from the perturbed map.
    pub selected: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalLabeling {
    pub omega1: Complex64,
    pub omega2: Complex64,
    pub verdict: PrincipalVerdict,
    pub eps_used: Vec<f64>,
    pub outcomes: Vec<EpsOutcome>,
}

fn outcome_for(f: &CubicMap, g: &CubicMap, eps: f64, budgets: &Budgets) -> EpsOutcome {
    let in_basin = critical_points_in_immediate_basin(g, ZERO, budgets)
        .unwrap_or([BasinAnswer::Unknown; 2]);
    let selected = match in_basin {
        [BasinAnswer::Inside, BasinAnswer::Outside] => Some(0),
        [BasinAnswer::Outside, BasinAnswer::Inside] => Some(1),
        _ => None,
    }
    .map(|k| {
        // g's critical points are s·(those of f); match the continuation
        let s = (1.0 - eps).sqrt();
        let cg = g.critical_points().as_array()[k] / s;
        let cf = f.critical_points().as_array();
        if (cf[0] - cg).norm() <= (cf[1] - cg).norm() {
            0
        } else {
            1
        }
    });
    EpsOutcome {
        eps,
        in_basin,
        selected,
    }
}

/// Labels the principal critical point `ω₁`: the one that stays in the
/// immediate basin of 0 when 0 is made attracting.
pub fn principal_critical(f: &CubicMap, budgets: &Budgets) -> Result<CriticalLabeling> {
    let modulus = f.lambda.norm();
    if modulus > 1.0 + 1e-12 {
        return Err(Error::MultiplierOutsideDisk(modulus));
    }
    let outcomes: Vec<EpsOutcome> = if modulus < 1.0 {
        vec![outcome_for(f, f, 0.0, budgets)]
    } else {
        PRINCIPAL_EPS
            .iter()
            .map(|&eps| {
                let g = f.perturb(eps)?;
                Ok(outcome_for(f, &g, eps, &budgets.for_perturbation(eps)))
            })
            .collect::<Result<_>>()?
    };
    let all_both = outcomes
        .iter()
        .all(|o| o.in_basin.iter().all(|a| a.is_inside()));
    let first = outcomes[0].selected;
    let all_one = first.is_some() && outcomes.iter().all(|o| o.selected == first);
    let crit = f.critical_points().as_array();
    let (verdict, k1) = if all_both {
        (PrincipalVerdict::Both, 0)
    } else if all_one {
        (PrincipalVerdict::One, first.unwrap())
    } else {
        (PrincipalVerdict::Undecided, 0)
    };
    Ok(CriticalLabeling {
        omega1: crit[k1],
        omega2: crit[1 - k1],
        verdict,
        eps_used: outcomes.iter().map(|o| o.eps).filter(|&e| e > 0.0).collect(),
        outcomes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiegelReport {
    /// Largest verified radius; `None` when not even `1e-6` verifies.
    pub radius: Option<f64>,
    /// `arg λ / 2π` in `[0, 1)`.
    pub rotation: f64,
    /// Empirical rotation number at the reported radius.
    pub measured_rotation: Option<f64>,
    pub seeds_per_radius: usize,
    pub iterations: usize,
}

const SIEGEL_SEEDS: usize = 8;
const SIEGEL_MIN_RADIUS: f64 = 1e-6;
const ROTATION_TOL: f64 = 1e-3;

fn circular_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// Empirical rotation number of an orbit around 0 when it stays within
/// `[r/4, 4r]`; `None` once it leaves.
fn annulus_rotation(f: &CubicMap, z: Complex64, r: f64, n: usize) -> Option<f64> {
    let (lo, hi) = (r / 4.0, 4.0 * r);
    let mut w = z;
    let mut turns = 0.0;
    for _ in 0..n {
        let next = f.eval(w);
        let m = next.norm();
        if !(m >= lo && m <= hi) {
            return None;
        }
        turns += (next / w).arg();
        w = next;
    }
    Some((turns / (TAU * n as f64)).rem_euclid(1.0))
}

fn verify_radius(f: &CubicMap, r: f64, target: f64, n: usize) -> Option<f64> {
    let mut last = None;
    for k in 0..SIEGEL_SEEDS {
        let z = Complex64::from_polar(r, TAU * (k as f64 + 0.25) / SIEGEL_SEEDS as f64);
        let rho = annulus_rotation(f, z, r, n)?;
        if circular_gap(rho, target) >= ROTATION_TOL {
            return None;
        }
        last = Some(rho);
    }
    last
}

/// Estimates the inner radius of the Siegel disk around 0 by bisection on
/// circles of seeds.
pub fn siegel_probe(f: &CubicMap, budget: usize) -> Result<SiegelReport> {
    if let Some(rot) = rotation_number(f.lambda, ROTATION_Q_MAX)? {
        return Err(Error::RationalRotation {
            p: rot.p,
            q: rot.q,
        });
    }
    let target = (f.lambda.arg() / TAU).rem_euclid(1.0);
    let mut report = SiegelReport {
        radius: None,
        rotation: target,
        measured_rotation: None,
        seeds_per_radius: SIEGEL_SEEDS,
        iterations: budget,
    };
    let Some(mut measured) = verify_radius(f, SIEGEL_MIN_RADIUS, target, budget) else {
        return Ok(report);
    };
    let mut lo = SIEGEL_MIN_RADIUS;
    let mut hi = f.filled_julia_bound();
    if let Some(m) = verify_radius(f, hi, target, budget) {
        lo = hi;
        measured = m;
    } else {
        for _ in 0..24 {
            let mid = (lo * hi).sqrt();
            match verify_radius(f, mid, target, budget) {
                Some(m) => {
                    lo = mid;
                    measured = m;
                }
                None => hi = mid,
            }
            if hi / lo < 1.001 {
                break;
            }
        }
    }
    report.radius = Some(lo);
    report.measured_rotation = Some(measured);
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ComponentTag {
    Disjoint,
    AttractingCapture,
    ParabolicCapture,
    SiegelCapture,
    QueerCandidate,
    NotInM3,
    InPHD,
    Undecided,
}

impl ComponentTag {
    pub const ALL: [ComponentTag; 8] = [
        ComponentTag::Disjoint,
        ComponentTag::AttractingCapture,
        ComponentTag::ParabolicCapture,
        ComponentTag::SiegelCapture,
        ComponentTag::QueerCandidate,
        ComponentTag::NotInM3,
        ComponentTag::InPHD,
        ComponentTag::Undecided,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ComponentTag::Disjoint => "Disjoint",
            ComponentTag::AttractingCapture => "AttractingCapture",
            ComponentTag::ParabolicCapture => "ParabolicCapture",
            ComponentTag::SiegelCapture => "SiegelCapture",
            ComponentTag::QueerCandidate => "QueerCandidate",
            ComponentTag::NotInM3 => "NotInM3",
            ComponentTag::InPHD => "InPHD",
            ComponentTag::Undecided => "Undecided",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub escape_step: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub principal: Option<PrincipalVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega1: Option<Complex64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega2: Option<Complex64>,
    /// Attracting cycle of `ω₂` for disjoint-type maps.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cycle_point: Option<Complex64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cycle_period: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub capture_time: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub petal_sector: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub siegel_radius: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentType {
    pub tag: ComponentTag,
    pub evidence: Evidence,
}

impl ComponentType {
    fn new(tag: ComponentTag, evidence: Evidence) -> Self {
        Self { tag, evidence }
    }
}

/// Runs the decision tree for one map.
pub fn classify(f: &CubicMap, budgets: &Budgets) -> Result<ComponentType> {
    let modulus = f.lambda.norm();
    if modulus > 1.0 + 1e-12 {
        return Err(Error::MultiplierOutsideDisk(modulus));
    }
    let mut ev = Evidence::default();

    let crit = f.critical_points().as_array();
    if let Some(step) = crit.iter().filter_map(|&c| escape_time(f, c, budgets.orbit)).min() {
        ev.escape_step = Some(step);
        return Ok(ComponentType::new(ComponentTag::NotInM3, ev));
    }

    let labeling = principal_critical(f, budgets)?;
    ev.principal = Some(labeling.verdict);
    ev.omega1 = Some(labeling.omega1);
    ev.omega2 = Some(labeling.omega2);
    match labeling.verdict {
        PrincipalVerdict::Both => return Ok(ComponentType::new(ComponentTag::InPHD, ev)),
        PrincipalVerdict::Undecided => {
            ev.notes.push("principal critical point undecided".into());
            return Ok(ComponentType::new(ComponentTag::Undecided, ev));
        }
        PrincipalVerdict::One => {}
    }
    let omega2 = labeling.omega2;

    let cfg = OrbitConfig::new(budgets.orbit).with_zero_trap(f).recording();
    let orbit = iterate_orbit_with(f, omega2, &cfg);
    match orbit.fate {
        Fate::AttractedToPoint { point, period } if !(period == 1 && point.norm() < 1e-6) => {
            ev.cycle_point = Some(point);
            ev.cycle_period = Some(period);
            return Ok(ComponentType::new(ComponentTag::Disjoint, ev));
        }
        Fate::Escaped => {
            ev.escape_step = Some(orbit.steps_used);
            return Ok(ComponentType::new(ComponentTag::NotInM3, ev));
        }
        _ => {}
    }

    if modulus < 1.0 {
        if !orbit.fate.converges_to_zero() {
            ev.notes.push("ω₂ orbit undecided within budget".into());
            return Ok(ComponentType::new(ComponentTag::Undecided, ev));
        }
        let res = Resolution::square(budgets.dynamic_resolution)?;
        let mut lazy = LazyBasin::new(f, ZERO, default_dynamic_window(f), res, budgets.dynamic)?;
        let mut unknown = false;
        for (k, &z) in orbit.points.iter().enumerate() {
            match lazy.contains(z, budgets.max_cells) {
                BasinAnswer::Inside if !unknown => {
                    ev.capture_time = Some(k);
                    return Ok(ComponentType::new(ComponentTag::AttractingCapture, ev));
                }
                BasinAnswer::Inside => break,
                BasinAnswer::Unknown => unknown = true,
                BasinAnswer::Outside => {}
            }
        }
        ev.notes.push("capture time not resolved on the sub-raster".into());
        return Ok(ComponentType::new(ComponentTag::Undecided, ev));
    }

    if let Some(rot) = rotation_number(f.lambda, ROTATION_Q_MAX)? {
        match parabolic_germ(f, rot) {
            Ok(spec) => {
                for (k, &z) in orbit.points.iter().enumerate() {
                    if let Some(sector) = in_any_petal(&spec, z) {
                        ev.capture_time = Some(k);
                        ev.petal_sector = Some(sector);
                        return Ok(ComponentType::new(ComponentTag::ParabolicCapture, ev));
                    }
                }
            }
            Err(e) => ev.notes.push(format!("petal data unavailable: {e}")),
        }
    } else {
        let probe = siegel_probe(f, budgets.siegel)?;
        ev.siegel_radius = probe.radius;
        if let Some(r) = probe.radius {
            if let Some(k) = orbit.points.iter().position(|z| z.norm() < r) {
                ev.capture_time = Some(k);
                return Ok(ComponentType::new(ComponentTag::SiegelCapture, ev));
            }
        }
    }

    ev.notes.push("ω₂ bounded and not captured within budget".into());
    Ok(ComponentType::new(ComponentTag::QueerCandidate, ev))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeutralScan {
    pub period_max: u32,
    pub cycles: Vec<Cycle>,
    /// Roots the finder did not converge on, per period.
    pub unconverged: Vec<usize>,
}

pub const NEUTRAL_PERIOD_MAX: u32 = 6;
const NEUTRAL_BAND: f64 = 1e-4;

/// Cycles of period up to `period_max` with `|μ|` within `1e-4` of 1,
/// excluding the origin.
pub fn neutral_cycle_scan(f: &CubicMap, period_max: u32) -> Result<NeutralScan> {
    if period_max > NEUTRAL_PERIOD_MAX {
        return Err(Error::PeriodCap {
            got: period_max,
            max: NEUTRAL_PERIOD_MAX,
        });
    }
    let by_period = periodic_points_up_to(f, period_max);
    let unconverged = by_period
        .iter()
        .map(|pts| pts.iter().filter(|p| !p.converged).count())
        .collect();
    let cycles = by_period
        .iter()
        .flat_map(|pts| group_cycles(f, pts))
        .filter(|c| (c.multiplier.norm() - 1.0).abs() <= NEUTRAL_BAND)
        .filter(|c| c.points.iter().all(|z| z.norm() > 1e-9))
        .fold(Vec::<Cycle>::new(), |mut acc, c| {
            // multiple roots show up once per multiplicity
            let dup = acc.iter().any(|d| {
                d.period == c.period && (d.points[0] - c.points[0]).norm() < 1e-6
            });
            if !dup {
                acc.push(c);
            }
            acc
        });
    Ok(NeutralScan {
        period_max,
        cycles,
        unconverged,
    })
}
