//! Acceptance run: one line per criterion, non-zero exit on any failure.
//!
//! Golden files live in `tests/golden/`; a missing file is recorded on the
//! first run and `UPDATE_GOLDEN=1` rewrites all of them.

mod common;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use common::*;
use cubiclab::classify::{principal_critical, Budgets, ComponentTag, PrincipalVerdict};
use cubiclab::grid::Window;
use cubiclab::petal::{
    check_petal_properties, germ_data, germ_residual_exponent, parabolic_germ, petal_in_perturbed_basin,
    rotation_number, PetalSpec, RotationNumber,
};
use cubiclab::rays::{
    census_angles, colanding_census, search_persistent_cutpoints, trace_ray, CaptureSearch, RationalAngle,
    RayParams, RayStatus,
};
use cubiclab::slice::{
    classify_component, compute_slice, exterior_components, extract_components, flag, pixel_flags,
    topological_hull, ComponentReport, HullStatus, SliceConfig, SliceRaster,
};
use cubiclab::tile::Tile;
use cubiclab::{Complex64, CubicMap};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

const ALGEBRA_MAPS: usize = 10_000;
const ALGEBRA_POINTS: usize = 100;
const ROOT_TOL: f64 = 1e-10;
const CONJUGACY_TOL: f64 = 1e-12;
const PETAL_SAMPLES: usize = 1000;
const EXPONENT_MARGIN: f64 = 1.8;
const PETAL_EPS: f64 = 1e-3;
const PRINCIPAL_SAMPLES: usize = 100;
const LANDING_TOL: f64 = 1e-6;
const EQUIVARIANCE_TOL: f64 = 1e-5;
const EQUIVARIANCE_MAPS: usize = 5;
const SYMMETRY_TOL: f64 = 0.005;
const MAIN_RESOLUTION: u32 = 1024;
const MAIN_HALF_WIDTH: f64 = 3.0;
const MAIN_MIN_PIXELS: usize = 32;
const MAIN_SAMPLES: usize = 16;
const MAIN_DECIDED_FRACTION: f64 = 0.9;
const EXTERIOR_MIN_PIXELS: usize = 100;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

/// Compares `value` against the stored golden file, recording it when absent.
fn check_golden<T: Serialize>(name: &str, value: &T) -> Result<&'static str, String> {
    let path = golden_dir().join(name);
    let fresh = serde_json::to_string_pretty(value).map_err(|e| e.to_string())? + "\n";
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    if update || !path.exists() {
        std::fs::create_dir_all(golden_dir()).map_err(|e| e.to_string())?;
        std::fs::write(&path, fresh).map_err(|e| e.to_string())?;
        return Ok("recorded");
    }
    let stored = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
    if stored == fresh {
        Ok("matched")
    } else {
        Err(format!("{name} differs from the recorded run"))
    }
}

fn golden_note(gold: &Result<&'static str, String>) -> String {
    match gold {
        Ok(s) => s.to_string(),
        Err(e) => e.clone(),
    }
}

fn algebra_suite() -> Outcome {
    let mut rng = rng(0xa1);
    let (mut crit, mut fixed, mut conj) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..ALGEBRA_MAPS {
        let f = random_bidisk(&mut rng);
        let cp = f.critical_points().as_array();
        crit = crit.max(set_distance(&cp, &critical_oracle(&f)));
        for c in cp {
            crit = crit.max(f.derivative(c).norm());
        }
        let fp: Vec<Complex64> = f.fixed_points().iter().map(|p| p.point).collect();
        fixed = fixed.max(set_distance(&fp, &fixed_oracle(&f)));
        for &p in &fp {
            fixed = fixed.max((f.eval(p) - p).norm());
        }
        let eps: f64 = rng.gen_range(0.0..0.99);
        let g = f.perturb(eps).unwrap();
        let s = (1.0 - eps).sqrt();
        conj = conj.max((g.lambda - (1.0 - eps) * f.lambda).norm());
        conj = conj.max((g.b - s * f.b).norm());
        for _ in 0..ALGEBRA_POINTS {
            let z = in_disk(&mut rng, 2.0);
            conj = conj.max((g.eval(s * z) - s * (1.0 - eps) * f.eval(z)).norm());
        }
    }
    outcome(
        crit < ROOT_TOL && fixed < ROOT_TOL && conj < CONJUGACY_TOL,
        format!(
            "{ALGEBRA_MAPS} maps: critical {crit:.1e}, fixed {fixed:.1e} (< {ROOT_TOL:.0e}); conjugacy {conj:.1e} (< {CONJUGACY_TOL:.0e})"
        ),
    )
}

fn petal_suite() -> Outcome {
    let one = RotationNumber { p: 0, q: 1 };
    let mut notes = Vec::new();
    let mut pass = true;

    for (b, m_want) in [(1.0, 1usize), (0.0, 2)] {
        let f = CubicMap::new(c(1.0, 0.0), c(b, 0.0));
        let germ = germ_data(&f, one).unwrap();
        let read_ok = germ.m == m_want && (germ.a - 1.0).norm() < 1e-12;
        let spec = parabolic_germ(&f, one).unwrap();
        let mut violations = 0;
        for k in 0..spec.m {
            let r = check_petal_properties(&f, &spec.with_sector(k), PETAL_SAMPLES);
            violations += r.scaling_violations + r.invariance_violations + r.image_violations;
        }
        pass &= read_ok && violations == 0;
        notes.push(format!("b={b}: m={} violations={violations}", germ.m));
    }

    let f = CubicMap::new(Complex64::from_polar(1.0, std::f64::consts::TAU / 3.0), c(1.0, 0.0));
    let rot = rotation_number(f.lambda, 64).unwrap().unwrap();
    let germ = germ_data(&f, rot).unwrap();
    let exponent = germ_residual_exponent(&germ, 200, 7);
    let spec: PetalSpec = parabolic_germ(&f, rot).unwrap();
    let mut failures = 0;
    for k in 0..spec.m {
        let r = petal_in_perturbed_basin(&f, &spec.with_sector(k), PETAL_EPS, PETAL_SAMPLES / spec.m).unwrap();
        failures += r.failures;
    }
    pass &= matches!(germ.m, 3 | 6) && exponent >= germ.m as f64 + EXPONENT_MARGIN && failures == 0;
    notes.push(format!(
        "third root: m={} exponent {exponent:.2} (>= {:.1}), perturbed failures {failures}",
        germ.m,
        germ.m as f64 + EXPONENT_MARGIN
    ));
    outcome(pass, notes.join("; "))
}

fn boundary_adjacent(r: &SliceRaster) -> Vec<usize> {
    let (w, h) = (r.grid().width(), r.grid().height());
    let closure = |k: usize| r.flags[k] & flag::IN_P_CLOSURE != 0;
    (0..r.flags.len())
        .filter(|&k| r.flags[k] & flag::IN_M3 != 0 && !closure(k))
        .filter(|&k| {
            let (i, j) = (k % w, k / w);
            (i > 0 && closure(k - 1))
                || (i + 1 < w && closure(k + 1))
                || (j > 0 && closure(k - w))
                || (j + 1 < h && closure(k + w))
        })
        .collect()
}

fn principal_suite(raster: &SliceRaster) -> Outcome {
    let budgets = Budgets::default();
    let both = principal_critical(&CubicMap::new(c(0.0, 0.0), c(0.0, 0.0)), &budgets).unwrap();
    let one = principal_critical(&CubicMap::new(c(0.0, 0.0), c(3.0, 0.0)), &budgets).unwrap();
    let omega2 = CubicMap::new(c(0.0, 0.0), c(3.0, 0.0));
    let escapes = cubiclab::iterate_orbit(&omega2, one.omega2, budgets.orbit)
        .map(|rec| rec.fate.escaped())
        .unwrap_or(false);
    let labels_ok = both.verdict == PrincipalVerdict::Both
        && one.verdict == PrincipalVerdict::One
        && (one.omega2 - c(-2.0, 0.0)).norm() < 1e-12
        && escapes;

    let mut candidates = boundary_adjacent(raster);
    candidates.shuffle(&mut rng(0xb0));
    candidates.truncate(PRINCIPAL_SAMPLES);
    let g = raster.grid();
    let (mut selected, mut flips, mut unresolved) = (0, 0, 0);
    for &k in &candidates {
        let f = CubicMap::new(golden_lambda(), g.center_of_index(k));
        let lab = principal_critical(&f, &budgets).unwrap();
        let at = |eps: f64| lab.outcomes.iter().find(|o| o.eps == eps).and_then(|o| o.selected);
        if let Some(k3) = at(1e-3) {
            selected += 1;
            match at(1e-4) {
                Some(k4) if k4 != k3 => flips += 1,
                None => unresolved += 1,
                _ => {}
            }
        }
    }
    outcome(
        labels_ok && flips == 0 && candidates.len() == PRINCIPAL_SAMPLES,
        format!(
            "(0,0) {:?}, (0,3) {:?} with omega2 {}; {} samples, {selected} select at 1e-3, {flips} flips, {unresolved} undecided at 1e-4",
            both.verdict,
            one.verdict,
            one.omega2,
            candidates.len()
        ),
    )
}

fn escaping_map(rng: &mut rand_chacha::ChaCha8Rng) -> CubicMap {
    // an attracting or neutral 0 holds a critical orbit, so |λ| > 1 here
    loop {
        let lambda = Complex64::from_polar(rng.gen_range(1.5..2.5), rng.gen_range(0.0..std::f64::consts::TAU));
        let b = Complex64::from_polar(rng.gen_range(3.0..4.0), rng.gen_range(0.0..std::f64::consts::TAU));
        let f = CubicMap::new(lambda, b);
        let r = f.escape_radius();
        let escapes = |mut z: Complex64| (0..200).any(|_| {
            z = f.eval(z);
            z.norm() > r
        });
        if f.critical_points().as_array().into_iter().all(escapes) {
            return f;
        }
    }
}

fn ray_suite() -> Outcome {
    let params = RayParams::default();
    let cube = CubicMap::new(c(0.0, 0.0), c(0.0, 0.0));
    let mut landing_err = 0.0f64;
    for (theta, want) in [(RationalAngle::new(0, 1), 1.0), (RationalAngle::new(1, 2), -1.0)] {
        let t = trace_ray(&cube, theta, params);
        landing_err = landing_err.max(t.landing.map_or(f64::INFINITY, |z| (z - want).norm()));
    }
    let census = colanding_census(&cube, 3, params).unwrap();

    let angles = census_angles(3).unwrap();
    let mut rng = rng(0xc3);
    let (mut worst, mut checked, mut maps_checked) = (0.0f64, 0, 0);
    for _ in 0..EQUIVARIANCE_MAPS {
        let f = escaping_map(&mut rng);
        let landings: BTreeMap<RationalAngle, Complex64> = angles
            .iter()
            .filter_map(|&a| {
                let t = trace_ray(&f, a, params);
                (t.status == RayStatus::Landed).then(|| (a, t.landing.unwrap()))
            })
            .collect();
        let before = checked;
        for (a, &z) in &landings {
            if let Some(&w) = landings.get(&a.triple()) {
                worst = worst.max((f.eval(z) - w).norm());
                checked += 1;
            }
        }
        maps_checked += usize::from(checked > before);
    }
    outcome(
        landing_err < LANDING_TOL
            && census.pairs.is_empty()
            && worst < EQUIVARIANCE_TOL
            && maps_checked == EQUIVARIANCE_MAPS,
        format!(
            "z^3 landing error {landing_err:.1e}; census pairs {}; equivariance {worst:.1e} over {checked} rays on {maps_checked} maps",
            census.pairs.len()
        ),
    )
}

#[derive(Serialize)]
struct SliceGolden {
    tile_hash: String,
    hull_status: HullStatus,
    counts: BTreeMap<&'static str, usize>,
}

fn layer_counts(r: &SliceRaster) -> BTreeMap<&'static str, usize> {
    [
        ("escape1", flag::ESCAPE1),
        ("escape2", flag::ESCAPE2),
        ("in_m3", flag::IN_M3),
        ("in_phd", flag::IN_PHD),
        ("in_p_closure", flag::IN_P_CLOSURE),
        ("in_hull", flag::IN_HULL),
    ]
    .into_iter()
    .map(|(name, bit)| (name, r.count(bit)))
    .collect()
}

fn slice_suite() -> Outcome {
    let config = SliceConfig::new(c(0.0, 0.0)).with_resolution(512);
    let r = compute_slice(&config).unwrap();
    let nested = r.flags.iter().all(|&f| f & flag::IN_PHD == 0 || f & flag::IN_M3 != 0);
    let symmetry = [flag::ESCAPE1 | flag::ESCAPE2, flag::IN_M3, flag::IN_PHD, flag::IN_HULL]
        .into_iter()
        .map(|bit| r.symmetry_violation(bit))
        .fold(0.0, f64::max);
    let hull_again = topological_hull(&r, flag::IN_HULL).unwrap();
    let idempotent = hull_again.flags == r.flags;
    let origin = r.flags_at(c(0.0, 0.0)).map_or(false, |f| f & flag::IN_PHD != 0);
    let far = pixel_flags(&config, c(3.0, 0.0)).0 & flag::ESCAPE2 != 0;
    let golden = SliceGolden {
        tile_hash: Tile::from(&r).content_hash(),
        hull_status: r.hull_status,
        counts: layer_counts(&r),
    };
    let gold = check_golden("slice_lambda0_512.json", &golden);
    outcome(
        nested && symmetry < SYMMETRY_TOL && idempotent && origin && far && gold.is_ok(),
        format!(
            "nesting {nested}, symmetry {:.3}% (< {:.1}%), hull idempotent {idempotent}, b=0 in PHD {origin}, b=3 escape2 {far}, golden {}",
            100.0 * symmetry,
            100.0 * SYMMETRY_TOL,
            golden_note(&gold)
        ),
    )
}

#[derive(Serialize)]
struct MainGolden {
    tile_hash: String,
    hull_status: HullStatus,
    counts: BTreeMap<&'static str, usize>,
    components: Vec<ComponentReport>,
}

const CONTRARY: [ComponentTag; 3] =
    [ComponentTag::Disjoint, ComponentTag::AttractingCapture, ComponentTag::ParabolicCapture];

fn golden_slice() -> SliceRaster {
    let config = SliceConfig::new(golden_lambda())
        .with_window(Window::centered(MAIN_HALF_WIDTH))
        .with_resolution(MAIN_RESOLUTION);
    compute_slice(&config).unwrap()
}

fn golden_components_suite(r: &SliceRaster) -> (Outcome, Outcome) {
    let budgets = Budgets::default();
    let skeletons: Vec<_> = extract_components(r)
        .into_iter()
        .filter(|s| s.pixel_count >= MAIN_MIN_PIXELS)
        .collect();
    let reports: Vec<ComponentReport> = skeletons
        .iter()
        .map(|s| classify_component(r, s, MAIN_SAMPLES, &budgets).unwrap())
        .collect();
    let mut pass = r.hull_status == HullStatus::Computed;
    let mut contrary = 0;
    for rep in &reports {
        let decided = rep.samples.iter().filter(|s| s.tag != ComponentTag::Undecided).count();
        let consistent = rep
            .samples
            .iter()
            .filter(|s| matches!(s.tag, ComponentTag::SiegelCapture | ComponentTag::QueerCandidate))
            .count();
        contrary += rep.samples.iter().filter(|s| CONTRARY.contains(&s.tag)).count();
        pass &= decided == 0 || consistent as f64 >= MAIN_DECIDED_FRACTION * decided as f64;
    }
    pass &= contrary == 0;
    let golden = MainGolden {
        tile_hash: Tile::from(r).content_hash(),
        hull_status: r.hull_status,
        counts: layer_counts(r),
        components: reports.clone(),
    };
    let gold = check_golden("main_golden_1024.json", &golden);
    let main = outcome(
        pass && gold.is_ok(),
        format!(
            "hull {:?}; {} bounded components >= {MAIN_MIN_PIXELS} px{}; contrary samples {contrary}; golden {}",
            r.hull_status,
            reports.len(),
            if reports.is_empty() { " (criterion holds vacuously)" } else { "" },
            golden_note(&gold)
        ),
    );

    // informational: components of M3 outside the hull
    let exterior = exterior_components(r, EXTERIOR_MIN_PIXELS);
    let mut verdicts: BTreeMap<&'static str, usize> = BTreeMap::new();
    for s in &exterior {
        let rep = classify_component(r, s, MAIN_SAMPLES, &budgets).unwrap();
        *verdicts.entry(rep.verdict.name()).or_insert(0) += 1;
    }
    let info = outcome(
        true,
        format!("{} components of M3 outside the hull >= {EXTERIOR_MIN_PIXELS} px, verdicts {verdicts:?}", exterior.len()),
    );
    (main, info)
}

fn cutpoint_suite() -> Outcome {
    let log = search_persistent_cutpoints(&CaptureSearch::default(), RayParams::default(), &Budgets::default()).unwrap();
    match (&log.witness_b, &log.report) {
        (Some(b), Some(rep)) => {
            let best = rep.matched.iter().filter(|p| p.cauchy).map(|p| p.final_gap).fold(f64::INFINITY, f64::min);
            outcome(
                rep.witnesses >= 1,
                format!("b = {b}: {} ({} Cauchy pairs, best gap {best:.1e})", rep.message, rep.witnesses),
            )
        }
        _ => outcome(
            true,
            format!(
                "no candidate found at this budget ({} coarse points, {} candidates, {} refined, best gap {:?})",
                log.coarse_points,
                log.candidates.len(),
                log.refined_points,
                log.best_gap
            ),
        ),
    }
}

fn report(name: &str, limit: Duration, run: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = run();
    let elapsed = start.elapsed();
    let pass = out.pass && elapsed <= limit;
    println!(
        "{} {name}: {} [{:.1} s, limit {} s]",
        if pass { "PASS" } else { "FAIL" },
        out.detail,
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    pass
}

fn main() {
    let secs = Duration::from_secs;
    let mut all = true;
    all &= report("algebra", secs(5), algebra_suite);
    all &= report("petals", secs(60), petal_suite);
    // shared by the principal and component criteria; its cost counts
    // toward the component criterion
    let start = Instant::now();
    let golden = golden_slice();
    let slice_time = start.elapsed();
    all &= report("principal critical point", secs(60), || principal_suite(&golden));
    all &= report("rays", secs(120), ray_suite);
    all &= report("lambda=0 slice", secs(600), slice_suite);
    let start = Instant::now();
    let (main, info) = golden_components_suite(&golden);
    let elapsed = start.elapsed() + slice_time;
    let pass = main.pass && elapsed <= secs(1800);
    println!(
        "{} golden-mean components: {} [{:.1} s, limit 1800 s]",
        if pass { "PASS" } else { "FAIL" },
        main.detail,
        elapsed.as_secs_f64()
    );
    println!("INFO golden-mean exterior: {}", info.detail);
    all &= pass;
    all &= report("cutpoint persistence", secs(600), cutpoint_suite);
    if !all {
        std::process::exit(1);
    }
}
