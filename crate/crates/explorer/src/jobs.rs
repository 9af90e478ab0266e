//! Serializable job descriptions and the computations behind every CLI
//! subcommand and HTTP endpoint.

use std::fs;
use std::path::{Path, PathBuf};

use cubiclab::basin::{basin_raster, default_dynamic_window};
use cubiclab::classify::{classify, Budgets, ComponentType};
use cubiclab::grid::{Resolution, Window};
use cubiclab::petal::{
    check_petal_properties, parabolic_germ, petal_outline, rotation_number, PetalCheckReport, RotationNumber,
};
use cubiclab::rays::{census_angles, census_from_traces, trace_ray, Census, RayParams, RayStatus};
use cubiclab::slice::{
    classify_component, compute_slice, component_plane, extract_components, flag, topological_hull, ComponentReport,
    HullStatus, SliceConfig, SliceRaster,
};
use cubiclab::tile::{SliceSidecar, Tile};
use cubiclab::{Complex64, CubicMap, Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Largest `q` tried when detecting a rational rotation.
pub const PETAL_Q_MAX: u32 = 64;
/// Polyline vertices per petal outline.
pub const OUTLINE_POINTS: usize = 96;
/// Vertices kept per ray polyline.
pub const RAY_POINTS: usize = 160;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum JobConfig {
    Slice(SliceJob),
    Classify(PointJob),
    Petal(PetalJob),
    Rays(RaysJob),
    Hull(HullJob),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceJob {
    pub lambda: Complex64,
    pub window: Window,
    pub resolution: u32,
    pub budgets: Budgets,
    pub closure_eps: f64,
    /// Samples per component; 0 skips component classification.
    pub component_samples: usize,
    pub out: PathBuf,
}

impl SliceJob {
    pub fn config(&self) -> Result<SliceConfig> {
        let resolution = Resolution::square(self.resolution)?;
        let mut c = SliceConfig::new(self.lambda)
            .with_window(self.window)
            .with_budgets(self.budgets);
        c.resolution = resolution;
        c.closure_eps = self.closure_eps;
        c.validate()?;
        Ok(c)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointJob {
    pub lambda: Complex64,
    pub b: Complex64,
    pub budgets: Budgets,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PetalJob {
    pub lambda: Complex64,
    pub b: Complex64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RaysJob {
    pub lambda: Complex64,
    pub b: Complex64,
    pub max_period: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HullJob {
    pub input: PathBuf,
    pub out: PathBuf,
    /// One of `m3`, `phd`, `p-closure`, `hull`.
    pub layer: String,
}

pub fn validate_lambda(lambda: Complex64) -> Result<()> {
    let m = lambda.norm();
    if !m.is_finite() || m > 1.0 + 1e-12 {
        return Err(Error::MultiplierOutsideDisk(m));
    }
    Ok(())
}

pub fn validate_point(lambda: Complex64, b: Complex64) -> Result<()> {
    validate_lambda(lambda)?;
    if !(b.re.is_finite() && b.im.is_finite()) {
        return Err(Error::Precondition("b must be finite".into()));
    }
    Ok(())
}

pub fn layer_bit(name: &str) -> Result<u8> {
    match name {
        "m3" => Ok(flag::IN_M3),
        "phd" => Ok(flag::IN_PHD),
        "p-closure" | "p_closure" => Ok(flag::IN_P_CLOSURE),
        "hull" => Ok(flag::IN_HULL),
        other => Err(Error::Precondition(format!(
            "unknown layer {other:?}; expected m3, phd, p-closure or hull"
        ))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceOutput {
    pub job: JobConfig,
    pub tile: SliceSidecar,
    pub counts: LayerCounts,
    pub components: Vec<ComponentReport>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerCounts {
    pub pixels: usize,
    pub in_m3: usize,
    pub in_phd: usize,
    pub in_p_closure: usize,
    pub in_hull: usize,
}

impl LayerCounts {
    pub fn of(r: &SliceRaster) -> Self {
        Self {
            pixels: r.flags.len(),
            in_m3: r.count(flag::IN_M3),
            in_phd: r.count(flag::IN_PHD),
            in_p_closure: r.count(flag::IN_P_CLOSURE),
            in_hull: r.count(flag::IN_HULL),
        }
    }
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// Computes the slice, writes the tile and its JSON sidecar.
pub fn run_slice(job: &SliceJob) -> Result<SliceOutput> {
    let raster = compute_slice(&job.config()?)?;
    let components = if job.component_samples > 0 {
        extract_components(&raster)
            .iter()
            .map(|c| classify_component(&raster, c, job.component_samples, &job.budgets))
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };
    let output = SliceOutput {
        job: JobConfig::Slice(job.clone()),
        tile: SliceSidecar::of(&raster),
        counts: LayerCounts::of(&raster),
        components,
    };
    fs::write(&job.out, Tile::from(&raster).encode())?;
    write_json(&sidecar_path(&job.out), &output)?;
    Ok(output)
}

pub fn slice_tile(config: &SliceConfig) -> Result<Vec<u8>> {
    Ok(Tile::from(&compute_slice(config)?).encode())
}

/// Fate raster of the dynamical plane around the fixed point 0.
pub fn dynamics_tile(lambda: Complex64, b: Complex64, resolution: u32, budget: usize) -> Result<Vec<u8>> {
    validate_point(lambda, b)?;
    let f = CubicMap::new(lambda, b);
    let r = basin_raster(
        &f,
        Complex64::new(0.0, 0.0),
        default_dynamic_window(&f),
        Resolution::square(resolution)?,
        budget,
    )?;
    Ok(Tile::from_dynamics(lambda, &r).encode())
}

pub fn run_classify(job: &PointJob) -> Result<ComponentType> {
    validate_point(job.lambda, job.b)?;
    classify(&CubicMap::new(job.lambda, job.b), &job.budgets)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorReport {
    pub index: usize,
    pub image_sector: usize,
    pub repelling_angle: f64,
    pub check: PetalCheckReport,
    /// Closed polyline `[re, im]` starting and ending at the origin.
    pub outline: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PetalReport {
    pub lambda: Complex64,
    pub b: Complex64,
    pub rotation: RotationNumber,
    pub m: usize,
    pub a: Complex64,
    pub depth: f64,
    pub disk_radius: f64,
    pub violations: usize,
    pub sectors: Vec<SectorReport>,
}

pub fn run_petal(job: &PetalJob) -> Result<PetalReport> {
    validate_point(job.lambda, job.b)?;
    let f = CubicMap::new(job.lambda, job.b);
    let rotation = rotation_number(job.lambda, PETAL_Q_MAX)?.ok_or_else(|| {
        Error::Precondition(format!("λ is not a root of unity of order ≤ {PETAL_Q_MAX}"))
    })?;
    let spec = parabolic_germ(&f, rotation)?;
    let sectors: Vec<SectorReport> = (0..spec.m)
        .into_par_iter()
        .map(|k| {
        let s = spec.with_sector(k);
        SectorReport {
            index: k,
            image_sector: s.image_sector(),
            repelling_angle: s.repelling_angle(k),
            check: check_petal_properties(&f, &s, job.samples),
            outline: petal_outline(&s, OUTLINE_POINTS).iter().map(|z| [z.re, z.im]).collect(),
        }
    })
        .collect();
    Ok(PetalReport {
        lambda: job.lambda,
        b: job.b,
        rotation,
        m: spec.m,
        a: spec.a,
        depth: spec.depth,
        disk_radius: spec.disk_radius,
        violations: sectors.iter().map(|s| s.check.violation_count()).sum(),
        sectors,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayPolyline {
    pub angle: String,
    pub status: RayStatus,
    pub landing: Option<Complex64>,
    /// Vertices `[re, im]` from far out toward the landing point, thinned to
    /// at most [`RAY_POINTS`].
    pub points: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RaysReport {
    pub lambda: Complex64,
    pub b: Complex64,
    pub census: Census,
    pub rays: Vec<RayPolyline>,
}

pub fn run_rays(job: &RaysJob) -> Result<RaysReport> {
    let angles = census_angles(job.max_period)?;
    validate_point(job.lambda, job.b)?;
    let f = CubicMap::new(job.lambda, job.b);
    let params = RayParams::default();
    let traces: Vec<_> = angles.par_iter().map(|&a| trace_ray(&f, a, params)).collect();
    let census = census_from_traces(&f, job.max_period, &traces);
    let rays = traces
        .iter()
        .map(|t| {
            let stride = t.points.len().div_ceil(RAY_POINTS).max(1);
            let mut points: Vec<[f64; 2]> = t.points.iter().step_by(stride).map(|z| [z.re, z.im]).collect();
            if let Some(z) = t.landing.or(t.points.last().copied()) {
                points.push([z.re, z.im]);
            }
            RayPolyline {
                angle: t.angle.to_string(),
                status: t.status,
                landing: t.landing,
                points,
            }
        })
        .collect();
    Ok(RaysReport {
        lambda: job.lambda,
        b: job.b,
        census,
        rays,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HullOutput {
    pub job: JobConfig,
    pub hull_pixels: usize,
    pub components: usize,
    pub content_hash: String,
}

/// Recomputes the hull of a stored slice tile from one of its layers.
pub fn run_hull(job: &HullJob) -> Result<HullOutput> {
    let bit = layer_bit(&job.layer)?;
    let tile = Tile::decode(&fs::read(&job.input)?)?;
    let mut config = SliceConfig::new(tile.lambda).with_window(tile.window);
    config.resolution = tile.resolution;
    let raster = SliceRaster {
        config,
        flags: tile.flags,
        component_ids: tile.component_ids,
        hull_status: HullStatus::Computed,
    };
    let mut hulled = topological_hull(&raster, bit)?;
    let comps = extract_components(&hulled);
    hulled.component_ids = component_plane(&hulled, &comps);
    let out = Tile::from(&hulled);
    fs::write(&job.out, out.encode())?;
    Ok(HullOutput {
        job: JobConfig::Hull(job.clone()),
        hull_pixels: hulled.count(flag::IN_HULL),
        components: comps.len(),
        content_hash: out.content_hash(),
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    fs::write(path, text + "\n")?;
    Ok(())
}
