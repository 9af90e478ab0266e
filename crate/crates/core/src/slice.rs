//! Parameter-plane slices at fixed `λ`: membership flags for the
//! connectedness locus, the principal hyperbolic domain and its closure, the
//! topological hull, and the bounded components of hull minus closure.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{classify, in_principal_hyperbolic, Budgets, ComponentTag};
use crate::cubic::CubicMap;
use crate::error::{Error, Result};
use crate::grid::{dilate4, distance_transform, fill_holes_with_exterior, label_components, PixelGrid, Resolution, Window};
use crate::orbit::escape_time;

/// Bits of the per-pixel flag byte.
pub mod flag {
    /// The `c₊` critical orbit escapes.
    pub const ESCAPE1: u8 = 1 << 0;
    /// The `c₋` critical orbit escapes.
    pub const ESCAPE2: u8 = 1 << 1;
    pub const IN_M3: u8 = 1 << 2;
    pub const IN_PHD: u8 = 1 << 3;
    pub const IN_P_CLOSURE: u8 = 1 << 4;
    pub const IN_HULL: u8 = 1 << 5;
}

/// Tolerance for treating `|λ|` as 1.
const UNIT_CIRCLE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SliceConfig {
    pub lambda: Complex64,
    pub window: Window,
    pub resolution: Resolution,
    pub budgets: Budgets,
    /// Perturbation used to seed the closure when `|λ| = 1`.
    pub closure_eps: f64,
}

impl SliceConfig {
    /// Window `[−2.5, 2.5]²` at 1024² with default budgets.
    pub fn new(lambda: Complex64) -> Self {
        Self {
            lambda,
            window: Window::centered(2.5),
            resolution: Resolution {
                width: 1024,
                height: 1024,
            },
            budgets: Budgets::default(),
            closure_eps: 1e-2,
        }
    }

    pub fn with_resolution(mut self, n: u32) -> Self {
        self.resolution = Resolution {
            width: n,
            height: n,
        };
        self
    }

    pub fn with_window(mut self, window: Window) -> Self {
        self.window = window;
        self
    }

    pub fn with_budgets(mut self, budgets: Budgets) -> Self {
        self.budgets = budgets;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.lambda.norm();
        if !(m <= 1.0 + UNIT_CIRCLE_TOL) {
            return Err(Error::MultiplierOutsideDisk(m));
        }
        self.window.validate()?;
        Resolution::new(self.resolution.width, self.resolution.height)?;
        if self.budgets.orbit == 0 || self.budgets.dynamic == 0 {
            return Err(Error::ZeroBudget);
        }
        if !(self.closure_eps > 0.0 && self.closure_eps < 1.0) {
            return Err(Error::InvalidPerturbation(self.closure_eps));
        }
        Ok(())
    }

    pub fn on_unit_circle(&self) -> bool {
        (self.lambda.norm() - 1.0).abs() <= UNIT_CIRCLE_TOL
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HullStatus {
    Computed,
    /// The closure touches the window border; `in_hull` equals the closure.
    WindowTooSmall,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceRaster {
    pub config: SliceConfig,
    pub flags: Vec<u8>,
    /// 0 outside every reported component.
    pub component_ids: Vec<u16>,
    pub hull_status: HullStatus,
}

impl SliceRaster {
    pub fn grid(&self) -> PixelGrid {
        PixelGrid::new(self.config.window, self.config.resolution)
    }

    pub fn lambda(&self) -> Complex64 {
        self.config.lambda
    }

    pub fn layer(&self, bit: u8) -> Vec<bool> {
        self.flags.iter().map(|&f| f & bit != 0).collect()
    }

    pub fn count(&self, bit: u8) -> usize {
        self.flags.iter().filter(|&&f| f & bit != 0).count()
    }

    pub fn flags_at(&self, b: Complex64) -> Option<u8> {
        let g = self.grid();
        g.locate(b).map(|(i, j)| self.flags[g.index(i, j)])
    }

    /// Fraction of pixels whose `bit` differs from the mirrored pixel.
    pub fn symmetry_violation(&self, bit: u8) -> f64 {
        let g = self.grid();
        let bad = (0..self.flags.len())
            .filter(|&k| (self.flags[k] & bit) != (self.flags[g.reflect_index(k)] & bit))
            .count();
        bad as f64 / self.flags.len() as f64
    }

    fn set_layer(&mut self, bit: u8, mask: &[bool]) {
        for (f, &m) in self.flags.iter_mut().zip(mask) {
            if m {
                *f |= bit;
            } else {
                *f &= !bit;
            }
        }
    }
}

/// Flags of a single parameter `b`, before closure and hull.
pub fn pixel_flags(config: &SliceConfig, b: Complex64) -> (u8, bool) {
    let f = CubicMap::new(config.lambda, b);
    let budgets = &config.budgets;
    let [c1, c2] = f.critical_points().as_array();
    let mut flags = 0u8;
    if escape_time(&f, c1, budgets.orbit).is_some() {
        flags |= flag::ESCAPE1;
    }
    if escape_time(&f, c2, budgets.orbit).is_some() {
        flags |= flag::ESCAPE2;
    }
    if flags != 0 {
        return (flags, false);
    }
    flags |= flag::IN_M3;
    if in_principal_hyperbolic(&f, budgets) {
        return (flags | flag::IN_PHD, true);
    }
    let seed = config.on_unit_circle()
        && f
            .perturb(config.closure_eps)
            .map(|g| in_principal_hyperbolic(&g, &budgets.for_perturbation(config.closure_eps)))
            .unwrap_or(false);
    (flags, seed)
}

/// Computes all flag layers for a slice.
///
/// The closure is the one-pixel cross dilation of the principal hyperbolic
/// pixels; on `|λ| = 1`, where that set is empty, pixels whose perturbation
/// `perturb(f, closure_eps)` is principal hyperbolic are added first.
pub fn compute_slice(config: &SliceConfig) -> Result<SliceRaster> {
    config.validate()?;
    let grid = PixelGrid::new(config.window, config.resolution);
    let (w, h) = (grid.width(), grid.height());
    let per_pixel: Vec<(u8, bool)> = (0..h)
        .into_par_iter()
        .flat_map_iter(|j| (0..w).map(move |i| pixel_flags(config, grid.center(i, j))))
        .collect();
    let flags: Vec<u8> = per_pixel.iter().map(|p| p.0).collect();
    let seed: Vec<bool> = per_pixel.iter().map(|p| p.1).collect();
    let closure = dilate4(&seed, w, h);
    let mut raster = SliceRaster {
        config: *config,
        flags,
        component_ids: vec![0; grid.len()],
        hull_status: HullStatus::Computed,
    };
    raster.set_layer(flag::IN_P_CLOSURE, &closure);
    match topological_hull(&raster, flag::IN_P_CLOSURE) {
        Ok(hulled) => raster = hulled,
        Err(Error::WindowTooSmall) => {
            raster.set_layer(flag::IN_HULL, &closure);
            raster.hull_status = HullStatus::WindowTooSmall;
        }
        Err(e) => return Err(e),
    }
    let comps = extract_components(&raster);
    raster.component_ids = component_plane(&raster, &comps);
    Ok(raster)
}

/// Sets `in_hull` to the layer `bit` together with its bounded
/// complementary components.
///
/// Escaping pixels are treated as connected to infinity: the escape locus
/// lies in the unbounded complementary component, so an escaping pixel
/// enclosed by the layer is a channel narrower than a pixel, not a hole.
pub fn topological_hull(raster: &SliceRaster, bit: u8) -> Result<SliceRaster> {
    let g = raster.grid();
    let escaping: Vec<bool> = raster
        .flags
        .iter()
        .map(|&f| f & (flag::ESCAPE1 | flag::ESCAPE2) != 0)
        .collect();
    let filled = fill_holes_with_exterior(&raster.layer(bit), &escaping, g.width(), g.height())?;
    let mut out = raster.clone();
    out.set_layer(flag::IN_HULL, &filled);
    out.hull_status = HullStatus::Computed;
    Ok(out)
}

/// Minimum size of a reported component.
pub const MIN_COMPONENT_PIXELS: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub i0: u32,
    pub j0: u32,
    pub i1: u32,
    pub j1: u32,
    /// Parameter-plane corners `(min re, min im)` and `(max re, max im)` of
    /// the pixel centers.
    pub b_min: Complex64,
    pub b_max: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentSkeleton {
    pub id: u16,
    pub pixel_count: usize,
    pub bbox: BoundingBox,
    #[serde(skip)]
    pub pixels: Vec<usize>,
}

/// 4-connected components of `in_hull ∧ ¬in_P_closure` with at least
/// [`MIN_COMPONENT_PIXELS`] pixels, numbered from 1 in scan order.
pub fn extract_components(raster: &SliceRaster) -> Vec<ComponentSkeleton> {
    if raster.hull_status != HullStatus::Computed {
        return Vec::new();
    }
    let mask: Vec<bool> = raster
        .flags
        .iter()
        .map(|&f| f & flag::IN_HULL != 0 && f & flag::IN_P_CLOSURE == 0)
        .collect();
    components_of(raster, &mask, MIN_COMPONENT_PIXELS)
}

/// Components of `in_M3 ∧ ¬in_hull`: the parts of the connectedness locus
/// that hang off the closure from outside, such as capture components and
/// copies of the quadratic Mandelbrot set.
pub fn exterior_components(raster: &SliceRaster, min_pixels: usize) -> Vec<ComponentSkeleton> {
    let mask: Vec<bool> = raster
        .flags
        .iter()
        .map(|&f| f & flag::IN_M3 != 0 && f & flag::IN_HULL == 0)
        .collect();
    components_of(raster, &mask, min_pixels)
}

/// 4-connected components of `mask` with at least `min_pixels` pixels.
pub fn components_of(raster: &SliceRaster, mask: &[bool], min_pixels: usize) -> Vec<ComponentSkeleton> {
    let g = raster.grid();
    let (w, h) = (g.width(), g.height());
    let (labels, n) = label_components(mask, w, h);
    let mut pixels: Vec<Vec<usize>> = vec![Vec::new(); n as usize + 1];
    for (idx, &l) in labels.iter().enumerate() {
        if l != 0 {
            pixels[l as usize].push(idx);
        }
    }
    pixels
        .into_iter()
        .skip(1)
        .filter(|p| p.len() >= min_pixels.max(1))
        .take(u16::MAX as usize)
        .enumerate()
        .map(|(k, px)| {
            let (mut i0, mut j0, mut i1, mut j1) = (usize::MAX, usize::MAX, 0, 0);
            for &idx in &px {
                let (i, j) = (idx % w, idx / w);
                i0 = i0.min(i);
                i1 = i1.max(i);
                j0 = j0.min(j);
                j1 = j1.max(j);
            }
            let (a, c) = (g.center(i0, j1), g.center(i1, j0));
            ComponentSkeleton {
                id: k as u16 + 1,
                pixel_count: px.len(),
                bbox: BoundingBox {
                    i0: i0 as u32,
                    j0: j0 as u32,
                    i1: i1 as u32,
                    j1: j1 as u32,
                    b_min: a,
                    b_max: c,
                },
                pixels: px,
            }
        })
        .collect()
}

pub fn component_plane(raster: &SliceRaster, comps: &[ComponentSkeleton]) -> Vec<u16> {
    let mut plane = vec![0u16; raster.flags.len()];
    for c in comps {
        for &idx in &c.pixels {
            plane[idx] = c.id;
        }
    }
    plane
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentSample {
    pub b: Complex64,
    pub depth: u32,
    pub tag: ComponentTag,
    pub capture_time: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentReport {
    pub id: u16,
    pub pixel_count: usize,
    pub bbox: BoundingBox,
    pub histogram: BTreeMap<ComponentTag, usize>,
    pub verdict: ComponentTag,
    /// Verdict is SiegelCapture or QueerCandidate; `None` when every sample
    /// was undecided.
    pub expected_type: Option<bool>,
    pub samples: Vec<ComponentSample>,
}

/// Picks up to `n` pixels, deepest first by distance to the component edge,
/// spread evenly over the deeper half.
pub fn sample_pixels(raster: &SliceRaster, skel: &ComponentSkeleton, n: usize) -> Vec<(usize, u32)> {
    let g = raster.grid();
    let w = g.width();
    let bw = (skel.bbox.i1 - skel.bbox.i0 + 1) as usize;
    let bh = (skel.bbox.j1 - skel.bbox.j0 + 1) as usize;
    let local = |idx: usize| {
        let (i, j) = (idx % w - skel.bbox.i0 as usize, idx / w - skel.bbox.j0 as usize);
        j * bw + i
    };
    let mut mask = vec![false; bw * bh];
    for &idx in &skel.pixels {
        mask[local(idx)] = true;
    }
    let depth = distance_transform(&mask, bw, bh);
    let mut ranked: Vec<(usize, u32)> = skel.pixels.iter().map(|&idx| (idx, depth[local(idx)])).collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let max_depth = ranked.first().map(|r| r.1).unwrap_or(0);
    let deep = ranked
        .iter()
        .take_while(|r| r.1 * 2 >= max_depth)
        .count()
        .max(n.min(ranked.len()));
    let pool = &ranked[..deep];
    if pool.len() <= n {
        return pool.to_vec();
    }
    (0..n).map(|k| pool[k * pool.len() / n]).collect()
}

/// Classifies sampled parameters of a component and forms the verdict.
pub fn classify_component(
    raster: &SliceRaster,
    skel: &ComponentSkeleton,
    n_samples: usize,
    budgets: &Budgets,
) -> Result<ComponentReport> {
    if skel.pixels.is_empty() {
        return Err(Error::Precondition("component has no pixels".into()));
    }
    let g = raster.grid();
    let lambda = raster.lambda();
    let picks = sample_pixels(raster, skel, n_samples);
    let samples = picks
        .par_iter()
        .map(|&(idx, depth)| {
            let b = g.center_of_index(idx);
            let t = classify(&CubicMap::new(lambda, b), budgets)?;
            Ok(ComponentSample {
                b,
                depth,
                tag: t.tag,
                capture_time: t.evidence.capture_time,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut histogram = BTreeMap::new();
    for s in &samples {
        *histogram.entry(s.tag).or_insert(0) += 1;
    }
    let verdict = histogram
        .iter()
        .filter(|(t, _)| **t != ComponentTag::Undecided)
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
        .map(|(t, _)| *t)
        .unwrap_or(ComponentTag::Undecided);
    let expected_type = (verdict != ComponentTag::Undecided).then(|| {
        matches!(verdict, ComponentTag::SiegelCapture | ComponentTag::QueerCandidate)
    });
    Ok(ComponentReport {
        id: skel.id,
        pixel_count: skel.pixel_count,
        bbox: skel.bbox.clone(),
        histogram,
        verdict,
        expected_type,
        samples,
    })
}

/// Agreement of one flag layer between a slice and the same slice at twice
/// the resolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayerAgreement {
    pub bit: u8,
    /// Coarse pixels whose four fine children agree with each other.
    pub stable_pixels: usize,
    /// Fraction of stable pixels where the coarse value equals the children.
    pub agreement: f64,
}

/// Compares each layer of `coarse` with `fine`, which must cover the same
/// window at exactly twice the resolution. Blocks whose fine pixels disagree
/// straddle a boundary and are left out.
pub fn resolution_agreement(coarse: &SliceRaster, fine: &SliceRaster, bits: &[u8]) -> Result<Vec<LayerAgreement>> {
    let (cw, ch) = (coarse.config.resolution.width as usize, coarse.config.resolution.height as usize);
    let fw = fine.config.resolution.width as usize;
    if coarse.config.window != fine.config.window
        || fine.config.resolution.width as usize != 2 * cw
        || fine.config.resolution.height as usize != 2 * ch
    {
        return Err(Error::Precondition("fine raster must double the coarse resolution over the same window".into()));
    }
    Ok(bits
        .iter()
        .map(|&bit| {
            let (mut stable, mut agree) = (0usize, 0usize);
            for j in 0..ch {
                for i in 0..cw {
                    let kids = [(2 * i, 2 * j), (2 * i + 1, 2 * j), (2 * i, 2 * j + 1), (2 * i + 1, 2 * j + 1)]
                        .map(|(x, y)| fine.flags[y * fw + x] & bit != 0);
                    if kids.iter().all(|&k| k == kids[0]) {
                        stable += 1;
                        if (coarse.flags[j * cw + i] & bit != 0) == kids[0] {
                            agree += 1;
                        }
                    }
                }
            }
            LayerAgreement {
                bit,
                stable_pixels: stable,
                agreement: if stable == 0 { 1.0 } else { agree as f64 / stable as f64 },
            }
        })
        .collect())
}
