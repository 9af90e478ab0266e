//! Components of the connectedness locus outside the hull at the
//! golden-mean multiplier, each classified by sampling.

use cubiclab::classify::Budgets;
use cubiclab::grid::Window;
use cubiclab::slice::{classify_component, compute_slice, exterior_components, SliceConfig};
use cubiclab::Complex64;
use std::f64::consts::TAU;

fn main() -> cubiclab::Result<()> {
    let lambda = Complex64::from_polar(1.0, TAU * (5f64.sqrt() - 1.0) / 2.0);
    let config = SliceConfig::new(lambda).with_window(Window::centered(3.0)).with_resolution(256);
    let raster = compute_slice(&config)?;
    println!("hull {:?}", raster.hull_status);
    for skel in exterior_components(&raster, 24) {
        let rep = classify_component(&raster, &skel, 8, &Budgets::default())?;
        let b = rep.samples.first().map(|s| s.b);
        println!(
            "component {} ({} px, bbox {:.3}..{:.3}): {} {:?} sample {:?}",
            rep.id, rep.pixel_count, rep.bbox.b_min, rep.bbox.b_max, rep.verdict.name(), rep.histogram, b
        );
    }
    Ok(())
}
