//! Parameter slice at fixed lambda: layers, hull, components and the tile.
//!
//! Usage: `slice [lambda_re] [lambda_im] [resolution] [out.cubq]`

use cubiclab::classify::Budgets;
use cubiclab::slice::{classify_component, compute_slice, flag, SliceConfig};
use cubiclab::tile::{SliceSidecar, Tile};
use cubiclab::Complex64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |k: usize, d: &str| args.get(k).cloned().unwrap_or_else(|| d.to_string());
    let lambda = Complex64::new(arg(0, "-0.3").parse()?, arg(1, "0.4").parse()?);
    let res: u32 = arg(2, "192").parse()?;
    let out = arg(3, "slice.cubq");

    let raster = compute_slice(&SliceConfig::new(lambda).with_resolution(res))?;
    println!("lambda {lambda}, {res}x{res}, hull {:?}", raster.hull_status);
    for (name, bit) in [
        ("escape1", flag::ESCAPE1),
        ("escape2", flag::ESCAPE2),
        ("m3", flag::IN_M3),
        ("phd", flag::IN_PHD),
        ("p-closure", flag::IN_P_CLOSURE),
        ("hull", flag::IN_HULL),
    ] {
        println!("  {name:10} {:8} px, symmetry violation {:.4}", raster.count(bit), raster.symmetry_violation(bit));
    }

    for skel in cubiclab::slice::extract_components(&raster) {
        let rep = classify_component(&raster, &skel, 8, &Budgets::default())?;
        println!("  component {} ({} px): {}", rep.id, rep.pixel_count, rep.verdict.name());
    }

    let tile = Tile::from(&raster);
    std::fs::write(&out, tile.encode())?;
    let sidecar = SliceSidecar::of(&raster);
    std::fs::write(format!("{out}.json"), serde_json::to_string_pretty(&sidecar)?)?;
    println!("wrote {out} ({})", sidecar.content_hash);
    Ok(())
}
