//! Dynamical plane of one map: fates, immediate basin of 0 and a text preview.

use cubiclab::basin::{basin_raster, default_dynamic_window, CellFate};
use cubiclab::grid::Resolution;
use cubiclab::tile::Tile;
use cubiclab::{Complex64, CubicMap};

fn main() -> cubiclab::Result<()> {
    let f = CubicMap::new(Complex64::new(0.6, 0.3), Complex64::new(0.2, 0.8));
    let window = default_dynamic_window(&f);
    let r = basin_raster(&f, Complex64::new(0.0, 0.0), window, Resolution::new(72, 36)?, 512)?;
    for row in 0..36 {
        let line: String = (0..72)
            .map(|col| {
                let k = row * 72 + col;
                match r.fates[k] {
                    CellFate::Escaped => ' ',
                    CellFate::Target if r.labels[k] == r.target_label => '#',
                    CellFate::Target => '+',
                    CellFate::Bounded => '.',
                }
            })
            .collect();
        println!("{line}");
    }
    for c in &r.critical {
        println!("critical {:.4}: immediate basin {}", c.point, c.in_immediate_basin);
    }
    let tile = Tile::from_dynamics(f.lambda, &r);
    println!("tile {} bytes, hash {}", tile.encode().len(), tile.content_hash());
    Ok(())
}
