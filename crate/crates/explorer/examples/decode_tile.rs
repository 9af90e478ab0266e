//! Reads a `.cubq` tile and prints its header, layer counts and a preview.
//!
//! Usage: `decode_tile <file.cubq>`

use cubiclab::tile::Tile;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).ok_or("usage: decode_tile <file.cubq>")?;
    let tile = Tile::decode(&std::fs::read(&path)?)?;
    let (w, h) = (tile.resolution.width as usize, tile.resolution.height as usize);
    println!("lambda {} window {:?} {w}x{h} hash {}", tile.lambda, tile.window, tile.content_hash());
    for bit in 0..6 {
        let n = tile.flags.iter().filter(|&&f| f & (1 << bit) != 0).count();
        println!("  bit {bit}: {n} px");
    }
    let ids = tile.component_ids.iter().filter(|&&id| id != 0).count();
    println!("  labelled pixels: {ids}");
    let step = (w / 64).max(1);
    for j in (0..h).step_by(2 * step) {
        let line: String = (0..w)
            .step_by(step)
            .map(|i| {
                let f = tile.flags[j * w + i];
                if f & 8 != 0 {
                    '#'
                } else if f & 4 != 0 {
                    '+'
                } else {
                    ' '
                }
            })
            .collect();
        println!("{line}");
    }
    Ok(())
}
