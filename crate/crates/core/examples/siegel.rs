//! Siegel disk radius and measured rotation at the golden-mean multiplier.

use cubiclab::classify::siegel_probe;
use cubiclab::{Complex64, CubicMap};
use std::f64::consts::TAU;

fn main() -> cubiclab::Result<()> {
    let lambda = Complex64::from_polar(1.0, TAU * (5f64.sqrt() - 1.0) / 2.0);
    for b in [Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.0), Complex64::new(0.18457, 0.84668)] {
        let r = siegel_probe(&CubicMap::new(lambda, b), 2000)?;
        println!(
            "b = {b:.5}: radius {:?}, rotation {:.6}, measured {:?}",
            r.radius, r.rotation, r.measured_rotation
        );
    }
    Ok(())
}
