//! Parabolic germs, attracting petals and their outlines.

use cubiclab::petal::{
    check_petal_properties, germ_data, germ_residual_exponent, parabolic_germ, petal_in_perturbed_basin,
    petal_outline, repelling_vectors, rotation_number,
};
use cubiclab::{Complex64, CubicMap};
use std::f64::consts::TAU;

fn main() -> cubiclab::Result<()> {
    let maps = [
        ("lambda=1, b=1", CubicMap::new(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0))),
        ("lambda=1, b=0", CubicMap::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))),
        ("lambda=e^(2pi i/3), b=1", CubicMap::new(Complex64::from_polar(1.0, TAU / 3.0), Complex64::new(1.0, 0.0))),
    ];
    for (name, f) in maps {
        let rot = rotation_number(f.lambda, 64)?.expect("root of unity");
        let germ = germ_data(&f, rot)?;
        let spec = parabolic_germ(&f, rot)?;
        println!("{name}: p/q = {}/{}, m = {}, a = {:.6}", rot.p, rot.q, spec.m, spec.a);
        println!("  depth {:.3}, disk radius {:.3}", spec.depth, spec.disk_radius);
        println!("  residual exponent {:.2}", germ_residual_exponent(&germ, 200, 7));
        for v in repelling_vectors(&spec) {
            println!("  repelling direction {:.4}", v);
        }
        for k in 0..spec.m {
            let sector = spec.with_sector(k);
            let check = check_petal_properties(&f, &sector, 500);
            let basin = petal_in_perturbed_basin(&f, &sector, 1e-3, 100)?;
            let outline = petal_outline(&sector, 48);
            let reach = outline.iter().map(|z| z.norm()).fold(0.0, f64::max);
            println!(
                "  sector {k} -> {}: violations {}/{}/{}, perturbed failures {}, outline reach {reach:.3}",
                sector.image_sector(),
                check.scaling_violations,
                check.invariance_violations,
                check.image_violations,
                basin.failures
            );
        }
    }
    Ok(())
}
