//! Critical points, fixed points, the perturbation and critical orbit fates.

use cubiclab::{iterate_orbit, Complex64, CubicMap};

fn main() -> cubiclab::Result<()> {
    let f = CubicMap::new(Complex64::new(0.5, 0.2), Complex64::new(-0.4, 0.9));
    println!("f(z) = ({})z + ({})z^2 + z^3", f.lambda, f.b);

    let crit = f.critical_points();
    println!("c+ = {:.6}, c- = {:.6}", crit.c_plus, crit.c_minus);
    for p in f.fixed_points() {
        println!("fixed {:.6} multiplier {:.6} (|mu| = {:.4})", p.point, p.multiplier, p.multiplier.norm());
    }

    for (name, c) in [("c+", crit.c_plus), ("c-", crit.c_minus)] {
        let rec = iterate_orbit(&f, c, 4096)?;
        println!("{name}: {:?} after {} steps", rec.fate, rec.steps_used);
    }

    let g = f.perturb(0.01)?;
    let s = 0.99f64.sqrt();
    let z = Complex64::new(0.3, -0.1);
    let residual = (g.eval(s * z) - s * 0.99 * f.eval(z)).norm();
    println!("perturb(0.01): lambda {:.6}, b {:.6}, conjugacy residual {residual:.1e}", g.lambda, g.b);
    Ok(())
}
