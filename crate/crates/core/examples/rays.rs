//! External rays, landing points and the co-landing census.

use cubiclab::rays::{colanding_census, trace_ray, RationalAngle, RayParams};
use cubiclab::{Complex64, CubicMap};

fn main() -> cubiclab::Result<()> {
    let params = RayParams::default();
    let f = CubicMap::new(Complex64::new(0.95, 0.0), Complex64::new(0.0, 1.0));
    for (num, den) in [(0, 1), (1, 2), (1, 4), (3, 4), (1, 8)] {
        let t = trace_ray(&f, RationalAngle::new(num, den), params);
        println!("theta {num}/{den}: {:?} at {:?} ({} points)", t.status, t.landing, t.points.len());
    }

    let census = colanding_census(&f, 3, params)?;
    println!(
        "census up to period 3: {} traced, {} landed, {} stalled, {} hit a critical value",
        census.traced, census.landed, census.stalled, census.hit_critical
    );
    for p in &census.pairs {
        println!(
            "  {}/{} and {}/{} land together at {:.6} (period {}, |mu| = {:.3})",
            p.alpha.num,
            p.alpha.den,
            p.beta.num,
            p.beta.den,
            p.landing_point,
            p.period,
            p.multiplier.norm()
        );
    }
    Ok(())
}
