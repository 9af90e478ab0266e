//! Principal critical point and component classification of single maps.

use cubiclab::classify::{classify, principal_critical, Budgets};
use cubiclab::{Complex64, CubicMap};
use std::f64::consts::TAU;

fn main() -> cubiclab::Result<()> {
    let budgets = Budgets::default();
    let golden = Complex64::from_polar(1.0, TAU * (5f64.sqrt() - 1.0) / 2.0);
    let params = [
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.4, 0.3),
        Complex64::new(1.0, 0.0),
        golden,
    ];
    let bs = [
        Complex64::new(0.0, 0.0),
        Complex64::new(3.0, 0.0),
        Complex64::new(1.2, -0.8),
        Complex64::new(1.0, 0.0),
        Complex64::new(0.18457, 0.84668),
    ];
    for (lambda, b) in params.into_iter().zip(bs) {
        let f = CubicMap::new(lambda, b);
        let p = principal_critical(&f, &budgets)?;
        let t = classify(&f, &budgets)?;
        println!("lambda {lambda:.4}, b {b:.4}");
        println!("  principal {:?}: omega1 {:.4}, omega2 {:.4}", p.verdict, p.omega1, p.omega2);
        println!("  {}: {:?}", t.tag.name(), t.evidence);
    }
    Ok(())
}
