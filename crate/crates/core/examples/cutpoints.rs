//! Search for a parabolic map whose co-landing ray pairs persist under
//! perturbation.

use cubiclab::classify::Budgets;
use cubiclab::grid::Window;
use cubiclab::rays::{search_persistent_cutpoints, CaptureSearch, RayParams};

fn main() -> cubiclab::Result<()> {
    let search = CaptureSearch {
        window: Window::centered(2.0),
        coarse_step: 0.1,
        ..CaptureSearch::default()
    };
    let log = search_persistent_cutpoints(&search, RayParams::default(), &Budgets::default())?;
    println!(
        "{} coarse points, {} candidates, {} refined",
        log.coarse_points,
        log.candidates.len(),
        log.refined_points
    );
    match (log.witness_b, log.report) {
        (Some(b), Some(rep)) => {
            println!("witness b = {b:.4}: {}", rep.message);
            for p in rep.matched.iter().filter(|p| p.cauchy) {
                println!("  {:?} / {:?}: final gap {:.2e}", p.alpha, p.beta, p.final_gap);
            }
        }
        _ => println!("no candidate found at this budget; best gap {:?}", log.best_gap),
    }
    Ok(())
}
