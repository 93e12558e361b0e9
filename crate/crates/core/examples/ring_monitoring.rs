//! Continuous monitoring of a state on a ring with magnetic flux: survival under
//! `n` projective measurements and the extracted decay rate across fluxes.

use std::f64::consts::PI;

use zenograph::dynamics::Grid;
use zenograph::monitoring::{default_ladder, estimate_decay_rate, monitored_survival, predicted_tau, Scenario};
use zenograph::{Complex64, Result};

fn main() -> Result<()> {
    let g = Grid::new(2f64.powi(-14), 1.0, 1.0)?;
    let f = |x: f64| Complex64::new(1.0 + 0.5 * (2.0 * PI * x).sin(), 0.2 * x);

    let scn = Scenario::ring(1.0, 0.8, &g, f)?;
    println!("flux 0.8: monitored survival at t = 1");
    for n in [4u64, 16, 64, 256, 1024] {
        println!("  n = {n:>5}  p = {:.6}", monitored_survival(&scn, 1.0, n)?);
    }

    println!("\n{:>8} {:>12} {:>12} {:>10}", "flux", "τ measured", "τ formula", "rel err");
    for j in 0..8 {
        let flux = -PI + j as f64 * PI / 4.0;
        let scn = Scenario::ring(1.0, flux, &g, f)?;
        let est = estimate_decay_rate(&scn, 1.0, &default_ladder())?;
        let tau = predicted_tau(&scn)?;
        println!("{flux:>8.4} {:>12.6} {tau:>12.6} {:>10.1e}", est.tau_extrapolated, est.relative_error().unwrap_or(f64::NAN));
    }
    Ok(())
}
