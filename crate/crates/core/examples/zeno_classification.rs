//! Zeno, anti-Zeno or resonant: classifying states by their boundary data and
//! confirming the verdict with a monitored decay rate.

use zenograph::dynamics::Grid;
use zenograph::graph::GraphSpec;
use zenograph::halfline::{BoundaryCondition, HalfLineState};
use zenograph::monitoring::{classify_state, default_ladder, estimate_decay_rate, predicted_tau, Scenario};
use zenograph::{Complex64, Result};

fn bump(x: f64) -> Complex64 {
    Complex64::new((-(x * x)).exp() * (1.0 - (x / 4.0).powi(2)).max(0.0).powi(2), 0.0)
}

fn main() -> Result<()> {
    let g = Grid::new(1.0 / 4096.0, 1.0, 6.0)?;
    let theta = Complex64::from_polar(1.0, 0.9);
    let spec = GraphSpec::gate(0.5, theta)?;
    let cases = [
        ("matched boundary", Scenario::graph(spec, &g, move |e, x| if e == "left" { bump(x) } else { -theta * bump(x) })?),
        ("mismatched", Scenario::graph(spec, &g, |_, x| bump(x))?),
    ];
    for (name, scn) in &cases {
        let est = estimate_decay_rate(scn, 1.0, &default_ladder())?;
        println!(
            "{name:<17} {:?}  τ predicted {:.6}  τ measured {:.6}",
            classify_state(scn)?,
            predicted_tau(scn)?,
            est.tau_extrapolated
        );
    }

    let st = HalfLineState::from_fn(|x| Complex64::new(2f64.sqrt() * (-x).exp(), 0.0), 1e-3, 40.0)?;
    for bc in [BoundaryCondition::Dirichlet, BoundaryCondition::Mixed(-1.0), BoundaryCondition::Mixed(2.0)] {
        let scn = Scenario::half_line(st.clone(), bc);
        println!("half-line {bc:?}: {:?}", classify_state(&scn)?);
    }
    Ok(())
}
