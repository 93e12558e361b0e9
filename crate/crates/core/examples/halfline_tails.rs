//! Spectral distribution of `-d²/dx²` on the half-line for `φ(x) = √2 e^{-x}`
//! and the heavy-tail constants under Dirichlet and mixed boundary conditions.

use zenograph::halfline::{spectral_distribution, stable_sigma, tail_constants, BoundaryCondition, HalfLineState};
use zenograph::{Complex64, Result};

fn main() -> Result<()> {
    let st = HalfLineState::from_fn(|x| Complex64::new(2f64.sqrt() * (-x).exp(), 0.0), 1e-3, 40.0)?;
    for (bc, alpha) in [(BoundaryCondition::Dirichlet, 0.5), (BoundaryCondition::Mixed(2.0), 1.5)] {
        let dist = spectral_distribution(&st, bc)?;
        println!("{bc:?}");
        for lambda in [1.0, 1e2, 1e4] {
            let tail = 1.0 - dist.n(lambda)?;
            println!("  λ = {lambda:>7}  1 - N(λ) = {tail:.3e}  λ^α (1 - N) = {:.5}", lambda.powf(alpha) * tail);
        }
        let t = tail_constants(&dist, alpha)?;
        println!("  extrapolated c₁ = {:.5}, c₂ = {:.5}, residual {:.1e}", t.c1, t.c2, t.residual);
        println!("  {:?}", stable_sigma(bc, &st));
    }
    Ok(())
}
