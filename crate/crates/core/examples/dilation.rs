//! Grid-exact transport: the contraction semigroup on the appendix graph, its
//! unitary dilation, and the dissipative ring inside a larger unitary network.

use zenograph::dynamics::{
    case_state, compress_case_iii, dilated_ring_evolution, embed_case_iii, evolve_contraction,
    evolve_dissipative_ring, evolve_unitary_full, ring_state, Grid,
};
use zenograph::graph::GraphSpec;
use zenograph::{Complex64, Result};

fn main() -> Result<()> {
    let g = Grid::new(1.0 / 256.0, 1.0, 8.0)?;
    let spec = GraphSpec::appendix(0.6, 1.5, Complex64::new(1.0, 0.0))?;
    let st = case_state(&spec, &g, |edge, x| match edge {
        "left" => Complex64::new((-(x + 2.0).powi(2)).exp(), 0.0),
        _ => Complex64::new(0.0, 0.0),
    })?;

    println!("{:>6} {:>14} {:>14} {:>12}", "t", "‖V_t φ‖²", "‖U_t φ‖²", "compressed");
    let full = embed_case_iii(&st, &spec)?;
    for t in [0.0, 1.0, 2.0, 3.0, 4.0, 6.0] {
        let v = evolve_contraction(&st, &spec, t)?;
        let u = evolve_unitary_full(&full, spec.k, spec.mu, t)?;
        let back = compress_case_iii(&u, &spec)?;
        let drift = v.data.iter().flatten().zip(back.data.iter().flatten()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        println!("{t:>6.2} {:>14.10} {:>14.10} {drift:>12.1e}", v.norm_sq(), u.state().norm_sq());
    }

    let kappa = Complex64::new(0.5, 0.3);
    let ring = ring_state(1.0, &g, |x| Complex64::new(1.0 + x, x.sin()))?;
    println!("\ndissipative ring, κ = {kappa}");
    for t in [0.5, 1.0, 2.5, 4.0] {
        let direct = evolve_dissipative_ring(&ring, kappa, t)?;
        let dilated = dilated_ring_evolution(&ring, kappa, t)?;
        let diff = (direct.norm_sq() - dilated.norm_sq()).abs();
        println!("t = {t:<4} ‖φ_t‖² = {:.10}  dilation mismatch {diff:.1e}", direct.norm_sq());
    }
    Ok(())
}
