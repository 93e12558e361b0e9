//! Cayley and Möbius maps between the three boundary functions, checked on a
//! discrete Herglotz measure and its rank-one characteristic function.

use zenograph::herglotz::{
    char_from_livsic, char_from_weyl, herglotz_eval, livsic_from_weyl, rank_one_char, weyl_from_livsic, Extended,
    HalfPlanePoint, HerglotzMeasure, VonNeumannParam,
};
use zenograph::{Complex64, Result};

fn main() -> Result<()> {
    let mu = HerglotzMeasure::discrete(vec![(-1.0, 0.5), (0.0, 1.0), (2.0, 0.25)])?;
    let kappa = VonNeumannParam::new(Complex64::new(0.3, -0.2))?;

    println!("{:>16} {:>24} {:>24} {:>10}", "z", "M(z)", "Θ(z)", "round trip");
    for (re, im) in [(0.0, 1.0), (0.5, 0.2), (-3.0, 2.0), (1.0, 1e-2)] {
        let z = HalfPlanePoint::new(re, im)?;
        let m = herglotz_eval(&mu, z)?;
        let s = livsic_from_weyl(Extended::Finite(m));
        let theta = char_from_weyl(Extended::Finite(m), kappa)?;
        let back = weyl_from_livsic(s)?;
        assert!((char_from_livsic(s, kappa)? - theta).norm() < 1e-12);
        println!("{:>16} {:>24.6} {:>24.6} {:>10.1e}", format!("{re}+{im}i"), m, theta, (back - m).norm());
    }

    // rank-one perturbations stay contractive in the upper half-plane
    for t in [0.1, 1.0, 10.0] {
        let v = rank_one_char(&mu, t, HalfPlanePoint::new(0.7, 0.3)?)?;
        println!("t = {t:>4}: Θ_t(0.7+0.3i) = {v:.6}, |Θ_t| = {:.6}", v.norm());
    }
    Ok(())
}
