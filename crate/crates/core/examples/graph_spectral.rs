//! Closed-form boundary functions of the three graph cases, their spectral
//! measures and the unimodular transmission coefficient of the appendix.

use std::f64::consts::PI;

use zenograph::graph::{char_closed, livsic_closed, spectral_measure, transmission, weyl_closed, GraphSpec};
use zenograph::herglotz::{herglotz_eval, HalfPlanePoint};
use zenograph::{Complex64, Result};

fn main() -> Result<()> {
    let theta = Complex64::from_polar(1.0, PI / 5.0);
    let specs = [
        ("gate", GraphSpec::gate(0.4, theta)?),
        ("interval", GraphSpec::interval(2.0, theta)?),
        ("appendix", GraphSpec::appendix(0.4, 2.0, theta)?),
    ];
    let z = HalfPlanePoint::new(0.8, 0.6)?;
    for (name, spec) in &specs {
        let s = livsic_closed(spec, z.z())?;
        let m = weyl_closed(spec, z.z())?;
        let th = char_closed(spec, z.z())?;
        let mu = spectral_measure(spec)?;
        let quad = herglotz_eval(&mu, z)?;
        println!("{name:<9} s = {s:.5}  M = {m:.5}  Θ = {th:.5}  |M - ∫dμ| = {:.1e}", (quad - m).norm());
    }

    println!("\nappendix transmission, k = 0.4, ℓ = 2");
    for j in 0..=8 {
        let lambda = -4.0 + j as f64;
        let t = transmission(0.4, 2.0, theta, lambda);
        println!("λ = {lambda:>5.1}  t = {t:>22.6}  |t| = {:.15}", t.norm());
    }
    Ok(())
}
