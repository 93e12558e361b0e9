//! Coupling many weak copies of a rank-one characteristic function: the
//! Volterra limit `exp(-iℓ/z)`, its Weyl function, and the n-fold limit.

use zenograph::coupling::{coupling_weyl_limit, nfold_limit, volterra_length, volterra_limit, volterra_weyl};
use zenograph::herglotz::{CharFn, HerglotzMeasure};
use zenograph::{Complex64, Result, I};

fn main() -> Result<()> {
    let atom = |x: f64| -> Result<CharFn> { Ok(CharFn::RankOne { measure: HerglotzMeasure::discrete(vec![(x, 1.0)])?, t: 1.0 }) };
    let s = atom(0.5)?;
    let ell = volterra_length(&s)?;
    let target = (-I * ell / I).exp();
    println!("Volterra length ℓ = {ell}");
    println!("{:>8} {:>26} {:>10}", "n", "S(nz)^n at z = i", "error");
    for p in 1..=5 {
        let n = 10u64.pow(p);
        let v = volterra_limit(&s, n, I)?;
        println!("{n:>8} {v:>26.10} {:>10.2e}", (v - target).norm());
    }

    let centred = atom(0.0)?;
    let z = Complex64::new(0.5, 1.0);
    let m = coupling_weyl_limit(&centred, 10_000, z)?;
    println!("\nWeyl limit at {z}: {m:.8} vs {:.8}", volterra_weyl(ell, z));

    // a singular inner factor is its own n-fold limit
    let single = CharFn::SingularInner(1.0);
    for n in [10u64, 1000] {
        println!("n-fold e^{{iz}} at n = {n}: {:.8}", nfold_limit(&single, 0.5, n, z)?);
    }
    Ok(())
}
