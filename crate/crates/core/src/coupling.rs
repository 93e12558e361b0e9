//! Operator coupling at the level of characteristic functions: products,
//! affine changes of variable and the two limit theorems for n-fold
//! couplings.
//!
//! Characteristic functions are compared projectively: two functions are
//! identified when they differ by a unimodular constant, fixed at `z = 2i`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::herglotz::{stieltjes, CharFn, HerglotzMeasure};
use crate::I;

/// Reference point for projective normalisation.
pub const ANCHOR: Complex64 = Complex64::new(0.0, 2.0);

/// A characteristic function up to a unimodular factor.
#[derive(Debug, Clone)]
pub struct ProjectiveCharFn(pub CharFn);

impl ProjectiveCharFn {
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        self.0.eval(z)
    }

    /// Value rotated so that the anchor value is real and positive.
    pub fn normalized_eval(&self, z: Complex64) -> Result<Complex64> {
        let a = self.0.eval(ANCHOR)?;
        let v = self.0.eval(z)?;
        Ok(if a.norm() > 0.0 { v * (a.conj() / a.norm()) } else { v })
    }

    pub fn inner(&self) -> &CharFn {
        &self.0
    }

    /// `sup |S₁ - S₂|` over `grid` after normalisation at the anchor.
    pub fn projective_distance(&self, other: &ProjectiveCharFn, grid: &[Complex64]) -> Result<f64> {
        crate::herglotz::projective_distance(&self.0, &other.0, grid)
    }
}

impl From<CharFn> for ProjectiveCharFn {
    fn from(s: CharFn) -> Self {
        Self(s)
    }
}

fn factors(s: &CharFn) -> Vec<CharFn> {
    match s {
        CharFn::GenericProduct(fs) => fs.clone(),
        other => vec![other.clone()],
    }
}

/// Characteristic function of the coupling: the pointwise product.
pub fn couple(s1: &CharFn, s2: &CharFn) -> ProjectiveCharFn {
    let mut fs = factors(s1);
    fs.extend(factors(s2));
    ProjectiveCharFn(CharFn::GenericProduct(fs))
}

/// `z ↦ S((z - b)/a)`, the triple transported by `f(z) = az + b`.
/// Nested rescalings are composed.
pub fn rescale(s: &CharFn, a: f64, b: f64) -> Result<ProjectiveCharFn> {
    if !(a > 0.0 && a.is_finite() && b.is_finite()) {
        return invalid("rescaling needs a > 0 and finite b");
    }
    Ok(ProjectiveCharFn(match s {
        CharFn::Rescaled { inner, a: a1, b: b1 } => CharFn::Rescaled { inner: inner.clone(), a: a1 * a, b: a * b1 + b },
        other => CharFn::Rescaled { inner: Box::new(other.clone()), a, b },
    }))
}

/// `z ↦ conj(S(-z̄))`.
pub fn reflect(s: &CharFn) -> CharFn {
    match s {
        CharFn::Reflected(inner) => (**inner).clone(),
        other => CharFn::Reflected(Box::new(other.clone())),
    }
}

/// `-ln|S(z)|`, additive under coupling.
pub fn log_potential(s: &CharFn, z: Complex64) -> Result<f64> {
    Ok(-s.eval(z)?.norm().ln())
}

const CONTRACTION_SLACK: f64 = 1e-12;

fn check_contraction(v: Complex64, z: Complex64) -> Result<()> {
    if v.norm() > 1.0 + CONTRACTION_SLACK {
        return invalid(format!("|S({z})| = {} exceeds 1", v.norm()));
    }
    Ok(())
}

/// `S(z/n + μ)ⁿ`, rotated so that its value at the anchor is positive.
pub fn nfold_limit(s: &CharFn, mu: f64, n: u64, z: Complex64) -> Result<Complex64> {
    if n == 0 {
        return invalid("n must be at least 1");
    }
    let nf = n as f64;
    let base = |w: Complex64| -> Result<Complex64> {
        let arg = w / nf + mu;
        let v = s.eval(arg)?;
        check_contraction(v, arg)?;
        Ok(v.powf(nf))
    };
    let anchor = base(ANCHOR)?;
    let v = base(z)?;
    Ok(if anchor.norm() > 0.0 { v * (anchor.conj() / anchor.norm()) } else { v })
}

/// Limit of the n-fold coupling at `μ`: `e^{iℓz}` when `|S(μ+i0)| = 1`,
/// zero otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NfoldExponent {
    /// `|S(μ + i0)|`.
    pub modulus: f64,
    /// `d arg S(λ)/dλ` at `μ`.
    pub ell: f64,
}

impl NfoldExponent {
    pub fn is_inner(&self) -> bool {
        (self.modulus - 1.0).abs() < 1e-8
    }

    pub fn limit(&self, z: Complex64) -> Complex64 {
        if self.is_inner() {
            (I * self.ell * z).exp()
        } else {
            Complex64::new(0.0, 0.0)
        }
    }
}

/// Boundary values are taken at height `1e-12` above the axis; the phase
/// derivative is a central difference with step `1e-5`.
pub fn nfold_exponent(s: &CharFn, mu: f64) -> Result<NfoldExponent> {
    let eps = 1e-12;
    let h = 1e-5;
    let at = |x: f64| s.eval(Complex64::new(x, eps));
    let s0 = at(mu)?;
    if !s0.norm().is_finite() {
        return Err(Error::Pole(Complex64::new(mu, 0.0)));
    }
    let ell = (at(mu + h)? / at(mu - h)?).arg() / (2.0 * h);
    Ok(NfoldExponent { modulus: s0.norm(), ell })
}

fn rank_one_parts(s: &CharFn) -> Result<(&HerglotzMeasure, f64, f64)> {
    match s {
        CharFn::RankOne { measure, t } => {
            let mass = measure
                .total_mass()
                .ok_or_else(|| Error::InvalidInput("Volterra limit needs a finite measure".into()))?;
            Ok((measure, *t, mass))
        }
        _ => invalid("Volterra limit needs a rank-one characteristic function"),
    }
}

/// `ℓ = 2 t μ(ℝ)` of the limiting Volterra operator.
pub fn volterra_length(s: &CharFn) -> Result<f64> {
    let (_, t, mass) = rank_one_parts(s)?;
    Ok(2.0 * t * mass)
}

/// `S(nz)ⁿ`, converging to `exp(-iℓ/z)`.
pub fn volterra_limit(s: &CharFn, n: u64, z: Complex64) -> Result<Complex64> {
    rank_one_parts(s)?;
    if n == 0 {
        return invalid("n must be at least 1");
    }
    if !(z.im > 0.0) {
        return invalid("z must lie in the upper half-plane");
    }
    let nf = n as f64;
    let v = s.eval(z * nf)?;
    check_contraction(v, z * nf)?;
    Ok(v.powf(nf))
}

/// `M_n = (2/(iℓ)) (S_n - 1)/(S_n + 1)` with `S_n = S(nz)ⁿ`; the limit is
/// `-(2/ℓ) tan(ℓ/(2z))`.
pub fn coupling_weyl_limit(s: &CharFn, n: u64, z: Complex64) -> Result<Complex64> {
    let ell = volterra_length(s)?;
    let sn = volterra_limit(s, n, z)?;
    if (sn + 1.0).norm() == 0.0 {
        return Err(Error::Pole(z));
    }
    Ok(2.0 / (I * ell) * (sn - 1.0) / (sn + 1.0))
}

/// `-(2/ℓ) tan(ℓ/(2z))`.
pub fn volterra_weyl(ell: f64, z: Complex64) -> Complex64 {
    -(2.0 / ell) * (ell / (2.0 * z)).tan()
}

/// Atoms `ℓ/((2k+1)π)` with weights `4/(π²(2k+1)²)`, `|k| ≤ kmax`.
pub fn weyl_limit_measure(ell: f64, kmax: u64) -> Result<HerglotzMeasure> {
    if !(ell > 0.0) {
        return invalid("ell must be positive");
    }
    let k = kmax as i64;
    let atoms = (-k - 1..=k)
        .map(|j| {
            let m = (2 * j + 1) as f64;
            (ell / (m * PI), 4.0 / (PI * PI * m * m))
        })
        .collect();
    HerglotzMeasure::discrete(atoms)
}

/// `Σ w_k/(z_k - z)` over the truncated atoms plus `-(missing mass)/z` for
/// the atoms accumulating at 0.
pub fn weyl_limit_stieltjes(ell: f64, kmax: u64, z: Complex64) -> Result<Complex64> {
    let mu = weyl_limit_measure(ell, kmax)?;
    let missing = 1.0 - mu.total_mass().unwrap_or(0.0);
    Ok(stieltjes(&mu, z)? - missing / z)
}

/// Rows `n,abs_error`.
pub fn convergence_csv(rows: &[(u64, f64)]) -> String {
    let mut s = String::from("n,abs_error\n");
    for (n, e) in rows {
        let _ = writeln!(s, "{n},{e}");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atom(x: f64) -> CharFn {
        CharFn::RankOne { measure: HerglotzMeasure::discrete(vec![(x, 1.0)]).unwrap(), t: 1.0 }
    }

    fn pts() -> Vec<Complex64> {
        vec![Complex64::new(0.3, 0.5), Complex64::new(-1.2, 2.0), Complex64::new(4.0, 0.1), I]
    }

    #[test]
    fn products_of_inner_functions() {
        let p = couple(&CharFn::SingularInner(1.5), &CharFn::SingularInner(0.7));
        let q = couple(
            &CharFn::ProductForm { k: 0.5, ell: 1.0, phase: Complex64::new(1.0, 0.0) },
            &CharFn::ProductForm { k: 0.4, ell: 2.0, phase: Complex64::new(1.0, 0.0) },
        );
        for z in pts() {
            assert!((p.eval(z).unwrap() - (I * 2.2 * z).exp()).norm() < 1e-14);
            assert!((q.eval(z).unwrap() - 0.2 * (I * 3.0 * z).exp()).norm() < 1e-14);
        }
    }

    #[test]
    fn rescale_composes() {
        let s = CharFn::SingularInner(2.0);
        let r = rescale(&rescale(&s, 2.0, 1.0).unwrap().0, 0.5, -3.0).unwrap();
        let direct = rescale(&s, 1.0, -2.5).unwrap();
        for z in pts() {
            assert!((r.eval(z).unwrap() - direct.eval(z).unwrap()).norm() < 1e-14);
        }
        assert!(rescale(&s, 0.0, 1.0).is_err());
        // modulus at f(z) equals the modulus at z
        let f = rescale(&s, 3.0, 0.4).unwrap();
        let z = Complex64::new(0.2, 0.9);
        assert!((f.eval(z * 3.0 + 0.4).unwrap().norm() - s.eval(z).unwrap().norm()).abs() < 1e-15);
    }

    #[test]
    fn reflection_is_an_involution() {
        let s = atom(0.4);
        let rr = reflect(&reflect(&s));
        for z in pts() {
            assert_eq!(rr.eval(z).unwrap(), s.eval(z).unwrap());
        }
    }

    #[test]
    fn nfold_fixed_point_and_decay() {
        let s = CharFn::SingularInner(1.3);
        for n in [1, 7, 100] {
            for z in pts() {
                let v = nfold_limit(&s, 0.0, n, z).unwrap();
                let exact = (I * 1.3 * z).exp();
                assert!((v - exact).norm() < 1e-12 * exact.norm().max(1.0));
            }
        }
        let k = CharFn::Constant(Complex64::new(0.6, 0.0));
        assert!(nfold_limit(&k, 0.0, 200, I).unwrap().norm() < 1e-40);
        assert!(nfold_limit(&CharFn::Constant(Complex64::new(1.5, 0.0)), 0.0, 3, I).is_err());
    }

    #[test]
    fn nfold_single_atom() {
        let s = atom(0.0);
        let e = nfold_exponent(&s, 0.0).unwrap();
        assert!(e.is_inner());
        assert!((e.ell - 2.0).abs() < 1e-8);
        let z = Complex64::new(0.4, 1.0);
        let v = nfold_limit(&s, 0.0, 10_000, z).unwrap();
        assert!((v - e.limit(z)).norm() < 1e-3);
    }

    #[test]
    fn volterra_ladder() {
        let s = atom(0.0);
        let v = volterra_limit(&s, 10_000, I).unwrap();
        assert!((v - Complex64::new((-2f64).exp(), 0.0)).norm() < 2e-5);
        assert!((Complex64::new((-2f64).exp(), 0.0) - CharFn::Volterra(2.0).eval(I).unwrap()).norm() < 1e-15);
        let off = atom(0.5);
        let err = |n: u64| (volterra_limit(&off, n, I).unwrap() - (-2f64).exp()).norm();
        let ratio = err(2000) / err(1000);
        assert!((ratio - 0.5).abs() < 0.1, "{ratio}");
        assert!(volterra_limit(&CharFn::SingularInner(1.0), 10, I).is_err());
    }

    #[test]
    fn weyl_limit_and_measure() {
        let s = atom(0.0);
        let m = coupling_weyl_limit(&s, 10_000, I).unwrap();
        assert!((m - Complex64::new(0.0, 1f64.tanh())).norm() < 1e-3, "{m}");
        let mu = weyl_limit_measure(2.0, 100_000).unwrap();
        assert!((mu.total_mass().unwrap() - 1.0).abs() < 1e-5);
        for z in [I, Complex64::new(0.5, 0.3), Complex64::new(-2.0, 1.0), Complex64::new(0.1, 2.0)] {
            let a = weyl_limit_stieltjes(2.0, 2000, z).unwrap();
            assert!((a - volterra_weyl(2.0, z)).norm() < 1e-6, "{z}");
        }
    }
}
