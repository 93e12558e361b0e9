//! Closed forms for the differentiation triples on metric graphs.
//!
//! The four graph cases are
//!
//! ```text
//! I*   (-∞, ν) ⊔ (μ, ∞)            ν ≠ μ
//! I    (-∞, μ) ⊔ (μ, ∞)            gate k at μ
//! II   (μ, ν)
//! III  (-∞, μ) ⊔ (μ, ∞) ⊔ (μ, ν)    gate k, appendix of length ℓ = ν - μ
//! ```
//!
//! Cases I*/I give the spectral case (i), II gives (ii), III gives (iii).

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::herglotz::{Extended, HerglotzMeasure};
use crate::I;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GraphCase {
    IStar,
    I,
    II,
    III,
}

impl std::str::FromStr for GraphCase {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "I*" | "IStar" | "istar" => Ok(GraphCase::IStar),
            "I" | "i" => Ok(GraphCase::I),
            "II" | "ii" => Ok(GraphCase::II),
            "III" | "iii" => Ok(GraphCase::III),
            other => invalid(format!("unknown graph case `{other}`")),
        }
    }
}

/// A metric graph together with its gate and extension parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphSpec {
    pub case: GraphCase,
    pub mu: f64,
    pub nu: f64,
    pub k: f64,
    pub theta: Extended,
}

impl GraphSpec {
    pub fn new(case: GraphCase, mu: f64, nu: f64, k: f64, theta: Extended) -> Result<Self> {
        let s = Self { case, mu, nu, k, theta };
        s.validate()?;
        Ok(s)
    }

    pub fn line_gap(mu: f64, nu: f64, theta: Complex64) -> Result<Self> {
        Self::new(GraphCase::IStar, mu, nu, 0.0, theta.into())
    }

    pub fn gate(k: f64, theta: Complex64) -> Result<Self> {
        Self::new(GraphCase::I, 0.0, 0.0, k, theta.into())
    }

    pub fn interval(ell: f64, theta: Complex64) -> Result<Self> {
        Self::new(GraphCase::II, 0.0, ell, 0.0, theta.into())
    }

    pub fn appendix(k: f64, ell: f64, theta: Complex64) -> Result<Self> {
        Self::new(GraphCase::III, 0.0, ell, k, theta.into())
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.k) {
            return invalid(format!("gate k = {} outside [0, 1)", self.k));
        }
        if !self.mu.is_finite() || !self.nu.is_finite() {
            return invalid("vertices must be finite");
        }
        match self.case {
            GraphCase::IStar if self.nu == self.mu => return invalid("Case I* requires ν ≠ μ"),
            GraphCase::IStar if self.k != 0.0 => return invalid("Case I* has k = 0"),
            GraphCase::II if !(self.nu > self.mu) => return invalid("Case II requires ν > μ"),
            GraphCase::II if self.k != 0.0 => return invalid("Case II model requires k = 0"),
            GraphCase::III if !(self.nu > self.mu) => return invalid("Case III requires ν > μ"),
            GraphCase::III if !(self.k > 0.0) => return invalid("Case III requires k > 0"),
            _ => {}
        }
        if let Extended::Finite(t) = self.theta {
            if !t.is_finite() {
                return invalid("theta must be finite or the ∞ sentinel");
            }
        }
        Ok(())
    }

    /// Length of the interval or appendix (zero in Cases I*/I).
    pub fn ell(&self) -> f64 {
        match self.case {
            GraphCase::II | GraphCase::III => self.nu - self.mu,
            _ => 0.0,
        }
    }

    /// `ℓ' = ln(1/k)` in Case III, zero otherwise.
    pub fn ell_prime(&self) -> f64 {
        match self.case {
            GraphCase::III => -self.k.ln(),
            _ => 0.0,
        }
    }

    /// The unimodular boundary parameter `Θ`.
    pub fn theta(&self) -> Result<Complex64> {
        match self.theta {
            Extended::Finite(t) if (t.norm() - 1.0).abs() < 1e-12 => Ok(t),
            Extended::Finite(t) => invalid(format!("closed forms need |Θ| = 1, got {}", t.norm())),
            Extended::Infinity => invalid("closed forms need a finite Θ"),
        }
    }

    /// Flux `Φ = arg Θ`.
    pub fn flux(&self) -> Result<f64> {
        Ok(self.theta()?.arg())
    }

    /// `S ≡ 0`: Case I* or Case I with `k = 0`.
    pub fn is_exceptional(&self) -> bool {
        matches!(self.case, GraphCase::IStar) || (matches!(self.case, GraphCase::I) && self.k == 0.0)
    }

    /// `e^{-(ℓ+ℓ')}`, the parameter of the Θ ↔ κ Möbius map.
    fn mobius_a(&self) -> f64 {
        match self.case {
            GraphCase::II => (-self.ell()).exp(),
            GraphCase::III => self.k * (-self.ell()).exp(),
            _ => 0.0,
        }
    }

    pub fn params(&self) -> Result<TripleParams> {
        let theta = self.theta()?;
        let a = self.mobius_a();
        let e2ia = match self.case {
            GraphCase::IStar | GraphCase::I => theta,
            _ => (theta + a) / (theta * a + 1.0),
        };
        Ok(TripleParams { k: self.k, ell: self.ell(), ell_prime: self.ell_prime(), theta, e2ia })
    }
}

/// Derived parameters of a triple.
#[derive(Debug, Clone, Copy)]
pub struct TripleParams {
    pub k: f64,
    pub ell: f64,
    pub ell_prime: f64,
    pub theta: Complex64,
    /// `e^{2iα}`.
    pub e2ia: Complex64,
}

/// `tan w`, stable for large `|Im w|`.
pub fn tan_stable(w: Complex64) -> Complex64 {
    if w.im >= 0.0 {
        let e = (2.0 * I * w).exp();
        I * (1.0 - e) / (1.0 + e)
    } else {
        let e = (-2.0 * I * w).exp();
        -I * (1.0 - e) / (1.0 + e)
    }
}

/// `A(Φ) = cos²(Φ/2) coth(L/2) + sin²(Φ/2) tanh(L/2)`, `L = ℓ + ℓ'`.
pub fn amplitude(phi: f64, total_len: f64) -> f64 {
    let c = (phi / 2.0).cos();
    let s = (phi / 2.0).sin();
    let t = (total_len / 2.0).tanh();
    c * c / t + s * s * t
}

/// Livšic function of the triple.
pub fn livsic_closed(spec: &GraphSpec, z: Complex64) -> Result<Complex64> {
    spec.validate()?;
    let p = spec.params()?;
    let rot = p.e2ia.conj();
    let e = (I * p.ell * z).exp();
    let el = (-p.ell).exp();
    Ok(match spec.case {
        GraphCase::IStar | GraphCase::I => Complex64::new(0.0, 0.0),
        GraphCase::II => rot * (e - el) / (e * el - 1.0),
        GraphCase::III => rot * p.k * (e - el) / (e * (p.k * p.k * el) - 1.0),
    })
}

/// Weyl–Titchmarsh function of the pair.
pub fn weyl_closed(spec: &GraphSpec, z: Complex64) -> Result<Complex64> {
    spec.validate()?;
    let p = spec.params()?;
    match spec.case {
        GraphCase::IStar | GraphCase::I => Ok(I),
        GraphCase::II | GraphCase::III => {
            let phi = p.theta.arg();
            let total = p.ell + p.ell_prime;
            let w = z * (p.ell / 2.0) + I * (p.ell_prime / 2.0) - phi / 2.0;
            if spec.case == GraphCase::II && z.im == 0.0 {
                let x = (w.re - PI / 2.0) / PI;
                if (x - x.round()).abs() < 1e-13 {
                    return Err(Error::Pole(z));
                }
            }
            Ok(tan_stable(w) * amplitude(phi, total) + phi.sin() / total.sinh())
        }
    }
}

/// Characteristic function `e^{-2iα}·{k | e^{iℓz} | k e^{iℓz}}`.
pub fn char_closed(spec: &GraphSpec, z: Complex64) -> Result<Complex64> {
    spec.validate()?;
    let p = spec.params()?;
    let rot = p.e2ia.conj();
    Ok(match spec.case {
        GraphCase::IStar => Complex64::new(0.0, 0.0),
        GraphCase::I => rot * p.k,
        GraphCase::II => rot * (I * p.ell * z).exp(),
        GraphCase::III => rot * p.k * (I * p.ell * z).exp(),
    })
}

/// The von Neumann parameter `κ = S(i)`.
pub fn kappa_of(spec: &GraphSpec) -> Result<Complex64> {
    char_closed(spec, I)
}

/// Representing measure of [`weyl_closed`].
pub fn spectral_measure(spec: &GraphSpec) -> Result<HerglotzMeasure> {
    spec.validate()?;
    let p = spec.params()?;
    let phi = p.theta.arg();
    let a = amplitude(phi, p.ell + p.ell_prime);
    match spec.case {
        GraphCase::IStar | GraphCase::I => HerglotzMeasure::constant_density(1.0 / PI),
        GraphCase::II => HerglotzMeasure::lattice((PI + phi) / p.ell, 2.0 * PI / p.ell, 2.0 * a / p.ell),
        GraphCase::III => HerglotzMeasure::poisson(a, p.k, p.ell, phi),
    }
}

/// Transmission coefficient `t(λ) = (Θ + e^{iℓλ}k)/(e^{iℓλ} + kΘ)`.
pub fn transmission(k: f64, ell: f64, theta: Complex64, lambda: f64) -> Complex64 {
    let e = (I * ell * lambda).exp();
    (theta + e * k) / (e + theta * k)
}

/// Characteristic function of the interval triple.
pub fn char_interval(k: f64, ell: f64, theta: Complex64, z: Complex64) -> Complex64 {
    let el = (-ell).exp();
    let e = (I * ell * z).exp();
    (theta + el * k) / (theta * (k * el) + 1.0) * (e + theta * k) / (theta + e * k)
}

/// `κ = (kΘ + e^{-ℓ})/(kΘe^{-ℓ} + 1)` of the interval triple.
pub fn interval_kappa(k: f64, ell: f64, theta: Complex64) -> Complex64 {
    let el = (-ell).exp();
    (theta * k + el) / (theta * (k * el) + 1.0)
}

/// `n`-th zero of [`char_interval`], solving `e^{iℓz} = -kΘ`.
pub fn interval_zero(k: f64, ell: f64, theta: Complex64, n: i64) -> Complex64 {
    let arg = (-theta * k).arg();
    Complex64::new((arg + 2.0 * PI * n as f64) / ell, (1.0 / k).ln() / ell)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapDirection {
    KappaToTheta,
    ThetaToKappa,
}

/// Correspondence between the von Neumann parameter `κ` and the boundary
/// parameter `Θ` of the extension.
pub fn theta_kappa_map(spec: &GraphSpec, dir: MapDirection, value: Extended) -> Result<Extended> {
    spec.validate()?;
    if matches!(spec.case, GraphCase::IStar | GraphCase::I) {
        return Ok(value);
    }
    let a = spec.mobius_a();
    let v = match value {
        Extended::Infinity => {
            return Ok(match dir {
                MapDirection::KappaToTheta => Extended::Finite(Complex64::new(-1.0 / a, 0.0)),
                MapDirection::ThetaToKappa => Extended::Finite(Complex64::new(1.0 / a, 0.0)),
            })
        }
        Extended::Finite(v) => v,
    };
    let (num, den) = match dir {
        MapDirection::KappaToTheta => (-(v - a), v * a - 1.0),
        MapDirection::ThetaToKappa => (v + a, v * a + 1.0),
    };
    if den == Complex64::new(0.0, 0.0) {
        return Ok(Extended::Infinity);
    }
    Ok(Extended::Finite(num / den))
}

/// `log|S(z)|`, or `-∞` at a zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LogPotential {
    Finite(f64),
    NegInfinity,
}

impl LogPotential {
    pub fn value(self) -> Option<f64> {
        match self {
            LogPotential::Finite(v) => Some(v),
            LogPotential::NegInfinity => None,
        }
    }
}

pub fn log_potential(spec: &GraphSpec, z: Complex64) -> Result<LogPotential> {
    let s = char_closed(spec, z)?;
    if s.norm() == 0.0 {
        return Ok(LogPotential::NegInfinity);
    }
    Ok(LogPotential::Finite(s.norm().ln()))
}
