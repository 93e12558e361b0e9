//! Initial-state profiles read from the `[state]` section.
//!
//! ```text
//! profile = "constant" | "linear" | "indicator" | "gaussian" | "exponential" | "bump" | "fourier"
//! a, b            linear a + b x
//! lo, hi          indicator of (lo, hi]
//! center, width   gaussian and bump (compact (1 - r²)²)
//! rate            exponential e^{-rate x}
//! modes, ell      fourier Σ_{m<modes} e^{2πimx/ℓ}
//! phase_slope     extra factor e^{i·phase_slope·x}
//! scale_<edge>    per-edge real multiplier (default 1)
//! ```

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{CliError, Config};

#[derive(Debug, Clone)]
pub struct Profile {
    kind: Kind,
    phase_slope: f64,
    scales: Vec<(String, f64)>,
}

#[derive(Debug, Clone)]
enum Kind {
    Constant,
    Linear { a: f64, b: f64 },
    Indicator { lo: f64, hi: f64 },
    Gaussian { center: f64, width: f64 },
    Exponential { rate: f64 },
    Bump { center: f64, width: f64 },
    Fourier { modes: u64, ell: f64 },
}

impl Profile {
    pub fn from_config(cfg: &Config, edges: &[&str]) -> Result<Self, CliError> {
        let s = "state";
        let kind = match cfg.str(s, "profile")?.unwrap_or("constant") {
            "constant" => Kind::Constant,
            "linear" => Kind::Linear { a: cfg.f64_or(s, "a", 0.0)?, b: cfg.f64_or(s, "b", 1.0)? },
            "indicator" => {
                let (lo, hi) = (cfg.f64_or(s, "lo", 0.0)?, cfg.f64_or(s, "hi", 1.0)?);
                if !(hi > lo) {
                    return Err(CliError::Config("state.hi: must exceed state.lo".into()));
                }
                Kind::Indicator { lo, hi }
            }
            "gaussian" | "bump" => {
                let center = cfg.f64_or(s, "center", 0.0)?;
                let width = cfg.f64_or(s, "width", 1.0)?;
                if !(width > 0.0) {
                    return Err(CliError::Config("state.width: must be positive".into()));
                }
                if cfg.req_str(s, "profile")? == "gaussian" {
                    Kind::Gaussian { center, width }
                } else {
                    Kind::Bump { center, width }
                }
            }
            "exponential" => {
                let rate = cfg.f64_or(s, "rate", 1.0)?;
                if !(rate > 0.0) {
                    return Err(CliError::Config("state.rate: must be positive".into()));
                }
                Kind::Exponential { rate }
            }
            "fourier" => {
                let ell = cfg.f64_or(s, "ell", 1.0)?;
                if !(ell > 0.0) {
                    return Err(CliError::Config("state.ell: must be positive".into()));
                }
                Kind::Fourier { modes: cfg.u64_or(s, "modes", 2)?.max(1), ell }
            }
            other => return Err(CliError::Config(format!("state.profile: unknown profile `{other}`"))),
        };
        let mut scales = Vec::new();
        for e in edges {
            if let Some(v) = cfg.f64(s, &format!("scale_{e}"))? {
                scales.push((e.to_string(), v));
            }
        }
        Ok(Self { kind, phase_slope: cfg.f64_or(s, "phase_slope", 0.0)?, scales })
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        let v = match self.kind {
            Kind::Constant => 1.0,
            Kind::Linear { a, b } => a + b * x,
            Kind::Indicator { lo, hi } => {
                if x > lo && x <= hi {
                    1.0
                } else {
                    0.0
                }
            }
            Kind::Gaussian { center, width } => (-((x - center) / width).powi(2)).exp(),
            Kind::Exponential { rate } => (-rate * x).exp(),
            Kind::Bump { center, width } => {
                let r = (x - center) / width;
                (1.0 - r * r).max(0.0).powi(2)
            }
            Kind::Fourier { modes, ell } => {
                let s: Complex64 = (0..modes).map(|m| Complex64::from_polar(1.0, 2.0 * PI * m as f64 * x / ell)).sum();
                return s * Complex64::from_polar(1.0, self.phase_slope * x);
            }
        };
        Complex64::from_polar(v, self.phase_slope * x)
    }

    pub fn eval_on(&self, edge: &str, x: f64) -> Complex64 {
        let scale = self.scales.iter().find(|(e, _)| e == edge).map(|p| p.1).unwrap_or(1.0);
        self.eval(x) * scale
    }
}
