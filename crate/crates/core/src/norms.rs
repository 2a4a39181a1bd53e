//! p-norms and the norm-equivalence constants that scale every quantity in the method.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Unit roundoff of `f64` (2^-52).
pub const MACHINE_EPS: f64 = f64::EPSILON;

/// Which p-norm measures the trust region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PNorm {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "inf")]
    Infinity,
}

impl PNorm {
    pub const ALL: [PNorm; 3] = [PNorm::One, PNorm::Two, PNorm::Infinity];

    /// The conjugate exponent q with 1/p + 1/q = 1.
    pub fn dual(self) -> PNorm {
        match self {
            PNorm::One => PNorm::Infinity,
            PNorm::Two => PNorm::Two,
            PNorm::Infinity => PNorm::One,
        }
    }
}

impl fmt::Display for PNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PNorm::One => "1",
            PNorm::Two => "2",
            PNorm::Infinity => "inf",
        })
    }
}

impl FromStr for PNorm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "1" | "one" | "l1" => Ok(PNorm::One),
            "2" | "two" | "l2" => Ok(PNorm::Two),
            "inf" | "infinity" | "linf" | "max" => Ok(PNorm::Infinity),
            other => Err(format!("unknown p-norm `{other}` (expected 1, 2 or inf)")),
        }
    }
}

/// `‖v‖_p`.
pub fn norm(v: &[f64], p: PNorm) -> f64 {
    match p {
        PNorm::One => v.iter().map(|x| x.abs()).sum(),
        PNorm::Two => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
        PNorm::Infinity => v.iter().fold(0.0, |acc, x| acc.max(x.abs())),
    }
}

/// Tight constants with `‖x‖₂ ≤ c2p_n ‖x‖_p` on ℝⁿ and `‖z‖_p ≤ cp2_m ‖z‖₂` on ℝᵐ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormConstants {
    pub c2p_n: f64,
    pub cp2_m: f64,
}

/// Both constants are ≥ 1. For p = 1 the `n`-side constant is 1 and the
/// `m`-side one is √m; for p = ∞ it is the other way round.
pub fn norm_constants(p: PNorm, n: usize, m: usize) -> NormConstants {
    assert!(n >= 1 && m >= 1, "dimensions must be positive");
    match p {
        PNorm::One => NormConstants {
            c2p_n: 1.0,
            cp2_m: (m as f64).sqrt(),
        },
        PNorm::Two => NormConstants {
            c2p_n: 1.0,
            cp2_m: 1.0,
        },
        PNorm::Infinity => NormConstants {
            c2p_n: (n as f64).sqrt(),
            cp2_m: 1.0,
        },
    }
}
