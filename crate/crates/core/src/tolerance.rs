//! Numerical tolerances, collected in one record.
//!
//! Every comparison against a threshold in this crate goes through
//! [`Tolerances::current`]. Three named profiles exist; the process-wide
//! profile can be switched once at startup (the CLI reads it from the
//! `SEPFID_TOLERANCE` environment variable).
//!
//! | field            | default | meaning                                         |
//! |------------------|---------|-------------------------------------------------|
//! | `hermiticity`    | 1e-12   | entrywise `max |A - A†|` for Hermitian input    |
//! | `normalization`  | 1e-10   | state norms, probability sums                   |
//! | `reconstruction` | 1e-9    | eigen/Schmidt reconstruction checks             |
//! | `orthogonality`  | 1e-9    | `|<ψi|ψj>|` treated as zero                     |
//! | `rank`           | 1e-9    | eigenvalues counted as nonzero                  |
//! | `completeness`   | 1e-8    | `‖Σ M_a − I‖∞` for a valid POVM                 |
//! | `entanglement`   | 1e-9    | `|λ − 1/d₁|` for maximally entangled states     |
//! | `discrimination` | 1e-8    | perfect-discrimination residual                 |
//! | `sandwich`       | 1e-9    | lower = upper declared equal                    |

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU8, Ordering};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub hermiticity: f64,
    pub normalization: f64,
    pub reconstruction: f64,
    pub orthogonality: f64,
    pub rank: f64,
    pub completeness: f64,
    pub entanglement: f64,
    pub discrimination: f64,
    pub sandwich: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    Strict,
    Default,
    Loose,
}

static PROFILE: AtomicU8 = AtomicU8::new(1);

impl Profile {
    pub fn tolerances(self) -> Tolerances {
        let base = Tolerances::DEFAULT;
        match self {
            Profile::Default => base,
            Profile::Strict => base.scaled(0.1),
            Profile::Loose => base.scaled(100.0),
        }
    }

    fn code(self) -> u8 {
        match self {
            Profile::Strict => 0,
            Profile::Default => 1,
            Profile::Loose => 2,
        }
    }
}

impl FromStr for Profile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "strict" => Ok(Profile::Strict),
            "default" => Ok(Profile::Default),
            "loose" => Ok(Profile::Loose),
            other => Err(format!(
                "unknown tolerance profile '{other}' (expected strict, default or loose)"
            )),
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Profile::Strict => "strict",
            Profile::Default => "default",
            Profile::Loose => "loose",
        })
    }
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        hermiticity: 1e-12,
        normalization: 1e-10,
        reconstruction: 1e-9,
        orthogonality: 1e-9,
        rank: 1e-9,
        completeness: 1e-8,
        entanglement: 1e-9,
        discrimination: 1e-8,
        sandwich: 1e-9,
    };

    /// The tolerances of the active process-wide profile.
    pub fn current() -> Tolerances {
        active_profile().tolerances()
    }

    fn scaled(self, k: f64) -> Tolerances {
        Tolerances {
            hermiticity: self.hermiticity * k,
            normalization: self.normalization * k,
            reconstruction: self.reconstruction * k,
            orthogonality: self.orthogonality * k,
            rank: self.rank * k,
            completeness: self.completeness * k,
            entanglement: self.entanglement * k,
            discrimination: self.discrimination * k,
            sandwich: self.sandwich * k,
        }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances::DEFAULT
    }
}

pub fn set_profile(profile: Profile) {
    PROFILE.store(profile.code(), Ordering::Relaxed);
}

pub fn active_profile() -> Profile {
    match PROFILE.load(Ordering::Relaxed) {
        0 => Profile::Strict,
        2 => Profile::Loose,
        _ => Profile::Default,
    }
}
