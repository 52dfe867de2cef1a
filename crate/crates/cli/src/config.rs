//! Run configuration: the full set of knobs for one invocation, with a
//! canonical hash that every output embeds.

use serde::Serialize;
use sha2::{Digest, Sha256};

pub const MAX_MODES: usize = 1024;
pub const MAX_TRUNC: usize = 4096;
pub const MAX_TIME: f64 = 200.0;

#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub symbol: String,
    pub band: Option<(f64, f64)>,
    pub modes: usize,
    pub grid: Option<usize>,
    pub trunc: usize,
    pub tstar: f64,
    pub eps: Option<f64>,
    pub bump: Option<(f64, f64)>,
    pub seed: u64,
}

impl RunConfig {
    /// Hex SHA-256 of the canonical JSON form.  Field order is fixed by the
    /// struct, so identical knobs always hash identically.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(text.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.symbol.is_empty() {
            return Err("--symbol is required".into());
        }
        if self.modes == 0 || self.modes > MAX_MODES {
            return Err(format!("--modes must be in 1..={MAX_MODES}, got {}", self.modes));
        }
        if self.trunc == 0 || self.trunc > MAX_TRUNC {
            return Err(format!("--trunc must be in 1..={MAX_TRUNC}, got {}", self.trunc));
        }
        if !self.tstar.is_finite() || self.tstar.abs() > MAX_TIME {
            return Err(format!("--tstar must satisfy |t| <= {MAX_TIME}, got {}", self.tstar));
        }
        if let Some((lo, hi)) = self.band {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(format!("--band needs LO < HI, got {lo}:{hi}"));
            }
        }
        if let Some((lo, hi)) = self.bump {
            if !(0.0 < lo && lo < hi && hi < 1.0) {
                return Err(format!("--bump needs 0 < LO < HI < 1, got {lo}:{hi}"));
            }
        }
        if let Some(eps) = self.eps {
            if !(eps.is_finite() && eps > 0.0) {
                return Err(format!("--eps must be positive, got {eps}"));
            }
        }
        if let Some(n) = self.grid {
            let need = 8 * (self.modes + 1);
            if !n.is_power_of_two() || n < need {
                return Err(format!(
                    "--grid must be a power of two >= 8*(modes+1) = {need}, got {n}"
                ));
            }
        }
        Ok(())
    }
}

/// Parse a "LO:HI" pair.
pub fn parse_pair(text: &str, flag: &str) -> Result<(f64, f64), String> {
    let mut it = text.split(':');
    let err = || format!("{flag} expects LO:HI, got '{text}'");
    let lo = it.next().ok_or_else(err)?.parse::<f64>().map_err(|_| err())?;
    let hi = it.next().ok_or_else(err)?.parse::<f64>().map_err(|_| err())?;
    if it.next().is_some() {
        return Err(err());
    }
    Ok((lo, hi))
}
