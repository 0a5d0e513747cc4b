use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Field and sampling parameters for one simulated pass of the target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    pub omega_width: f64,
    pub omega_height: f64,
    pub n_s: usize,
    pub r_max: f64,
    pub v: f64,
    pub dt: f64,
    pub seed: u64,
    pub p_b: f64,
    pub sigma_s: f64,
    /// Vertical offset of the trajectory from the centerline of Ω.
    pub y_offset: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            omega_width: 5000.0,
            omega_height: 300.0,
            n_s: 2000,
            r_max: 100.0,
            v: 1.0,
            dt: 1.0,
            seed: 1,
            p_b: 0.0,
            sigma_s: 0.0,
            y_offset: 0.0,
        }
    }
}

impl SimConfig {
    pub fn area(&self) -> f64 {
        self.omega_width * self.omega_height
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive, got {v}")))
            }
        };
        positive("omega_width", self.omega_width)?;
        positive("omega_height", self.omega_height)?;
        positive("r_max", self.r_max)?;
        positive("v", self.v)?;
        positive("dt", self.dt)?;
        if self.n_s == 0 {
            return Err(Error::Config("n_s must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.p_b) {
            return Err(Error::Config(format!("p_b must lie in [0, 1], got {}", self.p_b)));
        }
        if !(self.sigma_s.is_finite() && self.sigma_s >= 0.0) {
            return Err(Error::Config(format!(
                "sigma_s must be non-negative, got {}",
                self.sigma_s
            )));
        }
        if !self.y_offset.is_finite() {
            return Err(Error::Config("y_offset must be finite".into()));
        }
        Ok(())
    }

    /// `|Ω| / r_max²` and `|Ω| / |T|`; both should be large for the strip
    /// approximations to hold.
    pub fn boundary_ratios(&self, target_area: f64) -> (f64, f64) {
        (
            self.area() / (self.r_max * self.r_max),
            self.area() / target_area,
        )
    }
}
