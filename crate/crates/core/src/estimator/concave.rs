//! Expected whole-edge detections next to a concave vertex.
//!
//! When the previous edge `ξ_prev` turns inward (`ξ_prev ∈ ⟦ξ, ξ + π⟧`), it
//! hides edge `ξ` from sensors looking along `θ < ξ_prev`. The admissible
//! directions shrink to
//! `Θ(θ1) = ([θ1, π − θ1) ∪ [π + θ1, 2π − θ1)) ∩ ⟦ξ_prev, ξ + π⟧`
//! and the count becomes `v m_t n_s f(θ1, λ|sin ξ|) / (2π|Ω|)` with
//! `f(θ, x) = ∫_Θ(θ) (r_max |sin z| − x) dz`.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::formulas::theta_min1;
use crate::error::{Error, Result};
use crate::geometry::Angle;
use crate::sim::SimConfig;

/// Quarter-turn zones around the motion axis for a given `θ ∈ [0, π/2]`:
/// `Z1 = [0, θ) ∪ [2π − θ, 2π)`, `Z2 = [θ, π − θ)`, `Z3 = [π − θ, π + θ)`,
/// `Z4 = [π + θ, 2π − θ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Zone {
    Z1,
    Z2,
    Z3,
    Z4,
}

pub fn zone_of(xi: Angle, theta: f64) -> Zone {
    let a = xi.radians();
    if a < theta || a >= TAU - theta {
        Zone::Z1
    } else if a < PI - theta {
        Zone::Z2
    } else if a < PI + theta {
        Zone::Z3
    } else {
        Zone::Z4
    }
}

/// Zones of the current and the previous edge direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ZoneCase {
    pub cur: Zone,
    pub prev: Zone,
}

impl ZoneCase {
    /// The twelve combinations a concave vertex can produce.
    pub const ALL: [ZoneCase; 12] = {
        use Zone::*;
        [
            ZoneCase { cur: Z1, prev: Z1 },
            ZoneCase { cur: Z1, prev: Z2 },
            ZoneCase { cur: Z1, prev: Z3 },
            ZoneCase { cur: Z2, prev: Z2 },
            ZoneCase { cur: Z2, prev: Z3 },
            ZoneCase { cur: Z2, prev: Z4 },
            ZoneCase { cur: Z3, prev: Z3 },
            ZoneCase { cur: Z3, prev: Z4 },
            ZoneCase { cur: Z3, prev: Z1 },
            ZoneCase { cur: Z4, prev: Z4 },
            ZoneCase { cur: Z4, prev: Z1 },
            ZoneCase { cur: Z4, prev: Z2 },
        ]
    };
}

/// `ξ_prev ∈ ⟦ξ_cur, ξ_cur + π⟧`, closed at both ends.
pub fn is_concave_pair(xi_prev: Angle, xi_cur: Angle) -> bool {
    let d = xi_cur.ccw_to(xi_prev);
    d <= PI + 1e-12 || d >= TAU - 1e-12
}

pub fn zone_case(theta: f64, xi_prev: Angle, xi_cur: Angle) -> Result<ZoneCase> {
    if !(0.0..=PI / 2.0).contains(&theta) || !is_concave_pair(xi_prev, xi_cur) {
        return Err(Error::NotConcave);
    }
    let case = ZoneCase {
        cur: zone_of(xi_cur, theta),
        prev: zone_of(xi_prev, theta),
    };
    if ZoneCase::ALL.contains(&case) {
        Ok(case)
    } else {
        Err(Error::NotConcave)
    }
}

/// `f(θ, x)` case by case. `r` is `r_max`.
pub fn f_theta_x(theta: f64, x: f64, xi_prev: Angle, xi_cur: Angle, r: f64) -> Result<f64> {
    use Zone::*;
    let case = zone_case(theta, xi_prev, xi_cur)?;
    let (p, c) = (xi_prev.radians(), xi_cur.radians());
    let ct = theta.cos();
    let v = match (case.cur, case.prev) {
        (Z1, Z1) | (Z3, Z3) => 2.0 * r * ct - x * (PI - 2.0 * theta),
        (Z1, Z2) => r * (p.cos() + ct) - x * (PI - theta - p),
        (Z1, Z3) | (Z3, Z1) => 0.0,
        (Z2, Z2) => r * (2.0 * ct + p.cos() - c.cos()) - x * (PI - 2.0 * theta - p + c),
        (Z2, Z3) => r * (ct - c.cos()) - x * (c - theta),
        (Z2, Z4) => -r * (p.cos() + c.cos()) - x * (c + PI - p),
        (Z3, Z4) => r * (ct - p.cos()) - x * (TAU - theta - p),
        (Z4, Z4) => r * (2.0 * ct - p.cos() + c.cos()) - x * (PI - 2.0 * theta - p + c),
        (Z4, Z1) => r * (ct + c.cos()) - x * (c - PI - theta),
        // Θ = [ξ_prev, ξ_cur − π)
        (Z4, Z2) => r * (p.cos() + c.cos()) - x * (c - PI - p),
        _ => unreachable!("zone_case filters impossible combinations"),
    };
    Ok(v)
}

/// Expected whole-edge detections of `(λ, ξ)` when the previous edge
/// `ξ_prev` forms a concave vertex with it. Zero when `λ|sin ξ| > r_max`.
pub fn expected_nd_concave(
    lambda: f64,
    xi: Angle,
    xi_prev: Angle,
    v: f64,
    m_t: f64,
    cfg: &SimConfig,
) -> Result<f64> {
    if !is_concave_pair(xi_prev, xi) {
        return Err(Error::NotConcave);
    }
    let Some(t1) = theta_min1(lambda, xi, cfg.r_max) else {
        return Ok(0.0);
    };
    let f = f_theta_x(t1, lambda * xi.sin().abs(), xi_prev, xi, cfg.r_max)?;
    Ok(v * m_t * cfg.n_s as f64 * f.max(0.0) / (2.0 * PI * cfg.area()))
}
