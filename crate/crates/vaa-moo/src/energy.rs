//! Rotary-wing propulsion power and per-leg trajectory energy.
//!
//! The propulsion power at level speed `v` is
//!
//! ```text
//! P(v) = P_B(1 + 3v²/v_tip²)
//!      + P_I(√(1 + v⁴/4v₀⁴) − v²/2v₀²)^½
//!      + ½ d₀ ρ s A v³
//! ```
//!
//! Legs are straight lines flown at constant cruise speed with hover at both
//! endpoints, so the kinetic-energy term of the 3D extension vanishes and a
//! leg costs `P(v)·T` plus the potential term `m·g·Δz`.

use thiserror::Error;

use crate::geometry::Point3;
use crate::scenario::EnergyParams;

#[derive(Debug, Error, PartialEq)]
pub enum EnergyError {
    #[error("speed {0} m/s is negative")]
    NegativeSpeed(f64),
    #[error("duration {0} s is negative")]
    NegativeDuration(f64),
    #[error("leg with distinct endpoints needs a positive duration")]
    InfeasibleLeg,
    #[error("leg requires {required:.2} m/s, above the {limit} m/s limit")]
    SpeedInfeasible { required: f64, limit: f64 },
}

/// One straight flight leg and the time budgeted for it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlightLeg {
    pub start: Point3,
    pub end: Point3,
    pub duration_s: f64,
}

/// Propulsion power at level speed `v` in watts.
pub fn propulsion_power(v: f64, p: &EnergyParams) -> Result<f64, EnergyError> {
    if v < 0.0 {
        return Err(EnergyError::NegativeSpeed(v));
    }
    let blade = p.p_blade_w * (1.0 + 3.0 * v * v / (p.v_tip_ms * p.v_tip_ms));
    let v4 = v.powi(4) / (4.0 * p.v0_hover_ms.powi(4));
    let induced = p.p_induced_w * ((1.0 + v4).sqrt() - v * v / (2.0 * p.v0_hover_ms * p.v0_hover_ms)).sqrt();
    let parasite = 0.5 * p.d0_drag * p.air_density_kg_m3 * p.rotor_solidity * p.rotor_area_m2 * v.powi(3);
    Ok(blade + induced + parasite)
}

/// Hover power `P(0) = P_B + P_I` in watts.
pub fn hover_power(p: &EnergyParams) -> f64 {
    p.p_blade_w + p.p_induced_w
}

/// Energy to hover for `duration` seconds.
pub fn hover_energy(duration_s: f64, p: &EnergyParams) -> Result<f64, EnergyError> {
    if duration_s < 0.0 {
        return Err(EnergyError::NegativeDuration(duration_s));
    }
    Ok(hover_power(p) * duration_s)
}

/// Energy of one leg at constant cruise speed `‖end − start‖ / duration`.
///
/// Descending legs are floored at hover energy: the potential term can
/// otherwise drive the total below what the rotors must spend.
pub fn leg_energy(leg: &FlightLeg, p: &EnergyParams, v_max: f64) -> Result<f64, EnergyError> {
    let dist = leg.start.distance(&leg.end);
    if dist == 0.0 {
        return hover_energy(leg.duration_s, p);
    }
    if leg.duration_s <= 0.0 {
        return Err(EnergyError::InfeasibleLeg);
    }
    let v = dist / leg.duration_s;
    if v > v_max {
        return Err(EnergyError::SpeedInfeasible { required: v, limit: v_max });
    }
    let dz = leg.end.z - leg.start.z;
    let energy = propulsion_power(v, p)? * leg.duration_s + p.uav_mass_kg * p.gravity_ms2 * dz;
    if dz < 0.0 {
        Ok(energy.max(hover_energy(leg.duration_s, p)?))
    } else {
        Ok(energy)
    }
}
