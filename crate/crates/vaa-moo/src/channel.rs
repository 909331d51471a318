//! Link models: altitude-dependent line-of-sight probability, channel power
//! gain, beamformed link rates, and intra-swarm broadcast rates.
//!
//! Air-to-ground and ground-to-air links use a probabilistic LoS model whose
//! LoS probability depends on the UAV altitude `H_U` and the horizontal
//! distance `d_2D`. Air-to-air links are modeled as pure line-of-sight at all
//! altitudes.

use thiserror::Error;

use crate::geometry::Point3;
use crate::scenario::ChannelParams;

#[derive(Debug, Error, PartialEq)]
pub enum ChannelError {
    #[error("UAV altitude {0} m is negative")]
    NegativeAltitude(f64),
    #[error("link distance must be positive")]
    ZeroDistance,
    #[error("source and destination coincide")]
    CoincidentPositions,
    #[error("broadcast needs at least two UAVs")]
    DegenerateBroadcast,
    #[error("source index {index} out of range for swarm of {swarm}")]
    SourceOutOfRange { index: usize, swarm: usize },
}

/// Geometry of one transmitter–receiver link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    /// 3D transmitter–receiver distance, meters.
    pub d3d_m: f64,
    /// Horizontal transmitter–receiver distance, meters.
    pub d2d_m: f64,
    /// Altitude of the aerial end of the link, meters.
    pub uav_altitude_m: f64,
}

impl LinkGeometry {
    pub fn new(d3d_m: f64, d2d_m: f64, uav_altitude_m: f64) -> Self {
        Self { d3d_m, d2d_m, uav_altitude_m }
    }

    /// Geometry of a link with one ground and one aerial end.
    pub fn ground_air(ground: &Point3, air: &Point3) -> Self {
        Self {
            d3d_m: ground.distance(air),
            d2d_m: ground.horizontal_distance(air),
            uav_altitude_m: air.z,
        }
    }
}

/// The aerial LoS model is specified for altitudes up to this envelope.
const LOS_MODEL_MAX_ALTITUDE_M: f64 = 300.0;

/// Line-of-sight probability of a ground↔air link.
///
/// Piecewise in the altitude: the terrestrial probability below `H1`, an
/// altitude- and distance-dependent expression between `H1` and `H2`, and
/// exactly 1 at or above `H2`. Altitudes beyond the 300 m model envelope are
/// clamped with a warning.
pub fn los_probability(geom: &LinkGeometry, params: &ChannelParams) -> Result<f64, ChannelError> {
    let mut h = geom.uav_altitude_m;
    if h < 0.0 {
        return Err(ChannelError::NegativeAltitude(h));
    }
    if h > LOS_MODEL_MAX_ALTITUDE_M {
        log::warn!(
            "altitude {h} m beyond the {LOS_MODEL_MAX_ALTITUDE_M} m LoS model envelope; clamping"
        );
        h = LOS_MODEL_MAX_ALTITUDE_M;
    }

    let p = if h >= params.h2_m {
        1.0
    } else if h >= params.h1_m {
        // d1 and p1 are logarithmic increasing functions of the altitude.
        let d1 = (460.0 * h.log10() - 700.0).max(18.0);
        let p1 = 4300.0 * h.log10() - 3800.0;
        if geom.d2d_m <= d1 {
            1.0
        } else {
            let ratio = d1 / geom.d2d_m;
            ratio + (-geom.d2d_m / p1).exp() * (1.0 - ratio)
        }
    } else {
        params.p_los_ter
    };
    Ok(p.clamp(0.0, 1.0))
}

/// Channel power gain
/// `g_c = K₀⁻¹ · d⁻ᵅ · [P_LoS·μ_LoS + P_NLoS·μ_NLoS]⁻¹`,
/// a dimensionless factor multiplying the received power.
pub fn channel_attenuation(geom: &LinkGeometry, params: &ChannelParams) -> Result<f64, ChannelError> {
    if !(geom.d3d_m > 0.0) {
        return Err(ChannelError::ZeroDistance);
    }
    let p_los = los_probability(geom, params)?;
    let blend = p_los * params.mu_los + (1.0 - p_los) * params.mu_nlos;
    Ok(1.0 / (params.pathloss_const * geom.d3d_m.powf(params.pathloss_exp) * blend))
}

/// Total noise power σ² in watts over the configured bandwidth.
pub fn noise_power_w(params: &ChannelParams) -> f64 {
    10f64.powf((params.noise_psd_dbm_hz - 30.0) / 10.0) * params.bandwidth_hz
}

/// Achievable rate of a beamformed link in bits/s:
/// `R = B·log₂(1 + P_CB·G₀·g_c/σ²)` with `P_CB = Σ Iᵢ²·P_max` the total
/// transmit power of the array.
pub fn cb_link_rate(
    gain: f64,
    geom: &LinkGeometry,
    weights: &[f64],
    params: &ChannelParams,
) -> Result<f64, ChannelError> {
    let p_cb: f64 = weights.iter().map(|w| w * w * params.p_max_w).sum();
    let g_c = channel_attenuation(geom, params)?;
    let snr = p_cb * gain * g_c / noise_power_w(params);
    Ok(params.bandwidth_hz * (1.0 + snr).log2())
}

/// Single-link air-to-air rate in bits/s under pure line-of-sight.
pub fn a2a_rate(
    src: &Point3,
    dst: &Point3,
    tx_power_w: f64,
    params: &ChannelParams,
) -> Result<f64, ChannelError> {
    let d = src.distance(dst);
    if d == 0.0 {
        return Err(ChannelError::CoincidentPositions);
    }
    let g = 1.0 / (params.pathloss_const * d.powf(params.pathloss_exp));
    let snr = tx_power_w * g / noise_power_w(params);
    Ok(params.bandwidth_hz * (1.0 + snr).log2())
}

/// Effective broadcast rate from `src` to the rest of the swarm: the slowest
/// pairwise rate, so every UAV can decode simultaneously.
pub fn min_broadcast_rate(
    src: usize,
    swarm_positions: &[Point3],
    tx_power_w: f64,
    params: &ChannelParams,
) -> Result<f64, ChannelError> {
    if swarm_positions.len() < 2 {
        return Err(ChannelError::DegenerateBroadcast);
    }
    if src >= swarm_positions.len() {
        return Err(ChannelError::SourceOutOfRange { index: src, swarm: swarm_positions.len() });
    }
    let mut min_rate = f64::INFINITY;
    for (j, pos) in swarm_positions.iter().enumerate() {
        if j == src {
            continue;
        }
        let r = a2a_rate(&swarm_positions[src], pos, tx_power_w, params)?;
        min_rate = min_rate.min(r);
    }
    Ok(min_rate)
}
