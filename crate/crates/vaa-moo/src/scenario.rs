//! The simulated world: IoT clusters, UAV swarm, base stations, eavesdropper,
//! and the physical constants of the channel and propulsion models.
//!
//! A [`Scenario`] is immutable once constructed and safe to share read-only
//! across concurrent evaluators. Generation is a pure function of
//! `(config, seed)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::Path;
use thiserror::Error;

use crate::geometry::{Point3, SquareRegion};

/// Speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Channel and antenna constants shared by every link model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    /// Carrier frequency in Hz.
    pub carrier_freq_hz: f64,
    /// Bandwidth in Hz.
    pub bandwidth_hz: f64,
    /// Noise power spectral density in dBm/Hz.
    pub noise_psd_dbm_hz: f64,
    /// Path-loss exponent α.
    pub pathloss_exp: f64,
    /// Path-loss constant K₀ (free-space reference at 1 m).
    pub pathloss_const: f64,
    /// Linear attenuation factor of line-of-sight links.
    pub mu_los: f64,
    /// Linear attenuation factor of non-line-of-sight links.
    pub mu_nlos: f64,
    /// Line-of-sight probability of purely terrestrial links.
    pub p_los_ter: f64,
    /// Lower altitude knee of the aerial LoS model, meters.
    pub h1_m: f64,
    /// Altitude above which links are always line-of-sight, meters.
    pub h2_m: f64,
    /// Constant magnitude of each element's far-field pattern.
    pub element_pattern_w: f64,
    /// Antenna array efficiency η ∈ [0, 1].
    pub array_efficiency: f64,
    /// Maximum transmit power per array element, watts.
    pub p_max_w: f64,
}

impl ChannelParams {
    pub fn wavelength_m(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_freq_hz
    }
}

impl Default for ChannelParams {
    fn default() -> Self {
        let carrier_freq_hz = 0.9e9;
        let k0 = {
            let x = 4.0 * std::f64::consts::PI * carrier_freq_hz / SPEED_OF_LIGHT;
            x * x
        };
        Self {
            carrier_freq_hz,
            bandwidth_hz: 2.0e6,
            noise_psd_dbm_hz: -157.0,
            pathloss_exp: 2.0,
            pathloss_const: k0,
            mu_los: 1.0,
            // 20 dB excess attenuation for blocked links.
            mu_nlos: 100.0,
            p_los_ter: 0.0,
            h1_m: 22.5,
            h2_m: 100.0,
            element_pattern_w: 1.0,
            array_efficiency: 1.0,
            p_max_w: 0.1,
        }
    }
}

/// Rotary-wing propulsion and airframe constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyParams {
    /// Blade profile power in hover, watts.
    pub p_blade_w: f64,
    /// Induced power in hover, watts.
    pub p_induced_w: f64,
    /// Rotor blade tip speed, m/s.
    pub v_tip_ms: f64,
    /// Mean rotor induced velocity in hover, m/s.
    pub v0_hover_ms: f64,
    /// Fuselage drag ratio.
    pub d0_drag: f64,
    /// Rotor solidity.
    pub rotor_solidity: f64,
    /// Air density, kg/m³.
    pub air_density_kg_m3: f64,
    /// Rotor disc area, m².
    pub rotor_area_m2: f64,
    /// Aircraft mass, kg.
    pub uav_mass_kg: f64,
    /// Gravitational acceleration, m/s².
    pub gravity_ms2: f64,
}

impl Default for EnergyParams {
    fn default() -> Self {
        Self {
            p_blade_w: 79.86,
            p_induced_w: 88.63,
            v_tip_ms: 120.0,
            v0_hover_ms: 4.03,
            d0_drag: 0.6,
            rotor_solidity: 0.05,
            air_density_kg_m3: 1.225,
            rotor_area_m2: 0.503,
            uav_mass_kg: 2.0,
            gravity_ms2: 9.8,
        }
    }
}

/// A ground sensor: fixed position on the ground plane, member of one cluster.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sensor {
    pub position: Point3,
    pub cluster_id: usize,
}

/// An IoT cluster: a square monitoring region, its sensors, and the data
/// volume the cluster must deliver.
#[derive(Debug, Clone, PartialEq)]
pub struct IotCluster {
    pub id: usize,
    pub region: SquareRegion,
    pub sensors: Vec<Sensor>,
    pub data_volume_bits: f64,
}

/// Initial (pre-mission) state of one UAV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UavInitialState {
    pub id: usize,
    pub position: Point3,
}

/// The immutable world description.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub clusters: Vec<IotCluster>,
    pub uavs: Vec<UavInitialState>,
    pub base_stations: Vec<Point3>,
    pub eavesdropper: Point3,
    pub channel: ChannelParams,
    pub energy: EnergyParams,
    /// Sensors selected per cluster to form its ground array.
    pub n_select: usize,
    /// Minimum inter-UAV separation, meters.
    pub d_min_m: f64,
    /// Region the UAVs may occupy (horizontal).
    pub uav_region: SquareRegion,
    /// Allowed UAV altitudes `[h_min, h_max]`, meters.
    pub altitude_band: (f64, f64),
}

impl Scenario {
    pub fn n_clusters(&self) -> usize {
        self.clusters.len()
    }

    pub fn sensors_per_cluster(&self) -> usize {
        self.clusters.first().map_or(0, |c| c.sensors.len())
    }

    pub fn n_uavs(&self) -> usize {
        self.uavs.len()
    }

    pub fn n_base_stations(&self) -> usize {
        self.base_stations.len()
    }

    pub fn uav_positions(&self) -> Vec<Point3> {
        self.uavs.iter().map(|u| u.position).collect()
    }
}

/// Everything the generator needs to realize a world.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub n_clusters: usize,
    pub sensors_per_cluster: usize,
    pub n_select: usize,
    pub n_uavs: usize,
    pub n_base_stations: usize,
    /// Side of each cluster's square monitoring region, meters.
    pub cluster_side_m: f64,
    /// Clusters sit evenly on a ring of this radius around the origin.
    pub cluster_ring_radius_m: f64,
    /// Base stations sit evenly on a ring of this radius around the origin.
    pub bs_ring_radius_m: f64,
    pub eavesdropper_xy: (f64, f64),
    pub uav_region: SquareRegion,
    pub altitude_band: (f64, f64),
    pub d_min_m: f64,
    /// Data volume each cluster must deliver, bits.
    pub data_volume_bits: f64,
    pub channel: ChannelParams,
    pub energy: EnergyParams,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            n_clusters: 2,
            sensors_per_cluster: 50,
            n_select: 10,
            n_uavs: 16,
            n_base_stations: 8,
            cluster_side_m: 100.0,
            cluster_ring_radius_m: 300.0,
            bs_ring_radius_m: 3000.0,
            eavesdropper_xy: (800.0, 500.0),
            uav_region: SquareRegion::new(0.0, 0.0, 100.0),
            altitude_band: (100.0, 120.0),
            d_min_m: 0.5,
            data_volume_bits: 100.0e6,
            channel: ChannelParams::default(),
            energy: EnergyParams::default(),
        }
    }
}

/// Named scenario presets of the simulation study.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioPreset {
    /// 2 clusters, 16 UAVs, high altitude band (always line-of-sight).
    SmallLos,
    /// 2 clusters, 16 UAVs, low altitude band (probabilistic line-of-sight).
    SmallPlos,
    /// 4 clusters, 32 UAVs, high altitude band.
    LargeLos,
    /// 4 clusters, 32 UAVs, low altitude band.
    LargePlos,
    /// Reduced instance for fast desk experiments and the acceptance suite:
    /// 2 clusters of 20 sensors (5 selected), 8 UAVs, 4 base stations.
    Desk,
}

impl ScenarioPreset {
    pub const ALL: [ScenarioPreset; 5] = [
        ScenarioPreset::SmallLos,
        ScenarioPreset::SmallPlos,
        ScenarioPreset::LargeLos,
        ScenarioPreset::LargePlos,
        ScenarioPreset::Desk,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ScenarioPreset::SmallLos => "small-los",
            ScenarioPreset::SmallPlos => "small-plos",
            ScenarioPreset::LargeLos => "large-los",
            ScenarioPreset::LargePlos => "large-plos",
            ScenarioPreset::Desk => "desk",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|p| p.name() == name)
    }

    pub fn config(&self) -> ScenarioConfig {
        let mut cfg = ScenarioConfig::default();
        match self {
            ScenarioPreset::SmallLos => {}
            ScenarioPreset::SmallPlos => cfg.altitude_band = (70.0, 90.0),
            ScenarioPreset::LargeLos => {
                cfg.n_clusters = 4;
                cfg.n_uavs = 32;
            }
            ScenarioPreset::LargePlos => {
                cfg.n_clusters = 4;
                cfg.n_uavs = 32;
                cfg.altitude_band = (70.0, 90.0);
            }
            ScenarioPreset::Desk => {
                cfg.sensors_per_cluster = 20;
                cfg.n_select = 5;
                cfg.n_uavs = 8;
                cfg.n_base_stations = 4;
                // Smaller payloads keep repositioning and beam quality, the
                // quantities under the planner's control, decisive at this
                // scale.
                cfg.data_volume_bits = 20.0e6;
            }
        }
        cfg
    }
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error(
        "could not place {placed} of {requested} UAVs with separation {d_min} m after {attempts} attempts; region too dense"
    )]
    InfeasibleGeometry { placed: usize, requested: usize, d_min: f64, attempts: usize },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("schema violation: {0}")]
    Schema(String),
}

/// One violated invariant, named by field and constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioViolation {
    /// Path of the offending field, e.g. `uavs[3]` or `channel.array_efficiency`.
    pub field: String,
    /// Short name of the violated constraint, e.g. `min_separation`.
    pub constraint: &'static str,
    pub message: String,
}

impl fmt::Display for ScenarioViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]: {}", self.field, self.constraint, self.message)
    }
}

const MAX_PLACEMENT_ATTEMPTS: usize = 10_000;

/// Deterministically generates a scenario from a config and seed. Sensors are
/// uniform in their cluster regions; UAVs are uniform in the UAV region and
/// altitude band, rejection-resampled until all pairwise separations reach
/// `d_min`.
pub fn generate_scenario(config: &ScenarioConfig, seed: u64) -> Result<Scenario, ScenarioError> {
    if config.n_clusters == 0
        || config.sensors_per_cluster == 0
        || config.n_uavs == 0
        || config.n_base_stations == 0
    {
        return Err(ScenarioError::InvalidConfig("all entity counts must be at least 1".into()));
    }
    if config.n_select == 0 || config.n_select > config.sensors_per_cluster {
        return Err(ScenarioError::InvalidConfig(format!(
            "n_select must lie in 1..={}, got {}",
            config.sensors_per_cluster, config.n_select
        )));
    }
    if !(config.cluster_side_m > 0.0) || !(config.uav_region.side > 0.0) {
        return Err(ScenarioError::InvalidConfig("regions must be non-degenerate".into()));
    }
    if !(config.altitude_band.0 <= config.altitude_band.1) {
        return Err(ScenarioError::InvalidConfig("altitude band must be ordered".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let clusters = (0..config.n_clusters)
        .map(|h| {
            let angle = std::f64::consts::PI * (0.5 + 2.0 * h as f64 / config.n_clusters as f64);
            let region = SquareRegion::new(
                config.cluster_ring_radius_m * angle.cos(),
                config.cluster_ring_radius_m * angle.sin(),
                config.cluster_side_m,
            );
            let (x0, x1) = region.x_range();
            let (y0, y1) = region.y_range();
            let sensors = (0..config.sensors_per_cluster)
                .map(|_| Sensor {
                    position: Point3::ground(rng.gen_range(x0..=x1), rng.gen_range(y0..=y1)),
                    cluster_id: h,
                })
                .collect();
            IotCluster { id: h, region, sensors, data_volume_bits: config.data_volume_bits }
        })
        .collect();

    let (x0, x1) = config.uav_region.x_range();
    let (y0, y1) = config.uav_region.y_range();
    let (h_min, h_max) = config.altitude_band;
    let mut uavs: Vec<UavInitialState> = Vec::with_capacity(config.n_uavs);
    let mut attempts = 0usize;
    while uavs.len() < config.n_uavs {
        if attempts >= MAX_PLACEMENT_ATTEMPTS {
            return Err(ScenarioError::InfeasibleGeometry {
                placed: uavs.len(),
                requested: config.n_uavs,
                d_min: config.d_min_m,
                attempts,
            });
        }
        attempts += 1;
        let candidate = Point3::new(
            rng.gen_range(x0..=x1),
            rng.gen_range(y0..=y1),
            rng.gen_range(h_min..=h_max),
        );
        if uavs.iter().all(|u| u.position.distance(&candidate) >= config.d_min_m) {
            uavs.push(UavInitialState { id: uavs.len(), position: candidate });
        }
    }

    // Base stations sit on a fixed ring, offset half a step from the cluster
    // ring so neither set is radially aligned with the other.
    let base_stations = (0..config.n_base_stations)
        .map(|k| {
            let angle =
                2.0 * std::f64::consts::PI * (k as f64 + 0.5) / config.n_base_stations as f64;
            Point3::ground(
                config.bs_ring_radius_m * angle.cos(),
                config.bs_ring_radius_m * angle.sin(),
            )
        })
        .collect();

    Ok(Scenario {
        clusters,
        uavs,
        base_stations,
        eavesdropper: Point3::ground(config.eavesdropper_xy.0, config.eavesdropper_xy.1),
        channel: config.channel.clone(),
        energy: config.energy.clone(),
        n_select: config.n_select,
        d_min_m: config.d_min_m,
        uav_region: config.uav_region,
        altitude_band: config.altitude_band,
    })
}

/// Checks every type invariant and returns the violations found. An empty
/// list means the scenario is well formed.
pub fn validate_scenario(s: &Scenario) -> Vec<ScenarioViolation> {
    let mut v = Vec::new();
    let fail = |v: &mut Vec<ScenarioViolation>, field: String, constraint: &'static str, message: String| {
        v.push(ScenarioViolation { field, constraint, message });
    };

    if s.clusters.is_empty() {
        fail(&mut v, "clusters".into(), "non_empty", "at least one cluster is required".into());
    }
    for c in &s.clusters {
        if c.sensors.is_empty() {
            fail(&mut v, format!("clusters[{}].sensors", c.id), "non_empty", "cluster has no sensors".into());
        }
        if !(c.data_volume_bits >= 0.0) {
            fail(
                &mut v,
                format!("clusters[{}].data_volume_bits", c.id),
                "non_negative",
                format!("data volume {} must be >= 0", c.data_volume_bits),
            );
        }
        for (i, sensor) in c.sensors.iter().enumerate() {
            if sensor.position.z != 0.0 {
                fail(
                    &mut v,
                    format!("clusters[{}].sensors[{i}]", c.id),
                    "ground_plane",
                    format!("sensor z = {} must be 0", sensor.position.z),
                );
            }
            if !c.region.contains_xy(sensor.position.x, sensor.position.y) {
                fail(
                    &mut v,
                    format!("clusters[{}].sensors[{i}]", c.id),
                    "inside_region",
                    "sensor lies outside its cluster region".into(),
                );
            }
        }
    }

    let (h_min, h_max) = s.altitude_band;
    for u in &s.uavs {
        let p = u.position;
        if p.z < h_min || p.z > h_max {
            fail(
                &mut v,
                format!("uavs[{}]", u.id),
                "altitude_band",
                format!("altitude {} outside [{h_min}, {h_max}]", p.z),
            );
        }
        if !s.uav_region.contains_xy(p.x, p.y) {
            fail(&mut v, format!("uavs[{}]", u.id), "inside_region", "UAV outside the UAV region".into());
        }
    }
    for i in 0..s.uavs.len() {
        for j in (i + 1)..s.uavs.len() {
            let d = s.uavs[i].position.distance(&s.uavs[j].position);
            if d < s.d_min_m {
                fail(
                    &mut v,
                    format!("uavs[{i}],uavs[{j}]"),
                    "min_separation",
                    format!("separation {d:.3} m below d_min {} m", s.d_min_m),
                );
            }
        }
    }

    for (k, b) in s.base_stations.iter().enumerate() {
        if b.z != 0.0 {
            fail(&mut v, format!("base_stations[{k}]"), "ground_plane", format!("z = {} must be 0", b.z));
        }
    }
    if s.eavesdropper.z != 0.0 {
        fail(&mut v, "eavesdropper".into(), "ground_plane", format!("z = {} must be 0", s.eavesdropper.z));
    }

    let n_sn = s.sensors_per_cluster();
    if s.n_select == 0 || s.n_select > n_sn {
        fail(
            &mut v,
            "n_select".into(),
            "selection_count",
            format!("n_select {} must lie in 1..={n_sn}", s.n_select),
        );
    }
    if !(s.d_min_m > 0.0) {
        fail(&mut v, "d_min".into(), "positive", format!("d_min {} must be > 0", s.d_min_m));
    }
    if !(h_min <= h_max) {
        fail(&mut v, "altitude_band".into(), "ordered", format!("[{h_min}, {h_max}] is not ordered"));
    }

    let ch = &s.channel;
    if !(0.0..=1.0).contains(&ch.array_efficiency) {
        fail(
            &mut v,
            "channel.array_efficiency".into(),
            "unit_interval",
            format!("efficiency {} outside [0, 1]", ch.array_efficiency),
        );
    }
    if !(0.0..=1.0).contains(&ch.p_los_ter) {
        fail(
            &mut v,
            "channel.p_los_ter".into(),
            "unit_interval",
            format!("probability {} outside [0, 1]", ch.p_los_ter),
        );
    }
    if !(ch.h1_m < ch.h2_m) {
        fail(&mut v, "channel.h1_m".into(), "ordered", format!("H1 {} must be < H2 {}", ch.h1_m, ch.h2_m));
    }
    for (name, value) in [
        ("channel.carrier_freq_hz", ch.carrier_freq_hz),
        ("channel.bandwidth_hz", ch.bandwidth_hz),
        ("channel.pathloss_const", ch.pathloss_const),
        ("channel.mu_los", ch.mu_los),
        ("channel.mu_nlos", ch.mu_nlos),
        ("channel.p_max_w", ch.p_max_w),
    ] {
        if !(value > 0.0) {
            fail(&mut v, name.into(), "positive", format!("{value} must be > 0"));
        }
    }

    let en = &s.energy;
    for (name, value) in [
        ("energy.p_blade_w", en.p_blade_w),
        ("energy.p_induced_w", en.p_induced_w),
        ("energy.v_tip_ms", en.v_tip_ms),
        ("energy.v0_hover_ms", en.v0_hover_ms),
        ("energy.d0_drag", en.d0_drag),
        ("energy.rotor_solidity", en.rotor_solidity),
        ("energy.air_density_kg_m3", en.air_density_kg_m3),
        ("energy.rotor_area_m2", en.rotor_area_m2),
        ("energy.uav_mass_kg", en.uav_mass_kg),
        ("energy.gravity_ms2", en.gravity_ms2),
    ] {
        if !(value > 0.0) {
            fail(&mut v, name.into(), "positive", format!("{value} must be > 0"));
        }
    }

    v
}

// --- JSON document mapping -------------------------------------------------
//
// The on-disk schema keeps positions as bare coordinate arrays: sensors and
// base stations as [x, y] (the ground plane is implied), UAVs as [x, y, z].

#[derive(Serialize, Deserialize)]
struct ClusterDoc {
    region: SquareRegion,
    sensors: Vec<[f64; 2]>,
    data_volume_bits: f64,
}

#[derive(Serialize, Deserialize)]
struct ScenarioDoc {
    clusters: Vec<ClusterDoc>,
    uavs: Vec<[f64; 3]>,
    base_stations: Vec<[f64; 2]>,
    eavesdropper: [f64; 2],
    channel: ChannelParams,
    energy: EnergyParams,
    n_select: usize,
    d_min: f64,
    uav_region: SquareRegion,
    altitude_band: (f64, f64),
}

impl From<&Scenario> for ScenarioDoc {
    fn from(s: &Scenario) -> Self {
        ScenarioDoc {
            clusters: s
                .clusters
                .iter()
                .map(|c| ClusterDoc {
                    region: c.region,
                    sensors: c.sensors.iter().map(|sn| [sn.position.x, sn.position.y]).collect(),
                    data_volume_bits: c.data_volume_bits,
                })
                .collect(),
            uavs: s.uavs.iter().map(|u| [u.position.x, u.position.y, u.position.z]).collect(),
            base_stations: s.base_stations.iter().map(|b| [b.x, b.y]).collect(),
            eavesdropper: [s.eavesdropper.x, s.eavesdropper.y],
            channel: s.channel.clone(),
            energy: s.energy.clone(),
            n_select: s.n_select,
            d_min: s.d_min_m,
            uav_region: s.uav_region,
            altitude_band: s.altitude_band,
        }
    }
}

impl From<ScenarioDoc> for Scenario {
    fn from(doc: ScenarioDoc) -> Self {
        Scenario {
            clusters: doc
                .clusters
                .into_iter()
                .enumerate()
                .map(|(h, c)| IotCluster {
                    id: h,
                    region: c.region,
                    sensors: c
                        .sensors
                        .into_iter()
                        .map(|[x, y]| Sensor { position: Point3::ground(x, y), cluster_id: h })
                        .collect(),
                    data_volume_bits: c.data_volume_bits,
                })
                .collect(),
            uavs: doc
                .uavs
                .into_iter()
                .enumerate()
                .map(|(j, [x, y, z])| UavInitialState { id: j, position: Point3::new(x, y, z) })
                .collect(),
            base_stations: doc.base_stations.into_iter().map(|[x, y]| Point3::ground(x, y)).collect(),
            eavesdropper: Point3::ground(doc.eavesdropper[0], doc.eavesdropper[1]),
            channel: doc.channel,
            energy: doc.energy,
            n_select: doc.n_select,
            d_min_m: doc.d_min,
            uav_region: doc.uav_region,
            altitude_band: doc.altitude_band,
        }
    }
}

/// Serializes a scenario to its JSON document form.
pub fn scenario_to_json(s: &Scenario) -> String {
    serde_json::to_string_pretty(&ScenarioDoc::from(s)).expect("scenario serializes")
}

/// Parses and validates a scenario from its JSON document form.
pub fn scenario_from_json(json: &str) -> Result<Scenario, ScenarioError> {
    let doc: ScenarioDoc = serde_json::from_str(json)?;
    let scenario = Scenario::from(doc);
    let violations = validate_scenario(&scenario);
    if let Some(first) = violations.first() {
        return Err(ScenarioError::Schema(format!(
            "{first}{}",
            if violations.len() > 1 { format!(" (+{} more)", violations.len() - 1) } else { String::new() }
        )));
    }
    Ok(scenario)
}

pub fn save_scenario(s: &Scenario, path: &Path) -> Result<(), ScenarioError> {
    std::fs::write(path, scenario_to_json(s))?;
    Ok(())
}

pub fn load_scenario(path: &Path) -> Result<Scenario, ScenarioError> {
    let text = std::fs::read_to_string(path)?;
    scenario_from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_preset_counts() {
        let s = generate_scenario(&ScenarioPreset::SmallLos.config(), 42).unwrap();
        let total_sensors: usize = s.clusters.iter().map(|c| c.sensors.len()).sum();
        assert_eq!(total_sensors, 100);
        assert_eq!(s.n_uavs(), 16);
        assert_eq!(s.n_base_stations(), 8);
        assert_eq!(s.n_select, 10);
    }

    #[test]
    fn large_preset_counts() {
        let s = generate_scenario(&ScenarioPreset::LargeLos.config(), 42).unwrap();
        let total_sensors: usize = s.clusters.iter().map(|c| c.sensors.len()).sum();
        assert_eq!(total_sensors, 200);
        assert_eq!(s.n_uavs(), 32);
        assert_eq!(s.n_base_stations(), 8);
    }

    #[test]
    fn generation_is_deterministic() {
        let cfg = ScenarioPreset::SmallPlos.config();
        let a = generate_scenario(&cfg, 7).unwrap();
        let b = generate_scenario(&cfg, 7).unwrap();
        assert_eq!(scenario_to_json(&a), scenario_to_json(&b));
        let c = generate_scenario(&cfg, 8).unwrap();
        assert_ne!(scenario_to_json(&a), scenario_to_json(&c));
    }

    #[test]
    fn generated_scenarios_validate_clean() {
        for preset in ScenarioPreset::ALL {
            for seed in [1u64, 2, 3] {
                let s = generate_scenario(&preset.config(), seed).unwrap();
                let violations = validate_scenario(&s);
                assert!(violations.is_empty(), "{preset:?} seed {seed}: {violations:?}");
            }
        }
    }

    #[test]
    fn dense_region_is_infeasible() {
        let mut cfg = ScenarioConfig::default();
        cfg.uav_region = SquareRegion::new(0.0, 0.0, 1.0);
        cfg.altitude_band = (100.0, 100.0);
        cfg.n_uavs = 50;
        cfg.d_min_m = 0.5;
        match generate_scenario(&cfg, 1) {
            Err(ScenarioError::InfeasibleGeometry { .. }) => {}
            other => panic!("expected infeasible geometry, got {other:?}"),
        }
    }

    #[test]
    fn coincident_uavs_violate_min_separation() {
        let mut s = generate_scenario(&ScenarioPreset::Desk.config(), 3).unwrap();
        s.uavs[1].position = s.uavs[0].position;
        let violations = validate_scenario(&s);
        assert!(
            violations.iter().any(|v| v.constraint == "min_separation" && v.message.contains("d_min")),
            "{violations:?}"
        );
    }

    #[test]
    fn bad_efficiency_is_reported_by_field() {
        let mut s = generate_scenario(&ScenarioPreset::Desk.config(), 3).unwrap();
        s.channel.array_efficiency = 1.2;
        let violations = validate_scenario(&s);
        assert!(violations.iter().any(|v| v.field == "channel.array_efficiency"), "{violations:?}");
    }

    #[test]
    fn json_round_trip_is_exact() {
        let s = generate_scenario(&ScenarioPreset::SmallLos.config(), 42).unwrap();
        let loaded = scenario_from_json(&scenario_to_json(&s)).unwrap();
        assert_eq!(s, loaded);
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scenario.json");
        let s = generate_scenario(&ScenarioPreset::Desk.config(), 9).unwrap();
        save_scenario(&s, &path).unwrap();
        assert_eq!(load_scenario(&path).unwrap(), s);
    }

    #[test]
    fn missing_key_names_the_field() {
        let s = generate_scenario(&ScenarioPreset::Desk.config(), 1).unwrap();
        let mut doc: serde_json::Value = serde_json::from_str(&scenario_to_json(&s)).unwrap();
        doc.as_object_mut().unwrap().remove("eavesdropper");
        let err = scenario_from_json(&doc.to_string()).unwrap_err();
        assert!(err.to_string().contains("eavesdropper"), "{err}");
    }

    #[test]
    fn negative_bandwidth_is_a_schema_error() {
        let s = generate_scenario(&ScenarioPreset::Desk.config(), 1).unwrap();
        let mut doc: serde_json::Value = serde_json::from_str(&scenario_to_json(&s)).unwrap();
        doc["channel"]["bandwidth_hz"] = serde_json::json!(-5.0);
        let err = scenario_from_json(&doc.to_string()).unwrap_err();
        match err {
            ScenarioError::Schema(msg) => assert!(msg.contains("bandwidth_hz"), "{msg}"),
            other => panic!("expected schema error, got {other:?}"),
        }
    }
}
