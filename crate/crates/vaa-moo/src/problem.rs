//! The mixed-variable planning problem: solution encoding, objective
//! evaluation, and constraint checking.
//!
//! A [`Solution`] fixes, per cluster, which sensors transmit and with which
//! excitation weights, which UAV receives; per base station, where every UAV
//! hovers, its excitation weight, the repositioning time budget; and the
//! order in which base stations are served. The three objectives are the
//! mission completion time `f1` (seconds), the summed pattern ratios toward
//! the eavesdropper `f2` (dimensionless), and the swarm energy cost `f3`
//! (joules), all minimized.
//!
//! Degenerate physics — a zero link rate with data pending, or a leg whose
//! implied cruise speed exceeds the limit — yields `+∞` objectives rather
//! than errors, so optimizers can navigate past such solutions. Structural
//! defects (wrong dimensions, invalid indices, a non-permutation service
//! order) are errors.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

use crate::beamforming::{direction_between, AngularGrid, ArrayElement, ArraySpec, BeamformingError};
use crate::channel::{cb_link_rate, min_broadcast_rate, LinkGeometry};
use crate::energy::{hover_energy, leg_energy, EnergyError, FlightLeg};
use crate::geometry::Point3;
use crate::scenario::Scenario;

/// Entity counts that determine the encoding size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProblemSize {
    pub n_clusters: usize,
    pub sensors_per_cluster: usize,
    pub n_uavs: usize,
    pub n_base_stations: usize,
}

impl ProblemSize {
    pub fn of(s: &Scenario) -> Self {
        Self {
            n_clusters: s.n_clusters(),
            sensors_per_cluster: s.sensors_per_cluster(),
            n_uavs: s.n_uavs(),
            n_base_stations: s.n_base_stations(),
        }
    }
}

/// Number of decision variables of the encoding:
/// `(1 + 2·N_SN)·N_IoT + (4·N_UAV + 2)·N_BS`.
///
/// Per cluster: the receiver choice, one selection bit and one weight per
/// sensor. Per base station: three coordinates and one weight per UAV, the
/// repositioning duration, and the order slot.
pub fn solution_length(size: &ProblemSize) -> usize {
    (1 + 2 * size.sensors_per_cluster) * size.n_clusters
        + (4 * size.n_uavs + 2) * size.n_base_stations
}

/// The mixed-variable genome.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    /// Per cluster, which sensors join the ground array (`[h][i]`).
    pub sensor_select: Vec<Vec<bool>>,
    /// Per cluster, the UAV that receives its data.
    pub receiver: Vec<usize>,
    /// Base-station service order: `bs_order[i]` is the station served i-th.
    pub bs_order: Vec<usize>,
    /// Per cluster, excitation weights of all its sensors (`[h][i]`, in [0,1]).
    pub sensor_weights: Vec<Vec<f64>>,
    /// Per served base station, positions of every UAV (`[k][j]`).
    pub uav_positions: Vec<Vec<Point3>>,
    /// Per served base station, excitation weights of every UAV (`[k][j]`).
    pub uav_weights: Vec<Vec<f64>>,
    /// Per base station, the repositioning time budget in seconds.
    pub t_perf: Vec<f64>,
}

impl Solution {
    /// An all-zero skeleton with the right dimensions.
    pub fn zeroed(size: &ProblemSize) -> Self {
        Self {
            sensor_select: vec![vec![false; size.sensors_per_cluster]; size.n_clusters],
            receiver: vec![0; size.n_clusters],
            bs_order: (0..size.n_base_stations).collect(),
            sensor_weights: vec![vec![0.0; size.sensors_per_cluster]; size.n_clusters],
            uav_positions: vec![vec![Point3::new(0.0, 0.0, 0.0); size.n_uavs]; size.n_base_stations],
            uav_weights: vec![vec![0.0; size.n_uavs]; size.n_base_stations],
            t_perf: vec![1.0; size.n_base_stations],
        }
    }

    pub fn selected_count(&self, cluster: usize) -> usize {
        self.sensor_select[cluster].iter().filter(|&&b| b).count()
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum InvalidSolution {
    #[error("field {field} has dimension {got}, expected {expected}")]
    Dimension { field: &'static str, got: usize, expected: usize },
    #[error("receiver[{cluster}] = {got} is not a valid UAV index (< {n_uavs})")]
    ReceiverIndex { cluster: usize, got: usize, n_uavs: usize },
    #[error("bs_order is not a permutation of the base-station indices")]
    NotAPermutation,
    #[error("{field} contains a non-finite value")]
    NonFinite { field: &'static str },
    #[error("t_perf[{index}] = {value} must be positive")]
    NonPositiveDuration { index: usize, value: f64 },
}

/// One violated problem constraint, as data.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintViolation {
    pub constraint: &'static str,
    pub field: String,
    pub message: String,
}

impl fmt::Display for ConstraintViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]: {}", self.field, self.constraint, self.message)
    }
}

/// The three objective values. `f2` is kept as the raw ratio sum; the
/// decibel form `20·log10(f2)` is applied at reporting time only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveVector {
    /// Mission completion time, seconds.
    pub f1_s: f64,
    /// Summed eavesdropper-direction pattern ratios, dimensionless.
    pub f2: f64,
    /// Swarm energy cost, joules.
    pub f3_j: f64,
}

impl ObjectiveVector {
    pub fn new(f1_s: f64, f2: f64, f3_j: f64) -> Self {
        Self { f1_s, f2, f3_j }
    }

    pub fn is_finite(&self) -> bool {
        self.f1_s.is_finite() && self.f2.is_finite() && self.f3_j.is_finite()
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.f1_s, self.f2, self.f3_j]
    }

    /// Reporting form of `f2` in decibels.
    pub fn f2_db(&self) -> f64 {
        20.0 * self.f2.log10()
    }
}

/// Per-phase decomposition of one evaluation. The identity
/// `f1 = t_g2a + t_a2a + t_a2g_perf + t_a2g_tran` holds exactly, including
/// the infinite sentinel cases.
#[derive(Debug, Clone, PartialEq)]
pub struct MissionBreakdown {
    /// Ground-to-air phase duration (slowest cluster), seconds.
    pub t_g2a_s: f64,
    /// Intra-swarm broadcast duration (sum over clusters), seconds.
    pub t_a2a_s: f64,
    /// Total repositioning time, seconds.
    pub t_a2g_perf_s: f64,
    /// Total air-to-ground transmission time, seconds.
    pub t_a2g_tran_s: f64,
    /// Ground array rate per cluster, bits/s.
    pub g2a_rates_bps: Vec<f64>,
    /// Slowest broadcast rate per cluster, bits/s.
    pub a2a_min_rates_bps: Vec<f64>,
    /// Aerial array rate per base station (indexed by station), bits/s.
    pub a2g_rates_bps: Vec<f64>,
    /// Transmission time per base station (indexed by station), seconds.
    pub t_tran_s: Vec<f64>,
    /// Per-leg energies `[station][uav]`, joules.
    pub leg_energies_j: Vec<Vec<f64>>,
    /// Total energy, joules (the `f3` value).
    pub energy_j: f64,
}

impl MissionBreakdown {
    pub fn f1(&self) -> f64 {
        self.t_g2a_s + self.t_a2a_s + self.t_a2g_perf_s + self.t_a2g_tran_s
    }
}

/// Evaluation knobs that are not part of the world description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    /// Angular quadrature step for the directivity integral, degrees.
    pub quadrature_step_deg: f64,
    /// Cruise speed limit, m/s.
    pub v_max_ms: f64,
    /// Bounds for the per-station repositioning durations, seconds.
    pub t_perf_bounds_s: (f64, f64),
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self { quadrature_step_deg: 1.0, v_max_ms: 30.0, t_perf_bounds_s: (1.0, 120.0) }
    }
}

/// Per-dimension bounds of the continuous part of the genome, in the
/// canonical flat order: sensor weights, UAV positions (x, y, z per UAV per
/// station), UAV weights, repositioning durations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuousBounds {
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub z_range: (f64, f64),
    pub t_range: (f64, f64),
    size: ProblemSize,
}

impl ContinuousBounds {
    pub fn new(s: &Scenario, cfg: &EvalConfig) -> Self {
        Self {
            x_range: s.uav_region.x_range(),
            y_range: s.uav_region.y_range(),
            z_range: s.altitude_band,
            t_range: cfg.t_perf_bounds_s,
            size: ProblemSize::of(s),
        }
    }

    /// Number of continuous dimensions.
    pub fn dim_count(&self) -> usize {
        let s = &self.size;
        s.n_clusters * s.sensors_per_cluster
            + s.n_base_stations * s.n_uavs * 4
            + s.n_base_stations
    }

    /// Visits every continuous dimension of `x` in canonical order together
    /// with its lower and upper bound.
    pub fn for_each_value<F: FnMut(&mut f64, f64, f64)>(&self, x: &mut Solution, mut f: F) {
        for row in &mut x.sensor_weights {
            for w in row {
                f(w, 0.0, 1.0);
            }
        }
        for station in &mut x.uav_positions {
            for p in station {
                f(&mut p.x, self.x_range.0, self.x_range.1);
                f(&mut p.y, self.y_range.0, self.y_range.1);
                f(&mut p.z, self.z_range.0, self.z_range.1);
            }
        }
        for row in &mut x.uav_weights {
            for w in row {
                f(w, 0.0, 1.0);
            }
        }
        for t in &mut x.t_perf {
            f(t, self.t_range.0, self.t_range.1);
        }
    }

    /// Clamps every continuous dimension into its bounds.
    pub fn clamp(&self, x: &mut Solution) {
        self.for_each_value(x, |v, lb, ub| *v = v.clamp(lb, ub));
    }

    /// The continuous dimensions of `x` as a flat vector in canonical order.
    pub fn flatten(&self, x: &Solution) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dim_count());
        for row in &x.sensor_weights {
            out.extend_from_slice(row);
        }
        for station in &x.uav_positions {
            for p in station {
                out.push(p.x);
                out.push(p.y);
                out.push(p.z);
            }
        }
        for row in &x.uav_weights {
            out.extend_from_slice(row);
        }
        out.extend_from_slice(&x.t_perf);
        out
    }
}

/// Reports every violated constraint of `x` against `s`: weight bounds,
/// position bounds, receiver validity, the service-order permutation, the
/// per-cluster selection count, duration positivity, and the minimum UAV
/// separation at the initial deployment and at every served-station
/// configuration.
pub fn check_constraints(x: &Solution, s: &Scenario) -> Vec<ConstraintViolation> {
    let mut out = Vec::new();
    let mut push = |constraint: &'static str, field: String, message: String| {
        out.push(ConstraintViolation { constraint, field, message });
    };

    for (h, row) in x.sensor_select.iter().enumerate() {
        let ones = row.iter().filter(|&&b| b).count();
        if ones != s.n_select {
            push(
                "selection_count",
                format!("D[{h}]"),
                format!("{ones} sensors selected, expected {}", s.n_select),
            );
        }
    }
    for (h, row) in x.sensor_weights.iter().enumerate() {
        for (i, w) in row.iter().enumerate() {
            if !(0.0..=1.0).contains(w) {
                push("weight_bounds", format!("I_SN[{h}][{i}]"), format!("{w} outside [0, 1]"));
            }
        }
    }
    for (k, row) in x.uav_weights.iter().enumerate() {
        for (j, w) in row.iter().enumerate() {
            if !(0.0..=1.0).contains(w) {
                push("weight_bounds", format!("I_UAV[{j}][{k}]"), format!("{w} outside [0, 1]"));
            }
        }
    }
    let (h_min, h_max) = s.altitude_band;
    for (k, station) in x.uav_positions.iter().enumerate() {
        for (j, p) in station.iter().enumerate() {
            if !s.uav_region.contains_xy(p.x, p.y) {
                push(
                    "position_bounds",
                    format!("P[{j}][{k}]"),
                    format!("({}, {}) outside the UAV region", p.x, p.y),
                );
            }
            if p.z < h_min || p.z > h_max {
                push(
                    "position_bounds",
                    format!("P[{j}][{k}]"),
                    format!("altitude {} outside [{h_min}, {h_max}]", p.z),
                );
            }
        }
    }
    for (h, &a) in x.receiver.iter().enumerate() {
        if a >= s.n_uavs() {
            push("receiver_index", format!("A[{h}]"), format!("{a} is not a UAV index"));
        }
    }
    {
        let mut seen = vec![false; s.n_base_stations()];
        let mut valid = x.bs_order.len() == s.n_base_stations();
        for &q in &x.bs_order {
            if q >= seen.len() || seen[q] {
                valid = false;
                break;
            }
            seen[q] = true;
        }
        if !valid {
            push(
                "service_order_permutation",
                "Q".into(),
                "not a permutation of the base-station indices".into(),
            );
        }
    }
    for (k, &t) in x.t_perf.iter().enumerate() {
        if !(t > 0.0) {
            push("duration_positive", format!("T_perf[{k}]"), format!("{t} must be > 0"));
        }
    }

    // Minimum separation, at the initial deployment and per served station.
    let check_swarm = |positions: &[Point3], label: &str, out: &mut Vec<ConstraintViolation>| {
        for i in 0..positions.len() {
            for j in (i + 1)..positions.len() {
                let d = positions[i].distance(&positions[j]);
                if d < s.d_min_m {
                    out.push(ConstraintViolation {
                        constraint: "min_separation",
                        field: format!("{label}[{i}],{label}[{j}]"),
                        message: format!("separation {d:.3} m below d_min {} m", s.d_min_m),
                    });
                }
            }
        }
    };
    let initial = s.uav_positions();
    check_swarm(&initial, "uavs", &mut out);
    for (k, station) in x.uav_positions.iter().enumerate() {
        check_swarm(station, &format!("P[:][{k}]"), &mut out);
    }

    out
}

fn validate_structure(x: &Solution, size: &ProblemSize) -> Result<(), InvalidSolution> {
    let dim = |field: &'static str, got: usize, expected: usize| {
        if got == expected {
            Ok(())
        } else {
            Err(InvalidSolution::Dimension { field, got, expected })
        }
    };
    dim("sensor_select", x.sensor_select.len(), size.n_clusters)?;
    dim("sensor_weights", x.sensor_weights.len(), size.n_clusters)?;
    dim("receiver", x.receiver.len(), size.n_clusters)?;
    dim("bs_order", x.bs_order.len(), size.n_base_stations)?;
    dim("uav_positions", x.uav_positions.len(), size.n_base_stations)?;
    dim("uav_weights", x.uav_weights.len(), size.n_base_stations)?;
    dim("t_perf", x.t_perf.len(), size.n_base_stations)?;
    for row in &x.sensor_select {
        dim("sensor_select[h]", row.len(), size.sensors_per_cluster)?;
    }
    for row in &x.sensor_weights {
        dim("sensor_weights[h]", row.len(), size.sensors_per_cluster)?;
        if row.iter().any(|w| !w.is_finite()) {
            return Err(InvalidSolution::NonFinite { field: "sensor_weights" });
        }
    }
    for (h, &a) in x.receiver.iter().enumerate() {
        if a >= size.n_uavs {
            return Err(InvalidSolution::ReceiverIndex { cluster: h, got: a, n_uavs: size.n_uavs });
        }
    }
    let mut seen = vec![false; size.n_base_stations];
    for &q in &x.bs_order {
        if q >= seen.len() || seen[q] {
            return Err(InvalidSolution::NotAPermutation);
        }
        seen[q] = true;
    }
    for station in &x.uav_positions {
        dim("uav_positions[k]", station.len(), size.n_uavs)?;
        if station.iter().any(|p| !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite())) {
            return Err(InvalidSolution::NonFinite { field: "uav_positions" });
        }
    }
    for row in &x.uav_weights {
        dim("uav_weights[k]", row.len(), size.n_uavs)?;
        if row.iter().any(|w| !w.is_finite()) {
            return Err(InvalidSolution::NonFinite { field: "uav_weights" });
        }
    }
    for (k, &t) in x.t_perf.iter().enumerate() {
        if !t.is_finite() {
            return Err(InvalidSolution::NonFinite { field: "t_perf" });
        }
        if t <= 0.0 {
            return Err(InvalidSolution::NonPositiveDuration { index: k, value: t });
        }
    }
    Ok(())
}

/// Objective evaluator bound to one scenario. Pure and reentrant: identical
/// inputs give bit-identical outputs, and populations may be evaluated
/// concurrently.
pub struct Evaluator<'a> {
    scenario: &'a Scenario,
    config: EvalConfig,
    grid: AngularGrid,
    wavelength_m: f64,
    size: ProblemSize,
}

impl<'a> Evaluator<'a> {
    pub fn new(scenario: &'a Scenario, config: EvalConfig) -> Result<Self, BeamformingError> {
        let grid = AngularGrid::from_step_deg(config.quadrature_step_deg)?;
        Ok(Self {
            scenario,
            wavelength_m: scenario.channel.wavelength_m(),
            size: ProblemSize::of(scenario),
            grid,
            config,
        })
    }

    pub fn scenario(&self) -> &Scenario {
        self.scenario
    }

    pub fn config(&self) -> &EvalConfig {
        &self.config
    }

    pub fn size(&self) -> ProblemSize {
        self.size
    }

    pub fn bounds(&self) -> ContinuousBounds {
        ContinuousBounds::new(self.scenario, &self.config)
    }

    fn gvaa_spec(&self, x: &Solution, h: usize, steer_target: &Point3) -> Option<(ArraySpec, Vec<bool>, Point3)> {
        let cluster = &self.scenario.clusters[h];
        let mask = x.sensor_select[h].clone();
        let selected: Vec<Point3> = cluster
            .sensors
            .iter()
            .zip(&mask)
            .filter(|(_, &m)| m)
            .map(|(sn, _)| sn.position)
            .collect();
        let centroid = Point3::centroid(selected.iter())?;
        let steer = direction_between(&centroid, steer_target).ok()?;
        let elements = cluster
            .sensors
            .iter()
            .zip(&x.sensor_weights[h])
            .map(|(sn, &w)| ArrayElement { position: sn.position, weight: w })
            .collect();
        Some((ArraySpec { elements, wavelength: self.wavelength_m, steer }, mask, centroid))
    }

    fn avaa_spec(&self, x: &Solution, k: usize) -> Option<(ArraySpec, Point3)> {
        let positions = &x.uav_positions[k];
        let centroid = Point3::centroid(positions.iter())?;
        let steer = direction_between(&centroid, &self.scenario.base_stations[k]).ok()?;
        let elements = positions
            .iter()
            .zip(&x.uav_weights[k])
            .map(|(&p, &w)| ArrayElement { position: p, weight: w })
            .collect();
        Some((ArraySpec { elements, wavelength: self.wavelength_m, steer }, centroid))
    }

    /// Beamformed link rate of one array toward a ground/air target, or 0.0
    /// for a pattern with no mainlobe.
    fn array_rate(
        &self,
        spec: &ArraySpec,
        mask: Option<&[bool]>,
        centroid: &Point3,
        target: &Point3,
        target_is_aerial: bool,
    ) -> f64 {
        let ch = &self.scenario.channel;
        if spec.selected_weight_sum(mask) == 0.0 {
            return 0.0;
        }
        let gain = spec
            .directivity_gain(mask, ch.array_efficiency, &self.grid)
            .expect("non-zero mainlobe checked above");
        let geom = if target_is_aerial {
            LinkGeometry::ground_air(centroid, target)
        } else {
            LinkGeometry::ground_air(target, centroid)
        };
        let weights: Vec<f64> = match mask {
            Some(m) => spec
                .elements
                .iter()
                .zip(m)
                .filter(|(_, &keep)| keep)
                .map(|(e, _)| e.weight)
                .collect(),
            None => spec.elements.iter().map(|e| e.weight).collect(),
        };
        cb_link_rate(gain, &geom, &weights, ch).unwrap_or(0.0)
    }

    /// Mission completion time and its per-phase breakdown.
    pub fn evaluate_f1(&self, x: &Solution) -> Result<(f64, MissionBreakdown), InvalidSolution> {
        let (_, breakdown) = self.evaluate_with_breakdown(x)?;
        Ok((breakdown.f1(), breakdown))
    }

    /// Summed eavesdropper-direction pattern ratios. Arrays with a zero
    /// mainlobe (or a degenerate eavesdropper direction) contribute `+∞`.
    pub fn evaluate_f2(&self, x: &Solution) -> Result<f64, InvalidSolution> {
        validate_structure(x, &self.size)?;
        let eaves = &self.scenario.eavesdropper;
        let mut total = 0.0;

        for k in 0..self.size.n_base_stations {
            let contribution = self
                .avaa_spec(x, k)
                .and_then(|(spec, centroid)| {
                    let dir = direction_between(&centroid, eaves).ok()?;
                    spec.sll_ratio(None, &dir).ok()
                })
                .unwrap_or(f64::INFINITY);
            total += contribution;
        }
        for h in 0..self.size.n_clusters {
            let receiver_pos = self.scenario.uavs[x.receiver[h]].position;
            let contribution = self
                .gvaa_spec(x, h, &receiver_pos)
                .and_then(|(spec, mask, centroid)| {
                    let dir = direction_between(&centroid, eaves).ok()?;
                    spec.sll_ratio(Some(&mask), &dir).ok()
                })
                .unwrap_or(f64::INFINITY);
            total += contribution;
        }
        Ok(total)
    }

    /// Swarm energy cost in joules.
    pub fn evaluate_f3(&self, x: &Solution) -> Result<f64, InvalidSolution> {
        let (_, breakdown) = self.evaluate_with_breakdown(x)?;
        Ok(breakdown.energy_j)
    }

    /// All three objectives.
    pub fn evaluate(&self, x: &Solution) -> Result<ObjectiveVector, InvalidSolution> {
        let (objectives, _) = self.evaluate_with_breakdown(x)?;
        Ok(objectives)
    }

    /// Evaluates the mission in one pass, sharing the per-array gain
    /// computations between the time and energy objectives.
    pub fn evaluate_with_breakdown(
        &self,
        x: &Solution,
    ) -> Result<(ObjectiveVector, MissionBreakdown), InvalidSolution> {
        validate_structure(x, &self.size)?;
        let s = self.scenario;
        let en = &s.energy;
        let n_uav = self.size.n_uavs;
        let n_bs = self.size.n_base_stations;
        let initial = s.uav_positions();

        // Ground-to-air: every cluster array transmits in parallel toward its
        // receiver UAV at the initial deployment; the phase lasts as long as
        // the slowest cluster.
        let mut g2a_rates = Vec::with_capacity(self.size.n_clusters);
        let mut t_g2a = 0.0f64;
        for h in 0..self.size.n_clusters {
            let receiver_pos = initial[x.receiver[h]];
            let rate = self
                .gvaa_spec(x, h, &receiver_pos)
                .map(|(spec, mask, centroid)| {
                    self.array_rate(&spec, Some(&mask), &centroid, &receiver_pos, true)
                })
                .unwrap_or(0.0);
            g2a_rates.push(rate);
            let data = s.clusters[h].data_volume_bits;
            if data > 0.0 {
                t_g2a = t_g2a.max(if rate > 0.0 { data / rate } else { f64::INFINITY });
            }
        }

        // Air-to-air: each receiver broadcasts its cluster's data to the rest
        // of the swarm at the slowest pairwise rate; broadcasts are
        // sequential. A single-UAV swarm has nobody to broadcast to.
        let mut a2a_rates = Vec::with_capacity(self.size.n_clusters);
        let mut t_a2a = 0.0f64;
        for h in 0..self.size.n_clusters {
            let rate = if n_uav > 1 {
                min_broadcast_rate(x.receiver[h], &initial, s.channel.p_max_w, &s.channel)
                    .unwrap_or(0.0)
            } else {
                f64::INFINITY
            };
            a2a_rates.push(rate);
            let data = s.clusters[h].data_volume_bits;
            if data > 0.0 {
                t_a2a += if rate > 0.0 { data / rate } else { f64::INFINITY };
            }
        }

        // Air-to-ground: serve stations in order. For each, the swarm flies
        // from its previous configuration within the shared time budget, then
        // hovers and transmits the full payload.
        let total_data: f64 = s.clusters.iter().map(|c| c.data_volume_bits).sum();
        let mut a2g_rates = vec![0.0; n_bs];
        let mut t_tran = vec![0.0; n_bs];
        let mut leg_energies = vec![vec![0.0; n_uav]; n_bs];
        let mut t_a2g_perf = 0.0;
        let mut t_a2g_tran = 0.0;
        let mut prev: &[Point3] = &initial;
        for &k in &x.bs_order {
            let duration = x.t_perf[k];
            t_a2g_perf += duration;
            let mut legs_feasible = true;
            for j in 0..n_uav {
                let leg = FlightLeg { start: prev[j], end: x.uav_positions[k][j], duration_s: duration };
                match leg_energy(&leg, en, self.config.v_max_ms) {
                    Ok(e) => leg_energies[k][j] = e,
                    Err(EnergyError::SpeedInfeasible { .. }) | Err(EnergyError::InfeasibleLeg) => {
                        leg_energies[k][j] = f64::INFINITY;
                        legs_feasible = false;
                    }
                    Err(e) => unreachable!("leg durations are validated positive: {e}"),
                }
            }

            let rate = self
                .avaa_spec(x, k)
                .map(|(spec, centroid)| {
                    self.array_rate(&spec, None, &centroid, &s.base_stations[k], false)
                })
                .unwrap_or(0.0);
            a2g_rates[k] = rate;
            // A station the swarm cannot legally reach never gets served.
            t_tran[k] = if total_data == 0.0 {
                0.0
            } else if rate > 0.0 && legs_feasible {
                total_data / rate
            } else {
                f64::INFINITY
            };
            t_a2g_tran += t_tran[k];
            prev = &x.uav_positions[k];
        }

        // Energy: every UAV hovers through each station transmission and the
        // broadcast phase, and pays its repositioning legs.
        let mut energy = 0.0;
        for k in 0..n_bs {
            let hover = if t_tran[k].is_finite() {
                hover_energy(t_tran[k], en).expect("non-negative duration")
            } else {
                f64::INFINITY
            };
            energy += n_uav as f64 * hover;
            for j in 0..n_uav {
                energy += leg_energies[k][j];
            }
        }
        energy += n_uav as f64
            * if t_a2a.is_finite() {
                hover_energy(t_a2a, en).expect("non-negative duration")
            } else {
                f64::INFINITY
            };

        let breakdown = MissionBreakdown {
            t_g2a_s: t_g2a,
            t_a2a_s: t_a2a,
            t_a2g_perf_s: t_a2g_perf,
            t_a2g_tran_s: t_a2g_tran,
            g2a_rates_bps: g2a_rates,
            a2a_min_rates_bps: a2a_rates,
            a2g_rates_bps: a2g_rates,
            t_tran_s: t_tran,
            leg_energies_j: leg_energies,
            energy_j: energy,
        };
        let f2 = self.evaluate_f2(x)?;
        let objectives = ObjectiveVector::new(breakdown.f1(), f2, breakdown.energy_j);
        Ok((objectives, breakdown))
    }
}

// --- JSON document mapping ---------------------------------------------------
//
// Solutions serialize with the decision-variable names of the formulation:
// D (selection bits), A (receiver indices), Q (service order), I_SN and
// I_UAV (weights), P (positions as [uav][station][x,y,z]), T_perf.

#[derive(Serialize, Deserialize)]
struct SolutionDoc {
    #[serde(rename = "D")]
    d: Vec<Vec<u8>>,
    #[serde(rename = "A")]
    a: Vec<usize>,
    #[serde(rename = "Q")]
    q: Vec<usize>,
    #[serde(rename = "I_SN")]
    i_sn: Vec<Vec<f64>>,
    #[serde(rename = "P")]
    p: Vec<Vec<[f64; 3]>>,
    #[serde(rename = "I_UAV")]
    i_uav: Vec<Vec<f64>>,
    #[serde(rename = "T_perf")]
    t_perf: Vec<f64>,
}

impl Serialize for Solution {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let n_uav = self.uav_positions.first().map_or(0, Vec::len);
        let n_bs = self.uav_positions.len();
        let doc = SolutionDoc {
            d: self
                .sensor_select
                .iter()
                .map(|row| row.iter().map(|&b| u8::from(b)).collect())
                .collect(),
            a: self.receiver.clone(),
            q: self.bs_order.clone(),
            i_sn: self.sensor_weights.clone(),
            p: (0..n_uav)
                .map(|j| {
                    (0..n_bs)
                        .map(|k| {
                            let p = self.uav_positions[k][j];
                            [p.x, p.y, p.z]
                        })
                        .collect()
                })
                .collect(),
            i_uav: (0..n_uav)
                .map(|j| (0..n_bs).map(|k| self.uav_weights[k][j]).collect())
                .collect(),
            t_perf: self.t_perf.clone(),
        };
        doc.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Solution {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let doc = SolutionDoc::deserialize(deserializer)?;
        let n_uav = doc.p.len();
        let n_bs = doc.p.first().map_or(0, Vec::len);
        for (j, row) in doc.p.iter().enumerate() {
            if row.len() != n_bs {
                return Err(serde::de::Error::custom(format!(
                    "P[{j}] has {} stations, expected {n_bs}",
                    row.len()
                )));
            }
        }
        if doc.i_uav.len() != n_uav {
            return Err(serde::de::Error::custom("I_UAV and P disagree on the UAV count"));
        }
        let mut uav_positions = vec![vec![Point3::new(0.0, 0.0, 0.0); n_uav]; n_bs];
        let mut uav_weights = vec![vec![0.0; n_uav]; n_bs];
        for j in 0..n_uav {
            if doc.i_uav[j].len() != n_bs {
                return Err(serde::de::Error::custom("I_UAV row length mismatch"));
            }
            for k in 0..n_bs {
                let [px, py, pz] = doc.p[j][k];
                uav_positions[k][j] = Point3::new(px, py, pz);
                uav_weights[k][j] = doc.i_uav[j][k];
            }
        }
        Ok(Solution {
            sensor_select: doc.d.into_iter().map(|row| row.into_iter().map(|b| b != 0).collect()).collect(),
            receiver: doc.a,
            bs_order: doc.q,
            sensor_weights: doc.i_sn,
            uav_positions,
            uav_weights,
            t_perf: doc.t_perf,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{generate_scenario, ScenarioConfig, ScenarioPreset};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn desk_scenario() -> Scenario {
        generate_scenario(&ScenarioPreset::Desk.config(), 42).unwrap()
    }

    fn coarse_config() -> EvalConfig {
        EvalConfig { quadrature_step_deg: 6.0, ..EvalConfig::default() }
    }

    /// A structurally valid, physics-feasible solution: UAVs stay at their
    /// initial positions, every weight at 1, first sensors selected.
    fn stay_put_solution(s: &Scenario) -> Solution {
        let size = ProblemSize::of(s);
        let mut x = Solution::zeroed(&size);
        for h in 0..size.n_clusters {
            for i in 0..s.n_select {
                x.sensor_select[h][i] = true;
            }
            x.sensor_weights[h] = vec![1.0; size.sensors_per_cluster];
            x.receiver[h] = h % size.n_uavs;
        }
        for k in 0..size.n_base_stations {
            for (j, u) in s.uavs.iter().enumerate() {
                x.uav_positions[k][j] = u.position;
            }
            x.uav_weights[k] = vec![1.0; size.n_uavs];
            x.t_perf[k] = 5.0;
        }
        x
    }

    #[test]
    fn solution_length_matches_formula() {
        assert_eq!(
            solution_length(&ProblemSize {
                n_clusters: 2,
                sensors_per_cluster: 50,
                n_uavs: 16,
                n_base_stations: 8
            }),
            730
        );
        assert_eq!(
            solution_length(&ProblemSize {
                n_clusters: 4,
                sensors_per_cluster: 50,
                n_uavs: 32,
                n_base_stations: 8
            }),
            1444
        );
        assert_eq!(
            solution_length(&ProblemSize {
                n_clusters: 1,
                sensors_per_cluster: 1,
                n_uavs: 1,
                n_base_stations: 1
            }),
            9
        );
    }

    #[test]
    fn continuous_dim_count_consistent_with_length() {
        let s = desk_scenario();
        let bounds = ContinuousBounds::new(&s, &EvalConfig::default());
        let size = ProblemSize::of(&s);
        // Total = continuous + binary (N_SN·N_IoT) + integer (N_IoT) + order (N_BS).
        let discrete = size.sensors_per_cluster * size.n_clusters + size.n_clusters + size.n_base_stations;
        assert_eq!(bounds.dim_count() + discrete, solution_length(&size));
    }

    #[test]
    fn zero_data_leaves_only_repositioning_time() {
        let mut s = desk_scenario();
        for c in &mut s.clusters {
            c.data_volume_bits = 0.0;
        }
        let ev = Evaluator::new(&s, coarse_config()).unwrap();
        let x = stay_put_solution(&s);
        let (f1, breakdown) = ev.evaluate_f1(&x).unwrap();
        let expected: f64 = x.t_perf.iter().sum();
        assert_eq!(f1, expected);
        assert_eq!(breakdown.t_g2a_s, 0.0);
        assert_eq!(breakdown.t_a2a_s, 0.0);
        assert_eq!(breakdown.t_a2g_tran_s, 0.0);
    }

    #[test]
    fn zero_weights_in_one_cluster_are_infinite_time() {
        let s = desk_scenario();
        let ev = Evaluator::new(&s, coarse_config()).unwrap();
        let mut x = stay_put_solution(&s);
        x.sensor_weights[1] = vec![0.0; s.sensors_per_cluster()];
        let (f1, _) = ev.evaluate_f1(&x).unwrap();
        assert_eq!(f1, f64::INFINITY);
    }

    #[test]
    fn breakdown_identity_holds() {
        let s = desk_scenario();
        let ev = Evaluator::new(&s, coarse_config()).unwrap();
        let x = stay_put_solution(&s);
        let (obj, breakdown) = ev.evaluate_with_breakdown(&x).unwrap();
        assert!(obj.is_finite(), "{obj:?}");
        assert_eq!(
            obj.f1_s,
            breakdown.t_g2a_s + breakdown.t_a2a_s + breakdown.t_a2g_perf_s + breakdown.t_a2g_tran_s
        );
        assert_eq!(obj.f3_j, breakdown.energy_j);
    }

    #[test]
    fn evaluate_is_deterministic() {
        let s = desk_scenario();
        let ev = Evaluator::new(&s, coarse_config()).unwrap();
        let x = stay_put_solution(&s);
        let a = ev.evaluate(&x).unwrap();
        let b = ev.evaluate(&x).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn single_element_arrays_make_f2_count_arrays() {
        // One UAV and one selected sensor per cluster: every array has a
        // single element, whose pattern ratio is 1 in any direction.
        let mut cfg = ScenarioConfig::default();
        cfg.n_clusters = 2;
        cfg.sensors_per_cluster = 4;
        cfg.n_select = 1;
        cfg.n_uavs = 1;
        cfg.n_base_stations = 3;
        let s = generate_scenario(&cfg, 5).unwrap();
        let ev = Evaluator::new(&s, coarse_config()).unwrap();
        let mut x = stay_put_solution(&s);
        for h in 0..2 {
            x.sensor_select[h] = vec![false; 4];
            x.sensor_select[h][0] = true;
        }
        let f2 = ev.evaluate_f2(&x).unwrap();
        assert_relative_eq!(f2, (3 + 2) as f64, max_relative = 1e-12);
    }

    #[test]
    fn eavesdropper_on_the_mainlobe_contributes_one() {
        let mut s = desk_scenario();
        // Eavesdropper exactly at station 0: that aerial array's ratio is 1.
        s.eavesdropper = s.base_stations[0];
        let ev = Evaluator::new(&s, coarse_config()).unwrap();
        let x = stay_put_solution(&s);

        let (spec, centroid) = ev.avaa_spec(&x, 0).unwrap();
        let dir = direction_between(&centroid, &s.eavesdropper).unwrap();
        assert_relative_eq!(spec.sll_ratio(None, &dir).unwrap(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn speed_infeasible_legs_blow_up_both_objectives() {
        let s = desk_scenario();
        let ev = Evaluator::new(&s, coarse_config()).unwrap();
        let mut x = stay_put_solution(&s);
        // 1 s to cross the whole region is far above the speed limit.
        for p in &mut x.uav_positions[x.bs_order[0]] {
            p.x = -p.x.signum() * 49.0;
        }
        x.t_perf[x.bs_order[0]] = 1.0;
        let (obj, _) = ev.evaluate_with_breakdown(&x).unwrap();
        assert_eq!(obj.f1_s, f64::INFINITY);
        assert_eq!(obj.f3_j, f64::INFINITY);
    }

    #[test]
    fn hover_only_energy_for_stationary_zero_data_mission() {
        let mut s = desk_scenario();
        for c in &mut s.clusters {
            c.data_volume_bits = 0.0;
        }
        let ev = Evaluator::new(&s, coarse_config()).unwrap();
        let x = stay_put_solution(&s);
        let f3 = ev.evaluate_f3(&x).unwrap();
        let t_total: f64 = x.t_perf.iter().sum();
        let expected = s.n_uavs() as f64 * crate::energy::hover_energy(t_total, &s.energy).unwrap();
        assert_relative_eq!(f3, expected, max_relative = 1e-12);
    }

    #[test]
    fn f3_is_q_invariant_when_all_configurations_coincide() {
        let s = desk_scenario();
        let ev = Evaluator::new(&s, coarse_config()).unwrap();
        let mut x = stay_put_solution(&s);
        let f3_identity = ev.evaluate_f3(&x).unwrap();
        x.bs_order.reverse();
        let f3_reversed = ev.evaluate_f3(&x).unwrap();
        assert_eq!(f3_identity, f3_reversed);
    }

    #[test]
    fn scaling_one_array_keeps_f2_and_weakly_raises_f1() {
        let s = desk_scenario();
        let ev = Evaluator::new(&s, coarse_config()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut x = stay_put_solution(&s);
        for w in &mut x.sensor_weights[0] {
            *w = rng.gen_range(0.2..1.0);
        }
        let base = ev.evaluate(&x).unwrap();
        let mut scaled = x.clone();
        for w in &mut scaled.sensor_weights[0] {
            *w *= 0.5;
        }
        let after = ev.evaluate(&scaled).unwrap();
        assert_relative_eq!(base.f2, after.f2, max_relative = 1e-12);
        assert!(after.f1_s >= base.f1_s);
    }

    #[test]
    fn structural_errors_are_reported() {
        let s = desk_scenario();
        let ev = Evaluator::new(&s, coarse_config()).unwrap();
        let mut x = stay_put_solution(&s);
        x.receiver[0] = 999;
        assert!(matches!(ev.evaluate(&x), Err(InvalidSolution::ReceiverIndex { .. })));
        let mut y = stay_put_solution(&s);
        y.bs_order[0] = y.bs_order[1];
        assert_eq!(ev.evaluate(&y), Err(InvalidSolution::NotAPermutation));
        let mut z = stay_put_solution(&s);
        z.t_perf[0] = 0.0;
        assert!(matches!(ev.evaluate(&z), Err(InvalidSolution::NonPositiveDuration { .. })));
    }

    #[test]
    fn constraint_checks_report_and_pass() {
        let s = desk_scenario();
        let x = stay_put_solution(&s);
        assert!(check_constraints(&x, &s).is_empty());

        let mut bad = x.clone();
        bad.uav_positions[0][1] = bad.uav_positions[0][0];
        let violations = check_constraints(&bad, &s);
        assert!(violations.iter().any(|v| v.constraint == "min_separation"), "{violations:?}");

        let mut heavy = x.clone();
        heavy.sensor_weights[0][0] = 1.3;
        let violations = check_constraints(&heavy, &s);
        assert!(violations.iter().any(|v| v.constraint == "weight_bounds"), "{violations:?}");

        let mut wrong_count = x.clone();
        wrong_count.sensor_select[0][s.n_select] = true;
        let violations = check_constraints(&wrong_count, &s);
        assert!(violations.iter().any(|v| v.constraint == "selection_count"), "{violations:?}");

        let mut repeated = x.clone();
        repeated.bs_order[0] = repeated.bs_order[1];
        let violations = check_constraints(&repeated, &s);
        assert!(
            violations.iter().any(|v| v.constraint == "service_order_permutation"),
            "{violations:?}"
        );
    }

    #[test]
    fn clamp_respects_bounds() {
        let s = desk_scenario();
        let bounds = ContinuousBounds::new(&s, &EvalConfig::default());
        let mut x = stay_put_solution(&s);
        x.sensor_weights[0][0] = 1.3;
        x.uav_positions[0][0].z = 500.0;
        x.t_perf[0] = 1e6;
        bounds.clamp(&mut x);
        assert_eq!(x.sensor_weights[0][0], 1.0);
        assert_eq!(x.uav_positions[0][0].z, s.altitude_band.1);
        assert_eq!(x.t_perf[0], 120.0);
    }

    #[test]
    fn solution_json_round_trip() {
        let s = desk_scenario();
        let x = stay_put_solution(&s);
        let json = serde_json::to_string(&x).unwrap();
        for key in ["\"D\"", "\"A\"", "\"Q\"", "\"I_SN\"", "\"P\"", "\"I_UAV\"", "\"T_perf\""] {
            assert!(json.contains(key), "missing {key} in {json}");
        }
        let back: Solution = serde_json::from_str(&json).unwrap();
        assert_eq!(x, back);
    }
}
