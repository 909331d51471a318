//! Non-beamforming reference strategies for the same harvesting mission:
//! relaying over a per-cluster multi-hop chain, and shuttling UAVs between
//! clusters and base stations. Both are deterministic analytic models over a
//! scenario, reusing the single-antenna link and propulsion formulas, and
//! they price the mission in the same units as the optimizer results.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::{a2a_rate, cb_link_rate, LinkGeometry};
use crate::energy::{hover_energy, leg_energy, FlightLeg};
use crate::geometry::Point3;
use crate::scenario::Scenario;

#[derive(Debug, Error, PartialEq)]
pub enum StrategyError {
    #[error("{n_uavs} UAVs cannot be split evenly across {n_clusters} clusters")]
    UnevenAssignment { n_uavs: usize, n_clusters: usize },
    #[error("scenario has no {0}")]
    EmptyScenario(&'static str),
}

/// Tunables of the reference strategies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyConfig {
    /// Cruise speed of every repositioning leg, m/s.
    pub cruise_speed_ms: f64,
    /// Hover altitude for collection, relaying, and dissemination; the
    /// middle of the scenario's altitude band when unset.
    pub standoff_altitude_m: Option<f64>,
    /// Hops slower than this are reported as unreachable (infinite time).
    pub min_hop_rate_bps: f64,
}

impl Default for StrategyConfig {
    fn default() -> Self {
        Self { cruise_speed_ms: 10.0, standoff_altitude_m: None, min_hop_rate_bps: 1e3 }
    }
}

/// One costed step of a strategy schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseCost {
    pub label: String,
    pub seconds: f64,
    pub joules: f64,
}

/// The schedule of one independently operating agent group (a cluster's
/// chain, or a single shuttling UAV).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentTrace {
    pub label: String,
    pub phases: Vec<PhaseCost>,
}

impl AgentTrace {
    pub fn total_seconds(&self) -> f64 {
        self.phases.iter().map(|p| p.seconds).sum()
    }

    pub fn total_joules(&self) -> f64 {
        self.phases.iter().map(|p| p.joules).sum()
    }
}

/// Mission cost of a strategy: groups run in parallel, so the mission lasts
/// as long as the slowest group, while energy accumulates over all of them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyResult {
    pub mission_time_s: f64,
    pub energy_j: f64,
    pub trace: Vec<AgentTrace>,
}

impl StrategyResult {
    fn from_trace(trace: Vec<AgentTrace>) -> Self {
        let mission_time_s =
            trace.iter().map(AgentTrace::total_seconds).fold(0.0f64, f64::max);
        let energy_j = trace.iter().map(AgentTrace::total_joules).sum();
        Self { mission_time_s, energy_j, trace }
    }
}

fn standoff_altitude(s: &Scenario, cfg: &StrategyConfig) -> f64 {
    cfg.standoff_altitude_m.unwrap_or(0.5 * (s.altitude_band.0 + s.altitude_band.1))
}

fn cluster_source(s: &Scenario, h: usize) -> Point3 {
    Point3::centroid(s.clusters[h].sensors.iter().map(|sn| &sn.position))
        .expect("clusters are non-empty")
}

/// Single-antenna ground↔air rate under the probabilistic LoS model.
fn single_link_rate(s: &Scenario, ground: &Point3, air: &Point3) -> f64 {
    let geom = LinkGeometry::ground_air(ground, air);
    cb_link_rate(1.0, &geom, &[1.0], &s.channel).unwrap_or(0.0)
}

/// Repositions a group to target positions at cruise speed: one shared
/// duration sized by the longest leg. Returns (seconds, joules) and moves
/// `current` to the targets.
fn reposition(
    s: &Scenario,
    cfg: &StrategyConfig,
    current: &mut [Point3],
    targets: &[Point3],
) -> PhaseCost {
    let longest = current
        .iter()
        .zip(targets)
        .map(|(a, b)| a.distance(b))
        .fold(0.0f64, f64::max);
    let seconds = longest / cfg.cruise_speed_ms;
    let mut joules = 0.0;
    if seconds > 0.0 {
        for (a, b) in current.iter().zip(targets) {
            let leg = FlightLeg { start: *a, end: *b, duration_s: seconds };
            joules += leg_energy(&leg, &s.energy, cfg.cruise_speed_ms * (1.0 + 1e-9))
                .expect("legs fly at or below cruise speed");
        }
    }
    current.copy_from_slice(targets);
    PhaseCost { label: String::new(), seconds, joules }
}

/// Store-and-forward relaying: each cluster's UAVs form a chain of equally
/// spaced relays from the cluster toward one station at a time, and the full
/// payload crosses every hop before the chain swings to the next station.
/// Chains of different clusters operate in parallel.
pub fn strategy_multihop(s: &Scenario, cfg: &StrategyConfig) -> Result<StrategyResult, StrategyError> {
    let n_uavs = s.n_uavs();
    let n_clusters = s.n_clusters();
    if n_clusters == 0 {
        return Err(StrategyError::EmptyScenario("clusters"));
    }
    if s.n_base_stations() == 0 {
        return Err(StrategyError::EmptyScenario("base stations"));
    }
    if n_uavs == 0 || n_uavs % n_clusters != 0 {
        return Err(StrategyError::UnevenAssignment { n_uavs, n_clusters });
    }
    let chain_len = n_uavs / n_clusters;
    let altitude = standoff_altitude(s, cfg);

    let mut trace = Vec::with_capacity(n_clusters);
    for h in 0..n_clusters {
        let source = cluster_source(s, h);
        let data = s.clusters[h].data_volume_bits;
        let mut positions: Vec<Point3> = s.uavs[h * chain_len..(h + 1) * chain_len]
            .iter()
            .map(|u| u.position)
            .collect();
        let mut phases = Vec::new();

        for (k, bs) in s.base_stations.iter().enumerate() {
            // Relay r sits at fraction r/(chain_len+1) of the source→station
            // line, at the standoff altitude.
            let chain: Vec<Point3> = (1..=chain_len)
                .map(|r| {
                    let f = r as f64 / (chain_len + 1) as f64;
                    Point3::new(
                        source.x + f * (bs.x - source.x),
                        source.y + f * (bs.y - source.y),
                        altitude,
                    )
                })
                .collect();
            let mut leg = reposition(s, cfg, &mut positions, &chain);
            leg.label = format!("cluster{h}:reposition→bs{k}");
            phases.push(leg);

            let mut seconds = 0.0;
            if data > 0.0 {
                let mut hop_rates = Vec::with_capacity(chain_len + 1);
                hop_rates.push(single_link_rate(s, &source, &chain[0]));
                for w in chain.windows(2) {
                    hop_rates
                        .push(a2a_rate(&w[0], &w[1], s.channel.p_max_w, &s.channel).unwrap_or(0.0));
                }
                hop_rates.push(single_link_rate(s, bs, &chain[chain_len - 1]));
                for rate in hop_rates {
                    seconds += if rate >= cfg.min_hop_rate_bps { data / rate } else { f64::INFINITY };
                }
            }
            let joules = if seconds.is_finite() {
                chain_len as f64 * hover_energy(seconds, &s.energy).expect("non-negative")
            } else {
                f64::INFINITY
            };
            phases.push(PhaseCost { label: format!("cluster{h}:relay→bs{k}"), seconds, joules });
        }
        trace.push(AgentTrace { label: format!("cluster{h}"), phases });
    }
    Ok(StrategyResult::from_trace(trace))
}

/// Shuttling: every (cluster, station) pair is assigned round-robin to a
/// UAV, which flies to the cluster, hovers to collect, flies to the station,
/// and hovers to disseminate. UAVs work their assignments sequentially and
/// in parallel with each other.
pub fn strategy_flybetween(
    s: &Scenario,
    cfg: &StrategyConfig,
) -> Result<StrategyResult, StrategyError> {
    let n_uavs = s.n_uavs();
    if n_uavs == 0 {
        return Err(StrategyError::EmptyScenario("UAVs"));
    }
    if s.n_clusters() == 0 {
        return Err(StrategyError::EmptyScenario("clusters"));
    }
    if s.n_base_stations() == 0 {
        return Err(StrategyError::EmptyScenario("base stations"));
    }
    let altitude = standoff_altitude(s, cfg);

    let mut assignments: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n_uavs];
    let mut next = 0usize;
    for h in 0..s.n_clusters() {
        for k in 0..s.n_base_stations() {
            assignments[next % n_uavs].push((h, k));
            next += 1;
        }
    }

    let mut trace = Vec::new();
    for (j, tasks) in assignments.iter().enumerate() {
        if tasks.is_empty() {
            continue;
        }
        let mut position = [s.uavs[j].position];
        let mut phases = Vec::new();
        for &(h, k) in tasks {
            let source = cluster_source(s, h);
            let data = s.clusters[h].data_volume_bits;

            let collect_point = [Point3::new(source.x, source.y, altitude)];
            let mut leg = reposition(s, cfg, &mut position, &collect_point);
            leg.label = format!("uav{j}:fly→cluster{h}");
            phases.push(leg);

            let rate = single_link_rate(s, &source, &position[0]);
            let seconds = if data == 0.0 {
                0.0
            } else if rate > 0.0 {
                data / rate
            } else {
                f64::INFINITY
            };
            phases.push(PhaseCost {
                label: format!("uav{j}:collect@cluster{h}"),
                seconds,
                joules: if seconds.is_finite() {
                    hover_energy(seconds, &s.energy).expect("non-negative")
                } else {
                    f64::INFINITY
                },
            });

            let bs = s.base_stations[k];
            let dissem_point = [Point3::new(bs.x, bs.y, altitude)];
            let mut leg = reposition(s, cfg, &mut position, &dissem_point);
            leg.label = format!("uav{j}:fly→bs{k}");
            phases.push(leg);

            let rate = single_link_rate(s, &bs, &position[0]);
            let seconds = if data == 0.0 {
                0.0
            } else if rate > 0.0 {
                data / rate
            } else {
                f64::INFINITY
            };
            phases.push(PhaseCost {
                label: format!("uav{j}:disseminate→bs{k}"),
                seconds,
                joules: if seconds.is_finite() {
                    hover_energy(seconds, &s.energy).expect("non-negative")
                } else {
                    f64::INFINITY
                },
            });
        }
        trace.push(AgentTrace { label: format!("uav{j}"), phases });
    }
    Ok(StrategyResult::from_trace(trace))
}
