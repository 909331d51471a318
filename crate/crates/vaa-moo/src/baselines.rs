//! Comparison optimizers sharing the same evaluator, archive, and discrete
//! update machinery as the enhanced optimizer, so measured differences come
//! from the enhancements alone:
//!
//! * conventional multi-objective salp swarm — uniform continuous
//!   initialization and fresh uniform `c2`/`c3` each iteration;
//! * multi-objective particle swarm — per-particle velocity and personal
//!   best with archive leaders, linearly decaying inertia;
//! * a non-optimizing reference that selects sensors at random and lines the
//!   UAVs up as a uniform linear array broadside to each station.
//!
//! The conventional algorithms cannot represent the discrete genome parts
//! natively, so both reuse the structure-preserving rules from
//! [`crate::operators`]; only initialization, the parameter schedule, and
//! (for the particle swarm) the continuous dynamics differ.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::time::Instant;

use crate::geometry::Point3;
use crate::operators::{
    init_solution_uniform, repair_constraints, update_discrete, LevyParams,
};
use crate::pareto::{dominates, Archive};
use crate::problem::{ObjectiveVector, Solution};
use crate::runner::{
    archive_generation, ensure_valid_scenario, evaluate_population, final_entries,
    objective_order, select_guide, sort_population, substream, RunConfig, RunError, RunResult,
    TAG_INIT, TAG_LEADER, TAG_PARAMS, TAG_PBEST, TAG_REPAIR, TAG_UPDATE,
};
use crate::scenario::Scenario;

/// Exploration weight `c1 = 2·exp(−(4t/t_max)²)` shared by the salp update
/// and the discrete-part gates of every optimizer here.
pub fn exploration_weight(t: usize, t_max: usize) -> f64 {
    let ratio = if t_max == 0 { 0.0 } else { 4.0 * t as f64 / t_max as f64 };
    2.0 * (-(ratio * ratio)).exp()
}

/// Parameters of the conventional salp baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MssaParams {
    pub run: RunConfig,
    pub levy: LevyParams,
    pub max_repair_attempts: usize,
}

impl Default for MssaParams {
    fn default() -> Self {
        Self { run: RunConfig::default(), levy: LevyParams::default(), max_repair_attempts: 50 }
    }
}

/// Conventional multi-objective salp swarm on the shared problem machinery.
pub fn run_mssa(s: &Scenario, params: &MssaParams) -> Result<RunResult, RunError> {
    ensure_valid_scenario(s)?;
    if params.run.pop_size == 0 {
        return Err(RunError::InvalidParams("population size must be at least 1".into()));
    }
    params.levy.validate().map_err(RunError::InvalidParams)?;
    let started = Instant::now();

    let ev = crate::problem::Evaluator::new(s, params.run.eval.clone())?;
    let bounds = ev.bounds();
    let seed = params.run.rng_seed;
    let n_uavs = s.n_uavs();

    let mut pop: Vec<Solution> = (0..params.run.pop_size)
        .map(|m| {
            let mut rng = substream(seed, &[TAG_INIT, m as u64]);
            let mut x = init_solution_uniform(s, &bounds, &mut rng);
            repair_constraints(&mut x, s, &bounds, &params.levy, params.max_repair_attempts, &mut rng);
            x
        })
        .collect();

    let mut archive: Archive<Solution> =
        Archive::new(params.run.archive_capacity, params.run.grid_divisions);
    let mut snapshots = Vec::with_capacity(params.run.max_iters + 1);
    let mut objectives = evaluate_population(&ev, &pop);
    snapshots.push(archive_generation(&mut archive, &pop, &objectives, 0, seed));

    for t in 1..=params.run.max_iters {
        let c1 = exploration_weight(t, params.run.max_iters);
        let mut param_rng = substream(seed, &[TAG_PARAMS, t as u64]);
        let c2: f64 = param_rng.gen();
        let c3: f64 = param_rng.gen();

        let mut chain: Vec<(Solution, ObjectiveVector)> =
            pop.drain(..).zip(objectives.drain(..)).collect();
        sort_population(&mut chain);
        let population_best = chain[0].0.clone();
        let n_leaders = (chain.len() / 2).max(1);

        // One food source per generation, as in the enhanced optimizer.
        let mut leader_rng = substream(seed, &[TAG_LEADER, t as u64]);
        let guide = select_guide(&archive, &population_best, &mut leader_rng);

        let mut next: Vec<Solution> = Vec::with_capacity(chain.len());
        for (m, (x, _)) in chain.iter().enumerate() {
            let mut child = x.clone();

            if m < n_leaders {
                let guide_vals = bounds.flatten(&guide);
                let mut idx = 0;
                bounds.for_each_value(&mut child, |v, lb, ub| {
                    let delta = c1 * ((ub - lb) * c2 + lb);
                    *v = if c3 >= 0.5 { guide_vals[idx] + delta } else { guide_vals[idx] - delta };
                    idx += 1;
                });
            } else {
                let prev_vals = bounds.flatten(&next[m - 1]);
                let mut idx = 0;
                bounds.for_each_value(&mut child, |v, _, _| {
                    *v = 0.5 * (*v + prev_vals[idx]);
                    idx += 1;
                });
            }

            let mut update_rng = substream(seed, &[TAG_UPDATE, t as u64, m as u64]);
            update_discrete(&mut child, &guide, c1, n_uavs, &mut update_rng);
            let mut repair_rng = substream(seed, &[TAG_REPAIR, t as u64, m as u64]);
            repair_constraints(
                &mut child,
                s,
                &bounds,
                &params.levy,
                params.max_repair_attempts,
                &mut repair_rng,
            );
            next.push(child);
        }

        pop = next;
        objectives = evaluate_population(&ev, &pop);
        snapshots.push(archive_generation(&mut archive, &pop, &objectives, t, seed));
    }

    Ok(RunResult {
        algo: "mssa".into(),
        seed,
        params: serde_json::to_value(params).expect("params serialize"),
        snapshots,
        final_entries: final_entries(&archive),
        eval_count: (params.run.pop_size * (params.run.max_iters + 1)) as u64,
        wall_clock_s: started.elapsed().as_secs_f64(),
    })
}

/// Parameters of the particle-swarm baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MopsoParams {
    pub run: RunConfig,
    pub levy: LevyParams,
    pub max_repair_attempts: usize,
    /// Inertia decays linearly from `w_start` to `w_end`.
    pub w_start: f64,
    pub w_end: f64,
    pub c_cognitive: f64,
    pub c_social: f64,
}

impl Default for MopsoParams {
    fn default() -> Self {
        Self {
            run: RunConfig::default(),
            levy: LevyParams::default(),
            max_repair_attempts: 50,
            w_start: 0.9,
            w_end: 0.4,
            c_cognitive: 2.0,
            c_social: 2.0,
        }
    }
}

/// Multi-objective particle swarm with archive leaders and the shared
/// discrete-part adaptation.
pub fn run_mopso(s: &Scenario, params: &MopsoParams) -> Result<RunResult, RunError> {
    ensure_valid_scenario(s)?;
    if params.run.pop_size == 0 {
        return Err(RunError::InvalidParams("population size must be at least 1".into()));
    }
    params.levy.validate().map_err(RunError::InvalidParams)?;
    let started = Instant::now();

    let ev = crate::problem::Evaluator::new(s, params.run.eval.clone())?;
    let bounds = ev.bounds();
    let seed = params.run.rng_seed;
    let n_uavs = s.n_uavs();
    let dims = bounds.dim_count();

    let mut pop: Vec<Solution> = (0..params.run.pop_size)
        .map(|m| {
            let mut rng = substream(seed, &[TAG_INIT, m as u64]);
            let mut x = init_solution_uniform(s, &bounds, &mut rng);
            repair_constraints(&mut x, s, &bounds, &params.levy, params.max_repair_attempts, &mut rng);
            x
        })
        .collect();
    let mut velocities = vec![vec![0.0f64; dims]; params.run.pop_size];

    let mut archive: Archive<Solution> =
        Archive::new(params.run.archive_capacity, params.run.grid_divisions);
    let mut snapshots = Vec::with_capacity(params.run.max_iters + 1);
    let mut objectives = evaluate_population(&ev, &pop);
    snapshots.push(archive_generation(&mut archive, &pop, &objectives, 0, seed));
    let mut pbest: Vec<(Solution, ObjectiveVector)> =
        pop.iter().cloned().zip(objectives.iter().copied()).collect();

    for t in 1..=params.run.max_iters {
        let c1 = exploration_weight(t, params.run.max_iters);
        let w = params.w_start
            - (params.w_start - params.w_end) * t as f64 / params.run.max_iters as f64;
        let population_best = pop
            .iter()
            .zip(&objectives)
            .min_by(|a, b| objective_order(a.1, b.1))
            .map(|(x, _)| x.clone())
            .expect("population is non-empty");

        for m in 0..pop.len() {
            let mut leader_rng = substream(seed, &[TAG_LEADER, t as u64, m as u64]);
            let guide = select_guide(&archive, &population_best, &mut leader_rng);
            let guide_vals = bounds.flatten(&guide);
            let pbest_vals = bounds.flatten(&pbest[m].0);

            let mut update_rng = substream(seed, &[TAG_UPDATE, t as u64, m as u64]);
            let velocity = &mut velocities[m];
            let mut idx = 0;
            bounds.for_each_value(&mut pop[m], |v, lb, ub| {
                let r1: f64 = update_rng.gen();
                let r2: f64 = update_rng.gen();
                let range = ub - lb;
                let mut vel = w * velocity[idx]
                    + params.c_cognitive * r1 * (pbest_vals[idx] - *v)
                    + params.c_social * r2 * (guide_vals[idx] - *v);
                vel = vel.clamp(-range, range);
                velocity[idx] = vel;
                *v += vel;
                idx += 1;
            });

            update_discrete(&mut pop[m], &guide, c1, n_uavs, &mut update_rng);
            let mut repair_rng = substream(seed, &[TAG_REPAIR, t as u64, m as u64]);
            repair_constraints(
                &mut pop[m],
                s,
                &bounds,
                &params.levy,
                params.max_repair_attempts,
                &mut repair_rng,
            );
        }

        objectives = evaluate_population(&ev, &pop);
        for m in 0..pop.len() {
            let new = objectives[m];
            let old = pbest[m].1;
            let replace = if dominates(&new, &old) {
                true
            } else if dominates(&old, &new) {
                false
            } else {
                // Mutually non-dominated: replace on a fair coin.
                substream(seed, &[TAG_PBEST, t as u64, m as u64]).gen::<bool>()
            };
            if replace {
                pbest[m] = (pop[m].clone(), new);
            }
        }
        snapshots.push(archive_generation(&mut archive, &pop, &objectives, t, seed));
    }

    Ok(RunResult {
        algo: "mopso".into(),
        seed,
        params: serde_json::to_value(params).expect("params serialize"),
        snapshots,
        final_entries: final_entries(&archive),
        eval_count: (params.run.pop_size * (params.run.max_iters + 1)) as u64,
        wall_clock_s: started.elapsed().as_secs_f64(),
    })
}

/// Builds the non-optimizing reference solution: random sensor selection at
/// full excitation, random receivers, stations served in index order, and
/// the swarm lined up as a uniform linear array broadside to each station at
/// the middle of the altitude band. Spacing is the larger of λ/2 and the
/// collision distance so the separation constraint holds by construction.
pub fn random_laa_solution(s: &Scenario, t_min_s: f64, rng: &mut ChaCha8Rng) -> Solution {
    let size = crate::problem::ProblemSize::of(s);
    let mut x = Solution::zeroed(&size);

    for h in 0..size.n_clusters {
        let picks = crate::operators::random_permutation(size.sensors_per_cluster, rng);
        for &i in picks.iter().take(s.n_select) {
            x.sensor_select[h][i] = true;
        }
        x.receiver[h] = rng.gen_range(0..size.n_uavs);
        x.sensor_weights[h] = vec![1.0; size.sensors_per_cluster];
    }
    x.bs_order = (0..size.n_base_stations).collect();

    // Slight pad keeps rotated offsets above d_min despite rounding.
    let spacing = (s.channel.wavelength_m() / 2.0).max(s.d_min_m) + 1e-6;
    let initial = s.uav_positions();
    let center = Point3::centroid(initial.iter()).expect("swarm is non-empty");
    let z_mid = 0.5 * (s.altitude_band.0 + s.altitude_band.1);
    let half_extent = spacing * (size.n_uavs as f64 - 1.0) / 2.0;
    let (x0, x1) = s.uav_region.x_range();
    let (y0, y1) = s.uav_region.y_range();

    for k in 0..size.n_base_stations {
        let bs = s.base_stations[k];
        let azimuth = (bs.y - center.y).atan2(bs.x - center.x);
        // Array axis perpendicular to the station bearing (broadside).
        let (ux, uy) = (-azimuth.sin(), azimuth.cos());
        // Keep the whole line inside the region.
        let cx = center.x.clamp(x0 + half_extent * ux.abs(), x1 - half_extent * ux.abs());
        let cy = center.y.clamp(y0 + half_extent * uy.abs(), y1 - half_extent * uy.abs());
        for j in 0..size.n_uavs {
            let offset = (j as f64 - (size.n_uavs as f64 - 1.0) / 2.0) * spacing;
            x.uav_positions[k][j] = Point3::new(cx + ux * offset, cy + uy * offset, z_mid);
        }
        x.uav_weights[k] = vec![1.0; size.n_uavs];
    }

    // Repositioning budgets sized for a 10 m/s cruise on the longest leg.
    let mut prev: Vec<Point3> = initial;
    for k in 0..size.n_base_stations {
        let longest = prev
            .iter()
            .zip(&x.uav_positions[k])
            .map(|(a, b)| a.distance(b))
            .fold(0.0f64, f64::max);
        x.t_perf[k] = (longest / 10.0).max(t_min_s);
        prev = x.uav_positions[k].clone();
    }
    x
}

/// Evaluates one random linear-array solution per run, packaged as a
/// single-iteration result for the comparison harness.
pub fn run_random_laa(s: &Scenario, run: &RunConfig) -> Result<RunResult, RunError> {
    ensure_valid_scenario(s)?;
    let started = Instant::now();
    let ev = crate::problem::Evaluator::new(s, run.eval.clone())?;
    let mut rng = substream(run.rng_seed, &[TAG_INIT, 0]);
    let x = random_laa_solution(s, run.eval.t_perf_bounds_s.0, &mut rng);
    let objectives = ev.evaluate(&x).expect("reference solution is structurally valid");

    let mut archive: Archive<Solution> = Archive::new(run.archive_capacity, run.grid_divisions);
    let pop = vec![x];
    let objs = vec![objectives];
    let snapshot = archive_generation(&mut archive, &pop, &objs, 0, run.rng_seed);

    Ok(RunResult {
        algo: "random-laa".into(),
        seed: run.rng_seed,
        params: serde_json::to_value(run).expect("params serialize"),
        snapshots: vec![snapshot],
        final_entries: final_entries(&archive),
        eval_count: 1,
        wall_clock_s: started.elapsed().as_secs_f64(),
    })
}
