//! Mixed-variable search operators: pathological-function initialization,
//! chaos-map parameter streams, heavy-tailed collision repair, and the
//! structure-preserving discrete update rules.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;
use std::f64::consts::PI;

use crate::geometry::Point3;
use crate::problem::{ContinuousBounds, Solution};
use crate::scenario::Scenario;

/// Parameters of the Weierstrass series used to seed the continuous genome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeierstrassParams {
    /// Amplitude decay `a ∈ (0, 1)`.
    pub a: f64,
    /// Frequency growth `b > 1`.
    pub b: f64,
    /// Series terms evaluated.
    pub n_terms: usize,
}

impl Default for WeierstrassParams {
    fn default() -> Self {
        Self { a: 0.5, b: 3.0, n_terms: 20 }
    }
}

impl WeierstrassParams {
    /// `0 < a < 1` and `a·b ≥ 1` keep the series continuous everywhere and
    /// differentiable nowhere.
    pub fn validate(&self) -> Result<(), String> {
        if !(self.a > 0.0 && self.a < 1.0) {
            return Err(format!("weierstrass a = {} must lie in (0, 1)", self.a));
        }
        if !(self.a * self.b >= 1.0) {
            return Err(format!("weierstrass a·b = {} must be at least 1", self.a * self.b));
        }
        if self.n_terms == 0 {
            return Err("weierstrass needs at least one term".into());
        }
        Ok(())
    }

    /// The raw series `Σ aᵏ cos(bᵏ π t)`.
    pub fn eval(&self, t: f64) -> f64 {
        let mut amp = 1.0;
        let mut freq = PI;
        let mut sum = 0.0;
        for _ in 0..self.n_terms {
            sum += amp * (freq * t).cos();
            amp *= self.a;
            freq *= self.b;
        }
        sum
    }

    /// Samples the series at `n` equispaced points of `[0, 1]` shifted by
    /// `phase`, min-max normalized over the sampled lattice to `[0, 1]`.
    pub fn sample_normalized(&self, n: usize, phase: f64) -> Vec<f64> {
        if n == 0 {
            return Vec::new();
        }
        let values: Vec<f64> = (0..n)
            .map(|i| {
                let t = if n == 1 { 0.5 } else { i as f64 / (n - 1) as f64 };
                self.eval(t + phase)
            })
            .collect();
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let span = max - min;
        values
            .into_iter()
            .map(|v| if span > 0.0 { (v - min) / span } else { 0.5 })
            .collect()
    }
}

/// Heavy-tailed repositioning step parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevyParams {
    /// Tail exponent `λ ∈ (1, 3)` of the step distribution.
    pub exponent: f64,
    /// Step scale in meters.
    pub step_scale_m: f64,
}

impl Default for LevyParams {
    fn default() -> Self {
        Self { exponent: 1.5, step_scale_m: 1.0 }
    }
}

impl LevyParams {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.exponent > 1.0 && self.exponent < 3.0) {
            return Err(format!("levy exponent {} must lie in (1, 3)", self.exponent));
        }
        if !(self.step_scale_m > 0.0) {
            return Err(format!("levy step scale {} must be positive", self.step_scale_m));
        }
        Ok(())
    }

    /// One scalar step via Mantegna's method. The tail exponent λ of the
    /// step density maps to the stable index β = λ − 1.
    pub fn sample(&self, rng: &mut impl Rng) -> f64 {
        let beta = self.exponent - 1.0;
        let sigma_u = (gamma(1.0 + beta) * (PI * beta / 2.0).sin()
            / (gamma((1.0 + beta) / 2.0) * beta * 2f64.powf((beta - 1.0) / 2.0)))
        .powf(1.0 / beta);
        let u = standard_normal(rng) * sigma_u;
        let v = standard_normal(rng);
        self.step_scale_m * u / v.abs().powf(1.0 / beta)
    }
}

fn standard_normal(rng: &mut impl Rng) -> f64 {
    // Box-Muller; the pair's second value is discarded for simplicity.
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

/// The three control parameters of the salp update, with the sine and Gauss
/// chaos maps driving `c2` and `c3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChaosState {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

fn sine_map(x: f64) -> f64 {
    (PI * x).sin()
}

fn gauss_map(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        (1.0 / x).fract()
    }
}

impl ChaosState {
    pub fn new(c2_seed: f64, c3_seed: f64) -> Self {
        Self { c1: 2.0, c2: c2_seed, c3: c3_seed }
    }

    /// Per-iteration update: `c1 = 2·exp(−(4t/t_max)²)`, one chaos step each
    /// for `c2` (sine map) and `c3` (Gauss map, fractional part).
    pub fn update(&mut self, t: usize, t_max: usize) {
        let ratio = if t_max == 0 { 0.0 } else { 4.0 * t as f64 / t_max as f64 };
        self.c1 = 2.0 * (-(ratio * ratio)).exp();
        self.c2 = sine_map(self.c2);
        self.c3 = gauss_map(self.c3);
    }

    /// Advances the sine stream and returns the fresh value.
    pub fn next_c2(&mut self) -> f64 {
        self.c2 = sine_map(self.c2);
        self.c2
    }

    /// Advances the Gauss stream and returns the fresh value.
    pub fn next_c3(&mut self) -> f64 {
        self.c3 = gauss_map(self.c3);
        self.c3
    }
}

/// Uniform random permutation of `0..n`.
pub fn random_permutation(n: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.gen_range(0..=i));
    }
    perm
}

/// Partially mapped crossover. The child keeps a random segment of `first`
/// and fills the rest from `second`, chasing the segment mapping so the
/// result is always a valid permutation.
pub fn pmx(first: &[usize], second: &[usize], rng: &mut impl Rng) -> Vec<usize> {
    let n = first.len();
    debug_assert_eq!(n, second.len());
    if n < 2 {
        return first.to_vec();
    }
    let a = rng.gen_range(0..n);
    let b = rng.gen_range(0..n);
    let (lo, hi) = (a.min(b), a.max(b));

    let mut child = vec![usize::MAX; n];
    let mut in_segment = vec![false; n];
    for i in lo..=hi {
        child[i] = first[i];
        in_segment[first[i]] = true;
    }
    // position of each value in `first`, for mapping resolution
    let mut pos_in_first = vec![0usize; n];
    for (i, &v) in first.iter().enumerate() {
        pos_in_first[v] = i;
    }
    for i in (0..lo).chain(hi + 1..n) {
        let mut v = second[i];
        while in_segment[v] {
            v = second[pos_in_first[v]];
        }
        child[i] = v;
    }
    child
}

/// Swap mutation of the selection bits: one random pair exchanged per
/// cluster, which preserves each cluster's selection count.
pub fn swap_mutation(sensor_select: &mut [Vec<bool>], rng: &mut impl Rng) {
    for row in sensor_select.iter_mut() {
        let n = row.len();
        if n < 2 {
            continue;
        }
        let r1 = rng.gen_range(0..n - 1);
        let r2 = rng.gen_range(r1 + 1..n);
        row.swap(r1, r2);
    }
}

/// Structure-preserving update of the discrete genome parts against a guide
/// solution, gated by the shared exploration parameter `c1`: selection bits
/// take a mutated copy of the guide (or of themselves), receivers copy the
/// guide or redraw uniformly, and the service order crosses with the guide
/// via PMX.
pub fn update_discrete(
    x: &mut Solution,
    guide: &Solution,
    c1: f64,
    n_uavs: usize,
    rng: &mut impl Rng,
) {
    if rng.gen::<f64>() > c1 {
        x.sensor_select = guide.sensor_select.clone();
    }
    swap_mutation(&mut x.sensor_select, rng);

    if rng.gen::<f64>() > c1 {
        x.receiver = guide.receiver.clone();
    } else {
        for a in &mut x.receiver {
            *a = rng.gen_range(0..n_uavs);
        }
    }

    if rng.gen::<f64>() > c1 {
        x.bs_order = pmx(&guide.bs_order, &x.bs_order, rng);
    }
}

/// Builds one structurally valid random solution: per cluster, exactly
/// `n_select` selection bits by uniform shuffle and a uniform receiver; a
/// uniform random service order; continuous dimensions mapped through the
/// normalized Weierstrass curve with a per-solution random phase. Collision
/// repair is a separate step.
pub fn init_solution(
    s: &Scenario,
    bounds: &ContinuousBounds,
    weierstrass: &WeierstrassParams,
    rng: &mut ChaCha8Rng,
) -> Solution {
    let size = crate::problem::ProblemSize::of(s);
    let mut x = Solution::zeroed(&size);

    for h in 0..size.n_clusters {
        let picks = random_permutation(size.sensors_per_cluster, rng);
        for &i in picks.iter().take(s.n_select) {
            x.sensor_select[h][i] = true;
        }
        x.receiver[h] = rng.gen_range(0..size.n_uavs);
    }
    x.bs_order = random_permutation(size.n_base_stations, rng);

    let curve = weierstrass.sample_normalized(bounds.dim_count(), rng.gen::<f64>());
    let mut idx = 0;
    bounds.for_each_value(&mut x, |v, lb, ub| {
        *v = lb + curve[idx] * (ub - lb);
        idx += 1;
    });
    x
}

/// Uniform-random counterpart of [`init_solution`] used by the conventional
/// optimizers: same discrete construction, continuous dimensions uniform in
/// their bounds.
pub fn init_solution_uniform(
    s: &Scenario,
    bounds: &ContinuousBounds,
    rng: &mut ChaCha8Rng,
) -> Solution {
    let size = crate::problem::ProblemSize::of(s);
    let mut x = Solution::zeroed(&size);
    for h in 0..size.n_clusters {
        let picks = random_permutation(size.sensors_per_cluster, rng);
        for &i in picks.iter().take(s.n_select) {
            x.sensor_select[h][i] = true;
        }
        x.receiver[h] = rng.gen_range(0..size.n_uavs);
    }
    x.bs_order = random_permutation(size.n_base_stations, rng);
    bounds.for_each_value(&mut x, |v, lb, ub| *v = rng.gen_range(lb..=ub));
    x
}

const PROJECTION_SWEEPS: usize = 100;
const RESAMPLE_ATTEMPTS: usize = 10_000;

fn nearest_neighbor(positions: &[Point3], j: usize) -> Option<(usize, f64)> {
    positions
        .iter()
        .enumerate()
        .filter(|(m, _)| *m != j)
        .map(|(m, p)| (m, positions[j].distance(p)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
}

fn clamp_point(p: &mut Point3, bounds: &ContinuousBounds) {
    p.x = p.x.clamp(bounds.x_range.0, bounds.x_range.1);
    p.y = p.y.clamp(bounds.y_range.0, bounds.y_range.1);
    p.z = p.z.clamp(bounds.z_range.0, bounds.z_range.1);
}

/// Clamps the continuous genome into bounds, then resolves UAV collisions in
/// every served-station configuration: violating UAVs take componentwise
/// heavy-tailed steps, and stubborn ones are projected radially away from
/// their nearest neighbor to exactly the minimum separation (with uniform
/// resampling as the last resort). The output satisfies every box and
/// separation constraint.
pub fn repair_constraints(
    x: &mut Solution,
    s: &Scenario,
    bounds: &ContinuousBounds,
    levy: &LevyParams,
    max_attempts: usize,
    rng: &mut ChaCha8Rng,
) {
    bounds.clamp(x);
    let d_min = s.d_min_m;

    for station in &mut x.uav_positions {
        let violators = |positions: &[Point3]| -> Vec<usize> {
            (0..positions.len())
                .filter(|&j| {
                    nearest_neighbor(positions, j).is_some_and(|(_, d)| d < d_min)
                })
                .collect()
        };

        for _ in 0..max_attempts {
            let viol = violators(station);
            if viol.is_empty() {
                break;
            }
            for j in viol {
                station[j].x += levy.sample(rng);
                station[j].y += levy.sample(rng);
                station[j].z += levy.sample(rng);
                clamp_point(&mut station[j], bounds);
            }
        }

        for _ in 0..PROJECTION_SWEEPS {
            let viol = violators(station);
            if viol.is_empty() {
                break;
            }
            for j in viol {
                let (m, d) = nearest_neighbor(station, j).expect("violator has a neighbor");
                let dir = if d > 0.0 {
                    let inv = 1.0 / d;
                    (
                        (station[j].x - station[m].x) * inv,
                        (station[j].y - station[m].y) * inv,
                        (station[j].z - station[m].z) * inv,
                    )
                } else {
                    (1.0, 0.0, 0.0)
                };
                station[j] = Point3::new(
                    station[m].x + dir.0 * d_min,
                    station[m].y + dir.1 * d_min,
                    station[m].z + dir.2 * d_min,
                );
                clamp_point(&mut station[j], bounds);
            }
        }

        // Clamping can undo projections near the region boundary; uniform
        // resampling then always finds room in a feasible scenario.
        let mut attempts = 0;
        loop {
            let viol = violators(station);
            if viol.is_empty() {
                break;
            }
            for j in viol {
                station[j] = Point3::new(
                    rng.gen_range(bounds.x_range.0..=bounds.x_range.1),
                    rng.gen_range(bounds.y_range.0..=bounds.y_range.1),
                    rng.gen_range(bounds.z_range.0..=bounds.z_range.1),
                );
            }
            attempts += 1;
            assert!(
                attempts < RESAMPLE_ATTEMPTS,
                "collision repair cannot place {} UAVs with separation {d_min}",
                station.len()
            );
        }
    }
}
