//! Simulation and multi-objective planning for collaborative-beamforming
//! UAV swarms that harvest data from IoT sensor clusters and disseminate it
//! to remote base stations.
//!
//! Selected sensors of each cluster form a ground virtual antenna array that
//! uploads to a receiver UAV; the swarm shares the data internally, then
//! forms an aerial virtual antenna array per base station and beams the
//! payload down, repositioning between stations. The planner tunes sensor
//! selection, excitation weights, receiver choices, per-station UAV
//! positions, repositioning budgets, and the station service order to trade
//! off three objectives at once: mission completion time, signal leakage
//! toward a known eavesdropper, and swarm propulsion energy.
//!
//! The crate is organized along that pipeline:
//!
//! * [`scenario`] — the world description, its generation and (de)serialization
//! * [`beamforming`] — array factors, steering, directivity, pattern ratios
//! * [`channel`] — line-of-sight probability, attenuation, link rates
//! * [`energy`] — rotary-wing propulsion power and flight-leg energy
//! * [`problem`] — the mixed-variable encoding and the three-objective evaluator
//! * [`pareto`] — dominance and the bounded hypercube-grid archive
//! * [`emssa`] — the enhanced salp-swarm optimizer
//! * [`baselines`] — conventional salp and particle-swarm optimizers, and a
//!   random linear-array reference
//! * [`strategies`] — non-beamforming multi-hop and fly-between references
//! * [`runner`] / [`report`] — run plumbing, results, CSV emission
//!
//! The `book/` directory of the repository walks through the models with
//! runnable examples; every snippet there compiles and runs as a doc-test.
//!
//! ```
//! use vaa_moo::prelude::*;
//!
//! let scenario = generate_scenario(&ScenarioPreset::Desk.config(), 42).unwrap();
//! let evaluator = Evaluator::new(
//!     &scenario,
//!     EvalConfig { quadrature_step_deg: 15.0, ..EvalConfig::default() },
//! )
//! .unwrap();
//! let mut rng = vaa_moo::runner::substream(1, &[0]);
//! let reference = vaa_moo::baselines::random_laa_solution(&scenario, 1.0, &mut rng);
//! let objectives = evaluator.evaluate(&reference).unwrap();
//! assert!(objectives.is_finite());
//! ```

pub mod baselines;
pub mod beamforming;
pub mod channel;
pub mod emssa;
pub mod energy;
pub mod geometry;
pub mod operators;
pub mod pareto;
pub mod problem;
pub mod report;
pub mod runner;
pub mod scenario;
pub mod strategies;

/// The types most experiments touch.
pub mod prelude {
    pub use crate::baselines::{MopsoParams, MssaParams};
    pub use crate::emssa::EmssaParams;
    pub use crate::geometry::{Point3, SquareRegion};
    pub use crate::pareto::{dominates, Archive};
    pub use crate::problem::{
        check_constraints, solution_length, EvalConfig, Evaluator, ObjectiveVector, ProblemSize,
        Solution,
    };
    pub use crate::runner::{RunConfig, RunResult};
    pub use crate::scenario::{
        generate_scenario, load_scenario, save_scenario, validate_scenario, Scenario,
        ScenarioConfig, ScenarioPreset,
    };
    pub use crate::strategies::{strategy_flybetween, strategy_multihop, StrategyConfig};
}

/// Caps the global thread pool from the `VAA_MOO_THREADS` environment
/// variable when set. Call once at program start; later calls are no-ops.
/// Results never depend on the thread count.
pub fn init_thread_cap_from_env() {
    if let Ok(value) = std::env::var("VAA_MOO_THREADS") {
        if let Ok(threads) = value.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build_global();
        }
    }
}
