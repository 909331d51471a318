// temporary tuning probe: EMSSA variants vs the random-LAA reference
use vaa_moo::baselines::run_random_laa;
use vaa_moo::emssa::{run, EmssaParams};
use vaa_moo::prelude::*;

fn main() {
    let scenario = load_scenario(std::path::Path::new("/tmp/desk2.json")).unwrap();
    for (label, t_max, cap, div) in [
        ("t120 cap100 div10", 120.0, 100usize, 10usize),
        ("t30  cap100 div10", 30.0, 100, 10),
        ("t30  cap30  div10", 30.0, 30, 10),
        ("t30  cap100 div5 ", 30.0, 100, 5),
    ] {
        let mut f1s = Vec::new();
        for seed in 1..=3u64 {
            let mut p = EmssaParams::default();
            p.run.pop_size = 30;
            p.run.max_iters = 100;
            p.run.rng_seed = seed;
            p.run.archive_capacity = cap;
            p.run.grid_divisions = div;
            p.run.eval.quadrature_step_deg = 3.0;
            p.run.eval.t_perf_bounds_s = (1.0, t_max);
            let r = run(&scenario, &p).unwrap();
            f1s.push(r.best_f1());
        }
        println!("{label}: best f1 per seed = {:?}", f1s.iter().map(|v| (v * 10.0).round() / 10.0).collect::<Vec<_>>());
    }
    let mut run_cfg = RunConfig::default();
    run_cfg.eval.quadrature_step_deg = 3.0;
    for seed in 1..=3u64 {
        run_cfg.rng_seed = seed;
        let r = run_random_laa(&scenario, &run_cfg).unwrap();
        println!("laa seed {seed}: f1 = {:.1}, f3 = {:.0}", r.best_f1(), r.best_f3());
    }
}
