//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Statistical criteria use seeds 0..=9 with the default 50-agent setup
//! (r = 7.5 m, k = 0.1 1/s, dt = 0.01 s, 100 s horizon).

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use flock_core::dynamics::{accel_position, phi_hat_weight, psi_weight};
use flock_core::experiment::run_in_memory;
use flock_core::integrator::{saturate_speed, step};
use flock_core::metrics::{window_mean, MetricsRow};
use flock_core::neighborhood::{build_neighbors_grid, build_neighbors_naive};
use flock_core::{AgentState, ModelKind, RandomSource, SimConfig, SimState, VectorM};

const SEEDS: std::ops::RangeInclusive<u64> = 0..=9;
const RUN_BUDGET: Duration = Duration::from_secs(60);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

struct SeedRun {
    rows: Vec<MetricsRow>,
    max_speed: f64,
    wall: Duration,
}

type Runs = BTreeMap<(ModelKind, u64), SeedRun>;

fn default_setup_runs() -> Runs {
    let jobs: Vec<(ModelKind, u64)> = ModelKind::ALL
        .iter()
        .flat_map(|&m| SEEDS.map(move |s| (m, s)))
        .collect();
    // One run per core at a time so each wall time reflects a lone run.
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let next = AtomicUsize::new(0);
    let results = Mutex::new(Runs::new());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| {
                while let Some(&(model, seed)) = jobs.get(next.fetch_add(1, Ordering::Relaxed)) {
                    let config = SimConfig {
                        model,
                        seed,
                        ..SimConfig::default()
                    };
                    let (summary, rows) = run_in_memory(&config).expect("run");
                    let run = SeedRun {
                        rows,
                        max_speed: summary.max_speed,
                        wall: summary.wall_time,
                    };
                    results.lock().unwrap().insert((model, seed), run);
                }
            });
        }
    });
    results.into_inner().unwrap()
}

fn mean_gamma(run: &SeedRun, t0: f64, t1: f64) -> f64 {
    window_mean(&run.rows, t0, t1, |r| r.gamma).unwrap_or(f64::NAN)
}

fn mean_sep(run: &SeedRun, t0: f64, t1: f64) -> f64 {
    window_mean(&run.rows, t0, t1, |r| r.min_separation).unwrap_or(f64::NAN)
}

fn count_passing(flags: &[bool]) -> usize {
    flags.iter().filter(|&&f| f).count()
}

// 1. Position model converges to and keeps strong alignment.
fn alignment_convergence(runs: &Runs) -> Outcome {
    let mut flags = Vec::new();
    let mut notes = Vec::new();
    for seed in SEEDS {
        let run = &runs[&(ModelKind::Position, seed)];
        let worst = run
            .rows
            .iter()
            .filter(|r| r.t >= 15.0)
            .map(|r| r.gamma.unwrap_or(f64::NEG_INFINITY))
            .fold(f64::INFINITY, f64::min);
        let mean = mean_gamma(run, 20.0, 100.0);
        let ok = worst >= 0.9 && mean >= 0.95 && run.wall < RUN_BUDGET;
        flags.push(ok);
        notes.push(format!(
            "s{seed}:min={worst:.3}/mean={mean:.3}{}",
            if ok { "" } else { "*" }
        ));
    }
    let passing = count_passing(&flags);
    outcome(
        passing >= 8,
        format!("{passing}/10 seeds (need >= 8) [{}]", notes.join(" ")),
    )
}

// 2. Position model separation band.
fn separation_band(runs: &Runs) -> Outcome {
    let seps: Vec<f64> = SEEDS
        .map(|s| mean_sep(&runs[&(ModelKind::Position, s)], 50.0, 100.0))
        .collect();
    let flags: Vec<bool> = seps.iter().map(|d| (1.0..=2.5).contains(d)).collect();
    let passing = count_passing(&flags);
    let list: Vec<String> = seps.iter().map(|d| format!("{d:.2}")).collect();
    outcome(
        passing >= 8,
        format!("{passing}/10 seeds in [1.0, 2.5] m [{}]", list.join(" ")),
    )
}

// 3. Position model is narrower and at least as aligned as pos_vel.
fn model_contrast(runs: &Runs) -> Outcome {
    let (mut narrower, mut aligned) = (0, 0);
    for seed in SEEDS {
        let p = &runs[&(ModelKind::Position, seed)];
        let v = &runs[&(ModelKind::PosVel, seed)];
        narrower += usize::from(mean_sep(p, 50.0, 100.0) < mean_sep(v, 50.0, 100.0));
        aligned += usize::from(mean_gamma(p, 50.0, 100.0) >= mean_gamma(v, 50.0, 100.0));
    }
    outcome(
        narrower >= 7 && aligned >= 7,
        format!(
            "narrower separation {narrower}/10, alignment >= pos_vel {aligned}/10 (need >= 7 each)"
        ),
    )
}

// 4. Without the threshold alignment decays; with it, it does not.
fn threshold_ablation(runs: &Runs) -> Outcome {
    let mut flags = Vec::new();
    let mut notes = Vec::new();
    for seed in SEEDS {
        let nt = &runs[&(ModelKind::PositionNoThreshold, seed)];
        let th = &runs[&(ModelKind::Position, seed)];
        let decline = mean_gamma(nt, 20.0, 40.0) - mean_gamma(nt, 80.0, 100.0);
        let held = mean_gamma(th, 80.0, 100.0) - mean_gamma(th, 20.0, 40.0);
        let ok = decline >= 0.05 && held >= -0.02;
        flags.push(ok);
        notes.push(format!(
            "s{seed}:drop={decline:.3}/held={held:.3}{}",
            if ok { "" } else { "*" }
        ));
    }
    let passing = count_passing(&flags);
    outcome(
        passing >= 7,
        format!("{passing}/10 seeds (need >= 7) [{}]", notes.join(" ")),
    )
}

// 5. Weight unit checks.
fn weight_units() -> Outcome {
    let psi_zero = (1..=60).all(|c| psi_weight(c as f64, c) == 0.0);
    let mut crossover_ok = true;
    for k in [0.1, 0.05, 0.2, 0.25, 0.5] {
        for count in 1..=60usize {
            let at = 1.0 / k;
            let decaying = phi_hat_weight(at, count, k, false).abs();
            let floor = k * count as f64;
            let thresholded = phi_hat_weight(at, count, k, true).abs();
            crossover_ok &= (decaying - floor).abs() <= 1e-15 * floor.max(1.0);
            crossover_ok &= (thresholded - floor).abs() <= 1e-15 * floor.max(1.0);
        }
    }
    let v = saturate_speed(&VectorM::from([3.0, 4.0]), 5.0).norm();
    let target = 5.0 * 1f64.tanh();
    let sat_ok = (v - target).abs() <= 1e-12 * target;
    outcome(
        psi_zero && crossover_ok && sat_ok,
        format!("psi zero at |N|: {psi_zero}; phi_hat crossover: {crossover_ok}; tanh(1) speed: {sat_ok}"),
    )
}

/// Independent evaluation of the position-only rule in its "cohesion plus
/// weighted displacement drift" grouping.
fn modified_rule_oracle(
    agents: &[AgentState],
    nbrs: &[usize],
    i: usize,
    t: f64,
    dt: f64,
    k: f64,
) -> Vec<f64> {
    let m = agents[i].position.dim();
    let count = nbrs.len() as f64;
    let mut out = vec![0.0; m];
    if nbrs.is_empty() {
        return out;
    }
    let t_eff = if t > dt { t } else { dt };
    let weight = (count / t_eff).max(k * count);
    let pi = agents[i].position.components();
    let pi0 = agents[i].initial_position().components();
    for &j in nbrs {
        let pj = agents[j].position.components();
        let pj0 = agents[j].initial_position().components();
        let dist = (0..m).map(|d| (pj[d] - pi[d]).powi(2)).sum::<f64>().sqrt();
        let psi = 1.0 - count / dist;
        for d in 0..m {
            let rel = pj[d] - pi[d];
            let drift = rel - (pj0[d] - pi0[d]);
            out[d] += psi * rel + weight * drift;
        }
    }
    out
}

// 6. The two groupings of the position-only rule agree.
fn form_equivalence() -> Outcome {
    let mut rng = RandomSource::new(0xF0E1);
    let (mut worst, mut failures) = (0.0f64, 0);
    for _ in 0..500 {
        let n = 2 + (rng.next_uniform() * 9.0) as usize;
        let agents: Vec<AgentState> = (0..n)
            .map(|id| {
                let mut v =
                    || VectorM::from([rng.next_uniform() * 10.0, rng.next_uniform() * 10.0]);
                let (p, vel, p0) = (v(), v(), v());
                AgentState::with_initial_position(id, p, vel, p0)
            })
            .collect();
        let t = rng.next_uniform() * 100.0;
        let positions: Vec<&VectorM> = agents.iter().map(|a| &a.position).collect();
        let table = build_neighbors_naive(&positions, 7.5);
        for i in 0..n {
            let fast = accel_position(&agents, &table, i, t, 0.01, 0.1, true);
            let oracle = modified_rule_oracle(&agents, table.neighbors(i), i, t, 0.01, 0.1);
            let diff = (0..2)
                .map(|d| (fast[d] - oracle[d]).powi(2))
                .sum::<f64>()
                .sqrt();
            let scale = oracle.iter().map(|x| x * x).sum::<f64>().sqrt();
            let rel = if scale > 0.0 { diff / scale } else { diff };
            worst = worst.max(rel);
            failures += usize::from(rel > 1e-12);
        }
    }
    outcome(
        failures == 0,
        format!("worst relative difference {worst:.2e} (tol 1e-12), {failures} failures"),
    )
}

// 7. Grid and all-pairs neighbor tables agree.
fn grid_oracle() -> Outcome {
    let mut rng = RandomSource::new(0x6A1D);
    let mut mismatches = 0;
    for case in 0..1000 {
        let m = 1 + case % 3;
        let n = 1 + (rng.next_uniform() * 200.0) as usize;
        let extent = 1.0 + rng.next_uniform() * 60.0;
        let r = 0.25 + rng.next_uniform() * 10.0;
        let positions: Vec<VectorM> = (0..n)
            .map(|_| {
                VectorM::new(
                    (0..m)
                        .map(|_| (rng.next_uniform() - 0.5) * extent)
                        .collect(),
                )
            })
            .collect();
        mismatches += usize::from(
            build_neighbors_grid(&positions, r) != build_neighbors_naive(&positions, r),
        );
    }
    outcome(
        mismatches == 0,
        format!("{mismatches} mismatching tables out of 1000"),
    )
}

fn dir_bytes(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap())
        .map(|e| {
            (
                e.file_name().into_string().unwrap(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect()
}

// 8. Byte-identical outputs regardless of worker threads.
fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let mut outputs = Vec::new();
    for threads in ["1", "4", "1"] {
        let status = Command::new(env!("CARGO_BIN_EXE_flock"))
            .args([
                "run",
                "--seed",
                "7",
                "--trace-stride",
                "500",
                "--out-dir",
                out.to_str().unwrap(),
            ])
            .env("FLOCK_THREADS", threads)
            .output()
            .unwrap();
        if !status.status.success() {
            return outcome(
                false,
                format!("run failed: {}", String::from_utf8_lossy(&status.stderr)),
            );
        }
        outputs.push(dir_bytes(&out));
        std::fs::remove_dir_all(&out).unwrap();
    }
    let files = outputs[0].len();
    let identical = outputs.windows(2).all(|w| w[0] == w[1]);
    outcome(
        identical && files == 8,
        format!("{files} files compared across FLOCK_THREADS=1,4,1; identical: {identical}"),
    )
}

// 9. Speed strictly below v_max everywhere.
fn speed_bound(runs: &Runs) -> Outcome {
    let max = runs.values().map(|r| r.max_speed).fold(0.0, f64::max);
    outcome(
        max < 5.0,
        format!("max speed over {} runs = {max:.6} m/s", runs.len()),
    )
}

fn three_agent_state(dt: f64) -> SimState {
    let agents = vec![
        AgentState::new(0, [0.0, 0.0].into(), [0.02, 0.0].into()),
        AgentState::new(1, [2.3, 0.1].into(), [0.0, -0.01].into()),
        AgentState::new(2, [0.9, 1.8].into(), [-0.01, 0.015].into()),
    ];
    SimState::new(agents, dt, 7.5)
}

fn state_at_one_second(dt: f64) -> Vec<f64> {
    let config = SimConfig {
        model: ModelKind::PosVel,
        n: 3,
        dt,
        ..SimConfig::default()
    }
    .with_t_end(1.0);
    let mut state = three_agent_state(dt);
    for _ in 0..config.step_count() {
        step(&mut state, &config).unwrap();
    }
    state
        .agents()
        .iter()
        .flat_map(|a| {
            a.position
                .components()
                .iter()
                .chain(a.velocity.components())
                .copied()
                .collect::<Vec<_>>()
        })
        .collect()
}

// 10. First-order convergence of the integrator.
fn integrator_order() -> Outcome {
    let dt = 0.01;
    let coarse = state_at_one_second(dt);
    let half = state_at_one_second(dt / 2.0);
    let reference = state_at_one_second(dt / 8.0);
    let err = |x: &[f64]| {
        x.iter()
            .zip(&reference)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    let ratio = err(&coarse) / err(&half);
    outcome(
        (1.5..=3.0).contains(&ratio),
        format!(
            "err(dt)={:.3e}, err(dt/2)={:.3e}, ratio={ratio:.3} (expect [1.5, 3.0])",
            err(&coarse),
            err(&half)
        ),
    )
}

fn main() {
    println!("running acceptance simulations (3 models x 10 seeds)...");
    let runs = default_setup_runs();
    let slowest = runs.values().map(|r| r.wall).max().unwrap_or_default();
    println!(
        "slowest run: {:.2} s (budget {} s)",
        slowest.as_secs_f64(),
        RUN_BUDGET.as_secs()
    );

    let criteria: Vec<(&str, Outcome)> = vec![
        (
            "C1  position alignment convergence",
            alignment_convergence(&runs),
        ),
        ("C2  position separation band", separation_band(&runs)),
        ("C3  model contrast vs pos_vel", model_contrast(&runs)),
        ("C4  threshold ablation", threshold_ablation(&runs)),
        ("C5  weight unit checks", weight_units()),
        ("C6  form equivalence", form_equivalence()),
        ("C7  grid vs all-pairs neighbors", grid_oracle()),
        ("C8  determinism across thread caps", determinism()),
        ("C9  speed bound", speed_bound(&runs)),
        ("C10 integrator order", integrator_order()),
    ];

    let mut failed = 0;
    for (name, o) in &criteria {
        println!(
            "[{}] {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
