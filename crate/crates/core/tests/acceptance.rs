//! Acceptance gate: one PASS/FAIL line per criterion. Every threshold is a
//! named constant below.

mod common;

use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use jobshop::cli::ScheduleDocument;
use jobshop::ga::{evolve_seeded, evolve_with, GaParams};
use jobshop::heuristics::{
    dispatch, dispatch_with_assignment, global_selection, global_selection_traced, local_selection,
    machine_loads, random_assignment, MachRule, MachineAssignment, OpRule,
};
use jobshop::model::validate;
use jobshop::parsers::{parse, parse_bytes, serialize, FormatTag, ParseError};
use jobshop::sim::{run_online, ArrivalConfig, IntRange, TraceKind};
use jobshop::{Instance, Schedule, Time, Variant};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{
    brute_force_gap, check_feasible, fixture, fixture_path, optimal_makespan, random_for_format,
    random_instance, search_space, toy2x2, Shape, FIXTURES,
};

// AC1
const ORACLE_INSTANCES: usize = 60;
const ORACLE_MIN_INSTANCES: usize = 50;
const ORACLE_MAX_OPS: usize = 8;
const ORACLE_MAX_ALTERNATIVES: usize = 2;
const ORACLE_LEAF_BUDGET: f64 = 3e5;
const GA_ORACLE_POPULATION: usize = 50;
const GA_ORACLE_GENERATIONS: usize = 100;
const GA_OPTIMUM_MIN_FRACTION: f64 = 0.95;
const ORACLE_MAX_RUNTIME: Duration = Duration::from_secs(120);
// AC2
const TOY_GA_SEEDS: u64 = 50;
const TOY_GA_POPULATION: usize = 20;
const TOY_GA_GENERATIONS: usize = 30;
// AC4
const FUZZ_PER_FORMAT: u64 = 1000;
const GARBAGE_INPUTS: u64 = 10_000;
// AC5
const GA_PROPERTY_SEEDS: u64 = 100;
// AC6
const SIM_JOBS: usize = 100_000;
const SIM_MEAN: f64 = 10.0;
const SIM_MEAN_TOLERANCE: f64 = 0.01;
const SIM_MAX_RUNTIME: Duration = Duration::from_secs(30);
// AC7
const REPLAY_TRACES: u64 = 1000;
const DOMINANCE_BATCHES: u64 = 10;
const DOMINANCE_BATCH_SIZE: usize = 100;
const DOMINANCE_MIN_FRACTION: f64 = 0.95;

/// Expected method/variant support. Rows: dispatch, heuristic_gs,
/// heuristic_ls, ga. Columns: JSP, FSP, FJSP, FJSP_SDST, FAJSP, online.
const TABLE: [[bool; 6]; 4] = [
    [true, true, true, false, true, true],
    [true, true, true, true, true, false],
    [true, true, true, true, true, false],
    [true, true, true, true, true, false],
];
const METHODS: [&str; 4] = ["dispatch", "heuristic_gs", "heuristic_ls", "ga"];

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn feasible(instance: &Instance, schedule: &Schedule) -> Result<(), String> {
    match validate(schedule, instance) {
        Ok(v) if v.is_empty() => {}
        other => return Err(format!("validate: {other:?}")),
    }
    check_feasible(instance, schedule)
}

// ---------------------------------------------------------------------------

fn ac1_oracle() -> Check {
    let started = Instant::now();
    let shape = Shape {
        max_total_ops: ORACLE_MAX_OPS,
        max_alternatives: ORACLE_MAX_ALTERNATIVES,
        ..Shape::SMALL
    };
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut instances = Vec::new();
    while instances.len() < ORACLE_INSTANCES {
        let variant = Variant::ALL[instances.len() % Variant::ALL.len()];
        let inst = random_instance(&mut rng, variant, &shape);
        if search_space(&inst) <= ORACLE_LEAF_BUDGET {
            instances.push(inst);
        }
    }
    ensure(instances.len() >= ORACLE_MIN_INSTANCES, || "too few instances".into())?;

    let mut ga_hits = 0;
    let mut gap_above_exact = 0;
    for (i, inst) in instances.iter().enumerate() {
        ensure(inst.total_ops() <= ORACLE_MAX_OPS, || format!("instance {i} too large"))?;
        let gap = brute_force_gap(inst);
        let exact = optimal_makespan(inst);
        ensure(gap >= exact, || format!("instance {i}: gap enumeration {gap} below exact {exact}"))?;
        if inst.setup().is_none() {
            ensure(gap == exact, || format!("instance {i}: oracles disagree ({gap} vs {exact})"))?;
        } else if gap > exact {
            gap_above_exact += 1;
        }

        let mut solved: Vec<(String, Schedule)> = Vec::new();
        for op_rule in OpRule::ALL {
            for mach_rule in MachRule::ALL {
                let s = dispatch(inst, op_rule, mach_rule).map_err(|e| e.to_string())?;
                solved.push((format!("dispatch {op_rule}+{mach_rule}"), s));
            }
            let mut grng = ChaCha8Rng::seed_from_u64(i as u64);
            let gs = global_selection(inst, &mut grng);
            solved.push((format!("gs {op_rule}"), dispatch_with_assignment(inst, op_rule, &gs).map_err(|e| e.to_string())?));
            let ls = local_selection(inst);
            solved.push((format!("ls {op_rule}"), dispatch_with_assignment(inst, op_rule, &ls).map_err(|e| e.to_string())?));
        }
        let params = GaParams {
            population_size: GA_ORACLE_POPULATION,
            generations: GA_ORACLE_GENERATIONS,
            seed: i as u64,
            ..GaParams::default()
        };
        let ga = evolve_seeded(inst, &params).map_err(|e| e.to_string())?;
        if ga.makespan() == exact {
            ga_hits += 1;
        }
        solved.push(("ga".into(), ga.schedule));
        for (name, s) in &solved {
            feasible(inst, s).map_err(|e| format!("instance {i} {name}: {e}"))?;
            ensure(s.makespan() >= exact, || format!("instance {i} {name}: {} below optimum {exact}", s.makespan()))?;
        }
    }
    let fraction = ga_hits as f64 / instances.len() as f64;
    let elapsed = started.elapsed();
    ensure(fraction >= GA_OPTIMUM_MIN_FRACTION, || {
        format!("GA optimal on {ga_hits}/{} ({fraction:.3})", instances.len())
    })?;
    ensure(elapsed < ORACLE_MAX_RUNTIME, || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{} instances, GA optimal on {ga_hits}, gap decoding above optimum on {gap_above_exact} setup instance(s), {:.1}s",
        instances.len(),
        elapsed.as_secs_f64()
    ))
}

fn ac2_toy() -> Check {
    let inst = toy2x2();
    let oracle = brute_force_gap(&inst);
    ensure(oracle == 8 && optimal_makespan(&inst) == 8, || format!("oracle {oracle}"))?;
    for (op_rule, mach_rule, expected) in [
        (OpRule::Fifo, MachRule::Spt, 8),
        (OpRule::Mwr, MachRule::Spt, 11),
        (OpRule::Mwr, MachRule::Eet, 9),
    ] {
        let s = dispatch(&inst, op_rule, mach_rule).map_err(|e| e.to_string())?;
        ensure(s.makespan() == expected, || format!("{op_rule}+{mach_rule} gave {}", s.makespan()))?;
    }
    for seed in 0..TOY_GA_SEEDS {
        let params = GaParams {
            population_size: TOY_GA_POPULATION,
            generations: TOY_GA_GENERATIONS,
            seed,
            ..GaParams::default()
        };
        let m = evolve_seeded(&inst, &params).map_err(|e| e.to_string())?.makespan();
        ensure(m == 8, || format!("GA seed {seed} gave {m}"))?;
    }
    Ok(format!("oracle 8, FIFO+SPT 8, MWR+SPT 11, MWR+EET 9, GA 8 on {TOY_GA_SEEDS} seeds"))
}

fn cli(args: &[&str]) -> Option<i32> {
    Command::new(env!("CARGO_BIN_EXE_jobshop")).args(args).output().unwrap().status.code()
}

fn ac3_table() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = dir.path().join("schedule.json");
    let out_s = out.to_str().unwrap();
    let mut cells = 0;
    for (col, (name, format, variant)) in FIXTURES.into_iter().enumerate() {
        let inst = fixture(name, format);
        ensure(inst.variant() == variant || (variant == Variant::Fsp && inst.is_flow_shop()), || {
            format!("{name} is not {variant}")
        })?;
        let path = fixture_path(name);
        for (row, method) in METHODS.into_iter().enumerate() {
            let checked = TABLE[row][col];
            let _ = fs::remove_file(&out);
            let code = cli(&[
                "solve", "--instance", path.to_str().unwrap(), "--format", format.name(),
                "--method", method, "--generations", "30", "--out", out_s,
            ]);
            cells += 1;
            if checked {
                ensure(code == Some(0), || format!("{method} x {variant}: exit {code:?}"))?;
                check_written(&inst, &out).map_err(|e| format!("{method} x {variant}: {e}"))?;
            } else {
                ensure(code == Some(3), || format!("{method} x {variant}: expected exit 3, got {code:?}"))?;
            }
        }
    }
    let (name, format, _) = FIXTURES[3];
    let path = fixture_path(name);
    let code = cli(&[
        "solve", "--instance", path.to_str().unwrap(), "--format", format.name(),
        "--method", "dispatch", "--allow-extension", "--out", out_s,
    ]);
    ensure(code == Some(0), || format!("dispatch x FJSP_SDST with extension flag: exit {code:?}"))?;
    check_written(&fixture(name, format), &out)?;

    let config = fixture_path("online.toml");
    for (row, method) in METHODS.into_iter().enumerate() {
        let code = cli(&["simulate", "--config", config.to_str().unwrap(), "--method", method]);
        let expected = if TABLE[row][5] { 0 } else { 3 };
        ensure(code == Some(expected), || format!("{method} x online: exit {code:?}"))?;
        cells += 1;
    }
    Ok(format!("{cells} cells match the table"))
}

fn check_written(instance: &Instance, path: &Path) -> Result<(), String> {
    let text = fs::read_to_string(path).map_err(|e| e.to_string())?;
    let doc = ScheduleDocument::from_json(&text).map_err(|e| e.to_string())?;
    let s = doc.to_schedule(instance)?;
    feasible(instance, &s)?;
    ensure(s.makespan() == doc.makespan, || "makespan field disagrees".into())
}

fn ac4_parsers() -> Check {
    let mut checked = 0;
    for format in FormatTag::ALL {
        for seed in 0..FUZZ_PER_FORMAT {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let inst = random_for_format(&mut rng, format);
            let text = serialize(&inst, format).map_err(|e| e.to_string())?;
            let back = parse(format, &text).map_err(|e| format!("{format} {seed}: {e}"))?;
            ensure(back == inst, || format!("{format} {seed}: structure changed"))?;
            let again = parse(format, &serialize(&back, format).map_err(|e| e.to_string())?);
            ensure(again.as_ref() == Ok(&back), || format!("{format} {seed}: second trip differs"))?;
            malformed(&mut rng, format, &inst, &text).map_err(|e| format!("{format} {seed}: {e}"))?;
            checked += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..GARBAGE_INPUTS {
        let len = rng.random_range(0..200);
        let bytes: Vec<u8> = (0..len).map(|_| rng.random()).collect();
        for format in FormatTag::ALL {
            let _ = parse_bytes(format, &bytes);
        }
    }
    Ok(format!("{checked} round trips with malformed variants, {GARBAGE_INPUTS} garbage inputs per format"))
}

/// Damages valid text in a format-specific way and checks the error kind.
fn malformed(rng: &mut ChaCha8Rng, format: FormatTag, inst: &Instance, text: &str) -> Result<(), String> {
    let lines: Vec<&str> = text.lines().collect();
    let job_line = 1 + rng.random_range(0..inst.job_count());
    let rebuild = |lines: &[String]| lines.join("\n") + "\n";
    let owned: Vec<String> = lines.iter().map(|l| l.to_string()).collect();

    // truncated job line
    let mut cut = owned.clone();
    let mut tokens: Vec<&str> = lines[job_line].split_whitespace().collect();
    tokens.pop();
    cut[job_line] = tokens.join(" ");
    let result = parse(format, &rebuild(&cut));
    let want_mismatch = format != FormatTag::Jsp;
    let ok = match result {
        Err(ParseError::AlternativeCountMismatch { .. }) => want_mismatch,
        Err(ParseError::Syntax { .. }) => !want_mismatch,
        _ => false,
    };
    ensure(ok, || format!("truncated job line gave {result:?}"))?;

    // truncated file: drop the last job line and everything after it
    let last_job = inst.job_count();
    let result = parse(format, &rebuild(&owned[..last_job]));
    ensure(
        matches!(result, Err(ParseError::Syntax { .. }) | Err(ParseError::AlternativeCountMismatch { .. })),
        || format!("truncated file gave {result:?}"),
    )?;

    match format {
        FormatTag::Jsp => {
            let mut bad = owned.clone();
            let mut tokens: Vec<String> = lines[job_line].split_whitespace().map(String::from).collect();
            tokens[0] = inst.machine_count().to_string();
            bad[job_line] = tokens.join(" ");
            let result = parse(format, &rebuild(&bad));
            ensure(matches!(result, Err(ParseError::MachineIndex { .. })), || format!("bad machine gave {result:?}"))?;
        }
        FormatTag::Fjsp => {
            let mut bad = owned.clone();
            let mut tokens: Vec<String> = lines[job_line].split_whitespace().map(String::from).collect();
            // first alternative's machine of the first operation
            tokens[2] = (inst.machine_count() + 1).to_string();
            bad[job_line] = tokens.join(" ");
            let result = parse(format, &rebuild(&bad));
            ensure(matches!(result, Err(ParseError::MachineIndex { .. })), || format!("bad machine gave {result:?}"))?;
        }
        FormatTag::FjspSdst => {
            let rows: Vec<usize> = (inst.job_count() + 1..lines.len()).filter(|&i| !lines[i].trim().is_empty()).collect();
            let victim = rows[rng.random_range(0..rows.len())];
            let mut short_row = owned.clone();
            let mut tokens: Vec<&str> = lines[victim].split_whitespace().collect();
            tokens.pop();
            short_row[victim] = tokens.join(" ");
            let result = parse(format, &rebuild(&short_row));
            ensure(matches!(result, Err(ParseError::Dimension { .. })), || format!("short row gave {result:?}"))?;
            let mut missing_row = owned.clone();
            missing_row.remove(victim);
            let result = parse(format, &rebuild(&missing_row));
            ensure(matches!(result, Err(ParseError::Dimension { .. })), || format!("missing row gave {result:?}"))?;
        }
        FormatTag::Fajsp => {
            let n = inst.job_count();
            let mut cyclic = text.to_string();
            if n == 1 {
                cyclic.push_str("0 0\n");
            } else {
                let a = rng.random_range(0..n);
                let b = (a + 1 + rng.random_range(0..n - 1)) % n;
                cyclic.push_str(&format!("{a} {b}\n{b} {a}\n"));
            }
            let result = parse(format, &cyclic);
            ensure(matches!(result, Err(ParseError::Cycle { .. })), || format!("cycle gave {result:?}"))?;
        }
    }
    Ok(())
}

fn chromosome_ok(instance: &Instance, c: &jobshop::ga::Chromosome) -> bool {
    let ms_ok = c.ms.len() == instance.total_ops()
        && instance.ops().all(|op| op.processing_time(c.ms[op.global_id]).is_some());
    let mut counts = vec![0usize; instance.job_count()];
    for &j in &c.os {
        match counts.get_mut(j) {
            Some(n) => *n += 1,
            None => return false,
        }
    }
    ms_ok && instance.jobs().iter().all(|j| counts[j.id] == j.operations.len())
}

fn ac5_ga_properties() -> Check {
    let mut runs = 0;
    let mut observed = 0usize;
    for (name, format, _) in FIXTURES {
        let inst = fixture(name, format);
        for seed in 0..GA_PROPERTY_SEEDS {
            let params = GaParams {
                population_size: 20,
                generations: 20,
                seed,
                ..GaParams::default()
            };
            let mut bad = 0usize;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let out = evolve_with(&inst, &params, &mut rng, |c| {
                observed += 1;
                if !chromosome_ok(&inst, c) {
                    bad += 1;
                }
            })
            .map_err(|e| e.to_string())?;
            ensure(bad == 0, || format!("{name} seed {seed}: {bad} invalid chromosomes"))?;
            ensure(out.history.windows(2).all(|w| w[1] <= w[0]), || {
                format!("{name} seed {seed}: history rises {:?}", out.history)
            })?;
            feasible(&inst, &out.schedule).map_err(|e| format!("{name} seed {seed}: {e}"))?;
            let again = evolve_seeded(&inst, &params).map_err(|e| e.to_string())?;
            ensure(again.history == out.history && again.chromosome == out.chromosome, || {
                format!("{name} seed {seed}: not deterministic")
            })?;
            runs += 1;
        }
    }
    Ok(format!("{runs} runs, {observed} operator results checked"))
}

fn ac6_simulation() -> Check {
    let config = ArrivalConfig {
        machine_count: 5,
        job_count: SIM_JOBS,
        interarrival_mean: SIM_MEAN,
        ops_per_job: IntRange::new(1, 4),
        alternatives_per_op: IntRange::new(1, 3),
        proc_time: IntRange::new(1, 10),
        seed: 20,
    };
    let started = Instant::now();
    let out = run_online(&config, OpRule::Fifo, MachRule::Spt).map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();
    let mean = out.mean_interarrival();
    let rel = (mean - SIM_MEAN).abs() / SIM_MEAN;
    ensure(rel <= SIM_MEAN_TOLERANCE, || format!("mean interarrival {mean:.4} off by {rel:.4}"))?;

    let mut arrival = vec![None; SIM_JOBS];
    let mut busy: Time = 0;
    let mut open: Vec<Option<Time>> = vec![None; config.machine_count];
    for e in &out.trace {
        match e.event {
            TraceKind::Arrival => arrival[e.job] = Some(e.time),
            TraceKind::Start => {
                ensure(arrival[e.job].is_some_and(|a| a <= e.time), || {
                    format!("job {} starts at {} before arriving", e.job, e.time)
                })?;
                let m = e.machine.unwrap();
                ensure(open[m].replace(e.time).is_none(), || format!("M{m} double-booked at {}", e.time))?;
            }
            TraceKind::Complete => {
                let m = e.machine.unwrap();
                let start = open[m].take().ok_or_else(|| format!("M{m} completes while idle"))?;
                busy += e.time - start;
            }
        }
    }
    let work: Time = out.schedule.placements().iter().map(|p| p.end - p.start).sum();
    ensure(busy == work, || format!("busy {busy} != work {work}"))?;
    feasible(&out.instance, &out.schedule)?;
    ensure(elapsed < SIM_MAX_RUNTIME, || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{SIM_JOBS} jobs, mean interarrival {mean:.4} (rel. error {rel:.5}), {:.1}s",
        elapsed.as_secs_f64()
    ))
}

fn max_load(instance: &Instance, a: &MachineAssignment) -> Time {
    machine_loads(instance, a).into_iter().max().unwrap_or(0)
}

fn ac7_load_balancing() -> Check {
    for seed in 0..REPLAY_TRACES {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_instance(&mut rng, Variant::Fjsp, &Shape::MEDIUM);
        let (assignment, order) = global_selection_traced(&inst, &mut rng);
        let mut load = vec![0 as Time; inst.machine_count()];
        for &job in &order {
            for op in &inst.job(job).operations {
                let chosen = assignment[op.global_id];
                let p = op.processing_time(chosen).ok_or("incompatible machine")?;
                for &(m, q) in op.alternatives() {
                    let better = load[m] + q < load[chosen] + p || (load[m] + q == load[chosen] + p && m < chosen);
                    ensure(!better, || format!("seed {seed}: op {} should use M{m}", op.global_id))?;
                }
                load[chosen] += p;
            }
        }
    }
    let mut wins = 0;
    for batch in 0..DOMINANCE_BATCHES {
        let mut rng = ChaCha8Rng::seed_from_u64(50_000 + batch);
        let (mut gs, mut rnd) = (0u64, 0u64);
        for _ in 0..DOMINANCE_BATCH_SIZE {
            let inst = random_instance(&mut rng, Variant::Fjsp, &Shape::MEDIUM);
            gs += max_load(&inst, &global_selection(&inst, &mut rng));
            rnd += max_load(&inst, &random_assignment(&inst, &mut rng));
        }
        if gs <= rnd {
            wins += 1;
        }
    }
    let fraction = wins as f64 / DOMINANCE_BATCHES as f64;
    ensure(fraction >= DOMINANCE_MIN_FRACTION, || format!("dominance in {wins}/{DOMINANCE_BATCHES} batches"))?;
    Ok(format!("{REPLAY_TRACES} replays, dominance in {wins}/{DOMINANCE_BATCHES} batches"))
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("AC1 oracle optimality", ac1_oracle),
        ("AC2 toy2x2 values", ac2_toy),
        ("AC3 method/variant table", ac3_table),
        ("AC4 parser round trips", ac4_parsers),
        ("AC5 GA properties", ac5_ga_properties),
        ("AC6 online simulation", ac6_simulation),
        ("AC7 load balancing", ac7_load_balancing),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, check) in criteria {
        let result = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match result {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
