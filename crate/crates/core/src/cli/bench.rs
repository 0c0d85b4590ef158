use std::fs;
use std::time::Instant;

use rayon::prelude::*;

use super::{
    allowed, load_instance, run_method, BenchArgs, LoadError, MethodOptions, MethodTag,
    ProblemClass, EXIT_INPUT, EXIT_OK, EXIT_USAGE,
};
use crate::model::{validate, Instance};

pub const CSV_HEADER: [&str; 7] = ["instance", "method", "params", "seed", "makespan", "wall_ms", "status"];

struct Row {
    instance: String,
    method: MethodTag,
    params: String,
    seed: u64,
    makespan: Option<u64>,
    wall_ms: f64,
    status: &'static str,
}

impl Row {
    fn record(&self) -> [String; 7] {
        [
            self.instance.clone(),
            self.method.name().to_string(),
            self.params.clone(),
            self.seed.to_string(),
            self.makespan.map(|m| m.to_string()).unwrap_or_default(),
            format!("{:.3}", self.wall_ms),
            self.status.to_string(),
        ]
    }
}

fn run_cell(
    instance: &Instance,
    method: MethodTag,
    opts: &MethodOptions,
    allow_extension: bool,
) -> (Option<u64>, f64, &'static str) {
    if !allowed(method, ProblemClass::Static(instance.variant()), allow_extension) {
        return (None, 0.0, "skipped");
    }
    let started = Instant::now();
    let result = run_method(instance, method, opts);
    let wall_ms = started.elapsed().as_secs_f64() * 1e3;
    match result {
        Ok(s) if validate(&s, instance).is_ok_and(|v| v.is_empty()) => {
            (Some(s.makespan()), wall_ms, "ok")
        }
        _ => (None, wall_ms, "infeasible"),
    }
}

pub(super) fn benchmark(args: &BenchArgs) -> i32 {
    if args.methods.contains(&MethodTag::Ga) {
        if let Err(e) = args.ga.params(0).validate() {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    }
    let entries = match fs::read_dir(&args.dir) {
        Ok(entries) => entries,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.dir.display());
            return EXIT_INPUT;
        }
    };
    let mut files: Vec<_> = entries
        .filter_map(Result::ok)
        .filter(|e| e.file_type().is_ok_and(|t| t.is_file()))
        .map(|e| e.path())
        .collect();
    files.sort();

    let loaded: Vec<(String, Result<Instance, LoadError>)> = files
        .iter()
        .map(|p| {
            let name = p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            (name, load_instance(p, args.format))
        })
        .collect();

    let mut cells = Vec::new();
    for index in 0..loaded.len() {
        for &method in &args.methods {
            for &seed in &args.seeds {
                cells.push((index, method, seed));
            }
        }
    }

    let rows: Vec<Row> = cells
        .par_iter()
        .map(|&(index, method, seed)| {
            let (name, instance) = &loaded[index];
            let opts = MethodOptions {
                op_rule: args.rules.op_rule,
                mach_rule: args.rules.mach_rule,
                ga: args.ga.params(seed),
            };
            let (makespan, wall_ms, status) = match instance {
                Ok(instance) => run_cell(instance, method, &opts, args.allow_extension),
                Err(_) => (None, 0.0, "parse_error"),
            };
            Row {
                instance: name.clone(),
                method,
                params: opts.describe(method),
                seed,
                makespan,
                wall_ms,
                status,
            }
        })
        .collect();

    for (name, instance) in &loaded {
        if let Err(e) = instance {
            eprintln!("warning: {name}: {e}");
        }
    }

    let written = csv::Writer::from_path(&args.csv).and_then(|mut w| {
        w.write_record(CSV_HEADER)?;
        for row in &rows {
            w.write_record(row.record())?;
        }
        w.flush()?;
        Ok(())
    });
    if let Err(e) = written {
        eprintln!("error: cannot write {}: {e}", args.csv.display());
        return EXIT_INPUT;
    }
    let noun = if rows.len() == 1 { "row" } else { "rows" };
    println!("{} {noun} written to {}", rows.len(), args.csv.display());
    EXIT_OK
}
