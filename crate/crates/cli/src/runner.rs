//! Dispatch, report fan-out and the single artifact writer.

use std::path::PathBuf;

use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::config::{ExperimentConfig, Overrides};
use crate::error::CliError;
use crate::output::{write_artifacts, Table};
use crate::tasks::{report_tasks, run_task, Task, TaskOutput};

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub task: Task,
    pub config: PathBuf,
    pub out: PathBuf,
    pub overrides: Overrides,
    pub seed: u64,
}

/// Runs one task (or the report fan-out) and writes its artifacts.
/// Returns the process exit code.
pub fn run(opts: &RunOptions) -> Result<i32, CliError> {
    let file = opts
        .config
        .file_name()
        .map(|f| f.to_string_lossy().into_owned())
        .unwrap_or_else(|| "config".into());
    let cfg = ExperimentConfig::load(&opts.config, opts.overrides).map_err(|e| e.in_file(&file))?;
    if let Some(t) = &cfg.task {
        // the file may name its intended task; the subcommand still decides
        t.parse::<Task>().map_err(|e| e.in_file(&file))?;
    }
    let (result, tables, status, message, code) = match opts.task {
        Task::Report => report(&cfg, opts.seed, &file)?,
        task => {
            let out = run_task(task, &cfg, opts.seed).map_err(|e| e.in_file(&file))?;
            let code = if out.exhausted.is_some() { 3 } else { 0 };
            let status = if code == 3 { "budget_exhausted" } else { "ok" };
            (out.json, out.tables, status, out.exhausted, code)
        }
    };
    let mut names: Vec<String> = tables.iter().map(|t| format!("{}.csv", t.name)).collect();
    names.sort();
    let results = json!({
        "tool": "kestenlab",
        "version": env!("CARGO_PKG_VERSION"),
        "task": opts.task.name(),
        "seed": opts.seed,
        "config": serde_json::to_value(&cfg).expect("config serializes"),
        "status": status,
        "message": message,
        "result": result,
        "series": names,
    });
    write_artifacts(&opts.out, &results, &tables)?;
    if let Some(m) = &message {
        eprintln!("warning: {m}");
    }
    Ok(code)
}

type Collected = (Value, Vec<Table>, &'static str, Option<String>, i32);

fn report(cfg: &ExperimentConfig, seed: u64, file: &str) -> Result<Collected, CliError> {
    let tasks = report_tasks(cfg);
    if tasks.is_empty() {
        return Err(CliError::validation("config", "no task has its required sections").in_file(file));
    }
    let outputs: Vec<(Task, Result<TaskOutput, CliError>)> =
        tasks.par_iter().map(|&t| (t, run_task(t, cfg, seed))).collect();
    let mut sections = Map::new();
    let mut tables = Vec::new();
    let mut code = 0;
    let mut messages = Vec::new();
    for (task, out) in outputs {
        match out {
            Ok(o) => {
                let status = if let Some(m) = &o.exhausted {
                    messages.push(format!("{task}: {m}"));
                    if code == 0 {
                        code = 3;
                    }
                    "budget_exhausted"
                } else {
                    "ok"
                };
                sections.insert(task.name().into(), json!({"status": status, "result": o.json}));
                tables.extend(o.tables);
            }
            Err(e) => {
                let e = e.in_file(file);
                if code == 0 {
                    code = e.exit_code();
                }
                messages.push(format!("{task}: {e}"));
                sections.insert(task.name().into(), json!({"status": "error", "error": e.to_string()}));
            }
        }
    }
    let status = match code {
        0 => "ok",
        3 => "budget_exhausted",
        _ => "error",
    };
    let message = (!messages.is_empty()).then(|| messages.join("; "));
    Ok((json!({"tasks": Value::Object(sections)}), tables, status, message, code))
}
