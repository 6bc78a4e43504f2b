//! Scenario-driven batch runner behind the `gauss-ito` binary.

pub mod report;
pub mod scenario;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::gaussproc::{path_qv_mc, ProcessKind, CATALOG};
use crate::itoverify::{
    hermite_p2_identity_mc, ito_rcll_residual, ito_stransform_residual, martingale_ito_mc, mc_s_transform,
    ItoCase, ItoControls, McReport, Term,
};
use crate::regulated::Partition;

pub use report::{CaseKind, CaseRecord, McSummary, Summary, TermRecord, VerificationReport};
pub use scenario::{auto_battery, parse_scenario, Resolved, Scenario};

pub const DEFAULT_OUT_DIR: &str = "gauss-ito-out";

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Takes precedence over the scenario's output directory.
    pub out: Option<PathBuf>,
    /// Replaces the scenario's Monte Carlo seeds.
    pub seed: Option<u64>,
    /// Worker threads; `None` uses every core.
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: VerificationReport,
    pub out_dir: PathBuf,
    /// Wall-clock time per case in milliseconds, sorted by case id.
    pub timings: Vec<(String, f64)>,
}

impl RunOutcome {
    /// 0 if every case passed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.report.all_passed() {
            0
        } else {
            1
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Task {
    Stransform { model: usize, function: usize, h: usize },
    Rcll { model: usize, function: usize, h: usize },
    Martingale { model: usize, function: usize, seed: u64 },
    PathQv { model: usize, seed: u64 },
    Observable { model: usize, h: usize, obs: usize, seed: u64 },
    Hermite { model: usize, h: usize, seed: u64 },
}

fn tasks(s: &Scenario, r: &Resolved) -> Vec<Task> {
    let mut out = Vec::new();
    for (model, spec) in r.models.iter().enumerate() {
        for function in 0..r.functions.len() {
            for h in 0..r.batteries[model].len() {
                if s.checks.stransform {
                    out.push(Task::Stransform { model, function, h });
                }
                if s.checks.rcll && spec.kind() != ProcessKind::General {
                    out.push(Task::Rcll { model, function, h });
                }
            }
        }
    }
    let Some(mc) = &s.mc else { return out };
    for &seed in &mc.seeds {
        for (model, spec) in r.models.iter().enumerate() {
            if mc.martingale && spec.kind() == ProcessKind::Martingale {
                for function in 0..r.functions.len() {
                    out.push(Task::Martingale { model, function, seed });
                }
            }
            if mc.path_qv && spec.is_brownian_driven() {
                out.push(Task::PathQv { model, seed });
            }
            for h in 0..r.batteries[model].len() {
                for obs in 0..mc.observables.len() {
                    out.push(Task::Observable { model, h, obs, seed });
                }
                if mc.hermite {
                    out.push(Task::Hermite { model, h, seed });
                }
            }
        }
    }
    out
}

struct Context<'a> {
    scenario: &'a Scenario,
    resolved: &'a Resolved,
}

impl Context<'_> {
    fn model_tag(&self, i: usize) -> String {
        format!("m{i:02}-{}", self.resolved.models[i].model().id())
    }

    fn function_tag(&self, j: usize) -> String {
        format!("f{j:02}-{}", self.resolved.functions[j].label())
    }

    fn case(&self, model: usize, function: usize, h: usize) -> Result<ItoCase> {
        let r = self.resolved;
        let controls = ItoControls {
            ys: self.scenario.integration.ys,
            ls: self.scenario.integration.ls,
            mutations: self.scenario.mutations,
        };
        Ok(ItoCase::new(r.models[model].clone(), r.functions[function].clone(), r.batteries[model][h].clone())?
            .with_controls(controls))
    }

    fn deterministic_tolerance(&self, function: usize) -> f64 {
        let t = &self.scenario.tolerances;
        if self.resolved.functions[function].is_polynomial() {
            t.polynomial
        } else {
            t.transcendental
        }
    }

    fn grid(&self) -> Result<Partition> {
        let mc = self.scenario.mc.as_ref().expect("mc tasks need mc controls");
        Partition::uniform(self.scenario.horizon, mc.grid_intervals)
    }

    fn run(&self, task: Task) -> CaseRecord {
        let z_max = self.scenario.tolerances.z_max;
        let n_paths = self.scenario.mc.as_ref().map_or(0, |m| m.n_paths);
        let mut rec = match task {
            Task::Stransform { model, function, h } | Task::Rcll { model, function, h } => {
                let check = if matches!(task, Task::Rcll { .. }) { "rcll" } else { "stransform" };
                let id = format!("{}/{}/h{h:02}/{check}", self.model_tag(model), self.function_tag(function));
                let mut rec = CaseRecord::new(
                    id,
                    CaseKind::Deterministic,
                    check,
                    self.model_tag(model),
                    self.deterministic_tolerance(function),
                );
                rec.function = Some(self.resolved.functions[function].label());
                rec.h = Some(self.resolved.batteries[model][h].clone());
                let outcome = self.case(model, function, h).and_then(|case| {
                    if check == "rcll" {
                        let b = ito_rcll_residual(&case)?;
                        Ok((b.lhs, b.terms(&case), b.residual, b.converged, b.ys_error_estimate))
                    } else {
                        let b = ito_stransform_residual(&case)?;
                        Ok((b.lhs, b.terms(&case), b.residual, b.converged, b.ys_error_estimate))
                    }
                });
                match outcome {
                    Ok((lhs, terms, residual, converged, err)) => {
                        rec.lhs = Some(lhs);
                        rec.terms = terms.iter().map(TermRecord::from).collect();
                        rec.set_residual(residual);
                        rec.pass = converged && residual.abs() < rec.tolerance;
                        if !converged {
                            rec.error = Some(format!("integration did not converge (error estimate {err:e})"));
                        }
                    }
                    Err(e) => rec.error = Some(e.to_string()),
                }
                return rec;
            }
            Task::Martingale { model, function, seed } => {
                let id = format!(
                    "{}/{}/mc-martingale/seed{seed}",
                    self.model_tag(model),
                    self.function_tag(function)
                );
                let tol = self.scenario.tolerances.martingale_l2;
                let mut rec = CaseRecord::new(id, CaseKind::Mc, "martingale", self.model_tag(model), tol);
                rec.function = Some(self.resolved.functions[function].label());
                let outcome = self.case(model, function, 0).and_then(|case| {
                    martingale_ito_mc(&case, &self.grid()?, n_paths, seed)
                });
                match outcome {
                    Ok(r) => {
                        rec.set_residual(r.relative_l2);
                        rec.terms = vec![
                            TermRecord { name: "rms_lhs".into(), value: Some(r.rms_lhs), residual_contribution: None },
                            TermRecord {
                                name: "rms_residual".into(),
                                value: Some(r.rms_residual),
                                residual_contribution: None,
                            },
                        ];
                        rec.mc = Some(McSummary::from(&r.mean_residual));
                        rec.pass = r.relative_l2 < tol && r.mean_residual.passes(z_max);
                    }
                    Err(e) => rec.error = Some(e.to_string()),
                }
                return rec;
            }
            Task::PathQv { model, seed } => {
                let id = format!("{}/mc-path-qv/seed{seed}", self.model_tag(model));
                let rec = CaseRecord::new(id, CaseKind::Mc, "path_qv", self.model_tag(model), z_max);
                let out = self
                    .grid()
                    .and_then(|g| path_qv_mc(&self.resolved.models[model], &g, n_paths, seed));
                (rec, out)
            }
            Task::Observable { model, h, obs, seed } => {
                let id = format!("{}/h{h:02}/mc-s-transform/o{obs:02}/seed{seed}", self.model_tag(model));
                let mut rec = CaseRecord::new(id, CaseKind::Mc, "s_transform", self.model_tag(model), z_max);
                rec.function = Some(self.resolved.functions[0].label());
                rec.h = Some(self.resolved.batteries[model][h].clone());
                let observable = &self.scenario.mc.as_ref().expect("mc controls").observables[obs];
                let out = self
                    .case(model, 0, h)
                    .and_then(|case| mc_s_transform(&case, observable, n_paths, seed));
                (rec, out)
            }
            Task::Hermite { model, h, seed } => {
                let id = format!("{}/h{h:02}/mc-hermite/seed{seed}", self.model_tag(model));
                let mut rec = CaseRecord::new(id, CaseKind::Mc, "hermite", self.model_tag(model), z_max);
                let spec = &self.resolved.models[model];
                let battery = &self.resolved.batteries[model];
                rec.h = Some(battery[h].clone());
                let out = spec.cm_element(battery[h].clone()).and_then(|g| {
                    let k = spec.cm_element(battery[(h + 1) % battery.len()].clone())?;
                    hermite_p2_identity_mc(spec, &g, &k, n_paths, seed)
                });
                (rec, out)
            }
        }
        .into_record(z_max);
        rec.pass &= rec.error.is_none();
        rec
    }
}

trait IntoRecord {
    fn into_record(self, z_max: f64) -> CaseRecord;
}

impl IntoRecord for (CaseRecord, Result<McReport>) {
    fn into_record(self, z_max: f64) -> CaseRecord {
        let (mut rec, out) = self;
        match out {
            Ok(r) => {
                rec.set_residual(r.estimate - r.reference);
                rec.terms = [
                    Term { name: "estimate", value: r.estimate, residual_contribution: r.estimate },
                    Term { name: "reference", value: r.reference, residual_contribution: 0.0 - r.reference },
                ]
                .iter()
                .map(TermRecord::from)
                .collect();
                rec.mc = Some(McSummary::from(&r));
                rec.pass = r.passes(z_max);
            }
            Err(e) => rec.error = Some(e.to_string()),
        }
        rec
    }
}

/// Runs every case of a resolved scenario on a pool of `jobs` threads.
pub fn execute(
    scenario: &Scenario,
    resolved: &Resolved,
    scenario_hash: String,
    jobs: Option<usize>,
) -> Result<(VerificationReport, Vec<(String, f64)>)> {
    let ctx = Context { scenario, resolved };
    let list = tasks(scenario, resolved);
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        builder = builder.num_threads(j.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("cannot start the worker pool: {e}")))?;
    let results: Vec<(CaseRecord, f64)> = pool.install(|| {
        list.par_iter()
            .map(|&task| {
                let start = Instant::now();
                let rec = ctx.run(task);
                (rec, start.elapsed().as_secs_f64() * 1e3)
            })
            .collect()
    });
    let mut timings: Vec<(String, f64)> = results.iter().map(|(r, ms)| (r.id.clone(), *ms)).collect();
    timings.sort_by(|a, b| a.0.cmp(&b.0));
    let report = VerificationReport::new(scenario_hash, results.into_iter().map(|(r, _)| r).collect());
    Ok((report, timings))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Loads, validates and runs a scenario file, then writes the JSON report,
/// the per-term CSV and the timings CSV. Errors are configuration or I/O
/// problems; failing cases are reported through the outcome.
pub fn run_file(path: &Path, opts: &RunOptions) -> Result<RunOutcome> {
    let bytes = fs::read(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut scenario = parse_scenario(&bytes)?;
    if let (Some(seed), Some(mc)) = (opts.seed, scenario.mc.as_mut()) {
        mc.seeds = vec![seed];
    }
    let resolved = scenario.resolve()?;
    let (report, timings) = execute(&scenario, &resolved, sha256_hex(&bytes), opts.jobs)?;

    let out_dir = opts
        .out
        .clone()
        .or_else(|| scenario.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
    fs::create_dir_all(&out_dir)?;
    fs::write(out_dir.join(&scenario.output.report), report.to_json()?)?;
    report.write_terms_csv(fs::File::create(out_dir.join(&scenario.output.terms))?)?;
    let mut t = String::from("case_id,runtime_ms\n");
    for (id, ms) in &timings {
        t.push_str(&format!("\"{}\",{ms:.3}\n", id.replace('"', "\"\"")));
    }
    fs::write(out_dir.join(&scenario.output.timings), t)?;
    Ok(RunOutcome {
        report,
        out_dir,
        timings,
    })
}

/// Model ids, their parameters and what each one exercises.
pub fn list_catalog() -> String {
    let mut s = String::new();
    for e in &CATALOG {
        s.push_str(&format!("{} — exercises {}\n    params: {}\n", e.id, e.exercises, e.params));
    }
    s
}
