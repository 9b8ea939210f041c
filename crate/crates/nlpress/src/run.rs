//! Executes the tasks of an [`Experiment`] and writes the output files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use nlpress_core::entropy::{h_rate_cover, htop_cover, EntropyRateEstimate};
use nlpress_core::factor::{factor_pressure_identity, FactorAudit};
use nlpress_core::pressure::{
    assemble, pressure_row, PressureReport, PressureRow, PressureValue, Radius, ReportConfig,
};
use nlpress_core::variational::{abundance_check, optimize, AbundanceReport, VariationalReport};
use nlpress_core::{Dyadic, Error};
use rayon::prelude::*;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::{Experiment, Precision, Task};

/// Slack allowed between the optimised objective and the p1 rate window.
pub const VARIATIONAL_SLACK: f64 = 0.1;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    /// An exact search hit its resolution cap or node budget.
    #[error("task {task}: {source}")]
    Limit { task: &'static str, source: Error },
    #[error("task {task}: {source}")]
    Core { task: &'static str, source: Error },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("worker pool: {0}")]
    Pool(String),
}

impl RunError {
    fn core(task: Task, source: Error) -> Self {
        match source {
            Error::ResolutionCap { .. } | Error::SearchBudget(_) => RunError::Limit {
                task: task.name(),
                source,
            },
            _ => RunError::Core {
                task: task.name(),
                source,
            },
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunSettings {
    /// Worker threads; 0 lets rayon decide.
    pub workers: usize,
}

/// What a run produced.
#[derive(Clone, Debug, Default)]
pub struct Summary {
    pub audits_total: usize,
    pub audits_failed: usize,
    pub outputs: Vec<String>,
}

impl Summary {
    pub fn passed(&self) -> bool {
        self.audits_failed == 0
    }
}

#[derive(Default)]
struct Results {
    pressure: Vec<(String, PressureReport)>,
    entropy: Vec<(String, String, EntropyRateEstimate)>,
    variational: Option<(String, VariationalReport, AbundanceReport, Vec<AuditRecord>)>,
    factor: Option<(String, FactorAudit)>,
    timings: Vec<(&'static str, f64)>,
}

struct AuditRecord {
    name: String,
    lhs: f64,
    rhs: f64,
    holds: bool,
}

/// Runs every requested task and writes the outputs into `out_dir`.
pub fn run(
    exp: &Experiment,
    config_text: &str,
    out_dir: &Path,
    settings: &RunSettings,
) -> Result<Summary, RunError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(settings.workers)
        .build()
        .map_err(|e| RunError::Pool(e.to_string()))?;
    let res = pool.install(|| execute(exp))?;

    fs::create_dir_all(out_dir).map_err(|source| RunError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let mut summary = Summary::default();
    let write = |name: &str, body: String, summary: &mut Summary| -> Result<(), RunError> {
        let path = out_dir.join(name);
        fs::write(&path, body).map_err(|source| RunError::Io { path, source })?;
        summary.outputs.push(name.to_string());
        Ok(())
    };

    if exp.tasks.contains(&Task::Pressure) {
        write(
            "pressure.csv",
            pressure_csv(exp, &res.pressure),
            &mut summary,
        )?;
    }
    if exp.tasks.contains(&Task::Entropy) {
        write("entropy.csv", entropy_csv(&res.entropy), &mut summary)?;
    }
    if let Some((cover, report, abundance, _)) = &res.variational {
        let body = serde_json::to_string_pretty(&variational_json(exp, cover, report, abundance))
            .expect("json");
        write("variational.json", body + "\n", &mut summary)?;
    }

    let (audits, total, failed) = audits_json(exp, &res);
    summary.audits_total = total;
    summary.audits_failed = failed;
    write(
        "audits.json",
        serde_json::to_string_pretty(&audits).expect("json") + "\n",
        &mut summary,
    )?;

    let mut outputs = summary.outputs.clone();
    outputs.push("manifest.json".into());
    let manifest = json!({
        "tool": "nlpress",
        "version": env!("CARGO_PKG_VERSION"),
        "experiment": exp.name,
        "config_sha256": hex::encode(Sha256::digest(config_text.as_bytes())),
        "seed": exp.seed,
        "precision": exp.precision.name(),
        "workers": pool.current_num_threads(),
        "tasks": exp.tasks.iter().map(|t| t.name()).collect::<Vec<_>>(),
        "wall_seconds": res.timings.iter().map(|(t, s)| (t.to_string(), json!(s))).collect::<serde_json::Map<_, _>>(),
        "audits": {"total": total, "failed": failed},
        "outputs": outputs,
    });
    write(
        "manifest.json",
        serde_json::to_string_pretty(&manifest).expect("json") + "\n",
        &mut summary,
    )?;
    Ok(summary)
}

fn execute(exp: &Experiment) -> Result<Results, RunError> {
    let mut res = Results::default();
    let wants_pressure =
        exp.tasks.contains(&Task::Pressure) || exp.tasks.contains(&Task::InequalityAudit);

    if wants_pressure {
        let t = Instant::now();
        let task = if exp.tasks.contains(&Task::Pressure) {
            Task::Pressure
        } else {
            Task::InequalityAudit
        };
        let config = ReportConfig {
            n_values: exp.n_values.clone(),
            m_list: exp.m_list.clone(),
            window: exp.window,
            greedy: exp.greedy,
        };
        let jobs: Vec<(usize, usize)> = (0..exp.covers.len())
            .flat_map(|c| exp.n_values.iter().map(move |&n| (c, n)))
            .collect();
        let rows: Vec<Result<PressureRow, Error>> = jobs
            .par_iter()
            .map(|&(c, n)| {
                pressure_row(
                    &exp.sys,
                    &exp.covers[c].1,
                    &exp.energy,
                    n,
                    &config,
                    &exp.opts,
                )
            })
            .collect();
        let mut rows = rows.into_iter();
        for (name, cover) in &exp.covers {
            let mine = rows
                .by_ref()
                .take(exp.n_values.len())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| RunError::core(task, e))?;
            res.pressure.push((
                name.clone(),
                assemble(&exp.sys, cover, &exp.energy, mine, exp.window),
            ));
        }
        res.timings.push(("pressure", t.elapsed().as_secs_f64()));
    }

    if exp.tasks.contains(&Task::Entropy) {
        let t = Instant::now();
        let mut jobs: Vec<(Option<usize>, usize)> = Vec::new();
        for c in 0..exp.covers.len() {
            jobs.push((None, c));
            jobs.extend((0..exp.measures.len()).map(|m| (Some(m), c)));
        }
        let out: Vec<Result<(String, String, EntropyRateEstimate), Error>> = jobs
            .par_iter()
            .map(|&(m, c)| {
                let (cname, cover) = &exp.covers[c];
                let est = match m {
                    None => htop_cover(&exp.sys, cover, exp.entropy_n_max, &exp.opts)?,
                    Some(m) => h_rate_cover(
                        &exp.sys,
                        &exp.measures[m].1,
                        cover,
                        exp.entropy_n_max,
                        &exp.opts,
                    )?,
                };
                let mname = m.map_or("topological".to_string(), |m| exp.measures[m].0.clone());
                Ok((mname, cname.clone(), est))
            })
            .collect();
        for r in out {
            res.entropy
                .push(r.map_err(|e| RunError::core(Task::Entropy, e))?);
        }
        res.timings.push(("entropy", t.elapsed().as_secs_f64()));
    }

    if let Some(v) = &exp.variational {
        let t = Instant::now();
        let err = |e| RunError::core(Task::Variational, e);
        let (cname, cover) = &exp.covers[v.cover];
        let mut report =
            optimize(&exp.sys, cover, &exp.energy, &v.config, &exp.opts).map_err(err)?;
        let window = res
            .pressure
            .iter()
            .find(|(n, _)| n == cname)
            .and_then(|(_, p)| p.estimates.iter().find(|e| e.column == "p1"))
            .map(|e| (e.liminf, e.limsup));
        if let Some((lo, hi)) = window {
            report = report.with_pressure_window(lo, hi);
        }
        let abundance = abundance_check(
            &exp.sys,
            std::slice::from_ref(&report.best_measure),
            cover,
            &exp.energy,
            v.abundance_eps,
            v.config.n_ent,
            &exp.opts,
        )
        .map_err(err)?;
        let mut audits = Vec::new();
        // only meaningful for a generating cover on a mixing system
        if let (Some((_, hi)), true, true) = (
            window,
            exp.sys.is_mixing(),
            cover.diam(&exp.sys) < Dyadic::Pow(0),
        ) {
            audits.push(AuditRecord {
                name: "variational<=p1+slack".into(),
                lhs: report.best_value,
                rhs: hi + VARIATIONAL_SLACK,
                holds: report.best_value <= hi + VARIATIONAL_SLACK,
            });
        }
        for (i, r) in abundance.results.iter().enumerate() {
            audits.push(AuditRecord {
                name: format!("abundance[{i}]"),
                lhs: r.candidate_value - v.abundance_eps,
                rhs: r.witness_value,
                holds: r.passed,
            });
        }
        res.variational = Some((cname.clone(), report, abundance, audits));
        res.timings.push(("variational", t.elapsed().as_secs_f64()));
    }

    if let Some(f) = &exp.factor {
        let t = Instant::now();
        let (cname, cover) = &exp.covers[f.cover];
        let audit = factor_pressure_identity(&f.code, cover, &exp.energy, &f.n_values, &exp.opts)
            .map_err(|e| RunError::core(Task::FactorAudit, e))?;
        res.factor = Some((cname.clone(), audit));
        res.timings
            .push(("factor_audit", t.elapsed().as_secs_f64()));
    }
    Ok(res)
}

fn pressure_csv(exp: &Experiment, reports: &[(String, PressureReport)]) -> String {
    let exact = exp.precision == Precision::Exact;
    let mut out = String::from("# nlpress pressure.csv v1\n");
    let mut header = vec!["cover".to_string(), "n".into()];
    header.extend(
        [
            "p1_log", "p2_log", "p3_log", "p4_log", "p1_rate", "p2_rate", "p3_rate", "p4_rate",
        ]
        .map(String::from),
    );
    header.push("subcover_count".into());
    for m in &exp.m_list {
        header.push(format!("P_m{m}_log"));
        header.push(format!("Q_m{m}_log"));
    }
    if exact {
        header.extend(["p1_exact", "p2_exact", "p3_exact", "p4_exact"].map(String::from));
        for m in &exp.m_list {
            header.push(format!("P_m{m}_exact"));
            header.push(format!("Q_m{m}_exact"));
        }
    }
    header.push("audits_pass".into());
    out.push_str(&header.join(","));
    out.push('\n');

    for (name, report) in reports {
        for row in &report.rows {
            let ps = [&row.p1, &row.p2, &row.p3, &row.p4];
            let mut cells = vec![csv_field(name), row.n.to_string()];
            cells.extend(ps.iter().map(|p| p.log.to_string()));
            cells.extend(ps.iter().map(|p| p.rate(row.n).to_string()));
            cells.push(row.subcover_count.to_string());
            for e in &row.eps {
                cells.push(e.separated.log.to_string());
                cells.push(e.spanning.log.to_string());
            }
            if exact {
                cells.extend(ps.iter().map(|p| exact_cell(p)));
                for e in &row.eps {
                    cells.push(exact_cell(&e.separated));
                    cells.push(exact_cell(&e.spanning));
                }
            }
            cells.push(row.audits_pass().to_string());
            out.push_str(&cells.join(","));
            out.push('\n');
        }
    }
    out
}

fn exact_cell(p: &PressureValue) -> String {
    csv_field(&p.exact.to_string())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn entropy_csv(rows: &[(String, String, EntropyRateEstimate)]) -> String {
    let mut out = String::from("# nlpress entropy.csv v1\nmeasure,cover,n,value\n");
    for (m, c, est) in rows {
        for (n, v) in &est.per_n {
            let _ = writeln!(out, "{},{},{},{}", csv_field(m), csv_field(c), n, v);
        }
    }
    out
}

fn radius_json(r: Radius) -> Value {
    match r {
        Radius::Pow(m) => json!(format!("2^-{m}")),
        Radius::Whole => json!("whole space"),
    }
}

fn variational_json(
    exp: &Experiment,
    cover: &str,
    r: &VariationalReport,
    a: &AbundanceReport,
) -> Value {
    let mu = &r.best_measure;
    json!({
        "cover": cover,
        "memory": r.memory,
        "n_ent": r.n_ent,
        "seed": exp.seed,
        "best_value": r.best_value,
        "entropy_term": r.entropy_term,
        "energy_term": r.energy_term,
        "evaluations": r.evaluations,
        "budget_exhausted": r.budget_exhausted,
        "component": r.component,
        "pressure_window": r.pressure_window.map(|(lo, hi)| json!({"liminf": lo, "limsup": hi})),
        "gap": r.gap(),
        "abundance_note": r.abundance_note,
        "best_measure": {
            "description": mu.describe(),
            "states": mu.states().iter().map(|w| w.to_string()).collect::<Vec<_>>(),
            "transition": mu.transition(),
            "stationary": mu.stationary(),
        },
        "abundance": {
            "structural": a.structural,
            "note": a.note,
            "results": a.results.iter().map(|x| json!({
                "candidate_value": x.candidate_value,
                "witness": x.witness.describe(),
                "witness_value": x.witness_value,
                "passed": x.passed,
            })).collect::<Vec<_>>(),
        },
    })
}

fn audits_json(exp: &Experiment, res: &Results) -> (Value, usize, usize) {
    let mut total = 0;
    let mut failed = 0;
    let mut tally = |holds: bool| {
        total += 1;
        failed += usize::from(!holds);
    };

    let mut covers = Vec::new();
    for (name, report) in &res.pressure {
        let rows: Vec<Value> = report
            .rows
            .iter()
            .map(|row| {
                let audits: Vec<Value> = row
                    .audits
                    .iter()
                    .map(|a| {
                        tally(a.holds);
                        json!({"name": a.name, "lhs": a.lhs, "rhs": a.rhs, "holds": a.holds})
                    })
                    .collect();
                json!({"n": row.n, "audits": audits})
            })
            .collect();
        covers.push(json!({
            "cover": name,
            "diam": report.diam.to_string(),
            "lebesgue_number": format!("2^-{}", report.lebesgue_exp),
            "tau_diam": report.tau_diam.to_string(),
            "sandwich_radius": radius_json(report.sandwich_radius),
            "tau_sandwich": report.tau_sandwich.to_string(),
            "window": report.window,
            "estimates": report.estimates.iter().map(|e| json!({
                "column": e.column, "liminf": e.liminf, "limsup": e.limsup,
            })).collect::<Vec<_>>(),
            "rows": rows,
        }));
    }

    let entropy: Vec<Value> = res
        .entropy
        .iter()
        .map(|(m, c, est)| {
            json!({
                "measure": m,
                "cover": c,
                "monotone": est.monotone,
                "final_value": est.final_value,
                "inf_value": est.inf_value,
                "closed_form": est.closed_form,
            })
        })
        .collect();

    let variational = res.variational.as_ref().map(|(cover, _, _, audits)| {
        json!({
            "cover": cover,
            "audits": audits.iter().map(|a| {
                tally(a.holds);
                json!({"name": a.name, "lhs": a.lhs, "rhs": a.rhs, "holds": a.holds})
            }).collect::<Vec<_>>(),
        })
    });

    let factor = res.factor.as_ref().map(|(cover, f)| {
        tally(f.surjective);
        let rows: Vec<Value> = f
            .rows
            .iter()
            .map(|r| {
                tally(r.equal);
                json!({
                    "n": r.n,
                    "source_log": r.source.log,
                    "target_log": r.target.log,
                    "source_exact": r.source.exact.to_string(),
                    "target_exact": r.target.exact.to_string(),
                    "equal": r.equal,
                })
            })
            .collect();
        json!({
            "cover": cover,
            "surjective": f.surjective,
            "surjectivity_checked_to": f.surjectivity_checked_to,
            "first_failure": f.first_failure,
            "passes": f.passes(),
            "rows": rows,
        })
    });

    let body = json!({
        "experiment": exp.name,
        "pressure": covers,
        "entropy": entropy,
        "variational": variational,
        "factor": factor,
        "summary": {"total": total, "failed": failed},
    });
    (body, total, failed)
}
