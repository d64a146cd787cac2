//! Experiment orchestration: seeded repetitions of the full planning
//! pipeline (cover swarm → tour swarm → energy report), summary statistics,
//! and the CSV/SVG output files.
//!
//! All emitted files except `timings.csv` are byte-deterministic functions
//! of the configuration: reruns produce identical bytes.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use crate::baselines::{self, SaParams};
use crate::config::Config;
use crate::energy::{mission_energy_with_mode, EnergyBreakdown};
use crate::error::{Error, Result};
use crate::objective::{evaluate_coverage, HoverPlan};
use crate::psod2p::{self, CtopTracePoint, Tour};
use crate::psofkp::{self, CsopTracePoint};
use crate::scenario::Scenario;

/// Everything produced by one repetition.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub rep: usize,
    pub seed: u64,
    /// Wall-clock duration of the repetition. Reported for orientation
    /// only; excluded from the deterministic outputs.
    pub wall_time_s: f64,
    pub k: usize,
    pub s_rc: usize,
    pub feasible: bool,
    pub tour_length_m: f64,
    pub energy: EnergyBreakdown,
    pub plan: HoverPlan,
    pub tour: Tour,
    pub csop_trace: Vec<CsopTracePoint>,
    pub ctop_trace: Vec<CtopTracePoint>,
}

/// Mean / sample standard deviation (N−1) / extremes of one metric. A
/// single observation has zero deviation by convention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatsSummary {
    pub mean: f64,
    pub std: f64,
    pub max: f64,
    pub min: f64,
}

impl StatsSummary {
    pub fn from_values(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Contract("no values to summarize".into()));
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() < 2 {
            0.0
        } else {
            (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
        };
        let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
        Ok(StatsSummary { mean, std, max, min })
    }
}

pub const METRICS: [&str; 4] = ["f1_k", "f2_src", "tour_length_m", "e_total_j"];

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub records: Vec<RunRecord>,
    pub stats: Vec<(String, StatsSummary)>,
}

/// Runs `repetitions` independent pipeline executions with seeds
/// `base_seed + rep` and aggregates the summary table. Deterministic up to
/// wall-clock fields.
pub fn run_experiment(config: &Config) -> Result<ExperimentOutput> {
    config.validate()?;
    let scenario = config.resolve_scenario()?;
    let records: Vec<RunRecord> = (0..config.experiment.repetitions)
        .map(|rep| run_single(&scenario, config, rep))
        .collect::<Result<_>>()?;
    let stats = summarize(&records)?;
    Ok(ExperimentOutput { records, stats })
}

/// One repetition of the pipeline on an already-resolved scenario.
pub fn run_single(scenario: &Scenario, config: &Config, rep: usize) -> Result<RunRecord> {
    let seed = config.experiment.base_seed + rep as u64;
    let started = Instant::now();
    let cover = psofkp::run(scenario, &config.psofkp, seed)?;
    let tour_out = psod2p::run(&cover.plan.points, &config.psod2p, seed)?;
    let energy = mission_energy_with_mode(
        &cover.plan,
        &tour_out.tour,
        config.energy.charge_time_s,
        &config.energy.propulsion,
        config.energy.hover_time_mode,
        scenario.nodes.len(),
    )?;
    let coverage = evaluate_coverage(&cover.plan, scenario);
    Ok(RunRecord {
        rep,
        seed,
        wall_time_s: started.elapsed().as_secs_f64(),
        k: cover.plan.k(),
        s_rc: coverage.s_rc,
        feasible: coverage.feasible,
        tour_length_m: tour_out.length,
        energy,
        plan: cover.plan,
        tour: tour_out.tour,
        csop_trace: cover.trace,
        ctop_trace: tour_out.trace,
    })
}

pub fn summarize(records: &[RunRecord]) -> Result<Vec<(String, StatsSummary)>> {
    let series: [(&str, Vec<f64>); 4] = [
        ("f1_k", records.iter().map(|r| r.k as f64).collect()),
        ("f2_src", records.iter().map(|r| r.s_rc as f64).collect()),
        ("tour_length_m", records.iter().map(|r| r.tour_length_m).collect()),
        ("e_total_j", records.iter().map(|r| r.energy.e_total).collect()),
    ];
    series
        .into_iter()
        .map(|(name, values)| Ok((name.to_string(), StatsSummary::from_values(&values)?)))
        .collect()
}

fn ensure_records(records: &[RunRecord]) -> Result<()> {
    if records.is_empty() {
        return Err(Error::Contract("no run records to emit".into()));
    }
    Ok(())
}

/// `runs.csv`: one row per repetition, deterministic columns only.
pub fn emit_runs_csv(records: &[RunRecord], path: impl AsRef<Path>) -> Result<()> {
    ensure_records(records)?;
    let mut out = String::new();
    out.push_str(
        "rep,seed,k,s_rc,feasible,tour_length_m,t_move_s,t_hover_s,e_move_j,e_hover_j,e_charge_j,e_total_j\n",
    );
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.rep,
            r.seed,
            r.k,
            r.s_rc,
            r.feasible,
            r.tour_length_m,
            r.energy.t_move,
            r.energy.t_hover,
            r.energy.e_move,
            r.energy.e_hover,
            r.energy.e_charge,
            r.energy.e_total
        )
        .expect("string write");
    }
    fs::write(path, out)?;
    Ok(())
}

/// `stats.csv`: one row per metric.
pub fn emit_stats_csv(stats: &[(String, StatsSummary)], path: impl AsRef<Path>) -> Result<()> {
    if stats.is_empty() {
        return Err(Error::Contract("no statistics to emit".into()));
    }
    let mut out = String::from("metric,mean,std,max,min\n");
    for (name, s) in stats {
        writeln!(out, "{},{},{},{},{}", name, s.mean, s.std, s.max, s.min).expect("string write");
    }
    fs::write(path, out)?;
    Ok(())
}

/// `timings.csv`: wall-clock seconds per repetition. Hardware-dependent and
/// deliberately kept out of the deterministic file set.
pub fn emit_timings_csv(records: &[RunRecord], path: impl AsRef<Path>) -> Result<()> {
    ensure_records(records)?;
    let mut out = String::from("rep,seed,wall_time_s\n");
    for r in records {
        writeln!(out, "{},{},{}", r.rep, r.seed, r.wall_time_s).expect("string write");
    }
    fs::write(path, out)?;
    Ok(())
}

/// Convergence and stability series for external plotting, plus an SVG
/// rendering of the convergence curves.
pub fn emit_plotdata(records: &[RunRecord], dir: impl AsRef<Path>) -> Result<()> {
    ensure_records(records)?;
    let dir = dir.as_ref();

    let mut cover = String::from("rep,iter,best_value,best_k,feasible\n");
    for r in records {
        for t in &r.csop_trace {
            writeln!(cover, "{},{},{},{},{}", r.rep, t.iter, t.best_value, t.best_k, t.feasible)
                .expect("string write");
        }
    }
    fs::write(dir.join("psofkp_trace.csv"), cover)?;

    let mut tour = String::from("rep,iter,best_length\n");
    for r in records {
        for t in &r.ctop_trace {
            writeln!(tour, "{},{},{}", r.rep, t.iter, t.best_length).expect("string write");
        }
    }
    fs::write(dir.join("psod2p_trace.csv"), tour)?;

    let mut stability = String::from("rep,csop_value,tour_length_m\n");
    for r in records {
        let csop = r.k as f64 + r.s_rc as f64;
        writeln!(stability, "{},{},{}", r.rep, csop, r.tour_length_m).expect("string write");
    }
    fs::write(dir.join("stability.csv"), stability)?;

    fs::write(dir.join("convergence.svg"), convergence_svg(records))?;
    Ok(())
}

/// Writes the full deterministic output set plus timings into `dir`.
pub fn write_outputs(output: &ExperimentOutput, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    emit_runs_csv(&output.records, dir.join("runs.csv"))?;
    emit_stats_csv(&output.stats, dir.join("stats.csv"))?;
    emit_plotdata(&output.records, dir)?;
    emit_timings_csv(&output.records, dir.join("timings.csv"))?;
    Ok(())
}

/// Per-repetition tour baselines on the pipeline's hover sets:
/// nearest-neighbor and annealing lengths next to the swarm result.
pub fn emit_tour_baselines_csv(
    records: &[RunRecord],
    sa: &SaParams,
    path: impl AsRef<Path>,
) -> Result<()> {
    ensure_records(records)?;
    let mut out = String::from("rep,seed,psod2p_length_m,nn_length_m,sa_length_m\n");
    for r in records {
        let nn = baselines::nearest_neighbor_tour(&r.plan.points, 0)?;
        let nn_len = crate::objective::f_ctop(&nn, &r.plan.points)?;
        let sa_tour = baselines::sim_anneal_tour(&r.plan.points, sa, r.seed)?;
        let sa_len = crate::objective::f_ctop(&sa_tour, &r.plan.points)?;
        writeln!(out, "{},{},{},{},{}", r.rep, r.seed, r.tour_length_m, nn_len, sa_len)
            .expect("string write");
    }
    fs::write(path, out)?;
    Ok(())
}

fn convergence_svg(records: &[RunRecord]) -> String {
    let panel_w = 420.0;
    let panel_h = 300.0;
    let margin = 45.0;
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" \
         font-family=\"sans-serif\" font-size=\"11\">\n",
        2.0 * (panel_w + margin) + margin,
        panel_h + 2.0 * margin
    ));

    let panels: [(&str, Box<dyn Fn(&RunRecord) -> Vec<(f64, f64)>>); 2] = [
        (
            "cover objective (k + repeat coverage)",
            Box::new(|r: &RunRecord| {
                r.csop_trace.iter().map(|t| (t.iter as f64, t.best_value)).collect()
            }),
        ),
        (
            "tour length (m)",
            Box::new(|r: &RunRecord| {
                r.ctop_trace.iter().map(|t| (t.iter as f64, t.best_length)).collect()
            }),
        ),
    ];

    for (idx, (title, series_of)) in panels.iter().enumerate() {
        let x0 = margin + idx as f64 * (panel_w + margin);
        let y0 = margin;
        let series: Vec<Vec<(f64, f64)>> = records.iter().map(|r| series_of(r)).collect();
        let xs_max = series
            .iter()
            .flat_map(|s| s.iter().map(|p| p.0))
            .fold(1.0f64, f64::max);
        let ys_max = series
            .iter()
            .flat_map(|s| s.iter().map(|p| p.1))
            .fold(f64::MIN, f64::max);
        let ys_min = series
            .iter()
            .flat_map(|s| s.iter().map(|p| p.1))
            .fold(f64::MAX, f64::min);
        let span = (ys_max - ys_min).max(1e-9);
        svg.push_str(&format!(
            "<rect x=\"{x0:.2}\" y=\"{y0:.2}\" width=\"{panel_w:.2}\" height=\"{panel_h:.2}\" \
             fill=\"none\" stroke=\"#999\"/>\n"
        ));
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>\n",
            x0 + panel_w / 2.0,
            y0 - 10.0,
            title
        ));
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{:.1}</text>\n",
            x0 - 4.0,
            y0 + 10.0,
            ys_max
        ));
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{:.1}</text>\n",
            x0 - 4.0,
            y0 + panel_h,
            ys_min
        ));
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">iteration</text>\n",
            x0 + panel_w / 2.0,
            y0 + panel_h + 26.0
        ));
        for points in &series {
            let path: Vec<String> = points
                .iter()
                .map(|&(x, y)| {
                    format!(
                        "{:.2},{:.2}",
                        x0 + (x / xs_max) * panel_w,
                        y0 + panel_h - ((y - ys_min) / span) * panel_h
                    )
                })
                .collect();
            svg.push_str(&format!(
                "<polyline points=\"{}\" fill=\"none\" stroke=\"#27649c\" \
                 stroke-opacity=\"0.45\" stroke-width=\"1\"/>\n",
                path.join(" ")
            ));
        }
    }
    svg.push_str("</svg>\n");
    svg
}

/// Metric columns re-read from an emitted `runs.csv`.
#[derive(Debug, Clone)]
pub struct RunsTable {
    pub k: Vec<f64>,
    pub s_rc: Vec<f64>,
    pub tour_length_m: Vec<f64>,
    pub e_total_j: Vec<f64>,
    pub feasible: Vec<bool>,
}

pub fn read_runs_csv(path: impl AsRef<Path>) -> Result<RunsTable> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Parse {
        path: path.display().to_string(),
        detail: "empty file".into(),
    })?;
    let columns: Vec<&str> = header.split(',').collect();
    let col = |name: &str| -> Result<usize> {
        columns.iter().position(|&c| c == name).ok_or_else(|| Error::Parse {
            path: path.display().to_string(),
            detail: format!("missing column '{name}'"),
        })
    };
    let (ik, isrc, itour, ietotal, ifeas) = (
        col("k")?,
        col("s_rc")?,
        col("tour_length_m")?,
        col("e_total_j")?,
        col("feasible")?,
    );
    let mut table = RunsTable {
        k: Vec::new(),
        s_rc: Vec::new(),
        tour_length_m: Vec::new(),
        e_total_j: Vec::new(),
        feasible: Vec::new(),
    };
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let parse = |idx: usize| -> Result<f64> {
            fields
                .get(idx)
                .and_then(|f| f.parse::<f64>().ok())
                .ok_or_else(|| Error::Parse {
                    path: path.display().to_string(),
                    detail: format!("line {}: bad field {idx}", lineno + 2),
                })
        };
        table.k.push(parse(ik)?);
        table.s_rc.push(parse(isrc)?);
        table.tour_length_m.push(parse(itour)?);
        table.e_total_j.push(parse(ietotal)?);
        table.feasible.push(fields.get(ifeas) == Some(&"true"));
    }
    if table.k.is_empty() {
        return Err(Error::Parse {
            path: path.display().to_string(),
            detail: "no data rows".into(),
        });
    }
    Ok(table)
}

/// Summary of an emitted runs table, metric-for-metric comparable with
/// [`summarize`].
pub fn stats_of_table(table: &RunsTable) -> Result<Vec<(String, StatsSummary)>> {
    Ok(vec![
        ("f1_k".into(), StatsSummary::from_values(&table.k)?),
        ("f2_src".into(), StatsSummary::from_values(&table.s_rc)?),
        ("tour_length_m".into(), StatsSummary::from_values(&table.tour_length_m)?),
        ("e_total_j".into(), StatsSummary::from_values(&table.e_total_j)?),
    ])
}
