//! Files written by `ikpaver solve`.
//!
//! * `solutions.json`: one record per accepted box with its rotation box,
//!   joint box, cluster and curve membership.
//! * `curves.csv`: one row per box, ordered along each curve, with joint
//!   midpoints. Boxes outside every curve follow with an empty `curve_id`.
//! * `report.json`: configuration, timings, counters and curve summaries.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use ikpaver::solver::{RunStats, Timings};
use ikpaver::{EndpointKind, Interval, SolveOutcome, SolverConfig, Termination};
use serde::Serialize;

#[derive(Serialize)]
struct SolutionRecord<'a> {
    rotation_box: &'a [Interval],
    joint_box: &'a [Interval],
    cluster_id: usize,
    curve_id: Option<usize>,
}

#[derive(Serialize)]
struct Counts {
    solutions: usize,
    clusters: usize,
    /// Clusters holding a refined root; finite solution sets only.
    rooted_clusters: Option<usize>,
    curves: usize,
    pooled: usize,
}

#[derive(Serialize)]
struct CurveSummary {
    curve_id: usize,
    length: usize,
    closed: bool,
    ends: [EndpointKind; 2],
}

#[derive(Serialize)]
struct Report<'a> {
    model: &'a str,
    target: &'a str,
    config: &'a SolverConfig,
    termination: Termination,
    timings: &'a Timings,
    stats: &'a RunStats,
    counts: Counts,
    redundancy: Option<usize>,
    curves: Vec<CurveSummary>,
}

/// Curve id and position along it for every box, numbering curves densely.
fn curve_membership(out: &SolveOutcome) -> Vec<Option<(usize, usize)>> {
    let mut member = vec![None; out.solutions.len()];
    for (id, (_, c)) in out.curves.curves().enumerate() {
        for (k, &b) in c.boxes.iter().enumerate() {
            member[b] = Some((id, k));
        }
    }
    member
}

pub fn write_all(
    dir: &Path,
    model: &str,
    target: &str,
    cfg: &SolverConfig,
    out: &SolveOutcome,
) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let member = curve_membership(out);
    write_solutions(&dir.join("solutions.json"), out, &member)?;
    write_curves(&dir.join("curves.csv"), out)?;
    write_report(&dir.join("report.json"), model, target, cfg, out)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn write_solutions(
    path: &Path,
    out: &SolveOutcome,
    member: &[Option<(usize, usize)>],
) -> Result<()> {
    let records: Vec<SolutionRecord> = out
        .solutions
        .iter()
        .enumerate()
        .map(|(i, b)| SolutionRecord {
            rotation_box: b.rotation_box.components(),
            joint_box: &b.joints.theta,
            cluster_id: out.cluster_ids[i],
            curve_id: member[i].map(|(c, _)| c),
        })
        .collect();
    // one compact record per line keeps large sets readable and diffable
    let mut w = create(path)?;
    write!(w, "[")?;
    for (i, r) in records.iter().enumerate() {
        write!(w, "{}\n  ", if i == 0 { "" } else { "," })?;
        serde_json::to_writer(&mut w, r)?;
    }
    writeln!(w, "{}]", if records.is_empty() { "" } else { "\n" })?;
    w.flush()
        .with_context(|| format!("writing {}", path.display()))
}

fn write_curves(path: &Path, out: &SolveOutcome) -> Result<()> {
    let mut w = create(path)?;
    let dof = out.solutions.iter().next().map_or(0, |b| b.joints.len());
    write!(w, "curve_id,order_index")?;
    for j in 1..=dof {
        write!(w, ",theta{j}")?;
    }
    writeln!(w)?;
    let row = |w: &mut BufWriter<File>, curve: String, k: usize, b: usize| -> std::io::Result<()> {
        write!(w, "{curve},{k}")?;
        for m in out.solutions.get(b).joints.midpoint() {
            write!(w, ",{m:?}")?;
        }
        writeln!(w)
    };
    for (id, (_, c)) in out.curves.curves().enumerate() {
        for (k, &b) in c.boxes.iter().enumerate() {
            row(&mut w, id.to_string(), k, b)?;
        }
    }
    for (k, &b) in out.curves.pool().iter().enumerate() {
        row(&mut w, String::new(), k, b)?;
    }
    w.flush()
        .with_context(|| format!("writing {}", path.display()))
}

fn write_report(
    path: &Path,
    model: &str,
    target: &str,
    cfg: &SolverConfig,
    out: &SolveOutcome,
) -> Result<()> {
    let curves = out
        .curves
        .curves()
        .enumerate()
        .map(|(id, (_, c))| CurveSummary {
            curve_id: id,
            length: c.len(),
            closed: c.closed,
            ends: c.ends,
        })
        .collect();
    let report = Report {
        model,
        target,
        config: cfg,
        termination: out.termination,
        timings: &out.timings,
        stats: &out.stats,
        counts: Counts {
            solutions: out.solutions.len(),
            clusters: out.cluster_count,
            rooted_clusters: out.root_count,
            curves: out.curves.curve_count(),
            pooled: out.curves.pool().len(),
        },
        redundancy: out.redundancy,
        curves,
    };
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, &report)?;
    writeln!(w)?;
    w.flush()
        .with_context(|| format!("writing {}", path.display()))
}
