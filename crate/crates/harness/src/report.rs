//! Merges the records of finished runs into one HTML page and CSV table.

use std::collections::BTreeMap;
use std::fmt::Write;
use std::fs;
use std::path::{Path, PathBuf};

use maglab_core::diagnostics::DiagnosticRecord;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::{HarnessError, HarnessResult};
use crate::plot::{escape, Plot, Series};
use crate::run::{read_manifest, Run, RunManifest, RECORDS};

#[derive(Debug, Clone)]
pub struct LoadedRun {
    pub dir: PathBuf,
    pub manifest: RunManifest,
    pub records: Vec<DiagnosticRecord>,
}

#[derive(Deserialize)]
struct RecordsFile {
    run: String,
    data: Vec<DiagnosticRecord>,
}

pub fn load_run(dir: &Path) -> HarnessResult<LoadedRun> {
    let manifest = read_manifest(dir)?;
    let path = dir.join(RECORDS);
    let records = if path.exists() {
        let text = fs::read_to_string(&path)?;
        let file: RecordsFile =
            serde_json::from_str(&text).map_err(|e| HarnessError::User(format!("{}: {e}", path.display())))?;
        if file.run != manifest.run_hash {
            return Err(HarnessError::User(format!(
                "{}: records belong to run {}, manifest says {}",
                dir.display(),
                file.run,
                manifest.run_hash
            )));
        }
        file.data
    } else {
        Vec::new()
    };
    Ok(LoadedRun {
        dir: dir.to_path_buf(),
        manifest,
        records,
    })
}

/// Records that differ only in seed (same kind, configuration and
/// parameters) are compared pairwise.
#[derive(Debug, Clone, PartialEq)]
pub struct Overlap {
    pub kind: String,
    pub config_hash: String,
    pub params: String,
    pub seeds: (u64, u64),
    pub cis: ([f64; 2], [f64; 2]),
    pub overlap: bool,
}

pub fn overlaps(records: &[&DiagnosticRecord]) -> Vec<Overlap> {
    let mut groups: BTreeMap<(String, String, String), Vec<&DiagnosticRecord>> = BTreeMap::new();
    for r in records {
        let key = (r.kind.clone(), r.config_hash.clone(), r.params.to_string());
        groups.entry(key).or_default().push(r);
    }
    let mut out = Vec::new();
    for ((kind, config_hash, params), rs) in groups {
        for i in 0..rs.len() {
            for j in i + 1..rs.len() {
                let (a, b) = (rs[i], rs[j]);
                if a.seed == b.seed {
                    continue;
                }
                out.push(Overlap {
                    kind: kind.clone(),
                    config_hash: config_hash.clone(),
                    params: params.clone(),
                    seeds: (a.seed, b.seed),
                    cis: (a.ci, b.ci),
                    overlap: a.ci[0].max(b.ci[0]) <= a.ci[1].min(b.ci[1]),
                });
            }
        }
    }
    out
}

/// First numeric parameter that varies across the records, used as the
/// x axis of the per-kind plot.
fn sweep_axis(records: &[&DiagnosticRecord]) -> Option<String> {
    let first = records.first()?.params.as_object()?;
    let mut keys: Vec<&String> = first.keys().collect();
    keys.sort();
    keys.into_iter()
        .find(|k| {
            let vals: Vec<Option<f64>> = records
                .iter()
                .map(|r| r.params.get(*k).and_then(Value::as_f64))
                .collect();
            vals.iter().all(Option::is_some) && vals.windows(2).any(|w| w[0] != w[1])
        })
        .cloned()
}

pub fn report(out: &Path, seed: u64, dirs: &[PathBuf]) -> HarnessResult<(PathBuf, String)> {
    let runs: Vec<LoadedRun> = dirs.iter().map(|d| load_run(d)).collect::<HarnessResult<_>>()?;
    let hashes: Vec<&str> = runs.iter().map(|r| r.manifest.run_hash.as_str()).collect();
    let mut run = Run::create(out, "report", json!({ "runs": hashes }), None, seed)?;

    let mut rows = Vec::new();
    let mut by_kind: BTreeMap<&str, Vec<(&LoadedRun, &DiagnosticRecord)>> = BTreeMap::new();
    for lr in &runs {
        for r in &lr.records {
            by_kind.entry(r.kind.as_str()).or_default().push((lr, r));
            rows.push(vec![
                lr.manifest.run_hash.clone(),
                lr.manifest.command.clone(),
                r.kind.clone(),
                r.config_hash.clone(),
                r.seed.to_string(),
                format!("{:.12e}", r.estimate),
                format!("{:.12e}", r.ci[0]),
                format!("{:.12e}", r.ci[1]),
                serde_json::to_value(r.ci_method)?.as_str().unwrap_or("").to_string(),
                r.trials.to_string(),
                r.failures.to_string(),
                r.params.to_string(),
            ]);
        }
    }
    run.write_csv(
        "report.csv",
        &[
            "run",
            "command",
            "kind",
            "config_hash",
            "seed",
            "estimate",
            "ci_lo",
            "ci_hi",
            "ci_method",
            "trials",
            "failures",
            "params",
        ],
        &rows,
    )?;

    let all: Vec<&DiagnosticRecord> = runs.iter().flat_map(|r| r.records.iter()).collect();
    let ov = overlaps(&all);
    let ov_rows: Vec<Vec<String>> = ov
        .iter()
        .map(|o| {
            vec![
                o.kind.clone(),
                o.config_hash.clone(),
                o.seeds.0.to_string(),
                o.seeds.1.to_string(),
                format!("{:.12e}", o.cis.0[0]),
                format!("{:.12e}", o.cis.0[1]),
                format!("{:.12e}", o.cis.1[0]),
                format!("{:.12e}", o.cis.1[1]),
                o.overlap.to_string(),
                o.params.clone(),
            ]
        })
        .collect();
    run.write_csv(
        "overlap.csv",
        &[
            "kind",
            "config_hash",
            "seed_a",
            "seed_b",
            "a_lo",
            "a_hi",
            "b_lo",
            "b_hi",
            "overlap",
            "params",
        ],
        &ov_rows,
    )?;

    let mut html = String::new();
    let _ = writeln!(html, "<!DOCTYPE html>\n<!-- run {} -->", run.hash());
    html.push_str(
        "<html><head><meta charset=\"utf-8\"><title>maglab report</title>\n<style>\
         body{font-family:sans-serif;margin:2em}table{border-collapse:collapse;margin-bottom:1.5em}\
         td,th{border:1px solid #999;padding:2px 6px;text-align:right}th{background:#eee}\
         td.l{text-align:left;font-family:monospace}</style></head><body>\n",
    );
    let _ = writeln!(html, "<h1>Report over {} runs</h1>", runs.len());
    html.push_str(
        "<h2>Runs</h2>\n<table><tr><th>run</th><th>command</th><th>seed</th><th>records</th><th>directory</th></tr>\n",
    );
    for lr in &runs {
        let _ = writeln!(
            html,
            "<tr><td class=\"l\">{}</td><td class=\"l\">{}</td><td>{}</td><td>{}</td><td class=\"l\">{}</td></tr>",
            &lr.manifest.run_hash[..12],
            escape(&lr.manifest.command),
            lr.manifest.seed,
            lr.records.len(),
            escape(&lr.dir.display().to_string())
        );
    }
    html.push_str("</table>\n");
    for (kind, recs) in &by_kind {
        let _ = writeln!(html, "<h2>{}</h2>", escape(kind));
        html.push_str(
            "<table><tr><th>run</th><th>seed</th><th>estimate</th><th>95% CI</th><th>trials</th><th>failures</th><th>params</th></tr>\n",
        );
        for (lr, r) in recs {
            let _ = writeln!(
                html,
                "<tr><td class=\"l\">{}</td><td>{}</td><td>{:.6}</td><td>[{:.6}, {:.6}]</td><td>{}</td><td>{}</td><td class=\"l\">{}</td></tr>",
                &lr.manifest.run_hash[..12],
                r.seed,
                r.estimate,
                r.ci[0],
                r.ci[1],
                r.trials,
                r.failures,
                escape(&r.params.to_string())
            );
        }
        html.push_str("</table>\n");
        let only: Vec<&DiagnosticRecord> = recs.iter().map(|(_, r)| *r).collect();
        if only.len() > 1 {
            let axis = sweep_axis(&only);
            let mut per_seed: BTreeMap<u64, Vec<(f64, f64, f64, f64)>> = BTreeMap::new();
            for (i, r) in only.iter().enumerate() {
                let x = axis
                    .as_ref()
                    .and_then(|k| r.params.get(k).and_then(Value::as_f64))
                    .unwrap_or(i as f64);
                per_seed
                    .entry(r.seed)
                    .or_default()
                    .push((x, r.estimate, r.ci[0], r.ci[1]));
            }
            let mut plot = Plot::new(
                kind.to_string(),
                axis.clone().unwrap_or_else(|| "record".into()),
                "estimate",
            );
            for (seed, mut pts) in per_seed {
                pts.sort_by(|a, b| a.0.total_cmp(&b.0));
                plot = plot.add(
                    Series::new(format!("seed {seed}"), pts.iter().map(|p| (p.0, p.1)).collect())
                        .with_band(pts.iter().map(|p| (p.2, p.3)).collect()),
                );
            }
            html.push_str(&plot.render(run.hash()));
        }
    }
    if !ov.is_empty() {
        html.push_str("<h2>CI overlap across seeds</h2>\n<table><tr><th>kind</th><th>seeds</th><th>CI a</th><th>CI b</th><th>overlap</th><th>params</th></tr>\n");
        for o in &ov {
            let _ = writeln!(
                html,
                "<tr><td class=\"l\">{}</td><td>{} / {}</td><td>[{:.6}, {:.6}]</td><td>[{:.6}, {:.6}]</td><td>{}</td><td class=\"l\">{}</td></tr>",
                escape(&o.kind),
                o.seeds.0,
                o.seeds.1,
                o.cis.0[0],
                o.cis.0[1],
                o.cis.1[0],
                o.cis.1[1],
                if o.overlap { "yes" } else { "no" },
                escape(&o.params)
            );
        }
        html.push_str("</table>\n");
    }
    html.push_str("</body></html>\n");
    run.write_document("report.html", &html)?;

    let overlapping = ov.iter().filter(|o| o.overlap).count();
    let summary = format!(
        "report: {} records from {} runs in {} kinds; {overlapping}/{} seed pairs with overlapping CIs",
        all.len(),
        runs.len(),
        by_kind.len(),
        ov.len()
    );
    let dir = run.finish()?;
    Ok((dir, summary))
}

#[cfg(test)]
mod tests {
    use super::*;
    use maglab_core::diagnostics::{CiMethod, Estimate};

    fn rec(kind: &str, seed: u64, lo: f64, hi: f64, eta: f64) -> DiagnosticRecord {
        let e = Estimate {
            value: (lo + hi) / 2.0,
            lo,
            hi,
            method: CiMethod::Normal,
            n: 10,
        };
        DiagnosticRecord::new(kind, "c", seed, &e, 0, json!({ "eta": eta }))
    }

    #[test]
    fn overlap_pairs_only_across_seeds_with_equal_params() {
        let rs = [
            rec("wegner", 1, 0.0, 1.0, 0.1),
            rec("wegner", 2, 0.5, 2.0, 0.1),
            rec("wegner", 3, 3.0, 4.0, 0.1),
            rec("wegner", 1, 0.0, 1.0, 0.2),
            rec("goodbox", 2, 0.0, 1.0, 0.2),
        ];
        let refs: Vec<&DiagnosticRecord> = rs.iter().collect();
        let ov = overlaps(&refs);
        assert_eq!(ov.len(), 3);
        let flags: Vec<(u64, u64, bool)> = ov.iter().map(|o| (o.seeds.0, o.seeds.1, o.overlap)).collect();
        assert_eq!(flags, vec![(1, 2, true), (1, 3, false), (2, 3, false)]);
    }

    #[test]
    fn sweep_axis_picks_varying_number() {
        let rs = [rec("w", 1, 0.0, 1.0, 0.1), rec("w", 1, 0.0, 1.0, 0.2)];
        let refs: Vec<&DiagnosticRecord> = rs.iter().collect();
        assert_eq!(sweep_axis(&refs).as_deref(), Some("eta"));
        assert_eq!(sweep_axis(&refs[..1]), None);
    }
}
