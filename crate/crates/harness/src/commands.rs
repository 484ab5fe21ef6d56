//! One function per subcommand. Each opens a run directory, calls into the
//! core crate, writes its tables, records and plots, and returns a summary
//! line.

use std::sync::Arc;

use maglab_core::band_structure::{band_edges, ensemble_forbidden_interval, localization_window, sigma_band_report};
use maglab_core::diagnostics::{
    balanced_mc, box_operator, combes_thomas_fit, good_box_mc, ids_histogram, lifshitz_tail_mc, sample_for_box,
    trial_residual_scan, wegner_mc, BalancedParams, CiMethod, DiagnosticRecord, Estimate, GoodBoxParams, GridOptions,
    IdsParams, LifshitzParams, WegnerParams,
};
use maglab_core::field_model::{sample_field, validate_model, FieldModelConfig, SampledField};
use maglab_core::gauge::BoxSpec;
use maglab_core::landau_resolvent::{kernel_bound_audit, log_grid, window_grid};
use maglab_core::lattice::export::write_coordinate;
use maglab_core::lattice::{
    eigs_window, full_spectrum, torus_landau, DiscreteHamiltonian, Stencil, TorusSpec, WindowOptions, DENSE_CAP,
};
use maglab_core::Rect;
use serde_json::{json, Value};

use crate::cli::{
    BalancedArgs, DecayArgs, EdgesArgs, GoodBoxArgs, GridArgs, IdsArgs, KernelAuditArgs, LifshitzArgs, SampleArgs,
    SpectrumArgs, TrialArgs, WegnerArgs,
};
use crate::error::{HarnessError, HarnessResult};
use crate::plot::{Plot, Series};
use crate::run::{Run, RECORDS};

/// Global flags shared by every subcommand.
#[derive(Debug, Clone)]
pub struct Context {
    pub config: Option<FieldModelConfig>,
    pub seed: u64,
    pub trials: usize,
    pub out: std::path::PathBuf,
}

/// Result of a finished subcommand.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub dir: std::path::PathBuf,
    pub summary: String,
    /// 0 unless the command completed but found failed checks.
    pub status: i32,
}

impl Context {
    fn config(&self) -> HarnessResult<&FieldModelConfig> {
        self.config
            .as_ref()
            .ok_or_else(|| HarnessError::User("this command needs --config".into()))
    }

    fn open(&self, command: &str, args: Value, with_trials: bool) -> HarnessResult<Run> {
        let args = if with_trials {
            json!({ "trials": self.trials, "params": args })
        } else {
            json!({ "params": args })
        };
        Run::create(&self.out, command, args, self.config.as_ref(), self.seed)
    }
}

fn grid_options(g: &GridArgs) -> HarnessResult<GridOptions> {
    if !(g.spacing > 0.0) {
        return Err(HarnessError::User(format!("--spacing {} must be positive", g.spacing)));
    }
    let mut opts = GridOptions::new(g.spacing);
    if g.fourth_order {
        opts.stencil = Stencil::Fourth;
    }
    Ok(opts)
}

fn f(v: f64) -> String {
    format!("{v:.12e}")
}

fn est_row(e: &Estimate) -> [String; 3] {
    [f(e.value), f(e.lo), f(e.hi)]
}

/// Parameters of a record: the diagnostic's parameter struct without the
/// seed and trial count, which the record carries separately.
fn record_params<T: serde::Serialize>(params: &T, extra: Value) -> Value {
    let mut v = serde_json::to_value(params).expect("parameters serialize");
    if let Value::Object(m) = &mut v {
        m.remove("seed");
        m.remove("trials");
        if let Value::Object(e) = extra {
            m.extend(e);
        }
    }
    v
}

fn record(
    run: &Run,
    kind: &str,
    seed: u64,
    est: &Estimate,
    failures: usize,
    params: Value,
    artifact: &str,
) -> DiagnosticRecord {
    let mut r = DiagnosticRecord::new(kind, run.config_hash(), seed, est, failures, params);
    r.artifacts = Some(artifact.to_string());
    r
}

fn finish(run: Run, summary: String, status: i32) -> HarnessResult<Outcome> {
    let dir = run.finish()?;
    Ok(Outcome { dir, summary, status })
}

pub fn validate(ctx: &Context, resolution: usize) -> HarnessResult<Outcome> {
    let config = ctx.config()?;
    let mut run = ctx.open("validate", json!({ "resolution": resolution }), false)?;
    let report = validate_model(config, resolution)?;
    let rows: Vec<Vec<String>> = report
        .checks
        .iter()
        .map(|c| {
            let (wx, wy) = c.witness.map_or((String::new(), String::new()), |p| (f(p[0]), f(p[1])));
            vec![
                c.name.to_string(),
                c.passed.to_string(),
                f(c.value),
                f(c.bound),
                wx,
                wy,
                c.detail.clone(),
            ]
        })
        .collect();
    run.write_csv(
        "checks.csv",
        &["check", "passed", "value", "bound", "witness_x", "witness_y", "detail"],
        &rows,
    )?;
    run.write_json("validation.json", &report)?;
    let passed = report.checks.iter().filter(|c| c.passed).count();
    let mut summary = format!("validate: {passed}/{} checks passed", report.checks.len());
    let failed: Vec<&str> = report.failures().map(|c| c.name).collect();
    if !failed.is_empty() {
        summary.push_str(&format!(" (failed: {})", failed.join(", ")));
    }
    let status = if report.all_passed() { 0 } else { 1 };
    finish(run, summary, status)
}

pub fn edges(ctx: &Context, a: &EdgesArgs) -> HarnessResult<Outcome> {
    let config = ctx.config()?;
    let mut run = ctx.open("edges", serde_json::to_value(a)?, false)?;
    let n = a.n;
    let this = band_edges(config, n, a.resolution)?;
    let next = band_edges(config, n + 1, a.resolution)?;
    let forbidden = ensemble_forbidden_interval(config, n, a.c_ext, a.resolution)?;
    let bands = sigma_band_report(config, n + 1, a.c_int, a.resolution)?;
    let window = match a.epsilon {
        Some(eps) => Some(localization_window(config, n, eps, a.resolution)?),
        None => None,
    };
    let rows: Vec<Vec<String>> = bands
        .bands
        .iter()
        .map(|b| {
            vec![
                b.n.to_string(),
                f(b.e_minus),
                f(b.e_plus),
                f(b.lower),
                f(b.upper),
                f(b.gap_above),
            ]
        })
        .collect();
    run.write_csv(
        "bands.csv",
        &["n", "e_minus", "e_plus", "lower", "upper", "gap_above"],
        &rows,
    )?;
    run.write_json(
        "edges.json",
        &json!({
            "edges": [this, next],
            "forbidden": forbidden,
            "bands": bands,
            "localization_window": window,
        }),
    )?;
    let mut summary = format!("edges n={n}: ({}, {})", this.e_minus, this.e_plus);
    if forbidden.empty {
        summary.push_str("; forbidden interval empty");
    } else {
        summary.push_str(&format!("; forbidden ({:.6}, {:.6})", forbidden.lower, forbidden.upper));
    }
    finish(run, summary, 0)
}

pub fn sample(ctx: &Context, a: &SampleArgs) -> HarnessResult<Outcome> {
    let config = ctx.config()?;
    let [x0, y0, x1, y1] = a.region[..] else {
        return Err(HarnessError::User("--region needs four numbers".into()));
    };
    if !(x1 > x0 && y1 > y0) || a.resolution == 0 {
        return Err(HarnessError::User("empty --region or zero --resolution".into()));
    }
    let mut run = ctx.open("sample", serde_json::to_value(a)?, false)?;
    let region = Rect::new([x0, y0], [x1, y1]);
    let s = Arc::new(sample_field(config, region, ctx.seed)?);
    let records = s.records();
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| vec![r.k.to_string(), f(r.z[0]), f(r.z[1]), f(r.omega)])
        .collect();
    run.write_csv("coefficients.csv", &["k", "x", "y", "omega"], &rows)?;
    let field = SampledField::new(config, s.clone());
    let m = a.resolution;
    let mut grid = Vec::with_capacity((m + 1) * (m + 1));
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for j in 0..=m {
        for i in 0..=m {
            let p = [
                x0 + (x1 - x0) * i as f64 / m as f64,
                y0 + (y1 - y0) * j as f64 / m as f64,
            ];
            let b = field.try_value(p)?;
            lo = lo.min(b);
            hi = hi.max(b);
            grid.push(vec![f(p[0]), f(p[1]), f(b)]);
        }
    }
    run.write_csv("field.csv", &["x", "y", "B"], &grid)?;
    let summary = format!(
        "sample: {} coefficients, B in [{lo:.6}, {hi:.6}] on the grid",
        records.len()
    );
    finish(run, summary, 0)
}

pub fn spectrum(ctx: &Context, a: &SpectrumArgs) -> HarnessResult<Outcome> {
    let config = ctx.config()?;
    let grid = grid_options(&a.grid)?;
    let window = match &a.window {
        Some(w) => {
            let [lo, hi] = w[..] else {
                return Err(HarnessError::User("--window needs two numbers".into()));
            };
            if !(lo < hi) {
                return Err(HarnessError::User(format!("--window {lo},{hi} is empty")));
            }
            Some((lo, hi))
        }
        None => None,
    };
    let mut run = ctx.open("spectrum", serde_json::to_value(a)?, false)?;
    let bx = BoxSpec::new([0.0, 0.0], a.l);
    let s = sample_for_box(config, &bx, ctx.seed)?;
    let b = box_operator(config, &bx, Arc::new(s), &grid)?;
    let res = match window {
        Some((lo, hi)) => eigs_window(&b.op, lo, hi, &WindowOptions::default())?,
        None => {
            if b.op.dim() > DENSE_CAP {
                return Err(HarnessError::User(format!(
                    "{} sites exceed the dense limit {DENSE_CAP}; pass --window",
                    b.op.dim()
                )));
            }
            full_spectrum(&b.op, true)?
        }
    };
    let rows: Vec<Vec<String>> = (0..res.len())
        .map(|k| {
            let collar = res.mass_fraction(k, &b.collar).unwrap_or(f64::NAN);
            vec![k.to_string(), f(res.values[k]), f(collar), f(res.residuals[k])]
        })
        .collect();
    run.write_csv(
        "eigenvalues.csv",
        &["index", "eigenvalue", "collar_mass", "residual"],
        &rows,
    )?;
    if a.export_matrix {
        let mut buf = Vec::new();
        write_coordinate(&b.op.matrix, &mut buf)?;
        run.write_text("matrix.txt", "%", &buf)?;
    }
    let interior = b.interior_states(&res).len();
    run.write_json(
        "spectrum.json",
        &json!({
            "sites": b.op.dim(),
            "count": res.len(),
            "interior": interior,
            "method": res.method,
            "max_residual": res.max_residual(),
        }),
    )?;
    let summary = format!(
        "spectrum: {} eigenvalues ({interior} interior) of a {}-site box, method {}",
        res.len(),
        b.op.dim(),
        res.method
    );
    finish(run, summary, 0)
}

pub fn wegner(ctx: &Context, a: &WegnerArgs) -> HarnessResult<Outcome> {
    let config = ctx.config()?;
    let params = WegnerParams {
        energy: a.energy,
        etas: a.eta.clone(),
        l: a.l,
        trials: ctx.trials,
        seed: ctx.seed,
        grid: grid_options(&a.grid)?,
    };
    let mut run = ctx.open("wegner", serde_json::to_value(a)?, true)?;
    let res = wegner_mc(config, &params)?;
    let mut header = vec!["trial".to_string()];
    header.extend(a.eta.iter().map(|e| format!("count_eta_{e}")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows: Vec<Vec<String>> = res
        .trial_index
        .iter()
        .zip(&res.counts)
        .map(|(t, c)| {
            let mut r = vec![t.to_string()];
            r.extend(c.iter().map(usize::to_string));
            r
        })
        .collect();
    run.write_csv("trials.csv", &header, &rows)?;
    let mut records = Vec::new();
    for (i, (eta, est)) in a.eta.iter().zip(&res.estimates).enumerate() {
        records.push(record(
            &run,
            "wegner",
            ctx.seed,
            est,
            res.failures,
            record_params(&params, json!({ "etas": null, "eta": eta, "index": i })),
            "trials.csv",
        ));
    }
    let mut ratios = Vec::new();
    for i in 1..a.eta.len() {
        let r = res.ratio(i - 1, i);
        records.push(record(
            &run,
            "wegner-ratio",
            ctx.seed,
            &r,
            res.failures,
            record_params(&params, json!({ "etas": null, "eta_pair": [a.eta[i - 1], a.eta[i]] })),
            "trials.csv",
        ));
        ratios.push(r);
    }
    run.write_json(RECORDS, &records)?;
    let pts: Vec<(f64, f64)> = a.eta.iter().zip(&res.estimates).map(|(&e, s)| (e, s.value)).collect();
    let band = res.estimates.iter().map(|s| (s.lo, s.hi)).collect();
    let plot = Plot::new(format!("Expected count near E = {}", a.energy), "eta", "E[count]")
        .add(Series::new("estimate", pts).with_band(band));
    run.write_svg("wegner.svg", &plot)?;
    let parts: Vec<String> = a
        .eta
        .iter()
        .zip(&res.estimates)
        .map(|(e, s)| format!("eta={e}: {:.4} [{:.4}, {:.4}]", s.value, s.lo, s.hi))
        .collect();
    let mut summary = format!("wegner: {}", parts.join("; "));
    for (i, r) in ratios.iter().enumerate() {
        summary.push_str(&format!(
            "; ratio {}/{}: {:.3} [{:.3}, {:.3}]",
            a.eta[i],
            a.eta[i + 1],
            r.value,
            r.lo,
            r.hi
        ));
    }
    if res.failures > 0 {
        summary.push_str(&format!("; {} failed trials", res.failures));
    }
    finish(run, summary, 0)
}

pub fn goodbox(ctx: &Context, a: &GoodBoxArgs) -> HarnessResult<Outcome> {
    let config = ctx.config()?;
    let params = GoodBoxParams {
        energy: a.energy,
        gammas: a.gamma.clone(),
        l: a.l,
        trials: ctx.trials,
        seed: ctx.seed,
        grid: grid_options(&a.grid)?,
    };
    let mut run = ctx.open("goodbox", serde_json::to_value(a)?, true)?;
    let res = good_box_mc(config, &params)?;
    let rows: Vec<Vec<String>> = res
        .norms
        .iter()
        .enumerate()
        .map(|(i, v)| vec![i.to_string(), f(*v)])
        .collect();
    run.write_csv("norms.csv", &["trial", "block_norm"], &rows)?;
    let records: Vec<DiagnosticRecord> = a
        .gamma
        .iter()
        .zip(&res.estimates)
        .map(|(g, est)| {
            record(
                &run,
                "goodbox",
                ctx.seed,
                est,
                res.failures,
                record_params(&params, json!({ "gammas": null, "gamma": g })),
                "norms.csv",
            )
        })
        .collect();
    run.write_json(RECORDS, &records)?;
    let pts: Vec<(f64, f64)> = a.gamma.iter().zip(&res.estimates).map(|(&g, s)| (g, s.value)).collect();
    let band = res.estimates.iter().map(|s| (s.lo, s.hi)).collect();
    let plot = Plot::new(format!("Good-box probability at E = {}", a.energy), "gamma", "P(good)")
        .add(Series::new("estimate", pts).with_band(band));
    run.write_svg("goodbox.svg", &plot)?;
    let parts: Vec<String> = a
        .gamma
        .iter()
        .zip(&res.estimates)
        .map(|(g, s)| format!("gamma={g}: {:.3} [{:.3}, {:.3}]", s.value, s.lo, s.hi))
        .collect();
    finish(run, format!("goodbox: {}", parts.join("; ")), 0)
}

pub fn balanced(ctx: &Context, a: &BalancedArgs) -> HarnessResult<Outcome> {
    let config = ctx.config()?;
    let params = BalancedParams {
        energy: a.energy,
        l: a.l,
        proxy_factor: a.proxy_factor,
        c_inf: a.c_inf,
        alpha: a.alpha,
        trials: ctx.trials,
        seed: ctx.seed,
        grid: grid_options(&a.grid)?,
    };
    let mut run = ctx.open("balanced", serde_json::to_value(a)?, true)?;
    let res = balanced_mc(config, &params)?;
    let rows: Vec<Vec<String>> = res
        .trials
        .iter()
        .enumerate()
        .map(|(i, t)| {
            vec![
                i.to_string(),
                f(t.box_norm),
                f(t.proxy_norm),
                t.balanced.to_string(),
                t.other_balanced.to_string(),
            ]
        })
        .collect();
    run.write_csv(
        "trials.csv",
        &["trial", "box_norm", "proxy_norm", "balanced", "other_balanced"],
        &rows,
    )?;
    let p = record_params(&params, json!({ "separation": res.separation }));
    let records = vec![
        record(
            &run,
            "balanced",
            ctx.seed,
            &res.single,
            res.failures,
            p.clone(),
            "trials.csv",
        ),
        record(
            &run,
            "balanced-either",
            ctx.seed,
            &res.either,
            res.failures,
            p,
            "trials.csv",
        ),
    ];
    run.write_json(RECORDS, &records)?;
    let summary = format!(
        "balanced: P = {:.3} [{:.3}, {:.3}], either of two = {:.3}, correlation {:.3}",
        res.single.value, res.single.lo, res.single.hi, res.either.value, res.correlation
    );
    finish(run, summary, 0)
}

pub fn lifshitz(ctx: &Context, a: &LifshitzArgs) -> HarnessResult<Outcome> {
    let config = ctx.config()?;
    let params = LifshitzParams {
        n: a.n,
        hs: a.tail.clone(),
        l: a.l,
        proxy_factor: a.proxy_factor,
        c_ext: a.c_ext,
        trials: ctx.trials,
        seed: ctx.seed,
        grid: grid_options(&a.grid)?,
        resolution: a.resolution,
    };
    let mut run = ctx.open("lifshitz", serde_json::to_value(a)?, true)?;
    let res = lifshitz_tail_mc(config, &params)?;
    let rows: Vec<Vec<String>> = res
        .points
        .iter()
        .map(|p| {
            let [v, lo, hi] = est_row(&p.estimate);
            vec![
                f(p.h),
                f(p.window.0),
                f(p.window.1),
                f(p.nu_plus),
                f(p.nu_minus),
                f(p.bound),
                v,
                lo,
                hi,
                p.dominates().to_string(),
            ]
        })
        .collect();
    run.write_csv(
        "lifshitz.csv",
        &[
            "h",
            "window_lo",
            "window_hi",
            "nu_plus",
            "nu_minus",
            "bound",
            "estimate",
            "ci_lo",
            "ci_hi",
            "dominates",
        ],
        &rows,
    )?;
    let trial_rows: Vec<Vec<String>> = res
        .intruders
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let list: Vec<String> = v.iter().map(|x| f(*x)).collect();
            vec![i.to_string(), v.len().to_string(), list.join(" ")]
        })
        .collect();
    run.write_csv(
        "trials.csv",
        &["trial", "states_in_interval", "eigenvalues"],
        &trial_rows,
    )?;
    let records: Vec<DiagnosticRecord> = res
        .points
        .iter()
        .map(|p| {
            record(
                &run,
                "lifshitz",
                ctx.seed,
                &p.estimate,
                res.failures,
                record_params(&params, json!({ "hs": null, "h": p.h, "bound": p.bound })),
                "trials.csv",
            )
        })
        .collect();
    run.write_json(RECORDS, &records)?;
    run.write_json("lifshitz.json", &res)?;
    let pts: Vec<(f64, f64)> = res.points.iter().map(|p| (p.h, p.estimate.value)).collect();
    let band = res.points.iter().map(|p| (p.estimate.lo, p.estimate.hi)).collect();
    let bound: Vec<(f64, f64)> = res.points.iter().map(|p| (p.h, p.bound)).collect();
    let plot = Plot::new("No-intrusion probability", "h", "probability")
        .add(Series::new("estimate", pts).with_band(band))
        .add(Series::new("bound", bound));
    run.write_svg("lifshitz.svg", &plot)?;
    let dominated = res.points.iter().filter(|p| p.dominates()).count();
    let mut summary = format!(
        "lifshitz: estimate dominates bound at {dominated}/{} tail widths",
        res.points.len()
    );
    if res.interval.empty {
        summary.push_str("; forbidden interval empty");
    } else {
        summary.push_str(&format!(
            "; interval ({:.4}, {:.4})",
            res.interval.lower, res.interval.upper
        ));
    }
    finish(run, summary, 0)
}

/// Largest eigenvalue in `[a, b)`, or smallest when `top` is false.
fn extreme_in(op: &DiscreteHamiltonian, a: f64, b: f64, top: bool) -> HarnessResult<f64> {
    let res = eigs_window(
        op,
        a,
        b,
        &WindowOptions {
            vectors: false,
            ..Default::default()
        },
    )?;
    let v = if top {
        res.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    } else {
        res.values.iter().cloned().fold(f64::INFINITY, f64::min)
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(HarnessError::User(format!("no eigenvalues in [{a}, {b})")))
    }
}

pub fn decay(ctx: &Context, a: &DecayArgs) -> HarnessResult<Outcome> {
    let config = ctx.config()?;
    if !(a.side > 0.0 && a.spacing > 0.0 && a.half > 0.0) {
        return Err(HarnessError::User(
            "--side, --spacing and --half must be positive".into(),
        ));
    }
    if a.distances.len() < 2 || a.fractions.iter().any(|&x| !(x > 0.0 && x < 1.0)) {
        return Err(HarnessError::User(
            "need two or more distances and fractions strictly inside (0, 1)".into(),
        ));
    }
    let mut run = ctx.open("decay", serde_json::to_value(a)?, false)?;
    let b0 = TorusSpec::quantized_field(config.model.field_strength, a.side);
    let spec = TorusSpec {
        b0,
        side: a.side,
        m: (a.side / a.spacing).round() as usize,
    };
    let op = torus_landau(&spec, &config.fields.b_var, &config.potential())?;
    let n = a.n as f64;
    let r = extreme_in(&op, 2.0 * n * b0, (2.0 * n + 2.0) * b0, true)?;
    let s = extreme_in(&op, (2.0 * n + 2.0) * b0, (2.0 * n + 4.0) * b0, false)?;
    let dmax = a.distances.iter().cloned().fold(0.0, f64::max);
    let source = [a.side / 2.0 - (dmax + 2.0 * a.half) / 2.0, a.side / 2.0];
    let mut rows = Vec::new();
    let mut records = Vec::new();
    let mut plot = Plot::new(
        format!("Resolvent decay in the gap ({r:.4}, {s:.4})"),
        "distance",
        "block norm",
    )
    .log_y();
    let mut fits = Vec::new();
    for &frac in &a.fractions {
        let e = r + frac * (s - r);
        let fit = combes_thomas_fit(&op, e, (r, s), source, a.half, &a.distances)?;
        for (d, v) in fit.distances.iter().zip(&fit.norms) {
            rows.push(vec![f(frac), f(e), f(fit.eta), f(*d), f(*v)]);
        }
        let se = fit.fit.slope_se;
        let est = Estimate {
            value: fit.rate,
            lo: fit.rate - 1.96 * se,
            hi: fit.rate + 1.96 * se,
            method: CiMethod::Normal,
            n: fit.distances.len(),
        };
        records.push(record(
            &run,
            "decay-rate",
            ctx.seed,
            &est,
            0,
            json!({
                "torus": spec,
                "n": a.n,
                "fraction": frac,
                "energy": e,
                "eta": fit.eta,
                "r2": fit.fit.r2,
                "half": a.half,
            }),
            "norms.csv",
        ));
        plot = plot.add(Series::new(
            format!("eta = {:.3}", fit.eta),
            fit.distances.iter().cloned().zip(fit.norms.iter().cloned()).collect(),
        ));
        fits.push(fit);
    }
    run.write_csv("norms.csv", &["fraction", "energy", "eta", "distance", "norm"], &rows)?;
    run.write_json(RECORDS, &records)?;
    run.write_json("decay.json", &json!({ "torus": spec, "gap": [r, s], "fits": fits }))?;
    run.write_svg("decay.svg", &plot)?;
    let parts: Vec<String> = fits
        .iter()
        .map(|d| format!("eta={:.3}: rate {:.3} (R² {:.3})", d.eta, d.rate, d.fit.r2))
        .collect();
    finish(run, format!("decay: gap ({r:.4}, {s:.4}); {}", parts.join("; ")), 0)
}

pub fn trial(ctx: &Context, a: &TrialArgs) -> HarnessResult<Outcome> {
    let config = ctx.config()?;
    if a.b0_list.iter().any(|&b| !(b > 0.0)) {
        return Err(HarnessError::User("--b0-list entries must be positive".into()));
    }
    let [cx, cy] = a.center[..] else {
        return Err(HarnessError::User("--center needs two numbers".into()));
    };
    let mut run = ctx.open("trial", serde_json::to_value(a)?, false)?;
    let scan = trial_residual_scan(config, a.n, &a.b0_list, [cx, cy])?;
    let rows: Vec<Vec<String>> = scan
        .points
        .iter()
        .map(|p| vec![f(p.b0), f(p.residual), f(p.quadrature_error), p.usable.to_string()])
        .collect();
    run.write_csv(
        "residuals.csv",
        &["B0", "residual", "quadrature_error", "usable"],
        &rows,
    )?;
    let mut records = Vec::new();
    if let Some(fit) = &scan.fit {
        let est = Estimate {
            value: fit.slope,
            lo: fit.slope - 1.96 * fit.slope_se,
            hi: fit.slope + 1.96 * fit.slope_se,
            method: CiMethod::Normal,
            n: scan.points.iter().filter(|p| p.usable).count(),
        };
        records.push(record(
            &run,
            "trial-slope",
            ctx.seed,
            &est,
            0,
            json!({ "n": a.n, "b0_list": a.b0_list, "center": a.center, "r2": fit.r2 }),
            "residuals.csv",
        ));
    }
    run.write_json(RECORDS, &records)?;
    let pts: Vec<(f64, f64)> = scan.points.iter().map(|p| (p.b0, p.residual)).collect();
    let plot = Plot::new(format!("Trial-state residual, n = {}", a.n), "B0", "residual")
        .log_log()
        .add(Series::new("residual", pts));
    run.write_svg("trial.svg", &plot)?;
    let summary = match &scan.fit {
        Some(fit) => format!(
            "trial n={}: log-log slope {:.3} ± {:.3} (R² {:.3})",
            a.n, fit.slope, fit.slope_se, fit.r2
        ),
        None => format!("trial n={}: too few usable points for a fit", a.n),
    };
    finish(run, summary, 0)
}

pub fn kernel_audit(ctx: &Context, a: &KernelAuditArgs) -> HarnessResult<Outcome> {
    let b0 = match (a.b0, &ctx.config) {
        (Some(b), _) => b,
        (None, Some(c)) => c.model.field_strength,
        (None, None) => return Err(HarnessError::User("kernel-audit needs --b0 or --config".into())),
    };
    let [zlo, zhi, zn] = a.zeta[..] else {
        return Err(HarnessError::User("--zeta needs lo,hi,count".into()));
    };
    let [n_re, n_im] = a.z_grid[..] else {
        return Err(HarnessError::User("--z-grid needs two counts".into()));
    };
    if !(zlo > 0.0 && zhi > zlo && zn >= 2.0) || n_re == 0 || n_im == 0 {
        return Err(HarnessError::User("invalid --zeta or --z-grid".into()));
    }
    let mut run = ctx.open("kernel-audit", json!({ "b0": b0, "args": a }), false)?;
    let z = window_grid(b0, a.n, n_re, n_im, 0.05);
    let zeta = log_grid(zlo, zhi, zn as usize);
    let report = kernel_bound_audit(b0, a.n, &z, &zeta)?;
    let rows: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| vec![f(r.re_z), f(r.im_z), f(r.zeta), f(r.kernel_abs), f(r.bound_ratio)])
        .collect();
    run.write_csv(
        "audit.csv",
        &["re_z", "im_z", "zeta", "kernel_abs", "bound_ratio"],
        &rows,
    )?;
    run.write_json(
        "audit.json",
        &json!({ "b0": report.b0, "n": report.n, "c_gamma": report.c_gamma, "c_u": report.c_u }),
    )?;
    let summary = format!(
        "kernel-audit B0={b0} n={}: C_Gamma = {:.4}, C_U = {:.4} over {} points",
        a.n,
        report.c_gamma,
        report.c_u,
        report.rows.len()
    );
    finish(run, summary, 0)
}

pub fn ids(ctx: &Context, a: &IdsArgs) -> HarnessResult<Outcome> {
    let config = ctx.config()?;
    let [lo, hi, count] = a.energies[..] else {
        return Err(HarnessError::User("--energies needs lo,hi,count".into()));
    };
    if !(hi > lo) || count < 1.0 {
        return Err(HarnessError::User("invalid --energies".into()));
    }
    let count = count as usize;
    let energies: Vec<f64> = (0..count)
        .map(|i| {
            if count == 1 {
                lo
            } else {
                lo + (hi - lo) * i as f64 / (count - 1) as f64
            }
        })
        .collect();
    let params = IdsParams {
        l: a.l,
        energies: energies.clone(),
        trials: ctx.trials,
        seed: ctx.seed,
        grid: grid_options(&a.grid)?,
    };
    let mut run = ctx.open("ids", serde_json::to_value(a)?, true)?;
    let res = ids_histogram(config, &params)?;
    let rows: Vec<Vec<String>> = energies
        .iter()
        .zip(&res.values)
        .map(|(e, v)| {
            let [m, l, h] = est_row(v);
            vec![f(*e), m, l, h]
        })
        .collect();
    run.write_csv("ids.csv", &["energy", "ids", "ci_lo", "ci_hi"], &rows)?;
    let pts: Vec<(f64, f64)> = energies
        .iter()
        .cloned()
        .zip(res.values.iter().map(|v| v.value))
        .collect();
    let band = res.values.iter().map(|v| (v.lo, v.hi)).collect();
    let plot = Plot::new("Integrated density of states", "E", "N(E)").add(Series::new("ids", pts).with_band(band));
    run.write_svg("ids.svg", &plot)?;
    let last = res.values.last().map_or(f64::NAN, |v| v.value);
    finish(
        run,
        format!("ids: {count} energies, N({hi}) = {last:.4} per unit area"),
        0,
    )
}
