use std::collections::BTreeSet;
use std::f64::consts::PI;

use igclab::analysis::{burst_metrics, fit_bulk, scan_x0, self_intersections, Side, TrendKind};
use igclab::densela::eigendecompose;
use igclab::igc::{solve_connection, IgcSolution};
use igclab::liouville::{build_damping, dark_mode_check, liouvillian_gap, propagate_correlation, steady_density};
use igclab::model::{build_bloch, build_general, build_ladder, form_factor, verify_dark_modes, Boundary, LadderParams};
use igclab::walk::{loss_profile_resolvent, loss_profile_time, relative_deviation, Engine, LossProfile, WalkConfig};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{resolve, Command, EngineChoice, ExperimentConfig, ModelSpec};
use crate::error::CliError;
use crate::output::{cell, num, opt, RunOutput, Table};
use crate::plot::{Chart, Series};

/// Relative deviations are taken over sites above this value.
const DEVIATION_FLOOR: f64 = 1e-12;
const DARK_MODE_TOL: f64 = 1e-8;

pub fn run(cfg: &ExperimentConfig, plot: bool) -> Result<RunOutput, CliError> {
    let mut out = RunOutput::default();
    match cfg.command {
        Command::Spectrum => spectrum(cfg, plot, &mut out)?,
        Command::Igc => igc(cfg, plot, &mut out)?,
        Command::Walk => {
            walk(cfg, plot, &mut out)?;
        }
        Command::Burst if cfg.x0_list.is_some() => burst_scan(cfg, plot, &mut out)?,
        Command::Burst => burst(cfg, plot, &mut out)?,
        Command::Liouville => liouville(cfg, plot, &mut out)?,
        Command::Sweep => sweep(cfg, plot, &mut out)?,
        Command::Figure => return Err(CliError::Schema("unresolved `figure` config".into())),
    }
    Ok(out)
}

fn tag(b: Boundary) -> &'static str {
    match b {
        Boundary::Open => "obc",
        Boundary::Periodic => "pbc",
    }
}

fn sorted(mut v: Vec<C64>) -> Vec<C64> {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    v
}

fn igc_summary(out: &mut RunOutput, igc: &IgcSolution) {
    out.metric("igc_class", if igc.gapped { "GAPPED" } else { "IGC" });
    out.metric("igc_points", igc.points.len());
}

fn spectrum(cfg: &ExperimentConfig, plot: bool, out: &mut RunOutput) -> Result<(), CliError> {
    let ModelSpec::Ladder(spec) = cfg.model.as_ref().expect("validated") else {
        return general_spectrum(cfg, plot, out);
    };
    let base = spec.params()?;
    let igc = solve_connection(&base.hoppings, base.intra, base.phase);
    igc_summary(out, &igc);
    let mut table = Table::new(["re", "im", "label"]);
    let mut chart = Chart::new("Spectrum", "Re E", "Im E");
    for b in cfg.boundaries()? {
        let p = base.with_boundary(b);
        let values = out.stage(&format!("eigenvalues_{}", tag(b)), || {
            let h = build_ladder(&p).map_err(|e| CliError::Schema(e.to_string()))?;
            let s = eigendecompose(h.matrix(), false).map_err(|e| CliError::numerical("eigenvalues", e))?;
            Ok((sorted(s.eigenvalues), json!({ "dim": h.dim() })))
        })?;
        for z in &values {
            table.push(vec![num(z.re), num(z.im), tag(b).into()]);
        }
        let max_im = values.iter().map(|z| z.im).fold(f64::NEG_INFINITY, f64::max);
        out.metric(&format!("max_im_{}", tag(b)), max_im);
        if b == Boundary::Periodic && !igc.points.is_empty() {
            let miss = igc
                .points
                .iter()
                .map(|pt| {
                    let e = C64::new(pt.energy, 0.0);
                    values.iter().map(|z| (z - e).norm()).fold(f64::INFINITY, f64::min)
                })
                .fold(0.0, f64::max);
            out.metric("igc_spectrum_distance", miss);
        }
        chart.series.push(Series::markers(tag(b), values.iter().map(|z| (z.re, z.im)).collect()));
    }
    out.file("spectrum.csv", table.to_bytes());

    if base.uniform_loss().is_some() {
        let mut bands = Table::new(["k", "re_1", "im_1", "re_2", "im_2"]);
        for j in 0..cfg.k_samples {
            let k = 2.0 * PI * j as f64 / cfg.k_samples as f64;
            let e = build_bloch(&base, k).map_err(|e| CliError::Schema(e.to_string()))?.eigenvalues();
            bands.push(vec![num(k), num(e[0].re), num(e[0].im), num(e[1].re), num(e[1].im)]);
        }
        out.file("bands.csv", bands.to_bytes());
        let hits = out.stage("self_intersections", || {
            let hits = self_intersections(&base, cfg.k_samples).map_err(|e| CliError::Schema(e.to_string()))?;
            let n = hits.len();
            Ok((hits, json!({ "k_samples": cfg.k_samples, "found": n })))
        })?;
        let mut t = Table::new(["k1", "k2", "re", "im"]);
        for h in &hits {
            t.push(vec![num(h.k1), num(h.k2), num(h.energy.re), num(h.energy.im)]);
        }
        out.file("intersections.csv", t.to_bytes());
        out.metric("self_intersections", hits.len());
    }
    if plot {
        if !igc.points.is_empty() {
            chart.series.push(Series::markers("IGC", igc.points.iter().map(|p| (p.energy, 0.0)).collect()));
        }
        out.file("spectrum.svg", chart.to_svg());
    }
    Ok(())
}

fn general_spectrum(cfg: &ExperimentConfig, plot: bool, out: &mut RunOutput) -> Result<(), CliError> {
    let Some(ModelSpec::General(spec)) = &cfg.model else {
        unreachable!("ladder models are handled by the caller")
    };
    let h = build_general(&spec.model()?).map_err(|e| CliError::Schema(e.to_string()))?;
    let values = out.stage("eigenvalues", || {
        let s = eigendecompose(h.matrix(), false).map_err(|e| CliError::numerical("eigenvalues", e))?;
        Ok((sorted(s.eigenvalues), json!({ "dim": h.dim() })))
    })?;
    let mut table = Table::new(["re", "im", "label"]);
    for z in &values {
        table.push(vec![num(z.re), num(z.im), "general".into()]);
    }
    out.file("spectrum.csv", table.to_bytes());
    let report = out.stage("dark_modes", || {
        let r = verify_dark_modes(&h, DARK_MODE_TOL).map_err(|e| CliError::numerical("dark_modes", e))?;
        let d = json!({ "tol": r.tol, "defective_warning": r.defective_warning });
        Ok((r, d))
    })?;
    let mut dark = Table::new(["re", "im", "dissipative_weight", "hermitian_residual", "inter_residual"]);
    for e in &report.entries {
        dark.push(vec![
            num(e.energy.re),
            num(e.energy.im),
            num(e.dissipative_weight),
            num(e.hermitian_residual),
            num(e.inter_residual),
        ]);
    }
    out.file("dark_modes.csv", dark.to_bytes());
    out.metric("dark_modes", report.entries.len());
    out.metric("dark_modes_verified", report.passed);
    if plot {
        let chart = Chart::new("Spectrum", "Re E", "Im E")
            .with(Series::markers("general", values.iter().map(|z| (z.re, z.im)).collect()));
        out.file("spectrum.svg", chart.to_svg());
    }
    Ok(())
}

fn igc(cfg: &ExperimentConfig, plot: bool, out: &mut RunOutput) -> Result<(), CliError> {
    let p = cfg.ladder()?.params()?;
    let sol = solve_connection(&p.hoppings, p.intra, p.phase);
    let mut t = Table::new(["k", "beta_re", "beta_im", "energy", "marginal"]);
    for pt in &sol.points {
        t.push(vec![
            num(pt.k),
            num(pt.beta.re),
            num(pt.beta.im),
            num(pt.energy),
            pt.marginal.to_string(),
        ]);
    }
    out.file("igc.csv", t.to_bytes());
    igc_summary(out, &sol);
    out.metric("f_min", sol.f_min);
    out.metric("k_min", sol.k_min);
    if plot {
        let curve = (0..=cfg.k_samples)
            .map(|j| {
                let k = 2.0 * PI * j as f64 / cfg.k_samples as f64;
                (k, form_factor(&p.hoppings, k))
            })
            .collect();
        let chart = Chart::new("Connection condition", "k", "F(k)")
            .with(Series::line("F", curve))
            .with(Series::markers("roots", sol.points.iter().map(|pt| (pt.k, 0.0)).collect()));
        out.file("igc.svg", chart.to_svg());
    }
    Ok(())
}

fn walk_config(cfg: &ExperimentConfig, p: &LadderParams, x0: usize) -> WalkConfig {
    let mut w = WalkConfig::new(p.clone(), x0);
    cfg.walk.apply(&mut w);
    w
}

/// Runs the selected engines, writes their profiles and returns the one
/// used for analysis (the resolvent when both ran).
fn walk(cfg: &ExperimentConfig, plot: bool, out: &mut RunOutput) -> Result<LossProfile, CliError> {
    let p = cfg.ladder()?.params()?;
    let x0 = cfg.x0()?;
    let wc = walk_config(cfg, &p, x0);
    let engines: &[Engine] = match cfg.engine {
        EngineChoice::Time => &[Engine::Time],
        EngineChoice::Resolvent => &[Engine::Resolvent],
        EngineChoice::Both => &[Engine::Time, Engine::Resolvent],
    };
    let echo = serde_json::to_value(cfg).expect("config serializes");
    let mut profiles = Vec::new();
    for &engine in engines {
        let name = engine.as_str().to_lowercase();
        let prof = out.stage(&format!("walk_{name}"), || {
            let r = match engine {
                Engine::Time => loss_profile_time(&wc),
                Engine::Resolvent => loss_profile_resolvent(&wc, &cfg.quadrature.options()),
            };
            let prof = r.map_err(|e| CliError::numerical(&format!("walk_{name}"), e))?;
            let diag = serde_json::to_value(&prof.diagnostics).expect("diagnostics serialize");
            Ok((prof, diag))
        })?;
        let header = json!({ "config": echo, "diagnostics": prof.diagnostics }).to_string();
        out.file(format!("profile_{name}.csv"), prof.to_csv(&header).into_bytes());
        out.metric(&format!("total_{name}"), prof.total);
        profiles.push(prof);
    }
    if let [time, res] = &profiles[..] {
        out.metric("engine_deviation", relative_deviation(time, res, DEVIATION_FLOOR));
    }
    let prof = profiles.pop().expect("at least one engine");

    let mut fits = Table::new([
        "side", "kind", "exponent", "r_squared", "r2_power", "r2_exp", "window_lo", "window_hi", "n_points", "excluded",
    ]);
    for side in [Side::Left, Side::Right] {
        let key = match side {
            Side::Left => "left",
            Side::Right => "right",
        };
        match fit_bulk(&prof, x0, side) {
            Ok(f) => {
                let kind = serde_json::to_value(f.kind).expect("enum serializes");
                fits.push(vec![
                    key.into(),
                    cell(&kind),
                    num(f.exponent),
                    num(f.r_squared),
                    num(f.power.r_squared),
                    num(f.exponential.r_squared),
                    f.window.0.to_string(),
                    f.window.1.to_string(),
                    f.n_points.to_string(),
                    f.excluded.to_string(),
                ]);
                out.metric(&format!("fit_{key}_kind"), kind);
                out.metric(&format!("fit_{key}_exponent"), f.exponent);
            }
            Err(e) => out.metric(&format!("fit_{key}_error"), e.to_string()),
        }
    }
    out.file("fits.csv", fits.to_bytes());

    if let Some(r) = cfg.reference_cell {
        let mut t = Table::new(["x", "P_rel"]);
        let p_ref = prof.at(r);
        for (i, v) in prof.values.iter().enumerate() {
            t.push(vec![(i + 1).to_string(), num(v / p_ref)]);
        }
        out.file("relative.csv", t.to_bytes());
    }
    if plot {
        let pts = |f: &dyn Fn(usize) -> Option<f64>| -> Vec<(f64, f64)> {
            (1..=prof.cells()).filter_map(|x| f(x).map(|d| (d, prof.at(x)))).collect()
        };
        let profile = Chart::new("Loss probability", "x", "P_x")
            .log_y()
            .with(Series::markers("P_x", pts(&|x| Some(x as f64))));
        out.file("profile.svg", profile.to_svg());
        let bulk = Chart::new("Bulk decay", "|x - x0|", "P_x")
            .log_x()
            .log_y()
            .with(Series::markers("left", pts(&|x| (x < x0).then(|| (x0 - x) as f64))))
            .with(Series::markers("right", pts(&|x| (x > x0).then(|| (x - x0) as f64))));
        out.file("bulk.svg", bulk.to_svg());
    }
    Ok(prof)
}

fn burst(cfg: &ExperimentConfig, plot: bool, out: &mut RunOutput) -> Result<(), CliError> {
    let prof = walk(cfg, plot, out)?;
    let m = burst_metrics(&prof, cfg.x0()?).map_err(|e| CliError::Schema(e.to_string()))?;
    let kind = serde_json::to_value(m.burst_type).expect("enum serializes");
    let mut t = Table::new([
        "burst_type", "p_edge_left", "p_min_left", "ratio_left", "p_edge_right", "p_min_right", "ratio_right",
    ]);
    t.push(vec![
        cell(&kind),
        opt(m.p_edge_left),
        opt(m.p_min_left),
        opt(m.ratio_left),
        opt(m.p_edge_right),
        opt(m.p_min_right),
        opt(m.ratio_right),
    ]);
    out.file("burst.csv", t.to_bytes());
    out.metric("burst_type", kind);
    out.metric("ratio_left", m.ratio_left);
    out.metric("ratio_right", m.ratio_right);
    let p = cfg.ladder()?.params()?;
    if p.uniform_loss().is_some() {
        let n = self_intersections(&p, cfg.k_samples).map_err(|e| CliError::Schema(e.to_string()))?.len();
        out.metric("self_intersections", n);
    }
    Ok(())
}

fn burst_scan(cfg: &ExperimentConfig, plot: bool, out: &mut RunOutput) -> Result<(), CliError> {
    let p = cfg.ladder()?.params()?;
    let list = cfg.x0_list.as_deref().expect("checked by the caller");
    let engine = match cfg.engine {
        EngineChoice::Time => Engine::Time,
        _ => Engine::Resolvent,
    };
    let table = out.stage("scan_x0", || {
        let t = scan_x0(&p, list, engine, |w| cfg.walk.apply(w));
        let failures: Vec<Value> = t
            .failures
            .iter()
            .map(|(x0, e)| json!({ "x0": x0, "error": e.to_string() }))
            .collect();
        Ok((t, json!({ "failures": failures })))
    })?;
    if table.rows.is_empty() {
        return Err(CliError::Numerical {
            message: "every walk of the x0 scan failed".into(),
            diagnostics: out.stages.last().map(|s| s.diagnostics.clone()).unwrap_or_default(),
        });
    }
    let mut t = Table::new(["x0", "ratio_left", "p_edge_left", "p_min_left"]);
    for r in &table.rows {
        t.push(vec![r.x0.to_string(), num(r.ratio_left), num(r.p_edge_left), num(r.p_min_left)]);
    }
    out.file("scan.csv", t.to_bytes());
    out.metric("igc_class", serde_json::to_value(table.class).expect("enum serializes"));
    out.metric("failed_walks", table.failures.len());
    if let Some(tr) = &table.trend {
        out.metric("trend", serde_json::to_value(tr.kind).expect("enum serializes"));
        out.metric("trend_slope", tr.fit.slope);
        out.metric("trend_r_squared", tr.fit.r_squared);
    }
    if plot {
        let chart = match table.trend.map(|t| t.kind) {
            Some(TrendKind::LogEdgeX0) => Chart::new("Edge loss", "x0", "P_edge")
                .log_y()
                .with(Series::markers("P_edge", table.rows.iter().map(|r| (r.x0 as f64, r.p_edge_left)).collect())),
            _ => Chart::new("Relative edge height", "x0", "P_edge / P_min").log_x().log_y().with(Series::markers(
                "P_edge/P_min",
                table.rows.iter().map(|r| (r.x0 as f64, r.ratio_left)).collect(),
            )),
        };
        out.file("scan.svg", chart.to_svg());
    }
    Ok(())
}

fn liouville(cfg: &ExperimentConfig, plot: bool, out: &mut RunOutput) -> Result<(), CliError> {
    let base = cfg.ladder()?.params()?;
    let igc = solve_connection(&base.hoppings, base.intra, base.phase);
    igc_summary(out, &igc);
    let mut spectrum = Table::new(["re", "im", "label"]);
    let mut gaps = Table::new(["boundary", "gap", "gapless", "convergence"]);
    let mut dark = Table::new(["boundary", "k", "energy", "residual"]);
    let mut chart = Chart::new("Damping-matrix spectrum", "Re λ", "Im λ");
    for b in cfg.boundaries()? {
        let p = base.with_boundary(b);
        let d = build_damping(&p).map_err(|e| CliError::numerical("damping", e))?;
        let rep = out.stage(&format!("gap_{}", tag(b)), || {
            let r = liouvillian_gap(&d).map_err(|e| CliError::numerical("gap", e))?;
            let diag = json!({ "gap": r.gap, "convergence": r.convergence });
            Ok((r, diag))
        })?;
        let label = format!("X_{}", tag(b));
        for z in sorted(rep.spectrum.clone()) {
            spectrum.push(vec![num(z.re), num(z.im), label.clone()]);
        }
        let conv = serde_json::to_value(rep.convergence).expect("enum serializes");
        gaps.push(vec![tag(b).into(), num(rep.gap), rep.gapless.to_string(), cell(&conv)]);
        out.metric(&format!("gap_{}", tag(b)), rep.gap);
        out.metric(&format!("gapless_{}", tag(b)), rep.gapless);
        if b == Boundary::Periodic {
            let res = dark_mode_check(&d, &igc);
            for (pt, r) in igc.points.iter().zip(&res) {
                dark.push(vec![tag(b).into(), num(pt.k), num(pt.energy), num(*r)]);
            }
            if let Some(worst) = res.iter().copied().reduce(f64::max) {
                out.metric("dark_mode_residual", worst);
            }
        }
        chart.series.push(Series::markers(label, rep.spectrum.iter().map(|z| (z.re, z.im)).collect()));
    }
    out.file("liouville_spectrum.csv", spectrum.to_bytes());
    out.file("gaps.csv", gaps.to_bytes());
    out.file("dark_modes.csv", dark.to_bytes());
    if plot {
        out.file("liouville_spectrum.svg", chart.to_svg());
    }

    if let Some(x0) = cfg.x0 {
        let opts = cfg.quadrature.options();
        let n = out.stage("steady_density", || {
            let n = steady_density(&base, x0, &opts).map_err(|e| CliError::numerical("steady_density", e))?;
            Ok((n, Value::Null))
        })?;
        let prof = out.stage("walk_resolvent", || {
            let w = walk_config(cfg, &base, x0);
            let prof = loss_profile_resolvent(&w, &opts).map_err(|e| CliError::numerical("walk_resolvent", e))?;
            let diag = serde_json::to_value(&prof.diagnostics).expect("diagnostics serialize");
            Ok((prof, diag))
        })?;
        let mut t = Table::new(["x", "n_B", "P_x", "rel_dev"]);
        let mut worst: f64 = 0.0;
        for (i, (a, b)) in n.iter().zip(&prof.values).enumerate() {
            let dev = if *b > DEVIATION_FLOOR { (a - b).abs() / b } else { 0.0 };
            worst = worst.max(dev);
            t.push(vec![(i + 1).to_string(), num(*a), num(*b), num(dev)]);
        }
        out.file("density.csv", t.to_bytes());
        out.metric("density_deviation", worst);
        if plot {
            let chart = Chart::new("Steady density", "|x - x0|", "n_x")
                .log_x()
                .log_y()
                .with(Series::markers(
                    "n_B",
                    n.iter().enumerate().map(|(i, v)| ((i + 1).abs_diff(x0) as f64, *v)).collect(),
                ));
            out.file("density.svg", chart.to_svg());
        }
    }

    if let Some(r) = cfg.reference {
        let d = build_damping(&base).map_err(|e| CliError::numerical("damping", e))?;
        let x0 = cfg.x0.unwrap_or(base.cells.div_ceil(2));
        let trace = out.stage("reference_propagation", || {
            let tr = propagate_correlation(&d, x0, r.dt, r.steps).map_err(|e| CliError::Schema(e.to_string()))?;
            Ok((tr, json!({ "dt": r.dt, "steps": r.steps })))
        })?;
        let mut t = Table::new(["t", "distance"]);
        for (a, b) in trace.times.iter().zip(&trace.distance) {
            t.push(vec![num(*a), num(*b)]);
        }
        out.file("correlation.csv", t.to_bytes());
        if let Some(fit) = trace.log_slope(r.fit_from) {
            out.metric("decay_slope", fit.slope);
        }
        if plot {
            let chart = Chart::new("Distance to steady state", "t", "|C(t) - C(inf)|")
                .log_y()
                .with(Series::line("reference", trace.times.iter().copied().zip(trace.distance.iter().copied()).collect()));
            out.file("correlation.svg", chart.to_svg());
        }
    }
    Ok(())
}

fn sweep(cfg: &ExperimentConfig, plot: bool, out: &mut RunOutput) -> Result<(), CliError> {
    let spec = cfg.sweep.as_ref().expect("validated");
    let mut base = serde_json::to_value(cfg).expect("config serializes");
    base["sweep"] = Value::Null;
    base["command"] = serde_json::to_value(spec.command).expect("enum serializes");
    let configs: Vec<ExperimentConfig> = spec
        .points
        .iter()
        .map(|point| {
            let overrides: Vec<(String, Value)> = point.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
            resolve(base.clone(), &overrides, None)
        })
        .collect::<Result<_, _>>()?;
    let results: Vec<Result<RunOutput, CliError>> = configs.par_iter().map(|c| run(c, plot)).collect();

    let keys: BTreeSet<&String> = spec.points.iter().flat_map(|p| p.keys()).collect();
    let mut metrics: Vec<String> = Vec::new();
    for r in results.iter().flatten() {
        for (k, _) in &r.summary {
            if !metrics.contains(k) {
                metrics.push(k.clone());
            }
        }
    }
    let header = ["point".to_string()]
        .into_iter()
        .chain(keys.iter().map(|k| k.to_string()))
        .chain(metrics.iter().cloned())
        .chain(["status".to_string()]);
    let mut table = Table::new(header);
    let mut failed = Vec::new();
    let mut series: Vec<Vec<(f64, f64)>> = vec![Vec::new(); spec.plot.len()];
    for (i, (point, result)) in spec.points.iter().zip(results).enumerate() {
        let mut row = vec![i.to_string()];
        row.extend(keys.iter().map(|k| point.get(*k).map(cell).unwrap_or_default()));
        let x = keys
            .iter()
            .next()
            .and_then(|k| point.get(*k))
            .and_then(Value::as_f64)
            .unwrap_or(i as f64);
        match result {
            Ok(r) => {
                let lookup = |m: &str| r.summary.iter().find(|(k, _)| k == m).map(|(_, v)| v.clone());
                row.extend(metrics.iter().map(|m| lookup(m).as_ref().map(cell).unwrap_or_default()));
                row.push("ok".into());
                for (s, col) in series.iter_mut().zip(&spec.plot) {
                    if let Some(y) = lookup(col).as_ref().and_then(Value::as_f64) {
                        s.push((x, y));
                    }
                }
                out.absorb(&format!("point_{i:03}"), r);
            }
            Err(e) => {
                row.extend(metrics.iter().map(|_| String::new()));
                row.push(e.to_string());
                failed.push(json!({ "point": i, "error": e.record() }));
            }
        }
        table.push(row);
    }
    out.file("summary.csv", table.to_bytes());
    out.metric("points", spec.points.len());
    out.metric("failed_points", failed.len());
    if plot && !spec.plot.is_empty() {
        let x_label = keys.iter().next().map(|k| k.to_string()).unwrap_or_else(|| "point".into());
        let mut chart = Chart::new("Sweep", x_label, spec.plot.join(", "));
        chart.log_y = spec.log_y;
        for (col, pts) in spec.plot.iter().zip(series) {
            chart.series.push(Series::line(col.clone(), pts));
        }
        out.file("summary.svg", chart.to_svg());
    }
    if !failed.is_empty() {
        out.deferred = Some(CliError::Numerical {
            message: format!("{} of {} sweep points failed", failed.len(), spec.points.len()),
            diagnostics: Value::Array(failed),
        });
    }
    Ok(())
}
