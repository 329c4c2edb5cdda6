//! Named configurations, one per figure panel.

use std::f64::consts::PI;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;

#[derive(Clone, Debug, Serialize)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub config: Value,
}

const T1: f64 = 0.5;
const T_P: f64 = 0.5;
const GAMMA: f64 = 0.5;
const CELLS: usize = 200;
const X0: usize = 150;
/// Seed of the random `γ_x ∈ [0.4, 0.6)` profiles.
const RANDOM_SEED: u64 = 8;

fn ladder(cells: usize, hoppings: &[f64], phi: f64, loss: Value, boundary: &str) -> Value {
    json!({ "ladder": {
        "cells": cells,
        "hoppings": hoppings,
        "t_p": T_P,
        "phi": phi,
        "loss": loss,
        "boundary": boundary,
    }})
}

fn uniform() -> Value {
    json!({ "uniform": GAMMA })
}

fn linear() -> Value {
    json!({ "linear": { "slope": 0.01, "offset": 0.20 } })
}

fn random() -> Value {
    json!({ "random": { "low": 0.4, "high": 0.6, "seed": RANDOM_SEED } })
}

fn points(path: &str, values: &[f64]) -> Vec<Value> {
    values.iter().map(|v| json!({ path: v })).collect()
}

fn t0_points(values: &[f64]) -> Vec<Value> {
    points("model.ladder.hoppings.0", values)
}

fn sweep(command: &str, points: Vec<Value>, plot: &[&str]) -> Value {
    json!({ "command": command, "points": points, "plot": plot, "log_y": !plot.is_empty() })
}

pub fn all() -> Vec<Preset> {
    let half_pi = PI / 2.0;
    let nn = |t0: f64| vec![t0, T1];
    let nnn = |t0: f64, t2: f64| vec![t0, T1, t2];
    let mut out = vec![
        Preset {
            name: "fig3a",
            description: "OBC and PBC spectra, t0 = 0.3",
            config: json!({
                "command": "spectrum",
                "model": ladder(CELLS, &nn(0.3), half_pi, uniform(), "obc"),
                "boundaries": ["obc", "pbc"],
            }),
        },
        Preset {
            name: "fig3b",
            description: "bulk P_x / P_130 on log-log axes, t0 = 0.3",
            config: json!({
                "command": "walk",
                "model": ladder(CELLS, &nn(0.3), half_pi, uniform(), "obc"),
                "x0": X0,
                "reference_cell": 130,
            }),
        },
    ];
    for (name, t0, description) in [
        ("fig3c", 0.3, "loss profile and edge burst, t0 = 0.3"),
        ("fig3d", 0.6, "loss profile without IGC points, t0 = 0.6"),
    ] {
        out.push(Preset {
            name,
            description,
            config: json!({
                "command": "burst",
                "model": ladder(CELLS, &nn(t0), half_pi, uniform(), "obc"),
                "x0": X0,
            }),
        });
    }
    for (name, t0, description) in [
        ("fig3e", 0.3, "relative edge height against x0, t0 = 0.3"),
        ("fig3f", 0.6, "edge loss probability against x0, t0 = 0.6"),
    ] {
        out.push(Preset {
            name,
            description,
            config: json!({
                "command": "burst",
                "model": ladder(CELLS, &nn(t0), half_pi, uniform(), "obc"),
                "x0_list": (40..=160).step_by(20).collect::<Vec<_>>(),
            }),
        });
    }
    let fig4_t0 = [0.3, 0.4, 0.5];
    for (name, boundary, description) in [
        ("fig4a", "pbc", "PBC spectra with t2 = 0.1, t0 in {0.3, 0.4, 0.5}"),
        ("fig4b", "obc", "OBC spectra with t2 = 0.1, t0 in {0.3, 0.4, 0.5}"),
    ] {
        out.push(Preset {
            name,
            description,
            config: json!({
                "command": "sweep",
                "model": ladder(CELLS, &nnn(0.3, 0.1), half_pi, uniform(), boundary),
                "sweep": sweep("spectrum", t0_points(&fig4_t0), &[]),
            }),
        });
    }
    for (name, description) in [
        ("fig4c", "bulk profiles with t2 = 0.1 (log-log view)"),
        ("fig4d", "bulk profiles with t2 = 0.1 (log-linear view)"),
    ] {
        out.push(Preset {
            name,
            description,
            config: json!({
                "command": "sweep",
                "model": ladder(CELLS, &nnn(0.3, 0.1), half_pi, uniform(), "obc"),
                "x0": X0,
                "sweep": sweep("walk", t0_points(&fig4_t0), &[]),
            }),
        });
    }
    let t2: Vec<f64> = (0..=10).map(|i| 0.05 * i as f64).collect();
    out.push(Preset {
        name: "fig5a",
        description: "relative edge heights at both edges against t2",
        config: json!({
            "command": "sweep",
            "model": ladder(CELLS, &nnn(0.3, 0.0), half_pi, uniform(), "obc"),
            "x0": X0,
            "sweep": sweep("burst", points("model.ladder.hoppings.2", &t2), &["ratio_left", "ratio_right"]),
        }),
    });
    out.push(Preset {
        name: "fig5b",
        description: "PBC spectra at L = 500 for t2 in {0.25, 0.33, 0.50}, with self-intersections",
        config: json!({
            "command": "sweep",
            "model": ladder(500, &nnn(0.3, 0.25), half_pi, uniform(), "pbc"),
            "sweep": sweep("spectrum", points("model.ladder.hoppings.2", &[0.25, 0.33, 0.50]), &[]),
        }),
    });
    for (name, t2, description) in [
        ("fig5c", 0.2, "single left edge burst, t2 = 0.2"),
        ("fig5d", 0.5, "bipolar edge burst, t2 = 0.5"),
    ] {
        out.push(Preset {
            name,
            description,
            config: json!({
                "command": "burst",
                "model": ladder(CELLS, &nnn(0.3, t2), half_pi, uniform(), "obc"),
                "x0": X0,
            }),
        });
    }
    out.push(Preset {
        name: "fig6a",
        description: "PBC spectra for Peierls phases 0, π/6, π/3, π/2",
        config: json!({
            "command": "sweep",
            "model": ladder(CELLS, &nn(0.3), 0.0, uniform(), "pbc"),
            "sweep": sweep("spectrum", points("model.ladder.phi", &[0.0, PI / 6.0, PI / 3.0, half_pi]), &[]),
        }),
    });
    let phis: Vec<f64> = (0..=12).map(|i| half_pi * i as f64 / 12.0).collect();
    out.push(Preset {
        name: "fig6b",
        description: "relative edge heights against the Peierls phase",
        config: json!({
            "command": "sweep",
            "model": ladder(CELLS, &nn(0.3), 0.0, uniform(), "obc"),
            "x0": X0,
            "sweep": sweep("burst", points("model.ladder.phi", &phis), &["ratio_left", "ratio_right"]),
        }),
    });
    let fig7_t0 = [0.3, 0.5, 0.6];
    out.push(Preset {
        name: "fig7a",
        description: "PBC spectra with γ_x = 0.01x + 0.20, t0 in {0.3, 0.5, 0.6}",
        config: json!({
            "command": "sweep",
            "model": ladder(CELLS, &nn(0.3), half_pi, linear(), "pbc"),
            "sweep": sweep("spectrum", t0_points(&fig7_t0), &[]),
        }),
    });
    out.push(Preset {
        name: "fig7b",
        description: "loss profile with γ_x = 0.01x + 0.20, t0 = 0.3",
        config: json!({
            "command": "burst",
            "model": ladder(CELLS, &nn(0.3), half_pi, linear(), "obc"),
            "x0": X0,
        }),
    });
    for (name, description) in [
        ("fig7c", "bulk profiles with γ_x = 0.01x + 0.20 (log-log view)"),
        ("fig7d", "bulk profiles with γ_x = 0.01x + 0.20 (log-linear view)"),
    ] {
        out.push(Preset {
            name,
            description,
            config: json!({
                "command": "sweep",
                "model": ladder(CELLS, &nn(0.3), half_pi, linear(), "obc"),
                "x0": X0,
                "sweep": sweep("walk", t0_points(&fig7_t0), &[]),
            }),
        });
    }
    out.push(Preset {
        name: "fig8b",
        description: "damping-matrix spectra, OBC and PBC, t0 in {0.3, 0.6}, random γ_x in [0.4, 0.6)",
        config: json!({
            "command": "sweep",
            "model": ladder(CELLS, &nn(0.3), half_pi, random(), "pbc"),
            "boundaries": ["obc", "pbc"],
            "sweep": sweep("liouville", t0_points(&[0.3, 0.6]), &[]),
        }),
    });
    out.push(Preset {
        name: "fig8c",
        description: "steady-state density on B sites against the loss probability, random γ_x",
        config: json!({
            "command": "liouville",
            "model": ladder(CELLS, &nn(0.3), half_pi, random(), "obc"),
            "x0": X0,
        }),
    });
    for p in &mut out {
        p.config["figure"] = Value::from(p.name);
    }
    out
}

pub fn find(name: &str) -> Result<Preset, CliError> {
    all().into_iter().find(|p| p.name == name).ok_or_else(|| {
        let names: Vec<&str> = all().iter().map(|p| p.name).collect();
        CliError::Schema(format!("unknown figure `{name}`; presets: {}", names.join(", ")))
    })
}
