use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{burst_metrics, AnalysisError, LineFit};
use crate::igc::{classify, IgcClass};
use crate::model::LadderParams;
use crate::walk::{loss_profile_resolvent, loss_profile_time, Engine, QuadratureOptions, WalkConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub x0: usize,
    pub ratio_left: f64,
    pub p_edge_left: f64,
    pub p_min_left: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrendKind {
    /// `log(P_edge/P_min)` against `log x0`.
    LogRatioLogX0,
    /// `log P_edge` against `x0`.
    LogEdgeX0,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trend {
    pub kind: TrendKind,
    pub fit: LineFit,
}

#[derive(Clone, Debug)]
pub struct ScanTable {
    pub class: IgcClass,
    /// Ascending in `x0`, one per successful walk.
    pub rows: Vec<ScanRow>,
    pub failures: Vec<(usize, AnalysisError)>,
    /// Needs at least two rows.
    pub trend: Option<Trend>,
}

/// Left-edge burst metrics for each starting cell. IGC ladders get a log-log
/// fit of the relative height against `x0`; gapped ones a log-linear fit of
/// `P_edge` against `x0`.
pub fn scan_x0(
    params: &LadderParams,
    x0_list: &[usize],
    engine: Engine,
    walk: impl Fn(&mut WalkConfig) + Sync,
) -> ScanTable {
    let class = classify(params);
    let mut x0s = x0_list.to_vec();
    x0s.sort_unstable();
    x0s.dedup();
    let results: Vec<(usize, Result<ScanRow, AnalysisError>)> = x0s
        .par_iter()
        .map(|&x0| {
            let mut cfg = WalkConfig::new(params.clone(), x0);
            walk(&mut cfg);
            let row = (|| {
                let profile = match engine {
                    Engine::Time => loss_profile_time(&cfg)?,
                    Engine::Resolvent => loss_profile_resolvent(&cfg, &QuadratureOptions::default())?,
                };
                let m = burst_metrics(&profile, x0)?;
                match (m.ratio_left, m.p_edge_left, m.p_min_left) {
                    (Some(ratio_left), Some(p_edge_left), Some(p_min_left)) => Ok(ScanRow {
                        x0,
                        ratio_left,
                        p_edge_left,
                        p_min_left,
                    }),
                    _ => Err(AnalysisError::OutOfRange { x0, cells: params.cells }),
                }
            })();
            (x0, row)
        })
        .collect();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (x0, r) in results {
        match r {
            Ok(row) => rows.push(row),
            Err(e) => failures.push((x0, e)),
        }
    }
    let trend = (rows.len() >= 2).then(|| {
        let (kind, x, y): (_, Vec<f64>, Vec<f64>) = match class {
            IgcClass::Igc => (
                TrendKind::LogRatioLogX0,
                rows.iter().map(|r| (r.x0 as f64).ln()).collect(),
                rows.iter().map(|r| r.ratio_left.ln()).collect(),
            ),
            IgcClass::Gapped => (
                TrendKind::LogEdgeX0,
                rows.iter().map(|r| r.x0 as f64).collect(),
                rows.iter().map(|r| r.p_edge_left.ln()).collect(),
            ),
        };
        Trend {
            kind,
            fit: LineFit::new(&x, &y),
        }
    });
    ScanTable {
        class,
        rows,
        failures,
        trend,
    }
}
