//! The four benchmark figures: Λ̃ (integral approach) and Δ̃ (differential
//! approach) in both regimes, each at the two caption thresholds.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::{Approach, CumulantMode, ExperimentConfig, PresetName};
use crate::error::HarnessError;
use crate::export::{num, write_csv, write_dat_blocks, write_text};
use crate::harness::run_case1;
use crate::report::{CoefficientName, CurveReport};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Panel {
    pub id: &'static str,
    pub figure: u8,
    pub preset: PresetName,
    pub approach: Approach,
    pub coefficient: CoefficientName,
    pub threshold: f64,
    /// `2πW` and `N` as printed in the caption.
    pub caption_two_pi_w: f64,
    pub caption_n: usize,
}

const fn panel(
    id: &'static str,
    figure: u8,
    preset: PresetName,
    approach: Approach,
    coefficient: CoefficientName,
    threshold: f64,
    caption_two_pi_w: f64,
    caption_n: usize,
) -> Panel {
    Panel {
        id,
        figure,
        preset,
        approach,
        coefficient,
        threshold,
        caption_two_pi_w,
        caption_n,
    }
}

use Approach::{Differential, Integral};
use CoefficientName::{CapitalLambda, Delta};
use PresetName::{Markovian, NonMarkovian};

pub const PANELS: [Panel; 8] = [
    panel("1a", 1, Markovian, Integral, CapitalLambda, 1e-3, 19.4, 7),
    panel("1b", 1, Markovian, Integral, CapitalLambda, 1e-4, 196.0, 74),
    panel("2a", 2, NonMarkovian, Integral, CapitalLambda, 1e-3, 0.16, 6),
    panel("2b", 2, NonMarkovian, Integral, CapitalLambda, 1e-4, 1.66, 64),
    panel("3a", 3, Markovian, Differential, Delta, 1e-3, 19.5, 7),
    panel("3b", 3, Markovian, Differential, Delta, 1e-4, 73.0, 34),
    panel("4a", 4, NonMarkovian, Differential, Delta, 1e-3, 1.32, 50),
    panel("4b", 4, NonMarkovian, Differential, Delta, 1e-4, 3.0, 114),
];

impl Panel {
    /// Noise-free Case-I configuration of this panel.
    pub fn config(&self) -> ExperimentConfig {
        ExperimentConfig {
            preset: self.preset,
            approach: self.approach,
            bw_threshold: self.threshold,
            cumulants: CumulantMode::Oracle,
            ..ExperimentConfig::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelResult {
    pub id: String,
    pub coefficient: CoefficientName,
    pub threshold: f64,
    pub two_pi_w: f64,
    pub n: usize,
    pub caption_two_pi_w: f64,
    pub caption_n: usize,
    pub rms_rel: f64,
    pub max_rel: f64,
}

#[derive(Debug, Clone)]
pub struct Replication {
    pub panels: Vec<(PanelResult, CurveReport)>,
}

pub fn run_panel(p: &Panel) -> Result<(PanelResult, CurveReport), HarnessError> {
    let out = run_case1(&p.config())?;
    let curve = out
        .report
        .curve(p.coefficient)
        .cloned()
        .expect("approach reports this coefficient");
    let errors = curve.errors.expect("Case I has a theory column");
    Ok((
        PanelResult {
            id: p.id.to_string(),
            coefficient: p.coefficient,
            threshold: p.threshold,
            two_pi_w: 2.0 * PI * curve.bandwidth_w,
            n: curve.point_count,
            caption_two_pi_w: p.caption_two_pi_w,
            caption_n: p.caption_n,
            rms_rel: errors.rms_rel,
            max_rel: errors.max_rel,
        },
        curve,
    ))
}

/// Runs all panels, one thread per panel.
pub fn replicate() -> Result<Replication, HarnessError> {
    let results: Vec<_> = std::thread::scope(|s| {
        let handles: Vec<_> = PANELS.iter().map(|p| s.spawn(move || run_panel(p))).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("panel thread panicked"))
            .collect()
    });
    Ok(Replication {
        panels: results.into_iter().collect::<Result<_, _>>()?,
    })
}

/// `fig1.dat` … `fig4.dat`, plus `replication.csv` and `replication.json`.
pub fn write_replication(rep: &Replication, dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    std::fs::create_dir_all(dir).map_err(|source| HarnessError::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let mut written = Vec::new();
    for fig in 1..=4u8 {
        let mut dat = String::new();
        for ((res, curve), p) in rep.panels.iter().zip(PANELS.iter()) {
            if p.figure == fig {
                write_dat_blocks(&mut dat, &format!("panel {}", res.id), curve);
            }
        }
        let path = dir.join(format!("fig{fig}.dat"));
        write_text(&path, &dat)?;
        written.push(path);
    }
    let path = dir.join("replication.csv");
    write_csv(
        &path,
        &["panel", "coefficient", "threshold", "two_pi_w", "n", "caption_two_pi_w", "caption_n", "rms_rel", "max_rel"],
        rep.panels.iter().map(|(r, _)| {
            vec![
                r.id.clone(),
                r.coefficient.as_str().to_string(),
                num(r.threshold),
                num(r.two_pi_w),
                r.n.to_string(),
                num(r.caption_two_pi_w),
                r.caption_n.to_string(),
                num(r.rms_rel),
                num(r.max_rel),
            ]
        }),
    )?;
    written.push(path);
    let rows: Vec<&PanelResult> = rep.panels.iter().map(|(r, _)| r).collect();
    let path = dir.join("replication.json");
    write_text(&path, &serde_json::to_string_pretty(&rows).expect("rows serialize"))?;
    written.push(path);
    Ok(written)
}

/// Human-readable table, one line per panel.
pub fn summary(rep: &Replication) -> String {
    let mut s = String::from("panel coef           thr      2piW      caption   N    caption_N  rms_rel   max_rel\n");
    for (r, _) in &rep.panels {
        s.push_str(&format!(
            "{:<5} {:<14} {:<8.0e} {:<9.4} {:<9.4} {:<4} {:<10} {:<9.3e} {:.3e}\n",
            r.id,
            r.coefficient.as_str(),
            r.threshold,
            r.two_pi_w,
            r.caption_two_pi_w,
            r.n,
            r.caption_n,
            r.rms_rel,
            r.max_rel
        ));
    }
    s
}
