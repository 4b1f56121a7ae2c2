use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mecrec::config::{
    Approach, CriterionName, CumulantMode, ExperimentConfig, PresetName, SamplingMode, SchemeName, SpacingName,
};
use mecrec::export::{export, write_tomograms, write_trajectory};
use mecrec::replicate::{replicate, summary, write_replication};
use mecrec::report::VerdictKind;
use mecrec::HarnessError;
use mecrec_core::dynamics::propagate_exact;
use mecrec_core::quadrature::QuadOptions;
use mecrec_core::sampling::alias_free_check;
use mecrec_core::tomography::{synthesize, MeasurementPlan};

#[derive(Parser)]
#[command(name = "mecrec", version, about = "Reconstruct time-dependent master-equation coefficients from simulated tomography")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve the probe cumulants and write trajectory.csv.
    Simulate {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// End of the time grid; defaults to the support length.
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long, default_value_t = 241)]
        points: usize,
    },
    /// Write the simulated tomogram samples at one time to tomograms.csv.
    Tomograms {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, default_value_t = 0.0)]
        t: f64,
    },
    /// Run a Case I or Case II reconstruction and export the report.
    Reconstruct {
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Bandwidths, point counts and curves of the four benchmark figures.
    ReplicatePaper {
        #[arg(long, default_value = "replication")]
        out: PathBuf,
    },
    /// Injectivity check of the spacing characteristic function.
    CheckAliasFree {
        #[arg(long)]
        dist: SpacingName,
        #[arg(long)]
        h: f64,
        /// Gamma shape.
        #[arg(long, default_value_t = 2.0)]
        k: f64,
    },
}

/// Every flag mirrors a key of the JSON config and overrides it.
#[derive(Args, Default)]
struct ConfigArgs {
    /// Flat key/value JSON config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    preset: Option<PresetName>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    omega_c: Option<f64>,
    #[arg(long)]
    temperature: Option<f64>,
    #[arg(long)]
    case: Option<u8>,
    #[arg(long)]
    approach: Option<Approach>,
    /// Caption-scale threshold: 1e-3 means "0.1%".
    #[arg(long)]
    bw_threshold: Option<f64>,
    /// Literal spectrum ratio; overrides --bw-threshold.
    #[arg(long)]
    bw_ratio: Option<f64>,
    #[arg(long)]
    bw_criterion: Option<CriterionName>,
    #[arg(long)]
    noise_sigma: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    scheme: Option<SchemeName>,
    #[arg(long)]
    tbar: Option<f64>,
    #[arg(long)]
    xi: Option<f64>,
    #[arg(long)]
    cumulants: Option<CumulantMode>,
    #[arg(long)]
    probe_q: Option<f64>,
    #[arg(long)]
    probe_p: Option<f64>,
    #[arg(long)]
    theory_omega_c: Option<f64>,
    #[arg(long)]
    verdict_bound: Option<f64>,
    #[arg(long)]
    pilot_points: Option<usize>,
    /// Case II: skip the comparison with the hidden benchmark.
    #[arg(long)]
    no_validate: bool,
    #[arg(long)]
    sampling: Option<SamplingMode>,
    #[arg(long)]
    spacing: Option<SpacingName>,
    #[arg(long)]
    spacing_h: Option<f64>,
    #[arg(long)]
    spacing_k: Option<f64>,
    #[arg(long)]
    eval_points: Option<usize>,
    #[arg(long)]
    out: Option<String>,
}

macro_rules! set {
    ($cfg:ident, $args:ident, $($field:ident),*) => {
        $( if let Some(v) = $args.$field { $cfg.$field = v; } )*
    };
}

macro_rules! set_opt {
    ($cfg:ident, $args:ident, $($field:ident),*) => {
        $( if $args.$field.is_some() { $cfg.$field = $args.$field; } )*
    };
}

impl ConfigArgs {
    fn into_config(self) -> Result<ExperimentConfig, HarnessError> {
        let mut c = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        let a = self;
        set!(c, a, preset, case, approach, bw_threshold, bw_criterion, noise_sigma, seed, scheme, cumulants);
        set!(c, a, probe_q, probe_p, verdict_bound, pilot_points, sampling, spacing, spacing_k, eval_points);
        set_opt!(c, a, alpha, omega_c, temperature, bw_ratio, dt, tbar, xi, theory_omega_c, spacing_h, out);
        if a.no_validate {
            c.validate = false;
        }
        c.resolve()?;
        Ok(c)
    }
}

fn out_dir(cfg: &ExperimentConfig) -> PathBuf {
    PathBuf::from(cfg.out.clone().unwrap_or_else(|| "out".to_string()))
}

fn ensure_dir(dir: &Path) -> Result<(), HarnessError> {
    std::fs::create_dir_all(dir).map_err(|source| HarnessError::Io {
        path: dir.display().to_string(),
        source,
    })
}

fn stage<T>(r: mecrec_core::Result<T>, stage: &'static str) -> Result<T, HarnessError> {
    r.map_err(|source| HarnessError::Stage { stage, source })
}

fn execute(cmd: Command) -> Result<ExitCode, HarnessError> {
    match cmd {
        Command::Simulate { cfg, t_max, points } => {
            let cfg = cfg.into_config()?;
            let res = cfg.resolve()?;
            let t_max = t_max.unwrap_or(res.tbar);
            if !(t_max > 0.0) || points < 2 {
                return Err(HarnessError::Config("need t_max > 0 and at least 2 points".into()));
            }
            let grid: Vec<f64> = (0..points).map(|i| t_max * i as f64 / (points - 1) as f64).collect();
            let traj = stage(
                propagate_exact(&res.probe, &res.truth, &res.hamiltonian, &grid, &QuadOptions::default()),
                "evolution",
            )?;
            for d in &traj.diagnostics {
                eprintln!("warning: {d:?}");
            }
            let dir = out_dir(&cfg);
            ensure_dir(&dir)?;
            let path = dir.join("trajectory.csv");
            write_trajectory(&path, &traj)?;
            println!("{}", path.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Tomograms { cfg, t } => {
            let cfg = cfg.into_config()?;
            let res = cfg.resolve()?;
            if !(t >= 0.0) {
                return Err(HarnessError::Config("t must be non-negative".into()));
            }
            let grid = if t > 0.0 { vec![0.0, t] } else { vec![0.0] };
            let traj = stage(
                propagate_exact(&res.probe, &res.truth, &res.hamiltonian, &grid, &QuadOptions::default()),
                "evolution",
            )?;
            let state = *traj.states.last().expect("non-empty trajectory");
            let samples = stage(
                synthesize(&state, &MeasurementPlan::around(&state), cfg.noise_sigma, cfg.seed),
                "tomogram synthesis",
            )?;
            let dir = out_dir(&cfg);
            ensure_dir(&dir)?;
            let path = dir.join("tomograms.csv");
            write_tomograms(&path, &samples)?;
            println!("{}", path.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Reconstruct { cfg } => {
            let cfg = cfg.into_config()?;
            let output = mecrec::run(&cfg)?;
            let dir = out_dir(&cfg);
            for p in export(&output, &dir)? {
                println!("{}", p.display());
            }
            let r = &output.report;
            for c in &r.curves {
                let err = c
                    .errors
                    .map_or(String::from("no theory column"), |e| format!("rms_rel {:.3e}, max_rel {:.3e}", e.rms_rel, e.max_rel));
                eprintln!(
                    "{}: 2piW = {:.4}, N = {}, {err}",
                    c.coefficient.as_str(),
                    2.0 * std::f64::consts::PI * c.bandwidth_w,
                    c.point_count
                );
            }
            for d in &r.diagnostics {
                eprintln!("note: {d}");
            }
            match r.verdict {
                Some(v) if v.kind == VerdictKind::Fail => {
                    eprintln!("Case-I verdict: FAIL (max_rel {:.3e} > {})", v.worst_max_rel, v.bound);
                    Ok(ExitCode::from(4))
                }
                Some(v) => {
                    eprintln!("Case-I verdict: PASS (max_rel {:.3e} <= {})", v.worst_max_rel, v.bound);
                    Ok(ExitCode::SUCCESS)
                }
                None => Ok(ExitCode::SUCCESS),
            }
        }
        Command::ReplicatePaper { out } => {
            let rep = replicate()?;
            print!("{}", summary(&rep));
            for p in write_replication(&rep, &out)? {
                println!("{}", p.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::CheckAliasFree { dist, h, k } => {
            if !(h > 0.0 && h.is_finite()) || !(k > 0.0 && k.is_finite()) {
                return Err(HarnessError::Config("h and k must be positive".into()));
            }
            let v = stage(alias_free_check(&dist.distribution(h, k)), "alias-free check")?;
            let collision = v
                .collision
                .map(|c| serde_json::json!({ "omega_a": c.omega_a, "omega_b": c.omega_b }));
            let json = serde_json::json!({
                "distribution": format!("{dist:?}").to_lowercase(),
                "h": h,
                "k": k,
                "alias_free": v.alias_free,
                "omega_max": v.omega_max,
                "segments": v.segments,
                "collision": collision,
            });
            println!("{}", serde_json::to_string_pretty(&json).expect("json"));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
