//! File outputs: one CSV per curve or series, the JSON report, and a gnuplot
//! data file. Numbers are written with 15 significant digits, so equal inputs
//! give byte-identical files.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use mecrec_core::sampling::SpectrumEstimate;
use mecrec_core::tomography::TomogramSample;
use mecrec_core::Trajectory;

use crate::error::HarnessError;
use crate::harness::RunOutput;
use crate::report::CurveReport;

pub fn num(x: f64) -> String {
    format!("{x:.14e}")
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> HarnessError + '_ {
    move |e| HarnessError::Io {
        path: path.display().to_string(),
        source: e.into(),
    }
}

/// Writes `header` and `rows` to `path`.
pub fn write_csv<I>(path: &Path, header: &[&str], rows: I) -> Result<(), HarnessError>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(header).map_err(csv_err(path))?;
    for row in rows {
        w.write_record(&row).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn write_trajectory(path: &Path, traj: &Trajectory) -> Result<(), HarnessError> {
    write_csv(
        path,
        &["t", "mean_q", "mean_p", "var_q", "var_p", "cov_qp"],
        traj.times.iter().zip(&traj.states).map(|(&t, s)| {
            vec![num(t), num(s.mean_q), num(s.mean_p), num(s.var_q), num(s.var_p), num(s.cov_qp)]
        }),
    )
}

pub fn write_tomograms(path: &Path, samples: &[TomogramSample]) -> Result<(), HarnessError> {
    write_csv(
        path,
        &["mu", "nu", "x", "value", "sigma_noise"],
        samples.iter().map(|s| {
            vec![num(s.line.mu), num(s.line.nu), num(s.x), num(s.value), num(s.sigma_noise)]
        }),
    )
}

pub fn write_spectrum(path: &Path, spec: &SpectrumEstimate) -> Result<(), HarnessError> {
    write_csv(
        path,
        &["s", "magnitude"],
        spec.frequencies
            .iter()
            .zip(&spec.magnitudes)
            .map(|(&s, &m)| vec![num(s), num(m)]),
    )
}

fn in_trusted(c: &CurveReport, t: f64) -> bool {
    (c.trusted.0..=c.trusted.1).contains(&t)
}

/// Writes the gnuplot blocks of one curve: samples, then the dense curve.
pub fn write_dat_blocks(out: &mut String, title: &str, c: &CurveReport) {
    out.push_str(&format!(
        "# {title}: {} W = {} (2piW = {}), N = {}\n",
        c.coefficient.as_str(),
        num(c.bandwidth_w),
        num(2.0 * std::f64::consts::PI * c.bandwidth_w),
        c.point_count
    ));
    out.push_str("# t reconstructed theory\n");
    for (i, &t) in c.plan_times.iter().enumerate() {
        let th = c.theory_at_plan.as_ref().map_or("nan".to_string(), |v| num(v[i]));
        out.push_str(&format!("{} {} {}\n", num(t), num(c.reconstructed[i]), th));
    }
    out.push_str("\n\n");
    out.push_str(&format!("# {title}: Shannon curve on the trusted window\n# t shannon theory\n"));
    for (i, &t) in c.eval_times.iter().enumerate() {
        let th = c.theory.as_ref().map_or("nan".to_string(), |v| num(v[i]));
        out.push_str(&format!("{} {} {}\n", num(t), num(c.shannon[i]), th));
    }
    out.push_str("\n\n");
}

pub fn write_text(path: &Path, text: &str) -> Result<(), HarnessError> {
    let mut f = fs::File::create(path).map_err(io_err(path))?;
    f.write_all(text.as_bytes()).map_err(io_err(path))
}

/// Writes every artifact of a run into `dir` and returns the paths.
pub fn export(output: &RunOutput, dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::new();
    let report = &output.report;

    let path = dir.join("report.json");
    write_text(&path, &report.to_json())?;
    written.push(path);

    let mut dat = String::new();
    for c in &report.curves {
        let name = c.coefficient.as_str();
        if let Some(r) = &c.random {
            let path = dir.join(format!("{name}_random_samples.csv"));
            write_csv(
                &path,
                &["t", "value"],
                r.times.iter().zip(&r.values).map(|(&t, &v)| vec![num(t), num(v)]),
            )?;
            written.push(path);
            continue;
        }
        let path = dir.join(format!("{name}_samples.csv"));
        write_csv(
            &path,
            &["t", "value", "in_trusted"],
            c.plan_times
                .iter()
                .zip(&c.reconstructed)
                .map(|(&t, &v)| vec![num(t), num(v), u8::from(in_trusted(c, t)).to_string()]),
        )?;
        written.push(path);

        let path = dir.join(format!("{name}_curve.csv"));
        write_csv(
            &path,
            &["t", "shannon", "theory"],
            c.eval_times.iter().enumerate().map(|(i, &t)| {
                let th = c.theory.as_ref().map_or(String::new(), |v| num(v[i]));
                vec![num(t), num(c.shannon[i]), th]
            }),
        )?;
        written.push(path);
        write_dat_blocks(&mut dat, name, c);
    }

    for (c, spec) in &output.spectra {
        let path = dir.join(format!("{}_spectrum.csv", c.as_str()));
        write_spectrum(&path, spec)?;
        written.push(path);
    }

    if let Some((lam, rec)) = &output.integral {
        let path = dir.join("integral_series.csv");
        write_csv(
            &path,
            &["t", "lambda_capital", "rhs_1", "rhs_2", "rhs_3", "dtilde_1", "dtilde_2", "dtilde_3"],
            lam.times.iter().enumerate().map(|(i, &t)| {
                let mut row = vec![num(t), num(lam.values[i])];
                row.extend(rec.rhs[i].iter().map(|&x| num(x)));
                row.extend(rec.dtilde[i].iter().map(|&x| num(x)));
                row
            }),
        )?;
        written.push(path);
    }

    if let Some(s) = &output.differential {
        let opt = |v: Option<f64>| v.map_or(String::new(), num);
        let path = dir.join("differential_series.csv");
        write_csv(
            &path,
            &[
                "t",
                "lambda_q",
                "lambda_p",
                "lambda_combined",
                "dqq",
                "dpp",
                "dqp",
                "delta_qform",
                "delta_pform",
            ],
            (0..s.len()).map(|i| {
                vec![
                    num(s.times[i]),
                    opt(s.lambda_q[i]),
                    opt(s.lambda_p[i]),
                    num(s.lambda[i]),
                    num(s.dqq[i]),
                    num(s.dpp[i]),
                    num(s.dqp[i]),
                    num(s.delta_qform[i]),
                    num(s.delta_pform[i]),
                ]
            }),
        )?;
        written.push(path);
    }

    if !dat.is_empty() {
        let path = dir.join("plot.dat");
        write_text(&path, &dat)?;
        written.push(path);
    }
    Ok(written)
}
