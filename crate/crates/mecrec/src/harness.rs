//! Experiment orchestration: probe → evolution → tomography → T-C inversion →
//! coefficient estimates → sampling-theorem reconstruction → comparison.

use std::cell::Cell;
use std::f64::consts::PI;

use mecrec_core::differential::{reconstruct_differential, DifferentialSeries};
use mecrec_core::dynamics::{CumulantSource, OracleSource};
use mecrec_core::integral::{
    diffusion_rhs, lambda_capital_expt, ComponentPolicy, DiffusionIntegralRecord, LambdaIntegralSeries,
};
use mecrec_core::qbm::{Coefficient, OhmicModel};
use mecrec_core::sampling::{
    alias_free_check, analytic_bandwidth, analytic_spectrum, discrete_spectrum, effective_bandwidth_with,
    random_plan, restrict_and_window, shannon_reconstruct, uniform_plan, SampledFunction, SpectrumEstimate,
};
use mecrec_core::tomography::{synthesize, tc_invert, MeasurementPlan};
use mecrec_core::{GaussianState, HamiltonianParams};

use crate::config::{Approach, CumulantMode, ExperimentConfig, Resolved, SamplingMode};
use crate::error::{HarnessError, StageExt};
use crate::report::{
    BandwidthSource, CoefficientName, CurveReport, ErrorNorms, Provenance, RandomSamplingReport, ReconReport,
    Verdict, VerdictKind, SCHEMA_VERSION,
};

/// Points per side of the exported analytic spectrum.
const SPECTRUM_EXPORT_POINTS: usize = 2000;

impl From<CoefficientName> for Coefficient {
    fn from(c: CoefficientName) -> Self {
        match c {
            CoefficientName::CapitalLambda => Coefficient::CapitalLambda,
            CoefficientName::Lambda => Coefficient::Lambda,
            CoefficientName::Delta => Coefficient::Delta,
        }
    }
}

/// Simulated experiment: exact cumulants are turned into noisy tomograms on a
/// ten-point plan and inverted back with the T-C procedure.
pub struct MeasuredSource<S> {
    pub inner: S,
    pub noise_sigma: f64,
    pub seed: u64,
    violations: Cell<usize>,
}

impl<S: CumulantSource> MeasuredSource<S> {
    pub fn new(inner: S, noise_sigma: f64, seed: u64) -> Self {
        Self {
            inner,
            noise_sigma,
            seed,
            violations: Cell::new(0),
        }
    }

    /// Inverted states that broke the uncertainty relation so far.
    pub fn uncertainty_violations(&self) -> usize {
        self.violations.get()
    }
}

/// Noise stream for one measurement time: independent of batch composition.
fn time_seed(seed: u64, t: f64) -> u64 {
    let mut z = seed ^ t.to_bits().wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl<S: CumulantSource> CumulantSource for MeasuredSource<S> {
    fn params(&self) -> HamiltonianParams {
        self.inner.params()
    }

    fn states_at(&self, times: &[f64]) -> mecrec_core::Result<Vec<GaussianState>> {
        let exact = self.inner.states_at(times)?;
        exact
            .iter()
            .zip(times)
            .map(|(st, &t)| {
                let samples = synthesize(st, &MeasurementPlan::around(st), self.noise_sigma, time_seed(self.seed, t))?;
                let inv = tc_invert(&samples)?;
                if inv.uncertainty_violation.is_some() {
                    self.violations.set(self.violations.get() + 1);
                }
                Ok(inv.state)
            })
            .collect()
    }
}

/// Report plus the intermediate series the exporters need.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: ReconReport,
    pub spectra: Vec<(CoefficientName, SpectrumEstimate)>,
    pub integral: Option<(LambdaIntegralSeries, DiffusionIntegralRecord)>,
    pub differential: Option<DifferentialSeries>,
}

type Truth<'a> = &'a dyn Fn(CoefficientName, f64) -> f64;

fn coefficients(approach: Approach) -> &'static [CoefficientName] {
    match approach {
        Approach::Integral => &[CoefficientName::CapitalLambda],
        Approach::Differential => &[CoefficientName::Lambda, CoefficientName::Delta],
    }
}

fn component_policy(noise_sigma: f64) -> ComponentPolicy {
    ComponentPolicy {
        tolerance: 1e-6 + 20.0 * noise_sigma,
        ..ComponentPolicy::default()
    }
}

/// Plan `{0} ∪ {n/(2W) : 1 ≤ n ≤ 2Wt̄}`.
pub fn plan_with_origin(w: f64, tbar: f64) -> Vec<f64> {
    std::iter::once(0.0).chain(uniform_plan(w, tbar)).collect()
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

pub fn error_norms(rec: &[f64], theory: &[f64]) -> ErrorNorms {
    let (mut e2, mut t2, mut emax, mut tmax) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (r, t) in rec.iter().zip(theory) {
        let e = r - t;
        e2 += e * e;
        t2 += t * t;
        emax = emax.max(e.abs());
        tmax = tmax.max(t.abs());
    }
    ErrorNorms {
        rms_rel: (e2 / t2).sqrt(),
        max_rel: emax / tmax,
    }
}

/// The analytic effective bandwidth of a benchmark coefficient's restriction.
pub fn theory_bandwidth(
    model: &OhmicModel,
    c: CoefficientName,
    tbar: f64,
    ratio: f64,
    criterion: mecrec_core::sampling::BandwidthCriterion,
) -> mecrec_core::Result<f64> {
    let coef = Coefficient::from(c);
    analytic_bandwidth(|s| model.fourier(coef, tbar, s).norm(), ratio, criterion, 2.0 * PI / tbar)
}

/// Estimates at `times` (ascending) for every coefficient of the approach.
struct Measured {
    values: Vec<Vec<f64>>,
    integral: Option<(LambdaIntegralSeries, DiffusionIntegralRecord)>,
    differential: Option<DifferentialSeries>,
}

fn measure(
    approach: Approach,
    source: &dyn CumulantSource,
    res: &Resolved,
    noise_sigma: f64,
    times: &[f64],
) -> Result<Measured, HarnessError> {
    match approach {
        Approach::Integral => {
            // Λ is referenced to the state at the origin.
            let mut grid = times.to_vec();
            let prepended = grid.first() != Some(&0.0);
            if prepended {
                grid.insert(0, 0.0);
            }
            let states = source.states_at(&grid).stage("measurement")?;
            let params = source.params();
            let lam = lambda_capital_expt(&grid, &states, &params, &component_policy(noise_sigma))
                .stage("integral reconstruction")?;
            let rec = diffusion_rhs(&states, &lam, &params).stage("integral reconstruction")?;
            let mut vals = lam.values.clone();
            if prepended {
                vals.remove(0);
            }
            Ok(Measured {
                values: vec![vals],
                integral: Some((lam, rec)),
                differential: None,
            })
        }
        Approach::Differential => {
            let series = reconstruct_differential(source, &res.fd, times).stage("differential reconstruction")?;
            Ok(Measured {
                values: vec![series.lambda.clone(), series.delta()],
                integral: None,
                differential: Some(series),
            })
        }
    }
}

fn merge_sorted(sets: &[&[f64]]) -> Vec<f64> {
    let mut all: Vec<f64> = sets.iter().flat_map(|s| s.iter().copied()).collect();
    all.sort_by(f64::total_cmp);
    all.dedup();
    all
}

fn pick(all: &[f64], values: &[f64], wanted: &[f64]) -> Vec<f64> {
    wanted
        .iter()
        .map(|t| values[all.partition_point(|a| a < t)])
        .collect()
}

struct Band {
    coef: CoefficientName,
    w: f64,
    source: BandwidthSource,
}

fn build_source<'a>(cfg: &ExperimentConfig, res: &Resolved) -> Box<dyn CumulantSource + 'a> {
    let oracle = OracleSource::new(res.probe, res.truth, res.hamiltonian);
    match cfg.cumulants {
        CumulantMode::Oracle => Box::new(oracle),
        CumulantMode::Tomography => Box::new(MeasuredSource::new(oracle, cfg.noise_sigma, cfg.seed)),
    }
}

/// Measures on the plans, reconstructs and compares. Shared by both cases.
fn finish(
    cfg: &ExperimentConfig,
    res: &Resolved,
    source: &dyn CumulantSource,
    bands: Vec<Band>,
    theory: Option<Truth<'_>>,
    spectra: Vec<(CoefficientName, SpectrumEstimate)>,
    mut diagnostics: Vec<String>,
) -> Result<RunOutput, HarnessError> {
    let coefs = coefficients(cfg.approach);
    let mut curves = Vec::with_capacity(bands.len());
    let mut integral = None;
    let mut differential = None;

    match cfg.sampling {
        SamplingMode::Uniform => {
            let plans: Vec<Vec<f64>> = bands.iter().map(|b| plan_with_origin(b.w, res.tbar)).collect();
            let refs: Vec<&[f64]> = plans.iter().map(Vec::as_slice).collect();
            let all = merge_sorted(&refs);
            let m = measure(cfg.approach, source, res, cfg.noise_sigma, &all)?;
            integral = m.integral;
            differential = m.differential;
            for (band, plan) in bands.iter().zip(&plans) {
                let idx = coefs.iter().position(|c| *c == band.coef).expect("coefficient of approach");
                let values = pick(&all, &m.values[idx], plan);
                let f = SampledFunction::new(plan.clone(), values.clone(), res.tbar, res.xi, Some(band.w))
                    .stage("sampling")?;
                let window = restrict_and_window(res.tbar, res.xi, Some(band.w)).stage("sampling")?;
                let eval_times = linspace(f.trusted.0, f.trusted.1, cfg.eval_points);
                let shannon = eval_times
                    .iter()
                    .map(|&t| shannon_reconstruct(&f, t))
                    .collect::<mecrec_core::Result<Vec<_>>>()
                    .stage("shannon reconstruction")?;
                let theory_curve = theory.map(|th| eval_times.iter().map(|&t| th(band.coef, t)).collect::<Vec<_>>());
                let theory_at_plan = theory.map(|th| plan.iter().map(|&t| th(band.coef, t)).collect());
                let errors = theory_curve.as_ref().map(|tc| error_norms(&shannon, tc));
                if window.gibbs_exposed {
                    diagnostics.push(format!(
                        "{}: xi = {} is shorter than the sample spacing, the trusted window may carry Gibbs ripples",
                        band.coef.as_str(),
                        res.xi
                    ));
                }
                curves.push(CurveReport {
                    coefficient: band.coef,
                    bandwidth_w: band.w,
                    bandwidth_source: band.source,
                    ratio: res.ratio,
                    point_count: plan.len() - 1,
                    gibbs_exposed: window.gibbs_exposed,
                    support: f.support,
                    trusted: f.trusted,
                    plan_times: plan.clone(),
                    reconstructed: values,
                    theory_at_plan,
                    eval_times,
                    shannon,
                    theory: theory_curve,
                    errors,
                    random: None,
                });
            }
        }
        SamplingMode::Random => {
            for band in &bands {
                let count = uniform_plan(band.w, res.tbar).len().max(1);
                let h = cfg.spacing_h.unwrap_or(1.0 / (2.0 * band.w));
                let dist = cfg.spacing.distribution(h, cfg.spacing_k);
                let plan = random_plan(&dist, count, cfg.seed).stage("random sampling")?;
                let verdict = alias_free_check(&dist).stage("alias-free check")?;
                let k = coefs.iter().position(|c| *c == band.coef).expect("coefficient of approach");
                let m = measure(cfg.approach, source, res, cfg.noise_sigma, &plan.times)?;
                if integral.is_none() {
                    integral = m.integral;
                }
                if differential.is_none() {
                    differential = m.differential;
                }
                curves.push(CurveReport {
                    coefficient: band.coef,
                    bandwidth_w: band.w,
                    bandwidth_source: band.source,
                    ratio: res.ratio,
                    point_count: count,
                    gibbs_exposed: false,
                    support: (0.0, res.tbar),
                    trusted: (0.0, res.tbar - res.xi),
                    plan_times: Vec::new(),
                    reconstructed: Vec::new(),
                    theory_at_plan: None,
                    eval_times: Vec::new(),
                    shannon: Vec::new(),
                    theory: None,
                    errors: None,
                    random: Some(RandomSamplingReport {
                        distribution: format!("{:?}", cfg.spacing).to_lowercase(),
                        mean_spacing: h,
                        times: plan.times,
                        values: m.values[k].clone(),
                        alias_free: verdict.alias_free,
                        omega_max: verdict.omega_max,
                        collision: verdict.collision.map(|c| (c.omega_a, c.omega_b)),
                    }),
                });
            }
        }
    }

    let verdict = (cfg.case == 1 && cfg.sampling == SamplingMode::Uniform).then(|| {
        let worst = curves
            .iter()
            .filter_map(|c| c.errors.map(|e| e.max_rel))
            .fold(0.0, f64::max);
        Verdict {
            kind: if worst <= cfg.verdict_bound { VerdictKind::Pass } else { VerdictKind::Fail },
            bound: cfg.verdict_bound,
            worst_max_rel: worst,
        }
    });

    Ok(RunOutput {
        report: ReconReport {
            schema_version: SCHEMA_VERSION,
            case: cfg.case,
            approach: cfg.approach,
            config: cfg.clone(),
            provenance: Provenance::for_config(cfg),
            curves,
            verdict,
            diagnostics,
        },
        spectra,
        integral,
        differential,
    })
}

fn base_diagnostics(res: &Resolved) -> Vec<String> {
    res.truth
        .ohmic
        .warnings()
        .iter()
        .map(|w| format!("benchmark validity: {w:?}"))
        .collect()
}

fn push_source_diagnostics(out: &mut RunOutput, violations: Option<usize>) {
    if let Some(n) = violations.filter(|&n| n > 0) {
        out.report
            .diagnostics
            .push(format!("{n} inverted states violate the uncertainty relation"));
    }
}

/// Case I: the theory is known; its analytic spectrum fixes the plan.
pub fn run_case1(cfg: &ExperimentConfig) -> Result<RunOutput, HarnessError> {
    let res = cfg.resolve()?;
    let theory_model = res.theory;
    let tbar = res.tbar;
    let theory = move |c: CoefficientName, t: f64| theory_model.tilde(c.into(), tbar, t);
    let mut bands = Vec::new();
    let mut spectra = Vec::new();
    for &c in coefficients(cfg.approach) {
        let w = theory_bandwidth(&res.theory, c, res.tbar, res.ratio, res.criterion).stage("bandwidth")?;
        let coef = Coefficient::from(c);
        let s_cut = 2.0 * PI * w;
        spectra.push((
            c,
            analytic_spectrum(|s| res.theory.fourier(coef, tbar, s).norm(), 4.0 * s_cut, SPECTRUM_EXPORT_POINTS),
        ));
        bands.push(Band {
            coef: c,
            w,
            source: BandwidthSource::Analytic,
        });
    }
    let oracle = OracleSource::new(res.probe, res.truth, res.hamiltonian);
    let measured = MeasuredSource::new(OracleSource::new(res.probe, res.truth, res.hamiltonian), cfg.noise_sigma, cfg.seed);
    let (source, violations): (&dyn CumulantSource, bool) = match cfg.cumulants {
        CumulantMode::Oracle => (&oracle, false),
        CumulantMode::Tomography => (&measured, true),
    };
    let mut out = finish(cfg, &res, source, bands, Some(&theory), spectra, base_diagnostics(&res))?;
    push_source_diagnostics(&mut out, violations.then(|| measured.uncertainty_violations()));
    Ok(out)
}

/// Case II on the configured benchmark, which serves as hidden truth when
/// `validate` is set.
pub fn run_case2(cfg: &ExperimentConfig) -> Result<RunOutput, HarnessError> {
    let res = cfg.resolve()?;
    let source = build_source(cfg, &res);
    let truth_model = res.truth;
    let tbar = res.tbar;
    let truth = move |c: CoefficientName, t: f64| truth_model.tilde(c.into(), tbar, t);
    let hidden: Option<Truth<'_>> = if cfg.validate { Some(&truth) } else { None };
    run_case2_with(cfg, source.as_ref(), hidden)
}

/// Case II with an arbitrary cumulant source. A dense differential (or
/// integral) pilot pass supplies the spectrum.
pub fn run_case2_with(
    cfg: &ExperimentConfig,
    source: &dyn CumulantSource,
    truth: Option<Truth<'_>>,
) -> Result<RunOutput, HarnessError> {
    let res = cfg.resolve()?;
    let pilot_times = linspace(0.0, res.tbar, cfg.pilot_points);
    let h = pilot_times[1] - pilot_times[0];
    let s_nyquist = PI / h;
    let pilot = measure(cfg.approach, source, &res, cfg.noise_sigma, &pilot_times)?;
    let mut bands = Vec::new();
    let mut spectra = Vec::new();
    let mut diagnostics = base_diagnostics(&res);
    for (&c, values) in coefficients(cfg.approach).iter().zip(&pilot.values) {
        let (lo, hi) = values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        let scale = lo.abs().max(hi.abs()).max(1.0);
        if hi - lo <= 1e-6 * scale {
            diagnostics.push(format!("{}: pilot is constant, using the minimal plan", c.as_str()));
            bands.push(Band {
                coef: c,
                w: 1.0 / (2.0 * res.tbar),
                source: BandwidthSource::Flat,
            });
            continue;
        }
        let spec = discrete_spectrum(&pilot_times, values).stage("pilot spectrum")?;
        // A spectrum still above threshold at the pilot's Nyquist edge is the
        // same failure as a cut-off beyond half of it.
        let w = match effective_bandwidth_with(&spec, res.ratio, res.criterion) {
            Err(mecrec_core::Error::SpectrumTooNarrow { s_max }) => {
                return Err(HarnessError::PilotTooSparse { s_cut: s_max, s_nyquist })
            }
            other => other.stage("pilot bandwidth")?,
        };
        let s_cut = 2.0 * PI * w;
        if s_cut > 0.5 * s_nyquist {
            return Err(HarnessError::PilotTooSparse { s_cut, s_nyquist });
        }
        spectra.push((c, spec));
        bands.push(Band {
            coef: c,
            w,
            source: BandwidthSource::Discrete,
        });
    }
    finish(cfg, &res, source, bands, truth, spectra, diagnostics)
}

/// Dispatches on `cfg.case`.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput, HarnessError> {
    match cfg.case {
        1 => run_case1(cfg),
        2 => run_case2(cfg),
        other => Err(HarnessError::Config(format!("case must be 1 or 2, got {other}"))),
    }
}
