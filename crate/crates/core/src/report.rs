//! Cross-model comparison: runs the selected estimators on a scenario,
//! tabulates η per channel and its deviation from a reference model, and
//! writes CSV tables plus a JSON summary.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::link::LinkConfig;
use crate::nli::{self, ModelId, NliResult};
use crate::options::ModelOptions;
use crate::plan::ChannelPlan;
use crate::raman::{fit_effective_attenuation, isrs_power_transfer_db, solve_raman_ode, PowerProfile};
use crate::scenario::Scenario;
use crate::ssfm::{self, SsfmConfig, SsfmParams};
use crate::units::linear_to_db;

/// Above this transfer the first-order ISRS closed form is outside its
/// validated range.
pub const LARGE_TRANSFER_DB: f64 = 10.0;

pub const ETA_CSV: &str = "eta.csv";
pub const DEVIATION_CSV: &str = "deviation.csv";
pub const SUMMARY_JSON: &str = "summary.json";

#[derive(Debug, Clone)]
pub struct RunSpec {
    pub scenario: Scenario,
    pub models: Vec<ModelId>,
    pub reference: ModelId,
    /// Channels to evaluate; all channels (or the probe set in a sweep) if
    /// unset.
    pub channels: Option<Vec<usize>>,
    /// Launch power per channel (dBm) of each sweep point.
    pub sweep: Option<Vec<f64>>,
    /// Artifacts are written here when set.
    pub out_dir: Option<PathBuf>,
}

impl RunSpec {
    /// Models, reference, probe channels and sweep as listed in the scenario.
    pub fn from_scenario(scenario: Scenario) -> Self {
        RunSpec {
            models: scenario.models.clone(),
            reference: scenario.reference,
            channels: scenario.probe_channels.clone(),
            sweep: scenario.sweep.clone(),
            scenario,
            out_dir: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |path: &str, message: String| Err(Error::Config { path: path.into(), message });
        if self.models.is_empty() {
            return cfg("models", "select at least one model".into());
        }
        if let Some(chs) = &self.channels {
            let n = self.scenario.plan.len();
            if let Some(&bad) = chs.iter().find(|&&c| c >= n) {
                return cfg("channels", format!("channel {bad} out of range for {n} channels"));
            }
        }
        if let Some(s) = &self.sweep {
            if s.is_empty() || s.iter().any(|x| !x.is_finite()) {
                return cfg("sweep", "sweep needs at least one finite launch power".into());
            }
        }
        Ok(())
    }

    /// Selected models with the reference first and no repeats.
    fn model_order(&self) -> Vec<ModelId> {
        let mut out = vec![self.reference];
        for &m in &self.models {
            if !out.contains(&m) {
                out.push(m);
            }
        }
        out
    }
}

/// Deviation of one model from the reference at one point, per channel.
/// `None` where either η is zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDeviation {
    pub model: ModelId,
    pub deviation_db: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportPoint {
    pub power_per_channel_dbm: Option<f64>,
    pub power_transfer_db: Option<f64>,
    pub channels: Vec<usize>,
    pub frequencies_hz: Vec<f64>,
    pub results: Vec<NliResult>,
    pub deviations: Vec<ModelDeviation>,
}

impl ReportPoint {
    pub fn result(&self, model: ModelId) -> Option<&NliResult> {
        self.results.iter().find(|r| r.model == model)
    }

    pub fn deviation(&self, model: ModelId) -> Option<&[Option<f64>]> {
        self.deviations.iter().find(|d| d.model == model).map(|d| d.deviation_db.as_slice())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviationSummary {
    pub model: ModelId,
    pub max_abs_deviation_db: f64,
    pub mean_abs_deviation_db: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FailureRecord {
    pub model: ModelId,
    pub power_per_channel_dbm: Option<f64>,
    pub message: String,
}

/// Everything a comparison produced. Serialised as the JSON summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviationReport {
    pub scenario: String,
    pub reference: ModelId,
    pub models: Vec<ModelId>,
    pub points: Vec<ReportPoint>,
    pub summary: Vec<DeviationSummary>,
    pub failures: Vec<FailureRecord>,
    pub warnings: Vec<String>,
}

impl DeviationReport {
    pub fn summary_for(&self, model: ModelId) -> Option<&DeviationSummary> {
        self.summary.iter().find(|s| s.model == model)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| Error::Config {
            path: e.path().to_string(),
            message: e.into_inner().to_string(),
        })
    }

    /// Per-channel η in the shared result schema. Sweeps prepend the launch
    /// power and power transfer of each point.
    pub fn write_eta_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let sweep = self.points.iter().any(|p| p.power_per_channel_dbm.is_some());
        if sweep {
            writeln!(w, "power_per_channel_dbm,power_transfer_db,{}", NliResult::CSV_HEADER)?;
        } else {
            writeln!(w, "{}", NliResult::CSV_HEADER)?;
        }
        for p in &self.points {
            for r in &p.results {
                if sweep {
                    let mut body = Vec::new();
                    r.write_csv(&mut body, false)?;
                    let prefix = format!("{},{}", opt(p.power_per_channel_dbm), opt(p.power_transfer_db));
                    for line in String::from_utf8_lossy(&body).lines() {
                        writeln!(w, "{prefix},{line}")?;
                    }
                } else {
                    r.write_csv(&mut w, false)?;
                }
            }
        }
        Ok(())
    }

    pub fn write_deviation_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(
            w,
            "power_per_channel_dbm,power_transfer_db,model,reference,channel,frequency_hz,delta_eta_db"
        )?;
        for p in &self.points {
            for d in &p.deviations {
                for ((ch, f), dev) in p.channels.iter().zip(&p.frequencies_hz).zip(&d.deviation_db) {
                    let dev = dev.map(|x| format!("{x:.6}")).unwrap_or_default();
                    writeln!(
                        w,
                        "{},{},{},{},{ch},{f},{dev}",
                        opt(p.power_per_channel_dbm),
                        opt(p.power_transfer_db),
                        d.model,
                        self.reference
                    )?;
                }
            }
        }
        Ok(())
    }

    /// Writes eta.csv, deviation.csv and summary.json into `dir`.
    pub fn write_artifacts(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let mut buf = Vec::new();
        self.write_eta_csv(&mut buf)?;
        fs::write(dir.join(ETA_CSV), &buf)?;
        buf.clear();
        self.write_deviation_csv(&mut buf)?;
        fs::write(dir.join(DEVIATION_CSV), &buf)?;
        fs::write(dir.join(SUMMARY_JSON), self.to_json()?)?;
        Ok(())
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.6}")).unwrap_or_default()
}

/// Inputs shared by the models at one operating point. The Raman profile
/// is solved once and reused.
struct Point<'a> {
    plan: ChannelPlan,
    link: LinkConfig,
    opts: &'a ModelOptions,
    ssfm: &'a SsfmParams,
    profile: Result<PowerProfile>,
}

impl<'a> Point<'a> {
    fn new(plan: ChannelPlan, link: LinkConfig, opts: &'a ModelOptions, ssfm: &'a SsfmParams) -> Self {
        let profile = solve_raman_ode(&link, &plan, opts);
        Point { plan, link, opts, ssfm, profile }
    }

    fn profile(&self) -> Result<&PowerProfile> {
        self.profile.as_ref().map_err(|e| Error::Simulation(format!("Raman profile: {e}")))
    }

    fn transfer(&self) -> Option<f64> {
        self.profile.as_ref().ok().and_then(|p| isrs_power_transfer_db(p).ok())
    }

    fn evaluate(&self, model: ModelId, channels: &[usize]) -> Result<NliResult> {
        let (plan, link, opts) = (&self.plan, &self.link, self.opts);
        match model {
            ModelId::IsrsGnGeneral => {
                let profile = self.profile()?;
                nli::evaluate_channels(model, channels, |ch| {
                    nli::eta_isrs_gn_general(profile, plan, link, ch, opts)
                })
            }
            ModelId::IsrsGnAnalytic => {
                nli::evaluate_channels(model, channels, |ch| nli::eta_isrs_gn_analytic(link, plan, ch, opts))
            }
            ModelId::EffAttnIntegral => {
                let eff = fit_effective_attenuation(self.profile()?, 0)?;
                nli::evaluate_channels(model, channels, |ch| {
                    nli::eta_effective_attenuation_integral(plan, link, &eff, ch, opts)
                })
            }
            ModelId::EffAttnCf => {
                let eff = fit_effective_attenuation(self.profile()?, 0)?;
                nli::evaluate_channels(model, channels, |ch| {
                    nli::eta_effective_attenuation_cf(plan, link, &eff, ch, opts)
                })
            }
            ModelId::IsrsGnCf => {
                nli::evaluate_channels(model, channels, |ch| nli::eta_isrs_gn_cf(plan, link, ch, opts))
            }
            ModelId::Ssfm => {
                let cfg = SsfmConfig {
                    plan: plan.clone(),
                    link: link.clone(),
                    params: self.ssfm.clone(),
                    opts: opts.clone(),
                };
                let all = ssfm::simulate(&cfg)?;
                let entries = channels.iter().map(|&ch| all.entries[ch]).collect();
                Ok(NliResult { model, entries })
            }
        }
    }
}

/// Runs every model at one point; failures are returned, not raised.
fn evaluate_point(
    point: &Point,
    models: &[ModelId],
    reference: ModelId,
    channels: &[usize],
    dbm: Option<f64>,
    failures: &mut Vec<FailureRecord>,
) -> ReportPoint {
    let outcomes: Vec<(ModelId, Result<NliResult>)> =
        models.par_iter().map(|&m| (m, point.evaluate(m, channels))).collect();
    let mut results = Vec::new();
    for (model, outcome) in outcomes {
        match outcome {
            Ok(r) => results.push(r),
            Err(e) => {
                log::warn!("{model} failed: {e}");
                failures.push(FailureRecord { model, power_per_channel_dbm: dbm, message: e.to_string() });
            }
        }
    }
    let reference_eta = results.iter().find(|r| r.model == reference).map(|r| r.entries.clone());
    let deviations = match &reference_eta {
        Some(reference_eta) => results
            .iter()
            .map(|r| ModelDeviation {
                model: r.model,
                deviation_db: r
                    .entries
                    .iter()
                    .zip(reference_eta)
                    .map(|(e, base)| {
                        if r.model == reference {
                            Some(0.0)
                        } else if e.eta > 0.0 && base.eta > 0.0 {
                            Some(linear_to_db(e.eta) - linear_to_db(base.eta))
                        } else {
                            None
                        }
                    })
                    .collect(),
            })
            .collect(),
        None => Vec::new(),
    };
    let frequencies = channels.iter().map(|&c| point.plan.channels()[c].frequency).collect();
    ReportPoint {
        power_per_channel_dbm: dbm,
        power_transfer_db: point.transfer(),
        channels: channels.to_vec(),
        frequencies_hz: frequencies,
        results,
        deviations,
    }
}

fn summarise(models: &[ModelId], points: &[ReportPoint]) -> Vec<DeviationSummary> {
    models
        .iter()
        .filter_map(|&model| {
            let devs: Vec<f64> = points
                .iter()
                .filter_map(|p| p.deviation(model))
                .flat_map(|d| d.iter().flatten().map(|x| x.abs()))
                .collect();
            if devs.is_empty() {
                return None;
            }
            let max = devs.iter().cloned().fold(0.0, f64::max);
            let mean = devs.iter().sum::<f64>() / devs.len() as f64;
            Some(DeviationSummary {
                model,
                max_abs_deviation_db: max,
                mean_abs_deviation_db: mean.min(max),
                samples: devs.len(),
            })
        })
        .collect()
}

fn transfer_warnings(points: &[ReportPoint]) -> Vec<String> {
    points
        .iter()
        .filter_map(|p| {
            let t = p.power_transfer_db?;
            (t > LARGE_TRANSFER_DB).then(|| {
                format!(
                    "ISRS power transfer of {t:.2} dB exceeds {LARGE_TRANSFER_DB} dB; the first-order closed form loses accuracy here"
                )
            })
        })
        .collect()
}

fn finish(spec: &RunSpec, models: Vec<ModelId>, points: Vec<ReportPoint>, failures: Vec<FailureRecord>) -> Result<DeviationReport> {
    let summary = summarise(&models, &points);
    let warnings = transfer_warnings(&points);
    let report = DeviationReport {
        scenario: spec.scenario.name.clone(),
        reference: spec.reference,
        models,
        points,
        summary,
        failures,
        warnings,
    };
    if let Some(dir) = &spec.out_dir {
        report.write_artifacts(dir)?;
    }
    Ok(report)
}

/// Evaluates the selected models on the scenario as given and compares them
/// with the reference. Model failures end up in `failures`.
pub fn run(spec: &RunSpec) -> Result<DeviationReport> {
    spec.validate()?;
    let s = &spec.scenario;
    let channels = spec.channels.clone().unwrap_or_else(|| (0..s.plan.len()).collect());
    let models = spec.model_order();
    let point = Point::new(s.plan.clone(), s.link.clone(), &s.options, &s.ssfm);
    let mut failures = Vec::new();
    let p = evaluate_point(&point, &models, spec.reference, &channels, None, &mut failures);
    finish(spec, models, vec![p], failures)
}

/// Band edges and centre.
pub fn default_probe_channels(n: usize) -> Vec<usize> {
    let mut v = vec![0, n / 2, n.saturating_sub(1)];
    v.dedup();
    v
}

/// Repeats the comparison at every launch power of the sweep, recording
/// the ISRS power transfer of each point.
pub fn sweep_power_transfer(spec: &RunSpec) -> Result<DeviationReport> {
    spec.validate()?;
    let s = &spec.scenario;
    let sweep = spec.sweep.as_ref().ok_or_else(|| Error::Config {
        path: "sweep".into(),
        message: "a power sweep needs launch powers".into(),
    })?;
    let channels = spec.channels.clone().unwrap_or_else(|| default_probe_channels(s.plan.len()));
    let models = spec.model_order();
    let mut failures = Vec::new();
    let mut points = Vec::with_capacity(sweep.len());
    for &dbm in sweep {
        let (plan, link) = s.at_power(dbm)?;
        let point = Point::new(plan, link, &s.options, &s.ssfm);
        points.push(evaluate_point(&point, &models, spec.reference, &channels, Some(dbm), &mut failures));
    }
    finish(spec, models, points, failures)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario(extra: &str) -> Scenario {
        let text = format!(
            r#"{{
            "name": "unit",
            "fiber": {{
                "alpha_db_per_km": 0.2, "gamma_per_w_per_km": 1.2,
                "dispersion_ps_per_nm_km": 18, "slope_ps_per_nm2_km": 0.067,
                "cr_per_w_per_km_per_thz": 0.0236, "ref_wavelength_nm": 1570
            }},
            "plan": {{ "grid": {{ "count": 5, "symbol_rate_gbaud": 100, "power_per_channel_dbm": 4 }} }},
            "link": {{ "n_spans": 2, "span_length_km": 80 }}
            {extra}
        }}"#
        );
        Scenario::from_json_str(&text).unwrap()
    }

    #[test]
    fn single_model_has_only_the_self_row() {
        let spec = RunSpec::from_scenario(scenario(r#", "models": ["isrs-gn-cf"], "reference_model": "isrs-gn-cf""#));
        let r = run(&spec).unwrap();
        assert_eq!(r.models, vec![ModelId::IsrsGnCf]);
        assert_eq!(r.points[0].deviations.len(), 1);
        assert!(r.points[0].deviations[0].deviation_db.iter().all(|d| *d == Some(0.0)));
        let s = r.summary_for(ModelId::IsrsGnCf).unwrap();
        assert_eq!((s.max_abs_deviation_db, s.mean_abs_deviation_db), (0.0, 0.0));
    }

    #[test]
    fn closed_forms_against_each_other() {
        let mut spec = RunSpec::from_scenario(scenario(""));
        spec.models = vec![ModelId::EffAttnCf, ModelId::IsrsGnCf];
        spec.reference = ModelId::IsrsGnCf;
        let r = run(&spec).unwrap();
        assert_eq!(r.models, vec![ModelId::IsrsGnCf, ModelId::EffAttnCf]);
        let s = r.summary_for(ModelId::EffAttnCf).unwrap();
        assert!(s.max_abs_deviation_db >= s.mean_abs_deviation_db && s.mean_abs_deviation_db >= 0.0);
        assert_eq!(s.samples, 5);
        assert!(r.failures.is_empty());
        let back = DeviationReport::from_json(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn failure_is_recorded_not_raised() {
        let mut spec = RunSpec::from_scenario(scenario(""));
        // far too few samples for the band
        spec.scenario.ssfm.oversampling = 1;
        spec.models = vec![ModelId::IsrsGnCf, ModelId::Ssfm];
        spec.reference = ModelId::IsrsGnCf;
        let r = run(&spec).unwrap();
        assert_eq!(r.failures.len(), 1);
        assert_eq!(r.failures[0].model, ModelId::Ssfm);
        assert!(r.points[0].result(ModelId::Ssfm).is_none());
        assert!(r.summary_for(ModelId::Ssfm).is_none());
    }

    #[test]
    fn sweep_axis_and_csv_layout() {
        let mut spec = RunSpec::from_scenario(scenario(""));
        spec.models = vec![ModelId::IsrsGnCf];
        spec.reference = ModelId::IsrsGnCf;
        spec.sweep = Some(vec![0.0, 6.0, 12.0]);
        let r = sweep_power_transfer(&spec).unwrap();
        let t: Vec<f64> = r.points.iter().map(|p| p.power_transfer_db.unwrap()).collect();
        assert!(t[0] < t[1] && t[1] < t[2], "{t:?}");
        assert_eq!(r.points[0].channels, vec![0, 2, 4]);
        let mut buf = Vec::new();
        r.write_eta_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("power_per_channel_dbm,power_transfer_db,model,"));
        assert_eq!(text.lines().count(), 1 + 9);
        let mut buf = Vec::new();
        r.write_deviation_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 1 + 9);
    }

    #[test]
    fn run_validates_its_spec() {
        let mut spec = RunSpec::from_scenario(scenario(""));
        spec.models.clear();
        assert!(matches!(run(&spec), Err(Error::Config { .. })));
        let mut spec = RunSpec::from_scenario(scenario(""));
        spec.channels = Some(vec![9]);
        assert!(matches!(run(&spec), Err(Error::Config { .. })));
        let spec = RunSpec::from_scenario(scenario(""));
        assert!(matches!(sweep_power_transfer(&spec), Err(Error::Config { .. })));
    }
}
