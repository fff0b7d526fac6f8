//! JSON scenario files. Every numeric key carries its unit in the name; the
//! file is converted to SI types once, at load time. Schema: docs/scenario.md.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fiber::FiberParams;
use crate::link::{GainPolicy, LinkConfig};
use crate::nli::ModelId;
use crate::options::ModelOptions;
use crate::plan::{Channel, ChannelPlan};
use crate::ssfm::{SsfmConfig, SsfmParams};
use crate::units;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiberSpec {
    pub alpha_db_per_km: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_bar_db_per_km: Option<f64>,
    pub gamma_per_w_per_km: f64,
    pub dispersion_ps_per_nm_km: f64,
    pub slope_ps_per_nm2_km: f64,
    pub cr_per_w_per_km_per_thz: f64,
    pub ref_wavelength_nm: f64,
}

impl FiberSpec {
    pub fn build(&self) -> Result<FiberParams> {
        let fp = FiberParams::from_engineering(
            self.alpha_db_per_km,
            self.gamma_per_w_per_km,
            self.dispersion_ps_per_nm_km,
            self.slope_ps_per_nm2_km,
            self.cr_per_w_per_km_per_thz,
            self.ref_wavelength_nm,
        )?;
        match self.alpha_bar_db_per_km {
            Some(a) => fp.with_alpha_bar(units::db_per_km_to_np_per_m(a)),
            None => Ok(fp),
        }
    }
}

/// Evenly spaced channels of equal rate and power.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub count: usize,
    pub symbol_rate_gbaud: f64,
    /// Defaults to the symbol rate (Nyquist spacing).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spacing_ghz: Option<f64>,
    pub power_per_channel_dbm: f64,
    #[serde(default)]
    pub center_offset_thz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    pub frequency_offset_thz: f64,
    pub bandwidth_ghz: f64,
    pub power_dbm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PlanSpec {
    Grid(GridSpec),
    Channels(Vec<ChannelSpec>),
}

impl PlanSpec {
    pub fn build(&self) -> Result<ChannelPlan> {
        match self {
            PlanSpec::Grid(g) => {
                let baud = g.symbol_rate_gbaud * 1e9;
                let spacing = g.spacing_ghz.map_or(baud, |s| s * 1e9);
                let mid = (g.count as f64 - 1.0) / 2.0;
                let power = units::dbm_to_w(g.power_per_channel_dbm);
                ChannelPlan::new(
                    (0..g.count)
                        .map(|k| Channel {
                            frequency: g.center_offset_thz * 1e12 + (k as f64 - mid) * spacing,
                            bandwidth: baud,
                            power,
                        })
                        .collect(),
                )
            }
            PlanSpec::Channels(list) => ChannelPlan::new(
                list.iter()
                    .map(|c| Channel {
                        frequency: c.frequency_offset_thz * 1e12,
                        bandwidth: c.bandwidth_ghz * 1e9,
                        power: units::dbm_to_w(c.power_dbm),
                    })
                    .collect(),
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpanSpec {
    pub length_km: f64,
    /// Per-channel launch powers; given for all spans or none.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub launch_powers_dbm: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_spans: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub span_length_km: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spans: Option<Vec<SpanSpec>>,
    #[serde(default = "default_policy")]
    pub gain_policy: GainPolicy,
}

fn default_policy() -> GainPolicy {
    GainPolicy::IdealEqualization
}

impl LinkSpec {
    pub fn build(&self, fiber: &FiberParams, plan: &ChannelPlan) -> Result<LinkConfig> {
        let cfg = |message: &str| Error::Config { path: "link".into(), message: message.into() };
        match (&self.spans, self.n_spans, self.span_length_km) {
            (None, Some(n), Some(l)) => {
                if self.gain_policy == GainPolicy::Custom {
                    return Err(cfg("custom gain policy needs `spans` with launch powers"));
                }
                LinkConfig::uniform(n, l * 1e3, fiber.clone(), plan, self.gain_policy)
            }
            (Some(spans), None, None) => {
                let custom = spans.iter().filter(|s| s.launch_powers_dbm.is_some()).count();
                if custom == 0 {
                    if self.gain_policy == GainPolicy::Custom {
                        return Err(cfg("custom gain policy needs launch powers on every span"));
                    }
                    let sections = spans.iter().map(|s| (s.length_km * 1e3, fiber.clone())).collect();
                    LinkConfig::new(sections, plan, self.gain_policy)
                } else if custom == spans.len() {
                    let sections = spans
                        .iter()
                        .map(|s| {
                            let p = s.launch_powers_dbm.as_deref().unwrap_or_default();
                            (s.length_km * 1e3, fiber.clone(), p.iter().map(|&x| units::dbm_to_w(x)).collect())
                        })
                        .collect();
                    LinkConfig::custom(sections, plan)
                } else {
                    Err(cfg("launch powers must be given for every span or for none"))
                }
            }
            _ => Err(cfg("give either `n_spans` with `span_length_km`, or `spans`")),
        }
    }
}

/// Numerical options with unit-suffixed keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptionsSpec {
    pub epsilon: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
    pub z_step_m: f64,
    pub ode_tol: f64,
    pub photon_ratio: bool,
    pub coherence_periods: f64,
}

impl Default for OptionsSpec {
    fn default() -> Self {
        ModelOptions::default().into()
    }
}

impl From<ModelOptions> for OptionsSpec {
    fn from(o: ModelOptions) -> Self {
        OptionsSpec {
            epsilon: o.epsilon,
            rel_tol: o.rel_tol,
            max_intervals: o.max_intervals,
            z_step_m: o.z_step,
            ode_tol: o.ode_tol,
            photon_ratio: o.photon_ratio,
            coherence_periods: o.coherence_periods,
        }
    }
}

impl OptionsSpec {
    pub fn build(&self) -> ModelOptions {
        ModelOptions {
            epsilon: self.epsilon,
            rel_tol: self.rel_tol,
            max_intervals: self.max_intervals,
            z_step: self.z_step_m,
            ode_tol: self.ode_tol,
            photon_ratio: self.photon_ratio,
            coherence_periods: self.coherence_periods,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SsfmSpec {
    pub symbols: usize,
    pub oversampling: usize,
    pub realizations: usize,
    pub seed: u64,
    pub max_step_m: f64,
    pub phase_per_step_rad: f64,
    pub max_phase_rad: f64,
    pub guard: f64,
}

impl Default for SsfmSpec {
    fn default() -> Self {
        let p = SsfmParams::default();
        SsfmSpec {
            symbols: p.symbols,
            oversampling: p.oversampling,
            realizations: p.realizations,
            seed: p.seed,
            max_step_m: p.max_step,
            phase_per_step_rad: p.phase_per_step,
            max_phase_rad: p.max_phase,
            guard: p.guard,
        }
    }
}

impl SsfmSpec {
    pub fn build(&self) -> SsfmParams {
        SsfmParams {
            symbols: self.symbols,
            oversampling: self.oversampling,
            realizations: self.realizations,
            seed: self.seed,
            max_step: self.max_step_m,
            phase_per_step: self.phase_per_step_rad,
            max_phase: self.max_phase_rad,
            guard: self.guard,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub power_per_channel_dbm: Vec<f64>,
}

/// Reference numbers a long-running scenario is expected to reproduce.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expected {
    pub note: String,
    pub model: ModelId,
    pub versus: ModelId,
    pub max_abs_deviation_db: f64,
}

/// The file as written on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default)]
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub fiber: FiberSpec,
    pub plan: PlanSpec,
    pub link: LinkSpec,
    #[serde(default)]
    pub options: OptionsSpec,
    #[serde(default)]
    pub ssfm: SsfmSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub models: Option<Vec<ModelId>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_model: Option<ModelId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe_channels: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<Expected>,
}

/// A validated scenario in SI units.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub fiber: FiberParams,
    pub plan: ChannelPlan,
    pub link: LinkConfig,
    pub options: ModelOptions,
    pub ssfm: SsfmParams,
    pub models: Vec<ModelId>,
    pub reference: ModelId,
    pub probe_channels: Option<Vec<usize>>,
    /// Launch powers per channel (dBm) of a power sweep.
    pub sweep: Option<Vec<f64>>,
    pub expected: Option<Expected>,
    link_spec: LinkSpec,
}

fn at(path: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::Config { .. } => e,
        other => Error::Config { path: path.into(), message: other.to_string() },
    }
}

impl Scenario {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let file: ScenarioFile = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::Config { path, message: e.into_inner().to_string() }
        })?;
        Self::from_file(file)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_json_str(&text)
    }

    pub fn from_file(file: ScenarioFile) -> Result<Self> {
        let fiber = file.fiber.build().map_err(at("fiber"))?;
        let plan = file.plan.build().map_err(at("plan"))?;
        let link = file.link.build(&fiber, &plan).map_err(at("link"))?;
        let options = file.options.build();
        options.validate().map_err(at("options"))?;
        let ssfm = file.ssfm.build();
        let models = file.models.unwrap_or_else(|| vec![ModelId::IsrsGnGeneral]);
        if models.is_empty() {
            return Err(Error::Config { path: "models".into(), message: "select at least one model".into() });
        }
        if let Some(probe) = &file.probe_channels {
            if let Some(&bad) = probe.iter().find(|&&c| c >= plan.len()) {
                return Err(Error::Config {
                    path: "probe_channels".into(),
                    message: format!("channel {bad} out of range for {} channels", plan.len()),
                });
            }
        }
        let sweep = file.sweep.map(|s| s.power_per_channel_dbm);
        if let Some(s) = &sweep {
            if s.is_empty() || s.iter().any(|x| !x.is_finite()) {
                return Err(Error::Config {
                    path: "sweep.power_per_channel_dbm".into(),
                    message: "sweep needs at least one finite launch power".into(),
                });
            }
        }
        Ok(Scenario {
            name: file.name,
            fiber,
            plan,
            link,
            options,
            ssfm,
            models,
            reference: file.reference_model.unwrap_or(ModelId::IsrsGnGeneral),
            probe_channels: file.probe_channels,
            sweep,
            expected: file.expected,
            link_spec: file.link,
        })
    }

    /// Plan and link with every channel launched at `dbm`, rebuilt through
    /// the scenario's gain policy.
    pub fn at_power(&self, dbm: f64) -> Result<(ChannelPlan, LinkConfig)> {
        let plan = self.plan.with_uniform_power(units::dbm_to_w(dbm))?;
        if self.link.policy() == GainPolicy::Custom {
            return Err(Error::Config {
                path: "link".into(),
                message: "a power sweep cannot rescale custom launch spectra".into(),
            });
        }
        let link = self.link_spec.build(&self.fiber, &plan)?;
        Ok((plan, link))
    }

    pub fn ssfm_config(&self) -> SsfmConfig {
        SsfmConfig {
            plan: self.plan.clone(),
            link: self.link.clone(),
            params: self.ssfm.clone(),
            opts: self.options.clone(),
        }
    }
}
