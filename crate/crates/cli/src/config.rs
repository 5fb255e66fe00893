//! The run-configuration document: a JSON tree with sections `waveguide`,
//! `photon`, `phonons`, `scenario`, `grid`, `output`.
//!
//! Every frequency in the document is an ordinary frequency in Hz
//! (suffix `_hz`), converted to angular rad/s (`ω = 2πν`) exactly once on
//! entry. Lengths carry `_m`, velocities `_mps`, temperatures `_k`;
//! wavenumbers are given as the dimensionless `k·a`. Documents round-trip
//! bit-exactly through serialization, and a model parsed from a document
//! is a fixed point of render-then-parse.

use serde::{Deserialize, Serialize};

use wgspec_core::constants::TWO_PI;
use wgspec_core::model::{
    PhononBranch, PhononKind, PhotonBranch, WaveguideGeometry, WaveguideModel,
};
use wgspec_core::Warnings;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDoc {
    pub waveguide: WaveguideSection,
    pub photon: PhotonSection,
    pub phonons: Vec<PhononSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<ScenarioSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveguideSection {
    pub radius_m: f64,
    pub length_m: f64,
    pub temperature_k: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhotonSection {
    pub omega0_hz: f64,
    pub group_velocity_mps: f64,
    pub gamma_hz: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_cutoff_per_m: Option<f64>,
    #[serde(default = "default_photon_label")]
    pub branch_id: String,
}

fn default_photon_label() -> String {
    "mu0".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum PhononSection {
    #[serde(rename = "acoustic")]
    Acoustic {
        velocity_mps: f64,
        #[serde(rename = "Gamma_hz")]
        damping_hz: f64,
        f_hz: f64,
        branch_id: String,
    },
    #[serde(rename = "vibrational")]
    Vibrational {
        omega_v_hz: f64,
        #[serde(rename = "Gamma_hz")]
        damping_hz: f64,
        f_hz: f64,
        branch_id: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", deny_unknown_fields)]
pub enum ScenarioSection {
    #[serde(rename = "empty")]
    Empty {
        /// Probe photon wavenumber, dimensionless k·a.
        #[serde(default = "default_ka")]
        k_a: f64,
    },
    #[serde(rename = "single_field")]
    SingleField {
        k0_a: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n0: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        power_w: Option<f64>,
    },
    #[serde(rename = "two_fields")]
    TwoFields { k1_a: f64, n1: f64, k2_a: f64, n2: f64 },
    #[serde(rename = "custom")]
    Custom { modes: Vec<CustomMode> },
}

fn default_ka() -> f64 {
    2.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomMode {
    pub k_a: f64,
    pub n: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center_hz: Option<f64>,
    pub halfwidth_hz: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
}

impl ConfigDoc {
    /// Built-in silicon nanowire defaults, identical to
    /// [`WaveguideModel::default_silicon`].
    pub fn default_silicon() -> Self {
        ConfigDoc {
            waveguide: WaveguideSection {
                radius_m: 250e-9,
                length_m: 1e-2,
                temperature_k: 4.0,
            },
            photon: PhotonSection {
                omega0_hz: 1e14,
                group_velocity_mps: wgspec_core::constants::SPEED_OF_LIGHT / 5.0,
                gamma_hz: 0.1e6,
                k_cutoff_per_m: None,
                branch_id: "mu0".into(),
            },
            phonons: vec![
                PhononSection::Acoustic {
                    velocity_mps: 8433.0,
                    damping_hz: 10e6,
                    f_hz: 1e6,
                    branch_id: "a".into(),
                },
                PhononSection::Vibrational {
                    omega_v_hz: 1e10,
                    damping_hz: 1e6,
                    f_hz: 1e6,
                    branch_id: "v".into(),
                },
            ],
            scenario: None,
            grid: None,
            output: None,
        }
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        Ok(serde_json::from_str(text)?)
    }

    #[cfg_attr(not(test), allow(dead_code))]
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn load(path: &std::path::Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    /// Convert to the angular-frequency model, aggregating validation
    /// problems. All `_hz` entries are multiplied by 2π here and nowhere
    /// else.
    pub fn to_model(&self, warnings: &mut Warnings) -> CliResult<WaveguideModel> {
        let model = WaveguideModel {
            geometry: WaveguideGeometry {
                radius: self.waveguide.radius_m,
                length: self.waveguide.length_m,
            },
            photon: PhotonBranch {
                omega0: TWO_PI * self.photon.omega0_hz,
                group_velocity: self.photon.group_velocity_mps,
                gamma: TWO_PI * self.photon.gamma_hz,
                k_cutoff: self.photon.k_cutoff_per_m,
                label: self.photon.branch_id.clone(),
            },
            phonons: self
                .phonons
                .iter()
                .map(|p| match p {
                    PhononSection::Acoustic {
                        velocity_mps,
                        damping_hz,
                        f_hz,
                        branch_id,
                    } => PhononBranch {
                        kind: PhononKind::Acoustic {
                            sound_velocity: *velocity_mps,
                        },
                        damping: TWO_PI * damping_hz,
                        coupling_f: TWO_PI * f_hz,
                        label: branch_id.clone(),
                    },
                    PhononSection::Vibrational {
                        omega_v_hz,
                        damping_hz,
                        f_hz,
                        branch_id,
                    } => PhononBranch {
                        kind: PhononKind::Vibrational {
                            omega_v: TWO_PI * omega_v_hz,
                        },
                        damping: TWO_PI * damping_hz,
                        coupling_f: TWO_PI * f_hz,
                        label: branch_id.clone(),
                    },
                })
                .collect(),
            temperature: self.waveguide.temperature_k,
        };
        model.validate(warnings)?;
        Ok(model)
    }

    /// Render a model back into a document (angular → Hz). Any model that
    /// came from a document is a fixed point of this render-then-parse
    /// pair.
    #[cfg_attr(not(test), allow(dead_code))]
    pub fn from_model(model: &WaveguideModel) -> Self {
        ConfigDoc {
            waveguide: WaveguideSection {
                radius_m: model.geometry.radius,
                length_m: model.geometry.length,
                temperature_k: model.temperature,
            },
            photon: PhotonSection {
                omega0_hz: model.photon.omega0 / TWO_PI,
                group_velocity_mps: model.photon.group_velocity,
                gamma_hz: model.photon.gamma / TWO_PI,
                k_cutoff_per_m: model.photon.k_cutoff,
                branch_id: model.photon.label.clone(),
            },
            phonons: model
                .phonons
                .iter()
                .map(|b| match b.kind {
                    PhononKind::Acoustic { sound_velocity } => PhononSection::Acoustic {
                        velocity_mps: sound_velocity,
                        damping_hz: b.damping / TWO_PI,
                        f_hz: b.coupling_f / TWO_PI,
                        branch_id: b.label.clone(),
                    },
                    PhononKind::Vibrational { omega_v } => PhononSection::Vibrational {
                        omega_v_hz: omega_v / TWO_PI,
                        damping_hz: b.damping / TWO_PI,
                        f_hz: b.coupling_f / TWO_PI,
                        branch_id: b.label.clone(),
                    },
                })
                .collect(),
            scenario: None,
            grid: None,
            output: None,
        }
    }

}

/// Resolve a single-field pump to a photon number: exactly one of `n0`
/// and `power_w` must be given. Power converts through the photon flux
/// `P/ħω₀` times the transit time `L/v_g`, with the carrier frequency ω₀
/// standing in for the photon energy (the `v_g k` offset is a sub-percent
/// correction at optical carriers).
pub fn resolve_pump(n0: Option<f64>, power_w: Option<f64>, config: &ConfigDoc) -> CliResult<f64> {
    match (n0, power_w) {
        (Some(n), None) => Ok(n),
        (None, Some(p)) => Ok(wgspec_core::occupation::photons_from_power(
            p,
            TWO_PI * config.photon.omega0_hz,
            config.waveguide.length_m,
            config.photon.group_velocity_mps,
        )?),
        (None, None) => Err(CliError::Validation(
            "single_field needs one of n0 or power_w".into(),
        )),
        (Some(_), Some(_)) => Err(CliError::Validation(
            "single_field takes n0 or power_w, not both".into(),
        )),
    }
}
