//! Physical configuration of the waveguide: geometry, branches, damping,
//! coupling, temperature, and the frequency grid used for sampling.
//!
//! Unit convention: every frequency, rate and coupling held by these types
//! is an *angular* quantity in rad/s. Conversion from ordinary frequencies
//! (`ω = 2πν`) happens at the IO boundary, never inside the numerics.
//! All types are immutable after construction and safe to share across
//! threads.

use alloc::string::String;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Non-fatal diagnostics collected during validation and construction.
///
/// Operations that can proceed under a questionable configuration (coarse
/// grid, snapped wavenumber, closed form outside its stated limit) push a
/// message here instead of failing.
#[derive(Debug, Clone, Default)]
pub struct Warnings {
    items: Vec<String>,
}

impl Warnings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, message: String) {
        self.items.push(message);
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.items.iter().map(|s| s.as_str())
    }
}

/// Cross-section radius and effective length of the waveguide \[m\].
#[derive(Debug, Clone, PartialEq)]
pub struct WaveguideGeometry {
    pub radius: f64,
    pub length: f64,
}

impl WaveguideGeometry {
    pub fn validate(&self, warnings: &mut Warnings) -> Result<()> {
        if !(self.radius > 0.0) {
            return Err(Error::InvalidParameter {
                name: "waveguide.radius",
                value: self.radius,
                constraint: "radius > 0",
            });
        }
        if !(self.length > 0.0) {
            return Err(Error::InvalidParameter {
                name: "waveguide.length",
                value: self.length,
                constraint: "length > 0",
            });
        }
        // The quantization k = 2πn/L assumes an extended structure.
        if self.length < 100.0 * self.radius {
            warnings.push(alloc::format!(
                "waveguide length {:e} m is less than 100 x radius {:e} m; the extended-waveguide model may not apply",
                self.length,
                self.radius
            ));
        }
        Ok(())
    }
}

/// Lowest guided photon branch: linear dispersion `ω_k = ω₀ + v_g k` with a
/// phenomenological damping rate γ.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonBranch {
    /// Transverse-confinement frequency ω₀ [rad/s].
    pub omega0: f64,
    /// Group velocity v_g of the linear zone [m/s].
    pub group_velocity: f64,
    /// Damping rate γ [rad/s].
    pub gamma: f64,
    /// Wavenumber beyond which the linear dispersion is no longer trusted
    /// [1/m]. `None` leaves the linear zone unbounded.
    pub k_cutoff: Option<f64>,
    /// Branch label μ. A single branch is modelled; the label is carried
    /// for identification in outputs only.
    pub label: String,
}

impl PhotonBranch {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega0 > 0.0) {
            return Err(Error::InvalidParameter {
                name: "photon.omega0",
                value: self.omega0,
                constraint: "omega0 > 0",
            });
        }
        if !(self.group_velocity > 0.0 && self.group_velocity < crate::constants::SPEED_OF_LIGHT) {
            return Err(Error::InvalidParameter {
                name: "photon.group_velocity",
                value: self.group_velocity,
                constraint: "0 < v_g < c",
            });
        }
        if !(self.gamma >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "photon.gamma",
                value: self.gamma,
                constraint: "gamma >= 0",
            });
        }
        if let Some(kc) = self.k_cutoff {
            if !(kc > 0.0) {
                return Err(Error::InvalidParameter {
                    name: "photon.k_cutoff",
                    value: kc,
                    constraint: "k_cutoff > 0",
                });
            }
        }
        Ok(())
    }
}

/// Dispersion family of a phonon branch.
#[derive(Debug, Clone, PartialEq)]
pub enum PhononKind {
    /// Acoustic branch, `Ω_q = v_a |q|`.
    Acoustic { sound_velocity: f64 },
    /// Dispersionless vibrational branch at Ω_v.
    Vibrational { omega_v: f64 },
}

/// One phonon branch α with damping Γ_α and photon–phonon coupling f_α.
///
/// The coupling is taken wavenumber-independent over the zone of interest,
/// so the symmetry `f_{k+q}^{-qα} = f_k^{qα}` holds identically.
#[derive(Debug, Clone, PartialEq)]
pub struct PhononBranch {
    pub kind: PhononKind,
    /// Damping rate Γ_α [rad/s].
    pub damping: f64,
    /// Coupling f_α [rad/s].
    pub coupling_f: f64,
    /// Branch label α (e.g. "a", "v").
    pub label: String,
}

impl PhononBranch {
    pub fn validate(&self) -> Result<()> {
        match self.kind {
            PhononKind::Acoustic { sound_velocity } => {
                if !(sound_velocity > 0.0) {
                    return Err(Error::InvalidParameter {
                        name: "phonon.sound_velocity",
                        value: sound_velocity,
                        constraint: "v_a > 0",
                    });
                }
            }
            PhononKind::Vibrational { omega_v } => {
                if !(omega_v > 0.0) {
                    return Err(Error::InvalidParameter {
                        name: "phonon.omega_v",
                        value: omega_v,
                        constraint: "Omega_v > 0",
                    });
                }
            }
        }
        if !(self.damping >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "phonon.damping",
                value: self.damping,
                constraint: "Gamma >= 0",
            });
        }
        if !(self.coupling_f >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "phonon.coupling_f",
                value: self.coupling_f,
                constraint: "f >= 0",
            });
        }
        Ok(())
    }
}

/// Complete physical parameterization: geometry, the photon branch, one or
/// more phonon branches, and the bath temperature.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveguideModel {
    pub geometry: WaveguideGeometry,
    pub photon: PhotonBranch,
    pub phonons: Vec<PhononBranch>,
    /// Phonon bath temperature \[K\].
    pub temperature: f64,
}

impl WaveguideModel {
    pub fn validate(&self, warnings: &mut Warnings) -> Result<()> {
        self.geometry.validate(warnings)?;
        self.photon.validate()?;
        if self.phonons.is_empty() {
            return Err(Error::InvalidParameter {
                name: "phonons",
                value: 0.0,
                constraint: "at least one phonon branch",
            });
        }
        for branch in &self.phonons {
            branch.validate()?;
        }
        if !(self.temperature >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "temperature",
                value: self.temperature,
                constraint: "T >= 0",
            });
        }
        Ok(())
    }

    /// Wavenumber spacing 2π/L of the discrete mode grid [1/m].
    pub fn mode_spacing(&self) -> f64 {
        crate::constants::TWO_PI / self.geometry.length
    }

    /// Smallest damping rate among the photon branch and all phonon
    /// branches [rad/s]; sets the finest linewidth a grid must resolve.
    pub fn min_damping(&self) -> f64 {
        let mut min = self.photon.gamma;
        for b in &self.phonons {
            if b.damping < min {
                min = b.damping;
            }
        }
        min
    }

    /// Typical silicon nanowire parameters: a = 250 nm, L = 1 cm,
    /// ω₀/2π = 1e14 Hz, v_g = c/5, γ/2π = 0.1 MHz, an acoustic branch
    /// (v_a = 8433 m/s, Γ_a/2π = 10 MHz) and a vibrational branch
    /// (Ω_v/2π = 10 GHz, Γ_v/2π = 1 MHz), both with f/2π = 1 MHz, at
    /// T = 4 K.
    pub fn default_silicon() -> Self {
        use crate::constants::{SPEED_OF_LIGHT, TWO_PI};
        WaveguideModel {
            geometry: WaveguideGeometry {
                radius: 250e-9,
                length: 1e-2,
            },
            photon: PhotonBranch {
                omega0: TWO_PI * 1e14,
                group_velocity: SPEED_OF_LIGHT / 5.0,
                gamma: TWO_PI * 0.1e6,
                k_cutoff: None,
                label: String::from("mu0"),
            },
            phonons: alloc::vec![
                PhononBranch {
                    kind: PhononKind::Acoustic {
                        sound_velocity: 8433.0,
                    },
                    damping: TWO_PI * 10e6,
                    coupling_f: TWO_PI * 1e6,
                    label: String::from("a"),
                },
                PhononBranch {
                    kind: PhononKind::Vibrational {
                        omega_v: TWO_PI * 1e10,
                    },
                    damping: TWO_PI * 1e6,
                    coupling_f: TWO_PI * 1e6,
                    label: String::from("v"),
                },
            ],
            temperature: 4.0,
        }
    }
}

/// Uniform frequency grid, symmetric about its center.
///
/// The point count is odd so the center is itself a sample, and sample
/// detunings come in exact floating-point ± pairs: `detuning(i)` is
/// computed as `(i − mid) · spacing`, so `detuning(n−1−i) == −detuning(i)`
/// bit for bit. Symmetry-sensitive checks rely on this.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    center: f64,
    half_width: f64,
    num_points: usize,
}

impl FrequencyGrid {
    /// `num_points` must be odd and at least 3; `half_width` positive.
    pub fn new(center: f64, half_width: f64, num_points: usize) -> Result<Self> {
        if num_points < 3 || num_points.is_multiple_of(2) {
            return Err(Error::InvalidParameter {
                name: "grid.num_points",
                value: num_points as f64,
                constraint: "odd and >= 3",
            });
        }
        if !(half_width > 0.0) {
            return Err(Error::InvalidParameter {
                name: "grid.half_width",
                value: half_width,
                constraint: "half_width > 0",
            });
        }
        Ok(Self {
            center,
            half_width,
            num_points,
        })
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.num_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Sample spacing [rad/s].
    pub fn spacing(&self) -> f64 {
        self.half_width / ((self.num_points / 2) as f64)
    }

    /// Index of the center sample.
    pub fn mid(&self) -> usize {
        self.num_points / 2
    }

    /// Signed offset of sample `i` from the center [rad/s].
    pub fn detuning(&self, i: usize) -> f64 {
        (i as f64 - self.mid() as f64) * self.spacing()
    }

    /// Absolute frequency of sample `i` [rad/s].
    pub fn omega(&self, i: usize) -> f64 {
        self.center + self.detuning(i)
    }

    pub fn detunings(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.num_points).map(|i| self.detuning(i))
    }

    pub fn omegas(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.num_points).map(|i| self.omega(i))
    }

    /// Warn unless the spacing resolves the narrowest damping rate with at
    /// least ten samples. Deliberately coarse grids are allowed through.
    pub fn check_resolution(&self, min_damping: f64, warnings: &mut Warnings) {
        if min_damping > 0.0 && self.spacing() > min_damping / 10.0 {
            warnings.push(alloc::format!(
                "frequency grid spacing {:e} rad/s exceeds min damping/10 = {:e} rad/s; narrow lines will be under-resolved",
                self.spacing(),
                min_damping / 10.0
            ));
        }
    }
}
