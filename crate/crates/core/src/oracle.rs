//! Independent time-domain validation of the closed-form self-energies.
//!
//! The factorized equations of motion close into a linear system per
//! subject mode: the retarded amplitude `G(t)` (photon) or `D(t)`
//! (phonon) coupled to one auxiliary amplitude per scattering channel
//! (`P₁`, `P₂` per phonon mode and branch for the photon; `P₃` per photon
//! mode for the phonon). This module integrates that system with a
//! fixed-step classical Runge–Kutta scheme and Fourier-transforms the
//! trajectory, `S(ω) = −2 Im ∫₀^∞ dt e^{iωt} G(t)`, giving a route to the
//! spectral function that shares no code with the frequency-domain
//! channel sums: the state-space coefficients are taken straight from the
//! equations of motion, before any Stokes/anti-Stokes regrouping.
//!
//! Everything is integrated in a frame rotating at the subject mode's
//! bare frequency; optical-scale oscillations (~10¹⁴ Hz) never appear.
//! The delta source at `t = 0` fixes the initial condition `G(0⁺) = −i`
//! with all auxiliary amplitudes zero.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::dispersion::ModeGrid;
use crate::model::{FrequencyGrid, PhononKind, WaveguideModel, Warnings};
use crate::occupation::OccupationState;
use crate::spectral::{CurveKind, SpectralCurve, Subject};
use crate::{Error, Result};

/// One auxiliary amplitude of the factorized hierarchy, written in the
/// rotating frame: `i dP/dt = (detuning − i·half_width) P + source·G`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleChannel {
    /// Rotating-frame resonance offset [rad/s].
    pub detuning: f64,
    /// Decay rate of the amplitude [rad/s].
    pub half_width: f64,
    /// Coefficient of `G` in the `P` equation: `f × occupation factor`.
    pub source: f64,
    /// Coefficient of `P` in the `G` equation: the coupling `f`.
    pub coupling: f64,
}

/// The closed linear system for one subject mode.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleSystem {
    /// Absolute frequency of the rotating frame [rad/s].
    pub reference: f64,
    /// Subject amplitude decay rate (γ/2 or Γ/2) [rad/s].
    pub subject_half_damping: f64,
    pub channels: Vec<OracleChannel>,
    subject: Subject,
    /// True when every channel source weight is non-negative, in which
    /// case `|G| ≤ 1` must hold and growth signals integrator failure.
    gain_free: bool,
}

impl OracleSystem {
    /// Photon system at mode `k_index`: per phonon mode `q` in the window
    /// and branch α, the `P₁` amplitude (detuning `v_g q − Ω_{qα}`, source
    /// weight `n_{qα} − N_{k+q}`) and the `P₂` amplitude (detuning
    /// `v_g q + Ω_{qα}`, source weight `1 + n_{qα} + N_{k+q}`), both
    /// decaying at `(γ + Γ_α)/2`. The acoustic `q = 0` mode is excluded.
    pub fn photon(
        k_index: i64,
        occ: &OccupationState,
        model: &WaveguideModel,
        modes: &ModeGrid,
    ) -> Result<Self> {
        let k = modes.wavenumber(k_index);
        model.photon.check_cutoff(k)?;
        let vg = model.photon.group_velocity;
        let gamma = model.photon.gamma;
        let mut channels = Vec::new();
        for q_n in modes.indices() {
            let q = modes.wavenumber(q_n);
            model.photon.check_cutoff(modes.wavenumber(k_index + q_n))?;
            let n_partner = occ.photon_occupation(k_index + q_n);
            for branch in &model.phonons {
                if matches!(branch.kind, PhononKind::Acoustic { .. }) && q_n == 0 {
                    continue;
                }
                let omega_q = branch.omega(q);
                let n_q = occ.phonon_occupation(branch, q);
                let f = branch.coupling_f;
                let hw = 0.5 * (gamma + branch.damping);
                // P1: phonon-absorption amplitude
                channels.push(OracleChannel {
                    detuning: vg * q - omega_q,
                    half_width: hw,
                    source: f * (n_q - n_partner),
                    coupling: f,
                });
                // P2: phonon-emission amplitude
                channels.push(OracleChannel {
                    detuning: vg * q + omega_q,
                    half_width: hw,
                    source: f * (1.0 + n_q + n_partner),
                    coupling: f,
                });
            }
        }
        let gain_free = channels.iter().all(|c| c.source * c.coupling >= 0.0);
        Ok(Self {
            reference: model.photon.omega(k),
            subject_half_damping: 0.5 * gamma,
            channels,
            subject: Subject::Photon { k_index },
            gain_free,
        })
    }

    /// Phonon system at mode `(q_index, branch)`: one `P₃` amplitude per
    /// photon mode `k` in `k_window` with nonzero occupation numerator
    /// `N_{k−q} − N_k`, detuned by `v_g q − Ω_{qα}` and decaying at γ.
    pub fn phonon(
        q_index: i64,
        branch_idx: usize,
        occ: &OccupationState,
        model: &WaveguideModel,
        k_window: &ModeGrid,
    ) -> Result<Self> {
        let branch = model.phonons.get(branch_idx).ok_or(Error::InvalidParameter {
            name: "branch",
            value: branch_idx as f64,
            constraint: "valid phonon branch index",
        })?;
        let q = k_window.wavenumber(q_index);
        let omega_q = branch.omega(q);
        let vg = model.photon.group_velocity;
        let gamma = model.photon.gamma;
        let f = branch.coupling_f;

        let mut k_candidates: Vec<i64> = Vec::new();
        for (p, _) in occ.pumped_modes() {
            for k in [p, p + q_index] {
                if k_window.contains(k) && !k_candidates.contains(&k) {
                    k_candidates.push(k);
                }
            }
        }
        k_candidates.sort_unstable();

        let mut channels = Vec::new();
        for k in k_candidates {
            let weight = occ.photon_occupation(k - q_index) - occ.photon_occupation(k);
            if weight == 0.0 {
                continue;
            }
            model.photon.check_cutoff(k_window.wavenumber(k))?;
            model.photon.check_cutoff(k_window.wavenumber(k - q_index))?;
            channels.push(OracleChannel {
                detuning: vg * q - omega_q,
                half_width: gamma,
                source: f * weight,
                coupling: f,
            });
        }
        let gain_free = channels.iter().all(|c| c.source * c.coupling >= 0.0);
        Ok(Self {
            reference: omega_q,
            subject_half_damping: 0.5 * branch.damping,
            channels,
            subject: Subject::Phonon {
                q_index,
                branch: branch_idx,
            },
            gain_free,
        })
    }

    /// Largest rotating-frame rate in the system: the maximum channel
    /// detuning plus a bound on the coupling-induced splitting.
    pub fn max_rate(&self) -> f64 {
        let det = self
            .channels
            .iter()
            .fold(0.0_f64, |m, c| m.max(c.detuning.abs() + c.half_width));
        let coupling_norm: f64 = self
            .channels
            .iter()
            .map(|c| (c.source * c.coupling).abs())
            .sum();
        det + 2.0 * crate::math::sqrt(coupling_norm) + self.subject_half_damping
    }

    /// Integration step obeying `dt ≤ 1/(50 × max rotating-frame rate)`.
    pub fn suggested_dt(&self) -> f64 {
        1.0 / (50.0 * self.max_rate().max(f64::MIN_POSITIVE))
    }

    /// Horizon long enough for the trajectory to decay below 1e-6 of its
    /// initial amplitude through the slowest bare decay in the system.
    pub fn suggested_t_max(&self) -> f64 {
        let mut min_decay = self.subject_half_damping;
        for c in &self.channels {
            min_decay = min_decay.min(c.half_width);
        }
        15.0 / min_decay.max(f64::MIN_POSITIVE)
    }
}

/// Uniformly sampled retarded amplitude in the rotating frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Rotating-frame frequency; add to detunings for absolute ω.
    pub reference: f64,
    pub dt: f64,
    /// `G(j·dt)` (rotating frame), starting at `G(0⁺) = −i`.
    pub samples: Vec<Complex64>,
    /// Largest rotating-frame rate of the generating system [rad/s];
    /// used to pick a safe transform stride.
    pub max_rate: f64,
    subject: Subject,
}

/// Integrate the closed system with classical fixed-step RK4.
///
/// Fails with [`Error::Instability`] if `|G|` grows beyond the gain-free
/// bound in a configuration with no gain channel.
pub fn evolve(system: &OracleSystem, t_max: f64, dt: f64) -> Result<Trajectory> {
    if !(dt > 0.0 && t_max > dt) {
        return Err(Error::InvalidParameter {
            name: "dt",
            value: dt,
            constraint: "0 < dt < t_max",
        });
    }
    let m = system.channels.len();
    // i dG/dt = −i(γ/2) G + Σ f P  →  dG/dt = −(γ/2) G − i Σ f P
    // i dP/dt = (detuning − i·hw) P + s G  →  dP/dt = −(i·det + hw) P − i s G
    let g_decay = -system.subject_half_damping;
    let p_coeff: Vec<Complex64> = system
        .channels
        .iter()
        .map(|c| Complex64::new(-c.half_width, -c.detuning))
        .collect();

    let steps = (t_max / dt) as usize;
    let mut g = Complex64::new(0.0, -1.0);
    let mut p = alloc::vec![Complex64::new(0.0, 0.0); m];
    let mut traj = Vec::with_capacity(steps + 1);
    traj.push(g);

    // RK4 stage buffers
    let mut kp = [
        alloc::vec![Complex64::new(0.0, 0.0); m],
        alloc::vec![Complex64::new(0.0, 0.0); m],
        alloc::vec![Complex64::new(0.0, 0.0); m],
        alloc::vec![Complex64::new(0.0, 0.0); m],
    ];
    let mut kg = [Complex64::new(0.0, 0.0); 4];
    let mut p_stage = alloc::vec![Complex64::new(0.0, 0.0); m];

    let deriv_g = |g: Complex64, p: &[Complex64], sys: &OracleSystem| {
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, &pi) in sys.channels.iter().zip(p) {
            acc += c.coupling * pi;
        }
        g_decay * g - Complex64::i() * acc
    };

    for step in 0..steps {
        for stage in 0..4 {
            let (g_in, factor) = match stage {
                0 => (g, 0.0),
                1 => (g + 0.5 * dt * kg[0], 0.5),
                2 => (g + 0.5 * dt * kg[1], 0.5),
                _ => (g + dt * kg[2], 1.0),
            };
            if stage == 0 {
                p_stage.copy_from_slice(&p);
            } else {
                let prev = stage - 1;
                for i in 0..m {
                    p_stage[i] = p[i] + factor * dt * kp[prev][i];
                }
            }
            kg[stage] = deriv_g(g_in, &p_stage, system);
            for i in 0..m {
                let c = &system.channels[i];
                kp[stage][i] =
                    p_coeff[i] * p_stage[i] - Complex64::i() * (c.source * g_in);
            }
        }
        g += dt / 6.0 * (kg[0] + 2.0 * kg[1] + 2.0 * kg[2] + kg[3]);
        for i in 0..m {
            p[i] += dt / 6.0 * (kp[0][i] + 2.0 * kp[1][i] + 2.0 * kp[2][i] + kp[3][i]);
        }
        traj.push(g);
        if system.gain_free && g.norm_sqr() > 1.0 + 1e-3 {
            return Err(Error::Instability {
                time: (step + 1) as f64 * dt,
                magnitude: crate::math::sqrt(g.norm_sqr()),
            });
        }
    }

    Ok(Trajectory {
        reference: system.reference,
        dt,
        samples: traj,
        max_rate: system.max_rate(),
        subject: system.subject,
    })
}

/// Photon retarded amplitude at mode `k_index`, sampled over `[0, t_max]`.
pub fn evolve_photon_gf(
    k_index: i64,
    occ: &OccupationState,
    model: &WaveguideModel,
    modes: &ModeGrid,
    t_max: f64,
    dt: f64,
) -> Result<Trajectory> {
    evolve(&OracleSystem::photon(k_index, occ, model, modes)?, t_max, dt)
}

/// Phonon retarded amplitude at mode `(q_index, branch)`.
pub fn evolve_phonon_gf(
    q_index: i64,
    branch_idx: usize,
    occ: &OccupationState,
    model: &WaveguideModel,
    k_window: &ModeGrid,
    t_max: f64,
    dt: f64,
) -> Result<Trajectory> {
    evolve(
        &OracleSystem::phonon(q_index, branch_idx, occ, model, k_window)?,
        t_max,
        dt,
    )
}

/// Fourier-transform a trajectory to the spectral function on `grid`:
/// `S(ω) = −2 Im ∫₀^{t_max} dt e^{i(ω−ref)t} G(t)`, composite Simpson.
///
/// The trajectory is downsampled to roughly 12 samples per period of the
/// fastest beat (grid edge detuning plus system content) when the
/// integration step oversampled it. Warns when the trajectory has not
/// decayed to 1e-6 of its initial amplitude, which biases the window.
pub fn transform_to_sf(
    traj: &Trajectory,
    grid: &FrequencyGrid,
    warnings: &mut Warnings,
) -> SpectralCurve {
    let last = traj.samples[traj.samples.len() - 1].norm_sqr();
    if last > 1e-12 {
        warnings.push(alloc::format!(
            "trajectory amplitude {:e} at t_max has not decayed to 1e-6; windowing bias likely",
            crate::math::sqrt(last)
        ));
    }

    let shift = grid.center() - traj.reference;
    let fastest =
        shift.abs() + grid.half_width() + traj.max_rate;
    let target = core::f64::consts::PI / (6.0 * fastest.max(f64::MIN_POSITIVE));
    let stride = (target / traj.dt).max(1.0) as usize;
    let mut count = (traj.samples.len() - 1) / stride + 1;
    if count.is_multiple_of(2) {
        count -= 1; // Simpson needs an odd sample count
    }
    let dt = traj.dt * stride as f64;

    let mut samples = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let dw = shift + grid.detuning(i);
        // e^{i dw t} marched by complex rotation
        let rot = Complex64::new(crate::math::cos(dw * dt), crate::math::sin(dw * dt));
        let mut phase = Complex64::new(1.0, 0.0);
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..count {
            let w = if j == 0 || j == count - 1 {
                1.0
            } else if j % 2 == 1 {
                4.0
            } else {
                2.0
            };
            acc += w * phase * traj.samples[j * stride];
            phase *= rot;
        }
        let gw = acc * (dt / 3.0);
        samples.push(-2.0 * gw.im);
    }
    SpectralCurve {
        grid: grid.clone(),
        samples,
        subject: traj.subject,
        kind: CurveKind::Dressed,
        gain_regions: Vec::new(),
    }
}
