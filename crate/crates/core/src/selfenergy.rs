//! Mean-field self-energies `M(ω) = Δ(ω) − iΛ(ω)/2` for photon and phonon
//! modes.
//!
//! Every self-energy here is a finite sum of complex-pole channels
//! `w / (ω − c + iη)`: one Stokes (phonon emission, weight `1+n`) and one
//! anti-Stokes (absorption, weight `n`) channel per thermal phonon mode for
//! the photon, pump-weighted Stokes/anti-Stokes pairs for the
//! photon–photon (EM) part, and one photon-exchange channel per scattering
//! pair for the phonon. Damping enters exclusively through the replacement
//! `ω_k → ω_k − iγ/2`, `Ω_q → Ω_q − iΓ/2` applied to the resonance
//! denominators, which puts the channel half-width at `(Γ_α + γ)/2` for
//! photon channels and `(γ_k + γ_{k−q})/2 = γ` for phonon channels.
//!
//! Channel centers are stored as offsets from a reference frequency (the
//! subject mode's bare line), computed from dispersion *differences*
//! (`ω_{k+q} − ω_k = v_g q`), never as differences of absolute optical
//! frequencies. This keeps detuning arithmetic exact in floating point,
//! which the symmetry guarantees below depend on.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::dispersion::ModeGrid;
use crate::model::{FrequencyGrid, PhononKind, WaveguideModel, Warnings};
use crate::occupation::OccupationState;
use crate::{Error, Result};

/// Scattering character of a channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScatterKind {
    /// Phonon emission; thermal weight `1 + n`.
    Stokes,
    /// Phonon absorption; thermal weight `n`.
    AntiStokes,
    /// Photon-exchange channel of the phonon self-energy (weight
    /// `N_{k−q} − N_k`, no Stokes/anti-Stokes split).
    Exchange,
}

impl ScatterKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ScatterKind::Stokes => "stokes",
            ScatterKind::AntiStokes => "anti-stokes",
            ScatterKind::Exchange => "exchange",
        }
    }
}

/// One complex-pole channel `weight / (δ − offset + i·half_width)`, where
/// δ is the detuning from the set's reference frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Channel {
    /// Summed mode index: phonon mode `q` for photon self-energies, photon
    /// mode `k` for the phonon self-energy.
    pub mode: i64,
    /// Phonon branch index into `WaveguideModel::phonons`.
    pub branch: usize,
    pub kind: ScatterKind,
    /// Pole residue `f² × occupation weight` [rad²/s²]; may be negative
    /// for EM and exchange channels.
    pub weight: f64,
    /// Channel center minus the reference frequency [rad/s].
    pub offset: f64,
    /// Lorentzian half-width η [rad/s].
    pub half_width: f64,
}

impl Channel {
    /// Frequency shift contribution at detuning `d` from the reference.
    #[inline]
    pub fn delta_at(&self, d: f64) -> f64 {
        let x = d - self.offset;
        self.weight * x / (x * x + self.half_width * self.half_width)
    }

    /// Effective damping contribution at detuning `d`.
    #[inline]
    pub fn lambda_at(&self, d: f64) -> f64 {
        let x = d - self.offset;
        self.weight * 2.0 * self.half_width / (x * x + self.half_width * self.half_width)
    }

    /// Complex self-energy contribution `Δ − iΛ/2` at detuning `d`.
    #[inline]
    pub fn m_at(&self, d: f64) -> Complex64 {
        self.weight * Complex64::new(d - self.offset, self.half_width).inv()
    }

    /// Full width at half maximum of the channel line.
    pub fn fwhm(&self) -> f64 {
        2.0 * self.half_width
    }

    /// Peak |Λ| of the isolated channel.
    pub fn lambda_peak(&self) -> f64 {
        (self.weight * 2.0 / self.half_width).abs()
    }
}

/// A self-energy as an explicit channel list, anchored at `reference`
/// [rad/s] (the subject mode's bare frequency, or 0 for curves expressed
/// directly in detuning).
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    pub reference: f64,
    pub channels: Vec<Channel>,
}

impl ChannelSet {
    pub fn delta_at(&self, detuning: f64) -> f64 {
        self.channels.iter().map(|c| c.delta_at(detuning)).sum()
    }

    pub fn lambda_at(&self, detuning: f64) -> f64 {
        self.channels.iter().map(|c| c.lambda_at(detuning)).sum()
    }

    /// Smallest channel FWHM, i.e. the finest structure a sampling grid
    /// must resolve. `None` when there are no channels.
    pub fn min_fwhm(&self) -> Option<f64> {
        self.channels
            .iter()
            .map(Channel::fwhm)
            .min_by(f64::total_cmp)
    }

    /// Sample Δ and Λ on a frequency grid. The grid is absolute; its
    /// samples are translated to detunings from `reference` before
    /// evaluation (exactly zero translation when the grid is centered on
    /// the reference).
    pub fn sample(&self, grid: &FrequencyGrid) -> SelfEnergyCurve {
        let shift = grid.center() - self.reference;
        let mut delta = Vec::with_capacity(grid.len());
        let mut lambda = Vec::with_capacity(grid.len());
        for i in 0..grid.len() {
            let d = shift + grid.detuning(i);
            delta.push(self.delta_at(d));
            lambda.push(self.lambda_at(d));
        }
        SelfEnergyCurve {
            grid: grid.clone(),
            delta,
            lambda,
        }
    }
}

/// Sampled frequency shift Δ(ω) and effective damping Λ(ω) [rad/s].
#[derive(Debug, Clone, PartialEq)]
pub struct SelfEnergyCurve {
    pub grid: FrequencyGrid,
    pub delta: Vec<f64>,
    pub lambda: Vec<f64>,
}

impl SelfEnergyCurve {
    pub fn zeros(grid: &FrequencyGrid) -> Self {
        Self {
            grid: grid.clone(),
            delta: alloc::vec![0.0; grid.len()],
            lambda: alloc::vec![0.0; grid.len()],
        }
    }

    /// Pointwise sum of two curves on the same grid.
    pub fn sum(&self, other: &Self) -> Self {
        debug_assert_eq!(self.grid, other.grid);
        Self {
            grid: self.grid.clone(),
            delta: self
                .delta
                .iter()
                .zip(&other.delta)
                .map(|(a, b)| a + b)
                .collect(),
            lambda: self
                .lambda
                .iter()
                .zip(&other.lambda)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn max_abs_lambda(&self) -> f64 {
        self.lambda.iter().fold(0.0, |m, &v| m.max(v.abs()))
    }
}

/// Photon self-energy split into its phonon-induced (M) and photon-induced
/// (EM) components; totals are always the pointwise component sum.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonSelfEnergy {
    pub m: SelfEnergyCurve,
    pub em: SelfEnergyCurve,
}

impl PhotonSelfEnergy {
    /// Δ^phot = Δ^M + Δ^EM and Λ^phot = Λ^M + Λ^EM.
    pub fn total(&self) -> SelfEnergyCurve {
        self.m.sum(&self.em)
    }
}

fn cutoff_check_window(model: &WaveguideModel, k_index: i64, modes: &ModeGrid) -> Result<()> {
    let k = modes.wavenumber(k_index);
    model.photon.check_cutoff(k)?;
    // extreme scattering partners k+q sit at the window edges
    for edge in [
        k_index + modes.center_n() + modes.n_max(),
        k_index + modes.center_n() - modes.n_max(),
    ] {
        model.photon.check_cutoff(modes.wavenumber(edge))?;
    }
    Ok(())
}

/// Channels of the thermal (phonon-induced) photon self-energy component
/// at photon mode `k_index`: for every phonon mode `q` in the window and
/// every branch α, an anti-Stokes channel of weight `f²·n` centered at
/// `ω_{k+q} − Ω_{qα}` and a Stokes channel of weight `f²·(1+n)` centered
/// at `ω_{k+q} + Ω_{qα}`, each with half-width `(Γ_α + γ)/2`. The acoustic
/// `q = 0` mode is excluded.
///
/// `modes` must be a zero-centered window (the phonon wavenumber sum).
pub fn photon_m_channels(
    k_index: i64,
    occ: &OccupationState,
    model: &WaveguideModel,
    modes: &ModeGrid,
) -> Result<ChannelSet> {
    cutoff_check_window(model, k_index, modes)?;
    let vg = model.photon.group_velocity;
    let gamma = model.photon.gamma;
    let reference = model.photon.omega(modes.wavenumber(k_index));
    let mut channels = Vec::new();
    for q_n in modes.indices() {
        let q = modes.wavenumber(q_n);
        let base = vg * q;
        for (bi, branch) in model.phonons.iter().enumerate() {
            if matches!(branch.kind, PhononKind::Acoustic { .. }) && q_n == 0 {
                continue;
            }
            let omega_q = branch.omega(q);
            let n = occ.phonon_occupation(branch, q);
            let f2 = branch.coupling_f * branch.coupling_f;
            let hw = 0.5 * (branch.damping + gamma);
            channels.push(Channel {
                mode: q_n,
                branch: bi,
                kind: ScatterKind::AntiStokes,
                weight: f2 * n,
                offset: base - omega_q,
                half_width: hw,
            });
            channels.push(Channel {
                mode: q_n,
                branch: bi,
                kind: ScatterKind::Stokes,
                weight: f2 * (1.0 + n),
                offset: base + omega_q,
                half_width: hw,
            });
        }
    }
    Ok(ChannelSet {
        reference,
        channels,
    })
}

/// Channels of the photon-induced (EM) self-energy component at photon
/// mode `k_index`: for every pumped mode `p` with `q = p − k` inside the
/// window, a positive Stokes channel and a negative anti-Stokes channel of
/// magnitude `f²·N_p`. Weights carry no thermal factor; `Λ^EM` may be
/// negative (gain).
pub fn photon_em_channels(
    k_index: i64,
    occ: &OccupationState,
    model: &WaveguideModel,
    modes: &ModeGrid,
) -> Result<ChannelSet> {
    cutoff_check_window(model, k_index, modes)?;
    let vg = model.photon.group_velocity;
    let gamma = model.photon.gamma;
    let reference = model.photon.omega(modes.wavenumber(k_index));
    let mut channels = Vec::new();
    for (p, n_p) in occ.pumped_modes() {
        let q_n = p - k_index;
        if !modes.contains(q_n) || n_p == 0.0 {
            continue;
        }
        let q = modes.wavenumber(q_n);
        let base = vg * q;
        for (bi, branch) in model.phonons.iter().enumerate() {
            if matches!(branch.kind, PhononKind::Acoustic { .. }) && q_n == 0 {
                continue;
            }
            let omega_q = branch.omega(q);
            let f2 = branch.coupling_f * branch.coupling_f;
            let hw = 0.5 * (branch.damping + gamma);
            channels.push(Channel {
                mode: q_n,
                branch: bi,
                kind: ScatterKind::Stokes,
                weight: f2 * n_p,
                offset: base + omega_q,
                half_width: hw,
            });
            channels.push(Channel {
                mode: q_n,
                branch: bi,
                kind: ScatterKind::AntiStokes,
                weight: -f2 * n_p,
                offset: base - omega_q,
                half_width: hw,
            });
        }
    }
    Ok(ChannelSet {
        reference,
        channels,
    })
}

/// Channels of the phonon self-energy at mode `(q_index, branch)`: one
/// photon-exchange channel per photon mode `k` in `k_window` whose
/// occupation numerator `N_{k−q} − N_k` is nonzero, centered at
/// `ω_k − ω_{k−q} = v_g q` with half-width `γ` and weight
/// `f_α²·(N_{k−q} − N_k)`.
///
/// Only `k` inside `k_window` are summed; occupation lookups (`N_{k−q}`)
/// are not window-restricted. Pass a window centered on the pumped region.
pub fn phonon_channels(
    q_index: i64,
    branch_idx: usize,
    occ: &OccupationState,
    model: &WaveguideModel,
    k_window: &ModeGrid,
) -> Result<ChannelSet> {
    let branch = model.phonons.get(branch_idx).ok_or(Error::InvalidParameter {
        name: "branch",
        value: branch_idx as f64,
        constraint: "valid phonon branch index",
    })?;
    let q = k_window.wavenumber(q_index);
    let omega_q = branch.omega(q);
    let vg = model.photon.group_velocity;
    let gamma = model.photon.gamma;
    let f2 = branch.coupling_f * branch.coupling_f;
    // all exchange channels share the same center for a linear dispersion
    let offset = vg * q - omega_q;

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
        channels.push(Channel {
            mode: k,
            branch: branch_idx,
            kind: ScatterKind::Exchange,
            weight: f2 * weight,
            offset,
            half_width: gamma,
        });
    }
    Ok(ChannelSet {
        reference: omega_q,
        channels,
    })
}

fn resolution_warning(set: &ChannelSet, grid: &FrequencyGrid, warnings: &mut Warnings) {
    if let Some(fwhm) = set.min_fwhm() {
        grid.check_resolution(fwhm, warnings);
    }
}

/// Thermal (phonon-induced) photon self-energy component, sampled.
pub fn photon_selfenergy_m(
    k_index: i64,
    occ: &OccupationState,
    model: &WaveguideModel,
    modes: &ModeGrid,
    grid: &FrequencyGrid,
    warnings: &mut Warnings,
) -> Result<SelfEnergyCurve> {
    let set = photon_m_channels(k_index, occ, model, modes)?;
    resolution_warning(&set, grid, warnings);
    Ok(set.sample(grid))
}

/// Photon-induced (EM) photon self-energy component, sampled.
pub fn photon_selfenergy_em(
    k_index: i64,
    occ: &OccupationState,
    model: &WaveguideModel,
    modes: &ModeGrid,
    grid: &FrequencyGrid,
    warnings: &mut Warnings,
) -> Result<SelfEnergyCurve> {
    let set = photon_em_channels(k_index, occ, model, modes)?;
    resolution_warning(&set, grid, warnings);
    Ok(set.sample(grid))
}

/// Full photon self-energy: both components, never silently dropping one.
/// Scenario presets that neglect a component do so by making it vanish
/// (no pumps, or negligible thermal occupation), not by omission here.
pub fn photon_selfenergy(
    k_index: i64,
    occ: &OccupationState,
    model: &WaveguideModel,
    modes: &ModeGrid,
    grid: &FrequencyGrid,
    warnings: &mut Warnings,
) -> Result<PhotonSelfEnergy> {
    Ok(PhotonSelfEnergy {
        m: photon_selfenergy_m(k_index, occ, model, modes, grid, warnings)?,
        em: photon_selfenergy_em(k_index, occ, model, modes, grid, warnings)?,
    })
}

/// Phonon self-energy, sampled.
pub fn phonon_selfenergy(
    q_index: i64,
    branch_idx: usize,
    occ: &OccupationState,
    model: &WaveguideModel,
    k_window: &ModeGrid,
    grid: &FrequencyGrid,
    warnings: &mut Warnings,
) -> Result<SelfEnergyCurve> {
    let set = phonon_channels(q_index, branch_idx, occ, model, k_window)?;
    resolution_warning(&set, grid, warnings);
    Ok(set.sample(grid))
}

/// Single-field closed forms evaluated from their printed two-term
/// expressions (independent of the channel machinery above).
#[derive(Debug, Clone, PartialEq)]
pub struct SingleFieldCurves {
    /// Photon EM component at `k = k₀` in the `Γ_α ≫ γ` limit: channel
    /// half-widths are `Γ_α/2`, thermal terms dropped.
    pub photon_em: SelfEnergyCurve,
    /// Phonon self-energy at `(q, α)`; exact in γ (no wide-damping limit
    /// enters the phonon line).
    pub phonon: SelfEnergyCurve,
}

/// Evaluate the single-pumped-field closed forms for a pump of `n0`
/// photons at mode `k0_index`: the photon EM curve at `k = k₀` on
/// `photon_grid` (centered on ω_{k₀}) and the phonon curve for mode
/// `(q_index, branch)` on `phonon_grid`.
///
/// Warns when any `Γ_α < 10 γ`, where the wide-damping form of the photon
/// part loses accuracy.
#[allow(clippy::too_many_arguments)]
pub fn single_field_closed_forms(
    k0_index: i64,
    n0: f64,
    q_index: i64,
    branch_idx: usize,
    model: &WaveguideModel,
    modes: &ModeGrid,
    photon_grid: &FrequencyGrid,
    phonon_grid: &FrequencyGrid,
    warnings: &mut Warnings,
) -> Result<SingleFieldCurves> {
    if n0 < 0.0 {
        return Err(Error::InvalidParameter {
            name: "n0",
            value: n0,
            constraint: "N0 >= 0",
        });
    }
    let branch = model.phonons.get(branch_idx).ok_or(Error::InvalidParameter {
        name: "branch",
        value: branch_idx as f64,
        constraint: "valid phonon branch index",
    })?;
    let gamma = model.photon.gamma;
    for b in &model.phonons {
        if b.damping < 10.0 * gamma {
            warnings.push(alloc::format!(
                "closed form assumes Gamma >> gamma, but branch '{}' has Gamma = {:e} < 10 gamma = {:e}",
                b.label,
                b.damping,
                10.0 * gamma
            ));
        }
    }

    // Photon EM at k = k0: sum over branches of N0-weighted Stokes minus
    // anti-Stokes Lorentzians at detunings ±Ω_α(0), half-width Γ_α/2.
    let omega_k0 = model.photon.omega(modes.wavenumber(k0_index));
    let photon_shift = photon_grid.center() - omega_k0;
    let mut em_delta = alloc::vec![0.0; photon_grid.len()];
    let mut em_lambda = alloc::vec![0.0; photon_grid.len()];
    for b in &model.phonons {
        let f2n = b.coupling_f * b.coupling_f * n0;
        let om = b.omega(0.0);
        let hw2 = 0.25 * b.damping * b.damping;
        for i in 0..photon_grid.len() {
            let x = photon_shift + photon_grid.detuning(i);
            let xs = x - om;
            let xa = x + om;
            let ds = xs * xs + hw2;
            let da = xa * xa + hw2;
            em_delta[i] += f2n * (xs / ds - xa / da);
            em_lambda[i] += f2n * (b.damping / ds - b.damping / da);
        }
    }

    // Phonon line at (q, α): the two photon-exchange terms with centers
    // ω_{k₀+q} − ω_{k₀} and ω_{k₀} − ω_{k₀−q}, half-width γ. For a
    // strictly linear photon branch both centers equal v_g q and the two
    // terms cancel identically; they are kept separate to mirror the
    // two-term structure.
    let q = modes.wavenumber(q_index);
    let f2n = branch.coupling_f * branch.coupling_f * n0;
    let center_gain = model.photon.group_velocity * q; // ω_{k₀+q} − ω_{k₀}
    let center_loss = model.photon.group_velocity * q; // ω_{k₀} − ω_{k₀−q}
    let base_gain = phonon_grid.center() - center_gain;
    let base_loss = phonon_grid.center() - center_loss;
    let g2 = gamma * gamma;
    let mut ph_delta = alloc::vec![0.0; phonon_grid.len()];
    let mut ph_lambda = alloc::vec![0.0; phonon_grid.len()];
    for i in 0..phonon_grid.len() {
        let xg = base_gain + phonon_grid.detuning(i);
        let xl = base_loss + phonon_grid.detuning(i);
        let dg = xg * xg + g2;
        let dl = xl * xl + g2;
        ph_delta[i] = f2n * (xg / dg - xl / dl);
        ph_lambda[i] = f2n * (2.0 * gamma / dg - 2.0 * gamma / dl);
    }

    Ok(SingleFieldCurves {
        photon_em: SelfEnergyCurve {
            grid: photon_grid.clone(),
            delta: em_delta,
            lambda: em_lambda,
        },
        phonon: SelfEnergyCurve {
            grid: phonon_grid.clone(),
            delta: ph_delta,
            lambda: ph_lambda,
        },
    })
}

/// Residual of the two-field resonance condition for phonon mode
/// `(q0, branch)`: `v_g q₀ − Ω_{q₀α}` [rad/s]. Zero means two pumped modes
/// separated by `q₀` beat exactly at the phonon frequency.
pub fn resonance_mismatch(q0_index: i64, branch_idx: usize, model: &WaveguideModel) -> f64 {
    let spacing = model.mode_spacing();
    let q = spacing * q0_index as f64;
    let omega_q = model.phonons[branch_idx].omega(q);
    model.photon.group_velocity * q - omega_q
}

/// Relative tolerance on the resonance condition.
pub const RESONANCE_REL_TOL: f64 = 1e-9;

/// Dominant-channel closed form of the two-field resonant phonon
/// self-energy: `Λ(ω) = f²(N₂−N₁)·2γ/((ω−Ω_{q₀})² + γ²)` and the matching
/// dispersive Δ. Refuses configurations that do not satisfy the resonance
/// condition; use [`phonon_selfenergy`] for those.
pub fn two_field_resonant_phonon(
    q0_index: i64,
    branch_idx: usize,
    n1: f64,
    n2: f64,
    model: &WaveguideModel,
    grid: &FrequencyGrid,
) -> Result<SelfEnergyCurve> {
    if n1 < 0.0 || n2 < 0.0 {
        return Err(Error::InvalidParameter {
            name: "n",
            value: n1.min(n2),
            constraint: "N >= 0",
        });
    }
    let branch = model.phonons.get(branch_idx).ok_or(Error::InvalidParameter {
        name: "branch",
        value: branch_idx as f64,
        constraint: "valid phonon branch index",
    })?;
    let q = model.mode_spacing() * q0_index as f64;
    let omega_q = branch.omega(q);
    let mismatch = resonance_mismatch(q0_index, branch_idx, model);
    let tol = RESONANCE_REL_TOL * omega_q.max(f64::MIN_POSITIVE);
    if mismatch.abs() > tol {
        return Err(Error::OffResonance {
            mismatch: mismatch.abs(),
            tolerance: tol,
        });
    }
    let gamma = model.photon.gamma;
    let f2dn = branch.coupling_f * branch.coupling_f * (n2 - n1);
    let g2 = gamma * gamma;
    let shift = grid.center() - omega_q;
    let mut delta = Vec::with_capacity(grid.len());
    let mut lambda = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let x = shift + grid.detuning(i);
        let den = x * x + g2;
        delta.push(f2dn * x / den);
        lambda.push(f2dn * 2.0 * gamma / den);
    }
    Ok(SelfEnergyCurve {
        grid: grid.clone(),
        delta,
        lambda,
    })
}
