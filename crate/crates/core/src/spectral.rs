//! Spectral functions `S(ω) = −2 Im G(ω)` and quantitative line analysis.
//!
//! A dressed line is the bare Lorentzian with the self-energy folded into
//! it: the damping becomes `γ + Λ(ω)` and the center is pulled by `Δ(ω)`.
//! Analysis utilities extract peak centers, widths and shifts, check the
//! sum rule `∫ S dω/2π = 1`, and verify the Kramers–Kronig pairing between
//! Δ and Λ that the retarded structure imposes.

use alloc::vec::Vec;
use core::ops::Range;

use crate::constants::TWO_PI;
use crate::dispersion::ModeGrid;
use crate::model::{FrequencyGrid, PhononKind, WaveguideModel, Warnings};
use crate::occupation::OccupationState;
use crate::selfenergy::{Channel, ChannelSet, ScatterKind, SelfEnergyCurve};
use crate::{Error, Result};

/// What a spectral curve describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subject {
    Photon { k_index: i64 },
    Phonon { q_index: i64, branch: usize },
    /// A synthetic Lorentzian line, not tied to a model mode.
    Line,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    Bare,
    Dressed,
}

/// Sampled spectral function \[s\].
///
/// `gain_regions` lists index ranges where the total damping `γ + Λ(ω)`
/// is negative; there the lineshape is not a positive Lorentzian and `S`
/// may go negative. Gain is physical content (stimulated scattering), so
/// such curves are annotated, never rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCurve {
    pub grid: FrequencyGrid,
    pub samples: Vec<f64>,
    pub subject: Subject,
    pub kind: CurveKind,
    pub gain_regions: Vec<Range<usize>>,
}

impl SpectralCurve {
    pub fn has_gain(&self) -> bool {
        !self.gain_regions.is_empty()
    }

    pub fn max_sample(&self) -> f64 {
        self.samples.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v))
    }
}

fn lorentzian_curve(
    center: f64,
    bare_damping: f64,
    se: Option<&SelfEnergyCurve>,
    grid: &FrequencyGrid,
    subject: Subject,
) -> SpectralCurve {
    let shift = grid.center() - center;
    let n = grid.len();
    let mut samples = Vec::with_capacity(n);
    let mut gain_regions: Vec<Range<usize>> = Vec::new();
    let mut gain_start: Option<usize> = None;
    for i in 0..n {
        let x = shift + grid.detuning(i);
        let (delta, lambda) = match se {
            Some(se) => (se.delta[i], se.lambda[i]),
            None => (0.0, 0.0),
        };
        let total = bare_damping + lambda;
        let xc = x - delta;
        samples.push(total / (xc * xc + total * total / 4.0));
        if total < 0.0 {
            gain_start.get_or_insert(i);
        } else if let Some(s) = gain_start.take() {
            gain_regions.push(s..i);
        }
    }
    if let Some(s) = gain_start {
        gain_regions.push(s..n);
    }
    SpectralCurve {
        grid: grid.clone(),
        samples,
        subject,
        kind: if se.is_some() {
            CurveKind::Dressed
        } else {
            CurveKind::Bare
        },
        gain_regions,
    }
}

/// Bare Lorentzian line `S(ω) = damping / ((ω−center)² + damping²/4)`.
pub fn bare_sf(center: f64, damping: f64, grid: &FrequencyGrid) -> Result<SpectralCurve> {
    if !(damping > 0.0) {
        return Err(Error::InvalidParameter {
            name: "damping",
            value: damping,
            constraint: "damping > 0",
        });
    }
    Ok(lorentzian_curve(center, damping, None, grid, Subject::Line))
}

/// Dressed photon line at mode `k_index` from its total self-energy curve.
pub fn dressed_photon_sf(
    k_index: i64,
    se: &SelfEnergyCurve,
    model: &WaveguideModel,
    modes: &ModeGrid,
) -> Result<SpectralCurve> {
    let omega_k = model.photon.omega_checked(modes.wavenumber(k_index))?;
    Ok(lorentzian_curve(
        omega_k,
        model.photon.gamma,
        Some(se),
        &se.grid,
        Subject::Photon { k_index },
    ))
}

/// Dressed phonon line at mode `(q_index, branch)`.
pub fn dressed_phonon_sf(
    q_index: i64,
    branch_idx: usize,
    se: &SelfEnergyCurve,
    model: &WaveguideModel,
    modes: &ModeGrid,
) -> Result<SpectralCurve> {
    let branch = model.phonons.get(branch_idx).ok_or(Error::InvalidParameter {
        name: "branch",
        value: branch_idx as f64,
        constraint: "valid phonon branch index",
    })?;
    let omega_q = branch.omega(modes.wavenumber(q_index));
    Ok(lorentzian_curve(
        omega_q,
        branch.damping,
        Some(se),
        &se.grid,
        Subject::Phonon {
            q_index,
            branch: branch_idx,
        },
    ))
}

/// A single thermal scattering channel of the photon self-energy as a
/// function of the detuning `δ = ω − ω_{k+q}`, for comparing isolated
/// Stokes/anti-Stokes lines. The grid is a detuning grid; the channel sits
/// at `δ = +Ω_{qα}` (Stokes) or `δ = −Ω_{qα}` (anti-Stokes) with FWHM
/// `Γ_α + γ`.
#[allow(clippy::too_many_arguments)]
pub fn channel_detuning_curve(
    k_index: i64,
    q_index: i64,
    branch_idx: usize,
    kind: ScatterKind,
    occ: &OccupationState,
    model: &WaveguideModel,
    modes: &ModeGrid,
    grid: &FrequencyGrid,
) -> Result<SelfEnergyCurve> {
    let branch = model.phonons.get(branch_idx).ok_or(Error::InvalidParameter {
        name: "branch",
        value: branch_idx as f64,
        constraint: "valid phonon branch index",
    })?;
    if matches!(kind, ScatterKind::Exchange) {
        return Err(Error::InvalidParameter {
            name: "kind",
            value: 0.0,
            constraint: "Stokes or AntiStokes",
        });
    }
    if matches!(branch.kind, PhononKind::Acoustic { .. }) && q_index == 0 {
        return Err(Error::InvalidParameter {
            name: "q",
            value: 0.0,
            constraint: "acoustic q = 0 is excluded from interaction sums",
        });
    }
    let q = modes.wavenumber(q_index);
    model
        .photon
        .check_cutoff(modes.wavenumber(k_index + q_index))?;
    let omega_q = branch.omega(q);
    let n = occ.phonon_occupation(branch, q);
    let f2 = branch.coupling_f * branch.coupling_f;
    let (weight, offset) = match kind {
        ScatterKind::AntiStokes => (f2 * n, -omega_q),
        ScatterKind::Stokes => (f2 * (1.0 + n), omega_q),
        ScatterKind::Exchange => unreachable!(),
    };
    let set = ChannelSet {
        reference: 0.0,
        channels: alloc::vec![Channel {
            mode: q_index,
            branch: branch_idx,
            kind,
            weight,
            offset,
            half_width: 0.5 * (branch.damping + model.photon.gamma),
        }],
    };
    Ok(set.sample(grid))
}

/// Channel tag attached to an extracted peak.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChannelLabel {
    pub branch: usize,
    pub kind: ScatterKind,
}

/// One extracted spectral line.
#[derive(Debug, Clone, PartialEq)]
pub struct Peak {
    /// Interpolated peak position [rad/s] (3-point quadratic).
    pub center: f64,
    /// Full width at half maximum [rad/s], from linear interpolation of
    /// the half-maximum crossings.
    pub fwhm: f64,
    pub height: f64,
    /// `center − bare line position`, when a bare reference was given.
    pub shift_vs_bare: Option<f64>,
    /// Nearest predicted resonance, when predictions were given.
    pub channel: Option<ChannelLabel>,
    /// Set when fewer than 3 samples rise above half maximum or a
    /// half-maximum crossing fell outside the grid.
    pub low_confidence: bool,
}

/// Peaks of a sampled curve, sorted by center.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PeakReport {
    pub peaks: Vec<Peak>,
}

impl PeakReport {
    pub fn dominant(&self) -> Option<&Peak> {
        self.peaks
            .iter()
            .max_by(|a, b| a.height.total_cmp(&b.height))
    }
}

/// Locate local maxima of `samples` on `grid`. The grid spacing should
/// resolve the narrowest expected line with at least 10 samples per
/// linewidth.
pub fn find_peaks(grid: &FrequencyGrid, samples: &[f64]) -> PeakReport {
    analyze_peaks(grid, samples, None, &[])
}

/// Like [`find_peaks`], additionally reporting each peak's shift against a
/// bare line position and classifying it by the nearest predicted
/// resonance center.
pub fn analyze_peaks(
    grid: &FrequencyGrid,
    samples: &[f64],
    bare_center: Option<f64>,
    predictions: &[(ChannelLabel, f64)],
) -> PeakReport {
    let n = samples.len();
    let h = grid.spacing();
    let mut peaks = Vec::new();
    for i in 1..n.saturating_sub(1) {
        if !(samples[i] > samples[i - 1] && samples[i] >= samples[i + 1]) {
            continue;
        }
        let (ym, y0, yp) = (samples[i - 1], samples[i], samples[i + 1]);
        let curvature = ym - 2.0 * y0 + yp;
        let (off, height) = if curvature < 0.0 {
            let off = 0.5 * (ym - yp) / curvature;
            (off, y0 - 0.25 * (ym - yp) * off)
        } else {
            (0.0, y0)
        };
        if height <= 0.0 {
            continue;
        }
        let center = grid.omega(i) + off * h;
        let half = 0.5 * height;

        let mut low_confidence = false;
        // walk out to the half-maximum crossings
        let mut jl = i;
        while jl > 0 && samples[jl - 1] > half {
            jl -= 1;
        }
        let mut jr = i;
        while jr + 1 < n && samples[jr + 1] > half {
            jr += 1;
        }
        if jr - jl + 1 < 3 {
            low_confidence = true;
        }
        let left = (jl > 0).then(|| {
            let (ya, yb) = (samples[jl - 1], samples[jl]);
            grid.omega(jl - 1) + h * (half - ya) / (yb - ya)
        });
        let right = (jr + 1 < n).then(|| {
            let (ya, yb) = (samples[jr], samples[jr + 1]);
            grid.omega(jr) + h * (half - ya) / (yb - ya)
        });
        // fall back to the quadratic-curvature width when a crossing is
        // unreachable inside the grid
        let fwhm = match (left, right) {
            (Some(l), Some(r)) if r > l => r - l,
            _ => {
                low_confidence = true;
                if curvature < 0.0 {
                    crate::math::sqrt(-8.0 * height * h * h / curvature)
                } else {
                    h
                }
            }
        };

        let channel = predictions
            .iter()
            .min_by(|a, b| (a.1 - center).abs().total_cmp(&(b.1 - center).abs()))
            .map(|(label, _)| *label);
        peaks.push(Peak {
            center,
            fwhm,
            height,
            shift_vs_bare: bare_center.map(|b| center - b),
            channel,
            low_confidence,
        });
    }
    peaks.sort_by(|a, b| a.center.total_cmp(&b.center));
    PeakReport { peaks }
}

/// Dimensionless line weight `∫ S dω / 2π`: trapezoid quadrature over the
/// grid plus an analytic Lorentzian tail correction taken from the
/// dominant extracted peak. Warns when the window covers fewer than 10³
/// linewidths of that peak.
pub fn sum_rule(curve: &SpectralCurve, warnings: &mut Warnings) -> f64 {
    let g = &curve.grid;
    let h = g.spacing();
    let n = curve.samples.len();
    let sum: f64 = curve.samples.iter().sum();
    let trapezoid = (sum - 0.5 * (curve.samples[0] + curve.samples[n - 1])) * h / TWO_PI;

    let report = find_peaks(g, &curve.samples);
    let tail = match report.dominant() {
        Some(peak) if peak.fwhm > 0.0 => {
            let (a, b) = (g.omega(0), g.omega(n - 1));
            if b - a < 1e3 * peak.fwhm {
                warnings.push(alloc::format!(
                    "sum-rule window {:e} rad/s covers fewer than 1000 linewidths ({:e} rad/s)",
                    b - a,
                    peak.fwhm
                ));
            }
            let half = 0.5 * peak.fwhm;
            peak.height * peak.fwhm / (4.0 * core::f64::consts::PI)
                * (core::f64::consts::PI
                    - crate::math::atan((b - peak.center) / half)
                    - crate::math::atan((peak.center - a) / half))
        }
        _ => 0.0,
    };
    trapezoid + tail
}

/// Reconstruct `Δ(ω_i)` from the sampled `Λ` through the retarded
/// Kramers–Kronig relation `Δ(ω) = −(1/π) P∫ (Λ(ω′)/2)/(ω′−ω) dω′`.
///
/// The principal value is evaluated by singularity subtraction: the
/// smooth part `(f(ω′) − f(ω_i))/(ω′−ω_i)` is integrated with the
/// trapezoid rule (the singular node carries the central-difference
/// derivative), and the subtracted pole integrates exactly to
/// `f(ω_i)·ln((b−ω_i)/(ω_i−a))`. `i` must be an interior index.
pub fn kk_reconstruct_delta_at(grid: &FrequencyGrid, lambda: &[f64], i: usize) -> f64 {
    let n = lambda.len();
    debug_assert!(i > 0 && i + 1 < n, "interior index required");
    let h = grid.spacing();
    let fi = 0.5 * lambda[i];
    let mut sum = 0.0;
    for (j, &lam) in lambda.iter().enumerate() {
        let g = if j == i {
            0.25 * (lambda[i + 1] - lambda[i - 1]) / h
        } else {
            (0.5 * lam - fi) / ((j as f64 - i as f64) * h)
        };
        let w = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
        sum += w * g;
    }
    let integral = sum * h;
    // uniform grid: (b − ω_i)/(ω_i − a) reduces to an exact integer ratio
    let log_term = fi * crate::math::ln((n - 1 - i) as f64 / i as f64);
    -(integral + log_term) / core::f64::consts::PI
}

/// Maximum deviation of the Kramers–Kronig reconstruction of Δ from the
/// stored Δ over the interior half of the grid, relative to the interior
/// maximum of |Δ| (absolute when Δ vanishes identically).
pub fn kk_consistency(curve: &SelfEnergyCurve, warnings: &mut Warnings) -> f64 {
    let n = curve.lambda.len();
    let lo = n / 4;
    let hi = n - 1 - n / 4;

    // warn when the window is narrow relative to the dominant Λ structure
    let abs_lambda: Vec<f64> = curve.lambda.iter().map(|v| v.abs()).collect();
    if let Some(peak) = find_peaks(&curve.grid, &abs_lambda).dominant() {
        let window = 2.0 * curve.grid.half_width();
        if peak.fwhm > 0.0 && window < 100.0 * peak.fwhm {
            warnings.push(alloc::format!(
                "KK window {:e} rad/s is below 100 linewidths of the dominant channel ({:e} rad/s); truncation will dominate",
                window,
                peak.fwhm
            ));
        }
    }

    let scale = curve.delta[lo..=hi]
        .iter()
        .fold(0.0_f64, |m, &v| m.max(v.abs()));
    let mut dev = 0.0_f64;
    for i in lo..=hi {
        let rec = kk_reconstruct_delta_at(&curve.grid, &curve.lambda, i);
        dev = dev.max((rec - curve.delta[i]).abs());
    }
    if scale > 0.0 {
        dev / scale
    } else {
        dev
    }
}
