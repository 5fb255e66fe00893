//! Dispersion relations and the discrete mode grid of the finite waveguide.
//!
//! Modes are addressed by the integer index `n` of `k = (2π/L) n`; working
//! with indices instead of raw wavenumbers keeps mode identity exact. A
//! [`ModeGrid`] additionally carries a symmetric *summation window*
//! `n ∈ [−n_max, n_max]` that truncates interaction sums; wavenumbers
//! outside the window are still valid mode coordinates.

use crate::model::{PhononBranch, PhononKind, PhotonBranch, WaveguideModel};
use crate::{Error, Result};

impl PhotonBranch {
    /// Linear dispersion `ω_k = ω₀ + v_g k`. No cutoff check.
    #[inline]
    pub fn omega(&self, k: f64) -> f64 {
        self.omega0 + self.group_velocity * k
    }

    /// Dispersion with the linear-zone cutoff enforced.
    pub fn omega_checked(&self, k: f64) -> Result<f64> {
        self.check_cutoff(k)?;
        Ok(self.omega(k))
    }

    /// Errors if `|k|` exceeds the configured linear-zone cutoff.
    pub fn check_cutoff(&self, k: f64) -> Result<()> {
        if let Some(kc) = self.k_cutoff {
            if k.abs() > kc {
                return Err(Error::OutOfModelRange {
                    what: "photon wavenumber",
                    value: k,
                    limit: kc,
                });
            }
        }
        Ok(())
    }
}

impl PhononBranch {
    /// Branch dispersion: `v_a |q|` for the acoustic branch (|q| keeps the
    /// mode frequency non-negative for both propagation directions), the
    /// constant Ω_v for a vibrational branch.
    #[inline]
    pub fn omega(&self, q: f64) -> f64 {
        match self.kind {
            PhononKind::Acoustic { sound_velocity } => sound_velocity * q.abs(),
            PhononKind::Vibrational { omega_v } => omega_v,
        }
    }

    /// Coupling accessor `f_k^{qα}`. Wavenumber independent over the zone
    /// of interest, which makes the symmetry `f_{k+q}^{-qα} = f_k^{qα}`
    /// exact.
    #[inline]
    pub fn coupling(&self, _k: f64, _q: f64) -> f64 {
        self.coupling_f
    }
}

/// Discrete wavenumber grid `k_n = (2π/L) n` with a symmetric summation
/// window `|n| ≤ n_max` (optionally shifted to be centered on a mode
/// `center_n`, which interaction sums over photon modes use to follow the
/// pumped region).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeGrid {
    spacing: f64,
    center_n: i64,
    n_max: i64,
}

impl ModeGrid {
    /// Window of `2·n_max + 1` modes centered on `n = 0` for a waveguide of
    /// the given length.
    pub fn new(length: f64, n_max: i64) -> Result<Self> {
        if !(length > 0.0) {
            return Err(Error::InvalidParameter {
                name: "length",
                value: length,
                constraint: "length > 0",
            });
        }
        if n_max < 0 {
            return Err(Error::InvalidParameter {
                name: "n_max",
                value: n_max as f64,
                constraint: "n_max >= 0",
            });
        }
        Ok(Self {
            spacing: crate::constants::TWO_PI / length,
            center_n: 0,
            n_max,
        })
    }

    /// Same window shifted to be centered on mode `center_n`.
    pub fn centered_at(self, center_n: i64) -> Self {
        Self { center_n, ..self }
    }

    /// Window sized for a frequency grid of half-width `half_width` around
    /// a photon line: `n_max = ⌈3·half_width / (v_g · 2π/L)⌉`, so the
    /// acoustic channel band spans at least three times the largest
    /// in-window detuning. Floored at 8 modes.
    pub fn for_window(model: &WaveguideModel, half_width: f64) -> Result<Self> {
        let spacing = model.mode_spacing();
        let per_mode = model.photon.group_velocity * spacing;
        let needed = crate::math::ceil(3.0 * half_width / per_mode) as i64;
        Self::new(model.geometry.length, needed.max(8))
    }

    /// Wavenumber spacing 2π/L [1/m].
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn n_max(&self) -> i64 {
        self.n_max
    }

    pub fn center_n(&self) -> i64 {
        self.center_n
    }

    /// Number of modes in the window.
    pub fn len(&self) -> usize {
        (2 * self.n_max + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Wavenumber of mode `n` [1/m]; valid for any integer, inside the
    /// window or not.
    #[inline]
    pub fn wavenumber(&self, n: i64) -> f64 {
        self.spacing * n as f64
    }

    /// Mode indices of the window, ascending.
    pub fn indices(&self) -> impl Iterator<Item = i64> {
        (self.center_n - self.n_max)..=(self.center_n + self.n_max)
    }

    pub fn wavenumbers(&self) -> impl Iterator<Item = f64> + '_ {
        self.indices().map(|n| self.wavenumber(n))
    }

    /// Whether mode `n` lies inside the summation window.
    #[inline]
    pub fn contains(&self, n: i64) -> bool {
        (n - self.center_n).abs() <= self.n_max
    }

    /// Index of the grid mode nearest to wavenumber `k`.
    pub fn snap(&self, k: f64) -> i64 {
        crate::math::round(k / self.spacing) as i64
    }
}
