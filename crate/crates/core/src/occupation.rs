//! Steady-state mean occupation numbers: thermal phonons `n_{qα}` and
//! pump-driven photons `N_k`.
//!
//! Photon thermal excitation is negligible at optical frequencies, so the
//! photon occupation is zero except at externally pumped modes. Phonons are
//! in thermal equilibrium at the bath temperature. The acoustic `q = 0`
//! mode (Ω = 0, divergent thermal occupation, vanishing mean amplitude) is
//! excluded from every interaction sum.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::constants::{BOLTZMANN, HBAR};
use crate::dispersion::ModeGrid;
use crate::model::{PhononBranch, PhononKind, WaveguideModel, Warnings};
use crate::{Error, Result};

/// Mean phonon number `n = 1/(exp(ħΩ/k_B T) − 1)`.
///
/// `T = 0` gives 0 for any Ω > 0. `Ω = 0` at `T > 0` is divergent and
/// signals that the mode must be excluded from thermal sums.
pub fn bose_einstein(omega: f64, temperature: f64) -> Result<f64> {
    if !(omega >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "omega",
            value: omega,
            constraint: "Omega >= 0",
        });
    }
    if !(temperature >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "temperature",
            value: temperature,
            constraint: "T >= 0",
        });
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    if omega == 0.0 {
        return Err(Error::DivergentOccupation { omega, temperature });
    }
    let x = HBAR * omega / (BOLTZMANN * temperature);
    Ok(1.0 / crate::math::expm1(x))
}

/// Mean photon number sustained in the waveguide by a pump of power `P`:
/// photon flux `P/ħω` times the transit time `L/v_g`.
pub fn photons_from_power(power: f64, omega: f64, length: f64, group_velocity: f64) -> Result<f64> {
    if !(power >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "power",
            value: power,
            constraint: "P >= 0",
        });
    }
    for (name, v) in [
        ("omega", omega),
        ("length", length),
        ("group_velocity", group_velocity),
    ] {
        if !(v > 0.0) {
            return Err(Error::InvalidParameter {
                name,
                value: v,
                constraint: "> 0",
            });
        }
    }
    Ok(power / (HBAR * omega) * (length / group_velocity))
}

/// Pump scenario: which photon modes carry a steady-state population.
/// Wavenumbers are physical [1/m] and are snapped to the mode grid when the
/// occupation state is built.
#[derive(Debug, Clone, PartialEq)]
pub enum Scenario {
    /// No photons; only thermal phonons.
    EmptyCavity,
    /// One pumped mode at `k0` holding `n0` photons on average.
    SingleField { k0: f64, n0: f64 },
    /// Two pumped modes.
    TwoFields { k1: f64, n1: f64, k2: f64, n2: f64 },
    /// Arbitrary set of `(k, N)` pairs.
    Custom(Vec<(f64, f64)>),
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        let check_n = |n: f64| {
            if n >= 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name: "scenario.N",
                    value: n,
                    constraint: "N >= 0",
                })
            }
        };
        match self {
            Scenario::EmptyCavity => Ok(()),
            Scenario::SingleField { n0, .. } => check_n(*n0),
            Scenario::TwoFields { k1, n1, k2, n2 } => {
                check_n(*n1)?;
                check_n(*n2)?;
                if k1 == k2 {
                    return Err(Error::InvalidParameter {
                        name: "scenario.k2",
                        value: *k2,
                        constraint: "k1 != k2",
                    });
                }
                Ok(())
            }
            Scenario::Custom(entries) => {
                for (_, n) in entries {
                    check_n(*n)?;
                }
                Ok(())
            }
        }
    }
}

/// Steady-state occupations: a sparse photon map (mode index → N, absent
/// means zero) plus thermal phonons at the model temperature.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupationState {
    photon: BTreeMap<i64, f64>,
    temperature: f64,
}

impl OccupationState {
    /// Build from a scenario. Pump wavenumbers are snapped to the nearest
    /// grid mode; a warning is pushed when the snap moves them.
    pub fn build(
        scenario: &Scenario,
        model: &WaveguideModel,
        modes: &ModeGrid,
        warnings: &mut Warnings,
    ) -> Result<Self> {
        scenario.validate()?;
        let mut photon = BTreeMap::new();
        let mut insert = |k: f64, n: f64| -> Result<()> {
            let idx = modes.snap(k);
            let snapped = modes.wavenumber(idx);
            if (k - snapped).abs() > 1e-9 * modes.spacing() {
                warnings.push(alloc::format!(
                    "pump wavenumber {k:e} 1/m snapped to grid mode n = {idx} (k = {snapped:e} 1/m)"
                ));
            }
            if photon.insert(idx, n).is_some() {
                return Err(Error::InvalidParameter {
                    name: "scenario.k",
                    value: k,
                    constraint: "pumped modes must snap to distinct grid modes",
                });
            }
            Ok(())
        };
        match scenario {
            Scenario::EmptyCavity => {}
            Scenario::SingleField { k0, n0 } => insert(*k0, *n0)?,
            Scenario::TwoFields { k1, n1, k2, n2 } => {
                insert(*k1, *n1)?;
                insert(*k2, *n2)?;
            }
            Scenario::Custom(entries) => {
                for (k, n) in entries {
                    insert(*k, *n)?;
                }
            }
        }
        Ok(Self {
            photon,
            temperature: model.temperature,
        })
    }

    /// Directly assemble a state from mode-index occupations. Used by tests
    /// and sweeps that need occupation patterns no scenario generates.
    pub fn from_parts(photon: BTreeMap<i64, f64>, temperature: f64) -> Self {
        Self {
            photon,
            temperature,
        }
    }

    /// Mean photon number at grid mode `n`.
    #[inline]
    pub fn photon_occupation(&self, n: i64) -> f64 {
        self.photon.get(&n).copied().unwrap_or(0.0)
    }

    /// Pumped modes as `(mode index, N)`, ascending in index.
    pub fn pumped_modes(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.photon.iter().map(|(&n, &v)| (n, v))
    }

    pub fn is_empty_cavity(&self) -> bool {
        self.photon.is_empty()
    }

    /// Thermal phonon occupation of branch mode `q`. Even in `q`. The
    /// acoustic `q = 0` mode reports zero: it is excluded from interaction
    /// sums rather than assigned its divergent thermal value.
    pub fn phonon_occupation(&self, branch: &PhononBranch, q: f64) -> f64 {
        if matches!(branch.kind, PhononKind::Acoustic { .. }) && q == 0.0 {
            return 0.0;
        }
        // Branch validation guarantees Ω > 0 away from the excluded mode.
        bose_einstein(branch.omega(q), self.temperature).unwrap_or(0.0)
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::TWO_PI;

    #[test]
    fn zero_temperature_gives_zero() {
        assert_eq!(bose_einstein(1e10, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn vibrational_occupation_at_4k() {
        // pinned constants give n = 7.8446 for Ω/2π = 10 GHz at 4 K
        let n = bose_einstein(TWO_PI * 1e10, 4.0).unwrap();
        assert!((n - 7.844643679458342).abs() < 1e-9, "n = {n}");
    }

    #[test]
    fn log_two_ratio_gives_exactly_one() {
        let t = 4.0;
        let omega = core::f64::consts::LN_2 * BOLTZMANN * t / HBAR;
        let n = bose_einstein(omega, t).unwrap();
        assert!((n - 1.0).abs() < 1e-12);
    }

    #[test]
    fn divergent_at_zero_frequency() {
        assert!(matches!(
            bose_einstein(0.0, 4.0),
            Err(Error::DivergentOccupation { .. })
        ));
        assert_eq!(bose_einstein(0.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn monotonic_in_omega_and_temperature() {
        let mut prev = f64::INFINITY;
        for i in 1..=40 {
            let n = bose_einstein(TWO_PI * 2.5e8 * i as f64, 4.0).unwrap();
            assert!(n < prev);
            prev = n;
        }
        let mut prev = 0.0;
        for i in 1..=40 {
            let n = bose_einstein(TWO_PI * 1e10, 0.5 * i as f64).unwrap();
            assert!(n > prev);
            prev = n;
        }
    }

    #[test]
    fn high_temperature_laurent_expansion() {
        // for ħΩ/k_B T <= 0.01, n is within 0.01 of k_B T/ħΩ − 1/2
        for i in 1..=10 {
            let x = 0.001 * i as f64;
            let t = 4.0;
            let omega = x * BOLTZMANN * t / HBAR;
            let n = bose_einstein(omega, t).unwrap();
            let leading = 1.0 / x - 0.5;
            assert!((n - leading).abs() <= 0.01, "x = {x}: {} vs {}", n, leading);
        }
    }

    #[test]
    fn photon_budget_from_one_milliwatt() {
        let flux_denom = photons_from_power(1e-3, TWO_PI * 1e14, 1.0, 1.0).unwrap();
        assert!((flux_denom - 1.5091901805668618e16).abs() / 1.5091901805668618e16 < 1e-12);
        let n0 = photons_from_power(
            1e-3,
            TWO_PI * 1e14,
            1e-2,
            crate::constants::SPEED_OF_LIGHT / 5.0,
        )
        .unwrap();
        assert!((n0 - 2.517058285313605e6).abs() / 2.517058285313605e6 < 1e-12);
        assert_eq!(photons_from_power(0.0, 1.0, 1.0, 1.0).unwrap(), 0.0);
        assert!(photons_from_power(1.0, -1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn empty_cavity_has_no_photons() {
        let m = WaveguideModel::default_silicon();
        let grid = ModeGrid::new(m.geometry.length, 8).unwrap();
        let mut w = Warnings::new();
        let occ = OccupationState::build(&Scenario::EmptyCavity, &m, &grid, &mut w).unwrap();
        assert!(occ.is_empty_cavity());
        for n in grid.indices() {
            assert_eq!(occ.photon_occupation(n), 0.0);
        }
    }

    #[test]
    fn single_field_pumps_one_mode() {
        let m = WaveguideModel::default_silicon();
        let grid = ModeGrid::new(m.geometry.length, 8).unwrap();
        let mut w = Warnings::new();
        let k0 = grid.wavenumber(3);
        let occ = OccupationState::build(
            &Scenario::SingleField { k0, n0: 1e6 },
            &m,
            &grid,
            &mut w,
        )
        .unwrap();
        assert_eq!(occ.photon_occupation(3), 1e6);
        assert_eq!(occ.photon_occupation(2), 0.0);
        assert!(w.is_empty());
    }

    #[test]
    fn off_grid_pump_snaps_with_warning() {
        let m = WaveguideModel::default_silicon();
        let grid = ModeGrid::new(m.geometry.length, 8).unwrap();
        let mut w = Warnings::new();
        let occ = OccupationState::build(
            &Scenario::SingleField {
                k0: grid.wavenumber(2) + 0.3 * grid.spacing(),
                n0: 10.0,
            },
            &m,
            &grid,
            &mut w,
        )
        .unwrap();
        assert_eq!(occ.photon_occupation(2), 10.0);
        assert!(!w.is_empty());
    }

    #[test]
    fn coincident_pumps_rejected() {
        let m = WaveguideModel::default_silicon();
        let grid = ModeGrid::new(m.geometry.length, 8).unwrap();
        let mut w = Warnings::new();
        // distinct inputs snapping to the same mode
        let r = OccupationState::build(
            &Scenario::TwoFields {
                k1: grid.wavenumber(1) + 0.1 * grid.spacing(),
                n1: 1.0,
                k2: grid.wavenumber(1) - 0.1 * grid.spacing(),
                n2: 2.0,
            },
            &m,
            &grid,
            &mut w,
        );
        assert!(r.is_err());
        let r = Scenario::TwoFields {
            k1: 100.0,
            n1: 1.0,
            k2: 100.0,
            n2: 2.0,
        }
        .validate();
        assert!(r.is_err());
    }

    #[test]
    fn negative_occupation_rejected() {
        assert!(Scenario::SingleField { k0: 0.0, n0: -1.0 }.validate().is_err());
    }

    #[test]
    fn phonon_occupation_even_and_dispersionless_branch_uniform() {
        let m = WaveguideModel::default_silicon();
        let grid = ModeGrid::new(m.geometry.length, 8).unwrap();
        let mut w = Warnings::new();
        let occ = OccupationState::build(&Scenario::EmptyCavity, &m, &grid, &mut w).unwrap();
        let n_v = bose_einstein(TWO_PI * 1e10, 4.0).unwrap();
        for branch in &m.phonons {
            for q in grid.wavenumbers() {
                assert_eq!(
                    occ.phonon_occupation(branch, q),
                    occ.phonon_occupation(branch, -q)
                );
            }
        }
        let vib = &m.phonons[1];
        for q in grid.wavenumbers() {
            assert_eq!(occ.phonon_occupation(vib, q), n_v);
        }
    }

    #[test]
    fn acoustic_q_zero_excluded() {
        let m = WaveguideModel::default_silicon();
        let grid = ModeGrid::new(m.geometry.length, 8).unwrap();
        let mut w = Warnings::new();
        let occ = OccupationState::build(&Scenario::EmptyCavity, &m, &grid, &mut w).unwrap();
        let acoustic = &m.phonons[0];
        assert_eq!(occ.phonon_occupation(acoustic, 0.0), 0.0);
        assert!(occ.phonon_occupation(acoustic, grid.spacing()) > 0.0);
    }
}
