//! The five subcommands. Each one resolves its configuration, evaluates
//! the requested curves, writes CSV files plus a manifest into the output
//! directory, and returns the peak summary used by `sweep`.

use std::path::PathBuf;

use wgspec_core::constants::TWO_PI;
use wgspec_core::dispersion::ModeGrid;
use wgspec_core::model::{FrequencyGrid, WaveguideModel};
use wgspec_core::occupation::{OccupationState, Scenario};
use wgspec_core::oracle::{evolve, transform_to_sf, OracleSystem};
use wgspec_core::selfenergy::{
    phonon_channels, photon_em_channels, photon_m_channels, resonance_mismatch,
    two_field_resonant_phonon, Channel, ChannelSet, ScatterKind, SelfEnergyCurve,
    RESONANCE_REL_TOL,
};
use wgspec_core::spectral::{
    analyze_peaks, channel_detuning_curve, dressed_phonon_sf, dressed_photon_sf, find_peaks,
    ChannelLabel, PeakReport, SpectralCurve,
};
use wgspec_core::{Error as CoreError, Warnings};

use crate::config::{resolve_pump, ConfigDoc, GridSection, ScenarioSection};
use crate::error::{CliError, CliResult};
use crate::manifest::RunManifest;
use crate::output::{
    detuning_rows, grid_info, oddify, selfenergy_rows, spectral_rows, write_curve_csv,
    write_peaks_csv,
};

///// Shared command environment: resolved config document, output
/// directory, and the global grid overrides.
pub struct RunContext {
    pub config: ConfigDoc,
    pub out_dir: PathBuf,
    pub grid_halfwidth_hz: Option<f64>,
    pub grid_points: Option<usize>,
}

/// One peak row for the sweep summary.
#[derive(Debug, Clone)]
pub struct SummaryPeak {
    pub curve: &'static str,
    pub center: f64,
    pub fwhm: f64,
    pub height: f64,
    pub shift: Option<f64>,
    pub channel_id: String,
}

#[derive(Debug, Clone, Default)]
pub struct RunResult {
    pub peaks: Vec<SummaryPeak>,
    pub classification: Option<&'static str>,
}

impl RunContext {
    fn model(&self, warnings: &mut Warnings) -> CliResult<WaveguideModel> {
        self.config.to_model(warnings)
    }

    /// Build a frequency grid from (in order of precedence) the global
    /// flags, the config's `grid` section, and per-command defaults.
    ///
    /// Defaults are canonicalized through their Hz representation so that
    /// the grid recorded in a manifest reproduces this grid bit-exactly
    /// when fed back in as a document.
    fn grid(
        &self,
        default_center: f64,
        default_halfwidth: f64,
        default_points: usize,
        warnings: &mut Warnings,
    ) -> CliResult<FrequencyGrid> {
        let section = self.config.grid.as_ref();
        let center = section
            .and_then(|g| g.center_hz)
            .map(|hz| TWO_PI * hz)
            .unwrap_or(TWO_PI * (default_center / TWO_PI));
        let halfwidth = self
            .grid_halfwidth_hz
            .map(|hz| TWO_PI * hz)
            .or(section.map(|g| TWO_PI * g.halfwidth_hz))
            .unwrap_or(TWO_PI * (default_halfwidth / TWO_PI));
        let points = oddify(
            self.grid_points
                .or(section.map(|g| g.points))
                .unwrap_or(default_points),
            warnings,
        );
        Ok(FrequencyGrid::new(center, halfwidth, points)?)
    }

    fn ensure_out_dir(&self) -> CliResult<()> {
        std::fs::create_dir_all(&self.out_dir)?;
        Ok(())
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }
}

fn channel_id(model: &WaveguideModel, ch: &Channel) -> String {
    let label = &model.phonons[ch.branch].label;
    match ch.kind {
        ScatterKind::Exchange => format!("{label}:k{:+}:exchange", ch.mode),
        kind => format!("{label}:q{:+}:{}", ch.mode, kind.as_str()),
    }
}

fn label_text(model: &WaveguideModel, label: &ChannelLabel) -> String {
    format!(
        "{}:{}",
        model.phonons[label.branch].label,
        label.kind.as_str()
    )
}

fn predictions(set: &ChannelSet) -> Vec<(ChannelLabel, f64)> {
    set.channels
        .iter()
        .map(|c| {
            (
                ChannelLabel {
                    branch: c.branch,
                    kind: c.kind,
                },
                set.reference + c.offset,
            )
        })
        .collect()
}

fn summarize(
    model: &WaveguideModel,
    reports: &[(&'static str, &PeakReport)],
) -> Vec<SummaryPeak> {
    let mut peaks = Vec::new();
    for (curve, report) in reports {
        peaks.extend(report.peaks.iter().map(|p| SummaryPeak {
            curve,
            center: p.center,
            fwhm: p.fwhm,
            height: p.height,
            shift: p.shift_vs_bare,
            channel_id: p
                .channel
                .as_ref()
                .map(|c| label_text(model, c))
                .unwrap_or_default(),
        }));
    }
    peaks
}

fn finish(
    manifest: &mut RunManifest,
    ctx: &RunContext,
    warnings: &Warnings,
) -> CliResult<()> {
    for w in warnings.iter() {
        eprintln!("warning: {w}");
        manifest.warnings.push(w.to_string());
    }
    let path = ctx.path("manifest.json");
    manifest.record_output(&path);
    manifest.write(&path)?;
    Ok(())
}

fn snap_ka(model: &WaveguideModel, ka: f64) -> i64 {
    let spacing = model.mode_spacing();
    let k = ka / model.geometry.radius;
    (k / spacing).round() as i64
}

/// Thermal response of the unpumped waveguide at probe mode `k·a`:
/// grid-summed Δ^M/Λ^M, per-channel detuning curves, the dressed photon
/// line, and its peak table.
pub fn run_empty(ctx: &RunContext, ka: f64) -> CliResult<RunResult> {
    let mut warnings = Warnings::new();
    let model = ctx.model(&mut warnings)?;
    ctx.ensure_out_dir()?;
    let k_index = snap_ka(&model, ka);
    let omega_k = model
        .photon
        .omega_checked(model.mode_spacing() * k_index as f64)?;
    let grid = ctx.grid(omega_k, TWO_PI * 15e9, 120_001, &mut warnings)?;
    let modes = ModeGrid::for_window(&model, grid.half_width())?;
    let occ = OccupationState::build(&Scenario::EmptyCavity, &model, &modes, &mut warnings)?;

    let m_set = photon_m_channels(k_index, &occ, &model, &modes)?;
    if let Some(fwhm) = m_set.min_fwhm() {
        grid.check_resolution(fwhm, &mut warnings);
    }
    let m_curve = m_set.sample(&grid);
    let em_curve = photon_em_channels(k_index, &occ, &model, &modes)?.sample(&grid);
    let total = m_curve.sum(&em_curve);
    let sf = dressed_photon_sf(k_index, &total, &model, &modes)?;

    let mut manifest = RunManifest::new(
        "empty",
        serde_json::json!({ "k_a": ka, "k_index": k_index }),
        resolved_config(ctx, &grid, Some(ScenarioSection::Empty { k_a: ka })),
    );
    manifest.set_mode_window(&modes);
    manifest.grids.insert("photon".into(), grid_info(&grid));

    let se_path = ctx.path("selfenergy_m.csv");
    write_curve_csv(&se_path, selfenergy_rows(&m_curve, None))?;
    manifest.record_output(&se_path);

    // one compact detuning curve per channel, long format
    let ch_path = ctx.path("channels_detuning.csv");
    {
        let mut all_rows = Vec::new();
        for ch in &m_set.channels {
            let fwhm = ch.fwhm();
            let center = match ch.kind {
                ScatterKind::Stokes => model.phonons[ch.branch].omega(modes.wavenumber(ch.mode)),
                _ => -model.phonons[ch.branch].omega(modes.wavenumber(ch.mode)),
            };
            let dgrid = FrequencyGrid::new(center, 12.0 * fwhm, 401)?;
            let curve = channel_detuning_curve(
                k_index, ch.mode, ch.branch, ch.kind, &occ, &model, &modes, &dgrid,
            )?;
            let id = channel_id(&model, ch);
            all_rows.extend(detuning_rows(&curve, id).collect::<Vec<_>>());
        }
        write_curve_csv(&ch_path, all_rows.into_iter())?;
    }
    manifest.record_output(&ch_path);

    let sf_path = ctx.path("photon_sf.csv");
    write_curve_csv(&sf_path, spectral_rows(&sf))?;
    manifest.record_output(&sf_path);

    let preds = predictions(&m_set);
    let sf_report = analyze_peaks(&grid, &sf.samples, Some(omega_k), &preds);
    let lambda_report = analyze_peaks(&grid, &m_curve.lambda, None, &preds);
    let reports: [(&'static str, &PeakReport); 2] =
        [("photon_sf", &sf_report), ("lambda_m", &lambda_report)];
    let peaks_path = ctx.path("peaks.csv");
    write_peaks_csv(&peaks_path, &reports, |l| label_text(&model, l), None)?;
    manifest.record_output(&peaks_path);
    manifest.note("gain_regions", serde_json::json!(sf.gain_regions.len()));

    finish(&mut manifest, ctx, &warnings)?;
    Ok(RunResult {
        peaks: summarize(&model, &reports),
        classification: None,
    })
}

/// Single pumped mode at `k₀`: photon EM (and thermal) self-energy at
/// `k = k₀`, the dressed photon line, and the phonon self-energy at the
/// quasi-resonant wavenumber of each branch.
pub fn run_single_field(
    ctx: &RunContext,
    k0_a: f64,
    n0: Option<f64>,
    power_w: Option<f64>,
    q_override: Option<i64>,
) -> CliResult<RunResult> {
    let mut warnings = Warnings::new();
    let model = ctx.model(&mut warnings)?;
    ctx.ensure_out_dir()?;
    let k0_index = snap_ka(&model, k0_a);
    let omega_k0 = model
        .photon
        .omega_checked(model.mode_spacing() * k0_index as f64)?;

    // pump size: flagsWIN over the config scenario
    let (n0, power_w) = if n0.is_some() || power_w.is_some() {
        (n0, power_w)
    } else if let Some(ScenarioSection::SingleField { n0, power_w, .. }) = &ctx.config.scenario {
        (*n0, *power_w)
    } else {
        (None, None)
    };
    let n0_value = resolve_pump(n0, power_w, &ctx.config)?;

    let grid = ctx.grid(omega_k0, TWO_PI * 30e9, 120_001, &mut warnings)?;
    let modes = ModeGrid::for_window(&model, grid.half_width())?;
    let occ = OccupationState::build(
        &Scenario::SingleField {
            k0: modes.wavenumber(k0_index),
            n0: n0_value,
        },
        &model,
        &modes,
        &mut warnings,
    )?;

    let em_set = photon_em_channels(k0_index, &occ, &model, &modes)?;
    if let Some(fwhm) = em_set.min_fwhm() {
        grid.check_resolution(fwhm, &mut warnings);
    }
    let em_curve = em_set.sample(&grid);
    let m_curve = photon_m_channels(k0_index, &occ, &model, &modes)?.sample(&grid);
    let total = m_curve.sum(&em_curve);
    let sf = dressed_photon_sf(k0_index, &total, &model, &modes)?;

    let mut manifest = RunManifest::new(
        "single-field",
        serde_json::json!({
            "k0_a": k0_a,
            "k0_index": k0_index,
            "n0": n0_value,
        }),
        resolved_config(
            ctx,
            &grid,
            Some(ScenarioSection::SingleField {
                k0_a,
                n0: Some(n0_value),
                power_w: None,
            }),
        ),
    );
    manifest.set_mode_window(&modes);
    manifest.grids.insert("photon".into(), grid_info(&grid));
    if let Some(p) = power_w {
        let flux = p / (wgspec_core::constants::HBAR * model.photon.omega0);
        manifest.note(
            "n0_derivation",
            serde_json::json!({
                "power_w": p,
                "photon_flux_per_s": flux,
                "transit_time_s": model.geometry.length / model.photon.group_velocity,
                "n0": n0_value,
            }),
        );
    }

    for (name, curve) in [("selfenergy_em.csv", &em_curve), ("selfenergy_m.csv", &m_curve)] {
        let path = ctx.path(name);
        write_curve_csv(&path, selfenergy_rows(curve, None))?;
        manifest.record_output(&path);
    }
    let sf_path = ctx.path("photon_sf.csv");
    write_curve_csv(&sf_path, spectral_rows(&sf))?;
    manifest.record_output(&sf_path);

    // phonon lines: quasi-resonant wavenumber per branch
    for (bi, branch) in model.phonons.iter().enumerate() {
        let spacing = model.mode_spacing();
        let q_index = q_override.unwrap_or_else(|| {
            let per_mode = model.photon.group_velocity * spacing;
            ((branch.omega(spacing) / per_mode).round() as i64).max(1)
        });
        let mismatch = resonance_mismatch(q_index, bi, &model);
        let omega_q = branch.omega(spacing * q_index as f64);
        let hw = 1.25 * mismatch.abs() + 100.0 * model.photon.gamma + 10.0 * branch.damping;
        let pgrid = FrequencyGrid::new(omega_q, hw, 8001)?;
        let n_ctx = modes.n_max().max(q_index.abs() + 2);
        let k_window = ModeGrid::new(model.geometry.length, n_ctx)?.centered_at(k0_index);
        let set = phonon_channels(q_index, bi, &occ, &model, &k_window)?;
        let curve = set.sample(&pgrid);
        let path = ctx.path(&format!("phonon_selfenergy_{}.csv", branch.label));
        write_curve_csv(&path, selfenergy_rows(&curve, None))?;
        manifest.record_output(&path);
        manifest.note(
            &format!("phonon_{}", branch.label),
            serde_json::json!({
                "q_index": q_index,
                "omega_q_hz": omega_q / TWO_PI,
                "resonance_mismatch_hz": mismatch / TWO_PI,
            }),
        );
        manifest
            .grids
            .insert(format!("phonon_{}", branch.label), grid_info(&pgrid));
    }

    let preds = predictions(&em_set);
    let em_report = analyze_peaks(&grid, &em_curve.lambda, Some(omega_k0), &preds);
    let sf_report = analyze_peaks(&grid, &sf.samples, Some(omega_k0), &preds);
    let reports: [(&'static str, &PeakReport); 2] =
        [("lambda_em", &em_report), ("photon_sf", &sf_report)];
    let peaks_path = ctx.path("peaks.csv");
    write_peaks_csv(&peaks_path, &reports, |l| label_text(&model, l), None)?;
    manifest.record_output(&peaks_path);

    finish(&mut manifest, ctx, &warnings)?;
    Ok(RunResult {
        peaks: summarize(&model, &reports),
        classification: None,
    })
}

/// Two pumped modes: general phonon self-energy and line at `q₀ = k₁−k₂`,
/// the dominant-channel closed form when the beat hits a phonon branch
/// exactly, and the cooling/heating classification.
pub fn run_two_field(
    ctx: &RunContext,
    k1_a: f64,
    n1: f64,
    k2_a: f64,
    n2: f64,
) -> CliResult<RunResult> {
    let mut warnings = Warnings::new();
    let model = ctx.model(&mut warnings)?;
    ctx.ensure_out_dir()?;
    let k1 = snap_ka(&model, k1_a);
    let k2 = snap_ka(&model, k2_a);
    if k1 == k2 {
        return Err(CliError::Validation(
            "k1 and k2 snap to the same mode".into(),
        ));
    }
    let q0 = k1 - k2;
    let spacing = model.mode_spacing();
    let occ = OccupationState::build(
        &Scenario::TwoFields {
            k1: spacing * k1 as f64,
            n1,
            k2: spacing * k2 as f64,
            n2,
        },
        &model,
        &ModeGrid::new(model.geometry.length, 1)?,
        &mut warnings,
    )?;

    // resonance bookkeeping per branch
    let mut best: Option<(usize, f64)> = None;
    for bi in 0..model.phonons.len() {
        let mismatch = resonance_mismatch(q0, bi, &model);
        if best.map(|(_, m)| mismatch.abs() < m.abs()).unwrap_or(true) {
            best = Some((bi, mismatch));
        }
    }
    let (branch_idx, mismatch) = best.expect("at least one phonon branch");
    let branch = &model.phonons[branch_idx];
    let omega_q0 = branch.omega(spacing * q0 as f64);
    let resonant = mismatch.abs() <= RESONANCE_REL_TOL * omega_q0.max(f64::MIN_POSITIVE);

    // general grid-summed curve around the phonon line
    let lam_res_scale = 2.0 * branch.coupling_f * branch.coupling_f * (n2 - n1).abs()
        / model.photon.gamma.max(f64::MIN_POSITIVE);
    let general_hw = 1.25 * mismatch.abs()
        + 100.0 * model.photon.gamma
        + 10.0 * (branch.damping + lam_res_scale);
    let ggrid = ctx.grid(omega_q0, general_hw, 8001, &mut warnings)?;

    let mut manifest = RunManifest::new(
        "two-field",
        serde_json::json!({
            "k1_a": k1_a, "n1": n1, "k2_a": k2_a, "n2": n2,
            "q0_index": q0,
            "branch": branch.label,
            "resonant": resonant,
            "resonance_mismatch_hz": mismatch / TWO_PI,
        }),
        resolved_config(
            ctx,
            &ggrid,
            Some(ScenarioSection::TwoFields { k1_a, n1, k2_a, n2 }),
        ),
    );

    if !resonant {
        // report the nearest wavenumber where the beat could hit each
        // dispersionless branch
        for (bi, b) in model.phonons.iter().enumerate() {
            if let wgspec_core::model::PhononKind::Vibrational { omega_v } = b.kind {
                let per_mode = model.photon.group_velocity * spacing;
                let q_near = (omega_v / per_mode).round() as i64;
                manifest.note(
                    &format!("nearest_resonant_q_{}", b.label),
                    serde_json::json!(q_near),
                );
                if bi == branch_idx {
                    eprintln!(
                        "note: resonance condition unreachable on the mode grid (mismatch {:.3e} Hz); nearest achievable q index for branch '{}' is {q_near}; proceeding with the general formula",
                        mismatch / TWO_PI,
                        b.label
                    );
                }
            }
        }
    }
    let window_n = ModeGrid::for_window(&model, ggrid.half_width())?
        .n_max()
        .max(q0.abs() / 2 + 2);
    let k_window = ModeGrid::new(model.geometry.length, window_n)?
        .centered_at((k1 + k2).div_euclid(2));
    let g_set = phonon_channels(q0, branch_idx, &occ, &model, &k_window)?;
    let g_curve = g_set.sample(&ggrid);
    let g_sf = dressed_phonon_sf(q0, branch_idx, &g_curve, &model, &k_window)?;
    manifest.set_mode_window(&k_window);
    manifest.grids.insert("phonon_general".into(), grid_info(&ggrid));

    let se_path = ctx.path("phonon_selfenergy_general.csv");
    write_curve_csv(&se_path, selfenergy_rows(&g_curve, None))?;
    manifest.record_output(&se_path);
    let sf_path = ctx.path("phonon_sf_general.csv");
    write_curve_csv(&sf_path, spectral_rows(&g_sf))?;
    manifest.record_output(&sf_path);

    // dominant-channel closed form on exact resonance
    let mut classified_curve = g_curve.clone();
    let mut classified_sf = g_sf.clone();
    if resonant {
        let rgrid = FrequencyGrid::new(
            omega_q0,
            (10.0 * (branch.damping + lam_res_scale)).max(100.0 * model.photon.gamma),
            8001,
        )?;
        let r_curve = two_field_resonant_phonon(q0, branch_idx, n1, n2, &model, &rgrid)?;
        let r_sf = dressed_phonon_sf(q0, branch_idx, &r_curve, &model, &k_window)?;
        let se_path = ctx.path("phonon_selfenergy_resonant.csv");
        write_curve_csv(&se_path, selfenergy_rows(&r_curve, None))?;
        manifest.record_output(&se_path);
        let sf_path = ctx.path("phonon_sf_resonant.csv");
        write_curve_csv(&sf_path, spectral_rows(&r_sf))?;
        manifest.record_output(&sf_path);
        manifest.grids.insert("phonon_resonant".into(), grid_info(&rgrid));
        let lam_res = r_curve.lambda[rgrid.mid()];
        manifest.note("lambda_resonant_hz", serde_json::json!(lam_res / TWO_PI));
        manifest.note(
            "lambda_over_gamma",
            serde_json::json!(lam_res / branch.damping),
        );
        classified_curve = r_curve;
        classified_sf = r_sf;
    }

    // positive interaction damping at the line cools the mode, negative
    // heats it
    let lam_center = classified_curve.lambda[classified_curve.grid.mid()];
    let classification = if lam_center > 0.0 {
        Some("cooling")
    } else if lam_center < 0.0 {
        Some("heating")
    } else {
        None
    };
    manifest.note(
        "classification",
        serde_json::json!(classification.unwrap_or("none")),
    );
    if classified_sf.has_gain() {
        manifest.note(
            "gain_region",
            serde_json::json!("total phonon damping negative near resonance"),
        );
    }

    let report = analyze_peaks(
        &classified_sf.grid,
        &classified_sf.samples,
        Some(omega_q0),
        &[],
    );
    let reports: [(&'static str, &PeakReport); 1] = [("phonon_sf", &report)];
    let peaks_path = ctx.path("peaks.csv");
    write_peaks_csv(&peaks_path, &reports, |l| label_text(&model, l), classification)?;
    manifest.record_output(&peaks_path);

    finish(&mut manifest, ctx, &warnings)?;
    Ok(RunResult {
        peaks: summarize(&model, &reports),
        classification,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OracleScenario {
    Empty,
    SingleField,
    TwoField,
}

/// Compare the time-domain route against the closed form for one subject
/// mode; write both curves, a JSON report, and fail (exit code 2) when
/// the L² deviation exceeds 1% or the peaks drift by more than a grid
/// spacing.
pub fn run_oracle_check(
    ctx: &RunContext,
    scenario: OracleScenario,
    n_max: i64,
    dt_scale: f64,
    ka: Option<f64>,
) -> CliResult<RunResult> {
    let mut warnings = Warnings::new();
    let model = ctx.model(&mut warnings)?;
    ctx.ensure_out_dir()?;
    if 2 * n_max + 1 > 64 {
        return Err(CliError::Validation(format!(
            "oracle check is limited to 64 modes (n_max = {n_max} gives {})",
            2 * n_max + 1
        )));
    }
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN fails closed
    if !(dt_scale > 0.0) {
        return Err(CliError::Validation("dt_scale must be positive".into()));
    }
    let modes = ModeGrid::new(model.geometry.length, n_max)?;

    // resolve the pump scenario and the subject mode
    enum SubjectSpec {
        Photon(i64),
        Phonon(i64, usize),
    }
    let (occ_scenario, subject) = match scenario {
        OracleScenario::Empty => {
            let ka = ka
                .or(match &ctx.config.scenario {
                    Some(ScenarioSection::Empty { k_a }) => Some(*k_a),
                    _ => None,
                })
                .unwrap_or(2.0);
            (Scenario::EmptyCavity, SubjectSpec::Photon(snap_ka(&model, ka)))
        }
        OracleScenario::SingleField => {
            let Some(ScenarioSection::SingleField { k0_a, n0, power_w }) =
                ctx.config.scenario.clone()
            else {
                return Err(CliError::Validation(
                    "oracle-check --scenario single-field needs a single_field scenario in the config".into(),
                ));
            };
            let n0 = resolve_pump(n0, power_w, &ctx.config)?;
            let k0 = snap_ka(&model, k0_a);
            (
                Scenario::SingleField {
                    k0: modes.wavenumber(k0),
                    n0,
                },
                SubjectSpec::Photon(k0),
            )
        }
        OracleScenario::TwoField => {
            let Some(ScenarioSection::TwoFields { k1_a, n1, k2_a, n2 }) =
                ctx.config.scenario.clone()
            else {
                return Err(CliError::Validation(
                    "oracle-check --scenario two-field needs a two_fields scenario in the config".into(),
                ));
            };
            let k1 = snap_ka(&model, k1_a);
            let k2 = snap_ka(&model, k2_a);
            let q0 = k1 - k2;
            let mut best = (0usize, f64::INFINITY);
            for bi in 0..model.phonons.len() {
                let m = resonance_mismatch(q0, bi, &model).abs();
                if m < best.1 {
                    best = (bi, m);
                }
            }
            (
                Scenario::TwoFields {
                    k1: modes.wavenumber(k1),
                    n1,
                    k2: modes.wavenumber(k2),
                    n2,
                },
                SubjectSpec::Phonon(q0, best.0),
            )
        }
    };
    let occ = OccupationState::build(&occ_scenario, &model, &modes, &mut warnings)?;

    let (system, reference, closed): (OracleSystem, f64, SpectralCurve);
    let grid;
    match subject {
        SubjectSpec::Photon(k_index) => {
            reference = model.photon.omega(modes.wavenumber(k_index));
            grid = ctx.grid(reference, TWO_PI * 10e9, 2001, &mut warnings)?;
            let m = photon_m_channels(k_index, &occ, &model, &modes)?.sample(&grid);
            let em = photon_em_channels(k_index, &occ, &model, &modes)?.sample(&grid);
            closed = dressed_photon_sf(k_index, &m.sum(&em), &model, &modes)?;
            system = OracleSystem::photon(k_index, &occ, &model, &modes)?;
        }
        SubjectSpec::Phonon(q0, branch_idx) => {
            reference = model.phonons[branch_idx].omega(modes.wavenumber(q0));
            grid = ctx.grid(reference, TWO_PI * 200e6, 2001, &mut warnings)?;
            let se: SelfEnergyCurve =
                phonon_channels(q0, branch_idx, &occ, &model, &modes)?.sample(&grid);
            closed = dressed_phonon_sf(q0, branch_idx, &se, &model, &modes)?;
            system = OracleSystem::phonon(q0, branch_idx, &occ, &model, &modes)?;
        }
    }

    let dt = system.suggested_dt() * dt_scale;
    let t_max = system.suggested_t_max();
    let steps = (t_max / dt) as u64;
    if steps > 200_000_000 {
        return Err(CliError::Validation(format!(
            "estimated {steps} integration steps exceed the desk-scale budget; \
             use a configuration with wider mode spacing or stronger damping"
        )));
    }
    let traj = match evolve(&system, t_max, dt) {
        Ok(t) => t,
        Err(e @ CoreError::Instability { .. }) => {
            return Err(CliError::Numerical(e.to_string()));
        }
        Err(e) => return Err(e.into()),
    };
    let oracle_sf = transform_to_sf(&traj, &grid, &mut warnings);

    let num: f64 = oracle_sf
        .samples
        .iter()
        .zip(&closed.samples)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    let den: f64 = closed.samples.iter().map(|b| b * b).sum();
    let l2 = (num / den).sqrt();
    let peak_closed = find_peaks(&grid, &closed.samples);
    let peak_oracle = find_peaks(&grid, &oracle_sf.samples);
    let peak_delta = match (peak_closed.dominant(), peak_oracle.dominant()) {
        (Some(a), Some(b)) => (a.center - b.center).abs(),
        _ => f64::INFINITY,
    };
    let pass = l2 <= 1e-2 && peak_delta <= grid.spacing();

    let mut manifest = RunManifest::new(
        "oracle-check",
        serde_json::json!({
            "scenario": format!("{scenario:?}"),
            "n_max": n_max,
            "dt_scale": dt_scale,
        }),
        resolved_config(ctx, &grid, ctx.config.scenario.clone()),
    );
    manifest.set_mode_window(&modes);
    manifest.grids.insert("subject".into(), grid_info(&grid));

    for (name, curve) in [("sf_closed.csv", &closed), ("sf_oracle.csv", &oracle_sf)] {
        let path = ctx.path(name);
        write_curve_csv(&path, spectral_rows(curve))?;
        manifest.record_output(&path);
    }
    let report = serde_json::json!({
        "l2_relative_error": l2,
        "threshold": 1e-2,
        "peak_center_delta_rad_s": peak_delta,
        "grid_spacing_rad_s": grid.spacing(),
        "dt_s": dt,
        "t_max_s": t_max,
        "steps": steps,
        "channels": system.channels.len(),
        "reference_hz": reference / TWO_PI,
        "pass": pass,
    });
    let report_path = ctx.path("oracle_report.json");
    std::fs::write(&report_path, serde_json::to_string_pretty(&report)?)?;
    manifest.record_output(&report_path);
    finish(&mut manifest, ctx, &warnings)?;

    println!(
        "oracle check {}: L2 relative error {l2:.3e} (threshold 1e-2), peak offset {:.2} grid spacings",
        if pass { "PASS" } else { "FAIL" },
        peak_delta / grid.spacing()
    );
    if !pass {
        return Err(CliError::Numerical(format!(
            "oracle deviates from the closed form: L2 = {l2:.3e}, peak offset = {peak_delta:.3e} rad/s"
        )));
    }
    Ok(RunResult::default())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SweepAxis {
    #[value(name = "T")]
    Temperature,
    #[value(name = "N0")]
    N0,
    #[value(name = "N1")]
    N1,
    #[value(name = "N2")]
    N2,
    #[value(name = "k_a")]
    Ka,
    #[value(name = "f_hz")]
    FHz,
    #[value(name = "Gamma_hz")]
    GammaPhononHz,
    #[value(name = "gamma_hz")]
    GammaPhotonHz,
}

fn apply_axis(config: &ConfigDoc, axis: SweepAxis, value: f64) -> CliResult<ConfigDoc> {
    let mut cfg = config.clone();
    match axis {
        SweepAxis::Temperature => cfg.waveguide.temperature_k = value,
        SweepAxis::GammaPhotonHz => cfg.photon.gamma_hz = value,
        SweepAxis::FHz => {
            for p in &mut cfg.phonons {
                match p {
                    crate::config::PhononSection::Acoustic { f_hz, .. } => *f_hz = value,
                    crate::config::PhononSection::Vibrational { f_hz, .. } => *f_hz = value,
                }
            }
        }
        SweepAxis::GammaPhononHz => {
            for p in &mut cfg.phonons {
                match p {
                    crate::config::PhononSection::Acoustic { damping_hz, .. } => {
                        *damping_hz = value
                    }
                    crate::config::PhononSection::Vibrational { damping_hz, .. } => {
                        *damping_hz = value
                    }
                }
            }
        }
        SweepAxis::N0 => match &mut cfg.scenario {
            Some(ScenarioSection::SingleField { n0, power_w, .. }) => {
                *n0 = Some(value);
                *power_w = None;
            }
            _ => {
                return Err(CliError::Validation(
                    "axis N0 needs a single_field scenario".into(),
                ))
            }
        },
        SweepAxis::N1 => match &mut cfg.scenario {
            Some(ScenarioSection::TwoFields { n1, .. }) => *n1 = value,
            _ => {
                return Err(CliError::Validation(
                    "axis N1 needs a two_fields scenario".into(),
                ))
            }
        },
        SweepAxis::N2 => match &mut cfg.scenario {
            Some(ScenarioSection::TwoFields { n2, .. }) => *n2 = value,
            _ => {
                return Err(CliError::Validation(
                    "axis N2 needs a two_fields scenario".into(),
                ))
            }
        },
        SweepAxis::Ka => match &mut cfg.scenario {
            Some(ScenarioSection::Empty { k_a }) => *k_a = value,
            Some(ScenarioSection::SingleField { k0_a, .. }) => *k0_a = value,
            Some(ScenarioSection::TwoFields { k1_a, .. }) => *k1_a = value,
            _ => {
                return Err(CliError::Validation(
                    "axis k_a needs an empty, single_field or two_fields scenario".into(),
                ))
            }
        },
    }
    Ok(cfg)
}

fn run_scenario(ctx: &RunContext) -> CliResult<RunResult> {
    match ctx.config.scenario.clone() {
        Some(ScenarioSection::Empty { k_a }) => run_empty(ctx, k_a),
        Some(ScenarioSection::SingleField { k0_a, .. }) => {
            run_single_field(ctx, k0_a, None, None, None)
        }
        Some(ScenarioSection::TwoFields { k1_a, n1, k2_a, n2 }) => {
            run_two_field(ctx, k1_a, n1, k2_a, n2)
        }
        Some(ScenarioSection::Custom { .. }) => Err(CliError::Validation(
            "sweep does not support custom scenarios".into(),
        )),
        None => run_empty(ctx, 2.0),
    }
}

fn sweep_threads() -> usize {
    std::env::var("WGSPEC_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

/// One sub-run per value of the swept parameter, executed concurrently,
/// plus a summary table of every sub-run's peaks.
pub fn run_sweep(ctx: &RunContext, axis: SweepAxis, values: &[f64]) -> CliResult<RunResult> {
    if values.is_empty() {
        return Err(CliError::Validation("sweep values list is empty".into()));
    }
    ctx.ensure_out_dir()?;
    let axis_name = match axis {
        SweepAxis::Temperature => "T",
        SweepAxis::N0 => "N0",
        SweepAxis::N1 => "N1",
        SweepAxis::N2 => "N2",
        SweepAxis::Ka => "k_a",
        SweepAxis::FHz => "f_hz",
        SweepAxis::GammaPhononHz => "Gamma_hz",
        SweepAxis::GammaPhotonHz => "gamma_hz",
    };

    // pre-validate every mutation before spawning work
    let mut jobs = Vec::new();
    for &v in values {
        let cfg = apply_axis(&ctx.config, axis, v)?;
        let sub = ctx.out_dir.join(format!("{axis_name}={v}"));
        jobs.push((v, cfg, sub));
    }

    let threads = sweep_threads().min(jobs.len());
    let mut results: Vec<Option<CliResult<RunResult>>> = Vec::new();
    results.resize_with(jobs.len(), || None);
    let grid_halfwidth_hz = ctx.grid_halfwidth_hz;
    let grid_points = ctx.grid_points;
    std::thread::scope(|scope| {
        // striped assignment: thread t takes jobs t, t+threads, ...
        let mut remaining: Vec<(usize, &mut Option<CliResult<RunResult>>)> =
            results.iter_mut().enumerate().collect();
        let mut handles = Vec::new();
        for tid in 0..threads {
            let (mine, rest): (Vec<_>, Vec<_>) =
                remaining.into_iter().partition(|(i, _)| i % threads == tid);
            remaining = rest;
            let jobs = &jobs;
            handles.push(scope.spawn(move || {
                for (i, slot) in mine {
                    let (_, cfg, sub) = &jobs[i];
                    let sub_ctx = RunContext {
                        config: cfg.clone(),
                        out_dir: sub.clone(),
                        grid_halfwidth_hz,
                        grid_points,
                    };
                    *slot = Some(run_scenario(&sub_ctx));
                }
            }));
        }
        for h in handles {
            h.join().expect("sweep worker run");
        }
    });

    // assemble the summary in the values' order
    let mut text = String::from(
        "axis_value,curve,peak_center_rad_s,peak_fwhm_rad_s,peak_height,peak_shift_rad_s,channel_id,classification\n",
    );
    let mut sub_dirs = Vec::new();
    for ((v, _, sub), result) in jobs.iter().zip(results) {
        let result = result.expect("slot filled")?;
        sub_dirs.push(sub.file_name().unwrap().to_string_lossy().into_owned());
        for p in &result.peaks {
            use std::fmt::Write as _;
            let _ = write!(text, "{v},{},{},{},{}", p.curve, p.center, p.fwhm, p.height);
            text.push(',');
            if let Some(s) = p.shift {
                let _ = write!(text, "{s}");
            }
            let _ = write!(text, ",{},", p.channel_id);
            text.push_str(result.classification.unwrap_or(""));
            text.push('\n');
        }
    }
    let summary_path = ctx.path("sweep_summary.csv");
    std::fs::write(&summary_path, text)?;

    let mut manifest = RunManifest::new(
        "sweep",
        serde_json::json!({
            "axis": axis_name,
            "values": values,
            "threads": threads,
            "sub_runs": sub_dirs,
        }),
        ctx.config.clone(),
    );
    manifest.record_output(&summary_path);
    manifest.write(&ctx.path("manifest.json"))?;
    Ok(RunResult::default())
}

/// The config document as actually used, with scenario and main grid
/// resolved, for embedding into manifests.
fn resolved_config(
    ctx: &RunContext,
    grid: &FrequencyGrid,
    scenario: Option<ScenarioSection>,
) -> ConfigDoc {
    let mut cfg = ctx.config.clone();
    if scenario.is_some() {
        cfg.scenario = scenario;
    }
    cfg.grid = Some(GridSection {
        center_hz: Some(grid.center() / TWO_PI),
        halfwidth_hz: grid.half_width() / TWO_PI,
        points: grid.len(),
    });
    cfg
}
