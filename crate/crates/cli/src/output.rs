//! CSV emission. One fixed schema serves every curve file:
//! `omega_rad_s, detuning_rad_s, delta_rad_s, lambda_rad_s, sf_s, channel_id`
//! with absent quantities left as empty fields. Floats are printed in
//! Rust's shortest round-trip form, so identical runs produce identical
//! bytes.

use std::fmt::Write as _;
use std::path::Path;

use wgspec_core::model::FrequencyGrid;
use wgspec_core::selfenergy::SelfEnergyCurve;
use wgspec_core::spectral::{PeakReport, SpectralCurve};

use crate::error::CliResult;

pub const CURVE_HEADER: &str = "omega_rad_s,detuning_rad_s,delta_rad_s,lambda_rad_s,sf_s,channel_id";

#[derive(Debug, Clone, Default)]
pub struct CurveRow {
    pub omega: Option<f64>,
    pub detuning: Option<f64>,
    pub delta: Option<f64>,
    pub lambda: Option<f64>,
    pub sf: Option<f64>,
    pub channel: Option<String>,
}

fn push_opt(line: &mut String, v: Option<f64>) {
    if let Some(x) = v {
        let _ = write!(line, "{x}");
    }
}

pub fn write_curve_csv(path: &Path, rows: impl Iterator<Item = CurveRow>) -> CliResult<()> {
    let mut text = String::from(CURVE_HEADER);
    text.push('\n');
    for row in rows {
        push_opt(&mut text, row.omega);
        text.push(',');
        push_opt(&mut text, row.detuning);
        text.push(',');
        push_opt(&mut text, row.delta);
        text.push(',');
        push_opt(&mut text, row.lambda);
        text.push(',');
        push_opt(&mut text, row.sf);
        text.push(',');
        if let Some(c) = &row.channel {
            text.push_str(c);
        }
        text.push('\n');
    }
    std::fs::write(path, text)?;
    Ok(())
}

/// Rows of a self-energy curve sampled on an absolute frequency grid.
pub fn selfenergy_rows<'a>(
    curve: &'a SelfEnergyCurve,
    channel: Option<String>,
) -> impl Iterator<Item = CurveRow> + 'a {
    let grid = curve.grid.clone();
    (0..grid.len()).map(move |i| CurveRow {
        omega: Some(grid.omega(i)),
        detuning: Some(grid.detuning(i)),
        delta: Some(curve.delta[i]),
        lambda: Some(curve.lambda[i]),
        sf: None,
        channel: channel.clone(),
    })
}

/// Rows of a per-channel curve expressed directly in detuning.
pub fn detuning_rows<'a>(
    curve: &'a SelfEnergyCurve,
    channel: String,
) -> impl Iterator<Item = CurveRow> + 'a {
    let grid = curve.grid.clone();
    (0..grid.len()).map(move |i| CurveRow {
        omega: None,
        detuning: Some(grid.omega(i)),
        delta: Some(curve.delta[i]),
        lambda: Some(curve.lambda[i]),
        sf: None,
        channel: Some(channel.clone()),
    })
}

pub fn spectral_rows<'a>(curve: &'a SpectralCurve) -> impl Iterator<Item = CurveRow> + 'a {
    let grid = curve.grid.clone();
    (0..grid.len()).map(move |i| CurveRow {
        omega: Some(grid.omega(i)),
        detuning: Some(grid.detuning(i)),
        delta: None,
        lambda: None,
        sf: Some(curve.samples[i]),
        channel: None,
    })
}

pub const PEAKS_HEADER: &str =
    "curve,center_rad_s,fwhm_rad_s,height,shift_rad_s,channel_id,low_confidence,classification";

/// Peak table covering one or more named curves of a run. `labeler` maps
/// a peak's channel tag to an output id; `classification` tags every row
/// (cooling/heating), when known.
pub fn write_peaks_csv(
    path: &Path,
    reports: &[(&str, &PeakReport)],
    labeler: impl Fn(&wgspec_core::spectral::ChannelLabel) -> String,
    classification: Option<&str>,
) -> CliResult<()> {
    let mut text = String::from(PEAKS_HEADER);
    text.push('\n');
    for (curve, report) in reports {
        for p in &report.peaks {
            let _ = write!(text, "{curve},{},{},{}", p.center, p.fwhm, p.height);
            text.push(',');
            if let Some(s) = p.shift_vs_bare {
                let _ = write!(text, "{s}");
            }
            text.push(',');
            if let Some(c) = &p.channel {
                text.push_str(&labeler(c));
            }
            let _ = write!(text, ",{}", p.low_confidence);
            text.push(',');
            if let Some(c) = classification {
                text.push_str(c);
            }
            text.push('\n');
        }
    }
    std::fs::write(path, text)?;
    Ok(())
}

/// Ensure `points` is odd, as the symmetric grids require.
pub fn oddify(points: usize, warnings: &mut wgspec_core::Warnings) -> usize {
    if points.is_multiple_of(2) {
        warnings.push(format!("grid points {points} bumped to {}", points + 1));
        points + 1
    } else {
        points
    }
}

/// Grid summary for manifests, in IO units (Hz).
pub fn grid_info(grid: &FrequencyGrid) -> serde_json::Value {
    serde_json::json!({
        "center_hz": grid.center() / wgspec_core::constants::TWO_PI,
        "halfwidth_hz": grid.half_width() / wgspec_core::constants::TWO_PI,
        "points": grid.len(),
    })
}
