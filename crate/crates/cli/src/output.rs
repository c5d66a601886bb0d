//! Text renderings of run results. CSV uses `,` separators, `.` decimals,
//! LF line endings and a header row; floats carry 9 significant digits.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use isac_core::allocator::{AllocPlan, Surface};
use isac_core::estimator::{DopplerProfile, Metrics};
use isac_core::SPEED_OF_LIGHT;

use crate::simulate::SensingReport;
use crate::table::AmbiguityTable;

const SIG_DIGITS: i32 = 9;

/// Plain decimal with 9 significant digits; no exponent notation.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_finite() { "0".to_string() } else { x.to_string() };
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (SIG_DIGITS - 1 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.starts_with("-") && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

fn normalized(values: &[f64]) -> impl Iterator<Item = f64> + '_ {
    let max = values.iter().copied().fold(0.0, f64::max);
    values.iter().map(move |v| if max > 0.0 { v / max } else { 0.0 })
}

/// `bin,range_m,magnitude,normalized_magnitude`.
pub fn range_profile_csv(magnitudes: &[f64], bin_scale_m: f64) -> String {
    let mut out = String::from("bin,range_m,magnitude,normalized_magnitude\n");
    for (bin, (mag, norm)) in magnitudes.iter().zip(normalized(magnitudes)).enumerate() {
        let _ = writeln!(
            out,
            "{bin},{},{},{}",
            fmt_sig(bin as f64 * bin_scale_m),
            fmt_sig(*mag),
            fmt_sig(norm)
        );
    }
    out
}

/// `bin,doppler_hz,velocity_mps,magnitude,normalized_magnitude`.
pub fn doppler_profile_csv(profile: &DopplerProfile, fc_hz: f64) -> String {
    let mut out = String::from("bin,doppler_hz,velocity_mps,magnitude,normalized_magnitude\n");
    for (bin, (mag, norm)) in profile
        .magnitudes
        .iter()
        .zip(normalized(&profile.magnitudes))
        .enumerate()
    {
        let fd = profile.doppler_of(bin);
        let _ = writeln!(
            out,
            "{bin},{},{},{},{}",
            fmt_sig(fd),
            fmt_sig(fd * SPEED_OF_LIGHT / (2.0 * fc_hz)),
            fmt_sig(*mag),
            fmt_sig(norm)
        );
    }
    out
}

/// One detection per line: `range_m, velocity_mps, peak`.
pub fn detections_txt(report: &SensingReport) -> String {
    report
        .detections
        .iter()
        .map(|d| {
            format!(
                "{}, {}, {}\n",
                fmt_sig(d.bistatic_range_m),
                fmt_sig(d.velocity_mps),
                fmt_sig(d.peak_magnitude)
            )
        })
        .collect()
}

pub fn metrics_txt(m: &Metrics, report: &SensingReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "range_resolution_m = {}", fmt_sig(m.range_resolution_m));
    let _ = writeln!(out, "max_range_m = {}", fmt_sig(m.max_range_m));
    let _ = writeln!(out, "velocity_resolution_mps = {}", fmt_sig(m.velocity_resolution_mps));
    let _ = writeln!(out, "max_velocity_mps = {}", fmt_sig(m.max_velocity_mps));
    let _ = writeln!(out, "ambiguity_interval_m = {}", fmt_sig(m.ambiguity_interval_m));
    let _ = writeln!(out, "range_bin_m = {}", fmt_sig(report.fused.bin_scale_m));
    if let Some(d) = &report.doppler {
        let _ = writeln!(out, "doppler_bin_hz = {}", fmt_sig(d.bin_scale_hz));
    }
    let _ = writeln!(out, "algorithm = {}", report.algorithm);
    let _ = writeln!(out, "pdsch_info_bits = {}", report.info_bits);
    out
}

/// Every file of a sensing run, as (name, contents).
pub fn sensing_files(report: &SensingReport, fc_hz: f64) -> Vec<(&'static str, String)> {
    let mut files = vec![
        (
            "range_profile_prs.csv",
            range_profile_csv(&report.prs_profile.magnitudes, report.prs_profile.bin_scale_m),
        ),
        (
            "range_profile_dmrs.csv",
            range_profile_csv(&report.dmrs_profile.magnitudes, report.dmrs_profile.bin_scale_m),
        ),
        (
            "range_profile_fused.csv",
            range_profile_csv(&report.fused.magnitudes, report.fused.bin_scale_m),
        ),
        ("detections.txt", detections_txt(report)),
        ("metrics.txt", metrics_txt(&report.metrics, report)),
    ];
    if let Some(d) = &report.doppler {
        files.push(("doppler_profile.csv", doppler_profile_csv(d, fc_hz)));
    }
    files
}

/// `m_sens,n_sens,F`.
pub fn surface_csv(surface: &Surface) -> String {
    let mut out = String::from("m_sens,n_sens,F\n");
    for ((i, j), f) in surface.values.indexed_iter() {
        let _ = writeln!(out, "{},{},{}", i + 1, j + 1, fmt_sig(*f));
    }
    out
}

pub fn optimum_txt(plan: &AllocPlan) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "m_comm = {}", plan.m0);
    let _ = writeln!(out, "n_comm = {}", plan.n0);
    for (k, (m, n)) in plan.sensing.iter().enumerate() {
        let _ = writeln!(out, "m_sens_{} = {m}", k + 1);
        let _ = writeln!(out, "n_sens_{} = {n}", k + 1);
    }
    let _ = writeln!(out, "m_sens = {}", plan.sensing_prbs());
    let _ = writeln!(out, "n_sens = {}", plan.sensing_slots());
    let _ = writeln!(out, "F = {}", fmt_sig(plan.objective));
    out
}

/// One row per subcarrier spacing, one column per comb.
pub fn ambiguity_table_txt(table: &AmbiguityTable) -> String {
    let mut out = String::from("scs_khz");
    for comb in &table.combs {
        let _ = write!(out, ",comb{comb}");
    }
    out.push('\n');
    for (scs, row) in table.scs_khz.iter().zip(&table.values) {
        let _ = write!(out, "{scs}");
        for v in row {
            let _ = write!(out, ",{v:.1}");
        }
        out.push('\n');
    }
    out
}

pub fn write_files(dir: &Path, files: &[(&str, String)]) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    for (name, contents) in files {
        fs::write(dir.join(name), contents)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(4996.540966666667), "4996.54097");
        assert_eq!(fmt_sig(0.7654014961192811), "0.765401496");
        assert_eq!(fmt_sig(-3.5), "-3.50000000");
        assert_eq!(fmt_sig(1.0), "1.00000000");
        assert_eq!(fmt_sig(123456789012.0), "123456789012");
    }

    #[test]
    fn range_csv_layout() {
        let csv = range_profile_csv(&[0.0, 2.0, 1.0], 0.5);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "bin,range_m,magnitude,normalized_magnitude");
        assert_eq!(lines[2], "1,0.500000000,2.00000000,1.00000000");
        assert!(csv.ends_with('\n') && !csv.contains('\r'));
    }
}
