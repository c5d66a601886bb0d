//! End-to-end sensing run: frame -> echo -> periodograms -> ghost removal.

use isac_core::channel::receive;
use isac_core::deghost::{classify, fuse_with, Algorithm, FusedProfile};
use isac_core::estimator::{
    divide, estimate_velocity, metrics, range_profile, Detection, DopplerProfile, Metrics, RangeProfile,
};
use isac_core::grid::ReKind;
use isac_core::refsig::build_frame;
use isac_core::SPEED_OF_LIGHT;

use crate::config::SensingScenario;

#[derive(Debug, Clone)]
pub struct SensingReport {
    pub algorithm: Algorithm,
    pub prs_profile: RangeProfile,
    pub dmrs_profile: RangeProfile,
    pub fused: FusedProfile,
    /// Doppler profile after compensating the strongest detection's delay.
    pub doppler: Option<DopplerProfile>,
    pub detections: Vec<Detection>,
    pub metrics: Metrics,
    pub info_bits: u64,
}

pub fn run_sensing(scenario: &SensingScenario) -> isac_core::Result<SensingReport> {
    let numerology = scenario.numerology;
    let scs = numerology.scs_hz();
    let frame = build_frame(numerology, &scenario.prs, &scenario.dmrs, &scenario.pdsch)?;
    let rx = receive(&frame.grid, &scenario.channel)?;

    let prs_ref = frame.grid.extract_kind(ReKind::Prs);
    let dmrs_ref = frame.grid.extract_kind(ReKind::Dmrs);
    let pilot_ref = frame.grid.extract_where(|k| matches!(k, ReKind::Prs | ReKind::Dmrs));
    let g_prs = divide(&rx, &prs_ref)?;
    let g_dmrs = divide(&rx, &dmrs_ref)?;
    let g_pilot = divide(&rx, &pilot_ref)?;

    let prs_profile = range_profile(&g_prs, scenario.m_a, scs)?;
    let dmrs_profile = range_profile(&g_dmrs, scenario.m_a, scs)?;
    let algorithm = scenario.algorithm.resolve(scenario.prs.comb_size);
    let fused = fuse_with(&g_prs, &g_dmrs, algorithm, scenario.m_a, scs, scenario.align_phase)?;

    let det = &scenario.detector;
    let peaks = classify(
        &fused.magnitudes,
        fused.bin_scale_m,
        det.max_peaks,
        det.min_sep_bins,
        det.rel_threshold,
    );

    let mut detections = Vec::with_capacity(peaks.len());
    let mut doppler = None;
    let strongest = peaks
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.magnitude.total_cmp(&b.1.magnitude).then(b.0.cmp(&a.0)))
        .map(|(i, _)| i);
    for (i, peak) in peaks.iter().enumerate() {
        let delay = peak.bistatic_range_m / SPEED_OF_LIGHT;
        let (profile, velocity) = estimate_velocity(&g_pilot, delay, scenario.n_a, &numerology)?;
        if Some(i) == strongest {
            doppler = Some(profile);
        }
        detections.push(Detection {
            bistatic_range_m: peak.bistatic_range_m,
            velocity_mps: velocity,
            peak_magnitude: peak.magnitude,
        });
    }

    Ok(SensingReport {
        algorithm,
        prs_profile,
        dmrs_profile,
        fused,
        doppler,
        detections,
        metrics: metrics(&numerology, scenario.prs.comb_size),
        info_bits: frame.info_bits,
    })
}
