//! Range-ghost removal by fusing PRS and DMRS observations.
//!
//! A comb-K PRS only samples every K-th subcarrier per symbol, so its range
//! periodogram repeats every `M m_a / K` bins. DMRS config type 2 has a
//! different frequency pattern and therefore different ghosts.
//!
//! * [`Algorithm::Hadamard`] (comb 2 and 4): multiply the two averaged
//!   magnitude profiles element-wise; only bins where both peak survive.
//! * [`Algorithm::JointIfft`] (comb 6 and 12): sum each `g` matrix over its
//!   symbols, scale each to unit peak magnitude, add them and take a single
//!   IFFT. At these combs the ghost sets of the two signals overlap, so the
//!   product would keep some of them.
//!
//! PRS and DMRS usually sit in different slots, so a moving target leaves
//! the two collapsed spectra with different carrier phases. Added as they
//! are, they can partly cancel. [`align_phase`] rotates the DMRS spectrum
//! onto the PRS one first; [`fuse`] applies it, [`fuse_with`] makes it
//! optional.

use std::fmt;
use std::str::FromStr;

use ndarray::{Array2, Axis};
use num_complex::Complex64;

use crate::estimator::{detect_peaks, normalize, range_profile, RangeProfile};
use crate::fft::Transform;
use crate::{Error, Result, SPEED_OF_LIGHT};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    /// Element-wise product of the PRS and DMRS range profiles.
    Hadamard,
    /// Single IFFT of the normalized, symbol-summed PRS and DMRS spectra.
    JointIfft,
}

impl Algorithm {
    /// Comb 2/4 use the product, comb 6/12 the joint IFFT.
    pub fn for_comb(comb_size: usize) -> Self {
        if comb_size <= 4 {
            Algorithm::Hadamard
        } else {
            Algorithm::JointIfft
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Hadamard => "alg1",
            Algorithm::JointIfft => "alg2",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "alg1" | "hadamard" => Ok(Algorithm::Hadamard),
            "alg2" | "joint" => Ok(Algorithm::JointIfft),
            other => Err(Error::Config(format!(
                "unknown de-ghosting algorithm '{other}' (expected alg1 or alg2)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FusedProfile {
    pub magnitudes: Vec<f64>,
    pub bin_scale_m: f64,
    pub method: Algorithm,
}

impl FusedProfile {
    pub fn len(&self) -> usize {
        self.magnitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.magnitudes.is_empty()
    }

    pub fn normalized(&self) -> Vec<f64> {
        normalize(&self.magnitudes)
    }
}

/// A peak of a range-type profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangePeak {
    pub bin: usize,
    pub bistatic_range_m: f64,
    /// Height relative to the profile maximum, in (0, 1].
    pub magnitude: f64,
}

fn same_scale(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs())
}

/// Element-wise product of two range profiles on the same bin grid.
pub fn combine_hadamard(prs: &RangeProfile, dmrs: &RangeProfile) -> Result<FusedProfile> {
    if prs.len() != dmrs.len() || !same_scale(prs.bin_scale_m, dmrs.bin_scale_m) {
        return Err(Error::Usage(format!(
            "profiles differ ({} bins of {:.6} m vs {} bins of {:.6} m); recompute them with match_lengths",
            prs.len(),
            prs.bin_scale_m,
            dmrs.len(),
            dmrs.bin_scale_m
        )));
    }
    Ok(FusedProfile {
        magnitudes: prs
            .magnitudes
            .iter()
            .zip(&dmrs.magnitudes)
            .map(|(a, b)| a * b)
            .collect(),
        bin_scale_m: prs.bin_scale_m,
        method: Algorithm::Hadamard,
    })
}

/// A divided grid and the oversampling factor its profile was computed with.
#[derive(Debug, Clone, Copy)]
pub struct RangeInput<'a> {
    pub g: &'a Array2<Complex64>,
    pub m_a: usize,
}

/// Range profiles of both inputs on a common bin grid. The input with the
/// shorter `m_a M` gets a larger IFFT so both end up with the longer length.
pub fn match_lengths(a: RangeInput<'_>, b: RangeInput<'_>, scs_hz: f64) -> Result<(RangeProfile, RangeProfile)> {
    let len_a = a.m_a * a.g.nrows();
    let len_b = b.m_a * b.g.nrows();
    let target = len_a.max(len_b);
    let factor = |input: &RangeInput<'_>| -> Result<usize> {
        let rows = input.g.nrows();
        if rows == 0 || !target.is_multiple_of(rows) {
            return Err(Error::Usage(format!(
                "cannot stretch {rows} subcarriers to {target} bins with an integer IFFT factor"
            )));
        }
        Ok(target / rows)
    };
    let (fa, fb) = (factor(&a)?, factor(&b)?);
    Ok((range_profile(a.g, fa, scs_hz)?, range_profile(b.g, fb, scs_hz)?))
}

/// g_tot(m) = sum over n of g(m, n).
pub fn column_collapse(g: &Array2<Complex64>) -> Vec<Complex64> {
    g.sum_axis(Axis(1)).to_vec()
}

/// Divides by the largest magnitude so the result peaks at exactly 1.
pub fn normalize_max(v: &[Complex64]) -> Result<Vec<Complex64>> {
    let max = v.iter().map(|x| x.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return Err(Error::Usage("cannot normalize an all-zero vector".into()));
    }
    Ok(v.iter().map(|x| x / max).collect())
}

/// r(l) = |IFFT(prs + dmrs)| over `m_a M` points, the shorter vector zero-padded.
pub fn joint_profile(prs: &[Complex64], dmrs: &[Complex64], m_a: usize, scs_hz: f64) -> Result<FusedProfile> {
    if m_a == 0 {
        return Err(Error::Usage("range oversampling factor must be at least 1".into()));
    }
    let m_len = prs.len().max(dmrs.len());
    if m_len == 0 {
        return Err(Error::Usage("joint profile of two empty vectors".into()));
    }
    let zero = Complex64::default();
    let sum = (0..m_len).map(|m| prs.get(m).unwrap_or(&zero) + dmrs.get(m).unwrap_or(&zero));
    let mut ifft = Transform::inverse(m_a * m_len);
    let mut buf = Vec::new();
    ifft.run(sum, &mut buf);
    Ok(FusedProfile {
        magnitudes: buf.iter().map(|x| x.norm()).collect(),
        bin_scale_m: SPEED_OF_LIGHT / (m_a as f64 * scs_hz * m_len as f64),
        method: Algorithm::JointIfft,
    })
}

/// Rotates `v` by the phase of `<reference, v>` so both share one carrier
/// phase. Returns `v` unchanged when the two have no common support.
pub fn align_phase(reference: &[Complex64], v: &[Complex64]) -> Vec<Complex64> {
    let inner: Complex64 = reference.iter().zip(v).map(|(r, x)| r.conj() * x).sum();
    if inner.norm() == 0.0 {
        return v.to_vec();
    }
    let rot = (inner / inner.norm()).conj();
    v.iter().map(|x| x * rot).collect()
}

/// [`fuse_with`] with phase alignment enabled.
pub fn fuse(
    g_prs: &Array2<Complex64>,
    g_dmrs: &Array2<Complex64>,
    algorithm: Algorithm,
    m_a: usize,
    scs_hz: f64,
) -> Result<FusedProfile> {
    fuse_with(g_prs, g_dmrs, algorithm, m_a, scs_hz, true)
}

/// Runs the selected algorithm on the divided PRS and DMRS matrices.
/// `align` only affects [`Algorithm::JointIfft`]; the Hadamard path works
/// on magnitudes.
pub fn fuse_with(
    g_prs: &Array2<Complex64>,
    g_dmrs: &Array2<Complex64>,
    algorithm: Algorithm,
    m_a: usize,
    scs_hz: f64,
    align: bool,
) -> Result<FusedProfile> {
    match algorithm {
        Algorithm::Hadamard => {
            let (prs, dmrs) = match_lengths(RangeInput { g: g_prs, m_a }, RangeInput { g: g_dmrs, m_a }, scs_hz)?;
            combine_hadamard(&prs, &dmrs)
        }
        Algorithm::JointIfft => {
            // A silent observation (no echo at all) stays silent.
            let collapse = |g| {
                let tot = column_collapse(g);
                normalize_max(&tot).unwrap_or(tot)
            };
            let prs = collapse(g_prs);
            let mut dmrs = collapse(g_dmrs);
            if align {
                dmrs = align_phase(&prs, &dmrs);
            }
            joint_profile(&prs, &dmrs, m_a, scs_hz)
        }
    }
}

/// Peaks of a profile above `rel_threshold` of its maximum, as bistatic ranges.
pub fn classify(
    magnitudes: &[f64],
    bin_scale_m: f64,
    k_expected: usize,
    min_sep_bins: usize,
    rel_threshold: f64,
) -> Vec<RangePeak> {
    let normalized = normalize(magnitudes);
    detect_peaks(&normalized, k_expected, min_sep_bins, rel_threshold)
        .into_iter()
        .map(|bin| RangePeak {
            bin,
            bistatic_range_m: bin as f64 * bin_scale_m,
            magnitude: normalized[bin],
        })
        .collect()
}
