//! Two-stage periodogram estimator.
//!
//! 1. Point-wise division of the received grid by the known reference.
//! 2. Range: zero-padded IFFT of every column, magnitudes averaged over the
//!    used columns, argmax converted with `c / (m_a scs M)`.
//! 3. Delay compensation with the estimated delay.
//! 4. Doppler: zero-padded FFT of every row, magnitudes averaged over the used
//!    rows, argmax converted to velocity.

use std::cmp::Ordering;
use std::f64::consts::TAU;

use ndarray::{Array2, ArrayView1, Axis};
use num_complex::Complex64;

use crate::fft::Transform;
use crate::grid::{Numerology, ResourceGrid};
use crate::{Error, Result, SPEED_OF_LIGHT};

pub const DEFAULT_RANGE_OVERSAMPLING: usize = 4;
pub const DEFAULT_DOPPLER_OVERSAMPLING: usize = 4;
pub const DEFAULT_REL_THRESHOLD: f64 = 0.5;

/// Averaged range periodogram.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeProfile {
    pub magnitudes: Vec<f64>,
    /// Metres of bistatic range per bin, `c / (m_a scs M)`.
    pub bin_scale_m: f64,
    pub m_a: usize,
}

impl RangeProfile {
    pub fn len(&self) -> usize {
        self.magnitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.magnitudes.is_empty()
    }

    pub fn range_of(&self, bin: usize) -> f64 {
        bin as f64 * self.bin_scale_m
    }

    /// Magnitudes divided by their maximum; all zeros stay zero.
    pub fn normalized(&self) -> Vec<f64> {
        normalize(&self.magnitudes)
    }
}

/// Averaged Doppler periodogram.
#[derive(Debug, Clone, PartialEq)]
pub struct DopplerProfile {
    pub magnitudes: Vec<f64>,
    /// Hz per bin, `1 / (T_0 n_a N)`.
    pub bin_scale_hz: f64,
    pub n_a: usize,
}

impl DopplerProfile {
    pub fn len(&self) -> usize {
        self.magnitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.magnitudes.is_empty()
    }

    /// Signed Doppler of a bin; the upper half of the spectrum is negative.
    pub fn doppler_of(&self, bin: usize) -> f64 {
        signed_bin(bin, self.len()) as f64 * self.bin_scale_hz
    }

    pub fn normalized(&self) -> Vec<f64> {
        normalize(&self.magnitudes)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detection {
    pub bistatic_range_m: f64,
    pub velocity_mps: f64,
    /// Peak height relative to the profile maximum.
    pub peak_magnitude: f64,
}

/// Resolution and ambiguity figures of a numerology.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub range_resolution_m: f64,
    pub max_range_m: f64,
    pub velocity_resolution_mps: f64,
    pub max_velocity_mps: f64,
    /// Spacing of comb-induced ghost targets.
    pub ambiguity_interval_m: f64,
}

pub(crate) fn normalize(values: &[f64]) -> Vec<f64> {
    let max = values.iter().copied().fold(0.0, f64::max);
    if max > 0.0 {
        values.iter().map(|v| v / max).collect()
    } else {
        vec![0.0; values.len()]
    }
}

pub(crate) fn argmax(values: &[f64]) -> Option<usize> {
    values
        .iter()
        .enumerate()
        .fold(None, |best: Option<(usize, f64)>, (i, &v)| match best {
            Some((_, b)) if b >= v => best,
            _ => Some((i, v)),
        })
        .map(|(i, _)| i)
}

fn signed_bin(bin: usize, len: usize) -> isize {
    if bin > len / 2 {
        bin as isize - len as isize
    } else {
        bin as isize
    }
}

fn is_zero(v: ArrayView1<'_, Complex64>) -> bool {
    v.iter().all(|x| x.norm_sqr() == 0.0)
}

/// g(m, n) = y(m, n) / v(m, n) where the reference is non-zero, else 0.
pub fn divide(received: &ResourceGrid, reference: &ResourceGrid) -> Result<Array2<Complex64>> {
    divide_symbols(received.symbols(), reference.symbols())
}

pub fn divide_symbols(received: &Array2<Complex64>, reference: &Array2<Complex64>) -> Result<Array2<Complex64>> {
    if received.dim() != reference.dim() {
        return Err(Error::Usage(format!(
            "received grid {:?} and reference {:?} differ in shape",
            received.dim(),
            reference.dim()
        )));
    }
    Ok(ndarray::Zip::from(received).and(reference).map_collect(|&y, &v| {
        if v.norm_sqr() > 0.0 {
            y / v
        } else {
            Complex64::default()
        }
    }))
}

fn check_factor(factor: usize, what: &str) -> Result<()> {
    if factor == 0 {
        return Err(Error::Usage(format!("{what} oversampling factor must be at least 1")));
    }
    Ok(())
}

/// Magnitude of the `m_a M`-point IFFT of every column of `g`, averaged over
/// the columns that carry anything.
pub fn range_profile(g: &Array2<Complex64>, m_a: usize, scs_hz: f64) -> Result<RangeProfile> {
    check_factor(m_a, "range")?;
    let m_len = g.nrows();
    let len = m_a * m_len;
    let mut ifft = Transform::inverse(len);
    let mut acc = vec![0.0; len];
    let mut buf = Vec::with_capacity(len);
    let mut used = 0usize;
    for col in g.axis_iter(Axis(1)) {
        if is_zero(col) {
            continue;
        }
        ifft.run(col.iter().copied(), &mut buf);
        acc.iter_mut().zip(&buf).for_each(|(a, x)| *a += x.norm());
        used += 1;
    }
    if used > 0 {
        acc.iter_mut().for_each(|a| *a /= used as f64);
    }
    Ok(RangeProfile {
        magnitudes: acc,
        bin_scale_m: SPEED_OF_LIGHT / (m_a as f64 * scs_hz * m_len as f64),
        m_a,
    })
}

/// R = l c / (m_a scs M).
pub fn range_from_bin(bin: usize, numerology: &Numerology, m_a: usize) -> f64 {
    bin as f64 * SPEED_OF_LIGHT / (m_a as f64 * numerology.scs_hz() * numerology.n_subcarriers() as f64)
}

/// g'(m, n) = g(m, n) exp(+j 2 pi m scs tau).
pub fn compensate_delay(g: &Array2<Complex64>, delay_s: f64, scs_hz: f64) -> Array2<Complex64> {
    let mut out = g.clone();
    for (m, mut row) in out.axis_iter_mut(Axis(0)).enumerate() {
        let rot = Complex64::from_polar(1.0, TAU * (m as f64 * scs_hz * delay_s).fract());
        row.iter_mut().for_each(|x| *x *= rot);
    }
    out
}

/// Magnitude of the `n_a N`-point FFT of every row of `g`, averaged over the
/// rows that carry anything.
pub fn doppler_profile(g: &Array2<Complex64>, n_a: usize, numerology: &Numerology) -> Result<DopplerProfile> {
    check_factor(n_a, "Doppler")?;
    let n_len = g.ncols();
    let len = n_a * n_len;
    let mut fft = Transform::forward(len);
    let mut acc = vec![0.0; len];
    let mut buf = Vec::with_capacity(len);
    let mut used = 0usize;
    for row in g.axis_iter(Axis(0)) {
        if is_zero(row) {
            continue;
        }
        fft.run(row.iter().copied(), &mut buf);
        acc.iter_mut().zip(&buf).for_each(|(a, x)| *a += x.norm());
        used += 1;
    }
    if used > 0 {
        acc.iter_mut().for_each(|a| *a /= used as f64);
    }
    Ok(DopplerProfile {
        magnitudes: acc,
        bin_scale_hz: 1.0 / (numerology.symbol_period() * len as f64),
        n_a,
    })
}

/// v = d c / (2 T_0 f_c n_a N); bins above the midpoint map to negative
/// velocities. `T_0` is the symbol period including the cyclic prefix, the
/// spacing of the phase ramp the channel actually applies.
pub fn velocity_from_bin(bin: usize, numerology: &Numerology, n_a: usize) -> f64 {
    let len = n_a * numerology.n_symbols();
    signed_bin(bin, len) as f64 * SPEED_OF_LIGHT / (2.0 * numerology.symbol_period() * numerology.fc_hz() * len as f64)
}

pub fn metrics(numerology: &Numerology, comb_size: usize) -> Metrics {
    let c = SPEED_OF_LIGHT;
    let scs = numerology.scs_hz();
    let ts = numerology.symbol_duration();
    let fc = numerology.fc_hz();
    Metrics {
        range_resolution_m: c / (scs * numerology.n_subcarriers() as f64),
        max_range_m: c / scs,
        velocity_resolution_mps: c / (2.0 * ts * fc * numerology.n_symbols() as f64),
        max_velocity_mps: c / (2.0 * ts * fc),
        ambiguity_interval_m: ambiguity_interval(scs, comb_size),
    }
}

/// Distance between comb ghosts in the two-way (bistatic) sense, c / (2 K scs).
pub fn ambiguity_interval(scs_hz: f64, comb_size: usize) -> f64 {
    SPEED_OF_LIGHT / (2.0 * comb_size as f64 * scs_hz)
}

fn circular_distance(a: usize, b: usize, len: usize) -> usize {
    let d = a.abs_diff(b);
    d.min(len - d)
}

/// Greedy peak picking on a circular profile.
///
/// Local maxima are taken in descending order while they stay at or above
/// `rel_threshold` times the global maximum and at least `min_sep_bins` from
/// every peak already taken, up to `k_expected` peaks. Returned sorted by bin.
pub fn detect_peaks(magnitudes: &[f64], k_expected: usize, min_sep_bins: usize, rel_threshold: f64) -> Vec<usize> {
    let len = magnitudes.len();
    let max = magnitudes.iter().copied().fold(0.0, f64::max);
    if len == 0 || max <= 0.0 || k_expected == 0 {
        return Vec::new();
    }
    let floor = rel_threshold * max;
    let mut candidates: Vec<usize> = (0..len)
        .filter(|&i| {
            let v = magnitudes[i];
            let prev = magnitudes[(i + len - 1) % len];
            let next = magnitudes[(i + 1) % len];
            v > 0.0 && v >= floor && v >= prev && v > next
        })
        .collect();
    candidates.sort_by(|&a, &b| {
        magnitudes[b]
            .partial_cmp(&magnitudes[a])
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut picked: Vec<usize> = Vec::new();
    for c in candidates {
        if picked.len() == k_expected {
            break;
        }
        if picked.iter().all(|&p| circular_distance(p, c, len) >= min_sep_bins) {
            picked.push(c);
        }
    }
    picked.sort_unstable();
    picked
}

/// Local maxima of a circular profile, regardless of height.
pub fn local_maxima(magnitudes: &[f64]) -> Vec<usize> {
    detect_peaks(magnitudes, usize::MAX, 0, 0.0)
}

/// Doppler profile of `g` after removing the delay ramp of `delay_s`, and the
/// velocity at its peak.
pub fn estimate_velocity(
    g: &Array2<Complex64>,
    delay_s: f64,
    n_a: usize,
    numerology: &Numerology,
) -> Result<(DopplerProfile, f64)> {
    let compensated = compensate_delay(g, delay_s, numerology.scs_hz());
    let profile = doppler_profile(&compensated, n_a, numerology)?;
    let velocity = argmax(&profile.magnitudes)
        .map(|bin| profile.doppler_of(bin) * SPEED_OF_LIGHT / (2.0 * numerology.fc_hz()))
        .unwrap_or(0.0);
    Ok((profile, velocity))
}
