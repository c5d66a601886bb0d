//! Bistatic point-target echo model in the frequency domain.
//!
//! ```text
//! y(m, n) = sum_k beta_k exp(+j 2 pi n T_0 f_d,k) exp(-j 2 pi m scs tau_k) v(m, n) + q(m, n)
//! ```
//!
//! with `tau_k = R_k / c` and `f_d,k = 2 v_k f_c / c`. Inter-symbol interference
//! is not modelled; the AWGN term stands in for it.

use std::f64::consts::TAU;

use ndarray::Array2;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::grid::{ReKind, ResourceGrid};
use crate::{Error, Result, SPEED_OF_LIGHT};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Target {
    /// Transmitter -> target -> receiver path length, metres.
    pub bistatic_range_m: f64,
    /// Radial velocity, m/s. Positive values raise the received frequency.
    pub velocity_mps: f64,
    pub amplitude: Complex64,
}

impl Target {
    pub fn new(bistatic_range_m: f64, velocity_mps: f64) -> Self {
        Self {
            bistatic_range_m,
            velocity_mps,
            amplitude: Complex64::new(1.0, 0.0),
        }
    }

    pub fn delay_s(&self) -> f64 {
        self.bistatic_range_m / SPEED_OF_LIGHT
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelConfig {
    pub targets: Vec<Target>,
    /// SNR per used RE in dB; `f64::INFINITY` disables noise.
    pub snr_db: f64,
    pub seed: u64,
}

/// f_d = 2 v f_c / c.
pub fn doppler_from_velocity(velocity_mps: f64, fc_hz: f64) -> f64 {
    2.0 * velocity_mps * fc_hz / SPEED_OF_LIGHT
}

/// exp(-j 2 pi x) with x reduced mod 1 first, so large arguments keep full precision.
#[inline]
fn unit_phasor(cycles: f64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * cycles.fract())
}

/// Noiseless echo of `tx` from every target. The kind matrix is carried through.
pub fn apply_channel(tx: &ResourceGrid, targets: &[Target]) -> Result<ResourceGrid> {
    let numerology = *tx.numerology();
    let r_max = numerology.max_range();
    for (i, t) in targets.iter().enumerate() {
        if !(t.bistatic_range_m.is_finite() && (0.0..r_max).contains(&t.bistatic_range_m)) {
            return Err(Error::Config(format!(
                "target {i}: bistatic range {} m outside [0, {r_max:.3}) m",
                t.bistatic_range_m
            )));
        }
        if !(t.velocity_mps.is_finite() && t.amplitude.re.is_finite() && t.amplitude.im.is_finite()) {
            return Err(Error::Config(format!("target {i}: non-finite velocity or amplitude")));
        }
    }

    let (m_len, n_len) = (tx.n_subcarriers(), tx.n_symbols());
    let scs = numerology.scs_hz();
    let t0 = numerology.symbol_period();

    // Per-target delay ramp over subcarriers and Doppler ramp over symbols.
    let ramps: Vec<(Vec<Complex64>, Vec<Complex64>)> = targets
        .iter()
        .map(|t| {
            let tau = t.delay_s();
            let fd = doppler_from_velocity(t.velocity_mps, numerology.fc_hz());
            let freq = (0..m_len).map(|m| unit_phasor(-(m as f64) * scs * tau)).collect();
            let time = (0..n_len)
                .map(|n| t.amplitude * unit_phasor(n as f64 * t0 * fd))
                .collect();
            (freq, time)
        })
        .collect();

    let mut y = Array2::<Complex64>::zeros((m_len, n_len));
    ndarray::Zip::indexed(&mut y)
        .and(tx.symbols())
        .for_each(|(m, n), out, &v| {
            if v.norm_sqr() == 0.0 {
                return;
            }
            let h: Complex64 = ramps.iter().map(|(f, t)| f[m] * t[n]).sum();
            *out = h * v;
        });
    tx.with_symbols(y)
}

/// Adds circular complex Gaussian noise with total variance
/// `P_sig / 10^(snr_db/10)` to every non-empty RE, where `P_sig` is the mean
/// power over non-empty REs.
pub fn add_awgn(grid: &ResourceGrid, snr_db: f64, seed: u64) -> Result<ResourceGrid> {
    let used = grid.count_used();
    if used == 0 {
        return Err(Error::Usage("SNR is undefined on a grid with no used REs".into()));
    }
    if snr_db == f64::INFINITY {
        return Ok(grid.clone());
    }
    if snr_db.is_nan() {
        return Err(Error::Config("SNR must be a number".into()));
    }
    let signal_power: f64 = grid
        .symbols()
        .iter()
        .zip(grid.kinds())
        .filter(|(_, k)| **k != ReKind::Empty)
        .map(|(s, _)| s.norm_sqr())
        .sum::<f64>()
        / used as f64;
    let noise_var = signal_power / 10f64.powf(snr_db / 10.0);
    let sigma = (noise_var / 2.0).sqrt();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut noisy = grid.symbols().clone();
    // Row-major walk keeps the draw order independent of memory layout.
    for ((m, n), s) in noisy.indexed_iter_mut() {
        if grid.kind(m, n) == ReKind::Empty {
            continue;
        }
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        *s += Complex64::new(sigma * re, sigma * im);
    }
    grid.with_symbols(noisy)
}

/// Echo plus noise, as seen by the sensing receiver.
pub fn receive(tx: &ResourceGrid, cfg: &ChannelConfig) -> Result<ResourceGrid> {
    let echo = apply_channel(tx, &cfg.targets)?;
    add_awgn(&echo, cfg.snr_db, cfg.seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Numerology;
    use crate::refsig::{build_frame, DmrsConfig, PdschConfig, PrsConfig};

    fn frame(cp: f64) -> ResourceGrid {
        let num = Numerology::with_cp_fraction(120, 28e9, 4, 2, cp).unwrap();
        build_frame(
            num,
            &PrsConfig::new(4, 12, [0]),
            &DmrsConfig::default(),
            &PdschConfig::new([1], 3),
        )
        .unwrap()
        .grid
    }

    fn max_diff(a: &ResourceGrid, b: &ResourceGrid) -> f64 {
        a.symbols()
            .iter()
            .zip(b.symbols())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn doppler_values() {
        assert!((doppler_from_velocity(5.0, 28e9) - 933.979_466_554_825_8).abs() < 1e-9);
        assert_eq!(doppler_from_velocity(0.0, 28e9), 0.0);
        let a = doppler_from_velocity(3.0, 28e9);
        assert!((doppler_from_velocity(6.0, 28e9) - 2.0 * a).abs() < 1e-12);
    }

    #[test]
    fn no_targets_gives_silence() {
        let tx = frame(0.0703);
        let y = apply_channel(&tx, &[]).unwrap();
        assert!(y.symbols().iter().all(|s| s.norm() == 0.0));
        assert_eq!(y.kinds(), tx.kinds());
    }

    #[test]
    fn zero_range_static_target_is_identity() {
        let tx = frame(0.0703);
        let y = apply_channel(&tx, &[Target::new(0.0, 0.0)]).unwrap();
        assert_eq!(max_diff(&tx, &y), 0.0);
    }

    #[test]
    fn integer_bin_delay_ramp() {
        let tx = frame(0.0);
        let num = tx.numerology();
        let m_len = tx.n_subcarriers();
        let l0 = 7.0;
        let range = SPEED_OF_LIGHT / (num.scs_hz() * m_len as f64) * l0;
        let y = apply_channel(&tx, &[Target::new(range, 0.0)]).unwrap();
        for ((m, n), v) in tx.symbols().indexed_iter() {
            if v.norm() == 0.0 {
                continue;
            }
            let expected = Complex64::from_polar(1.0, -TAU * m as f64 * l0 / m_len as f64);
            assert!((y.symbol(m, n) / v - expected).norm() < 1e-9, "({m},{n})");
        }
    }

    #[test]
    fn rejects_out_of_range_target() {
        let tx = frame(0.0);
        let r_max = tx.numerology().max_range();
        assert!(matches!(
            apply_channel(&tx, &[Target::new(r_max, 0.0)]),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            apply_channel(&tx, &[Target::new(-1.0, 0.0)]),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn linear_in_targets() {
        let tx = frame(0.0703);
        let t1 = Target::new(1057.0, 5.0);
        let t2 = Target {
            amplitude: Complex64::new(0.3, -0.4),
            ..Target::new(1242.0, -12.0)
        };
        let both = apply_channel(&tx, &[t1, t2]).unwrap();
        let a = apply_channel(&tx, &[t1]).unwrap();
        let b = apply_channel(&tx, &[t2]).unwrap();
        let sum = a.with_symbols(a.symbols() + b.symbols()).unwrap();
        assert!(max_diff(&both, &sum) < 1e-12);
    }

    #[test]
    fn static_target_ratio_independent_of_symbol_and_unit_gain() {
        let tx = frame(0.0703);
        let y = apply_channel(&tx, &[Target::new(812.3, 0.0)]).unwrap();
        for m in 0..tx.n_subcarriers() {
            let ratios: Vec<Complex64> = (0..tx.n_symbols())
                .filter(|&n| tx.symbol(m, n).norm() > 0.0)
                .map(|n| y.symbol(m, n) / tx.symbol(m, n))
                .collect();
            for r in &ratios {
                assert!((r - ratios[0]).norm() < 1e-12);
            }
        }
        for (a, b) in tx.symbols().iter().zip(y.symbols()) {
            assert!((a.norm() - b.norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn awgn_sentinel_determinism_and_empty_grid() {
        let tx = frame(0.0703);
        assert_eq!(add_awgn(&tx, f64::INFINITY, 1).unwrap(), tx);
        assert_eq!(add_awgn(&tx, 5.0, 9).unwrap(), add_awgn(&tx, 5.0, 9).unwrap());
        assert_ne!(add_awgn(&tx, 5.0, 9).unwrap(), add_awgn(&tx, 5.0, 10).unwrap());
        let empty = ResourceGrid::new(*tx.numerology());
        assert!(matches!(add_awgn(&empty, 0.0, 1), Err(Error::Usage(_))));
    }

    #[test]
    fn awgn_power_at_zero_db() {
        // 120 PRB x 5 slots of PDSCH gives 100 800 REs.
        let num = Numerology::new(120, 28e9, 120, 5).unwrap();
        let pdsch = PdschConfig::new(0..5, 11);
        let (tx, _) = crate::refsig::generate_pdsch(ResourceGrid::new(num), &pdsch).unwrap();
        assert!(tx.count_used() >= 100_000);
        let noisy = add_awgn(&tx, 0.0, 4).unwrap();
        let n = tx.count_used() as f64;
        let signal: f64 = tx.symbols().iter().map(|s| s.norm_sqr()).sum::<f64>() / n;
        let noise: f64 = noisy
            .symbols()
            .iter()
            .zip(tx.symbols())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            / n;
        assert!((noise / signal - 1.0).abs() < 0.02, "ratio {}", noise / signal);
        // empty REs stay silent
        assert!(noisy
            .symbols()
            .iter()
            .zip(noisy.kinds())
            .all(|(s, k)| *k != ReKind::Empty || s.norm() == 0.0));
    }
}
