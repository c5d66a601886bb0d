//! Numerology and the OFDM time-frequency resource grid.
//!
//! Indexing: subcarrier `m = 0` is the lowest frequency, symbol `n = 0` is the
//! first symbol of slot 0, and slot `s` spans symbols `14 s ..= 14 s + 13`.

use std::fmt;
use std::ops::Range;

use ndarray::Array2;
use num_complex::Complex64;

use crate::{Error, Result, SPEED_OF_LIGHT};

pub const SUBCARRIERS_PER_PRB: usize = 12;
pub const SYMBOLS_PER_SLOT: usize = 14;
/// Largest PRB allocation of a single carrier.
pub const MAX_PRB: usize = 272;
/// Supported subcarrier spacings in kHz.
pub const SUPPORTED_SCS_KHZ: [u32; 5] = [15, 30, 60, 120, 240];
/// Normal cyclic prefix length as a fraction of the useful symbol duration.
pub const NORMAL_CP_FRACTION: f64 = 0.0703;

/// Subcarrier spacing, carrier and grid dimensions. All physical constants of
/// the estimator and allocator are derived from this value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Numerology {
    scs_khz: u32,
    fc_hz: f64,
    n_prb: usize,
    n_slots: usize,
    cp_fraction: f64,
}

impl Numerology {
    pub fn new(scs_khz: u32, fc_hz: f64, n_prb: usize, n_slots: usize) -> Result<Self> {
        Self::with_cp_fraction(scs_khz, fc_hz, n_prb, n_slots, NORMAL_CP_FRACTION)
    }

    pub fn with_cp_fraction(scs_khz: u32, fc_hz: f64, n_prb: usize, n_slots: usize, cp_fraction: f64) -> Result<Self> {
        if !SUPPORTED_SCS_KHZ.contains(&scs_khz) {
            return Err(Error::Config(format!(
                "subcarrier spacing {scs_khz} kHz not in {SUPPORTED_SCS_KHZ:?}"
            )));
        }
        if !(1..=MAX_PRB).contains(&n_prb) {
            return Err(Error::Config(format!("PRB count {n_prb} outside 1..={MAX_PRB}")));
        }
        if n_slots == 0 {
            return Err(Error::Config("slot count must be at least 1".into()));
        }
        if !(fc_hz.is_finite() && fc_hz > 0.0) {
            return Err(Error::Config(format!("carrier frequency {fc_hz} Hz must be positive")));
        }
        if !(cp_fraction.is_finite() && cp_fraction >= 0.0) {
            return Err(Error::Config(format!(
                "cyclic prefix fraction {cp_fraction} must be non-negative"
            )));
        }
        Ok(Self {
            scs_khz,
            fc_hz,
            n_prb,
            n_slots,
            cp_fraction,
        })
    }

    pub fn scs_khz(&self) -> u32 {
        self.scs_khz
    }

    /// Subcarrier spacing in Hz.
    pub fn scs_hz(&self) -> f64 {
        f64::from(self.scs_khz) * 1e3
    }

    pub fn fc_hz(&self) -> f64 {
        self.fc_hz
    }

    pub fn n_prb(&self) -> usize {
        self.n_prb
    }

    pub fn n_slots(&self) -> usize {
        self.n_slots
    }

    pub fn cp_fraction(&self) -> f64 {
        self.cp_fraction
    }

    /// M, the number of subcarriers.
    pub fn n_subcarriers(&self) -> usize {
        SUBCARRIERS_PER_PRB * self.n_prb
    }

    /// N, the number of OFDM symbols.
    pub fn n_symbols(&self) -> usize {
        SYMBOLS_PER_SLOT * self.n_slots
    }

    /// Useful symbol duration T_s = 1 / scs.
    pub fn symbol_duration(&self) -> f64 {
        1.0 / self.scs_hz()
    }

    /// Total symbol period T_0 = T_CP + T_s, the spacing of the Doppler phase ramp.
    pub fn symbol_period(&self) -> f64 {
        (1.0 + self.cp_fraction) * self.symbol_duration()
    }

    /// Unambiguous bistatic range c / scs.
    pub fn max_range(&self) -> f64 {
        SPEED_OF_LIGHT / self.scs_hz()
    }

    /// Symbol indices belonging to `slot`.
    pub fn slot_symbols(slot: usize) -> Range<usize> {
        slot * SYMBOLS_PER_SLOT..(slot + 1) * SYMBOLS_PER_SLOT
    }
}

/// What a resource element carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ReKind {
    #[default]
    Empty,
    Prs,
    Dmrs,
    Pdsch,
}

impl ReKind {
    pub fn name(self) -> &'static str {
        match self {
            ReKind::Empty => "Empty",
            ReKind::Prs => "PRS",
            ReKind::Dmrs => "DMRS",
            ReKind::Pdsch => "PDSCH",
        }
    }
}

impl fmt::Display for ReKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Dense M x N grid of complex symbols with a parallel allocation-kind matrix.
///
/// Invariant: `symbols[[m, n]] == 0` wherever `kinds[[m, n]] == Empty`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResourceGrid {
    numerology: Numerology,
    symbols: Array2<Complex64>,
    kinds: Array2<ReKind>,
}

impl ResourceGrid {
    /// All-zero grid with every RE marked empty.
    pub fn new(numerology: Numerology) -> Self {
        let shape = (numerology.n_subcarriers(), numerology.n_symbols());
        Self {
            numerology,
            symbols: Array2::zeros(shape),
            kinds: Array2::from_elem(shape, ReKind::Empty),
        }
    }

    pub fn numerology(&self) -> &Numerology {
        &self.numerology
    }

    pub fn n_subcarriers(&self) -> usize {
        self.symbols.nrows()
    }

    pub fn n_symbols(&self) -> usize {
        self.symbols.ncols()
    }

    pub fn symbols(&self) -> &Array2<Complex64> {
        &self.symbols
    }

    pub fn kinds(&self) -> &Array2<ReKind> {
        &self.kinds
    }

    pub fn symbol(&self, m: usize, n: usize) -> Complex64 {
        self.symbols[[m, n]]
    }

    pub fn kind(&self, m: usize, n: usize) -> ReKind {
        self.kinds[[m, n]]
    }

    /// Places `value` on an empty RE. Placing on an occupied RE is a collision.
    pub fn place(&mut self, m: usize, n: usize, kind: ReKind, value: Complex64) -> Result<()> {
        let existing = self.kinds[[m, n]];
        if existing != ReKind::Empty {
            return Err(Error::Collision {
                subcarrier: m,
                symbol: n,
                existing: existing.name(),
            });
        }
        if kind == ReKind::Empty {
            return Err(Error::Usage("cannot place a symbol with kind Empty".into()));
        }
        self.kinds[[m, n]] = kind;
        self.symbols[[m, n]] = value;
        Ok(())
    }

    /// Copy of the grid keeping only REs of `kind`; everything else is zeroed
    /// and marked empty.
    pub fn extract_kind(&self, kind: ReKind) -> Self {
        self.extract_where(|k| k == kind)
    }

    /// Copy of the grid keeping only REs whose kind satisfies `keep`.
    pub fn extract_where(&self, keep: impl Fn(ReKind) -> bool) -> Self {
        let mut out = self.clone();
        ndarray::Zip::from(&mut out.symbols)
            .and(&mut out.kinds)
            .for_each(|s, k| {
                if *k != ReKind::Empty && !keep(*k) {
                    *s = Complex64::new(0.0, 0.0);
                    *k = ReKind::Empty;
                }
            });
        out
    }

    /// Same grid layout with different symbol values. Used by the channel,
    /// which must carry the kind matrix through unchanged.
    pub fn with_symbols(&self, symbols: Array2<Complex64>) -> Result<Self> {
        if symbols.dim() != self.symbols.dim() {
            return Err(Error::Usage(format!(
                "symbol matrix {:?} does not match grid {:?}",
                symbols.dim(),
                self.symbols.dim()
            )));
        }
        Ok(Self {
            numerology: self.numerology,
            symbols,
            kinds: self.kinds.clone(),
        })
    }

    pub fn count_kind(&self, kind: ReKind) -> usize {
        self.kinds.iter().filter(|&&k| k == kind).count()
    }

    pub fn count_nonzero(&self) -> usize {
        self.symbols.iter().filter(|s| s.norm_sqr() > 0.0).count()
    }

    /// Number of REs carrying anything.
    pub fn count_used(&self) -> usize {
        self.kinds.iter().filter(|&&k| k != ReKind::Empty).count()
    }
}
