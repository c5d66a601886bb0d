//! Reference-signal generation and mapping.
//!
//! PRS and DMRS are QPSK symbols drawn from the length-31 Gold sequence of
//! TS 38.211 5.2.1. PRS uses the staggered comb pattern, DMRS uses configuration
//! type 2 (CDM group 0, single port), and the remaining PDSCH REs carry a
//! seeded Gray-mapped 16-QAM payload.

use std::collections::BTreeSet;
use std::f64::consts::FRAC_1_SQRT_2;
use std::ops::Range;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grid::{Numerology, ReKind, ResourceGrid, SUBCARRIERS_PER_PRB, SYMBOLS_PER_SLOT};
use crate::{Error, Result};

/// Warm-up offset N_c of the Gold sequence generator.
const GOLD_NC: usize = 1600;
const LFSR_MASK: u32 = 0x7fff_ffff;

pub const PRS_COMB_SIZES: [usize; 4] = [2, 4, 6, 12];
pub const PRS_SYMBOL_COUNTS: [usize; 5] = [1, 2, 4, 6, 12];
/// Default PRS sequence seed.
pub const DEFAULT_PRS_C_INIT: u32 = 0x0001_2345;
/// Default DMRS sequence seed; distinct from the PRS one.
pub const DEFAULT_DMRS_C_INIT: u32 = 0x0005_4321;
/// Config type 2, CDM group 0: subcarriers used inside every PRB.
pub const DMRS_TYPE2_SUBCARRIERS: [usize; 4] = [0, 1, 6, 7];
/// Bits per 16-QAM symbol.
pub const QAM16_BITS: usize = 4;

/// Length-31 Gold sequence c(i).
///
/// x1 starts from the fixed state `1, 0, ..., 0`, x2 from `c_init`, and the
/// first 1600 outputs are discarded. Iterates forever.
#[derive(Debug, Clone)]
pub struct GoldSequence {
    x1: u32,
    x2: u32,
}

impl GoldSequence {
    pub fn new(c_init: u32) -> Self {
        let mut seq = Self {
            x1: 1,
            x2: c_init & LFSR_MASK,
        };
        for _ in 0..GOLD_NC {
            seq.step();
        }
        seq
    }

    #[inline]
    fn step(&mut self) -> u8 {
        let out = ((self.x1 ^ self.x2) & 1) as u8;
        // x1(n+31) = x1(n+3) + x1(n)
        let f1 = (self.x1 ^ (self.x1 >> 3)) & 1;
        // x2(n+31) = x2(n+3) + x2(n+2) + x2(n+1) + x2(n)
        let f2 = (self.x2 ^ (self.x2 >> 1) ^ (self.x2 >> 2) ^ (self.x2 >> 3)) & 1;
        self.x1 = (self.x1 >> 1) | (f1 << 30);
        self.x2 = (self.x2 >> 1) | (f2 << 30);
        out
    }
}

impl Iterator for GoldSequence {
    type Item = u8;

    fn next(&mut self) -> Option<u8> {
        Some(self.step())
    }
}

/// First `length` bits of the Gold sequence seeded with `c_init`.
pub fn gold_sequence(c_init: u32, length: usize) -> Vec<u8> {
    GoldSequence::new(c_init).take(length).collect()
}

#[inline]
fn qpsk(b0: u8, b1: u8) -> Complex64 {
    Complex64::new(
        FRAC_1_SQRT_2 * (1.0 - 2.0 * f64::from(b0)),
        FRAC_1_SQRT_2 * (1.0 - 2.0 * f64::from(b1)),
    )
}

/// r(m) = ((1 - 2c(2m)) + j(1 - 2c(2m+1))) / sqrt(2).
pub fn qpsk_map(bits: &[u8]) -> Result<Vec<Complex64>> {
    if !bits.len().is_multiple_of(2) {
        return Err(Error::Usage(format!(
            "QPSK mapping needs an even number of bits, got {}",
            bits.len()
        )));
    }
    Ok(bits.chunks_exact(2).map(|b| qpsk(b[0], b[1])).collect())
}

/// Gray-mapped 16-QAM with unit average power.
pub fn qam16_map(bits: [u8; 4]) -> Complex64 {
    let s = |b: u8| 1.0 - 2.0 * f64::from(b);
    let scale = 1.0 / 10f64.sqrt();
    Complex64::new(
        s(bits[0]) * (2.0 - s(bits[2])) * scale,
        s(bits[1]) * (2.0 - s(bits[3])) * scale,
    )
}

fn check_c_init(c_init: u32, what: &str) -> Result<()> {
    if c_init > LFSR_MASK {
        return Err(Error::Config(format!("{what} c_init {c_init:#x} exceeds 31 bits")));
    }
    Ok(())
}

fn check_slots(slots: &BTreeSet<usize>, numerology: &Numerology, what: &str) -> Result<()> {
    match slots.iter().next_back() {
        Some(&last) if last >= numerology.n_slots() => Err(Error::Config(format!(
            "{what} slot {last} outside grid of {} slots",
            numerology.n_slots()
        ))),
        _ => Ok(()),
    }
}

/// Relative RE offset of each PRS symbol in the block, repeating past `comb`.
pub fn prs_stagger(comb_size: usize) -> &'static [usize] {
    match comb_size {
        2 => &[0, 1],
        4 => &[0, 2, 1, 3],
        6 => &[0, 3, 1, 4, 2, 5],
        12 => &[0, 6, 3, 9, 1, 7, 4, 10, 2, 8, 5, 11],
        _ => &[],
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrsConfig {
    pub comb_size: usize,
    pub n_symbols: usize,
    /// First PRS symbol inside each PRS slot.
    pub start_symbol: usize,
    pub re_offset: usize,
    pub slots: BTreeSet<usize>,
    pub c_init: u32,
}

impl PrsConfig {
    pub fn new(comb_size: usize, n_symbols: usize, slots: impl IntoIterator<Item = usize>) -> Self {
        Self {
            comb_size,
            n_symbols,
            start_symbol: 0,
            re_offset: 0,
            slots: slots.into_iter().collect(),
            c_init: DEFAULT_PRS_C_INIT,
        }
    }

    pub fn validate(&self, numerology: &Numerology) -> Result<()> {
        if !PRS_COMB_SIZES.contains(&self.comb_size) {
            return Err(Error::Config(format!(
                "PRS comb size {} not in {PRS_COMB_SIZES:?}",
                self.comb_size
            )));
        }
        if !PRS_SYMBOL_COUNTS.contains(&self.n_symbols) {
            return Err(Error::Config(format!(
                "PRS symbol count {} not in {PRS_SYMBOL_COUNTS:?}",
                self.n_symbols
            )));
        }
        if self.start_symbol + self.n_symbols > SYMBOLS_PER_SLOT {
            return Err(Error::Config(format!(
                "PRS symbols {}..{} do not fit in a {SYMBOLS_PER_SLOT}-symbol slot",
                self.start_symbol,
                self.start_symbol + self.n_symbols
            )));
        }
        if self.re_offset >= self.comb_size {
            return Err(Error::Config(format!(
                "PRS RE offset {} must be below comb size {}",
                self.re_offset, self.comb_size
            )));
        }
        check_c_init(self.c_init, "PRS")?;
        check_slots(&self.slots, numerology, "PRS")
    }

    /// Subcarrier residue (mod comb) used by the `i`-th PRS symbol of a slot.
    pub fn residue(&self, i: usize) -> usize {
        let stagger = prs_stagger(self.comb_size);
        (self.re_offset + stagger[i % stagger.len()]) % self.comb_size
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DmrsConfig {
    /// DMRS symbol indices within each PDSCH slot.
    pub symbol_positions: BTreeSet<usize>,
    pub c_init: u32,
}

impl Default for DmrsConfig {
    fn default() -> Self {
        Self {
            symbol_positions: [3, 8, 12].into_iter().collect(),
            c_init: DEFAULT_DMRS_C_INIT,
        }
    }
}

impl DmrsConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(&p) = self.symbol_positions.iter().find(|&&p| p >= SYMBOLS_PER_SLOT) {
            return Err(Error::Config(format!(
                "DMRS symbol position {p} outside 0..{SYMBOLS_PER_SLOT}"
            )));
        }
        check_c_init(self.c_init, "DMRS")
    }

    /// DMRS REs inside one PRB over one slot.
    pub fn res_per_prb_slot(&self) -> usize {
        DMRS_TYPE2_SUBCARRIERS.len() * self.symbol_positions.len()
    }
}

/// Code rate as a ratio of integers, e.g. 490/1024.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodeRate {
    pub num: u64,
    pub den: u64,
}

impl CodeRate {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 || num > den {
            return Err(Error::Config(format!("code rate {num}/{den} must lie in [0, 1]")));
        }
        Ok(Self { num, den })
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl Default for CodeRate {
    fn default() -> Self {
        Self { num: 490, den: 1024 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PdschConfig {
    pub code_rate: CodeRate,
    pub payload_seed: u64,
    pub slots: BTreeSet<usize>,
    /// PRBs used by PDSCH; `None` spans the whole carrier.
    pub prbs: Option<Range<usize>>,
}

impl PdschConfig {
    pub fn new(slots: impl IntoIterator<Item = usize>, payload_seed: u64) -> Self {
        Self {
            code_rate: CodeRate::default(),
            payload_seed,
            slots: slots.into_iter().collect(),
            prbs: None,
        }
    }

    fn subcarriers(&self, numerology: &Numerology) -> Result<Range<usize>> {
        let prbs = self.prbs.clone().unwrap_or(0..numerology.n_prb());
        if prbs.is_empty() || prbs.end > numerology.n_prb() {
            return Err(Error::Config(format!(
                "PDSCH PRBs {prbs:?} outside carrier of {} PRBs",
                numerology.n_prb()
            )));
        }
        Ok(prbs.start * SUBCARRIERS_PER_PRB..prbs.end * SUBCARRIERS_PER_PRB)
    }

    pub fn validate(&self, numerology: &Numerology) -> Result<()> {
        self.subcarriers(numerology)?;
        check_slots(&self.slots, numerology, "PDSCH")
    }
}

/// Maps the PRS onto `grid`. Symbols are drawn from one Gold stream in
/// slot, symbol, subcarrier order.
pub fn generate_prs(mut grid: ResourceGrid, cfg: &PrsConfig) -> Result<ResourceGrid> {
    let numerology = *grid.numerology();
    cfg.validate(&numerology)?;
    let mut seq = GoldSequence::new(cfg.c_init);
    let m_total = grid.n_subcarriers();
    for &slot in &cfg.slots {
        let base = Numerology::slot_symbols(slot).start;
        for i in 0..cfg.n_symbols {
            let n = base + cfg.start_symbol + i;
            for m in (cfg.residue(i)..m_total).step_by(cfg.comb_size) {
                let value = qpsk(seq.step(), seq.step());
                grid.place(m, n, ReKind::Prs, value)?;
            }
        }
    }
    Ok(grid)
}

/// Maps DMRS at the configured symbols of every PDSCH slot, over the PDSCH PRBs.
pub fn generate_dmrs(mut grid: ResourceGrid, cfg: &DmrsConfig, pdsch: &PdschConfig) -> Result<ResourceGrid> {
    let numerology = *grid.numerology();
    cfg.validate()?;
    pdsch.validate(&numerology)?;
    let band = pdsch.subcarriers(&numerology)?;
    let mut seq = GoldSequence::new(cfg.c_init);
    for &slot in &pdsch.slots {
        let base = Numerology::slot_symbols(slot).start;
        for &pos in &cfg.symbol_positions {
            let n = base + pos;
            for prb_start in band.clone().step_by(SUBCARRIERS_PER_PRB) {
                for &k in &DMRS_TYPE2_SUBCARRIERS {
                    let value = qpsk(seq.step(), seq.step());
                    grid.place(prb_start + k, n, ReKind::Dmrs, value)?;
                }
            }
        }
    }
    Ok(grid)
}

/// Fills every empty RE of the PDSCH allocation with 16-QAM payload and
/// returns the grid together with the number of information bits carried,
/// `floor(data_res * 4 * code_rate)`.
pub fn generate_pdsch(mut grid: ResourceGrid, cfg: &PdschConfig) -> Result<(ResourceGrid, u64)> {
    let numerology = *grid.numerology();
    cfg.validate(&numerology)?;
    let band = cfg.subcarriers(&numerology)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.payload_seed);
    let mut data_res: u64 = 0;
    for &slot in &cfg.slots {
        for n in Numerology::slot_symbols(slot) {
            for m in band.clone() {
                if grid.kind(m, n) != ReKind::Empty {
                    continue;
                }
                let word: u8 = rng.random();
                let bits = [word & 1, (word >> 1) & 1, (word >> 2) & 1, (word >> 3) & 1];
                grid.place(m, n, ReKind::Pdsch, qam16_map(bits))?;
                data_res += 1;
            }
        }
    }
    let raw_bits = data_res * QAM16_BITS as u64;
    let info_bits = raw_bits * cfg.code_rate.num / cfg.code_rate.den;
    Ok((grid, info_bits))
}

/// R_0: PDSCH information bits carried by one PRB over one slot.
pub fn throughput_per_prb_slot(pdsch: &PdschConfig, dmrs: &DmrsConfig) -> f64 {
    let res = SUBCARRIERS_PER_PRB * SYMBOLS_PER_SLOT;
    let data_res = res.saturating_sub(dmrs.res_per_prb_slot());
    (data_res * QAM16_BITS) as f64 * pdsch.code_rate.value()
}

/// A complete transmitted frame.
#[derive(Debug, Clone)]
pub struct Frame {
    pub grid: ResourceGrid,
    pub info_bits: u64,
}

/// PRS, then DMRS, then PDSCH payload. PRS and PDSCH slots must be disjoint.
pub fn build_frame(numerology: Numerology, prs: &PrsConfig, dmrs: &DmrsConfig, pdsch: &PdschConfig) -> Result<Frame> {
    if let Some(slot) = prs.slots.intersection(&pdsch.slots).next() {
        return Err(Error::Config(format!("slot {slot} assigned to both PRS and PDSCH")));
    }
    let grid = generate_prs(ResourceGrid::new(numerology), prs)?;
    let grid = generate_dmrs(grid, dmrs, pdsch)?;
    let (grid, info_bits) = generate_pdsch(grid, pdsch)?;
    Ok(Frame { grid, info_bits })
}
