//! Flat `key = value` scenario files.
//!
//! One entry per line, `#` starts a comment, keys are namespaced by stage
//! (`prs.comb_size`, `channel.snr_db`, ...). Only `channel.target` and
//! `alloc.gamma` may repeat; every other key appears at most once.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use isac_core::allocator::AllocProblem;
use isac_core::channel::{ChannelConfig, Target};
use isac_core::deghost::Algorithm;
use isac_core::estimator::{DEFAULT_DOPPLER_OVERSAMPLING, DEFAULT_RANGE_OVERSAMPLING, DEFAULT_REL_THRESHOLD};
use isac_core::grid::{Numerology, NORMAL_CP_FRACTION, SUPPORTED_SCS_KHZ};
use isac_core::num_complex::Complex64;
use isac_core::refsig::{
    throughput_per_prb_slot, CodeRate, DmrsConfig, PdschConfig, PrsConfig, DEFAULT_DMRS_C_INIT, DEFAULT_PRS_C_INIT,
    PRS_COMB_SIZES,
};

/// A configuration problem, anchored to the offending line when there is one.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        Self {
            line: Some(line),
            message: message.into(),
        }
    }

    fn global(message: impl Into<String>) -> Self {
        Self {
            line: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

impl From<isac_core::Error> for ConfigError {
    fn from(e: isac_core::Error) -> Self {
        ConfigError::global(e.to_string())
    }
}

type Result<T> = std::result::Result<T, ConfigError>;

const REPEATABLE: [&str; 2] = ["channel.target", "alloc.gamma"];

#[derive(Debug, Clone)]
struct Entry {
    line: usize,
    key: String,
    value: String,
    used: bool,
}

/// Parsed but not yet interpreted entries.
#[derive(Debug, Clone)]
pub struct RawConfig {
    entries: Vec<Entry>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: Vec<Entry> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| ConfigError::at(line, format!("expected 'key = value', got '{content}'")))?;
            let key = key.trim();
            let value = value.trim();
            if key.is_empty() {
                return Err(ConfigError::at(line, "empty key"));
            }
            if !REPEATABLE.contains(&key) {
                if let Some(prev) = entries.iter().find(|e| e.key == key) {
                    return Err(ConfigError::at(
                        line,
                        format!("duplicate key '{key}' (first set on line {})", prev.line),
                    ));
                }
            }
            entries.push(Entry {
                line,
                key: key.to_string(),
                value: value.to_string(),
                used: false,
            });
        }
        Ok(Self { entries })
    }

    /// Overrides or inserts a single-valued key.
    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        let value = value.into();
        match self.entries.iter_mut().find(|e| e.key == key) {
            Some(e) => e.value = value,
            None => self.entries.push(Entry {
                line: 0,
                key: key.to_string(),
                value,
                used: false,
            }),
        }
    }

    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.entries.iter_mut().find(|e| e.key == key).map(|e| {
            e.used = true;
            (e.line, e.value.clone())
        })
    }

    fn take_all(&mut self, key: &str) -> Vec<(usize, String)> {
        self.entries
            .iter_mut()
            .filter(|e| e.key == key)
            .map(|e| {
                e.used = true;
                (e.line, e.value.clone())
            })
            .collect()
    }

    fn get<T: FromStr>(&mut self, key: &str) -> Result<Option<(usize, T)>>
    where
        T::Err: fmt::Display,
    {
        match self.take(key) {
            None => Ok(None),
            Some((line, v)) => v
                .parse::<T>()
                .map(|x| Some((line, x)))
                .map_err(|e| ConfigError::at(line, format!("{key}: cannot parse '{v}': {e}"))),
        }
    }

    fn get_or<T: FromStr>(&mut self, key: &str, default: T) -> Result<(usize, T)>
    where
        T::Err: fmt::Display,
    {
        Ok(self.get(key)?.unwrap_or((0, default)))
    }

    fn get_with<T>(
        &mut self,
        key: &str,
        parse: impl Fn(&str) -> std::result::Result<T, String>,
    ) -> Result<Option<(usize, T)>> {
        match self.take(key) {
            None => Ok(None),
            Some((line, v)) => parse(&v)
                .map(|x| Some((line, x)))
                .map_err(|e| ConfigError::at(line, format!("{key}: {e}"))),
        }
    }

    /// Fails on the first key nobody consumed.
    fn finish(&self) -> Result<()> {
        match self.entries.iter().find(|e| !e.used) {
            Some(e) => Err(ConfigError::at(e.line, format!("unknown key '{}'", e.key))),
            None => Ok(()),
        }
    }
}

fn anchor(line: usize, e: impl fmt::Display) -> ConfigError {
    if line == 0 {
        ConfigError::global(e.to_string())
    } else {
        ConfigError::at(line, e.to_string())
    }
}

/// `0-3`, `1,4,7` or a mix such as `0-2,5`. Ranges are inclusive.
pub fn parse_index_list(s: &str) -> std::result::Result<BTreeSet<usize>, String> {
    let mut out = BTreeSet::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('-') {
            Some((a, b)) => {
                let a: usize = a.trim().parse().map_err(|_| format!("bad index '{a}'"))?;
                let b: usize = b.trim().parse().map_err(|_| format!("bad index '{b}'"))?;
                if a > b {
                    return Err(format!("empty range {a}-{b}"));
                }
                out.extend(a..=b);
            }
            None => {
                out.insert(part.parse().map_err(|_| format!("bad index '{part}'"))?);
            }
        }
    }
    Ok(out)
}

fn parse_u32_any_base(s: &str) -> std::result::Result<u32, String> {
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u32::from_str_radix(&hex.replace('_', ""), 16),
        None => s.replace('_', "").parse(),
    };
    parsed.map_err(|e| format!("'{s}' is not an integer: {e}"))
}

fn parse_code_rate(s: &str) -> std::result::Result<CodeRate, String> {
    let (num, den) = s.split_once('/').unwrap_or((s, "1"));
    let num: u64 = num.trim().parse().map_err(|_| format!("bad code rate '{s}'"))?;
    let den: u64 = den.trim().parse().map_err(|_| format!("bad code rate '{s}'"))?;
    CodeRate::new(num, den).map_err(|e| e.to_string())
}

fn parse_f64_list(s: &str) -> std::result::Result<Vec<f64>, String> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| format!("'{}' is not a number", p.trim()))
        })
        .collect()
}

fn parse_usize_list(s: &str) -> std::result::Result<Vec<usize>, String> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| format!("'{}' is not a count", p.trim()))
        })
        .collect()
}

/// SNR in dB, or `inf` / `none` for a noiseless run.
fn parse_snr(s: &str) -> std::result::Result<f64, String> {
    match s.to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "none" | "off" => Ok(f64::INFINITY),
        other => other.parse::<f64>().map_err(|_| format!("'{s}' is not an SNR")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgorithmChoice {
    Auto,
    Forced(Algorithm),
}

impl AlgorithmChoice {
    pub fn resolve(self, comb_size: usize) -> Algorithm {
        match self {
            AlgorithmChoice::Auto => Algorithm::for_comb(comb_size),
            AlgorithmChoice::Forced(a) => a,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectorConfig {
    /// Upper bound on reported peaks.
    pub max_peaks: usize,
    pub min_sep_bins: usize,
    pub rel_threshold: f64,
}

/// Everything needed for one sensing run.
#[derive(Debug, Clone, PartialEq)]
pub struct SensingScenario {
    pub numerology: Numerology,
    pub prs: PrsConfig,
    pub dmrs: DmrsConfig,
    pub pdsch: PdschConfig,
    pub channel: ChannelConfig,
    pub m_a: usize,
    pub n_a: usize,
    pub detector: DetectorConfig,
    pub algorithm: AlgorithmChoice,
    /// Rotate the DMRS spectrum onto the PRS one before the joint IFFT.
    pub align_phase: bool,
    /// Notes about legal but unusual settings.
    pub warnings: Vec<String>,
}

/// Everything needed for one allocation run.
#[derive(Debug, Clone, PartialEq)]
pub struct AllocScenario {
    pub problem: AllocProblem,
}

/// Grid of the ambiguity table.
#[derive(Debug, Clone, PartialEq)]
pub struct TableScenario {
    pub scs_khz: Vec<u32>,
    pub combs: Vec<usize>,
}

impl Default for TableScenario {
    fn default() -> Self {
        Self {
            scs_khz: SUPPORTED_SCS_KHZ.to_vec(),
            combs: PRS_COMB_SIZES.to_vec(),
        }
    }
}

impl TableScenario {
    pub fn validate(&self) -> std::result::Result<(), ConfigError> {
        if let Some(s) = self.scs_khz.iter().find(|s| !SUPPORTED_SCS_KHZ.contains(s)) {
            return Err(ConfigError::global(format!(
                "subcarrier spacing {s} kHz not in {SUPPORTED_SCS_KHZ:?}"
            )));
        }
        if let Some(c) = self.combs.iter().find(|c| !PRS_COMB_SIZES.contains(c)) {
            return Err(ConfigError::global(format!("comb size {c} not in {PRS_COMB_SIZES:?}")));
        }
        Ok(())
    }
}

struct Common {
    seed: u64,
    numerology: Numerology,
    dmrs: DmrsConfig,
    code_rate: CodeRate,
}

fn parse_common(raw: &mut RawConfig) -> Result<Common> {
    let (_, seed) = raw.get_or::<u64>("seed", 1)?;
    let (scs_line, scs) = raw.get_or::<u32>("numerology.scs_khz", 120)?;
    let (_, fc) = raw.get_or::<f64>("numerology.fc_hz", 28e9)?;
    let (prb_line, n_prb) = raw.get_or::<usize>("numerology.n_prb", 64)?;
    let (slot_line, n_slots) = raw.get_or::<usize>("numerology.n_slots", 8)?;
    let (_, cp) = raw.get_or::<f64>("numerology.cp_fraction", NORMAL_CP_FRACTION)?;
    let numerology = Numerology::with_cp_fraction(scs, fc, n_prb, n_slots, cp)
        .map_err(|e| anchor(scs_line.max(prb_line).max(slot_line), e))?;

    let mut dmrs = DmrsConfig::default();
    if let Some((_, s)) = raw.get_with("dmrs.symbols", parse_index_list)? {
        dmrs.symbol_positions = s;
    }
    dmrs.c_init = raw
        .get_with("dmrs.c_init", parse_u32_any_base)?
        .map_or(DEFAULT_DMRS_C_INIT, |x| x.1);
    if let Some(t) = raw.take("dmrs.config_type") {
        if t.1 != "2" {
            return Err(ConfigError::at(t.0, "only DMRS configuration type 2 is supported"));
        }
    }
    if let Some(t) = raw.take("pdsch.mapping_type") {
        if !t.1.eq_ignore_ascii_case("a") {
            return Err(ConfigError::at(t.0, "only PDSCH mapping type A is supported"));
        }
    }
    let line = raw
        .entries
        .iter()
        .find(|e| e.key == "dmrs.symbols")
        .map_or(0, |e| e.line);
    dmrs.validate().map_err(|e| anchor(line, e))?;
    let code_rate = raw
        .get_with("pdsch.code_rate", parse_code_rate)?
        .map_or(CodeRate::default(), |x| x.1);
    Ok(Common {
        seed,
        numerology,
        dmrs,
        code_rate,
    })
}

impl SensingScenario {
    pub fn from_raw(mut raw: RawConfig) -> Result<Self> {
        let common = parse_common(&mut raw)?;
        let numerology = common.numerology;
        let mut warnings = Vec::new();

        let (comb_line, comb) = raw.get_or::<usize>("prs.comb_size", 4)?;
        let (_, n_symbols) = raw.get_or::<usize>("prs.n_symbols", 12)?;
        let (_, start_symbol) = raw.get_or::<usize>("prs.start_symbol", 0)?;
        let (_, re_offset) = raw.get_or::<usize>("prs.re_offset", 0)?;
        let half = numerology.n_slots() / 2;
        let (prs_slot_line, prs_slots) = raw
            .get_with("prs.slots", parse_index_list)?
            .unwrap_or((0, (0..half.max(1)).collect()));
        let prs_c_init = raw
            .get_with("prs.c_init", parse_u32_any_base)?
            .map_or(DEFAULT_PRS_C_INIT, |x| x.1);
        let prs = PrsConfig {
            comb_size: comb,
            n_symbols,
            start_symbol,
            re_offset,
            slots: prs_slots,
            c_init: prs_c_init,
        };
        prs.validate(&numerology)
            .map_err(|e| anchor(comb_line.max(prs_slot_line), e))?;

        let (pdsch_slot_line, pdsch_slots) = raw
            .get_with("pdsch.slots", parse_index_list)?
            .unwrap_or((0, (half.max(1)..numerology.n_slots()).collect()));
        let prbs: Option<Range<usize>> = raw
            .get_with("pdsch.prbs", |s| {
                let set = parse_index_list(s)?;
                let (lo, hi) = (*set.first().ok_or("empty PRB range")?, *set.last().unwrap());
                if set.len() != hi - lo + 1 {
                    return Err("PDSCH PRBs must be contiguous".to_string());
                }
                Ok(lo..hi + 1)
            })?
            .map(|x| x.1);
        let payload_seed = raw
            .get::<u64>("pdsch.seed")?
            .map_or(common.seed.wrapping_add(0x5eed), |x| x.1);
        let pdsch = PdschConfig {
            code_rate: common.code_rate,
            payload_seed,
            slots: pdsch_slots,
            prbs,
        };
        pdsch.validate(&numerology).map_err(|e| anchor(pdsch_slot_line, e))?;
        if let Some(slot) = prs.slots.intersection(&pdsch.slots).next() {
            return Err(anchor(
                pdsch_slot_line.max(prs_slot_line),
                format!("slot {slot} assigned to both PRS and PDSCH"),
            ));
        }
        if pdsch.slots.is_empty() || common.dmrs.symbol_positions.is_empty() {
            return Err(anchor(
                pdsch_slot_line,
                "ghost removal needs at least one PDSCH slot carrying DMRS",
            ));
        }
        if prs.slots.is_empty() {
            return Err(anchor(prs_slot_line, "at least one PRS slot is required"));
        }

        let mut targets = Vec::new();
        for (line, value) in raw.take_all("channel.target") {
            let parts = parse_f64_list(&value).map_err(|e| ConfigError::at(line, e))?;
            let target = match parts.as_slice() {
                [r, v] => Target::new(*r, *v),
                [r, v, re, im] => Target {
                    amplitude: Complex64::new(*re, *im),
                    ..Target::new(*r, *v)
                },
                _ => {
                    return Err(ConfigError::at(
                        line,
                        "channel.target expects 'range_m, velocity_mps[, amp_re, amp_im]'",
                    ))
                }
            };
            if !(0.0..numerology.max_range()).contains(&target.bistatic_range_m) {
                return Err(ConfigError::at(
                    line,
                    format!(
                        "target range {} m outside the unambiguous range [0, {:.3}) m",
                        target.bistatic_range_m,
                        numerology.max_range()
                    ),
                ));
            }
            targets.push(target);
        }
        let (_, snr_db) = raw.get_with("channel.snr_db", parse_snr)?.unwrap_or((0, 10.0));
        let channel = ChannelConfig {
            targets,
            snr_db,
            seed: common.seed,
        };

        let (_, m_a) = raw.get_or::<usize>("estimator.m_a", DEFAULT_RANGE_OVERSAMPLING)?;
        let (_, n_a) = raw.get_or::<usize>("estimator.n_a", DEFAULT_DOPPLER_OVERSAMPLING)?;
        if m_a == 0 || n_a == 0 {
            return Err(ConfigError::global("oversampling factors must be at least 1"));
        }
        let (_, max_peaks) = raw.get_or::<usize>("detector.max_peaks", 16)?;
        let (_, min_sep_bins) = raw.get_or::<usize>("detector.min_sep_bins", 4 * m_a)?;
        let (thr_line, rel_threshold) = raw.get_or::<f64>("detector.rel_threshold", DEFAULT_REL_THRESHOLD)?;
        if !(0.0..=1.0).contains(&rel_threshold) {
            return Err(anchor(thr_line, "detector.rel_threshold must lie in [0, 1]"));
        }

        let algorithm = match raw.take("deghost.algorithm") {
            None => AlgorithmChoice::Auto,
            Some((_, v)) if v == "auto" => AlgorithmChoice::Auto,
            Some((line, v)) => AlgorithmChoice::Forced(v.parse().map_err(|e| anchor(line, e))?),
        };
        if let AlgorithmChoice::Forced(a) = algorithm {
            if a != Algorithm::for_comb(comb) {
                warnings.push(format!(
                    "{a} forced for comb {comb}; the default pairing is {}",
                    Algorithm::for_comb(comb)
                ));
            }
        }

        let (_, align_phase) = raw.get_or::<bool>("deghost.align_phase", true)?;

        raw.finish()?;
        Ok(Self {
            numerology,
            prs,
            dmrs: common.dmrs,
            pdsch,
            channel,
            m_a,
            n_a,
            detector: DetectorConfig {
                max_peaks,
                min_sep_bins,
                rel_threshold,
            },
            algorithm,
            align_phase,
            warnings,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_raw(RawConfig::parse(text)?)
    }
}

/// `range_metric` (c/scs), `velocity_metric` (c/(2 T_s f_c)) or a number.
fn parse_norm(s: &str, numerology: &Numerology) -> std::result::Result<f64, String> {
    let c = isac_core::SPEED_OF_LIGHT;
    match s {
        "range_metric" => Ok(c / numerology.scs_hz()),
        "velocity_metric" => Ok(c / (2.0 * numerology.symbol_duration() * numerology.fc_hz())),
        other => other
            .parse::<f64>()
            .map_err(|_| format!("'{other}' is neither a number nor range_metric/velocity_metric")),
    }
}

impl AllocScenario {
    pub fn from_raw(mut raw: RawConfig) -> Result<Self> {
        let common = parse_common(&mut raw)?;
        let numerology = common.numerology;
        let (_, m_max) = raw.get_or::<usize>("alloc.m_max", numerology.n_prb())?;
        let (_, n_max) = raw.get_or::<usize>("alloc.n_max", numerology.n_slots())?;
        let (_, alpha0) = raw.get_or::<f64>("alloc.alpha0", 2.0)?;
        let mut gammas = Vec::new();
        for (line, v) in raw.take_all("alloc.gamma") {
            match parse_f64_list(&v).map_err(|e| ConfigError::at(line, e))?.as_slice() {
                [a, b] => gammas.push((*a, *b)),
                _ => {
                    return Err(ConfigError::at(
                        line,
                        "alloc.gamma expects 'range_weight, velocity_weight'",
                    ))
                }
            }
        }
        if gammas.is_empty() {
            gammas.push((1.0, 1.0));
        }
        let pdsch = PdschConfig {
            code_rate: common.code_rate,
            ..PdschConfig::new([], 0)
        };
        let default_r0 = throughput_per_prb_slot(&pdsch, &common.dmrs);
        let (_, r0) = raw.get_or::<f64>("alloc.r0", default_r0)?;
        let mut problem = AllocProblem::new(numerology, m_max, n_max, alpha0, gammas, r0);
        if let Some((_, v)) = raw.get_with("alloc.r_max_norm", |s| parse_norm(s, &numerology))? {
            problem.r_max_norm = v;
        }
        if let Some((_, v)) = raw.get_with("alloc.d_max_norm", |s| parse_norm(s, &numerology))? {
            problem.d_max_norm = v;
        }
        if let Some((_, v)) = raw.get_with("alloc.v_max_norm", |s| parse_norm(s, &numerology))? {
            problem.v_max_norm = v;
        }
        // Seeds and PRS keys are irrelevant here but legal in shared files.
        for key in ["prs.comb_size", "prs.n_symbols", "prs.slots", "pdsch.slots"] {
            raw.take(key);
        }
        raw.finish()?;
        problem.validate()?;
        Ok(Self { problem })
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_raw(RawConfig::parse(text)?)
    }
}

impl TableScenario {
    pub fn from_raw(mut raw: RawConfig) -> Result<Self> {
        let mut out = Self::default();
        if let Some((line, v)) = raw.get_with("table.scs_khz", parse_usize_list)? {
            out.scs_khz = v.into_iter().map(|x| x as u32).collect();
            out.validate().map_err(|e| ConfigError::at(line, e.message))?;
        }
        if let Some((line, v)) = raw.get_with("table.comb", parse_usize_list)? {
            out.combs = v;
            out.validate().map_err(|e| ConfigError::at(line, e.message))?;
        }
        raw.finish()?;
        Ok(out)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_raw(RawConfig::parse(text)?)
    }
}

pub fn parse_scs_list(s: &str) -> std::result::Result<Vec<u32>, String> {
    parse_usize_list(s).map(|v| v.into_iter().map(|x| x as u32).collect())
}

pub fn parse_comb_list(s: &str) -> std::result::Result<Vec<usize>, String> {
    parse_usize_list(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_lists() {
        assert_eq!(parse_index_list("0-3").unwrap(), (0..=3).collect());
        assert_eq!(parse_index_list("3, 8,12").unwrap(), [3, 8, 12].into_iter().collect());
        assert_eq!(parse_index_list("0-1,5").unwrap(), [0, 1, 5].into_iter().collect());
        assert!(parse_index_list("3-1").is_err());
        assert!(parse_index_list("x").is_err());
    }

    #[test]
    fn defaults_parse() {
        let s = SensingScenario::parse("channel.target = 1057, 5\n").unwrap();
        assert_eq!(s.numerology.n_prb(), 64);
        assert_eq!(s.prs.slots, (0..4).collect());
        assert_eq!(s.pdsch.slots, (4..8).collect());
        assert_eq!(s.channel.targets.len(), 1);
        assert_eq!(s.detector.min_sep_bins, 16);
        assert_eq!(s.channel.snr_db, 10.0);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = SensingScenario::parse("# c\nprs.comb_size = 4\nbogus.key = 1\n").unwrap_err();
        assert_eq!(e.line, Some(3));
        assert!(e.message.contains("bogus.key"));

        let e = SensingScenario::parse("prs.comb_size = 3\n").unwrap_err();
        assert_eq!(e.line, Some(1));

        let e = SensingScenario::parse("seed = 1\nseed = 2\n").unwrap_err();
        assert_eq!(e.line, Some(2));

        let e = SensingScenario::parse("prs.slots = 0-4\npdsch.slots = 4-7\n").unwrap_err();
        assert_eq!(e.line, Some(2));
        assert!(e.message.contains("slot 4"));

        let e = SensingScenario::parse("\n\nchannel.target = 5000, 0\n").unwrap_err();
        assert_eq!(e.line, Some(3));

        let e = SensingScenario::parse("just words\n").unwrap_err();
        assert_eq!(e.line, Some(1));
    }

    #[test]
    fn algorithm_override_warns_on_mismatch() {
        let s = SensingScenario::parse("prs.comb_size = 4\ndeghost.algorithm = alg2\n").unwrap();
        assert_eq!(s.algorithm, AlgorithmChoice::Forced(Algorithm::JointIfft));
        assert_eq!(s.warnings.len(), 1);
        let s = SensingScenario::parse("prs.comb_size = 12\n").unwrap();
        assert_eq!(s.algorithm.resolve(12), Algorithm::JointIfft);
        assert!(s.warnings.is_empty());
    }

    #[test]
    fn snr_and_amplitude_forms() {
        let s = SensingScenario::parse("channel.snr_db = inf\nchannel.target = 100, -3, 0.5, 0.5\n").unwrap();
        assert_eq!(s.channel.snr_db, f64::INFINITY);
        assert_eq!(s.channel.targets[0].amplitude, Complex64::new(0.5, 0.5));
    }

    #[test]
    fn alloc_parsing_and_metric_tokens() {
        let a = AllocScenario::parse(
            "numerology.n_prb = 272\nnumerology.n_slots = 80\nalloc.d_max_norm = range_metric\nalloc.gamma = 1, 1\n",
        )
        .unwrap();
        assert_eq!((a.problem.m_max, a.problem.n_max), (272, 80));
        assert!((a.problem.d_max_norm - a.problem.range_metric()).abs() < 1e-9);
        assert!((a.problem.r0 - 298.59375).abs() < 1e-12);
        let e = AllocScenario::parse("alloc.m_max = 1\n").unwrap_err();
        assert!(e.message.contains("infeasible"));
    }

    #[test]
    fn table_rejects_comb_one() {
        let e = TableScenario::parse("table.comb = 1, 2\n").unwrap_err();
        assert_eq!(e.line, Some(1));
        let t = TableScenario::parse("").unwrap();
        assert_eq!(t.scs_khz.len() * t.combs.len(), 20);
    }
}
