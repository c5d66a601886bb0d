//! Ghost spacing for every (subcarrier spacing, comb) pair.

use isac_core::estimator::ambiguity_interval;

use crate::config::{ConfigError, TableScenario};

#[derive(Debug, Clone, PartialEq)]
pub struct AmbiguityTable {
    pub scs_khz: Vec<u32>,
    pub combs: Vec<usize>,
    /// values[i][j] for scs_khz[i] and combs[j], metres.
    pub values: Vec<Vec<f64>>,
}

pub fn run_ambiguity_table(scenario: &TableScenario) -> Result<AmbiguityTable, ConfigError> {
    scenario.validate()?;
    let values = scenario
        .scs_khz
        .iter()
        .map(|&scs| {
            scenario
                .combs
                .iter()
                .map(|&comb| ambiguity_interval(f64::from(scs) * 1e3, comb))
                .collect()
        })
        .collect();
    Ok(AmbiguityTable {
        scs_khz: scenario.scs_khz.clone(),
        combs: scenario.combs.clone(),
        values,
    })
}
