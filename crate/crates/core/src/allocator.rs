//! PRB and slot split between PDSCH and per-target PRS.
//!
//! Maximises
//!
//! ```text
//! F = a0 m0 n0 R0 / R_norm - sum_k ( g_k1 / (d_norm m_k) * c/scs + g_k2 / (v_norm n_k) * c/(2 T_s f_c) )
//! ```
//!
//! over integers `m_i, n_i >= 1` with `sum m_i = M_max` and `sum n_i = N_max`.
//! For fixed `(m0, n0)` the sensing penalty separates into a PRB part and a
//! slot part, each a sum of convex `1/x` terms, so both are minimised exactly
//! by a small dynamic programme over the residual resources.

use ndarray::Array2;

use crate::grid::Numerology;
use crate::{Error, Result, SPEED_OF_LIGHT};

/// Relative tolerance under which two objective values are treated as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

fn tied(a: f64, b: f64) -> bool {
    (a - b).abs() <= TIE_TOLERANCE * a.abs().max(b.abs()).max(1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AllocProblem {
    pub m_max: usize,
    pub n_max: usize,
    /// Communication weight.
    pub alpha0: f64,
    /// Per-target (range weight, velocity weight).
    pub gammas: Vec<(f64, f64)>,
    /// PDSCH bits per PRB per slot.
    pub r0: f64,
    pub r_max_norm: f64,
    pub d_max_norm: f64,
    pub v_max_norm: f64,
    pub numerology: Numerology,
}

impl AllocProblem {
    /// Problem with the normalisations set to each metric's value when every
    /// resource goes to it: `R0 M N`, `c / (scs M)` and `c / (2 T_s f_c N)`.
    pub fn new(
        numerology: Numerology,
        m_max: usize,
        n_max: usize,
        alpha0: f64,
        gammas: Vec<(f64, f64)>,
        r0: f64,
    ) -> Self {
        let c = SPEED_OF_LIGHT;
        Self {
            m_max,
            n_max,
            alpha0,
            gammas,
            r0,
            r_max_norm: r0 * (m_max * n_max) as f64,
            d_max_norm: c / (numerology.scs_hz() * m_max as f64),
            v_max_norm: c / (2.0 * numerology.symbol_duration() * numerology.fc_hz() * n_max as f64),
            numerology,
        }
    }

    pub fn n_targets(&self) -> usize {
        self.gammas.len()
    }

    /// c / scs.
    pub fn range_metric(&self) -> f64 {
        SPEED_OF_LIGHT / self.numerology.scs_hz()
    }

    /// c / (2 T_s f_c).
    pub fn velocity_metric(&self) -> f64 {
        SPEED_OF_LIGHT / (2.0 * self.numerology.symbol_duration() * self.numerology.fc_hz())
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.n_targets();
        if k == 0 {
            return Err(Error::Config("allocation needs at least one sensing target".into()));
        }
        if self.m_max <= k || self.n_max <= k {
            return Err(Error::Config(format!(
                "infeasible: {} PRBs and {} slots cannot give one each to PDSCH and {k} targets",
                self.m_max, self.n_max
            )));
        }
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !positive(self.alpha0) || !self.gammas.iter().all(|&(a, b)| positive(a) && positive(b)) {
            return Err(Error::Config("allocation weights must be positive".into()));
        }
        if !(positive(self.r_max_norm) && positive(self.d_max_norm) && positive(self.v_max_norm)) {
            return Err(Error::Config("normalisation constants must be positive".into()));
        }
        if !(self.r0.is_finite() && self.r0 >= 0.0) {
            return Err(Error::Config("R0 must be non-negative".into()));
        }
        Ok(())
    }

    /// Multiplies every weight by `factor`.
    pub fn scaled_weights(&self, factor: f64) -> Self {
        Self {
            alpha0: self.alpha0 * factor,
            gammas: self.gammas.iter().map(|&(a, b)| (a * factor, b * factor)).collect(),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AllocPlan {
    /// PRBs and slots given to PDSCH.
    pub m0: usize,
    pub n0: usize,
    /// PRBs and slots given to each target's PRS.
    pub sensing: Vec<(usize, usize)>,
    pub objective: f64,
}

impl AllocPlan {
    pub fn sensing_prbs(&self) -> usize {
        self.sensing.iter().map(|s| s.0).sum()
    }

    pub fn sensing_slots(&self) -> usize {
        self.sensing.iter().map(|s| s.1).sum()
    }
}

/// F for the allocation `(m0, n0, sensing)`; checks every constraint first.
pub fn objective(m0: usize, n0: usize, sensing: &[(usize, usize)], problem: &AllocProblem) -> Result<f64> {
    if sensing.len() != problem.n_targets() {
        return Err(Error::Usage(format!(
            "plan has {} sensing entries for {} targets",
            sensing.len(),
            problem.n_targets()
        )));
    }
    let in_range = |x: usize, max: usize| (1..max).contains(&x);
    let all_m = std::iter::once(m0).chain(sensing.iter().map(|s| s.0));
    let all_n = std::iter::once(n0).chain(sensing.iter().map(|s| s.1));
    if !all_m.clone().all(|m| in_range(m, problem.m_max)) || !all_n.clone().all(|n| in_range(n, problem.n_max)) {
        return Err(Error::Usage("every allocation must lie in 1..max-1".into()));
    }
    if all_m.sum::<usize>() != problem.m_max || all_n.sum::<usize>() != problem.n_max {
        return Err(Error::Usage(format!(
            "allocations must sum to {} PRBs and {} slots",
            problem.m_max, problem.n_max
        )));
    }
    let comm = problem.alpha0 * (m0 * n0) as f64 / problem.r_max_norm * problem.r0;
    let range_metric = problem.range_metric();
    let velocity_metric = problem.velocity_metric();
    let sense: f64 = sensing
        .iter()
        .zip(&problem.gammas)
        .map(|(&(m, n), &(g1, g2))| {
            g1 / (problem.d_max_norm * m as f64) * range_metric + g2 / (problem.v_max_norm * n as f64) * velocity_metric
        })
        .sum();
    Ok(comm - sense)
}

/// Minimum of `sum_k weights[k] / x_k` over `x_k >= 1` summing to each
/// possible total, with the lexicographically largest minimiser kept.
struct SplitTable {
    /// best[k][r]: minimum cost of targets k.. using exactly r units.
    best: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl SplitTable {
    fn new(weights: Vec<f64>, max_total: usize) -> Self {
        let k = weights.len();
        let mut best = vec![vec![f64::INFINITY; max_total + 1]; k + 1];
        best[k][0] = 0.0;
        for t in (0..k).rev() {
            let remaining_after = k - t - 1;
            for r in (k - t)..=max_total {
                best[t][r] = (1..=r - remaining_after)
                    .map(|x| weights[t] / x as f64 + best[t + 1][r - x])
                    .fold(f64::INFINITY, f64::min);
            }
        }
        Self { best, weights }
    }

    fn split(&self, total: usize) -> Vec<usize> {
        let k = self.weights.len();
        let mut out = Vec::with_capacity(k);
        let mut r = total;
        for t in 0..k {
            let remaining_after = k - t - 1;
            let target = self.best[t][r];
            let x = (1..=r - remaining_after)
                .rev()
                .find(|&x| tied(self.weights[t] / x as f64 + self.best[t + 1][r - x], target))
                .expect("minimiser exists for feasible totals");
            out.push(x);
            r -= x;
        }
        out
    }
}

/// Globally optimal plan. Ties go to larger `m0`, then larger `n0`, then the
/// lexicographically largest per-target PRBs, then slots.
pub fn solve(problem: &AllocProblem) -> Result<AllocPlan> {
    problem.validate()?;
    let k = problem.n_targets();
    let range_weights = problem
        .gammas
        .iter()
        .map(|g| g.0 * problem.range_metric() / problem.d_max_norm)
        .collect();
    let velocity_weights = problem
        .gammas
        .iter()
        .map(|g| g.1 * problem.velocity_metric() / problem.v_max_norm)
        .collect();
    let prb_table = SplitTable::new(range_weights, problem.m_max - 1);
    let slot_table = SplitTable::new(velocity_weights, problem.n_max - 1);

    let prb_splits: Vec<Vec<usize>> = (0..problem.m_max)
        .map(|r| if r >= k { prb_table.split(r) } else { Vec::new() })
        .collect();
    let slot_splits: Vec<Vec<usize>> = (0..problem.n_max)
        .map(|r| if r >= k { slot_table.split(r) } else { Vec::new() })
        .collect();

    let mut best: Option<AllocPlan> = None;
    for m0 in (1..=problem.m_max - k).rev() {
        let ms = &prb_splits[problem.m_max - m0];
        for n0 in (1..=problem.n_max - k).rev() {
            let ns = &slot_splits[problem.n_max - n0];
            let sensing: Vec<(usize, usize)> = ms.iter().copied().zip(ns.iter().copied()).collect();
            let f = objective(m0, n0, &sensing, problem)?;
            let better = match &best {
                None => true,
                Some(b) => f > b.objective && !tied(f, b.objective),
            };
            if better {
                best = Some(AllocPlan {
                    m0,
                    n0,
                    sensing,
                    objective: f,
                });
            }
        }
    }
    Ok(best.expect("feasible problem has at least one plan"))
}

/// F over every single-target split, indexed by sensing PRBs and slots.
#[derive(Debug, Clone, PartialEq)]
pub struct Surface {
    /// values[[i, j]] holds F for `m1 = i + 1`, `n1 = j + 1`.
    pub values: Array2<f64>,
}

impl Surface {
    /// (m1, n1, F) of the best cell, with the same tie-break as [`solve`].
    pub fn argmax(&self) -> (usize, usize, f64) {
        let mut best = (1, 1, self.values[[0, 0]]);
        for ((i, j), &f) in self.values.indexed_iter() {
            if f > best.2 && !tied(f, best.2) {
                best = (i + 1, j + 1, f);
            }
        }
        best
    }
}

/// Objective on the full `(m1, n1)` lattice. Single target only.
pub fn surface(problem: &AllocProblem) -> Result<Surface> {
    problem.validate()?;
    if problem.n_targets() != 1 {
        return Err(Error::Usage(format!(
            "surface needs exactly one target, problem has {}",
            problem.n_targets()
        )));
    }
    let (m_max, n_max) = (problem.m_max, problem.n_max);
    let mut values = Array2::zeros((m_max - 1, n_max - 1));
    for ((i, j), v) in values.indexed_iter_mut() {
        let (m1, n1) = (i + 1, j + 1);
        *v = objective(m_max - m1, n_max - n1, &[(m1, n1)], problem)?;
    }
    Ok(Surface { values })
}
