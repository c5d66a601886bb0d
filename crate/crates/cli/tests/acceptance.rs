//! One line per acceptance criterion; exits non-zero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use isac_core::allocator::{solve, surface, AllocProblem, TIE_TOLERANCE};
use isac_core::channel::{apply_channel, Target};
use isac_core::deghost::Algorithm;
use isac_core::estimator::{compensate_delay, divide, divide_symbols, local_maxima, range_profile};
use isac_core::grid::{Numerology, ReKind};
use isac_core::ndarray::Array2;
use isac_core::num_complex::Complex64;
use isac_core::refsig::{build_frame, DmrsConfig, PdschConfig, PrsConfig};
use isac_core::SPEED_OF_LIGHT;
use isac_sim::config::{AllocScenario, SensingScenario, TableScenario};
use isac_sim::presets;
use isac_sim::simulate::{run_sensing, SensingReport};
use isac_sim::table::run_ambiguity_table;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TRUTH_M: [f64; 2] = [1057.0, 1242.0];
const TRUE_VELOCITY: f64 = 5.0;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

/// `base` with every key in `overrides` replaced; an empty value removes it.
fn preset_with(base: &str, overrides: &[(&str, &str)]) -> String {
    let mut out: String = base
        .lines()
        .filter(|l| {
            let key = l.split('=').next().unwrap_or("").trim();
            !overrides.iter().any(|(k, _)| *k == key)
        })
        .map(|l| format!("{l}\n"))
        .collect();
    for (k, v) in overrides {
        if !v.is_empty() {
            out.push_str(&format!("{k} = {v}\n"));
        }
    }
    out
}

fn sensing(base: &str, overrides: &[(&str, &str)]) -> Result<(SensingScenario, SensingReport, Duration), String> {
    let scenario = SensingScenario::parse(&preset_with(base, overrides)).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let report = run_sensing(&scenario).map_err(|e| e.to_string())?;
    Ok((scenario, report, start.elapsed()))
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// Published ghost spacings, metres, rows 15..240 kHz, columns comb 2, 4, 6, 12.
const PUBLISHED_SPACING: [[f64; 4]; 5] = [
    [4996.0, 2498.0, 1665.0, 832.0],
    [2498.0, 1249.0, 832.0, 416.0],
    [1250.0, 624.0, 416.0, 208.0],
    [624.0, 312.0, 208.0, 104.0],
    [312.0, 156.0, 104.0, 52.0],
];

fn spacing_table() -> Outcome {
    let scenario = TableScenario::parse(presets::TABLE1).map_err(|e| e.to_string())?;
    let table = run_ambiguity_table(&scenario).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for (row, published_row) in table.values.iter().zip(PUBLISHED_SPACING) {
        for (v, p) in row.iter().zip(published_row) {
            worst = worst.max((v - p).abs());
            count += 1;
        }
    }
    check(
        count == 20 && worst <= 1.0,
        format!("{count} entries, max |computed - published| = {worst:.3} m (limit 1 m)"),
    )
}

fn ghost_periodicity() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for (comb, preset) in [(4, presets::FIG4_COMB4), (12, presets::FIG5_COMB12)] {
        let (scenario, report, elapsed) = sensing(preset, &[("channel.target", "1057, 0"), ("channel.snr_db", "inf")])?;
        let p = &report.prs_profile;
        let norm = p.normalized();
        let peaks: Vec<usize> = local_maxima(&norm).into_iter().filter(|&i| norm[i] > 0.9).collect();
        let spacing = SPEED_OF_LIGHT / (comb as f64 * scenario.numerology.scs_hz());
        let spacing_ok = peaks.len() == comb
            && (0..comb).all(|i| {
                let gap = (peaks[(i + 1) % comb] + p.len() - peaks[i]) % p.len();
                (gap as f64 * p.bin_scale_m - spacing).abs() <= p.bin_scale_m
            });
        ok &= spacing_ok && elapsed < Duration::from_secs(5);
        notes.push(format!(
            "comb {comb}: {} peaks > 0.9, spacing {:.1} m expected {spacing:.1} m, {:.2} s",
            peaks.len(),
            peaks
                .get(1)
                .zip(peaks.first())
                .map_or(0.0, |(b, a)| (b - a) as f64 * p.bin_scale_m),
            elapsed.as_secs_f64()
        ));
    }
    check(ok, notes.join("; "))
}

/// Exactly two detections within one range resolution of truth, every other
/// local maximum of the fused profile below 0.5.
fn deghost(preset: &str, expected: Algorithm) -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for snr in ["inf", "10"] {
        let (scenario, report, elapsed) = sensing(preset, &[("channel.snr_db", snr)])?;
        let resolution = SPEED_OF_LIGHT / (scenario.numerology.scs_hz() * scenario.numerology.n_subcarriers() as f64);
        let mut ranges: Vec<f64> = report.detections.iter().map(|d| d.bistatic_range_m).collect();
        ranges.sort_by(f64::total_cmp);
        let worst_err = ranges
            .iter()
            .zip(TRUTH_M)
            .map(|(r, t)| (r - t).abs())
            .fold(0.0, f64::max);
        let norm = {
            let max = report.fused.magnitudes.iter().copied().fold(0.0, f64::max);
            report.fused.magnitudes.iter().map(|x| x / max).collect::<Vec<_>>()
        };
        let strongest_false = local_maxima(&norm)
            .into_iter()
            .filter(|&i| {
                let r = i as f64 * report.fused.bin_scale_m;
                TRUTH_M.iter().all(|t| (r - t).abs() > resolution)
            })
            .map(|i| norm[i])
            .fold(0.0, f64::max);
        let pass = report.algorithm == expected
            && ranges.len() == 2
            && worst_err <= resolution
            && strongest_false < 0.5
            && elapsed < Duration::from_secs(30);
        ok &= pass;
        notes.push(format!(
            "snr {snr}: {} via {}, {} detections, max error {worst_err:.2} m (limit {resolution:.2} m), \
             strongest other peak {strongest_false:.3}, {:.2} s",
            if pass { "ok" } else { "FAILED" },
            report.algorithm,
            ranges.len(),
            elapsed.as_secs_f64()
        ));
    }
    check(ok, notes.join("; "))
}

fn velocity() -> Outcome {
    let (scenario, report, _) = sensing(presets::FIG4_COMB4, &[("channel.snr_db", "inf")])?;
    let num = scenario.numerology;
    let t_s = 1.0 / num.scs_hz();
    let bin = SPEED_OF_LIGHT / (2.0 * t_s * num.fc_hz() * (scenario.n_a * num.n_symbols()) as f64);
    let worst = report
        .detections
        .iter()
        .map(|d| (d.velocity_mps - TRUE_VELOCITY).abs())
        .fold(0.0, f64::max);
    check(
        report.detections.len() == 2 && worst <= bin,
        format!(
            "{} detections, max |v - 5| = {worst:.3} m/s (one Doppler bin = {bin:.3} m/s)",
            report.detections.len()
        ),
    )
}

fn estimator_oracles() -> Outcome {
    let num = Numerology::new(120, 28e9, 64, 1).unwrap();
    let pdsch = PdschConfig::new([0], 1);
    let tx = build_frame(num, &PrsConfig::new(4, 12, []), &DmrsConfig::default(), &pdsch)
        .map_err(|e| e.to_string())?
        .grid;
    let m = num.n_subcarriers();
    let m_a = 4;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);

    let mut argmax_misses = 0;
    let mut worst_parseval: f64 = 0.0;
    let mut worst_involution: f64 = 0.0;
    for _ in 0..50 {
        let l0 = rng.random_range(0..m);
        let target = Target::new(l0 as f64 * SPEED_OF_LIGHT / (num.scs_hz() * m as f64), 0.0);
        let rx = apply_channel(&tx, &[target]).map_err(|e| e.to_string())?;
        let g = divide(&rx, &tx).map_err(|e| e.to_string())?;
        let p = range_profile(&g, m_a, num.scs_hz()).map_err(|e| e.to_string())?;
        let best = p
            .magnitudes
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        if best != l0 * m_a {
            argmax_misses += 1;
        }

        let col = g.column(rng.random_range(0..g.ncols())).to_owned();
        let single = Array2::from_shape_vec((m, 1), col.to_vec()).unwrap();
        let sp = range_profile(&single, m_a, num.scs_hz()).map_err(|e| e.to_string())?;
        let time: f64 = sp.magnitudes.iter().map(|x| x * x).sum();
        let freq: f64 = col.iter().map(|x| x.norm_sqr()).sum::<f64>() / (m_a * m) as f64;
        worst_parseval = worst_parseval.max((time - freq).abs() / freq);

        let flat = compensate_delay(&g, target.delay_s(), num.scs_hz());
        let back = compensate_delay(&flat, -target.delay_s(), num.scs_hz());
        let inverse_ref = tx.symbols().mapv(|v| if v.norm() > 0.0 { 1.0 / v } else { v });
        let remultiplied = divide_symbols(&g, &inverse_ref).map_err(|e| e.to_string())?;
        for ((idx, x), kind) in flat.indexed_iter().zip(tx.kinds()) {
            let unit = if *kind == ReKind::Empty { 0.0 } else { 1.0 };
            worst_involution = worst_involution
                .max((x - Complex64::new(unit, 0.0)).norm())
                .max((back[idx] - g[idx]).norm())
                .max((remultiplied[idx] - rx.symbols()[idx]).norm());
        }
    }
    check(
        argmax_misses == 0 && worst_parseval <= 1e-9 && worst_involution <= 1e-12,
        format!(
            "50 targets: {argmax_misses} argmax misses, Parseval rel. error {worst_parseval:.1e} (limit 1e-9), \
             involution error {worst_involution:.1e} (limit 1e-12)"
        ),
    )
}

fn tied(a: f64, b: f64) -> bool {
    (a - b).abs() <= TIE_TOLERANCE * a.abs().max(b.abs()).max(1.0)
}

fn compositions(total: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 1 {
        return vec![vec![total]];
    }
    (1..total)
        .flat_map(|x| {
            compositions(total - x, k - 1).into_iter().map(move |mut rest| {
                rest.insert(0, x);
                rest
            })
        })
        .collect()
}

type Choice = (f64, usize, usize, Vec<usize>, Vec<usize>);

/// Every feasible allocation, scored from the objective's definition.
fn brute_force(p: &AllocProblem) -> Choice {
    let k = p.gammas.len();
    let scs = p.numerology.scs_hz();
    let velocity_metric = SPEED_OF_LIGHT / (2.0 * (1.0 / scs) * p.numerology.fc_hz());
    let mut best: Option<Choice> = None;
    for m0 in 1..=p.m_max - k {
        for n0 in 1..=p.n_max - k {
            for ms in compositions(p.m_max - m0, k) {
                for ns in compositions(p.n_max - n0, k) {
                    let penalty: f64 = (0..k)
                        .map(|t| {
                            p.gammas[t].0 / (p.d_max_norm * ms[t] as f64) * SPEED_OF_LIGHT / scs
                                + p.gammas[t].1 / (p.v_max_norm * ns[t] as f64) * velocity_metric
                        })
                        .sum();
                    let f = p.alpha0 * (m0 * n0) as f64 * p.r0 / p.r_max_norm - penalty;
                    let cand = (f, m0, n0, ms.clone(), ns);
                    let replace = match &best {
                        None => true,
                        Some(b) if tied(cand.0, b.0) => (cand.1, cand.2, &cand.3, &cand.4) > (b.1, b.2, &b.3, &b.4),
                        Some(b) => cand.0 > b.0,
                    };
                    if replace {
                        best = Some(cand);
                    }
                }
            }
        }
    }
    best.unwrap()
}

fn allocator_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut mismatches = 0;
    let mut worst: f64 = 0.0;
    let start = Instant::now();
    for _ in 0..100 {
        let k = rng.random_range(1..=2);
        let m_max = rng.random_range(k + 1..=16);
        let n_max = rng.random_range(k + 1..=8);
        let num = Numerology::new([15, 30, 60, 120, 240][rng.random_range(0..5)], 28e9, 64, 8).unwrap();
        let gammas = (0..k)
            .map(|_| (rng.random_range(0.1..4.0), rng.random_range(0.1..4.0)))
            .collect();
        let p = AllocProblem::new(num, m_max, n_max, rng.random_range(0.1..4.0), gammas, 298.59375);
        let plan = solve(&p).map_err(|e| e.to_string())?;
        let (f, m0, n0, ms, ns) = brute_force(&p);
        let got_ms: Vec<usize> = plan.sensing.iter().map(|s| s.0).collect();
        let got_ns: Vec<usize> = plan.sensing.iter().map(|s| s.1).collect();
        if (plan.m0, plan.n0, got_ms, got_ns) != (m0, n0, ms, ns) || !tied(plan.objective, f) {
            mismatches += 1;
        }
        worst = worst.max((plan.objective - f).abs() / f.abs().max(1.0));
    }
    check(
        mismatches == 0,
        format!(
            "100 problems: {mismatches} mismatches, max rel. objective gap {worst:.1e} (tolerance 1e-12), {:.2} s",
            start.elapsed().as_secs_f64()
        ),
    )
}

fn allocation_optimum() -> Outcome {
    let preset = AllocScenario::parse(presets::FIG6_ALLOC).map_err(|e| e.to_string())?;
    let default_norms = AllocScenario::parse(&preset_with(
        presets::FIG6_ALLOC,
        &[("alloc.d_max_norm", ""), ("alloc.v_max_norm", "")],
    ))
    .map_err(|e| e.to_string())?;

    let mut notes = Vec::new();
    let mut ok = true;
    for (label, p) in [("default", &default_norms.problem), ("override", &preset.problem)] {
        let plan = solve(p).map_err(|e| e.to_string())?;
        let (m1, n1, f) = surface(p).map_err(|e| e.to_string())?.argmax();
        let consistent = plan.sensing == vec![(m1, n1)] && tied(plan.objective, f);
        let scaled = solve(&p.scaled_weights(3.5)).map_err(|e| e.to_string())?;
        let covariant = scaled.sensing == plan.sensing && tied(scaled.objective, 3.5 * plan.objective);
        ok &= consistent && covariant;
        notes.push(format!(
            "{label}: sensing ({m1} PRBs, {n1} slots), surface/solve {}, scale covariance {}",
            if consistent { "agree" } else { "DISAGREE" },
            if covariant { "holds" } else { "BROKEN" }
        ));
        if label == "override" {
            ok &= (m1, n1) == (12, 6);
        }
    }
    check(ok, notes.join("; "))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("ghost spacing table", spacing_table),
        ("PRS-only ghost periodicity", ghost_periodicity),
        ("comb-4 de-ghosting (Hadamard)", || {
            deghost(presets::FIG4_COMB4, Algorithm::Hadamard)
        }),
        ("comb-12 de-ghosting (joint IFFT)", || {
            deghost(presets::FIG5_COMB12, Algorithm::JointIfft)
        }),
        ("velocity estimation", velocity),
        ("estimator oracles", estimator_oracles),
        ("allocator oracle", allocator_oracle),
        ("allocation optimum", allocation_optimum),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {} PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} FAIL {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
