//! Acceptance suite: one line per criterion, `PASS` or `FAIL`, followed by
//! the measured values. Exits nonzero if any criterion fails.
//!
//! Pass a substring (e.g. `c06`) to run only matching criteria.

use std::process::ExitCode;
use std::time::Instant;

use econophys::boundary::BoundaryPolicy;
use econophys::engine::{RunOptions, Simulation};
use econophys::harness::{oracle_check, FORMULA_TOLERANCE, ORACLE_KS_TOLERANCE};
use econophys::kinetic::{
    detailed_balance_residual, discrete_exponential, kernel_symmetry_check, stationary_solve,
    Kernel, KernelSymmetry, KineticGrid, SolveOptions,
};
use econophys::rules::saving_exchange;
use econophys::stats::{
    entropy_per_agent, fit_bounded_exponential, fit_exponential, fit_gamma, fit_two_sided,
    ks_discrete, log_linear_slope, max_entropy_reference, stationarity_detector,
    tail_exponent_hill, two_sided_max_entropy_slopes, window_histograms, window_series,
    MoneyHistogram, StationarityParams,
};
use econophys::{simulate, RuleSpec, SimConfig};
use rand::{Rng, SeedableRng};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

// 1. Exponential equilibrium: uniform random amounts and unit amounts.
fn c01_exponential_equilibrium() -> Outcome {
    let uniform = SimConfig::new(
        500,
        1000.0,
        RuleSpec::UniformRandomFraction,
        BoundaryPolicy::no_debt(),
    )
    .sweeps(50_000)
    .snapshot_every(100)
    .seed(101);
    let rec = simulate(&uniform).unwrap();
    let fu = fit_exponential(&rec.pooled_balances(100), 0.0).unwrap();
    let tu = fu.temperature.unwrap();

    // Unit transfers diffuse: mixing takes ~T^2 sweeps, so this arm runs
    // far longer than the 5e4 sweeps used above.
    let unit = SimConfig::new(
        500,
        1000.0,
        RuleSpec::FixedAmount { amount: 1.0 },
        BoundaryPolicy::no_debt(),
    )
    .integer()
    .sweeps(6_000_000)
    .snapshot_every(30_000)
    .seed(102);
    let start = Instant::now();
    let rec = simulate(&unit).unwrap();
    let unit_secs = start.elapsed().as_secs_f64();
    let fi = fit_exponential(&rec.pooled_balances(100), 0.0).unwrap();
    let ti = fi.temperature.unwrap();

    let ok = |t: f64, ks: f64| (950.0..=1050.0).contains(&t) && ks < 0.02;
    outcome(
        ok(tu, fu.ks) && ok(ti, fi.ks) && unit_secs <= 60.0,
        format!(
            "uniform: T={tu:.1} KS={:.4}; unit (6e6 sweeps, {unit_secs:.0}s): T={ti:.1} KS={:.4}",
            fu.ks, fi.ks
        ),
    )
}

// 2. Debt cap raises the temperature to mean + cap.
fn c02_debt_cap_temperature() -> Outcome {
    let base = |policy| {
        SimConfig::new(500, 1000.0, RuleSpec::UniformRandomFraction, policy)
            .sweeps(50_000)
            .snapshot_every(100)
    };
    let rec = simulate(&base(BoundaryPolicy::debt_cap(800.0)).seed(201)).unwrap();
    let fd = fit_exponential(&rec.pooled_balances(100), -800.0).unwrap();
    let td = fd.temperature.unwrap();
    let rec = simulate(&base(BoundaryPolicy::no_debt()).seed(202)).unwrap();
    let fn_ = fit_exponential(&rec.pooled_balances(100), 0.0).unwrap();
    let tn = fn_.temperature.unwrap();
    outcome(
        (1710.0..=1890.0).contains(&td) && (950.0..=1050.0).contains(&tn),
        format!(
            "debt cap 800: T={td:.1} KS={:.4}; no debt: T={tn:.1} KS={:.4}",
            fd.ks, fn_.ks
        ),
    )
}

// 3. Reserve ratio R = 0.8: positive and negative money per agent.
fn c03_reserve_ratio_two_temperatures() -> Outcome {
    let cfg = SimConfig::new(
        500,
        1000.0,
        RuleSpec::UniformRandomFraction,
        BoundaryPolicy::reserve_ratio(0.8),
    )
    .sweeps(50_000)
    .snapshot_every(100)
    .seed(301);
    let mut sim = Simulation::new(&cfg, 0).unwrap();
    let rec = sim.run().unwrap();
    let bank = sim.ledger.bank();
    let saturation = bank.loans_outstanding / bank.loan_cap;
    let pooled = rec.pooled_balances(100);
    let f = fit_two_sided(&pooled).unwrap();
    let (pred_pos, pred_neg) =
        two_sided_max_entropy_slopes(f.positive_temperature, f.negative_temperature);
    let hist = MoneyHistogram::from_samples(&pooled, 50.0);
    let slope_pos = log_linear_slope(&hist, 0.0, 3000.0).unwrap();
    let slope_neg = log_linear_slope(&hist, -1000.0, 0.0).unwrap();
    let ok = (1125.0..=1375.0).contains(&f.positive_temperature)
        && (225.0..=275.0).contains(&f.negative_temperature)
        && saturation > 0.99
        && slope_pos < 0.0
        && slope_neg > 0.0;
    outcome(
        ok,
        format!(
            "T+={:.1} T-={:.1} (loans at {:.1}% of cap); decay lengths {:.0}/{:.0} \
             (max-entropy prediction {pred_pos:.0}/{pred_neg:.0}); log slopes {:.2e}/{:.2e}",
            f.positive_temperature,
            f.negative_temperature,
            100.0 * saturation,
            f.positive_slope,
            f.negative_slope,
            slope_pos,
            slope_neg
        ),
    )
}

// 4. Multiplicative transfers suppress the low end.
fn c04_multiplicative_gamma() -> Outcome {
    let cfg = SimConfig::new(
        500,
        1000.0,
        RuleSpec::Multiplicative { gamma: 1.0 / 3.0 },
        BoundaryPolicy::no_debt(),
    )
    .sweeps(50_000)
    .snapshot_every(100)
    .seed(401);
    let rec = simulate(&cfg).unwrap();
    let pooled = rec.pooled_balances(100);
    let w = cfg.effective_bin_width();
    let hist = MoneyHistogram::from_samples(&pooled, w);
    let first_bin = hist.probability_at(0.0);
    let expected = 1.0 - (-w / 1000.0_f64).exp();
    let g = fit_gamma(&pooled).unwrap();
    let e = fit_exponential(&pooled, 0.0).unwrap();
    let beta = g.beta.unwrap();
    outcome(
        first_bin < 0.2 * expected && beta > 0.0 && g.ks < e.ks,
        format!(
            "first bin {first_bin:.2e} (exponential {expected:.4}); beta={beta:.2} KS gamma={:.4} exp={:.4}",
            g.ks, e.ks
        ),
    )
}

// 5. Uniform saving propensity: nobody is left with nothing.
fn c05_saving_propensity() -> Outcome {
    let cfg = SimConfig::new(
        500,
        1000.0,
        RuleSpec::SavingPropensity { lambda: 0.5 },
        BoundaryPolicy::no_debt(),
    )
    .sweeps(50_000)
    .snapshot_every(100)
    .seed(501);
    let mut sim = Simulation::new(&cfg, 0).unwrap();
    let rec = sim.run().unwrap();
    let pooled = rec.pooled_balances(100);
    let min = pooled.iter().cloned().fold(f64::INFINITY, f64::min);
    let hist = MoneyHistogram::from_samples(&pooled, cfg.effective_bin_width());
    let first_bin = hist.probability_at(0.0);

    let mut rng = rand_xoshiro::Xoshiro256PlusPlus::seed_from_u64(502);
    let mut worst: f64 = 0.0;
    for _ in 0..1_000_000 {
        let (mi, mj) = (rng.gen::<f64>() * 5000.0, rng.gen::<f64>() * 5000.0);
        let (a, b) = saving_exchange(0.5, 0.5, mi, mj, rng.gen()).unwrap();
        worst = worst.max(((a + b) - (mi + mj)).abs() / (mi + mj).max(1.0));
    }
    let drift = sim.ledger.conservation_residual().abs() / sim.ledger.monetary_base();
    outcome(
        min > 0.0 && first_bin < 1e-3 && worst <= 1e-12,
        format!(
            "min balance {min:.2}; first bin {first_bin:.2e}; worst pair-sum error {worst:.1e}; \
             total drift after run {drift:.1e}"
        ),
    )
}

// 6. Random saving propensities: Pareto tail with density exponent 2.
fn c06_random_saving_tail() -> Outcome {
    let cfg = SimConfig::new(
        1000,
        1000.0,
        RuleSpec::RandomSavingPropensity {
            lambda_max: econophys::rules::DEFAULT_LAMBDA_MAX,
        },
        BoundaryPolicy::no_debt(),
    )
    .sweeps(100_000)
    .snapshot_every(1000)
    .seed(601);
    let rec = simulate(&cfg).unwrap();
    let pooled = rec.pooled_balances(50);
    let h = tail_exponent_hill(&pooled, 0.05).unwrap();
    let d = h.density_exponent();
    outcome(
        (1.7..=2.3).contains(&d),
        format!(
            "density exponent {d:.3} (alpha {:.3}, k={}, threshold {:.0})",
            h.alpha, h.k, h.threshold
        ),
    )
}

// 7. Unlimited debt never settles.
fn c07_unlimited_debt_instability() -> Outcome {
    let sweeps = 100_000;
    let window = sweeps / 10;
    let cfg = SimConfig::new(
        500,
        1000.0,
        RuleSpec::UniformRandomFraction,
        BoundaryPolicy::unlimited(),
    )
    .sweeps(sweeps)
    .snapshot_every(100)
    .seed(701);
    let rec = simulate(&cfg).unwrap();
    let params = StationarityParams {
        window,
        ..StationarityParams::default()
    };
    let verdict = stationarity_detector(&rec.snapshots, &params).unwrap();
    let series = window_series(&rec.snapshots, window).unwrap();
    let windows = &series[1..];
    let increasing = windows.windows(2).all(|w| w[1].variance > w[0].variance);
    let last = rec.last();
    let mean = last.histogram.sample_mean();
    let se = (last.histogram.sample_variance() / 500.0).sqrt();
    let drift = rec
        .snapshots
        .iter()
        .map(|s| (s.histogram.sample_mean() - 1000.0).abs())
        .fold(0.0, f64::max);
    let ks_min = verdict
        .adjacent_distances
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    outcome(
        !verdict.stationary && windows.len() == 10 && increasing && (mean - 1000.0).abs() <= 3.0 * se,
        format!(
            "stationary={} over {} windows (smallest adjacent KS {ks_min:.3}); variance {:.3e} -> {:.3e}, \
             increasing={increasing}; mean {mean:.6} (max drift {drift:.1e}, 3 SE = {:.0})",
            verdict.stationary,
            windows.len(),
            windows[0].variance,
            windows[windows.len() - 1].variance,
            3.0 * se
        ),
    )
}

// 8. Entropy grows from zero to the maximum.
fn c08_entropy_growth() -> Outcome {
    let (agents, replicates, window, windows) = (1000, 200, 10u64, 20u64);
    let cfg = SimConfig::new(
        agents,
        1000.0,
        RuleSpec::UniformRandomFraction,
        BoundaryPolicy::no_debt(),
    )
    .sweeps(window * windows)
    .snapshot_every(1)
    .seed(801);
    let options = RunOptions {
        keep_balances: false,
        ..RunOptions::from_config(&cfg)
    };
    let mut pooled: Vec<MoneyHistogram> = Vec::new();
    let mut initial = MoneyHistogram::new(options.bin_width);
    for r in 0..replicates {
        let mut sim = Simulation::new(&cfg, r).unwrap();
        let rec = sim.run_with(cfg.sweeps, &options).unwrap();
        initial.merge(&rec.snapshots[0].histogram).unwrap();
        for (k, (_, h)) in window_histograms(&rec.snapshots, window)
            .unwrap()
            .into_iter()
            .enumerate()
        {
            if pooled.len() <= k {
                pooled.push(MoneyHistogram::new(options.bin_width));
            }
            pooled[k].merge(&h).unwrap();
        }
    }
    let mut series = vec![entropy_per_agent(&initial).unwrap()];
    series.extend(pooled.iter().map(|h| entropy_per_agent(h).unwrap()));
    let worst_drop = series
        .windows(2)
        .map(|w| w[0] - w[1])
        .fold(f64::NEG_INFINITY, f64::max);
    let last = pooled.last().unwrap();
    let reference = max_entropy_reference(last, 0.0);
    let final_s = *series.last().unwrap();
    outcome(
        series[0] == 0.0 && worst_drop <= 1e-3 && (final_s - reference).abs() <= 1e-2,
        format!(
            "S: {:.4} -> {:.4} -> {final_s:.4} (max-entropy {reference:.4}); largest drop {worst_drop:.1e}",
            series[0], series[1]
        ),
    )
}

// 9. Exact chain, closed form and Monte Carlo agree on small systems.
fn c09_oracle_equivalence() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (n, m) in [(2usize, 2u64), (3, 6), (5, 20)] {
        let r = oracle_check(n, m, 1_000_000, 900 + n as u64).unwrap();
        ok &= r.max_abs_enumerated_vs_formula <= FORMULA_TOLERANCE
            && r.ks_monte_carlo_vs_enumerated < ORACLE_KS_TOLERANCE;
        parts.push(format!(
            "({n},{m}) {} states: formula gap {:.1e}, MC KS {:.4}",
            r.states, r.max_abs_enumerated_vs_formula, r.ks_monte_carlo_vs_enumerated
        ));
    }
    outcome(ok, parts.join("; "))
}

/// Time-averaged integer histogram of an `N = 1000` run with mean 20, as
/// probabilities on `0..points`.
fn integer_histogram(rule: RuleSpec, points: usize, seed: u64) -> Vec<f64> {
    let cfg = SimConfig::new(1000, 20.0, rule, BoundaryPolicy::no_debt())
        .integer()
        .bin_width(1.0)
        .sweeps(40_000)
        .snapshot_every(20)
        .seed(seed);
    let rec = simulate(&cfg).unwrap();
    let mut counts = vec![0.0; points];
    let pooled = rec.pooled_balances(1000);
    for &m in &pooled {
        counts[m as usize] += 1.0;
    }
    counts.iter().map(|c| c / pooled.len() as f64).collect()
}

// 10. Master equation vs Monte Carlo.
fn c10_kinetic_cross_validation() -> Outcome {
    let points = 400;
    let solve = |kernel: Kernel| {
        let mut grid = KineticGrid::delta(0.0, 1.0, points, 20.0, kernel).unwrap();
        let report = stationary_solve(&mut grid, &SolveOptions::default()).unwrap();
        (grid, report)
    };
    let (fixed, rf) = solve(Kernel::FixedStep { steps: 1 });
    let gamma = 1.0 / 3.0;
    let (prop, rp) = solve(Kernel::Proportional { gamma });
    let mc_fixed = integer_histogram(RuleSpec::FixedAmount { amount: 1.0 }, fixed.points(), 1001);
    let mc_prop = integer_histogram(RuleSpec::Multiplicative { gamma }, prop.points(), 1002);
    let ks_fixed = ks_discrete(&fixed.probs, &mc_fixed);
    let ks_prop = ks_discrete(&prop.probs, &mc_prop);

    let exp = KineticGrid::new(
        0.0,
        1.0,
        discrete_exponential(points, 20.0),
        Kernel::FixedStep { steps: 1 },
    )
    .unwrap();
    let db = detailed_balance_residual(&exp);
    let asym = kernel_symmetry_check(&Kernel::Proportional { gamma }, points);
    let asymmetric = matches!(asym, KernelSymmetry::Asymmetric { .. });
    outcome(
        rf.converged
            && rp.converged
            && ks_fixed < 0.03
            && ks_prop < 0.03
            && db.max_residual < 1e-12
            && asymmetric,
        format!(
            "KS fixed {ks_fixed:.4}, proportional {ks_prop:.4}; detailed balance residual {:.1e}; \
             proportional kernel asymmetric={asymmetric}",
            db.max_residual
        ),
    )
}

// 11. An upper bound inverts the population.
fn c11_inverse_population() -> Outcome {
    let (cap, mean) = (1200.0, 1000.0);
    let cfg = SimConfig::new(
        500,
        mean,
        RuleSpec::UniformRandomFraction,
        BoundaryPolicy::upper_bound(cap),
    )
    .sweeps(50_000)
    .snapshot_every(100)
    .seed(1101);
    let rec = simulate(&cfg).unwrap();
    let pooled = rec.pooled_balances(100);
    let fit = fit_bounded_exponential(&pooled, 0.0, cap).unwrap();
    let hist = MoneyHistogram::from_samples(&pooled, cfg.effective_bin_width());
    let slope = log_linear_slope(&hist, cap / 2.0, cap).unwrap();
    outcome(
        fit.rate < 0.0 && slope > 0.0,
        format!(
            "rate {:.3e} (T = {:.0}), KS {:.4}; d ln P/dm over upper half {slope:.3e}",
            fit.rate,
            fit.temperature(),
            fit.ks
        ),
    )
}

type Criterion = (&'static str, &'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        (
            "c01",
            "exponential equilibrium",
            c01_exponential_equilibrium,
        ),
        ("c02", "debt-cap temperature", c02_debt_cap_temperature),
        (
            "c03",
            "reserve-ratio two temperatures",
            c03_reserve_ratio_two_temperatures,
        ),
        ("c04", "multiplicative model", c04_multiplicative_gamma),
        ("c05", "saving propensity", c05_saving_propensity),
        (
            "c06",
            "random saving propensity tail",
            c06_random_saving_tail,
        ),
        (
            "c07",
            "unlimited debt instability",
            c07_unlimited_debt_instability,
        ),
        ("c08", "entropy growth", c08_entropy_growth),
        ("c09", "oracle equivalence", c09_oracle_equivalence),
        (
            "c10",
            "kinetic cross-validation",
            c10_kinetic_cross_validation,
        ),
        ("c11", "inverse population", c11_inverse_population),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (id, name, check) in criteria {
        if !filter.is_empty()
            && !filter
                .iter()
                .any(|f| id.contains(f.as_str()) || name.contains(f.as_str()))
        {
            continue;
        }
        let start = Instant::now();
        let o = check();
        if !o.passed {
            failed += 1;
        }
        println!(
            "{} {id} {name} ({:.1}s): {}",
            if o.passed { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            o.detail
        );
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
