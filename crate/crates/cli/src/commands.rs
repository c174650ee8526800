use curve_builder::{
    build_g_curve_with_stats, convex_envelope_report, default_grid, export_curve, read_curve, Format, RateCurve,
};
use eat_rates::{crossover_n, net_expansion, rate_table_csv, rate_table_json, Crossover, ProtocolSpec, RateFunction, RateRow};
use entropy_core::{analytic_a_00e, chsh_score, entropy, EntropyQuantity, InputDistribution, OMEGA_MAX};
use protocol_sim::{simulate, summarize, trial_table_csv, HonestDeviceModel, SimConfig};
use serde::Serialize;
use verify_oracle::{brute_force_entropy, brute_force_minimum, gradient_check, random_strategy, GradientCheck};

use crate::args::{CurvesArgs, RatesArgs, SimulateArgs, VerifyArgs};
use crate::config::{ProductInputs, RunConfig, Suite};
use crate::error::{usage, CliError};
use crate::manifest::OutDir;
use crate::svg::{plot, Series};

fn parse_quantities(raw: &[String]) -> Result<Vec<EntropyQuantity>, CliError> {
    let mut out = Vec::new();
    for s in raw {
        if s.eq_ignore_ascii_case("all") {
            out.extend(EntropyQuantity::ALL);
        } else {
            out.push(s.parse().map_err(|e: entropy_core::EntropyError| usage(e.to_string()))?);
        }
    }
    out.dedup();
    Ok(out)
}

fn points(c: &RateCurve) -> Vec<(f64, f64)> {
    c.points.iter().map(|p| (p.omega, p.entropy)).collect()
}

#[derive(Serialize)]
struct CurveReport {
    quantity: EntropyQuantity,
    omega_star: Option<f64>,
    slope: Option<f64>,
    roots: Vec<f64>,
    warning: Option<String>,
    restarts: Vec<curve_builder::RestartStats>,
}

pub fn curves(args: &CurvesArgs, cfg: &mut RunConfig, out: &mut OutDir) -> Result<(), CliError> {
    let c = &mut cfg.curves;
    if !args.quantity.is_empty() {
        c.quantities = parse_quantities(&args.quantity)?;
    }
    if let Some(g) = &args.grid {
        c.grid = Some(g.clone());
    }
    if let Some(a) = args.zeta_a {
        c.pxy = Some(ProductInputs { zeta_a: a, zeta_b: args.zeta_b.unwrap_or(a) });
    } else if args.zeta_b.is_some() {
        return Err(usage("--zeta-b needs --zeta-a"));
    }
    if let Some(r) = args.restarts {
        c.optimizer.restarts = r;
    }
    if let Some(m) = args.max_iters {
        c.optimizer.max_iters = m;
    }
    if let Some(t) = args.tolerance {
        c.optimizer.tolerance = t;
    }
    let opt = c.optimizer.with_seed(cfg.seed);
    let pxy = match c.pxy {
        Some(p) => InputDistribution::product(p.zeta_a, p.zeta_b).map_err(|e| usage(e.to_string()))?,
        None => InputDistribution::uniform(),
    };
    let grid = c.grid.clone().unwrap_or_else(default_grid);

    let mut reports = Vec::new();
    let mut envelopes = Vec::new();
    for &q in &c.quantities {
        let (g, stats) = build_g_curve_with_stats(q, &grid, &pxy, &opt)?;
        let env = convex_envelope_report(&g)?;
        let f = &env.curve;
        out.write(&format!("G_{}.csv", q.tag()), &export_curve(&g, Format::Csv)?)?;
        out.write(&format!("F_{}.csv", q.tag()), &export_curve(f, Format::Csv)?)?;
        let svg = plot(
            &format!("H({}) minimum vs CHSH score", q.tag()),
            "CHSH score",
            "bits",
            &[
                Series { label: "G (minimized)", points: points(&g), color: "#1f77b4", markers: true },
                Series { label: "F (convex envelope)", points: points(f), color: "#d62728", markers: false },
            ],
        );
        out.write(&format!("{}.svg", q.tag()), svg.as_bytes())?;
        match f.tangent {
            Some(t) => println!("{}: omega* = {:.6}  slope = {:.6}", q.tag(), t.omega_star, t.slope),
            None => println!("{}: convex, no tangent segment", q.tag()),
        }
        if let Some(w) = &env.warning {
            eprintln!("warning: {}: {w}", q.tag());
        }
        reports.push(CurveReport {
            quantity: q,
            omega_star: f.tangent.map(|t| t.omega_star),
            slope: f.tangent.map(|t| t.slope),
            roots: env.roots.clone(),
            warning: env.warning.clone(),
            restarts: stats,
        });
        envelopes.push(env.curve);
    }
    const COLORS: [&str; 3] = ["#1f77b4", "#ff7f0e", "#2ca02c"];
    for (name, two_sided) in [("one_sided", false), ("two_sided", true)] {
        let series: Vec<Series> = envelopes
            .iter()
            .filter(|f| f.quantity.two_sided() == two_sided)
            .enumerate()
            .map(|(i, f)| Series { label: f.quantity.tag(), points: points(f), color: COLORS[i % 3], markers: false })
            .collect();
        if !series.is_empty() {
            let title = if two_sided { "Two-sided rates" } else { "One-sided rates" };
            out.write(&format!("{name}.svg"), plot(title, "CHSH score", "bits per round", &series).as_bytes())?;
        }
    }
    out.write_json("curves.json", &reports)?;
    Ok(())
}

fn apply_rates_args(args: &RatesArgs, cfg: &mut RunConfig, crossover: bool) -> Result<(), CliError> {
    let r = &mut cfg.rates;
    r.protocol = args.protocol.variant(r.protocol)?;
    if let Some(w) = args.protocol.omega {
        r.omega_exp = Some(w);
    }
    if let Some(e) = args.eps_s {
        r.eps_s = e;
        r.budget = None;
    }
    if let Some(e) = args.eps_c {
        r.eps_c = e;
        if let Some(b) = &mut r.budget {
            b.eps_c = e;
        }
    }
    if let Some(p) = &args.curve {
        r.curve = Some(p.clone());
    }
    if let Some(n) = &args.n {
        r.n = n.clone();
    }
    r.crossover |= args.crossover || crossover;
    r.search.optimize_mix |= args.optimize_mix;
    if let Some(c) = args.completeness {
        r.search.completeness = c.into();
    }
    if let Some(c) = args.ext_constant {
        r.search.ext_constant = c;
    }
    Ok(())
}

pub fn rates(args: &RatesArgs, cfg: &mut RunConfig, out: &mut OutDir, crossover: bool) -> Result<(), CliError> {
    apply_rates_args(args, cfg, crossover)?;
    let r = &cfg.rates;
    let omega = r.omega_exp.ok_or_else(|| usage("ω_exp is required (--omega)"))?;
    let budget = r.budget()?;
    let path = r.curve.as_ref().ok_or_else(|| usage("an F curve file is required (--curve)"))?;
    let curve = read_curve(path)?;
    let rate = RateFunction::from_curve(&curve)?;
    rate.check_variant(&r.protocol, &curve)?;
    // Catches parameter errors before any optimization.
    ProtocolSpec::new(r.protocol, omega, 1.0, 1)?;

    if r.crossover {
        let c = crossover_n(r.protocol, omega, &budget, &rate, &r.search)?;
        match &c {
            Crossover::Found { n, result } => {
                check_finite(result.net_expansion)?;
                println!(
                    "crossover n = {n} (net {:.3} bits, alpha = {:.6e}, t = {:.6}, mix = {:?})",
                    result.net_expansion, result.chosen.alpha, result.chosen.t, result.chosen.mix
                );
            }
            Crossover::NoExpansion { at_max } => {
                println!("no expansion up to n = {} (net {:.3} bits)", at_max.protocol.n, at_max.net_expansion);
            }
        }
        out.write_json("crossover.json", &c)?;
    }
    if !r.n.is_empty() {
        let mut results = Vec::with_capacity(r.n.len());
        for &n in &r.n {
            let res = net_expansion(r.protocol, omega, n, &budget, &rate, &r.search)?;
            check_finite(res.net_expansion)?;
            results.push(res);
        }
        println!("{:>14} {:>12} {:>12} {:>10} {:>16} {:>16}", "n", "alpha-1", "t", "mix", "hmin", "net");
        for res in &results {
            let row = RateRow::from(res);
            println!(
                "{:>14} {:>12.4e} {:>12.6} {:>10} {:>16.6e} {:>16.6e}",
                row.n,
                row.alpha - 1.0,
                row.t,
                row.gamma_or_zeta.map_or("-".to_string(), |m| format!("{m:.4e}")),
                row.hmin,
                row.net
            );
        }
        out.write("rates.csv", rate_table_csv(&results)?.as_bytes())?;
        out.write("rates.json", rate_table_json(&results)?.as_bytes())?;
    }
    if !r.crossover && r.n.is_empty() {
        return Err(usage("give --n or --crossover"));
    }
    Ok(())
}

fn check_finite(v: f64) -> Result<(), CliError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Numerical(format!("non-finite result {v}")))
    }
}

pub fn simulate_cmd(args: &SimulateArgs, cfg: &mut RunConfig, out: &mut OutDir) -> Result<(), CliError> {
    let s = &mut cfg.simulate;
    s.protocol = args.protocol.variant(s.protocol)?;
    if let Some(w) = args.protocol.omega {
        s.omega_exp = Some(w);
    }
    if let Some(d) = args.delta {
        s.delta = Some(d);
    }
    if let Some(n) = args.n {
        s.n = n;
    }
    if let Some(t) = args.trials {
        s.trials = t;
    }
    if let Some(d) = &args.device {
        s.device = Some([[d[0], d[1]], [d[2], d[3]]]);
    }
    let omega = s.omega_exp.ok_or_else(|| usage("ω_exp is required (--omega)"))?;
    let delta = s.delta.ok_or_else(|| usage("δ is required (--delta)"))?;
    let protocol = ProtocolSpec::new(s.protocol, omega, delta, s.n)?;
    let device = match s.device {
        Some(w) => HonestDeviceModel::new(w)?,
        None => HonestDeviceModel::uniform(omega)?,
    };
    let sim = SimConfig { seed: cfg.seed.unwrap_or(0), trials: s.trials };
    let transcripts = simulate(&protocol, &device, &sim)?;
    let summary = summarize(&protocol, &device, &sim, &transcripts);
    out.write("trials.csv", trial_table_csv(&transcripts)?.as_bytes())?;
    out.write_json("summary.json", &summary)?;
    let c = &summary.completeness;
    println!(
        "{}: {} of {} trials aborted (rate {:.4e}); Hoeffding bound {:.4e}, allowed {:.4e}",
        protocol.variant.name(),
        c.aborts,
        c.trials,
        c.abort_rate,
        c.bound,
        c.allowed
    );
    println!("score estimate: mean {:.6}, sd {:.3e}", summary.score_mean, summary.score_sd);
    let honest = (device.omega_exp() - omega).abs() <= 1e-12;
    if honest && !c.holds {
        return Err(CliError::Numerical("abort rate exceeds the completeness bound".into()));
    }
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct SuiteResult {
    pub suite: Suite,
    pub checked: usize,
    pub skipped: usize,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

fn suite_result(suite: Suite, checked: usize, skipped: usize, max_error: f64, tolerance: f64) -> SuiteResult {
    SuiteResult { suite, checked, skipped, max_error, tolerance, passed: checked > 0 && max_error <= tolerance }
}

/// Alternates uniform and a skewed product distribution.
fn pxy_for(i: usize) -> InputDistribution {
    if i % 2 == 0 {
        InputDistribution::uniform()
    } else {
        InputDistribution::product(0.3, 0.7).expect("valid product distribution")
    }
}

fn verify_oracle_suite(count: usize, seed: u64) -> Result<SuiteResult, CliError> {
    let mut worst = 0.0f64;
    for i in 0..count {
        let s = random_strategy(seed.wrapping_add(i as u64));
        let pxy = pxy_for(i);
        for q in EntropyQuantity::ALL {
            let a = entropy(q, &s, &pxy).map_err(|e| CliError::Numerical(e.to_string()))?;
            let b = brute_force_entropy(q, &s, &pxy).map_err(|e| CliError::Numerical(e.to_string()))?;
            worst = worst.max((a - b).abs());
        }
    }
    Ok(suite_result(Suite::Oracle, count * 6, 0, worst, 1e-8))
}

fn verify_gradient_suite(count: usize, seed: u64) -> SuiteResult {
    let (mut worst, mut checked, mut skipped) = (0.0f64, 0, 0);
    for i in 0..count {
        let s = random_strategy(seed.wrapping_add(i as u64));
        for q in EntropyQuantity::ALL {
            match gradient_check(q, &s, &pxy_for(i)) {
                GradientCheck::MaxError(e) => {
                    worst = worst.max(e);
                    checked += 1;
                }
                _ => skipped += 1,
            }
        }
    }
    suite_result(Suite::Gradient, checked, skipped, worst, 1e-4)
}

fn verify_analytic_suite(restarts: usize, seed: u64) -> Result<SuiteResult, CliError> {
    let mut worst = 0.0f64;
    let u = InputDistribution::uniform();
    for w in [0.78, 0.80, 0.82, 0.84] {
        let (h, _) = brute_force_minimum(EntropyQuantity::A00E, w, &u, restarts, seed)
            .ok_or_else(|| CliError::Numerical(format!("no feasible brute-force start at {w}")))?;
        let exact = analytic_a_00e(w).map_err(|e| CliError::Numerical(e.to_string()))?;
        worst = worst.max((h - exact).abs());
    }
    Ok(suite_result(Suite::Analytic, 4, 0, worst, 2e-4))
}

fn verify_envelope_suite(cfg: &RunConfig, count: usize, seed: u64) -> Result<SuiteResult, CliError> {
    let opt = cfg.verify.optimizer.with_seed(cfg.seed);
    let u = InputDistribution::uniform();
    // Worst shortfall below the envelope; the tolerance is 1e−6.
    let mut worst = 0.0f64;
    for q in EntropyQuantity::ALL {
        let (g, _) = build_g_curve_with_stats(q, &default_grid(), &u, &opt)?;
        let f = convex_envelope_report(&g)?.curve.interpolant()?;
        let (mut k, mut used) = (0u64, 0);
        while used < count {
            let s = random_strategy(seed ^ k.wrapping_mul(0x9e37_79b9_7f4a_7c15));
            k += 1;
            let w = chsh_score(&s.state, &s.angles);
            if w <= 0.75 || w > OMEGA_MAX {
                continue;
            }
            used += 1;
            let h = entropy(q, &s, &u).map_err(|e| CliError::Numerical(e.to_string()))?;
            worst = worst.max(f.eval(w) - h);
        }
    }
    Ok(suite_result(Suite::Envelope, count * 6, 0, worst, 1e-6))
}

pub fn verify(args: &VerifyArgs, cfg: &mut RunConfig, out: &mut OutDir) -> Result<(), CliError> {
    if let Some(s) = args.suite {
        cfg.verify.suite = s;
    }
    if let Some(n) = args.n {
        cfg.verify.count = n;
    }
    if let Some(r) = args.restarts {
        cfg.verify.optimizer.restarts = r;
    }
    let (suite, count) = (cfg.verify.suite, cfg.verify.count);
    if count == 0 {
        return Err(usage("--n must be positive"));
    }
    let seed = cfg.seed.unwrap_or(1);
    let run = |s: Suite| s == suite || suite == Suite::All;
    let mut results = Vec::new();
    if run(Suite::Oracle) {
        results.push(verify_oracle_suite(count, seed)?);
    }
    if run(Suite::Gradient) {
        results.push(verify_gradient_suite(count, seed));
    }
    if run(Suite::Analytic) {
        results.push(verify_analytic_suite(count, seed)?);
    }
    if run(Suite::Envelope) {
        results.push(verify_envelope_suite(cfg, count, seed)?);
    }
    for r in &results {
        println!(
            "{:<9} {}  checked {:>6}  skipped {:>5}  max error {:.3e} (tolerance {:.0e})",
            format!("{:?}", r.suite).to_lowercase(),
            if r.passed { "PASS" } else { "FAIL" },
            r.checked,
            r.skipped,
            r.max_error,
            r.tolerance
        );
    }
    out.write_json("verify.json", &results)?;
    if results.iter().all(|r| r.passed) {
        Ok(())
    } else {
        Err(CliError::Numerical("oracle disagreement beyond tolerance".into()))
    }
}
