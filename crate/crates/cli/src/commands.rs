//! Subcommand implementations. Every command computes a [`Table`] and
//! serializes it via [`crate::output`]; identical arguments and seeds give
//! byte-identical files, and worker counts never change the output.

use std::path::PathBuf;

use rayon::prelude::*;

use modtap::simulate::{check_dumpable, ENUMERATION_BUDGET, MAX_EXACT_BLOCK};
use modtap::{
    build_bsc_case, cyclic_convolve, exact_wiretap_mi, full_duplex_secrecy_capacity,
    half_duplex_bsc_rate, optimize_half_duplex, plug_in_equivocation, public_discussion_bounds,
    rate_report, secrecy_capacity_bsc, write_transcripts, BscCase, DuplexMode, JointPmf, Pmf,
    SchemeConfig, TightCase, Transcript, TrialRunner, WiretapChannel,
};

use crate::output::{emit, Cell, Format, Table};
use crate::scenario::{load_channel, make_case, parse_range, ConfigError};
use crate::{CliError, CliResult};

const MAX_SWEEP_POINTS: usize = 1_000_000;

fn tight_label(tc: Option<TightCase>) -> Cell {
    match tc {
        Some(TightCase::Independent) => "independent".into(),
        Some(TightCase::WiretapDegraded) => "wiretap_degraded".into(),
        Some(TightCase::MainDegraded) => "main_degraded".into(),
        None => Cell::Empty,
    }
}

fn case_meta(ch: &WiretapChannel) -> (Cell, Cell, Cell) {
    match ch.bsc_case() {
        Some(case) => (
            (case.case_id() as u64).into(),
            case.epsilon().into(),
            case.delta().into(),
        ),
        None => (Cell::Empty, Cell::Empty, Cell::Empty),
    }
}

fn thread_pool(workers: usize) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| CliError::Config(format!("worker pool: {e}")))
}

// ---------------------------------------------------------------------------
// rates
// ---------------------------------------------------------------------------

pub struct RatesArgs {
    pub channel: String,
    pub out: Option<PathBuf>,
    pub format: Format,
}

pub const RATES_COLUMNS: [&str; 14] = [
    "channel",
    "case_id",
    "epsilon",
    "delta",
    "c_s",
    "pd_lower",
    "pd_upper",
    "pd_tight",
    "tight_case",
    "c_s_f",
    "hd_rate",
    "hd_mu_star",
    "hd_t_star",
    "hd_delta_hat",
];

pub fn cmd_rates(args: &RatesArgs) -> CliResult {
    let ch = load_channel(&args.channel)?;
    let report = rate_report(&ch).map_err(|e| CliError::Config(e.to_string()))?;
    let (case_id, eps, delta) = case_meta(&ch);

    let mut table = Table::new(RATES_COLUMNS.to_vec());
    let hd = report.half_duplex.as_ref();
    table.push(vec![
        args.channel.as_str().into(),
        case_id,
        eps,
        delta,
        report.c_s.into(),
        report.pd_bounds.lower.into(),
        report.pd_bounds.upper.into(),
        report.pd_bounds.tight.into(),
        tight_label(report.pd_bounds.tight_case),
        report.c_s_f.into(),
        hd.map(|s| s.rate).into(),
        hd.map(|s| s.mu_star).into(),
        hd.map(|s| s.t_star).into(),
        hd.map(|s| s.delta_hat).into(),
    ]);
    emit(args.out.as_deref(), &table.render(args.format))?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

pub struct SweepArgs {
    pub channel: String,
    pub eps: Option<String>,
    pub delta: Option<String>,
    pub mu: Option<String>,
    pub t: Option<String>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub workers: usize,
}

pub const SWEEP_COLUMNS: [&str; 15] = [
    "case_id",
    "epsilon",
    "delta",
    "mu",
    "t",
    "c_s",
    "pd_lower",
    "pd_upper",
    "pd_tight",
    "tight_case",
    "c_s_f",
    "hd_rate",
    "hd_mu_star",
    "hd_t_star",
    "hd_delta_hat",
];

pub fn cmd_sweep(args: &SweepArgs) -> CliResult {
    let ch = load_channel(&args.channel)?;
    let base = ch.bsc_case().cloned().ok_or_else(|| {
        CliError::Config(
            "sweep needs a case:<id>,... channel (axes parameterize the BSC cases)".into(),
        )
    })?;
    let case_id = base.case_id();
    let joint = match &base {
        BscCase::Correlated { joint, .. } => Some(joint.clone()),
        _ => None,
    };
    if case_id == 5 && (args.eps.is_some() || args.delta.is_some()) {
        return Err(CliError::Config(
            "case 5 has a fixed joint law; sweeping epsilon/delta would break its marginals".into(),
        ));
    }

    let axis = |flag: &Option<String>, fallback: f64| -> Result<Vec<f64>, ConfigError> {
        match flag {
            Some(s) => parse_range(s),
            None => Ok(vec![fallback]),
        }
    };
    let eps_values = axis(&args.eps, base.epsilon())?;
    let delta_values = axis(&args.delta, base.delta())?;
    // mu/t axes switch the half-duplex columns from the optimizer to a
    // fixed-point evaluation; absent coordinates default to 1/2.
    let fixed_point = args.mu.is_some() || args.t.is_some();
    let mu_values = axis(&args.mu, 0.5)?;
    let t_values = axis(&args.t, 0.5)?;

    let points: usize = eps_values.len() * delta_values.len() * mu_values.len() * t_values.len();
    if points > MAX_SWEEP_POINTS {
        return Err(CliError::Config(format!(
            "sweep grid has {points} points, limit is {MAX_SWEEP_POINTS}"
        )));
    }

    // Lexicographic row order over (epsilon, delta, mu, t).
    let mut grid = Vec::with_capacity(points);
    for &e in &eps_values {
        for &d in &delta_values {
            for &mu in &mu_values {
                for &t in &t_values {
                    grid.push((e, d, mu, t));
                }
            }
        }
    }

    let pool = thread_pool(args.workers)?;
    let rows: Result<Vec<Vec<Cell>>, CliError> = pool.install(|| {
        grid.par_iter()
            .map(|&(e, d, mu, t)| sweep_row(case_id, joint.as_ref(), e, d, mu, t, fixed_point))
            .collect()
    });

    let mut table = Table::new(SWEEP_COLUMNS.to_vec());
    for row in rows? {
        table.push(row);
    }
    emit(args.out.as_deref(), &table.render(args.format))?;
    Ok(0)
}

fn sweep_row(
    case_id: u8,
    joint: Option<&JointPmf>,
    e: f64,
    d: f64,
    mu: f64,
    t: f64,
    fixed_point: bool,
) -> Result<Vec<Cell>, CliError> {
    let conf = |m: String| CliError::Config(m);
    let case = make_case(case_id, e, d, joint).map_err(|err| conf(err.to_string()))?;
    let ch = build_bsc_case(&case).map_err(|err| conf(format!("grid point ({e}, {d}): {err}")))?;
    let bounds = public_discussion_bounds(&ch).map_err(|err| conf(err.to_string()))?;
    let c_s = secrecy_capacity_bsc(e, d).map_err(|err| conf(err.to_string()))?;
    let c_s_f = full_duplex_secrecy_capacity(&ch);

    let (mu_cell, t_cell, hd_rate, hd_mu, hd_t, hd_dh) = if fixed_point {
        let raw = half_duplex_bsc_rate(e, d, mu, t).map_err(|err| conf(err.to_string()))?;
        let dh = d + t - 2.0 * d * t;
        (Cell::Float(mu), Cell::Float(t), raw.max(0.0), mu, t, dh)
    } else {
        let sol = optimize_half_duplex(e, d).map_err(|err| conf(err.to_string()))?;
        (
            Cell::Empty,
            Cell::Empty,
            sol.rate,
            sol.mu_star,
            sol.t_star,
            sol.delta_hat,
        )
    };

    Ok(vec![
        (case_id as u64).into(),
        e.into(),
        d.into(),
        mu_cell,
        t_cell,
        c_s.into(),
        bounds.lower.into(),
        bounds.upper.into(),
        bounds.tight.into(),
        tight_label(bounds.tight_case),
        c_s_f.into(),
        hd_rate.into(),
        hd_mu.into(),
        hd_t.into(),
        hd_dh.into(),
    ])
}

// ---------------------------------------------------------------------------
// optimize
// ---------------------------------------------------------------------------

pub struct OptimizeArgs {
    pub channel: String,
    pub out: Option<PathBuf>,
    pub format: Format,
}

pub fn cmd_optimize(args: &OptimizeArgs) -> CliResult {
    let ch = load_channel(&args.channel)?;
    let case = ch.bsc_case().ok_or_else(|| {
        CliError::Config("optimize needs a case:<id>,... channel (binary symmetric)".into())
    })?;
    let sol = optimize_half_duplex(case.epsilon(), case.delta())
        .map_err(|e| CliError::Config(e.to_string()))?;
    let mut table = Table::new(vec![
        "epsilon",
        "delta",
        "rate",
        "mu_star",
        "t_star",
        "delta_hat",
    ]);
    table.push(vec![
        case.epsilon().into(),
        case.delta().into(),
        sol.rate.into(),
        sol.mu_star.into(),
        sol.t_star.into(),
        sol.delta_hat.into(),
    ]);
    emit(args.out.as_deref(), &table.render(args.format))?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

pub struct SimulateArgs {
    pub channel: String,
    pub mode: DuplexMode,
    pub n: usize,
    pub messages: usize,
    pub t: f64,
    pub trials: usize,
    pub seed: u64,
    pub codebook_seed: Option<u64>,
    pub noise_seed: Option<u64>,
    pub key_seed: Option<u64>,
    pub zero_key: bool,
    pub probe_feedback: bool,
    pub transcripts: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub workers: usize,
}

pub const SIMULATE_COLUMNS: [&str; 13] = [
    "mode",
    "n",
    "messages",
    "code_rate",
    "t",
    "trials",
    "error_rate",
    "erasure_fraction",
    "equivocation",
    "exact_mi",
    "codebook_seed",
    "noise_seed",
    "key_seed",
];

pub fn cmd_simulate(args: &SimulateArgs) -> CliResult {
    let ch = load_channel(&args.channel)?;
    let mut cfg = match args.mode {
        DuplexMode::FullDuplex => SchemeConfig::full_duplex(args.n, args.messages),
        DuplexMode::HalfDuplex => SchemeConfig::half_duplex(args.n, args.messages, args.t),
    };
    cfg.codebook_seed = args.codebook_seed.unwrap_or(args.seed);
    cfg.noise_seed = args.noise_seed.unwrap_or(args.seed.wrapping_add(1));
    cfg.key_seed = args.key_seed.unwrap_or(args.seed.wrapping_add(2));
    cfg.probe_feedback_independence = args.probe_feedback;
    if args.zero_key {
        cfg.key_law = Some(Pmf::point_mass(ch.x1_size(), 0));
    }

    let runner = TrialRunner::new(&ch, &cfg).map_err(|e| CliError::Config(e.to_string()))?;
    let pool = thread_pool(args.workers)?;
    let transcripts: Vec<Transcript> = pool.install(|| {
        (0..args.trials as u64)
            .into_par_iter()
            .map(|trial| runner.run(trial))
            .collect()
    });
    let outcome = runner.aggregate(transcripts);

    if let Some(path) = &args.transcripts {
        check_dumpable(&ch).map_err(|e| CliError::Config(e.to_string()))?;
        let mut buf = Vec::new();
        write_transcripts(&mut buf, &outcome.transcripts)?;
        std::fs::write(path, buf)?;
    }

    let equivocation = if outcome.transcripts.is_empty() {
        None
    } else {
        Some(
            plug_in_equivocation(&outcome.transcripts, &cfg)
                .map_err(|e| CliError::Config(e.to_string()))?,
        )
    };
    // Exact enumeration only when the budget admits it; otherwise the field
    // stays empty.
    let exact_mi = exact_wiretap_mi(&ch, &cfg).ok();

    let mut table = Table::new(SIMULATE_COLUMNS.to_vec());
    table.push(vec![
        mode_label(args.mode).into(),
        args.n.into(),
        args.messages.into(),
        cfg.rate().into(),
        args.t.into(),
        args.trials.into(),
        outcome.error_rate.into(),
        outcome.erasure_fraction.into(),
        equivocation.into(),
        exact_mi.into(),
        cfg.codebook_seed.into(),
        cfg.noise_seed.into(),
        cfg.key_seed.into(),
    ]);
    emit(args.out.as_deref(), &table.render(args.format))?;
    Ok(0)
}

fn mode_label(mode: DuplexMode) -> &'static str {
    match mode {
        DuplexMode::FullDuplex => "full_duplex",
        DuplexMode::HalfDuplex => "half_duplex",
    }
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

pub struct VerifyArgs {
    pub max_n: usize,
    pub max_messages: usize,
    pub sabotage_zero_key: bool,
    pub out: Option<PathBuf>,
    pub format: Format,
}

pub const VERIFY_COLUMNS: [&str; 5] = ["status", "check", "detail", "value", "tolerance"];

struct Check {
    status: &'static str,
    check: &'static str,
    detail: String,
    value: Option<f64>,
    tolerance: Option<f64>,
}

impl Check {
    fn measured(check: &'static str, detail: String, value: f64, tolerance: f64) -> Self {
        Self {
            status: if value.abs() <= tolerance {
                "PASS"
            } else {
                "FAIL"
            },
            check,
            detail,
            value: Some(value),
            tolerance: Some(tolerance),
        }
    }

    fn skipped(check: &'static str, detail: String) -> Self {
        Self {
            status: "SKIP",
            check,
            detail,
            value: None,
            tolerance: None,
        }
    }
}

/// The channels exercised by `verify`: the five binary symmetric cases plus
/// one correlated ternary channel.
fn verify_channels() -> Vec<(String, WiretapChannel)> {
    let case5_joint = JointPmf::new(vec![2, 2], vec![0.74, 0.06, 0.04, 0.16]).expect("valid");
    let cases = [
        BscCase::Noiseless,
        BscCase::Independent {
            epsilon: 0.3,
            delta: 0.1,
        },
        BscCase::MainDegraded {
            epsilon: 0.2,
            delta: 0.1,
        },
        BscCase::WiretapDegraded {
            epsilon: 0.1,
            delta: 0.3,
        },
        BscCase::Correlated {
            epsilon: 0.2,
            delta: 0.22,
            joint: case5_joint,
        },
    ];
    let mut out: Vec<(String, WiretapChannel)> = cases
        .iter()
        .map(|c| {
            (
                format!("case{}", c.case_id()),
                build_bsc_case(c).expect("verify cases are valid"),
            )
        })
        .collect();

    let ternary_pair = JointPmf::new(
        vec![3, 3],
        vec![0.62, 0.04, 0.04, 0.05, 0.1, 0.02, 0.03, 0.02, 0.08],
    )
    .expect("valid ternary pair");
    out.push((
        "ternary".to_string(),
        WiretapChannel::from_wiretap_pair(3, 3, 3, ternary_pair).expect("valid ternary channel"),
    ));
    out
}

pub fn cmd_verify(args: &VerifyArgs) -> CliResult {
    let mut checks: Vec<Check> = Vec::new();

    // Bijection: x1 -> x + x1 + n2 is a permutation of the wiretap alphabet.
    for m in 2..=5usize {
        let mut collisions = 0usize;
        for x in 0..m {
            for n2 in 0..m {
                let mut seen = vec![false; m];
                for x1 in 0..m {
                    let z = (x + x1 + n2) % m;
                    if seen[z] {
                        collisions += 1;
                    }
                    seen[z] = true;
                }
            }
        }
        checks.push(Check::measured(
            "uniformity_bijection",
            format!("alphabet={m}"),
            collisions as f64,
            0.0,
        ));
    }

    // Absorption: p conv uniform = uniform, exactly.
    for m in 2..=5usize {
        let skew: Vec<f64> = (0..m).map(|i| (i + 1) as f64).collect();
        let total: f64 = skew.iter().sum();
        let p = Pmf::new(skew.into_iter().map(|x| x / total).collect()).expect("valid");
        let conv = cyclic_convolve(&p, &Pmf::uniform(m)).expect("same alphabet");
        let deviation = (0..m)
            .map(|k| (conv.get(k) - 1.0 / m as f64).abs())
            .fold(0.0f64, f64::max);
        checks.push(Check::measured(
            "uniform_absorption",
            format!("alphabet={m}"),
            deviation,
            1e-15,
        ));
    }

    // Key cancellation: (x + x1 + n1) - x1 = x + n1 (mod m), all triples.
    for m in 2..=5usize {
        let mut mismatches = 0usize;
        for x in 0..m {
            for x1 in 0..m {
                for n1 in 0..m {
                    let y = (x + x1 + n1) % m;
                    let cancelled = (y + m - x1) % m;
                    if cancelled != (x + n1) % m {
                        mismatches += 1;
                    }
                }
            }
        }
        checks.push(Check::measured(
            "key_cancellation",
            format!("alphabet={m}"),
            mismatches as f64,
            0.0,
        ));
    }

    // Exact wiretapper information of the scheme, full enumeration.
    for (name, ch) in verify_channels() {
        for n in 1..=args.max_n {
            for m in 1..=args.max_messages {
                if (m as u128) > (ch.x_size() as u128).pow(n as u32) {
                    continue;
                }
                let mut cfg = SchemeConfig::full_duplex(n, m);
                if args.sabotage_zero_key {
                    cfg.key_law = Some(Pmf::point_mass(ch.x1_size(), 0));
                }
                let detail = format!("{name} n={n} M={m}");
                let cost =
                    (m as u128).saturating_mul((ch.z_size() as u128).saturating_pow(n as u32));
                if n > MAX_EXACT_BLOCK || cost > ENUMERATION_BUDGET {
                    checks.push(Check::skipped(
                        "exact_wiretap_mi",
                        format!("{detail} (enumeration budget exceeded)"),
                    ));
                    continue;
                }
                let mi =
                    exact_wiretap_mi(&ch, &cfg).map_err(|e| CliError::Config(e.to_string()))?;
                checks.push(Check::measured("exact_wiretap_mi", detail, mi, 1e-12));
            }
        }
    }

    // Half-duplex with uniform feedback still hides the input.
    {
        let (name, ch) = verify_channels().pop().expect("ternary present");
        let t_uniform = 1.0 - 1.0 / ch.z_size() as f64;
        for n in 1..=args.max_n.min(6) {
            let mut cfg = SchemeConfig::half_duplex(n, 2.min(args.max_messages), t_uniform);
            if args.sabotage_zero_key {
                cfg.key_law = Some(Pmf::point_mass(ch.x1_size(), 0));
            }
            let mi = exact_wiretap_mi(&ch, &cfg).map_err(|e| CliError::Config(e.to_string()))?;
            checks.push(Check::measured(
                "half_duplex_uniform_mi",
                format!("{name} n={n} t={t_uniform:.6}"),
                mi,
                1e-12,
            ));
        }
    }

    let mut table = Table::new(VERIFY_COLUMNS.to_vec());
    let mut failed = false;
    for c in &checks {
        failed |= c.status == "FAIL";
        table.push(vec![
            c.status.into(),
            c.check.into(),
            c.detail.clone().into(),
            c.value.into(),
            c.tolerance.into(),
        ]);
    }
    emit(args.out.as_deref(), &table.render(args.format))?;
    Ok(if failed { 3 } else { 0 })
}
