use num_bigint::BigUint;
use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{Cli, Command};
use crate::output::Table;
use twistsel::constants::{
    e_constant, e_enclosure, moment_bound, p_constant, point_bound, s_constant, table1_with_mode, verify_all_claims,
    verify_claims, ClaimMapping, ExponentMode, EXACT_MOMENT_MAX_M,
};
use twistsel::ff::{is_prime, prime_divisors, FieldSpec, Place, Poly};
use twistsel::markov::{
    alpha_exponent, compare_dtable_vs_two_step, estimate_gamma, parity_weighted_pr, pr_distribution, GammaSign,
    MarkovOp,
};
use twistsel::place::{certify_s3, chebotarev_audit, classify_place, density_census, s3_representation_checks};
use twistsel::place::{CurveConfig, CurveSpec, FrobClass};
use twistsel::sim::{omega_distribution, run_experiment, RunOptions, SimConfig, TransitionMode};

#[derive(Debug)]
pub enum CliError {
    Config(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
        }
    }
}

impl From<twistsel::Error> for CliError {
    fn from(e: twistsel::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

fn config(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub struct Outcome {
    pub json: Value,
    pub table: Option<Table>,
    /// False when a checked claim fails.
    pub ok: bool,
    /// Module configuration as resolved from flags and files.
    pub resolved: Value,
    pub seed: Option<u64>,
    pub warnings: Vec<String>,
}

impl Outcome {
    fn new(json: Value, resolved: Value) -> Self {
        Outcome { json, table: None, ok: true, resolved, seed: None, warnings: Vec::new() }
    }

    fn table(mut self, table: Table) -> Self {
        self.table = Some(table);
        self
    }

    fn ok(mut self, ok: bool) -> Self {
        self.ok = ok;
        self
    }
}

fn to_json<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serialisable")
}

fn need<T: Copy>(v: Option<T>, flag: &str, cmd: Command) -> CliResult<T> {
    v.ok_or_else(|| config(format!("{} requires --{flag}", cmd.name())))
}

fn exponent_mode(cli: &Cli) -> CliResult<ExponentMode> {
    match cli.mode.as_deref() {
        None | Some("tabulated") => Ok(ExponentMode::Tabulated),
        Some("displayed") => Ok(ExponentMode::Displayed),
        Some(m) => Err(config(format!("--mode {m}: expected tabulated or displayed"))),
    }
}

pub fn execute(cli: &Cli) -> CliResult<Outcome> {
    let cmd = cli.command.ok_or_else(|| config("no subcommand given"))?;
    match cmd {
        Command::Table1 => table1(cli),
        Command::Constants => constants(cli, cmd),
        Command::Stationary => stationary(cli),
        Command::Simulate => simulate(cli, cmd),
        Command::Classify => classify(cli),
        Command::Chebotarev => chebotarev(cli),
        Command::OmegaDist => omega(cli, cmd),
        Command::Claims => claims(cli),
        Command::S3Check => s3_check(cli),
        Command::DtableDiff => dtable_diff(cli),
    }
}

fn table1(cli: &Cli) -> CliResult<Outcome> {
    let mode = exponent_mode(cli)?;
    let t = table1_with_mode(mode)?;
    eprint!("{}", t.to_text());
    let mut table = Table::new(&["row", "ell", "value", "reference", "diff", "flagged"]);
    for c in t.cells.iter().filter(|c| c.value.is_some()) {
        table.push(vec![
            c.row.label(),
            c.ell.to_string(),
            c.value.map_or(String::new(), |v| v.to_string()),
            c.reference.map_or(String::new(), |v| v.to_string()),
            c.diff.map_or(String::new(), |v| v.to_string()),
            c.flagged.to_string(),
        ]);
    }
    let ok = t.flagged == 0;
    Ok(Outcome::new(to_json(&t), json!({ "mode": mode })).table(table).ok(ok))
}

fn constants(cli: &Cli, cmd: Command) -> CliResult<Outcome> {
    let ell = need(cli.ell, "ell", cmd)?;
    let p = need(cli.p, "p", cmd)?;
    let m = cli.m.unwrap_or(1);
    let mode = exponent_mode(cli)?;
    let s = s_constant(ell, p)?;
    let e = e_constant(ell, p, m, mode)?;
    let enclosure = if m <= EXACT_MOMENT_MAX_M { Some(e_enclosure(ell, p, m, mode)?.to_f64()) } else { None };
    let pm = p_constant::<f64>(ell, m)?;
    let mb = moment_bound(ell, p, m, mode)?;
    let pb = point_bound(m, ell, p)?;
    let out = json!({
        "ell": ell, "p": p, "m": m, "mode": mode,
        "s": s.to_string(),
        "e": e,
        "e_enclosure": enclosure,
        "p_value": pm,
        "moment_bound": mb,
        "point_bound": pb.to_string(),
    });
    let mut table = Table::new(&["quantity", "value"]);
    table.push(vec!["S".into(), s.to_string()]);
    table.push(vec!["E".into(), e.value.map_or(format!("1e{}", e.log10), |v| v.to_string())]);
    table.push(vec!["E_log10".into(), e.log10.to_string()]);
    table.push(vec!["P".into(), pm.to_string()]);
    table.push(vec!["moment_bound_log10".into(), mb.log10.to_string()]);
    table.push(vec!["point_bound".into(), pb.to_string()]);
    Ok(Outcome::new(out, json!({ "ell": ell, "p": p, "m": m, "mode": mode })).table(table))
}

fn stationary(cli: &Cli) -> CliResult<Outcome> {
    let ell = cli.ell.unwrap_or(5);
    let r_max = cli.r_max.unwrap_or(60);
    let rho0 = cli.rho0.unwrap_or(0.0);
    let delta0 = cli.delta0.unwrap_or(5.0 / 6.0);
    let sign = match cli.mode.as_deref() {
        None | Some("positive") => GammaSign::Positive,
        Some("literal") => GammaSign::Literal,
        Some(m) => return Err(config(format!("--mode {m}: expected positive or literal"))),
    };
    if !(0.0..=1.0).contains(&rho0) {
        return Err(config("--rho0 must lie in [0, 1]"));
    }
    let pr = pr_distribution::<f64>(ell, r_max)?;
    let pw = parity_weighted_pr::<f64>(ell, rho0, r_max)?;
    let op = MarkovOp::<f64>::m_t(ell, delta0, r_max)?;
    let stepped = op.step(&pw);
    let residual: f64 = stepped.probs().iter().zip(pw.probs()).map(|(a, b)| (a - b).abs()).sum();
    let gamma = estimate_gamma(&op)?;
    let alpha = alpha_exponent(gamma.gamma, delta0, sign)?;
    let mut out = json!({
        "ell": ell, "r_max": r_max, "rho0": rho0, "delta0": delta0,
        "pr": pr, "parity_weighted": pw, "fixed_point_residual": residual,
        "gamma": gamma, "alpha": alpha, "sign": sign,
    });
    if cli.exact {
        let pr_exact = pr_distribution::<BigRational>(ell, r_max)?;
        out["pr_exact"] = to_json(&pr_exact);
    }
    let mut table = Table::new(&["rank", "pr", "parity_weighted"]);
    for r in 0..=r_max {
        table.push(vec![r.to_string(), pr.prob(r).to_string(), pw.prob(r).to_string()]);
    }
    let resolved = json!({ "ell": ell, "r_max": r_max, "rho0": rho0, "delta0": delta0, "sign": sign, "exact": cli.exact });
    Ok(Outcome::new(out, resolved).table(table))
}

/// Curve from `--curve` or the built-in example, with `--ell` and `--q`
/// overriding the file and `--p` checked against the characteristic.
pub fn resolve_curve(cli: &Cli) -> CliResult<(CurveConfig, Vec<String>)> {
    let mut spec = match &cli.curve {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| config(format!("cannot read {}: {e}", path.display())))?;
            let parsed: std::result::Result<CurveSpec, String> =
                if path.extension().is_some_and(|x| x == "toml") {
                    toml::from_str(&text).map_err(|e| e.to_string())
                } else {
                    serde_json::from_str(&text).map_err(|e| e.to_string())
                };
            parsed.map_err(|e| config(format!("invalid curve file {}: {e}", path.display())))?
        }
        None => CurveSpec::example(),
    };
    if let Some(ell) = cli.ell {
        spec.ell = ell;
    }
    if let Some(q) = cli.q {
        spec.field = field_for_q(q)?;
    }
    if let Some(p) = cli.p {
        if p != spec.field.p {
            return Err(config(format!("--p {p} is not the characteristic {} of the field", spec.field.p)));
        }
    }
    let curve = CurveConfig::new(spec)?;
    let cert = certify_s3(&curve)?;
    if !cert.is_certified() {
        return Err(config(format!("splitting field is not certified as S3: {cert:?}")));
    }
    let warnings = vec![
        "assumed: Jac(C) has a place of totally split multiplicative reduction (not checked)".to_string(),
        "assumed: the constant field of the splitting field is F_q (not checked)".to_string(),
    ];
    Ok((curve, warnings))
}

fn field_for_q(q: u64) -> CliResult<FieldSpec> {
    let divisors = prime_divisors(q);
    if divisors.len() != 1 {
        return Err(config(format!("--q {q} is not a prime power")));
    }
    let p = divisors[0];
    let mut e = 0;
    let mut rest = q;
    while rest > 1 {
        rest /= p;
        e += 1;
    }
    Ok(if e == 1 { FieldSpec::prime(p) } else { FieldSpec::extension(p, e, None) })
}

fn transition_mode(cli: &Cli) -> CliResult<TransitionMode> {
    match cli.mode.as_deref() {
        None | Some("two-step") => Ok(TransitionMode::TwoStep),
        Some("d-table") => Ok(TransitionMode::DTable),
        Some(m) => Err(config(format!("--mode {m}: expected two-step or d-table"))),
    }
}

fn parse_list<T: std::str::FromStr>(s: &str, flag: &str) -> CliResult<Vec<T>> {
    s.split(',')
        .map(|x| x.trim().parse::<T>().map_err(|_| config(format!("--{flag}: cannot parse '{x}'"))))
        .collect()
}

fn simulate(cli: &Cli, cmd: Command) -> CliResult<Outcome> {
    let seed = need(cli.seed, "seed", cmd)?;
    let (curve, warnings) = resolve_curve(cli)?;
    let mut sim = SimConfig::new(curve.spec().clone(), cli.degree.unwrap_or(30), cli.samples.unwrap_or(100_000), seed);
    sim.transition_mode = transition_mode(cli)?;
    if let Some(mu) = &cli.mu_star {
        sim.mu_star = parse_list(mu, "mu-star")?;
    }
    sim.shuffle = cli.shuffle;
    sim.strict_fhat = cli.strict;
    let options = RunOptions { workers: cli.workers.unwrap_or(1), time_limit_secs: cli.time_limit };
    let report = run_experiment(&sim, &options)?;
    let mut table = Table::new(&["rank", "count", "empirical", "theoretical", "abs_diff"]);
    let last = (0..=report.empirical.r_max())
        .rev()
        .find(|&r| report.rank_counts.get(r).is_some_and(|&c| c > 0) || report.target.prob(r) >= 1e-12)
        .unwrap_or(0);
    for r in 0..=last {
        let (e, t) = (report.empirical.prob(r), report.target.prob(r));
        let count = report.rank_counts.get(r).copied().unwrap_or(0);
        table.push(vec![r.to_string(), count.to_string(), e.to_string(), t.to_string(), (e - t).abs().to_string()]);
    }
    let mut out = Outcome::new(to_json(&report), json!({ "sim": sim, "options": options })).table(table);
    out.seed = Some(seed);
    out.warnings = warnings;
    Ok(out)
}

const FROB_NAMES: [&str; 4] = ["identity", "transposition", "three_cycle", "ramified"];

fn classify(cli: &Cli) -> CliResult<Outcome> {
    let (curve, warnings) = resolve_curve(cli)?;
    let resolved = json!({ "curve": curve.spec(), "degree": cli.degree, "place": cli.place });
    let mut out = if let Some(place) = &cli.place {
        let coeffs: Vec<i64> = parse_list(place, "place")?;
        let v = Place::new(curve.field(), &Poly::from_ints(curve.field(), &coeffs))?;
        let (frob, class) = classify_place(&curve, &v);
        let mut table = Table::new(&["place", "degree", "frobenius", "class"]);
        table.push(vec![v.to_string(), v.degree().to_string(), FROB_NAMES[frob.index()].into(), format!("{class:?}")]);
        let j = json!({ "place": v, "degree": v.degree(), "frobenius": frob, "class": class });
        Outcome::new(j, resolved).table(table)
    } else {
        let d = cli.degree.unwrap_or(3);
        let census = density_census(&curve, d, cli.budget.unwrap_or(DEFAULT_BUDGET))?;
        let mut table = Table::new(&["degree", "identity", "transposition", "three_cycle", "ramified", "total"]);
        for row in &census.degrees {
            let c = row.counts;
            table.push(vec![
                row.degree.to_string(),
                c[FrobClass::Identity.index()].to_string(),
                c[FrobClass::Transposition.index()].to_string(),
                c[FrobClass::ThreeCycle.index()].to_string(),
                c[FrobClass::Ramified.index()].to_string(),
                row.total.to_string(),
            ]);
        }
        Outcome::new(to_json(&census), resolved).table(table)
    };
    out.warnings = warnings;
    Ok(out)
}

const DEFAULT_BUDGET: u128 = 1 << 26;

fn chebotarev(cli: &Cli) -> CliResult<Outcome> {
    let (curve, warnings) = resolve_curve(cli)?;
    let d = cli.degree.unwrap_or(6);
    let budget = cli.budget.unwrap_or(DEFAULT_BUDGET);
    let audit = chebotarev_audit(&curve, d, budget)?;
    let mut table = Table::new(&["degree", "class", "observed", "expected", "deviation", "bound", "pass"]);
    for r in &audit.rows {
        table.push(vec![
            r.degree.to_string(),
            FROB_NAMES[r.class.index()].into(),
            r.observed.to_string(),
            r.expected.to_string(),
            r.deviation.to_string(),
            r.bound.to_string(),
            r.pass.to_string(),
        ]);
    }
    let ok = audit.pass;
    let mut out = Outcome::new(to_json(&audit), json!({ "curve": curve.spec(), "degree": d, "budget": budget }))
        .table(table)
        .ok(ok);
    out.warnings = warnings;
    Ok(out)
}

fn omega(cli: &Cli, cmd: Command) -> CliResult<Outcome> {
    let q = need(cli.q, "q", cmd)?;
    let n = need(cli.degree, "degree", cmd)?;
    if !is_prime(prime_divisors(q).first().copied().unwrap_or(0)) || prime_divisors(q).len() != 1 {
        return Err(config(format!("--q {q} is not a prime power")));
    }
    let counts = omega_distribution(q, n)?;
    let total: BigUint = counts.iter().sum();
    let mut table = Table::new(&["omega", "count"]);
    for (w, c) in counts.iter().enumerate() {
        table.push(vec![w.to_string(), c.to_string()]);
    }
    let strings: Vec<String> = counts.iter().map(|c| c.to_string()).collect();
    let j = json!({ "q": q, "n": n, "counts": strings, "total": total.to_string() });
    Ok(Outcome::new(j, json!({ "q": q, "n": n })).table(table))
}

fn claims(cli: &Cli) -> CliResult<Outcome> {
    let k_max = cli.kmax.unwrap_or(6);
    let mapping = match cli.mode.as_deref() {
        None | Some("literal") => ClaimMapping::Literal,
        Some("consistent") => ClaimMapping::Consistent,
        Some(m) => return Err(config(format!("--mode {m}: expected literal or consistent"))),
    };
    let reports = match (cli.ell, cli.p) {
        (Some(ell), Some(p)) => vec![verify_claims(ell, p, k_max, mapping)?],
        (None, None) => verify_all_claims(k_max, mapping)?,
        _ => return Err(config("claims needs both --ell and --p, or neither for the full grid")),
    };
    let mut table = Table::new(&["ell", "p", "claim", "relation", "left_log10", "right_log10", "rounding", "pass"]);
    for r in &reports {
        for c in &r.claims {
            table.push(vec![
                r.ell.to_string(),
                r.p.to_string(),
                c.id.clone(),
                c.relation.clone(),
                c.left_log10.to_string(),
                c.right_log10.to_string(),
                c.rounding.clone(),
                c.pass.to_string(),
            ]);
        }
    }
    for r in &reports {
        for c in r.failures() {
            eprintln!("claim failed: l={} p={} {} ({})", r.ell, r.p, c.id, c.inputs);
        }
    }
    let ok = reports.iter().all(|r| r.pass);
    let resolved = json!({ "ell": cli.ell, "p": cli.p, "k_max": k_max, "mapping": mapping });
    Ok(Outcome::new(to_json(&reports), resolved).table(table).ok(ok))
}

fn s3_check(cli: &Cli) -> CliResult<Outcome> {
    let ells = cli.ell.map_or_else(|| vec![5, 7, 11, 13, 17], |l| vec![l]);
    let mut reports = Vec::new();
    let mut table = Table::new(&["ell", "element", "order", "fixed_dim"]);
    for &ell in &ells {
        let r = s3_representation_checks(ell)?;
        for e in &r.elements {
            table.push(vec![ell.to_string(), e.name.clone(), e.order.to_string(), e.fixed_dim.to_string()]);
        }
        reports.push(r);
    }
    let ok = reports.iter().all(|r| r.pass);
    Ok(Outcome::new(to_json(&reports), json!({ "ells": ells })).table(table).ok(ok))
}

fn dtable_diff(cli: &Cli) -> CliResult<Outcome> {
    let ell = cli.ell.unwrap_or(5);
    let r_max = cli.r_max.unwrap_or(64) as u32;
    let cmp = compare_dtable_vs_two_step(ell, r_max)?;
    let mut table = Table::new(&["r", "j", "printed", "two_step", "diff"]);
    for row in &cmp.rows {
        for (i, j) in [-2, 0, 2].into_iter().enumerate() {
            table.push(vec![
                row.r.to_string(),
                j.to_string(),
                row.printed[i].to_string(),
                row.two_step[i].to_string(),
                row.diff[i].to_string(),
            ]);
        }
    }
    Ok(Outcome::new(to_json(&cmp), json!({ "ell": ell, "r_max": r_max })).table(table))
}
