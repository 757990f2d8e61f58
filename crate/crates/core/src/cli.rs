//! The `delta-forge` command line.
//!
//! Exit codes: 0 success, 1 input or parameter error (including a failed
//! certification), 2 retry cap hit, 3 non-generic input, 4 internal error.
//! Errors are printed to stderr as one line, `error: CODE: message`.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::delaunay::{certify, CertParams, CertReport, CertStatus, DelaunayError};
use crate::geom::{kernel, Simplex};
use crate::io::{self, fmt_f64, indexed_key, IoError, Report};
use crate::net::{generate_test_net, min_separation, validate_net, Net, TestNetKind};
use crate::perturb::{
    self, derive_params, forbidden_volume_bound, perturb_all, precision_report, AlgoParams, Mode, Overrides,
    PerturbError, Pow2,
};
use crate::testgen;
use crate::verify::{find_all_forbidden, ForbidParams, ForbiddenWitness};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_RETRY_CAP: i32 = 2;
pub const EXIT_NONGENERIC: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "delta-forge",
    version,
    about = "Perturb point nets into delta-generic position"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Perturb a net, then certify the result.
    Perturb(PerturbArgs),
    /// Certify an existing net.
    Certify(CertifyArgs),
    /// Print the derived algorithm constants.
    ReportParams(ParamArgs),
    /// Print the floating-point precision budget.
    Precision(PrecisionArgs),
    /// Run built-in invariant checks.
    Selftest,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Theoretical,
    Practical,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Theoretical => Mode::Theoretical,
            ModeArg::Practical => Mode::Practical,
        }
    }
}

#[derive(Debug, Args)]
struct Tuning {
    #[arg(long, value_enum, default_value = "theoretical")]
    mode: ModeArg,
    /// Perturbation radius as a fraction of eps [default: mu0/4].
    #[arg(long)]
    rho_tilde: Option<f64>,
    #[arg(long)]
    gamma0: Option<f64>,
    #[arg(long)]
    delta0: Option<f64>,
    #[arg(long)]
    alpha0: Option<f64>,
    /// Accept delta0 > gamma0^(m+1).
    #[arg(long)]
    allow_loose_delta0: bool,
}

#[derive(Debug, Args)]
struct PerturbArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    tuning: Tuning,
    #[arg(long)]
    retry_cap: Option<u64>,
    /// Density probes used to validate the input net.
    #[arg(long, default_value_t = 10_000)]
    probes: usize,
    /// Treat the input as a periodic net even without the header flag.
    #[arg(long)]
    periodic: bool,
    #[arg(long)]
    prune_p2: bool,
    #[arg(long)]
    m_simplices_only: bool,
    #[arg(long)]
    eval_tol: Option<f64>,
    /// Write an SVG plot of the result (planar nets only).
    #[arg(long)]
    emit_plot: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CertifyArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    gamma0: f64,
    #[arg(long)]
    delta0: f64,
    #[arg(long)]
    emit_plot: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ParamArgs {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    mu0: f64,
    #[arg(long, default_value_t = 1.0)]
    eps: f64,
    #[command(flatten)]
    tuning: Tuning,
}

#[derive(Debug, Args)]
struct PrecisionArgs {
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 1.0)]
    mu0: f64,
}

#[derive(Debug)]
pub struct CliError {
    pub code: &'static str,
    pub message: String,
    pub exit: i32,
}

impl CliError {
    fn new(code: &'static str, message: impl Into<String>, exit: i32) -> Self {
        CliError {
            code,
            message: message.into(),
            exit,
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::new(e.code(), e.to_string(), EXIT_INPUT)
    }
}

impl From<PerturbError> for CliError {
    fn from(e: PerturbError) -> Self {
        let exit = match e {
            PerturbError::RetryCap { .. } => EXIT_RETRY_CAP,
            _ => EXIT_INPUT,
        };
        let message = match &e {
            PerturbError::Param { message, .. } => message.clone(),
            other => other.to_string(),
        };
        CliError::new(e.code(), message, exit)
    }
}

impl From<DelaunayError> for CliError {
    fn from(e: DelaunayError) -> Self {
        CliError::new("INTERNAL", e.to_string(), EXIT_INTERNAL)
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp
                | ErrorKind::DisplayVersion
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    let _ = write!(out, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let text = e.to_string();
                    let parts: Vec<&str> = text
                        .lines()
                        .map(str::trim)
                        .filter(|l| !l.is_empty() && !l.starts_with("Usage:") && !l.starts_with("For more information"))
                        .collect();
                    let line = parts.join(" ");
                    let line = line.trim_start_matches("error: ");
                    let _ = writeln!(err, "error: PARAM_ARGS: {line}");
                    EXIT_INPUT
                }
            };
        }
    };
    if let Err(e) = configure_threads() {
        let _ = writeln!(err, "error: {}: {}", e.code, e.message);
        return e.exit;
    }
    let result = match cli.command {
        Command::Perturb(a) => cmd_perturb(&a, out),
        Command::Certify(a) => cmd_certify(&a, out),
        Command::ReportParams(a) => cmd_report_params(&a, out),
        Command::Precision(a) => cmd_precision(&a, out),
        Command::Selftest => cmd_selftest(out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}: {}", e.code, e.message.replace('\n', " "));
            e.exit
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("DELTA_FORGE_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::new(
            "PARAM_THREADS",
            format!("DELTA_FORGE_THREADS must be a positive integer, got {raw:?}"),
            EXIT_INPUT,
        )
    })?;
    // a second call in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn overrides(t: &Tuning) -> Overrides {
    Overrides {
        gamma0: t.gamma0,
        delta0: t.delta0,
        alpha0: t.alpha0,
        allow_loose_delta0: t.allow_loose_delta0,
        ..Overrides::default()
    }
}

fn write_out(path: &Path, text: &str) -> Result<(), CliError> {
    io::atomic_write(path, text.as_bytes()).map_err(|e| CliError::new("OUTPUT_IO", e.to_string(), EXIT_INPUT))
}

fn cmd_perturb(a: &PerturbArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let mut net = io::read_net(&a.input)?;
    if a.periodic && !net.is_periodic() {
        net = Net::new(net.points().to_vec(), net.eps(), net.mu0(), true).map_err(IoError::from)?;
    }
    if a.emit_plot.is_some() && net.dim() != 2 {
        return Err(CliError::new("PARAM_DIM", "--emit-plot needs a planar net", EXIT_INPUT));
    }
    let check = validate_net(&net, a.probes, a.seed).map_err(IoError::from)?;
    if !check.passes() {
        return Err(CliError::new(
            "INPUT_NET",
            format!(
                "input is not a net: min separation {} vs mu0*eps {}, largest probe gap {} vs eps {}",
                check.min_separation,
                net.mu0() * net.eps(),
                check.max_probe_gap,
                net.eps()
            ),
            EXIT_INPUT,
        ));
    }
    let rho = a.tuning.rho_tilde.unwrap_or(net.mu0() / 4.0);
    let ov = Overrides {
        retry_cap: a.retry_cap,
        eval_tol: a.eval_tol,
        prune_p2: a.prune_p2,
        m_simplices_only: a.m_simplices_only,
        ..overrides(&a.tuning)
    };
    let params = derive_params(net.dim(), net.mu0(), net.eps(), rho, a.tuning.mode.into(), &ov)?;
    let (perturbed, trace) = match perturb_all(&net, &params, a.seed) {
        Ok(r) => r,
        Err(PerturbError::RetryCap { index, cap, trace }) => {
            if let Some(path) = &a.trace {
                write_out(path, &io::format_trace(&trace))?;
            }
            return Err(PerturbError::RetryCap { index, cap, trace }.into());
        }
        Err(e) => return Err(e.into()),
    };
    write_out(&a.output, &io::format_net(&perturbed))?;
    if let Some(path) = &a.trace {
        write_out(path, &io::format_trace(&trace))?;
    }

    let cert = certify(&perturbed, &CertParams::from(&params))?;
    let witnesses = if cert.status == CertStatus::NonGeneric {
        Vec::new()
    } else {
        find_all_forbidden(&perturbed, &ForbidParams::from(&params))
    };
    let mut report = Report::new();
    params_section(&mut report, &params, &perturbed);
    report.set("params", "seed", a.seed.to_string());
    cert_sections(&mut report, &cert, &witnesses, params.delta0);
    run_section(&mut report, &trace, &perturbed);
    if let Some(path) = &a.report {
        write_out(path, &report.render())?;
    }
    if let Some(path) = &a.emit_plot {
        write_plot(path, &perturbed, &cert)?;
    }
    let _ = writeln!(
        out,
        "perturbed {} points: mean trials {}, max displacement {}, certification {}",
        perturbed.len(),
        fmt_f64(trace.mean_retries()),
        fmt_f64(trace.max_displacement()),
        verdict(&cert, &witnesses)
    );
    finish(&cert, &witnesses)
}

fn verdict(cert: &CertReport, witnesses: &[ForbiddenWitness]) -> &'static str {
    match (&cert.status, witnesses.is_empty()) {
        (CertStatus::NonGeneric, _) => "nongeneric",
        (CertStatus::Pass, true) => "pass",
        _ => "fail",
    }
}

fn finish(cert: &CertReport, witnesses: &[ForbiddenWitness]) -> Result<i32, CliError> {
    match &cert.status {
        CertStatus::NonGeneric => Err(CliError::new(
            "NONGENERIC",
            "cospherical points; Delaunay complex not unique",
            EXIT_NONGENERIC,
        )),
        CertStatus::Fail { witness, reason } => Err(CliError::new(
            "CERT_FAIL",
            format!("simplex {witness}: {reason}"),
            EXIT_INPUT,
        )),
        CertStatus::Pass => match witnesses.first() {
            None => Ok(EXIT_OK),
            Some(w) => Err(CliError::new(
                "CERT_FAIL",
                format!(
                    "forbidden configuration {} certified by vertex {}",
                    w.tau, w.certifying_vertex
                ),
                EXIT_INPUT,
            )),
        },
    }
}

fn params_section(r: &mut Report, p: &AlgoParams, net: &Net) {
    let s = "params";
    r.set(s, "m", p.m.to_string());
    r.set(s, "n", net.len().to_string());
    r.set(s, "mode", p.mode.to_string());
    r.set(s, "periodic", net.is_periodic().to_string());
    for (k, v) in [
        ("eps", p.eps),
        ("mu0", p.mu0),
        ("rho_tilde", p.rho_tilde),
        ("eps_prime", p.eps_prime),
        ("mu0_prime", p.mu0_prime),
        ("gamma0", p.gamma0),
        ("delta0", p.delta0),
        ("delta", p.delta),
        ("alpha0", p.alpha0),
        ("k_constant", p.k),
        ("gamma", p.gamma),
        ("expected_trials", p.t),
        ("eval_tol", p.eval_tol),
    ] {
        r.set_f64(s, k, v);
    }
    r.set(s, "retry_cap", p.retry_cap.to_string());
    r.set(s, "prune_p2", p.prune_p2.to_string());
    r.set(s, "m_simplices_only", p.m_simplices_only.to_string());
}

fn cert_sections(r: &mut Report, cert: &CertReport, witnesses: &[ForbiddenWitness], delta0: f64) {
    let d = "delaunay";
    let status = match &cert.status {
        CertStatus::Pass => "pass".to_string(),
        CertStatus::NonGeneric => "nongeneric".to_string(),
        CertStatus::Fail { witness, reason } => format!("fail {witness}: {reason}"),
    };
    r.set(d, "status", status);
    r.set(d, "simplex_count", cert.delaunay_count.to_string());
    r.set(d, "restricted_count", cert.restricted.len().to_string());
    r.set_f64(d, "min_thickness", cert.min_thickness);
    r.set_f64(d, "gamma0", cert.params.gamma0);
    let n = cert.restricted.len();
    for (i, c) in cert.restricted.iter().enumerate() {
        let key = indexed_key("simplex_", i, n);
        let profile: Vec<String> = c.thickness_profile.iter().map(|&t| fmt_f64(t)).collect();
        r.set(d, format!("{key}.vertices"), c.simplex.to_string());
        r.set(d, format!("{key}.thickness"), profile.join(" "));
        r.set(d, format!("{key}.good"), c.good.to_string());
        r.set_f64(d, format!("{key}.circumradius"), c.radius);
        r.set_f64("protection", format!("{key}"), c.protection);
    }
    let p = "protection";
    r.set_f64(p, "delta", cert.params.delta);
    r.set_f64(p, "delta0", delta0);
    r.set_f64(p, "min_protection", cert.min_protection);
    // δ below the rounding unit of the coordinates cannot be resolved by a
    // floating-point check; the measured minimum is what certifies
    r.set(
        p,
        "delta_below_resolution",
        (cert.params.delta < f64::EPSILON * cert.min_protection.abs().max(1.0)).to_string(),
    );
    let f = "forbidden";
    r.set(f, "count", witnesses.len().to_string());
    match witnesses.first() {
        None => r.set(f, "witness", "none"),
        Some(w) => {
            r.set(f, "witness", w.tau.to_string());
            r.set(f, "witness_vertex", w.certifying_vertex.to_string());
            r.set(f, "witness_facet_dim", w.k.to_string());
            r.set_f64(f, "witness_radius", w.ball_radius);
            r.set_f64(f, "witness_slack", w.slack);
        }
    }
}

fn run_section(r: &mut Report, trace: &perturb::RunTrace, perturbed: &Net) {
    let s = "run";
    r.set_f64(s, "mean_trials", trace.mean_retries());
    r.set(
        s,
        "max_trials",
        trace.retries.iter().max().copied().unwrap_or(0).to_string(),
    );
    r.set_f64(s, "max_displacement", trace.max_displacement());
    r.set(s, "total_predicate_evals", trace.total_predicate_evals.to_string());
    r.set(
        s,
        "max_candidates",
        trace.candidates.iter().max().copied().unwrap_or(0).to_string(),
    );
    r.set_f64(s, "output_min_separation", min_separation(perturbed).0);
}

fn write_plot(path: &Path, net: &Net, cert: &CertReport) -> Result<(), CliError> {
    let simplices: Vec<Simplex> = cert.restricted.iter().map(|c| c.simplex.clone()).collect();
    let svg = io::svg_plot(net, &simplices)
        .ok_or_else(|| CliError::new("PARAM_DIM", "--emit-plot needs a planar net", EXIT_INPUT))?;
    write_out(path, &svg)
}

fn cmd_certify(a: &CertifyArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let net = io::read_net(&a.input)?;
    if a.emit_plot.is_some() && net.dim() != 2 {
        return Err(CliError::new("PARAM_DIM", "--emit-plot needs a planar net", EXIT_INPUT));
    }
    if !(a.gamma0 > 0.0 && a.gamma0 <= 1.0) {
        return Err(CliError::new(
            "PARAM_GAMMA0",
            format!("gamma0 must lie in (0, 1], got {}", a.gamma0),
            EXIT_INPUT,
        ));
    }
    if !(a.delta0 >= 0.0 && a.delta0.is_finite()) {
        return Err(CliError::new(
            "PARAM_DELTA0",
            format!("delta0 must be non-negative, got {}", a.delta0),
            EXIT_INPUT,
        ));
    }
    let fp = ForbidParams::for_net(&net, a.gamma0, a.delta0);
    let cert = certify(
        &net,
        &CertParams {
            gamma0: a.gamma0,
            delta: fp.delta(),
        },
    )?;
    let witnesses = if cert.status == CertStatus::NonGeneric {
        Vec::new()
    } else {
        find_all_forbidden(&net, &fp)
    };
    let mut report = Report::new();
    let s = "params";
    r_set_common(&mut report, &net);
    report.set_f64(s, "gamma0", a.gamma0);
    report.set_f64(s, "delta0", a.delta0);
    report.set_f64(s, "delta", fp.delta());
    cert_sections(&mut report, &cert, &witnesses, a.delta0);
    if let Some(path) = &a.report {
        write_out(path, &report.render())?;
    }
    if let Some(path) = &a.emit_plot {
        write_plot(path, &net, &cert)?;
    }
    let _ = writeln!(
        out,
        "certified {} points: {} restricted simplices, min protection {}, {} forbidden configurations, {}",
        net.len(),
        cert.restricted.len(),
        fmt_f64(cert.min_protection),
        witnesses.len(),
        verdict(&cert, &witnesses)
    );
    if let Some(w) = witnesses.first() {
        let _ = writeln!(
            out,
            "witness {} vertex {} slack {}",
            w.tau,
            w.certifying_vertex,
            fmt_f64(w.slack)
        );
    }
    finish(&cert, &witnesses)
}

fn r_set_common(r: &mut Report, net: &Net) {
    r.set("params", "m", net.dim().to_string());
    r.set("params", "n", net.len().to_string());
    r.set("params", "periodic", net.is_periodic().to_string());
    r.set_f64("params", "eps", net.eps());
    r.set_f64("params", "mu0", net.mu0());
}

fn pow2_line(name: &str, x: f64) -> String {
    let l = x.log2();
    let exp = if l.is_finite() && l.fract() == 0.0 {
        format!("2^{}", l as i64)
    } else {
        format!("2^{l:.6}")
    };
    format!("{name} = {} ({exp})", fmt_f64(x))
}

fn cmd_report_params(a: &ParamArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let rho = a.tuning.rho_tilde.unwrap_or(a.mu0 / 4.0);
    let p = derive_params(a.m, a.mu0, a.eps, rho, a.tuning.mode.into(), &overrides(&a.tuning))?;
    let _ = writeln!(out, "mode = {}", p.mode);
    for (name, v) in [
        ("m", a.m as f64),
        ("mu0", p.mu0),
        ("eps", p.eps),
        ("rho_tilde", p.rho_tilde),
        ("eps_prime", p.eps_prime),
        ("mu0_prime", p.mu0_prime),
        ("K", p.k),
        ("Gamma0", p.gamma0),
        ("delta0", p.delta0),
        ("delta", p.delta),
        ("alpha0", p.alpha0),
        ("gamma", p.gamma),
        ("T", p.t),
        ("E1", p.e1),
        ("E", p.e),
    ] {
        let _ = writeln!(out, "{}", pow2_line(name, v));
    }
    Ok(EXIT_OK)
}

fn cmd_precision(a: &PrecisionArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    if a.m == 0 {
        return Err(CliError::new("PARAM_DIM", "dimension must be at least 1", EXIT_INPUT));
    }
    if !(a.mu0 > 0.0 && a.mu0 <= 1.0) {
        return Err(CliError::new(
            "PARAM_MU0",
            format!("mu0 must lie in (0, 1], got {}", a.mu0),
            EXIT_INPUT,
        ));
    }
    let r = precision_report(a.m, a.mu0);
    let line = |name: &str, q: Pow2| match q.exact_exponent() {
        Some(e) => format!("{name} = 2^{e} ({})", fmt_f64(q.value())),
        None => format!("{name} = 2^{:.6} ({})", q.log2, fmt_f64(q.value())),
    };
    let _ = writeln!(out, "m = {}", r.m);
    let _ = writeln!(out, "mu0 = {}", fmt_f64(r.mu0));
    for (name, q) in [
        ("Z", r.z),
        ("e_alpha_limit", r.e_alpha_limit),
        ("e_alpha", r.e_alpha),
        ("alpha0", r.alpha0),
        ("Gamma0", r.gamma0),
        ("delta0", r.delta0),
        ("e_S", r.e_s),
    ] {
        let _ = writeln!(out, "{}", line(name, q));
    }
    Ok(EXIT_OK)
}

fn cmd_selftest(out: &mut dyn Write) -> Result<i32, CliError> {
    let checks: [(&str, fn() -> Result<(), String>); 4] = [
        ("geometry identities", selftest_geometry),
        ("flake altitude bound", selftest_flakes),
        ("forbidden volume bound", selftest_volume),
        ("perturbed net parameters", selftest_perturb),
    ];
    let mut failed = false;
    for (name, check) in checks {
        match check() {
            Ok(()) => {
                let _ = writeln!(out, "ok   {name}");
            }
            Err(msg) => {
                failed = true;
                let _ = writeln!(out, "FAIL {name}: {msg}");
            }
        }
    }
    if failed {
        Err(CliError::new("INTERNAL", "selftest failed", EXIT_INTERNAL))
    } else {
        Ok(EXIT_OK)
    }
}

fn selftest_geometry() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..500 {
        let t = testgen::random_simplex(3, 2, &mut rng);
        let c = kernel::circumsphere(&t);
        if !c.exists {
            continue;
        }
        let lhs = kernel::altitude(&t, 0);
        let rhs = crate::geom::dist(&t[0], &t[1]) * crate::geom::dist(&t[0], &t[2]) / (2.0 * c.radius);
        let (_, diam) = kernel::edge_extremes(&t);
        if (lhs - rhs).abs() > 1e-9 * diam {
            return Err(format!("triangle altitude {lhs} vs {rhs}"));
        }
    }
    for _ in 0..500 {
        let s = testgen::random_simplex(4, 3, &mut rng);
        let (a, b) = (kernel::dihedral_sin(&s, 0, 1), kernel::dihedral_sin(&s, 1, 0));
        if let (Ok(a), Ok(b)) = (a, b) {
            if (a - b).abs() > 1e-9 * a.abs().max(b.abs()) {
                return Err(format!("dihedral ratios {a} vs {b}"));
            }
        }
    }
    Ok(())
}

fn selftest_flakes() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for i in 0..200 {
        let g = [0.01, 0.05, 0.2][i % 3];
        let Some(tau) = testgen::random_flake(3, 2 + i % 2, g, 1000, &mut rng) else {
            return Err("generator produced no flake".into());
        };
        let (s, d) = kernel::edge_extremes(&tau);
        for p in 0..tau.len() {
            if kernel::altitude(&tau, p) >= 2.0 * d * d * g / s {
                return Err(format!("flake vertex altitude {}", kernel::altitude(&tau, p)));
            }
        }
    }
    Ok(())
}

fn selftest_volume() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for m in [2, 3] {
        for _ in 0..3 {
            let g = testgen::ShellGeometry::sample(m, &mut rng);
            let (vol, se) = g.volume_mc(50_000, &mut rng);
            let bound = forbidden_volume_bound(g.rho, g.beta, m);
            if vol - 3.0 * se > bound {
                return Err(format!("shell volume {vol} exceeds {bound}"));
            }
        }
    }
    Ok(())
}

fn selftest_perturb() -> Result<(), String> {
    let net = generate_test_net(&TestNetKind::JitteredGrid { jitter: 0.2 }, 2, 36, 4).map_err(|e| e.to_string())?;
    let params = derive_params(
        2,
        net.mu0(),
        net.eps(),
        net.mu0() / 4.0,
        Mode::Practical,
        &Overrides {
            gamma0: Some(0.05),
            ..Overrides::default()
        },
    )
    .map_err(|e| e.to_string())?;
    let (out, _) = perturb_all(&net, &params, 11).map_err(|e| e.to_string())?;
    let (sep, _) = min_separation(&out);
    if sep < params.mu0_prime * params.eps_prime {
        return Err(format!(
            "separation {sep} below {}",
            params.mu0_prime * params.eps_prime
        ));
    }
    let report = validate_net(&out, 2000, 5).map_err(|e| e.to_string())?;
    if !report.density_ok {
        return Err(format!("density gap {}", report.max_probe_gap));
    }
    Ok(())
}

/// Entry point for the binary: runs with the process arguments and real
/// stdout/stderr.
pub fn main_exit_code() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = std::panic::catch_unwind(|| {
        let mut out = stdout.lock();
        let mut err = stderr.lock();
        run(std::env::args_os(), &mut out, &mut err)
    });
    match code {
        Ok(c) => c,
        Err(_) => {
            let _ = writeln!(std::io::stderr(), "error: INTERNAL: unexpected panic");
            EXIT_INTERNAL
        }
    }
}
