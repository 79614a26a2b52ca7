use std::f64::consts::FRAC_PI_4;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use bellwitness::channels::{random_channel, Channel, ChannelSpec, FamilySpec};
use bellwitness::geometry::{CacheStatus, HullCache};
use bellwitness::lhvsim::{
    exact_table, max_deviation, phi_ruleset, sample_table, stabilizer_membership, RationalTable,
};
use bellwitness::polytopes::{
    build_polytope, clifford_polytope, lhv_polytope, BuiltPolytope, FacetClass, FacetDump,
    PolytopeKind,
};
use bellwitness::witness::{
    analyze_channel, decompose_3322, difference_matrix, sweep, sweep_csv, chsh_beta_pairing,
    threshold_scan, verify_pairing, AnalysisReport, Criterion, Family, ThresholdResult,
    DEFAULT_LP_PRECISION, DEFAULT_THRESHOLD_TOL,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

const THETA_HELP: &str = "Phase-gate angle in radians. The gate U_z(π/4) = diag(1, e^{iπ/4}) is \
conventionally called the \"π/8 gate\"; select it with --theta 0.7853981634, not π/8";

/// Bell-inequality and magic-state witnesses for noisy single-qubit operations.
#[derive(Parser, Debug)]
#[command(name = "bellwitness", version, about)]
struct Cli {
    /// Directory holding cached facet enumerations and facet dumps.
    #[arg(long, global = true, default_value = ".bellwitness-cache")]
    cache_dir: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Enumerate, cache and inspect the LHV and Clifford polytopes.
    Polytopes {
        #[command(subcommand)]
        action: PolytopesAction,
    },
    /// Run the full witness pipeline on one channel and emit a JSON report.
    Analyze(AnalyzeArgs),
    /// Sweep a noisy phase-gate family and bisect the criterion thresholds.
    Scan(ScanArgs),
    /// Check facet censuses, the CHSH/β pairing, I3322 decompositions and more.
    Verify(VerifyArgs),
    /// Shared-randomness model of the |Φ⟩ correlations.
    Lhv(LhvArgs),
}

#[derive(Subcommand, Debug)]
enum PolytopesAction {
    /// Enumerate both polytopes (reusing the cache) and write facet dumps.
    Build,
    /// Print census, hashes and dump locations.
    Show {
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
#[value(rename_all = "snake_case")]
enum FamilyArg {
    DephasedPhase,
    DepolarizedPhase,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::DephasedPhase => Family::DephasedPhase,
            FamilyArg::DepolarizedPhase => Family::DepolarizedPhase,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CriterionArg {
    Chsh,
    Beta,
    Membership,
}

impl From<CriterionArg> for Criterion {
    fn from(c: CriterionArg) -> Self {
        match c {
            CriterionArg::Chsh => Criterion::Chsh,
            CriterionArg::Beta => Criterion::Beta,
            CriterionArg::Membership => Criterion::Membership,
        }
    }
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    /// JSON channel spec file: {"kraus": [...]} or {"family": ..., ...}.
    #[arg(long, conflicts_with_all = ["channel", "family"])]
    channel_file: Option<PathBuf>,
    /// Inline JSON channel spec.
    #[arg(long, conflicts_with = "family")]
    channel: Option<String>,
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,
    #[arg(long, help = THETA_HELP, default_value_t = FRAC_PI_4)]
    theta: f64,
    /// Dephasing strength (dephased_phase family).
    #[arg(long)]
    s: Option<f64>,
    /// Depolarizing probability (depolarized_phase family).
    #[arg(long)]
    p: Option<f64>,
    /// Rounding precision when converting the table to rationals for the LP.
    #[arg(long, default_value_t = DEFAULT_LP_PRECISION)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long, help = THETA_HELP, default_value_t = FRAC_PI_4)]
    theta: f64,
    /// Criterion to bisect; all three when omitted.
    #[arg(long, value_enum)]
    criterion: Option<CriterionArg>,
    /// Bisection bracket width.
    #[arg(long, default_value_t = DEFAULT_THRESHOLD_TOL)]
    tol: f64,
    /// Lower end of the parameter range (family default when omitted).
    #[arg(long)]
    from: Option<f64>,
    /// Upper end of the parameter range (family default when omitted).
    #[arg(long)]
    to: Option<f64>,
    /// Number of grid points in the sweep.
    #[arg(long, default_value_t = 21)]
    steps: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Number of random channels for the pairing check.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct LhvArgs {
    /// Shared-bit draws per table entry.
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also test all 60 two-qubit stabilizer-state tables for LHV membership.
    #[arg(long)]
    stabilizer_orbit: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

enum Failure {
    /// A checked property does not hold (exit 1).
    Property(anyhow::Error),
    /// Bad arguments, channel spec or file (exit 2).
    Input(anyhow::Error),
}

type CmdResult = Result<(), Failure>;

fn input(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Input(e.into())
}

fn from_core(e: bellwitness::Error) -> Failure {
    use bellwitness::Error as E;
    match e {
        E::NotTracePreserving { .. }
        | E::NotCompletelyPositive { .. }
        | E::InvalidParameter(_)
        | E::InvalidWeights(_)
        | E::DimensionMismatch { .. }
        | E::NoSignChange { .. }
        | E::Json(_)
        | E::Io(_) => Failure::Input(e.into()),
        other => Failure::Property(other.into()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Polytopes { action } => match action {
            PolytopesAction::Build => cmd_polytopes_build(&cli.cache_dir),
            PolytopesAction::Show { format } => cmd_polytopes_show(&cli.cache_dir, *format),
        },
        Command::Analyze(a) => cmd_analyze(a),
        Command::Scan(a) => cmd_scan(a),
        Command::Verify(a) => cmd_verify(&cli.cache_dir, a),
        Command::Lhv(a) => cmd_lhv(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Property(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("invalid input: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn print_json<T: Serialize>(value: &T) -> CmdResult {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Property(e.into()))?;
    println!("{text}");
    Ok(())
}

fn census_line(lhv: &BuiltPolytope, clifford: &BuiltPolytope) -> String {
    let counts = |p: &BuiltPolytope| {
        p.census().values().map(|n| n.to_string()).collect::<Vec<_>>().join("/")
    };
    format!(
        "LHV: {} ({}), Clifford: {} ({})",
        lhv.facets.len(),
        counts(lhv),
        clifford.facets.len(),
        counts(clifford)
    )
}

fn build_cached(cache_dir: &Path) -> Result<(BuiltPolytope, BuiltPolytope), Failure> {
    let cache = HullCache::new(cache_dir);
    let lhv = build_polytope(PolytopeKind::Lhv, Some(&cache)).map_err(from_core)?;
    let clifford = build_polytope(PolytopeKind::Clifford, Some(&cache)).map_err(from_core)?;
    Ok((lhv, clifford))
}

fn cmd_polytopes_build(cache_dir: &Path) -> CmdResult {
    let (lhv, clifford) = build_cached(cache_dir)?;
    for p in [&lhv, &clifford] {
        let path = FacetDump::from_built(p).write(cache_dir).map_err(from_core)?;
        let status = match p.cache_status {
            Some(CacheStatus::Hit) => "cache hit",
            Some(CacheStatus::Rebuilt) => "cache rebuilt",
            _ => "enumerated",
        };
        eprintln!("{}: {status}, wrote {}", p.kind, path.display());
    }
    println!("{}", census_line(&lhv, &clifford));
    if !(lhv.census_matches() && clifford.census_matches()) {
        return Err(Failure::Property(anyhow!("facet census differs from 36/72/576 and 48/72")));
    }
    Ok(())
}

#[derive(Serialize)]
struct PolytopeSummary {
    polytope: PolytopeKind,
    facets: usize,
    census: std::collections::BTreeMap<FacetClass, usize>,
    affine_dim: usize,
    census_matches: bool,
    dump_hash: String,
    dump_path: PathBuf,
}

fn cmd_polytopes_show(cache_dir: &Path, format: Format) -> CmdResult {
    let (lhv, clifford) = build_cached(cache_dir)?;
    let summaries = [&lhv, &clifford]
        .into_iter()
        .map(|p| {
            let dump = FacetDump::from_built(p);
            Ok(PolytopeSummary {
                polytope: p.kind,
                facets: p.facets.len(),
                census: p.census(),
                affine_dim: dump.affine_dim,
                census_matches: p.census_matches(),
                dump_hash: dump.hash().map_err(from_core)?,
                dump_path: FacetDump::path_in(cache_dir, p.kind),
            })
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    match format {
        Format::Json => print_json(&summaries)?,
        Format::Text | Format::Csv => {
            println!("{}", census_line(&lhv, &clifford));
            for s in &summaries {
                println!(
                    "{}: dim {}, dump sha256 {} ({})",
                    s.polytope,
                    s.affine_dim,
                    s.dump_hash,
                    s.dump_path.display()
                );
            }
        }
    }
    if summaries.iter().all(|s| s.census_matches) {
        Ok(())
    } else {
        Err(Failure::Property(anyhow!("facet census mismatch")))
    }
}

#[derive(Serialize)]
struct AnalyzeOutput {
    channel: ChannelSpec,
    lhv_facets_sha256: String,
    clifford_facets_sha256: String,
    report: AnalysisReport,
}

fn channel_spec(a: &AnalyzeArgs) -> Result<ChannelSpec, Failure> {
    if let Some(path) = &a.channel_file {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))
            .map_err(Failure::Input)?;
        return ChannelSpec::from_json(&text).map_err(from_core);
    }
    if let Some(text) = &a.channel {
        return ChannelSpec::from_json(text).map_err(from_core);
    }
    let family = a.family.ok_or_else(|| {
        input(anyhow!("give one of --channel-file, --channel or --family"))
    })?;
    let missing = |flag: &str| {
        let name = family.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
        input(anyhow!("--family {name} needs {flag}"))
    };
    Ok(ChannelSpec::Family(match family {
        FamilyArg::DephasedPhase => FamilySpec::DephasedPhase {
            theta: a.theta,
            s: a.s.ok_or_else(|| missing("--s"))?,
        },
        FamilyArg::DepolarizedPhase => FamilySpec::DepolarizedPhase {
            theta: a.theta,
            p: a.p.ok_or_else(|| missing("--p"))?,
        },
    }))
}

fn cmd_analyze(a: &AnalyzeArgs) -> CmdResult {
    if !(a.tol > 0.0) {
        return Err(input(anyhow!("--tol must be positive")));
    }
    let spec = channel_spec(a)?;
    let channel = spec.build().map_err(from_core)?;
    let report = analyze_channel(&channel, a.tol).map_err(from_core)?;
    let hash = |p: &BuiltPolytope| FacetDump::from_built(p).hash().map_err(from_core);
    let out = AnalyzeOutput {
        channel: spec,
        lhv_facets_sha256: hash(lhv_polytope())?,
        clifford_facets_sha256: hash(clifford_polytope())?,
        report,
    };
    match a.format {
        Format::Json => print_json(&out),
        Format::Text | Format::Csv => {
            let r = &out.report;
            println!("unital: {}", r.unital);
            println!("CHSH facets violated: {}", r.chsh_violations.len());
            println!("pairing holds: {}", r.pairing.holds);
            println!("verdict: {}", r.verdict.label());
            if let Some(anc) = &r.ancilla {
                println!(
                    "ancilla via {}: bloch ({:.6}, {:.6}, {:.6}), octahedron margin {:.6}",
                    anc.measurement, anc.bloch[0], anc.bloch[1], anc.bloch[2], anc.octahedron_margin
                );
            }
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct ThresholdEntry {
    criterion: Criterion,
    #[serde(skip_serializing_if = "Option::is_none")]
    result: Option<ThresholdResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Serialize)]
struct ScanOutput {
    family: Family,
    theta: f64,
    range: (f64, f64),
    sweep: Vec<bellwitness::witness::SweepRow>,
    thresholds: Vec<ThresholdEntry>,
}

fn cmd_scan(a: &ScanArgs) -> CmdResult {
    let family = Family::from(a.family);
    let (d_lo, d_hi) = family.default_range();
    let range = (a.from.unwrap_or(d_lo), a.to.unwrap_or(d_hi));
    if !(range.0 < range.1) {
        return Err(input(anyhow!("empty range [{}, {}]", range.0, range.1)));
    }
    if a.steps < 2 {
        return Err(input(anyhow!("--steps must be at least 2")));
    }
    let grid: Vec<f64> = (0..a.steps)
        .map(|i| range.0 + (range.1 - range.0) * i as f64 / (a.steps - 1) as f64)
        .collect();
    let rows = sweep(family, a.theta, &grid).map_err(from_core)?;
    let criteria: Vec<Criterion> = match a.criterion {
        Some(c) => vec![c.into()],
        None => vec![Criterion::Chsh, Criterion::Beta, Criterion::Membership],
    };
    let mut thresholds = Vec::new();
    for c in criteria {
        match threshold_scan(family, a.theta, c, a.tol, Some(range)) {
            Ok(r) => thresholds.push(ThresholdEntry {
                criterion: c,
                result: Some(r),
                error: None,
            }),
            Err(e) if a.criterion.is_some() => return Err(from_core(e)),
            Err(e) => thresholds.push(ThresholdEntry {
                criterion: c,
                result: None,
                error: Some(e.to_string()),
            }),
        }
    }
    match a.format {
        Format::Csv => {
            print!("{}", sweep_csv(family.parameter_name(), &rows));
            Ok(())
        }
        Format::Json => print_json(&ScanOutput {
            family,
            theta: a.theta,
            range,
            sweep: rows,
            thresholds,
        }),
        Format::Text => {
            for t in &thresholds {
                match (&t.result, &t.error) {
                    (Some(r), _) => {
                        print!(
                            "{}: {}* = {:.9} (bracket width {:.1e})",
                            t.criterion, r.parameter, r.critical_value, r.bracket_width
                        );
                        match r.noise_rate {
                            Some(p) => println!(", noise rate {p:.9}"),
                            None => println!(),
                        }
                    }
                    (None, Some(e)) => println!("{}: {e}", t.criterion),
                    (None, None) => {}
                }
            }
            Ok(())
        }
    }
}

struct Checks {
    failed: usize,
}

impl Checks {
    fn record(&mut self, name: &str, outcome: Result<String, String>) {
        match outcome {
            Ok(detail) => println!("ok   {name}: {detail}"),
            Err(detail) => {
                self.failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
}

fn check_pairing() -> Result<String, String> {
    let pairs = chsh_beta_pairing().map_err(|e| e.to_string())?;
    for (f, b) in &pairs {
        let d = difference_matrix(f, b);
        let others = d.iter().flatten().skip(1).filter(|x| **x != 0).count();
        let max = d.iter().flatten().skip(1).map(|x| x.abs()).max().unwrap_or(0);
        if d[0][0] != 1 || others != 1 || max != 1 {
            return Err(format!("difference matrix {d:?}"));
        }
    }
    Ok(format!("{} I2222 ↔ BETA pairs", pairs.len()))
}

fn check_decompositions() -> Result<String, String> {
    let facets: Vec<_> = lhv_polytope().facets_of(FacetClass::I3322).collect();
    for f in &facets {
        let d = decompose_3322(f).map_err(|e| e.to_string())?;
        if !d.verify() {
            return Err(format!("decomposition of {:?} does not sum back", f.coeffs));
        }
    }
    Ok(format!("{} I3322 facets decomposed", facets.len()))
}

fn check_stabilizers() -> Result<String, String> {
    let results = stabilizer_membership().map_err(|e| e.to_string())?;
    let inside = results.iter().filter(|(_, c)| c.is_inside()).count();
    if inside == results.len() {
        Ok(format!("{inside}/{} inside LHV polytope", results.len()))
    } else {
        Err(format!("{inside}/{} inside LHV polytope", results.len()))
    }
}

fn check_random_channels(samples: usize, seed: u64) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violating = 0;
    for i in 0..samples {
        let k = rng.random_range(1..=4);
        let ch: Channel = random_channel(&mut rng, k);
        let check = verify_pairing(&ch).map_err(|e| e.to_string())?;
        if !check.holds {
            return Err(format!("sample {i} breaks the pairing bound"));
        }
        violating += usize::from(!check.pairs.is_empty());
    }
    Ok(format!("{samples} channels, {violating} with CHSH violations"))
}

fn cmd_verify(cache_dir: &Path, a: &VerifyArgs) -> CmdResult {
    let mut checks = Checks { failed: 0 };
    let (lhv, clifford) = build_cached(cache_dir)?;
    for p in [&lhv, &clifford] {
        let counts: Vec<String> = p.census().values().map(|n| n.to_string()).collect();
        let detail = format!("{} facets ({})", p.facets.len(), counts.join("/"));
        checks.record(
            &format!("{} census", p.kind),
            if p.census_matches() { Ok(detail) } else { Err(detail) },
        );
    }
    checks.record("pairing", check_pairing());
    checks.record("I3322 decomposition", check_decompositions());
    checks.record("stabilizer locality", check_stabilizers());
    checks.record("random channels", check_random_channels(a.samples, a.seed));
    if checks.failed == 0 {
        println!("all checks passed");
        Ok(())
    } else {
        Err(Failure::Property(anyhow!("{} check(s) failed", checks.failed)))
    }
}

fn rational_rows(t: &RationalTable) -> Vec<Vec<String>> {
    t.0.iter().map(|row| row.iter().map(|q| q.to_string()).collect()).collect()
}

#[derive(Serialize)]
struct LhvOutput {
    ruleset: String,
    exact: Vec<Vec<String>>,
    sampled: bellwitness::lhvsim::SampledTable,
    max_deviation: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    stabilizer_inside: Option<(usize, usize)>,
}

fn cmd_lhv(a: &LhvArgs) -> CmdResult {
    let rules = phi_ruleset();
    let exact = exact_table(&rules);
    let sampled = sample_table(&rules, a.samples, a.seed).map_err(from_core)?;
    let dev = max_deviation(&sampled.table, &exact);
    let orbit = if a.stabilizer_orbit {
        let results = stabilizer_membership().map_err(from_core)?;
        let inside = results.iter().filter(|(_, c)| c.is_inside()).count();
        Some((inside, results.len()))
    } else {
        None
    };
    let out = LhvOutput {
        ruleset: rules.name.clone(),
        exact: rational_rows(&exact),
        sampled,
        max_deviation: dev,
        stabilizer_inside: orbit,
    };
    match a.format {
        Format::Json => print_json(&out)?,
        Format::Text | Format::Csv => {
            println!("exact table ({} rules):", out.ruleset);
            for row in &out.exact {
                println!("  {}", row.join(" "));
            }
            println!(
                "sampled table (n = {}, seed {}, {}):",
                out.sampled.samples, out.sampled.seed, out.sampled.generator
            );
            for row in &out.sampled.table.entries {
                let cells: Vec<String> = row.iter().map(|x| format!("{x:+.4}")).collect();
                println!("  {}", cells.join(" "));
            }
            println!("max deviation: {dev:.3e}");
            if let Some((inside, total)) = orbit {
                println!("{inside}/{total} inside LHV polytope");
            }
        }
    }
    match orbit {
        Some((inside, total)) if inside != total => {
            Err(Failure::Property(anyhow!("{} stabilizer tables outside", total - inside)))
        }
        _ => Ok(()),
    }
}
