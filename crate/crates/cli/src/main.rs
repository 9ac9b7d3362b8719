use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use cacforge::bus_model::{BusParams, TransitionPattern, TransitionSymbol};
use cacforge::classification::{
    classify_legacy, classify_middle, classify_side, golden_diff, pairwise_disjoint, sweep_lambda,
    ClassificationTable, GoldenDiff, GoldenTables, Taxonomy, WindowClassifier,
};
use cacforge::codebook::{
    build_transition_graph_5, codebook_violations, max_cliques, verify_iolc_recursion,
    verify_recursion, verify_theorems, ClassicFamily, CodeSpec, Codebook, Codeword,
    ConstraintConfig, ExpansionMatrix, Seeds,
};
use cacforge::codec::RankTable;
use cacforge::evaluation::{report, DelayTables};

mod error;
use error::{CliError, CliResult};

#[derive(Parser, Debug)]
#[command(
    name = "cacforge",
    version,
    about = "Crosstalk classes and crosstalk avoidance codes for on-chip buses"
)]
struct Cli {
    /// TOML file with tau0_ps / lambda or line parasitics.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Directory holding middle.json, side_wire2.json and side_wire1.json.
    #[arg(long, global = true, env = "CACFORGE_GOLDEN_DIR", value_name = "DIR")]
    golden_dir: Option<PathBuf>,

    /// Crosstalk-free wire delay in ps.
    #[arg(long, global = true)]
    tau0: Option<f64>,

    /// Coupling to ground capacitance ratio.
    #[arg(long, global = true)]
    lambda: Option<f64>,

    /// Write to this file instead of stdout.
    #[arg(long, short, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// JSON instead of CSV.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classification tables and coupling sweeps.
    Classify(ClassifyArgs),
    /// Seed codebooks from the maximum cliques of the 5-bit graph.
    Seeds(SeedsArgs),
    /// Build a codebook.
    Build(BuildArgs),
    /// Worst-case delays, rates and throughput.
    Eval(EvalArgs),
    /// Encode hex data words or decode binary codewords, one per line.
    Codec(CodecArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TaxonomyArg {
    Middle,
    Side,
    Wire2,
    Wire1,
    Legacy,
}

impl TaxonomyArg {
    fn taxonomies(self) -> Vec<Taxonomy> {
        match self {
            Self::Middle => vec![Taxonomy::Middle],
            Self::Side => vec![Taxonomy::SideWire2, Taxonomy::SideWire1],
            Self::Wire2 => vec![Taxonomy::SideWire2],
            Self::Wire1 => vec![Taxonomy::SideWire1],
            Self::Legacy => vec![Taxonomy::Legacy],
        }
    }
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[arg(long, value_enum, default_value = "middle")]
    taxonomy: TaxonomyArg,

    /// Coupling sweep `start:end[:step]`.
    #[arg(long, value_name = "RANGE")]
    sweep: Option<String>,

    /// Compare with the reference tables; nonzero exit on any difference.
    #[arg(long)]
    check: bool,

    /// Delay tolerance in ps for --check.
    #[arg(long, default_value_t = 0.02)]
    tol: f64,
}

#[derive(Args, Debug)]
struct CodeArgs {
    /// Constraint such as C2,1C.
    #[arg(long, conflicts_with = "family")]
    constraint: Option<String>,

    /// Classic family: OLC, FTC, FPC or FOC.
    #[arg(long)]
    family: Option<String>,

    /// Prune a (C2,1C) code at both edges.
    #[arg(long)]
    prune: bool,

    /// Number of wires.
    #[arg(long)]
    n: usize,
}

impl CodeArgs {
    fn spec(&self) -> CliResult<CodeSpec> {
        let spec = match (&self.constraint, &self.family) {
            (Some(c), None) => CodeSpec::Constraint(c.parse::<ConstraintConfig>()?),
            (None, Some(f)) => CodeSpec::Classic(f.parse::<ClassicFamily>()?),
            _ => return Err(CliError::Usage("give --constraint or --family".into())),
        };
        if let CodeSpec::Constraint(c) = spec {
            if c.middle == 0 && c.side == 0 {
                return Err(CliError::Core(cacforge::Error::UnsupportedConstraint(
                    format!("{c} is too restrictive"),
                )));
            }
            c.check_supported()?;
        }
        match (spec, self.prune) {
            (_, false) => Ok(spec),
            (CodeSpec::Constraint(ConstraintConfig::C2_1C), true) => Ok(CodeSpec::Iolc),
            _ => Err(CliError::Usage("--prune applies to (C2,1C) only".into())),
        }
    }
}

#[derive(Args, Debug)]
struct SeedsArgs {
    #[arg(long)]
    constraint: String,

    /// Also print the expansion matrices.
    #[arg(long)]
    matrix: bool,
}

#[derive(Args, Debug)]
struct BuildArgs {
    #[command(flatten)]
    code: CodeArgs,

    /// Start from the second seed (or the other boundary parity).
    #[arg(long, default_value_t = 0)]
    parity: u8,

    /// Check legality, size recursion and family equivalences.
    #[arg(long)]
    verify: bool,
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// Comma-separated codes with widths, e.g. iolc10,c21:10,olc10.
    #[arg(long, alias = "codebook", value_delimiter = ',')]
    codebooks: Vec<String>,

    /// Codebook files written by `build`.
    #[arg(long, value_delimiter = ',')]
    files: Vec<PathBuf>,

    /// Size and gain table for IOLC, (C2,1C) and OLC over `start:end`.
    #[arg(long, value_name = "RANGE")]
    sizes: Option<String>,
}

#[derive(Args, Debug)]
struct CodecArgs {
    #[command(flatten)]
    code: CodeArgs,

    #[arg(long, conflicts_with = "decode", required_unless_present = "decode")]
    encode: bool,

    #[arg(long)]
    decode: bool,

    /// Read from this file instead of stdin.
    #[arg(long, value_name = "PATH")]
    input: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: &Cli) -> CliResult<()> {
    let params = load_params(cli)?;
    let out = match &cli.command {
        Command::Classify(a) => classify(cli, a, &params)?,
        Command::Seeds(a) => seeds(cli, a, &params)?,
        Command::Build(a) => build(a, &params, cli)?,
        Command::Eval(a) => eval(cli, a, &params)?,
        Command::Codec(a) => codec(a)?,
    };
    emit(cli.out.as_deref(), &out)
}

fn load_params(cli: &Cli) -> CliResult<BusParams> {
    let mut p = match &cli.config {
        Some(path) => BusParams::from_config_str(&read(path)?)?,
        None => BusParams::default(),
    };
    if let Some(t) = cli.tau0 {
        p = p.with_tau0(t)?;
    }
    if let Some(l) = cli.lambda {
        p = p.with_lambda(l)?;
    }
    Ok(p)
}

fn golden(cli: &Cli) -> CliResult<GoldenTables> {
    Ok(match &cli.golden_dir {
        Some(dir) => GoldenTables::from_dir(dir)?,
        None => GoldenTables::embedded(),
    })
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn emit(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

fn to_json(value: &impl Serialize) -> CliResult<String> {
    Ok(serde_json::to_string_pretty(value).map_err(cacforge::Error::from)? + "\n")
}

/// `a:b` or `a:b:step`, inclusive.
fn parse_range(text: &str) -> CliResult<Vec<f64>> {
    let bad = || CliError::Usage(format!("bad range {text:?}, expected start:end[:step]"));
    let parts: Vec<f64> = text
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<CliResult<_>>()?;
    let (a, b, step) = match parts.as_slice() {
        [a, b] => (*a, *b, 1.0),
        [a, b, s] => (*a, *b, *s),
        _ => return Err(bad()),
    };
    if !(step > 0.0) || b < a {
        return Err(bad());
    }
    let count = ((b - a) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|i| a + i as f64 * step).collect())
}

// ---------------------------------------------------------------------------
// classify

#[derive(Serialize)]
struct PatternRow {
    taxonomy: String,
    pattern: String,
    subclass: usize,
    class: String,
    delay_ps: f64,
}

#[derive(Serialize)]
struct IntervalRow {
    taxonomy: String,
    lambda: f64,
    class: String,
    min_ps: f64,
    max_ps: f64,
    non_overlap: bool,
}

#[derive(Serialize)]
struct ClassifyOutput {
    tau0_ps: f64,
    lambda: f64,
    patterns: Vec<PatternRow>,
    intervals: Vec<IntervalRow>,
}

fn pattern_rows(t: &ClassificationTable) -> Vec<PatternRow> {
    t.entries
        .values()
        .map(|e| PatternRow {
            taxonomy: t.taxonomy.to_string(),
            pattern: e.pattern.to_string(),
            subclass: e.subclass,
            class: e.class.to_string(),
            delay_ps: e.delay_ps,
        })
        .collect()
}

fn interval_rows(
    taxonomy: Taxonomy,
    lambda: f64,
    iv: &[(cacforge::classification::DelayClass, f64, f64)],
) -> Vec<IntervalRow> {
    let disjoint = pairwise_disjoint(iv);
    iv.iter()
        .map(|(c, lo, hi)| IntervalRow {
            taxonomy: taxonomy.to_string(),
            lambda,
            class: c.to_string(),
            min_ps: *lo,
            max_ps: *hi,
            non_overlap: disjoint,
        })
        .collect()
}

fn tables_for(
    taxonomies: &[Taxonomy],
    params: &BusParams,
    golden: &GoldenTables,
) -> CliResult<Vec<ClassificationTable>> {
    let mut out = Vec::new();
    if taxonomies.contains(&Taxonomy::Middle) {
        out.push(classify_middle(params, golden)?);
    }
    if taxonomies
        .iter()
        .any(|t| matches!(t, Taxonomy::SideWire2 | Taxonomy::SideWire1))
    {
        let (w2, w1) = classify_side(params, golden)?;
        for t in [w2, w1] {
            if taxonomies.contains(&t.taxonomy) {
                out.push(t);
            }
        }
    }
    Ok(out)
}

fn classify(cli: &Cli, a: &ClassifyArgs, params: &BusParams) -> CliResult<String> {
    let golden = golden(cli)?;
    let taxonomies = a.taxonomy.taxonomies();
    if let Some(range) = &a.sweep {
        let lambdas = parse_range(range)?;
        let mut rows = Vec::new();
        for &t in &taxonomies {
            if let Some(&bad) = lambdas.iter().find(|&&l| l < t.min_lambda()) {
                return Err(cacforge::Error::Classification {
                    lambda: bad,
                    min: t.min_lambda(),
                }
                .into());
            }
            for point in sweep_lambda(&lambdas, t, params.tau0_ps(), &golden)? {
                rows.extend(interval_rows(t, point.lambda, &point.intervals));
            }
        }
        return if cli.json {
            to_json(&rows)
        } else {
            let mut s = String::from("taxonomy,lambda,class,min_ps,max_ps,non_overlap\n");
            for r in rows {
                s += &format!(
                    "{},{},{},{:.4},{:.4},{}\n",
                    r.taxonomy, r.lambda, r.class, r.min_ps, r.max_ps, r.non_overlap
                );
            }
            Ok(s)
        };
    }

    if matches!(a.taxonomy, TaxonomyArg::Legacy) {
        if a.check {
            return Err(CliError::Usage(
                "no reference table for the legacy classes".into(),
            ));
        }
        return legacy(cli, params);
    }

    let tables = tables_for(&taxonomies, params, &golden)?;
    if a.check {
        return check(cli, &tables, &golden, a.tol);
    }
    let output = ClassifyOutput {
        tau0_ps: params.tau0_ps(),
        lambda: params.lambda(),
        patterns: tables.iter().flat_map(pattern_rows).collect(),
        intervals: tables
            .iter()
            .flat_map(|t| interval_rows(t.taxonomy, params.lambda(), &t.class_intervals()))
            .collect(),
    };
    if cli.json {
        return to_json(&output);
    }
    let mut s = String::from("taxonomy,pattern,subclass,class,delay_ps\n");
    for r in &output.patterns {
        s += &format!(
            "{},{},{},{},{:.4}\n",
            r.taxonomy, r.pattern, r.subclass, r.class, r.delay_ps
        );
    }
    Ok(s)
}

fn legacy(cli: &Cli, params: &BusParams) -> CliResult<String> {
    #[derive(Serialize)]
    struct Row {
        pattern: String,
        class: String,
        bound_ps: f64,
    }
    let mut rows = Vec::new();
    for code in 0..27 {
        let p = TransitionPattern::from_code(3, 2, code)?;
        if p.examined_symbol() != TransitionSymbol::Up {
            continue;
        }
        let (class, bound) = classify_legacy(&p, params)?;
        rows.push(Row {
            pattern: p.to_string(),
            class: class.to_string(),
            bound_ps: bound,
        });
    }
    if cli.json {
        return to_json(&rows);
    }
    let mut s = String::from("pattern,class,bound_ps\n");
    for r in rows {
        s += &format!("{},{},{:.4}\n", r.pattern, r.class, r.bound_ps);
    }
    Ok(s)
}

fn check(
    cli: &Cli,
    tables: &[ClassificationTable],
    golden: &GoldenTables,
    tol: f64,
) -> CliResult<String> {
    let mut diffs: Vec<(String, GoldenDiff)> = Vec::new();
    for t in tables {
        let g = golden.table(t.taxonomy).expect("reference table");
        diffs.push((t.taxonomy.to_string(), golden_diff(t, g, tol)?));
    }
    let mut s = String::from("table,kind,item,computed,printed\n");
    for (name, d) in &diffs {
        for p in &d.partition {
            s += &format!("{name},partition,{p},,\n");
        }
        for p in &d.classes {
            s += &format!("{name},class,{p},,\n");
        }
        for p in &d.coefficients {
            s += &format!("{name},coefficients,{p},,\n");
        }
        for (p, c, r) in &d.delays {
            s += &format!("{name},delay,{p},{c:.4},{r:.2}\n");
        }
    }
    let text = if cli.json { to_json(&diffs)? } else { s };
    if diffs.iter().all(|(_, d)| d.is_clean()) {
        Ok(text)
    } else {
        emit(cli.out.as_deref(), &text)?;
        let summary: Vec<String> = diffs
            .iter()
            .map(|(n, d)| {
                format!(
                    "{n}: {} partition, {} class, {} coefficient, {} delay differences (max {:.3} ps)",
                    d.partition.len(),
                    d.classes.len(),
                    d.coefficients.len(),
                    d.delays.len(),
                    d.max_delay_dev
                )
            })
            .collect();
        Err(CliError::Check(summary.join("; ")))
    }
}

// ---------------------------------------------------------------------------
// seeds

fn seeds(cli: &Cli, a: &SeedsArgs, params: &BusParams) -> CliResult<String> {
    let c: ConstraintConfig = a.constraint.parse()?;
    let classifier = WindowClassifier::build(params, &golden(cli)?)?;
    let s = cacforge::codebook::seed_codebooks(c, &classifier)?;
    let cliques = max_cliques(&build_transition_graph_5(c, &classifier));
    let fmt_set = |v: &[u64]| {
        v.iter()
            .map(|w| format!("{w:05b}"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    if cli.json {
        #[derive(Serialize)]
        struct Out {
            constraint: String,
            cliques: usize,
            size: usize,
            c0: Vec<u64>,
            c1: Vec<u64>,
            d: Option<Vec<Vec<String>>>,
        }
        let d = a
            .matrix
            .then(|| ExpansionMatrix::from_seeds(&s).d.to_rows());
        return to_json(&Out {
            constraint: c.to_string(),
            cliques: cliques.len(),
            size: s.size(),
            c0: s.c0.clone(),
            c1: s.c1.clone(),
            d,
        });
    }
    let mut out = format!(
        "# {c}: {} maximum clique(s) of size {}\nC5^0: {}\nC5^1: {}\n",
        cliques.len(),
        s.size(),
        fmt_set(&s.c0),
        fmt_set(&s.c1)
    );
    if a.matrix {
        let m = ExpansionMatrix::from_seeds(&s);
        out += &format!("# D0\n{}# D1\n{}# D = D0·Y\n{}", m.d0, m.d1, m.d);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// build

fn build(a: &BuildArgs, params: &BusParams, cli: &Cli) -> CliResult<String> {
    let spec = a.code.spec()?;
    let n = a.code.n;
    if n < 5 {
        return Err(cacforge::Error::Width { width: n, min: 5 }.into());
    }
    let cb = match spec {
        CodeSpec::Constraint(c) => {
            cacforge::codebook::expand_from(&Seeds::reference(c)?, n, a.parity)?
        }
        CodeSpec::Classic(f) => cacforge::codebook::classic_codebook(f, n, a.parity)?,
        CodeSpec::Iolc if a.parity != 0 => {
            return Err(CliError::Usage("pruning starts from the first seed".into()))
        }
        CodeSpec::Iolc => spec.codebook(n)?,
    };
    if a.verify {
        verify(&cb, spec, params, cli)?;
    }
    if cli.json {
        #[derive(Serialize)]
        struct Out {
            code: String,
            width: usize,
            size: usize,
            words: Vec<String>,
        }
        return to_json(&Out {
            code: spec.to_string(),
            width: n,
            size: cb.len(),
            words: cb.words().map(|w| w.to_string()).collect(),
        });
    }
    Ok(cb.to_text())
}

/// Largest codebook checked pair by pair under --verify.
const LEGALITY_LIMIT: usize = 2000;

/// Checks printed to stderr; an error when any required check fails.
fn verify(cb: &Codebook, spec: CodeSpec, params: &BusParams, cli: &Cli) -> CliResult<()> {
    let mut failures = Vec::new();
    let n = cb.width();
    if let Some(c) = spec.constraint() {
        let classifier = WindowClassifier::build(params, &golden(cli)?)?;
        if cb.len() <= LEGALITY_LIMIT {
            let bad = codebook_violations(cb, c, &classifier).len();
            eprintln!("legality under {c}: {bad} violating pairs");
            if bad > 0 {
                failures.push("legality");
            }
        } else {
            eprintln!("legality under {c}: skipped, more than {LEGALITY_LIMIT} words");
        }
    }
    let n_max = n.max(20);
    match spec {
        CodeSpec::Constraint(c) if !c.is_trivial() => {
            let r = verify_recursion(&Seeds::reference(c)?, n_max)?;
            eprintln!(
                "recursion {} through n = {n_max}: {}",
                r.lemma,
                if r.passed() { "holds" } else { "fails" }
            );
            if let (Some(id), Some(ok)) = (&r.identity, r.identity_holds) {
                eprintln!("identity {id}: {}", if ok { "holds" } else { "fails" });
            }
            if let Some(e) = &r.erratum {
                eprintln!("note: {e}");
            }
            if !r.passed() {
                failures.push("recursion");
            }
        }
        CodeSpec::Iolc => {
            let r = verify_iolc_recursion(&Seeds::reference(ConstraintConfig::C2_1C)?, n_max)?;
            match r.first_violation {
                Some(v) => eprintln!("note: {} first fails at n = {v}", r.lemma),
                None => eprintln!("recursion {}: holds", r.lemma),
            }
            if !r.construction_agrees {
                failures.push("pruned sizes");
            }
        }
        _ => {}
    }
    let t = verify_theorems(Seeds::reference, n.min(12), n.min(16))?;
    eprintln!(
        "family equivalences ({} checks): {}",
        t.checks.len(),
        if t.passed() { "hold" } else { "fail" }
    );
    for f in t.failures() {
        eprintln!(
            "  {} n = {} parity {}: witness {:?}",
            f.label, f.n, f.parity, f.witness
        );
    }
    if !t.passed() {
        failures.push("equivalences");
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Check(format!("failed: {}", failures.join(", "))))
    }
}

// ---------------------------------------------------------------------------
// eval

/// `iolc10`, `olc:16`, `c21:10`, `C5,3C:9`.
fn parse_code_token(token: &str) -> CliResult<(CodeSpec, usize)> {
    let bad = || {
        CliError::Usage(format!(
            "bad code {token:?}, expected e.g. iolc10 or c21:10"
        ))
    };
    let t = token.trim();
    let (name, width) = match t.rsplit_once(':') {
        Some((name, w)) => (name, w),
        None => {
            let lower = t.to_ascii_lowercase();
            let short =
                lower.starts_with('c') && lower[1..].chars().take(2).all(|c| c.is_ascii_digit());
            let split = if short {
                3
            } else {
                t.find(|c: char| c.is_ascii_digit()).ok_or_else(bad)?
            };
            if split > t.len() {
                return Err(bad());
            }
            t.split_at(split)
        }
    };
    let width: usize = width.parse().map_err(|_| bad())?;
    let lower = name.to_ascii_lowercase();
    let spec = if lower.len() == 3
        && lower.starts_with('c')
        && lower[1..].chars().all(|c| c.is_ascii_digit())
    {
        let d: Vec<u8> = lower[1..].bytes().map(|b| b - b'0').collect();
        CodeSpec::Constraint(ConstraintConfig::new(d[0], d[1])?)
    } else {
        name.parse::<CodeSpec>()?
    };
    Ok((spec, width))
}

fn eval(cli: &Cli, a: &EvalArgs, params: &BusParams) -> CliResult<String> {
    let tables = DelayTables::build(params)?;
    if let Some(range) = &a.sizes {
        let ns = parse_range(range)?;
        let codes: Vec<(CodeSpec, usize)> = ns
            .iter()
            .flat_map(|&n| {
                [
                    CodeSpec::Iolc,
                    CodeSpec::Constraint(ConstraintConfig::C2_1C),
                    CodeSpec::Classic(ClassicFamily::Olc),
                ]
                .map(|s| (s, n as usize))
            })
            .collect();
        let r = report(&codes, &tables)?;
        return if cli.json {
            Ok(r.to_json()? + "\n")
        } else {
            Ok(r.size_table_csv())
        };
    }
    let codes = a
        .codebooks
        .iter()
        .filter(|t| !t.trim().is_empty())
        .map(|t| parse_code_token(t))
        .collect::<CliResult<Vec<_>>>()?;
    let mut r = report(&codes, &tables)?;
    for path in &a.files {
        let cb = Codebook::from_text(&read(path)?)?;
        let baseline = CodeSpec::Classic(ClassicFamily::Olc).codebook(cb.width())?;
        let delays = cacforge::evaluation::codebook_worst_delay(&cb, &tables)?;
        let metrics = cacforge::evaluation::metrics(&cb, &baseline, &tables)?;
        r.tau0_ps = Some(params.tau0_ps());
        r.lambda = Some(params.lambda());
        r.codes.push(cacforge::evaluation::CodeReport {
            code: path.display().to_string(),
            delays,
            metrics,
        });
    }
    if r.codes.is_empty() {
        return Err(CliError::Usage(
            "nothing to evaluate; give --codebooks, --files or --sizes".into(),
        ));
    }
    if cli.json {
        return Ok(r.to_json()? + "\n");
    }
    Ok(format!("{}\n{}", r.wires_csv(), r.summary_csv()))
}

// ---------------------------------------------------------------------------
// codec

fn parse_hex(text: &str) -> Option<u128> {
    let t = text.trim();
    let digits = t
        .strip_prefix("0x")
        .or_else(|| t.strip_prefix("0X"))
        .unwrap_or(t);
    u128::from_str_radix(digits, 16).ok()
}

fn codec(a: &CodecArgs) -> CliResult<String> {
    let spec = a.code.spec()?;
    let table = RankTable::for_spec(spec, a.code.n)?;
    let input = match &a.input {
        Some(p) => read(p)?,
        None => {
            let mut s = String::new();
            for line in io::stdin().lock().lines() {
                let line = line.map_err(|source| CliError::Io {
                    path: PathBuf::from("<stdin>"),
                    source,
                })?;
                s += &line;
                s.push('\n');
            }
            s
        }
    };
    let mut out = String::new();
    for (i, line) in input.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let at = |source: cacforge::Error| CliError::Line {
            line: i + 1,
            source,
        };
        if a.encode {
            let x = parse_hex(line).ok_or_else(|| {
                CliError::Usage(format!("line {}: {line:?} is not a hex number", i + 1))
            })?;
            out += &format!("{}\n", table.encode(x).map_err(at)?);
        } else {
            let w = Codeword::parse_binary(line).map_err(at)?;
            out += &format!("0x{:x}\n", table.decode(&w).map_err(at)?);
        }
    }
    Ok(out)
}
