use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use engelkit::hall_lie::is_prime;
use engelkit::lie_examples::{build_gf2_example, nonnilpotence_witness, odd_char_check};
use engelkit::nilgroup::{free_nilpotent, QuotientPresentation, MAX_CLASS, MAX_RANK};
use engelkit::sandwich::{
    certify_claims, sandwich_normal_subgroup, Certificate, InstantiationBall, RelatorMode, SandwichFamily,
    SandwichKind, Status, VerifierConfig, CLAIMS,
};
use engelkit::words::{
    bracketing, com, find_forbidden, is_standard, longest_avoiding_capped, standard_decomposition, Word,
    DEFAULT_LENGTH_CAP,
};

const EXIT_VERIFIED: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_REFUTED: u8 = 2;
const EXIT_INCONCLUSIVE: u8 = 3;

const MAX_BALL: usize = 4;
const MAX_DEGREE: usize = 16;

#[derive(Parser)]
#[command(name = "engelkit", version, about = "Exact certificates for sandwich groups, sandwich Lie algebras and standard words")]
struct Cli {
    /// Class cap of the ambient free nilpotent groups
    #[arg(long, global = true)]
    cap: Option<usize>,

    /// Largest conjugator radius
    #[arg(long, global = true)]
    ball: Option<usize>,

    /// Degree cap of the GF(2) Lie example
    #[arg(long, global = true)]
    degree: Option<usize>,

    /// Prime for the odd-characteristic check
    #[arg(long, global = true)]
    prime: Option<u64>,

    /// Concurrent certificate jobs
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Output directory for certificates and reports
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// key=value configuration file; flags take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certify claims by id, or `all`
    Certify {
        #[arg(required = true)]
        ids: Vec<String>,
    },
    /// List claim ids
    Claims,
    /// GF(2) sandwich Lie algebra and the odd-characteristic check
    Lie {
        #[command(subcommand)]
        command: LieCommand,
    },
    /// Standard words and the avoidance bound
    Words {
        #[command(subcommand)]
        command: WordsCommand,
    },
    /// Quotients of free nilpotent groups
    Group {
        #[command(subcommand)]
        command: GroupCommand,
    },
    /// Text dumps
    Dump {
        #[command(subcommand)]
        command: DumpCommand,
    },
}

#[derive(Subcommand)]
enum LieCommand {
    /// Layer dimensions and non-nilpotence witnesses
    Example,
    /// Membership of axya in the ideal generated by the a·h·a
    Oddchar,
}

#[derive(Subcommand)]
enum WordsCommand {
    /// Longest word avoiding cc, c·x·c and x·c·x
    Avoid {
        #[arg(long, default_value_t = 2)]
        rank: usize,
        #[arg(long, default_value_t = DEFAULT_LENGTH_CAP)]
        length_cap: usize,
    },
    /// Standardness, decomposition and bracketing of a word such as 211
    Standard { word: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    None,
    Sandwich,
    Strong,
    PartialStrong,
}

impl KindArg {
    fn kind(self) -> Option<SandwichKind> {
        match self {
            KindArg::None => None,
            KindArg::Sandwich => Some(SandwichKind::Sandwich),
            KindArg::Strong => Some(SandwichKind::Strong),
            KindArg::PartialStrong => Some(SandwichKind::PartialStrong),
        }
    }
}

#[derive(Subcommand)]
enum GroupCommand {
    /// Lower central series and class of a sandwich quotient
    Class {
        #[arg(long, default_value_t = 3)]
        rank: usize,
        #[arg(long, value_enum, default_value_t = KindArg::Sandwich)]
        kind: KindArg,
    },
}

#[derive(Subcommand)]
enum DumpCommand {
    /// Polycyclic presentation, optionally with a sandwich normal subgroup
    Presentation {
        #[arg(long, default_value_t = 3)]
        rank: usize,
        #[arg(long, value_enum, default_value_t = KindArg::None)]
        kind: KindArg,
    },
}

struct Settings {
    verifier: VerifierConfig,
    prime: Option<u64>,
    jobs: usize,
    out: PathBuf,
}

fn parse_config(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut map = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            bail!("{}:{}: expected key=value", path.display(), n + 1);
        };
        map.insert(k.trim().to_owned(), v.trim().to_owned());
    }
    Ok(map)
}

fn settings(cli: &Cli) -> Result<Settings> {
    let file = match &cli.config {
        Some(p) => parse_config(p)?,
        None => BTreeMap::new(),
    };
    let num = |key: &str| -> Result<Option<u64>> {
        file.get(key).map(|v| v.parse::<u64>().with_context(|| format!("config {key}={v}"))).transpose()
    };
    let mut v = VerifierConfig::default();
    for key in file.keys() {
        const KNOWN: &[&str] = &["cap", "ball", "closure_ball", "degree", "prime", "jobs", "out", "mode", "budget_secs", "seed"];
        if !KNOWN.contains(&key.as_str()) {
            bail!("unknown config key {key:?}");
        }
    }
    if let Some(x) = cli.cap.map(|c| c as u64).or(num("cap")?) {
        v.class_cap = x as usize;
    }
    if let Some(x) = cli.ball.map(|c| c as u64).or(num("ball")?) {
        v.max_radius = x as usize;
    }
    if let Some(x) = num("closure_ball")? {
        v.closure_radius = x as usize;
    }
    if let Some(x) = cli.degree.map(|c| c as u64).or(num("degree")?) {
        v.lie_degree = x as usize;
    }
    if let Some(x) = num("budget_secs")? {
        v.budget = Some(Duration::from_secs(x));
    }
    if let Some(x) = num("seed")? {
        v.seed = x;
    }
    if let Some(m) = file.get("mode") {
        v.mode = match m.as_str() {
            "full" => RelatorMode::Full,
            "minimal" => RelatorMode::Minimal,
            other => bail!("config mode={other}: expected full or minimal"),
        };
    }
    let prime = cli.prime.or(num("prime")?);
    let jobs = cli.jobs.or(num("jobs")?.map(|j| j as usize)).unwrap_or(1);
    let out = cli.out.clone().or(file.get("out").map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("certificates"));

    if !(2..=MAX_CLASS).contains(&v.class_cap) {
        bail!("--cap {} outside 2..={MAX_CLASS}", v.class_cap);
    }
    if v.max_radius == 0 || v.max_radius > MAX_BALL || v.closure_radius > MAX_BALL {
        bail!("ball radius outside 1..={MAX_BALL}");
    }
    if !(4..=MAX_DEGREE).contains(&v.lie_degree) {
        bail!("--degree {} outside 4..={MAX_DEGREE}", v.lie_degree);
    }
    if let Some(p) = prime {
        if !is_prime(p) {
            bail!("--prime {p} is not prime");
        }
    }
    if jobs == 0 {
        bail!("--jobs must be positive");
    }
    Ok(Settings { verifier: v, prime, jobs, out })
}

/// Writes through a temporary file in the same directory, then renames.
fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let tmp = dir.join(format!(".{}.tmp", path.file_name().and_then(|n| n.to_str()).unwrap_or("out")));
    fs::write(&tmp, contents).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming to {}", path.display()))?;
    Ok(())
}

fn exit_for(certs: &[Certificate]) -> u8 {
    if certs.iter().any(|c| c.status == Status::Refuted) {
        EXIT_REFUTED
    } else if certs.iter().any(|c| c.status == Status::InconclusiveAtCap) {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_VERIFIED
    }
}

fn certify(ids: &[String], s: &Settings) -> Result<u8> {
    let all = ids.iter().any(|i| i == "all");
    let wanted: Vec<&str> = if all { Vec::new() } else { ids.iter().map(String::as_str).collect() };
    let certs = certify_claims(&wanted, &s.verifier, s.jobs)?;
    let mut summary = String::new();
    let mut index = Vec::new();
    for c in &certs {
        let file = format!("{}.json", c.claim_id);
        write_atomic(&s.out.join(&file), &c.to_json())?;
        summary += &format!("{:<28} {:<20} {:>8} ms  {}\n", c.claim_id, c.status.to_string(), c.duration_ms, c.reference);
        index.push(json!({"claim_id": c.claim_id, "status": c.status, "reference": c.reference, "file": file}));
    }
    write_atomic(&s.out.join("summary.txt"), &summary)?;
    let mut idx = serde_json::to_string_pretty(&json!({"certificates": index}))?;
    idx.push('\n');
    write_atomic(&s.out.join("index.json"), &idx)?;
    print!("{summary}");
    Ok(exit_for(&certs))
}

fn lie(cmd: &LieCommand, s: &Settings) -> Result<u8> {
    match cmd {
        LieCommand::Example => {
            let ex = build_gf2_example(s.verifier.lie_degree)?;
            println!("dims {:?}", ex.dims());
            let vanish = ex.defining_relations().iter().all(|(_, v)| v.is_zero());
            println!("defining relations vanish: {vanish}");
            let mut ok = vanish;
            for n in 0..=(ex.cap() - 1) / 2 {
                let (_, nonzero) = nonnilpotence_witness(&ex, n)?;
                println!("c(ab)^{n} nonzero: {nonzero}");
                ok &= nonzero;
            }
            Ok(if ok { EXIT_VERIFIED } else { EXIT_REFUTED })
        }
        LieCommand::Oddchar => {
            let primes = match s.prime {
                Some(p) => vec![p],
                None => vec![2, 3, 5],
            };
            let mut ok = true;
            for p in primes {
                let member = odd_char_check(p)?;
                println!("p = {p}: axya in ideal: {member}");
                ok &= member == (p % 2 == 1);
            }
            Ok(if ok { EXIT_VERIFIED } else { EXIT_REFUTED })
        }
    }
}

fn words(cmd: &WordsCommand) -> Result<u8> {
    match cmd {
        WordsCommand::Avoid { rank, length_cap } => {
            let r = longest_avoiding_capped(*rank, *length_cap)?;
            println!("rank {}: longest avoiding length {}", r.rank, r.bound);
            println!("witness {}", r.witness);
            println!("exhaustive {}  cross-checked {}", r.exhaustive, r.cross_checked);
            Ok(if r.exhaustive { EXIT_VERIFIED } else { EXIT_INCONCLUSIVE })
        }
        WordsCommand::Standard { word } => {
            let w: Word = word.parse()?;
            let standard = is_standard(&w);
            println!("word {w}  standard {standard}");
            println!("com {}", com(&w));
            if standard && w.len() >= 2 {
                let (a, b) = standard_decomposition(&w)?;
                println!("decomposition {a} | {b}");
            }
            if standard {
                println!("bracketing {}", bracketing(&w)?);
            }
            match find_forbidden(&w) {
                Some(m) => println!("forbidden {} at {} with c = {}", m.pattern, m.position, m.c),
                None => println!("forbidden none"),
            }
            Ok(EXIT_VERIFIED)
        }
    }
}

fn sandwich_quotient(rank: usize, kind: Option<SandwichKind>, s: &Settings) -> Result<QuotientPresentation> {
    if !(1..=MAX_RANK).contains(&rank) {
        bail!("--rank {rank} outside 1..={MAX_RANK}");
    }
    let pres = free_nilpotent(rank, s.verifier.class_cap)?;
    let Some(kind) = kind else {
        return Ok(QuotientPresentation::new(&pres, &[])?);
    };
    let family = SandwichFamily::on_generators(&pres, kind)?;
    let n = sandwich_normal_subgroup(&family, InstantiationBall::new(s.verifier.max_radius), s.verifier.mode, None)?;
    Ok(QuotientPresentation::from_normal(n))
}

fn group(cmd: &GroupCommand, s: &Settings) -> Result<u8> {
    let GroupCommand::Class { rank, kind } = cmd;
    let q = sandwich_quotient(*rank, kind.kind(), s)?;
    for (w, layer) in q.lower_central_series().iter().enumerate() {
        println!("γ{}/γ{}: {}", w + 1, w + 2, layer);
    }
    println!("class {}", q.class());
    Ok(EXIT_VERIFIED)
}

fn dump(cmd: &DumpCommand, s: &Settings) -> Result<u8> {
    let DumpCommand::Presentation { rank, kind } = cmd;
    let q = sandwich_quotient(*rank, kind.kind(), s)?;
    let text = if kind.kind().is_some() { q.dump() } else { q.parent().dump() };
    print!("{text}");
    Ok(EXIT_VERIFIED)
}

fn run(cli: Cli) -> Result<u8> {
    let s = settings(&cli)?;
    match &cli.command {
        Command::Certify { ids } => certify(ids, &s),
        Command::Claims => {
            for (id, statement) in CLAIMS {
                println!("{id:<28} {statement}");
            }
            Ok(EXIT_VERIFIED)
        }
        Command::Lie { command } => lie(command, &s),
        Command::Words { command } => words(command),
        Command::Group { command } => group(command, &s),
        Command::Dump { command } => dump(command, &s),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_VERIFIED };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
