use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use affine_caps::capset::{bound_table, build_cap, verify_cap, violation_from_witness, BoundTableRow, PointSet, ENUMERATION_LIMIT};
use affine_caps::cone::ConeCertificate;
use affine_caps::equivalence::{classify, fingerprint_collisions};
use affine_caps::json::to_canonical_pretty;
use affine_caps::progressions::enumerate_progressions;
use affine_caps::search::{
    check_pair, max_admissible_size, verify_bundle, CertificateBundle, Evidence, Maximality, SearchConfig, SearchReport,
};
use affine_caps::zp::{equation_classes, DigitSetPair, LineEquation, Prime};
use affine_caps::{render, CapError, Result};

const EXIT_OK: u8 = 0;
const EXIT_FAIL: u8 = 1;
const EXIT_ERROR: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(name = "affine-caps", version, about = "Caps in AG(n, p) from admissible digit sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Json,
    Text,
}

#[derive(Args)]
struct Common {
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Directory for written artifacts.
    #[arg(long, env = "AFFINE_CAPS_OUT")]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct PairArgs {
    #[arg(short)]
    p: u32,
    /// Digit set, comma separated.
    #[arg(short = 'D', value_delimiter = ',', required = true)]
    digits: Vec<u32>,
    /// Fixed digits, comma separated (default: all of D).
    #[arg(long = "Dprime", value_delimiter = ',')]
    fixed: Option<Vec<u32>>,
}

impl PairArgs {
    fn pair(&self) -> Result<DigitSetPair> {
        let p = Prime::new(self.p)?;
        match &self.fixed {
            Some(f) => DigitSetPair::new(p, &self.digits, f),
            None => DigitSetPair::all_fixed(p, &self.digits),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// List the progressions of D for one equation x + b·y + c·z = 0.
    Progressions {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(short)]
        b: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Decide admissibility of (D, D') and write a certificate bundle.
    Check {
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Sweep candidate sizes for the largest admissible digit set.
    Search {
        #[arg(short)]
        p: u32,
        #[arg(long, default_value_t = 2)]
        min_size: usize,
        #[arg(long)]
        max_size: Option<usize>,
        /// Wall-clock budget in seconds.
        #[arg(long)]
        seconds: Option<f64>,
        #[arg(long)]
        max_candidates: Option<u64>,
        /// Keep only affine normal forms.
        #[arg(long)]
        dedup: bool,
        /// Also minimize D' for each admissible witness.
        #[arg(long)]
        minimize: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Brute-force cap check of a point file or of S(D, D', n).
    Verify {
        #[arg(short)]
        p: u32,
        #[arg(long, conflicts_with_all = ["digits", "n"])]
        points: Option<PathBuf>,
        #[arg(short = 'D', value_delimiter = ',', requires = "n")]
        digits: Option<Vec<u32>>,
        #[arg(long = "Dprime", value_delimiter = ',')]
        fixed: Option<Vec<u32>>,
        #[arg(short)]
        n: Option<usize>,
        /// Write the enumerated point set here.
        #[arg(long)]
        export: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Bound comparison table.
    Table {
        #[arg(short, value_delimiter = ',', default_values_t = [5u32, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41])]
        p: Vec<u32>,
        /// Search budget per prime in seconds.
        #[arg(long, default_value_t = 10.0)]
        seconds: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Affine classes of digit sets read one per line from a file.
    Classify {
        #[arg(short)]
        p: u32,
        sets: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Equation classes modulo p.
    Classes {
        #[arg(short)]
        p: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Re-check a certificate bundle or search report.
    CertVerify {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

fn emit<T: Serialize>(common: &Common, value: &T, text: impl FnOnce() -> String) -> Result<()> {
    let body = match common.format {
        Format::Json => to_canonical_pretty(value)? + "\n",
        Format::Text => text(),
    };
    match std::io::stdout().lock().write_all(body.as_bytes()) {
        // A closed pipe (e.g. `| head`) is not an error for the verdict.
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => Ok(other?),
    }
}

fn write_artifact<T: Serialize>(common: &Common, name: &str, value: &T) -> Result<Option<PathBuf>> {
    let Some(dir) = &common.out else {
        return Ok(None);
    };
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, to_canonical_pretty(value)? + "\n")?;
    Ok(Some(path))
}

fn digits_tag(digits: &[u32]) -> String {
    digits.iter().map(u32::to_string).collect::<Vec<_>>().join("-")
}

fn set_workers(common: &Common) {
    if let Some(n) = common.workers {
        // Fails only if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

#[derive(Serialize)]
struct CheckOutput<'a> {
    bundle: &'a CertificateBundle,
    /// Three collinear points of S(D, D', n) derived from the witness.
    violation: Option<Violation>,
}

#[derive(Serialize)]
struct Violation {
    n: usize,
    points: [Vec<u32>; 3],
}

fn witness_violation(bundle: &CertificateBundle) -> Result<Option<Violation>> {
    for ev in &bundle.representatives {
        if let Evidence::Cone { certificate: ConeCertificate::Nontrivial { witness } } = &ev.evidence {
            let w: Vec<u64> = witness
                .iter()
                .map(|x| u64::try_from(x).map_err(|_| CapError::InstanceTooLarge("witness entry exceeds u64".into())))
                .collect::<Result<_>>()?;
            let (n, points) = violation_from_witness(&bundle.pair, ev.equation, &w)?;
            return Ok(Some(Violation { n, points }));
        }
    }
    Ok(None)
}

fn cmd_check(pair: &PairArgs, common: &Common) -> Result<u8> {
    set_workers(common);
    let pair = pair.pair()?;
    let bundle = check_pair(&pair, false);
    let violation = witness_violation(&bundle)?;
    let name = format!("check-p{}-{}.json", pair.p(), digits_tag(pair.digits()));
    let written = write_artifact(common, &name, &bundle)?;
    emit(
        common,
        &CheckOutput { bundle: &bundle, violation: violation.as_ref().map(|v| Violation { n: v.n, points: v.points.clone() }) },
        || {
            let mut s = render::bundle(&bundle);
            if let Some(v) = &violation {
                s += &format!("collinear in S(D, D', {}):\n", v.n);
                for pt in &v.points {
                    s += &format!("  {}\n", pt.iter().map(u32::to_string).collect::<Vec<_>>().join(" "));
                }
            }
            if let Some(path) = &written {
                s += &format!("certificate written to {}\n", path.display());
            }
            s
        },
    )?;
    Ok(if bundle.admissible { EXIT_OK } else { EXIT_FAIL })
}

#[allow(clippy::too_many_arguments)]
fn cmd_search(
    p: u32,
    min_size: usize,
    max_size: Option<usize>,
    seconds: Option<f64>,
    max_candidates: Option<u64>,
    dedup: bool,
    minimize: bool,
    common: &Common,
) -> Result<u8> {
    let p = Prime::new(p)?;
    let config = SearchConfig {
        seconds,
        max_candidates,
        workers: common.workers,
        dedup,
        checkpoint: common.out.as_ref().map(|d| d.join(format!("search-p{p}"))),
        minimize,
        min_size,
        max_size,
    };
    let report = max_admissible_size(p, &config)?;
    let written = write_artifact(common, &format!("report-p{p}.json"), &report)?;
    emit(common, &report, || {
        let mut s = render::report(&report);
        if let Some(path) = &written {
            s += &format!("report written to {}\n", path.display());
        }
        s
    })?;
    Ok(if report.budget_exhausted { EXIT_BUDGET } else { EXIT_OK })
}

#[derive(Serialize)]
struct VerifyOutput {
    p: u32,
    n: usize,
    points: usize,
    result: affine_caps::capset::CapCheck,
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    p: u32,
    points: Option<&Path>,
    digits: Option<&[u32]>,
    fixed: Option<&[u32]>,
    n: Option<usize>,
    export: Option<&Path>,
    common: &Common,
) -> Result<u8> {
    set_workers(common);
    let set = match (points, digits, n) {
        (Some(path), _, _) => PointSet::from_text(p, &fs::read_to_string(path)?)?,
        (None, Some(d), Some(n)) => {
            let prime = Prime::new(p)?;
            let pair = match fixed {
                Some(f) => DigitSetPair::new(prime, d, f)?,
                None => DigitSetPair::all_fixed(prime, d)?,
            };
            build_cap(&pair, n, ENUMERATION_LIMIT)?.points
        }
        _ => return Err(CapError::Precondition("give --points or -D with -n".into())),
    };
    if let Some(path) = export {
        fs::write(path, set.to_text())?;
    }
    let result = verify_cap(&set);
    let ok = result.is_ok();
    let out = VerifyOutput { p, n: set.dim(), points: set.len(), result };
    emit(common, &out, || render::cap_check(&out.result, out.points))?;
    Ok(if ok { EXIT_OK } else { EXIT_FAIL })
}

/// Admissible pairs whose checks are quick; lower bounds for primes the
/// search budget does not settle.
fn catalogue(p: u32) -> Option<(&'static [u32], &'static [u32])> {
    Some(match p {
        11 => (&[0, 1, 3, 4, 5], &[0, 1, 3]),
        17 => (&[0, 1, 2, 4, 8, 9, 13], &[0, 1, 2, 4, 8]),
        23 => (&[0, 1, 3, 4, 8, 9, 10, 12, 17], &[0, 1, 3, 4, 8, 10, 17]),
        29 => (&[0, 1, 2, 3, 4, 6, 14, 16, 22, 26], &[1, 2, 3, 4, 6, 16, 22, 26]),
        41 => (&[1, 2, 4, 5, 6, 9, 15, 16, 27, 32, 33, 35], &[1, 2, 4, 5, 6, 9, 15, 27, 32, 33]),
        _ => return None,
    })
}

#[derive(Serialize)]
struct TableEntry {
    #[serde(flatten)]
    row: BoundTableRow,
    /// Whether the search proved no larger digit set exists.
    proven: bool,
    digits: Vec<u32>,
    fixed: Vec<u32>,
}

fn cmd_table(primes: &[u32], seconds: f64, common: &Common) -> Result<u8> {
    let mut entries = Vec::new();
    let mut all_proven = true;
    for &pv in primes {
        let p = Prime::new(pv)?;
        let config =
            SearchConfig { seconds: Some(seconds), workers: common.workers, dedup: true, minimize: true, ..SearchConfig::default() };
        let report = max_admissible_size(p, &config)?;
        let proven = matches!(report.maximality, Maximality::Proven { .. });
        all_proven &= proven;
        let found = report.levels.iter().rev().find_map(|l| l.admissible.clone());
        let (mut size, mut digits, mut fixed) = match found {
            Some(e) => (e.digits.len(), e.digits.clone(), e.minimal_fixed.unwrap_or(e.digits)),
            None => (0, Vec::new(), Vec::new()),
        };
        if let Some((d, f)) = catalogue(pv) {
            if d.len() > size {
                let pair = DigitSetPair::new(p, d, f)?;
                if check_pair(&pair, true).admissible {
                    (size, digits, fixed) = (d.len(), d.to_vec(), f.to_vec());
                }
            }
        }
        entries.push(TableEntry { row: bound_table(pv, size), proven, digits, fixed });
    }
    emit(common, &entries, || {
        let rows: Vec<BoundTableRow> = entries.iter().map(|e| e.row.clone()).collect();
        let mut s = render::bound_table(&rows);
        for e in entries.iter().filter(|e| !e.proven && e.row.new_bound > 0) {
            s += &format!("p = {}: new = {} is a lower bound (maximality not established)\n", e.row.p, e.row.new_bound);
        }
        s
    })?;
    write_artifact(common, "table.json", &entries)?;
    Ok(if all_proven { EXIT_OK } else { EXIT_BUDGET })
}

fn parse_sets(text: &str) -> Result<Vec<Vec<u32>>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            l.trim_matches(|c| c == '{' || c == '}')
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<u32>().map_err(|_| CapError::Parse(format!("bad digit {s:?}"))))
                .collect()
        })
        .collect()
}

fn cmd_classify(p: u32, sets: &Path, common: &Common) -> Result<u8> {
    let p = Prime::new(p)?;
    let sets = parse_sets(&fs::read_to_string(sets)?)?;
    let classes = classify(p, &sets)?;
    for (a, b) in fingerprint_collisions(&classes) {
        eprintln!("warning: classes {a} and {b} share a fingerprint but are not affinely equivalent");
    }
    write_artifact(common, &format!("classes-p{p}.json"), &classes)?;
    emit(common, &classes, || render::classes(&classes))?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct CertVerifyOutput {
    kind: &'static str,
    ok: bool,
}

fn verify_report(report: &SearchReport) -> Result<bool> {
    for level in &report.levels {
        if let Some(entry) = &level.admissible {
            if entry.bundle.pair.digits() != entry.digits.as_slice() || !entry.bundle.admissible || !verify_bundle(&entry.bundle)? {
                return Ok(false);
            }
        }
    }
    if let Maximality::Proven { size, refutations } = &report.maximality {
        let expected = affine_caps::search::candidates(report.p, *size, report.dedup)?;
        let listed: Vec<Vec<u32>> = refutations.iter().map(|r| r.digits.clone()).collect();
        if listed != expected {
            return Ok(false);
        }
        for r in refutations {
            if !r.verify(report.p)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn cmd_cert_verify(file: &Path, common: &Common) -> Result<u8> {
    let text = fs::read_to_string(file)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let (kind, ok) = if value.get("representatives").is_some() {
        let bundle: CertificateBundle = serde_json::from_value(value)?;
        ("bundle", verify_bundle(&bundle)?)
    } else if value.get("levels").is_some() {
        let report: SearchReport = serde_json::from_value(value)?;
        ("report", verify_report(&report)?)
    } else if value.get("evidence").is_some() && value.get("equation").is_some() {
        return Err(CapError::Parse("evidence files need their pair; verify the bundle or report instead".into()));
    } else {
        return Err(CapError::Parse("not a certificate bundle or search report".into()));
    };
    let out = CertVerifyOutput { kind, ok };
    emit(common, &out, || format!("{kind}: {}\n", if ok { "ok" } else { "FAILED" }))?;
    Ok(if ok { EXIT_OK } else { EXIT_FAIL })
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Progressions { pair, b, common } => {
            let pr = pair.pair()?;
            let eq = LineEquation::new(pr.p(), b)?;
            let table = enumerate_progressions(&pr, eq);
            emit(&common, &table, || render::progressions(&table))?;
            Ok(EXIT_OK)
        }
        Command::Check { pair, common } => cmd_check(&pair, &common),
        Command::Search { p, min_size, max_size, seconds, max_candidates, dedup, minimize, common } => {
            cmd_search(p, min_size, max_size, seconds, max_candidates, dedup, minimize, &common)
        }
        Command::Verify { p, points, digits, fixed, n, export, common } => {
            cmd_verify(p, points.as_deref(), digits.as_deref(), fixed.as_deref(), n, export.as_deref(), &common)
        }
        Command::Table { p, seconds, common } => cmd_table(&p, seconds, &common),
        Command::Classify { p, sets, common } => cmd_classify(p, &sets, &common),
        Command::Classes { p, common } => {
            let partition = equation_classes(Prime::new(p)?);
            emit(&common, &partition, || render::equation_classes(&partition))?;
            Ok(EXIT_OK)
        }
        Command::CertVerify { file, common } => cmd_cert_verify(&file, &common),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
