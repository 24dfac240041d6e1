//! `fillscope`: knot groups under Dehn filling from the command line.
//!
//! Exit codes: 0 success, 1 failed verification or internal error, 2 bad
//! input, 3 inconclusive within budgets (Unknown scan verdicts, exhausted
//! enumerations).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand};
use fillscope_core::atlas::{self, AtlasEntry};
use fillscope_core::coset::{enumerate, EnumBudget};
use fillscope_core::dehn::{self, fill, Slope};
use fillscope_core::homology::{abelian_order_of_image, h1, ImageOrder};
use fillscope_core::persistence::certificate::{
    self, format_report, verify_certificate_text, verify_report, OrderCertificate, Replayed, REPORT_HEADER,
};
use fillscope_core::persistence::{bs_candidate, shrink_combine, survival_scan, ScanBudgets};
use fillscope_core::sl2::{self, Conjugacy, Peripherality};
use fillscope_core::textio::{self, format_presentation, format_word, parse_slope, parse_word, SourceText};
use fillscope_core::tietze::tietze_simplify;
use fillscope_core::{Presentation, Word};

#[derive(Parser)]
#[command(name = "fillscope", version, about = "Knot groups under Dehn filling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Built-in presentations.
    Atlas {
        #[command(subcommand)]
        action: AtlasAction,
    },
    /// Parse a presentation file and print it, optionally simplified.
    Present {
        file: PathBuf,
        #[arg(long)]
        simplify: bool,
    },
    /// Print the filled presentation for a slope.
    Fill {
        knot: String,
        #[arg(allow_hyphen_values = true)]
        slope: String,
    },
    /// First homology of the group or of a filling.
    Homology {
        knot: String,
        #[arg(long, allow_hyphen_values = true)]
        slope: Option<String>,
    },
    /// Order of the group after filling and/or killing words.
    Order {
        knot: String,
        #[arg(long, allow_hyphen_values = true)]
        kill: Vec<String>,
        #[arg(long, allow_hyphen_values = true)]
        slope: Option<String>,
        #[arg(long)]
        coset_budget: Option<usize>,
        /// Write a replayable order certificate here.
        #[arg(long)]
        cert: Option<PathBuf>,
    },
    /// The element mu^(n-m) y mu^m y^-1.
    BsCandidate {
        knot: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        #[arg(long)]
        m: i64,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
    },
    /// Per-slope survival scan with certificates.
    Scan {
        knot: String,
        #[arg(long, allow_hyphen_values = true)]
        element: String,
        /// `P,Q`: slopes p/q with |p| <= P and 1 <= q <= Q.
        #[arg(long)]
        window: Option<String>,
        #[arg(long)]
        index_budget: Option<usize>,
        #[arg(long)]
        coset_budget: Option<usize>,
        /// Directory receiving report.txt and certs/.
        #[arg(long, default_value = "fillscope-scan")]
        out: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// The word g^m h.
    Combine {
        knot: String,
        #[arg(long, allow_hyphen_values = true)]
        g: String,
        #[arg(long, allow_hyphen_values = true)]
        h: String,
        #[arg(long)]
        m: i64,
    },
    /// Trace of a word under the holonomy representation.
    Trace {
        knot: String,
        #[arg(allow_hyphen_values = true)]
        word: String,
        /// Also certify non-conjugacy against these words.
        #[arg(long, allow_hyphen_values = true)]
        against: Vec<String>,
    },
    /// Replay a scan report or a single certificate.
    Verify { path: PathBuf },
}

#[derive(Subcommand)]
enum AtlasAction {
    List,
    Show { name: String },
}

/// Bad arguments or unreadable input: exit 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct InputError(String);

/// Finished, but without a verdict: exit 3.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct Inconclusive(String);

fn input(msg: impl std::fmt::Display) -> anyhow::Error {
    InputError(msg.to_string()).into()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(out) => {
            print!("{}", out.stdout);
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = if e.is::<InputError>() {
                2
            } else if e.is::<Inconclusive>() {
                3
            } else {
                1
            };
            ExitCode::from(code)
        }
    }
}

struct Output {
    stdout: String,
    code: u8,
}

impl From<String> for Output {
    fn from(stdout: String) -> Self {
        Output { stdout, code: 0 }
    }
}

/// `FILLSCOPE_BUDGET_SCALE`, a positive rational such as `2`, `0.5` or `1/4`.
fn budget_scale() -> anyhow::Result<f64> {
    let Ok(raw) = std::env::var("FILLSCOPE_BUDGET_SCALE") else {
        return Ok(1.0);
    };
    let bad = || input(format!("FILLSCOPE_BUDGET_SCALE={raw:?} is not a positive rational"));
    let value = match raw.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| bad())?;
            let b: f64 = b.trim().parse().map_err(|_| bad())?;
            a / b
        }
        None => raw.trim().parse().map_err(|_| bad())?,
    };
    if !(value.is_finite() && value > 0.0) {
        return Err(bad());
    }
    Ok(value)
}

/// An atlas name, or a path to a `.fp` file.
fn resolve_knot(arg: &str) -> anyhow::Result<AtlasEntry> {
    if let Ok(entry) = atlas::lookup(arg) {
        return Ok(entry);
    }
    let path = Path::new(arg);
    if !path.exists() {
        return Err(input(format!("`{arg}` is neither an atlas name nor a file")));
    }
    let p = read_presentation(path)?;
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or(arg);
    atlas::custom(name, p).map_err(input)
}

fn read_presentation(path: &Path) -> anyhow::Result<Presentation> {
    let src = SourceText::from_file(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
    textio::parse_presentation(&src).map_err(input)
}

fn word(entry: &AtlasEntry, text: &str) -> anyhow::Result<Word> {
    parse_word(text, entry.presentation.generators()).map_err(input)
}

fn slope(text: &str) -> anyhow::Result<Slope> {
    parse_slope(text).map_err(input)
}

fn filled(entry: &AtlasEntry, s: Option<&str>) -> anyhow::Result<Presentation> {
    match s {
        Some(s) => Ok(fill(entry, slope(s)?).map_err(input)?.presentation),
        None => Ok(entry.presentation.clone()),
    }
}

fn parse_window(text: &str) -> anyhow::Result<Vec<Slope>> {
    let bad = || input(format!("window `{text}` must be `P,Q` with P >= 0 and Q >= 1"));
    let (p, q) = text.split_once(',').ok_or_else(bad)?;
    let p: i64 = p.trim().parse().map_err(|_| bad())?;
    let q: i64 = q.trim().parse().map_err(|_| bad())?;
    if p < 0 || q < 1 {
        return Err(bad());
    }
    Ok(dehn::window(p, q))
}

fn positive(name: &str, v: Option<usize>) -> anyhow::Result<Option<usize>> {
    match v {
        Some(0) => Err(input(format!("--{name} must be positive"))),
        v => Ok(v),
    }
}

fn run(cmd: Command) -> anyhow::Result<Output> {
    match cmd {
        Command::Atlas { action } => match action {
            AtlasAction::List => {
                let mut out = String::new();
                for e in atlas::default_entries() {
                    let _ = writeln!(out, "# {}: {}", e.name, e.provenance);
                    out.push_str(&format_presentation(&e.presentation));
                    out.push('\n');
                }
                Ok(out.into())
            }
            AtlasAction::Show { name } => {
                let e = atlas::lookup(&name).map_err(input)?;
                Ok(format!("# {}: {}\n{}", e.name, e.provenance, format_presentation(&e.presentation)).into())
            }
        },
        Command::Present { file, simplify } => {
            let p = read_presentation(&file)?;
            if !simplify {
                return Ok(format_presentation(&p).into());
            }
            let s = tietze_simplify(&p, ScanBudgets::default().tietze_effort);
            let mut out = format!("# {} Tietze moves\n", s.moves.len());
            out.push_str(&format_presentation(&s.presentation));
            Ok(out.into())
        }
        Command::Fill { knot, slope: s } => {
            let entry = resolve_knot(&knot)?;
            let f = fill(&entry, slope(&s)?).map_err(input)?;
            Ok(format!("# {} filled along {}\n{}", entry.name, f.slope, format_presentation(&f.presentation)).into())
        }
        Command::Homology { knot, slope: s } => {
            let entry = resolve_knot(&knot)?;
            Ok(format!("{}\n", h1(&filled(&entry, s.as_deref())?)).into())
        }
        Command::Order {
            knot,
            kill,
            slope: s,
            coset_budget,
            cert,
        } => {
            let entry = resolve_knot(&knot)?;
            let base = filled(&entry, s.as_deref())?;
            let extra = kill.iter().map(|k| word(&entry, k)).collect::<anyhow::Result<Vec<_>>>()?;
            let p = base.with_relators(extra).map_err(input)?.without_peripheral();
            let scale = budget_scale()?;
            let budget = match positive("coset-budget", coset_budget)? {
                Some(n) => EnumBudget::with_cosets(n),
                None => {
                    let d = EnumBudget::default();
                    EnumBudget::new(
                        ((d.max_cosets as f64 * scale).round() as usize).max(1),
                        ((d.max_deductions as f64 * scale).round() as u64).max(1),
                    )
                }
            };
            let table = enumerate(&p, &[], budget)
                .map_err(|e| Inconclusive(format!("order unknown: {e}")))?;
            let order = table.n_cosets();
            if let Some(path) = cert {
                let c = OrderCertificate {
                    presentation: p,
                    table: table.standardized(),
                };
                std::fs::write(&path, c.to_text()).with_context(|| format!("writing {}", path.display()))?;
                eprintln!("certificate: {}", path.display());
            }
            Ok(format!("{order}\n").into())
        }
        Command::BsCandidate { knot, y, m, n } => {
            let entry = resolve_knot(&knot)?;
            let y = word(&entry, &y)?;
            let c = bs_candidate(&entry, &y, m, n).map_err(input)?;
            if c.degenerate {
                eprintln!(
                    "warning: y commutes with the meridian in every quotient of index <= {}",
                    fillscope_core::persistence::DEGENERACY_INDEX
                );
            }
            let gens = entry.presentation.generators();
            let mut out = format!("{}\n", format_word(&c.word, gens));
            let order = match abelian_order_of_image(&c.word, &entry.presentation) {
                ImageOrder::Finite(k) => k.to_string(),
                ImageOrder::Infinite => "infinite".to_string(),
            };
            let _ = writeln!(out, "# order of the image in H1: {order}");
            Ok(out.into())
        }
        Command::Combine { knot, g, h, m } => {
            let entry = resolve_knot(&knot)?;
            let c = shrink_combine(&word(&entry, &g)?, &word(&entry, &h)?, m).map_err(input)?;
            Ok(format!("{}\n", format_word(&c.word, entry.presentation.generators())).into())
        }
        Command::Scan {
            knot,
            element,
            window,
            index_budget,
            coset_budget,
            out,
            jobs,
        } => scan(&knot, &element, window.as_deref(), index_budget, coset_budget, &out, jobs),
        Command::Trace { knot, word: w, against } => {
            let entry = resolve_knot(&knot)?;
            let u = word(&entry, &w)?;
            let rep = sl2::holonomy_for(&entry).map_err(input)?;
            let gens = entry.presentation.generators();
            let tr = rep.trace(&u);
            let mut out = String::new();
            let _ = writeln!(out, "trace: {:.12} {:+.12}i", tr.re, tr.im);
            let _ = writeln!(out, "relator-defect: {:.3e}", rep.max_relator_defect);
            let meridian = entry.meridian().ok_or_else(|| input("knot has no meridian"))?.clone();
            match sl2::nonperipherality_certificate(&rep, &meridian, &u) {
                Ok(c) => {
                    let verdict = match c.verdict {
                        Peripherality::NonPeripheral => "NonPeripheral",
                        Peripherality::Inconclusive => "Inconclusive",
                    };
                    let _ = writeln!(out, "peripherality: {verdict}");
                }
                Err(e) => bail!("{e}"),
            }
            for v in &against {
                let v = word(&entry, v)?;
                let c = sl2::nonconjugacy_certificate(&rep, &u, &v).map_err(|e| anyhow!("{e}"))?;
                let verdict = match c.verdict {
                    Conjugacy::Distinct => "Distinct",
                    Conjugacy::Inconclusive => "Inconclusive",
                };
                let _ = writeln!(
                    out,
                    "versus {}: {verdict} separation={:.3e} tolerance={:.0e}",
                    format_word(&v, gens),
                    c.separation,
                    c.tolerance
                );
            }
            Ok(out.into())
        }
        Command::Verify { path } => verify(&path),
    }
}

fn scan(
    knot: &str,
    element: &str,
    window: Option<&str>,
    index_budget: Option<usize>,
    coset_budget: Option<usize>,
    out: &Path,
    jobs: Option<usize>,
) -> anyhow::Result<Output> {
    let entry = resolve_knot(knot)?;
    if !entry.is_knot() {
        return Err(input(format!("{} has no peripheral data to fill along", entry.name)));
    }
    let g = word(&entry, element)?;
    if g.is_identity() {
        return Err(input("element is trivial as a free word"));
    }
    let window = match window {
        Some(w) => parse_window(w)?,
        None => dehn::default_window(),
    };
    if window.is_empty() {
        return Err(input("empty window"));
    }
    let mut budgets = ScanBudgets::default().scaled(budget_scale()?);
    if let Some(k) = positive("index-budget", index_budget)? {
        budgets.max_index = k;
    }
    if let Some(n) = positive("coset-budget", coset_budget)? {
        budgets.enumeration = EnumBudget::with_cosets(n);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(positive("jobs", jobs)?.unwrap_or(0))
        .build()?;
    let report = pool.install(|| survival_scan(&entry, &g, &window, budgets)).map_err(input)?;

    let certs = out.join("certs");
    let refs = certificate::write_certificates(&report, &certs)?;
    let refs: Vec<String> = refs.iter().map(|r| format!("certs/{r}")).collect();
    let text = format_report(&report, entry.presentation.generators(), &refs);
    let report_path = out.join("report.txt");
    std::fs::write(&report_path, &text).with_context(|| format!("writing {}", report_path.display()))?;
    eprintln!("report: {}", report_path.display());
    let code = if report.count(|v| v.is_unknown()) > 0 { 3 } else { 0 };
    Ok(Output { stdout: text, code })
}

fn verify(path: &Path) -> anyhow::Result<Output> {
    let text = std::fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
    if text.trim_start().starts_with(REPORT_HEADER) {
        let lines = verify_report(path)?;
        let mut out = String::new();
        let (mut confirmed, mut unknown) = (0, 0);
        for l in &lines {
            let status = match l.outcome {
                Replayed::Confirmed => {
                    confirmed += 1;
                    "confirmed"
                }
                Replayed::NoClaim => {
                    unknown += 1;
                    "no-claim"
                }
            };
            let _ = writeln!(out, "{} {} {status}", l.slope, l.verdict);
        }
        let _ = writeln!(out, "verified: confirmed={confirmed} no-claim={unknown}");
        return Ok(out.into());
    }
    let status = match verify_certificate_text(&text)? {
        Replayed::Confirmed => "confirmed",
        Replayed::NoClaim => "no-claim",
    };
    Ok(format!("{}: {status}\n", path.display()).into())
}
