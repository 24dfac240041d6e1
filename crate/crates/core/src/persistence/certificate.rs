//! Line-oriented certificate and report files.
//!
//! A certificate embeds the filled presentation it talks about, so it can be
//! replayed on its own; replay additionally checks that the embedded
//! presentation really is the filling it claims to be.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use thiserror::Error;

use super::derivation::{Derivation, Factor};
use super::replay::{self, ReplayError};
use super::{DeathCertificate, ScanBudgets, SlopeResult, SpentBudgets, SurvivalReport, Verdict, Witness};
use crate::atlas;
use crate::coset::CosetTable;
use crate::dehn::{fill, slope_relator, Slope};
use crate::homology::Character;
use crate::presentation::Presentation;
use crate::textio::{format_presentation, format_slope, format_word, parse_presentation_str, parse_slope, parse_word};
use crate::word::Word;

pub const CERTIFICATE_HEADER: &str = "fillscope certificate v1";
pub const REPORT_HEADER: &str = "# fillscope survival report v1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub knot: String,
    pub slope: Slope,
    pub element: Word,
    pub presentation: Presentation,
    pub verdict: Verdict,
}

#[derive(Debug, Error)]
pub enum CertificateError {
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("replay failed: {0}")]
    Replay(#[from] ReplayError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("report line {line}: {msg}")]
    Report { line: usize, msg: String },
}

fn fmt_err(line: usize, msg: impl Into<String>) -> CertificateError {
    CertificateError::Format { line, msg: msg.into() }
}

impl Certificate {
    pub fn from_result(knot: &str, element: &Word, r: &SlopeResult) -> Self {
        Certificate {
            knot: knot.to_string(),
            slope: r.slope,
            element: element.clone(),
            presentation: r.filled.clone(),
            verdict: r.verdict.clone(),
        }
    }

    pub fn to_text(&self) -> String {
        let gens = self.presentation.generators();
        let mut out = String::new();
        let _ = writeln!(out, "{CERTIFICATE_HEADER}");
        let _ = writeln!(out, "knot: {}", self.knot);
        let _ = writeln!(out, "slope: {}", format_slope(&self.slope));
        let _ = writeln!(out, "element: {}", format_word(&self.element, gens));
        let _ = writeln!(out, "verdict: {} {}", self.verdict.name(), self.verdict.kind());
        let _ = writeln!(out, "presentation:");
        out.push_str(&format_presentation(&self.presentation));
        let _ = writeln!(out, "end-presentation");
        match &self.verdict {
            Verdict::Survives(Witness::Abelian(ch)) => {
                let _ = writeln!(out, "modulus: {}", ch.modulus);
                let imgs: Vec<String> = ch.images.iter().map(BigInt::to_string).collect();
                let _ = writeln!(out, "images: {}", imgs.join(" "));
            }
            Verdict::Survives(Witness::FiniteQuotient { perms }) => {
                let _ = writeln!(out, "degree: {}", perms.first().map_or(0, Vec::len));
                for (g, perm) in perms.iter().enumerate() {
                    let row: Vec<String> = perm.iter().map(|x| (x + 1).to_string()).collect();
                    let _ = writeln!(out, "perm {}: {}", gens[g], row.join(" "));
                }
            }
            Verdict::Dies(DeathCertificate::Derivation(d)) => {
                let _ = writeln!(out, "factors: {}", d.factors.len());
                for f in &d.factors {
                    let _ = writeln!(
                        out,
                        "factor {} {} {}",
                        f.relator + 1,
                        if f.exp > 0 { "+1" } else { "-1" },
                        format_word(&f.conjugator, gens)
                    );
                }
            }
            Verdict::Dies(DeathCertificate::CosetTable(t)) => {
                let _ = writeln!(out, "order: {}", t.n_cosets());
                out.push_str(&t.dump(gens));
            }
            Verdict::Unknown(b) => {
                let _ = writeln!(out, "max-index: {}", b.max_index);
                let _ = writeln!(out, "low-index-nodes: {}", b.low_index_nodes);
                let _ = writeln!(out, "low-index-exhaustive: {}", b.low_index_exhaustive);
                let _ = writeln!(out, "max-cosets: {}", b.max_cosets);
                let _ = writeln!(out, "live-cosets: {}", b.live_cosets);
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Certificate, CertificateError> {
        let lines: Vec<&str> = text.lines().collect();
        let mut i = 0;
        let next = |i: &mut usize| -> Result<(usize, &str), CertificateError> {
            while *i < lines.len() && lines[*i].trim().is_empty() {
                *i += 1;
            }
            let l = lines.get(*i).ok_or_else(|| fmt_err(*i + 1, "unexpected end of file"))?;
            *i += 1;
            Ok((*i, l.trim()))
        };
        let field = |(n, l): (usize, &str), key: &str| -> Result<String, CertificateError> {
            l.strip_prefix(key)
                .and_then(|r| r.strip_prefix(':'))
                .map(|r| r.trim().to_string())
                .ok_or_else(|| fmt_err(n, format!("expected `{key}:`")))
        };
        let (n, head) = next(&mut i)?;
        if head != CERTIFICATE_HEADER {
            return Err(fmt_err(n, "not a fillscope certificate"));
        }
        let knot = field(next(&mut i)?, "knot")?;
        let slope_line = next(&mut i)?;
        let slope = parse_slope(&field(slope_line, "slope")?).map_err(|e| fmt_err(slope_line.0, e.to_string()))?;
        let element_line = next(&mut i)?;
        let element_text = field(element_line, "element")?;
        let verdict_line = next(&mut i)?;
        let verdict_text = field(verdict_line, "verdict")?;
        let (n, l) = next(&mut i)?;
        if l != "presentation:" {
            return Err(fmt_err(n, "expected `presentation:`"));
        }
        let start = i;
        while i < lines.len() && lines[i].trim() != "end-presentation" {
            i += 1;
        }
        if i == lines.len() {
            return Err(fmt_err(i, "missing `end-presentation`"));
        }
        let presentation = parse_presentation_str(&lines[start..i].join("\n"))
            .map_err(|e| fmt_err(start + 1, e.to_string()))?;
        i += 1;
        let gens = presentation.generators().to_vec();
        let element = parse_word(&element_text, &gens).map_err(|e| fmt_err(element_line.0, e.to_string()))?;
        let verdict = match verdict_text.as_str() {
            "Survives abelian" => {
                let modulus_line = next(&mut i)?;
                let modulus: BigInt = field(modulus_line, "modulus")?
                    .parse()
                    .map_err(|_| fmt_err(modulus_line.0, "bad modulus"))?;
                let images_line = next(&mut i)?;
                let images = field(images_line, "images")?
                    .split_whitespace()
                    .map(|x| x.parse::<BigInt>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| fmt_err(images_line.0, "bad character image"))?;
                Verdict::Survives(Witness::Abelian(Character { modulus, images }))
            }
            "Survives finite-quotient" => {
                let degree_line = next(&mut i)?;
                let degree: usize = field(degree_line, "degree")?
                    .parse()
                    .map_err(|_| fmt_err(degree_line.0, "bad degree"))?;
                let mut perms = Vec::new();
                for g in &gens {
                    let line = next(&mut i)?;
                    let row = field(line, &format!("perm {g}"))?;
                    let perm = row
                        .split_whitespace()
                        .map(|x| x.parse::<usize>().ok().filter(|&v| v >= 1).map(|v| v - 1))
                        .collect::<Option<Vec<_>>>()
                        .filter(|p| p.len() == degree)
                        .ok_or_else(|| fmt_err(line.0, "bad permutation row"))?;
                    perms.push(perm);
                }
                Verdict::Survives(Witness::FiniteQuotient { perms })
            }
            "Dies derivation" => {
                let count_line = next(&mut i)?;
                let count: usize = field(count_line, "factors")?
                    .parse()
                    .map_err(|_| fmt_err(count_line.0, "bad factor count"))?;
                let mut factors = Vec::with_capacity(count);
                for _ in 0..count {
                    let (n, l) = next(&mut i)?;
                    let mut parts = l.splitn(4, ' ');
                    let bad = || fmt_err(n, "expected `factor <relator> <+1|-1> <conjugator>`");
                    if parts.next() != Some("factor") {
                        return Err(bad());
                    }
                    let relator: usize = parts.next().and_then(|x| x.parse().ok()).filter(|&r| r >= 1).ok_or_else(bad)?;
                    let exp = match parts.next() {
                        Some("+1") => 1,
                        Some("-1") => -1,
                        _ => return Err(bad()),
                    };
                    let conjugator = parse_word(parts.next().ok_or_else(bad)?, &gens).map_err(|e| fmt_err(n, e.to_string()))?;
                    factors.push(Factor {
                        relator: relator - 1,
                        exp,
                        conjugator,
                    });
                }
                Verdict::Dies(DeathCertificate::Derivation(Derivation { factors }))
            }
            "Dies coset-table" => {
                let order_line = next(&mut i)?;
                let order: usize = field(order_line, "order")?
                    .parse()
                    .map_err(|_| fmt_err(order_line.0, "bad order"))?;
                let rest = lines[i..].join("\n");
                let table = CosetTable::parse_dump(&rest, &gens).map_err(|e| fmt_err(i + 1, e))?;
                if table.n_cosets() != order {
                    return Err(fmt_err(order_line.0, "order does not match the table"));
                }
                Verdict::Dies(DeathCertificate::CosetTable(table))
            }
            "Unknown budgets" => {
                let mut num = |key: &str| -> Result<u64, CertificateError> {
                    let line = next(&mut i)?;
                    field(line, key)?.parse().map_err(|_| fmt_err(line.0, format!("bad `{key}`")))
                };
                let max_index = num("max-index")? as usize;
                let low_index_nodes = num("low-index-nodes")?;
                let line = next(&mut i)?;
                let low_index_exhaustive = field(line, "low-index-exhaustive")? == "true";
                let mut num = |key: &str| -> Result<u64, CertificateError> {
                    let line = next(&mut i)?;
                    field(line, key)?.parse().map_err(|_| fmt_err(line.0, format!("bad `{key}`")))
                };
                Verdict::Unknown(SpentBudgets {
                    max_index,
                    low_index_nodes,
                    low_index_exhaustive,
                    max_cosets: num("max-cosets")? as usize,
                    live_cosets: num("live-cosets")? as usize,
                })
            }
            other => return Err(fmt_err(verdict_line.0, format!("unknown verdict `{other}`"))),
        };
        Ok(Certificate {
            knot,
            slope,
            element,
            presentation,
            verdict,
        })
    }
}

/// Outcome of replaying a certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Replayed {
    /// The claim re-verified.
    Confirmed,
    /// An Unknown verdict: nothing to check.
    NoClaim,
}

/// Enumeration bound for re-deriving orders in death tables.
pub const REPLAY_MAX_COSETS: usize = 4_000_000;

/// Checks that the embedded presentation is the claimed filling, then
/// replays the witness or certificate with the independent checkers.
pub fn replay_certificate(c: &Certificate) -> Result<Replayed, CertificateError> {
    let p = &c.presentation;
    let inconsistent = |m: String| CertificateError::Replay(ReplayError::Inconsistent(m));
    let expected = slope_relator(p, c.slope)
        .map_err(|e| inconsistent(format!("{e}")))?
        .cyclically_reduce()
        .0;
    if p.relators().last() != Some(&expected) {
        return Err(inconsistent(format!(
            "last relator is not the filling relator for slope {}",
            c.slope
        )));
    }
    if let Ok(entry) = atlas::lookup(&c.knot) {
        let filled = fill(&entry, c.slope).map_err(|e| inconsistent(format!("{e}")))?;
        if &filled.presentation != p {
            return Err(inconsistent(format!(
                "presentation differs from atlas entry `{}` filled along {}",
                c.knot, c.slope
            )));
        }
    }
    match &c.verdict {
        Verdict::Survives(Witness::Abelian(ch)) => replay::replay_abelian(p, &c.element, ch)?,
        Verdict::Survives(Witness::FiniteQuotient { perms }) => replay::replay_finite_quotient(p, &c.element, perms)?,
        Verdict::Dies(DeathCertificate::Derivation(d)) => replay::replay_derivation(p, &c.element, d)?,
        Verdict::Dies(DeathCertificate::CosetTable(t)) => {
            replay::replay_death_table(p, &c.element, t, REPLAY_MAX_COSETS)?
        }
        Verdict::Unknown(_) => return Ok(Replayed::NoClaim),
    }
    Ok(Replayed::Confirmed)
}

/// File name used for a slope's certificate: `5/1` -> `slope_5_1.cert`,
/// `-3/2` -> `slope_m3_2.cert`.
pub fn certificate_file_name(s: Slope) -> String {
    let p = if s.p() < 0 {
        format!("m{}", -s.p())
    } else {
        s.p().to_string()
    };
    format!("slope_{p}_{}.cert", s.q())
}

/// Report text. `refs[i]` is the reference printed for `results[i]`.
pub fn format_report(r: &SurvivalReport, gens: &[String], refs: &[String]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{REPORT_HEADER}");
    let _ = writeln!(out, "knot: {}", r.knot);
    let _ = writeln!(out, "element: {}", format_word(&r.element, gens));
    let _ = writeln!(out, "slopes: {}", r.window.len());
    let b: &ScanBudgets = &r.budgets;
    let _ = writeln!(
        out,
        "budgets: index={} nodes-per-branch={} cosets={} deductions={}",
        b.max_index, b.low_index.max_nodes_per_branch, b.enumeration.max_cosets, b.enumeration.max_deductions
    );
    for (res, reference) in r.results.iter().zip(refs) {
        let _ = writeln!(
            out,
            "{} {} {} {}",
            format_slope(&res.slope),
            res.verdict.name(),
            res.verdict.kind(),
            reference
        );
    }
    let _ = writeln!(
        out,
        "summary: survives={} dies={} unknown={}",
        r.count(Verdict::is_survives),
        r.count(Verdict::is_dies),
        r.count(Verdict::is_unknown)
    );
    out
}

/// Writes one certificate per slope into `dir` and returns the report text
/// with references relative to `dir`'s parent-independent names.
pub fn write_certificates(r: &SurvivalReport, dir: &Path) -> Result<Vec<String>, CertificateError> {
    std::fs::create_dir_all(dir).map_err(|source| CertificateError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut refs = Vec::new();
    for res in &r.results {
        let name = certificate_file_name(res.slope);
        let path = dir.join(&name);
        let cert = Certificate::from_result(&r.knot, &r.element, res);
        std::fs::write(&path, cert.to_text()).map_err(|source| CertificateError::Io { path, source })?;
        refs.push(name);
    }
    Ok(refs)
}

/// One replayed report line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifiedLine {
    pub slope: Slope,
    pub verdict: String,
    pub outcome: Replayed,
}

/// Replays every certificate referenced by the report at `path`
/// (references are resolved relative to the report's directory) and checks
/// that each certificate agrees with its report line.
pub fn verify_report(path: &Path) -> Result<Vec<VerifiedLine>, CertificateError> {
    let io = |source| CertificateError::Io {
        path: path.to_path_buf(),
        source,
    };
    let text = std::fs::read_to_string(path).map_err(io)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut knot = None;
    let mut element_text = None;
    let mut out = Vec::new();
    let mut saw_header = false;
    let mut summary = None;
    for (n, line) in text.lines().enumerate() {
        let n = n + 1;
        let line = line.trim();
        let bad = |msg: &str| CertificateError::Report { line: n, msg: msg.to_string() };
        if line.is_empty() {
            continue;
        }
        if line == REPORT_HEADER {
            saw_header = true;
            continue;
        }
        if let Some(k) = line.strip_prefix("knot:") {
            knot = Some(k.trim().to_string());
            continue;
        }
        if let Some(e) = line.strip_prefix("element:") {
            element_text = Some(e.trim().to_string());
            continue;
        }
        if line.starts_with("slopes:") || line.starts_with("budgets:") || line.starts_with('#') {
            continue;
        }
        if let Some(s) = line.strip_prefix("summary:") {
            summary = Some(s.trim().to_string());
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(bad("expected `<slope> <verdict> <kind> <reference>`"));
        }
        let slope = parse_slope(fields[0]).map_err(|e| bad(&e.to_string()))?;
        let cert_path = base.join(fields[3]);
        let cert_text = std::fs::read_to_string(&cert_path).map_err(|source| CertificateError::Io {
            path: cert_path.clone(),
            source,
        })?;
        let cert = Certificate::parse(&cert_text)?;
        if cert.slope != slope || cert.verdict.name() != fields[1] || cert.verdict.kind() != fields[2] {
            return Err(bad("certificate does not match the report line"));
        }
        if knot.as_deref() != Some(cert.knot.as_str()) {
            return Err(bad("certificate is for a different knot"));
        }
        let gens = cert.presentation.generators().to_vec();
        let claimed = element_text
            .as_deref()
            .ok_or_else(|| bad("report has no `element:` line"))
            .and_then(|e| parse_word(e, &gens).map_err(|e| bad(&e.to_string())))?;
        if claimed != cert.element {
            return Err(bad("certificate is for a different element"));
        }
        let outcome = replay_certificate(&cert)?;
        out.push(VerifiedLine {
            slope,
            verdict: fields[1].to_string(),
            outcome,
        });
    }
    if !saw_header {
        return Err(CertificateError::Report {
            line: 1,
            msg: "not a fillscope report".into(),
        });
    }
    let counted = |v: &str| out.iter().filter(|l| l.verdict == v).count();
    let expected = format!(
        "survives={} dies={} unknown={}",
        counted("Survives"),
        counted("Dies"),
        counted("Unknown")
    );
    if summary.as_deref() != Some(expected.as_str()) {
        return Err(CertificateError::Report {
            line: text.lines().count(),
            msg: format!("summary does not match the lines ({expected})"),
        });
    }
    Ok(out)
}

pub const ORDER_HEADER: &str = "fillscope order certificate v1";

/// A group order claim: the regular table of the presented group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderCertificate {
    pub presentation: Presentation,
    pub table: CosetTable,
}

impl OrderCertificate {
    pub fn order(&self) -> usize {
        self.table.n_cosets()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{ORDER_HEADER}");
        let _ = writeln!(out, "order: {}", self.order());
        let _ = writeln!(out, "presentation:");
        out.push_str(&format_presentation(&self.presentation));
        let _ = writeln!(out, "end-presentation");
        out.push_str(&self.table.dump(self.presentation.generators()));
        out
    }

    pub fn parse(text: &str) -> Result<OrderCertificate, CertificateError> {
        let lines: Vec<&str> = text.lines().collect();
        let at = |i: usize| lines.get(i).map_or("", |l| l.trim());
        if at(0) != ORDER_HEADER {
            return Err(fmt_err(1, "not a fillscope order certificate"));
        }
        let order: usize = at(1)
            .strip_prefix("order:")
            .and_then(|x| x.trim().parse().ok())
            .ok_or_else(|| fmt_err(2, "expected `order: <n>`"))?;
        if at(2) != "presentation:" {
            return Err(fmt_err(3, "expected `presentation:`"));
        }
        let end = (3..lines.len())
            .find(|&i| at(i) == "end-presentation")
            .ok_or_else(|| fmt_err(lines.len(), "missing `end-presentation`"))?;
        let presentation =
            parse_presentation_str(&lines[3..end].join("\n")).map_err(|e| fmt_err(4, e.to_string()))?;
        let table = CosetTable::parse_dump(&lines[end + 1..].join("\n"), presentation.generators())
            .map_err(|e| fmt_err(end + 2, e))?;
        if table.n_cosets() != order {
            return Err(fmt_err(2, "order does not match the table"));
        }
        Ok(OrderCertificate { presentation, table })
    }

    /// The table is a transitive action satisfying every relator, and the
    /// independent enumerator finds the same order.
    pub fn replay(&self) -> Result<(), CertificateError> {
        replay::replay_death_table(&self.presentation, &Word::identity(), &self.table, REPLAY_MAX_COSETS)?;
        Ok(())
    }
}

/// Replays a single certificate file of either kind.
pub fn verify_certificate_text(text: &str) -> Result<Replayed, CertificateError> {
    if text.trim_start().starts_with(ORDER_HEADER) {
        OrderCertificate::parse(text)?.replay()?;
        Ok(Replayed::Confirmed)
    } else {
        replay_certificate(&Certificate::parse(text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dehn::slope_relator;
    use crate::persistence::{survival_scan, ScanBudgets};

    fn roundtrip_all(report: &SurvivalReport) {
        for res in &report.results {
            let c = Certificate::from_result(&report.knot, &report.element, res);
            let parsed = Certificate::parse(&c.to_text()).unwrap();
            assert_eq!(parsed, c);
            replay_certificate(&parsed).unwrap();
        }
    }

    #[test]
    fn certificates_roundtrip_and_replay() {
        let fig8 = atlas::figure_eight();
        let gens = fig8.presentation.generators().to_vec();
        let g = parse_word("t^-1*(a^2*t*a)*t^2*(a^2*t*a)^-1", &gens).unwrap();
        let slopes = [Slope::new(5, 1).unwrap(), Slope::new(-1, 1).unwrap(), Slope::new(2, 3).unwrap()];
        roundtrip_all(&survival_scan(&fig8, &g, &slopes, ScanBudgets::default()).unwrap());
        let r = slope_relator(&fig8.presentation, slopes[2]).unwrap();
        roundtrip_all(&survival_scan(&fig8, &r, &slopes[2..], ScanBudgets::default()).unwrap());
        let tiny = ScanBudgets {
            max_index: 2,
            enumeration: crate::coset::EnumBudget::with_cosets(100),
            ..ScanBudgets::default()
        };
        roundtrip_all(&survival_scan(&fig8, &g, &slopes[1..2], tiny).unwrap());
    }

    #[test]
    fn tampered_certificates_fail() {
        let fig8 = atlas::figure_eight();
        let gens = fig8.presentation.generators().to_vec();
        let g = parse_word("t^-1*(a^2*t*a)*t^2*(a^2*t*a)^-1", &gens).unwrap();
        let s = Slope::new(5, 1).unwrap();
        let rep = survival_scan(&fig8, &g, &[s], ScanBudgets::default()).unwrap();
        let text = Certificate::from_result("fig8", &g, &rep.results[0]).to_text();
        let wrong_slope = text.replace("slope: 5/1", "slope: 7/1");
        assert!(replay_certificate(&Certificate::parse(&wrong_slope).unwrap()).is_err());
        let wrong_modulus = text.replace("modulus: 5", "modulus: 7");
        assert!(replay_certificate(&Certificate::parse(&wrong_modulus).unwrap()).is_err());
        let wrong_element = text.replace("element: t^-1", "element: t^-2");
        assert!(replay_certificate(&Certificate::parse(&wrong_element).unwrap()).is_err());
    }

    #[test]
    fn order_certificates() {
        let p = parse_presentation_str("< a, b | a^2, b^3, (a b)^5 >").unwrap();
        let table = crate::coset::enumerate(&p, &[], crate::coset::EnumBudget::default()).unwrap();
        let c = OrderCertificate { presentation: p, table };
        assert_eq!(c.order(), 60);
        let text = c.to_text();
        assert_eq!(OrderCertificate::parse(&text).unwrap(), c);
        assert_eq!(verify_certificate_text(&text).unwrap(), Replayed::Confirmed);
        // Same table, weaker presentation: the order no longer matches.
        let loose = text.replace("b^3,", "b^6,");
        assert_ne!(loose, text);
        assert!(verify_certificate_text(&loose).is_err());
    }

    #[test]
    fn file_names() {
        assert_eq!(certificate_file_name(Slope::new(-3, 2).unwrap()), "slope_m3_2.cert");
        assert_eq!(certificate_file_name(Slope::new(0, 1).unwrap()), "slope_0_1.cert");
    }
}
