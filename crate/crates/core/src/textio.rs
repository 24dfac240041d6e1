//! Text format for words, presentations and slopes.
//!
//! ```text
//! # figure-eight knot
//! < t, a | t*a^2*t = a*t*a^-1*t*a >
//! meridian: t
//! longitude: t*a*t^-1*a^-1*t*a^-1*t^-1*a
//! ```
//!
//! Atoms are `name`, `name^k` or `(word)^k`; `*` and whitespace both
//! separate atoms; `1` is the identity; `#` starts a comment.

use std::fmt;
use std::path::Path;

use thiserror::Error;

use crate::dehn::Slope;
use crate::presentation::Presentation;
use crate::word::Word;

/// Text together with where it came from, for error messages.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceText {
    pub text: String,
    pub origin: String,
}

impl SourceText {
    pub fn inline(text: impl Into<String>) -> Self {
        SourceText {
            text: text.into(),
            origin: "<inline>".into(),
        }
    }

    pub fn from_file(path: &Path) -> std::io::Result<Self> {
        Ok(SourceText {
            text: std::fs::read_to_string(path)?,
            origin: path.display().to_string(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),
    #[error("empty generator list")]
    EmptyGeneratorList,
    #[error("exponent out of range")]
    ExponentOverflow,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{origin}:{line}:{column}: {kind}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    /// Byte offset into the source text.
    pub position: usize,
    pub line: usize,
    pub column: usize,
    pub origin: String,
}

struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    origin: &'a str,
}

fn strip_comments(text: &str) -> String {
    // Replace comment bytes with spaces so positions stay meaningful.
    let mut out = String::with_capacity(text.len());
    let mut in_comment = false;
    for c in text.chars() {
        if c == '#' {
            in_comment = true;
        } else if c == '\n' {
            in_comment = false;
        }
        if in_comment {
            for _ in 0..c.len_utf8() {
                out.push(' ');
            }
        } else {
            out.push(c);
        }
    }
    out
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, origin: &'a str) -> Self {
        Parser {
            src,
            bytes: src.as_bytes(),
            pos: 0,
            origin,
        }
    }

    fn error_at(&self, position: usize, kind: ParseErrorKind) -> ParseError {
        let before = &self.src[..position.min(self.src.len())];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |s| s.chars().count()) + 1;
        ParseError {
            kind,
            position,
            line,
            column,
            origin: self.origin.to_string(),
        }
    }

    fn syntax(&self, msg: impl Into<String>) -> ParseError {
        self.error_at(self.pos, ParseErrorKind::Syntax(msg.into()))
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn skip_inline_ws(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t' | b'\r')) {
            self.pos += 1;
        }
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t' | b'\r' | b'\n')) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, b: u8) -> bool {
        self.skip_ws();
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, b: u8) -> Result<(), ParseError> {
        if self.eat(b) {
            Ok(())
        } else {
            Err(self.syntax(format!("expected `{}`", b as char)))
        }
    }

    fn name(&mut self) -> Option<(usize, &'a str)> {
        let start = self.pos;
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() => self.pos += 1,
            _ => return None,
        }
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
            self.pos += 1;
        }
        Some((start, &self.src[start..self.pos]))
    }

    fn integer(&mut self) -> Result<i64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        if matches!(self.peek(), Some(b'-' | b'+')) {
            self.pos += 1;
        }
        let digits = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == digits {
            self.pos = start;
            return Err(self.syntax("expected an integer"));
        }
        self.src[start..self.pos]
            .trim_start_matches('+')
            .parse::<i64>()
            .map_err(|_| self.error_at(start, ParseErrorKind::ExponentOverflow))
    }

    fn exponent(&mut self) -> Result<i64, ParseError> {
        let save = self.pos;
        self.skip_ws();
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.integer()
        } else {
            self.pos = save;
            Ok(1)
        }
    }

    fn atom(&mut self, gens: &[String]) -> Result<Option<Word>, ParseError> {
        self.skip_ws();
        let base = match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.word(gens)?;
                self.expect(b')')?;
                inner
            }
            Some(b'1') => {
                let start = self.pos;
                self.pos += 1;
                if matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
                    self.pos = start;
                    return Err(self.syntax("unexpected token"));
                }
                Word::identity()
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let (start, name) = self.name().expect("alphabetic start");
                // `name:` starts a field line, not an atom.
                let mut look = self.pos;
                while matches!(self.bytes.get(look), Some(b' ' | b'\t' | b'\r')) {
                    look += 1;
                }
                if self.bytes.get(look) == Some(&b':') {
                    self.pos = start;
                    return Ok(None);
                }
                match gens.iter().position(|g| g == name) {
                    Some(i) => Word::generator(i),
                    None => {
                        return Err(self.error_at(
                            start,
                            ParseErrorKind::UnknownGenerator(name.to_string()),
                        ))
                    }
                }
            }
            _ => return Ok(None),
        };
        let k = self.exponent()?;
        Ok(Some(base.pow(k)))
    }

    fn word(&mut self, gens: &[String]) -> Result<Word, ParseError> {
        let mut acc = match self.atom(gens)? {
            Some(w) => w,
            None => return Err(self.syntax("expected a word")),
        };
        loop {
            self.skip_ws();
            if self.peek() == Some(b'*') {
                self.pos += 1;
                match self.atom(gens)? {
                    Some(w) => acc = acc.multiply(&w),
                    None => return Err(self.syntax("expected an atom after `*`")),
                }
            } else {
                match self.atom(gens)? {
                    Some(w) => acc = acc.multiply(&w),
                    None => return Ok(acc),
                }
            }
        }
    }

    fn relation(&mut self, gens: &[String]) -> Result<Word, ParseError> {
        let lhs = self.word(gens)?;
        if self.eat(b'=') {
            let rhs = self.word(gens)?;
            Ok(lhs.multiply(&rhs.inverse()))
        } else {
            Ok(lhs)
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.bytes.len()
    }

    fn presentation(&mut self) -> Result<Presentation, ParseError> {
        self.expect(b'<')?;
        let mut gens: Vec<String> = Vec::new();
        self.skip_ws();
        if !matches!(self.peek(), Some(b'|' | b'>')) {
            loop {
                self.skip_ws();
                let (start, name) = self.name().ok_or_else(|| self.syntax("expected a generator name"))?;
                if gens.iter().any(|g| g == name) {
                    return Err(self.error_at(
                        start,
                        ParseErrorKind::DuplicateGenerator(name.to_string()),
                    ));
                }
                gens.push(name.to_string());
                if !self.eat(b',') {
                    break;
                }
            }
        }
        if gens.is_empty() {
            return Err(self.error_at(self.pos, ParseErrorKind::EmptyGeneratorList));
        }
        let mut relators = Vec::new();
        if self.eat(b'|') {
            self.skip_ws();
            if self.peek() != Some(b'>') {
                loop {
                    relators.push(self.relation(&gens)?);
                    if !self.eat(b',') {
                        break;
                    }
                }
            }
        }
        self.expect(b'>')?;
        let p = Presentation::new(gens.clone(), relators)
            .map_err(|e| self.syntax(e.to_string()))?;

        let mut meridian = None;
        let mut longitude = None;
        while !self.at_end() {
            let (start, key) = self.name().ok_or_else(|| self.syntax("expected `meridian:` or `longitude:`"))?;
            self.skip_inline_ws();
            self.expect(b':')?;
            let w = self.word(&gens)?;
            let slot = match key {
                "meridian" => &mut meridian,
                "longitude" => &mut longitude,
                _ => {
                    return Err(self.error_at(
                        start,
                        ParseErrorKind::Syntax(format!("unknown field `{key}`")),
                    ))
                }
            };
            if slot.replace(w).is_some() {
                return Err(self.error_at(start, ParseErrorKind::Syntax(format!("repeated field `{key}`"))));
            }
        }
        match (meridian, longitude) {
            (None, None) => Ok(p),
            (Some(m), Some(l)) => p.with_peripheral(m, l).map_err(|e| self.syntax(e.to_string())),
            _ => Err(self.syntax("meridian and longitude must be given together")),
        }
    }
}

/// Parses a word over `gens`; the result is freely reduced.
pub fn parse_word(text: &str, gens: &[String]) -> Result<Word, ParseError> {
    let cleaned = strip_comments(text);
    let mut p = Parser::new(&cleaned, "<word>");
    let w = p.word(gens)?;
    if !p.at_end() {
        return Err(p.syntax("trailing input"));
    }
    Ok(w)
}

pub fn parse_presentation(src: &SourceText) -> Result<Presentation, ParseError> {
    let cleaned = strip_comments(&src.text);
    let mut p = Parser::new(&cleaned, &src.origin);
    let pres = p.presentation()?;
    if !p.at_end() {
        return Err(p.syntax("trailing input"));
    }
    Ok(pres)
}

pub fn parse_presentation_str(text: &str) -> Result<Presentation, ParseError> {
    parse_presentation(&SourceText::inline(text))
}

/// Parses `p/q` or a bare integer `p` (meaning `p/1`).
pub fn parse_slope(text: &str) -> Result<Slope, ParseError> {
    let err = |msg: String| ParseError {
        kind: ParseErrorKind::Syntax(msg),
        position: 0,
        line: 1,
        column: 1,
        origin: "<slope>".into(),
    };
    let text = text.trim();
    let (p, q) = match text.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (text, "1"),
    };
    let p: i64 = p.parse().map_err(|_| err(format!("bad numerator `{p}`")))?;
    let q: i64 = q.parse().map_err(|_| err(format!("bad denominator `{q}`")))?;
    Slope::new(p, q).map_err(|e| err(e.to_string()))
}

/// Named rendering of a word, e.g. `t^-1*a^2*t*a`.
pub fn format_word(w: &Word, gens: &[String]) -> String {
    if w.is_identity() {
        return "1".to_string();
    }
    let mut out = String::new();
    for (i, s) in w.syllables().iter().enumerate() {
        if i > 0 {
            out.push('*');
        }
        out.push_str(&gens[s.gen]);
        if s.exp != 1 {
            out.push('^');
            out.push_str(&s.exp.to_string());
        }
    }
    out
}

pub fn format_presentation(p: &Presentation) -> String {
    let gens = p.generators();
    let rels: Vec<String> = p.relators().iter().map(|r| format_word(r, gens)).collect();
    let mut out = format!("< {} | {} >\n", gens.join(", "), rels.join(", "));
    if let Some(per) = p.peripheral() {
        out.push_str(&format!("meridian: {}\n", format_word(&per.meridian, gens)));
        out.push_str(&format!("longitude: {}\n", format_word(&per.longitude, gens)));
    }
    out
}

pub fn format_slope(s: &Slope) -> String {
    format!("{}/{}", s.p(), s.q())
}

/// Values with a canonical text form.
pub trait ToText {
    fn to_text(&self) -> String;
}

impl ToText for Presentation {
    fn to_text(&self) -> String {
        format_presentation(self)
    }
}

impl ToText for Slope {
    fn to_text(&self) -> String {
        format_slope(self)
    }
}

/// A word paired with its generator table, for display.
pub struct Named<'a>(pub &'a Word, pub &'a [String]);

impl fmt::Display for Named<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_word(self.0, self.1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn example_element_parses() {
        let gens = names(&["t", "a"]);
        let g = parse_word("t^-1*(a^2*t*a)*t^2*(a^2*t*a)^-1", &gens).unwrap();
        let expected = Word::free_reduce([
            (0, -1),
            (1, 2),
            (0, 1),
            (1, 1),
            (0, 2),
            (1, -1),
            (0, -1),
            (1, -2),
        ]);
        assert_eq!(g, expected);
        assert!(parse_word("1", &gens).unwrap().is_identity());
        assert!(parse_word("t*t^-1", &gens).unwrap().is_identity());
        assert!(parse_word("a^0 t^0", &gens).unwrap().is_identity());
        assert_eq!(parse_word("t a", &gens).unwrap(), parse_word("t*a", &gens).unwrap());
    }

    #[test]
    fn word_errors_carry_positions() {
        let gens = names(&["t", "a"]);
        let e = parse_word("t*b", &gens).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownGenerator("b".into()));
        assert_eq!(e.position, 2);
        let e = parse_word("t^", &gens).unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Syntax(_)));
        assert!(parse_word("(t*a", &gens).is_err());
        assert!(parse_word("", &gens).is_err());
        assert!(parse_word("t**a", &gens).is_err());
    }

    #[test]
    fn presentations() {
        let fig8 = parse_presentation_str("< t, a | t*a^2*t = a*t*a^-1*t*a >").unwrap();
        let gens = fig8.generators().to_vec();
        assert_eq!(
            fig8.relators(),
            &[parse_word("t a^2 t a^-1 t^-1 a t^-1 a^-1", &gens).unwrap()]
        );
        let trefoil = parse_presentation_str("< x, y | x^2 = y^3 >").unwrap();
        assert_eq!(format_word(&trefoil.relators()[0], trefoil.generators()), "x^2*y^-3");
        let comp = parse_presentation_str("< c, d, t | c*t = t*c, d*t = t*d, c^3 = t^2 >").unwrap();
        assert_eq!(comp.relators().len(), 3);
        assert_eq!(format_word(&comp.relators()[2], comp.generators()), "c^3*t^-2");

        let with_comments = "# knot\n< t, a | t a^2 t = a t a^-1 t a > # relator\nmeridian: t\nlongitude: t a t^-1 a^-1\n";
        let p = parse_presentation_str(with_comments).unwrap();
        assert_eq!(p.peripheral().unwrap().meridian, Word::generator(0));

        assert_eq!(
            parse_presentation_str("< a, a | >").unwrap_err().kind,
            ParseErrorKind::DuplicateGenerator("a".into())
        );
        assert_eq!(
            parse_presentation_str("< | >").unwrap_err().kind,
            ParseErrorKind::EmptyGeneratorList
        );
        assert!(parse_presentation_str("< a | a^2").is_err());
        assert!(parse_presentation_str("< a | a^2 > meridian: a").is_err());
        assert!(parse_presentation_str("< a, b >").unwrap().relators().is_empty());
    }

    #[test]
    fn serialization() {
        let gens = names(&["t", "a"]);
        assert_eq!(format_word(&Word::identity(), &gens), "1");
        assert_eq!(format_slope(&Slope::new(-3, 2).unwrap()), "-3/2");
        assert_eq!(parse_slope("-3/2").unwrap(), Slope::new(-3, 2).unwrap());
        assert_eq!(parse_slope("5").unwrap(), Slope::new(5, 1).unwrap());
        assert!(parse_slope("1/0").is_err());
        assert!(parse_slope("2/4").is_err());
    }

    fn arb_word(ngens: usize) -> impl Strategy<Value = Word> {
        prop::collection::vec((0..ngens, -4i64..=4), 0..20).prop_map(Word::free_reduce)
    }

    proptest! {
        #![proptest_config(ProptestConfig { cases: 1000, ..ProptestConfig::default() })]

        #[test]
        fn word_round_trip(w in arb_word(4)) {
            let gens = names(&["t", "a", "b_1", "X2"]);
            prop_assert_eq!(parse_word(&format_word(&w, &gens), &gens).unwrap(), w);
        }

        #[test]
        fn presentation_round_trip(
            rels in prop::collection::vec(arb_word(3), 0..4),
            m in arb_word(3),
            l in arb_word(3),
        ) {
            let p = Presentation::new(vec!["x", "y", "z"], rels).unwrap();
            let p = if m.is_identity() || l.is_identity() { p } else { p.with_peripheral(m, l).unwrap() };
            prop_assert_eq!(parse_presentation_str(&format_presentation(&p)).unwrap(), p);
        }

        #[test]
        fn parser_never_panics(s in "\\PC*") {
            let gens = names(&["t", "a"]);
            let _ = parse_word(&s, &gens);
            let _ = parse_presentation_str(&s);
        }

        #[test]
        fn parser_total_on_grammar_bytes(s in "[ta1()*^<>|,=:0-9 \\-]{0,30}") {
            let gens = names(&["t", "a"]);
            let _ = parse_word(&s, &gens);
            let _ = parse_presentation_str(&s);
        }
    }
}
