//! Slopes and Dehn-filled quotient presentations.

use std::fmt;

use num_integer::Integer;

use crate::atlas::AtlasEntry;
use crate::error::{Error, Result};
use crate::presentation::{GeneratorMap, Presentation};
use crate::word::Word;

/// A filling slope `p/q` with `q >= 1` and `gcd(p, q) = 1`. The meridian
/// slope `1/0` is not a `Slope`; see [`fill_meridian`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Slope {
    p: i64,
    q: i64,
}

impl Slope {
    pub fn new(p: i64, q: i64) -> Result<Self> {
        if q < 1 {
            return Err(Error::InvalidSlope(format!(
                "{p}/{q}: denominator must be positive"
            )));
        }
        if p.gcd(&q) != 1 {
            return Err(Error::InvalidSlope(format!("{p}/{q} is not reduced")));
        }
        Ok(Slope { p, q })
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

/// Default scan window bounds.
pub const DEFAULT_WINDOW_P: i64 = 8;
pub const DEFAULT_WINDOW_Q: i64 = 3;

/// `{p/q : |p| <= max_p, 1 <= q <= max_q, gcd(p, q) = 1}`, ordered by `q`
/// then `p`.
pub fn window(max_p: i64, max_q: i64) -> Vec<Slope> {
    let mut out = Vec::new();
    for q in 1..=max_q.max(0) {
        for p in -max_p.abs()..=max_p.abs() {
            if let Ok(s) = Slope::new(p, q) {
                out.push(s);
            }
        }
    }
    out
}

pub fn default_window() -> Vec<Slope> {
    window(DEFAULT_WINDOW_P, DEFAULT_WINDOW_Q)
}

/// The slope element `mu^p lambda^q`.
pub fn slope_relator(presentation: &Presentation, s: Slope) -> Result<Word> {
    let per = presentation.peripheral().ok_or(Error::NoPeripheralData)?;
    Ok(per.meridian.pow(s.p).multiply(&per.longitude.pow(s.q)))
}

/// `G(K) / <<mu^p lambda^q>>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilledPresentation {
    pub knot: String,
    pub slope: Slope,
    pub presentation: Presentation,
}

impl FilledPresentation {
    pub fn filling_relator(&self) -> &Word {
        self.presentation
            .relators()
            .last()
            .expect("filled presentation has a filling relator")
    }

    /// The quotient map `G(K) -> pi_1(K(r))`, identity on generators.
    pub fn quotient_map(&self, entry: &AtlasEntry) -> GeneratorMap {
        GeneratorMap::identity(&entry.presentation)
    }
}

pub fn fill(entry: &AtlasEntry, s: Slope) -> Result<FilledPresentation> {
    let r = slope_relator(&entry.presentation, s)?;
    let mut relators = entry.presentation.relators().to_vec();
    // Kept even when it cyclically reduces to a conjugate of an existing
    // relator, so the relator count is always base + 1.
    let (core, _) = r.cyclically_reduce();
    relators.push(core);
    let presentation = Presentation::from_parts_unchecked(
        entry.presentation.generators().to_vec(),
        relators,
        entry.presentation.peripheral().cloned(),
    );
    Ok(FilledPresentation {
        knot: entry.name.clone(),
        slope: s,
        presentation,
    })
}

/// The trivial filling `1/0`: kill the meridian.
pub fn fill_meridian(entry: &AtlasEntry) -> Result<Presentation> {
    let per = entry
        .presentation
        .peripheral()
        .ok_or(Error::NoPeripheralData)?;
    entry.presentation.with_relators([per.meridian.clone()])
}
