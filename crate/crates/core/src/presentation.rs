//! Finitely presented groups, peripheral decoration and substitution maps.

use crate::error::{Error, Result};
use crate::word::Word;

/// Meridian and longitude words of a knot exterior.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Peripheral {
    pub meridian: Word,
    pub longitude: Word,
}

/// `< generators | relators >`, optionally with peripheral words.
///
/// Relators are stored cyclically reduced; identity relators are dropped.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Presentation {
    generators: Vec<String>,
    relators: Vec<Word>,
    peripheral: Option<Peripheral>,
}

pub(crate) fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Presentation {
    pub fn new<S: Into<String>>(generators: Vec<S>, relators: Vec<Word>) -> Result<Self> {
        let generators: Vec<String> = generators.into_iter().map(Into::into).collect();
        if generators.is_empty() {
            return Err(Error::EmptyGeneratorList);
        }
        for (i, g) in generators.iter().enumerate() {
            if !valid_name(g) {
                return Err(Error::BadGeneratorName(g.clone()));
            }
            if generators[..i].contains(g) {
                return Err(Error::DuplicateGenerator(g.clone()));
            }
        }
        let mut p = Presentation {
            generators,
            relators: Vec::new(),
            peripheral: None,
        };
        for r in relators {
            p.check_word(&r)?;
            let (core, _) = r.cyclically_reduce();
            if !core.is_identity() {
                p.relators.push(core);
            }
        }
        Ok(p)
    }

    pub fn with_peripheral(mut self, meridian: Word, longitude: Word) -> Result<Self> {
        if meridian.is_identity() || longitude.is_identity() {
            return Err(Error::EmptyPeripheral);
        }
        self.check_word(&meridian)?;
        self.check_word(&longitude)?;
        self.peripheral = Some(Peripheral {
            meridian,
            longitude,
        });
        Ok(self)
    }

    pub fn without_peripheral(&self) -> Self {
        Presentation {
            peripheral: None,
            ..self.clone()
        }
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn peripheral(&self) -> Option<&Peripheral> {
        self.peripheral.as_ref()
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g == name)
    }

    /// The word consisting of the named generator.
    pub fn gen(&self, name: &str) -> Word {
        Word::generator(
            self.generator_index(name)
                .unwrap_or_else(|| panic!("no generator named {name}")),
        )
    }

    /// Fails when `w` mentions a generator outside this table.
    pub fn check_word(&self, w: &Word) -> Result<()> {
        match w.max_generator() {
            Some(i) if i >= self.generators.len() => Err(Error::GeneratorOutOfRange {
                index: i,
                count: self.generators.len(),
            }),
            _ => Ok(()),
        }
    }

    /// A copy with the extra relators appended (peripheral data kept).
    pub fn with_relators(&self, extra: impl IntoIterator<Item = Word>) -> Result<Self> {
        let mut p = self.clone();
        for r in extra {
            p.check_word(&r)?;
            let (core, _) = r.cyclically_reduce();
            if !core.is_identity() {
                p.relators.push(core);
            }
        }
        Ok(p)
    }

    /// Total number of letters over all relators.
    pub fn total_length(&self) -> usize {
        self.relators.iter().map(Word::len).sum()
    }

    pub(crate) fn from_parts_unchecked(
        generators: Vec<String>,
        relators: Vec<Word>,
        peripheral: Option<Peripheral>,
    ) -> Self {
        Presentation {
            generators,
            relators,
            peripheral,
        }
    }
}

/// A substitution `generator -> word` from a source presentation into a
/// target generator table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorMap {
    source: Presentation,
    target_generators: usize,
    images: Vec<Word>,
}

impl GeneratorMap {
    pub fn new(source: Presentation, target_generators: usize, images: Vec<Word>) -> Result<Self> {
        if images.len() != source.num_generators() {
            return Err(Error::MapArity {
                images: images.len(),
                generators: source.num_generators(),
            });
        }
        for w in &images {
            if let Some(i) = w.max_generator() {
                if i >= target_generators {
                    return Err(Error::GeneratorOutOfRange {
                        index: i,
                        count: target_generators,
                    });
                }
            }
        }
        Ok(GeneratorMap {
            source,
            target_generators,
            images,
        })
    }

    pub fn identity(source: &Presentation) -> Self {
        let n = source.num_generators();
        GeneratorMap {
            source: source.clone(),
            target_generators: n,
            images: (0..n).map(Word::generator).collect(),
        }
    }

    pub fn source(&self) -> &Presentation {
        &self.source
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn target_generators(&self) -> usize {
        self.target_generators
    }

    /// Image of `w`, freely reduced. Multiplicative by construction.
    pub fn evaluate(&self, w: &Word) -> Result<Word> {
        self.source.check_word(w)?;
        let mut out = Word::identity();
        for s in w.syllables() {
            out = out.multiply(&self.images[s.gen].pow(s.exp));
        }
        Ok(out)
    }

    /// `self` followed by `next`; `next` must have this map's target as source.
    pub fn then(&self, next: &GeneratorMap) -> Result<GeneratorMap> {
        if next.source.num_generators() != self.target_generators {
            return Err(Error::MapArity {
                images: next.source.num_generators(),
                generators: self.target_generators,
            });
        }
        let images = self
            .images
            .iter()
            .map(|w| next.evaluate(w))
            .collect::<Result<Vec<_>>>()?;
        GeneratorMap::new(self.source.clone(), next.target_generators, images)
    }
}

/// Three-valued answer of a triviality oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Triviality {
    Trivial,
    Nontrivial,
    Unknown,
}

/// Decides or semi-decides whether a word is trivial in some fixed group.
/// Implementations must be sound: `Trivial` and `Nontrivial` are claims.
pub trait TrivialityOracle {
    fn decide(&self, w: &Word) -> Triviality;
}

/// Free reduction: sound for a presentation with no relators.
#[derive(Debug, Clone, Copy, Default)]
pub struct FreeGroupOracle;

impl TrivialityOracle for FreeGroupOracle {
    fn decide(&self, w: &Word) -> Triviality {
        if w.is_identity() {
            Triviality::Trivial
        } else {
            Triviality::Nontrivial
        }
    }
}

impl FreeGroupOracle {
    /// Only presentations without relators are free on their generators.
    pub fn for_presentation(p: &Presentation) -> Option<Self> {
        p.relators().is_empty().then_some(FreeGroupOracle)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapVerdict {
    /// Every source relator maps to a certified-trivial word.
    Certified,
    /// The oracle certified that the image of this source relator is nontrivial.
    Refuted { relator: usize },
    Unknown,
}

/// Checks that every relator of `f.source()` maps to the identity of the
/// target group, as judged by `oracle`.
pub fn check_map_is_homomorphism(f: &GeneratorMap, oracle: &dyn TrivialityOracle) -> MapVerdict {
    let mut unknown = false;
    for (i, r) in f.source().relators().iter().enumerate() {
        let image = match f.evaluate(r) {
            Ok(w) => w,
            Err(_) => return MapVerdict::Unknown,
        };
        match oracle.decide(&image) {
            Triviality::Trivial => {}
            Triviality::Nontrivial => return MapVerdict::Refuted { relator: i },
            Triviality::Unknown => unknown = true,
        }
    }
    if unknown {
        MapVerdict::Unknown
    } else {
        MapVerdict::Certified
    }
}
