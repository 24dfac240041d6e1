//! Freely reduced words in run-length (syllable) form.

use std::fmt;

/// One run `gen^exp` of a word. The exponent is never zero inside a [`Word`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Syllable {
    pub gen: usize,
    pub exp: i64,
}

impl Syllable {
    pub fn new(gen: usize, exp: i64) -> Self {
        Syllable { gen, exp }
    }
}

/// A single letter `gen^{±1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter {
    pub gen: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn inv(self) -> Letter {
        Letter {
            gen: self.gen,
            inverse: !self.inverse,
        }
    }

    /// Column index used by coset tables: `2*gen` for the generator and
    /// `2*gen + 1` for its inverse.
    pub fn column(self) -> usize {
        2 * self.gen + self.inverse as usize
    }

    pub fn from_column(col: usize) -> Letter {
        Letter {
            gen: col / 2,
            inverse: col % 2 == 1,
        }
    }
}

/// An element of a free group, kept freely reduced: adjacent syllables have
/// distinct generators and no exponent is zero. The empty word is the identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Word {
    syllables: Vec<Syllable>,
}

impl Word {
    pub fn identity() -> Self {
        Word::default()
    }

    pub fn generator(gen: usize) -> Self {
        Word::power_of(gen, 1)
    }

    /// `gen^exp`, the identity when `exp == 0`.
    pub fn power_of(gen: usize, exp: i64) -> Self {
        if exp == 0 {
            Word::identity()
        } else {
            Word {
                syllables: vec![Syllable { gen, exp }],
            }
        }
    }

    /// Freely reduces an arbitrary sequence of `(generator, exponent)` pairs.
    pub fn free_reduce<I>(raw: I) -> Self
    where
        I: IntoIterator<Item = (usize, i64)>,
    {
        let mut out: Vec<Syllable> = Vec::new();
        for (gen, exp) in raw {
            push_syllable(&mut out, Syllable { gen, exp });
        }
        Word { syllables: out }
    }

    pub fn from_letters<I>(letters: I) -> Self
    where
        I: IntoIterator<Item = Letter>,
    {
        Word::free_reduce(
            letters
                .into_iter()
                .map(|l| (l.gen, if l.inverse { -1 } else { 1 })),
        )
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.syllables
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }

    /// Number of letters, i.e. the sum of absolute exponents.
    pub fn len(&self) -> usize {
        self.syllables.iter().map(|s| s.exp.unsigned_abs() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn letters(&self) -> impl DoubleEndedIterator<Item = Letter> + Clone + '_ {
        self.syllables.iter().flat_map(|s| {
            let inverse = s.exp < 0;
            std::iter::repeat_n(Letter { gen: s.gen, inverse }, s.exp.unsigned_abs() as usize)
        })
    }

    pub fn columns(&self) -> Vec<usize> {
        self.letters().map(Letter::column).collect()
    }

    /// Largest generator index used, if any.
    pub fn max_generator(&self) -> Option<usize> {
        self.syllables.iter().map(|s| s.gen).max()
    }

    pub fn exponent_sum(&self, gen: usize) -> i64 {
        self.syllables
            .iter()
            .filter(|s| s.gen == gen)
            .map(|s| s.exp)
            .sum()
    }

    pub fn multiply(&self, other: &Word) -> Word {
        let mut out = self.syllables.clone();
        for &s in &other.syllables {
            push_syllable(&mut out, s);
        }
        Word { syllables: out }
    }

    pub fn inverse(&self) -> Word {
        Word {
            syllables: self
                .syllables
                .iter()
                .rev()
                .map(|s| Syllable {
                    gen: s.gen,
                    exp: -s.exp,
                })
                .collect(),
        }
    }

    /// `self^k` for any integer `k`; `k = 0` gives the identity.
    pub fn pow(&self, k: i64) -> Word {
        if k < 0 {
            return self.inverse().pow(-k);
        }
        let (core, conj) = self.cyclically_reduce();
        let core_power = if core.syllables.len() == 1 {
            let s = core.syllables[0];
            Word::power_of(s.gen, s.exp * k)
        } else {
            let mut acc = Word::identity();
            let mut base = core;
            let mut e = k;
            while e > 0 {
                if e & 1 == 1 {
                    acc = acc.multiply(&base);
                }
                base = base.multiply(&base);
                e >>= 1;
            }
            acc
        };
        conj.multiply(&core_power).multiply(&conj.inverse())
    }

    /// `conjugator * self * conjugator^-1`.
    pub fn conjugate_by(&self, conjugator: &Word) -> Word {
        conjugator.multiply(self).multiply(&conjugator.inverse())
    }

    /// `[u, v] = u v u^-1 v^-1`.
    pub fn commutator(u: &Word, v: &Word) -> Word {
        u.multiply(v).multiply(&u.inverse()).multiply(&v.inverse())
    }

    /// Returns `(reduced, conjugator)` with `self = conjugator * reduced * conjugator^-1`
    /// and `reduced` cyclically reduced: its first and last syllables use
    /// different generators (so every cyclic rotation is freely reduced).
    pub fn cyclically_reduce(&self) -> (Word, Word) {
        let s = &self.syllables;
        let (mut lo, mut hi) = (0usize, s.len());
        let mut conj: Vec<Syllable> = Vec::new();
        // Strip matching inverse ends.
        while hi - lo >= 2 && s[lo].gen == s[hi - 1].gen && s[lo].exp == -s[hi - 1].exp {
            conj.push(s[lo]);
            lo += 1;
            hi -= 1;
        }
        let mut core: Vec<Syllable> = s[lo..hi].to_vec();
        if core.len() >= 2 && core[0].gen == core[core.len() - 1].gen {
            // a^e1 X a^e2 = a^-e2 (a^(e1+e2) X) a^e2, and e1 + e2 != 0 here.
            let last = core.pop().unwrap();
            core[0].exp += last.exp;
            conj.push(Syllable {
                gen: last.gen,
                exp: -last.exp,
            });
        }
        let mut conj_word = Word::identity();
        for syl in conj {
            push_syllable(&mut conj_word.syllables, syl);
        }
        (Word { syllables: core }, conj_word)
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        let s = &self.syllables;
        s.len() < 2 || s[0].gen != s[s.len() - 1].gen
    }

    /// All cyclic rotations of a cyclically reduced word, letter by letter.
    pub fn rotations(&self) -> Vec<Word> {
        let letters: Vec<Letter> = self.letters().collect();
        (0..letters.len().max(1))
            .map(|i| {
                Word::from_letters(letters[i..].iter().chain(letters[..i].iter()).copied())
            })
            .collect()
    }

    /// Applies `f` to every generator index.
    pub fn map_generators(&self, mut f: impl FnMut(usize) -> usize) -> Word {
        Word::free_reduce(self.syllables.iter().map(|s| (f(s.gen), s.exp)))
    }
}

fn push_syllable(out: &mut Vec<Syllable>, s: Syllable) {
    if s.exp == 0 {
        return;
    }
    match out.last_mut() {
        Some(top) if top.gen == s.gen => {
            top.exp += s.exp;
            if top.exp == 0 {
                out.pop();
            }
        }
        _ => out.push(s),
    }
}

/// Writes `w` with generator names `g0, g1, ...`; use [`crate::textio`] for
/// named output.
impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "1");
        }
        for (i, s) in self.syllables.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            if s.exp == 1 {
                write!(f, "g{}", s.gen)?;
            } else {
                write!(f, "g{}^{}", s.gen, s.exp)?;
            }
        }
        Ok(())
    }
}
