//! Greedy, budgeted Tietze simplification.
//!
//! Moves, tried in order until none applies or the budget is spent:
//! drop duplicate relators (up to rotation and inversion); eliminate a
//! generator that occurs exactly once in some relator; shorten a relator by
//! replacing more than half of a cyclic conjugate of another relator with
//! the inverse of the remaining part. Total relator length never increases.

use crate::presentation::{GeneratorMap, Peripheral, Presentation};
use crate::word::{Letter, Word};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TietzeMove {
    DropRelator { index: usize },
    Eliminate { generator: String, via_relator: usize },
    Shorten { target: usize, using: usize, saved: usize },
}

#[derive(Debug, Clone)]
pub struct Simplified {
    pub presentation: Presentation,
    /// Original generators -> words in the simplified generators.
    pub map: GeneratorMap,
    pub moves: Vec<TietzeMove>,
}

fn canonical_cyclic(w: &Word) -> Word {
    let mut best: Option<Word> = None;
    for cand in [w.clone(), w.inverse()] {
        for rot in cand.rotations() {
            if best.as_ref().is_none_or(|b| rot < *b) {
                best = Some(rot);
            }
        }
    }
    best.unwrap_or_default()
}

fn cyclic_core(w: &Word) -> Word {
    w.cyclically_reduce().0
}

struct State {
    names: Vec<String>,
    relators: Vec<Word>,
    peripheral: Option<Peripheral>,
    /// Images of the original generators in the current generators.
    images: Vec<Word>,
}

impl State {
    fn total(&self) -> usize {
        self.relators.iter().map(Word::len).sum()
    }

    fn drop_duplicates(&mut self, moves: &mut Vec<TietzeMove>) -> bool {
        let mut seen: Vec<Word> = Vec::new();
        for (i, r) in self.relators.iter().enumerate() {
            let key = canonical_cyclic(r);
            if r.is_identity() || seen.contains(&key) {
                self.relators.remove(i);
                moves.push(TietzeMove::DropRelator { index: i });
                return true;
            }
            seen.push(key);
        }
        false
    }

    fn try_eliminate(&mut self, moves: &mut Vec<TietzeMove>) -> bool {
        if self.names.len() <= 1 {
            return false;
        }
        let before = self.total();
        for gen in (0..self.names.len()).rev() {
            for (ri, r) in self.relators.iter().enumerate() {
                let letters: Vec<Letter> = r.letters().collect();
                let hits: Vec<usize> = (0..letters.len()).filter(|&i| letters[i].gen == gen).collect();
                if hits.len() != 1 {
                    continue;
                }
                // Rotate so the single occurrence is last: W x^e = 1.
                let k = hits[0];
                let rest = Word::from_letters(
                    letters[k + 1..].iter().chain(&letters[..k]).copied(),
                );
                let value = if letters[k].inverse { rest } else { rest.inverse() };
                let subst = |w: &Word| -> Word {
                    let mut out = Word::identity();
                    for s in w.syllables() {
                        let piece = if s.gen == gen { value.pow(s.exp) } else { Word::power_of(s.gen, s.exp) };
                        out = out.multiply(&piece);
                    }
                    out.map_generators(|g| if g > gen { g - 1 } else { g })
                };
                let new_relators: Vec<Word> = self
                    .relators
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != ri)
                    .map(|(_, w)| cyclic_core(&subst(w)))
                    .collect();
                let after: usize = new_relators.iter().map(Word::len).sum();
                if after > before {
                    continue;
                }
                let peripheral = match &self.peripheral {
                    Some(p) => {
                        let m = subst(&p.meridian);
                        let l = subst(&p.longitude);
                        if m.is_identity() || l.is_identity() {
                            continue;
                        }
                        Some(Peripheral { meridian: m, longitude: l })
                    }
                    None => None,
                };
                let name = self.names.remove(gen);
                self.images = self.images.iter().map(subst).collect();
                self.relators = new_relators.into_iter().filter(|w| !w.is_identity()).collect();
                self.peripheral = peripheral;
                moves.push(TietzeMove::Eliminate {
                    generator: name,
                    via_relator: ri,
                });
                return true;
            }
        }
        false
    }

    fn try_shorten(&mut self, moves: &mut Vec<TietzeMove>) -> bool {
        for target in 0..self.relators.len() {
            let r: Vec<Letter> = self.relators[target].letters().collect();
            if r.is_empty() {
                continue;
            }
            let doubled: Vec<Letter> = r.iter().chain(r.iter()).copied().collect();
            for using in 0..self.relators.len() {
                if using == target {
                    continue;
                }
                let s = &self.relators[using];
                let n = s.len();
                for cand in [s.clone(), s.inverse()] {
                    let letters: Vec<Letter> = cand.letters().collect();
                    for rot in 0..n {
                        let sl: Vec<Letter> = letters[rot..].iter().chain(&letters[..rot]).copied().collect();
                        for k in (n / 2 + 1..=n.min(r.len())).rev() {
                            let prefix = &sl[..k];
                            let Some(pos) = (0..r.len()).find(|&i| doubled[i..i + k] == *prefix) else {
                                continue;
                            };
                            // r ~ prefix * rest, and prefix = complement^-1.
                            let rest = doubled[pos + k..pos + r.len()].iter().copied();
                            let complement_inv = sl[k..].iter().rev().map(|l| l.inv());
                            let new = cyclic_core(&Word::from_letters(complement_inv.chain(rest)));
                            if new.len() >= r.len() {
                                continue;
                            }
                            let saved = r.len() - new.len();
                            self.relators[target] = new;
                            moves.push(TietzeMove::Shorten { target, using, saved });
                            return true;
                        }
                    }
                }
            }
        }
        false
    }
}

/// Simplifies `p` using at most `effort` moves; returns the best presentation
/// reached together with the substitution map from the original generators.
pub fn tietze_simplify(p: &Presentation, effort: usize) -> Simplified {
    let mut st = State {
        names: p.generators().to_vec(),
        relators: p.relators().to_vec(),
        peripheral: p.peripheral().cloned(),
        images: (0..p.num_generators()).map(Word::generator).collect(),
    };
    let mut moves = Vec::new();
    while moves.len() < effort {
        if st.drop_duplicates(&mut moves) || st.try_eliminate(&mut moves) || st.try_shorten(&mut moves) {
            continue;
        }
        break;
    }
    let n = st.names.len();
    let presentation = Presentation::from_parts_unchecked(st.names, st.relators, st.peripheral);
    let map = GeneratorMap::new(p.clone(), n, st.images).expect("images are over the simplified generators");
    Simplified {
        presentation,
        map,
        moves,
    }
}
