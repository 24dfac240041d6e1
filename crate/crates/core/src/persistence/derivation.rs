//! Consequence derivations: explicit expressions of a word as a product of
//! conjugates of relators, checkable by free reduction alone.

use crate::presentation::Presentation;
use crate::word::{Letter, Word};

/// One factor `conjugator * r^exp * conjugator^-1`, `r` a relator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factor {
    pub relator: usize,
    pub exp: i64,
    pub conjugator: Word,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Derivation {
    pub factors: Vec<Factor>,
}

impl Derivation {
    /// The free product of the factors, or `None` if a relator index is out
    /// of range.
    pub fn product(&self, p: &Presentation) -> Option<Word> {
        let mut acc = Word::identity();
        for f in &self.factors {
            let r = p.relators().get(f.relator)?;
            acc = acc.multiply(&r.pow(f.exp).conjugate_by(&f.conjugator));
        }
        Some(acc)
    }
}

struct Piece {
    relator: usize,
    exp: i64,
    /// Rotation offset into `r^exp`.
    shift: usize,
    letters: Vec<Letter>,
}

fn pieces(p: &Presentation) -> Vec<Piece> {
    let mut out = Vec::new();
    for (i, r) in p.relators().iter().enumerate() {
        for exp in [1, -1] {
            let letters: Vec<Letter> = r.pow(exp).letters().collect();
            for shift in 0..letters.len() {
                let rot = letters[shift..].iter().chain(&letters[..shift]).copied().collect();
                out.push(Piece {
                    relator: i,
                    exp,
                    shift,
                    letters: rot,
                });
            }
        }
    }
    out
}

/// Greedy Dehn-style search: repeatedly replace a subword that is more than
/// half of a cyclic conjugate of a relator (or its inverse) by the inverse of
/// the complement, recording the conjugate used. Succeeds if the word is
/// reduced to the identity within `max_steps` replacements.
pub fn find_derivation(w: &Word, p: &Presentation, max_steps: usize) -> Option<Derivation> {
    let pieces = pieces(p);
    // Invariant: w = (product of factors) * outer * cur * outer^-1.
    let mut factors = Vec::new();
    let mut outer = Word::identity();
    let mut cur = w.clone();
    for _ in 0..max_steps {
        if cur.is_identity() {
            let d = Derivation { factors };
            debug_assert_eq!(d.product(p).as_ref(), Some(w));
            return Some(d);
        }
        // Triviality is a conjugacy invariant: work with the cyclic core.
        let (core, conj) = cur.cyclically_reduce();
        outer = outer.multiply(&conj);
        cur = core;
        let letters: Vec<Letter> = cur.letters().collect();
        let n = letters.len();
        let mut best: Option<(usize, usize, &Piece)> = None;
        for piece in &pieces {
            let len = piece.letters.len();
            let min_k = len / 2 + 1;
            for k in (min_k..=len.min(n)).rev() {
                if best.is_some_and(|(_, bk, _)| bk >= k) {
                    break;
                }
                let found = (0..n).find(|&start| (0..k).all(|j| letters[(start + j) % n] == piece.letters[j]));
                if let Some(start) = found {
                    best = Some((start, k, piece));
                    break;
                }
            }
        }
        let (start, k, piece) = best?;
        // Rotate so the match starts at 0: cur = x y, y x = x^-1 cur x.
        let x = Word::from_letters(letters[..start].iter().copied());
        outer = outer.multiply(&x);
        let rotated: Vec<Letter> = letters[start..].iter().chain(&letters[..start]).copied().collect();
        // rotated = P v with P Q = s^-1 r^e s, s the first `shift` letters of r^e.
        let r_e: Vec<Letter> = p.relators()[piece.relator].pow(piece.exp).letters().collect();
        let s = Word::from_letters(r_e[..piece.shift].iter().copied());
        factors.push(Factor {
            relator: piece.relator,
            exp: piece.exp,
            conjugator: outer.multiply(&s.inverse()),
        });
        let q_inv = piece.letters[k..].iter().rev().map(|l| l.inv());
        cur = Word::from_letters(q_inv.chain(rotated[k..].iter().copied()));
    }
    None
}
