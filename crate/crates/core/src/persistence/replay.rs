//! Independent re-verification of survival witnesses and death certificates.
//!
//! Nothing here calls the discovery code: permutations are multiplied
//! directly, characters are evaluated from raw exponent sums, and group
//! orders are re-derived with the Felsch enumerator.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use thiserror::Error;

use super::derivation::Derivation;
use crate::coset::{felsch_order, CosetTable};
use crate::homology::Character;
use crate::presentation::Presentation;
use crate::word::Word;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReplayError {
    #[error("witness has {got} generator images, presentation has {want} generators")]
    Arity { got: usize, want: usize },
    #[error("character does not vanish on relator {0}")]
    CharacterNotDefined(usize),
    #[error("character vanishes on the element")]
    CharacterKillsElement,
    #[error("image of generator {0} is not a permutation")]
    NotAPermutation(usize),
    #[error("relator {0} does not act trivially")]
    RelatorNotTrivial(usize),
    #[error("element acts trivially in the quotient")]
    ElementTrivial,
    #[error("element acts nontrivially in the claimed death table")]
    ElementSurvives,
    #[error("permutation action is not transitive")]
    NotTransitive,
    #[error("independent enumeration gives order {felsch:?}, table has {table} cosets")]
    OrderMismatch { felsch: Option<usize>, table: usize },
    #[error("derivation refers to a missing relator")]
    BadRelatorIndex,
    #[error("derivation product differs from the element")]
    DerivationMismatch,
    #[error("{0}")]
    Inconsistent(String),
}

fn exponent_sums(w: &Word, n: usize) -> Vec<BigInt> {
    let mut v = vec![BigInt::zero(); n];
    for s in w.syllables() {
        v[s.gen] += s.exp;
    }
    v
}

fn character_value(ch: &Character, w: &Word) -> BigInt {
    let total = exponent_sums(w, ch.images.len())
        .iter()
        .zip(&ch.images)
        .fold(BigInt::zero(), |acc, (e, x)| acc + e * x);
    if ch.modulus.is_zero() {
        total
    } else {
        total.mod_floor(&ch.modulus)
    }
}

/// The character is a homomorphism of the presented group (vanishes on
/// every relator) and does not vanish on `element`.
pub fn replay_abelian(p: &Presentation, element: &Word, ch: &Character) -> Result<(), ReplayError> {
    if ch.images.len() != p.num_generators() {
        return Err(ReplayError::Arity {
            got: ch.images.len(),
            want: p.num_generators(),
        });
    }
    for (i, r) in p.relators().iter().enumerate() {
        if !character_value(ch, r).is_zero() {
            return Err(ReplayError::CharacterNotDefined(i));
        }
    }
    if character_value(ch, element).is_zero() {
        return Err(ReplayError::CharacterKillsElement);
    }
    Ok(())
}

fn is_permutation(perm: &[usize]) -> bool {
    let mut seen = vec![false; perm.len()];
    perm.iter().all(|&x| x < perm.len() && !std::mem::replace(&mut seen[x], true))
}

/// Image of `w` as a map `point -> point` (right action, left to right).
fn act(perms: &[Vec<usize>], inverses: &[Vec<usize>], w: &Word) -> Vec<usize> {
    let degree = perms.first().map_or(0, Vec::len);
    (0..degree)
        .map(|start| {
            let mut x = start;
            for s in w.syllables() {
                let table = if s.exp > 0 { &perms[s.gen] } else { &inverses[s.gen] };
                for _ in 0..s.exp.unsigned_abs() {
                    x = table[x];
                }
            }
            x
        })
        .collect()
}

fn check_action(p: &Presentation, perms: &[Vec<usize>]) -> Result<Vec<Vec<usize>>, ReplayError> {
    if perms.len() != p.num_generators() {
        return Err(ReplayError::Arity {
            got: perms.len(),
            want: p.num_generators(),
        });
    }
    let degree = perms.first().map_or(0, Vec::len);
    for (g, perm) in perms.iter().enumerate() {
        if perm.len() != degree || degree == 0 || !is_permutation(perm) {
            return Err(ReplayError::NotAPermutation(g));
        }
    }
    let inverses: Vec<Vec<usize>> = perms
        .iter()
        .map(|perm| {
            let mut inv = vec![0; degree];
            for (i, &x) in perm.iter().enumerate() {
                inv[x] = i;
            }
            inv
        })
        .collect();
    for (i, r) in p.relators().iter().enumerate() {
        if act(perms, &inverses, r).iter().enumerate().any(|(x, &y)| x != y) {
            return Err(ReplayError::RelatorNotTrivial(i));
        }
    }
    Ok(inverses)
}

/// The permutations satisfy every relator (so define a homomorphism to the
/// symmetric group) and `element` does not act as the identity.
pub fn replay_finite_quotient(p: &Presentation, element: &Word, perms: &[Vec<usize>]) -> Result<(), ReplayError> {
    let inverses = check_action(p, perms)?;
    if act(perms, &inverses, element).iter().enumerate().all(|(x, &y)| x == y) {
        return Err(ReplayError::ElementTrivial);
    }
    Ok(())
}

/// `element` is freely equal to the stated product of relator conjugates.
pub fn replay_derivation(p: &Presentation, element: &Word, d: &Derivation) -> Result<(), ReplayError> {
    let mut acc = Word::identity();
    for f in &d.factors {
        let r = p.relators().get(f.relator).ok_or(ReplayError::BadRelatorIndex)?;
        if f.exp != 1 && f.exp != -1 {
            return Err(ReplayError::Inconsistent(format!("factor exponent {} is not +-1", f.exp)));
        }
        let r = if f.exp == 1 { r.clone() } else { r.inverse() };
        acc = acc
            .multiply(&f.conjugator)
            .multiply(&r)
            .multiply(&f.conjugator.inverse());
    }
    if &acc != element {
        return Err(ReplayError::DerivationMismatch);
    }
    Ok(())
}

/// The table is a transitive action satisfying the relators whose degree
/// equals the group order found by an independent enumeration; such an
/// action is regular, so an element fixing every point is trivial.
pub fn replay_death_table(
    p: &Presentation,
    element: &Word,
    table: &CosetTable,
    max_cosets: usize,
) -> Result<(), ReplayError> {
    let perms: Vec<Vec<usize>> = (0..p.num_generators())
        .map(|g| table.generator_permutation(g).ok_or(ReplayError::NotAPermutation(g)))
        .collect::<Result<_, _>>()?;
    let inverses = check_action(p, &perms)?;
    let degree = perms[0].len();
    let mut seen = vec![false; degree];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(x) = stack.pop() {
        for perm in perms.iter().chain(&inverses) {
            if !std::mem::replace(&mut seen[perm[x]], true) {
                stack.push(perm[x]);
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(ReplayError::NotTransitive);
    }
    let felsch = felsch_order(p, max_cosets.max(degree * 4));
    if felsch != Some(degree) {
        return Err(ReplayError::OrderMismatch { felsch, table: degree });
    }
    if act(&perms, &inverses, element).iter().enumerate().any(|(x, &y)| x != y) {
        return Err(ReplayError::ElementSurvives);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coset::{enumerate, EnumBudget};
    use crate::textio::{parse_presentation_str, parse_word};

    #[test]
    fn abelian_replay() {
        let p = parse_presentation_str("< a, b | a^5, b a^-2 >").unwrap();
        let gens = p.generators().to_vec();
        let ch = Character {
            modulus: 5.into(),
            images: vec![1.into(), 2.into()],
        };
        let a = parse_word("a", &gens).unwrap();
        assert_eq!(replay_abelian(&p, &a, &ch), Ok(()));
        assert_eq!(
            replay_abelian(&p, &parse_word("a^5", &gens).unwrap(), &ch),
            Err(ReplayError::CharacterKillsElement)
        );
        let wrong = Character {
            modulus: 5.into(),
            images: vec![1.into(), 1.into()],
        };
        assert_eq!(replay_abelian(&p, &a, &wrong), Err(ReplayError::CharacterNotDefined(1)));
    }

    #[test]
    fn permutation_replay() {
        let p = parse_presentation_str("< a, b | a^2, b^3, (a b)^2 >").unwrap();
        let gens = p.generators().to_vec();
        let perms = vec![vec![1, 0, 2], vec![1, 2, 0]];
        assert_eq!(replay_finite_quotient(&p, &parse_word("b", &gens).unwrap(), &perms), Ok(()));
        assert_eq!(
            replay_finite_quotient(&p, &parse_word("b^3", &gens).unwrap(), &perms),
            Err(ReplayError::ElementTrivial)
        );
        let bad = vec![vec![1, 0, 2], vec![0, 2, 1]];
        assert_eq!(
            replay_finite_quotient(&p, &parse_word("b", &gens).unwrap(), &bad),
            Err(ReplayError::RelatorNotTrivial(1))
        );
    }

    #[test]
    fn death_table_replay() {
        let p = parse_presentation_str("< a, b | a^2, b^3, (a b)^2 >").unwrap();
        let gens = p.generators().to_vec();
        let t = enumerate(&p, &[], EnumBudget::with_cosets(1000)).unwrap();
        let w = parse_word("(a b)^2 b^3", &gens).unwrap();
        assert_eq!(replay_death_table(&p, &w, &t, 1000), Ok(()));
        assert_eq!(
            replay_death_table(&p, &parse_word("a", &gens).unwrap(), &t, 1000),
            Err(ReplayError::ElementSurvives)
        );
        // A smaller transitive action is rejected: it need not be regular.
        let quotient = CosetTable::from_permutations(&[vec![1, 0], vec![0, 1]], Vec::new());
        assert!(matches!(
            replay_death_table(&p, &parse_word("b", &gens).unwrap(), &quotient, 1000),
            Err(ReplayError::OrderMismatch { .. })
        ));
    }
}
