//! Built-in presentations: torus knots, two-bridge knots, the figure-eight
//! group in the `(t, a)` form, and the composing-space family.
//!
//! Longitudes are built by formula and then certified (see
//! [`certify_longitude`]); construction only runs the cheap homological
//! checks.

use std::fmt;

use num_integer::Integer;

use crate::coset::{low_index_subgroups, LowIndexBudget};
use crate::error::{Error, Result};
use crate::homology::{abelian_order_of_image, h1, ImageOrder};
use crate::presentation::Presentation;
use crate::sl2;
use crate::word::Word;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EntryKind {
    Torus { p: u32, q: u32 },
    TwoBridge { p: u32, q: u32 },
    FigureEight,
    ComposingSpace { alpha: u32, beta: u32 },
    /// Read from a presentation file.
    Custom,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtlasEntry {
    pub name: String,
    pub presentation: Presentation,
    pub provenance: String,
    pub kind: EntryKind,
}

impl AtlasEntry {
    /// Knot exteriors carry peripheral data; the composing space does not.
    pub fn is_knot(&self) -> bool {
        match self.kind {
            EntryKind::ComposingSpace { .. } => false,
            EntryKind::Custom => self.presentation.peripheral().is_some(),
            _ => true,
        }
    }

    pub fn meridian(&self) -> Option<&Word> {
        self.presentation.peripheral().map(|p| &p.meridian)
    }

    pub fn longitude(&self) -> Option<&Word> {
        self.presentation.peripheral().map(|p| &p.longitude)
    }
}

impl fmt::Display for AtlasEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

/// h1 = Z, the meridian generates it and the longitude vanishes.
fn validate_knot(name: &str, p: &Presentation) -> Result<()> {
    let fail = |why: &str| Err(Error::AtlasValidation(format!("{name}: {why}")));
    let h = h1(p);
    if h.free_rank != 1 || !h.torsion.is_empty() {
        return fail(&format!("H1 is {h}, expected Z"));
    }
    let Some(per) = p.peripheral() else {
        return fail("missing peripheral data");
    };
    // With H1 = Z the meridian generates iff adding it kills H1.
    let killed = p.with_relators([per.meridian.clone()])?;
    let hk = h1(&killed);
    if hk.free_rank != 0 || !hk.torsion.is_empty() {
        return fail("meridian does not generate H1");
    }
    if abelian_order_of_image(&per.longitude, p) != ImageOrder::Finite(1u32.into()) {
        return fail("longitude is not null-homologous");
    }
    Ok(())
}

/// `<x, y | x^p y^-q>` with `mu = x^-s y^r` (`pr - qs = 1`, least `r >= 0`)
/// and `lambda = x^p mu^-pq`.
pub fn torus_knot(p: u32, q: u32) -> Result<AtlasEntry> {
    if p < 2 || q < 2 {
        return Err(Error::BadParameters(format!(
            "torus knot ({p},{q}) is trivial: both parameters must be at least 2"
        )));
    }
    if p.gcd(&q) != 1 {
        return Err(Error::BadParameters(format!("torus knot ({p},{q}): parameters not coprime")));
    }
    let (pi, qi) = (p as i64, q as i64);
    let r = (0..qi).find(|r| (pi * r - 1) % qi == 0).expect("p is invertible mod q");
    let s = (pi * r - 1) / qi;
    let x = Word::generator(0);
    let y = Word::generator(1);
    let relator = x.pow(pi).multiply(&y.pow(-qi));
    let mu = x.pow(-s).multiply(&y.pow(r));
    let lambda = x.pow(pi).multiply(&mu.pow(-pi * qi));
    let name = format!("torus-{p}-{q}");
    let presentation = Presentation::new(vec!["x", "y"], vec![relator])?.with_peripheral(mu, lambda)?;
    validate_knot(&name, &presentation)?;
    Ok(AtlasEntry {
        name,
        presentation,
        provenance: format!(
            "torus knot T({p},{q}), model <x,y | x^{p} = y^{q}>; meridian x^-{s} y^{r}, longitude x^{p} mu^-{}",
            p * q
        ),
        kind: EntryKind::Torus { p, q },
    })
}

/// Exponents `e_i = (-1)^floor(i q / p)`, `i = 1..p-1`.
fn two_bridge_signs(p: u32, q: u32) -> Vec<i64> {
    (1..p as u64)
        .map(|i| if (i * q as u64 / p as u64).is_multiple_of(2) { 1 } else { -1 })
        .collect()
}

/// `w = a^e1 b^e2 a^e3 ... b^e(p-1)` over `a = 0`, `b = 1`.
pub fn two_bridge_word(p: u32, q: u32) -> Word {
    Word::free_reduce(
        two_bridge_signs(p, q)
            .into_iter()
            .enumerate()
            .map(|(i, e)| (i % 2, e)),
    )
}

/// `<a, b | w a w^-1 b^-1>`, meridian `a`, longitude `w~ w a^(-2 sigma)` where
/// `w~` is `w` read backwards (equivalently, `w` with `a` and `b` swapped)
/// and `sigma` the exponent sum of `w`.
pub fn two_bridge(p: u32, q: u32) -> Result<AtlasEntry> {
    if p < 3 || p.is_multiple_of(2) || q == 0 || q >= p || p.gcd(&q) != 1 {
        return Err(Error::BadParameters(format!(
            "two-bridge ({p},{q}): need p odd >= 3, 0 < q < p, gcd(p,q) = 1"
        )));
    }
    let a = Word::generator(0);
    let b = Word::generator(1);
    let w = two_bridge_word(p, q);
    let relator = w.multiply(&a).multiply(&w.inverse()).multiply(&b.inverse());
    let sigma: i64 = two_bridge_signs(p, q).iter().sum();
    let reversed = w.map_generators(|g| 1 - g);
    let lambda = reversed.multiply(&w).multiply(&a.pow(-2 * sigma));
    let name = format!("twobridge-{p}-{q}");
    let presentation = Presentation::new(vec!["a", "b"], vec![relator])?.with_peripheral(a, lambda)?;
    validate_knot(&name, &presentation)?;
    Ok(AtlasEntry {
        name,
        presentation,
        provenance: format!(
            "two-bridge knot b({p},{q}), relator w a w^-1 b^-1 with signs (-1)^floor(iq/p); longitude w~ w a^{}",
            -2 * sigma
        ),
        kind: EntryKind::TwoBridge { p, q },
    })
}

/// Longitude of the `(t, a)` figure-eight presentation. It is the image of
/// the two-bridge `b(5,3)` longitude under `a -> t, b -> t a`.
pub const FIGURE_EIGHT_LONGITUDE: &str = "t*a*t^-1*a^-1*t*a^-1*t^-1*a";

/// `<t, a | t a^2 t = a t a^-1 t a>` with meridian `t`.
pub fn figure_eight() -> AtlasEntry {
    let t = Word::generator(0);
    let lhs = Word::free_reduce([(0, 1), (1, 2), (0, 1)]);
    let rhs = Word::free_reduce([(1, 1), (0, 1), (1, -1), (0, 1), (1, 1)]);
    let relator = lhs.multiply(&rhs.inverse());
    let lambda = Word::free_reduce([
        (0, 1),
        (1, 1),
        (0, -1),
        (1, -1),
        (0, 1),
        (1, -1),
        (0, -1),
        (1, 1),
    ]);
    let presentation = Presentation::new(vec!["t", "a"], vec![relator])
        .and_then(|p| p.with_peripheral(t, lambda))
        .expect("figure-eight presentation is well formed");
    validate_knot("fig8", &presentation).expect("figure-eight passes homological validation");
    AtlasEntry {
        name: "fig8".into(),
        presentation,
        provenance: "figure-eight knot, <t,a | t a^2 t = a t a^-1 t a> with t a meridian; \
                     isomorphic to b(5,3) via t -> a, a -> a^-1 b; longitude transported from b(5,3)"
            .into(),
        kind: EntryKind::FigureEight,
    }
}

/// Images of `t, a` as words in the `b(5,3)` generators `a, b`.
pub fn figure_eight_dictionary() -> [Word; 2] {
    [Word::generator(0), Word::free_reduce([(0, -1), (1, 1)])]
}

/// Inverse dictionary: images of `b(5,3)`'s `a, b` in `t, a`.
pub fn figure_eight_dictionary_inverse() -> [Word; 2] {
    [Word::generator(0), Word::free_reduce([(0, 1), (1, 1)])]
}

/// `<c, d, t | [c,t], [d,t], c^alpha t^-beta>`. Not a knot exterior.
pub fn composing_space(alpha: u32, beta: u32) -> Result<AtlasEntry> {
    if alpha < 1 || beta < 1 {
        return Err(Error::BadParameters(format!(
            "composing space ({alpha},{beta}): parameters must be at least 1"
        )));
    }
    let c = Word::generator(0);
    let d = Word::generator(1);
    let t = Word::generator(2);
    let relators = vec![
        Word::commutator(&c, &t),
        Word::commutator(&d, &t),
        c.pow(alpha as i64).multiply(&t.pow(-(beta as i64))),
    ];
    Ok(AtlasEntry {
        name: format!("composing-{alpha}-{beta}"),
        presentation: Presentation::new(vec!["c", "d", "t"], relators)?,
        provenance: format!("composing space <c,d,t | [c,t] = [d,t] = 1, c^{alpha} = t^{beta}>"),
        kind: EntryKind::ComposingSpace { alpha, beta },
    })
}

/// Wraps a user presentation. When it carries peripheral data it must pass
/// the same homological checks as the built-in knots.
pub fn custom(name: &str, presentation: Presentation) -> Result<AtlasEntry> {
    if presentation.peripheral().is_some() {
        validate_knot(name, &presentation)?;
    }
    Ok(AtlasEntry {
        name: name.to_string(),
        presentation,
        provenance: format!("user presentation {name}"),
        kind: EntryKind::Custom,
    })
}

/// The built-in entries, in listing order.
pub fn default_entries() -> Vec<AtlasEntry> {
    let mut out = vec![figure_eight()];
    for (p, q) in [(2, 3), (2, 5), (3, 4)] {
        out.push(torus_knot(p, q).expect("built-in torus knot"));
    }
    for (p, q) in [(3, 1), (5, 3), (7, 3)] {
        out.push(two_bridge(p, q).expect("built-in two-bridge knot"));
    }
    out.push(composing_space(3, 2).expect("built-in composing space"));
    out
}

/// Knot entries of the default list.
pub fn knot_entries() -> Vec<AtlasEntry> {
    default_entries().into_iter().filter(AtlasEntry::is_knot).collect()
}

/// Looks up `fig8`, `torus-P-Q`, `twobridge-P-Q` or `composing-A-B`.
pub fn lookup(name: &str) -> Result<AtlasEntry> {
    if name == "fig8" || name == "figure-eight" {
        return Ok(figure_eight());
    }
    let unknown = || Error::UnknownKnot(name.to_string());
    let (family, rest) = name.split_once('-').ok_or_else(unknown)?;
    let (x, y) = rest.split_once('-').ok_or_else(unknown)?;
    let x: u32 = x.parse().map_err(|_| unknown())?;
    let y: u32 = y.parse().map_err(|_| unknown())?;
    match family {
        "torus" => torus_knot(x, y),
        "twobridge" => two_bridge(x, y),
        "composing" => composing_space(x, y),
        _ => Err(unknown()),
    }
}

/// Evidence that the stored longitude is a peripheral curve commuting with
/// the meridian.
#[derive(Debug, Clone, PartialEq)]
pub struct LongitudeCertificate {
    pub quotients_checked: usize,
    pub max_index: usize,
    pub exhaustive: bool,
    /// `(commutator norm, |tr - (+-2)|)` under the holonomy, when one exists.
    pub numeric: Option<(f64, f64)>,
}

pub const LONGITUDE_INDEX: usize = 12;
pub const LONGITUDE_COMMUTATOR_TOL: f64 = 1e-8;
pub const LONGITUDE_TRACE_TOL: f64 = 1e-6;

/// Runs the longitude battery: null-homologous, commutes with the meridian in
/// every transitive permutation quotient of degree `<= max_index`, and is
/// parabolic and commuting under the holonomy representation.
pub fn certify_longitude(entry: &AtlasEntry, max_index: usize, budget: LowIndexBudget) -> Result<LongitudeCertificate> {
    let fail = |why: String| Err(Error::AtlasValidation(format!("{}: {why}", entry.name)));
    let p = &entry.presentation;
    let per = p.peripheral().ok_or(Error::NoPeripheralData)?;
    if abelian_order_of_image(&per.longitude, p) != ImageOrder::Finite(1u32.into()) {
        return fail("longitude has nonzero image in H1".into());
    }
    let comm = Word::commutator(&per.meridian, &per.longitude);
    let mut search = low_index_subgroups(p, max_index, budget);
    let mut checked = 0;
    for table in search.by_ref() {
        checked += 1;
        if table.acts_trivially(&comm) != Some(true) {
            return fail(format!(
                "[meridian, longitude] acts nontrivially on an index-{} subgroup's cosets",
                table.n_cosets()
            ));
        }
    }
    let numeric = match entry.kind {
        EntryKind::FigureEight | EntryKind::TwoBridge { .. } => {
            let rep = sl2::holonomy_for(entry)?;
            let m = rep.evaluate(&per.meridian);
            let l = rep.evaluate(&per.longitude);
            let comm_norm = m.mul(&l).sub(&l.mul(&m)).norm();
            let tr = l.trace();
            let tr_dev = (tr - 2.0).norm().min((tr + 2.0).norm());
            if comm_norm > LONGITUDE_COMMUTATOR_TOL || tr_dev > LONGITUDE_TRACE_TOL {
                return fail(format!(
                    "holonomy check failed (commutator {comm_norm:e}, trace deviation {tr_dev:e})"
                ));
            }
            Some((comm_norm, tr_dev))
        }
        _ => None,
    };
    Ok(LongitudeCertificate {
        quotients_checked: checked,
        max_index,
        exhaustive: search.is_exhaustive(),
        numeric,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coset::{group_order, EnumBudget};
    use crate::presentation::GeneratorMap;
    use crate::textio::{format_presentation, parse_word};

    #[test]
    fn figure_eight_is_the_displayed_presentation() {
        let e = figure_eight();
        assert_eq!(
            format_presentation(&e.presentation),
            "< t, a | t*a^2*t*a^-1*t^-1*a*t^-1*a^-1 >\nmeridian: t\nlongitude: t*a*t^-1*a^-1*t*a^-1*t^-1*a\n"
        );
        let gens = e.presentation.generators().to_vec();
        assert_eq!(e.longitude().unwrap(), &parse_word(FIGURE_EIGHT_LONGITUDE, &gens).unwrap());
    }

    #[test]
    fn torus_meridian_choice() {
        let e = torus_knot(2, 3).unwrap();
        let gens = e.presentation.generators().to_vec();
        assert_eq!(e.meridian().unwrap(), &parse_word("x^-1 y^2", &gens).unwrap());
        assert!(matches!(torus_knot(2, 4), Err(Error::BadParameters(_))));
        assert!(matches!(torus_knot(1, 5), Err(Error::BadParameters(_))));
    }

    #[test]
    fn two_bridge_shapes() {
        let e = two_bridge(3, 1).unwrap();
        let gens = e.presentation.generators().to_vec();
        assert_eq!(e.presentation.relators()[0].len(), 6);
        assert_eq!(e.meridian().unwrap(), &parse_word("a", &gens).unwrap());
        let e = two_bridge(5, 3).unwrap();
        assert_eq!(e.presentation.relators().len(), 1);
        assert!(two_bridge(4, 1).is_err());
        assert!(two_bridge(9, 3).is_err());
        assert!(two_bridge(5, 5).is_err());
    }

    #[test]
    fn meridian_fills_are_trivial() {
        for e in knot_entries() {
            let killed = crate::dehn::fill_meridian(&e).unwrap();
            assert_eq!(group_order(&killed, EnumBudget::default()).unwrap(), 1, "{}", e.name);
        }
    }

    #[test]
    fn dictionary_is_an_isomorphism_of_free_words() {
        // t -> a, a -> a^-1 b followed by a -> t, b -> t a is the identity.
        let fig8 = figure_eight();
        let tb = two_bridge(5, 3).unwrap();
        let f = GeneratorMap::new(fig8.presentation.clone(), 2, figure_eight_dictionary().to_vec()).unwrap();
        let g = GeneratorMap::new(tb.presentation.clone(), 2, figure_eight_dictionary_inverse().to_vec()).unwrap();
        let fg = f.then(&g).unwrap();
        assert_eq!(fg.images(), &[Word::generator(0), Word::generator(1)]);
        // The relators correspond up to cyclic conjugacy and inversion.
        let image = f.evaluate(&fig8.presentation.relators()[0]).unwrap().cyclically_reduce().0;
        let target = &tb.presentation.relators()[0];
        let matches = |w: &Word| w.rotations().contains(target);
        assert!(matches(&image) || matches(&image.inverse().cyclically_reduce().0));
        // And the longitudes correspond up to conjugacy.
        let lon = g.evaluate(tb.longitude().unwrap()).unwrap().cyclically_reduce().0;
        let stored = fig8.longitude().unwrap().cyclically_reduce().0;
        assert!(stored.rotations().contains(&lon) || stored.rotations().contains(&lon.inverse().cyclically_reduce().0));
    }

    #[test]
    fn lookup_names() {
        for e in default_entries() {
            assert_eq!(lookup(&e.name).unwrap(), e);
        }
        assert!(matches!(lookup("unknot"), Err(Error::UnknownKnot(_))));
        assert!(matches!(lookup("torus-2-4"), Err(Error::BadParameters(_))));
    }

    #[test]
    fn composing_space_is_not_a_knot() {
        let e = composing_space(3, 2).unwrap();
        assert!(!e.is_knot());
        assert!(e.presentation.peripheral().is_none());
        assert!(composing_space(0, 2).is_err());
    }
}
