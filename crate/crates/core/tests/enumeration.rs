use fillscope_core::atlas;
use fillscope_core::coset::{enumerate, felsch_order, group_order, low_index_subgroups, EnumBudget, LowIndexBudget};
use fillscope_core::dehn::{fill, Slope};
use fillscope_core::textio::{parse_presentation_str, parse_word};

/// Presentations of groups whose orders are classical.
const FINITE: &[(&str, usize)] = &[
    ("< a | a^5 >", 5),
    ("< a, b | a^2, b^3, (a b)^2 >", 6),
    ("< a, b | a^4, b^2 a^-2, b^-1 a b a >", 8),
    ("< a, b | a^2, b^3, (a b)^3 >", 12),
    ("< a, b | a^2, b^3, (a b)^4 >", 24),
    ("< a, b | a^2, b^3, (a b)^5 >", 60),
    ("< a, b | a^2, b^3, (a b)^7, (a b a b^-1)^4 >", 168),
    ("< x, y | x^2 y^-3, (x y^-1)^5 y^-3 >", 120),
    ("< a, b | a b a^-1 b^-2, b a b^-1 a^-2 >", 1),
    ("< a, b, c | a^2, b^2, c^2, (a b)^3, (b c)^3, (a c)^2 >", 24),
];

#[test]
fn orders_of_classical_groups_and_independent_agreement() {
    for &(text, order) in FINITE {
        let p = parse_presentation_str(text).unwrap();
        let t = enumerate(&p, &[], EnumBudget::default()).unwrap_or_else(|e| panic!("{text}: {e}"));
        assert_eq!(t.n_cosets(), order, "{text}");
        t.check(&p).unwrap();
        assert_eq!(felsch_order(&p, 100_000), Some(order), "{text}");
    }
}

#[test]
fn subgroup_indices() {
    let p = parse_presentation_str("< a, b | a^2, b^3, (a b)^5 >").unwrap();
    let gens = p.generators().to_vec();
    for (h, index) in [("a", 30), ("b", 20), ("a b", 12), ("a, b a b^-1", 6)] {
        let words: Vec<_> = h.split(',').map(|w| parse_word(w, &gens).unwrap()).collect();
        let t = enumerate(&p, &words, EnumBudget::default()).unwrap();
        assert_eq!(t.n_cosets(), index, "<{h}>");
        t.check(&p).unwrap();
    }
}

#[test]
fn example_quotient_of_the_figure_eight_group() {
    let fig8 = atlas::figure_eight();
    let gens = fig8.presentation.generators().to_vec();
    let g = parse_word("t^-1*(a^2*t*a)*t^2*(a^2*t*a)^-1", &gens).unwrap();
    let p = fig8.presentation.with_relators([g]).unwrap();
    assert_eq!(group_order(&p, EnumBudget::default()).unwrap(), 336);
    assert_eq!(felsch_order(&p, 100_000), Some(336));
}

#[test]
fn killing_the_meridian_trivializes_every_knot_group() {
    for e in atlas::knot_entries() {
        let p = e.presentation.with_relators([e.meridian().unwrap().clone()]).unwrap();
        assert_eq!(group_order(&p, EnumBudget::default()).unwrap(), 1, "{}", e.name);
        assert_eq!(felsch_order(&p, 1000), Some(1), "{}", e.name);
    }
}

#[test]
fn poincare_sphere_from_trefoil_surgery() {
    // +-1 surgery on the trefoil gives the Poincare sphere (order 120) on
    // one side and an infinite group on the other; exactly one is finite.
    let trefoil = atlas::torus_knot(2, 3).unwrap();
    let orders: Vec<_> = [1, -1]
        .iter()
        .map(|&p| {
            let f = fill(&trefoil, Slope::new(p, 1).unwrap()).unwrap();
            group_order(&f.presentation, EnumBudget::with_cosets(200_000)).ok()
        })
        .collect();
    assert!(orders.contains(&Some(120)), "{orders:?}");
}

#[test]
fn low_index_counts() {
    // Conjugacy classes of subgroups of index <= 6 in A5: A5, A4, D5.
    let a5 = parse_presentation_str("< a, b | a^2, b^3, (a b)^5 >").unwrap();
    let mut s = low_index_subgroups(&a5, 6, LowIndexBudget::default());
    let tables: Vec<_> = s.by_ref().collect();
    assert!(s.is_exhaustive());
    let mut indices: Vec<usize> = tables.iter().map(|t| t.n_cosets()).collect();
    indices.sort();
    assert_eq!(indices, vec![1, 5, 6]);
    for t in &tables {
        t.check(&a5).unwrap();
    }
    // Z has exactly one subgroup of each index.
    let z = parse_presentation_str("< a | >").unwrap();
    assert_eq!(low_index_subgroups(&z, 7, LowIndexBudget::default()).count(), 7);
}

#[test]
fn tietze_simplification_preserves_orders() {
    for &(text, order) in FINITE {
        let p = parse_presentation_str(text).unwrap();
        let s = fillscope_core::tietze::tietze_simplify(&p, 200);
        assert!(s.presentation.total_length() <= p.total_length(), "{text}");
        assert_eq!(group_order(&s.presentation, EnumBudget::default()).unwrap(), order, "{text}");
    }
}

#[test]
fn larger_budgets_never_change_completed_answers() {
    for &(text, order) in FINITE {
        let p = parse_presentation_str(text).unwrap();
        let standard = |n| enumerate(&p, &[], EnumBudget::with_cosets(n)).map(|t| t.standardized());
        let reference = standard(2_000_000).unwrap();
        assert_eq!(reference.n_cosets(), order);
        for n in [order.max(1), 2 * order, 10 * order + 7, 1000] {
            if let Ok(t) = standard(n) {
                assert_eq!(t, reference, "{text} with budget {n}");
            }
        }
    }
}
