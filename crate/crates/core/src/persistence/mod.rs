//! Baumslag–Solitar candidates, the combination `g^m h`, and per-slope
//! survival scans with replayable certificates.

pub mod certificate;
pub mod derivation;
pub mod replay;

use rayon::prelude::*;

use crate::atlas::AtlasEntry;
use crate::coset::{enumerate, low_index_subgroups, CosetTable, EnumBudget, LowIndexBudget};
use crate::dehn::{fill, Slope};
use crate::error::{Error, Result};
use crate::homology::{separating_character, Character};
use crate::presentation::Presentation;
use crate::tietze::tietze_simplify;
use crate::word::Word;

pub use derivation::{find_derivation, Derivation, Factor};

/// Index bound for the degeneracy check in [`bs_candidate`].
pub const DEGENERACY_INDEX: usize = 5;

/// `mu^(n-m) y mu^m y^-1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BSCandidate {
    pub knot: String,
    pub y: Word,
    pub m: i64,
    pub n: i64,
    pub word: Word,
    /// `[mu, y]` acts trivially in every quotient examined; the candidate is
    /// allowed but probably useless.
    pub degenerate: bool,
}

pub fn bs_candidate(knot: &AtlasEntry, y: &Word, m: i64, n: i64) -> Result<BSCandidate> {
    if m < 2 {
        return Err(Error::BadParameters(format!("m = {m}: need m >= 2")));
    }
    if n.abs() != 1 && n.abs() != 2 {
        return Err(Error::BadParameters(format!("n = {n}: need |n| in {{1, 2}}")));
    }
    if y.is_identity() {
        return Err(Error::BadParameters("y must be a nontrivial word".into()));
    }
    let p = &knot.presentation;
    p.check_word(y)?;
    let mu = &p.peripheral().ok_or(Error::NoPeripheralData)?.meridian;
    let word = mu
        .pow(n - m)
        .multiply(y)
        .multiply(&mu.pow(m))
        .multiply(&y.inverse());
    let comm = Word::commutator(mu, y);
    let degenerate = comm.is_identity()
        || low_index_subgroups(p, DEGENERACY_INDEX, LowIndexBudget::default())
            .all(|t| t.acts_trivially(&comm) == Some(true));
    Ok(BSCandidate {
        knot: knot.name.clone(),
        y: y.clone(),
        m,
        n,
        word,
        degenerate,
    })
}

/// `g^m h`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CombinedElement {
    pub g: Word,
    pub h: Word,
    pub m: i64,
    pub word: Word,
}

pub fn shrink_combine(g: &Word, h: &Word, m: i64) -> Result<CombinedElement> {
    if m < 1 {
        return Err(Error::BadParameters(format!("m = {m}: need m >= 1")));
    }
    Ok(CombinedElement {
        g: g.clone(),
        h: h.clone(),
        m,
        word: g.pow(m).multiply(h),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScanBudgets {
    pub max_index: usize,
    pub low_index: LowIndexBudget,
    pub enumeration: EnumBudget,
    pub tietze_effort: usize,
    pub derivation_steps: usize,
}

impl Default for ScanBudgets {
    fn default() -> Self {
        ScanBudgets {
            max_index: 12,
            low_index: LowIndexBudget::default(),
            enumeration: EnumBudget::default(),
            tietze_effort: 200,
            derivation_steps: 10_000,
        }
    }
}

impl ScanBudgets {
    /// Multiplies the node, coset and deduction budgets by `factor`; the
    /// index bound is a mathematical parameter and is left alone.
    pub fn scaled(self, factor: f64) -> Self {
        let scale = |x: f64| ((x * factor).round()).max(1.0);
        let cosets = scale(self.enumeration.max_cosets as f64) as usize;
        ScanBudgets {
            low_index: LowIndexBudget {
                max_nodes_per_branch: scale(self.low_index.max_nodes_per_branch as f64) as u64,
            },
            enumeration: EnumBudget::new(cosets, scale(self.enumeration.max_deductions as f64) as u64),
            tietze_effort: scale(self.tietze_effort as f64) as usize,
            derivation_steps: scale(self.derivation_steps as f64) as usize,
            ..self
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// A character of the filled group not vanishing on the element.
    Abelian(Character),
    /// Permutation images of the generators satisfying the filled relators,
    /// under which the element is not the identity.
    FiniteQuotient { perms: Vec<Vec<usize>> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DeathCertificate {
    /// The element as a product of conjugates of filled relators.
    Derivation(Derivation),
    /// The regular representation of the (finite) filled group.
    CosetTable(CosetTable),
}

/// What was tried before giving up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpentBudgets {
    pub max_index: usize,
    pub low_index_nodes: u64,
    pub low_index_exhaustive: bool,
    pub max_cosets: usize,
    pub live_cosets: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Survives(Witness),
    Dies(DeathCertificate),
    Unknown(SpentBudgets),
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Survives(_) => "Survives",
            Verdict::Dies(_) => "Dies",
            Verdict::Unknown(_) => "Unknown",
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Verdict::Survives(Witness::Abelian(_)) => "abelian",
            Verdict::Survives(Witness::FiniteQuotient { .. }) => "finite-quotient",
            Verdict::Dies(DeathCertificate::Derivation(_)) => "derivation",
            Verdict::Dies(DeathCertificate::CosetTable(_)) => "coset-table",
            Verdict::Unknown(_) => "budgets",
        }
    }

    pub fn is_dies(&self) -> bool {
        matches!(self, Verdict::Dies(_))
    }

    pub fn is_survives(&self) -> bool {
        matches!(self, Verdict::Survives(_))
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Verdict::Unknown(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlopeResult {
    pub slope: Slope,
    /// The filled presentation the verdict refers to.
    pub filled: Presentation,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurvivalReport {
    pub knot: String,
    pub element: Word,
    pub window: Vec<Slope>,
    pub budgets: ScanBudgets,
    pub results: Vec<SlopeResult>,
}

impl SurvivalReport {
    pub fn verdict(&self, s: Slope) -> Option<&Verdict> {
        self.results.iter().find(|r| r.slope == s).map(|r| &r.verdict)
    }

    pub fn count(&self, f: impl Fn(&Verdict) -> bool) -> usize {
        self.results.iter().filter(|r| f(&r.verdict)).count()
    }

    pub fn dies_slopes(&self) -> Vec<Slope> {
        self.results.iter().filter(|r| r.verdict.is_dies()).map(|r| r.slope).collect()
    }
}

/// The verdict pipeline for one filled presentation, cheapest first:
/// abelian character, consequence derivation, low-index permutation
/// quotients of a Tietze-simplified copy, full enumeration.
pub fn classify(filled: &Presentation, g: &Word, budgets: &ScanBudgets) -> Verdict {
    if let Some(ch) = separating_character(g, filled) {
        return Verdict::Survives(Witness::Abelian(ch));
    }
    if let Some(d) = find_derivation(g, filled, budgets.derivation_steps) {
        return Verdict::Dies(DeathCertificate::Derivation(d));
    }
    let simplified = tietze_simplify(filled, budgets.tietze_effort);
    let mut search = low_index_subgroups(&simplified.presentation, budgets.max_index, budgets.low_index);
    for table in search.by_ref() {
        if table.n_cosets() < 2 {
            continue;
        }
        // Pull the action back to the original generators.
        let perms: Option<Vec<Vec<usize>>> = simplified
            .map
            .images()
            .iter()
            .map(|w| table.permutation_of(w))
            .collect();
        let Some(perms) = perms else { continue };
        let pulled = CosetTable::from_permutations(&perms, Vec::new());
        if pulled.acts_trivially(g) == Some(false) && pulled.check(filled).is_ok() {
            return Verdict::Survives(Witness::FiniteQuotient { perms });
        }
    }
    let spent = |live| SpentBudgets {
        max_index: budgets.max_index,
        low_index_nodes: search.nodes_visited(),
        low_index_exhaustive: search.is_exhaustive(),
        max_cosets: budgets.enumeration.max_cosets,
        live_cosets: live,
    };
    match enumerate(filled, &[], budgets.enumeration) {
        Ok(table) => match table.acts_trivially(g) {
            Some(true) => Verdict::Dies(DeathCertificate::CosetTable(table)),
            Some(false) => {
                let perms = (0..filled.num_generators())
                    .map(|i| table.generator_permutation(i).expect("complete table"))
                    .collect();
                Verdict::Survives(Witness::FiniteQuotient { perms })
            }
            None => Verdict::Unknown(spent(table.n_cosets())),
        },
        Err(e) => Verdict::Unknown(spent(e.live)),
    }
}

/// Scans `g` over `window`. Slopes are processed in parallel on the current
/// rayon pool; results are in window order and independent of scheduling.
pub fn survival_scan(knot: &AtlasEntry, g: &Word, window: &[Slope], budgets: ScanBudgets) -> Result<SurvivalReport> {
    if g.is_identity() {
        return Err(Error::BadParameters("element must be a nontrivial word".into()));
    }
    knot.presentation.check_word(g)?;
    let mut seen = window.to_vec();
    seen.sort();
    seen.dedup();
    if seen.len() != window.len() {
        return Err(Error::BadParameters("window lists a slope twice".into()));
    }
    if window.is_empty() {
        return Err(Error::BadParameters("empty window".into()));
    }
    let results = window
        .par_iter()
        .map(|&s| {
            let filled = fill(knot, s)?.presentation;
            let verdict = classify(&filled, g, &budgets);
            Ok(SlopeResult {
                slope: s,
                filled,
                verdict,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SurvivalReport {
        knot: knot.name.clone(),
        element: g.clone(),
        window: window.to_vec(),
        budgets,
        results,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Joined {
    /// Every element dies.
    Dies,
    /// Some element survives.
    Survives,
    Unknown,
}

/// Per-slope approximation of the intersection of the death sets.
pub fn scan_summary_intersection(reports: &[SurvivalReport]) -> Result<Vec<(Slope, Joined)>> {
    let first = reports
        .first()
        .ok_or_else(|| Error::BadParameters("no reports to intersect".into()))?;
    if reports
        .iter()
        .any(|r| r.window != first.window || r.knot != first.knot)
    {
        return Err(Error::WindowMismatch);
    }
    Ok(first
        .window
        .iter()
        .map(|&s| {
            let verdicts: Vec<&Verdict> = reports.iter().filter_map(|r| r.verdict(s)).collect();
            let joined = if verdicts.iter().all(|v| v.is_dies()) {
                Joined::Dies
            } else if verdicts.iter().any(|v| v.is_survives()) {
                Joined::Survives
            } else {
                Joined::Unknown
            };
            (s, joined)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atlas;
    use crate::dehn::{default_window, slope_relator};
    use crate::homology::abelianize_word;
    use crate::textio::parse_word;

    fn example_element() -> (AtlasEntry, Word) {
        let fig8 = atlas::figure_eight();
        let gens = fig8.presentation.generators().to_vec();
        let g = parse_word("t^-1*(a^2*t*a)*t^2*(a^2*t*a)^-1", &gens).unwrap();
        (fig8, g)
    }

    #[test]
    fn example_candidate() {
        let (fig8, g) = example_element();
        let gens = fig8.presentation.generators().to_vec();
        let y = parse_word("a^2 t a", &gens).unwrap();
        let c = bs_candidate(&fig8, &y, 2, 1).unwrap();
        assert_eq!(c.word, g);
        assert!(!c.degenerate);
        assert_eq!(abelianize_word(&c.word, 2), vec![1, 0]);
        for (m, n) in [(3, -1), (5, 2), (2, -2)] {
            let c = bs_candidate(&fig8, &y, m, n).unwrap();
            assert_eq!(abelianize_word(&c.word, 2), vec![n, 0]);
        }
        assert!(matches!(bs_candidate(&fig8, &y, 1, 1), Err(Error::BadParameters(_))));
        assert!(matches!(bs_candidate(&fig8, &y, 2, 3), Err(Error::BadParameters(_))));
        let t = parse_word("t^2", &gens).unwrap();
        assert!(bs_candidate(&fig8, &t, 2, 1).unwrap().degenerate);
    }

    #[test]
    fn combine() {
        let (_, g) = example_element();
        assert_eq!(shrink_combine(&g, &Word::identity(), 1).unwrap().word, g);
        assert!(shrink_combine(&g, &g, 0).is_err());
    }

    #[test]
    fn abelian_witness_at_five() {
        let (fig8, g) = example_element();
        let s = Slope::new(5, 1).unwrap();
        let r = survival_scan(&fig8, &g, &[s], ScanBudgets::default()).unwrap();
        match r.verdict(s).unwrap() {
            Verdict::Survives(Witness::Abelian(ch)) => assert_eq!(ch.modulus, 5.into()),
            v => panic!("unexpected {v:?}"),
        }
    }

    #[test]
    fn filling_relator_dies() {
        let fig8 = atlas::figure_eight();
        for s in [Slope::new(2, 1).unwrap(), Slope::new(-3, 2).unwrap()] {
            let r = slope_relator(&fig8.presentation, s).unwrap();
            let rep = survival_scan(&fig8, &r, &[s], ScanBudgets::default()).unwrap();
            assert!(rep.verdict(s).unwrap().is_dies());
        }
    }

    #[test]
    fn finite_filling_death_by_enumeration() {
        // Killing x^2 and y^3 in the trefoil is not a filling, but a
        // presentation with a finite group exercises the table path.
        let p = crate::textio::parse_presentation_str("< a, b | a^2, b^3, (a b)^5 >").unwrap();
        let gens = p.generators().to_vec();
        let w = parse_word("(a b)^2 (b^-1 a^-1)^2", &gens).unwrap();
        let budgets = ScanBudgets {
            derivation_steps: 0,
            ..ScanBudgets::default()
        };
        assert!(matches!(classify(&p, &w, &budgets), Verdict::Dies(_)));
        let w = parse_word("a b", &gens).unwrap();
        assert!(matches!(
            classify(&p, &w, &budgets),
            Verdict::Survives(Witness::FiniteQuotient { .. })
        ));
    }

    #[test]
    fn intersection_rules() {
        let (fig8, g) = example_element();
        let w: Vec<Slope> = default_window().into_iter().filter(|s| s.q() == 1 && s.p().abs() <= 3).collect();
        let mu = fig8.meridian().unwrap().clone();
        let a = survival_scan(&fig8, &g, &w, ScanBudgets::default()).unwrap();
        assert_eq!(scan_summary_intersection(std::slice::from_ref(&a)).unwrap().len(), w.len());
        let m = survival_scan(&fig8, &mu, &w, ScanBudgets::default()).unwrap();
        let joined = scan_summary_intersection(&[a.clone(), m]).unwrap();
        assert!(joined.iter().all(|(_, j)| *j != Joined::Dies));
        let other = survival_scan(&fig8, &g, &w[..2], ScanBudgets::default()).unwrap();
        assert_eq!(scan_summary_intersection(&[a, other]), Err(Error::WindowMismatch));
    }
}
