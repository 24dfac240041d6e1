//! Coset enumeration, complete-table checking and low-index subgroups.
//!
//! Coset indices are 0-based in the API; coset 0 is the subgroup itself.
//! Text dumps use 1-based numbering.

mod felsch;
mod hlt;
mod low_index;

use std::fmt;

use thiserror::Error;

use crate::presentation::{Presentation, Triviality, TrivialityOracle};
use crate::word::{Letter, Word};

pub use felsch::felsch_order;
pub use hlt::enumerate;
pub use low_index::{low_index_subgroups, LowIndexBudget, LowIndexSearch};

/// Resource limits for a single enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumBudget {
    /// Maximum number of coset slots held at once.
    pub max_cosets: usize,
    /// Maximum number of coset definitions plus deductions over the run.
    pub max_deductions: u64,
}

impl EnumBudget {
    pub const DEFAULT_MAX_COSETS: usize = 2_000_000;

    pub fn new(max_cosets: usize, max_deductions: u64) -> Self {
        assert!(max_cosets > 0 && max_deductions > 0, "budgets must be positive");
        EnumBudget {
            max_cosets,
            max_deductions,
        }
    }

    /// A coset budget with a proportional deduction allowance.
    pub fn with_cosets(max_cosets: usize) -> Self {
        EnumBudget::new(max_cosets, (max_cosets as u64).saturating_mul(64).max(1024))
    }
}

impl Default for EnumBudget {
    fn default() -> Self {
        EnumBudget::with_cosets(Self::DEFAULT_MAX_COSETS)
    }
}

/// Permutation action of the generators on cosets; possibly partial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetTable {
    n_gens: usize,
    n_cosets: usize,
    /// `columns[2*g]` is the action of generator `g`, `columns[2*g+1]` of its inverse.
    columns: Vec<Vec<Option<usize>>>,
    complete: bool,
    subgroup_gens: Vec<Word>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableDefect {
    #[error("table is incomplete")]
    Incomplete,
    #[error("table has no cosets")]
    Empty,
    #[error("column {column} has an out-of-range entry at coset {coset}")]
    OutOfRange { column: usize, coset: usize },
    #[error("column {column} is not inverse to its partner at coset {coset}")]
    InverseMismatch { column: usize, coset: usize },
    #[error("relator {relator} does not act trivially at coset {coset}")]
    RelatorFails { relator: usize, coset: usize },
    #[error("subgroup generator {index} does not fix coset 0")]
    SubgroupNotFixed { index: usize },
    #[error("generator count {found} does not match presentation ({expected})")]
    GeneratorCount { found: usize, expected: usize },
}

impl CosetTable {
    /// Builds a table from per-generator permutations (complete by construction;
    /// call [`CosetTable::check`] before trusting it).
    pub fn from_permutations(perms: &[Vec<usize>], subgroup_gens: Vec<Word>) -> Self {
        let n = perms.first().map_or(0, Vec::len);
        let mut columns = Vec::with_capacity(2 * perms.len());
        for p in perms {
            let fwd: Vec<Option<usize>> = p.iter().map(|&x| Some(x)).collect();
            let mut inv = vec![None; n];
            for (i, &x) in p.iter().enumerate() {
                if x < n {
                    inv[x] = Some(i);
                }
            }
            columns.push(fwd);
            columns.push(inv);
        }
        let complete = columns.iter().all(|c| c.len() == n && c.iter().all(Option::is_some));
        CosetTable {
            n_gens: perms.len(),
            n_cosets: n,
            columns,
            complete,
            subgroup_gens,
        }
    }

    pub(crate) fn from_columns(
        n_gens: usize,
        n_cosets: usize,
        columns: Vec<Vec<Option<usize>>>,
        subgroup_gens: Vec<Word>,
    ) -> Self {
        let complete = columns.iter().all(|c| c.iter().all(Option::is_some));
        CosetTable {
            n_gens,
            n_cosets,
            columns,
            complete,
            subgroup_gens,
        }
    }

    pub fn n_gens(&self) -> usize {
        self.n_gens
    }

    pub fn n_cosets(&self) -> usize {
        self.n_cosets
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn subgroup_gens(&self) -> &[Word] {
        &self.subgroup_gens
    }

    pub fn image(&self, coset: usize, letter: Letter) -> Option<usize> {
        self.columns
            .get(letter.column())
            .and_then(|c| c.get(coset).copied().flatten())
    }

    /// Permutation of generator `g` (complete tables only).
    pub fn generator_permutation(&self, g: usize) -> Option<Vec<usize>> {
        self.columns[2 * g].iter().copied().collect()
    }

    /// Coset reached from `start` by reading `w`, or `None` if some entry
    /// on the way is undefined.
    pub fn evaluate(&self, w: &Word, start: usize) -> Option<usize> {
        let mut c = start;
        for l in w.letters() {
            c = self.image(c, l)?;
        }
        Some(c)
    }

    /// Full permutation induced by `w`.
    pub fn permutation_of(&self, w: &Word) -> Option<Vec<usize>> {
        (0..self.n_cosets).map(|c| self.evaluate(w, c)).collect()
    }

    /// Does `w` act as the identity permutation?
    pub fn acts_trivially(&self, w: &Word) -> Option<bool> {
        let p = self.permutation_of(w)?;
        Some(p.iter().enumerate().all(|(i, &x)| i == x))
    }

    /// Independent soundness check of a complete table: every column is a
    /// bijection inverse to its partner, every relator fixes every coset, and
    /// every subgroup generator fixes coset 0.
    pub fn check(&self, p: &Presentation) -> Result<(), TableDefect> {
        if self.n_gens != p.num_generators() {
            return Err(TableDefect::GeneratorCount {
                found: self.n_gens,
                expected: p.num_generators(),
            });
        }
        let n = self.n_cosets;
        if n == 0 {
            return Err(TableDefect::Empty);
        }
        if self.columns.len() != 2 * self.n_gens {
            return Err(TableDefect::Incomplete);
        }
        for (col, column) in self.columns.iter().enumerate() {
            if column.len() != n {
                return Err(TableDefect::Incomplete);
            }
            for (coset, entry) in column.iter().enumerate() {
                let target = entry.ok_or(TableDefect::Incomplete)?;
                if target >= n {
                    return Err(TableDefect::OutOfRange { column: col, coset });
                }
                if self.columns[col ^ 1].get(target).copied().flatten() != Some(coset) {
                    return Err(TableDefect::InverseMismatch { column: col, coset });
                }
            }
        }
        for (ri, r) in p.relators().iter().enumerate() {
            for coset in 0..n {
                if self.evaluate(r, coset) != Some(coset) {
                    return Err(TableDefect::RelatorFails { relator: ri, coset });
                }
            }
        }
        for (index, w) in self.subgroup_gens.iter().enumerate() {
            if self.evaluate(w, 0) != Some(0) {
                return Err(TableDefect::SubgroupNotFixed { index });
            }
        }
        Ok(())
    }

    /// Renumbers cosets in breadth-first order from coset 0, scanning columns
    /// in order. Complete tables only; others are returned unchanged.
    pub fn standardized(&self) -> CosetTable {
        if !self.complete {
            return self.clone();
        }
        let n = self.n_cosets;
        let mut new_of = vec![usize::MAX; n];
        let mut order = Vec::with_capacity(n);
        new_of[0] = 0;
        order.push(0);
        let mut head = 0;
        while head < order.len() {
            let c = order[head];
            head += 1;
            for column in &self.columns {
                let t = column[c].expect("complete");
                if new_of[t] == usize::MAX {
                    new_of[t] = order.len();
                    order.push(t);
                }
            }
        }
        // Unreachable cosets cannot occur in a transitive table, but keep them.
        for c in 0..n {
            if new_of[c] == usize::MAX {
                new_of[c] = order.len();
                order.push(c);
            }
        }
        let columns = self
            .columns
            .iter()
            .map(|column| {
                order
                    .iter()
                    .map(|&old| column[old].map(|t| new_of[t]))
                    .collect()
            })
            .collect();
        CosetTable {
            columns,
            ..self.clone()
        }
    }

    /// Text dump: one line per generator listing its permutation, 1-based.
    pub fn dump(&self, gen_names: &[String]) -> String {
        let mut out = format!("cosets {}\n", self.n_cosets);
        for g in 0..self.n_gens {
            let row: Vec<String> = self.columns[2 * g]
                .iter()
                .map(|e| e.map_or("-".to_string(), |x| (x + 1).to_string()))
                .collect();
            out.push_str(&format!("gen {} {}\n", gen_names[g], row.join(" ")));
        }
        out
    }

    /// Inverse of [`CosetTable::dump`].
    pub fn parse_dump(text: &str, gen_names: &[String]) -> Result<CosetTable, String> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or("missing `cosets` line")?;
        let n: usize = header
            .strip_prefix("cosets ")
            .ok_or("expected `cosets <n>`")?
            .trim()
            .parse()
            .map_err(|_| "bad coset count")?;
        let mut perms: Vec<Option<Vec<usize>>> = vec![None; gen_names.len()];
        for line in lines {
            let mut parts = line.split_whitespace();
            if parts.next() != Some("gen") {
                return Err(format!("unexpected line `{line}`"));
            }
            let name = parts.next().ok_or("missing generator name")?;
            let g = gen_names
                .iter()
                .position(|x| x == name)
                .ok_or_else(|| format!("unknown generator `{name}`"))?;
            let row: Vec<usize> = parts
                .map(|x| x.parse::<usize>().ok().filter(|&v| v >= 1).map(|v| v - 1))
                .collect::<Option<Vec<_>>>()
                .ok_or("bad permutation entry")?;
            if row.len() != n {
                return Err(format!("generator `{name}` has {} entries, expected {n}", row.len()));
            }
            perms[g] = Some(row);
        }
        let perms: Vec<Vec<usize>> = perms
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or("missing generator rows")?;
        Ok(CosetTable::from_permutations(&perms, Vec::new()))
    }
}

impl fmt::Display for CosetTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.n_gens).map(|g| format!("g{g}")).collect();
        f.write_str(&self.dump(&names))
    }
}

/// The enumeration ran out of budget; carries the partial table.
#[derive(Clone, PartialEq, Eq, Error)]
#[error("coset enumeration exhausted its budget ({live} live cosets)")]
pub struct Exhausted {
    pub live: usize,
    pub partial: CosetTable,
}

impl fmt::Debug for Exhausted {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Exhausted")
            .field("live", &self.live)
            .field("partial_cosets", &self.partial.n_cosets())
            .finish()
    }
}

/// Order of the group, via enumeration over the trivial subgroup.
pub fn group_order(p: &Presentation, budget: EnumBudget) -> Result<usize, Exhausted> {
    enumerate(p, &[], budget).map(|t| t.n_cosets())
}

/// A verified complete coset table of the trivial subgroup decides triviality.
pub struct RegularTableOracle {
    table: CosetTable,
}

impl RegularTableOracle {
    /// Returns `None` unless the table checks against `p` and is over the
    /// trivial subgroup.
    pub fn new(table: CosetTable, p: &Presentation) -> Option<Self> {
        if table.subgroup_gens().iter().all(Word::is_identity) && table.check(p).is_ok() {
            Some(RegularTableOracle { table })
        } else {
            None
        }
    }

    pub fn table(&self) -> &CosetTable {
        &self.table
    }
}

impl TrivialityOracle for RegularTableOracle {
    fn decide(&self, w: &Word) -> Triviality {
        match self.table.evaluate(w, 0) {
            Some(0) => Triviality::Trivial,
            Some(_) => Triviality::Nontrivial,
            None => Triviality::Unknown,
        }
    }
}
