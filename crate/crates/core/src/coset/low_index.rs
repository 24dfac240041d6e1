//! Low-index subgroups by backtracking over partial coset tables.
//!
//! Entries are filled in row-major order and new cosets take the next free
//! number, so every table is in standard form. A partial table is pruned as
//! soon as re-basing it at another coset yields a lexicographically smaller
//! standard table; the survivors are exactly one table per conjugacy class.

use super::CosetTable;
use crate::presentation::Presentation;

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LowIndexBudget {
    /// Search nodes allowed below each top-level branch.
    pub max_nodes_per_branch: u64,
}

impl LowIndexBudget {
    pub const DEFAULT_NODES: u64 = 50_000;
}

impl Default for LowIndexBudget {
    fn default() -> Self {
        LowIndexBudget {
            max_nodes_per_branch: Self::DEFAULT_NODES,
        }
    }
}

#[derive(Clone)]
struct Partial {
    n: usize,
    ncols: usize,
    cells: Vec<u32>,
}

impl Partial {
    fn get(&self, c: usize, col: usize) -> u32 {
        self.cells[c * self.ncols + col]
    }

    fn set(&mut self, c: usize, col: usize, v: u32) {
        self.cells[c * self.ncols + col] = v;
    }

    fn first_hole(&self) -> Option<(usize, usize)> {
        (0..self.n * self.ncols)
            .find(|&i| self.cells[i] == NONE)
            .map(|i| (i / self.ncols, i % self.ncols))
    }
}

struct Frame {
    table: Partial,
    hole: (usize, usize),
    /// Remaining choices, in reverse so that `pop` yields ascending order.
    choices: Vec<u32>,
}

/// Iterator over complete coset tables, one per conjugacy class of subgroups
/// of index at most `max_index`, in a fixed order.
pub struct LowIndexSearch {
    max_index: usize,
    ncols: usize,
    n_gens: usize,
    /// Cyclic conjugates of relators and their inverses, by first column.
    cycles: Vec<Vec<Vec<usize>>>,
    stack: Vec<Frame>,
    budget: LowIndexBudget,
    branch: usize,
    branch_nodes: u64,
    exhausted: Vec<usize>,
    nodes: u64,
    presentation: Presentation,
}

pub fn low_index_subgroups(p: &Presentation, max_index: usize, budget: LowIndexBudget) -> LowIndexSearch {
    assert!(max_index >= 1, "max_index must be at least 1");
    let ncols = 2 * p.num_generators();
    let mut cycles: Vec<Vec<Vec<usize>>> = vec![Vec::new(); ncols];
    for r in p.relators() {
        let cols = r.columns();
        let inv: Vec<usize> = cols.iter().rev().map(|c| c ^ 1).collect();
        for w in [cols, inv] {
            for k in 0..w.len() {
                let rot: Vec<usize> = w[k..].iter().chain(&w[..k]).copied().collect();
                if !cycles[rot[0]].contains(&rot) {
                    cycles[rot[0]].push(rot);
                }
            }
        }
    }
    let root = Partial {
        n: 1,
        ncols,
        cells: vec![NONE; max_index * ncols],
    };
    let mut search = LowIndexSearch {
        max_index,
        ncols,
        n_gens: p.num_generators(),
        cycles,
        stack: Vec::new(),
        budget,
        branch: 0,
        branch_nodes: 0,
        exhausted: Vec::new(),
        nodes: 0,
        presentation: p.clone(),
    };
    match root.first_hole() {
        Some(hole) => {
            let frame = search.frame(root, hole);
            search.stack.push(frame);
        }
        None => {
            // No generators: the only subgroup is the whole group.
            search.stack.clear();
        }
    }
    search
}

impl LowIndexSearch {
    /// Top-level branches abandoned because they hit the node budget.
    pub fn exhausted_branches(&self) -> &[usize] {
        &self.exhausted
    }

    pub fn is_exhaustive(&self) -> bool {
        self.exhausted.is_empty()
    }

    pub fn nodes_visited(&self) -> u64 {
        self.nodes
    }

    fn frame(&self, table: Partial, hole: (usize, usize)) -> Frame {
        let (_, col) = hole;
        let mut choices: Vec<u32> = (0..table.n)
            .filter(|&b| table.get(b, col ^ 1) == NONE)
            .map(|b| b as u32)
            .collect();
        if table.n < self.max_index {
            choices.push(table.n as u32);
        }
        choices.reverse();
        Frame {
            table,
            hole,
            choices,
        }
    }

    /// Sets `c^col = d` and closes under relator scans. `false` on conflict.
    fn assign(&self, t: &mut Partial, c: usize, col: usize, d: usize) -> bool {
        t.set(c, col, d as u32);
        t.set(d, col ^ 1, c as u32);
        let mut queue = vec![(c, col), (d, col ^ 1)];
        while let Some((c, col)) = queue.pop() {
            for w in &self.cycles[col] {
                if !scan(t, c, w, &mut queue) {
                    return false;
                }
            }
        }
        true
    }

    fn canonical(&self, t: &Partial) -> bool {
        let n = t.n;
        let mut map = vec![NONE; n];
        let mut order: Vec<usize> = Vec::with_capacity(n);
        for gamma in 1..n {
            map.iter_mut().for_each(|m| *m = NONE);
            order.clear();
            map[gamma] = 0;
            order.push(gamma);
            let mut k = 0;
            'cmp: while k < order.len() {
                let old = order[k];
                for col in 0..self.ncols {
                    let target = t.get(old, col);
                    let cur = t.get(k, col);
                    if target == NONE || cur == NONE {
                        break 'cmp;
                    }
                    let mut v = map[target as usize];
                    if v == NONE {
                        v = order.len() as u32;
                        map[target as usize] = v;
                        order.push(target as usize);
                    }
                    if v < cur {
                        return false;
                    }
                    if v > cur {
                        break 'cmp;
                    }
                }
                k += 1;
            }
        }
        true
    }

    fn to_table(&self, t: &Partial) -> CosetTable {
        let columns = (0..self.ncols)
            .map(|col| (0..t.n).map(|c| Some(t.get(c, col) as usize)).collect())
            .collect();
        CosetTable::from_columns(self.n_gens, t.n, columns, Vec::new())
    }
}

/// Scans cycle `w` at coset `c`; fills a single gap (queueing it) or reports
/// a conflict when the scan closes at the wrong coset.
fn scan(t: &mut Partial, c: usize, w: &[usize], queue: &mut Vec<(usize, usize)>) -> bool {
    let mut f = c;
    let mut lo = 0;
    let mut hi = w.len();
    while lo < hi {
        let n = t.get(f, w[lo]);
        if n == NONE {
            break;
        }
        f = n as usize;
        lo += 1;
    }
    if lo == hi {
        return f == c;
    }
    let mut b = c;
    while hi > lo {
        let n = t.get(b, w[hi - 1] ^ 1);
        if n == NONE {
            break;
        }
        b = n as usize;
        hi -= 1;
    }
    if hi == lo {
        return f == b;
    }
    if hi - lo == 1 {
        let col = w[lo];
        if t.get(b, col ^ 1) != NONE {
            return false;
        }
        t.set(f, col, b as u32);
        t.set(b, col ^ 1, f as u32);
        queue.push((f, col));
        queue.push((b, col ^ 1));
    }
    true
}

impl Iterator for LowIndexSearch {
    type Item = CosetTable;

    fn next(&mut self) -> Option<CosetTable> {
        loop {
            let depth = self.stack.len();
            let frame = self.stack.last_mut()?;
            let Some(choice) = frame.choices.pop() else {
                self.stack.pop();
                continue;
            };
            if depth == 1 {
                // Starting a new top-level branch.
                self.branch += 1;
                self.branch_nodes = 0;
            }
            let (c, col) = frame.hole;
            let mut t = frame.table.clone();
            let d = choice as usize;
            if d == t.n {
                t.n += 1;
            }
            self.nodes += 1;
            self.branch_nodes += 1;
            if self.branch_nodes > self.budget.max_nodes_per_branch {
                self.exhausted.push(self.branch - 1);
                self.stack.truncate(1);
                continue;
            }
            if !self.assign(&mut t, c, col, d) || !self.canonical(&t) {
                continue;
            }
            match t.first_hole() {
                Some(hole) => {
                    let frame = self.frame(t, hole);
                    self.stack.push(frame);
                }
                None => {
                    let table = self.to_table(&t);
                    debug_assert!(table.check(&self.presentation).is_ok());
                    if table.check(&self.presentation).is_ok() {
                        return Some(table);
                    }
                }
            }
        }
    }
}
