//! HLT coset enumeration with lookahead.
//!
//! Cosets are processed in definition order. At each coset every relator is
//! scanned and filled, then any remaining undefined entries of its row are
//! defined. When the slot budget runs out a lookahead pass (scan without
//! defining) is made over all live cosets and the table is compacted; if no
//! slot was freed the enumeration gives up.

use std::collections::VecDeque;

use super::{CosetTable, EnumBudget, Exhausted};
use crate::presentation::Presentation;
use crate::word::Word;

const NONE: u32 = u32::MAX;

struct Full;

struct Hlt {
    ncols: usize,
    /// `table[slot * ncols + col]`
    table: Vec<u32>,
    /// Union-find parent; `parent[i] == i` for live cosets.
    parent: Vec<u32>,
    allocated: usize,
    live: usize,
    max_cosets: usize,
    work: u64,
    max_work: u64,
    queue: VecDeque<u32>,
}

impl Hlt {
    fn new(ncols: usize, budget: EnumBudget) -> Self {
        let mut h = Hlt {
            ncols,
            table: Vec::new(),
            parent: Vec::new(),
            allocated: 0,
            live: 0,
            max_cosets: budget.max_cosets,
            work: 0,
            max_work: budget.max_deductions,
            queue: VecDeque::new(),
        };
        h.alloc();
        h
    }

    #[inline]
    fn get(&self, c: u32, col: usize) -> u32 {
        self.table[c as usize * self.ncols + col]
    }

    #[inline]
    fn set(&mut self, c: u32, col: usize, v: u32) {
        self.table[c as usize * self.ncols + col] = v;
    }

    fn alive(&self, c: u32) -> bool {
        self.parent[c as usize] == c
    }

    fn alloc(&mut self) -> u32 {
        let c = self.allocated as u32;
        self.table.extend(std::iter::repeat_n(NONE, self.ncols));
        self.parent.push(c);
        self.allocated += 1;
        self.live += 1;
        c
    }

    fn define(&mut self, c: u32, col: usize) -> Result<u32, Full> {
        if self.allocated >= self.max_cosets {
            return Err(Full);
        }
        self.work += 1;
        let d = self.alloc();
        self.set(c, col, d);
        self.set(d, col ^ 1, c);
        Ok(d)
    }

    fn rep(&mut self, c: u32) -> u32 {
        let mut r = c;
        while self.parent[r as usize] != r {
            r = self.parent[r as usize];
        }
        let mut x = c;
        while self.parent[x as usize] != r {
            let next = self.parent[x as usize];
            self.parent[x as usize] = r;
            x = next;
        }
        r
    }

    fn merge(&mut self, a: u32, b: u32) {
        let (a, b) = (self.rep(a), self.rep(b));
        if a == b {
            return;
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        self.parent[hi as usize] = lo;
        self.live -= 1;
        self.queue.push_back(hi);
    }

    fn coincidence(&mut self, a: u32, b: u32) {
        self.merge(a, b);
        while let Some(e) = self.queue.pop_front() {
            for col in 0..self.ncols {
                let f = self.get(e, col);
                if f == NONE {
                    continue;
                }
                // Detach the back edge into the dead coset.
                if self.get(f, col ^ 1) == e {
                    self.set(f, col ^ 1, NONE);
                }
                let e1 = self.rep(e);
                let f1 = self.rep(f);
                let x = self.get(e1, col);
                if x != NONE {
                    self.merge(f1, x);
                } else {
                    let y = self.get(f1, col ^ 1);
                    if y != NONE {
                        self.merge(e1, y);
                    } else {
                        self.set(e1, col, f1);
                        self.set(f1, col ^ 1, e1);
                    }
                }
            }
        }
    }

    fn deduce(&mut self, f: u32, col: usize, b: u32) {
        self.work += 1;
        self.set(f, col, b);
        self.set(b, col ^ 1, f);
    }

    fn scan_and_fill(&mut self, alpha: u32, w: &[usize]) -> Result<(), Full> {
        if w.is_empty() {
            return Ok(());
        }
        let mut f = alpha;
        let mut b = alpha;
        let mut i = 0usize;
        let mut j = w.len() as isize - 1;
        loop {
            while (i as isize) <= j {
                let n = self.get(f, w[i]);
                if n == NONE {
                    break;
                }
                f = n;
                i += 1;
            }
            if (i as isize) > j {
                if f != b {
                    self.coincidence(f, b);
                }
                return Ok(());
            }
            while j >= i as isize {
                let n = self.get(b, w[j as usize] ^ 1);
                if n == NONE {
                    break;
                }
                b = n;
                j -= 1;
            }
            if j < i as isize {
                self.coincidence(f, b);
                return Ok(());
            }
            if j == i as isize {
                self.deduce(f, w[i], b);
                return Ok(());
            }
            self.define(f, w[i])?;
        }
    }

    fn scan(&mut self, alpha: u32, w: &[usize]) {
        if w.is_empty() {
            return;
        }
        let mut f = alpha;
        let mut b = alpha;
        let mut i = 0usize;
        let mut j = w.len() as isize - 1;
        while (i as isize) <= j {
            let n = self.get(f, w[i]);
            if n == NONE {
                break;
            }
            f = n;
            i += 1;
        }
        if (i as isize) > j {
            if f != b {
                self.coincidence(f, b);
            }
            return;
        }
        while j >= i as isize {
            let n = self.get(b, w[j as usize] ^ 1);
            if n == NONE {
                break;
            }
            b = n;
            j -= 1;
        }
        if j < i as isize {
            self.coincidence(f, b);
        } else if j == i as isize {
            self.deduce(f, w[i], b);
        }
    }

    fn lookahead(&mut self, relators: &[Vec<usize>]) {
        let mut beta = 0u32;
        while (beta as usize) < self.allocated {
            if self.alive(beta) {
                for r in relators {
                    self.scan(beta, r);
                    if !self.alive(beta) {
                        break;
                    }
                }
            }
            beta += 1;
        }
    }

    /// Renumbers live cosets contiguously (order preserved). Returns the new
    /// index of `keep`, or of the first live coset after it.
    fn compact(&mut self, keep: u32) -> u32 {
        let mut new_of = vec![NONE; self.allocated];
        let mut next = 0u32;
        for c in 0..self.allocated {
            if self.parent[c] == c as u32 {
                new_of[c] = next;
                next += 1;
            }
        }
        let mut table = Vec::with_capacity(next as usize * self.ncols);
        for c in 0..self.allocated {
            if new_of[c] == NONE {
                continue;
            }
            for col in 0..self.ncols {
                let v = self.table[c * self.ncols + col];
                table.push(if v == NONE { NONE } else { new_of[v as usize] });
            }
        }
        let kept = (keep as usize..self.allocated)
            .find(|&c| new_of[c] != NONE)
            .map_or(next, |c| new_of[c]);
        self.table = table;
        self.allocated = next as usize;
        self.parent = (0..next).collect();
        self.live = next as usize;
        kept
    }

    fn to_table(&mut self, n_gens: usize, subgroup: &[Word]) -> CosetTable {
        self.compact(0);
        let n = self.allocated;
        let columns = (0..self.ncols)
            .map(|col| {
                (0..n)
                    .map(|c| {
                        let v = self.table[c * self.ncols + col];
                        (v != NONE).then_some(v as usize)
                    })
                    .collect()
            })
            .collect();
        CosetTable::from_columns(n_gens, n, columns, subgroup.to_vec())
    }
}

/// Enumerates the cosets of the subgroup generated by `subgroup` in the group
/// presented by `p`. A returned table has passed [`CosetTable::check`].
pub fn enumerate(p: &Presentation, subgroup: &[Word], budget: EnumBudget) -> Result<CosetTable, Exhausted> {
    let n_gens = p.num_generators();
    let ncols = 2 * n_gens;
    let relators: Vec<Vec<usize>> = p
        .relators()
        .iter()
        .filter(|r| !r.is_identity())
        .map(Word::columns)
        .collect();
    let subgroup_cols: Vec<Vec<usize>> = subgroup.iter().map(Word::columns).collect();
    let mut h = Hlt::new(ncols, budget);

    let exhausted = |h: &mut Hlt| {
        let live = h.live;
        Exhausted {
            live,
            partial: h.to_table(n_gens, subgroup),
        }
    };

    for w in &subgroup_cols {
        loop {
            match h.scan_and_fill(0, w) {
                Ok(()) => break,
                Err(Full) => {
                    h.lookahead(&relators);
                    let before = h.allocated;
                    h.compact(0);
                    if h.allocated == before {
                        return Err(exhausted(&mut h));
                    }
                }
            }
        }
    }

    let mut alpha = 0u32;
    'outer: while (alpha as usize) < h.allocated {
        if h.work > h.max_work {
            return Err(exhausted(&mut h));
        }
        if !h.alive(alpha) {
            alpha += 1;
            continue;
        }
        let mut full = false;
        for r in &relators {
            if h.scan_and_fill(alpha, r).is_err() {
                full = true;
                break;
            }
            if !h.alive(alpha) {
                break;
            }
        }
        if !full && h.alive(alpha) {
            for col in 0..ncols {
                if h.get(alpha, col) == NONE && h.define(alpha, col).is_err() {
                    full = true;
                    break;
                }
            }
        }
        if full {
            h.lookahead(&relators);
            let before = h.allocated;
            alpha = h.compact(alpha);
            if h.allocated == before {
                return Err(exhausted(&mut h));
            }
            continue 'outer;
        }
        alpha += 1;
    }

    let table = h.to_table(n_gens, subgroup);
    match table.check(p) {
        Ok(()) => Ok(table),
        // A table that fails the checker is never reported as an answer.
        Err(_) => Err(Exhausted {
            live: table.n_cosets(),
            partial: table,
        }),
    }
}
