//! Felsch-strategy enumeration over the trivial subgroup.
//!
//! Shares no code with the HLT enumerator; certificate replay uses it to
//! re-derive group orders from scratch.

use crate::presentation::Presentation;

struct Felsch {
    rows: Vec<Vec<Option<usize>>>,
    forward: Vec<usize>,
    deductions: Vec<(usize, usize)>,
    ncols: usize,
}

impl Felsch {
    fn find(&mut self, mut c: usize) -> usize {
        let mut path = Vec::new();
        while self.forward[c] != c {
            path.push(c);
            c = self.forward[c];
        }
        for p in path {
            self.forward[p] = c;
        }
        c
    }

    fn link(&mut self, c: usize, col: usize, d: usize) {
        self.rows[c][col] = Some(d);
        self.rows[d][col ^ 1] = Some(c);
        self.deductions.push((c, col));
    }

    fn identify(&mut self, a: usize, b: usize) {
        let mut pending = vec![(a, b)];
        while let Some((x, y)) = pending.pop() {
            let (x, y) = (self.find(x), self.find(y));
            if x == y {
                continue;
            }
            let (keep, gone) = (x.min(y), x.max(y));
            self.forward[gone] = keep;
            for col in 0..self.ncols {
                let Some(t) = self.rows[gone][col].take() else {
                    continue;
                };
                if self.rows[t][col ^ 1] == Some(gone) {
                    self.rows[t][col ^ 1] = None;
                }
                let k = self.find(keep);
                let t = self.find(t);
                match (self.rows[k][col], self.rows[t][col ^ 1]) {
                    (Some(existing), _) => pending.push((t, existing)),
                    (None, Some(other)) => pending.push((k, other)),
                    (None, None) => self.link(k, col, t),
                }
            }
        }
    }

    /// Scans `word` around coset `c`, filling a single gap or identifying
    /// cosets when the two ends disagree.
    fn scan(&mut self, c: usize, word: &[usize]) {
        let mut lo = 0;
        let mut hi = word.len();
        let mut f = c;
        let mut b = c;
        while lo < hi {
            match self.rows[f][word[lo]] {
                Some(n) => {
                    f = n;
                    lo += 1;
                }
                None => break,
            }
        }
        if lo == hi {
            if f != b {
                self.identify(f, b);
            }
            return;
        }
        while hi > lo {
            match self.rows[b][word[hi - 1] ^ 1] {
                Some(n) => {
                    b = n;
                    hi -= 1;
                }
                None => break,
            }
        }
        if hi == lo {
            self.identify(f, b);
        } else if hi - lo == 1 {
            self.link(f, word[lo], b);
        }
    }
}

/// Order of the group presented by `p`, or `None` if more than `max_cosets`
/// cosets were needed.
pub fn felsch_order(p: &Presentation, max_cosets: usize) -> Option<usize> {
    let ncols = 2 * p.num_generators();
    // Every cyclic conjugate of every relator and inverse relator, indexed by
    // its first letter.
    let mut by_first: Vec<Vec<Vec<usize>>> = vec![Vec::new(); ncols];
    for r in p.relators() {
        let cols = r.columns();
        let inv: Vec<usize> = cols.iter().rev().map(|c| c ^ 1).collect();
        for w in [cols, inv] {
            for k in 0..w.len() {
                let rot: Vec<usize> = w[k..].iter().chain(&w[..k]).copied().collect();
                if !by_first[rot[0]].contains(&rot) {
                    by_first[rot[0]].push(rot);
                }
            }
        }
    }

    let mut fe = Felsch {
        rows: vec![vec![None; ncols]],
        forward: vec![0],
        deductions: Vec::new(),
        ncols,
    };
    let mut cursor = 0usize;
    loop {
        while let Some((c, col)) = fe.deductions.pop() {
            if fe.forward[c] != c {
                continue;
            }
            for w in &by_first[col] {
                fe.scan(c, w);
                if fe.forward[c] != c {
                    break;
                }
            }
            let c = fe.find(c);
            if let Some(d) = fe.rows[c][col] {
                for w in &by_first[col ^ 1] {
                    let d = fe.find(d);
                    fe.scan(d, w);
                }
            }
        }
        // First undefined entry in coset order.
        let mut hole = None;
        while cursor < fe.rows.len() {
            if fe.forward[cursor] == cursor {
                if let Some(col) = (0..ncols).find(|&col| fe.rows[cursor][col].is_none()) {
                    hole = Some((cursor, col));
                    break;
                }
            }
            cursor += 1;
        }
        if hole.is_none() {
            // Coincidences can transiently clear entries behind the cursor.
            hole = (0..fe.rows.len())
                .filter(|&c| fe.forward[c] == c)
                .find_map(|c| (0..ncols).find(|&col| fe.rows[c][col].is_none()).map(|col| (c, col)));
        }
        let Some((c, col)) = hole else {
            break;
        };
        if fe.rows.len() >= max_cosets {
            return None;
        }
        let d = fe.rows.len();
        fe.rows.push(vec![None; ncols]);
        fe.forward.push(d);
        fe.link(c, col, d);
    }
    Some((0..fe.rows.len()).filter(|&c| fe.forward[c] == c).count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textio::parse_presentation_str;

    #[test]
    fn known_orders() {
        let cases = [
            ("< a | a^5 >", 5),
            ("< a, b | a^2, b^2, (a b)^3 >", 6),
            ("< a, b | a^2, b^3, (a b)^5 >", 60),
            ("< a, b | a^8, b^2 a^4, b^-1 a b a >", 16),
            ("< a | a >", 1),
            ("< a, b | a^3, b^3, (a b)^3, (a^-1 b)^3 >", 27),
        ];
        for (text, n) in cases {
            let p = parse_presentation_str(text).unwrap();
            assert_eq!(felsch_order(&p, 100_000), Some(n), "{text}");
        }
    }

    #[test]
    fn gives_up_on_infinite_groups() {
        let p = parse_presentation_str("< a, b | a b a^-1 b^-1 >").unwrap();
        assert_eq!(felsch_order(&p, 500), None);
    }
}
