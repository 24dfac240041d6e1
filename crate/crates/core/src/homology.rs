//! Smith normal form over the integers and first homology of presentations.
//!
//! Matrices are generic over any signed integer type; the crate root
//! exposes [`crate::IntMatrix`] over arbitrary-precision integers, which is
//! what every homology computation in this crate uses.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::presentation::Presentation;
use crate::word::Word;

/// Integer-like scalars usable in Smith normal form.
pub trait Ring: Clone + Integer + Signed + fmt::Debug + fmt::Display {}

impl<T: Clone + Integer + Signed + fmt::Debug + fmt::Display> Ring for T {}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    entries: Vec<T>,
}

impl<T: Ring> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            entries: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    /// Panics if `entries.len() != rows * cols`.
    pub fn from_rows(rows: usize, cols: usize, entries: Vec<T>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count must equal rows*cols");
        Matrix {
            rows,
            cols,
            entries,
        }
    }

    pub fn from_vecs(rows: &[Vec<T>], cols: usize) -> Self {
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols);
            entries.extend(r.iter().cloned());
        }
        Matrix {
            rows: rows.len(),
            cols,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, other: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::<T>::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a.clone() * other[(k, j)].clone();
                    out[(i, j)] = out[(i, j)].clone() + prod;
                }
            }
        }
        out
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)].is_zero()))
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)].clone()).collect()
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> T {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return T::one();
        }
        let mut m = self.entries.clone();
        let at = |i: usize, j: usize| i * n + j;
        let mut sign = T::one();
        let mut prev = T::one();
        for k in 0..n - 1 {
            if m[at(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !m[at(i, k)].is_zero()) {
                    Some(i) => {
                        for j in 0..n {
                            m.swap(at(k, j), at(i, j));
                        }
                        sign = -sign;
                    }
                    None => return T::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = m[at(i, j)].clone() * m[at(k, k)].clone()
                        - m[at(i, k)].clone() * m[at(k, j)].clone();
                    m[at(i, j)] = num / prev.clone();
                }
            }
            prev = m[at(k, k)].clone();
        }
        sign * m[at(n - 1, n - 1)].clone()
    }

    pub fn is_unimodular(&self) -> bool {
        self.rows == self.cols && self.determinant().abs().is_one()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.entries.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.entries.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] += k * row[src]
    fn add_row(&mut self, dst: usize, src: usize, k: &T) {
        for j in 0..self.cols {
            let v = self[(src, j)].clone() * k.clone();
            self[(dst, j)] = self[(dst, j)].clone() + v;
        }
    }

    /// col[dst] += k * col[src]
    fn add_col(&mut self, dst: usize, src: usize, k: &T) {
        for i in 0..self.rows {
            let v = self[(i, src)].clone() * k.clone();
            self[(i, dst)] = self[(i, dst)].clone() + v;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            self[(r, j)] = -self[(r, j)].clone();
        }
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.entries[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.entries[i * self.cols + j]
    }
}

impl<T: fmt::Display> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| self.entries[i * self.cols + j].to_string())
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// `S = U * A * V` with `U`, `V` unimodular and `S` diagonal, nonnegative,
/// each diagonal entry dividing the next.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm<T> {
    pub s: Matrix<T>,
    pub u: Matrix<T>,
    pub v: Matrix<T>,
}

impl<T: Ring> SmithForm<T> {
    /// Exact re-check of the factorization and of unimodularity.
    pub fn verify(&self, a: &Matrix<T>) -> bool {
        let diag = self.s.diagonal();
        let chain = diag.windows(2).all(|w| {
            if w[0].is_zero() {
                w[1].is_zero()
            } else {
                w[1].is_multiple_of(&w[0])
            }
        });
        self.s.is_diagonal()
            && diag.iter().all(|d| !d.is_negative())
            && chain
            && self.u.is_unimodular()
            && self.v.is_unimodular()
            && self.u.mul(a).mul(&self.v) == self.s
    }

    pub fn rank(&self) -> usize {
        self.s.diagonal().iter().filter(|d| !d.is_zero()).count()
    }
}

/// Smallest nonzero |entry| in the lower-right block starting at `t`, ties
/// broken by row-major position.
fn min_pivot<T: Ring>(m: &Matrix<T>, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, T)> = None;
    for i in t..m.rows {
        for j in t..m.cols {
            let v = m[(i, j)].abs();
            if v.is_zero() {
                continue;
            }
            if best.as_ref().is_none_or(|(_, _, b)| v < *b) {
                best = Some((i, j, v));
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

pub fn smith_normal_form<T: Ring>(a: &Matrix<T>) -> SmithForm<T> {
    let (rows, cols) = (a.rows, a.cols);
    let mut s = a.clone();
    let mut u = Matrix::identity(rows);
    let mut v = Matrix::identity(cols);

    for t in 0..rows.min(cols) {
        let Some((pi, pj)) = min_pivot(&s, t) else {
            break;
        };
        s.swap_rows(t, pi);
        u.swap_rows(t, pi);
        s.swap_cols(t, pj);
        v.swap_cols(t, pj);

        loop {
            // Clear column t below and row t to the right using division by the pivot.
            let mut dirty = false;
            for i in t + 1..rows {
                if s[(i, t)].is_zero() {
                    continue;
                }
                let q = s[(i, t)].div_floor(&s[(t, t)]);
                let neg = -q;
                s.add_row(i, t, &neg);
                u.add_row(i, t, &neg);
                if !s[(i, t)].is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if s[(t, j)].is_zero() {
                    continue;
                }
                let q = s[(t, j)].div_floor(&s[(t, t)]);
                let neg = -q;
                s.add_col(j, t, &neg);
                v.add_col(j, t, &neg);
                if !s[(t, j)].is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                // A remainder survived; move the smallest entry of row/column t to the pivot.
                let mut best = (t, t, s[(t, t)].abs());
                for i in t + 1..rows {
                    let x = s[(i, t)].abs();
                    if !x.is_zero() && x < best.2 {
                        best = (i, t, x);
                    }
                }
                for j in t + 1..cols {
                    let x = s[(t, j)].abs();
                    if !x.is_zero() && x < best.2 {
                        best = (t, j, x);
                    }
                }
                s.swap_rows(t, best.0);
                u.swap_rows(t, best.0);
                s.swap_cols(t, best.1);
                v.swap_cols(t, best.1);
                continue;
            }
            // Row and column are clear; enforce divisibility of the remaining block.
            let pivot = s[(t, t)].clone();
            let offender = (t + 1..rows)
                .find(|&i| (t + 1..cols).any(|j| !s[(i, j)].is_multiple_of(&pivot)));
            match offender {
                Some(i) => {
                    let one = T::one();
                    s.add_row(t, i, &one);
                    u.add_row(t, i, &one);
                }
                None => break,
            }
        }
        if s[(t, t)].is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
    }
    SmithForm { s, u, v }
}

/// First homology: `Z^free_rank + Z/d_1 + ... + Z/d_k`, `d_i >= 2`, `d_i | d_{i+1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct H1Result {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

impl H1Result {
    /// Order of the group, `None` when infinite.
    pub fn order(&self) -> Option<BigInt> {
        if self.free_rank > 0 {
            None
        } else {
            Some(self.torsion.iter().fold(BigInt::one(), |acc, d| acc * d))
        }
    }
}

/// `Z`, `Z/3`, `Z^2 + Z/2`, or `0` for the trivial group.
impl fmt::Display for H1Result {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for d in &self.torsion {
            parts.push(format!("Z/{d}"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Exponent-sum vector of `w`.
pub fn abelianize_word(w: &Word, n_gens: usize) -> Vec<i64> {
    let mut v = vec![0i64; n_gens];
    for s in w.syllables() {
        v[s.gen] += s.exp;
    }
    v
}

/// Relators as rows, generators as columns.
pub fn relation_matrix(p: &Presentation) -> Matrix<BigInt> {
    let n = p.num_generators();
    let rows: Vec<Vec<BigInt>> = p
        .relators()
        .iter()
        .map(|r| abelianize_word(r, n).into_iter().map(BigInt::from).collect())
        .collect();
    Matrix::from_vecs(&rows, n)
}

/// The SNF of the relation matrix, always verified before it is returned.
fn checked_snf(p: &Presentation) -> (Matrix<BigInt>, SmithForm<BigInt>) {
    let a = relation_matrix(p);
    let snf = smith_normal_form(&a);
    assert!(snf.verify(&a), "Smith normal form failed its exact re-check");
    (a, snf)
}

pub fn h1(p: &Presentation) -> H1Result {
    let (_, snf) = checked_snf(p);
    let rank = snf.rank();
    let torsion = snf
        .s
        .diagonal()
        .into_iter()
        .filter(|d| *d > BigInt::one())
        .collect();
    H1Result {
        free_rank: p.num_generators() - rank,
        torsion,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ImageOrder {
    Finite(BigInt),
    Infinite,
}

/// A homomorphism `G -> Z` (modulus 0) or `G -> Z/modulus`, given by the
/// images of the generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Character {
    pub modulus: BigInt,
    pub images: Vec<BigInt>,
}

impl Character {
    pub fn reduce(&self, x: BigInt) -> BigInt {
        if self.modulus.is_zero() {
            x
        } else {
            x.mod_floor(&self.modulus)
        }
    }

    pub fn evaluate(&self, w: &Word) -> BigInt {
        let v = abelianize_word(w, self.images.len());
        let total = v
            .iter()
            .zip(&self.images)
            .fold(BigInt::zero(), |acc, (e, x)| acc + BigInt::from(*e) * x);
        self.reduce(total)
    }
}

/// Coordinates of `[w]` in the Smith basis of H1, with their moduli (0 for
/// free summands); trivial summands are skipped.
fn smith_coordinates(w: &Word, p: &Presentation, snf: &SmithForm<BigInt>) -> Vec<(BigInt, BigInt, usize)> {
    let n = p.num_generators();
    let x: Vec<BigInt> = abelianize_word(w, n).into_iter().map(BigInt::from).collect();
    let diag = snf.s.diagonal();
    (0..n)
        .filter_map(|i| {
            let modulus = diag.get(i).cloned().unwrap_or_else(BigInt::zero);
            if modulus.is_one() {
                return None;
            }
            let c = (0..n).fold(BigInt::zero(), |acc, k| acc + &x[k] * &snf.v[(k, i)]);
            Some((c, modulus, i))
        })
        .collect()
}

/// Order of the image of `w` in H1 of `p`.
pub fn abelian_order_of_image(w: &Word, p: &Presentation) -> ImageOrder {
    let (_, snf) = checked_snf(p);
    let mut order = BigInt::one();
    for (c, modulus, _) in smith_coordinates(w, p, &snf) {
        if modulus.is_zero() {
            if !c.is_zero() {
                return ImageOrder::Infinite;
            }
        } else {
            let r = c.mod_floor(&modulus);
            let o = &modulus / modulus.gcd(&r);
            order = order.lcm(&o);
        }
    }
    ImageOrder::Finite(order)
}

/// A character of `p` that does not vanish on `w`, if `[w] != 0` in H1.
pub fn separating_character(w: &Word, p: &Presentation) -> Option<Character> {
    let (_, snf) = checked_snf(p);
    let n = p.num_generators();
    for (c, modulus, i) in smith_coordinates(w, p, &snf) {
        let nonzero = if modulus.is_zero() {
            !c.is_zero()
        } else {
            !c.mod_floor(&modulus).is_zero()
        };
        if nonzero {
            let ch = Character {
                modulus: modulus.clone(),
                images: (0..n).map(|k| snf.v[(k, i)].clone()).collect(),
            };
            let images = ch.images.iter().map(|x| ch.reduce(x.clone())).collect();
            return Some(Character { images, ..ch });
        }
    }
    None
}
