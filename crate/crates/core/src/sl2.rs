//! 2x2 complex representations: word evaluation, trace certificates and
//! parabolic (Riley) representations of two-bridge groups.

use num_complex::Complex;
use num_traits::{Float, One, Zero};

use crate::atlas::{self, AtlasEntry, EntryKind};
use crate::error::{Error, Result};
use crate::presentation::Presentation;
use crate::word::Word;

/// Relator defect allowed for a certified representation.
pub const DEFECT_TOL: f64 = 1e-9;
/// Separation required by trace certificates.
pub const SEPARATION_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2<T> {
    pub a: Complex<T>,
    pub b: Complex<T>,
    pub c: Complex<T>,
    pub d: Complex<T>,
}

fn cx<T: Float>(x: f64) -> Complex<T> {
    Complex::new(T::from(x).expect("representable"), T::zero())
}

fn tol<T: Float>(x: f64) -> T {
    T::from(x).expect("representable")
}

impl<T: Float> Mat2<T> {
    pub fn new(a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn from_real(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2::new(cx(a), cx(b), cx(c), cx(d))
    }

    pub fn identity() -> Self {
        Mat2::new(Complex::one(), Complex::zero(), Complex::zero(), Complex::one())
    }

    pub fn mul(&self, o: &Mat2<T>) -> Mat2<T> {
        Mat2 {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    pub fn sub(&self, o: &Mat2<T>) -> Mat2<T> {
        Mat2::new(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)
    }

    pub fn scale(&self, s: Complex<T>) -> Mat2<T> {
        Mat2::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    pub fn det(&self) -> Complex<T> {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> Complex<T> {
        self.a + self.d
    }

    /// Inverse via the adjugate; exact for unimodular matrices.
    pub fn inverse(&self) -> Mat2<T> {
        let det = self.det();
        Mat2::new(self.d / det, -self.b / det, -self.c / det, self.a / det)
    }

    pub fn pow(&self, k: i64) -> Mat2<T> {
        let base = if k < 0 { self.inverse() } else { *self };
        let mut e = k.unsigned_abs();
        let mut acc = Mat2::identity();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq);
            }
            sq = sq.mul(&sq);
            e >>= 1;
        }
        acc
    }

    /// Operator (spectral) norm.
    pub fn norm(&self) -> T {
        let s = self.a.norm_sqr() + self.b.norm_sqr() + self.c.norm_sqr() + self.d.norm_sqr();
        let det = self.det().norm();
        let disc = (s * s - tol::<T>(4.0) * det * det).max(T::zero());
        ((s + disc.sqrt()) / tol(2.0)).sqrt()
    }

    /// Operator-norm distance from `{I, -I}`.
    pub fn distance_from_pm_identity(&self) -> T {
        let id = Mat2::identity();
        let plus = self.sub(&id).norm();
        let minus = self.sub(&id.scale(cx(-1.0))).norm();
        plus.min(minus)
    }
}

pub type Mat2f64 = Mat2<f64>;

/// Generator images for a presentation, with the measured relator defect.
#[derive(Debug, Clone)]
pub struct RepAssignment<T> {
    pub presentation: Presentation,
    pub images: Vec<Mat2<T>>,
    pub max_relator_defect: T,
}

pub type RepAssignmentF64 = RepAssignment<f64>;

impl<T: Float> RepAssignment<T> {
    pub fn new(presentation: Presentation, images: Vec<Mat2<T>>) -> Result<Self> {
        if images.len() != presentation.num_generators() {
            return Err(Error::MapArity {
                images: images.len(),
                generators: presentation.num_generators(),
            });
        }
        let mut rep = RepAssignment {
            presentation,
            images,
            max_relator_defect: T::zero(),
        };
        rep.max_relator_defect = rep
            .presentation
            .relators()
            .iter()
            .map(|r| rep.evaluate(r).distance_from_pm_identity())
            .fold(T::zero(), T::max);
        Ok(rep)
    }

    /// `rho(w)`.
    pub fn evaluate(&self, w: &Word) -> Mat2<T> {
        w.syllables()
            .iter()
            .fold(Mat2::identity(), |acc, s| acc.mul(&self.images[s.gen].pow(s.exp)))
    }

    pub fn trace(&self, w: &Word) -> Complex<T> {
        self.evaluate(w).trace()
    }

    pub fn is_certified(&self) -> bool {
        self.max_relator_defect <= tol(DEFECT_TOL)
    }

    fn require_certified(&self) -> Result<()> {
        if self.is_certified() {
            Ok(())
        } else {
            Err(Error::UncertifiedRepresentation {
                defect: self.max_relator_defect.to_f64().unwrap_or(f64::INFINITY),
                tolerance: DEFECT_TOL,
            })
        }
    }
}

/// Free-function form of [`RepAssignment::evaluate`].
pub fn rep_evaluate<T: Float>(r: &RepAssignment<T>, w: &Word) -> Mat2<T> {
    r.evaluate(w)
}

/// Trace of `x^(1-m) y x^m y^-1` for `x = [[1, tau], [0, 1]]` and `y` with
/// lower-left entry `c`: `2 + c^2 m (m-1) tau^2`.
pub fn bs_trace<T: Float>(m: i64, c: Complex<T>, tau: Complex<T>) -> Complex<T> {
    let mm = tol::<T>((m * (m - 1)) as f64);
    cx::<T>(2.0) + c * c * tau * tau * mm
}

/// `tr(alpha^m beta)` through the eigen-decomposition of a loxodromic
/// `alpha`: with `alpha ~ diag(s, 1/s)` and `beta ~ [[x, .], [., u]]` in that
/// basis, the trace is `s^m x + s^-m u`.
pub fn power_trace_closed_form<T: Float>(alpha: &Mat2<T>, beta: &Mat2<T>, m: i64) -> Option<Complex<T>> {
    let tr = alpha.trace();
    let disc = (tr * tr - cx::<T>(4.0)).sqrt();
    let s = (tr + disc) / cx::<T>(2.0);
    let s_inv = (tr - disc) / cx::<T>(2.0);
    if (s - s_inv).norm() < tol(1e-12) {
        return None;
    }
    // Eigenvectors (b, s - a) or (s - d, c), whichever is better conditioned.
    let vec_for = |lam: Complex<T>| {
        let v1 = (alpha.b, lam - alpha.a);
        let v2 = (lam - alpha.d, alpha.c);
        if v1.0.norm() + v1.1.norm() >= v2.0.norm() + v2.1.norm() {
            v1
        } else {
            v2
        }
    };
    let (p0, p1) = (vec_for(s), vec_for(s_inv));
    let p = Mat2::new(p0.0, p1.0, p0.1, p1.1);
    let b = p.inverse().mul(beta).mul(&p);
    let sm = s.powi(m as i32);
    let sm_inv = s_inv.powi(m as i32);
    Some(sm * b.a + sm_inv * b.d)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Conjugacy {
    /// Traces differ (up to sign) by more than the recorded tolerance.
    Distinct,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonconjugacyCertificate<T> {
    pub verdict: Conjugacy,
    pub trace_u: Complex<T>,
    pub trace_v: Complex<T>,
    pub separation: T,
    pub tolerance: f64,
    pub defect: T,
}

/// Distinct iff `|tr u - tr v|` and `|tr u + tr v|` both exceed the separation
/// tolerance. Refuses uncertified representations.
pub fn nonconjugacy_certificate<T: Float>(r: &RepAssignment<T>, u: &Word, v: &Word) -> Result<NonconjugacyCertificate<T>> {
    r.require_certified()?;
    let tu = r.trace(u);
    let tv = r.trace(v);
    let separation = (tu - tv).norm().min((tu + tv).norm());
    let verdict = if separation > tol(SEPARATION_TOL) {
        Conjugacy::Distinct
    } else {
        Conjugacy::Inconclusive
    };
    Ok(NonconjugacyCertificate {
        verdict,
        trace_u: tu,
        trace_v: tv,
        separation,
        tolerance: SEPARATION_TOL,
        defect: r.max_relator_defect,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Peripherality {
    /// Not parabolic, hence not conjugate into the peripheral subgroup.
    NonPeripheral,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonperipheralityCertificate<T> {
    pub verdict: Peripherality,
    pub trace: Complex<T>,
    pub distance_from_parabolic: T,
    pub tolerance: f64,
    pub defect: T,
}

/// NonPeripheral iff `|tr w - 2|` and `|tr w + 2|` both exceed the separation
/// tolerance. Requires a certified assignment with a parabolic meridian.
pub fn nonperipherality_certificate<T: Float>(
    r: &RepAssignment<T>,
    meridian: &Word,
    w: &Word,
) -> Result<NonperipheralityCertificate<T>> {
    r.require_certified()?;
    let tm = r.trace(meridian);
    let mer_dev = (tm - cx::<T>(2.0)).norm().min((tm + cx::<T>(2.0)).norm());
    if mer_dev > tol(SEPARATION_TOL) {
        return Err(Error::NoRepresentationFound(format!(
            "meridian is not parabolic (trace deviation {:e})",
            mer_dev.to_f64().unwrap_or(f64::NAN)
        )));
    }
    let t = r.trace(w);
    let dist = (t - cx::<T>(2.0)).norm().min((t + cx::<T>(2.0)).norm());
    let verdict = if dist > tol(SEPARATION_TOL) {
        Peripherality::NonPeripheral
    } else {
        Peripherality::Inconclusive
    };
    Ok(NonperipheralityCertificate {
        verdict,
        trace: t,
        distance_from_parabolic: dist,
        tolerance: SEPARATION_TOL,
        defect: r.max_relator_defect,
    })
}

// Integer polynomials in u, low degree first.
type Poly = Vec<i128>;

fn poly_add(a: &Poly, b: &Poly) -> Poly {
    let mut out = vec![0; a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, x) in b.iter().enumerate() {
        out[i] += x;
    }
    out
}

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_trim(mut a: Poly) -> Poly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

type PolyMat = [Poly; 4];

fn polymat_mul(x: &PolyMat, y: &PolyMat) -> PolyMat {
    let e = |i: usize, j: usize| poly_add(&poly_mul(&x[2 * i], &y[j]), &poly_mul(&x[2 * i + 1], &y[2 + j]));
    [e(0, 0), e(0, 1), e(1, 0), e(1, 1)]
}

/// Riley polynomial: the (1,1) entry of `rho(w)` for `rho(a) = [[1,1],[0,1]]`,
/// `rho(b) = [[1,0],[u,1]]`, as integer coefficients (low degree first).
pub fn riley_polynomial(w: &Word) -> Vec<i128> {
    let a = [vec![1], vec![1], vec![], vec![1]];
    let a_inv = [vec![1], vec![-1], vec![], vec![1]];
    let b = [vec![1], vec![], vec![0, 1], vec![1]];
    let b_inv = [vec![1], vec![], vec![0, -1], vec![1]];
    let mut acc: PolyMat = [vec![1], vec![], vec![], vec![1]];
    for l in w.letters() {
        let m = match (l.gen, l.inverse) {
            (0, false) => &a,
            (0, true) => &a_inv,
            (_, false) => &b,
            (_, true) => &b_inv,
        };
        acc = polymat_mul(&acc, m);
    }
    poly_trim(acc[0].clone())
}

/// All complex roots by the Aberth–Ehrlich iteration, polished by Newton.
pub fn polynomial_roots(coeffs: &[f64]) -> Vec<Complex<f64>> {
    let mut c: Vec<f64> = coeffs.to_vec();
    while c.last() == Some(&0.0) {
        c.pop();
    }
    let n = c.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lead = c[n];
    let monic: Vec<Complex<f64>> = c.iter().map(|x| Complex::new(x / lead, 0.0)).collect();
    let eval = |z: Complex<f64>| {
        let mut p: Complex<f64> = Complex::zero();
        let mut dp: Complex<f64> = Complex::zero();
        for k in (0..=n).rev() {
            dp = dp * z + p;
            p = p * z + monic[k];
        }
        (p, dp)
    };
    let radius = 1.0 + monic[..n].iter().map(|x| x.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex<f64>> = (0..n)
        .map(|k| Complex::from_polar(radius * 0.5, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / n as f64))
        .collect();
    for _ in 0..500 {
        let mut moved: f64 = 0.0;
        for i in 0..n {
            let (p, dp) = eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio: Complex<f64> = p / dp;
            let sum: Complex<f64> = (0..n).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let step = ratio / (Complex::<f64>::one() - ratio * sum);
            z[i] -= step;
            moved = moved.max(step.norm());
        }
        if moved < 1e-15 {
            break;
        }
    }
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = eval(*zi);
            if dp.norm() > 0.0 {
                *zi -= p / dp;
            }
        }
    }
    z
}

/// Order in which roots are tried: non-real roots first by smallest
/// `|Im|`, then real part, then positive imaginary part; then real roots by
/// real part.
fn root_preference(roots: &[Complex<f64>]) -> Vec<Complex<f64>> {
    let is_real = |z: &Complex<f64>| z.im.abs() <= SEPARATION_TOL;
    let key = |z: &Complex<f64>| (z.im.abs(), z.re, -z.im);
    let mut nonreal: Vec<Complex<f64>> = roots.iter().copied().filter(|z| !is_real(z)).collect();
    nonreal.sort_by(|x, y| key(x).partial_cmp(&key(y)).expect("finite roots"));
    let mut real: Vec<Complex<f64>> = roots
        .iter()
        .filter(|z| is_real(z))
        .map(|z| Complex::new(z.re, 0.0))
        .collect();
    real.sort_by(|x, y| x.re.partial_cmp(&y.re).expect("finite roots"));
    nonreal.extend(real);
    nonreal
}

/// Parabolic representation of `<a, b | w a w^-1 b^-1>` at the preferred
/// Riley root meeting the defect bound.
fn riley_representation(entry_name: &str, p: &Presentation, w: &Word) -> Result<(RepAssignment<f64>, Complex<f64>)> {
    let poly = riley_polynomial(w);
    let coeffs: Vec<f64> = poly.iter().map(|&c| c as f64).collect();
    let mut best_defect = f64::INFINITY;
    for u in root_preference(&polynomial_roots(&coeffs)) {
        let ra = Mat2::from_real(1.0, 1.0, 0.0, 1.0);
        let rb = Mat2::new(Complex::one(), Complex::zero(), u, Complex::one());
        let rep = RepAssignment::new(p.clone(), vec![ra, rb])?;
        if rep.is_certified() {
            return Ok((rep, u));
        }
        best_defect = best_defect.min(rep.max_relator_defect);
    }
    Err(Error::NoRepresentationFound(format!(
        "{entry_name}: no Riley root gives relator defect <= {DEFECT_TOL:e} (best {best_defect:e})"
    )))
}

/// The certified parabolic representation used as the holonomy of a
/// two-bridge or figure-eight entry. Discreteness is not claimed.
pub fn holonomy_for(entry: &AtlasEntry) -> Result<RepAssignment<f64>> {
    holonomy_with_root(entry).map(|(r, _)| r)
}

/// As [`holonomy_for`], also returning the Riley root used.
pub fn holonomy_with_root(entry: &AtlasEntry) -> Result<(RepAssignment<f64>, Complex<f64>)> {
    match entry.kind {
        EntryKind::TwoBridge { p, q } => {
            riley_representation(&entry.name, &entry.presentation, &atlas::two_bridge_word(p, q))
        }
        EntryKind::FigureEight => {
            let base = atlas::two_bridge(5, 3)?;
            let (rep, u) = riley_representation(&base.name, &base.presentation, &atlas::two_bridge_word(5, 3))?;
            let images = atlas::figure_eight_dictionary().iter().map(|w| rep.evaluate(w)).collect();
            let transported = RepAssignment::new(entry.presentation.clone(), images)?;
            if !transported.is_certified() {
                return Err(Error::NoRepresentationFound(format!(
                    "fig8: transported representation has defect {:e}",
                    transported.max_relator_defect
                )));
            }
            Ok((transported, u))
        }
        _ => Err(Error::NoRepresentationFound(format!(
            "{}: holonomy is only available for two-bridge and figure-eight entries",
            entry.name
        ))),
    }
}
