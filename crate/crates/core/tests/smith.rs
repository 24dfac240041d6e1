use fillscope_core::homology::{smith_normal_form, Matrix};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Dense = Vec<Vec<BigInt>>;

fn dense(m: &Matrix<BigInt>) -> Dense {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

fn product(a: &Dense, b: &Dense, inner: usize) -> Dense {
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(BigInt::zero(), |acc, k| acc + &row[k] * &b[k][j]))
                .collect()
        })
        .collect()
}

/// Bareiss fraction-free elimination.
fn det(m: &Dense) -> BigInt {
    let n = m.len();
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    if n == 0 {
        BigInt::one()
    } else {
        sign * &a[n - 1][n - 1]
    }
}

#[test]
fn smith_factorization_on_random_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0009);
    for case in 0..1000 {
        let r = rng.gen_range(1..=6);
        let c = rng.gen_range(1..=6);
        let spread = if case % 3 == 0 { 100 } else { 6 };
        let entries: Vec<BigInt> = (0..r * c).map(|_| BigInt::from(rng.gen_range(-spread..=spread))).collect();
        let a = Matrix::from_rows(r, c, entries);
        let f = smith_normal_form(&a);
        let (s, u, v) = (dense(&f.s), dense(&f.u), dense(&f.v));
        assert_eq!(product(&product(&u, &dense(&a), r), &v, c), s, "case {case}: S != U A V for {a}");
        assert!(det(&u).abs().is_one(), "case {case}: U not unimodular");
        assert!(det(&v).abs().is_one(), "case {case}: V not unimodular");
        let diag: Vec<&BigInt> = (0..r.min(c)).map(|i| &s[i][i]).collect();
        for i in 0..r {
            for j in 0..c {
                if i != j {
                    assert!(s[i][j].is_zero(), "case {case}: off-diagonal entry");
                }
            }
        }
        for w in diag.windows(2) {
            assert!(!w[0].is_negative());
            if w[0].is_zero() {
                assert!(w[1].is_zero(), "case {case}: zero before nonzero");
            } else {
                assert!((w[1] % w[0]).is_zero(), "case {case}: divisibility chain broken");
            }
        }
    }
}

#[test]
fn bareiss_determinant_sanity() {
    let m: Dense = vec![
        vec![2.into(), 1.into(), 0.into()],
        vec![1.into(), 3.into(), 1.into()],
        vec![0.into(), 1.into(), 4.into()],
    ];
    assert_eq!(det(&m), BigInt::from(18));
    let singular: Dense = vec![vec![0.into(), 1.into()], vec![0.into(), 2.into()]];
    assert!(det(&singular).is_zero());
}
