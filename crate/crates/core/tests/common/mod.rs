//! Brute-force oracles shared by the integration tests. Nothing here calls
//! the crate's own enumeration or model-matrix code.
#![allow(dead_code)]

use bell_lp::Rational;
use num_traits::{One, Zero};
use rand::rngs::StdRng;
use rand::Rng;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn z(n: i64) -> Rational {
    q(n, 1)
}

/// Outcome values per party and measurement.
pub type Outcomes = Vec<Vec<Vec<Rational>>>;

pub fn dichotomic(measurements: &[usize]) -> Outcomes {
    measurements
        .iter()
        .map(|&m| vec![vec![z(1), z(-1)]; m])
        .collect()
}

/// Mixed-radix digits of `index`, most significant first.
fn digits(mut index: usize, radices: &[usize]) -> Vec<usize> {
    let mut out = vec![0; radices.len()];
    for k in (0..radices.len()).rev() {
        out[k] = index % radices[k];
        index /= radices[k];
    }
    out
}

pub fn num_settings(o: &Outcomes) -> usize {
    o.iter().map(|ms| ms.len() + 1).product()
}

pub fn num_strategies(o: &Outcomes) -> usize {
    o.iter().flatten().map(Vec::len).product()
}

/// `M[row][col]` straight from the definition: the product over parties of
/// the outcome the strategy assigns to the chosen measurement (1 for the
/// identity). Rows: last party fastest, digit 0 = identity. Columns: slots in
/// party-major order, last slot fastest.
pub fn oracle_entry(o: &Outcomes, row: usize, col: usize) -> Rational {
    let setting = digits(row, &o.iter().map(|ms| ms.len() + 1).collect::<Vec<_>>());
    let slot_sizes: Vec<usize> = o.iter().flatten().map(Vec::len).collect();
    let strategy = digits(col, &slot_sizes);
    let mut v = Rational::one();
    let mut offset = 0;
    for (p, ms) in o.iter().enumerate() {
        if setting[p] > 0 {
            let j = setting[p] - 1;
            v *= &ms[j][strategy[offset + j]];
        }
        offset += ms.len();
    }
    v
}

pub fn oracle_matrix(o: &Outcomes) -> Vec<Vec<Rational>> {
    (0..num_settings(o))
        .map(|r| {
            (0..num_strategies(o))
                .map(|c| oracle_entry(o, r, c))
                .collect()
        })
        .collect()
}

/// `Σ_i q_i M[i+1][λ]` for every strategy `λ`.
pub fn strategy_values(m: &[Vec<Rational>], coeffs: &[Rational]) -> Vec<Rational> {
    (0..m[0].len())
        .map(|c| {
            coeffs
                .iter()
                .enumerate()
                .fold(Rational::zero(), |acc, (i, q)| acc + q * &m[i + 1][c])
        })
        .collect()
}

pub fn max_of(v: &[Rational]) -> Rational {
    v.iter().max().cloned().expect("nonempty")
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// A random rational probability vector over `n` strategies.
pub fn random_distribution(rng: &mut StdRng, n: usize, max_weight: i64) -> Vec<Rational> {
    let mut w: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=max_weight)).collect();
    if w.iter().all(|&x| x == 0) {
        w[rng.gen_range(0..n)] = 1;
    }
    let total: i64 = w.iter().sum();
    w.into_iter().map(|x| q(x, total)).collect()
}

pub fn apply(m: &[Vec<Rational>], p: &[Rational]) -> Vec<Rational> {
    m.iter().map(|row| dot(row, p)).collect()
}

/// CHSH correlators `(⟨A1B1⟩, ⟨A1B2⟩, ⟨A2B1⟩, ⟨A2B2⟩)` in the 9-entry layout
/// `I, B1, B2, A1, A1B1, A1B2, A2, A2B1, A2B2`, marginals zero.
pub fn chsh_vector(corr: [Rational; 4]) -> Vec<Rational> {
    let [a, b, c, d] = corr;
    vec![z(1), z(0), z(0), z(0), a, b, z(0), c, d]
}

/// The 8 CHSH expressions as coefficient vectors over the 8 correlators.
pub fn chsh_family() -> Vec<Vec<Rational>> {
    let mut out = Vec::new();
    for minus in 0..4 {
        for sign in [1, -1] {
            let mut t = [sign; 4];
            t[minus] = -sign;
            let mut v = vec![z(0); 8];
            for (k, slot) in [3usize, 4, 6, 7].iter().enumerate() {
                v[*slot] = z(t[k]);
            }
            out.push(v);
        }
    }
    out
}

/// Exact rank by fraction-free elimination on a copy.
pub fn oracle_rank(rows: &[Vec<Rational>]) -> usize {
    let mut a: Vec<Vec<Rational>> = rows.to_vec();
    let cols = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in 0..a.len() {
            if i != r && !a[i][c].is_zero() {
                let f = &a[i][c] / &a[r][c];
                let pivot = a[r].clone();
                for (x, y) in a[i].iter_mut().zip(&pivot) {
                    *x -= &f * y;
                }
            }
        }
        r += 1;
    }
    r
}

/// Solves a square nonsingular system exactly; `None` if singular.
pub fn oracle_solve(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let n = a.len();
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(r, v)| r.iter().cloned().chain([v.clone()]).collect())
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !m[i][c].is_zero())?;
        m.swap(c, p);
        let pivot = m[c].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != c && !row[c].is_zero() {
                let f = &row[c] / &pivot[c];
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x -= &f * y;
                }
            }
        }
    }
    Some((0..n).map(|i| &m[i][n] / &m[i][i]).collect())
}
