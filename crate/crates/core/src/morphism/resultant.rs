//! Exact resultants of `N+1` forms of a common degree.
//!
//! The Macaulay quotient `det(M) / det(M')` is computed with fraction-free
//! elimination over the integers. The Sylvester determinant for two binary
//! forms goes through rational Gaussian elimination instead, so that it can
//! serve as an independent check of the Macaulay route when `N = 1`.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::poly::{IntForm, IntPoly};

/// Seed for the unimodular changes of variables tried after permutations.
const CHANGE_OF_VARIABLES_SEED: u64 = 0x0005_eed0_f4e5;
const UNIMODULAR_TRIES: usize = 4;

/// Determinant by Bareiss elimination. Every intermediate division is exact.
pub fn bareiss_determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = !sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = t / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign {
        -det
    } else {
        det
    }
}

/// Determinant by Gaussian elimination over `Q`.
pub fn rational_determinant(mut m: Vec<Vec<BigRational>>) -> BigRational {
    let n = m.len();
    let mut det = BigRational::one();
    for k in 0..n {
        let Some(r) = (k..n).find(|&r| !m[r][k].is_zero()) else {
            return BigRational::zero();
        };
        if r != k {
            m.swap(k, r);
            det = -det;
        }
        let pivot = m[k][k].clone();
        det *= &pivot;
        for i in k + 1..n {
            if m[i][k].is_zero() {
                continue;
            }
            let factor = &m[i][k] / &pivot;
            for j in k..n {
                let t = &factor * &m[k][j];
                m[i][j] -= t;
            }
        }
    }
    det
}

/// Homogeneous resultant of two binary forms of degrees `f.len()-1` and
/// `g.len()-1`, given as coefficient lists in decreasing powers of `X`.
pub fn sylvester_resultant(f: &[BigRational], g: &[BigRational]) -> BigRational {
    let (m, n) = (f.len() - 1, g.len() - 1);
    let size = m + n;
    let mut rows = vec![vec![BigRational::zero(); size]; size];
    for i in 0..n {
        for (j, c) in f.iter().enumerate() {
            rows[i][i + j] = c.clone();
        }
    }
    for i in 0..m {
        for (j, c) in g.iter().enumerate() {
            rows[n + i][i + j] = c.clone();
        }
    }
    rational_determinant(rows)
}

/// All exponent vectors of total degree `deg` in `nvars` variables, in
/// decreasing lexicographic order.
pub fn monomials(nvars: usize, deg: u32) -> Vec<Vec<u32>> {
    fn go(prefix: &mut Vec<u32>, left: usize, deg: u32, out: &mut Vec<Vec<u32>>) {
        if left == 1 {
            prefix.push(deg);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=deg).rev() {
            prefix.push(e);
            go(prefix, left - 1, deg - e, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::with_capacity(nvars), nvars, deg, &mut out);
    out
}

/// The Macaulay matrix of `forms` (all of degree `d`) together with the
/// index set of its non-reduced rows/columns, which cut out `M'`.
struct MacaulayMatrix {
    matrix: Vec<Vec<BigInt>>,
    extraneous: Vec<usize>,
}

impl MacaulayMatrix {
    fn build(forms: &[IntForm], d: u32) -> Self {
        let nvars = forms.len();
        let top = nvars as u32 * (d - 1) + 1;
        let monos = monomials(nvars, top);
        let index: HashMap<&[u32], usize> = monos
            .iter()
            .enumerate()
            .map(|(i, m)| (m.as_slice(), i))
            .collect();
        let size = monos.len();
        let mut matrix = vec![vec![BigInt::zero(); size]; size];
        let mut extraneous = Vec::new();
        for (row, alpha) in monos.iter().enumerate() {
            let divisible = alpha.iter().filter(|&&a| a >= d).count();
            if divisible > 1 {
                extraneous.push(row);
            }
            // every monomial of this degree is divisible by some x_i^d
            let i = alpha.iter().position(|&a| a >= d).expect("degree exceeds sum of d-1");
            let mut shift = alpha.clone();
            shift[i] -= d;
            for (beta, c) in &forms[i] {
                let col: Vec<u32> = shift.iter().zip(beta).map(|(a, b)| a + b).collect();
                matrix[row][index[col.as_slice()]] = c.clone();
            }
        }
        Self { matrix, extraneous }
    }

    fn extraneous_minor(&self) -> Vec<Vec<BigInt>> {
        self.extraneous
            .iter()
            .map(|&r| self.extraneous.iter().map(|&c| self.matrix[r][c].clone()).collect())
            .collect()
    }

    /// `Some(det M / det M')`, or `None` when `det M' = 0`.
    fn quotient(&self) -> Option<BigInt> {
        let denom = bareiss_determinant(self.extraneous_minor());
        if denom.is_zero() {
            return None;
        }
        let numer = bareiss_determinant(self.matrix.clone());
        let (q, r) = numer.div_rem(&denom);
        debug_assert!(r.is_zero(), "Macaulay quotient must be exact");
        Some(q)
    }

    /// Perturb every form by `t x_i^d`; this adds `t I` to both `M` and
    /// `M'`. Both determinants become monic in `t`, and the resultant is the
    /// ratio of their lowest-order coefficients once `t^k` is matched.
    fn perturbed_quotient(&self) -> BigInt {
        let numer = shifted_charpoly(&self.matrix);
        let denom = shifted_charpoly(&self.extraneous_minor());
        let k = denom.iter().position(|c| !c.is_zero()).expect("monic");
        let (q, r) = numer[k].div_rem(&denom[k]);
        debug_assert!(r.is_zero(), "perturbed Macaulay quotient must be exact");
        q
    }
}

/// Coefficients (lowest degree first) of `det(M + t I)`, by exact
/// interpolation at `t = 0, 1, ..., n`.
fn shifted_charpoly(m: &[Vec<BigInt>]) -> Vec<BigInt> {
    let n = m.len();
    let xs: Vec<BigInt> = (0..=n).map(BigInt::from).collect();
    let ys: Vec<BigRational> = xs
        .iter()
        .map(|t| {
            let mut shifted = m.to_vec();
            for (i, row) in shifted.iter_mut().enumerate() {
                row[i] += t;
            }
            BigRational::from_integer(bareiss_determinant(shifted))
        })
        .collect();
    // Newton divided differences.
    let mut dd = ys;
    for level in 1..=n {
        for i in (level..=n).rev() {
            let den = BigRational::from_integer(&xs[i] - &xs[i - level]);
            dd[i] = (&dd[i] - &dd[i - 1]) / den;
        }
    }
    // Expand the Newton form into the monomial basis.
    let mut coeffs = vec![BigRational::zero(); n + 1];
    for i in (0..=n).rev() {
        // coeffs = coeffs * (t - xs[i]) + dd[i]
        let mut next = vec![BigRational::zero(); n + 1];
        for (j, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if j < n {
                next[j + 1] += c;
            }
            next[j] -= c * BigRational::from_integer(xs[i].clone());
        }
        next[0] += &dd[i];
        coeffs = next;
    }
    coeffs
        .into_iter()
        .map(|c| {
            debug_assert!(c.is_integer());
            c.to_integer()
        })
        .collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for rest in permutations(n - 1) {
        for pos in 0..=rest.len() {
            let mut p = rest.clone();
            p.insert(pos, n - 1);
            out.push(p);
        }
    }
    out.sort();
    out
}

fn permutation_matrix(perm: &[usize]) -> Vec<Vec<BigInt>> {
    let n = perm.len();
    (0..n)
        .map(|i| (0..n).map(|j| BigInt::from((perm[i] == j) as i32)).collect())
        .collect()
}

/// A random `L U` with unit diagonals, hence determinant 1.
fn unimodular_matrix(n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<BigInt>> {
    let mut lower = vec![vec![BigInt::zero(); n]; n];
    let mut upper = vec![vec![BigInt::zero(); n]; n];
    for i in 0..n {
        lower[i][i] = BigInt::one();
        upper[i][i] = BigInt::one();
        for j in 0..i {
            lower[i][j] = BigInt::from(rng.gen_range(-3i32..=3));
            upper[j][i] = BigInt::from(rng.gen_range(-3i32..=3));
        }
    }
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| &lower[i][k] * &upper[k][j]).sum())
                .collect()
        })
        .collect()
}

/// `F(A x)` for a square integer matrix `A`.
fn substitute(forms: &[IntForm], a: &[Vec<BigInt>]) -> Vec<IntForm> {
    let n = a.len();
    let linear: Vec<IntPoly> = a
        .iter()
        .map(|row| {
            let mut poly = IntPoly::new();
            for (k, c) in row.iter().enumerate() {
                if !c.is_zero() {
                    let mut e = vec![0u32; n];
                    e[k] = 1;
                    poly.insert(e, c.clone());
                }
            }
            poly
        })
        .collect();
    forms
        .iter()
        .map(|form| {
            let mut out = IntPoly::new();
            for (exps, c) in form {
                let mut term = IntPoly::constant(n, c.clone());
                for (j, &e) in exps.iter().enumerate() {
                    for _ in 0..e {
                        term = term.mul(&linear[j]);
                    }
                }
                out.add_assign(&term);
            }
            out.into_form()
        })
        .collect()
}

/// The Macaulay resultant of `N+1` integer forms of common degree `d`,
/// up to sign.
///
/// When `det M'` vanishes the forms are retried under every permutation of
/// the variables, then under a few seeded unimodular substitutions (each of
/// which changes `Res` by at most a sign), and finally through the
/// `t x_i^d` perturbation, which never degenerates.
pub fn macaulay_resultant(forms: &[IntForm], d: u32) -> BigInt {
    assert!(d >= 1 && !forms.is_empty());
    if forms.iter().any(|f| f.is_empty()) {
        return BigInt::zero();
    }
    let n = forms.len();
    let direct = MacaulayMatrix::build(forms, d);
    if let Some(res) = direct.quotient() {
        return res;
    }
    for perm in permutations(n).into_iter().skip(1).take(24) {
        let changed = substitute(forms, &permutation_matrix(&perm));
        if let Some(res) = MacaulayMatrix::build(&changed, d).quotient() {
            return res;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(CHANGE_OF_VARIABLES_SEED);
    for _ in 0..UNIMODULAR_TRIES {
        let changed = substitute(forms, &unimodular_matrix(n, &mut rng));
        if let Some(res) = MacaulayMatrix::build(&changed, d).quotient() {
            return res;
        }
    }
    direct.perturbed_quotient()
}

/// Resultant through the perturbation route only; used to cross-check.
pub fn macaulay_resultant_perturbed(forms: &[IntForm], d: u32) -> BigInt {
    if forms.iter().any(|f| f.is_empty()) {
        return BigInt::zero();
    }
    MacaulayMatrix::build(forms, d).perturbed_quotient()
}

/// Convert a binary form into Sylvester coefficient order (decreasing
/// powers of the first variable).
pub fn binary_coefficients(form: &BTreeMap<Vec<u32>, BigRational>, d: u32) -> Vec<BigRational> {
    (0..=d)
        .rev()
        .map(|a| {
            form.get(&vec![a, d - a])
                .cloned()
                .unwrap_or_else(BigRational::zero)
        })
        .collect()
}
