//! Reduction of normalized points and minimal lifts to the residue field `F_p`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::projective::ProjectivePoint;

fn mod_p(n: &BigInt, p: u64) -> u64 {
    let r = n % BigInt::from(p);
    let r = if r < BigInt::zero() { r + p } else { r };
    r.to_u64().expect("residue fits in u64")
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    acc
}

fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod(a, p - 2, p)
}

/// Reduce a p-integral rational modulo `p`.
pub(crate) fn reduce_rational(c: &BigRational, p: u64) -> u64 {
    let den = mod_p(c.denom(), p);
    assert!(den != 0, "reduction of a non-integral coefficient");
    mul_mod(mod_p(c.numer(), p), inv_mod(den, p), p)
}

/// A nonzero vector over `F_p`. Equality is projective: two residue
/// points are equal when they differ by a nonzero scalar.
#[derive(Debug, Clone, Eq, Serialize)]
pub struct ResiduePoint {
    p: u64,
    coords: Vec<u64>,
}

impl ResiduePoint {
    pub fn new(p: u64, coords: Vec<u64>) -> Self {
        let coords = coords.into_iter().map(|c| c % p).collect();
        Self { p, coords }
    }

    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    /// Scale so the first nonzero coordinate is 1.
    pub fn normalized(&self) -> ResiduePoint {
        let Some(&lead) = self.coords.iter().find(|&&c| c != 0) else {
            return self.clone();
        };
        let s = inv_mod(lead, self.p);
        ResiduePoint {
            p: self.p,
            coords: self.coords.iter().map(|&c| mul_mod(c, s, self.p)).collect(),
        }
    }
}

impl PartialEq for ResiduePoint {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.normalized().coords == other.normalized().coords
    }
}

impl std::hash::Hash for ResiduePoint {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        let n = self.normalized();
        n.p.hash(state);
        n.coords.hash(state);
    }
}

/// The coordinatewise reduction of a normalized lift.
pub fn reduce_point(point: &ProjectivePoint) -> ResiduePoint {
    let p = point.context().p();
    let coords: Vec<u64> = point.integer_lift().iter().map(|c| mod_p(c, p)).collect();
    let rp = ResiduePoint { p, coords };
    debug_assert!(!rp.is_zero(), "normalized lift reduces to a nonzero vector");
    rp
}

/// A map `F_p^{N+1} -> F_p^{N+1}` given by reduced forms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResidueMap {
    p: u64,
    forms: Vec<Vec<(Vec<u32>, u64)>>,
}

impl ResidueMap {
    pub(crate) fn from_forms<'a>(
        p: u64,
        forms: impl IntoIterator<Item = impl IntoIterator<Item = (&'a Vec<u32>, &'a BigRational)>>,
    ) -> Self {
        let forms = forms
            .into_iter()
            .map(|f| {
                f.into_iter()
                    .map(|(e, c)| (e.clone(), reduce_rational(c, p)))
                    .filter(|(_, c)| *c != 0)
                    .collect()
            })
            .collect();
        Self { p, forms }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Coefficients of each reduced form; zero coefficients are dropped.
    pub fn forms(&self) -> &[Vec<(Vec<u32>, u64)>] {
        &self.forms
    }

    pub fn evaluate(&self, x: &ResiduePoint) -> ResiduePoint {
        let p = self.p;
        let coords = self
            .forms
            .iter()
            .map(|form| {
                form.iter().fold(0u64, |acc, (e, c)| {
                    let term = e
                        .iter()
                        .zip(&x.coords)
                        .fold(*c, |t, (&k, &xi)| mul_mod(t, pow_mod(xi, k as u64, p), p));
                    (acc + term) % p
                })
            })
            .collect();
        ResiduePoint { p, coords }
    }
}
