//! Explicit constants: Lipschitz, local constancy radius, Hölder pair, and
//! the elementary minimization bound behind the Hölder exponent.

use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::morphism::HomogeneousMap;
use crate::padic::{round_sig, LogValue};

/// `log` of the Lipschitz constant `|Res(φ)|^-2`, i.e. `2 v_res log p`.
pub fn lipschitz_constant(map: &HomogeneousMap) -> LogValue {
    LogValue::from_int(map.context(), 2 * map.v_res() as i64)
}

/// `w` such that `g` is constant on pairs at distance `< p^-w = |Res(φ)|`.
pub fn local_constancy_radius(map: &HomogeneousMap) -> u64 {
    map.v_res()
}

/// `u = max{2d, p^(2 v_res)}` with the Hölder coefficient `2u log u / d`
/// and exponent `log d / log u`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HolderConstants {
    pub degree: u32,
    pub p: u64,
    pub two_d: u64,
    /// `2 v_res`, so that `|Res(φ)|^-2 = p^res_exponent`.
    pub res_exponent: u64,
    pub coefficient: f64,
    pub exponent: f64,
}

impl HolderConstants {
    pub fn new(degree: u32, p: u64, v_res: u64) -> Self {
        let two_d = 2 * degree as u64;
        let res_exponent = 2 * v_res;
        let mut c = Self {
            degree,
            p,
            two_d,
            res_exponent,
            coefficient: 0.0,
            exponent: 0.0,
        };
        let ln_u = c.ln_u();
        let u = ln_u.exp();
        c.coefficient = 2.0 * u * ln_u / degree as f64;
        c.exponent = (degree as f64).ln() / ln_u;
        c
    }

    /// Whether `u` comes from the resultant rather than from `2d`.
    pub fn resultant_branch(&self) -> bool {
        num_traits::pow(BigInt::from(self.p), self.res_exponent as usize) > BigInt::from(self.two_d)
    }

    /// `u` exactly.
    pub fn u(&self) -> BigInt {
        if self.resultant_branch() {
            num_traits::pow(BigInt::from(self.p), self.res_exponent as usize)
        } else {
            BigInt::from(self.two_d)
        }
    }

    pub fn ln_u(&self) -> f64 {
        if self.resultant_branch() {
            self.res_exponent as f64 * (self.p as f64).ln()
        } else {
            (self.two_d as f64).ln()
        }
    }

    /// The right-hand side `coefficient * Δ^exponent` for `Δ = p^-w`.
    pub fn bound_at(&self, w: u64) -> f64 {
        self.coefficient * (-(w as f64) * (self.p as f64).ln() * self.exponent).exp()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "u": self.u().to_string(),
            "branch": if self.resultant_branch() { "resultant" } else { "2d" },
            "two_d": self.two_d,
            "res_exponent": self.res_exponent,
            "coefficient": round_sig(self.coefficient),
            "exponent": round_sig(self.exponent),
        })
    }
}

pub fn holder_constants(map: &HomogeneousMap) -> HolderConstants {
    HolderConstants::new(map.degree(), map.context().p(), map.v_res())
}

/// Relative slack allowed when comparing the brute-force minimum with the
/// closed-form bound in floating point.
pub const LEMMA_REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinBound {
    pub min_value: f64,
    pub argmin: u32,
    pub bound: f64,
    pub holds: bool,
}

/// Brute-force `min_{1<=k<=k_max} D a^k + b^-k` against `2a D^(log b / log ab)`.
pub fn min_bound_lemma(dist: f64, a: f64, b: f64, k_max: u32) -> Result<MinBound> {
    if !(dist > 0.0 && dist <= 1.0) {
        return Err(Error::BadRange(format!("D = {dist} not in (0, 1]")));
    }
    if !(a > 1.0 && a.is_finite()) || !(b > 1.0 && b.is_finite()) {
        return Err(Error::BadRange(format!("a = {a}, b = {b} must exceed 1")));
    }
    if k_max == 0 {
        return Err(Error::BadRange("k_max must be positive".into()));
    }
    let (mut min_value, mut argmin) = (f64::INFINITY, 0);
    for k in 1..=k_max {
        let v = dist * a.powi(k as i32) + b.powi(-(k as i32));
        if v < min_value {
            min_value = v;
            argmin = k;
        }
    }
    let bound = 2.0 * a * dist.powf(b.ln() / (a * b).ln());
    Ok(MinBound {
        min_value,
        argmin,
        bound,
        holds: min_value <= bound * (1.0 + LEMMA_REL_TOL),
    })
}

/// Smallest `k_max` that reaches the witness `floor(t) + 1` used in the
/// bound's derivation, `t = log(1/D) / log(ab)`.
pub fn witness_depth(dist: f64, a: f64, b: f64) -> u32 {
    let t = (1.0 / dist).ln() / (a * b).ln();
    (t.floor() as u32).saturating_add(1)
}
