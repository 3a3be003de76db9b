//! Green functions of a morphism: the one-step defect `g`, its truncated
//! series `g_n`, certified brackets for the modified Green function `ĝ`,
//! and the homogeneous Green function `G`.
//!
//! All values are exact multiples of `log p`. Along an orbit every term
//! `d^-k g(φ^k P)` lies in `[-v_res / d^(k+1), 0]`, which gives the one-sided
//! bracket `[g_n - C1/d^n, g_n]` with `C1 = v_res / (d - 1)`.

mod constants;
mod orbit;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::morphism::HomogeneousMap;
use crate::padic::{int_valuation, sup_norm_valuation, LogValue, PadicRational, PrimeContext};
use crate::projective::ProjectivePoint;

pub use constants::{
    holder_constants, lipschitz_constant, local_constancy_radius, min_bound_lemma,
    witness_depth, HolderConstants, MinBound, LEMMA_REL_TOL,
};
pub use orbit::{
    certify_fatou, classify_orbit, good_reduction_at, FatouCertificate, LocalConstancyEvidence,
    OrbitClassification,
};

/// Truncation depth used when no tolerance is given.
pub const DEFAULT_DEPTH: u32 = 20;

/// A certified bracket `[partial_sum - tail_bound, partial_sum]` for `ĝ(P)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreenEstimate {
    pub partial_sum: LogValue,
    pub tail_bound: LogValue,
    pub n_used: u32,
}

impl GreenEstimate {
    pub fn exact(value: LogValue) -> Self {
        let ctx = value.context();
        Self {
            partial_sum: value,
            tail_bound: LogValue::zero(ctx),
            n_used: 0,
        }
    }

    pub fn lower(&self) -> LogValue {
        &self.partial_sum - &self.tail_bound
    }

    pub fn upper(&self) -> LogValue {
        self.partial_sum.clone()
    }

    pub fn width(&self) -> &LogValue {
        &self.tail_bound
    }

    pub fn is_exact(&self) -> bool {
        self.tail_bound.is_zero()
    }

    pub fn contains(&self, value: &LogValue) -> bool {
        self.lower() <= *value && *value <= self.upper()
    }

    /// `self ⊆ other`.
    pub fn within(&self, other: &GreenEstimate) -> bool {
        other.lower() <= self.lower() && self.upper() <= other.upper()
    }

    pub fn shifted(&self, by: &LogValue) -> GreenEstimate {
        GreenEstimate {
            partial_sum: &self.partial_sum + by,
            tail_bound: self.tail_bound.clone(),
            n_used: self.n_used,
        }
    }
}

impl Serialize for GreenEstimate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("GreenEstimate", 5)?;
        st.serialize_field("partial_sum", &self.partial_sum)?;
        st.serialize_field("tail_bound", &self.tail_bound)?;
        st.serialize_field("n", &self.n_used)?;
        st.serialize_field("lower_approx", &crate::padic::round_sig(self.lower().approx()))?;
        st.serialize_field("upper_approx", &crate::padic::round_sig(self.upper().approx()))?;
        st.end()
    }
}

/// `g_Φ(P) = (1/d) log ||Φ(x)|| - log ||x||` for the minimal lift.
pub fn g(map: &HomogeneousMap, point: &ProjectivePoint) -> Result<LogValue> {
    let m = map.image_norm_valuation(point)?;
    Ok(LogValue::new(
        map.context(),
        BigRational::new(-BigInt::from(m), BigInt::from(map.degree())),
    ))
}

/// The valuations `m_k = v(Φ_min(x_k))`, `k < n`, along the normalized
/// orbit `x_{k+1} = Φ_min(x_k) / p^{m_k}`.
///
/// Since `0 <= m_k <= v_res`, each `m_k` is determined by `x_k` modulo
/// `p^{v_res + 1}`, and dividing by `p^{m_k}` costs `m_k` digits. Running
/// the orbit in `Z / p^K` with `K = (n + 1) v_res + 1` therefore yields the
/// exact `m_k` while keeping every coordinate below `p^K`.
pub fn orbit_defects(map: &HomogeneousMap, point: &ProjectivePoint, n: u32) -> Result<Vec<u64>> {
    map.evaluate_integral(point)?;
    let v = map.v_res();
    if v == 0 {
        return Ok(vec![0; n as usize]);
    }
    let ctx = map.context();
    let p = ctx.p_big();
    let mut precision = (n as u64 + 1) * v + 1;
    let mut modulus = num_traits::pow(p.clone(), precision as usize);
    let forms: Vec<_> = map
        .integral_forms()
        .iter()
        .map(|f| {
            f.iter()
                .map(|(e, c)| (e.clone(), c.mod_floor(&modulus)))
                .collect::<crate::morphism::poly::IntForm>()
        })
        .collect();
    let mut x: Vec<BigInt> = point
        .integer_lift()
        .iter()
        .map(|c| c.mod_floor(&modulus))
        .collect();
    let mut out = Vec::with_capacity(n as usize);
    for _ in 0..n {
        let y: Vec<BigInt> = crate::morphism::eval_integral(&forms, &x, map.degree())
            .into_iter()
            .map(|c| c.mod_floor(&modulus))
            .collect();
        let m = y
            .iter()
            .filter(|c| !c.is_zero())
            .map(|c| int_valuation(c, &p) as u64)
            .min()
            .expect("image norm is bounded below by the resultant");
        assert!(m <= v && m < precision, "image valuation {m} exceeds v_res {v}");
        out.push(m);
        precision -= m;
        let pm = num_traits::pow(p.clone(), m as usize);
        modulus = num_traits::pow(p.clone(), precision as usize);
        x = y.into_iter().map(|c| (c / &pm).mod_floor(&modulus)).collect();
    }
    Ok(out)
}

fn series_value(ctx: PrimeContext, d: u32, defects: &[u64]) -> LogValue {
    let d = BigInt::from(d);
    let mut sum = BigRational::zero();
    let mut scale = d.clone();
    for &m in defects {
        if m != 0 {
            sum -= BigRational::new(BigInt::from(m), scale.clone());
        }
        scale *= &d;
    }
    LogValue::new(ctx, sum)
}

/// `g_{Φ,n}(P) = Σ_{k<n} d^-k g(φ^k P)`.
pub fn g_n(map: &HomogeneousMap, point: &ProjectivePoint, n: u32) -> Result<LogValue> {
    let defects = orbit_defects(map, point, n)?;
    Ok(series_value(map.context(), map.degree(), &defects))
}

/// `g_n` by iterating `φ` in exact rational arithmetic. Coordinates grow
/// like `d^n`, so this is only practical for small `n`; it serves as an
/// independent reference for [`g_n`].
pub fn g_n_exact(map: &HomogeneousMap, point: &ProjectivePoint, n: u32) -> Result<LogValue> {
    let mut defects = Vec::with_capacity(n as usize);
    let mut cur = point.clone();
    for _ in 0..n {
        defects.push(map.image_norm_valuation(&cur)?);
        cur = map.apply(&cur)?;
    }
    Ok(series_value(map.context(), map.degree(), &defects))
}

/// `C1 / d^n` with `C1 = v_res / (d - 1)`.
pub fn tail_bound(map: &HomogeneousMap, n: u32) -> LogValue {
    let d = BigInt::from(map.degree());
    let c1 = BigRational::new(BigInt::from(map.v_res()), &d - BigInt::one());
    LogValue::new(map.context(), c1 / BigRational::from_integer(num_traits::pow(d, n as usize)))
}

/// Bracket for `ĝ(P)` at truncation depth `n`.
pub fn green_hat_n(map: &HomogeneousMap, point: &ProjectivePoint, n: u32) -> Result<GreenEstimate> {
    if map.v_res() == 0 {
        map.evaluate_integral(point)?;
        return Ok(GreenEstimate::exact(LogValue::zero(map.context())));
    }
    Ok(GreenEstimate {
        partial_sum: g_n(map, point, n)?,
        tail_bound: tail_bound(map, n),
        n_used: n,
    })
}

/// Least `n` with `C1 / d^n <= tol`.
pub fn depth_for_tolerance(map: &HomogeneousMap, tol: &LogValue) -> Result<u32> {
    if !tol.is_positive() {
        return Err(Error::BadRange("tolerance must be positive".into()));
    }
    let mut n = 0;
    while tail_bound(map, n) > *tol {
        n += 1;
    }
    Ok(n)
}

/// Certified bracket for `ĝ(P)` of width at most `tol`.
pub fn green_hat(map: &HomogeneousMap, point: &ProjectivePoint, tol: &LogValue) -> Result<GreenEstimate> {
    let n = depth_for_tolerance(map, tol)?;
    green_hat_n(map, point, n)
}

/// Bracket for `G_Φ(x) = ĝ(π(x)) + log ||x||`, for the lift `Φ` as given:
/// a lift `p^m Φ_min` shifts `G` by `-m / (d - 1)`.
pub fn green_homogeneous(
    map: &HomogeneousMap,
    x: &[PadicRational],
    tol: &LogValue,
) -> Result<GreenEstimate> {
    let n = depth_for_tolerance(map, tol)?;
    green_homogeneous_n(map, x, n)
}

pub fn green_homogeneous_n(map: &HomogeneousMap, x: &[PadicRational], n: u32) -> Result<GreenEstimate> {
    let ctx = map.context();
    let point = ProjectivePoint::new(ctx, x)?;
    let norm = sup_norm_valuation(x).finite().ok_or(Error::ZeroVector)?;
    let lift_shift = BigRational::new(
        BigInt::from(-map.scaling_exponent()),
        BigInt::from(map.degree() - 1),
    );
    let shift = LogValue::new(ctx, BigRational::from_integer(BigInt::from(-norm)) + lift_shift);
    Ok(green_hat_n(map, &point, n)?.shifted(&shift))
}
