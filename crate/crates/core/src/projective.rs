//! Points of `P^N(Q_p)`, the chordal metric, disks, and the affine chart
//! `(a_1, ..., a_N) -> (1 : a_1 : ... : a_N)`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{int_valuation, PadicRational, PrimeContext, Valuation};

/// A point of `P^N` stored through an integer lift `x` with `||x|| = 1`.
///
/// Lifts built by [`ProjectivePoint::new`] are primitive with a positive
/// leading entry. Images under maps are only normalized at `p`, so two
/// equal points may carry lifts differing by a unit; equality is decided
/// by the chordal distance.
#[derive(Debug, Clone)]
pub struct ProjectivePoint {
    ctx: PrimeContext,
    lift: Vec<BigInt>,
}

impl ProjectivePoint {
    /// `make_point`: the class of a nonzero rational vector.
    pub fn new(ctx: PrimeContext, coords: &[PadicRational]) -> Result<Self> {
        for c in coords {
            ctx.check(&c.context())?;
        }
        Self::from_rationals(ctx, coords.iter().map(PadicRational::value))
    }

    pub fn from_rationals<'a>(
        ctx: PrimeContext,
        coords: impl IntoIterator<Item = &'a BigRational>,
    ) -> Result<Self> {
        let coords: Vec<&BigRational> = coords.into_iter().collect();
        let den = coords
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = coords
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        Self::from_integers(ctx, ints)
    }

    /// Primitive integer representative with a positive leading entry.
    pub fn from_integers(ctx: PrimeContext, mut ints: Vec<BigInt>) -> Result<Self> {
        if ints.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        let content = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        if content.is_zero() {
            return Err(Error::ZeroVector);
        }
        let lead_negative = ints.iter().find(|c| !c.is_zero()).is_some_and(|c| c.is_negative());
        let content = if lead_negative { -content } else { content };
        for c in ints.iter_mut() {
            *c = &*c / &content;
        }
        Ok(Self { ctx, lift: ints })
    }

    /// Divide an integer vector by the largest power of `p` dividing all
    /// entries. Cheaper than [`from_integers`](Self::from_integers) since no
    /// gcd is taken; the result is normalized (`||x|| = 1`) but not primitive.
    pub fn from_integer_lift(ctx: PrimeContext, mut ints: Vec<BigInt>) -> Result<Self> {
        let p = ctx.p_big();
        let m = ints
            .iter()
            .filter(|c| !c.is_zero())
            .map(|c| int_valuation(c, &p))
            .min()
            .ok_or(Error::ZeroVector)?;
        if m > 0 {
            let pm = num_traits::pow(p, m as usize);
            for c in ints.iter_mut() {
                *c = &*c / &pm;
            }
        }
        Ok(Self { ctx, lift: ints })
    }

    pub fn parse(ctx: PrimeContext, s: &str) -> Result<Self> {
        let coords = s
            .split(',')
            .map(|c| PadicRational::parse(ctx, c))
            .collect::<Result<Vec<_>>>()?;
        Self::new(ctx, &coords)
    }

    pub fn context(&self) -> PrimeContext {
        self.ctx
    }

    /// The `N` of `P^N`.
    pub fn dimension(&self) -> usize {
        self.lift.len() - 1
    }

    pub fn integer_lift(&self) -> &[BigInt] {
        &self.lift
    }

    pub fn lift(&self) -> Vec<PadicRational> {
        self.lift
            .iter()
            .map(|c| PadicRational::from_int(self.ctx, c.clone()))
            .collect()
    }

    /// Same point with a primitive, sign-normalized lift.
    pub fn canonical(&self) -> Self {
        Self::from_integers(self.ctx, self.lift.clone()).expect("nonzero lift")
    }

    /// Indices whose lift coordinate is a p-adic unit.
    pub fn unit_indices(&self) -> Vec<usize> {
        let p = self.ctx.p_big();
        self.lift
            .iter()
            .enumerate()
            .filter(|(_, c)| !(*c % &p).is_zero())
            .map(|(i, _)| i)
            .collect()
    }

    fn check_compatible(&self, other: &ProjectivePoint) -> Result<()> {
        self.ctx.check(&other.ctx)?;
        if self.lift.len() != other.lift.len() {
            return Err(Error::DimensionMismatch {
                expected: self.lift.len(),
                found: other.lift.len(),
            });
        }
        Ok(())
    }

    /// The point at chordal distance exactly `p^(-w)` obtained by adding
    /// `p^w * unit * x_k` to coordinate `j`, where `k` is the first unit
    /// coordinate of the lift other than `j`.
    pub fn displaced(&self, j: usize, w: u32, unit: &BigInt) -> Result<ProjectivePoint> {
        let p = self.ctx.p_big();
        if (unit % &p).is_zero() {
            return Err(Error::BadRange(format!("{unit} is not a unit")));
        }
        if j >= self.lift.len() {
            return Err(Error::DimensionMismatch {
                expected: self.lift.len(),
                found: j + 1,
            });
        }
        let pivot = self
            .unit_indices()
            .into_iter()
            .find(|&k| k != j)
            .ok_or(Error::PivotNotUnit { pivot: j })?;
        let mut lift = self.lift.clone();
        lift[j] += num_traits::pow(p, w as usize) * unit * &self.lift[pivot];
        Ok(ProjectivePoint {
            ctx: self.ctx,
            lift,
        })
    }

    pub fn distance(&self, other: &ProjectivePoint) -> Result<ChordalDistance> {
        chordal_distance(self, other)
    }
}

impl PartialEq for ProjectivePoint {
    fn eq(&self, other: &Self) -> bool {
        matches!(chordal_distance(self, other), Ok(ChordalDistance::Zero))
    }
}

impl fmt::Display for ProjectivePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.lift.iter().enumerate() {
            if i > 0 {
                f.write_str(":")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

#[derive(Serialize, Deserialize)]
struct PointJson {
    coords: Vec<String>,
}

impl Serialize for ProjectivePoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PointJson {
            coords: self.lift.iter().map(ToString::to_string).collect(),
        }
        .serialize(s)
    }
}

impl ProjectivePoint {
    /// Parse `{"coords": ["a/b", ...]}`.
    pub fn from_json(ctx: PrimeContext, json: &str) -> Result<Self> {
        let raw: PointJson =
            serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
        let coords = raw
            .coords
            .iter()
            .map(|c| PadicRational::parse(ctx, c))
            .collect::<Result<Vec<_>>>()?;
        Self::new(ctx, &coords)
    }
}

/// `Δ(P, Q)`: `Zero` when `P = Q`, otherwise `Power(w)` meaning `p^(-w)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChordalDistance {
    Zero,
    Power(u64),
}

impl ChordalDistance {
    /// `-log_p Δ`, with `Infinite` for coincident points.
    pub fn valuation(self) -> Valuation {
        match self {
            ChordalDistance::Zero => Valuation::Infinite,
            ChordalDistance::Power(w) => Valuation::Finite(w as i64),
        }
    }

    pub fn approx(self, ctx: PrimeContext) -> f64 {
        match self {
            ChordalDistance::Zero => 0.0,
            ChordalDistance::Power(w) => (-(w as f64) * ctx.ln_p()).exp(),
        }
    }

    pub fn to_json(self, ctx: PrimeContext) -> serde_json::Value {
        let approx = crate::padic::round_sig(self.approx(ctx));
        match self {
            ChordalDistance::Zero => serde_json::json!({"zero": true, "delta_approx": approx}),
            ChordalDistance::Power(w) => serde_json::json!({"w": w, "delta_approx": approx}),
        }
    }
}

impl PartialOrd for ChordalDistance {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Ordered as real distances: `Zero` is the smallest.
impl Ord for ChordalDistance {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        other.valuation().cmp(&self.valuation())
    }
}

/// `min_{i<j} v(x_i y_j - x_j y_i)` over normalized lifts.
pub fn chordal_distance(a: &ProjectivePoint, b: &ProjectivePoint) -> Result<ChordalDistance> {
    a.check_compatible(b)?;
    let p = a.ctx.p_big();
    let (x, y) = (&a.lift, &b.lift);
    let mut best: Option<i64> = None;
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            let cross = &x[i] * &y[j] - &x[j] * &y[i];
            if cross.is_zero() {
                continue;
            }
            // Early exit: a unit cross term already gives the maximum distance.
            let v = int_valuation(&cross, &p);
            best = Some(best.map_or(v, |b| b.min(v)));
            if v == 0 {
                return Ok(ChordalDistance::Power(0));
            }
        }
    }
    Ok(match best {
        None => ChordalDistance::Zero,
        Some(w) => ChordalDistance::Power(w as u64),
    })
}

/// Open or closed disk `{Q : Δ(P, Q) < p^(-w)}` / `{Q : Δ(P, Q) <= p^(-w)}`.
#[derive(Debug, Clone)]
pub struct Disk {
    pub center: ProjectivePoint,
    pub radius_valuation: u64,
    pub closed: bool,
}

impl Disk {
    pub fn open(center: ProjectivePoint, radius_valuation: u64) -> Self {
        Self {
            center,
            radius_valuation,
            closed: false,
        }
    }

    pub fn closed(center: ProjectivePoint, radius_valuation: u64) -> Self {
        Self {
            center,
            radius_valuation,
            closed: true,
        }
    }

    pub fn contains(&self, q: &ProjectivePoint) -> Result<bool> {
        let w = chordal_distance(&self.center, q)?.valuation();
        let r = Valuation::Finite(self.radius_valuation as i64);
        Ok(if self.closed { w >= r } else { w > r })
    }
}

/// `(a_1, ..., a_N) -> (1 : a_1 : ... : a_N)` on the closed unit polydisk.
pub fn affine_embed(ctx: PrimeContext, a: &[PadicRational]) -> Result<ProjectivePoint> {
    let mut coords = Vec::with_capacity(a.len() + 1);
    coords.push(PadicRational::from_int(ctx, 1));
    for (index, c) in a.iter().enumerate() {
        ctx.check(&c.context())?;
        if c.valuation() < Valuation::Finite(0) {
            return Err(Error::NotIntegral { index });
        }
        coords.push(c.clone());
    }
    ProjectivePoint::new(ctx, &coords)
}

/// Dehomogenize at `pivot`, which must be a unit coordinate of the lift.
pub fn affine_extract(point: &ProjectivePoint, pivot: usize) -> Result<Vec<PadicRational>> {
    let x = &point.lift;
    if pivot >= x.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: pivot + 1,
        });
    }
    if (&x[pivot] % point.ctx.p_big()).is_zero() {
        return Err(Error::PivotNotUnit { pivot });
    }
    Ok(x.iter()
        .enumerate()
        .filter(|&(i, _)| i != pivot)
        .map(|(_, c)| {
            PadicRational::new(point.ctx, BigRational::new(c.clone(), x[pivot].clone()))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn ctx(p: u64) -> PrimeContext {
        PrimeContext::new(p).unwrap()
    }

    fn pt(p: u64, s: &str) -> ProjectivePoint {
        ProjectivePoint::parse(ctx(p), s).unwrap()
    }

    fn ints(p: &ProjectivePoint) -> Vec<i64> {
        p.integer_lift().iter().map(|c| c.to_i64().unwrap()).collect()
    }

    #[test]
    fn make_point_examples() {
        assert_eq!(ints(&pt(3, "3,9")), vec![1, 3]);
        let q = pt(5, "1/5,1");
        assert_eq!(ints(&q), vec![1, 5]);
        assert_eq!(crate::padic::sup_norm_valuation(&q.lift()), Valuation::Finite(0));
        assert_eq!(
            ProjectivePoint::parse(ctx(2), "0,0").unwrap_err(),
            Error::ZeroVector
        );
    }

    #[test]
    fn distance_examples() {
        assert_eq!(
            chordal_distance(&pt(3, "1,0"), &pt(3, "0,1")).unwrap(),
            ChordalDistance::Power(0)
        );
        assert_eq!(
            chordal_distance(&pt(7, "2,5,1"), &pt(7, "4,10,2")).unwrap(),
            ChordalDistance::Zero
        );
        assert_eq!(
            chordal_distance(&pt(3, "1,3"), &pt(3, "1,0")).unwrap(),
            ChordalDistance::Power(1)
        );
        assert!(matches!(
            chordal_distance(&pt(3, "1,3"), &pt(3, "1,0,0")),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn distance_ignores_lift_scaling() {
        let a = pt(3, "2,7,1/3");
        let b = pt(3, "18,63,3");
        assert_eq!(a, b);
        assert_eq!(
            chordal_distance(&a, &pt(3, "1,1,1")).unwrap(),
            chordal_distance(&b, &pt(3, "1,1,1")).unwrap()
        );
    }

    #[test]
    fn affine_embed_examples() {
        let c = ctx(3);
        let e = affine_embed(c, &[PadicRational::from_int(c, 3)]).unwrap();
        assert_eq!(ints(&e), vec![1, 3]);
        assert_eq!(
            affine_embed(c, &[PadicRational::from_frac(c, 1, 3)]).unwrap_err(),
            Error::NotIntegral { index: 0 }
        );
        let c5 = ctx(5);
        let e = affine_embed(
            c5,
            &[PadicRational::from_int(c5, 2), PadicRational::from_int(c5, 10)],
        )
        .unwrap();
        assert_eq!(ints(&e), vec![1, 2, 10]);
    }

    #[test]
    fn affine_extract_examples() {
        let c = ctx(3);
        assert_eq!(
            affine_extract(&pt(3, "1,3"), 0).unwrap(),
            vec![PadicRational::from_int(c, 3)]
        );
        assert_eq!(
            affine_extract(&pt(3, "3,1"), 1).unwrap(),
            vec![PadicRational::from_int(c, 3)]
        );
        assert_eq!(
            affine_extract(&pt(3, "1,3"), 1).unwrap_err(),
            Error::PivotNotUnit { pivot: 1 }
        );
    }

    #[test]
    fn displaced_points_sit_at_exact_distance() {
        let a = pt(3, "1,5,3");
        for w in 0..6 {
            let b = a.displaced(2, w, &BigInt::from(2)).unwrap();
            assert_eq!(chordal_distance(&a, &b).unwrap(), ChordalDistance::Power(w as u64));
        }
        assert!(a.displaced(1, 2, &BigInt::from(3)).is_err());
        assert!(pt(3, "1,0").displaced(0, 2, &BigInt::from(1)).is_err());
    }

    #[test]
    fn disk_membership() {
        let center = pt(3, "1,0");
        let open = Disk::open(center.clone(), 1);
        let closed = Disk::closed(center, 1);
        let near = pt(3, "1,9");
        let edge = pt(3, "1,3");
        assert!(open.contains(&near).unwrap());
        assert!(!open.contains(&edge).unwrap());
        assert!(closed.contains(&edge).unwrap());
        assert!(!closed.contains(&pt(3, "1,1")).unwrap());
    }

    #[test]
    fn point_json_roundtrip() {
        let c = ctx(5);
        let a = ProjectivePoint::from_json(c, r#"{"coords": ["1/5", "1"]}"#).unwrap();
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"{"coords":["1","5"]}"#);
        assert_eq!(ProjectivePoint::from_json(c, &s).unwrap(), a);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn coord(p: u64) -> impl Strategy<Value = BigRational> {
            (-2000i64..2000, 1i64..2000, 0u32..3).prop_map(move |(n, d, k)| {
                let d = if d % p as i64 == 0 { d + 1 } else { d };
                BigRational::new((n * (p as i64).pow(k)).into(), d.into())
            })
        }

        fn point(p: u64, len: usize) -> impl Strategy<Value = ProjectivePoint> {
            proptest::collection::vec(coord(p), len)
                .prop_filter("nonzero", |v| v.iter().any(|c| !c.is_zero()))
                .prop_map(move |v| ProjectivePoint::from_rationals(ctx(p), &v).unwrap())
        }

        fn unit_polydisk(p: u64, len: usize) -> impl Strategy<Value = Vec<PadicRational>> {
            proptest::collection::vec(coord(p), len)
                .prop_map(move |v| v.into_iter().map(|c| PadicRational::new(ctx(p), c)).collect())
        }

        proptest! {
            #[test]
            fn strong_triangle(a in point(3, 3), b in point(3, 3), c in point(3, 3)) {
                let ab = chordal_distance(&a, &b).unwrap();
                let bc = chordal_distance(&b, &c).unwrap();
                let ac = chordal_distance(&a, &c).unwrap();
                prop_assert_eq!(ab, chordal_distance(&b, &a).unwrap());
                prop_assert!(ac <= ab.max(bc));
                prop_assert_eq!(chordal_distance(&a, &a).unwrap(), ChordalDistance::Zero);
            }

            #[test]
            fn lift_invariance(a in point(5, 3), b in point(5, 3), n in 1i64..500, k in -3i64..3) {
                let scale = BigRational::new(n.into(), 7.into()) * ctx(5).power(k);
                let scaled: Vec<BigRational> = a.lift().iter().map(|c| c.value() * &scale).collect();
                let a2 = ProjectivePoint::from_rationals(ctx(5), &scaled).unwrap();
                prop_assert_eq!(chordal_distance(&a, &b).unwrap(), chordal_distance(&a2, &b).unwrap());
            }

            #[test]
            fn affine_chart_is_isometry(a in unit_polydisk(3, 2), b in unit_polydisk(3, 2)) {
                let c = ctx(3);
                let pa = affine_embed(c, &a).unwrap();
                let pb = affine_embed(c, &b).unwrap();
                let expect = a.iter().zip(&b).map(|(x, y)| (x - y).valuation()).min().unwrap();
                prop_assert_eq!(chordal_distance(&pa, &pb).unwrap().valuation(), expect);
                prop_assert_eq!(affine_extract(&pa, 0).unwrap(), a);
            }

            #[test]
            fn nearby_points_share_unit_indices(a in point(3, 3), k in 1u32..4, t in point(3, 3)) {
                // b = a + p^k t stays within distance < 1
                let pk = BigInt::from(3u64.pow(k));
                let lift: Vec<BigInt> = a.integer_lift().iter().zip(t.integer_lift())
                    .map(|(x, y)| x + &pk * y).collect();
                let b = ProjectivePoint::from_integers(ctx(3), lift).unwrap();
                let d = chordal_distance(&a, &b).unwrap();
                prop_assert!(d < ChordalDistance::Power(0));
                prop_assert_eq!(a.unit_indices(), b.unit_indices());
            }
        }
    }
}
