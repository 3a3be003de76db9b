//! Homogeneous polynomial maps `A^{N+1} -> A^{N+1}` inducing morphisms of
//! `P^N`, their minimal lifts and resultants, and reduction mod `p`.

pub mod poly;
pub mod residue;
pub mod resultant;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{rational_valuation, PadicRational, PrimeContext, Valuation};
use crate::projective::ProjectivePoint;

pub use poly::{gauss_norm_valuation, Polynomial};
pub use residue::{reduce_point, ResidueMap, ResiduePoint};

/// Exponent vector -> rational coefficient.
pub type Form = BTreeMap<Vec<u32>, BigRational>;

/// `Φ = (Φ_0, ..., Φ_N)`, all forms of degree `d >= 2`, with no common
/// nontrivial zero.
///
/// The minimal lift and its resultant valuation are computed once at
/// construction.
#[derive(Debug, Clone)]
pub struct HomogeneousMap {
    ctx: PrimeContext,
    dim: usize,
    degree: u32,
    forms: Vec<Form>,
    scaling: i64,
    minimal: Vec<Form>,
    // minimal forms times a common denominator prime to p
    integral: Vec<poly::IntForm>,
    v_res: u64,
}

/// A lift with `||Φ|| = 1`, and `m` such that the original map is `p^m` times it.
#[derive(Debug, Clone)]
pub struct MinimalLift {
    pub map: HomogeneousMap,
    pub scaling_exponent: i64,
}

/// `v_p(Res(Φ_min))`; `|Res(φ)| = p^(-v_res)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ResultantValuation {
    pub v_res: u64,
}

impl ResultantValuation {
    pub fn to_json(self, ctx: PrimeContext) -> serde_json::Value {
        serde_json::json!({
            "v_res": self.v_res,
            "abs": format!("{}^-{}", ctx.p(), self.v_res),
        })
    }
}

impl HomogeneousMap {
    pub fn new(
        ctx: PrimeContext,
        dim: usize,
        degree: u32,
        forms: Vec<Vec<(Vec<u32>, BigRational)>>,
    ) -> Result<Self> {
        if degree < 2 {
            return Err(Error::BadRange(format!("degree {degree} < 2")));
        }
        if forms.len() != dim + 1 {
            return Err(Error::DimensionMismatch {
                expected: dim + 1,
                found: forms.len(),
            });
        }
        let mut tables = Vec::with_capacity(forms.len());
        for (i, terms) in forms.into_iter().enumerate() {
            let mut table = Form::new();
            for (exps, c) in terms {
                if exps.len() != dim + 1 {
                    return Err(Error::DimensionMismatch {
                        expected: dim + 1,
                        found: exps.len(),
                    });
                }
                if exps.iter().sum::<u32>() != degree {
                    return Err(Error::DegreeMismatch {
                        form: i,
                        exps,
                        degree,
                    });
                }
                *table.entry(exps).or_insert_with(BigRational::zero) += c;
            }
            table.retain(|_, c| !c.is_zero());
            tables.push(table);
        }
        Self::from_tables(ctx, dim, degree, tables)
    }

    fn from_tables(ctx: PrimeContext, dim: usize, degree: u32, forms: Vec<Form>) -> Result<Self> {
        let scaling = forms
            .iter()
            .flat_map(|f| f.values())
            .map(|c| rational_valuation(c, ctx.p()))
            .min()
            .and_then(Valuation::finite)
            .ok_or(Error::NotAMorphism)?;
        let shift = ctx.power(-scaling);
        let minimal: Vec<Form> = forms
            .iter()
            .map(|f| f.iter().map(|(e, c)| (e.clone(), c * &shift)).collect())
            .collect();
        let integral = clear_denominators(&minimal);
        let res = resultant::macaulay_resultant(&integral, degree);
        if res.is_zero() {
            return Err(Error::NotAMorphism);
        }
        // integral = L * minimal with L a unit at p, so valuations agree
        let v_res = crate::padic::int_valuation(&res, &ctx.p_big());
        Ok(Self {
            ctx,
            dim,
            degree,
            forms,
            scaling,
            minimal,
            integral,
            v_res: v_res as u64,
        })
    }

    pub fn context(&self) -> PrimeContext {
        self.ctx
    }

    /// The `N` of `P^N`.
    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn forms(&self) -> &[Form] {
        &self.forms
    }

    /// `v_p` of the minimal resultant.
    pub fn v_res(&self) -> u64 {
        self.v_res
    }

    pub fn minimal_lift(&self) -> MinimalLift {
        let map = HomogeneousMap {
            forms: self.minimal.clone(),
            scaling: 0,
            ..self.clone()
        };
        MinimalLift {
            map,
            scaling_exponent: self.scaling,
        }
    }

    /// `m` with `Φ = p^m Φ_min`.
    pub fn scaling_exponent(&self) -> i64 {
        self.scaling
    }

    pub fn resultant_valuation(&self) -> ResultantValuation {
        ResultantValuation { v_res: self.v_res }
    }

    /// The exact resultant of the forms as given (not of the minimal lift),
    /// up to sign.
    pub fn resultant(&self) -> BigRational {
        let mut scale = BigRational::one();
        let mut ints = Vec::with_capacity(self.forms.len());
        let power = num_traits::pow(self.degree as usize, self.dim) as usize;
        for form in &self.forms {
            let den = form.values().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
            ints.push(
                form.iter()
                    .map(|(e, c)| (e.clone(), (c * BigRational::from_integer(den.clone())).to_integer()))
                    .collect(),
            );
            // Res is homogeneous of degree d^N in the coefficients of each form
            scale *= BigRational::from_integer(num_traits::pow(den, power));
        }
        BigRational::from_integer(resultant::macaulay_resultant(&ints, self.degree)) / scale
    }

    /// Exact evaluation of the forms as given.
    pub fn evaluate(&self, x: &[PadicRational]) -> Result<Vec<PadicRational>> {
        self.check_len(x.len())?;
        for c in x {
            self.ctx.check(&c.context())?;
        }
        let xs: Vec<&BigRational> = x.iter().map(PadicRational::value).collect();
        Ok(self
            .forms
            .iter()
            .map(|f| PadicRational::new(self.ctx, eval_rational_form(f, &xs)))
            .collect())
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.dim + 1 {
            return Err(Error::DimensionMismatch {
                expected: self.dim + 1,
                found: len,
            });
        }
        Ok(())
    }

    fn check_point(&self, point: &ProjectivePoint) -> Result<()> {
        self.ctx.check(&point.context())?;
        self.check_len(point.dimension() + 1)
    }

    /// `L * Φ_min(x)` on the integer lift of `point`, with `L` a p-adic unit.
    pub fn evaluate_integral(&self, point: &ProjectivePoint) -> Result<Vec<BigInt>> {
        self.check_point(point)?;
        Ok(eval_integral(&self.integral, point.integer_lift(), self.degree))
    }

    /// `φ(P)`.
    pub fn apply(&self, point: &ProjectivePoint) -> Result<ProjectivePoint> {
        let image = self.evaluate_integral(point)?;
        ProjectivePoint::from_integer_lift(self.ctx, image)
    }

    /// `min_i v(Φ_min(x)_i)` for the normalized lift `x` of `point`; lies in
    /// `[0, v_res]`.
    pub fn image_norm_valuation(&self, point: &ProjectivePoint) -> Result<u64> {
        let image = self.evaluate_integral(point)?;
        let p = self.ctx.p_big();
        image
            .iter()
            .filter(|c| !c.is_zero())
            .map(|c| crate::padic::int_valuation(c, &p) as u64)
            .min()
            .ok_or(Error::NotAMorphism)
    }

    pub fn reduce(&self) -> ResidueMap {
        ResidueMap::from_forms(self.ctx.p(), self.minimal.iter().map(|f| f.iter()))
    }

    pub fn integral_forms(&self) -> &[poly::IntForm] {
        &self.integral
    }

    /// `c Φ` for a nonzero rational `c`.
    pub fn scaled(&self, c: &BigRational) -> Result<Self> {
        if c.is_zero() {
            return Err(Error::ZeroArgument);
        }
        let forms = self
            .forms
            .iter()
            .map(|f| f.iter().map(|(e, v)| (e.clone(), v * c)).collect())
            .collect();
        let shift = rational_valuation(c, self.ctx.p())
            .finite()
            .expect("nonzero scale");
        Ok(Self {
            forms,
            scaling: self.scaling + shift,
            ..self.clone()
        })
    }
}

impl MinimalLift {
    pub fn reduce(&self) -> ResidueMap {
        self.map.reduce()
    }
}

/// `reduce_map`.
pub fn reduce_map(lift: &MinimalLift) -> ResidueMap {
    lift.reduce()
}

fn clear_denominators(forms: &[Form]) -> Vec<poly::IntForm> {
    let den = forms
        .iter()
        .flat_map(|f| f.values())
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    forms
        .iter()
        .map(|f| {
            f.iter()
                .map(|(e, c)| (e.clone(), c.numer() * (&den / c.denom())))
                .collect()
        })
        .collect()
}

fn eval_rational_form(form: &Form, x: &[&BigRational]) -> BigRational {
    let mut acc = BigRational::zero();
    for (e, c) in form {
        let mut t = c.clone();
        for (xi, &k) in x.iter().zip(e) {
            if k > 0 {
                t *= num_traits::pow((*xi).clone(), k as usize);
            }
        }
        acc += t;
    }
    acc
}

/// Evaluate integer forms of degree `d` at an integer vector.
pub(crate) fn eval_integral(forms: &[poly::IntForm], x: &[BigInt], d: u32) -> Vec<BigInt> {
    // powers[j][k] = x_j^k
    let powers: Vec<Vec<BigInt>> = x
        .iter()
        .map(|xi| {
            let mut pw = Vec::with_capacity(d as usize + 1);
            pw.push(BigInt::one());
            for k in 1..=d as usize {
                let next = &pw[k - 1] * xi;
                pw.push(next);
            }
            pw
        })
        .collect();
    forms
        .iter()
        .map(|form| {
            let mut acc = BigInt::zero();
            for (e, c) in form {
                let mut t = c.clone();
                for (j, &k) in e.iter().enumerate() {
                    if k > 0 {
                        t *= &powers[j][k as usize];
                    }
                }
                acc += t;
            }
            acc
        })
        .collect()
}

#[derive(Debug, Serialize, Deserialize)]
struct TermJson {
    exps: Vec<u32>,
    coeff: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct MapJson {
    p: u64,
    #[serde(rename = "N")]
    n: usize,
    d: u32,
    forms: Vec<Vec<TermJson>>,
}

impl HomogeneousMap {
    /// `parse_map` from the JSON map format.
    pub fn from_json(json: &str) -> Result<Self> {
        let raw: MapJson = serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
        let ctx = PrimeContext::new(raw.p)?;
        let forms = raw
            .forms
            .into_iter()
            .map(|terms| {
                terms
                    .into_iter()
                    .map(|t| Ok((t.exps, crate::padic::parse_rational(&t.coeff)?)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(ctx, raw.n, raw.d, forms)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let raw = MapJson {
            p: self.ctx.p(),
            n: self.dim,
            d: self.degree,
            forms: self
                .forms
                .iter()
                .map(|f| {
                    f.iter()
                        .map(|(e, c)| TermJson {
                            exps: e.clone(),
                            coeff: c.to_string(),
                        })
                        .collect()
                })
                .collect(),
        };
        serde_json::to_value(raw).expect("map serializes")
    }

    /// Parse a compact textual map such as `"X^2+3*Y^2 : Y^2"` over `P^N`
    /// with variables `X, Y, Z, W` (or `x0, x1, ...`).
    pub fn parse_forms(ctx: PrimeContext, text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        let dim = parts.len() - 1;
        let mut forms = Vec::with_capacity(parts.len());
        let mut degree = None;
        for part in &parts {
            let terms = parse_form(part, dim + 1)?;
            for (e, _) in &terms {
                let d: u32 = e.iter().sum();
                degree.get_or_insert(d);
            }
            forms.push(terms);
        }
        let degree = degree.ok_or(Error::NotAMorphism)?;
        Self::new(ctx, dim, degree, forms)
    }
}

fn parse_form(text: &str, nvars: usize) -> Result<Vec<(Vec<u32>, BigRational)>> {
    let bad = |what: &str| Error::Parse(format!("bad term `{what}` in `{text}`"));
    let mut out = Vec::new();
    let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let mut terms = Vec::new();
    let mut cur = String::new();
    for ch in cleaned.chars() {
        if (ch == '+' || ch == '-') && !cur.is_empty() && !cur.ends_with('^') {
            terms.push(std::mem::take(&mut cur));
        }
        cur.push(ch);
    }
    if !cur.is_empty() {
        terms.push(cur);
    }
    for term in terms {
        let (sign, body) = match term.strip_prefix('-') {
            Some(rest) => (-1, rest),
            None => (1, term.strip_prefix('+').unwrap_or(&term)),
        };
        let mut coeff = BigRational::from_integer(sign.into());
        let mut exps = vec![0u32; nvars];
        for factor in body.split('*') {
            if factor.is_empty() {
                return Err(bad(&term));
            }
            let (base, power) = match factor.split_once('^') {
                Some((b, e)) => (b, e.parse::<u32>().map_err(|_| bad(&term))?),
                None => (factor, 1),
            };
            match variable_index(base) {
                Some(i) if i < nvars => exps[i] += power,
                Some(_) => return Err(bad(&term)),
                None => {
                    let c = crate::padic::parse_rational(base)?;
                    coeff *= num_traits::pow(c, power as usize);
                }
            }
        }
        out.push((exps, coeff));
    }
    Ok(out)
}

fn variable_index(s: &str) -> Option<usize> {
    match s {
        "X" | "x" => Some(0),
        "Y" | "y" => Some(1),
        "Z" | "z" => Some(2),
        "W" | "w" => Some(3),
        _ => s
            .strip_prefix('x')
            .or_else(|| s.strip_prefix('X'))
            .and_then(|i| i.parse().ok()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    fn ctx(p: u64) -> PrimeContext {
        PrimeContext::new(p).unwrap()
    }

    fn map(p: u64, s: &str) -> HomogeneousMap {
        HomogeneousMap::parse_forms(ctx(p), s).unwrap()
    }

    fn q(p: u64, n: i64) -> PadicRational {
        PadicRational::from_int(ctx(p), n)
    }

    #[test]
    fn parse_map_examples() {
        let json = r#"{"p": 3, "N": 1, "d": 2, "forms": [[{"exps": [2,0], "coeff": "1"}], [{"exps": [0,2], "coeff": "1"}]]}"#;
        assert!(HomogeneousMap::from_json(json).is_ok());
        let json = r#"{"p": 3, "N": 1, "d": 2, "forms": [[{"exps": [2,0], "coeff": "1"}], [{"exps": [1,1], "coeff": "1"}]]}"#;
        assert_eq!(HomogeneousMap::from_json(json).unwrap_err(), Error::NotAMorphism);
        let json = r#"{"p": 3, "N": 1, "d": 2, "forms": [[{"exps": [1,2], "coeff": "1"}], [{"exps": [0,2], "coeff": "1"}]]}"#;
        assert!(matches!(
            HomogeneousMap::from_json(json).unwrap_err(),
            Error::DegreeMismatch { form: 0, .. }
        ));
        let json = r#"{"p": 4, "N": 1, "d": 2, "forms": [[{"exps": [2,0], "coeff": "1"}], [{"exps": [0,2], "coeff": "1"}]]}"#;
        assert_eq!(HomogeneousMap::from_json(json).unwrap_err(), Error::BadPrime(4));
        assert!(matches!(
            HomogeneousMap::from_json("{"),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn map_json_roundtrip() {
        let m = map(5, "X^2+X*Y : Y^2+3*X^2");
        let again = HomogeneousMap::from_json(&m.to_json().to_string()).unwrap();
        assert_eq!(again.forms(), m.forms());
    }

    #[test]
    fn text_forms() {
        let m = map(3, "X^2 - 1/2*Y^2 : -X*Y + 3*Y^2");
        let f0 = &m.forms()[0];
        assert_eq!(f0[&vec![0, 2]], BigRational::new((-1).into(), 2.into()));
        assert_eq!(m.forms()[1][&vec![1, 1]], BigRational::from_integer((-1).into()));
        assert!(HomogeneousMap::parse_forms(ctx(3), "X^2 : Q^2").is_err());
    }

    #[test]
    fn minimal_lift_examples() {
        let m = map(3, "3*X^2 : 3*Y^2").minimal_lift();
        assert_eq!(m.scaling_exponent, 1);
        assert_eq!(m.map.forms(), map(3, "X^2 : Y^2").forms());
        let m = map(3, "X^2 : 3*Y^2").minimal_lift();
        assert_eq!(m.scaling_exponent, 0);
        assert_eq!(m.map.forms(), map(3, "X^2 : 3*Y^2").forms());
        let m = map(2, "1/2*X^2 : Y^2").minimal_lift();
        assert_eq!(m.scaling_exponent, -1);
        assert_eq!(m.map.forms(), map(2, "X^2 : 2*Y^2").forms());
        let min_v = m.map.forms().iter().flat_map(|f| f.values())
            .map(|c| rational_valuation(c, 2)).min().unwrap();
        assert_eq!(min_v, Valuation::Finite(0));
    }

    #[test]
    fn evaluate_examples() {
        let m = map(3, "X^2 : 3*Y^2");
        assert_eq!(m.evaluate(&[q(3, 0), q(3, 1)]).unwrap(), vec![q(3, 0), q(3, 3)]);
        assert_eq!(m.evaluate(&[q(3, 1), q(3, 1)]).unwrap(), vec![q(3, 1), q(3, 3)]);
        assert!(m.evaluate(&[q(3, 1)]).is_err());
    }

    #[test]
    fn apply_examples() {
        let m = map(3, "X^2 : 3*Y^2");
        let pt = |s| ProjectivePoint::parse(ctx(3), s).unwrap();
        assert_eq!(m.apply(&pt("0,1")).unwrap(), pt("0,1"));
        assert_eq!(m.apply(&pt("1,0")).unwrap(), pt("1,0"));
        assert_eq!(m.apply(&pt("1,1")).unwrap(), pt("1,3"));
    }

    #[test]
    fn resultant_examples() {
        assert_eq!(map(3, "X^2 : Y^2").v_res(), 0);
        assert_eq!(map(3, "X^2 : 3*Y^2").v_res(), 2);
        assert_eq!(map(3, "3*X^2 : 3*Y^2").v_res(), 0);
        assert_eq!(map(3, "X^2 : Y^2 : 3*Z^2").v_res(), 4);
    }

    #[test]
    fn resultant_scales_with_lift() {
        // Res(3Φ) = 3^{(N+1) d^N} Res(Φ) = 3^4 Res(Φ) for N = 1, d = 2
        let m = map(3, "X^2+X*Y : Y^2+3*X^2");
        let scaled = m.scaled(&BigRational::from_integer(3.into())).unwrap();
        let ratio = scaled.resultant() / m.resultant();
        assert_eq!(ratio.abs(), BigRational::from_integer(81.into()));
        assert_eq!(scaled.v_res(), m.v_res());
        assert_eq!(scaled.scaling_exponent(), 1);
    }

    #[test]
    fn rational_coefficients_in_resultant() {
        // Res(X^2, Y^2/2) = (1/2)^2
        let m = map(3, "X^2 : 1/2*Y^2");
        assert_eq!(m.resultant().abs(), BigRational::new(1.into(), 4.into()));
        assert_eq!(m.v_res(), 0);
    }

    #[test]
    fn reduce_map_example() {
        let m = map(3, "X^2 : 3*Y^2");
        let r = reduce_map(&m.minimal_lift());
        assert_eq!(r.forms()[0], vec![(vec![2, 0], 1)]);
        assert!(r.forms()[1].is_empty());
    }

    #[test]
    fn bad_degree_rejected() {
        assert!(matches!(
            HomogeneousMap::parse_forms(ctx(3), "X : Y"),
            Err(Error::BadRange(_))
        ));
    }
}
