//! Sparse multivariate polynomials: integer forms for resultant work and
//! rational polynomials on the closed unit polydisk for Gauss norms.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::padic::{rational_valuation, PadicRational, PrimeContext, Valuation};

/// Exponent vector -> integer coefficient.
pub type IntForm = BTreeMap<Vec<u32>, BigInt>;

#[derive(Debug, Clone, Default)]
pub(crate) struct IntPoly {
    terms: IntForm,
}

impl IntPoly {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn constant(nvars: usize, c: BigInt) -> Self {
        let mut terms = IntForm::new();
        if !c.is_zero() {
            terms.insert(vec![0; nvars], c);
        }
        Self { terms }
    }

    pub fn insert(&mut self, exps: Vec<u32>, c: BigInt) {
        self.terms.insert(exps, c);
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        let mut out = IntPoly::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                *out.terms.entry(e).or_insert_with(BigInt::zero) += ca * cb;
            }
        }
        out.terms.retain(|_, c| !c.is_zero());
        out
    }

    pub fn add_assign(&mut self, other: &IntPoly) {
        for (e, c) in &other.terms {
            *self.terms.entry(e.clone()).or_insert_with(BigInt::zero) += c;
        }
        self.terms.retain(|_, c| !c.is_zero());
    }

    pub fn into_form(self) -> IntForm {
        self.terms
    }
}

/// A polynomial in `nvars` variables with rational coefficients, viewed as
/// a function on the closed unit polydisk of `Q_p^nvars`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    ctx: PrimeContext,
    nvars: usize,
    terms: BTreeMap<Vec<u32>, BigRational>,
}

impl Polynomial {
    pub fn new(
        ctx: PrimeContext,
        nvars: usize,
        terms: impl IntoIterator<Item = (Vec<u32>, BigRational)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::DimensionMismatch {
                    expected: nvars,
                    found: e.len(),
                });
            }
            *map.entry(e).or_insert_with(BigRational::zero) += c;
        }
        map.retain(|_, c: &mut BigRational| !c.is_zero());
        Ok(Self {
            ctx,
            nvars,
            terms: map,
        })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, BigRational> {
        &self.terms
    }

    /// Gauss norm on the closed unit polydisk, as `min v(coeff)`.
    pub fn gauss_norm_valuation(&self) -> Valuation {
        self.terms
            .values()
            .map(|c| rational_valuation(c, self.ctx.p()))
            .min()
            .unwrap_or(Valuation::Infinite)
    }

    pub fn evaluate(&self, x: &[PadicRational]) -> Result<PadicRational> {
        if x.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: x.len(),
            });
        }
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &k) in x.iter().zip(e) {
                if k > 0 {
                    t *= num_traits::pow(xi.value().clone(), k as usize);
                }
            }
            acc += t;
        }
        Ok(PadicRational::new(self.ctx, acc))
    }
}

/// `min v(c)` over the coefficient list of a single-variable polynomial.
pub fn gauss_norm_valuation(ctx: PrimeContext, coeffs: &[PadicRational]) -> Valuation {
    coeffs
        .iter()
        .map(|c| rational_valuation(c.value(), ctx.p()))
        .min()
        .unwrap_or(Valuation::Infinite)
}
