//! Seeded point streams for property verification.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::padic::{PadicRational, PrimeContext};
use crate::projective::ProjectivePoint;

/// Bound on random numerators and denominators.
pub const COORD_BOUND: i64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    UniformIntegral,
    /// Pairs at chordal distance exactly `p^-w`.
    NearPair(u32),
    /// Coordinate points `(1:0:...:0)`, ..., `(0:...:0:1)` and `(1:...:1)`.
    Boundary,
}

impl FromStr for Strategy {
    type Err = Error;

    /// Accepts `uniform-integral`, `boundary`, and `near-pair:W` / `near-pair(W)`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::BadStrategy(s.to_string());
        match s {
            "uniform-integral" | "uniform" => Ok(Strategy::UniformIntegral),
            "boundary" => Ok(Strategy::Boundary),
            _ => {
                let w = s
                    .strip_prefix("near-pair")
                    .map(|r| r.trim_start_matches([':', '(']).trim_end_matches(')'))
                    .ok_or_else(bad)?;
                w.parse().map(Strategy::NearPair).map_err(|_| bad())
            }
        }
    }
}

/// Deterministic stream of random points of `P^dim(Q_p)`.
pub struct PointGenerator {
    rng: ChaCha8Rng,
    ctx: PrimeContext,
    dim: usize,
}

impl PointGenerator {
    pub fn new(seed: u64, ctx: PrimeContext, dim: usize) -> Self {
        Self::from_rng(ChaCha8Rng::seed_from_u64(seed), ctx, dim)
    }

    pub fn from_rng(rng: ChaCha8Rng, ctx: PrimeContext, dim: usize) -> Self {
        Self { rng, ctx, dim }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// An integer in `[1, COORD_BOUND]` prime to `p`.
    pub fn unit(&mut self) -> BigInt {
        let p = self.ctx.p() as i64;
        loop {
            let n = self.rng.gen_range(1..=COORD_BOUND);
            if n % p != 0 {
                return BigInt::from(n);
            }
        }
    }

    /// A p-integral rational with bounded numerator and denominator; about a
    /// third of draws carry an extra factor `p^k`, `1 <= k <= 3`.
    pub fn integral(&mut self) -> PadicRational {
        let mut num = BigInt::from(self.rng.gen_range(-COORD_BOUND..=COORD_BOUND));
        if self.rng.gen_range(0..3) == 0 {
            let k = self.rng.gen_range(1..=3usize);
            num *= num_traits::pow(self.ctx.p_big(), k);
        }
        let den = self.unit();
        PadicRational::new(self.ctx, BigRational::new(num, den))
    }

    /// A point of the closed unit polydisk of `Q_p^len`.
    pub fn polydisk(&mut self, len: usize) -> Vec<PadicRational> {
        (0..len).map(|_| self.integral()).collect()
    }

    pub fn uniform(&mut self) -> ProjectivePoint {
        loop {
            let coords = self.polydisk(self.dim + 1);
            if let Ok(p) = ProjectivePoint::new(self.ctx, &coords) {
                return p;
            }
        }
    }

    /// A point at distance exactly `p^-w` from `point`: a unit multiple of
    /// `p^w` is added to one affine coordinate in a chart where `point` has
    /// a unit pivot.
    pub fn near(&mut self, point: &ProjectivePoint, w: u32) -> ProjectivePoint {
        let pivot = point.unit_indices()[0];
        let free: Vec<usize> = (0..=self.dim).filter(|&j| j != pivot).collect();
        let j = free[self.rng.gen_range(0..free.len())];
        let sign = if self.rng.gen_bool(0.5) { 1 } else { -1 };
        let u = self.unit() * sign;
        point
            .displaced(j, w, &u)
            .expect("pivot is a unit and u is prime to p")
    }

    pub fn near_pair(&mut self, w: u32) -> (ProjectivePoint, ProjectivePoint) {
        let a = self.uniform();
        let b = self.near(&a, w);
        (a, b)
    }
}

pub fn boundary_points(ctx: PrimeContext, dim: usize) -> Vec<ProjectivePoint> {
    let mut out: Vec<ProjectivePoint> = (0..=dim)
        .map(|i| {
            let lift = (0..=dim).map(|j| BigInt::from((i == j) as u8)).collect();
            ProjectivePoint::from_integers(ctx, lift).expect("basis vector")
        })
        .collect();
    out.push(ProjectivePoint::from_integers(ctx, vec![BigInt::from(1); dim + 1]).expect("ones"));
    out
}

/// `point_generator(seed, count, context, strategy)`. Near-pair strategies
/// return `2 * count` points, pair members adjacent.
pub fn point_generator(
    seed: u64,
    count: usize,
    ctx: PrimeContext,
    dim: usize,
    strategy: Strategy,
) -> Result<Vec<ProjectivePoint>> {
    if dim == 0 {
        return Err(Error::BadRange("P^0 has a single point".into()));
    }
    let mut gen = PointGenerator::new(seed, ctx, dim);
    Ok(match strategy {
        Strategy::UniformIntegral => (0..count).map(|_| gen.uniform()).collect(),
        Strategy::NearPair(w) => (0..count)
            .flat_map(|_| {
                let (a, b) = gen.near_pair(w);
                [a, b]
            })
            .collect(),
        Strategy::Boundary => boundary_points(ctx, dim).into_iter().take(count.max(dim + 2)).collect(),
    })
}
