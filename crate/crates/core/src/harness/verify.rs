//! Seeded property verification of one map.
//!
//! Every property draws its samples from its own ChaCha stream, keyed by
//! `(seed, property index, sample index)`, so a report depends only on the
//! map and the configuration, never on how samples were scheduled.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use super::generator::{boundary_points, PointGenerator};
use crate::dynamics::{
    classify_orbit, g, g_n, g_n_exact, good_reduction_at, green_hat_n, holder_constants,
    orbit_defects, HolderConstants, OrbitClassification,
};
use crate::error::{Error, Result};
use crate::morphism::resultant::{binary_coefficients, sylvester_resultant};
use crate::morphism::{eval_integral, reduce_point, HomogeneousMap, Polynomial, ResidueMap};
use crate::padic::{int_valuation, rational_valuation, round_sig, sup_norm_valuation, PadicRational, Valuation};
use crate::projective::{affine_embed, affine_extract, chordal_distance, ProjectivePoint};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "PADIC_GREENS_THREADS";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyConfig {
    pub samples: usize,
    pub seed: u64,
    /// `None` reads [`THREADS_ENV`], falling back to the number of CPUs.
    pub threads: Option<usize>,
    /// Truncation depth for `g_n` and brackets.
    pub depth: u32,
    /// Number of iterates checked for nonexpansion on `U^orb`.
    pub orbit_horizon: u32,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            samples: 200,
            seed: 0,
            threads: None,
            depth: crate::dynamics::DEFAULT_DEPTH,
            orbit_horizon: 10,
        }
    }
}

/// How close a sample came to violating its property.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Margin {
    /// Exact slack in valuations; smaller is tighter, negative fails.
    Gap(i64),
    /// `lhs / rhs` of a real inequality; larger is tighter, above 1 fails.
    Ratio(f64),
}

impl Margin {
    fn tighter(self, other: Margin) -> Margin {
        match (self, other) {
            (Margin::Gap(a), Margin::Gap(b)) => Margin::Gap(a.min(b)),
            (Margin::Ratio(a), Margin::Ratio(b)) => Margin::Ratio(a.max(b)),
            _ => self,
        }
    }

    fn to_json(self) -> serde_json::Value {
        match self {
            Margin::Gap(k) => json!(k),
            Margin::Ratio(r) => json!(round_sig(r)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Outcome {
    Pass(Option<Margin>),
    Fail(String, Option<Margin>),
    Skip,
}

fn check(ok: bool, margin: Option<Margin>, msg: impl FnOnce() -> String) -> Outcome {
    if ok {
        Outcome::Pass(margin)
    } else {
        Outcome::Fail(msg(), margin)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarginKind {
    None,
    ValuationGap,
    Ratio,
}

impl MarginKind {
    fn as_str(self) -> &'static str {
        match self {
            MarginKind::None => "none",
            MarginKind::ValuationGap => "valuation_gap",
            MarginKind::Ratio => "ratio",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyReport {
    pub name: &'static str,
    pub samples: u64,
    pub skipped: u64,
    pub failures: u64,
    pub margin_kind: MarginKind,
    pub worst_margin: Option<Margin>,
    /// Message of the lowest-indexed failing sample.
    pub first_failure: Option<String>,
}

impl PropertyReport {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "name": self.name,
            "samples": self.samples,
            "skipped": self.skipped,
            "failures": self.failures,
            "margin_kind": self.margin_kind.as_str(),
            "worst_margin": self.worst_margin.map(Margin::to_json),
            "first_failure": self.first_failure,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub map: serde_json::Value,
    pub v_res: u64,
    pub seed: u64,
    pub samples: usize,
    pub depth: u32,
    pub properties: Vec<PropertyReport>,
}

impl VerifyReport {
    pub fn failures(&self) -> u64 {
        self.properties.iter().map(|p| p.failures).sum()
    }

    pub fn passed(&self) -> bool {
        self.failures() == 0
    }

    pub fn property(&self, name: &str) -> Option<&PropertyReport> {
        self.properties.iter().find(|p| p.name == name)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "map": self.map,
            "v_res": self.v_res,
            "seed": self.seed,
            "samples": self.samples,
            "depth": self.depth,
            "properties": self.properties.iter().map(PropertyReport::to_json).collect::<Vec<_>>(),
            "failures": self.failures(),
            "passed": self.passed(),
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "verify: v_res = {}, seed = {}, samples = {}, depth = {}",
            self.v_res, self.seed, self.samples, self.depth
        );
        for p in &self.properties {
            let margin = match p.worst_margin {
                Some(Margin::Gap(k)) => format!("worst gap {k}"),
                Some(Margin::Ratio(r)) => format!("worst ratio {}", round_sig(r)),
                None => "-".to_string(),
            };
            let _ = writeln!(
                s,
                "  {:<4} {:<32} tested {:>5}  skipped {:>5}  failures {:>3}  {}",
                if p.failures == 0 { "ok" } else { "FAIL" },
                p.name,
                p.samples,
                p.skipped,
                p.failures,
                margin
            );
            if let Some(f) = &p.first_failure {
                let _ = writeln!(s, "       first failure: {f}");
            }
        }
        let _ = writeln!(s, "{}", if self.passed() { "all properties hold" } else { "FAILED" });
        s
    }
}

/// Number of worker threads: the explicit request, else the environment
/// variable, else rayon's default.
pub fn thread_count(requested: Option<usize>) -> usize {
    requested
        .or_else(|| std::env::var(THREADS_ENV).ok()?.parse().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(rayon::current_num_threads)
}

struct Env<'a> {
    map: &'a HomogeneousMap,
    cfg: &'a VerifyConfig,
    reduced: ResidueMap,
    holder: HolderConstants,
    boundary: Vec<ProjectivePoint>,
}

impl Env<'_> {
    fn v(&self) -> u64 {
        self.map.v_res()
    }

    /// Boundary points first, then uniform draws.
    fn point(&self, index: usize, gen: &mut PointGenerator) -> ProjectivePoint {
        self.boundary
            .get(index)
            .cloned()
            .unwrap_or_else(|| gen.uniform())
    }

    /// A pair at a random distance straddling `v_res`, or an unrelated pair.
    fn pair(&self, gen: &mut PointGenerator) -> (ProjectivePoint, ProjectivePoint) {
        if gen.rng().gen_range(0..4) == 0 {
            (gen.uniform(), gen.uniform())
        } else {
            let w = gen.rng().gen_range(0..=2 * self.v() as u32 + 4);
            gen.near_pair(w)
        }
    }
}

type CheckFn = fn(&Env, usize, &mut PointGenerator) -> Result<Outcome>;

struct Property {
    name: &'static str,
    kind: MarginKind,
    /// Map-level checks run once.
    once: bool,
    run: CheckFn,
}

const fn prop(name: &'static str, kind: MarginKind, run: CheckFn) -> Property {
    Property {
        name,
        kind,
        once: false,
        run,
    }
}

const PROPERTIES: &[Property] = &[
    prop("metric_axioms", MarginKind::ValuationGap, metric_axioms),
    prop("near_pair_distance", MarginKind::None, near_pair_distance),
    prop("lift_invariance", MarginKind::None, lift_invariance),
    prop("affine_isometry", MarginKind::None, affine_isometry),
    prop("index_preservation", MarginKind::None, index_preservation),
    Property {
        name: "resultant_oracles",
        kind: MarginKind::None,
        once: true,
        run: resultant_oracles,
    },
    prop("image_norm_bounds", MarginKind::ValuationGap, image_norm_bounds),
    prop("lipschitz", MarginKind::ValuationGap, lipschitz),
    prop("local_constancy", MarginKind::ValuationGap, local_constancy),
    prop("reduction_commutes", MarginKind::None, reduction_commutes),
    prop("functional_equation", MarginKind::None, functional_equation),
    prop("green_nonpositive_nested", MarginKind::None, green_nonpositive_nested),
    prop("g_n_exact_agreement", MarginKind::None, g_n_exact_agreement),
    prop("holder", MarginKind::Ratio, holder),
    prop("classification_green", MarginKind::None, classification_green),
    prop("orbital_nonexpansion", MarginKind::ValuationGap, orbital_nonexpansion),
    prop("gauss_norm_lipschitz", MarginKind::ValuationGap, gauss_norm_lipschitz),
];

/// Names of the properties checked by [`verify`], in report order.
pub fn property_names() -> Vec<&'static str> {
    PROPERTIES.iter().map(|p| p.name).collect()
}

pub fn verify(map: &HomogeneousMap, cfg: &VerifyConfig) -> Result<VerifyReport> {
    if map.dimension() == 0 {
        return Err(Error::BadRange("nothing to sample on P^0".into()));
    }
    let env = Env {
        map,
        cfg,
        reduced: map.reduce(),
        holder: holder_constants(map),
        boundary: boundary_points(map.context(), map.dimension()),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count(cfg.threads))
        .build()
        .map_err(|e| Error::BadRange(e.to_string()))?;
    let properties = pool.install(|| {
        PROPERTIES
            .iter()
            .enumerate()
            .map(|(k, p)| run_property(&env, k, p))
            .collect()
    });
    Ok(VerifyReport {
        map: map.to_json(),
        v_res: map.v_res(),
        seed: cfg.seed,
        samples: cfg.samples,
        depth: cfg.depth,
        properties,
    })
}

fn sample_rng(seed: u64, property: usize, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((property as u64) << 40) | index as u64);
    rng
}

fn run_property(env: &Env, k: usize, p: &Property) -> PropertyReport {
    let count = if p.once { 1 } else { env.cfg.samples };
    let map = env.map;
    let outcomes: Vec<Outcome> = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut gen = PointGenerator::from_rng(
                sample_rng(env.cfg.seed, k, i),
                map.context(),
                map.dimension(),
            );
            (p.run)(env, i, &mut gen).unwrap_or_else(|e| Outcome::Fail(format!("error: {e}"), None))
        })
        .collect();
    let mut report = PropertyReport {
        name: p.name,
        samples: 0,
        skipped: 0,
        failures: 0,
        margin_kind: p.kind,
        worst_margin: None,
        first_failure: None,
    };
    for (i, o) in outcomes.into_iter().enumerate() {
        let margin = match o {
            Outcome::Skip => {
                report.skipped += 1;
                continue;
            }
            Outcome::Pass(m) => m,
            Outcome::Fail(msg, m) => {
                report.failures += 1;
                report.first_failure.get_or_insert(format!("sample {i}: {msg}"));
                m
            }
        };
        report.samples += 1;
        if let Some(m) = margin {
            report.worst_margin = Some(report.worst_margin.map_or(m, |w| w.tighter(m)));
        }
    }
    report
}

fn val(d: crate::projective::ChordalDistance) -> Valuation {
    d.valuation()
}

fn gap(a: Valuation, b: Valuation) -> Option<Margin> {
    match (a, b) {
        (Valuation::Finite(a), Valuation::Finite(b)) => Some(Margin::Gap(a - b)),
        _ => None,
    }
}

// ---- projective ----

fn metric_axioms(env: &Env, _: usize, gen: &mut PointGenerator) -> Result<Outcome> {
    let (a, b) = env.pair(gen);
    let c = if gen.rng().gen_bool(0.5) {
        let w = gen.rng().gen_range(0..6);
        gen.near(&b, w)
    } else {
        gen.uniform()
    };
    let ab = val(chordal_distance(&a, &b)?);
    let bc = val(chordal_distance(&b, &c)?);
    let ac = val(chordal_distance(&a, &c)?);
    if ab != val(chordal_distance(&b, &a)?) {
        return Ok(Outcome::Fail("asymmetric".into(), None));
    }
    if chordal_distance(&a, &a)?.valuation() != Valuation::Infinite {
        return Ok(Outcome::Fail("Δ(P, P) ≠ 0".into(), None));
    }
    if [ab, bc, ac].iter().any(|w| *w < Valuation::Finite(0)) {
        return Ok(Outcome::Fail("Δ > 1".into(), None));
    }
    let bound = ab.min(bc);
    Ok(check(ac >= bound, gap(ac, bound), || {
        format!("strong triangle: w(P,R) = {ac} < min({ab}, {bc})")
    }))
}

fn near_pair_distance(_: &Env, _: usize, gen: &mut PointGenerator) -> Result<Outcome> {
    let w = gen.rng().gen_range(0..12u32);
    let (a, b) = gen.near_pair(w);
    let got = val(chordal_distance(&a, &b)?);
    Ok(check(got == Valuation::Finite(w as i64), None, || {
        format!("requested w = {w}, got {got}")
    }))
}

fn lift_invariance(env: &Env, _: usize, gen: &mut PointGenerator) -> Result<Outcome> {
    let (a, b) = env.pair(gen);
    let k = gen.rng().gen_range(-3..=3);
    let c = env.map.context().power(k) * BigRational::new(gen.unit(), gen.unit());
    let scaled: Vec<BigRational> = a.integer_lift().iter().map(|x| BigRational::from_integer(x.clone()) * &c).collect();
    let a2 = ProjectivePoint::from_rationals(env.map.context(), scaled.iter())?;
    let same = chordal_distance(&a, &b)? == chordal_distance(&a2, &b)?;
    Ok(check(same && a == a2, None, || format!("rescaling {a} by {c} changed distances")))
}

fn affine_isometry(env: &Env, _: usize, gen: &mut PointGenerator) -> Result<Outcome> {
    let n = env.map.dimension();
    let ctx = env.map.context();
    let a = gen.polydisk(n);
    let b: Vec<PadicRational> = if gen.rng().gen_bool(0.5) {
        let w = gen.rng().gen_range(0..8);
        a.iter().map(|x| x + &gen.integral().shift(w)).collect()
    } else {
        gen.polydisk(n)
    };
    let expect = a
        .iter()
        .zip(&b)
        .map(|(x, y)| (x - y).valuation())
        .min()
        .expect("N >= 1");
    let (pa, pb) = (affine_embed(ctx, &a)?, affine_embed(ctx, &b)?);
    let got = val(chordal_distance(&pa, &pb)?);
    if got != expect {
        return Ok(Outcome::Fail(format!("chart distance {got}, coordinates {expect}"), None));
    }
    Ok(check(affine_extract(&pa, 0)? == a, None, || "extract ∘ embed ≠ id".into()))
}

fn index_preservation(_: &Env, _: usize, gen: &mut PointGenerator) -> Result<Outcome> {
    let w = gen.rng().gen_range(1..8);
    let (a, b) = gen.near_pair(w);
    Ok(check(a.unit_indices() == b.unit_indices(), None, || {
        format!("{a} and {b} at w = {w} have different unit indices")
    }))
}

// ---- morphism ----

fn resultant_oracles(env: &Env, _: usize, _: &mut PointGenerator) -> Result<Outcome> {
    let map = env.map;
    let (n, d) = (map.dimension(), map.degree());
    let p = map.context().p();
    let res = map.resultant();
    if map.dimension() == 1 {
        let f = binary_coefficients(&map.forms()[0], d);
        let g = binary_coefficients(&map.forms()[1], d);
        let syl = sylvester_resultant(&f, &g);
        if syl.abs() != res.abs() {
            return Ok(Outcome::Fail(format!("Macaulay {res} vs Sylvester {syl}"), None));
        }
    }
    let scaled = map.scaled(&BigRational::from_integer(BigInt::from(p)))?.resultant();
    let shift = rational_valuation(&scaled, p).finite().unwrap_or(0)
        - rational_valuation(&res, p).finite().unwrap_or(0);
    let expect = ((n + 1) * num_traits::pow(d as usize, n)) as i64;
    Ok(check(shift == expect, None, || {
        format!("v(Res(pΦ)) - v(Res(Φ)) = {shift}, expected {expect}")
    }))
}

fn image_norm_bounds(env: &Env, i: usize, gen: &mut PointGenerator) -> Result<Outcome> {
    let point = env.point(i, gen);
    // an arbitrary lift c·x, evaluated in rationals by the minimal lift
    let k = gen.rng().gen_range(-3..=3);
    let c = env.map.context().power(k) * BigRational::new(gen.unit(), gen.unit());
    let x: Vec<PadicRational> = point
        .lift()
        .iter()
        .map(|t| t * &PadicRational::new(env.map.context(), c.clone()))
        .collect();
    let image = env.map.minimal_lift().map.evaluate(&x)?;
    let d = env.map.degree() as i64;
    let norm = sup_norm_valuation(&x).finite().expect("nonzero lift");
    let Some(m) = sup_norm_valuation(&image).finite() else {
        return Ok(Outcome::Fail("Φ(x) = 0".into(), None));
    };
    let m = m - d * norm;
    let v = env.v() as i64;
    Ok(check((0..=v).contains(&m), Some(Margin::Gap(m.min(v - m))), || {
        format!("v(Φ(x)) - d v(x) = {m} outside [0, {v}]")
    }))
}

fn lipschitz(env: &Env, _: usize, gen: &mut PointGenerator) -> Result<Outcome> {
    let (a, b) = env.pair(gen);
    let Valuation::Finite(w) = val(chordal_distance(&a, &b)?) else {
        return Ok(Outcome::Skip);
    };
    let image = val(chordal_distance(&env.map.apply(&a)?, &env.map.apply(&b)?)?);
    let bound = Valuation::Finite(w - 2 * env.v() as i64);
    Ok(check(image >= bound, gap(image, bound), || {
        format!("w(φP, φQ) = {image} < {w} - 2 v_res")
    }))
}

fn local_constancy(env: &Env, _: usize, gen: &mut PointGenerator) -> Result<Outcome> {
    let v = env.v() as u32;
    let w = v + gen.rng().gen_range(1..=6);
    let (a, b) = gen.near_pair(w);
    let (ga, gb) = (g(env.map, &a)?, g(env.map, &b)?);
    Ok(check(ga == gb, Some(Margin::Gap((w - v) as i64)), || {
        format!("g = {} vs {} at w = {w}", ga.coeff(), gb.coeff())
    }))
}

fn reduction_commutes(env: &Env, i: usize, gen: &mut PointGenerator) -> Result<Outcome> {
    let point = env.point(i, gen);
    if !good_reduction_at(env.map, &point)? {
        return Ok(Outcome::Skip);
    }
    let lhs = reduce_point(&env.map.apply(&point)?);
    let rhs = env.reduced.evaluate(&reduce_point(&point));
    Ok(check(!rhs.is_zero() && lhs == rhs, None, || {
        format!("reduction of φ({point}) differs from φ̃ of its reduction")
    }))
}

// ---- dynamics ----

fn functional_equation(env: &Env, i: usize, gen: &mut PointGenerator) -> Result<Outcome> {
    let point = env.point(i, gen);
    let n = gen.rng().gen_range(0..=env.cfg.depth);
    let d = BigRational::from_integer(BigInt::from(env.map.degree()));
    let lhs = g_n(env.map, &env.map.apply(&point)?, n)?;
    let rhs = (g_n(env.map, &point, n + 1)? - g(env.map, &point)?).scale(&d);
    Ok(check(lhs == rhs, None, || {
        format!("n = {n}: g_n(φP) = {} but d(g_(n+1) - g) = {}", lhs.coeff(), rhs.coeff())
    }))
}

fn green_nonpositive_nested(env: &Env, i: usize, gen: &mut PointGenerator) -> Result<Outcome> {
    let point = env.point(i, gen);
    let n2 = env.cfg.depth;
    let n1 = gen.rng().gen_range(0..=n2);
    let coarse = green_hat_n(env.map, &point, n1)?;
    let fine = green_hat_n(env.map, &point, n2)?;
    if fine.upper().is_positive() || coarse.upper().is_positive() {
        return Ok(Outcome::Fail("positive partial sum".into(), None));
    }
    Ok(check(fine.within(&coarse), None, || {
        format!("bracket at n = {n2} not inside bracket at n = {n1}")
    }))
}

fn g_n_exact_agreement(env: &Env, i: usize, gen: &mut PointGenerator) -> Result<Outcome> {
    let point = env.point(i, gen);
    let n = gen.rng().gen_range(0..=6);
    let (fast, slow) = (g_n(env.map, &point, n)?, g_n_exact(env.map, &point, n)?);
    Ok(check(fast == slow, None, || {
        format!("n = {n}: modular {} vs exact {}", fast.coeff(), slow.coeff())
    }))
}

fn holder(env: &Env, _: usize, gen: &mut PointGenerator) -> Result<Outcome> {
    let (a, b) = env.pair(gen);
    let Valuation::Finite(w) = val(chordal_distance(&a, &b)?) else {
        return Ok(Outcome::Skip);
    };
    let n = env.cfg.depth;
    let (ea, eb) = (green_hat_n(env.map, &a, n)?, green_hat_n(env.map, &b, n)?);
    // |ĝ(P) - ĝ(Q)| is at most the partial-sum gap plus both widths
    let lhs = (ea.partial_sum.clone() - eb.partial_sum.clone()).abs() + ea.width().clone() + eb.width().clone();
    let lhs = lhs.approx();
    let rhs = env.holder.bound_at(w as u64);
    let ratio = lhs / rhs;
    Ok(check(lhs <= rhs, Some(Margin::Ratio(ratio)), || {
        format!("|ĝ(P) - ĝ(Q)| up to {lhs} exceeds {rhs} at w = {w}")
    }))
}

fn classification_green(env: &Env, i: usize, gen: &mut PointGenerator) -> Result<Outcome> {
    let point = env.point(i, gen);
    let n = env.cfg.depth;
    let defects = orbit_defects(env.map, &point, n)?;
    let first_bad = defects.iter().position(|&m| m > 0);
    Ok(match classify_orbit(env.map, &point)? {
        OrbitClassification::OrbitalGood { .. } => check(first_bad.is_none(), None, || {
            format!("orbital good but g(φ^k P) < 0 at k = {}", first_bad.unwrap_or(0))
        }),
        OrbitClassification::BadAtIterate(k) => {
            let expect = (k < n as u64).then_some(k as usize);
            if first_bad != expect {
                return Ok(Outcome::Fail(format!("bad at {k}, first defect at {first_bad:?}"), None));
            }
            // the bracket's upper end is strictly negative once n > k
            let ok = (k + 1..=n as u64)
                .step_by(((n as u64).saturating_sub(k) / 4).max(1) as usize)
                .all(|m| g_n(env.map, &point, m as u32).map(|x| x.is_negative()).unwrap_or(false));
            check(ok, None, || format!("bad at {k} but some g_n with n > {k} is 0"))
        }
    })
}

fn orbital_nonexpansion(env: &Env, i: usize, gen: &mut PointGenerator) -> Result<Outcome> {
    let mut centre = None;
    for t in 0..16 {
        let cand = if t == 0 { env.point(i, gen) } else { gen.uniform() };
        if classify_orbit(env.map, &cand)?.is_orbital_good() {
            centre = Some(cand);
            break;
        }
    }
    let Some(centre) = centre else {
        return Ok(Outcome::Skip);
    };
    // two points of the open disk of radius |Res(φ)| about P
    let v = env.v() as u32;
    let wa = v + gen.rng().gen_range(1..=4);
    let a = gen.near(&centre, wa);
    let b = if gen.rng().gen_bool(0.5) {
        centre
    } else {
        let wb = v + gen.rng().gen_range(1..=4);
        gen.near(&centre, wb)
    };
    let Valuation::Finite(w0) = val(chordal_distance(&a, &b)?) else {
        return Ok(Outcome::Skip);
    };
    let cap = w0 + NONEXPANSION_GAP_CAP;
    let dists = orbit_distances(env.map, &a, &b, env.cfg.orbit_horizon, cap)?;
    let worst = dists.iter().map(|w| w - w0).min().unwrap_or(NONEXPANSION_GAP_CAP);
    Ok(match dists.iter().position(|&w| w < w0) {
        Some(k) => Outcome::Fail(
            format!("w(φ^{n}P, φ^{n}Q) = {} < {w0}", dists[k], n = k + 1),
            Some(Margin::Gap(worst)),
        ),
        None => Outcome::Pass(Some(Margin::Gap(worst))),
    })
}

/// Gaps in [`orbital_nonexpansion`] are reported up to this value.
pub const NONEXPANSION_GAP_CAP: i64 = 16;

/// `min(w(φ^k P, φ^k Q), cap)` for `1 <= k <= n`.
///
/// Both orbits run on normalized lifts modulo `p^K`; each step divides by
/// `p^m` with `m <= v_res` and loses `m` digits, so starting from
/// `K = cap + 1 + n v_res` every cross term is known modulo at least
/// `p^(cap + 1)`.
pub fn orbit_distances(
    map: &HomogeneousMap,
    a: &ProjectivePoint,
    b: &ProjectivePoint,
    n: u32,
    cap: i64,
) -> Result<Vec<i64>> {
    map.evaluate_integral(a)?;
    map.evaluate_integral(b)?;
    let p = map.context().p_big();
    let start = cap.max(0) as u64 + 1 + n as u64 * map.v_res();
    let mut orbits = [
        (a.integer_lift().to_vec(), start),
        (b.integer_lift().to_vec(), start),
    ];
    let mut out = Vec::with_capacity(n as usize);
    for _ in 0..n {
        for (x, prec) in orbits.iter_mut() {
            let modulus = num_traits::pow(p.clone(), *prec as usize);
            let y: Vec<BigInt> = eval_integral(map.integral_forms(), x, map.degree())
                .into_iter()
                .map(|c| c.mod_floor(&modulus))
                .collect();
            let m = y
                .iter()
                .filter(|c| !c.is_zero())
                .map(|c| int_valuation(c, &p) as u64)
                .min()
                .ok_or(Error::NotAMorphism)?;
            *prec -= m;
            let pm = num_traits::pow(p.clone(), m as usize);
            let modulus = num_traits::pow(p.clone(), *prec as usize);
            *x = y.into_iter().map(|c| (c / &pm).mod_floor(&modulus)).collect();
        }
        let known = orbits[0].1.min(orbits[1].1);
        let modulus = num_traits::pow(p.clone(), known as usize);
        let (x, y) = (&orbits[0].0, &orbits[1].0);
        let mut w = known as i64;
        for i in 0..x.len() {
            for j in i + 1..x.len() {
                let cross = (&x[i] * &y[j] - &x[j] * &y[i]).mod_floor(&modulus);
                if !cross.is_zero() {
                    w = w.min(int_valuation(&cross, &p));
                }
            }
        }
        out.push(w.min(cap));
    }
    Ok(out)
}

fn gauss_norm_lipschitz(env: &Env, _: usize, gen: &mut PointGenerator) -> Result<Outcome> {
    let ctx = env.map.context();
    let nvars = gen.rng().gen_range(1..=3);
    let deg = gen.rng().gen_range(1..=4u32);
    let terms: Vec<(Vec<u32>, BigRational)> = (0..gen.rng().gen_range(1..=6))
        .map(|_| {
            let e = (0..nvars).map(|_| gen.rng().gen_range(0..=deg)).collect();
            (e, gen.integral().value().clone())
        })
        .collect();
    let poly = Polynomial::new(ctx, nvars, terms)?;
    let x = gen.polydisk(nvars);
    let y: Vec<PadicRational> = if gen.rng().gen_bool(0.5) {
        let w = gen.rng().gen_range(0..6);
        x.iter().map(|t| t + &gen.integral().shift(w)).collect()
    } else {
        gen.polydisk(nvars)
    };
    let diff = x.iter().zip(&y).map(|(a, b)| (a - b).valuation()).min().expect("nvars >= 1");
    let lhs = (poly.evaluate(&x)? - poly.evaluate(&y)?).valuation();
    let rhs = poly.gauss_norm_valuation() + diff;
    Ok(check(lhs >= rhs, gap(lhs, rhs), || {
        format!("v(Ψ(x) - Ψ(y)) = {lhs} < {rhs}")
    }))
}
