//! Acceptance criteria, one line each. Runs without the libtest harness so
//! the report is always printed.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use padic_greens::dynamics::{
    classify_orbit, g, g_n, green_hat_n, min_bound_lemma, orbit_defects, witness_depth,
    OrbitClassification,
};
use padic_greens::harness::{corpus, PointGenerator, VerifyConfig};
use padic_greens::morphism::resultant::{macaulay_resultant, sylvester_resultant};
use padic_greens::padic::rational_valuation;
use padic_greens::{HomogeneousMap, LogValue, PrimeContext, ProjectivePoint};

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 7] = [
        ("resultant oracle equivalence", resultant_oracle),
        ("green closed forms", green_closed_forms),
        ("functional equation", functional_equation),
        ("inequality suites", inequality_suites),
        ("classification vs green", classification_vs_green),
        ("min bound lemma", min_bound),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = run();
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("criterion {}: PASS  {name} ({detail}; {secs:.2}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {name} ({detail}; {secs:.2}s)", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn random_binary_map(rng: &mut ChaCha8Rng, ctx: PrimeContext, d: u32) -> Option<HomogeneousMap> {
    let forms = (0..2)
        .map(|_| {
            (0..=d)
                .map(|a| (vec![a, d - a], q(rng.gen_range(-20..=20))))
                .filter(|(_, c)| *c != q(0))
                .collect()
        })
        .collect();
    HomogeneousMap::new(ctx, 1, d, forms).ok()
}

fn int_forms(map: &HomogeneousMap) -> Vec<BTreeMap<Vec<u32>, BigInt>> {
    map.forms()
        .iter()
        .map(|f| f.iter().map(|(e, c)| (e.clone(), c.to_integer())).collect())
        .collect()
}

fn coefficients(form: &BTreeMap<Vec<u32>, BigInt>, d: u32) -> Vec<BigRational> {
    (0..=d)
        .rev()
        .map(|a| BigRational::from_integer(form.get(&vec![a, d - a]).cloned().unwrap_or_default()))
        .collect()
}

fn resultant_oracle() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut tested = 0;
    while tested < 60 {
        let p = [2, 3, 5, 7][rng.gen_range(0..4)];
        let d = rng.gen_range(2..=3);
        let ctx = PrimeContext::new(p).unwrap();
        let Some(map) = random_binary_map(&mut rng, ctx, d) else {
            continue;
        };
        let ints = int_forms(&map);
        let mac = BigRational::from_integer(macaulay_resultant(&ints, d));
        let syl = sylvester_resultant(&coefficients(&ints[0], d), &coefficients(&ints[1], d));
        let (vm, vs) = (rational_valuation(&mac, p), rational_valuation(&syl, p));
        ensure(vm == vs && mac.numer().magnitude() == syl.numer().magnitude(), || {
            format!("Macaulay {mac} vs Sylvester {syl} on {}", map.to_json())
        })?;
        // the minimal lift is p^-m Φ, which moves the valuation by 2dm
        let m = map.scaling_exponent();
        let expect = vs.finite().unwrap() - 2 * d as i64 * m;
        ensure(map.v_res() as i64 == expect, || format!("v_res {} vs {expect}", map.v_res()))?;
        let scaled = map.scaled(&q(p as i64)).unwrap().resultant();
        let shift = rational_valuation(&scaled, p).finite().unwrap() - vs.finite().unwrap();
        ensure(shift == 2 * d as i64, || format!("scaling law shift {shift} for d = {d}"))?;
        tested += 1;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}"))?;
    Ok(format!("{tested} random maps, exact Macaulay = ±Sylvester, scaling law holds"))
}

fn green_closed_forms() -> Verdict {
    let ctx = PrimeContext::new(3).unwrap();
    let map = HomogeneousMap::parse_forms(ctx, "X^2 : 3*Y^2").unwrap();
    let pt = |s| ProjectivePoint::parse(ctx, s).unwrap();
    let two20 = BigInt::from(1u64 << 20);
    let est = green_hat_n(&map, &pt("0,1"), 20).unwrap();
    let expect = -(q(1) - BigRational::new(BigInt::from(1), two20.clone()));
    ensure(*est.partial_sum.coeff() == expect, || format!("partial sum {}", est.partial_sum.coeff()))?;
    ensure(est.contains(&LogValue::from_int(ctx, -1)), || "bracket misses -1".into())?;
    // C1 = v_res / (d - 1) = 2
    let width_bound = BigRational::new(BigInt::from(4), two20);
    ensure(*est.tail_bound.coeff() <= width_bound, || format!("width {}", est.tail_bound.coeff()))?;
    for s in ["1,0", "1,1"] {
        for n in 0..=20 {
            let e = green_hat_n(&map, &pt(s), n).unwrap();
            ensure(e.partial_sum.is_zero(), || format!("ĝ_{n}({s}) = {}", e.partial_sum.coeff()))?;
        }
    }
    Ok(format!("ĝ(0:1) ∈ [{} - {}, {}] log 3", est.partial_sum.coeff(), est.tail_bound.coeff(), est.partial_sum.coeff()))
}

fn functional_equation() -> Verdict {
    let mut checked = 0;
    for (k, entry) in corpus().unwrap().into_iter().enumerate() {
        let map = &entry.map;
        let d = q(map.degree() as i64);
        let mut gen = PointGenerator::new(300 + k as u64, map.context(), map.dimension());
        for _ in 0..100 {
            let p = gen.uniform();
            let image = map.apply(&p).unwrap();
            let gp = g(map, &p).unwrap();
            for n in [0, 1, 2, 5, 10, 20] {
                let lhs = g_n(map, &image, n).unwrap();
                let rhs = (g_n(map, &p, n + 1).unwrap() - gp.clone()).scale(&d);
                ensure(lhs == rhs, || format!("{} at {p}, n = {n}", entry.name))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} exact identities over 17 maps"))
}

const INEQUALITIES: [&str; 9] = [
    "metric_axioms",
    "image_norm_bounds",
    "lipschitz",
    "local_constancy",
    "holder",
    "green_nonpositive_nested",
    "orbital_nonexpansion",
    "gauss_norm_lipschitz",
    "near_pair_distance",
];

fn inequality_suites() -> Verdict {
    let start = Instant::now();
    let cfg = VerifyConfig {
        samples: 500,
        seed: 11,
        ..VerifyConfig::default()
    };
    let mut tested = 0;
    for entry in corpus().unwrap() {
        let report = padic_greens::harness::verify(&entry.map, &cfg).unwrap();
        for name in INEQUALITIES {
            let p = report.property(name).unwrap();
            ensure(p.failures == 0, || {
                format!("{name} on {}: {:?}", entry.name, p.first_failure)
            })?;
            tested += p.samples;
        }
        ensure(report.passed(), || format!("{}:\n{}", entry.name, report.to_text()))?;
        // the nonexpansion check must find orbital-good centres for most samples
        let orbital = report.property("orbital_nonexpansion").unwrap();
        ensure(orbital.samples >= 500 / 2, || format!("{}: {} nonexpansion samples", entry.name, orbital.samples))?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!("{tested} inequality samples over 17 maps, 0 failures"))
}

fn classification_vs_green() -> Verdict {
    let (mut good, mut bad) = (0, 0);
    for (k, entry) in corpus().unwrap().into_iter().enumerate() {
        let map = &entry.map;
        let mut gen = PointGenerator::new(500 + k as u64, map.context(), map.dimension());
        for _ in 0..200 {
            let p = gen.uniform();
            let defects = orbit_defects(map, &p, 20).unwrap();
            let all_zero = (0..=20).all(|n| g_n(map, &p, n).unwrap().is_zero());
            ensure(all_zero == defects.iter().all(|&m| m == 0), || "g_n vs defects".into())?;
            match classify_orbit(map, &p).unwrap() {
                OrbitClassification::OrbitalGood { .. } => {
                    good += 1;
                    ensure(all_zero, || format!("{}: orbital good {p} has g_n < 0", entry.name))?;
                }
                OrbitClassification::BadAtIterate(k) => {
                    bad += 1;
                    ensure(!all_zero, || format!("{}: bad at {k} but g_n = 0 up to 20 at {p}", entry.name))?;
                    for n in (k as u32 + 1)..=20 {
                        let upper = green_hat_n(map, &p, n).unwrap().upper();
                        ensure(upper.is_negative(), || format!("{}: bad at {k}, ĝ_{n}({p}) = 0", entry.name))?;
                    }
                }
            }
        }
    }
    Ok(format!("{good} orbital-good and {bad} bad points agree with g_n"))
}

fn min_bound() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut tightest: f64 = 0.0;
    for _ in 0..1000 {
        let dist = 10f64.powf(-rng.gen_range(0.0..12.0));
        let a = 1.0 + 49.0 * (1.0 - rng.gen::<f64>());
        let b = 1.0 + 49.0 * (1.0 - rng.gen::<f64>());
        let k_max = witness_depth(dist, a, b).max(64);
        let r = min_bound_lemma(dist, a, b, k_max).unwrap();
        ensure(r.holds, || format!("D = {dist}, a = {a}, b = {b}: {} > {}", r.min_value, r.bound))?;
        tightest = tightest.max(r.min_value / r.bound);
    }
    Ok(format!("1000 triples, largest min/bound ratio {tightest:.6}"))
}

fn determinism() -> Verdict {
    let dir = std::env::temp_dir().join(format!("padic-greens-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let mut compared = 0;
    for (name, p, forms) in [
        ("bad3", 3, "X^2 : 3*Y^2"),
        ("mixed2", 2, "X^2 + X*Y : Y^2 + 3*X^2"),
        ("plane3", 3, "X^2 : Y^2 : 3*Z^2"),
    ] {
        let map = HomogeneousMap::parse_forms(PrimeContext::new(p).unwrap(), forms).unwrap();
        let path = dir.join(format!("{name}.json"));
        std::fs::write(&path, map.to_json().to_string()).map_err(|e| e.to_string())?;
        let runs = [
            run_verify(&path, Some("1"), None)?,
            run_verify(&path, Some("1"), None)?,
            run_verify(&path, Some("4"), None)?,
            run_verify(&path, None, Some("4"))?,
        ];
        for r in &runs[1..] {
            ensure(*r == runs[0], || format!("{forms}: reports differ"))?;
        }
        compared += runs.len();
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!("{compared} verify runs byte-identical across threads {{1, 4}}"))
}

fn run_verify(map: &PathBuf, threads: Option<&str>, env: Option<&str>) -> Result<Vec<u8>, String> {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_padic-greens"));
    cmd.args(["verify", "--samples", "150", "--seed", "7", "--map"]).arg(map);
    if let Some(t) = threads {
        cmd.args(["--threads", t]);
    }
    match env {
        Some(t) => cmd.env("PADIC_GREENS_THREADS", t),
        None => cmd.env_remove("PADIC_GREENS_THREADS"),
    };
    let out = cmd.output().map_err(|e| e.to_string())?;
    ensure(out.status.success(), || format!("verify exited with {}", out.status))?;
    Ok(out.stdout)
}
