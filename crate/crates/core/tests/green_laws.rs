use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

use padic_greens::dynamics::{green_hat_n, green_homogeneous_n};
use padic_greens::harness::PointGenerator;
use padic_greens::{HomogeneousMap, LogValue, PadicRational, PrimeContext};

fn map(p: u64, s: &str) -> HomogeneousMap {
    HomogeneousMap::parse_forms(PrimeContext::new(p).unwrap(), s).unwrap()
}

fn maps() -> Vec<HomogeneousMap> {
    vec![
        map(3, "X^2 : 3*Y^2"),
        map(3, "9*X^2 : 27*Y^2"),
        map(2, "X^2 + X*Y : Y^2 + 3*X^2"),
        map(2, "1/2*X^2 + 1/2*X*Y : 1/2*Y^2 + 3/2*X^2"),
        map(5, "X^3 + 5*Y^3 : Y^3 + X*Y^2"),
        map(3, "X^2 : Y^2 : 3*Z^2"),
    ]
}

fn lift(gen: &mut PointGenerator, len: usize) -> Vec<PadicRational> {
    loop {
        let x = gen.polydisk(len);
        if x.iter().any(|c| !c.is_zero()) {
            // leave the unit polydisk in either direction
            let k = gen.rng().gen_range(-2..=2);
            return x.iter().map(|c| c.shift(k)).collect();
        }
    }
}

#[test]
fn homogeneous_green_intertwines_the_lift() {
    for m in maps() {
        let d = BigRational::from_integer(BigInt::from(m.degree()));
        let mut gen = PointGenerator::new(17, m.context(), m.dimension());
        for _ in 0..40 {
            let x = lift(&mut gen, m.dimension() + 1);
            let image = m.evaluate(&x).unwrap();
            for n in [0, 3, 12] {
                let lhs = green_homogeneous_n(&m, &image, n).unwrap().partial_sum;
                let rhs = green_homogeneous_n(&m, &x, n + 1).unwrap().partial_sum.scale(&d);
                assert_eq!(lhs, rhs, "G_n(Φx) = d G_(n+1)(x) for {}", m.to_json());
            }
        }
    }
}

#[test]
fn scaling_the_vector_adds_log_abs() {
    for m in maps() {
        let ctx = m.context();
        let mut gen = PointGenerator::new(5, ctx, m.dimension());
        for _ in 0..40 {
            let x = lift(&mut gen, m.dimension() + 1);
            let k = gen.rng().gen_range(-3..=3);
            let c = PadicRational::new(ctx, ctx.power(k) * BigRational::new(gen.unit(), gen.unit()));
            let cx: Vec<PadicRational> = x.iter().map(|t| t * &c).collect();
            let a = green_homogeneous_n(&m, &x, 8).unwrap().partial_sum;
            let b = green_homogeneous_n(&m, &cx, 8).unwrap().partial_sum;
            assert_eq!(b - a, c.abs_log().unwrap());
        }
    }
}

#[test]
fn scaling_the_map_shifts_by_log_abs_over_d_minus_one() {
    for m in maps() {
        let ctx = m.context();
        let d1 = BigRational::from_integer(BigInt::from(m.degree() - 1));
        let mut gen = PointGenerator::new(9, ctx, m.dimension());
        for k in -2..=2 {
            let c = ctx.power(k) * BigRational::new(BigInt::from(7), BigInt::from(1));
            let scaled = m.scaled(&c).unwrap();
            let x = lift(&mut gen, m.dimension() + 1);
            let a = green_homogeneous_n(&m, &x, 10).unwrap().partial_sum;
            let b = green_homogeneous_n(&scaled, &x, 10).unwrap().partial_sum;
            let shift = PadicRational::new(ctx, c).abs_log().unwrap();
            assert_eq!(b - a, LogValue::new(ctx, shift.coeff() / &d1));
        }
    }
}

#[test]
fn modified_green_ignores_the_lift() {
    for m in maps() {
        let mut gen = PointGenerator::new(23, m.context(), m.dimension());
        for _ in 0..20 {
            let p = gen.uniform();
            let c = BigRational::new(BigInt::from(m.context().p()), BigInt::from(11));
            let scaled = m.scaled(&c).unwrap();
            assert_eq!(green_hat_n(&m, &p, 15).unwrap(), green_hat_n(&scaled, &p, 15).unwrap());
        }
    }
}
