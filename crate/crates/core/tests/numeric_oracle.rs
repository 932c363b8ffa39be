//! The safeguarded solver agrees with plain bisection on random monotone
//! objectives.

use ndv_scout_core::numeric::{solve, RootProblem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let increasing = f(hi) > f(lo);
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) < 0.0) == increasing {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `a x + b ln x + c x^p - t` on `[1, hi]`, increasing for positive
/// coefficients, with `t` chosen so the root falls inside the interval.
#[derive(Debug, Clone, Copy)]
struct Objective {
    a: f64,
    b: f64,
    c: f64,
    p: f64,
    t: f64,
}

impl Objective {
    fn f(&self, x: f64) -> f64 {
        self.a * x + self.b * x.ln() + self.c * x.powf(self.p) - self.t
    }

    fn df(&self, x: f64) -> f64 {
        self.a + self.b / x + self.c * self.p * x.powf(self.p - 1.0)
    }
}

#[test]
fn agrees_with_bisection_on_random_monotone_objectives() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst_iterations = 0;
    for case in 0..100 {
        let hi = 10f64.powf(rng.random_range(1.0..7.0));
        let mut obj = Objective {
            a: rng.random_range(0.0..5.0),
            b: rng.random_range(0.0..1000.0),
            c: rng.random_range(0.0..2.0),
            p: rng.random_range(0.2..1.8),
            t: 0.0,
        };
        let root = rng.random_range(1.0..hi);
        obj.t = obj.f(root);
        let oracle = bisect(|x| obj.f(x), 1.0, hi);
        let guess = rng.random_range(1.0..hi);

        let problem =
            RootProblem::new(|x| obj.f(x), |x| obj.df(x), guess, 1.0, hi).unwrap().with_tolerance(1e-10).unwrap();
        let r = solve(&problem).unwrap();
        worst_iterations = worst_iterations.max(r.iterations);
        assert!(r.converged, "case {case}: {obj:?} did not converge");
        let rel = (r.value - oracle).abs() / oracle;
        assert!(rel < 1e-6, "case {case}: {obj:?} solver {} vs oracle {oracle}", r.value);
    }
    assert!(worst_iterations <= 100);
}

#[test]
fn decreasing_objectives_are_handled() {
    let f = |x: f64| 50.0 - x.sqrt();
    let p = RootProblem::new(f, |x: f64| -0.5 / x.sqrt(), 10.0, 1.0, 1e4).unwrap();
    let r = solve(&p).unwrap();
    assert!((r.value - 2500.0).abs() < 1e-3, "{}", r.value);
}
