//! Safeguarded scalar root finding shared by the dictionary and
//! coupon-collector inversions.
//!
//! The solver runs Newton-Raphson with a caller-supplied derivative and keeps
//! a sign-change bracket alongside the iterate. A Newton step is replaced when
//! it would leave the bracket, when the derivative is too small to trust, or
//! when the previous step failed to halve the residual. The replacement is a
//! secant step through the last two iterates if that stays inside the
//! bracket, and a bisection step otherwise.
//!
//! The secant fallback matters for objectives that are piecewise linear with
//! a smooth surrogate derivative (the storage-size equation): inside one
//! linear piece the secant slope is exact while the surrogate may be off by
//! orders of magnitude.

use thiserror::Error;

pub const DEFAULT_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_MAX_ITERATIONS: usize = 100;

/// Derivatives smaller than this are not used for a Newton step.
const MIN_DERIVATIVE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("invalid root problem: {0}")]
    InvalidProblem(&'static str),
    #[error("objective does not change sign on [{lower}, {upper}] and Newton iteration left the interval")]
    NoSignChange { lower: f64, upper: f64 },
    #[error("objective returned a non-finite value at x = {x}")]
    NonFinite { x: f64 },
}

/// A scalar root-finding problem on a closed interval.
pub struct RootProblem<F, D> {
    objective: F,
    derivative: D,
    initial_guess: f64,
    lower_bound: f64,
    upper_bound: f64,
    tolerance: f64,
    max_iterations: usize,
}

impl<F, D> RootProblem<F, D>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    pub fn new(
        objective: F,
        derivative: D,
        initial_guess: f64,
        lower_bound: f64,
        upper_bound: f64,
    ) -> Result<Self, SolveError> {
        if !(lower_bound.is_finite() && upper_bound.is_finite()) {
            return Err(SolveError::InvalidProblem("bounds must be finite"));
        }
        if lower_bound >= upper_bound {
            return Err(SolveError::InvalidProblem("lower_bound must be < upper_bound"));
        }
        if !(lower_bound..=upper_bound).contains(&initial_guess) {
            return Err(SolveError::InvalidProblem("initial guess outside bounds"));
        }
        Ok(Self {
            objective,
            derivative,
            initial_guess,
            lower_bound,
            upper_bound,
            tolerance: DEFAULT_TOLERANCE,
            max_iterations: DEFAULT_MAX_ITERATIONS,
        })
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Result<Self, SolveError> {
        if !(tolerance > 0.0 && tolerance.is_finite()) {
            return Err(SolveError::InvalidProblem("tolerance must be > 0"));
        }
        self.tolerance = tolerance;
        Ok(self)
    }

    pub fn with_max_iterations(mut self, max_iterations: usize) -> Self {
        self.max_iterations = max_iterations;
        self
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    fn eval(&self, x: f64) -> Result<f64, SolveError> {
        let y = (self.objective)(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(SolveError::NonFinite { x })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Solve `problem`; see the module docs for the step rules.
///
/// Stops when `|f(x)| <= tol * scale` with
/// `scale = max(1, |f(lower)|, |f(upper)|)`, or when the last step moved by at
/// most `tol * max(1, |x|)`. Running out of iterations is not an error: the
/// last iterate is returned with `converged = false`.
pub fn solve<F, D>(problem: &RootProblem<F, D>) -> Result<Root, SolveError>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let tol = problem.tolerance;
    let (lo, hi) = (problem.lower_bound, problem.upper_bound);
    let f_lo = problem.eval(lo)?;
    let f_hi = problem.eval(hi)?;
    let scale = 1f64.max(f_lo.abs()).max(f_hi.abs());
    let residual_ok = |y: f64| y.abs() <= tol * scale;

    let mut x = problem.initial_guess;
    let mut fx = problem.eval(x)?;
    if residual_ok(fx) {
        return Ok(Root { value: x, iterations: 0, converged: true });
    }
    if f_lo == 0.0 {
        return Ok(Root { value: lo, iterations: 0, converged: true });
    }
    if f_hi == 0.0 {
        return Ok(Root { value: hi, iterations: 0, converged: true });
    }
    if f_lo.signum() == f_hi.signum() {
        return newton_unbracketed(problem, x, fx, scale);
    }

    // Bracket [a, b] with f(a) and f(b) of opposite sign; the iterate always
    // lies inside it.
    let (mut a, mut fa, mut b) = (lo, f_lo, hi);
    if fx.signum() == fa.signum() {
        a = x;
        fa = fx;
    } else {
        b = x;
    }

    let mut prev: Option<(f64, f64)> = None;
    for iteration in 1..=problem.max_iterations {
        let stalled = prev.is_some_and(|(_, fp)| fx.abs() > 0.5 * fp.abs());
        let inside = |c: f64| c > a.min(b) && c < a.max(b);

        let mut candidate = None;
        if !stalled {
            let d = (problem.derivative)(x);
            if d.is_finite() && d.abs() >= MIN_DERIVATIVE {
                let c = x - fx / d;
                if inside(c) {
                    candidate = Some(c);
                }
            }
        }
        if candidate.is_none() {
            if let Some((xp, fp)) = prev {
                if fx != fp {
                    let c = x - fx * (x - xp) / (fx - fp);
                    if c.is_finite() && inside(c) {
                        candidate = Some(c);
                    }
                }
            }
        }
        let next = candidate.unwrap_or(0.5 * (a + b));

        let f_next = problem.eval(next)?;
        let step = (next - x).abs();
        prev = Some((x, fx));
        x = next;
        fx = f_next;

        if residual_ok(fx) || step <= tol * x.abs().max(1.0) {
            return Ok(Root { value: x, iterations: iteration, converged: true });
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
        }
    }
    Ok(Root { value: x, iterations: problem.max_iterations, converged: false })
}

fn newton_unbracketed<F, D>(
    problem: &RootProblem<F, D>,
    mut x: f64,
    mut fx: f64,
    scale: f64,
) -> Result<Root, SolveError>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let tol = problem.tolerance;
    let (lo, hi) = (problem.lower_bound, problem.upper_bound);
    let no_sign_change = SolveError::NoSignChange { lower: lo, upper: hi };
    for iteration in 1..=problem.max_iterations {
        let d = (problem.derivative)(x);
        if !d.is_finite() || d.abs() < MIN_DERIVATIVE {
            return Err(no_sign_change);
        }
        let next = x - fx / d;
        if !(lo..=hi).contains(&next) {
            return Err(no_sign_change);
        }
        let step = (next - x).abs();
        x = next;
        fx = problem.eval(x)?;
        if fx.abs() <= tol * scale || step <= tol * x.abs().max(1.0) {
            return Ok(Root { value: x, iterations: iteration, converged: true });
        }
    }
    Ok(Root { value: x, iterations: problem.max_iterations, converged: false })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
        let fa = f(a);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if (f(m) < 0.0) == (fa < 0.0) {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    }

    #[test]
    fn linear_converges_in_one_step() {
        let p = RootProblem::new(|x| x - 5.0, |_| 1.0, 1.0, 0.0, 100.0).unwrap();
        let r = solve(&p).unwrap();
        assert_eq!(r.value, 5.0);
        assert_eq!(r.iterations, 1);
        assert!(r.converged);
    }

    #[test]
    fn x_log_x() {
        let f = |x: f64| x * x.ln() - 100.0;
        let oracle = bisect(f, 1.0, 1000.0);
        assert!((oracle - 29.536_599_054_329_336).abs() < 1e-9);
        let p = RootProblem::new(f, |x: f64| x.ln() + 1.0, 10.0, 1.0, 1000.0).unwrap();
        let r = solve(&p).unwrap();
        assert!(r.converged);
        assert!((r.value - oracle).abs() < 1e-4, "{} vs {}", r.value, oracle);
    }

    #[test]
    fn invalid_problems_rejected() {
        assert!(RootProblem::new(|x| x, |_| 1.0, 0.5, 1.0, 0.0).is_err());
        assert!(RootProblem::new(|x| x, |_| 1.0, 5.0, 0.0, 1.0).is_err());
        let p = RootProblem::new(|x| x, |_| 1.0, 0.5, 0.0, 1.0).unwrap();
        assert!(p.with_tolerance(0.0).is_err());
    }

    #[test]
    fn no_sign_change_when_newton_leaves_interval() {
        let p = RootProblem::new(|x: f64| x * x + 1.0, |x| 2.0 * x, 1.0, 0.5, 2.0).unwrap();
        assert!(matches!(solve(&p), Err(SolveError::NoSignChange { .. })));
    }

    #[test]
    fn unbracketed_newton_can_still_converge() {
        // Root at 1 is a double root: no sign change, but Newton gets there.
        let p = RootProblem::new(|x: f64| (x - 1.0).powi(2), |x| 2.0 * (x - 1.0), 1.5, 0.0, 3.0)
            .unwrap()
            .with_tolerance(1e-8)
            .unwrap();
        let r = solve(&p).unwrap();
        assert!(r.converged);
        assert!((r.value - 1.0).abs() < 1e-3);
    }

    #[test]
    fn non_finite_objective_reported() {
        let p = RootProblem::new(|x: f64| (x - 0.5).ln(), |x| 1.0 / (x - 0.5), 1.0, 0.0, 2.0).unwrap();
        assert!(matches!(solve(&p), Err(SolveError::NonFinite { .. })));
    }

    #[test]
    fn zero_derivative_falls_back() {
        // Flat derivative everywhere: every step must come from secant/bisection.
        let p = RootProblem::new(|x| x - 3.0, |_| 0.0, 9.0, 0.0, 10.0).unwrap();
        let r = solve(&p).unwrap();
        assert!(r.converged);
        assert!((r.value - 3.0).abs() < 1e-4);
    }

    #[test]
    fn endpoint_root() {
        let p = RootProblem::new(|x| x - 10.0, |_| 1.0, 1.0, 0.0, 10.0).unwrap();
        let r = solve(&p).unwrap();
        assert_eq!(r.value, 10.0);
    }
}
