/// `∫_a^b f` by double-exponential quadrature, bisecting until each piece
/// meets its share of the absolute tolerance.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    fn go<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let out = quadrature::integrate(f, a, b, tol);
        if out.error_estimate <= tol || depth == 0 {
            return out.integral;
        }
        let m = 0.5 * (a + b);
        go(f, a, m, tol / 2.0, depth - 1) + go(f, m, b, tol / 2.0, depth - 1)
    }
    if a == b {
        return 0.0;
    }
    go(&f, a, b, tol, 24)
}

/// `∫_a^∞ f` for `a ≥ 0`, through `t = 1/u` on `[max(a, 1), ∞)`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, tol: f64) -> f64 {
    let split = a.max(1.0);
    let head = if a < split {
        integrate(&f, a, split, tol / 2.0)
    } else {
        0.0
    };
    let tail = integrate(
        |u: f64| {
            if u <= 0.0 {
                0.0
            } else {
                f(1.0 / u) / (u * u)
            }
        },
        0.0,
        1.0 / split,
        tol / 2.0,
    );
    head + tail
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_integrals() {
        assert!((integrate(|x| x * x, 0.0, 3.0, 1e-12) - 9.0).abs() < 1e-10);
        assert!((integrate_to_infinity(|x| (-x).exp(), 0.0, 1e-10) - 1.0).abs() < 1e-9);
        assert!((integrate_to_infinity(|x| 1.0 / (x * x * x), 2.0, 1e-12) - 0.125).abs() < 1e-10);
    }
}
