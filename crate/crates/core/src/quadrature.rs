//! Gauss–Legendre rules and the Gamma function.

use crate::scalar::Real;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    assert!(n >= 1, "rule needs at least one node");
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Newton in f64 on the Legendre recurrence, then converted.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                let (_, d) = legendre(n, x);
                dp = d;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = T::lit(-x);
        nodes[n - 1 - i] = T::lit(x);
        weights[i] = T::lit(w);
        weights[n - 1 - i] = T::lit(w);
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Integrates `f` over `[a, b]` with the given rule.
pub fn integrate<T: Real, F: FnMut(T) -> T>(rule: &(Vec<T>, Vec<T>), a: T, b: T, mut f: F) -> T {
    let half = (b - a) / T::lit(2.0);
    let mid = (a + b) / T::lit(2.0);
    rule.0
        .iter()
        .zip(&rule.1)
        .fold(T::zero(), |acc, (&x, &w)| acc + w * f(mid + half * x))
        * half
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `Γ(x)` for `x ≥ 1/2` (Lanczos, g = 7).
pub fn gamma<T: Real>(x: T) -> T {
    assert!(x >= T::lit(0.5), "lanczos branch needs x >= 1/2");
    let x = x - T::one();
    let mut a = T::lit(LANCZOS[0]);
    for (k, &c) in LANCZOS.iter().enumerate().skip(1) {
        a = a + T::lit(c) / (x + T::from_count(k));
    }
    let t = x + T::lit(LANCZOS_G + 0.5);
    (T::lit(2.0) * T::PI()).sqrt() * t.powf(x + T::lit(0.5)) * (-t).exp() * a
}

/// `Γ(-α)` for `α ∈ (0, 1)` through `Γ(2 - α) / ((-α)(1 - α))`.
pub fn gamma_negative_fraction<T: Real>(alpha: T) -> T {
    assert!(
        alpha > T::zero() && alpha < T::one(),
        "alpha must lie in (0, 1)"
    );
    gamma(T::lit(2.0) - alpha) / ((-alpha) * (T::one() - alpha))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let rule = gauss_legendre::<f64>(8);
        let w: f64 = rule.1.iter().sum();
        assert!((w - 2.0).abs() < 1e-14);
        let v = integrate(&rule, 0.0, 2.0, |x| x.powi(15));
        assert!((v - 2f64.powi(16) / 16.0).abs() < 1e-9);
    }

    #[test]
    fn odd_rule_contains_zero() {
        let rule = gauss_legendre::<f64>(5);
        assert_eq!(rule.0[2], 0.0);
        assert!((rule.1[2] - 128.0 / 225.0).abs() < 1e-15);
    }

    #[test]
    fn gamma_known_values() {
        assert!((gamma(1.0f64) - 1.0).abs() < 1e-14);
        assert!((gamma(0.5f64) - std::f64::consts::PI.sqrt()).abs() < 1e-14);
        assert!((gamma(5.0f64) - 24.0).abs() < 1e-12);
        assert!(
            (gamma_negative_fraction(0.5f64) + 2.0 * std::f64::consts::PI.sqrt()).abs() < 1e-13
        );
    }
}
