//! `(-Δ)^α` through the heat semigroup, independent of the Fourier route.
//!
//! The semidiscrete heat kernel factorizes over axes,
//! `G_t(x) = Π_i e^{-2t} I_{x_i}(2t)`, and each modified Bessel factor is
//! obtained by quadrature of `(1/π) ∫_0^π e^{2t(cos θ - 1)} cos(nθ) dθ`.
//! The fractional power is then
//!
//! ```text
//! (-Δ)^α u = u + Γ(-α)^{-1} ∫_0^∞ (e^{tΔ}u - e^{-t} u) t^{-1-α} dt,
//! ```
//!
//! the subordination integral with `u (1 - e^{-t})` integrated in closed form.
//! After `t = e^y` the integrand is analytic in a strip and decays
//! exponentially at both ends, so a plain trapezoid rule in `y` converges
//! geometrically. Heat kernels are carried as deviations `G_t - δ` so that
//! tiny times lose no digits.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::lattice::{Boundary, Field, LatticeGeometry};
use crate::quadrature::{gamma_negative_fraction, gauss_legendre};
use crate::scalar::Real;

/// Exponent cut used when the Bessel integrand is truncated in `θ`:
/// `e^{-45} ≈ 3e-20`.
const THETA_CUT: f64 = 45.0;
/// Largest periodized halo handled by [`heat_apply`] on a periodic box.
const MAX_HALO: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatConfig {
    /// Trapezoid nodes per decade of `t` in the subordination integral.
    pub nodes_per_decade: usize,
    /// Minimum nodes for the Bessel integral in `θ`.
    pub bessel_points: usize,
    /// Relative size below which integrand tails are dropped.
    pub cutoff: f64,
}

impl Default for HeatConfig {
    fn default() -> Self {
        Self {
            nodes_per_decade: 16,
            bessel_points: 64,
            cutoff: 1e-16,
        }
    }
}

impl HeatConfig {
    pub fn validate(&self) -> Result<()> {
        if self.nodes_per_decade < 16 || self.bessel_points < 16 {
            return Err(Error::Config(
                "heat quadrature counts must be at least 16".into(),
            ));
        }
        if !(self.cutoff > 0.0 && self.cutoff < 1e-3) {
            return Err(Error::Config(format!(
                "heat cutoff must lie in (0, 1e-3), got {}",
                self.cutoff
            )));
        }
        Ok(())
    }

    /// Doubles the time-node density until the scalar identity
    /// `λ^α = 1 + Γ(-α)^{-1} ∫ (e^{-λt} - e^{-t}) t^{-1-α} dt` holds to `tol` at
    /// the given `λ`. Returns the certified config and its error.
    pub fn certify<T: Real>(
        mut self,
        alpha: T,
        dim: usize,
        lambdas: &[T],
        tol: T,
    ) -> Result<(Self, T)> {
        self.validate()?;
        let mut last = T::infinity();
        for _ in 0..6 {
            let err = scalar_identity_error(alpha, dim, lambdas, &self)?;
            last = err;
            if err <= tol {
                return Ok((self, err));
            }
            self.nodes_per_decade *= 2;
        }
        Err(Error::Domain(format!(
            "time quadrature did not certify: scalar identity error {last}"
        )))
    }
}

/// Nodes `y_j = ln t_j` and step of the trapezoid rule for order `alpha` on a
/// `dim`-dimensional lattice.
pub fn time_nodes<T: Real>(alpha: T, dim: usize, cfg: &HeatConfig) -> (Vec<T>, T) {
    let log_cut = T::lit(cfg.cutoff).ln();
    // Small t: integrand ~ t^{1-α}. Large t: ~ t^{-α-d/2}.
    let lower = log_cut / (T::one() - alpha);
    let upper = -log_cut / (alpha + T::from_count(dim) / T::lit(2.0));
    let step = T::LN_10() / T::from_count(cfg.nodes_per_decade);
    let count = ((upper - lower) / step).ceil().to_usize().unwrap_or(0) + 1;
    let nodes = (0..count)
        .map(|j| lower + step * T::from_count(j))
        .collect();
    (nodes, step)
}

/// Quadrature nodes shared by all rows of one computation.
struct BesselRules<T> {
    rules: HashMap<usize, (Vec<T>, Vec<T>)>,
}

impl<T: Real> BesselRules<T> {
    fn new() -> Self {
        Self {
            rules: HashMap::new(),
        }
    }

    fn get(&mut self, n: usize) -> &(Vec<T>, Vec<T>) {
        let n = n.next_power_of_two();
        self.rules.entry(n).or_insert_with(|| gauss_legendre(n))
    }
}

/// Deviations `a_n = e^{-2t} I_n(2t) - δ_{n0}` for `n = 0..=nmax`.
fn bessel_deviation_row<T: Real>(
    t: T,
    nmax: usize,
    min_points: usize,
    rules: &mut BesselRules<T>,
) -> Vec<T> {
    let mut row = vec![T::zero(); nmax + 1];
    if t.is_zero() {
        return row;
    }
    let four_t = T::lit(4.0) * t;
    let half = T::lit(0.5);
    let pi = T::PI();
    if four_t <= T::lit(THETA_CUT) {
        // Full range; periodic trapezoid on [0, π] resolves the integrand
        // once the node count exceeds the Bessel index plus the spread 2t.
        let extra = t.ceil().to_usize().unwrap_or(0);
        let intervals = min_points.max(nmax + 4 * extra + 40);
        let h = pi / T::from_count(intervals);
        for j in 0..=intervals {
            let theta = h * T::from_count(j);
            let s = (theta * half).sin();
            let w = if j == 0 || j == intervals {
                half
            } else {
                T::one()
            };
            let base = (-four_t * s * s).exp_m1() * w;
            for (n, a) in row.iter_mut().enumerate() {
                *a = *a + base * (T::from_count(n) * theta).cos();
            }
        }
        for a in row.iter_mut() {
            *a = *a * h / pi;
        }
    } else {
        // Only θ ≤ θ_c matters: e^{-4t sin²(θ/2)} < e^{-45} beyond.
        let theta_c = T::lit(2.0) * (T::lit(THETA_CUT) / four_t).sqrt().asin();
        let osc = (T::lit(1.5) * T::from_count(nmax) * theta_c)
            .ceil()
            .to_usize()
            .unwrap_or(0);
        let rule = rules.get(min_points.max(64 + osc));
        let scale = theta_c * half;
        for (&x, &w) in rule.0.iter().zip(&rule.1) {
            let theta = scale * (x + T::one());
            let s = (theta * half).sin();
            let base = (-four_t * s * s).exp() * w;
            for (n, a) in row.iter_mut().enumerate() {
                *a = *a + base * (T::from_count(n) * theta).cos();
            }
        }
        for a in row.iter_mut() {
            *a = *a * scale / pi;
        }
        row[0] = row[0] - T::one();
    }
    row
}

/// `e^{-2t} I_n(2t)` for `n = 0..=nmax`, the one-dimensional heat kernel.
pub fn heat_kernel_row<T: Real>(t: T, nmax: usize, cfg: &HeatConfig) -> Result<Vec<T>> {
    if t.is_nan() || t < T::zero() {
        return Err(domain(format!("heat time must be nonnegative, got {t}")));
    }
    let mut rules = BesselRules::new();
    let mut row = bessel_deviation_row(t, nmax, cfg.bessel_points, &mut rules);
    row[0] = row[0] + T::one();
    Ok(row)
}

fn halo_radius<T: Real>(t: T) -> usize {
    let spread = (T::lit(12.0) * (T::lit(2.0) * t).sqrt()).ceil();
    spread.to_usize().unwrap_or(usize::MAX).saturating_add(30)
}

/// One-dimensional deviation kernel `a(m)` indexed by offset, ready for a
/// convolution along one axis of `geom`.
fn axis_deviation<T: Real>(
    t: T,
    geom: &LatticeGeometry,
    min_points: usize,
    rules: &mut BesselRules<T>,
) -> Result<Vec<T>> {
    let side = geom.side();
    match geom.boundary() {
        Boundary::ZeroExtended => {
            let nmax = (side - 1).min(halo_radius(t));
            let mut row = bessel_deviation_row(t, nmax, min_points, rules);
            row.resize(side, T::zero());
            Ok(row)
        }
        Boundary::PeriodicWrap => {
            let halo = halo_radius(t);
            if halo > MAX_HALO {
                return Err(Error::Unsupported(format!(
                    "periodic heat kernel at t = {t} needs a halo of {halo} sites"
                )));
            }
            let row = bessel_deviation_row(t, halo, min_points, rules);
            // Periodize: a_per(m) = Σ_j a(m + j·side), m ∈ [0, side).
            let mut per = vec![T::zero(); side];
            per[0] = row[0];
            for (n, &a) in row.iter().enumerate().skip(1) {
                per[n % side] = per[n % side] + a;
                let neg = (side - n % side) % side;
                per[neg] = per[neg] + a;
            }
            Ok(per)
        }
    }
}

/// Convolves `v` along `axis` with the symmetric 1-D kernel `a` (`a[m]` is the
/// value at offset `±m`; on a periodic box `a[m]` is indexed modulo the side).
fn convolve_axis<T: Real>(v: &[T], geom: &LatticeGeometry, axis: usize, a: &[T]) -> Vec<T> {
    let side = geom.side();
    let dim = geom.dim();
    let stride = side.pow((dim - 1 - axis) as u32);
    let block = stride * side;
    let periodic = geom.boundary() == Boundary::PeriodicWrap;
    let mut out = vec![T::zero(); v.len()];
    for outer in (0..v.len()).step_by(block) {
        for inner in 0..stride {
            let base = outer + inner;
            for i in 0..side {
                let mut acc = T::zero();
                for j in 0..side {
                    let m = if periodic {
                        (i + side - j) % side
                    } else {
                        i.abs_diff(j)
                    };
                    acc = acc + a[m] * v[base + j * stride];
                }
                out[base + i * stride] = acc;
            }
        }
    }
    out
}

/// `e^{tΔ}u - u`, accumulated axis by axis without forming `e^{tΔ}u`.
fn heat_deviation<T: Real>(
    u: &Field<T>,
    t: T,
    min_points: usize,
    rules: &mut BesselRules<T>,
) -> Result<Vec<T>> {
    let geom = u.geom();
    let a = axis_deviation(t, geom, min_points, rules)?;
    let mut w = vec![T::zero(); u.values().len()];
    for axis in 0..geom.dim() {
        // w_i = w_{i-1} + A_i (u + w_{i-1})
        let current: Vec<T> = u.values().iter().zip(&w).map(|(&x, &y)| x + y).collect();
        let step = convolve_axis(&current, geom, axis, &a);
        for (wi, si) in w.iter_mut().zip(step) {
            *wi = *wi + si;
        }
    }
    Ok(w)
}

/// Solution of the semidiscrete heat equation at time `t` with initial data
/// `u`, evaluated on the box.
pub fn heat_apply<T: Real>(u: &Field<T>, t: T, cfg: &HeatConfig) -> Result<Field<T>> {
    if t.is_nan() || t < T::zero() {
        return Err(domain(format!("heat time must be nonnegative, got {t}")));
    }
    cfg.validate()?;
    if t.is_zero() {
        return Ok(u.clone());
    }
    let mut rules = BesselRules::new();
    let dev = heat_deviation(u, t, cfg.bessel_points, &mut rules)?;
    let values = u.values().iter().zip(dev).map(|(&x, d)| x + d).collect();
    Ok(Field::from_values_unchecked(u.geom(), values))
}

/// `(-Δ)^α u` by quadrature of the subordination integral. Needs a
/// zero-extended box, where the lattice heat kernel is used untruncated.
pub fn fraclap_semigroup<T: Real>(u: &Field<T>, alpha: T, cfg: &HeatConfig) -> Result<Field<T>> {
    if !(alpha > T::zero() && alpha < T::one()) {
        return Err(domain(format!(
            "semigroup formula needs alpha in (0, 1), got {alpha}"
        )));
    }
    cfg.validate()?;
    if u.geom().boundary() != Boundary::ZeroExtended {
        return Err(Error::Unsupported(
            "semigroup route needs a zero-extended box".into(),
        ));
    }
    let (nodes, step) = time_nodes(alpha, u.geom().dim(), cfg);
    let contributions: Vec<Result<Vec<T>>> = nodes
        .par_iter()
        .map_init(BesselRules::new, |rules, &y| {
            let t = y.exp();
            let dev = heat_deviation(u, t, cfg.bessel_points, rules)?;
            let damp = (-t).exp_m1();
            let weight = (-alpha * y).exp() * step;
            Ok(dev
                .into_iter()
                .zip(u.values())
                .map(|(d, &x)| (d - x * damp) * weight)
                .collect())
        })
        .collect();
    let mut acc = vec![T::zero(); u.values().len()];
    for c in contributions {
        for (a, v) in acc.iter_mut().zip(c?) {
            *a = *a + v;
        }
    }
    let inv_gamma = gamma_negative_fraction(alpha).recip();
    let values = u
        .values()
        .iter()
        .zip(acc)
        .map(|(&x, a)| x + a * inv_gamma)
        .collect();
    Ok(Field::from_values_unchecked(u.geom(), values))
}

/// The scalar version of the subordination integral evaluated with the same
/// time nodes: approximates `λ^α`.
pub fn scalar_subordination<T: Real>(lambda: T, alpha: T, dim: usize, cfg: &HeatConfig) -> T {
    let (nodes, step) = time_nodes(alpha, dim, cfg);
    let sum = nodes.iter().fold(T::zero(), |acc, &y| {
        let t = y.exp();
        let diff = (-lambda * t).exp_m1() - (-t).exp_m1();
        acc + diff * (-alpha * y).exp()
    });
    T::one() + sum * step / gamma_negative_fraction(alpha)
}

/// Largest relative error of [`scalar_subordination`] against `λ^α`.
pub fn scalar_identity_error<T: Real>(
    alpha: T,
    dim: usize,
    lambdas: &[T],
    cfg: &HeatConfig,
) -> Result<T> {
    if !(alpha > T::zero() && alpha < T::one()) {
        return Err(domain("scalar identity needs alpha in (0, 1)"));
    }
    Ok(lambdas.iter().fold(T::zero(), |acc, &lambda| {
        let exact = lambda.powf(alpha);
        acc.max(((scalar_subordination(lambda, alpha, dim, cfg) - exact) / exact).abs())
    }))
}

/// Twenty geometrically spaced samples of `(0, 4d]`, from `4d·10^{-3}` up.
pub fn default_lambdas<T: Real>(dim: usize) -> Vec<T> {
    let top = T::lit(4.0) * T::from_count(dim);
    (0..20)
        .map(|k| top * T::lit(10f64.powf(-3.0 * (19 - k) as f64 / 19.0)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(l: usize) -> LatticeGeometry {
        LatticeGeometry::new(1, l, Boundary::ZeroExtended).unwrap()
    }

    #[test]
    fn config_limits() {
        let bad = HeatConfig {
            nodes_per_decade: 8,
            ..HeatConfig::default()
        };
        assert!(bad.validate().is_err());
        assert!(HeatConfig::default().validate().is_ok());
    }

    #[test]
    fn zero_time_is_identity() {
        let u = Field::from_fn(&line(4), |x| (x[0] as f64).cos());
        assert_eq!(heat_apply(&u, 0.0, &HeatConfig::default()).unwrap(), u);
        assert!(heat_apply(&u, -1.0, &HeatConfig::default()).is_err());
    }

    #[test]
    fn bessel_row_at_unit_time() {
        let row = heat_kernel_row(1.0f64, 40, &HeatConfig::default()).unwrap();
        // e^{-2} I_0(2) from an independent evaluation.
        assert!((row[0] - 0.308508322553671).abs() < 1e-14);
        let total = row[0] + 2.0 * row[1..].iter().sum::<f64>();
        assert!((total - 1.0).abs() < 1e-13);
    }

    #[test]
    fn large_time_row_is_normalized() {
        for t in [20.0f64, 3.0e3, 1.0e8] {
            let nmax = (20.0 * t.sqrt()) as usize + 40;
            let row = heat_kernel_row(t, nmax, &HeatConfig::default()).unwrap();
            let total = row[0] + 2.0 * row[1..].iter().sum::<f64>();
            assert!((total - 1.0).abs() < 1e-12, "t = {t}: {total}");
            let gauss = 1.0 / (4.0 * std::f64::consts::PI * t).sqrt();
            assert!((row[0] / gauss - 1.0).abs() < 1.0 / t);
        }
    }

    #[test]
    fn semigroup_rejects_bad_order() {
        let u = Field::<f64>::delta(&line(3), &[0]).unwrap();
        assert!(fraclap_semigroup(&u, 1.0, &HeatConfig::default()).is_err());
        assert!(fraclap_semigroup(&u, 0.0, &HeatConfig::default()).is_err());
        let p = LatticeGeometry::new(1, 3, Boundary::PeriodicWrap).unwrap();
        let up = Field::<f64>::delta(&p, &[0]).unwrap();
        assert!(fraclap_semigroup(&up, 0.5, &HeatConfig::default()).is_err());
    }

    #[test]
    fn zero_field_maps_to_zero() {
        let z = Field::<f64>::zeros(&line(3));
        let v = fraclap_semigroup(&z, 0.5, &HeatConfig::default()).unwrap();
        assert!(v.is_zero());
    }

    #[test]
    fn lambdas_cover_the_spectrum() {
        let l = default_lambdas::<f64>(1);
        assert_eq!(l.len(), 20);
        assert!((l[19] - 4.0).abs() < 1e-12);
        assert!(l[0] > 0.0 && l[0] < 0.01);
    }
}
