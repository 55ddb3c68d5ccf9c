//! Problem data for `(-Δ)^α u + h(x) u = f(x, u)` and its energy functional
//! `I(u) = ½‖u‖_α² - Σ_x F(x, u(x))`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::lattice::{Boundary, Field, LatticeGeometry};
use crate::scalar::Real;
use crate::spectral::{
    apply_kernel, kernel_table, FractionalOrder, Kernel, Multiplier, SpectralConfig,
};

/// A function on ℤ^d that is either constant or periodic with integer
/// period `T_i ≥ 1` along each axis.
#[derive(Debug, Clone, PartialEq)]
pub enum SiteFunction<T> {
    Constant(T),
    /// `table` holds one period in lexicographic order of `x_i mod T_i`.
    Periodic {
        period: Vec<usize>,
        table: Vec<T>,
    },
}

impl<T: Real> SiteFunction<T> {
    pub fn periodic(period: Vec<usize>, table: Vec<T>) -> Result<Self> {
        if period.is_empty() || period.contains(&0) {
            return Err(Error::Config("periods must be positive".into()));
        }
        let cells: usize = period.iter().product();
        if cells != table.len() {
            return Err(Error::Config(format!(
                "period {:?} needs {} table values, got {}",
                period,
                cells,
                table.len()
            )));
        }
        if table.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config(
                "periodic table contains non-finite values".into(),
            ));
        }
        Ok(Self::Periodic { period, table })
    }

    pub fn value(&self, x: &[i64]) -> T {
        match self {
            Self::Constant(c) => *c,
            Self::Periodic { period, table } => {
                let idx = x.iter().zip(period).fold(0usize, |acc, (&c, &p)| {
                    acc * p + c.rem_euclid(p as i64) as usize
                });
                table[idx]
            }
        }
    }

    pub fn sample(&self, geom: &LatticeGeometry) -> Vec<T> {
        match self {
            Self::Constant(c) => vec![*c; geom.len()],
            Self::Periodic { .. } => {
                let mut x = vec![0i64; geom.dim()];
                (0..geom.len())
                    .map(|i| {
                        geom.coords_into(i, &mut x);
                        self.value(&x)
                    })
                    .collect()
            }
        }
    }

    fn range(&self) -> (T, T) {
        match self {
            Self::Constant(c) => (*c, *c),
            Self::Periodic { table, .. } => table
                .iter()
                .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| {
                    (lo.min(v), hi.max(v))
                }),
        }
    }

    /// A periodic function is well defined on a periodic box only when every
    /// period divides the box side.
    pub fn check_commensurate(&self, geom: &LatticeGeometry) -> Result<()> {
        if let Self::Periodic { period, .. } = self {
            if period.len() != geom.dim() {
                return Err(Error::Geometry(format!(
                    "period has {} axes, lattice has {}",
                    period.len(),
                    geom.dim()
                )));
            }
            if geom.boundary() == Boundary::PeriodicWrap
                && period.iter().any(|&p| !geom.side().is_multiple_of(p))
            {
                return Err(Error::Geometry(format!(
                    "period {:?} does not divide the box side {}",
                    period,
                    geom.side()
                )));
            }
        }
        Ok(())
    }

    pub fn is_constant(&self) -> bool {
        match self {
            Self::Constant(_) => true,
            Self::Periodic { table, .. } => table.iter().all(|&v| v == table[0]),
        }
    }
}

/// Potential `h` with `0 < c1 ≤ h(x) ≤ c2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential<T> {
    func: SiteFunction<T>,
    c1: T,
    c2: T,
}

impl<T: Real> Potential<T> {
    pub fn new(func: SiteFunction<T>) -> Result<Self> {
        let (c1, c2) = func.range();
        if !(c1 > T::zero()) || !c2.is_finite() {
            return Err(domain(format!(
                "potential must be bounded between positive constants, found range [{c1}, {c2}]"
            )));
        }
        Ok(Self { func, c1, c2 })
    }

    pub fn constant(c: T) -> Result<Self> {
        Self::new(SiteFunction::Constant(c))
    }

    pub fn bounds(&self) -> (T, T) {
        (self.c1, self.c2)
    }

    pub fn function(&self) -> &SiteFunction<T> {
        &self.func
    }

    pub fn value(&self, x: &[i64]) -> T {
        self.func.value(x)
    }

    pub fn sample(&self, geom: &LatticeGeometry) -> Vec<T> {
        self.func.sample(geom)
    }

    pub fn is_constant(&self) -> bool {
        self.func.is_constant()
    }
}

/// Contract for a nonlinearity `f(x, u)` with primitive `F(x, u)`.
///
/// Implementations must satisfy `f(x, 0) = 0`, `f(x, u) u > 2 F(x, u) > 0`
/// for `u ≠ 0`, and strict growth of `f(x, u) / |u|` on each half-line.
/// [`spot_check`] samples these.
pub trait SiteNonlinearity<T: Real> {
    fn f(&self, x: &[i64], u: T) -> T;

    fn primitive(&self, x: &[i64], u: T) -> T;

    /// `F(x, new) - F(x, old)`; override when it can be formed without
    /// cancellation.
    fn primitive_difference(&self, x: &[i64], old: T, new: T) -> T {
        self.primitive(x, new) - self.primitive(x, old)
    }
}

/// Power nonlinearities `f(x, u) = a(x) |u|^{p-2} u`.
#[derive(Debug, Clone, PartialEq)]
pub enum Nonlinearity<T> {
    PurePower { p: T },
    WeightedPower { p: T, weight: SiteFunction<T> },
}

impl<T: Real> Nonlinearity<T> {
    pub fn pure_power(p: T) -> Result<Self> {
        check_exponent(p)?;
        Ok(Self::PurePower { p })
    }

    pub fn weighted_power(p: T, weight: SiteFunction<T>) -> Result<Self> {
        check_exponent(p)?;
        let (lo, hi) = weight.range();
        if !(lo > T::zero()) || !hi.is_finite() {
            return Err(domain("power weight must be positive and bounded"));
        }
        Ok(Self::WeightedPower { p, weight })
    }

    pub fn exponent(&self) -> T {
        match self {
            Self::PurePower { p } | Self::WeightedPower { p, .. } => *p,
        }
    }

    pub fn weight(&self, x: &[i64]) -> T {
        match self {
            Self::PurePower { .. } => T::one(),
            Self::WeightedPower { weight, .. } => weight.value(x),
        }
    }

    fn weights(&self, geom: &LatticeGeometry) -> Vec<T> {
        match self {
            Self::PurePower { .. } => vec![T::one(); geom.len()],
            Self::WeightedPower { weight, .. } => weight.sample(geom),
        }
    }
}

fn check_exponent<T: Real>(p: T) -> Result<()> {
    if p.is_finite() && p > T::lit(2.0) {
        Ok(())
    } else {
        Err(domain(format!("power exponent must exceed 2, got {p}")))
    }
}

#[inline]
fn power_f<T: Real>(a: T, p: T, u: T) -> T {
    if u.is_zero() {
        return T::zero();
    }
    a * u.abs().powf(p - T::lit(2.0)) * u
}

#[inline]
fn power_primitive<T: Real>(a: T, p: T, u: T) -> T {
    a * u.abs().powf(p) / p
}

/// `a |u|^p / p` difference. For same-sign arguments it is
/// `F(old) · expm1(p · ln1p(δ / old))`, exact to a few ulps of the result.
/// Large relative changes cannot cancel and use the plain difference.
#[inline]
fn power_primitive_difference<T: Real>(a: T, p: T, old: T, new: T) -> T {
    let ratio = (new - old) / old;
    if old.is_zero() || !(ratio.abs() < T::lit(0.5)) {
        return power_primitive(a, p, new) - power_primitive(a, p, old);
    }
    power_primitive(a, p, old) * (p * ratio.ln_1p()).exp_m1()
}

impl<T: Real> SiteNonlinearity<T> for Nonlinearity<T> {
    fn f(&self, x: &[i64], u: T) -> T {
        power_f(self.weight(x), self.exponent(), u)
    }

    fn primitive(&self, x: &[i64], u: T) -> T {
        power_primitive(self.weight(x), self.exponent(), u)
    }

    fn primitive_difference(&self, x: &[i64], old: T, new: T) -> T {
        power_primitive_difference(self.weight(x), self.exponent(), old, new)
    }
}

/// Violation found by [`spot_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct AssumptionViolation {
    pub assumption: &'static str,
    pub site: Vec<i64>,
    pub u: f64,
}

/// Samples the structural assumptions on `f` at the given sites and values:
/// `f(x, 0) = 0`, oddness, `f u > 2F > 0`, and strict monotonicity of
/// `f / |u|` on each half-line (checked along the sorted positive samples).
pub fn spot_check<T: Real, N: SiteNonlinearity<T>>(
    nl: &N,
    sites: &[Vec<i64>],
    values: &[T],
) -> std::result::Result<(), AssumptionViolation> {
    let mut positive: Vec<T> = values
        .iter()
        .map(|v| v.abs())
        .filter(|v| *v > T::zero())
        .collect();
    positive.sort_by(|a, b| a.partial_cmp(b).expect("finite samples"));
    positive.dedup();
    let fail = |assumption, x: &Vec<i64>, u: T| AssumptionViolation {
        assumption,
        site: x.clone(),
        u: u.to_f64_lossy(),
    };
    for x in sites {
        if !nl.f(x, T::zero()).is_zero() {
            return Err(fail("f(x,0) = 0", x, T::zero()));
        }
        for &u in &positive {
            for s in [u, -u] {
                let f = nl.f(x, s);
                let big_f = nl.primitive(x, s);
                if nl.f(x, -s) != -f {
                    return Err(fail("odd in u", x, s));
                }
                if !(f * s > T::lit(2.0) * big_f && big_f > T::zero()) {
                    return Err(fail("f(x,u)u > 2F(x,u) > 0", x, s));
                }
            }
        }
        for w in positive.windows(2) {
            for sign in [T::one(), -T::one()] {
                let (u1, u2) = (w[0] * sign, w[1] * sign);
                let r1 = nl.f(x, u1) / u1.abs();
                let r2 = nl.f(x, u2) / u2.abs();
                if !(r2 * sign > r1 * sign) {
                    return Err(fail("f(x,u)/|u| strictly increasing", x, u2));
                }
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone)]
enum Operator<T: Real> {
    Fft(Multiplier<T>),
    Convolution,
}

/// Everything that defines `I` and `I'` on a finite box.
#[derive(Debug, Clone)]
pub struct Model<T: Real> {
    geom: LatticeGeometry,
    alpha: FractionalOrder<T>,
    potential: Potential<T>,
    nonlinearity: Nonlinearity<T>,
    kernel: Kernel<T>,
    operator: Operator<T>,
    h_values: Vec<T>,
    weights: Vec<T>,
    coords: Vec<i64>,
}

impl<T: Real> Model<T> {
    /// On a periodic box the operator is the exact torus multiplier (applied
    /// by FFT, with its kernel stored for inspection). On a zero-extended box
    /// the kernel is tabulated with `spectral` and applied by convolution.
    pub fn new(
        geom: &LatticeGeometry,
        alpha: FractionalOrder<T>,
        potential: Potential<T>,
        nonlinearity: Nonlinearity<T>,
        spectral: &SpectralConfig,
    ) -> Result<Self> {
        potential.function().check_commensurate(geom)?;
        if let Nonlinearity::WeightedPower { weight, .. } = &nonlinearity {
            weight.check_commensurate(geom)?;
        }
        let (kernel, operator) = match geom.boundary() {
            Boundary::PeriodicWrap => (
                Kernel::periodized(alpha, geom),
                Operator::Fft(Multiplier::new(alpha, geom)),
            ),
            Boundary::ZeroExtended => {
                if spectral.radius < 2 * geom.radius() {
                    log::warn!(
                        "kernel radius {} is below the box diameter {}; interactions are truncated",
                        spectral.radius,
                        2 * geom.radius()
                    );
                }
                (
                    kernel_table(alpha, geom.dim(), spectral)?,
                    Operator::Convolution,
                )
            }
        };
        Ok(Self {
            geom: geom.clone(),
            alpha,
            h_values: potential.sample(geom),
            weights: nonlinearity.weights(geom),
            coords: (0..geom.len()).flat_map(|i| geom.coords(i)).collect(),
            potential,
            nonlinearity,
            kernel,
            operator,
        })
    }

    pub fn geom(&self) -> &LatticeGeometry {
        &self.geom
    }

    pub fn alpha(&self) -> FractionalOrder<T> {
        self.alpha
    }

    pub fn potential(&self) -> &Potential<T> {
        &self.potential
    }

    pub fn nonlinearity(&self) -> &Nonlinearity<T> {
        &self.nonlinearity
    }

    pub fn kernel(&self) -> &Kernel<T> {
        &self.kernel
    }

    pub fn exponent(&self) -> T {
        self.nonlinearity.exponent()
    }

    fn site(&self, i: usize) -> &[i64] {
        let d = self.geom.dim();
        &self.coords[i * d..(i + 1) * d]
    }

    fn check(&self, u: &Field<T>) -> Result<()> {
        self.geom.check_same(u.geom())
    }

    /// `(-Δ)^α u`.
    pub fn apply_fractional(&self, u: &Field<T>) -> Result<Field<T>> {
        self.check(u)?;
        match &self.operator {
            Operator::Fft(m) => m.apply(u),
            Operator::Convolution => apply_kernel(u, &self.kernel),
        }
    }

    /// `(-Δ)^α u + h u`, the operator whose quadratic form is `‖·‖_α²`.
    pub fn apply_linear(&self, u: &Field<T>) -> Result<Field<T>> {
        let mut v = self.apply_fractional(u)?.into_values();
        for ((vi, &ui), &h) in v.iter_mut().zip(u.values()).zip(&self.h_values) {
            *vi = *vi + h * ui;
        }
        Ok(Field::from_values_unchecked(&self.geom, v))
    }

    /// `(u, v)_α`.
    pub fn inner(&self, u: &Field<T>, v: &Field<T>) -> Result<T> {
        self.check(v)?;
        Ok(self.apply_linear(u)?.dot(v))
    }

    /// `‖u‖_α`.
    pub fn norm_alpha(&self, u: &Field<T>) -> Result<T> {
        Ok(self.inner(u, u)?.max(T::zero()).sqrt())
    }

    pub fn f_eval(&self, x: &[i64], u: T) -> T {
        self.nonlinearity.f(x, u)
    }

    pub fn primitive_eval(&self, x: &[i64], u: T) -> T {
        self.nonlinearity.primitive(x, u)
    }

    /// `Σ_x a(x) |u(x)|^p`, which equals `Σ f(x,u) u` for power nonlinearities.
    pub fn power_sum(&self, u: &Field<T>) -> T {
        let p = self.exponent();
        u.values()
            .iter()
            .zip(&self.weights)
            .fold(T::zero(), |acc, (&v, &a)| acc + a * v.abs().powf(p))
    }

    /// `Σ_x F(x, u(x))`.
    pub fn primitive_sum(&self, u: &Field<T>) -> T {
        self.power_sum(u) / self.exponent()
    }

    /// `Σ_x [F(x, new) - F(x, old)]` without cancellation.
    pub fn primitive_sum_difference(&self, old: &Field<T>, new: &Field<T>) -> T {
        let p = self.exponent();
        old.values()
            .iter()
            .zip(new.values())
            .zip(&self.weights)
            .fold(T::zero(), |acc, ((&o, &n), &a)| {
                acc + power_primitive_difference(a, p, o, n)
            })
    }

    /// `I(u) = ½ ‖u‖_α² - Σ F(x, u)`.
    pub fn energy(&self, u: &Field<T>) -> Result<T> {
        Ok(T::lit(0.5) * self.inner(u, u)? - self.primitive_sum(u))
    }

    /// Pointwise residual `(-Δ)^α u + h u - f(·, u)`, the ℓ² representative
    /// of `I'(u)`.
    pub fn gradient(&self, u: &Field<T>) -> Result<Field<T>> {
        let lin = self.apply_linear(u)?;
        Ok(self.gradient_from_linear(u, &lin))
    }

    pub(crate) fn gradient_from_linear(&self, u: &Field<T>, lin: &Field<T>) -> Field<T> {
        let p = self.exponent();
        let values = lin
            .values()
            .iter()
            .zip(u.values())
            .zip(&self.weights)
            .map(|((&l, &v), &a)| l - power_f(a, p, v))
            .collect();
        Field::from_values_unchecked(&self.geom, values)
    }

    /// `⟨I'(u), u⟩ = ‖u‖_α² - Σ f(x, u) u`; zero exactly on the Nehari manifold.
    pub fn nehari_residual(&self, u: &Field<T>) -> Result<T> {
        self.check(u)?;
        if u.is_zero() {
            return Err(domain("the Nehari manifold excludes the zero field"));
        }
        Ok(self.inner(u, u)? - self.power_sum(u))
    }

    /// `Σ_x [½ f(x,u) u - F(x,u)]`, equal to `I(u)` at critical points.
    pub fn mountain_gap(&self, u: &Field<T>) -> T {
        let p = self.exponent();
        let half = T::lit(0.5);
        u.values()
            .iter()
            .enumerate()
            .fold(T::zero(), |acc, (i, &v)| {
                let a = self.weights[i];
                acc + half * power_f(a, p, v) * v - power_primitive(a, p, v)
            })
    }

    /// Lattice coordinates of the site stored at `i`.
    pub fn coords_of(&self, i: usize) -> &[i64] {
        self.site(i)
    }
}

/// Serializable site function: `{"kind": "constant", "c": ..}` or
/// `{"kind": "periodic", "period": [..], "values": [..]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SiteFunctionConfig {
    Constant {
        c: f64,
    },
    Periodic {
        period: Vec<usize>,
        values: Vec<f64>,
    },
}

impl SiteFunctionConfig {
    pub fn build<T: Real>(&self) -> Result<SiteFunction<T>> {
        match self {
            Self::Constant { c } => Ok(SiteFunction::Constant(T::lit(*c))),
            Self::Periodic { period, values } => {
                SiteFunction::periodic(period.clone(), values.iter().map(|&v| T::lit(v)).collect())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NonlinearityConfig {
    PurePower { p: f64 },
    WeightedPower { p: f64, weight: SiteFunctionConfig },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectralSection {
    #[serde(rename = "M")]
    pub points: usize,
    #[serde(rename = "R")]
    pub radius: usize,
}

/// Model configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub d: usize,
    #[serde(rename = "L")]
    pub radius: usize,
    #[serde(default)]
    pub boundary: Boundary,
    pub alpha: f64,
    pub h: SiteFunctionConfig,
    pub f: NonlinearityConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectral: Option<SpectralSection>,
}

impl ModelConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn geometry(&self) -> Result<LatticeGeometry> {
        LatticeGeometry::new(self.d, self.radius, self.boundary)
    }

    pub fn spectral_config(&self) -> Result<SpectralConfig> {
        match self.spectral {
            Some(s) => SpectralConfig::new(s.points, s.radius),
            None => Ok(SpectralConfig::default_for(self.d, self.radius)),
        }
    }

    pub fn build<T: Real>(&self) -> Result<Model<T>> {
        let geom = self.geometry()?;
        let alpha = FractionalOrder::new(T::lit(self.alpha))?;
        let potential = Potential::new(self.h.build()?)?;
        let nonlinearity = match &self.f {
            NonlinearityConfig::PurePower { p } => Nonlinearity::pure_power(T::lit(*p))?,
            NonlinearityConfig::WeightedPower { p, weight } => {
                Nonlinearity::weighted_power(T::lit(*p), weight.build()?)?
            }
        };
        Model::new(
            &geom,
            alpha,
            potential,
            nonlinearity,
            &self.spectral_config()?,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stencil_model() -> Model<f64> {
        let geom = LatticeGeometry::new(1, 8, Boundary::ZeroExtended).unwrap();
        Model::new(
            &geom,
            FractionalOrder::new(1.0).unwrap(),
            Potential::constant(1.0).unwrap(),
            Nonlinearity::pure_power(4.0).unwrap(),
            &SpectralConfig::new(256, 16).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn power_values() {
        let nl = Nonlinearity::pure_power(4.0f64).unwrap();
        assert_eq!(nl.f(&[0], 2.0), 8.0);
        assert_eq!(nl.primitive(&[0], 2.0), 4.0);
        assert_eq!(nl.f(&[0], 0.0), 0.0);
        assert_eq!(nl.primitive(&[0], 0.0), 0.0);
        assert_eq!(nl.f(&[3], -1.5), -nl.f(&[3], 1.5));
    }

    #[test]
    fn exponent_must_exceed_two() {
        assert!(Nonlinearity::pure_power(2.0f64).is_err());
        assert!(Nonlinearity::pure_power(f64::INFINITY).is_err());
        let w = SiteFunction::Constant(-1.0);
        assert!(Nonlinearity::weighted_power(3.0f64, w).is_err());
    }

    #[test]
    fn potential_bounds() {
        assert!(Potential::constant(0.0f64).is_err());
        let table = SiteFunction::periodic(vec![3], vec![1.0, 2.0, 0.5]).unwrap();
        let h = Potential::new(table).unwrap();
        assert_eq!(h.bounds(), (0.5, 2.0));
        assert_eq!(h.value(&[4]), 2.0);
        assert_eq!(h.value(&[-1]), 0.5);
        assert!(SiteFunction::periodic(vec![3], vec![1.0f64]).is_err());
    }

    #[test]
    fn periodic_box_requires_commensurate_period() {
        let geom = LatticeGeometry::new(1, 4, Boundary::PeriodicWrap).unwrap();
        let h = Potential::new(SiteFunction::periodic(vec![2], vec![1.0, 2.0]).unwrap()).unwrap();
        let res = Model::new(
            &geom,
            FractionalOrder::new(0.5).unwrap(),
            h,
            Nonlinearity::pure_power(4.0).unwrap(),
            &SpectralConfig::default_for(1, 4),
        );
        assert!(res.is_err());
    }

    #[test]
    fn delta_energy_with_stencil() {
        let m = stencil_model();
        let d = Field::delta(m.geom(), &[0]).unwrap();
        assert!((m.energy(&d).unwrap() - 1.25).abs() < 1e-12);
        assert!((m.nehari_residual(&d).unwrap() - 2.0).abs() < 1e-12);
        assert!((m.mountain_gap(&d) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn zero_field_edge_cases() {
        let m = stencil_model();
        let z = Field::zeros(m.geom());
        assert_eq!(m.energy(&z).unwrap(), 0.0);
        assert!(m.gradient(&z).unwrap().is_zero());
        assert_eq!(m.mountain_gap(&z), 0.0);
        assert!(m.nehari_residual(&z).is_err());
    }

    #[test]
    fn stable_primitive_difference() {
        let a = 1.0f64;
        let old = 1.3f64;
        let new = old * (1.0 + 1e-13);
        let direct = (new.powi(4) - old.powi(4)) / 4.0;
        let exact = old.powi(3) * (new - old) * (1.0 + 1.5e-13);
        let stable = power_primitive_difference(a, 4.0, old, new);
        assert!((stable - exact).abs() / exact < 1e-12);
        assert!((direct - exact).abs() / exact > (stable - exact).abs() / exact);
        assert_eq!(power_primitive_difference(a, 4.0, -1.0, 1.0), 0.0);
    }

    #[test]
    fn spot_check_accepts_powers_and_flags_bad_functions() {
        let nl = Nonlinearity::pure_power(3.0f64).unwrap();
        let sites = vec![vec![0i64], vec![5]];
        let values = [0.1, 0.5, 1.0, 2.0, 7.0];
        assert!(spot_check(&nl, &sites, &values).is_ok());

        struct Linear;
        impl SiteNonlinearity<f64> for Linear {
            fn f(&self, _: &[i64], u: f64) -> f64 {
                u
            }
            fn primitive(&self, _: &[i64], u: f64) -> f64 {
                0.5 * u * u
            }
        }
        let err = spot_check(&Linear, &sites, &values).unwrap_err();
        assert_eq!(err.assumption, "f(x,u)u > 2F(x,u) > 0");
    }

    #[test]
    fn config_round_trip() {
        let text = r#"{"d":1,"L":8,"boundary":"periodic_wrap","alpha":0.5,
            "h":{"kind":"periodic","period":[17],"values":[1,1,1,1,1,1,1,1,2,1,1,1,1,1,1,1,1]},
            "f":{"kind":"weighted_power","p":4,"weight":{"kind":"constant","c":2.0}},
            "spectral":{"M":512,"R":32}}"#;
        let cfg = ModelConfig::from_json(text).unwrap();
        assert_eq!(cfg.boundary, Boundary::PeriodicWrap);
        let m: Model<f64> = cfg.build().unwrap();
        assert_eq!(m.exponent(), 4.0);
        let back: ModelConfig =
            serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
    }
}
