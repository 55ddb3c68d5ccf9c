//! Ground states and bound states on the Nehari manifold.
//!
//! Every nonzero direction `w` meets the manifold `{⟨I'(u), u⟩ = 0}` at exactly
//! one point `s_w w`, where `s ↦ I(s w)` peaks. Minimizing `I` over the
//! manifold is therefore minimizing `Ψ(w) = I(s_w w)` over directions: the
//! solver takes an ℓ² gradient step and maps the result back to the manifold.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::FftDirection;
use thiserror::Error;

use crate::error::{domain, Error, Result};
use crate::fftn::CubeFft;
use crate::lattice::{Boundary, Field, LatticeGeometry};
use crate::model::{Model, SiteNonlinearity};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Stop when `‖I'(u)‖_2 / ‖u‖_2` falls below this.
    pub tol_grad: f64,
    /// Required `|⟨I'(u), u⟩|` at the returned point.
    pub tol_nehari: f64,
    pub max_iter: usize,
    pub step0: f64,
    /// Backtracking factor in `(0, 1)`.
    pub backtrack: f64,
    /// Sufficient-decrease constant of the Armijo test.
    pub armijo: f64,
    pub seed: u64,
    /// Largest acceptable ℓ² mass fraction in the outermost shell.
    pub boundary_mass_tol: f64,
    /// Relative H^α distance below which two solutions share an orbit.
    pub dedupe_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol_grad: 1e-8,
            tol_nehari: 1e-10,
            max_iter: 5000,
            step0: 0.5,
            backtrack: 0.5,
            armijo: 1e-4,
            seed: 0,
            boundary_mass_tol: 1e-6,
            dedupe_tol: 1e-4,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("tol_grad", self.tol_grad),
            ("tol_nehari", self.tol_nehari),
            ("step0", self.step0),
            ("armijo", self.armijo),
            ("boundary_mass_tol", self.boundary_mass_tol),
            ("dedupe_tol", self.dedupe_tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.backtrack > 0.0 && self.backtrack < 1.0) {
            return Err(Error::Config(format!(
                "backtrack factor must lie in (0, 1), got {}",
                self.backtrack
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::Config("max_iter must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct GroundStateResult<T> {
    pub u: Field<T>,
    pub energy: T,
    /// `‖I'(u)‖_2 / ‖u‖_2`.
    pub grad_residual: T,
    /// `⟨I'(u), u⟩`.
    pub nehari_residual: T,
    pub iterations: usize,
    /// Ray scaling applied by each projection, starting with the initial one.
    pub s_history: Vec<T>,
    /// Energy after each accepted step, accumulated from stably computed
    /// differences; non-increasing.
    pub energy_trace: Vec<T>,
    /// ℓ² mass fraction in the outermost shell of the box.
    pub boundary_mass: T,
    /// Set when `boundary_mass` exceeds the configured tolerance.
    pub truncation_suspect: bool,
}

#[derive(Debug, Error)]
pub enum SolveError<T: Real> {
    #[error(transparent)]
    Model(#[from] Error),

    #[error("no convergence within {} iterations (relative gradient {})", .best.iterations, .best.grad_residual)]
    NotConverged { best: Box<GroundStateResult<T>> },

    #[error("line search stalled at iteration {} (relative gradient {})", .best.iterations, .best.grad_residual)]
    Stagnation { best: Box<GroundStateResult<T>> },
}

impl<T: Real> SolveError<T> {
    /// The iterate reached before failing, when there is one.
    pub fn best(&self) -> Option<&GroundStateResult<T>> {
        match self {
            Self::Model(_) => None,
            Self::NotConverged { best } | Self::Stagnation { best } => Some(best),
        }
    }
}

/// Unique `s > 0` with `s w` on the Nehari manifold. For power
/// nonlinearities `s_w = (‖w‖_α² / Σ a |w|^p)^{1/(p-2)}`.
pub fn nehari_scale<T: Real>(m: &Model<T>, w: &Field<T>) -> Result<T> {
    if w.is_zero() {
        return Err(domain("the zero field has no Nehari scaling"));
    }
    let q = m.inner(w, w)?;
    Ok(ray_scale(m, q, m.power_sum(w)))
}

fn ray_scale<T: Real>(m: &Model<T>, quad: T, power: T) -> T {
    (quad / power).powf((m.exponent() - T::lit(2.0)).recip())
}

/// Extra contract needed by the generic root-solve.
pub trait DifferentiableNonlinearity<T: Real>: SiteNonlinearity<T> {
    /// `∂f/∂u`.
    fn df(&self, x: &[i64], u: T) -> T;
}

impl<T: Real> DifferentiableNonlinearity<T> for crate::model::Nonlinearity<T> {
    fn df(&self, x: &[i64], u: T) -> T {
        let p = self.exponent();
        if u.is_zero() {
            return T::zero();
        }
        self.weight(x) * (p - T::one()) * u.abs().powf(p - T::lit(2.0))
    }
}

/// Root of `φ(s) = s² ‖w‖_α² - Σ f(x, s w) s w` by Newton's method inside a
/// bisection bracket, for any nonlinearity with a derivative. Relative
/// tolerance `1e-12`.
pub fn nehari_scale_newton<T: Real, N: DifferentiableNonlinearity<T>>(
    m: &Model<T>,
    nl: &N,
    w: &Field<T>,
) -> Result<T> {
    if w.is_zero() {
        return Err(domain("the zero field has no Nehari scaling"));
    }
    let q = m.inner(w, w)?;
    let sites: Vec<(usize, T)> = w
        .values()
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(i, &v)| (i, v))
        .collect();
    let phi = |s: T| -> (T, T) {
        let mut value = s * s * q;
        let mut slope = T::lit(2.0) * s * q;
        for &(i, v) in &sites {
            let x = m.coords_of(i);
            let f = nl.f(x, s * v);
            value = value - f * s * v;
            slope = slope - nl.df(x, s * v) * s * v * v - f * v;
        }
        (value, slope)
    };

    // φ > 0 below the root and < 0 above it.
    let (mut lo, mut hi) = (T::one(), T::one());
    for _ in 0..400 {
        if phi(lo).0 > T::zero() {
            break;
        }
        lo = lo / T::lit(2.0);
    }
    for _ in 0..400 {
        if phi(hi).0 < T::zero() {
            break;
        }
        hi = hi * T::lit(2.0);
    }
    if !(phi(lo).0 > T::zero() && phi(hi).0 < T::zero()) {
        return Err(domain("could not bracket the Nehari scaling"));
    }
    let tol = T::lit(1e-12);
    let mut s = (lo + hi) / T::lit(2.0);
    for _ in 0..200 {
        let (value, slope) = phi(s);
        if value > T::zero() {
            lo = s;
        } else {
            hi = s;
        }
        let newton = s - value / slope;
        let next = if newton > lo && newton < hi && slope.is_finite() {
            newton
        } else {
            (lo + hi) / T::lit(2.0)
        };
        if (next - s).abs() <= tol * next || (hi - lo) <= tol * s {
            return Ok(next);
        }
        s = next;
    }
    Ok(s)
}

/// `m(w) = s_ŵ ŵ` with `ŵ = w / ‖w‖_α`, returned with `s_ŵ`.
pub fn project_with_scale<T: Real>(m: &Model<T>, w: &Field<T>) -> Result<(Field<T>, T)> {
    if w.is_zero() {
        return Err(domain(
            "cannot project the zero field onto the Nehari manifold",
        ));
    }
    let norm = m.norm_alpha(w)?;
    let unit = w.scale(norm.recip());
    let s = nehari_scale(m, &unit)?;
    Ok((unit.scale(s), s))
}

/// The map `m: S_1 → M` extended to all nonzero `w` through their ray.
pub fn project_m<T: Real>(m: &Model<T>, w: &Field<T>) -> Result<Field<T>> {
    Ok(project_with_scale(m, w)?.0)
}

/// `m^{-1}(u) = u / ‖u‖_α`.
pub fn unproject<T: Real>(m: &Model<T>, u: &Field<T>) -> Result<Field<T>> {
    let norm = m.norm_alpha(u)?;
    if norm.is_zero() {
        return Err(domain("cannot normalize the zero field"));
    }
    Ok(u.scale(norm.recip()))
}

/// A point on the manifold with its cached linear image.
struct Iterate<T: Real> {
    u: Field<T>,
    lin: Field<T>,
    grad: Field<T>,
    grad_sq: T,
}

impl<T: Real> Iterate<T> {
    fn new(m: &Model<T>, u: Field<T>, lin: Field<T>) -> Self {
        let grad = m.gradient_from_linear(&u, &lin);
        let grad_sq = grad.dot(&grad);
        Self {
            u,
            lin,
            grad,
            grad_sq,
        }
    }

    fn relative_gradient(&self) -> T {
        self.grad_sq.sqrt() / self.u.norm2()
    }
}

/// Maps `w` onto the manifold along its ray, reusing `A w`.
fn project_cached<T: Real>(m: &Model<T>, w: Field<T>) -> Result<(Field<T>, Field<T>, T)> {
    let lin = m.apply_linear(&w)?;
    let quad = lin.dot(&w);
    let power = m.power_sum(&w);
    if !(quad > T::zero()) || !(power > T::zero()) {
        return Err(domain("degenerate direction in projection"));
    }
    let t = ray_scale(m, quad, power);
    let unit_norm = quad.sqrt();
    Ok((w.scale(t), lin.scale(t), t * unit_norm))
}

/// Projected steepest descent of `Ψ` from `w0` with Armijo backtracking.
/// Trial steps follow the Barzilai–Borwein length of the previous step.
pub fn minimize<T: Real>(
    m: &Model<T>,
    w0: &Field<T>,
    cfg: &SolverConfig,
) -> std::result::Result<GroundStateResult<T>, SolveError<T>> {
    minimize_symmetric(m, w0, cfg, None)
}

/// [`minimize`] restricted to fields with the given reflection symmetry.
///
/// For `f` odd in `u` and a reflection that preserves `h` and the weight,
/// the symmetric subspace is invariant under the gradient, so its critical
/// points are critical points of the full problem. Each trial point is
/// re-symmetrized so rounding cannot break the symmetry; the reported
/// residuals are those of the unconstrained gradient.
pub fn minimize_symmetric<T: Real>(
    m: &Model<T>,
    w0: &Field<T>,
    cfg: &SolverConfig,
    symmetry: Option<&Reflection>,
) -> std::result::Result<GroundStateResult<T>, SolveError<T>> {
    cfg.validate()?;
    m.geom().check_same(w0.geom())?;
    let w0 = match symmetry {
        Some(r) => r.symmetrize(w0)?,
        None => w0.clone(),
    };
    if w0.is_zero() {
        return Err(domain("initial field must be nonzero").into());
    }
    let tol_grad = T::lit(cfg.tol_grad);
    let armijo = T::lit(cfg.armijo);
    let beta = T::lit(cfg.backtrack);
    let step_min = T::lit(1e-14);
    let step_max = T::lit(1e3);

    let (u, lin, s0) = project_cached(m, w0)?;
    let mut cur = Iterate::new(m, u, lin);
    let mut energy = T::lit(0.5) * cur.lin.dot(&cur.u) - m.primitive_sum(&cur.u);
    let mut trace = vec![energy];
    let mut s_history = vec![s0];
    let mut step = T::lit(cfg.step0);
    let mut iterations = 0;
    let mut failure: Option<bool> = None;

    while cur.relative_gradient() > tol_grad {
        if iterations >= cfg.max_iter {
            failure = Some(false);
            break;
        }
        let mut eta = step;
        let accepted = loop {
            let mut w = cur.u.add_scaled(-eta, &cur.grad);
            if let Some(r) = symmetry {
                w = r.symmetrize(&w)?;
            }
            if let Ok((u_new, lin_new, s)) = project_cached(m, w) {
                let delta = &u_new - &cur.u;
                let lin_delta = &lin_new - &cur.lin;
                let change = cur.lin.dot(&delta) + T::lit(0.5) * lin_delta.dot(&delta)
                    - m.primitive_sum_difference(&cur.u, &u_new);
                if change <= -armijo * eta * cur.grad_sq {
                    break Some((u_new, lin_new, s, change, delta));
                }
            }
            eta = eta * beta;
            if eta < step_min {
                break None;
            }
        };
        let Some((u_new, lin_new, s, change, delta)) = accepted else {
            failure = Some(true);
            break;
        };
        let next = Iterate::new(m, u_new, lin_new);
        let dg = &next.grad - &cur.grad;
        let sy = delta.dot(&dg);
        let ss = delta.dot(&delta);
        step = if sy > T::zero() {
            (ss / sy).max(step_min * T::lit(100.0)).min(step_max)
        } else {
            (eta * T::lit(2.0)).min(step_max)
        };
        energy = energy + change;
        trace.push(energy);
        s_history.push(s);
        cur = next;
        iterations += 1;
    }

    let grad_residual = cur.relative_gradient();
    let nehari_residual = cur.lin.dot(&cur.u) - m.power_sum(&cur.u);
    let energy = T::lit(0.5) * cur.lin.dot(&cur.u) - m.primitive_sum(&cur.u);
    let boundary_mass = cur.u.boundary_mass();
    let truncation_suspect = boundary_mass > T::lit(cfg.boundary_mass_tol);
    if truncation_suspect {
        log::warn!(
            "boundary mass {boundary_mass:e} exceeds {:e}; rerun with a larger box",
            cfg.boundary_mass_tol
        );
    }
    let result = GroundStateResult {
        u: cur.u,
        energy,
        grad_residual,
        nehari_residual,
        iterations,
        s_history,
        energy_trace: trace,
        boundary_mass,
        truncation_suspect,
    };
    match failure {
        None => Ok(result),
        Some(false) => Err(SolveError::NotConverged {
            best: Box::new(result),
        }),
        Some(true) => Err(SolveError::Stagnation {
            best: Box::new(result),
        }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// Mirror `x_axis ↦ twice_center - x_axis` combined with a parity: the
/// symmetric fields satisfy `u(R x) = ±u(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Reflection {
    pub axis: usize,
    pub twice_center: i64,
    pub parity: Parity,
}

impl Reflection {
    /// `(R u)(x) = u(R x)`. A zero-extended box is only mapped onto itself by
    /// mirrors through the origin.
    pub fn apply<T: Real>(&self, u: &Field<T>) -> Result<Field<T>> {
        let geom = u.geom();
        if self.axis >= geom.dim() {
            return Err(Error::Geometry(format!(
                "reflection axis {} out of range for dimension {}",
                self.axis,
                geom.dim()
            )));
        }
        if geom.boundary() == Boundary::ZeroExtended && self.twice_center != 0 {
            return Err(Error::Geometry(
                "a zero-extended box is only symmetric about the origin".into(),
            ));
        }
        let mut x = vec![0i64; geom.dim()];
        let values = (0..geom.len())
            .map(|i| {
                geom.coords_into(i, &mut x);
                x[self.axis] = geom.wrap(self.twice_center - x[self.axis]);
                u.at(&x)
            })
            .collect();
        Field::from_values(geom, values)
    }

    /// `½ (u ± R u)`.
    pub fn symmetrize<T: Real>(&self, u: &Field<T>) -> Result<Field<T>> {
        let mirrored = self.apply(u)?;
        let sign = match self.parity {
            Parity::Even => T::one(),
            Parity::Odd => -T::one(),
        };
        Ok(u.add_scaled(sign, &mirrored).scale(T::lit(0.5)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value<T: Real>(self) -> T {
        match self {
            Sign::Plus => T::one(),
            Sign::Minus => -T::one(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitDistance<T> {
    /// `min ‖u1 - σ u2(· - y)‖_α / max(‖u1‖_α, ‖u2‖_α)`.
    pub distance: T,
    pub shift: Vec<i64>,
    pub sign: Sign,
}

/// Distance between the translation orbits (and, with `sign_aware`, the
/// `±` orbits) of two fields, minimized over every shift in the box.
///
/// On a periodic box all shifts are scored at once through FFT
/// cross-correlations and the best few are re-measured directly; on a
/// zero-extended box each shift is measured directly.
pub fn orbit_distance<T: Real>(
    m: &Model<T>,
    u1: &Field<T>,
    u2: &Field<T>,
    sign_aware: bool,
) -> Result<OrbitDistance<T>> {
    let geom = m.geom();
    geom.check_same(u1.geom())?;
    geom.check_same(u2.geom())?;
    let n1 = m.norm_alpha(u1)?;
    let n2 = m.norm_alpha(u2)?;
    let scale = n1.max(n2);
    if scale.is_zero() {
        return Ok(OrbitDistance {
            distance: T::zero(),
            shift: vec![0; geom.dim()],
            sign: Sign::Plus,
        });
    }
    let signs: &[Sign] = if sign_aware {
        &[Sign::Plus, Sign::Minus]
    } else {
        &[Sign::Plus]
    };
    let direct = |y: &[i64], sign: Sign| -> Result<T> {
        let moved = u2.shift(y);
        let diff = u1.add_scaled(-sign.value::<T>(), &moved);
        Ok(m.norm_alpha(&diff)? / scale)
    };

    let candidates: Vec<(Vec<i64>, Sign)> = match geom.boundary() {
        Boundary::PeriodicWrap => {
            let scores = periodic_orbit_scores(m, u1, u2)?;
            let mut ranked: Vec<(T, usize, Sign)> = Vec::new();
            for (i, &(cross, shifted_sq)) in scores.iter().enumerate() {
                for &sign in signs {
                    let d2 = n1 * n1 + shifted_sq - T::lit(2.0) * sign.value::<T>() * cross;
                    ranked.push((d2, i, sign));
                }
            }
            ranked.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite scores"));
            ranked
                .into_iter()
                .take(4)
                .map(|(_, i, sign)| (geom.coords(i), sign))
                .collect()
        }
        Boundary::ZeroExtended => (0..geom.len())
            .flat_map(|i| signs.iter().map(move |&s| (geom.coords(i), s)))
            .collect(),
    };

    let mut best: Option<OrbitDistance<T>> = None;
    for (y, sign) in candidates {
        let d = direct(&y, sign)?;
        if best.as_ref().is_none_or(|b| d < b.distance) {
            best = Some(OrbitDistance {
                distance: d,
                shift: y,
                sign,
            });
        }
    }
    Ok(best.expect("at least one candidate shift"))
}

/// For every shift `y` (indexed like the box sites): `(u1, u2(· - y))_α` and
/// `‖u2(· - y)‖_α²`.
fn periodic_orbit_scores<T: Real>(
    m: &Model<T>,
    u1: &Field<T>,
    u2: &Field<T>,
) -> Result<Vec<(T, T)>> {
    let geom = m.geom();
    let frac2 = m.apply_fractional(u2)?.dot(u2);
    let a = m.apply_linear(u1)?;
    let h = m.potential().sample(geom);
    let sq: Vec<T> = u2.values().iter().map(|&v| v * v).collect();
    let cross = cyclic_correlation(geom, a.values(), u2.values());
    let pot = cyclic_correlation(geom, &h, &sq);
    Ok(cross
        .into_iter()
        .zip(pot)
        .map(|(c, p)| (c, frac2 + p))
        .collect())
}

/// `c(y) = Σ_x a(x) b(x - y)` on the torus, returned in box-site order of `y`.
fn cyclic_correlation<T: Real>(geom: &LatticeGeometry, a: &[T], b: &[T]) -> Vec<T> {
    let n = geom.side();
    let fft = CubeFft::new(n, geom.dim());
    // Box coordinate c ∈ [-L, L] lives at grid slot c mod n.
    let slots: Vec<usize> = (0..geom.len())
        .map(|i| {
            geom.coords(i)
                .iter()
                .fold(0usize, |acc, &c| acc * n + c.rem_euclid(n as i64) as usize)
        })
        .collect();
    let zero = Complex::new(T::zero(), T::zero());
    let mut fa = vec![zero; fft.len()];
    let mut fb = vec![zero; fft.len()];
    for (i, &s) in slots.iter().enumerate() {
        fa[s] = Complex::new(a[i], T::zero());
        fb[s] = Complex::new(b[i], T::zero());
    }
    fft.process(&mut fa, FftDirection::Forward);
    fft.process(&mut fb, FftDirection::Forward);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x = *x * y.conj();
    }
    fft.process(&mut fa, FftDirection::Inverse);
    let norm = T::from_count(fft.len()).recip();
    slots.iter().map(|&s| fa[s].re * norm).collect()
}

/// Normalized Gaussian bump `exp(-|x - c|² / σ²)` (distance taken on the
/// torus for periodic boxes).
pub fn gaussian_bump<T: Real>(geom: &LatticeGeometry, center: &[f64], width: f64) -> Field<T> {
    let side = geom.side() as f64;
    let periodic = geom.boundary() == Boundary::PeriodicWrap;
    let raw = Field::from_fn(geom, |x| {
        let r2: f64 = x
            .iter()
            .zip(center)
            .map(|(&c, &x0)| {
                let mut dx = c as f64 - x0;
                if periodic {
                    dx -= side * (dx / side).round();
                }
                dx * dx
            })
            .sum();
        T::lit((-r2 / (width * width)).exp())
    });
    let norm = raw.norm2();
    raw.scale(norm.recip())
}

/// Shape family of a multistart seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedShape {
    SingleBump,
    EvenPair,
    OddPair,
    Cluster,
}

impl SeedShape {
    pub fn for_start(index: usize) -> Self {
        match index % 4 {
            0 => Self::SingleBump,
            1 => Self::EvenPair,
            2 => Self::OddPair,
            _ => Self::Cluster,
        }
    }
}

/// Random initial field for start `index` of a batch seeded with `seed`.
pub fn seed_field<T: Real>(geom: &LatticeGeometry, seed: u64, index: usize) -> Field<T> {
    seed_start(geom, seed, index).0
}

/// Initial field for start `index` together with the reflection symmetry
/// it carries exactly (paired seeds only).
pub fn seed_start<T: Real>(
    geom: &LatticeGeometry,
    seed: u64,
    index: usize,
) -> (Field<T>, Option<Reflection>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64 + 1);
    let l = geom.radius() as f64;
    let periodic = geom.boundary() == Boundary::PeriodicWrap;
    let reach = if periodic { l } else { 0.5 * l };
    let max_width = (0.25 * l).clamp(1.0, 6.0);
    let center = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        (0..geom.dim())
            .map(|_| rng.gen_range(-reach..=reach))
            .collect()
    };
    let width = rng.gen_range(1.0..=max_width);
    let shape = SeedShape::for_start(index);
    match shape {
        SeedShape::SingleBump => (gaussian_bump(geom, &center(&mut rng), width), None),
        SeedShape::EvenPair | SeedShape::OddPair => {
            let twice_center = if periodic {
                let k = 2 * geom.radius() as i64;
                rng.gen_range(-k..=k)
            } else {
                0
            };
            let mut a = center(&mut rng);
            let lo = (2.0 * width).ceil();
            let gap = rng.gen_range(lo..=lo.max((0.5 * l).floor())).round();
            a[0] = 0.5 * (twice_center as f64 - gap);
            let mut b = a.clone();
            b[0] = a[0] + gap;
            let (sign, parity) = match shape {
                SeedShape::OddPair => (-1.0, Parity::Odd),
                _ => (1.0, Parity::Even),
            };
            let reflection = Reflection {
                axis: 0,
                twice_center,
                parity,
            };
            let raw = gaussian_bump::<T>(geom, &a, width)
                .add_scaled(T::lit(sign), &gaussian_bump(geom, &b, width));
            let field = reflection
                .symmetrize(&raw)
                .expect("mirror maps the box to itself");
            (field, Some(reflection))
        }
        SeedShape::Cluster => {
            let count = rng.gen_range(2..=3);
            let mut acc = Field::zeros(geom);
            for _ in 0..count {
                let s = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                acc = acc.add_scaled(T::lit(s), &gaussian_bump(geom, &center(&mut rng), width));
            }
            if acc.is_zero() {
                acc = gaussian_bump(geom, &center(&mut rng), width);
            }
            (acc, None)
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolutionMember<T> {
    pub representative: Field<T>,
    pub energy: T,
    pub grad_residual: T,
    pub nehari_residual: T,
    /// Number of starts that landed in this orbit.
    pub multiplicity: usize,
    /// Index of the start that produced the representative.
    pub start: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SkippedStart {
    pub start: usize,
    pub reason: String,
}

/// Geometrically distinct solutions found by [`multistart`], by energy.
#[derive(Debug, Clone)]
pub struct SolutionSet<T> {
    pub members: Vec<SolutionMember<T>>,
    pub dedupe_tol: T,
    pub skipped: Vec<SkippedStart>,
}

impl<T: Real> SolutionSet<T> {
    /// Lowest energy in the batch, the ground-state estimate.
    pub fn ground_energy(&self) -> Option<T> {
        self.members.first().map(|m| m.energy)
    }

    /// Smallest value of `‖u‖_α - √(2c)(1 - 1e-8)` over the members, with `c`
    /// the batch minimum energy. Nonnegative when every member is bounded
    /// away from zero as a Nehari point must be.
    pub fn norm_bound_margin(&self, m: &Model<T>) -> Result<T> {
        let c = self
            .ground_energy()
            .ok_or_else(|| domain("empty solution set"))?;
        let floor = (T::lit(2.0) * c).sqrt() * (T::one() - T::lit(1e-8));
        self.members.iter().try_fold(T::infinity(), |acc, s| {
            Ok(acc.min(m.norm_alpha(&s.representative)? - floor))
        })
    }

    /// Largest ratio `‖u/‖u‖_α - v/‖v‖_α‖_α / (√(2/c) ‖u - v‖_α)` over member
    /// pairs; at most one when `m^{-1}` obeys its Lipschitz bound.
    pub fn lipschitz_ratio(&self, m: &Model<T>) -> Result<T> {
        let c = self
            .ground_energy()
            .ok_or_else(|| domain("empty solution set"))?;
        let constant = (T::lit(2.0) / c).sqrt();
        let mut worst = T::zero();
        for (i, a) in self.members.iter().enumerate() {
            for b in &self.members[i + 1..] {
                let ua = unproject(m, &a.representative)?;
                let ub = unproject(m, &b.representative)?;
                let lhs = m.norm_alpha(&(&ua - &ub))?;
                let rhs = constant * m.norm_alpha(&(&a.representative - &b.representative))?;
                if rhs > T::zero() {
                    worst = worst.max(lhs / rhs);
                }
            }
        }
        Ok(worst)
    }
}

/// Runs [`minimize`] from `n_starts` seeded initial fields in parallel and
/// merges the results orbit by orbit, in start order.
pub fn multistart<T: Real>(
    m: &Model<T>,
    n_starts: usize,
    cfg: &SolverConfig,
) -> Result<SolutionSet<T>> {
    if n_starts == 0 {
        return Err(domain("multistart needs at least one start"));
    }
    cfg.validate()?;
    let runs: Vec<std::result::Result<GroundStateResult<T>, String>> = (0..n_starts)
        .into_par_iter()
        .map(|i| {
            let (w0, symmetry) = seed_start(m.geom(), cfg.seed, i);
            minimize_symmetric(m, &w0, cfg, symmetry.as_ref()).map_err(|e| e.to_string())
        })
        .collect();

    let tol = T::lit(cfg.dedupe_tol);
    let mut members: Vec<SolutionMember<T>> = Vec::new();
    let mut skipped = Vec::new();
    for (start, run) in runs.into_iter().enumerate() {
        let res = match run {
            Ok(r) => r,
            Err(reason) => {
                skipped.push(SkippedStart { start, reason });
                continue;
            }
        };
        let mut merged = false;
        for member in members.iter_mut() {
            if orbit_distance(m, &member.representative, &res.u, true)?.distance <= tol {
                member.multiplicity += 1;
                merged = true;
                break;
            }
        }
        if !merged {
            members.push(SolutionMember {
                representative: res.u,
                energy: res.energy,
                grad_residual: res.grad_residual,
                nehari_residual: res.nehari_residual,
                multiplicity: 1,
                start,
            });
        }
    }
    members.sort_by(|a, b| a.energy.partial_cmp(&b.energy).expect("finite energies"));
    Ok(SolutionSet {
        members,
        dedupe_tol: tol,
        skipped,
    })
}
