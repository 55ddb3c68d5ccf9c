//! The Fourier side of the discrete fractional Laplacian.
//!
//! The operator is the multiplier `Φ(θ)^α` with `Φ(θ) = Σ_i 4 sin²(θ_i / 2)`
//! on `[-π, π]^d`. Its inverse Fourier coefficients form the convolution
//! kernel `K^α`, tabulated here by an `M^d`-point periodic trapezoid rule
//! (one FFT of symbol samples). On a periodic box the operator is applied
//! exactly by sampling the symbol on the box's own frequency grid.

use num_complex::Complex;
use rayon::prelude::*;
use rustfft::FftDirection;

use crate::error::{domain, Error, Result};
use crate::fftn::CubeFft;
use crate::lattice::{Boundary, Field, LatticeGeometry};
use crate::model::Potential;
use crate::scalar::Real;

/// The order `α` of `(-Δ)^α`, restricted to `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct FractionalOrder<T>(T);

impl<T: Real> FractionalOrder<T> {
    pub fn new(alpha: T) -> Result<Self> {
        if alpha.is_finite() && alpha > T::zero() && alpha <= T::one() {
            Ok(Self(alpha))
        } else {
            Err(domain(format!(
                "fractional order must lie in (0, 1], got {alpha}"
            )))
        }
    }

    pub fn value(self) -> T {
        self.0
    }
}

/// Quadrature grid and truncation radius for kernel tabulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpectralConfig {
    /// Trapezoid nodes per axis on `[-π, π)`.
    pub points: usize,
    /// Kernel truncation radius (sup-norm lattice distance).
    pub radius: usize,
    /// Also tabulate at `2M` and report the largest change.
    pub doubling_check: bool,
}

impl SpectralConfig {
    pub fn new(points: usize, radius: usize) -> Result<Self> {
        let cfg = Self {
            points,
            radius,
            doubling_check: true,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Defaults for a box of radius `box_radius`: `M = 8192` in one dimension,
    /// `1024` in two, `64` beyond; `R = min(4L, M/4)`.
    pub fn default_for(dim: usize, box_radius: usize) -> Self {
        let points = match dim {
            1 => 8192,
            2 => 1024,
            _ => 64,
        };
        Self {
            points,
            radius: (4 * box_radius).min(points / 4).max(1),
            doubling_check: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.points < 16 || !self.points.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "quadrature points must be even and at least 16, got {}",
                self.points
            )));
        }
        if self.radius == 0 {
            return Err(Error::Config("kernel radius must be at least 1".into()));
        }
        if 2 * self.radius >= self.points {
            return Err(Error::Config(format!(
                "kernel radius {} must be below M/2 = {} to avoid aliasing",
                self.radius,
                self.points / 2
            )));
        }
        Ok(())
    }
}

/// `Φ(θ)^α`.
pub fn symbol<T: Real>(theta: &[T], alpha: FractionalOrder<T>) -> T {
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    let phi = theta.iter().fold(T::zero(), |acc, &t| {
        let s = (t / two).sin();
        acc + four * s * s
    });
    if phi <= T::zero() {
        T::zero()
    } else if alpha.value() == T::one() {
        phi
    } else {
        phi.powf(alpha.value())
    }
}

/// `û(θ) = Σ_x u(x) e^{i x·θ}` as an exact finite sum over the box.
pub fn dft<T: Real>(u: &Field<T>, theta: &[T]) -> Complex<T> {
    let geom = u.geom();
    assert_eq!(theta.len(), geom.dim(), "frequency dimension mismatch");
    let mut x = vec![0i64; geom.dim()];
    let mut acc = Complex::new(T::zero(), T::zero());
    for (i, &v) in u.values().iter().enumerate() {
        if v.is_zero() {
            continue;
        }
        geom.coords_into(i, &mut x);
        let phase = x
            .iter()
            .zip(theta)
            .fold(T::zero(), |a, (&c, &t)| a + T::from_coord(c) * t);
        acc = acc + Complex::new(phase.cos(), phase.sin()) * v;
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    /// Infinite-lattice kernel from an `M^d` trapezoid rule.
    Lattice { points: usize },
    /// Exact kernel of the operator on a periodic box of the given side.
    Periodized { side: usize },
}

/// Tabulated `K^α(x)` for `|x|_∞ ≤ R`.
#[derive(Debug, Clone)]
pub struct Kernel<T> {
    alpha: FractionalOrder<T>,
    kind: KernelKind,
    offsets: LatticeGeometry,
    values: Vec<T>,
    tail_bound: T,
    doubling_error: Option<T>,
}

impl<T: Real> Kernel<T> {
    pub fn alpha(&self) -> FractionalOrder<T> {
        self.alpha
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.offsets.dim()
    }

    pub fn radius(&self) -> usize {
        self.offsets.radius()
    }

    /// Geometry of the offset table (a zero-extended box of radius `R`).
    pub fn offsets(&self) -> &LatticeGeometry {
        &self.offsets
    }

    /// Table values in lexicographic offset order.
    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// `Σ |K(x)|` over quadrature-grid offsets beyond the truncation radius.
    pub fn tail_bound(&self) -> T {
        self.tail_bound
    }

    /// Largest table change between `M` and `2M` nodes, when computed.
    pub fn doubling_error(&self) -> Option<T> {
        self.doubling_error
    }

    /// `K(x)`, zero beyond the table.
    pub fn at(&self, x: &[i64]) -> T {
        self.offsets.index(x).map_or(T::zero(), |i| self.values[i])
    }

    /// Truncated Fourier series `Σ_{|x| ≤ R} K(x) e^{i x·θ}` (real, since `K`
    /// is even).
    pub fn truncated_symbol(&self, theta: &[T]) -> T {
        let mut x = vec![0i64; self.dim()];
        let mut acc = T::zero();
        for (i, &k) in self.values.iter().enumerate() {
            self.offsets.coords_into(i, &mut x);
            let phase = x
                .iter()
                .zip(theta)
                .fold(T::zero(), |a, (&c, &t)| a + T::from_coord(c) * t);
            acc = acc + k * phase.cos();
        }
        acc
    }

    /// Replaces the table values (kept for fault-injection fixtures).
    pub fn with_values(&self, values: Vec<T>) -> Result<Self> {
        if values.len() != self.values.len() {
            return Err(Error::Geometry("kernel table length mismatch".into()));
        }
        Ok(Self {
            values,
            ..self.clone()
        })
    }

    /// Exact kernel of `(-Δ)^α` on a periodic box: inverse DFT of the symbol
    /// sampled on the box's `(2L+1)^d` frequency grid. Its radius equals `L`,
    /// so every torus offset appears exactly once.
    pub fn periodized(alpha: FractionalOrder<T>, geom: &LatticeGeometry) -> Self {
        let side = geom.side();
        let grid = symbol_inverse_dft(alpha, geom.dim(), side);
        let offsets = LatticeGeometry::new(geom.dim(), geom.radius(), Boundary::ZeroExtended)
            .expect("valid geometry");
        let values = sample_table(&grid, side, &offsets);
        Self {
            alpha,
            kind: KernelKind::Periodized { side },
            offsets,
            values,
            tail_bound: T::zero(),
            doubling_error: None,
        }
    }
}

/// Inverse DFT of symbol samples on an `n^d` grid, i.e. the `n`-point
/// trapezoid approximation of `(2π)^{-d} ∫ Φ^α e^{-i x·θ} dθ`, stored at
/// index `x mod n`.
fn symbol_inverse_dft<T: Real>(alpha: FractionalOrder<T>, dim: usize, n: usize) -> Vec<T> {
    let fft = CubeFft::new(n, dim);
    let mut data = symbol_grid(alpha, dim, n)
        .into_iter()
        .map(|s| Complex::new(s, T::zero()))
        .collect::<Vec<_>>();
    fft.process(&mut data, FftDirection::Forward);
    let norm = T::from_count(fft.len()).recip();
    data.into_iter().map(|z| z.re * norm).collect()
}

/// `Φ(2πk/n)^α` on the `n^d` grid, row-major in `k`.
pub(crate) fn symbol_grid<T: Real>(alpha: FractionalOrder<T>, dim: usize, n: usize) -> Vec<T> {
    let step = T::lit(2.0) * T::PI() / T::from_count(n);
    let axis: Vec<T> = (0..n)
        .map(|k| {
            let s = (step * T::from_count(k) / T::lit(2.0)).sin();
            T::lit(4.0) * s * s
        })
        .collect();
    let total = n.pow(dim as u32);
    (0..total)
        .map(|mut flat| {
            let mut phi = T::zero();
            for _ in 0..dim {
                phi = phi + axis[flat % n];
                flat /= n;
            }
            if phi <= T::zero() {
                T::zero()
            } else if alpha.value() == T::one() {
                phi
            } else {
                phi.powf(alpha.value())
            }
        })
        .collect()
}

fn grid_index(x: &[i64], n: usize) -> usize {
    x.iter()
        .fold(0usize, |acc, &c| acc * n + c.rem_euclid(n as i64) as usize)
}

/// Reads the table off the grid. Each offset takes the value stored at its
/// canonical image (absolute values, sorted), so the table is exactly
/// invariant under sign flips and coordinate permutations.
fn sample_table<T: Real>(grid: &[T], n: usize, offsets: &LatticeGeometry) -> Vec<T> {
    let mut x = vec![0i64; offsets.dim()];
    (0..offsets.len())
        .map(|i| {
            offsets.coords_into(i, &mut x);
            for c in x.iter_mut() {
                *c = c.abs();
            }
            x.sort_unstable_by(|a, b| b.cmp(a));
            grid[grid_index(&x, n)]
        })
        .collect()
}

/// Tabulates `K^α` on `|x|_∞ ≤ cfg.radius` with an `M^d` trapezoid rule.
pub fn kernel_table<T: Real>(
    alpha: FractionalOrder<T>,
    dim: usize,
    cfg: &SpectralConfig,
) -> Result<Kernel<T>> {
    cfg.validate()?;
    let offsets = LatticeGeometry::new(dim, cfg.radius, Boundary::ZeroExtended)?;
    let m = cfg.points;
    let grid = symbol_inverse_dft(alpha, dim, m);
    let values = sample_table(&grid, m, &offsets);

    let half = (m / 2) as i64;
    let r = cfg.radius as i64;
    let mut tail = T::zero();
    for (flat, &k) in grid.iter().enumerate() {
        let mut rest = flat;
        let mut beyond = false;
        for _ in 0..dim {
            let c = (rest % m) as i64;
            let centered = if c < half { c } else { c - m as i64 };
            beyond |= centered.abs() > r;
            rest /= m;
        }
        if beyond {
            tail = tail + k.abs();
        }
    }

    let doubling_error = if cfg.doubling_check {
        let fine = symbol_inverse_dft(alpha, dim, 2 * m);
        let fine = sample_table(&fine, 2 * m, &offsets);
        Some(
            fine.iter()
                .zip(&values)
                .fold(T::zero(), |acc, (&a, &b)| acc.max((a - b).abs())),
        )
    } else {
        None
    };

    Ok(Kernel {
        alpha,
        kind: KernelKind::Lattice { points: m },
        offsets,
        values,
        tail_bound: tail,
        doubling_error,
    })
}

/// `v(x) = Σ_y K(x - y) u(y)`, sum over the table, under the boundary rule of
/// `u`. A zero-extended box only produces outputs on the box.
pub fn apply_kernel<T: Real>(u: &Field<T>, kernel: &Kernel<T>) -> Result<Field<T>> {
    let geom = u.geom();
    if geom.dim() != kernel.dim() {
        return Err(Error::Geometry(format!(
            "kernel dimension {} vs field dimension {}",
            kernel.dim(),
            geom.dim()
        )));
    }
    let dim = geom.dim();
    let n = geom.len();
    let coords: Vec<i64> = (0..n).flat_map(|i| geom.coords(i)).collect();
    let values = u.values();

    let out: Vec<T> = match geom.boundary() {
        Boundary::ZeroExtended => {
            let support: Vec<usize> = (0..n).filter(|&j| !values[j].is_zero()).collect();
            (0..n)
                .into_par_iter()
                .map(|i| {
                    let x = &coords[i * dim..(i + 1) * dim];
                    let mut z = vec![0i64; dim];
                    let mut acc = T::zero();
                    for &j in &support {
                        let y = &coords[j * dim..(j + 1) * dim];
                        for k in 0..dim {
                            z[k] = x[k] - y[k];
                        }
                        if let Some(ki) = kernel.offsets.index(&z) {
                            acc = acc + kernel.values[ki] * values[j];
                        }
                    }
                    acc
                })
                .collect()
        }
        Boundary::PeriodicWrap => {
            let table = kernel.offsets();
            let zs: Vec<i64> = (0..table.len()).flat_map(|i| table.coords(i)).collect();
            (0..n)
                .into_par_iter()
                .map(|i| {
                    let x = &coords[i * dim..(i + 1) * dim];
                    let mut y = vec![0i64; dim];
                    let mut acc = T::zero();
                    for (ki, &k) in kernel.values.iter().enumerate() {
                        let z = &zs[ki * dim..(ki + 1) * dim];
                        for c in 0..dim {
                            y[c] = x[c] - z[c];
                        }
                        let j = geom.index(&y).expect("periodic index");
                        acc = acc + k * values[j];
                    }
                    acc
                })
                .collect()
        }
    };
    Ok(Field::from_values_unchecked(geom, out))
}

/// Applies `Φ^α` on a frequency grid via FFT.
///
/// On a periodic box the grid is the box's own `(2L+1)^d` grid and the result
/// is the exact periodized operator. On a zero-extended box the field is
/// zero-padded to the next power of two at least `2(2L+1)` per axis first.
#[derive(Debug, Clone)]
pub struct Multiplier<T: Real> {
    geom: LatticeGeometry,
    grid: usize,
    fft: CubeFft<T>,
    symbol: Vec<T>,
}

impl<T: Real> Multiplier<T> {
    pub fn new(alpha: FractionalOrder<T>, geom: &LatticeGeometry) -> Self {
        let grid = match geom.boundary() {
            Boundary::PeriodicWrap => geom.side(),
            Boundary::ZeroExtended => (2 * geom.side()).next_power_of_two(),
        };
        Self {
            geom: geom.clone(),
            grid,
            fft: CubeFft::new(grid, geom.dim()),
            symbol: symbol_grid(alpha, geom.dim(), grid),
        }
    }

    pub fn grid(&self) -> usize {
        self.grid
    }

    pub fn apply(&self, u: &Field<T>) -> Result<Field<T>> {
        self.geom.check_same(u.geom())?;
        let zero = Complex::new(T::zero(), T::zero());
        let mut data = vec![zero; self.fft.len()];
        let mut slots = Vec::with_capacity(u.values().len());
        let mut x = vec![0i64; self.geom.dim()];
        for (i, &v) in u.values().iter().enumerate() {
            self.geom.coords_into(i, &mut x);
            let g = grid_index(&x, self.grid);
            data[g] = Complex::new(v, T::zero());
            slots.push(g);
        }
        self.fft.process(&mut data, FftDirection::Forward);
        for (z, &s) in data.iter_mut().zip(&self.symbol) {
            *z = *z * s;
        }
        self.fft.process(&mut data, FftDirection::Inverse);
        let norm = T::from_count(self.fft.len()).recip();
        let out = slots.into_iter().map(|g| data[g].re * norm).collect();
        Ok(Field::from_values_unchecked(&self.geom, out))
    }
}

pub fn apply_multiplier_fft<T: Real>(u: &Field<T>, alpha: FractionalOrder<T>) -> Result<Field<T>> {
    Multiplier::new(alpha, u.geom()).apply(u)
}

/// `(u, v)_α = Σ_x ((-Δ)^α u)(x) v(x) + Σ_x h(x) u(x) v(x)`.
pub fn halpha_inner<T: Real>(
    u: &Field<T>,
    v: &Field<T>,
    kernel: &Kernel<T>,
    h: &Potential<T>,
) -> Result<T> {
    u.geom().check_same(v.geom())?;
    let ku = apply_kernel(u, kernel)?;
    let hv = h.sample(u.geom());
    let terms = ku.values().iter().zip(&hv).zip(u.values()).zip(v.values());
    Ok(terms.fold(T::zero(), |acc, (((&k, &h), &a), &b)| acc + (k + h * a) * b))
}

/// Scaled magnitudes `(|x|, |K(x)| |x|^{d+2α})` for `1 ≤ x ≤ R` in one
/// dimension, where the kernel is known to decay like `|x|^{-1-2α}`.
pub fn decay_check<T: Real>(kernel: &Kernel<T>) -> Result<Vec<(usize, T)>> {
    if kernel.dim() != 1 {
        return Err(Error::Unsupported(format!(
            "decay table is only meaningful for d = 1, kernel has d = {}",
            kernel.dim()
        )));
    }
    if kernel.radius() < 10 {
        return Err(domain("decay table needs a kernel radius of at least 10"));
    }
    let exponent = T::one() + T::lit(2.0) * kernel.alpha().value();
    Ok((1..=kernel.radius())
        .map(|x| {
            let k = kernel.at(&[x as i64]).abs();
            (x, k * T::from_count(x).powf(exponent))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn order(a: f64) -> FractionalOrder<f64> {
        FractionalOrder::new(a).unwrap()
    }

    #[test]
    fn order_range() {
        assert!(FractionalOrder::new(0.0).is_err());
        assert!(FractionalOrder::new(1.0 + 1e-12).is_err());
        assert!(FractionalOrder::new(f64::NAN).is_err());
        assert!(FractionalOrder::new(1.0).is_ok());
    }

    #[test]
    fn symbol_values() {
        assert_eq!(symbol(&[0.0, 0.0], order(0.3)), 0.0);
        let corner = symbol(&[PI, PI, PI], order(0.7));
        assert!((corner - 12f64.powf(0.7)).abs() < 1e-12);
        assert!((symbol(&[PI / 2.0], order(1.0)) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn dft_of_deltas() {
        let g = LatticeGeometry::new(2, 2, Boundary::ZeroExtended).unwrap();
        let d0 = Field::<f64>::delta(&g, &[0, 0]).unwrap();
        let z = dft(&d0, &[0.4, -1.3]);
        assert_eq!(z, Complex::new(1.0, 0.0));
        let d1 = Field::<f64>::delta(&g, &[1, 0]).unwrap();
        let z = dft(&d1, &[0.4, -1.3]);
        assert!((z - Complex::new(0.4f64.cos(), 0.4f64.sin())).norm() < 1e-15);
    }

    #[test]
    fn config_validation() {
        assert!(SpectralConfig::new(15, 2).is_err());
        assert!(SpectralConfig::new(17, 2).is_err());
        assert!(SpectralConfig::new(64, 32).is_err());
        assert!(SpectralConfig::new(64, 31).is_ok());
        assert!(SpectralConfig::new(64, 0).is_err());
    }

    #[test]
    fn laplacian_stencil_at_alpha_one() {
        let k = kernel_table(order(1.0), 1, &SpectralConfig::new(256, 4).unwrap()).unwrap();
        assert!((k.at(&[0]) - 2.0).abs() < 1e-12);
        assert!((k.at(&[1]) + 1.0).abs() < 1e-12);
        assert!((k.at(&[-1]) + 1.0).abs() < 1e-12);
        for x in 2..=4 {
            assert!(k.at(&[x]).abs() < 1e-12);
        }
        assert!(k.tail_bound() < 1e-12);
    }

    #[test]
    fn apply_kernel_to_delta_reproduces_table() {
        let g = LatticeGeometry::new(1, 6, Boundary::ZeroExtended).unwrap();
        let k = kernel_table(order(0.4), 1, &SpectralConfig::new(512, 24).unwrap()).unwrap();
        let v = apply_kernel(&Field::delta(&g, &[0]).unwrap(), &k).unwrap();
        for x in -6..=6 {
            assert_eq!(v.at(&[x]), k.at(&[x]));
        }
    }

    #[test]
    fn apply_kernel_rejects_dimension_mismatch() {
        let g = LatticeGeometry::new(2, 2, Boundary::ZeroExtended).unwrap();
        let k = kernel_table(order(0.5), 1, &SpectralConfig::new(64, 4).unwrap()).unwrap();
        assert!(apply_kernel(&Field::zeros(&g), &k).is_err());
    }

    #[test]
    fn decay_check_requires_one_dimension() {
        let k = kernel_table(order(0.5), 2, &SpectralConfig::new(64, 12).unwrap()).unwrap();
        assert!(matches!(decay_check(&k), Err(Error::Unsupported(_))));
        let short = kernel_table(order(0.5), 1, &SpectralConfig::new(64, 5).unwrap()).unwrap();
        assert!(decay_check(&short).is_err());
    }

    #[test]
    fn wrong_length_table_is_rejected() {
        let k = kernel_table(order(0.5), 1, &SpectralConfig::new(64, 5).unwrap()).unwrap();
        assert!(k.with_values(vec![0.0; 3]).is_err());
    }
}
