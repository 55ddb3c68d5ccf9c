//! Finite windows into ℤ^d and real-valued fields on them.
//!
//! A [`LatticeGeometry`] is the box `[-L, L]^d` together with a rule for what
//! lies outside it: either every outside site is zero, or coordinates wrap
//! modulo `2L + 1`. Sites are stored lexicographically with the first
//! coordinate most significant, and every reduction walks them in that order.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::scalar::{Real, Summation};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// Sites outside the box carry the value 0.
    #[default]
    ZeroExtended,
    /// Coordinates are identified modulo `2L + 1` (a discrete torus).
    PeriodicWrap,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LatticeGeometry {
    dim: usize,
    radius: usize,
    boundary: Boundary,
}

impl LatticeGeometry {
    pub fn new(dim: usize, radius: usize, boundary: Boundary) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Config("dimension must be at least 1".into()));
        }
        if radius == 0 {
            return Err(Error::Config("box radius must be at least 1".into()));
        }
        let side = 2 * radius + 1;
        let len = (0..dim).try_fold(1usize, |acc, _| acc.checked_mul(side));
        if len.is_none() {
            return Err(Error::Config(format!(
                "box with d={dim}, L={radius} has too many sites"
            )));
        }
        Ok(Self {
            dim,
            radius,
            boundary,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    /// Number of sites per axis, `2L + 1`.
    pub fn side(&self) -> usize {
        2 * self.radius + 1
    }

    /// Total number of sites, `(2L + 1)^d`.
    pub fn len(&self) -> usize {
        self.side().pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn with_boundary(&self, boundary: Boundary) -> Self {
        Self {
            boundary,
            ..self.clone()
        }
    }

    /// Multi-index of the site stored at `idx`.
    pub fn coords(&self, idx: usize) -> Vec<i64> {
        let mut out = vec![0; self.dim];
        self.coords_into(idx, &mut out);
        out
    }

    pub fn coords_into(&self, mut idx: usize, out: &mut [i64]) {
        let side = self.side();
        let l = self.radius as i64;
        for c in out.iter_mut().rev() {
            *c = (idx % side) as i64 - l;
            idx /= side;
        }
    }

    /// Reduces a coordinate into `[-L, L]` modulo `2L + 1`.
    pub fn wrap(&self, c: i64) -> i64 {
        let side = self.side() as i64;
        let l = self.radius as i64;
        (c + l).rem_euclid(side) - l
    }

    /// Storage index of `x`, applying the boundary rule. `None` means the site
    /// lies outside a zero-extended box.
    pub fn index(&self, x: &[i64]) -> Option<usize> {
        debug_assert_eq!(x.len(), self.dim);
        let side = self.side() as i64;
        let l = self.radius as i64;
        let mut idx = 0usize;
        for &c in x {
            let c = match self.boundary {
                Boundary::ZeroExtended => {
                    if c.abs() > l {
                        return None;
                    }
                    c
                }
                Boundary::PeriodicWrap => self.wrap(c),
            };
            idx = idx * side as usize + (c + l) as usize;
        }
        Some(idx)
    }

    /// True for sites in the outermost shell, `max_i |x_i| = L`.
    pub fn is_outer_shell(&self, idx: usize) -> bool {
        let side = self.side();
        let mut idx = idx;
        for _ in 0..self.dim {
            let r = idx % side;
            if r == 0 || r == side - 1 {
                return true;
            }
            idx /= side;
        }
        false
    }

    pub(crate) fn check_same(&self, other: &LatticeGeometry) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::Geometry(format!("{self:?} vs {other:?}")))
        }
    }
}

/// A real function on the box, extended to ℤ^d by the geometry's boundary rule.
#[derive(Debug, Clone, PartialEq)]
pub struct Field<T> {
    geom: LatticeGeometry,
    values: Vec<T>,
}

impl<T: Real> Field<T> {
    pub fn zeros(geom: &LatticeGeometry) -> Self {
        Self {
            geom: geom.clone(),
            values: vec![T::zero(); geom.len()],
        }
    }

    /// Wraps a value vector in lexicographic site order. Rejects NaN and
    /// infinities.
    pub fn from_values(geom: &LatticeGeometry, values: Vec<T>) -> Result<Self> {
        if values.len() != geom.len() {
            return Err(Error::Geometry(format!(
                "expected {} values, got {}",
                geom.len(),
                values.len()
            )));
        }
        if let Some(site) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { site });
        }
        Ok(Self {
            geom: geom.clone(),
            values,
        })
    }

    pub(crate) fn from_values_unchecked(geom: &LatticeGeometry, values: Vec<T>) -> Self {
        debug_assert_eq!(values.len(), geom.len());
        Self {
            geom: geom.clone(),
            values,
        }
    }

    pub fn from_fn<F: FnMut(&[i64]) -> T>(geom: &LatticeGeometry, mut f: F) -> Self {
        let mut x = vec![0i64; geom.dim()];
        let values = (0..geom.len())
            .map(|i| {
                geom.coords_into(i, &mut x);
                f(&x)
            })
            .collect();
        Self {
            geom: geom.clone(),
            values,
        }
    }

    /// Unit mass at `site`.
    pub fn delta(geom: &LatticeGeometry, site: &[i64]) -> Result<Self> {
        if site.len() != geom.dim() {
            return Err(Error::Geometry("site dimension mismatch".into()));
        }
        let l = geom.radius() as i64;
        if site.iter().any(|c| c.abs() > l) {
            return Err(domain("delta site outside the box"));
        }
        let mut f = Self::zeros(geom);
        let idx = geom.index(site).expect("site inside box");
        f.values[idx] = T::one();
        Ok(f)
    }

    pub fn geom(&self) -> &LatticeGeometry {
        &self.geom
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    /// Value at an arbitrary lattice point under the boundary rule.
    pub fn at(&self, x: &[i64]) -> T {
        self.geom.index(x).map_or(T::zero(), |i| self.values[i])
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }

    pub fn map<F: Fn(T) -> T>(&self, f: F) -> Self {
        Self::from_values_unchecked(&self.geom, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn scale(&self, c: T) -> Self {
        self.map(|v| v * c)
    }

    /// `self + a * other`.
    pub fn add_scaled(&self, a: T, other: &Field<T>) -> Self {
        assert_eq!(self.geom, other.geom, "geometry mismatch");
        Self::from_values_unchecked(
            &self.geom,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&x, &y)| x + a * y)
                .collect(),
        )
    }

    /// Plain ℓ² pairing `Σ_x u(x) v(x)`.
    pub fn dot(&self, other: &Field<T>) -> T {
        assert_eq!(self.geom, other.geom, "geometry mismatch");
        self.values
            .iter()
            .zip(&other.values)
            .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
    }

    pub fn sum(&self) -> T {
        Summation::Lexicographic.sum(self.values.iter().copied())
    }

    /// ℓ^s norm, `s ∈ [1, ∞]`. Pass `T::infinity()` for the sup norm.
    pub fn norm(&self, s: T) -> Result<T> {
        self.norm_with(s, Summation::Lexicographic)
    }

    pub fn norm_with(&self, s: T, summation: Summation) -> Result<T> {
        if s.is_nan() || s < T::one() {
            return Err(domain(format!(
                "norm exponent must lie in [1, inf], got {s}"
            )));
        }
        let abs = self.values.iter().map(|v| v.abs());
        if s.is_infinite() {
            return Ok(abs.fold(T::zero(), T::max));
        }
        if s == T::one() {
            return Ok(summation.sum(abs));
        }
        if s == T::lit(2.0) {
            return Ok(summation.sum(abs.map(|a| a * a)).sqrt());
        }
        Ok(summation.sum(abs.map(|a| a.powf(s))).powf(s.recip()))
    }

    pub fn norm2(&self) -> T {
        self.norm(T::lit(2.0)).expect("valid exponent")
    }

    pub fn norm_sup(&self) -> T {
        self.norm(T::infinity()).expect("valid exponent")
    }

    /// Translate by `y`: `(shift u)(x) = u(x - y)`. On a zero-extended box any
    /// mass pushed past the boundary is lost.
    pub fn shift(&self, y: &[i64]) -> Self {
        assert_eq!(y.len(), self.geom.dim(), "offset dimension mismatch");
        let mut out = vec![T::zero(); self.values.len()];
        let mut x = vec![0i64; self.geom.dim()];
        for (i, &v) in self.values.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            self.geom.coords_into(i, &mut x);
            for (c, &dy) in x.iter_mut().zip(y) {
                *c += dy;
            }
            if let Some(j) = self.geom.index(&x) {
                out[j] = v;
            }
        }
        Self::from_values_unchecked(&self.geom, out)
    }

    /// Point reflection `x ↦ -x`.
    pub fn reflect(&self) -> Self {
        let mut x = vec![0i64; self.geom.dim()];
        let values = (0..self.values.len())
            .map(|i| {
                self.geom.coords_into(i, &mut x);
                x.iter_mut().for_each(|c| *c = -*c);
                self.values[self.geom.index(&x).expect("reflection stays in box")]
            })
            .collect();
        Self::from_values_unchecked(&self.geom, values)
    }

    /// Both sides of `‖u‖_q^q ≤ ‖u‖_2^2 ‖u‖_∞^{q-2}`.
    pub fn interpolation_check(&self, q: T) -> Result<(T, T)> {
        if q.is_nan() || q <= T::lit(2.0) || q.is_infinite() {
            return Err(domain(format!(
                "interpolation exponent must exceed 2, got {q}"
            )));
        }
        if self.is_zero() {
            return Err(domain("interpolation check needs a nonzero field"));
        }
        let lhs = Summation::Lexicographic.sum(self.values.iter().map(|v| v.abs().powf(q)));
        let l2 = Summation::Lexicographic.sum(self.values.iter().map(|&v| v * v));
        let sup = self.norm_sup();
        Ok((lhs, l2 * sup.powf(q - T::lit(2.0))))
    }

    /// Fraction of the ℓ² mass sitting in the outermost shell of the box.
    ///
    /// A torus has no distinguished shell, so there the measure is the sum
    /// over axes of the lightest coordinate slab `{x_i = c}`: it matches the
    /// outer shell for a centered field and does not change under shifts.
    pub fn boundary_mass(&self) -> T {
        let total = Summation::Lexicographic.sum(self.values.iter().map(|&v| v * v));
        if total.is_zero() {
            return T::zero();
        }
        if self.geom.boundary == Boundary::PeriodicWrap {
            let side = self.geom.side();
            let mut slabs = vec![vec![T::zero(); side]; self.geom.dim];
            let mut x = vec![0i64; self.geom.dim];
            for (i, &v) in self.values.iter().enumerate() {
                self.geom.coords_into(i, &mut x);
                for (axis, &c) in x.iter().enumerate() {
                    let slot = (c + self.geom.radius as i64) as usize;
                    slabs[axis][slot] = slabs[axis][slot] + v * v;
                }
            }
            let lightest = slabs
                .iter()
                .map(|s| s.iter().copied().fold(T::infinity(), T::min))
                .fold(T::zero(), |a, b| a + b);
            return lightest / total;
        }
        let shell = Summation::Lexicographic.sum(
            self.values
                .iter()
                .enumerate()
                .filter(|(i, _)| self.geom.is_outer_shell(*i))
                .map(|(_, &v)| v * v),
        );
        shell / total
    }
}

impl<T: Real> Add for &Field<T> {
    type Output = Field<T>;
    fn add(self, rhs: Self) -> Field<T> {
        self.add_scaled(T::one(), rhs)
    }
}

impl<T: Real> Sub for &Field<T> {
    type Output = Field<T>;
    fn sub(self, rhs: Self) -> Field<T> {
        self.add_scaled(-T::one(), rhs)
    }
}

impl<T: Real> Mul<T> for &Field<T> {
    type Output = Field<T>;
    fn mul(self, rhs: T) -> Field<T> {
        self.scale(rhs)
    }
}

impl<T: Real> Neg for &Field<T> {
    type Output = Field<T>;
    fn neg(self) -> Field<T> {
        self.scale(-T::one())
    }
}
