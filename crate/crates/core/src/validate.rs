//! The invariant suite behind `fraclat validate`.
//!
//! Each check measures one quantity and compares it with a tolerance; the
//! report lists every check, grouped by module. Checks are deterministic:
//! random inputs come from a seeded generator.

use std::time::Instant;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftDirection;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fftn::CubeFft;
use crate::io;
use crate::lattice::{Boundary, Field, LatticeGeometry};
use crate::model::{spot_check, Model, Nonlinearity, Potential, SiteFunction};
use crate::nehari::{
    minimize, multistart, nehari_scale, nehari_scale_newton, project_m, unproject, SolverConfig,
};
use crate::semigroup::{
    default_lambdas, fraclap_semigroup, heat_apply, scalar_identity_error, HeatConfig,
};
use crate::spectral::{
    apply_kernel, decay_check, dft, halpha_inner, kernel_table, symbol, symbol_grid,
    FractionalOrder, Kernel, Multiplier, SpectralConfig,
};

pub const MODULES: [&str; 6] = ["lattice", "spectral", "semigroup", "model", "nehari", "cli"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub module: &'static str,
    pub name: &'static str,
    pub measured: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub checks: Vec<CheckResult>,
    pub passed: usize,
    pub failed: usize,
    pub seconds: f64,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.failed == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

#[derive(Debug, Clone, Default)]
pub struct ValidateOptions {
    /// Run only this module's checks.
    pub only: Option<String>,
    pub seed: u64,
    /// Table examined by the kernel sign and symmetry checks instead of the
    /// default `α = 1/2` table.
    pub kernel: Option<Kernel<f64>>,
}

struct Suite {
    module: &'static str,
    checks: Vec<CheckResult>,
}

impl Suite {
    /// Passes when `measured ≤ tolerance`.
    fn at_most(&mut self, name: &'static str, measured: f64, tolerance: f64) {
        self.checks.push(CheckResult {
            module: self.module,
            name,
            measured,
            tolerance,
            pass: measured <= tolerance,
        });
    }

    /// Passes when `measured > 0`; the tolerance column shows the bound 0.
    fn positive(&mut self, name: &'static str, measured: f64) {
        self.checks.push(CheckResult {
            module: self.module,
            name,
            measured,
            tolerance: 0.0,
            pass: measured > 0.0,
        });
    }
}

fn random_field(geom: &LatticeGeometry, rng: &mut ChaCha8Rng) -> Field<f64> {
    Field::from_fn(geom, |_| rng.gen_range(-1.0..1.0))
}

fn order(alpha: f64) -> FractionalOrder<f64> {
    FractionalOrder::new(alpha).expect("valid order")
}

fn line(l: usize, boundary: Boundary) -> LatticeGeometry {
    LatticeGeometry::new(1, l, boundary).expect("valid geometry")
}

fn sup_diff(a: &Field<f64>, b: &Field<f64>) -> f64 {
    a.values()
        .iter()
        .zip(b.values())
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

/// Runs the selected checks. Unknown module names are a configuration error.
pub fn run(opts: &ValidateOptions) -> Result<Report> {
    if let Some(only) = &opts.only {
        if !MODULES.contains(&only.as_str()) {
            return Err(Error::Config(format!(
                "unknown module {only}; expected one of {}",
                MODULES.join(", ")
            )));
        }
    }
    let started = Instant::now();
    let mut checks = Vec::new();
    type Runner = fn(&mut Suite, &ValidateOptions) -> Result<()>;
    let runners: [(&'static str, Runner); 6] = [
        ("lattice", lattice_checks),
        ("spectral", spectral_checks),
        ("semigroup", semigroup_checks),
        ("model", model_checks),
        ("nehari", nehari_checks),
        ("cli", cli_checks),
    ];
    for (module, runner) in runners {
        if opts.only.as_deref().is_some_and(|o| o != module) {
            continue;
        }
        let mut suite = Suite {
            module,
            checks: Vec::new(),
        };
        runner(&mut suite, opts)?;
        checks.extend(suite.checks);
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    Ok(Report {
        passed: checks.len() - failed,
        failed,
        checks,
        seconds: started.elapsed().as_secs_f64(),
    })
}

fn lattice_checks(s: &mut Suite, opts: &ValidateOptions) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x1a77);
    let geom = LatticeGeometry::new(2, 6, Boundary::ZeroExtended)?;
    let exponents = [2.0, 3.0, 4.0, 6.0, f64::INFINITY];
    let mut embed = 0.0f64;
    let mut interp = 0.0f64;
    for _ in 0..100 {
        let u = random_field(&geom, &mut rng);
        for w in exponents.windows(2) {
            let (lo, hi) = (u.norm(w[0])?, u.norm(w[1])?);
            embed = embed.max((hi - lo) / lo);
        }
        for q in [3.0, 4.0, 6.0] {
            let (lhs, rhs) = u.interpolation_check(q)?;
            interp = interp.max((lhs - rhs) / rhs);
        }
    }
    s.at_most("norm_embedding", embed, 1e-14);
    s.at_most("interpolation_inequality", interp, 1e-14);

    let torus = LatticeGeometry::new(2, 5, Boundary::PeriodicWrap)?;
    let u = random_field(&torus, &mut rng);
    let moved = u.shift(&[7, -3]);
    let mut sorted_a: Vec<f64> = u.values().to_vec();
    let mut sorted_b: Vec<f64> = moved.values().to_vec();
    sorted_a.sort_by(f64::total_cmp);
    sorted_b.sort_by(f64::total_cmp);
    let bijection = if sorted_a == sorted_b { 0.0 } else { 1.0 };
    s.at_most("shift_bijection", bijection, 0.0);
    s.at_most("shift_inverse", sup_diff(&moved.shift(&[-7, 3]), &u), 0.0);

    let a = u.norm(3.0)?;
    let b = u.norm(3.0)?;
    s.at_most(
        "norm_determinism",
        if a.to_bits() == b.to_bits() { 0.0 } else { 1.0 },
        0.0,
    );
    Ok(())
}

fn spectral_checks(s: &mut Suite, opts: &ValidateOptions) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x5bec);

    let mut stencil = 0.0f64;
    for d in [1usize, 2] {
        let k = kernel_table(order(1.0), d, &SpectralConfig::new(256, 3)?)?;
        for (i, &v) in k.values().iter().enumerate() {
            let x = k.offsets().coords(i);
            let l1: i64 = x.iter().map(|c| c.abs()).sum();
            let exact = match l1 {
                0 => 2.0 * d as f64,
                1 => -1.0,
                _ => 0.0,
            };
            stencil = stencil.max((v - exact).abs());
        }
    }
    s.at_most("stencil_exactness", stencil, 1e-12);

    let half = kernel_table(order(0.5), 1, &SpectralConfig::new(8192, 64)?)?;
    let closed = (0..=20i64).fold(0.0f64, |m, x| {
        let exact = -4.0 / (std::f64::consts::PI * (4.0 * (x * x) as f64 - 1.0));
        m.max((half.at(&[x]) - exact).abs())
    });
    s.at_most("half_laplacian_closed_form", closed, 1e-6);

    let decay = decay_check(&half)?;
    let inv_pi = std::f64::consts::FRAC_1_PI;
    let spread = decay
        .iter()
        .filter(|(x, _)| (5..=50).contains(x))
        .fold(0.0f64, |m, &(_, v)| m.max((v / inv_pi - 1.0).abs()));
    s.at_most("decay_rate", spread, 0.1);

    let tested = opts.kernel.clone().unwrap_or_else(|| half.clone());
    let mut sign_violations = 0usize;
    let mut asym = 0.0f64;
    for (i, &v) in tested.values().iter().enumerate() {
        let x = tested.offsets().coords(i);
        let origin = x.iter().all(|&c| c == 0);
        let off_diagonal_ok = tested.alpha().value() == 1.0 || v < 0.0;
        if (origin && !(v > 0.0)) || (!origin && !off_diagonal_ok) {
            sign_violations += 1;
        }
        let mut flipped: Vec<i64> = x.iter().map(|c| -c).collect();
        asym = asym.max((tested.at(&flipped) - v).abs());
        flipped.reverse();
        asym = asym.max((tested.at(&flipped) - v).abs());
    }
    s.at_most("kernel_negativity", sign_violations as f64, 0.0);
    s.at_most("kernel_symmetry", asym, 0.0);

    let mut consistency = 0.0f64;
    for _ in 0..10 {
        let theta = [rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI)];
        let err = (half.truncated_symbol(&theta) - symbol(&theta, order(0.5))).abs();
        consistency = consistency.max(err / half.tail_bound());
    }
    s.at_most("truncation_within_tail_bound", consistency, 1.0);

    let lattice_sum = symbol_grid(order(0.5), 1, 64)[0];
    s.at_most("grid_sum_is_symbol_at_zero", lattice_sum.abs(), 1e-12);

    // Plancherel for the DFT: trapezoid with more nodes than the bandwidth.
    let box5 = line(5, Boundary::ZeroExtended);
    let mut plancherel = 0.0f64;
    for _ in 0..10 {
        let u = random_field(&box5, &mut rng);
        let n = 32;
        let mean = (0..n)
            .map(|k| {
                let theta =
                    -std::f64::consts::PI + 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                dft(&u, &[theta]).norm_sqr()
            })
            .sum::<f64>()
            / n as f64;
        let l2 = u.dot(&u);
        plancherel = plancherel.max((mean - l2).abs() / l2);
    }
    s.at_most("dft_plancherel", plancherel, 1e-10);

    let torus = LatticeGeometry::new(2, 6, Boundary::PeriodicWrap)?;
    let alpha = order(0.5);
    let periodic = Kernel::periodized(alpha, &torus);
    let multiplier = Multiplier::new(alpha, &torus);
    let h = Potential::constant(1.0)?;
    let bound = 8f64.powf(0.5);
    let (mut forms, mut symmetry, mut form_bound, mut op_bound, mut linear) =
        (0.0f64, 0.0f64, f64::NEG_INFINITY, f64::NEG_INFINITY, 0.0f64);
    for _ in 0..100 {
        let u = random_field(&torus, &mut rng);
        let v = random_field(&torus, &mut rng);
        let spectral = spectral_form(&u, &v, alpha) + u.dot(&v);
        let kernel_form = halpha_inner(&u, &v, &periodic, &h)?;
        forms = forms.max((spectral - kernel_form).abs() / (1.0 + spectral.abs()));
        let swapped = halpha_inner(&v, &u, &periodic, &h)?;
        symmetry = symmetry.max((kernel_form - swapped).abs());
        let seminorm = spectral_form(&u, &u, alpha);
        form_bound = form_bound.max(seminorm - bound * u.dot(&u) * (1.0 + 1e-12));
        op_bound = op_bound.max(multiplier.apply(&u)?.norm2() - bound * u.norm2() * (1.0 + 1e-12));
        let (a, b) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let combo = u.scale(a).add_scaled(b, &v);
        let lhs = apply_kernel(&combo, &periodic)?;
        let rhs = apply_kernel(&u, &periodic)?
            .scale(a)
            .add_scaled(b, &apply_kernel(&v, &periodic)?);
        linear = linear.max(sup_diff(&lhs, &rhs));
    }
    s.at_most("inner_product_spectral_vs_kernel", forms, 1e-8);
    s.at_most("self_adjointness", symmetry, 1e-12);
    s.at_most("seminorm_bound", form_bound, 0.0);
    s.at_most("operator_bound", op_bound, 0.0);
    s.at_most("linearity", linear, 1e-12);

    let u = random_field(&torus, &mut rng);
    let fast = multiplier.apply(&u)?;
    let direct = apply_kernel(&u, &periodic)?;
    s.at_most("fft_vs_kernel_on_torus", sup_diff(&fast, &direct), 1e-12);
    let constant = Field::from_fn(&torus, |_| 1.5);
    s.at_most(
        "constant_annihilated",
        multiplier.apply(&constant)?.norm_sup(),
        1e-12,
    );
    Ok(())
}

/// `(2L+1)^{-d} Σ_k Φ(θ_k)^α Re(û_k conj(v̂_k))` on the box's frequency grid.
fn spectral_form(u: &Field<f64>, v: &Field<f64>, alpha: FractionalOrder<f64>) -> f64 {
    let geom = u.geom();
    let n = geom.side();
    let fft = CubeFft::new(n, geom.dim());
    let slot = |i: usize| {
        geom.coords(i)
            .iter()
            .fold(0usize, |acc, &c| acc * n + c.rem_euclid(n as i64) as usize)
    };
    let lift = |f: &Field<f64>| {
        let mut data = vec![Complex::new(0.0, 0.0); fft.len()];
        for (i, &x) in f.values().iter().enumerate() {
            data[slot(i)] = Complex::new(x, 0.0);
        }
        fft.process(&mut data, FftDirection::Forward);
        data
    };
    let (fu, fv) = (lift(u), lift(v));
    let sym = symbol_grid(alpha, geom.dim(), n);
    let total: f64 = sym
        .iter()
        .zip(fu.iter().zip(&fv))
        .map(|(&s, (a, b))| s * (a * b.conj()).re)
        .sum();
    total / fft.len() as f64
}

fn semigroup_checks(s: &mut Suite, opts: &ValidateOptions) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x4ea7);
    let cfg = HeatConfig::default();
    let geom = line(24, Boundary::ZeroExtended);
    let spectral = SpectralConfig::new(8192, 48)?;
    let mut equivalence = 0.0f64;
    let mut identity = 0.0f64;
    let mut homogeneity = 0.0f64;
    for alpha in [0.25, 0.5, 0.75] {
        let kernel = kernel_table(order(alpha), 1, &spectral)?;
        let mut inputs = vec![Field::delta(&geom, &[0])?];
        inputs.extend((0..10).map(|_| random_field(&geom, &mut rng)));
        for u in &inputs {
            let a = apply_kernel(u, &kernel)?;
            let b = fraclap_semigroup(u, alpha, &cfg)?;
            equivalence = equivalence.max(sup_diff(&a, &b) / u.norm_sup());
        }
        identity = identity.max(scalar_identity_error(alpha, 1, &default_lambdas(1), &cfg)?);
        let u = &inputs[1];
        let scaled = fraclap_semigroup(&u.scale(-3.0), alpha, &cfg)?;
        let base = fraclap_semigroup(u, alpha, &cfg)?.scale(-3.0);
        homogeneity = homogeneity.max(sup_diff(&scaled, &base) / base.norm_sup());
    }
    s.at_most("definition_equivalence", equivalence, 1e-4);
    s.at_most("scalar_identity", identity, 1e-6);
    s.at_most("homogeneity", homogeneity, 1e-12);

    let torus = line(20, Boundary::PeriodicWrap);
    let u = random_field(&torus, &mut rng);
    let two_step = heat_apply(&heat_apply(&u, 0.7, &cfg)?, 1.8, &cfg)?;
    let one_step = heat_apply(&u, 2.5, &cfg)?;
    s.at_most("semigroup_property", sup_diff(&two_step, &one_step), 1e-8);
    let mass = (heat_apply(&u, 3.0, &cfg)?.sum() - u.sum()).abs();
    s.at_most("heat_mass_conservation", mass, 1e-12);
    Ok(())
}

fn model_checks(s: &mut Suite, opts: &ValidateOptions) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x30de);
    let samples: Vec<f64> = (0..40)
        .map(|k| 10f64.powf(-3.0 + 0.15 * k as f64))
        .collect();
    let sites = vec![vec![0i64], vec![1], vec![-2], vec![5]];
    let mut violations = 0usize;
    let mut growth = f64::NEG_INFINITY;
    let weight = SiteFunction::periodic(vec![3], vec![1.0, 2.0, 0.5])?;
    for p in [2.5, 3.0, 4.0, 6.0] {
        let pure = Nonlinearity::pure_power(p)?;
        let weighted = Nonlinearity::weighted_power(p, weight.clone())?;
        violations += usize::from(spot_check(&pure, &sites, &samples).is_err());
        violations += usize::from(spot_check(&weighted, &sites, &samples).is_err());
        for &u in &samples {
            let f = crate::model::SiteNonlinearity::f(&pure, &[0], u);
            growth = growth.max(f.abs() - (u.abs() + u.abs().powf(p - 1.0)) * (1.0 + 1e-15));
            let identity = f * u
                - 2.0 * crate::model::SiteNonlinearity::primitive(&pure, &[0], u)
                - (1.0 - 2.0 / p) * u.abs().powf(p);
            growth = growth.max(identity.abs() - 1e-12 * u.abs().powf(p));
        }
    }
    s.at_most("nonlinearity_assumptions", violations as f64, 0.0);
    s.at_most("growth_and_superquadratic_identity", growth, 0.0);

    // Gradient against Richardson-extrapolated central differences.
    let geom = line(10, Boundary::ZeroExtended);
    let m = Model::new(
        &geom,
        order(0.6),
        Potential::new(SiteFunction::periodic(vec![2], vec![1.0, 1.5])?)?,
        Nonlinearity::pure_power(3.5)?,
        &SpectralConfig::new(1024, 20)?,
    )?;
    let mut fd = 0.0f64;
    for _ in 0..5 {
        let u = random_field(&geom, &mut rng);
        let v = random_field(&geom, &mut rng);
        let exact = m.gradient(&u)?.dot(&v);
        let central = |h: f64| -> Result<f64> {
            Ok((m.energy(&u.add_scaled(h, &v))? - m.energy(&u.add_scaled(-h, &v))?) / (2.0 * h))
        };
        let (c1, c2) = (central(1e-3)?, central(5e-4)?);
        let richardson = (4.0 * c2 - c1) / 3.0;
        fd = fd.max((richardson - exact).abs() / (1.0 + exact.abs()));
    }
    s.at_most("gradient_energy_consistency", fd, 1e-8);

    let torus = line(13, Boundary::PeriodicWrap);
    let periodic = Model::new(
        &torus,
        order(0.5),
        Potential::new(SiteFunction::periodic(vec![3], vec![1.0, 2.0, 1.5])?)?,
        Nonlinearity::weighted_power(4.0, SiteFunction::periodic(vec![3], vec![1.0, 0.5, 2.0])?)?,
        &SpectralConfig::default_for(1, 13),
    )?;
    let u = random_field(&torus, &mut rng);
    let e0 = periodic.energy(&u)?;
    let e1 = periodic.energy(&u.shift(&[3]))?;
    s.at_most(
        "periodic_coefficients_invariance",
        (e0 - e1).abs() / e0.abs(),
        1e-12,
    );
    Ok(())
}

fn nehari_checks(s: &mut Suite, opts: &ValidateOptions) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0xe4a1);
    let geom = line(32, Boundary::PeriodicWrap);
    let m = Model::new(
        &geom,
        order(0.5),
        Potential::constant(1.0)?,
        Nonlinearity::pure_power(4.0)?,
        &SpectralConfig::default_for(1, 32),
    )?;
    let (mut min_energy, mut scale_gap, mut residual, mut peak) =
        (f64::INFINITY, 0.0f64, 0.0f64, f64::NEG_INFINITY);
    for _ in 0..100 {
        let w = random_field(&geom, &mut rng);
        let u = project_m(&m, &w)?;
        min_energy = min_energy.min(m.energy(&u)?);
        let s_w = nehari_scale(&m, &w)?;
        let s_newton = nehari_scale_newton(&m, m.nonlinearity(), &w)?;
        scale_gap = scale_gap.max((s_w - s_newton).abs() / s_w);
        let on = w.scale(s_w);
        residual = residual.max(m.nehari_residual(&on)?.abs() / m.inner(&on, &on)?);
        let top = m.energy(&on)?;
        for k in 0..100 {
            let factor = 10f64.powf(-1.0 + 2.0 * k as f64 / 99.0);
            peak = peak.max(m.energy(&w.scale(s_w * factor))? - top);
        }
    }
    s.positive("nehari_energy_positive", min_energy);
    s.at_most("closed_form_vs_root_solve", scale_gap, 1e-10);
    s.at_most("nehari_residual_at_scale", residual, 1e-10);
    s.at_most("scale_maximizes_ray_energy", peak, 1e-12);

    let cfg = SolverConfig {
        seed: opts.seed,
        ..SolverConfig::default()
    };
    let w0 = crate::nehari::gaussian_bump(&geom, &[0.0], 2.5);
    let r = minimize(&m, &w0, &cfg).map_err(|e| Error::Domain(e.to_string()))?;
    let climb = r
        .energy_trace
        .windows(2)
        .fold(f64::NEG_INFINITY, |acc, w| acc.max(w[1] - w[0]));
    s.at_most("descent_monotone", climb.max(0.0), 0.0);
    let g = m.gradient(&r.u)?;
    let sites = geom.len() as f64;
    s.at_most(
        "pointwise_equation",
        g.norm_sup() / (r.u.norm2() * sites.sqrt()),
        cfg.tol_grad,
    );
    s.at_most(
        "energy_identity",
        (r.energy - m.mountain_gap(&r.u)).abs() / (1.0 + r.energy.abs()),
        1e-8,
    );
    let back = project_m(&m, &unproject(&m, &r.u)?)?;
    s.at_most(
        "projection_inverse",
        m.norm_alpha(&(&back - &r.u))? / m.norm_alpha(&r.u)?,
        1e-12,
    );

    let set = multistart(&m, 8, &cfg)?;
    s.positive("batch_nonempty", set.members.len() as f64);
    s.at_most(
        "norm_bound_away_from_zero",
        -set.norm_bound_margin(&m)?,
        0.0,
    );
    s.at_most("inverse_map_lipschitz", set.lipschitz_ratio(&m)?, 1.0);
    Ok(())
}

fn cli_checks(s: &mut Suite, opts: &ValidateOptions) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0xc11);
    let dir = tempfile::tempdir()?;
    let path = dir.path().join("field.csv");
    let geom = LatticeGeometry::new(2, 4, Boundary::ZeroExtended)?;
    let u = Field::from_fn(&geom, |_| {
        rng.gen_range(-1.0f64..1.0) * 10f64.powi(rng.gen_range(-30..30))
    });
    io::write_field(&path, &u)?;
    let back: Field<f64> = io::read_field(&path)?;
    s.at_most("field_csv_round_trip", sup_diff(&back, &u), 0.0);

    let torus = line(24, Boundary::PeriodicWrap);
    let m = Model::new(
        &torus,
        order(0.5),
        Potential::constant(1.0)?,
        Nonlinearity::pure_power(4.0)?,
        &SpectralConfig::default_for(1, 24),
    )?;
    let w0 = crate::nehari::gaussian_bump(&torus, &[1.0], 2.0);
    let cfg = SolverConfig::default();
    let a = minimize(&m, &w0, &cfg).map_err(|e| Error::Domain(e.to_string()))?;
    let b = minimize(&m, &w0, &cfg).map_err(|e| Error::Domain(e.to_string()))?;
    let same = a.u == b.u && a.energy.to_bits() == b.energy.to_bits();
    s.at_most("solve_determinism", if same { 0.0 } else { 1.0 }, 0.0);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_module_is_rejected() {
        let opts = ValidateOptions {
            only: Some("nope".into()),
            ..ValidateOptions::default()
        };
        assert!(run(&opts).is_err());
    }

    #[test]
    fn lattice_checks_pass() {
        let opts = ValidateOptions {
            only: Some("lattice".into()),
            ..ValidateOptions::default()
        };
        let report = run(&opts).unwrap();
        assert!(report.all_pass(), "{:?}", report.checks);
        assert!(report.checks.iter().all(|c| c.module == "lattice"));
    }
}
