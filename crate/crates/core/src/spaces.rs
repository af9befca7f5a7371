//! Finite-dimensional theta-function spaces and basis expansions.
//!
//! Three families are handled by one `SpaceSpec`:
//!
//! * plus spaces: f(z+1) = f(z), f(z+tau) = (-1)^n exp(2 pi i (xi - n z)) f(z),
//!   with basis theta[1/2 - j/n; n/2](xi - n z, n tau) exp(pi i n z);
//! * minus spaces: f(z+1) = -f(z), multiplier picks up exp(pi i tau), basis
//!   exponential becomes exp(pi i (n+1) z);
//! * tilde spaces: f(z+1) = (-1)^k f(z),
//!   f(z+tau) = (-1)^k exp(-2 pi i (k z - xi + k tau/2)) f(z), basis without
//!   an exponential factor.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::functions::{Bivariate, Parity, Univariate};
use crate::linalg;
use crate::theta::{theta_char, theta_char_deriv, ModularParams, ThetaCharacteristics};

type C = Complex64;
const I: C = Complex64::new(0.0, 1.0);
const PI: f64 = std::f64::consts::PI;

/// Conditioning bound beyond which expansions are rejected.
pub const COND_LIMIT: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceSpec {
    pub n: usize,
    pub xi: C,
    pub parity: Parity,
    pub tilde: bool,
}

impl SpaceSpec {
    /// The n-dimensional plus space with character parameter xi.
    pub fn vn(n: usize, xi: C) -> Self {
        assert!(n >= 1);
        Self { n, xi, parity: Parity::Plus, tilde: false }
    }

    /// The minus-parity variant.
    pub fn vn_minus(n: usize, xi: C) -> Self {
        assert!(n >= 1);
        Self { n, xi, parity: Parity::Minus, tilde: false }
    }

    /// The tilde space of dimension k; its ambient parity is forced by the
    /// parity of k.
    pub fn tilde(k: usize, xi: C) -> Self {
        assert!(k >= 1);
        let parity = if k.is_multiple_of(2) { Parity::Plus } else { Parity::Minus };
        Self { n: k, xi, parity, tilde: true }
    }

    /// Parity of the ambient space of 1-(anti)periodic functions.
    pub fn ambient_parity(&self) -> Parity {
        self.parity
    }

    fn reduce_index(&self, j: i64) -> i64 {
        j.rem_euclid(self.n as i64)
    }
}

/// Value of the j-th basis element at z.
pub fn basis_eval(spec: &SpaceSpec, j: i64, z: C, params: &ModularParams) -> Result<C> {
    let n = spec.n as i64;
    let j = spec.reduce_index(j);
    let ch = ThetaCharacteristics::basis(j, n);
    let theta = theta_char(ch, spec.xi - (n as f64) * z, params.tau * n as f64)?;
    Ok(theta * exp_factor(spec, z))
}

/// d/dz of the j-th basis element at z.
pub fn basis_deriv(spec: &SpaceSpec, j: i64, z: C, params: &ModularParams) -> Result<C> {
    let n = spec.n as i64;
    let j = spec.reduce_index(j);
    let ch = ThetaCharacteristics::basis(j, n);
    let arg = spec.xi - (n as f64) * z;
    let tau_n = params.tau * n as f64;
    let theta = theta_char(ch, arg, tau_n)?;
    let dtheta = theta_char_deriv(ch, arg, tau_n)? * (-(n as f64));
    let e = exp_factor(spec, z);
    Ok(dtheta * e + theta * e * exp_rate(spec))
}

fn exp_factor(spec: &SpaceSpec, z: C) -> C {
    (exp_rate(spec) * z).exp()
}

fn exp_rate(spec: &SpaceSpec) -> C {
    if spec.tilde {
        C::new(0.0, 0.0)
    } else {
        match spec.parity {
            Parity::Plus => I * PI * spec.n as f64,
            Parity::Minus => I * PI * (spec.n as f64 + 1.0),
        }
    }
}

/// A basis element as a reusable univariate function with analytic
/// derivative.
#[derive(Debug, Clone)]
pub struct BasisFunction {
    pub spec: SpaceSpec,
    pub j: i64,
    pub params: ModularParams,
}

impl Univariate for BasisFunction {
    fn value(&self, z: C) -> Result<C> {
        basis_eval(&self.spec, self.j, z, &self.params)
    }

    fn deriv(&self, z: C) -> Result<C> {
        basis_deriv(&self.spec, self.j, z, &self.params)
    }

    fn parity(&self) -> Parity {
        self.spec.ambient_parity()
    }
}

/// The translation operator: (T_k(xi) f)(z) = f(z - xi/k).
pub fn translate_eval<F: Fn(C) -> C>(k: usize, xi: C, f: F, z: C) -> C {
    f(z - xi / k as f64)
}

#[derive(Debug, Clone)]
pub struct BasisExpansion {
    pub coeffs: Vec<C>,
    /// Max reconstruction error at held-out points, relative to the sample scale.
    pub residual: f64,
    /// Condition estimate of the sampling system.
    pub cond: f64,
}

/// Expand a univariate function over the basis of `spec` by least squares
/// on 2n points of the line Im z = 0.05 Im tau (offset 0.37 avoids rational
/// resonances with the period); the residual is measured at n fresh points
/// on a different line.
pub fn expand_in_basis<F: Fn(C) -> Result<C>>(
    f: F,
    spec: &SpaceSpec,
    params: &ModularParams,
) -> Result<BasisExpansion> {
    let n = spec.n;
    let m = 2 * n;
    let im = 0.05 * params.tau.im;
    let solve_pts: Vec<C> = (0..m)
        .map(|s| C::new((s as f64 + 0.37) / m as f64, im))
        .collect();
    let mut a = Array2::<C>::zeros((m, n));
    let mut b = Array1::<C>::zeros(m);
    for (s, &z) in solve_pts.iter().enumerate() {
        for j in 0..n {
            a[[s, j]] = basis_eval(spec, j as i64, z, params)?;
        }
        b[s] = f(z)?;
    }
    let (x, cond) = linalg::least_squares(&a, &b)?;
    if !cond.is_finite() || cond > COND_LIMIT {
        return Err(CoreError::Conditioning { cond });
    }
    let fresh_im = 0.08 * params.tau.im;
    let mut scale = b.iter().fold(0.0f64, |acc, v| acc.max(v.norm()));
    let mut residual = 0.0f64;
    let mut fresh_vals = Vec::with_capacity(n);
    for s in 0..n {
        let z = C::new((s as f64 + 0.71) / n as f64, fresh_im);
        let mut rec = C::new(0.0, 0.0);
        for j in 0..n {
            rec += x[j] * basis_eval(spec, j as i64, z, params)?;
        }
        let fv = f(z)?;
        scale = scale.max(fv.norm());
        fresh_vals.push((fv, rec));
    }
    for (fv, rec) in fresh_vals {
        residual = residual.max((fv - rec).norm());
    }
    Ok(BasisExpansion {
        coeffs: x.to_vec(),
        residual: residual / scale.max(1e-300),
        cond,
    })
}

/// Max relative residual of the two defining quasi-periodicity relations
/// over `samples` deterministic points.
pub fn quasi_periodicity_residual<F: Fn(C) -> Result<C>>(
    f: F,
    spec: &SpaceSpec,
    samples: usize,
    params: &ModularParams,
) -> Result<f64> {
    let tau = params.tau;
    let n = spec.n as f64;
    let mut worst = 0.0f64;
    for s in 0..samples {
        let z = C::new((s as f64 + 0.37) / samples as f64, 0.05 * tau.im);
        let fz = f(z)?;
        let f1 = f(z + 1.0)?;
        let sign = match spec.ambient_parity() {
            Parity::Plus => 1.0,
            Parity::Minus => -1.0,
        };
        let r1 = (f1 - sign * fz).norm() / f1.norm().max(fz.norm()).max(1e-300);
        let ftau = f(z + tau)?;
        let mult = tau_multiplier(spec, z, n, tau);
        let r2 = (ftau - mult * fz).norm() / ftau.norm().max((mult * fz).norm()).max(1e-300);
        worst = worst.max(r1).max(r2);
    }
    Ok(worst)
}

fn tau_multiplier(spec: &SpaceSpec, z: C, n: f64, tau: C) -> C {
    let sign = if spec.n.is_multiple_of(2) { 1.0 } else { -1.0 };
    if spec.tilde {
        sign * (-I * 2.0 * PI * (n * z - spec.xi + n * tau / 2.0)).exp()
    } else {
        match spec.parity {
            Parity::Plus => sign * (I * 2.0 * PI * (spec.xi - n * z)).exp(),
            Parity::Minus => sign * (I * 2.0 * PI * (spec.xi - n * z + tau / 2.0)).exp(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Expansion2d {
    /// coeffs[[a, b]] multiplies u_a(z1) v_b(z2).
    pub coeffs: Array2<C>,
    pub residual: f64,
    pub cond: f64,
}

/// Grid offsets for the two-variable sampling; the second line uses a
/// different imaginary offset so the grid never touches the diagonal set.
#[derive(Debug, Clone, Copy)]
pub struct GridOffsets {
    pub frac1: f64,
    pub frac2: f64,
    pub im1: f64,
    pub im2: f64,
}

impl Default for GridOffsets {
    fn default() -> Self {
        Self { frac1: 0.37, frac2: 0.59, im1: 0.05, im2: -0.07 }
    }
}

impl GridOffsets {
    /// The one deterministic retry used when the first grid is unlucky.
    pub fn perturbed(&self) -> Self {
        Self {
            frac1: self.frac1 + 0.11,
            frac2: self.frac2 + 0.11,
            im1: self.im1 + 0.02,
            im2: self.im2 - 0.02,
        }
    }

    /// Offsets for the held-out residual grid.
    fn fresh(&self) -> (f64, f64, f64, f64) {
        (0.13, 0.81, 0.02, -0.04)
    }
}

/// Expand g(z1, z2) over the product basis of s1 x s2. The tall system
/// factorizes over the two axes, so each axis is solved by its own
/// oversampled least squares.
pub fn expand_in_product_basis(
    g: &dyn Bivariate,
    s1: &SpaceSpec,
    s2: &SpaceSpec,
    params: &ModularParams,
    offsets: GridOffsets,
) -> Result<Expansion2d> {
    let n1 = s1.n;
    let n2 = s2.n;
    let m1 = 2 * n1;
    let m2 = 2 * n2;
    let tau_im = params.tau.im;
    let z1s: Vec<C> = (0..m1)
        .map(|s| C::new((s as f64 + offsets.frac1) / m1 as f64, offsets.im1 * tau_im))
        .collect();
    let z2s: Vec<C> = (0..m2)
        .map(|t| C::new((t as f64 + offsets.frac2) / m2 as f64, offsets.im2 * tau_im))
        .collect();

    let mut a1 = Array2::<C>::zeros((m1, n1));
    for (s, &z) in z1s.iter().enumerate() {
        for a in 0..n1 {
            a1[[s, a]] = basis_eval(s1, a as i64, z, params)?;
        }
    }
    let mut a2 = Array2::<C>::zeros((m2, n2));
    for (t, &z) in z2s.iter().enumerate() {
        for b in 0..n2 {
            a2[[t, b]] = basis_eval(s2, b as i64, z, params)?;
        }
    }

    let mut gv = Array2::<C>::zeros((m1, m2));
    let mut scale = 0.0f64;
    for s in 0..m1 {
        for t in 0..m2 {
            let v = g.value(z1s[s], z2s[t])?;
            scale = scale.max(v.norm());
            gv[[s, t]] = v;
        }
    }

    // Solve A1 M = G column by column, then A2 C^T = M^T.
    let mut mid = Array2::<C>::zeros((n1, m2));
    let mut cond1 = 0.0f64;
    for t in 0..m2 {
        let col = gv.column(t).to_owned();
        let (x, c) = linalg::least_squares(&a1, &col)?;
        cond1 = cond1.max(c);
        mid.column_mut(t).assign(&x);
    }
    let mut coeffs = Array2::<C>::zeros((n1, n2));
    let mut cond2 = 0.0f64;
    for a in 0..n1 {
        let row = mid.row(a).to_owned();
        let (x, c) = linalg::least_squares(&a2, &row)?;
        cond2 = cond2.max(c);
        for b in 0..n2 {
            coeffs[[a, b]] = x[b];
        }
    }
    let cond = cond1.max(cond2);
    if !cond.is_finite() || cond > COND_LIMIT {
        return Err(CoreError::Conditioning { cond });
    }

    // Held-out residual on a fresh grid.
    let (f1, f2, fi1, fi2) = offsets.fresh();
    let mut residual = 0.0f64;
    for s in 0..n1 {
        for t in 0..n2 {
            let z1 = C::new((s as f64 + f1) / n1 as f64, fi1 * tau_im);
            let z2 = C::new((t as f64 + f2) / n2 as f64, fi2 * tau_im);
            let mut rec = C::new(0.0, 0.0);
            for a in 0..n1 {
                let ua = basis_eval(s1, a as i64, z1, params)?;
                for b in 0..n2 {
                    rec += coeffs[[a, b]] * ua * basis_eval(s2, b as i64, z2, params)?;
                }
            }
            let v = g.value(z1, z2)?;
            scale = scale.max(v.norm());
            residual = residual.max((v - rec).norm());
        }
    }
    Ok(Expansion2d { coeffs, residual: residual / scale.max(1e-300), cond })
}

/// Same expansion with the deterministic one-retry grid policy.
pub fn expand_in_product_basis_retry(
    g: &dyn Bivariate,
    s1: &SpaceSpec,
    s2: &SpaceSpec,
    params: &ModularParams,
) -> Result<Expansion2d> {
    let offsets = GridOffsets::default();
    match expand_in_product_basis(g, s1, s2, params, offsets) {
        Ok(e) => Ok(e),
        Err(CoreError::Conditioning { .. }) => {
            expand_in_product_basis(g, s1, s2, params, offsets.perturbed())
        }
        Err(e) => Err(e),
    }
}
