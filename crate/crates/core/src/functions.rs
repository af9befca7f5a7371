//! Function abstractions the operator kernels act on.
//!
//! The R-operator needs values everywhere and first partials near the
//! diagonal set; it also needs to know whether its argument is 1-periodic
//! or 1-antiperiodic per slot to track the sign of the regularized branch.

use num_complex::Complex64;

use crate::error::Result;

type C = Complex64;

/// Periodicity class under z -> z + 1 (per tensor slot).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    /// f(z+1) = f(z)
    Plus,
    /// f(z+1) = -f(z)
    Minus,
}

impl Parity {
    /// Sign picked up when a slot is shifted by the integer m.
    pub fn shift_sign(self, m: i64) -> f64 {
        match self {
            Parity::Plus => 1.0,
            Parity::Minus => {
                if m.rem_euclid(2) == 0 {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }
}

/// A function of one complex variable with an analytic derivative.
pub trait Univariate {
    fn value(&self, z: C) -> Result<C>;
    fn deriv(&self, z: C) -> Result<C>;
    fn parity(&self) -> Parity;
}

/// A function of two complex variables.
pub trait Bivariate {
    fn value(&self, z1: C, z2: C) -> Result<C>;

    /// First partials; the default is a central difference with h = 1e-6,
    /// which is what user-supplied closures get.
    fn partials(&self, z1: C, z2: C) -> Result<Option<(C, C)>> {
        let h = 1e-6;
        let d1 = (self.value(z1 + h, z2)? - self.value(z1 - h, z2)?) / (2.0 * h);
        let d2 = (self.value(z1, z2 + h)? - self.value(z1, z2 - h)?) / (2.0 * h);
        Ok(Some((d1, d2)))
    }

    fn parity(&self) -> Parity;
}

/// A function of three complex variables (values only; Yang-Baxter scans
/// keep all evaluation points away from the diagonals).
pub trait Trivariate {
    fn value(&self, z1: C, z2: C, z3: C) -> Result<C>;
    fn parity(&self) -> Parity;
}

/// Closure-backed bivariate function.
pub struct FnBivariate<F: Fn(C, C) -> C> {
    f: F,
    parity: Parity,
}

impl<F: Fn(C, C) -> C> FnBivariate<F> {
    pub fn periodic(f: F) -> Self {
        Self { f, parity: Parity::Plus }
    }

    pub fn antiperiodic(f: F) -> Self {
        Self { f, parity: Parity::Minus }
    }
}

impl<F: Fn(C, C) -> C> Bivariate for FnBivariate<F> {
    fn value(&self, z1: C, z2: C) -> Result<C> {
        Ok((self.f)(z1, z2))
    }

    fn parity(&self) -> Parity {
        self.parity
    }
}

/// Wrapper that refuses to provide partials (exercises the error path of
/// the regularized diagonal branch).
pub struct NoPartials<F: Fn(C, C) -> C> {
    pub f: F,
    pub parity: Parity,
}

impl<F: Fn(C, C) -> C> Bivariate for NoPartials<F> {
    fn value(&self, z1: C, z2: C) -> Result<C> {
        Ok((self.f)(z1, z2))
    }

    fn partials(&self, _z1: C, _z2: C) -> Result<Option<(C, C)>> {
        Ok(None)
    }

    fn parity(&self) -> Parity {
        self.parity
    }
}

/// Product u(z1) v(z2) of two univariate functions with analytic partials.
pub struct ProductBivariate<U: Univariate, V: Univariate> {
    pub u: U,
    pub v: V,
}

impl<U: Univariate, V: Univariate> Bivariate for ProductBivariate<U, V> {
    fn value(&self, z1: C, z2: C) -> Result<C> {
        Ok(self.u.value(z1)? * self.v.value(z2)?)
    }

    fn partials(&self, z1: C, z2: C) -> Result<Option<(C, C)>> {
        let u = self.u.value(z1)?;
        let v = self.v.value(z2)?;
        Ok(Some((self.u.deriv(z1)? * v, u * self.v.deriv(z2)?)))
    }

    fn parity(&self) -> Parity {
        debug_assert_eq!(self.u.parity(), self.v.parity());
        self.u.parity()
    }
}

/// Argument shift h(z1, z2) = f(z1 - d1, z2 - d2); partials and parity pass
/// through unchanged.
pub struct ShiftedArgs<'a> {
    pub inner: &'a dyn Bivariate,
    pub d1: C,
    pub d2: C,
}

impl Bivariate for ShiftedArgs<'_> {
    fn value(&self, z1: C, z2: C) -> Result<C> {
        self.inner.value(z1 - self.d1, z2 - self.d2)
    }

    fn partials(&self, z1: C, z2: C) -> Result<Option<(C, C)>> {
        self.inner.partials(z1 - self.d1, z2 - self.d2)
    }

    fn parity(&self) -> Parity {
        self.inner.parity()
    }
}

/// exp(2 pi i a z), optionally times exp(pi i z) for the antiperiodic class.
#[derive(Debug, Clone, Copy)]
pub struct ExpUni {
    pub a: i32,
    pub parity: Parity,
}

impl Univariate for ExpUni {
    fn value(&self, z: C) -> Result<C> {
        Ok((C::i() * std::f64::consts::PI * self.freq() * z).exp())
    }

    fn deriv(&self, z: C) -> Result<C> {
        let w = C::i() * std::f64::consts::PI * self.freq();
        Ok(w * (w * z).exp())
    }

    fn parity(&self) -> Parity {
        self.parity
    }
}

impl ExpUni {
    fn freq(&self) -> f64 {
        2.0 * self.a as f64
            + match self.parity {
                Parity::Plus => 0.0,
                Parity::Minus => 1.0,
            }
    }
}

/// exp(2 pi i (a z1 + b z2)) times the antiperiodic factor per slot when
/// parity is minus. The standard test family for functional identities.
#[derive(Debug, Clone, Copy)]
pub struct ExpBivariate {
    pub a: i32,
    pub b: i32,
    pub parity: Parity,
}

impl ExpBivariate {
    fn freqs(&self) -> (f64, f64) {
        let extra = match self.parity {
            Parity::Plus => 0.0,
            Parity::Minus => 1.0,
        };
        (2.0 * self.a as f64 + extra, 2.0 * self.b as f64 + extra)
    }
}

impl Bivariate for ExpBivariate {
    fn value(&self, z1: C, z2: C) -> Result<C> {
        let (fa, fb) = self.freqs();
        Ok((C::i() * std::f64::consts::PI * (fa * z1 + fb * z2)).exp())
    }

    fn partials(&self, z1: C, z2: C) -> Result<Option<(C, C)>> {
        let (fa, fb) = self.freqs();
        let v = self.value(z1, z2)?;
        let i_pi = C::i() * std::f64::consts::PI;
        Ok(Some((i_pi * fa * v, i_pi * fb * v)))
    }

    fn parity(&self) -> Parity {
        self.parity
    }
}

/// exp(2 pi i (a z1 + b z2 + c z3)), antiperiodic variant per slot.
#[derive(Debug, Clone, Copy)]
pub struct ExpTrivariate {
    pub a: i32,
    pub b: i32,
    pub c: i32,
    pub parity: Parity,
}

impl Trivariate for ExpTrivariate {
    fn value(&self, z1: C, z2: C, z3: C) -> Result<C> {
        let extra = match self.parity {
            Parity::Plus => 0.0,
            Parity::Minus => 1.0,
        };
        let arg = (2.0 * self.a as f64 + extra) * z1
            + (2.0 * self.b as f64 + extra) * z2
            + (2.0 * self.c as f64 + extra) * z3;
        Ok((C::i() * std::f64::consts::PI * arg).exp())
    }

    fn parity(&self) -> Parity {
        self.parity
    }
}
