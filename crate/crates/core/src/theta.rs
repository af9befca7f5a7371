//! Elliptic theta functions by truncated series.
//!
//! Everything downstream reduces to the first Jacobi theta function
//!
//! ```text
//! theta1(z, tau) = sum_m exp[ pi i (m+1/2)^2 tau + 2 pi i (m+1/2)(z+1/2) ]
//! ```
//!
//! its z-derivative, theta functions with rational characteristics
//!
//! ```text
//! theta[a;b](z, tau) = sum_m exp[ pi i (m+a)^2 tau + 2 pi i (m+a)(z+b) ]
//! ```
//!
//! and Dedekind's eta function. With this convention theta1 is exactly
//! theta[1/2;1/2], and theta1'(0) = -2 pi eta(tau)^3 (note the sign: the
//! classical textbook theta1 is the negative of this series).

use num_complex::Complex64;
use num_rational::Ratio;

use crate::error::{CoreError, Result};

/// Relative truncation target for all series evaluations.
pub const SERIES_TOL: f64 = 1e-14;

/// Margin for all lattice-avoidance (genericity) checks.
pub const DELTA_GEN: f64 = 1e-6;

const PI: f64 = std::f64::consts::PI;
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Global modular data: tau in the upper half plane and the shift mu.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModularParams {
    pub tau: Complex64,
    pub mu: Complex64,
}

impl ModularParams {
    /// Validates Im(tau) > 0 and mu away from Z + Z tau.
    pub fn new(tau: Complex64, mu: Complex64) -> Result<Self> {
        check_tau(tau)?;
        let d = dist_to_lattice(mu, tau);
        if d <= DELTA_GEN {
            return Err(CoreError::Genericity {
                what: "mu must avoid Z + Z tau".into(),
                margin: d,
            });
        }
        Ok(Self { tau, mu })
    }

    /// Stricter condition used by the weight-lattice sections: mu real and
    /// not an integer.
    pub fn require_mu_real(&self) -> Result<()> {
        if self.mu.im != 0.0 {
            return Err(CoreError::InvalidParams(format!(
                "mu must be real, got imaginary part {}",
                self.mu.im
            )));
        }
        let d = (self.mu.re - self.mu.re.round()).abs();
        if d <= DELTA_GEN {
            return Err(CoreError::Genericity {
                what: "mu must avoid Z".into(),
                margin: d,
            });
        }
        Ok(())
    }

    /// Membership in the horizontal strip D = { |Im z| < Im tau / 2 }.
    pub fn in_domain(&self, z: Complex64) -> bool {
        z.im.abs() < self.tau.im / 2.0
    }
}

/// Distance from z to the nearest point of Z + Z tau.
pub fn dist_to_lattice(z: Complex64, tau: Complex64) -> f64 {
    let y = z.im / tau.im;
    let x = z.re - y * tau.re;
    let mut best = f64::INFINITY;
    for n in [y.floor(), y.ceil()] {
        for m in [x.floor(), x.ceil()] {
            let p = Complex64::new(m, 0.0) + Complex64::new(n, 0.0) * tau;
            best = best.min((z - p).norm());
        }
    }
    best
}

/// Theta characteristics stored exactly as rationals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThetaCharacteristics {
    pub a: Ratio<i64>,
    pub b: Ratio<i64>,
}

impl ThetaCharacteristics {
    pub fn new(a: Ratio<i64>, b: Ratio<i64>) -> Self {
        Self { a, b }
    }

    /// The (1/2, 1/2) characteristics of theta1.
    pub fn half_half() -> Self {
        Self::new(Ratio::new(1, 2), Ratio::new(1, 2))
    }

    /// The characteristics (1/2 - j/n, n/2) of the standard basis element j.
    pub fn basis(j: i64, n: i64) -> Self {
        Self::new(
            Ratio::new(1, 2) - Ratio::new(j, n),
            Ratio::new(n, 2),
        )
    }

    fn a_f64(&self) -> f64 {
        *self.a.numer() as f64 / *self.a.denom() as f64
    }

    fn b_f64(&self) -> f64 {
        *self.b.numer() as f64 / *self.b.denom() as f64
    }
}

fn check_tau(tau: Complex64) -> Result<()> {
    if tau.im > 0.0 {
        Ok(())
    } else {
        Err(CoreError::InvalidParams(format!(
            "Im(tau) must be positive, got {}",
            tau.im
        )))
    }
}

/// Core truncated series for theta[a;b] and its z-derivative.
///
/// The argument is range-reduced by an integer n so that |Re z| <= 1/2,
/// which multiplies the sum by the phase exp(2 pi i a n). Terms are kept
/// for |m+a| <= M with
///
///   M = ceil( sqrt( (T + pi Im(tau)/4 + 2 pi |Im z| + |ln tol|) / (pi Im tau) ) ) + 2,
///   T = 5,
///
/// after which the Gaussian decay exp(-pi Im(tau) (m+a)^2) dominates the
/// oscillatory factor. A short adaptive tail extension then guarantees the
/// truncation error stays below SERIES_TOL times the series scale even for
/// arguments with unusually large imaginary part.
fn theta_series(a: f64, b: f64, z: Complex64, tau: Complex64, deriv: bool) -> Result<Complex64> {
    check_tau(tau)?;
    let shift = z.re.round();
    let zr = z - shift;
    // phase of the integer shift: exp(2 pi i a n)
    let phase = (I * 2.0 * PI * a * shift).exp();

    let im_tau = tau.im;
    let t_safety = 5.0;
    let m_bound = ((t_safety + PI * im_tau / 4.0 + 2.0 * PI * zr.im.abs() - SERIES_TOL.ln())
        / (PI * im_tau))
        .sqrt()
        .ceil()
        + 2.0;

    let term = |m: i64| -> Complex64 {
        let h = m as f64 + a;
        let e = (I * PI * h * h * tau + I * 2.0 * PI * h * (zr + b)).exp();
        if deriv {
            e * I * 2.0 * PI * h
        } else {
            e
        }
    };

    let mut lo = (-m_bound - a).ceil() as i64;
    let mut hi = (m_bound - a).floor() as i64;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut max_mag = 0.0f64;
    for m in lo..=hi {
        let t = term(m);
        max_mag = max_mag.max(t.norm());
        sum += t;
    }
    // Tail extension: the fixed bound can undershoot for large |Im z|
    // relative to Im tau; extend until terms are negligible.
    let cap = 8 * hi.max(4) + 32;
    let floor = 1e-17;
    while hi - lo < cap {
        let t = term(hi + 1);
        if t.norm() <= floor * max_mag.max(1e-300) {
            break;
        }
        hi += 1;
        max_mag = max_mag.max(t.norm());
        sum += t;
    }
    while hi - lo < cap {
        let t = term(lo - 1);
        if t.norm() <= floor * max_mag.max(1e-300) {
            break;
        }
        lo -= 1;
        max_mag = max_mag.max(t.norm());
        sum += t;
    }
    Ok(phase * sum)
}

/// theta1(z, tau), the series with characteristics (1/2, 1/2).
pub fn theta1(z: Complex64, tau: Complex64) -> Result<Complex64> {
    theta_series(0.5, 0.5, z, tau, false)
}

/// d/dz theta1 at an arbitrary point.
pub fn theta1_deriv(z: Complex64, tau: Complex64) -> Result<Complex64> {
    theta_series(0.5, 0.5, z, tau, true)
}

/// theta1'(0), the derivative at the simple zero.
pub fn theta1_deriv0(tau: Complex64) -> Result<Complex64> {
    theta1_deriv(Complex64::new(0.0, 0.0), tau)
}

/// theta[a;b](z, tau) with rational characteristics.
pub fn theta_char(ch: ThetaCharacteristics, z: Complex64, tau: Complex64) -> Result<Complex64> {
    theta_series(ch.a_f64(), ch.b_f64(), z, tau, false)
}

/// d/dz theta[a;b](z, tau).
pub fn theta_char_deriv(
    ch: ThetaCharacteristics,
    z: Complex64,
    tau: Complex64,
) -> Result<Complex64> {
    theta_series(ch.a_f64(), ch.b_f64(), z, tau, true)
}

/// Dedekind's eta function by its product; factors are kept until
/// |q^m| < 1e-17, after which 1 - q^m is 1 to working precision.
pub fn dedekind_eta(tau: Complex64) -> Result<Complex64> {
    check_tau(tau)?;
    let q = (I * 2.0 * PI * tau).exp();
    let mut product = Complex64::new(1.0, 0.0);
    let mut qm = q;
    let mut m = 0usize;
    while qm.norm() >= 1e-17 && m < 10_000 {
        product *= Complex64::new(1.0, 0.0) - qm;
        qm *= q;
        m += 1;
    }
    Ok((I * PI * tau / 12.0).exp() * product)
}

/// Relative residual of the three term equation
///
/// ```text
///   theta1(x+y) theta1(x-y) theta1(z+w) theta1(z-w)
/// + theta1(x+z) theta1(x-z) theta1(w+y) theta1(w-y)
/// + theta1(x+w) theta1(x-w) theta1(y+z) theta1(y-z) = 0
/// ```
///
/// normalized by the largest of the three product magnitudes.
pub fn three_term_residual(
    x: Complex64,
    y: Complex64,
    z: Complex64,
    w: Complex64,
    tau: Complex64,
) -> Result<f64> {
    let th = |u: Complex64| theta1(u, tau);
    let p1 = th(x + y)? * th(x - y)? * th(z + w)? * th(z - w)?;
    let p2 = th(x + z)? * th(x - z)? * th(w + y)? * th(w - y)?;
    let p3 = th(x + w)? * th(x - w)? * th(y + z)? * th(y - z)?;
    let scale = p1.norm().max(p2.norm()).max(p3.norm()).max(1e-300);
    Ok((p1 + p2 + p3).norm() / scale)
}
