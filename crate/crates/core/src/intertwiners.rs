//! Incoming and outgoing intertwining vectors.
//!
//! The incoming vector is an evaluation functional: applied to f it gives
//! f(lambda_i) when the target sequence is lambda + mu e_i and 0 otherwise.
//! Pairing it with the k-dimensional theta basis of the window space gives
//! a k x k matrix whose inverse supplies the outgoing coefficients; the two
//! duality sums are exactly the two-sided inverse identities.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::functions::{Bivariate, Parity, ProductBivariate, Univariate};
use crate::irf::{boltzmann_weight_offsets, unit_offset, StepDirection, WeightSequence};
use crate::linalg;
use crate::r_operator::{r_apply, RContext, EPS_DIAG};
use crate::spaces::COND_LIMIT;
use crate::theta::{
    dedekind_eta, theta1, theta_char, theta_char_deriv, ModularParams, ThetaCharacteristics,
};

type C = Complex64;
const I: C = Complex64::new(0.0, 1.0);
const PI: f64 = std::f64::consts::PI;

/// Which one-variable basis the window intertwiners pair against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    /// theta[1/2-(j-k1)/k; k/2](xi + |lambda| - k z, k tau) exp(pi i k z)
    Plus,
    /// the same with exp(pi i (k+1) z)
    Minus,
    /// no exponential factor (the tilde spaces)
    Tilde,
}

impl BasisKind {
    pub fn from_parity(parity: Parity) -> Self {
        match parity {
            Parity::Plus => BasisKind::Plus,
            Parity::Minus => BasisKind::Minus,
        }
    }

    fn exp_rate(self, k: usize) -> C {
        match self {
            BasisKind::Plus => I * PI * k as f64,
            BasisKind::Minus => I * PI * (k as f64 + 1.0),
            BasisKind::Tilde => C::new(0.0, 0.0),
        }
    }

    /// Ambient 1-periodicity class of the basis elements.
    pub fn ambient_parity(self, k: usize) -> Parity {
        match self {
            BasisKind::Plus => Parity::Plus,
            BasisKind::Minus => Parity::Minus,
            BasisKind::Tilde => {
                if k.is_multiple_of(2) {
                    Parity::Plus
                } else {
                    Parity::Minus
                }
            }
        }
    }
}

/// Evaluation functional of the incoming intertwining vector: the target
/// is given as a mu-offset vector relative to lambda.
pub fn incoming_apply<F: Fn(C) -> Result<C>>(
    lambda: &WeightSequence,
    target_offset: &[i32],
    f: F,
) -> Result<C> {
    assert_eq!(target_offset.len(), lambda.len());
    let mut step = None;
    for (p, &o) in target_offset.iter().enumerate() {
        match o {
            0 => {}
            1 if step.is_none() => step = Some(p),
            _ => return Ok(C::new(0.0, 0.0)),
        }
    }
    match step {
        Some(p) => {
            let (k1, _) = lambda.window();
            f(lambda.value(k1 + p as i32))
        }
        None => Ok(C::new(0.0, 0.0)),
    }
}

/// The basis element the window intertwiners pair against, with j labelled
/// canonically by the column c = j - k1 in {0, .., k-1}.
fn window_basis_value(
    kind: BasisKind,
    k: usize,
    c: usize,
    char_arg: C,
    z: C,
    params: &ModularParams,
) -> Result<C> {
    let ch = ThetaCharacteristics::basis(c as i64, k as i64);
    let theta = theta_char(ch, char_arg - k as f64 * z, params.tau * k as f64)?;
    Ok(theta * (kind.exp_rate(k) * z).exp())
}

/// Entry phibar[i, c]: the c-th basis function of the window space with
/// character xi + |lambda|, evaluated at lambda_i (times the exponential
/// factor of the chosen kind).
pub fn phibar_matrix(
    xi: C,
    lambda: &WeightSequence,
    kind: BasisKind,
    params: &ModularParams,
) -> Result<Array2<C>> {
    let k = lambda.len();
    let char_arg = xi + lambda.window_sum();
    let (k1, _) = lambda.window();
    let mut m = Array2::<C>::zeros((k, k));
    for (row, i) in (k1..).take(k).enumerate() {
        let li = lambda.value(i);
        for c in 0..k {
            m[[row, c]] = window_basis_value(kind, k, c, char_arg, li, params)?;
        }
    }
    Ok(m)
}

/// The theta-value part of the matrix (without the exponential diagonal),
/// whose determinant the denominator formula evaluates in closed form.
fn theta_value_matrix(xi: C, lambda: &WeightSequence, params: &ModularParams) -> Result<Array2<C>> {
    phibar_matrix(xi, lambda, BasisKind::Tilde, params)
}

/// Relative residual between det(theta matrix) and the closed form
///
/// ```text
/// (-1)^(k-1) (sqrt(-1) eta(tau))^(-(k-1)(k-2)/2) theta1(xi) prod_{i<j} theta1(lambda_ij)
/// ```
///
/// In this theta1 convention the denominator-formula branch is
/// sqrt(-1) = -i (checked against a 40-digit oracle for k = 2..5;
/// the +i branch flips the sign whenever (k-1)(k-2)/2 is odd).
pub fn weyl_kac_det_residual(xi: C, lambda: &WeightSequence, params: &ModularParams) -> Result<f64> {
    let k = lambda.len() as i32;
    let m = theta_value_matrix(xi, lambda, params)?;
    let det = linalg::determinant(&m)?;
    let tau = params.tau;
    let mut rhs = theta1(xi, tau)?;
    let (k1, k2) = lambda.window();
    for i in k1..=k2 {
        for j in (i + 1)..=k2 {
            rhs *= theta1(lambda.value(i) - lambda.value(j), tau)?;
        }
    }
    let exponent = (k - 1) * (k - 2) / 2;
    let ieta = -I * dedekind_eta(tau)?;
    rhs *= ieta.powi(-exponent);
    if (k - 1) % 2 == 1 {
        rhs = -rhs;
    }
    Ok((det - rhs).norm() / det.norm().max(rhs.norm()).max(1e-300))
}

/// The complete intertwiner data at (xi, lambda): phibar, its two-sided
/// inverse phi, and the conditioning of the solve.
#[derive(Debug, Clone)]
pub struct IntertwinerMatrix {
    pub k: usize,
    pub xi: C,
    pub lambda: WeightSequence,
    pub kind: BasisKind,
    /// rows: step index i (window order); cols: basis label c = j - k1.
    pub phibar: Array2<C>,
    /// rows: basis label c; cols: step index i. phi . phibar = phibar . phi = I.
    pub phi: Array2<C>,
    pub cond: f64,
    /// Worst deviation of the two duality products from the identity.
    pub duality_residual: f64,
}

/// Solve the duality relations: phi is the two-sided inverse of phibar,
/// computed by partial-pivot elimination and verified on both sides.
pub fn outgoing_coeffs(
    xi: C,
    lambda: &WeightSequence,
    kind: BasisKind,
    params: &ModularParams,
) -> Result<IntertwinerMatrix> {
    let phibar = phibar_matrix(xi, lambda, kind, params)?;
    let cond = linalg::cond_one(&phibar);
    if !cond.is_finite() || cond > COND_LIMIT {
        return Err(CoreError::Singular { cond });
    }
    let phi = linalg::inverse(&phibar)?;
    let k = lambda.len();
    let id = linalg::identity(k);
    let r1 = linalg::max_abs(&(&phi.dot(&phibar) - &id));
    let r2 = linalg::max_abs(&(&phibar.dot(&phi) - &id));
    Ok(IntertwinerMatrix {
        k,
        xi,
        lambda: lambda.clone(),
        kind,
        phibar,
        phi,
        cond,
        duality_residual: r1.max(r2),
    })
}

/// An outgoing intertwining vector as a reusable univariate function: the
/// phi-column linear combination of the window basis, living in the window
/// space with character xi + |lambda|.
#[derive(Debug, Clone)]
pub struct OutgoingVector {
    pub k: usize,
    pub kind: BasisKind,
    pub char_arg: C,
    pub coeffs: Vec<C>,
    pub params: ModularParams,
}

impl OutgoingVector {
    pub fn zero_like(&self) -> Self {
        Self { coeffs: vec![C::new(0.0, 0.0); self.k], ..self.clone() }
    }
}

impl Univariate for OutgoingVector {
    fn value(&self, z: C) -> Result<C> {
        let mut acc = C::new(0.0, 0.0);
        for (c, coeff) in self.coeffs.iter().enumerate() {
            if coeff.norm() == 0.0 {
                continue;
            }
            acc += coeff
                * window_basis_value(self.kind, self.k, c, self.char_arg, z, &self.params)?;
        }
        Ok(acc)
    }

    fn deriv(&self, z: C) -> Result<C> {
        let k = self.k as f64;
        let tau_k = self.params.tau * k;
        let rate = self.kind.exp_rate(self.k);
        let e = (rate * z).exp();
        let mut acc = C::new(0.0, 0.0);
        for (c, coeff) in self.coeffs.iter().enumerate() {
            if coeff.norm() == 0.0 {
                continue;
            }
            let ch = ThetaCharacteristics::basis(c as i64, self.k as i64);
            let arg = self.char_arg - k * z;
            let theta = theta_char(ch, arg, tau_k)?;
            let dtheta = theta_char_deriv(ch, arg, tau_k)? * (-k);
            acc += coeff * (dtheta * e + theta * e * rate);
        }
        Ok(acc)
    }

    fn parity(&self) -> Parity {
        self.kind.ambient_parity(self.k)
    }
}

impl IntertwinerMatrix {
    /// The outgoing vector for the admissible step lambda -> lambda + mu e_i.
    pub fn outgoing(&self, i: i32, params: &ModularParams) -> OutgoingVector {
        let (k1, _) = self.lambda.window();
        let col = (i - k1) as usize;
        OutgoingVector {
            k: self.k,
            kind: self.kind,
            char_arg: self.xi + self.lambda.window_sum(),
            coeffs: self.phi.column(col).to_vec(),
            params: *params,
        }
    }
}

/// Evaluate the outgoing vector for step i at z.
pub fn outgoing_eval(
    m: &IntertwinerMatrix,
    i: i32,
    z: C,
    params: &ModularParams,
) -> Result<C> {
    m.outgoing(i, params).value(z)
}

/// Relative residual of the vertex-IRF correspondence for the path
/// kappa = lambda + mu e_i, nu = kappa + mu e_j, tested on the bivariate
/// function f.
pub fn vertex_irf_residual(
    lambda: &WeightSequence,
    i: i32,
    j: i32,
    xi: C,
    f: &dyn Bivariate,
    params: &ModularParams,
) -> Result<f64> {
    let k = lambda.len();
    let (k1, _) = lambda.window();
    // Evaluation points of the incoming pair: (lambda_i, kappa_j).
    let z1 = lambda.value(i);
    let z2 = lambda.value(j) + if i == j { params.mu } else { C::new(0.0, 0.0) };
    let gap = {
        let d = z2 - z1;
        (d - d.re.round()).norm()
    };
    if gap < EPS_DIAG {
        return Err(CoreError::Genericity {
            what: "vertex-IRF evaluation point hit the diagonal set".into(),
            margin: gap,
        });
    }
    let ctx = RContext::new(*params, xi);
    let lhs = r_apply(&ctx, f, z1, z2)?;

    let zero = vec![0i32; k];
    let bottom = unit_offset(k, (i - k1) as usize);
    let mut right = bottom.clone();
    right[(j - k1) as usize] += 1;
    let mut rhs = C::new(0.0, 0.0);
    let mut scale = 0.0f64;
    for (pos, l) in lambda.indices().enumerate() {
        let top = unit_offset(k, pos);
        let w = boltzmann_weight_offsets(lambda, &zero, &top, &right, &bottom, xi, params)?;
        if w.norm() == 0.0 {
            continue;
        }
        // nu - kappa' must be the single step e_m.
        let m_idx = if l == i { j } else { i };
        let w1 = lambda.value(l);
        let w2 = lambda.value(m_idx) + if l == m_idx { params.mu } else { C::new(0.0, 0.0) };
        let term = w * f.value(w1, w2)?;
        scale = scale.max(term.norm());
        rhs += term;
    }
    Ok((lhs - rhs).norm() / lhs.norm().max(rhs.norm()).max(scale).max(1e-300))
}

/// Relative residual of the exchange relation
///
/// R(xi12) (phi(xi1)_lambda^kappa x phi(xi2)_kappa^nu)(z1, z2)
///   = sum_kappa' phi(xi2)_lambda^kappa'(z1) phi(xi1)_kappa'^nu(z2)
///     W[kappa; lambda, xi12, nu; kappa']
///
/// for the path kappa = lambda + mu e_i, nu = kappa + mu e_j.
#[allow(clippy::too_many_arguments)]
pub fn exchange_residual(
    xi1: C,
    xi2: C,
    lambda: &WeightSequence,
    i: i32,
    j: i32,
    z1: C,
    z2: C,
    kind: BasisKind,
    params: &ModularParams,
) -> Result<f64> {
    let k = lambda.len();
    let (k1, _) = lambda.window();
    let kappa = lambda.stepped(i, StepDirection::Up, params)?;

    let m_lam_x1 = outgoing_coeffs(xi1, lambda, kind, params)?;
    let m_kap_x2 = outgoing_coeffs(xi2, &kappa, kind, params)?;
    let prod = ProductBivariate {
        u: m_lam_x1.outgoing(i, params),
        v: m_kap_x2.outgoing(j, params),
    };
    let ctx = RContext::new(*params, xi1 - xi2);
    let lhs = r_apply(&ctx, &prod, z1, z2)?;

    let m_lam_x2 = outgoing_coeffs(xi2, lambda, kind, params)?;
    let zero = vec![0i32; k];
    let top = unit_offset(k, (i - k1) as usize);
    let mut right = top.clone();
    right[(j - k1) as usize] += 1;
    let mut rhs = C::new(0.0, 0.0);
    let mut scale = 0.0f64;
    for (pos, l) in lambda.indices().enumerate() {
        let bottom = unit_offset(k, pos);
        let w =
            boltzmann_weight_offsets(lambda, &zero, &top, &right, &bottom, xi1 - xi2, params)?;
        if w.norm() == 0.0 {
            continue;
        }
        let kappa_p = lambda.stepped(l, StepDirection::Up, params)?;
        let m_idx = if l == i { j } else { i };
        let m_kp_x1 = outgoing_coeffs(xi1, &kappa_p, kind, params)?;
        let term = w
            * m_lam_x2.outgoing(l, params).value(z1)?
            * m_kp_x1.outgoing(m_idx, params).value(z2)?;
        scale = scale.max(term.norm());
        rhs += term;
    }
    Ok((lhs - rhs).norm() / lhs.norm().max(rhs.norm()).max(scale).max(1e-300))
}
