//! Factorized L-operators.
//!
//! The window L-operator is rank one: it evaluates its argument at a
//! weight and multiplies by the matching outgoing vector. Summed over
//! admissible intermediate sequences it exchanges with the R-operator
//! (the RLL relation). Conjugating by translations and transposing gives
//! the finite L-matrices that satisfy the RLL relation with the finite
//! R-matrix.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::belavin::{rk_star_matrix, OperatorMatrix};
use crate::error::{CoreError, Result};
use crate::functions::{Bivariate, ProductBivariate, Univariate};
use crate::intertwiners::{outgoing_coeffs, BasisKind, OutgoingVector};
use crate::irf::{boltzmann_weight_offsets, StepDirection, WeightSequence};
use crate::linalg;
use crate::r_operator::{r_apply, RContext};
use crate::spaces::{self, basis_eval, SpaceSpec};
use crate::theta::{dist_to_lattice, theta_char, ModularParams, ThetaCharacteristics, DELTA_GEN};

type C = Complex64;

/// One rank-one L-operator entry: the step lambda -> lambda + mu e_index,
/// or the zero operator when `step` is None.
#[derive(Debug, Clone)]
pub struct LOperatorEntry {
    pub lambda: WeightSequence,
    pub step: Option<i32>,
    pub xi: C,
    pub kind: BasisKind,
}

/// Apply the entry to a univariate function: outgoing vector times the
/// evaluation functional.
pub fn l_apply<F: Fn(C) -> Result<C>>(
    entry: &LOperatorEntry,
    f: F,
    z: C,
    params: &ModularParams,
) -> Result<C> {
    let Some(i) = entry.step else {
        return Ok(C::new(0.0, 0.0));
    };
    let m = outgoing_coeffs(entry.xi, &entry.lambda, entry.kind, params)?;
    Ok(m.outgoing(i, params).value(z)? * f(entry.lambda.value(i))?)
}

/// The other window index of the two-step path (i, j) reached from step l.
fn partner(i: i32, j: i32, l: i32) -> i32 {
    if l == i {
        j
    } else {
        i
    }
}

/// Evaluation point of the incoming pair for intermediate step l on the
/// path nu = lambda + mu (e_i + e_j): (lambda_l, (lambda + mu e_l)_m).
fn face_points(lambda: &WeightSequence, i: i32, j: i32, l: i32, params: &ModularParams) -> (C, C) {
    let m = partner(i, j, l);
    let first = lambda.value(l);
    let second = lambda.value(m) + if l == m { params.mu } else { C::new(0.0, 0.0) };
    (first, second)
}

/// Max relative residual of the RLL relation
///
/// sum_kappa R(xi12) L(xi1)_lambda^kappa x L(xi2)_kappa^nu
///   = sum_kappa L(xi2)_lambda^kappa x L(xi1)_kappa^nu R(xi12)
///
/// for the path nu = lambda + mu (e_i + e_j), tested pointwise on f.
#[allow(clippy::too_many_arguments)]
pub fn rll_pointwise_residual(
    xi1: C,
    xi2: C,
    lambda: &WeightSequence,
    i: i32,
    j: i32,
    f: &dyn Bivariate,
    points: &[(C, C)],
    kind: BasisKind,
    params: &ModularParams,
) -> Result<f64> {
    let ctx = RContext::new(*params, xi1 - xi2);
    let (k1, k2) = lambda.window();

    // Intermediate steps with both factors admissible.
    let mut inter: Vec<i32> = Vec::new();
    for l in k1..=k2 {
        if l == i || l == j {
            inter.push(l);
            if i == j {
                break;
            }
        }
    }

    let m_lam_x1 = outgoing_coeffs(xi1, lambda, kind, params)?;
    let m_lam_x2 = outgoing_coeffs(xi2, lambda, kind, params)?;

    struct Term {
        pair: ProductBivariate<OutgoingVector, OutgoingVector>,
        weight: C,
        rhs_vec1: OutgoingVector,
        rhs_vec2: OutgoingVector,
        face: (C, C),
    }
    let mut terms = Vec::new();
    for &l in &inter {
        let kappa = lambda.stepped(l, StepDirection::Up, params)?;
        let m_idx = partner(i, j, l);
        let m_kap_x2 = outgoing_coeffs(xi2, &kappa, kind, params)?;
        let m_kap_x1 = outgoing_coeffs(xi1, &kappa, kind, params)?;
        let face = face_points(lambda, i, j, l, params);
        terms.push(Term {
            pair: ProductBivariate {
                u: m_lam_x1.outgoing(l, params),
                v: m_kap_x2.outgoing(m_idx, params),
            },
            weight: incoming_pair(f, face)?,
            rhs_vec1: m_lam_x2.outgoing(l, params),
            rhs_vec2: m_kap_x1.outgoing(m_idx, params),
            face,
        });
    }

    let mut worst = 0.0f64;
    for &(z1, z2) in points {
        let mut lhs = C::new(0.0, 0.0);
        let mut rhs = C::new(0.0, 0.0);
        let mut scale = 0.0f64;
        for t in &terms {
            let lterm = t.weight * r_apply(&ctx, &t.pair, z1, z2)?;
            scale = scale.max(lterm.norm());
            lhs += lterm;
            let g = r_apply(&ctx, f, t.face.0, t.face.1)?;
            let rterm = t.rhs_vec1.value(z1)? * t.rhs_vec2.value(z2)? * g;
            scale = scale.max(rterm.norm());
            rhs += rterm;
        }
        worst = worst.max((lhs - rhs).norm() / lhs.norm().max(rhs.norm()).max(scale).max(1e-300));
    }
    Ok(worst)
}

fn incoming_pair(f: &dyn Bivariate, face: (C, C)) -> Result<C> {
    f.value(face.0, face.1)
}

/// Assembled form of the RLL relation: for fixed nu the identity over the
/// delta-indexed product space decouples into per-(lambda, nu) blocks; the
/// assembled residual is the worst block deviation against the global
/// scale.
#[allow(clippy::too_many_arguments)]
pub fn rll_assembled_residual(
    xi1: C,
    xi2: C,
    lambda: &WeightSequence,
    f: &dyn Bivariate,
    points: &[(C, C)],
    kind: BasisKind,
    params: &ModularParams,
) -> Result<f64> {
    let (k1, k2) = lambda.window();
    let mut worst = 0.0f64;
    for i in k1..=k2 {
        for j in k1..=k2 {
            let r = rll_pointwise_residual(xi1, xi2, lambda, i, j, f, points, kind, params)?;
            worst = worst.max(r);
        }
    }
    Ok(worst)
}

/// Coefficient vector of the finite outgoing vector over the dual basis:
/// component j is theta[1/2 - j/k; k/2](xi + |lambda| - k lambda_i, k tau)
/// for the downward step kappa = lambda - mu e_i; the zero vector
/// otherwise.
pub fn belavin_outgoing(
    xi: C,
    lambda: &WeightSequence,
    step: Option<i32>,
    params: &ModularParams,
) -> Result<Array1<C>> {
    let k = lambda.len();
    let Some(i) = step else {
        return Ok(Array1::zeros(k));
    };
    let arg = xi + lambda.window_sum() - k as f64 * lambda.value(i);
    let tau_k = params.tau * k as f64;
    let mut v = Array1::zeros(k);
    for j in 0..k {
        v[j] = theta_char(ThetaCharacteristics::basis(j as i64, k as i64), arg, tau_k)?;
    }
    Ok(v)
}

fn kron_vec(a: &Array1<C>, b: &Array1<C>) -> Array1<C> {
    let k = a.len();
    let mut out = Array1::zeros(k * b.len());
    for i in 0..k {
        for j in 0..b.len() {
            out[i * b.len() + j] = a[i] * b[j];
        }
    }
    out
}

/// Relative residual of the vertex-IRF correspondence for the finite
/// R-matrix on the downward path kappa = lambda - mu e_i,
/// nu = kappa - mu e_j:
///
/// R_k(xi12)* phi(xi1)_lambda^kappa x phi(xi2)_kappa^nu
///   = sum_kappa' phi(xi2)_lambda^kappa' x phi(xi1)_kappa'^nu
///     Wtilde[kappa; lambda, xi12, nu; kappa']
///
/// with Wtilde the flipped bracket W[kappa'; nu, xi, lambda; kappa].
pub fn belavin_vertex_irf_residual(
    xi1: C,
    xi2: C,
    lambda: &WeightSequence,
    i: i32,
    j: i32,
    params: &ModularParams,
) -> Result<f64> {
    let k = lambda.len();
    let (k1, _) = lambda.window();
    let kappa = lambda.stepped(i, StepDirection::Down, params)?;
    let star = rk_star_matrix(k, xi1 - xi2, params)?;

    let phi1 = belavin_outgoing(xi1, lambda, Some(i), params)?;
    let phi2 = belavin_outgoing(xi2, &kappa, Some(j), params)?;
    let lhs = star.entries.dot(&kron_vec(&phi1, &phi2));

    let pos = |idx: i32| (idx - k1) as usize;
    let mut nu_off = vec![0i32; k];
    nu_off[pos(i)] -= 1;
    nu_off[pos(j)] -= 1;
    let mut bottom = vec![0i32; k];
    bottom[pos(i)] -= 1;
    let zero = vec![0i32; k];

    let mut rhs = Array1::<C>::zeros(k * k);
    for l in lambda.indices() {
        let mut top = vec![0i32; k];
        top[pos(l)] -= 1;
        // Wtilde[kappa; lambda, xi, nu; kappa'] = W[kappa'; nu, xi, lambda; kappa]
        let w = boltzmann_weight_offsets(lambda, &nu_off, &top, &zero, &bottom, xi1 - xi2, params)?;
        if w.norm() == 0.0 {
            continue;
        }
        let kappa_p = lambda.stepped(l, StepDirection::Down, params)?;
        let m_idx = partner(i, j, l);
        let v1 = belavin_outgoing(xi2, lambda, Some(l), params)?;
        let v2 = belavin_outgoing(xi1, &kappa_p, Some(m_idx), params)?;
        rhs = rhs + kron_vec(&v1, &v2).mapv(|x| x * w);
    }

    let mut diff = 0.0f64;
    let mut scale = 0.0f64;
    for idx in 0..k * k {
        diff = diff.max((lhs[idx] - rhs[idx]).norm());
        scale = scale.max(lhs[idx].norm()).max(rhs[idx].norm());
    }
    Ok(diff / scale.max(1e-300))
}

/// The finite L-matrix for a (possibly non-admissible) downward step.
#[derive(Debug, Clone)]
pub struct BelavinLMatrix {
    pub k: usize,
    /// Matrix of the conjugated operator on the tilde basis {e_j}.
    pub tilde: Array2<C>,
    /// Its transpose on the dual basis {e^j}.
    pub star: Array2<C>,
}

impl BelavinLMatrix {
    fn zero(k: usize) -> Self {
        Self { k, tilde: Array2::zeros((k, k)), star: Array2::zeros((k, k)) }
    }
}

fn require_generic(what: &str, z: C, tau: C) -> Result<()> {
    let d = dist_to_lattice(z, tau);
    if d <= DELTA_GEN {
        return Err(CoreError::Genericity { what: format!("{what} too close to Z + Z tau"), margin: d });
    }
    Ok(())
}

/// Build the conjugated L-operator matrix
///
/// T_k(xi + |kappa| - k mu)^-1 . L(xi - k mu)_kappa^lambda . T_k(xi + |kappa| - k mu)
///
/// restricted to the tilde space, extracted column by column through
/// sampling and least squares (rank one by construction), together with
/// its dual-basis transpose.
pub fn belavin_l_matrix(
    xi: C,
    lambda: &WeightSequence,
    step: Option<i32>,
    params: &ModularParams,
) -> Result<BelavinLMatrix> {
    let k = lambda.len();
    let Some(i) = step else {
        return Ok(BelavinLMatrix::zero(k));
    };
    let kf = k as f64;
    let tau = params.tau;
    let kappa = lambda.stepped(i, StepDirection::Down, params)?;
    let zeta = xi - kf * params.mu;
    let shift = xi + kappa.window_sum() - kf * params.mu;
    require_generic("xi", xi, tau)?;
    require_generic("xi - k mu", zeta, tau)?;
    require_generic("xi + |kappa| - k mu", shift, tau)?;

    // Outgoing vector of the window duality at (zeta, kappa) for the step
    // kappa -> lambda.
    let m = outgoing_coeffs(zeta, &kappa, BasisKind::Tilde, params)?;
    let phi = m.outgoing(i, params);
    let spec0 = SpaceSpec::tilde(k, C::new(0.0, 0.0));
    // phibar_kappa^lambda evaluates at kappa_i.
    let eval_point = kappa.value(i);

    let mut tilde = Array2::<C>::zeros((k, k));
    for j in 0..k {
        // (T_k(shift) e_j)(kappa_i)
        let b_j = spaces::translate_eval(
            k,
            shift,
            |w| basis_eval(&spec0, j as i64, w, params).unwrap(),
            eval_point,
        );
        // column j of the sandwich, expanded back over the tilde basis
        let e = spaces::expand_in_basis(
            |z| Ok(phi.value(z + shift / kf)? * b_j),
            &spec0,
            params,
        )?;
        if e.residual > crate::belavin::MEMBERSHIP_BOUND {
            return Err(CoreError::Membership {
                residual: e.residual,
                bound: crate::belavin::MEMBERSHIP_BOUND,
            });
        }
        for row in 0..k {
            tilde[[row, j]] = e.coeffs[row];
        }
    }
    let star = tilde.t().to_owned();
    Ok(BelavinLMatrix { k, tilde, star })
}

/// Relative residual of the finite RLL relation on the downward path
/// nu = lambda - mu (e_i + e_j):
///
/// sum_kappa R_k(xi12)* Lstar(xi1)_lambda^kappa x Lstar(xi2)_kappa^nu
///   = sum_kappa Lstar(xi2)_lambda^kappa x Lstar(xi1)_kappa^nu R_k(xi12)*
pub fn belavin_rll_residual(
    xi1: C,
    xi2: C,
    lambda: &WeightSequence,
    i: i32,
    j: i32,
    params: &ModularParams,
) -> Result<f64> {
    let k = lambda.len();
    let star = rk_star_matrix(k, xi1 - xi2, params)?;
    let (lhs, rhs) = belavin_rll_sides(xi1, xi2, lambda, i, j, &star, params)?;
    let mut diff = 0.0f64;
    let mut scale = 0.0f64;
    for (u, v) in lhs.iter().zip(rhs.iter()) {
        diff = diff.max((u - v).norm());
        scale = scale.max(u.norm()).max(v.norm());
    }
    Ok(diff / scale.max(1e-300))
}

fn belavin_rll_sides(
    xi1: C,
    xi2: C,
    lambda: &WeightSequence,
    i: i32,
    j: i32,
    star: &OperatorMatrix,
    params: &ModularParams,
) -> Result<(Array2<C>, Array2<C>)> {
    let k = lambda.len();
    let (k1, k2) = lambda.window();
    let mut inter: Vec<i32> = Vec::new();
    for l in k1..=k2 {
        if l == i || l == j {
            inter.push(l);
            if i == j {
                break;
            }
        }
    }
    let mut lhs = Array2::<C>::zeros((k * k, k * k));
    let mut rhs = Array2::<C>::zeros((k * k, k * k));
    for &l in &inter {
        let kappa = lambda.stepped(l, StepDirection::Down, params)?;
        let m_idx = partner(i, j, l);
        let l1_lam = belavin_l_matrix(xi1, lambda, Some(l), params)?;
        let l2_kap = belavin_l_matrix(xi2, &kappa, Some(m_idx), params)?;
        let l2_lam = belavin_l_matrix(xi2, lambda, Some(l), params)?;
        let l1_kap = belavin_l_matrix(xi1, &kappa, Some(m_idx), params)?;
        lhs = lhs + star.entries.dot(&linalg::kron(&l1_lam.star, &l2_kap.star));
        rhs = rhs + linalg::kron(&l2_lam.star, &l1_kap.star).dot(&star.entries);
    }
    Ok((lhs, rhs))
}

/// Assembled form over all paths into nu: per-pair blocks measured against
/// the global scale.
pub fn belavin_rll_assembled_residual(
    xi1: C,
    xi2: C,
    nu: &WeightSequence,
    params: &ModularParams,
) -> Result<f64> {
    let (k1, k2) = nu.window();
    let mut blocks = Vec::new();
    let mut scale = 0.0f64;
    for i in k1..=k2 {
        for j in k1..=k2 {
            let lambda = nu
                .stepped(i, StepDirection::Up, params)?
                .stepped(j, StepDirection::Up, params)?;
            let star = rk_star_matrix(nu.len(), xi1 - xi2, params)?;
            let (lhs, rhs) = belavin_rll_sides(xi1, xi2, &lambda, i, j, &star, params)?;
            for (u, v) in lhs.iter().zip(rhs.iter()) {
                scale = scale.max(u.norm()).max(v.norm());
            }
            blocks.push((lhs, rhs));
        }
    }
    let mut diff = 0.0f64;
    for (lhs, rhs) in &blocks {
        for (u, v) in lhs.iter().zip(rhs.iter()) {
            diff = diff.max((u - v).norm());
        }
    }
    Ok(diff / scale.max(1e-300))
}
