//! Weight lattice windows, admissible steps and the face weights of the
//! IRF model, together with the star-triangle residual.
//!
//! Sequences are handled as a base window plus integer mu-offset vectors,
//! so admissibility is exact integer bookkeeping and the weight brackets
//! never compare floating-point sequence values.

use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::theta::{theta1, theta1_deriv0, ModularParams, DELTA_GEN};

type C = Complex64;

/// A finite window lambda_{k1..k2} of complex weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSequence {
    k1: i32,
    k2: i32,
    values: Vec<C>,
}

/// One violated genericity constraint: |lambda_i - lambda_j - m - n mu|
/// fell below the margin.
#[derive(Debug, Clone, PartialEq)]
pub struct GenericityViolation {
    pub i: i32,
    pub j: i32,
    pub m: i32,
    pub n: i32,
    pub margin: f64,
}

impl std::fmt::Display for GenericityViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "lambda_{} - lambda_{} too close to {} + {} mu (margin {:.3e})",
            self.i, self.j, self.m, self.n, self.margin
        )
    }
}

/// The default generic spacing: irrational, far from Q + Q mu for the
/// default mu (approximately sqrt(3)/pi).
pub const DEFAULT_SPACING: f64 = 0.5513288954217921;

impl WeightSequence {
    /// Build and validate a window.
    pub fn new(k1: i32, k2: i32, values: Vec<C>, params: &ModularParams) -> Result<Self> {
        assert!(k1 <= k2, "window bounds must satisfy k1 <= k2");
        assert_eq!(values.len(), (k2 - k1 + 1) as usize);
        let seq = Self { k1, k2, values };
        let violations = validate_sequence(&seq, params);
        if let Some(v) = violations.first() {
            return Err(CoreError::Genericity { what: v.to_string(), margin: v.margin });
        }
        Ok(seq)
    }

    /// The arithmetic default lambda_i = i * r.
    pub fn default_window(k1: i32, k2: i32, params: &ModularParams) -> Result<Self> {
        let values = (k1..=k2)
            .map(|i| C::new(i as f64 * DEFAULT_SPACING, 0.0))
            .collect();
        Self::new(k1, k2, values, params)
    }

    /// Unvalidated constructor for the diagnostic paths.
    pub fn raw(k1: i32, k2: i32, values: Vec<C>) -> Self {
        assert!(k1 <= k2);
        assert_eq!(values.len(), (k2 - k1 + 1) as usize);
        Self { k1, k2, values }
    }

    pub fn window(&self) -> (i32, i32) {
        (self.k1, self.k2)
    }

    /// Window size k = k2 - k1 + 1.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn indices(&self) -> impl Iterator<Item = i32> {
        self.k1..=self.k2
    }

    pub fn value(&self, i: i32) -> C {
        assert!(i >= self.k1 && i <= self.k2, "index {i} outside window");
        self.values[(i - self.k1) as usize]
    }

    /// |lambda|_k, the sum over the window.
    pub fn window_sum(&self) -> C {
        self.values.iter().sum()
    }

    /// The sequence lambda + mu * off (off indexed by window position).
    pub fn shifted(&self, off: &[i32], params: &ModularParams) -> Result<Self> {
        assert_eq!(off.len(), self.len());
        let values = self
            .values
            .iter()
            .zip(off)
            .map(|(v, o)| v + params.mu * *o as f64)
            .collect();
        Self::new(self.k1, self.k2, values, params)
    }

    /// Single admissible step lambda -> lambda +/- mu e_i.
    pub fn stepped(&self, i: i32, dir: StepDirection, params: &ModularParams) -> Result<Self> {
        let mut off = vec![0i32; self.len()];
        off[(i - self.k1) as usize] = dir.sign();
        self.shifted(&off, params)
    }

    fn pos(&self, i: i32) -> usize {
        (i - self.k1) as usize
    }
}

/// Full diagnostic scan of the window invariants: strip membership and
/// pairwise lattice avoidance for m, n in [-2, 2].
pub fn validate_sequence(seq: &WeightSequence, params: &ModularParams) -> Vec<GenericityViolation> {
    let mut out = Vec::new();
    for i in seq.indices() {
        let v = seq.value(i);
        if !params.in_domain(v) {
            out.push(GenericityViolation { i, j: i, m: 0, n: 0, margin: f64::NAN });
        }
    }
    for i in seq.indices() {
        for j in seq.indices() {
            if i == j {
                continue;
            }
            let d = seq.value(i) - seq.value(j);
            for m in -2i32..=2 {
                for n in -2i32..=2 {
                    let margin = (d - m as f64 - params.mu * n as f64).norm();
                    if margin <= DELTA_GEN {
                        out.push(GenericityViolation { i, j, m, n, margin });
                    }
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepDirection {
    Up,
    Down,
}

impl StepDirection {
    pub fn sign(self) -> i32 {
        match self {
            StepDirection::Up => 1,
            StepDirection::Down => -1,
        }
    }
}

/// An admissible step kappa = lambda + mu e_index (direction Up) or
/// lambda - mu e_index (Down).
#[derive(Debug, Clone)]
pub struct AdmissibleStep {
    pub base: WeightSequence,
    pub index: i32,
    pub dir: StepDirection,
}

impl AdmissibleStep {
    pub fn new(base: WeightSequence, index: i32, dir: StepDirection, params: &ModularParams) -> Result<Self> {
        base.stepped(index, dir, params)?;
        Ok(Self { base, index, dir })
    }

    pub fn target(&self, params: &ModularParams) -> Result<WeightSequence> {
        self.base.stepped(self.index, self.dir, params)
    }
}

/// Offset-vector helpers: sequences relative to a common base are encoded
/// as integer multiples of mu per window slot.
pub fn unit_offset(len: usize, pos: usize) -> Vec<i32> {
    let mut v = vec![0i32; len];
    v[pos] = 1;
    v
}

fn offset_diff(a: &[i32], b: &[i32]) -> Vec<i32> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Is the offset vector a single +1 step? Returns the window position.
fn as_unit_up(v: &[i32]) -> Option<usize> {
    let mut found = None;
    for (p, &x) in v.iter().enumerate() {
        match x {
            0 => {}
            1 if found.is_none() => found = Some(p),
            _ => return None,
        }
    }
    found
}

/// Face encoding: kappa = lambda + mu e_i (bottom), kappa' = lambda + mu
/// e_jp (top), nu = kappa + mu e_j (right).
#[derive(Debug, Clone)]
pub struct FaceConfig {
    pub lambda: WeightSequence,
    pub i: i32,
    pub jp: i32,
    pub j: i32,
}

impl FaceConfig {
    pub fn new(lambda: WeightSequence, i: i32, jp: i32, j: i32) -> Self {
        let (k1, k2) = lambda.window();
        assert!(i >= k1 && i <= k2 && jp >= k1 && jp <= k2 && j >= k1 && j <= k2);
        Self { lambda, i, jp, j }
    }
}

/// Boltzmann weight of the face bracket
///
/// ```text
///        top
///  left  xi  right
///       bottom
/// ```
///
/// with all four corners given as mu-offset vectors relative to `base`.
/// Non-admissible quadruples return exactly 0.
pub fn boltzmann_weight_offsets(
    base: &WeightSequence,
    left: &[i32],
    top: &[i32],
    right: &[i32],
    bottom: &[i32],
    xi: C,
    params: &ModularParams,
) -> Result<C> {
    let zero = C::new(0.0, 0.0);
    let Some(pi) = as_unit_up(&offset_diff(bottom, left)) else {
        return Ok(zero);
    };
    let Some(pj) = as_unit_up(&offset_diff(right, bottom)) else {
        return Ok(zero);
    };
    let Some(pjp) = as_unit_up(&offset_diff(top, left)) else {
        return Ok(zero);
    };
    if as_unit_up(&offset_diff(right, top)).is_none() {
        return Ok(zero);
    }

    let tau = params.tau;
    let mu = params.mu;
    let d0 = theta1_deriv0(tau)?;
    // Entries of the left sequence enter the lambda_{ji} differences.
    let lv = |p: usize| base.values[p] + mu * left[p] as f64;

    if pi == pj {
        // kappa' = kappa is forced; weight theta1(mu - xi) theta1'(0) / theta1(mu)
        if pjp != pi {
            return Ok(zero);
        }
        return Ok(theta1(mu - xi, tau)? * d0 / theta1(mu, tau)?);
    }
    let lam_ji = lv(pj) - lv(pi);
    if pjp == pi {
        Ok(theta1(lam_ji - xi, tau)? * d0 / theta1(lam_ji, tau)?)
    } else if pjp == pj {
        Ok(theta1(xi, tau)? * theta1(lam_ji - mu, tau)? * d0
            / (theta1(lam_ji, tau)? * theta1(-mu, tau)?))
    } else {
        Ok(zero)
    }
}

/// Weight of a structurally admissible face.
pub fn boltzmann_weight(face: &FaceConfig, xi: C, params: &ModularParams) -> Result<C> {
    let k = face.lambda.len();
    let zero_off = vec![0i32; k];
    let bottom = unit_offset(k, face.lambda.pos(face.i));
    let top = unit_offset(k, face.lambda.pos(face.jp));
    let mut right = bottom.clone();
    right[face.lambda.pos(face.j)] += 1;
    boltzmann_weight_offsets(&face.lambda, &zero_off, &top, &right, &bottom, xi, params)
}

/// Relative residual of the star-triangle relation for the hexagon built
/// from steps (i, j, l): kappa = lambda + mu e_i, nu = kappa + mu e_j,
/// gamma = nu + mu e_l, with alpha chosen among the three single steps and
/// beta among the three double steps. The kappa' sums run over the window;
/// all terms outside it vanish.
#[allow(clippy::too_many_arguments)]
pub fn star_triangle_residual(
    lambda: &WeightSequence,
    i: i32,
    j: i32,
    l: i32,
    alpha_choice: usize,
    beta_choice: usize,
    xi1: C,
    xi2: C,
    xi3: C,
    params: &ModularParams,
) -> Result<f64> {
    let k = lambda.len();
    let zero = vec![0i32; k];
    let pi = lambda.pos(i);
    let pj = lambda.pos(j);
    let pl = lambda.pos(l);

    let mut kappa = zero.clone();
    kappa[pi] += 1;
    let mut nu = kappa.clone();
    nu[pj] += 1;
    let mut gamma = nu.clone();
    gamma[pl] += 1;

    let alpha_pos = [pi, pj, pl][alpha_choice];
    let alpha = unit_offset(k, alpha_pos);
    let beta_pairs = [[pi, pj], [pi, pl], [pj, pl]][beta_choice];
    let mut beta = zero.clone();
    beta[beta_pairs[0]] += 1;
    beta[beta_pairs[1]] += 1;

    let xi12 = xi1 - xi2;
    let xi13 = xi1 - xi3;
    let xi23 = xi2 - xi3;

    let mut lhs = C::new(0.0, 0.0);
    let mut rhs = C::new(0.0, 0.0);
    let mut scale = 0.0f64;
    for m in 0..k {
        // LHS: kappa' = kappa + mu e_m
        let mut kp = kappa.clone();
        kp[m] += 1;
        let w1 = boltzmann_weight_offsets(lambda, &kappa, &kp, &gamma, &nu, xi12, params)?;
        let w2 = boltzmann_weight_offsets(lambda, &zero, &alpha, &kp, &kappa, xi13, params)?;
        let w3 = boltzmann_weight_offsets(lambda, &alpha, &beta, &gamma, &kp, xi23, params)?;
        let term = w1 * w2 * w3;
        scale = scale.max(term.norm());
        lhs += term;

        // RHS: kappa' = lambda + mu e_m
        let kp = unit_offset(k, m);
        let w1 = boltzmann_weight_offsets(lambda, &zero, &kp, &nu, &kappa, xi23, params)?;
        let w2 = boltzmann_weight_offsets(lambda, &kp, &beta, &gamma, &nu, xi13, params)?;
        let w3 = boltzmann_weight_offsets(lambda, &zero, &alpha, &beta, &kp, xi12, params)?;
        let term = w1 * w2 * w3;
        scale = scale.max(term.norm());
        rhs += term;
    }
    Ok((lhs - rhs).norm() / scale.max(1e-300))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::Draws;

    fn params() -> ModularParams {
        ModularParams::new(C::new(0.2, 1.0), C::new(0.41421356237309515, 0.0)).unwrap()
    }

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn default_window_validates() {
        let p = params();
        let seq = WeightSequence::default_window(0, 3, &p).unwrap();
        assert!(validate_sequence(&seq, &p).is_empty());
        assert_eq!(seq.len(), 4);
        assert!((seq.value(2).re - 2.0 * DEFAULT_SPACING).abs() < 1e-15);
    }

    #[test]
    fn lattice_hit_is_reported() {
        let p = params();
        // lambda_1 - lambda_0 = mu: exact (m, n) = (0, 1) hit.
        let seq = WeightSequence::raw(0, 1, vec![c(0.0, 0.0), p.mu]);
        let v = validate_sequence(&seq, &p);
        assert!(v.iter().any(|x| x.i == 1 && x.j == 0 && x.m == 0 && x.n == 1));
        assert!(WeightSequence::new(0, 1, vec![c(0.0, 0.0), p.mu], &p).is_err());
    }

    #[test]
    fn near_integer_spacing_is_reported() {
        let p = params();
        let seq = WeightSequence::raw(0, 1, vec![c(0.0, 0.0), c(1.0 + 1e-9, 0.0)]);
        let v = validate_sequence(&seq, &p);
        assert!(v.iter().any(|x| x.m == 1 && x.n == 0 && x.margin < DELTA_GEN));
    }

    #[test]
    fn stepping_preserves_validity() {
        let p = params();
        let seq = WeightSequence::default_window(0, 3, &p).unwrap();
        let up = seq.stepped(1, StepDirection::Up, &p).unwrap();
        assert!((up.value(1) - (seq.value(1) + p.mu)).norm() < 1e-15);
        assert!((up.window_sum() - (seq.window_sum() + p.mu)).norm() < 1e-12);
        let down = seq.stepped(2, StepDirection::Down, &p).unwrap();
        assert!((down.value(2) - (seq.value(2) - p.mu)).norm() < 1e-15);
    }

    #[test]
    fn admissible_step_produces_validated_target() {
        let p = params();
        let seq = WeightSequence::default_window(0, 3, &p).unwrap();
        let step = AdmissibleStep::new(seq.clone(), 2, StepDirection::Up, &p).unwrap();
        let target = step.target(&p).unwrap();
        assert!((target.value(2) - (seq.value(2) + p.mu)).norm() < 1e-15);
        assert!(validate_sequence(&target, &p).is_empty());
        let down = AdmissibleStep::new(seq, 0, StepDirection::Down, &p).unwrap();
        assert!((down.target(&p).unwrap().value(0) - (-p.mu)).norm() < 1e-12);
    }

    #[test]
    fn weight_case_values_at_xi_zero() {
        let p = params();
        let seq = WeightSequence::default_window(0, 3, &p).unwrap();
        let d0 = theta1_deriv0(p.tau).unwrap();
        // case 2 at xi = 0 is theta1'(0)
        let f = FaceConfig::new(seq.clone(), 0, 0, 2);
        let w = boltzmann_weight(&f, c(0.0, 0.0), &p).unwrap();
        assert!((w - d0).norm() < 1e-12 * d0.norm());
        // case 3 at xi = 0 vanishes
        let f = FaceConfig::new(seq.clone(), 0, 2, 2);
        let w = boltzmann_weight(&f, c(0.0, 0.0), &p).unwrap();
        assert!(w.norm() < 1e-14);
        // case 1 at xi = 0 is theta1'(0)
        let f = FaceConfig::new(seq, 1, 1, 1);
        let w = boltzmann_weight(&f, c(0.0, 0.0), &p).unwrap();
        assert!((w - d0).norm() < 1e-12 * d0.norm());
    }

    #[test]
    fn non_admissible_quadruples_vanish() {
        let p = params();
        let seq = WeightSequence::default_window(0, 3, &p).unwrap();
        let k = seq.len();
        let zero = vec![0i32; k];
        let xi = c(0.3, 0.1);
        // nu != lambda + mu(e_i + e_j): right corner two steps in one slot
        // plus one in another.
        let mut bad_right = unit_offset(k, 0);
        bad_right[1] += 2;
        let w = boltzmann_weight_offsets(
            &seq,
            &zero,
            &unit_offset(k, 0),
            &bad_right,
            &unit_offset(k, 0),
            xi,
            &p,
        )
        .unwrap();
        assert_eq!(w, c(0.0, 0.0));
        // top not an admissible step
        let mut bad_top = unit_offset(k, 0);
        bad_top[2] += 1;
        let mut right = unit_offset(k, 0);
        right[1] += 1;
        let w = boltzmann_weight_offsets(&seq, &zero, &bad_top, &right, &unit_offset(k, 0), xi, &p)
            .unwrap();
        assert_eq!(w, c(0.0, 0.0));
        // exhaustive zero-support scan: top must be one of the two path
        // corners when i != j
        for jp in 0..k {
            let top = unit_offset(k, jp);
            let w = boltzmann_weight_offsets(&seq, &zero, &top, &right, &unit_offset(k, 0), xi, &p)
                .unwrap();
            if jp == 0 || jp == 1 {
                assert!(w.norm() > 1e-6, "admissible top {jp} must not vanish");
            } else {
                assert_eq!(w, c(0.0, 0.0), "non-admissible top {jp}");
            }
        }
    }

    #[test]
    fn star_triangle_distinct_steps() {
        let p = params();
        let seq = WeightSequence::default_window(0, 3, &p).unwrap();
        let mut draws = Draws::new(5);
        let (x1, x2, x3) = (
            draws.generic_xi(&p),
            draws.generic_xi(&p),
            draws.generic_xi(&p),
        );
        let r = star_triangle_residual(&seq, 0, 1, 2, 0, 0, x1, x2, x3, &p).unwrap();
        assert!(r < 1e-9, "residual {r}");
    }

    #[test]
    fn star_triangle_all_same_direction() {
        let p = params();
        let seq = WeightSequence::default_window(0, 3, &p).unwrap();
        let mut draws = Draws::new(6);
        let (x1, x2, x3) = (
            draws.generic_xi(&p),
            draws.generic_xi(&p),
            draws.generic_xi(&p),
        );
        // i = j = l: single case-1 path on each side.
        let r = star_triangle_residual(&seq, 1, 1, 1, 0, 0, x1, x2, x3, &p).unwrap();
        assert!(r < 1e-10, "residual {r}");
    }

    #[test]
    fn star_triangle_full_case_scan() {
        let p = params();
        let seq = WeightSequence::default_window(0, 3, &p).unwrap();
        let mut draws = Draws::new(7);
        let (x1, x2, x3) = (
            draws.generic_xi(&p),
            draws.generic_xi(&p),
            draws.generic_xi(&p),
        );
        let mut worst = 0.0f64;
        for a in 0..3 {
            for b in 0..3 {
                let r = star_triangle_residual(&seq, 0, 1, 3, a, b, x1, x2, x3, &p).unwrap();
                worst = worst.max(r);
            }
        }
        assert!(worst < 1e-9, "worst residual {worst}");
    }
}
