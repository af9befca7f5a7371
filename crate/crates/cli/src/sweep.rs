//! Residual-vs-parameter sweeps: re-run a suite over a grid of one
//! parameter, producing one row per grid point. Forbidden grid points
//! (spectral parameter on the period lattice, non-generic mu) are marked
//! skipped with a reason instead of failing the whole sweep.

use ellrop::theta::{dist_to_lattice, DELTA_GEN};
use num_complex::Complex64;

use crate::config::{ComplexField, SuiteConfig, SweepParam};
use crate::report::SweepRow;
use crate::suites::SuiteRunner;

pub fn run_sweep(
    cfg: &SuiteConfig,
    param: SweepParam,
    grid: &[f64],
) -> Result<Vec<SweepRow>, crate::suites::SuiteError> {
    let mut rows = Vec::with_capacity(grid.len());
    let name = match param {
        SweepParam::Xi => "xi",
        SweepParam::Mu => "mu",
        SweepParam::TauImag => "tau-imag",
    };
    for &value in grid {
        let mut point_cfg = cfg.clone();
        match param {
            SweepParam::Xi => {
                let tau: Complex64 = cfg.tau.into();
                let xi = Complex64::new(value, 0.0);
                if dist_to_lattice(xi, tau) <= DELTA_GEN {
                    rows.push(SweepRow {
                        param: name.into(),
                        value,
                        max_residual: f64::NAN,
                        pass: "skipped".into(),
                        reason: Some("xi on the period lattice".into()),
                    });
                    continue;
                }
                point_cfg.xi = vec![ComplexField(value, 0.0)];
            }
            SweepParam::Mu => {
                point_cfg.mu = ComplexField(value, 0.0);
            }
            SweepParam::TauImag => {
                if value <= 0.0 {
                    rows.push(SweepRow {
                        param: name.into(),
                        value,
                        max_residual: f64::NAN,
                        pass: "skipped".into(),
                        reason: Some("Im(tau) must be positive".into()),
                    });
                    continue;
                }
                point_cfg.tau = ComplexField(cfg.tau.0, value);
            }
        }
        match SuiteRunner::new(&point_cfg) {
            Ok(runner) => {
                let checks = runner.run();
                let max_residual = checks
                    .iter()
                    .map(|c| c.residual)
                    .fold(0.0f64, |m, r| if r.is_finite() { m.max(r) } else { f64::INFINITY });
                let pass = checks.iter().all(|c| c.pass);
                rows.push(SweepRow {
                    param: name.into(),
                    value,
                    max_residual,
                    pass: pass.to_string(),
                    reason: None,
                });
            }
            Err(e) => rows.push(SweepRow {
                param: name.into(),
                value,
                max_residual: f64::NAN,
                pass: "skipped".into(),
                reason: Some(e.to_string()),
            }),
        }
    }
    Ok(rows)
}
