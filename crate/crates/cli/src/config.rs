//! Suite configuration: JSON file fields with CLI flags layered on top.
//! Complex numbers are serialized as two-element [re, im] arrays
//! everywhere.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub const DEFAULT_TAU: (f64, f64) = (0.2, 1.0);
pub const DEFAULT_MU: f64 = 0.41421356237309515;
pub const DEFAULT_WINDOW: (i32, i32) = (0, 3);
pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexField(pub f64, pub f64);

impl From<ComplexField> for Complex64 {
    fn from(c: ComplexField) -> Self {
        Complex64::new(c.0, c.1)
    }
}

impl From<Complex64> for ComplexField {
    fn from(z: Complex64) -> Self {
        ComplexField(z.re, z.im)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepParam {
    Xi,
    Mu,
    TauImag,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaSource {
    #[default]
    Default,
    Explicit(Vec<ComplexField>),
}

/// All knobs of a verification run. Every field has a default, so a config
/// file may specify any subset.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub suite: String,
    pub tau: ComplexField,
    pub mu: ComplexField,
    pub window: (i32, i32),
    pub k: Option<usize>,
    pub lambda: LambdaSource,
    /// Explicit spectral parameters; when empty, `draws` seeded values are
    /// used instead.
    pub xi: Vec<ComplexField>,
    pub draws: usize,
    pub seed: u64,
    pub tol: f64,
    pub out: Option<String>,
    pub format: OutputFormat,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            suite: "all".into(),
            tau: ComplexField(DEFAULT_TAU.0, DEFAULT_TAU.1),
            mu: ComplexField(DEFAULT_MU, 0.0),
            window: DEFAULT_WINDOW,
            k: None,
            lambda: LambdaSource::Default,
            xi: Vec::new(),
            draws: 5,
            seed: DEFAULT_SEED,
            tol: DEFAULT_TOL,
            out: None,
            format: OutputFormat::Json,
        }
    }
}

pub const SUITES: &[&str] = &[
    "theta",
    "ybe-pointwise",
    "subspace",
    "belavin-props",
    "ybe-matrix",
    "irf-star-triangle",
    "vertex-irf",
    "duality",
    "weyl-kac",
    "exchange",
    "rll",
    "belavin-vertex-irf",
    "belavin-rll",
    "all",
];

/// Parse "RE", "RE+IMi" or "RE-IMi" into a complex number.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let t = s.trim();
    if let Ok(re) = t.parse::<f64>() {
        return Ok(Complex64::new(re, 0.0));
    }
    let Some(body) = t.strip_suffix(['i', 'j']) else {
        return Err(format!("cannot parse complex number from {s:?}"));
    };
    // split at the sign of the imaginary part (skipping a leading sign and
    // exponent signs)
    let bytes = body.as_bytes();
    let mut split = None;
    for idx in (1..bytes.len()).rev() {
        let b = bytes[idx];
        if (b == b'+' || b == b'-') && !matches!(bytes[idx - 1], b'e' | b'E') {
            split = Some(idx);
            break;
        }
    }
    let Some(idx) = split else {
        // pure imaginary "IMi"
        return body
            .parse::<f64>()
            .map(|im| Complex64::new(0.0, im))
            .map_err(|_| format!("cannot parse complex number from {s:?}"));
    };
    let re: f64 = body[..idx]
        .parse()
        .map_err(|_| format!("bad real part in {s:?}"))?;
    let im_str = &body[idx..];
    let im: f64 = if im_str == "+" {
        1.0
    } else if im_str == "-" {
        -1.0
    } else {
        im_str.parse().map_err(|_| format!("bad imaginary part in {s:?}"))?
    };
    Ok(Complex64::new(re, im))
}
