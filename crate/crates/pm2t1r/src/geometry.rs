//! Mechanism dimensions, motion coordinates, and parameter validation.
//!
//! Units are millimetres for lengths and radians for angles throughout. The
//! base frame puts y along the rails, z vertical, and x across the rails, so
//! the two rails run at x = ±a in the z = 0 plane.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

/// Fixed link dimensions, millimetres.
///
/// `a` is half the rail spacing. `l1` is the slider post height, `l2` the
/// leg-1 bar length, `l3` the platform half-length (D–E and E–C2), `l4` the
/// leg-2 rod, `l5` the parallelogram bar, `l6` the coupler C3–F, and `l7` the
/// platform arm E–F. `l0` (post base offset) and `l8` (platform plate width)
/// are carried for completeness but do not enter the kinematic equations;
/// zero means unspecified.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometryParams {
    pub a: f64,
    pub l0: f64,
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
    pub l4: f64,
    pub l5: f64,
    pub l6: f64,
    pub l7: f64,
    pub l8: f64,
}

/// Actuated slider positions along the rails, millimetres.
///
/// `y1` and `y2` ride the near rail (x = +a), `y3` the far rail (x = −a).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointInput {
    pub y1: f64,
    pub y2: f64,
    pub y3: f64,
}

/// Platform output coordinates: translation of the reference point E and
/// rotation about the platform's y-directed axis.
///
/// Poses produced by the solvers have `beta` normalized to (−π, π].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlatformPose {
    pub y: f64,
    pub z: f64,
    pub beta: f64,
}

impl PlatformPose {
    /// Returns the pose with `beta` wrapped into (−π, π].
    pub fn normalized(self) -> Self {
        Self {
            beta: normalize_angle(self.beta),
            ..self
        }
    }
}

/// Wraps an angle into (−π, π].
pub fn normalize_angle(mut t: f64) -> f64 {
    use std::f64::consts::PI;
    while t > PI {
        t -= 2.0 * PI;
    }
    while t <= -PI {
        t += 2.0 * PI;
    }
    t
}

impl GeometryParams {
    /// The bundled reference design used by the examples and tests:
    /// a = 300, l1 = 100, l2 = 200, l3 = 160, l4 = 400, l5 = 320, l6 = 240,
    /// l7 = 500 (mm). The inert offsets l0 and l8 are left unspecified.
    pub fn reference() -> Self {
        Self {
            a: 300.0,
            l0: 0.0,
            l1: 100.0,
            l2: 200.0,
            l3: 160.0,
            l4: 400.0,
            l5: 320.0,
            l6: 240.0,
            l7: 500.0,
            l8: 0.0,
        }
    }

    /// Loads parameters from a JSON object with keys `"a"`, `"l0"`…`"l8"`.
    ///
    /// `l0` and `l8` may be omitted; they default to 0 and produce a warning
    /// string. Unknown keys are warned about and ignored.
    ///
    /// # Errors
    ///
    /// Returns [`GeometryError::Parse`] for malformed JSON or non-numeric
    /// values and [`GeometryError::MissingKey`] when a kinematic length is
    /// absent.
    pub fn from_json_str(s: &str) -> Result<(Self, Vec<String>), GeometryError> {
        let raw: BTreeMap<String, serde_json::Value> =
            serde_json::from_str(s).map_err(|e| GeometryError::Parse(e.to_string()))?;
        let mut fields = BTreeMap::new();
        let mut warnings = Vec::new();
        for (key, value) in &raw {
            if !KEYS.contains(&key.as_str()) {
                warnings.push(format!("unknown key `{key}` ignored"));
                continue;
            }
            let num = value
                .as_f64()
                .ok_or_else(|| GeometryError::Parse(format!("key `{key}` is not a number")))?;
            fields.insert(key.clone(), num);
        }
        let mut get = |key: &str, optional: bool| -> Result<f64, GeometryError> {
            match fields.get(key) {
                Some(v) => Ok(*v),
                None if optional => {
                    warnings.push(format!("key `{key}` missing, defaulting to 0"));
                    Ok(0.0)
                }
                None => Err(GeometryError::MissingKey(key.to_owned())),
            }
        };
        let params = Self {
            a: get("a", false)?,
            l0: get("l0", true)?,
            l1: get("l1", false)?,
            l2: get("l2", false)?,
            l3: get("l3", false)?,
            l4: get("l4", false)?,
            l5: get("l5", false)?,
            l6: get("l6", false)?,
            l7: get("l7", false)?,
            l8: get("l8", true)?,
        };
        Ok((params, warnings))
    }

    /// Loads parameters from a JSON file; see [`Self::from_json_str`].
    pub fn from_json_file(path: &Path) -> Result<(Self, Vec<String>), GeometryError> {
        let text = std::fs::read_to_string(path).map_err(|e| GeometryError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        Self::from_json_str(&text)
    }
}

const KEYS: [&str; 10] = ["a", "l0", "l1", "l2", "l3", "l4", "l5", "l6", "l7", "l8"];

#[derive(Debug, thiserror::Error)]
pub enum GeometryError {
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid parameter file: {0}")]
    Parse(String),
    #[error("missing required key `{0}`")]
    MissingKey(String),
}

/// How bad a validation finding is: `Fatal` parameters poison the arithmetic
/// (non-positive lengths), `Advisory` ones merely shrink or empty parts of
/// the workspace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Fatal,
    Advisory,
}

#[derive(Debug, Clone)]
pub struct Violation {
    pub severity: Severity,
    pub message: String,
}

/// Outcome of [`validate_params`]; empty means nothing to report.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has_fatal(&self) -> bool {
        self.violations
            .iter()
            .any(|v| v.severity == Severity::Fatal)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "parameters valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let tag = match v.severity {
                Severity::Fatal => "fatal",
                Severity::Advisory => "advisory",
            };
            write!(f, "{tag}: {}", v.message)?;
        }
        Ok(())
    }
}

/// Checks a parameter set for self-consistency. Construction never enforces
/// these rules; call this before trusting downstream results.
///
/// Fatal findings: any of `a`, `l1`…`l7` not strictly positive, or a
/// negative `l0`/`l8`. Advisory findings: `l4 < l1` (leg 2 can never stretch
/// down to the rail plane z = 0) and `l6 < |2a − l7|` (the coupler cannot
/// close the loop at β = 0).
pub fn validate_params(p: &GeometryParams) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut fatal = |msg: String| {
        report.violations.push(Violation {
            severity: Severity::Fatal,
            message: msg,
        });
    };
    for (name, value) in [
        ("a", p.a),
        ("l1", p.l1),
        ("l2", p.l2),
        ("l3", p.l3),
        ("l4", p.l4),
        ("l5", p.l5),
        ("l6", p.l6),
        ("l7", p.l7),
    ] {
        if !(value > 0.0) {
            fatal(format!("length `{name}` must be strictly positive (got {value})"));
        }
    }
    for (name, value) in [("l0", p.l0), ("l8", p.l8)] {
        if !(value >= 0.0) {
            fatal(format!("offset `{name}` must be non-negative (got {value})"));
        }
    }
    let mut advisory = |msg: String| {
        report.violations.push(Violation {
            severity: Severity::Advisory,
            message: msg,
        });
    };
    if p.l4 < p.l1 {
        advisory(format!(
            "l4 = {} is shorter than the post height l1 = {}: leg 2 cannot reach the rail plane z = 0",
            p.l4, p.l1
        ));
    }
    if p.l6 < (2.0 * p.a - p.l7).abs() {
        advisory(format!(
            "l6 = {} is shorter than |2a - l7| = {}: the coupler cannot close the loop at beta = 0",
            p.l6,
            (2.0 * p.a - p.l7).abs()
        ));
    }
    report
}
