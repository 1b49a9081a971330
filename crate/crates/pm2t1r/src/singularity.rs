//! Velocity-level analysis: analytic Jacobians, a finite-difference
//! cross-check, and singularity classification.
//!
//! Differentiating the three loop-closure residuals gives
//! `A·t + B·ρ̇ = 0`, where `t = (ẏ, ż, β̇)` is the platform twist and
//! `ρ̇ = (ẏ1, ẏ2, ẏ3)` the slider rates. With the constraints ordered per
//! leg, `A` is lower triangular and `B` is diagonal, so both determinants
//! are plain diagonal products and the velocity solve is a forward
//! substitution.
//!
//! A vanishing diagonal of `B` is a serial singularity (an actuator loses
//! effect); a vanishing diagonal of `A` is a parallel singularity (the
//! platform gains uncontrolled motion). Near-zero is judged per row against
//! the row's own magnitude, since entries mix mm² and mm²·rad scales.

use crate::geometry::{GeometryParams, JointInput, PlatformPose};
use crate::kinematics::{KinematicsError, constraint_residuals};
use nalgebra::{Matrix3, Vector3};

/// Default relative tolerance for calling a diagonal factor zero.
pub const DEFAULT_CLASSIFY_EPS: f64 = 1e-9;

/// The two velocity Jacobians: `a` maps the platform twist, `b` the slider
/// rates. `a` is lower triangular and `b` diagonal by construction; the
/// finite-difference constructor fills the structurally-zero entries with
/// measured values instead (which should come out at rounding level).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobianPair {
    pub a: Matrix3<f64>,
    pub b: Matrix3<f64>,
}

impl JacobianPair {
    /// det(A) as the product of its diagonal (A is lower triangular).
    pub fn det_a(&self) -> f64 {
        self.a[(0, 0)] * self.a[(1, 1)] * self.a[(2, 2)]
    }

    /// det(B) as the product of its diagonal (B is diagonal).
    pub fn det_b(&self) -> f64 {
        self.b[(0, 0)] * self.b[(1, 1)] * self.b[(2, 2)]
    }

    /// Characteristic magnitude of constraint row `i`: the largest entry of
    /// that row across both matrices. Used to make zero tests relative.
    pub fn row_scale(&self, i: usize) -> f64 {
        (0..3).fold(0.0f64, |acc, j| {
            acc.max(self.a[(i, j)].abs()).max(self.b[(i, j)].abs())
        })
    }

    /// Smallest row-scaled diagonal magnitude of B: distance from a serial
    /// singularity (0 = singular, larger = better conditioned).
    pub fn serial_margin(&self) -> f64 {
        (0..3)
            .map(|i| self.scaled_diag(self.b[(i, i)], i))
            .fold(f64::INFINITY, f64::min)
    }

    /// Smallest row-scaled diagonal magnitude of A: distance from a
    /// parallel singularity.
    pub fn parallel_margin(&self) -> f64 {
        (0..3)
            .map(|i| self.scaled_diag(self.a[(i, i)], i))
            .fold(f64::INFINITY, f64::min)
    }

    fn scaled_diag(&self, diag: f64, i: usize) -> f64 {
        let scale = self.row_scale(i);
        if scale == 0.0 { 0.0 } else { diag.abs() / scale }
    }
}

/// Serial (B-side) singular factors, named by matrix entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SerialCase {
    G11,
    G22,
    G33,
}

impl SerialCase {
    pub fn describe(&self) -> &'static str {
        match self {
            SerialCase::G11 => "slider 1 loses effect: the platform sits directly over it",
            SerialCase::G22 => "slider 2 loses effect: leg 2 is vertical (y2 = y + l3)",
            SerialCase::G33 => {
                "slider 3 loses effect: the parallelogram corner is level with the arm tip (z_c3 = z_F)"
            }
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            SerialCase::G11 => "g11",
            SerialCase::G22 => "g22",
            SerialCase::G33 => "g33",
        }
    }
}

/// Parallel (A-side) singular factors, named by matrix entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParallelCase {
    F11,
    F22,
    F33,
}

impl ParallelCase {
    pub fn describe(&self) -> &'static str {
        match self {
            ParallelCase::F11 => "uncontrolled y motion: the platform sits directly over slider 1",
            ParallelCase::F22 => "uncontrolled z motion: leg 2 lies level with the post tops (z = l1)",
            ParallelCase::F33 => {
                "uncontrolled tilt: the coupler and the arm are aligned (tan \u{3b2} = (z_c3 - z)/(2a))"
            }
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            ParallelCase::F11 => "f11",
            ParallelCase::F22 => "f22",
            ParallelCase::F33 => "f33",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularityKind {
    Regular,
    Serial,
    Parallel,
    Both,
}

/// Classification of one configuration: which diagonal factors vanished.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularityClass {
    pub kind: SingularityKind,
    pub serial_cases: Vec<SerialCase>,
    pub parallel_cases: Vec<ParallelCase>,
}

#[derive(Debug, thiserror::Error)]
pub enum SingularityError {
    #[error("A is singular at row {row} ({hint}); the platform twist is undefined")]
    Singular { row: usize, hint: &'static str },
    #[error(transparent)]
    Kinematics(#[from] KinematicsError),
}

const PARALLEL_HINTS: [&str; 3] = [
    "the platform y-offset from slider 1 vanished",
    "leg 2 lies level with the post tops (z = l1)",
    "the coupler and the arm are aligned",
];

/// Builds both Jacobians from the closed-form entry formulas.
///
/// `n_sign` selects the corner-height branch, which multiplies the radical
/// terms in the third row. The identities `g11 = -f11`, `g22 = -f21`,
/// `g33 = -f31` are used verbatim so they hold bit-exactly.
///
/// # Errors
///
/// [`KinematicsError::Domain`] when |y − y3| ≥ l5: the third-row entries
/// divide by √(l5² − (y − y3)²), which is itself a fold boundary of leg 3.
pub fn analytic_jacobians(
    p: &GeometryParams,
    pose: PlatformPose,
    joints: JointInput,
    n_sign: i8,
) -> Result<JacobianPair, KinematicsError> {
    if n_sign.abs() != 1 {
        return Err(KinematicsError::InvalidBranch(n_sign, 1, 1));
    }
    let off = pose.y - joints.y3;
    let rad = p.l5 * p.l5 - off * off;
    if rad <= 0.0 {
        return Err(KinematicsError::Domain(format!(
            "|y - y3| = {} reaches l5 = {}: leg-3 fold boundary, third-row entries blow up",
            off.abs(),
            p.l5
        )));
    }
    let root = rad.sqrt();
    let n = n_sign as f64;
    let z_c3 = p.l1 + n * root;
    let z_f = pose.z + p.l7 * pose.beta.sin();
    let dz = z_c3 - z_f;
    let (sin_b, cos_b) = pose.beta.sin_cos();

    let f11 = 2.0 * (pose.y - joints.y1);
    let f21 = 2.0 * (pose.y + p.l3 - joints.y2);
    let f22 = 2.0 * (pose.z - p.l1);
    let f31 = 2.0 * dz * n * (joints.y3 - pose.y) / root;
    let f32 = -2.0 * dz;
    let f33 = 2.0 * p.l7 * sin_b * (2.0 * p.a - p.l7 * cos_b) - 2.0 * p.l7 * cos_b * dz;

    let a = Matrix3::new(
        f11, 0.0, 0.0, //
        f21, f22, 0.0, //
        f31, f32, f33,
    );
    let b = Matrix3::new(
        -f11, 0.0, 0.0, //
        0.0, -f21, 0.0, //
        0.0, 0.0, -f31,
    );
    Ok(JacobianPair { a, b })
}

/// Rebuilds both Jacobians by central differences of the residuals, as an
/// independent check on the analytic entries.
///
/// Every entry is measured, including the structurally-zero ones, so the
/// returned `b` is only numerically diagonal.
///
/// # Errors
///
/// As [`analytic_jacobians`], plus the same domain error if a perturbed
/// state steps over the leg-3 fold boundary.
pub fn fd_jacobians(
    p: &GeometryParams,
    pose: PlatformPose,
    joints: JointInput,
    n_sign: i8,
    h: f64,
) -> Result<JacobianPair, KinematicsError> {
    if !(h > 0.0) {
        return Err(KinematicsError::Domain(format!(
            "finite-difference step must be positive (got {h})"
        )));
    }
    let mut a = Matrix3::zeros();
    let mut b = Matrix3::zeros();
    for j in 0..3 {
        let shift = |d: f64| -> Result<[f64; 3], KinematicsError> {
            let mut pp = pose;
            match j {
                0 => pp.y += d,
                1 => pp.z += d,
                _ => pp.beta += d,
            }
            constraint_residuals(p, pp, joints, n_sign)
        };
        let plus = shift(h)?;
        let minus = shift(-h)?;
        for i in 0..3 {
            a[(i, j)] = (plus[i] - minus[i]) / (2.0 * h);
        }

        let shift = |d: f64| -> Result<[f64; 3], KinematicsError> {
            let mut jj = joints;
            match j {
                0 => jj.y1 += d,
                1 => jj.y2 += d,
                _ => jj.y3 += d,
            }
            constraint_residuals(p, pose, jj, n_sign)
        };
        let plus = shift(h)?;
        let minus = shift(-h)?;
        for i in 0..3 {
            b[(i, j)] = (plus[i] - minus[i]) / (2.0 * h);
        }
    }
    Ok(JacobianPair { a, b })
}

/// Flags the diagonal factors of both Jacobians that are near zero relative
/// to their row scale, and names the resulting configuration kind.
pub fn classify_configuration(j: &JacobianPair, eps: f64) -> SingularityClass {
    let serial_names = [SerialCase::G11, SerialCase::G22, SerialCase::G33];
    let parallel_names = [ParallelCase::F11, ParallelCase::F22, ParallelCase::F33];
    let mut serial_cases = Vec::new();
    let mut parallel_cases = Vec::new();
    for i in 0..3 {
        let scale = j.row_scale(i);
        let near = |v: f64| v.abs() <= eps * scale;
        if near(j.b[(i, i)]) {
            serial_cases.push(serial_names[i]);
        }
        if near(j.a[(i, i)]) {
            parallel_cases.push(parallel_names[i]);
        }
    }
    let kind = match (!serial_cases.is_empty(), !parallel_cases.is_empty()) {
        (false, false) => SingularityKind::Regular,
        (true, false) => SingularityKind::Serial,
        (false, true) => SingularityKind::Parallel,
        (true, true) => SingularityKind::Both,
    };
    SingularityClass {
        kind,
        serial_cases,
        parallel_cases,
    }
}

/// Solves `A·t = −B·ρ̇` for the platform twist by forward substitution.
///
/// # Errors
///
/// [`SingularityError::Singular`] when a diagonal of A is at or below the
/// row-scaled tolerance — the configuration is parallel-singular and the
/// twist is undefined.
pub fn platform_velocity(
    j: &JacobianPair,
    joint_rates: Vector3<f64>,
) -> Result<Vector3<f64>, SingularityError> {
    let rhs = -(j.b * joint_rates);
    let mut t = Vector3::zeros();
    for i in 0..3 {
        let diag = j.a[(i, i)];
        let scale = j.row_scale(i);
        if scale == 0.0 || diag.abs() <= DEFAULT_CLASSIFY_EPS * scale {
            return Err(SingularityError::Singular {
                row: i,
                hint: PARALLEL_HINTS[i],
            });
        }
        let mut acc = rhs[i];
        for k in 0..i {
            acc -= j.a[(i, k)] * t[k];
        }
        t[i] = acc / diag;
    }
    Ok(t)
}
