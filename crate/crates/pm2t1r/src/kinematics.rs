//! Closed-form forward and inverse kinematics.
//!
//! Both directions reduce to chains of square roots plus one half-angle
//! arctangent, each with a sign choice, giving eight solution branches per
//! direction. A branch whose radicand goes negative is not an error: the
//! chain is carried through complex arithmetic (principal roots, `+i√|r|`
//! for negative real radicands) and the solution reports its imaginary
//! parts, so callers can distinguish "assemblable" from "algebraic only".
//!
//! Structure of the forward chain, for slider inputs (y1, y2, y3):
//!
//! * y follows y1 rigidly: `y = y1 + l3`;
//! * z comes from the leg-2 rod: `z = l1 + m·√(l4² − (y1 + 2l3 − y2)²)`;
//! * the leg-3 corner height is `z_c3 = l1 + n·√(l5² − (y1 + l3 − y3)²)`;
//! * β closes the coupler loop through a tangent half-angle with sign q.
//!
//! The inverse chain mirrors it with signs (u, v, w) for y2, y3 and the
//! intermediate corner height respectively. The decoupled shape of the
//! forward chain means y depends only on y1, and z only on (y1, y2).

use crate::geometry::{GeometryParams, JointInput, PlatformPose, normalize_angle};
use nalgebra::Vector3;
use num_complex::Complex64;
use std::fmt;
use std::str::FromStr;

/// Imaginary parts at or below this magnitude classify a solution as real.
pub const EPS_REAL: f64 = 1e-9;

/// Relative threshold under which the half-angle fraction 0/0 is declared
/// degenerate rather than evaluated.
const EPS_DEGENERATE: f64 = 1e-12;

/// A sign triple selecting one of the eight solution branches.
///
/// Forward solutions read it as (m, n, q): z root, corner-height root,
/// half-angle root. Inverse solutions read it as (u, v, w): y2 root, y3
/// root, corner-height root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BranchSelector {
    pub s1: i8,
    pub s2: i8,
    pub s3: i8,
}

impl BranchSelector {
    /// All eight branches, lexicographic with +1 ordered before −1.
    pub const ALL: [BranchSelector; 8] = [
        BranchSelector { s1: 1, s2: 1, s3: 1 },
        BranchSelector { s1: 1, s2: 1, s3: -1 },
        BranchSelector { s1: 1, s2: -1, s3: 1 },
        BranchSelector { s1: 1, s2: -1, s3: -1 },
        BranchSelector { s1: -1, s2: 1, s3: 1 },
        BranchSelector { s1: -1, s2: 1, s3: -1 },
        BranchSelector { s1: -1, s2: -1, s3: 1 },
        BranchSelector { s1: -1, s2: -1, s3: -1 },
    ];

    /// Builds a selector, rejecting anything other than ±1 components.
    pub fn new(s1: i8, s2: i8, s3: i8) -> Result<Self, KinematicsError> {
        if [s1, s2, s3].iter().all(|s| s.abs() == 1) {
            Ok(Self { s1, s2, s3 })
        } else {
            Err(KinematicsError::InvalidBranch(s1, s2, s3))
        }
    }
}

impl fmt::Display for BranchSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+},{:+},{:+}", self.s1, self.s2, self.s3)
    }
}

impl FromStr for BranchSelector {
    type Err = KinematicsError;

    /// Parses `"+1,-1,+1"` (the explicit plus is optional).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = || -> Option<Self> {
            let mut parts = s.split(',').map(|t| t.trim().parse::<i8>().ok());
            let triple = (parts.next()??, parts.next()??, parts.next()??);
            if parts.next().is_some() {
                return None;
            }
            Self::new(triple.0, triple.1, triple.2).ok()
        };
        parse().ok_or_else(|| KinematicsError::BranchParse(s.to_owned()))
    }
}

/// One branch's solution, with real and imaginary parts split out.
///
/// For forward solutions `values` is (y, z, β); for inverse solutions it is
/// (y1, y2, y3). `is_real` holds exactly when every `imag` magnitude is at
/// most [`EPS_REAL`]. `degenerate` marks a forward branch whose half-angle
/// was 0/0 (β undetermined); its β entries are NaN.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KinematicSolution {
    pub values: [f64; 3],
    pub imag: [f64; 3],
    pub branch: BranchSelector,
    pub is_real: bool,
    pub degenerate: bool,
}

impl KinematicSolution {
    /// Reads a forward solution as a pose. Check `is_real` first; the
    /// imaginary parts are dropped.
    pub fn pose(&self) -> PlatformPose {
        PlatformPose {
            y: self.values[0],
            z: self.values[1],
            beta: self.values[2],
        }
    }

    /// Reads an inverse solution as slider positions. Check `is_real` first.
    pub fn joints(&self) -> JointInput {
        JointInput {
            y1: self.values[0],
            y2: self.values[1],
            y3: self.values[2],
        }
    }

    /// Largest imaginary magnitude across the three components.
    pub fn max_imag(&self) -> f64 {
        self.imag.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum KinematicsError {
    #[error("branch signs must be +1 or -1 (got {0},{1},{2})")]
    InvalidBranch(i8, i8, i8),
    #[error("cannot parse branch `{0}`: expected three comma-separated signs, e.g. +1,-1,+1")]
    BranchParse(String),
    #[error("half-angle numerator and denominator both vanish: the tilt is undetermined here")]
    DegenerateHalfAngle,
    #[error("{0}")]
    Domain(String),
    #[error("solution is not real: mechanism points exist only for assemblable configurations")]
    NotReal,
}

/// Principal square root of a real radicand: real for r ≥ 0, `+i√|r|`
/// otherwise (with an exactly zero counterpart component).
fn sqrt_radicand(r: f64) -> Complex64 {
    if r >= 0.0 {
        Complex64::new(r.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-r).sqrt())
    }
}

/// Principal square root of a complex value, routing exactly-real inputs
/// through [`sqrt_radicand`] to keep their zero components exact.
fn csqrt(z: Complex64) -> Complex64 {
    if z.im == 0.0 {
        sqrt_radicand(z.re)
    } else {
        z.sqrt()
    }
}

fn solution(re: [f64; 3], im: [f64; 3], branch: BranchSelector) -> KinematicSolution {
    let is_real = im.iter().all(|v| v.abs() <= EPS_REAL);
    KinematicSolution {
        values: re,
        imag: im,
        branch,
        is_real,
        degenerate: false,
    }
}

/// Solves the forward problem for one branch (m, n, q) = (s1, s2, s3).
///
/// # Errors
///
/// [`KinematicsError::DegenerateHalfAngle`] when the half-angle fraction is
/// 0/0, which leaves β undetermined. Negative radicands are not errors; they
/// yield a complex (non-`is_real`) solution.
pub fn fk_branch(
    p: &GeometryParams,
    joints: JointInput,
    branch: BranchSelector,
) -> Result<KinematicSolution, KinematicsError> {
    let (m, n, q) = (branch.s1 as f64, branch.s2 as f64, branch.s3 as f64);
    let y = joints.y1 + p.l3;

    let off_z = joints.y1 + 2.0 * p.l3 - joints.y2;
    let rad_z = p.l4 * p.l4 - off_z * off_z;
    let z = Complex64::new(p.l1, 0.0) + m * sqrt_radicand(rad_z);

    let off_c = joints.y1 + p.l3 - joints.y3;
    let rad_c = p.l5 * p.l5 - off_c * off_c;
    let z_c3 = Complex64::new(p.l1, 0.0) + n * sqrt_radicand(rad_c);

    let delta = z - z_c3;
    let big_a = 2.0 * delta * p.l7;
    let big_b = -4.0 * p.a * p.l7;
    let big_c = Complex64::new(p.l6 * p.l6 - 4.0 * p.a * p.a - p.l7 * p.l7, 0.0) - delta * delta;
    let disc = big_a * big_a + Complex64::new(big_b * big_b, 0.0) - big_c * big_c;

    let num = big_a + q * csqrt(disc);
    let den = Complex64::new(big_b, 0.0) + big_c;
    let scale = big_a.norm() + big_b.abs() + big_c.norm() + disc.norm().sqrt();
    if num.norm() <= EPS_DEGENERATE * scale && den.norm() <= EPS_DEGENERATE * scale {
        return Err(KinematicsError::DegenerateHalfAngle);
    }

    let chain_real = rad_z >= 0.0 && rad_c >= 0.0 && disc.im == 0.0 && disc.re >= 0.0;
    let beta = if chain_real {
        Complex64::new(normalize_angle(2.0 * f64::atan2(num.re, den.re)), 0.0)
    } else if den.norm() == 0.0 {
        // The fraction blows up: the half-angle tangent is at its pole.
        Complex64::new(std::f64::consts::PI, 0.0)
    } else {
        2.0 * (num / den).atan()
    };

    Ok(solution(
        [y, z.re, beta.re],
        [0.0, z.im, beta.im],
        branch,
    ))
}

/// Solves all eight forward branches in lexicographic order (+1 before −1).
///
/// A degenerate half-angle does not abort the enumeration: the affected
/// branch comes back with `degenerate = true` and NaN tilt entries.
pub fn fk_enumerate(p: &GeometryParams, joints: JointInput) -> Vec<KinematicSolution> {
    BranchSelector::ALL
        .iter()
        .map(|&b| {
            fk_branch(p, joints, b).unwrap_or_else(|_| {
                let y = joints.y1 + p.l3;
                let off_z = joints.y1 + 2.0 * p.l3 - joints.y2;
                let z = Complex64::new(p.l1, 0.0)
                    + (b.s1 as f64) * sqrt_radicand(p.l4 * p.l4 - off_z * off_z);
                KinematicSolution {
                    values: [y, z.re, f64::NAN],
                    imag: [0.0, z.im, f64::NAN],
                    branch: b,
                    is_real: false,
                    degenerate: true,
                }
            })
        })
        .collect()
}

/// Solves the inverse problem for one branch (u, v, w) = (s1, s2, s3).
///
/// Never fails: branches that cannot assemble come back complex.
pub fn ik_branch(p: &GeometryParams, pose: PlatformPose, branch: BranchSelector) -> KinematicSolution {
    let (u, v, w) = (branch.s1 as f64, branch.s2 as f64, branch.s3 as f64);
    let y1 = pose.y - p.l3;

    let rad2 = p.l4 * p.l4 - (pose.z - p.l1) * (pose.z - p.l1);
    let y2 = Complex64::new(pose.y + p.l3, 0.0) + u * sqrt_radicand(rad2);

    let gap = 2.0 * p.a - p.l7 * pose.beta.cos();
    let rad_w = p.l6 * p.l6 - gap * gap;
    let z_c3 = Complex64::new(pose.z + p.l7 * pose.beta.sin(), 0.0) + w * sqrt_radicand(rad_w);

    let dz = z_c3 - Complex64::new(p.l1, 0.0);
    let rad3 = Complex64::new(p.l5 * p.l5, 0.0) - dz * dz;
    let y3 = Complex64::new(pose.y, 0.0) + v * csqrt(rad3);

    solution([y1, y2.re, y3.re], [0.0, y2.im, y3.im], branch)
}

/// Solves all eight inverse branches in lexicographic order (+1 before −1).
pub fn ik_enumerate(p: &GeometryParams, pose: PlatformPose) -> Vec<KinematicSolution> {
    BranchSelector::ALL
        .iter()
        .map(|&b| ik_branch(p, pose, b))
        .collect()
}

/// Evaluates the three loop-closure residuals (mm²) for a pose/joint pair.
///
/// A consistent, assemblable state zeroes all three:
///
/// * `f1 = (y − y1)² − l3²`
/// * `f2 = (y + l3 − y2)² + (z − l1)² − l4²`
/// * `f3 = (2a − l7·cos β)² + (z_c3 − z_F)² − l6²`, where
///   `z_F = z + l7·sin β` and `z_c3` is reconstructed on the branch given by
///   `n_sign`.
///
/// # Errors
///
/// [`KinematicsError::Domain`] when |y − y3| > l5 (the corner height does
/// not exist) or `n_sign` is not ±1.
pub fn constraint_residuals(
    p: &GeometryParams,
    pose: PlatformPose,
    joints: JointInput,
    n_sign: i8,
) -> Result<[f64; 3], KinematicsError> {
    let z_c3 = corner_height(p, pose.y, joints.y3, n_sign)?;
    let f1 = (pose.y - joints.y1).powi(2) - p.l3 * p.l3;
    let f2 = (pose.y + p.l3 - joints.y2).powi(2) + (pose.z - p.l1).powi(2) - p.l4 * p.l4;
    let gap = 2.0 * p.a - p.l7 * pose.beta.cos();
    let z_f = pose.z + p.l7 * pose.beta.sin();
    let f3 = gap * gap + (z_c3 - z_f).powi(2) - p.l6 * p.l6;
    Ok([f1, f2, f3])
}

/// Leg-3 corner height `z_c3 = l1 + n·√(l5² − (y − y3)²)`.
pub(crate) fn corner_height(
    p: &GeometryParams,
    y: f64,
    y3: f64,
    n_sign: i8,
) -> Result<f64, KinematicsError> {
    if n_sign.abs() != 1 {
        return Err(KinematicsError::InvalidBranch(n_sign, 1, 1));
    }
    let off = y - y3;
    let rad = p.l5 * p.l5 - off * off;
    if rad < 0.0 {
        return Err(KinematicsError::Domain(format!(
            "|y - y3| = {} exceeds l5 = {}: the leg-3 corner height does not exist",
            off.abs(),
            p.l5
        )));
    }
    Ok(p.l1 + (n_sign as f64) * rad.sqrt())
}

/// Cartesian positions of the named mechanism points for a real forward
/// solution, plus the leg-3 corner height.
///
/// A1/A2/A3 are the sliders, B1/B2/B3 the post tops, D–E–C2 the platform
/// segment, C3 the parallelogram corner, and F the arm tip.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MechanismPoints {
    pub a1: Vector3<f64>,
    pub a2: Vector3<f64>,
    pub a3: Vector3<f64>,
    pub b1: Vector3<f64>,
    pub b2: Vector3<f64>,
    pub b3: Vector3<f64>,
    pub c2: Vector3<f64>,
    pub c3: Vector3<f64>,
    pub d: Vector3<f64>,
    pub e: Vector3<f64>,
    pub f: Vector3<f64>,
    pub z_c3: f64,
}

/// Lays out every mechanism point for a real forward solution.
///
/// # Errors
///
/// [`KinematicsError::NotReal`] unless `sol.is_real` (and not degenerate);
/// [`KinematicsError::Domain`] if the joint inputs are inconsistent with a
/// corner height on the solution's branch.
pub fn mechanism_points(
    p: &GeometryParams,
    joints: JointInput,
    sol: &KinematicSolution,
) -> Result<MechanismPoints, KinematicsError> {
    if !sol.is_real || sol.degenerate {
        return Err(KinematicsError::NotReal);
    }
    let PlatformPose { y, z, beta } = sol.pose();
    let z_c3 = corner_height(p, joints.y1 + p.l3, joints.y3, sol.branch.s2)?;
    let a = p.a;
    Ok(MechanismPoints {
        a1: Vector3::new(a, joints.y1, 0.0),
        a2: Vector3::new(a, joints.y2, 0.0),
        a3: Vector3::new(-a, joints.y3, 0.0),
        b1: Vector3::new(a, joints.y1, p.l1),
        b2: Vector3::new(a, joints.y2, p.l1),
        b3: Vector3::new(-a, joints.y3, p.l1),
        c2: Vector3::new(a, joints.y1 + 2.0 * p.l3, z),
        c3: Vector3::new(-a, joints.y1 + p.l3, z_c3),
        d: Vector3::new(a, joints.y1, z),
        e: Vector3::new(a, y, z),
        f: Vector3::new(a - p.l7 * beta.cos(), joints.y1 + p.l3, z + p.l7 * beta.sin()),
        z_c3,
    })
}
