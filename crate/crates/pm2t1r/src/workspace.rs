//! Grid sampling of the reachable workspace with singularity margins.
//!
//! Two samplers cover the two natural parameterizations:
//!
//! * [`sample_workspace`] walks a joint-space grid (y1, y2, y3) through the
//!   forward kinematics on one assembly branch;
//! * [`constant_orientation_slice`] walks a task-space grid (y, z) at fixed
//!   tilt through the inverse kinematics on one working-mode branch.
//!
//! Each kept record carries row-scaled serial/parallel margins from the
//! velocity Jacobians plus the leg-1 alignment margin `2·l2 − |z − l1|` —
//! the one singularity the Jacobians cannot see, where the two bars of the
//! passive folding leg straighten into a line. States that fail it (or any
//! radicand) are simply omitted; an empty cloud is a valid answer.
//!
//! Sampling runs in parallel but records are merged in row-major grid
//! order, so output (and its CSV rendering) is byte-identical regardless of
//! the thread count.

use crate::geometry::{GeometryParams, JointInput, PlatformPose};
use crate::kinematics::{BranchSelector, fk_branch, ik_branch};
use crate::numfmt::sig9;
use crate::singularity::analytic_jacobians;
use rayon::prelude::*;
use std::io::{self, Write};

/// One sampling axis: `count` evenly spaced values from `min` to `max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisGrid {
    min: f64,
    max: f64,
    count: usize,
}

#[derive(Debug, thiserror::Error)]
pub enum WorkspaceError {
    #[error("invalid grid axis: {0}")]
    InvalidGrid(String),
}

impl AxisGrid {
    /// # Errors
    ///
    /// Rejects non-finite bounds, `min >= max`, and fewer than 2 samples.
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self, WorkspaceError> {
        if !(min.is_finite() && max.is_finite()) {
            return Err(WorkspaceError::InvalidGrid(format!(
                "bounds must be finite (got {min}..{max})"
            )));
        }
        if !(min < max) {
            return Err(WorkspaceError::InvalidGrid(format!(
                "min must be below max (got {min}..{max})"
            )));
        }
        if count < 2 {
            return Err(WorkspaceError::InvalidGrid(format!(
                "need at least 2 samples per axis (got {count})"
            )));
        }
        Ok(Self { min, max, count })
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// The i-th sample; endpoints land exactly on `min` and `max`.
    pub fn value(&self, i: usize) -> f64 {
        debug_assert!(i < self.count);
        if i == self.count - 1 {
            self.max
        } else {
            self.min + (self.max - self.min) * (i as f64) / ((self.count - 1) as f64)
        }
    }
}

/// A full joint-space grid over (y1, y2, y3), iterated row-major with y3
/// innermost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleGrid {
    pub y1: AxisGrid,
    pub y2: AxisGrid,
    pub y3: AxisGrid,
}

impl SampleGrid {
    pub fn len(&self) -> usize {
        self.y1.count() * self.y2.count() * self.y3.count()
    }

    pub fn is_empty(&self) -> bool {
        false // every axis has ≥ 2 samples by construction
    }

    /// Flat row-major index to the (y1, y2, y3) sample values.
    pub fn point(&self, flat: usize) -> (f64, f64, f64) {
        let inner = self.y3.count();
        let mid = self.y2.count();
        let i3 = flat % inner;
        let i2 = (flat / inner) % mid;
        let i1 = flat / (inner * mid);
        (self.y1.value(i1), self.y2.value(i2), self.y3.value(i3))
    }
}

/// One reachable sampled state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorkspaceRecord {
    pub joints: JointInput,
    pub pose: PlatformPose,
    /// The branch the sampler ran on: (m, n, q) for joint grids,
    /// (u, v, w) for constant-orientation slices.
    pub branch: BranchSelector,
    /// Smallest row-scaled |diagonal of B|: 0 means serial-singular.
    pub margin_serial: f64,
    /// Smallest row-scaled |diagonal of A|: 0 means parallel-singular.
    pub margin_parallel: f64,
    /// `2·l2 − |z − l1|`: distance from the passive-leg bar alignment,
    /// which the Jacobians cannot detect. Records are dropped when it is
    /// negative (leg 1 cannot assemble).
    pub leg1_margin: f64,
}

/// Records in row-major grid order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WorkspaceCloud {
    pub records: Vec<WorkspaceRecord>,
}

impl WorkspaceCloud {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Writes the cloud as CSV: header
    /// `y1,y2,y3,y,z,beta,m,n,q,margin_serial,margin_parallel,leg1_margin`,
    /// floats with 9 significant digits, branch signs as integers.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(
            out,
            "y1,y2,y3,y,z,beta,m,n,q,margin_serial,margin_parallel,leg1_margin"
        )?;
        for r in &self.records {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                sig9(r.joints.y1),
                sig9(r.joints.y2),
                sig9(r.joints.y3),
                sig9(r.pose.y),
                sig9(r.pose.z),
                sig9(r.pose.beta),
                r.branch.s1,
                r.branch.s2,
                r.branch.s3,
                sig9(r.margin_serial),
                sig9(r.margin_parallel),
                sig9(r.leg1_margin),
            )?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("CSV is ASCII")
    }
}

/// Evaluates one joint-space grid point; `None` when the state is not
/// assemblable on the branch (complex solution, degenerate tilt, fold
/// boundary, or leg-1 misalignment).
fn evaluate_joint_point(
    p: &GeometryParams,
    joints: JointInput,
    branch: BranchSelector,
) -> Option<WorkspaceRecord> {
    let sol = fk_branch(p, joints, branch).ok()?;
    if !sol.is_real {
        return None;
    }
    let pose = sol.pose();
    let jac = analytic_jacobians(p, pose, joints, branch.s2).ok()?;
    let leg1_margin = 2.0 * p.l2 - (pose.z - p.l1).abs();
    if leg1_margin < 0.0 {
        return None;
    }
    Some(WorkspaceRecord {
        joints,
        pose,
        branch,
        margin_serial: jac.serial_margin(),
        margin_parallel: jac.parallel_margin(),
        leg1_margin,
    })
}

/// Evaluates one constant-orientation task-space point through the inverse
/// chain on branch (u, v, w); `None` when any joint is complex or a margin
/// cannot be formed.
fn evaluate_pose_point(
    p: &GeometryParams,
    pose: PlatformPose,
    branch: BranchSelector,
) -> Option<WorkspaceRecord> {
    // gate the intermediate corner-height radicand explicitly: a complex
    // intermediate with accidentally-real joints is still unreachable
    let gap = 2.0 * p.a - p.l7 * pose.beta.cos();
    let rad_w = p.l6 * p.l6 - gap * gap;
    if rad_w < 0.0 {
        return None;
    }
    let sol = ik_branch(p, pose, branch);
    if !sol.is_real {
        return None;
    }
    let joints = sol.joints();
    let z_c3 = pose.z + p.l7 * pose.beta.sin() + (branch.s3 as f64) * rad_w.sqrt();
    let n_sign: i8 = if z_c3 >= p.l1 { 1 } else { -1 };
    let jac = analytic_jacobians(p, pose, joints, n_sign).ok()?;
    let leg1_margin = 2.0 * p.l2 - (pose.z - p.l1).abs();
    if leg1_margin < 0.0 {
        return None;
    }
    Some(WorkspaceRecord {
        joints,
        pose,
        branch,
        margin_serial: jac.serial_margin(),
        margin_parallel: jac.parallel_margin(),
        leg1_margin,
    })
}

/// Forward-kinematic sweep of a joint-space grid on one assembly branch.
///
/// Returns one record per grid point with a real, assemblable solution, in
/// row-major grid order (y3 innermost). Deterministic for a fixed grid.
pub fn sample_workspace(
    p: &GeometryParams,
    grid: &SampleGrid,
    branch: BranchSelector,
) -> WorkspaceCloud {
    let records = (0..grid.len())
        .into_par_iter()
        .map(|flat| {
            let (y1, y2, y3) = grid.point(flat);
            evaluate_joint_point(p, JointInput { y1, y2, y3 }, branch)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    WorkspaceCloud { records }
}

/// Inverse-kinematic sweep of a task-space (y, z) grid at fixed tilt on one
/// working-mode branch (u, v, w). Row-major with z innermost.
pub fn constant_orientation_slice(
    p: &GeometryParams,
    grid_y: &AxisGrid,
    grid_z: &AxisGrid,
    beta: f64,
    branch: BranchSelector,
) -> WorkspaceCloud {
    let nz = grid_z.count();
    let records = (0..grid_y.count() * nz)
        .into_par_iter()
        .map(|flat| {
            let pose = PlatformPose {
                y: grid_y.value(flat / nz),
                z: grid_z.value(flat % nz),
                beta,
            };
            evaluate_pose_point(p, pose, branch)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    WorkspaceCloud { records }
}
