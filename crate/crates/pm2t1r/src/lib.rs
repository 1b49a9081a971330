//! Kinematics and design analysis for a rail-driven 2T1R parallel mechanism.
//!
//! The mechanism moves a platform in two translations (y along the rails,
//! z vertical) plus one rotation (β about the platform's y-directed axis).
//! Three prismatic sliders provide the actuation: two ride the near rail at
//! x = +a (positions `y1`, `y2`), one rides the far rail at x = −a (`y3`).
//! Each slider carries a post of height `l1`; from the posts, three legs
//! reach the platform:
//!
//! * leg 1 — a folding two-bar link (bars `l2`) that pins platform point D
//!   directly above its slider, so the platform's y coordinate tracks `y1`;
//! * leg 2 — a single rod `l4` to the platform end C2, fixing z;
//! * leg 3 — a parallelogram of bars `l5` up to C3, then a coupler `l6`
//!   across to the tip F of the platform's arm `l7`, fixing the tilt β.
//!
//! The platform proper is the segment D–E–C2 of half-length `l3`; its
//! reference point E sits at (a, y, z) and the arm E–F points toward the far
//! rail. All solution chains are closed-form: each of forward and inverse
//! kinematics has eight sign branches, and branches whose radicands go
//! negative are carried through as complex values rather than rejected.
//!
//! ```
//! use pm2t1r::geometry::{GeometryParams, JointInput};
//! use pm2t1r::kinematics::{fk_branch, BranchSelector};
//!
//! let p = GeometryParams::reference();
//! let joints = JointInput { y1: -244.59, y2: 303.32, y3: -252.26 };
//! let sol = fk_branch(&p, joints, BranchSelector::new(1, 1, -1).unwrap()).unwrap();
//! assert!(sol.is_real);
//! assert!((sol.values[2] - 0.3045).abs() < 1e-3); // β, radians
//! ```
//!
//! Modules follow the analysis pipeline: [`geometry`] (dimensions and
//! validation), [`kinematics`] (closed-form FK/IK), [`singularity`]
//! (Jacobians and configuration classification), [`topology`] (motion-pattern
//! bookkeeping), [`workspace`] (grid sampling with singularity margins) and
//! [`design`] (dimension sizing searches).

pub mod design;
pub mod geometry;
pub mod kinematics;
pub mod numfmt;
pub mod singularity;
pub mod topology;
pub mod workspace;
