//! Position-and-orientation-characteristic (POC) algebra and mobility
//! calculus.
//!
//! A POC set records which instantaneous translations and rotations an
//! end-effector admits: a pair of linear subspaces of ℝ³, one for
//! translation directions and one for rotation axes. Serial composition
//! takes component-wise subspace sums (union); parallel composition takes
//! component-wise intersections. That span arithmetic is all this mechanism
//! family needs.
//!
//! The mobility numbers for a loop decomposition follow from
//!
//! * ξ_j — independent loop equations: the dimension of the union of the
//!   accumulated POC with the next limb's POC,
//! * F = Σ fᵢ − Σ ξ_j — degrees of freedom,
//! * Δ_j = (Σ fᵢ over loop j) − I_j − ξ_j — per-loop constraint degree for
//!   I_j actuated joints,
//! * κ = ½ Σ |Δ_j| — coupling degree (for the single decomposition given).
//!
//! Loops are written in a compact text notation, e.g.
//! `P11||R12||R13||R14^R23||R22^P21:y` — see [`parse_loop`].

use nalgebra::{DMatrix, Vector3};
use std::fmt;

/// Absolute singular-value cutoff when ranking direction matrices.
pub const RANK_TOL: f64 = 1e-10;

/// A linear subspace of ℝ³ held as an orthonormal basis (0 to 3 vectors).
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    basis: Vec<Vector3<f64>>,
}

impl Subspace {
    /// The zero subspace.
    pub fn zero() -> Self {
        Self { basis: Vec::new() }
    }

    /// All of ℝ³.
    pub fn full() -> Self {
        Self::span(&[Vector3::x(), Vector3::y(), Vector3::z()])
    }

    /// The line through `v` (zero subspace if `v` is numerically zero).
    pub fn line(v: Vector3<f64>) -> Self {
        Self::span(&[v])
    }

    /// The plane orthogonal to `v`.
    pub fn plane_perp_to(v: Vector3<f64>) -> Self {
        Self::line(v).complement()
    }

    /// Span of arbitrary (not necessarily independent) vectors, orthonormalized
    /// by SVD with singular values below [`RANK_TOL`] treated as zero.
    pub fn span(vecs: &[Vector3<f64>]) -> Self {
        let cols = vecs.len().max(3);
        let mut m = DMatrix::<f64>::zeros(3, cols);
        for (j, v) in vecs.iter().enumerate() {
            for i in 0..3 {
                m[(i, j)] = v[i];
            }
        }
        Self::from_svd(m, false)
    }

    /// Orthogonal complement within ℝ³.
    pub fn complement(&self) -> Self {
        let mut m = DMatrix::<f64>::zeros(3, 3.max(self.basis.len()));
        for (j, v) in self.basis.iter().enumerate() {
            for i in 0..3 {
                m[(i, j)] = v[i];
            }
        }
        Self::from_svd(m, true)
    }

    /// Columns of U paired with singular values; keep the range (sv > tol)
    /// or, for `kernel_side`, the left null space (sv ≤ tol).
    fn from_svd(m: DMatrix<f64>, kernel_side: bool) -> Self {
        let svd = m.svd(true, false);
        let u = svd.u.expect("SVD with U requested");
        let mut basis = Vec::new();
        for (j, sv) in svd.singular_values.iter().enumerate() {
            if (*sv > RANK_TOL) != kernel_side {
                basis.push(Vector3::new(u[(0, j)], u[(1, j)], u[(2, j)]));
            }
        }
        Self { basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vector3<f64>] {
        &self.basis
    }

    /// Subspace sum (smallest subspace containing both).
    pub fn sum(&self, other: &Self) -> Self {
        let mut vecs = self.basis.clone();
        vecs.extend_from_slice(&other.basis);
        Self::span(&vecs)
    }

    /// Subspace intersection, via the complement identity
    /// (U ∩ V) = (U⊥ + V⊥)⊥.
    pub fn intersect(&self, other: &Self) -> Self {
        self.complement().sum(&other.complement()).complement()
    }

    /// Whether `v` lies in the subspace (projection residual ≤ 1e−9·‖v‖).
    pub fn contains(&self, v: Vector3<f64>) -> bool {
        let norm = v.norm();
        if norm <= RANK_TOL {
            return true;
        }
        let mut residual = v;
        for b in &self.basis {
            residual -= b * v.dot(b);
        }
        residual.norm() <= 1e-9 * norm
    }

    /// Set equality as subspaces (independent of basis representation).
    pub fn same_space(&self, other: &Self) -> bool {
        self.dim() == other.dim() && other.basis.iter().all(|v| self.contains(*v))
    }
}

/// Names a unit vector aligned with a coordinate axis, if it is one.
fn axis_name(v: Vector3<f64>) -> Option<&'static str> {
    const NAMES: [&str; 3] = ["x", "y", "z"];
    (0..3).find_map(|i| (v[i].abs() >= 1.0 - 1e-9).then_some(NAMES[i]))
}

/// Renders a subspace tag like `(y)`, `(yz)` or an explicit direction.
fn subspace_tag(s: &Subspace) -> String {
    match s.dim() {
        0 | 3 => String::new(),
        1 => {
            let v = s.basis()[0];
            match axis_name(v) {
                Some(n) => format!("({n})"),
                None => format!("({:.3},{:.3},{:.3})", v[0], v[1], v[2]),
            }
        }
        _ => {
            let normal = s.complement();
            match axis_name(normal.basis()[0]) {
                Some("x") => "(yz)".to_owned(),
                Some("y") => "(xz)".to_owned(),
                Some("z") => "(xy)".to_owned(),
                _ => {
                    let v = normal.basis()[0];
                    format!("(perp {:.3},{:.3},{:.3})", v[0], v[1], v[2])
                }
            }
        }
    }
}

/// A POC set: admissible translation directions and rotation axes.
#[derive(Debug, Clone, PartialEq)]
pub struct PocSet {
    pub translations: Subspace,
    pub rotations: Subspace,
}

impl PocSet {
    pub fn new(translations: Subspace, rotations: Subspace) -> Self {
        Self {
            translations,
            rotations,
        }
    }

    /// Total dimension t + r (0..=6).
    pub fn dim(&self) -> usize {
        self.translations.dim() + self.rotations.dim()
    }

    /// Subspace equality per component.
    pub fn same(&self, other: &Self) -> bool {
        self.translations.same_space(&other.translations)
            && self.rotations.same_space(&other.rotations)
    }

    /// Short class name like `2T1R`.
    pub fn type_name(&self) -> String {
        format!("{}T{}R", self.translations.dim(), self.rotations.dim())
    }
}

impl fmt::Display for PocSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{{t{}{}; r{}{}}}",
            self.translations.dim(),
            subspace_tag(&self.translations),
            self.rotations.dim(),
            subspace_tag(&self.rotations),
        )
    }
}

/// Serial composition: component-wise subspace sum.
pub fn poc_union(a: &PocSet, b: &PocSet) -> PocSet {
    PocSet {
        translations: a.translations.sum(&b.translations),
        rotations: a.rotations.sum(&b.rotations),
    }
}

/// Parallel composition: component-wise subspace intersection.
pub fn poc_intersect(a: &PocSet, b: &PocSet) -> PocSet {
    PocSet {
        translations: a.translations.intersect(&b.translations),
        rotations: a.rotations.intersect(&b.rotations),
    }
}

/// Number of independent loop-closure equations contributed when the limb
/// with POC `next_limb` closes against a subassembly with POC `accumulated`:
/// the dimension of their union.
pub fn loop_equation_count(accumulated: &PocSet, next_limb: &PocSet) -> usize {
    poc_union(accumulated, next_limb).dim()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum JointKind {
    /// Sliding joint along `axis`.
    Prismatic,
    /// Hinge about `axis`.
    Revolute,
    /// Planar parallelogram treated as one joint; `axis` is its circular
    /// translation direction (one translational freedom, no rotation).
    Parallelogram,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointDescriptor {
    pub kind: JointKind,
    pub axis: Vector3<f64>,
    pub label: String,
}

/// One closed loop of the decomposition: its joints in chain order and how
/// many of them are actuated. Every joint contributes one freedom.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopSpec {
    pub joints: Vec<JointDescriptor>,
    pub actuated: usize,
    pub notation: String,
}

impl LoopSpec {
    /// Σ fᵢ for the loop (each joint contributes one).
    pub fn freedoms(&self) -> usize {
        self.joints.len()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum TopologyError {
    #[error("loop notation is empty")]
    EmptyLoop,
    #[error("cannot read joint token `{0}`: expected P…, R…, or Pa, optionally tagged :x/:y/:z")]
    BadToken(String),
    #[error("unknown axis tag `{0}`: expected x, y or z")]
    BadAxis(String),
    #[error(
        "`^` after a non-coordinate axis is ambiguous; tag the joint explicitly (e.g. R33:y)"
    )]
    AmbiguousPerp,
    #[error("dangling separator at the end of the loop notation")]
    DanglingSeparator,
    #[error("{actuated} actuated joints exceed the {joints} joints in the loop")]
    TooManyActuated { actuated: usize, joints: usize },
}

fn coordinate_axis(tag: &str) -> Result<Vector3<f64>, TopologyError> {
    match tag {
        "x" => Ok(Vector3::x()),
        "y" => Ok(Vector3::y()),
        "z" => Ok(Vector3::z()),
        other => Err(TopologyError::BadAxis(other.to_owned())),
    }
}

/// Cycles a coordinate axis for the `^` separator: y → x → z → y.
fn perp_axis(prev: Vector3<f64>) -> Result<Vector3<f64>, TopologyError> {
    match axis_name(prev) {
        Some("y") => Ok(Vector3::x()),
        Some("x") => Ok(Vector3::z()),
        Some("z") => Ok(Vector3::y()),
        _ => Err(TopologyError::AmbiguousPerp),
    }
}

/// Parses the compact loop notation.
///
/// Grammar: `joint (sep joint)*` where
///
/// * a joint is `P<name>`, `R<name>`, or `Pa` (parallelogram), optionally
///   tagged with an explicit axis as `:x`, `:y`, or `:z`;
/// * the separator `||` keeps the previous joint's axis;
/// * the separator `^` switches to a perpendicular coordinate axis,
///   cycling y → x → z → y;
/// * the first joint defaults to the y axis (the rail direction) unless
///   tagged.
///
/// Example: `P11||R12||R13||R14^R23||R22^P21:y`.
pub fn parse_loop(notation: &str, actuated: usize) -> Result<LoopSpec, TopologyError> {
    let text: String = notation.split_whitespace().collect();
    if text.is_empty() {
        return Err(TopologyError::EmptyLoop);
    }

    // split into tokens and the separators between them
    let mut tokens: Vec<String> = vec![String::new()];
    let mut seps: Vec<char> = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '|' if chars.peek() == Some(&'|') => {
                chars.next();
                seps.push('|');
                tokens.push(String::new());
            }
            '^' => {
                seps.push('^');
                tokens.push(String::new());
            }
            _ => tokens.last_mut().unwrap().push(c),
        }
    }
    if tokens.iter().any(String::is_empty) {
        return Err(if tokens.last().unwrap().is_empty() {
            TopologyError::DanglingSeparator
        } else {
            TopologyError::BadToken(String::new())
        });
    }

    let mut joints = Vec::with_capacity(tokens.len());
    let mut prev_axis = Vector3::y();
    for (i, token) in tokens.iter().enumerate() {
        let (name, tag) = match token.split_once(':') {
            Some((n, t)) => (n, Some(t)),
            None => (token.as_str(), None),
        };
        let kind = if name == "Pa" {
            JointKind::Parallelogram
        } else if name.starts_with('P') && name.len() > 1 {
            JointKind::Prismatic
        } else if name.starts_with('R') && name.len() > 1 {
            JointKind::Revolute
        } else {
            return Err(TopologyError::BadToken(token.clone()));
        };
        let axis = match tag {
            Some(t) => coordinate_axis(t)?,
            None if i == 0 => Vector3::y(),
            None => match seps[i - 1] {
                '|' => prev_axis,
                _ => perp_axis(prev_axis)?,
            },
        };
        prev_axis = axis;
        joints.push(JointDescriptor {
            kind,
            axis,
            label: name.to_owned(),
        });
    }

    if actuated > joints.len() {
        return Err(TopologyError::TooManyActuated {
            actuated,
            joints: joints.len(),
        });
    }
    Ok(LoopSpec {
        joints,
        actuated,
        notation: notation.to_owned(),
    })
}

/// Mobility numbers of a loop decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct MobilityReport {
    /// Degrees of freedom F = Σ fᵢ − Σ ξ_j.
    pub f: i32,
    /// Independent loop equations per loop.
    pub xi: Vec<usize>,
    /// Constraint degree Δ_j per loop.
    pub delta: Vec<i32>,
    /// Coupling degree κ = ½ Σ |Δ_j|.
    pub kappa: f64,
}

/// Runs the mobility calculus over an ordered loop decomposition.
///
/// `pocs[j]` is the pair fed to [`loop_equation_count`] for loop `j`: the
/// accumulated POC of everything already assembled, and the POC of the limb
/// the loop adds.
///
/// # Panics
///
/// If `loops` is empty or the lengths differ (programming error, not data).
pub fn mobility_analysis(loops: &[LoopSpec], pocs: &[(PocSet, PocSet)]) -> MobilityReport {
    assert_eq!(
        loops.len(),
        pocs.len(),
        "one POC pair is required per loop"
    );
    let xi: Vec<usize> = pocs
        .iter()
        .map(|(acc, limb)| loop_equation_count(acc, limb))
        .collect();
    mobility_from_counts(loops, &xi)
}

/// The counting half of the calculus, for when the independent equation
/// counts ξ_j are already known.
///
/// # Panics
///
/// If `loops` is empty or the lengths differ (programming error, not data).
pub fn mobility_from_counts(loops: &[LoopSpec], xi: &[usize]) -> MobilityReport {
    assert!(!loops.is_empty(), "mobility analysis needs at least one loop");
    assert_eq!(loops.len(), xi.len(), "one equation count per loop");
    let f = loops.iter().map(|l| l.freedoms() as i32).sum::<i32>()
        - xi.iter().sum::<usize>() as i32;
    let delta: Vec<i32> = loops
        .iter()
        .zip(xi)
        .map(|(l, x)| l.freedoms() as i32 - l.actuated as i32 - *x as i32)
        .collect();
    let kappa = 0.5 * delta.iter().map(|d| d.abs() as f64).sum::<f64>();
    MobilityReport {
        f,
        xi: xi.to_vec(),
        delta,
        kappa,
    }
}

/// The full worked decomposition of this mechanism.
#[derive(Debug, Clone)]
pub struct ReferenceTopology {
    /// Loop 1 (legs 1+2 against the platform bar) and loop 2 (hinge + leg 3).
    pub loops: [LoopSpec; 2],
    /// End-of-limb POC sets for the three legs.
    pub limb_pocs: [PocSet; 3],
    /// The (accumulated, next limb) pairs that produce ξ₁ and ξ₂.
    pub loop_pairs: [(PocSet, PocSet); 2],
    /// POC of the platform bar under legs 1+2 only.
    pub sub_pm_poc: PocSet,
    /// DOF of that two-leg subassembly.
    pub sub_pm_dof: i32,
    /// POC of the tilting arm: the mechanism's output.
    pub arm_poc: PocSet,
    pub report: MobilityReport,
    /// One-line structural formula summarizing the decomposition.
    pub formula: String,
}

/// Builds the reference decomposition: loop 1 closes legs 1 and 2 over the
/// platform bar (2 actuated sliders), loop 2 closes the arm hinge against
/// leg 3 (1 actuated slider).
pub fn reference_topology() -> ReferenceTopology {
    let loops = [
        parse_loop("P11||R12||R13||R14^R23||R22^P21:y", 2).expect("built-in loop 1"),
        parse_loop("R24||P31^Pa:z^R33||R34", 1).expect("built-in loop 2"),
    ];

    let y = Vector3::y();
    // Leg 1: slider + two pivoting bars, all hinge axes along y.
    let leg1 = PocSet::new(Subspace::full(), Subspace::line(y));
    // Leg 2: slider + rod with hinges along x: translations in the yz plane.
    let leg2 = PocSet::new(Subspace::plane_perp_to(Vector3::x()), Subspace::line(Vector3::x()));
    // Leg 3: slider + parallelogram + hinges along y.
    let leg3 = PocSet::new(Subspace::full(), Subspace::line(y));

    let sub_pm_poc = poc_intersect(&leg1, &leg2);
    let loop_pairs = [
        (leg1.clone(), leg2.clone()),
        (sub_pm_poc.clone(), leg3.clone()),
    ];
    let report = mobility_analysis(&loops, &loop_pairs);
    let sub_pm_dof = loops[0].freedoms() as i32 - report.xi[0] as i32;

    // The arm hinges on the platform bar (rotation about y) and is guided
    // by leg 3: union with the hinge, then intersect with the limb.
    let hinge = PocSet::new(Subspace::zero(), Subspace::line(y));
    let arm_poc = poc_intersect(&poc_union(&sub_pm_poc, &hinge), &leg3);

    // PM^κ[F; loops(f₁,f₂)] = Σ SKC_j^κj(cumulative dof; ξ_j)
    let mut formula = format!(
        "{}-PM^{}[{}; {}({},{})]",
        arm_poc.type_name(),
        report.kappa,
        report.f,
        loops.len(),
        loops[0].freedoms(),
        loops[1].freedoms(),
    );
    let stage_poc = [&sub_pm_poc, &arm_poc];
    let mut cumulative = 0i32;
    for (j, loop_spec) in loops.iter().enumerate() {
        cumulative += loop_spec.freedoms() as i32 - report.xi[j] as i32;
        let part = format!(
            "{}-SKC{}^{}({};{})",
            stage_poc[j].type_name(),
            j + 1,
            0.5 * (report.delta[j].abs() as f64),
            cumulative,
            report.xi[j],
        );
        formula.push_str(if j == 0 { " = " } else { " + " });
        formula.push_str(&part);
    }

    ReferenceTopology {
        loops,
        limb_pocs: [leg1, leg2, leg3],
        loop_pairs,
        sub_pm_poc,
        sub_pm_dof,
        arm_poc,
        report,
        formula,
    }
}
