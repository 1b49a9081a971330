//! `pm2t1r` — command-line front end for the 2T1R parallel-mechanism
//! analysis library.
//!
//! One subcommand per analysis: `fk`, `ik`, `jacobian`, `singularity`,
//! `workspace`, `topology`, `design`. Scalar reports print as JSON with
//! 9-significant-digit numbers; workspace clouds print as CSV. Exit codes:
//! 0 success, 2 invalid input, 3 domain error (unassemblable state or
//! infeasible design).

mod output;

use clap::{Args, Parser, Subcommand};
use output::{jarray, jnum, jstr, matrix_json, solution_json, toplevel};
use pm2t1r::design::{
    DesignError, DesignSpec, REFERENCE_ROUNDED_LENGTHS, clearance_lengths, min_l6_search,
};
use pm2t1r::geometry::{GeometryParams, JointInput, PlatformPose, validate_params};
use pm2t1r::kinematics::{BranchSelector, fk_branch, fk_enumerate, ik_enumerate};
use pm2t1r::singularity::{
    DEFAULT_CLASSIFY_EPS, JacobianPair, SingularityKind, analytic_jacobians,
    classify_configuration, fd_jacobians,
};
use pm2t1r::topology::{LoopSpec, mobility_from_counts, parse_loop, reference_topology};
use pm2t1r::workspace::{AxisGrid, SampleGrid, constant_orientation_slice, sample_workspace};
use std::f64::consts::FRAC_PI_2;
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_USAGE: u8 = 2;
const EXIT_DOMAIN: u8 = 3;

const AFTER_HELP: &str = "\
PARAMETERS:
  Kinematic subcommands need link dimensions from one of:
    --params <FILE>   JSON object with keys \"a\", \"l1\"..\"l7\" in
                      millimetres; \"l0\" and \"l8\" are optional offsets.
    --builtin paper   the bundled reference design: a=300, l1=100, l2=200,
                      l3=160, l4=400, l5=320, l6=240, l7=500.

GRID SYNTAX:
  Axis flags take LO:HI:COUNT (e.g. --grid-y1 \"-400:400:81\"): COUNT evenly
  spaced samples with both endpoints included; COUNT must be at least 2.

EXIT CODES:
  0  success
  2  invalid input (flags, parameter file, grids, loop notation)
  3  domain error (state does not assemble, singular system, infeasible
     design)";

const LOOP_GRAMMAR: &str = "\
LOOP NOTATION:
  A loop is a chain of joint tokens joined by axis separators:
    P<name>   prismatic (sliding) joint
    R<name>   revolute (hinge) joint
    Pa        planar parallelogram, one circular-translation freedom
  A token may fix its axis explicitly with :x, :y or :z (e.g. P21:y).
  Separators: \"||\" keeps the previous joint's axis; \"^\" switches to a
  perpendicular coordinate axis, cycling y -> x -> z -> y. The first joint
  defaults to the y axis (along the rails).
  Example: \"P11||R12||R13||R14^R23||R22^P21:y\"";

/// Analysis toolkit for a rail-driven 2T1R parallel mechanism: closed-form
/// kinematics over all sign branches, velocity Jacobians and singularity
/// classification, workspace sampling, loop-topology bookkeeping, and
/// link-length sizing.
#[derive(Parser)]
#[command(name = "pm2t1r", version, after_help = AFTER_HELP)]
struct Cli {
    /// JSON file with the link dimensions.
    #[arg(long, global = true, value_name = "FILE")]
    params: Option<PathBuf>,

    /// Named built-in parameter set (available: paper).
    #[arg(long, global = true, value_name = "NAME")]
    builtin: Option<String>,

    /// Also write the result to this file (JSON for reports, CSV for
    /// workspace clouds).
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Forward kinematics: platform poses (y, z, beta) for slider positions.
    Fk(FkArgs),
    /// Inverse kinematics: slider positions (y1, y2, y3) for a platform pose.
    Ik(IkArgs),
    /// Velocity Jacobians A and B at a forward-kinematic state.
    Jacobian(JacobianArgs),
    /// Singularity classification at a forward-kinematic state.
    Singularity(SingularityArgs),
    /// Sample reachable states over a grid and emit CSV.
    Workspace(WorkspaceArgs),
    /// Loop-decomposition mobility and motion-pattern analysis.
    #[command(after_help = LOOP_GRAMMAR)]
    Topology(TopologyArgs),
    /// Size the leg lengths and the minimal coupler for a tilt range.
    Design(DesignArgs),
}

#[derive(Args)]
struct FkArgs {
    /// Slider 1 position on the near rail, mm.
    #[arg(long, allow_hyphen_values = true)]
    y1: f64,
    /// Slider 2 position on the near rail, mm.
    #[arg(long, allow_hyphen_values = true)]
    y2: f64,
    /// Slider 3 position on the far rail, mm.
    #[arg(long, allow_hyphen_values = true)]
    y3: f64,
    /// Only print this branch (m,n,q), e.g. "+1,+1,-1"; default all eight.
    #[arg(long, value_parser = parse_branch, allow_hyphen_values = true)]
    branch: Option<BranchSelector>,
}

#[derive(Args)]
struct IkArgs {
    /// Platform reference-point y, mm.
    #[arg(long, allow_hyphen_values = true)]
    y: f64,
    /// Platform reference-point z, mm.
    #[arg(long, allow_hyphen_values = true)]
    z: f64,
    /// Platform tilt about the y axis, radians.
    #[arg(long, allow_hyphen_values = true)]
    beta: f64,
    /// Only print this branch (u,v,w), e.g. "+1,-1,+1"; default all eight.
    #[arg(long, value_parser = parse_branch, allow_hyphen_values = true)]
    branch: Option<BranchSelector>,
}

#[derive(Args)]
struct JacobianArgs {
    /// Slider 1 position, mm.
    #[arg(long, allow_hyphen_values = true)]
    y1: f64,
    /// Slider 2 position, mm.
    #[arg(long, allow_hyphen_values = true)]
    y2: f64,
    /// Slider 3 position, mm.
    #[arg(long, allow_hyphen_values = true)]
    y3: f64,
    /// Assembly branch (m,n,q) selecting the forward solution.
    #[arg(long, value_parser = parse_branch, allow_hyphen_values = true)]
    branch: BranchSelector,
    /// Cross-check against finite differences with this step (mm/rad) and
    /// report the largest row-scaled deviation.
    #[arg(long, value_name = "H")]
    fd_step: Option<f64>,
}

#[derive(Args)]
struct SingularityArgs {
    /// Slider 1 position, mm.
    #[arg(long, allow_hyphen_values = true)]
    y1: f64,
    /// Slider 2 position, mm.
    #[arg(long, allow_hyphen_values = true)]
    y2: f64,
    /// Slider 3 position, mm.
    #[arg(long, allow_hyphen_values = true)]
    y3: f64,
    /// Assembly branch (m,n,q) selecting the forward solution.
    #[arg(long, value_parser = parse_branch, allow_hyphen_values = true)]
    branch: BranchSelector,
    /// Relative threshold on row-scaled diagonal entries.
    #[arg(long, default_value_t = DEFAULT_CLASSIFY_EPS)]
    eps: f64,
}

#[derive(Args)]
struct WorkspaceArgs {
    /// Joint sweep: slider-1 grid LO:HI:COUNT.
    #[arg(long, value_parser = parse_grid, value_name = "GRID", allow_hyphen_values = true)]
    grid_y1: Option<AxisGrid>,
    /// Joint sweep: slider-2 grid LO:HI:COUNT.
    #[arg(long, value_parser = parse_grid, value_name = "GRID", allow_hyphen_values = true)]
    grid_y2: Option<AxisGrid>,
    /// Joint sweep: slider-3 grid LO:HI:COUNT.
    #[arg(long, value_parser = parse_grid, value_name = "GRID", allow_hyphen_values = true)]
    grid_y3: Option<AxisGrid>,
    /// Fixed-tilt slice: platform tilt, radians.
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    /// Fixed-tilt slice: platform y grid LO:HI:COUNT.
    #[arg(long, value_parser = parse_grid, value_name = "GRID", allow_hyphen_values = true)]
    grid_y: Option<AxisGrid>,
    /// Fixed-tilt slice: platform z grid LO:HI:COUNT.
    #[arg(long, value_parser = parse_grid, value_name = "GRID", allow_hyphen_values = true)]
    grid_z: Option<AxisGrid>,
    /// Branch to sweep: (m,n,q) for joint sweeps, (u,v,w) for slices.
    #[arg(long, value_parser = parse_branch, allow_hyphen_values = true)]
    branch: BranchSelector,
}

#[derive(Args)]
struct TopologyArgs {
    /// Custom loop in compact notation (repeatable, one per loop); without
    /// it the built-in decomposition of this mechanism is analyzed.
    #[arg(long = "loop", value_name = "NOTATION")]
    loops: Vec<String>,
    /// Actuated joint count for each --loop, in the same order.
    #[arg(long, value_name = "N")]
    actuated: Vec<usize>,
    /// Independent loop-equation count for each --loop, in the same order.
    #[arg(long, value_name = "XI")]
    xi: Vec<usize>,
}

#[derive(Args)]
struct DesignArgs {
    /// Half the rail spacing, mm.
    #[arg(long, default_value_t = 300.0)]
    a: f64,
    /// Lower end of the tilt range, radians.
    #[arg(long, default_value_t = -std::f64::consts::FRAC_PI_4, allow_hyphen_values = true)]
    beta_lo: f64,
    /// Upper end of the tilt range, radians.
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_4, allow_hyphen_values = true)]
    beta_hi: f64,
    /// Transmission-angle floor, radians [default: asin(1/5)].
    #[arg(long)]
    theta_min: Option<f64>,
    /// Clearance angle for the leg sizing, radians.
    #[arg(long, default_value_t = 0.1)]
    clearance: f64,
    /// Tolerance on the reported minimal coupler length, mm.
    #[arg(long, default_value_t = 0.05)]
    tol: f64,
}

/// A command's rendered result: what goes to standard output, and (when it
/// differs) the payload `--out` should receive.
struct Rendered {
    stdout: String,
    file: Option<String>,
}

impl Rendered {
    fn report(json: String) -> Self {
        Self {
            stdout: json,
            file: None,
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn domain(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_DOMAIN,
            message: message.into(),
        }
    }
}

type CmdResult = Result<Rendered, Failure>;

fn parse_branch(s: &str) -> Result<BranchSelector, String> {
    s.parse::<BranchSelector>().map_err(|e| e.to_string())
}

fn parse_grid(s: &str) -> Result<AxisGrid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, count] = parts.as_slice() else {
        return Err(format!("expected LO:HI:COUNT, got `{s}`"));
    };
    let lo: f64 = lo
        .trim()
        .parse()
        .map_err(|_| format!("grid lower bound `{lo}` is not a number"))?;
    let hi: f64 = hi
        .trim()
        .parse()
        .map_err(|_| format!("grid upper bound `{hi}` is not a number"))?;
    let count: usize = count
        .trim()
        .parse()
        .map_err(|_| format!("grid count `{count}` is not a positive integer"))?;
    AxisGrid::new(lo, hi, count).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests land here too; clap routes those to
            // standard output and they exit 0.
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let rendered = match &cli.command {
        Cmd::Fk(args) => cmd_fk(&load_geometry(cli)?, args)?,
        Cmd::Ik(args) => cmd_ik(&load_geometry(cli)?, args)?,
        Cmd::Jacobian(args) => cmd_jacobian(&load_geometry(cli)?, args)?,
        Cmd::Singularity(args) => cmd_singularity(&load_geometry(cli)?, args)?,
        Cmd::Workspace(args) => cmd_workspace(&load_geometry(cli)?, args, cli.out.is_some())?,
        Cmd::Topology(args) => cmd_topology(args)?,
        Cmd::Design(args) => cmd_design(args)?,
    };
    if let Some(path) = &cli.out {
        let payload = rendered.file.as_deref().unwrap_or(&rendered.stdout);
        let mut text = payload.to_owned();
        if !text.ends_with('\n') {
            text.push('\n');
        }
        std::fs::write(path, text)
            .map_err(|e| Failure::usage(format!("cannot write `{}`: {e}", path.display())))?;
    }
    print!("{}", rendered.stdout);
    if !rendered.stdout.ends_with('\n') {
        println!();
    }
    Ok(())
}

/// Resolves the geometry for the kinematic subcommands. Fatal validation
/// findings abort; advisory ones go to standard error as warnings.
fn load_geometry(cli: &Cli) -> Result<GeometryParams, Failure> {
    let params = match (&cli.params, &cli.builtin) {
        (Some(_), Some(_)) => {
            return Err(Failure::usage(
                "--params and --builtin are mutually exclusive",
            ));
        }
        (None, None) => {
            return Err(Failure::usage(
                "this subcommand needs link dimensions: pass --params <FILE> or --builtin paper",
            ));
        }
        (Some(path), None) => {
            let (params, warnings) = GeometryParams::from_json_file(path)
                .map_err(|e| Failure::usage(e.to_string()))?;
            for w in warnings {
                eprintln!("warning: {w}");
            }
            params
        }
        (None, Some(name)) => match name.as_str() {
            "paper" | "reference" => GeometryParams::reference(),
            other => {
                return Err(Failure::usage(format!(
                    "unknown built-in parameter set `{other}` (available: paper)"
                )));
            }
        },
    };
    let report = validate_params(&params);
    if report.has_fatal() {
        return Err(Failure::usage(format!("invalid parameters:\n{report}")));
    }
    for violation in &report.violations {
        eprintln!("warning: {}", violation.message);
    }
    Ok(params)
}

fn cmd_fk(p: &GeometryParams, args: &FkArgs) -> CmdResult {
    let joints = JointInput {
        y1: args.y1,
        y2: args.y2,
        y3: args.y3,
    };
    let solutions: Vec<_> = fk_enumerate(p, joints)
        .into_iter()
        .filter(|s| args.branch.is_none_or(|b| s.branch == b))
        .collect();
    let json = toplevel(&[
        ("command", jstr("fk")),
        (
            "inputs",
            format!(
                "{{\"y1\": {}, \"y2\": {}, \"y3\": {}}}",
                jnum(args.y1),
                jnum(args.y2),
                jnum(args.y3)
            ),
        ),
        (
            "solutions",
            jarray(
                solutions
                    .iter()
                    .map(|s| solution_json(s, ["y", "z", "beta"])),
            ),
        ),
    ]);
    Ok(Rendered::report(json))
}

fn cmd_ik(p: &GeometryParams, args: &IkArgs) -> CmdResult {
    let pose = PlatformPose {
        y: args.y,
        z: args.z,
        beta: args.beta,
    };
    let solutions: Vec<_> = ik_enumerate(p, pose)
        .into_iter()
        .filter(|s| args.branch.is_none_or(|b| s.branch == b))
        .collect();
    let json = toplevel(&[
        ("command", jstr("ik")),
        (
            "inputs",
            format!(
                "{{\"y\": {}, \"z\": {}, \"beta\": {}}}",
                jnum(args.y),
                jnum(args.z),
                jnum(args.beta)
            ),
        ),
        (
            "solutions",
            jarray(
                solutions
                    .iter()
                    .map(|s| solution_json(s, ["y1", "y2", "y3"])),
            ),
        ),
    ]);
    Ok(Rendered::report(json))
}

/// Solves FK on the requested branch and insists on a real, assemblable
/// state; used by the Jacobian-based subcommands.
fn real_state(
    p: &GeometryParams,
    joints: JointInput,
    branch: BranchSelector,
) -> Result<PlatformPose, Failure> {
    let sol = fk_branch(p, joints, branch).map_err(|e| Failure::domain(e.to_string()))?;
    if !sol.is_real {
        return Err(Failure::domain(format!(
            "branch {branch} does not assemble at this input (largest imaginary part {} mm)",
            jnum(sol.max_imag())
        )));
    }
    Ok(sol.pose())
}

fn jacobians_at(
    p: &GeometryParams,
    joints: JointInput,
    branch: BranchSelector,
) -> Result<(PlatformPose, JacobianPair), Failure> {
    let pose = real_state(p, joints, branch)?;
    let jac = analytic_jacobians(p, pose, joints, branch.s2)
        .map_err(|e| Failure::domain(e.to_string()))?;
    Ok((pose, jac))
}

fn state_json(pose: PlatformPose) -> String {
    format!(
        "{{\"y\": {}, \"z\": {}, \"beta\": {}}}",
        jnum(pose.y),
        jnum(pose.z),
        jnum(pose.beta)
    )
}

fn cmd_jacobian(p: &GeometryParams, args: &JacobianArgs) -> CmdResult {
    let joints = JointInput {
        y1: args.y1,
        y2: args.y2,
        y3: args.y3,
    };
    let (pose, jac) = jacobians_at(p, joints, args.branch)?;
    let mut pairs = vec![
        ("command", jstr("jacobian")),
        ("branch", format!("\"{}\"", args.branch)),
        ("pose", state_json(pose)),
        ("matrix_a", matrix_json(&jac.a)),
        ("matrix_b", matrix_json(&jac.b)),
        ("det_a", jnum(jac.det_a())),
        ("det_b", jnum(jac.det_b())),
        ("margin_serial", jnum(jac.serial_margin())),
        ("margin_parallel", jnum(jac.parallel_margin())),
    ];
    if let Some(h) = args.fd_step {
        let fd = fd_jacobians(p, pose, joints, args.branch.s2, h)
            .map_err(|e| Failure::domain(e.to_string()))?;
        let mut deviation = 0.0f64;
        for i in 0..3 {
            let scale = jac.row_scale(i).max(f64::MIN_POSITIVE);
            for j in 0..3 {
                let da = (jac.a[(i, j)] - fd.a[(i, j)]).abs();
                let db = (jac.b[(i, j)] - fd.b[(i, j)]).abs();
                deviation = deviation.max(da / scale).max(db / scale);
            }
        }
        pairs.push(("fd_step", jnum(h)));
        pairs.push(("fd_max_row_scaled_deviation", jnum(deviation)));
    }
    Ok(Rendered::report(toplevel(&pairs)))
}

fn kind_name(kind: SingularityKind) -> &'static str {
    match kind {
        SingularityKind::Regular => "regular",
        SingularityKind::Serial => "serial",
        SingularityKind::Parallel => "parallel",
        SingularityKind::Both => "both",
    }
}

fn cmd_singularity(p: &GeometryParams, args: &SingularityArgs) -> CmdResult {
    if !(args.eps.is_finite() && args.eps >= 0.0) {
        return Err(Failure::usage(format!(
            "--eps must be a non-negative number (got {})",
            args.eps
        )));
    }
    let joints = JointInput {
        y1: args.y1,
        y2: args.y2,
        y3: args.y3,
    };
    let (pose, jac) = jacobians_at(p, joints, args.branch)?;
    let class = classify_configuration(&jac, args.eps);
    let notes: Vec<String> = class
        .serial_cases
        .iter()
        .map(|c| jstr(c.describe()))
        .chain(class.parallel_cases.iter().map(|c| jstr(c.describe())))
        .collect();
    let json = toplevel(&[
        ("command", jstr("singularity")),
        ("branch", format!("\"{}\"", args.branch)),
        ("pose", state_json(pose)),
        ("eps", jnum(args.eps)),
        ("kind", jstr(kind_name(class.kind))),
        (
            "serial_cases",
            jarray(class.serial_cases.iter().map(|c| jstr(c.label()))),
        ),
        (
            "parallel_cases",
            jarray(class.parallel_cases.iter().map(|c| jstr(c.label()))),
        ),
        ("notes", jarray(notes)),
        ("margin_serial", jnum(jac.serial_margin())),
        ("margin_parallel", jnum(jac.parallel_margin())),
        ("det_a", jnum(jac.det_a())),
        ("det_b", jnum(jac.det_b())),
    ]);
    Ok(Rendered::report(json))
}

fn cmd_workspace(p: &GeometryParams, args: &WorkspaceArgs, has_out: bool) -> CmdResult {
    let joint_grids = [&args.grid_y1, &args.grid_y2, &args.grid_y3];
    let slice_given = args.beta.is_some() || args.grid_y.is_some() || args.grid_z.is_some();
    let joint_given = joint_grids.iter().any(|g| g.is_some());

    let (mode, cloud) = if joint_given && !slice_given {
        let (Some(y1), Some(y2), Some(y3)) = (args.grid_y1, args.grid_y2, args.grid_y3) else {
            return Err(Failure::usage(
                "a joint sweep needs all three of --grid-y1, --grid-y2, --grid-y3",
            ));
        };
        let grid = SampleGrid { y1, y2, y3 };
        ("joint-grid", sample_workspace(p, &grid, args.branch))
    } else if slice_given && !joint_given {
        let (Some(beta), Some(gy), Some(gz)) = (args.beta, args.grid_y, args.grid_z) else {
            return Err(Failure::usage(
                "a fixed-tilt slice needs all three of --beta, --grid-y, --grid-z",
            ));
        };
        (
            "constant-orientation",
            constant_orientation_slice(p, &gy, &gz, beta, args.branch),
        )
    } else {
        return Err(Failure::usage(
            "pass either --grid-y1/--grid-y2/--grid-y3 (joint sweep) or --beta/--grid-y/--grid-z (fixed-tilt slice)",
        ));
    };

    let csv = cloud.to_csv_string();
    if has_out {
        // The CSV goes to the file; a short summary goes to standard output.
        let summary = toplevel(&[
            ("command", jstr("workspace")),
            ("mode", jstr(mode)),
            ("branch", format!("\"{}\"", args.branch)),
            ("records", cloud.len().to_string()),
        ]);
        Ok(Rendered {
            stdout: summary,
            file: Some(csv),
        })
    } else {
        Ok(Rendered {
            stdout: csv,
            file: None,
        })
    }
}

fn loop_json(l: &LoopSpec) -> String {
    format!(
        "{{\"notation\": {}, \"joints\": {}, \"actuated\": {}}}",
        jstr(&l.notation),
        l.freedoms(),
        l.actuated
    )
}

fn int_array<I: IntoIterator<Item = String>>(items: I) -> String {
    jarray(items)
}

fn cmd_topology(args: &TopologyArgs) -> CmdResult {
    if args.loops.is_empty() {
        if !args.actuated.is_empty() || !args.xi.is_empty() {
            return Err(Failure::usage(
                "--actuated and --xi only apply together with --loop",
            ));
        }
        return Ok(Rendered::report(reference_topology_json()));
    }
    if args.actuated.len() != args.loops.len() || args.xi.len() != args.loops.len() {
        return Err(Failure::usage(format!(
            "{} --loop flags need exactly as many --actuated and --xi flags (got {} and {})",
            args.loops.len(),
            args.actuated.len(),
            args.xi.len()
        )));
    }
    if let Some(bad) = args.xi.iter().find(|&&x| x > 6) {
        return Err(Failure::usage(format!(
            "--xi {bad} is impossible: a loop has at most 6 independent equations"
        )));
    }
    let mut loops = Vec::with_capacity(args.loops.len());
    for (notation, &actuated) in args.loops.iter().zip(&args.actuated) {
        loops.push(
            parse_loop(notation, actuated)
                .map_err(|e| Failure::usage(format!("in loop `{notation}`: {e}")))?,
        );
    }
    let report = mobility_from_counts(&loops, &args.xi);
    let json = toplevel(&[
        ("command", jstr("topology")),
        ("mode", jstr("custom")),
        ("loops", jarray(loops.iter().map(loop_json))),
        (
            "xi",
            int_array(report.xi.iter().map(|x| x.to_string())),
        ),
        ("f", report.f.to_string()),
        (
            "delta",
            int_array(report.delta.iter().map(|d| d.to_string())),
        ),
        ("kappa", jnum(report.kappa)),
    ]);
    Ok(Rendered::report(json))
}

fn reference_topology_json() -> String {
    let t = reference_topology();
    let limb_pocs = t.limb_pocs.iter().map(|poc| {
        format!(
            "{{\"poc\": {}, \"type\": {}}}",
            jstr(&poc.to_string()),
            jstr(&poc.type_name())
        )
    });
    toplevel(&[
        ("command", jstr("topology")),
        ("mode", jstr("built-in")),
        ("loops", jarray(t.loops.iter().map(loop_json))),
        ("limb_pocs", jarray(limb_pocs)),
        (
            "xi",
            int_array(t.report.xi.iter().map(|x| x.to_string())),
        ),
        ("f", t.report.f.to_string()),
        (
            "delta",
            int_array(t.report.delta.iter().map(|d| d.to_string())),
        ),
        ("kappa", jnum(t.report.kappa)),
        (
            "sub_pm",
            format!(
                "{{\"poc\": {}, \"type\": {}, \"dof\": {}}}",
                jstr(&t.sub_pm_poc.to_string()),
                jstr(&t.sub_pm_poc.type_name()),
                t.sub_pm_dof
            ),
        ),
        (
            "platform",
            format!(
                "{{\"poc\": {}, \"type\": {}, \"dof\": {}}}",
                jstr(&t.arm_poc.to_string()),
                jstr(&t.arm_poc.type_name()),
                t.report.f
            ),
        ),
        ("formula", jstr(&t.formula)),
    ])
}

fn cmd_design(args: &DesignArgs) -> CmdResult {
    if !(args.a.is_finite() && args.a > 0.0) {
        return Err(Failure::usage(format!(
            "--a must be a positive length (got {})",
            args.a
        )));
    }
    if !(args.beta_lo <= args.beta_hi)
        || args.beta_lo <= -FRAC_PI_2
        || args.beta_hi >= FRAC_PI_2
    {
        return Err(Failure::usage(format!(
            "the tilt range must be ordered and inside (-pi/2, pi/2) (got {}..{})",
            args.beta_lo, args.beta_hi
        )));
    }
    let theta_min = args.theta_min.unwrap_or_else(|| 0.2f64.asin());
    if !(theta_min > 0.0 && theta_min < FRAC_PI_2) {
        return Err(Failure::usage(format!(
            "--theta-min must lie in (0, pi/2) (got {theta_min})"
        )));
    }
    if !(args.tol.is_finite() && args.tol > 0.0) {
        return Err(Failure::usage(format!(
            "--tol must be a positive length (got {})",
            args.tol
        )));
    }

    let spec = DesignSpec {
        a: args.a,
        beta_range: (args.beta_lo, args.beta_hi),
        theta_min,
        beta_clearance: args.clearance,
    };
    let map_err = |e: DesignError| Failure::domain(e.to_string());
    let legs = clearance_lengths(&spec).map_err(map_err)?;
    let coupler = min_l6_search(&spec, args.tol).map_err(map_err)?;

    let (ref_l2, ref_l4, ref_l6) = REFERENCE_ROUNDED_LENGTHS;
    let json = toplevel(&[
        ("command", jstr("design")),
        (
            "inputs",
            format!(
                "{{\"a\": {}, \"beta_lo\": {}, \"beta_hi\": {}, \"theta_min\": {}, \"clearance\": {}, \"tol\": {}}}",
                jnum(args.a),
                jnum(args.beta_lo),
                jnum(args.beta_hi),
                jnum(theta_min),
                jnum(args.clearance),
                jnum(args.tol)
            ),
        ),
        ("l2", jnum(legs.l2)),
        ("l4", jnum(legs.l4)),
        ("l7", jnum(coupler.l7)),
        ("l6_min", jnum(coupler.l6_min)),
        ("beta_critical", jnum(coupler.beta_critical)),
        ("sin_theta", jnum(coupler.sin_theta)),
        (
            "reference_comparison",
            format!(
                "{{\"l2\": {}, \"l4\": {}, \"l6\": {}}}",
                jnum(ref_l2),
                jnum(ref_l4),
                jnum(ref_l6)
            ),
        ),
    ]);
    Ok(Rendered::report(json))
}
