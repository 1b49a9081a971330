//! Link dimensioning: clearance-driven leg lengths and the minimal coupler
//! length that keeps a tilt range usable.
//!
//! Three pieces:
//!
//! * [`clearance_lengths`] sizes the folding-leg bar l2 and the rod l4 so
//!   that the platform clears the rails with a safety angle to spare;
//! * [`platform_constraints`] evaluates, for a candidate coupler length l6
//!   and arm length l7, the coupler loop-closure residual and the
//!   transmission angle θ between coupler and arm;
//! * [`min_l6_search`] finds the smallest l6 for which every tilt in the
//!   design range admits a closure with sin θ above a floor — small θ means
//!   the coupler pushes along the arm and transmission degrades, which is
//!   exactly the parallel-singular alignment (the tilt Jacobian factor is
//!   proportional to l6·l7·sin θ).
//!
//! The search is a max-over-β of a per-β minimal l6. For fixed β the
//! feasibility set in l6 is upward closed (raising l6 swings the coupler
//! further from the arm), so the inner problem is a bisection; the outer
//! maximum runs on a dense β grid with golden-section refinement.

use rayon::prelude::*;
use std::f64::consts::{FRAC_PI_2, SQRT_2};

/// Inputs to the dimensioning procedures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignSpec {
    /// Half the rail spacing, mm.
    pub a: f64,
    /// Tilt range (lo, hi) the design must cover, rad; must sit strictly
    /// inside (−π/2, π/2).
    pub beta_range: (f64, f64),
    /// Transmission-angle floor: require sin θ ≥ sin(theta_min).
    pub theta_min: f64,
    /// Clearance angle for the leg-length sizing, rad.
    pub beta_clearance: f64,
}

impl Default for DesignSpec {
    /// The worked reference design: a = 300 mm, tilts to ±45°, sin θ ≥ 1/5,
    /// clearance angle 1/10 rad.
    fn default() -> Self {
        Self {
            a: 300.0,
            beta_range: (-std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_4),
            theta_min: 0.2f64.asin(),
            beta_clearance: 0.1,
        }
    }
}

impl DesignSpec {
    /// The arm length rule paired with the search: l7 = 2a√2, which makes
    /// the arm tip reach the far rail exactly at β = ±π/4.
    pub fn arm_length(&self) -> f64 {
        2.0 * self.a * SQRT_2
    }

    fn validate(&self) -> Result<(), DesignError> {
        if !(self.a > 0.0) {
            return Err(DesignError::Domain(format!(
                "rail half-spacing must be positive (got {})",
                self.a
            )));
        }
        let (lo, hi) = self.beta_range;
        if !(lo <= hi) || lo <= -FRAC_PI_2 || hi >= FRAC_PI_2 {
            return Err(DesignError::Domain(format!(
                "tilt range must be ordered and inside (-pi/2, pi/2) (got {lo}..{hi})"
            )));
        }
        if !(self.theta_min > 0.0 && self.theta_min < FRAC_PI_2) {
            return Err(DesignError::Domain(format!(
                "transmission-angle floor must lie in (0, pi/2) (got {})",
                self.theta_min
            )));
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum DesignError {
    #[error("{0}")]
    Domain(String),
    #[error(
        "no coupler length up to {cap} mm keeps sin(theta) above the floor at beta = {beta}"
    )]
    Infeasible { cap: f64, beta: f64 },
}

/// Leg lengths sized by the clearance rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClearanceLengths {
    /// One bar of the folding support leg, mm.
    pub l2: f64,
    /// The fixed-length rod of leg 2, mm; always exactly 2·l2.
    pub l4: f64,
}

/// Sizes l2 and l4 from the clearance angle c:
/// `l2 = a / (cos c − sin c)` and `l4 = 2·l2`.
///
/// # Errors
///
/// [`DesignError::Domain`] when cos c ≤ sin c (c ≥ π/4: the clearance
/// construction degenerates).
pub fn clearance_lengths(spec: &DesignSpec) -> Result<ClearanceLengths, DesignError> {
    if !(spec.a > 0.0) {
        return Err(DesignError::Domain(format!(
            "rail half-spacing must be positive (got {})",
            spec.a
        )));
    }
    let c = spec.beta_clearance;
    let denom = c.cos() - c.sin();
    if denom <= 0.0 {
        return Err(DesignError::Domain(format!(
            "clearance angle {c} rad has cos c <= sin c; pick c < pi/4"
        )));
    }
    let l2 = spec.a / denom;
    Ok(ClearanceLengths { l2, l4: 2.0 * l2 })
}

/// Coupler-loop evaluation at one candidate configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlatformConstraint {
    /// `(2a − l7 cos β)² + (ρ + l7 sin β)² − l6²`: zero when the coupler
    /// closes, mm².
    pub closure_residual: f64,
    /// Angle between the coupler and the arm, rad, via a two-argument
    /// arctangent (well-defined even off closure).
    pub theta: f64,
}

/// Evaluates the coupler closure residual and transmission angle.
///
/// `rho` is the relative vertical offset between the two loop sides; the
/// horizontal gap is `G = 2a − l7 cos β` and the vertical one
/// `D = rho + l7 sin β`.
pub fn platform_constraints(a: f64, l6: f64, l7: f64, beta: f64, rho: f64) -> PlatformConstraint {
    let (sin_b, cos_b) = beta.sin_cos();
    let g = 2.0 * a - l7 * cos_b;
    let d = rho + l7 * sin_b;
    PlatformConstraint {
        closure_residual: g * g + d * d - l6 * l6,
        // the coupler vector (−g, d) expressed in the arm's frame
        theta: f64::atan2(d * cos_b + g * sin_b, g * cos_b - d * sin_b),
    }
}

/// Result of the minimal-coupler search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinCouplerResult {
    /// Smallest coupler length covering the whole tilt range, mm.
    pub l6_min: f64,
    /// The tilt that demands it, rad.
    pub beta_critical: f64,
    /// The arm length used, l7 = 2a√2.
    pub l7: f64,
    /// sin θ at the critical configuration; equals the floor when that
    /// constraint is active.
    pub sin_theta: f64,
}

/// Best achievable sin θ at (β, l6): the high-corner closure
/// `D = +√(l6² − G²)` maximizes `sin θ = (D cos β + G sin β)/l6` over the
/// two closure solutions whenever cos β > 0.
fn best_sin_theta(a: f64, l7: f64, beta: f64, l6: f64) -> Option<f64> {
    let g = 2.0 * a - l7 * beta.cos();
    let rad = l6 * l6 - g * g;
    if rad < 0.0 {
        return None; // coupler cannot span the gap at all
    }
    Some((rad.sqrt() * beta.cos() + g * beta.sin()) / l6)
}

/// Smallest l6 in (0, cap] with sin θ ≥ s_min at this β, to `tol`;
/// feasibility is upward closed in l6, so plain bisection applies.
fn per_beta_min_l6(
    a: f64,
    l7: f64,
    s_min: f64,
    beta: f64,
    cap: f64,
    tol: f64,
) -> Result<f64, DesignError> {
    let feasible = |l6: f64| best_sin_theta(a, l7, beta, l6).is_some_and(|s| s >= s_min);
    if !feasible(cap) {
        return Err(DesignError::Infeasible { cap, beta });
    }
    let g_abs = (2.0 * a - l7 * beta.cos()).abs();
    let mut lo = g_abs.max(f64::MIN_POSITIVE); // below |G| nothing closes
    if feasible(lo) {
        return Ok(lo);
    }
    let mut hi = cap;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Golden-section maximization of `f` on [lo, hi] to an x-tolerance.
fn golden_max<F>(f: F, mut lo: f64, mut hi: f64, tol_x: f64) -> Result<(f64, f64), DesignError>
where
    F: Fn(f64) -> Result<f64, DesignError>,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while hi - lo > tol_x {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2)?;
        }
    }
    let x = 0.5 * (lo + hi);
    Ok((x, f(x)?))
}

/// Finds the smallest coupler length l6 such that every tilt in
/// `spec.beta_range` admits a closure with sin θ ≥ sin(theta_min), using
/// the arm rule l7 = 2a√2 and a search cap of 10·a.
///
/// The β grid is evaluated in parallel; the reduction (max with
/// lowest-index tie break, then golden-section refinement around the
/// winner) is deterministic regardless of thread count.
///
/// # Errors
///
/// [`DesignError::Domain`] on an invalid spec or tolerance;
/// [`DesignError::Infeasible`] when even the cap fails at some tilt.
pub fn min_l6_search(spec: &DesignSpec, tol: f64) -> Result<MinCouplerResult, DesignError> {
    spec.validate()?;
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(DesignError::Domain(format!(
            "search tolerance must be positive (got {tol})"
        )));
    }
    let a = spec.a;
    let l7 = spec.arm_length();
    let s_min = spec.theta_min.sin();
    let cap = 10.0 * a;
    let inner_tol = (tol * 1e-3).clamp(1e-12, 1e-4);
    let per_beta = |beta: f64| per_beta_min_l6(a, l7, s_min, beta, cap, inner_tol);

    let finish = |l6_min: f64, beta_critical: f64| {
        let sin_theta =
            best_sin_theta(a, l7, beta_critical, l6_min).expect("feasible at the solution");
        MinCouplerResult {
            l6_min,
            beta_critical,
            l7,
            sin_theta,
        }
    };

    let (lo_b, hi_b) = spec.beta_range;
    if lo_b == hi_b {
        return Ok(finish(per_beta(lo_b)?, lo_b));
    }

    const GRID: usize = 513;
    let betas: Vec<f64> = (0..GRID)
        .map(|i| lo_b + (hi_b - lo_b) * (i as f64) / ((GRID - 1) as f64))
        .collect();
    let evaluated: Vec<Result<f64, DesignError>> =
        betas.par_iter().map(|&b| per_beta(b)).collect();
    let mut values = Vec::with_capacity(GRID);
    for v in evaluated {
        values.push(v?); // first error in grid order, independent of schedule
    }

    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }

    let bracket_lo = betas[best.saturating_sub(1)];
    let bracket_hi = betas[(best + 1).min(GRID - 1)];
    let (beta_ref, l6_ref) = golden_max(per_beta, bracket_lo, bracket_hi, 1e-4)?;

    if l6_ref >= values[best] {
        Ok(finish(l6_ref, beta_ref))
    } else {
        Ok(finish(values[best], betas[best]))
    }
}

/// Rounded target lengths of the worked reference design, for report
/// comparisons: (l2, l4, l6).
pub const REFERENCE_ROUNDED_LENGTHS: (f64, f64, f64) = (335.0, 670.0, 256.0);
