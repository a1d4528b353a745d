//! Quantum Brayton cycle assembly: two isobars joined by two adiabats.
//!
//! A cycle is specified by its anchor corner A, the compression ratio
//! r = coord_A / coord_B along the first isobar, and the pressure ratio
//! φ = F_low / F_high ∈ (0, 1]. The remaining corners follow from the
//! adiabatic constraints (F·coord² constant on adiabats), which fix the
//! scale factor λ = 1/√φ:
//!
//! ```text
//!   B = A with coord/r (isobar at F_high),  C = B rescaled by λ,
//!   D = C continued to coord_A·λ (isobar at F_low = φ F_high),
//!   A = D rescaled by 1/λ   (the closure check).
//! ```
//!
//! Heats are reported with the engine convention: `q_in` is absorbed on
//! stage 1 and `q_out` is *released* on stage 3 (both positive for an
//! engine, W = q_in − q_out). Subsystem heats `q1_loc`, `q2_loc` keep their
//! bare signs (positive = absorbed) because their sign reversal is exactly
//! the refrigerator phenomenon the fixed-F_y cycle exhibits.

use crate::error::{Error, Result};
use crate::numerics::Tolerances;
use crate::processes::{
    build_adiabat, build_isobar_with_force, heat_along, local_heat_along, work_along,
    DEFAULT_SAMPLES,
};
use crate::substance::{Coordinate, PairModel, Substance, ThermalPoint};

/// Relative residual allowed when the stage-3 continuation is folded back
/// onto the anchor.
pub const CLOSURE_REL: f64 = 1e-8;

/// Which Brayton cycle family to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycleKind {
    /// Single spin-1/2, isobars in the force conjugate to L = 1/B.
    SingleSpin,
    /// Coupled pair, isobars hold F_x (J fixed on the isobars).
    FixedFx,
    /// Coupled pair, isobars hold F_y (B fixed on the isobars).
    FixedFy,
}

impl CycleKind {
    /// The coordinate whose force the isobars hold.
    pub fn main_coordinate(self) -> Coordinate {
        match self {
            CycleKind::SingleSpin | CycleKind::FixedFx => Coordinate::X,
            CycleKind::FixedFy => Coordinate::Y,
        }
    }
}

/// A reversible quantum Brayton cycle: anchor corner plus the two ratios
/// that determine everything else.
#[derive(Debug, Clone)]
pub struct BraytonSpec {
    kind: CycleKind,
    anchor: ThermalPoint,
    r: f64,
    phi: f64,
}

impl BraytonSpec {
    pub fn new(kind: CycleKind, anchor: ThermalPoint, r: f64, phi: f64) -> Result<Self> {
        if !r.is_finite() || r <= 1.0 {
            return Err(Error::domain(format!(
                "compression ratio r must be > 1 (heat is absorbed on stage 1), got {r}"
            )));
        }
        if !phi.is_finite() || phi <= 0.0 || phi > 1.0 {
            return Err(Error::domain(format!(
                "pressure ratio phi must lie in (0, 1], got {phi}"
            )));
        }
        match (kind, anchor.substance()) {
            (CycleKind::SingleSpin, Substance::Single(_)) => {}
            (CycleKind::SingleSpin, _) => {
                return Err(Error::domain("a single-spin cycle needs a single-spin anchor"))
            }
            (CycleKind::FixedFx, Substance::Pair(_)) => {}
            (CycleKind::FixedFy, Substance::Pair(p)) if p.j() > 0.0 => {}
            (CycleKind::FixedFy, Substance::Pair(_)) => {
                return Err(Error::domain("a fixed-F_y cycle requires J > 0 at the anchor"))
            }
            (_, Substance::Single(_)) => {
                return Err(Error::domain("coupled-pair cycles need a pair anchor"))
            }
        }
        Ok(Self {
            kind,
            anchor,
            r,
            phi,
        })
    }

    pub fn kind(&self) -> CycleKind {
        self.kind
    }

    pub fn anchor(&self) -> &ThermalPoint {
        &self.anchor
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Adiabat scale factor λ = 1/√φ.
    pub fn lambda(&self) -> f64 {
        1.0 / self.phi.sqrt()
    }
}

/// The four solved corners of a Brayton cycle.
#[derive(Debug, Clone)]
pub struct CornerSet {
    pub a: ThermalPoint,
    pub b: ThermalPoint,
    pub c: ThermalPoint,
    pub d: ThermalPoint,
    /// Adiabat scale factor 1/√φ.
    pub lambda: f64,
    /// Relative closure residual |β_D/λ − β_A| / β_A.
    pub closure_residual: f64,
}

/// Solves corners B, C, D from the anchor by isobar continuation and
/// adiabatic rescaling, then verifies the cycle closes back onto A.
pub fn solve_corners(spec: &BraytonSpec, tol: &Tolerances) -> Result<CornerSet> {
    let main = spec.kind.main_coordinate();
    let anchor = &spec.anchor;
    let coord_a = anchor.substance().coordinate(main)?;
    let lambda = spec.lambda();

    let f_high = anchor.force(main)?;
    let stage1 = build_isobar_with_force(
        anchor,
        main,
        f_high,
        coord_a / spec.r,
        DEFAULT_SAMPLES,
        tol,
    )?;
    let corner_b = stage1.last().clone();

    let corner_c = ThermalPoint::new(
        corner_b.substance().rescaled(lambda)?,
        corner_b.beta() * lambda,
    )?;

    // stage 3 holds the analytically exact low force φ·F_high
    let stage3 = build_isobar_with_force(
        &corner_c,
        main,
        spec.phi * f_high,
        coord_a * lambda,
        DEFAULT_SAMPLES,
        tol,
    )?;
    let corner_d = stage3.last().clone();

    let beta_back = corner_d.beta() / lambda;
    let closure_residual = (beta_back - anchor.beta()).abs() / anchor.beta();
    if closure_residual > CLOSURE_REL {
        return Err(Error::NonClosure {
            residual: closure_residual,
            limit: CLOSURE_REL,
        });
    }

    Ok(CornerSet {
        a: anchor.clone(),
        b: corner_b,
        c: corner_c,
        d: corner_d,
        lambda,
        closure_residual,
    })
}

/// Heats, work, efficiency, and subsystem quantities for one cycle.
///
/// `q_in` / `q_out`: composite heat absorbed on stage 1 / released on
/// stage 3 (engine convention). `q1_loc` / `q2_loc`: heat absorbed by ONE
/// subsystem on stages 1 / 3 (signed; negative = released). `eta_loc` is
/// defined only while the subsystem operates as an engine (w_loc > 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleReport {
    pub q_in: f64,
    pub q_out: f64,
    pub w_net: f64,
    pub eta: f64,
    pub q1_loc: Option<f64>,
    pub q2_loc: Option<f64>,
    pub w_loc: Option<f64>,
    pub eta_loc: Option<f64>,
    pub refrigerator: bool,
    pub p_e_a: Option<f64>,
    pub p_e_b: Option<f64>,
}

fn cross_coordinate(main: Coordinate) -> Coordinate {
    match main {
        Coordinate::X => Coordinate::Y,
        Coordinate::Y => Coordinate::X,
    }
}

/// Closed-form cycle report from the solved corners (no quadrature).
pub fn brayton_report(corners: &CornerSet, spec: &BraytonSpec) -> Result<CycleReport> {
    let main = spec.kind.main_coordinate();
    let f1 = corners.a.force(main)?;
    let f0 = corners.c.force(main)?;
    let ca = corners.a.substance().coordinate(main)?;
    let cb = corners.b.substance().coordinate(main)?;
    let cc = corners.c.substance().coordinate(main)?;
    let cd = corners.d.substance().coordinate(main)?;

    // heat absorbed on stage 1 / released on stage 3, as
    // 2 F̄ Δcoord + Δ(F_cross)·coord_cross (the cross terms vanish exactly
    // in the uncoupled limit)
    let (cross_in, cross_out) = match spec.kind {
        CycleKind::SingleSpin => (0.0, 0.0),
        CycleKind::FixedFx | CycleKind::FixedFy => {
            let pair = corners.a.substance().as_pair().expect("validated pair");
            if spec.kind == CycleKind::FixedFx && pair.j() == 0.0 {
                (0.0, 0.0)
            } else {
                let cross = cross_coordinate(main);
                let k1 = corners.a.substance().coordinate(cross)?;
                let k0 = corners.c.substance().coordinate(cross)?;
                let f_cross_a = corners.a.force(cross)?;
                let f_cross_b = corners.b.force(cross)?;
                let f_cross_c = corners.c.force(cross)?;
                let f_cross_d = corners.d.force(cross)?;
                (
                    (f_cross_b - f_cross_a) * k1,
                    (f_cross_c - f_cross_d) * k0,
                )
            }
        }
    };
    let q_in = 2.0 * f1 * (cb - ca) + cross_in;
    let q_out = 2.0 * f0 * (cc - cd) + cross_out;
    let w_net = q_in - q_out;
    let eta = 1.0 - q_out / q_in;

    let (q1_loc, q2_loc, p_e_a, p_e_b) = match spec.kind {
        CycleKind::SingleSpin => (None, None, None, None),
        CycleKind::FixedFx => {
            // the subsystem runs a Brayton cycle at F_loc = F/2
            let q1 = f1 * (cb - ca);
            let q2 = f0 * (cd - cc);
            (
                Some(q1),
                Some(q2),
                Some(corners.a.local_state()?.p_e),
                Some(corners.b.local_state()?.p_e),
            )
        }
        CycleKind::FixedFy => {
            // the subsystem runs isochores: Q_loc = B Δp_e
            let b1 = corners.a.substance().b();
            let b0 = corners.c.substance().b();
            let p_ea = corners.a.local_state()?.p_e;
            let p_eb = corners.b.local_state()?.p_e;
            let p_ec = corners.c.local_state()?.p_e;
            let p_ed = corners.d.local_state()?.p_e;
            (
                Some(b1 * (p_eb - p_ea)),
                Some(b0 * (p_ed - p_ec)),
                Some(p_ea),
                Some(p_eb),
            )
        }
    };
    let w_loc = match (q1_loc, q2_loc) {
        (Some(q1), Some(q2)) => Some(q1 + q2),
        _ => None,
    };
    let eta_loc = match (q1_loc, w_loc) {
        (Some(q1), Some(w)) if w > 0.0 && q1 > 0.0 => Some(w / q1),
        _ => None,
    };
    let refrigerator = q1_loc.is_some_and(|q1| q1 < 0.0);

    Ok(CycleReport {
        q_in,
        q_out,
        w_net,
        eta,
        q1_loc,
        q2_loc,
        w_loc,
        eta_loc,
        refrigerator,
        p_e_a,
        p_e_b,
    })
}

/// Numerical twin of [`brayton_report`]: every field recomputed purely by
/// path integration over the four stages.
pub fn oracle_report(corners: &CornerSet, spec: &BraytonSpec, tol: &Tolerances) -> Result<CycleReport> {
    let main = spec.kind.main_coordinate();
    let f_high = corners.a.force(main)?;
    let stage1 = build_isobar_with_force(
        &corners.a,
        main,
        f_high,
        corners.b.substance().coordinate(main)?,
        DEFAULT_SAMPLES,
        tol,
    )?;
    let stage2 = build_adiabat(&corners.b, corners.lambda, DEFAULT_SAMPLES)?;
    let stage3 = build_isobar_with_force(
        &corners.c,
        main,
        spec.phi * f_high,
        corners.d.substance().coordinate(main)?,
        DEFAULT_SAMPLES,
        tol,
    )?;
    let stage4 = build_adiabat(&corners.d, 1.0 / corners.lambda, DEFAULT_SAMPLES)?;

    let q_in = heat_along(&stage1)?;
    let q_out = -heat_along(&stage3)?;
    let w_net = work_along(&stage1)?
        + work_along(&stage2)?
        + work_along(&stage3)?
        + work_along(&stage4)?;
    let eta = 1.0 - q_out / q_in;

    let is_pair = corners.a.substance().as_pair().is_some();
    let (q1_loc, q2_loc, w_loc, p_e_a, p_e_b) = if is_pair {
        let q1 = local_heat_along(&stage1)?;
        let q2 = local_heat_along(&stage3)?;
        let w = q1 + q2 + local_heat_along(&stage2)? + local_heat_along(&stage4)?;
        (
            Some(q1),
            Some(q2),
            Some(w),
            Some(corners.a.local_state()?.p_e),
            Some(corners.b.local_state()?.p_e),
        )
    } else {
        (None, None, None, None, None)
    };
    let eta_loc = match (q1_loc, w_loc) {
        (Some(q1), Some(w)) if w > 0.0 && q1 > 0.0 => Some(w / q1),
        _ => None,
    };
    let refrigerator = q1_loc.is_some_and(|q1| q1 < 0.0);

    Ok(CycleReport {
        q_in,
        q_out,
        w_net,
        eta,
        q1_loc,
        q2_loc,
        w_loc,
        eta_loc,
        refrigerator,
        p_e_a,
        p_e_b,
    })
}

/// Largest deviation from φ among the closed-cycle ratios
/// coord_A²/coord_D² = coord_B²/coord_C² = F_low/F_high
/// (= cross-coordinate and cross-force ratios for coupled pairs).
pub fn ratio_chain_residual(corners: &CornerSet, spec: &BraytonSpec) -> Result<f64> {
    let main = spec.kind.main_coordinate();
    let phi = spec.phi;
    let ca = corners.a.substance().coordinate(main)?;
    let cb = corners.b.substance().coordinate(main)?;
    let cc = corners.c.substance().coordinate(main)?;
    let cd = corners.d.substance().coordinate(main)?;
    let f1 = corners.a.force(main)?;
    let f0 = corners.c.force(main)?;

    let mut ratios = vec![(ca * ca) / (cd * cd), (cb * cb) / (cc * cc), f0 / f1];
    let has_cross = match (spec.kind, corners.a.substance().as_pair()) {
        (CycleKind::SingleSpin, _) => false,
        (CycleKind::FixedFx, Some(p)) => p.j() > 0.0,
        _ => true,
    };
    if has_cross {
        let cross = cross_coordinate(main);
        let k1 = corners.a.substance().coordinate(cross)?;
        let k0 = corners.c.substance().coordinate(cross)?;
        ratios.push((k1 * k1) / (k0 * k0));
        ratios.push(corners.c.force(cross)? / corners.b.force(cross)?);
        ratios.push(corners.d.force(cross)? / corners.a.force(cross)?);
    }
    Ok(ratios
        .iter()
        .map(|r| (r - phi).abs())
        .fold(0.0, f64::max))
}

/// The interaction contribution to the net work of a fixed-F_x cycle,
/// (F_yB − F_yA)·Y₁ − (F_yC − F_yD)·Y₀. Equals W_net − 2·W_loc in closed
/// form; `None` for other kinds or in the uncoupled limit.
pub fn interaction_bracket(corners: &CornerSet, spec: &BraytonSpec) -> Result<Option<f64>> {
    if spec.kind != CycleKind::FixedFx {
        return Ok(None);
    }
    let pair = corners.a.substance().as_pair().expect("validated pair");
    if pair.j() == 0.0 {
        return Ok(None);
    }
    let y1 = corners.a.substance().coordinate(Coordinate::Y)?;
    let y0 = corners.c.substance().coordinate(Coordinate::Y)?;
    let fy_a = corners.a.force(Coordinate::Y)?;
    let fy_b = corners.b.force(Coordinate::Y)?;
    let fy_c = corners.c.force(Coordinate::Y)?;
    let fy_d = corners.d.force(Coordinate::Y)?;
    Ok(Some((fy_b - fy_a) * y1 - (fy_c - fy_d) * y0))
}

/// How the anchor state is pinned while J/B varies across a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HoldMode {
    /// Fixed anchor temperature kT; the held force follows per point.
    AnchorTemperature { kt: f64 },
    /// Fixed held force; the anchor temperature is solved per point
    /// (smallest-β branch) and may be infeasible at large J.
    AnchorForce { f_high: f64 },
}

/// A family of cycles swept over the anchor coupling ratio J/B.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub kind: CycleKind,
    pub model: PairModel,
    /// Anchor magnetic field B.
    pub b: f64,
    pub r: f64,
    pub phi: f64,
    pub j_over_b_lo: f64,
    pub j_over_b_hi: f64,
    pub points: usize,
    pub hold: HoldMode,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.kind == CycleKind::SingleSpin {
            return Err(Error::domain("sweeps vary J/B and need a coupled-pair cycle"));
        }
        if !(self.b.is_finite() && self.b > 0.0) {
            return Err(Error::domain(format!("anchor field must be > 0, got {}", self.b)));
        }
        if self.points < 2 {
            return Err(Error::domain("a sweep needs at least 2 points"));
        }
        let lo = self.j_over_b_lo;
        let hi = self.j_over_b_hi;
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(Error::domain(format!("bad J/B range [{lo}, {hi}]")));
        }
        match self.kind {
            CycleKind::FixedFx if lo < 0.0 => {
                Err(Error::domain("J/B must be >= 0 for fixed-F_x sweeps"))
            }
            CycleKind::FixedFy if lo <= 0.0 => {
                Err(Error::domain("J/B must be > 0 for fixed-F_y sweeps"))
            }
            _ => match self.hold {
                HoldMode::AnchorTemperature { kt } if !(kt.is_finite() && kt > 0.0) => {
                    Err(Error::domain(format!("anchor kT must be > 0, got {kt}")))
                }
                HoldMode::AnchorForce { f_high } if !(f_high.is_finite() && f_high < 0.0) => {
                    Err(Error::domain(format!(
                        "held force must be finite and negative, got {f_high}"
                    )))
                }
                _ => Ok(()),
            },
        }
    }
}

/// One sweep grid point. Infeasible points keep their `j_over_b` and a
/// false `feasible` flag; all dependent fields are empty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub j_over_b: f64,
    pub feasible: bool,
    pub beta_a: Option<f64>,
    pub f_high: Option<f64>,
    pub q_in: Option<f64>,
    pub q_out: Option<f64>,
    pub w_net: Option<f64>,
    pub w_loc: Option<f64>,
    /// W_net / (2 W_loc); 1 in the uncoupled limit.
    pub w_ratio: Option<f64>,
    pub eta: Option<f64>,
    pub eta_loc: Option<f64>,
    pub refrigerator: Option<bool>,
}

impl SweepRow {
    fn infeasible(j_over_b: f64) -> Self {
        SweepRow {
            j_over_b,
            feasible: false,
            beta_a: None,
            f_high: None,
            q_in: None,
            q_out: None,
            w_net: None,
            w_loc: None,
            w_ratio: None,
            eta: None,
            eta_loc: None,
            refrigerator: None,
        }
    }
}

/// Smallest β > 0 with F(β) = `f_target`, found by a log-spaced downward
/// scan; deterministic and independent of any continuation history.
fn smallest_beta_for_force(
    substance: &Substance,
    which: Coordinate,
    f_target: f64,
    tol: &Tolerances,
) -> Result<f64> {
    if !f_target.is_finite() || f_target >= 0.0 {
        return Err(Error::InfeasibleForce {
            target: f_target,
            context: "generalized forces are strictly negative for beta > 0".into(),
        });
    }
    substance.force(1.0, which)?;
    let scale = substance.b().max(1e-3);
    let lo = 1e-7 / scale;
    let hi = 1e5 / scale;
    let n = 600;
    let g = |beta: f64| substance.force(beta, which).expect("domain pre-checked") - f_target;
    let mut prev = (lo, g(lo));
    for i in 1..=n {
        let beta = lo * (hi / lo).powf(i as f64 / n as f64);
        let val = g(beta);
        if val == 0.0 {
            return Ok(beta);
        }
        if val.signum() != prev.1.signum() {
            return crate::numerics::find_root(g, prev.0, beta, tol);
        }
        prev = (beta, val);
    }
    Err(Error::InfeasibleForce {
        target: f_target,
        context: format!("{which} on {substance:?}: no beta > 0 attains the force"),
    })
}

fn sweep_point(spec: &SweepSpec, j_over_b: f64, tol: &Tolerances) -> Result<SweepRow> {
    let j = j_over_b * spec.b;
    let pair = crate::substance::CoupledPair::with_model(spec.b, j, spec.model)?;
    let substance = Substance::Pair(pair);
    let main = spec.kind.main_coordinate();

    let beta_a = match spec.hold {
        HoldMode::AnchorTemperature { kt } => 1.0 / kt,
        HoldMode::AnchorForce { f_high } => {
            smallest_beta_for_force(&substance, main, f_high, tol)?
        }
    };
    let anchor = ThermalPoint::new(substance, beta_a)?;
    let f_high = anchor.force(main)?;
    let cycle = BraytonSpec::new(spec.kind, anchor, spec.r, spec.phi)?;
    let corners = solve_corners(&cycle, tol)?;
    let report = brayton_report(&corners, &cycle)?;

    let w_loc = report.w_loc.expect("pair cycles always carry local data");
    let w_ratio = (w_loc != 0.0).then(|| report.w_net / (2.0 * w_loc));
    Ok(SweepRow {
        j_over_b,
        feasible: true,
        beta_a: Some(beta_a),
        f_high: Some(f_high),
        q_in: Some(report.q_in),
        q_out: Some(report.q_out),
        w_net: Some(report.w_net),
        w_loc: Some(w_loc),
        w_ratio,
        eta: Some(report.eta),
        eta_loc: report.eta_loc,
        refrigerator: Some(report.refrigerator),
    })
}

/// Runs the sweep; per-point numerical failures become flagged rows rather
/// than errors, so feasibility boundaries show up in the output.
pub fn sweep(spec: &SweepSpec, tol: &Tolerances) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let n = spec.points;
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let t = if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
        let j_over_b = spec.j_over_b_lo + t * (spec.j_over_b_hi - spec.j_over_b_lo);
        match sweep_point(spec, j_over_b, tol) {
            Ok(row) => rows.push(row),
            Err(Error::Domain(msg)) => return Err(Error::Domain(msg)),
            Err(_) => rows.push(SweepRow::infeasible(j_over_b)),
        }
    }
    Ok(rows)
}

/// Locates the J/B at which the subsystem work W_loc changes sign, by
/// bisection between the first adjacent feasible sweep points that straddle
/// it. Resolved to 1e-6 in J/B; `None` when no sign change exists in range.
pub fn refrigerator_threshold(spec: &SweepSpec, tol: &Tolerances) -> Result<Option<f64>> {
    spec.validate()?;
    let rows = sweep(spec, tol)?;
    let w_loc_at = |j_over_b: f64| -> Result<f64> {
        Ok(sweep_point(spec, j_over_b, tol)?
            .w_loc
            .expect("feasible pair row"))
    };
    for pair in rows.windows(2) {
        let (lo, hi) = (&pair[0], &pair[1]);
        let (Some(w0), Some(w1)) = (lo.w_loc, hi.w_loc) else {
            continue;
        };
        if w0 == 0.0 {
            return Ok(Some(lo.j_over_b));
        }
        if w0.signum() == w1.signum() {
            continue;
        }
        let mut a = lo.j_over_b;
        let mut b = hi.j_over_b;
        let mut w_a = w0;
        while b - a > 1e-6 {
            let mid = 0.5 * (a + b);
            let w_mid = w_loc_at(mid)?;
            if w_mid == 0.0 {
                return Ok(Some(mid));
            }
            if w_mid.signum() == w_a.signum() {
                a = mid;
                w_a = w_mid;
            } else {
                b = mid;
            }
        }
        return Ok(Some(0.5 * (a + b)));
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::substance::single_spin_force;
    use approx::assert_relative_eq;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn fig2_spec() -> BraytonSpec {
        let anchor = ThermalPoint::new(Substance::xx_pair(1.0, 0.5).unwrap(), 2.0).unwrap();
        BraytonSpec::new(CycleKind::FixedFx, anchor, 3.0, 0.25).unwrap()
    }

    #[test]
    fn spec_validation() {
        let anchor = ThermalPoint::new(Substance::xx_pair(1.0, 0.5).unwrap(), 2.0).unwrap();
        assert!(BraytonSpec::new(CycleKind::FixedFx, anchor.clone(), 1.0, 0.25).is_err());
        assert!(BraytonSpec::new(CycleKind::FixedFx, anchor.clone(), 3.0, 1.5).is_err());
        assert!(BraytonSpec::new(CycleKind::SingleSpin, anchor.clone(), 3.0, 0.25).is_err());
        let uncoupled = ThermalPoint::new(Substance::xx_pair(1.0, 0.0).unwrap(), 2.0).unwrap();
        assert!(BraytonSpec::new(CycleKind::FixedFy, uncoupled, 3.0, 0.25).is_err());
        assert!(BraytonSpec::new(CycleKind::FixedFx, anchor, 3.0, 0.25).is_ok());
    }

    #[test]
    fn single_spin_corners_follow_the_ratio_relations() {
        // anchor L_A = 3, β_A = 6, r = 3, φ = 1/4 ⇒ L_B = 1, L_C = 2, L_D = 6
        let anchor = ThermalPoint::new(Substance::single(1.0 / 3.0).unwrap(), 6.0).unwrap();
        let spec = BraytonSpec::new(CycleKind::SingleSpin, anchor, 3.0, 0.25).unwrap();
        let corners = solve_corners(&spec, &tol()).unwrap();
        let l = |tp: &ThermalPoint| 1.0 / tp.substance().b();
        assert_relative_eq!(l(&corners.b), 1.0, max_relative = 1e-12);
        assert_relative_eq!(l(&corners.c), 2.0, max_relative = 1e-12);
        assert_relative_eq!(l(&corners.d), 6.0, max_relative = 1e-12);

        // β_B from the tanh inversion oracle: F(L_B, β_B) = F₁
        let f1 = single_spin_force(3.0, 6.0).unwrap();
        let beta_b_oracle = 2.0 * 1.0 * (-2.0 * 1.0 * 1.0 * f1).atanh();
        assert_relative_eq!(corners.b.beta(), beta_b_oracle, max_relative = 1e-9);

        // F L² constant across the adiabats
        let fl2 = |tp: &ThermalPoint| {
            let ll = l(tp);
            single_spin_force(ll, tp.beta()).unwrap() * ll * ll
        };
        assert!((fl2(&corners.b) - fl2(&corners.c)).abs() < 1e-10);
        assert!((fl2(&corners.d) - fl2(&corners.a)).abs() < 1e-10);
        assert!(corners.closure_residual <= CLOSURE_REL);
    }

    #[test]
    fn fixed_fx_corners_match_figure_parameters() {
        let corners = solve_corners(&fig2_spec(), &tol()).unwrap();
        let x = |tp: &ThermalPoint| 1.0 / tp.substance().b();
        let j = |tp: &ThermalPoint| tp.substance().as_pair().unwrap().j();
        assert_relative_eq!(corners.lambda, 2.0, max_relative = 1e-15);
        assert_relative_eq!(x(&corners.b), 1.0 / 3.0, max_relative = 1e-12);
        assert_relative_eq!(x(&corners.c), 2.0 / 3.0, max_relative = 1e-12);
        assert_relative_eq!(x(&corners.d), 2.0, max_relative = 1e-12);
        // Y₀ = 4 ⇔ J₀ = 0.25, held through stage 3
        assert_relative_eq!(j(&corners.c), 0.25, max_relative = 1e-15);
        assert_relative_eq!(j(&corners.d), 0.25, max_relative = 1e-15);
        assert!(corners.closure_residual <= CLOSURE_REL);
    }

    #[test]
    fn ratio_chain_closes() {
        let spec = fig2_spec();
        let corners = solve_corners(&spec, &tol()).unwrap();
        assert!(ratio_chain_residual(&corners, &spec).unwrap() < 1e-10);
    }

    #[test]
    fn degenerate_phi_one_cycle_does_no_work() {
        let anchor = ThermalPoint::new(Substance::xx_pair(1.0, 0.5).unwrap(), 2.0).unwrap();
        let spec = BraytonSpec::new(CycleKind::FixedFx, anchor, 3.0, 1.0).unwrap();
        let corners = solve_corners(&spec, &tol()).unwrap();
        let report = brayton_report(&corners, &spec).unwrap();
        // the two isobars coincide; the residual work is continuation roundoff
        assert!(report.w_net.abs() < 1e-10 * report.q_in.abs());
        assert!(report.eta.abs() < 1e-10);
    }

    #[test]
    fn efficiency_is_one_minus_sqrt_phi() {
        let spec = fig2_spec();
        let corners = solve_corners(&spec, &tol()).unwrap();
        let report = brayton_report(&corners, &spec).unwrap();
        assert!((report.eta - 0.5).abs() < 1e-10);
        // locals operate as an engine with the same efficiency
        assert!((report.eta_loc.unwrap() - 0.5).abs() < 1e-10);
        assert!(!report.refrigerator);
        assert!(report.w_net > 0.0 && report.q_in > 0.0 && report.q_out > 0.0);
    }

    #[test]
    fn uncoupled_limit_halves_the_work_exactly() {
        let anchor = ThermalPoint::new(Substance::xx_pair(1.0, 1e-6).unwrap(), 2.0).unwrap();
        let spec = BraytonSpec::new(CycleKind::FixedFx, anchor, 3.0, 0.25).unwrap();
        let corners = solve_corners(&spec, &tol()).unwrap();
        let report = brayton_report(&corners, &spec).unwrap();
        let ratio = report.w_net / (2.0 * report.w_loc.unwrap());
        assert!((ratio - 1.0).abs() < 1e-3);
    }

    #[test]
    fn oracle_matches_closed_forms_on_fig2_setup() {
        let spec = fig2_spec();
        let corners = solve_corners(&spec, &tol()).unwrap();
        let closed = brayton_report(&corners, &spec).unwrap();
        let oracle = oracle_report(&corners, &spec, &tol()).unwrap();
        let check = |a: f64, b: f64| {
            assert!((a - b).abs() <= 1e-7 * a.abs().max(b.abs()).max(1e-30), "{a} vs {b}");
        };
        check(closed.q_in, oracle.q_in);
        check(closed.q_out, oracle.q_out);
        check(closed.w_net, oracle.w_net);
        check(closed.w_loc.unwrap(), oracle.w_loc.unwrap());
        check(closed.q1_loc.unwrap(), oracle.q1_loc.unwrap());
        check(closed.q2_loc.unwrap(), oracle.q2_loc.unwrap());
    }

    #[test]
    fn interaction_bracket_equals_work_excess() {
        let spec = fig2_spec();
        let corners = solve_corners(&spec, &tol()).unwrap();
        let report = brayton_report(&corners, &spec).unwrap();
        let bracket = interaction_bracket(&corners, &spec).unwrap().unwrap();
        let excess = report.w_net - 2.0 * report.w_loc.unwrap();
        assert!((bracket - excess).abs() < 1e-10);
        assert!(bracket >= -1e-12);
    }

    #[test]
    fn temperature_held_sweep_has_uncoupled_baseline() {
        let spec = SweepSpec {
            kind: CycleKind::FixedFx,
            model: PairModel::Xx,
            b: 1.0,
            r: 3.0,
            phi: 0.25,
            j_over_b_lo: 0.0,
            j_over_b_hi: 2.0,
            points: 21,
            hold: HoldMode::AnchorTemperature { kt: 0.5 },
        };
        let rows = sweep(&spec, &tol()).unwrap();
        assert_eq!(rows.len(), 21);
        for r in rows.iter().filter(|r| r.feasible) {
            assert!(r.w_ratio.unwrap() >= 1.0 - 1e-12);
            assert!((r.eta.unwrap() - 0.5).abs() < 1e-10);
        }
        // W/(2 W_loc) → 1 as J → 0
        assert!((rows[0].w_ratio.unwrap() - 1.0).abs() < 1e-12);
        assert!(rows[10].w_ratio.unwrap() > rows[0].w_ratio.unwrap());
        // at kT = 0.5 the anchor crosses the force peak near J/B ≈ 1.1;
        // beyond it the monotone-X isobar does not exist and rows are flagged
        assert!(rows.iter().take(11).all(|r| r.feasible));
        assert!(rows.iter().any(|r| !r.feasible));
        // rows ordered by J/B
        for pair in rows.windows(2) {
            assert!(pair[0].j_over_b < pair[1].j_over_b);
        }
    }

    #[test]
    fn force_held_sweep_flags_infeasible_points() {
        // |F_x1| = 0.8 exceeds sup|F_x| once J grows past B
        let spec = SweepSpec {
            kind: CycleKind::FixedFx,
            model: PairModel::Xx,
            b: 1.0,
            r: 3.0,
            phi: 0.25,
            j_over_b_lo: 0.0,
            j_over_b_hi: 2.0,
            points: 21,
            hold: HoldMode::AnchorForce { f_high: -0.8 },
        };
        let rows = sweep(&spec, &tol()).unwrap();
        assert!(rows.first().unwrap().feasible);
        assert!(!rows.last().unwrap().feasible);
        let boundary = rows.iter().position(|r| !r.feasible).unwrap();
        assert!(boundary > 0);
        // infeasible rows expose only the grid coordinate
        assert!(rows[boundary].q_in.is_none());
        for r in rows.iter().filter(|r| r.feasible) {
            assert_relative_eq!(r.f_high.unwrap(), -0.8, max_relative = 1e-9);
        }
    }

    #[test]
    fn fixed_fy_sweep_crosses_into_the_refrigerator_regime() {
        let spec = SweepSpec {
            kind: CycleKind::FixedFy,
            model: PairModel::Xx,
            b: 1.0,
            r: 3.0,
            phi: 0.25,
            j_over_b_lo: 0.05,
            j_over_b_hi: 2.0,
            points: 41,
            hold: HoldMode::AnchorTemperature { kt: 0.5 },
        };
        let rows = sweep(&spec, &tol()).unwrap();
        let threshold = refrigerator_threshold(&spec, &tol()).unwrap().unwrap();
        assert!(threshold > 0.05 && threshold < 2.0);
        for r in &rows {
            let w_loc = r.w_loc.unwrap();
            let refrigerator = r.refrigerator.unwrap();
            if r.j_over_b < threshold - 1e-3 {
                assert!(w_loc > 0.0 && !refrigerator, "J/B = {}", r.j_over_b);
            }
            if r.j_over_b > threshold + 1e-3 {
                assert!(w_loc < 0.0 && refrigerator, "J/B = {}", r.j_over_b);
                assert!(r.w_net.unwrap() > 0.0); // composite stays an engine
                assert!(r.eta_loc.is_none()); // subsystem is not an engine
            }
            assert!((r.eta.unwrap() - 0.5).abs() < 1e-10);
        }
    }

    #[test]
    fn sweep_validation_rejects_bad_ranges() {
        let base = SweepSpec {
            kind: CycleKind::FixedFy,
            model: PairModel::Xx,
            b: 1.0,
            r: 3.0,
            phi: 0.25,
            j_over_b_lo: 0.0,
            j_over_b_hi: 2.0,
            points: 5,
            hold: HoldMode::AnchorTemperature { kt: 0.5 },
        };
        assert!(base.validate().is_err()); // lo = 0 with fixed-F_y
        let mut ok = base.clone();
        ok.j_over_b_lo = 0.1;
        assert!(ok.validate().is_ok());
        let mut single = base;
        single.kind = CycleKind::SingleSpin;
        assert!(single.validate().is_err());
    }
}
