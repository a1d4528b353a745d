//! Quasi-static process paths and definitional heat/work integration.
//!
//! A [`Path`] is a densely sampled sequence of thermal points realizing one
//! process. Isobars hold a generalized force constant by re-solving β at
//! every sample (continuation from the previous sample, so non-monotone
//! force-vs-β curves stay on one solution branch); adiabats rescale all
//! energy parameters together so every population is constant; isochores fix
//! the levels and vary β; isotherms fix β and vary one Hamiltonian
//! parameter.
//!
//! Heats and works are line integrals over the samples,
//! Q = ∫ Σ E_n dp_n and W_by = −∫ Σ p_n dE_n, evaluated by trapezoidal
//! Stieltjes sums with Romberg extrapolation across the 2^k+1 subsample
//! ladder. The coarse-vs-fine (129 vs 257 by default) discrepancy is the
//! convergence gate.

use crate::error::{Error, Result};
use crate::numerics::{find_root, Tolerances};
use crate::substance::{Coordinate, Substance, ThermalPoint};

/// Relative residual enforced on every isobar sample's held force.
pub const ISOBAR_FORCE_RESIDUAL_REL: f64 = 1e-10;
/// Relative disagreement between the half- and full-resolution line
/// integrals that raises `NoConvergence`.
pub const LINE_INTEGRAL_CHECK_REL: f64 = 1e-7;
/// Default path sampling density.
pub const DEFAULT_SAMPLES: usize = 257;
const MIN_SAMPLES: usize = 33;

/// What kind of process a path realizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathKind {
    IsobarX,
    IsobarY,
    Adiabat,
    Isochore,
    Isotherm,
}

/// The quantity a path holds fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Held {
    /// A generalized force (isobars).
    Force { which: Coordinate, value: f64 },
    /// All level populations, hence the entropy (adiabats).
    Populations { entropy: f64 },
    /// All energy levels (isochores).
    Levels,
    /// The inverse temperature (isotherms).
    Beta { value: f64 },
}

/// An ordered, densely sampled quasi-static process.
#[derive(Debug, Clone)]
pub struct Path {
    kind: PathKind,
    held: Held,
    points: Vec<ThermalPoint>,
}

impl Path {
    pub fn kind(&self) -> PathKind {
        self.kind
    }

    pub fn held(&self) -> Held {
        self.held
    }

    pub fn points(&self) -> &[ThermalPoint] {
        &self.points
    }

    pub fn first(&self) -> &ThermalPoint {
        &self.points[0]
    }

    pub fn last(&self) -> &ThermalPoint {
        self.points.last().expect("paths are never empty")
    }

    /// The same process traversed in the opposite direction.
    pub fn reversed(&self) -> Path {
        let mut points = self.points.clone();
        points.reverse();
        Path {
            kind: self.kind,
            held: self.held,
            points,
        }
    }
}

/// Rounds a requested sample count up to the next 2^k + 1 (the ladder the
/// Romberg extrapolation needs); rejects counts below 33.
fn snap_samples(n: usize) -> Result<usize> {
    if n < MIN_SAMPLES {
        return Err(Error::domain(format!(
            "n_samples must be at least {MIN_SAMPLES}, got {n}"
        )));
    }
    let mut panels = 32usize;
    while panels + 1 < n {
        panels *= 2;
    }
    Ok(panels + 1)
}

/// Solves for the β > 0 at which the substance attains `f_target` on the
/// coordinate `which`, on the solution branch nearest `beta_seed`.
///
/// The bracket is grown outward from the seed in log-β rings; the first
/// sign change on either side is refined with [`find_root`] and then
/// polished until the force residual is below
/// [`ISOBAR_FORCE_RESIDUAL_REL`] relative.
pub fn solve_beta_on_isobar(
    substance: &Substance,
    which: Coordinate,
    f_target: f64,
    beta_seed: f64,
    tol: &Tolerances,
) -> Result<f64> {
    if !f_target.is_finite() || f_target >= 0.0 {
        return Err(Error::InfeasibleForce {
            target: f_target,
            context: format!("{which}: generalized forces are strictly negative for beta > 0"),
        });
    }
    if !beta_seed.is_finite() || beta_seed <= 0.0 {
        return Err(Error::domain(format!(
            "continuation seed beta must be > 0, got {beta_seed}"
        )));
    }
    // surfaces Y-at-J=0 and similar domain problems before the scan
    substance.force(beta_seed, which)?;

    let g = |beta: f64| substance.force(beta, which).expect("domain pre-checked") - f_target;

    let g_seed = g(beta_seed);
    if g_seed == 0.0 {
        return Ok(beta_seed);
    }

    // Outward ring scan in log space around the seed.
    let mut bracket = None;
    let mut lo_prev = (beta_seed, g_seed);
    let mut hi_prev = (beta_seed, g_seed);
    let mut delta = 0.02;
    const GROWTH: f64 = 1.5;
    const MAX_LOG_SPAN: f64 = 23.0; // e^23 ≈ 1e10 each way

    while delta <= MAX_LOG_SPAN {
        let lo = beta_seed * (-delta).exp();
        let g_lo = g(lo);
        if g_lo == 0.0 {
            return Ok(lo);
        }
        if g_lo.signum() != lo_prev.1.signum() {
            bracket = Some((lo, lo_prev.0));
            break;
        }
        lo_prev = (lo, g_lo);

        let hi = beta_seed * delta.exp();
        let g_hi = g(hi);
        if g_hi == 0.0 {
            return Ok(hi);
        }
        if g_hi.signum() != hi_prev.1.signum() {
            bracket = Some((hi_prev.0, hi));
            break;
        }
        hi_prev = (hi, g_hi);

        delta *= GROWTH;
    }

    let (lo, hi) = bracket.ok_or_else(|| Error::InfeasibleForce {
        target: f_target,
        context: format!("{which} on {substance:?}: no beta > 0 attains the held force"),
    })?;

    // The root is refined in u = ln β, which makes the width criterion
    // relative to β at every scale; flat stretches of F(β) would otherwise
    // turn a small force residual into a large β error.
    let h = |u: f64| g(u.exp());
    let mut beta = find_root(h, lo.ln(), hi.ln(), tol)?.exp();
    let residual_limit = ISOBAR_FORCE_RESIDUAL_REL * f_target.abs();
    if g(beta).abs() > residual_limit {
        beta = polish_root(&h, lo.ln(), hi.ln(), residual_limit)?.exp();
    }
    Ok(beta)
}

/// Bisection fallback run until the residual itself (not the bracket width)
/// meets the force tolerance.
fn polish_root<G: Fn(f64) -> f64>(g: &G, mut lo: f64, mut hi: f64, limit: f64) -> Result<f64> {
    let mut g_lo = g(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let g_mid = g(mid);
        if g_mid.abs() <= limit {
            return Ok(mid);
        }
        if mid == lo || mid == hi {
            break;
        }
        if g_mid.signum() == g_lo.signum() {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::NoConvergence {
        what: "isobar force residual",
        limit: 200,
        residual: g(0.5 * (lo + hi)).abs(),
    })
}

/// Builds an isobaric path: the force conjugate to `which` is held at its
/// value at `s0` while that coordinate marches linearly to `coord_end`
/// (the other Hamiltonian parameter stays fixed) and β follows by
/// continuation.
pub fn build_isobar(
    s0: &ThermalPoint,
    which: Coordinate,
    coord_end: f64,
    n_samples: usize,
    tol: &Tolerances,
) -> Result<Path> {
    let f_held = s0.force(which)?;
    build_isobar_with_force(s0, which, f_held, coord_end, n_samples, tol)
}

/// Isobar with an explicitly prescribed held force. `s0` must already
/// satisfy it to within the isobar residual; cycle assembly passes the
/// exact φ-scaled force here so the low-pressure stage is not chained to
/// the rounding of the previous corner.
pub(crate) fn build_isobar_with_force(
    s0: &ThermalPoint,
    which: Coordinate,
    f_held: f64,
    coord_end: f64,
    n_samples: usize,
    tol: &Tolerances,
) -> Result<Path> {
    let n = snap_samples(n_samples)?;
    let coord_start = s0.substance().coordinate(which)?;
    if !coord_end.is_finite() || coord_end <= 0.0 {
        return Err(Error::domain(format!(
            "isobar endpoint coordinate must be > 0, got {coord_end}"
        )));
    }
    let start_residual = (s0.force(which)? - f_held).abs();
    if start_residual > ISOBAR_FORCE_RESIDUAL_REL * f_held.abs() {
        return Err(Error::domain(format!(
            "isobar start point misses the held force by {start_residual:e}"
        )));
    }
    let kind = match which {
        Coordinate::X => PathKind::IsobarX,
        Coordinate::Y => PathKind::IsobarY,
    };
    let held = Held::Force {
        which,
        value: f_held,
    };

    let mut points = Vec::with_capacity(n);
    points.push(s0.clone());
    if coord_end == coord_start {
        // degenerate (null) process
        for _ in 1..n {
            points.push(s0.clone());
        }
        return Ok(Path { kind, held, points });
    }

    let mut beta_prev = s0.beta();
    for i in 1..n {
        let t = i as f64 / (n - 1) as f64;
        let coord = coord_start + t * (coord_end - coord_start);
        let sub = s0.substance().with_coordinate(which, coord)?;
        let beta = solve_beta_on_isobar(&sub, which, f_held, beta_prev, tol)?;
        points.push(ThermalPoint::new(sub, beta)?);
        beta_prev = beta;
    }
    Ok(Path { kind, held, points })
}

/// Builds a quantum adiabatic path: every energy parameter is divided by a
/// factor that marches from 1 to `lambda` while β is multiplied by it, so
/// all βE_n products — hence all populations and the entropy — stay fixed.
pub fn build_adiabat(s0: &ThermalPoint, lambda: f64, n_samples: usize) -> Result<Path> {
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(Error::domain(format!(
            "adiabat scale factor must be > 0, got {lambda}"
        )));
    }
    let n = snap_samples(n_samples)?;
    let mut points = Vec::with_capacity(n);
    points.push(s0.clone());
    for i in 1..n {
        let t = i as f64 / (n - 1) as f64;
        let s = 1.0 + t * (lambda - 1.0);
        let sub = s0.substance().rescaled(s)?;
        points.push(ThermalPoint::new(sub, s0.beta() * s)?);
    }
    Ok(Path {
        kind: PathKind::Adiabat,
        held: Held::Populations {
            entropy: s0.entropy(),
        },
        points,
    })
}

/// Builds an isochoric path: the Hamiltonian (all levels) is fixed and β
/// marches linearly from its start value to `beta_end`.
pub fn build_isochore(s0: &ThermalPoint, beta_end: f64, n_samples: usize) -> Result<Path> {
    if !beta_end.is_finite() || beta_end <= 0.0 {
        return Err(Error::domain(format!(
            "isochore endpoint beta must be > 0, got {beta_end}"
        )));
    }
    let n = snap_samples(n_samples)?;
    let beta_start = s0.beta();
    let mut points = Vec::with_capacity(n);
    points.push(s0.clone());
    for i in 1..n {
        let t = i as f64 / (n - 1) as f64;
        let beta = beta_start + t * (beta_end - beta_start);
        points.push(ThermalPoint::new(*s0.substance(), beta)?);
    }
    Ok(Path {
        kind: PathKind::Isochore,
        held: Held::Levels,
        points,
    })
}

/// Which Hamiltonian parameter an isotherm varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsothermVary {
    /// Magnetic field B.
    Field,
    /// Coupling constant J (pairs only).
    Coupling,
}

/// Builds an isothermal path: β is fixed while B or J marches linearly to
/// `end_value`.
pub fn build_isotherm(
    s0: &ThermalPoint,
    vary: IsothermVary,
    end_value: f64,
    n_samples: usize,
) -> Result<Path> {
    let n = snap_samples(n_samples)?;
    let beta = s0.beta();
    let start = match (vary, s0.substance()) {
        (IsothermVary::Field, sub) => sub.b(),
        (IsothermVary::Coupling, Substance::Pair(p)) => p.j(),
        (IsothermVary::Coupling, Substance::Single(_)) => {
            return Err(Error::domain("a single spin has no coupling to vary"))
        }
    };
    if !end_value.is_finite() {
        return Err(Error::domain("isotherm endpoint must be finite"));
    }
    let mut points = Vec::with_capacity(n);
    points.push(s0.clone());
    for i in 1..n {
        let t = i as f64 / (n - 1) as f64;
        let v = start + t * (end_value - start);
        let sub = match (vary, s0.substance()) {
            (IsothermVary::Field, Substance::Single(_)) => Substance::single(v)?,
            (IsothermVary::Field, Substance::Pair(p)) => Substance::Pair(
                crate::substance::CoupledPair::with_model(v, p.j(), p.model())?,
            ),
            (IsothermVary::Coupling, Substance::Pair(p)) => Substance::Pair(
                crate::substance::CoupledPair::with_model(p.b(), v, p.model())?,
            ),
            (IsothermVary::Coupling, Substance::Single(_)) => unreachable!(),
        };
        points.push(ThermalPoint::new(sub, beta)?);
    }
    Ok(Path {
        kind: PathKind::Isotherm,
        held: Held::Beta { value: beta },
        points,
    })
}

/// Trapezoidal Stieltjes sum Σ ½(v_i + v_{i+s})(μ_{i+s} − μ_i) at stride `s`.
fn stieltjes_sum(values: &[f64], measure: &[f64], stride: usize) -> f64 {
    let mut acc = 0.0;
    let mut i = 0;
    while i + stride < values.len() {
        acc += 0.5 * (values[i] + values[i + stride]) * (measure[i + stride] - measure[i]);
        i += stride;
    }
    acc
}

/// Romberg-extrapolated line integral Σ_levels ∫ v dμ over equally spaced
/// samples (2^m + 1 of them). Returns the finest extrapolant after checking
/// it against the one built from every second sample.
fn line_integral(values: &[Vec<f64>], measures: &[Vec<f64>]) -> Result<f64> {
    let n = values.first().map_or(0, Vec::len);
    debug_assert!(n >= 5 && (n - 1).is_power_of_two());
    debug_assert!(values.len() == measures.len());

    let m = (n - 1).trailing_zeros() as usize;
    // diag[j] = Romberg diagonal after incorporating level j (2^j panels)
    let mut row: Vec<f64> = Vec::with_capacity(m + 1);
    let mut prev_diag = f64::NAN;
    for j in 0..=m {
        let stride = (n - 1) >> j;
        let v: f64 = values
            .iter()
            .zip(measures)
            .map(|(val, mu)| stieltjes_sum(val, mu, stride))
            .sum();
        let mut current = v;
        let mut factor = 1.0;
        for entry in row.iter_mut() {
            factor *= 4.0;
            let refined = current + (current - *entry) / (factor - 1.0);
            *entry = current;
            current = refined;
        }
        row.push(current);
        if j == m - 1 {
            prev_diag = current;
        }
    }
    let result = *row.last().expect("at least one Romberg level");

    let scale = values
        .iter()
        .chain(measures)
        .flat_map(|v| v.iter())
        .fold(1.0_f64, |acc, &x| acc.max(x.abs()));
    let disagreement = (result - prev_diag).abs();
    if disagreement > LINE_INTEGRAL_CHECK_REL * result.abs() + 1e-12 * scale {
        return Err(Error::NoConvergence {
            what: "path line integral (half- vs full-resolution check)",
            limit: m,
            residual: disagreement,
        });
    }
    Ok(result)
}

/// Per-level series (energies, populations) extracted from a path.
fn level_series(p: &Path) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let pts = p.points();
    let n_levels = pts[0].probs().len();
    let mut energies = vec![Vec::with_capacity(pts.len()); n_levels];
    let mut probs = vec![Vec::with_capacity(pts.len()); n_levels];
    for tp in pts {
        let es = tp.substance().spectrum().energies();
        for (lvl, &e) in es.iter().enumerate() {
            energies[lvl].push(e);
            probs[lvl].push(tp.probs()[lvl]);
        }
    }
    (energies, probs)
}

/// Heat absorbed by the working substance along the path, Q = ∫ Σ E_n dp_n.
pub fn heat_along(p: &Path) -> Result<f64> {
    let (energies, probs) = level_series(p);
    line_integral(&energies, &probs)
}

/// Work done BY the working substance along the path, W = −∫ Σ p_n dE_n.
pub fn work_along(p: &Path) -> Result<f64> {
    let (energies, probs) = level_series(p);
    line_integral(&probs, &energies).map(|v| -v)
}

/// Heat, work, and internal-energy change of one path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatWork {
    /// Heat absorbed by the system (positive = absorbed).
    pub q: f64,
    /// Work done by the system.
    pub w_by: f64,
    /// Internal-energy change U(end) − U(start).
    pub du: f64,
}

pub fn heat_work(p: &Path) -> Result<HeatWork> {
    Ok(HeatWork {
        q: heat_along(p)?,
        w_by: work_along(p)?,
        du: p.last().internal_energy() - p.first().internal_energy(),
    })
}

/// Heat absorbed by ONE subsystem of a coupled pair along the path,
/// ∫ Σ E_n^loc dp_n^loc with instantaneous local levels ±B/2 and the
/// reduced-state populations.
pub fn local_heat_along(p: &Path) -> Result<f64> {
    let pts = p.points();
    let n = pts.len();
    let mut e_up = Vec::with_capacity(n);
    let mut e_down = Vec::with_capacity(n);
    let mut p_up = Vec::with_capacity(n);
    let mut p_down = Vec::with_capacity(n);
    for tp in pts {
        let loc = tp.local_state()?;
        let half_b = 0.5 * tp.substance().b();
        e_up.push(half_b);
        e_down.push(-half_b);
        p_up.push(loc.p_e);
        p_down.push(loc.p_g);
    }
    line_integral(&[e_up, e_down], &[p_up, p_down])
}

/// Central-difference partial derivatives (∂S/∂B, ∂S/∂J) of the XX-pair
/// entropy at fixed β.
pub fn entropy_partials(b: f64, j: f64, beta: f64, tol: &Tolerances) -> Result<(f64, f64)> {
    if !(b > 0.0 && j > 0.0 && beta > 0.0) || !(b + j + beta).is_finite() {
        return Err(Error::domain(format!(
            "entropy_partials requires B, J, beta > 0 (got B={b}, J={j}, beta={beta})"
        )));
    }
    let s = |bb: f64, jj: f64| -> Result<f64> {
        Ok(ThermalPoint::new(Substance::xx_pair(bb, jj)?, beta)?.entropy())
    };
    let diff = |x: f64, f: &dyn Fn(f64) -> Result<f64>| -> Result<f64> {
        // step clamped so x − h stays positive
        let h = (tol.fd_step * x.abs().max(1.0)).min(0.5 * x);
        Ok((f(x + h)? - f(x - h)?) / (2.0 * h))
    };
    let ds_db = diff(b, &|bb| s(bb, j))?;
    let ds_dj = diff(j, &|jj| s(b, jj))?;
    Ok((ds_db, ds_dj))
}

/// Which Hamiltonian parameter the low-temperature isothermal step bumps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bump {
    /// B → B + step at fixed J.
    Field,
    /// J → J + step at fixed B.
    Coupling,
}

/// Heat directions across a small isothermal step at the degeneracy point
/// B = J of the XX pair, at low temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsothermalRecord {
    pub bump: Bump,
    /// Heat exchanged by the composite system, T·ΔS (positive = absorbed).
    pub total_heat: f64,
    /// Heat exchanged by one subsystem along the same step.
    pub local_heat: f64,
    /// Reduced-state excited population at the start of the step.
    pub p_e_start: f64,
    /// Entropy change of the composite across the step.
    pub entropy_change: f64,
}

impl IsothermalRecord {
    pub fn total_absorbs(&self) -> bool {
        self.total_heat > 0.0
    }

    pub fn local_absorbs(&self) -> bool {
        self.local_heat > 0.0
    }
}

/// Analyzes the heat directions of an isothermal parameter bump starting
/// from B = J at low temperature (the composite must sit in its two lowest
/// levels with probability > 0.99).
pub fn isothermal_heat_directions(
    b: f64,
    j: f64,
    beta: f64,
    bump: Bump,
    step: f64,
    tol: &Tolerances,
) -> Result<IsothermalRecord> {
    if (b - j).abs() > 1e-12 * b.abs().max(j.abs()).max(1.0) {
        return Err(Error::domain(format!(
            "isothermal heat-direction analysis starts from B = J, got B={b}, J={j}"
        )));
    }
    if !step.is_finite() || step <= 0.0 {
        return Err(Error::domain(format!("step must be > 0, got {step}")));
    }
    let start = ThermalPoint::new(Substance::xx_pair(b, j)?, beta)?;
    let ground_manifold = start.probs()[0] + start.probs()[1];
    if ground_manifold <= 0.99 {
        return Err(Error::domain(format!(
            "temperature too high: lowest two levels carry {ground_manifold:.4} < 0.99 \
             of the population"
        )));
    }
    let _ = tol;
    let (vary, end) = match bump {
        Bump::Field => (IsothermVary::Field, b + step),
        Bump::Coupling => (IsothermVary::Coupling, j + step),
    };
    let path = build_isotherm(&start, vary, end, DEFAULT_SAMPLES)?;
    let entropy_change = path.last().entropy() - start.entropy();
    Ok(IsothermalRecord {
        bump,
        total_heat: entropy_change / beta,
        local_heat: local_heat_along(&path)?,
        p_e_start: start.local_state()?.p_e,
        entropy_change,
    })
}
