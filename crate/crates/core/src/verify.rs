//! Self-contained verification suite: every closed form in the crate is
//! checked against a definitional numerical oracle (finite differences,
//! path quadrature, dense scans), plus the qualitative regime checks the
//! cycle families must reproduce.
//!
//! The same checks back both `cargo test` (the acceptance suite) and the
//! CLI `verify` subcommand. Randomized pieces use a fixed seed, so a pass
//! or a failure is always reproducible.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cycles::{
    brayton_report, interaction_bracket, oracle_report, ratio_chain_residual, solve_corners,
    BraytonSpec, CornerSet, CycleKind, HoldMode, SweepSpec, CLOSURE_REL,
};
use crate::error::Result;
use crate::numerics::{central_diff, find_root, integrate, Tolerances};
use crate::processes::{build_adiabat, isothermal_heat_directions, Bump};
use crate::substance::{
    single_spin_force, Coordinate, CoupledPair, PairModel, Substance, ThermalPoint,
};

const SEED: u64 = 0x0051_7EED_CAFE;

/// Outcome of one named check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn from_run(name: &'static str, run: impl FnOnce() -> Result<(bool, String)>) -> Self {
        match run() {
            Ok((passed, detail)) => CheckResult {
                name,
                passed,
                detail,
            },
            Err(e) => CheckResult {
                name,
                passed: false,
                detail: format!("errored: {e}"),
            },
        }
    }
}

/// Runs the full suite in a fixed order.
pub fn run_all(tol: &Tolerances) -> Vec<CheckResult> {
    vec![
        CheckResult::from_run("kernel-sanity", || kernel_sanity(tol)),
        CheckResult::from_run("gibbs-normalization", || gibbs_normalization()),
        CheckResult::from_run("criterion-01-identity-suite", || identity_suite(PairModel::Xx)),
        CheckResult::from_run("criterion-02-force-oracle", || force_oracle(tol)),
        CheckResult::from_run("criterion-03-adiabat-suite", || adiabat_suite()),
        CheckResult::from_run("criterion-04-cycle-equivalence", || cycle_equivalence(tol)),
        CheckResult::from_run("criterion-05-closure-ratio-chain", || {
            closure_and_ratio_chain(tol)
        }),
        CheckResult::from_run("criterion-06-uncoupled-limit", || uncoupled_limit(tol)),
        CheckResult::from_run("criterion-07-coupling-enhancement", || {
            coupling_enhancement(tol)
        }),
        CheckResult::from_run("criterion-08-refrigerator-regime", || {
            refrigerator_regime(tol)
        }),
        CheckResult::from_run("criterion-09-isothermal-directions", || {
            isothermal_directions(tol)
        }),
        CheckResult::from_run("criterion-10-general-xy-regression", || {
            general_xy_regression(tol)
        }),
    ]
}

struct ResidualTracker {
    worst: f64,
    failures: usize,
    total: usize,
}

impl ResidualTracker {
    fn new() -> Self {
        Self {
            worst: 0.0,
            failures: 0,
            total: 0,
        }
    }

    fn check(&mut self, residual: f64, limit: f64) {
        self.total += 1;
        if !(residual <= limit) {
            self.failures += 1;
        }
        if residual > self.worst || !residual.is_finite() {
            self.worst = residual;
        }
    }

    fn ok(&self) -> bool {
        self.failures == 0
    }

    fn summary(&self, what: &str) -> String {
        format!(
            "{}: {} of {} points failed, worst residual {:.3e}",
            what, self.failures, self.total, self.worst
        )
    }
}

fn scaled(diff: f64, scale: f64) -> f64 {
    diff.abs() / scale.abs().max(1.0)
}

// ---------------------------------------------------------------- kernels

fn kernel_sanity(tol: &Tolerances) -> Result<(bool, String)> {
    let mut t = ResidualTracker::new();
    let root = find_root(|x| x.tanh() - 0.5, 0.0, 5.0, tol)?;
    t.check((root - 0.5f64.atanh()).abs(), 1e-10);
    let integral = integrate(f64::cosh, 0.0, 2.0, tol)?;
    t.check((integral - 2.0f64.sinh()).abs(), 1e-8);
    let deriv = central_diff(f64::sinh, 1.0, tol)?;
    t.check((deriv - 1.0f64.cosh()).abs(), 1e-7);
    Ok((t.ok(), t.summary("root/quadrature/derivative kernels")))
}

fn gibbs_normalization() -> Result<(bool, String)> {
    let mut t = ResidualTracker::new();
    for ib in 0..10 {
        let b = 0.2 + 2.8 * ib as f64 / 9.0;
        for ij in 0..10 {
            let j = 3.0 * ij as f64 / 9.0;
            for ibeta in 0..10 {
                let beta = 1e-3 * (50.0f64 / 1e-3).powf(ibeta as f64 / 9.0);
                let tp = ThermalPoint::new(Substance::xx_pair(b, j)?, beta)?;
                let total: f64 = tp.probs().iter().sum();
                t.check((total - 1.0).abs(), 1e-14);
            }
        }
    }
    Ok((t.ok(), t.summary("Σ p_n = 1 over the (B, J, β) grid")))
}

// --------------------------------------------------- criterion 1: identities

fn pair_substance(model: PairModel, b: f64, j: f64) -> Result<Substance> {
    Ok(Substance::Pair(CoupledPair::with_model(b, j, model)?))
}

fn identity_suite(model: PairModel) -> Result<(bool, String)> {
    let mut t = ResidualTracker::new();
    let n = 20;
    for ib in 0..n {
        let b = 0.2 + 2.8 * ib as f64 / (n - 1) as f64;
        for ij in 0..n {
            let j = 3.0 * ij as f64 / (n - 1) as f64;
            for ik in 0..n {
                let beta = 0.1 * (20.0f64 / 0.1).powf(ik as f64 / (n - 1) as f64);

                // U = F_x X + F_y Y (F_y term absent in the uncoupled limit)
                let tp = ThermalPoint::new(pair_substance(model, b, j)?, beta)?;
                let u = tp.internal_energy();
                let fx = tp.force(Coordinate::X)?;
                let mut u_forces = fx / b;
                if j > 0.0 {
                    u_forces += tp.force(Coordinate::Y)? / j;
                }
                t.check(scaled(u - u_forces, u), 1e-12);

                // F_loc = F_x / 2
                let loc = tp.local_state()?;
                t.check(scaled(loc.f_loc - 0.5 * fx, fx), 1e-12);

                // S(B, J) = S(J, B)
                if j > 0.0 {
                    let swapped = ThermalPoint::new(pair_substance(model, j, b)?, beta)?;
                    t.check((tp.entropy() - swapped.entropy()).abs(), 1e-12);
                }

                // U = F L for the single spin
                let single = ThermalPoint::new(Substance::single(b)?, beta)?;
                let f_single = single_spin_force(1.0 / b, beta)?;
                t.check(
                    scaled(single.internal_energy() - f_single / b, f_single / b),
                    1e-12,
                );
            }
        }
    }
    Ok((t.ok(), t.summary("U/F/S identities on the 20^3 grid")))
}

// ------------------------------------------------- criterion 2: force oracle

fn force_fd_energy_oracle(
    sub: &Substance,
    beta: f64,
    which: Coordinate,
    tol: &Tolerances,
) -> Result<f64> {
    let coord = sub.coordinate(which)?;
    let probs = ThermalPoint::new(*sub, beta)?.probs().to_vec();
    let mut total = 0.0;
    for (lvl, p) in probs.iter().enumerate() {
        let de = central_diff(
            |c| {
                sub.with_coordinate(which, c)
                    .expect("perturbed coordinate stays positive")
                    .spectrum()
                    .energies()[lvl]
            },
            coord,
            tol,
        )?;
        total += p * de;
    }
    Ok(-total)
}

fn force_fd_free_energy_oracle(
    sub: &Substance,
    beta: f64,
    which: Coordinate,
    tol: &Tolerances,
) -> Result<f64> {
    let coord = sub.coordinate(which)?;
    central_diff(
        |c| {
            ThermalPoint::new(
                sub.with_coordinate(which, c)
                    .expect("perturbed coordinate stays positive"),
                beta,
            )
            .expect("beta unchanged")
            .free_energy()
        },
        coord,
        tol,
    )
    .map(|d| -d)
}

fn force_oracle(tol: &Tolerances) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut t = ResidualTracker::new();
    // parameter ranges keep |F| of order 0.1 or larger, away from the
    // absolute noise floor of fd_step-sized differences
    for i in 0..200 {
        let b = rng.gen_range(1.0..2.0);
        let j = b * rng.gen_range(0.7..1.2);
        let beta = rng.gen_range(1.5..3.5) / b;
        if i % 4 == 0 {
            let sub = Substance::single(b)?;
            let closed = sub.force(beta, Coordinate::X)?;
            let fd_e = force_fd_energy_oracle(&sub, beta, Coordinate::X, tol)?;
            let fd_a = force_fd_free_energy_oracle(&sub, beta, Coordinate::X, tol)?;
            t.check((closed - fd_e).abs() / closed.abs(), 1e-8);
            t.check((closed - fd_a).abs() / closed.abs(), 1e-8);
            // the L-form force is the same quantity
            t.check(
                scaled(single_spin_force(1.0 / b, beta)? - closed, closed),
                1e-14,
            );
        } else {
            let sub = Substance::xx_pair(b, j)?;
            for which in [Coordinate::X, Coordinate::Y] {
                let closed = sub.force(beta, which)?;
                let fd_e = force_fd_energy_oracle(&sub, beta, which, tol)?;
                let fd_a = force_fd_free_energy_oracle(&sub, beta, which, tol)?;
                t.check((closed - fd_e).abs() / closed.abs(), 1e-8);
                t.check((closed - fd_a).abs() / closed.abs(), 1e-8);
            }
        }
    }
    Ok((t.ok(), t.summary("closed-form forces vs FD oracles (200 points)")))
}

// ------------------------------------------------ criterion 3: adiabat suite

fn adiabat_suite() -> Result<(bool, String)> {
    let mut t = ResidualTracker::new();
    let cases = [
        (1.0, 0.5, 2.0, 2.0),
        (0.8, 1.6, 0.7, 3.0),
        (2.0, 0.2, 5.0, 0.4),
    ];
    for &(b, j, beta, lambda) in &cases {
        let s0 = ThermalPoint::new(Substance::xx_pair(b, j)?, beta)?;
        let path = build_adiabat(&s0, lambda, 129)?;
        let x0 = 1.0 / b;
        let y0 = 1.0 / j;
        let fx0 = s0.force(Coordinate::X)?;
        let fy0 = s0.force(Coordinate::Y)?;
        for tp in path.points() {
            t.check((tp.entropy() - s0.entropy()).abs(), 1e-12);
            for (p, p0) in tp.probs().iter().zip(s0.probs()) {
                t.check((p - p0).abs(), 1e-12);
            }
            let pair = tp.substance().as_pair().expect("pair path");
            let (x, y) = (1.0 / pair.b(), 1.0 / pair.j());
            t.check(scaled(tp.force(Coordinate::X)? * x * x - fx0 * x0 * x0, fx0), 1e-12);
            t.check(scaled(tp.force(Coordinate::Y)? * y * y - fy0 * y0 * y0, fy0), 1e-12);
            t.check(scaled(x / y - x0 / y0, x0 / y0), 1e-12);
        }
    }
    // single spin: T·L constant, the γ = 2 polytrope
    let s0 = ThermalPoint::new(Substance::single(1.0)?, 2.0)?;
    let path = build_adiabat(&s0, 3.0, 129)?;
    for tp in path.points() {
        let l = 1.0 / tp.substance().b();
        t.check(scaled(l / tp.beta() - 0.5, 0.5), 1e-12);
    }
    Ok((t.ok(), t.summary("adiabat invariants (S, p_n, F·coord², X/Y, T·L)")))
}

// -------------------------------------------- criterion 4: cycle equivalence

fn random_spec(kind: CycleKind, rng: &mut ChaCha8Rng, phi: Option<f64>) -> Result<BraytonSpec> {
    let r = rng.gen_range(1.5..4.0);
    let phi = phi.unwrap_or_else(|| rng.gen_range(0.15..0.8));
    let kt = rng.gen_range(0.3..1.5);
    let anchor = match kind {
        CycleKind::SingleSpin => {
            let b = rng.gen_range(0.4..2.0);
            ThermalPoint::new(Substance::single(b)?, 1.0 / kt)?
        }
        CycleKind::FixedFx => {
            let b = rng.gen_range(0.5..1.5);
            let j = b * rng.gen_range(0.0..1.5);
            ThermalPoint::new(Substance::xx_pair(b, j)?, 1.0 / kt)?
        }
        CycleKind::FixedFy => {
            let b = rng.gen_range(0.5..1.5);
            let j = b * rng.gen_range(0.2..1.8);
            ThermalPoint::new(Substance::xx_pair(b, j)?, 1.0 / kt)?
        }
    };
    BraytonSpec::new(kind, anchor, r, phi)
}

fn report_pair_residual(
    closed: &crate::cycles::CycleReport,
    oracle: &crate::cycles::CycleReport,
    q_scale: f64,
) -> f64 {
    let fields = [
        (closed.q_in, oracle.q_in),
        (closed.q_out, oracle.q_out),
        (closed.w_net, oracle.w_net),
        (
            closed.w_loc.unwrap_or(0.0),
            oracle.w_loc.unwrap_or(0.0),
        ),
    ];
    fields
        .iter()
        .map(|(a, b)| (a - b).abs() / a.abs().max(b.abs()).max(1e-3 * q_scale))
        .fold(0.0, f64::max)
}

fn cycle_equivalence(tol: &Tolerances) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x04);
    let mut t = ResidualTracker::new();
    for kind in [CycleKind::SingleSpin, CycleKind::FixedFx, CycleKind::FixedFy] {
        for i in 0..30 {
            // pin the figure value φ = 1/4 on a third of the specs
            let phi = (i % 3 == 0).then_some(0.25);
            let spec = random_spec(kind, &mut rng, phi)?;
            let corners = solve_corners(&spec, tol)?;
            let closed = brayton_report(&corners, &spec)?;
            let oracle = oracle_report(&corners, &spec, tol)?;
            t.check(report_pair_residual(&closed, &oracle, closed.q_in.abs()), 1e-7);
            let eta_expected = 1.0 - spec.phi().sqrt();
            t.check((closed.eta - eta_expected).abs(), 1e-10);
            if spec.phi() == 0.25 {
                t.check((closed.eta - 0.5).abs(), 1e-10);
            }
        }
    }
    Ok((
        t.ok(),
        t.summary("oracle vs closed-form reports, 30 random specs per kind"),
    ))
}

// ------------------------------------------- criterion 5: closure and ratios

fn closure_and_ratio_chain(tol: &Tolerances) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x05);
    let mut t = ResidualTracker::new();
    for kind in [CycleKind::SingleSpin, CycleKind::FixedFx, CycleKind::FixedFy] {
        for _ in 0..10 {
            let spec = random_spec(kind, &mut rng, None)?;
            let corners = solve_corners(&spec, tol)?;
            t.check(corners.closure_residual, CLOSURE_REL);
            t.check(ratio_chain_residual(&corners, &spec)?, 1e-10);
        }
    }
    Ok((t.ok(), t.summary("cycle closure and complete ratio chain")))
}

// --------------------------------------------- criterion 6: uncoupled limit

fn fig2_cycle(j: f64, tol: &Tolerances) -> Result<(CornerSet, BraytonSpec)> {
    let anchor = ThermalPoint::new(Substance::xx_pair(1.0, j)?, 2.0)?;
    let spec = BraytonSpec::new(CycleKind::FixedFx, anchor, 3.0, 0.25)?;
    let corners = solve_corners(&spec, tol)?;
    Ok((corners, spec))
}

fn uncoupled_limit(tol: &Tolerances) -> Result<(bool, String)> {
    let mut deviations = Vec::new();
    for j in [1e-6, 1e-8, 1e-10] {
        let (corners, spec) = fig2_cycle(j, tol)?;
        let report = brayton_report(&corners, &spec)?;
        let ratio = report.w_net / (2.0 * report.w_loc.expect("pair cycle"));
        deviations.push((ratio - 1.0).abs());
    }
    let mut ok = deviations[0] <= 1e-3;
    // the deviation keeps shrinking with J (up to roundoff slack)
    for w in deviations.windows(2) {
        ok &= w[1] <= w[0] + 1e-12;
    }
    Ok((
        ok,
        format!(
            "W/(2W_loc) − 1 at J = 1e-6, 1e-8, 1e-10: {:.3e}, {:.3e}, {:.3e}",
            deviations[0], deviations[1], deviations[2]
        ),
    ))
}

// ---------------------------------------- criterion 7: coupling enhancement

fn coupling_enhancement(tol: &Tolerances) -> Result<(bool, String)> {
    let mut t = ResidualTracker::new();
    for i in 0..41 {
        let j_over_b = 0.05 + (2.0 - 0.05) * i as f64 / 40.0;
        let (corners, spec) = fig2_cycle(j_over_b, tol)?;
        let report = brayton_report(&corners, &spec)?;
        let excess = report.w_net - 2.0 * report.w_loc.expect("pair cycle");
        let bracket = interaction_bracket(&corners, &spec)?.expect("coupled fixed-Fx");
        t.check((excess - bracket).abs(), 1e-10);
        // positivity of the interaction term
        t.check((-excess).max(0.0), 1e-12);
    }
    Ok((
        t.ok(),
        t.summary("W − 2W_loc vs interaction bracket on the J/B grid"),
    ))
}

// ---------------------------------------- criterion 8: refrigerator regime

fn refrigerator_regime(tol: &Tolerances) -> Result<(bool, String)> {
    let sweep_spec = SweepSpec {
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
    let threshold = match crate::cycles::refrigerator_threshold(&sweep_spec, tol)? {
        Some(v) => v,
        None => return Ok((false, "no W_loc sign change found in (0.05, 2]".into())),
    };
    let mut t = ResidualTracker::new();
    let mut agreement_failures = 0usize;
    for i in 0..41 {
        let j_over_b = 0.05 + (2.0 - 0.05) * i as f64 / 40.0;
        let anchor = ThermalPoint::new(Substance::xx_pair(1.0, j_over_b)?, 2.0)?;
        let spec = BraytonSpec::new(CycleKind::FixedFy, anchor, 3.0, 0.25)?;
        let corners = solve_corners(&spec, tol)?;
        let report = brayton_report(&corners, &spec)?;
        let q1 = report.q1_loc.expect("pair cycle");
        let q2 = report.q2_loc.expect("pair cycle");
        let w_loc = report.w_loc.expect("pair cycle");
        let (p_ea, p_eb) = (report.p_e_a.unwrap(), report.p_e_b.unwrap());

        // the three refrigerator indicators agree at every point
        let by_flag = report.refrigerator;
        let by_populations = p_eb < p_ea;
        let by_q1 = q1 < 0.0;
        if by_flag != by_populations || by_flag != by_q1 {
            agreement_failures += 1;
        }
        if j_over_b > threshold + 1e-3 {
            let all = q1 < 0.0 && q2 > 0.0 && w_loc < 0.0 && report.w_net > 0.0;
            t.check(if all { 0.0 } else { 1.0 }, 0.5);
        }
    }
    let ok = t.ok() && agreement_failures == 0 && threshold > 0.05 && threshold < 2.0;
    Ok((
        ok,
        format!(
            "threshold J*/B = {threshold:.6}; {} indicator disagreements; {}",
            agreement_failures,
            t.summary("refrigerator signs beyond J*")
        ),
    ))
}

// -------------------------------------- criterion 9: isothermal directions

fn isothermal_directions(tol: &Tolerances) -> Result<(bool, String)> {
    let field = isothermal_heat_directions(1.0, 1.0, 20.0, Bump::Field, 0.01, tol)?;
    let coupling = isothermal_heat_directions(1.0, 1.0, 20.0, Bump::Coupling, 0.01, tol)?;
    let ok = field.total_heat < 0.0
        && field.local_heat < 0.0
        && coupling.total_heat < 0.0
        && coupling.local_heat > 0.0
        && (field.p_e_start - 0.25).abs() < 1e-2;
    Ok((
        ok,
        format!(
            "dB: total {:.3e}, local {:.3e}; dJ: total {:.3e}, local {:.3e}; p_e(start) = {:.4}",
            field.total_heat,
            field.local_heat,
            coupling.total_heat,
            coupling.local_heat,
            field.p_e_start
        ),
    ))
}

// ------------------------------------- criterion 10: general XY regression

fn general_xy_regression(tol: &Tolerances) -> Result<(bool, String)> {
    let zero = PairModel::GeneralXy {
        gamma: 0.0,
        delta: 0.0,
    };

    // spectra agree exactly with the XX forms on a grid
    let mut spectra_exact = true;
    for ib in 0..10 {
        let b = 0.2 + 2.8 * ib as f64 / 9.0;
        for ij in 0..10 {
            let j = 3.0 * ij as f64 / 9.0;
            let xx = Substance::xx_pair(b, j)?.spectrum().energies();
            let gen = pair_substance(zero, b, j)?.spectrum().energies();
            spectra_exact &= xx == gen;
        }
    }

    // the identity suite holds for the γ = Δ = 0 model at XX tolerances
    let (identities_ok, identity_detail) = identity_suite(zero)?;

    // a full cycle built on the γ = Δ = 0 model matches the XX cycle
    let mut t = ResidualTracker::new();
    let anchor_gen = ThermalPoint::new(pair_substance(zero, 1.0, 0.5)?, 2.0)?;
    let spec_gen = BraytonSpec::new(CycleKind::FixedFx, anchor_gen, 3.0, 0.25)?;
    let corners_gen = solve_corners(&spec_gen, tol)?;
    let closed_gen = brayton_report(&corners_gen, &spec_gen)?;
    let oracle_gen = oracle_report(&corners_gen, &spec_gen, tol)?;
    t.check(
        report_pair_residual(&closed_gen, &oracle_gen, closed_gen.q_in.abs()),
        1e-7,
    );
    let (corners_xx, spec_xx) = fig2_cycle(0.5, tol)?;
    let closed_xx = brayton_report(&corners_xx, &spec_xx)?;
    t.check(scaled(closed_gen.q_in - closed_xx.q_in, closed_xx.q_in), 1e-11);
    t.check(scaled(closed_gen.w_net - closed_xx.w_net, closed_xx.w_net), 1e-11);

    // anisotropic spectrum formulas vs the FD force-definition oracle
    let aniso = Substance::Pair(CoupledPair::general_xy(1.0, 0.5, 0.3, 0.2)?);
    for which in [Coordinate::X, Coordinate::Y] {
        let closed = aniso.force(2.0, which)?;
        let fd_e = force_fd_energy_oracle(&aniso, 2.0, which, tol)?;
        let fd_a = force_fd_free_energy_oracle(&aniso, 2.0, which, tol)?;
        t.check(scaled(closed - fd_e, closed), 1e-8);
        t.check(scaled(closed - fd_a, closed), 1e-8);
    }

    let ok = spectra_exact && identities_ok && t.ok();
    Ok((
        ok,
        format!(
            "spectra exact: {spectra_exact}; {identity_detail}; {}",
            t.summary("cycle + anisotropic FD checks")
        ),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    // the full suite is exercised (with per-criterion reporting) by the
    // acceptance integration test; here only the harness plumbing
    #[test]
    fn checks_report_errors_as_failures() {
        let r = CheckResult::from_run("boom", || {
            Err(crate::error::Error::domain("synthetic"))
        });
        assert!(!r.passed);
        assert!(r.detail.contains("synthetic"));
    }

    #[test]
    fn kernel_sanity_passes() {
        let (ok, _) = kernel_sanity(&Tolerances::default()).unwrap();
        assert!(ok);
    }
}
