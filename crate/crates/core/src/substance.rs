//! Working-substance models and their equilibrium thermodynamics.
//!
//! Units: ħ = k = 1. Energies are measured in units of a reference field,
//! inverse temperatures β in inverse energy. The generalized coordinates are
//! X = 1/B (and, for a coupled pair, Y = 1/J); internally everything is
//! parameterized by (B, J, β) so the uncoupled limit J = 0 stays
//! representable. Only antiferromagnetic coupling (J ≥ 0) is admitted.
//!
//! Spectra are closed-form and kept in fixed level order:
//!
//! * single spin: E = ∓B/2 (`down`, `up`)
//! * XX pair:     E1 = −B, E2 = −J, E3 = +J, E4 = +B (`psi1`..`psi4`)
//! * general XY:  E1 = JΔ − √(B² + J²γ²), E2 = −J(1+Δ), E3 = J(1−Δ),
//!                E4 = JΔ + √(B² + J²γ²)
//!
//! Levels are never sorted by energy: for J > B the second level drops below
//! the first, and the fixed indexing is what the subsystem formulas refer to.

use crate::error::{Error, Result};

/// Which generalized coordinate a force is conjugate to.
///
/// `X` is 1/B (for the single spin this is the only coordinate, L = 1/B);
/// `Y` is 1/J and exists only for coupled pairs with J > 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coordinate {
    X,
    Y,
}

impl std::fmt::Display for Coordinate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Coordinate::X => write!(f, "X"),
            Coordinate::Y => write!(f, "Y"),
        }
    }
}

fn check_field(b: f64) -> Result<f64> {
    if !b.is_finite() || b <= 0.0 {
        return Err(Error::domain(format!("magnetic field B must be > 0, got {b}")));
    }
    Ok(b)
}

fn check_beta(beta: f64) -> Result<f64> {
    if !beta.is_finite() || beta <= 0.0 {
        return Err(Error::domain(format!(
            "inverse temperature beta must be > 0, got {beta}"
        )));
    }
    Ok(beta)
}

/// A single spin-1/2 in a magnetic field, H = (B/2)σz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinHalf {
    b: f64,
}

impl SpinHalf {
    pub fn new(b: f64) -> Result<Self> {
        Ok(Self { b: check_field(b)? })
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Generalized coordinate L = 1/B.
    pub fn l(&self) -> f64 {
        1.0 / self.b
    }
}

/// Spin-exchange model of a coupled pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PairModel {
    /// Isotropic in-plane exchange, H = (B/2)(σz₁+σz₂) + J(σ⁺₁σ⁻₂ + σ⁻₁σ⁺₂).
    Xx,
    /// Anisotropic exchange with parameters γ and Δ,
    /// H = (J/2)[(1+γ)σx₁σx₂ + (1−γ)σy₁σy₂] + JΔσz₁σz₂ + (B/2)(σz₁+σz₂).
    GeneralXy { gamma: f64, delta: f64 },
}

/// Two coupled spin-1/2 particles in a common field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoupledPair {
    b: f64,
    j: f64,
    model: PairModel,
}

impl CoupledPair {
    pub fn xx(b: f64, j: f64) -> Result<Self> {
        Self::with_model(b, j, PairModel::Xx)
    }

    pub fn general_xy(b: f64, j: f64, gamma: f64, delta: f64) -> Result<Self> {
        Self::with_model(b, j, PairModel::GeneralXy { gamma, delta })
    }

    pub fn with_model(b: f64, j: f64, model: PairModel) -> Result<Self> {
        check_field(b)?;
        if !j.is_finite() || j < 0.0 {
            return Err(Error::domain(format!(
                "coupling J must be >= 0 (antiferromagnetic), got {j}"
            )));
        }
        if let PairModel::GeneralXy { gamma, delta } = model {
            if !gamma.is_finite() || !delta.is_finite() {
                return Err(Error::domain("anisotropy parameters must be finite"));
            }
        }
        Ok(Self { b, j, model })
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn j(&self) -> f64 {
        self.j
    }

    pub fn model(&self) -> PairModel {
        self.model
    }

    pub fn gamma(&self) -> f64 {
        match self.model {
            PairModel::Xx => 0.0,
            PairModel::GeneralXy { gamma, .. } => gamma,
        }
    }

    pub fn delta(&self) -> f64 {
        match self.model {
            PairModel::Xx => 0.0,
            PairModel::GeneralXy { delta, .. } => delta,
        }
    }

    /// Coordinate X = 1/B.
    pub fn x(&self) -> f64 {
        1.0 / self.b
    }

    /// Coordinate Y = 1/J; undefined in the uncoupled limit.
    pub fn y(&self) -> Option<f64> {
        (self.j > 0.0).then(|| 1.0 / self.j)
    }

    /// √(B² + J²γ²), the field-anisotropy level splitting scale.
    fn splitting(&self) -> f64 {
        f64::hypot(self.b, self.j * self.gamma())
    }
}

/// Any supported working substance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Substance {
    Single(SpinHalf),
    Pair(CoupledPair),
}

impl Substance {
    pub fn single(b: f64) -> Result<Self> {
        Ok(Substance::Single(SpinHalf::new(b)?))
    }

    pub fn xx_pair(b: f64, j: f64) -> Result<Self> {
        Ok(Substance::Pair(CoupledPair::xx(b, j)?))
    }

    pub fn as_pair(&self) -> Option<&CoupledPair> {
        match self {
            Substance::Pair(p) => Some(p),
            Substance::Single(_) => None,
        }
    }

    pub fn b(&self) -> f64 {
        match self {
            Substance::Single(s) => s.b(),
            Substance::Pair(p) => p.b(),
        }
    }

    /// Value of a generalized coordinate (X = 1/B, or L for a single spin;
    /// Y = 1/J for a pair with J > 0).
    pub fn coordinate(&self, which: Coordinate) -> Result<f64> {
        match (self, which) {
            (_, Coordinate::X) => Ok(1.0 / self.b()),
            (Substance::Pair(p), Coordinate::Y) => p.y().ok_or_else(|| {
                Error::domain("coordinate Y = 1/J is undefined at J = 0")
            }),
            (Substance::Single(_), Coordinate::Y) => {
                Err(Error::domain("a single spin has no coordinate Y"))
            }
        }
    }

    /// Same substance with one coordinate replaced (X sets B = 1/value,
    /// Y sets J = 1/value).
    pub fn with_coordinate(&self, which: Coordinate, value: f64) -> Result<Self> {
        if !value.is_finite() || value <= 0.0 {
            return Err(Error::domain(format!(
                "coordinate {which} must be > 0, got {value}"
            )));
        }
        match (self, which) {
            (Substance::Single(_), Coordinate::X) => Substance::single(1.0 / value),
            (Substance::Single(_), Coordinate::Y) => {
                Err(Error::domain("a single spin has no coordinate Y"))
            }
            (Substance::Pair(p), Coordinate::X) => Ok(Substance::Pair(
                CoupledPair::with_model(1.0 / value, p.j(), p.model())?,
            )),
            (Substance::Pair(p), Coordinate::Y) => Ok(Substance::Pair(
                CoupledPair::with_model(p.b(), 1.0 / value, p.model())?,
            )),
        }
    }

    /// Divides every energy parameter by `lambda` (coordinates multiply by
    /// `lambda`), the parameter change of a quantum adiabatic step.
    pub fn rescaled(&self, lambda: f64) -> Result<Self> {
        if !lambda.is_finite() || lambda <= 0.0 {
            return Err(Error::domain(format!("scale factor must be > 0, got {lambda}")));
        }
        match self {
            Substance::Single(s) => Substance::single(s.b() / lambda),
            Substance::Pair(p) => Ok(Substance::Pair(CoupledPair::with_model(
                p.b() / lambda,
                p.j() / lambda,
                p.model(),
            )?)),
        }
    }

    /// Closed-form spectrum in fixed level order.
    pub fn spectrum(&self) -> Spectrum {
        match self {
            Substance::Single(s) => Spectrum {
                levels: vec![
                    Level { energy: -0.5 * s.b(), label: "down" },
                    Level { energy: 0.5 * s.b(), label: "up" },
                ],
            },
            Substance::Pair(p) => {
                let (b, j) = (p.b(), p.j());
                let levels = match p.model() {
                    PairModel::Xx => vec![
                        Level { energy: -b, label: "psi1" },
                        Level { energy: -j, label: "psi2" },
                        Level { energy: j, label: "psi3" },
                        Level { energy: b, label: "psi4" },
                    ],
                    PairModel::GeneralXy { delta, .. } => {
                        let r = p.splitting();
                        vec![
                            Level { energy: j * delta - r, label: "psi1" },
                            Level { energy: -j * (1.0 + delta), label: "psi2" },
                            Level { energy: j * (1.0 - delta), label: "psi3" },
                            Level { energy: j * delta + r, label: "psi4" },
                        ]
                    }
                };
                Spectrum { levels }
            }
        }
    }

    /// Generalized force conjugate to `which` at inverse temperature `beta`,
    /// evaluated in closed form.
    ///
    /// For the XX pair this is
    /// F_x = −B² sinh(βB) / (cosh(βB) + cosh(βJ)) and the analogous F_y;
    /// for the single spin F = −(B²/2) tanh(βB/2). The general-XY forms
    /// follow from the §-fixed spectrum by differentiating each level.
    pub fn force(&self, beta: f64, which: Coordinate) -> Result<f64> {
        check_beta(beta)?;
        match self {
            Substance::Single(s) => match which {
                Coordinate::X => Ok(-0.5 * s.b() * s.b() * (0.5 * beta * s.b()).tanh()),
                Coordinate::Y => Err(Error::domain("a single spin has no force F_y")),
            },
            Substance::Pair(p) => {
                if which == Coordinate::Y && p.j() == 0.0 {
                    return Err(Error::domain("F_y is undefined at J = 0"));
                }
                match p.model() {
                    PairModel::Xx => Ok(xx_force(p.b(), p.j(), beta, which)),
                    PairModel::GeneralXy { gamma, delta } => {
                        Ok(general_xy_force(p.b(), p.j(), gamma, delta, beta, which))
                    }
                }
            }
        }
    }
}

/// Force on a single spin in the coordinate form of the F–L diagram:
/// F = −tanh(β/(2L)) / (2L²).
pub fn single_spin_force(l: f64, beta: f64) -> Result<f64> {
    if !l.is_finite() || l <= 0.0 {
        return Err(Error::domain(format!("coordinate L must be > 0, got {l}")));
    }
    check_beta(beta)?;
    Ok(-(0.5 * beta / l).tanh() / (2.0 * l * l))
}

/// XX-pair forces with exponent shifting so large βB/βJ never overflow.
fn xx_force(b: f64, j: f64, beta: f64, which: Coordinate) -> f64 {
    let a = beta * b;
    let c = beta * j;
    let m = a.max(c);
    let t1 = (a - m).exp();
    let t2 = (-a - m).exp();
    let t3 = (c - m).exp();
    let t4 = (-c - m).exp();
    let den = t1 + t2 + t3 + t4;
    match which {
        Coordinate::X => -b * b * (t1 - t2) / den,
        Coordinate::Y => -j * j * (t3 - t4) / den,
    }
}

/// Shifted Boltzmann weights (w1..w4, in level order) for the general XY
/// spectrum; only ratios of these are ever used.
fn general_xy_weights(b: f64, j: f64, gamma: f64, delta: f64, beta: f64) -> [f64; 4] {
    let r = f64::hypot(b, j * gamma);
    let a = beta * r;
    let c = beta * j;
    let d = beta * j * delta;
    let exps = [a - d, c + d, -c + d, -a - d];
    let m = exps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    [
        (exps[0] - m).exp(),
        (exps[1] - m).exp(),
        (exps[2] - m).exp(),
        (exps[3] - m).exp(),
    ]
}

fn general_xy_force(b: f64, j: f64, gamma: f64, delta: f64, beta: f64, which: Coordinate) -> f64 {
    let r = f64::hypot(b, j * gamma);
    let [w1, w2, w3, w4] = general_xy_weights(b, j, gamma, delta, beta);
    let z = w1 + w2 + w3 + w4;
    match which {
        // dE/dX is nonzero only for psi1/psi4: ∓B³/√(B²+J²γ²)
        Coordinate::X => -(b * b * b / r) * (w1 - w4) / z,
        // F_y = J² Σ p_n dE_n/dJ
        Coordinate::Y => {
            let sum = delta * (w1 + w4) + (j * gamma * gamma / r) * (w4 - w1)
                - (1.0 + delta) * w2
                + (1.0 - delta) * w3;
            j * j * sum / z
        }
    }
}

/// One energy level with its eigenstate label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Level {
    pub energy: f64,
    pub label: &'static str,
}

/// Closed-form spectrum of a substance, 2 or 4 levels in fixed order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    levels: Vec<Level>,
}

impl Spectrum {
    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn energies(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.energy).collect()
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }
}

/// Gibbs probabilities for a set of levels at inverse temperature `beta`.
/// Returns (probabilities in level order, ln Z).
pub fn gibbs_probabilities(energies: &[f64], beta: f64) -> Result<(Vec<f64>, f64)> {
    check_beta(beta)?;
    let e_min = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = energies.iter().map(|e| (-beta * (e - e_min)).exp()).collect();
    let z_shift: f64 = weights.iter().sum();
    let probs = weights.iter().map(|w| w / z_shift).collect();
    let log_z = z_shift.ln() - beta * e_min;
    Ok((probs, log_z))
}

/// The substance at thermal equilibrium: parameters plus β, with the Gibbs
/// populations and partition function frozen in.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermalPoint {
    substance: Substance,
    beta: f64,
    probs: Vec<f64>,
    log_z: f64,
}

impl ThermalPoint {
    pub fn new(substance: Substance, beta: f64) -> Result<Self> {
        let spec = substance.spectrum();
        let (probs, log_z) = gibbs_probabilities(&spec.energies(), beta)?;
        Ok(Self {
            substance,
            beta,
            probs,
            log_z,
        })
    }

    pub fn substance(&self) -> &Substance {
        &self.substance
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Temperature kT = 1/β.
    pub fn kt(&self) -> f64 {
        1.0 / self.beta
    }

    /// Gibbs populations p_n in level order.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn log_z(&self) -> f64 {
        self.log_z
    }

    /// Partition function Z = Σ exp(−βE_n).
    pub fn z(&self) -> f64 {
        self.log_z.exp()
    }

    /// Von Neumann / Gibbs entropy S = −Σ p_n ln p_n (k = 1), with
    /// 0·ln 0 = 0.
    pub fn entropy(&self) -> f64 {
        -self
            .probs
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| p * p.ln())
            .sum::<f64>()
    }

    /// Internal energy U = Σ p_n E_n.
    pub fn internal_energy(&self) -> f64 {
        self.substance
            .spectrum()
            .levels()
            .iter()
            .zip(&self.probs)
            .map(|(l, p)| p * l.energy)
            .sum()
    }

    /// Helmholtz free energy −ln(Z)/β.
    pub fn free_energy(&self) -> f64 {
        -self.log_z / self.beta
    }

    /// Generalized force at this point (closed form).
    pub fn force(&self, which: Coordinate) -> Result<f64> {
        self.substance.force(self.beta, which)
    }

    /// Reduced single-spin state obtained by tracing out the partner spin.
    pub fn local_state(&self) -> Result<LocalState> {
        let pair = self.substance.as_pair().ok_or_else(|| {
            Error::domain("local (subsystem) state requires a coupled pair")
        })?;
        let p = &self.probs;
        // up-state population of either subsystem
        let (p_e, p_g) = match pair.model() {
            PairModel::Xx => {
                let half_mid = 0.5 * (p[1] + p[2]);
                (p[3] + half_mid, p[0] + half_mid)
            }
            PairModel::GeneralXy { .. } => {
                // |psi1> = cosθ|11> − sinθ|00>, |psi4> = sinθ|11> + cosθ|00>,
                // with cos 2θ = −B/√(B²+J²γ²)
                let w = pair.b() / pair.splitting();
                let half_mid = 0.5 * (p[1] + p[2]);
                (
                    half_mid + 0.5 * p[0] * (1.0 - w) + 0.5 * p[3] * (1.0 + w),
                    half_mid + 0.5 * p[0] * (1.0 + w) + 0.5 * p[3] * (1.0 - w),
                )
            }
        };
        let x = pair.x();
        let beta_loc = x * (p_g / p_e).ln();
        let f_loc = -(0.5 * beta_loc / x).tanh() / (2.0 * x * x);
        Ok(LocalState {
            p_e,
            p_g,
            beta_loc,
            f_loc,
        })
    }
}

/// Reduced (subsystem) state of one spin of a coupled pair, described as an
/// equilibrium state at a local effective temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalState {
    /// Population of the local excited state (+B/2).
    pub p_e: f64,
    /// Population of the local ground state (−B/2).
    pub p_g: f64,
    /// Local effective inverse temperature β_loc = X ln(p_g / p_e).
    pub beta_loc: f64,
    /// Local generalized force from the single-spin force law at β_loc.
    pub f_loc: f64,
}
