//! Worked systems as finite-dimensional structures with Hamiltonians, analytic
//! gradients and oracles.
//!
//! | model | structure | coordinates |
//! |---|---|---|
//! | `damped_oscillator` | contact | `(q, p, z)` |
//! | `oneform_field` | contact | `(z, a1_1, a2_1, ..., a1_N, a2_N)` |
//! | `damped_wave` | contact | `(z, q_1..q_N, p_1..p_N)` |
//! | `wave_with_source` | cosymplectic | `(t, q_1..q_N, p_1..p_N)` |
//! | `damped_wave_source` | cocontact | `(t, z, q_1..q_N, p_1..p_N)` |
//! | `sphere_of_oneforms` | level set in symplectic `R^{2N}` | `(a1_1, a2_1, ..., a1_N, a2_N)` |

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::cocontact::{cocontact_hamiltonian_vf, verify_cocontact, CocontactReport, CocontactStructure};
use crate::contact::{hamiltonian_vector_field, verify_contact_pointwise, ContactStructure, VerificationReport};
use crate::cosymplectic::{evolution_vector_field, verify_almost_contact, CosymplecticStructure};
use crate::error::{Error, Result};
use crate::flow::{self, FlowField};
use crate::forms::{Covector, OneForm, StatePoint, TwoForm, VectorFieldFn};
use crate::hamiltonian::HamiltonianSystem;
use crate::symplectic::{contact_type_restriction, LevelSetRestriction, SymplecticStructure};

pub mod grid;
mod oneform;
mod oscillator;
mod sphere;
mod wave;

pub use grid::{BoundaryCondition, Grid, GridField, Source};
pub use oneform::oneform_field;
pub use oscillator::damped_oscillator;
pub use sphere::{sphere_of_oneforms, sphere_of_oneforms_at_level};
pub use wave::{damped_wave, damped_wave_source, wave_with_source, WavePotential};

/// Tolerance for "the point lies on the level set" in level-set verification.
pub const LEVEL_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelKind {
    DampedOscillator,
    OneformField,
    DampedWave,
    WaveWithSource,
    DampedWaveSource,
    SphereOfOneforms,
}

impl ModelKind {
    pub const ALL: [ModelKind; 6] = [
        Self::DampedOscillator,
        Self::OneformField,
        Self::DampedWave,
        Self::WaveWithSource,
        Self::DampedWaveSource,
        Self::SphereOfOneforms,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::DampedOscillator => "damped_oscillator",
            Self::OneformField => "oneform_field",
            Self::DampedWave => "damped_wave",
            Self::WaveWithSource => "wave_with_source",
            Self::DampedWaveSource => "damped_wave_source",
            Self::SphereOfOneforms => "sphere_of_oneforms",
        }
    }

    /// Models whose flow is linear, so `exp(tA)` applies.
    pub fn is_linear(&self) -> bool {
        matches!(self, Self::OneformField | Self::SphereOfOneforms)
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown model `{s}`")))
    }
}

/// Potential term of the wave-with-source models.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Potential {
    /// `U = -sum dx q u(t)`, so `f^U = -u`.
    Simple,
    /// `U = 1/2 sum dx (q - u(t))^2`, so `f^U = q - u`.
    Quadratic,
}

impl Potential {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Simple => "simple",
            Self::Quadratic => "quadratic",
        }
    }
}

impl FromStr for Potential {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "simple" => Ok(Self::Simple),
            "quadratic" => Ok(Self::Quadratic),
            other => Err(Error::InvalidParameter(format!("unknown potential `{other}`"))),
        }
    }
}

/// Parameter record of a model instance.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    pub kappa: f64,
    pub n: usize,
    pub length: f64,
    pub bc: BoundaryCondition,
    pub potential: Option<Potential>,
    pub source: String,
    pub level: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            kappa: 0.0,
            n: 1,
            length: 2.0 * std::f64::consts::PI,
            bc: BoundaryCondition::Periodic,
            potential: None,
            source: "none".into(),
            level: 1.0,
        }
    }
}

/// Symplectic space, Liouville-type field and level for a level-set model.
#[derive(Clone)]
pub struct LevelSetData {
    pub symplectic: SymplecticStructure,
    pub liouville: Arc<VectorFieldFn>,
    pub level: f64,
}

impl fmt::Debug for LevelSetData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LevelSetData")
            .field("dim", &self.symplectic.dim())
            .field("level", &self.level)
            .finish()
    }
}

#[derive(Clone, Debug)]
pub enum ModelStructure {
    Contact(ContactStructure),
    Cosymplectic(CosymplecticStructure),
    Cocontact(CocontactStructure),
    LevelSet(LevelSetData),
}

impl ModelStructure {
    pub fn dim(&self) -> usize {
        match self {
            Self::Contact(c) => c.dim(),
            Self::Cosymplectic(s) => s.dim(),
            Self::Cocontact(s) => s.dim(),
            Self::LevelSet(l) => l.symplectic.dim(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::Contact(_) => "contact",
            Self::Cosymplectic(_) => "cosymplectic",
            Self::Cocontact(_) => "cocontact",
            Self::LevelSet(_) => "contact-type level set",
        }
    }
}

/// Result of verifying a model structure at one point.
#[derive(Clone, Debug)]
pub enum StructureCheck {
    Contact(VerificationReport),
    AlmostContact(VerificationReport),
    Cocontact(CocontactReport),
    LevelSet(Box<LevelSetRestriction>),
}

impl StructureCheck {
    pub fn passes(&self) -> bool {
        match self {
            Self::Contact(r) | Self::AlmostContact(r) => r.passes,
            Self::Cocontact(r) => r.passes,
            Self::LevelSet(r) => r.report.passes,
        }
    }

    pub fn conditions_agree(&self) -> bool {
        match self {
            Self::Contact(r) | Self::AlmostContact(r) => r.conditions_agree(),
            Self::Cocontact(r) => r.conditions_agree(),
            Self::LevelSet(r) => r.report.conditions_agree(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Corruption {
    /// Contact form (or `theta` for cosymplectic, `Y` for level sets) set to zero.
    EtaZero,
    /// Two-form set to zero.
    DEtaZero,
    /// `eta` replaced by `theta` (cocontact only).
    ThetaEqEta,
}

impl Corruption {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::EtaZero => "eta_zero",
            Self::DEtaZero => "d_eta_zero",
            Self::ThetaEqEta => "theta_eq_eta",
        }
    }
}

impl FromStr for Corruption {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eta_zero" => Ok(Self::EtaZero),
            "d_eta_zero" => Ok(Self::DEtaZero),
            "theta_eq_eta" => Ok(Self::ThetaEqEta),
            other => Err(Error::InvalidParameter(format!("unknown corruption `{other}`"))),
        }
    }
}

pub type ExactFlowFn = dyn Fn(&StatePoint, f64) -> Result<StatePoint> + Send + Sync;
pub type RhsFn = dyn Fn(&StatePoint) -> DVector<f64> + Send + Sync;

/// Reference solution used to check the structure-derived dynamics.
#[derive(Clone)]
pub enum Oracle {
    /// Closed-form flow `(x0, t) -> x(t)`.
    ExactFlow(Arc<ExactFlowFn>),
    /// Right-hand side assembled directly from the equations of motion.
    Rhs(Arc<RhsFn>),
}

impl fmt::Debug for Oracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::ExactFlow(_) => f.write_str("ExactFlow(..)"),
            Self::Rhs(_) => f.write_str("Rhs(..)"),
        }
    }
}

/// Discrete wave equation `q'' = Lap q - kappa q' - mass q + u(t)` satisfied
/// by the `q` block of a model's flow.
#[derive(Clone, Debug)]
pub struct WaveTarget {
    pub grid: Grid,
    pub kappa: f64,
    pub mass: f64,
    pub source: Source,
    /// Index of `q_1` in the state vector.
    pub q_offset: usize,
    /// Index of the time coordinate, if the state carries one.
    pub time_index: Option<usize>,
}

#[derive(Clone, Debug)]
enum Sampler {
    Cube,
    LevelSet(f64),
}

/// A model instance: structure, Hamiltonian, oracle and metadata.
#[derive(Clone, Debug)]
pub struct ModelBundle {
    pub kind: ModelKind,
    pub params: ModelParams,
    pub structure: ModelStructure,
    pub hamiltonian: HamiltonianSystem,
    pub initial: StatePoint,
    pub wave: Option<WaveTarget>,
    pub potential: Option<WavePotential>,
    /// `A` with `X_H(x) = A x`, for linear models.
    pub linear_generator: Option<DMatrix<f64>>,
    /// Sign convention of the contact or time form.
    pub convention: &'static str,
    oracle: Option<Oracle>,
    sampler: Sampler,
}

impl ModelBundle {
    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    pub fn dim(&self) -> usize {
        self.structure.dim()
    }

    pub fn oracle(&self) -> Result<&Oracle> {
        if self.kind == ModelKind::DampedOscillator && self.params.kappa >= 2.0 {
            return Err(Error::OverdampedOracleUnavailable {
                kappa: self.params.kappa,
            });
        }
        self.oracle.as_ref().ok_or_else(|| Error::NoOracle(self.name().into()))
    }

    /// Random state: uniform in `[-1, 1]^n`, or uniform direction scaled onto
    /// the level set for level-set models.
    pub fn sample_state<R: Rng + ?Sized>(&self, rng: &mut R) -> StatePoint {
        let n = self.dim();
        let mut v = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        if let Sampler::LevelSet(level) = self.sampler {
            while v.norm() < 1e-3 {
                v = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
            }
            let h = self.hamiltonian.value(&StatePoint::new(v.clone()).expect("finite"));
            // H is quadratic and homogeneous.
            v *= (level / h).sqrt();
        }
        StatePoint::new(v).expect("finite sample")
    }

    pub fn verify_at(&self, x: &StatePoint, tol: f64) -> Result<StructureCheck> {
        Ok(match &self.structure {
            ModelStructure::Contact(c) => StructureCheck::Contact(verify_contact_pointwise(c, x, tol)?),
            ModelStructure::Cosymplectic(s) => StructureCheck::AlmostContact(verify_almost_contact(s, x, tol)?),
            ModelStructure::Cocontact(s) => StructureCheck::Cocontact(verify_cocontact(s, x, tol)?),
            ModelStructure::LevelSet(l) => StructureCheck::LevelSet(Box::new(contact_type_restriction(
                &l.symplectic,
                &self.hamiltonian,
                l.liouville.as_ref(),
                x,
                l.level,
                LEVEL_TOL,
            )?)),
        })
    }

    /// Hamiltonian (or evolution) field at `x` by the direct pointwise solve.
    pub fn vector_field(&self, x: &StatePoint, tol: f64) -> Result<DVector<f64>> {
        match &self.structure {
            ModelStructure::Contact(c) => hamiltonian_vector_field(c, &self.hamiltonian, x, tol),
            ModelStructure::Cosymplectic(s) => evolution_vector_field(s, &self.hamiltonian, x, tol),
            ModelStructure::Cocontact(s) => cocontact_hamiltonian_vf(s, &self.hamiltonian, x, tol),
            ModelStructure::LevelSet(l) => {
                flow::symplectic_field(&l.symplectic.omega_at(x)?, &self.hamiltonian.gradient(x)?)
            }
        }
    }

    /// The same field, prepared for repeated evaluation along a trajectory.
    pub fn flow_field(&self) -> Result<FlowField> {
        let x0 = &self.initial;
        match &self.structure {
            ModelStructure::Contact(c) => flow::contact_flow(c, &self.hamiltonian, x0),
            ModelStructure::Cosymplectic(s) => flow::cosymplectic_flow(s, &self.hamiltonian, x0),
            ModelStructure::Cocontact(s) => flow::cocontact_flow(s, &self.hamiltonian, x0),
            ModelStructure::LevelSet(l) => flow::symplectic_flow(&l.symplectic.omega_at(x0)?, &self.hamiltonian),
        }
    }

    /// Residual of the defining identity of the field `v` at `x`:
    /// `|eta(X) + H|` (contact), `|theta(E) - 1|` (cosymplectic), the larger of
    /// both (cocontact) and `|iota_X omega - dH|` (symplectic).
    pub fn defining_residual(&self, x: &StatePoint, v: &DVector<f64>) -> Result<f64> {
        let h = &self.hamiltonian;
        Ok(match &self.structure {
            ModelStructure::Contact(c) => (c.eta_at(x)?.pair(v) + h.value(x)).abs(),
            ModelStructure::Cosymplectic(s) => (s.theta_at(x)?.pair(v) - 1.0).abs(),
            ModelStructure::Cocontact(s) => {
                let t = (s.theta_at(x)?.pair(v) - 1.0).abs();
                let e = (s.eta_at(x)?.pair(v) + h.value(x)).abs();
                t.max(e)
            }
            ModelStructure::LevelSet(l) => {
                let omega = l.symplectic.omega_at(x)?;
                (omega.transpose() * v - h.gradient(x)?.comps()).amax()
            }
        })
    }

    /// Copy of the model with a degenerate structure.
    pub fn corrupt(&self, corruption: Corruption) -> Result<ModelBundle> {
        let n = self.dim();
        let zero_form = || OneForm::Constant(Covector::zeros(n));
        let zero_two = || TwoForm::Constant(DMatrix::zeros(n, n));
        let unsupported = || {
            Error::InvalidParameter(format!(
                "corruption `{}` does not apply to a {} structure",
                corruption.as_str(),
                self.structure.kind_name()
            ))
        };
        let structure = match (&self.structure, corruption) {
            (ModelStructure::Contact(c), Corruption::EtaZero) => ModelStructure::Contact(c.with_eta(zero_form())),
            (ModelStructure::Contact(c), Corruption::DEtaZero) => ModelStructure::Contact(c.with_d_eta(zero_two())),
            (ModelStructure::Cosymplectic(s), Corruption::EtaZero) => {
                ModelStructure::Cosymplectic(s.with_theta(zero_form()))
            }
            (ModelStructure::Cosymplectic(s), Corruption::DEtaZero) => {
                ModelStructure::Cosymplectic(s.with_omega(zero_two()))
            }
            (ModelStructure::Cocontact(s), Corruption::EtaZero) => ModelStructure::Cocontact(s.with_eta(zero_form())),
            (ModelStructure::Cocontact(s), Corruption::DEtaZero) => {
                ModelStructure::Cocontact(s.with_d_eta(zero_two()))
            }
            (ModelStructure::Cocontact(s), Corruption::ThetaEqEta) => {
                ModelStructure::Cocontact(s.with_eta(s.theta().clone()))
            }
            (ModelStructure::LevelSet(l), Corruption::EtaZero) => ModelStructure::LevelSet(LevelSetData {
                liouville: Arc::new(move |_: &StatePoint| DVector::zeros(n)),
                ..l.clone()
            }),
            (ModelStructure::LevelSet(l), Corruption::DEtaZero) => ModelStructure::LevelSet(LevelSetData {
                symplectic: SymplecticStructure::new(n, zero_two(), None)?,
                ..l.clone()
            }),
            _ => return Err(unsupported()),
        };
        Ok(ModelBundle {
            structure,
            ..self.clone()
        })
    }
}

/// Columns `X(e_j)` of a linear field.
pub(crate) fn extract_generator<F>(n: usize, field: F) -> Result<DMatrix<f64>>
where
    F: Fn(&StatePoint) -> Result<DVector<f64>>,
{
    let mut a = DMatrix::zeros(n, n);
    for j in 0..n {
        let mut e = DVector::zeros(n);
        e[j] = 1.0;
        let col = field(&StatePoint::new(e)?)?;
        a.set_column(j, &col);
    }
    Ok(a)
}

/// Interleaved pairs `(a1_i, a2_i)` with unit weights: `*(a1, a2) = (-a2, a1)`.
pub fn hodge_star(alpha: &DVector<f64>) -> DVector<f64> {
    let mut out = DVector::zeros(alpha.len());
    for i in 0..alpha.len() / 2 {
        out[2 * i] = -alpha[2 * i + 1];
        out[2 * i + 1] = alpha[2 * i];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_names_round_trip() {
        for k in ModelKind::ALL {
            assert_eq!(k.name().parse::<ModelKind>().unwrap(), k);
        }
        assert!("damped_osc".parse::<ModelKind>().is_err());
    }

    #[test]
    fn hodge_star_squares_to_minus_one() {
        let a = DVector::from_vec(vec![1.0, 2.0, -3.0, 0.5]);
        assert_eq!(hodge_star(&hodge_star(&a)), -a);
    }
}
