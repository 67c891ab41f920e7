//! Contact, cosymplectic and cocontact Hamiltonian mechanics on finite-dimensional
//! state spaces, with grid truncations of field theories, flow integration and
//! numerical checks of the structural conditions.

pub mod cocontact;
pub mod contact;
pub mod cosymplectic;
pub mod dynamics;
pub mod error;
pub mod flow;
pub mod forms;
pub mod hamiltonian;
pub mod linalg;
pub mod models;
pub mod symplectic;
pub mod wedge;

pub use cocontact::{
    cocontact_hamiltonian_vf, flat_cocontact, reeb_pair, verify_cocontact, CocontactReport, CocontactStructure,
};
pub use contact::{
    flat_map, hamiltonian_vector_field, reeb, verify_contact_pointwise, ContactStructure, VerificationReport,
};
pub use cosymplectic::{
    closedness_probe, evolution_vector_field, flat_cosym, reeb_cosym, verify_almost_contact, ClosednessProbe,
    CosymplecticStructure,
};
pub use dynamics::{
    exact_linear_flow, fit_decay_rate, hamiltonian_trace, pde_residual, rk4_integrate, DecayFit, PdeResidual,
    Trajectory,
};
pub use error::{Error, Result};
pub use flow::{FlowField, PreparedFlat};
pub use forms::{Covector, OneForm, StatePoint, TwoForm, VectorFieldFn};
pub use hamiltonian::HamiltonianSystem;
pub use linalg::rank_tolerance;
pub use models::{
    damped_oscillator, damped_wave, damped_wave_source, oneform_field, sphere_of_oneforms, sphere_of_oneforms_at_level,
    wave_with_source,
    BoundaryCondition, Corruption, Grid, GridField, ModelBundle, ModelKind, ModelStructure, Oracle, Potential, Source,
    StructureCheck,
};
pub use symplectic::{
    contact_type_restriction, contactization, direct_sum, liouville_factor, symplectic_complement,
    LevelSetRestriction, LiouvilleFit, SymplecticSplitting, SymplecticStructure,
};
pub use wedge::eta_wedge_deta_power;
