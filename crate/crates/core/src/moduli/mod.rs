//! Operator and commutator moduli of continuity: exact double operator
//! integrals, witness search and transforms, envelopes, and two-sided
//! estimates for the commutator modulus.

pub mod doi;
pub mod envelope;
pub mod estimates;
pub mod mcc;
pub mod search;
pub mod transform;
pub mod witness;

pub use doi::doi_quasicommutator;
pub use envelope::ModulusEnvelope;
pub use estimates::{
    kme_lower_bound, kme_lower_bound_conj_lattice, kme_lower_bound_with, net_upper_bound, scalar_modulus_lower,
    KmeLowerBound,
};
pub use mcc::{mcc_sandwich_check, MccReport};
pub use search::{modulus_search, SearchOptions, SpectralSet};
pub use transform::{omega_transform, ModulusSpec};
pub use witness::{
    best_witness, conjugate_witness, corner_lift, corner_restrict, projection_to_symmetry, swap_lift,
    symmetry_to_plain, symmetry_to_projection, witness_scale, ModulusKind, ModulusWitness, WitnessCheck,
};
