//! Exact lattice arithmetic for connected components of moduli of real
//! polarized K3 surfaces and their deformations to hyper-elliptic ones.

pub mod binary;
pub mod deformation;
pub mod error;
pub mod finite_form;
pub mod invariants;
pub mod lattice;
pub mod linalg;
pub mod moduli;

pub use binary::{classes_in_genus, reduce, AutImage, BinaryClass, BinaryForm, Equivalence};
pub use deformation::{
    build_involution, case_table, component_label, genus_deformable, is_deformation_of_hyperelliptic, Clause,
    HypCase, HypTag, PolarizedInvolution, Verdict,
};
pub use error::{Error, Result};
pub use finite_form::{FiniteAbelianGroup, FiniteForm, FormIsometry, FormKind, DEFAULT_GROUP_BOUND};
pub use invariants::{enumerate_full, enumerate_rad, validate_full, validate_rad, GenusInvariants, ValidationReport};
pub use lattice::{EvenLattice, IntegralLattice};
pub use linalg::{IntMatrix, RatMatrix};
pub use moduli::{
    count_components, list_components, over2_component_bound, CaseTag, ComponentCount, ComponentDescriptor,
    ComponentFlags,
};
