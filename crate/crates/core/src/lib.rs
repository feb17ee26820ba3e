//! Computational kernel for flag geometries over finite fields.
//!
//! The crate is organized bottom-up:
//!
//! * [`field`] — arithmetic in `F_{p^d}` with an optional order-2 field
//!   automorphism,
//! * [`matrix`] / [`subspace`] — row-vector linear algebra, canonical
//!   (reduced row echelon) subspace representatives, quotient charts,
//! * [`form`] — sesquilinear forms, perps, radicals, isotropy,
//! * [`phan`] — flag transversality, geometry membership and enumeration,
//!   quotient geometries, filtrations and links,
//! * [`complex`] — simplicial complexes, integer Smith normal form,
//!   reduced homology, fundamental-group presentations,
//! * [`building`] — chamber systems of types A/B/C, Weyl distances, flips,
//!   residues, gates, and the comparison between flip-flop systems and
//!   geometry chamber systems,
//! * [`json`] — the stable serialization schemas used by the CLI,
//! * [`harness`] — the suite registry and the deterministic case runner
//!   behind `phan suite`.

pub mod building;
pub mod complex;
pub mod error;
pub mod field;
pub mod form;
pub mod harness;
pub mod json;
pub mod matrix;
pub mod phan;
pub mod subspace;

pub use building::{
    flip::{flip_flop_system, gpg_compare},
    Building, ChamberFlag, CharacterizationReport, Flip, FlipFlopSystem, GpgReport, Residue,
    StepFit, WeylElement, WeylKind,
};
pub use complex::homology::{reduced_homology, HomologyMode, HomologyOptions, HomologyReport};
pub use complex::{order_complex, SimplicialComplex};
pub use error::Error;
pub use field::{Field, FieldElement, Involution};
pub use form::Form;
pub use harness::{
    emit_csv, emit_json, find_suite, parse_report, registry, run_suite, work_budget, CaseParams,
    RunReport, SuiteDescriptor, Verdict,
};
pub use json::{
    parse_building_name, BoundDoc, BuildingDoc, ComplexDoc, ComponentDoc, FieldDoc, FlipDoc,
    FormDoc, GeometryDoc, HomologyDoc, SubspaceDoc, VerificationRecord,
};
pub use matrix::Matrix;
pub use phan::{CompatibleFamily, Flag, Geometry, GeometryKind, GeometrySpec};
pub use subspace::{QuotientChart, Subspace};
