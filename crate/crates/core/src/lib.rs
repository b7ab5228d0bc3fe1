//! Fixed-point indices of polynomial vector fields on surfaces, exact
//! computations in nilpotent Lie algebras, and an end-to-end check that an
//! essential block of zeros of one generator of a nilpotent action holds a
//! common zero of all generators.

pub mod linalg;
pub mod lie;
pub mod poly;
pub mod field;
pub mod region;
pub mod zeros;
pub mod index;
pub mod linear2;
pub mod flow;
pub mod action;

pub use action::{ActionError, ActionSpec, Status, VerificationReport, VerifyOptions};
pub use flow::{Advance, FlowError, FlowMap, IntegratorOptions};
pub use field::{Chart, CompiledField, FieldError, PolyVectorField, Surface, SurfaceKind};
pub use index::{IndexError, IndexResult, WindingOptions};
pub use lie::{AlgebraElement, LieAlgebra, LieError, StructureTable, Subspace};
pub use linalg::Rational;
pub use poly::Poly2;
pub use region::{Curve, Region};
pub use zeros::{ZeroCluster, ZeroOptions};
