//! Finitely presented functors over finite rings, made executable.
//!
//! The library works over finite unital rings given by multiplication tables.
//! Modules are finite and finitely presented, functors are presented by a
//! single defining module morphism, and every homological construction
//! (kernels, cokernels, Hom, tensor, natural transformation groups) is
//! computed exactly. On top of that sits the duality machinery: the dual
//! functor sending representables to tensor functors, its left and right
//! adjoints, the comparison morphisms between a functor and its double
//! dual, and the purity tests that explain why everything collapses so
//! nicely over finite rings.

pub mod abelian;
pub mod agj;
pub mod basis;
pub mod corpus;
pub mod error;
pub mod functor;
pub mod module;
pub mod report;
pub mod ring;
pub mod script;
pub mod znf;

pub use abelian::{AbGroup, AbMap, Window};
pub use error::{Error, Result};
pub use module::{FpModule, ModuleMorphism, Side};
pub use ring::FiniteRing;
