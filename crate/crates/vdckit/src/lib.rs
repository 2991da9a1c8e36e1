//! vdckit: a toolkit for finite virtual double categories.

pub mod basic;
pub mod constructions;
pub mod fixtures;
pub mod functor;
pub mod presentation;
pub mod error;
pub mod exponential;
pub mod fincat;
pub mod ident;
pub mod instances;
pub mod lax;
pub mod table;
pub mod vdc;

pub use error::{Result, VdcError};
pub use ident::Ident;
pub use vdc::{Cell, Frame, Loose, NormalVdc, Vdc, VdcHandle};
