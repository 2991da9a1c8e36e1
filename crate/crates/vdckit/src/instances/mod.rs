//! Concrete virtual double categories over finite sets.

pub mod dist;
pub mod hom;
pub mod span;
