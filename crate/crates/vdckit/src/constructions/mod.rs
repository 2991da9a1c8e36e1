//! Constructions on virtual double categories: Mod, the free normal
//! embedding, products, and slices over loose monads.

pub mod adjunctions;
pub mod free_normal;
pub mod monads;
pub mod product;
pub mod slice;
