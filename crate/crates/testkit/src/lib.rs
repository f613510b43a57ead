//! Test support for the `mobayes` workspace: brute-force oracles that stay
//! independent of the implementation paths they check, plus random dataset
//! generators. Not published; dev-dependency only.

pub mod datagen;
pub mod oracle;
