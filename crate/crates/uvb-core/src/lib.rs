//! Classification of uniform vector bundles on projective space through integer
//! solutions of Chow-ring factorization constraints.

pub mod bundles;
pub mod chow;
pub mod classify;
pub mod constraints;
pub mod registry;
pub mod ring;
pub mod solver;
