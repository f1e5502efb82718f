//! Exact finite-level computations around obstructions to deforming mod-l
//! Galois representations: cohomology of the tame quotient, the explicit
//! Brauer-class cocycle, local vanishing predicates, congruence primes from
//! newform data, and one-relation deformation-ring checks.

pub mod arith;
pub mod brauer_recipe;
pub mod cohomology;
pub mod congruence;
pub mod defring;
pub mod exact_linalg;
pub mod finite_group;
pub mod galois_modules;
pub mod lifting;
pub mod obstruction_engine;
pub mod tame_group;
