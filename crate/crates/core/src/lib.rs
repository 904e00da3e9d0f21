//! Numerical and combinatorial tools for contact structures on R^3.
//!
//! - [`expr`] and [`forms`]: coordinate expressions and exterior calculus.
//! - [`contact`]: grid verification of the contact condition, kernels,
//!   contact vector fields.
//! - [`foliation`]: characteristic foliations of parametrized surfaces,
//!   singularity census, closed leaves and dividing sets.
//! - [`fronts`]: Legendrian front words, invariants, moves, stabilization
//!   and space-curve reconstruction.
//! - [`seifert`]: Seifert circles and the Bennequin inequality.

pub mod expr;
pub mod forms;
pub mod contact;
pub mod foliation;
pub mod fronts;
pub mod seifert;
