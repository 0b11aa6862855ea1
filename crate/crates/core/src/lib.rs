//! Arithmetic of the complex field: exponent pairs a|a', the Gamma and Beta
//! functions built from them, closed-form product evaluations of the
//! Selberg-twin beta integrals over complex configuration spaces, the
//! change-of-variables machinery behind them, and a reproducible
//! importance-sampling Monte Carlo engine that checks every identity
//! numerically.

pub mod closed_form;
pub mod error;
pub mod exponents;
pub mod gamma;
pub mod integrands;
pub mod maps;
pub mod mc;
pub mod verify;

pub use error::Error;
pub use exponents::FieldExponent;
pub use gamma::{beta_field, gamma_field, Classification, FieldGammaValue};
