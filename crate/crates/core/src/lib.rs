//! Closed-form evaluation of the Sinc transform
//! `int_0^inf f(x) sin^n(lambda x) / x^n dx` for even entire functions `f` of
//! exponential type, together with the numerical machinery used to check it:
//! a Hadamard finite-part integrator and a brute-force oscillatory quadrature.

pub mod error;
pub mod expansion;
pub mod finite_part;
pub mod functions;
pub mod oracle;
pub mod quadrature;
pub mod rational;
pub mod special;

pub use error::{Result, SincError};
pub use expansion::{
    build_expansion, build_expansion_with_finite_part, evaluate_expansion, Parity,
    TerminatingExpansion,
};
pub use finite_part::{finite_part_integral, FinitePartMethod, FinitePartResult};
pub use functions::{EvenEntireFunction, FunctionKind, FunctionParams};
pub use oracle::{sinc_transform_oracle, OracleConfig, QuadratureResult};
pub use rational::Rational;
