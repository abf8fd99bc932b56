//! Numerics for operators on a finite-dimensional space carrying the
//! semi-inner product `<x|y>_A = y* A x` of a positive semi-definite weight `A`.
//!
//! Every gauge is evaluated on the *lift* of an operator: the `r x r` matrix
//! that represents it on the range of `A^{1/2}` (`r = rank A`). On the lift the
//! weighted quantities become their classical counterparts, so the A-seminorm is
//! a largest singular value and the A-numerical radius is a support-function
//! sweep over Hermitian parts.
//!
//! Module map:
//!
//! * [`weightspace`]: the weight, its spectral data, the A-inner product.
//! * [`semiop`]: operators bound to a weight, A-adjoint, lift.
//! * [`gauges`]: A-seminorm, A-numerical radius, A-Crawford number, boundary polygon.
//! * [`rankone`]: `x (x)_A y` operators and their closed forms.
//! * [`certify`]: orthogonality / parallelism decisions with margins.
//! * [`blockmat`]: operator matrices over `diag(A, ..., A)` and their inequalities.
//! * [`genfuzz`]: seeded generators, the check registry and campaign runner.
//! * [`schema`]: JSON encoding of complex scalars, matrices and instance files.

pub mod blockmat;
pub mod certify;
pub mod error;
pub mod gauges;
pub mod genfuzz;
pub mod linalg;
pub mod rankone;
pub mod schema;
pub mod search;
pub mod semiop;
pub mod weightspace;

pub use error::{Error, Result};
pub use linalg::{CMat, CVec};
pub use num_complex::Complex64;
pub use semiop::{SemiOperator, TildeLift};
pub use weightspace::{AVector, Weight};
