//! Exact arithmetic: field elements, sparse multivariate polynomials,
//! polynomial matrices and Smith normal form over `k[t]`.

pub mod expr;
pub mod linalg;
pub mod matrix;
pub mod monomial;
pub mod poly;
pub mod scalar;
pub mod snf;

pub use expr::parse_expression;
pub use matrix::{mat_op, MatOp, MatOpResult, PolyMatrix};
pub use monomial::{Monomial, OrderKind, TermOrder};
pub use poly::{ring_op, Ctx, PolyContext, Polynomial, RingOp};
pub use scalar::{Field, Scalar};
pub use snf::{smith_normal_form, univariate_divides, SmithForm};
