//! Expression language for custom integrands `g(x, t)`.
//!
//! ```
//! use gradbound::dsl::{parse, eval_dual2};
//! use gradbound::coefficient::CoefficientSet;
//!
//! let e = parse("t^2 / 2").unwrap();
//! let d = eval_dual2(&e, &[0.0, 0.0], 3.0, &CoefficientSet::new()).unwrap();
//! assert_eq!((d.value, d.d_t, d.d_tt), (4.5, 3.0, 1.0));
//! ```

mod dual;
mod eval;
mod parser;

pub use dual::Dual2;
pub use eval::{eval_dual2, eval_value, to_integrand};
pub use parser::{parse, BinOp, Expr, ExprKind, Func, ParseError, ParseErrorKind, Span};

pub(crate) use eval::CustomModel;
