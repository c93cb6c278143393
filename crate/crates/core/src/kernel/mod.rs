//! Exact symbolic expressions over jet coordinates.

mod coord;
mod error;
mod expr;
mod gcd;
mod parse;
mod poly;

pub use coord::{Aux, Coord, CoordKind, Field, Indep, Param, MAX_JET_ORDER};
pub use error::KernelError;
pub use expr::{Bindings, Expr, Point, DEFAULT_EPS_DIV};
pub use parse::{momentum_alias, parse, parse_with, Momentum, ParseOptions};
pub use poly::{Monomial, Poly, Q};
