//! Exact sparse truncated multivariate power series over the rationals.

mod monomial;
mod ring;
#[allow(clippy::module_inception)]
mod series;
mod solve;
mod text;

pub use monomial::{Exp, Monomial};
pub use ring::{Ring, TruncationSpec, VarSpec};
pub use series::{format_monomial, int, rat, ExactSeries, Rational};
pub use solve::{log_tracking_two, solve_fixed_point};
pub use text::{from_canonical_text, to_canonical_text, to_csv};
