//! Exact univariate algebra over `Q`: polynomials, rational functions,
//! truncated and log-blocked power series, and linear algebra over `Q(x)`.

mod linalg;
mod poly;
mod series;

pub use linalg::{bareiss_echelon, solve_dependency, solve_dependency_naive, Dependence, LinSystem};
pub use poly::{Poly, RatFun};
pub use series::{LogSeries, Ring, ThetaOperator, TruncSeries, ZetaPoly};
