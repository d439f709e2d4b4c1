//! Reference reconstructions: least squares followed by Otsu thresholding,
//! and total-variation regularization with discrepancy-based `λ`.

mod discrepancy;
mod least_squares;
mod otsu;
mod tv;

pub use discrepancy::{select_lambda_discrepancy, LambdaSelection, DISCREPANCY_FACTOR};
pub use least_squares::solve_least_squares;
pub use otsu::{otsu_cut, otsu_threshold, OTSU_BINS};
pub use tv::{default_lambda_grid, solve_tv, TvConfig, TvResult};
