use crate::error::{check_len, Error, Result};
use crate::lsqr::{lsqr, LsqrOptions, LsqrResult};
use crate::operator::SparseOperator;

/// Minimum-norm least-squares image by LSQR.
pub fn solve_least_squares(a: &SparseOperator, y: &[f64], opts: LsqrOptions) -> Result<LsqrResult> {
    check_len(a.rows(), y.len())?;
    if a.nnz() == 0 {
        return Err(Error::InvalidOperator("least squares needs a nonzero operator".into()));
    }
    Ok(lsqr(a, y, opts))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_zero_operator() {
        let a = SparseOperator::from_rows(2, vec![vec![]]).unwrap();
        assert!(solve_least_squares(&a, &[1.0], LsqrOptions::default()).is_err());
    }
}
