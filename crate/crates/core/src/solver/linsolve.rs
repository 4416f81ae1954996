use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;

use super::SparseJacobian;

/// Solve `J x = rhs` by sparse LU with partial pivoting. `None` when the
/// factorization fails or produces non-finite values.
pub(crate) fn solve(j: &SparseJacobian, rhs: &[f64]) -> Option<Vec<f64>> {
    let triplets: Vec<Triplet<usize, usize, f64>> = j
        .entries
        .iter()
        .map(|&(r, c, v)| Triplet::new(r, c, v))
        .collect();
    let a = SparseColMat::<usize, f64>::try_new_from_triplets(j.nrows, j.ncols, &triplets).ok()?;
    let lu = a.sp_lu().ok()?;
    let mut b = Mat::<f64>::from_fn(rhs.len(), 1, |i, _| rhs[i]);
    lu.solve_in_place(b.as_mut());
    let x: Vec<f64> = (0..rhs.len()).map(|i| b[(i, 0)]).collect();
    x.iter().all(|v| v.is_finite()).then_some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_system() {
        // [2 1; 1 3] x = [3; 5] -> x = [0.8, 1.4]
        let j = SparseJacobian {
            nrows: 2,
            ncols: 2,
            entries: vec![(0, 0, 2.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 3.0)],
        };
        let x = solve(&j, &[3.0, 5.0]).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-14 && (x[1] - 1.4).abs() < 1e-14);
    }

    #[test]
    fn singular_system_is_reported() {
        let j = SparseJacobian {
            nrows: 2,
            ncols: 2,
            entries: vec![(0, 0, 1.0), (1, 0, 1.0)],
        };
        assert!(solve(&j, &[1.0, 2.0]).is_none());
    }
}
