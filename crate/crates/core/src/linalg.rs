//! Small dense symmetric linear algebra: a tolerance-aware PSD test by
//! pivoted Cholesky and a cyclic Jacobi eigensolver used to produce
//! witness vectors.

/// Outcome of [`psd_check`].
#[derive(Debug, Clone, PartialEq)]
pub enum PsdOutcome {
    /// Positive semidefinite with the given numerical rank.
    Psd { rank: usize },
    /// Not PSD: `witness^T A witness = value < 0`.
    Indefinite { witness: Vec<f64>, value: f64 },
}

impl PsdOutcome {
    pub fn is_psd(&self) -> bool {
        matches!(self, PsdOutcome::Psd { .. })
    }
}

/// Tests a symmetric matrix for positive semidefiniteness.
///
/// The matrix is first equilibrated by its positive diagonal
/// (`B = S A S`, `S = diag(a_ii^{-1/2})`), so moment matrices whose entries
/// span many orders of magnitude keep their rank. Pivoted Cholesky then runs
/// on `B`: pivots at most `eps * trace(B)` count as zero, and the remaining
/// Schur complement must be zero within the same tolerance.
pub fn psd_check(a: &[Vec<f64>], eps: f64) -> PsdOutcome {
    let n = a.len();
    if n == 0 {
        return PsdOutcome::Psd { rank: 0 };
    }
    for (i, row) in a.iter().enumerate() {
        if row[i] < 0.0 {
            let mut w = vec![0.0; n];
            w[i] = 1.0;
            return PsdOutcome::Indefinite {
                witness: w,
                value: row[i],
            };
        }
    }
    let scale: Vec<f64> = (0..n)
        .map(|i| {
            if a[i][i] > 0.0 {
                1.0 / a[i][i].sqrt()
            } else {
                1.0
            }
        })
        .collect();
    let b: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| scale[i] * a[i][j] * scale[j]).collect())
        .collect();
    let trace: f64 = (0..n).map(|i| b[i][i]).sum();
    let max_abs = b
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let tol = eps * if trace > 0.0 { trace } else { max_abs };

    let mut w = b.clone();
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut rank = 0;
    while !remaining.is_empty() {
        let (pos, &p) = remaining
            .iter()
            .enumerate()
            .max_by(|x, y| w[*x.1][*x.1].total_cmp(&w[*y.1][*y.1]))
            .expect("non-empty");
        let pivot = w[p][p];
        if pivot <= tol {
            break;
        }
        remaining.swap_remove(pos);
        for &i in &remaining {
            let f = w[i][p] / pivot;
            for &j in &remaining {
                w[i][j] -= f * w[p][j];
            }
        }
        rank += 1;
    }
    let schur_ok = remaining
        .iter()
        .all(|&i| w[i][i] >= -tol && remaining.iter().all(|&j| i == j || w[i][j].abs() <= tol));
    if schur_ok {
        return PsdOutcome::Psd { rank };
    }
    let (vals, vecs) = symmetric_eigen(&b);
    let imin = (0..n)
        .min_by(|&i, &j| vals[i].total_cmp(&vals[j]))
        .expect("n > 0");
    let witness: Vec<f64> = (0..n).map(|i| scale[i] * vecs[i][imin]).collect();
    let value = quadratic_form(a, &witness);
    PsdOutcome::Indefinite { witness, value }
}

pub fn quadratic_form(a: &[Vec<f64>], v: &[f64]) -> f64 {
    a.iter()
        .zip(v)
        .map(|(row, vi)| vi * row.iter().zip(v).map(|(aij, vj)| aij * vj).sum::<f64>())
        .sum()
}

/// Eigen-decomposition of a dense symmetric matrix by cyclic Jacobi
/// rotations. Returns `(eigenvalues, eigenvectors)`, eigenvector `i` being
/// column `i`; eigenvalues are not sorted.
pub fn symmetric_eigen(a: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j] * m[i][j])
            .sum();
        let diag: f64 = (0..n).map(|i| m[i][i] * m[i][i]).sum();
        if off <= 1e-30 * diag.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q] == 0.0 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                for row in v.iter_mut() {
                    let (vkp, vkq) = (row[p], row[q]);
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| m[i][i]).collect(), v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psd_examples() {
        assert_eq!(psd_check(&[], 1e-10), PsdOutcome::Psd { rank: 0 });
        let id = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        assert_eq!(psd_check(&id, 1e-10), PsdOutcome::Psd { rank: 2 });
        let rank1 = vec![vec![1.0, -1.0], vec![-1.0, 1.0]];
        assert_eq!(psd_check(&rank1, 1e-10), PsdOutcome::Psd { rank: 1 });
        let zero = vec![vec![0.0; 3]; 3];
        assert_eq!(psd_check(&zero, 1e-10), PsdOutcome::Psd { rank: 0 });
    }

    #[test]
    fn indefinite_witness() {
        let a = vec![vec![0.0, 2.0], vec![2.0, 0.0]];
        match psd_check(&a, 1e-10) {
            PsdOutcome::Indefinite { witness, value } => {
                assert!(value < 0.0);
                assert!((quadratic_form(&a, &witness) - value).abs() < 1e-14);
            }
            other => panic!("expected indefinite, got {other:?}"),
        }
        let a = vec![vec![1.0, 0.0], vec![0.0, -1e-3]];
        assert!(!psd_check(&a, 1e-10).is_psd());
    }

    #[test]
    fn wide_dynamic_range_keeps_rank() {
        // Hankel of s_j = j! for j = 0..=16
        let fact: Vec<f64> = (0..=16)
            .scan(1.0, |acc, j| {
                if j > 0 {
                    *acc *= j as f64;
                }
                Some(*acc)
            })
            .collect();
        let h: Vec<Vec<f64>> = (0..=8)
            .map(|i| (0..=8).map(|j| fact[i + j]).collect())
            .collect();
        assert_eq!(psd_check(&h, 1e-10), PsdOutcome::Psd { rank: 9 });
    }

    #[test]
    fn jacobi_eigen_reconstructs() {
        let a = vec![
            vec![4.0, 1.0, -2.0],
            vec![1.0, 2.0, 0.5],
            vec![-2.0, 0.5, 3.0],
        ];
        let (vals, vecs) = symmetric_eigen(&a);
        for k in 0..3 {
            for i in 0..3 {
                let av: f64 = (0..3).map(|j| a[i][j] * vecs[j][k]).sum();
                assert!((av - vals[k] * vecs[i][k]).abs() < 1e-12);
            }
        }
        let trace: f64 = vals.iter().sum();
        assert!((trace - 9.0).abs() < 1e-12);
    }
}
