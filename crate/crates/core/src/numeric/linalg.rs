//! Small dense linear algebra for 2×2 and 3×3 problems.

use serde::Serialize;

pub type Mat2 = [[f64; 2]; 2];

pub fn det2(m: &Mat2) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

pub fn trace2(m: &Mat2) -> f64 {
    m[0][0] + m[1][1]
}

pub fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Solves `a · x = b` by Gaussian elimination with partial pivoting.
/// Returns `None` when a pivot is exactly zero or the result is not finite.
pub fn solve<const N: usize>(mut a: [[f64; N]; N], mut b: [f64; N]) -> Option<[f64; N]> {
    for col in 0..N {
        let piv = (col..N).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col] == 0.0 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..N {
            let factor = a[row][col] / a[col][col];
            for k in col..N {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = [0.0; N];
    for row in (0..N).rev() {
        let mut acc = b[row];
        for k in row + 1..N {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// A complex number, used only to report eigenvalues.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

/// Eigen-decomposition of a real 2×2 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Eigen2 {
    /// Real eigenvalues `l1 ≤ l2` with unit eigenvectors.
    Real {
        values: [f64; 2],
        vectors: [[f64; 2]; 2],
    },
    /// Complex pair `re ± i·im`, `im > 0`.
    Complex { re: f64, im: f64 },
}

impl Eigen2 {
    pub fn values(&self) -> [Complex; 2] {
        match *self {
            Eigen2::Real { values, .. } => [
                Complex {
                    re: values[0],
                    im: 0.0,
                },
                Complex {
                    re: values[1],
                    im: 0.0,
                },
            ],
            Eigen2::Complex { re, im } => [Complex { re, im: -im }, Complex { re, im }],
        }
    }
}

fn unit(v: [f64; 2]) -> [f64; 2] {
    let n = v[0].hypot(v[1]);
    [v[0] / n, v[1] / n]
}

/// Unit eigenvector of `m` for the real eigenvalue `l`.
pub fn eigenvector(m: &Mat2, l: f64) -> [f64; 2] {
    // Rows of (m - l I) are orthogonal to the eigenvector; use the larger one.
    let r0 = [m[0][0] - l, m[0][1]];
    let r1 = [m[1][0], m[1][1] - l];
    let n0 = r0[0].hypot(r0[1]);
    let n1 = r1[0].hypot(r1[1]);
    if n0 == 0.0 && n1 == 0.0 {
        return [1.0, 0.0];
    }
    let r = if n0 >= n1 { r0 } else { r1 };
    unit([-r[1], r[0]])
}

pub fn eig2(m: &Mat2) -> Eigen2 {
    let tr = trace2(m);
    let det = det2(m);
    let half = 0.5 * tr;
    let disc = half * half - det;
    if disc >= 0.0 {
        let s = disc.sqrt();
        // Avoid cancellation in the smaller-magnitude root.
        let big = if half >= 0.0 { half + s } else { half - s };
        let small = if big != 0.0 { det / big } else { 0.0 };
        let (l1, l2) = if big <= small {
            (big, small)
        } else {
            (small, big)
        };
        Eigen2::Real {
            values: [l1, l2],
            vectors: [eigenvector(m, l1), eigenvector(m, l2)],
        }
    } else {
        Eigen2::Complex {
            re: half,
            im: (-disc).sqrt(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_systems() {
        let x = solve([[2.0, 1.0], [1.0, 3.0]], [3.0, 5.0]).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-15 && (x[1] - 1.4).abs() < 1e-15);
        assert!(solve([[1.0, 2.0], [2.0, 4.0]], [1.0, 1.0]).is_none());
        let y = solve(
            [[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 2.0]],
            [1.0, 2.0, 4.0],
        )
        .unwrap();
        assert_eq!(y, [2.0, 1.0, 2.0]);
    }

    #[test]
    fn determinants() {
        assert_eq!(det2(&[[1.0, 2.0], [3.0, 4.0]]), -2.0);
        assert_eq!(
            det3(&[[1.0, 1.0, 1.0], [0.0, 1.0, 0.0], [2.0, 0.0, 1.0]]),
            -1.0
        );
    }

    #[test]
    fn real_and_complex_spectra() {
        let m = [[-1.0, 1.0], [0.01, 0.0]];
        match eig2(&m) {
            Eigen2::Real { values, vectors } => {
                assert!(values[0] < 0.0 && values[1] > 0.0);
                for (l, v) in values.iter().zip(vectors) {
                    let mv = [
                        m[0][0] * v[0] + m[0][1] * v[1],
                        m[1][0] * v[0] + m[1][1] * v[1],
                    ];
                    assert!((mv[0] - l * v[0]).abs() < 1e-14 && (mv[1] - l * v[1]).abs() < 1e-14);
                }
            }
            other => panic!("expected real spectrum, got {other:?}"),
        }
        assert_eq!(
            eig2(&[[0.0, 1.0], [-1.0, 0.0]]),
            Eigen2::Complex { re: 0.0, im: 1.0 }
        );
    }
}
