//! Minimal dense linear algebra for 2×2 and 4×4 real matrices.
//!
//! The covariance pipeline only ever needs fixed-size kernels: 2×2 block
//! algebra for the Simon invariants, a 4×4 determinant for the symplectic
//! spectrum, and a 4×4 matrix exponential for the Monte Carlo propagator.
//! Hand-rolled versions keep the crate dependency-light and generic over the
//! scalar type.

use crate::scalar::{lit, Real};

/// Dense 2×2 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2<T>(pub [[T; 2]; 2]);

impl<T: Real> Mat2<T> {
    /// Diagonal matrix `diag(a, b)`.
    pub fn diag(a: T, b: T) -> Self {
        Mat2([[a, T::zero()], [T::zero(), b]])
    }

    /// The single-mode symplectic form `J = [[0, 1], [-1, 0]]`.
    pub fn symplectic_j() -> Self {
        Mat2([[T::zero(), T::one()], [-T::one(), T::zero()]])
    }

    pub fn det(&self) -> T {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn trace(&self) -> T {
        self.0[0][0] + self.0[1][1]
    }

    pub fn transpose(&self) -> Self {
        Mat2([
            [self.0[0][0], self.0[1][0]],
            [self.0[0][1], self.0[1][1]],
        ])
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let a = &self.0;
        let b = &rhs.0;
        let mut out = [[T::zero(); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(out)
    }
}

/// Determinant of a 4×4 matrix by cofactor expansion over 2×2 minors.
/// Exact-precision friendly for the well-scaled matrices this crate builds.
pub fn det4<T: Real>(m: &[[T; 4]; 4]) -> T {
    // 2x2 minors of the first two rows, indexed by column pair.
    let minor = |c0: usize, c1: usize| m[0][c0] * m[1][c1] - m[0][c1] * m[1][c0];
    let comp = |c0: usize, c1: usize| m[2][c0] * m[3][c1] - m[2][c1] * m[3][c0];
    minor(0, 1) * comp(2, 3) - minor(0, 2) * comp(1, 3) + minor(0, 3) * comp(1, 2)
        + minor(1, 2) * comp(0, 3)
        - minor(1, 3) * comp(0, 2)
        + minor(2, 3) * comp(0, 1)
}

/// 4×4 matrix exponential by scaling-and-squaring with a Taylor series.
///
/// Converges for any input; intended for one-off propagator construction
/// (`exp(A·dt)` with moderate `‖A·dt‖`), not for hot loops.
pub(crate) fn expm4<T: Real>(a: &[[T; 4]; 4]) -> [[T; 4]; 4] {
    // Scale until the max-row-sum norm is ≤ 1/2, run the series, square back.
    let mut norm = T::zero();
    for row in a {
        let s = row.iter().fold(T::zero(), |acc, x| acc + x.abs());
        norm = norm.max(s);
    }
    let mut squarings = 0u32;
    let mut scale = T::one();
    while norm * scale > half_norm::<T>() && squarings < 64 {
        scale = scale * lit(0.5);
        squarings += 1;
    }

    let mut scaled = *a;
    for row in &mut scaled {
        for x in row.iter_mut() {
            *x = *x * scale;
        }
    }

    // Taylor: I + X + X²/2! + … ; with ‖X‖ ≤ 1/2 twenty terms reach f64 eps.
    let mut result = identity4::<T>();
    let mut term = identity4::<T>();
    for k in 1..=20 {
        term = mul4(&term, &scaled);
        let inv_k = T::one() / lit::<T>(k as f64);
        for (i, row) in term.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = *x * inv_k;
                result[i][j] = result[i][j] + *x;
            }
        }
    }

    for _ in 0..squarings {
        result = mul4(&result, &result);
    }
    result
}

fn half_norm<T: Real>() -> T {
    lit(0.5)
}

pub(crate) fn identity4<T: Real>() -> [[T; 4]; 4] {
    let mut m = [[T::zero(); 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = T::one();
    }
    m
}

pub(crate) fn mul4<T: Real>(a: &[[T; 4]; 4], b: &[[T; 4]; 4]) -> [[T; 4]; 4] {
    let mut out = [[T::zero(); 4]; 4];
    for i in 0..4 {
        for k in 0..4 {
            let aik = a[i][k];
            for j in 0..4 {
                out[i][j] = out[i][j] + aik * b[k][j];
            }
        }
    }
    out
}

/// `A · v` for a 4×4 matrix and a 4-vector.
pub(crate) fn matvec4<T: Real>(a: &[[T; 4]; 4], v: &[T; 4]) -> [T; 4] {
    let mut out = [T::zero(); 4];
    for (i, row) in a.iter().enumerate() {
        out[i] = row[0] * v[0] + row[1] * v[1] + row[2] * v[2] + row[3] * v[3];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn mat2_algebra() {
        let j = Mat2::<f64>::symplectic_j();
        assert_eq!(j.det(), 1.0);
        // J² = -I
        let jj = j.mul(&j);
        assert_eq!(jj.0, [[-1.0, 0.0], [0.0, -1.0]]);
        let m = Mat2([[1.0, 2.0], [3.0, 4.0]]);
        assert_eq!(m.det(), -2.0);
        assert_eq!(m.trace(), 5.0);
        assert_eq!(m.transpose().0, [[1.0, 3.0], [2.0, 4.0]]);
    }

    #[test]
    fn det4_matches_block_diagonal_product() {
        let m = [
            [2.0, 1.0, 0.0, 0.0],
            [1.0, 3.0, 0.0, 0.0],
            [0.0, 0.0, 4.0, 2.0],
            [0.0, 0.0, 1.0, 5.0],
        ];
        // det = det([[2,1],[1,3]]) * det([[4,2],[1,5]]) = 5 * 18
        assert_relative_eq!(det4(&m), 90.0, max_relative = 1e-15);
    }

    #[test]
    fn det4_alternating_sign_permutation() {
        // Permutation matrix for (0 1 2 3) -> (1 0 3 2): two transpositions, det = +1.
        let mut p = [[0.0f64; 4]; 4];
        p[0][1] = 1.0;
        p[1][0] = 1.0;
        p[2][3] = 1.0;
        p[3][2] = 1.0;
        assert_eq!(det4(&p), 1.0);
    }

    #[test]
    fn expm_of_rotation_generator() {
        // exp of the 2D rotation generator embedded in 4D: block [[0, w], [-w, 0]]
        // must give [[cos wt, sin wt], [-sin wt, cos wt]] with t = 1 here.
        let w = 0.7f64;
        let mut a = [[0.0; 4]; 4];
        a[0][1] = w;
        a[1][0] = -w;
        let e = expm4(&a);
        assert_relative_eq!(e[0][0], w.cos(), max_relative = 1e-14);
        assert_relative_eq!(e[0][1], w.sin(), max_relative = 1e-14);
        assert_relative_eq!(e[1][0], -w.sin(), max_relative = 1e-14);
        assert_relative_eq!(e[2][2], 1.0, max_relative = 1e-15);
    }

    #[test]
    fn expm_handles_stiff_scale() {
        // Diagonal decaying generator with a large rate: exp(-50) per entry.
        let mut a = [[0.0f64; 4]; 4];
        for (i, row) in a.iter_mut().enumerate() {
            row[i] = -50.0;
        }
        let e = expm4(&a);
        assert_relative_eq!(e[0][0], (-50.0f64).exp(), max_relative = 1e-10);
    }
}
