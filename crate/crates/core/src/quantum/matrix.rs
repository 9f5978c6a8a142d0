use num_complex::Complex64;
use std::ops::{Add, Mul};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A 2x2 complex matrix acting on a single qubit, stored row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix2(pub [[Complex64; 2]; 2]);

impl Matrix2 {
    pub const fn new(m: [[Complex64; 2]; 2]) -> Self {
        Matrix2(m)
    }

    pub fn real(m: [[f64; 2]; 2]) -> Self {
        Matrix2([
            [Complex64::new(m[0][0], 0.0), Complex64::new(m[0][1], 0.0)],
            [Complex64::new(m[1][0], 0.0), Complex64::new(m[1][1], 0.0)],
        ])
    }

    pub const fn identity() -> Self {
        Matrix2([[ONE, ZERO], [ZERO, ONE]])
    }

    pub const fn zero() -> Self {
        Matrix2([[ZERO, ZERO], [ZERO, ZERO]])
    }

    /// `d0 |0><0| + d1 |1><1|`
    pub fn diag(d0: f64, d1: f64) -> Self {
        Matrix2::real([[d0, 0.0], [0.0, d1]])
    }

    pub fn pauli_x() -> Self {
        Matrix2::real([[0.0, 1.0], [1.0, 0.0]])
    }

    pub fn pauli_z() -> Self {
        Matrix2::real([[1.0, 0.0], [0.0, -1.0]])
    }

    /// `i * sigma_y = [[0, 1], [-1, 0]]`
    pub fn i_pauli_y() -> Self {
        Matrix2::real([[0.0, 1.0], [-1.0, 0.0]])
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[row][col]
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let m = &self.0;
        Matrix2([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Matrix2) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..2 {
            for c in 0..2 {
                worst = worst.max((self.0[r][c] - other.0[r][c]).norm());
            }
        }
        worst
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        let m = &self.0;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }
}

impl Mul for Matrix2 {
    type Output = Matrix2;

    fn mul(self, rhs: Matrix2) -> Matrix2 {
        let a = &self.0;
        let b = &rhs.0;
        let mut out = [[ZERO; 2]; 2];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, entry) in row.iter_mut().enumerate() {
                *entry = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        Matrix2(out)
    }
}

impl Add for Matrix2 {
    type Output = Matrix2;

    fn add(self, rhs: Matrix2) -> Matrix2 {
        let mut out = self.0;
        for (r, row) in out.iter_mut().enumerate() {
            for (c, entry) in row.iter_mut().enumerate() {
                *entry += rhs.0[r][c];
            }
        }
        Matrix2(out)
    }
}
