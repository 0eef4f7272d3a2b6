use num_complex::Complex64;

use super::{ComplexMatrix, ONE, ZERO};
use crate::error::{Error, Result};

/// `P·A = L·U` with unit lower `L`, packed into one matrix.
#[derive(Debug, Clone)]
pub struct LuFactors {
    lu: ComplexMatrix,
    /// Row `i` of `P·A` is row `perm[i]` of `A`.
    perm: Vec<usize>,
    sign: f64,
    singular: bool,
}

/// LU factorisation with partial pivoting. An exactly zero pivot column does
/// not fail; it marks the factors as singular and elimination moves on.
pub fn lu_factor(a: &ComplexMatrix) -> Result<LuFactors> {
    let n = a.require_square()?;
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut sign = 1.0;
    let mut singular = false;
    for k in 0..n {
        let (p, best) = (k..n)
            .map(|i| (i, lu[(i, k)].norm()))
            .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best == 0.0 {
            singular = true;
            continue;
        }
        if p != k {
            for j in 0..n {
                let t = lu[(k, j)];
                lu[(k, j)] = lu[(p, j)];
                lu[(p, j)] = t;
            }
            perm.swap(k, p);
            sign = -sign;
        }
        let pivot = lu[(k, k)];
        for i in (k + 1)..n {
            let factor = lu[(i, k)] / pivot;
            lu[(i, k)] = factor;
            if factor == ZERO {
                continue;
            }
            for j in (k + 1)..n {
                let u = lu[(k, j)];
                lu[(i, j)] -= factor * u;
            }
        }
    }
    Ok(LuFactors {
        lu,
        perm,
        sign,
        singular,
    })
}

/// Solves `A·x = rhs` from precomputed factors.
pub fn lu_solve(factors: &LuFactors, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
    factors.solve(rhs)
}

impl LuFactors {
    pub fn order(&self) -> usize {
        self.perm.len()
    }

    /// True when some pivot was exactly zero.
    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn determinant(&self) -> Complex64 {
        if self.singular {
            return ZERO;
        }
        (0..self.order()).fold(Complex64::new(self.sign, 0.0), |acc, i| acc * self.lu[(i, i)])
    }

    fn check(&self, rhs: &[Complex64]) -> Result<usize> {
        let n = self.order();
        if rhs.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: rhs.len(),
            });
        }
        if self.singular {
            return Err(Error::Singular);
        }
        Ok(n)
    }

    pub fn solve(&self, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.check(rhs)?;
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| rhs[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let acc: Complex64 = row[..i].iter().zip(&x[..i]).map(|(l, v)| l * v).sum();
            x[i] -= acc;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let acc: Complex64 = row[i + 1..].iter().zip(&x[i + 1..]).map(|(u, v)| u * v).sum();
            x[i] = (x[i] - acc) / row[i];
        }
        Ok(x)
    }

    /// Solves `A*·x = rhs` (conjugate transpose) with the same factors.
    pub fn solve_adjoint(&self, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.check(rhs)?;
        // A* = U* L* P, so solve U* y = rhs, then L* t = y, then x = Pᵀ t.
        // Column sweeps keep the row-major storage contiguous.
        let mut y = rhs.to_vec();
        for i in 0..n {
            y[i] /= self.lu[(i, i)].conj();
            let yi = y[i];
            let row = self.lu.row(i);
            for j in (i + 1)..n {
                y[j] -= row[j].conj() * yi;
            }
        }
        for i in (0..n).rev() {
            let yi = y[i];
            let row = self.lu.row(i);
            for j in 0..i {
                y[j] -= row[j].conj() * yi;
            }
        }
        let mut x = vec![ONE; n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = y[i];
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_solve() {
        let f = lu_factor(&ComplexMatrix::identity(3)).unwrap();
        let v = vec![c(1.0, 2.0), c(-3.0, 0.5), c(0.0, 1.0)];
        assert_eq!(lu_solve(&f, &v).unwrap(), v);
    }

    #[test]
    fn diagonal_solve() {
        let a = ComplexMatrix::from_rows(&[vec![c(2.0, 0.0), ZERO], vec![ZERO, c(3.0, 0.0)]]).unwrap();
        let x = lu_factor(&a).unwrap().solve(&[c(2.0, 0.0), c(3.0, 0.0)]).unwrap();
        assert_eq!(x, vec![ONE, ONE]);
    }

    #[test]
    fn adjoint_solve_matches_explicit_adjoint() {
        let a = ComplexMatrix::from_fn(4, 4, |i, j| c(((i * 5 + j * 3) % 7) as f64 - 3.0, ((i + j * j) % 5) as f64 - 2.0));
        let b = vec![c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 2.0), c(0.5, 0.5)];
        let x = lu_factor(&a).unwrap().solve_adjoint(&b).unwrap();
        let y = lu_factor(&a.adjoint()).unwrap().solve(&b).unwrap();
        for (u, v) in x.iter().zip(&y) {
            assert!((u - v).norm() < 1e-12);
        }
    }

    #[test]
    fn singular_pivot_is_signalled() {
        let f = lu_factor(&ComplexMatrix::zeros(2, 2)).unwrap();
        assert!(f.is_singular());
        assert_eq!(f.determinant(), ZERO);
        assert!(matches!(f.solve(&[ONE, ONE]), Err(Error::Singular)));
    }

    #[test]
    fn determinant_with_pivoting() {
        let a = ComplexMatrix::from_rows(&[vec![ZERO, c(2.0, 0.0)], vec![c(3.0, 0.0), c(1.0, 0.0)]]).unwrap();
        assert!((lu_factor(&a).unwrap().determinant() - c(-6.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(lu_factor(&ComplexMatrix::zeros(2, 3)).is_err());
        let f = lu_factor(&ComplexMatrix::identity(2)).unwrap();
        assert!(matches!(f.solve(&[ONE]), Err(Error::DimensionMismatch { .. })));
    }
}
