//! Thin complex LAPACK bindings (OpenBLAS): dense and banded LU with reusable
//! factorizations, used by the scattering solver's bordered linear system.

use num_complex::Complex64;

use crate::{Error, Result};

#[allow(clippy::upper_case_acronyms)]
type Int = i32;

#[link(name = "openblas")]
extern "C" {
    fn zgetrf_(m: *const Int, n: *const Int, a: *mut Complex64, lda: *const Int, ipiv: *mut Int, info: *mut Int);
    fn zgetrs_(
        trans: *const u8,
        n: *const Int,
        nrhs: *const Int,
        a: *const Complex64,
        lda: *const Int,
        ipiv: *const Int,
        b: *mut Complex64,
        ldb: *const Int,
        info: *mut Int,
    );
    fn zgbtrf_(
        m: *const Int,
        n: *const Int,
        kl: *const Int,
        ku: *const Int,
        ab: *mut Complex64,
        ldab: *const Int,
        ipiv: *mut Int,
        info: *mut Int,
    );
    fn zgbtrs_(
        trans: *const u8,
        n: *const Int,
        kl: *const Int,
        ku: *const Int,
        nrhs: *const Int,
        ab: *const Complex64,
        ldab: *const Int,
        ipiv: *const Int,
        b: *mut Complex64,
        ldb: *const Int,
        info: *mut Int,
    );
    #[allow(clippy::too_many_arguments)]
    fn zgemm_(
        transa: *const u8,
        transb: *const u8,
        m: *const Int,
        n: *const Int,
        k: *const Int,
        alpha: *const Complex64,
        a: *const Complex64,
        lda: *const Int,
        b: *const Complex64,
        ldb: *const Int,
        beta: *const Complex64,
        c: *mut Complex64,
        ldc: *const Int,
    );
}

/// C (m×n, column-major) += Aᵀ·B with A of shape k×m and B of shape k×n,
/// both column-major.  Used by the block assembly of the boundary operators.
pub fn gemm_tn_acc(m: usize, n: usize, k: usize, a: &[Complex64], b: &[Complex64], c: &mut [Complex64]) {
    debug_assert_eq!(a.len(), k * m);
    debug_assert_eq!(b.len(), k * n);
    debug_assert_eq!(c.len(), m * n);
    if m == 0 || n == 0 || k == 0 {
        return;
    }
    let (mm, nn, kk) = (m as Int, n as Int, k as Int);
    let one = Complex64::new(1.0, 0.0);
    unsafe {
        zgemm_(
            b"T".as_ptr(),
            b"N".as_ptr(),
            &mm,
            &nn,
            &kk,
            &one,
            a.as_ptr(),
            &kk,
            b.as_ptr(),
            &kk,
            &one,
            c.as_mut_ptr(),
            &mm,
        )
    };
}

/// C (m×n, column-major) += A·B with A of shape m×k and B of shape k×n.
pub fn gemm_nn_acc(m: usize, n: usize, k: usize, a: &[Complex64], b: &[Complex64], c: &mut [Complex64]) {
    debug_assert_eq!(a.len(), m * k);
    debug_assert_eq!(b.len(), k * n);
    debug_assert_eq!(c.len(), m * n);
    if m == 0 || n == 0 || k == 0 {
        return;
    }
    let (mm, nn, kk) = (m as Int, n as Int, k as Int);
    let one = Complex64::new(1.0, 0.0);
    unsafe {
        zgemm_(
            b"N".as_ptr(),
            b"N".as_ptr(),
            &mm,
            &nn,
            &kk,
            &one,
            a.as_ptr(),
            &mm,
            b.as_ptr(),
            &kk,
            &one,
            c.as_mut_ptr(),
            &mm,
        )
    };
}

fn check_info(info: Int, what: &str) -> Result<()> {
    if info == 0 {
        Ok(())
    } else if info > 0 {
        Err(Error::SingularSystem(format!("{what}: zero pivot at position {info}")))
    } else {
        Err(Error::SingularSystem(format!("{what}: illegal argument {}", -info)))
    }
}

/// LU factorization of a dense n×n complex matrix (column-major storage).
pub struct DenseLu {
    n: usize,
    a: Vec<Complex64>,
    ipiv: Vec<Int>,
}

impl DenseLu {
    /// Factor `a` (column-major, length n·n); consumes the matrix storage.
    pub fn factor(mut a: Vec<Complex64>, n: usize) -> Result<Self> {
        if a.len() != n * n {
            return Err(Error::InvalidInput(format!("dense LU: storage {} != n² = {}", a.len(), n * n)));
        }
        let nn = n as Int;
        let mut ipiv = vec![0 as Int; n.max(1)];
        let mut info: Int = 0;
        unsafe { zgetrf_(&nn, &nn, a.as_mut_ptr(), &nn, ipiv.as_mut_ptr(), &mut info) };
        check_info(info, "dense LU factorization")?;
        Ok(DenseLu { n, a, ipiv })
    }

    /// Solve A·X = B in place; `b` holds `nrhs` column-major right-hand sides.
    pub fn solve(&self, b: &mut [Complex64], nrhs: usize) -> Result<()> {
        if b.len() != self.n * nrhs {
            return Err(Error::InvalidInput(format!(
                "dense solve: rhs storage {} != n·nrhs = {}",
                b.len(),
                self.n * nrhs
            )));
        }
        let (nn, nr) = (self.n as Int, nrhs as Int);
        let mut info: Int = 0;
        unsafe {
            zgetrs_(
                b"N".as_ptr(),
                &nn,
                &nr,
                self.a.as_ptr(),
                &nn,
                self.ipiv.as_ptr(),
                b.as_mut_ptr(),
                &nn,
                &mut info,
            )
        };
        check_info(info, "dense LU solve")
    }
}

/// Complex band matrix in LAPACK GB storage with `kl` sub- and `ku`
/// superdiagonals, ready for `zgbtrf` (the leading dimension reserves the
/// extra `kl` rows the factorization needs for fill-in).
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    ab: Vec<Complex64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let ldab = 2 * kl + ku + 1;
        BandMatrix { n, kl, ku, ldab, ab: vec![Complex64::new(0.0, 0.0); ldab * n] }
    }

    /// Add `v` to entry (i, j); entries outside the band are rejected.
    pub fn add(&mut self, i: usize, j: usize, v: Complex64) -> Result<()> {
        if i >= self.n || j >= self.n || i + self.ku < j || j + self.kl < i {
            return Err(Error::InvalidInput(format!(
                "band entry ({i}, {j}) outside band kl={} ku={} n={}",
                self.kl, self.ku, self.n
            )));
        }
        // Row kl+ku+i−j of column j in GB storage (0-based).
        let row = self.kl + self.ku + i - j;
        self.ab[j * self.ldab + row] += v;
        Ok(())
    }

    pub fn factor(mut self) -> Result<BandLu> {
        let (nn, kl, ku, ldab) = (self.n as Int, self.kl as Int, self.ku as Int, self.ldab as Int);
        let mut ipiv = vec![0 as Int; self.n.max(1)];
        let mut info: Int = 0;
        unsafe { zgbtrf_(&nn, &nn, &kl, &ku, self.ab.as_mut_ptr(), &ldab, ipiv.as_mut_ptr(), &mut info) };
        check_info(info, "banded LU factorization")?;
        Ok(BandLu { n: self.n, kl: self.kl, ku: self.ku, ldab: self.ldab, ab: self.ab, ipiv })
    }
}

pub struct BandLu {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    ab: Vec<Complex64>,
    ipiv: Vec<Int>,
}

impl BandLu {
    /// Solve A·X = B in place; `b` holds `nrhs` column-major right-hand sides.
    pub fn solve(&self, b: &mut [Complex64], nrhs: usize) -> Result<()> {
        if b.len() != self.n * nrhs {
            return Err(Error::InvalidInput(format!(
                "band solve: rhs storage {} != n·nrhs = {}",
                b.len(),
                self.n * nrhs
            )));
        }
        let (nn, kl, ku, ldab, nr) = (self.n as Int, self.kl as Int, self.ku as Int, self.ldab as Int, nrhs as Int);
        let mut info: Int = 0;
        unsafe {
            zgbtrs_(
                b"N".as_ptr(),
                &nn,
                &kl,
                &ku,
                &nr,
                self.ab.as_ptr(),
                &ldab,
                self.ipiv.as_ptr(),
                b.as_mut_ptr(),
                &nn,
                &mut info,
            )
        };
        check_info(info, "banded LU solve")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn dense_solve_recovers_known_solution() {
        // A·x with A random-ish 4×4, x known; solve must recover x.
        let n = 4;
        let mut a = vec![c(0.0, 0.0); n * n];
        for j in 0..n {
            for i in 0..n {
                let v = c((1 + i * 3 + j) as f64 * 0.17, ((i + 2 * j) % 5) as f64 * 0.29);
                a[j * n + i] = if i == j { v + c(4.0, 0.0) } else { v };
            }
        }
        let x: Vec<Complex64> = (0..n).map(|i| c(i as f64 - 1.5, 0.5 * i as f64)).collect();
        let mut b = vec![c(0.0, 0.0); n];
        for i in 0..n {
            for j in 0..n {
                b[i] += a[j * n + i] * x[j];
            }
        }
        let lu = DenseLu::factor(a, n).unwrap();
        lu.solve(&mut b, 1).unwrap();
        for i in 0..n {
            assert!((b[i] - x[i]).norm() < 1e-12);
        }
    }

    #[test]
    fn banded_solve_matches_dense() {
        let n = 12;
        let (kl, ku) = (2, 3);
        let mut band = BandMatrix::zeros(n, kl, ku);
        let mut full = vec![c(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                if i + ku >= j && j + kl >= i {
                    let v = c(((i * 7 + j * 3) % 11) as f64 * 0.2, ((i + j) % 4) as f64 * 0.1)
                        + if i == j { c(5.0, 1.0) } else { c(0.0, 0.0) };
                    band.add(i, j, v).unwrap();
                    full[j * n + i] = v;
                }
            }
        }
        assert!(band.add(0, ku + 1, c(1.0, 0.0)).is_err());
        let x: Vec<Complex64> = (0..n).map(|i| c((i % 3) as f64, -(i as f64) * 0.3)).collect();
        let mut b = vec![c(0.0, 0.0); n];
        for i in 0..n {
            for j in 0..n {
                b[i] += full[j * n + i] * x[j];
            }
        }
        let lu = band.factor().unwrap();
        lu.solve(&mut b, 1).unwrap();
        for i in 0..n {
            assert!((b[i] - x[i]).norm() < 1e-11, "entry {i}: {:?} vs {:?}", b[i], x[i]);
        }
    }

    #[test]
    fn singular_matrix_reports_error() {
        let n = 3;
        let a = vec![c(0.0, 0.0); n * n]; // all-zero matrix
        assert!(matches!(DenseLu::factor(a, n), Err(Error::SingularSystem(_))));
    }
}
