//! Minimal dense complex matrix helpers: Hermitian Jacobi eigensolver and
//! modified Gram-Schmidt QR. Dimensions here are small (Toeplitz moment
//! matrices, the N <= 64 unitary oracle), so simplicity beats libraries.

use num_complex::Complex64;

/// Row-major square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct CMatrix {
    pub n: usize,
    pub a: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        CMatrix { n, a: vec![Complex64::default(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.a[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.a[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.a[i * self.n + j] = v;
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.get(i, k);
                if aik.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.a[i * n + j] += aik * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations. Returns eigenvalues (ascending) and the matching eigenvector
/// columns V, so A = V diag(lambda) V^H.
pub(crate) fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.n;
    let mut a = m.clone();
    let mut v = CMatrix::identity(n);
    let scale: f64 = a.a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt().max(1e-300);
    for _sweep in 0..60 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a.get(i, j).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-14 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a.get(p, q);
                let b = apq.norm();
                if b <= 1e-300 {
                    continue;
                }
                let phase = apq / b; // e^{i phi}
                let app = a.get(p, p).re;
                let aqq = a.get(q, q).re;
                let tau = (aqq - app) / (2.0 * b);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // U = diag(1, e^{-i phi}) * [[c, s], [-s, c]] acting on
                // coordinates (p, q); A <- U^H A U, V <- V U.
                let u11 = Complex64::new(c, 0.0);
                let u12 = Complex64::new(s, 0.0);
                let u21 = -s * phase.conj();
                let u22 = c * phase.conj();
                for i in 0..n {
                    let aip = a.get(i, p);
                    let aiq = a.get(i, q);
                    a.set(i, p, aip * u11 + aiq * u21);
                    a.set(i, q, aip * u12 + aiq * u22);
                }
                for j in 0..n {
                    let apj = a.get(p, j);
                    let aqj = a.get(q, j);
                    a.set(p, j, u11.conj() * apj + u21.conj() * aqj);
                    a.set(q, j, u12.conj() * apj + u22.conj() * aqj);
                }
                // Pin the rotated pair to exact Hermitian form.
                let app_new = a.get(p, p);
                let aqq_new = a.get(q, q);
                a.set(p, p, Complex64::new(app_new.re, 0.0));
                a.set(q, q, Complex64::new(aqq_new.re, 0.0));
                a.set(q, p, a.get(p, q).conj());
                for i in 0..n {
                    let vip = v.get(i, p);
                    let viq = v.get(i, q);
                    v.set(i, p, vip * u11 + viq * u21);
                    v.set(i, q, vip * u12 + viq * u22);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let evals: Vec<f64> = (0..n).map(|i| a.get(i, i).re).collect();
    order.sort_by(|&i, &j| evals[i].total_cmp(&evals[j]));
    let sorted_evals: Vec<f64> = order.iter().map(|&i| evals[i]).collect();
    let mut sorted_v = CMatrix::zeros(n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for i in 0..n {
            sorted_v.set(i, new_col, v.get(i, old_col));
        }
    }
    (sorted_evals, sorted_v)
}

/// Orthonormalize the columns of `a` in place by modified Gram-Schmidt with
/// a second pass, returning the diagonal of R. The diagonal is real and
/// positive by construction.
pub(crate) fn mgs_orthonormalize(a: &mut CMatrix) -> Vec<Complex64> {
    let n = a.n;
    let mut r_diag = vec![Complex64::default(); n];
    for j in 0..n {
        // Two orthogonalization passes keep orthonormality near machine
        // precision for Gaussian input.
        for _pass in 0..2 {
            for k in 0..j {
                let mut proj = Complex64::default();
                for i in 0..n {
                    proj += a.get(i, k).conj() * a.get(i, j);
                }
                for i in 0..n {
                    let v = a.get(i, j) - proj * a.get(i, k);
                    a.set(i, j, v);
                }
            }
        }
        let norm: f64 = (0..n).map(|i| a.get(i, j).norm_sqr()).sum::<f64>().sqrt();
        r_diag[j] = Complex64::new(norm, 0.0);
        for i in 0..n {
            let v = a.get(i, j) / norm;
            a.set(i, j, v);
        }
    }
    r_diag
}
