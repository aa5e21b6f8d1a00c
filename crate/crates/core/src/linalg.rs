//! Fixed-size complex linear algebra for the dense-matrix oracles.
//!
//! Everything here works on `nalgebra` static matrices. The Hermitian
//! eigensolver is a cyclic complex Jacobi iteration: each rotation removes the
//! phase of the pivot entry and then applies a real plane rotation. At 4×4 it
//! converges in a handful of sweeps and gives the same answer on every
//! platform.

use nalgebra::{Matrix2, Matrix3, Matrix4, SMatrix, SVector, Vector4};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix<const N: usize> = SMatrix<Complex64, N, N>;

/// Maximum deviation `|m_ij - conj(m_ji)|` accepted as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Trace deviation accepted for a density matrix.
pub const TRACE_TOL: f64 = 1e-12;
/// Eigenvalues at or above this are accepted as PSD round-off.
pub const PSD_TOL: f64 = 1e-10;
/// Below this an eigenvalue is a genuine PSD violation.
pub const NOT_PSD_TOL: f64 = 1e-8;

const OFF_DIAG_THRESHOLD: f64 = 1e-14;
const MAX_SWEEPS: usize = 100;

/// Eigenvalues at or below this magnitude are indistinguishable from zero at
/// double precision and are zeroed before taking square roots. A noise-level
/// eigenvalue of 1e-17 would otherwise contribute 3e-9 to `Tr sqrt(M)`.
pub const EIGEN_ZERO_CUTOFF: f64 = 1e-14;

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Eigendecomposition of a Hermitian matrix: `m = V diag(values) V†`.
#[derive(Debug, Clone)]
pub struct Eigh<const N: usize> {
    /// Eigenvalues, descending. Ties keep their original diagonal order.
    pub values: SVector<f64, N>,
    /// Unitary matrix whose columns are the matching eigenvectors.
    pub vectors: CMatrix<N>,
}

impl<const N: usize> Eigh<N> {
    pub fn reconstruct(&self) -> CMatrix<N> {
        let diag = CMatrix::<N>::from_diagonal(&self.values.map(|v| c(v, 0.0)));
        self.vectors * diag * self.vectors.adjoint()
    }
}

pub fn check_hermitian<const N: usize>(m: &CMatrix<N>) -> Result<()> {
    for i in 0..N {
        for j in 0..N {
            let z = m[(i, j)];
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
    }
    for i in 0..N {
        for j in i..N {
            let deviation = (m[(i, j)] - m[(j, i)].conj()).norm();
            if deviation > HERMITIAN_TOL {
                return Err(Error::NotHermitian { row: i + 1, col: j + 1, deviation });
            }
        }
    }
    Ok(())
}

fn off_diagonal_norm<const N: usize>(a: &CMatrix<N>) -> f64 {
    let mut sum = 0.0;
    for i in 0..N {
        for j in 0..N {
            if i != j {
                sum += a[(i, j)].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// Cyclic complex Jacobi eigendecomposition.
pub fn hermitian_eigh<const N: usize>(m: &CMatrix<N>) -> Result<Eigh<N>> {
    check_hermitian(m)?;
    // Symmetrize so round-off in the input cannot leak into the rotations.
    let mut a = (m + m.adjoint()).map(|z| z * 0.5);
    let mut v = CMatrix::<N>::identity();

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) < OFF_DIAG_THRESHOLD {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                let phase_conj = (apq / mag).conj();
                let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * mag);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sign / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                // U acts on the (p, q) plane.
                let u_pp = c(cs, 0.0);
                let u_pq = c(sn, 0.0);
                let u_qp = phase_conj * (-sn);
                let u_qq = phase_conj * cs;

                for k in 0..N {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * u_pp + akq * u_qp;
                    a[(k, q)] = akp * u_pq + akq * u_qq;
                }
                for k in 0..N {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
                    a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
                }
                for k in 0..N {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * u_pp + vkq * u_qp;
                    v[(k, q)] = vkp * u_pq + vkq * u_qq;
                }
                a[(p, q)] = Complex64::ZERO;
                a[(q, p)] = Complex64::ZERO;
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;
            }
        }
    }

    let mut order: Vec<usize> = (0..N).collect();
    // Stable sort: equal eigenvalues keep their diagonal order.
    order.sort_by(|&i, &j| a[(j, j)].re.partial_cmp(&a[(i, i)].re).unwrap_or(std::cmp::Ordering::Equal));
    let values = SVector::<f64, N>::from_fn(|i, _| a[(order[i], order[i])].re);
    let vectors = CMatrix::<N>::from_fn(|r, col| v[(r, order[col])]);
    Ok(Eigh { values, vectors })
}

/// Eigenvalues of a Hermitian matrix in descending order.
pub fn hermitian_eigenvalues<const N: usize>(m: &CMatrix<N>) -> Result<SVector<f64, N>> {
    Ok(hermitian_eigh(m)?.values)
}

/// Clamps round-off negatives and noise-level positives to zero.
///
/// Fails when an eigenvalue is negative beyond `NOT_PSD_TOL`.
pub fn clamp_psd_eigenvalue(lambda: f64) -> Result<f64> {
    if lambda < -NOT_PSD_TOL {
        return Err(Error::NotPsd { eigenvalue: lambda });
    }
    Ok(if lambda <= EIGEN_ZERO_CUTOFF { 0.0 } else { lambda })
}

/// Principal square root of a Hermitian PSD matrix.
pub fn psd_sqrt<const N: usize>(m: &CMatrix<N>) -> Result<CMatrix<N>> {
    let eig = hermitian_eigh(m)?;
    let mut roots = SVector::<f64, N>::zeros();
    for i in 0..N {
        roots[i] = clamp_psd_eigenvalue(eig.values[i])?.sqrt();
    }
    let diag = CMatrix::<N>::from_diagonal(&roots.map(|v| c(v, 0.0)));
    let s = eig.vectors * diag * eig.vectors.adjoint();
    Ok((s + s.adjoint()).map(|z| z * 0.5))
}

/// `Tr sqrt(M)` for Hermitian PSD `M`, i.e. the sum of the square roots of its eigenvalues.
pub fn trace_sqrt<const N: usize>(m: &CMatrix<N>) -> Result<f64> {
    let values = hermitian_eigenvalues(m)?;
    let mut sum = 0.0;
    for lambda in values.iter() {
        sum += clamp_psd_eigenvalue(*lambda)?.sqrt();
    }
    Ok(sum)
}

/// Singular values of a real 3×3 matrix by one-sided (Hestenes) Jacobi,
/// descending.
pub fn singular_values(t: &Matrix3<f64>) -> [f64; 3] {
    let mut a = *t;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..3 {
            for j in (i + 1)..3 {
                let alpha = a.column(i).norm_squared();
                let beta = a.column(j).norm_squared();
                let gamma = a.column(i).dot(&a.column(j));
                if gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let sign = if zeta >= 0.0 { 1.0 } else { -1.0 };
                let tn = sign / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + tn * tn).sqrt();
                let sn = cs * tn;
                for k in 0..3 {
                    let ai = a[(k, i)];
                    let aj = a[(k, j)];
                    a[(k, i)] = cs * ai - sn * aj;
                    a[(k, j)] = sn * ai + cs * aj;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv = [a.column(0).norm(), a.column(1).norm(), a.column(2).norm()];
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    sv
}

/// Pauli matrix for axis 0 (identity), 1 (x), 2 (y) or 3 (z).
pub fn pauli(axis: usize) -> Matrix2<Complex64> {
    let (o, z, i) = (c(1.0, 0.0), Complex64::ZERO, c(0.0, 1.0));
    match axis {
        0 => Matrix2::new(o, z, z, o),
        1 => Matrix2::new(z, o, o, z),
        2 => Matrix2::new(z, -i, i, z),
        3 => Matrix2::new(o, z, z, -o),
        _ => panic!("pauli axis {axis} out of range"),
    }
}

/// `first ⊗ second` with `first` acting on the first qubit.
pub fn kron2(first: &Matrix2<Complex64>, second: &Matrix2<Complex64>) -> Matrix4<Complex64> {
    first.kronecker(second)
}

pub fn projector(v: &Vector4<Complex64>) -> Matrix4<Complex64> {
    v * v.adjoint()
}

pub fn max_abs_diff<const N: usize>(a: &CMatrix<N>, b: &CMatrix<N>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// A validated two-qubit density matrix in the basis |00>, |01>, |10>, |11>.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix4(Matrix4<Complex64>);

impl DensityMatrix4 {
    /// Checks Hermiticity, unit trace and positive semidefiniteness.
    pub fn new(m: Matrix4<Complex64>) -> Result<Self> {
        check_hermitian(&m)?;
        let trace = m.trace();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(Error::NotUnitTrace { trace: trace.re });
        }
        let lowest = hermitian_eigenvalues(&m)?[3];
        if lowest < -PSD_TOL {
            return Err(Error::NotPsd { eigenvalue: lowest });
        }
        Ok(Self(m))
    }

    /// Wraps a matrix the caller already knows to be a valid state.
    pub(crate) fn from_trusted(m: Matrix4<Complex64>) -> Self {
        Self(m)
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.0
    }

    /// Zero-based entry access.
    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    pub fn maximally_mixed() -> Self {
        Self(Matrix4::<Complex64>::identity().map(|z| z * 0.25))
    }

    pub fn pure(v: &Vector4<Complex64>) -> Result<Self> {
        let norm = v.norm();
        if norm == 0.0 {
            return Err(Error::Domain("zero state vector".into()));
        }
        Ok(Self(projector(&(v / c(norm, 0.0)))))
    }

    /// Convex combination `sum w_i rho_i`; weights must be nonnegative and sum to one.
    pub fn mixture(parts: &[(f64, &DensityMatrix4)]) -> Result<Self> {
        let mut m = Matrix4::zeros();
        for (w, rho) in parts {
            if *w < 0.0 {
                return Err(Error::Domain(format!("negative mixing weight {w}")));
            }
            m += rho.0.map(|z| z * *w);
        }
        Self::new(m)
    }

    pub fn purity(&self) -> f64 {
        (self.0 * self.0).trace().re
    }
}

/// Correlation matrix `t(m, n) = Tr[rho (sigma_n ⊗ sigma_m)]`, axes 1..3.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationMatrix(pub Matrix3<f64>);

impl CorrelationMatrix {
    /// Entry with 1-based axes, matching `pauli_expectation`.
    pub fn get(&self, m: usize, n: usize) -> f64 {
        self.0[(m - 1, n - 1)]
    }

    pub fn singular_values(&self) -> [f64; 3] {
        singular_values(&self.0)
    }

    /// `Tr sqrt(T† T)`.
    pub fn trace_norm(&self) -> f64 {
        self.singular_values().iter().sum()
    }
}

/// `Tr[rho (sigma_n ⊗ sigma_m)]` with axes in 1..=3.
pub fn pauli_expectation(rho: &DensityMatrix4, m: usize, n: usize) -> Result<f64> {
    for (name, axis) in [("m", m), ("n", n)] {
        if !(1..=3).contains(&axis) {
            return Err(Error::OutOfRange { name, value: axis as f64, lo: 1.0, hi: 3.0 });
        }
    }
    let op = kron2(&pauli(n), &pauli(m));
    let value = (rho.matrix() * op).trace();
    if value.im.abs() >= PSD_TOL {
        return Err(Error::Consistency { what: format!("imaginary Pauli expectation ({m},{n})"), discrepancy: value.im.abs() });
    }
    Ok(value.re)
}

pub fn correlation_matrix(rho: &DensityMatrix4) -> CorrelationMatrix {
    let mut t = Matrix3::zeros();
    for m in 1..=3 {
        for n in 1..=3 {
            let op = kron2(&pauli(n), &pauli(m));
            t[(m - 1, n - 1)] = (rho.matrix() * op).trace().re;
        }
    }
    CorrelationMatrix(t)
}
