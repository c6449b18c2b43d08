//! Fixed-size complex linear algebra for one and two qubits.
//!
//! Matrices are plain row-major arrays. The only decomposition needed is the
//! eigen-decomposition of small Hermitian matrices, done with a cyclic
//! complex Jacobi sweep.

use num_complex::Complex64;

pub type C64 = Complex64;
pub type Mat2 = [[C64; 2]; 2];
pub type Mat4 = [[C64; 4]; 4];

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Pauli matrices, index 0 is the identity.
pub const PAULI: [Mat2; 4] = [
    [[ONE, ZERO], [ZERO, ONE]],
    [[ZERO, ONE], [ONE, ZERO]],
    [[ZERO, C64::new(0.0, -1.0)], [I, ZERO]],
    [[ONE, ZERO], [ZERO, C64::new(-1.0, 0.0)]],
];

pub fn zeros<const N: usize>() -> [[C64; N]; N] {
    [[ZERO; N]; N]
}

pub fn identity<const N: usize>() -> [[C64; N]; N] {
    let mut m = zeros::<N>();
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = ONE;
    }
    m
}

pub fn matmul<const N: usize>(a: &[[C64; N]; N], b: &[[C64; N]; N]) -> [[C64; N]; N] {
    let mut out = zeros::<N>();
    for i in 0..N {
        for k in 0..N {
            let aik = a[i][k];
            if aik == ZERO {
                continue;
            }
            for j in 0..N {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

pub fn adjoint<const N: usize>(a: &[[C64; N]; N]) -> [[C64; N]; N] {
    let mut out = zeros::<N>();
    for i in 0..N {
        for j in 0..N {
            out[j][i] = a[i][j].conj();
        }
    }
    out
}

pub fn conj<const N: usize>(a: &[[C64; N]; N]) -> [[C64; N]; N] {
    a.map(|row| row.map(|z| z.conj()))
}

pub fn sub<const N: usize>(a: &[[C64; N]; N], b: &[[C64; N]; N]) -> [[C64; N]; N] {
    let mut out = *a;
    for i in 0..N {
        for j in 0..N {
            out[i][j] -= b[i][j];
        }
    }
    out
}

pub fn scale<const N: usize>(a: &[[C64; N]; N], s: C64) -> [[C64; N]; N] {
    a.map(|row| row.map(|z| z * s))
}

pub fn trace<const N: usize>(a: &[[C64; N]; N]) -> C64 {
    (0..N).map(|i| a[i][i]).sum()
}

/// `Tr(a b)` without forming the product.
pub fn trace_of_product<const N: usize>(a: &[[C64; N]; N], b: &[[C64; N]; N]) -> C64 {
    let mut acc = ZERO;
    for i in 0..N {
        for k in 0..N {
            acc += a[i][k] * b[k][i];
        }
    }
    acc
}

/// Largest entry of `|a - a^dagger|`.
pub fn hermiticity_defect<const N: usize>(a: &[[C64; N]; N]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..N {
        for j in 0..N {
            worst = worst.max((a[i][j] - a[j][i].conj()).norm());
        }
    }
    worst
}

/// Largest entry of `|a - b|`.
pub fn max_abs_diff<const N: usize>(a: &[[C64; N]; N], b: &[[C64; N]; N]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..N {
        for j in 0..N {
            worst = worst.max((a[i][j] - b[i][j]).norm());
        }
    }
    worst
}

/// Kronecker product; `a` acts on the first (most significant) qubit.
pub fn kron(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut out = zeros::<4>();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[2 * i + k][2 * j + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

/// `u m u^dagger`.
pub fn conjugate_by<const N: usize>(u: &[[C64; N]; N], m: &[[C64; N]; N]) -> [[C64; N]; N] {
    matmul(&matmul(u, m), &adjoint(u))
}

/// Operator norm bound used for unitarity checks: max entry of `|u^dagger u - I|`.
pub fn unitarity_defect<const N: usize>(u: &[[C64; N]; N]) -> f64 {
    max_abs_diff(&matmul(&adjoint(u), u), &identity::<N>())
}

/// Eigen-decomposition of a Hermitian matrix.
///
/// Eigenvalues are sorted ascending; column `k` of `vectors` is the
/// eigenvector for `values[k]`.
#[derive(Debug, Clone, Copy)]
pub struct HermitianEigen<const N: usize> {
    pub values: [f64; N],
    pub vectors: [[C64; N]; N],
}

impl<const N: usize> HermitianEigen<N> {
    pub fn vector(&self, k: usize) -> [C64; N] {
        std::array::from_fn(|i| self.vectors[i][k])
    }

    /// Rebuild `V f(D) V^dagger`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> [[C64; N]; N] {
        let mut out = zeros::<N>();
        for k in 0..N {
            let w = f(self.values[k]);
            if w == 0.0 {
                continue;
            }
            for i in 0..N {
                for j in 0..N {
                    out[i][j] += self.vectors[i][k] * self.vectors[j][k].conj() * w;
                }
            }
        }
        out
    }
}

const JACOBI_MAX_SWEEPS: usize = 64;

/// Cyclic Jacobi eigen-solver for Hermitian input. Only the upper triangle
/// and real part of the diagonal are trusted.
pub fn hermitian_eigen<const N: usize>(m: &[[C64; N]; N]) -> HermitianEigen<N> {
    let mut a = *m;
    // Symmetrize to remove rounding asymmetry.
    for i in 0..N {
        a[i][i] = C64::new(a[i][i].re, 0.0);
        for j in (i + 1)..N {
            a[j][i] = a[i][j].conj();
        }
    }
    let mut v = identity::<N>();
    let scale_ref = frobenius(&a).max(f64::MIN_POSITIVE);

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..N)
            .flat_map(|i| ((i + 1)..N).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j].norm_sqr())
            .sum();
        if off.sqrt() <= 1e-15 * scale_ref {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                let apq = a[p][q];
                let mag = apq.norm();
                if mag <= 1e-300 {
                    continue;
                }
                let phase = apq / mag;
                let app = a[p][p].re;
                let aqq = a[q][q].re;
                let tau = (aqq - app) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // Rotation acting on columns p, q: diag(1, phase*) followed by a real Givens step.
                let vpp = C64::new(c, 0.0);
                let vpq = C64::new(s, 0.0);
                let vqp = -phase.conj() * s;
                let vqq = phase.conj() * c;
                for row in a.iter_mut() {
                    let xp = row[p];
                    let xq = row[q];
                    row[p] = xp * vpp + xq * vqp;
                    row[q] = xp * vpq + xq * vqq;
                }
                for k in 0..N {
                    let xp = a[p][k];
                    let xq = a[q][k];
                    a[p][k] = vpp.conj() * xp + vqp.conj() * xq;
                    a[q][k] = vpq.conj() * xp + vqq.conj() * xq;
                }
                a[p][q] = ZERO;
                a[q][p] = ZERO;
                a[p][p] = C64::new(a[p][p].re, 0.0);
                a[q][q] = C64::new(a[q][q].re, 0.0);
                for row in v.iter_mut() {
                    let xp = row[p];
                    let xq = row[q];
                    row[p] = xp * vpp + xq * vqp;
                    row[q] = xp * vpq + xq * vqq;
                }
            }
        }
    }

    let mut order: [usize; N] = std::array::from_fn(|i| i);
    order.sort_by(|&x, &y| a[x][x].re.total_cmp(&a[y][y].re));
    let values = order.map(|k| a[k][k].re);
    let mut vectors = zeros::<N>();
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..N {
            vectors[i][dst] = v[i][src];
        }
    }
    HermitianEigen { values, vectors }
}

pub fn frobenius<const N: usize>(a: &[[C64; N]; N]) -> f64 {
    a.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Eigenvalues (ascending) of a real symmetric matrix.
pub fn symmetric_eigenvalues<const N: usize>(m: &[[f64; N]; N]) -> [f64; N] {
    let c = m.map(|row| row.map(|x| C64::new(x, 0.0)));
    hermitian_eigen(&c).values
}
