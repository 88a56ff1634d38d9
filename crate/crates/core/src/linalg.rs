//! Small dense linear-algebra helpers: Kronecker products, Hermitian
//! utilities, and a cyclic-Jacobi eigensolver for real symmetric matrices.
//!
//! Every matrix in this crate is tiny (3x3 correlation matrices, 4x4 qubit
//! states, at most 20x20 qubit-cavity states), so a dependency-free Jacobi
//! sweep is both simpler and more predictable than a general LAPACK binding.
//! Complex Hermitian problems are reduced to real symmetric ones through the
//! standard embedding H -> [[Re H, -Im H], [Im H, Re H]], whose spectrum is
//! the spectrum of H with every eigenvalue doubled.

use ndarray::Array2;
use num_complex::Complex64;

pub type C64 = Complex64;

/// Kronecker product of two complex matrices.
pub fn kron(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[[i, j]];
            for k in 0..br {
                for l in 0..bc {
                    out[[i * br + k, j * bc + l]] = aij * b[[k, l]];
                }
            }
        }
    }
    out
}

/// Conjugate transpose.
pub fn dagger(a: &Array2<C64>) -> Array2<C64> {
    let mut out = a.t().to_owned();
    out.mapv_inplace(|z| z.conj());
    out
}

/// Hermitian part (a + a^dagger)/2.
pub fn hermitize(a: &Array2<C64>) -> Array2<C64> {
    let mut out = dagger(a);
    out += a;
    out.mapv_inplace(|z| 0.5 * z);
    out
}

/// Matrix trace.
pub fn trace(a: &Array2<C64>) -> C64 {
    a.diag().sum()
}

/// Largest entry-wise magnitude of a - a^dagger (Hermiticity defect).
pub fn hermiticity_defect(a: &Array2<C64>) -> f64 {
    let ad = dagger(a);
    let mut worst = 0.0f64;
    for (x, y) in a.iter().zip(ad.iter()) {
        worst = worst.max((x - y).norm());
    }
    worst
}

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations,
/// iterated until the off-diagonal Frobenius norm falls below 1e-14 times
/// the matrix scale. Returned unsorted.
pub fn symmetric_eigenvalues(a: &Array2<f64>) -> Vec<f64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "symmetric_eigenvalues needs a square matrix");
    let mut m = a.clone();
    let scale = m.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    let tol = 1e-14 * scale;
    for _sweep in 0..60 {
        let off: f64 = {
            let mut s = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    s += 2.0 * m[[p, q]] * m[[p, q]];
                }
            }
            s.sqrt()
        };
        if off < tol {
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let apq = m[[p, q]];
                if apq == 0.0 {
                    continue;
                }
                // Classic Jacobi rotation annihilating (p, q).
                let theta = (m[[q, q]] - m[[p, p]]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[[k, p]];
                    let mkq = m[[k, q]];
                    m[[k, p]] = c * mkp - s * mkq;
                    m[[k, q]] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[[p, k]];
                    let mqk = m[[q, k]];
                    m[[p, k]] = c * mpk - s * mqk;
                    m[[q, k]] = s * mpk + c * mqk;
                }
            }
        }
    }
    m.diag().to_vec()
}

/// Real symmetric embedding [[Re, -Im], [Im, Re]] of a Hermitian matrix.
/// Its 2n eigenvalues are those of the input, each doubled.
pub fn hermitian_embedding(h: &Array2<C64>) -> Array2<f64> {
    let n = h.nrows();
    let mut out = Array2::zeros((2 * n, 2 * n));
    for i in 0..n {
        for j in 0..n {
            let z = h[[i, j]];
            out[[i, j]] = z.re;
            out[[i, j + n]] = -z.im;
            out[[i + n, j]] = z.im;
            out[[i + n, j + n]] = z.re;
        }
    }
    out
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(h: &Array2<C64>) -> f64 {
    symmetric_eigenvalues(&hermitian_embedding(h))
        .into_iter()
        .fold(f64::INFINITY, f64::min)
}

/// Trace distance (1/2) sum |eigenvalues| of the Hermitian difference a - b.
/// Uses the doubled-spectrum embedding, hence the division by four.
pub fn trace_distance(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
    let diff = a - b;
    let embedded = hermitian_embedding(&hermitize(&diff));
    symmetric_eigenvalues(&embedded)
        .into_iter()
        .map(f64::abs)
        .sum::<f64>()
        / 4.0
}

/// The three Pauli matrices in the (|1>, |0>) single-qubit basis used by the
/// {|11>,|10>,|01>,|00>} four-dimensional ordering (index 0 = excited).
pub fn pauli() -> [Array2<C64>; 3] {
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    let sx = Array2::from_shape_vec((2, 2), vec![z, one, one, z]).unwrap();
    let sy = Array2::from_shape_vec((2, 2), vec![z, -i, i, z]).unwrap();
    let sz = Array2::from_shape_vec((2, 2), vec![one, z, z, -one]).unwrap();
    [sx, sy, sz]
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn kron_of_identities_is_identity() {
        let id2: Array2<C64> = Array2::eye(2);
        let got = kron(&id2, &id2);
        assert_eq!(got, Array2::eye(4));
    }

    #[test]
    fn kron_matches_hand_computed_2x2() {
        let a = array![[c(1.0, 0.0), c(2.0, 0.0)], [c(0.0, 0.0), c(1.0, 1.0)]];
        let b = array![[c(0.0, 1.0), c(0.0, 0.0)], [c(3.0, 0.0), c(1.0, 0.0)]];
        let k = kron(&a, &b);
        assert_eq!(k[[0, 0]], c(0.0, 1.0));
        assert_eq!(k[[0, 2]], c(0.0, 2.0));
        assert_eq!(k[[1, 0]], c(3.0, 0.0));
        assert_eq!(k[[3, 2]], c(3.0, 3.0));
        assert_eq!(k[[2, 2]], c(-1.0, 1.0)); // (1+i) * i
    }

    #[test]
    fn dagger_conjugates_and_transposes() {
        let a = array![[c(1.0, 2.0), c(3.0, -4.0)], [c(0.0, 1.0), c(5.0, 0.0)]];
        let d = dagger(&a);
        assert_eq!(d[[0, 0]], c(1.0, -2.0));
        assert_eq!(d[[0, 1]], c(0.0, -1.0));
        assert_eq!(d[[1, 0]], c(3.0, 4.0));
    }

    #[test]
    fn jacobi_diagonal_matrix_returns_diagonal() {
        let m = array![[3.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 7.0]];
        let mut ev = symmetric_eigenvalues(&m);
        ev.sort_by(f64::total_cmp);
        assert_eq!(ev, vec![-1.0, 3.0, 7.0]);
    }

    #[test]
    fn jacobi_known_2x2() {
        // [[2, 1], [1, 2]] has eigenvalues 1 and 3.
        let m = array![[2.0, 1.0], [1.0, 2.0]];
        let mut ev = symmetric_eigenvalues(&m);
        ev.sort_by(f64::total_cmp);
        assert!((ev[0] - 1.0).abs() < 1e-13);
        assert!((ev[1] - 3.0).abs() < 1e-13);
    }

    #[test]
    fn jacobi_known_3x3() {
        // Symmetric matrix with eigenvalues 0, 1, 4 (constructed from a
        // spectral decomposition with orthonormal columns).
        // Take Q = rotation by 30 degrees in the (0,1) plane, diag(0,1,4).
        let (s, co) = (0.5f64, 3f64.sqrt() / 2.0);
        let q = array![[co, -s, 0.0], [s, co, 0.0], [0.0, 0.0, 1.0]];
        let d = array![[0.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 4.0]];
        let m = q.dot(&d).dot(&q.t());
        let mut ev = symmetric_eigenvalues(&m);
        ev.sort_by(f64::total_cmp);
        assert!((ev[0] - 0.0).abs() < 1e-13);
        assert!((ev[1] - 1.0).abs() < 1e-13);
        assert!((ev[2] - 4.0).abs() < 1e-13);
    }

    #[test]
    fn hermitian_embedding_doubles_spectrum() {
        // H = [[1, i], [-i, 1]] has eigenvalues 0 and 2.
        let h = array![[c(1.0, 0.0), c(0.0, 1.0)], [c(0.0, -1.0), c(1.0, 0.0)]];
        let mut ev = symmetric_eigenvalues(&hermitian_embedding(&h));
        ev.sort_by(f64::total_cmp);
        assert!((ev[0]).abs() < 1e-13);
        assert!((ev[1]).abs() < 1e-13);
        assert!((ev[2] - 2.0).abs() < 1e-13);
        assert!((ev[3] - 2.0).abs() < 1e-13);
        assert!((min_eigenvalue(&h)).abs() < 1e-13);
    }

    #[test]
    fn trace_distance_of_orthogonal_pure_states_is_one() {
        let mut a: Array2<C64> = Array2::zeros((2, 2));
        a[[0, 0]] = c(1.0, 0.0);
        let mut b: Array2<C64> = Array2::zeros((2, 2));
        b[[1, 1]] = c(1.0, 0.0);
        assert!((trace_distance(&a, &b) - 1.0).abs() < 1e-13);
        assert!(trace_distance(&a, &a).abs() < 1e-14);
    }

    #[test]
    fn trace_distance_diagonal_case() {
        // diag(0.7, 0.3) vs diag(0.4, 0.6): distance = (0.3 + 0.3)/2 = 0.3.
        let a = array![[c(0.7, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.3, 0.0)]];
        let b = array![[c(0.4, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.6, 0.0)]];
        assert!((trace_distance(&a, &b) - 0.3).abs() < 1e-13);
    }

    #[test]
    fn pauli_algebra() {
        let [sx, sy, sz] = pauli();
        // sx * sy = i sz
        let prod = sx.dot(&sy);
        for i in 0..2 {
            for j in 0..2 {
                assert!((prod[[i, j]] - c(0.0, 1.0) * sz[[i, j]]).norm() < 1e-15);
            }
        }
        for p in [&sx, &sy, &sz] {
            assert!(hermiticity_defect(p) == 0.0);
            let sq = p.dot(p);
            assert_eq!(sq, Array2::eye(2));
        }
    }

    #[test]
    fn hermitize_fixes_asymmetry() {
        let a = array![[c(1.0, 0.5), c(2.0, 1.0)], [c(0.0, 0.0), c(3.0, -0.5)]];
        let h = hermitize(&a);
        assert!(hermiticity_defect(&h) < 1e-15);
        assert!((h[[0, 1]] - c(1.0, 0.5)).norm() < 1e-15);
        // Diagonal keeps only the real part's symmetric combination.
        assert!((h[[0, 0]] - c(1.0, 0.0)).norm() < 1e-15);
    }
}
