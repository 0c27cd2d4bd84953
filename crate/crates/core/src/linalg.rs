//! Complex linear algebra helpers: Pauli matrices, Kronecker products,
//! Hermitian eigendecompositions, and orthonormal Hermitian operator bases.

use nalgebra::{Complex, DMatrix, Matrix2, Vector3};

/// Shorthand for the complex scalar type used everywhere.
pub type C64 = Complex<f64>;

/// Complex matrix with runtime dimensions.
pub type CMatrix = DMatrix<C64>;

pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

pub fn cr(re: f64) -> C64 {
    Complex::new(re, 0.0)
}

/// Pauli matrix σ_i for i ∈ {1, 2, 3}; i = 0 gives the identity.
pub fn pauli(i: usize) -> Matrix2<C64> {
    match i {
        0 => Matrix2::identity(),
        1 => Matrix2::new(cr(0.0), cr(1.0), cr(1.0), cr(0.0)),
        2 => Matrix2::new(cr(0.0), c(0.0, -1.0), c(0.0, 1.0), cr(0.0)),
        3 => Matrix2::new(cr(1.0), cr(0.0), cr(0.0), cr(-1.0)),
        _ => panic!("pauli index out of range: {i}"),
    }
}

/// n·σ for a real 3-vector n.
pub fn dot_sigma(n: &Vector3<f64>) -> Matrix2<C64> {
    let mut m = Matrix2::zeros();
    for (i, ni) in n.iter().enumerate() {
        m += pauli(i + 1) * cr(*ni);
    }
    m
}

/// Kronecker product of two dynamically-sized complex matrices.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn mat2_to_dyn(a: &Matrix2<C64>) -> CMatrix {
    CMatrix::from_fn(2, 2, |i, j| a[(i, j)])
}

pub fn dyn_to_mat2(a: &CMatrix) -> Matrix2<C64> {
    debug_assert_eq!(a.nrows(), 2);
    debug_assert_eq!(a.ncols(), 2);
    Matrix2::new(a[(0, 0)], a[(0, 1)], a[(1, 0)], a[(1, 1)])
}

/// Largest absolute deviation from Hermiticity.
pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    let adj = m.adjoint();
    (m - adj).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Eigenvalues of a Hermitian matrix, ascending.
///
/// The input is symmetrized first so that tiny numerical non-Hermiticity
/// cannot produce complex eigenvalues.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let h = (m + m.adjoint()) * cr(0.5);
    let mut ev: Vec<f64> = h.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// Hermitian eigendecomposition: (eigenvalues ascending, eigenvector columns).
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let h = (m + m.adjoint()) * cr(0.5);
    let n = h.nrows();
    let se = h.symmetric_eigen();
    let mut idx: Vec<usize> = (0..se.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| se.eigenvalues[a].partial_cmp(&se.eigenvalues[b]).unwrap());
    let vals: Vec<f64> = idx.iter().map(|&i| se.eigenvalues[i]).collect();
    let vecs = CMatrix::from_fn(n, n, |r, k| se.eigenvectors[(r, idx[k])]);
    (vals, vecs)
}

/// Orthonormal Hermitian operator basis of d×d matrices under the
/// Hilbert-Schmidt inner product. For d = 2 this is {1/√2, σ_1/√2, σ_2/√2,
/// σ_3/√2}; for larger d the identity is followed by generalized Gell-Mann
/// matrices.
pub fn hermitian_basis(d: usize) -> Vec<CMatrix> {
    let mut ops = Vec::with_capacity(d * d);
    let norm = 1.0 / (d as f64).sqrt();
    ops.push(CMatrix::identity(d, d) * cr(norm));
    if d == 2 {
        for i in 1..=3 {
            ops.push(mat2_to_dyn(&pauli(i)) * cr(std::f64::consts::FRAC_1_SQRT_2));
        }
        return ops;
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for j in 0..d {
        for k in (j + 1)..d {
            let mut sym = CMatrix::zeros(d, d);
            sym[(j, k)] = cr(s);
            sym[(k, j)] = cr(s);
            ops.push(sym);
            let mut asym = CMatrix::zeros(d, d);
            asym[(j, k)] = c(0.0, -s);
            asym[(k, j)] = c(0.0, s);
            ops.push(asym);
        }
    }
    for l in 1..d {
        let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
        let mut diag = CMatrix::zeros(d, d);
        for j in 0..l {
            diag[(j, j)] = cr(norm);
        }
        diag[(l, l)] = cr(-(l as f64) * norm);
        ops.push(diag);
    }
    ops
}

/// Hilbert-Schmidt inner product tr(A† B).
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> C64 {
    (a.adjoint() * b).trace()
}

/// Real trace of a product tr(A B), assuming the product is Hermitian-valued.
pub fn trace_product_re(a: &CMatrix, b: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut t = C64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            t += a[(i, k)] * b[(k, i)];
        }
    }
    t.re
}

/// Canonical sign convention for Bloch directions: the first component with
/// magnitude above 1e-12 is made positive. ±n label the same basis.
pub fn canonical_direction(n: &Vector3<f64>) -> Vector3<f64> {
    for i in 0..3 {
        if n[i].abs() > 1e-12 {
            return if n[i] < 0.0 { -n } else { *n };
        }
    }
    *n
}

/// Angular distance between basis directions, treating n and -n as equal.
pub fn basis_angle(a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    let d = a.dot(b).abs().min(1.0);
    d.acos()
}

/// Unit vector from spherical angles.
pub fn spherical_direction(theta: f64, phi: f64) -> Vector3<f64> {
    Vector3::new(
        theta.sin() * phi.cos(),
        theta.sin() * phi.sin(),
        theta.cos(),
    )
}

/// Any pair (u, v) completing n to a right-handed orthonormal triad.
pub fn orthonormal_complement(n: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let pick = if n.x.abs() < 0.9 {
        Vector3::x()
    } else {
        Vector3::y()
    };
    let u = (pick - n * n.dot(&pick)).normalize();
    let v = n.cross(&u);
    (u, v)
}
