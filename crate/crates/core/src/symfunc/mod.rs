//! Elementary symmetric functions of a matrix.
//!
//! `σ_k(A)` is computed from the power traces `p_m = tr(A^m)` with Newton's
//! identities `m σ_m = Σ_{i=1}^{m} (-1)^{i-1} σ_{m-i} p_i`. The derivative tensor
//! `∂σ_k/∂A_{ab}` is the transpose of the Newton tensor
//! `T_{k-1}(A) = Σ_{i=0}^{k-1} (-1)^i σ_{k-1-i}(A) A^i`.
//!
//! The [`kronecker`] module keeps a direct expansion through generalized Kronecker
//! symbols as an independent check for small `n`.

pub mod kronecker;
mod maclaurin;

use nalgebra::{DMatrix, Matrix2, SymmetricEigen};

pub use maclaurin::{check_newton_maclaurin, MaclaurinReport};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SymFuncError {
    #[error("index k = {k} outside 1..={n}")]
    InvalidIndex { k: usize, n: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("non-finite matrix entry")]
    NonFinite,
    #[error("matrix has complex eigenvalues (imaginary part {imag:e})")]
    ComplexSpectrum { imag: f64 },
    #[error("metric is not positive definite")]
    MetricNotPositive,
    #[error("spectrum is not in the Gårding cone Γ_{k} (margin {margin:e})")]
    OutsideCone { k: usize, margin: f64 },
}

/// Finite square matrix; in geometric use, the shape operator with entries
/// `A[j][i] = h_i^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix(DMatrix<f64>);

impl SquareMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self, SymFuncError> {
        if m.nrows() != m.ncols() {
            return Err(SymFuncError::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(SymFuncError::NonFinite);
        }
        Ok(Self(m))
    }

    pub fn from_row_slice(n: usize, entries: &[f64]) -> Result<Self, SymFuncError> {
        Self::new(DMatrix::from_row_slice(n, n, entries))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        Self(DMatrix::zeros(n, n))
    }

    pub fn diagonal(d: &[f64]) -> Result<Self, SymFuncError> {
        Self::new(DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(d)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }
}

impl From<Matrix2<f64>> for SquareMatrix {
    fn from(m: Matrix2<f64>) -> Self {
        Self(DMatrix::from_iterator(2, 2, m.iter().copied()))
    }
}

/// Principal curvatures, sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum(Vec<f64>);

impl Spectrum {
    pub fn new(mut values: Vec<f64>) -> Result<Self, SymFuncError> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(SymFuncError::NonFinite);
        }
        values.sort_by(f64::total_cmp);
        Ok(Self(values))
    }

    /// Eigenvalues of `a`. With a metric `g` for which `g a` is symmetric, they are
    /// taken from the symmetric matrix `g^{1/2} a g^{-1/2}` and are real by construction.
    pub fn of(a: &SquareMatrix, metric: Option<&SquareMatrix>) -> Result<Self, SymFuncError> {
        let m = a.as_matrix();
        let sym = match metric {
            Some(g) => {
                let eig = SymmetricEigen::new(g.as_matrix().clone());
                if eig.eigenvalues.iter().any(|&v| !(v > 0.0)) {
                    return Err(SymFuncError::MetricNotPositive);
                }
                let q = &eig.eigenvectors;
                let sqrt = DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
                let isqrt = DMatrix::from_diagonal(&eig.eigenvalues.map(|v| 1.0 / v.sqrt()));
                let half = q * sqrt * q.transpose();
                let ihalf = q * isqrt * q.transpose();
                let b = &half * m * &ihalf;
                (&b + b.transpose()) * 0.5
            }
            None => {
                let asym = (m - m.transpose()).abs().max();
                if asym > 1e-12 * (1.0 + m.abs().max()) {
                    let eig = m.complex_eigenvalues();
                    let imag = eig.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
                    if imag > 1e-9 * (1.0 + m.abs().max()) {
                        return Err(SymFuncError::ComplexSpectrum { imag });
                    }
                    return Self::new(eig.iter().map(|z| z.re).collect());
                }
                (m + m.transpose()) * 0.5
            }
        };
        Self::new(SymmetricEigen::new(sym).eigenvalues.iter().copied().collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `max λ - min λ`.
    pub fn spread(&self) -> f64 {
        match (self.0.first(), self.0.last()) {
            (Some(lo), Some(hi)) => hi - lo,
            _ => 0.0,
        }
    }
}

/// Binomial coefficient as a float (`0` when `k > n`).
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `[σ_0(A), …, σ_n(A)]` by Newton's identities.
pub fn sigmas(a: &SquareMatrix) -> Vec<f64> {
    let n = a.dim();
    let m = a.as_matrix();
    let mut traces = Vec::with_capacity(n);
    let mut power = m.clone();
    for p in 1..=n {
        traces.push(power.trace());
        if p < n {
            power = &power * m;
        }
    }
    let mut e = vec![0.0; n + 1];
    e[0] = 1.0;
    for k in 1..=n {
        let mut acc = 0.0;
        for i in 1..=k {
            let term = e[k - i] * traces[i - 1];
            if i % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        e[k] = acc / k as f64;
    }
    e
}

/// `σ_k(A)`; `σ_0 = 1` and `σ_k = 0` for `k > n`.
pub fn sigma(k: usize, a: &SquareMatrix) -> f64 {
    if k > a.dim() {
        return 0.0;
    }
    sigmas(a)[k]
}

/// `σ_k` of a list of eigenvalues, by the product expansion recurrence.
pub fn sigma_of_spectrum(k: usize, lambda: &[f64]) -> f64 {
    sigmas_of_spectrum(lambda).get(k).copied().unwrap_or(0.0)
}

/// `[σ_0(λ), …, σ_n(λ)]`.
pub fn sigmas_of_spectrum(lambda: &[f64]) -> Vec<f64> {
    let n = lambda.len();
    let mut e = vec![0.0; n + 1];
    e[0] = 1.0;
    for (count, &l) in lambda.iter().enumerate() {
        for k in (1..=count + 1).rev() {
            e[k] += l * e[k - 1];
        }
    }
    e
}

fn check_index(k: usize, n: usize) -> Result<(), SymFuncError> {
    if k == 0 || k > n {
        Err(SymFuncError::InvalidIndex { k, n })
    } else {
        Ok(())
    }
}

/// Newton tensor `T_{k-1}(A)`; in the shape-operator convention its entry `[i][j]`
/// is `(σ_k)_j^i`.
pub fn newton_tensor(k: usize, a: &SquareMatrix) -> Result<SquareMatrix, SymFuncError> {
    let n = a.dim();
    check_index(k, n)?;
    let e = sigmas(a);
    let m = a.as_matrix();
    // T_0 = I, T_i = σ_i I - A T_{i-1}
    let mut t = DMatrix::identity(n, n);
    for sigma_i in &e[1..k] {
        t = DMatrix::identity(n, n) * *sigma_i - m * t;
    }
    Ok(SquareMatrix(t))
}

/// `G[a][b] = ∂σ_k(A)/∂A[a][b]`.
pub fn sigma_gradient(k: usize, a: &SquareMatrix) -> Result<SquareMatrix, SymFuncError> {
    Ok(SquareMatrix(newton_tensor(k, a)?.0.transpose()))
}

/// `H_k = σ_k / C(n, k)`.
pub fn hk(k: usize, a: &SquareMatrix) -> Result<f64, SymFuncError> {
    let n = a.dim();
    check_index(k, n)?;
    Ok(sigma(k, a) / binomial(n, k))
}

/// Relative residuals of the contraction identities of the Newton tensor `T = (σ_k)_j^i`:
/// `T_j^i h_i^j = kσ_k`, `T_i^i = (n−k+1)σ_{k−1}` and `T_j^i h_i^l h_l^j = σ_1σ_k − (k+1)σ_{k+1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityResiduals {
    pub euler: f64,
    pub trace: f64,
    pub square: f64,
}

impl IdentityResiduals {
    pub fn max(&self) -> f64 {
        self.euler.max(self.trace).max(self.square)
    }
}

/// Each residual is divided by `1 + ‖T‖‖A‖^p`, the size of the contracted terms.
pub fn identity_residuals(k: usize, a: &SquareMatrix) -> Result<IdentityResiduals, SymFuncError> {
    let n = a.dim();
    let t = newton_tensor(k, a)?;
    let e = sigmas(a);
    let m = a.as_matrix();
    let sigma_next = e.get(k + 1).copied().unwrap_or(0.0);
    let (tn, an) = (t.0.norm(), m.norm());
    let tm = &t.0 * m;
    let euler = (tm.trace() - k as f64 * e[k]).abs() / (1.0 + tn * an);
    let trace = (t.0.trace() - (n - k + 1) as f64 * e[k - 1]).abs() / (1.0 + tn);
    let square_rhs = e[1] * e[k] - (k + 1) as f64 * sigma_next;
    let square = ((tm * m).trace() - square_rhs).abs() / (1.0 + tn * an * an);
    Ok(IdentityResiduals { euler, trace, square })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeMembership {
    pub inside: bool,
    /// `min_{i ≤ k} σ_i`.
    pub margin: f64,
}

/// Membership of `λ` in the open cone `Γ_k = {σ_i(λ) > 0, i = 1..k}`.
pub fn in_gamma_k(lambda: &[f64], k: usize) -> ConeMembership {
    cone_from_sigmas(&sigmas_of_spectrum(lambda), k)
}

/// Same test on the eigenvalues of `A`, through its `σ_i` directly.
pub fn in_gamma_k_matrix(a: &SquareMatrix, k: usize) -> ConeMembership {
    cone_from_sigmas(&sigmas(a), k)
}

pub(crate) fn cone_from_sigmas(e: &[f64], k: usize) -> ConeMembership {
    let k = k.min(e.len().saturating_sub(1));
    let margin = e[1..=k].iter().copied().fold(f64::INFINITY, f64::min);
    ConeMembership {
        inside: margin > 0.0,
        margin,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(d: &[f64]) -> SquareMatrix {
        SquareMatrix::diagonal(d).unwrap()
    }

    #[test]
    fn identity_gives_binomials() {
        let e = sigmas(&SquareMatrix::identity(3));
        assert_eq!(e, vec![1.0, 3.0, 3.0, 1.0]);
        for k in 1..=5 {
            assert!((hk(k, &SquareMatrix::identity(5)).unwrap() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn diagonal_values() {
        let a = diag(&[1.0, 2.0, 3.0]);
        assert!((sigma(2, &a) - 11.0).abs() < 1e-13);
        assert!((sigma(3, &a) - 6.0).abs() < 1e-13);
        assert_eq!(sigma(4, &a), 0.0);
        assert_eq!(sigma(0, &a), 1.0);
        let g = sigma_gradient(3, &a).unwrap();
        let expect = diag(&[6.0, 3.0, 2.0]);
        assert!((g.as_matrix() - expect.as_matrix()).abs().max() < 1e-13);
    }

    #[test]
    fn first_gradient_is_identity() {
        let a = SquareMatrix::from_row_slice(3, &[1.0, 2.0, -1.0, 0.5, 3.0, 4.0, -2.0, 0.0, 1.0]).unwrap();
        let g = sigma_gradient(1, &a).unwrap();
        assert_eq!(g.as_matrix(), &DMatrix::identity(3, 3));
    }

    #[test]
    fn hk_examples() {
        assert_eq!(hk(1, &diag(&[2.0, 2.0])).unwrap(), 2.0);
        assert_eq!(hk(2, &diag(&[2.0, 2.0])).unwrap(), 4.0);
        assert_eq!(hk(2, &SquareMatrix::zeros(3)).unwrap(), 0.0);
        assert!(matches!(
            hk(0, &SquareMatrix::zeros(3)),
            Err(SymFuncError::InvalidIndex { k: 0, n: 3 })
        ));
        assert!(sigma_gradient(4, &SquareMatrix::zeros(3)).is_err());
    }

    #[test]
    fn cone_membership() {
        let c = in_gamma_k(&[1.0, 1.0, 1.0], 3);
        assert!(c.inside && c.margin == 1.0);
        let lam = [1.0, 1.0, -0.5];
        assert!(in_gamma_k(&lam, 1).inside);
        let c2 = in_gamma_k(&lam, 2);
        assert!(!c2.inside && c2.margin == 0.0);
        assert!(!in_gamma_k_matrix(&SquareMatrix::zeros(2), 1).inside);
    }

    #[test]
    fn spectrum_with_metric_is_real() {
        // g A symmetric with A itself non-symmetric
        let g = SquareMatrix::from_row_slice(2, &[0.64, 0.0, 0.0, 1.0]).unwrap();
        let h = DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.3, 2.0]);
        let a = SquareMatrix::new(g.as_matrix().clone().try_inverse().unwrap() * &h).unwrap();
        let spec = Spectrum::of(&a, Some(&g)).unwrap();
        let plain = Spectrum::of(&a, None).unwrap();
        for (x, y) in spec.values().iter().zip(plain.values()) {
            assert!((x - y).abs() < 1e-12);
        }
        let e = sigmas(&a);
        assert!((spec.values().iter().sum::<f64>() - e[1]).abs() < 1e-12);
    }
}
