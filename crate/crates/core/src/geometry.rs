//! Pointwise geometry of a spacelike graph `M = {(x, u(x))} ⊂ R^{2,1}`.
//!
//! Conventions shared by every module:
//! - `⟨Y, Z⟩ = y₁z₁ + y₂z₂ − y₃z₃`; `E_1, E_2, E_3` are the coordinate vectors and the
//!   reference hyperplane normal is `N₀ = E_3`.
//! - `N = (Du, 1)/√(1−|Du|²)` is the future-directed timelike unit normal.
//! - `g_ij = δ_ij − u_i u_j`, `h_ij = u_ij/√(1−|Du|²)`.
//! - The shape operator is stored as `S = g⁻¹h`, i.e. `S[j][i] = h_i^j`; `gS = h` is symmetric.
//! - `(σ_k)_j^i` is stored at `[i][j]` of [`symfunc::newton_tensor`]`(k, S)`, and the
//!   linearized operator is `(σ_k)_j^i g^{jl} ∇_i∇_l`.
//! - `θ = ⟨N, E_3⟩ = −1/√(1−|Du|²)` and `P = ⟨X, E_3⟩ − ⟨N, E_3⟩ = −u + 1/√(1−|Du|²)`.

use std::sync::Arc;

use nalgebra::{Matrix2, Vector2, Vector3};

use crate::discretization::{
    differentiate, differentiate_values, io, DiscretizationError, Grid, RadialBoundary, ScalarField,
};
use crate::symfunc::{self, binomial, Spectrum, SquareMatrix};

/// `|Du| ≥ 1 − SPACELIKE_EPS` is rejected.
pub const SPACELIKE_EPS: f64 = 1e-8;

#[derive(Debug, thiserror::Error)]
pub enum GeometryError {
    #[error("graph is not spacelike: |Du| = {grad_norm:.12} at node (i = {i}, j = {j}), x = ({x0:.6}, {x1:.6})")]
    NotSpacelike {
        i: usize,
        j: usize,
        x0: f64,
        x1: f64,
        grad_norm: f64,
    },
    #[error("curvature index k = {0} must be 1 or 2 on planar grids")]
    InvalidIndex(usize),
    #[error("field lives on a different grid than the bundle")]
    GridMismatch,
    #[error(transparent)]
    Discretization(#[from] DiscretizationError),
}

/// Minkowski product `Σ_{i≤n} y_i z_i − y_{n+1} z_{n+1}`.
pub fn minkowski_dot(y: &[f64], z: &[f64]) -> f64 {
    assert_eq!(y.len(), z.len());
    let n = y.len() - 1;
    y[..n].iter().zip(&z[..n]).map(|(a, b)| a * b).sum::<f64>() - y[n] * z[n]
}

/// Geometry of `M` at one grid node.
#[derive(Debug, Clone)]
pub struct NodeGeometry {
    pub x: Vector2<f64>,
    pub u: f64,
    pub du: Vector2<f64>,
    pub hessian: Matrix2<f64>,
    pub g: Matrix2<f64>,
    pub ginv: Matrix2<f64>,
    /// `christoffel[m][(i, j)] = Γ_ij^m = −u_m u_ij /(1 − |Du|²)`.
    pub christoffel: [Matrix2<f64>; 2],
    pub normal: Vector3<f64>,
    pub h: Matrix2<f64>,
    /// `S[j][i] = h_i^j`.
    pub shape: Matrix2<f64>,
    /// Principal curvatures, ascending.
    pub lambda: [f64; 2],
    /// `σ_0, σ_1, σ_2` of the shape operator.
    pub sigmas: [f64; 3],
    pub theta: f64,
    pub p: f64,
}

impl NodeGeometry {
    pub fn from_derivatives(
        x: Vector2<f64>,
        u: f64,
        du: Vector2<f64>,
        hessian: Matrix2<f64>,
    ) -> Result<Self, TimelikeNode> {
        let q = du.norm_squared();
        if q.sqrt() >= 1.0 - SPACELIKE_EPS || !q.is_finite() {
            return Err(TimelikeNode(q.sqrt()));
        }
        let w2 = 1.0 - q;
        let w = w2.sqrt();
        let outer = du * du.transpose();
        let g = Matrix2::identity() - outer;
        let ginv = Matrix2::identity() + outer / w2;
        let christoffel = [hessian * (-du[0] / w2), hessian * (-du[1] / w2)];
        let normal = Vector3::new(du[0] / w, du[1] / w, 1.0 / w);
        let h = hessian / w;
        let shape = ginv * h;
        let s = SquareMatrix::from(shape);
        let e = symfunc::sigmas(&s);
        let lambda = Spectrum::of(&s, Some(&SquareMatrix::from(g)))
            .map(|sp| [sp.values()[0], sp.values()[1]])
            .unwrap_or([f64::NAN; 2]);
        Ok(Self {
            x,
            u,
            du,
            hessian,
            g,
            ginv,
            christoffel,
            normal,
            h,
            shape,
            lambda,
            sigmas: [e[0], e[1], e[2]],
            theta: -1.0 / w,
            p: -u + 1.0 / w,
        })
    }

    /// `(σ_k)_j^i` at `[i][j]`.
    pub fn newton_tensor(&self, k: usize) -> Matrix2<f64> {
        match k {
            1 => Matrix2::identity(),
            2 => Matrix2::identity() * self.sigmas[1] - self.shape,
            _ => panic!("k must be 1 or 2 for planar graphs"),
        }
    }

    pub fn hk(&self, k: usize) -> f64 {
        self.sigmas[k] / binomial(2, k)
    }

    /// `∂X/∂x_i = E_i + u_i E_3`.
    pub fn tangent(&self, i: usize) -> Vector3<f64> {
        let mut t = Vector3::zeros();
        t[i] = 1.0;
        t[2] = self.du[i];
        t
    }
}

/// `|Du|` at a node that failed the spacelike test.
#[derive(Debug, Clone, Copy)]
pub struct TimelikeNode(pub f64);

/// Per-node geometry of a sampled graph.
#[derive(Debug, Clone)]
pub struct CurvatureBundle {
    field: ScalarField,
    k: usize,
    nodes: Vec<NodeGeometry>,
}

/// Builds the bundle with extrapolated radial stencils at the outer ring.
pub fn curvature_bundle(field: &ScalarField, k: usize) -> Result<CurvatureBundle, GeometryError> {
    curvature_bundle_with(field, k, RadialBoundary::Extrapolate)
}

/// Builds the bundle using a known boundary trace when available (e.g. `u = c`).
pub fn curvature_bundle_with(
    field: &ScalarField,
    k: usize,
    boundary: RadialBoundary<'_>,
) -> Result<CurvatureBundle, GeometryError> {
    if !(1..=2).contains(&k) {
        return Err(GeometryError::InvalidIndex(k));
    }
    let grid = field.grid();
    let d = differentiate_values(grid, field.values(), boundary);
    let xs = grid.nodes();

    let (worst, worst_norm) =
        d.gradient
            .iter()
            .map(|g| g.norm())
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, v)| {
                if v > bv || v.is_nan() {
                    (i, v)
                } else {
                    (bi, bv)
                }
            });
    if !(worst_norm < 1.0 - SPACELIKE_EPS) {
        let (i, j) = grid.ij(worst);
        return Err(GeometryError::NotSpacelike {
            i,
            j,
            x0: xs[worst][0],
            x1: xs[worst][1],
            grad_norm: worst_norm,
        });
    }

    let nodes = (0..grid.len())
        .map(|idx| {
            NodeGeometry::from_derivatives(xs[idx], field.values()[idx], d.gradient[idx], d.hessian[idx])
                .expect("spacelike checked above")
        })
        .collect();
    Ok(CurvatureBundle {
        field: field.clone(),
        k,
        nodes,
    })
}

impl CurvatureBundle {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        2
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.field.grid()
    }

    pub fn field(&self) -> &ScalarField {
        &self.field
    }

    pub fn nodes(&self) -> &[NodeGeometry] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Scalar field built from a per-node quantity.
    pub fn scalar(&self, f: impl Fn(&NodeGeometry) -> f64) -> ScalarField {
        let values = self.nodes.iter().map(f).collect();
        ScalarField::new(self.grid().clone(), values).expect("bundle quantities are finite")
    }

    pub fn theta(&self) -> ScalarField {
        self.scalar(|n| n.theta)
    }

    pub fn p_function(&self) -> ScalarField {
        self.scalar(|n| n.p)
    }

    pub fn hk_field(&self) -> ScalarField {
        let k = self.k;
        self.scalar(move |n| n.hk(k))
    }

    /// Cartesian gradient of a per-node quantity.
    pub fn gradient_of(&self, f: impl Fn(&NodeGeometry) -> f64) -> Vec<Vector2<f64>> {
        let values: Vec<f64> = self.nodes.iter().map(f).collect();
        differentiate_values(self.grid(), &values, RadialBoundary::Extrapolate).gradient
    }

    /// Largest deviations from the nodewise invariants:
    /// `(|⟨N,N⟩+1|, |det g − (1−|Du|²)|, |gS − (gS)ᵀ|, max ⟨N, ∂X/∂x_i⟩)`.
    pub fn invariant_defects(&self) -> [f64; 4] {
        let mut out = [0.0f64; 4];
        for n in &self.nodes {
            let nn = minkowski_dot(n.normal.as_slice(), n.normal.as_slice());
            out[0] = out[0].max((nn + 1.0).abs());
            out[1] = out[1].max((n.g.determinant() - (1.0 - n.du.norm_squared())).abs());
            let gs = n.g * n.shape;
            out[2] = out[2].max((gs[(0, 1)] - gs[(1, 0)]).abs());
            for i in 0..2 {
                let t = n.tangent(i);
                out[3] = out[3].max(minkowski_dot(n.normal.as_slice(), t.as_slice()).abs());
            }
        }
        out
    }

    /// Multi-field JSON export for plotting.
    pub fn to_json(&self) -> String {
        let col = |f: &dyn Fn(&NodeGeometry) -> f64| -> Vec<f64> { self.nodes.iter().map(f).collect() };
        let k = self.k;
        let fields: Vec<(&str, Vec<f64>)> = vec![
            ("u", col(&|n| n.u)),
            ("du_1", col(&|n| n.du[0])),
            ("du_2", col(&|n| n.du[1])),
            ("g_11", col(&|n| n.g[(0, 0)])),
            ("g_12", col(&|n| n.g[(0, 1)])),
            ("g_22", col(&|n| n.g[(1, 1)])),
            ("h_11", col(&|n| n.h[(0, 0)])),
            ("h_12", col(&|n| n.h[(0, 1)])),
            ("h_22", col(&|n| n.h[(1, 1)])),
            ("lambda_1", col(&|n| n.lambda[0])),
            ("lambda_2", col(&|n| n.lambda[1])),
            ("sigma_1", col(&|n| n.sigmas[1])),
            ("sigma_2", col(&|n| n.sigmas[2])),
            ("h_k", col(&|n| n.hk(k))),
            ("theta", col(&|n| n.theta)),
            ("p", col(&|n| n.p)),
            ("normal_1", col(&|n| n.normal[0])),
            ("normal_2", col(&|n| n.normal[1])),
            ("normal_3", col(&|n| n.normal[2])),
        ];
        io::fields_to_string(self.grid(), &fields)
    }
}

fn check_grid(bundle: &CurvatureBundle, w: &ScalarField) -> Result<(), GeometryError> {
    if **bundle.grid() != **w.grid() {
        return Err(GeometryError::GridMismatch);
    }
    Ok(())
}

/// `∇_i∇_j w = ∂²w/∂x_i∂x_j − Γ_ij^m ∂w/∂x_m` per node.
pub fn covariant_hessian(bundle: &CurvatureBundle, w: &ScalarField) -> Result<Vec<Matrix2<f64>>, GeometryError> {
    check_grid(bundle, w)?;
    let d = differentiate(w);
    Ok(bundle
        .nodes
        .iter()
        .zip(d.gradient.iter().zip(&d.hessian))
        .map(|(n, (dw, hw))| hw - n.christoffel[0] * dw[0] - n.christoffel[1] * dw[1])
        .collect())
}

#[derive(Debug, Clone)]
pub struct EllipticOutput {
    pub values: ScalarField,
    /// Nodes where `A ∉ Γ_k`, i.e. where the operator is not known to be elliptic.
    pub outside_cone: usize,
}

/// `(σ_k)_j^i g^{jl} ∇_i∇_l w` per node.
pub fn elliptic_operator(bundle: &CurvatureBundle, w: &ScalarField) -> Result<EllipticOutput, GeometryError> {
    let hess = covariant_hessian(bundle, w)?;
    let k = bundle.k;
    let mut outside = 0;
    let values = bundle
        .nodes
        .iter()
        .zip(&hess)
        .map(|(n, h)| {
            if !symfunc::cone_from_sigmas(&n.sigmas, k).inside {
                outside += 1;
            }
            (n.newton_tensor(k) * n.ginv * h.transpose()).trace()
        })
        .collect();
    Ok(EllipticOutput {
        values: ScalarField::new(bundle.grid().clone(), values)?,
        outside_cone: outside,
    })
}

/// Max and area-weighted RMS of a nonnegative nodal residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualStats {
    pub max: f64,
    pub l2: f64,
}

impl ResidualStats {
    pub fn from_nodal(grid: &Grid, r: &[f64]) -> Self {
        let mut max = 0.0f64;
        let mut sum = crate::discretization::CompensatedSum::default();
        let mut area = crate::discretization::CompensatedSum::default();
        for i in 0..grid.nr() {
            for j in 0..grid.nphi() {
                let v = r[grid.index(i, j)];
                max = if v.is_nan() { f64::NAN } else { max.max(v) };
                sum.add(v * v * grid.cell_area(i, j));
                area.add(grid.cell_area(i, j));
            }
        }
        Self {
            max,
            l2: (sum.value() / area.value()).sqrt(),
        }
    }
}

/// Residual of `∂N/∂x_i = h_i^j ∂X/∂x_j` with discrete derivatives of `N`.
pub fn weingarten_residual(bundle: &CurvatureBundle) -> ResidualStats {
    let grads: Vec<Vec<Vector2<f64>>> = (0..3).map(|c| bundle.gradient_of(|n| n.normal[c])).collect();
    let r: Vec<f64> = bundle
        .nodes
        .iter()
        .enumerate()
        .map(|(idx, n)| {
            let mut sq = 0.0;
            for i in 0..2 {
                let rhs = n.tangent(0) * n.shape[(0, i)] + n.tangent(1) * n.shape[(1, i)];
                for c in 0..3 {
                    sq += (grads[c][idx][i] - rhs[c]).powi(2);
                }
            }
            sq.sqrt()
        })
        .collect();
    ResidualStats::from_nodal(bundle.grid(), &r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::{build_grid, Domain, StarDomain2D};

    fn disk_grid(nr: usize) -> Arc<Grid> {
        Arc::new(build_grid(&Domain::Star(StarDomain2D::disk([0.0, 0.0], 1.0).unwrap()), nr, 2 * nr).unwrap())
    }

    #[test]
    fn flat_graph() {
        let f = ScalarField::constant(disk_grid(8), 0.3).unwrap();
        let b = curvature_bundle(&f, 2).unwrap();
        for n in b.nodes() {
            assert_eq!(n.shape, Matrix2::zeros());
            assert_eq!(n.normal, Vector3::new(0.0, 0.0, 1.0));
            assert_eq!(n.theta, -1.0);
            assert_eq!(n.g, Matrix2::identity());
            assert!((n.p - 0.7).abs() < 1e-15);
        }
        assert!(weingarten_residual(&b).max <= 1e-10);
    }

    #[test]
    fn tilted_plane() {
        let f = ScalarField::from_fn(disk_grid(8), |x| 0.6 * x[0]).unwrap();
        let b = curvature_bundle(&f, 1).unwrap();
        for n in b.nodes() {
            assert!((n.g - Matrix2::new(0.64, 0.0, 0.0, 1.0)).abs().max() < 1e-12);
            assert!((n.theta + 1.25).abs() < 1e-12);
            assert!((n.normal - Vector3::new(0.75, 0.0, 1.25)).norm() < 1e-12);
        }
        let [nn, det, sym, orth] = b.invariant_defects();
        assert!(nn < 1e-12 && det < 1e-12 && sym < 1e-10 && orth < 1e-10);
    }

    #[test]
    fn steep_graph_is_rejected_at_worst_node() {
        let f = ScalarField::from_fn(disk_grid(8), |x| 0.5 * x[0] * x[0] + x[0]).unwrap();
        match curvature_bundle(&f, 1) {
            Err(GeometryError::NotSpacelike { grad_norm, x0, .. }) => {
                assert!(grad_norm > 1.0);
                assert!(x0 > 0.8);
            }
            other => panic!("expected NotSpacelike, got {other:?}"),
        }
    }

    #[test]
    fn constant_has_zero_covariant_hessian() {
        let g = disk_grid(16);
        let u = ScalarField::from_fn(g.clone(), |x| 0.2 * (x[0] * x[1]).sin()).unwrap();
        let b = curvature_bundle(&u, 2).unwrap();
        let w = ScalarField::constant(g, -4.0).unwrap();
        for h in covariant_hessian(&b, &w).unwrap() {
            assert!(h.abs().max() <= 1e-10);
        }
        let l = elliptic_operator(&b, &w).unwrap();
        assert!(l.values.values().iter().all(|v| v.abs() <= 1e-10));
    }

    #[test]
    fn flat_bundle_covariant_hessian_is_raw_hessian() {
        let g = disk_grid(16);
        let b = curvature_bundle(&ScalarField::constant(g.clone(), 0.0).unwrap(), 1).unwrap();
        let w = ScalarField::from_fn(g, |x| x[0] * x[1] + x[1].powi(2)).unwrap();
        for h in covariant_hessian(&b, &w).unwrap() {
            assert!((h - Matrix2::new(0.0, 1.0, 1.0, 2.0)).abs().max() < 1e-9);
        }
    }

    #[test]
    fn grid_mismatch_is_reported() {
        let b = curvature_bundle(&ScalarField::constant(disk_grid(8), 0.0).unwrap(), 1).unwrap();
        let w = ScalarField::constant(disk_grid(16), 0.0).unwrap();
        assert!(matches!(covariant_hessian(&b, &w), Err(GeometryError::GridMismatch)));
    }
}
