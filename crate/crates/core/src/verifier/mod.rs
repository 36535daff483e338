//! Named residual checks for graphs of constant `k`-th mean curvature.
//!
//! Every check returns [`VerificationReport`]s. Algebraic identities are held to an
//! absolute tolerance; discrete ones to `C·h²` with `h = 1/nr` (see [`Tolerances`]).

mod convergence;
mod report;

use nalgebra::{Matrix2, Vector2};

use crate::discretization::{boundary_trace, integrate_values, CompensatedSum, GridDescriptor};
use crate::geometry::{covariant_hessian, elliptic_operator, weingarten_residual, CurvatureBundle, ResidualStats};
use crate::hyperboloid::HyperboloidCap;
use crate::symfunc::{binomial, cone_from_sigmas, identity_residuals, SquareMatrix};

pub use convergence::{
    convergence_study, least_squares_order, CaseDescriptor, ConvergenceSeries, ConvergenceTable, FieldCase, TrigTerm,
};
pub use report::{reports_from_json, reports_to_csv, reports_to_json, VerificationReport, CSV_HEADER};

#[derive(Debug, thiserror::Error)]
pub enum VerifierError {
    #[error("convergence study needs at least 3 grids in a doubling sequence, got {0:?}")]
    BadSequence(Vec<(usize, usize)>),
    #[error(transparent)]
    Geometry(#[from] crate::geometry::GeometryError),
    #[error(transparent)]
    Hyperboloid(#[from] crate::hyperboloid::HyperboloidError),
    #[error(transparent)]
    Discretization(#[from] crate::discretization::DiscretizationError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Pointwise algebraic identities.
    pub algebraic: f64,
    /// Discrete checks pass below `discrete · h²`.
    pub discrete: f64,
    /// Normalized integral identity residuals.
    pub integral: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            algebraic: 1e-9,
            discrete: 10.0,
            integral: 1e-3,
        }
    }
}

impl Tolerances {
    pub fn discrete_at(&self, grid: GridDescriptor) -> f64 {
        self.discrete * grid.h() * grid.h()
    }
}

fn stats(bundle: &CurvatureBundle, r: &[f64]) -> ResidualStats {
    ResidualStats::from_nodal(bundle.grid(), r)
}

fn report(name: &str, bundle: &CurvatureBundle, r: &[f64], tol: f64, notes: impl Into<String>) -> VerificationReport {
    let s = stats(bundle, r);
    VerificationReport::new(name, s.max, s.l2, tol, bundle.grid().descriptor(), notes)
}

/// Derivatives of curvature quantities (third derivatives of `u`) carry an error of size `h²/|x|` next to the
/// polar centre, so their max-norm tolerance is the discrete one over the innermost radius.
fn centre_tolerance(bundle: &CurvatureBundle, tol: &Tolerances) -> f64 {
    let grid = bundle.grid();
    tol.discrete_at(grid.descriptor()) / grid.s(0)
}

/// `[∂_x, ∂_y]` of every shape-operator entry: `d[l][i][j] = ∂_j S[l][i]`.
fn shape_derivatives(bundle: &CurvatureBundle) -> [[Vec<Vector2<f64>>; 2]; 2] {
    let d = |l: usize, i: usize| bundle.gradient_of(move |n| n.shape[(l, i)]);
    [[d(0, 0), d(0, 1)], [d(1, 0), d(1, 1)]]
}

/// Euler, trace and square identities of `(σ_k)_j^i` at every node, plus the raw
/// symmetry `∂_l h_i^j = ∂_i h_l^j`.
pub fn check_pointwise_identities(bundle: &CurvatureBundle, tol: &Tolerances) -> Vec<VerificationReport> {
    let k = bundle.k();
    let mut euler = Vec::with_capacity(bundle.len());
    let mut trace = Vec::with_capacity(bundle.len());
    let mut square = Vec::with_capacity(bundle.len());
    for n in bundle.nodes() {
        let r = identity_residuals(k, &SquareMatrix::from(n.shape)).expect("k checked at bundle construction");
        euler.push(r.euler);
        trace.push(r.trace);
        square.push(r.square);
    }
    let ds = shape_derivatives(bundle);
    let codazzi: Vec<f64> = (0..bundle.len())
        .map(|idx| {
            (0..2)
                .map(|j| (ds[j][0][idx][1] - ds[j][1][idx][0]).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    vec![
        report(
            "identity_euler",
            bundle,
            &euler,
            tol.algebraic,
            "(σ_k)_j^i h_i^j = kσ_k",
        ),
        report(
            "identity_trace",
            bundle,
            &trace,
            tol.algebraic,
            "(σ_k)_i^i = (n−k+1)σ_{k−1}",
        ),
        report(
            "identity_square",
            bundle,
            &square,
            tol.algebraic,
            "(σ_k)_j^i h_i^l h_l^j = σ_1σ_k − (k+1)σ_{k+1}",
        ),
        report(
            "codazzi_symmetry",
            bundle,
            &codazzi,
            centre_tolerance(bundle, tol),
            "∂_l h_i^j = ∂_i h_l^j",
        ),
    ]
}

/// `∂θ/∂x_i = −h_i^j u_j`.
pub fn check_theta_gradient(bundle: &CurvatureBundle, tol: &Tolerances) -> VerificationReport {
    let dtheta = bundle.gradient_of(|n| n.theta);
    let r: Vec<f64> = bundle
        .nodes()
        .iter()
        .zip(&dtheta)
        .map(|(n, d)| {
            let rhs = -(n.shape.transpose() * n.du);
            (d - rhs).abs().max()
        })
        .collect();
    report(
        "theta_gradient",
        bundle,
        &r,
        tol.discrete_at(bundle.grid().descriptor()),
        "",
    )
}

pub fn check_weingarten(bundle: &CurvatureBundle, tol: &Tolerances) -> VerificationReport {
    let s = weingarten_residual(bundle);
    VerificationReport::new(
        "weingarten",
        s.max,
        s.l2,
        tol.discrete_at(bundle.grid().descriptor()),
        bundle.grid().descriptor(),
        "∂N/∂x_i = h_i^j ∂X/∂x_j",
    )
}

/// `max_j |Σ_i ∂_i (σ_k)_j^i|` with discrete derivatives of the assembled tensor.
pub fn check_divergence_free(bundle: &CurvatureBundle, tol: &Tolerances) -> VerificationReport {
    let k = bundle.k();
    let d = |i: usize, j: usize| bundle.gradient_of(move |n| n.newton_tensor(k)[(i, j)]);
    let t = [[d(0, 0), d(0, 1)], [d(1, 0), d(1, 1)]];
    let r: Vec<f64> = (0..bundle.len())
        .map(|idx| {
            (0..2)
                .map(|j| (t[0][j][idx][0] + t[1][j][idx][1]).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    let tolerance = if k == 1 { 1e-10 } else { centre_tolerance(bundle, tol) };
    report("divergence_free", bundle, &r, tolerance, "")
}

/// How far `H_k` and the boundary data are from constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preconditions {
    /// `(max H_k − min H_k)/|mean H_k|` over all nodes.
    pub hk_drift: f64,
    pub hk_mean: f64,
    /// `max |u − c|` on the extrapolated boundary trace.
    pub boundary_u: f64,
    /// `max |θ − θ₀|` on the extrapolated boundary trace.
    pub boundary_theta: f64,
}

pub fn preconditions(bundle: &CurvatureBundle, c: f64, theta0: f64) -> Preconditions {
    let k = bundle.k();
    let hk: Vec<f64> = bundle.nodes().iter().map(|n| n.hk(k)).collect();
    let (lo, hi) = hk
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
    let mut mean = CompensatedSum::default();
    hk.iter().for_each(|v| mean.add(*v));
    let hk_mean = mean.value() / hk.len() as f64;
    let grid = bundle.grid();
    let theta: Vec<f64> = bundle.nodes().iter().map(|n| n.theta).collect();
    let dev = |trace: Vec<f64>, target: f64| trace.iter().map(|v| (v - target).abs()).fold(0.0, f64::max);
    Preconditions {
        hk_drift: (hi - lo) / hk_mean.abs().max(f64::MIN_POSITIVE),
        hk_mean,
        boundary_u: dev(boundary_trace(grid, bundle.field().values()), c),
        boundary_theta: dev(boundary_trace(grid, &theta), theta0),
    }
}

/// The integral identity
/// `k·C(n,k)∫(u−c) + (n−k+1)∫(θ−θ₀)σ_{k−1} = 0` and its two halves
/// `(n−k+1)∫σ_{k−1}(θ−θ₀) = −∫(σ_k)_j^i x_j ∂_iθ` and `∫(σ_k)_j^i x_j ∂_iθ = k·C(n,k)∫(u−c)`,
/// each normalized by `k·C(n,k)∫|u−c|`. Precondition drift is reported alongside.
pub fn check_integral_identity(
    bundle: &CurvatureBundle,
    c: f64,
    theta0: f64,
    tol: &Tolerances,
) -> Vec<VerificationReport> {
    let k = bundle.k();
    let n = bundle.n();
    let grid = bundle.grid();
    let desc = grid.descriptor();
    let kc = k as f64 * binomial(n, k);
    let m = (n - k + 1) as f64;
    let center = grid.star().center();
    let dtheta = bundle.gradient_of(|node| node.theta);

    let mut u_term = Vec::with_capacity(bundle.len());
    let mut u_abs = Vec::with_capacity(bundle.len());
    let mut theta_term = Vec::with_capacity(bundle.len());
    let mut flux_term = Vec::with_capacity(bundle.len());
    for (node, dt) in bundle.nodes().iter().zip(&dtheta) {
        u_term.push(node.u - c);
        u_abs.push((node.u - c).abs());
        theta_term.push((node.theta - theta0) * node.sigmas[k - 1]);
        let x = Vector2::new(node.x[0] - center[0], node.x[1] - center[1]);
        flux_term.push(dt.dot(&(node.newton_tensor(k) * x)));
    }
    let iu = integrate_values(grid, &u_term);
    let norm = (kc * integrate_values(grid, &u_abs)).max(f64::MIN_POSITIVE);
    let itheta = integrate_values(grid, &theta_term);
    let iflux = integrate_values(grid, &flux_term);

    let main = (kc * iu + m * itheta).abs() / norm;
    let int_o = (m * itheta + iflux).abs() / norm;
    let minus_int_o = (iflux - kc * iu).abs() / norm;

    let pre = preconditions(bundle, c, theta0);
    let ptol = tol.discrete_at(desc);
    let hk_ok = pre.hk_drift <= ptol;
    let theta_ok = pre.boundary_theta <= ptol;
    let u_ok = pre.boundary_u <= ptol;

    let scalar = |name: &str, v: f64, note: String| VerificationReport::new(name, v, v, tol.integral, desc, note);
    let mark = |r: VerificationReport, ok: bool| if ok { r } else { r.failed("precondition-failed") };

    let values = format!("∫(u−c) = {iu:e}, ∫(θ−θ₀)σ_(k−1) = {itheta:e}, ∫(σ_k)x∂θ = {iflux:e}");
    vec![
        mark(scalar("integral_identity", main, values), hk_ok && theta_ok && u_ok),
        mark(
            scalar("integral_identity_int_o", int_o, String::new()),
            theta_ok && u_ok,
        ),
        mark(
            scalar("integral_identity_minus_int_o", minus_int_o, String::new()),
            hk_ok && u_ok,
        ),
        VerificationReport::new(
            "precondition_hk_constant",
            pre.hk_drift,
            pre.hk_drift,
            ptol,
            desc,
            format!("mean H_k = {}", pre.hk_mean),
        ),
        VerificationReport::new(
            "precondition_boundary_u",
            pre.boundary_u,
            pre.boundary_u,
            ptol,
            desc,
            format!("c = {c}"),
        ),
        VerificationReport::new(
            "precondition_boundary_theta",
            pre.boundary_theta,
            pre.boundary_theta,
            ptol,
            desc,
            format!("θ₀ = {theta0}"),
        ),
    ]
}

/// `∇_j h_i^l` at one node, indexed `[i][j][l]`.
fn covariant_shape_derivative(
    node: &crate::geometry::NodeGeometry,
    ds: &[[Vec<Vector2<f64>>; 2]; 2],
    idx: usize,
) -> [[[f64; 2]; 2]; 2] {
    let s = &node.shape;
    let gam = &node.christoffel;
    let mut out = [[[0.0; 2]; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            for l in 0..2 {
                let mut v = ds[l][i][idx][j];
                for m in 0..2 {
                    v -= gam[m][(i, j)] * s[(l, m)];
                    v += gam[l][(m, j)] * s[(m, i)];
                }
                out[i][j][l] = v;
            }
        }
    }
    out
}

/// Checks on `P = −u + 1/√(1−|Du|²)`: (a) the covariant Hessian identity
/// `∇_i∇_jP = (h_ij − h_i^m h_mj)θ + ∇_j h_i^l u_l`, (b) the subsolution sign
/// `(σ_k)_j^i ∇_i∇^j P ≥ 0`, (c) `σ_{k−1} ≥ C(n,k−1) H_k^{(k−1)/k}`.
pub fn check_p_function(bundle: &CurvatureBundle, tol: &Tolerances) -> Vec<VerificationReport> {
    let k = bundle.k();
    let n = bundle.n();
    let p = bundle.p_function();
    let hess = covariant_hessian(bundle, &p).expect("P lives on the bundle grid");
    let ds = shape_derivatives(bundle);

    let identity: Vec<f64> = bundle
        .nodes()
        .iter()
        .enumerate()
        .map(|(idx, node)| {
            let cov = covariant_shape_derivative(node, &ds, idx);
            let hh = node.shape.transpose() * node.h;
            let mut worst = 0.0f64;
            for i in 0..2 {
                for j in 0..2 {
                    let mut rhs = (node.h[(i, j)] - hh[(i, j)]) * node.theta;
                    for l in 0..2 {
                        rhs += cov[i][j][l] * node.du[l];
                    }
                    worst = worst.max((hess[idx][(i, j)] - rhs).abs());
                }
            }
            worst
        })
        .collect();

    let lp = elliptic_operator(bundle, &p).expect("P lives on the bundle grid");
    let negative: Vec<f64> = lp.values.values().iter().map(|v| (-v).max(0.0)).collect();
    let third_order = centre_tolerance(bundle, tol);
    let mut sign = report("p_subsolution_sign", bundle, &negative, third_order, "");
    sign = sign.with_note(&format!(
        "min (σ_k)∇∇P = {:e}, max = {:e}",
        lp.values.min(),
        lp.values.max()
    ));
    if lp.outside_cone > 0 {
        sign = sign.with_note(&format!(
            "A ∉ Γ_k at {} nodes, operator not known elliptic",
            lp.outside_cone
        ));
    }

    let mut skipped = 0;
    let mut worst_margin = f64::INFINITY;
    let bound: Vec<f64> = bundle
        .nodes()
        .iter()
        .map(|node| {
            let hk = node.hk(k);
            if hk < 0.0 {
                skipped += 1;
                return 0.0;
            }
            let margin = node.sigmas[k - 1] - binomial(n, k - 1) * hk.powf((k - 1) as f64 / k as f64);
            worst_margin = worst_margin.min(margin);
            (-margin).max(0.0) / (1.0 + node.sigmas[k - 1].abs())
        })
        .collect();
    let mut maclaurin = report(
        "p_newton_maclaurin",
        bundle,
        &bound,
        tol.algebraic,
        format!("min σ_(k−1) − C(n,k−1)H_k^((k−1)/k) = {worst_margin:e}"),
    );
    if skipped > 0 {
        maclaurin = maclaurin.with_note(&format!("H_k < 0 at {skipped} nodes, skipped"));
    }

    vec![
        report("p_hessian_identity", bundle, &identity, third_order, ""),
        sign,
        maclaurin,
    ]
}

/// Fraction of nodes with `A ∉ Γ_k`; passes only when every node is inside.
pub fn check_k_convexity(bundle: &CurvatureBundle) -> VerificationReport {
    let k = bundle.k();
    let mut outside = 0usize;
    let mut worst = f64::INFINITY;
    for node in bundle.nodes() {
        let cone = cone_from_sigmas(&node.sigmas, k);
        worst = worst.min(cone.margin);
        if !cone.inside {
            outside += 1;
        }
    }
    let frac = outside as f64 / bundle.len() as f64;
    VerificationReport::new(
        "k_convexity",
        frac,
        frac,
        0.0,
        bundle.grid().descriptor(),
        format!(
            "inside {}/{}, worst margin {worst:e}",
            bundle.len() - outside,
            bundle.len()
        ),
    )
}

/// Strict `u < c` at every node. The residual is the number of violating nodes.
pub fn check_below_boundary(bundle: &CurvatureBundle, c: f64) -> VerificationReport {
    let values = bundle.field().values();
    let bad = values.iter().filter(|u| !(**u < c)).count();
    let top = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    VerificationReport::new(
        "max_principle_u_below_c",
        bad as f64,
        bad as f64 / values.len() as f64,
        0.0,
        bundle.grid().descriptor(),
        format!("max u − c = {:e}", top - c),
    )
}

/// Closed-form signatures of the cap: `A = I`, `H_k = 1`, `P ≡ −c−θ₀`.
pub fn check_cap(bundle: &CurvatureBundle, cap: &HyperboloidCap, tol: &Tolerances) -> Vec<VerificationReport> {
    let k = bundle.k();
    let desc = bundle.grid().descriptor();
    let t = tol.discrete_at(desc);
    let shape: Vec<f64> = bundle
        .nodes()
        .iter()
        .map(|n| (n.shape - Matrix2::identity()).abs().max())
        .collect();
    let hk: Vec<f64> = bundle.nodes().iter().map(|n| (n.hk(k) - 1.0).abs()).collect();
    let p = bundle.p_function();
    let spread = p.max() - p.min();
    let pv: Vec<f64> = p.values().iter().map(|v| (v - cap.p_value()).abs()).collect();
    vec![
        report("cap_shape_identity", bundle, &shape, t, "max |A − I|"),
        report("cap_hk", bundle, &hk, t, "max |H_k − 1|"),
        VerificationReport::new("cap_p_spread", spread, spread, t, desc, "max P − min P"),
        report("cap_p_value", bundle, &pv, t, format!("−c−θ₀ = {}", cap.p_value())),
    ]
}

/// Inputs for [`verify_bundle`].
#[derive(Debug, Clone)]
pub struct VerifyContext {
    pub c: f64,
    pub theta0: f64,
    pub cap: Option<HyperboloidCap>,
    pub tolerances: Tolerances,
}

impl VerifyContext {
    /// `c` and `θ₀` taken as the boundary means of `u` and `θ`.
    pub fn from_boundary(bundle: &CurvatureBundle, tolerances: Tolerances) -> Self {
        let grid = bundle.grid();
        let mean = |v: Vec<f64>| v.iter().sum::<f64>() / v.len() as f64;
        let theta: Vec<f64> = bundle.nodes().iter().map(|n| n.theta).collect();
        Self {
            c: mean(boundary_trace(grid, bundle.field().values())),
            theta0: mean(boundary_trace(grid, &theta)),
            cap: None,
            tolerances,
        }
    }
}

/// Every check, sorted by check name.
pub fn verify_bundle(bundle: &CurvatureBundle, ctx: &VerifyContext) -> Vec<VerificationReport> {
    let tol = &ctx.tolerances;
    let mut out = check_pointwise_identities(bundle, tol);
    out.push(check_theta_gradient(bundle, tol));
    out.push(check_weingarten(bundle, tol));
    out.push(check_divergence_free(bundle, tol));
    out.extend(check_integral_identity(bundle, ctx.c, ctx.theta0, tol));
    out.extend(check_p_function(bundle, tol));
    out.push(check_k_convexity(bundle));
    out.push(check_below_boundary(bundle, ctx.c));
    if let Some(cap) = &ctx.cap {
        out.extend(check_cap(bundle, cap, tol));
    }
    out.sort_by(|a, b| a.check.cmp(&b.check));
    out
}

pub fn all_pass(reports: &[VerificationReport]) -> bool {
    reports.iter().all(|r| r.pass)
}
