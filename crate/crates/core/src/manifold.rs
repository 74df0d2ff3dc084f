//! Metric models on a global chart of R^n (n = 2, 3).
//!
//! Every model in the catalog is conformal to the flat chart metric,
//! g = e^{2 phi} delta, with phi given in closed form together with its
//! gradient and hessian. Christoffel symbols and sectional curvature are
//! evaluated from those closed forms, never by finite differences.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Chart-domain margins keeping the metric coefficients finite for user
/// input; internal integrators are allowed to approach the boundary.
pub const HALF_PLANE_FLOOR: f64 = 1e-9;
pub const DISK_MARGIN: f64 = 1e-9;

/// A point of the global chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        let n = coords.len();
        if n < 2 || n > 3 {
            return Err(Error::DimensionMismatch { expected: 2, got: n });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("point has non-finite coordinates"));
        }
        Ok(Point { coords })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Euclidean chart distance, used for seeds and convergence checks.
    pub fn chart_dist(&self, other: &Point) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

impl From<[f64; 2]> for Point {
    fn from(c: [f64; 2]) -> Self {
        Point { coords: c.to_vec() }
    }
}

impl From<[f64; 3]> for Point {
    fn from(c: [f64; 3]) -> Self {
        Point { coords: c.to_vec() }
    }
}

/// A tangent vector in chart components at a base point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangentVector {
    pub base: Point,
    pub components: Vec<f64>,
}

impl TangentVector {
    pub fn new(base: Point, components: Vec<f64>) -> Result<Self> {
        if components.len() != base.dim() {
            return Err(Error::DimensionMismatch {
                expected: base.dim(),
                got: components.len(),
            });
        }
        if components.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("tangent components not finite"));
        }
        Ok(TangentVector { base, components })
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn negated(&self) -> TangentVector {
        TangentVector {
            base: self.base.clone(),
            components: self.components.iter().map(|c| -c).collect(),
        }
    }
}

/// Two independent tangent vectors spanning a 2-plane at a common base.
#[derive(Debug, Clone)]
pub struct TangentPlane {
    pub base: Point,
    pub span: [TangentVector; 2],
}

impl TangentPlane {
    pub fn new(u: TangentVector, v: TangentVector) -> Result<Self> {
        if u.base != v.base {
            return Err(Error::invalid("plane spans must share a base point"));
        }
        let base = u.base.clone();
        Ok(TangentPlane { base, span: [u, v] })
    }
}

/// Closed-form conformal factors phi for the `conformal` metric kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConformalField {
    /// phi = 0, the flat metric.
    Zero,
    /// phi = |p|^2; nonpositive curvature in 2D (K = -2n e^{-2 phi} <= 0).
    SumOfSquares,
    /// phi = -x_1^2; has K > 0 in 2D, used to exercise bound rejection.
    NegXSquared,
}

impl ConformalField {
    pub fn id(&self) -> &'static str {
        match self {
            ConformalField::Zero => "zero",
            ConformalField::SumOfSquares => "sum-of-squares",
            ConformalField::NegXSquared => "neg-x-squared",
        }
    }

    pub fn from_id(id: &str) -> Result<Self> {
        match id {
            "zero" => Ok(ConformalField::Zero),
            "sum-of-squares" => Ok(ConformalField::SumOfSquares),
            "neg-x-squared" => Ok(ConformalField::NegXSquared),
            other => Err(Error::invalid(format!("unknown conformal field {other:?}"))),
        }
    }

    fn value(&self, c: &[f64]) -> f64 {
        match self {
            ConformalField::Zero => 0.0,
            ConformalField::SumOfSquares => c.iter().map(|x| x * x).sum(),
            ConformalField::NegXSquared => -c[0] * c[0],
        }
    }

    fn gradient(&self, c: &[f64], out: &mut [f64; 3]) {
        *out = [0.0; 3];
        match self {
            ConformalField::Zero => {}
            ConformalField::SumOfSquares => {
                for (i, x) in c.iter().enumerate() {
                    out[i] = 2.0 * x;
                }
            }
            ConformalField::NegXSquared => out[0] = -2.0 * c[0],
        }
    }

    fn hessian(&self, c: &[f64], out: &mut [[f64; 3]; 3]) {
        *out = [[0.0; 3]; 3];
        match self {
            ConformalField::Zero => {}
            ConformalField::SumOfSquares => {
                for i in 0..c.len() {
                    out[i][i] = 2.0;
                }
            }
            ConformalField::NegXSquared => out[0][0] = -2.0,
        }
    }
}

/// Axis-aligned chart box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl Region {
    pub fn new(min: Vec<f64>, max: Vec<f64>) -> Result<Self> {
        if min.len() != max.len() {
            return Err(Error::DimensionMismatch {
                expected: min.len(),
                got: max.len(),
            });
        }
        if min.iter().zip(&max).any(|(a, b)| a >= b) {
            return Err(Error::invalid("region has empty extent on some axis"));
        }
        Ok(Region { min, max })
    }

    pub fn dim(&self) -> usize {
        self.min.len()
    }

    pub fn contains(&self, c: &[f64]) -> bool {
        c.iter()
            .zip(self.min.iter().zip(&self.max))
            .all(|(x, (lo, hi))| *x >= *lo && *x <= *hi)
    }

    /// Grid point i (0..counts per axis, row-major) with endpoints included.
    pub fn grid_point(&self, idx: &[usize], counts: &[usize]) -> Vec<f64> {
        idx.iter()
            .zip(counts)
            .zip(self.min.iter().zip(&self.max))
            .map(|((i, c), (lo, hi))| lo + (hi - lo) * (*i as f64) / ((*c - 1) as f64))
            .collect()
    }

    pub fn grid_indices(counts: &[usize]) -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for &c in counts {
            let mut next = Vec::with_capacity(out.len() * c);
            for base in &out {
                for i in 0..c {
                    let mut v = base.clone();
                    v.push(i);
                    next.push(v);
                }
            }
            out = next;
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport {
    pub k_min: f64,
    pub k_max: f64,
    pub all_in_bounds: bool,
    pub samples: usize,
}

/// A Riemannian metric on the global chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MetricModel {
    Euclidean { dim: usize },
    /// Upper half-space model, last coordinate positive, K = -1.
    HyperbolicHalfPlane { dim: usize },
    /// Poincare ball model, |x| < 1, K = -1.
    HyperbolicDisk { dim: usize },
    Conformal {
        dim: usize,
        field: ConformalField,
        /// Curvature bound: K is expected in [-k^2, 0].
        k: f64,
    },
}

impl MetricModel {
    pub fn euclidean(dim: usize) -> Self {
        MetricModel::Euclidean { dim }
    }

    pub fn half_plane() -> Self {
        MetricModel::HyperbolicHalfPlane { dim: 2 }
    }

    pub fn half_space() -> Self {
        MetricModel::HyperbolicHalfPlane { dim: 3 }
    }

    pub fn disk() -> Self {
        MetricModel::HyperbolicDisk { dim: 2 }
    }

    pub fn conformal(dim: usize, field: ConformalField, k: f64) -> Self {
        MetricModel::Conformal { dim, field, k }
    }

    /// Conformal model with k calibrated as sup sqrt(-K) over the grid.
    pub fn conformal_calibrated(
        dim: usize,
        field: ConformalField,
        region: &Region,
        grid: usize,
    ) -> Result<Self> {
        let mut model = MetricModel::Conformal { dim, field, k: 0.0 };
        let report = model.verify_curvature_bounds(region, grid)?;
        let k = (-report.k_min).max(0.0).sqrt();
        if let MetricModel::Conformal { k: kk, .. } = &mut model {
            *kk = k;
        }
        Ok(model)
    }

    pub fn dim(&self) -> usize {
        match self {
            MetricModel::Euclidean { dim }
            | MetricModel::HyperbolicHalfPlane { dim }
            | MetricModel::HyperbolicDisk { dim }
            | MetricModel::Conformal { dim, .. } => *dim,
        }
    }

    pub fn name(&self) -> String {
        match self {
            MetricModel::Euclidean { dim } => format!("euclidean-{dim}d"),
            MetricModel::HyperbolicHalfPlane { dim } => format!("half-plane-{dim}d"),
            MetricModel::HyperbolicDisk { dim } => format!("disk-{dim}d"),
            MetricModel::Conformal { dim, field, .. } => {
                format!("conformal-{}-{dim}d", field.id())
            }
        }
    }

    /// Curvature bound k of the standing hypothesis -k^2 <= K <= 0.
    pub fn curvature_bound(&self) -> f64 {
        match self {
            MetricModel::Euclidean { .. } => 0.0,
            MetricModel::HyperbolicHalfPlane { .. } | MetricModel::HyperbolicDisk { .. } => 1.0,
            MetricModel::Conformal { k, .. } => *k,
        }
    }

    /// Strict chart domain (metric coefficients finite and positive).
    pub fn in_chart_raw(&self, c: &[f64]) -> bool {
        if c.len() != self.dim() || c.iter().any(|x| !x.is_finite()) {
            return false;
        }
        match self {
            MetricModel::HyperbolicHalfPlane { dim } => c[*dim - 1] > 0.0,
            MetricModel::HyperbolicDisk { .. } => {
                c.iter().map(|x| x * x).sum::<f64>() < 1.0
            }
            _ => true,
        }
    }

    /// Chart domain with the safety margins applied to user input.
    pub fn in_chart(&self, c: &[f64]) -> bool {
        if c.len() != self.dim() || c.iter().any(|x| !x.is_finite()) {
            return false;
        }
        match self {
            MetricModel::HyperbolicHalfPlane { dim } => c[*dim - 1] >= HALF_PLANE_FLOOR,
            MetricModel::HyperbolicDisk { .. } => {
                c.iter().map(|x| x * x).sum::<f64>().sqrt() <= 1.0 - DISK_MARGIN
            }
            _ => true,
        }
    }

    pub fn check_point(&self, p: &Point) -> Result<()> {
        if self.in_chart(&p.coords) {
            Ok(())
        } else {
            Err(Error::ChartDomain {
                coords: p.coords.clone(),
                model: self.name(),
            })
        }
    }

    pub fn check_region(&self, region: &Region) -> Result<()> {
        if region.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: region.dim(),
            });
        }
        // A box is inside the chart iff all corners are.
        let corners = Region::grid_indices(&vec![2; region.dim()]);
        for corner in corners {
            let c = region.grid_point(&corner, &vec![2; region.dim()]);
            if !self.in_chart(&c) {
                return Err(Error::ChartDomain {
                    coords: c,
                    model: self.name(),
                });
            }
        }
        Ok(())
    }

    /// Conformal exponent phi at chart coordinates (g = e^{2 phi} delta).
    pub fn phi(&self, c: &[f64]) -> f64 {
        match self {
            MetricModel::Euclidean { .. } => 0.0,
            MetricModel::HyperbolicHalfPlane { dim } => -c[*dim - 1].ln(),
            MetricModel::HyperbolicDisk { .. } => {
                let r2: f64 = c.iter().map(|x| x * x).sum();
                std::f64::consts::LN_2 - (1.0 - r2).ln()
            }
            MetricModel::Conformal { field, .. } => field.value(c),
        }
    }

    pub fn grad_phi(&self, c: &[f64]) -> [f64; 3] {
        let mut g = [0.0; 3];
        match self {
            MetricModel::Euclidean { .. } => {}
            MetricModel::HyperbolicHalfPlane { dim } => g[*dim - 1] = -1.0 / c[*dim - 1],
            MetricModel::HyperbolicDisk { .. } => {
                let r2: f64 = c.iter().map(|x| x * x).sum();
                let s = 1.0 - r2;
                for (i, x) in c.iter().enumerate() {
                    g[i] = 2.0 * x / s;
                }
            }
            MetricModel::Conformal { field, .. } => field.gradient(c, &mut g),
        }
        g
    }

    pub fn hess_phi(&self, c: &[f64]) -> [[f64; 3]; 3] {
        let mut h = [[0.0; 3]; 3];
        match self {
            MetricModel::Euclidean { .. } => {}
            MetricModel::HyperbolicHalfPlane { dim } => {
                let y = c[*dim - 1];
                h[*dim - 1][*dim - 1] = 1.0 / (y * y);
            }
            MetricModel::HyperbolicDisk { .. } => {
                let r2: f64 = c.iter().map(|x| x * x).sum();
                let s = 1.0 - r2;
                for i in 0..c.len() {
                    for j in 0..c.len() {
                        h[i][j] = 4.0 * c[i] * c[j] / (s * s);
                        if i == j {
                            h[i][j] += 2.0 / s;
                        }
                    }
                }
            }
            MetricModel::Conformal { field, .. } => field.hessian(c, &mut h),
        }
        h
    }

    /// Conformal scale e^{phi}; riemannian norms are scale * euclidean norm.
    pub fn scale(&self, c: &[f64]) -> f64 {
        self.phi(c).exp()
    }

    pub fn metric_tensor(&self, p: &Point) -> Result<DMatrix<f64>> {
        self.check_point(p)?;
        let n = self.dim();
        let factor = (2.0 * self.phi(&p.coords)).exp();
        Ok(DMatrix::identity(n, n) * factor)
    }

    pub fn inverse_metric(&self, p: &Point) -> Result<DMatrix<f64>> {
        self.check_point(p)?;
        let n = self.dim();
        let factor = (-2.0 * self.phi(&p.coords)).exp();
        Ok(DMatrix::identity(n, n) * factor)
    }

    pub fn inner(&self, base: &[f64], a: &[f64], b: &[f64]) -> f64 {
        let factor = (2.0 * self.phi(base)).exp();
        factor * a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>()
    }

    pub fn norm(&self, v: &TangentVector) -> f64 {
        self.norm_at(&v.base.coords, &v.components)
    }

    pub fn norm_at(&self, base: &[f64], components: &[f64]) -> f64 {
        self.scale(base) * components.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Christoffel symbols Gamma^k_ij on raw coordinates; symmetric in (i, j)
    /// by construction.
    pub fn christoffel_raw(&self, c: &[f64]) -> [[[f64; 3]; 3]; 3] {
        let n = self.dim();
        let g = self.grad_phi(c);
        let mut gamma = [[[0.0; 3]; 3]; 3];
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut v = 0.0;
                    if k == i {
                        v += g[j];
                    }
                    if k == j {
                        v += g[i];
                    }
                    if i == j {
                        v -= g[k];
                    }
                    gamma[k][i][j] = v;
                }
            }
        }
        gamma
    }

    pub fn christoffel(&self, p: &Point) -> Result<[[[f64; 3]; 3]; 3]> {
        self.check_point(p)?;
        Ok(self.christoffel_raw(&p.coords))
    }

    /// Sectional curvature of the plane euclid-orthonormalized from the span.
    ///
    /// For g = e^{2 phi} delta and a euclid-orthonormal pair (e, f):
    /// K = -e^{-2 phi} (H(e,e) + H(f,f) - (grad.e)^2 - (grad.f)^2 + |grad|^2).
    pub fn sectional_curvature(&self, plane: &TangentPlane) -> Result<f64> {
        self.check_point(&plane.base)?;
        let n = self.dim();
        let c = &plane.base.coords;
        let u = &plane.span[0].components;
        let v = &plane.span[1].components;

        // Euclidean Gram-Schmidt; curvature does not depend on the basis
        // and a conformal metric preserves euclidean angles.
        let nu: f64 = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nu < 1e-12 {
            return Err(Error::DegenerateSpan { det: 0.0 });
        }
        let e: Vec<f64> = u.iter().map(|x| x / nu).collect();
        let proj: f64 = v.iter().zip(&e).map(|(a, b)| a * b).sum();
        let mut f: Vec<f64> = v.iter().zip(&e).map(|(a, b)| a - proj * b).collect();
        let nf: f64 = f.iter().map(|x| x * x).sum::<f64>().sqrt();
        let gram_det = (nu * nf).powi(2);
        if nf < 1e-8 || gram_det < 1e-12 {
            return Err(Error::DegenerateSpan { det: gram_det });
        }
        for x in &mut f {
            *x /= nf;
        }

        let grad = self.grad_phi(c);
        let hess = self.hess_phi(c);
        let quad = |a: &[f64]| -> f64 {
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    s += hess[i][j] * a[i] * a[j];
                }
            }
            s
        };
        let dot_grad = |a: &[f64]| -> f64 { a.iter().zip(&grad).map(|(x, g)| x * g).sum() };
        let grad_sq: f64 = grad[..n].iter().map(|x| x * x).sum();
        let bracket = quad(&e) + quad(&f) - dot_grad(&e).powi(2) - dot_grad(&f).powi(2) + grad_sq;
        Ok(-(-2.0 * self.phi(c)).exp() * bracket)
    }

    /// Samples sectional curvature over a chart box and checks the standing
    /// bound -k^2 <= K <= 0 within 1e-6.
    pub fn verify_curvature_bounds(&self, region: &Region, grid: usize) -> Result<CurvatureReport> {
        self.check_region(region)?;
        if grid < 2 {
            return Err(Error::invalid("grid must be >= 2 per axis"));
        }
        let n = self.dim();
        let counts = vec![grid; n];
        let mut k_min = f64::INFINITY;
        let mut k_max = f64::NEG_INFINITY;
        let mut samples = 0usize;
        let mut rng = ChaCha8Rng::seed_from_u64(0x5ec7);

        for idx in Region::grid_indices(&counts) {
            let c = region.grid_point(&idx, &counts);
            let base = Point::new(c)?;
            let mut planes: Vec<[Vec<f64>; 2]> = Vec::new();
            if n == 2 {
                planes.push([vec![1.0, 0.0], vec![0.0, 1.0]]);
            } else {
                planes.push([vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]);
                planes.push([vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]]);
                planes.push([vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]);
                // one random plane per grid point, fixed seed
                loop {
                    let a: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    let b: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    let cross = [
                        a[1] * b[2] - a[2] * b[1],
                        a[2] * b[0] - a[0] * b[2],
                        a[0] * b[1] - a[1] * b[0],
                    ];
                    if cross.iter().map(|x| x * x).sum::<f64>() > 1e-3 {
                        planes.push([a, b]);
                        break;
                    }
                }
            }
            for [a, b] in planes {
                let plane = TangentPlane::new(
                    TangentVector::new(base.clone(), a)?,
                    TangentVector::new(base.clone(), b)?,
                )?;
                let k = self.sectional_curvature(&plane)?;
                k_min = k_min.min(k);
                k_max = k_max.max(k);
                samples += 1;
            }
        }

        let bound = self.curvature_bound();
        let all_in_bounds = k_min >= -bound * bound - 1e-6 && k_max <= 1e-6;
        Ok(CurvatureReport {
            k_min,
            k_max,
            all_in_bounds,
            samples,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    fn plane(model: &MetricModel, base: Point, a: Vec<f64>, b: Vec<f64>) -> TangentPlane {
        let _ = model;
        TangentPlane::new(
            TangentVector::new(base.clone(), a).unwrap(),
            TangentVector::new(base, b).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn euclidean_metric_is_identity() {
        let m = MetricModel::euclidean(2);
        let g = m.metric_tensor(&Point::from([3.0, 4.0])).unwrap();
        assert_eq!(g, DMatrix::identity(2, 2));
    }

    #[test]
    fn half_plane_metric_closed_form() {
        let m = MetricModel::half_plane();
        let g = m.metric_tensor(&Point::from([0.0, 2.0])).unwrap();
        assert_abs_diff_eq!(g[(0, 0)], 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(g[(1, 1)], 0.25, epsilon = 1e-15);
        assert_eq!(g[(0, 1)], 0.0);
    }

    #[test]
    fn conformal_zero_is_flat() {
        let m = MetricModel::conformal(2, ConformalField::Zero, 0.0);
        let g = m.metric_tensor(&Point::from([1.0, 1.0])).unwrap();
        assert_eq!(g, DMatrix::identity(2, 2));
        let gamma = m.christoffel(&Point::from([0.3, -0.7])).unwrap();
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    assert_eq!(gamma[k][i][j], 0.0);
                }
            }
        }
    }

    #[test]
    fn half_plane_christoffels_at_unit_height() {
        let m = MetricModel::half_plane();
        let g = m.christoffel(&Point::from([0.0, 1.0])).unwrap();
        assert_abs_diff_eq!(g[0][0][1], -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g[0][1][0], -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g[1][0][0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g[1][1][1], -1.0, epsilon = 1e-15);
        assert_eq!(g[0][0][0], 0.0);
        assert_eq!(g[1][0][1], 0.0);
        assert_eq!(g[1][1][0], 0.0);
        assert_eq!(g[0][1][1], 0.0);
    }

    #[test]
    fn chart_domain_violations_are_reported() {
        let m = MetricModel::half_plane();
        assert!(m.metric_tensor(&Point::from([0.0, 0.0])).is_err());
        assert!(m.metric_tensor(&Point::from([0.0, -1.0])).is_err());
        let d = MetricModel::disk();
        assert!(d.metric_tensor(&Point::from([1.0, 0.5])).is_err());
    }

    #[test]
    fn curvature_constants() {
        let e = MetricModel::euclidean(2);
        let pl = plane(&e, Point::from([0.4, -2.0]), vec![1.0, 0.0], vec![0.0, 1.0]);
        assert_abs_diff_eq!(e.sectional_curvature(&pl).unwrap(), 0.0, epsilon = 1e-15);

        let h = MetricModel::half_plane();
        let pl = plane(&h, Point::from([0.0, 1.0]), vec![1.0, 0.0], vec![0.0, 1.0]);
        assert_abs_diff_eq!(h.sectional_curvature(&pl).unwrap(), -1.0, epsilon = 1e-12);
    }

    #[test]
    fn conformal_sum_of_squares_curvature_closed_form() {
        // K = -e^{-2 phi} * laplacian(phi), laplacian = 4 in 2D
        let m = MetricModel::conformal(2, ConformalField::SumOfSquares, 3.0);
        for c in [[0.0, 0.0], [0.5, -0.3], [0.2, 0.9]] {
            let p = Point::from(c);
            let phi: f64 = c.iter().map(|x| x * x).sum();
            let pl = plane(&m, p, vec![1.0, 0.0], vec![0.0, 1.0]);
            let expect = -4.0 * (-2.0 * phi).exp();
            assert_abs_diff_eq!(m.sectional_curvature(&pl).unwrap(), expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn hyperbolic_constancy_at_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = MetricModel::half_plane();
        let d = MetricModel::disk();
        for _ in 0..200 {
            let p = Point::from([rng.gen_range(-3.0..3.0), rng.gen_range(0.05..4.0)]);
            let pl = plane(&h, p, vec![1.0, 0.0], vec![0.0, 1.0]);
            assert_abs_diff_eq!(h.sectional_curvature(&pl).unwrap(), -1.0, epsilon = 1e-9);

            let r = rng.gen_range(0.0..0.95);
            let th: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let p = Point::from([r * th.cos(), r * th.sin()]);
            let pl = plane(&d, p, vec![1.0, 0.0], vec![0.0, 1.0]);
            assert_abs_diff_eq!(d.sectional_curvature(&pl).unwrap(), -1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn sectional_curvature_is_basis_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = MetricModel::half_space();
        for _ in 0..50 {
            let p = Point::from([
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(0.2..3.0),
            ]);
            let a: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let b: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let cross: f64 = {
                let c = [
                    a[1] * b[2] - a[2] * b[1],
                    a[2] * b[0] - a[0] * b[2],
                    a[0] * b[1] - a[1] * b[0],
                ];
                c.iter().map(|x| x * x).sum()
            };
            if cross < 1e-2 {
                continue;
            }
            let k1 = m
                .sectional_curvature(&plane(&m, p.clone(), a.clone(), b.clone()))
                .unwrap();
            // same plane, different basis
            let a2: Vec<f64> = (0..3).map(|i| 2.0 * a[i] - 0.7 * b[i]).collect();
            let b2: Vec<f64> = (0..3).map(|i| 0.3 * a[i] + 1.1 * b[i]).collect();
            let k2 = m.sectional_curvature(&plane(&m, p, a2, b2)).unwrap();
            assert_abs_diff_eq!(k1, k2, epsilon = 1e-9);
        }
    }

    #[test]
    fn degenerate_span_is_rejected() {
        let m = MetricModel::euclidean(2);
        let p = Point::from([0.0, 0.0]);
        let pl = plane(&m, p, vec![1.0, 2.0], vec![2.0, 4.0]);
        assert!(matches!(
            m.sectional_curvature(&pl),
            Err(Error::DegenerateSpan { .. })
        ));
    }

    #[test]
    fn metric_symmetry_at_seeded_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let models = [
            MetricModel::euclidean(2),
            MetricModel::half_plane(),
            MetricModel::disk(),
            MetricModel::conformal(2, ConformalField::SumOfSquares, 3.0),
        ];
        for m in &models {
            for _ in 0..1000 {
                let c = match m {
                    MetricModel::HyperbolicDisk { .. } => {
                        let r = rng.gen_range(0.0..0.9);
                        let t: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                        vec![r * t.cos(), r * t.sin()]
                    }
                    MetricModel::HyperbolicHalfPlane { .. } => {
                        vec![rng.gen_range(-3.0..3.0), rng.gen_range(0.05..4.0)]
                    }
                    _ => vec![rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)],
                };
                let g = m.metric_tensor(&Point::new(c).unwrap()).unwrap();
                let sym = (&g - g.transpose()).norm();
                assert_eq!(sym, 0.0);
            }
        }
    }

    /// Independent oracle: Gamma^k_ij = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij)
    /// with central finite differences of the metric tensor.
    fn christoffel_fd(m: &MetricModel, c: &[f64]) -> Vec<f64> {
        let n = c.len();
        let h = 1e-5;
        let g_at = |c: &[f64]| -> Vec<Vec<f64>> {
            let f = (2.0 * m.phi(c)).exp();
            (0..n)
                .map(|i| (0..n).map(|j| if i == j { f } else { 0.0 }).collect())
                .collect()
        };
        let mut dg = vec![vec![vec![0.0; n]; n]; n]; // dg[l][i][j] = d_l g_ij
        for l in 0..n {
            let mut cp = c.to_vec();
            let mut cm = c.to_vec();
            cp[l] += h;
            cm[l] -= h;
            let gp = g_at(&cp);
            let gm = g_at(&cm);
            for i in 0..n {
                for j in 0..n {
                    dg[l][i][j] = (gp[i][j] - gm[i][j]) / (2.0 * h);
                }
            }
        }
        let ginv_f = (-2.0 * m.phi(c)).exp();
        let mut out = vec![0.0; n * n * n];
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    // diagonal inverse metric
                    out[(k * n + i) * n + j] =
                        0.5 * ginv_f * (dg[i][j][k] + dg[j][i][k] - dg[k][i][j]);
                }
            }
        }
        out
    }

    #[test]
    fn christoffels_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let models = [
            MetricModel::euclidean(2),
            MetricModel::half_plane(),
            MetricModel::half_space(),
            MetricModel::disk(),
            MetricModel::conformal(2, ConformalField::SumOfSquares, 3.0),
            MetricModel::conformal(3, ConformalField::NegXSquared, 0.0),
        ];
        for m in &models {
            let n = m.dim();
            for _ in 0..40 {
                let c: Vec<f64> = match m {
                    MetricModel::HyperbolicDisk { .. } => {
                        vec![rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)]
                    }
                    MetricModel::HyperbolicHalfPlane { .. } => {
                        let mut v: Vec<f64> =
                            (0..n - 1).map(|_| rng.gen_range(-2.0..2.0)).collect();
                        v.push(rng.gen_range(0.3..3.0));
                        v
                    }
                    _ => (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
                };
                let gamma = m.christoffel_raw(&c);
                let fd = christoffel_fd(m, &c);
                for k in 0..n {
                    for i in 0..n {
                        for j in 0..n {
                            assert_abs_diff_eq!(
                                gamma[k][i][j],
                                fd[(k * n + i) * n + j],
                                epsilon = 1e-6
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn verify_bounds_euclidean_and_hyperbolic() {
        let e = MetricModel::euclidean(2);
        let r = Region::new(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
        let rep = e.verify_curvature_bounds(&r, 4).unwrap();
        assert_eq!(rep.k_min, 0.0);
        assert_eq!(rep.k_max, 0.0);
        assert!(rep.all_in_bounds);

        let h = MetricModel::half_plane();
        let r = Region::new(vec![-1.0, 0.5], vec![1.0, 2.0]).unwrap();
        let rep = h.verify_curvature_bounds(&r, 5).unwrap();
        assert_abs_diff_eq!(rep.k_min, -1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(rep.k_max, -1.0, epsilon = 1e-9);
        assert!(rep.all_in_bounds);
    }

    #[test]
    fn positive_curvature_field_is_rejected() {
        // phi = -x^2 has laplacian -2, hence K > 0 somewhere
        let m = MetricModel::conformal(2, ConformalField::NegXSquared, 1.0);
        let r = Region::new(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
        let rep = m.verify_curvature_bounds(&r, 5).unwrap();
        assert!(!rep.all_in_bounds);
        assert!(rep.k_max > 0.0);
    }

    #[test]
    fn half_space_bounds_with_random_planes() {
        let h = MetricModel::half_space();
        let r = Region::new(vec![-1.0, -1.0, 0.5], vec![1.0, 1.0, 2.0]).unwrap();
        let rep = h.verify_curvature_bounds(&r, 3).unwrap();
        assert!(rep.all_in_bounds);
        assert_abs_diff_eq!(rep.k_min, -1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(rep.k_max, -1.0, epsilon = 1e-9);
        // three coordinate planes + one random per grid point
        assert_eq!(rep.samples, 27 * 4);
    }

    #[test]
    fn region_outside_chart_is_rejected() {
        let h = MetricModel::half_plane();
        let r = Region::new(vec![-1.0, -0.5], vec![1.0, 2.0]).unwrap();
        assert!(h.verify_curvature_bounds(&r, 4).is_err());
    }

    #[test]
    fn conformal_calibration_sets_bound() {
        let r = Region::new(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
        let m =
            MetricModel::conformal_calibrated(2, ConformalField::SumOfSquares, &r, 6).unwrap();
        // |K| is maximal at the origin where K = -4
        assert!((m.curvature_bound() - 2.0).abs() < 0.2);
    }
}
