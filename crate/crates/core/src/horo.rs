//! Busemann functions and horoballs.
//!
//! A Busemann functional is attached to a unit-speed geodesic ray and
//! normalized to vanish at the ray's base. Horoballs are its open sublevel
//! sets; horospheres its level sets. The constant-curvature models get
//! closed forms through the ideal endpoint of the ray; everything else goes
//! through the truncated limit B(x) = lim_T d(x, gamma(T)) - T.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geodesy::{self, exp_ivp, UnitTangent};
use crate::manifold::{MetricModel, Point, TangentPlane, TangentVector};

/// Default truncation schedule.
pub const BUSEMANN_T0: f64 = 8.0;
pub const BUSEMANN_T_MAX: f64 = 64.0;
pub const BUSEMANN_TOL: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum EvalMode {
    /// Truncated limit with doubling horizon and Cauchy stopping.
    Numeric { t0: f64, t_max: f64, tol: f64 },
    /// Exact formula through the ideal endpoint (model spaces only).
    ClosedForm,
}

impl EvalMode {
    pub fn default_numeric() -> Self {
        EvalMode::Numeric {
            t0: BUSEMANN_T0,
            t_max: BUSEMANN_T_MAX,
            tol: BUSEMANN_TOL,
        }
    }
}

/// Busemann function of the forward ray of `ray`, normalized so that the
/// value at the ray's base is zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BusemannFunctional {
    pub ray: UnitTangent,
    pub mode: EvalMode,
}

/// Value with its achieved truncation gap (zero for closed forms).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BusemannValue {
    pub value: f64,
    pub gap: f64,
}

impl BusemannFunctional {
    /// Closed-form evaluation for model spaces, numeric otherwise.
    pub fn for_model(model: &MetricModel, ray: UnitTangent) -> Self {
        let mode = match model {
            MetricModel::Conformal { .. } => EvalMode::default_numeric(),
            _ => EvalMode::ClosedForm,
        };
        BusemannFunctional { ray, mode }
    }

    pub fn numeric(ray: UnitTangent) -> Self {
        BusemannFunctional {
            ray,
            mode: EvalMode::default_numeric(),
        }
    }

    pub fn base(&self) -> &Point {
        self.ray.base()
    }

    /// Evaluates with the functional's own mode.
    pub fn evaluate(&self, model: &MetricModel, x: &Point) -> Result<BusemannValue> {
        match self.mode {
            EvalMode::ClosedForm => Ok(BusemannValue {
                value: busemann_closed_form(model, self, x)?,
                gap: 0.0,
            }),
            EvalMode::Numeric { t0, t_max, tol } => {
                busemann_numeric_with(model, self, x, t0, t_max, tol)
            }
        }
    }
}

/// Truncated Busemann value with the default schedule.
pub fn busemann_numeric(
    model: &MetricModel,
    f: &BusemannFunctional,
    x: &Point,
) -> Result<BusemannValue> {
    busemann_numeric_with(model, f, x, BUSEMANN_T0, BUSEMANN_T_MAX, BUSEMANN_TOL)
}

/// B(x) = lim_T [d(x, gamma(T)) - T] over T = t0, 2 t0, ... up to t_max.
///
/// The raw sequence converges geometrically in negative curvature; in the
/// flat directions it decays only like 1/T, so when the Cauchy test fails
/// at t_max the 1/T Richardson/Neville extrapolant of the collected values
/// is returned with a conservative gap estimate.
pub fn busemann_numeric_with(
    model: &MetricModel,
    f: &BusemannFunctional,
    x: &Point,
    t0: f64,
    t_max: f64,
    tol: f64,
) -> Result<BusemannValue> {
    model.check_point(x)?;
    let mut nodes: Vec<(f64, f64)> = Vec::new(); // (1/T, b_T)
    let mut t = t0;
    let mut raw_gap = f64::INFINITY;
    while t <= t_max * (1.0 + 1e-9) {
        let gamma_t = ray_point(model, &f.ray, t)?;
        let b = match geodesy::fast_distance(model, x, &gamma_t) {
            Ok(d) => d - t,
            // conformal distances are capped; extrapolate what we have
            Err(Error::DistanceCap { .. }) if nodes.len() >= 3 => break,
            Err(e) => return Err(e),
        };
        // Cauchy gap across a full doubling of the horizon
        if nodes.len() >= 2 {
            raw_gap = (b - nodes[nodes.len() - 2].1).abs();
        }
        nodes.push((1.0 / t, b));
        if raw_gap < tol {
            return Ok(BusemannValue {
                value: b,
                gap: raw_gap,
            });
        }
        t *= std::f64::consts::SQRT_2;
    }
    if nodes.len() < 3 {
        return Err(Error::BusemannTruncation { gap: raw_gap });
    }
    // Neville tableau evaluated at 1/T = 0.
    let n = nodes.len();
    let hs: Vec<f64> = nodes.iter().map(|(h, _)| *h).collect();
    let mut col: Vec<f64> = nodes.iter().map(|(_, b)| *b).collect();
    let mut diag = vec![col[0]];
    for level in 1..n {
        for i in 0..n - level {
            col[i] = (hs[i] * col[i + 1] - hs[i + level] * col[i]) / (hs[i] - hs[i + level]);
        }
        diag.push(col[0]);
    }
    let value = diag[n - 1];
    let extrap_gap = (diag[n - 1] - diag[n - 2]).abs();
    let gap = raw_gap.min(extrap_gap);
    if gap > 0.1 {
        return Err(Error::BusemannTruncation { gap });
    }
    Ok(BusemannValue { value, gap })
}

/// Point at arc length t along the ray. Model spaces use the closed-form
/// exponential (deep truncation horizons sit far beyond the relative
/// accuracy of chart integration); conformal metrics integrate in bounded
/// hops so the per-call geodesic budget is respected.
fn ray_point(model: &MetricModel, ray: &UnitTangent, t: f64) -> Result<Point> {
    let n = model.dim();
    let p = &ray.base().coords;
    let w = &ray.vector().components;
    match model {
        MetricModel::Euclidean { .. } => {
            Ok(Point {
                coords: (0..n).map(|i| p[i] + t * w[i]).collect(),
            })
        }
        MetricModel::HyperbolicHalfPlane { .. } => {
            let wh_norm: f64 = w[..n - 1].iter().map(|a| a * a).sum::<f64>().sqrt();
            let y = p[n - 1];
            if wh_norm < 1e-12 * w[n - 1].abs().max(1e-300) {
                let mut c = p.clone();
                let s = if w[n - 1] > 0.0 { t } else { -t };
                c[n - 1] = y * s.exp();
                return Ok(Point { coords: c });
            }
            // semicircle in the vertical plane of the ray
            let m = y * w[n - 1] / wh_norm;
            let r = (m * m + y * y).sqrt();
            let th1 = y.atan2(-m);
            // arc length grows with ln tan(theta/2) in the +theta direction;
            // moving toward +u means theta decreasing
            let sigma = -1.0;
            let tan_half = (th1 / 2.0).tan() * (sigma * t).exp();
            let th = 2.0 * tan_half.atan();
            let u = m + r * th.cos();
            let yy = r * th.sin();
            let mut c: Vec<f64> = (0..n - 1).map(|i| p[i] + u * w[i] / wh_norm).collect();
            c.push(yy.max(f64::MIN_POSITIVE));
            Ok(Point { coords: c })
        }
        MetricModel::HyperbolicDisk { .. } => {
            let nw: f64 = w.iter().map(|a| a * a).sum::<f64>().sqrt();
            let step: Vec<f64> = w.iter().map(|a| (t / 2.0).tanh() * a / nw).collect();
            let mut c = geodesy::closed_form::mobius_add(p, &step);
            let r: f64 = c.iter().map(|a| a * a).sum::<f64>().sqrt();
            if r >= 1.0 {
                let shrink = (1.0 - 1e-16) / r;
                for a in &mut c {
                    *a *= shrink;
                }
            }
            Ok(Point { coords: c })
        }
        MetricModel::Conformal { .. } => {
            let mut v = ray.vector().clone();
            let mut remaining = t;
            loop {
                let hop = remaining.min(32.0);
                let (p, vel) = exp_ivp(model, &v, hop)?;
                remaining -= hop;
                if remaining <= 0.0 {
                    return Ok(p);
                }
                v = vel;
            }
        }
    }
}

/// Ideal boundary data of a model-space ray.
#[derive(Debug, Clone, PartialEq)]
pub enum IdealPoint {
    /// Euclidean direction at infinity (euclidean unit vector).
    Direction(Vec<f64>),
    /// Half-space boundary point (coordinates in the boundary hyperplane).
    Boundary(Vec<f64>),
    /// The point at infinity of the half-space model (vertical rays).
    Infinity,
    /// Point of the unit sphere (ball model).
    Sphere(Vec<f64>),
}

/// Forward ideal endpoint of the ray in a model space.
pub fn ideal_point(model: &MetricModel, ray: &UnitTangent) -> Result<IdealPoint> {
    let p = &ray.base().coords;
    let w = &ray.vector().components;
    let n = model.dim();
    match model {
        MetricModel::Euclidean { .. } => {
            let norm: f64 = w.iter().map(|a| a * a).sum::<f64>().sqrt();
            Ok(IdealPoint::Direction(w.iter().map(|a| a / norm).collect()))
        }
        MetricModel::HyperbolicHalfPlane { .. } => {
            let wh_norm: f64 = w[..n - 1].iter().map(|a| a * a).sum::<f64>().sqrt();
            let y = p[n - 1];
            if wh_norm < 1e-12 * w[n - 1].abs().max(1e-300) {
                if w[n - 1] > 0.0 {
                    return Ok(IdealPoint::Infinity);
                }
                return Ok(IdealPoint::Boundary(p[..n - 1].to_vec()));
            }
            // semicircle in the vertical plane through the ray
            let m = y * w[n - 1] / wh_norm;
            let r = (m * m + y * y).sqrt();
            let xi_u = m + r;
            let xi: Vec<f64> = (0..n - 1)
                .map(|i| p[i] + xi_u * w[i] / wh_norm)
                .collect();
            Ok(IdealPoint::Boundary(xi))
        }
        MetricModel::HyperbolicDisk { .. } => Ok(IdealPoint::Sphere(
            geodesy::closed_form::ball_ideal_point(p, w),
        )),
        MetricModel::Conformal { .. } => Err(Error::invalid(
            "no closed-form ideal point for conformal metrics",
        )),
    }
}

/// Exact Busemann formula for the model spaces.
pub fn busemann_closed_form(
    model: &MetricModel,
    f: &BusemannFunctional,
    x: &Point,
) -> Result<f64> {
    let p = &f.base().coords;
    let c = &x.coords;
    let n = model.dim();
    match ideal_point(model, &f.ray)? {
        IdealPoint::Direction(u) => {
            Ok(-(0..n).map(|i| (c[i] - p[i]) * u[i]).sum::<f64>())
        }
        IdealPoint::Infinity => Ok(p[n - 1].ln() - c[n - 1].ln()),
        IdealPoint::Boundary(xi) => {
            let q2 = |a: &[f64]| -> f64 {
                let mut s = 0.0;
                for i in 0..n - 1 {
                    s += (a[i] - xi[i]) * (a[i] - xi[i]);
                }
                s + a[n - 1] * a[n - 1]
            };
            Ok((q2(c) / c[n - 1]).ln() - (q2(p) / p[n - 1]).ln())
        }
        IdealPoint::Sphere(xi) => {
            let q2 = |a: &[f64]| -> f64 {
                let dif: f64 = a
                    .iter()
                    .zip(&xi)
                    .map(|(ai, xii)| (ai - xii) * (ai - xii))
                    .sum();
                let r2: f64 = a.iter().map(|ai| ai * ai).sum();
                dif / (1.0 - r2)
            };
            Ok(q2(c).ln() - q2(p).ln())
        }
    }
}

/// Best-available Busemann value: closed form where exact, numeric else.
pub fn busemann_value(
    model: &MetricModel,
    f: &BusemannFunctional,
    x: &Point,
) -> Result<BusemannValue> {
    f.evaluate(model, x)
}

/// An open or closed sublevel set {B < level} / {B <= level}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoroballSpec {
    pub functional: BusemannFunctional,
    pub level: f64,
    pub open: bool,
}

impl HoroballSpec {
    /// Signed defect: negative strictly inside the horoball.
    pub fn defect(&self, model: &MetricModel, x: &Point) -> Result<f64> {
        Ok(self.functional.evaluate(model, x)?.value - self.level)
    }

    pub fn contains(&self, model: &MetricModel, x: &Point) -> Result<bool> {
        let d = self.defect(model, x)?;
        if self.open {
            Ok(d < 0.0)
        } else {
            Ok(d <= 0.0)
        }
    }
}

/// Open horoball of the forward ray of v, boundary through v's base.
pub fn stable_horoball(model: &MetricModel, v: &UnitTangent) -> HoroballSpec {
    HoroballSpec {
        functional: BusemannFunctional::for_model(model, v.clone()),
        level: 0.0,
        open: true,
    }
}

/// Open horoball of the backward ray of v, boundary through v's base.
pub fn unstable_horoball(model: &MetricModel, v: &UnitTangent) -> HoroballSpec {
    let reversed = UnitTangent::negated(model, v);
    HoroballSpec {
        functional: BusemannFunctional::for_model(model, reversed),
        level: 0.0,
        open: true,
    }
}

/// Horosphere through the plane's base whose defining ray is the metric
/// unit normal of the plane (n = 3 only); its tangent space at the base is
/// the plane itself.
pub fn tangent_horosphere(
    model: &MetricModel,
    plane: &TangentPlane,
    normal_sign: f64,
) -> Result<HoroballSpec> {
    if model.dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: model.dim(),
        });
    }
    model.check_point(&plane.base)?;
    let a = &plane.span[0].components;
    let b = &plane.span[1].components;
    // conformal metrics preserve euclidean orthogonality, so the euclidean
    // cross product gives the metric normal direction
    let cross = [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ];
    let norm: f64 = cross.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm < 1e-12 {
        return Err(Error::DegenerateSpan { det: norm });
    }
    let dir: Vec<f64> = cross.iter().map(|x| normal_sign.signum() * x / norm).collect();
    let w = UnitTangent::normalize(
        model,
        TangentVector::new(plane.base.clone(), dir)?,
    )?;
    Ok(HoroballSpec {
        functional: BusemannFunctional::for_model(model, w),
        level: 0.0,
        open: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit_up_at(model: &MetricModel, x: f64, y: f64) -> UnitTangent {
        UnitTangent::normalize(
            model,
            TangentVector::new(Point::from([x, y]), vec![0.0, 1.0]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn busemann_vanishes_at_base() {
        let m = MetricModel::half_plane();
        let f = BusemannFunctional::for_model(&m, unit_up_at(&m, 0.3, 1.7));
        let v = f.evaluate(&m, &Point::from([0.3, 1.7])).unwrap();
        assert_abs_diff_eq!(v.value, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn half_plane_vertical_ray_closed_form() {
        let m = MetricModel::half_plane();
        let f = BusemannFunctional::for_model(&m, unit_up_at(&m, 0.0, 1.0));
        let v = busemann_closed_form(&m, &f, &Point::from([0.0, 2.0])).unwrap();
        assert_abs_diff_eq!(v, -std::f64::consts::LN_2, epsilon = 1e-12);
        let v = busemann_closed_form(&m, &f, &Point::from([0.0, 4.0])).unwrap();
        assert_abs_diff_eq!(v, -(4.0f64).ln(), epsilon = 1e-12);
    }

    #[test]
    fn euclidean_busemann_is_linear() {
        let m = MetricModel::euclidean(2);
        let ray = UnitTangent::normalize(
            &m,
            TangentVector::new(Point::from([0.0, 0.0]), vec![1.0, 0.0]).unwrap(),
        )
        .unwrap();
        let f = BusemannFunctional::for_model(&m, ray);
        let v = busemann_closed_form(&m, &f, &Point::from([3.0, 4.0])).unwrap();
        assert_abs_diff_eq!(v, -3.0, epsilon = 1e-12);
    }

    #[test]
    fn disk_closed_form_examples() {
        let m = MetricModel::disk();
        // ray from the origin toward (1, 0)
        let ray = UnitTangent::normalize(
            &m,
            TangentVector::new(Point::from([0.0, 0.0]), vec![1.0, 0.0]).unwrap(),
        )
        .unwrap();
        let f = BusemannFunctional::for_model(&m, ray);
        let v0 = busemann_closed_form(&m, &f, &Point::from([0.0, 0.0])).unwrap();
        assert_abs_diff_eq!(v0, 0.0, epsilon = 1e-12);
        let v = busemann_closed_form(&m, &f, &Point::from([0.5, 0.0])).unwrap();
        assert_abs_diff_eq!(v, -(3.0f64).ln(), epsilon = 1e-12);
    }

    #[test]
    fn numeric_matches_points_on_ray() {
        let m = MetricModel::half_plane();
        let f = BusemannFunctional::numeric(unit_up_at(&m, 0.0, 1.0));
        for s in [0.5f64, 1.0, 2.0, 5.0] {
            let p = Point::from([0.0, s.exp()]);
            let v = busemann_numeric(&m, &f, &p).unwrap();
            assert_abs_diff_eq!(v.value, -s, epsilon = 1e-6);
        }
    }

    #[test]
    fn numeric_matches_closed_form_on_models() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let hp = MetricModel::half_plane();
        let f = BusemannFunctional::numeric(unit_up_at(&hp, 0.0, 1.0));
        let mut done = 0;
        while done < 50 {
            let x = Point::from([rng.gen_range(-3.0..3.0), rng.gen_range(0.2..4.0)]);
            if geodesy::closed_form::half_space_distance(&x.coords, &[0.0, 1.0]) > 4.0 {
                continue;
            }
            let num = busemann_numeric(&hp, &f, &x).unwrap();
            let cf = busemann_closed_form(&hp, &f, &x).unwrap();
            assert_abs_diff_eq!(num.value, cf, epsilon = 1e-4);
            done += 1;
        }

        // euclidean needs the 1/T extrapolation branch
        let e = MetricModel::euclidean(2);
        let ray = UnitTangent::normalize(
            &e,
            TangentVector::new(Point::from([0.0, 0.0]), vec![1.0, 0.0]).unwrap(),
        )
        .unwrap();
        let f = BusemannFunctional::numeric(ray);
        for _ in 0..50 {
            let x = Point::from([rng.gen_range(-2.8..2.8), rng.gen_range(-2.8..2.8)]);
            let num = busemann_numeric(&e, &f, &x).unwrap();
            assert_abs_diff_eq!(num.value, -x.coords[0], epsilon = 1e-4);
        }
    }

    #[test]
    fn busemann_is_one_lipschitz() {
        let m = MetricModel::half_plane();
        let f = BusemannFunctional::for_model(&m, unit_up_at(&m, 0.5, 1.0));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let x = Point::from([rng.gen_range(-3.0..3.0), rng.gen_range(0.2..4.0)]);
            let y = Point::from([rng.gen_range(-3.0..3.0), rng.gen_range(0.2..4.0)]);
            let bx = f.evaluate(&m, &x).unwrap().value;
            let by = f.evaluate(&m, &y).unwrap().value;
            let d = geodesy::closed_form::half_space_distance(&x.coords, &y.coords);
            assert!((bx - by).abs() <= d + 1e-6);
        }
    }

    #[test]
    fn stable_horoball_of_up_vector() {
        let m = MetricModel::half_plane();
        let v = unit_up_at(&m, 0.0, 1.0);
        let h = stable_horoball(&m, &v);
        // {B < 0} = {y > 1}, open: base on the boundary is excluded
        assert!(h.contains(&m, &Point::from([0.7, 1.5])).unwrap());
        assert!(!h.contains(&m, &Point::from([0.0, 1.0])).unwrap());
        assert!(!h.contains(&m, &Point::from([0.0, 0.5])).unwrap());
        let b = h.defect(&m, &Point::from([0.0, 1.0])).unwrap();
        assert_abs_diff_eq!(b, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn unstable_horoball_is_tangent_disk() {
        // v up at (0, e^eps): backward ray exits at the origin; the horoball
        // is the euclidean disk with center (0, e^eps/2)
        let m = MetricModel::half_plane();
        let eps = 0.3f64;
        let v = unit_up_at(&m, 0.0, eps.exp());
        let h = unstable_horoball(&m, &v);
        let c = eps.exp() / 2.0;
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..500 {
            let x = Point::from([rng.gen_range(-2.0..2.0), rng.gen_range(0.05..2.0)]);
            let inside_disk =
                x.coords[0].powi(2) + (x.coords[1] - c).powi(2) < c * c - 1e-9;
            let outside_disk =
                x.coords[0].powi(2) + (x.coords[1] - c).powi(2) > c * c + 1e-9;
            let member = h.contains(&m, &x).unwrap();
            if inside_disk {
                assert!(member, "missing {:?}", x);
            }
            if outside_disk {
                assert!(!member, "spurious {:?}", x);
            }
        }
        // grid cross-check against the numeric evaluator
        let f = BusemannFunctional::numeric(h.functional.ray.clone());
        for x in [[0.3, 0.7], [-0.4, 1.0], [0.0, 0.4]] {
            let p = Point::from(x);
            let num = busemann_numeric(&m, &f, &p).unwrap();
            let cf = h.functional.evaluate(&m, &p).unwrap();
            assert_abs_diff_eq!(num.value, cf.value, epsilon = 1e-4);
        }
    }

    #[test]
    fn euclidean_stable_unstable_halfplanes() {
        let m = MetricModel::euclidean(2);
        let v = UnitTangent::normalize(
            &m,
            TangentVector::new(Point::from([0.0, 0.0]), vec![1.0, 0.0]).unwrap(),
        )
        .unwrap();
        let s = stable_horoball(&m, &v);
        let u = unstable_horoball(&m, &v);
        assert!(s.contains(&m, &Point::from([0.5, 3.0])).unwrap());
        assert!(!s.contains(&m, &Point::from([-0.5, 3.0])).unwrap());
        assert!(u.contains(&m, &Point::from([-0.5, 3.0])).unwrap());
        assert!(!u.contains(&m, &Point::from([0.5, 3.0])).unwrap());
    }

    #[test]
    fn stable_unstable_duality() {
        let m = MetricModel::disk();
        let v = UnitTangent::normalize(
            &m,
            TangentVector::new(Point::from([0.2, -0.1]), vec![0.3, 0.8]).unwrap(),
        )
        .unwrap();
        let neg = UnitTangent::negated(&m, &v);
        let a = unstable_horoball(&m, &v);
        let b = stable_horoball(&m, &neg);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..1000 {
            let r = rng.gen_range(0.0..0.9f64);
            let t: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let p = Point::from([r * t.cos(), r * t.sin()]);
            assert_eq!(
                a.contains(&m, &p).unwrap(),
                b.contains(&m, &p).unwrap(),
                "disagree at {:?}",
                p
            );
        }
    }

    #[test]
    fn tangent_horosphere_flat_case() {
        let m = MetricModel::euclidean(3);
        let base = Point::from([0.0, 0.0, 0.0]);
        let plane = TangentPlane::new(
            TangentVector::new(base.clone(), vec![1.0, 0.0, 0.0]).unwrap(),
            TangentVector::new(base.clone(), vec![0.0, 1.0, 0.0]).unwrap(),
        )
        .unwrap();
        let h = tangent_horosphere(&m, &plane, 1.0).unwrap();
        // horosphere of direction e3 through the origin: the plane z = 0
        let b0 = h.defect(&m, &base).unwrap();
        assert_abs_diff_eq!(b0, 0.0, epsilon = 1e-12);
        let above = h.defect(&m, &Point::from([0.4, -0.2, 1.0])).unwrap();
        let below = h.defect(&m, &Point::from([0.4, -0.2, -1.0])).unwrap();
        assert_abs_diff_eq!(above, -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(below, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn tangent_horosphere_rejects_dimension_two() {
        let m = MetricModel::half_plane();
        let base = Point::from([0.0, 1.0]);
        let plane = TangentPlane::new(
            TangentVector::new(base.clone(), vec![1.0, 0.0]).unwrap(),
            TangentVector::new(base, vec![0.0, 1.0]).unwrap(),
        )
        .unwrap();
        assert!(tangent_horosphere(&m, &plane, 1.0).is_err());
    }

    #[test]
    fn half_space_ideal_points() {
        let m = MetricModel::half_plane();
        let up = unit_up_at(&m, 2.0, 1.0);
        assert_eq!(ideal_point(&m, &up).unwrap(), IdealPoint::Infinity);
        let down = UnitTangent::negated(&m, &up);
        assert_eq!(
            ideal_point(&m, &down).unwrap(),
            IdealPoint::Boundary(vec![2.0])
        );
        // horizontal ray from (0, 1) toward +x exits at x = 1
        let right = UnitTangent::normalize(
            &m,
            TangentVector::new(Point::from([0.0, 1.0]), vec![1.0, 0.0]).unwrap(),
        )
        .unwrap();
        match ideal_point(&m, &right).unwrap() {
            IdealPoint::Boundary(xi) => assert_abs_diff_eq!(xi[0], 1.0, epsilon = 1e-12),
            other => panic!("unexpected ideal point {other:?}"),
        }
    }
}
