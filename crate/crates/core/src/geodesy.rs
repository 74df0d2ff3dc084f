//! Geodesic initial-value and boundary-value problems, distances,
//! barycenters, and the geodesic flow on the unit tangent bundle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifold::{MetricModel, Point, TangentVector};

/// Hard cap on geodesic time/length budgets, in chart-time units.
pub const DISTANCE_CAP: f64 = 50.0;
/// Chart-space endpoint tolerance of the boundary-value solver.
pub const BVP_TOL: f64 = 1e-8;
/// Default local error per unit time for the adaptive integrator.
pub const IVP_TOL: f64 = 1e-10;

const UNIT_NORM_TOL: f64 = 1e-10;

/// A tangent vector of riemannian norm 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitTangent(TangentVector);

impl UnitTangent {
    pub fn new(model: &MetricModel, v: TangentVector) -> Result<Self> {
        let norm = model.norm(&v);
        if (norm - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::invalid(format!(
                "tangent vector has riemannian norm {norm}, expected 1"
            )));
        }
        Ok(UnitTangent(v))
    }

    /// Rescales an arbitrary nonzero vector to unit riemannian norm.
    pub fn normalize(model: &MetricModel, v: TangentVector) -> Result<Self> {
        let norm = model.norm(&v);
        if norm < 1e-300 || !norm.is_finite() {
            return Err(Error::invalid("cannot normalize a zero tangent vector"));
        }
        let components = v.components.iter().map(|c| c / norm).collect();
        Ok(UnitTangent(TangentVector {
            base: v.base,
            components,
        }))
    }

    pub fn vector(&self) -> &TangentVector {
        &self.0
    }

    pub fn base(&self) -> &Point {
        &self.0.base
    }

    pub fn into_vector(self) -> TangentVector {
        self.0
    }

    pub fn negated(model: &MetricModel, v: &UnitTangent) -> UnitTangent {
        // Negation preserves the norm exactly.
        let _ = model;
        UnitTangent(v.0.negated())
    }
}

/// A sampled geodesic with constant riemannian speed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeodesicPath {
    pub samples: Vec<GeodesicSample>,
    pub length: f64,
    pub speed: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeodesicSample {
    pub time: f64,
    pub point: Point,
    pub velocity: TangentVector,
}

impl GeodesicPath {
    pub fn start(&self) -> &GeodesicSample {
        &self.samples[0]
    }

    pub fn end(&self) -> &GeodesicSample {
        self.samples.last().expect("path has samples")
    }

    /// Initial velocity; its riemannian norm is the path speed.
    pub fn initial_velocity(&self) -> &TangentVector {
        &self.start().velocity
    }
}

// ---------------------------------------------------------------------------
// Geodesic ODE integration (Dormand-Prince 5(4), adaptive)
// ---------------------------------------------------------------------------

const MAX_STATE: usize = 6;

type State = [f64; MAX_STATE];

fn geodesic_rhs(model: &MetricModel, n: usize, s: &State, out: &mut State) {
    let (x, v) = s.split_at(n);
    let gamma = model.christoffel_raw(&x[..n]);
    for i in 0..n {
        out[i] = v[i];
    }
    for k in 0..n {
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += gamma[k][i][j] * v[i] * v[j];
            }
        }
        out[n + k] = -acc;
    }
}

// Dormand-Prince coefficients.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

struct Integrator<'m> {
    model: &'m MetricModel,
    n: usize,
    tol: f64,
}

impl<'m> Integrator<'m> {
    /// Integrates the geodesic system from `state` at time `t0` to `t1`,
    /// calling `observe` after each accepted step.
    fn run(
        &self,
        mut state: State,
        t0: f64,
        t1: f64,
        mut observe: impl FnMut(f64, &State),
    ) -> Result<State> {
        let n = self.n;
        let dir = if t1 >= t0 { 1.0 } else { -1.0 };
        let span = (t1 - t0).abs();
        if span == 0.0 {
            return Ok(state);
        }
        let mut t = t0;
        let mut h = (span / 16.0).min(0.1).max(1e-6) * dir;
        let mut k = [[0.0f64; MAX_STATE]; 7];
        geodesic_rhs(self.model, n, &state, &mut k[0]);

        let mut steps = 0usize;
        loop {
            // stop once only float residue of the interval remains, so the
            // clamped step controller cannot underflow on the last sliver
            if (t - t0).abs() >= span - 1e-12 * (1.0 + span) {
                break;
            }
            if (t + h - t0).abs() > span {
                h = t1 - t;
            }
            // stages
            for s in 1..7 {
                let mut ys = state;
                for i in 0..2 * n {
                    let mut acc = 0.0;
                    for j in 0..s {
                        acc += A[s - 1][j] * k[j][i];
                    }
                    ys[i] += h * acc;
                }
                if !self.model.in_chart_raw(&ys[..n]) {
                    // Stage left the chart; shrink and retry.
                    h *= 0.25;
                    if h.abs() < 1e-14 {
                        return Err(Error::ChartExit { t });
                    }
                    geodesic_rhs(self.model, n, &state, &mut k[0]);
                    continue;
                }
                geodesic_rhs(self.model, n, &ys, &mut k[s]);
            }
            let mut y5 = state;
            let mut err = 0.0f64;
            for i in 0..2 * n {
                let mut acc5 = 0.0;
                let mut acc4 = 0.0;
                for j in 0..7 {
                    acc5 += B5[j] * k[j][i];
                    acc4 += B4[j] * k[j][i];
                }
                y5[i] += h * acc5;
                // mixed absolute/relative control so exponentially growing
                // chart coordinates do not starve the step size
                let scale = 1.0 + y5[i].abs().max(state[i].abs());
                err = err.max((h * (acc5 - acc4)).abs() / scale);
            }
            let budget = self.tol * h.abs();
            if err <= budget.max(1e-15) {
                if !self.model.in_chart_raw(&y5[..n]) {
                    return Err(Error::ChartExit { t: t + h });
                }
                t += h;
                state = y5;
                geodesic_rhs(self.model, n, &state, &mut k[0]);
                observe(t, &state);
            }
            let ratio = if err > 0.0 { budget / err } else { 10.0 };
            h *= (0.9 * ratio.powf(0.2)).clamp(0.2, 5.0);
            if h.abs() < 1e-14 {
                return Err(Error::StepUnderflow { t });
            }
            steps += 1;
            if steps > 2_000_000 {
                return Err(Error::StepUnderflow { t });
            }
        }
        Ok(state)
    }
}

fn pack(v: &TangentVector) -> (State, usize) {
    let n = v.dim();
    let mut s = [0.0; MAX_STATE];
    s[..n].copy_from_slice(&v.base.coords);
    s[n..2 * n].copy_from_slice(&v.components);
    (s, n)
}

fn unpack(s: &State, n: usize) -> (Point, TangentVector) {
    let p = Point {
        coords: s[..n].to_vec(),
    };
    let v = TangentVector {
        base: p.clone(),
        components: s[n..2 * n].to_vec(),
    };
    (p, v)
}

/// Integrates the geodesic with initial position/velocity `v` for time `t`.
pub fn exp_ivp(model: &MetricModel, v: &TangentVector, t: f64) -> Result<(Point, TangentVector)> {
    exp_ivp_tol(model, v, t, IVP_TOL)
}

pub fn exp_ivp_tol(
    model: &MetricModel,
    v: &TangentVector,
    t: f64,
    tol: f64,
) -> Result<(Point, TangentVector)> {
    if !t.is_finite() {
        return Err(Error::invalid("integration time must be finite"));
    }
    // The 50-unit cap applies to distance queries; initial-value runs get a
    // looser budget so Busemann truncation rays (T up to 64) stay legal.
    if t.abs() * model.norm(v) > 4.0 * DISTANCE_CAP {
        return Err(Error::DistanceCap {
            cap: 4.0 * DISTANCE_CAP,
        });
    }
    if !model.in_chart_raw(&v.base.coords) {
        return Err(Error::ChartDomain {
            coords: v.base.coords.clone(),
            model: model.name(),
        });
    }
    let (state, n) = pack(v);
    let integ = Integrator { model, n, tol };
    let end = integ.run(state, 0.0, t, |_, _| {})?;
    Ok(unpack(&end, n))
}

/// Geodesic flow on the unit tangent bundle: integrate time t, renormalize.
pub fn geodesic_flow(model: &MetricModel, v: &UnitTangent, t: f64) -> Result<UnitTangent> {
    if t == 0.0 {
        return Ok(v.clone());
    }
    let (_, vel) = exp_ivp(model, v.vector(), t)?;
    let drift = (model.norm(&vel) - 1.0).abs();
    debug_assert!(drift <= 1e-6, "unit-speed drift {drift}");
    UnitTangent::normalize(model, vel)
}

// ---------------------------------------------------------------------------
// Closed forms for the model spaces (seeds and oracles)
// ---------------------------------------------------------------------------

/// Closed-form distances and log maps for the constant-curvature models.
pub mod closed_form {
    pub fn euclidean_distance(x: &[f64], y: &[f64]) -> f64 {
        x.iter()
            .zip(y)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// Upper half-space distance: arccosh(1 + |x-y|^2 / (2 x_n y_n)).
    pub fn half_space_distance(x: &[f64], y: &[f64]) -> f64 {
        let n = x.len();
        let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
        let arg = 1.0 + d2 / (2.0 * x[n - 1] * y[n - 1]);
        arg.max(1.0).acosh()
    }

    /// Poincare ball distance: 2 artanh |(-x) (+) y| (Mobius addition).
    pub fn ball_distance(x: &[f64], y: &[f64]) -> f64 {
        let neg_x: Vec<f64> = x.iter().map(|a| -a).collect();
        let m = mobius_add(&neg_x, y);
        let r = m.iter().map(|a| a * a).sum::<f64>().sqrt().min(1.0 - 1e-16);
        2.0 * r.atanh()
    }

    /// Mobius addition on the unit ball.
    pub fn mobius_add(u: &[f64], v: &[f64]) -> Vec<f64> {
        let uu: f64 = u.iter().map(|a| a * a).sum();
        let vv: f64 = v.iter().map(|a| a * a).sum();
        let uv: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
        let den = 1.0 + 2.0 * uv + uu * vv;
        let cu = (1.0 + 2.0 * uv + vv) / den;
        let cv = (1.0 - uu) / den;
        u.iter().zip(v).map(|(a, b)| cu * a + cv * b).collect()
    }

    /// Log map of the upper half-space model: the initial velocity of the
    /// unit-speed geodesic from x to y, scaled by d(x, y).
    pub fn half_space_log(x: &[f64], y: &[f64]) -> Vec<f64> {
        let n = x.len();
        let xn = x[n - 1];
        let yn = y[n - 1];
        let dh: Vec<f64> = (0..n - 1).map(|i| y[i] - x[i]).collect();
        let bh: f64 = dh.iter().map(|a| a * a).sum::<f64>().sqrt();
        if bh < 1e-14 {
            // vertical geodesic
            let mut out = vec![0.0; n];
            out[n - 1] = xn * (yn / xn).ln();
            return out;
        }
        // Reduce to the vertical 2-plane through x and y.
        let m = (bh * bh + yn * yn - xn * xn) / (2.0 * bh);
        let r = (m * m + xn * xn).sqrt();
        let th1 = xn.atan2(-m);
        let th2 = yn.atan2(bh - m);
        let s = ((th2 / 2.0).tan() / (th1 / 2.0).tan()).ln().abs();
        let sigma = if th2 > th1 { 1.0 } else { -1.0 };
        // unit velocity in (u, y) coordinates
        let vu = -sigma * th1.sin() * r * th1.sin();
        let vy = sigma * th1.sin() * r * th1.cos();
        let mut out: Vec<f64> = dh.iter().map(|a| s * vu * a / bh).collect();
        out.push(s * vy);
        out
    }

    /// Log map of the Poincare ball model.
    pub fn ball_log(x: &[f64], y: &[f64]) -> Vec<f64> {
        let neg_x: Vec<f64> = x.iter().map(|a| -a).collect();
        let m = mobius_add(&neg_x, y);
        let r = m.iter().map(|a| a * a).sum::<f64>().sqrt();
        if r < 1e-16 {
            return vec![0.0; x.len()];
        }
        let lam = 2.0 / (1.0 - x.iter().map(|a| a * a).sum::<f64>());
        let c = (2.0 / lam) * r.min(1.0 - 1e-16).atanh() / r;
        m.iter().map(|a| c * a).collect()
    }

    /// Ideal endpoint of the forward ray of a ball-model tangent vector.
    pub fn ball_ideal_point(base: &[f64], direction: &[f64]) -> Vec<f64> {
        let nd = direction.iter().map(|a| a * a).sum::<f64>().sqrt();
        let unit: Vec<f64> = direction.iter().map(|a| a / nd).collect();
        mobius_add(base, &unit)
    }
}

/// Closed-form log map where available; None for conformal models.
pub fn log_map_closed_form(model: &MetricModel, x: &Point, y: &Point) -> Option<Vec<f64>> {
    match model {
        MetricModel::Euclidean { .. } => Some(
            x.coords
                .iter()
                .zip(&y.coords)
                .map(|(a, b)| b - a)
                .collect(),
        ),
        MetricModel::HyperbolicHalfPlane { .. } => {
            Some(closed_form::half_space_log(&x.coords, &y.coords))
        }
        MetricModel::HyperbolicDisk { .. } => Some(closed_form::ball_log(&x.coords, &y.coords)),
        MetricModel::Conformal { .. } => None,
    }
}

/// Closed-form distance where available; None for conformal models.
pub fn distance_closed_form(model: &MetricModel, x: &[f64], y: &[f64]) -> Option<f64> {
    match model {
        MetricModel::Euclidean { .. } => Some(closed_form::euclidean_distance(x, y)),
        MetricModel::HyperbolicHalfPlane { .. } => Some(closed_form::half_space_distance(x, y)),
        MetricModel::HyperbolicDisk { .. } => Some(closed_form::ball_distance(x, y)),
        MetricModel::Conformal { .. } => None,
    }
}

/// Fast distance: closed form on the model spaces, boundary-value solve on
/// conformal metrics. Validated against `distance` in tests.
pub fn fast_distance(model: &MetricModel, x: &Point, y: &Point) -> Result<f64> {
    match distance_closed_form(model, &x.coords, &y.coords) {
        Some(d) => Ok(d),
        None => distance(model, x, y),
    }
}

// ---------------------------------------------------------------------------
// Boundary-value problem: shooting with Newton on the endpoint map
// ---------------------------------------------------------------------------

/// Solves the two-point problem by shooting on the initial velocity over
/// unit time; the velocity norm is then the geodesic length.
pub fn connect_bvp(model: &MetricModel, x: &Point, y: &Point) -> Result<GeodesicPath> {
    model.check_point(x)?;
    if !model.in_chart_raw(&y.coords) {
        return Err(Error::ChartDomain {
            coords: y.coords.clone(),
            model: model.name(),
        });
    }
    if x == y {
        return Err(Error::invalid("connect_bvp requires distinct endpoints"));
    }
    let n = model.dim();

    let mut w: Vec<f64> = match log_map_closed_form(model, x, y) {
        Some(log) => log,
        None => x.coords.iter().zip(&y.coords).map(|(a, b)| b - a).collect(),
    };
    if model.norm_at(&x.coords, &w) > DISTANCE_CAP {
        return Err(Error::DistanceCap { cap: DISTANCE_CAP });
    }

    let shoot = |w: &[f64]| -> Result<Vec<f64>> {
        let v = TangentVector {
            base: x.clone(),
            components: w.to_vec(),
        };
        let (p, _) = exp_ivp(model, &v, 1.0)?;
        Ok(p.coords.iter().zip(&y.coords).map(|(a, b)| a - b).collect())
    };

    let norm = |r: &[f64]| r.iter().map(|a| a * a).sum::<f64>().sqrt();
    let mut res = shoot(&w)?;
    let mut res_norm = norm(&res);
    let mut iters = 0usize;
    while res_norm > BVP_TOL {
        iters += 1;
        if iters > 60 {
            return Err(Error::ShootingDiverged {
                iters,
                residual: res_norm,
            });
        }
        // finite-difference Jacobian of the endpoint map
        let mut jac = nalgebra::DMatrix::zeros(n, n);
        for j in 0..n {
            let h = 1e-7 * w[j].abs().max(1.0);
            let mut wp = w.clone();
            wp[j] += h;
            let rp = shoot(&wp)?;
            for i in 0..n {
                jac[(i, j)] = (rp[i] - res[i]) / h;
            }
        }
        let rhs = nalgebra::DVector::from_column_slice(&res);
        let step = jac
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::ShootingDiverged {
                iters,
                residual: res_norm,
            })?;
        // damped Newton
        let mut lambda = 1.0;
        let mut improved = false;
        for _ in 0..10 {
            let trial: Vec<f64> = (0..n).map(|i| w[i] - lambda * step[i]).collect();
            match shoot(&trial) {
                Ok(r) => {
                    let rn = norm(&r);
                    if rn < res_norm {
                        w = trial;
                        res = r;
                        res_norm = rn;
                        improved = true;
                        break;
                    }
                }
                Err(_) => {}
            }
            lambda *= 0.5;
        }
        if !improved {
            return Err(Error::ShootingDiverged {
                iters,
                residual: res_norm,
            });
        }
        if model.norm_at(&x.coords, &w) > DISTANCE_CAP {
            return Err(Error::DistanceCap { cap: DISTANCE_CAP });
        }
    }

    sample_path(model, x, &w)
}

/// Re-integrates the solved geodesic recording evenly spaced samples.
fn sample_path(model: &MetricModel, x: &Point, w: &[f64]) -> Result<GeodesicPath> {
    let speed = model.norm_at(&x.coords, w);
    let v0 = TangentVector {
        base: x.clone(),
        components: w.to_vec(),
    };
    let count = 33usize;
    let mut samples = Vec::with_capacity(count);
    samples.push(GeodesicSample {
        time: 0.0,
        point: x.clone(),
        velocity: v0.clone(),
    });
    for i in 1..count {
        let t = i as f64 / (count - 1) as f64;
        let (p, vel) = exp_ivp(model, &v0, t)?;
        samples.push(GeodesicSample {
            time: t,
            point: p,
            velocity: vel,
        });
    }
    Ok(GeodesicPath {
        samples,
        length: speed,
        speed,
    })
}

/// Riemannian distance via the boundary-value solve.
pub fn distance(model: &MetricModel, x: &Point, y: &Point) -> Result<f64> {
    if x == y {
        model.check_point(x)?;
        return Ok(0.0);
    }
    Ok(connect_bvp(model, x, y)?.length)
}

/// Point at arc-length fraction t of the geodesic from x to y.
pub fn barycenter(model: &MetricModel, x: &Point, y: &Point, t: f64) -> Result<Point> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::invalid(format!("barycenter fraction {t} outside [0,1]")));
    }
    if t == 0.0 || x == y {
        model.check_point(x)?;
        return Ok(x.clone());
    }
    if t == 1.0 {
        model.check_point(y)?;
        return Ok(y.clone());
    }
    let path = connect_bvp(model, x, y)?;
    // The shooting parametrization has constant speed, so the time fraction
    // equals the arc-length fraction.
    let (p, _) = exp_ivp(model, path.initial_velocity(), t)?;
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::MetricModel;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tv(base: [f64; 2], comp: [f64; 2]) -> TangentVector {
        TangentVector::new(Point::from(base), comp.to_vec()).unwrap()
    }

    #[test]
    fn euclidean_exp_is_straight() {
        let m = MetricModel::euclidean(2);
        let (p, v) = exp_ivp(&m, &tv([0.0, 0.0], [1.0, 0.0]), 2.0).unwrap();
        assert_abs_diff_eq!(p.coords[0], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.coords[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v.components[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn exp_at_zero_time_is_identity() {
        let m = MetricModel::half_plane();
        let v0 = tv([0.3, 1.5], [0.4, -0.2]);
        let (p, v) = exp_ivp(&m, &v0, 0.0).unwrap();
        assert_eq!(p.coords, vec![0.3, 1.5]);
        assert_eq!(v.components, v0.components);
    }

    #[test]
    fn half_plane_vertical_geodesic_closed_form() {
        // gamma(t) = (0, e^t) with velocity (0, e^t)
        let m = MetricModel::half_plane();
        let t = std::f64::consts::LN_2;
        let (p, v) = exp_ivp(&m, &tv([0.0, 1.0], [0.0, 1.0]), t).unwrap();
        assert_abs_diff_eq!(p.coords[0], 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(p.coords[1], 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(v.components[1], 2.0, epsilon = 1e-8);
    }

    #[test]
    fn ivp_budget_is_enforced() {
        // the metrics are complete, so the budget triggers before any exit
        let d = MetricModel::disk();
        let v = TangentVector::new(Point::from([0.0, 0.0]), vec![150.0, 0.0]).unwrap();
        assert!(matches!(
            exp_ivp(&d, &v, 1.0),
            Err(Error::DistanceCap { .. })
        ));
        let m = MetricModel::half_plane();
        let bad = TangentVector::new(Point::from([0.0, 1.0]), vec![0.0, 1.0]).unwrap();
        let mut outside = bad.clone();
        outside.base = Point::from([0.0, -1.0]);
        assert!(exp_ivp(&m, &outside, 0.5).is_err());
    }

    #[test]
    fn geodesic_flow_composition() {
        let m = MetricModel::half_plane();
        let v = UnitTangent::normalize(&m, tv([0.2, 1.0], [0.7, 0.3])).unwrap();
        for (s, t) in [(0.1, 0.5), (0.5, 1.0), (1.0, 0.1)] {
            let a = geodesic_flow(&m, &geodesic_flow(&m, &v, t).unwrap(), s).unwrap();
            let b = geodesic_flow(&m, &v, s + t).unwrap();
            assert!(a.base().chart_dist(b.base()) <= 1e-6);
        }
    }

    #[test]
    fn flow_at_zero_is_identity() {
        let m = MetricModel::euclidean(2);
        let v = UnitTangent::normalize(&m, tv([1.0, 2.0], [0.0, 3.0])).unwrap();
        let w = geodesic_flow(&m, &v, 0.0).unwrap();
        assert_eq!(w.vector(), v.vector());
    }

    #[test]
    fn flow_up_the_half_plane() {
        let m = MetricModel::half_plane();
        let v = UnitTangent::normalize(&m, tv([0.0, 1.0], [0.0, 1.0])).unwrap();
        let w = geodesic_flow(&m, &v, 0.1).unwrap();
        assert_abs_diff_eq!(w.base().coords[1], (0.1f64).exp(), epsilon = 1e-8);
        assert_abs_diff_eq!(model_norm(&m, w.vector()), 1.0, epsilon = 1e-12);
    }

    fn model_norm(m: &MetricModel, v: &TangentVector) -> f64 {
        m.norm(v)
    }

    #[test]
    fn bvp_euclidean_three_four_five() {
        let m = MetricModel::euclidean(2);
        let path = connect_bvp(&m, &Point::from([0.0, 0.0]), &Point::from([3.0, 4.0])).unwrap();
        assert_abs_diff_eq!(path.length, 5.0, epsilon = 1e-9);
        // straight segment: midpoint sample lies on the chord
        let mid = &path.samples[16].point;
        assert_abs_diff_eq!(mid.coords[0], 1.5, epsilon = 1e-8);
        assert_abs_diff_eq!(mid.coords[1], 2.0, epsilon = 1e-8);
    }

    #[test]
    fn bvp_half_plane_oracles() {
        let m = MetricModel::half_plane();
        let d1 = distance(&m, &Point::from([0.0, 1.0]), &Point::from([0.0, 2.0])).unwrap();
        assert_abs_diff_eq!(d1, std::f64::consts::LN_2, epsilon = 1e-8);
        let d2 = distance(&m, &Point::from([-1.0, 1.0]), &Point::from([1.0, 1.0])).unwrap();
        assert_abs_diff_eq!(d2, 3.0f64.acosh(), epsilon = 1e-8);
    }

    #[test]
    fn distance_is_zero_iff_equal_and_symmetric() {
        let m = MetricModel::disk();
        let x = Point::from([0.1, 0.2]);
        let y = Point::from([-0.4, 0.3]);
        assert_eq!(distance(&m, &x, &x).unwrap(), 0.0);
        let a = distance(&m, &x, &y).unwrap();
        let b = distance(&m, &y, &x).unwrap();
        assert!(a > 0.0);
        assert_abs_diff_eq!(a, b, epsilon = 1e-8);
    }

    #[test]
    fn bvp_rejects_equal_endpoints() {
        let m = MetricModel::euclidean(2);
        let x = Point::from([1.0, 1.0]);
        assert!(connect_bvp(&m, &x, &x).is_err());
    }

    #[test]
    fn barycenter_examples() {
        let m = MetricModel::euclidean(2);
        let x = Point::from([0.0, 0.0]);
        let y = Point::from([2.0, 0.0]);
        assert_eq!(barycenter(&m, &x, &y, 0.0).unwrap(), x);
        assert_eq!(barycenter(&m, &x, &y, 1.0).unwrap(), y);
        let q = barycenter(&m, &x, &y, 0.25).unwrap();
        assert_abs_diff_eq!(q.coords[0], 0.5, epsilon = 1e-8);
        assert!(barycenter(&m, &x, &y, 1.5).is_err());
    }

    #[test]
    fn barycenter_splits_arc_length() {
        let m = MetricModel::half_plane();
        let x = Point::from([-1.0, 1.0]);
        let y = Point::from([1.0, 1.0]);
        let d = distance(&m, &x, &y).unwrap();
        for t in [0.25, 0.5, 0.75] {
            let q = barycenter(&m, &x, &y, t).unwrap();
            let dx = distance(&m, &x, &q).unwrap();
            assert_abs_diff_eq!(dx, t * d, epsilon = 1e-7);
        }
    }

    #[test]
    fn speed_conservation_long_run() {
        let m = MetricModel::half_plane();
        let v0 = tv([0.0, 1.0], [0.8, 0.6]);
        let s0 = m.norm(&v0);
        for t in [1.0, 2.0, 5.0, 10.0] {
            let (_, v) = exp_ivp(&m, &v0, t).unwrap();
            let drift = (m.norm(&v) - s0).abs() / s0;
            assert!(drift <= 1e-6, "drift {drift} at t={t}");
        }
    }

    fn random_half_plane_point(rng: &mut impl Rng) -> Point {
        Point::from([rng.gen_range(-3.0..3.0), rng.gen_range(0.2..4.0)])
    }

    #[test]
    fn round_trip_on_seeded_pairs() {
        let m = MetricModel::half_plane();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut tested = 0;
        while tested < 200 {
            let x = random_half_plane_point(&mut rng);
            let y = random_half_plane_point(&mut rng);
            if x == y || closed_form::half_space_distance(&x.coords, &y.coords) > 5.0 {
                continue;
            }
            let path = connect_bvp(&m, &x, &y).unwrap();
            let (p, _) = exp_ivp(&m, path.initial_velocity(), 1.0).unwrap();
            assert!(p.chart_dist(&y) <= 1e-6, "round trip missed by {}", p.chart_dist(&y));
            tested += 1;
        }
    }

    #[test]
    fn hyperbolic_distance_matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(1234);
        let hp = MetricModel::half_plane();
        let dk = MetricModel::disk();
        let mut done = 0;
        while done < 60 {
            let x = random_half_plane_point(&mut rng);
            let y = random_half_plane_point(&mut rng);
            let oracle = closed_form::half_space_distance(&x.coords, &y.coords);
            if x == y || oracle > 5.0 {
                continue;
            }
            assert_abs_diff_eq!(distance(&hp, &x, &y).unwrap(), oracle, epsilon = 1e-6);
            done += 1;
        }
        done = 0;
        while done < 60 {
            let x = Point::from([rng.gen_range(-0.9..0.9), rng.gen_range(-0.9..0.9)]);
            let y = Point::from([rng.gen_range(-0.9..0.9), rng.gen_range(-0.9..0.9)]);
            if !dk.in_chart(&x.coords) || !dk.in_chart(&y.coords) || x == y {
                continue;
            }
            let oracle = closed_form::ball_distance(&x.coords, &y.coords);
            if oracle > 5.0 {
                continue;
            }
            assert_abs_diff_eq!(distance(&dk, &x, &y).unwrap(), oracle, epsilon = 1e-6);
            done += 1;
        }
    }

    #[test]
    fn triangle_inequality_on_seeded_triples() {
        let m = MetricModel::half_plane();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..40 {
            let x = random_half_plane_point(&mut rng);
            let y = random_half_plane_point(&mut rng);
            let z = random_half_plane_point(&mut rng);
            let dxy = closed_form::half_space_distance(&x.coords, &y.coords);
            let dyz = closed_form::half_space_distance(&y.coords, &z.coords);
            let dxz = closed_form::half_space_distance(&x.coords, &z.coords);
            if dxy.max(dyz).max(dxz) > 5.0 {
                continue;
            }
            let a = distance(&m, &x, &z).unwrap();
            let b = distance(&m, &x, &y).unwrap() + distance(&m, &y, &z).unwrap();
            assert!(a <= b + 1e-7);
        }
    }

    #[test]
    fn half_space_log_map_reaches_target() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let m = MetricModel::half_plane();
        for _ in 0..100 {
            let x = random_half_plane_point(&mut rng);
            let y = random_half_plane_point(&mut rng);
            if closed_form::half_space_distance(&x.coords, &y.coords) > 5.0 {
                continue;
            }
            let log = closed_form::half_space_log(&x.coords, &y.coords);
            let v = TangentVector::new(x.clone(), log).unwrap();
            assert_abs_diff_eq!(
                m.norm(&v),
                closed_form::half_space_distance(&x.coords, &y.coords),
                epsilon = 1e-10
            );
            let (p, _) = exp_ivp(&m, &v, 1.0).unwrap();
            assert!(p.chart_dist(&y) <= 1e-7, "missed by {}", p.chart_dist(&y));
        }
    }

    #[test]
    fn ball_log_map_reaches_target() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let m = MetricModel::disk();
        for _ in 0..100 {
            let x = Point::from([rng.gen_range(-0.8..0.8), rng.gen_range(-0.8..0.8)]);
            let y = Point::from([rng.gen_range(-0.8..0.8), rng.gen_range(-0.8..0.8)]);
            if !m.in_chart(&x.coords) || !m.in_chart(&y.coords) || x.chart_dist(&y) < 1e-6 {
                continue;
            }
            let log = closed_form::ball_log(&x.coords, &y.coords);
            let v = TangentVector::new(x.clone(), log).unwrap();
            let (p, _) = exp_ivp(&m, &v, 1.0).unwrap();
            assert!(p.chart_dist(&y) <= 1e-7, "missed by {}", p.chart_dist(&y));
        }
    }

    #[test]
    fn conformal_bvp_round_trip() {
        let m = MetricModel::conformal(2, crate::manifold::ConformalField::SumOfSquares, 3.0);
        let x = Point::from([0.1, -0.2]);
        let y = Point::from([0.6, 0.4]);
        let path = connect_bvp(&m, &x, &y).unwrap();
        let (p, _) = exp_ivp(&m, path.initial_velocity(), 1.0).unwrap();
        assert!(p.chart_dist(&y) <= 1e-7);
        // length at least the flat lower bound e^{2 phi} >= 1 here... the
        // conformal factor exceeds 1 away from the origin
        assert!(path.length >= x.chart_dist(&y));
    }

    #[test]
    fn distance_cap_is_enforced() {
        let m = MetricModel::half_plane();
        let x = Point::from([0.0, 1.0]);
        let y = Point::from([0.0, (60.0f64).exp()]);
        assert!(matches!(
            distance(&m, &x, &y),
            Err(Error::DistanceCap { .. })
        ));
    }

    #[test]
    fn unit_tangent_rejects_non_unit() {
        let m = MetricModel::half_plane();
        let v = tv([0.0, 2.0], [0.0, 1.0]); // norm 1/2
        assert!(UnitTangent::new(&m, v.clone()).is_err());
        let u = UnitTangent::normalize(&m, v).unwrap();
        assert_abs_diff_eq!(m.norm(u.vector()), 1.0, epsilon = 1e-12);
    }
}
