//! The projection retraction P and the straight-line homotopy H onto a
//! weakly convex closed set, plus a probe of the continuity estimate and
//! trace plumbing for plotting.
//!
//! H(x, t) slides x along the unique geodesic toward its projection foot;
//! H(., 0) is the identity, H(., 1) = P, and members never move. On sets
//! that are not weakly convex, evaluation errors wherever the projection
//! fails to be unique.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geodesy::{barycenter, exp_ivp, fast_distance, UnitTangent};
use crate::manifold::{Point, TangentVector};
use crate::sets::ProjectionContext;

/// Membership slack accepted for "on the boundary" inputs to the
/// continuity probe: looser than the set-membership tolerance so bisected
/// and projected points qualify.
pub const BOUNDARY_SLACK: f64 = 1e-6;

/// A sampled run of t -> H(x, t).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomotopyTrace {
    pub start: Point,
    pub samples: Vec<(f64, Point)>,
    pub endpoint: Point,
}

/// The retraction P: members stay fixed, exterior points move to their
/// unique projection foot.
#[allow(non_snake_case)]
pub fn retraction_P(ctx: &ProjectionContext, x: &Point) -> Result<Point> {
    let model = ctx.model;
    model.check_point(x)?;
    if ctx.set.contains(model, x)? {
        return Ok(x.clone());
    }
    let proj = ctx.project(x)?;
    if !proj.unique {
        return Err(Error::NonUniqueProjection {
            probe: x.coords.clone(),
            count: proj.minimizers.len().max(2),
        });
    }
    Ok(proj.minimizers[0].clone())
}

/// H(x, t): the point a fraction t of the way along the geodesic from x to
/// P(x).
#[allow(non_snake_case)]
pub fn homotopy_H(ctx: &ProjectionContext, x: &Point, t: f64) -> Result<Point> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::invalid(format!("homotopy time {t} outside [0,1]")));
    }
    let model = ctx.model;
    model.check_point(x)?;
    if ctx.set.contains(model, x)? {
        return Ok(x.clone());
    }
    let foot = retraction_P(ctx, x)?;
    barycenter(model, x, &foot, t)
}

/// Max displacement of P over seeded samples in the riemannian ball
/// B(x, eps) around a boundary point x. The underlying continuity estimate
/// bounds this by 2 eps.
pub fn continuity_probe(
    ctx: &ProjectionContext,
    x: &Point,
    eps: f64,
    sample_count: usize,
    seed: u64,
) -> Result<f64> {
    let model = ctx.model;
    model.check_point(x)?;
    if eps <= 0.0 {
        return Err(Error::invalid("continuity probe needs eps > 0"));
    }
    let defect = ctx.set.defect(model, x)?;
    if defect.abs() > BOUNDARY_SLACK {
        return Err(Error::invalid(format!(
            "continuity probe base is not on the boundary (defect {defect:e})"
        )));
    }
    let px = retraction_P(ctx, x)?;
    let n = x.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut drawn = 0usize;
    while drawn < sample_count {
        let comps: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let len: f64 = comps.iter().map(|a| a * a).sum::<f64>().sqrt();
        if !(1e-3..=1.0).contains(&len) {
            continue;
        }
        // every 4th sample probes the full radius, the rest fill the ball
        let radius = if drawn % 4 == 0 {
            eps
        } else {
            eps * rng.gen_range(0.0f64..1.0).powf(1.0 / n as f64)
        };
        let dir = UnitTangent::normalize(
            model,
            TangentVector {
                base: x.clone(),
                components: comps,
            },
        )?;
        let (y, _) = exp_ivp(model, dir.vector(), radius)?;
        drawn += 1;
        let py = retraction_P(ctx, &y)?;
        worst = worst.max(fast_distance(model, &px, &py)?);
    }
    Ok(worst)
}

/// Samples H(x, i/(steps-1)) for i = 0..steps.
pub fn retract_trace(ctx: &ProjectionContext, x: &Point, steps: usize) -> Result<HomotopyTrace> {
    if steps < 2 {
        return Err(Error::invalid("trace needs at least 2 steps"));
    }
    let model = ctx.model;
    model.check_point(x)?;
    let mut samples = Vec::with_capacity(steps);
    if ctx.set.contains(model, x)? {
        for i in 0..steps {
            let t = i as f64 / (steps - 1) as f64;
            samples.push((t, x.clone()));
        }
        return Ok(HomotopyTrace {
            start: x.clone(),
            samples,
            endpoint: x.clone(),
        });
    }
    let foot = retraction_P(ctx, x)?;
    for i in 0..steps {
        let t = i as f64 / (steps - 1) as f64;
        let p = if i + 1 == steps {
            foot.clone()
        } else {
            barycenter(model, x, &foot, t)?
        };
        samples.push((t, p));
    }
    Ok(HomotopyTrace {
        start: x.clone(),
        samples,
        endpoint: foot,
    })
}
