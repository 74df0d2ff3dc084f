//! Weak-convexity certification: projection uniqueness, the horobowl
//! condition and the Motzkin gradient criterion, plus a geodesic-convexity
//! check for comparison.
//!
//! Certification is one-sided. A grid of probes can refute weak convexity
//! by exhibiting witnesses, but a clean run only certifies consistency at
//! the stated resolution.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geodesy::{barycenter, connect_bvp, log_map_closed_form, UnitTangent};
use crate::horo::BusemannFunctional;
use crate::manifold::{MetricModel, Point, Region, TangentVector};
use crate::sets::{ClosedSetSpec, ProjectionContext, SearchParams, DELTA_BOUNDARY};

/// Base tolerance of the horobowl margin; the Busemann Cauchy gap is added
/// on top so evaluator truncation is not blamed on the set.
pub const TOL_HORO_BASE: f64 = 1e-4;
/// Default stencil width of the Motzkin gradient test.
pub const MOTZKIN_H: f64 = 1e-4;
/// Gradient deviation above this flags a suspected kink (500x the stencil
/// error at the default width).
pub const KINK_THRESHOLD: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    ConsistentAtResolution,
    Violated,
}

/// Failure evidence attached to a probe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    NonUniqueProjection {
        probe: Point,
        minimizers: Vec<Point>,
        distance: f64,
        second_distance: f64,
    },
    HorobowlViolation {
        probe: Point,
        foot: Point,
        member: Point,
        busemann_value: f64,
    },
    GradientKink {
        probe: Point,
        deviation: f64,
    },
    ProbeFailure {
        probe: Point,
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexityCertificate {
    pub verdict: Verdict,
    pub region: Region,
    pub resolution: usize,
    pub probes: usize,
    /// Smallest gap between the best and the second-distinct-cluster
    /// distance over all probes that had a runner-up cluster.
    pub min_uniqueness_margin: Option<f64>,
    /// Smallest Busemann value over sampled members, over all probes.
    pub min_horobowl_margin: Option<f64>,
    /// Worst deviation of the riemannian distance-gradient norm from 1.
    pub max_gradient_deviation: Option<f64>,
    pub witnesses: Vec<Witness>,
    pub seed: u64,
}

impl ConvexityCertificate {
    pub fn consistent(&self) -> bool {
        self.verdict == Verdict::ConsistentAtResolution
    }
}

/// Unit tangent at `p` pointing along the geodesic toward `x`.
pub fn ray_toward(model: &MetricModel, p: &Point, x: &Point) -> Result<UnitTangent> {
    let components = match log_map_closed_form(model, p, x) {
        Some(v) => v,
        None => connect_bvp(model, p, x)?.initial_velocity().components.clone(),
    };
    UnitTangent::normalize(
        model,
        TangentVector {
            base: p.clone(),
            components,
        },
    )
}

/// Members of the set sampled over the region: grid members plus
/// near-boundary grid points pulled onto the set (the latter cover thin
/// sets, like shells, that never meet the grid exactly).
pub fn sample_members(
    model: &MetricModel,
    set: &ClosedSetSpec,
    region: &Region,
    resolution: usize,
) -> Result<Vec<Point>> {
    let n = region.dim();
    let counts = vec![resolution; n];
    let cell = (0..n)
        .map(|i| (region.max[i] - region.min[i]) / (resolution - 1) as f64)
        .fold(0.0f64, f64::max);
    let mut members: Vec<Point> = Vec::new();
    let mut boundary: Vec<Point> = Vec::new();
    for idx in Region::grid_indices(&counts) {
        let c = region.grid_point(&idx, &counts);
        if !model.in_chart(&c) {
            continue;
        }
        let p = Point { coords: c };
        let d = set.defect(model, &p)?;
        if d <= DELTA_BOUNDARY {
            members.push(p);
        } else if d <= 2.0 * cell * (n as f64).sqrt() * (1.0 + model.scale(&p.coords)) {
            if let Some(m) = crate::sets::pull_onto_set(model, set, p) {
                if boundary.iter().all(|b| b.chart_dist(&m) > 0.4 * cell) {
                    boundary.push(m);
                }
            }
        }
    }
    members.append(&mut boundary);
    if members.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(members)
}

/// Horobowl condition at an exterior probe with a unique projection: the
/// Busemann functional of the ray from the foot through the probe,
/// normalized at the foot, must be nonnegative on the set.
///
/// Returns the margin (min of B over the member samples), the tolerance in
/// force, and the worst member when the margin dips below it.
pub fn horobowl_margin(
    model: &MetricModel,
    x: &Point,
    foot: &Point,
    members: &[Point],
) -> Result<(f64, f64, Option<(Point, f64)>)> {
    let ray = ray_toward(model, foot, x)?;
    let functional = BusemannFunctional::for_model(model, ray);
    let mut margin = f64::INFINITY;
    let mut max_gap: f64 = 0.0;
    let mut worst: Option<(Point, f64)> = None;
    for g in members {
        let b = functional.evaluate(model, g)?;
        max_gap = max_gap.max(b.gap);
        if b.value < margin {
            margin = b.value;
            worst = Some((g.clone(), b.value));
        }
    }
    // The foot is only known to TOL_PROJ, which tilts the ray direction by
    // up to ~TOL_PROJ / d(foot, x); distant members amplify that tilt in
    // the Busemann values, so the tolerance widens for near-boundary probes.
    let span = crate::geodesy::fast_distance(model, foot, x)?;
    let ray_uncertainty = 10.0 * crate::sets::TOL_PROJ / span.max(crate::sets::TOL_PROJ);
    let tol = TOL_HORO_BASE + max_gap + ray_uncertainty;
    if margin >= -tol {
        worst = None;
    }
    Ok((margin, tol, worst))
}

/// One-shot horobowl check; samples the members itself.
pub fn check_horobowl_condition(
    model: &MetricModel,
    set: &ClosedSetSpec,
    x: &Point,
    params: &SearchParams,
) -> Result<f64> {
    let ctx = ProjectionContext::new(model, set, params.clone())?;
    let proj = ctx.project(x)?;
    if proj.distance == 0.0 {
        return Err(Error::invalid("horobowl condition needs an exterior probe"));
    }
    if !proj.unique {
        return Err(Error::NonUniqueProjection {
            probe: x.coords.clone(),
            count: proj.minimizers.len().max(2),
        });
    }
    let members = sample_members(model, set, &params.region, params.grid_resolution)?;
    let (margin, _, _) = horobowl_margin(model, x, &proj.minimizers[0], &members)?;
    Ok(margin)
}

/// Deviation of the riemannian norm of the chart gradient of d(., G) from 1
/// at an exterior probe, by central differences of width `h`.
pub fn check_motzkin_gradient(
    ctx: &ProjectionContext,
    x: &Point,
    h: f64,
) -> Result<f64> {
    let model = ctx.model;
    model.check_point(x)?;
    let base = ctx.project(x)?;
    if base.distance <= 10.0 * h {
        return Err(Error::invalid(
            "probe too close to the boundary for the gradient stencil",
        ));
    }
    let n = x.dim();
    let mut grad = vec![0.0; n];
    for i in 0..n {
        let mut cp = x.coords.clone();
        let mut cm = x.coords.clone();
        cp[i] += h;
        cm[i] -= h;
        let dp = ctx.project(&Point { coords: cp })?.distance;
        let dm = ctx.project(&Point { coords: cm })?.distance;
        grad[i] = (dp - dm) / (2.0 * h);
    }
    // |grad|_g = e^{-phi} |grad|_chart for a conformal metric
    let chart_norm = grad.iter().map(|a| a * a).sum::<f64>().sqrt();
    let riem_norm = chart_norm / model.scale(&x.coords);
    Ok((riem_norm - 1.0).abs())
}

struct ProbeOutcome {
    uniqueness_margin: Option<f64>,
    horobowl_margin: Option<f64>,
    gradient_deviation: Option<f64>,
    witnesses: Vec<Witness>,
}

fn probe_one(
    ctx: &ProjectionContext,
    members: &[Point],
    x: &Point,
    run_motzkin: bool,
) -> ProbeOutcome {
    let mut out = ProbeOutcome {
        uniqueness_margin: None,
        horobowl_margin: None,
        gradient_deviation: None,
        witnesses: Vec::new(),
    };
    let model = ctx.model;
    let proj = match ctx.project(x) {
        Ok(p) => p,
        Err(e) => {
            out.witnesses.push(Witness::ProbeFailure {
                probe: x.clone(),
                message: e.to_string(),
            });
            return out;
        }
    };
    out.uniqueness_margin = proj.uniqueness_margin();
    if !proj.unique {
        out.witnesses.push(Witness::NonUniqueProjection {
            probe: x.clone(),
            minimizers: proj.minimizers.clone(),
            distance: proj.distance,
            second_distance: proj.second_distance.unwrap_or(proj.distance),
        });
        return out;
    }
    match horobowl_margin(model, x, &proj.minimizers[0], members) {
        Ok((margin, _tol, worst)) => {
            out.horobowl_margin = Some(margin);
            if let Some((member, value)) = worst {
                out.witnesses.push(Witness::HorobowlViolation {
                    probe: x.clone(),
                    foot: proj.minimizers[0].clone(),
                    member,
                    busemann_value: value,
                });
            }
        }
        Err(e) => out.witnesses.push(Witness::ProbeFailure {
            probe: x.clone(),
            message: e.to_string(),
        }),
    }
    if run_motzkin && proj.distance > 10.0 * MOTZKIN_H {
        match check_motzkin_gradient(ctx, x, MOTZKIN_H) {
            Ok(dev) => {
                out.gradient_deviation = Some(dev);
                if dev > KINK_THRESHOLD {
                    out.witnesses.push(Witness::GradientKink {
                        probe: x.clone(),
                        deviation: dev,
                    });
                }
            }
            Err(_) => {
                // stencil straddled the boundary; skip quietly
            }
        }
    }
    out
}

/// Uniqueness sweep over the exterior grid probes; a partial certificate
/// with only the projection-uniqueness results filled in.
pub fn check_projection_uniqueness(
    model: &MetricModel,
    set: &ClosedSetSpec,
    probe_region: &Region,
    resolution: usize,
) -> Result<ConvexityCertificate> {
    certify_with(model, set, probe_region, resolution, 0, false)
}

/// Full weak-convexity certification: uniqueness on every probe, the
/// horobowl condition on probes with a unique projection, the Motzkin
/// gradient on every 4th probe.
pub fn certify_weak_convexity(
    model: &MetricModel,
    set: &ClosedSetSpec,
    probe_region: &Region,
    resolution: usize,
    seed: u64,
) -> Result<ConvexityCertificate> {
    certify_with(model, set, probe_region, resolution, seed, true)
}

/// Search region used behind a probe region: inflated so projection feet of
/// edge probes stay interior, clamped back inside the chart when needed.
fn inflated_region(model: &MetricModel, region: &Region) -> Region {
    let f = 0.15;
    let n = region.dim();
    let mut lo: Vec<f64> = (0..n)
        .map(|i| region.min[i] - f * (region.max[i] - region.min[i]))
        .collect();
    let mut hi: Vec<f64> = (0..n)
        .map(|i| region.max[i] + f * (region.max[i] - region.min[i]))
        .collect();
    if matches!(model, MetricModel::HyperbolicHalfPlane { .. }) {
        lo[n - 1] = lo[n - 1].max(0.5 * region.min[n - 1]);
    }
    for _ in 0..60 {
        if let Ok(r) = Region::new(lo.clone(), hi.clone()) {
            if model.check_region(&r).is_ok() {
                return r;
            }
        }
        for i in 0..n {
            lo[i] = 0.5 * (lo[i] + region.min[i]);
            hi[i] = 0.5 * (hi[i] + region.max[i]);
        }
    }
    region.clone()
}

fn certify_with(
    model: &MetricModel,
    set: &ClosedSetSpec,
    probe_region: &Region,
    resolution: usize,
    seed: u64,
    full: bool,
) -> Result<ConvexityCertificate> {
    let search_region = inflated_region(model, probe_region);
    let params = SearchParams::new(search_region).with_resolution(resolution.min(64));
    let ctx = ProjectionContext::new(model, set, params)?;
    let members = if full {
        sample_members(model, set, probe_region, resolution.min(128))?
    } else {
        Vec::new()
    };

    let n = probe_region.dim();
    let counts = vec![resolution; n];
    let mut probes: Vec<Point> = Vec::new();
    for idx in Region::grid_indices(&counts) {
        let c = probe_region.grid_point(&idx, &counts);
        if !model.in_chart(&c) {
            continue;
        }
        let p = Point { coords: c };
        // the definition concerns exterior points only; members and
        // boundary-tolerance points are skipped
        if set.defect(model, &p)? > DELTA_BOUNDARY {
            probes.push(p);
        }
    }
    if probes.is_empty() {
        return Err(Error::invalid(
            "no exterior probes: the region lies inside the set",
        ));
    }

    // probes are independent; merge in probe-index order for determinism
    let outcomes: Vec<ProbeOutcome> = probes
        .par_iter()
        .enumerate()
        .map(|(i, x)| probe_one(&ctx, &members, x, full && i % 4 == 0))
        .collect();

    let mut cert = ConvexityCertificate {
        verdict: Verdict::ConsistentAtResolution,
        region: probe_region.clone(),
        resolution,
        probes: probes.len(),
        min_uniqueness_margin: None,
        min_horobowl_margin: None,
        max_gradient_deviation: None,
        witnesses: Vec::new(),
        seed,
    };
    for mut o in outcomes {
        cert.min_uniqueness_margin = min_opt(cert.min_uniqueness_margin, o.uniqueness_margin);
        cert.min_horobowl_margin = min_opt(cert.min_horobowl_margin, o.horobowl_margin);
        cert.max_gradient_deviation = match (cert.max_gradient_deviation, o.gradient_deviation) {
            (a, None) => a,
            (None, b) => b,
            (Some(a), Some(b)) => Some(a.max(b)),
        };
        cert.witnesses.append(&mut o.witnesses);
    }
    if !cert.witnesses.is_empty() {
        cert.verdict = Verdict::Violated;
    }
    Ok(cert)
}

fn min_opt(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (x, None) => x,
        (None, y) => y,
        (Some(x), Some(y)) => Some(x.min(y)),
    }
}

/// A geodesic-convexity violation: the barycenter of two members left the
/// set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexityViolation {
    pub a: Point,
    pub b: Point,
    pub t: f64,
    pub barycenter: Point,
    pub defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicConvexityReport {
    pub pairs: usize,
    pub violations: Vec<ConvexityViolation>,
}

impl GeodesicConvexityReport {
    pub fn convex(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks membership of barycenters on a 32-point grid along the geodesic
/// between each sampled member pair.
pub fn check_geodesic_convexity(
    model: &MetricModel,
    set: &ClosedSetSpec,
    pairs: &[(Point, Point)],
) -> Result<GeodesicConvexityReport> {
    if pairs.len() < 1 {
        return Err(Error::invalid("geodesic convexity needs member pairs"));
    }
    let mut report = GeodesicConvexityReport {
        pairs: pairs.len(),
        violations: Vec::new(),
    };
    for (a, b) in pairs {
        for (a, name) in [(a, "first"), (b, "second")] {
            if !set.contains(model, a)? {
                return Err(Error::invalid(format!(
                    "{name} endpoint {:?} is not a member",
                    a.coords
                )));
            }
        }
        for i in 1..31 {
            let t = i as f64 / 31.0;
            let p = barycenter(model, a, b, t)?;
            let defect = set.defect(model, &p)?;
            if defect > DELTA_BOUNDARY {
                report.violations.push(ConvexityViolation {
                    a: a.clone(),
                    b: b.clone(),
                    t,
                    barycenter: p,
                    defect,
                });
            }
        }
    }
    Ok(report)
}

/// Seeded member pairs for the geodesic-convexity check.
pub fn sample_member_pairs(
    model: &MetricModel,
    set: &ClosedSetSpec,
    region: &Region,
    resolution: usize,
    count: usize,
    seed: u64,
) -> Result<Vec<(Point, Point)>> {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    let members = sample_members(model, set, region, resolution)?;
    if members.len() < 2 {
        return Err(Error::invalid("fewer than 2 members found in the region"));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::with_capacity(count);
    for _ in 0..count {
        let picks: Vec<&Point> = members.choose_multiple(&mut rng, 2).collect();
        pairs.push((picks[0].clone(), picks[1].clone()));
    }
    Ok(pairs)
}
