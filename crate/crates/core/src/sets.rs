//! Closed subsets of the chart as an expression tree over primitives, with
//! membership, distance and metric-projection oracles.
//!
//! Every primitive leaf supplies a signed defect function (nonpositive on
//! the set, increasing outward) so boundary bisection and projected descent
//! have something smooth to work with. Intersections take the max defect,
//! unions the min.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geodesy::fast_distance;
use crate::horo::HoroballSpec;
use crate::manifold::{MetricModel, Point, Region, TangentVector};

/// Points with |defect| below this are treated as members (closed sets keep
/// their boundary).
pub const DELTA_BOUNDARY: f64 = 1e-9;
/// Accuracy of reported set distances versus further refinement.
pub const TOL_PROJ: f64 = 1e-6;
/// Chart separation below which two minimizers are numerical twins.
pub const SEP_MIN: f64 = 1e-3;

/// Catalog of smooth sublevel primitives f <= 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case")]
pub enum SmoothSublevel {
    /// The chart sphere | ||p - c|| - r | <= 0 (the shell itself).
    SphereShell { center: Vec<f64>, radius: f64 },
    /// The chart ball ||p - c|| - r <= 0.
    ChartBall { center: Vec<f64>, radius: f64 },
}

impl SmoothSublevel {
    fn defect(&self, c: &[f64]) -> f64 {
        match self {
            SmoothSublevel::SphereShell { center, radius } => {
                (chart_norm(c, center) - radius).abs()
            }
            SmoothSublevel::ChartBall { center, radius } => chart_norm(c, center) - radius,
        }
    }
}

fn chart_norm(c: &[f64], center: &[f64]) -> f64 {
    c.iter()
        .zip(center)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum SetPrimitive {
    /// Closed riemannian ball {d(center, .) <= radius}.
    GeodesicBall { center: Point, radius: f64 },
    /// Closed complement {B >= level} of an open horoball.
    HoroballComplement { horoball: HoroballSpec },
    /// Closed horoball {B <= level}.
    ClosedHoroball { horoball: HoroballSpec },
    /// Chart halfspace {a . x <= b}.
    ChartHalfspace { normal: Vec<f64>, offset: f64 },
    /// Catalog smooth sublevel {f <= 0}.
    Sublevel { function: SmoothSublevel },
}

/// Expression tree of closed sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case")]
pub enum ClosedSetSpec {
    Primitive { prim: Box<SetPrimitive> },
    Intersect { args: Vec<ClosedSetSpec> },
    Union { args: Vec<ClosedSetSpec> },
}

impl ClosedSetSpec {
    pub fn primitive(p: SetPrimitive) -> Self {
        ClosedSetSpec::Primitive { prim: Box::new(p) }
    }

    pub fn intersect(args: Vec<ClosedSetSpec>) -> Self {
        ClosedSetSpec::Intersect { args }
    }

    pub fn union(args: Vec<ClosedSetSpec>) -> Self {
        ClosedSetSpec::Union { args }
    }

    pub fn halfspace(normal: Vec<f64>, offset: f64) -> Self {
        Self::primitive(SetPrimitive::ChartHalfspace { normal, offset })
    }

    pub fn geodesic_ball(center: Point, radius: f64) -> Self {
        Self::primitive(SetPrimitive::GeodesicBall { center, radius })
    }

    pub fn horoball_complement(h: HoroballSpec) -> Self {
        Self::primitive(SetPrimitive::HoroballComplement { horoball: h })
    }

    pub fn closed_horoball(h: HoroballSpec) -> Self {
        Self::primitive(SetPrimitive::ClosedHoroball { horoball: h })
    }

    /// The horosphere {B = level} as closed horoball meet complement.
    pub fn horosphere_shell(h: HoroballSpec) -> Self {
        ClosedSetSpec::intersect(vec![
            Self::closed_horoball(h.clone()),
            Self::horoball_complement(h),
        ])
    }

    /// Signed defect: <= 0 on the set, > 0 outside, continuous.
    pub fn defect(&self, model: &MetricModel, x: &Point) -> Result<f64> {
        match self {
            ClosedSetSpec::Primitive { prim } => match prim.as_ref() {
                SetPrimitive::GeodesicBall { center, radius } => {
                    Ok(fast_distance(model, center, x)? - radius)
                }
                SetPrimitive::HoroballComplement { horoball } => {
                    // inside when B >= level
                    Ok(horoball.level - horoball.functional.evaluate(model, x)?.value)
                }
                SetPrimitive::ClosedHoroball { horoball } => {
                    Ok(horoball.functional.evaluate(model, x)?.value - horoball.level)
                }
                SetPrimitive::ChartHalfspace { normal, offset } => Ok(x
                    .coords
                    .iter()
                    .zip(normal)
                    .map(|(a, b)| a * b)
                    .sum::<f64>()
                    - offset),
                SetPrimitive::Sublevel { function } => Ok(function.defect(&x.coords)),
            },
            ClosedSetSpec::Intersect { args } => {
                let mut worst = f64::NEG_INFINITY;
                for a in args {
                    worst = worst.max(a.defect(model, x)?);
                }
                Ok(worst)
            }
            ClosedSetSpec::Union { args } => {
                let mut best = f64::INFINITY;
                for a in args {
                    best = best.min(a.defect(model, x)?);
                }
                Ok(best)
            }
        }
    }

    pub fn contains(&self, model: &MetricModel, x: &Point) -> Result<bool> {
        Ok(self.defect(model, x)? <= DELTA_BOUNDARY)
    }
}

/// Search configuration for projection queries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchParams {
    pub region: Region,
    pub grid_resolution: usize,
    pub refine_iters: usize,
}

impl SearchParams {
    pub fn new(region: Region) -> Self {
        SearchParams {
            region,
            grid_resolution: 32,
            refine_iters: 120,
        }
    }

    pub fn with_resolution(mut self, r: usize) -> Self {
        self.grid_resolution = r;
        self
    }
}

/// Result of a metric projection query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionResult {
    pub distance: f64,
    /// All minimizers realizing the distance within TOL_PROJ, best first.
    pub minimizers: Vec<Point>,
    pub unique: bool,
    /// Best distance among refined candidates at chart separation
    /// >= 10 SEP_MIN from the leading minimizer.
    pub second_distance: Option<f64>,
    /// Set when refinement stopped before reaching full accuracy.
    pub degraded: bool,
}

impl ProjectionResult {
    /// Gap between the best and the nearest genuinely distinct candidate.
    pub fn uniqueness_margin(&self) -> Option<f64> {
        self.second_distance.map(|s| s - self.distance)
    }
}

/// Precomputed boundary seeds for repeated projection queries against one
/// set over one region.
pub struct ProjectionContext<'a> {
    pub model: &'a MetricModel,
    pub set: &'a ClosedSetSpec,
    pub params: SearchParams,
    seeds: Vec<Point>,
    cell: f64,
}

impl<'a> ProjectionContext<'a> {
    pub fn new(
        model: &'a MetricModel,
        set: &'a ClosedSetSpec,
        params: SearchParams,
    ) -> Result<Self> {
        model.check_region(&params.region)?;
        if params.grid_resolution < 4 {
            return Err(Error::invalid("grid resolution must be >= 4"));
        }
        let region = &params.region;
        let n = region.dim();
        let counts = vec![params.grid_resolution; n];
        let cell = (0..n)
            .map(|i| (region.max[i] - region.min[i]) / (params.grid_resolution - 1) as f64)
            .fold(0.0f64, |acc, w| acc.max(w));

        // Seeds: grid points close enough to the set that a feasibility
        // restore can land on it. The tolerance is a cell diagonal scaled
        // by the local conformal factor so metric-valued defects compare.
        let mut seeds = Vec::new();
        let mut any_member = false;
        for idx in Region::grid_indices(&counts) {
            let c = region.grid_point(&idx, &counts);
            if !model.in_chart(&c) {
                continue;
            }
            let p = Point { coords: c };
            let d = set.defect(model, &p)?;
            if d <= DELTA_BOUNDARY {
                any_member = true;
            }
            let slack = 2.0 * cell * (n as f64).sqrt() * (1.0 + model.scale(&p.coords));
            if d.abs() <= slack {
                seeds.push(p);
            }
        }
        if !any_member && seeds.is_empty() {
            return Err(Error::EmptySet);
        }
        if !any_member {
            // near-boundary cells only; check one restores onto the set
            let ok = seeds
                .iter()
                .any(|s| restore_feasible(model, set, s.clone()).is_some());
            if !ok {
                return Err(Error::EmptySet);
            }
        }
        Ok(ProjectionContext {
            model,
            set,
            params,
            seeds,
            cell,
        })
    }

    pub fn cell_size(&self) -> f64 {
        self.cell
    }

    /// Closed-form projection onto a single Busemann sublevel or superlevel
    /// set: B has unit riemannian gradient, so the distance from an exterior
    /// point is |B(x) - level| exactly and the unique foot lies at that arc
    /// length along the gradient geodesic. The generic multi-start search is
    /// ill-conditioned exactly where horospheres osculate distance spheres,
    /// so this path is used whenever the set is one closed-form horoball
    /// primitive.
    fn project_busemann_level(&self, x: &Point) -> Result<Option<ProjectionResult>> {
        let model = self.model;
        let ClosedSetSpec::Primitive { prim } = self.set else {
            return Ok(None);
        };
        let (horoball, toward_sublevel) = match prim.as_ref() {
            // complement {B >= level}: exterior points have B < level and
            // move along +grad B
            SetPrimitive::HoroballComplement { horoball } => (horoball, false),
            // closed horoball {B <= level}: exterior points move along -grad B
            SetPrimitive::ClosedHoroball { horoball } => (horoball, true),
            _ => return Ok(None),
        };
        if !matches!(horoball.functional.mode, crate::horo::EvalMode::ClosedForm) {
            // finite-differencing a truncated numeric Busemann value is too
            // noisy for a gradient; those sets keep the generic search
            return Ok(None);
        }
        let b = |c: &[f64]| -> Result<f64> {
            let p = Point { coords: c.to_vec() };
            Ok(horoball.functional.evaluate(model, &p)?.value)
        };
        let span = (b(&x.coords)? - horoball.level).abs();
        let n = x.dim();
        let h = 1e-6;
        let mut grad = vec![0.0; n];
        for i in 0..n {
            let mut cp = x.coords.clone();
            let mut cm = x.coords.clone();
            cp[i] += h;
            cm[i] -= h;
            if !model.in_chart(&cp) || !model.in_chart(&cm) {
                return Ok(None);
            }
            grad[i] = (b(&cp)? - b(&cm)?) / (2.0 * h);
        }
        // raise the index: chart gradient -> tangent components
        let scale = model.scale(&x.coords);
        let mut dir: Vec<f64> = grad.iter().map(|g| g / (scale * scale)).collect();
        let norm = model.norm_at(&x.coords, &dir);
        if !(norm.is_finite() && norm > 1e-8) {
            return Ok(None);
        }
        let sign = if toward_sublevel { -1.0 } else { 1.0 };
        for d in dir.iter_mut() {
            *d *= sign / norm;
        }
        let v = TangentVector {
            base: x.clone(),
            components: dir,
        };
        let (foot, _) = crate::geodesy::exp_ivp(model, &v, span)?;
        Ok(Some(ProjectionResult {
            distance: span,
            minimizers: vec![foot],
            unique: true,
            second_distance: None,
            degraded: false,
        }))
    }

    /// Full projection query: multi-start refinement over the seed cloud.
    pub fn project(&self, x: &Point) -> Result<ProjectionResult> {
        let model = self.model;
        let set = self.set;
        model.check_point(x)?;
        if set.contains(model, x)? {
            return Ok(ProjectionResult {
                distance: 0.0,
                minimizers: vec![x.clone()],
                unique: true,
                second_distance: None,
                degraded: false,
            });
        }
        if let Some(result) = self.project_busemann_level(x)? {
            return Ok(result);
        }

        // rank seeds by distance to the probe
        let mut ranked: Vec<(f64, &Point)> = Vec::with_capacity(self.seeds.len());
        for s in &self.seeds {
            ranked.push((fast_distance(model, x, s)?, s));
        }
        if ranked.is_empty() {
            return Err(Error::EmptySet);
        }
        ranked.sort_by(|a, b| a.0.total_cmp(&b.0));
        let best_seed = ranked[0].0;
        let band = 2.0 * self.cell
            * (self.params.region.dim() as f64).sqrt()
            * (1.0 + model.scale(&ranked[0].1.coords));
        let mut starts: Vec<Point> = Vec::new();
        for (d, s) in &ranked {
            if *d > best_seed + band {
                break;
            }
            if starts.iter().all(|t| t.chart_dist(s) > self.cell * 0.75) {
                starts.push((*s).clone());
            }
            if starts.len() >= 24 {
                break;
            }
        }
        // farthest-point picks cover distant parts of the boundary so the
        // runner-up cluster is always refined for uniqueness margins
        for _ in 0..8 {
            let far = ranked
                .iter()
                .map(|(_, s)| *s)
                .max_by(|a, b| {
                    let da = starts
                        .iter()
                        .map(|t| t.chart_dist(a))
                        .fold(f64::INFINITY, f64::min);
                    let db = starts
                        .iter()
                        .map(|t| t.chart_dist(b))
                        .fold(f64::INFINITY, f64::min);
                    da.total_cmp(&db)
                })
                .cloned();
            match far {
                Some(s)
                    if starts
                        .iter()
                        .all(|t| t.chart_dist(&s) > (2.0 * self.cell).max(10.0 * SEP_MIN)) =>
                {
                    starts.push(s)
                }
                _ => break,
            }
        }

        let mut refined: Vec<(f64, Point, bool)> = Vec::new();
        for start in starts {
            if let Some((y, d, converged)) = self.refine(x, start) {
                refined.push((d, y, converged));
            }
        }
        if refined.is_empty() {
            return Err(Error::EmptySet);
        }
        refined.sort_by(|a, b| a.0.total_cmp(&b.0));

        // cluster by chart separation; ties at exactly SEP_MIN merge
        let mut reps: Vec<(f64, Point, bool)> = Vec::new();
        for (d, y, c) in refined {
            if let Some(rep) = reps
                .iter_mut()
                .find(|(_, ry, _)| ry.chart_dist(&y) <= SEP_MIN)
            {
                if d < rep.0 {
                    *rep = (d, y, c);
                }
            } else {
                reps.push((d, y, c));
            }
        }
        let best = reps[0].0;
        let best_point = reps[0].1.clone();

        // the best minimizer must be interior to the search region
        let region = &self.params.region;
        let edge_gap = best_point
            .coords
            .iter()
            .zip(region.min.iter().zip(&region.max))
            .map(|(v, (lo, hi))| (v - lo).abs().min((hi - v).abs()))
            .fold(f64::INFINITY, f64::min);
        if edge_gap < self.cell * 1e-3 {
            return Err(Error::RegionTooSmall);
        }

        // reps are distance-sorted, so the best foot always comes first;
        // ties below float resolution keep the deterministic start order
        let minimizers: Vec<Point> = reps
            .iter()
            .filter(|(d, _, _)| *d <= best + TOL_PROJ)
            .map(|(_, y, _)| y.clone())
            .collect();
        let second_distance = reps
            .iter()
            .filter(|(_, y, _)| y.chart_dist(&best_point) >= 10.0 * SEP_MIN)
            .map(|(d, _, _)| *d)
            .fold(None, |acc: Option<f64>, d| {
                Some(acc.map_or(d, |a| a.min(d)))
            });
        let unique = !second_distance.is_some_and(|s| s <= best + 2.0 * TOL_PROJ);
        let degraded = reps.iter().any(|(d, _, c)| !c && *d <= best + TOL_PROJ);
        Ok(ProjectionResult {
            distance: best,
            minimizers,
            unique,
            second_distance,
            degraded,
        })
    }

    /// Projected descent of y -> d(x, y) constrained to defect(y) <= 0.
    fn refine(&self, x: &Point, seed: Point) -> Option<(Point, f64, bool)> {
        let model = self.model;
        let set = self.set;
        let mut y = restore_feasible(model, set, seed)?;
        let mut dist = fast_distance(model, x, &y).ok()?;
        let mut step = self.cell * 0.5;
        let mut converged = false;
        let mut last_move: Option<Vec<f64>> = None;
        for _ in 0..self.params.refine_iters {
            // gradient projection: step against the distance gradient, then
            // pull the trial back onto the set; no defect normal needed, so
            // kinked defects (abs-type shells, max/min nodes) are fine
            let grad = fd_gradient(|c| fast_distance_raw(model, x, c), &y.coords)?;
            let dn: f64 = grad.iter().map(|a| a * a).sum::<f64>().sqrt();
            if dn < 1e-14 || step < 1e-11 {
                converged = true;
                break;
            }
            let unit: Vec<f64> = grad.iter().map(|a| -a / dn).collect();
            let mut improved = false;
            while step >= 1e-12 {
                let trial = Point {
                    coords: y
                        .coords
                        .iter()
                        .zip(&unit)
                        .map(|(a, u)| a + step * u)
                        .collect(),
                };
                if let Some(t) = restore_feasible(model, set, trial) {
                    if model.in_chart(&t.coords) {
                        if let Ok(d) = fast_distance(model, x, &t) {
                            if d < dist - 1e-16 {
                                // the restore cancels the normal part of the
                                // step, so extend along the net displacement
                                // to avoid crawling tangentially
                                let (t, d) = self.expand(x, &y, t, d);
                                // oscillating net moves mean the step keeps
                                // overshooting the minimum along the
                                // boundary: halve it; otherwise let it grow
                                let mv: Vec<f64> = t
                                    .coords
                                    .iter()
                                    .zip(&y.coords)
                                    .map(|(a, b)| a - b)
                                    .collect();
                                let reversed = last_move.as_ref().is_some_and(|lm: &Vec<f64>| {
                                    mv.iter().zip(lm).map(|(a, b)| a * b).sum::<f64>() < 0.0
                                });
                                last_move = Some(mv);
                                y = t;
                                dist = d;
                                improved = true;
                                step = if reversed {
                                    step * 0.5
                                } else {
                                    (step * 1.5).min(self.cell)
                                };
                                break;
                            }
                        }
                    }
                }
                step *= 0.5;
            }
            if !improved {
                converged = step < 1e-11;
                break;
            }
        }
        Some((y, dist, converged))
    }

    /// Doubling line search along the net displacement prev -> accepted.
    fn expand(&self, x: &Point, prev: &Point, mut best: Point, mut best_d: f64) -> (Point, f64) {
        let model = self.model;
        let set = self.set;
        let mut scale = 2.0f64;
        for _ in 0..40 {
            let trial = Point {
                coords: prev
                    .coords
                    .iter()
                    .zip(&best.coords)
                    .map(|(p, b)| p + scale * (b - p))
                    .collect(),
            };
            let Some(t) = restore_feasible(model, set, trial) else {
                break;
            };
            if !model.in_chart(&t.coords) {
                break;
            }
            let Ok(d) = fast_distance(model, x, &t) else {
                break;
            };
            if d < best_d - 1e-16 {
                best = t;
                best_d = d;
                scale *= 2.0;
            } else {
                break;
            }
        }
        (best, best_d)
    }
}

fn fast_distance_raw(model: &MetricModel, x: &Point, c: &[f64]) -> Option<f64> {
    let p = Point { coords: c.to_vec() };
    fast_distance(model, x, &p).ok()
}

fn fd_gradient(f: impl Fn(&[f64]) -> Option<f64>, c: &[f64]) -> Option<Vec<f64>> {
    fd_gradient_h(f, c, 1e-6)
}

fn fd_gradient_h(f: impl Fn(&[f64]) -> Option<f64>, c: &[f64], h: f64) -> Option<Vec<f64>> {
    let n = c.len();
    let mut g = vec![0.0; n];
    for i in 0..n {
        let mut cp = c.to_vec();
        let mut cm = c.to_vec();
        cp[i] += h;
        cm[i] -= h;
        g[i] = (f(&cp)? - f(&cm)?) / (2.0 * h);
    }
    Some(g)
}

/// Newton pulls along the defect gradient until |defect| <= tolerance.
///
/// The finite-difference step shrinks with the defect so kinked defects
/// (abs-type shells) never straddle their crease.
fn restore_feasible(model: &MetricModel, set: &ClosedSetSpec, mut y: Point) -> Option<Point> {
    for _ in 0..30 {
        let d = set.defect(model, &y).ok()?;
        if d <= 1e-12 {
            return Some(y);
        }
        let h = (0.1 * d).clamp(1e-12, 1e-6);
        let g = fd_gradient_h(
            |c| set.defect(model, &Point { coords: c.to_vec() }).ok(),
            &y.coords,
            h,
        )?;
        let gg: f64 = g.iter().map(|a| a * a).sum();
        if gg < 1e-20 {
            return None;
        }
        let y_new = Point {
            coords: y
                .coords
                .iter()
                .zip(&g)
                .map(|(a, gi)| a - d * gi / gg)
                .collect(),
        };
        if !model.in_chart(&y_new.coords) {
            return None;
        }
        y = y_new;
    }
    // accept boundary-tolerance members
    let d = set.defect(model, &y).ok()?;
    if d <= DELTA_BOUNDARY {
        Some(y)
    } else {
        None
    }
}

/// Pulls a near-boundary chart point onto the set, if it can be reached by
/// Newton steps on the defect. Used by member samplers for thin sets whose
/// defect never goes negative.
pub fn pull_onto_set(model: &MetricModel, set: &ClosedSetSpec, p: Point) -> Option<Point> {
    restore_feasible(model, set, p)
}

/// One-shot membership test.
pub fn contains(model: &MetricModel, set: &ClosedSetSpec, x: &Point) -> Result<bool> {
    model.check_point(x)?;
    set.contains(model, x)
}

/// One-shot distance query; prefer [`ProjectionContext`] for batches.
pub fn distance_to_set(
    model: &MetricModel,
    set: &ClosedSetSpec,
    x: &Point,
    params: &SearchParams,
) -> Result<ProjectionResult> {
    ProjectionContext::new(model, set, params.clone())?.project(x)
}

/// The unique metric projection of x onto the set.
pub fn project(
    model: &MetricModel,
    set: &ClosedSetSpec,
    x: &Point,
    params: &SearchParams,
) -> Result<Point> {
    let r = distance_to_set(model, set, x, params)?;
    if !r.unique {
        return Err(Error::NonUniqueProjection {
            probe: x.coords.clone(),
            count: r.minimizers.len().max(2),
        });
    }
    Ok(r.minimizers[0].clone())
}

/// Grid cells where membership flips, bisected onto the boundary.
pub fn boundary_sample(
    model: &MetricModel,
    set: &ClosedSetSpec,
    region: &Region,
    resolution: usize,
) -> Result<Vec<Point>> {
    model.check_region(region)?;
    if resolution < 8 {
        return Err(Error::invalid("boundary sampling needs resolution >= 8"));
    }
    let n = region.dim();
    let counts = vec![resolution; n];
    let idxs = Region::grid_indices(&counts);
    let mut out = Vec::new();
    for idx in &idxs {
        let c = region.grid_point(idx, &counts);
        if !model.in_chart(&c) {
            continue;
        }
        let da = set.defect(model, &Point { coords: c.clone() })?;
        for axis in 0..n {
            if idx[axis] + 1 >= resolution {
                continue;
            }
            let mut jdx = idx.clone();
            jdx[axis] += 1;
            let c2 = region.grid_point(&jdx, &counts);
            if !model.in_chart(&c2) {
                continue;
            }
            let db = set.defect(model, &Point { coords: c2.clone() })?;
            if (da <= 0.0) == (db <= 0.0) {
                continue;
            }
            // bisect the edge to the sign change
            let (mut lo, mut hi, mut flo) = (c.clone(), c2.clone(), da);
            for _ in 0..80 {
                let mid: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
                let fm = set.defect(model, &Point { coords: mid.clone() })?;
                if fm.abs() <= 1e-9 {
                    lo = mid;
                    break;
                }
                if (fm <= 0.0) == (flo <= 0.0) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            out.push(Point { coords: lo });
        }
    }
    if out.is_empty() {
        return Err(Error::NoBoundary);
    }
    Ok(out)
}
