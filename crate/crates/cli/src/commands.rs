//! The command implementations. Each returns a JSON report, the process
//! exit code, and an optional SVG document.

use serde_json::{json, Value};

use hadamard_core::convexity::{self, Witness};
use hadamard_core::counterexample::{self, TheoremScene};
use hadamard_core::geodesy::{self, UnitTangent};
use hadamard_core::horo::{self, BusemannFunctional};
use hadamard_core::manifold::{MetricModel, Point, Region, TangentVector};
use hadamard_core::retract;
use hadamard_core::sets::{self, ClosedSetSpec, ProjectionContext, SearchParams, DELTA_BOUNDARY};
use hadamard_core::Error;

use crate::scene::SceneFile;
use crate::svg::{Canvas, PALETTE};
use crate::Failure;

pub struct Outcome {
    pub report: Value,
    pub exit: i32,
    pub svg: Option<String>,
}

/// Effective scalar knobs after flag overrides.
pub struct Knobs {
    pub resolution: Option<usize>,
    pub epsilon: Option<f64>,
    pub seed: u64,
}

fn dom(e: Error) -> Failure {
    Failure::domain(e.to_string())
}

fn envelope(command: &str, scene: &SceneFile, seed: u64) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("command".into(), json!(command));
    m.insert("metric".into(), json!(scene.metric));
    m.insert("seed".into(), json!(seed));
    m
}

// ---------------------------------------------------------------------------
// curvature

pub fn curvature(scene: &SceneFile, knobs: &Knobs, want_svg: bool) -> Result<Outcome, Failure> {
    let region = scene.require_region()?;
    let grid = knobs.resolution.unwrap_or(16).clamp(4, 128);
    let report = scene
        .metric
        .verify_curvature_bounds(region, grid)
        .map_err(dom)?;
    let ok = report.all_in_bounds;
    let mut out = envelope("curvature", scene, knobs.seed);
    out.insert("grid".into(), json!(grid));
    out.insert("curvature_bound".into(), json!(scene.metric.curvature_bound()));
    out.insert("report".into(), json!(report));
    out.insert("ok".into(), json!(ok));
    let svg = if want_svg {
        Some(frame_only_svg(&scene.metric, region)?)
    } else {
        None
    };
    Ok(Outcome {
        report: Value::Object(out),
        exit: if ok { 0 } else { 4 },
        svg,
    })
}

// ---------------------------------------------------------------------------
// certify

pub fn certify(scene: &SceneFile, knobs: &Knobs, want_svg: bool) -> Result<Outcome, Failure> {
    let set = scene.require_set()?;
    let region = scene.require_region()?;
    let resolution = knobs.resolution.or(scene.resolution).unwrap_or(16);
    let cert =
        convexity::certify_weak_convexity(&scene.metric, set, region, resolution, knobs.seed)
            .map_err(dom)?;
    let consistent = cert.consistent();
    let mut out = envelope("certify", scene, knobs.seed);
    out.insert("resolution".into(), json!(resolution));
    out.insert("certificate".into(), json!(cert));
    out.insert("consistent".into(), json!(consistent));
    let svg = if want_svg {
        let mut canvas = set_shading_svg(&scene.metric, set, region)?;
        for w in &cert.witnesses {
            let probe = match w {
                Witness::NonUniqueProjection { probe, .. }
                | Witness::HorobowlViolation { probe, .. }
                | Witness::GradientKink { probe, .. }
                | Witness::ProbeFailure { probe, .. } => probe,
            };
            canvas.cross([probe.coords[0], probe.coords[1]], 5.0, "#d62728");
        }
        Some(canvas.finish())
    } else {
        None
    };
    Ok(Outcome {
        report: Value::Object(out),
        exit: if consistent { 0 } else { 4 },
        svg,
    })
}

// ---------------------------------------------------------------------------
// retract

pub fn retract(scene: &SceneFile, knobs: &Knobs, want_svg: bool) -> Result<Outcome, Failure> {
    let set = scene.require_set()?;
    let region = scene.require_region()?;
    let x = scene.require_point()?;
    let steps = scene.steps.unwrap_or(10);
    let resolution = knobs.resolution.or(scene.resolution).unwrap_or(32);
    let params = SearchParams::new(region.clone()).with_resolution(resolution);
    let ctx = ProjectionContext::new(&scene.metric, set, params).map_err(dom)?;
    let trace = match retract::retract_trace(&ctx, &x, steps) {
        Ok(t) => t,
        Err(e @ Error::NonUniqueProjection { .. }) => {
            return Err(Failure::violation(format!("retraction undefined: {e}")))
        }
        Err(e) => return Err(dom(e)),
    };
    let mut out = envelope("retract", scene, knobs.seed);
    out.insert("resolution".into(), json!(resolution));
    out.insert("steps".into(), json!(steps));
    out.insert("trace".into(), json!(trace));
    let svg = if want_svg {
        let mut canvas = set_shading_svg(&scene.metric, set, region)?;
        for p in sets::boundary_sample(&scene.metric, set, region, 64).map_err(dom)? {
            canvas.dot([p.coords[0], p.coords[1]], 1.5, "#303030");
        }
        let pts: Vec<[f64; 2]> = trace
            .samples
            .iter()
            .map(|(_, p)| [p.coords[0], p.coords[1]])
            .collect();
        canvas.polyline(&pts, "#d62728", 2.0);
        canvas.dot([trace.start.coords[0], trace.start.coords[1]], 4.0, "#d62728");
        canvas.dot(
            [trace.endpoint.coords[0], trace.endpoint.coords[1]],
            4.0,
            "#2a6fb0",
        );
        Some(canvas.finish())
    } else {
        None
    };
    Ok(Outcome {
        report: Value::Object(out),
        exit: 0,
        svg,
    })
}

// ---------------------------------------------------------------------------
// project

pub fn project(scene: &SceneFile, knobs: &Knobs, want_svg: bool) -> Result<Outcome, Failure> {
    let set = scene.require_set()?;
    let region = scene.require_region()?;
    let x = scene.require_point()?;
    let resolution = knobs.resolution.or(scene.resolution).unwrap_or(32);
    let params = SearchParams::new(region.clone()).with_resolution(resolution);
    let ctx = ProjectionContext::new(&scene.metric, set, params).map_err(dom)?;
    let result = ctx.project(&x).map_err(dom)?;
    let mut out = envelope("project", scene, knobs.seed);
    out.insert("resolution".into(), json!(resolution));
    out.insert("point".into(), json!(x));
    out.insert("result".into(), json!(result));
    let svg = if want_svg {
        let mut canvas = set_shading_svg(&scene.metric, set, region)?;
        canvas.dot([x.coords[0], x.coords[1]], 4.0, "#d62728");
        for m in &result.minimizers {
            canvas.dot([m.coords[0], m.coords[1]], 4.0, "#2a6fb0");
            canvas.line(
                [x.coords[0], x.coords[1]],
                [m.coords[0], m.coords[1]],
                "#808080",
                1.0,
            );
        }
        Some(canvas.finish())
    } else {
        None
    };
    Ok(Outcome {
        report: Value::Object(out),
        exit: 0,
        svg,
    })
}

// ---------------------------------------------------------------------------
// geodesic

pub fn geodesic(scene: &SceneFile, knobs: &Knobs, want_svg: bool) -> Result<Outcome, Failure> {
    let x = scene.require_point()?;
    let model = &scene.metric;
    let mut out = envelope("geodesic", scene, knobs.seed);
    out.insert("point".into(), json!(x));

    let path = if let Some(target) = &scene.target {
        // boundary-value solve between the two scene points
        let y = Point::new(target.clone()).map_err(|e| Failure::schema(e.to_string()))?;
        let path = geodesy::connect_bvp(model, &x, &y).map_err(dom)?;
        out.insert("target".into(), json!(y));
        out.insert("distance".into(), json!(path.length));
        path
    } else {
        // initial-value integration of point + direction over `time`
        let direction = scene.require_direction()?;
        let time = scene
            .time
            .ok_or_else(|| Failure::schema("geodesic needs \"target\" or \"direction\" + \"time\""))?;
        let v = TangentVector::new(x.clone(), direction)
            .map_err(|e| Failure::schema(e.to_string()))?;
        let samples = 33;
        let mut path_samples = Vec::with_capacity(samples);
        for i in 0..samples {
            let t = time * i as f64 / (samples - 1) as f64;
            let (p, vel) = geodesy::exp_ivp(model, &v, t).map_err(dom)?;
            path_samples.push(geodesy::GeodesicSample {
                time: t,
                point: p,
                velocity: vel,
            });
        }
        let speed = model.norm(&v);
        geodesy::GeodesicPath {
            samples: path_samples,
            length: speed * time.abs(),
            speed,
        }
    };
    out.insert("endpoint".into(), json!(path.end().point));
    out.insert("length".into(), json!(path.length));
    out.insert("path".into(), json!(path));

    let svg = if want_svg {
        let region = scene.require_region()?;
        let mut canvas = frame_canvas(model, region)?;
        let pts: Vec<[f64; 2]> = path
            .samples
            .iter()
            .map(|s| [s.point.coords[0], s.point.coords[1]])
            .collect();
        canvas.polyline(&pts, "#2a6fb0", 2.0);
        canvas.dot(pts[0], 4.0, "#d62728");
        canvas.dot(pts[pts.len() - 1], 4.0, "#2a6fb0");
        Some(canvas.finish())
    } else {
        None
    };
    Ok(Outcome {
        report: Value::Object(out),
        exit: 0,
        svg,
    })
}

// ---------------------------------------------------------------------------
// busemann

pub fn busemann(scene: &SceneFile, knobs: &Knobs, want_svg: bool) -> Result<Outcome, Failure> {
    let base = scene.require_point()?;
    let direction = scene.require_direction()?;
    let target = scene
        .target
        .clone()
        .ok_or_else(|| Failure::schema("busemann needs \"target\""))?;
    let x = Point::new(target).map_err(|e| Failure::schema(e.to_string()))?;
    let model = &scene.metric;
    let ray = UnitTangent::normalize(
        model,
        TangentVector::new(base.clone(), direction).map_err(|e| Failure::schema(e.to_string()))?,
    )
    .map_err(dom)?;

    let numeric = BusemannFunctional::numeric(ray.clone())
        .evaluate(model, &x)
        .map_err(dom)?;
    let closed = match model {
        MetricModel::Conformal { .. } => None,
        _ => Some(horo::busemann_closed_form(model, &BusemannFunctional::for_model(model, ray.clone()), &x).map_err(dom)?),
    };

    let mut out = envelope("busemann", scene, knobs.seed);
    out.insert("ray".into(), json!(ray));
    out.insert("point".into(), json!(x));
    out.insert("numeric".into(), json!(numeric));
    out.insert("closed_form".into(), json!(closed));
    let svg = if want_svg {
        let region = scene.require_region()?;
        let mut canvas = frame_canvas(model, region)?;
        // level sets of the Busemann function through a few offsets
        let f = BusemannFunctional::for_model(model, ray.clone());
        let shells: Vec<f64> = vec![-0.5, 0.0, 0.5, 1.0];
        for (i, level) in shells.iter().enumerate() {
            let spec = horo::HoroballSpec {
                functional: f.clone(),
                level: *level,
                open: false,
            };
            let shell = ClosedSetSpec::horosphere_shell(spec);
            if let Ok(pts) = sets::boundary_sample(model, &shell, region, 96) {
                for p in pts {
                    canvas.dot([p.coords[0], p.coords[1]], 1.0, PALETTE[i % PALETTE.len()]);
                }
            }
        }
        canvas.dot([base.coords[0], base.coords[1]], 4.0, "#d62728");
        canvas.dot([x.coords[0], x.coords[1]], 4.0, "#2a6fb0");
        Some(canvas.finish())
    } else {
        None
    };
    Ok(Outcome {
        report: Value::Object(out),
        exit: 0,
        svg,
    })
}

// ---------------------------------------------------------------------------
// counterexample

pub fn counterexample(
    scene: &SceneFile,
    knobs: &Knobs,
    want_svg: bool,
) -> Result<Outcome, Failure> {
    let epsilon = knobs.epsilon.or(scene.epsilon).unwrap_or(0.3);
    let resolution = knobs.resolution.or(scene.resolution).unwrap_or(128);
    match scene.metric {
        MetricModel::Euclidean { dim: 2 } => {
            let report = counterexample::euclidean_control(epsilon, resolution).map_err(dom)?;
            let mut out = envelope("counterexample", scene, knobs.seed);
            out.insert("epsilon".into(), json!(epsilon));
            out.insert("resolution".into(), json!(resolution));
            out.insert("control".into(), json!(report));
            Ok(Outcome {
                report: Value::Object(out),
                exit: 0,
                svg: None,
            })
        }
        MetricModel::HyperbolicHalfPlane { dim } if dim == 2 || dim == 3 => {
            hyperbolic_counterexample(scene, knobs, epsilon, resolution, want_svg)
        }
        _ => Err(Failure::schema(
            "counterexample expects a euclidean (dim 2) or hyperbolic-half-plane metric",
        )),
    }
}

fn hyperbolic_counterexample(
    scene: &SceneFile,
    knobs: &Knobs,
    epsilon: f64,
    resolution: usize,
    want_svg: bool,
) -> Result<Outcome, Failure> {
    let model = &scene.metric;
    let n = model.dim();
    let region = match &scene.region {
        Some(r) => r.clone(),
        None => {
            // chart floor above the absolute; the omitted sliver lies
            // inside the removed horoball near the tangency point
            let mut lo = vec![-2.0; n];
            let mut hi = vec![2.0; n];
            lo[n - 1] = 0.02;
            hi[n - 1] = 1.2;
            Region::new(lo, hi).map_err(dom)?
        }
    };
    let base = match &scene.point {
        Some(c) => Point::new(c.clone()).map_err(|e| Failure::schema(e.to_string()))?,
        None => {
            let mut c = vec![0.0; n];
            c[n - 1] = 1.0;
            Point::new(c).map_err(dom)?
        }
    };
    let direction = scene.direction.clone().unwrap_or_else(|| {
        let mut d = vec![0.0; n];
        d[n - 1] = 1.0;
        d
    });

    let theorem_scene =
        counterexample::build_theorem_scene(model, &base, &direction, epsilon, &region, resolution)
            .map_err(dom)?;
    let components =
        counterexample::connected_components(model, &theorem_scene.intersection, &region, resolution)
            .map_err(dom)?;
    let witness = counterexample::nonuniqueness_witness(model, &theorem_scene);
    let (witness_value, witness_error) = match &witness {
        Ok(w) => (json!(w), Value::Null),
        Err(e) => (Value::Null, json!(e.to_string())),
    };

    // the individual factors are certified at a modest resolution; the
    // disconnection of their intersection lives at the grid resolution
    let cert_resolution = resolution.clamp(16, 24);
    let g1_cert = convexity::certify_weak_convexity(
        model,
        &theorem_scene.g1,
        &region,
        cert_resolution,
        knobs.seed,
    )
    .map_err(dom)?;
    let g2_cert = convexity::certify_weak_convexity(
        model,
        &theorem_scene.g2,
        &region,
        cert_resolution,
        knobs.seed,
    )
    .map_err(dom)?;

    let mut out = envelope("counterexample", scene, knobs.seed);
    out.insert("epsilon".into(), json!(epsilon));
    out.insert("resolution".into(), json!(resolution));
    out.insert("base".into(), json!(base));
    out.insert("components".into(), json!(components.count));
    out.insert("interior_cells".into(), json!(components.interior_cells));
    out.insert("witness".into(), witness_value);
    out.insert("witness_error".into(), witness_error);
    out.insert("g1_consistent".into(), json!(g1_cert.consistent()));
    out.insert("g2_consistent".into(), json!(g2_cert.consistent()));
    out.insert("g1_certificate".into(), json!(g1_cert));
    out.insert("g2_certificate".into(), json!(g2_cert));

    let svg = if want_svg {
        Some(counterexample_svg(model, &theorem_scene, &region, &witness.ok())?)
    } else {
        None
    };
    Ok(Outcome {
        report: Value::Object(out),
        exit: 0,
        svg,
    })
}

fn counterexample_svg(
    model: &MetricModel,
    theorem_scene: &TheoremScene,
    region: &Region,
    witness: &Option<counterexample::NonUniquenessWitness>,
) -> Result<String, Failure> {
    if model.dim() != 2 {
        return Err(Failure::domain("svg rendering is limited to 2-d charts"));
    }
    // shade at a plot resolution: a full 512 grid would dominate file size
    let plot_res = 128;
    let comp = counterexample::connected_components(
        model,
        &theorem_scene.intersection,
        region,
        plot_res,
    )
    .map_err(dom)?;
    let mut canvas = Canvas::new(region);
    let cw = (region.max[0] - region.min[0]) / (plot_res - 1) as f64;
    let ch = (region.max[1] - region.min[1]) / (plot_res - 1) as f64;
    for i in 0..plot_res {
        for j in 0..plot_res {
            let label = comp.labels[i * plot_res + j];
            if label < 0 {
                continue;
            }
            let x = region.min[0] + cw * i as f64;
            let y = region.min[1] + ch * j as f64;
            canvas.cell([x, y], cw, ch, PALETTE[label as usize % PALETTE.len()]);
        }
    }
    canvas.axes();
    canvas.chart_boundary(model);
    // boundaries of the two removed horoballs
    for set in [&theorem_scene.g1, &theorem_scene.g2] {
        if let Ok(pts) = sets::boundary_sample(model, set, region, 96) {
            for p in pts {
                canvas.dot([p.coords[0], p.coords[1]], 1.0, "#303030");
            }
        }
    }
    if let Some(w) = witness {
        canvas.cross([w.x.coords[0], w.x.coords[1]], 5.0, "#d62728");
        for m in &w.minimizers {
            // witness geodesics drawn as chart polylines through barycenters
            let mut pts = Vec::new();
            for k in 0..=16 {
                let t = k as f64 / 16.0;
                if let Ok(p) = geodesy::barycenter(model, &w.x, m, t) {
                    pts.push([p.coords[0], p.coords[1]]);
                }
            }
            canvas.polyline(&pts, "#d62728", 1.5);
            canvas.dot([m.coords[0], m.coords[1]], 3.0, "#d62728");
        }
    }
    Ok(canvas.finish())
}

// ---------------------------------------------------------------------------
// svg helpers

fn frame_canvas(model: &MetricModel, region: &Region) -> Result<Canvas, Failure> {
    if region.dim() != 2 {
        return Err(Failure::domain("svg rendering is limited to 2-d charts"));
    }
    let mut canvas = Canvas::new(region);
    canvas.axes();
    canvas.chart_boundary(model);
    Ok(canvas)
}

fn frame_only_svg(model: &MetricModel, region: &Region) -> Result<String, Failure> {
    Ok(frame_canvas(model, region)?.finish())
}

/// Region canvas with the set's membership shaded on a coarse grid.
fn set_shading_svg(
    model: &MetricModel,
    set: &ClosedSetSpec,
    region: &Region,
) -> Result<Canvas, Failure> {
    let mut canvas = frame_canvas(model, region)?;
    let res = 96usize;
    let cw = (region.max[0] - region.min[0]) / (res - 1) as f64;
    let ch = (region.max[1] - region.min[1]) / (res - 1) as f64;
    for i in 0..res {
        for j in 0..res {
            let x = region.min[0] + cw * i as f64;
            let y = region.min[1] + ch * j as f64;
            if !model.in_chart(&[x, y]) {
                continue;
            }
            let p = Point {
                coords: vec![x, y],
            };
            if set.defect(model, &p).map(|d| d <= DELTA_BOUNDARY).unwrap_or(false) {
                canvas.cell([x, y], cw, ch, "#d3e4f3");
            }
        }
    }
    canvas.axes();
    canvas.chart_boundary(model);
    Ok(canvas)
}
