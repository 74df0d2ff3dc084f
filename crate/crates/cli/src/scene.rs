//! Scene files: one JSON document describing the metric model plus the
//! inputs a command needs. Unknown fields are rejected so typos surface as
//! schema errors instead of silently ignored options.

use std::path::Path;

use serde::Deserialize;

use hadamard_core::manifold::{MetricModel, Point, Region};
use hadamard_core::sets::ClosedSetSpec;

use crate::Failure;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    /// Metric descriptor, e.g. {"kind": "hyperbolic-half-plane", "dim": 2}.
    pub metric: MetricModel,
    /// Closed-set expression (certify / retract / project).
    #[serde(default)]
    pub set: Option<ClosedSetSpec>,
    /// Chart box for grids, probes and plots.
    #[serde(default)]
    pub region: Option<Region>,
    /// Grid resolution; the --resolution flag overrides it.
    #[serde(default)]
    pub resolution: Option<usize>,
    /// Scene-level seed recorded in every report; --seed overrides it.
    #[serde(default)]
    pub seed: Option<u64>,
    /// Flow time for the counterexample scenes; --epsilon overrides it.
    #[serde(default)]
    pub epsilon: Option<f64>,
    /// Base / probe point (retract, project, geodesic, busemann).
    #[serde(default)]
    pub point: Option<Vec<f64>>,
    /// Tangent direction (geodesic, busemann, counterexample axis).
    #[serde(default)]
    pub direction: Option<Vec<f64>>,
    /// Second point (geodesic boundary-value solve, busemann evaluation).
    #[serde(default)]
    pub target: Option<Vec<f64>>,
    /// Integration time for the geodesic initial-value command.
    #[serde(default)]
    pub time: Option<f64>,
    /// Sample count for the retraction trace.
    #[serde(default)]
    pub steps: Option<usize>,
}

impl SceneFile {
    pub fn load(path: &Path) -> Result<SceneFile, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::schema(format!("cannot read scene {}: {e}", path.display())))?;
        let scene: SceneFile = serde_json::from_str(&text)
            .map_err(|e| Failure::schema(format!("scene {}: {e}", path.display())))?;
        if let Some(r) = &scene.region {
            Region::new(r.min.clone(), r.max.clone())
                .map_err(|e| Failure::schema(format!("scene region: {e}")))?;
        }
        Ok(scene)
    }

    pub fn require_set(&self) -> Result<&ClosedSetSpec, Failure> {
        self.set
            .as_ref()
            .ok_or_else(|| Failure::schema("scene is missing \"set\""))
    }

    pub fn require_region(&self) -> Result<&Region, Failure> {
        self.region
            .as_ref()
            .ok_or_else(|| Failure::schema("scene is missing \"region\""))
    }

    pub fn require_point(&self) -> Result<Point, Failure> {
        let coords = self
            .point
            .clone()
            .ok_or_else(|| Failure::schema("scene is missing \"point\""))?;
        Point::new(coords).map_err(|e| Failure::schema(format!("scene point: {e}")))
    }

    pub fn require_direction(&self) -> Result<Vec<f64>, Failure> {
        self.direction
            .clone()
            .ok_or_else(|| Failure::schema("scene is missing \"direction\""))
    }
}
