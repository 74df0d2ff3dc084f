//! The disconnection construction: a stable horoball complement G1, the
//! flowed unstable horoball complement G2 and (in dimension 3) one tangent
//! horosphere are intersected into a set I that is nonempty yet
//! disconnected in negative curvature, while the flat control with the
//! same recipe stays convex.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::convexity::{self, ConvexityCertificate};
use crate::error::{Error, Result};
use crate::geodesy::{geodesic_flow, UnitTangent};
use crate::horo::{self, HoroballSpec};
use crate::manifold::{MetricModel, Point, Region, TangentPlane, TangentVector};
use crate::sets::{ClosedSetSpec, ProjectionContext, SearchParams, DELTA_BOUNDARY};

/// Minimizer separation demanded of a non-uniqueness witness.
pub const WITNESS_SEPARATION: f64 = 0.1;
/// Distance agreement demanded between the two witness minimizers.
pub const WITNESS_AGREEMENT: f64 = 1e-5;

/// The assembled construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremScene {
    pub model: MetricModel,
    pub v: UnitTangent,
    pub epsilon: f64,
    pub g1: ClosedSetSpec,
    pub g2: ClosedSetSpec,
    /// One tangent horosphere in dimension 3, none in dimension 2.
    pub auxiliary: Vec<HoroballSpec>,
    /// I = G1 meet G2 (meet the auxiliary horospheres).
    pub intersection: ClosedSetSpec,
    pub probe_region: Region,
    pub resolution: usize,
}

/// Builds the scene: G1 complements the stable horoball of v, G2
/// complements the unstable horoball of the time-epsilon flow of v. In
/// dimension 3 one horosphere tangent to the plane of v and a horizontal
/// direction is intersected in as well.
pub fn build_theorem_scene(
    model: &MetricModel,
    base: &Point,
    direction: &[f64],
    epsilon: f64,
    region: &Region,
    resolution: usize,
) -> Result<TheoremScene> {
    build_theorem_scene_signed(model, base, direction, epsilon, region, resolution, 1.0)
}

/// As [`build_theorem_scene`], with the orientation of the auxiliary
/// horosphere (dimension 3 only) exposed.
pub fn build_theorem_scene_signed(
    model: &MetricModel,
    base: &Point,
    direction: &[f64],
    epsilon: f64,
    region: &Region,
    resolution: usize,
    normal_sign: f64,
) -> Result<TheoremScene> {
    if epsilon < 0.0 {
        return Err(Error::invalid("epsilon must be nonnegative"));
    }
    model.check_region(region)?;
    let v = UnitTangent::normalize(
        model,
        TangentVector {
            base: base.clone(),
            components: direction.to_vec(),
        },
    )?;
    let g1 = ClosedSetSpec::horoball_complement(horo::stable_horoball(model, &v));
    let flowed = geodesic_flow(model, &v, epsilon)?;
    let g2 = ClosedSetSpec::horoball_complement(horo::unstable_horoball(model, &flowed));

    let mut auxiliary = Vec::new();
    let mut parts = vec![g1.clone(), g2.clone()];
    if model.dim() == 3 {
        // a horizontal direction completes v to the plane the horosphere
        // must be tangent to
        let mut horizontal = vec![0.0; 3];
        let d = &v.vector().components;
        horizontal[if d[0].abs() <= d[1].abs() { 0 } else { 1 }] = 1.0;
        let plane = TangentPlane {
            base: base.clone(),
            span: [
                v.vector().clone(),
                TangentVector {
                    base: base.clone(),
                    components: horizontal,
                },
            ],
        };
        let shell = horo::tangent_horosphere(model, &plane, normal_sign)?;
        parts.push(ClosedSetSpec::horosphere_shell(shell.clone()));
        auxiliary.push(shell);
    }
    Ok(TheoremScene {
        model: model.clone(),
        v,
        epsilon,
        g1,
        g2,
        auxiliary,
        intersection: ClosedSetSpec::intersect(parts),
        probe_region: region.clone(),
        resolution,
    })
}

/// Grid labeling of the connected components of a set over a region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentReport {
    /// Components containing at least one strictly interior cell.
    pub count: usize,
    pub counts_per_axis: Vec<usize>,
    /// Row-major component labels; -1 marks non-member cells. Components
    /// without interior cells keep their label but are not counted.
    pub labels: Vec<i32>,
    /// One strictly interior cell per counted component, in scan order.
    pub representatives: Vec<Point>,
    pub interior_cells: usize,
}

/// Flood fill with full (8- or 26-neighbor) connectivity on the membership
/// grid; only components holding a strictly interior cell are counted.
pub fn connected_components(
    model: &MetricModel,
    set: &ClosedSetSpec,
    region: &Region,
    resolution: usize,
) -> Result<ComponentReport> {
    model.check_region(region)?;
    if resolution < 8 {
        return Err(Error::invalid("component counting needs resolution >= 8"));
    }
    let n = region.dim();
    let counts = vec![resolution; n];
    let total: usize = counts.iter().product();

    // membership grid, evaluated in parallel, merged in index order
    let defects: Vec<Option<f64>> = (0..total)
        .into_par_iter()
        .map(|flat| {
            let idx = unflatten(flat, &counts);
            let c = region.grid_point(&idx, &counts);
            if !model.in_chart(&c) {
                return None;
            }
            set.defect(model, &Point { coords: c }).ok()
        })
        .collect();

    let member: Vec<bool> = defects
        .iter()
        .map(|d| d.is_some_and(|d| d <= DELTA_BOUNDARY))
        .collect();
    let interior: Vec<bool> = defects
        .iter()
        .map(|d| d.is_some_and(|d| d < -DELTA_BOUNDARY))
        .collect();
    if !member.iter().any(|&m| m) {
        return Err(Error::EmptySet);
    }

    let mut labels = vec![-1i32; total];
    let mut next = 0i32;
    let mut representatives = Vec::new();
    let mut count = 0usize;
    let mut first_cells = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    for start in 0..total {
        if !member[start] || labels[start] >= 0 {
            continue;
        }
        let label = next;
        next += 1;
        first_cells.push(start);
        let mut has_interior: Option<usize> = None;
        stack.push(start);
        labels[start] = label;
        while let Some(cell) = stack.pop() {
            if interior[cell] && has_interior.is_none_or(|best| cell < best) {
                has_interior = Some(cell);
            }
            let idx = unflatten(cell, &counts);
            for neighbor in neighbors(&idx, &counts) {
                let f = flatten(&neighbor, &counts);
                if member[f] && labels[f] < 0 {
                    labels[f] = label;
                    stack.push(f);
                }
            }
        }
        if let Some(cell) = has_interior {
            count += 1;
            representatives.push(Point {
                coords: region.grid_point(&unflatten(cell, &counts), &counts),
            });
        }
    }
    if count == 0 {
        // Measure-zero sets (e.g. a hyperplane) never produce strictly
        // interior cells; fall back to counting the member components
        // themselves so thin sets are still reported as connected regions.
        count = first_cells.len();
        representatives = first_cells
            .iter()
            .map(|&cell| Point {
                coords: region.grid_point(&unflatten(cell, &counts), &counts),
            })
            .collect();
    }
    let interior_cells = interior.iter().filter(|&&b| b).count();
    Ok(ComponentReport {
        count,
        counts_per_axis: counts,
        labels,
        representatives,
        interior_cells,
    })
}

fn unflatten(mut flat: usize, counts: &[usize]) -> Vec<usize> {
    let mut idx = vec![0; counts.len()];
    for i in (0..counts.len()).rev() {
        idx[i] = flat % counts[i];
        flat /= counts[i];
    }
    idx
}

fn flatten(idx: &[usize], counts: &[usize]) -> usize {
    let mut f = 0;
    for i in 0..counts.len() {
        f = f * counts[i] + idx[i];
    }
    f
}

fn neighbors(idx: &[usize], counts: &[usize]) -> Vec<Vec<usize>> {
    let n = idx.len();
    let mut out = Vec::with_capacity(3usize.pow(n as u32) - 1);
    let mut offset = vec![-1i64; n];
    loop {
        if offset.iter().any(|&o| o != 0) {
            let mut ok = true;
            let mut nb = vec![0usize; n];
            for i in 0..n {
                let v = idx[i] as i64 + offset[i];
                if v < 0 || v >= counts[i] as i64 {
                    ok = false;
                    break;
                }
                nb[i] = v as usize;
            }
            if ok {
                out.push(nb);
            }
        }
        // advance the mixed-radix counter over {-1,0,1}^n
        let mut i = 0;
        loop {
            if i == n {
                return out;
            }
            if offset[i] < 1 {
                offset[i] += 1;
                break;
            }
            offset[i] = -1;
            i += 1;
        }
    }
}

/// A probe with two genuinely distinct equidistant projections onto I.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonUniquenessWitness {
    pub x: Point,
    pub minimizers: Vec<Point>,
    pub distance: f64,
    pub separation: f64,
}

/// Searches the symmetry axis (the geodesic of v) for a probe whose
/// projection onto I has two minimizers separated by at least 0.1 with
/// distances agreeing within 1e-5.
pub fn nonuniqueness_witness(
    model: &MetricModel,
    scene: &TheoremScene,
) -> Result<NonUniquenessWitness> {
    let params = SearchParams::new(scene.probe_region.clone())
        .with_resolution(scene.resolution.clamp(32, 64));
    let ctx = ProjectionContext::new(model, &scene.intersection, params)?;
    let mut best_gap = f64::INFINITY;
    for k in 1..40 {
        // walk the axis through the base point in both directions
        for sign in [1.0, -1.0] {
            let t = sign * 0.05 * k as f64;
            let Ok(probe) = axis_point(model, &scene.v, t) else {
                continue;
            };
            if !scene.probe_region.contains(&probe.coords)
                || scene.intersection.defect(model, &probe).unwrap_or(f64::NAN) <= DELTA_BOUNDARY
            {
                continue;
            }
            let Ok(result) = ctx.project(&probe) else {
                continue;
            };
            if result.minimizers.len() >= 2 {
                let a = &result.minimizers[0];
                let b = &result.minimizers[1];
                let sep = a.chart_dist(b);
                let da = crate::geodesy::fast_distance(model, &probe, a)?;
                let db = crate::geodesy::fast_distance(model, &probe, b)?;
                let gap = (da - db).abs();
                best_gap = best_gap.min(gap);
                if sep >= WITNESS_SEPARATION && gap <= WITNESS_AGREEMENT {
                    return Ok(NonUniquenessWitness {
                        x: probe,
                        minimizers: vec![a.clone(), b.clone()],
                        distance: da.max(db),
                        separation: sep,
                    });
                }
            }
        }
    }
    Err(Error::invalid(format!(
        "no non-uniqueness witness on the symmetry axis (best distance gap {best_gap:e})"
    )))
}

fn axis_point(model: &MetricModel, v: &UnitTangent, t: f64) -> Result<Point> {
    let (p, _) = crate::geodesy::exp_ivp(model, v.vector(), t)?;
    Ok(p)
}

/// The flat control: same recipe in the euclidean plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlReport {
    pub epsilon: f64,
    /// The flat I is empty for every epsilon > 0 (parallel half-planes
    /// with a gap); the tangent case epsilon = 0 yields a hyperplane.
    pub empty: bool,
    pub components: Option<usize>,
    pub certificate: Option<ConvexityCertificate>,
    pub witness_free: bool,
}

/// Builds the euclidean analog and certifies that disconnection is absent.
pub fn euclidean_control(epsilon: f64, resolution: usize) -> Result<ControlReport> {
    let model = MetricModel::euclidean(2);
    let region = Region::new(vec![-2.0, -1.2], vec![2.0, 1.2])?;
    let scene = build_theorem_scene(
        &model,
        &Point::from([0.0, 0.0]),
        &[0.0, 1.0],
        epsilon,
        &region,
        resolution,
    )?;
    // odd grid count so the zero-thickness intersection at epsilon = 0
    // (the hyperplane {y = 0}) lands exactly on a grid line
    match connected_components(&model, &scene.intersection, &region, resolution.max(64) | 1) {
        Err(Error::EmptySet) => Ok(ControlReport {
            epsilon,
            empty: true,
            components: None,
            certificate: None,
            witness_free: true,
        }),
        Err(e) => Err(e),
        Ok(components) => {
            let cert = convexity::certify_weak_convexity(
                &model,
                &scene.intersection,
                &region,
                resolution.clamp(16, 48),
                0,
            )?;
            let witness_free = cert.witnesses.is_empty();
            Ok(ControlReport {
                epsilon,
                empty: false,
                components: Some(components.count),
                certificate: Some(cert),
                witness_free,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn half_plane_scene(epsilon: f64, resolution: usize) -> TheoremScene {
        let m = MetricModel::half_plane();
        let region = Region::new(vec![-2.0, 0.02], vec![2.0, 1.2]).unwrap();
        build_theorem_scene(
            &m,
            &Point::from([0.0, 1.0]),
            &[0.0, 1.0],
            epsilon,
            &region,
            resolution,
        )
        .unwrap()
    }

    #[test]
    fn scene_sets_match_the_closed_forms() {
        // G1 = {Im <= 1}; G2 removes the open disk of euclidean center
        // (0, e^0.3 / 2) and radius e^0.3 / 2 tangent to the real axis
        let scene = half_plane_scene(0.3, 128);
        let m = &scene.model;
        let r = (0.3f64).exp() / 2.0;
        for (x, y) in [(0.3, 0.8), (-1.0, 0.4), (0.0, 1.0), (1.5, 0.1)] {
            let p = Point::from([x, y]);
            let in_g1 = y <= 1.0 + 1e-12;
            assert_eq!(scene.g1.contains(m, &p).unwrap(), in_g1, "g1 at {x},{y}");
            let inside_disk = (x * x + (y - r) * (y - r)).sqrt() < r - 1e-12;
            assert_eq!(
                scene.g2.contains(m, &p).unwrap(),
                !inside_disk,
                "g2 at {x},{y}"
            );
        }
        assert!(scene.auxiliary.is_empty());
    }

    #[test]
    fn hyperbolic_intersection_disconnects() {
        let m = MetricModel::half_plane();
        let region = Region::new(vec![-2.0, 0.02], vec![2.0, 1.2]).unwrap();
        for epsilon in [0.1, 0.3, 0.5] {
            let scene = half_plane_scene(epsilon, 128);
            let report = connected_components(&m, &scene.intersection, &region, 128).unwrap();
            assert_eq!(report.count, 2, "epsilon {epsilon}");
            assert!(report.interior_cells >= 50, "epsilon {epsilon}");
            // the two sides sit left and right of the removed horoball
            let xs: Vec<f64> = report.representatives.iter().map(|p| p.coords[0]).collect();
            assert_eq!(xs.len(), 2);
            assert!(xs[0].signum() != xs[1].signum());
        }
    }

    #[test]
    fn large_epsilon_still_disconnects() {
        let m = MetricModel::half_plane();
        let region = Region::new(vec![-2.0, 0.02], vec![2.0, 1.2]).unwrap();
        let scene = half_plane_scene(2.0, 128);
        let report = connected_components(&m, &scene.intersection, &region, 128).unwrap();
        assert_eq!(report.count, 2);
    }

    #[test]
    fn component_count_is_stable_under_doubling() {
        let m = MetricModel::half_plane();
        let region = Region::new(vec![-2.0, 0.02], vec![2.0, 1.2]).unwrap();
        let scene = half_plane_scene(0.3, 128);
        let coarse = connected_components(&m, &scene.intersection, &region, 128).unwrap();
        let fine = connected_components(&m, &scene.intersection, &region, 256).unwrap();
        assert_eq!(coarse.count, fine.count);
    }

    #[test]
    fn witness_sits_symmetrically_inside_the_removed_horoball() {
        let m = MetricModel::half_plane();
        let scene = half_plane_scene(0.3, 48);
        let w = nonuniqueness_witness(&m, &scene).unwrap();
        assert!(w.separation >= WITNESS_SEPARATION);
        assert_eq!(w.minimizers.len(), 2);
        // both minimizers are members of I, mirror images across the axis
        for p in &w.minimizers {
            assert!(scene.intersection.contains(&m, p).unwrap());
        }
        let da = crate::geodesy::fast_distance(&m, &w.x, &w.minimizers[0]).unwrap();
        let db = crate::geodesy::fast_distance(&m, &w.x, &w.minimizers[1]).unwrap();
        assert!((da - db).abs() <= WITNESS_AGREEMENT);
        assert_abs_diff_eq!(
            w.minimizers[0].coords[0],
            -w.minimizers[1].coords[0],
            epsilon = 1e-3
        );
    }

    #[test]
    fn euclidean_halfspace_has_one_component() {
        let m = MetricModel::euclidean(2);
        let set = ClosedSetSpec::halfspace(vec![0.0, 1.0], 0.0);
        let region = Region::new(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
        let report = connected_components(&m, &set, &region, 64).unwrap();
        assert_eq!(report.count, 1);
    }

    #[test]
    fn flat_control_is_convex_at_zero_and_empty_beyond() {
        let control = euclidean_control(0.0, 64).unwrap();
        assert!(!control.empty);
        assert_eq!(control.components, Some(1));
        assert!(control.witness_free);
        let gapped = euclidean_control(0.3, 64).unwrap();
        assert!(gapped.empty);
        assert!(gapped.witness_free);
    }

    #[test]
    fn individual_horoball_complements_certify_consistent() {
        let m = MetricModel::half_plane();
        let scene = half_plane_scene(0.3, 32);
        let region = Region::new(vec![-1.5, 0.1], vec![1.5, 1.4]).unwrap();
        for (name, set) in [("g1", &scene.g1), ("g2", &scene.g2)] {
            let cert = convexity::certify_weak_convexity(&m, set, &region, 24, 5).unwrap();
            assert!(cert.consistent(), "{name}: {:?}", cert.witnesses);
        }
    }

    #[test]
    fn three_dimensional_scene_has_one_auxiliary_horosphere() {
        let m = MetricModel::half_space();
        let region = Region::new(vec![-1.0, -1.0, 0.05], vec![1.0, 1.0, 1.5]).unwrap();
        let scene = build_theorem_scene(
            &m,
            &Point::from([0.0, 0.0, 1.0]),
            &[0.0, 0.0, 1.0],
            0.3,
            &region,
            32,
        )
        .unwrap();
        assert_eq!(scene.auxiliary.len(), 1);
    }

    #[test]
    fn scene_serializes() {
        let scene = half_plane_scene(0.3, 32);
        let text = serde_json::to_string(&scene).unwrap();
        let back: TheoremScene = serde_json::from_str(&text).unwrap();
        assert_eq!(scene, back);
    }
}
