//! JSON scene descriptions: a bounding surface, a region composition tree,
//! the raw sample budget and optional exact measure. This is the on-disk
//! interface consumed by the command-line driver and by anything else that
//! wants to describe an integration problem declaratively.

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::region::{spherical_polygon_region, Region};
use crate::surface::{franke_graph, sphere_cap, torus, ParamSurface};
use crate::Point3;

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum SurfaceSpec {
    SphereCap {
        r: f64,
        c: f64,
    },
    Torus {
        #[serde(rename = "R")]
        big_r: f64,
        r: f64,
    },
    FrankeGraph,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RegionSpec {
    Full,
    Halfspace {
        a: f64,
        b: f64,
        c: f64,
        d: f64,
    },
    BallExterior {
        center: [f64; 3],
        radius: f64,
    },
    BallInterior {
        center: [f64; 3],
        radius: f64,
    },
    SphericalPolygon {
        vertices: Vec<[f64; 3]>,
    },
    Intersection {
        regions: Vec<RegionSpec>,
    },
    Union {
        regions: Vec<RegionSpec>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneFile {
    #[serde(default)]
    name: Option<String>,
    surface: SurfaceSpec,
    region: RegionSpec,
    #[serde(rename = "M0")]
    m0: usize,
    #[serde(rename = "sigma_J", default)]
    sigma_j: Option<f64>,
    #[serde(rename = "P0", default)]
    p0: Option<[f64; 3]>,
}

/// A fully built integration problem.
#[derive(Debug)]
pub struct Scene {
    pub name: String,
    pub surface: ParamSurface,
    pub region: Region,
    /// Raw low-discrepancy attempts to draw.
    pub m0: usize,
    /// Exact region measure, when known.
    pub sigma_j: Option<f64>,
    /// Anchor point for distance-based test integrands.
    pub p0: Point3,
}

fn build_region(
    spec: &RegionSpec,
    rotation: &mut Option<nalgebra::Rotation3<f64>>,
) -> Result<Region> {
    match spec {
        RegionSpec::Full => Ok(Region::Full),
        RegionSpec::Halfspace { a, b, c, d } => Region::halfspace(*a, *b, *c, *d),
        RegionSpec::BallExterior { center, radius } => {
            Region::ball_exterior(Point3::new(center[0], center[1], center[2]), *radius)
        }
        RegionSpec::BallInterior { center, radius } => {
            Region::ball_interior(Point3::new(center[0], center[1], center[2]), *radius)
        }
        RegionSpec::SphericalPolygon { vertices } => {
            if rotation.is_some() {
                return Err(Error::Scene(
                    "a scene may contain at most one spherical polygon".into(),
                ));
            }
            let pts: Vec<Point3> = vertices
                .iter()
                .map(|v| Point3::new(v[0], v[1], v[2]))
                .collect();
            let (region, rot) = spherical_polygon_region(&pts)?;
            *rotation = Some(rot);
            Ok(region)
        }
        RegionSpec::Intersection { regions } => {
            let built: Result<Vec<Region>> =
                regions.iter().map(|r| build_region(r, rotation)).collect();
            Region::intersection(built?)
        }
        RegionSpec::Union { regions } => {
            let built: Result<Vec<Region>> =
                regions.iter().map(|r| build_region(r, rotation)).collect();
            Region::union(built?)
        }
    }
}

/// Parses a scene from its JSON text.
///
/// When the region contains a spherical polygon and the surface is a sphere
/// cap, the cap parametrization is rotated so that its pole axis matches the
/// polygon centroid; sample points stay in the original frame throughout.
pub fn parse_scene(json: &str) -> Result<Scene> {
    let file: SceneFile = serde_json::from_str(json)?;
    if file.m0 == 0 {
        return Err(Error::Scene("M0 must be at least 1".into()));
    }
    let mut rotation = None;
    let region = build_region(&file.region, &mut rotation)?;
    let (surface, default_name) = match file.surface {
        SurfaceSpec::SphereCap { r, c } => {
            let mut cap = sphere_cap(r, c)?;
            if let Some(rot) = rotation {
                cap = cap.rotated(rot.inverse());
            }
            (cap, "sphere_cap")
        }
        SurfaceSpec::Torus { big_r, r } => (torus(big_r, r)?, "torus"),
        SurfaceSpec::FrankeGraph => (franke_graph()?, "franke_graph"),
    };
    if let Some(s) = file.sigma_j {
        if !s.is_finite() || s <= 0.0 {
            return Err(Error::Scene(format!(
                "sigma_J must be positive when given, got {s}"
            )));
        }
    }
    let p0 = file
        .p0
        .map(|v| Point3::new(v[0], v[1], v[2]))
        .unwrap_or_else(Point3::origin);
    Ok(Scene {
        name: file.name.unwrap_or_else(|| default_name.to_string()),
        surface,
        region,
        m0: file.m0,
        sigma_j: file.sigma_j,
        p0,
    })
}

/// Loads a scene from a JSON file.
pub fn load_scene(path: &std::path::Path) -> Result<Scene> {
    let text = std::fs::read_to_string(path)?;
    parse_scene(&text)
}
