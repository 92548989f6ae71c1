//! Membership predicates cutting a region out of a bounding surface:
//! half-spaces, ball interiors/exteriors, spherical polygons, and boolean
//! compositions. All predicates are closed (boundary points belong to the
//! region); region boundaries have null surface measure, so the convention
//! only pins determinism.

use nalgebra::{Rotation3, Vector3};

use crate::error::{Error, Result};
use crate::Point3;

/// Spherical polygon membership via stereographic projection.
///
/// The sphere is rotated so the vertex centroid sits at the north pole, the
/// rotated vertices are projected from the south pole onto the tangent plane
/// at the north pole, and membership reduces to a planar even-odd test
/// against the projected polygon with straight edges. That planar polygon is
/// the computational region; great-circle arcs do not project to straight
/// lines.
#[derive(Debug, Clone)]
pub struct SphericalPolygon {
    radius: f64,
    rotation: Rotation3<f64>,
    planar: Vec<(f64, f64)>,
}

impl SphericalPolygon {
    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Rotation taking the original frame to the pole-centered frame.
    pub fn rotation(&self) -> Rotation3<f64> {
        self.rotation
    }

    /// Projected vertices on the tangent plane at the north pole.
    pub fn planar_vertices(&self) -> &[(f64, f64)] {
        &self.planar
    }

    /// Stereographic image of a point from the south pole of the rotated
    /// sphere; `None` near the south pole itself.
    pub fn project(&self, p: &Point3) -> Option<(f64, f64)> {
        let q = self.rotation * p;
        let denom = self.radius + q.z;
        if denom <= 1e-12 * self.radius {
            return None;
        }
        Some((
            2.0 * self.radius * q.x / denom,
            2.0 * self.radius * q.y / denom,
        ))
    }

    fn contains(&self, p: &Point3) -> bool {
        match self.project(p) {
            Some(pt) => point_in_polygon_even_odd(pt, &self.planar),
            None => false,
        }
    }
}

/// Even-odd (ray crossing) rule for a planar polygon with straight edges.
fn point_in_polygon_even_odd(pt: (f64, f64), poly: &[(f64, f64)]) -> bool {
    let (x, y) = pt;
    let mut inside = false;
    let n = poly.len();
    let mut j = n - 1;
    for i in 0..n {
        let (xi, yi) = poly[i];
        let (xj, yj) = poly[j];
        if (yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi {
            inside = !inside;
        }
        j = i;
    }
    inside
}

/// Composable membership predicate on points of the ambient space.
#[derive(Debug, Clone)]
pub enum Region {
    /// The whole bounding surface.
    Full,
    /// `a x + b y + c z + d >= 0`.
    HalfSpace { a: f64, b: f64, c: f64, d: f64 },
    /// Points at distance >= radius from the center.
    BallExterior { center: Point3, radius: f64 },
    /// Points at distance <= radius from the center.
    BallInterior { center: Point3, radius: f64 },
    SphericalPolygon(SphericalPolygon),
    Intersection(Vec<Region>),
    Union(Vec<Region>),
}

impl Region {
    pub fn halfspace(a: f64, b: f64, c: f64, d: f64) -> Result<Region> {
        if a == 0.0 && b == 0.0 && c == 0.0 {
            return Err(Error::InvalidRegion("half-space normal is zero".into()));
        }
        if ![a, b, c, d].iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite("half-space coefficients"));
        }
        Ok(Region::HalfSpace { a, b, c, d })
    }

    pub fn ball_exterior(center: Point3, radius: f64) -> Result<Region> {
        if !radius.is_finite() || radius <= 0.0 {
            return Err(Error::InvalidRegion(format!(
                "ball radius must be positive, got {radius}"
            )));
        }
        Ok(Region::BallExterior { center, radius })
    }

    pub fn ball_interior(center: Point3, radius: f64) -> Result<Region> {
        if !radius.is_finite() || radius <= 0.0 {
            return Err(Error::InvalidRegion(format!(
                "ball radius must be positive, got {radius}"
            )));
        }
        Ok(Region::BallInterior { center, radius })
    }

    /// Logical AND of the given regions.
    pub fn intersection(regions: Vec<Region>) -> Result<Region> {
        if regions.is_empty() {
            return Err(Error::InvalidRegion(
                "intersection of an empty region list".into(),
            ));
        }
        Ok(Region::Intersection(regions))
    }

    /// Logical OR of the given regions.
    pub fn union(regions: Vec<Region>) -> Result<Region> {
        if regions.is_empty() {
            return Err(Error::InvalidRegion("union of an empty region list".into()));
        }
        Ok(Region::Union(regions))
    }

    pub fn contains(&self, p: &Point3) -> bool {
        match self {
            Region::Full => true,
            Region::HalfSpace { a, b, c, d } => a * p.x + b * p.y + c * p.z + d >= 0.0,
            Region::BallExterior { center, radius } => (p - center).norm() >= *radius,
            Region::BallInterior { center, radius } => (p - center).norm() <= *radius,
            Region::SphericalPolygon(poly) => poly.contains(p),
            Region::Intersection(rs) => rs.iter().all(|r| r.contains(p)),
            Region::Union(rs) => rs.iter().any(|r| r.contains(p)),
        }
    }
}

/// Builds a spherical-polygon region from vertices on a common sphere.
///
/// Returns the region together with the rotation that takes the vertex
/// centroid to the north pole, so the caller can rotate a bounding-cap
/// parametrization consistently.
pub fn spherical_polygon_region(vertices: &[Point3]) -> Result<(Region, Rotation3<f64>)> {
    if vertices.len() < 3 {
        return Err(Error::InvalidRegion(format!(
            "spherical polygon needs at least 3 vertices, got {}",
            vertices.len()
        )));
    }
    let radius = vertices[0].coords.norm();
    if !radius.is_finite() || radius <= 0.0 {
        return Err(Error::InvalidRegion("vertex at the origin".into()));
    }
    for (i, v) in vertices.iter().enumerate() {
        if (v.coords.norm() - radius).abs() > 1e-10 * radius {
            return Err(Error::InvalidRegion(format!(
                "vertex {i} is not on the sphere of radius {radius}"
            )));
        }
    }

    let mut centroid = Vector3::zeros();
    for v in vertices {
        centroid += v.coords;
    }
    if centroid.norm() <= 1e-12 * radius * vertices.len() as f64 {
        return Err(Error::InvalidRegion(
            "degenerate vertex centroid (zero direction)".into(),
        ));
    }
    let rotation = match Rotation3::rotation_between(&centroid, &Vector3::z()) {
        Some(r) => r,
        // centroid anti-parallel to the pole axis: flip around x.
        None => Rotation3::from_axis_angle(&Vector3::x_axis(), std::f64::consts::PI),
    };

    let mut planar = Vec::with_capacity(vertices.len());
    for (i, v) in vertices.iter().enumerate() {
        let q = rotation * v;
        let denom = radius + q.z;
        if denom <= 1e-9 * radius {
            return Err(Error::InvalidRegion(format!(
                "vertex {i} lands at the south pole after centroid rotation"
            )));
        }
        planar.push((2.0 * radius * q.x / denom, 2.0 * radius * q.y / denom));
    }

    Ok((
        Region::SphericalPolygon(SphericalPolygon {
            radius,
            rotation,
            planar,
        }),
        rotation,
    ))
}
