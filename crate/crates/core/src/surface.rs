//! Parametric surface definitions (sphere cap, torus, Cartesian graph), their
//! area-element densities, and the end-to-end sampler producing uniformly
//! distributed points on a cut region together with its surface measure.

use nalgebra::Rotation3;

use crate::error::{Error, Result};
use crate::lowdisc::{self, halton_2d, HaltonStream};
use crate::region::Region;
use crate::Point3;

/// Open parameter rectangle `(u_lo, u_hi) x (v_lo, v_hi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamDomain {
    pub u_lo: f64,
    pub u_hi: f64,
    pub v_lo: f64,
    pub v_hi: f64,
}

impl ParamDomain {
    pub fn new(u_lo: f64, u_hi: f64, v_lo: f64, v_hi: f64) -> Result<Self> {
        if !(u_lo.is_finite() && u_hi.is_finite() && v_lo.is_finite() && v_hi.is_finite()) {
            return Err(Error::NonFinite("parameter domain bounds"));
        }
        if u_lo >= u_hi || v_lo >= v_hi {
            return Err(Error::InvalidParameter(format!(
                "degenerate parameter rectangle ({u_lo}, {u_hi}) x ({v_lo}, {v_hi})"
            )));
        }
        Ok(ParamDomain {
            u_lo,
            u_hi,
            v_lo,
            v_hi,
        })
    }

    pub fn area(&self) -> f64 {
        (self.u_hi - self.u_lo) * (self.v_hi - self.v_lo)
    }

    /// Affine image of a unit-square point; interior points map to interior
    /// points, so the open rectangle is respected by Halton input.
    pub fn from_unit(&self, s: f64, t: f64) -> (f64, f64) {
        (
            self.u_lo + s * (self.u_hi - self.u_lo),
            self.v_lo + t * (self.v_hi - self.v_lo),
        )
    }
}

type MapFn = Box<dyn Fn(f64, f64) -> Point3 + Send + Sync>;
type DensityFn = Box<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Analytic parametrization `(u, v) -> R^3` of a bounding surface, with its
/// area-element density `|d_u Psi x d_v Psi|`, total area and an envelope
/// bound for rejection sampling.
pub struct ParamSurface {
    label: String,
    map: MapFn,
    area_element: DensityFn,
    domain: ParamDomain,
    total_area: f64,
    area_is_estimate: bool,
    element_bound: f64,
}

impl std::fmt::Debug for ParamSurface {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ParamSurface")
            .field("label", &self.label)
            .field("domain", &self.domain)
            .field("total_area", &self.total_area)
            .field("area_is_estimate", &self.area_is_estimate)
            .field("element_bound", &self.element_bound)
            .finish()
    }
}

impl ParamSurface {
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn map(&self, u: f64, v: f64) -> Point3 {
        (self.map)(u, v)
    }

    pub fn area_element(&self, u: f64, v: f64) -> f64 {
        (self.area_element)(u, v)
    }

    pub fn domain(&self) -> ParamDomain {
        self.domain
    }

    /// Area of the whole bounding surface.
    pub fn total_area(&self) -> f64 {
        self.total_area
    }

    /// Whether `total_area` was estimated by quadrature rather than known
    /// in closed form.
    pub fn area_is_estimate(&self) -> bool {
        self.area_is_estimate
    }

    pub fn element_bound(&self) -> f64 {
        self.element_bound
    }

    /// Composes the parametrization with a rotation of the ambient space.
    /// The area element is unchanged.
    pub fn rotated(self, rot: Rotation3<f64>) -> ParamSurface {
        let inner = self.map;
        ParamSurface {
            label: self.label,
            map: Box::new(move |u, v| rot * inner(u, v)),
            area_element: self.area_element,
            domain: self.domain,
            total_area: self.total_area,
            area_is_estimate: self.area_is_estimate,
            element_bound: self.element_bound,
        }
    }
}

/// Polar cap of the sphere of radius `r`, parametrized by the area-preserving
/// map `(u, v) -> r (sqrt(1-u^2) cos v, sqrt(1-u^2) sin v, u)` on
/// `(c, 1) x (0, 2pi)`.
///
/// `c` is the normalized height of the cap boundary (the z-coordinate divided
/// by `r`); the constant area element is `r^2`, so sampling is
/// acceptance-free.
pub fn sphere_cap(r: f64, c: f64) -> Result<ParamSurface> {
    if !r.is_finite() || r <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "sphere radius must be positive, got {r}"
        )));
    }
    if !(-1.0..1.0).contains(&c) {
        return Err(Error::InvalidParameter(format!(
            "cap boundary height must lie in [-1, 1), got {c}"
        )));
    }
    let domain = ParamDomain::new(c, 1.0, 0.0, std::f64::consts::TAU)?;
    let density = r * r;
    Ok(ParamSurface {
        label: "sphere_cap".into(),
        map: Box::new(move |u, v| {
            let s = (1.0 - u * u).max(0.0).sqrt();
            Point3::new(r * s * v.cos(), r * s * v.sin(), r * u)
        }),
        area_element: Box::new(move |_, _| density),
        domain,
        total_area: std::f64::consts::TAU * r * r * (1.0 - c),
        area_is_estimate: false,
        element_bound: density,
    })
}

/// Torus of radii `0 < r < R` centered at the origin, in standard toroidal
/// coordinates on `(0, 2pi)^2` with area element `r (R + r cos u)`.
pub fn torus(big_r: f64, r: f64) -> Result<ParamSurface> {
    if !big_r.is_finite() || !r.is_finite() || r <= 0.0 || big_r <= r {
        return Err(Error::InvalidParameter(format!(
            "torus radii must satisfy 0 < r < R, got r = {r}, R = {big_r}"
        )));
    }
    let tau = std::f64::consts::TAU;
    let domain = ParamDomain::new(0.0, tau, 0.0, tau)?;
    Ok(ParamSurface {
        label: "torus".into(),
        map: Box::new(move |u, v| {
            let ring = big_r + r * u.cos();
            Point3::new(ring * v.cos(), ring * v.sin(), r * u.sin())
        }),
        area_element: Box::new(move |u, _| r * (big_r + r * u.cos())),
        domain,
        total_area: tau * tau * big_r * r,
        area_is_estimate: false,
        element_bound: r * (big_r + r),
    })
}

/// Cartesian graph `(u, v) -> (u, v, F(u, v))` of an analytic function, with
/// area element `sqrt(1 + |grad F|^2)`.
///
/// The supplied gradient is cross-checked against central finite differences
/// at 100 probe points; the total area is estimated by a 10^6-point Halton
/// average (and flagged as an estimate), and the envelope bound by a 256x256
/// grid maximum inflated by 5%.
pub fn cartesian_graph<F, G>(f: F, grad_f: G, domain: ParamDomain) -> Result<ParamSurface>
where
    F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    G: Fn(f64, f64) -> (f64, f64) + Send + Sync + 'static,
{
    let h = 1e-6;
    // Probe an inset rectangle so the finite-difference stencil stays inside.
    let du = domain.u_hi - domain.u_lo;
    let dv = domain.v_hi - domain.v_lo;
    for p in halton_2d(100, 1, (2, 3)) {
        let u = domain.u_lo + (0.01 + 0.98 * p.u) * du;
        let v = domain.v_lo + (0.01 + 0.98 * p.v) * dv;
        let (ga, gb) = grad_f(u, v);
        let fa = (f(u + h, v) - f(u - h, v)) / (2.0 * h);
        let fb = (f(u, v + h) - f(u, v - h)) / (2.0 * h);
        if (ga - fa).abs() > 1e-6 || (gb - fb).abs() > 1e-6 {
            return Err(Error::GradientMismatch {
                u,
                v,
                ga,
                gb,
                fa,
                fb,
            });
        }
    }

    let area_element = move |u: f64, v: f64| {
        let (gu, gv) = grad_f(u, v);
        (1.0 + gu * gu + gv * gv).sqrt()
    };

    let mut bound: f64 = 0.0;
    for i in 0..256 {
        for j in 0..256 {
            let u = domain.u_lo + (i as f64 + 0.5) / 256.0 * du;
            let v = domain.v_lo + (j as f64 + 0.5) / 256.0 * dv;
            bound = bound.max(area_element(u, v));
        }
    }
    bound *= 1.05;

    let probes = 1_000_000;
    let mut acc = 0.0;
    for p in halton_2d(probes, 1, (2, 3)) {
        let (u, v) = domain.from_unit(p.u, p.v);
        acc += area_element(u, v);
    }
    let total_area = domain.area() * acc / probes as f64;

    Ok(ParamSurface {
        label: "graph".into(),
        map: Box::new(move |u, v| Point3::new(u, v, f(u, v))),
        area_element: Box::new(area_element),
        domain,
        total_area,
        area_is_estimate: true,
        element_bound: bound,
    })
}

/// Four-Gaussian test surface value on the unit square.
pub fn franke_value(u: f64, v: f64) -> f64 {
    0.75 * (-((9.0 * u - 2.0).powi(2) + (9.0 * v - 2.0).powi(2)) / 4.0).exp()
        + 0.75 * (-((9.0 * u + 1.0).powi(2) + (9.0 * v + 1.0).powi(2)) / 49.0).exp()
        + 0.5 * (-((9.0 * u - 7.0).powi(2) + (9.0 * v - 3.0).powi(2)) / 4.0).exp()
        - 0.2 * (-((9.0 * u - 4.0).powi(2) + (9.0 * v - 7.0).powi(2))).exp()
}

/// Exact gradient of [`franke_value`].
pub fn franke_gradient(u: f64, v: f64) -> (f64, f64) {
    let e1 = (-((9.0 * u - 2.0).powi(2) + (9.0 * v - 2.0).powi(2)) / 4.0).exp();
    let e2 = (-((9.0 * u + 1.0).powi(2) + (9.0 * v + 1.0).powi(2)) / 49.0).exp();
    let e3 = (-((9.0 * u - 7.0).powi(2) + (9.0 * v - 3.0).powi(2)) / 4.0).exp();
    let e4 = (-((9.0 * u - 4.0).powi(2) + (9.0 * v - 7.0).powi(2))).exp();
    let gu = 0.75 * e1 * (-4.5 * (9.0 * u - 2.0))
        + 0.75 * e2 * (-18.0 / 49.0 * (9.0 * u + 1.0))
        + 0.5 * e3 * (-4.5 * (9.0 * u - 7.0))
        - 0.2 * e4 * (-18.0 * (9.0 * u - 4.0));
    let gv = 0.75 * e1 * (-4.5 * (9.0 * v - 2.0))
        + 0.75 * e2 * (-18.0 / 49.0 * (9.0 * v + 1.0))
        + 0.5 * e3 * (-4.5 * (9.0 * v - 3.0))
        - 0.2 * e4 * (-18.0 * (9.0 * v - 7.0));
    (gu, gv)
}

/// Scalar field on the parameter rectangle.
pub type FieldFn = fn(f64, f64) -> f64;
/// Gradient of a scalar field on the parameter rectangle.
pub type GradientFn = fn(f64, f64) -> (f64, f64);

/// The (value, gradient) pair of the four-Gaussian surface, for use with
/// [`cartesian_graph`].
pub fn franke() -> (FieldFn, GradientFn) {
    (franke_value, franke_gradient)
}

/// Graph of the four-Gaussian surface over the open unit square.
pub fn franke_graph() -> Result<ParamSurface> {
    let (f, g) = franke();
    let mut s = cartesian_graph(f, g, ParamDomain::new(0.0, 1.0, 0.0, 1.0)?)?;
    s.label = "franke_graph".into();
    Ok(s)
}

/// Uniformly distributed points on a surface region, with its measure.
#[derive(Debug, Clone)]
pub struct SampleSet {
    /// Mapped points inside the region, in stream order.
    pub points: Vec<Point3>,
    /// Parameter pairs of the kept points.
    pub params: Vec<(f64, f64)>,
    /// Measure of the region (exact when supplied, otherwise the ratio
    /// estimate `sigma(S) * M / M_S`).
    pub sigma_j: f64,
    /// Raw stream attempts.
    pub m0: usize,
    /// Points accepted onto the bounding surface.
    pub m_surface: usize,
}

impl SampleSet {
    /// Number of points inside the region.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Draws `m0` low-discrepancy attempts, rejection-samples them onto the
/// bounding surface (uniform w.r.t. the surface measure) and keeps the points
/// whose image lies in `region`.
///
/// The region measure is estimated by the ratio rule
/// `sigma(S) * M / M_S` with `M_S` the on-surface acceptance count, unless
/// `sigma_j_known` supplies the exact value.
pub fn sample_region(
    surface: &ParamSurface,
    region: &Region,
    m0: usize,
    stream: &mut HaltonStream,
    sigma_j_known: Option<f64>,
) -> Result<SampleSet> {
    let on_surface = lowdisc::rejection_sample(
        stream,
        &surface.domain(),
        |u, v| surface.area_element(u, v),
        surface.element_bound(),
        m0,
    )?;
    let m_surface = on_surface.accepted.len();

    let mut points = Vec::new();
    let mut params = Vec::new();
    for (u, v) in on_surface.accepted {
        let p = surface.map(u, v);
        if region.contains(&p) {
            points.push(p);
            params.push((u, v));
        }
    }
    if points.is_empty() {
        return Err(Error::EmptySample { m0 });
    }
    let sigma_j = match sigma_j_known {
        Some(s) => {
            if !s.is_finite() || s <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "supplied region measure must be positive, got {s}"
                )));
            }
            s
        }
        None => surface.total_area() * (points.len() as f64 / m_surface as f64),
    };
    Ok(SampleSet {
        points,
        params,
        sigma_j,
        m0,
        m_surface,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::Region;
    use nalgebra::Vector3;

    /// Finite-difference area element `|d_u Psi x d_v Psi|`.
    fn fd_area_element(s: &ParamSurface, u: f64, v: f64) -> f64 {
        let h = 1e-6;
        let pu = (s.map(u + h, v) - s.map(u - h, v)) / (2.0 * h);
        let pv = (s.map(u, v + h) - s.map(u, v - h)) / (2.0 * h);
        pu.cross(&pv).norm()
    }

    #[test]
    fn cap_map_and_area() {
        let cap = sphere_cap(2.0, 0.0).unwrap();
        let p = cap.map(0.0, 0.0);
        assert!((p - Point3::new(2.0, 0.0, 0.0)).norm() < 1e-15);
        let near_pole = cap.map(1.0 - 1e-12, 1.0);
        assert!((near_pole - Point3::new(0.0, 0.0, 2.0)).norm() < 1e-5);
        // hemisphere of radius 1 has area 2 pi
        let hemi = sphere_cap(1.0, 0.0).unwrap();
        assert!((hemi.total_area() - std::f64::consts::TAU).abs() < 1e-14);
        assert!(!hemi.area_is_estimate());
    }

    #[test]
    fn cap_area_element_is_r_squared() {
        let r = 1.7;
        let cap = sphere_cap(r, -0.3).unwrap();
        for p in halton_2d(100, 1, (2, 3)) {
            let (u, v) = cap.domain().from_unit(0.02 + 0.96 * p.u, 0.02 + 0.96 * p.v);
            assert!((cap.area_element(u, v) - r * r).abs() < 1e-14 * r * r);
            let fd = fd_area_element(&cap, u, v);
            assert!((fd - r * r).abs() < 1e-6, "fd {fd} vs {}", r * r);
        }
    }

    #[test]
    fn torus_map_density_and_area() {
        let t = torus(3.0, 2.0).unwrap();
        assert!((t.map(0.0, 0.0) - Point3::new(5.0, 0.0, 0.0)).norm() < 1e-15);
        // area element at u = pi is r(R - r) = 2
        let fd = fd_area_element(&t, std::f64::consts::PI, 1.0);
        assert!((fd - 2.0).abs() < 1e-5);
        assert!((t.area_element(std::f64::consts::PI, 1.0) - 2.0).abs() < 1e-12);
        // sigma(S) = 4 pi^2 R r
        let expect = 4.0 * std::f64::consts::PI.powi(2) * 6.0;
        assert!((t.total_area() - expect).abs() < 1e-10);
        assert!(torus(2.0, 3.0).is_err());
    }

    #[test]
    fn flat_and_tilted_graphs() {
        let flat = cartesian_graph(
            |_, _| 0.0,
            |_, _| (0.0, 0.0),
            ParamDomain::new(0.0, 1.0, 0.0, 1.0).unwrap(),
        )
        .unwrap();
        assert!((flat.area_element(0.3, 0.4) - 1.0).abs() < 1e-15);
        assert!((flat.total_area() - 1.0).abs() < 1e-12);

        let tilted = cartesian_graph(
            |u, _| u,
            |_, _| (1.0, 0.0),
            ParamDomain::new(0.0, 1.0, 0.0, 1.0).unwrap(),
        )
        .unwrap();
        assert!((tilted.area_element(0.5, 0.5) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn graph_rejects_inconsistent_gradient() {
        let r = cartesian_graph(
            |u, v| u * v,
            |_, _| (0.0, 0.0),
            ParamDomain::new(0.0, 1.0, 0.0, 1.0).unwrap(),
        );
        assert!(matches!(r, Err(Error::GradientMismatch { .. })));
    }

    #[test]
    fn franke_matches_direct_evaluation() {
        let (u, v) = (0.5, 0.5);
        let direct = 0.75 * (-((4.5f64 - 2.0).powi(2) * 2.0) / 4.0).exp()
            + 0.75 * (-((4.5f64 + 1.0).powi(2) * 2.0) / 49.0).exp()
            + 0.5 * (-((4.5f64 - 7.0).powi(2) + (4.5f64 - 3.0).powi(2)) / 4.0).exp()
            - 0.2 * (-((4.5f64 - 4.0).powi(2) + (4.5f64 - 7.0).powi(2))).exp();
        assert!((franke_value(u, v) - direct).abs() < 1e-15);
        // fourth exponent vanishes at (4/9, 7/9)
        let x: f64 = 9.0 * (4.0 / 9.0) - 4.0;
        let y: f64 = 9.0 * (7.0 / 9.0) - 7.0;
        assert!(x.abs() < 1e-15 && y.abs() < 1e-15);
    }

    #[test]
    fn franke_gradient_matches_finite_differences() {
        let h = 1e-6;
        for p in halton_2d(100, 1, (2, 3)) {
            let (u, v) = (0.01 + 0.98 * p.u, 0.01 + 0.98 * p.v);
            let (gu, gv) = franke_gradient(u, v);
            let fu = (franke_value(u + h, v) - franke_value(u - h, v)) / (2.0 * h);
            let fv = (franke_value(u, v + h) - franke_value(u, v - h)) / (2.0 * h);
            assert!((gu - fu).abs() <= 1e-6 && (gv - fv).abs() <= 1e-6);
        }
    }

    #[test]
    fn franke_is_bounded_on_unit_square() {
        let mut max = 0.0f64;
        for i in 0..=200 {
            for j in 0..=200 {
                max = max.max(franke_value(i as f64 / 200.0, j as f64 / 200.0).abs());
            }
        }
        assert!(max <= 2.0, "grid max {max}");
    }

    #[test]
    fn graph_area_and_bound_invariants() {
        let g = franke_graph().unwrap();
        let mut acc = 0.0;
        let probes = 100_000;
        for p in halton_2d(probes, 1, (2, 3)) {
            let (u, v) = g.domain().from_unit(p.u, p.v);
            let ae = g.area_element(u, v);
            assert!(ae <= g.element_bound(), "bound violated: {ae}");
            acc += ae;
        }
        let est = g.domain().area() * acc / probes as f64;
        assert!((g.total_area() - est).abs() <= 0.01 * est);
        assert!(g.area_is_estimate());
    }

    #[test]
    fn cap_sampling_is_acceptance_free_and_on_sphere() {
        let cap = sphere_cap(1.0, 0.0).unwrap();
        let mut stream = HaltonStream::new();
        let s = sample_region(&cap, &Region::Full, 2000, &mut stream, None).unwrap();
        assert_eq!(s.m_surface, 2000);
        assert_eq!(s.len(), 2000);
        assert_eq!(s.sigma_j, cap.total_area());
        for p in &s.points {
            assert!((p.coords.norm() - 1.0).abs() <= 1e-14);
            assert!(p.z >= 0.0);
        }
    }

    #[test]
    fn torus_samples_lie_on_torus() {
        let t = torus(3.0, 2.0).unwrap();
        let mut stream = HaltonStream::new();
        let s = sample_region(&t, &Region::Full, 5000, &mut stream, None).unwrap();
        assert_eq!(s.len(), s.m_surface);
        assert_eq!(s.sigma_j, t.total_area());
        for p in &s.points {
            let rho = (p.x * p.x + p.y * p.y).sqrt();
            let implicit = (rho - 3.0).powi(2) + p.z * p.z - 4.0;
            assert!(implicit.abs() <= 1e-12 * 4.0, "implicit residual {implicit}");
        }
    }

    #[test]
    fn halfspace_cut_halves_torus_measure() {
        let t = torus(3.0, 2.0).unwrap();
        let mut stream = HaltonStream::new();
        let region = Region::halfspace(0.0, 0.0, 1.0, 0.0).unwrap();
        let s = sample_region(&t, &region, 100_000, &mut stream, None).unwrap();
        let ratio = s.sigma_j / t.total_area();
        assert!((ratio - 0.5).abs() <= 0.01, "ratio {ratio}");
    }

    #[test]
    fn sampling_is_reproducible() {
        let t = torus(3.0, 2.0).unwrap();
        let region = Region::halfspace(1.0, 0.0, 0.0, 0.0).unwrap();
        let mut s1 = HaltonStream::new();
        let mut s2 = HaltonStream::new();
        let a = sample_region(&t, &region, 3000, &mut s1, None).unwrap();
        let b = sample_region(&t, &region, 3000, &mut s2, None).unwrap();
        assert_eq!(a.len(), b.len());
        for (p, q) in a.points.iter().zip(&b.points) {
            assert_eq!(p, q);
        }
    }

    #[test]
    fn empty_region_sample_is_an_error() {
        let t = torus(3.0, 2.0).unwrap();
        // ball far away from the torus: exterior keeps everything, interior
        // keeps nothing.
        let region = Region::ball_interior(Point3::new(100.0, 0.0, 0.0), 1.0).unwrap();
        let mut stream = HaltonStream::new();
        assert!(matches!(
            sample_region(&t, &region, 500, &mut stream, None),
            Err(Error::EmptySample { .. })
        ));
    }

    #[test]
    fn rotated_surface_preserves_area_element() {
        let axis = Vector3::y_axis();
        let rot = Rotation3::from_axis_angle(&axis, 0.7);
        let cap = sphere_cap(1.0, 0.2).unwrap().rotated(rot);
        let p = cap.map(0.5, 1.0);
        assert!((p.coords.norm() - 1.0).abs() < 1e-14);
        assert_eq!(cap.area_element(0.5, 1.0), 1.0);
    }
}
