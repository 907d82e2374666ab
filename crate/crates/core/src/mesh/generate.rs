//! Deterministic structured generators for the line, circle and star geometries.

use std::f64::consts::{FRAC_PI_2, PI};

use super::{validate_mesh, FittedMesh, Point, Side};
use crate::error::{Error, Result};

pub const CIRCLE_RADIUS: f64 = 0.5;
pub const DEFAULT_HALF_WIDTH: f64 = 1.0;

/// Five-point star `r(θ) = 0.35 (1 + 0.25 cos 5θ)`.
pub fn star_radius(theta: f64) -> f64 {
    0.35 * (1.0 + 0.25 * (5.0 * theta).cos())
}

/// Uniform `n × n` grid of the unit square, each cell cut along its
/// lower-left to upper-right diagonal. MINUS is `y < 1/2`.
pub fn build_line_mesh(n: usize, beta_minus: f64, beta_plus: f64) -> Result<FittedMesh> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::Geometry(format!(
            "line mesh needs an even resolution >= 2 so a grid line falls on y = 1/2, got {n}"
        )));
    }
    let h = 1.0 / n as f64;
    let idx = |i: usize, j: usize| j * (n + 1) + i;
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            vertices.push([i as f64 * h, j as f64 * h]);
        }
    }
    let mut triangles = Vec::with_capacity(2 * n * n);
    let mut labels = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        let side = if j < n / 2 { Side::Minus } else { Side::Plus };
        for i in 0..n {
            let (v00, v10, v11, v01) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            triangles.push([v00, v10, v11]);
            triangles.push([v00, v11, v01]);
            labels.push(side);
            labels.push(side);
        }
    }
    FittedMesh::from_parts(vertices, triangles, labels, beta_minus, beta_plus)
}

/// Resolution of a mapped mesh around a closed star-shaped interface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MappedMeshParams {
    /// Interface vertices, also the angular resolution everywhere. Multiple of 4.
    pub n_theta: usize,
    /// Ring layers between the central block and the interface.
    pub n_radial_in: usize,
    /// Ring layers between the interface and the outer square.
    pub n_radial_out: usize,
    /// The domain is `[-half_width, half_width]²`.
    pub half_width: f64,
}

impl Default for MappedMeshParams {
    fn default() -> Self {
        MappedMeshParams {
            n_theta: 128,
            n_radial_in: 16,
            n_radial_out: 16,
            half_width: DEFAULT_HALF_WIDTH,
        }
    }
}

/// Structured mesh fitted to the polygon through `radius_fn(θ_i)(cos θ_i, sin θ_i)`,
/// `θ_i = 2πi / n_theta`.
///
/// The inside is a diamond-shaped tensor block whose boundary nodes sit on the
/// same rays `θ_i`, surrounded by geometrically graded rings that blend out to
/// the interface polygon. The outside blends from the polygon to the square along
/// the same rays. Every quadrilateral is cut along its inner-`i` to outer-`i+1`
/// diagonal. MINUS is the inside.
///
/// The result is validated; a mesh with an angle below the default threshold is
/// a geometry error rather than a return value.
pub fn build_mapped_mesh(
    radius_fn: &dyn Fn(f64) -> f64,
    params: MappedMeshParams,
    beta_minus: f64,
    beta_plus: f64,
) -> Result<FittedMesh> {
    let MappedMeshParams {
        n_theta,
        n_radial_in,
        n_radial_out,
        half_width,
    } = params;
    if n_theta < 4 || n_theta % 4 != 0 {
        return Err(Error::Geometry(format!(
            "n_theta must be a positive multiple of 4, got {n_theta}"
        )));
    }
    if n_radial_in == 0 || n_radial_out == 0 {
        return Err(Error::Geometry("radial layer counts must be positive".into()));
    }
    if !(half_width > 0.0) {
        return Err(Error::Geometry(format!("half width must be positive, got {half_width}")));
    }

    let n = n_theta;
    let theta: Vec<f64> = (0..n).map(|i| 2.0 * PI * i as f64 / n as f64).collect();
    let mut radius = Vec::with_capacity(n);
    for &t in &theta {
        let r = radius_fn(t);
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::Geometry(format!("interface radius {r} at θ = {t:.6} is not positive")));
        }
        if r >= half_width {
            return Err(Error::Geometry(format!(
                "interface radius {r} at θ = {t:.6} reaches the square boundary {half_width}"
            )));
        }
        radius.push(r);
    }
    let interface: Vec<Point> = theta
        .iter()
        .zip(&radius)
        .map(|(t, r)| [r * t.cos(), r * t.sin()])
        .collect();
    check_simple_polygon(&interface, &theta)?;

    // Central block: the diamond |x| + |y| = a meshed as an affine image of a
    // tensor grid whose 1D nodes put boundary vertices exactly on the rays.
    let k_side = n / 4;
    let growth = 1.0 + 2.0 * PI / n as f64;
    let core_fraction = growth.powi(-(n_radial_in as i32)).clamp(0.15, 0.6);
    let r_min = radius.iter().copied().fold(f64::INFINITY, f64::min);
    let a = core_fraction * r_min;
    let grid: Vec<f64> = (0..=k_side)
        .map(|k| {
            if k == 0 {
                0.0
            } else if k == k_side {
                1.0
            } else {
                let phi = FRAC_PI_2 * k as f64 / k_side as f64;
                phi.sin() / (phi.cos() + phi.sin())
            }
        })
        .collect();

    let mut vertices: Vec<Point> = Vec::new();
    let core_idx = |k: usize, l: usize| l * (k_side + 1) + k;
    for l in 0..=k_side {
        for k in 0..=k_side {
            let (s, t) = (grid[k], grid[l]);
            vertices.push([a * (s - t), a * (s + t - 1.0)]);
        }
    }
    let mut triangles: Vec<[usize; 3]> = Vec::new();
    let mut labels: Vec<Side> = Vec::new();
    for l in 0..k_side {
        for k in 0..k_side {
            let (v00, v10, v11, v01) = (
                core_idx(k, l),
                core_idx(k + 1, l),
                core_idx(k + 1, l + 1),
                core_idx(k, l + 1),
            );
            triangles.push([v00, v10, v11]);
            triangles.push([v00, v11, v01]);
            labels.extend([Side::Minus, Side::Minus]);
        }
    }

    // Ring 0 is the diamond boundary, walked counterclockwise from θ = 0.
    let ring0: Vec<usize> = (0..n)
        .map(|i| {
            let (side, j) = (i / k_side, i % k_side);
            match side {
                0 => core_idx(k_side, j),
                1 => core_idx(k_side - j, k_side),
                2 => core_idx(0, k_side - j),
                _ => core_idx(j, 0),
            }
        })
        .collect();
    let diamond: Vec<Point> = ring0.iter().map(|&v| vertices[v]).collect();
    let boundary: Vec<Point> = theta
        .iter()
        .map(|t| {
            let (c, s) = (t.cos(), t.sin());
            let scale = half_width / c.abs().max(s.abs());
            [scale * c, scale * s]
        })
        .collect();

    let mut rings = vec![ring0];
    push_graded_rings(&mut vertices, &mut rings, &diamond, &interface, n_radial_in);
    let first_outer = rings.len() - 1;
    push_graded_rings(&mut vertices, &mut rings, &interface, &boundary, n_radial_out);

    for layer in 0..rings.len() - 1 {
        let side = if layer < first_outer { Side::Minus } else { Side::Plus };
        let (inner, outer) = (&rings[layer], &rings[layer + 1]);
        for i in 0..n {
            let i1 = (i + 1) % n;
            triangles.push([inner[i], outer[i], outer[i1]]);
            triangles.push([inner[i], outer[i1], inner[i1]]);
            labels.extend([side, side]);
        }
    }

    let scale = half_width * half_width;
    for (k, t) in triangles.iter().enumerate() {
        let [p, q, r] = t.map(|v| vertices[v]);
        let area = 0.5 * ((q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]));
        if area <= 1e-14 * scale {
            let c = [(p[0] + q[0] + r[0]) / 3.0, (p[1] + q[1] + r[1]) / 3.0];
            let angle = c[1].atan2(c[0]).rem_euclid(2.0 * PI);
            return Err(Error::Geometry(format!(
                "degenerate or folded cell {k} (area {area:e}) near θ = {angle:.6}"
            )));
        }
    }

    let mesh = FittedMesh::from_parts(vertices, triangles, labels, beta_minus, beta_plus)?;
    let diagnostics = validate_mesh(&mesh);
    if !diagnostics.is_clean() {
        return Err(Error::Geometry(format!(
            "mapped mesh with n_theta={} n_radial_in={} n_radial_out={} is not shape-regular \
             (min angle {:.2}°, {} violation(s)); use more angular or radial resolution",
            params.n_theta,
            params.n_radial_in,
            params.n_radial_out,
            diagnostics.min_angle_deg,
            diagnostics.violations.len()
        )));
    }
    Ok(mesh)
}

/// Appends `layers` rings from `from` (already the last ring) to `to`, with
/// radial spacing growing geometrically along each ray.
fn push_graded_rings(
    vertices: &mut Vec<Point>,
    rings: &mut Vec<Vec<usize>>,
    from: &[Point],
    to: &[Point],
    layers: usize,
) {
    let n = from.len();
    for j in 1..=layers {
        let mut ring = Vec::with_capacity(n);
        for i in 0..n {
            let (p, q) = (from[i], to[i]);
            let ratio = q[0].hypot(q[1]) / p[0].hypot(p[1]);
            let frac = if j == layers {
                1.0
            } else if (ratio - 1.0).abs() < 1e-12 {
                j as f64 / layers as f64
            } else {
                (ratio.powf(j as f64 / layers as f64) - 1.0) / (ratio - 1.0)
            };
            let point = if j == layers {
                q
            } else {
                [p[0] + frac * (q[0] - p[0]), p[1] + frac * (q[1] - p[1])]
            };
            ring.push(vertices.len());
            vertices.push(point);
        }
        rings.push(ring);
    }
}

fn check_simple_polygon(poly: &[Point], theta: &[f64]) -> Result<()> {
    let n = poly.len();
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (c, d) = (poly[j], poly[(j + 1) % n]);
            if segments_cross(a, b, c, d) {
                return Err(Error::Geometry(format!(
                    "interface polygon self-intersects between θ = {:.6} and θ = {:.6}",
                    theta[i], theta[j]
                )));
            }
        }
    }
    Ok(())
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn segments_cross(a: Point, b: Point, c: Point, d: Point) -> bool {
    let (d1, d2) = (orient(c, d, a), orient(c, d, b));
    let (d3, d4) = (orient(a, b, c), orient(a, b, d));
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{dist, EdgeKind};

    #[test]
    fn line_mesh_counts() {
        let m = build_line_mesh(2, 1.0, 1.0).unwrap();
        assert_eq!((m.n_vertices(), m.n_triangles(), m.interface_edge_count()), (9, 8, 2));
        let m = build_line_mesh(4, 1.0, 2.0).unwrap();
        assert_eq!((m.n_vertices(), m.n_triangles(), m.interface_edge_count()), (25, 32, 4));
    }

    #[test]
    fn line_mesh_homogeneous_beta_keeps_labels() {
        let m = build_line_mesh(2, 1.0, 1.0).unwrap();
        assert!((0..m.n_triangles()).all(|k| m.beta(k) == 1.0));
        for k in 0..m.n_triangles() {
            let y = m.barycenter(k)[1];
            assert_eq!(m.label(k), if y < 0.5 { Side::Minus } else { Side::Plus });
        }
    }

    #[test]
    fn line_mesh_rejects_odd_or_zero() {
        for n in [0, 1, 3, 7] {
            assert!(matches!(build_line_mesh(n, 1.0, 1.0), Err(Error::Geometry(_))));
        }
    }

    #[test]
    fn octagon_mesh() {
        let p = MappedMeshParams {
            n_theta: 8,
            n_radial_in: 2,
            n_radial_out: 2,
            half_width: 1.0,
        };
        let m = build_mapped_mesh(&|_| 0.5, p, 1.0, 1.0).unwrap();
        assert_eq!(m.interface_edge_count(), 8);
        for e in m.edges().iter().filter(|e| e.kind == EdgeKind::Interface) {
            for &v in &e.vertices {
                let x = m.vertices()[v];
                assert!((x[0].hypot(x[1]) - 0.5).abs() < 1e-15);
            }
            let len = dist(m.vertices()[e.vertices[0]], m.vertices()[e.vertices[1]]);
            assert!((len - 2.0 * 0.5 * (PI / 8.0).sin()).abs() < 1e-14);
        }
    }

    #[test]
    fn coarse_square_polygon_is_valid() {
        let p = MappedMeshParams {
            n_theta: 4,
            n_radial_in: 1,
            n_radial_out: 1,
            half_width: 1.0,
        };
        let m = build_mapped_mesh(&|_| 0.5, p, 1.0, 1.0).unwrap();
        assert_eq!(m.interface_edge_count(), 4);
        assert!((0..m.n_triangles()).all(|k| m.signed_area(k) > 0.0));
        // thicker layers squeeze the four-sided ring below the angle bound
        let thick = MappedMeshParams { n_radial_in: 2, n_radial_out: 2, ..p };
        assert!(matches!(build_mapped_mesh(&|_| 0.5, thick, 1.0, 1.0), Err(Error::Geometry(_))));
    }

    #[test]
    fn rejects_bad_mapped_input() {
        let p = MappedMeshParams { n_theta: 6, ..Default::default() };
        assert!(build_mapped_mesh(&|_| 0.5, p, 1.0, 1.0).is_err());
        let p = MappedMeshParams { n_theta: 8, ..Default::default() };
        assert!(build_mapped_mesh(&|_| 1.2, p, 1.0, 1.0).is_err());
        assert!(build_mapped_mesh(&|_| -0.1, p, 1.0, 1.0).is_err());
    }

    #[test]
    fn pinched_radius_gives_degenerate_cells() {
        let p = MappedMeshParams {
            n_theta: 16,
            n_radial_in: 4,
            n_radial_out: 4,
            half_width: 1.0,
        };
        let pinched = |t: f64| 0.5 * (1.0 - (1.0 - 1e-7) * t.cos().powi(2));
        let err = build_mapped_mesh(&pinched, p, 1.0, 1.0).unwrap_err();
        let msg = err.to_string();
        assert!(matches!(err, Error::Geometry(_)));
        assert!(msg.contains("θ ="), "{msg}");
    }

    #[test]
    fn polygon_crossing_detection() {
        assert!(segments_cross([0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.0]));
        assert!(!segments_cross([0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]));
    }
}
