use super::{EdgeKind, FittedMesh, Side};

pub const DEFAULT_MIN_ANGLE_DEG: f64 = 15.0;

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// Edge shared by a number of triangles other than its class allows.
    NonConforming { edge: usize, kind: EdgeKind, triangles: usize },
    NonPositiveArea { triangle: usize, area: f64 },
    SmallAngle { triangle: usize, degrees: f64 },
    /// INTERIOR edge whose two triangles carry different labels.
    MixedInteriorEdge { edge: usize },
    /// INTERFACE edge without one MINUS and one PLUS neighbour.
    InterfaceLabels { edge: usize },
    BetaMismatch { triangle: usize, beta: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeshDiagnostics {
    pub violations: Vec<Violation>,
    pub min_angle_deg: f64,
    pub min_area: f64,
    pub angle_threshold_deg: f64,
}

impl MeshDiagnostics {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate_mesh(mesh: &FittedMesh) -> MeshDiagnostics {
    validate_mesh_with(mesh, DEFAULT_MIN_ANGLE_DEG)
}

pub fn validate_mesh_with(mesh: &FittedMesh, angle_threshold_deg: f64) -> MeshDiagnostics {
    let mut violations = Vec::new();

    for (id, e) in mesh.edges().iter().enumerate() {
        let expected = if e.kind == EdgeKind::Boundary { 1 } else { 2 };
        if e.triangles.len() != expected {
            violations.push(Violation::NonConforming {
                edge: id,
                kind: e.kind,
                triangles: e.triangles.len(),
            });
            continue;
        }
        match e.kind {
            EdgeKind::Interior => {
                if mesh.label(e.triangles[0]) != mesh.label(e.triangles[1]) {
                    violations.push(Violation::MixedInteriorEdge { edge: id });
                }
            }
            EdgeKind::Interface => {
                let mut sides = [mesh.label(e.triangles[0]), mesh.label(e.triangles[1])];
                sides.sort();
                if sides != [Side::Minus, Side::Plus] {
                    violations.push(Violation::InterfaceLabels { edge: id });
                }
            }
            EdgeKind::Boundary => {}
        }
    }

    let mut min_angle = f64::INFINITY;
    let mut min_area = f64::INFINITY;
    for k in 0..mesh.n_triangles() {
        let area = mesh.signed_area(k);
        min_area = min_area.min(area);
        if area <= 0.0 {
            violations.push(Violation::NonPositiveArea { triangle: k, area });
            continue;
        }
        let angle = min_angle_deg(mesh, k);
        min_angle = min_angle.min(angle);
        if angle < angle_threshold_deg {
            violations.push(Violation::SmallAngle { triangle: k, degrees: angle });
        }
        let expected = match mesh.label(k) {
            Side::Minus => mesh.beta_minus(),
            Side::Plus => mesh.beta_plus(),
        };
        if mesh.beta(k) != expected || !(mesh.beta(k) > 0.0) {
            violations.push(Violation::BetaMismatch { triangle: k, beta: mesh.beta(k) });
        }
    }

    MeshDiagnostics {
        violations,
        min_angle_deg: min_angle,
        min_area,
        angle_threshold_deg,
    }
}

fn min_angle_deg(mesh: &FittedMesh, k: usize) -> f64 {
    let p = mesh.corners(k);
    (0..3)
        .map(|i| {
            let (a, b, c) = (p[i], p[(i + 1) % 3], p[(i + 2) % 3]);
            let u = [b[0] - a[0], b[1] - a[1]];
            let v = [c[0] - a[0], c[1] - a[1]];
            let cross = u[0] * v[1] - u[1] * v[0];
            let dot = u[0] * v[0] + u[1] * v[1];
            cross.abs().atan2(dot).to_degrees()
        })
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_line_mesh, build_mapped_mesh, star_radius, MappedMeshParams};

    #[test]
    fn generated_line_mesh_is_clean() {
        let d = validate_mesh(&build_line_mesh(4, 1.0, 2.0).unwrap());
        assert!(d.is_clean(), "{:?}", d.violations);
        assert!((d.min_angle_deg - 45.0).abs() < 1e-9);
    }

    #[test]
    fn relabeled_triangle_is_reported() {
        let m = build_line_mesh(4, 1.0, 2.0).unwrap();
        // triangle 0 sits in the bottom-left corner, far from y = 1/2
        let d = validate_mesh(&m.with_relabeled(0, Side::Plus));
        assert!(d
            .violations
            .iter()
            .any(|v| matches!(v, Violation::MixedInteriorEdge { .. })));
    }

    #[test]
    fn star_mesh_angle_above_threshold() {
        let p = MappedMeshParams {
            n_theta: 64,
            n_radial_in: 8,
            n_radial_out: 8,
            half_width: 1.0,
        };
        let d = validate_mesh(&build_mapped_mesh(&star_radius, p, 1.0, 2.0).unwrap());
        assert!(d.is_clean(), "{:?}", &d.violations[..d.violations.len().min(5)]);
        assert!(d.min_angle_deg > DEFAULT_MIN_ANGLE_DEG, "{}", d.min_angle_deg);
    }
}
