//! Fitted triangulations with subdomain labels and interface-aligned edges.

mod generate;
mod io;
mod trace;
mod validate;

pub use generate::{
    build_line_mesh, build_mapped_mesh, star_radius, MappedMeshParams, CIRCLE_RADIUS,
    DEFAULT_HALF_WIDTH,
};
pub use io::{read_mesh, write_mesh, MeshFile};
pub use trace::{extract_interface, InterfaceTrace, ParamKind, QuadPoint, TraceEdge};
pub use validate::{validate_mesh, validate_mesh_with, MeshDiagnostics, Violation, DEFAULT_MIN_ANGLE_DEG};

use std::collections::HashMap;

use crate::error::{Error, Result};

pub type Point = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Minus,
    Plus,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Minus => "MINUS",
            Side::Plus => "PLUS",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    Interior,
    Boundary,
    Interface,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    /// Endpoints, smaller index first.
    pub vertices: [usize; 2],
    /// Adjacent triangles in order of discovery. A conforming mesh has one or two.
    pub triangles: Vec<usize>,
    pub kind: EdgeKind,
}

/// Conforming triangulation split into a MINUS and a PLUS subdomain.
///
/// Broken degrees of freedom: vertex `v` owns dof `v`; a vertex lying on an
/// interface edge additionally owns a PLUS-side copy numbered after all vertices.
/// Triangles labelled PLUS address the PLUS copy of their interface vertices.
#[derive(Debug, Clone)]
pub struct FittedMesh {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    labels: Vec<Side>,
    beta: Vec<f64>,
    beta_minus: f64,
    beta_plus: f64,
    edges: Vec<Edge>,
    tri_edges: Vec<[usize; 3]>,
    boundary_vertex: Vec<bool>,
    plus_copy: Vec<Option<usize>>,
    copy_owner: Vec<usize>,
}

impl FittedMesh {
    /// Builds the edge table and broken-dof map. Edge classes follow the labels
    /// given here and are frozen afterwards.
    pub fn from_parts(
        vertices: Vec<Point>,
        triangles: Vec<[usize; 3]>,
        labels: Vec<Side>,
        beta_minus: f64,
        beta_plus: f64,
    ) -> Result<Self> {
        if !(beta_minus > 0.0 && beta_plus > 0.0) || !beta_minus.is_finite() || !beta_plus.is_finite() {
            return Err(Error::Config(format!(
                "diffusion coefficients must be positive, got {beta_minus} and {beta_plus}"
            )));
        }
        if labels.len() != triangles.len() {
            return Err(Error::Geometry(format!(
                "{} labels for {} triangles",
                labels.len(),
                triangles.len()
            )));
        }
        let nv = vertices.len();
        if let Some(t) = triangles.iter().find(|t| t.iter().any(|&v| v >= nv)) {
            return Err(Error::Geometry(format!("triangle {t:?} references a missing vertex")));
        }
        if let Some(t) = triangles.iter().find(|t| t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
            return Err(Error::Geometry(format!("triangle {t:?} repeats a vertex")));
        }

        let mut lookup: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edges: Vec<Edge> = Vec::new();
        let mut tri_edges = Vec::with_capacity(triangles.len());
        for (k, tri) in triangles.iter().enumerate() {
            let mut ids = [0; 3];
            for i in 0..3 {
                let (a, b) = (tri[i], tri[(i + 1) % 3]);
                let key = (a.min(b), a.max(b));
                let id = *lookup.entry(key).or_insert_with(|| {
                    edges.push(Edge {
                        vertices: [key.0, key.1],
                        triangles: Vec::with_capacity(2),
                        kind: EdgeKind::Interior,
                    });
                    edges.len() - 1
                });
                edges[id].triangles.push(k);
                ids[i] = id;
            }
            tri_edges.push(ids);
        }

        let mut boundary_vertex = vec![false; nv];
        let mut on_interface = vec![false; nv];
        for e in &mut edges {
            e.kind = match e.triangles.as_slice() {
                [_] => EdgeKind::Boundary,
                [a, b] if labels[*a] != labels[*b] => EdgeKind::Interface,
                _ => EdgeKind::Interior,
            };
            match e.kind {
                EdgeKind::Boundary => e.vertices.iter().for_each(|&v| boundary_vertex[v] = true),
                EdgeKind::Interface => e.vertices.iter().for_each(|&v| on_interface[v] = true),
                EdgeKind::Interior => {}
            }
        }

        let mut plus_copy = vec![None; nv];
        let mut copy_owner = Vec::new();
        for (v, copy) in plus_copy.iter_mut().enumerate() {
            if on_interface[v] {
                *copy = Some(nv + copy_owner.len());
                copy_owner.push(v);
            }
        }

        let beta = labels
            .iter()
            .map(|s| match s {
                Side::Minus => beta_minus,
                Side::Plus => beta_plus,
            })
            .collect();

        Ok(FittedMesh {
            vertices,
            triangles,
            labels,
            beta,
            beta_minus,
            beta_plus,
            edges,
            tri_edges,
            boundary_vertex,
            plus_copy,
            copy_owner,
        })
    }

    /// Copy with one triangle moved to the other subdomain, keeping the frozen
    /// edge classes. Used to inject label faults when exercising diagnostics.
    pub fn with_relabeled(&self, triangle: usize, side: Side) -> FittedMesh {
        let mut out = self.clone();
        out.labels[triangle] = side;
        out.beta[triangle] = match side {
            Side::Minus => self.beta_minus,
            Side::Plus => self.beta_plus,
        };
        out
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn label(&self, k: usize) -> Side {
        self.labels[k]
    }

    pub fn labels(&self) -> &[Side] {
        &self.labels
    }

    pub fn beta(&self, k: usize) -> f64 {
        self.beta[k]
    }

    pub fn beta_minus(&self) -> f64 {
        self.beta_minus
    }

    pub fn beta_plus(&self) -> f64 {
        self.beta_plus
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Edge ids of triangle `k`; entry `i` joins local vertices `i` and `i + 1`.
    pub fn tri_edges(&self, k: usize) -> [usize; 3] {
        self.tri_edges[k]
    }

    pub fn interface_edge_count(&self) -> usize {
        self.edges.iter().filter(|e| e.kind == EdgeKind::Interface).count()
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.boundary_vertex[v]
    }

    pub fn is_interface_vertex(&self, v: usize) -> bool {
        self.plus_copy[v].is_some()
    }

    /// Index of the PLUS-side copy of an interface vertex.
    pub fn plus_dof(&self, v: usize) -> Option<usize> {
        self.plus_copy[v]
    }

    pub fn n_interface_vertices(&self) -> usize {
        self.copy_owner.len()
    }

    pub fn n_broken_dofs(&self) -> usize {
        self.vertices.len() + self.copy_owner.len()
    }

    /// Broken dofs addressed by triangle `k`.
    pub fn tri_dofs(&self, k: usize) -> [usize; 3] {
        let t = self.triangles[k];
        match self.labels[k] {
            Side::Minus => t,
            Side::Plus => t.map(|v| self.plus_copy[v].unwrap_or(v)),
        }
    }

    /// Mesh vertex behind a broken dof.
    pub fn dof_vertex(&self, dof: usize) -> usize {
        let nv = self.vertices.len();
        if dof < nv {
            dof
        } else {
            self.copy_owner[dof - nv]
        }
    }

    pub fn corners(&self, k: usize) -> [Point; 3] {
        self.triangles[k].map(|v| self.vertices[v])
    }

    pub fn signed_area(&self, k: usize) -> f64 {
        let [a, b, c] = self.corners(k);
        0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
    }

    pub fn area(&self, k: usize) -> f64 {
        self.signed_area(k).abs()
    }

    pub fn barycenter(&self, k: usize) -> Point {
        let [a, b, c] = self.corners(k);
        [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0]
    }

    /// Gradients of the three barycentric hat functions on triangle `k`.
    pub fn hat_gradients(&self, k: usize) -> [[f64; 2]; 3] {
        let p = self.corners(k);
        let two_area = 2.0 * self.signed_area(k);
        let mut g = [[0.0; 2]; 3];
        for i in 0..3 {
            let a = p[(i + 1) % 3];
            let b = p[(i + 2) % 3];
            g[i] = [(a[1] - b[1]) / two_area, (b[0] - a[0]) / two_area];
        }
        g
    }

    /// Largest edge length, the usual `h`.
    pub fn max_edge_length(&self) -> f64 {
        self.edges
            .iter()
            .map(|e| dist(self.vertices[e.vertices[0]], self.vertices[e.vertices[1]]))
            .fold(0.0, f64::max)
    }
}

pub(crate) fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_triangles() -> FittedMesh {
        FittedMesh::from_parts(
            vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
            vec![[0, 1, 2], [0, 2, 3]],
            vec![Side::Minus, Side::Plus],
            1.0,
            3.0,
        )
        .unwrap()
    }

    #[test]
    fn classifies_edges_from_labels() {
        let m = two_triangles();
        assert_eq!(m.edges().len(), 5);
        assert_eq!(m.interface_edge_count(), 1);
        let diag = m.edges().iter().find(|e| e.kind == EdgeKind::Interface).unwrap();
        assert_eq!(diag.vertices, [0, 2]);
        assert_eq!(m.n_broken_dofs(), 6);
        assert_eq!(m.tri_dofs(0), [0, 1, 2]);
        assert_eq!(m.tri_dofs(1), [4, 5, 3]);
        assert_eq!(m.dof_vertex(5), 2);
        assert_eq!(m.beta(1), 3.0);
    }

    #[test]
    fn hat_gradients_sum_to_zero() {
        let m = two_triangles();
        for k in 0..2 {
            let g = m.hat_gradients(k);
            assert!((g[0][0] + g[1][0] + g[2][0]).abs() < 1e-15);
            assert!((g[0][1] + g[1][1] + g[2][1]).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_bad_coefficients_and_indices() {
        let v = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        assert!(FittedMesh::from_parts(v.clone(), vec![[0, 1, 2]], vec![Side::Minus], 0.0, 1.0).is_err());
        assert!(FittedMesh::from_parts(v.clone(), vec![[0, 1, 5]], vec![Side::Minus], 1.0, 1.0).is_err());
        assert!(FittedMesh::from_parts(v, vec![[0, 1, 1]], vec![Side::Minus], 1.0, 1.0).is_err());
    }
}
