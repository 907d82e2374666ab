//! Ordered interface edges with a scalar parameter and Gauss rules.

use std::f64::consts::{PI, TAU};

use super::{dist, EdgeKind, FittedMesh, Point, Side};
use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

/// How the interface parameter is read off a vertex position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    /// `s = x`, for the horizontal line.
    LineX,
    /// `s = θ = atan2(y, x)` in `[0, 2π)`, for closed curves around the origin.
    Angle,
}

impl ParamKind {
    fn of(self, p: Point) -> f64 {
        match self {
            ParamKind::LineX => p[0],
            ParamKind::Angle => p[1].atan2(p[0]).rem_euclid(TAU),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadPoint {
    /// Local coordinate along the edge, 0 at `start`, 1 at `end`.
    pub t: f64,
    pub param: f64,
    pub point: Point,
    /// Arc-length weight.
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceEdge {
    pub edge: usize,
    /// Endpoints ordered so that the parameter increases from `start` to `end`.
    pub start: usize,
    pub end: usize,
    /// Parameters at `start` and `end`; `end` may exceed 2π on the closing edge.
    pub params: [f64; 2],
    pub mid_param: f64,
    pub midpoint: Point,
    pub length: f64,
    /// Unit normal pointing from the MINUS triangle into the PLUS triangle.
    pub normal: [f64; 2],
    pub minus_triangle: usize,
    pub plus_triangle: usize,
    pub quad: Vec<QuadPoint>,
}

#[derive(Debug, Clone)]
pub struct InterfaceTrace {
    pub kind: ParamKind,
    pub edges: Vec<TraceEdge>,
    /// Parameter of each interface vertex, `None` elsewhere.
    pub vertex_param: Vec<Option<f64>>,
    pub quad_order: usize,
    /// Position in `edges` of each mesh edge that lies on the interface.
    edge_slot: Vec<Option<usize>>,
}

impl InterfaceTrace {
    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).sum()
    }

    pub fn quad_points(&self) -> impl Iterator<Item = &QuadPoint> {
        self.edges.iter().flat_map(|e| e.quad.iter())
    }

    /// Trace entry for a mesh edge id.
    pub fn edge_for(&self, mesh_edge: usize) -> Option<&TraceEdge> {
        self.edge_slot.get(mesh_edge).copied().flatten().map(|i| &self.edges[i])
    }
}

/// Collects the interface edges of `mesh`, sorts them by parameter, orients the
/// normals MINUS→PLUS and attaches a `quad_order`-point Gauss rule to each edge.
pub fn extract_interface(mesh: &FittedMesh, kind: ParamKind, quad_order: usize) -> Result<InterfaceTrace> {
    if quad_order == 0 {
        return Err(Error::Config("quadrature order must be positive".into()));
    }
    let rule = GaussLegendre::new(quad_order);
    let verts = mesh.vertices();
    let mut edges = Vec::new();
    let mut vertex_param = vec![None; mesh.n_vertices()];

    for (id, e) in mesh.edges().iter().enumerate() {
        if e.kind != EdgeKind::Interface {
            continue;
        }
        let (t0, t1) = (e.triangles[0], e.triangles[1]);
        let (minus_triangle, plus_triangle) = match (mesh.label(t0), mesh.label(t1)) {
            (Side::Minus, Side::Plus) => (t0, t1),
            (Side::Plus, Side::Minus) => (t1, t0),
            _ => {
                return Err(Error::Consistency(format!(
                    "interface edge {id} does not separate MINUS from PLUS"
                )))
            }
        };
        let [mut a, mut b] = e.vertices;
        let (mut pa, mut pb) = (kind.of(verts[a]), kind.of(verts[b]));
        let mut delta = pb - pa;
        if kind == ParamKind::Angle {
            delta = (delta + PI).rem_euclid(TAU) - PI;
        }
        if delta < 0.0 {
            std::mem::swap(&mut a, &mut b);
            std::mem::swap(&mut pa, &mut pb);
            delta = -delta;
        }
        vertex_param[a] = Some(pa);
        vertex_param[b] = Some(pb);

        let (xa, xb) = (verts[a], verts[b]);
        let length = dist(xa, xb);
        let tangent = [(xb[0] - xa[0]) / length, (xb[1] - xa[1]) / length];
        let mut normal = [tangent[1], -tangent[0]];
        let toward = |n: [f64; 2], k: usize| {
            let c = mesh.barycenter(k);
            n[0] * (c[0] - xa[0]) + n[1] * (c[1] - xa[1])
        };
        if toward(normal, plus_triangle) < 0.0 {
            normal = [-normal[0], -normal[1]];
        }
        let (into_plus, into_minus) = (toward(normal, plus_triangle), toward(normal, minus_triangle));
        if !(into_plus > 0.0 && into_minus < 0.0) {
            return Err(Error::Consistency(format!(
                "interface edge {id}: MINUS and PLUS triangles lie on the same side"
            )));
        }

        let lerp = |t: f64| [xa[0] + t * (xb[0] - xa[0]), xa[1] + t * (xb[1] - xa[1])];
        let quad = rule
            .iter()
            .map(|(t, w)| QuadPoint {
                t,
                param: pa + t * delta,
                point: lerp(t),
                weight: w * length,
            })
            .collect();
        let mid_param = match kind {
            ParamKind::LineX => pa + 0.5 * delta,
            ParamKind::Angle => (pa + 0.5 * delta).rem_euclid(TAU),
        };
        edges.push(TraceEdge {
            edge: id,
            start: a,
            end: b,
            params: [pa, pa + delta],
            mid_param,
            midpoint: lerp(0.5),
            length,
            normal,
            minus_triangle,
            plus_triangle,
            quad,
        });
    }
    if edges.is_empty() {
        return Err(Error::Geometry("mesh has no interface edges".into()));
    }
    edges.sort_by(|x, y| x.mid_param.total_cmp(&y.mid_param));

    // orientation of the normal relative to the parameter direction must agree everywhere
    let handedness = |e: &TraceEdge| {
        let (xa, xb) = (verts[e.start], verts[e.end]);
        ((xb[0] - xa[0]) * e.normal[1] - (xb[1] - xa[1]) * e.normal[0]).signum()
    };
    let reference = handedness(&edges[0]);
    if let Some(bad) = edges.iter().find(|e| handedness(e) != reference) {
        return Err(Error::Consistency(format!(
            "mixed normal orientation on interface edge {} (parameter {})",
            bad.edge, bad.mid_param
        )));
    }
    for w in edges.windows(2) {
        if w[0].end != w[1].start {
            return Err(Error::Consistency(format!(
                "interface edges {} and {} are not consecutive",
                w[0].edge, w[1].edge
            )));
        }
    }
    if kind == ParamKind::Angle && edges.last().map(|e| e.end) != Some(edges[0].start) {
        return Err(Error::Consistency("closed interface does not close up".into()));
    }

    let mut edge_slot = vec![None; mesh.edges().len()];
    for (i, e) in edges.iter().enumerate() {
        edge_slot[e.edge] = Some(i);
    }
    Ok(InterfaceTrace {
        kind,
        edges,
        vertex_param,
        quad_order,
        edge_slot,
    })
}
