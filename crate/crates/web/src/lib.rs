//! Browser bindings. Each export takes plain arguments and returns a JSON string;
//! the `*_view` functions behind them are ordinary Rust and tested natively.

use ifred::experiments::{CaseId, Experiment, Resolution, RunConfig};
use ifred::mesh::MappedMeshParams;
use ifred::reduction::{make_basis, BasisKind, ReducedRunRecord};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Resolutions kept small enough to stay interactive.
pub const MAX_LINE_N: usize = 128;
pub const MAX_N_THETA: usize = 256;

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Record {
    pub m: usize,
    pub g_rel_err: f64,
    pub eu_rms: f64,
    pub eu_inf: f64,
    pub eq_rms: f64,
    pub eq_inf: f64,
    pub residual: f64,
}

impl From<ReducedRunRecord> for Record {
    fn from(r: ReducedRunRecord) -> Self {
        Record {
            m: r.m,
            g_rel_err: r.g_rel_err,
            eu_rms: r.eu_rms,
            eu_inf: r.eu_inf,
            eq_rms: r.eq_rms,
            eq_inf: r.eq_inf,
            residual: r.residual,
        }
    }
}

/// Mesh with per-corner values of the reduced solution and of its error.
#[derive(Debug, Clone, Serialize)]
pub struct FieldView {
    pub vertices: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
    /// Reduced solution at the three corners of each triangle, from that triangle's side.
    pub values: Vec<[f64; 3]>,
    /// `u_h - u_{m,h}` at the same corners.
    pub errors: Vec<[f64; 3]>,
    /// Interface polyline in parameter order.
    pub interface: Vec<[f64; 2]>,
    pub record: Record,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProjectionView {
    pub params: Vec<f64>,
    pub g: Vec<f64>,
    pub g_m: Vec<f64>,
    pub coefficients: Vec<f64>,
    pub rel_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepView {
    pub records: Vec<Record>,
}

fn config(case: &str, basis: &str, resolution: usize) -> Result<RunConfig, String> {
    let case: CaseId = case.parse().map_err(|e: ifred::Error| e.to_string())?;
    let basis: BasisKind = basis.parse().map_err(|e: ifred::Error| e.to_string())?;
    let mut res = Resolution::default();
    match case {
        CaseId::LineFlux | CaseId::LineSol => {
            if resolution > MAX_LINE_N {
                return Err(format!("line resolution is limited to {MAX_LINE_N}"));
            }
            res.n = resolution;
        }
        _ => {
            if resolution > MAX_N_THETA {
                return Err(format!("n_theta is limited to {MAX_N_THETA}"));
            }
            let layers = (resolution / 8).max(1);
            res.mapped = MappedMeshParams { n_theta: resolution, n_radial_in: layers, n_radial_out: layers, ..res.mapped };
        }
    }
    let c = RunConfig { basis, resolution: res, ..RunConfig::new(case) };
    c.validate().map_err(|e| e.to_string())?;
    Ok(c)
}

fn build(case: &str, basis: &str, resolution: usize) -> Result<Experiment, String> {
    Experiment::build(&config(case, basis, resolution)?).map_err(|e| e.to_string())
}

pub fn field_view(case: &str, basis: &str, resolution: usize, m: usize) -> Result<FieldView, String> {
    let exp = build(case, basis, resolution)?;
    let study = exp.study().map_err(|e| e.to_string())?;
    let b = make_basis(exp.config.basis, m).map_err(|e| e.to_string())?;
    let reduced = study.solve_reduced(&b).map_err(|e| e.to_string())?;
    let record = study.run(&b).map_err(|e| e.to_string())?;
    let mesh = &exp.mesh;
    let mut values = Vec::with_capacity(mesh.n_triangles());
    let mut errors = Vec::with_capacity(mesh.n_triangles());
    for k in 0..mesh.n_triangles() {
        let r = study.reference().element_values(mesh, k);
        let u = reduced.solution.element_values(mesh, k);
        values.push(u);
        errors.push([r[0] - u[0], r[1] - u[1], r[2] - u[2]]);
    }
    let mut interface: Vec<[f64; 2]> = exp.trace.edges.iter().map(|e| mesh.vertices()[e.start]).collect();
    if let Some(last) = exp.trace.edges.last() {
        interface.push(mesh.vertices()[last.end]);
    }
    Ok(FieldView {
        vertices: mesh.vertices().to_vec(),
        triangles: mesh.triangles().to_vec(),
        values,
        errors,
        interface,
        record: record.into(),
    })
}

pub fn projection_view(case: &str, basis: &str, resolution: usize, m: usize, samples: usize) -> Result<ProjectionView, String> {
    let exp = build(case, basis, resolution)?;
    let b = make_basis(exp.config.basis, m).map_err(|e| e.to_string())?;
    let p = exp.study().map_err(|e| e.to_string())?.project(&b).map_err(|e| e.to_string())?;
    let (lo, hi) = match exp.trace.kind {
        ifred::mesh::ParamKind::LineX => (0.0, 1.0),
        ifred::mesh::ParamKind::Angle => (0.0, std::f64::consts::TAU),
    };
    let samples = samples.max(2);
    let params: Vec<f64> = (0..samples).map(|i| lo + (hi - lo) * i as f64 / (samples - 1) as f64).collect();
    Ok(ProjectionView {
        g: params.iter().map(|&t| (exp.spec.datum)(t)).collect(),
        g_m: params.iter().map(|&t| p.eval(t)).collect(),
        params,
        coefficients: p.coefficients.clone(),
        rel_error: p.rel_error,
    })
}

pub fn sweep_view(case: &str, basis: &str, resolution: usize, m_max: usize) -> Result<SweepView, String> {
    let exp = build(case, basis, resolution)?;
    let study = exp.study().map_err(|e| e.to_string())?;
    let records = (1..=m_max.max(1))
        .map(|m| {
            let b = make_basis(exp.config.basis, m).map_err(|e| e.to_string())?;
            study.run(&b).map(Record::from).map_err(|e| e.to_string())
        })
        .collect::<Result<Vec<_>, String>>()?;
    Ok(SweepView { records })
}

fn to_json<T: Serialize>(r: Result<T, String>) -> Result<String, JsValue> {
    r.and_then(|v| serde_json::to_string(&v).map_err(|e| e.to_string()))
        .map_err(|e| JsValue::from_str(&e))
}

/// Reduced solution and its error on the mesh, as JSON.
#[wasm_bindgen]
pub fn solve_field(case: &str, basis: &str, resolution: usize, m: usize) -> Result<String, JsValue> {
    to_json(field_view(case, basis, resolution, m))
}

/// Interface datum and its projection sampled along the parameter, as JSON.
#[wasm_bindgen]
pub fn project_datum(case: &str, basis: &str, resolution: usize, m: usize, samples: usize) -> Result<String, JsValue> {
    to_json(projection_view(case, basis, resolution, m, samples))
}

/// Error columns for m = 1..=m_max, as JSON.
#[wasm_bindgen]
pub fn rank_sweep(case: &str, basis: &str, resolution: usize, m_max: usize) -> Result<String, JsValue> {
    to_json(sweep_view(case, basis, resolution, m_max))
}
