//! P1 solver for the flux-jump and solution-jump transmission problems.
//!
//! Jumps are `[a] = a⁺ - a⁻` with the interface normal pointing from MINUS into
//! PLUS. Integrating `-∇·(β∇u) = f` by parts on each side gives
//! `a(u, v) = (f, v) - ⟨g, v⟩_Γ` for `[β ∂ₙu] = g`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{assemble_from_triplets, SparseSymMatrix, SpdSolver};
use crate::mesh::{FittedMesh, InterfaceTrace, Point, Side};

pub type InterfaceFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type FieldFn = Arc<dyn Fn(Point, Side) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemCase {
    /// `[u] = 0`, `[β ∂ₙu] = g`.
    FluxJump,
    /// `[u] = g`, `[β ∂ₙu] = 0`.
    SolutionJump,
}

/// Data of one transmission problem.
#[derive(Clone)]
pub struct ProblemSpec {
    pub case: ProblemCase,
    pub source: FieldFn,
    pub datum: InterfaceFn,
    pub beta_minus: f64,
    pub beta_plus: f64,
    /// Boundary trace; homogeneous when absent.
    pub dirichlet: Option<FieldFn>,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("case", &self.case)
            .field("beta_minus", &self.beta_minus)
            .field("beta_plus", &self.beta_plus)
            .field("dirichlet", &self.dirichlet.is_some())
            .finish_non_exhaustive()
    }
}

impl ProblemSpec {
    /// Zero source, zero datum, homogeneous boundary.
    pub fn new(case: ProblemCase, beta_minus: f64, beta_plus: f64) -> Self {
        ProblemSpec {
            case,
            source: Arc::new(|_, _| 0.0),
            datum: Arc::new(|_| 0.0),
            beta_minus,
            beta_plus,
            dirichlet: None,
        }
    }

    pub fn with_source(mut self, f: impl Fn(Point, Side) -> f64 + Send + Sync + 'static) -> Self {
        self.source = Arc::new(f);
        self
    }

    pub fn with_datum(mut self, g: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.datum = Arc::new(g);
        self
    }

    pub fn with_datum_fn(mut self, g: InterfaceFn) -> Self {
        self.datum = g;
        self
    }

    pub fn with_dirichlet(mut self, u: impl Fn(Point, Side) -> f64 + Send + Sync + 'static) -> Self {
        self.dirichlet = Some(Arc::new(u));
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta_minus > 0.0 && self.beta_plus > 0.0) {
            return Err(Error::Config(format!(
                "diffusion coefficients must be positive, got {} and {}",
                self.beta_minus, self.beta_plus
            )));
        }
        Ok(())
    }

    fn check_mesh(&self, mesh: &FittedMesh) -> Result<()> {
        self.validate()?;
        if self.beta_minus != mesh.beta_minus() || self.beta_plus != mesh.beta_plus() {
            return Err(Error::Config(format!(
                "problem coefficients ({}, {}) do not match the mesh ({}, {})",
                self.beta_minus,
                self.beta_plus,
                mesh.beta_minus(),
                mesh.beta_plus()
            )));
        }
        Ok(())
    }
}

/// Nodal P1 values on the broken dofs of a mesh (see [`FittedMesh`]).
#[derive(Debug, Clone, PartialEq)]
pub struct BrokenSolution {
    pub values: Vec<f64>,
    pub case: ProblemCase,
}

impl BrokenSolution {
    pub fn minus_value(&self, v: usize) -> f64 {
        self.values[v]
    }

    pub fn plus_value(&self, mesh: &FittedMesh, v: usize) -> f64 {
        self.values[mesh.plus_dof(v).unwrap_or(v)]
    }

    /// `u⁺ - u⁻` at a vertex; zero off the interface.
    pub fn jump(&self, mesh: &FittedMesh, v: usize) -> f64 {
        self.plus_value(mesh, v) - self.minus_value(v)
    }

    pub fn element_values(&self, mesh: &FittedMesh, k: usize) -> [f64; 3] {
        mesh.tri_dofs(k).map(|d| self.values[d])
    }

    pub fn gradient(&self, mesh: &FittedMesh, k: usize) -> [f64; 2] {
        let u = self.element_values(mesh, k);
        let g = mesh.hat_gradients(k);
        [
            u[0] * g[0][0] + u[1] * g[1][0] + u[2] * g[2][0],
            u[0] * g[0][1] + u[1] * g[1][1] + u[2] * g[2][1],
        ]
    }
}

/// Jump lifting `E(φ)`: a broken P1 field supported next to the interface.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftingField {
    pub field: BrokenSolution,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DofLayout {
    /// One dof per vertex.
    Continuous,
    /// Interface vertices carry separate MINUS and PLUS dofs.
    Broken,
}

/// Stiffness restricted to the free (non-Dirichlet) dofs.
#[derive(Debug, Clone)]
pub struct AssembledOperator {
    pub matrix: SparseSymMatrix,
    /// Free index of each dof, `None` for Dirichlet dofs.
    pub free: Vec<Option<usize>>,
    pub layout: DofLayout,
}

impl AssembledOperator {
    pub fn n_free(&self) -> usize {
        self.matrix.dim()
    }
}

/// Local matrix `β_K ∫_K ∇φ_i · ∇φ_j`.
pub fn element_stiffness(mesh: &FittedMesh, k: usize) -> [[f64; 3]; 3] {
    let g = mesh.hat_gradients(k);
    let scale = mesh.beta(k) * mesh.area(k);
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = scale * (g[i][0] * g[j][0] + g[i][1] * g[j][1]);
        }
    }
    m
}

fn element_dofs(mesh: &FittedMesh, k: usize, layout: DofLayout) -> [usize; 3] {
    match layout {
        DofLayout::Continuous => mesh.triangles()[k],
        DofLayout::Broken => mesh.tri_dofs(k),
    }
}

/// P1 stiffness with Dirichlet rows and columns on the outer boundary removed.
pub fn assemble_stiffness(mesh: &FittedMesh, layout: DofLayout) -> Result<AssembledOperator> {
    let n_dofs = match layout {
        DofLayout::Continuous => mesh.n_vertices(),
        DofLayout::Broken => mesh.n_broken_dofs(),
    };
    let mut free = vec![None; n_dofs];
    let mut n_free = 0;
    for (dof, slot) in free.iter_mut().enumerate() {
        if !mesh.is_boundary_vertex(mesh.dof_vertex(dof)) {
            *slot = Some(n_free);
            n_free += 1;
        }
    }
    let mut triplets = Vec::with_capacity(9 * mesh.n_triangles());
    for k in 0..mesh.n_triangles() {
        let ke = element_stiffness(mesh, k);
        let dofs = element_dofs(mesh, k, layout);
        for i in 0..3 {
            let Some(fi) = free[dofs[i]] else { continue };
            for j in 0..3 {
                if let Some(fj) = free[dofs[j]] {
                    triplets.push((fi, fj, ke[i][j]));
                }
            }
        }
    }
    Ok(AssembledOperator {
        matrix: assemble_from_triplets(n_free, &triplets)?,
        free,
        layout,
    })
}

/// Source value at the barycenter of triangle `k`, the elementwise mean used
/// by both the load vector and the flux recovery.
pub fn source_mean(mesh: &FittedMesh, f: &dyn Fn(Point, Side) -> f64, k: usize) -> f64 {
    f(mesh.barycenter(k), mesh.label(k))
}

/// `(f, φ_i)` per vertex with one-point barycenter quadrature.
pub fn assemble_load(mesh: &FittedMesh, f: &dyn Fn(Point, Side) -> f64) -> Vec<f64> {
    let mut b = vec![0.0; mesh.n_vertices()];
    for (k, tri) in mesh.triangles().iter().enumerate() {
        let share = source_mean(mesh, f, k) * mesh.area(k) / 3.0;
        for &v in tri {
            b[v] += share;
        }
    }
    b
}

/// `-⟨g, φ_i⟩_Γ` per vertex, edge by edge with the trace's Gauss rule.
pub fn assemble_interface_load(mesh: &FittedMesh, trace: &InterfaceTrace, g: &dyn Fn(f64) -> f64) -> Vec<f64> {
    let mut b = vec![0.0; mesh.n_vertices()];
    for e in &trace.edges {
        let (mut at_start, mut at_end) = (0.0, 0.0);
        for q in &e.quad {
            let gw = q.weight * g(q.param);
            at_start += gw * (1.0 - q.t);
            at_end += gw * q.t;
        }
        b[e.start] -= at_start;
        b[e.end] -= at_end;
    }
    b
}

/// One-sided nodal lifting: the PLUS copy of each interface vertex takes
/// `φ(s_v)`, every other value is zero.
pub fn build_lifting(mesh: &FittedMesh, trace: &InterfaceTrace, phi: &dyn Fn(f64) -> f64) -> LiftingField {
    let mut values = vec![0.0; mesh.n_broken_dofs()];
    for (v, s) in trace.vertex_param.iter().enumerate() {
        if let (Some(s), Some(dof)) = (s, mesh.plus_dof(v)) {
            values[dof] = phi(*s);
        }
    }
    LiftingField {
        field: BrokenSolution {
            values,
            case: ProblemCase::SolutionJump,
        },
    }
}

/// Continuous stiffness factored once, reused for any data on the same mesh.
pub struct TransmissionSolver<'a> {
    mesh: &'a FittedMesh,
    trace: &'a InterfaceTrace,
    operator: AssembledOperator,
    solver: SpdSolver,
    vertex_side: Vec<Side>,
}

impl<'a> TransmissionSolver<'a> {
    pub fn new(mesh: &'a FittedMesh, trace: &'a InterfaceTrace) -> Result<Self> {
        let operator = assemble_stiffness(mesh, DofLayout::Continuous)?;
        let solver = SpdSolver::new(operator.matrix.clone())?;
        let mut vertex_side = vec![Side::Plus; mesh.n_vertices()];
        for (k, tri) in mesh.triangles().iter().enumerate() {
            if mesh.label(k) == Side::Minus {
                tri.iter().for_each(|&v| vertex_side[v] = Side::Minus);
            }
        }
        Ok(TransmissionSolver {
            mesh,
            trace,
            operator,
            solver,
            vertex_side,
        })
    }

    pub fn mesh(&self) -> &FittedMesh {
        self.mesh
    }

    pub fn trace(&self) -> &InterfaceTrace {
        self.trace
    }

    pub fn solve(&self, spec: &ProblemSpec) -> Result<BrokenSolution> {
        spec.check_mesh(self.mesh)?;
        match spec.case {
            ProblemCase::FluxJump => self.solve_flux_jump(spec),
            ProblemCase::SolutionJump => self.solve_solution_jump(spec),
        }
    }

    fn boundary_values(&self, spec: &ProblemSpec) -> Vec<f64> {
        let mesh = self.mesh;
        (0..mesh.n_vertices())
            .map(|v| match (&spec.dirichlet, mesh.is_boundary_vertex(v)) {
                (Some(u), true) => u(mesh.vertices()[v], self.vertex_side[v]),
                _ => 0.0,
            })
            .collect()
    }

    /// Solves `a(u, v) = rhs(v)` for continuous `u` with the given boundary values.
    fn solve_continuous(&self, rhs: &[f64], boundary: &[f64]) -> Result<Vec<f64>> {
        let mesh = self.mesh;
        let free = &self.operator.free;
        let mut b = vec![0.0; self.operator.n_free()];
        for (v, slot) in free.iter().enumerate() {
            if let Some(i) = slot {
                b[*i] = rhs[v];
            }
        }
        if boundary.iter().any(|&x| x != 0.0) {
            for k in 0..mesh.n_triangles() {
                let tri = mesh.triangles()[k];
                if tri.iter().all(|&v| free[v].is_some()) {
                    continue;
                }
                let ke = element_stiffness(mesh, k);
                for i in 0..3 {
                    let Some(fi) = free[tri[i]] else { continue };
                    for j in 0..3 {
                        if free[tri[j]].is_none() {
                            b[fi] -= ke[i][j] * boundary[tri[j]];
                        }
                    }
                }
            }
        }
        let x = self.solver.solve(&b)?;
        Ok(free
            .iter()
            .enumerate()
            .map(|(v, slot)| slot.map_or(boundary[v], |i| x[i]))
            .collect())
    }

    fn solve_flux_jump(&self, spec: &ProblemSpec) -> Result<BrokenSolution> {
        let mesh = self.mesh;
        let mut rhs = assemble_load(mesh, &*spec.source);
        let iface = assemble_interface_load(mesh, self.trace, &*spec.datum);
        rhs.iter_mut().zip(&iface).for_each(|(r, g)| *r += g);
        let u = self.solve_continuous(&rhs, &self.boundary_values(spec))?;
        Ok(embed_continuous(mesh, &u, ProblemCase::FluxJump))
    }

    fn solve_solution_jump(&self, spec: &ProblemSpec) -> Result<BrokenSolution> {
        let mesh = self.mesh;
        let lifting = build_lifting(mesh, self.trace, &*spec.datum);
        let w = &lifting.field.values;
        let mut rhs = assemble_load(mesh, &*spec.source);
        for k in 0..mesh.n_triangles() {
            let dofs = mesh.tri_dofs(k);
            if dofs.iter().all(|&d| w[d] == 0.0) {
                continue;
            }
            let ke = element_stiffness(mesh, k);
            let tri = mesh.triangles()[k];
            for i in 0..3 {
                rhs[tri[i]] -= (0..3).map(|j| ke[i][j] * w[dofs[j]]).sum::<f64>();
            }
        }
        let u0 = self.solve_continuous(&rhs, &self.boundary_values(spec))?;
        let mut out = embed_continuous(mesh, &u0, ProblemCase::SolutionJump);
        out.values.iter_mut().zip(w).for_each(|(u, w)| *u += w);
        Ok(out)
    }
}

fn embed_continuous(mesh: &FittedMesh, u: &[f64], case: ProblemCase) -> BrokenSolution {
    let values = (0..mesh.n_broken_dofs()).map(|d| u[mesh.dof_vertex(d)]).collect();
    BrokenSolution { values, case }
}

pub fn solve_flux_jump(mesh: &FittedMesh, trace: &InterfaceTrace, spec: &ProblemSpec) -> Result<BrokenSolution> {
    if spec.case != ProblemCase::FluxJump {
        return Err(Error::Config("solve_flux_jump needs a flux-jump problem".into()));
    }
    TransmissionSolver::new(mesh, trace)?.solve(spec)
}

pub fn solve_solution_jump(mesh: &FittedMesh, trace: &InterfaceTrace, spec: &ProblemSpec) -> Result<BrokenSolution> {
    if spec.case != ProblemCase::SolutionJump {
        return Err(Error::Config("solve_solution_jump needs a solution-jump problem".into()));
    }
    TransmissionSolver::new(mesh, trace)?.solve(spec)
}

/// `(Σ_K ∫_K |∇e|² + e²)^{1/2}` for a broken P1 field.
pub fn broken_h1_norm(mesh: &FittedMesh, values: &[f64]) -> f64 {
    let mut total = 0.0;
    for k in 0..mesh.n_triangles() {
        let e = mesh.tri_dofs(k).map(|d| values[d]);
        let g = mesh.hat_gradients(k);
        let gx = e[0] * g[0][0] + e[1] * g[1][0] + e[2] * g[2][0];
        let gy = e[0] * g[0][1] + e[1] * g[1][1] + e[2] * g[2][1];
        let area = mesh.area(k);
        let sum = e[0] + e[1] + e[2];
        let sq = e[0] * e[0] + e[1] * e[1] + e[2] * e[2];
        total += area * (gx * gx + gy * gy) + area / 12.0 * (sq + sum * sum);
    }
    total.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_line_mesh, extract_interface, ParamKind};

    fn line(n: usize, bm: f64, bp: f64) -> (FittedMesh, InterfaceTrace) {
        let m = build_line_mesh(n, bm, bp).unwrap();
        let t = extract_interface(&m, ParamKind::LineX, 4).unwrap();
        (m, t)
    }

    #[test]
    fn five_point_stencil_at_center_vertex() {
        let (m, _) = line(4, 1.0, 1.0);
        let op = assemble_stiffness(&m, DofLayout::Continuous).unwrap();
        let center = 2 * 5 + 2;
        let row: Vec<(usize, f64)> = op.matrix.row(op.free[center].unwrap()).collect();
        let diag = op.matrix.get(op.free[center].unwrap(), op.free[center].unwrap());
        assert!((diag - 4.0).abs() < 1e-14);
        let minus_ones = row.iter().filter(|(_, v)| (v + 1.0).abs() < 1e-14).count();
        let zeros = row.iter().filter(|(_, v)| v.abs() < 1e-14).count();
        assert_eq!(minus_ones, 4);
        assert_eq!(minus_ones + zeros + 1, row.len());
    }

    #[test]
    fn stiffness_is_linear_in_beta() {
        let (m1, _) = line(4, 1.0, 1.0);
        let (m2, _) = line(4, 2.0, 2.0);
        let a1 = assemble_stiffness(&m1, DofLayout::Continuous).unwrap().matrix;
        let a2 = assemble_stiffness(&m2, DofLayout::Continuous).unwrap().matrix;
        assert_eq!(a1.scaled(2.0), a2);
    }

    #[test]
    fn broken_layout_without_interface_matches_continuous() {
        let m = FittedMesh::from_parts(
            vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5]],
            vec![[0, 1, 4], [1, 2, 4], [2, 3, 4], [3, 0, 4]],
            vec![Side::Minus; 4],
            1.0,
            1.0,
        )
        .unwrap();
        let c = assemble_stiffness(&m, DofLayout::Continuous).unwrap();
        let b = assemble_stiffness(&m, DofLayout::Broken).unwrap();
        assert_eq!(c.matrix, b.matrix);
        assert_eq!(c.free, b.free);
    }

    #[test]
    fn load_vectors() {
        let (m, _) = line(4, 1.0, 1.0);
        assert!(assemble_load(&m, &|_, _| 0.0).iter().all(|&x| x == 0.0));
        let total: f64 = assemble_load(&m, &|_, _| 1.0).iter().sum();
        assert!((total - 1.0).abs() < 1e-14);
    }

    #[test]
    fn load_of_linear_source_on_two_triangles() {
        // one-point rule: each vertex receives f(barycenter) |K| / 3 = x_K / 6
        let m1 = FittedMesh::from_parts(
            vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
            vec![[0, 1, 2], [0, 2, 3]],
            vec![Side::Minus; 2],
            1.0,
            1.0,
        )
        .unwrap();
        let b = assemble_load(&m1, &|p, _| p[0]);
        let expect = [(2.0 / 3.0 + 1.0 / 3.0) / 6.0, 2.0 / 18.0, (2.0 / 3.0 + 1.0 / 3.0) / 6.0, 1.0 / 18.0];
        for (x, e) in b.iter().zip(expect) {
            assert!((x - e).abs() < 1e-15);
        }
        // the total is exact for linear f
        let total: f64 = assemble_load(&m1, &|p, _| p[0]).iter().sum();
        assert!((total - 0.5).abs() < 1e-15);
    }

    /// `∫_K x φ_i = |K| (Σ_j x_j + x_i) / 12`, summed into vertex rows.
    fn exact_linear_load(m: &FittedMesh) -> Vec<f64> {
        let mut out = vec![0.0; m.n_vertices()];
        for k in 0..m.n_triangles() {
            let tri = m.triangles()[k];
            let xs = m.corners(k).map(|p| p[0]);
            let sum: f64 = xs.iter().sum();
            for i in 0..3 {
                out[tri[i]] += m.area(k) * (sum + xs[i]) / 12.0;
            }
        }
        out
    }

    #[test]
    fn one_point_load_error_is_third_order_per_vertex() {
        let err = |n| {
            let (m, _) = line(n, 1.0, 1.0);
            let b = assemble_load(&m, &|p, _| p[0]);
            b.iter().zip(exact_linear_load(&m)).map(|(x, e)| (x - e).abs()).fold(0.0, f64::max)
        };
        let (e4, e8, e16) = (err(4), err(8), err(16));
        assert!(e4 > 0.0);
        assert!((e4 / e8 - 8.0).abs() < 0.5 && (e8 / e16 - 8.0).abs() < 0.5, "{e4} {e8} {e16}");
    }

    #[test]
    fn interface_load_constant_datum() {
        let (m, t) = line(4, 1.0, 1.0);
        let b = assemble_interface_load(&m, &t, &|_| 1.0);
        let mid = 2 * 5 + 2;
        assert!((b[mid] + 0.25).abs() < 1e-15);
        let ends = [2 * 5, 2 * 5 + 4];
        assert!(ends.iter().all(|&v| (b[v] + 0.125).abs() < 1e-15));
        assert!(assemble_interface_load(&m, &t, &|_| 0.0).iter().all(|&x| x == 0.0));
    }

    #[test]
    fn interface_load_is_local() {
        let (m, t) = line(4, 1.0, 1.0);
        // hat supported on the first edge [0, 1/4]
        let b = assemble_interface_load(&m, &t, &|s| if s <= 0.25 { 1.0 - 4.0 * s } else { 0.0 });
        let nonzero: Vec<usize> = (0..b.len()).filter(|&v| b[v] != 0.0).collect();
        assert_eq!(nonzero, vec![10, 11]);
    }

    #[test]
    fn lifting_jumps() {
        let (m, t) = line(4, 1.0, 1.0);
        assert!(build_lifting(&m, &t, &|_| 0.0).field.values.iter().all(|&x| x == 0.0));
        let w = build_lifting(&m, &t, &|_| 1.0).field;
        for e in &t.edges {
            let jump = 0.5 * (w.jump(&m, e.start) + w.jump(&m, e.end));
            assert_eq!(jump, 1.0);
        }
        let w = build_lifting(&m, &t, &|s| (2.0 * std::f64::consts::PI * s).sin()).field;
        let first = &t.edges[0];
        let mid_jump = 0.5 * (w.jump(&m, first.start) + w.jump(&m, first.end));
        assert!((mid_jump - 0.5).abs() < 1e-15);
        // zero away from the interface
        for v in 0..m.n_vertices() {
            if !m.is_interface_vertex(v) {
                assert_eq!(w.minus_value(v), 0.0);
            }
        }
    }

    #[test]
    fn zero_data_gives_zero_solution() {
        let (m, t) = line(8, 1.0, 3.0);
        let u = solve_flux_jump(&m, &t, &ProblemSpec::new(ProblemCase::FluxJump, 1.0, 3.0)).unwrap();
        assert!(u.values.iter().all(|&x| x == 0.0));
        let u = solve_solution_jump(&m, &t, &ProblemSpec::new(ProblemCase::SolutionJump, 1.0, 3.0)).unwrap();
        assert!(u.values.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn flux_jump_solution_is_continuous() {
        let (m, t) = line(8, 1.0, 3.0);
        let spec = ProblemSpec::new(ProblemCase::FluxJump, 1.0, 3.0).with_datum(|s| s.sin() + 1.0);
        let u = solve_flux_jump(&m, &t, &spec).unwrap();
        assert!((0..m.n_vertices()).all(|v| u.jump(&m, v) == 0.0));
    }

    #[test]
    fn solution_jump_with_unit_datum_obeys_maximum_principle() {
        let (m, t) = line(16, 2.0, 2.0);
        let spec = ProblemSpec::new(ProblemCase::SolutionJump, 2.0, 2.0).with_datum(|_| 1.0);
        let u = solve_solution_jump(&m, &t, &spec).unwrap();
        for v in 0..m.n_vertices() {
            if m.is_interface_vertex(v) {
                assert_eq!(u.jump(&m, v), 1.0);
            }
        }
        // Each side is discrete harmonic with data 0 on the outer boundary and
        // its interface trace; the unit jump splits as u⁻ ∈ [-1, 0], u⁺ ∈ [0, 1].
        for k in 0..m.n_triangles() {
            let range = match m.label(k) {
                Side::Minus => -1.0 - 1e-12..=1e-12,
                Side::Plus => -1e-12..=1.0 + 1e-12,
            };
            for x in u.element_values(&m, k) {
                assert!(range.contains(&x), "{x} on {:?}", m.label(k));
            }
        }
    }

    #[test]
    fn wrong_case_or_coefficients_rejected() {
        let (m, t) = line(4, 1.0, 2.0);
        let spec = ProblemSpec::new(ProblemCase::SolutionJump, 1.0, 2.0);
        assert!(matches!(solve_flux_jump(&m, &t, &spec), Err(Error::Config(_))));
        let spec = ProblemSpec::new(ProblemCase::FluxJump, 1.0, 3.0);
        assert!(matches!(solve_flux_jump(&m, &t, &spec), Err(Error::Config(_))));
    }

    #[test]
    fn h1_norm_of_linear_field() {
        let (m, _) = line(4, 1.0, 1.0);
        // u = x: ∫|∇u|² = 1, ∫u² = 1/3
        let vals: Vec<f64> = (0..m.n_broken_dofs()).map(|d| m.vertices()[m.dof_vertex(d)][0]).collect();
        assert!((broken_h1_norm(&m, &vals) - (1.0f64 + 1.0 / 3.0).sqrt()).abs() < 1e-14);
    }
}
