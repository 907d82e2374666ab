//! Reduced interface bases, projection of interface data, and reduced solves.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fem::{BrokenSolution, InterfaceFn, ProblemSpec, TransmissionSolver};
use crate::flux::{interface_residual, recover_flux, RecoveredFlux};
use crate::linalg::{householder_least_squares, DenseMatrix};
use crate::mesh::{FittedMesh, InterfaceTrace};

/// Largest accepted Gram condition estimate in a projection.
pub const MAX_GRAM_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisKind {
    /// `1, s, s², …` with `s = 2x - 1`.
    Poly,
    /// `1, cos θ, sin θ, cos 2θ, sin 2θ, …`.
    Fourier,
    /// `sin 2πx, cos 5πx, (2x-1)², 1, cos 2πx, sin 5πx`, then `s, s³, s⁴, …`.
    AdaptedLine,
}

impl BasisKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BasisKind::Poly => "poly",
            BasisKind::Fourier => "fourier",
            BasisKind::AdaptedLine => "adapted",
        }
    }
}

impl fmt::Display for BasisKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BasisKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "poly" => Ok(BasisKind::Poly),
            "fourier" => Ok(BasisKind::Fourier),
            "adapted" | "adapted-line" | "adapted_line" => Ok(BasisKind::AdaptedLine),
            other => Err(Error::Config(format!("unknown basis kind '{other}' (poly, fourier, adapted)"))),
        }
    }
}

/// First `m` functions of a fixed ordered family, as functions of the interface parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InterfaceBasis {
    pub kind: BasisKind,
    pub m: usize,
}

impl InterfaceBasis {
    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    /// `ψ_j(t)` for `j` in `0..m` (zero-based).
    pub fn eval(&self, j: usize, t: f64) -> f64 {
        debug_assert!(j < self.m);
        match self.kind {
            BasisKind::Poly => (2.0 * t - 1.0).powi(j as i32),
            BasisKind::Fourier => {
                if j == 0 {
                    1.0
                } else {
                    let k = j.div_ceil(2) as f64;
                    if j % 2 == 1 {
                        (k * t).cos()
                    } else {
                        (k * t).sin()
                    }
                }
            }
            BasisKind::AdaptedLine => {
                let s = 2.0 * t - 1.0;
                match j {
                    0 => (2.0 * PI * t).sin(),
                    1 => (5.0 * PI * t).cos(),
                    2 => s * s,
                    3 => 1.0,
                    4 => (2.0 * PI * t).cos(),
                    5 => (5.0 * PI * t).sin(),
                    6 => s,
                    _ => s.powi(j as i32 - 4),
                }
            }
        }
    }

    pub fn values(&self, t: f64) -> Vec<f64> {
        (0..self.m).map(|j| self.eval(j, t)).collect()
    }
}

pub fn make_basis(kind: BasisKind, m: usize) -> Result<InterfaceBasis> {
    if m == 0 {
        return Err(Error::Config("basis size m must be at least 1".into()));
    }
    Ok(InterfaceBasis { kind, m })
}

/// Discrete `L²(Γ)` norm with the trace's per-edge Gauss rule and arc-length weights.
pub fn interface_l2_norm(g: &dyn Fn(f64) -> f64, trace: &InterfaceTrace) -> f64 {
    trace
        .quad_points()
        .map(|q| q.weight * g(q.param).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Result of projecting interface data onto a reduced basis.
#[derive(Debug, Clone)]
pub struct Projection {
    pub basis: InterfaceBasis,
    pub coefficients: Vec<f64>,
    pub g_norm: f64,
    pub error_norm: f64,
    /// `‖g - g_m‖ / ‖g‖`, zero when `g` vanishes on the trace.
    pub rel_error: f64,
    pub condition_estimate: f64,
}

impl Projection {
    pub fn eval(&self, t: f64) -> f64 {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(j, c)| c * self.basis.eval(j, t))
            .sum()
    }

    /// `g_m` as an owned callable.
    pub fn to_fn(&self) -> InterfaceFn {
        let p = self.clone();
        Arc::new(move |t| p.eval(t))
    }
}

/// Least-squares projection of `g` onto the span of `basis` in the discrete
/// `L²(Γ)` inner product, through a QR factorization of the weighted samples.
pub fn project_interface_data(
    g: &dyn Fn(f64) -> f64,
    basis: &InterfaceBasis,
    trace: &InterfaceTrace,
) -> Result<Projection> {
    let points: Vec<_> = trace.quad_points().collect();
    if points.len() < basis.len() {
        return Err(Error::Config(format!(
            "{} trace quadrature points cannot determine {} coefficients",
            points.len(),
            basis.len()
        )));
    }
    let mut a = DenseMatrix::zeros(points.len(), basis.len());
    let mut b = Vec::with_capacity(points.len());
    for (i, q) in points.iter().enumerate() {
        let sw = q.weight.sqrt();
        for j in 0..basis.len() {
            a.set(i, j, sw * basis.eval(j, q.param));
        }
        b.push(sw * g(q.param));
    }
    let ls = householder_least_squares(&a, &b);
    let condition = ls.gram_condition_estimate();
    if !(condition <= MAX_GRAM_CONDITION) {
        return Err(Error::IllConditionedBasis { condition });
    }
    let mut projection = Projection {
        basis: *basis,
        coefficients: ls.solution,
        g_norm: 0.0,
        error_norm: 0.0,
        rel_error: 0.0,
        condition_estimate: condition,
    };
    let (mut g2, mut e2) = (0.0, 0.0);
    for q in &points {
        let gv = g(q.param);
        g2 += q.weight * gv * gv;
        e2 += q.weight * (gv - projection.eval(q.param)).powi(2);
    }
    projection.g_norm = g2.sqrt();
    projection.error_norm = e2.sqrt();
    projection.rel_error = if g2 > 0.0 { (e2 / g2).sqrt() } else { 0.0 };
    Ok(projection)
}

/// Error columns of one reduced run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedRunRecord {
    pub m: usize,
    pub g_rel_err: f64,
    pub eu_rms: f64,
    pub eu_inf: f64,
    pub eq_rms: f64,
    pub eq_inf: f64,
    pub residual: f64,
}

/// Reference solve with exact data, kept for any number of reduced solves on the same mesh.
pub struct ReductionStudy<'a> {
    solver: TransmissionSolver<'a>,
    spec: ProblemSpec,
    reference: BrokenSolution,
    reference_flux: RecoveredFlux,
}

impl<'a> ReductionStudy<'a> {
    pub fn new(mesh: &'a FittedMesh, trace: &'a InterfaceTrace, spec: ProblemSpec) -> Result<Self> {
        let solver = TransmissionSolver::new(mesh, trace)?;
        let reference = solver.solve(&spec)?;
        let reference_flux = recover_flux(mesh, trace, &reference, &spec)?;
        Ok(ReductionStudy { solver, spec, reference, reference_flux })
    }

    pub fn mesh(&self) -> &FittedMesh {
        self.solver.mesh()
    }

    pub fn trace(&self) -> &InterfaceTrace {
        self.solver.trace()
    }

    pub fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    pub fn reference(&self) -> &BrokenSolution {
        &self.reference
    }

    pub fn reference_flux(&self) -> &RecoveredFlux {
        &self.reference_flux
    }

    /// Max interface residual of the reference flux against the exact data.
    pub fn reference_residual(&self) -> f64 {
        interface_residual(&self.reference_flux, self.trace(), &self.spec).0
    }

    pub fn project(&self, basis: &InterfaceBasis) -> Result<Projection> {
        project_interface_data(&*self.spec.datum, basis, self.trace())
    }

    /// Reduced solve with `g_m` and its full set of outputs.
    pub fn solve_reduced(&self, basis: &InterfaceBasis) -> Result<ReducedSolution> {
        let projection = self.project(basis)?;
        let spec = self.spec.clone().with_datum_fn(projection.to_fn());
        let u = self.solver.solve(&spec)?;
        let flux = recover_flux(self.mesh(), self.trace(), &u, &spec)?;
        Ok(ReducedSolution { projection, spec, solution: u, flux })
    }

    pub fn run(&self, basis: &InterfaceBasis) -> Result<ReducedRunRecord> {
        let reduced = self.solve_reduced(basis)?;
        let (eu_rms, eu_inf) = rms_and_max(
            self.reference
                .values
                .iter()
                .zip(&reduced.solution.values)
                .map(|(a, b)| (a - b).abs()),
        );
        let (eq_rms, eq_inf) = rms_and_max(
            self.reference_flux
                .elements
                .iter()
                .zip(&reduced.flux.elements)
                .map(|(a, b)| (a.a[0] - b.a[0]).hypot(a.a[1] - b.a[1])),
        );
        let residual = interface_residual(&reduced.flux, self.trace(), &reduced.spec).0;
        Ok(ReducedRunRecord {
            m: basis.m,
            g_rel_err: reduced.projection.rel_error,
            eu_rms,
            eu_inf,
            eq_rms,
            eq_inf,
            residual,
        })
    }
}

#[derive(Clone)]
pub struct ReducedSolution {
    pub projection: Projection,
    pub spec: ProblemSpec,
    pub solution: BrokenSolution,
    pub flux: RecoveredFlux,
}

fn rms_and_max(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut n, mut sum, mut max) = (0usize, 0.0, 0.0f64);
    for v in values {
        n += 1;
        sum += v * v;
        max = max.max(v);
    }
    if n == 0 {
        (0.0, 0.0)
    } else {
        ((sum / n as f64).sqrt(), max)
    }
}

/// One-shot reduced solve; use [`ReductionStudy`] to reuse the factorization across `m`.
pub fn reduced_solve(
    mesh: &FittedMesh,
    trace: &InterfaceTrace,
    spec: &ProblemSpec,
    kind: BasisKind,
    m: usize,
) -> Result<ReducedRunRecord> {
    let basis = make_basis(kind, m)?;
    ReductionStudy::new(mesh, trace, spec.clone())?.run(&basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::ProblemCase;
    use crate::mesh::{build_line_mesh, build_mapped_mesh, extract_interface, MappedMeshParams, ParamKind};
    use proptest::prelude::*;
    use std::f64::consts::TAU;

    fn line_trace(n: usize) -> (FittedMesh, InterfaceTrace) {
        let m = build_line_mesh(n, 1.0, 2.0).unwrap();
        let t = extract_interface(&m, ParamKind::LineX, 10).unwrap();
        (m, t)
    }

    fn circle_trace(n_theta: usize) -> InterfaceTrace {
        let layers = n_theta / 8;
        let params = MappedMeshParams { n_theta, n_radial_in: layers, n_radial_out: layers, half_width: 1.0 };
        let m = build_mapped_mesh(&|_| 0.5, params, 1.0, 2.0).unwrap();
        extract_interface(&m, ParamKind::Angle, 10).unwrap()
    }

    #[test]
    fn basis_orderings() {
        let t = 0.3;
        let p = make_basis(BasisKind::Poly, 3).unwrap().values(t);
        let s = 2.0 * t - 1.0;
        assert_eq!(p, vec![1.0, s, s * s]);
        let f = make_basis(BasisKind::Fourier, 5).unwrap().values(t);
        assert_eq!(f, vec![1.0, t.cos(), t.sin(), (2.0 * t).cos(), (2.0 * t).sin()]);
        let a = make_basis(BasisKind::AdaptedLine, 3).unwrap().values(t);
        assert_eq!(a, vec![(2.0 * PI * t).sin(), (5.0 * PI * t).cos(), s * s]);
        assert!(make_basis(BasisKind::Poly, 0).is_err());
        assert!("nonsense".parse::<BasisKind>().is_err());
        assert_eq!("Fourier".parse::<BasisKind>().unwrap(), BasisKind::Fourier);
    }

    #[test]
    fn adapted_basis_functions_are_distinct() {
        let b = make_basis(BasisKind::AdaptedLine, 12).unwrap();
        let (_, tr) = line_trace(16);
        assert!(project_interface_data(&|x| x, &b, &tr).is_ok());
    }

    #[test]
    fn l2_norm_examples() {
        let (_, tr) = line_trace(16);
        assert!((interface_l2_norm(&|_| 1.0, &tr) - 1.0).abs() < 1e-14);
        let s = interface_l2_norm(&|x| (2.0 * PI * x).sin(), &tr);
        assert!((s - 0.5f64.sqrt()).abs() < 1e-12);
        let c = circle_trace(256);
        let exact = (TAU * 0.5f64).sqrt();
        let gap = (interface_l2_norm(&|_| 1.0, &c) - exact).abs();
        assert!(gap < 1e-4, "{gap}");
    }

    #[test]
    fn datum_in_span_is_recovered() {
        let (_, tr) = line_trace(16);
        let b = make_basis(BasisKind::AdaptedLine, 4).unwrap();
        let p = project_interface_data(&|x| (2.0 * PI * x).sin(), &b, &tr).unwrap();
        assert!((p.coefficients[0] - 1.0).abs() < 1e-14);
        assert!(p.coefficients[1..].iter().all(|c| c.abs() < 1e-14));
        assert!(p.rel_error <= 1e-14);
    }

    #[test]
    fn zero_datum() {
        let (m, tr) = line_trace(8);
        let b = make_basis(BasisKind::Poly, 2).unwrap();
        let p = project_interface_data(&|_| 0.0, &b, &tr).unwrap();
        assert_eq!(p.rel_error, 0.0);
        let spec = ProblemSpec::new(ProblemCase::FluxJump, 1.0, 2.0).with_source(|_, _| 1.0);
        let r = reduced_solve(&m, &tr, &spec, BasisKind::Poly, 2).unwrap();
        assert_eq!((r.eu_rms, r.eu_inf, r.eq_rms, r.eq_inf), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn high_order_monomials_are_rejected() {
        let (_, tr) = line_trace(64);
        let b = make_basis(BasisKind::Poly, 30).unwrap();
        assert!(matches!(
            project_interface_data(&|x| x, &b, &tr),
            Err(Error::IllConditionedBasis { .. })
        ));
    }

    #[test]
    fn exact_data_collapses_errors() {
        let (m, tr) = line_trace(16);
        let spec = ProblemSpec::new(ProblemCase::SolutionJump, 1.0, 2.0)
            .with_source(|_, _| 1.0)
            .with_datum(|x| (2.0 * PI * x).sin() - 0.5 * (5.0 * PI * x).cos());
        let study = ReductionStudy::new(&m, &tr, spec).unwrap();
        let r = study.run(&make_basis(BasisKind::AdaptedLine, 2).unwrap()).unwrap();
        assert!(r.g_rel_err < 1e-14);
        assert!(r.eu_inf < 1e-12 && r.eq_inf < 1e-11 && r.residual < 1e-13, "{r:?}");
        let r1 = study.run(&make_basis(BasisKind::AdaptedLine, 1).unwrap()).unwrap();
        assert!(r1.eu_rms > 1e-3);
    }

    fn line_datum(c: [f64; 4]) -> impl Fn(f64) -> f64 {
        move |x: f64| c[0] * (3.0 * x).sin() + c[1] * x.exp() + c[2] * (7.0 * x).cos() + c[3]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn projection_is_idempotent(c in prop::array::uniform4(-2.0f64..2.0), m in 1usize..8) {
            let (_, tr) = line_trace(16);
            let b = make_basis(BasisKind::Poly, m).unwrap();
            let p = project_interface_data(&line_datum(c), &b, &tr).unwrap();
            let again = project_interface_data(&|t| p.eval(t), &b, &tr).unwrap();
            let scale = p.coefficients.iter().fold(1.0f64, |s, v| s.max(v.abs()));
            for (a, b) in p.coefficients.iter().zip(&again.coefficients) {
                prop_assert!((a - b).abs() <= 1e-13 * scale, "{} vs {}", a, b);
            }
        }

        #[test]
        fn projection_satisfies_pythagoras(c in prop::array::uniform4(-2.0f64..2.0), m in 1usize..10) {
            let tr = circle_trace(64);
            let b = make_basis(BasisKind::Fourier, m).unwrap();
            let g = line_datum(c);
            let p = project_interface_data(&g, &b, &tr).unwrap();
            let gm = interface_l2_norm(&|t| p.eval(t), &tr);
            let lhs = p.g_norm * p.g_norm;
            let rhs = gm * gm + p.error_norm * p.error_norm;
            prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.max(1e-300));
        }

        #[test]
        fn projection_error_is_monotone(c in prop::array::uniform4(-2.0f64..2.0)) {
            let (_, tr) = line_trace(16);
            for kind in [BasisKind::Poly, BasisKind::AdaptedLine] {
                let mut last = f64::INFINITY;
                for m in 1..=12 {
                    let p = project_interface_data(&line_datum(c), &make_basis(kind, m).unwrap(), &tr).unwrap();
                    prop_assert!(p.error_norm <= last * (1.0 + 1e-12) + 1e-15);
                    last = p.error_norm;
                }
            }
        }
    }
}
