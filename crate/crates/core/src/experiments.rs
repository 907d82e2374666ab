//! Experiment definitions: cases, default resolutions, tables, sweeps, the
//! manufactured convergence study, and CSV output.

use std::f64::consts::PI;
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fem::{BrokenSolution, ProblemCase, ProblemSpec, TransmissionSolver};
use crate::flux::{hdiv_error, recover_flux};
use crate::mesh::{
    build_line_mesh, build_mapped_mesh, extract_interface, star_radius, FittedMesh, InterfaceTrace,
    MappedMeshParams, ParamKind, Point, Side, CIRCLE_RADIUS,
};
use crate::reduction::{make_basis, BasisKind, ReducedRunRecord, ReductionStudy};

pub const CSV_HEADER: &str = "m,g_rel_err,eu_rms,eu_inf,eq_rms,eq_inf,residual";

/// Diffusion coefficients of the table experiments.
pub const EXPERIMENT_BETA: (f64, f64) = (1.0, 2.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Geometry {
    Line,
    Circle,
    Star,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseId {
    LineFlux,
    LineSol,
    CircleFlux,
    CircleSol,
    StarFlux,
}

impl CaseId {
    pub const ALL: [CaseId; 5] = [
        CaseId::LineFlux,
        CaseId::LineSol,
        CaseId::CircleFlux,
        CaseId::CircleSol,
        CaseId::StarFlux,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CaseId::LineFlux => "line-flux",
            CaseId::LineSol => "line-sol",
            CaseId::CircleFlux => "circle-flux",
            CaseId::CircleSol => "circle-sol",
            CaseId::StarFlux => "star-flux",
        }
    }

    pub fn geometry(self) -> Geometry {
        match self {
            CaseId::LineFlux | CaseId::LineSol => Geometry::Line,
            CaseId::CircleFlux | CaseId::CircleSol => Geometry::Circle,
            CaseId::StarFlux => Geometry::Star,
        }
    }

    pub fn problem(self) -> ProblemCase {
        match self {
            CaseId::LineFlux | CaseId::CircleFlux | CaseId::StarFlux => ProblemCase::FluxJump,
            CaseId::LineSol | CaseId::CircleSol => ProblemCase::SolutionJump,
        }
    }

    pub fn default_basis(self) -> BasisKind {
        match self.geometry() {
            Geometry::Line => BasisKind::AdaptedLine,
            _ => BasisKind::Fourier,
        }
    }

    /// Bases used with this geometry in the reference experiments.
    pub fn standard_bases(self) -> &'static [BasisKind] {
        match self.geometry() {
            Geometry::Line => &[BasisKind::AdaptedLine, BasisKind::Poly],
            _ => &[BasisKind::Fourier],
        }
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CaseId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CaseId::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown case '{s}' (line-flux, line-sol, circle-flux, circle-sol, star-flux)"
                ))
            })
    }
}

/// `sin 2πx + 0.35 cos 5πx + 0.2 (2x - 1)²`.
pub fn line_datum(x: f64) -> f64 {
    (2.0 * PI * x).sin() + 0.35 * (5.0 * PI * x).cos() + 0.2 * (2.0 * x - 1.0).powi(2)
}

/// `sin 2θ + 0.35 cos 5θ + 0.2 cos θ`.
pub fn curved_datum(theta: f64) -> f64 {
    (2.0 * theta).sin() + 0.35 * (5.0 * theta).cos() + 0.2 * theta.cos()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resolution {
    /// Cells per side of the line mesh.
    pub n: usize,
    pub mapped: MappedMeshParams,
}

impl Default for Resolution {
    fn default() -> Self {
        Resolution { n: 64, mapped: MappedMeshParams::default() }
    }
}

impl Resolution {
    /// One uniform refinement.
    pub fn refined(self) -> Self {
        Resolution {
            n: 2 * self.n,
            mapped: MappedMeshParams {
                n_theta: 2 * self.mapped.n_theta,
                n_radial_in: 2 * self.mapped.n_radial_in,
                n_radial_out: 2 * self.mapped.n_radial_out,
                ..self.mapped
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub case: CaseId,
    pub basis: BasisKind,
    pub ms: Vec<usize>,
    pub resolution: Resolution,
    /// Gauss points per interface edge.
    pub quad_order: usize,
    pub seed: u64,
    /// Constant source `f` on both sides.
    pub source: f64,
    /// Permit case/basis pairs outside the reference experiments.
    pub allow_extra: bool,
}

impl RunConfig {
    pub fn new(case: CaseId) -> Self {
        RunConfig {
            case,
            basis: case.default_basis(),
            ms: vec![1, 2, 3],
            resolution: Resolution::default(),
            quad_order: 10,
            seed: 0,
            source: 0.0,
            allow_extra: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.allow_extra && !self.case.standard_bases().contains(&self.basis) {
            return Err(Error::Config(format!(
                "basis '{}' is not used with case '{}'; pass --allow-extra to run it anyway",
                self.basis, self.case
            )));
        }
        if self.ms.is_empty() || self.ms.contains(&0) {
            return Err(Error::Config("ranks must be positive and nonempty".into()));
        }
        if !self.source.is_finite() {
            return Err(Error::Config("source must be finite".into()));
        }
        if self.quad_order == 0 {
            return Err(Error::Config("quadrature order must be at least 1".into()));
        }
        Ok(())
    }

    /// The `# mesh …` comment line that heads every table.
    pub fn mesh_comment(&self) -> String {
        let r = &self.resolution;
        let mesh = match self.case.geometry() {
            Geometry::Line => format!("n={}", r.n),
            _ => format!(
                "n={} n_radial_in={} n_radial_out={} half_width={}",
                r.mapped.n_theta, r.mapped.n_radial_in, r.mapped.n_radial_out, r.mapped.half_width
            ),
        };
        format!(
            "# mesh {mesh} case={} basis={} quad_order={} beta_minus={} beta_plus={} f={}",
            self.case, self.basis, self.quad_order, EXPERIMENT_BETA.0, EXPERIMENT_BETA.1, self.source
        )
    }
}

/// Mesh, trace and problem of one experiment.
pub struct Experiment {
    pub config: RunConfig,
    pub mesh: FittedMesh,
    pub trace: InterfaceTrace,
    pub spec: ProblemSpec,
}

impl Experiment {
    pub fn build(config: &RunConfig) -> Result<Self> {
        config.validate()?;
        let (bm, bp) = EXPERIMENT_BETA;
        let case = config.case;
        let (mesh, kind) = match case.geometry() {
            Geometry::Line => (build_line_mesh(config.resolution.n, bm, bp)?, ParamKind::LineX),
            Geometry::Circle => (
                build_mapped_mesh(&|_| CIRCLE_RADIUS, config.resolution.mapped, bm, bp)?,
                ParamKind::Angle,
            ),
            Geometry::Star => (build_mapped_mesh(&star_radius, config.resolution.mapped, bm, bp)?, ParamKind::Angle),
        };
        let trace = extract_interface(&mesh, kind, config.quad_order)?;
        let f = config.source;
        let spec = ProblemSpec::new(case.problem(), bm, bp).with_source(move |_, _| f);
        let spec = match case.geometry() {
            Geometry::Line => spec.with_datum(line_datum),
            _ => spec.with_datum(curved_datum),
        };
        Ok(Experiment { config: config.clone(), mesh, trace, spec })
    }

    pub fn study(&self) -> Result<ReductionStudy<'_>> {
        ReductionStudy::new(&self.mesh, &self.trace, self.spec.clone())
    }

    pub fn records(&self) -> Result<Vec<ReducedRunRecord>> {
        let study = self.study()?;
        self.config
            .ms
            .iter()
            .map(|&m| study.run(&make_basis(self.config.basis, m)?))
            .collect()
    }
}

pub fn run_records(config: &RunConfig) -> Result<Vec<ReducedRunRecord>> {
    Experiment::build(config)?.records()
}

/// Configuration reproducing table `id` (1 to 5).
pub fn table_config(id: usize) -> Result<RunConfig> {
    let (case, basis, ms): (CaseId, BasisKind, &[usize]) = match id {
        1 => (CaseId::LineFlux, BasisKind::AdaptedLine, &[1, 2, 3]),
        2 => (CaseId::LineSol, BasisKind::Poly, &[1, 4, 8]),
        3 => (CaseId::LineSol, BasisKind::AdaptedLine, &[1, 2, 3]),
        4 => (CaseId::CircleFlux, BasisKind::Fourier, &[1, 5, 10]),
        5 => (CaseId::StarFlux, BasisKind::Fourier, &[1, 3, 5, 8, 10]),
        _ => return Err(Error::Config(format!("table id must be 1..5, got {id}"))),
    };
    Ok(RunConfig { basis, ms: ms.to_vec(), ..RunConfig::new(case) })
}

pub fn sweep_config(case: CaseId, basis: BasisKind, m_max: usize) -> Result<RunConfig> {
    if m_max == 0 {
        return Err(Error::Config("m_max must be at least 1".into()));
    }
    Ok(RunConfig { basis, ms: (1..=m_max).collect(), ..RunConfig::new(case) })
}

/// Scientific notation with four significant digits and at least two exponent digits.
pub fn format_sci(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{x:.3e}");
    let (mantissa, exponent) = s.split_once('e').expect("exponent");
    let (sign, digits) = match exponent.strip_prefix('-') {
        Some(d) => ('-', d),
        None => ('+', exponent),
    };
    format!("{mantissa}e{sign}{digits:0>2}")
}

pub fn write_records<W: Write>(out: &mut W, comment: &str, records: &[ReducedRunRecord]) -> io::Result<()> {
    writeln!(out, "{comment}")?;
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.m,
            format_sci(r.g_rel_err),
            format_sci(r.eu_rms),
            format_sci(r.eu_inf),
            format_sci(r.eq_rms),
            format_sci(r.eq_inf),
            format_sci(r.residual)
        )?;
    }
    Ok(())
}

/// Manufactured line-interface solution with continuous value and flux at `y = 1/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Manufactured {
    pub beta_minus: f64,
    pub beta_plus: f64,
}

impl Default for Manufactured {
    fn default() -> Self {
        Manufactured { beta_minus: 1.0, beta_plus: 5.0 }
    }
}

impl Manufactured {
    fn ratio(&self) -> f64 {
        self.beta_minus / self.beta_plus
    }

    /// `y` below the interface, `r y + (1 - r)/2` above it, `r = β⁻/β⁺`.
    fn profile(&self, y: f64, side: Side) -> (f64, f64) {
        match side {
            Side::Minus => (y, 1.0),
            Side::Plus => (self.ratio() * y + 0.5 * (1.0 - self.ratio()), self.ratio()),
        }
    }

    fn beta(&self, side: Side) -> f64 {
        match side {
            Side::Minus => self.beta_minus,
            Side::Plus => self.beta_plus,
        }
    }

    pub fn u(&self, p: Point, side: Side) -> f64 {
        (PI * p[0]).sin() * self.profile(p[1], side).0
    }

    pub fn flux(&self, p: Point, side: Side) -> [f64; 2] {
        let (v, dv) = self.profile(p[1], side);
        let b = self.beta(side);
        [-b * PI * (PI * p[0]).cos() * v, -b * (PI * p[0]).sin() * dv]
    }

    pub fn source(&self, p: Point, side: Side) -> f64 {
        self.beta(side) * PI * PI * (PI * p[0]).sin() * self.profile(p[1], side).0
    }

    pub fn spec(&self) -> ProblemSpec {
        let me = *self;
        ProblemSpec::new(ProblemCase::FluxJump, self.beta_minus, self.beta_plus)
            .with_source(move |p, s| me.source(p, s))
            .with_dirichlet(move |p, s| me.u(p, s))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub h: f64,
    pub l2_error: f64,
    pub hdiv_error: f64,
    pub l2_order: Option<f64>,
    pub hdiv_order: Option<f64>,
}

pub const CONVERGENCE_HEADER: &str = "n,h,l2_error,hdiv_error,l2_order,hdiv_order";

/// Lumped nodal `L²` error `(Σ_K |K|/3 Σ_i e(x_i)²)^{1/2}` with sided exact values.
pub fn nodal_l2_error(mesh: &FittedMesh, u: &BrokenSolution, exact: &dyn Fn(Point, Side) -> f64) -> f64 {
    let mut total = 0.0;
    for k in 0..mesh.n_triangles() {
        let side = mesh.label(k);
        let vals = u.element_values(mesh, k);
        let e2: f64 = mesh
            .corners(k)
            .iter()
            .zip(vals)
            .map(|(p, v)| (v - exact(*p, side)).powi(2))
            .sum();
        total += mesh.area(k) / 3.0 * e2;
    }
    total.sqrt()
}

pub fn convergence_study(problem: Manufactured, ns: &[usize]) -> Result<Vec<ConvergenceRow>> {
    let spec = problem.spec();
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(ns.len());
    for &n in ns {
        let mesh = build_line_mesh(n, problem.beta_minus, problem.beta_plus)?;
        let trace = extract_interface(&mesh, ParamKind::LineX, 2)?;
        let u = TransmissionSolver::new(&mesh, &trace)?.solve(&spec)?;
        let q = recover_flux(&mesh, &trace, &u, &spec)?;
        let l2_error = nodal_l2_error(&mesh, &u, &|p, s| problem.u(p, s));
        let hdiv = hdiv_error(&q, &mesh, &|p, s| problem.flux(p, s), &|p, s| problem.source(p, s));
        let h = 1.0 / n as f64;
        let order = |prev: f64, cur: f64, h_prev: f64| (prev / cur).ln() / (h_prev / h).ln();
        let (l2_order, hdiv_order) = match rows.last() {
            Some(p) => (Some(order(p.l2_error, l2_error, p.h)), Some(order(p.hdiv_error, hdiv, p.h))),
            None => (None, None),
        };
        rows.push(ConvergenceRow { n, h, l2_error, hdiv_error: hdiv, l2_order, hdiv_order });
    }
    Ok(rows)
}

pub fn write_convergence<W: Write>(out: &mut W, problem: &Manufactured, rows: &[ConvergenceRow]) -> io::Result<()> {
    writeln!(out, "# manufactured line interface beta_minus={} beta_plus={}", problem.beta_minus, problem.beta_plus)?;
    writeln!(out, "{CONVERGENCE_HEADER}")?;
    let opt = |o: Option<f64>| o.map(format_sci).unwrap_or_default();
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.n,
            format_sci(r.h),
            format_sci(r.l2_error),
            format_sci(r.hdiv_error),
            opt(r.l2_order),
            opt(r.hdiv_order)
        )?;
    }
    Ok(())
}
