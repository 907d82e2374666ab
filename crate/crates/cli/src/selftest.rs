//! Property checks behind `ifred selftest`.

use ifred::experiments::{
    convergence_study, table_config, CaseId, Experiment, Manufactured, RunConfig,
};
use ifred::fem::source_mean;
use ifred::reduction::{make_basis, project_interface_data, BasisKind};
use ifred::Result;

use crate::stability::{stability_sample, worst_sigma_min_by_scan};
use crate::{table_csv, CONVERGENCE_MESHES, RESIDUAL_CONTRACT};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, outcome: Result<(bool, String)>) -> Check {
    match outcome {
        Ok((passed, detail)) => Check { name, passed, detail },
        Err(e) => Check { name, passed: false, detail: format!("error: {e}") },
    }
}

pub fn run_all(seed: u64) -> Vec<Check> {
    vec![
        check("projection-values", projection_values()),
        check("table-runs", table_runs()),
        check("monotone-projection", monotone_projection()),
        check("table2-strict-decay", table2_strict()),
        check("correction-stability", correction_stability(seed)),
        check("flux-convergence", flux_convergence()),
        check("determinism", determinism()),
    ]
}

fn projection_values() -> Result<(bool, String)> {
    let line = Experiment::build(&table_config(1)?)?;
    let circle = Experiment::build(&table_config(4)?)?;
    let cases: [(&Experiment, BasisKind, usize, f64); 6] = [
        (&line, BasisKind::AdaptedLine, 1, 3.602e-1),
        (&line, BasisKind::AdaptedLine, 2, 1.232e-1),
        (&line, BasisKind::AdaptedLine, 3, 0.0),
        (&circle, BasisKind::Fourier, 1, 1.0),
        (&circle, BasisKind::Fourier, 5, 3.246e-1),
        (&circle, BasisKind::Fourier, 10, 0.0),
    ];
    let mut ok = true;
    let mut worst = 0.0f64;
    for (exp, kind, m, expected) in cases {
        let p = project_interface_data(&*exp.spec.datum, &make_basis(kind, m)?, &exp.trace)?;
        let pass = if expected == 0.0 { p.rel_error <= 1e-13 } else { (p.rel_error - expected).abs() <= 1e-3 };
        ok &= pass;
        if expected != 0.0 {
            worst = worst.max((p.rel_error - expected).abs());
        }
    }
    Ok((ok, format!("max deviation {worst:.2e}")))
}

/// Residual contract, divergence identity and exact-representation collapse
/// over every table run.
fn table_runs() -> Result<(bool, String)> {
    let (mut ok, mut worst_residual, mut runs) = (true, 0.0f64, 0);
    for id in 1..=5 {
        let exp = Experiment::build(&table_config(id)?)?;
        let study = exp.study()?;
        worst_residual = worst_residual.max(study.reference_residual());
        let u_scale = study.reference().values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let q_scale = study.reference_flux().elements.iter().fold(0.0f64, |m, e| m.max(e.a[0].hypot(e.a[1])));
        for &m in &exp.config.ms {
            let basis = make_basis(exp.config.basis, m)?;
            let reduced = study.solve_reduced(&basis)?;
            let divergence_ok = reduced
                .flux
                .elements
                .iter()
                .enumerate()
                .all(|(k, e)| e.divergence() == source_mean(&exp.mesh, &*exp.spec.source, k));
            let r = study.run(&basis)?;
            worst_residual = worst_residual.max(r.residual);
            let collapse_ok = r.g_rel_err > 1e-13
                || (r.eu_rms.max(r.eu_inf) <= 1e-11 * u_scale && r.eq_rms.max(r.eq_inf) <= 1e-11 * q_scale);
            ok &= divergence_ok && collapse_ok;
            runs += 1;
        }
    }
    ok &= worst_residual <= RESIDUAL_CONTRACT;
    Ok((ok, format!("{runs} reduced runs, max interface residual {worst_residual:.2e}")))
}

fn monotone_projection() -> Result<(bool, String)> {
    let mut ok = true;
    let mut count = 0;
    for case in [CaseId::LineFlux, CaseId::CircleFlux, CaseId::StarFlux] {
        let exp = Experiment::build(&RunConfig::new(case))?;
        for &kind in case.standard_bases() {
            let mut last = f64::INFINITY;
            for m in 1..=12 {
                let p = project_interface_data(&*exp.spec.datum, &make_basis(kind, m)?, &exp.trace)?;
                ok &= p.rel_error <= last + 1e-14;
                last = p.rel_error;
                count += 1;
            }
        }
    }
    Ok((ok, format!("{count} projections")))
}

fn table2_strict() -> Result<(bool, String)> {
    let records = Experiment::build(&table_config(2)?)?.records()?;
    let ok = records.windows(2).all(|w| {
        let (a, b) = (&w[0], &w[1]);
        b.g_rel_err < a.g_rel_err && b.eu_rms < a.eu_rms && b.eu_inf < a.eu_inf && b.eq_rms < a.eq_rms && b.eq_inf < a.eq_inf
    });
    Ok((ok, format!("m = {:?}", records.iter().map(|r| r.m).collect::<Vec<_>>())))
}

fn correction_stability(seed: u64) -> Result<(bool, String)> {
    let report = stability_sample(seed, 10_000, 15.0)?;
    let floor = worst_sigma_min_by_scan(15.0, 0.5);
    let ok = report.max_bound_ratio <= 1.0 + 1e-12
        && report.min_sigma >= floor - 1e-3
        && report.max_sigma <= 1.5f64.sqrt() + 1e-12
        && report.max_scan_gap <= 1e-5;
    Ok((
        ok,
        format!(
            "seed {seed}: max |C|σ/|b| = {:.6}, σ_min in [{:.4}, {:.4}], scan floor {floor:.4}",
            report.max_bound_ratio, report.min_sigma, report.max_sigma
        ),
    ))
}

fn flux_convergence() -> Result<(bool, String)> {
    let rows = convergence_study(Manufactured::default(), &CONVERGENCE_MESHES)?;
    let hdiv = rows.iter().filter_map(|r| r.hdiv_order).fold(f64::INFINITY, f64::min);
    let l2 = rows.iter().filter_map(|r| r.l2_order).fold(f64::INFINITY, f64::min);
    Ok((hdiv >= 0.9 && l2 >= 1.8, format!("min orders: H(div) {hdiv:.3}, nodal L2 {l2:.3}")))
}

fn determinism() -> Result<(bool, String)> {
    let text = |id| table_csv(id).map_err(|e| ifred::Error::Consistency(e.message().to_string()));
    let a = text(1)?;
    let b = text(1)?;
    Ok((a == b, format!("{} bytes", a.len())))
}
