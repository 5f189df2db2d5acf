//! CSV and plain-text reports.
//!
//! Floats are written with `Display`, which prints the shortest string that
//! parses back to the same `f64`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use axivem::element::ElementKernels;
use axivem::material::{StrainComponent, Stress};
use axivem::mesh::PolyMesh;
use axivem::verify::{ConvergenceStudy, PatchOutcome};
use axivem::Strain;
use nalgebra::{DMatrix, DVector};

use crate::CliError;

fn writer(path: &Path) -> Result<csv::Writer<fs::File>, CliError> {
    csv::Writer::from_path(path).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))
}

fn finish(mut w: csv::Writer<fs::File>, path: &Path) -> Result<(), CliError> {
    w.flush()
        .map_err(|e| CliError::Output(format!("{}: {e}", path.display())))
}

fn record<W: std::io::Write>(w: &mut csv::Writer<W>, fields: &[String]) -> Result<(), CliError> {
    w.write_record(fields).map_err(|e| CliError::Output(e.to_string()))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))
}

/// `component,computed,expected,abs_error,field_average,published`
pub fn write_patch_csv(path: &Path, outcome: &PatchOutcome) -> Result<(), CliError> {
    let mut w = writer(path)?;
    record(
        &mut w,
        &[
            "component",
            "computed",
            "expected",
            "abs_error",
            "field_average",
            "published",
        ]
        .map(String::from),
    )?;
    for row in &outcome.rows {
        record(
            &mut w,
            &[
                row.component.symbol().to_string(),
                row.computed.to_string(),
                row.expected.to_string(),
                row.abs_error.to_string(),
                row.field_average.to_string(),
                row.published.to_string(),
            ],
        )?;
    }
    finish(w, path)
}

/// `element,eps_r,eps_z,gamma_rz,eps_theta,sigma_r,sigma_z,tau_rz,sigma_theta`
pub fn write_elements_csv(path: &Path, strains: &[Strain], stresses: &[Stress]) -> Result<(), CliError> {
    let mut w = writer(path)?;
    record(
        &mut w,
        &[
            "element",
            "eps_r",
            "eps_z",
            "gamma_rz",
            "eps_theta",
            "sigma_r",
            "sigma_z",
            "tau_rz",
            "sigma_theta",
        ]
        .map(String::from),
    )?;
    for (e, (eps, sig)) in strains.iter().zip(stresses).enumerate() {
        let mut fields = vec![e.to_string()];
        fields.extend(eps.iter().chain(sig.iter()).map(f64::to_string));
        record(&mut w, &fields)?;
    }
    finish(w, path)
}

/// `node,r,z,u_r,u_z`
pub fn write_nodes_csv(path: &Path, mesh: &PolyMesh, d: &DVector<f64>) -> Result<(), CliError> {
    let mut w = writer(path)?;
    record(&mut w, &["node", "r", "z", "u_r", "u_z"].map(String::from))?;
    for (i, v) in mesh.vertices().iter().enumerate() {
        record(
            &mut w,
            &[
                i.to_string(),
                v.r.to_string(),
                v.z.to_string(),
                d[2 * i].to_string(),
                d[2 * i + 1].to_string(),
            ],
        )?;
    }
    finish(w, path)
}

/// `node,f_r,f_z`
pub fn write_loads_csv(path: &Path, f: &DVector<f64>) -> Result<(), CliError> {
    let mut w = writer(path)?;
    record(&mut w, &["node", "f_r", "f_z"].map(String::from))?;
    for i in 0..f.len() / 2 {
        record(&mut w, &[i.to_string(), f[2 * i].to_string(), f[2 * i + 1].to_string()])?;
    }
    finish(w, path)
}

/// `divisions,h,dofs,error`
pub fn write_convergence_csv(path: &Path, study: &ConvergenceStudy) -> Result<(), CliError> {
    let mut w = writer(path)?;
    record(&mut w, &["divisions", "h", "dofs", "error"].map(String::from))?;
    for l in &study.levels {
        record(
            &mut w,
            &[
                l.divisions.to_string(),
                l.h.to_string(),
                l.dofs.to_string(),
                l.error.to_string(),
            ],
        )?;
    }
    finish(w, path)
}

/// Table in the layout of the published patch-test tables, followed by the
/// hard checks and the comparisons against published values.
pub fn patch_table(outcome: &PatchOutcome, header: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{}", outcome.case.title());
    let _ = writeln!(s, "{header}");
    let _ = writeln!(
        s,
        "{:<26} {:>16} {:>15} {:>15} {:>15} {:>11}",
        "Strain component", "Computed avg", "Expected", "Abs. error", "Field avg", "Published"
    );
    for row in &outcome.rows {
        let label = format!("{} ({})", row.component.symbol(), row.component.description());
        let _ = writeln!(
            s,
            "{:<26} {:>16.6} {:>15.6} {:>15.2e} {:>15.6} {:>11.6}",
            label, row.computed, row.expected, row.abs_error, row.field_average, row.published
        );
    }
    let _ = writeln!(s, "max |d - u| at nodes: {:.3e}", outcome.displacement_error);
    let spread: Vec<String> = StrainComponent::ALL
        .iter()
        .map(|c| format!("{} {:.2e}", c.symbol(), outcome.element_spread[c.index()]))
        .collect();
    let _ = writeln!(s, "per-element spread: {}", spread.join(", "));
    for c in &outcome.checks {
        let _ = writeln!(
            s,
            "  [{}] {}: {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    for c in &outcome.comparisons {
        let tag = if c.passed { "MATCH" } else { "DEVIATION" };
        let _ = writeln!(s, "  [{tag}] {}: {} (reported, not enforced)", c.name, c.detail);
    }
    s
}

pub fn convergence_table(study: &ConvergenceStudy) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "Convergence study: {}", study.solution);
    let _ = writeln!(
        s,
        "{:>10} {:>12} {:>8} {:>24}",
        "divisions", "h", "dofs", "strain error"
    );
    for l in &study.levels {
        let _ = writeln!(s, "{:>10} {:>12.6} {:>8} {:>24.16e}", l.divisions, l.h, l.dofs, l.error);
    }
    let _ = writeln!(s, "fitted rate: {}", study.rate_label());
    let _ = writeln!(s, "monotone: {}", study.is_monotone());
    s
}

fn matrix_block(s: &mut String, name: &str, m: &DMatrix<f64>) {
    let _ = writeln!(s, "{name} ({}x{})", m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        let row: Vec<String> = m.row(i).iter().map(f64::to_string).collect();
        let _ = writeln!(s, "  {}", row.join(" "));
    }
}

pub fn element_dump(element: usize, kernels: &ElementKernels) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "element {element}");
    let _ = writeln!(s, "weighted volume {}", kernels.weighted_volume);
    let _ = writeln!(s, "tau {}", kernels.tau);
    matrix_block(&mut s, "B", &kernels.b);
    matrix_block(&mut s, "rhs", &kernels.rhs_matrix);
    matrix_block(&mut s, "P", &kernels.p);
    matrix_block(&mut s, "K_c", &kernels.k_c);
    matrix_block(&mut s, "K_s", &kernels.k_s);
    matrix_block(&mut s, "K", &kernels.k);
    s
}
