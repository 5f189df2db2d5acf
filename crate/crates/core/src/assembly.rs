//! Global assembly, displacement constraints, linear solve and strain recovery.
//!
//! Node i owns the global dofs `2i` (radial) and `2i + 1` (axial). Element
//! matrices are scattered in element order so the assembled values do not
//! depend on how the kernels were computed.

use std::collections::BTreeMap;

use nalgebra::DVector;
use nalgebra_sparse::factorization::CscCholesky;
use nalgebra_sparse::{CooMatrix, CscMatrix, CsrMatrix};
use rayon::prelude::*;

use crate::element::{local_stiffness, ElementKernels, ElementOptions};
use crate::error::{Result, VemError};
use crate::loads::{assemble_tractions, DirichletSpec, DofComponent, TractionSpec};
use crate::material::{Material, Strain, Stress};
use crate::mesh::PolyMesh;

/// Required relative residual `‖K d − f‖ / ‖f‖` of every solve.
pub const RESIDUAL_TOL: f64 = 1e-12;

const MAX_REFINEMENT_STEPS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolverKind {
    /// Sparse Cholesky factorization.
    #[default]
    Direct,
    /// Conjugate gradients with a diagonal preconditioner.
    ConjugateGradient,
}

impl SolverKind {
    pub const fn name(self) -> &'static str {
        match self {
            Self::Direct => "direct",
            Self::ConjugateGradient => "cg",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisOptions {
    pub element: ElementOptions,
    pub solver: SolverKind,
    /// Compute element kernels on the rayon pool.
    pub parallel: bool,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            element: ElementOptions::default(),
            solver: SolverKind::Direct,
            parallel: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GlobalSystem {
    pub k: CsrMatrix<f64>,
    pub f: DVector<f64>,
    prescribed: BTreeMap<usize, f64>,
}

impl GlobalSystem {
    pub fn dof_count(&self) -> usize {
        self.f.len()
    }

    /// Values imposed by [`apply_dirichlet`], keyed by global dof.
    pub fn prescribed(&self) -> &BTreeMap<usize, f64> {
        &self.prescribed
    }

    pub fn add_load(&mut self, load: &DVector<f64>) -> Result<()> {
        if load.len() != self.f.len() {
            return Err(VemError::InvalidBoundaryCondition(format!(
                "load vector has {} entries, system has {} dofs",
                load.len(),
                self.f.len()
            )));
        }
        if !self.prescribed.is_empty() {
            return Err(VemError::InvalidBoundaryCondition(
                "loads must be added before displacement constraints".into(),
            ));
        }
        self.f += load;
        Ok(())
    }

    /// `K d`.
    pub fn apply(&self, d: &DVector<f64>) -> DVector<f64> {
        &self.k * d
    }

    /// Relative residual `‖K d − f‖ / ‖f‖`, absolute when `f = 0`.
    pub fn residual(&self, d: &DVector<f64>) -> f64 {
        let r = (self.apply(d) - &self.f).norm();
        let scale = self.f.norm();
        if scale > 0.0 {
            r / scale
        } else {
            r
        }
    }
}

/// Kernels of every element, in element order.
pub fn compute_kernels(
    mesh: &PolyMesh,
    material: &Material,
    options: &ElementOptions,
    parallel: bool,
) -> Result<Vec<ElementKernels>> {
    let one = |e: usize| mesh.geometry(e).and_then(|g| local_stiffness(&g, material, options));
    if parallel {
        (0..mesh.element_count()).into_par_iter().map(one).collect()
    } else {
        (0..mesh.element_count()).map(one).collect()
    }
}

/// Scatter-adds element stiffness matrices; the load vector starts at zero.
pub fn assemble(mesh: &PolyMesh, kernels: &[ElementKernels]) -> Result<GlobalSystem> {
    if kernels.len() != mesh.element_count() {
        return Err(VemError::InvalidMesh(format!(
            "{} element kernels for {} elements",
            kernels.len(),
            mesh.element_count()
        )));
    }
    let n = mesh.dof_count();
    let mut coo = CooMatrix::new(n, n);
    // keeps every diagonal entry structurally present
    for i in 0..n {
        coo.push(i, i, 0.0);
    }
    for (e, (element, kern)) in mesh.elements().iter().zip(kernels).enumerate() {
        let dofs = element.dofs();
        if kern.k.nrows() != dofs.len() || kern.k.ncols() != dofs.len() {
            return Err(VemError::InvalidMesh(format!(
                "element {e}: {}x{} stiffness for {} dofs",
                kern.k.nrows(),
                kern.k.ncols(),
                dofs.len()
            )));
        }
        for (a, &ga) in dofs.iter().enumerate() {
            for (b, &gb) in dofs.iter().enumerate() {
                coo.push(ga, gb, kern.k[(a, b)]);
            }
        }
    }
    Ok(GlobalSystem {
        k: CsrMatrix::from(&coo),
        f: DVector::zeros(n),
        prescribed: BTreeMap::new(),
    })
}

/// Symmetric elimination of prescribed dofs.
///
/// `f ← f − K[:, j] g_j`, then row and column j are cleared with `K_jj = 1`
/// and `f_j = g_j`.
pub fn apply_dirichlet(system: &mut GlobalSystem, spec: &DirichletSpec) -> Result<()> {
    let values = spec.dof_values(system.dof_count())?;
    for (&dof, &g) in &values {
        if let Some(&old) = system.prescribed.get(&dof) {
            if old != g {
                let (node, comp) = DofComponent::from_dof(dof);
                return Err(VemError::InvalidBoundaryCondition(format!(
                    "node {node} ({}) prescribed twice: {old} and {g}",
                    comp.name()
                )));
            }
        }
    }
    for (i, j, v) in system.k.triplet_iter() {
        if let Some(&g) = values.get(&j) {
            if !values.contains_key(&i) && !system.prescribed.contains_key(&i) {
                system.f[i] -= v * g;
            }
        }
    }
    for (i, j, v) in system.k.triplet_iter_mut() {
        if values.contains_key(&i) || values.contains_key(&j) {
            *v = if i == j { 1.0 } else { 0.0 };
        }
    }
    for (&dof, &g) in &values {
        system.f[dof] = g;
        system.prescribed.insert(dof, g);
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveDiagnostics {
    pub solver: SolverKind,
    /// CG iterations, or refinement steps for the direct solver.
    pub iterations: usize,
    pub residual: f64,
}

/// Solves the constrained system to [`RESIDUAL_TOL`].
pub fn solve(system: &GlobalSystem, solver: SolverKind) -> Result<(DVector<f64>, SolveDiagnostics)> {
    let n = system.dof_count();
    if !system.prescribed.keys().any(|dof| dof % 2 == 1) {
        return Err(VemError::SingularSystem {
            dof: 1,
            node: 0,
            component: DofComponent::Axial.name(),
            pivot: 0.0,
        });
    }
    if system.f.iter().all(|&x| x == 0.0) {
        return Ok((
            DVector::zeros(n),
            SolveDiagnostics {
                solver,
                iterations: 0,
                residual: 0.0,
            },
        ));
    }
    let (d, iterations) = match solver {
        SolverKind::Direct => direct_solve(system)?,
        SolverKind::ConjugateGradient => pcg(system, 10 * n.max(10))?,
    };
    if d.iter().any(|x| !x.is_finite()) {
        return Err(VemError::NotConverged {
            iterations,
            residual: f64::NAN,
        });
    }
    let residual = system.residual(&d);
    if !(residual <= RESIDUAL_TOL) {
        return Err(VemError::NotConverged { iterations, residual });
    }
    Ok((
        d,
        SolveDiagnostics {
            solver,
            iterations,
            residual,
        },
    ))
}

fn direct_solve(system: &GlobalSystem) -> Result<(DVector<f64>, usize)> {
    let csc = CscMatrix::from(&system.k);
    let chol = CscCholesky::factor(&csc).map_err(|_| weakest_dof(system))?;
    let solve = |rhs: &DVector<f64>| -> DVector<f64> { chol.solve(rhs).column(0).into_owned() };
    let mut d = solve(&system.f);
    let mut steps = 0;
    while steps < MAX_REFINEMENT_STEPS && system.residual(&d) > 0.1 * RESIDUAL_TOL {
        let r = &system.f - system.apply(&d);
        d += solve(&r);
        steps += 1;
    }
    Ok((d, steps))
}

/// Free dof with the smallest diagonal, reported when factorization fails.
fn weakest_dof(system: &GlobalSystem) -> VemError {
    let diag: Vec<f64> = (0..system.dof_count())
        .map(|i| system.k.get_entry(i, i).map_or(0.0, |e| e.into_value()))
        .collect();
    let max = diag.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let (dof, pivot) = diag
        .iter()
        .enumerate()
        .filter(|(i, _)| !system.prescribed.contains_key(i))
        .map(|(i, &x)| (i, if max > 0.0 { x / max } else { x }))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap_or((0, 0.0));
    let (node, comp) = DofComponent::from_dof(dof);
    VemError::SingularSystem {
        dof,
        node,
        component: comp.name(),
        pivot,
    }
}

fn pcg(system: &GlobalSystem, max_iterations: usize) -> Result<(DVector<f64>, usize)> {
    let n = system.dof_count();
    let mut inv_diag = DVector::zeros(n);
    for i in 0..n {
        let dii = system.k.get_entry(i, i).map_or(0.0, |e| e.into_value());
        if !(dii > 0.0) {
            return Err(weakest_dof(system));
        }
        inv_diag[i] = 1.0 / dii;
    }
    let target = 0.05 * RESIDUAL_TOL * system.f.norm();
    let mut x = DVector::zeros(n);
    let mut r = system.f.clone();
    let mut z = r.component_mul(&inv_diag);
    let mut p = z.clone();
    let mut rz = r.dot(&z);
    for it in 0..max_iterations {
        if r.norm() <= target {
            return Ok((x, it));
        }
        let kp = system.apply(&p);
        let pkp = p.dot(&kp);
        if !(pkp > 0.0) {
            return Err(weakest_dof(system));
        }
        let alpha = rz / pkp;
        x.axpy(alpha, &p, 1.0);
        r.axpy(-alpha, &kp, 1.0);
        z = r.component_mul(&inv_diag);
        let rz_next = r.dot(&z);
        p = &z + &p * (rz_next / rz);
        rz = rz_next;
    }
    let residual = system.residual(&x);
    if residual <= RESIDUAL_TOL {
        Ok((x, max_iterations))
    } else {
        Err(VemError::NotConverged {
            iterations: max_iterations,
            residual,
        })
    }
}

/// Local dof values of element `e`.
pub fn element_dofs(mesh: &PolyMesh, element: usize, d: &DVector<f64>) -> DVector<f64> {
    let dofs = mesh.elements()[element].dofs();
    DVector::from_iterator(dofs.len(), dofs.iter().map(|&g| d[g]))
}

/// Constant projected strain `B_E d_E` of every element.
pub fn recover_strains(mesh: &PolyMesh, kernels: &[ElementKernels], d: &DVector<f64>) -> Vec<Strain> {
    kernels
        .iter()
        .enumerate()
        .map(|(e, kern)| {
            let eps = &kern.b * element_dofs(mesh, e, d);
            Strain::new(eps[0], eps[1], eps[2], eps[3])
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub displacement: DVector<f64>,
    pub strains: Vec<Strain>,
    pub stresses: Vec<Stress>,
    pub diagnostics: SolveDiagnostics,
}

impl SolveReport {
    /// Mean of each strain component over elements.
    pub fn average_strain(&self) -> Strain {
        let sum: Strain = self.strains.iter().sum();
        sum / self.strains.len() as f64
    }
}

/// A complete boundary-value problem on one mesh.
#[derive(Debug, Clone)]
pub struct Problem<'a> {
    pub mesh: &'a PolyMesh,
    pub material: Material,
    pub dirichlet: DirichletSpec,
    pub tractions: TractionSpec,
    /// Extra nodal loads, e.g. from a body force.
    pub extra_load: Option<DVector<f64>>,
}

impl<'a> Problem<'a> {
    pub fn new(mesh: &'a PolyMesh, material: Material) -> Self {
        Self {
            mesh,
            material,
            dirichlet: DirichletSpec::new(),
            tractions: TractionSpec::new(),
            extra_load: None,
        }
    }

    pub fn kernels(&self, options: &AnalysisOptions) -> Result<Vec<ElementKernels>> {
        compute_kernels(self.mesh, &self.material, &options.element, options.parallel)
    }

    /// Assembled system with loads and constraints applied.
    pub fn system(&self, kernels: &[ElementKernels]) -> Result<GlobalSystem> {
        let mut system = assemble(self.mesh, kernels)?;
        if !self.tractions.is_empty() {
            system.add_load(&assemble_tractions(self.mesh, &self.tractions)?)?;
        }
        if let Some(load) = &self.extra_load {
            system.add_load(load)?;
        }
        apply_dirichlet(&mut system, &self.dirichlet)?;
        Ok(system)
    }

    pub fn solve_with(&self, kernels: &[ElementKernels], solver: SolverKind) -> Result<SolveReport> {
        let system = self.system(kernels)?;
        let (displacement, diagnostics) = solve(&system, solver)?;
        let strains = recover_strains(self.mesh, kernels, &displacement);
        let c = self.material.constitutive_matrix();
        let stresses = strains.iter().map(|e| c.stress(e)).collect();
        Ok(SolveReport {
            displacement,
            strains,
            stresses,
            diagnostics,
        })
    }

    pub fn solve(&self, options: &AnalysisOptions) -> Result<SolveReport> {
        let kernels = self.kernels(options)?;
        self.solve_with(&kernels, options.solver)
    }
}
