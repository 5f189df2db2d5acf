//! `axivem`: patch tests, convergence studies and boundary-value solves for
//! the axisymmetric virtual element method.

mod config;
mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use axivem::assembly::compute_kernels;
use axivem::loads::assemble_tractions;
use axivem::verify::{
    convergence_study, run_patch_test, Domain, ManufacturedSolution, PatchCase, PatchField, QuadraticAxial,
};
use axivem::{
    AnalysisOptions, DirichletSpec, ElementOptions, Material, PolyMesh, Problem, ProjectionVariant, ProjectorKind,
    SolverKind, TractionSpec, VemError,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use config::ConfigFile;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Output(String),
    #[error("{0}")]
    Numerical(VemError),
    #[error("{0}")]
    Assertion(String),
}

impl From<VemError> for CliError {
    fn from(e: VemError) -> Self {
        match e {
            VemError::SingularSystem { .. } | VemError::NotConverged { .. } | VemError::SingularConstitutive => {
                Self::Numerical(e)
            }
            other => Self::Usage(other.to_string()),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            Self::Assertion(_) => 1,
            Self::Usage(_) | Self::Output(_) => 2,
            Self::Numerical(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "axivem",
    version,
    about = "Axisymmetric linear elasticity with first-order virtual elements"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Structured mesh divisions, e.g. 4x4.
    #[arg(long, global = true, value_name = "NRxNZ")]
    mesh: Option<String>,
    /// Structured mesh domain.
    #[arg(long, global = true, value_name = "R_IN,R_OUT,Z_MIN,Z_MAX")]
    domain: Option<String>,
    /// Polygonal mesh file.
    #[arg(long, global = true)]
    mesh_file: Option<PathBuf>,
    /// Young's modulus.
    #[arg(long = "E", global = true)]
    youngs_modulus: Option<f64>,
    /// Poisson's ratio.
    #[arg(long, global = true)]
    nu: Option<f64>,
    /// First Lamé constant (use with --mu instead of --E/--nu).
    #[arg(long, global = true)]
    lambda: Option<f64>,
    /// Shear modulus (use with --lambda instead of --E/--nu).
    #[arg(long, global = true)]
    mu: Option<f64>,
    /// Stabilization parameter; defaults to the shear modulus.
    #[arg(long, global = true)]
    tau: Option<f64>,
    /// Drop the 2π factor from the stabilization.
    #[arg(long, global = true)]
    two_pi_normalization: bool,
    #[arg(long, global = true, value_enum)]
    variant: Option<VariantArg>,
    #[arg(long, global = true, value_enum)]
    projector: Option<ProjectorArg>,
    #[arg(long, global = true, value_enum)]
    solver: Option<SolverArg>,
    /// Compute element kernels on one thread.
    #[arg(long, global = true)]
    serial: bool,
    /// Output directory [default: axivem-out].
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum VariantArg {
    Consistent,
    Literal,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ProjectorArg {
    RowSpace,
    LinearFields,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SolverArg {
    Direct,
    Cg,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the boundary-value problem given by the config.
    Solve {
        /// Also write every element's kernels to kernels.txt.
        #[arg(long)]
        dump_kernels: bool,
    },
    /// Constant-strain patch tests.
    Patch {
        /// all, radial, axial, hoop or shear.
        #[arg(long)]
        case: Option<String>,
    },
    /// Strain-error convergence on uniformly refined meshes.
    Converge {
        /// Comma-separated divisions, each double the previous.
        #[arg(long, value_name = "N1,N2,...")]
        levels: Option<String>,
        /// quadratic, radial, axial, hoop or shear.
        #[arg(long)]
        field: Option<String>,
        /// Minimum fitted rate for exit code 0.
        #[arg(long)]
        min_rate: Option<f64>,
    },
    /// Print B, P, K_c, K_s and K of one element.
    DumpElement {
        #[arg(long, default_value_t = 0)]
        element: usize,
    },
}

fn parse_enum<T: ValueEnum>(value: &str, what: &str) -> Result<T, CliError> {
    T::from_str(value, true).map_err(|_| CliError::Usage(format!("unknown {what} '{value}'")))
}

fn parse_divisions(s: &str) -> Result<[usize; 2], CliError> {
    let bad = || CliError::Usage(format!("--mesh expects NRxNZ, got '{s}'"));
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    Ok([
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    ])
}

fn parse_list<T: std::str::FromStr>(s: &str, flag: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("{flag}: cannot parse '{x}'")))
        })
        .collect()
}

enum MeshSource {
    Structured { divisions: [usize; 2], domain: Domain },
    File(PathBuf),
}

/// Flags merged over the config file.
struct Settings {
    config: ConfigFile,
    mesh: MeshSource,
    material: Material,
    options: AnalysisOptions,
    out: PathBuf,
}

impl Settings {
    fn resolve(args: &CommonArgs) -> Result<Self, CliError> {
        let config = match &args.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let base = args
            .config
            .as_deref()
            .and_then(Path::parent)
            .map(Path::to_path_buf)
            .unwrap_or_default();

        let flag_structured = args.mesh.is_some() || args.domain.is_some();
        let cfg_structured = config.mesh.divisions.is_some() || config.mesh.domain.is_some();
        if flag_structured && args.mesh_file.is_some() {
            return Err(CliError::Usage(
                "give either --mesh/--domain or --mesh-file, not both".into(),
            ));
        }
        if cfg_structured && config.mesh.file.is_some() {
            return Err(CliError::Usage(
                "config [mesh]: give either divisions/domain or file, not both".into(),
            ));
        }
        let mesh = if let Some(file) = &args.mesh_file {
            MeshSource::File(file.clone())
        } else if let (false, Some(file)) = (flag_structured, &config.mesh.file) {
            MeshSource::File(base.join(file))
        } else {
            let divisions = match &args.mesh {
                Some(s) => parse_divisions(s)?,
                None => config.mesh.divisions.unwrap_or([4, 4]),
            };
            let [r_in, r_out, z_min, z_max] = match &args.domain {
                Some(s) => {
                    let v: Vec<f64> = parse_list(s, "--domain")?;
                    <[f64; 4]>::try_from(v)
                        .map_err(|_| CliError::Usage("--domain expects four comma-separated values".into()))?
                }
                None => config.mesh.domain.unwrap_or({
                    let g = Domain::GOLDEN;
                    [g.r_in, g.r_out, g.z_min, g.z_max]
                }),
            };
            MeshSource::Structured {
                divisions,
                domain: Domain {
                    r_in,
                    r_out,
                    z_min,
                    z_max,
                },
            }
        };

        let material = resolve_material(args, &config)?;

        let run = &config.run;
        let variant = match (args.variant, &run.variant) {
            (Some(v), _) => v,
            (None, Some(s)) => parse_enum(s, "variant")?,
            (None, None) => VariantArg::Consistent,
        };
        let projector = match (args.projector, &run.projector) {
            (Some(p), _) => p,
            (None, Some(s)) => parse_enum(s, "projector")?,
            (None, None) => ProjectorArg::RowSpace,
        };
        let solver = match (args.solver, &run.solver) {
            (Some(s), _) => s,
            (None, Some(s)) => parse_enum(s, "solver")?,
            (None, None) => SolverArg::Direct,
        };
        let tau = args.tau.or(run.tau);
        if let Some(t) = tau {
            if !(t > 0.0 && t.is_finite()) {
                return Err(CliError::Usage(format!("--tau must be positive, got {t}")));
            }
        }
        let options = AnalysisOptions {
            element: ElementOptions {
                tau,
                two_pi_normalization: args.two_pi_normalization || run.two_pi_normalization.unwrap_or(false),
                variant: match variant {
                    VariantArg::Consistent => ProjectionVariant::Consistent,
                    VariantArg::Literal => ProjectionVariant::Literal,
                },
                projector: match projector {
                    ProjectorArg::RowSpace => ProjectorKind::StrainRowSpace,
                    ProjectorArg::LinearFields => ProjectorKind::LinearFields,
                },
            },
            solver: match solver {
                SolverArg::Direct => SolverKind::Direct,
                SolverArg::Cg => SolverKind::ConjugateGradient,
            },
            parallel: !(args.serial || run.serial.unwrap_or(false)),
        };

        let out = args
            .out
            .clone()
            .or_else(|| run.out.as_ref().map(|o| base.join(o)))
            .unwrap_or_else(|| PathBuf::from("axivem-out"));

        Ok(Self {
            config,
            mesh,
            material,
            options,
            out,
        })
    }

    /// Mesh plus any boundary conditions stored in a mesh file.
    fn load_mesh(&self) -> Result<(PolyMesh, DirichletSpec, TractionSpec), CliError> {
        match &self.mesh {
            MeshSource::Structured { divisions, domain } => Ok((
                domain.mesh(divisions[0], divisions[1])?,
                DirichletSpec::new(),
                TractionSpec::new(),
            )),
            MeshSource::File(path) => {
                let doc = config::load_mesh_file(path)?;
                Ok((doc.mesh, doc.dirichlet, doc.tractions))
            }
        }
    }

    fn out_dir(&self) -> Result<&Path, CliError> {
        fs::create_dir_all(&self.out)
            .map_err(|e| CliError::Output(format!("cannot create {}: {e}", self.out.display())))?;
        Ok(&self.out)
    }

    fn header(&self, mesh: &PolyMesh) -> String {
        let mesh_label = match &self.mesh {
            MeshSource::Structured { divisions, domain } => format!(
                "{}x{} mesh on [{}, {}] x [{}, {}]",
                divisions[0], divisions[1], domain.r_in, domain.r_out, domain.z_min, domain.z_max
            ),
            MeshSource::File(p) => format!("{} ({} elements)", p.display(), mesh.element_count()),
        };
        let tau = self.options.element.stabilization_parameter(&self.material);
        format!(
            "{mesh_label}; E = {}, nu = {}, tau = {tau}",
            self.material.youngs_modulus, self.material.poisson_ratio
        )
    }
}

fn resolve_material(args: &CommonArgs, config: &ConfigFile) -> Result<Material, CliError> {
    let m = &config.material;
    let flag_eng = args.youngs_modulus.is_some() || args.nu.is_some();
    let flag_lame = args.lambda.is_some() || args.mu.is_some();
    let cfg_eng = m.youngs_modulus.is_some() || m.nu.is_some();
    let cfg_lame = m.lambda.is_some() || m.mu.is_some();
    if flag_eng && flag_lame {
        return Err(CliError::Usage(
            "give either --E/--nu or --lambda/--mu, not both".into(),
        ));
    }
    let use_lame = flag_lame || (!flag_eng && cfg_lame);
    if !flag_eng && !flag_lame && cfg_eng && cfg_lame {
        return Err(CliError::Usage(
            "config [material]: give either E/nu or lambda/mu, not both".into(),
        ));
    }
    let material = if use_lame {
        let lambda = args.lambda.or(m.lambda);
        let mu = args.mu.or(m.mu);
        match (lambda, mu) {
            (Some(l), Some(u)) => Material::from_lame(l, u)?,
            _ => return Err(CliError::Usage("both lambda and mu are required".into())),
        }
    } else {
        let e = args.youngs_modulus.or(m.youngs_modulus).unwrap_or(1.0);
        let nu = args.nu.or(m.nu).unwrap_or(0.3);
        Material::new(e, nu)?
    };
    Ok(material)
}

fn cmd_patch(settings: &Settings, case: Option<&str>) -> Result<(), CliError> {
    let case = case.or(settings.config.run.case.as_deref()).unwrap_or("all");
    let cases: Vec<PatchCase> = if case.eq_ignore_ascii_case("all") {
        PatchCase::ALL.to_vec()
    } else {
        vec![case.parse()?]
    };
    let (mesh, _, _) = settings.load_mesh()?;
    let dir = settings.out_dir()?;
    let header = settings.header(&mesh);
    let mut failed = Vec::new();
    for case in cases {
        let outcome = run_patch_test(case, &mesh, &settings.material, &settings.options)?;
        let table = output::patch_table(&outcome, &header);
        print!("{table}");
        println!();
        let name = case.name();
        output::write_text(&dir.join(format!("patch_{name}.txt")), &table)?;
        output::write_patch_csv(&dir.join(format!("patch_{name}.csv")), &outcome)?;
        output::write_elements_csv(
            &dir.join(format!("patch_{name}_elements.csv")),
            &outcome.report.strains,
            &outcome.report.stresses,
        )?;
        for check in outcome.checks.iter().filter(|c| !c.passed) {
            failed.push(format!("{name}: {}: {}", check.name, check.detail));
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Assertion(format!(
            "patch test failures:\n  {}",
            failed.join("\n  ")
        )))
    }
}

fn cmd_converge(
    settings: &Settings,
    levels: Option<&str>,
    field: Option<&str>,
    min_rate: Option<f64>,
) -> Result<(), CliError> {
    let run = &settings.config.run;
    let levels: Vec<usize> = match (levels, &run.levels) {
        (Some(s), _) => parse_list(s, "--levels")?,
        (None, Some(v)) => v.clone(),
        (None, None) => vec![4, 8, 16],
    };
    if levels.len() < 3 {
        return Err(CliError::Usage(format!(
            "a convergence study needs at least 3 levels, got {}",
            levels.len()
        )));
    }
    let field = field.or(run.field.as_deref()).unwrap_or("quadratic");
    let min_rate = min_rate.or(run.min_rate).unwrap_or(0.9);
    let solution: Box<dyn ManufacturedSolution> = if field.eq_ignore_ascii_case("quadratic") {
        Box::new(QuadraticAxial::default())
    } else {
        Box::new(PatchField(field.parse()?))
    };
    let domain = match &settings.mesh {
        MeshSource::Structured { domain, .. } => *domain,
        MeshSource::File(_) => {
            return Err(CliError::Usage(
                "converge refines structured meshes; --mesh-file is not supported".into(),
            ))
        }
    };
    let study = convergence_study(
        solution.as_ref(),
        &levels,
        domain,
        &settings.material,
        &settings.options,
    )?;
    let table = output::convergence_table(&study);
    print!("{table}");
    let dir = settings.out_dir()?;
    output::write_text(&dir.join("converge.txt"), &table)?;
    output::write_convergence_csv(&dir.join("converge.csv"), &study)?;
    if study.exact || study.rate >= min_rate {
        Ok(())
    } else {
        Err(CliError::Assertion(format!(
            "fitted rate {} is below the threshold {min_rate}",
            study.rate_label()
        )))
    }
}

fn cmd_solve(settings: &Settings, dump_kernels: bool) -> Result<(), CliError> {
    let (mesh, dirichlet, tractions) = settings.load_mesh()?;
    let bcs = &settings.config.bcs;
    let dirichlet = config::build_dirichlet(&mesh, &bcs.dirichlet, dirichlet)?;
    let tractions = config::build_tractions(&mesh, &bcs.traction, tractions)?;

    let mut problem = Problem::new(&mesh, settings.material);
    problem.dirichlet = dirichlet;
    problem.tractions = tractions;
    let kernels = problem.kernels(&settings.options)?;
    let report = problem.solve_with(&kernels, settings.options.solver)?;

    let dir = settings.out_dir()?;
    output::write_nodes_csv(&dir.join("nodes.csv"), &mesh, &report.displacement)?;
    output::write_elements_csv(&dir.join("elements.csv"), &report.strains, &report.stresses)?;
    let loads = if problem.tractions.is_empty() {
        nalgebra::DVector::zeros(mesh.dof_count())
    } else {
        assemble_tractions(&mesh, &problem.tractions)?
    };
    output::write_loads_csv(&dir.join("loads.csv"), &loads)?;
    if dump_kernels {
        let text: String = kernels
            .iter()
            .enumerate()
            .map(|(e, k)| output::element_dump(e, k) + "\n")
            .collect();
        output::write_text(&dir.join("kernels.txt"), &text)?;
    }

    let avg = report.average_strain();
    let d = &report.diagnostics;
    let summary = format!(
        "{}\nsolver {}: {} iterations, relative residual {:e}\n\
         average strain: eps_r {} eps_z {} gamma_rz {} eps_theta {}\n\
         max |u|: {:e}\n",
        settings.header(&mesh),
        d.solver.name(),
        d.iterations,
        d.residual,
        avg[0],
        avg[1],
        avg[2],
        avg[3],
        report.displacement.amax()
    );
    print!("{summary}");
    output::write_text(&dir.join("summary.txt"), &summary)
}

fn cmd_dump_element(settings: &Settings, element: usize) -> Result<(), CliError> {
    let (mesh, _, _) = settings.load_mesh()?;
    if element >= mesh.element_count() {
        return Err(CliError::Usage(format!(
            "element {element} out of range (mesh has {})",
            mesh.element_count()
        )));
    }
    let kernels = compute_kernels(&mesh, &settings.material, &settings.options.element, false)?;
    let text = output::element_dump(element, &kernels[element]);
    print!("{text}");
    let dir = settings.out_dir()?;
    output::write_text(&dir.join(format!("element_{element}.txt")), &text)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let settings = Settings::resolve(&cli.common)?;
    match cli.command {
        Command::Solve { dump_kernels } => cmd_solve(&settings, dump_kernels),
        Command::Patch { case } => cmd_patch(&settings, case.as_deref()),
        Command::Converge {
            levels,
            field,
            min_rate,
        } => cmd_converge(&settings, levels.as_deref(), field.as_deref(), min_rate),
        Command::DumpElement { element } => cmd_dump_element(&settings, element),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
