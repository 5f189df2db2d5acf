//! TOML run configuration and mesh files.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use axivem::loads::{DirichletSpec, DofComponent, Traction, TractionSpec};
use axivem::mesh::{PolyMesh, Vertex};
use axivem::meshfile::{read_mesh, MeshDocument};
use axivem::verify::PatchCase;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub mesh: MeshSection,
    #[serde(default)]
    pub material: MaterialSection,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub bcs: BcsSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshSection {
    /// `[nr, nz]`.
    pub divisions: Option<[usize; 2]>,
    /// `[r_in, r_out, z_min, z_max]`.
    pub domain: Option<[f64; 4]>,
    pub file: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSection {
    #[serde(rename = "E")]
    pub youngs_modulus: Option<f64>,
    pub nu: Option<f64>,
    pub lambda: Option<f64>,
    pub mu: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub tau: Option<f64>,
    pub two_pi_normalization: Option<bool>,
    pub variant: Option<String>,
    pub projector: Option<String>,
    pub solver: Option<String>,
    pub serial: Option<bool>,
    pub out: Option<PathBuf>,
    pub case: Option<String>,
    pub levels: Option<Vec<usize>>,
    pub field: Option<String>,
    pub min_rate: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BcsSection {
    #[serde(default)]
    pub dirichlet: Vec<DirichletEntry>,
    #[serde(default)]
    pub traction: Vec<TractionEntry>,
}

/// Prescribed displacement on a node set: either a named field or explicit
/// component values (a missing component stays free).
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirichletEntry {
    #[serde(rename = "where")]
    pub selector: String,
    pub field: Option<String>,
    pub ur: Option<f64>,
    pub uz: Option<f64>,
}

/// Traction `t = t + r·dr + z·dz` on the boundary edges of a node set.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TractionEntry {
    #[serde(rename = "where")]
    pub selector: String,
    pub t: [f64; 2],
    pub dr: Option<[f64; 2]>,
    pub dz: Option<[f64; 2]>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }
}

pub fn load_mesh_file(path: &Path) -> Result<MeshDocument, CliError> {
    read_mesh(path).map_err(|e| CliError::Usage(format!("mesh {}: {e}", path.display())))
}

/// Node-set predicate: `boundary`, `all`, `node=ID`, `r=VALUE`, `z=VALUE`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Selector {
    Boundary,
    All,
    Node(usize),
    Radius(f64),
    Height(f64),
}

impl Selector {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        let s = s.trim();
        let bad = || CliError::Usage(format!("bad node selector '{s}'"));
        match s {
            "boundary" => return Ok(Self::Boundary),
            "all" => return Ok(Self::All),
            _ => {}
        }
        let (key, value) = s.split_once('=').ok_or_else(bad)?;
        let value = value.trim();
        match key.trim() {
            "node" => value.parse().map(Self::Node).map_err(|_| bad()),
            "r" => value.parse().map(Self::Radius).map_err(|_| bad()),
            "z" => value.parse().map(Self::Height).map_err(|_| bad()),
            _ => Err(bad()),
        }
    }

    /// Matching node ids; coordinates compare within `1e-9` of the mesh size.
    pub fn nodes(&self, mesh: &PolyMesh) -> Vec<usize> {
        let (r0, r1, z0, z1) = mesh.bounds();
        let tol = 1e-9 * (r1 - r0).hypot(z1 - z0);
        let boundary = mesh.boundary_nodes();
        (0..mesh.node_count())
            .filter(|&i| {
                let v = mesh.vertices()[i];
                match *self {
                    Self::Boundary => boundary.contains(&i),
                    Self::All => true,
                    Self::Node(n) => n == i,
                    Self::Radius(r) => boundary.contains(&i) && (v.r - r).abs() <= tol,
                    Self::Height(z) => boundary.contains(&i) && (v.z - z).abs() <= tol,
                }
            })
            .collect()
    }
}

pub type Field = Box<dyn Fn(Vertex) -> (f64, f64)>;

/// Named analytic field: a patch case or `zero`.
pub fn named_field(name: &str) -> Result<Field, CliError> {
    if name.eq_ignore_ascii_case("zero") {
        return Ok(Box::new(|_| (0.0, 0.0)));
    }
    let case: PatchCase = name
        .parse()
        .map_err(|e: axivem::VemError| CliError::Usage(e.to_string()))?;
    Ok(Box::new(move |x| case.displacement(x)))
}

/// Adds the config entries to `spec`.
pub fn build_dirichlet(
    mesh: &PolyMesh,
    entries: &[DirichletEntry],
    mut spec: DirichletSpec,
) -> Result<DirichletSpec, CliError> {
    for entry in entries {
        let nodes = Selector::parse(&entry.selector)?.nodes(mesh);
        if nodes.is_empty() {
            return Err(CliError::Usage(format!(
                "dirichlet selector '{}' matches no node",
                entry.selector
            )));
        }
        match (&entry.field, entry.ur, entry.uz) {
            (Some(name), None, None) => {
                let field = named_field(name)?;
                spec.add_field(mesh, nodes, field)?;
            }
            (None, ur, uz) if ur.is_some() || uz.is_some() => {
                for n in nodes {
                    if let Some(v) = ur {
                        spec.insert(n, DofComponent::Radial, v)?;
                    }
                    if let Some(v) = uz {
                        spec.insert(n, DofComponent::Axial, v)?;
                    }
                }
            }
            _ => {
                return Err(CliError::Usage(format!(
                    "dirichlet '{}': give either `field` or `ur`/`uz`",
                    entry.selector
                )))
            }
        }
    }
    Ok(spec)
}

pub fn build_tractions(
    mesh: &PolyMesh,
    entries: &[TractionEntry],
    mut spec: TractionSpec,
) -> Result<TractionSpec, CliError> {
    for entry in entries {
        let nodes = Selector::parse(&entry.selector)?.nodes(mesh);
        let [tr, tz] = entry.t;
        let traction = match (entry.dr, entry.dz) {
            (None, None) => Traction::Constant(tr, tz),
            (dr, dz) => {
                let [a, b] = dr.unwrap_or([0.0; 2]);
                let [c, d] = dz.unwrap_or([0.0; 2]);
                Traction::field(move |x| (tr + a * x.r + c * x.z, tz + b * x.r + d * x.z))
            }
        };
        let set: BTreeSet<usize> = nodes.into_iter().collect();
        let mut count = 0;
        for (a, b) in mesh.boundary_edge_nodes() {
            if set.contains(&a) && set.contains(&b) {
                spec.add(mesh, a, b, traction.clone())?;
                count += 1;
            }
        }
        if count == 0 {
            return Err(CliError::Usage(format!(
                "traction selector '{}' matches no boundary edge",
                entry.selector
            )));
        }
    }
    Ok(spec)
}
