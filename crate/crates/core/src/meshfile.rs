//! Line-oriented mesh files.
//!
//! ```text
//! # comment
//! 4 1              vertex count, element count
//! 1.0 0.0          one `r z` line per vertex
//! 2.0 0.0
//! 2.0 1.0
//! 1.0 1.0
//! 4 0 1 2 3        `m id_1 ... id_m` per element
//! dirichlet 2      optional block: `node r|z value`
//! 0 z 0.0
//! 1 z 0.0
//! traction 1       optional block: `a b t_r t_z` on boundary edge a-b
//! 1 2 1.0 0.0
//! ```
//!
//! Vertex ids are zero-based. Blank lines and `#` comments are ignored.

use std::path::Path;

use crate::error::{Result, VemError};
use crate::loads::{DirichletSpec, DofComponent, Traction, TractionSpec};
use crate::mesh::{PolyMesh, Vertex};

/// A mesh together with the boundary conditions stored alongside it.
#[derive(Debug, Clone)]
pub struct MeshDocument {
    pub mesh: PolyMesh,
    pub dirichlet: DirichletSpec,
    pub tractions: TractionSpec,
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (i, raw) in self.inner.by_ref() {
            let text = raw.split('#').next().unwrap_or("");
            let fields: Vec<&str> = text.split_whitespace().collect();
            if !fields.is_empty() {
                return Some((i + 1, fields));
            }
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<(usize, Vec<&'a str>)> {
        self.next().ok_or_else(|| VemError::Parse {
            line: 0,
            message: format!("unexpected end of file, expected {what}"),
        })
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> VemError {
    VemError::Parse {
        line,
        message: message.into(),
    }
}

fn number<T: std::str::FromStr>(line: usize, field: &str) -> Result<T> {
    field
        .parse()
        .map_err(|_| parse_err(line, format!("cannot parse '{field}'")))
}

fn arity(line: usize, fields: &[&str], n: usize, what: &str) -> Result<()> {
    if fields.len() != n {
        return Err(parse_err(
            line,
            format!("{what} needs {n} fields, found {}", fields.len()),
        ));
    }
    Ok(())
}

pub fn parse_mesh(text: &str) -> Result<MeshDocument> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
    };
    let (line, header) = lines.expect("header")?;
    arity(line, &header, 2, "header")?;
    let nv: usize = number(line, header[0])?;
    let ne: usize = number(line, header[1])?;

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (line, f) = lines.expect("vertex line")?;
        arity(line, &f, 2, "vertex line")?;
        vertices.push(Vertex::new(number(line, f[0])?, number(line, f[1])?));
    }

    let mut elements = Vec::with_capacity(ne);
    for _ in 0..ne {
        let (line, f) = lines.expect("element line")?;
        let m: usize = number(line, f[0])?;
        arity(line, &f, m + 1, "element line")?;
        let ids = f[1..].iter().map(|s| number(line, s)).collect::<Result<Vec<usize>>>()?;
        elements.push(ids);
    }
    let mesh = PolyMesh::new(vertices, elements)?;

    let mut dirichlet = DirichletSpec::new();
    let mut tractions = TractionSpec::new();
    while let Some((line, block)) = lines.next() {
        arity(line, &block, 2, "block header")?;
        let count: usize = number(line, block[1])?;
        match block[0] {
            "dirichlet" => {
                for _ in 0..count {
                    let (line, f) = lines.expect("dirichlet line")?;
                    arity(line, &f, 3, "dirichlet line")?;
                    let node: usize = number(line, f[0])?;
                    if node >= mesh.node_count() {
                        return Err(parse_err(line, format!("node {node} out of range")));
                    }
                    let component = match f[1] {
                        "r" => DofComponent::Radial,
                        "z" => DofComponent::Axial,
                        other => return Err(parse_err(line, format!("component '{other}' is not r or z"))),
                    };
                    dirichlet.insert(node, component, number(line, f[2])?)?;
                }
            }
            "traction" => {
                for _ in 0..count {
                    let (line, f) = lines.expect("traction line")?;
                    arity(line, &f, 4, "traction line")?;
                    let a: usize = number(line, f[0])?;
                    let b: usize = number(line, f[1])?;
                    let t = Traction::Constant(number(line, f[2])?, number(line, f[3])?);
                    tractions
                        .add(&mesh, a, b, t)
                        .map_err(|e| parse_err(line, e.to_string()))?;
                }
            }
            other => return Err(parse_err(line, format!("unknown block '{other}'"))),
        }
    }

    Ok(MeshDocument {
        mesh,
        dirichlet,
        tractions,
    })
}

pub fn read_mesh(path: &Path) -> Result<MeshDocument> {
    parse_mesh(&std::fs::read_to_string(path)?)
}
