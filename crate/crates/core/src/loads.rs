//! Boundary conditions: prescribed displacements and edge tractions.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;

use crate::element::centroid_weights;
use crate::error::{Result, VemError};
use crate::mesh::{PolyMesh, Vertex};
use crate::quadrature::{integrate_triangle, EdgeRule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DofComponent {
    Radial,
    Axial,
}

impl DofComponent {
    pub const fn offset(self) -> usize {
        match self {
            Self::Radial => 0,
            Self::Axial => 1,
        }
    }

    pub const fn name(self) -> &'static str {
        match self {
            Self::Radial => "radial",
            Self::Axial => "axial",
        }
    }

    pub fn global_dof(self, node: usize) -> usize {
        2 * node + self.offset()
    }

    pub fn from_dof(dof: usize) -> (usize, Self) {
        let comp = if dof.is_multiple_of(2) {
            Self::Radial
        } else {
            Self::Axial
        };
        (dof / 2, comp)
    }
}

/// Prescribed displacement values, at most one per (node, component).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DirichletSpec {
    values: BTreeMap<(usize, DofComponent), f64>,
}

impl DirichletSpec {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a prescription. Repeating an identical one is accepted.
    pub fn insert(&mut self, node: usize, component: DofComponent, value: f64) -> Result<()> {
        if !value.is_finite() {
            return Err(VemError::InvalidBoundaryCondition(format!(
                "non-finite value {value} for node {node} ({})",
                component.name()
            )));
        }
        match self.values.get(&(node, component)) {
            Some(&old) if old != value => Err(VemError::InvalidBoundaryCondition(format!(
                "node {node} ({}) prescribed twice: {old} and {value}",
                component.name()
            ))),
            _ => {
                self.values.insert((node, component), value);
                Ok(())
            }
        }
    }

    /// Prescribes both components of `field` at every listed node.
    pub fn from_field<I, F>(mesh: &PolyMesh, nodes: I, field: F) -> Result<Self>
    where
        I: IntoIterator<Item = usize>,
        F: Fn(Vertex) -> (f64, f64),
    {
        let mut spec = Self::new();
        spec.add_field(mesh, nodes, field)?;
        Ok(spec)
    }

    pub fn add_field<I, F>(&mut self, mesh: &PolyMesh, nodes: I, field: F) -> Result<()>
    where
        I: IntoIterator<Item = usize>,
        F: Fn(Vertex) -> (f64, f64),
    {
        for node in nodes {
            let v = *mesh
                .vertices()
                .get(node)
                .ok_or_else(|| VemError::InvalidBoundaryCondition(format!("node {node} does not exist")))?;
            let (ur, uz) = field(v);
            self.insert(node, DofComponent::Radial, ur)?;
            self.insert(node, DofComponent::Axial, uz)?;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, DofComponent, f64)> + '_ {
        self.values.iter().map(|(&(n, c), &v)| (n, c, v))
    }

    /// Prescribed values keyed by global dof, checked against `dof_count`.
    pub fn dof_values(&self, dof_count: usize) -> Result<BTreeMap<usize, f64>> {
        self.iter()
            .map(|(node, comp, value)| {
                let dof = comp.global_dof(node);
                if dof >= dof_count {
                    Err(VemError::InvalidBoundaryCondition(format!(
                        "node {node} does not exist"
                    )))
                } else {
                    Ok((dof, value))
                }
            })
            .collect()
    }

    pub fn constrains(&self, component: DofComponent) -> bool {
        self.values.keys().any(|&(_, c)| c == component)
    }
}

type TractionFn = Arc<dyn Fn(Vertex) -> (f64, f64) + Send + Sync>;

/// Surface traction `(t_r, t_z)` along an edge.
#[derive(Clone)]
pub enum Traction {
    Constant(f64, f64),
    Field(TractionFn),
}

impl Traction {
    pub fn field<F>(f: F) -> Self
    where
        F: Fn(Vertex) -> (f64, f64) + Send + Sync + 'static,
    {
        Self::Field(Arc::new(f))
    }

    pub fn at(&self, x: Vertex) -> (f64, f64) {
        match self {
            Self::Constant(tr, tz) => (*tr, *tz),
            Self::Field(f) => f(x),
        }
    }
}

impl fmt::Debug for Traction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(tr, tz) => write!(f, "Constant({tr}, {tz})"),
            Self::Field(_) => f.write_str("Field(..)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct EdgeTraction {
    pub nodes: (usize, usize),
    pub traction: Traction,
}

#[derive(Debug, Clone, Default)]
pub struct TractionSpec {
    edges: Vec<EdgeTraction>,
}

impl TractionSpec {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a traction on the boundary edge joining `a` and `b`.
    pub fn add(&mut self, mesh: &PolyMesh, a: usize, b: usize, traction: Traction) -> Result<()> {
        if mesh.find_boundary_edge(a, b).is_none() {
            return Err(VemError::InvalidBoundaryCondition(format!(
                "({a}, {b}) is not a boundary edge"
            )));
        }
        self.edges.push(EdgeTraction {
            nodes: (a, b),
            traction,
        });
        Ok(())
    }

    /// Applies `traction` to every boundary edge whose endpoints both satisfy
    /// `select`. Returns the number of edges added.
    pub fn add_where<P>(&mut self, mesh: &PolyMesh, select: P, traction: Traction) -> usize
    where
        P: Fn(Vertex) -> bool,
    {
        let mut count = 0;
        for (a, b) in mesh.boundary_edge_nodes() {
            if select(mesh.vertices()[a]) && select(mesh.vertices()[b]) {
                self.edges.push(EdgeTraction {
                    nodes: (a, b),
                    traction: traction.clone(),
                });
                count += 1;
            }
        }
        count
    }

    pub fn edges(&self) -> &[EdgeTraction] {
        &self.edges
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// Nodal loads `(f_r(p), f_z(p), f_r(q), f_z(q))` of a traction on edge p→q.
///
/// Constant tractions on vertical edges use the one-point rule; everything
/// else the two-point Gauss rule.
pub fn edge_load_vector(p: Vertex, q: Vertex, traction: &Traction, length_scale: f64) -> Result<[f64; 4]> {
    let len = p.distance(&q);
    if !(len > 0.0) {
        return Err(VemError::ZeroLengthEdge {
            r1: p.r,
            z1: p.z,
            r2: q.r,
            z2: q.z,
        });
    }
    let rule = match traction {
        Traction::Constant(..) => EdgeRule::for_edge(p, q, length_scale),
        Traction::Field(_) => EdgeRule::TwoPointGauss,
    };
    let mut out = [0.0; 4];
    for &(s, w) in rule.points() {
        let x = Vertex::new(p.r + s * (q.r - p.r), p.z + s * (q.z - p.z));
        let (tr, tz) = traction.at(x);
        for (a, shape) in [1.0 - s, s].into_iter().enumerate() {
            let f = w * shape * x.r * len;
            out[2 * a] += f * tr;
            out[2 * a + 1] += f * tz;
        }
    }
    Ok(out)
}

/// Global load vector of all edge tractions.
pub fn assemble_tractions(mesh: &PolyMesh, spec: &TractionSpec) -> Result<DVector<f64>> {
    let mut f = DVector::zeros(mesh.dof_count());
    let (r0, r1, z0, z1) = mesh.bounds();
    let scale = (r1 - r0).hypot(z1 - z0);
    for edge in spec.edges() {
        let (a, b) = edge.nodes;
        let loads = edge_load_vector(mesh.vertices()[a], mesh.vertices()[b], &edge.traction, scale)?;
        f[2 * a] += loads[0];
        f[2 * a + 1] += loads[1];
        f[2 * b] += loads[2];
        f[2 * b + 1] += loads[3];
    }
    Ok(f)
}

/// `∫_Ω b · v r dr dz` for a body force `b`, on the centroid fan of each
/// element with the virtual field taken piecewise linear on the fan.
///
/// Body forces are not part of the boundary-value problems exposed to users;
/// this serves manufactured-solution studies.
pub fn body_force_load<F>(mesh: &PolyMesh, body_force: F) -> Result<DVector<f64>>
where
    F: Fn(Vertex) -> (f64, f64),
{
    let mut f = DVector::zeros(mesh.dof_count());
    for (e, element) in mesh.elements().iter().enumerate() {
        let geom = mesh.geometry(e)?;
        let apex = centroid_weights(&geom);
        let ids = element.vertex_ids();
        let m = ids.len();
        for tri in &geom.triangles {
            let k = tri.edge;
            let (p, q) = geom.edge(k);
            for (i, &node) in ids.iter().enumerate() {
                for comp in 0..2 {
                    let value = integrate_triangle(p, q, geom.centroid, |x, l| {
                        let shape = l[2] * apex[i]
                            + if i == k { l[0] } else { 0.0 }
                            + if i == (k + 1) % m { l[1] } else { 0.0 };
                        let (br, bz) = body_force(x);
                        let b = if comp == 0 { br } else { bz };
                        b * shape * x.r
                    });
                    f[2 * node + comp] += value;
                }
            }
        }
    }
    Ok(f)
}
