//! Polygonal meshes of the meridional (r, z) half-plane and per-element geometry.
//!
//! Elements are stored counter-clockwise. Input polygons given clockwise are
//! reversed on ingestion. The domain must stay away from the symmetry axis,
//! so every vertex needs `r > 0`.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Result, VemError};

/// Area below `DEGENERACY_TOL * h_E^2` marks a polygon as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-14;

/// A point in the meridional plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vertex {
    pub r: f64,
    pub z: f64,
}

impl Vertex {
    pub const fn new(r: f64, z: f64) -> Self {
        Self { r, z }
    }

    pub fn distance(&self, other: &Vertex) -> f64 {
        (self.r - other.r).hypot(self.z - other.z)
    }
}

/// A polygonal element given by counter-clockwise vertex indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyElement {
    vertex_ids: Vec<usize>,
}

impl PolyElement {
    pub fn vertex_ids(&self) -> &[usize] {
        &self.vertex_ids
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_ids.len()
    }

    /// Global vertex ids of local edge `k` (from vertex k to vertex k+1).
    pub fn edge(&self, k: usize) -> (usize, usize) {
        let m = self.vertex_ids.len();
        (self.vertex_ids[k], self.vertex_ids[(k + 1) % m])
    }

    /// Interleaved global dof indices `[2a, 2a+1, 2b, 2b+1, ...]`.
    pub fn dofs(&self) -> Vec<usize> {
        self.vertex_ids.iter().flat_map(|&v| [2 * v, 2 * v + 1]).collect()
    }
}

/// An edge owned by exactly one element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct BoundaryEdge {
    pub element: usize,
    pub local_edge: usize,
}

/// Undirected edge -> (element, local edge, stored low-to-high).
type EdgeOwners = BTreeMap<(usize, usize), Vec<(usize, usize, bool)>>;

#[derive(Debug, Clone)]
pub struct PolyMesh {
    vertices: Vec<Vertex>,
    elements: Vec<PolyElement>,
    boundary_edges: Vec<BoundaryEdge>,
}

impl PolyMesh {
    /// Builds and validates a conforming mesh.
    ///
    /// Element orientation is normalized to counter-clockwise. Every polygon
    /// is checked for degeneracy, self-intersection and star-shapedness with
    /// respect to its centroid; every edge may be shared by at most two
    /// elements, which must traverse it in opposite directions.
    pub fn new(vertices: Vec<Vertex>, elements: Vec<Vec<usize>>) -> Result<Self> {
        for (i, v) in vertices.iter().enumerate() {
            if !(v.r.is_finite() && v.z.is_finite()) {
                return Err(VemError::InvalidMesh(format!("vertex {i} is not finite")));
            }
            if v.r <= 0.0 {
                return Err(VemError::InvalidMesh(format!(
                    "vertex {i} has r = {} (domain must satisfy r > 0)",
                    v.r
                )));
            }
        }
        if elements.is_empty() {
            return Err(VemError::InvalidMesh("mesh has no elements".into()));
        }

        let mut normalized = Vec::with_capacity(elements.len());
        for (e, mut ids) in elements.into_iter().enumerate() {
            if ids.len() < 3 {
                return Err(VemError::InvalidMesh(format!(
                    "element {e} has {} vertices (need at least 3)",
                    ids.len()
                )));
            }
            if let Some(&bad) = ids.iter().find(|&&id| id >= vertices.len()) {
                return Err(VemError::InvalidMesh(format!(
                    "element {e} references vertex {bad}, mesh has {}",
                    vertices.len()
                )));
            }
            let unique: BTreeSet<_> = ids.iter().collect();
            if unique.len() != ids.len() {
                return Err(VemError::InvalidMesh(format!("element {e} repeats a vertex")));
            }
            let coords: Vec<Vertex> = ids.iter().map(|&i| vertices[i]).collect();
            if signed_area(&coords) < 0.0 {
                ids.reverse();
            }
            let coords: Vec<Vertex> = ids.iter().map(|&i| vertices[i]).collect();
            ElementGeometry::from_vertices(&coords).map_err(|err| tag_element(err, e))?;
            normalized.push(PolyElement { vertex_ids: ids });
        }

        // Directed edge -> owner; the twin must appear reversed.
        let mut owners: EdgeOwners = BTreeMap::new();
        for (e, el) in normalized.iter().enumerate() {
            for k in 0..el.vertex_count() {
                let (a, b) = el.edge(k);
                let key = (a.min(b), a.max(b));
                owners.entry(key).or_default().push((e, k, a < b));
            }
        }
        let mut boundary_edges = Vec::new();
        for ((a, b), list) in &owners {
            match list.as_slice() {
                [(e, k, _)] => boundary_edges.push(BoundaryEdge {
                    element: *e,
                    local_edge: *k,
                }),
                [(e1, _, d1), (e2, _, d2)] => {
                    if d1 == d2 {
                        return Err(VemError::InvalidMesh(format!(
                            "edge ({a}, {b}) is traversed in the same direction by elements {e1} and {e2} (overlap)"
                        )));
                    }
                }
                _ => {
                    return Err(VemError::InvalidMesh(format!(
                        "edge ({a}, {b}) is shared by {} elements",
                        list.len()
                    )))
                }
            }
        }
        boundary_edges.sort();

        Ok(Self {
            vertices,
            elements: normalized,
            boundary_edges,
        })
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn elements(&self) -> &[PolyElement] {
        &self.elements
    }

    pub fn boundary_edges(&self) -> &[BoundaryEdge] {
        &self.boundary_edges
    }

    pub fn node_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn element_count(&self) -> usize {
        self.elements.len()
    }

    pub fn dof_count(&self) -> usize {
        2 * self.vertices.len()
    }

    pub fn element_vertices(&self, element: usize) -> Vec<Vertex> {
        self.elements[element]
            .vertex_ids
            .iter()
            .map(|&i| self.vertices[i])
            .collect()
    }

    /// Global vertex pairs of all boundary edges, oriented counter-clockwise
    /// with respect to the owning element.
    pub fn boundary_edge_nodes(&self) -> Vec<(usize, usize)> {
        self.boundary_edges
            .iter()
            .map(|be| self.elements[be.element].edge(be.local_edge))
            .collect()
    }

    pub fn boundary_nodes(&self) -> BTreeSet<usize> {
        self.boundary_edge_nodes()
            .into_iter()
            .flat_map(|(a, b)| [a, b])
            .collect()
    }

    /// Finds the boundary edge joining two vertices, in either order.
    pub fn find_boundary_edge(&self, a: usize, b: usize) -> Option<BoundaryEdge> {
        self.boundary_edges.iter().copied().find(|be| {
            let (p, q) = self.elements[be.element].edge(be.local_edge);
            (p, q) == (a, b) || (p, q) == (b, a)
        })
    }

    /// Bounding box `(r_min, r_max, z_min, z_max)`.
    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        self.vertices.iter().fold(
            (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
            |(a, b, c, d), v| (a.min(v.r), b.max(v.r), c.min(v.z), d.max(v.z)),
        )
    }

    pub fn geometry(&self, element: usize) -> Result<ElementGeometry> {
        compute_geometry(self, element)
    }
}

fn tag_element(err: VemError, element: usize) -> VemError {
    match err {
        VemError::DegenerateElement { area, threshold, .. } => VemError::DegenerateElement {
            element,
            area,
            threshold,
        },
        VemError::SelfIntersecting { .. } => VemError::SelfIntersecting { element },
        VemError::NotStarShaped { .. } => VemError::NotStarShaped { element },
        other => other,
    }
}

/// Uniform quadrilateral mesh of `[r_in, r_out] x [z_min, z_max]`.
///
/// Nodes are numbered row by row from `(r_in, z_min)`: node `j*(nr+1) + i`
/// sits at radial column `i` and axial row `j`.
pub fn generate_structured_mesh(
    r_in: f64,
    r_out: f64,
    z_min: f64,
    z_max: f64,
    nr: usize,
    nz: usize,
) -> Result<PolyMesh> {
    if !(r_in > 0.0) {
        return Err(VemError::InvalidMesh(format!(
            "r_in = {r_in}: domains touching the axis are not supported"
        )));
    }
    if !(r_out > r_in) || !(z_max > z_min) {
        return Err(VemError::InvalidMesh(format!(
            "empty domain [{r_in}, {r_out}] x [{z_min}, {z_max}]"
        )));
    }
    if nr == 0 || nz == 0 {
        return Err(VemError::InvalidMesh("need at least one division per direction".into()));
    }
    let dr = (r_out - r_in) / nr as f64;
    let dz = (z_max - z_min) / nz as f64;
    let mut vertices = Vec::with_capacity((nr + 1) * (nz + 1));
    for j in 0..=nz {
        let z = if j == nz { z_max } else { z_min + j as f64 * dz };
        for i in 0..=nr {
            let r = if i == nr { r_out } else { r_in + i as f64 * dr };
            vertices.push(Vertex::new(r, z));
        }
    }
    let mut elements = Vec::with_capacity(nr * nz);
    for j in 0..nz {
        for i in 0..nr {
            let a = j * (nr + 1) + i;
            elements.push(vec![a, a + 1, a + nr + 2, a + nr + 1]);
        }
    }
    PolyMesh::new(vertices, elements)
}

/// Triangle (centroid, v_k, v_{k+1}) of the centroid fan, attached to edge k.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FanTriangle {
    pub edge: usize,
    pub area: f64,
    /// Exact `∫_T r dr dz`.
    pub weighted_volume: f64,
}

#[derive(Debug, Clone)]
pub struct ElementGeometry {
    pub vertices: Vec<Vertex>,
    pub area: f64,
    pub centroid: Vertex,
    pub diameter: f64,
    /// Exact `∫_E r dr dz`, summed over the centroid fan.
    pub weighted_volume: f64,
    pub triangles: Vec<FanTriangle>,
}

impl ElementGeometry {
    /// Geometry of a counter-clockwise polygon.
    pub fn from_vertices(vertices: &[Vertex]) -> Result<Self> {
        let m = vertices.len();
        if m < 3 {
            return Err(VemError::InvalidMesh(format!("polygon with {m} vertices")));
        }
        let mut diameter: f64 = 0.0;
        for i in 0..m {
            for j in i + 1..m {
                diameter = diameter.max(vertices[i].distance(&vertices[j]));
            }
        }
        let area = signed_area(vertices);
        let threshold = DEGENERACY_TOL * diameter * diameter;
        if !(area > threshold) {
            return Err(VemError::DegenerateElement {
                element: usize::MAX,
                area,
                threshold,
            });
        }
        if !is_simple(vertices) {
            return Err(VemError::SelfIntersecting { element: usize::MAX });
        }

        let mut cr = 0.0;
        let mut cz = 0.0;
        for k in 0..m {
            let p = vertices[k];
            let q = vertices[(k + 1) % m];
            let cross = p.r * q.z - q.r * p.z;
            cr += (p.r + q.r) * cross;
            cz += (p.z + q.z) * cross;
        }
        let centroid = Vertex::new(cr / (6.0 * area), cz / (6.0 * area));

        let mut triangles = Vec::with_capacity(m);
        let mut weighted_volume = 0.0;
        for k in 0..m {
            let p = vertices[k];
            let q = vertices[(k + 1) % m];
            let t_area = 0.5 * ((p.r - centroid.r) * (q.z - centroid.z) - (q.r - centroid.r) * (p.z - centroid.z));
            if !(t_area > threshold) {
                return Err(VemError::NotStarShaped { element: usize::MAX });
            }
            // r is linear, so its mean over a triangle is the vertex mean.
            let t_weighted = t_area * (centroid.r + p.r + q.r) / 3.0;
            weighted_volume += t_weighted;
            triangles.push(FanTriangle {
                edge: k,
                area: t_area,
                weighted_volume: t_weighted,
            });
        }

        Ok(Self {
            vertices: vertices.to_vec(),
            area,
            centroid,
            diameter,
            weighted_volume,
            triangles,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// Endpoints of local edge k.
    pub fn edge(&self, k: usize) -> (Vertex, Vertex) {
        let m = self.vertices.len();
        (self.vertices[k], self.vertices[(k + 1) % m])
    }

    /// Outward unit normal of local edge k (counter-clockwise orientation).
    pub fn outward_normal(&self, k: usize) -> (f64, f64) {
        let (p, q) = self.edge(k);
        let len = p.distance(&q);
        ((q.z - p.z) / len, -(q.r - p.r) / len)
    }
}

/// Geometry of one mesh element.
pub fn compute_geometry(mesh: &PolyMesh, element: usize) -> Result<ElementGeometry> {
    ElementGeometry::from_vertices(&mesh.element_vertices(element)).map_err(|err| tag_element(err, element))
}

/// Shoelace area, positive for counter-clockwise polygons.
pub fn signed_area(vertices: &[Vertex]) -> f64 {
    let m = vertices.len();
    let mut twice = 0.0;
    for k in 0..m {
        let p = vertices[k];
        let q = vertices[(k + 1) % m];
        twice += p.r * q.z - q.r * p.z;
    }
    0.5 * twice
}

fn is_simple(vertices: &[Vertex]) -> bool {
    let m = vertices.len();
    for i in 0..m {
        let (a, b) = (vertices[i], vertices[(i + 1) % m]);
        for j in i + 1..m {
            // adjacent edges share a vertex
            if j == i + 1 || (i == 0 && j == m - 1) {
                continue;
            }
            let (c, d) = (vertices[j], vertices[(j + 1) % m]);
            if segments_intersect(a, b, c, d) {
                return false;
            }
        }
    }
    true
}

fn orient(a: Vertex, b: Vertex, c: Vertex) -> f64 {
    (b.r - a.r) * (c.z - a.z) - (b.z - a.z) * (c.r - a.r)
}

fn on_segment(a: Vertex, b: Vertex, p: Vertex) -> bool {
    p.r >= a.r.min(b.r) && p.r <= a.r.max(b.r) && p.z >= a.z.min(b.z) && p.z <= a.z.max(b.z)
}

fn segments_intersect(a: Vertex, b: Vertex, c: Vertex, d: Vertex) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if ((o1 > 0.0 && o2 < 0.0) || (o1 < 0.0 && o2 > 0.0)) && ((o3 > 0.0 && o4 < 0.0) || (o3 < 0.0 && o4 > 0.0)) {
        return true;
    }
    (o1 == 0.0 && on_segment(a, b, c))
        || (o2 == 0.0 && on_segment(a, b, d))
        || (o3 == 0.0 && on_segment(c, d, a))
        || (o4 == 0.0 && on_segment(c, d, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn square(r0: f64, z0: f64, s: f64) -> Vec<Vertex> {
        vec![
            Vertex::new(r0, z0),
            Vertex::new(r0 + s, z0),
            Vertex::new(r0 + s, z0 + s),
            Vertex::new(r0, z0 + s),
        ]
    }

    #[test]
    fn structured_mesh_counts() {
        let mesh = generate_structured_mesh(1.0, 3.0, 0.0, 2.0, 4, 4).unwrap();
        assert_eq!(mesh.node_count(), 25);
        assert_eq!(mesh.element_count(), 16);
        assert_eq!(mesh.boundary_edges().len(), 16);
        assert_eq!(mesh.boundary_nodes().len(), 16);

        let single = generate_structured_mesh(1.0, 2.0, 0.0, 1.0, 1, 1).unwrap();
        assert_eq!(single.node_count(), 4);
        assert_eq!(single.element_count(), 1);
        assert_eq!(single.boundary_edges().len(), 4);
    }

    #[test]
    fn two_cells_share_one_edge() {
        let mesh = generate_structured_mesh(1.0, 3.0, 0.0, 2.0, 2, 1).unwrap();
        assert_eq!(mesh.node_count(), 6);
        assert_eq!(mesh.element_count(), 2);
        // 7 distinct edges, one interior
        assert_eq!(mesh.boundary_edges().len(), 6);
        assert!(mesh.find_boundary_edge(1, 4).is_none());
        assert!(mesh.find_boundary_edge(0, 1).is_some());
    }

    #[test]
    fn rejects_axis_touching_domain() {
        assert!(generate_structured_mesh(0.0, 1.0, 0.0, 1.0, 2, 2).is_err());
        assert!(generate_structured_mesh(-1.0, 1.0, 0.0, 1.0, 2, 2).is_err());
        assert!(generate_structured_mesh(1.0, 1.0, 0.0, 1.0, 2, 2).is_err());
        assert!(generate_structured_mesh(1.0, 2.0, 0.0, 1.0, 0, 2).is_err());
    }

    #[test]
    fn square_geometry() {
        let g = ElementGeometry::from_vertices(&square(1.0, 0.0, 0.5)).unwrap();
        assert_relative_eq!(g.area, 0.25, epsilon = 1e-15);
        assert_relative_eq!(g.centroid.r, 1.25, epsilon = 1e-15);
        assert_relative_eq!(g.centroid.z, 0.25, epsilon = 1e-15);
        assert_relative_eq!(g.weighted_volume, 0.3125, epsilon = 1e-15);
        assert_relative_eq!(g.diameter, 0.5 * 2f64.sqrt(), epsilon = 1e-15);

        let big = ElementGeometry::from_vertices(&square(1.0, 0.0, 2.0)).unwrap();
        assert_relative_eq!(big.weighted_volume, 8.0, epsilon = 1e-14);
    }

    #[test]
    fn triangle_weighted_volume() {
        let tri = [Vertex::new(1.0, 0.0), Vertex::new(2.0, 0.0), Vertex::new(1.0, 1.0)];
        let g = ElementGeometry::from_vertices(&tri).unwrap();
        assert_relative_eq!(g.area, 0.5, epsilon = 1e-15);
        assert_relative_eq!(g.weighted_volume, 2.0 / 3.0, epsilon = 1e-15);
        let fan_sum: f64 = g.triangles.iter().map(|t| t.weighted_volume).sum();
        assert_relative_eq!(fan_sum, g.weighted_volume, epsilon = 1e-15);
    }

    #[test]
    fn clockwise_input_is_normalized() {
        let mut v = square(1.0, 0.0, 1.0);
        let mesh = PolyMesh::new(v.clone(), vec![vec![3, 2, 1, 0]]).unwrap();
        assert_eq!(mesh.elements()[0].vertex_ids(), &[0, 1, 2, 3]);
        let g = mesh.geometry(0).unwrap();
        assert!(g.area > 0.0);

        v.reverse();
        assert!(signed_area(&v) < 0.0);
        assert!(ElementGeometry::from_vertices(&v).is_err());
    }

    #[test]
    fn rejects_degenerate_and_bowtie() {
        let flat = vec![Vertex::new(1.0, 0.0), Vertex::new(2.0, 0.0), Vertex::new(3.0, 0.0)];
        assert!(matches!(
            PolyMesh::new(flat, vec![vec![0, 1, 2]]),
            Err(VemError::DegenerateElement { element: 0, .. })
        ));
        // Bow-tie with positive net area
        let bow = vec![
            Vertex::new(1.0, 0.0),
            Vertex::new(3.0, 0.0),
            Vertex::new(1.0, 2.0),
            Vertex::new(2.5, 2.5),
        ];
        assert!(signed_area(&bow) > 0.0);
        assert!(matches!(
            PolyMesh::new(bow, vec![vec![0, 1, 2, 3]]),
            Err(VemError::SelfIntersecting { element: 0 })
        ));
    }

    #[test]
    fn rejects_overlapping_and_dangling_elements() {
        let v = square(1.0, 0.0, 1.0);
        assert!(PolyMesh::new(v.clone(), vec![vec![0, 1, 2, 3], vec![0, 1, 2, 3]]).is_err());
        assert!(PolyMesh::new(v.clone(), vec![vec![0, 1, 7]]).is_err());
        assert!(PolyMesh::new(v, vec![vec![0, 1]]).is_err());
    }

    #[test]
    fn outward_normals_point_away_from_centroid() {
        let g = ElementGeometry::from_vertices(&square(1.0, 0.0, 1.0)).unwrap();
        for k in 0..4 {
            let (p, q) = g.edge(k);
            let (nr, nz) = g.outward_normal(k);
            let mid = Vertex::new(0.5 * (p.r + q.r), 0.5 * (p.z + q.z));
            assert!((mid.r - g.centroid.r) * nr + (mid.z - g.centroid.z) * nz > 0.0);
        }
    }
}
