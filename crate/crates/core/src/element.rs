//! Element-level kernels of the first-order axisymmetric virtual element.
//!
//! For an element E with m vertices the local space has 2m dofs, interleaved
//! as `u_r(v_0), u_z(v_0), u_r(v_1), ...`. The projection onto constant
//! strains is computed from the r-weighted energy identity
//!
//! ```text
//! (Π v)ᵀ C e_p ∫_E r = ∮ v · (C e_p) n r ds − ∫_E v · div(C e_p) r
//! ```
//!
//! where the boundary term only needs the piecewise-linear trace of `v` and
//! the volume term (constant stresses have a non-zero cylindrical divergence)
//! is integrated on the centroid fan. Solving the 4×4 system for every unit
//! dof gives the 4×2m matrix B with `Π v = B d`.
//!
//! The stiffness is `K = K_c + K_s` with `K_c = Bᵀ C B ∫_E r` and a boundary
//! stabilization acting on the complement of a projector P.

use nalgebra::{DMatrix, DVector, Matrix3, Matrix4, Vector3};

use crate::error::{Result, VemError};
use crate::material::{ConstitutiveMatrix, Material};
use crate::mesh::{ElementGeometry, Vertex};
use crate::quadrature::EdgeRule;

/// Relative singular-value cutoff of the pseudoinverse.
pub const PINV_TOL: f64 = 1e-12;

/// How the volume term of the projection is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProjectionVariant {
    /// Fan integral of the piecewise-linear interpolant with a
    /// linear-reproducing centroid value; both divergence rows are kept.
    /// B is exact on every linear displacement field.
    #[default]
    Consistent,
    /// Vertex shape functions averaged as `(1 + 1/m)/3` over the two fan
    /// triangles touching the vertex, radial rows only, and the shear entry
    /// of the axial-dof right-hand side forced to zero.
    Literal,
}

type LinearField = fn(f64, f64) -> (f64, f64);

/// Subspace on which the stabilization vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProjectorKind {
    /// Row space of B plus the rigid axial translation.
    #[default]
    StrainRowSpace,
    /// Nodal interpolants of `(1,0), (0,1), (r,0), (0,z), (z,r)`.
    LinearFields,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ElementOptions {
    /// Stabilization scale; defaults to the shear modulus.
    pub tau: Option<f64>,
    /// Drop the 2π factor from the stabilization.
    pub two_pi_normalization: bool,
    pub variant: ProjectionVariant,
    pub projector: ProjectorKind,
}

impl ElementOptions {
    pub fn stabilization_parameter(&self, material: &Material) -> f64 {
        self.tau.unwrap_or(material.lame_mu)
    }
}

#[derive(Debug, Clone)]
pub struct ElementKernels {
    /// 4×2m, strain per unit dof.
    pub b: DMatrix<f64>,
    /// 2m×4, boundary integrals minus volume term (before scaling by ∫ r).
    pub rhs_matrix: DMatrix<f64>,
    /// 2m×2m projector used by the stabilization.
    pub p: DMatrix<f64>,
    pub k_c: DMatrix<f64>,
    pub k_s: DMatrix<f64>,
    pub k: DMatrix<f64>,
    pub tau: f64,
    pub weighted_volume: f64,
}

/// Dof vector of the rigid axial translation `u_z ≡ 1`.
pub fn axial_translation(m: usize) -> DVector<f64> {
    DVector::from_fn(2 * m, |i, _| if i % 2 == 1 { 1.0 } else { 0.0 })
}

/// Nodal values of a displacement field.
pub fn nodal_values<F>(vertices: &[Vertex], field: F) -> DVector<f64>
where
    F: Fn(Vertex) -> (f64, f64),
{
    let mut d = DVector::zeros(2 * vertices.len());
    for (i, &v) in vertices.iter().enumerate() {
        let (ur, uz) = field(v);
        d[2 * i] = ur;
        d[2 * i + 1] = uz;
    }
    d
}

/// Boundary term contributed by a single edge: rows are the four edge dofs
/// `(u_r(p), u_z(p), u_r(q), u_z(q))`, columns the four basis strains.
pub fn edge_boundary_block(
    p: Vertex,
    q: Vertex,
    normal: (f64, f64),
    rule: EdgeRule,
    c: &ConstitutiveMatrix,
) -> Result<Matrix4<f64>> {
    let len = p.distance(&q);
    if !(len > 0.0) {
        return Err(VemError::ZeroLengthEdge {
            r1: p.r,
            z1: p.z,
            r2: q.r,
            z2: q.z,
        });
    }
    let (nr, nz) = normal;
    let mut block = Matrix4::zeros();
    for basis in 0..4 {
        let s = c.basis_stress(basis);
        let t_r = s[0] * nr + s[2] * nz;
        let t_z = s[2] * nr + s[1] * nz;
        for &(sq, w) in rule.points() {
            let r = p.r + sq * (q.r - p.r);
            for (a, shape) in [1.0 - sq, sq].into_iter().enumerate() {
                let f = w * shape * r * len;
                block[(2 * a, basis)] += f * t_r;
                block[(2 * a + 1, basis)] += f * t_z;
            }
        }
    }
    Ok(block)
}

/// `∮ v_j · (C e_p) n r ds` for every unit dof j (rows) and basis p (columns).
///
/// Each unit-dof field is the hat function of its vertex on the two adjacent
/// edges and vanishes elsewhere on the boundary.
pub fn boundary_integral_matrix(geom: &ElementGeometry, c: &ConstitutiveMatrix) -> Result<DMatrix<f64>> {
    let m = geom.vertex_count();
    let mut out = DMatrix::zeros(2 * m, 4);
    for k in 0..m {
        let (p, q) = geom.edge(k);
        let rule = EdgeRule::for_edge(p, q, geom.diameter);
        let block = edge_boundary_block(p, q, geom.outward_normal(k), rule, c)?;
        for (a, node) in [k, (k + 1) % m].into_iter().enumerate() {
            for comp in 0..2 {
                for basis in 0..4 {
                    out[(2 * node + comp, basis)] += block[(2 * a + comp, basis)];
                }
            }
        }
    }
    Ok(out)
}

/// Vertex weights `λ` with `Σλ = 1` and `Σλ x_i = centroid`, of minimum norm.
///
/// They define the value of the virtual field at the fan apex, and reduce to
/// `1/m` when the centroid coincides with the vertex mean.
pub fn centroid_weights(geom: &ElementGeometry) -> Vec<f64> {
    let c = geom.centroid;
    let rows: Vec<Vector3<f64>> = geom
        .vertices
        .iter()
        .map(|v| Vector3::new(1.0, v.r - c.r, v.z - c.z))
        .collect();
    let gram: Matrix3<f64> = rows.iter().map(|a| a * a.transpose()).sum();
    let y = gram
        .cholesky()
        .map(|ch| ch.solve(&Vector3::new(1.0, 0.0, 0.0)))
        .unwrap_or_else(|| Vector3::new(1.0 / geom.vertex_count() as f64, 0.0, 0.0));
    rows.iter().map(|a| a.dot(&y)).collect()
}

/// Approximations of `∫_E N_i dr dz` for every vertex shape function.
pub fn vertex_shape_integrals(geom: &ElementGeometry, variant: ProjectionVariant) -> Vec<f64> {
    let m = geom.vertex_count();
    let mut out = vec![0.0; m];
    match variant {
        ProjectionVariant::Consistent => {
            let apex = centroid_weights(geom);
            for tri in &geom.triangles {
                let third = tri.area / 3.0;
                out[tri.edge] += third;
                out[(tri.edge + 1) % m] += third;
                for (o, w) in out.iter_mut().zip(&apex) {
                    *o += third * w;
                }
            }
        }
        ProjectionVariant::Literal => {
            let avg = (1.0 + 1.0 / m as f64) / 3.0;
            for tri in &geom.triangles {
                out[tri.edge] += avg * tri.area;
                out[(tri.edge + 1) % m] += avg * tri.area;
            }
        }
    }
    out
}

/// `∫_E v_j · div(C e_p) r dr dz` for every unit dof j and basis p.
///
/// The cylindrical divergence of a constant stress is
/// `((σ_r − σ_θ)/r, τ_rz/r)`, so the r weight cancels and only `∫_E v` is
/// needed. The literal variant keeps the radial row only.
pub fn volumetric_correction_matrix(
    geom: &ElementGeometry,
    c: &ConstitutiveMatrix,
    variant: ProjectionVariant,
) -> DMatrix<f64> {
    let m = geom.vertex_count();
    let integrals = vertex_shape_integrals(geom, variant);
    let mut out = DMatrix::zeros(2 * m, 4);
    for basis in 0..4 {
        let s = c.basis_stress(basis);
        let radial = s[0] - s[3];
        let axial = match variant {
            ProjectionVariant::Consistent => s[2],
            ProjectionVariant::Literal => 0.0,
        };
        for (i, &integral) in integrals.iter().enumerate() {
            out[(2 * i, basis)] = radial * integral;
            out[(2 * i + 1, basis)] = axial * integral;
        }
    }
    out
}

/// Projection matrix B (4×2m) and the unscaled right-hand side (2m×4).
pub fn build_b(
    geom: &ElementGeometry,
    c: &ConstitutiveMatrix,
    variant: ProjectionVariant,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let mut rhs = boundary_integral_matrix(geom, c)? - volumetric_correction_matrix(geom, c, variant);
    if variant == ProjectionVariant::Literal {
        for j in (1..rhs.nrows()).step_by(2) {
            rhs[(j, 2)] = 0.0;
        }
    }
    // Row p of the system matrix is (C e_p)ᵀ.
    let system = DMatrix::from_fn(4, 4, |p, q| c.matrix()[(q, p)]);
    let qr = system.qr();
    if !qr.is_invertible() {
        return Err(VemError::SingularConstitutive);
    }
    let scaled = rhs.transpose() / geom.weighted_volume;
    let b = qr.solve(&scaled).ok_or(VemError::SingularConstitutive)?;
    Ok((b, rhs))
}

/// `K_c = Bᵀ C B ∫_E r`.
pub fn consistency_stiffness(b: &DMatrix<f64>, c: &ConstitutiveMatrix, weighted_volume: f64) -> DMatrix<f64> {
    let c = DMatrix::from_fn(4, 4, |i, j| c.matrix()[(i, j)]);
    symmetrize(b.transpose() * c * b * weighted_volume)
}

/// Orthogonal projector `Qᵀ (Q Qᵀ)† Q` onto the row space of `rows`.
///
/// Computed as `V_r V_rᵀ` from the right singular vectors whose singular
/// values exceed `PINV_TOL · σ_max`.
pub fn projector_p(rows: &DMatrix<f64>) -> DMatrix<f64> {
    let n = rows.ncols();
    let svd = rows.clone().svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let cutoff = PINV_TOL * svd.singular_values.max();
    let mut p = DMatrix::zeros(n, n);
    for (k, &sigma) in svd.singular_values.iter().enumerate() {
        if sigma > cutoff {
            let v = v_t.row(k).transpose();
            p += &v * v.transpose();
        }
    }
    symmetrize(p)
}

/// Projector whose range the stabilization leaves untouched.
pub fn stabilization_projector(geom: &ElementGeometry, b: &DMatrix<f64>, kind: ProjectorKind) -> DMatrix<f64> {
    let m = geom.vertex_count();
    match kind {
        ProjectorKind::StrainRowSpace => {
            // Scale the translation row like the strain rows so the
            // pseudoinverse cutoff treats them alike.
            let scale = (0..b.nrows()).map(|i| b.row(i).norm()).fold(0.0, f64::max);
            let dz = axial_translation(m).normalize() * scale;
            let mut q = b.clone().insert_row(b.nrows(), 0.0);
            q.row_mut(b.nrows()).copy_from(&dz.transpose());
            projector_p(&q)
        }
        ProjectorKind::LinearFields => {
            let c = geom.centroid;
            let fields: [LinearField; 5] = [
                |_, _| (1.0, 0.0),
                |_, _| (0.0, 1.0),
                |r, _| (r, 0.0),
                |_, z| (0.0, z),
                |r, z| (z, r),
            ];
            let mut q = DMatrix::zeros(fields.len(), 2 * m);
            for (i, f) in fields.iter().enumerate() {
                let d = nodal_values(&geom.vertices, |v| f(v.r - c.r, v.z - c.z));
                q.row_mut(i).copy_from(&d.normalize().transpose());
            }
            projector_p(&q)
        }
    }
}

/// Boundary mass `Σ_e Σ_q f r_q w_q N Nᵀ |e|` on the full 2m dof space, with
/// `f = 2π` unless normalized away. Radial and axial components decouple.
pub fn edge_mass_matrix(geom: &ElementGeometry, two_pi_normalization: bool) -> DMatrix<f64> {
    let m = geom.vertex_count();
    let factor = if two_pi_normalization {
        1.0
    } else {
        2.0 * std::f64::consts::PI
    };
    let mut mass = DMatrix::zeros(2 * m, 2 * m);
    for k in 0..m {
        let (p, q) = geom.edge(k);
        let len = p.distance(&q);
        let nodes = [k, (k + 1) % m];
        for &(s, w) in EdgeRule::for_edge(p, q, geom.diameter).points() {
            let r = p.r + s * (q.r - p.r);
            let shape = [1.0 - s, s];
            let scale = factor * r * w * len;
            for a in 0..2 {
                for b in 0..2 {
                    let v = scale * shape[a] * shape[b];
                    for comp in 0..2 {
                        mass[(2 * nodes[a] + comp, 2 * nodes[b] + comp)] += v;
                    }
                }
            }
        }
    }
    mass
}

/// `K_s = τ h_E⁻¹ (I − P)ᵀ M (I − P)` with M from [`edge_mass_matrix`].
pub fn stabilization_stiffness(
    geom: &ElementGeometry,
    p: &DMatrix<f64>,
    tau: f64,
    two_pi_normalization: bool,
) -> DMatrix<f64> {
    let n = p.nrows();
    let complement = DMatrix::identity(n, n) - p;
    let mass = edge_mass_matrix(geom, two_pi_normalization);
    symmetrize(complement.transpose() * mass * complement * (tau / geom.diameter))
}

/// All kernels of one element.
pub fn local_stiffness(
    geom: &ElementGeometry,
    material: &Material,
    options: &ElementOptions,
) -> Result<ElementKernels> {
    let tau = options.stabilization_parameter(material);
    if !(tau > 0.0) {
        return Err(VemError::InvalidMaterial(format!(
            "stabilization parameter must be positive, got {tau}"
        )));
    }
    let c = material.constitutive_matrix();
    let (b, rhs_matrix) = build_b(geom, &c, options.variant)?;
    let k_c = consistency_stiffness(&b, &c, geom.weighted_volume);
    let p = stabilization_projector(geom, &b, options.projector);
    let k_s = stabilization_stiffness(geom, &p, tau, options.two_pi_normalization);
    let k = symmetrize(&k_c + &k_s);
    Ok(ElementKernels {
        b,
        rhs_matrix,
        p,
        k_c,
        k_s,
        k,
        tau,
        weighted_volume: geom.weighted_volume,
    })
}

fn symmetrize(a: DMatrix<f64>) -> DMatrix<f64> {
    (&a + a.transpose()) * 0.5
}
