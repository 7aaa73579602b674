use crate::error::Result;
use crate::heat::{DiffusionField, MassKind, Mesh1D, Tridiagonal};

/// P1 mass and stiffness matrices, before boundary conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct Operators {
    pub mass: Tridiagonal,
    pub stiffness: Tridiagonal,
}

pub fn assemble_operators(mesh: &Mesh1D, diffusion: &DiffusionField, mass: MassKind) -> Result<Operators> {
    let nu = diffusion.element_values(mesh)?;
    Ok(assemble_with_elements(mesh, &nu, mass))
}

/// Assembly from per-element coefficients.
pub fn assemble_with_elements(mesh: &Mesh1D, nu: &[f64], mass_kind: MassKind) -> Operators {
    assert_eq!(nu.len(), mesh.n_elements());
    let n = mesh.n_nodes();
    let mut mass = Tridiagonal::zeros(n);
    let mut stiffness = Tridiagonal::zeros(n);
    for (e, &nu_e) in nu.iter().enumerate() {
        let h = mesh.element_length(e);
        match mass_kind {
            MassKind::Consistent => {
                mass.diag[e] += h / 3.0;
                mass.diag[e + 1] += h / 3.0;
                mass.lower[e] += h / 6.0;
                mass.upper[e] += h / 6.0;
            }
            MassKind::Lumped => {
                mass.diag[e] += h / 2.0;
                mass.diag[e + 1] += h / 2.0;
            }
        }
        let k = nu_e / h;
        stiffness.diag[e] += k;
        stiffness.diag[e + 1] += k;
        stiffness.lower[e] -= k;
        stiffness.upper[e] -= k;
    }
    Operators { mass, stiffness }
}

/// Load vector `F_i = int f(x, t) phi_i dx` with two-point Gauss quadrature.
pub fn load_vector(mesh: &Mesh1D, f: &dyn Fn(f64, f64) -> f64, t: f64) -> Vec<f64> {
    let mut load = vec![0.0; mesh.n_nodes()];
    let offset = 0.5 / 3f64.sqrt();
    for e in 0..mesh.n_elements() {
        let (x0, h) = (mesh.nodes()[e], mesh.element_length(e));
        for s in [0.5 - offset, 0.5 + offset] {
            let w = 0.5 * h * f(x0 + s * h, t);
            load[e] += w * (1.0 - s);
            load[e + 1] += w * s;
        }
    }
    load
}
