use crate::error::{ensure_positive, Error, Result};

/// Uniform 1D mesh on `[a, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh1D {
    nodes: Vec<f64>,
    dx: f64,
}

/// Relative tolerance for matching a coordinate to a node.
const NODE_TOL: f64 = 1e-9;

impl Mesh1D {
    pub fn uniform(a: f64, b: f64, n_elements: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::invalid("domain", format!("need a < b, got ({a}, {b})")));
        }
        if n_elements < 2 {
            return Err(Error::invalid("n_elements", format!("need at least 2, got {n_elements}")));
        }
        let dx = (b - a) / n_elements as f64;
        let mut nodes: Vec<f64> = (0..=n_elements).map(|i| a + i as f64 * dx).collect();
        nodes[n_elements] = b;
        Ok(Self { nodes, dx })
    }

    /// Mesh with spacing `dx`, which must divide `b - a`.
    pub fn with_spacing(a: f64, b: f64, dx: f64) -> Result<Self> {
        ensure_positive("dx", dx)?;
        let count = (b - a) / dx;
        let n = count.round();
        if n < 1.0 || (count - n).abs() > NODE_TOL * n.max(1.0) {
            return Err(Error::invalid("dx", format!("{dx} does not divide the domain length {}", b - a)));
        }
        Self::uniform(a, b, n as usize)
    }

    pub fn a(&self) -> f64 {
        self.nodes[0]
    }

    pub fn b(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_elements(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn element_length(&self, e: usize) -> f64 {
        self.nodes[e + 1] - self.nodes[e]
    }

    pub fn element_midpoint(&self, e: usize) -> f64 {
        0.5 * (self.nodes[e] + self.nodes[e + 1])
    }

    /// Index of the node at `x`.
    pub fn node_index(&self, x: f64, what: &'static str) -> Result<usize> {
        let k = ((x - self.a()) / self.dx).round();
        if k >= 0.0 && (k as usize) < self.nodes.len() {
            let i = k as usize;
            if (self.nodes[i] - x).abs() <= NODE_TOL * self.dx {
                return Ok(i);
            }
        }
        Err(Error::NotAMeshNode { what, x })
    }

    /// Sub-mesh over nodes `first..=last`.
    pub fn sub_mesh(&self, first: usize, last: usize) -> Result<Self> {
        if last > self.n_elements() || last < first + 1 {
            return Err(Error::invalid("sub_mesh", format!("invalid node range {first}..={last}")));
        }
        Ok(Self {
            nodes: self.nodes[first..=last].to_vec(),
            dx: self.dx,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_nodes() {
        let m = Mesh1D::uniform(0.0, 1.0, 4).unwrap();
        assert_eq!(m.nodes(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(m.n_elements(), 4);
        assert!(m.nodes().windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn spacing_must_divide() {
        assert_eq!(Mesh1D::with_spacing(0.0, 1.0, 1.0 / 40.0).unwrap().n_elements(), 40);
        assert!(Mesh1D::with_spacing(0.0, 1.0, 0.3).is_err());
        assert!(Mesh1D::with_spacing(0.0, 1.0, 0.0).is_err());
        assert!(Mesh1D::uniform(0.0, 1.0, 1).is_err());
        assert!(Mesh1D::uniform(1.0, 0.0, 4).is_err());
    }

    #[test]
    fn node_lookup() {
        let m = Mesh1D::with_spacing(0.0, 1.0, 0.01).unwrap();
        assert_eq!(m.node_index(0.2, "x").unwrap(), 20);
        assert_eq!(m.node_index(0.4, "x").unwrap(), 40);
        let coarse = Mesh1D::uniform(0.0, 1.0, 4).unwrap();
        assert!(matches!(coarse.node_index(0.3, "x"), Err(Error::NotAMeshNode { .. })));
        assert!(coarse.node_index(1.5, "x").is_err());
    }

    #[test]
    fn sub_mesh_shares_nodes() {
        let m = Mesh1D::uniform(0.0, 1.0, 4).unwrap();
        let s = m.sub_mesh(2, 4).unwrap();
        assert_eq!(s.nodes(), &[0.5, 0.75, 1.0]);
        assert!(m.sub_mesh(2, 2).is_err());
    }
}
