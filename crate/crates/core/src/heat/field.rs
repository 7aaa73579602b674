use crate::heat::Mesh1D;

/// Nodal values at time levels `0..=n_steps`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeField {
    mesh: Mesh1D,
    time_step: f64,
    values: Vec<f64>,
}

impl SpaceTimeField {
    /// Field with `initial` at level 0 and zeros elsewhere.
    pub fn new(mesh: Mesh1D, time_step: f64, n_steps: usize, initial: &[f64]) -> Self {
        let n = mesh.n_nodes();
        assert_eq!(initial.len(), n);
        let mut values = vec![0.0; n * (n_steps + 1)];
        values[..n].copy_from_slice(initial);
        Self {
            mesh,
            time_step,
            values,
        }
    }

    pub fn mesh(&self) -> &Mesh1D {
        &self.mesh
    }

    pub fn time_step(&self) -> f64 {
        self.time_step
    }

    pub fn n_nodes(&self) -> usize {
        self.mesh.n_nodes()
    }

    pub fn n_steps(&self) -> usize {
        self.values.len() / self.n_nodes() - 1
    }

    pub fn level(&self, n: usize) -> &[f64] {
        let m = self.n_nodes();
        &self.values[n * m..(n + 1) * m]
    }

    pub fn level_mut(&mut self, n: usize) -> &mut [f64] {
        let m = self.n_nodes();
        &mut self.values[n * m..(n + 1) * m]
    }

    /// Levels `n - 1` and `n` (mutable), `n >= 1`.
    pub(crate) fn step_pair(&mut self, n: usize) -> (&[f64], &mut [f64]) {
        let m = self.n_nodes();
        let (head, tail) = self.values.split_at_mut(n * m);
        (&head[(n - 1) * m..], &mut tail[..m])
    }

    pub fn value(&self, n: usize, i: usize) -> f64 {
        self.values[n * self.n_nodes() + i]
    }

    pub fn final_level(&self) -> &[f64] {
        self.level(self.n_steps())
    }

    /// Time series at node `i` for levels `1..=n_steps`.
    pub fn node_series(&self, i: usize) -> Vec<f64> {
        (1..=self.n_steps()).map(|n| self.value(n, i)).collect()
    }

    /// Restriction to nodes `first..=last`.
    pub fn restrict(&self, first: usize, last: usize) -> SpaceTimeField {
        let mesh = self.mesh.sub_mesh(first, last).expect("valid node range");
        let values = (0..=self.n_steps())
            .flat_map(|n| self.level(n)[first..=last].iter().copied())
            .collect();
        SpaceTimeField {
            mesh,
            time_step: self.time_step,
            values,
        }
    }

    /// Largest `|self - other|` over nodes at levels `1..=n_steps`, where
    /// `other` covers this field starting at global node `offset`.
    pub fn max_abs_diff_from(&self, other: &SpaceTimeField, offset: usize) -> f64 {
        assert_eq!(self.n_steps(), other.n_steps());
        let m = self.n_nodes();
        let mut max = 0.0f64;
        for n in 1..=self.n_steps() {
            let a = self.level(n);
            let b = &other.level(n)[offset..offset + m];
            for (x, y) in a.iter().zip(b) {
                let d = (x - y).abs();
                if d.is_nan() {
                    return f64::NAN;
                }
                max = max.max(d);
            }
        }
        max
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}
