use crate::error::{Error, Result};

/// Node-major vector holding `n_comp` values per mesh node.
///
/// Entry `(i, c)` lives at flat index `i * n_comp + c`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockVector {
    n_nodes: usize,
    n_comp: usize,
    data: Vec<f64>,
}

impl BlockVector {
    pub fn zeros(n_nodes: usize, n_comp: usize) -> Self {
        Self {
            n_nodes,
            n_comp,
            data: vec![0.0; n_nodes * n_comp],
        }
    }

    pub fn constant(n_nodes: usize, n_comp: usize, value: f64) -> Self {
        Self {
            n_nodes,
            n_comp,
            data: vec![value; n_nodes * n_comp],
        }
    }

    pub fn from_vec(n_comp: usize, data: Vec<f64>) -> Result<Self> {
        if n_comp == 0 || data.len() % n_comp != 0 {
            return Err(Error::ComponentCount {
                op: "BlockVector::from_vec",
                expected: n_comp,
                got: data.len(),
            });
        }
        if let Some(k) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                op: "BlockVector::from_vec",
                index: k,
            });
        }
        Ok(Self {
            n_nodes: data.len() / n_comp,
            n_comp,
            data,
        })
    }

    /// Scalar vector (one component per node).
    pub fn scalar(data: Vec<f64>) -> Result<Self> {
        Self::from_vec(1, data)
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn n_comp(&self) -> usize {
        self.n_comp
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, node: usize, comp: usize) -> f64 {
        self.data[node * self.n_comp + comp]
    }

    #[inline]
    pub fn set(&mut self, node: usize, comp: usize, value: f64) {
        self.data[node * self.n_comp + comp] = value;
    }

    /// All components of one node.
    pub fn node(&self, node: usize) -> &[f64] {
        &self.data[node * self.n_comp..(node + 1) * self.n_comp]
    }

    /// Copies component `comp` into a scalar vector.
    pub fn component(&self, comp: usize) -> BlockVector {
        let data = self.data.iter().skip(comp).step_by(self.n_comp).copied().collect();
        BlockVector {
            n_nodes: self.n_nodes,
            n_comp: 1,
            data,
        }
    }

    /// Overwrites component `comp` from a scalar vector.
    pub fn set_component(&mut self, comp: usize, values: &BlockVector) -> Result<()> {
        if values.n_comp != 1 {
            return Err(Error::ComponentCount {
                op: "BlockVector::set_component",
                expected: 1,
                got: values.n_comp,
            });
        }
        if values.n_nodes != self.n_nodes {
            return Err(Error::dim("BlockVector::set_component", self.n_nodes, values.n_nodes));
        }
        for (i, &v) in values.data.iter().enumerate() {
            self.data[i * self.n_comp + comp] = v;
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn node_major_layout() {
        let v = BlockVector::from_vec(3, (0..6).map(f64::from).collect()).unwrap();
        assert_eq!(v.n_nodes(), 2);
        assert_eq!(v.get(1, 0), 3.0);
        assert_eq!(v.node(1), &[3.0, 4.0, 5.0]);
        assert_eq!(v.component(2).as_slice(), &[2.0, 5.0]);
    }

    #[test]
    fn rejects_ragged_and_nan() {
        assert!(BlockVector::from_vec(3, vec![0.0; 4]).is_err());
        assert!(BlockVector::from_vec(1, vec![f64::NAN]).is_err());
    }

    #[test]
    fn set_component_roundtrip() {
        let mut v = BlockVector::zeros(2, 3);
        let c = BlockVector::scalar(vec![7.0, 8.0]).unwrap();
        v.set_component(1, &c).unwrap();
        assert_eq!(v.as_slice(), &[0.0, 7.0, 0.0, 0.0, 8.0, 0.0]);
        assert_eq!(v.component(1), c);
    }
}
