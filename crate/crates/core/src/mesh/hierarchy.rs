use super::tree::HierMesh;

/// Multigrid mesh levels, coarsest first. All levels share one tree, so
/// node ids agree across levels.
#[derive(Debug, Clone)]
pub struct MeshHierarchy {
    pub levels: Vec<HierMesh>,
}

impl MeshHierarchy {
    pub fn n_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn finest(&self) -> &HierMesh {
        self.levels.last().expect("hierarchy has at least one level")
    }

    pub fn coarsest(&self) -> &HierMesh {
        &self.levels[0]
    }
}

/// Coarsens `fine` repeatedly until it has at most `coarse_target` active
/// elements or nothing more can be merged.
pub fn build_hierarchy(fine: &HierMesh, coarse_target: usize) -> MeshHierarchy {
    let mut levels = vec![fine.clone()];
    loop {
        let last = levels.last().unwrap();
        let n = last.n_active();
        if n <= coarse_target {
            break;
        }
        let c = last.global_coarsen();
        if c.n_active() >= n {
            break;
        }
        levels.push(c);
    }
    levels.reverse();
    MeshHierarchy { levels }
}
