//! Metric neighborhoods `N_i = { j != i : |p_j - p_i| <= r }`.
//!
//! Two builders produce identical tables: an all-pairs scan used as the
//! reference, and a uniform grid with cell size `r` that only inspects the
//! `3^m` cells around each agent. Both use the same inclusive predicate
//! on squared distances, and lists come back sorted by id so downstream
//! force sums have a fixed accumulation order.

use std::borrow::Borrow;
use std::collections::HashMap;

use crate::vector::VectorM;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NeighborTable {
    lists: Vec<Vec<usize>>,
}

impl NeighborTable {
    /// Wraps per-agent lists; each list is sorted and deduplicated.
    pub fn from_lists(mut lists: Vec<Vec<usize>>) -> Self {
        for l in &mut lists {
            l.sort_unstable();
            l.dedup();
        }
        Self { lists }
    }

    pub fn len(&self) -> usize {
        self.lists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lists.is_empty()
    }

    /// Neighbor ids of agent `i`, ascending.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.lists[i]
    }

    /// `|N_i|`
    pub fn count(&self, i: usize) -> usize {
        self.lists[i].len()
    }

    pub fn counts(&self) -> impl Iterator<Item = usize> + '_ {
        self.lists.iter().map(Vec::len)
    }

    pub fn is_symmetric(&self) -> bool {
        self.lists
            .iter()
            .enumerate()
            .all(|(i, l)| l.iter().all(|&j| self.lists[j].binary_search(&i).is_ok()))
    }
}

#[inline]
fn within(a: &VectorM, b: &VectorM, r_sq: f64) -> bool {
    a.distance_squared(b) <= r_sq
}

/// Exact all-pairs neighbor table. O(n^2).
pub fn build_neighbors_naive<P: Borrow<VectorM>>(positions: &[P], r: f64) -> NeighborTable {
    let r_sq = r * r;
    let n = positions.len();
    let mut lists = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            if within(positions[i].borrow(), positions[j].borrow(), r_sq) {
                lists[i].push(j);
                lists[j].push(i);
            }
        }
    }
    NeighborTable::from_lists(lists)
}

/// Uniform grid of cubic cells, keyed by `floor(component / cell_size)`.
#[derive(Debug, Clone)]
pub struct UniformGrid {
    cell_size: f64,
    cells: HashMap<Vec<i64>, Vec<usize>>,
}

impl UniformGrid {
    pub fn build<P: Borrow<VectorM>>(positions: &[P], cell_size: f64) -> Self {
        debug_assert!(cell_size > 0.0);
        let mut cells: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        for (i, p) in positions.iter().enumerate() {
            cells
                .entry(Self::cell_of(p.borrow(), cell_size))
                .or_default()
                .push(i);
        }
        Self { cell_size, cells }
    }

    pub fn cell_of(p: &VectorM, cell_size: f64) -> Vec<i64> {
        p.components()
            .iter()
            .map(|c| (c / cell_size).floor() as i64)
            .collect()
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn cell(&self, key: &[i64]) -> &[usize] {
        self.cells.get(key).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn occupied_cells(&self) -> usize {
        self.cells.len()
    }

    /// Calls `f` with every agent id stored in the `3^m` cells around `center`.
    pub fn for_each_candidate(&self, center: &[i64], mut f: impl FnMut(usize)) {
        let m = center.len();
        let mut offset = vec![-1i64; m];
        let mut key = vec![0i64; m];
        loop {
            for d in 0..m {
                key[d] = center[d] + offset[d];
            }
            if let Some(ids) = self.cells.get(&key) {
                ids.iter().for_each(|&j| f(j));
            }
            // odometer over {-1, 0, 1}^m
            let mut d = 0;
            while d < m && offset[d] == 1 {
                offset[d] = -1;
                d += 1;
            }
            if d == m {
                break;
            }
            offset[d] += 1;
        }
    }
}

/// Grid-accelerated neighbor table; equal to [`build_neighbors_naive`].
pub fn build_neighbors_grid<P: Borrow<VectorM>>(positions: &[P], r: f64) -> NeighborTable {
    let r_sq = r * r;
    let grid = UniformGrid::build(positions, r);
    let lists = positions
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let p = p.borrow();
            let mut list = Vec::new();
            grid.for_each_candidate(&UniformGrid::cell_of(p, r), |j| {
                if j != i && within(p, positions[j].borrow(), r_sq) {
                    list.push(j);
                }
            });
            list
        })
        .collect();
    NeighborTable::from_lists(lists)
}
