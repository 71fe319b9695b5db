use serde::{Deserialize, Serialize};

use crate::grid::{CategoricalGrid, FaciesCode, Shape};

/// Neighbourhood used to decide whether two cells touch.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Connectivity {
    /// Edge neighbours only.
    #[serde(rename = "4")]
    Four,
    /// Edge and corner neighbours.
    #[default]
    #[serde(rename = "8")]
    Eight,
}

impl Connectivity {
    pub fn from_count(n: u8) -> Option<Self> {
        match n {
            4 => Some(Connectivity::Four),
            8 => Some(Connectivity::Eight),
            _ => None,
        }
    }

    pub fn as_count(self) -> u8 {
        match self {
            Connectivity::Four => 4,
            Connectivity::Eight => 8,
        }
    }
}

/// Component labels: 0 for background, `1..=count` for geobodies numbered in
/// raster order of their first cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeobodyLabeling {
    pub shape: Shape,
    pub labels: Vec<u32>,
    pub count: usize,
    pub connectivity: Connectivity,
}

struct DisjointSet {
    parent: Vec<u32>,
}

impl DisjointSet {
    fn make(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        id
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) -> u32 {
        let (ra, rb) = (self.find(a), self.find(b));
        let root = ra.min(rb);
        self.parent[ra.max(rb) as usize] = root;
        root
    }
}

/// Labels connected components of cells equal to `code` with a two-pass
/// union-find scan.
pub fn count_geobodies(grid: &CategoricalGrid, code: FaciesCode, connectivity: Connectivity) -> GeobodyLabeling {
    let shape = grid.shape();
    let (rows, cols) = (shape.n_rows, shape.n_cols);
    const NONE: u32 = u32::MAX;
    let mut provisional = vec![NONE; shape.len()];
    let mut sets = DisjointSet { parent: Vec::new() };

    for r in 0..rows {
        for c in 0..cols {
            let i = r * cols + c;
            if grid.cells()[i] != code {
                continue;
            }
            // already-visited neighbours: W, N, and for 8-connectivity NW and NE
            let mut label = NONE;
            let visit = |j: usize, label: &mut u32, sets: &mut DisjointSet| {
                let l = provisional[j];
                if l != NONE {
                    *label = if *label == NONE { sets.find(l) } else { sets.union(*label, l) };
                }
            };
            if c > 0 {
                visit(i - 1, &mut label, &mut sets);
            }
            if r > 0 {
                visit(i - cols, &mut label, &mut sets);
                if connectivity == Connectivity::Eight {
                    if c > 0 {
                        visit(i - cols - 1, &mut label, &mut sets);
                    }
                    if c + 1 < cols {
                        visit(i - cols + 1, &mut label, &mut sets);
                    }
                }
            }
            provisional[i] = if label == NONE { sets.make() } else { label };
        }
    }

    let mut final_id = vec![0u32; sets.parent.len()];
    let mut count = 0u32;
    let labels = provisional
        .into_iter()
        .map(|l| {
            if l == NONE {
                return 0;
            }
            let root = sets.find(l) as usize;
            if final_id[root] == 0 {
                count += 1;
                final_id[root] = count;
            }
            final_id[root]
        })
        .collect();

    GeobodyLabeling { shape, labels, count: count as usize, connectivity }
}
