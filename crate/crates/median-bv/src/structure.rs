use std::sync::OnceLock;

use crate::caps::caps;
use crate::error::{Error, Result};
use crate::pointset::PointSet;

/// How the median of a structure is evaluated.
///
/// `Table` stores the full assignment. The other backends compute medians
/// from shape: `Tree` by lowest common ancestors, `Chain` by the middle of
/// three ids, `Grid` coordinatewise, `Star` by the hub rule (the median of
/// three pairwise distinct points is the hub).
#[derive(Debug, Clone)]
pub enum Backend {
    Table { table: Vec<usize> },
    Tree { edges: Vec<(usize, usize)>, index: TreeIndex },
    Chain,
    Grid { width: usize, height: usize },
    Star,
}

impl Backend {
    pub fn name(&self) -> &'static str {
        match self {
            Backend::Table { .. } => "table",
            Backend::Tree { .. } => "tree",
            Backend::Chain => "chain",
            Backend::Grid { .. } => "grid",
            Backend::Star => "star",
        }
    }
}

/// Rooted-at-0 ancestor tables for O(log n) lowest common ancestors.
#[derive(Debug, Clone)]
pub struct TreeIndex {
    pub(crate) neighbors: Vec<Vec<usize>>,
    pub(crate) parent: Vec<usize>,
    pub(crate) depth: Vec<usize>,
    up: Vec<Vec<usize>>,
}

impl TreeIndex {
    fn build(n: usize, edges: &[(usize, usize)]) -> Result<TreeIndex> {
        if n == 0 {
            return Err(Error::BadStructure("tree needs at least one point".into()));
        }
        if edges.len() != n - 1 {
            return Err(Error::BadStructure(format!(
                "tree on {n} points needs {} edges, got {}",
                n - 1,
                edges.len()
            )));
        }
        let mut neighbors = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::BadStructure(format!("edge ({u},{v}) out of range")));
            }
            if u == v {
                return Err(Error::BadStructure(format!("self loop at {u}")));
            }
            neighbors[u].push(v);
            neighbors[v].push(u);
        }
        let mut parent = vec![usize::MAX; n];
        let mut depth = vec![0usize; n];
        let mut order = Vec::with_capacity(n);
        parent[0] = 0;
        order.push(0);
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            for &w in &neighbors[v] {
                if parent[w] == usize::MAX && w != 0 {
                    parent[w] = v;
                    depth[w] = depth[v] + 1;
                    order.push(w);
                }
            }
        }
        if order.len() != n {
            return Err(Error::BadStructure("tree edges do not connect all points".into()));
        }
        let levels = usize::BITS as usize - n.leading_zeros() as usize;
        let levels = levels.max(1);
        let mut up = vec![parent.clone()];
        for k in 1..levels {
            let prev = &up[k - 1];
            let next: Vec<usize> = (0..n).map(|v| prev[prev[v]]).collect();
            up.push(next);
        }
        Ok(TreeIndex { neighbors, parent, depth, up })
    }

    pub(crate) fn lca(&self, mut u: usize, mut v: usize) -> usize {
        if self.depth[u] < self.depth[v] {
            std::mem::swap(&mut u, &mut v);
        }
        let mut gap = self.depth[u] - self.depth[v];
        for (k, table) in self.up.iter().enumerate() {
            if gap >> k & 1 == 1 {
                u = table[u];
                gap &= !(1 << k);
            }
        }
        if u == v {
            return u;
        }
        for table in self.up.iter().rev() {
            if table[u] != table[v] {
                u = table[u];
                v = table[v];
            }
        }
        self.parent[u]
    }

    /// Point ids along the unique path from `u` to `v`, inclusive.
    pub(crate) fn path(&self, u: usize, v: usize) -> Vec<usize> {
        let w = self.lca(u, v);
        let mut left = Vec::new();
        let mut x = u;
        while x != w {
            left.push(x);
            x = self.parent[x];
        }
        left.push(w);
        let mut right = Vec::new();
        let mut y = v;
        while y != w {
            right.push(y);
            y = self.parent[y];
        }
        left.extend(right.into_iter().rev());
        left
    }
}

/// A finite set `0..n` carrying a median operation.
#[derive(Debug, Clone)]
pub struct Structure {
    n: usize,
    backend: Backend,
    pretree: OnceLock<bool>,
}

impl Structure {
    pub fn chain(n: usize) -> Result<Structure> {
        if n == 0 {
            return Err(Error::BadStructure("chain needs at least one point".into()));
        }
        Ok(Structure { n, backend: Backend::Chain, pretree: OnceLock::new() })
    }

    /// Hub is point 0; every other point is a leaf attached to it.
    pub fn star(n: usize) -> Result<Structure> {
        if n == 0 {
            return Err(Error::BadStructure("star needs at least one point".into()));
        }
        Ok(Structure { n, backend: Backend::Star, pretree: OnceLock::new() })
    }

    /// Point `(r, c)` has id `r * width + c`.
    pub fn grid(width: usize, height: usize) -> Result<Structure> {
        if width == 0 || height == 0 {
            return Err(Error::BadStructure("grid needs positive width and height".into()));
        }
        Ok(Structure {
            n: width * height,
            backend: Backend::Grid { width, height },
            pretree: OnceLock::new(),
        })
    }

    pub fn tree(n: usize, edges: Vec<(usize, usize)>) -> Result<Structure> {
        let index = TreeIndex::build(n, &edges)?;
        Ok(Structure {
            n,
            backend: Backend::Tree { edges, index },
            pretree: OnceLock::new(),
        })
    }

    /// `table` is the flattened assignment, entry `(x, y, z)` at
    /// `x*n*n + y*n + z`. Shape is validated here; the algebra laws are not,
    /// so defective tables can be constructed and then reported on.
    pub fn table(n: usize, table: Vec<usize>) -> Result<Structure> {
        if n == 0 {
            return Err(Error::BadStructure("table needs at least one point".into()));
        }
        if table.len() != n * n * n {
            return Err(Error::BadStructure(format!(
                "table for {n} points needs {} entries, got {}",
                n * n * n,
                table.len()
            )));
        }
        if let Some(&bad) = table.iter().find(|&&e| e >= n) {
            return Err(Error::BadStructure(format!("table entry {bad} out of range")));
        }
        Ok(Structure { n, backend: Backend::Table { table }, pretree: OnceLock::new() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    pub fn backend_name(&self) -> &'static str {
        self.backend.name()
    }

    pub fn check_point(&self, p: usize) -> Result<()> {
        if p < self.n {
            Ok(())
        } else {
            Err(Error::PointOutOfRange { point: p, n: self.n })
        }
    }

    pub fn median(&self, x: usize, y: usize, z: usize) -> Result<usize> {
        self.check_point(x)?;
        self.check_point(y)?;
        self.check_point(z)?;
        Ok(self.med(x, y, z))
    }

    /// Median without bounds checks; callers validate ids first.
    pub(crate) fn med(&self, x: usize, y: usize, z: usize) -> usize {
        match &self.backend {
            Backend::Table { table } => table[(x * self.n + y) * self.n + z],
            Backend::Chain => mid3(x, y, z),
            Backend::Star => {
                if x == y || x == z {
                    x
                } else if y == z {
                    y
                } else {
                    0
                }
            }
            Backend::Grid { width, .. } => {
                let w = *width;
                let r = mid3(x / w, y / w, z / w);
                let c = mid3(x % w, y % w, z % w);
                r * w + c
            }
            Backend::Tree { index, .. } => {
                let a = index.lca(x, y);
                let b = index.lca(y, z);
                let c = index.lca(x, z);
                let mut best = a;
                if index.depth[b] > index.depth[best] {
                    best = b;
                }
                if index.depth[c] > index.depth[best] {
                    best = c;
                }
                best
            }
        }
    }

    /// Independent tree median: the unique point on all three pairwise
    /// paths. Quadratic, kept as an oracle against the ancestor-table route.
    pub fn median_by_path_intersection(&self, x: usize, y: usize, z: usize) -> Result<usize> {
        self.check_point(x)?;
        self.check_point(y)?;
        self.check_point(z)?;
        let Backend::Tree { index, .. } = &self.backend else {
            return Err(Error::WrongBackend { expected: "tree", found: self.backend.name() });
        };
        let pxy = PointSet::from_points(self.n, index.path(x, y));
        let pyz = PointSet::from_points(self.n, index.path(y, z));
        let pxz = PointSet::from_points(self.n, index.path(x, z));
        let common = pxy.intersection(&pyz).intersection(&pxz);
        let mut it = common.iter();
        let m = it.next().expect("pairwise tree paths always share a point");
        assert!(it.next().is_none(), "tree paths share more than one point");
        Ok(m)
    }

    /// Betweenness `a .. b .. c` induced by the median: `b` is the median of
    /// the other two and itself.
    pub fn between(&self, a: usize, b: usize, c: usize) -> Result<bool> {
        self.check_point(a)?;
        self.check_point(b)?;
        self.check_point(c)?;
        Ok(self.med(a, b, c) == b)
    }

    pub(crate) fn betw(&self, a: usize, b: usize, c: usize) -> bool {
        self.med(a, b, c) == b
    }

    pub(crate) fn tree_index(&self) -> Option<&TreeIndex> {
        match &self.backend {
            Backend::Tree { index, .. } => Some(index),
            _ => None,
        }
    }

    pub fn tree_edges(&self) -> Option<&[(usize, usize)]> {
        match &self.backend {
            Backend::Tree { edges, .. } => Some(edges),
            _ => None,
        }
    }

    /// Leaves of a tree backend (degree <= 1; a singleton tree has one leaf).
    pub(crate) fn tree_leaves(&self) -> Option<Vec<usize>> {
        let index = self.tree_index()?;
        Some((0..self.n).filter(|&v| index.neighbors[v].len() <= 1).collect())
    }

    /// Whether this structure is known to satisfy the betweenness laws and
    /// have all triple intersections. Shape backends are covered by the laws
    /// they are built from; tables are scanned once and the result cached.
    /// Tables above the axiom-scan cap report false rather than erroring.
    pub fn is_verified_median_pretree(&self) -> bool {
        *self.pretree.get_or_init(|| match &self.backend {
            Backend::Chain | Backend::Star | Backend::Tree { .. } => true,
            Backend::Grid { width, height } => *width == 1 || *height == 1,
            Backend::Table { .. } => {
                if self.n > caps().axiom_scan {
                    return false;
                }
                let relation = crate::axioms::induced_betweenness(self);
                crate::axioms::is_median_pretree(&relation).unwrap_or(false)
            }
        })
    }

    /// Relabels a median-closed subset as its own table-backed structure.
    /// Returns the structure together with the old ids in ascending order,
    /// so `mapping[new_id] = old_id`.
    pub fn induced(&self, subset: &PointSet) -> Result<(Structure, Vec<usize>)> {
        if subset.is_empty() {
            return Err(Error::EmptyInput { what: "induced subset" });
        }
        let mapping = subset.to_vec();
        let mut back = vec![usize::MAX; self.n];
        for (new, &old) in mapping.iter().enumerate() {
            back[old] = new;
        }
        let k = mapping.len();
        let mut table = vec![0usize; k * k * k];
        let mut missing = Vec::new();
        for (i, &x) in mapping.iter().enumerate() {
            for (j, &y) in mapping.iter().enumerate() {
                for (l, &z) in mapping.iter().enumerate() {
                    let m = self.med(x, y, z);
                    if back[m] == usize::MAX {
                        if !missing.contains(&m) {
                            missing.push(m);
                        }
                        continue;
                    }
                    table[(i * k + j) * k + l] = back[m];
                }
            }
        }
        if !missing.is_empty() {
            missing.sort_unstable();
            return Err(Error::NotASubalgebra { missing });
        }
        Ok((Structure::table(k, table)?, mapping))
    }
}

/// Middle of three ids, the chain median.
fn mid3(x: usize, y: usize, z: usize) -> usize {
    x.max(y).min(x.max(z)).min(y.max(z))
}
