//! Typed plane forests, their cluster structure and coding chains.
//!
//! Vertices carry contiguous ids in breadth-first order, one whole tree
//! before the next (within a tree, level by level, left to right); children
//! of one parent are stored contiguously and sorted by type, the plane-order
//! convention. Clusters are maximal monotype subtrees; collapsing each one
//! to a vertex gives the forest of mutations.

use rand::Rng;

use crate::{Error, ProgenyLaw, Result};

const NO_PARENT: u32 = u32::MAX;

/// Immutable typed plane forest.
#[derive(Debug, Clone)]
pub struct TypedForest {
    d: usize,
    /// Type of each vertex, indexed by BFS id.
    types: Vec<u32>,
    /// Parent id, `NO_PARENT` for roots.
    parents: Vec<u32>,
    /// Child ranges: children of `v` are ids `kids_start[v]..kids_start[v+1]`.
    kids_start: Vec<u32>,
    kids: Vec<u32>,
    /// Root counts per type.
    x: Vec<u64>,
    /// True when sampling stopped at the vertex budget, so leaves of the
    /// last generation may silently miss their children.
    censored: bool,
    /// Optional per-vertex birth-edge lengths (time from parent's birth).
    edge_lengths: Option<Vec<f64>>,
}

/// Mutation counts of one realization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MutationCensus {
    /// Root vector.
    pub x: Vec<u64>,
    /// Total individuals per type.
    pub n: Vec<u64>,
    /// `m[i][j]`: mutations of type `j` produced by type-`i` parents (`i != j`).
    pub m: Vec<Vec<u64>>,
    pub censored: bool,
}

impl MutationCensus {
    /// Total mutations of type `j`, summed over parent types.
    pub fn m_tot(&self, j: usize) -> u64 {
        self.m.iter().map(|row| row[j]).sum()
    }

    /// Total individuals over all types.
    pub fn n_tot(&self) -> u64 {
        self.n.iter().sum()
    }
}

/// Coding chains of a forest: one lattice path per type.
///
/// Chain `i` steps through the type-`i` subforest in that subforest's own
/// breadth-first order, one cluster tree after another; visiting a vertex
/// `u` adds its child counts `p_j(u)` in coordinates `j != i` and
/// `p_i(u) - 1` in coordinate `i`. `values[i][j][n]` is the chain after `n`
/// visits, starting at 0, so coordinate `i` first hits `-k` exactly when the
/// `k`-th cluster is finished.
#[derive(Debug, Clone)]
pub struct CodingChains {
    pub d: usize,
    /// `values[i][j]` has length `n_i + 1`.
    pub values: Vec<Vec<Vec<i64>>>,
    /// Visits per chain (the type-`i` population).
    pub n: Vec<u64>,
}

impl TypedForest {
    /// Builds a forest from `(id, parent, type)` records; `parent = -1` marks
    /// roots. Ids must be distinct but may be arbitrary; vertices are
    /// relabeled in breadth-first order and each child list is normalized to
    /// the plane convention (sorted by type, ties by original id).
    pub fn from_records(d: usize, records: &[(i64, i64, u32)]) -> Result<Self> {
        Self::from_records_with_lengths(d, records, None)
    }

    /// As [`from_records`](Self::from_records) with per-vertex edge lengths
    /// (ignored for roots, must be nonnegative).
    pub fn from_records_with_lengths(
        d: usize,
        records: &[(i64, i64, u32)],
        lengths: Option<&[f64]>,
    ) -> Result<Self> {
        if let Some(l) = lengths {
            if l.len() != records.len() {
                return Err(Error::BadModel("one edge length per record".into()));
            }
            if l.iter().any(|x| !x.is_finite() || *x < 0.0) {
                return Err(Error::BadModel("edge lengths must be finite and >= 0".into()));
            }
        }
        let mut index = std::collections::HashMap::with_capacity(records.len());
        for (pos, (id, _, ty)) in records.iter().enumerate() {
            if *ty as usize >= d {
                return Err(Error::BadModel(format!("type {ty} out of range")));
            }
            if index.insert(*id, pos).is_some() {
                return Err(Error::BadModel(format!("duplicate vertex id {id}")));
            }
        }
        // Children by original position, sorted by (type, id).
        let mut child_pos: Vec<Vec<usize>> = vec![Vec::new(); records.len()];
        let mut roots: Vec<usize> = Vec::new();
        for (pos, (id, parent, _)) in records.iter().enumerate() {
            if *parent < 0 {
                roots.push(pos);
            } else {
                let pp = *index.get(parent).ok_or_else(|| {
                    Error::BadModel(format!("vertex {id} has unknown parent {parent}"))
                })?;
                child_pos[pp].push(pos);
            }
        }
        roots.sort_by_key(|&p| records[p].0);
        for list in child_pos.iter_mut() {
            list.sort_by_key(|&p| (records[p].2, records[p].0));
        }
        // Breadth-first relabeling, one whole tree before the next root.
        let n = records.len();
        let mut order = Vec::with_capacity(n);
        let mut queue = std::collections::VecDeque::new();
        for &r in &roots {
            queue.push_back(r);
            while let Some(pos) = queue.pop_front() {
                order.push(pos);
                queue.extend(child_pos[pos].iter().copied());
            }
        }
        if order.len() != n {
            return Err(Error::BadModel("parent links contain a cycle".into()));
        }
        let mut new_id = vec![0u32; n];
        for (nid, &pos) in order.iter().enumerate() {
            new_id[pos] = nid as u32;
        }
        let mut types = Vec::with_capacity(n);
        let mut parents = Vec::with_capacity(n);
        let mut kids_start = Vec::with_capacity(n + 1);
        let mut kids = Vec::with_capacity(n.saturating_sub(roots.len()));
        let mut elens = lengths.map(|_| Vec::with_capacity(n));
        for &pos in &order {
            let (_, parent, ty) = records[pos];
            types.push(ty);
            parents.push(if parent < 0 {
                NO_PARENT
            } else {
                new_id[index[&parent]]
            });
            kids_start.push(kids.len() as u32);
            kids.extend(child_pos[pos].iter().map(|&c| new_id[c]));
            if let (Some(out), Some(l)) = (&mut elens, lengths) {
                out.push(if parent < 0 { 0.0 } else { l[pos] });
            }
        }
        kids_start.push(kids.len() as u32);
        let mut x = vec![0u64; d];
        for &pos in &roots {
            x[records[pos].2 as usize] += 1;
        }
        Ok(Self {
            d,
            types,
            parents,
            kids_start,
            kids,
            x,
            censored: false,
            edge_lengths: elens,
        })
    }

    /// Samples a forest from `x_i` roots of each type, one tree at a time.
    /// Stops expanding once the vertex count would exceed `budget` and
    /// marks the realization censored instead.
    pub fn sample<R: Rng + ?Sized>(
        law: &ProgenyLaw,
        x: &[u64],
        budget: u64,
        rng: &mut R,
    ) -> Result<Self> {
        let d = law.d();
        if x.len() != d {
            return Err(Error::DimMismatch {
                expected: d,
                got: x.len(),
            });
        }
        let n_roots: u64 = x.iter().sum();
        if n_roots == 0 {
            return Err(Error::Domain("root vector is zero".into()));
        }
        if budget < n_roots {
            return Err(Error::Domain("budget below root count".into()));
        }
        if budget > u64::from(u32::MAX) {
            return Err(Error::Domain("vertex budget exceeds id width".into()));
        }
        let tables = law.tables();
        let mut types: Vec<u32> = Vec::new();
        let mut parents: Vec<u32> = Vec::new();
        let mut kids_start: Vec<u32> = Vec::new();
        let mut kids: Vec<u32> = Vec::new();
        let mut censored = false;
        // Roots come in type order; each tree is grown fully before the next
        // root is pushed, so ids run tree by tree, level by level within a
        // tree (children get fresh ids at the tail and are processed in id
        // order). Unpushed roots reserve budget, so `len <= budget` holds.
        let root_types = x
            .iter()
            .enumerate()
            .flat_map(|(ty, &cnt)| std::iter::repeat_n(ty as u32, cnt as usize));
        let mut pending = n_roots;
        let mut next = 0usize;
        for ty in root_types {
            pending -= 1;
            types.push(ty);
            parents.push(NO_PARENT);
            while next < types.len() {
                if censored {
                    // Close out remaining child ranges without expanding.
                    kids_start.push(kids.len() as u32);
                    next += 1;
                    continue;
                }
                let parent_ty = types[next] as usize;
                let litter = tables[parent_ty].sample(rng);
                let litter_size: i64 = litter.iter().map(|&k| i64::from(k)).sum();
                if types.len() as u64 + litter_size as u64 + pending > budget {
                    censored = true;
                    kids_start.push(kids.len() as u32);
                    next += 1;
                    continue;
                }
                kids_start.push(kids.len() as u32);
                for (ty, &cnt) in litter.iter().enumerate() {
                    for _ in 0..cnt {
                        kids.push(types.len() as u32);
                        types.push(ty as u32);
                        parents.push(next as u32);
                    }
                }
                next += 1;
            }
        }
        kids_start.push(kids.len() as u32);
        Ok(Self {
            d,
            types,
            parents,
            kids_start,
            kids,
            x: x.to_vec(),
            censored,
            edge_lengths: None,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    pub fn censored(&self) -> bool {
        self.censored
    }

    pub fn vertex_type(&self, v: u32) -> u32 {
        self.types[v as usize]
    }

    pub fn parent(&self, v: u32) -> Option<u32> {
        let p = self.parents[v as usize];
        (p != NO_PARENT).then_some(p)
    }

    pub fn children(&self, v: u32) -> &[u32] {
        let a = self.kids_start[v as usize] as usize;
        let b = self.kids_start[v as usize + 1] as usize;
        &self.kids[a..b]
    }

    pub fn roots(&self) -> &[u64] {
        &self.x
    }

    pub fn edge_length(&self, v: u32) -> Option<f64> {
        self.edge_lengths.as_ref().map(|l| l[v as usize])
    }

    /// Cluster id of every vertex: the id of the highest same-type ancestor
    /// reachable through same-type edges. Cluster ids are vertex ids of the
    /// cluster roots, so they are breadth-first ordered.
    pub fn cluster_ids(&self) -> Vec<u32> {
        let mut cl = vec![0u32; self.len()];
        for v in 0..self.len() as u32 {
            cl[v as usize] = match self.parent(v) {
                Some(p) if self.types[p as usize] == self.types[v as usize] => cl[p as usize],
                _ => v,
            };
        }
        cl
    }

    /// Number of clusters per type.
    pub fn cluster_counts(&self) -> Vec<u64> {
        let cl = self.cluster_ids();
        let mut counts = vec![0u64; self.d];
        for v in 0..self.len() as u32 {
            if cl[v as usize] == v {
                counts[self.types[v as usize] as usize] += 1;
            }
        }
        counts
    }

    /// Collapses every cluster to one vertex, keeping inter-cluster edges:
    /// the forest of mutations.
    pub fn mutation_forest(&self) -> Result<Self> {
        let cl = self.cluster_ids();
        let mut records: Vec<(i64, i64, u32)> = Vec::new();
        for v in 0..self.len() as u32 {
            if cl[v as usize] != v {
                continue;
            }
            let parent_cluster = match self.parent(v) {
                Some(p) => i64::from(cl[p as usize]),
                None => -1,
            };
            records.push((i64::from(v), parent_cluster, self.types[v as usize]));
        }
        let mut out = Self::from_records(self.d, &records)?;
        out.censored = self.censored;
        Ok(out)
    }

    /// Counts individuals and cross-type births in one traversal.
    pub fn census(&self) -> MutationCensus {
        let mut n = vec![0u64; self.d];
        let mut m = vec![vec![0u64; self.d]; self.d];
        for v in 0..self.len() as u32 {
            let ty = self.types[v as usize] as usize;
            n[ty] += 1;
            if let Some(p) = self.parent(v) {
                let pty = self.types[p as usize] as usize;
                if pty != ty {
                    m[pty][ty] += 1;
                }
            }
        }
        MutationCensus {
            x: self.x.clone(),
            n,
            m,
            censored: self.censored,
        }
    }

    /// Coding chains; see [`CodingChains`].
    pub fn encode(&self) -> CodingChains {
        let d = self.d;
        let cl = self.cluster_ids();
        // Subforest i: trees are the type-i clusters, ranked by cluster-root
        // id; breadth-first over that forest of clusters.
        let mut subforest_order: Vec<Vec<u32>> = vec![Vec::new(); d];
        {
            // One cluster tree at a time, breadth first within the tree;
            // same-type children come in id order (plane order).
            let mut queue = std::collections::VecDeque::new();
            for i in 0..d {
                let order = &mut subforest_order[i];
                for v in 0..self.len() as u32 {
                    if cl[v as usize] != v || self.types[v as usize] as usize != i {
                        continue;
                    }
                    queue.push_back(v);
                    while let Some(u) = queue.pop_front() {
                        order.push(u);
                        for &c in self.children(u) {
                            if self.types[c as usize] == self.types[u as usize] {
                                queue.push_back(c);
                            }
                        }
                    }
                }
            }
        }
        let mut values = Vec::with_capacity(d);
        let mut n = Vec::with_capacity(d);
        for (i, order) in subforest_order.iter().enumerate() {
            let mut chains: Vec<Vec<i64>> = vec![Vec::with_capacity(order.len() + 1); d];
            let mut cur = vec![0i64; d];
            for ch in chains.iter_mut() {
                ch.push(0);
            }
            for &u in order {
                for (j, c) in cur.iter_mut().enumerate() {
                    let p_j = self
                        .children(u)
                        .iter()
                        .filter(|&&c| self.types[c as usize] as usize == j)
                        .count() as i64;
                    *c += if j == i { p_j - 1 } else { p_j };
                }
                for (ch, &c) in chains.iter_mut().zip(&cur) {
                    ch.push(c);
                }
            }
            values.push(chains);
            n.push(order.len() as u64);
        }
        CodingChains { d, values, n }
    }

    /// Writes newline records `id parent type [edge_length]`, ids in
    /// breadth-first order, roots with parent -1.
    pub fn write_records<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        for v in 0..self.len() as u32 {
            let parent = match self.parent(v) {
                Some(p) => i64::from(p),
                None => -1,
            };
            match self.edge_length(v) {
                Some(l) => writeln!(w, "{v} {parent} {} {l}", self.types[v as usize])?,
                None => writeln!(w, "{v} {parent} {}", self.types[v as usize])?,
            }
        }
        Ok(())
    }

    /// Parses the record format of [`write_records`](Self::write_records).
    pub fn read_records<R: std::io::BufRead>(d: usize, r: R) -> Result<Self> {
        let mut records = Vec::new();
        let mut lengths = Vec::new();
        let mut any_length = false;
        for line in r.lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let mut field = |name: &str| {
                it.next()
                    .ok_or_else(|| Error::BadModel(format!("record missing {name}: {line}")))
            };
            let id: i64 = field("id")?
                .parse()
                .map_err(|e| Error::BadModel(format!("bad id: {e}")))?;
            let parent: i64 = field("parent")?
                .parse()
                .map_err(|e| Error::BadModel(format!("bad parent: {e}")))?;
            let ty: u32 = field("type")?
                .parse()
                .map_err(|e| Error::BadModel(format!("bad type: {e}")))?;
            let len = match it.next() {
                Some(s) => {
                    any_length = true;
                    s.parse::<f64>()
                        .map_err(|e| Error::BadModel(format!("bad edge length: {e}")))?
                }
                None => 0.0,
            };
            records.push((id, parent, ty));
            lengths.push(len);
        }
        if any_length {
            Self::from_records_with_lengths(d, &records, Some(&lengths))
        } else {
            Self::from_records(d, &records)
        }
    }
}
