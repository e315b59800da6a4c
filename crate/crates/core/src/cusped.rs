//! Truncated cusped spaces: a finite region of a Cayley graph with a
//! truncated combinatorial horoball glued along every peripheral coset that
//! meets the region.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::horoball::{BaseGraph, TruncatedHoroball};
use crate::stallings::{cyclic_subgroups_conjugate, SubgroupGraph};
use crate::words::{Letter, Word};

const UNREACHED: u16 = u16::MAX;

/// A group given by normal forms over a free alphabet.
pub trait Ambient: Sync {
    fn rank(&self) -> usize;

    /// Normal form of `x·l`, where `x` is already a normal form.
    fn times(&self, x: &Word, l: Letter) -> Word;

    /// Canonical representative of the left coset `x P`.
    fn coset_key(&self, p: &Peripheral, x: &Word) -> Result<Word>;

    fn normal_form(&self, w: &Word) -> Word {
        w.letters()
            .iter()
            .fold(Word::identity(), |acc, &l| self.times(&acc, l))
    }

    fn times_word(&self, x: &Word, w: &Word) -> Word {
        w.letters().iter().fold(x.clone(), |acc, &l| self.times(&acc, l))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FreeGroup {
    pub rank: usize,
}

impl Ambient for FreeGroup {
    fn rank(&self) -> usize {
        self.rank
    }

    fn times(&self, x: &Word, l: Letter) -> Word {
        x.push(l)
    }

    fn coset_key(&self, p: &Peripheral, x: &Word) -> Result<Word> {
        Ok(p.graph.coset_representative(x))
    }

    fn normal_form(&self, w: &Word) -> Word {
        w.clone()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Peripheral {
    pub graph: SubgroupGraph,
    pub generators: Vec<Word>,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PeripheralStructure {
    pub peripherals: Vec<Peripheral>,
}

impl PeripheralStructure {
    pub fn empty() -> Self {
        PeripheralStructure::default()
    }

    pub fn new(rank: usize, generators: Vec<Vec<Word>>) -> Result<Self> {
        let mut peripherals = Vec::with_capacity(generators.len());
        for gens in generators {
            let graph = SubgroupGraph::from_generators(rank, &gens);
            if graph.is_trivial() {
                return Err(Error::Structural(
                    "peripheral subgroup must be nontrivial".into(),
                ));
            }
            debug_assert!(graph.contains_all(&gens));
            peripherals.push(Peripheral {
                graph,
                generators: gens,
            });
        }
        Ok(PeripheralStructure { peripherals })
    }

    pub fn len(&self) -> usize {
        self.peripherals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.peripherals.is_empty()
    }

    /// First pair of conjugate peripherals. Exact for cyclic pairs, otherwise
    /// conjugators up to `bound` are tried.
    pub fn conjugate_pair(&self, bound: usize) -> Option<(usize, usize)> {
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                let (p, q) = (&self.peripherals[i].graph, &self.peripherals[j].graph);
                let hit = match (p.cyclic_generator(), q.cyclic_generator()) {
                    (Some(u), Some(v)) => cyclic_subgroups_conjugate(&u, &v),
                    _ => p
                        .conjugator_into(q, bound)
                        .is_some_and(|c| q.conjugate(&c) == *p),
                };
                if hit {
                    return Some((i, j));
                }
            }
        }
        None
    }
}

/// Group vertices of the truncation: every element within `radius` of a
/// prefix of some centre.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Region {
    pub centers: Vec<Word>,
    pub radius: usize,
}

impl Region {
    pub fn ball(radius: usize) -> Self {
        Region {
            centers: vec![Word::identity()],
            radius,
        }
    }

    pub fn around(centers: Vec<Word>, radius: usize) -> Self {
        Region { centers, radius }
    }

    fn elements<A: Ambient + ?Sized>(&self, group: &A) -> Vec<Word> {
        let mut seen: HashSet<Word> = HashSet::new();
        let mut queue: VecDeque<(Word, usize)> = VecDeque::new();
        for c in &self.centers {
            let mut x = Word::identity();
            if seen.insert(x.clone()) {
                queue.push_back((x.clone(), 0));
            }
            for &l in c.letters() {
                x = group.times(&x, l);
                if seen.insert(x.clone()) {
                    queue.push_back((x.clone(), 0));
                }
            }
        }
        while let Some((x, d)) = queue.pop_front() {
            if d == self.radius {
                continue;
            }
            for code in 0..2 * group.rank() {
                let y = group.times(&x, Letter::from_code(code));
                if seen.insert(y.clone()) {
                    queue.push_back((y, d + 1));
                }
            }
        }
        let mut out: Vec<Word> = seen.into_iter().collect();
        out.sort();
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CuspedVertex {
    Group(Word),
    Horo {
        peripheral: usize,
        coset: Word,
        member: Word,
        depth: usize,
    },
}

impl CuspedVertex {
    pub fn depth(&self) -> usize {
        match self {
            CuspedVertex::Group(_) => 0,
            CuspedVertex::Horo { depth, .. } => *depth,
        }
    }

    /// Group element lying directly above or at this vertex.
    pub fn element(&self) -> &Word {
        match self {
            CuspedVertex::Group(w) => w,
            CuspedVertex::Horo { member, .. } => member,
        }
    }
}

impl std::fmt::Display for CuspedVertex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CuspedVertex::Group(w) => write!(f, "{w}"),
            CuspedVertex::Horo {
                peripheral,
                member,
                depth,
                ..
            } => write!(f, "({member},{depth})@P{peripheral}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HoroballInfo {
    pub peripheral: usize,
    pub coset: Word,
    pub members: Vec<Word>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Trust {
    Trusted,
    LowerBound,
}

/// Which vertices count as the truncation boundary.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TrustPolicy {
    /// Group vertices with a missing Cayley neighbour, and the deepest layer.
    #[default]
    Sphere,
    /// Additionally every horoball vertex above a member whose peripheral
    /// neighbour is missing.
    Strict,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Distance {
    pub value: usize,
    pub trust: Trust,
}

#[derive(Clone, Debug)]
pub struct CuspedSpace {
    rank: usize,
    region: Region,
    depth: usize,
    vertices: Vec<CuspedVertex>,
    adj: Vec<Vec<u32>>,
    group_index: HashMap<Word, usize>,
    horo_index: HashMap<(usize, Word, usize), usize>,
    horoballs: Vec<HoroballInfo>,
    margin: Vec<u32>,
    strict_margin: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Manifest {
    pub rank: usize,
    pub region: Region,
    pub max_depth: usize,
    pub group_vertices: usize,
    pub horoballs: usize,
    /// Horoball vertex count at each depth `1..=max_depth`.
    pub horoball_vertices_by_depth: Vec<usize>,
    pub edges: usize,
}

/// Build with the free group as ambient group.
pub fn build_cusped_space(
    rank: usize,
    structure: &PeripheralStructure,
    region: Region,
    depth: usize,
) -> Result<CuspedSpace> {
    CuspedSpace::build(&FreeGroup { rank }, structure, region, depth)
}

impl CuspedSpace {
    pub fn build<A: Ambient + ?Sized>(
        group: &A,
        structure: &PeripheralStructure,
        region: Region,
        depth: usize,
    ) -> Result<CuspedSpace> {
        if depth == 0 {
            return Err(Error::Precondition("cusp depth must be at least 1".into()));
        }
        if let Some((i, j)) = structure.conjugate_pair(region.radius.max(2)) {
            return Err(Error::Structural(format!(
                "peripherals {i} and {j} are conjugate"
            )));
        }
        let rank = group.rank();
        let elements = region.elements(group);
        let mut vertices: Vec<CuspedVertex> =
            elements.iter().cloned().map(CuspedVertex::Group).collect();
        let group_index: HashMap<Word, usize> = elements
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i))
            .collect();
        let mut edges: Vec<(usize, usize)> = Vec::new();
        let mut boundary: Vec<usize> = Vec::new();
        let mut side: Vec<usize> = Vec::new();
        for (i, x) in elements.iter().enumerate() {
            let mut complete = true;
            for code in 0..2 * rank {
                match group_index.get(&group.times(x, Letter::from_code(code))) {
                    Some(&j) => {
                        if i < j {
                            edges.push((i, j));
                        }
                    }
                    None => complete = false,
                }
            }
            if !complete {
                boundary.push(i);
            }
        }

        let mut horoballs = Vec::new();
        let mut horo_index = HashMap::new();
        for (pi, p) in structure.peripherals.iter().enumerate() {
            let mut cosets: BTreeMap<Word, Vec<Word>> = BTreeMap::new();
            for x in &elements {
                cosets.entry(group.coset_key(p, x)?).or_default().push(x.clone());
            }
            for (coset, members) in cosets {
                let local: HashMap<&Word, usize> =
                    members.iter().enumerate().map(|(i, w)| (w, i)).collect();
                let mut base_edges = Vec::new();
                let mut open = vec![false; members.len()];
                for (i, x) in members.iter().enumerate() {
                    for s in &p.generators {
                        for t in [s.clone(), s.inverse()] {
                            let y = group.times_word(x, &t);
                            match local.get(&y) {
                                Some(&j) if j != i => base_edges.push((i, j)),
                                Some(_) => {}
                                None => open[i] = true,
                            }
                        }
                    }
                }
                let names = members.iter().map(|w| w.to_string()).collect();
                let ball = TruncatedHoroball::build(BaseGraph::named(names, &base_edges)?, depth)?;
                let start = vertices.len();
                // ids of horoball vertices (v, k) in the space
                let mut ids = Vec::with_capacity(ball.vertex_count());
                for (v, member) in members.iter().enumerate() {
                    for k in 0..=depth {
                        if k == 0 {
                            ids.push(group_index[member]);
                            continue;
                        }
                        let id = vertices.len();
                        vertices.push(CuspedVertex::Horo {
                            peripheral: pi,
                            coset: coset.clone(),
                            member: member.clone(),
                            depth: k,
                        });
                        horo_index.insert((pi, member.clone(), k), id);
                        ids.push(id);
                        if k == depth {
                            boundary.push(id);
                        } else if open[v] {
                            side.push(id);
                        }
                    }
                }
                debug_assert_eq!(vertices.len() - start, members.len() * depth);
                for (i, j) in ball.edges() {
                    edges.push((ids[i], ids[j]));
                }
                horoballs.push(HoroballInfo {
                    peripheral: pi,
                    coset,
                    members,
                });
            }
        }

        let mut adj: Vec<Vec<u32>> = vec![Vec::new(); vertices.len()];
        for (u, v) in edges {
            adj[u].push(v as u32);
            adj[v].push(u as u32);
        }
        for row in &mut adj {
            row.sort_unstable();
            row.dedup();
        }
        let margin = multi_source_bfs(&adj, &boundary, |_| true);
        side.extend_from_slice(&boundary);
        let strict_margin = multi_source_bfs(&adj, &side, |_| true);
        Ok(CuspedSpace {
            rank,
            region,
            depth,
            vertices,
            adj,
            group_index,
            horo_index,
            horoballs,
            margin,
            strict_margin,
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn max_depth(&self) -> usize {
        self.depth
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn vertices(&self) -> &[CuspedVertex] {
        &self.vertices
    }

    pub fn vertex(&self, id: usize) -> &CuspedVertex {
        &self.vertices[id]
    }

    pub fn neighbors(&self, id: usize) -> &[u32] {
        &self.adj[id]
    }

    pub fn horoballs(&self) -> &[HoroballInfo] {
        &self.horoballs
    }

    pub fn group_vertex_count(&self) -> usize {
        self.group_index.len()
    }

    /// Distance to the truncation boundary.
    pub fn margin(&self, id: usize, policy: TrustPolicy) -> u32 {
        self.margins(policy)[id]
    }

    fn margins(&self, policy: TrustPolicy) -> &[u32] {
        match policy {
            TrustPolicy::Sphere => &self.margin,
            TrustPolicy::Strict => &self.strict_margin,
        }
    }

    pub fn group_vertex(&self, w: &Word) -> Result<usize> {
        self.group_index
            .get(w)
            .copied()
            .ok_or_else(|| Error::VertexNotFound(w.to_string()))
    }

    /// Horoball vertex above `member` in the horoball of peripheral `p`;
    /// depth 0 is the group vertex itself.
    pub fn horo_vertex(&self, p: usize, member: &Word, depth: usize) -> Result<usize> {
        if depth == 0 {
            return self.group_vertex(member);
        }
        self.horo_index
            .get(&(p, member.clone(), depth))
            .copied()
            .ok_or_else(|| Error::VertexNotFound(format!("({member},{depth})@P{p}")))
    }

    pub fn find(&self, v: &CuspedVertex) -> Result<usize> {
        match v {
            CuspedVertex::Group(w) => self.group_vertex(w),
            CuspedVertex::Horo {
                peripheral,
                member,
                depth,
                ..
            } => self.horo_vertex(*peripheral, member, *depth),
        }
    }

    pub fn distances_from(&self, p: usize) -> Vec<u16> {
        multi_source_bfs(&self.adj, &[p], |_| true)
            .into_iter()
            .map(|d| d.min(UNREACHED as u32) as u16)
            .collect()
    }

    /// Distances from `p` through vertices of margin at least 2 only.
    fn interior_distances_from(&self, p: usize, policy: TrustPolicy) -> Vec<u16> {
        let margin = self.margins(policy);
        if margin[p] < 2 {
            return vec![UNREACHED; self.vertex_count()];
        }
        multi_source_bfs(&self.adj, &[p], |v| margin[v] >= 2)
            .into_iter()
            .map(|d| d.min(UNREACHED as u32) as u16)
            .collect()
    }

    pub fn distance(&self, p: usize, q: usize) -> Result<Distance> {
        self.check(p)?;
        self.check(q)?;
        let full = self.distances_from(p)[q];
        if full == UNREACHED {
            return Err(Error::Structural(format!("vertices {p} and {q} are disconnected")));
        }
        let inner = self.interior_distances_from(p, TrustPolicy::Sphere)[q];
        let trust = if inner == full {
            Trust::Trusted
        } else {
            Trust::LowerBound
        };
        Ok(Distance {
            value: full as usize,
            trust,
        })
    }

    fn check(&self, p: usize) -> Result<()> {
        if p < self.vertex_count() {
            Ok(())
        } else {
            Err(Error::VertexNotFound(format!("#{p}")))
        }
    }

    /// Deterministic geodesic: always step to the least-index neighbour that
    /// is one closer to `q`.
    pub fn geodesic(&self, p: usize, q: usize) -> Result<Vec<usize>> {
        self.check(p)?;
        self.check(q)?;
        let dist = self.distances_from(q);
        self.geodesic_with(p, &dist)
    }

    fn geodesic_with(&self, p: usize, dist_to_q: &[u16]) -> Result<Vec<usize>> {
        if dist_to_q[p] == UNREACHED {
            return Err(Error::Structural("endpoints are disconnected".into()));
        }
        let mut cur = p;
        let mut path = vec![p];
        while dist_to_q[cur] > 0 {
            cur = *self.adj[cur]
                .iter()
                .find(|&&x| dist_to_q[x as usize] + 1 == dist_to_q[cur])
                .expect("neighbour one step closer") as usize;
            path.push(cur);
        }
        Ok(path)
    }

    pub fn path_names(&self, path: &[usize]) -> Vec<String> {
        path.iter().map(|&v| self.vertices[v].to_string()).collect()
    }

    pub fn manifest(&self) -> Manifest {
        let mut by_depth = vec![0; self.depth];
        for v in &self.vertices {
            if let CuspedVertex::Horo { depth, .. } = v {
                by_depth[depth - 1] += 1;
            }
        }
        Manifest {
            rank: self.rank,
            region: self.region.clone(),
            max_depth: self.depth,
            group_vertices: self.group_vertex_count(),
            horoballs: self.horoballs.len(),
            horoball_vertices_by_depth: by_depth,
            edges: self.edge_count(),
        }
    }

    pub fn export_edge_list(&self) -> String {
        let mut out = String::new();
        for (u, row) in self.adj.iter().enumerate() {
            for &v in row.iter().filter(|&&v| v as usize > u) {
                out.push_str(&format!("{} {}\n", self.vertices[u], self.vertices[v as usize]));
            }
        }
        out
    }

    /// All-pairs distances, full and restricted to the trusted interior.
    pub fn distance_table(&self, policy: TrustPolicy) -> DistanceTable {
        let n = self.vertex_count();
        let rows: Vec<(Vec<u16>, Vec<u16>)> = (0..n)
            .into_par_iter()
            .map(|p| (self.distances_from(p), self.interior_distances_from(p, policy)))
            .collect();
        let mut full = Vec::with_capacity(n * n);
        let mut trusted = Vec::with_capacity(n * n);
        for (f, t) in rows {
            for (a, b) in f.iter().zip(&t) {
                full.push(*a);
                trusted.push(a == b && *a != UNREACHED);
            }
        }
        DistanceTable { n, full, trusted }
    }

    /// Vertices of the canonical geodesics between the given pairs.
    pub fn quasiconvexity(&self, y: &[usize], pairs: &[(usize, usize)]) -> Result<usize> {
        let members: HashSet<usize> = y.iter().copied().collect();
        for &(p, q) in pairs {
            for v in [p, q] {
                if !members.contains(&v) {
                    return Err(Error::Precondition(format!(
                        "endpoint {} is not in the subset",
                        self.vertices[v]
                    )));
                }
            }
        }
        let to_y = multi_source_bfs(&self.adj, y, |_| true);
        let worst = pairs
            .par_iter()
            .map(|&(p, q)| -> Result<usize> {
                let dist = self.distances_from(q);
                let path = self.geodesic_with(p, &dist)?;
                Ok(path.iter().map(|&v| to_y[v] as usize).max().unwrap_or(0))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(worst.into_iter().max().unwrap_or(0))
    }

    /// Farthest distance from `y` over the horoballs selected by `keep`.
    pub fn horoball_distance_to(
        &self,
        y: &[usize],
        keep: impl Fn(&HoroballInfo) -> bool,
    ) -> Option<usize> {
        let to_y = multi_source_bfs(&self.adj, y, |_| true);
        let mut worst: Option<usize> = None;
        for h in self.horoballs.iter().filter(|h| keep(h)) {
            for m in &h.members {
                for k in 0..=self.depth {
                    let v = self.horo_vertex(h.peripheral, m, k).expect("member of horoball");
                    let d = to_y[v] as usize;
                    worst = Some(worst.map_or(d, |w| w.max(d)));
                }
            }
        }
        worst
    }
}

/// Breadth-first distances from a set of sources through allowed vertices.
fn multi_source_bfs(adj: &[Vec<u32>], sources: &[usize], allowed: impl Fn(usize) -> bool) -> Vec<u32> {
    let mut dist = vec![u32::MAX; adj.len()];
    let mut queue = VecDeque::new();
    for &s in sources {
        if dist[s] == u32::MAX && allowed(s) {
            dist[s] = 0;
            queue.push_back(s);
        }
    }
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            let v = v as usize;
            if dist[v] == u32::MAX && allowed(v) {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

pub struct DistanceTable {
    n: usize,
    full: Vec<u16>,
    trusted: Vec<bool>,
}

impl DistanceTable {
    #[inline]
    pub fn get(&self, p: usize, q: usize) -> u16 {
        self.full[p * self.n + q]
    }

    #[inline]
    pub fn is_trusted(&self, p: usize, q: usize) -> bool {
        self.trusted[p * self.n + q]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum DeltaMode {
    Exhaustive,
    Sample { quadruples: u64, seed: u64 },
}

/// Four-point estimate; values are stored doubled so they stay integral.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DeltaEstimate {
    pub mode: DeltaMode,
    pub policy: TrustPolicy,
    pub twice_delta: u32,
    pub twice_delta_trusted: Option<u32>,
    pub quadruples: u64,
    pub trusted_quadruples: u64,
}

impl DeltaEstimate {
    pub fn delta(&self) -> f64 {
        self.twice_delta as f64 / 2.0
    }

    pub fn delta_trusted(&self) -> Option<f64> {
        self.twice_delta_trusted.map(|t| t as f64 / 2.0)
    }
}

#[derive(Clone, Copy, Default)]
struct DeltaAcc {
    all: u32,
    trusted: Option<u32>,
    count: u64,
    trusted_count: u64,
}

impl DeltaAcc {
    fn merge(self, o: DeltaAcc) -> DeltaAcc {
        DeltaAcc {
            all: self.all.max(o.all),
            trusted: match (self.trusted, o.trusted) {
                (Some(a), Some(b)) => Some(a.max(b)),
                (a, b) => a.or(b),
            },
            count: self.count + o.count,
            trusted_count: self.trusted_count + o.trusted_count,
        }
    }

    fn add(&mut self, t: &DistanceTable, x: usize, y: usize, z: usize, w: usize) {
        let d = |p, q| t.get(p, q) as u32;
        let mut sums = [d(x, y) + d(z, w), d(x, z) + d(y, w), d(x, w) + d(y, z)];
        sums.sort_unstable();
        let defect = sums[2] - sums[1];
        self.all = self.all.max(defect);
        self.count += 1;
        let pairs = [(x, y), (z, w), (x, z), (y, w), (x, w), (y, z)];
        if pairs.iter().all(|&(p, q)| t.is_trusted(p, q)) {
            self.trusted = Some(self.trusted.map_or(defect, |m| m.max(defect)));
            self.trusted_count += 1;
        }
    }
}

/// Gromov four-point defect, maximised over quadruples of vertices.
pub fn estimate_delta(x: &CuspedSpace, mode: DeltaMode) -> Result<DeltaEstimate> {
    estimate_delta_with(x, mode, TrustPolicy::Sphere)
}

pub fn estimate_delta_with(x: &CuspedSpace, mode: DeltaMode, policy: TrustPolicy) -> Result<DeltaEstimate> {
    let n = x.vertex_count();
    let table = x.distance_table(policy);
    if table.full.contains(&UNREACHED) {
        return Err(Error::Structural("cusped space is disconnected".into()));
    }
    let acc = match mode {
        DeltaMode::Exhaustive => (0..n)
            .into_par_iter()
            .map(|a| {
                let mut acc = DeltaAcc::default();
                for b in a..n {
                    for c in b..n {
                        for d in c..n {
                            acc.add(&table, a, b, c, d);
                        }
                    }
                }
                acc
            })
            .reduce(DeltaAcc::default, DeltaAcc::merge),
        DeltaMode::Sample { quadruples, seed } => {
            if quadruples == 0 {
                return Err(Error::Precondition("sample size must be positive".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let picks: Vec<[usize; 4]> = (0..quadruples)
                .map(|_| std::array::from_fn(|_| rng.gen_range(0..n)))
                .collect();
            picks
                .par_iter()
                .map(|q| {
                    let mut acc = DeltaAcc::default();
                    acc.add(&table, q[0], q[1], q[2], q[3]);
                    acc
                })
                .reduce(DeltaAcc::default, DeltaAcc::merge)
        }
    };
    Ok(DeltaEstimate {
        mode,
        policy,
        twice_delta: acc.all,
        twice_delta_trusted: acc.trusted,
        quadruples: acc.count,
        trusted_quadruples: acc.trusted_count,
    })
}

/// How each peripheral of a subgroup sits inside a peripheral of the ambient
/// group: `D ⊆ c P c⁻¹`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Correction {
    pub peripheral: usize,
    pub conjugator: Word,
}

/// Peripheral structure of `H` written over its own free basis, one entry per
/// core subgroup.
pub fn subgroup_structure(h: &SubgroupGraph, core: &[SubgroupGraph]) -> Result<PeripheralStructure> {
    let rank = h.rank();
    let mut gens = Vec::with_capacity(core.len());
    for d in core {
        let rewritten = d
            .basis()
            .iter()
            .map(|x| {
                h.express_in_basis(x).ok_or_else(|| {
                    Error::Structural(format!("core generator {x} is not in the subgroup"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        gens.push(rewritten);
    }
    PeripheralStructure::new(rank, gens)
}

/// Shortest conjugator taking each core entry into some ambient peripheral.
pub fn corrections(
    core: &[SubgroupGraph],
    structure: &PeripheralStructure,
    bound: usize,
) -> Result<Vec<Correction>> {
    core.iter()
        .map(|d| {
            structure
                .peripherals
                .iter()
                .enumerate()
                .filter_map(|(j, p)| {
                    d.conjugator_into(&p.graph, bound).map(|c| Correction {
                        peripheral: j,
                        conjugator: c,
                    })
                })
                .min_by(|x, y| x.conjugator.cmp(&y.conjugator).then(x.peripheral.cmp(&y.peripheral)))
                .ok_or_else(|| {
                    Error::Structural(format!(
                        "core subgroup {d:?} is not conjugate into any peripheral within length {bound}"
                    ))
                })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LipschitzMap {
    pub alpha: usize,
    pub generator_bound: usize,
    pub conjugator_bound: usize,
    pub corrections: Vec<Correction>,
    /// Image of each domain vertex; `None` when it leaves the codomain.
    pub mapping: Vec<Option<usize>>,
}

impl LipschitzMap {
    pub fn unmapped(&self) -> usize {
        self.mapping.iter().filter(|m| m.is_none()).count()
    }

    pub fn image(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.mapping.iter().flatten().copied().collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// The equivariant map from the subgroup's cusped space into the ambient one.
/// Group vertices go to their image under inclusion; horoball vertex
/// `(h, n)` over a core coset goes to `(h·c, n)` in the horoball of the
/// matching ambient peripheral.
pub fn build_check_map(
    h: &SubgroupGraph,
    core: &[SubgroupGraph],
    structure: &PeripheralStructure,
    x_h: &CuspedSpace,
    x_g: &CuspedSpace,
    bound: usize,
) -> Result<LipschitzMap> {
    let corrections = corrections(core, structure, bound)?;
    let basis = h.basis();
    let phi = |w: &Word| -> Word {
        Word::from_letters(w.letters().iter().flat_map(|l| {
            let b = &basis[l.generator()];
            if l.is_inverse() {
                b.inverse().letters().to_vec()
            } else {
                b.letters().to_vec()
            }
        }))
    };
    let mapping = x_h
        .vertices()
        .par_iter()
        .map(|v| match v {
            CuspedVertex::Group(w) => x_g.group_vertex(&phi(w)).ok(),
            CuspedVertex::Horo {
                peripheral,
                member,
                depth,
                ..
            } => {
                let c = &corrections[*peripheral];
                let target = phi(member).mul(&c.conjugator);
                x_g.horo_vertex(c.peripheral, &target, *depth).ok()
            }
        })
        .collect();
    let a = basis.iter().map(Word::len).max().unwrap_or(0);
    let b = corrections
        .iter()
        .map(|c| c.conjugator.len())
        .max()
        .unwrap_or(0);
    Ok(LipschitzMap {
        alpha: a.max(b + 1),
        generator_bound: a,
        conjugator_bound: b,
        corrections,
        mapping,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LipschitzVerdict {
    pub ok: bool,
    pub worst_stretch: usize,
    pub edges_checked: usize,
    pub edges_skipped: usize,
}

/// Largest codomain distance between images of adjacent domain vertices.
pub fn verify_lipschitz(map: &LipschitzMap, domain: &CuspedSpace, codomain: &CuspedSpace) -> LipschitzVerdict {
    let per_vertex: Vec<(usize, usize, usize)> = (0..domain.vertex_count())
        .into_par_iter()
        .map(|u| {
            let (mut worst, mut checked, mut skipped) = (0, 0, 0);
            let later: Vec<usize> = domain
                .neighbors(u)
                .iter()
                .map(|&v| v as usize)
                .filter(|&v| v > u)
                .collect();
            if later.is_empty() {
                return (0, 0, 0);
            }
            let Some(fu) = map.mapping[u] else {
                return (0, 0, later.len());
            };
            let dist = codomain.distances_from(fu);
            for v in later {
                match map.mapping[v] {
                    Some(fv) if dist[fv] != UNREACHED => {
                        worst = worst.max(dist[fv] as usize);
                        checked += 1;
                    }
                    _ => skipped += 1,
                }
            }
            (worst, checked, skipped)
        })
        .collect();
    let worst_stretch = per_vertex.iter().map(|x| x.0).max().unwrap_or(0);
    LipschitzVerdict {
        ok: worst_stretch <= map.alpha,
        worst_stretch,
        edges_checked: per_vertex.iter().map(|x| x.1).sum(),
        edges_skipped: per_vertex.iter().map(|x| x.2).sum(),
    }
}

/// Vertices of the image of a subgroup: its elements in the region plus the
/// horoball vertices above `y·c` for every correction `c`.
pub fn subgroup_image(
    x: &CuspedSpace,
    contains: impl Fn(&Word) -> bool,
    corrections: &[Correction],
    group: &(impl Ambient + ?Sized),
) -> Vec<usize> {
    let mut out = Vec::new();
    for (id, v) in x.vertices().iter().enumerate() {
        if let CuspedVertex::Group(y) = v {
            if !contains(y) {
                continue;
            }
            out.push(id);
            for c in corrections {
                let target = group.times_word(y, &c.conjugator);
                for k in 1..=x.max_depth() {
                    if let Ok(t) = x.horo_vertex(c.peripheral, &target, k) {
                        out.push(t);
                    }
                }
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}
