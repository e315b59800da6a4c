//! Folded subgroup graphs (Stallings automata) for finitely generated
//! subgroups of a free group.
//!
//! Every [`SubgroupGraph`] is folded, trimmed to its core with respect to the
//! basepoint, and numbered by a breadth-first walk from the basepoint in letter
//! order. The numbering is canonical, so two graphs compare equal exactly when
//! they represent the same subgroup.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::words::{Letter, Word};

const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Index {
    Finite(usize),
    Infinite,
}

impl Index {
    pub fn is_finite(self) -> bool {
        matches!(self, Index::Finite(_))
    }
}

/// Whether a search-derived answer is exact or only valid up to a length bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exactness {
    Exact,
    Bounded(usize),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SubgroupGraph {
    rank: usize,
    vertices: usize,
    /// `trans[v * 2 * rank + code]`, `NONE` when undefined.
    trans: Vec<u32>,
}

impl std::fmt::Debug for SubgroupGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let gens: Vec<String> = self.basis().iter().map(|w| w.to_string()).collect();
        write!(f, "<{}>", gens.join(", "))
    }
}

/// Union-find based folding of labelled graphs.
pub(crate) struct Folder {
    width: usize,
    parent: Vec<usize>,
    adj: Vec<Vec<usize>>,
    pending: Vec<(usize, usize)>,
}

impl Folder {
    pub(crate) fn new(rank: usize) -> Self {
        Folder {
            width: 2 * rank,
            parent: Vec::new(),
            adj: Vec::new(),
            pending: Vec::new(),
        }
    }

    pub(crate) fn from_graph(g: &SubgroupGraph) -> Self {
        let mut f = Folder::new(g.rank);
        for _ in 0..g.vertices {
            f.add_vertex();
        }
        for v in 0..g.vertices {
            for code in (0..f.width).step_by(2) {
                if let Some(t) = g.target(v, code) {
                    f.set_half(v, code, t);
                    f.set_half(t, code ^ 1, v);
                }
            }
        }
        f.settle();
        f
    }

    pub(crate) fn add_vertex(&mut self) -> usize {
        let id = self.parent.len();
        self.parent.push(id);
        self.adj.push(vec![usize::MAX; self.width]);
        id
    }

    pub(crate) fn vertex_slots(&self) -> usize {
        self.parent.len()
    }

    pub(crate) fn is_root(&self, x: usize) -> bool {
        self.parent[x] == x
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn set_half(&mut self, u: usize, code: usize, v: usize) {
        let u = self.find(u);
        let existing = self.adj[u][code];
        if existing == usize::MAX {
            self.adj[u][code] = v;
        } else {
            self.pending.push((existing, v));
        }
    }

    fn settle(&mut self) {
        while let Some((x, y)) = self.pending.pop() {
            let (x, y) = (self.find(x), self.find(y));
            if x == y {
                continue;
            }
            let (root, loser) = (x.min(y), x.max(y));
            self.parent[loser] = root;
            let row = std::mem::take(&mut self.adj[loser]);
            for (code, &t) in row.iter().enumerate() {
                if t != usize::MAX {
                    self.set_half(root, code, t);
                }
            }
        }
    }

    pub(crate) fn add_edge(&mut self, u: usize, l: Letter, v: usize) {
        self.set_half(u, l.code(), v);
        self.set_half(v, l.code() ^ 1, u);
        self.settle();
    }

    pub(crate) fn merge(&mut self, u: usize, v: usize) {
        self.pending.push((u, v));
        self.settle();
    }

    /// Adds a path spelling `word` from `from` to `to`, reusing existing edges.
    pub(crate) fn add_path(&mut self, from: usize, word: &Word, to: usize) {
        let letters = word.letters();
        if letters.is_empty() {
            self.merge(from, to);
            return;
        }
        let mut cur = self.find(from);
        for (i, &l) in letters.iter().enumerate() {
            if i + 1 == letters.len() {
                self.add_edge(cur, l, to);
            } else {
                let next = match self.step(cur, l.code()) {
                    Some(t) => t,
                    None => {
                        let t = self.add_vertex();
                        self.add_edge(cur, l, t);
                        t
                    }
                };
                cur = self.find(next);
            }
        }
    }

    pub(crate) fn step(&mut self, u: usize, code: usize) -> Option<usize> {
        let u = self.find(u);
        let t = self.adj[u][code];
        (t != usize::MAX).then(|| self.find(t))
    }

    /// Breadth-first distances from `target` over the folded graph.
    fn distances_to(&mut self, target: usize) -> HashMap<usize, usize> {
        let target = self.find(target);
        let mut dist = HashMap::new();
        dist.insert(target, 0);
        let mut queue = VecDeque::from([target]);
        while let Some(u) = queue.pop_front() {
            let d = dist[&u];
            for code in 0..self.width {
                if let Some(t) = self.step(u, code) {
                    dist.entry(t).or_insert_with(|| {
                        queue.push_back(t);
                        d + 1
                    });
                }
            }
        }
        dist
    }

    /// ShortLex-least label of a path from `from` to `to`.
    fn least_path(&mut self, from: usize, to: usize) -> Option<Word> {
        let dist = self.distances_to(to);
        let mut cur = self.find(from);
        let mut d = *dist.get(&cur)?;
        let mut letters = Vec::with_capacity(d);
        while d > 0 {
            let (code, t) = (0..self.width)
                .find_map(|c| {
                    self.step(cur, c)
                        .filter(|t| dist.get(t) == Some(&(d - 1)))
                        .map(|t| (c, t))
                })
                .expect("a neighbour one step closer exists");
            letters.push(Letter::from_code(code));
            cur = t;
            d -= 1;
        }
        Some(Word::from_reduced(letters))
    }

    /// Trim to the core at `base` and renumber canonically.
    pub(crate) fn finish(mut self, base: usize) -> SubgroupGraph {
        let rank = self.width / 2;
        let base = self.find(base);
        // resolve the component of the basepoint
        let mut comp: HashMap<usize, Vec<usize>> = HashMap::new();
        let mut queue = VecDeque::from([base]);
        comp.insert(base, Vec::new());
        while let Some(u) = queue.pop_front() {
            let row: Vec<usize> = (0..self.width)
                .map(|c| self.step(u, c).unwrap_or(usize::MAX))
                .collect();
            for &t in &row {
                if t != usize::MAX && !comp.contains_key(&t) {
                    comp.insert(t, Vec::new());
                    queue.push_back(t);
                }
            }
            comp.insert(u, row);
        }
        // prune hanging trees
        let degree = |row: &Vec<usize>| row.iter().filter(|&&t| t != usize::MAX).count();
        let mut stack: Vec<usize> = comp
            .iter()
            .filter(|(&v, row)| v != base && degree(row) <= 1)
            .map(|(&v, _)| v)
            .collect();
        stack.sort_unstable();
        while let Some(v) = stack.pop() {
            let Some(row) = comp.remove(&v) else { continue };
            for (code, &t) in row.iter().enumerate() {
                if t == usize::MAX || t == v {
                    continue;
                }
                if let Some(trow) = comp.get_mut(&t) {
                    trow[code ^ 1] = usize::MAX;
                    if t != base && degree(trow) <= 1 {
                        stack.push(t);
                    }
                }
            }
        }
        // canonical numbering
        let mut number: HashMap<usize, u32> = HashMap::new();
        let mut order = vec![base];
        number.insert(base, 0);
        let mut i = 0;
        while i < order.len() {
            let u = order[i];
            for &t in &comp[&u] {
                if t != usize::MAX && !number.contains_key(&t) {
                    number.insert(t, order.len() as u32);
                    order.push(t);
                }
            }
            i += 1;
        }
        let width = self.width;
        let mut trans = vec![NONE; order.len() * width];
        for (new, old) in order.iter().enumerate() {
            for (code, &t) in comp[old].iter().enumerate() {
                if t != usize::MAX {
                    trans[new * width + code] = number[&t];
                }
            }
        }
        SubgroupGraph {
            rank,
            vertices: order.len(),
            trans,
        }
    }
}

impl SubgroupGraph {
    pub fn trivial(rank: usize) -> Self {
        SubgroupGraph {
            rank,
            vertices: 1,
            trans: vec![NONE; 2 * rank],
        }
    }

    /// The whole free group: a bouquet of `rank` loops.
    pub fn whole(rank: usize) -> Self {
        SubgroupGraph::from_generators(rank, &(0..rank).map(Word::generator).collect::<Vec<_>>())
    }

    pub fn from_generators(rank: usize, gens: &[Word]) -> Self {
        let mut f = Folder::new(rank);
        let base = f.add_vertex();
        for g in gens {
            debug_assert!(g.max_generator().is_none_or(|m| m < rank));
            f.add_path(base, g, base);
        }
        f.finish(base)
    }

    /// Ambient alphabet size.
    pub fn ambient_rank(&self) -> usize {
        self.rank
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    /// Number of (positively oriented) edges.
    pub fn edge_count(&self) -> usize {
        (0..self.vertices)
            .map(|v| (0..2 * self.rank).step_by(2).filter(|&c| self.target(v, c).is_some()).count())
            .sum()
    }

    /// Rank of the subgroup, `E - V + 1`.
    pub fn rank(&self) -> usize {
        self.edge_count() + 1 - self.vertices
    }

    pub fn is_trivial(&self) -> bool {
        self.rank() == 0
    }

    #[inline]
    pub fn target(&self, v: usize, code: usize) -> Option<usize> {
        let t = self.trans[v * 2 * self.rank + code];
        (t != NONE).then_some(t as usize)
    }

    pub fn degree(&self, v: usize) -> usize {
        (0..2 * self.rank).filter(|&c| self.target(v, c).is_some()).count()
    }

    pub fn read_from(&self, start: usize, w: &Word) -> Option<usize> {
        let mut v = start;
        for l in w.letters() {
            v = self.target(v, l.code())?;
        }
        Some(v)
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.read_from(0, w) == Some(0)
    }

    pub fn contains_all(&self, ws: &[Word]) -> bool {
        ws.iter().all(|w| self.contains(w))
    }

    pub fn is_subgroup_of(&self, other: &SubgroupGraph) -> bool {
        other.contains_all(&self.basis())
    }

    /// ShortLex-least path label from the basepoint to every vertex.
    pub fn vertex_labels(&self) -> Vec<Word> {
        let mut labels: Vec<Option<Word>> = vec![None; self.vertices];
        labels[0] = Some(Word::identity());
        let mut queue = VecDeque::from([0usize]);
        while let Some(u) = queue.pop_front() {
            for code in 0..2 * self.rank {
                if let Some(t) = self.target(u, code) {
                    if labels[t].is_none() {
                        labels[t] = Some(labels[u].as_ref().unwrap().push(Letter::from_code(code)));
                        queue.push_back(t);
                    }
                }
            }
        }
        labels.into_iter().map(|l| l.expect("connected")).collect()
    }

    /// Spanning-tree edges as `(vertex, code)` pairs in positive orientation.
    fn tree_edges(&self) -> Vec<bool> {
        let w = 2 * self.rank;
        let mut in_tree = vec![false; self.vertices * w];
        let mut seen = vec![false; self.vertices];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(u) = queue.pop_front() {
            for code in 0..w {
                if let Some(t) = self.target(u, code) {
                    if !seen[t] {
                        seen[t] = true;
                        in_tree[u * w + code] = true;
                        in_tree[t * w + (code ^ 1)] = true;
                        queue.push_back(t);
                    }
                }
            }
        }
        in_tree
    }

    /// Non-tree positive edges `(u, code, v)` in canonical order; one basis
    /// element per entry.
    fn basis_edges(&self) -> Vec<(usize, usize, usize)> {
        let in_tree = self.tree_edges();
        let w = 2 * self.rank;
        let mut out = Vec::new();
        for u in 0..self.vertices {
            for code in (0..w).step_by(2) {
                if let Some(t) = self.target(u, code) {
                    if !in_tree[u * w + code] {
                        out.push((u, code, t));
                    }
                }
            }
        }
        out
    }

    /// Free basis read off a breadth-first spanning tree.
    pub fn basis(&self) -> Vec<Word> {
        let labels = self.vertex_labels();
        self.basis_edges()
            .into_iter()
            .map(|(u, code, t)| {
                labels[u]
                    .push(Letter::from_code(code))
                    .mul(&labels[t].inverse())
            })
            .collect()
    }

    /// Rewrite `w ∈ H` as a word in the basis returned by [`basis`](Self::basis)
    /// (basis element `i` becomes generator `i`).
    pub fn express_in_basis(&self, w: &Word) -> Option<Word> {
        let edges = self.basis_edges();
        let width = 2 * self.rank;
        let mut lookup: HashMap<usize, Letter> = HashMap::new();
        for (i, &(u, code, t)) in edges.iter().enumerate() {
            lookup.insert(u * width + code, Letter::new(i, false));
            lookup.insert(t * width + (code ^ 1), Letter::new(i, true));
        }
        let mut v = 0;
        let mut out = Vec::new();
        for l in w.letters() {
            if let Some(&b) = lookup.get(&(v * width + l.code())) {
                out.push(b);
            }
            v = self.target(v, l.code())?;
        }
        (v == 0).then(|| Word::from_letters(out))
    }

    /// Single generator when the subgroup is infinite cyclic.
    pub fn cyclic_generator(&self) -> Option<Word> {
        let b = self.basis();
        (b.len() == 1).then(|| b[0].clone())
    }

    pub fn index(&self) -> Index {
        let complete = (0..self.vertices).all(|v| self.degree(v) == 2 * self.rank);
        if complete {
            Index::Finite(self.vertices)
        } else {
            Index::Infinite
        }
    }

    /// Pullback of the two automata, restricted to the basepoint component.
    pub fn intersect(&self, other: &SubgroupGraph) -> SubgroupGraph {
        assert_eq!(self.rank, other.rank, "intersecting over different alphabets");
        let mut ids: HashMap<(usize, usize), usize> = HashMap::new();
        let mut f = Folder::new(self.rank);
        let base = f.add_vertex();
        ids.insert((0, 0), base);
        let mut queue = VecDeque::from([(0usize, 0usize)]);
        let mut edges = Vec::new();
        while let Some((u, v)) = queue.pop_front() {
            let from = ids[&(u, v)];
            for code in 0..2 * self.rank {
                if let (Some(a), Some(b)) = (self.target(u, code), other.target(v, code)) {
                    let to = match ids.get(&(a, b)) {
                        Some(&id) => id,
                        None => {
                            let id = f.add_vertex();
                            ids.insert((a, b), id);
                            queue.push_back((a, b));
                            id
                        }
                    };
                    if code % 2 == 0 {
                        edges.push((from, code, to));
                    }
                }
            }
        }
        for (u, code, v) in edges {
            f.add_edge(u, Letter::from_code(code), v);
        }
        f.finish(base)
    }

    /// `g H g⁻¹`.
    pub fn conjugate(&self, g: &Word) -> SubgroupGraph {
        let gens: Vec<Word> = self.basis().iter().map(|h| h.conjugate_by(g)).collect();
        SubgroupGraph::from_generators(self.rank, &gens)
    }

    /// `g1 H == g2 H`.
    pub fn coset_equal(&self, g1: &Word, g2: &Word) -> bool {
        self.contains(&(&g2.inverse() * g1))
    }

    /// ShortLex-least element of the left coset `g H`.
    pub fn coset_representative(&self, g: &Word) -> Word {
        let mut f = Folder::from_graph(self);
        let s = f.add_vertex();
        // reading g from s lands on the basepoint
        f.add_path(s, g, 0);
        f.least_path(s, 0).expect("tail is connected to the basepoint")
    }

    /// Distinct left cosets `gH` meeting the ball of the given radius, as
    /// ShortLex-least representatives in increasing order.
    pub fn coset_representatives(&self, radius: usize) -> Vec<Word> {
        let mut reps: Vec<Word> = Word::ball(self.rank, radius)
            .iter()
            .map(|g| self.coset_representative(g))
            .collect();
        reps.sort();
        reps.dedup();
        reps
    }

    /// Elements of the subgroup of length at most `max_len`, ShortLex order.
    pub fn elements_up_to(&self, max_len: usize) -> Vec<Word> {
        let mut out = vec![Word::identity()];
        let mut stack: Vec<(usize, Vec<Letter>)> = vec![(0, Vec::new())];
        while let Some((v, path)) = stack.pop() {
            if path.len() == max_len {
                continue;
            }
            for code in 0..2 * self.rank {
                let l = Letter::from_code(code);
                if path.last() == Some(&l.inverse()) {
                    continue;
                }
                if let Some(t) = self.target(v, code) {
                    let mut p = path.clone();
                    p.push(l);
                    if t == 0 {
                        out.push(Word::from_reduced(p.clone()));
                    }
                    stack.push((t, p));
                }
            }
        }
        out.sort();
        out
    }

    /// Word leading from the basepoint to the nearest vertex of degree at
    /// least three (or the basepoint itself when it lies on the cyclic core).
    fn stem(&self) -> Word {
        if self.is_trivial() || self.degree(0) >= 2 {
            return Word::identity();
        }
        let mut letters = Vec::new();
        let mut cur = 0;
        let mut arrived: Option<usize> = None;
        loop {
            let code = (0..2 * self.rank)
                .find(|&c| self.target(cur, c).is_some() && Some(c ^ 1) != arrived)
                .expect("stem continues");
            letters.push(Letter::from_code(code));
            cur = self.target(cur, code).unwrap();
            arrived = Some(code);
            if self.degree(cur) != 2 {
                break;
            }
        }
        Word::from_reduced(letters)
    }

    /// Index of `sub` in `self`; `None` when `sub` is not a subgroup of `self`.
    pub fn relative_index(&self, sub: &SubgroupGraph) -> Option<Index> {
        if !sub.is_subgroup_of(self) {
            return None;
        }
        if self.is_trivial() {
            return Some(Index::Finite(1));
        }
        let c = self.stem();
        let (big, small) = if c.is_identity() {
            (self.clone(), sub.clone())
        } else {
            let ci = c.inverse();
            (self.conjugate(&ci), sub.conjugate(&ci))
        };
        // label-preserving map small -> big; finite index iff it is a covering
        let mut image = vec![usize::MAX; small.vertices];
        image[0] = 0;
        let mut queue = VecDeque::from([0usize]);
        while let Some(u) = queue.pop_front() {
            for code in 0..2 * small.rank {
                if let Some(t) = small.target(u, code) {
                    let bt = big.target(image[u], code)?;
                    if image[t] == usize::MAX {
                        image[t] = bt;
                        queue.push_back(t);
                    }
                }
            }
        }
        for (u, &iu) in image.iter().enumerate() {
            for code in 0..2 * small.rank {
                if big.target(iu, code).is_some() && small.target(u, code).is_none() {
                    return Some(Index::Infinite);
                }
            }
        }
        Some(Index::Finite(image.iter().filter(|&&v| v == 0).count()))
    }

    /// ShortLex-least `c` with `|c| <= bound` and `self ⊆ c·target·c⁻¹`.
    pub fn conjugator_into(&self, target: &SubgroupGraph, bound: usize) -> Option<Word> {
        let basis = self.basis();
        Word::ball(self.rank, bound)
            .into_iter()
            .find(|c| basis.iter().all(|h| target.contains(&h.conjugate_by(&c.inverse()))))
    }

    pub fn default_commensurator_bound(&self) -> usize {
        2 * self.edge_count() + 4
    }

    /// Commensurator in the ambient free group. Exact for cyclic subgroups;
    /// otherwise generated by `H` and every `g` with `|g| <= bound` such that
    /// `H ∩ gHg⁻¹` has finite index in both.
    pub fn commensurator(&self, bound: usize) -> Result<(SubgroupGraph, Exactness)> {
        if self.is_trivial() {
            return Err(Error::Precondition(
                "commensurator of the trivial subgroup".into(),
            ));
        }
        if let Some(gen) = self.cyclic_generator() {
            let (r, _) = gen.root()?;
            return Ok((SubgroupGraph::from_generators(self.rank, &[r]), Exactness::Exact));
        }
        let mut gens = self.basis();
        for g in self.coset_representatives(bound) {
            if g.is_identity() {
                continue;
            }
            let conj = self.conjugate(&g);
            let meet = self.intersect(&conj);
            let finite_here = self.relative_index(&meet).is_some_and(Index::is_finite);
            let finite_there = conj.relative_index(&meet).is_some_and(Index::is_finite);
            if finite_here && finite_there {
                gens.push(g);
            }
        }
        Ok((
            SubgroupGraph::from_generators(self.rank, &gens),
            Exactness::Bounded(bound),
        ))
    }

    /// Generator words in ASCII format.
    pub fn to_ascii(&self) -> Vec<String> {
        self.basis().iter().map(|w| w.to_string()).collect()
    }
}

/// Whether `⟨u⟩` and `⟨v⟩` are conjugate in the free group.
pub fn cyclic_subgroups_conjugate(u: &Word, v: &Word) -> bool {
    let (cu, _) = u.cyclic_reduce();
    let (cv, _) = v.cyclic_reduce();
    let cvi = cv.inverse();
    cu.len() == cv.len() && cv.rotations().iter().chain(cvi.rotations().iter()).any(|r| *r == cu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::w;

    fn sub(gens: &[&str]) -> SubgroupGraph {
        SubgroupGraph::from_generators(2, &gens.iter().map(|s| w(s)).collect::<Vec<_>>())
    }

    #[test]
    fn from_generators_examples() {
        let h = sub(&["a"]);
        assert_eq!(h.vertex_count(), 1);
        assert_eq!(h.target(0, 0), Some(0));
        let ex = sub(&["aa", "baaaB"]);
        assert_eq!(ex.rank(), 2);
        assert_eq!(ex.vertex_count(), 5);
        assert_eq!(ex.edge_count(), 6);
        assert_eq!(sub(&["a", "A"]), sub(&["a"]));
        assert!(sub(&[]).is_trivial());
    }

    #[test]
    fn membership_examples() {
        assert!(sub(&["aa"]).contains(&w("aaaa")));
        assert!(!sub(&["aa"]).contains(&w("aaa")));
        let ex = sub(&["aa", "baaaB"]);
        assert!(ex.contains(&w("baaaaaaBaa")));
        assert!(!ex.contains(&w("b")));
    }

    #[test]
    fn intersect_examples() {
        assert_eq!(sub(&["aa"]).intersect(&sub(&["aaa"])), sub(&["aaaaaa"]));
        let h = sub(&["aa", "baaaB"]);
        assert_eq!(h.intersect(&h.conjugate(&w("a"))), sub(&["aa"]));
        assert!(h.intersect(&sub(&["b"])).is_trivial());
    }

    #[test]
    fn conjugate_examples() {
        assert_eq!(sub(&["a"]).conjugate(&w("b")), sub(&["baB"]));
        assert_eq!(sub(&["a"]).conjugate(&w("aaaaa")), sub(&["a"]));
        let c = sub(&["aa", "baaaB"]).conjugate(&w("aB"));
        assert!(c.contains(&w("aBaabA")));
        let h = sub(&["aa", "baaaB"]);
        assert_eq!(h.conjugate(&w("aB")).conjugate(&w("bA")), h);
    }

    #[test]
    fn index_examples() {
        assert_eq!(sub(&["aa", "b", "abA"]).index(), Index::Finite(2));
        assert_eq!(sub(&["a"]).index(), Index::Infinite);
        assert_eq!(sub(&["a", "b"]).index(), Index::Finite(1));
        assert_eq!(SubgroupGraph::whole(2).index(), Index::Finite(1));
    }

    #[test]
    fn trivial_and_rank() {
        let t = SubgroupGraph::trivial(2);
        assert!(t.is_trivial());
        assert_eq!(t.rank(), 0);
        assert_eq!((sub(&["aa"]).is_trivial(), sub(&["aa"]).rank()), (false, 1));
        assert_eq!(sub(&["aa", "baaaB"]).rank(), 2);
    }

    #[test]
    fn coset_equal_examples() {
        let a2 = sub(&["aa"]);
        assert!(a2.coset_equal(&w("a"), &w("aaa")));
        assert!(!a2.coset_equal(&w("a"), &w("b")));
        let h = sub(&["aa", "baaaB"]);
        assert!(!h.coset_equal(&w("aB"), &w("aaB")));
    }

    #[test]
    fn coset_representatives_are_shortlex_least() {
        let h = sub(&["aa", "baaaB"]);
        // brute force over the ball of radius 6
        let ball = Word::ball(2, 6);
        for g in Word::ball(2, 3) {
            let rep = h.coset_representative(&g);
            assert!(h.coset_equal(&rep, &g));
            let least = ball.iter().find(|x| h.coset_equal(x, &g)).unwrap();
            assert_eq!(&rep, least, "g = {g}");
        }
        assert_eq!(h.coset_representative(&w("aaaB")), w("B"));
    }

    #[test]
    fn basis_and_rewriting() {
        let h = sub(&["aa", "baaaB"]);
        let basis = h.basis();
        assert_eq!(SubgroupGraph::from_generators(2, &basis), h);
        let x = w("baaaaaaBaa");
        let y = h.express_in_basis(&x).unwrap();
        let back = Word::from_letters(
            y.letters()
                .iter()
                .flat_map(|l| {
                    let b = &basis[l.generator()];
                    let b = if l.is_inverse() { b.inverse() } else { b.clone() };
                    b.letters().to_vec()
                }),
        );
        assert_eq!(back, x);
        assert!(h.express_in_basis(&w("b")).is_none());
    }

    #[test]
    fn relative_index_cases() {
        let h = sub(&["aa", "baaaB"]);
        assert_eq!(h.relative_index(&h), Some(Index::Finite(1)));
        assert_eq!(sub(&["a"]).relative_index(&sub(&["aaa"])), Some(Index::Finite(3)));
        assert_eq!(h.relative_index(&sub(&["aa"])), Some(Index::Infinite));
        // base on a stem
        let p = sub(&["baB"]);
        assert_eq!(p.relative_index(&sub(&["baaaB"])), Some(Index::Finite(3)));
        assert_eq!(p.relative_index(&sub(&["aaa"])), None);
        let f = SubgroupGraph::whole(2);
        assert_eq!(f.relative_index(&sub(&["aa", "b", "abA"])), Some(Index::Finite(2)));
    }

    #[test]
    fn commensurator_examples() {
        assert_eq!(sub(&["aaaaaa"]).commensurator(4).unwrap(), (sub(&["a"]), Exactness::Exact));
        assert_eq!(sub(&["baaaaaaB"]).commensurator(4).unwrap().0, sub(&["baB"]));
        let h = sub(&["aa", "baaaB"]);
        let (c, ex) = h.commensurator(6).unwrap();
        assert_eq!(c, h);
        assert_eq!(ex, Exactness::Bounded(6));
        assert!(SubgroupGraph::trivial(2).commensurator(3).is_err());
        // finite-index overgroup is found
        let k = sub(&["aa", "b", "abA"]);
        assert_eq!(k.commensurator(2).unwrap().0, SubgroupGraph::whole(2));
    }

    #[test]
    fn conjugators() {
        let p = sub(&["a"]);
        assert_eq!(sub(&["aa"]).conjugator_into(&p, 3), Some(Word::identity()));
        assert_eq!(sub(&["baaaB"]).conjugator_into(&p, 3), Some(w("b")));
        assert_eq!(sub(&["b"]).conjugator_into(&p, 3), None);
        assert!(cyclic_subgroups_conjugate(&w("baaaB"), &w("AAA")));
        assert!(cyclic_subgroups_conjugate(&w("ab"), &w("ba")));
        assert!(cyclic_subgroups_conjugate(&w("ab"), &w("BA")));
        assert!(!cyclic_subgroups_conjugate(&w("ab"), &w("aB")));
    }

    #[test]
    fn elements_up_to_matches_filter() {
        let h = sub(&["aa", "baaaB"]);
        let expect: Vec<Word> = Word::ball(2, 8).into_iter().filter(|x| h.contains(x)).collect();
        assert_eq!(h.elements_up_to(8), expect);
    }
}
