//! Deep-excursion dichotomy for geodesics under a filling, and the
//! shortening step that uses it.

use std::collections::{HashSet, VecDeque};

use serde::Serialize;

use crate::cusped::{Ambient, CuspedSpace, CuspedVertex};
use crate::error::{Error, Result};
use crate::peripheral::HFillingVerdict;
use crate::stallings::{Exactness, SubgroupGraph};
use crate::words::Word;

/// Thresholds for one classification run. `delta` is an empirical estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DichotomyParams {
    /// Locality scale; short returns are those within `2·local + 3`.
    pub local: usize,
    /// Depth threshold; excursions deeper than `threshold − 10δ − 2` are examined.
    pub threshold: usize,
    pub delta: f64,
    /// Kernel powers `n^j` with `0 < |j| <= kernel_search` are tried.
    pub kernel_search: usize,
}

impl DichotomyParams {
    pub fn penetration_depth(&self) -> f64 {
        self.threshold as f64 - 10.0 * self.delta - 2.0
    }

    pub fn deep_length(&self) -> f64 {
        2.0 * self.threshold as f64 - 20.0 * self.delta - 4.0
    }

    pub fn short_return(&self) -> usize {
        2 * self.local + 3
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "case", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DichotomyCase {
    /// The projected path, with deep excursions cut at the penetration depth.
    Shortcuttable {
        path: Vec<String>,
        length: usize,
        local_geodesic: bool,
    },
    DeepShortReturn {
        peripheral: usize,
        coset: Word,
        entry: Word,
        exit: Word,
        kernel: Word,
        entry_exit_distance: usize,
        return_distance: usize,
    },
    Inconclusive {
        reason: String,
        depth: Option<usize>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DichotomyReport {
    pub params: DichotomyParams,
    pub excursions: usize,
    pub deep_excursions: usize,
    #[serde(flatten)]
    pub case: DichotomyCase,
}

/// Maps a space over `F(S)` to the space over a quotient.
pub struct Projection<'a> {
    pub source: &'a CuspedSpace,
    pub target: &'a CuspedSpace,
    pub quotient: &'a dyn Ambient,
}

impl Projection<'_> {
    pub fn vertex(&self, id: usize) -> Result<usize> {
        match self.source.vertex(id) {
            CuspedVertex::Group(w) => self.target.group_vertex(&self.quotient.normal_form(w)),
            CuspedVertex::Horo {
                peripheral,
                member,
                depth,
                ..
            } => self
                .target
                .horo_vertex(*peripheral, &self.quotient.normal_form(member), *depth),
        }
    }

    fn path(&self, path: &[usize]) -> Result<Vec<usize>> {
        let mut out: Vec<usize> = Vec::with_capacity(path.len());
        for &v in path {
            let p = self.vertex(v)?;
            if out.last() != Some(&p) {
                out.push(p);
            }
        }
        Ok(out)
    }
}

/// Maximal run of horoball vertices in one horoball, with the group
/// vertices just before and after it.
struct Excursion {
    peripheral: usize,
    coset: Word,
    before: usize,
    after: usize,
    max_depth: usize,
}

fn excursions(x: &CuspedSpace, path: &[usize]) -> Vec<Excursion> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < path.len() {
        if let CuspedVertex::Horo {
            peripheral, coset, ..
        } = x.vertex(path[i])
        {
            let start = i;
            let mut max_depth = 0;
            while i < path.len() {
                match x.vertex(path[i]) {
                    CuspedVertex::Horo {
                        peripheral: p,
                        coset: c,
                        depth,
                        ..
                    } if p == peripheral && c == coset => {
                        max_depth = max_depth.max(*depth);
                        i += 1;
                    }
                    _ => break,
                }
            }
            // a path through horoball vertices always starts and ends at group vertices
            if start > 0 && i < path.len() {
                out.push(Excursion {
                    peripheral: *peripheral,
                    coset: coset.clone(),
                    before: start - 1,
                    after: i,
                    max_depth,
                });
            }
        } else {
            i += 1;
        }
    }
    out
}

fn bfs(x: &CuspedSpace, from: usize, allowed: impl Fn(usize) -> bool) -> Vec<u32> {
    let mut dist = vec![u32::MAX; x.vertex_count()];
    dist[from] = 0;
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        for &v in x.neighbors(u) {
            let v = v as usize;
            if dist[v] == u32::MAX && allowed(v) {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

fn walk_back(x: &CuspedSpace, dist: &[u32], to: usize) -> Vec<usize> {
    let mut path = vec![to];
    let mut cur = to;
    while dist[cur] > 0 {
        cur = x
            .neighbors(cur)
            .iter()
            .map(|&v| v as usize)
            .find(|&v| dist[v] + 1 == dist[cur])
            .expect("predecessor");
        path.push(cur);
    }
    path.reverse();
    path
}

/// Geodesic that at each step moves to the deepest neighbour one closer to
/// the target (least index on ties), so it enters horoballs when it can.
pub fn deep_geodesic(x: &CuspedSpace, from: usize, to: usize) -> Result<Vec<usize>> {
    let dist = bfs(x, to, |_| true);
    if from >= x.vertex_count() || dist[from] == u32::MAX {
        return Err(Error::Structural("endpoints are disconnected".into()));
    }
    let mut path = vec![from];
    let mut cur = from;
    while dist[cur] > 0 {
        cur = x
            .neighbors(cur)
            .iter()
            .map(|&v| v as usize)
            .filter(|&v| dist[v] + 1 == dist[cur])
            .max_by_key(|&v| (x.vertex(v).depth(), std::cmp::Reverse(v)))
            .expect("neighbour one step closer");
        path.push(cur);
    }
    Ok(path)
}

/// Every subpath of length `<= window` is a geodesic.
pub fn is_local_geodesic(x: &CuspedSpace, path: &[usize], window: usize) -> bool {
    for i in 0..path.len() {
        let d = x.distances_from(path[i]);
        for j in 1..=window.min(path.len() - 1 - i) {
            if d[path[i + j]] as usize != j {
                return false;
            }
        }
    }
    true
}

/// Classifies a geodesic `path` of the source space by its deep excursions.
/// `kernels[i]` generate the filling kernel of peripheral `i`.
pub fn classify_geodesic(
    proj: &Projection<'_>,
    path: &[usize],
    kernels: &[Vec<Word>],
    params: DichotomyParams,
) -> Result<DichotomyReport> {
    let x = proj.source;
    let xq = proj.target;
    let report = |case, all: usize, deep: usize| DichotomyReport {
        params,
        excursions: all,
        deep_excursions: deep,
        case,
    };
    if path.is_empty() {
        return Err(Error::EmptyInput("path"));
    }
    if let Some(&v) = path.iter().find(|&&v| x.vertex(v).depth() >= x.max_depth()) {
        return Ok(report(
            DichotomyCase::Inconclusive {
                reason: "path reaches the truncation depth".into(),
                depth: Some(x.vertex(v).depth()),
            },
            0,
            0,
        ));
    }
    let exc = excursions(x, path);
    let cut = params.penetration_depth();
    let deep: Vec<&Excursion> = exc.iter().filter(|e| e.max_depth as f64 > cut).collect();
    let (all, ndeep) = (exc.len(), deep.len());

    // deep short returns take priority
    let mut surgery = Vec::new();
    for e in &deep {
        let g1 = x.vertex(path[e.before]).element().clone();
        let g2 = x.vertex(path[e.after]).element().clone();
        let d12 = (e.after - e.before) as u32;
        let projected = proj.path(&path[e.before..=e.after])?;
        let pq = bfs(xq, projected[0], |_| true);
        let geodesic_image = pq[*projected.last().expect("nonempty")] as usize + 1 == projected.len();
        if geodesic_image {
            continue;
        }
        let from_g1 = x.distances_from(path[e.before]);
        let mut best: Option<(u32, Word)> = None;
        for n in kernel_candidates(&kernels[e.peripheral], params.kernel_search) {
            let Ok(t) = x.group_vertex(&g2.mul(&n)) else {
                continue;
            };
            let d = from_g1[t] as u32;
            if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
                best = Some((d, n));
            }
        }
        match best {
            Some((d, n)) if d as usize <= params.short_return() && d12 as f64 >= params.deep_length() => {
                return Ok(report(
                    DichotomyCase::DeepShortReturn {
                        peripheral: e.peripheral,
                        coset: e.coset.clone(),
                        entry: g1,
                        exit: g2,
                        kernel: n,
                        entry_exit_distance: d12 as usize,
                        return_distance: d as usize,
                    },
                    all,
                    ndeep,
                ))
            }
            _ => surgery.push(*e),
        }
    }

    let mut out: Vec<usize> = Vec::new();
    let mut i = 0;
    let level = cut.max(0.0).floor() as usize;
    for e in &surgery {
        out.extend(proj.path(&path[i..e.before])?);
        let a = proj.vertex(path[e.before])?;
        let b = proj.vertex(path[e.after])?;
        let (p, c) = match xq.vertex(proj.vertex(path[e.before + 1])?) {
            CuspedVertex::Horo {
                peripheral, coset, ..
            } => (*peripheral, coset.clone()),
            CuspedVertex::Group(_) => unreachable!("excursions start in a horoball"),
        };
        let ok = |v: usize| match xq.vertex(v) {
            CuspedVertex::Group(_) => v == b,
            CuspedVertex::Horo {
                peripheral,
                coset,
                depth,
                ..
            } => *peripheral == p && *coset == c && *depth <= level,
        };
        let d = bfs(xq, a, ok);
        if d[b] == u32::MAX {
            return Ok(report(
                DichotomyCase::Inconclusive {
                    reason: "no cut path inside the truncated horoball".into(),
                    depth: Some(level),
                },
                all,
                ndeep,
            ));
        }
        out.extend(walk_back(xq, &d, b));
        out.pop();
        i = e.after;
    }
    out.extend(proj.path(&path[i..])?);
    out.dedup();
    if out.len() > 1 && out.first() == out.last() {
        return Ok(report(
            DichotomyCase::Inconclusive {
                reason: "projection is a nontrivial loop".into(),
                depth: None,
            },
            all,
            ndeep,
        ));
    }
    let window = ((10.0 * params.delta).ceil() as usize).max(1);
    let local_geodesic = is_local_geodesic(xq, &out, window);
    Ok(report(
        DichotomyCase::Shortcuttable {
            path: xq.path_names(&out),
            length: out.len() - 1,
            local_geodesic,
        },
        all,
        ndeep,
    ))
}

fn kernel_candidates(gens: &[Word], search: usize) -> Vec<Word> {
    let mut out: Vec<Word> = gens
        .iter()
        .flat_map(|n| (1..=search as i64).flat_map(move |j| [n.pow(j), n.pow(-j)]))
        .filter(|n| !n.is_identity())
        .collect();
    out.sort();
    out.dedup();
    out
}

/// `K_H`: induced kernels and their conjugates by elements of `H` up to a
/// length bound. A subgroup of the true normal closure.
#[derive(Clone, Debug)]
pub struct KernelClosure {
    pub generators: Vec<Word>,
    pub graph: SubgroupGraph,
    pub exactness: Exactness,
}

impl KernelClosure {
    pub fn new(
        h: &SubgroupGraph,
        kernels: &[SubgroupGraph],
        verdict: &HFillingVerdict,
        bound: usize,
    ) -> Result<Self> {
        if !verdict.ok {
            return Err(Error::Precondition("filling is not an H-filling".into()));
        }
        let conjugators = h.elements_up_to(bound);
        let mut gens: Vec<Word> = kernels
            .iter()
            .flat_map(|k| k.basis())
            .flat_map(|n| conjugators.iter().map(move |s| n.conjugate_by(s)))
            .collect::<HashSet<_>>()
            .into_iter()
            .collect();
        gens.sort();
        let graph = SubgroupGraph::from_generators(h.ambient_rank(), &gens);
        Ok(KernelClosure {
            generators: gens,
            graph,
            exactness: Exactness::Bounded(bound),
        })
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.graph.contains(w)
    }
}

/// `k = g₂·n·g₂⁻¹` from a deep short return on a geodesic `1 → h`; returned
/// only if `k ∈ K_H` and `|kh| < |h|` in the space.
pub fn shorten_witness(
    x: &CuspedSpace,
    k_h: &KernelClosure,
    h: &Word,
    report: &DichotomyReport,
) -> Result<Option<Word>> {
    let DichotomyCase::DeepShortReturn { exit, kernel, .. } = &report.case else {
        return Ok(None);
    };
    let k = kernel.conjugate_by(exit);
    if !k_h.contains(&k) {
        return Ok(None);
    }
    let one = x.group_vertex(&Word::identity())?;
    let (Ok(hv), Ok(khv)) = (x.group_vertex(h), x.group_vertex(&k.mul(h))) else {
        return Ok(None);
    };
    let d = x.distances_from(one);
    Ok((d[khv] < d[hv]).then_some(k))
}

/// Result of repeatedly shortening `h` inside its `K_H`-coset.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShorteningRun {
    pub start: Word,
    pub steps: Vec<Word>,
    pub lengths: Vec<usize>,
    pub end: Word,
}

impl ShorteningRun {
    pub fn strictly_decreasing(&self) -> bool {
        self.lengths.windows(2).all(|w| w[1] < w[0])
    }
}

/// Iterates classification and shortening until no step applies.
pub fn shorten_to_end(
    proj: &Projection<'_>,
    k_h: &KernelClosure,
    kernels: &[Vec<Word>],
    params: DichotomyParams,
    h: &Word,
) -> Result<ShorteningRun> {
    let x = proj.source;
    let one = x.group_vertex(&Word::identity())?;
    let d = x.distances_from(one);
    let mut cur = h.clone();
    let mut steps = Vec::new();
    let mut lengths = vec![d[x.group_vertex(&cur)?] as usize];
    loop {
        let target = x.group_vertex(&cur)?;
        if target == one {
            break;
        }
        let path = deep_geodesic(x, one, target)?;
        let report = classify_geodesic(proj, &path, kernels, params)?;
        match shorten_witness(x, k_h, &cur, &report)? {
            Some(k) => {
                cur = k.mul(&cur);
                lengths.push(d[x.group_vertex(&cur)?] as usize);
                steps.push(k);
            }
            None => break,
        }
    }
    Ok(ShorteningRun {
        start: h.clone(),
        steps,
        lengths,
        end: cur,
    })
}
