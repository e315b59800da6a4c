//! Dehn filling quotients of free groups and their word problems.
//!
//! Two backends are supported. When every relator is a power of a single
//! generator the quotient is a free product of cyclic groups and normal forms
//! are exact. Otherwise the symmetrized relators must satisfy C′(1/6), and
//! Dehn's algorithm decides triviality.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cusped::{Ambient, Peripheral, PeripheralStructure};
use crate::error::{Error, Result};
use crate::stallings::{Exactness, Folder, SubgroupGraph};
use crate::words::{Letter, Word};

/// One kernel generator per peripheral. For cyclic `P = ⟨p⟩` and `n = pᵉ`
/// the kernel is `⟨pᵉ⟩`; otherwise it is the normal closure of `n` in `P`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FillingSpec {
    pub kernels: Vec<Word>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SlopeLength {
    Finite(usize),
    /// No nontrivial kernel element up to the search bound.
    AtLeast(usize),
    /// The kernel is trivial.
    Infinite,
}

impl FillingSpec {
    pub fn new(structure: &PeripheralStructure, kernels: Vec<Word>) -> Result<Self> {
        if kernels.len() != structure.len() {
            return Err(Error::Precondition(format!(
                "{} kernels for {} peripherals",
                kernels.len(),
                structure.len()
            )));
        }
        for (i, (n, p)) in kernels.iter().zip(&structure.peripherals).enumerate() {
            if !p.graph.contains(n) {
                return Err(Error::Precondition(format!(
                    "kernel generator {n} is not in peripheral {i}"
                )));
            }
        }
        Ok(FillingSpec { kernels })
    }

    /// `pᵉ` for every cyclic peripheral `⟨p⟩`.
    pub fn cyclic_powers(structure: &PeripheralStructure, exponent: i64) -> Result<Self> {
        let kernels = structure
            .peripherals
            .iter()
            .map(|p| match p.graph.cyclic_generator() {
                Some(g) => Ok(g.pow(exponent)),
                None => Err(Error::Precondition(
                    "uniform exponents need cyclic peripherals".into(),
                )),
            })
            .collect::<Result<Vec<_>>>()?;
        FillingSpec::new(structure, kernels)
    }

    /// Generators of the kernel in peripheral `i`: exact for cyclic
    /// peripherals, otherwise conjugates of the kernel word by peripheral
    /// elements of length `<= bound`.
    pub fn kernel_generators(
        &self,
        i: usize,
        structure: &PeripheralStructure,
        bound: usize,
    ) -> Result<(Vec<Word>, Exactness)> {
        let n = self
            .kernels
            .get(i)
            .ok_or_else(|| Error::Precondition(format!("no kernel for peripheral {i}")))?;
        if n.is_identity() {
            return Ok((Vec::new(), Exactness::Exact));
        }
        let p = &structure.peripherals[i];
        if p.graph.cyclic_generator().is_some() {
            return Ok((vec![n.clone()], Exactness::Exact));
        }
        let gens = p
            .graph
            .elements_up_to(bound)
            .iter()
            .map(|x| n.conjugate_by(x))
            .collect();
        Ok((gens, Exactness::Bounded(bound)))
    }

    /// Shortest nontrivial kernel element, measured in the chosen
    /// generators of the peripheral.
    pub fn slope_length(&self, i: usize, structure: &PeripheralStructure, bound: usize) -> Result<SlopeLength> {
        let p = &structure.peripherals[i];
        let n = &self.kernels[i];
        if n.is_identity() {
            return Ok(SlopeLength::Infinite);
        }
        if let [g] = p.generators.as_slice() {
            let (cn, _) = n.cyclic_reduce();
            let (cg, _) = g.cyclic_reduce();
            if cn.len() % cg.len() == 0 {
                let e = (cn.len() / cg.len()) as i64;
                if g.pow(e) == *n || g.pow(-e) == *n {
                    return Ok(SlopeLength::Finite(e as usize));
                }
            }
        }
        let (gens, _) = self.kernel_generators(i, structure, bound)?;
        let kernel = SubgroupGraph::from_generators(p.graph.ambient_rank(), &gens);
        let alphabet = p.generators.len();
        for x in Word::ball(alphabet, bound).into_iter().skip(1) {
            let image = Word::from_letters(x.letters().iter().flat_map(|l| {
                let g = &p.generators[l.generator()];
                let g = if l.is_inverse() { g.inverse() } else { g.clone() };
                g.letters().to_vec()
            }));
            if !image.is_identity() && kernel.contains(&image) {
                return Ok(SlopeLength::Finite(x.len()));
            }
        }
        Ok(SlopeLength::AtLeast(bound + 1))
    }

    pub fn relators(&self) -> Vec<Word> {
        self.kernels.iter().filter(|n| !n.is_identity()).cloned().collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PieceReport {
    pub ok: bool,
    pub max_piece: usize,
    pub max_ratio: f64,
    /// Relator attaining the worst ratio.
    pub worst_relator: Option<Word>,
    pub symmetrized: usize,
}

/// Symmetrized closure: every rotation of every relator and of its inverse.
pub fn symmetrize(relators: &[Word]) -> Vec<Word> {
    let mut out: Vec<Word> = relators
        .iter()
        .flat_map(|r| {
            let (c, _) = r.cyclic_reduce();
            let ci = c.inverse();
            let mut v = c.rotations();
            v.extend(ci.rotations());
            v
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

fn common_prefix(u: &Word, v: &Word) -> usize {
    u.letters()
        .iter()
        .zip(v.letters())
        .take_while(|(a, b)| a == b)
        .count()
}

/// Pieces are maximal common prefixes of distinct symmetrized relators; the
/// condition holds when every piece is shorter than a sixth of the relator
/// containing it.
pub fn check_c_prime_sixth(relators: &[Word]) -> Result<PieceReport> {
    if relators.is_empty() {
        return Err(Error::EmptyInput("relator list"));
    }
    if relators.iter().any(Word::is_identity) {
        return Err(Error::EmptyInput("relator"));
    }
    let sym = symmetrize(relators);
    let mut max_piece = 0;
    let mut max_ratio = 0.0f64;
    let mut worst = None;
    let mut ok = true;
    for (i, r) in sym.iter().enumerate() {
        for (j, s) in sym.iter().enumerate() {
            if i == j {
                continue;
            }
            let piece = common_prefix(r, s);
            if 6 * piece >= r.len() {
                ok = false;
            }
            let ratio = piece as f64 / r.len() as f64;
            max_piece = max_piece.max(piece);
            if ratio > max_ratio {
                max_ratio = ratio;
                worst = Some(r.clone());
            }
        }
    }
    Ok(PieceReport {
        ok,
        max_piece,
        max_ratio,
        worst_relator: worst,
        symmetrized: sym.len(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Backend {
    /// Order of each generator; `None` for infinite order.
    FreeProduct { orders: Vec<Option<u64>> },
    SmallCancellation {
        #[serde(skip)]
        symmetrized: Vec<Word>,
        pieces: PieceReport,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuotientPresentation {
    pub rank: usize,
    pub relators: Vec<Word>,
    pub backend: Backend,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl QuotientPresentation {
    pub fn build(rank: usize, relators: &[Word]) -> Result<Self> {
        let relators: Vec<Word> = relators
            .iter()
            .map(|r| r.cyclic_reduce().0)
            .filter(|r| !r.is_identity())
            .collect();
        let single_letter = relators.iter().all(|r| {
            let g = r.letters()[0].generator();
            r.letters().iter().all(|l| l.generator() == g)
        });
        if single_letter {
            let mut orders: Vec<Option<u64>> = vec![None; rank];
            for r in &relators {
                let g = r.letters()[0].generator();
                let n = r.len() as u64;
                orders[g] = Some(orders[g].map_or(n, |m| gcd(m, n)));
            }
            return Ok(QuotientPresentation {
                rank,
                relators,
                backend: Backend::FreeProduct { orders },
            });
        }
        let pieces = check_c_prime_sixth(&relators)?;
        if !pieces.ok {
            let relator = pieces
                .worst_relator
                .as_ref()
                .map_or_else(String::new, Word::to_string);
            return Err(Error::UnsupportedQuotient {
                relator,
                ratio: pieces.max_ratio,
            });
        }
        Ok(QuotientPresentation {
            rank,
            backend: Backend::SmallCancellation {
                symmetrized: symmetrize(&relators),
                pieces,
            },
            relators,
        })
    }

    pub fn from_spec(rank: usize, spec: &FillingSpec) -> Result<Self> {
        QuotientPresentation::build(rank, &spec.relators())
    }

    pub fn is_free_product(&self) -> bool {
        matches!(self.backend, Backend::FreeProduct { .. })
    }

    pub fn free_product(&self) -> Option<FreeProductGroup> {
        match &self.backend {
            Backend::FreeProduct { orders } => Some(FreeProductGroup {
                orders: orders.clone(),
            }),
            Backend::SmallCancellation { .. } => None,
        }
    }

    /// Free reduction followed, for the small-cancellation backend, by
    /// Dehn reduction; normal form for free products.
    pub fn reduce(&self, w: &Word) -> Word {
        match &self.backend {
            Backend::FreeProduct { orders } => FreeProductGroup {
                orders: orders.clone(),
            }
            .normal_form(w),
            Backend::SmallCancellation { symmetrized, .. } => dehn_reduce(symmetrized, w).0,
        }
    }

    pub fn is_trivial(&self, w: &Word) -> bool {
        self.reduce(w).is_identity()
    }

    pub fn equal(&self, u: &Word, v: &Word) -> bool {
        self.is_trivial(&u.mul(&v.inverse()))
    }

    /// Kernel elements of `P` up to length `bound` die, and nothing else does.
    pub fn peripheral_injectivity_check(
        &self,
        p: &Peripheral,
        kernel: &SubgroupGraph,
        bound: usize,
    ) -> bool {
        let elems = p.graph.elements_up_to(bound);
        for (i, x) in elems.iter().enumerate() {
            for y in &elems[i + 1..] {
                let d = x.mul(&y.inverse());
                if !kernel.contains(&d) && self.is_trivial(&d) {
                    return false;
                }
            }
        }
        true
    }

    /// First pair (in the order given) of distinct elements with equal image.
    pub fn ball_injectivity_check(&self, set: &[Word]) -> (bool, Option<(Word, Word)>) {
        if let Backend::FreeProduct { .. } = self.backend {
            let mut seen: HashMap<Word, usize> = HashMap::new();
            let mut first: Option<(usize, usize)> = None;
            for (j, x) in set.iter().enumerate() {
                match seen.get(&self.reduce(x)) {
                    Some(&i) => {
                        if first.is_none_or(|(a, b)| (i, j) < (a, b)) {
                            first = Some((i, j));
                        }
                    }
                    None => {
                        seen.insert(self.reduce(x), j);
                    }
                }
            }
            return match first {
                Some((i, j)) => (false, Some((set[i].clone(), set[j].clone()))),
                None => (true, None),
            };
        }
        for (i, x) in set.iter().enumerate() {
            for y in &set[i + 1..] {
                if x != y && self.equal(x, y) {
                    return (false, Some((x.clone(), y.clone())));
                }
            }
        }
        (true, None)
    }
}

impl fmt::Display for QuotientPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = (0..self.rank)
            .map(|g| Letter::new(g, false).to_char().to_string())
            .collect();
        let rels: Vec<String> = self.relators.iter().map(Word::to_string).collect();
        write!(f, "⟨{} | {}⟩", gens.join(","), rels.join(", "))
    }
}

/// Dehn's algorithm. Returns the reduced word and the number of
/// replacements; each replacement strictly shortens the word.
pub fn dehn_reduce(symmetrized: &[Word], w: &Word) -> (Word, usize) {
    let mut cur = w.clone();
    let mut steps = 0;
    'outer: loop {
        let letters = cur.letters().to_vec();
        for i in 0..letters.len() {
            for r in symmetrized {
                let rl = r.letters();
                let m = letters[i..]
                    .iter()
                    .zip(rl)
                    .take_while(|(a, b)| a == b)
                    .count();
                if 2 * m > rl.len() {
                    let rest = Word::from_letters(rl[m..].iter().copied()).inverse();
                    let next = letters[..i]
                        .iter()
                        .copied()
                        .chain(rest.letters().iter().copied())
                        .chain(letters[i + m..].iter().copied());
                    cur = Word::from_letters(next);
                    steps += 1;
                    continue 'outer;
                }
            }
        }
        return (cur, steps);
    }
}

/// Free product of cyclic groups, one factor per generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeProductGroup {
    pub orders: Vec<Option<u64>>,
}

impl FreeProductGroup {
    pub fn cyclic(rank: usize, generator: usize, order: u64) -> Self {
        let mut orders = vec![None; rank];
        orders[generator] = Some(order);
        FreeProductGroup { orders }
    }

    fn canonical_exponent(&self, g: usize, e: i64) -> i64 {
        match self.orders[g] {
            None => e,
            Some(n) => {
                let n = n as i64;
                let r = e.rem_euclid(n);
                if 2 * r > n {
                    r - n
                } else {
                    r
                }
            }
        }
    }

    fn is_zero(&self, g: usize, e: i64) -> bool {
        match self.orders[g] {
            None => e == 0,
            Some(n) => e.rem_euclid(n as i64) == 0,
        }
    }

    /// Syllables `(generator, exponent)` of the normal form.
    pub fn syllables(&self, w: &Word) -> Vec<(usize, i64)> {
        let mut stack: Vec<(usize, i64)> = Vec::new();
        for l in w.letters() {
            let g = l.generator();
            let s = if l.is_inverse() { -1 } else { 1 };
            match stack.last_mut() {
                Some((h, e)) if *h == g => {
                    *e += s;
                    if self.is_zero(g, *e) {
                        stack.pop();
                    }
                }
                _ => {
                    if !self.is_zero(g, s) {
                        stack.push((g, s));
                    }
                }
            }
        }
        stack
            .into_iter()
            .map(|(g, e)| (g, self.canonical_exponent(g, e)))
            .filter(|&(_, e)| e != 0)
            .collect()
    }

    pub fn normal_form(&self, w: &Word) -> Word {
        let syl = self.syllables(w);
        let mut out = Vec::new();
        for (g, e) in syl {
            let l = Letter::new(g, e < 0);
            out.extend(std::iter::repeat_n(l, e.unsigned_abs() as usize));
        }
        Word::from_letters(out)
    }
}

impl Ambient for FreeProductGroup {
    fn rank(&self) -> usize {
        self.orders.len()
    }

    fn times(&self, x: &Word, l: Letter) -> Word {
        self.normal_form(&x.push(l))
    }

    /// Supported for peripherals generated by a single generator letter:
    /// the coset key strips the trailing syllable of that generator.
    fn coset_key(&self, p: &Peripheral, x: &Word) -> Result<Word> {
        let g = match p.generators.as_slice() {
            [s] if s.len() == 1 => s.letters()[0].generator(),
            _ => {
                return Err(Error::Structural(
                    "quotient cusped spaces need peripherals generated by one letter".into(),
                ))
            }
        };
        let letters = x.letters();
        let keep = letters.len()
            - letters
                .iter()
                .rev()
                .take_while(|l| l.generator() == g)
                .count();
        Ok(Word::from_letters(letters[..keep].iter().copied()))
    }

    fn normal_form(&self, w: &Word) -> Word {
        FreeProductGroup::normal_form(self, w)
    }
}

/// Subgroup of a free product of cyclic groups, as a folded graph in which
/// every component of edges labelled by a finite-order generator is a cycle
/// whose length divides the order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientSubgroupGraph {
    group: FreeProductGroup,
    graph: SubgroupGraph,
}

impl QuotientSubgroupGraph {
    pub fn from_generators(group: &FreeProductGroup, gens: &[Word]) -> Result<Self> {
        let rank = group.orders.len();
        let mut f = Folder::new(rank);
        let base = f.add_vertex();
        for g in gens {
            f.add_path(base, &group.normal_form(g), base);
        }
        complete_cycles(group, &mut f)?;
        Ok(QuotientSubgroupGraph {
            group: group.clone(),
            graph: f.finish(base),
        })
    }

    pub fn graph(&self) -> &SubgroupGraph {
        &self.graph
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.graph.contains(&self.group.normal_form(w))
    }

    pub fn intersect(&self, other: &QuotientSubgroupGraph) -> QuotientSubgroupGraph {
        QuotientSubgroupGraph {
            group: self.group.clone(),
            graph: self.graph.intersect(&other.graph),
        }
    }

    pub fn coset_equal(&self, g1: &Word, g2: &Word) -> bool {
        self.contains(&g2.inverse().mul(g1))
    }

    /// Cycles of finite-order generators: `(length, order)`.
    fn cycles(&self) -> Vec<(usize, u64)> {
        let mut out = Vec::new();
        for (gen, order) in self.group.orders.iter().enumerate() {
            let Some(n) = *order else { continue };
            let mut seen = vec![false; self.graph.vertex_count()];
            for v in 0..self.graph.vertex_count() {
                if seen[v] || self.graph.target(v, 2 * gen).is_none() {
                    continue;
                }
                let mut len = 0;
                let mut u = v;
                loop {
                    seen[u] = true;
                    len += 1;
                    u = self.graph.target(u, 2 * gen).expect("complete cycle");
                    if u == v {
                        break;
                    }
                }
                out.push((len, n));
            }
        }
        out
    }

    /// Subgroup is the free product of the cycle stabilisers and a free group
    /// of rank `b1`; it is infinite when `b1 > 0` or at least two stabilisers
    /// are nontrivial.
    pub fn is_infinite(&self) -> bool {
        let cycles = self.cycles();
        let torsion: std::collections::HashSet<usize> = self
            .group
            .orders
            .iter()
            .enumerate()
            .filter(|(_, o)| o.is_some())
            .map(|(g, _)| g)
            .collect();
        let free_edges: usize = (0..self.graph.vertex_count())
            .map(|v| {
                (0..self.group.orders.len())
                    .filter(|g| !torsion.contains(g) && self.graph.target(v, 2 * g).is_some())
                    .count()
            })
            .sum();
        let membership: usize = cycles.iter().map(|c| c.0).sum();
        let vertices = self.graph.vertex_count() + cycles.len();
        let b1 = (free_edges + membership + 1).saturating_sub(vertices);
        let nontrivial = cycles.iter().filter(|(len, n)| (*len as u64) < *n).count();
        b1 > 0 || nontrivial >= 2
    }

    pub fn is_trivial(&self) -> bool {
        self.graph.vertex_count() == 1 && self.graph.edge_count() == 0
            || (!self.is_infinite() && self.cycles().iter().all(|(len, n)| *len as u64 == *n))
    }
}

/// Elements within `radius` of the identity, ordered by distance then
/// ShortLex.
pub fn quotient_ball(group: &dyn Ambient, radius: usize) -> Vec<Word> {
    let mut layers = vec![vec![Word::identity()]];
    let mut seen: std::collections::HashSet<Word> = layers[0].iter().cloned().collect();
    for _ in 0..radius {
        let mut next = Vec::new();
        for x in layers.last().expect("nonempty") {
            for code in 0..2 * group.rank() {
                let y = group.times(x, Letter::from_code(code));
                if seen.insert(y.clone()) {
                    next.push(y);
                }
            }
        }
        next.sort();
        layers.push(next);
    }
    layers.into_iter().flatten().collect()
}

/// Outcome of searching for `target` essentially distinct conjugates of a
/// subgroup of the quotient with infinite common intersection.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuotientHeightSearch {
    pub target: usize,
    pub found: bool,
    /// Longest chain seen, identity first.
    pub longest_chain: Vec<Word>,
    pub candidates: usize,
    pub exactness: Exactness,
}

/// Depth-first search over coset representatives of length `<= bound`;
/// a negative answer only holds at that bound.
pub fn bounded_quotient_height(
    group: &FreeProductGroup,
    gens: &[Word],
    target: usize,
    bound: usize,
) -> Result<QuotientHeightSearch> {
    let h = QuotientSubgroupGraph::from_generators(group, gens)?;
    let mut reps: Vec<Word> = Vec::new();
    for g in quotient_ball(group, bound) {
        if !reps.iter().any(|r| h.coset_equal(&g, r)) {
            reps.push(g);
        }
    }
    let mut candidates = Vec::new();
    for g in reps.into_iter().filter(|g| !g.is_identity()) {
        let conj: Vec<Word> = gens.iter().map(|x| x.conjugate_by(&g)).collect();
        let c = QuotientSubgroupGraph::from_generators(group, &conj)?;
        if h.intersect(&c).is_infinite() {
            candidates.push((g, c));
        }
    }
    // a finite subgroup has height 0: not even the identity chain counts
    let mut best = Vec::new();
    if h.is_infinite() {
        let mut chain = vec![Word::identity()];
        extend_chain(&candidates, 0, &h, &mut chain, &mut best, target);
    }
    Ok(QuotientHeightSearch {
        target,
        found: best.len() >= target,
        longest_chain: best,
        candidates: candidates.len(),
        exactness: Exactness::Bounded(bound),
    })
}

fn extend_chain(
    candidates: &[(Word, QuotientSubgroupGraph)],
    from: usize,
    current: &QuotientSubgroupGraph,
    chain: &mut Vec<Word>,
    best: &mut Vec<Word>,
    target: usize,
) {
    if chain.len() > best.len() {
        *best = chain.clone();
    }
    if best.len() >= target {
        return;
    }
    for (i, (g, c)) in candidates.iter().enumerate().skip(from) {
        let next = current.intersect(c);
        if next.is_infinite() {
            chain.push(g.clone());
            extend_chain(candidates, i + 1, &next, chain, best, target);
            chain.pop();
            if best.len() >= target {
                return;
            }
        }
    }
}

/// Close every finite-order component into a cycle of length dividing the
/// order, folding as needed, until nothing changes.
fn complete_cycles(group: &FreeProductGroup, f: &mut Folder) -> Result<()> {
    for _round in 0..10_000 {
        let mut changed = false;
        for (gen, order) in group.orders.iter().enumerate() {
            let Some(n) = *order else { continue };
            let n = n as usize;
            let fwd = 2 * gen;
            let back = fwd + 1;
            let roots: Vec<usize> = (0..f.vertex_slots()).filter(|&v| f.is_root(v)).collect();
            let mut seen = std::collections::HashSet::new();
            for v in roots {
                let v = f.find(v);
                if seen.contains(&v) || (f.step(v, fwd).is_none() && f.step(v, back).is_none()) {
                    continue;
                }
                // walk back to the start of a path, or all the way round a cycle
                let mut start = v;
                let mut is_cycle = false;
                while let Some(p) = f.step(start, back) {
                    start = p;
                    if start == v {
                        is_cycle = true;
                        break;
                    }
                }
                let mut comp = vec![start];
                let mut u = start;
                while let Some(t) = f.step(u, fwd) {
                    if t == start {
                        is_cycle = true;
                        break;
                    }
                    comp.push(t);
                    u = t;
                }
                seen.extend(comp.iter().copied());
                if is_cycle {
                    let m = comp.len();
                    if !n.is_multiple_of(m) {
                        let d = gcd(m as u64, n as u64) as usize;
                        for i in 0..m {
                            f.merge(comp[i], comp[(i + d) % m]);
                        }
                        changed = true;
                        break;
                    }
                } else if comp.len() > n {
                    for i in 0..comp.len() - n {
                        f.merge(comp[i], comp[i + n]);
                    }
                    changed = true;
                    break;
                } else {
                    // a path on comp.len() <= n vertices: close it up
                    let mut last = *comp.last().expect("nonempty");
                    for _ in comp.len()..n {
                        let t = f.add_vertex();
                        f.add_edge(last, Letter::from_code(fwd), t);
                        last = t;
                    }
                    f.add_edge(last, Letter::from_code(fwd), comp[0]);
                    changed = true;
                    break;
                }
            }
            if changed {
                break;
            }
        }
        if !changed {
            return Ok(());
        }
    }
    Err(Error::Structural("cycle completion did not stabilise".into()))
}
