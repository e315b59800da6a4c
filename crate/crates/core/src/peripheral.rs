//! Height, intersection classes, malnormal core, induced peripheral
//! structure, H-fillings and induced filling kernels.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cusped::{corrections, Correction, PeripheralStructure};
use crate::error::{Error, Result};
use crate::filling::FillingSpec;
use crate::stallings::{cyclic_subgroups_conjugate, Exactness, SubgroupGraph};
use crate::words::Word;

/// `k` essentially distinct conjugates `gHg⁻¹` sharing the nontrivial
/// element `witness`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeightCertificate {
    pub rank: usize,
    pub subgroup: Vec<Word>,
    pub conjugators: Vec<Word>,
    pub witness: Word,
    pub k: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HeightResult {
    pub k: usize,
    pub certificate: HeightCertificate,
    pub exactness: Exactness,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    pub conjugators: Vec<Word>,
    pub intersection: SubgroupGraph,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntersectionClass {
    pub generators: Vec<Word>,
    pub conjugators: Vec<Word>,
    #[serde(skip)]
    pub subgroup: SubgroupGraph,
}

fn least_element(g: &SubgroupGraph) -> Word {
    g.basis().into_iter().min().unwrap_or_else(Word::identity)
}

/// Coset representatives `g ≠ 1`, `|g| <= bound`, with `H ∩ gHg⁻¹` nontrivial.
fn height_candidates(h: &SubgroupGraph, bound: usize) -> Vec<(Word, SubgroupGraph)> {
    h.coset_representatives(bound)
        .into_par_iter()
        .filter(|g| !g.is_identity())
        .filter_map(|g| {
            let conj = h.conjugate(&g);
            (!h.intersect(&conj).is_trivial()).then_some((g, conj))
        })
        .collect()
}

/// Every maximal set of essentially distinct conjugators (identity first,
/// representatives of length `<= bound`) whose conjugates meet nontrivially.
pub fn maximal_chains(h: &SubgroupGraph, bound: usize) -> Vec<Chain> {
    if h.is_trivial() {
        return Vec::new();
    }
    let cands = height_candidates(h, bound);
    let mut out = Vec::new();
    let mut chosen: Vec<usize> = Vec::new();
    dfs(&cands, h.clone(), 0, &mut chosen, &mut out);
    out
}

fn dfs(
    cands: &[(Word, SubgroupGraph)],
    current: SubgroupGraph,
    from: usize,
    chosen: &mut Vec<usize>,
    out: &mut Vec<Chain>,
) {
    let mut maximal = true;
    for (i, (_, conj)) in cands.iter().enumerate() {
        if chosen.contains(&i) {
            continue;
        }
        let next = current.intersect(conj);
        if next.is_trivial() {
            continue;
        }
        maximal = false;
        if i >= from {
            chosen.push(i);
            dfs(cands, next, i + 1, chosen, out);
            chosen.pop();
        }
    }
    if maximal {
        let mut conjugators = vec![Word::identity()];
        conjugators.extend(chosen.iter().map(|&i| cands[i].0.clone()));
        out.push(Chain {
            conjugators,
            intersection: current,
        });
    }
}

pub fn height(h: &SubgroupGraph, bound: usize) -> HeightResult {
    let chains = maximal_chains(h, bound);
    let best = chains
        .iter()
        .max_by(|x, y| {
            x.conjugators
                .len()
                .cmp(&y.conjugators.len())
                .then_with(|| y.conjugators.cmp(&x.conjugators))
        });
    let (k, conjugators, witness) = match best {
        Some(c) => (
            c.conjugators.len(),
            c.conjugators.clone(),
            least_element(&c.intersection),
        ),
        None => (0, Vec::new(), Word::identity()),
    };
    HeightResult {
        k,
        certificate: HeightCertificate {
            rank: h.ambient_rank(),
            subgroup: h.basis(),
            conjugators,
            witness,
            k,
        },
        exactness: Exactness::Bounded(bound),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertificateCheck {
    pub ok: bool,
    pub failures: Vec<String>,
}

/// Replays a height certificate from membership and coset tests only.
pub fn verify_height_certificate(cert: &HeightCertificate) -> CertificateCheck {
    let mut failures = Vec::new();
    let h = SubgroupGraph::from_generators(cert.rank, &cert.subgroup);
    if cert.k != cert.conjugators.len() {
        failures.push(format!(
            "k = {} but {} conjugators are listed",
            cert.k,
            cert.conjugators.len()
        ));
    }
    if cert.k > 0 {
        if cert.witness.is_identity() {
            failures.push("witness is trivial".into());
        }
        if cert.conjugators.first().is_some_and(|g| !g.is_identity()) {
            failures.push("first conjugator is not the identity".into());
        }
    }
    for (i, g) in cert.conjugators.iter().enumerate() {
        for g2 in &cert.conjugators[i + 1..] {
            if h.coset_equal(g, g2) {
                failures.push(format!("{g} and {g2} define the same coset"));
            }
        }
        // witness ∈ gHg⁻¹  ⇔  g⁻¹·witness·g ∈ H
        if !h.contains(&cert.witness.conjugate_by(&g.inverse())) {
            failures.push(format!("witness {} is not in the conjugate by {g}", cert.witness));
        }
    }
    CertificateCheck {
        ok: failures.is_empty(),
        failures,
    }
}

/// `x ∈ H` with `x·u·x⁻¹ = v`, for nontrivial `u, v ∈ H`. Exact: both
/// elements are traced as closed cyclically reduced paths in the subgroup
/// graph, which must agree up to rotation.
pub fn h_conjugator(h: &SubgroupGraph, u: &Word, v: &Word) -> Option<Word> {
    if u.is_identity() || v.is_identity() || !h.contains(u) || !h.contains(v) {
        return None;
    }
    let (cu, du) = u.cyclic_reduce();
    let (cv, dv) = v.cyclic_reduce();
    if cu.len() != cv.len() {
        return None;
    }
    let p = h.read_from(0, &du)?;
    let q = h.read_from(0, &dv)?;
    let letters = cu.letters();
    let mut y = p;
    for i in 0..letters.len() {
        let rotated = Word::from_letters(letters[i..].iter().chain(&letters[..i]).copied());
        if y == q && rotated == cv {
            let s = Word::from_letters(letters[..i].iter().copied());
            return Some(dv.mul(&s.inverse()).mul(&du.inverse()));
        }
        y = h.target(y, letters[i].code())?;
    }
    None
}

/// `x ∈ H` with `x A x⁻¹ = B`. Exact for cyclic subgroups, otherwise searched
/// over elements of `H` of length `<= bound`.
pub fn h_conjugator_subgroups(
    h: &SubgroupGraph,
    a: &SubgroupGraph,
    b: &SubgroupGraph,
    bound: usize,
) -> Option<Word> {
    if a == b {
        return Some(Word::identity());
    }
    match (a.cyclic_generator(), b.cyclic_generator()) {
        (Some(u), Some(v)) => {
            h_conjugator(h, &u, &v).or_else(|| h_conjugator(h, &u, &v.inverse()))
        }
        (None, None) if a.rank() == b.rank() => h
            .elements_up_to(bound)
            .into_iter()
            .find(|x| a.conjugate(x) == *b),
        _ => None,
    }
}

/// ShortLex-least generator of an `H`-conjugate of `⟨u⟩` of the form
/// `ℓ·r·ℓ⁻¹`, where `r` is a rotation of the cyclic core and `ℓ` the least
/// path label to where that rotation starts.
pub fn canonical_cyclic_rep(h: &SubgroupGraph, u: &Word) -> Word {
    let (c, d) = u.cyclic_reduce();
    let Some(mut y) = h.read_from(0, &d) else {
        return u.clone();
    };
    let labels = h.vertex_labels();
    let letters = c.letters();
    let mut best: Option<Word> = None;
    for i in 0..letters.len() {
        let rotated = Word::from_letters(letters[i..].iter().chain(&letters[..i]).copied());
        let cand = rotated.conjugate_by(&labels[y]);
        for x in [cand.inverse(), cand] {
            if best.as_ref().is_none_or(|b| x < *b) {
                best = Some(x);
            }
        }
        y = h.target(y, letters[i].code()).expect("cycle is readable");
    }
    best.unwrap_or_else(|| u.clone())
}

/// Canonical form of a cyclic subgroup up to conjugacy in the free group:
/// least rotation of the cyclic core or of its inverse.
pub fn canonical_free_cyclic(u: &Word) -> Word {
    let (c, _) = u.cyclic_reduce();
    let ci = c.inverse();
    c.rotations()
        .into_iter()
        .chain(ci.rotations())
        .min()
        .expect("nonempty")
}

pub fn infinite_intersection_classes(h: &SubgroupGraph, bound: usize) -> Vec<IntersectionClass> {
    let mut chains = maximal_chains(h, bound);
    chains.sort_by(|x, y| {
        y.conjugators
            .len()
            .cmp(&x.conjugators.len())
            .then_with(|| x.conjugators.cmp(&y.conjugators))
    });
    let mut out: Vec<IntersectionClass> = Vec::new();
    for c in chains {
        if out
            .iter()
            .any(|k| h_conjugator_subgroups(h, &k.subgroup, &c.intersection, bound).is_some())
        {
            continue;
        }
        let subgroup = match c.intersection.cyclic_generator() {
            Some(g) => SubgroupGraph::from_generators(h.ambient_rank(), &[canonical_cyclic_rep(h, &g)]),
            None => c.intersection.clone(),
        };
        out.push(IntersectionClass {
            generators: subgroup.basis(),
            conjugators: c.conjugators,
            subgroup,
        });
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoreEntry {
    pub generators: Vec<Word>,
    pub exactness: Exactness,
    #[serde(skip)]
    pub subgroup: SubgroupGraph,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MalnormalCore {
    pub entries: Vec<CoreEntry>,
}

impl MalnormalCore {
    pub fn subgroups(&self) -> Vec<SubgroupGraph> {
        self.entries.iter().map(|e| e.subgroup.clone()).collect()
    }
}

/// Commensurator of `I` inside `H`.
fn commensurator_in(h: &SubgroupGraph, i: &SubgroupGraph, bound: usize) -> Result<(SubgroupGraph, Exactness)> {
    if i == h {
        return Ok((h.clone(), Exactness::Exact));
    }
    let (comm, ex) = i.commensurator(bound)?;
    Ok((comm.intersect(h), ex))
}

pub fn malnormal_core(h: &SubgroupGraph, bound: usize) -> Result<MalnormalCore> {
    let mut entries: Vec<CoreEntry> = Vec::new();
    for class in infinite_intersection_classes(h, bound) {
        let (comm, exactness) = commensurator_in(h, &class.subgroup, bound)?;
        if entries
            .iter()
            .any(|e| h_conjugator_subgroups(h, &e.subgroup, &comm, bound).is_some())
        {
            continue;
        }
        let subgroup = match comm.cyclic_generator() {
            Some(g) => SubgroupGraph::from_generators(h.ambient_rank(), &[canonical_cyclic_rep(h, &g)]),
            None => comm,
        };
        entries.push(CoreEntry {
            generators: subgroup.basis(),
            exactness,
            subgroup,
        });
    }
    entries.sort_by(|x, y| x.generators.cmp(&y.generators));
    Ok(MalnormalCore { entries })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InducedStructure {
    pub peripherals: Vec<Vec<Word>>,
    pub corrections: Vec<Correction>,
    pub exactness: Exactness,
    #[serde(skip)]
    pub structure: PeripheralStructure,
}

/// Ambient commensurators of the core entries, one per conjugacy class.
pub fn induced_peripheral_structure(
    h: &SubgroupGraph,
    core: &MalnormalCore,
    bound: usize,
) -> Result<InducedStructure> {
    let rank = h.ambient_rank();
    let mut exactness = Exactness::Exact;
    let mut chosen: Vec<SubgroupGraph> = Vec::new();
    for entry in &core.entries {
        let (comm, ex) = entry.subgroup.commensurator(bound)?;
        if ex != Exactness::Exact {
            exactness = ex;
        }
        let comm = match comm.cyclic_generator() {
            Some(g) => SubgroupGraph::from_generators(rank, &[canonical_free_cyclic(&g)]),
            None => comm,
        };
        let duplicate = chosen.iter().any(|p| match (p.cyclic_generator(), comm.cyclic_generator()) {
            (Some(u), Some(v)) => cyclic_subgroups_conjugate(&u, &v),
            _ => p
                .conjugator_into(&comm, bound)
                .is_some_and(|c| comm.conjugate(&c) == *p),
        });
        if !duplicate {
            chosen.push(comm);
        }
    }
    chosen.sort_by_key(|p| p.basis());
    let peripherals: Vec<Vec<Word>> = chosen.iter().map(|p| p.basis()).collect();
    let structure = PeripheralStructure::new(rank, peripherals.clone())?;
    let corrections = corrections(&core.subgroups(), &structure, bound)?;
    Ok(InducedStructure {
        peripherals,
        corrections,
        exactness,
        structure,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FillingFailure {
    /// A conjugate of the kernel is not contained in `H`.
    NotInSubgroup,
    /// A conjugate of the kernel lies in `H` but in no conjugate of a core entry.
    NotInCore,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FillingWitness {
    pub peripheral: usize,
    pub conjugator: Word,
    pub failure: FillingFailure,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HFillingVerdict {
    pub ok: bool,
    pub relevant_conjugators: usize,
    pub witnesses: Vec<FillingWitness>,
    pub exactness: Exactness,
}

/// The conjugates of peripherals that meet `H`, computed once and reused for
/// many candidate fillings.
pub struct HFillingContext<'a> {
    h: &'a SubgroupGraph,
    core: Vec<SubgroupGraph>,
    bound: usize,
    /// `(peripheral, g)` with `H ∩ g P g⁻¹` nontrivial, one `g` per coset `gP`.
    relevant: Vec<(usize, Word)>,
}

impl<'a> HFillingContext<'a> {
    pub fn new(
        h: &'a SubgroupGraph,
        structure: &PeripheralStructure,
        core: &MalnormalCore,
        bound: usize,
    ) -> Self {
        let ball = Word::ball(h.ambient_rank(), bound);
        let mut relevant = Vec::new();
        for (i, p) in structure.peripherals.iter().enumerate() {
            let mut reps: Vec<Word> = ball
                .par_iter()
                .map(|g| p.graph.coset_representative(g))
                .collect();
            reps.sort();
            reps.dedup();
            let hits: Vec<(usize, Word)> = reps
                .into_par_iter()
                .filter(|g| !h.intersect(&p.graph.conjugate(g)).is_trivial())
                .map(|g| (i, g))
                .collect();
            relevant.extend(hits);
        }
        HFillingContext {
            h,
            core: core.subgroups(),
            bound,
            relevant,
        }
    }

    pub fn relevant(&self) -> &[(usize, Word)] {
        &self.relevant
    }

    /// Whether `x ∈ H` lies in `sDs⁻¹` for some `s ∈ H` and core entry `D`.
    fn in_core_conjugate(&self, x: &Word) -> bool {
        if x.is_identity() {
            return true;
        }
        for d in &self.core {
            if d.contains(x) {
                return true;
            }
            match d.cyclic_generator() {
                Some(gen) => {
                    let (cx, _) = x.cyclic_reduce();
                    let (cd, _) = gen.cyclic_reduce();
                    if cx.len() % cd.len() != 0 {
                        continue;
                    }
                    let m = (cx.len() / cd.len()) as i64;
                    for e in [m, -m] {
                        if h_conjugator(self.h, &gen.pow(e), x).is_some() {
                            return true;
                        }
                    }
                }
                None => {
                    let found = self
                        .h
                        .elements_up_to(self.bound)
                        .iter()
                        .any(|s| d.contains(&x.conjugate_by(&s.inverse())));
                    if found {
                        return true;
                    }
                }
            }
        }
        false
    }

    pub fn check(&self, spec: &FillingSpec, structure: &PeripheralStructure) -> Result<HFillingVerdict> {
        let mut witnesses = Vec::new();
        let mut exactness = Exactness::Bounded(self.bound);
        for (i, g) in &self.relevant {
            let (kernel_gens, kex) = spec.kernel_generators(*i, structure, self.bound)?;
            if let Exactness::Bounded(_) = kex {
                exactness = Exactness::Bounded(self.bound);
            }
            let conj: Vec<Word> = kernel_gens.iter().map(|n| n.conjugate_by(g)).collect();
            let failure = if !conj.iter().all(|x| self.h.contains(x)) {
                Some(FillingFailure::NotInSubgroup)
            } else if !conj.iter().all(|x| self.in_core_conjugate(x)) {
                Some(FillingFailure::NotInCore)
            } else {
                None
            };
            if let Some(failure) = failure {
                witnesses.push(FillingWitness {
                    peripheral: *i,
                    conjugator: g.clone(),
                    failure,
                });
            }
        }
        Ok(HFillingVerdict {
            ok: witnesses.is_empty(),
            relevant_conjugators: self.relevant.len(),
            witnesses,
            exactness,
        })
    }
}

/// For every `g` with `|g| <= bound` and `H ∩ gPg⁻¹` nontrivial, checks that
/// `gNg⁻¹ ⊆ sDs⁻¹ ⊆ H` for some `s ∈ H` and core entry `D`.
pub fn is_h_filling(
    h: &SubgroupGraph,
    structure: &PeripheralStructure,
    core: &MalnormalCore,
    spec: &FillingSpec,
    bound: usize,
) -> Result<HFillingVerdict> {
    HFillingContext::new(h, structure, core, bound).check(spec, structure)
}

/// `K_i = c_i N_j c_i⁻¹ ∩ D_i`.
pub fn induced_filling_kernels(
    core: &MalnormalCore,
    induced: &InducedStructure,
    spec: &FillingSpec,
    bound: usize,
) -> Result<Vec<SubgroupGraph>> {
    if induced.corrections.len() != core.entries.len() {
        return Err(Error::Structural(
            "corrections do not match the core".into(),
        ));
    }
    core.entries
        .iter()
        .zip(&induced.corrections)
        .map(|(entry, c)| {
            let (gens, _) = spec.kernel_generators(c.peripheral, &induced.structure, bound)?;
            let rank = entry.subgroup.ambient_rank();
            let n = SubgroupGraph::from_generators(rank, &gens);
            Ok(n.conjugate(&c.conjugator).intersect(&entry.subgroup))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::w;

    fn sub(gens: &[&str]) -> SubgroupGraph {
        SubgroupGraph::from_generators(2, &gens.iter().map(|s| w(s)).collect::<Vec<_>>())
    }

    fn words(ws: &[&str]) -> Vec<Word> {
        ws.iter().map(|s| w(s)).collect()
    }

    #[test]
    fn golden_height() {
        let h = sub(&["aa", "baaaB"]);
        let r = height(&h, 4);
        assert_eq!(r.k, 5);
        // least coset representatives; AB·H = aaB·H
        assert_eq!(r.certificate.conjugators, words(&["1", "a", "B", "aB", "AB"]));
        for (g, e) in r.certificate.conjugators.iter().zip(words(&["1", "a", "B", "aB", "aaB"])) {
            assert!(h.coset_equal(g, &e));
        }
        assert_eq!(r.certificate.witness, w("aaaaaa"));
        assert!(verify_height_certificate(&r.certificate).ok);
    }

    #[test]
    fn literal_conjugator_set_is_rejected() {
        let h = sub(&["aa", "baaaB"]);
        let cert = HeightCertificate {
            rank: 2,
            subgroup: h.basis(),
            conjugators: words(&["1", "a", "b", "aB", "aaB"]),
            witness: w("aaaaaa"),
            k: 5,
        };
        let check = verify_height_certificate(&cert);
        assert!(!check.ok);
        assert_eq!(check.failures.len(), 1);
    }

    #[test]
    fn small_heights() {
        assert_eq!(height(&sub(&["a"]), 4).k, 1);
        assert_eq!(height(&SubgroupGraph::trivial(2), 4).k, 0);
        assert!(verify_height_certificate(&height(&SubgroupGraph::trivial(2), 4).certificate).ok);
        assert_eq!(height(&sub(&["aa", "bb", "ab"]), 3).k, 2);
    }

    #[test]
    fn golden_classes() {
        let h = sub(&["aa", "baaaB"]);
        let classes = infinite_intersection_classes(&h, 4);
        let gens: Vec<Vec<Word>> = classes.iter().map(|c| c.generators.clone()).collect();
        assert_eq!(gens, vec![words(&["aaaaaa"]), words(&["baaaaaaB"])]);
        assert!(classes.iter().all(|c| c.conjugators.len() == 5));
        let malnormal = sub(&["a"]);
        let only = infinite_intersection_classes(&malnormal, 4);
        assert_eq!(only.len(), 1);
        assert_eq!(only[0].subgroup, malnormal);
        let normal = sub(&["aa", "bb", "ab"]);
        let full = infinite_intersection_classes(&normal, 3);
        assert_eq!(full.len(), 1);
        assert_eq!(full[0].subgroup, normal);
        assert_eq!(full[0].conjugators.len(), 2);
    }

    #[test]
    fn golden_core_and_structure() {
        let h = sub(&["aa", "baaaB"]);
        let core = malnormal_core(&h, 4).unwrap();
        let gens: Vec<Vec<Word>> = core.entries.iter().map(|e| e.generators.clone()).collect();
        assert_eq!(gens, vec![words(&["aa"]), words(&["baaaB"])]);
        assert!(core.entries.iter().all(|e| e.exactness == Exactness::Exact));
        let induced = induced_peripheral_structure(&h, &core, 4).unwrap();
        assert_eq!(induced.peripherals, vec![words(&["a"])]);
        let cs: Vec<Word> = induced.corrections.iter().map(|c| c.conjugator.clone()).collect();
        assert_eq!(cs, words(&["1", "b"]));
    }

    #[test]
    fn small_cores() {
        let a = sub(&["a"]);
        let core = malnormal_core(&a, 4).unwrap();
        assert_eq!(core.subgroups(), vec![a.clone()]);
        let ab = sub(&["ab"]);
        let core = malnormal_core(&ab, 3).unwrap();
        let induced = induced_peripheral_structure(&ab, &core, 3).unwrap();
        assert_eq!(induced.peripherals, vec![words(&["ab"])]);
        let induced = induced_peripheral_structure(&a, &malnormal_core(&a, 3).unwrap(), 3).unwrap();
        assert_eq!(induced.peripherals, vec![words(&["a"])]);
    }

    #[test]
    fn h_conjugacy_cycles() {
        let h = sub(&["aa", "baaaB"]);
        let x = h_conjugator(&h, &w("aa"), &w("baaaBaabAAAB")).unwrap();
        assert!(h.contains(&x));
        assert_eq!(w("aa").conjugate_by(&x), w("baaaBaabAAAB"));
        assert!(h_conjugator(&h, &w("aa"), &w("baaaB")).is_none());
        // conjugate in the free group but not in H
        assert!(h_conjugator(&h, &w("aaaaaa"), &w("baaaaaaB")).is_none());
        assert_eq!(canonical_cyclic_rep(&h, &w("baaaBaabAAAB")), w("aa"));
        assert_eq!(canonical_free_cyclic(&w("baB")), w("a"));
        assert_eq!(canonical_free_cyclic(&w("BA")), w("ab"));
    }

    #[test]
    fn h_conjugacy_matches_search() {
        let h = sub(&["aa", "baaaB", "abab"]);
        let elems = h.elements_up_to(6);
        let nontrivial: Vec<&Word> = elems.iter().filter(|x| !x.is_identity()).take(25).collect();
        let conjugators = h.elements_up_to(8);
        for u in &nontrivial {
            for v in &nontrivial {
                let exact = h_conjugator(&h, u, v).is_some();
                let found = conjugators.iter().any(|x| u.conjugate_by(x) == **v);
                if found {
                    assert!(exact, "{u} ~ {v}");
                }
                if let Some(x) = h_conjugator(&h, u, v) {
                    assert!(h.contains(&x));
                    assert_eq!(u.conjugate_by(&x), **v);
                }
            }
        }
    }

    fn golden_setup() -> (SubgroupGraph, MalnormalCore, InducedStructure) {
        let h = sub(&["aa", "baaaB"]);
        let core = malnormal_core(&h, 4).unwrap();
        let induced = induced_peripheral_structure(&h, &core, 4).unwrap();
        (h, core, induced)
    }

    #[test]
    fn h_filling_examples() {
        let (h, core, induced) = golden_setup();
        let p = &induced.structure;
        let six = FillingSpec::new(p, vec![w("aaaaaa")]).unwrap();
        assert!(is_h_filling(&h, p, &core, &six, 4).unwrap().ok);
        let four = FillingSpec::new(p, vec![w("aaaa")]).unwrap();
        let v = is_h_filling(&h, p, &core, &four, 4).unwrap();
        assert!(!v.ok);
        assert_eq!(v.witnesses[0].conjugator, w("b"));
        assert_eq!(v.witnesses[0].failure, FillingFailure::NotInSubgroup);
    }

    #[test]
    fn h_filling_whole_group() {
        let g = SubgroupGraph::whole(2);
        let core = malnormal_core(&g, 2).unwrap();
        let p = PeripheralStructure::new(2, vec![words(&["a"])]).unwrap();
        for e in [1, 2, 5] {
            let spec = FillingSpec::new(&p, vec![Word::generator(0).pow(e)]).unwrap();
            assert!(is_h_filling(&g, &p, &core, &spec, 3).unwrap().ok);
        }
    }

    #[test]
    fn induced_kernels() {
        let (_, core, induced) = golden_setup();
        let spec = FillingSpec::new(&induced.structure, vec![w("aaaaaa")]).unwrap();
        let ks = induced_filling_kernels(&core, &induced, &spec, 4).unwrap();
        assert_eq!(ks, vec![sub(&["aaaaaa"]), sub(&["baaaaaaB"])]);
        let trivial = FillingSpec::new(&induced.structure, vec![Word::identity()]).unwrap();
        let ks = induced_filling_kernels(&core, &induced, &trivial, 4).unwrap();
        assert!(ks.iter().all(SubgroupGraph::is_trivial));
    }
}
