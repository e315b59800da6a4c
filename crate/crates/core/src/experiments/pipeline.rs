//! The separation pipeline: height, core, induced structure, filling choice,
//! quotient, separation, quasiconvexity, height-decrease search and the
//! shortening diagnostics, collected into one report.

use serde::Serialize;

use crate::cusped::{build_cusped_space, subgroup_image, CuspedSpace, FreeGroup, PeripheralStructure, Region};
use crate::diagnostics::{
    classify_geodesic, deep_geodesic, shorten_to_end, DichotomyReport, KernelClosure, Projection,
};
use crate::error::{Error, Result};
use crate::filling::{
    bounded_quotient_height, FillingSpec, FreeProductGroup, QuotientHeightSearch, QuotientPresentation,
    QuotientSubgroupGraph, SlopeLength,
};
use crate::peripheral::{
    height, induced_filling_kernels, induced_peripheral_structure, malnormal_core, verify_height_certificate,
    HFillingContext, HFillingVerdict, HeightResult, InducedStructure, MalnormalCore,
};
use crate::stallings::{Exactness, SubgroupGraph};
use crate::words::Word;

use super::config::PipelineConfig;

pub const SCHEMA: &str = "cuspfill.report/1";

#[derive(Clone, Debug, Serialize)]
pub struct HeightStage {
    #[serde(flatten)]
    pub result: HeightResult,
    pub certificate_verified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExponentTrial {
    pub exponent: u64,
    pub h_filling: bool,
    pub ball_injective: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BallCheck {
    pub radius: usize,
    pub ok: bool,
    pub collision: Option<(Word, Word)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InjectivityRadius {
    /// Largest radius at which the ball injects, within the search.
    pub radius: usize,
    pub searched_up_to: usize,
    pub exact: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FillingStage {
    pub least_h_filling_exponent: Option<u64>,
    pub exponent: u64,
    pub spec: FillingSpec,
    pub slope_lengths: Vec<SlopeLength>,
    pub h_filling: HFillingVerdict,
    pub ball_injectivity: BallCheck,
    pub injectivity_radius: InjectivityRadius,
    pub peripheral_injectivity: Vec<bool>,
    pub trials: Vec<ExponentTrial>,
}

#[derive(Clone, Debug, Serialize)]
pub struct QuotientStage {
    pub presentation: String,
    pub quotient: QuotientPresentation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeparationStage {
    pub element: Word,
    /// Exact membership of the image, when normal forms are available.
    pub image_in_subgroup: Option<bool>,
    pub budget: usize,
    pub elements_checked: usize,
    pub collisions: Vec<Word>,
    pub separated: bool,
    pub exactness: Exactness,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuasiconvexityStage {
    pub radius: usize,
    pub depth: usize,
    pub subgroup_vertices: usize,
    pub pairs: usize,
    pub group: usize,
    pub quotient: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct HeightDecreaseStage {
    #[serde(flatten)]
    pub search: QuotientHeightSearch,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShorteningCase {
    pub start: Word,
    pub end: Word,
    pub steps: Vec<Word>,
    pub lengths: Vec<usize>,
    pub strictly_decreasing: bool,
    /// No kernel element checked gives a shorter coset element.
    pub minimal: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShorteningStage {
    pub kernel_exactness: Exactness,
    pub cases: Vec<ShorteningCase>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Verdicts {
    pub height_certified: Option<bool>,
    pub h_filling: Option<bool>,
    pub injective: Option<bool>,
    pub separated: Option<bool>,
    pub height_decrease_consistent: Option<bool>,
    pub shortening: Option<bool>,
}

impl Verdicts {
    fn all(&self) -> [Option<bool>; 6] {
        [
            self.height_certified,
            self.h_filling,
            self.injective,
            self.separated,
            self.height_decrease_consistent,
            self.shortening,
        ]
    }

    /// Every verdict that was reached is positive.
    pub fn all_ok(&self) -> bool {
        self.all().iter().all(|v| v.unwrap_or(true))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub config: PipelineConfig,
    pub height: Option<HeightStage>,
    pub malnormal_core: Option<MalnormalCore>,
    pub induced: Option<InducedStructure>,
    pub filling: Option<FillingStage>,
    pub quotient: Option<QuotientStage>,
    pub separation: Option<SeparationStage>,
    pub quasiconvexity: Option<QuasiconvexityStage>,
    pub height_decrease: Option<HeightDecreaseStage>,
    pub dichotomy: Vec<DichotomyReport>,
    pub shortening: Option<ShorteningStage>,
    pub verdicts: Verdicts,
    pub error: Option<String>,
}

impl Report {
    fn new(config: &PipelineConfig) -> Self {
        Report {
            schema: SCHEMA,
            config: config.clone(),
            height: None,
            malnormal_core: None,
            induced: None,
            filling: None,
            quotient: None,
            separation: None,
            quasiconvexity: None,
            height_decrease: None,
            dichotomy: Vec::new(),
            shortening: None,
            verdicts: Verdicts::default(),
            error: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn exit_code(&self) -> i32 {
        if self.error.is_some() {
            2
        } else if self.verdicts.all_ok() {
            0
        } else {
            1
        }
    }
}

/// Runs every stage. Invalid configurations are an error; failures inside a
/// stage end the run with a partial report.
pub fn run_pipeline(config: &PipelineConfig) -> Result<Report> {
    let g = config.validate_for_pipeline()?;
    let mut report = Report::new(config);
    if let Err(e) = stages(config, &g, &mut report) {
        report.error = Some(e.to_string());
    }
    Ok(report)
}

fn stages(c: &PipelineConfig, g: &Word, report: &mut Report) -> Result<()> {
    let h = c.subgroup_graph();
    let bound = c.conjugator_bound;

    let hr = height(&h, bound);
    let verified = verify_height_certificate(&hr.certificate).ok;
    let k = hr.k;
    report.verdicts.height_certified = Some(verified);
    report.height = Some(HeightStage {
        result: hr,
        certificate_verified: verified,
    });

    let core = malnormal_core(&h, bound)?;
    report.malnormal_core = Some(core.clone());
    let induced = induced_peripheral_structure(&h, &core, bound)?;
    report.induced = Some(induced.clone());
    let structure = &induced.structure;

    let filling = choose_filling(c, &h, structure, &core)?;
    report.verdicts.h_filling = Some(filling.h_filling.ok);
    report.verdicts.injective =
        Some(filling.ball_injectivity.ok && filling.peripheral_injectivity.iter().all(|&b| b));
    let spec = filling.spec.clone();
    report.filling = Some(filling);

    let q = QuotientPresentation::from_spec(c.rank, &spec)?;
    report.quotient = Some(QuotientStage {
        presentation: q.to_string(),
        quotient: q.clone(),
    });

    let sep = separation(c, &h, &q, g)?;
    report.verdicts.separated = Some(sep.separated);
    report.separation = Some(sep);

    report.quasiconvexity = Some(quasiconvexity(c, &h, &induced, &q)?);

    if let Some(fp) = q.free_product() {
        let search = bounded_quotient_height(&fp, &c.subgroup, k.max(1), bound)?;
        report.verdicts.height_decrease_consistent = Some(k == 0 || !search.found);
        let note = if search.found {
            format!("found {} conjugates at bound {bound}", search.target)
        } else {
            format!("no {}-certificate up to conjugator length {bound}; consistent with height below {}", search.target, search.target)
        };
        report.height_decrease = Some(HeightDecreaseStage { search, note });
    }

    if c.shortening_cases > 0 {
        if let Some(fp) = q.free_product() {
            let verdict = report.filling.as_ref().expect("filling stage").h_filling.clone();
            if verdict.ok {
                let (dichotomy, stage) = shortening(c, &h, &core, &induced, &spec, &verdict, &fp)?;
                report.verdicts.shortening = Some(
                    !stage.cases.is_empty()
                        && stage.cases.iter().all(|x| x.strictly_decreasing && x.minimal),
                );
                report.dichotomy = dichotomy;
                report.shortening = Some(stage);
            }
        }
    }
    Ok(())
}

fn ball_check(q: &QuotientPresentation, rank: usize, radius: usize) -> BallCheck {
    let (ok, collision) = q.ball_injectivity_check(&Word::ball(rank, radius));
    BallCheck {
        radius,
        ok,
        collision,
    }
}

fn choose_filling(
    c: &PipelineConfig,
    h: &SubgroupGraph,
    structure: &PeripheralStructure,
    core: &MalnormalCore,
) -> Result<FillingStage> {
    let ctx = HFillingContext::new(h, structure, core, c.conjugator_bound);
    let spec_for = |n: u64| FillingSpec::cyclic_powers(structure, n as i64);
    let mut trials = Vec::new();
    let (least, exponent) = match c.exponent {
        Some(n) => (None, n),
        None => {
            let mut least = None;
            for &n in &c.exponents {
                let ok = ctx.check(&spec_for(n)?, structure)?.ok;
                trials.push(ExponentTrial {
                    exponent: n,
                    h_filling: ok,
                    ball_injective: None,
                });
                if ok {
                    least = Some(n);
                    break;
                }
            }
            let n0 = least.ok_or_else(|| Error::Structural("no exponent in range gives an H-filling".into()))?;
            let mut chosen = None;
            for m in 1..=c.max_multiple.max(1) {
                let n = n0 * m;
                let q = QuotientPresentation::from_spec(c.rank, &spec_for(n)?)?;
                let inj = ball_check(&q, c.rank, c.check_radius).ok;
                trials.push(ExponentTrial {
                    exponent: n,
                    h_filling: true,
                    ball_injective: Some(inj),
                });
                if inj {
                    chosen = Some(n);
                    break;
                }
            }
            (least, chosen.unwrap_or(n0 * c.max_multiple.max(1)))
        }
    };
    let spec = spec_for(exponent)?;
    let h_filling = ctx.check(&spec, structure)?;
    let q = QuotientPresentation::from_spec(c.rank, &spec)?;
    let ball_injectivity = ball_check(&q, c.rank, c.check_radius);
    let limit = (c.check_radius + 4).min(8);
    let mut radius = 0;
    while radius < limit && q.ball_injectivity_check(&Word::ball(c.rank, radius + 1)).0 {
        radius += 1;
    }
    let injectivity_radius = InjectivityRadius {
        radius,
        searched_up_to: limit,
        exact: radius < limit,
    };
    let mut slope_lengths = Vec::new();
    let mut peripheral_injectivity = Vec::new();
    for i in 0..structure.len() {
        let slope = spec.slope_length(i, structure, c.conjugator_bound)?;
        let pbound = match slope {
            SlopeLength::Finite(n) => 2 * n * structure.peripherals[i].generators[0].len(),
            _ => 2 * c.conjugator_bound,
        };
        let (gens, _) = spec.kernel_generators(i, structure, c.conjugator_bound)?;
        let kernel = SubgroupGraph::from_generators(c.rank, &gens);
        peripheral_injectivity.push(q.peripheral_injectivity_check(&structure.peripherals[i], &kernel, pbound));
        slope_lengths.push(slope);
    }
    Ok(FillingStage {
        least_h_filling_exponent: least,
        exponent,
        spec,
        slope_lengths,
        h_filling,
        ball_injectivity,
        injectivity_radius,
        peripheral_injectivity,
        trials,
    })
}

/// `π(g) ∉ π(H)`: exact through normal forms when available, and in any case
/// by comparing `π(g)` with the images of all elements of `H` up to a budget.
pub fn separation(c: &PipelineConfig, h: &SubgroupGraph, q: &QuotientPresentation, g: &Word) -> Result<SeparationStage> {
    let budget = g.len() + c.separation_margin;
    let elems = h.elements_up_to(budget);
    let target = q.reduce(g);
    let collisions: Vec<Word> = elems
        .iter()
        .filter(|x| q.reduce(x) == target || q.equal(x, g))
        .cloned()
        .collect();
    let exact = match q.free_product() {
        Some(fp) => Some(QuotientSubgroupGraph::from_generators(&fp, &c.subgroup)?.contains(g)),
        None => None,
    };
    let separated = collisions.is_empty() && exact != Some(true);
    Ok(SeparationStage {
        element: g.clone(),
        image_in_subgroup: exact,
        budget,
        elements_checked: elems.len(),
        collisions,
        separated,
        exactness: if exact.is_some() {
            Exactness::Exact
        } else {
            Exactness::Bounded(budget)
        },
    })
}

fn quasiconvexity(
    c: &PipelineConfig,
    h: &SubgroupGraph,
    induced: &InducedStructure,
    q: &QuotientPresentation,
) -> Result<QuasiconvexityStage> {
    let structure = &induced.structure;
    let free = FreeGroup { rank: c.rank };
    let x = build_cusped_space(c.rank, structure, Region::ball(c.radius), c.depth)?;
    let y = subgroup_image(&x, |w| h.contains(w), &induced.corrections, &free);
    let pairs = group_pairs(&x, &y);
    let group = x.quasiconvexity(&y, &pairs)?;
    let single_letters = structure
        .peripherals
        .iter()
        .all(|p| p.generators.len() == 1 && p.generators[0].len() == 1);
    let quotient = match q.free_product() {
        Some(fp) if single_letters => {
            let hq = QuotientSubgroupGraph::from_generators(&fp, &c.subgroup)?;
            let xq = CuspedSpace::build(&fp, structure, Region::ball(c.radius), c.depth)?;
            let yq = subgroup_image(&xq, |w| hq.contains(w), &induced.corrections, &fp);
            let pq = group_pairs(&xq, &yq);
            Some(xq.quasiconvexity(&yq, &pq)?)
        }
        _ => None,
    };
    Ok(QuasiconvexityStage {
        radius: c.radius,
        depth: c.depth,
        subgroup_vertices: y.len(),
        pairs: pairs.len(),
        group,
        quotient,
    })
}

fn group_pairs(x: &CuspedSpace, y: &[usize]) -> Vec<(usize, usize)> {
    let members: Vec<usize> = y.iter().copied().filter(|&v| x.vertex(v).depth() == 0).collect();
    let mut out = Vec::new();
    for (i, &p) in members.iter().enumerate() {
        for &q in &members[i + 1..] {
            out.push((p, q));
        }
    }
    out
}

/// Cases `h = k·h₀` with `k` a nontrivial kernel element of the subgroup and
/// `h₀ ∈ H` short, in ShortLex order.
pub fn shortening_inputs(kernels: &[SubgroupGraph], h: &SubgroupGraph, count: usize) -> Vec<(Word, Word)> {
    let mut ks: Vec<Word> = kernels
        .iter()
        .flat_map(|k| k.basis())
        .flat_map(|n| [n.clone(), n.inverse(), n.pow(2)])
        .collect();
    ks.sort();
    ks.dedup();
    let mut out: Vec<(Word, Word)> = Vec::new();
    for h0 in h.elements_up_to(5) {
        for k in &ks {
            out.push((k.mul(&h0), h0.clone()));
        }
    }
    out.sort();
    out.dedup_by(|a, b| a.0 == b.0);
    out.truncate(count);
    out
}

fn shortening(
    c: &PipelineConfig,
    h: &SubgroupGraph,
    core: &MalnormalCore,
    induced: &InducedStructure,
    spec: &FillingSpec,
    verdict: &HFillingVerdict,
    fp: &FreeProductGroup,
) -> Result<(Vec<DichotomyReport>, ShorteningStage)> {
    let structure = &induced.structure;
    let kernels = induced_filling_kernels(core, induced, spec, c.conjugator_bound)?;
    let closure = KernelClosure::new(h, &kernels, verdict, 2)?;
    let kernel_gens = (0..structure.len())
        .map(|i| spec.kernel_generators(i, structure, c.conjugator_bound).map(|x| x.0))
        .collect::<Result<Vec<_>>>()?;
    let depth = c.depth.max(5);
    let mut reports = Vec::new();
    let mut cases = Vec::new();
    for (hw, h0) in shortening_inputs(&kernels, h, c.shortening_cases) {
        let region = Region::around(vec![hw.clone(), h0.clone()], 2);
        let x = build_cusped_space(c.rank, structure, region.clone(), depth)?;
        let xq = CuspedSpace::build(fp, structure, region, depth)?;
        let proj = Projection {
            source: &x,
            target: &xq,
            quotient: fp,
        };
        let one = x.group_vertex(&Word::identity())?;
        let path = deep_geodesic(&x, one, x.group_vertex(&hw)?)?;
        reports.push(classify_geodesic(&proj, &path, &kernel_gens, c.dichotomy)?);
        let run = shorten_to_end(&proj, &closure, &kernel_gens, c.dichotomy, &hw)?;
        let d = x.distances_from(one);
        let end_len = d[x.group_vertex(&run.end)?];
        let minimal = closure
            .generators
            .iter()
            .flat_map(|k| [k.clone(), k.inverse()])
            .filter_map(|k| x.group_vertex(&k.mul(&run.end)).ok())
            .all(|v| d[v] >= end_len);
        cases.push(ShorteningCase {
            strictly_decreasing: run.strictly_decreasing(),
            minimal,
            start: run.start,
            end: run.end,
            steps: run.steps,
            lengths: run.lengths,
        });
    }
    Ok((
        reports,
        ShorteningStage {
            kernel_exactness: closure.exactness,
            cases,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::w;

    fn example(extra: &str) -> PipelineConfig {
        PipelineConfig::parse(&format!("rank = 2\nsubgroup = aa, baaaB\nseparate = b\n{extra}")).unwrap()
    }

    #[test]
    fn worked_example() {
        let r = run_pipeline(&example("shortening_cases = 4")).unwrap();
        assert_eq!(r.error, None);
        assert_eq!(r.height.as_ref().unwrap().result.k, 5);
        let core: Vec<Vec<Word>> = r.malnormal_core.as_ref().unwrap().entries.iter().map(|e| e.generators.clone()).collect();
        assert_eq!(core, vec![vec![w("aa")], vec![w("baaaB")]]);
        assert_eq!(r.induced.as_ref().unwrap().peripherals, vec![vec![w("a")]]);
        let f = r.filling.as_ref().unwrap();
        assert_eq!(f.least_h_filling_exponent, Some(6));
        assert_eq!(f.exponent, 6);
        assert_eq!(r.quotient.as_ref().unwrap().presentation, "⟨a,b | aaaaaa⟩");
        assert!(r.separation.as_ref().unwrap().separated);
        assert_eq!(r.separation.as_ref().unwrap().image_in_subgroup, Some(false));
        assert!(r.verdicts.all_ok(), "{:?}", r.verdicts);
        assert_eq!(r.exit_code(), 0);
        assert!(r.to_json().starts_with("{\n  \"schema\": \"cuspfill.report/1\""));
    }

    #[test]
    fn element_inside_is_rejected() {
        let c = PipelineConfig::parse("subgroup = aa, baaaB\nseparate = aa").unwrap();
        assert!(matches!(run_pipeline(&c), Err(Error::Precondition(_))));
    }

    #[test]
    fn malnormal_cyclic_subgroup() {
        let c = PipelineConfig::parse("subgroup = a\nseparate = b\nshortening_cases = 0").unwrap();
        let r = run_pipeline(&c).unwrap();
        assert_eq!(r.height.as_ref().unwrap().result.k, 1);
        assert_eq!(r.filling.as_ref().unwrap().least_h_filling_exponent, Some(1));
        assert!(r.separation.as_ref().unwrap().separated);
    }

    #[test]
    fn reports_are_deterministic() {
        let c = example("shortening_cases = 2");
        assert_eq!(run_pipeline(&c).unwrap().to_json(), run_pipeline(&c).unwrap().to_json());
    }
}
