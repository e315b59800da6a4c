//! Grid of filling exponents against ball radii.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::filling::{FillingSpec, QuotientPresentation};
use crate::peripheral::{induced_peripheral_structure, malnormal_core, HFillingContext};
use crate::stallings::SubgroupGraph;
use crate::words::Word;

use super::config::PipelineConfig;
use super::pipeline::separation;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepRow {
    pub exponent: u64,
    pub radius: usize,
    pub h_filling: bool,
    pub ball_injective: bool,
    pub peripheral_injective: bool,
    pub separated: Option<bool>,
}

pub const CSV_HEADER: &str = "exponent,radius,h_filling,ball_injective,peripheral_injective,separated";

/// One row per `(exponent, radius)`, exponents outermost, in the order given.
pub fn sweep(c: &PipelineConfig, exponents: &[u64], radii: &[usize]) -> Result<Vec<SweepRow>> {
    if exponents.is_empty() || radii.is_empty() {
        return Ok(Vec::new());
    }
    let h = c.subgroup_graph();
    let core = malnormal_core(&h, c.conjugator_bound)?;
    let induced = induced_peripheral_structure(&h, &core, c.conjugator_bound)?;
    let structure = &induced.structure;
    let ctx = HFillingContext::new(&h, structure, &core, c.conjugator_bound);
    let g = c.separate.clone().filter(|g| !h.contains(g));

    let per_exponent = exponents
        .par_iter()
        .map(|&n| -> Result<_> {
            let spec = FillingSpec::cyclic_powers(structure, n as i64)?;
            let h_filling = ctx.check(&spec, structure)?.ok;
            let q = QuotientPresentation::from_spec(c.rank, &spec)?;
            let mut peripheral_injective = true;
            for (i, p) in structure.peripherals.iter().enumerate() {
                let (gens, _) = spec.kernel_generators(i, structure, c.conjugator_bound)?;
                let kernel = SubgroupGraph::from_generators(c.rank, &gens);
                let bound = 2 * n as usize * p.generators[0].len();
                peripheral_injective &= q.peripheral_injectivity_check(p, &kernel, bound);
            }
            let separated = match &g {
                Some(g) => Some(separation(c, &h, &q, g)?.separated),
                None => None,
            };
            Ok((h_filling, q, peripheral_injective, separated))
        })
        .collect::<Result<Vec<_>>>()?;

    let cells: Vec<(usize, usize)> = (0..exponents.len())
        .flat_map(|i| (0..radii.len()).map(move |j| (i, j)))
        .collect();
    let rows = cells
        .par_iter()
        .map(|&(i, j)| {
            let (h_filling, q, peripheral_injective, separated) = &per_exponent[i];
            SweepRow {
                exponent: exponents[i],
                radius: radii[j],
                h_filling: *h_filling,
                ball_injective: q.ball_injectivity_check(&Word::ball(c.rank, radii[j])).0,
                peripheral_injective: *peripheral_injective,
                separated: *separated,
            }
        })
        .collect();
    Ok(rows)
}

pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let sep = r.separated.map_or(String::new(), |b| b.to_string());
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.exponent, r.radius, r.h_filling, r.ball_injective, r.peripheral_injective, sep
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config() -> PipelineConfig {
        PipelineConfig::parse("subgroup = aa, baaaB\nseparate = b").unwrap()
    }

    #[test]
    fn example_grid() {
        let rows = sweep(&config(), &[2, 4, 6, 8, 10, 12], &[2, 3]).unwrap();
        assert_eq!(rows.len(), 12);
        for r in &rows {
            assert_eq!(r.h_filling, r.exponent % 6 == 0, "{r:?}");
            assert_eq!(r.ball_injective, r.exponent as usize > 2 * r.radius, "{r:?}");
            assert!(r.peripheral_injective);
        }
        assert_eq!((rows[0].exponent, rows[0].radius), (2, 2));
        assert_eq!((rows[1].exponent, rows[1].radius), (2, 3));
    }

    #[test]
    fn empty_grid_is_header_only() {
        let rows = sweep(&config(), &[], &[2]).unwrap();
        assert_eq!(to_csv(&rows), format!("{CSV_HEADER}\n"));
    }
}
