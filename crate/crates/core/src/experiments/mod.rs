//! Configured runs: the pipeline, parameter sweeps, δ estimates and
//! certificate checking.

pub mod certificate;
pub mod config;
pub mod pipeline;
pub mod sweep;

use serde::Serialize;

use crate::cusped::{estimate_delta, CuspedSpace, DeltaEstimate, DeltaMode, FreeGroup, PeripheralStructure, Region};
use crate::error::Result;
use crate::filling::{FillingSpec, QuotientPresentation};

pub use certificate::{verify_certificate_file, verify_certificate_json, Verification};
pub use config::{DeltaSampling, PipelineConfig};
pub use pipeline::{run_pipeline, Report, SCHEMA};
pub use sweep::{sweep, to_csv, SweepRow};

#[derive(Clone, Debug, Serialize)]
pub struct DeltaRun {
    pub schema: &'static str,
    pub presentation: String,
    pub radius: usize,
    pub depth: usize,
    pub vertices: usize,
    pub estimate: DeltaEstimate,
}

/// δ of the cusped space over `F(S)` or, when `exponent` is configured, over
/// the quotient by the corresponding powers of the peripheral generators.
pub fn delta_run(c: &PipelineConfig, seed: u64) -> Result<DeltaRun> {
    let structure = PeripheralStructure::new(c.rank, c.peripherals.clone())?;
    let mode = match c.delta_mode {
        DeltaSampling::Exhaustive => DeltaMode::Exhaustive,
        DeltaSampling::Sample => DeltaMode::Sample {
            quadruples: c.delta_samples,
            seed,
        },
    };
    let region = Region::ball(c.radius);
    let (x, presentation) = match c.exponent {
        Some(n) => {
            let spec = FillingSpec::cyclic_powers(&structure, n as i64)?;
            let q = QuotientPresentation::from_spec(c.rank, &spec)?;
            let fp = q.free_product().ok_or_else(|| {
                crate::error::Error::Structural("delta runs over quotients need a free-product backend".into())
            })?;
            (CuspedSpace::build(&fp, &structure, region, c.depth)?, q.to_string())
        }
        None => {
            let q = QuotientPresentation::build(c.rank, &[])?;
            (
                CuspedSpace::build(&FreeGroup { rank: c.rank }, &structure, region, c.depth)?,
                q.to_string(),
            )
        }
    };
    Ok(DeltaRun {
        schema: SCHEMA,
        presentation,
        radius: c.radius,
        depth: c.depth,
        vertices: x.vertex_count(),
        estimate: estimate_delta(&x, mode)?,
    })
}
