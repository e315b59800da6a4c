//! Independent re-verification of emitted certificates and reports.
//!
//! Accepts either a bare height certificate or a pipeline report. For a
//! report, the height certificate, the filling kernels, the H-filling
//! verdict and the separation verdict are recomputed from the embedded
//! configuration with primitive membership and normal-form checks only.

use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::cusped::PeripheralStructure;
use crate::error::{Error, Result};
use crate::filling::{FillingSpec, QuotientPresentation};
use crate::peripheral::{malnormal_core, verify_height_certificate, HFillingContext, HeightCertificate};
use crate::stallings::SubgroupGraph;
use crate::words::Word;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Verification {
    pub ok: bool,
    pub checks: Vec<(String, bool)>,
    pub failures: Vec<String>,
}

impl Verification {
    fn record(&mut self, name: &str, ok: bool) {
        self.checks.push((name.to_string(), ok));
    }

    fn finish(mut self) -> Self {
        self.ok = self.checks.iter().all(|(_, ok)| *ok);
        self
    }
}

pub fn verify_certificate_file(path: &Path) -> Result<Verification> {
    verify_certificate_json(&std::fs::read_to_string(path)?)
}

pub fn verify_certificate_json(text: &str) -> Result<Verification> {
    let value: Value = serde_json::from_str(text)?;
    if value.get("schema").is_some() {
        verify_report(&value)
    } else {
        let cert: HeightCertificate = serde_json::from_value(value)?;
        Ok(verify_height(&cert))
    }
}

fn verify_height(cert: &HeightCertificate) -> Verification {
    let check = verify_height_certificate(cert);
    let mut v = Verification::default();
    v.record("height_certificate", check.ok);
    v.failures = check.failures;
    v.finish()
}

fn field<T: serde::de::DeserializeOwned>(v: &Value, path: &[&str]) -> Result<T> {
    let mut cur = v;
    for key in path {
        cur = cur
            .get(key)
            .ok_or_else(|| Error::MalformedInput(format!("report is missing {}", path.join("."))))?;
    }
    Ok(serde_json::from_value(cur.clone())?)
}

fn verify_report(report: &Value) -> Result<Verification> {
    let mut v = Verification::default();
    let rank: usize = field(report, &["config", "rank"])?;
    let bound: usize = field(report, &["config", "conjugator_bound"])?;
    let gens: Vec<Word> = field(report, &["config", "subgroup"])?;
    let h = SubgroupGraph::from_generators(rank, &gens);

    if report.get("height").is_some_and(|x| !x.is_null()) {
        let cert: HeightCertificate = field(report, &["height", "certificate"])?;
        let check = verify_height_certificate(&cert);
        v.record("height_certificate", check.ok);
        v.record("height_subgroup_matches", cert.subgroup == gens);
        v.failures.extend(check.failures);
    }

    let has_filling = report.get("filling").is_some_and(|x| !x.is_null());
    if has_filling {
        let peripherals: Vec<Vec<Word>> = field(report, &["induced", "peripherals"])?;
        let structure = PeripheralStructure::new(rank, peripherals)?;
        let kernels: Vec<Word> = field(report, &["filling", "spec", "kernels"])?;
        let spec = FillingSpec::new(&structure, kernels);
        v.record("kernels_in_peripherals", spec.is_ok());
        if let Ok(spec) = spec {
            let claimed: bool = field(report, &["filling", "h_filling", "ok"])?;
            let core = malnormal_core(&h, bound)?;
            let actual = HFillingContext::new(&h, &structure, &core, bound).check(&spec, &structure)?.ok;
            v.record("h_filling_verdict", claimed == actual);

            if report.get("separation").is_some_and(|x| !x.is_null()) {
                let g: Word = field(report, &["separation", "element"])?;
                let claimed: bool = field(report, &["separation", "separated"])?;
                let budget: usize = field(report, &["separation", "budget"])?;
                let q = QuotientPresentation::from_spec(rank, &spec)?;
                let collides = h.elements_up_to(budget).iter().any(|x| q.equal(x, &g));
                let exact_inside = match q.free_product() {
                    Some(fp) => {
                        crate::filling::QuotientSubgroupGraph::from_generators(&fp, &gens)?.contains(&g)
                    }
                    None => false,
                };
                v.record("separation_verdict", claimed == (!collides && !exact_inside));
            }
        }
    }
    if v.checks.is_empty() {
        return Err(Error::MalformedInput("report contains nothing to verify".into()));
    }
    Ok(v.finish())
}
