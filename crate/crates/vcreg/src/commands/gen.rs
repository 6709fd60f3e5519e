use serde_json::Value;
use vcreg_core::instances::{self, GeneratorSpec, Instance};

use crate::cli::GenArgs;
use crate::error::CliError;
use crate::format;
use crate::report::RunReport;

/// The document `gen` writes: spec, relation, measures and measured
/// parameters. `--in` accepts it directly.
pub fn gen_output(inst: &Instance) -> Value {
    serde_json::json!({
        "spec": inst.spec,
        "hypergraph": format::hypergraph_to_value(&inst.hypergraph),
        "measures": format::measures_to_value(&inst.measures),
        "measured": inst.measured,
    })
}

fn spec_of(a: &GenArgs) -> GeneratorSpec {
    let mut spec = GeneratorSpec::new(a.kind.into(), a.n, a.seed);
    spec.m = a.m;
    spec.k = a.k;
    spec.blocks = a.blocks;
    spec.cap = a.cap;
    spec.shuffle = a.shuffle;
    spec.depth = a.depth;
    spec.parity = a.parity.into();
    spec.ladder_cap = a.ladder_cap;
    spec
}

pub(super) fn run(a: &GenArgs, report: &mut RunReport) -> Result<(), CliError> {
    let spec = spec_of(a);
    if let Value::Object(fields) = serde_json::to_value(&spec).expect("spec serializes") {
        for (k, v) in fields {
            if !v.is_null() {
                report.arg(&k, v.as_str().map(str::to_string).unwrap_or_else(|| v.to_string()));
            }
        }
    }
    let inst = instances::generate(&spec)?;
    let again = instances::generate(&spec)?;
    report.check("regenerates-identically", inst.hypergraph == again.hypergraph);
    let text = format::hypergraph_to_string(&inst.hypergraph);
    let back = format::hypergraph_from_str(&text)?;
    report.check("json-roundtrip", back == inst.hypergraph);
    report.output(&gen_output(&inst));
    Ok(())
}
