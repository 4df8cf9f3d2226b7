use std::io;
use std::time::Instant;

use log::warn;

use dsum_core::builders::{predicted_gate_count, BuilderKind};
use dsum_core::Error;

use crate::{BenchArgs, Failure};

const HEADER: [&str; 9] = [
    "b",
    "p",
    "q",
    "builder",
    "inputs",
    "adds",
    "outputs",
    "predicted_adds",
    "build_ms",
];

fn csv_failure(e: csv::Error) -> Failure {
    Failure::Input(format!("cannot write CSV: {e}"))
}

/// One row per builder and height. Builders that trip the scale guard are
/// skipped with a warning; `predicted_adds` is empty where no closed form is
/// known.
pub fn run(args: &BenchArgs) -> Result<(), Failure> {
    if args.max_b == 0 {
        return Err(Failure::Usage("--max-b must be at least 1".into()));
    }
    let sink: Box<dyn io::Write> = match &args.csv {
        Some(path) => Box::new(
            std::fs::File::create(path)
                .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))?,
        ),
        None => Box::new(io::stdout().lock()),
    };
    let mut out = csv::Writer::from_writer(sink);
    out.write_record(HEADER).map_err(csv_failure)?;
    let (p, q) = (args.p, args.q);
    for b in 1..=args.max_b {
        for kind in BuilderKind::ALL {
            if !kind.supports(b, p, q) {
                continue;
            }
            let start = Instant::now();
            let circuit = match kind.build(b, p, q) {
                Ok(c) => c,
                Err(Error::ScaleGuard(msg)) => {
                    warn!("skipping {kind} at b={b}: {msg}");
                    continue;
                }
                Err(e) => return Err(e.into()),
            };
            let ms = start.elapsed().as_secs_f64() * 1e3;
            let counts = circuit.gate_counts();
            let predicted = match kind {
                BuilderKind::Pq => predicted_gate_count(b, p, q)?.adds.to_string(),
                BuilderKind::Valiant => (3 * (1u64 << b) - 6).to_string(),
                _ => String::new(),
            };
            out.write_record([
                b.to_string(),
                p.to_string(),
                q.to_string(),
                kind.to_string(),
                counts.inputs.to_string(),
                counts.accounted_adds().to_string(),
                counts.outputs.to_string(),
                predicted,
                format!("{ms:.3}"),
            ])
            .map_err(csv_failure)?;
        }
    }
    out.flush()
        .map_err(|e| Failure::Input(format!("cannot write CSV: {e}")))
}
