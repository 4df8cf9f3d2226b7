use std::fs;
use std::io::{self, BufRead, Write};
use std::path::Path;

use log::info;

use dsum_core::algebra::{
    CountWeightSemiring, FreeMultiset, MaxWeight, MinPlus, NatSum, WitnessMax, WordSum,
};
use dsum_core::apps::featsel::{featsel_precompute, featsel_query_forced};
use dsum_core::apps::kpath::kpath_count;
use dsum_core::apps::permanent::permanent as permanent_of;
use dsum_core::builders::{predicted_gate_count, BuilderKind};
use dsum_core::circuit::Circuit;
use dsum_core::formats::{
    format_output_table, infer_ground_size, parse_graph, parse_intersection_table, parse_matrix,
    parse_scores, SemiringName, ValueText,
};
use dsum_core::summation::{intersection_sum, Mode, OutputTable};
use dsum_core::universe::{Subset, Universe};

use crate::{BuildArgs, EvalArgs, FeatselArgs, Failure, KpathArgs, PermanentArgs};

pub fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => write_bytes(p, text.as_bytes()),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Failure::Input(format!("cannot write stdout: {e}")))
        }
    }
}

fn mode(parallel: bool) -> Mode {
    if parallel {
        Mode::ParallelCircuit
    } else {
        Mode::Circuit
    }
}

pub fn build(args: &BuildArgs) -> Result<(), Failure> {
    let universe = Universe::new(args.n)?;
    let kind: BuilderKind = args.builder.parse()?;
    let b = universe.height();
    let circuit = kind.build(b, args.p, args.q)?.with_logical_size(args.n)?;
    if args.stats {
        let counts = circuit.gate_counts();
        println!(
            "inputs={} adds={} outputs={}",
            counts.inputs,
            counts.accounted_adds(),
            counts.outputs
        );
        if kind == BuilderKind::Pq {
            let want = predicted_gate_count(b, args.p, args.q)?;
            let got = (counts.inputs, counts.accounted_adds(), counts.outputs);
            if got != (want.inputs, want.adds, want.outputs) {
                return Err(Failure::Mismatch(format!(
                    "gate counts {got:?} differ from the closed form {:?}",
                    (want.inputs, want.adds, want.outputs)
                )));
            }
        }
    }
    if let Some(path) = &args.dot {
        write_bytes(path, circuit.to_dot().as_bytes())?;
    }
    if let Some(path) = &args.out {
        write_bytes(path, &circuit.serialize())?;
    } else if !args.stats && args.dot.is_none() {
        emit(None, &String::from_utf8_lossy(&circuit.serialize()))?;
    }
    Ok(())
}

/// Runs `$body` with `$c` bound to the named contract.
macro_rules! with_contract {
    ($name:expr, $c:ident => $body:expr) => {
        match $name {
            SemiringName::NatSum => {
                let $c = &NatSum;
                $body
            }
            SemiringName::Max => {
                let $c = &MaxWeight;
                $body
            }
            SemiringName::MinPlus => {
                let $c = &MinPlus;
                $body
            }
            SemiringName::CountWeight => {
                let $c = &CountWeightSemiring;
                $body
            }
            SemiringName::Multiset => {
                let $c = &FreeMultiset::<String>::new();
                $body
            }
            SemiringName::WordSum => {
                let $c = &WordSum::<char>::new();
                $body
            }
            SemiringName::WitnessMax => {
                let $c = &WitnessMax::<Subset>::new();
                $body
            }
        }
    };
}

fn eval_with<S: ValueText>(
    contract: &S,
    circuit: &Circuit,
    text: &str,
    direct: bool,
    parallel: bool,
) -> Result<String, Failure> {
    let n = circuit.n();
    let g = parse_intersection_table(text, n, circuit.p(), circuit.q(), contract)?;
    let table: OutputTable<S::Value> = if direct {
        if Universe::new(n)?.height() != circuit.height() {
            return Err(Failure::Usage(format!(
                "--direct needs a circuit of height {} for n={n}",
                Universe::new(n)?.height()
            )));
        }
        intersection_sum(&g, contract, Mode::Direct)?
    } else {
        let values = if parallel {
            circuit.evaluate_parallel(contract, g.entries())?
        } else {
            circuit.evaluate(contract, g.entries())?
        };
        values
            .into_iter()
            .filter(|(label, _)| label.members().iter().all(|&x| x < n))
            .collect()
    };
    Ok(format_output_table(&table, contract))
}

pub fn eval(args: &EvalArgs, parallel: bool) -> Result<(), Failure> {
    let name: SemiringName = args.semiring.parse()?;
    let bytes = fs::read(&args.circuit)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", args.circuit.display())))?;
    let circuit = Circuit::deserialize(&bytes)?;
    let text = read_text(&args.input)?;
    let out = with_contract!(name, c => eval_with(c, &circuit, &text, args.direct, parallel)?);
    emit(args.out.as_deref(), &out)
}

pub fn kpath(args: &KpathArgs, parallel: bool) -> Result<(), Failure> {
    let graph = parse_graph(&read_text(&args.graph)?, args.directed)?;
    let best = kpath_count(&graph, args.s, args.t, args.k, mode(parallel))?;
    if best.count == 0 {
        println!("no path");
    } else {
        println!("count={} weight={}", best.count, best.weight);
    }
    Ok(())
}

pub fn permanent(args: &PermanentArgs, parallel: bool) -> Result<(), Failure> {
    let name: SemiringName = args.semiring.parse()?;
    let text = read_text(&args.matrix)?;
    let m = mode(parallel);
    let out = match name {
        SemiringName::NatSum => run_permanent(&NatSum, &text, m)?,
        SemiringName::Max => run_permanent(&MaxWeight, &text, m)?,
        SemiringName::MinPlus => run_permanent(&MinPlus, &text, m)?,
        SemiringName::CountWeight => run_permanent(&CountWeightSemiring, &text, m)?,
        SemiringName::WordSum => run_permanent(&WordSum::<char>::new(), &text, m)?,
        SemiringName::Multiset | SemiringName::WitnessMax => {
            return Err(Failure::Usage(format!("{name} has no product; pick a semiring")))
        }
    };
    println!("{out}");
    Ok(())
}

fn run_permanent<S>(semiring: &S, text: &str, mode: Mode) -> Result<String, Failure>
where
    S: ValueText + dsum_core::algebra::Semiring,
{
    let matrix = parse_matrix(text, semiring)?;
    let value = permanent_of(&matrix, semiring, mode)?;
    Ok(semiring.format_value(&value))
}

pub fn featsel(args: &FeatselArgs, parallel: bool) -> Result<(), Failure> {
    let text = read_text(&args.scores)?;
    let n = match args.n {
        Some(n) => n,
        None => infer_ground_size(&text)?,
    };
    let scores = parse_scores(&text, n)?;
    let table = featsel_precompute(&scores, args.p, args.q, mode(parallel))?;
    info!("precomputed answers for |E| ≤ {} with {} ⊕", args.q, table.ops());
    let level = table.universe().height();
    let formatter = WitnessMax::<Subset>::new();
    let stdin = io::stdin();
    let mut out = io::stdout().lock();
    for (i, line) in stdin.lock().lines().enumerate() {
        let line = line.map_err(|e| Failure::Input(format!("cannot read stdin: {e}")))?;
        let query = line.trim();
        if query.is_empty() || query.starts_with('#') {
            continue;
        }
        let at = |e: dsum_core::Error| Failure::from(e).with_context(format!("query {}", i + 1));
        let (forced, excluded) = match query.split_once('|') {
            Some((f, e)) => (
                Subset::parse(f, level).map_err(at)?,
                Subset::parse(e, level).map_err(at)?,
            ),
            None => (Subset::empty(level), Subset::parse(query, level).map_err(at)?),
        };
        let answer = featsel_query_forced(&table, &forced, &excluded).map_err(at)?;
        let text = match answer {
            Some(best) => formatter.format_value(&best),
            None => "empty".to_owned(),
        };
        writeln!(out, "{text}").map_err(|e| Failure::Input(format!("cannot write stdout: {e}")))?;
    }
    Ok(())
}

impl Failure {
    fn with_context(self, context: String) -> Failure {
        match self {
            Failure::Usage(m) => Failure::Usage(format!("{context}: {m}")),
            Failure::Input(m) => Failure::Input(format!("{context}: {m}")),
            Failure::Numeric(m) => Failure::Numeric(format!("{context}: {m}")),
            Failure::Mismatch(m) => Failure::Mismatch(format!("{context}: {m}")),
        }
    }
}
