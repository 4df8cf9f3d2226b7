//! Monotone arithmetic circuits: a topologically ordered list of input gates
//! and binary `⊕` gates, with labelled outputs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use rayon::prelude::*;
use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::algebra::{oplus, Adjoined, Semigroup};
use crate::universe::Subset;
use crate::{Error, Result};

pub type GateId = usize;

/// Input label `(I, X)`: `I ⊆ X` marks the elements of `X` that are
/// individualized.
pub type Label = (Subset, Subset);

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Gate {
    Input { active: Subset, set: Subset },
    Add { left: GateId, right: GateId },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    n: u64,
    b: u8,
    p: usize,
    q: usize,
    gates: Vec<Gate>,
    outputs: BTreeMap<Subset, GateId>,
}

/// Gate tallies. `adds` counts physical `⊕` gates; `passthrough_outputs`
/// counts output labels wired straight to an input gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GateCounts {
    pub inputs: u64,
    pub adds: u64,
    pub outputs: u64,
    pub passthrough_outputs: u64,
}

impl GateCounts {
    /// `⊕` count under the one-output-gate-per-label convention: an output
    /// that merely forwards an input is still charged one gate.
    pub fn accounted_adds(&self) -> u64 {
        self.adds + self.passthrough_outputs
    }
}

/// First structural problem found by [`Circuit::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    OperandOrder { gate: GateId, operand: GateId },
    DuplicateInput { gate: GateId, label: String },
    LabelBounds { gate: GateId, label: String },
    DanglingOutput { output: String, gate: GateId },
    OutputBounds { output: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::OperandOrder { gate, operand } => {
                write!(f, "operand order: gate {gate} reads gate {operand}")
            }
            Violation::DuplicateInput { gate, label } => {
                write!(f, "duplicate input: gate {gate} repeats label {label}")
            }
            Violation::LabelBounds { gate, label } => {
                write!(f, "label bounds: gate {gate} has label {label}")
            }
            Violation::DanglingOutput { output, gate } => {
                write!(f, "dangling output: {output} points at missing gate {gate}")
            }
            Violation::OutputBounds { output } => {
                write!(f, "output bounds: output label {output}")
            }
        }
    }
}

impl std::error::Error for Violation {}

impl Circuit {
    /// An empty circuit over `2^b` leaves.
    pub fn empty(b: u8, p: usize, q: usize) -> Self {
        Circuit {
            n: 1u64 << b,
            b,
            p,
            q,
            gates: Vec::new(),
            outputs: BTreeMap::new(),
        }
    }

    /// Logical ground-set size; leaves at or above it are phantoms.
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn height(&self) -> u8 {
        self.b
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn outputs(&self) -> &BTreeMap<Subset, GateId> {
        &self.outputs
    }

    /// Records the logical ground-set size the circuit will be used with.
    pub fn with_logical_size(mut self, n: u64) -> Result<Self> {
        if n == 0 || n > 1u64 << self.b {
            return Err(Error::param(format!(
                "logical size {n} does not fit {} leaves",
                1u64 << self.b
            )));
        }
        self.n = n;
        Ok(self)
    }

    pub fn input_labels(&self) -> impl Iterator<Item = (GateId, &Subset, &Subset)> {
        self.gates.iter().enumerate().filter_map(|(id, g)| match g {
            Gate::Input { active, set } => Some((id, active, set)),
            Gate::Add { .. } => None,
        })
    }

    pub fn gate_counts(&self) -> GateCounts {
        let inputs = self.input_labels().count() as u64;
        let passthrough = self
            .outputs
            .values()
            .filter(|&&g| matches!(self.gates[g], Gate::Input { .. }))
            .count() as u64;
        GateCounts {
            inputs,
            adds: self.gates.len() as u64 - inputs,
            outputs: self.outputs.len() as u64,
            passthrough_outputs: passthrough,
        }
    }

    pub fn validate(&self) -> Result<(), Violation> {
        let mut seen = BTreeSet::new();
        for (id, gate) in self.gates.iter().enumerate() {
            match gate {
                Gate::Add { left, right } => {
                    for &operand in [left, right] {
                        if operand >= id {
                            return Err(Violation::OperandOrder { gate: id, operand });
                        }
                    }
                }
                Gate::Input { active, set } => {
                    let label = format!("({active} | {set})");
                    if !seen.insert((active, set)) {
                        return Err(Violation::DuplicateInput { gate: id, label });
                    }
                    let ok = set.level() == self.b
                        && active.is_subset(set)
                        && set.len() <= self.p
                        && active.len() <= self.q;
                    if !ok {
                        return Err(Violation::LabelBounds { gate: id, label });
                    }
                }
            }
        }
        for (label, &gate) in &self.outputs {
            if gate >= self.gates.len() {
                return Err(Violation::DanglingOutput {
                    output: label.to_string(),
                    gate,
                });
            }
            if label.level() != self.b || label.len() > self.q {
                return Err(Violation::OutputBounds {
                    output: label.to_string(),
                });
            }
        }
        Ok(())
    }

    /// Values of every gate, in gate order. Labels the closure does not know
    /// should map to [`Adjoined::Identity`].
    pub fn evaluate_gates<S, F>(&self, contract: &S, inputs: F) -> Result<Vec<Adjoined<S::Value>>>
    where
        S: Semigroup,
        F: Fn(&Subset, &Subset) -> Adjoined<S::Value>,
    {
        let mut values: Vec<Adjoined<S::Value>> = Vec::with_capacity(self.gates.len());
        for gate in &self.gates {
            let v = match gate {
                Gate::Input { active, set } => inputs(active, set),
                Gate::Add { left, right } => oplus(contract, &values[*left], &values[*right])?,
            };
            values.push(v);
        }
        Ok(values)
    }

    /// Output values keyed by output label.
    pub fn evaluate_with<S, F>(
        &self,
        contract: &S,
        inputs: F,
    ) -> Result<BTreeMap<Subset, Adjoined<S::Value>>>
    where
        S: Semigroup,
        F: Fn(&Subset, &Subset) -> Adjoined<S::Value>,
    {
        let values = self.evaluate_gates(contract, inputs)?;
        Ok(self.collect_outputs(&values))
    }

    /// Like [`evaluate_with`](Self::evaluate_with) with an explicit
    /// assignment; missing labels default to the identity.
    pub fn evaluate<S: Semigroup>(
        &self,
        contract: &S,
        assignment: &BTreeMap<Label, S::Value>,
    ) -> Result<BTreeMap<Subset, Adjoined<S::Value>>> {
        self.evaluate_with(contract, |i, x| lookup(assignment, i, x))
    }

    /// Evaluates gates of equal dependency depth concurrently. Gates are
    /// binary with fixed operand order, so the result equals the sequential
    /// one exactly.
    pub fn evaluate_parallel<S: Semigroup>(
        &self,
        contract: &S,
        assignment: &BTreeMap<Label, S::Value>,
    ) -> Result<BTreeMap<Subset, Adjoined<S::Value>>> {
        let mut depth = vec![0usize; self.gates.len()];
        let mut layers: Vec<Vec<GateId>> = Vec::new();
        for (id, gate) in self.gates.iter().enumerate() {
            if let Gate::Add { left, right } = gate {
                depth[id] = depth[*left].max(depth[*right]) + 1;
            }
            if layers.len() <= depth[id] {
                layers.resize_with(depth[id] + 1, Vec::new);
            }
            layers[depth[id]].push(id);
        }
        let mut values: Vec<Option<Adjoined<S::Value>>> = vec![None; self.gates.len()];
        for layer in &layers {
            let computed: Vec<(GateId, Adjoined<S::Value>)> = layer
                .par_iter()
                .map(|&id| {
                    let v = match &self.gates[id] {
                        Gate::Input { active, set } => lookup(assignment, active, set),
                        Gate::Add { left, right } => oplus(
                            contract,
                            values[*left].as_ref().expect("operand evaluated"),
                            values[*right].as_ref().expect("operand evaluated"),
                        )?,
                    };
                    Ok((id, v))
                })
                .collect::<Result<_>>()?;
            for (id, v) in computed {
                values[id] = Some(v);
            }
        }
        let values: Vec<_> = values.into_iter().map(|v| v.unwrap_or_default()).collect();
        Ok(self.collect_outputs(&values))
    }

    fn collect_outputs<V: Clone>(&self, values: &[Adjoined<V>]) -> BTreeMap<Subset, Adjoined<V>> {
        self.outputs
            .iter()
            .map(|(label, &g)| (label.clone(), values[g].clone()))
            .collect()
    }

    /// Deterministic JSON document: `n`, `b`, `p`, `q`, the gate list in
    /// index order, and outputs keyed by the subset text encoding.
    pub fn serialize(&self) -> Vec<u8> {
        let file = CircuitFile {
            n: Some(self.n),
            b: self.b,
            p: self.p,
            q: self.q,
            gates: self.gates.iter().map(GateRecord::from).collect(),
            outputs: OutputRecord(
                self.outputs
                    .iter()
                    .map(|(k, &v)| (k.to_string(), v))
                    .collect(),
            ),
        };
        let mut out = serde_json::to_vec_pretty(&file).expect("circuit serializes");
        out.push(b'\n');
        out
    }

    pub fn deserialize(bytes: &[u8]) -> Result<Self> {
        let file: CircuitFile =
            serde_json::from_slice(bytes).map_err(|e| Error::format(format!("circuit file: {e}")))?;
        if file.b == 0 || file.b > crate::universe::MAX_LEVEL {
            return Err(Error::format(format!("circuit file: bad height {}", file.b)));
        }
        let mut gates = Vec::with_capacity(file.gates.len());
        for record in file.gates {
            gates.push(match record {
                GateRecord::Input { active, set } => Gate::Input {
                    active: Subset::parse(&active, file.b)?,
                    set: Subset::parse(&set, file.b)?,
                },
                GateRecord::Add(left, right) => Gate::Add { left, right },
            });
        }
        let mut outputs = BTreeMap::new();
        for (label, gate) in file.outputs.0 {
            let label = Subset::parse(&label, file.b)?;
            if outputs.insert(label.clone(), gate).is_some() {
                return Err(Error::format(format!("circuit file: repeated output {label}")));
            }
        }
        let circuit = Circuit {
            n: 1u64 << file.b,
            b: file.b,
            p: file.p,
            q: file.q,
            gates,
            outputs,
        };
        let circuit = match file.n {
            Some(n) => circuit
                .with_logical_size(n)
                .map_err(|e| Error::format(format!("circuit file: {e}")))?,
            None => circuit,
        };
        circuit
            .validate()
            .map_err(|v| Error::format(format!("circuit file: {v}")))?;
        Ok(circuit)
    }

    /// Graphviz rendering; one node per gate.
    pub fn to_dot(&self) -> String {
        let mut out_labels: BTreeMap<GateId, Vec<String>> = BTreeMap::new();
        for (label, &g) in &self.outputs {
            out_labels.entry(g).or_default().push(label.to_string());
        }
        let mut dot = String::from("digraph circuit {\n  rankdir=LR;\n");
        for (id, gate) in self.gates.iter().enumerate() {
            let (mut text, shape) = match gate {
                Gate::Input { active, set } => (format!("{active} | {set}"), "box"),
                Gate::Add { .. } => ("⊕".to_string(), "circle"),
            };
            let mut extra = "";
            if let Some(labels) = out_labels.get(&id) {
                write!(text, "\\nout {}", labels.join(" ; ")).unwrap();
                extra = " peripheries=2";
            }
            writeln!(dot, "  g{id} [label=\"{text}\" shape={shape}{extra}];").unwrap();
        }
        for (id, gate) in self.gates.iter().enumerate() {
            if let Gate::Add { left, right } = gate {
                writeln!(dot, "  g{left} -> g{id};\n  g{right} -> g{id};").unwrap();
            }
        }
        dot.push_str("}\n");
        dot
    }
}

fn lookup<V: Clone>(assignment: &BTreeMap<Label, V>, i: &Subset, x: &Subset) -> Adjoined<V> {
    // BTreeMap<(A, B)> cannot be probed with (&A, &B); the clone is cheap at these sizes
    assignment
        .get(&(i.clone(), x.clone()))
        .cloned()
        .into()
}

/// Appends gates in topological order.
#[derive(Debug)]
pub(crate) struct CircuitBuilder {
    circuit: Circuit,
}

impl CircuitBuilder {
    pub(crate) fn new(b: u8, p: usize, q: usize) -> Self {
        CircuitBuilder {
            circuit: Circuit::empty(b, p, q),
        }
    }

    pub(crate) fn input(&mut self, active: Subset, set: Subset) -> GateId {
        self.circuit.gates.push(Gate::Input { active, set });
        self.circuit.gates.len() - 1
    }

    pub(crate) fn add(&mut self, left: GateId, right: GateId) -> GateId {
        debug_assert!(left < self.circuit.gates.len() && right < self.circuit.gates.len());
        self.circuit.gates.push(Gate::Add { left, right });
        self.circuit.gates.len() - 1
    }

    /// Left fold of `⊕` over `terms`; `None` when there are no terms.
    pub(crate) fn add_all(&mut self, terms: impl IntoIterator<Item = GateId>) -> Option<GateId> {
        terms
            .into_iter()
            .fold(None, |acc, g| Some(acc.map_or(g, |l| self.add(l, g))))
    }

    pub(crate) fn output(&mut self, label: Subset, gate: GateId) {
        self.circuit.outputs.insert(label, gate);
    }

    pub(crate) fn finish(self) -> Circuit {
        debug_assert_eq!(self.circuit.validate(), Ok(()));
        self.circuit
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CircuitFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<u64>,
    b: u8,
    p: usize,
    q: usize,
    gates: Vec<GateRecord>,
    outputs: OutputRecord,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum GateRecord {
    Input { active: String, set: String },
    Add(GateId, GateId),
}

impl From<&Gate> for GateRecord {
    fn from(gate: &Gate) -> Self {
        match gate {
            Gate::Input { active, set } => GateRecord::Input {
                active: active.to_string(),
                set: set.to_string(),
            },
            Gate::Add { left, right } => GateRecord::Add(*left, *right),
        }
    }
}

/// Output map kept in canonical label order on the way out.
struct OutputRecord(Vec<(String, GateId)>);

impl Serialize for OutputRecord {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_map(self.0.iter().map(|(k, v)| (k, v)))
    }
}

impl<'de> Deserialize<'de> for OutputRecord {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct OutputVisitor;

        impl<'de> Visitor<'de> for OutputVisitor {
            type Value = OutputRecord;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map from subset text to gate index")
            }

            fn visit_map<M: MapAccess<'de>>(self, mut map: M) -> std::result::Result<OutputRecord, M::Error> {
                let mut entries = Vec::new();
                while let Some((k, v)) = map.next_entry::<String, GateId>()? {
                    entries.push((k, v));
                }
                Ok(OutputRecord(entries))
            }
        }

        deserializer.deserialize_map(OutputVisitor).map_err(de::Error::custom)
    }
}
