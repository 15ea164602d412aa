//! Measurement-circuit intermediate representation.
//!
//! A [`Circuit`] is an ordered list of layers; each layer holds
//! support-disjoint one- and two-qubit Pauli measurements. Physical qubits
//! participate in exactly one measurement over the whole circuit, outcome
//! ids are dense in reading order, and optional single-qubit Clifford
//! rotations bracket the measurement body (used by the rotation-form
//! output of rebasing).

use std::collections::BTreeSet;
use std::fmt::Write as _;
use thiserror::Error;

use crate::pauli::{Letter, PauliString};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CircuitError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> CircuitError {
    CircuitError::Invalid(msg.into())
}

/// Single-qubit Clifford rotation gates usable in prologue/epilogue lists.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RotGate {
    H,
    S,
    Sdg,
}

impl RotGate {
    pub fn name(self) -> &'static str {
        match self {
            RotGate::H => "H",
            RotGate::S => "S",
            RotGate::Sdg => "SDG",
        }
    }

    pub fn from_name(s: &str) -> Option<RotGate> {
        match s {
            "H" => Some(RotGate::H),
            "S" => Some(RotGate::S),
            "SDG" => Some(RotGate::Sdg),
            _ => None,
        }
    }

    pub fn inverse(self) -> RotGate {
        match self {
            RotGate::H => RotGate::H,
            RotGate::S => RotGate::Sdg,
            RotGate::Sdg => RotGate::S,
        }
    }

    /// Conjugation `U L U†`; returns the image letter and a sign flip.
    pub fn conjugate(self, l: Letter) -> (Letter, bool) {
        match (self, l) {
            (_, Letter::I) => (Letter::I, false),
            (RotGate::H, Letter::X) => (Letter::Z, false),
            (RotGate::H, Letter::Z) => (Letter::X, false),
            (RotGate::H, Letter::Y) => (Letter::Y, true),
            (RotGate::S, Letter::X) => (Letter::Y, false),
            (RotGate::S, Letter::Y) => (Letter::X, true),
            (RotGate::S, Letter::Z) => (Letter::Z, false),
            (RotGate::Sdg, Letter::X) => (Letter::Y, true),
            (RotGate::Sdg, Letter::Y) => (Letter::X, false),
            (RotGate::Sdg, Letter::Z) => (Letter::Z, false),
        }
    }
}

/// One measurement of a weight-1 or weight-2 Pauli.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasureOp {
    qubits: Vec<usize>,
    letters: Vec<Letter>,
    outcome_id: usize,
}

impl MeasureOp {
    pub fn new(mut pairs: Vec<(usize, Letter)>, outcome_id: usize) -> Self {
        pairs.sort_by_key(|&(q, _)| q);
        MeasureOp {
            qubits: pairs.iter().map(|&(q, _)| q).collect(),
            letters: pairs.iter().map(|&(_, l)| l).collect(),
            outcome_id,
        }
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn outcome_id(&self) -> usize {
        self.outcome_id
    }

    pub fn letter_at(&self, q: usize) -> Option<Letter> {
        self.qubits
            .iter()
            .position(|&x| x == q)
            .map(|k| self.letters[k])
    }

    pub fn touches(&self, q: usize) -> bool {
        self.qubits.contains(&q)
    }

    /// The measured operator embedded in `n` qubits, positive phase.
    pub fn pauli(&self, n: usize) -> PauliString {
        let mut letters = vec![Letter::I; n];
        for (&q, &l) in self.qubits.iter().zip(self.letters.iter()) {
            letters[q] = l;
        }
        PauliString::new(letters, 0)
    }
}

/// Space/time cost summary of a circuit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Metrics {
    /// Auxiliary qubit count.
    pub a: usize,
    /// Depth (layer count).
    pub d: usize,
    /// Spacetime volume `A * D`.
    pub v: usize,
    /// Per-qubit count of layers where the qubit is alive but unused.
    pub idle: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Circuit {
    qubit_count: usize,
    physical: Vec<usize>,
    auxiliary: Vec<usize>,
    layers: Vec<Vec<MeasureOp>>,
    prologue: Vec<(usize, Vec<RotGate>)>,
    epilogue: Vec<(usize, Vec<RotGate>)>,
}

impl Circuit {
    pub fn new(qubit_count: usize, physical: Vec<usize>, auxiliary: Vec<usize>) -> Self {
        Circuit {
            qubit_count,
            physical,
            auxiliary,
            layers: Vec::new(),
            prologue: Vec::new(),
            epilogue: Vec::new(),
        }
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn physical(&self) -> &[usize] {
        &self.physical
    }

    pub fn auxiliary(&self) -> &[usize] {
        &self.auxiliary
    }

    pub fn layers(&self) -> &[Vec<MeasureOp>] {
        &self.layers
    }

    pub fn prologue(&self) -> &[(usize, Vec<RotGate>)] {
        &self.prologue
    }

    pub fn epilogue(&self) -> &[(usize, Vec<RotGate>)] {
        &self.epilogue
    }

    pub fn set_rotations(
        &mut self,
        prologue: Vec<(usize, Vec<RotGate>)>,
        epilogue: Vec<(usize, Vec<RotGate>)>,
    ) {
        self.prologue = prologue;
        self.epilogue = epilogue;
    }

    /// Appends a layer; outcome ids are assigned in push order.
    pub fn push_layer(&mut self, ops: Vec<Vec<(usize, Letter)>>) {
        let mut next = self.op_count();
        let layer = ops
            .into_iter()
            .map(|pairs| {
                let op = MeasureOp::new(pairs, next);
                next += 1;
                op
            })
            .collect();
        self.layers.push(layer);
    }

    pub fn op_count(&self) -> usize {
        self.layers.iter().map(|l| l.len()).sum()
    }

    pub fn ops(&self) -> impl Iterator<Item = &MeasureOp> {
        self.layers.iter().flatten()
    }

    /// Number of layers.
    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn metrics(&self) -> Metrics {
        let a = self.auxiliary.len();
        let d = self.depth();
        let mut first = vec![usize::MAX; self.qubit_count];
        let mut last = vec![0usize; self.qubit_count];
        let mut used = vec![vec![false; d]; self.qubit_count];
        for (t, layer) in self.layers.iter().enumerate() {
            for op in layer {
                for &q in op.qubits() {
                    first[q] = first[q].min(t);
                    last[q] = last[q].max(t);
                    used[q][t] = true;
                }
            }
        }
        let idle = (0..self.qubit_count)
            .map(|q| {
                if first[q] == usize::MAX {
                    return 0;
                }
                (first[q]..=last[q]).filter(|&t| !used[q][t]).count()
            })
            .collect();
        Metrics { a, d, v: a * d, idle }
    }

    /// Structural validation of every circuit invariant.
    pub fn validate(&self) -> Result<(), CircuitError> {
        let n = self.qubit_count;
        let mut seen = vec![false; n];
        for &q in self.physical.iter().chain(self.auxiliary.iter()) {
            if q >= n {
                return Err(invalid(format!("qubit {q} out of range (n={n})")));
            }
            if seen[q] {
                return Err(invalid(format!(
                    "qubit {q} listed twice across physical/aux registers"
                )));
            }
            seen[q] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(invalid(
                "physical and aux registers must partition the qubits",
            ));
        }
        let mut phys_ops = vec![0usize; n];
        let mut expected_id = 0usize;
        for (t, layer) in self.layers.iter().enumerate() {
            if layer.is_empty() {
                return Err(invalid(format!("layer {t} is empty")));
            }
            let mut in_layer = BTreeSet::new();
            for op in layer {
                if op.qubits.is_empty() || op.qubits.len() > 2 {
                    return Err(invalid(format!(
                        "op {} acts on {} qubits (must be 1 or 2)",
                        op.outcome_id,
                        op.qubits.len()
                    )));
                }
                if op.qubits.len() == 2 && op.qubits[0] == op.qubits[1] {
                    return Err(invalid(format!(
                        "op {} repeats qubit {}",
                        op.outcome_id, op.qubits[0]
                    )));
                }
                for (&q, &l) in op.qubits.iter().zip(op.letters.iter()) {
                    if q >= n {
                        return Err(invalid(format!("op qubit {q} out of range")));
                    }
                    if l == Letter::I {
                        return Err(invalid(format!(
                            "op {} carries an identity letter on qubit {q}",
                            op.outcome_id
                        )));
                    }
                    if !in_layer.insert(q) {
                        return Err(invalid(format!(
                            "layer {t} uses qubit {q} more than once"
                        )));
                    }
                    if self.physical.contains(&q) {
                        phys_ops[q] += 1;
                    }
                }
                if op.outcome_id != expected_id {
                    return Err(invalid(format!(
                        "outcome ids must be dense in reading order (got {}, expected {})",
                        op.outcome_id, expected_id
                    )));
                }
                expected_id += 1;
            }
        }
        for &q in &self.physical {
            if phys_ops[q] != 1 {
                return Err(invalid(format!(
                    "physical qubit {q} participates in {} measurements (must be exactly 1)",
                    phys_ops[q]
                )));
            }
        }
        for (q, gates) in self.prologue.iter().chain(self.epilogue.iter()) {
            if *q >= n {
                return Err(invalid(format!("rotation qubit {q} out of range")));
            }
            if gates.is_empty() {
                return Err(invalid(format!("empty rotation list on qubit {q}")));
            }
        }
        Ok(())
    }

    /// Greedy earliest-layer rescheduling.
    ///
    /// Relative order is preserved exactly for op pairs that share a qubit
    /// with anticommuting letters there; everything else may move earlier.
    /// Outcome ids are renumbered to reading order of the result; the
    /// returned map sends old ids to new ids.
    pub fn reschedule_asap_mapped(&self) -> (Circuit, Vec<usize>) {
        let flat: Vec<&MeasureOp> = self.ops().collect();
        let mut placed_layer: Vec<usize> = Vec::with_capacity(flat.len());
        let mut layer_ops: Vec<Vec<usize>> = Vec::new(); // indices into flat
        for (i, op) in flat.iter().enumerate() {
            let mut earliest = 0usize;
            for (j, prev) in flat.iter().enumerate().take(i) {
                let conflict = prev.qubits().iter().any(|&q| {
                    match (prev.letter_at(q), op.letter_at(q)) {
                        (Some(a), Some(b)) => a.anticommutes(b),
                        _ => false,
                    }
                });
                if conflict {
                    earliest = earliest.max(placed_layer[j] + 1);
                }
            }
            let mut t = earliest;
            'search: loop {
                if t >= layer_ops.len() {
                    layer_ops.push(Vec::new());
                    break;
                }
                for &j in &layer_ops[t] {
                    if flat[j].qubits().iter().any(|&q| op.touches(q)) {
                        t += 1;
                        continue 'search;
                    }
                }
                break;
            }
            placed_layer.push(t);
            layer_ops[t].push(i);
        }
        let mut out = Circuit::new(
            self.qubit_count,
            self.physical.clone(),
            self.auxiliary.clone(),
        );
        out.prologue = self.prologue.clone();
        out.epilogue = self.epilogue.clone();
        let mut id_map = vec![0usize; flat.len()];
        for ops in &layer_ops {
            let layer: Vec<Vec<(usize, Letter)>> = ops
                .iter()
                .map(|&j| {
                    flat[j]
                        .qubits()
                        .iter()
                        .zip(flat[j].letters().iter())
                        .map(|(&q, &l)| (q, l))
                        .collect()
                })
                .collect();
            let base = out.op_count();
            for (k, &j) in ops.iter().enumerate() {
                id_map[flat[j].outcome_id()] = base + k;
            }
            out.push_layer(layer);
        }
        (out, id_map)
    }

    pub fn reschedule_asap(&self) -> Circuit {
        self.reschedule_asap_mapped().0
    }

    /// Text serialization; round-trips exactly through [`Circuit::parse`].
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        writeln!(s, "qubits {}", self.qubit_count).unwrap();
        let list = |xs: &[usize]| {
            xs.iter()
                .map(|q| q.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        if self.physical.is_empty() {
            writeln!(s, "physical").unwrap();
        } else {
            writeln!(s, "physical {}", list(&self.physical)).unwrap();
        }
        if self.auxiliary.is_empty() {
            writeln!(s, "aux").unwrap();
        } else {
            writeln!(s, "aux {}", list(&self.auxiliary)).unwrap();
        }
        for (kind, rots) in [("pre", &self.prologue), ("post", &self.epilogue)] {
            for (q, gates) in rots.iter() {
                let names: Vec<&str> = gates.iter().map(|g| g.name()).collect();
                writeln!(s, "rot {kind} {q} {}", names.join(" ")).unwrap();
            }
        }
        for (t, layer) in self.layers.iter().enumerate() {
            if t > 0 {
                writeln!(s, "---").unwrap();
            }
            for op in layer {
                let letters: String = op.letters().iter().map(|l| l.to_char()).collect();
                writeln!(s, "M {letters} {}", list(op.qubits())).unwrap();
            }
        }
        s
    }

    /// Parses the text format produced by [`Circuit::serialize`].
    pub fn parse(text: &str) -> Result<Circuit, CircuitError> {
        let perr = |line: usize, msg: String| CircuitError::Parse { line, msg };
        let mut qubits: Option<usize> = None;
        let mut physical = Vec::new();
        let mut auxiliary = Vec::new();
        let mut prologue = Vec::new();
        let mut epilogue = Vec::new();
        let mut layers: Vec<Vec<Vec<(usize, Letter)>>> = Vec::new();
        let mut cur: Vec<Vec<(usize, Letter)>> = Vec::new();
        let mut in_body = false;
        let mut saw_sep = false;

        for (ln, raw) in text.lines().enumerate() {
            let lineno = ln + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if line == "---" {
                if !in_body {
                    return Err(perr(lineno, "layer separator before any measurement".into()));
                }
                if cur.is_empty() {
                    return Err(perr(lineno, "empty layer".into()));
                }
                layers.push(std::mem::take(&mut cur));
                saw_sep = true;
                continue;
            }
            let mut parts = line.split_whitespace();
            let head = parts.next().unwrap();
            let rest: Vec<&str> = parts.collect();
            let parse_indices = |rest: &[&str]| -> Result<Vec<usize>, CircuitError> {
                rest.iter()
                    .map(|t| {
                        t.parse::<usize>()
                            .map_err(|_| perr(lineno, format!("invalid qubit index {t:?}")))
                    })
                    .collect()
            };
            match head {
                "qubits" => {
                    if qubits.is_some() {
                        return Err(perr(lineno, "duplicate qubits line".into()));
                    }
                    if rest.len() != 1 {
                        return Err(perr(lineno, "expected: qubits N".into()));
                    }
                    qubits = Some(
                        rest[0]
                            .parse()
                            .map_err(|_| perr(lineno, format!("invalid count {:?}", rest[0])))?,
                    );
                }
                "physical" => physical = parse_indices(&rest)?,
                "aux" => auxiliary = parse_indices(&rest)?,
                "rot" => {
                    if rest.len() < 3 {
                        return Err(perr(lineno, "expected: rot pre|post q GATES...".into()));
                    }
                    let q: usize = rest[1]
                        .parse()
                        .map_err(|_| perr(lineno, format!("invalid qubit index {:?}", rest[1])))?;
                    let gates: Option<Vec<RotGate>> =
                        rest[2..].iter().map(|t| RotGate::from_name(t)).collect();
                    let gates = gates
                        .ok_or_else(|| perr(lineno, "rotation gates must be H, S or SDG".into()))?;
                    match rest[0] {
                        "pre" => prologue.push((q, gates)),
                        "post" => epilogue.push((q, gates)),
                        other => {
                            return Err(perr(lineno, format!("expected pre|post, got {other:?}")))
                        }
                    }
                }
                "M" => {
                    if qubits.is_none() {
                        return Err(perr(lineno, "measurement before qubits line".into()));
                    }
                    in_body = true;
                    if rest.len() < 2 {
                        return Err(perr(lineno, "expected: M <letters> <qubits...>".into()));
                    }
                    let letters: Option<Vec<Letter>> =
                        rest[0].chars().map(Letter::from_char).collect();
                    let letters = letters
                        .ok_or_else(|| perr(lineno, format!("invalid letters {:?}", rest[0])))?;
                    let qs = parse_indices(&rest[1..])?;
                    if letters.len() != qs.len() {
                        return Err(perr(
                            lineno,
                            format!(
                                "{} letters for {} qubits",
                                letters.len(),
                                qs.len()
                            ),
                        ));
                    }
                    if qs.len() > 2 {
                        return Err(perr(
                            lineno,
                            format!("op acts on {} qubits (must be 1 or 2)", qs.len()),
                        ));
                    }
                    cur.push(qs.into_iter().zip(letters).collect());
                }
                other => return Err(perr(lineno, format!("unknown directive {other:?}"))),
            }
        }
        if !cur.is_empty() {
            layers.push(cur);
        } else if saw_sep {
            return Err(CircuitError::Parse {
                line: text.lines().count(),
                msg: "trailing layer separator".into(),
            });
        }
        let qubit_count = qubits.ok_or(CircuitError::Parse {
            line: 1,
            msg: "missing qubits line".into(),
        })?;
        let mut c = Circuit::new(qubit_count, physical, auxiliary);
        c.prologue = prologue;
        c.epilogue = epilogue;
        for layer in layers {
            c.push_layer(layer);
        }
        c.validate()?;
        Ok(c)
    }
}
