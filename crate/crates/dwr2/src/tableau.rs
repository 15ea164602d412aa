//! Symbolic stabilizer-tableau simulation over outcome variables.
//!
//! Phases are affine GF(2) expressions in the measurement outcomes, so a
//! single simulation covers every outcome branch at once. Input qubits
//! start unconstrained: measuring an operator that commutes with all rows
//! but lies outside their span *learns* it as a new row with a fresh
//! outcome symbol. The subgroup of learned operators supported on the
//! physical register is what the circuit measures, and its phase is the
//! sign mask.

use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, Metrics, RotGate};
use crate::pauli::{Letter, PauliString};

#[derive(Debug, Error)]
pub enum TableauError {
    #[error("malformed circuit: {0}")]
    MalformedCircuit(#[from] CircuitError),
    #[error("operator size {got} does not match tableau size {expected}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("target weight {got} does not match the physical register size {expected}")]
    TargetMismatch { expected: usize, got: usize },
    #[error("measured operator must be Hermitian")]
    NonHermitian,
    #[error("unsupported rotations: {0}")]
    UnsupportedRotations(String),
    #[error("input {input} cannot be propagated through the circuit")]
    NotPropagatable { input: String },
}

/// Affine GF(2) expression `constant ⊕ Σ m_i` over outcome symbols.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OutcomeExpr {
    constant: bool,
    terms: BTreeSet<usize>,
}

impl OutcomeExpr {
    pub fn zero() -> Self {
        OutcomeExpr::default()
    }

    pub fn constant(bit: bool) -> Self {
        OutcomeExpr {
            constant: bit,
            terms: BTreeSet::new(),
        }
    }

    pub fn symbol(id: usize) -> Self {
        OutcomeExpr {
            constant: false,
            terms: [id].into(),
        }
    }

    pub fn from_terms(constant: bool, terms: impl IntoIterator<Item = usize>) -> Self {
        let mut expr = OutcomeExpr {
            constant,
            terms: BTreeSet::new(),
        };
        for t in terms {
            expr.toggle(t);
        }
        expr
    }

    pub fn constant_part(&self) -> bool {
        self.constant
    }

    pub fn terms(&self) -> &BTreeSet<usize> {
        &self.terms
    }

    fn toggle(&mut self, id: usize) {
        if !self.terms.insert(id) {
            self.terms.remove(&id);
        }
    }

    pub fn xor(&mut self, other: &OutcomeExpr) {
        self.constant ^= other.constant;
        for &t in &other.terms {
            self.toggle(t);
        }
    }

    pub fn xor_const(&mut self, bit: bool) {
        self.constant ^= bit;
    }

    pub fn xored(&self, other: &OutcomeExpr) -> OutcomeExpr {
        let mut out = self.clone();
        out.xor(other);
        out
    }

    pub fn is_zero(&self) -> bool {
        !self.constant && self.terms.is_empty()
    }

    /// Evaluates with outcome bit `i` read from bit `i` of `m`.
    pub fn eval_mask(&self, m: u64) -> bool {
        let mut v = self.constant;
        for &t in &self.terms {
            debug_assert!(t < 64);
            v ^= (m >> t) & 1 == 1;
        }
        v
    }
}

impl fmt::Display for OutcomeExpr {
    /// Outcome symbols print 1-based: id 0 renders as `m1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts: Vec<String> = self.terms.iter().map(|t| format!("m{}", t + 1)).collect();
        if self.constant {
            parts.push("1".into());
        }
        write!(f, "{}", parts.join("+"))
    }
}

/// A stabilizer generator: positive-phase letters plus a symbolic sign.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Row {
    p: PauliString,
    phase: OutcomeExpr,
}

impl Row {
    /// Product of two commuting rows; the even i-power folds into the sign.
    fn multiply(&self, other: &Row) -> Row {
        let prod = self.p.multiply(&other.p).expect("row size mismatch");
        debug_assert!(prod.is_hermitian(), "rows must commute");
        let mut phase = self.phase.xored(&other.phase);
        phase.xor_const(prod.phase_exponent() == 2);
        Row {
            p: prod.with_positive_phase(),
            phase,
        }
    }

    fn coord(&self, c: Coord) -> bool {
        let (x, z) = self.p.letter(c.qubit).bits();
        if c.x {
            x
        } else {
            z
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Coord {
    qubit: usize,
    x: bool,
}

fn coords_of(qubits: impl IntoIterator<Item = usize>) -> Vec<Coord> {
    let mut out = Vec::new();
    for q in qubits {
        out.push(Coord { qubit: q, x: true });
        out.push(Coord { qubit: q, x: false });
    }
    out
}

/// Gaussian elimination with full clearing along `coords`, in scan order.
/// Afterwards each listed coordinate is held by at most one pivot row and
/// every non-pivot row has zero support on all listed coordinates.
/// Returns the pivot assignments `(coordinate, row index)` in scan order.
fn eliminate(rows: &mut [Row], coords: &[Coord]) -> Vec<(Coord, usize)> {
    let mut pivots = Vec::new();
    let mut pivoted = vec![false; rows.len()];
    for &c in coords {
        let Some(pi) = (0..rows.len()).find(|&i| !pivoted[i] && rows[i].coord(c)) else {
            continue;
        };
        pivoted[pi] = true;
        pivots.push((c, pi));
        let pivot = rows[pi].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != pi && row.coord(c) {
                *row = row.multiply(&pivot);
            }
        }
    }
    pivots
}

/// Reduces `start` against an eliminated row set; on success returns the
/// product of the pivot rows used (whose letters then equal `start`'s).
fn reduce_against(start: Row, work: &[Row], pivots: &[(Coord, usize)], total: usize) -> (Row, Row) {
    let mut cur = start;
    let mut acc = Row {
        p: PauliString::identity(total),
        phase: OutcomeExpr::zero(),
    };
    for &(c, idx) in pivots {
        if cur.coord(c) {
            cur = cur.multiply(&work[idx]);
            acc = acc.multiply(&work[idx]);
        }
    }
    (cur, acc)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MeasureResult {
    /// The outcome is a fresh random bit carrying this symbol.
    Fresh(usize),
    /// The outcome is fixed by earlier measurements.
    Determined(OutcomeExpr),
}

/// Stabilizer tableau with symbolic phases; starts with zero rows.
#[derive(Debug, Clone)]
pub struct SymbolicTableau {
    n: usize,
    rows: Vec<Row>,
}

impl SymbolicTableau {
    pub fn new(n: usize) -> Self {
        SymbolicTableau { n, rows: Vec::new() }
    }

    pub fn qubit_count(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Current generators rendered as `expr: pauli` lines, for debugging.
    pub fn render_rows(&self) -> Vec<String> {
        self.rows
            .iter()
            .map(|r| format!("(-1)^({}) {}", r.phase, r.p))
            .collect()
    }

    /// Seeds a deterministic stabilizer (for reference-qubit constructions).
    fn seed(&mut self, p: PauliString) {
        debug_assert!(p.is_hermitian() && p.phase_exponent() == 0);
        debug_assert!(self.rows.iter().all(|r| r.p.commutes(&p).unwrap()));
        self.rows.push(Row {
            p,
            phase: OutcomeExpr::zero(),
        });
    }

    pub fn measure(&mut self, p: &PauliString, outcome_id: usize) -> Result<MeasureResult, TableauError> {
        self.measure_with_offset(p, outcome_id, false)
    }

    /// Measures `p`; `offset` complements the recorded outcome (used when a
    /// rotation fold produced `-p` as the effective operator).
    pub fn measure_with_offset(
        &mut self,
        p: &PauliString,
        outcome_id: usize,
        offset: bool,
    ) -> Result<MeasureResult, TableauError> {
        if p.len() != self.n {
            return Err(TableauError::SizeMismatch {
                expected: self.n,
                got: p.len(),
            });
        }
        if !p.is_hermitian() {
            return Err(TableauError::NonHermitian);
        }
        let sp = p.phase_exponent() == 2;
        let letters = p.with_positive_phase();

        let anti: Vec<usize> = (0..self.rows.len())
            .filter(|&i| !self.rows[i].p.commutes(&letters).unwrap())
            .collect();
        if let Some(&pi) = anti.first() {
            let pivot = self.rows[pi].clone();
            for &i in &anti[1..] {
                self.rows[i] = self.rows[i].multiply(&pivot);
            }
            let mut phase = OutcomeExpr::symbol(outcome_id);
            phase.xor_const(sp ^ offset);
            self.rows[pi] = Row { p: letters, phase };
            return Ok(MeasureResult::Fresh(outcome_id));
        }

        // commuting: either determined by the current rows or newly learned
        if let Some(expr) = self.reduce_to_expr(&letters) {
            let mut e = expr;
            e.xor_const(sp ^ offset);
            return Ok(MeasureResult::Determined(e));
        }
        let mut phase = OutcomeExpr::symbol(outcome_id);
        phase.xor_const(sp ^ offset);
        self.rows.push(Row { p: letters, phase });
        Ok(MeasureResult::Fresh(outcome_id))
    }

    /// If `letters` is a product of rows, returns the sign expression of
    /// that product; otherwise `None`.
    fn reduce_to_expr(&self, letters: &PauliString) -> Option<OutcomeExpr> {
        let mut work = self.rows.clone();
        let coords = coords_of(0..self.n);
        let pivots = eliminate(&mut work, &coords);
        let start = Row {
            p: letters.clone(),
            phase: OutcomeExpr::zero(),
        };
        let (cur, acc) = reduce_against(start, &work, &pivots, self.n);
        // on success acc's letters equal the queried letters, and its
        // phase is the state's value of that operator
        (cur.p.weight() == 0).then_some(acc.phase)
    }
}

/// Outcome-conditioned Pauli correction: apply `pauli` when `condition`
/// evaluates to 1. Mapping the wrong eigenspace back is exactly what the
/// destabilizer does: `Q` anticommutes with the target, so it maps
/// `Im Π_P(1)` onto `Im Π_P(0)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Correction {
    /// Weight-1 Pauli on the physical register.
    pub pauli: PauliString,
    pub condition: OutcomeExpr,
}

/// Builds the conditional correction for a verified measurement: apply
/// `destabilizer(target)` whenever `sign_mask != desired`.
pub fn correction_for(
    target: &PauliString,
    sign_mask: &OutcomeExpr,
    desired: bool,
) -> Result<Correction, TableauError> {
    let pauli = target
        .destabilizer()
        .map_err(|_| TableauError::NonHermitian)?;
    let mut condition = sign_mask.clone();
    condition.xor_const(desired);
    Ok(Correction { pauli, condition })
}

/// Result of verifying a circuit against a target Pauli.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub ok: bool,
    pub diagnosis: Option<String>,
    /// `e` such that the circuit implements `Π_target(e(m))`.
    pub sign_mask: OutcomeExpr,
    pub correction: Correction,
    /// Outcome ids whose value is fixed by earlier outcomes.
    pub determined: Vec<(usize, OutcomeExpr)>,
    pub metrics: Metrics,
    /// Instantaneous stabilizers after each layer (debug requests only).
    pub trace: Option<Vec<Vec<String>>>,
}

impl VerificationReport {
    pub fn render_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("ok: {}\n", self.ok));
        if let Some(d) = &self.diagnosis {
            s.push_str(&format!("diagnosis: {d}\n"));
        }
        s.push_str(&format!("sign mask: {}\n", self.sign_mask));
        s.push_str(&format!(
            "correction: apply {} on the physical register when {} = 1\n",
            self.correction.pauli, self.correction.condition
        ));
        s.push_str(&format!(
            "A={} D={} V={}\n",
            self.metrics.a, self.metrics.d, self.metrics.v
        ));
        if !self.determined.is_empty() {
            for (id, e) in &self.determined {
                s.push_str(&format!("determined: m{} = {}\n", id + 1, e));
            }
        }
        if let Some(trace) = &self.trace {
            for (t, rows) in trace.iter().enumerate() {
                s.push_str(&format!("after layer {t}:\n"));
                for r in rows {
                    s.push_str(&format!("  {r}\n"));
                }
            }
        }
        s
    }

    pub fn render_kv(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("ok={}\n", self.ok));
        s.push_str(&format!("sign_mask={}\n", self.sign_mask));
        s.push_str(&format!(
            "correction={}^({})\n",
            self.correction.pauli, self.correction.condition
        ));
        s.push_str(&format!("A={}\n", self.metrics.a));
        s.push_str(&format!("D={}\n", self.metrics.d));
        s.push_str(&format!("V={}\n", self.metrics.v));
        if let Some(d) = &self.diagnosis {
            s.push_str(&format!("diagnosis={d}\n"));
        }
        s
    }
}

/// Rewrites prologue/epilogue rotations into the measurement bases.
///
/// Requires the epilogue to invert the prologue qubit by qubit. Returns
/// the rotation-free circuit plus one sign-offset bit per outcome id (set
/// when conjugation produced the negative of the folded operator).
pub fn fold_rotations(c: &Circuit) -> Result<(Circuit, Vec<bool>), TableauError> {
    if c.prologue().is_empty() && c.epilogue().is_empty() {
        return Ok((c.clone(), vec![false; c.op_count()]));
    }
    let n = c.qubit_count();
    let mut pre: Vec<Vec<RotGate>> = vec![Vec::new(); n];
    for (q, gates) in c.prologue() {
        pre[*q].extend(gates.iter().copied());
    }
    let mut post: Vec<Vec<RotGate>> = vec![Vec::new(); n];
    for (q, gates) in c.epilogue() {
        post[*q].extend(gates.iter().copied());
    }
    for q in 0..n {
        let inv: Vec<RotGate> = pre[q].iter().rev().map(|g| g.inverse()).collect();
        if post[q] != inv {
            return Err(TableauError::UnsupportedRotations(format!(
                "epilogue on qubit {q} does not invert the prologue"
            )));
        }
    }
    let mut out = Circuit::new(n, c.physical().to_vec(), c.auxiliary().to_vec());
    let mut offsets = vec![false; c.op_count()];
    for layer in c.layers() {
        let mut ops = Vec::new();
        for op in layer {
            let mut pairs = Vec::new();
            let mut flip = false;
            for (&q, &l) in op.qubits().iter().zip(op.letters().iter()) {
                // effective operator on the unrotated frame: W† L W
                let mut cur = l;
                for g in pre[q].iter().rev() {
                    let (img, s) = g.inverse().conjugate(cur);
                    cur = img;
                    flip ^= s;
                }
                pairs.push((q, cur));
            }
            offsets[op.outcome_id()] = flip;
            ops.push(pairs);
        }
        out.push_layer(ops);
    }
    Ok((out, offsets))
}

/// Verifies that a circuit measures exactly `target` on its physical
/// register and derives the outcome sign mask.
///
/// `target` indexes the physical register: letter `j` acts on
/// `circuit.physical()[j]`. Structural problems return an error; semantic
/// failures return a report with `ok == false` and a diagnosis.
pub fn verify_dwr(c: &Circuit, target: &PauliString) -> Result<VerificationReport, TableauError> {
    verify_dwr_impl(c, target, false)
}

/// Like [`verify_dwr`] but records the instantaneous stabilizer rows after
/// every layer.
pub fn verify_dwr_traced(
    c: &Circuit,
    target: &PauliString,
) -> Result<VerificationReport, TableauError> {
    verify_dwr_impl(c, target, true)
}

fn verify_dwr_impl(
    c: &Circuit,
    target: &PauliString,
    traced: bool,
) -> Result<VerificationReport, TableauError> {
    c.validate()?;
    if target.len() != c.physical().len() {
        return Err(TableauError::TargetMismatch {
            expected: c.physical().len(),
            got: target.len(),
        });
    }
    if !target.is_hermitian() {
        return Err(TableauError::NonHermitian);
    }
    if target.weight() != target.len() {
        return Err(TableauError::TargetMismatch {
            expected: target.len(),
            got: target.weight(),
        });
    }
    let n = c.qubit_count();
    let (folded, offsets) = fold_rotations(c)?;

    let mut tableau = SymbolicTableau::new(n);
    let mut determined = Vec::new();
    let mut trace = traced.then(Vec::new);
    for layer in folded.layers() {
        for op in layer {
            let p = op.pauli(n);
            match tableau.measure_with_offset(&p, op.outcome_id(), offsets[op.outcome_id()])? {
                MeasureResult::Fresh(_) => {}
                MeasureResult::Determined(e) => determined.push((op.outcome_id(), e)),
            }
        }
        if let Some(t) = trace.as_mut() {
            t.push(tableau.render_rows());
        }
    }

    let metrics = c.metrics();
    let fail = |diagnosis: String, trace: Option<Vec<Vec<String>>>| VerificationReport {
        ok: false,
        diagnosis: Some(diagnosis),
        sign_mask: OutcomeExpr::zero(),
        correction: Correction {
            pauli: PauliString::identity(target.len()),
            condition: OutcomeExpr::zero(),
        },
        determined: determined.clone(),
        metrics: metrics.clone(),
        trace: trace.clone(),
    };

    // subgroup supported on the physical register
    let mut work = tableau.rows.clone();
    let aux_coords = coords_of(c.auxiliary().iter().copied());
    let pivots = eliminate(&mut work, &aux_coords);
    let pivot_set: BTreeSet<usize> = pivots.into_iter().map(|(_, i)| i).collect();
    let phys_rows: Vec<&Row> = work
        .iter()
        .enumerate()
        .filter(|(i, r)| !pivot_set.contains(i) && r.p.weight() > 0)
        .map(|(_, r)| r)
        .collect();
    let mut target_global_letters = vec![Letter::I; n];
    for (j, &q) in c.physical().iter().enumerate() {
        target_global_letters[q] = target.letter(j);
    }
    let target_global = PauliString::new(target_global_letters, 0);
    if phys_rows.is_empty() {
        return Ok(fail(
            "the circuit does not learn any operator on the physical register".into(),
            trace,
        ));
    }
    if phys_rows.len() > 1 {
        let extras: Vec<String> = phys_rows.iter().map(|r| r.p.to_string()).collect();
        return Ok(fail(
            format!(
                "the circuit learns more than one independent operator on the physical register: {}",
                extras.join(", ")
            ),
            trace,
        ));
    }
    if phys_rows[0].p != target_global {
        return Ok(fail(
            format!(
                "learned {} on the physical register, expected {}",
                phys_rows[0].p, target_global
            ),
            trace,
        ));
    }
    let mut sign_mask = phys_rows[0].phase.clone();
    sign_mask.xor_const(target.phase_exponent() == 2);

    // every auxiliary must end pinned in a single-qubit eigenstate
    for &q in c.auxiliary() {
        let mut work = tableau.rows.clone();
        let others = coords_of((0..n).filter(|&v| v != q));
        let pv = eliminate(&mut work, &others);
        let pvs: BTreeSet<usize> = pv.into_iter().map(|(_, i)| i).collect();
        let pinned = work
            .iter()
            .enumerate()
            .any(|(i, r)| !pvs.contains(&i) && r.p.weight() == 1 && !r.p.letter(q).is_identity());
        if !pinned {
            return Ok(fail(
                format!("auxiliary qubit {q} is left entangled or unconstrained"),
                trace,
            ));
        }
    }

    // pinned auxiliaries plus the target account for every generator
    let expected_rank = c.auxiliary().len() + 1;
    if tableau.rank() != expected_rank {
        return Ok(fail(
            format!(
                "stabilizer rank {} differs from expected {} (stray correlations remain)",
                tableau.rank(),
                expected_rank
            ),
            trace,
        ));
    }

    let correction = correction_for(target, &sign_mask, false)?;
    Ok(VerificationReport {
        ok: true,
        diagnosis: None,
        sign_mask,
        correction,
        determined,
        metrics,
        trace,
    })
}

/// Heisenberg propagation of Pauli operators through the measurement
/// sequence, via reference qubits Bell-paired with the input legs.
///
/// Input legs are qubits whose first measurement is two-qubit (or absent);
/// output legs are qubits whose last measurement is two-qubit (or absent).
/// Each input must be supported on input legs; the result is the output
/// operator and its outcome-dependent sign: `V · O = (-1)^e O' · V`.
pub fn pauli_map(
    c: &Circuit,
    inputs: &[PauliString],
) -> Result<Vec<(PauliString, OutcomeExpr)>, TableauError> {
    c.validate()?;
    let n = c.qubit_count();
    let (folded, offsets) = fold_rotations(c)?;

    let mut first: Vec<Option<usize>> = vec![None; n];
    let mut last: Vec<Option<usize>> = vec![None; n];
    for layer in folded.layers() {
        for op in layer {
            for &q in op.qubits() {
                if first[q].is_none() {
                    first[q] = Some(op.qubits().len());
                }
                last[q] = Some(op.qubits().len());
            }
        }
    }
    let input_legs: Vec<usize> = (0..n).filter(|&q| first[q] != Some(1)).collect();
    let output_legs: Vec<usize> = (0..n).filter(|&q| last[q] != Some(1)).collect();

    let r = input_legs.len();
    let total = n + r;
    let mut tableau = SymbolicTableau::new(total);
    for (j, &q) in input_legs.iter().enumerate() {
        for letter in [Letter::X, Letter::Z] {
            let mut letters = vec![Letter::I; total];
            letters[q] = letter;
            letters[n + j] = letter;
            tableau.seed(PauliString::new(letters, 0));
        }
    }
    for layer in folded.layers() {
        for op in layer {
            let small = op.pauli(n);
            let mut letters = small.letters().to_vec();
            letters.extend(std::iter::repeat(Letter::I).take(r));
            let p = PauliString::new(letters, 0);
            tableau.measure_with_offset(&p, op.outcome_id(), offsets[op.outcome_id()])?;
        }
    }

    // constrained coordinates: refs must match the transposed input,
    // every non-output system coordinate must vanish
    let mut coords = coords_of((0..n).filter(|q| !output_legs.contains(q)));
    coords.extend(coords_of(n..total));
    let mut work = tableau.rows.clone();
    let pivots = eliminate(&mut work, &coords);

    let mut out = Vec::with_capacity(inputs.len());
    for input in inputs {
        if input.len() != n {
            return Err(TableauError::SizeMismatch {
                expected: n,
                got: input.len(),
            });
        }
        if !input.is_hermitian() {
            return Err(TableauError::NonHermitian);
        }
        if input
            .support()
            .iter()
            .any(|q| !input_legs.contains(q))
        {
            return Err(TableauError::NotPropagatable {
                input: input.to_string(),
            });
        }
        // transpose on the reference copy: letters unchanged, sign flips per Y
        let mut t_letters = vec![Letter::I; total];
        let mut y_count = 0usize;
        for (j, &q) in input_legs.iter().enumerate() {
            let l = input.letter(q);
            t_letters[n + j] = l;
            if l == Letter::Y {
                y_count += 1;
            }
        }
        let start = Row {
            p: PauliString::new(t_letters, 0),
            phase: OutcomeExpr::zero(),
        };
        let (cur, acc) = reduce_against(start, &work, &pivots, total);
        if coords.iter().any(|&cc| cur.coord(cc)) {
            return Err(TableauError::NotPropagatable {
                input: input.to_string(),
            });
        }
        // acc = (transposed input on refs) ⊗ (output operator)
        let mut out_letters = vec![Letter::I; n];
        for q in 0..n {
            out_letters[q] = acc.p.letter(q);
        }
        let mut sign = acc.phase.clone();
        sign.xor_const(input.phase_exponent() == 2);
        sign.xor_const(y_count % 2 == 1);
        out.push((PauliString::new(out_letters, 0), sign));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{dense_projector, DenseState};
    use num_complex::Complex64;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn fresh_x_measurement_adds_row() {
        let mut t = SymbolicTableau::new(1);
        let r = t.measure(&p("X"), 0).unwrap();
        assert_eq!(r, MeasureResult::Fresh(0));
        assert_eq!(t.rank(), 1);
    }

    #[test]
    fn repeated_measurement_is_determined() {
        let mut t = SymbolicTableau::new(1);
        t.measure(&p("X"), 0).unwrap();
        match t.measure(&p("X"), 1).unwrap() {
            MeasureResult::Determined(e) => assert_eq!(e, OutcomeExpr::symbol(0)),
            other => panic!("expected determined, got {other:?}"),
        }
        // the negated operator is determined with a complemented value
        match t.measure(&p("-X"), 2).unwrap() {
            MeasureResult::Determined(e) => {
                assert_eq!(e, OutcomeExpr::from_terms(true, [0]))
            }
            other => panic!("expected determined, got {other:?}"),
        }
    }

    #[test]
    fn anticommuting_measurement_replaces_row() {
        let mut t = SymbolicTableau::new(2);
        t.measure(&p("XI"), 0).unwrap();
        t.measure(&p("ZZ"), 1).unwrap();
        assert_eq!(t.rank(), 1);
        // XX commutes with ZZ (two anticommuting sites) and is independent,
        // so it is learned as a second generator
        assert!(matches!(
            t.measure(&p("XX"), 2).unwrap(),
            MeasureResult::Fresh(2)
        ));
        assert_eq!(t.rank(), 2);
        // and -YY is now determined: YY = -(XX)(ZZ)
        match t.measure(&p("-YY"), 3).unwrap() {
            MeasureResult::Determined(e) => {
                assert_eq!(e, OutcomeExpr::from_terms(false, [1, 2]))
            }
            other => panic!("expected determined, got {other:?}"),
        }
    }

    #[test]
    fn teleportation_matches_dense_on_all_branches() {
        // measure X_1; Z_0 Z_1; X_0 on two qubits
        let seq = [p("IX"), p("ZZ"), p("XI")];
        for m in 0u64..8 {
            // dense: start from Choi-like input |g> x Bell(0, ref)
            // simpler: track an arbitrary input state
            let alpha = Complex64::new(0.6, 0.1);
            let beta = Complex64::new(0.2, -0.7);
            let mut st = DenseState::from_amps(
                2,
                vec![alpha, beta, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)],
            );
            for (i, op) in seq.iter().enumerate() {
                st.project_pauli(op, &[0, 1], (m >> i) & 1 == 1);
            }
            let norm = st.norm_sqr();
            // symbolic: all three measurements are fresh on this branch
            let mut t = SymbolicTableau::new(2);
            for (i, op) in seq.iter().enumerate() {
                assert!(matches!(
                    t.measure(op, i).unwrap(),
                    MeasureResult::Fresh(_)
                ));
            }
            // every branch is reachable for a generic input state
            assert!(norm > 1e-6, "branch {m:#b} unexpectedly vanished");
            // the teleported state lives on qubit 1 up to the Pauli frame
            // X^{m2} Z^{m1+m3} (1-based); undo it and compare
            let mut fixed = st.clone();
            if (m >> 1) & 1 == 1 {
                fixed.apply_pauli(&p("X"), &[1]);
            }
            if ((m & 1) ^ ((m >> 2) & 1)) == 1 {
                fixed.apply_pauli(&p("Z"), &[1]);
            }
            // expect (|0> or |+| factor on qubit 0) ⊗ (alpha|0> + beta|1>)
            let a0 = fixed.amps[0];
            let a1 = fixed.amps[2]; // qubit1 = 1, qubit0 = 0
            let ratio = a1 / a0;
            let expect = beta / alpha;
            assert!((ratio - expect).norm() < 1e-9, "branch {m:#b}");
        }
    }

    #[test]
    fn teleportation_pauli_map() {
        let mut c = Circuit::new(2, vec![], vec![0, 1]);
        c.push_layer(vec![vec![(1, Letter::X)]]);
        c.push_layer(vec![vec![(0, Letter::Z), (1, Letter::Z)]]);
        c.push_layer(vec![vec![(0, Letter::X)]]);
        let maps = pauli_map(&c, &[p("ZI"), p("XI")]).unwrap();
        assert_eq!(maps[0].0, p("IZ"));
        assert_eq!(maps[1].0, p("IX"));
        // signs checked against dense simulation: Z picks up m2, X picks up m1+m3
        assert_eq!(maps[0].1, OutcomeExpr::symbol(1));
        assert_eq!(maps[1].1, OutcomeExpr::from_terms(false, [0, 2]));
    }

    #[test]
    fn correction_uses_destabilizer() {
        let mask = OutcomeExpr::from_terms(false, [0, 2]);
        let c = correction_for(&p("ZZZ"), &mask, false).unwrap();
        assert_eq!(c.pauli, p("XII"));
        assert_eq!(c.condition, mask);
        let c = correction_for(&p("ZZZ"), &OutcomeExpr::zero(), true).unwrap();
        assert_eq!(c.condition, OutcomeExpr::constant(true));
    }

    #[test]
    fn rows_stay_commuting_and_independent() {
        // a few dozen random-ish measurements on 4 qubits
        let seq = [
            "XIII", "ZZII", "IXXI", "IIZZ", "YIIY", "IZZI", "XXII", "IIXX", "ZIIZ",
        ];
        let mut t = SymbolicTableau::new(4);
        for (i, s) in seq.iter().enumerate() {
            t.measure(&p(s), i).unwrap();
            for a in 0..t.rows.len() {
                for b in a + 1..t.rows.len() {
                    assert!(t.rows[a].p.commutes(&t.rows[b].p).unwrap());
                }
            }
            // independence: eliminating everything leaves no identity row
            let mut work = t.rows.clone();
            eliminate(&mut work, &coords_of(0..4));
            assert!(work.iter().all(|r| r.p.weight() > 0));
        }
    }

    #[test]
    fn dense_projector_matches_expr_semantics() {
        // sanity: measuring ZZ then Z on fresh qubits determines the second Z
        let mut t = SymbolicTableau::new(2);
        t.measure(&p("ZZ"), 0).unwrap();
        t.measure(&p("ZI"), 1).unwrap();
        match t.measure(&p("IZ"), 2).unwrap() {
            MeasureResult::Determined(e) => {
                assert_eq!(e, OutcomeExpr::from_terms(false, [0, 1]))
            }
            other => panic!("expected determined, got {other:?}"),
        }
        // dense cross-check on one branch: outcomes 0, 0 force qubit1 Z = +1
        let mut st = DenseState::from_amps(
            2,
            vec![
                Complex64::new(0.5, 0.0),
                Complex64::new(0.5, 0.0),
                Complex64::new(0.5, 0.0),
                Complex64::new(0.5, 0.0),
            ],
        );
        st.project_pauli(&p("ZZ"), &[0, 1], false);
        st.project_pauli(&p("ZI"), &[0, 1], false);
        let proj = dense_projector(&p("IZ"), true).unwrap();
        let mut moved = vec![Complex64::new(0.0, 0.0); 4];
        for r in 0..4 {
            for c in 0..4 {
                moved[r] += proj.get(r, c) * st.amps[c];
            }
        }
        assert!(moved.iter().all(|a| a.norm() < 1e-12));
    }
}
