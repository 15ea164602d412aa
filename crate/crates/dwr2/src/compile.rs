//! Compilers that decompose a weight-w Pauli measurement into scheduled
//! one- and two-qubit measurements on a connectivity graph.
//!
//! The general recipe walks a spanning-tree layout: internal auxiliaries
//! open in Z and entangle along internal edges in X, parents open in X,
//! grab one leaf each through a ZZ measurement and entangle with their
//! auxiliary neighbors through XX measurements. Remaining leaves are
//! consumed two per round by the parents that still have untouched
//! children, until every parent can take exactly one leaf; a final
//! single-qubit round reads every auxiliary out in the basis opposite to
//! its last participation. Canonical layers follow these steps one to one
//! (overlapping XX measurements split into conflict-free sublayers), which
//! is what makes the scheme depth counts reproducible.

use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

use crate::circuit::{Circuit, RotGate};
use crate::graph::{
    constant_space_graph, depth5_graph, depth6_graph, interpolating_graph, validate_for_dwr,
    GraphError, TreeLayout,
};
use crate::pauli::{Letter, PauliString};
use crate::tableau::{pauli_map, OutcomeExpr, TableauError};

#[derive(Debug, Error)]
pub enum CompileError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("invalid layout: {0}")]
    InvalidLayout(String),
    #[error("invalid target: {0}")]
    BadTarget(String),
    #[error(transparent)]
    Tableau(#[from] TableauError),
}

/// Live bookkeeping of the recipe loop: which leaves remain, which parents
/// serve them, and which auxiliary still carries the running operator.
struct RecipeState<'a> {
    layout: &'a TreeLayout,
    touched: BTreeSet<usize>,
    /// vertex -> (basis letter, op weight) of its most recent measurement
    last: BTreeMap<usize, (Letter, usize)>,
}

impl RecipeState<'_> {
    fn untouched(&self) -> Vec<usize> {
        self.layout
            .leaves()
            .iter()
            .copied()
            .filter(|l| !self.touched.contains(l))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    /// Parents of the untouched leaves, sorted.
    fn active_parents(&self) -> Vec<usize> {
        self.untouched()
            .iter()
            .map(|&l| self.layout.parent_of(l))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    fn untouched_children(&self, p: usize) -> Vec<usize> {
        self.layout
            .children_of(p)
            .into_iter()
            .filter(|l| !self.touched.contains(l))
            .collect()
    }

    /// An auxiliary is released once its latest measurement was a
    /// single-qubit X; until then it still anchors the running operator
    /// (or a pending leaf grab) with an anticommuting handle.
    fn released(&self, v: usize) -> bool {
        self.last.get(&v) == Some(&(Letter::X, 1))
    }

    fn hot_auxiliaries(&self) -> Vec<usize> {
        self.layout
            .auxiliaries()
            .into_iter()
            .filter(|&v| !self.released(v))
            .collect()
    }
}

struct Emitter<'a> {
    state: RecipeState<'a>,
    /// vertex -> circuit qubit (component vertices renumbered densely)
    qubit_of: BTreeMap<usize, usize>,
    circuit: Circuit,
}

impl Emitter<'_> {
    fn emit_layer(&mut self, ops: Vec<Vec<(usize, Letter)>>) {
        if ops.is_empty() {
            return;
        }
        for op in &ops {
            for &(v, l) in op {
                self.state.last.insert(v, (l, op.len()));
            }
        }
        let mapped = ops
            .into_iter()
            .map(|op| op.into_iter().map(|(v, l)| (self.qubit_of[&v], l)).collect())
            .collect();
        self.circuit.push_layer(mapped);
    }

    /// Packs XX pairs greedily into support-disjoint sublayers, keeping
    /// emission order (odd/even along auxiliary lines).
    fn emit_xx(&mut self, pairs: Vec<(usize, usize)>) {
        let mut sublayers: Vec<Vec<(usize, usize)>> = Vec::new();
        for (u, v) in pairs {
            let slot = sublayers.iter_mut().find(|layer| {
                layer.iter().all(|&(a, b)| a != u && a != v && b != u && b != v)
            });
            match slot {
                Some(layer) => layer.push((u, v)),
                None => sublayers.push(vec![(u, v)]),
            }
        }
        for layer in sublayers {
            let ops = layer
                .into_iter()
                .map(|(u, v)| vec![(u, Letter::X), (v, Letter::X)])
                .collect();
            self.emit_layer(ops);
        }
    }

    /// Deduplicated X_p X_i pairs from each vertex in `set` to its
    /// auxiliary neighbors, in first-appearance order. Released neighbors
    /// are skipped: an XX toward an auxiliary without an anticommuting
    /// handle would randomize the running operator instead of growing it.
    fn xx_pairs(&self, set: &[usize]) -> Vec<(usize, usize)> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for &p in set {
            for nb in self.state.layout.tree_neighbors(p) {
                if self.state.layout.is_leaf(nb) || self.state.released(nb) {
                    continue;
                }
                let key = (p.min(nb), p.max(nb));
                if seen.insert(key) {
                    out.push(key);
                }
            }
        }
        out
    }

    /// ZZ layer: each vertex in `set` measures its lowest untouched child.
    fn emit_zz_round(&mut self, set: &[usize]) {
        let mut ops = Vec::new();
        for &p in set {
            let child = self.state.untouched_children(p)[0];
            self.state.touched.insert(child);
            ops.push(vec![(child, Letter::Z), (p, Letter::Z)]);
        }
        self.emit_layer(ops);
    }
}

/// Compiles the measurement of `Z^{⊗w}` on the layout's leaves.
///
/// Circuit qubits are the layout's component vertices renumbered densely;
/// the physical register lists the leaves in layout order.
pub fn compile_general(layout: &TreeLayout) -> Result<Circuit, CompileError> {
    let w = layout.leaves().len();
    if w <= 2 {
        return Err(CompileError::InvalidLayout(format!(
            "layout has {w} leaves, need more than 2"
        )));
    }
    if layout.auxiliaries().len() < 2 {
        return Err(CompileError::InvalidLayout(
            "a weight-2 reduction needs at least two auxiliary qubits".into(),
        ));
    }
    let qubit_of: BTreeMap<usize, usize> = layout
        .vertices()
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i))
        .collect();
    let physical = layout.leaves().iter().map(|l| qubit_of[l]).collect();
    let auxiliary = layout.auxiliaries().iter().map(|v| qubit_of[v]).collect();
    let circuit = Circuit::new(layout.vertices().len(), physical, auxiliary);
    let mut em = Emitter {
        state: RecipeState {
            layout,
            touched: BTreeSet::new(),
            last: BTreeMap::new(),
        },
        qubit_of,
        circuit,
    };

    // internal auxiliaries: open in Z, entangle along internal tree edges
    let internal: Vec<usize> = layout.internal().iter().copied().collect();
    if !internal.is_empty() {
        em.emit_layer(internal.iter().map(|&i| vec![(i, Letter::Z)]).collect());
        let pairs: Vec<(usize, usize)> = layout
            .tree_edges()
            .filter(|&(u, v)| layout.internal().contains(&u) && layout.internal().contains(&v))
            .collect();
        em.emit_xx(pairs);
    }

    // parents: open in X, take one child each, entangle in X
    let parents: Vec<usize> = layout.parents().iter().copied().collect();
    em.emit_layer(parents.iter().map(|&p| vec![(p, Letter::X)]).collect());
    em.emit_zz_round(&parents);
    let pairs = em.xx_pairs(&parents);
    em.emit_xx(pairs);

    let mut guard = 0usize;
    loop {
        guard += 1;
        if guard > 4 * w + 8 {
            return Err(CompileError::InvalidLayout(
                "recipe loop failed to terminate".into(),
            ));
        }
        let remaining = em.state.untouched();
        let active = em.state.active_parents();
        if active.len() == remaining.len() {
            break;
        }
        let set = em.state.with_exclusion(active);
        // one more child per serving parent, then release them in X
        em.emit_zz_round(&set);
        em.emit_layer(set.iter().map(|&p| vec![(p, Letter::X)]).collect());

        let remaining = em.state.untouched();
        let active = em.state.active_parents();
        if active.len() == remaining.len() {
            break;
        }
        let set = em.state.with_exclusion(active);
        // re-open a round: child grab plus X re-entangling
        em.emit_zz_round(&set);
        let pairs = em.xx_pairs(&set);
        em.emit_xx(pairs);
    }

    // closing round: each remaining leaf pairs with its own parent. A
    // parent released earlier (its last act was a single-qubit X) grabs
    // first and re-entangles in X right away; parents still carrying the
    // running operator grab last, in one layer, so that the final X
    // readout is what glues their grab in.
    let remaining = em.state.untouched();
    let mut held_back = Vec::new();
    for &l in &remaining {
        let p = layout.parent_of(l);
        em.state.touched.insert(l);
        if em.state.last.get(&p) == Some(&(Letter::X, 1)) {
            em.emit_layer(vec![vec![(l, Letter::Z), (p, Letter::Z)]]);
            let pairs = em.xx_pairs(&[p]);
            em.emit_xx(pairs);
        } else {
            held_back.push(vec![(l, Letter::Z), (p, Letter::Z)]);
        }
    }
    em.emit_layer(held_back);

    // read every auxiliary out in the basis opposite to its last use
    let readout = layout
        .auxiliaries()
        .into_iter()
        .map(|v| {
            let (basis, _) = em.state.last[&v];
            let letter = match basis {
                Letter::X => Letter::Z,
                Letter::Z => Letter::X,
                other => unreachable!("auxiliary {v} last measured in {other:?}"),
            };
            vec![(v, letter)]
        })
        .collect();
    em.emit_layer(readout);

    debug_assert_eq!(em.state.touched.len(), w);
    em.circuit
        .validate()
        .map_err(|e| CompileError::InvalidLayout(e.to_string()))?;
    Ok(em.circuit)
}

/// Two-auxiliary scheme; depth `5 + 4*floor((w-3)/2)` for even `w`.
pub fn compile_constant_space(w: usize) -> Result<Circuit, CompileError> {
    let g = constant_space_graph(w)?;
    let layout = validate_for_dwr(&g, &register(w))?;
    compile_general(&layout)
}

/// Depth-5 scheme on `w` auxiliary qubits.
pub fn compile_depth5(w: usize) -> Result<Circuit, CompileError> {
    let g = depth5_graph(w)?;
    let layout = validate_for_dwr(&g, &register(w))?;
    compile_general(&layout)
}

/// Constant-depth scheme on `ceil(w/2)` auxiliary qubits.
pub fn compile_depth6(w: usize) -> Result<Circuit, CompileError> {
    let g = depth6_graph(w)?;
    let layout = validate_for_dwr(&g, &register(w))?;
    compile_general(&layout)
}

/// Interpolating family: `a` auxiliary qubits, `2 <= a <= w`.
pub fn compile_interpolating(w: usize, a: usize) -> Result<Circuit, CompileError> {
    let g = interpolating_graph(w, a)?;
    let layout = validate_for_dwr(&g, &register(w))?;
    compile_general(&layout)
}

fn register(w: usize) -> Vec<usize> {
    (0..w).collect()
}

/// Rewrites a `Z^{⊗w}` circuit to measure `target` instead, by replacing
/// the physical-side letter of each physical qubit's single two-qubit
/// measurement (Z stays Z, X and Y move the measurement basis).
///
/// A negative target sign is not encoded in the circuit; verification
/// reports the complemented mask for it.
pub fn rebase(c: &Circuit, target: &PauliString) -> Result<Circuit, CompileError> {
    check_target(c, target)?;
    let mut letter_for: BTreeMap<usize, Letter> = BTreeMap::new();
    for (j, &q) in c.physical().iter().enumerate() {
        letter_for.insert(q, target.letter(j));
    }
    let mut out = Circuit::new(
        c.qubit_count(),
        c.physical().to_vec(),
        c.auxiliary().to_vec(),
    );
    for layer in c.layers() {
        let ops = layer
            .iter()
            .map(|op| {
                op.qubits()
                    .iter()
                    .zip(op.letters().iter())
                    .map(|(&q, &l)| match letter_for.get(&q) {
                        Some(&t) => {
                            debug_assert_eq!(l, Letter::Z, "physical side must start in Z");
                            (q, t)
                        }
                        None => (q, l),
                    })
                    .collect()
            })
            .collect();
        out.push_layer(ops);
    }
    out.validate()
        .map_err(|e| CompileError::InvalidLayout(e.to_string()))?;
    Ok(out)
}

/// Rotation-form alternative to [`rebase`]: the measurement body keeps its
/// Z bases and per-qubit Clifford rotations are placed in the prologue and
/// epilogue instead (`H` for X, `H·S†` / `S·H` for Y).
pub fn rebase_with_rotations(c: &Circuit, target: &PauliString) -> Result<Circuit, CompileError> {
    check_target(c, target)?;
    let mut out = c.clone();
    let mut pre = Vec::new();
    let mut post = Vec::new();
    for (j, &q) in c.physical().iter().enumerate() {
        match target.letter(j) {
            Letter::Z => {}
            Letter::X => {
                pre.push((q, vec![RotGate::H]));
                post.push((q, vec![RotGate::H]));
            }
            Letter::Y => {
                pre.push((q, vec![RotGate::Sdg, RotGate::H]));
                post.push((q, vec![RotGate::H, RotGate::S]));
            }
            Letter::I => unreachable!("checked by check_target"),
        }
    }
    out.set_rotations(pre, post);
    out.validate()
        .map_err(|e| CompileError::InvalidLayout(e.to_string()))?;
    Ok(out)
}

fn check_target(c: &Circuit, target: &PauliString) -> Result<(), CompileError> {
    if target.len() != c.physical().len() {
        return Err(CompileError::BadTarget(format!(
            "target has {} letters but the circuit has {} physical qubits",
            target.len(),
            c.physical().len()
        )));
    }
    if !target.is_hermitian() {
        return Err(CompileError::BadTarget("target must be Hermitian".into()));
    }
    if target.weight() != target.len() {
        return Err(CompileError::BadTarget(
            "target must act on every physical qubit".into(),
        ));
    }
    Ok(())
}

/// Outcome ids whose measurements act in the Z basis on every auxiliary
/// qubit they touch. For every scheme this is the compiler-side prediction
/// of the sign mask derived independently by the tableau.
pub fn predicted_sign_mask(c: &Circuit) -> OutcomeExpr {
    let aux: BTreeSet<usize> = c.auxiliary().iter().copied().collect();
    let mut terms = Vec::new();
    for op in c.ops() {
        let aux_letters: Vec<Letter> = op
            .qubits()
            .iter()
            .zip(op.letters().iter())
            .filter(|(q, _)| aux.contains(q))
            .map(|(_, &l)| l)
            .collect();
        if !aux_letters.is_empty() && aux_letters.iter().all(|&l| l == Letter::Z) {
            terms.push(op.outcome_id());
        }
    }
    OutcomeExpr::from_terms(false, terms)
}

/// One Heisenberg-propagation rule of a measurement-implemented gate.
#[derive(Debug, Clone)]
pub struct MapRule {
    pub input: PauliString,
    pub output: PauliString,
    pub sign: OutcomeExpr,
}

/// The three-qubit measurement sequence implementing a CX gate, with its
/// outcome-dependent Pauli map and correction.
#[derive(Debug, Clone)]
pub struct CxDemo {
    /// Qubit 0 is the control, 1 the target, 2 the auxiliary.
    pub circuit: Circuit,
    /// Propagation of Z_c, X_c, Z_t, X_t, derived by the tableau.
    pub map: Vec<MapRule>,
    /// Exponent expressions of the correction `X_t^(..) Z_c^(..)`.
    pub xt_exponent: OutcomeExpr,
    pub zc_exponent: OutcomeExpr,
}

/// Builds the measurement sequence `X_a; Z_c Z_a; X_a X_t; Z_a` and its
/// Pauli map; up to the reported correction this implements a CX.
pub fn cx_via_measurements() -> CxDemo {
    let mut c = Circuit::new(3, vec![0, 1], vec![2]);
    c.push_layer(vec![vec![(2, Letter::X)]]);
    c.push_layer(vec![vec![(0, Letter::Z), (2, Letter::Z)]]);
    c.push_layer(vec![vec![(2, Letter::X), (1, Letter::X)]]);
    c.push_layer(vec![vec![(2, Letter::Z)]]);
    let inputs: Vec<PauliString> = ["ZII", "XII", "IZI", "IXI"]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
    let propagated = pauli_map(&c, &inputs).expect("fixed demo circuit propagates");
    let map: Vec<MapRule> = inputs
        .into_iter()
        .zip(propagated)
        .map(|(input, (output, sign))| MapRule { input, output, sign })
        .collect();
    // Z_t picks up the X_t correction exponent, X_c the Z_c exponent
    let xt_exponent = map[2].sign.clone();
    let zc_exponent = map[1].sign.clone();
    CxDemo {
        circuit: c,
        map,
        xt_exponent,
        zc_exponent,
    }
}

/// Measurement-only teleportation: `X_1; Z_0 Z_1; X_0` moves the state of
/// qubit 0 onto qubit 1 up to a Pauli correction.
pub fn teleportation_circuit() -> Circuit {
    let mut c = Circuit::new(2, vec![], vec![0, 1]);
    c.push_layer(vec![vec![(1, Letter::X)]]);
    c.push_layer(vec![vec![(0, Letter::Z), (1, Letter::Z)]]);
    c.push_layer(vec![vec![(0, Letter::X)]]);
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::find_spanning_tree_with_leaves;
    use crate::tableau::fold_rotations;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn layer_strings(c: &Circuit) -> Vec<Vec<String>> {
        c.layers()
            .iter()
            .map(|layer| {
                layer
                    .iter()
                    .map(|op| {
                        let letters: String = op.letters().iter().map(|l| l.to_char()).collect();
                        let qs: Vec<String> = op.qubits().iter().map(|q| q.to_string()).collect();
                        format!("{letters} {}", qs.join(" "))
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn depth5_w4_layers_match_scheme() {
        let c = compile_depth5(4).unwrap();
        let expect: Vec<Vec<&str>> = vec![
            vec!["X 4", "X 5", "X 6", "X 7"],
            vec!["ZZ 0 4", "ZZ 1 5", "ZZ 2 6", "ZZ 3 7"],
            vec!["XX 4 5", "XX 6 7"],
            vec!["XX 5 6"],
            vec!["Z 4", "Z 5", "Z 6", "Z 7"],
        ];
        assert_eq!(
            layer_strings(&c),
            expect
                .into_iter()
                .map(|l| l.into_iter().map(String::from).collect::<Vec<_>>())
                .collect::<Vec<_>>()
        );
    }

    #[test]
    fn constant_space_w6_layers_match_scheme() {
        // a = qubit 6 serves physical 0, 2, 3, 4; b = qubit 7 serves 1 and 5
        let c = compile_constant_space(6).unwrap();
        let expect: Vec<Vec<&str>> = vec![
            vec!["X 6", "X 7"],
            vec!["ZZ 0 6", "ZZ 1 7"],
            vec!["XX 6 7"],
            vec!["ZZ 2 6"],
            vec!["X 6"],
            vec!["ZZ 3 6"],
            vec!["XX 6 7"],
            vec!["ZZ 4 6", "ZZ 5 7"],
            vec!["X 6", "X 7"],
        ];
        assert_eq!(
            layer_strings(&c),
            expect
                .into_iter()
                .map(|l| l.into_iter().map(String::from).collect::<Vec<_>>())
                .collect::<Vec<_>>()
        );
    }

    #[test]
    fn depth6_layer_structure() {
        let c = compile_depth6(6).unwrap();
        assert_eq!(c.depth(), 6);
        assert_eq!(c.metrics().a, 3);
        // X prep, first ZZ round, XX odd/even, second ZZ round, X readout
        let kinds: Vec<Vec<String>> = layer_strings(&c);
        assert!(kinds[0].iter().all(|s| s.starts_with("X ")));
        assert!(kinds[1].iter().all(|s| s.starts_with("ZZ ")));
        assert!(kinds[2].iter().all(|s| s.starts_with("XX ")));
        assert!(kinds[3].iter().all(|s| s.starts_with("XX ")));
        assert!(kinds[4].iter().all(|s| s.starts_with("ZZ ")));
        assert!(kinds[5].iter().all(|s| s.starts_with("X ")));
    }

    #[test]
    fn depth6_odd_w_reads_last_auxiliary_in_z() {
        let c = compile_depth6(7).unwrap();
        assert_eq!(c.metrics().a, 4);
        let last = layer_strings(&c).last().unwrap().clone();
        // auxiliary 10 (single child) closes in Z, the others in X
        assert!(last.contains(&"Z 10".to_string()));
        assert_eq!(last.iter().filter(|s| s.starts_with("X ")).count(), 3);
    }

    #[test]
    fn general_on_depth5_graph_equals_depth5_scheme() {
        let g = depth5_graph(4).unwrap();
        let layout = find_spanning_tree_with_leaves(&g, &[0, 1, 2, 3]).unwrap();
        assert_eq!(compile_general(&layout).unwrap(), compile_depth5(4).unwrap());
    }

    #[test]
    fn constant_space_depth_formula_even_w() {
        for w in [4usize, 6, 8, 10, 12] {
            let c = compile_constant_space(w).unwrap();
            assert_eq!(c.depth(), 5 + 4 * ((w - 3) / 2), "w={w}");
            assert_eq!(c.metrics().a, 2);
        }
    }

    #[test]
    fn interpolating_is_isomorphic_not_identical_to_depth5_at_a_eq_w() {
        let a = compile_interpolating(4, 4).unwrap();
        let b = compile_depth5(4).unwrap();
        assert_eq!(a.depth(), b.depth());
        // same per-layer op shapes even though the leaf pairing differs
        for (la, lb) in a.layers().iter().zip(b.layers().iter()) {
            let mut sa: Vec<Vec<Letter>> = la.iter().map(|o| o.letters().to_vec()).collect();
            let mut sb: Vec<Vec<Letter>> = lb.iter().map(|o| o.letters().to_vec()).collect();
            sa.sort();
            sb.sort();
            assert_eq!(sa, sb);
        }
    }

    #[test]
    fn rebase_rewrites_physical_letters() {
        let c = compile_depth5(4).unwrap();
        let r = rebase(&c, &p("XXXX")).unwrap();
        for (j, &q) in r.physical().iter().enumerate() {
            let _ = j;
            let op = r.ops().find(|op| op.touches(q)).unwrap();
            assert_eq!(op.letter_at(q), Some(Letter::X));
            // the auxiliary side is untouched
            let aux_q = op.qubits().iter().find(|&&x| x != q).unwrap();
            assert_eq!(op.letter_at(*aux_q), Some(Letter::Z));
        }
        // identity on a Z target
        assert_eq!(rebase(&c, &p("ZZZZ")).unwrap(), c);
    }

    #[test]
    fn rebase_rotation_form_folds_back_to_basis_form() {
        let c = compile_depth5(3).unwrap();
        let target = p("YZX");
        let basis = rebase(&c, &target).unwrap();
        let rotated = rebase_with_rotations(&c, &target).unwrap();
        let (folded, offsets) = fold_rotations(&rotated).unwrap();
        assert_eq!(folded, basis);
        assert!(offsets.iter().all(|&o| !o));
    }

    #[test]
    fn rebase_rejects_bad_targets() {
        let c = compile_depth5(3).unwrap();
        assert!(rebase(&c, &p("ZZ")).is_err());
        assert!(rebase(&c, &p("ZIZ")).is_err());
        assert!(rebase(&c, &"iXXX".parse().unwrap()).is_err());
    }

    #[test]
    fn cx_demo_matches_published_map() {
        let demo = cx_via_measurements();
        assert_eq!(demo.circuit.depth(), 4);
        let rules: Vec<(String, String, String)> = demo
            .map
            .iter()
            .map(|r| (r.input.to_string(), r.output.to_string(), r.sign.to_string()))
            .collect();
        assert_eq!(
            rules,
            vec![
                ("ZII".into(), "ZII".into(), "0".into()),
                ("XII".into(), "XXI".into(), "m1+m3".into()),
                ("IZI".into(), "ZZI".into(), "m2+m4".into()),
                ("IXI".into(), "IXI".into(), "0".into()),
            ]
        );
        assert_eq!(demo.xt_exponent.to_string(), "m2+m4");
        assert_eq!(demo.zc_exponent.to_string(), "m1+m3");
    }

    #[test]
    fn predicted_mask_collects_z_basis_ops() {
        let c = compile_depth5(3).unwrap();
        let mask = predicted_sign_mask(&c);
        // ZZ round: ids 3, 4, 5; Z readout: ids 8, 9, 10
        assert_eq!(
            mask,
            OutcomeExpr::from_terms(false, [3, 4, 5, 8, 9, 10])
        );
    }

    #[test]
    fn every_scheme_validates_and_physical_qubits_act_once() {
        for c in [
            compile_constant_space(5).unwrap(),
            compile_constant_space(8).unwrap(),
            compile_depth5(6).unwrap(),
            compile_depth6(9).unwrap(),
            compile_interpolating(7, 3).unwrap(),
            compile_interpolating(9, 2).unwrap(),
        ] {
            c.validate().unwrap();
            assert!(c.metrics().a >= 2);
        }
    }
}
