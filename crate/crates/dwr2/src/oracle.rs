//! Brute-force dense verification, the independent ground truth for the
//! symbolic machinery.
//!
//! Everything here works with explicit complex amplitudes. Basis index bit
//! `q` is the state of qubit `q` (qubit 0 is the least significant bit).
//! All entries produced by Pauli projectors are dyadic rationals times
//! powers of `i`, so double precision leaves orders of magnitude of
//! headroom below the verification tolerances.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::circuit::Circuit;
use crate::pauli::{Letter, PauliString};
use crate::tableau::verify_dwr;

/// Hard cap on dense-operator size.
pub const MAX_DENSE_QUBITS: usize = 13;
/// Hard cap on measurement count for the exhaustive outcome sweep.
pub const MAX_EXHAUSTIVE_OPS: usize = 23;

const ZERO_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("dense cap exceeded: {0} qubits (max {MAX_DENSE_QUBITS})")]
    TooManyQubits(usize),
    #[error("exhaustive cap exceeded: {0} measurements (max {MAX_EXHAUSTIVE_OPS})")]
    TooManyOps(usize),
    #[error("operator is not Hermitian")]
    NonHermitian,
    #[error("malformed circuit: {0}")]
    Circuit(#[from] crate::circuit::CircuitError),
    #[error("verification setup failed: {0}")]
    Verify(#[from] crate::tableau::TableauError),
    #[error("auxiliary qubit {0} has no single-qubit opening measurement")]
    NoOpening(usize),
    #[error("auxiliary qubit {0} has no single-qubit closing measurement")]
    NoClosing(usize),
    #[error("target does not match the circuit's physical register")]
    TargetMismatch,
}

/// Dense `2^n x 2^n` complex matrix, row-major.
#[derive(Clone)]
pub struct DenseOperator {
    n: usize,
    dim: usize,
    data: Vec<Complex64>,
}

impl DenseOperator {
    pub fn zeros(n: usize) -> Result<Self, OracleError> {
        if n > MAX_DENSE_QUBITS {
            return Err(OracleError::TooManyQubits(n));
        }
        let dim = 1usize << n;
        Ok(DenseOperator {
            n,
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        })
    }

    pub fn identity(n: usize) -> Result<Self, OracleError> {
        let mut m = Self::zeros(n)?;
        for i in 0..m.dim {
            m.data[i * m.dim + i] = Complex64::new(1.0, 0.0);
        }
        Ok(m)
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: Complex64) {
        self.data[row * self.dim + col] = v;
    }

    pub fn matmul(&self, other: &DenseOperator) -> DenseOperator {
        assert_eq!(self.n, other.n);
        let d = self.dim;
        let mut out = DenseOperator {
            n: self.n,
            dim: d,
            data: vec![Complex64::new(0.0, 0.0); d * d],
        };
        for i in 0..d {
            for k in 0..d {
                let a = self.data[i * d + k];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..d {
                    out.data[i * d + j] += a * other.data[k * d + j];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &DenseOperator) -> DenseOperator {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(other.data.iter()) {
            *a += b;
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> DenseOperator {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= s;
        }
        out
    }

    pub fn adjoint(&self) -> DenseOperator {
        let d = self.dim;
        let mut out = self.clone();
        for i in 0..d {
            for j in 0..d {
                out.data[j * d + i] = self.data[i * d + j].conj();
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &DenseOperator) -> f64 {
        assert_eq!(self.n, other.n);
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// If `self ≈ c · other` with `|c| > 1e-9`, returns `c` and the residual.
    pub fn proportionality(&self, other: &DenseOperator) -> Option<(Complex64, f64)> {
        let mut num = Complex64::new(0.0, 0.0);
        let mut den = 0.0;
        for (a, b) in self.data.iter().zip(other.data.iter()) {
            num += b.conj() * a;
            den += b.norm_sqr();
        }
        if den < ZERO_TOL {
            return None;
        }
        let c = num / den;
        if c.norm() < 1e-9 {
            return None;
        }
        let dev = self.max_abs_diff(&other.scale(c));
        Some((c, dev))
    }
}

/// Per-qubit action of a Pauli letter on a basis bit:
/// returns (flips bit, amplitude factor for input bit value).
fn letter_action(l: Letter, bit: bool) -> (bool, Complex64) {
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let sign = if bit { -1.0 } else { 1.0 };
    match l {
        Letter::I => (false, one),
        Letter::X => (true, one),
        Letter::Y => (true, i * sign),
        Letter::Z => (false, one * sign),
    }
}

/// Kronecker-product matrix of a signed Pauli (qubit 0 = least significant bit).
pub fn dense_pauli(p: &PauliString) -> Result<DenseOperator, OracleError> {
    let n = p.len();
    let mut m = DenseOperator::zeros(n)?;
    let global = Complex64::new(0.0, 1.0).powu(p.phase_exponent() as u32);
    for col in 0..m.dim {
        let mut row = col;
        let mut amp = global;
        for q in 0..n {
            let bit = (col >> q) & 1 == 1;
            let (flip, factor) = letter_action(p.letter(q), bit);
            if flip {
                row ^= 1 << q;
            }
            amp *= factor;
        }
        m.set(row, col, amp);
    }
    Ok(m)
}

/// `(1 + (-1)^m P) / 2` for Hermitian `P`.
pub fn dense_projector(p: &PauliString, m: bool) -> Result<DenseOperator, OracleError> {
    if !p.is_hermitian() {
        return Err(OracleError::NonHermitian);
    }
    let sign = if m { -0.5 } else { 0.5 };
    let id = DenseOperator::identity(p.len())?;
    Ok(id.scale(Complex64::new(0.5, 0.0)).add(&dense_pauli(p)?.scale(Complex64::new(sign, 0.0))))
}

/// Dense state vector on `n` qubits.
#[derive(Clone)]
pub struct DenseState {
    n: usize,
    pub amps: Vec<Complex64>,
}

impl DenseState {
    pub fn zero_state(n: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        DenseState { n, amps }
    }

    pub fn from_amps(n: usize, amps: Vec<Complex64>) -> Self {
        assert_eq!(amps.len(), 1 << n);
        DenseState { n, amps }
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &DenseState) -> Complex64 {
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn scale(&mut self, s: Complex64) {
        for a in self.amps.iter_mut() {
            *a *= s;
        }
    }

    /// Applies the Pauli (support anywhere) in place.
    pub fn apply_pauli(&mut self, p: &PauliString, qubits: &[usize]) {
        assert_eq!(p.len(), qubits.len());
        let mut flip = 0usize;
        for (k, &q) in qubits.iter().enumerate() {
            let (x, _) = p.letter(k).bits();
            if x {
                flip |= 1 << q;
            }
        }
        let global = Complex64::new(0.0, 1.0).powu(p.phase_exponent() as u32);
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (idx, &a) in self.amps.iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            let mut amp = a * global;
            for (k, &q) in qubits.iter().enumerate() {
                let bit = (idx >> q) & 1 == 1;
                let (_, factor) = letter_action(p.letter(k), bit);
                amp *= factor;
            }
            out[idx ^ flip] += amp;
        }
        self.amps = out;
    }

    /// Projects onto the `(-1)^m` eigenspace of the Pauli, unnormalized.
    pub fn project_pauli(&mut self, p: &PauliString, qubits: &[usize], m: bool) {
        let mut flipped = self.clone();
        flipped.apply_pauli(p, qubits);
        let s = if m { -0.5 } else { 0.5 };
        for (a, b) in self.amps.iter_mut().zip(flipped.amps.iter()) {
            *a = *a * 0.5 + b * s;
        }
    }

    /// Applies a single-qubit 2x2 unitary, rows indexed by output bit.
    pub fn apply_1q(&mut self, q: usize, u: [[Complex64; 2]; 2]) {
        let step = 1 << q;
        for base in 0..self.amps.len() {
            if base & step != 0 {
                continue;
            }
            let a0 = self.amps[base];
            let a1 = self.amps[base | step];
            self.amps[base] = u[0][0] * a0 + u[0][1] * a1;
            self.amps[base | step] = u[1][0] * a0 + u[1][1] * a1;
        }
    }
}

/// +1 eigenstate of a letter as a 2-component ket.
fn eigenstate(l: Letter) -> [Complex64; 2] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match l {
        Letter::Z | Letter::I => [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        Letter::X => [Complex64::new(h, 0.0), Complex64::new(h, 0.0)],
        Letter::Y => [Complex64::new(h, 0.0), Complex64::new(0.0, h)],
    }
}

/// A fixed state with nonzero overlap with both eigenstates of `l`:
/// `|0>` for X/Y openings, `|+>` for Z openings.
fn complementary_state(l: Letter) -> [Complex64; 2] {
    match l {
        Letter::X | Letter::Y => eigenstate(Letter::Z),
        _ => eigenstate(Letter::X),
    }
}

fn bracket(out: &[Complex64; 2], l: Letter, inp: &[Complex64; 2]) -> Complex64 {
    // <out| L |in> on one qubit
    let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
    let p1 = PauliString::single(1, 0, l);
    let d = dense_pauli(&p1).unwrap();
    for r in 0..2 {
        for c in 0..2 {
            m[r][c] = d.get(r, c);
        }
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for r in 0..2 {
        for c in 0..2 {
            acc += out[r].conj() * m[r][c] * inp[c];
        }
    }
    acc
}

/// Verification mode for [`oracle_verify`].
#[derive(Clone, Copy, Debug)]
pub enum OracleMode {
    /// Check every outcome string of the circuit.
    Exhaustive,
    /// Check `count` trajectory-sampled outcome strings.
    Sampled { count: usize, seed: u64 },
}

/// Outcome of a dense verification run.
#[derive(Debug, Clone)]
pub struct OracleReport {
    pub ok: bool,
    /// Strings examined (2^k in exhaustive mode).
    pub branches_checked: u64,
    /// Strings with nonzero amplitude.
    pub consistent_branches: u64,
    /// Largest relative deviation from exact proportionality seen.
    pub max_deviation: f64,
    /// Smallest |c| over consistent branches (proportionality constant).
    pub min_proportionality: f64,
    pub failure: Option<String>,
}

impl OracleReport {
    fn fail(msg: String) -> Self {
        OracleReport {
            ok: false,
            branches_checked: 0,
            consistent_branches: 0,
            max_deviation: f64::INFINITY,
            min_proportionality: 0.0,
            failure: Some(msg),
        }
    }
}

struct OpInfo {
    qubits: Vec<usize>,
    letters: Vec<Letter>,
}

/// Flattened time-ordered ops with rotations folded into the bases.
fn flatten_ops(c: &Circuit) -> Result<Vec<OpInfo>, OracleError> {
    let (folded, offsets) = crate::tableau::fold_rotations(c)?;
    if offsets.iter().any(|&o| o) {
        return Err(OracleError::Verify(
            crate::tableau::TableauError::UnsupportedRotations(
                "rotation folding produced a sign flip".into(),
            ),
        ));
    }
    let mut ops = Vec::new();
    for layer in folded.layers() {
        for op in layer {
            ops.push(OpInfo {
                qubits: op.qubits().to_vec(),
                letters: op.letters().to_vec(),
            });
        }
    }
    Ok(ops)
}

/// Opening/closing single-qubit bases of every auxiliary qubit.
fn aux_boundary(c: &Circuit, ops: &[OpInfo]) -> Result<Vec<(usize, Letter, Letter)>, OracleError> {
    let mut out = Vec::new();
    for &q in c.auxiliary() {
        let mut first = None;
        let mut last = None;
        for op in ops.iter() {
            if let Some(k) = op.qubits.iter().position(|&x| x == q) {
                let single = op.qubits.len() == 1;
                if first.is_none() {
                    first = single.then_some(op.letters[k]);
                    if first.is_none() {
                        return Err(OracleError::NoOpening(q));
                    }
                }
                last = single.then_some(op.letters[k]);
            }
        }
        let f = first.ok_or(OracleError::NoOpening(q))?;
        let l = last.ok_or(OracleError::NoClosing(q))?;
        out.push((q, f, l));
    }
    Ok(out)
}

/// Dense verification of a compiled circuit against a target Pauli.
///
/// Forms the projector product `K(m) = Π_{p_k}(m_k) ... Π_{p_1}(m_1)` and
/// checks that its compression onto the physical register (auxiliary legs
/// closed with fixed input/output vectors derived from the opening and
/// closing single-qubit measurements) is proportional to
/// `Π_target(e(m))`, where `e` must agree with the tableau sign mask.
///
/// Exhaustive mode covers all `2^k` outcome strings at once by expanding
/// the projector product over Pauli subset products and applying a
/// Walsh-Hadamard transform over the outcome bits; sampled mode simulates
/// trajectories of a reference-entangled state vector.
pub fn oracle_verify(
    c: &Circuit,
    target: &PauliString,
    mode: OracleMode,
) -> Result<OracleReport, OracleError> {
    c.validate()?;
    if target.len() != c.physical().len() || !target.is_hermitian() {
        return Err(OracleError::TargetMismatch);
    }
    if c.qubit_count() > MAX_DENSE_QUBITS {
        return Err(OracleError::TooManyQubits(c.qubit_count()));
    }
    let report = verify_dwr(c, target)?;
    let ops = flatten_ops(c)?;
    match mode {
        OracleMode::Exhaustive => {
            if ops.len() > MAX_EXHAUSTIVE_OPS {
                return Err(OracleError::TooManyOps(ops.len()));
            }
            exhaustive_check(c, target, &ops, &report)
        }
        OracleMode::Sampled { count, seed } => sampled_check(c, target, &ops, &report, count, seed),
    }
}

fn exhaustive_check(
    c: &Circuit,
    target: &PauliString,
    ops: &[OpInfo],
    tab: &crate::tableau::VerificationReport,
) -> Result<OracleReport, OracleError> {
    let n = c.qubit_count();
    let k = ops.len();
    let boundary = aux_boundary(c, ops)?;

    // per-qubit bracket table <out| L |in>, identity bracket prefilled
    let mut br = vec![[Complex64::new(0.0, 0.0); 4]; n];
    let mut is_aux = vec![false; n];
    for &(q, first, last) in &boundary {
        is_aux[q] = true;
        let inp = complementary_state(first);
        let outp = complementary_state(last);
        for (idx, l) in [Letter::I, Letter::X, Letter::Y, Letter::Z].into_iter().enumerate() {
            br[q][idx] = bracket(&outp, l, &inp);
        }
    }
    // physical-part key: packed x/z bits in physical-register order
    let phys = c.physical().to_vec();
    let w = phys.len();
    let key_of = |letters: &[Letter]| -> u64 {
        let mut key = 0u64;
        for (j, &q) in phys.iter().enumerate() {
            let (x, z) = letters[q].bits();
            if x {
                key |= 1 << j;
            }
            if z {
                key |= 1 << (w + j);
            }
        }
        key
    };
    let mut target_letters = vec![Letter::I; n];
    for (j, &q) in phys.iter().enumerate() {
        target_letters[q] = target.letter(j);
    }
    let target_key = key_of(&target_letters);
    if target_key == 0 {
        return Err(OracleError::TargetMismatch);
    }

    // DFS over op subsets: coef[S] = i^phase(P_S) * prod_aux <out|L|in>,
    // where including an op left-multiplies its Pauli onto the product.
    let size = 1usize << k;
    let zero = Complex64::new(0.0, 0.0);
    let mut sweep = SubsetSweep {
        ops,
        br: &br,
        is_aux: &is_aux,
        letters: vec![Letter::I; n],
        arr_i: vec![zero; size],
        arr_t: vec![zero; size],
        target_key,
        key_of: &key_of,
        stray: None,
    };
    let base_scalar: Complex64 = boundary.iter().map(|&(q, _, _)| br[q][0]).product();
    sweep.run(0, 0, base_scalar);
    let SubsetSweep {
        mut arr_i,
        mut arr_t,
        stray,
        ..
    } = sweep;

    if let Some(msg) = stray {
        return Ok(OracleReport::fail(msg));
    }

    walsh_hadamard(&mut arr_i);
    walsh_hadamard(&mut arr_t);

    // target's own sign: expected ratio c_T/c_I = (-1)^(e + kt/2)
    let kt_sign = if target.phase_exponent() == 2 { 1u64 } else { 0u64 };

    // evaluate every outcome string against the tableau predictions
    let scale = arr_i
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max)
        .max(arr_t.iter().map(|c| c.norm()).fold(0.0, f64::max));
    if scale < ZERO_TOL {
        return Ok(OracleReport::fail(
            "projector product vanishes on every branch".into(),
        ));
    }
    let consist_tol = 1e-6 * scale;
    let mut consistent = 0u64;
    let mut max_dev = 0.0f64;
    let mut min_prop = f64::INFINITY;
    let norm_factor = 0.5f64.powi(k as i32); // K(m) carries 2^-k per projector
    for m in 0..size as u64 {
        let ci = arr_i[m as usize];
        let ct = arr_t[m as usize];
        let alive = ci.norm() > consist_tol || ct.norm() > consist_tol;
        let tab_alive = tab
            .determined
            .iter()
            .all(|(id, expr)| ((m >> id) & 1 == 1) == expr.eval_mask(m));
        if alive != tab_alive {
            return Ok(OracleReport::fail(format!(
                "branch m={m:#b}: dense consistency {alive} but tableau consistency {tab_alive}"
            )));
        }
        if !alive {
            max_dev = max_dev.max(ci.norm().max(ct.norm()) / scale);
            continue;
        }
        consistent += 1;
        if ci.norm() < consist_tol {
            return Ok(OracleReport::fail(format!(
                "branch m={m:#b}: identity component vanishes while target survives"
            )));
        }
        let ratio = ct / ci;
        let dev = (ratio.norm() - 1.0).abs().max(ratio.im.abs() / ratio.norm());
        max_dev = max_dev.max(dev);
        let dense_sign = (ratio.re < 0.0) as u64 ^ kt_sign;
        let tab_sign = tab.sign_mask.eval_mask(m) as u64;
        if dense_sign != tab_sign {
            return Ok(OracleReport::fail(format!(
                "branch m={m:#b}: dense sign {dense_sign} != tableau sign mask {tab_sign}"
            )));
        }
        // |c| from C(m) = c * Pi_target(e): identity coefficient is c/2
        min_prop = min_prop.min(2.0 * ci.norm() * norm_factor);
    }
    if consistent == 0 {
        return Ok(OracleReport::fail("no consistent outcome string".into()));
    }
    let ok = max_dev < 1e-9 && min_prop > 1e-9;
    Ok(OracleReport {
        ok,
        branches_checked: size as u64,
        consistent_branches: consistent,
        max_deviation: max_dev,
        min_proportionality: min_prop,
        failure: (!ok).then(|| format!("deviation {max_dev:.3e}, min |c| {min_prop:.3e}")),
    })
}

struct SubsetSweep<'a> {
    ops: &'a [OpInfo],
    br: &'a [[Complex64; 4]],
    is_aux: &'a [bool],
    letters: Vec<Letter>,
    arr_i: Vec<Complex64>,
    arr_t: Vec<Complex64>,
    target_key: u64,
    key_of: &'a dyn Fn(&[Letter]) -> u64,
    stray: Option<String>,
}

impl SubsetSweep<'_> {
    fn run(&mut self, i: usize, mask: u64, scalar: Complex64) {
        if self.stray.is_some() {
            return;
        }
        if i == self.ops.len() {
            let key = (self.key_of)(&self.letters);
            if key == 0 {
                self.arr_i[mask as usize] = scalar;
            } else if key == self.target_key {
                self.arr_t[mask as usize] = scalar;
            } else if scalar.norm() > 1e-9 {
                let s: String = self.letters.iter().map(|l| l.to_char()).collect();
                self.stray = Some(format!(
                    "projector expansion leaves stray operator {s} (subset {mask:#b})"
                ));
            }
            return;
        }
        self.run(i + 1, mask, scalar);
        let mut new_scalar = scalar;
        let mut saved = [(usize::MAX, Letter::I); 2];
        let nq = self.ops[i].qubits.len();
        for j in 0..nq {
            let q = self.ops[i].qubits[j];
            let l = self.ops[i].letters[j];
            let old = self.letters[q];
            saved[j] = (q, old);
            let (prod, phase) = crate::pauli::letter_product(l, old);
            new_scalar *= Complex64::new(0.0, 1.0).powu(phase as u32);
            if self.is_aux[q] {
                // complementary boundary vectors keep every bracket nonzero
                new_scalar *= self.br[q][letter_slot(prod)] / self.br[q][letter_slot(old)];
            }
            self.letters[q] = prod;
        }
        self.run(i + 1, mask | (1 << i), new_scalar);
        for &(q, l) in saved.iter().take(nq) {
            self.letters[q] = l;
        }
    }
}

fn letter_slot(l: Letter) -> usize {
    match l {
        Letter::I => 0,
        Letter::X => 1,
        Letter::Y => 2,
        Letter::Z => 3,
    }
}

/// In-place Walsh-Hadamard transform: out[m] = sum_S (-1)^{<m,S>} in[S].
fn walsh_hadamard(a: &mut [Complex64]) {
    let n = a.len();
    let mut len = 1;
    while len < n {
        let mut i = 0;
        while i < n {
            for j in i..i + len {
                let x = a[j];
                let y = a[j + len];
                a[j] = x + y;
                a[j + len] = x - y;
            }
            i += len << 1;
        }
        len <<= 1;
    }
}

fn sampled_check(
    c: &Circuit,
    target: &PauliString,
    ops: &[OpInfo],
    tab: &crate::tableau::VerificationReport,
    count: usize,
    seed: u64,
) -> Result<OracleReport, OracleError> {
    let n = c.qubit_count();
    let w = c.physical().len();
    if n + w > 25 {
        return Err(OracleError::TooManyQubits(n + w));
    }
    let boundary = aux_boundary(c, ops)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // initial state: Bell pair (phys_j, ref_j) for each physical qubit,
    // complementary opening state on each auxiliary qubit
    let total = n + w;
    let mut per_qubit: Vec<[Complex64; 2]> = vec![[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]; n];
    for &(q, first, _) in &boundary {
        per_qubit[q] = complementary_state(first);
    }
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let build_initial = || {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << total];
        for idx in 0..amps.len() {
            let mut a = Complex64::new(1.0, 0.0);
            let mut ok = true;
            for (j, &q) in c.physical().iter().enumerate() {
                let pb = (idx >> q) & 1;
                let rb = (idx >> (n + j)) & 1;
                if pb != rb {
                    ok = false;
                    break;
                }
                a *= h;
            }
            if !ok {
                continue;
            }
            for &(q, _, _) in &boundary {
                a *= per_qubit[q][(idx >> q) & 1];
            }
            amps[idx] = a;
        }
        DenseState::from_amps(total, amps)
    };

    // expected compressed state for sign e: (Pi_target(e) on phys) |Bell stack>
    let mut expected = Vec::new();
    for e in 0..2 {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << (2 * w)];
        for idx in 0..amps.len() {
            let mut a = Complex64::new(1.0, 0.0);
            let mut okp = true;
            for j in 0..w {
                if (idx >> j) & 1 != (idx >> (w + j)) & 1 {
                    okp = false;
                    break;
                }
                a *= h;
            }
            if okp {
                amps[idx] = a;
            }
        }
        let mut st = DenseState::from_amps(2 * w, amps);
        let phys_slots: Vec<usize> = (0..w).collect();
        st.project_pauli(target, &phys_slots, e == 1);
        expected.push(st);
    }

    let mut max_dev = 0.0f64;
    let mut min_prop = f64::INFINITY;
    for _ in 0..count {
        let mut st = build_initial();
        let mut bits = 0u64;
        let mut raw_weight = 1.0f64;
        for (i, op) in ops.iter().enumerate() {
            let p = PauliString::new(op.letters.clone(), 0);
            let mut st0 = st.clone();
            st0.project_pauli(&p, &op.qubits, false);
            let n0 = st0.norm_sqr();
            let mut st1 = st;
            st1.project_pauli(&p, &op.qubits, true);
            let n1 = st1.norm_sqr();
            let total_n = n0 + n1;
            let pick1 = if n0 / total_n < 1e-12 {
                true
            } else if n1 / total_n < 1e-12 {
                false
            } else {
                rng.gen_bool(n1 / total_n)
            };
            if pick1 {
                bits |= 1 << i;
                raw_weight *= n1 / total_n;
                st = st1;
            } else {
                raw_weight *= n0 / total_n;
                st = st0;
            }
            let nn = st.norm_sqr().sqrt();
            st.scale(Complex64::new(1.0 / nn, 0.0));
        }
        // tableau consistency of the sampled string
        for (id, expr) in &tab.determined {
            if ((bits >> id) & 1 == 1) != expr.eval_mask(bits) {
                return Ok(OracleReport::fail(format!(
                    "sampled branch m={bits:#b} violates tableau determination of outcome {id}"
                )));
            }
        }
        // close auxiliary legs with <out|
        let mut comp = vec![Complex64::new(0.0, 0.0); 1 << (2 * w)];
        for (idx, &a) in st.amps.iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            let mut amp = a;
            for &(q, _, last) in &boundary {
                let outv = complementary_state(last);
                amp *= outv[(idx >> q) & 1].conj();
            }
            let mut small = 0usize;
            for (j, &q) in c.physical().iter().enumerate() {
                if (idx >> q) & 1 == 1 {
                    small |= 1 << j;
                }
                if (idx >> (n + j)) & 1 == 1 {
                    small |= 1 << (w + j);
                }
            }
            comp[small] += amp;
        }
        let comp = DenseState::from_amps(2 * w, comp);
        let cn = comp.norm_sqr().sqrt();
        if cn < 1e-9 {
            return Ok(OracleReport::fail(format!(
                "sampled branch m={bits:#b}: compression vanishes"
            )));
        }
        let e_tab = tab.sign_mask.eval_mask(bits) as usize;
        let ov = expected[e_tab].inner(&comp);
        let en = expected[e_tab].norm_sqr();
        let coef = ov / en;
        let mut resid = 0.0f64;
        for (a, b) in comp.amps.iter().zip(expected[e_tab].amps.iter()) {
            resid += (a - b * coef).norm_sqr();
        }
        let dev = resid.sqrt() / cn;
        max_dev = max_dev.max(dev);
        min_prop = min_prop.min(coef.norm() * raw_weight.sqrt());
        if dev > 1e-9 {
            return Ok(OracleReport::fail(format!(
                "sampled branch m={bits:#b}: residual {dev:.3e} against tableau sign {e_tab}"
            )));
        }
    }
    Ok(OracleReport {
        ok: true,
        branches_checked: count as u64,
        consistent_branches: count as u64,
        max_deviation: max_dev,
        min_proportionality: min_prop,
        failure: None,
    })
}

/// Dense operator implemented by the circuit when every outcome is 0,
/// compressed onto the physical register (auxiliary legs closed with the
/// +1 eigenstates of their opening/closing measurements).
pub fn compressed_all_zero(c: &Circuit) -> Result<DenseOperator, OracleError> {
    c.validate()?;
    let n = c.qubit_count();
    if n > MAX_DENSE_QUBITS {
        return Err(OracleError::TooManyQubits(n));
    }
    let ops = flatten_ops(c)?;
    let boundary = aux_boundary(c, &ops)?;
    let phys = c.physical();
    let w = phys.len();
    let mut out = DenseOperator::zeros(w)?;
    for col in 0..(1usize << w) {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        // |col> on physical qubits, opening eigenstates on auxiliaries
        let mut seed_idx = 0usize;
        for (j, &q) in phys.iter().enumerate() {
            if (col >> j) & 1 == 1 {
                seed_idx |= 1 << q;
            }
        }
        // fill product over aux states
        for idx in 0..amps.len() {
            if (idx ^ seed_idx) & phys_mask(phys) != 0 {
                continue;
            }
            let mut a = Complex64::new(1.0, 0.0);
            for &(q, first, _) in &boundary {
                let v = eigenstate(first);
                a *= v[(idx >> q) & 1];
            }
            amps[idx] = a;
        }
        let mut st = DenseState::from_amps(n, amps);
        for op in &ops {
            let p = PauliString::new(op.letters.clone(), 0);
            st.project_pauli(&p, &op.qubits, false);
        }
        // close with <closing eigenstate| on each auxiliary
        for (idx, &a) in st.amps.iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            let mut amp = a;
            for &(q, _, last) in &boundary {
                let v = eigenstate(last);
                amp *= v[(idx >> q) & 1].conj();
            }
            let mut row = 0usize;
            for (j, &q) in phys.iter().enumerate() {
                if (idx >> q) & 1 == 1 {
                    row |= 1 << j;
                }
            }
            let cur = out.get(row, col);
            out.set(row, col, cur + amp);
        }
    }
    Ok(out)
}

fn phys_mask(phys: &[usize]) -> usize {
    phys.iter().fold(0usize, |m, &q| m | (1 << q))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn dense_z_is_diag_1_minus1() {
        let d = dense_pauli(&p("Z")).unwrap();
        assert_eq!(d.get(0, 0), Complex64::new(1.0, 0.0));
        assert_eq!(d.get(1, 1), Complex64::new(-1.0, 0.0));
        assert_eq!(d.get(0, 1), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn dense_y_is_hermitian() {
        let d = dense_pauli(&p("Y")).unwrap();
        assert!(d.max_abs_diff(&d.adjoint()) < 1e-15);
    }

    #[test]
    fn xx_spectrum_via_square() {
        // XX squares to the identity, so eigenvalues are +-1
        let d = dense_pauli(&p("XX")).unwrap();
        assert!(d.matmul(&d).max_abs_diff(&DenseOperator::identity(2).unwrap()) < 1e-15);
    }

    #[test]
    fn projector_completeness_and_idempotence() {
        let zz = p("ZZ");
        let p0 = dense_projector(&zz, false).unwrap();
        let p1 = dense_projector(&zz, true).unwrap();
        assert!(p0.add(&p1).max_abs_diff(&DenseOperator::identity(2).unwrap()) < 1e-12);
        assert!(p0.matmul(&p0).max_abs_diff(&p0) < 1e-12);
        assert_eq!(dense_projector(&p("Z"), false).unwrap().get(0, 0).re, 1.0);
        assert_eq!(dense_projector(&p("Z"), false).unwrap().get(1, 1).re, 0.0);
    }

    #[test]
    fn projector_rejects_non_hermitian() {
        let q = PauliString::new(vec![crate::pauli::Letter::X], 1);
        assert!(dense_projector(&q, false).is_err());
    }

    #[test]
    fn cap_is_enforced() {
        assert!(DenseOperator::zeros(MAX_DENSE_QUBITS + 1).is_err());
    }

    #[test]
    fn walsh_hadamard_small() {
        let mut a = vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(2.0, 0.0),
            Complex64::new(3.0, 0.0),
            Complex64::new(4.0, 0.0),
        ];
        walsh_hadamard(&mut a);
        // out[m] = sum_S (-1)^{m.S} a[S]
        assert_eq!(a[0].re, 10.0);
        assert_eq!(a[1].re, 1.0 - 2.0 + 3.0 - 4.0);
        assert_eq!(a[2].re, 1.0 + 2.0 - 3.0 - 4.0);
        assert_eq!(a[3].re, 1.0 - 2.0 - 3.0 + 4.0);
    }

    #[test]
    fn state_projection_matches_operator() {
        let mut st = DenseState::zero_state(2);
        st.apply_1q(0, h_gate());
        // |+0>, project XX outcome 0: overlap should stay nonzero
        st.project_pauli(&p("XX"), &[0, 1], false);
        let d = dense_projector(&p("XX"), false).unwrap();
        let mut expect = DenseState::zero_state(2);
        expect.apply_1q(0, h_gate());
        let mut out = vec![Complex64::new(0.0, 0.0); 4];
        for r in 0..4 {
            for c in 0..4 {
                out[r] += d.get(r, c) * expect.amps[c];
            }
        }
        for (a, b) in st.amps.iter().zip(out.iter()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    fn h_gate() -> [[Complex64; 2]; 2] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        [
            [Complex64::new(h, 0.0), Complex64::new(h, 0.0)],
            [Complex64::new(h, 0.0), Complex64::new(-h, 0.0)],
        ]
    }
}
