//! Signed multi-qubit Pauli operators.
//!
//! A [`PauliString`] is `i^k · L_0 ⊗ L_1 ⊗ ... ⊗ L_{n-1}` with letters
//! `L_q ∈ {I, X, Y, Z}` and a phase exponent `k` mod 4. All arithmetic is
//! exact integer arithmetic; products accumulate the phase through the
//! single-qubit multiplication table, so `X·Z = -iY` comes out with
//! `phase_exponent == 3`.

use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PauliError {
    #[error("qubit count mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("operation requires a non-identity Pauli")]
    WeightZero,
    #[error("operator is not Hermitian (phase exponent {0})")]
    NonHermitian(u8),
    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

/// Single-qubit Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    pub fn is_identity(self) -> bool {
        self == Letter::I
    }

    /// True iff the two letters anticommute (both non-identity and distinct).
    pub fn anticommutes(self, other: Letter) -> bool {
        self != Letter::I && other != Letter::I && self != other
    }

    pub fn to_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Letter> {
        match c {
            'I' => Some(Letter::I),
            'X' => Some(Letter::X),
            'Y' => Some(Letter::Y),
            'Z' => Some(Letter::Z),
            _ => None,
        }
    }

    /// x/z bits of the symplectic encoding: X=(1,0), Z=(0,1), Y=(1,1).
    pub fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Letter {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }
}

/// `a · b = i^k · letter`; returns `(letter, k)`.
pub(crate) fn letter_product(a: Letter, b: Letter) -> (Letter, u8) {
    use Letter::*;
    match (a, b) {
        (I, x) => (x, 0),
        (x, I) => (x, 0),
        (x, y) if x == y => (I, 0),
        (X, Y) => (Z, 1),
        (Y, X) => (Z, 3),
        (Y, Z) => (X, 1),
        (Z, Y) => (X, 3),
        (Z, X) => (Y, 1),
        (X, Z) => (Y, 3),
        _ => unreachable!(),
    }
}

/// A signed Pauli operator on `n` qubits.
///
/// Values are immutable after construction and cheap to clone; every
/// operation is a pure function.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    letters: Vec<Letter>,
    phase_exponent: u8,
}

impl PauliString {
    /// The identity on `n` qubits.
    pub fn identity(n: usize) -> Self {
        PauliString {
            letters: vec![Letter::I; n],
            phase_exponent: 0,
        }
    }

    pub fn new(letters: Vec<Letter>, phase_exponent: u8) -> Self {
        PauliString {
            letters,
            phase_exponent: phase_exponent & 3,
        }
    }

    /// Weight-1 operator `letter` acting on qubit `q` of `n`.
    pub fn single(n: usize, q: usize, letter: Letter) -> Self {
        assert!(q < n, "qubit index out of range");
        let mut letters = vec![Letter::I; n];
        letters[q] = letter;
        PauliString {
            letters,
            phase_exponent: 0,
        }
    }

    /// Build from per-qubit x/z bit slices; round-trips with [`Self::to_bits`].
    pub fn from_bits(x: &[bool], z: &[bool], phase_exponent: u8) -> Result<Self, PauliError> {
        if x.len() != z.len() {
            return Err(PauliError::SizeMismatch(x.len(), z.len()));
        }
        let letters = x
            .iter()
            .zip(z.iter())
            .map(|(&xb, &zb)| Letter::from_bits(xb, zb))
            .collect();
        Ok(PauliString {
            letters,
            phase_exponent: phase_exponent & 3,
        })
    }

    pub fn to_bits(&self) -> (Vec<bool>, Vec<bool>, u8) {
        let mut x = Vec::with_capacity(self.len());
        let mut z = Vec::with_capacity(self.len());
        for &l in &self.letters {
            let (xb, zb) = l.bits();
            x.push(xb);
            z.push(zb);
        }
        (x, z, self.phase_exponent)
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letter(&self, q: usize) -> Letter {
        self.letters[q]
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn phase_exponent(&self) -> u8 {
        self.phase_exponent
    }

    /// Number of non-identity letters.
    pub fn weight(&self) -> usize {
        self.letters.iter().filter(|l| !l.is_identity()).count()
    }

    /// Qubits carrying a non-identity letter, in index order.
    pub fn support(&self) -> Vec<usize> {
        self.letters
            .iter()
            .enumerate()
            .filter(|(_, l)| !l.is_identity())
            .map(|(q, _)| q)
            .collect()
    }

    /// Hermitian iff the phase is real (`i^k` with `k ∈ {0, 2}`).
    pub fn is_hermitian(&self) -> bool {
        self.phase_exponent % 2 == 0
    }

    pub fn is_identity(&self) -> bool {
        self.weight() == 0 && self.phase_exponent == 0
    }

    /// The same letters with the sign flipped.
    pub fn negated(&self) -> Self {
        PauliString {
            letters: self.letters.clone(),
            phase_exponent: (self.phase_exponent + 2) & 3,
        }
    }

    /// Same letters, phase reset to `+1`.
    pub fn with_positive_phase(&self) -> Self {
        PauliString {
            letters: self.letters.clone(),
            phase_exponent: 0,
        }
    }

    /// Group product `self · other` with exact phase accumulation.
    pub fn multiply(&self, other: &PauliString) -> Result<PauliString, PauliError> {
        if self.len() != other.len() {
            return Err(PauliError::SizeMismatch(self.len(), other.len()));
        }
        let mut phase = self.phase_exponent + other.phase_exponent;
        let letters = self
            .letters
            .iter()
            .zip(other.letters.iter())
            .map(|(&a, &b)| {
                let (l, k) = letter_product(a, b);
                phase += k;
                l
            })
            .collect();
        Ok(PauliString {
            letters,
            phase_exponent: phase & 3,
        })
    }

    /// True iff the operators commute: an even number of sites anticommute.
    pub fn commutes(&self, other: &PauliString) -> Result<bool, PauliError> {
        if self.len() != other.len() {
            return Err(PauliError::SizeMismatch(self.len(), other.len()));
        }
        let anti = self
            .letters
            .iter()
            .zip(other.letters.iter())
            .filter(|(&a, &b)| a.anticommutes(b))
            .count();
        Ok(anti % 2 == 0)
    }

    /// A deterministic weight-1 operator `Q` with `PQ = -QP`.
    ///
    /// Picks the lowest-index non-identity site; `Z` there if the letter is
    /// `X` or `Y`, else `X`. Requires a Hermitian input of weight >= 1.
    pub fn destabilizer(&self) -> Result<PauliString, PauliError> {
        if !self.is_hermitian() {
            return Err(PauliError::NonHermitian(self.phase_exponent));
        }
        let q = self
            .letters
            .iter()
            .position(|l| !l.is_identity())
            .ok_or(PauliError::WeightZero)?;
        let partner = match self.letters[q] {
            Letter::X | Letter::Y => Letter::Z,
            Letter::Z => Letter::X,
            Letter::I => unreachable!(),
        };
        Ok(PauliString::single(self.len(), q, partner))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = match self.phase_exponent {
            0 => "",
            1 => "+i",
            2 => "-",
            3 => "-i",
            _ => unreachable!(),
        };
        write!(f, "{sign}")?;
        for l in &self.letters {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for PauliString {
    type Err = PauliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |reason: &str| PauliError::Parse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let (phase, rest) = if let Some(r) = s.strip_prefix("+i") {
            (1, r)
        } else if let Some(r) = s.strip_prefix("-i") {
            (3, r)
        } else if let Some(r) = s.strip_prefix('i') {
            (1, r)
        } else if let Some(r) = s.strip_prefix('+') {
            (0, r)
        } else if let Some(r) = s.strip_prefix('-') {
            (2, r)
        } else {
            (0, s)
        };
        if rest.is_empty() {
            return Err(err("no letters"));
        }
        let mut letters = Vec::with_capacity(rest.len());
        for c in rest.chars() {
            letters.push(Letter::from_char(c).ok_or_else(|| {
                err(&format!("invalid letter {c:?} (expected I, X, Y or Z)"))
            })?);
        }
        Ok(PauliString {
            letters,
            phase_exponent: phase,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::dense_pauli;
    use proptest::prelude::*;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn multiply_xz_gives_minus_i_y() {
        let a = p("XI");
        let b = p("ZI");
        let c = a.multiply(&b).unwrap();
        assert_eq!(c.letters(), p("YI").letters());
        assert_eq!(c.phase_exponent(), 3);
    }

    #[test]
    fn hermitian_squares_to_identity() {
        let a = p("ZZ");
        let c = a.multiply(&a).unwrap();
        assert!(c.is_identity());
    }

    #[test]
    fn xx_times_zz_is_minus_yy() {
        let c = p("XX").multiply(&p("ZZ")).unwrap();
        assert_eq!(c.letters(), p("YY").letters());
        // checked against the dense 4x4 product below
        assert_eq!(c.phase_exponent(), 2);
        let dense_lhs = dense_pauli(&p("XX"))
            .unwrap()
            .matmul(&dense_pauli(&p("ZZ")).unwrap());
        let dense_rhs = dense_pauli(&c).unwrap();
        assert!(dense_lhs.max_abs_diff(&dense_rhs) < 1e-12);
    }

    #[test]
    fn commutes_examples() {
        assert!(p("ZZ").commutes(&p("XX")).unwrap());
        assert!(!p("XI").commutes(&p("ZI")).unwrap());
        assert!(!p("XXI").commutes(&p("IZZ")).unwrap());
    }

    #[test]
    fn size_mismatch_is_an_error() {
        assert_eq!(
            p("XX").multiply(&p("X")),
            Err(PauliError::SizeMismatch(2, 1))
        );
        assert_eq!(
            p("XX").commutes(&p("X")),
            Err(PauliError::SizeMismatch(2, 1))
        );
    }

    #[test]
    fn destabilizer_examples() {
        assert_eq!(p("ZZZ").destabilizer().unwrap().to_string(), "XII");
        assert_eq!(p("XX").destabilizer().unwrap().to_string(), "ZI");
        assert_eq!(p("YZ").destabilizer().unwrap().to_string(), "ZI");
        assert_eq!(
            PauliString::identity(2).destabilizer(),
            Err(PauliError::WeightZero)
        );
    }

    #[test]
    fn parse_and_print() {
        for s in ["ZZXI", "-ZZXI", "+iXY", "-iY", "X"] {
            let q: PauliString = s.parse().unwrap();
            assert_eq!(q.to_string(), s);
        }
        assert_eq!(p("+XX"), p("XX"));
        assert_eq!(p("iX").phase_exponent(), 1);
        assert!("".parse::<PauliString>().is_err());
        assert!("-".parse::<PauliString>().is_err());
        assert!("XQ".parse::<PauliString>().is_err());
    }

    #[test]
    fn symplectic_bits_round_trip() {
        let q = p("-iXYZI");
        let (x, z, k) = q.to_bits();
        assert_eq!(PauliString::from_bits(&x, &z, k).unwrap(), q);
    }

    fn arb_pauli(n: usize) -> impl Strategy<Value = PauliString> {
        (
            proptest::collection::vec(0..4usize, n),
            0..4u8,
        )
            .prop_map(|(ls, k)| {
                let letters = ls
                    .into_iter()
                    .map(|i| [Letter::I, Letter::X, Letter::Y, Letter::Z][i])
                    .collect();
                PauliString::new(letters, k)
            })
    }

    proptest! {
        #[test]
        fn multiply_agrees_with_dense(a in arb_pauli(4), b in arb_pauli(4)) {
            let c = a.multiply(&b).unwrap();
            let lhs = dense_pauli(&a).unwrap().matmul(&dense_pauli(&b).unwrap());
            let rhs = dense_pauli(&c).unwrap();
            prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        }

        #[test]
        fn commutes_agrees_with_dense(a in arb_pauli(4), b in arb_pauli(4)) {
            let da = dense_pauli(&a).unwrap();
            let db = dense_pauli(&b).unwrap();
            let comm = da.matmul(&db).max_abs_diff(&db.matmul(&da)) < 1e-12;
            prop_assert_eq!(a.commutes(&b).unwrap(), comm);
        }

        #[test]
        fn multiply_is_associative(a in arb_pauli(3), b in arb_pauli(3), c in arb_pauli(3)) {
            let ab_c = a.multiply(&b).unwrap().multiply(&c).unwrap();
            let a_bc = a.multiply(&b.multiply(&c).unwrap()).unwrap();
            prop_assert_eq!(ab_c, a_bc);
        }

        #[test]
        fn destabilizer_anticommutes(a in arb_pauli(5)) {
            prop_assume!(a.is_hermitian() && a.weight() >= 1);
            let q = a.destabilizer().unwrap();
            prop_assert_eq!(q.weight(), 1);
            prop_assert!(!a.commutes(&q).unwrap());
        }

        #[test]
        fn print_parse_round_trip(a in arb_pauli(6)) {
            let back: PauliString = a.to_string().parse().unwrap();
            prop_assert_eq!(back, a);
        }
    }
}
