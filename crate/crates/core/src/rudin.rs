//! Sign-modulated Rudin–Shapiro recursion and its substitution.
//!
//! Starting from `P_0 = Q_0 = x`, step `k` of the recursion is
//!
//! ```text
//! P_{k+1} = P_k + s_k · x^{2^k} · Q_k
//! Q_{k+1} = P_k − s_k · x^{2^k} · Q_k
//! ```
//!
//! with `s_k = ±1` taken periodically from a [`SignSequence`]. Coefficient
//! arrays are 0-based: position `n` holds the coefficient of `x^{n+1}`.
//!
//! Coding the coefficient blocks of `P, Q, −Q, −P` by the letters
//! `A, B, C, D` turns one step with sign `s` into a length-2 substitution,
//! and one full period of signs into their composition.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::subst::{Alphabet, SubstitutionRule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            '+' => Some(Sign::Plus),
            '-' => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// Nonempty period of signs, written as a string over `{+, -}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignSequence {
    period: Vec<Sign>,
}

impl SignSequence {
    pub fn new(period: Vec<Sign>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::InvalidSigns("sign sequence must be nonempty".into()));
        }
        Ok(Self { period })
    }

    pub fn period(&self) -> &[Sign] {
        &self.period
    }

    pub fn len(&self) -> usize {
        self.period.len()
    }

    pub fn is_empty(&self) -> bool {
        self.period.is_empty()
    }

    /// Sign used at recursion step `step`.
    pub fn at(&self, step: usize) -> Sign {
        self.period[step % self.period.len()]
    }
}

impl FromStr for SignSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let period = s
            .chars()
            .map(|c| {
                Sign::from_char(c).ok_or_else(|| {
                    Error::InvalidSigns(format!("{c:?} in {s:?}; only '+' and '-' are allowed"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(period)
    }
}

impl fmt::Display for SignSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.period
            .iter()
            .try_for_each(|s| write!(f, "{}", s.as_char()))
    }
}

/// Coefficient arrays of `P_k` and `Q_k`, each of length `2^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyPair {
    level: u32,
    p: Vec<i8>,
    q: Vec<i8>,
}

impl PolyPair {
    /// `P_0 = Q_0 = x`.
    pub fn base() -> Self {
        Self {
            level: 0,
            p: vec![1],
            q: vec![1],
        }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn p_coeffs(&self) -> &[i8] {
        &self.p
    }

    pub fn q_coeffs(&self) -> &[i8] {
        &self.q
    }

    /// One recursion step: `p' = p ++ s·q`, `q' = p ++ (−s)·q`.
    pub fn step(&self, sign: Sign) -> Self {
        let s = sign.value();
        let mut p = Vec::with_capacity(2 * self.p.len());
        p.extend_from_slice(&self.p);
        p.extend(self.q.iter().map(|&c| s * c));
        let mut q = Vec::with_capacity(2 * self.p.len());
        q.extend_from_slice(&self.p);
        q.extend(self.q.iter().map(|&c| -s * c));
        Self {
            level: self.level + 1,
            p,
            q,
        }
    }

    /// Pair at level `k`, step `j` using sign `signs.at(j)`.
    pub fn at_level(signs: &SignSequence, k: u32) -> Self {
        (0..k as usize).fold(Self::base(), |pair, j| pair.step(signs.at(j)))
    }
}

/// First `2^k` terms of the binary sequence: the coefficients of `P_k`.
pub fn coefficients(signs: &SignSequence, k: u32) -> Vec<i8> {
    PolyPair::at_level(signs, k).p
}

/// First `n` terms of the binary sequence for `signs`.
pub fn sequence_prefix(signs: &SignSequence, n: usize) -> Vec<i8> {
    let k = n.max(1).next_power_of_two().trailing_zeros();
    let mut c = coefficients(signs, k);
    c.truncate(n);
    c
}

/// Length-2 rule for one recursion step on `{A, B, C, D}`.
pub fn single_step_substitution(sign: Sign) -> SubstitutionRule {
    let images: &[&str] = match sign {
        Sign::Plus => &["AB", "AC", "DB", "DC"],
        Sign::Minus => &["AC", "AB", "DC", "DB"],
    };
    SubstitutionRule::from_strs("ABCD", images).expect("static rule is valid")
}

/// Length-`2^p` rule `σ_{s_0} ∘ σ_{s_1} ∘ … ∘ σ_{s_{p−1}}` for one period.
pub fn derive_substitution(signs: &SignSequence) -> SubstitutionRule {
    let mut rules = signs.period().iter().map(|&s| single_step_substitution(s));
    let first = rules.next().expect("sign sequence is nonempty");
    rules.fold(first, |acc, r| {
        acc.compose(&r).expect("all step rules share the alphabet")
    })
}

/// Letter → ±1 weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightMap {
    weights: BTreeMap<char, i8>,
}

impl WeightMap {
    pub fn new(weights: BTreeMap<char, i8>) -> Result<Self> {
        if let Some((c, w)) = weights.iter().find(|(_, w)| w.abs() != 1) {
            return Err(Error::InvalidArgument(format!(
                "weight {w} for {c:?} is not ±1"
            )));
        }
        Ok(Self { weights })
    }

    /// `A, B → +1` and `C, D → −1`.
    pub fn standard() -> Self {
        Self {
            weights: [('A', 1), ('B', 1), ('C', -1), ('D', -1)]
                .into_iter()
                .collect(),
        }
    }

    /// First half of the alphabet `+1`, second half `−1`; for `ABCD` this is
    /// [`standard`](Self::standard).
    pub fn balanced_for(alphabet: &Alphabet) -> Self {
        let half = alphabet.len().div_ceil(2);
        Self {
            weights: alphabet
                .letters()
                .iter()
                .enumerate()
                .map(|(i, &c)| (c, if i < half { 1 } else { -1 }))
                .collect(),
        }
    }

    /// Weights from a `+`/`-` string read in alphabet order.
    pub fn from_signs(alphabet: &Alphabet, signs: &str) -> Result<Self> {
        let chars: Vec<char> = signs.chars().collect();
        if chars.len() != alphabet.len() {
            return Err(Error::InvalidArgument(format!(
                "{} weights for {} letters",
                chars.len(),
                alphabet.len()
            )));
        }
        let weights = alphabet
            .letters()
            .iter()
            .zip(chars)
            .map(|(&l, c)| {
                Sign::from_char(c)
                    .map(|s| (l, s.value()))
                    .ok_or_else(|| Error::InvalidArgument(format!("weight {c:?} is not + or -")))
            })
            .collect::<Result<_>>()?;
        Ok(Self { weights })
    }

    pub fn get(&self, c: char) -> Option<i8> {
        self.weights.get(&c).copied()
    }

    /// Weights in alphabet order; every letter must be covered.
    pub fn vector_for(&self, alphabet: &Alphabet) -> Result<Vec<i8>> {
        alphabet
            .letters()
            .iter()
            .map(|&c| self.get(c).ok_or(Error::UnknownLetter(c)))
            .collect()
    }
}

/// Letterwise image of `word` under `weights`.
pub fn binary_reduce(word: &str, weights: &WeightMap) -> Result<Vec<i8>> {
    word.chars()
        .map(|c| weights.get(c).ok_or(Error::UnknownLetter(c)))
        .collect()
}
