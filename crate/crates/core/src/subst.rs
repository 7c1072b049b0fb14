//! Constant-length substitutions and their combinatorial data.
//!
//! Letters are stored as indices into the [`Alphabet`]; every matrix and
//! vector in the crate is indexed in alphabet order. Matrices follow the
//! column convention `(R_i)[α][β] = 1` iff the `i`-th letter of `σ(β)` is `α`,
//! so column `β` of the substitution matrix counts the letters of `σ(β)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{q, QMatrix, Q};

/// A letter, as an index into its alphabet.
pub type Letter = u8;
/// A word over an alphabet, as letter indices.
pub type Word = Vec<Letter>;

/// Ordered set of distinct single-character letters.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Alphabet {
    letters: Vec<char>,
}

impl Alphabet {
    pub fn new(letters: impl IntoIterator<Item = char>) -> Result<Self> {
        let letters: Vec<char> = letters.into_iter().collect();
        if letters.len() < 2 {
            return Err(Error::InvalidAlphabet(format!(
                "need at least 2 letters, got {}",
                letters.len()
            )));
        }
        if letters.len() > usize::from(Letter::MAX) + 1 {
            return Err(Error::InvalidAlphabet("more than 256 letters".into()));
        }
        let mut seen = BTreeSet::new();
        for &c in &letters {
            if c.is_whitespace() || c.is_control() {
                return Err(Error::InvalidAlphabet(format!("unusable letter {c:?}")));
            }
            if !seen.insert(c) {
                return Err(Error::InvalidAlphabet(format!("duplicate letter {c:?}")));
            }
        }
        Ok(Self { letters })
    }

    /// The alphabet `{A, B, C, D}` used by every Rudin–Shapiro type rule.
    pub fn abcd() -> Self {
        Self {
            letters: vec!['A', 'B', 'C', 'D'],
        }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[char] {
        &self.letters
    }

    pub fn char_of(&self, letter: Letter) -> char {
        self.letters[usize::from(letter)]
    }

    pub fn index_of(&self, c: char) -> Option<Letter> {
        self.letters
            .iter()
            .position(|&l| l == c)
            .map(|i| i as Letter)
    }

    pub fn parse_word(&self, s: &str) -> Result<Word> {
        s.chars()
            .map(|c| self.index_of(c).ok_or(Error::UnknownLetter(c)))
            .collect()
    }

    pub fn render(&self, word: &[Letter]) -> String {
        word.iter().map(|&l| self.char_of(l)).collect()
    }

    /// Two-letter label of the pair with lexicographic index `idx`.
    pub fn pair_label(&self, idx: usize) -> String {
        let d = self.len();
        let mut s = String::with_capacity(2);
        s.push(self.letters[idx / d]);
        s.push(self.letters[idx % d]);
        s
    }

    pub fn pair_index(&self, pair: &str) -> Result<usize> {
        let w = self.parse_word(pair)?;
        if w.len() != 2 {
            return Err(Error::InvalidArgument(format!(
                "{pair:?} is not a letter pair"
            )));
        }
        Ok(usize::from(w[0]) * self.len() + usize::from(w[1]))
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.letters.iter().try_for_each(|c| write!(f, "{c}"))
    }
}

/// Square nonnegative integer matrix indexed in alphabet order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    dim: usize,
    data: Vec<u64>,
}

impl IntMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0; dim * dim],
        }
    }

    pub fn from_rows(rows: &[&[u64]]) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim), "matrix must be square");
        Self {
            dim,
            data: rows.iter().flat_map(|r| r.iter().copied()).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> u64 {
        self.data[row * self.dim + col]
    }

    fn add_at(&mut self, row: usize, col: usize, v: u64) {
        self.data[row * self.dim + col] += v;
    }

    pub fn column_sums(&self) -> Vec<u64> {
        (0..self.dim)
            .map(|c| (0..self.dim).map(|r| self.get(r, c)).sum())
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn is_positive(&self) -> bool {
        self.data.iter().all(|&v| v > 0)
    }

    /// Positions of nonzero entries as `(row, col)`.
    pub fn support(&self) -> Vec<(usize, usize)> {
        (0..self.dim * self.dim)
            .filter(|&i| self.data[i] != 0)
            .map(|i| (i / self.dim, i % self.dim))
            .collect()
    }

    pub fn to_rational(&self) -> QMatrix {
        QMatrix::from_rows(
            (0..self.dim)
                .map(|r| (0..self.dim).map(|c| q(self.get(r, c) as i64)).collect())
                .collect(),
        )
    }

    /// Zero pattern of the product, which is all primitivity needs.
    fn pattern_mul(a: &[bool], b: &[bool], dim: usize) -> Vec<bool> {
        let mut out = vec![false; dim * dim];
        for i in 0..dim {
            for k in 0..dim {
                if a[i * dim + k] {
                    for j in 0..dim {
                        out[i * dim + j] |= b[k * dim + j];
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.dim {
            let row: Vec<String> = (0..self.dim).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// Perron–Frobenius eigenvalue and normalised right eigenvector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerronData {
    pub eigenvalue: u64,
    /// Letter frequencies, summing to 1.
    pub frequencies: Vec<Q>,
}

/// A constant-length substitution `σ` on an [`Alphabet`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubstitutionRule {
    alphabet: Alphabet,
    length: usize,
    images: Vec<Word>,
}

impl SubstitutionRule {
    /// Builds a rule from images given in alphabet order.
    pub fn new(alphabet: Alphabet, images: Vec<Word>) -> Result<Self> {
        if images.len() != alphabet.len() {
            return Err(Error::InvalidRule(format!(
                "{} images for {} letters",
                images.len(),
                alphabet.len()
            )));
        }
        let length = images[0].len();
        if length == 0 {
            return Err(Error::InvalidRule("images must be nonempty".into()));
        }
        for (i, img) in images.iter().enumerate() {
            if img.len() != length {
                return Err(Error::InvalidRule(format!(
                    "image of {:?} has length {}, expected {length}",
                    alphabet.char_of(i as Letter),
                    img.len()
                )));
            }
            if let Some(&bad) = img.iter().find(|&&l| usize::from(l) >= alphabet.len()) {
                return Err(Error::InvalidRule(format!(
                    "letter index {bad} out of range"
                )));
            }
        }
        Ok(Self {
            alphabet,
            length,
            images,
        })
    }

    /// Builds a rule from an alphabet string and image strings in alphabet
    /// order, e.g. `("ABCD", ["AB", "AC", "DB", "DC"])`.
    pub fn from_strs(alphabet: &str, images: &[&str]) -> Result<Self> {
        let alphabet = Alphabet::new(alphabet.chars())?;
        let images = images
            .iter()
            .map(|s| alphabet.parse_word(s))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::InvalidRule(e.to_string()))?;
        Self::new(alphabet, images)
    }

    /// Builds a rule from a letter → image map; every letter needs an image.
    pub fn from_map(alphabet: Alphabet, rules: &BTreeMap<char, String>) -> Result<Self> {
        if let Some(extra) = rules.keys().find(|c| alphabet.index_of(**c).is_none()) {
            return Err(Error::InvalidRule(format!(
                "rule given for {extra:?}, which is not in the alphabet"
            )));
        }
        let images = alphabet
            .letters()
            .iter()
            .map(|c| {
                let img = rules
                    .get(c)
                    .ok_or_else(|| Error::InvalidRule(format!("no image for {c:?}")))?;
                alphabet
                    .parse_word(img)
                    .map_err(|e| Error::InvalidRule(format!("image of {c:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(alphabet, images)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// Common length `L` of all images.
    pub fn length(&self) -> usize {
        self.length
    }

    pub fn size(&self) -> usize {
        self.alphabet.len()
    }

    pub fn image(&self, letter: Letter) -> &[Letter] {
        &self.images[usize::from(letter)]
    }

    pub fn image_str(&self, letter: Letter) -> String {
        self.alphabet.render(self.image(letter))
    }

    /// Images rendered as strings, in alphabet order.
    pub fn image_strs(&self) -> Vec<String> {
        (0..self.size())
            .map(|l| self.image_str(l as Letter))
            .collect()
    }

    pub fn apply(&self, word: &[Letter]) -> Word {
        let mut out = Vec::with_capacity(word.len() * self.length);
        for &l in word {
            out.extend_from_slice(self.image(l));
        }
        out
    }

    /// `self ∘ inner`: letters are mapped by `inner` first.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if self.alphabet != inner.alphabet {
            return Err(Error::InvalidRule(
                "composition over different alphabets".into(),
            ));
        }
        let images = inner.images.iter().map(|w| self.apply(w)).collect();
        Self::new(self.alphabet.clone(), images)
    }

    /// One 0/1 matrix per image position, `(R_i)[α][β] = [σ(β)_i = α]`.
    pub fn instruction_matrices(&self) -> Vec<IntMatrix> {
        (0..self.length)
            .map(|i| {
                let mut m = IntMatrix::zeros(self.size());
                for (beta, img) in self.images.iter().enumerate() {
                    m.add_at(usize::from(img[i]), beta, 1);
                }
                m
            })
            .collect()
    }

    /// `M[α][β]` = number of occurrences of `α` in `σ(β)`.
    pub fn substitution_matrix(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.size());
        for (beta, img) in self.images.iter().enumerate() {
            for &a in img {
                m.add_at(usize::from(a), beta, 1);
            }
        }
        m
    }

    /// Least `n ≤ (d−1)·d` with `M^n > 0`, or `None`. The bound is at least
    /// Wielandt's `(d−1)² + 1`, so `None` means not primitive.
    pub fn primitivity_exponent(&self) -> Option<usize> {
        let m = self.substitution_matrix();
        let d = m.dim();
        let base: Vec<bool> = m.data.iter().map(|&v| v > 0).collect();
        let mut pow = base.clone();
        for n in 1..=(d - 1) * d {
            if pow.iter().all(|&b| b) {
                return Some(n);
            }
            pow = IntMatrix::pattern_mul(&pow, &base, d);
        }
        None
    }

    pub fn is_primitive(&self) -> bool {
        self.primitivity_exponent().is_some()
    }

    /// Whether `σ(seed)` starts with `seed`.
    pub fn is_prolongable(&self, seed: Letter) -> bool {
        self.length >= 2 && self.image(seed)[0] == seed
    }

    /// First prolongable letter in alphabet order.
    pub fn default_seed(&self) -> Option<Letter> {
        (0..self.size() as Letter).find(|&l| self.is_prolongable(l))
    }

    /// First `n` letters of the one-sided fixed point grown from `seed`.
    pub fn fixed_point_prefix(&self, seed: Letter, n: usize) -> Result<Word> {
        if usize::from(seed) >= self.size() {
            return Err(Error::InvalidArgument(format!(
                "seed index {seed} out of range"
            )));
        }
        if !self.is_prolongable(seed) {
            return Err(Error::NonProlongableSeed(self.alphabet.char_of(seed)));
        }
        if n == 0 {
            return Err(Error::InvalidArgument(
                "prefix length must be at least 1".into(),
            ));
        }
        let mut word = vec![seed];
        while word.len() < n {
            // only the first ceil(n / L) letters matter for the next level
            let keep = word.len().min(n.div_ceil(self.length));
            word = self.apply(&word[..keep]);
        }
        word.truncate(n);
        Ok(word)
    }

    /// [`fixed_point_prefix`](Self::fixed_point_prefix) from a seed character.
    pub fn fixed_point_prefix_char(&self, seed: char, n: usize) -> Result<String> {
        let s = self
            .alphabet
            .index_of(seed)
            .ok_or(Error::UnknownLetter(seed))?;
        Ok(self.alphabet.render(&self.fixed_point_prefix(s, n)?))
    }

    /// All length-`ell` factors of the language.
    ///
    /// For a primitive rule every legal word occurs in `σ^n(a)` for any
    /// letter `a` and large `n`, so the scan starts from iterates of the
    /// first letter; this is the fixed-point prefix when that letter is
    /// prolongable. Factors are closed under "take the `ell`-factors of
    /// `σ(w)`", and every legal factor lies inside the image of an earlier
    /// one, so the closure is the full factor set.
    pub fn legal_factors(&self, ell: usize) -> Result<BTreeSet<Word>> {
        if !self.is_primitive() {
            return Err(Error::NotPrimitive);
        }
        if ell == 0 {
            return Err(Error::InvalidArgument(
                "factor length must be at least 1".into(),
            ));
        }
        let prefix_len = (4 * ell * self.length).max(64);
        let mut prefix: Word = vec![0];
        while prefix.len() < prefix_len {
            prefix = self.apply(&prefix);
        }
        let mut found: BTreeSet<Word> = prefix.windows(ell).map(<[Letter]>::to_vec).collect();
        let mut work: Vec<Word> = found.iter().cloned().collect();
        while let Some(w) = work.pop() {
            let img = self.apply(&w);
            for f in img.windows(ell) {
                if !found.contains(f) {
                    found.insert(f.to_vec());
                    work.push(f.to_vec());
                }
            }
        }
        Ok(found)
    }

    /// Left-neighbourhood aperiodicity test: the first letter (alphabet
    /// order) preceded by at least two distinct letters among legal 2-factors.
    /// `None` means the test is inconclusive, not that the rule is periodic.
    pub fn aperiodicity_witness(&self) -> Result<Option<Letter>> {
        let pairs = self.legal_factors(2)?;
        let mut left: Vec<BTreeSet<Letter>> = vec![BTreeSet::new(); self.size()];
        for w in &pairs {
            left[usize::from(w[1])].insert(w[0]);
        }
        Ok(left.iter().position(|s| s.len() >= 2).map(|i| i as Letter))
    }

    /// Perron–Frobenius eigenvalue `L` and letter frequencies, from an exact
    /// kernel solve of `M − L·I`.
    pub fn perron_data(&self) -> Result<PerronData> {
        if !self.is_primitive() {
            return Err(Error::NotPrimitive);
        }
        let l = self.length as i64;
        let m = self.substitution_matrix().to_rational();
        let shifted = m.add_scaled(&QMatrix::identity(self.size()), &q(-l));
        let kernel = shifted.nullspace();
        if kernel.len() != 1 {
            return Err(Error::NonSimplePerronEigenvalue(kernel.len()));
        }
        let v = &kernel[0];
        let total = v.iter().fold(Q::zero(), |acc, x| acc + x);
        let frequencies: Vec<Q> = v.iter().map(|x| x / &total).collect();
        debug_assert!(frequencies.iter().all(|x| !x.is_negative()));
        debug_assert!(frequencies.iter().fold(Q::zero(), |a, x| a + x).is_one());
        Ok(PerronData {
            eigenvalue: self.length as u64,
            frequencies,
        })
    }
}

impl fmt::Display for SubstitutionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = (0..self.size())
            .map(|l| {
                format!(
                    "{}->{}",
                    self.alphabet.char_of(l as Letter),
                    self.image_str(l as Letter)
                )
            })
            .collect();
        write!(f, "{}", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::frac;

    fn sigma() -> SubstitutionRule {
        SubstitutionRule::from_strs("ABCD", &["ABDB", "ABAC", "DCDB", "DCAC"]).unwrap()
    }

    fn rho() -> SubstitutionRule {
        SubstitutionRule::from_strs("ABCD", &["AB", "AC", "DB", "DC"]).unwrap()
    }

    #[test]
    fn rejects_malformed_rules() {
        assert!(Alphabet::new("A".chars()).is_err());
        assert!(Alphabet::new("ABA".chars()).is_err());
        assert!(SubstitutionRule::from_strs("AB", &["AB", "A"]).is_err());
        assert!(SubstitutionRule::from_strs("AB", &["AB", "AX"]).is_err());
        assert!(SubstitutionRule::from_strs("AB", &["AB"]).is_err());
        assert!(SubstitutionRule::from_strs("AB", &["", ""]).is_err());
    }

    #[test]
    fn instruction_matrices_of_sigma() {
        let r = sigma().instruction_matrices();
        assert_eq!(r.len(), 4);
        assert_eq!(r[0].support(), vec![(0, 0), (0, 1), (3, 2), (3, 3)]);
        assert_eq!(r[3].support(), vec![(1, 0), (1, 2), (2, 1), (2, 3)]);
    }

    #[test]
    fn identity_rule_has_identity_instruction() {
        let id = SubstitutionRule::from_strs("ab", &["a", "b"]).unwrap();
        let r = id.instruction_matrices();
        assert_eq!(r, vec![IntMatrix::from_rows(&[&[1, 0], &[0, 1]])]);
        assert_eq!(id.primitivity_exponent(), None);
    }

    #[test]
    fn substitution_matrix_columns() {
        let m = sigma().substitution_matrix();
        assert_eq!(m.column_sums(), vec![4; 4]);
        // column A counts ABDB
        assert_eq!(
            (0..4).map(|r| m.get(r, 0)).collect::<Vec<_>>(),
            vec![1, 2, 0, 1]
        );
        assert_eq!(rho().substitution_matrix().column_sums(), vec![2; 4]);
    }

    #[test]
    fn primitivity_exponents() {
        assert_eq!(sigma().primitivity_exponent(), Some(2));
        // brute force: M_rho^n > 0 first at n = 3
        let m = rho().substitution_matrix();
        let mut p = m.clone();
        let mut n = 1;
        while !p.is_positive() {
            let mut next = IntMatrix::zeros(4);
            for i in 0..4 {
                for j in 0..4 {
                    let v: u64 = (0..4).map(|k| p.get(i, k) * m.get(k, j)).sum();
                    next.add_at(i, j, v);
                }
            }
            p = next;
            n += 1;
        }
        assert_eq!(rho().primitivity_exponent(), Some(n));
        assert_eq!(n, 3);
    }

    #[test]
    fn fixed_points() {
        assert_eq!(
            sigma().fixed_point_prefix_char('A', 16).unwrap(),
            "ABDBABACDCACABAC"
        );
        assert_eq!(sigma().fixed_point_prefix_char('A', 4).unwrap(), "ABDB");
        assert_eq!(rho().fixed_point_prefix_char('A', 8).unwrap(), "ABACABDB");
        assert!(matches!(
            sigma().fixed_point_prefix_char('B', 4),
            Err(Error::NonProlongableSeed('B'))
        ));
    }

    #[test]
    fn legal_pairs_of_sigma() {
        let f: BTreeSet<String> = sigma()
            .legal_factors(2)
            .unwrap()
            .iter()
            .map(|w| sigma().alphabet().render(w))
            .collect();
        let expected: BTreeSet<String> = ["AB", "BD", "DB", "BA", "AC", "CD", "DC", "CA"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(f, expected);
        assert_eq!(sigma().legal_factors(1).unwrap().len(), 4);
    }

    #[test]
    fn legal_pairs_match_long_prefix_scan() {
        for rule in [sigma(), rho()] {
            let prefix = rule.fixed_point_prefix(0, 1 << 16).unwrap();
            for ell in 1..=4 {
                let scanned: BTreeSet<Word> = prefix.windows(ell).map(<[u8]>::to_vec).collect();
                assert_eq!(rule.legal_factors(ell).unwrap(), scanned, "ell={ell}");
            }
        }
    }

    #[test]
    fn aperiodicity() {
        assert_eq!(sigma().aperiodicity_witness().unwrap(), Some(0));
        assert_eq!(rho().aperiodicity_witness().unwrap(), Some(0));
        let periodic = SubstitutionRule::from_strs("ab", &["ab", "ab"]).unwrap();
        assert_eq!(periodic.aperiodicity_witness().unwrap(), None);
        let id = SubstitutionRule::from_strs("ab", &["a", "b"]).unwrap();
        assert!(matches!(id.legal_factors(2), Err(Error::NotPrimitive)));
    }

    #[test]
    fn perron_vectors() {
        let quarter = vec![frac(1, 4); 4];
        assert_eq!(sigma().perron_data().unwrap().frequencies, quarter);
        assert_eq!(sigma().perron_data().unwrap().eigenvalue, 4);
        assert_eq!(rho().perron_data().unwrap().frequencies, quarter);
        let ab = SubstitutionRule::from_strs("ab", &["ab", "ab"]).unwrap();
        assert_eq!(ab.perron_data().unwrap().frequencies, vec![frac(1, 2); 2]);
        // unequal frequencies
        let skew = SubstitutionRule::from_strs("ab", &["aab", "aaa"]).unwrap();
        let u = skew.perron_data().unwrap().frequencies;
        let m = skew.substitution_matrix().to_rational();
        let mu = m.mul_vec(&u);
        assert!(mu.iter().zip(&u).all(|(a, b)| *a == b * q(3)));
        assert_eq!(u, vec![frac(3, 4), frac(1, 4)]);
    }

    #[test]
    fn composition_order() {
        let plus = rho();
        let minus = SubstitutionRule::from_strs("ABCD", &["AC", "AB", "DC", "DB"]).unwrap();
        let c = plus.compose(&minus).unwrap();
        assert_eq!(c.image_strs(), vec!["ABDB", "ABAC", "DCDB", "DCAC"]);
    }
}
