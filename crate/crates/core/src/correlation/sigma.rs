use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{q, QMatrix, Q};
use crate::exec;
use crate::subst::SubstitutionRule;

/// Exact pair frequencies `Σ̂(k)` at distance `k`: entry `αβ` is the density
/// of positions `n` with `u_n = α` and `u_{n+k} = β`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CorrVector {
    pub k: usize,
    pub entries: Vec<Q>,
}

impl CorrVector {
    pub fn dim(&self) -> usize {
        (self.entries.len() as f64).sqrt().round() as usize
    }

    pub fn entry(&self, a: usize, b: usize) -> &Q {
        &self.entries[a * self.dim() + b]
    }

    pub fn total(&self) -> Q {
        self.entries.iter().fold(Q::zero(), |acc, x| acc + x)
    }

    /// `Σ_β Σ̂_{αβ}` for each `α`.
    pub fn row_marginals(&self) -> Vec<Q> {
        let d = self.dim();
        (0..d)
            .map(|a| (0..d).fold(Q::zero(), |acc, b| acc + self.entry(a, b)))
            .collect()
    }

    /// `Σ_α Σ̂_{αβ}` for each `β`.
    pub fn column_marginals(&self) -> Vec<Q> {
        let d = self.dim();
        (0..d)
            .map(|b| (0..d).fold(Q::zero(), |acc, a| acc + self.entry(a, b)))
            .collect()
    }

    /// Entries multiplied by `scale`, handy for comparing against `(…)/8`.
    pub fn scaled(&self, scale: i64) -> Vec<Q> {
        self.entries.iter().map(|x| x * q(scale)).collect()
    }
}

/// One renormalization step: `Σ̂(L·m + r)` from `x = Σ̂(m)` and
/// `y = Σ̂(m+1)`, for `0 ≤ r < L`.
///
/// Position `L·m' + i` of the fixed point carries `σ(u_{m'})_i`, so a pair
/// at distance `L·m + r` starting at offset `i` comes from the pair at
/// distance `m + ⌊(i+r)/L⌋` one level up, read at offsets `i` and
/// `(i+r) mod L`.
pub fn renormalize(rule: &SubstitutionRule, r: usize, x: &[Q], y: &[Q]) -> Vec<Q> {
    let d = rule.size();
    let l = rule.length();
    assert!(r < l);
    let mut out = vec![Q::zero(); d * d];
    let weight = Q::new(One::one(), l.into());
    for i in 0..l {
        let j = (i + r) % l;
        let src = if i + r >= l { y } else { x };
        accumulate_pair_step(rule, i, j, src, &mut out);
    }
    for v in &mut out {
        *v *= &weight;
    }
    out
}

/// `dst[σ(γ)_i, σ(δ)_j] += src[γ, δ]` over all pairs.
fn accumulate_pair_step(rule: &SubstitutionRule, i: usize, j: usize, src: &[Q], dst: &mut [Q]) {
    let d = rule.size();
    for g in 0..d {
        let a = usize::from(rule.image(g as u8)[i]);
        for h in 0..d {
            let s = &src[g * d + h];
            if s.is_zero() {
                continue;
            }
            let b = usize::from(rule.image(h as u8)[j]);
            dst[a * d + b] += s;
        }
    }
}

/// Memoized `Σ̂(k)` for one primitive rule.
///
/// `Σ̂(0)` is the diagonal of letter frequencies. `Σ̂(1)` solves the linear
/// system `Σ̂(1) = A·Σ̂(0) + B·Σ̂(1)` coming from [`renormalize`] with `r = 1`,
/// where `B` only holds the carry term at offset `i = L−1`; its columns sum
/// to `1/L`, so `I − B` is invertible. Every larger distance recurses to
/// strictly smaller ones.
#[derive(Clone, Debug)]
pub struct CorrelationTable {
    rule: SubstitutionRule,
    values: Vec<Vec<Q>>,
}

impl CorrelationTable {
    pub fn new(rule: &SubstitutionRule) -> Result<Self> {
        if rule.length() < 2 {
            return Err(Error::NotPrimitive);
        }
        let u = rule.perron_data()?.frequencies;
        let d = rule.size();
        let l = rule.length();
        let mut s0 = vec![Q::zero(); d * d];
        for a in 0..d {
            s0[a * d + a] = u[a].clone();
        }

        let n = d * d;
        let mut rhs = vec![Q::zero(); n];
        for i in 0..l - 1 {
            accumulate_pair_step(rule, i, i + 1, &s0, &mut rhs);
        }
        let inv_l = Q::new(One::one(), l.into());
        for v in &mut rhs {
            *v *= &inv_l;
        }
        // B = (1/L) · [pair step at offsets (L−1, 0)]
        let mut system = QMatrix::identity(n);
        for col in 0..n {
            let mut unit = vec![Q::zero(); n];
            unit[col] = Q::one();
            let mut img = vec![Q::zero(); n];
            accumulate_pair_step(rule, l - 1, 0, &unit, &mut img);
            for (row, v) in img.into_iter().enumerate() {
                if !v.is_zero() {
                    system[(row, col)] -= v * &inv_l;
                }
            }
        }
        let s1 = system
            .solve(&rhs)
            .expect("I - B is strictly diagonally dominant by columns");

        Ok(Self {
            rule: rule.clone(),
            values: vec![s0, s1],
        })
    }

    pub fn rule(&self) -> &SubstitutionRule {
        &self.rule
    }

    fn ensure(&mut self, k: usize) {
        let l = self.rule.length();
        while self.values.len() <= k {
            let next = self.values.len();
            let (m, r) = (next / l, next % l);
            // offset 0 never carries, and for L = 2 the slot m + 1 is `next` itself
            let carry = if r == 0 { m } else { m + 1 };
            let v = renormalize(&self.rule, r, &self.values[m], &self.values[carry]);
            self.values.push(v);
        }
    }

    /// Entries of `Σ̂(k)`.
    pub fn entries(&mut self, k: usize) -> &[Q] {
        self.ensure(k);
        &self.values[k]
    }

    pub fn get(&mut self, k: usize) -> CorrVector {
        CorrVector {
            k,
            entries: self.entries(k).to_vec(),
        }
    }

    /// `Σ̂(0), …, Σ̂(k_max)`.
    pub fn range(&mut self, k_max: usize) -> Vec<CorrVector> {
        self.ensure(k_max);
        (0..=k_max).map(|k| self.get(k)).collect()
    }
}

/// `Σ̂(k)` for a primitive rule.
pub fn sigma_hat(rule: &SubstitutionRule, k: usize) -> Result<CorrVector> {
    Ok(CorrelationTable::new(rule)?.get(k))
}

/// Brute-force pair counts on a fixed-point prefix; independent of the
/// renormalization path.
#[derive(Clone, Debug)]
pub struct PairCountOracle {
    size: usize,
    prefix: Vec<u8>,
}

impl PairCountOracle {
    /// Prefix of length `n` of the fixed point from the rule's default seed.
    pub fn new(rule: &SubstitutionRule, n: usize) -> Result<Self> {
        let seed = rule
            .default_seed()
            .ok_or_else(|| Error::NonProlongableSeed(rule.alphabet().char_of(0)))?;
        Ok(Self {
            size: rule.size(),
            prefix: rule.fixed_point_prefix(seed, n)?,
        })
    }

    pub fn prefix(&self) -> &[u8] {
        &self.prefix
    }

    /// Pair counts at distance `k` over the `N − k` admissible positions.
    pub fn counts(&self, k: usize) -> Vec<u64> {
        let d = self.size;
        let n = self.prefix.len();
        if k >= n {
            return vec![0; d * d];
        }
        let positions = n - k;
        let chunk = 1 << 14;
        let chunks = positions.div_ceil(chunk);
        exec::sum_counts(chunks, |c| {
            let mut counts = vec![0u64; d * d];
            let end = ((c + 1) * chunk).min(positions);
            for i in c * chunk..end {
                let a = usize::from(self.prefix[i]);
                let b = usize::from(self.prefix[i + k]);
                counts[a * d + b] += 1;
            }
            counts
        })
    }

    /// Empirical `Σ̂(k)`: counts divided by `N − k`.
    pub fn sigma_hat(&self, k: usize) -> Vec<f64> {
        let n = self.prefix.len();
        assert!(n > k, "prefix must be longer than the distance");
        let denom = (n - k) as f64;
        self.counts(k)
            .into_iter()
            .map(|c| c as f64 / denom)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::frac;

    fn sigma() -> SubstitutionRule {
        SubstitutionRule::from_strs("ABCD", &["ABDB", "ABAC", "DCDB", "DCAC"]).unwrap()
    }

    fn eighths(v: [i64; 16]) -> Vec<Q> {
        v.iter().map(|&x| frac(x, 8)).collect()
    }

    #[test]
    fn sigma_hat_low_distances() {
        let mut t = CorrelationTable::new(&sigma()).unwrap();
        let s0 = t.get(0);
        for a in 0..4 {
            for b in 0..4 {
                let want = if a == b { frac(1, 4) } else { q(0) };
                assert_eq!(*s0.entry(a, b), want);
            }
        }
        let odd = eighths([0, 1, 1, 0, 1, 0, 0, 1, 1, 0, 0, 1, 0, 1, 1, 0]);
        let even = eighths([1, 0, 0, 1, 0, 1, 1, 0, 0, 1, 1, 0, 1, 0, 0, 1]);
        assert_eq!(t.entries(1), &odd[..]);
        assert_eq!(t.entries(2), &even[..]);
        assert_eq!(t.entries(3), &odd[..]);
        assert_eq!(t.entries(4), &even[..]);
        assert_eq!(t.entries(7), &odd[..]);
    }

    #[test]
    fn hand_counted_window() {
        // ABDBABACDCACABAC at distance 2: 14 pairs
        let o = PairCountOracle::new(&sigma(), 16).unwrap();
        let c = o.counts(2);
        let word = "ABDBABACDCACABAC".as_bytes();
        let mut want = vec![0u64; 16];
        for i in 0..14 {
            let a = usize::from(word[i] - b'A');
            let b = usize::from(word[i + 2] - b'A');
            want[a * 4 + b] += 1;
        }
        assert_eq!(c, want);
        assert_eq!(c.iter().sum::<u64>(), 14);
    }

    #[test]
    fn oracle_converges() {
        let mut t = CorrelationTable::new(&sigma()).unwrap();
        let o = PairCountOracle::new(&sigma(), 1 << 18).unwrap();
        // letter frequencies on a 4^9 prefix are off by up to 2^9 / 4^9
        for k in 0..=2 {
            let exact = t.get(k);
            for (e, a) in exact.entries.iter().zip(o.sigma_hat(k)) {
                assert!((crate::exact::to_f64(e) - a).abs() < 1e-3);
            }
        }
    }

    #[test]
    fn rejects_non_primitive() {
        let id = SubstitutionRule::from_strs("ab", &["ab", "bb"]).unwrap();
        assert!(matches!(
            CorrelationTable::new(&id),
            Err(Error::NotPrimitive)
        ));
    }
}
