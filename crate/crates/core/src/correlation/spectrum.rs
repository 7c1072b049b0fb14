use std::collections::{HashMap, VecDeque};
use std::fmt;

use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exact::{q, Q};
use crate::rudin::WeightMap;
use crate::subst::SubstitutionRule;

use super::{
    dot, ergodic_decomposition, renormalize, semipositivity, BisubstDecomposition, CorrVector,
    CorrelationTable, Endpoint, ExtremeRay, Semipositivity,
};

/// `c(k) = Σ_{αβ} ray_{αβ}·Σ̂(k)_{αβ}`.
pub fn ray_fourier_coeff(ray: &ExtremeRay, table: &mut CorrelationTable, k: usize) -> Q {
    dot(&ray.vector, table.entries(k))
}

/// `η(k) = Σ_{αβ} w_α·w_β·Σ̂(k)_{αβ}` for letter weights `w`.
pub fn autocorrelation(table: &mut CorrelationTable, weights: &WeightMap, k: usize) -> Result<Q> {
    let outer = weight_outer(table.rule(), weights)?;
    Ok(dot(&outer, table.entries(k)))
}

fn weight_outer(rule: &SubstitutionRule, weights: &WeightMap) -> Result<Vec<Q>> {
    let w = weights.vector_for(rule.alphabet())?;
    Ok(w.iter()
        .flat_map(|&a| w.iter().map(move |&b| q(i64::from(a) * i64::from(b))))
        .collect())
}

/// Classification of a correlation sequence `c(k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// `c(k) = c(0)` for every `k`: a Dirac comb in frequency space.
    PurePointDeltaComb,
    /// `c(k) = 0` for every `k ≠ 0`, certified: Lebesgue measure.
    AbsolutelyContinuous,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::PurePointDeltaComb => "PurePointDeltaComb",
            Verdict::AbsolutelyContinuous => "AbsolutelyContinuous",
            Verdict::Inconclusive => "Inconclusive",
        })
    }
}

/// Proof that the values `{Σ̂(k) : k ≥ 1}` form a known finite set.
///
/// Write `W(m) = (Σ̂(m), Σ̂(m+1), Σ̂(m+2))`. For `m' = L·m + r` every entry of
/// `W(m')` is a [`renormalize`] image of two consecutive entries of `W(m)`,
/// and every `m' ≥ L` has this form with `m ≥ 1`. The closure of
/// `W(1), …, W(L−1)` under the `L` maps therefore contains `W(m)` for every
/// `m ≥ 1`; when it is finite it lists every `Σ̂(k)`, `k ≥ 1`. Tracking
/// `m mod P` alongside proves `Σ̂(k+P) = Σ̂(k)` for all `k ≥ 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrelationCertificate {
    /// The closure finished within the state budget.
    pub complete: bool,
    /// Distinct values of `Σ̂(k)`, `k ≥ 1` (exhaustive when complete).
    pub values: Vec<Vec<Q>>,
    /// Smallest period seen in the computed table.
    pub period: Option<usize>,
    /// `period` holds for every `k ≥ 1`.
    pub period_certified: bool,
    /// Reachable `(window, m mod period)` states.
    pub states: usize,
}

const MAX_CERT_STATES: usize = 4096;

impl CorrelationCertificate {
    /// Builds the certificate; `horizon` bounds the period search.
    pub fn build(table: &mut CorrelationTable, horizon: usize) -> Self {
        let rule = table.rule().clone();
        let l = rule.length();
        let horizon = horizon.max(2 * l + 2);
        table.entries(horizon + 2);

        let period = (1..=horizon / 2).find(|&p| {
            (1..=horizon - p).all(|k| {
                let a = table.entries(k).to_vec();
                a == table.entries(k + p)
            })
        });
        let modulus = period.unwrap_or(1);

        let mut intern: HashMap<Vec<Q>, usize> = HashMap::new();
        let mut values: Vec<Vec<Q>> = Vec::new();
        let mut id = |v: Vec<Q>, values: &mut Vec<Vec<Q>>| -> usize {
            *intern.entry(v.clone()).or_insert_with(|| {
                values.push(v);
                values.len() - 1
            })
        };

        type State = ([usize; 3], usize);
        let mut seen: HashMap<State, ()> = HashMap::new();
        let mut queue: VecDeque<State> = VecDeque::new();
        for m in 1..l {
            let w = [
                id(table.entries(m).to_vec(), &mut values),
                id(table.entries(m + 1).to_vec(), &mut values),
                id(table.entries(m + 2).to_vec(), &mut values),
            ];
            let s = (w, m % modulus);
            if seen.insert(s, ()).is_none() {
                queue.push_back(s);
            }
        }

        let mut complete = true;
        while let Some((w, res)) = queue.pop_front() {
            if seen.len() > MAX_CERT_STATES {
                complete = false;
                break;
            }
            for r in 0..l {
                let mut fine = [0usize; 3];
                for (t, slot) in fine.iter_mut().enumerate() {
                    let carry = (r + t) / l;
                    let rr = (r + t) % l;
                    let x = values[w[carry]].clone();
                    let y = values[w[carry + 1]].clone();
                    *slot = id(renormalize(&rule, rr, &x, &y), &mut values);
                }
                let s = (fine, (l * res + r) % modulus);
                if seen.insert(s, ()).is_none() {
                    queue.push_back(s);
                }
            }
        }

        let mut by_residue: HashMap<usize, usize> = HashMap::new();
        let mut consistent = true;
        for (w, res) in seen.keys() {
            match by_residue.insert(*res, w[0]) {
                Some(prev) if prev != w[0] => consistent = false,
                _ => {}
            }
        }

        // keep only values that occur as some Σ̂(m), m ≥ 1
        let mut first: Vec<usize> = seen.keys().map(|(w, _)| w[0]).collect();
        first.sort_unstable();
        first.dedup();
        let values = first.into_iter().map(|i| values[i].clone()).collect();

        Self {
            complete,
            values,
            period,
            period_certified: complete && period.is_some() && consistent,
            states: seen.len(),
        }
    }
}

/// Verdict for a correlation sequence given its tested values `c(0..=K)`
/// and, when the certificate is complete, its value on every `Σ̂(k ≥ 1)`.
fn judge(tested: &[Q], certified: Option<&[Q]>) -> Verdict {
    let c0 = &tested[0];
    let tail = &tested[1..];
    let all = |pred: &dyn Fn(&Q) -> bool| {
        tail.iter().all(pred) && certified.is_none_or(|c| c.iter().all(pred))
    };
    if all(&|c: &Q| c == c0) {
        Verdict::PurePointDeltaComb
    } else if certified.is_some() && all(&|c: &Q| c.is_zero()) {
        Verdict::AbsolutelyContinuous
    } else {
        Verdict::Inconclusive
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RayReport {
    pub ray: ExtremeRay,
    /// `c(0), …, c(K)`.
    pub coefficients: Vec<Q>,
    pub verdict: Verdict,
}

/// Correlations for a letter weighting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedReport {
    pub weights: Vec<i8>,
    /// `η(0), …, η(K)`.
    pub eta: Vec<Q>,
    /// `(Σ_α w_α u_α)²`, the intensity of the Bragg peak at the origin.
    pub bragg_intensity: Q,
    pub verdict: Verdict,
}

#[derive(Clone, Debug)]
pub struct SpectralReport {
    pub rule: SubstitutionRule,
    pub horizon: usize,
    pub primitivity_exponent: usize,
    pub aperiodicity_witness: char,
    pub frequencies: Vec<Q>,
    pub sigma_hat: Vec<CorrVector>,
    pub decomposition: BisubstDecomposition,
    pub semipositivity: Semipositivity,
    pub rays: Vec<RayReport>,
    pub certificate: CorrelationCertificate,
    pub balanced: WeightedReport,
}

impl SpectralReport {
    /// Purely absolutely continuous in the balanced weight case.
    pub fn balanced_is_purely_ac(&self) -> bool {
        self.balanced.verdict == Verdict::AbsolutelyContinuous
            && self.balanced.bragg_intensity.is_zero()
    }

    pub fn overall(&self) -> &'static str {
        if self.balanced_is_purely_ac() {
            "purely AC (balanced weights)"
        } else if self.balanced.verdict == Verdict::PurePointDeltaComb {
            "pure point (balanced weights)"
        } else {
            "Inconclusive"
        }
    }

    pub fn is_inconclusive(&self) -> bool {
        self.balanced.verdict == Verdict::Inconclusive
            || self.rays.iter().any(|r| r.verdict == Verdict::Inconclusive)
    }

    pub fn to_json(&self) -> Value {
        let alphabet = self.rule.alphabet();
        let qs = |v: &[Q]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        let rules: serde_json::Map<String, Value> = alphabet
            .letters()
            .iter()
            .enumerate()
            .map(|(i, c)| (c.to_string(), Value::String(self.rule.image_str(i as u8))))
            .collect();
        json!({
            "alphabet": alphabet.to_string(),
            "rules": rules,
            "length": self.rule.length(),
            "horizon": self.horizon,
            "primitivity_exponent": self.primitivity_exponent,
            "aperiodicity_witness": self.aperiodicity_witness.to_string(),
            "perron_eigenvalue": self.rule.length(),
            "frequencies": qs(&self.frequencies),
            "pair_order": (0..alphabet.len().pow(2)).map(|p| alphabet.pair_label(p)).collect::<Vec<_>>(),
            "sigma_hat": self.sigma_hat.iter().map(|s| json!({"k": s.k, "entries": qs(&s.entries)})).collect::<Vec<_>>(),
            "ergodic_classes": self.decomposition.class_labels(),
            "transient": self.decomposition.transient_labels(),
            "semipositivity": {
                "lower": self.semipositivity.lower.as_ref().map(Endpoint::to_string),
                "upper": self.semipositivity.upper.as_ref().map(Endpoint::to_string),
            },
            "certificate": {
                "complete": self.certificate.complete,
                "distinct_values": self.certificate.values.len(),
                "period": self.certificate.period,
                "period_certified": self.certificate.period_certified,
                "states": self.certificate.states,
            },
            "rays": self.rays.iter().map(|r| json!({
                "name": r.ray.name,
                "params": qs(&r.ray.params),
                "vector": qs(&r.ray.vector),
                "coefficients": qs(&r.coefficients),
                "verdict": r.verdict.to_string(),
            })).collect::<Vec<_>>(),
            "balanced": {
                "weights": self.balanced.weights,
                "eta": qs(&self.balanced.eta),
                "bragg_intensity": self.balanced.bragg_intensity.to_string(),
                "verdict": self.balanced.verdict.to_string(),
            },
            "verdict": self.overall(),
        })
    }
}

fn join_q(v: &[Q]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

impl fmt::Display for SpectralReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let alphabet = self.rule.alphabet();
        writeln!(f, "rule: {} (length {})", self.rule, self.rule.length())?;
        writeln!(f, "primitive: M^{} > 0", self.primitivity_exponent)?;
        writeln!(
            f,
            "aperiodic: {} has two left neighbours",
            self.aperiodicity_witness
        )?;
        writeln!(f, "PF eigenvalue: {}", self.rule.length())?;
        writeln!(f, "u = ({})", join_q(&self.frequencies))?;
        let order: Vec<String> = (0..alphabet.len().pow(2))
            .map(|p| alphabet.pair_label(p))
            .collect();
        writeln!(f, "pair order: {}", order.join(" "))?;
        for s in &self.sigma_hat {
            writeln!(f, "Sigma({}) = ({})", s.k, join_q(&s.entries))?;
        }
        for (i, c) in self.decomposition.class_labels().iter().enumerate() {
            writeln!(f, "E_{} = {{{}}}", i + 1, c.join(", "))?;
        }
        writeln!(
            f,
            "T = {{{}}}",
            self.decomposition.transient_labels().join(", ")
        )?;
        if let (Some(lo), Some(hi)) = (&self.semipositivity.lower, &self.semipositivity.upper) {
            writeln!(f, "semipositive for w_2 in [{lo}, {hi}] (w_1 = 1)")?;
        }
        let c = &self.certificate;
        writeln!(
            f,
            "certificate: complete={} distinct={} period={} certified={}",
            c.complete,
            c.values.len(),
            c.period.map_or("-".to_string(), |p| p.to_string()),
            c.period_certified
        )?;
        for r in &self.rays {
            writeln!(f, "{} = ({})", r.ray.name, join_q(&r.ray.vector))?;
            writeln!(
                f,
                "  c(k), k=0..{}: {}",
                self.horizon,
                join_q(&r.coefficients)
            )?;
            writeln!(f, "  verdict: {}", r.verdict)?;
        }
        writeln!(f, "balanced weights {:?}", self.balanced.weights)?;
        writeln!(
            f,
            "  eta(k), k=0..{}: {}",
            self.horizon,
            join_q(&self.balanced.eta)
        )?;
        writeln!(
            f,
            "  Bragg intensity at 0: {}",
            self.balanced.bragg_intensity
        )?;
        writeln!(f, "  verdict: {}", self.balanced.verdict)?;
        writeln!(f, "verdict: {}", self.overall())
    }
}

/// Runs the full pipeline up to distance `horizon` with balanced weights
/// (first half of the alphabet `+1`).
pub fn classify_spectrum(rule: &SubstitutionRule, horizon: usize) -> Result<SpectralReport> {
    classify_spectrum_weighted(rule, horizon, &WeightMap::balanced_for(rule.alphabet()))
}

/// [`classify_spectrum`] with explicit letter weights.
pub fn classify_spectrum_weighted(
    rule: &SubstitutionRule,
    horizon: usize,
    weights: &WeightMap,
) -> Result<SpectralReport> {
    let primitivity_exponent = rule.primitivity_exponent().ok_or(Error::NotPrimitive)?;
    let witness = rule
        .aperiodicity_witness()?
        .ok_or(Error::AperiodicityInconclusive)?;
    let frequencies = rule.perron_data()?.frequencies;
    let decomposition = ergodic_decomposition(rule)?;
    let semipositivity = semipositivity(&decomposition)?;

    let mut table = CorrelationTable::new(rule)?;
    let sigma_hat = table.range(horizon);
    let certificate = CorrelationCertificate::build(&mut table, horizon.max(8));
    let certified = certificate.complete.then_some(&certificate.values);

    let rays = semipositivity
        .rays
        .iter()
        .map(|ray| {
            let coefficients: Vec<Q> = sigma_hat
                .iter()
                .map(|s| dot(&ray.vector, &s.entries))
                .collect();
            let on_values: Option<Vec<Q>> =
                certified.map(|vals| vals.iter().map(|v| dot(&ray.vector, v)).collect());
            let verdict = judge(&coefficients, on_values.as_deref());
            RayReport {
                ray: ray.clone(),
                coefficients,
                verdict,
            }
        })
        .collect();

    let outer = weight_outer(rule, weights)?;
    let eta: Vec<Q> = sigma_hat.iter().map(|s| dot(&outer, &s.entries)).collect();
    let on_values: Option<Vec<Q>> =
        certified.map(|vals| vals.iter().map(|v| dot(&outer, v)).collect());
    let w = weights.vector_for(rule.alphabet())?;
    let mean = w
        .iter()
        .zip(&frequencies)
        .fold(Q::zero(), |acc, (&wi, u)| acc + q(i64::from(wi)) * u);
    let balanced = WeightedReport {
        verdict: judge(&eta, on_values.as_deref()),
        weights: w,
        eta,
        bragg_intensity: &mean * &mean,
    };
    debug_assert!(!balanced.bragg_intensity.is_negative());

    Ok(SpectralReport {
        rule: rule.clone(),
        horizon,
        primitivity_exponent,
        aperiodicity_witness: rule.alphabet().char_of(witness),
        frequencies,
        sigma_hat,
        decomposition,
        semipositivity,
        rays,
        certificate,
        balanced,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::frac;

    fn sigma() -> SubstitutionRule {
        SubstitutionRule::from_strs("ABCD", &["ABDB", "ABAC", "DCDB", "DCAC"]).unwrap()
    }

    #[test]
    fn certificate_for_sigma() {
        let mut t = CorrelationTable::new(&sigma()).unwrap();
        let c = CorrelationCertificate::build(&mut t, 16);
        assert!(c.complete);
        assert_eq!(c.values.len(), 2);
        assert_eq!(c.period, Some(2));
        assert!(c.period_certified);
    }

    #[test]
    fn ray_coefficients_at_zero_and_one() {
        let rule = sigma();
        let s = semipositivity(&ergodic_decomposition(&rule).unwrap()).unwrap();
        let mut t = CorrelationTable::new(&rule).unwrap();
        // v_2 has four +1 diagonal entries against Σ̂(0) = diag(1/4, …)
        assert_eq!(ray_fourier_coeff(&s.rays[1], &mut t, 0), q(1));
        assert_eq!(ray_fourier_coeff(&s.rays[1], &mut t, 1), q(0));
        assert_eq!(ray_fourier_coeff(&s.rays[0], &mut t, 0), q(1));
        let w = WeightMap::standard();
        assert_eq!(autocorrelation(&mut t, &w, 0).unwrap(), q(1));
        assert_eq!(autocorrelation(&mut t, &w, 2).unwrap(), q(0));
    }

    #[test]
    fn judge_cases() {
        let ones = vec![q(1); 5];
        assert_eq!(judge(&ones, Some(&[q(1)])), Verdict::PurePointDeltaComb);
        let delta = vec![q(1), q(0), q(0)];
        assert_eq!(judge(&delta, Some(&[q(0)])), Verdict::AbsolutelyContinuous);
        assert_eq!(judge(&delta, None), Verdict::Inconclusive);
        assert_eq!(judge(&[q(1), frac(1, 2)], None), Verdict::Inconclusive);
    }

    #[test]
    fn sigma_report() {
        let r = classify_spectrum(&sigma(), 64).unwrap();
        assert_eq!(r.rays[0].verdict, Verdict::PurePointDeltaComb);
        assert_eq!(r.rays[1].verdict, Verdict::AbsolutelyContinuous);
        assert_eq!(r.rays[1].coefficients[0], q(1));
        assert!(r.balanced_is_purely_ac());
        assert_eq!(r.overall(), "purely AC (balanced weights)");
        assert!(!r.is_inconclusive());
        let j = r.to_json();
        assert_eq!(j["rays"][1]["coefficients"][1], "0");
        assert_eq!(j["frequencies"][0], "1/4");
    }

    #[test]
    fn precondition_gates() {
        let periodic = SubstitutionRule::from_strs("ab", &["ab", "ab"]).unwrap();
        assert!(matches!(
            classify_spectrum(&periodic, 8),
            Err(Error::AperiodicityInconclusive)
        ));
        let reducible = SubstitutionRule::from_strs("ab", &["aa", "ab"]).unwrap();
        assert!(matches!(
            classify_spectrum(&reducible, 8),
            Err(Error::NotPrimitive)
        ));
    }
}
