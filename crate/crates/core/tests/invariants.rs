use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use difflab_core::correlation::{
    autocorrelation, classify_spectrum, ergodic_decomposition, ray_fourier_coeff, semipositivity,
    CorrelationTable,
};
use difflab_core::fourier::{
    exponential_sum, periodogram, sup_norm_estimate, sup_scan, BinarySeq, DEFAULT_MAX_FFT,
};
use difflab_core::rudin::{coefficients, derive_substitution, sequence_prefix, PolyPair};
use difflab_core::{Alphabet, SignSequence, SubstitutionRule, WeightMap};

type Q = BigRational;

fn sign_pattern() -> impl Strategy<Value = String> {
    prop::collection::vec(prop::bool::ANY, 1..=4)
        .prop_map(|v| v.into_iter().map(|b| if b { '+' } else { '-' }).collect())
}

/// Random constant-length rule on 2..=4 letters, length 1..=4.
fn any_rule() -> impl Strategy<Value = SubstitutionRule> {
    (2usize..=4, 1usize..=4).prop_flat_map(|(d, l)| {
        prop::collection::vec(prop::collection::vec(0..d as u8, l), d).prop_map(move |images| {
            let alphabet = Alphabet::new("abcd".chars().take(d)).unwrap();
            SubstitutionRule::new(alphabet, images).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn instruction_matrices_sum_to_m(rule in any_rule()) {
        let r = rule.instruction_matrices();
        prop_assert_eq!(r.len(), rule.length());
        for m in &r {
            prop_assert!(m.column_sums().iter().all(|&s| s == 1));
        }
        let sum = r[1..].iter().fold(r[0].clone(), |a, m| a.add(m));
        let m = rule.substitution_matrix();
        prop_assert_eq!(&sum, &m);
        prop_assert!(m.column_sums().iter().all(|&s| s as usize == rule.length()));
    }

    #[test]
    fn fixed_point_is_self_similar(rule in any_rule(), n in 1usize..40) {
        prop_assume!(rule.length() >= 2);
        if let Some(seed) = rule.default_seed() {
            let short = rule.fixed_point_prefix(seed, n).unwrap();
            let long = rule.fixed_point_prefix(seed, rule.length() * n).unwrap();
            prop_assert_eq!(rule.apply(&short), long.clone());
            prop_assert_eq!(&long[..n], &short[..]);
        }
    }

    #[test]
    fn perron_vector_is_exact(rule in any_rule()) {
        prop_assume!(rule.is_primitive());
        let p = rule.perron_data().unwrap();
        prop_assert_eq!(p.eigenvalue as usize, rule.length());
        let m = rule.substitution_matrix().to_rational();
        let mu = m.mul_vec(&p.frequencies);
        let l = Q::from_integer(rule.length().into());
        for (a, b) in mu.iter().zip(&p.frequencies) {
            prop_assert_eq!(a, &(b * &l));
        }
        prop_assert!(p.frequencies.iter().fold(Q::zero(), |a, x| a + x).is_one());
        let letters = rule.legal_factors(1).unwrap();
        prop_assert_eq!(letters.len(), rule.size());
    }

    #[test]
    fn sequence_prefixes_are_stable(pattern in sign_pattern(), n in 1usize..300, extra in 0usize..300) {
        let s: SignSequence = pattern.parse().unwrap();
        let a = sequence_prefix(&s, n);
        let b = sequence_prefix(&s, n + extra);
        prop_assert_eq!(&b[..n], &a[..]);
    }

    #[test]
    fn first_half_repeats_previous_level(pattern in sign_pattern(), k in 0u32..10) {
        let s: SignSequence = pattern.parse().unwrap();
        let next = PolyPair::at_level(&s, k + 1);
        let cur = PolyPair::at_level(&s, k);
        prop_assert_eq!(&next.p_coeffs()[..1 << k], cur.p_coeffs());
        prop_assert_eq!(&next.q_coeffs()[..1 << k], cur.p_coeffs());
    }

    #[test]
    fn marginals_are_letter_frequencies(pattern in sign_pattern()) {
        let rule = derive_substitution(&pattern.parse().unwrap());
        let u = rule.perron_data().unwrap().frequencies;
        let mut t = CorrelationTable::new(&rule).unwrap();
        for k in 0..=64 {
            let c = t.get(k);
            prop_assert_eq!(c.row_marginals(), u.clone());
            prop_assert_eq!(c.column_marginals(), u.clone());
        }
    }

    #[test]
    fn periodogram_satisfies_parseval(v in prop::collection::vec(prop::bool::ANY, 1..2000)) {
        let seq = BinarySeq::new(v.into_iter().map(|b| if b { 1 } else { -1 }).collect()).unwrap();
        let p = periodogram(&seq, DEFAULT_MAX_FFT).unwrap();
        let mean = p.iter().sum::<f64>() / p.len() as f64;
        prop_assert!((mean - 1.0).abs() < 1e-9);
    }

    #[test]
    fn grid_values_match_direct_sums(v in prop::collection::vec(prop::bool::ANY, 1..512)) {
        let seq = BinarySeq::new(v.into_iter().map(|b| if b { 1 } else { -1 }).collect()).unwrap();
        let scan = sup_scan(&seq, 4, DEFAULT_MAX_FFT).unwrap();
        let g = scan.len();
        for j in (0..g).step_by(7) {
            let direct = exponential_sum(&seq, j as f64 / g as f64);
            prop_assert!((direct - scan[j]).abs() <= 1e-10 * (seq.len() as f64).max(1.0));
        }
    }

    #[test]
    fn sup_estimate_grows_on_refined_grids(v in prop::collection::vec(prop::bool::ANY, 1..512)) {
        let seq = BinarySeq::new(v.into_iter().map(|b| if b { 1 } else { -1 }).collect()).unwrap();
        let mut last = 0.0;
        for oversample in [4, 8, 16, 32] {
            let r = sup_norm_estimate(&seq, oversample, DEFAULT_MAX_FFT).unwrap();
            prop_assert!(r.sup_estimate >= last - 1e-9);
            prop_assert!(r.sup_upper_bound >= r.sup_estimate);
            last = r.sup_estimate;
        }
    }
}

#[test]
fn extreme_ray_coefficients_for_sign_patterns() {
    for pattern in ["+", "-", "+-", "-+", "++-", "+--", "+-+-"] {
        let rule = derive_substitution(&pattern.parse().unwrap());
        let s = semipositivity(&ergodic_decomposition(&rule).unwrap()).unwrap();
        assert_eq!(s.rays.len(), 2, "{pattern}");
        let mut t = CorrelationTable::new(&rule).unwrap();
        let w = WeightMap::standard();
        for k in 1..=256 {
            assert!(
                ray_fourier_coeff(&s.rays[0], &mut t, k).is_one(),
                "{pattern} k={k}"
            );
            assert!(
                ray_fourier_coeff(&s.rays[1], &mut t, k).is_zero(),
                "{pattern} k={k}"
            );
            assert!(
                autocorrelation(&mut t, &w, k).unwrap().is_zero(),
                "{pattern} k={k}"
            );
        }
    }
}

#[test]
fn classic_rule_pipeline() {
    let rho = derive_substitution(&"+".parse().unwrap());
    assert_eq!(rho.image_strs(), ["AB", "AC", "DB", "DC"]);
    let report = classify_spectrum(&rho, 64).unwrap();
    assert!(report.balanced_is_purely_ac());
    assert_eq!(report.aperiodicity_witness, 'A');
    assert_eq!(
        report.decomposition.class_labels(),
        vec![vec!["AA", "BB", "CC", "DD"], vec!["AD", "BC", "CB", "DA"]]
    );
    assert!(report.certificate.period_certified);
}

#[test]
fn longer_periods_derive_longer_rules() {
    let rule = derive_substitution(&"+++".parse().unwrap());
    assert_eq!(rule.length(), 8);
    let c = coefficients(&"+++".parse().unwrap(), 3);
    let w = rule
        .alphabet()
        .render(&rule.fixed_point_prefix(0, 8).unwrap());
    let reduced = difflab_core::rudin::binary_reduce(&w, &WeightMap::standard()).unwrap();
    assert_eq!(reduced, c);
}

#[test]
fn exponential_sum_examples() {
    let ones = BinarySeq::ones(4);
    assert!((exponential_sum(&ones, 0.0) - 4.0).abs() < 1e-12);
    assert!(exponential_sum(&ones, 0.5).abs() < 1e-12);
    let rs = BinarySeq::new(coefficients(&"+".parse().unwrap(), 3)).unwrap();
    assert!((exponential_sum(&rs, 0.0) - 4.0).abs() < 1e-12);
    let r = sup_norm_estimate(&BinarySeq::ones(1024), 8, DEFAULT_MAX_FFT).unwrap();
    assert!((r.ratio - 32.0).abs() < 1e-9);
}
