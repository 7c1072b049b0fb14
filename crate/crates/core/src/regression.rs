//! Regression table of reference identities for the `+-` system and
//! the classic Rudin–Shapiro rule. Used by `difflab verify`.

use num_traits::{One, Zero};

use crate::correlation::{
    build_v, classify_spectrum, ergodic_decomposition, semipositivity, CorrelationTable, Endpoint,
    PairCountOracle, Verdict,
};
use crate::error::Result;
use crate::exact::{frac, q, to_f64, Q};
use crate::fourier::{empirical_autocorrelation, BinarySeq};
use crate::rudin::{
    binary_reduce, coefficients, derive_substitution, single_step_substitution, Sign, WeightMap,
};
use crate::subst::{IntMatrix, SubstitutionRule};

pub const SIGMA_IMAGES: [&str; 4] = ["ABDB", "ABAC", "DCDB", "DCAC"];
pub const RHO_IMAGES: [&str; 4] = ["AB", "AC", "DB", "DC"];
pub const RS_PREFIX: [i8; 8] = [1, 1, 1, -1, 1, 1, -1, 1];
pub const NEW_PREFIX: [i8; 16] = [1, 1, -1, 1, 1, 1, 1, -1, -1, -1, 1, -1, 1, 1, 1, -1];
pub const SIGMA_FIXED_16: &str = "ABDBABACDCACABAC";
pub const RHO_FIXED_8: &str = "ABACABDB";
/// `8·Σ̂(1)` and `8·Σ̂(2)` in lexicographic pair order.
pub const SIGMA_HAT_ODD_X8: [i64; 16] = [0, 1, 1, 0, 1, 0, 0, 1, 1, 0, 0, 1, 0, 1, 1, 0];
pub const SIGMA_HAT_EVEN_X8: [i64; 16] = [1, 0, 0, 1, 0, 1, 1, 0, 0, 1, 1, 0, 1, 0, 0, 1];
pub const V2: [i64; 16] = [1, 0, 0, -1, 0, 1, -1, 0, 0, -1, 1, 0, -1, 0, 0, 1];

pub fn instruction_matrices_sigma() -> [IntMatrix; 4] {
    [
        IntMatrix::from_rows(&[&[1, 1, 0, 0], &[0, 0, 0, 0], &[0, 0, 0, 0], &[0, 0, 1, 1]]),
        IntMatrix::from_rows(&[&[0, 0, 0, 0], &[1, 1, 0, 0], &[0, 0, 1, 1], &[0, 0, 0, 0]]),
        IntMatrix::from_rows(&[&[0, 1, 0, 1], &[0, 0, 0, 0], &[0, 0, 0, 0], &[1, 0, 1, 0]]),
        IntMatrix::from_rows(&[&[0, 0, 0, 0], &[1, 0, 1, 0], &[0, 1, 0, 1], &[0, 0, 0, 0]]),
    ]
}

pub fn sigma() -> SubstitutionRule {
    SubstitutionRule::from_strs("ABCD", &SIGMA_IMAGES).expect("valid rule")
}

pub fn rho() -> SubstitutionRule {
    SubstitutionRule::from_strs("ABCD", &RHO_IMAGES).expect("valid rule")
}

fn eighths(v: &[i64; 16]) -> Vec<Q> {
    v.iter().map(|&x| frac(x, 8)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct VerifyOptions {
    /// Skip the brute-force counts on the `4^9` prefix.
    pub quick: bool,
    /// Rule checked against the reference `σ` identities; `σ` itself when
    /// `None`.
    pub rule: Option<SubstitutionRule>,
}

type Outcome = Result<(bool, String)>;
type NamedCheck<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn ok(passed: bool, detail: impl Into<String>) -> Outcome {
    Ok((passed, detail.into()))
}

/// Runs every check; never stops at the first failure.
pub fn run(options: &VerifyOptions) -> Vec<Check> {
    let rule = options.rule.clone().unwrap_or_else(sigma);
    let mut checks: Vec<NamedCheck> = vec![
        (
            "derive(+-) = sigma",
            Box::new(|| {
                let d = derive_substitution(&"+-".parse()?);
                ok(d.image_strs() == SIGMA_IMAGES, d.to_string())
            }),
        ),
        (
            "single step (+) = rho",
            Box::new(|| {
                let r = single_step_substitution(Sign::Plus);
                ok(r == rho(), r.to_string())
            }),
        ),
        (
            "P_3 coefficients (+)",
            Box::new(|| {
                let c = coefficients(&"+".parse()?, 3);
                ok(c == RS_PREFIX, format!("{c:?}"))
            }),
        ),
        (
            "P_4 coefficients (+-)",
            Box::new(|| {
                let c = coefficients(&"+-".parse()?, 4);
                ok(c == NEW_PREFIX, format!("{c:?}"))
            }),
        ),
        (
            "rho fixed point ABACABDB",
            Box::new(|| {
                let w = rho().fixed_point_prefix_char('A', 8)?;
                ok(w == RHO_FIXED_8, w)
            }),
        ),
        (
            "rule images = sigma",
            Box::new(|| ok(rule.image_strs() == SIGMA_IMAGES, rule.to_string())),
        ),
        (
            "fixed point ABDBABACDCACABAC",
            Box::new(|| {
                let w = rule.fixed_point_prefix_char('A', 16)?;
                ok(w == SIGMA_FIXED_16, w)
            }),
        ),
        (
            "binary reduction of fixed point",
            Box::new(|| {
                let w = rule.fixed_point_prefix_char('A', 16)?;
                let b = binary_reduce(&w, &WeightMap::standard())?;
                ok(b == NEW_PREFIX, format!("{b:?}"))
            }),
        ),
        (
            "instruction matrices R_0..R_3",
            Box::new(|| {
                let r = rule.instruction_matrices();
                ok(
                    r[..] == instruction_matrices_sigma()[..],
                    format!("{} matrices", r.len()),
                )
            }),
        ),
        (
            "M = R_0 + R_1 + R_2 + R_3",
            Box::new(|| {
                let r = rule.instruction_matrices();
                let sum = r[1..].iter().fold(r[0].clone(), |a, m| a.add(m));
                ok(
                    sum == rule.substitution_matrix(),
                    format!("column sums {:?}", sum.column_sums()),
                )
            }),
        ),
        (
            "M^2 > 0",
            Box::new(|| {
                let n = rule.primitivity_exponent();
                ok(
                    n == Some(2),
                    n.map_or("not primitive".into(), |n| format!("exponent {n}")),
                )
            }),
        ),
        (
            "aperiodicity witness A (BA, CA legal)",
            Box::new(|| {
                let w = rule.aperiodicity_witness()?;
                let pairs = rule.legal_factors(2)?;
                let has = |s: &str| {
                    rule.alphabet()
                        .parse_word(s)
                        .is_ok_and(|w| pairs.contains(&w))
                };
                let shown = w.map_or("none".into(), |l| rule.alphabet().char_of(l).to_string());
                ok(
                    w == Some(0) && has("BA") && has("CA"),
                    format!("witness {shown}"),
                )
            }),
        ),
        (
            "PF data (4, u = 1/4 (1,1,1,1))",
            Box::new(|| {
                let p = rule.perron_data()?;
                let u: Vec<String> = p.frequencies.iter().map(ToString::to_string).collect();
                ok(
                    p.eigenvalue == 4 && p.frequencies == vec![frac(1, 4); 4],
                    format!("{} with u = ({})", p.eigenvalue, u.join(", ")),
                )
            }),
        ),
        (
            "Sigma(0) = 1/4 sum e_aa",
            Box::new(|| {
                let mut t = CorrelationTable::new(&rule)?;
                let want: Vec<Q> = (0..16)
                    .map(|p| if p % 5 == 0 { frac(1, 4) } else { Q::zero() })
                    .collect();
                ok(t.entries(0) == want, "")
            }),
        ),
        (
            "Sigma(1) = Sigma(3)",
            Box::new(|| {
                let mut t = CorrelationTable::new(&rule)?;
                let want = eighths(&SIGMA_HAT_ODD_X8);
                let got = t.entries(1).to_vec();
                ok(
                    got == want && t.entries(3) == want,
                    format!("8*Sigma(1) = ({})", fmt_scaled(&got)),
                )
            }),
        ),
        (
            "Sigma(2) = Sigma(4)",
            Box::new(|| {
                let mut t = CorrelationTable::new(&rule)?;
                let want = eighths(&SIGMA_HAT_EVEN_X8);
                let got = t.entries(2).to_vec();
                ok(
                    got == want && t.entries(4) == want,
                    format!("8*Sigma(2) = ({})", fmt_scaled(&got)),
                )
            }),
        ),
        (
            "Sigma(4n+r) = Sigma(r), n <= 64",
            Box::new(|| {
                let mut t = CorrelationTable::new(&rule)?;
                let base: Vec<Vec<Q>> = (1..=4).map(|r| t.entries(r).to_vec()).collect();
                let bad = (1..=64usize)
                    .flat_map(|n| (0..4usize).map(move |r| (n, r)))
                    .find(|&(n, r)| {
                        let k = 4 * n + r;
                        let want = if r == 0 { &base[3] } else { &base[r - 1] };
                        t.entries(k) != &want[..]
                    });
                ok(
                    bad.is_none(),
                    bad.map_or(String::new(), |(n, r)| format!("fails at n = {n}, r = {r}")),
                )
            }),
        ),
        (
            "ergodic classes E_1, E_2 and T",
            Box::new(|| {
                let d = ergodic_decomposition(&rule)?;
                let classes = d.class_labels();
                let t = d.transient_labels();
                let pass = classes == [vec!["AA", "BB", "CC", "DD"], vec!["AD", "BC", "CB", "DA"]]
                    && t == ["AB", "AC", "BA", "BD", "CA", "CD", "DB", "DC"];
                let sets: Vec<String> = classes
                    .iter()
                    .map(|c| format!("{{{}}}", c.join(", ")))
                    .collect();
                ok(
                    pass,
                    format!("{} / T = {{{}}}", sets.join(" "), t.join(", ")),
                )
            }),
        ),
        (
            "v transient entries (w_1+w_2)/2",
            Box::new(|| {
                let d = ergodic_decomposition(&rule)?;
                let half = vec![frac(1, 2); d.class_count()];
                let pass =
                    d.class_count() == 2 && d.transient.iter().all(|&p| d.absorption[p] == half);
                ok(pass, format!("{} classes", d.class_count()))
            }),
        ),
        (
            "semipositive range [-1, 1]",
            Box::new(|| {
                let s = semipositivity(&ergodic_decomposition(&rule)?)?;
                let pass = s.lower == Some(Endpoint::Exact(q(-1)))
                    && s.upper == Some(Endpoint::Exact(q(1)));
                let show =
                    |e: &Option<Endpoint>| e.as_ref().map_or("-".into(), ToString::to_string);
                ok(pass, format!("[{}, {}]", show(&s.lower), show(&s.upper)))
            }),
        ),
        (
            "v_d = diag(2(1+w), 1-w, 1-w, 0)",
            Box::new(|| {
                let d = ergodic_decomposition(&rule)?;
                let mut pass = d.class_count() == 2;
                for w in [-1i64, 0, 1] {
                    if !pass {
                        break;
                    }
                    let w = q(w);
                    let v = build_v(&d, &[Q::one(), w.clone()])?;
                    let mut got: Vec<Q> = v
                        .rational_eigenvalues()
                        .unwrap_or_default()
                        .into_iter()
                        .flat_map(|(e, m)| std::iter::repeat_n(e, m))
                        .collect();
                    got.sort();
                    let mut want = vec![
                        q(2) * (Q::one() + &w),
                        Q::one() - &w,
                        Q::one() - &w,
                        Q::zero(),
                    ];
                    want.sort();
                    pass = got == want;
                }
                ok(pass, "")
            }),
        ),
        (
            "extreme rays v_1, v_2",
            Box::new(|| {
                let s = semipositivity(&ergodic_decomposition(&rule)?)?;
                let v2: Vec<Q> = V2.iter().map(|&x| q(x)).collect();
                let pass = s.rays.len() == 2
                    && s.rays[0].vector == vec![Q::one(); 16]
                    && s.rays[1].vector == v2;
                ok(pass, format!("{} rays", s.rays.len()))
            }),
        ),
        (
            "c_v1(k) = 1, c_v2(k) = 0 for 1 <= k <= 256",
            Box::new(|| {
                let r = classify_spectrum(&rule, 256)?;
                let pass = r.rays.len() == 2
                    && r.rays[0].coefficients.iter().all(One::is_one)
                    && r.rays[1].coefficients[1..].iter().all(Zero::is_zero);
                ok(pass, "")
            }),
        ),
        (
            "eta(k) = 0 for 1 <= k <= 256",
            Box::new(|| {
                let mut t = CorrelationTable::new(&rule)?;
                let w = WeightMap::standard();
                let bad = (1..=256).find(|&k| {
                    !crate::correlation::autocorrelation(&mut t, &w, k).is_ok_and(|e| e.is_zero())
                });
                ok(
                    bad.is_none(),
                    bad.map_or(String::new(), |k| format!("nonzero at k = {k}")),
                )
            }),
        ),
        (
            "purely AC in the balanced weight case",
            Box::new(|| {
                let r = classify_spectrum(&rule, 64)?;
                let pass = r.balanced_is_purely_ac()
                    && r.rays.first().map(|x| x.verdict) == Some(Verdict::PurePointDeltaComb)
                    && r.rays.get(1).map(|x| x.verdict) == Some(Verdict::AbsolutelyContinuous);
                ok(pass, r.overall())
            }),
        ),
    ];
    if !options.quick {
        checks.push((
            "Sigma(k) vs 4^9-prefix counts, k <= 8",
            Box::new(|| {
                let oracle = PairCountOracle::new(&rule, 1 << 18)?;
                let mut t = CorrelationTable::new(&rule)?;
                let mut worst = 0f64;
                for k in 0..=8 {
                    for (e, a) in t.entries(k).iter().zip(oracle.sigma_hat(k)) {
                        worst = worst.max((to_f64(e) - a).abs());
                    }
                }
                ok(worst <= 1e-3, format!("max deviation {worst:.3e}"))
            }),
        ));
        checks.push((
            "eta(k) vs empirical autocorrelation, k <= 16",
            Box::new(|| {
                let oracle = PairCountOracle::new(&rule, 1 << 18)?;
                let w = WeightMap::standard();
                let seq =
                    BinarySeq::new(binary_reduce(&rule.alphabet().render(oracle.prefix()), &w)?)?;
                let mut t = CorrelationTable::new(&rule)?;
                let mut worst = 0f64;
                for k in 0..=16 {
                    let exact = to_f64(&crate::correlation::autocorrelation(&mut t, &w, k)?);
                    worst = worst.max((exact - empirical_autocorrelation(&seq, k)?).abs());
                }
                ok(worst <= 1e-3, format!("max deviation {worst:.3e}"))
            }),
        ));
    }

    checks
        .into_iter()
        .map(|(name, f)| match f() {
            Ok((passed, detail)) => Check {
                name,
                passed,
                detail,
            },
            Err(e) => Check {
                name,
                passed: false,
                detail: format!("error: {e}"),
            },
        })
        .collect()
}

fn fmt_scaled(v: &[Q]) -> String {
    v.iter()
        .map(|x| (x * q(8)).to_string())
        .collect::<Vec<_>>()
        .join(", ")
}
