use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use difflab_core::correlation::{autocorrelation, classify_spectrum_weighted, CorrelationTable};
use difflab_core::format::{float17, parse_rule, periodogram_csv, sup_scan_csv, write_rule};
use difflab_core::fourier::{
    binned_means, empirical_autocorrelation, max_fft_from_env, periodogram, sup_norm_estimate,
    sup_scan, BinarySeq,
};
use difflab_core::regression::{self, VerifyOptions};
use difflab_core::rudin::{binary_reduce, derive_substitution, sequence_prefix};
use difflab_core::{Error, SignSequence, SubstitutionRule, WeightMap};

/// Rudin–Shapiro type sequences: generation, substitutions and exact
/// diffraction classification.
#[derive(Parser)]
#[command(name = "difflab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the first N terms of the ±1 sequence.
    Generate {
        #[command(flatten)]
        source: Source,
        #[arg(short = 'N')]
        n: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Print the substitution rule for a sign pattern.
    Derive {
        #[arg(long, value_parser = parse_signs)]
        signs: SignSequence,
        #[command(flatten)]
        out: Output,
    },
    /// Primitivity, aperiodicity and Perron–Frobenius data.
    Analyze {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        out: Output,
    },
    /// Exact correlation report and spectral verdicts.
    ///
    /// Exit status 2 means the verdict is Inconclusive; 3 means the pair
    /// graph has more than two ergodic classes; 64 is a usage error.
    Spectra {
        #[command(flatten)]
        source: Source,
        #[arg(short = 'K', default_value_t = 64)]
        k: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Exact autocorrelation coefficients eta(0..K).
    Autocorr {
        #[command(flatten)]
        source: Source,
        #[arg(short = 'K', default_value_t = 16)]
        k: usize,
        /// Also report the empirical value on a prefix of this length.
        #[arg(short = 'N')]
        n: Option<usize>,
        #[command(flatten)]
        out: Output,
    },
    /// Periodogram or oversampled sup-norm scan of a prefix.
    Diffract {
        #[command(flatten)]
        source: Source,
        #[arg(short = 'N')]
        n: usize,
        #[arg(long, value_enum, default_value_t = Mode::Periodogram)]
        mode: Mode,
        #[arg(long, default_value_t = 8)]
        oversample: usize,
        /// Bins for the periodogram summary.
        #[arg(long, default_value_t = 64)]
        bins: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Check the reference identities; exit status 1 if any fails.
    Verify {
        /// Skip the brute-force counts on the 4^9 prefix.
        #[arg(long)]
        quick: bool,
        /// Check this rule in place of the `+-` rule.
        #[arg(long)]
        file: Option<PathBuf>,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Sign pattern over {+,-}, e.g. "+-".
    #[arg(long, value_parser = parse_signs)]
    signs: Option<SignSequence>,
    /// Rule file (TOML with `alphabet` and a `[rules]` table).
    #[arg(long)]
    file: Option<PathBuf>,
    /// Letter weights as +/- in alphabet order; defaults to first half +1.
    #[arg(long, requires = "file")]
    weights: Option<String>,
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Periodogram,
    Sup,
}

fn parse_signs(s: &str) -> Result<SignSequence, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn read_rule(path: &Path) -> anyhow::Result<SubstitutionRule> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_rule(&text).with_context(|| format!("parsing {}", path.display()))
}

impl Source {
    fn rule(&self) -> anyhow::Result<SubstitutionRule> {
        match (&self.signs, &self.file) {
            (Some(s), _) => Ok(derive_substitution(s)),
            (None, Some(path)) => read_rule(path),
            (None, None) => unreachable!("clap enforces one source"),
        }
    }

    fn weights(&self, rule: &SubstitutionRule) -> anyhow::Result<WeightMap> {
        Ok(match &self.weights {
            Some(w) => WeightMap::from_signs(rule.alphabet(), w)?,
            None => WeightMap::balanced_for(rule.alphabet()),
        })
    }

    /// First `n` terms: the polynomial recursion for signs, the weighted
    /// fixed point for a rule file.
    fn sequence(&self, n: usize) -> anyhow::Result<Vec<i8>> {
        if n == 0 {
            bail!("-N must be at least 1");
        }
        if let Some(s) = &self.signs {
            return Ok(sequence_prefix(s, n));
        }
        let rule = self.rule()?;
        let seed = rule
            .default_seed()
            .ok_or_else(|| Error::NonProlongableSeed(rule.alphabet().char_of(0)))?;
        let word = rule.alphabet().render(&rule.fixed_point_prefix(seed, n)?);
        Ok(binary_reduce(&word, &self.weights(&rule)?)?)
    }
}

impl Output {
    fn emit(&self, text: &str) -> anyhow::Result<()> {
        match &self.out {
            Some(path) => {
                fs::write(path, text).with_context(|| format!("writing {}", path.display()))
            }
            None => {
                std::io::stdout().write_all(text.as_bytes())?;
                Ok(())
            }
        }
    }

    fn emit_json(&self, v: &Value) -> anyhow::Result<()> {
        self.emit(&(serde_json::to_string_pretty(v)? + "\n"))
    }

    fn reject_csv(&self, command: &str) -> anyhow::Result<()> {
        if self.format == Format::Csv {
            bail!("{command} has no csv output");
        }
        Ok(())
    }
}

/// Usage errors get their own status so they never read as `spectra`'s
/// Inconclusive (2).
const EXIT_USAGE: u8 = 64;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            let unsupported = e
                .downcast_ref::<Error>()
                .is_some_and(|e| matches!(e, Error::UnsupportedClassCount(_)));
            ExitCode::from(if unsupported { 3 } else { 1 })
        }
    }
}

fn run(command: Command) -> anyhow::Result<ExitCode> {
    match command {
        Command::Generate { source, n, out } => {
            let seq = source.sequence(n)?;
            match out.format {
                Format::Text => {
                    let line: Vec<String> = seq.iter().map(i8::to_string).collect();
                    out.emit(&(line.join(",") + "\n"))?;
                }
                Format::Csv => {
                    let mut s = String::from("n,value\n");
                    for (i, v) in seq.iter().enumerate() {
                        s += &format!("{i},{v}\n");
                    }
                    out.emit(&s)?;
                }
                Format::Json => out.emit_json(&json!(seq))?,
            }
        }
        Command::Derive { signs, out } => {
            out.reject_csv("derive")?;
            let rule = derive_substitution(&signs);
            match out.format {
                Format::Json => out.emit_json(&rule_json(&rule))?,
                _ => out.emit(&write_rule(&rule))?,
            }
        }
        Command::Analyze { source, out } => {
            out.reject_csv("analyze")?;
            analyze(&source.rule()?, &out)?;
        }
        Command::Spectra { source, k, out } => {
            out.reject_csv("spectra")?;
            let rule = source.rule()?;
            let report = classify_spectrum_weighted(&rule, k, &source.weights(&rule)?)?;
            match out.format {
                Format::Json => out.emit_json(&report.to_json())?,
                _ => out.emit(&report.to_string())?,
            }
            if report.is_inconclusive() {
                return Ok(ExitCode::from(2));
            }
        }
        Command::Autocorr { source, k, n, out } => {
            let rule = source.rule()?;
            let weights = source.weights(&rule)?;
            let mut table = CorrelationTable::new(&rule)?;
            let exact = (0..=k)
                .map(|j| autocorrelation(&mut table, &weights, j))
                .collect::<Result<Vec<_>, _>>()?;
            let empirical = match n {
                Some(n) => {
                    let seq = BinarySeq::new(source.sequence(n)?)?;
                    Some(
                        (0..=k)
                            .map(|j| empirical_autocorrelation(&seq, j))
                            .collect::<Result<Vec<_>, _>>()?,
                    )
                }
                None => None,
            };
            autocorr_output(&exact, empirical.as_deref(), &out)?;
        }
        Command::Diffract {
            source,
            n,
            mode,
            oversample,
            bins,
            out,
        } => {
            let seq = BinarySeq::new(source.sequence(n)?)?;
            let budget = max_fft_from_env()?;
            match mode {
                Mode::Periodogram => {
                    let intensity = periodogram(&seq, budget)?;
                    if out.format == Format::Csv {
                        out.emit(&periodogram_csv(&intensity))?;
                    } else {
                        periodogram_summary(&intensity, bins, &out)?;
                    }
                }
                Mode::Sup => {
                    if out.format == Format::Csv {
                        out.emit(&sup_scan_csv(&sup_scan(&seq, oversample, budget)?))?;
                    } else {
                        let r = sup_norm_estimate(&seq, oversample, budget)?;
                        let v = json!({
                            "n": r.n,
                            "oversample": r.oversample,
                            "sup_estimate": r.sup_estimate,
                            "ratio": r.ratio,
                            "argmax_theta": r.argmax_theta,
                            "sup_upper_bound": r.sup_upper_bound,
                        });
                        if out.format == Format::Json {
                            out.emit_json(&v)?;
                        } else {
                            out.emit(&format!(
                                "N = {}\noversample = {}\nsup estimate = {}\nratio to sqrt(N) = {}\nargmax theta = {}\nupper bound = {}\n",
                                r.n,
                                r.oversample,
                                float17(r.sup_estimate),
                                float17(r.ratio),
                                float17(r.argmax_theta),
                                float17(r.sup_upper_bound),
                            ))?;
                        }
                    }
                }
            }
        }
        Command::Verify { quick, file, out } => {
            out.reject_csv("verify")?;
            let rule = file.as_deref().map(read_rule).transpose()?;
            let checks = regression::run(&VerifyOptions { quick, rule });
            if out.format == Format::Json {
                let rows: Vec<Value> = checks
                    .iter()
                    .map(|c| json!({"name": c.name, "passed": c.passed, "detail": c.detail}))
                    .collect();
                out.emit_json(&json!(rows))?;
            } else {
                let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
                let mut s = String::new();
                for c in &checks {
                    let status = if c.passed { "PASS" } else { "FAIL" };
                    s += &format!("{status}  {:width$}  {}\n", c.name, c.detail);
                }
                let failed = checks.iter().filter(|c| !c.passed).count();
                s += &format!(
                    "{} of {} checks passed\n",
                    checks.len() - failed,
                    checks.len()
                );
                out.emit(&s)?;
            }
            let failed: Vec<&str> = checks
                .iter()
                .filter(|c| !c.passed)
                .map(|c| c.name)
                .collect();
            if !failed.is_empty() {
                eprintln!("failed: {}", failed.join("; "));
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn rule_json(rule: &SubstitutionRule) -> Value {
    let rules: serde_json::Map<String, Value> = rule
        .alphabet()
        .letters()
        .iter()
        .zip(rule.image_strs())
        .map(|(c, img)| (c.to_string(), Value::String(img)))
        .collect();
    json!({"alphabet": rule.alphabet().to_string(), "length": rule.length(), "rules": rules})
}

fn analyze(rule: &SubstitutionRule, out: &Output) -> anyhow::Result<()> {
    let exponent = rule.primitivity_exponent();
    let witness = if exponent.is_some() {
        rule.aperiodicity_witness()?
            .map(|l| rule.alphabet().char_of(l))
    } else {
        None
    };
    let perron = match exponent {
        Some(_) => Some(rule.perron_data()?),
        None => None,
    };
    let matrix_rows = |m: &difflab_core::IntMatrix| -> Vec<Vec<u64>> {
        (0..m.dim())
            .map(|r| (0..m.dim()).map(|c| m.get(r, c)).collect())
            .collect()
    };
    if out.format == Format::Json {
        let mut v = rule_json(rule);
        v["primitive"] = json!(exponent.is_some());
        v["primitivity_exponent"] = json!(exponent);
        v["aperiodicity_witness"] = json!(witness.map(String::from));
        v["substitution_matrix"] = json!(matrix_rows(&rule.substitution_matrix()));
        v["instruction_matrices"] = json!(rule
            .instruction_matrices()
            .iter()
            .map(matrix_rows)
            .collect::<Vec<_>>());
        if let Some(p) = &perron {
            v["perron_eigenvalue"] = json!(p.eigenvalue);
            v["frequencies"] = json!(p
                .frequencies
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>());
        }
        return out.emit_json(&v);
    }

    let mut s = format!("rule: {} (length {})\n", rule, rule.length());
    s += &match exponent {
        Some(n) => format!("primitive: yes, M^{n} > 0\n"),
        None => "primitive: no\n".to_string(),
    };
    s += &match witness {
        Some(c) => format!("aperiodic: yes, {c} has two left neighbours\n"),
        None => "aperiodic: inconclusive\n".to_string(),
    };
    if let Some(p) = &perron {
        let u: Vec<String> = p.frequencies.iter().map(ToString::to_string).collect();
        s += &format!("PF eigenvalue: {}\nu = ({})\n", p.eigenvalue, u.join(", "));
    }
    s += &format!("M =\n{}", rule.substitution_matrix());
    for (i, r) in rule.instruction_matrices().iter().enumerate() {
        s += &format!("R_{i} =\n{r}");
    }
    out.emit(&s)
}

fn autocorr_output(
    exact: &[difflab_core::BigRational],
    empirical: Option<&[f64]>,
    out: &Output,
) -> anyhow::Result<()> {
    match out.format {
        Format::Json => {
            let rows: Vec<Value> = exact
                .iter()
                .enumerate()
                .map(|(k, e)| {
                    let mut row = json!({"k": k, "eta": e.to_string()});
                    if let Some(emp) = empirical {
                        row["empirical"] = json!(emp[k]);
                    }
                    row
                })
                .collect();
            out.emit_json(&json!(rows))
        }
        Format::Csv | Format::Text => {
            let sep = if out.format == Format::Csv { "," } else { "  " };
            let mut s = if out.format == Format::Csv {
                if empirical.is_some() {
                    "k,eta,empirical\n"
                } else {
                    "k,eta\n"
                }
                .to_string()
            } else {
                String::new()
            };
            for (k, e) in exact.iter().enumerate() {
                s += &format!("{k}{sep}{e}");
                if let Some(emp) = empirical {
                    s += &format!("{sep}{}", float17(emp[k]));
                }
                s.push('\n');
            }
            out.emit(&s)
        }
    }
}

fn periodogram_summary(intensity: &[f64], bins: usize, out: &Output) -> anyhow::Result<()> {
    let n = intensity.len();
    let mean = binned_means(intensity, 1)?[0];
    let bin_means = if bins > 0 && n.is_multiple_of(bins) {
        Some(binned_means(intensity, bins)?)
    } else {
        None
    };
    if out.format == Format::Json {
        return out.emit_json(&json!({
            "n": n,
            "mean": mean,
            "origin": intensity[0],
            "bins": bin_means,
        }));
    }
    let mut s = format!(
        "N = {n}\nmean intensity = {}\nI(0) = {}\n",
        float17(mean),
        float17(intensity[0])
    );
    match &bin_means {
        Some(b) => {
            let lo = b.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = b.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            s += &format!("{bins} bin means in [{}, {}]\n", float17(lo), float17(hi));
        }
        None => s += &format!("N is not divisible into {bins} bins\n"),
    }
    out.emit(&s)
}
