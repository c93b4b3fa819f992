//! Configuration resolution for the command-line driver.
//!
//! Every run draws its settings from three layers, in falling precedence:
//! explicit command-line flags, an optional TOML configuration file, and
//! built-in defaults. The file mirrors the subcommands: top-level `seed`,
//! `threads` and `out-dir` keys plus one optional section per subcommand
//! (`[weights]`, `[verify]`, `[converge]`, `[order]`, `[bench]`,
//! `[solve]`). Unknown keys anywhere in the file are a hard error: a typo
//! must not silently fall back to a default.

use cq_subdiff::stepper::{HistoryMode, SchemeForm};
use cq_subdiff::{QuadratureMethod, WeightKind};
use serde::Deserialize;
use std::path::{Path, PathBuf};

use crate::CliError;

/// Quadrature rule name as it appears on the command line and in files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Bdf1,
    Bdf2,
    L1,
}

impl From<MethodArg> for QuadratureMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Bdf1 => QuadratureMethod::Bdf1,
            MethodArg::Bdf2 => QuadratureMethod::Bdf2,
            MethodArg::L1 => QuadratureMethod::L1,
        }
    }
}

/// Whether a weight table discretizes the derivative or the integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindArg {
    Derivative,
    Integral,
}

impl From<KindArg> for WeightKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Derivative => WeightKind::Derivative,
            KindArg::Integral => WeightKind::Integral,
        }
    }
}

/// Built-in problem selected by `solve`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemArg {
    Manufactured,
    Porous,
}

/// History evaluator selected by `solve`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HistoryArg {
    Naive,
    Fast,
}

impl HistoryArg {
    pub fn mode(self, epsilon: f64, n0: usize) -> HistoryMode {
        match self {
            HistoryArg::Naive => HistoryMode::Naive,
            HistoryArg::Fast => HistoryMode::Fast { epsilon, n0 },
        }
    }
}

/// Scheme form selected by `solve`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormArg {
    Auto,
    Direct,
    Velocity,
}

impl From<FormArg> for SchemeForm {
    fn from(f: FormArg) -> Self {
        match f {
            FormArg::Auto => SchemeForm::Auto,
            FormArg::Direct => SchemeForm::Direct,
            FormArg::Velocity => SchemeForm::Velocity,
        }
    }
}

/// Parsed TOML configuration file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub weights: WeightsSection,
    #[serde(default)]
    pub verify: VerifySection,
    #[serde(default)]
    pub converge: ConvergeSection,
    #[serde(default)]
    pub order: OrderSection,
    #[serde(default)]
    pub bench: BenchSection,
    #[serde(default)]
    pub solve: SolveSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct WeightsSection {
    pub method: Option<MethodArg>,
    pub alpha: Option<f64>,
    pub kind: Option<KindArg>,
    pub h: Option<f64>,
    pub n: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct VerifySection {
    pub samples: Option<usize>,
    pub method: Option<MethodArg>,
    pub alpha: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ConvergeSection {
    pub alphas: Option<Vec<f64>>,
    /// Same syntax as the flag: `"5..9"` or `"5,6,7"` (exponents of 2).
    pub levels: Option<String>,
    pub dof: Option<usize>,
    pub t_final: Option<f64>,
    pub methods: Option<Vec<MethodArg>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct OrderSection {
    pub alphas: Option<Vec<f64>>,
    pub methods: Option<Vec<MethodArg>>,
    pub base_level: Option<u32>,
    pub dof: Option<usize>,
    pub x0: Option<f64>,
    pub delta: Option<f64>,
    pub t_final: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct BenchSection {
    pub alphas: Option<Vec<f64>>,
    pub n: Option<usize>,
    pub dof: Option<usize>,
    pub reps: Option<usize>,
    pub epsilon: Option<f64>,
    pub n0: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct SolveSection {
    pub problem: Option<ProblemArg>,
    pub alpha: Option<f64>,
    pub method: Option<MethodArg>,
    pub steps: Option<usize>,
    pub dof: Option<usize>,
    pub t_final: Option<f64>,
    pub x0: Option<f64>,
    pub delta: Option<f64>,
    pub history: Option<HistoryArg>,
    pub epsilon: Option<f64>,
    pub n0: Option<usize>,
    pub form: Option<FormArg>,
    pub allow_nonadmissible: Option<bool>,
}

impl FileConfig {
    /// Loads and parses the file; any i/o or syntax problem (including an
    /// unknown key) is a configuration error.
    pub fn load(path: &Path) -> Result<FileConfig, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Validation(format!("cannot read config {}: {e}", path.display()))
        })?;
        toml::from_str(&text)
            .map_err(|e| CliError::Validation(format!("config {}: {e}", path.display())))
    }
}

/// Flag value if given, else file value, else the default.
pub fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

/// Flag value if given, else file value, else an error naming the flag.
pub fn require<T>(flag: Option<T>, file: Option<T>, what: &str) -> Result<T, CliError> {
    flag.or(file)
        .ok_or_else(|| CliError::Validation(format!("{what} is required (flag or config file)")))
}

/// Parses refinement levels given as exponents of 2: either an inclusive
/// range `"5..9"` or a comma list `"5,7,9"`. Levels must be strictly
/// increasing and small enough that `1 << level` fits comfortably.
pub fn parse_levels(text: &str) -> Result<Vec<u32>, CliError> {
    const MAX_LEVEL: u32 = 30;
    let bad = |detail: &str| CliError::Validation(format!("levels `{text}`: {detail}"));
    let levels: Vec<u32> = if let Some((lo, hi)) = text.split_once("..") {
        let lo: u32 = lo
            .trim()
            .parse()
            .map_err(|_| bad("range start is not a number"))?;
        let hi: u32 = hi
            .trim()
            .parse()
            .map_err(|_| bad("range end is not a number"))?;
        if hi < lo {
            return Err(bad("range end is below its start"));
        }
        (lo..=hi).collect()
    } else {
        text.split(',')
            .map(|part| {
                part.trim()
                    .parse::<u32>()
                    .map_err(|_| bad("entry is not a number"))
            })
            .collect::<Result<_, _>>()?
    };
    if levels.is_empty() {
        return Err(bad("no levels"));
    }
    if levels.iter().any(|&e| e > MAX_LEVEL) {
        return Err(bad("level exceeds 30 (over a billion steps)"));
    }
    if levels.windows(2).any(|w| w[1] <= w[0]) {
        return Err(bad("levels must be strictly increasing"));
    }
    Ok(levels)
}
