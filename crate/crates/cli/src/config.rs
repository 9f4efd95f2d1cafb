//! Run configuration: a single JSON document, with command-line flags
//! overriding individual fields. The fully resolved configuration is echoed
//! into every report so outputs are self-describing.

use std::path::Path;

use longswap::algebra::{Rational, parse_rational, to_f64};
use longswap::params::ModelParams;
use longswap::{Configuration, Word};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

/// A rational given either as a JSON string ("1/3", "0.25") or a number.
/// Numbers go through their shortest decimal form, so `0.3` means 3/10.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum RationalField {
    Text(String),
    Number(serde_json::Number),
}

impl RationalField {
    fn parse(&self) -> Result<Rational, String> {
        let text = match self {
            RationalField::Text(s) => s.clone(),
            RationalField::Number(n) => n.to_string(),
        };
        parse_rational(&text).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub species: Option<u8>,
    pub mu: Option<Vec<RationalField>>,
    pub p: Option<RationalField>,
    pub n: Option<usize>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub t_max: Option<f64>,
    pub window: Option<(i64, i64)>,
    pub mode: Option<String>,
    pub out: Option<String>,
    pub tolerance: Option<f64>,
    pub initial_positions: Option<Vec<i64>>,
    pub initial_word: Option<String>,
}

/// Flag overrides shared by every subcommand.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct CommonArgs {
    /// JSON configuration file; flags override its fields
    #[arg(long)]
    pub config: Option<std::path::PathBuf>,
    /// Seed for every randomized step
    #[arg(long)]
    pub seed: Option<u64>,
    /// Arithmetic mode: exact rationals or 64-bit floats
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Output path (stdout when omitted)
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
    /// Monte Carlo trial count
    #[arg(long)]
    pub trials: Option<usize>,
    /// Comparison tolerance where one applies
    #[arg(long)]
    pub tolerance: Option<f64>,
}

/// Fully resolved configuration; embedded verbatim in every report.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub species: u8,
    pub mu: Vec<String>,
    pub p: String,
    pub n: usize,
    pub seed: u64,
    pub trials: usize,
    pub t_max: f64,
    pub window: (i64, i64),
    pub mode: Mode,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial_positions: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial_word: Option<String>,
    #[serde(skip)]
    pub params: ModelParams<Rational>,
    #[serde(skip)]
    pub out: Option<std::path::PathBuf>,
}

impl RunConfig {
    pub fn resolve(args: &CommonArgs) -> Result<Self, String> {
        let file: FileConfig = match &args.config {
            Some(path) => load_file(path)?,
            None => FileConfig::default(),
        };

        let mu_fields = file.mu.unwrap_or_else(|| {
            vec![
                RationalField::Text("1/3".into()),
                RationalField::Text("2/5".into()),
            ]
        });
        let mu: Vec<Rational> = mu_fields
            .iter()
            .map(RationalField::parse)
            .collect::<Result<_, _>>()?;
        let species = file.species.unwrap_or(mu.len() as u8);
        if species as usize != mu.len() {
            return Err(format!(
                "mu has {} entries but species = {species}",
                mu.len()
            ));
        }
        let p = file
            .p
            .map(|f| f.parse())
            .transpose()?
            .unwrap_or_else(|| parse_rational("1").unwrap());
        let params = ModelParams::new(mu.clone(), p.clone()).map_err(|e| e.to_string())?;

        let mode = match (args.mode, file.mode.as_deref()) {
            (Some(m), _) => m,
            (None, Some("exact")) => Mode::Exact,
            (None, Some("float")) => Mode::Float,
            (None, Some(other)) => return Err(format!("unknown mode {other:?}")),
            (None, None) => Mode::Exact,
        };

        let window = file.window.unwrap_or((-8, 10));
        if window.0 >= window.1 {
            return Err(format!("window {window:?} is empty"));
        }
        let n = file.n.unwrap_or(3);
        if n == 0 {
            return Err("n must be positive".into());
        }

        let out = args
            .out
            .clone()
            .or_else(|| file.out.as_ref().map(std::path::PathBuf::from));

        Ok(RunConfig {
            species,
            mu: mu.iter().map(Rational::to_string).collect(),
            p: p.to_string(),
            n,
            seed: args.seed.or(file.seed).unwrap_or(42),
            trials: args.trials.or(file.trials).unwrap_or(100_000),
            t_max: file.t_max.unwrap_or(1.0),
            window,
            mode,
            tolerance: args.tolerance.or(file.tolerance).unwrap_or(0.005),
            initial_positions: file.initial_positions,
            initial_word: file.initial_word,
            params,
            out,
        })
    }

    pub fn float_params(&self) -> ModelParams<f64> {
        self.params.to_float()
    }

    pub fn p_f64(&self) -> f64 {
        to_f64(self.params.p())
    }

    /// Initial configuration for the simulator: explicit positions/word when
    /// configured, otherwise an adjacent block of species-1 particles.
    pub fn initial_configuration(&self) -> Result<Configuration, String> {
        let word = match &self.initial_word {
            Some(text) => {
                let letters: Vec<u8> = text
                    .chars()
                    .map(|c| c.to_digit(10).map(|d| d as u8).ok_or("bad word digit"))
                    .collect::<Result<_, _>>()?;
                let word = Word::new(letters);
                word.validate(self.species).map_err(|e| e.to_string())?;
                word
            }
            None => Word::new(vec![1u8; self.n]),
        };
        let positions = match &self.initial_positions {
            Some(p) => p.clone(),
            None => (0..word.len() as i64).collect(),
        };
        Configuration::new(positions, word).map_err(|e| e.to_string())
    }
}

fn load_file(path: &Path) -> Result<FileConfig, String> {
    let text =
        std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("cannot parse {}: {e}", path.display()))
}
