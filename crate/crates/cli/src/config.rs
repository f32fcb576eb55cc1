//! TOML experiment configuration and the models it resolves to.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use typexp_core::{
    build_robust_model, quantization_radius, quantize_all, Distribution, ExperimentPlan,
    HypothesisSet, QuantizerSpec, RobustModel, Rule,
};

use crate::error::{CliError, CliResult};

pub const DEFAULT_TRIALS: u64 = 100_000;
pub const DEFAULT_N_VALUES: [u64; 10] = [50, 100, 150, 200, 250, 300, 350, 400, 450, 500];

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Epsilons {
    List(Vec<f64>),
    /// Only `"auto"` is accepted: `ε_j = V(P_j, Q_j)`.
    Keyword(String),
}

/// The file format. Every key except `alphabet_size` and `hypotheses` is
/// optional.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub alphabet_size: usize,
    pub hypotheses: Vec<Vec<f64>>,
    pub priors: Option<Vec<f64>>,
    pub nominals: Option<Vec<Vec<f64>>>,
    pub epsilons: Option<Epsilons>,
    pub quantizer_bits: Option<u32>,
    pub rules: Option<Vec<String>>,
    pub n_values: Option<Vec<u64>>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("cannot read config {}", path.display()), e))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Validation(msg) => CliError::Validation(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let config: Self = toml::from_str(text).map_err(|e| CliError::Validation(e.to_string()))?;
        config.check_shape()?;
        Ok(config)
    }

    /// Minimal config holding only distributions, for inline input.
    pub fn from_vectors(hypotheses: Vec<Vec<f64>>) -> CliResult<Self> {
        let config = Self {
            alphabet_size: hypotheses.first().map_or(0, Vec::len),
            hypotheses,
            priors: None,
            nominals: None,
            epsilons: None,
            quantizer_bits: None,
            rules: None,
            n_values: None,
            trials: None,
            seed: None,
            output: None,
        };
        config.check_shape()?;
        Ok(config)
    }

    fn check_shape(&self) -> CliResult<()> {
        let bad = |msg: String| Err(CliError::Validation(msg));
        if self.hypotheses.len() < 2 {
            return bad(format!(
                "need at least two hypotheses, got {}",
                self.hypotheses.len()
            ));
        }
        for (name, rows) in [
            ("hypotheses", Some(&self.hypotheses)),
            ("nominals", self.nominals.as_ref()),
        ] {
            for (i, row) in rows.into_iter().flatten().enumerate() {
                if row.len() != self.alphabet_size {
                    return bad(format!(
                        "{name}[{}] has {} entries, alphabet_size is {}",
                        i + 1,
                        row.len(),
                        self.alphabet_size
                    ));
                }
            }
        }
        let m = self.hypotheses.len();
        if let Some(p) = &self.priors {
            if p.len() != m {
                return bad(format!("{} priors for {m} hypotheses", p.len()));
            }
        }
        if let Some(q) = &self.nominals {
            if q.len() != m {
                return bad(format!("{} nominals for {m} hypotheses", q.len()));
            }
        }
        if self.nominals.is_some() && self.quantizer_bits.is_some() {
            return bad("nominals and quantizer_bits are mutually exclusive".into());
        }
        match &self.epsilons {
            Some(Epsilons::Keyword(k)) if k != "auto" => {
                return bad(format!("epsilons must be a list or \"auto\", got {k:?}"));
            }
            Some(Epsilons::List(e)) => {
                if self.quantizer_bits.is_some() {
                    return bad("quantizer_bits derives epsilons; use \"auto\" or omit them".into());
                }
                if e.len() != m {
                    return bad(format!("{} epsilons for {m} hypotheses", e.len()));
                }
            }
            _ => {}
        }
        if self.epsilons.is_some() && self.nominals.is_none() && self.quantizer_bits.is_none() {
            return bad("epsilons need nominals or quantizer_bits".into());
        }
        if let Some(rules) = &self.rules {
            for r in rules {
                r.parse::<Rule>()
                    .map_err(|e| CliError::Validation(e.to_string()))?;
            }
        }
        if self
            .n_values
            .as_ref()
            .is_some_and(|n| n.is_empty() || n.contains(&0))
        {
            return bad("n_values must be a non-empty list of positive integers".into());
        }
        if self.trials == Some(0) {
            return bad("trials must be at least 1".into());
        }
        Ok(())
    }

    fn distributions(rows: &[Vec<f64>], name: &str) -> CliResult<Vec<Distribution<f64>>> {
        rows.iter()
            .enumerate()
            .map(|(i, row)| {
                Distribution::from_f64s(row)
                    .map_err(|e| CliError::Validation(format!("{name}[{}]: {e}", i + 1)))
            })
            .collect()
    }

    pub fn hypothesis_distributions(&self) -> CliResult<Vec<Distribution<f64>>> {
        Self::distributions(&self.hypotheses, "hypotheses")
    }

    pub fn hypothesis_set(&self) -> CliResult<HypothesisSet<f64>> {
        let dists = self.hypothesis_distributions()?;
        let set = match &self.priors {
            Some(p) => HypothesisSet::new(dists, p.clone()),
            None => HypothesisSet::uniform(dists),
        };
        set.map_err(|e| CliError::Validation(e.to_string()))
    }

    /// Nominals from the file, or from quantizing the hypotheses at `bits`
    /// (the argument overrides `quantizer_bits`).
    pub fn robust_model(&self, bits: Option<u32>) -> CliResult<Option<RobustModel<f64>>> {
        let truth = self.hypothesis_distributions()?;
        let bits = bits.or(self.quantizer_bits);
        let nominals = match (&self.nominals, bits) {
            (Some(_), Some(_)) => {
                return Err(CliError::Validation(
                    "nominals and quantizer bits are mutually exclusive".into(),
                ))
            }
            (Some(rows), None) => Self::distributions(rows, "nominals")?,
            (None, Some(q)) => {
                let spec =
                    QuantizerSpec::new(q).map_err(|e| CliError::Validation(e.to_string()))?;
                quantize_all(&truth, spec)?
            }
            (None, None) => return Ok(None),
        };
        let epsilons = match &self.epsilons {
            Some(Epsilons::List(e)) => e.clone(),
            _ => quantization_radius(&truth, &nominals)?.per_hypothesis,
        };
        Ok(Some(build_robust_model(nominals, epsilons)?))
    }

    pub fn rules(&self) -> Vec<Rule> {
        match &self.rules {
            Some(r) => r
                .iter()
                .map(|s| s.parse().expect("checked at load"))
                .collect(),
            None => vec![Rule::Nn],
        }
    }

    pub fn n_values(&self) -> Vec<u64> {
        self.n_values
            .clone()
            .unwrap_or_else(|| DEFAULT_N_VALUES.to_vec())
    }

    pub fn plan(&self, trials: Option<u64>, seed: Option<u64>) -> CliResult<ExperimentPlan> {
        let trials = trials.or(self.trials).unwrap_or(DEFAULT_TRIALS);
        let seed = seed.or(self.seed).unwrap_or(0);
        ExperimentPlan::new(
            self.hypothesis_set()?,
            self.robust_model(None)?,
            self.rules(),
            self.n_values(),
            trials,
            seed,
        )
        .map_err(|e| CliError::Validation(e.to_string()))
    }
}
