use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::qsim::EntanglerKind;

/// Spectrum-matching training setup. Defaults reproduce the published
/// configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub n_qubits: usize,
    pub depth: usize,
    pub dataset_size: usize,
    pub lr: f64,
    pub epochs: usize,
    pub seeds: Vec<u64>,
    pub b_target: f64,
    pub b_models: Vec<f64>,
    pub beta1: f64,
    pub beta2: f64,
    pub adam_eps: f64,
    /// Central finite-difference step for model gradients.
    pub fd_step: f64,
    pub entangler: EntanglerKind,
    /// Reuse the target's Haar eigenbases for the models, varying only the
    /// spectrum scale.
    pub share_generator_basis: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            n_qubits: 3,
            depth: 5,
            dataset_size: 1000,
            lr: 1e-5,
            epochs: 500,
            seeds: (1..=10).collect(),
            b_target: 10.0,
            b_models: vec![0.1, 1.0, 10.0],
            beta1: 0.9,
            beta2: 0.999,
            adam_eps: 1e-8,
            fd_step: 1e-4,
            entangler: EntanglerKind::Ring,
            share_generator_basis: false,
        }
    }
}

impl TrainConfig {
    pub fn published() -> Self {
        Self::default()
    }

    /// Reduced profile: 200 samples, 100 epochs, 6 seeds.
    pub fn fast() -> Self {
        Self {
            dataset_size: 200,
            epochs: 100,
            seeds: (1..=6).collect(),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidInput(msg.to_string()));
        if self.n_qubits == 0 || self.n_qubits > 10 {
            return bad("n_qubits must be in 1..=10");
        }
        if self.depth == 0 {
            return bad("depth must be at least 1");
        }
        if !(self.lr > 0.0) {
            return bad("lr must be positive");
        }
        if self.epochs == 0 {
            return bad("epochs must be at least 1");
        }
        if self.dataset_size == 0 {
            return bad("dataset_size must be at least 1");
        }
        if self.seeds.is_empty() {
            return bad("at least one seed is required");
        }
        let mut sorted = self.seeds.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return bad("seeds must be distinct");
        }
        if self.b_models.is_empty() || self.b_models.iter().chain([&self.b_target]).any(|b| !(*b >= 0.0)) {
            return bad("spectrum scales must be non-negative");
        }
        if !(self.fd_step > 0.0) {
            return bad("fd_step must be positive");
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) || !(self.adam_eps > 0.0) {
            return bad("Adam hyperparameters out of range");
        }
        Ok(())
    }

    /// Parses either a single JSON object or `key = value` lines (`#`
    /// comments; list values as JSON arrays or comma-separated). Missing
    /// keys keep their defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let trimmed = text.trim();
        let value = if trimmed.starts_with('{') {
            serde_json::from_str::<Value>(trimmed).map_err(|e| Error::InvalidInput(format!("config JSON: {e}")))?
        } else {
            let mut map = Map::new();
            for (lineno, raw) in text.lines().enumerate() {
                let line = raw.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let (key, val) = line.split_once('=').ok_or_else(|| {
                    Error::InvalidInput(format!("config line {}: expected key = value", lineno + 1))
                })?;
                map.insert(key.trim().to_string(), parse_scalar(val.trim()));
            }
            Value::Object(map)
        };
        let cfg: Self = serde_json::from_value(value).map_err(|e| Error::InvalidInput(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn parse_scalar(val: &str) -> Value {
    if let Ok(v) = serde_json::from_str::<Value>(val) {
        return v;
    }
    if val.contains(',') {
        let items: Vec<Value> = val.split(',').map(|s| parse_scalar(s.trim())).collect();
        return Value::Array(items);
    }
    Value::String(val.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_published_setup() {
        let c = TrainConfig::published();
        assert_eq!((c.n_qubits, c.depth, c.dataset_size, c.epochs), (3, 5, 1000, 500));
        assert_eq!(c.lr, 1e-5);
        assert_eq!(c.seeds.len(), 10);
        assert_eq!(c.b_models, vec![0.1, 1.0, 10.0]);
        c.validate().unwrap();
        let f = TrainConfig::fast();
        assert_eq!((f.dataset_size, f.epochs, f.seeds.len()), (200, 100, 6));
    }

    #[test]
    fn key_value_format() {
        let c = TrainConfig::parse(
            "# comment\nepochs = 20\nseeds = 3, 4, 5\nb_models = [1.0, 10.0]\nentangler = chain\nshare_generator_basis = true\n",
        )
        .unwrap();
        assert_eq!(c.epochs, 20);
        assert_eq!(c.seeds, vec![3, 4, 5]);
        assert_eq!(c.b_models, vec![1.0, 10.0]);
        assert_eq!(c.entangler, EntanglerKind::Chain);
        assert!(c.share_generator_basis);
        assert_eq!(c.lr, 1e-5);
    }

    #[test]
    fn json_format() {
        let c = TrainConfig::parse(r#"{"lr": 0.001, "dataset_size": 10}"#).unwrap();
        assert_eq!((c.lr, c.dataset_size), (0.001, 10));
    }

    #[test]
    fn rejects_invalid() {
        assert!(TrainConfig::parse("lr = -1").is_err());
        assert!(TrainConfig::parse("seeds = 1, 1").is_err());
        assert!(TrainConfig::parse("epochs = 0").is_err());
        assert!(TrainConfig::parse("bogus = 3").is_err());
        assert!(TrainConfig::parse("epochs").is_err());
    }
}
