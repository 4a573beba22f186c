//! Flat key=value run configuration, merged with command-line flags
//! (flags win).

use std::path::PathBuf;

use entangle_mc::{parse_gate, Band, Ensemble, Gate};

use crate::CliError;

#[derive(Debug, Default, Clone)]
pub struct RunOverrides {
    pub seed: Option<u64>,
    pub samples: Option<u64>,
    pub streams: Option<usize>,
    pub bins: Option<usize>,
    pub ensemble: Option<Ensemble>,
    pub gates: Option<Vec<Gate>>,
    pub bands: Option<Vec<Band>>,
    pub budget: Option<u64>,
    pub out: Option<PathBuf>,
}

impl RunOverrides {
    /// Parses a config file: one `key = value` per line, `#` comments.
    /// Gates are comma-separated; bands are semicolon-separated (their
    /// syntax contains commas).
    pub fn from_file(text: &str) -> Result<Self, CliError> {
        let mut cfg = RunOverrides::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::config(format!(
                    "config line {} is not a key = value pair: {line:?}",
                    idx + 1
                ))
            })?;
            let key = key.trim();
            let value = value.trim();
            let bad = |what: &str| {
                CliError::config(format!("config key {key:?}: bad {what} {value:?}"))
            };
            match key {
                "seed" => cfg.seed = Some(value.parse().map_err(|_| bad("integer"))?),
                "samples" => cfg.samples = Some(value.parse().map_err(|_| bad("integer"))?),
                "streams" => cfg.streams = Some(value.parse().map_err(|_| bad("integer"))?),
                "bins" => cfg.bins = Some(value.parse().map_err(|_| bad("integer"))?),
                "budget" => cfg.budget = Some(value.parse().map_err(|_| bad("integer"))?),
                "ensemble" => {
                    cfg.ensemble =
                        Some(value.parse().map_err(|e| CliError::config(format!(
                            "config key \"ensemble\": {e}"
                        )))?)
                }
                "gates" => cfg.gates = Some(parse_gate_list(value)?),
                "bands" => cfg.bands = Some(parse_band_list(value)?),
                "out" => cfg.out = Some(PathBuf::from(value)),
                other => {
                    return Err(CliError::config(format!("unknown config key {other:?}")));
                }
            }
        }
        Ok(cfg)
    }

    /// Overlays `flags` on top of `self`; any flag that is set wins.
    pub fn merged_with(mut self, flags: RunOverrides) -> Self {
        macro_rules! take {
            ($field:ident) => {
                if flags.$field.is_some() {
                    self.$field = flags.$field;
                }
            };
        }
        take!(seed);
        take!(samples);
        take!(streams);
        take!(bins);
        take!(ensemble);
        take!(gates);
        take!(bands);
        take!(budget);
        take!(out);
        self
    }
}

pub fn parse_gate_list(text: &str) -> Result<Vec<Gate>, CliError> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_gate(s).map_err(|e| CliError::config(format!("gate: {e}"))))
        .collect()
}

pub fn parse_band_list(text: &str) -> Result<Vec<Band>, CliError> {
    text.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| Band::parse(s).map_err(|e| CliError::config(format!("band: {e}"))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_merges() {
        let file = RunOverrides::from_file(
            "# comment\nseed = 7\nsamples = 500\ngates = cnot, theta:pi/4\nbands = E in [0.1,0.2]; E in [0.3,0.4]\n",
        )
        .unwrap();
        assert_eq!(file.seed, Some(7));
        assert_eq!(file.gates.as_ref().unwrap().len(), 2);
        assert_eq!(file.bands.as_ref().unwrap().len(), 2);

        let flags = RunOverrides {
            seed: Some(9),
            ..Default::default()
        };
        let merged = file.merged_with(flags);
        assert_eq!(merged.seed, Some(9));
        assert_eq!(merged.samples, Some(500));
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(RunOverrides::from_file("velocity = 3\n").is_err());
        assert!(RunOverrides::from_file("seed = banana\n").is_err());
        assert!(RunOverrides::from_file("gates = warp\n").is_err());
        assert!(RunOverrides::from_file("just a line\n").is_err());
    }
}
