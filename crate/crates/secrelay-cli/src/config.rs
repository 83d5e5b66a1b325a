//! Flat `key = value` run configuration.
//!
//! One key per line, `#` starts a comment (full-line or trailing), blank
//! lines are skipped. Unknown keys are errors — a typo must not silently
//! fall back to a default. `snr_db` is a convenience that rewrites the
//! power and noise fields as a block and is applied before any explicit
//! field key, so explicit values win regardless of their position in the
//! file.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use secrelay::channel::SystemParams;
use secrelay::sim::SchemeVariant;

/// Output encoding of the tabular commands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    /// Comma-separated rows with a fixed header.
    Csv,
    /// A JSON array of row objects.
    Json,
}

impl FromStr for OutputFormat {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(anyhow!("unknown format {other:?} (expected csv or json)")),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

/// Everything a command run needs: system parameters plus sweep and
/// execution settings.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Physical and protocol parameters (`buffer_cap_q` is overridden per
    /// row by `q_values`).
    pub params: SystemParams,
    /// Buffer capacities to sweep.
    pub q_values: Vec<usize>,
    /// Scheme variants to run.
    pub variants: Vec<SchemeVariant>,
    /// Independent draws for probability estimation.
    pub n_mc: u64,
    /// Slots per simulation run.
    pub n_slots: u64,
    /// Base seed; all per-phase seeds derive from it.
    pub seed: u64,
    /// Evaluate the RF-FD indicator with the sum-rate bound included.
    pub strict_region: bool,
    /// Worker streams for probability estimation.
    pub n_workers: u32,
    /// Output encoding.
    pub format: OutputFormat,
    /// Output file (stdout when absent).
    pub out: Option<PathBuf>,
    /// Cross-check the optimizer against a brute-force grid.
    pub grid_check: bool,
    /// Grid resolution for the cross-check.
    pub grid_step: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let params = SystemParams::default();
        RunConfig {
            q_values: vec![params.buffer_cap_q],
            params,
            variants: vec![SchemeVariant::Proposed],
            n_mc: 200_000,
            n_slots: 1_000_000,
            seed: 12345,
            strict_region: false,
            n_workers: 1,
            format: OutputFormat::Csv,
            out: None,
            grid_check: false,
            grid_step: 0.01,
        }
    }
}

impl RunConfig {
    /// Loads defaults overridden by the given file.
    pub fn from_file(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg = RunConfig::default();
        cfg.apply_str(&text)
            .with_context(|| format!("in config {}", path.display()))?;
        Ok(cfg)
    }

    /// Applies `key = value` lines from `text` on top of `self`.
    pub fn apply_str(&mut self, text: &str) -> Result<()> {
        let mut entries: Vec<(usize, &str, &str)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected key = value, got {raw:?}", idx + 1))?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || value.is_empty() {
                bail!("line {}: empty key or value in {raw:?}", idx + 1);
            }
            entries.push((idx + 1, key, value));
        }
        // snr_db first so explicit power/noise keys override it in any order.
        for &(line_no, key, value) in entries.iter().filter(|e| e.1 == "snr_db") {
            self.apply_kv(key, value)
                .with_context(|| format!("line {line_no}"))?;
        }
        for &(line_no, key, value) in entries.iter().filter(|e| e.1 != "snr_db") {
            self.apply_kv(key, value)
                .with_context(|| format!("line {line_no}"))?;
        }
        Ok(())
    }

    fn apply_kv(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, value: &str) -> Result<T>
        where
            T::Err: fmt::Display,
        {
            value
                .parse::<T>()
                .map_err(|e| anyhow!("{key}: cannot parse {value:?}: {e}"))
        }
        match key {
            "snr_db" => {
                // Transmit powers at 10^(dB/10) against unit noise power:
                // κ·W = 1 for every receiver.
                let db: f64 = num(key, value)?;
                let p = 10f64.powf(db / 10.0);
                self.params.p_a = p;
                self.params.p_r = p;
                let kappa = 1.0 / self.params.bandwidth_w;
                self.params.kappa_r = kappa;
                self.params.kappa_b = kappa;
                self.params.kappa_e = kappa;
            }
            "p_a" => self.params.p_a = num(key, value)?,
            "p_r" => self.params.p_r = num(key, value)?,
            "kappa_r" => self.params.kappa_r = num(key, value)?,
            "kappa_b" => self.params.kappa_b = num(key, value)?,
            "kappa_e" => self.params.kappa_e = num(key, value)?,
            "bandwidth_w" => self.params.bandwidth_w = num(key, value)?,
            "slot_t" => self.params.slot_t = num(key, value)?,
            "var_ar" => self.params.var_ar = num(key, value)?,
            "var_rb" => self.params.var_rb = num(key, value)?,
            "var_ae" => self.params.var_ae = num(key, value)?,
            "var_re" => self.params.var_re = num(key, value)?,
            "var_rr" => self.params.var_rr = num(key, value)?,
            "rate_s" => self.params.rate_s = num(key, value)?,
            "codeword_len_b" => self.params.codeword_len_b = num(key, value)?,
            "q_values" => self.q_values = parse_q_values(value)?,
            "variants" => self.variants = parse_variants(value)?,
            "n_mc" => self.n_mc = num(key, value)?,
            "n_slots" => self.n_slots = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "strict_region" => self.strict_region = parse_bool(key, value)?,
            "n_workers" => self.n_workers = num(key, value)?,
            "format" => self.format = value.parse()?,
            "out" => self.out = Some(PathBuf::from(value)),
            "grid_check" => self.grid_check = parse_bool(key, value)?,
            "grid_step" => self.grid_step = num(key, value)?,
            other => bail!("unknown key {other:?}"),
        }
        Ok(())
    }

    /// Checks the assembled configuration before a command runs.
    pub fn validate(&self) -> Result<()> {
        self.params
            .validate()
            .map_err(|e| anyhow!("invalid parameters: {e}"))?;
        if self.q_values.is_empty() {
            bail!("q_values is empty");
        }
        if self.variants.is_empty() {
            bail!("variants is empty");
        }
        if self.n_mc == 0 || self.n_slots == 0 {
            bail!("n_mc and n_slots must be positive");
        }
        if !(self.grid_step > 0.0 && self.grid_step <= 1.0) {
            bail!("grid_step must be in (0, 1]");
        }
        Ok(())
    }
}

/// Parses a capacity list: comma-separated entries, each a single value or
/// an inclusive `a..b` range (`"1,2,5..8"` → 1, 2, 5, 6, 7, 8).
pub fn parse_q_values(s: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for token in s.split(',') {
        let token = token.trim();
        if let Some((lo, hi)) = token.split_once("..") {
            let lo: usize = lo
                .trim()
                .parse()
                .map_err(|_| anyhow!("bad range start {lo:?} in q_values"))?;
            let hi: usize = hi
                .trim()
                .parse()
                .map_err(|_| anyhow!("bad range end {hi:?} in q_values"))?;
            if lo < 1 || hi < lo {
                bail!("bad range {token:?} in q_values");
            }
            out.extend(lo..=hi);
        } else {
            let q: usize = token
                .parse()
                .map_err(|_| anyhow!("bad entry {token:?} in q_values"))?;
            if q < 1 {
                bail!("buffer capacity must be ≥ 1");
            }
            out.push(q);
        }
    }
    if out.len() > 10_000 {
        bail!("q_values expands to {} entries; limit is 10000", out.len());
    }
    Ok(out)
}

/// Parses a comma-separated variant list by the stable kebab-case names.
pub fn parse_variants(s: &str) -> Result<Vec<SchemeVariant>> {
    s.split(',')
        .map(|token| {
            let token = token.trim();
            SchemeVariant::ALL
                .iter()
                .copied()
                .find(|v| v.name() == token)
                .ok_or_else(|| {
                    anyhow!(
                        "unknown variant {token:?} (expected one of: {})",
                        SchemeVariant::ALL.map(|v| v.name()).join(", ")
                    )
                })
        })
        .collect()
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" => Ok(true),
        "false" | "0" => Ok(false),
        other => Err(anyhow!("{key}: expected true/false, got {other:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        RunConfig::default().validate().unwrap();
    }

    #[test]
    fn parses_comments_blanks_and_spacing() {
        let mut cfg = RunConfig::default();
        cfg.apply_str(
            "# full-line comment\n\n  seed=99\n n_mc = 1000  # trailing comment\nformat = json\n",
        )
        .unwrap();
        assert_eq!(cfg.seed, 99);
        assert_eq!(cfg.n_mc, 1000);
        assert_eq!(cfg.format, OutputFormat::Json);
    }

    #[test]
    fn unknown_key_is_an_error() {
        let mut cfg = RunConfig::default();
        let err = cfg.apply_str("n_slot = 10\n").unwrap_err();
        assert!(format!("{err:#}").contains("unknown key"), "{err:#}");
    }

    #[test]
    fn snr_db_sets_powers_and_unit_noise() {
        let mut cfg = RunConfig::default();
        cfg.apply_str("snr_db = 20\n").unwrap();
        assert!((cfg.params.p_a - 100.0).abs() < 1e-9);
        assert!((cfg.params.p_r - 100.0).abs() < 1e-9);
        assert!((cfg.params.kappa_r * cfg.params.bandwidth_w - 1.0).abs() < 1e-12);
        assert!((cfg.params.kappa_e * cfg.params.bandwidth_w - 1.0).abs() < 1e-12);
    }

    #[test]
    fn explicit_keys_override_snr_db_in_any_order() {
        let mut first = RunConfig::default();
        first.apply_str("p_r = 3.5\nsnr_db = 20\n").unwrap();
        let mut second = RunConfig::default();
        second.apply_str("snr_db = 20\np_r = 3.5\n").unwrap();
        assert_eq!(first, second);
        assert!((first.params.p_r - 3.5).abs() < 1e-12);
        assert!((first.params.p_a - 100.0).abs() < 1e-9);
    }

    #[test]
    fn q_value_lists_and_ranges() {
        assert_eq!(
            parse_q_values("1,2,5..8,20").unwrap(),
            vec![1, 2, 5, 6, 7, 8, 20]
        );
        assert_eq!(parse_q_values("3").unwrap(), vec![3]);
        assert!(parse_q_values("0").is_err());
        assert!(parse_q_values("5..3").is_err());
        assert!(parse_q_values("a..b").is_err());
    }

    #[test]
    fn variant_lists() {
        let v = parse_variants("proposed, hd-only,bufferless-fd").unwrap();
        assert_eq!(
            v,
            vec![
                SchemeVariant::Proposed,
                SchemeVariant::HdOnly,
                SchemeVariant::BufferlessFd
            ]
        );
        let err = parse_variants("fd-only").unwrap_err();
        assert!(format!("{err}").contains("unknown variant"));
    }

    #[test]
    fn bad_values_name_the_key() {
        let mut cfg = RunConfig::default();
        let err = cfg.apply_str("n_mc = lots\n").unwrap_err();
        assert!(format!("{err:#}").contains("n_mc"), "{err:#}");
        let err = cfg.apply_str("strict_region = yes\n").unwrap_err();
        assert!(format!("{err:#}").contains("strict_region"), "{err:#}");
    }

    #[test]
    fn validation_rejects_empty_sweeps() {
        let mut cfg = RunConfig::default();
        cfg.q_values.clear();
        assert!(cfg.validate().is_err());
        let mut cfg = RunConfig::default();
        cfg.params.p_a = -1.0;
        assert!(cfg.validate().is_err());
    }
}
