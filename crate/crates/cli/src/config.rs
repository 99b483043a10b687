use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use ffratios::conjecture::{Truncation, DEFAULT_TOLERANCE};
use ffratios::ensemble::{EnsembleSpec, OutputFormat, SampleMode};
use ffratios::FieldParams;

use crate::CliError;

/// Flags shared by every subcommand. All are optional so that a config
/// file can fill the gaps; flags given on the command line win.
#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// Field size, a prime with q = 1 mod 4.
    #[arg(long, global = true)]
    pub q: Option<u64>,
    /// Genus; the family is H_{2g+1}.
    #[arg(long, global = true)]
    pub g: Option<usize>,
    /// `exhaustive` or `sample:<count>`.
    #[arg(long, global = true)]
    pub mode: Option<String>,
    /// Seed for sampled runs and random test data.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (0 = all cores). Never changes the output.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Absolute tolerance for truncated Euler products.
    #[arg(long = "trunc-tol", global = true)]
    pub trunc_tol: Option<f64>,
    /// `csv` or `json`.
    #[arg(long, global = true)]
    pub format: Option<String>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// File of `key = value` lines supplying defaults for the flags above.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

/// The validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub field: FieldParams,
    pub g: usize,
    pub mode: SampleMode,
    pub threads: usize,
    pub trunc_tol: f64,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn seed(&self) -> u64 {
        self.mode.seed().unwrap_or(0)
    }

    pub fn truncation(&self) -> Truncation {
        Truncation::Tolerance(self.trunc_tol)
    }

    pub fn spec(&self) -> Result<EnsembleSpec, CliError> {
        Ok(EnsembleSpec::new(self.field, self.g, self.mode)?.with_threads(self.threads))
    }

    pub fn spec_for_genus(&self, g: usize) -> Result<EnsembleSpec, CliError> {
        Ok(EnsembleSpec::new(self.field, g, self.mode)?.with_threads(self.threads))
    }
}

fn read_config(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::Usage(format!(
                "{}:{}: expected `key = value`",
                path.display(),
                lineno + 1
            )));
        };
        let key = k.trim().replace('-', "_");
        if !matches!(
            key.as_str(),
            "q" | "g" | "mode" | "seed" | "threads" | "trunc_tol" | "format" | "out"
        ) {
            return Err(CliError::Usage(format!(
                "{}:{}: unknown key {key:?}",
                path.display(),
                lineno + 1
            )));
        }
        map.insert(key, v.trim().to_string());
    }
    Ok(map)
}

fn from_file<T: std::str::FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<Option<T>, CliError> {
    map.get(key)
        .map(|v| {
            v.parse::<T>()
                .map_err(|_| CliError::Usage(format!("config value for {key} is invalid: {v:?}")))
        })
        .transpose()
}

impl GlobalArgs {
    /// Merges the config file under the flags, applies defaults and
    /// validates against the library preconditions.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let file = match &self.config {
            Some(p) => read_config(p)?,
            None => BTreeMap::new(),
        };
        let q = match self.q {
            Some(q) => q,
            None => from_file(&file, "q")?.unwrap_or(5),
        };
        let g = match self.g {
            Some(g) => g,
            None => from_file(&file, "g")?.unwrap_or(2),
        };
        let mode_text = match &self.mode {
            Some(m) => m.clone(),
            None => file.get("mode").cloned().unwrap_or_else(|| "exhaustive".into()),
        };
        let seed = match self.seed {
            Some(s) => s,
            None => from_file(&file, "seed")?.unwrap_or(0),
        };
        let threads = match self.threads {
            Some(t) => t,
            None => from_file(&file, "threads")?.unwrap_or(0),
        };
        let trunc_tol = match self.trunc_tol {
            Some(t) => t,
            None => from_file(&file, "trunc_tol")?.unwrap_or(DEFAULT_TOLERANCE),
        };
        let format_text = match &self.format {
            Some(f) => f.clone(),
            None => file.get("format").cloned().unwrap_or_else(|| "csv".into()),
        };
        let out = self.out.clone().or_else(|| file.get("out").map(PathBuf::from));

        let mode = match mode_text
            .parse::<SampleMode>()
            .map_err(|e| CliError::Usage(e.to_string()))?
        {
            SampleMode::Sampled { count, .. } => SampleMode::Sampled { count, seed },
            SampleMode::Exhaustive => SampleMode::Exhaustive,
        };
        let format = format_text
            .parse::<OutputFormat>()
            .map_err(|e| CliError::Usage(e.to_string()))?;
        if !(trunc_tol > 0.0) || !trunc_tol.is_finite() {
            return Err(CliError::Usage(format!("--trunc-tol must be positive, got {trunc_tol}")));
        }
        let field = FieldParams::new(q)?;
        if g == 0 {
            return Err(ffratios::Error::InvalidArgument("genus must be at least 1".into()).into());
        }
        Ok(RunConfig {
            field,
            g,
            mode,
            threads,
            trunc_tol,
            format,
            out,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn flags_override_config_file() {
        let dir = std::env::temp_dir().join(format!("ffratios-cfg-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.cfg");
        let mut f = fs::File::create(&path).unwrap();
        writeln!(f, "# reference run\nq = 13\ng = 3\nmode = sample:50\nseed = 9\nformat = json").unwrap();
        let args = GlobalArgs {
            g: Some(1),
            config: Some(path.clone()),
            ..Default::default()
        };
        let cfg = args.resolve().unwrap();
        assert_eq!(cfg.field.q(), 13);
        assert_eq!(cfg.g, 1);
        assert_eq!(cfg.mode, SampleMode::Sampled { count: 50, seed: 9 });
        assert_eq!(cfg.format, OutputFormat::Json);
        fs::write(&path, "colour = red\n").unwrap();
        assert!(matches!(args.resolve(), Err(CliError::Usage(_))));
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn invalid_field_is_a_precondition_error() {
        let args = GlobalArgs {
            q: Some(7),
            ..Default::default()
        };
        assert!(matches!(args.resolve(), Err(CliError::Precondition(_))));
    }
}
