use hypwave::verifier::GridSpec;
use serde::Deserialize;
use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

pub const CONFIG_ENV: &str = "HYPWAVE_CONFIG";

/// Config file: every command-line flag has a key of the same name
/// (underscores for dashes), plus the suite-level tables.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub n: Option<usize>,
    pub beta: Option<f64>,
    pub t: Option<f64>,
    pub r: Option<f64>,
    pub s: Option<f64>,
    pub kind: Option<String>,
    pub z_re: Option<f64>,
    pub z_im: Option<f64>,
    pub x: Option<f64>,
    pub nu_re: Option<f64>,
    pub nu_im: Option<f64>,
    pub lambda_max: Option<f64>,
    pub grid_file: Option<PathBuf>,
    pub baseline: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
    pub workers: Option<usize>,
    pub suite: Option<Vec<String>>,
    pub dimensions: Option<Vec<usize>>,
    /// Dimension (as a string key) to β.
    pub beta_overrides: Option<BTreeMap<String, f64>>,
    pub grid: Option<GridSpec>,
    pub tolerances: Option<BTreeMap<String, f64>>,
}

pub fn read_text(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

impl FileConfig {
    /// The file named by HYPWAVE_CONFIG, or the empty config.
    pub fn from_env() -> Result<Self, String> {
        match std::env::var_os(CONFIG_ENV) {
            Some(p) if !p.is_empty() => Self::load(Path::new(&p)),
            _ => Ok(FileConfig::default()),
        }
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = read_text(path)?;
        toml::from_str(&text).map_err(|e| format!("config {}: {e}", path.display()))
    }

    pub fn beta_overrides(&self) -> Result<BTreeMap<usize, f64>, String> {
        let mut out = BTreeMap::new();
        for (k, &v) in self.beta_overrides.iter().flatten() {
            let n: usize = k.parse().map_err(|_| format!("beta_overrides key {k:?} is not a dimension"))?;
            out.insert(n, v);
        }
        Ok(out)
    }
}

/// Grid file in TOML, or JSON when the extension is `.json`.
pub fn load_grid(path: &Path) -> Result<GridSpec, String> {
    let text = read_text(path)?;
    let grid: GridSpec = if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text).map_err(|e| format!("grid file {}: {e}", path.display()))?
    } else {
        toml::from_str(&text).map_err(|e| format!("grid file {}: {e}", path.display()))?
    };
    Ok(grid)
}

pub const BASELINE_FACTOR: &str = "baseline_factor";

/// Factor applied to sup ratios when new baseline ceilings are written.
pub fn baseline_factor(tolerances: Option<&BTreeMap<String, f64>>) -> Result<f64, String> {
    let mut factor = hypwave::verifier::SAFETY_FACTOR;
    for (k, &v) in tolerances.into_iter().flatten() {
        match k.as_str() {
            BASELINE_FACTOR if v >= 1.0 && v.is_finite() => factor = v,
            BASELINE_FACTOR => return Err(format!("{BASELINE_FACTOR} must be a finite number >= 1, got {v}")),
            _ => return Err(format!("unknown tolerance {k:?}")),
        }
    }
    Ok(factor)
}
