//! JSON run configuration.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::Deserialize;
use toeplitz_spectra::analysis::ReportOptions;
use toeplitz_spectra::linalg::DEFAULT_MAX_SWEEPS;
use toeplitz_spectra::operators::SectionKind;
use toeplitz_spectra::spectra::{DetectOptions, Region};
use toeplitz_spectra::symbol::HarmonicSymbol;

use crate::CliError;

/// A Fourier coefficient written as a real number or an `[re, im]` pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficient(pub Complex64);

impl<'de> Deserialize<'de> for Coefficient {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct CoefficientVisitor;

        impl<'de> Visitor<'de> for CoefficientVisitor {
            type Value = Coefficient;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a real number or an [re, im] pair")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Coefficient, E> {
                Ok(Coefficient(Complex64::new(v, 0.0)))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Coefficient, E> {
                Ok(Coefficient(Complex64::new(v as f64, 0.0)))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Coefficient, E> {
                Ok(Coefficient(Complex64::new(v as f64, 0.0)))
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Coefficient, A::Error> {
                let re: f64 = seq.next_element()?.ok_or_else(|| de::Error::invalid_length(0, &self))?;
                let im: f64 = seq.next_element()?.ok_or_else(|| de::Error::invalid_length(1, &self))?;
                if seq.next_element::<de::IgnoredAny>()?.is_some() {
                    return Err(de::Error::invalid_length(3, &self));
                }
                Ok(Coefficient(Complex64::new(re, im)))
            }
        }

        deserializer.deserialize_any(CoefficientVisitor)
    }
}

/// `φ = conj(g) + f` with `f[k]`, `g[k]` the coefficients of `z^k`.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolSpec {
    #[serde(default)]
    pub f: Vec<Coefficient>,
    #[serde(default)]
    pub g: Vec<Coefficient>,
}

impl SymbolSpec {
    pub fn to_symbol(&self) -> HarmonicSymbol {
        let f: Vec<Complex64> = self.f.iter().map(|c| c.0).collect();
        let g: Vec<Complex64> = self.g.iter().map(|c| c.0).collect();
        HarmonicSymbol::from_parts(&f, &g)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Ht,
    #[default]
    Bt,
}

impl From<Kind> for SectionKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Ht => SectionKind::Hardy,
            Kind::Bt => SectionKind::Bergman,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Grid { nx: 64, ny: 64 }
    }
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub delta_curve: Option<f64>,
    pub drift_tol: Option<f64>,
    pub cert_tol: Option<f64>,
    pub series_tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Growth {
    pub order: usize,
    pub samples: usize,
}

impl Default for Growth {
    fn default() -> Self {
        let d = ReportOptions::default();
        Growth {
            order: d.growth_order,
            samples: d.growth_samples,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionSpec {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

fn default_ladder() -> Vec<usize> {
    ReportOptions::default().ladder
}

fn default_epsilon() -> f64 {
    ReportOptions::default().epsilon
}

fn default_sweeps() -> usize {
    DEFAULT_MAX_SWEEPS
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub symbol: Option<SymbolSpec>,
    /// JSON file holding a `symbol` object, relative to the config file.
    pub symbol_file: Option<PathBuf>,
    #[serde(default = "default_ladder")]
    pub ladder: Vec<usize>,
    #[serde(default)]
    pub kind: Kind,
    /// Section order for `pseudospectrum`; defaults to the largest rung.
    pub order: Option<usize>,
    pub region: Option<RegionSpec>,
    #[serde(default)]
    pub grid: Grid,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default = "default_sweeps")]
    pub max_sweeps: usize,
    pub curve_samples: Option<usize>,
    #[serde(default)]
    pub growth: Growth,
    pub output_dir: Option<PathBuf>,
}

/// Validated configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub symbol: HarmonicSymbol,
    pub ladder: Vec<usize>,
    pub kind: Kind,
    pub order: usize,
    pub region: Region,
    pub grid: Grid,
    pub epsilon: f64,
    pub tolerances: Tolerances,
    pub max_sweeps: usize,
    pub curve_samples: Option<usize>,
    pub growth: Growth,
    pub output_dir: PathBuf,
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, origin: &str) -> Result<T, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path.is_empty() || path == "." {
            CliError::Usage(format!("{origin}: {inner}"))
        } else {
            CliError::Usage(format!("{origin}: field `{path}`: {inner}"))
        }
    })
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}

fn positive(name: &str, value: Option<f64>) -> Result<(), CliError> {
    match value {
        Some(v) if !(v > 0.0 && v.is_finite()) => Err(CliError::Usage(format!("`{name}` must be positive, got {v}"))),
        _ => Ok(()),
    }
}

impl RunConfig {
    pub fn load(path: &Path, out_override: Option<&Path>) -> Result<Self, CliError> {
        let text = read(path)?;
        let raw: RawConfig = parse_json(&text, &path.display().to_string())?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::from_raw(raw, base, out_override)
    }

    pub fn from_raw(raw: RawConfig, base: &Path, out_override: Option<&Path>) -> Result<Self, CliError> {
        let spec = match (raw.symbol, raw.symbol_file) {
            (Some(_), Some(_)) => return Err(CliError::Usage("give either `symbol` or `symbol_file`, not both".into())),
            (None, None) => return Err(CliError::Usage("missing `symbol` (or `symbol_file`)".into())),
            (Some(s), None) => s,
            (None, Some(file)) => {
                let full = base.join(&file);
                parse_json::<SymbolSpec>(&read(&full)?, &full.display().to_string())?
            }
        };
        let symbol = spec.to_symbol();

        if raw.ladder.is_empty() {
            return Err(CliError::Usage("`ladder` must not be empty".into()));
        }
        if raw.ladder[0] == 0 || raw.ladder.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::Usage(format!("`ladder` must be strictly increasing positive orders, got {:?}", raw.ladder)));
        }
        positive("epsilon", Some(raw.epsilon))?;
        positive("tolerances.delta_curve", raw.tolerances.delta_curve)?;
        positive("tolerances.drift_tol", raw.tolerances.drift_tol)?;
        positive("tolerances.cert_tol", raw.tolerances.cert_tol)?;
        positive("tolerances.series_tol", raw.tolerances.series_tol)?;
        if raw.grid.nx < 2 || raw.grid.ny < 2 {
            return Err(CliError::Usage(format!("`grid` needs nx, ny >= 2, got {} x {}", raw.grid.nx, raw.grid.ny)));
        }
        let order = raw.order.unwrap_or(*raw.ladder.last().unwrap());
        if order == 0 {
            return Err(CliError::Usage("`order` must be positive".into()));
        }
        let region = match raw.region {
            Some(r) => Region {
                re_min: r.re_min,
                re_max: r.re_max,
                im_min: r.im_min,
                im_max: r.im_max,
            },
            None => Region::around(symbol.coeff(0), 1.25 * symbol.wiener_norm().max(1.0)),
        };
        if region.is_empty() {
            return Err(CliError::Usage(format!("`region` is empty: {region:?}")));
        }
        let output_dir = match (out_override, raw.output_dir) {
            (Some(o), _) => o.to_path_buf(),
            (None, Some(d)) => base.join(d),
            (None, None) => PathBuf::from("."),
        };
        Ok(RunConfig {
            symbol,
            ladder: raw.ladder,
            kind: raw.kind,
            order,
            region,
            grid: raw.grid,
            epsilon: raw.epsilon,
            tolerances: raw.tolerances,
            max_sweeps: raw.max_sweeps,
            curve_samples: raw.curve_samples,
            growth: raw.growth,
            output_dir,
        })
    }

    pub fn detect_options(&self) -> DetectOptions {
        DetectOptions {
            delta_curve: self.tolerances.delta_curve,
            drift_tol: self.tolerances.drift_tol,
            cert_tol: self.tolerances.cert_tol,
            max_sweeps: self.max_sweeps,
            curve_samples: self.curve_samples,
        }
    }

    pub fn series_tol(&self) -> f64 {
        self.tolerances.series_tol.unwrap_or(ReportOptions::default().series_tol)
    }

    pub fn report_options(&self) -> ReportOptions {
        ReportOptions {
            ladder: self.ladder.clone(),
            epsilon: self.epsilon,
            series_tol: self.series_tol(),
            detect: self.detect_options(),
            growth_order: self.growth.order,
            growth_samples: self.growth.samples,
        }
    }
}
