//! Run configuration: a flat-sectioned `key = value` text file.
//!
//! The format is deliberately small so that every figure-generating run can
//! be committed as a short, diffable file:
//!
//! * blank lines and lines starting with `#` or `;` are ignored;
//! * `[section]` opens a section; `key = value` assigns within it;
//! * keys and section names are case-sensitive and may appear at most once;
//! * unknown sections and unknown keys are rejected, with line numbers, so a
//!   typo can never be silently interpreted as "use the default".
//!
//! Sections and keys (defaults in parentheses; `*` = required):
//!
//! ```text
//! [system]      m (1.0), omega*, sigma*
//! [bath1]       gamma_bar*, alpha (0.0), beta (required by the commands
//! [bath2]         that evaluate at a fixed temperature)
//! [quadrature]  cutoff (5000), rel_tol (1e-9), abs_tol (1e-14),
//!               max_subdivisions (10000), peak_padding (10)
//! [sweep]       variable = beta1|beta2*, then either
//!                 values = comma list, or min*, max*, count*, scale = linear|log (linear)
//! [critical]    solve_for = beta1|beta2*, bracket_lo (1e-3), bracket_hi (10),
//!               root_tol (1e-6), analytic = none|leading|full (none)
//! [output]      path (stdout), precision (17, significant digits, 2..=17)
//! [oracle]      enable_mc (false), n_traj (400), dt (0.01), t_end (150),
//!               t_burn (25), n_modes (4096), omega_max (70), seed (1)
//! ```

use std::collections::HashMap;
use std::path::PathBuf;

use twobath::oracle::mc::McConfig;
use twobath::{BathParams64, McConfig64, QuadratureConfig64, SystemParams64};

use crate::CliError;

/// Which bath's inverse temperature a sweep or solve refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BathVariable {
    Beta1,
    Beta2,
}

impl BathVariable {
    pub fn name(self) -> &'static str {
        match self {
            BathVariable::Beta1 => "beta1",
            BathVariable::Beta2 => "beta2",
        }
    }
}

/// One bath block. `beta` stays optional at load time: a bath that is swept
/// or solved for never needs a configured temperature, while commands that
/// evaluate at a point demand it explicitly (and name the missing key).
#[derive(Debug, Clone, Copy)]
pub struct BathCfg {
    pub gamma_bar: f64,
    pub alpha: f64,
    pub beta: Option<f64>,
}

impl BathCfg {
    /// Bath parameters at the configured temperature; errors name the
    /// section when `beta` was not given.
    pub fn params(&self, section: &str) -> Result<BathParams64, CliError> {
        let beta = self.beta.ok_or_else(|| {
            CliError::Config(format!(
                "missing key \"beta\" in [{section}] (required by this command)"
            ))
        })?;
        self.params_at(beta)
    }

    /// Bath parameters at an explicit temperature (sweep / solve point).
    pub fn params_at(&self, beta: f64) -> Result<BathParams64, CliError> {
        BathParams64::new(self.gamma_bar, self.alpha, beta)
            .map_err(|e| CliError::Config(e.to_string()))
    }
}

/// Parsed `[sweep]` block with the value list already materialized.
#[derive(Debug, Clone)]
pub struct SweepCfg {
    pub variable: BathVariable,
    pub values: Vec<f64>,
}

/// Truncation order of the optional analytic boundary column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnalyticColumn {
    None,
    Leading,
    Full,
}

/// Parsed `[critical]` block.
#[derive(Debug, Clone, Copy)]
pub struct CriticalCfg {
    pub solve_for: BathVariable,
    pub bracket_lo: f64,
    pub bracket_hi: f64,
    pub root_tol: f64,
    pub analytic: AnalyticColumn,
}

impl Default for CriticalCfg {
    fn default() -> Self {
        Self {
            solve_for: BathVariable::Beta1,
            bracket_lo: 1e-3,
            bracket_hi: 10.0,
            root_tol: 1e-6,
            analytic: AnalyticColumn::None,
        }
    }
}

/// Parsed `[output]` block.
#[derive(Debug, Clone)]
pub struct OutputCfg {
    pub path: Option<PathBuf>,
    /// Significant decimal digits per float field; 17 round-trips `f64`.
    pub precision: usize,
}

impl Default for OutputCfg {
    fn default() -> Self {
        Self {
            path: None,
            precision: 17,
        }
    }
}

/// Parsed `[oracle]` block.
#[derive(Debug, Clone)]
pub struct OracleCfg {
    pub enable_mc: bool,
    pub mc: McConfig64,
}

impl Default for OracleCfg {
    fn default() -> Self {
        Self {
            enable_mc: false,
            mc: McConfig::default(),
        }
    }
}

/// The fully validated configuration for one command invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub system: SystemParams64,
    pub bath1: BathCfg,
    pub bath2: BathCfg,
    pub quadrature: QuadratureConfig64,
    pub sweep: Option<SweepCfg>,
    pub critical: Option<CriticalCfg>,
    pub output: OutputCfg,
    pub oracle: OracleCfg,
}

impl RunConfig {
    /// Parse and validate a configuration file's text.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut ini = Ini::parse(text)?;

        // [system]
        let mut sec = ini.take_section("system")?.ok_or_else(|| {
            CliError::Config("missing required section [system]".to_string())
        })?;
        let m = sec.take_f64("m")?.unwrap_or(1.0);
        let omega = sec.require_f64("omega")?;
        let sigma = sec.require_f64("sigma")?;
        sec.finish()?;
        let system =
            SystemParams64::new(m, omega, sigma).map_err(|e| CliError::Config(e.to_string()))?;

        // [bath1] / [bath2]
        let bath1 = Self::parse_bath(&mut ini, "bath1")?;
        let bath2 = Self::parse_bath(&mut ini, "bath2")?;

        // [quadrature]
        let mut quadrature = QuadratureConfig64::default();
        if let Some(mut sec) = ini.take_section("quadrature")? {
            if let Some(v) = sec.take_f64("cutoff")? {
                sec.check("cutoff", v > 0.0 && v.is_finite(), "must be positive and finite")?;
                quadrature.cutoff = v;
            }
            if let Some(v) = sec.take_f64("rel_tol")? {
                sec.check("rel_tol", v > 0.0 && v.is_finite(), "must be positive and finite")?;
                quadrature.rel_tol = v;
            }
            if let Some(v) = sec.take_f64("abs_tol")? {
                sec.check("abs_tol", v >= 0.0 && v.is_finite(), "must be nonnegative and finite")?;
                quadrature.abs_tol = v;
            }
            if let Some(v) = sec.take_usize("max_subdivisions")? {
                sec.check("max_subdivisions", v >= 1, "must be at least 1")?;
                quadrature.max_subdivisions = v;
            }
            if let Some(v) = sec.take_f64("peak_padding")? {
                sec.check("peak_padding", v >= 0.0 && v.is_finite(), "must be nonnegative and finite")?;
                quadrature.peak_padding = v;
            }
            sec.finish()?;
        }

        // [sweep]
        let sweep = match ini.take_section("sweep")? {
            None => None,
            Some(mut sec) => {
                let variable = sec.require_variable("variable")?;
                let values = Self::parse_sweep_values(&mut sec)?;
                sec.finish()?;
                Some(SweepCfg { variable, values })
            }
        };

        // [critical]
        let critical = match ini.take_section("critical")? {
            None => None,
            Some(mut sec) => {
                let mut cfg = CriticalCfg {
                    solve_for: sec.require_variable("solve_for")?,
                    ..CriticalCfg::default()
                };
                if let Some(v) = sec.take_f64("bracket_lo")? {
                    cfg.bracket_lo = v;
                }
                if let Some(v) = sec.take_f64("bracket_hi")? {
                    cfg.bracket_hi = v;
                }
                sec.check(
                    "bracket_lo",
                    cfg.bracket_lo > 0.0 && cfg.bracket_lo < cfg.bracket_hi && cfg.bracket_hi.is_finite(),
                    "bracket must satisfy 0 < bracket_lo < bracket_hi < inf",
                )?;
                if let Some(v) = sec.take_f64("root_tol")? {
                    sec.check("root_tol", v > 0.0 && v.is_finite(), "must be positive and finite")?;
                    cfg.root_tol = v;
                }
                if let Some(s) = sec.take_string("analytic")? {
                    cfg.analytic = match s.as_str() {
                        "none" => AnalyticColumn::None,
                        "leading" => AnalyticColumn::Leading,
                        "full" => AnalyticColumn::Full,
                        other => {
                            return Err(sec.value_error(
                                "analytic",
                                &format!("expected none, leading or full, got \"{other}\""),
                            ))
                        }
                    };
                }
                sec.finish()?;
                Some(cfg)
            }
        };

        // [output]
        let mut output = OutputCfg::default();
        if let Some(mut sec) = ini.take_section("output")? {
            if let Some(p) = sec.take_string("path")? {
                output.path = Some(PathBuf::from(p));
            }
            if let Some(v) = sec.take_usize("precision")? {
                sec.check(
                    "precision",
                    (2..=17).contains(&v),
                    "significant digits must be in 2..=17",
                )?;
                output.precision = v;
            }
            sec.finish()?;
        }

        // [oracle]
        let mut oracle = OracleCfg::default();
        if let Some(mut sec) = ini.take_section("oracle")? {
            if let Some(v) = sec.take_bool("enable_mc")? {
                oracle.enable_mc = v;
            }
            if let Some(v) = sec.take_usize("n_traj")? {
                oracle.mc.n_traj = v;
            }
            if let Some(v) = sec.take_f64("dt")? {
                oracle.mc.dt = v;
            }
            if let Some(v) = sec.take_f64("t_end")? {
                oracle.mc.t_end = v;
            }
            if let Some(v) = sec.take_f64("t_burn")? {
                oracle.mc.t_burn = v;
            }
            if let Some(v) = sec.take_usize("n_modes")? {
                oracle.mc.n_modes = v;
            }
            if let Some(v) = sec.take_f64("omega_max")? {
                oracle.mc.omega_max = v;
            }
            if let Some(v) = sec.take_u64("seed")? {
                oracle.mc.seed = v;
            }
            sec.finish()?;
            // The remaining MC invariants couple several keys and the system
            // parameters; they are re-validated inside the estimator with
            // specific messages, so no duplication here.
        }

        ini.finish()?;

        // Trigger the bath parameter validation (γ̄ ≥ 0, α ≥ 0) right away,
        // with a placeholder temperature for baths configured without one.
        for (cfg, name) in [(&bath1, "bath1"), (&bath2, "bath2")] {
            cfg.params_at(cfg.beta.unwrap_or(1.0))
                .map_err(|e| match e {
                    CliError::Config(msg) => CliError::Config(format!("[{name}]: {msg}")),
                    other => other,
                })?;
        }

        Ok(Self {
            system,
            bath1,
            bath2,
            quadrature,
            sweep,
            critical,
            output,
            oracle,
        })
    }

    fn parse_bath(ini: &mut Ini, name: &str) -> Result<BathCfg, CliError> {
        let mut sec = ini
            .take_section(name)?
            .ok_or_else(|| CliError::Config(format!("missing required section [{name}]")))?;
        let gamma_bar = sec.require_f64("gamma_bar")?;
        let alpha = sec.take_f64("alpha")?.unwrap_or(0.0);
        let beta = sec.take_f64("beta")?;
        if let Some(b) = beta {
            sec.check("beta", b > 0.0 && b.is_finite(), "must be positive and finite")?;
        }
        sec.finish()?;
        Ok(BathCfg {
            gamma_bar,
            alpha,
            beta,
        })
    }

    /// Either an explicit `values` list or a `min`/`max`/`count` range with
    /// an optional `scale`; exactly one of the two forms must be present.
    fn parse_sweep_values(sec: &mut Section) -> Result<Vec<f64>, CliError> {
        let values = sec.take_string("values")?;
        let min = sec.take_f64("min")?;
        let max = sec.take_f64("max")?;
        let count = sec.take_usize("count")?;
        let scale = sec.take_string("scale")?;

        match (values, min, max, count) {
            (Some(list), None, None, None) => {
                if scale.is_some() {
                    return Err(sec.value_error("scale", "only applies to min/max/count sweeps"));
                }
                let mut out = Vec::new();
                for piece in list.split(',') {
                    let piece = piece.trim();
                    if piece.is_empty() {
                        return Err(sec.value_error("values", "empty entry in the list"));
                    }
                    let v: f64 = piece.parse().map_err(|_| {
                        sec.value_error("values", &format!("cannot parse \"{piece}\" as a number"))
                    })?;
                    if !(v > 0.0) || !v.is_finite() {
                        return Err(sec.value_error(
                            "values",
                            &format!("inverse temperatures must be positive and finite, got {v}"),
                        ));
                    }
                    out.push(v);
                }
                if out.is_empty() {
                    return Err(sec.value_error("values", "the sweep list is empty"));
                }
                Ok(out)
            }
            (None, Some(lo), Some(hi), Some(n)) => {
                if !(lo > 0.0 && lo < hi) || !hi.is_finite() {
                    return Err(sec.value_error("min", "need 0 < min < max < inf"));
                }
                if n < 2 {
                    return Err(sec.value_error(
                        "count",
                        "a range needs at least 2 points (use values= for a single point)",
                    ));
                }
                let log = match scale.as_deref() {
                    None | Some("linear") => false,
                    Some("log") => true,
                    Some(other) => {
                        return Err(sec.value_error(
                            "scale",
                            &format!("expected linear or log, got \"{other}\""),
                        ))
                    }
                };
                let mut out = Vec::with_capacity(n);
                for i in 0..n {
                    let t = i as f64 / (n - 1) as f64;
                    let v = if log {
                        (lo.ln() + t * (hi.ln() - lo.ln())).exp()
                    } else {
                        lo + t * (hi - lo)
                    };
                    out.push(v);
                }
                // Pin the endpoints exactly; interpolation noise must not
                // leak into the output table.
                out[0] = lo;
                out[n - 1] = hi;
                Ok(out)
            }
            (Some(_), _, _, _) => Err(CliError::Config(format!(
                "[{}]: give either values= or the min/max/count range, not both",
                sec.name
            ))),
            _ => Err(CliError::Config(format!(
                "[{}]: need either values= or all of min=, max=, count=",
                sec.name
            ))),
        }
    }
}

/// Raw parsed file: section name → (header line, key → (value, line)).
struct Ini {
    sections: HashMap<String, (usize, HashMap<String, (String, usize)>)>,
}

impl Ini {
    fn parse(text: &str) -> Result<Self, CliError> {
        let mut sections: HashMap<String, (usize, HashMap<String, (String, usize)>)> =
            HashMap::new();
        let mut current: Option<String> = None;

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest.strip_suffix(']').ok_or_else(|| {
                    CliError::Config(format!("line {line_no}: unterminated section header"))
                })?;
                let name = name.trim();
                if name.is_empty() {
                    return Err(CliError::Config(format!(
                        "line {line_no}: empty section name"
                    )));
                }
                if let Some((first, _)) = sections.get(name) {
                    return Err(CliError::Config(format!(
                        "line {line_no}: duplicate section [{name}] (first at line {first})"
                    )));
                }
                sections.insert(name.to_string(), (line_no, HashMap::new()));
                current = Some(name.to_string());
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Config(format!(
                    "line {line_no}: expected [section] or key = value, got \"{line}\""
                )));
            };
            let key = key.trim();
            let value = value.trim();
            if key.is_empty() {
                return Err(CliError::Config(format!("line {line_no}: empty key")));
            }
            let Some(section) = &current else {
                return Err(CliError::Config(format!(
                    "line {line_no}: key \"{key}\" before any [section]"
                )));
            };
            let entries = &mut sections.get_mut(section).unwrap().1;
            if let Some((_, first)) = entries.get(key) {
                return Err(CliError::Config(format!(
                    "line {line_no}: duplicate key \"{key}\" in [{section}] (first at line {first})"
                )));
            }
            entries.insert(key.to_string(), (value.to_string(), line_no));
        }

        Ok(Self { sections })
    }

    /// Remove a section for typed consumption; `None` when absent.
    fn take_section(&mut self, name: &str) -> Result<Option<Section>, CliError> {
        Ok(self.sections.remove(name).map(|(_, entries)| Section {
            name: name.to_string(),
            entries,
        }))
    }

    /// Reject any section no command knows about.
    fn finish(self) -> Result<(), CliError> {
        if let Some((name, (line, _))) = self
            .sections
            .into_iter()
            .min_by_key(|(_, (line, _))| *line)
        {
            return Err(CliError::Config(format!(
                "line {line}: unknown section [{name}]"
            )));
        }
        Ok(())
    }
}

/// One section's entries with typed, consuming accessors.
struct Section {
    name: String,
    entries: HashMap<String, (String, usize)>,
}

impl Section {
    fn take_raw(&mut self, key: &str) -> Option<(String, usize)> {
        self.entries.remove(key)
    }

    fn value_error(&self, key: &str, msg: &str) -> CliError {
        CliError::Config(format!("key \"{key}\" in [{}]: {msg}", self.name))
    }

    fn check(&self, key: &str, ok: bool, msg: &str) -> Result<(), CliError> {
        if ok {
            Ok(())
        } else {
            Err(self.value_error(key, msg))
        }
    }

    fn take_string(&mut self, key: &str) -> Result<Option<String>, CliError> {
        Ok(self.take_raw(key).map(|(v, _)| v))
    }

    fn take_f64(&mut self, key: &str) -> Result<Option<f64>, CliError> {
        match self.take_raw(key) {
            None => Ok(None),
            Some((v, line)) => v.parse::<f64>().map(Some).map_err(|_| {
                CliError::Config(format!(
                    "line {line}: key \"{key}\" in [{}]: cannot parse \"{v}\" as a number",
                    self.name
                ))
            }),
        }
    }

    fn take_usize(&mut self, key: &str) -> Result<Option<usize>, CliError> {
        match self.take_raw(key) {
            None => Ok(None),
            Some((v, line)) => v.parse::<usize>().map(Some).map_err(|_| {
                CliError::Config(format!(
                    "line {line}: key \"{key}\" in [{}]: cannot parse \"{v}\" as a nonnegative integer",
                    self.name
                ))
            }),
        }
    }

    fn take_u64(&mut self, key: &str) -> Result<Option<u64>, CliError> {
        match self.take_raw(key) {
            None => Ok(None),
            Some((v, line)) => v.parse::<u64>().map(Some).map_err(|_| {
                CliError::Config(format!(
                    "line {line}: key \"{key}\" in [{}]: cannot parse \"{v}\" as an unsigned integer",
                    self.name
                ))
            }),
        }
    }

    fn take_bool(&mut self, key: &str) -> Result<Option<bool>, CliError> {
        match self.take_raw(key) {
            None => Ok(None),
            Some((v, line)) => match v.as_str() {
                "true" => Ok(Some(true)),
                "false" => Ok(Some(false)),
                other => Err(CliError::Config(format!(
                    "line {line}: key \"{key}\" in [{}]: expected true or false, got \"{other}\"",
                    self.name
                ))),
            },
        }
    }

    fn require_f64(&mut self, key: &str) -> Result<f64, CliError> {
        self.take_f64(key)?.ok_or_else(|| {
            CliError::Config(format!("missing key \"{key}\" in [{}]", self.name))
        })
    }

    fn require_variable(&mut self, key: &str) -> Result<BathVariable, CliError> {
        let (v, line) = self.take_raw(key).ok_or_else(|| {
            CliError::Config(format!("missing key \"{key}\" in [{}]", self.name))
        })?;
        match v.as_str() {
            "beta1" => Ok(BathVariable::Beta1),
            "beta2" => Ok(BathVariable::Beta2),
            other => Err(CliError::Config(format!(
                "line {line}: key \"{key}\" in [{}]: expected beta1 or beta2, got \"{other}\"",
                self.name
            ))),
        }
    }

    /// Reject leftover (unknown) keys, pointing at the earliest one.
    fn finish(self) -> Result<(), CliError> {
        if let Some((key, (_, line))) = self
            .entries
            .into_iter()
            .min_by_key(|(_, (_, line))| *line)
        {
            return Err(CliError::Config(format!(
                "line {line}: unknown key \"{key}\" in [{}]",
                self.name
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "\
[system]
omega = 5
sigma = 24
[bath1]
gamma_bar = 0.005
beta = 0.1
[bath2]
gamma_bar = 0.25
beta = 1.5
";

    #[test]
    fn minimal_config_gets_all_defaults() {
        let cfg = RunConfig::parse(MINIMAL).unwrap();
        assert_eq!(cfg.system.mass(), 1.0);
        assert_eq!(cfg.system.omega(), 5.0);
        assert_eq!(cfg.quadrature.cutoff, 5000.0);
        assert_eq!(cfg.output.precision, 17);
        assert!(!cfg.oracle.enable_mc);
        assert_eq!(cfg.oracle.mc.seed, 1);
        assert!(cfg.sweep.is_none());
        assert!(cfg.critical.is_none());
    }

    #[test]
    fn missing_required_key_names_key_and_section() {
        let text = MINIMAL.replace("omega = 5\n", "");
        let err = RunConfig::parse(&text).unwrap_err().to_string();
        assert!(err.contains("missing key \"omega\" in [system]"), "{err}");
    }

    #[test]
    fn unknown_key_is_rejected_with_line_number() {
        let text = format!("{MINIMAL}[output]\nprecison = 9\n");
        let err = RunConfig::parse(&text).unwrap_err().to_string();
        assert!(err.contains("unknown key \"precison\" in [output]"), "{err}");
        assert!(err.contains("line 11"), "{err}");
    }

    #[test]
    fn unknown_section_is_rejected() {
        let text = format!("{MINIMAL}[outputs]\npath = x.csv\n");
        let err = RunConfig::parse(&text).unwrap_err().to_string();
        assert!(err.contains("unknown section [outputs]"), "{err}");
    }

    #[test]
    fn duplicate_key_is_rejected() {
        let text = MINIMAL.replace("sigma = 24\n", "sigma = 24\nsigma = 23\n");
        let err = RunConfig::parse(&text).unwrap_err().to_string();
        assert!(err.contains("duplicate key \"sigma\""), "{err}");
    }

    #[test]
    fn sweep_range_is_inclusive_and_log_scale_works() {
        let text = format!(
            "{MINIMAL}[sweep]\nvariable = beta1\nmin = 0.01\nmax = 3\ncount = 5\nscale = log\n"
        );
        let cfg = RunConfig::parse(&text).unwrap();
        let sweep = cfg.sweep.unwrap();
        assert_eq!(sweep.variable, BathVariable::Beta1);
        assert_eq!(sweep.values.len(), 5);
        assert_eq!(sweep.values[0], 0.01);
        assert_eq!(sweep.values[4], 3.0);
        let ratio0 = sweep.values[1] / sweep.values[0];
        let ratio1 = sweep.values[2] / sweep.values[1];
        assert!((ratio0 / ratio1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sweep_values_list_and_range_are_mutually_exclusive() {
        let text = format!(
            "{MINIMAL}[sweep]\nvariable = beta2\nvalues = 1,2\nmin = 1\nmax = 2\ncount = 2\n"
        );
        let err = RunConfig::parse(&text).unwrap_err().to_string();
        assert!(err.contains("not both"), "{err}");
    }

    #[test]
    fn empty_sweep_values_list_is_a_usage_error() {
        let text = format!("{MINIMAL}[sweep]\nvariable = beta1\nvalues = \n");
        let err = RunConfig::parse(&text).unwrap_err().to_string();
        assert!(err.contains("values"), "{err}");
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = format!("# leading comment\n; alt comment\n\n{MINIMAL}");
        assert!(RunConfig::parse(&text).is_ok());
    }

    #[test]
    fn precision_out_of_range_is_rejected() {
        let text = format!("{MINIMAL}[output]\nprecision = 18\n");
        let err = RunConfig::parse(&text).unwrap_err().to_string();
        assert!(err.contains("precision"), "{err}");
    }
}
