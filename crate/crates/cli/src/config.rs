//! Scenario files: INI with `[model]`, `[feedback]`, `[initial]` and `[run]`
//! sections. Every key is required, unknown sections and keys are errors,
//! and `A`, `beta` and `theta` also accept `pi`, `pi/2`, `pi/3`, `pi/4`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, PI};
use std::path::Path;

use ini::Ini;
use qfl_core::dynamics::{InitialStateSpec, StepConfig};
use qfl_core::model::{FeedbackParams, QubitModelParams};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSection {
    pub t_max: f64,
    /// Integrator step.
    pub dt: f64,
    /// Emit a row every this many steps.
    pub output_every: usize,
}

impl RunSection {
    /// `0, h, 2h, …` up to `t_max` with `h = dt · output_every`.
    pub fn output_times(&self) -> Vec<f64> {
        let h = self.dt * self.output_every as f64;
        let n = (self.t_max / h + 1e-9).floor() as usize;
        (0..=n).map(|k| k as f64 * h).collect()
    }

    pub fn step(&self) -> StepConfig {
        StepConfig::new(self.dt).expect("dt validated at parse time")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioConfig {
    pub model: QubitModelParams,
    pub feedback: FeedbackParams,
    pub initial: InitialStateSpec,
    pub run: RunSection,
}

impl Default for ScenarioConfig {
    /// No feedback, no drive, `γ = 0.1`, equal-weight superposition.
    fn default() -> Self {
        Self {
            model: QubitModelParams { gamma: 0.1, omega: 0.0 },
            feedback: FeedbackParams::off(),
            initial: InitialStateSpec::equal_superposition(),
            run: RunSection { t_max: 50.0, dt: 0.01, output_every: 100 },
        }
    }
}

const SECTIONS: &[(&str, &[&str])] = &[
    ("model", &["gamma", "omega"]),
    ("feedback", &["A", "beta"]),
    ("initial", &["kind", "theta", "epsilon"]),
    ("run", &["t_max", "dt", "output_every"]),
];

/// Real number or one of the `pi` literals.
pub fn parse_angle(s: &str) -> Option<f64> {
    match s.trim() {
        "pi" => Some(PI),
        "pi/2" => Some(FRAC_PI_2),
        "pi/3" => Some(FRAC_PI_3),
        "pi/4" => Some(FRAC_PI_4),
        other => parse_real(other),
    }
}

fn parse_real(s: &str) -> Option<f64> {
    s.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

struct Reader<'a> {
    ini: &'a Ini,
}

impl Reader<'_> {
    fn raw(&self, section: &str, key: &str) -> Result<&str, CliError> {
        self.ini
            .section(Some(section))
            .and_then(|p| p.get(key))
            .ok_or_else(|| CliError::config(format!("[{section}] {key}"), "missing"))
    }

    fn real(&self, section: &str, key: &str) -> Result<f64, CliError> {
        let v = self.raw(section, key)?;
        parse_real(v).ok_or_else(|| CliError::config(format!("[{section}] {key}"), format!("not a finite number: {v:?}")))
    }

    fn angle(&self, section: &str, key: &str) -> Result<f64, CliError> {
        let v = self.raw(section, key)?;
        parse_angle(v).ok_or_else(|| CliError::config(format!("[{section}] {key}"), format!("not an angle: {v:?}")))
    }
}

fn check_layout(ini: &Ini, kind: Option<&str>) -> Result<(), CliError> {
    for (name, props) in ini.iter() {
        let Some(name) = name else {
            if let Some((k, _)) = props.iter().next() {
                return Err(CliError::config(k, "key outside any section"));
            }
            continue;
        };
        let Some((_, allowed)) = SECTIONS.iter().find(|(s, _)| *s == name) else {
            return Err(CliError::config(format!("[{name}]"), "unknown section"));
        };
        if ini.section_all(Some(name)).count() > 1 {
            return Err(CliError::config(format!("[{name}]"), "section appears more than once"));
        }
        for (k, _) in props.iter() {
            if !allowed.contains(&k) {
                return Err(CliError::config(format!("[{name}] {k}"), "unknown key"));
            }
            if props.get_all(k).count() > 1 {
                return Err(CliError::config(format!("[{name}] {k}"), "duplicate key"));
            }
        }
    }
    // The initial-state key that does not belong to the chosen kind is an
    // error rather than silently ignored.
    let stray = match kind {
        Some("pure") => Some("epsilon"),
        Some("mixed") => Some("theta"),
        _ => None,
    };
    if let Some(k) = stray {
        if ini.section(Some("initial")).is_some_and(|p| p.contains_key(k)) {
            return Err(CliError::config(format!("[initial] {k}"), format!("not used by kind {}", kind.unwrap())));
        }
    }
    Ok(())
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let ini = Ini::load_from_str(text).map_err(|e| CliError::config("<file>", e.to_string()))?;
        let r = Reader { ini: &ini };
        let kind = ini.section(Some("initial")).and_then(|p| p.get("kind"));
        check_layout(&ini, kind)?;

        let gamma = r.real("model", "gamma")?;
        let omega = r.real("model", "omega")?;
        let model = QubitModelParams::new(gamma, omega).map_err(|e| key_error("model", e))?;
        let feedback = FeedbackParams::new(r.angle("feedback", "A")?, r.angle("feedback", "beta")?)
            .map_err(|e| key_error("feedback", e))?;

        let initial = match r.raw("initial", "kind")?.trim() {
            "pure" => InitialStateSpec::Pure { theta: r.angle("initial", "theta")? },
            "mixed" => InitialStateSpec::Mixed { epsilon: r.real("initial", "epsilon")? },
            other => return Err(CliError::config("[initial] kind", format!("expected pure or mixed, got {other:?}"))),
        };
        initial.to_density().map_err(|e| key_error("initial", e))?;

        let t_max = r.real("run", "t_max")?;
        if t_max < 0.0 {
            return Err(CliError::config("[run] t_max", "must be >= 0"));
        }
        let dt = r.real("run", "dt")?;
        if dt <= 0.0 {
            return Err(CliError::config("[run] dt", "must be > 0"));
        }
        let every = r.raw("run", "output_every")?;
        let output_every = every
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| CliError::config("[run] output_every", format!("not a positive integer: {every:?}")))?;

        Ok(Self { model, feedback, initial, run: RunSection { t_max, dt, output_every } })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| CliError::Input { path: path.to_path_buf(), source })?;
        Self::parse(&text)
    }

    /// INI text that [`ScenarioConfig::parse`] maps back to `self` exactly;
    /// reals use the shortest representation that round-trips.
    pub fn dump(&self) -> String {
        let mut ini = Ini::new();
        ini.with_section(Some("model"))
            .set("gamma", real(self.model.gamma))
            .set("omega", real(self.model.omega));
        ini.with_section(Some("feedback"))
            .set("A", real(self.feedback.a))
            .set("beta", real(self.feedback.beta));
        match self.initial {
            InitialStateSpec::Pure { theta } => {
                ini.with_section(Some("initial")).set("kind", "pure").set("theta", real(theta));
            }
            InitialStateSpec::Mixed { epsilon } => {
                ini.with_section(Some("initial")).set("kind", "mixed").set("epsilon", real(epsilon));
            }
        }
        ini.with_section(Some("run"))
            .set("t_max", real(self.run.t_max))
            .set("dt", real(self.run.dt))
            .set("output_every", self.run.output_every.to_string());
        let mut out = Vec::new();
        ini.write_to(&mut out).expect("writing to a Vec cannot fail");
        String::from_utf8(out).expect("ini output is UTF-8")
    }
}

fn real(v: f64) -> String {
    format!("{v:?}")
}

fn key_error(section: &str, e: qfl_core::Error) -> CliError {
    match e {
        qfl_core::Error::InvalidParameter { name, reason } => CliError::config(format!("[{section}] {name}"), reason),
        other => CliError::config(format!("[{section}]"), other.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# feedback at a third of pi
[model]
gamma = 0.1
omega = 0

[feedback]
A = pi/3
beta = 0

[initial]
kind = pure
theta = pi/4

[run]
t_max = 20
dt = 0.01
output_every = 50
";

    #[test]
    fn parses_sample() {
        let c = ScenarioConfig::parse(SAMPLE).unwrap();
        assert_eq!(c.feedback.a, FRAC_PI_3);
        assert_eq!(c.initial, InitialStateSpec::Pure { theta: FRAC_PI_4 });
        assert_eq!(c.run.output_times().len(), 41);
        assert_eq!(c.run.output_times()[40], 20.0);
    }

    #[test]
    fn dump_round_trips() {
        let c = ScenarioConfig::parse(SAMPLE).unwrap();
        assert_eq!(ScenarioConfig::parse(&c.dump()).unwrap(), c);
        let d = ScenarioConfig::default();
        assert_eq!(ScenarioConfig::parse(&d.dump()).unwrap(), d);
        let mixed = ScenarioConfig { initial: InitialStateSpec::Mixed { epsilon: 0.3 }, ..d };
        assert_eq!(ScenarioConfig::parse(&mixed.dump()).unwrap(), mixed);
    }

    fn err_key(text: &str) -> String {
        match ScenarioConfig::parse(text) {
            Err(CliError::Config { key, .. }) => key,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_unknown_and_missing_keys() {
        assert_eq!(err_key(&SAMPLE.replace("omega = 0", "omega = 0\ndelta = 1")), "[model] delta");
        assert_eq!(err_key(&SAMPLE.replace("beta = 0\n", "")), "[feedback] beta");
        assert_eq!(err_key(&format!("{SAMPLE}\n[extra]\nx = 1\n")), "[extra]");
        assert_eq!(err_key(&SAMPLE.replace("theta = pi/4", "theta = pi/4\nepsilon = 0.2")), "[initial] epsilon");
    }

    #[test]
    fn rejects_bad_values() {
        assert_eq!(err_key(&SAMPLE.replace("gamma = 0.1", "gamma = -1")), "[model] gamma");
        assert_eq!(err_key(&SAMPLE.replace("dt = 0.01", "dt = 0")), "[run] dt");
        assert_eq!(err_key(&SAMPLE.replace("t_max = 20", "t_max = -1")), "[run] t_max");
        assert_eq!(err_key(&SAMPLE.replace("A = pi/3", "A = tau")), "[feedback] A");
        assert_eq!(err_key(&SAMPLE.replace("output_every = 50", "output_every = 0")), "[run] output_every");
        assert_eq!(err_key(&SAMPLE.replace("gamma = 0.1", "gamma = nan")), "[model] gamma");
        let mixed = SAMPLE.replace("kind = pure\ntheta = pi/4", "kind = mixed\nepsilon = 1");
        assert_eq!(err_key(&mixed), "[initial] epsilon");
    }

    #[test]
    fn angle_literals() {
        assert_eq!(parse_angle("pi/2"), Some(FRAC_PI_2));
        assert_eq!(parse_angle(" 1.5 "), Some(1.5));
        assert_eq!(parse_angle("2pi"), None);
    }
}
