//! Flat `key = value` run configuration.
//!
//! One record covers every command; each command reads the keys it needs.
//! Lines are `key = value`, `#` starts a comment, unknown keys are errors.
//! `emit` writes keys in a fixed order so configs diff cleanly.

use std::fmt::Write as _;

use kpp_speedlab::BoundaryKind;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("config line {line}: {message}")]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

trait Value: Sized {
    fn parse_value(s: &str) -> Result<Self, String>;
    fn emit_value(&self) -> String;
}

impl Value for f64 {
    fn parse_value(s: &str) -> Result<Self, String> {
        match s.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(format!("`{s}` is not a finite decimal number")),
        }
    }

    fn emit_value(&self) -> String {
        self.to_string()
    }
}

impl Value for usize {
    fn parse_value(s: &str) -> Result<Self, String> {
        s.parse().map_err(|_| format!("`{s}` is not a non-negative integer"))
    }

    fn emit_value(&self) -> String {
        self.to_string()
    }
}

impl Value for String {
    fn parse_value(s: &str) -> Result<Self, String> {
        if s.is_empty() {
            return Err("empty value".into());
        }
        Ok(s.to_string())
    }

    fn emit_value(&self) -> String {
        self.clone()
    }
}

impl Value for BoundaryKind {
    fn parse_value(s: &str) -> Result<Self, String> {
        s.parse().map_err(|e: kpp_speedlab::Error| e.to_string())
    }

    fn emit_value(&self) -> String {
        self.to_string()
    }
}

macro_rules! run_config {
    ($($key:ident: $ty:ty),* $(,)?) => {
        /// Every accepted key; `None` means "not given".
        #[derive(Debug, Clone, Default, PartialEq)]
        pub struct RunConfig {
            $(pub $key: Option<$ty>,)*
        }

        impl RunConfig {
            pub const KEYS: &'static [&'static str] = &[$(stringify!($key)),*];

            pub fn parse(text: &str) -> Result<RunConfig, ConfigError> {
                let mut config = RunConfig::default();
                for (i, raw) in text.lines().enumerate() {
                    let line = raw.split('#').next().unwrap_or_default().trim();
                    if line.is_empty() {
                        continue;
                    }
                    let err = |message: String| ConfigError { line: i + 1, message };
                    let (key, value) = line.split_once('=').ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
                    let (key, value) = (key.trim(), value.trim());
                    match key {
                        $(stringify!($key) => {
                            if config.$key.is_some() {
                                return Err(err(format!("duplicate key `{key}`")));
                            }
                            config.$key = Some(<$ty as Value>::parse_value(value).map_err(|m| err(format!("{key}: {m}")))?);
                        })*
                        other => return Err(err(format!("unknown key `{other}` (known: {})", RunConfig::KEYS.join(", ")))),
                    }
                }
                Ok(config)
            }

            pub fn emit(&self) -> String {
                let mut out = String::new();
                $(if let Some(v) = &self.$key {
                    writeln!(out, "{} = {}", stringify!($key), Value::emit_value(v)).unwrap();
                })*
                out
            }

            /// Keys set in `other` replace ours.
            pub fn overlay(mut self, other: RunConfig) -> RunConfig {
                $(if other.$key.is_some() {
                    self.$key = other.$key;
                })*
                self
            }
        }
    };
}

run_config! {
    alpha: f64,
    beta: f64,
    flow: String,
    fprime0: f64,
    reaction: String,
    bc: BoundaryKind,
    length: f64,
    n: usize,
    max_iterations: usize,
    csv: String,
    param: String,
    from: f64,
    to: f64,
    points: usize,
    out: String,
    mode: String,
    delta: f64,
    confirm_n: usize,
    strip: f64,
    nx: usize,
    tend: f64,
    traj: String,
    suite: String,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_comments_and_spacing() {
        let c = RunConfig::parse("# run\nalpha = 1.5\n  flow=cosine:amplitude=6:mode=1  # standard\n\nbc = neumann\nn=64\n").unwrap();
        assert_eq!(c.alpha, Some(1.5));
        assert_eq!(c.flow.as_deref(), Some("cosine:amplitude=6:mode=1"));
        assert_eq!(c.bc, Some(BoundaryKind::IntervalNeumann));
        assert_eq!(c.n, Some(64));
        assert_eq!(c.beta, None);
    }

    #[test]
    fn rejects_unknown_duplicate_and_malformed() {
        assert_eq!(RunConfig::parse("alpha = 1\ngamma = 2").unwrap_err().line, 2);
        assert!(RunConfig::parse("alpha = 1\nalpha = 2").unwrap_err().message.contains("duplicate"));
        assert!(RunConfig::parse("alpha").is_err());
        assert!(RunConfig::parse("alpha = inf").is_err());
        assert!(RunConfig::parse("n = -3").is_err());
        assert!(RunConfig::parse("bc = torus").is_err());
    }

    #[test]
    fn overlay_prefers_the_second_record() {
        let file = RunConfig { alpha: Some(1.0), beta: Some(2.0), ..RunConfig::default() };
        let flags = RunConfig { beta: Some(3.0), ..RunConfig::default() };
        let merged = file.overlay(flags);
        assert_eq!((merged.alpha, merged.beta), (Some(1.0), Some(3.0)));
    }

    #[test]
    fn emits_keys_in_declaration_order() {
        let c = RunConfig { n: Some(8), alpha: Some(0.1), suite: Some("quick".into()), ..RunConfig::default() };
        assert_eq!(c.emit(), "alpha = 0.1\nn = 8\nsuite = quick\n");
        assert_eq!(RunConfig::KEYS.len(), 23);
    }

    fn text() -> impl Strategy<Value = String> {
        "[a-z][a-z0-9:=.,;/_-]{0,20}"
    }

    fn config() -> impl Strategy<Value = RunConfig> {
        (
            (
                prop::option::of(-1e6f64..1e6),
                prop::option::of(1e-9f64..1e9),
                prop::option::of(text()),
                prop::option::of(any::<bool>()),
                prop::option::of(0usize..1_000_000),
                prop::option::of(text()),
            ),
            (prop::option::of(-1e3f64..1e3), prop::option::of(1usize..50), prop::option::of(text()), prop::option::of(1e-3f64..1e3)),
        )
            .prop_map(|((alpha, tend, flow, bc, n, out), (delta, points, suite, from))| RunConfig {
                alpha,
                tend,
                flow,
                bc: bc.map(|p| if p { BoundaryKind::CirclePeriodic } else { BoundaryKind::IntervalNeumann }),
                n,
                out,
                delta,
                points,
                suite,
                from,
                ..RunConfig::default()
            })
    }

    proptest! {
        #[test]
        fn emit_then_parse_is_identity(c in config()) {
            prop_assert_eq!(RunConfig::parse(&c.emit()).unwrap(), c);
        }
    }
}
