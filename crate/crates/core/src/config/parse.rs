use std::fmt::Write as _;

use thiserror::Error;

use super::{SignedPerm, WeightConfig};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: expected {expected} entries, found {got}")]
    DimensionMismatch { line: usize, expected: usize, got: usize },
    #[error("missing required key `{0}`")]
    Missing(&'static str),
    #[error("unknown configuration `{0}` (not bundled and not a readable file)")]
    NotFound(String),
}

fn syntax(line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError::Syntax { line, message: message.into() }
}

fn parse_ints(line: usize, text: &str) -> Result<Vec<i64>, ConfigError> {
    text.split_whitespace()
        .map(|t| t.parse::<i64>().map_err(|_| syntax(line, format!("not an integer: `{t}`"))))
        .collect()
}

fn parse_symmetry(line: usize, r: usize, text: &str) -> Result<SignedPerm, ConfigError> {
    let text = text.trim();
    let (body, sign) = match text.rsplit_once(')') {
        Some((head, tail)) => {
            let sign = match tail.trim() {
                "" | "+" => 1,
                "-" => -1,
                other => return Err(syntax(line, format!("bad sign `{other}`"))),
            };
            (format!("{head})"), sign)
        }
        None => return Err(syntax(line, "symmetry needs cycle notation, e.g. `(1 2 3) +`")),
    };
    let mut cycles = Vec::new();
    let mut rest = body.as_str();
    while let Some(open) = rest.find('(') {
        if !rest[..open].trim().is_empty() {
            return Err(syntax(line, "junk between cycles"));
        }
        let close = rest[open..].find(')').ok_or_else(|| syntax(line, "unclosed cycle"))? + open;
        let cycle = parse_ints(line, &rest[open + 1..close])?
            .into_iter()
            .map(|k| {
                if k >= 1 && (k as usize) <= r {
                    Ok(k as usize - 1)
                } else {
                    Err(syntax(line, format!("cycle entry {k} outside 1..{r}")))
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        if !cycle.is_empty() {
            cycles.push(cycle);
        }
        rest = &rest[close + 1..];
    }
    SignedPerm::from_cycles(r, &cycles, sign).map_err(|e| syntax(line, e.to_string()))
}

/// Parses the line-oriented configuration format.
pub fn parse_config(text: &str) -> Result<WeightConfig, ConfigError> {
    let mut name = None;
    let mut r: Option<usize> = None;
    let mut relations = Vec::new();
    let mut forms = Vec::new();
    let mut symmetry = Vec::new();
    let mut cofactor = None;
    let mut bad_primes = Vec::new();
    let mut tg = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once(':')
            .ok_or_else(|| syntax(line, "expected `key: value`"))?;
        let value = value.trim();
        let need_r = || r.ok_or_else(|| syntax(line, "`generators:` must come first"));
        match key.trim() {
            "name" => name = Some(value.to_string()),
            "generators" => {
                r = Some(value.parse().map_err(|_| syntax(line, "generators must be a count"))?)
            }
            "relation" | "form" => {
                let r = need_r()?;
                let v = parse_ints(line, value)?;
                if v.len() != r {
                    return Err(ConfigError::DimensionMismatch { line, expected: r, got: v.len() });
                }
                if key.trim() == "relation" {
                    relations.push(v);
                } else {
                    forms.push(v);
                }
            }
            "symmetry" => symmetry.push(parse_symmetry(line, need_r()?, value)?),
            "cofactor" => {
                cofactor = Some(value.parse().map_err(|_| syntax(line, "cofactor must be a positive integer"))?)
            }
            "bad_primes" => {
                bad_primes = parse_ints(line, value)?
                    .into_iter()
                    .map(|p| u64::try_from(p).map_err(|_| syntax(line, "negative prime")))
                    .collect::<Result<_, _>>()?
            }
            "tG" => tg = Some(value.parse().map_err(|_| syntax(line, "tG must be an integer"))?),
            other => return Err(ConfigError::UnknownKey { line, key: other.to_string() }),
        }
    }
    Ok(WeightConfig {
        name: name.ok_or(ConfigError::Missing("name"))?,
        r: r.ok_or(ConfigError::Missing("generators"))?,
        base_relations: relations,
        forms,
        symmetry_generators: symmetry,
        cofactor_m: cofactor.unwrap_or(1),
        bad_primes,
        reference_tg: tg,
    })
}

impl WeightConfig {
    /// Serializes back into the configuration format.
    pub fn to_text(&self) -> String {
        let join = |v: &[i64]| v.iter().map(i64::to_string).collect::<Vec<_>>().join(" ");
        let mut out = String::new();
        let _ = writeln!(out, "name: {}", self.name);
        let _ = writeln!(out, "generators: {}", self.r);
        for rel in &self.base_relations {
            let _ = writeln!(out, "relation: {}", join(rel));
        }
        for f in &self.forms {
            let _ = writeln!(out, "form: {}", join(f));
        }
        for g in &self.symmetry_generators {
            let _ = writeln!(out, "symmetry: {}", g.to_cycle_string());
        }
        let _ = writeln!(out, "cofactor: {}", self.cofactor_m);
        let primes: Vec<String> = self.bad_primes.iter().map(u64::to_string).collect();
        let _ = writeln!(out, "bad_primes: {}", primes.join(" "));
        if let Some(t) = self.reference_tg {
            let _ = writeln!(out, "tG: {t}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{bundled_names, load_config};

    #[test]
    fn g2_bundle_contents() {
        let c = load_config("g2_a2").unwrap();
        assert_eq!(c.r, 3);
        assert_eq!(c.base_relations, vec![vec![1, 1, 1]]);
        assert_eq!(c.d(), 7);
        assert_eq!(c.forms[6], vec![0, 0, 0]);
        assert_eq!(c.cofactor_m, 1);
        assert!(c.bad_primes.is_empty());
        assert_eq!(c.validate().group_size, Some(6));
    }

    #[test]
    fn f4_a1x4_bundle_contents() {
        let c = load_config("f4_a1x4").unwrap();
        assert_eq!(c.r, 4);
        assert!(c.base_relations.is_empty());
        assert_eq!(c.d(), 26);
        assert_eq!(c.forms.iter().filter(|f| f.iter().all(|&x| x == 0)).count(), 2);
        assert_eq!(c.cofactor_m, 2);
        assert_eq!(c.validate().group_size, Some(24));
    }

    #[test]
    fn form_counts_match_module_dimensions() {
        let expect = [
            ("g2_a2", 7),
            ("f4_a1x4", 26),
            ("f4_a2a2", 25),
            ("e6_a5a1", 27),
            ("e6_a2a2a2", 27),
            ("e7_a7", 56),
            ("g2_a2_adjoint", 14),
            ("f4_a1x4_adjoint", 52),
            ("f4_a2a2_adjoint", 52),
        ];
        for (name, d) in expect {
            assert_eq!(load_config(name).unwrap().d(), d, "{name}");
        }
    }

    #[test]
    fn bundled_configs_round_trip_and_validate() {
        for name in bundled_names() {
            let c = load_config(name).unwrap();
            assert_eq!(parse_config(&c.to_text()).unwrap(), c, "{name}");
            let diag = c.validate();
            assert!(diag.valid, "{diag}");
        }
    }

    #[test]
    fn group_sizes() {
        for (name, size) in [("g2_a2", 6), ("f4_a1x4", 24), ("f4_a2a2", 36), ("e6_a5a1", 720), ("e6_a2a2a2", 648)] {
            assert_eq!(load_config(name).unwrap().validate().group_size, Some(size), "{name}");
        }
    }

    #[test]
    fn e7_group_is_sym8() {
        assert_eq!(load_config("e7_a7").unwrap().validate().group_size, Some(40320));
    }

    #[test]
    fn wrong_length_form_is_rejected() {
        let err = parse_config("name: x\ngenerators: 3\nform: 1 0\n").unwrap_err();
        assert_eq!(err, ConfigError::DimensionMismatch { line: 3, expected: 3, got: 2 });
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let err = parse_config("name: x\ngenerators: 2\n# fine\nform: 1 z\n").unwrap_err();
        assert!(matches!(err, ConfigError::Syntax { line: 4, .. }));
        let err = parse_config("name: x\ncolour: red\n").unwrap_err();
        assert_eq!(err, ConfigError::UnknownKey { line: 2, key: "colour".into() });
        assert!(matches!(parse_config("generators: 2\n"), Err(ConfigError::Missing("name"))));
    }

    #[test]
    fn extra_generator_grows_group() {
        let mut c = load_config("f4_a1x4").unwrap();
        c.symmetry_generators = vec![parse_symmetry(1, 4, "(1 2) +").unwrap()];
        let d = c.validate();
        assert!(d.valid);
        assert_eq!(d.group_size, Some(2));
        c.symmetry_generators.push(parse_symmetry(1, 4, "(3 4)").unwrap());
        assert_eq!(c.validate().group_size, Some(4));
    }

    #[test]
    fn non_preserving_generator_is_diagnosed() {
        let mut c = load_config("f4_a2a2").unwrap();
        c.symmetry_generators.push(parse_symmetry(1, 6, "(1 4)").unwrap());
        let d = c.validate();
        assert!(!d.valid);
        assert!(d.group_size.is_none());
    }
}
