//! Flat `key = value` run configuration with dotted sections.
//!
//! Lines are `section.key = value`; `#` starts a comment. `problem.mode`
//! and `forcing.mode` may repeat. Unknown keys are rejected so typos fail
//! loudly instead of silently running defaults.

use std::collections::BTreeMap;

use navier_series::field::DealiasRule;
use num_complex::Complex;

#[derive(Clone, Debug, PartialEq)]
pub enum Preset {
    TaylorGreen,
    Abc,
    Zero,
    Random,
    /// Initial condition given entirely by `problem.mode` lines.
    Inline,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    TrigPoly,
    Grid,
}

/// One harmonic of an inline velocity component:
/// `kx ky kz component re im`.
#[derive(Clone, Debug)]
pub struct ModeLine {
    pub k: [i32; 3],
    pub component: usize,
    pub coeff: Complex<f64>,
}

/// One harmonic of a forcing term: `order kx ky kz component re im`.
#[derive(Clone, Debug)]
pub struct ForcingLine {
    pub order: usize,
    pub mode: ModeLine,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub preset: Preset,
    pub nu: f64,
    pub order: usize,
    pub backend: Backend,
    pub modes: Vec<ModeLine>,
    pub forcing: Vec<ForcingLine>,
    pub abc: [f64; 3],
    pub seed: u64,
    pub k_max: i32,
    pub amplitude: f64,
    pub grid_n: usize,
    pub dealias: DealiasRule,
    pub out_dir: String,
    pub write_fields: bool,
    pub tol_div: Option<f64>,
    pub prune: Option<f64>,
}

fn parse_mode(value: &str) -> Result<ModeLine, String> {
    let parts: Vec<&str> = value.split_whitespace().collect();
    if parts.len() != 6 {
        return Err(format!(
            "mode needs `kx ky kz component re im`, got {value:?}"
        ));
    }
    let k = [
        parts[0].parse::<i32>().map_err(|e| e.to_string())?,
        parts[1].parse::<i32>().map_err(|e| e.to_string())?,
        parts[2].parse::<i32>().map_err(|e| e.to_string())?,
    ];
    let component = match parts[3] {
        "u" | "x" => 0,
        "v" | "y" => 1,
        "w" | "z" => 2,
        other => return Err(format!("unknown component {other:?}")),
    };
    let coeff = Complex::new(
        parts[4].parse::<f64>().map_err(|e| e.to_string())?,
        parts[5].parse::<f64>().map_err(|e| e.to_string())?,
    );
    Ok(ModeLine { k, component, coeff })
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut single: BTreeMap<String, String> = BTreeMap::new();
        let mut modes = Vec::new();
        let mut forcing = Vec::new();

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected `key = value`", lineno + 1))?;
            let key = key.trim();
            let value = value.trim();
            match key {
                "problem.mode" => modes.push(parse_mode(value).map_err(|e| {
                    format!("line {}: {e}", lineno + 1)
                })?),
                "forcing.mode" => {
                    let (ord, rest) = value
                        .split_once(' ')
                        .ok_or_else(|| format!("line {}: forcing.mode needs an order", lineno + 1))?;
                    let order = ord
                        .parse::<usize>()
                        .map_err(|e| format!("line {}: {e}", lineno + 1))?;
                    let mode = parse_mode(rest.trim())
                        .map_err(|e| format!("line {}: {e}", lineno + 1))?;
                    forcing.push(ForcingLine { order, mode });
                }
                _ => {
                    if single.insert(key.to_string(), value.to_string()).is_some() {
                        return Err(format!("line {}: duplicate key {key:?}", lineno + 1));
                    }
                }
            }
        }

        const KNOWN: &[&str] = &[
            "problem.preset",
            "problem.nu",
            "problem.order",
            "problem.backend",
            "problem.abc_a",
            "problem.abc_b",
            "problem.abc_c",
            "problem.seed",
            "problem.k_max",
            "problem.amplitude",
            "grid.n",
            "grid.dealias",
            "outputs.dir",
            "outputs.fields",
            "tolerances.tol_div",
            "tolerances.prune",
        ];
        for key in single.keys() {
            if !KNOWN.contains(&key.as_str()) {
                return Err(format!("unknown config key {key:?}"));
            }
        }

        let get = |key: &str| single.get(key).map(|s| s.as_str());
        let parse_f64 = |key: &str| -> Result<Option<f64>, String> {
            get(key)
                .map(|v| v.parse::<f64>().map_err(|e| format!("{key}: {e}")))
                .transpose()
        };

        let preset = match get("problem.preset") {
            Some("taylor_green") => Preset::TaylorGreen,
            Some("abc") => Preset::Abc,
            Some("zero") => Preset::Zero,
            Some("random") => Preset::Random,
            Some(other) => return Err(format!("unknown preset {other:?}")),
            None if !modes.is_empty() => Preset::Inline,
            None => return Err("config needs problem.preset or problem.mode lines".into()),
        };
        if preset != Preset::Inline && !modes.is_empty() {
            return Err("problem.mode lines conflict with problem.preset".into());
        }

        let backend = match get("problem.backend").unwrap_or("trigpoly") {
            "trigpoly" => Backend::TrigPoly,
            "grid" => Backend::Grid,
            other => return Err(format!("unknown backend {other:?}")),
        };
        let dealias = match get("grid.dealias").unwrap_or("exact_padding") {
            "two_thirds" => DealiasRule::TwoThirds,
            "exact_padding" => DealiasRule::ExactPadding,
            other => return Err(format!("unknown dealias rule {other:?}")),
        };
        let order = get("problem.order")
            .ok_or("missing problem.order")?
            .parse::<usize>()
            .map_err(|e| format!("problem.order: {e}"))?;
        let nu = parse_f64("problem.nu")?.ok_or("missing problem.nu")?;

        let write_fields = match get("outputs.fields").unwrap_or("true") {
            "true" => true,
            "false" => false,
            other => return Err(format!("outputs.fields must be true/false, got {other:?}")),
        };

        Ok(RunConfig {
            preset,
            nu,
            order,
            backend,
            modes,
            forcing,
            abc: [
                parse_f64("problem.abc_a")?.unwrap_or(1.0),
                parse_f64("problem.abc_b")?.unwrap_or(1.0),
                parse_f64("problem.abc_c")?.unwrap_or(1.0),
            ],
            seed: get("problem.seed")
                .map(|v| v.parse::<u64>().map_err(|e| format!("problem.seed: {e}")))
                .transpose()?
                .unwrap_or(0),
            k_max: get("problem.k_max")
                .map(|v| v.parse::<i32>().map_err(|e| format!("problem.k_max: {e}")))
                .transpose()?
                .unwrap_or(2),
            amplitude: parse_f64("problem.amplitude")?.unwrap_or(1.0),
            grid_n: get("grid.n")
                .map(|v| v.parse::<usize>().map_err(|e| format!("grid.n: {e}")))
                .transpose()?
                .unwrap_or(32),
            dealias,
            out_dir: get("outputs.dir").unwrap_or("out").to_string(),
            tol_div: parse_f64("tolerances.tol_div")?,
            prune: parse_f64("tolerances.prune")?,
            write_fields,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_preset_config() {
        let cfg = RunConfig::parse(
            "# demo\nproblem.preset = taylor_green\nproblem.nu = 0.1\nproblem.order = 10\noutputs.dir = /tmp/x\n",
        )
        .unwrap();
        assert_eq!(cfg.preset, Preset::TaylorGreen);
        assert_eq!(cfg.order, 10);
        assert_eq!(cfg.out_dir, "/tmp/x");
        assert_eq!(cfg.backend, Backend::TrigPoly);
    }

    #[test]
    fn rejects_unknown_key() {
        let err = RunConfig::parse(
            "problem.preset = zero\nproblem.nu = 0\nproblem.order = 2\nproblem.viscosity = 1\n",
        )
        .unwrap_err();
        assert!(err.contains("problem.viscosity"), "{err}");
    }

    #[test]
    fn parses_inline_modes() {
        let cfg = RunConfig::parse(
            "problem.nu = 0\nproblem.order = 3\nproblem.mode = 0 1 0 u 0 -0.5\nproblem.mode = 1 0 0 v 0 0.5\n",
        )
        .unwrap();
        assert_eq!(cfg.preset, Preset::Inline);
        assert_eq!(cfg.modes.len(), 2);
        assert_eq!(cfg.modes[0].k, [0, 1, 0]);
        assert_eq!(cfg.modes[0].component, 0);
    }

    #[test]
    fn rejects_bad_mode_line() {
        assert!(RunConfig::parse(
            "problem.nu = 0\nproblem.order = 1\nproblem.mode = 1 0 0 q 1 0\n"
        )
        .is_err());
    }
}
