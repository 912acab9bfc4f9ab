//! Run configuration: a flat, line-oriented `section.key = value` format.
//!
//! `#` starts a comment (full line or trailing), blank lines are skipped,
//! duplicate and unknown keys are errors with the offending line number.
//! Every model symbol is settable here; see [`CANONICAL_KEYS`] for the full
//! key set and defaults.

use crate::energy3d::{check_coercivity, ElasticConstants, ModelParams};
use crate::error::{Error, Result};
use crate::grid::DomainShape;
use crate::minimizer::{BoundaryKind, SolverConfig};
use crate::surface::AnchoringParams;
use serde::Serialize;
use std::collections::HashSet;

/// Accepted keys with their defaults (rendered in the docs; the parser and
/// this table are kept in sync by a unit test).
pub const CANONICAL_KEYS: &[(&str, &str)] = &[
    ("domain.shape", "square"),
    ("grid.nx", "32"),
    ("grid.ny", "32"),
    ("grid.nz", "8"),
    ("model.A", "-1.0"),
    ("model.B", "1.0"),
    ("model.w_l", "100.0"),
    ("model.beta", "0.2"),
    ("elastic.M2", "0.0"),
    ("elastic.M3", "0.0"),
    ("anchoring.alpha0", "1.0"),
    ("anchoring.alpha1", "0.0"),
    ("anchoring.gamma0", "1.0"),
    ("anchoring.gamma1", "0.0"),
    ("boundary.case", "case1"),
    ("boundary.degree", "1"),
    ("epsilon.list", "0.2,0.1,0.05"),
    ("solver.tol", "1e-8"),
    ("solver.max_iters", "50000"),
    ("solver.seed", "1"),
    ("solver.continuation", ""),
];

/// Parsed run configuration with defaults applied.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub shape: DomainShapeKey,
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub a: f64,
    pub b: f64,
    pub w_l: f64,
    pub beta: f64,
    pub m2: f64,
    pub m3: f64,
    pub alpha0: f64,
    pub alpha1: f64,
    pub gamma0: f64,
    pub gamma1: f64,
    pub boundary_case: BoundaryCaseKey,
    pub degree: i32,
    pub epsilons: Vec<f64>,
    pub tol: f64,
    pub max_iters: usize,
    pub seed: u64,
    pub continuation: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainShapeKey {
    Square,
    Disc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCaseKey {
    Case1,
    Case2,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            shape: DomainShapeKey::Square,
            nx: 32,
            ny: 32,
            nz: 8,
            a: -1.0,
            b: 1.0,
            w_l: 100.0,
            beta: 0.2,
            m2: 0.0,
            m3: 0.0,
            alpha0: 1.0,
            alpha1: 0.0,
            gamma0: 1.0,
            gamma1: 0.0,
            boundary_case: BoundaryCaseKey::Case1,
            degree: 1,
            epsilons: vec![0.2, 0.1, 0.05],
            tol: 1e-8,
            max_iters: 50_000,
            seed: 1,
            continuation: Vec::new(),
        }
    }
}

impl RunConfig {
    pub fn domain_shape(&self) -> DomainShape {
        match self.shape {
            DomainShapeKey::Square => DomainShape::Square,
            DomainShapeKey::Disc => DomainShape::Disc,
        }
    }

    pub fn boundary_kind(&self) -> BoundaryKind {
        match self.boundary_case {
            BoundaryCaseKey::Case1 => BoundaryKind::Case1,
            BoundaryCaseKey::Case2 => BoundaryKind::Case2 {
                degree: self.degree,
            },
        }
    }

    pub fn elastic(&self) -> ElasticConstants {
        ElasticConstants::new(self.m2, self.m3)
    }

    pub fn anchoring(&self) -> Result<AnchoringParams> {
        AnchoringParams::new(self.alpha0, self.alpha1, self.gamma0, self.gamma1, self.beta)
    }

    /// Model parameters at the first epsilon of the list.
    pub fn model_params(&self) -> Result<ModelParams> {
        let eps = self.epsilons.first().copied().unwrap_or(0.1);
        ModelParams::new(self.a, self.b, self.w_l, eps, self.anchoring()?)
    }

    pub fn solver_config(&self) -> Result<SolverConfig> {
        SolverConfig::new(self.tol, self.max_iters, self.seed)
            .with_continuation(self.continuation.clone())
    }
}

fn parse_f64(value: &str, line: usize) -> Result<f64> {
    value.trim().parse::<f64>().map_err(|_| Error::Config {
        line,
        msg: format!("malformed number `{value}`"),
    })
}

fn parse_list(value: &str, line: usize) -> Result<Vec<f64>> {
    let v = value.trim();
    if v.is_empty() {
        return Ok(Vec::new());
    }
    v.split(',').map(|tok| parse_f64(tok, line)).collect()
}

/// Parses the config text; returns the config and non-fatal warnings (for
/// now: non-coercive elastic constants, which block only the 3D solves).
pub fn parse_config(text: &str) -> Result<(RunConfig, Vec<String>)> {
    let mut cfg = RunConfig::default();
    let mut seen: HashSet<String> = HashSet::new();
    let mut key_line: std::collections::HashMap<String, usize> = std::collections::HashMap::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let content = content.trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = match content.split_once('=') {
            Some((k, v)) => (k.trim(), v.trim()),
            None => {
                return Err(Error::Config {
                    line,
                    msg: format!("expected `key = value`, got `{content}`"),
                })
            }
        };
        if !seen.insert(key.to_string()) {
            return Err(Error::Config {
                line,
                msg: format!("duplicate key `{key}`"),
            });
        }
        key_line.insert(key.to_string(), line);
        match key {
            "domain.shape" => {
                cfg.shape = match value {
                    "square" => DomainShapeKey::Square,
                    "disc" => DomainShapeKey::Disc,
                    other => {
                        return Err(Error::Config {
                            line,
                            msg: format!("domain.shape must be square|disc, got `{other}`"),
                        })
                    }
                }
            }
            "grid.nx" | "grid.ny" | "grid.nz" => {
                let n: usize = value.parse().map_err(|_| Error::Config {
                    line,
                    msg: format!("malformed integer `{value}`"),
                })?;
                match key {
                    "grid.nx" => cfg.nx = n,
                    "grid.ny" => cfg.ny = n,
                    _ => cfg.nz = n,
                }
            }
            "model.A" => cfg.a = parse_f64(value, line)?,
            "model.B" => cfg.b = parse_f64(value, line)?,
            "model.w_l" => cfg.w_l = parse_f64(value, line)?,
            "model.beta" => cfg.beta = parse_f64(value, line)?,
            "elastic.M2" => cfg.m2 = parse_f64(value, line)?,
            "elastic.M3" => cfg.m3 = parse_f64(value, line)?,
            "anchoring.alpha0" => cfg.alpha0 = parse_f64(value, line)?,
            "anchoring.alpha1" => cfg.alpha1 = parse_f64(value, line)?,
            "anchoring.gamma0" => cfg.gamma0 = parse_f64(value, line)?,
            "anchoring.gamma1" => cfg.gamma1 = parse_f64(value, line)?,
            "boundary.case" => {
                cfg.boundary_case = match value {
                    "case1" => BoundaryCaseKey::Case1,
                    "case2" => BoundaryCaseKey::Case2,
                    other => {
                        return Err(Error::Config {
                            line,
                            msg: format!("boundary.case must be case1|case2, got `{other}`"),
                        })
                    }
                }
            }
            "boundary.degree" => {
                cfg.degree = value.parse().map_err(|_| Error::Config {
                    line,
                    msg: format!("malformed integer `{value}`"),
                })?
            }
            "epsilon.list" => cfg.epsilons = parse_list(value, line)?,
            "solver.tol" => cfg.tol = parse_f64(value, line)?,
            "solver.max_iters" => {
                cfg.max_iters = value.parse().map_err(|_| Error::Config {
                    line,
                    msg: format!("malformed integer `{value}`"),
                })?
            }
            "solver.seed" => {
                cfg.seed = value.parse().map_err(|_| Error::Config {
                    line,
                    msg: format!("malformed integer `{value}`"),
                })?
            }
            "solver.continuation" => cfg.continuation = parse_list(value, line)?,
            other => {
                return Err(Error::Config {
                    line,
                    msg: format!("unknown key `{other}`"),
                })
            }
        }
    }

    // Structural invariants, reported at the line of the offending key.
    let at = |key: &str| key_line.get(key).copied().unwrap_or(0);
    if cfg.alpha0 * cfg.alpha1 != 0.0 {
        return Err(Error::Config {
            line: at("anchoring.alpha1").max(at("anchoring.alpha0")),
            msg: "anchoring splitting requires alpha0*alpha1 = 0".into(),
        });
    }
    if cfg.gamma0 * cfg.gamma1 != 0.0 {
        return Err(Error::Config {
            line: at("anchoring.gamma1").max(at("anchoring.gamma0")),
            msg: "anchoring splitting requires gamma0*gamma1 = 0".into(),
        });
    }
    if cfg.tol <= 0.0 {
        return Err(Error::Config {
            line: at("solver.tol"),
            msg: "solver.tol must be positive".into(),
        });
    }
    if cfg.w_l <= 0.0 {
        return Err(Error::Config {
            line: at("model.w_l"),
            msg: "model.w_l must be positive".into(),
        });
    }
    if cfg.epsilons.iter().any(|&e| e <= 0.0) {
        return Err(Error::Config {
            line: at("epsilon.list"),
            msg: "epsilon.list entries must be positive".into(),
        });
    }

    let mut warnings = Vec::new();
    let (coercive, margin) = check_coercivity(cfg.m2, cfg.m3);
    if !coercive {
        warnings.push(format!(
            "elastic constants (M2 = {}, M3 = {}) are not coercive (margin {margin}); 3D solves will refuse to run",
            cfg.m2, cfg.m3
        ));
    }
    Ok((cfg, warnings))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_uses_defaults() {
        let (cfg, warns) = parse_config("").unwrap();
        assert_eq!(cfg.nx, 32);
        assert_eq!(cfg.shape, DomainShapeKey::Square);
        assert!(warns.is_empty());
        // The default table round-trips through the parser.
        let text: String = CANONICAL_KEYS
            .iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect();
        let (cfg2, _) = parse_config(&text).unwrap();
        assert_eq!(cfg2.nx, cfg.nx);
        assert_eq!(cfg2.epsilons, cfg.epsilons);
        assert_eq!(cfg2.seed, cfg.seed);
    }

    #[test]
    fn rejects_conflicting_anchoring_splitting() {
        match parse_config("anchoring.alpha0 = 1\nanchoring.alpha1 = 1\n") {
            Err(Error::Config { line, msg }) => {
                assert_eq!(line, 2);
                assert!(msg.contains("alpha0*alpha1"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn warns_on_non_coercive_constants() {
        let (_, warns) = parse_config("elastic.M3 = 2\n").unwrap();
        assert_eq!(warns.len(), 1);
        assert!(warns[0].contains("not coercive"));
    }

    #[test]
    fn rejects_unknown_and_duplicate_keys() {
        match parse_config("grid.nx = 8\nbogus.key = 1\n") {
            Err(Error::Config { line, msg }) => {
                assert_eq!(line, 2);
                assert!(msg.contains("unknown key"));
            }
            other => panic!("{other:?}"),
        }
        match parse_config("grid.nx = 8\ngrid.nx = 9\n") {
            Err(Error::Config { line, msg }) => {
                assert_eq!(line, 2);
                assert!(msg.contains("duplicate"));
            }
            other => panic!("{other:?}"),
        }
        match parse_config("model.A = abc\n") {
            Err(Error::Config { line, msg }) => {
                assert_eq!(line, 1);
                assert!(msg.contains("malformed"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn comments_and_lists() {
        let text = "\
# full-line comment
grid.nx = 16   # trailing comment
epsilon.list = 0.4, 0.2, 0.1
solver.continuation = 0.3,0.15
";
        let (cfg, _) = parse_config(text).unwrap();
        assert_eq!(cfg.nx, 16);
        assert_eq!(cfg.epsilons, vec![0.4, 0.2, 0.1]);
        assert_eq!(cfg.continuation, vec![0.3, 0.15]);
    }

    #[test]
    fn every_model_symbol_is_settable() {
        // Completeness of the key table against the parameter structs: each
        // field of the domain objects is reachable from config keys.
        let text = "\
model.A = -0.5
model.B = 0.7
model.w_l = 42.0
model.beta = 0.3
elastic.M2 = 0.1
elastic.M3 = -0.2
anchoring.alpha0 = 0.0
anchoring.alpha1 = 2.0
anchoring.gamma0 = 3.0
anchoring.gamma1 = 0.0
epsilon.list = 0.25
";
        let (cfg, _) = parse_config(text).unwrap();
        let ec = cfg.elastic();
        assert_eq!((ec.m2, ec.m3), (0.1, -0.2));
        let anch = cfg.anchoring().unwrap();
        assert_eq!(
            (anch.alpha0, anch.alpha1, anch.gamma0, anch.gamma1, anch.beta),
            (0.0, 2.0, 3.0, 0.0, 0.3)
        );
        let mp = cfg.model_params().unwrap();
        assert_eq!((mp.a, mp.b, mp.w_l, mp.epsilon), (-0.5, 0.7, 42.0, 0.25));

        // The canonical table covers exactly the accepted keys: every entry
        // parses, and the parser has no extras (spot-check by count).
        let all: String = CANONICAL_KEYS
            .iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect();
        assert!(parse_config(&all).is_ok());
        assert_eq!(CANONICAL_KEYS.len(), 21);
    }
}
