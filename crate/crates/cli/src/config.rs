//! Experiment configuration documents.
//!
//! A document is TOML. Every key is optional apart from `preset`, which the
//! subcommand can supply; absent keys take the preset's defaults. Example:
//!
//! ```toml
//! preset = "spatial_2use_correlated"
//! seed = 7
//! repetitions = 10
//!
//! [target]
//! prior = [0.55, 0.2, 0.15, 0.1]
//! mu = 0.5
//!
//! [game]
//! max_turns = 300
//! ```

use std::fmt;
use std::ops::Range;
use std::path::PathBuf;

use qnoise::game::{CorrelationKind, GameConfig, StopMetric};
use serde::{Deserialize, Serialize};
use toml::Spanned;

/// Stand-in single-use prior shared by the Pauli presets.
pub const DEFAULT_PRIOR: [f64; 4] = [0.55, 0.2, 0.15, 0.1];
/// Phase-bin target of the metrology table (`m = 2`).
pub const DEFAULT_PHASE_TARGET: [f64; 4] = [0.5, 0.3, 0.15, 0.05];
pub const DEFAULT_MU: f64 = 0.5;
/// Correlation the μ-only generator has to find, starting from μ = 1/2.
pub const DEFAULT_MU_ONLY_TARGET: f64 = 0.8;
pub const DEFAULT_MU_SWEEP: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];
pub const DEFAULT_N_SWEEP: [usize; 3] = [2, 3, 4];
pub const DEFAULT_MAX_TURNS: usize = 500;

const PROB_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Preset {
    #[serde(rename = "spatial_1use")]
    Spatial1Use,
    #[serde(rename = "spatial_2use_correlated")]
    Spatial2UseCorrelated,
    #[serde(rename = "spatial_mu_sweep")]
    SpatialMuSweep,
    #[serde(rename = "temporal_2use")]
    Temporal2Use,
    #[serde(rename = "temporal_mu_only_n_sweep")]
    TemporalMuOnlyNSweep,
    #[serde(rename = "metrology_table")]
    MetrologyTable,
    #[serde(rename = "gram_analysis")]
    GramAnalysis,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Self::Spatial1Use => "spatial_1use",
            Self::Spatial2UseCorrelated => "spatial_2use_correlated",
            Self::SpatialMuSweep => "spatial_mu_sweep",
            Self::Temporal2Use => "temporal_2use",
            Self::TemporalMuOnlyNSweep => "temporal_mu_only_n_sweep",
            Self::MetrologyTable => "metrology_table",
            Self::GramAnalysis => "gram_analysis",
        }
    }

    /// Number of channel uses, for presets where it is fixed.
    fn fixed_uses(self) -> Option<usize> {
        match self {
            Self::Spatial1Use => Some(1),
            Self::Spatial2UseCorrelated | Self::SpatialMuSweep | Self::Temporal2Use => Some(2),
            _ => None,
        }
    }

    fn trains(self) -> bool {
        self != Self::GramAnalysis
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    Full,
    Factorized,
    MuOnly,
}

/// What the real channel is. Which fields apply depends on the preset.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct TargetSpec {
    /// Explicit Pauli table, `4^n` entries in base-4 index order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probs: Option<Vec<f64>>,
    /// Single-use prior of the correlated model.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prior: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    /// Phase-bin probabilities `p(b / 2^m)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SweepSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<Vec<usize>>,
    /// Bits of phase precision.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
}

/// Overrides of [`GameConfig`]; `None` keeps the default for the number of uses.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ancilla_count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init_depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mid_depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub learning_rate_d: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub learning_rate_g: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_steps_per_turn: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g_steps_per_turn: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_turns: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fidelity_threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop_metric: Option<StopMetric>,
}

/// A validated experiment with the preset defaults filled in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub preset: Preset,
    pub seed: u64,
    pub repetitions: usize,
    pub output_dir: PathBuf,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<TargetSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub game: Option<GameOverrides>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ConfigError {
    pub message: String,
    pub line: Option<usize>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    preset: Option<Spanned<Preset>>,
    seed: Option<u64>,
    repetitions: Option<Spanned<usize>>,
    output_dir: Option<PathBuf>,
    generator: Option<Spanned<GeneratorKind>>,
    target: Option<Spanned<RawTarget>>,
    sweep: Option<Spanned<RawSweep>>,
    game: Option<Spanned<GameOverrides>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTarget {
    probs: Option<Spanned<Vec<f64>>>,
    prior: Option<Spanned<Vec<f64>>>,
    mu: Option<Spanned<f64>>,
    phase: Option<Spanned<Vec<f64>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    mu: Option<Spanned<Vec<f64>>>,
    n: Option<Spanned<Vec<usize>>>,
    m: Option<Spanned<usize>>,
}

struct Ctx<'a> {
    text: &'a str,
}

impl Ctx<'_> {
    fn line(&self, span: Range<usize>) -> usize {
        let end = span.start.min(self.text.len());
        self.text[..end].matches('\n').count() + 1
    }

    fn err(&self, span: Range<usize>, message: impl Into<String>) -> ConfigError {
        ConfigError {
            message: message.into(),
            line: Some(self.line(span)),
        }
    }

    fn reject<T>(&self, field: &Option<Spanned<T>>, name: &str, preset: Preset) -> Result<(), ConfigError> {
        match field {
            Some(v) => Err(self.err(v.span(), format!("{name} is not used by preset {preset}"))),
            None => Ok(()),
        }
    }

    fn distribution(&self, v: &Spanned<Vec<f64>>, name: &str, len: usize) -> Result<Vec<f64>, ConfigError> {
        let probs = v.get_ref();
        if probs.len() != len {
            return Err(self.err(
                v.span(),
                format!("{name} has {} entries, expected {len}", probs.len()),
            ));
        }
        if let Some((i, p)) = probs.iter().enumerate().find(|(_, p)| !(**p >= 0.0 && p.is_finite())) {
            return Err(self.err(v.span(), format!("{name}[{i}] = {p} is not a probability")));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PROB_TOL {
            return Err(self.err(
                v.span(),
                format!("{name} sums to {sum}, expected 1 (not normalized)"),
            ));
        }
        Ok(probs.clone())
    }

    fn mu(&self, v: &Spanned<f64>, name: &str) -> Result<f64, ConfigError> {
        let mu = *v.get_ref();
        if !(0.0..=1.0).contains(&mu) {
            return Err(self.err(v.span(), format!("{name} = {mu} outside [0, 1]")));
        }
        Ok(mu)
    }
}

/// Parses a document that must name its own preset.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    parse_config_as(text, None)
}

/// Parses a document for `preset`. A preset named in the document must agree.
pub fn parse_config_as(text: &str, preset: Option<Preset>) -> Result<ExperimentConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError {
        message: e.message().to_string(),
        line: e.span().map(|s| Ctx { text }.line(s)),
    })?;
    resolve(raw, preset, &Ctx { text })
}

fn resolve(raw: RawConfig, preset: Option<Preset>, ctx: &Ctx<'_>) -> Result<ExperimentConfig, ConfigError> {
    let preset = match (raw.preset, preset) {
        (Some(p), Some(q)) if *p.get_ref() != q => {
            return Err(ctx.err(
                p.span(),
                format!("preset {} does not match subcommand {q}", p.get_ref()),
            ))
        }
        (Some(p), _) => p.into_inner(),
        (None, Some(q)) => q,
        (None, None) => {
            return Err(ConfigError {
                message: "missing required field `preset`".into(),
                line: None,
            })
        }
    };
    let repetitions = match raw.repetitions {
        Some(r) if *r.get_ref() == 0 => return Err(ctx.err(r.span(), "repetitions must be at least 1")),
        Some(r) => r.into_inner(),
        None => 1,
    };
    let output_dir = raw
        .output_dir
        .unwrap_or_else(|| PathBuf::from("results").join(preset.name()));

    if !preset.trains() {
        ctx.reject(&raw.generator, "generator", preset)?;
        ctx.reject(&raw.target, "target", preset)?;
        ctx.reject(&raw.game, "game", preset)?;
    }
    let sweep = resolve_sweep(preset, raw.sweep, ctx)?;
    let target = match raw.target {
        Some(t) => Some(resolve_target(preset, t.into_inner(), sweep.as_ref(), ctx)?),
        None if preset.trains() => Some(resolve_target(preset, RawTarget::empty(), sweep.as_ref(), ctx)?),
        None => None,
    };
    let generator = if preset.trains() {
        Some(resolve_generator(preset, raw.generator, target.as_ref(), ctx)?)
    } else {
        None
    };
    let game = if preset.trains() {
        Some(resolve_game(preset, raw.game, sweep.as_ref(), ctx)?)
    } else {
        None
    };
    Ok(ExperimentConfig {
        preset,
        seed: raw.seed.unwrap_or(0),
        repetitions,
        output_dir,
        generator,
        target,
        sweep,
        game,
    })
}

impl RawTarget {
    fn empty() -> Self {
        Self {
            probs: None,
            prior: None,
            mu: None,
            phase: None,
        }
    }
}

fn resolve_sweep(
    preset: Preset,
    raw: Option<Spanned<RawSweep>>,
    ctx: &Ctx<'_>,
) -> Result<Option<SweepSpec>, ConfigError> {
    let (want_mu, want_n, want_m) = match preset {
        Preset::SpatialMuSweep => (true, false, false),
        Preset::TemporalMuOnlyNSweep => (false, true, false),
        Preset::MetrologyTable | Preset::GramAnalysis => (false, true, true),
        _ => (false, false, false),
    };
    let raw = match raw {
        Some(s) if !(want_mu || want_n || want_m) => {
            return Err(ctx.err(s.span(), format!("sweep is not used by preset {preset}")))
        }
        Some(s) => s.into_inner(),
        None if !(want_mu || want_n || want_m) => return Ok(None),
        None => RawSweep {
            mu: None,
            n: None,
            m: None,
        },
    };
    let mut out = SweepSpec::default();
    if want_mu {
        out.mu = Some(match raw.mu {
            Some(v) => {
                if v.get_ref().is_empty() {
                    return Err(ctx.err(v.span(), "sweep.mu is empty"));
                }
                if let Some(&bad) = v.get_ref().iter().find(|mu| !(0.0..=1.0).contains(*mu)) {
                    return Err(ctx.err(v.span(), format!("sweep.mu entry {bad} outside [0, 1]")));
                }
                v.into_inner()
            }
            None => DEFAULT_MU_SWEEP.to_vec(),
        });
    } else {
        ctx.reject(&raw.mu, "sweep.mu", preset)?;
    }
    if want_n {
        let default = match preset {
            Preset::TemporalMuOnlyNSweep => DEFAULT_N_SWEEP.to_vec(),
            _ => vec![1, 2],
        };
        let max = if preset == Preset::GramAnalysis { 64 } else { 8 };
        out.n = Some(match raw.n {
            Some(v) => {
                if v.get_ref().is_empty() {
                    return Err(ctx.err(v.span(), "sweep.n is empty"));
                }
                if let Some(&bad) = v.get_ref().iter().find(|&&n| n == 0 || n > max) {
                    return Err(ctx.err(v.span(), format!("sweep.n entry {bad} outside 1..={max}")));
                }
                v.into_inner()
            }
            None => default,
        });
    } else {
        ctx.reject(&raw.n, "sweep.n", preset)?;
    }
    if want_m {
        let max = if preset == Preset::GramAnalysis { 20 } else { 6 };
        out.m = Some(match raw.m {
            Some(v) if *v.get_ref() == 0 || *v.get_ref() > max => {
                return Err(ctx.err(v.span(), format!("sweep.m outside 1..={max}")))
            }
            Some(v) => v.into_inner(),
            None => 2,
        });
    } else {
        ctx.reject(&raw.m, "sweep.m", preset)?;
    }
    Ok(Some(out))
}

fn resolve_target(
    preset: Preset,
    raw: RawTarget,
    sweep: Option<&SweepSpec>,
    ctx: &Ctx<'_>,
) -> Result<TargetSpec, ConfigError> {
    let mut out = TargetSpec::default();
    if preset == Preset::MetrologyTable {
        ctx.reject(&raw.probs, "target.probs", preset)?;
        ctx.reject(&raw.prior, "target.prior", preset)?;
        ctx.reject(&raw.mu, "target.mu", preset)?;
        let m = sweep.and_then(|s| s.m).unwrap_or(2);
        out.phase = Some(match &raw.phase {
            Some(v) => ctx.distribution(v, "target.phase", 1 << m)?,
            None if m == 2 => DEFAULT_PHASE_TARGET.to_vec(),
            None => {
                return Err(ConfigError {
                    message: format!("target.phase is required when sweep.m = {m}"),
                    line: None,
                })
            }
        });
        return Ok(out);
    }
    ctx.reject(&raw.phase, "target.phase", preset)?;
    let explicit_allowed = preset.fixed_uses().is_some() && preset != Preset::SpatialMuSweep;
    if let Some(v) = &raw.probs {
        if !explicit_allowed {
            return Err(ctx.err(v.span(), format!("target.probs is not used by preset {preset}")));
        }
        if let Some(o) = &raw.prior {
            return Err(ctx.err(o.span(), "target.prior conflicts with target.probs"));
        }
        if let Some(o) = &raw.mu {
            return Err(ctx.err(o.span(), "target.mu conflicts with target.probs"));
        }
        let n = preset.fixed_uses().expect("fixed");
        out.probs = Some(ctx.distribution(v, "target.probs", 1 << (2 * n))?);
        return Ok(out);
    }
    out.prior = Some(match &raw.prior {
        Some(v) => ctx.distribution(v, "target.prior", 4)?,
        None => DEFAULT_PRIOR.to_vec(),
    });
    match preset {
        Preset::Spatial1Use => ctx.reject(&raw.mu, "target.mu", preset)?,
        Preset::SpatialMuSweep => ctx.reject(&raw.mu, "target.mu", preset)?,
        _ => {
            let default = if preset == Preset::TemporalMuOnlyNSweep {
                DEFAULT_MU_ONLY_TARGET
            } else {
                DEFAULT_MU
            };
            out.mu = Some(match &raw.mu {
                Some(v) => ctx.mu(v, "target.mu")?,
                None => default,
            });
        }
    }
    Ok(out)
}

fn resolve_generator(
    preset: Preset,
    raw: Option<Spanned<GeneratorKind>>,
    target: Option<&TargetSpec>,
    ctx: &Ctx<'_>,
) -> Result<GeneratorKind, ConfigError> {
    let default = match preset {
        Preset::SpatialMuSweep => GeneratorKind::Factorized,
        Preset::TemporalMuOnlyNSweep => GeneratorKind::MuOnly,
        _ => GeneratorKind::Full,
    };
    let Some(g) = raw else { return Ok(default) };
    let kind = *g.get_ref();
    let explicit = target.is_some_and(|t| t.probs.is_some());
    let ok = match preset {
        Preset::MetrologyTable => kind == GeneratorKind::Full,
        Preset::TemporalMuOnlyNSweep => kind == GeneratorKind::MuOnly,
        _ => !(kind == GeneratorKind::MuOnly && explicit),
    };
    if !ok {
        return Err(ctx.err(
            g.span(),
            format!("generator {kind:?} is not available for preset {preset} with this target"),
        ));
    }
    Ok(kind)
}

fn resolve_game(
    preset: Preset,
    raw: Option<Spanned<GameOverrides>>,
    sweep: Option<&SweepSpec>,
    ctx: &Ctx<'_>,
) -> Result<GameOverrides, ConfigError> {
    let (span, mut game) = match raw {
        Some(g) => (Some(g.span()), g.into_inner()),
        None => (None, GameOverrides::default()),
    };
    let (stop, threshold) = match preset {
        Preset::TemporalMuOnlyNSweep => (StopMetric::AvgFidelity, 0.999),
        Preset::MetrologyTable => (StopMetric::ChoiFidelity, 0.99999),
        _ => (StopMetric::Never, 0.999),
    };
    game.stop_metric.get_or_insert(stop);
    game.fidelity_threshold.get_or_insert(threshold);
    game.max_turns.get_or_insert(DEFAULT_MAX_TURNS);
    let uses: Vec<usize> = match preset.fixed_uses() {
        Some(n) => vec![n],
        None => sweep.and_then(|s| s.n.clone()).unwrap_or_default(),
    };
    for n in uses {
        game_config(preset, &game, n, 0).validate().map_err(|e| ConfigError {
            message: format!("game: {e}"),
            line: span.clone().map(|s| ctx.line(s)),
        })?;
    }
    Ok(game)
}

/// Game settings for `n` uses under `preset` with `overrides` applied.
pub fn game_config(preset: Preset, overrides: &GameOverrides, n: usize, seed: u64) -> GameConfig {
    let mut g = match preset {
        Preset::Temporal2Use | Preset::TemporalMuOnlyNSweep => GameConfig::temporal(n),
        Preset::MetrologyTable => GameConfig::metrology(n),
        _ => GameConfig::spatial(n),
    };
    debug_assert_eq!(
        g.correlation_kind == CorrelationKind::Temporal,
        matches!(preset, Preset::Temporal2Use | Preset::TemporalMuOnlyNSweep)
    );
    let o = overrides;
    g.ancilla_count = o.ancilla_count.unwrap_or(g.ancilla_count);
    g.init_depth = o.init_depth.unwrap_or(g.init_depth);
    g.mid_depth = o.mid_depth.unwrap_or(g.mid_depth);
    g.learning_rate_d = o.learning_rate_d.unwrap_or(g.learning_rate_d);
    g.learning_rate_g = o.learning_rate_g.unwrap_or(g.learning_rate_g);
    g.d_steps_per_turn = o.d_steps_per_turn.unwrap_or(g.d_steps_per_turn);
    g.g_steps_per_turn = o.g_steps_per_turn.unwrap_or(g.g_steps_per_turn);
    g.max_turns = o.max_turns.unwrap_or(g.max_turns);
    g.fidelity_threshold = o.fidelity_threshold.unwrap_or(g.fidelity_threshold);
    g.stop_metric = o.stop_metric.unwrap_or(g.stop_metric);
    g.seed = seed;
    g
}

impl ExperimentConfig {
    /// Re-emits the resolved configuration as a document.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is representable")
    }

    /// Sets the turn budget of every run.
    pub fn set_max_turns(&mut self, turns: usize) {
        if let Some(g) = self.game.as_mut() {
            g.max_turns = Some(turns);
        }
    }
}
