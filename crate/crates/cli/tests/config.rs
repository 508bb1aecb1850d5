use proptest::prelude::*;
use qnoise::game::StopMetric;
use qnoise_cli::config::{GeneratorKind, DEFAULT_MAX_TURNS, DEFAULT_MU_SWEEP, DEFAULT_N_SWEEP, DEFAULT_PRIOR};
use qnoise_cli::{parse_config, parse_config_as, Preset};

#[test]
fn minimal_single_use_document_gets_defaults() {
    let cfg = parse_config(
        r#"
preset = "spatial_1use"

[target]
probs = [0.55, 0.2, 0.15, 0.1]
"#,
    )
    .unwrap();
    assert_eq!(cfg.preset, Preset::Spatial1Use);
    assert_eq!(cfg.seed, 0);
    assert_eq!(cfg.repetitions, 1);
    assert_eq!(cfg.output_dir, std::path::Path::new("results/spatial_1use"));
    assert_eq!(cfg.generator, Some(GeneratorKind::Full));
    let target = cfg.target.unwrap();
    assert_eq!(target.probs.as_deref(), Some(&[0.55, 0.2, 0.15, 0.1][..]));
    assert_eq!(target.prior, None);
    let game = cfg.game.unwrap();
    assert_eq!(game.max_turns, Some(DEFAULT_MAX_TURNS));
    assert_eq!(game.stop_metric, Some(StopMetric::Never));
    assert_eq!(game.learning_rate_d, None);
    assert_eq!(cfg.sweep, None);
}

#[test]
fn empty_document_takes_preset_from_the_subcommand() {
    let cfg = parse_config_as("", Some(Preset::SpatialMuSweep)).unwrap();
    assert_eq!(cfg.generator, Some(GeneratorKind::Factorized));
    assert_eq!(cfg.sweep.unwrap().mu.unwrap(), DEFAULT_MU_SWEEP.to_vec());
    assert_eq!(cfg.target.unwrap().prior.unwrap(), DEFAULT_PRIOR.to_vec());

    let cfg = parse_config_as("", Some(Preset::TemporalMuOnlyNSweep)).unwrap();
    assert_eq!(cfg.generator, Some(GeneratorKind::MuOnly));
    assert_eq!(cfg.sweep.unwrap().n.unwrap(), DEFAULT_N_SWEEP.to_vec());
    let game = cfg.game.unwrap();
    assert_eq!(game.stop_metric, Some(StopMetric::AvgFidelity));
    assert_eq!(game.fidelity_threshold, Some(0.999));

    let cfg = parse_config_as("", Some(Preset::MetrologyTable)).unwrap();
    assert_eq!(cfg.game.unwrap().fidelity_threshold, Some(0.99999));
    assert_eq!(cfg.target.unwrap().phase.unwrap().len(), 4);

    let cfg = parse_config_as("", Some(Preset::GramAnalysis)).unwrap();
    assert!(cfg.game.is_none() && cfg.target.is_none() && cfg.generator.is_none());
}

#[test]
fn unnormalized_vector_names_the_field_and_line() {
    let err = parse_config(
        "preset = \"spatial_1use\"\n\n[target]\nprobs = [0.4, 0.2, 0.2, 0.1]\n",
    )
    .unwrap_err();
    assert_eq!(err.line, Some(4));
    assert!(err.message.contains("target.probs"), "{err}");
    assert!(err.message.contains("not normalized"), "{err}");
    assert!(err.to_string().starts_with("line 4:"));
}

#[test]
fn unknown_and_malformed_keys_report_lines() {
    let err = parse_config("preset = \"spatial_1use\"\nseed = 3\nturns = 9\n").unwrap_err();
    assert_eq!(err.line, Some(3));
    assert!(err.message.contains("turns"));

    let err = parse_config("preset = \"spatial_1use\"\n[game]\nmax_turns = \"many\"\n").unwrap_err();
    assert_eq!(err.line, Some(3));

    let err = parse_config("preset = \"spatial_1use\"\n[game]\nstep = 1\n").unwrap_err();
    assert_eq!(err.line, Some(3));

    let err = parse_config("preset = \"fig_7\"\n").unwrap_err();
    assert_eq!(err.line, Some(1));
}

#[test]
fn missing_or_conflicting_fields_are_rejected() {
    let err = parse_config("seed = 1\n").unwrap_err();
    assert!(err.message.contains("preset"));
    assert_eq!(err.line, None);

    let err = parse_config_as("preset = \"gram_analysis\"\n", Some(Preset::Spatial1Use)).unwrap_err();
    assert_eq!(err.line, Some(1));

    let cases = [
        ("preset = \"spatial_1use\"\n[target]\nphase = [0.5, 0.5]\n", 3, "target.phase"),
        ("preset = \"gram_analysis\"\n[game]\nmax_turns = 3\n", 2, "game"),
        ("preset = \"spatial_2use_correlated\"\n[target]\nprobs = [1.0]\n", 3, "16"),
        ("preset = \"spatial_2use_correlated\"\n[target]\nmu = 1.5\n", 3, "target.mu"),
        ("preset = \"metrology_table\"\ngenerator = \"factorized\"\n", 2, "generator"),
        ("preset = \"spatial_1use\"\nrepetitions = 0\n", 2, "repetitions"),
        ("preset = \"metrology_table\"\n[sweep]\nm = 3\n", 0, "target.phase"),
        ("preset = \"temporal_2use\"\n\n[game]\nd_steps_per_turn = 0\n", 3, "step counts"),
    ];
    for (doc, line, needle) in cases {
        let err = parse_config(doc).unwrap_err();
        assert!(err.message.contains(needle), "{doc:?}: {err}");
        assert_eq!(err.line.unwrap_or(0), line, "{doc:?}: {err}");
    }
}

fn preset_strategy() -> impl Strategy<Value = Preset> {
    prop_oneof![
        Just(Preset::Spatial1Use),
        Just(Preset::Spatial2UseCorrelated),
        Just(Preset::SpatialMuSweep),
        Just(Preset::Temporal2Use),
        Just(Preset::TemporalMuOnlyNSweep),
        Just(Preset::MetrologyTable),
        Just(Preset::GramAnalysis),
    ]
}

fn distribution(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..1.0, len).prop_map(|w| {
        let z: f64 = w.iter().sum();
        w.into_iter().map(|x| x / z).collect()
    })
}

fn list<T: std::fmt::Display>(xs: &[T]) -> String {
    let items: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
    format!("[{}]", items.join(", "))
}

fn floats(xs: &[f64]) -> String {
    let items: Vec<String> = xs.iter().map(|x| format!("{x:?}")).collect();
    format!("[{}]", items.join(", "))
}

prop_compose! {
    fn document()(
        preset in preset_strategy(),
        seed in any::<u32>(),
        reps in 1usize..20,
        prior in distribution(4),
        phase in distribution(4),
        mu in 0.0f64..=1.0,
        mus in prop::collection::vec(0.0f64..=1.0, 1..4),
        ns in prop::collection::vec(1usize..5, 1..3),
        max_turns in prop::option::of(1usize..1000),
        lr in prop::option::of(0.01f64..0.25),
    ) -> String {
        let mut doc = format!("preset = \"{}\"\nseed = {seed}\nrepetitions = {reps}\n", preset.name());
        match preset {
            Preset::Spatial1Use => doc += &format!("[target]\nprior = {}\n", floats(&prior)),
            Preset::Spatial2UseCorrelated | Preset::Temporal2Use => {
                doc += &format!("[target]\nprior = {}\nmu = {mu:?}\n", floats(&prior))
            }
            Preset::SpatialMuSweep => {
                doc += &format!("[target]\nprior = {}\n[sweep]\nmu = {}\n", floats(&prior), floats(&mus))
            }
            Preset::TemporalMuOnlyNSweep => {
                doc += &format!("[target]\nmu = {mu:?}\n[sweep]\nn = {}\n", list(&ns))
            }
            Preset::MetrologyTable => {
                doc += &format!("[target]\nphase = {}\n[sweep]\nn = {}\n", floats(&phase), list(&ns))
            }
            Preset::GramAnalysis => doc += &format!("[sweep]\nn = {}\nm = 3\n", list(&ns)),
        }
        if preset != Preset::GramAnalysis {
            doc += "[game]\n";
            if let Some(t) = max_turns {
                doc += &format!("max_turns = {t}\n");
            }
            if let Some(lr) = lr {
                doc += &format!("learning_rate_g = {lr:?}\n");
            }
        }
        doc
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn serialized_config_parses_back_equal(doc in document()) {
        let cfg = parse_config(&doc).unwrap();
        let again = parse_config(&cfg.to_toml()).unwrap();
        prop_assert_eq!(&again, &cfg);
        prop_assert_eq!(again.to_toml(), cfg.to_toml());
    }
}
