use fss_cli::config::{load_config, parse_config, ConfigError, ExperimentConfig, Mode, Plan, TrapConfig, Units};
use proptest::prelude::*;

fn problems(text: &str) -> Vec<String> {
    match load_config(text) {
        Err(ConfigError::Invalid(p)) => p,
        other => panic!("expected validation problems, got {other:?}"),
    }
}

#[test]
fn minimal_single_experiment() {
    let plan = load_config(
        r#"
        mode = "exact-canonical"
        atoms = 100
        temperatures = [10.0, 20.0]
        trap = { kind = "harmonic1d" }
        "#,
    )
    .unwrap();
    assert_eq!(plan.experiment.len(), 1);
    let e = &plan.experiment[0];
    assert_eq!(e.mode, Mode::ExactCanonical);
    assert_eq!(e.label(), "exact-canonical");
    assert_eq!(e.trap, Some(TrapConfig::Harmonic1d { omega: 1.0 }));
    assert!(e.wants_exact());
}

#[test]
fn several_experiments_get_numbered_labels() {
    let plan = load_config(
        r#"
        name = "two"
        output = "somewhere"
        [[experiment]]
        mode = "exact-canonical"
        atoms = 10
        temperatures = [1.0]
        trap = { kind = "ring1d" }
        [[experiment]]
        mode = "exact-micro"
        atoms = 10
        energies = [0, 5, 10]
        trap = { kind = "harmonic3d", aspect_ratio = 2.0 }
        "#,
    )
    .unwrap();
    let labels: Vec<&str> = plan.experiment.iter().map(|e| e.label()).collect();
    assert_eq!(labels, ["00-exact-canonical", "01-exact-micro"]);
    assert_eq!(plan.output.as_deref(), Some(std::path::Path::new("somewhere")));
}

#[test]
fn attractive_coupling_is_rejected() {
    let p = problems(
        r#"
        mode = "sample"
        atoms = 10
        coupling = -0.1
        temperatures = [5.0]
        trap = { kind = "ring1d" }
        "#,
    );
    assert_eq!(p, ["[sample] coupling -0.1: attractive interactions unsupported"]);
}

#[test]
fn exact_micro_needs_an_integer_grid() {
    let p = problems(
        r#"
        mode = "exact-micro"
        atoms = 10
        energies = [3]
        trap = { kind = "harmonic3d", aspect_ratio = 2.5 }
        "#,
    );
    assert_eq!(p.len(), 1, "{p:?}");
    assert!(p[0].contains("integer energy grid"), "{p:?}");
}

#[test]
fn unknown_keys_are_parse_errors() {
    for text in [
        "mode = \"sample\"\natom = 10\n",
        "mode = \"sample\"\n[sampler]\nsample = 10\n",
        "mode = \"sample\"\ntrap = { kind = \"ring1d\", omega = 2.0 }\n",
        "mode = \"anneal\"\n",
    ] {
        assert!(matches!(parse_config(text), Err(ConfigError::Parse(_))), "{text}");
    }
}

#[test]
fn units_must_belong_to_the_trap() {
    let p = problems(
        r#"
        mode = "exact-canonical"
        atoms = 10
        temperatures = [1.0]
        trap = { kind = "ring1d" }
        units = { temperature = "hbar*omega/k_B", energy = "2*pi^2 * hbar^2/(m*L^2)" }
        "#,
    );
    assert_eq!(p.len(), 1, "{p:?}");
    assert!(p[0].starts_with("[exact-canonical] units.temperature = \"hbar*omega/k_B\" does not match"), "{p:?}");
}

#[test]
fn every_problem_is_reported() {
    let p = problems(
        r#"
        mode = "postselect"
        coupling = -1.0
        temperatures = [1.0, -2.0]
        [sampler]
        chains = 2
        [postselect]
        degree = 5
        "#,
    );
    let text = p.join("\n");
    for needle in ["trap is missing", "atoms is missing", "attractive", "positive and finite", "chains = 2", "degree must be"] {
        assert!(text.contains(needle), "missing {needle:?} in\n{text}");
    }
    let err = ConfigError::Invalid(p.clone()).to_string();
    assert!(err.starts_with(&format!("invalid configuration ({} problems):", p.len())));
}

#[test]
fn peak_scans_need_five_temperatures() {
    let p = problems(
        r#"
        mode = "scan-peak"
        atoms = 10
        temperatures = [1.0, 2.0, 3.0, 4.0]
        trap = { kind = "harmonic1d" }
        "#,
    );
    assert_eq!(p, ["[scan-peak] locating a peak needs at least 5 temperatures, got 4"]);
}

#[test]
fn duplicate_labels() {
    let p = problems(
        r#"
        [[experiment]]
        mode = "verify"
        label = "v"
        [[experiment]]
        mode = "verify"
        label = "v"
        "#,
    );
    assert_eq!(p, ["label \"v\" is used by more than one experiment"]);
}

#[test]
fn scaling_keeps_at_least_one() {
    let mut plan = load_config(
        r#"
        mode = "sample"
        atoms = 3
        temperatures = [1.0]
        trap = { kind = "ring1d" }
        sampler = { samples = 5 }
        "#,
    )
    .unwrap();
    plan = plan.scaled(10.0);
    assert_eq!(plan.experiment[0].atoms, Some(1));
    assert_eq!(plan.experiment[0].sampler.samples, 1);
}

fn arb_trap() -> impl Strategy<Value = TrapConfig> {
    prop_oneof![
        (0.5f64..3.0).prop_map(|length| TrapConfig::Ring1d { length }),
        (0.5f64..3.0).prop_map(|omega| TrapConfig::Harmonic1d { omega }),
        (1u32..20).prop_map(|l| TrapConfig::Harmonic3d { aspect_ratio: f64::from(l) }),
    ]
}

fn arb_experiment() -> impl Strategy<Value = ExperimentConfig> {
    (
        prop_oneof![Just(Mode::Sample), Just(Mode::ExactCanonical), Just(Mode::ScanPeak), Just(Mode::Postselect)],
        arb_trap(),
        1usize..500,
        prop::collection::vec(0.1f64..100.0, 5..10),
        any::<bool>(),
        (1usize..5000, 4usize..64, 0u64..=i64::MAX as u64),
        prop::option::of(1u64..10),
        any::<bool>(),
    )
        .prop_map(|(mode, trap, atoms, mut temps, relative, (samples, chains, seed), thinning, units)| {
            temps.sort_by(f64::total_cmp);
            temps.dedup();
            let mut e = ExperimentConfig::new(mode);
            e.trap = Some(trap);
            e.atoms = Some(atoms);
            if relative {
                e.relative_temperatures = Some(temps);
            } else {
                e.temperatures = Some(temps);
            }
            e.sampler.samples = samples;
            e.sampler.chains = chains;
            e.sampler.seed = seed;
            e.sampler.thinning = thinning;
            if units {
                e.units = Some(Units { temperature: Some(trap.units().temperature.to_string()), ..Units::default() });
            }
            e
        })
}

proptest! {
    #[test]
    fn serialising_a_parsed_plan_is_stable(experiments in prop::collection::vec(arb_experiment(), 1..4)) {
        let mut plan = Plan { name: Some("p".into()), output: None, experiment: experiments };
        plan.normalize();
        let first = plan.to_toml();
        let parsed = load_config(&first).unwrap();
        prop_assert_eq!(&parsed, &plan);
        prop_assert_eq!(parsed.to_toml(), first);
    }
}
