use bozd::config::{GridSpec, RunConfig};
use bozd::{Error, RationalInitialData, SolverConfig, C64};

fn sample() -> RunConfig {
    RunConfig {
        subcommand: "profile".into(),
        data: None,
        builtin: Some("two-pole".into()),
        t: GridSpec::new(0.5, 4.5, 9).unwrap(),
        x: GridSpec::new(-2.0, 6.0, 81).unwrap(),
        epsilons: vec![1.0 / 16.0, 0.1],
        solver: SolverConfig::default(),
        output_dir: "out".into(),
        workers: Some(3),
    }
}

#[test]
fn canonical_form_round_trips() {
    let c = sample();
    let text = c.canonical();
    let back = RunConfig::from_toml_str(&text).unwrap();
    assert_eq!(back, c);
    assert_eq!(back.canonical(), text);
    let json = serde_json::to_string(&c).unwrap();
    assert_eq!(RunConfig::from_json_str(&json).unwrap(), c);
}

#[test]
fn unknown_keys_are_rejected() {
    let text = format!("{}\nbogus = 1\n", sample().canonical());
    assert!(matches!(RunConfig::from_toml_str(&text), Err(Error::Input(_))));
    let text = sample().canonical().replace("[t]\n", "[t]\nstep = 2\n");
    assert!(RunConfig::from_toml_str(&text).is_err());
}

#[test]
fn invalid_values_are_named() {
    let mut c = sample();
    c.epsilons = vec![0.1, -0.2];
    match c.validate() {
        Err(Error::InvalidConfig(m)) => assert!(m.contains("index 1"), "{m}"),
        other => panic!("{other:?}"),
    }
    let mut c = sample();
    c.t = GridSpec { start: 0.0, end: 1.0, n: 3 };
    assert!(matches!(c.validate(), Err(Error::NonPositiveTime(_))));
    let mut c = sample();
    c.builtin = Some("gaussian".into());
    assert!(c.validate().is_err());
    assert!(GridSpec::new(1.0, 0.0, 5).is_err());
    assert!(GridSpec::new(1.0, 1.0, 0).is_err());
    assert_eq!(GridSpec::new(2.0, 0.0, 1).unwrap().points(), vec![2.0]);
}

#[test]
fn grid_points_hit_both_ends() {
    let g = GridSpec::new(-2.0, 6.0, 81).unwrap();
    let p = g.points();
    assert_eq!(p.len(), 81);
    assert_eq!(p[0], -2.0);
    assert_eq!(p[80], 6.0);
}

#[test]
fn initial_data_documents_round_trip() {
    let d = RationalInitialData::two_pole_fixture();
    let doc = d.to_doc();
    let back = RationalInitialData::from_doc(&doc).unwrap();
    assert_eq!(back, d);
    let text = toml::to_string(&doc).unwrap();
    assert_eq!(RationalInitialData::from_toml_str(&text).unwrap(), d);
}

#[test]
fn malformed_poles_name_their_index() {
    let bad = RationalInitialData::new(
        vec![C64::new(0.0, 1.0), C64::new(2.0, -1.0)],
        vec![C64::new(1.0, 1.0), C64::new(1.0, 1.0)],
    );
    assert!(matches!(bad, Err(Error::InvalidData { index: 1, .. })));
    let dup = RationalInitialData::new(vec![C64::new(0.0, 1.0); 2], vec![C64::new(1.0, 1.0); 2]);
    assert!(matches!(dup, Err(Error::InvalidData { .. })));
    assert!(RationalInitialData::from_toml_str("poles = [[0.0, 1.0]]\nresidues = []\n").is_err());
}
