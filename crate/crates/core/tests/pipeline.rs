use iron::geometry::geodesic_error;
use iron::metrics::evaluate;
use iron::pipeline::{default_config, iron, ConfigFile, ScaleMode};
use iron::synth::{make_problem, ProblemSpec};
use iron::Error;

#[test]
fn unknown_scale_at_ninety_five_percent() {
    for seed in 0..5 {
        let p = make_problem(&ProblemSpec::new(1000, 0.95, 0.01, (1.0, 5.0), seed), None).unwrap();
        let mut config = default_config(0.01, ScaleMode::Unknown, false).unwrap();
        config.seed = seed;
        let r = iron(&p.correspondences, &config).unwrap();
        let m = evaluate(&r, &p).unwrap();
        assert!(m.rotation_error_deg < 1.0, "seed {seed}: {m:?}");
        assert!(m.scale_error < 0.05, "seed {seed}: {m:?}");
        assert_eq!(m.recall_cond2, 1.0, "seed {seed}: {m:?}");
        assert!(r.gnc.solve_reports.iter().all(|s| s.certified));
    }
}

#[test]
fn known_scale_is_used_verbatim() {
    let p = make_problem(&ProblemSpec::new(500, 0.8, 0.01, (2.5, 2.5), 4), None).unwrap();
    let config = default_config(0.01, ScaleMode::Known(2.5), false).unwrap();
    let r = iron(&p.correspondences, &config).unwrap();
    assert_eq!(r.transform.scale, 2.5);
    assert!(geodesic_error(&r.transform.rotation, &p.ground_truth.rotation).to_degrees() < 1.0);
}

#[test]
fn same_seed_same_answer() {
    let p = make_problem(&ProblemSpec::new(600, 0.9, 0.01, (1.0, 5.0), 5), None).unwrap();
    let mut config = default_config(0.01, ScaleMode::Unknown, false).unwrap();
    config.seed = 9;
    let a = iron(&p.correspondences, &config).unwrap();
    let b = iron(&p.correspondences, &config).unwrap();
    assert_eq!(a.transform, b.transform);
    assert_eq!(a.inlier_weights, b.inlier_weights);
    assert_eq!(a.ransic, b.ransic);
}

#[test]
fn exhausted_sampling_is_labelled_with_its_stage() {
    let p = make_problem(&ProblemSpec::new(300, 0.97, 0.01, (1.0, 5.0), 6), None).unwrap();
    let mut config = default_config(0.01, ScaleMode::Unknown, false).unwrap();
    config.ransic.max_samples = 10;
    let err = iron(&p.correspondences, &config).unwrap_err();
    assert!(matches!(&err, Error::Stage { stage, .. } if *stage == "ransic"), "{err}");
    assert!(matches!(err.root(), Error::NoConsensus { samples_drawn: 10, .. }));
}

#[test]
fn config_file_drives_the_pipeline() {
    let text = "mode = \"unknown\"\nsigma = 0.01\nseed = 3\n[gnc]\nmax_it = 12\n";
    let config = ConfigFile::parse(text).unwrap().resolve().unwrap();
    assert_eq!(config.gnc.max_it, 12);
    let p = make_problem(&ProblemSpec::new(400, 0.7, 0.01, (1.0, 5.0), 7), None).unwrap();
    let r = iron(&p.correspondences, &config).unwrap();
    assert!(r.gnc.iterations <= 12);
    assert!((r.transform.scale - p.ground_truth.scale).abs() < 0.05);
}
