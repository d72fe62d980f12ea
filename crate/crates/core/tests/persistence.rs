use qecdesign::cli::config::ToolConfig;
use qecdesign::eval::split_by_profile;
use qecdesign::labels::build_labels;
use qecdesign::{
    generate_dataset, load_model, save_model, Error, ModelSpec, NoiseProfile, PredictionRequest,
    Recommender,
};

#[test]
fn every_model_kind_survives_a_round_trip() {
    let mut cfg = ToolConfig::default().with_seed(7);
    cfg.sweep.profiles_per_run = 10;
    let records = generate_dataset(&cfg.sweep, &cfg.oracle).unwrap();
    let (train, _) = split_by_profile(&records, &cfg.split).unwrap();
    let examples = build_labels(&train, &cfg.labels.targets).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let req =
        PredictionRequest::new(NoiseProfile::new(2e-4, 1e-3, 3e-4, 2e-3).unwrap(), 1e-7).unwrap();

    for spec in ModelSpec::roster() {
        let model = spec.fit(&examples, &cfg.train_settings()).unwrap();
        let path = dir
            .path()
            .join(format!("{}.json", spec.to_string().replace(':', "_")));
        save_model(&model, &path).unwrap();
        let back = load_model(&path).unwrap();
        assert_eq!(back, model, "{spec}");
        assert_eq!(
            back.recommend(&req).unwrap(),
            model.recommend(&req).unwrap(),
            "{spec}"
        );
    }
}

#[test]
fn corrupt_model_files_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"kind\": \"pipeline\"").unwrap();
    assert!(!matches!(load_model(&path), Ok(_) | Err(Error::Io { .. })));
    assert!(matches!(
        load_model(&dir.path().join("none.json")),
        Err(Error::Io { .. })
    ));
}
