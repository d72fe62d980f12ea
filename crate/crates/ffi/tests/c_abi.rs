use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use qecdesign::cli::config::ToolConfig;
use qecdesign::eval::split_by_profile;
use qecdesign::labels::build_labels;
use qecdesign::{
    generate_dataset, save_model, ModelSpec, NoiseProfile, PredictionRequest, Recommender,
};
use qecdesign_ffi::*;

fn last_error() -> String {
    let p = qd_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

fn trained_model(dir: &Path) -> (PathBuf, qecdesign::Model) {
    let mut cfg = ToolConfig::default().with_seed(3);
    cfg.sweep.profiles_per_run = 10;
    let records = generate_dataset(&cfg.sweep, &cfg.oracle).unwrap();
    let (train, _) = split_by_profile(&records, &cfg.split).unwrap();
    let examples = build_labels(&train, &cfg.labels.targets).unwrap();
    let model = ModelSpec::Pipeline
        .fit(&examples, &cfg.train_settings())
        .unwrap();
    let path = dir.join("model.json");
    save_model(&model, &path).unwrap();
    (path, model)
}

#[test]
fn model_handle_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (path, model) = trained_model(dir.path());
    let c_path = CString::new(path.to_str().unwrap()).unwrap();
    let mut handle = ptr::null_mut();
    assert_eq!(
        unsafe { qd_model_load(c_path.as_ptr(), &mut handle) },
        QdStatus::Ok
    );
    assert!(qd_last_error_message().is_null());

    let mut out = QdPrediction::default();
    let s = unsafe { qd_model_predict(handle, 2e-4, 1e-3, 3e-4, 2e-3, 1e-7, &mut out) };
    assert_eq!(s, QdStatus::Ok);
    let req =
        PredictionRequest::new(NoiseProfile::new(2e-4, 1e-3, 3e-4, 2e-3).unwrap(), 1e-7).unwrap();
    let direct = model.recommend(&req).unwrap();
    assert_eq!(out.raw_distance, direct.raw_distance);
    assert_eq!(out.rounded_distance, direct.rounded_distance);
    assert_eq!(out.rounded_rounds, direct.rounded_rounds);

    let s = unsafe { qd_model_predict(handle, 2e-4, 1e-3, 3e-4, 2e-3, 0.0, &mut out) };
    assert_eq!(s, QdStatus::InvalidInput);
    assert!(last_error().contains("target"));
    unsafe { qd_model_free(handle) };
    unsafe { qd_model_free(ptr::null_mut()) };
}

#[test]
fn load_errors_map_to_codes() {
    let dir = tempfile::tempdir().unwrap();
    let mut handle = ptr::null_mut();
    let missing = CString::new(dir.path().join("none.json").to_str().unwrap()).unwrap();
    assert_eq!(
        unsafe { qd_model_load(missing.as_ptr(), &mut handle) },
        QdStatus::Io
    );
    assert!(last_error().contains("none.json"));

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "not json").unwrap();
    let bad = CString::new(bad.to_str().unwrap()).unwrap();
    assert_eq!(
        unsafe { qd_model_load(bad.as_ptr(), &mut handle) },
        QdStatus::CorruptModel
    );
    assert_eq!(
        unsafe { qd_model_load(ptr::null(), &mut handle) },
        QdStatus::NullArgument
    );
    assert!(handle.is_null());
}

#[test]
fn stateless_functions() {
    let mut u = 0u32;
    assert_eq!(unsafe { qd_round_distance(4.2, &mut u) }, QdStatus::Ok);
    assert_eq!(u, 5);
    assert_eq!(unsafe { qd_round_rounds(0.3, &mut u) }, QdStatus::Ok);
    assert_eq!(u, 1);
    assert_eq!(
        unsafe { qd_round_distance(f64::NAN, &mut u) },
        QdStatus::InvalidInput
    );
    assert_eq!(
        unsafe { qd_round_rounds(1.0, ptr::null_mut()) },
        QdStatus::NullArgument
    );

    let mut ler = 0.0;
    assert_eq!(
        unsafe { qd_oracle_logical_error_rate(5, 5, 0.0, 1e-3, 0.0, 0.0, &mut ler) },
        QdStatus::Ok
    );
    assert!(ler > 0.0 && ler < 1.0);
    let s = unsafe { qd_oracle_logical_error_rate(5, 5, 1e-2, 2e-2, 1e-2, 5e-2, &mut ler) };
    assert_eq!(s, QdStatus::AboveThreshold);

    let (mut d, mut r) = (0u32, 0u32);
    assert_eq!(
        unsafe { qd_find_optimal_params(2e-4, 1e-3, 3e-4, 2e-3, 1e-6, &mut d, &mut r) },
        QdStatus::Ok
    );
    let mut check = 0.0;
    unsafe { qd_oracle_logical_error_rate(d, r, 2e-4, 1e-3, 3e-4, 2e-3, &mut check) };
    assert!(check <= 1e-6);
    let s = unsafe { qd_find_optimal_params(1e-3, 6e-3, 1e-3, 1e-2, 1e-14, &mut d, &mut r) };
    assert_eq!(s, QdStatus::Infeasible);

    let v = unsafe { CStr::from_ptr(qd_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include/qecdesign.h")
}

#[test]
fn header_compiles_as_c_and_cpp() {
    for (cc, lang) in [("cc", "c"), ("c++", "c++")] {
        let st = Command::new(cc)
            .args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang])
            .arg(header())
            .status()
            .unwrap();
        assert!(st.success(), "{cc} rejected the header");
    }
}

#[test]
fn c_program_links_against_the_static_library() {
    // target/<profile>/deps/<test binary> -> target/<profile>
    let exe = std::env::current_exe().unwrap();
    let lib_dir = exe.parent().unwrap().parent().unwrap();
    let lib = lib_dir.join("libqecdesign_ffi.a");
    assert!(lib.is_file(), "{} not built", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(
        &src,
        r#"#include <stdio.h>
#include "qecdesign.h"
int main(void) {
    uint32_t d = 0;
    if (qd_round_distance(6.0, &d) != QD_STATUS_OK || d != 7) return 1;
    QdModel *m = NULL;
    if (qd_model_load("/nonexistent.json", &m) != QD_STATUS_IO) return 2;
    if (qd_last_error_message() == NULL || m != NULL) return 3;
    printf("%s\n", qd_version());
    return 0;
}
"#,
    )
    .unwrap();
    let bin = dir.path().join("main");
    let st = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(st.success(), "link failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert_eq!(
        String::from_utf8(out.stdout).unwrap().trim(),
        env!("CARGO_PKG_VERSION")
    );
}
