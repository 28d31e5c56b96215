//! Every config shipped in `configs/` validates and runs at reduced length.

use std::path::Path;

use ccm_core::config::RunConfig;

#[test]
fn every_run_config_validates_and_runs() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut ran = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        if value.get("method").is_some() {
            continue;
        }
        let mut cfg = RunConfig::from_path(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        cfg.sampler.burnin = cfg.sampler.burnin.min(5000);
        cfg.sampler.interval = cfg.sampler.interval.min(20);
        cfg.sampler.sample_size = 50;
        let out = ccm_core::run(&cfg.spec, &cfg.sampler).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(out.stats.len(), 50);
        assert!(out.stats.iter().all(|r| r.len() == cfg.spec.dim() && r.iter().all(|x| x.is_finite())));
        if let Some(stage) = cfg.stage_sampler(out.final_state.clone()) {
            let s = ccm_core::run(&cfg.spec, &stage).unwrap();
            assert_eq!(s.ensemble.len(), stage.sample_size);
        }
        ran += 1;
    }
    assert!(ran >= 8, "only {ran} run configs found");
}

#[test]
fn observation_files_produce_posteriors() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    for name in ["school_observations.json", "dixon_sample_observations.json"] {
        let out = tempfile::tempdir().unwrap();
        let mut sink = Vec::new();
        let code = ccm_core::cli::run(
            ["ccm", "posterior", "--input", dir.join(name).to_str().unwrap(), "--out", out.path().to_str().unwrap()],
            &mut sink,
        );
        assert_eq!(code, 0, "{name}");
        RunConfig::from_path(&out.path().join("ccm_config.json")).unwrap();
    }
}
