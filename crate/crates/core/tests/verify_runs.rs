use travelwave_core::defaults;
use travelwave_core::pde::{verify, VerifyConfig, VerifyReport};
use travelwave_core::{ModelSpec, SpeedRequest, TravelingWave};

fn run(model: ModelSpec, v: SpeedRequest, cfg: &VerifyConfig) -> VerifyReport {
    let wave = TravelingWave::new(model, v, 0.0, None).unwrap();
    let report = verify(&wave, cfg).unwrap().report;
    eprintln!("{:?}: {report:?}", model.kind());
    report
}

#[test]
fn default_runs_pass_for_every_model() {
    let cases = [
        (
            ModelSpec::kdv(1.0).unwrap(),
            SpeedRequest::Value(defaults::KDV_SPEED),
        ),
        (
            ModelSpec::SineGordon,
            SpeedRequest::Value(defaults::SINE_GORDON_VERIFY_SPEED),
        ),
        (ModelSpec::fisher_kpp(1.0, 6.0).unwrap(), SpeedRequest::Auto),
        (
            ModelSpec::burgers(1.0, 0.0, 1.0).unwrap(),
            SpeedRequest::Auto,
        ),
    ];
    for (model, v) in cases {
        let r = run(model, v, &VerifyConfig::default());
        assert!(r.passed, "{r:?}");
        assert!(r.speed_error <= 0.01);
        assert!(r.action_drift <= 0.01);
        assert!(r.residual_max <= 1e-9);
        assert!(r.snapshots_ok());
    }
}

trait SnapshotsOk {
    fn snapshots_ok(&self) -> bool;
}

impl SnapshotsOk for VerifyReport {
    fn snapshots_ok(&self) -> bool {
        self.steps > 0 && self.dt > 0.0 && self.grid_points >= 16
    }
}

#[test]
fn kpp_front_moves_at_five() {
    let r = run(
        ModelSpec::fisher_kpp(1.0, 6.0).unwrap(),
        SpeedRequest::Auto,
        &VerifyConfig::default(),
    );
    assert_eq!(r.v_claimed, 5.0);
    assert!((r.v_measured - 5.0).abs() <= 0.05);
}

#[test]
fn burgers_front_speed_is_mean_state() {
    let r = run(
        ModelSpec::burgers(1.0, 0.0, 2.0).unwrap(),
        SpeedRequest::Auto,
        &VerifyConfig::default(),
    );
    assert!((r.v_measured - 1.0).abs() <= 0.01);
}

#[test]
fn kdv_run_translates_within_one_percent_of_crest() {
    let r = run(
        ModelSpec::kdv(1.0).unwrap(),
        SpeedRequest::Value(1.0),
        &VerifyConfig::default(),
    );
    assert!((r.duration - 5.0).abs() < 1e-12);
    assert!((r.dx - 0.05).abs() < 1e-12);
    assert!((r.v_measured - 1.0).abs() <= 0.01);
    assert!(r.translation_error <= 1e-2);
}

#[test]
fn misclaimed_speed_fails() {
    let cfg = VerifyConfig {
        claimed_speed: Some(2.0),
        ..VerifyConfig::default()
    };
    let r = run(ModelSpec::kdv(1.0).unwrap(), SpeedRequest::Value(1.0), &cfg);
    assert!(!r.passed);
    assert!(r.residual_max > 0.1);
    assert!(r.speed_error > 0.4);
}
