use raywave::dynamics::run;
use raywave::io::verify::{verify_record, Status};
use raywave::model::{LaunchProfile, ScenarioConfig};

fn gaussian(coupling: bool) -> ScenarioConfig {
    let mut c = ScenarioConfig::new("g", 1e-3, LaunchProfile::gaussian(1.0), (-4.0, 4.0), 3000.0);
    c.n_rays = 401;
    c.coupling_enabled = coupling;
    c.output.record_every = 50;
    c.dt = c.default_dt();
    c
}

#[test]
fn coupled_gaussian_passes() {
    let report = verify_record(&run(gaussian(true)).unwrap()).unwrap();
    assert!(report.passed, "{report:#?}");
    for name in ["waist-trajectory", "oracle-l2", "on-axis-decay", "flux-closure", "momentum-norm"] {
        assert_eq!(report.check(name).unwrap().status, Status::Pass, "{name}");
    }
}

#[test]
fn coupling_off_is_an_expected_failure() {
    let report = verify_record(&run(gaussian(false)).unwrap()).unwrap();
    assert!(report.passed);
    assert_eq!(report.check("eikonal-straightness").unwrap().status, Status::Pass);
    assert_eq!(report.check("waist-trajectory").unwrap().status, Status::ExpectedFail);
    assert_eq!(report.check("oracle-l2").unwrap().status, Status::ExpectedFail);
}

#[test]
fn focusing_instead_of_spreading_fails_the_oracle() {
    let mut record = run(gaussian(true)).unwrap();
    let launch = record.launch().clone();
    for s in record.snapshots.iter_mut().skip(1) {
        for (r, r0) in s.front.rays.iter_mut().zip(&launch.rays) {
            r.x = 2.0 * r0.x - r.x;
            r.px = -r.px;
        }
    }
    let report = verify_record(&record).unwrap();
    assert!(!report.passed);
    assert_eq!(report.check("oracle-l2").unwrap().status, Status::Fail);
    assert_eq!(report.check("waist-trajectory").unwrap().status, Status::Fail);
}
