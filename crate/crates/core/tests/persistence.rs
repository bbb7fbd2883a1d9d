use std::fs;

use qsurrogate_core::optim::{train, BatchSize, TrainConfig};
use qsurrogate_core::reupload::{AnsatzKind, ReuploadModel};
use qsurrogate_core::surrogate::{fit_exact, full_lattice, nodes_in_region, FourierSurrogate};
use qsurrogate_core::regions::Region;
use qsurrogate_core::targets::{grid_sample, write_samples_csv, SampleGrid, TargetFunction, TargetName};

#[test]
fn trained_model_and_surrogate_reload_bit_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let target = TargetFunction::new(TargetName::RandomTrig, 5);
    let (xs, ys) = grid_sample(&target, &SampleGrid::square(-1.0, 1.0, 6, 2).unwrap()).unwrap();
    let init = ReuploadModel::init_normal(AnsatzKind::StronglyEntanglingReupload, 2, 2, 2, 0.01, 1).unwrap();
    let report = train(&init, &xs, &ys, &TrainConfig::nesterov(5, 0.5, 0.9, BatchSize::Full, 0)).unwrap();
    let model = init.with_theta(report.final_theta.clone()).unwrap();

    let path = dir.path().join("model.json");
    fs::write(&path, model.to_json()).unwrap();
    let back = ReuploadModel::from_json(&fs::read_to_string(&path).unwrap()).unwrap();
    for x in &xs {
        assert_eq!(back.forward(x).unwrap().to_bits(), model.forward(x).unwrap().to_bits());
    }

    let nodes = nodes_in_region(&Region::HyperCube { half_width: 1.0, dim: 2 }, 2, 2).unwrap();
    let fit = fit_exact(&model.forward_many(&nodes).unwrap(), &full_lattice(2, 2).unwrap(), &nodes).unwrap();
    let spath = dir.path().join("surrogate.json");
    fs::write(&spath, fit.surrogate.to_json()).unwrap();
    let sback = FourierSurrogate::from_json(&fs::read_to_string(&spath).unwrap()).unwrap();
    assert_eq!(sback, fit.surrogate);

    let cpath = dir.path().join("samples.csv");
    write_samples_csv(fs::File::create(&cpath).unwrap(), &xs, &ys).unwrap();
    let text = fs::read_to_string(&cpath).unwrap();
    assert_eq!(text.lines().count(), xs.len() + 1);
    assert!(text.starts_with("x1,x2,y\n"));

    let tpath = dir.path().join("trace.csv");
    report.write_csv(fs::File::create(&tpath).unwrap()).unwrap();
    assert_eq!(fs::read_to_string(&tpath).unwrap().lines().count(), 7);
}
