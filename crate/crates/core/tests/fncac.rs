use cac_core::fncac::{evaluate_accuracy, generate_training_set, run_pipeline, write_fncac, default_scenarios, PipelineConfig};
use cac_core::traffic::LoadModel;

#[test]
fn desk_pipeline_learns_the_oracle() {
    let cfg = PipelineConfig::new(50, 1);
    let (mut model, report) = run_pipeline(&cfg).unwrap();
    assert_eq!(report.samples, 1000);
    assert!(report.heldout_accuracy >= 0.95, "{report:?}");
    assert!(report.final_loss < report.initial_loss);
    assert!(report.admit_fraction > 0.1 && report.admit_fraction < 0.9);

    // Fresh states from an unseen seed, labelled by the same oracle.
    let oracle = model.oracle.clone().unwrap();
    let scenarios = default_scenarios(50, LoadModel::PerChannel).unwrap();
    let fresh = generate_training_set(&scenarios, &oracle, &cfg.env, 100, 0xFEED).unwrap();
    let acc = evaluate_accuracy(&mut model, &fresh).unwrap();
    assert!(acc >= 0.9, "accuracy on fresh states {acc}");

    let (again, report2) = run_pipeline(&cfg).unwrap();
    let (mut a, mut b) = (Vec::new(), Vec::new());
    model.network.reset_state();
    write_fncac(&model, &mut a).unwrap();
    write_fncac(&again, &mut b).unwrap();
    assert_eq!(a, b);
    assert_eq!(report, report2);
}
