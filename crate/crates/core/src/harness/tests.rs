use std::fs;
use std::path::Path;

use super::*;
use crate::dataset::write_itemset_file;
use crate::hiding::Registry;
use crate::testutil::{d_toy, is};

fn toy_tree(root: &Path) -> Scenario {
    let ds = root.join("Datasets").join("toy");
    fs::create_dir_all(ds.join("3")).unwrap();
    write_database(&d_toy(), ds.join("toy.dat")).unwrap();
    write_itemset_file(&[is(&[1, 2])], ds.join("3").join("HS1.dat")).unwrap();
    Scenario::new(ds.join("toy.dat"), ds.join("3").join("HS1.dat"), Sigma::Count(3))
}

#[test]
fn discovery_walks_the_tree() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    let ds = root.join("Datasets").join("myDataset");
    for sub in ["0.05", "1625", "bogus"] {
        fs::create_dir_all(ds.join(sub)).unwrap();
    }
    fs::write(ds.join("myDataset.dat"), "1 2\n").unwrap();
    fs::write(ds.join("0.05").join("HS1.dat"), "1 2\n").unwrap();
    fs::write(ds.join("0.05").join("HS0.dat"), "1\n").unwrap();
    fs::write(ds.join("1625").join("HS1.dat"), "1 2\n").unwrap();
    fs::write(ds.join("bogus").join("HS1.dat"), "1 2\n").unwrap();
    // No dataset file: skipped.
    fs::create_dir_all(root.join("Datasets").join("orphan").join("3")).unwrap();
    fs::write(root.join("Datasets").join("orphan").join("3").join("HS.dat"), "1\n").unwrap();

    let found = discover_scenarios(root).unwrap();
    let ids: Vec<&str> = found.iter().map(|s| s.id.as_str()).collect();
    assert_eq!(ids, ["myDataset/0.05/HS0.dat", "myDataset/0.05/HS1.dat", "myDataset/1625/HS1.dat"]);
    assert!(matches!(found[1].sigma, Sigma::Fraction { num: 5, den: 100, .. }));
    assert_eq!(found[2].sigma, Sigma::Count(1625));
    assert_eq!(found[0].dataset_path, ds.join("myDataset.dat"));
    assert_eq!(discover_scenarios(root.join("Datasets")).unwrap(), found);

    let empty = tempfile::tempdir().unwrap();
    fs::create_dir_all(empty.path().join("Datasets")).unwrap();
    assert!(discover_scenarios(empty.path()).unwrap().is_empty());
    assert!(discover_scenarios(empty.path().join("missing")).is_err());
}

#[test]
fn runs_and_reports_d_toy() {
    let dir = tempfile::tempdir().unwrap();
    let sc = toy_tree(dir.path());
    assert_eq!(discover_scenarios(dir.path()).unwrap(), vec![sc.clone()]);
    let reg = Registry::builtin();
    let algs = vec!["max-accuracy".to_owned(), "wba".to_owned()];
    let opts = RunOptions {
        sanitized_dir: Some(dir.path().join("out")),
        ..RunOptions::default()
    };
    let bundle = run_experiment(std::slice::from_ref(&sc), &reg, &algs, &opts).unwrap();
    assert_eq!(bundle.reports.len(), 2);
    assert!(bundle.all_hidden());
    assert_eq!(bundle.sanitized_outputs.len(), 2);
    let wba_out = parse_database(&bundle.sanitized_outputs[1].path).unwrap();
    assert_eq!(wba_out.transaction(2).unwrap(), &[2]);
    assert_eq!(bundle.scenarios[0].sigma_min, 3);
    assert_eq!(bundle.scenarios[0].n_revised, 5);

    let empty = run_experiment(std::slice::from_ref(&sc), &reg, &[], &opts).unwrap();
    assert!(empty.reports.is_empty() && empty.failures.is_empty());
    assert!(run_experiment(std::slice::from_ref(&sc), &reg, &["nope".to_owned()], &opts).is_err());

    let (txt, csv) = write_reports(&bundle, dir.path().join("out")).unwrap();
    let text = fs::read_to_string(txt).unwrap();
    assert!(text.contains("== toy/3/HS1.dat"));
    assert!(text.contains("-- wba\n   raw changes: 1\n   side effects: 0\n   information loss: 5.26% (0.052632)"));
    let csv = fs::read_to_string(csv).unwrap();
    assert!(csv.starts_with("scenario,algorithm,sigma_min,"));
    assert!(csv.contains("toy/3/HS1.dat,wba,3,1,1,0,0.052632,"));

    let mut missing = sc.clone();
    missing.dataset_path = dir.path().join("nowhere.dat");
    missing.id = "missing".into();
    let b = run_experiment(&[missing, sc], &reg, &algs, &opts).unwrap();
    assert_eq!((b.reports.len(), b.failures.len()), (2, 2));
    assert!(!b.all_hidden());
}

#[test]
fn prework_matches_direct_computation() {
    let dir = tempfile::tempdir().unwrap();
    let sc = toy_tree(dir.path());
    let p = Prepared::load(&sc).unwrap();
    assert_eq!(p.frequent, mine_frequent(&d_toy(), 3).unwrap());
    let f = mine_frequent(&d_toy(), 3).unwrap();
    let ss = expand_sensitive(&f, &SensitiveSet::new([is(&[1, 2])]));
    assert_eq!(p.revised, revised_frequent(&f, &ss).unwrap());
}

#[test]
fn sampling_is_seeded() {
    let db = d_toy();
    let pick = sample_sensitive(&db, 3, 1, 7).unwrap();
    assert_eq!(pick.len(), 1);
    assert!([is(&[1, 2]), is(&[1, 3]), is(&[2, 3])].contains(&pick[0]));
    assert_eq!(sample_sensitive(&db, 3, 1, 7).unwrap(), pick);
    assert!(sample_sensitive(&db, 3, 0, 7).unwrap().is_empty());
    assert_eq!(sample_sensitive(&db, 3, 3, 1).unwrap().len(), 3);
    assert!(matches!(
        sample_sensitive(&db, 3, 4, 7),
        Err(Error::InsufficientItemsets { requested: 4, available: 3 })
    ));
    let seeds: std::collections::BTreeSet<Vec<Itemset>> =
        (0..32).map(|s| sample_sensitive(&db, 1, 2, s).unwrap()).collect();
    assert!(seeds.len() > 1);
}

fn fake_bundle(n_alg: usize, n_sc: usize) -> ReportBundle {
    let algorithms: Vec<String> = (0..n_alg).map(|a| format!("alg{a}")).collect();
    let scenarios: Vec<String> = (0..n_sc).map(|s| format!("ds/{}/HS.dat", 10 * (n_sc - s))).collect();
    let mut reports = Vec::new();
    for s in &scenarios {
        for a in &algorithms {
            reports.push(MetricsReport {
                algorithm_id: a.clone(),
                scenario_id: s.clone(),
                raw_changes: 1,
                side_effects: 0,
                information_loss: 1.0 / 19.0,
                cpu_time: 0.25,
                hidden_ok: true,
                notes: Vec::new(),
            });
        }
    }
    ReportBundle {
        scenarios: scenarios
            .iter()
            .enumerate()
            .map(|(k, id)| ScenarioSummary {
                id: id.clone(),
                dataset: "ds".into(),
                n_transactions: 100,
                sigma_min: 10 * (n_sc - k) as u32,
                n_sensitive: 20,
                n_frequent: 50,
                n_revised: 40,
            })
            .collect(),
        reports,
        failures: Vec::new(),
        sanitized_outputs: Vec::new(),
        run_config: RunConfig {
            algorithms,
            scenarios,
            solver_time_limit_secs: 60.0,
            solver_node_limit: None,
            exact_border: false,
            loss_scope: LossScope::Itemsets,
            seed: Some(1),
        },
    }
}

#[test]
fn plot_files() {
    let dir = tempfile::tempdir().unwrap();
    let mut b = fake_bundle(2, 4);
    b.reports.retain(|r| !(r.algorithm_id == "alg1" && r.scenario_id == "ds/10/HS.dat"));
    let path = emit_plot_data(&b, Axis::InformationLoss, XAxis::Auto, dir.path()).unwrap();
    let text = fs::read_to_string(path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    assert_eq!(lines[0], "sigma_min,alg0,alg1");
    assert_eq!(lines[1], "10,5.26,NA");
    assert_eq!(lines[4], "40,5.26,5.26");
    assert!(lines.iter().all(|l| l.split(',').count() == 3));

    let sizes = render_plot_string(&b, Axis::Changes, XAxis::ScenarioSize);
    assert!(sizes.starts_with("sensitive_itemsets,alg0,alg1\n20,1,NA\n20,1,1\n"));
    assert!(render_plot_string(&b, Axis::CpuTime, XAxis::SigmaMin).contains("40,0.250,0.250"));

    let empty = fake_bundle(2, 0);
    assert_eq!(render_plot_string(&empty, Axis::SideEffects, XAxis::Auto), "sensitive_itemsets,alg0,alg1\n");
    assert!(matches!("speed".parse::<Axis>(), Err(Error::UnknownAxis(_))));
    assert_eq!(Axis::parse_list("all").unwrap().len(), 4);
    assert_eq!(Axis::parse_list("changes,cpu-time").unwrap(), vec![Axis::Changes, Axis::CpuTime]);
}

fn render_plot_string(b: &ReportBundle, axis: Axis, x: XAxis) -> String {
    String::from_utf8(plot::render_plot(b, axis, x).unwrap()).unwrap()
}
