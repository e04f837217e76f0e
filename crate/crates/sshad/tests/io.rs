mod support;

use std::path::Path;

use proptest::prelude::*;
use sshad::error::Error;
use sshad::io::{load_dataset, write_csv, Format};
use sshad::sshad_core::data::Instance;
use support::write;

fn load(path: &Path, labeled: bool) -> sshad::Result<sshad::io::Loaded> {
    load_dataset(path, Format::from_path(path).unwrap(), labeled, None)
}

#[test]
fn csv_rows_and_classes() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "d.csv", "a, b ,class\n1,2.5,zeta\n-3e2,0,alpha\n4,5,zeta\n");
    let d = load(&p, true).unwrap();
    assert_eq!(d.feature_names, ["a", "b"]);
    assert_eq!(d.class_names, ["alpha", "zeta"]);
    assert_eq!(
        d.instances,
        vec![
            Instance::labeled(vec![1.0, 2.5], 1),
            Instance::labeled(vec![-300.0, 0.0], 0),
            Instance::labeled(vec![4.0, 5.0], 1),
        ]
    );
    assert!(d.rejected_lines.is_empty());
}

#[test]
fn integer_labels_sort_numerically() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "d.csv", "x,class\n0,10\n0,2\n0,1\n");
    let d = load(&p, true).unwrap();
    assert_eq!(d.class_names, ["1", "2", "10"]);
    let labels: Vec<_> = d.instances.iter().map(|i| i.label.unwrap()).collect();
    assert_eq!(labels, [2, 1, 0]);
}

#[test]
fn explicit_classes_fix_the_order_and_reject_strangers() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "d.csv", "x,class\n0,b\n1,a\n");
    let classes = vec!["b".to_string(), "a".to_string(), "c".to_string()];
    let d = load_dataset(&p, Format::Csv, true, Some(&classes)).unwrap();
    assert_eq!(d.instances[1].label, Some(1));
    assert_eq!(d.class_names, classes);

    let only = vec!["a".to_string(), "c".to_string()];
    let err = load_dataset(&p, Format::Csv, true, Some(&only)).unwrap_err();
    assert!(matches!(err, Error::Schema { .. }), "{err}");
}

#[test]
fn single_class_is_a_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "d.csv", "x,class\n0,a\n1,a\n");
    assert!(matches!(load(&p, true), Err(Error::Schema { .. })));
}

#[test]
fn parse_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "d.csv", "x,y,class\n1,2,a\n1,oops,b\n");
    match load(&p, true) {
        Err(Error::Parse { line, msg, .. }) => {
            assert_eq!(line, 3);
            assert!(msg.contains("oops"), "{msg}");
        }
        other => panic!("{other:?}"),
    }
    let p = write(dir.path(), "e.csv", "x,y,class\n1,2,a\n1,2\n");
    assert!(matches!(load(&p, true), Err(Error::Parse { line: 3, .. })));
}

#[test]
fn non_finite_and_missing_rows_are_rejected_with_their_lines() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "d.csv", "x,y,class\n1,2,a\nNaN,2,a\n1,inf,b\n?,1,b\n3,4,b\n");
    let d = load(&p, true).unwrap();
    assert_eq!(d.rejected_lines, [3, 4, 5]);
    assert_eq!(d.instances.len(), 2);
    assert_eq!(d.instances[1].features, [3.0, 4.0]);
}

#[test]
fn line_endings_do_not_matter() {
    let dir = tempfile::tempdir().unwrap();
    let lf = "x,class\n1,a\n2,b\n";
    let a = load(&write(dir.path(), "lf.csv", lf), true).unwrap();
    let b = load(&write(dir.path(), "crlf.csv", &lf.replace('\n', "\r\n")), true).unwrap();
    let c = load(&write(dir.path(), "cr.csv", &lf.replace('\n', "\r")), true).unwrap();
    let mixed = load(&write(dir.path(), "mixed.csv", "x,class\r\n1,a\n2,b\r"), true).unwrap();
    assert_eq!(a, b);
    assert_eq!(a, c);
    assert_eq!(a, mixed);
}

#[test]
fn unlabeled_csv_has_no_class_column() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "u.csv", "x,y\n1,2\n3,4\n");
    let d = load(&p, false).unwrap();
    assert_eq!(d.instances, vec![Instance::unlabeled(vec![1.0, 2.0]), Instance::unlabeled(vec![3.0, 4.0])]);
    assert!(d.class_names.is_empty());
}

const ARFF: &str = "% power system events
@relation 'grid events'

@attribute 'R1-PA1:VH' numeric
@attribute freq REAL
@attribute relay integer
@attribute marker {NoEvents, Attack, Natural}

@data
% first row
1.5,60.0,3,Attack
2,59.9,4,'NoEvents'
?,60,1,Natural
";

#[test]
fn arff_keeps_declared_class_order() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "d.arff", ARFF);
    let d = load(&p, true).unwrap();
    assert_eq!(d.feature_names, ["R1-PA1:VH", "freq", "relay"]);
    assert_eq!(d.class_names, ["NoEvents", "Attack", "Natural"]);
    assert_eq!(d.instances, vec![
        Instance::labeled(vec![1.5, 60.0, 3.0], 1),
        Instance::labeled(vec![2.0, 59.9, 4.0], 0),
    ]);
    assert_eq!(d.rejected_lines, [13]);
}

#[test]
fn arff_rejects_sparse_rows_and_string_features() {
    let dir = tempfile::tempdir().unwrap();
    let sparse = ARFF.replace("1.5,60.0,3,Attack", "{0 1.5, 3 Attack}");
    assert!(matches!(load(&write(dir.path(), "s.arff", &sparse), true), Err(Error::Parse { line: 11, .. })));
    let string = ARFF.replace("freq REAL", "freq string");
    assert!(matches!(load(&write(dir.path(), "t.arff", &string), true), Err(Error::Schema { .. })));
}

#[test]
fn csv_write_then_load_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let names = vec!["a".to_string(), "b".to_string()];
    let classes = vec!["x".to_string(), "y".to_string()];
    let data = vec![
        Instance::labeled(vec![0.1 + 0.2, -1e-300], 1),
        Instance::labeled(vec![std::f64::consts::PI, 1e300], 0),
    ];
    let p = dir.path().join("out/d.csv");
    write_csv(&p, &names, &classes, &data).unwrap();
    let back = load_dataset(&p, Format::Csv, true, Some(&classes)).unwrap();
    assert_eq!(back.instances, data);
    assert_eq!(back.feature_names, names);
}

#[test]
fn missing_file_is_an_io_error() {
    let err = load(Path::new("/nonexistent/d.csv"), true).unwrap_err();
    assert!(matches!(err, Error::Io { .. }));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn csv_round_trip(rows in prop::collection::vec((prop::collection::vec(-1e6f64..1e6, 3), 0usize..3), 3..20)) {
        let dir = tempfile::tempdir().unwrap();
        let names: Vec<String> = (0..3).map(|i| format!("f{i}")).collect();
        let classes: Vec<String> = ["p", "q", "r"].iter().map(|s| s.to_string()).collect();
        let data: Vec<Instance> = rows.into_iter().map(|(x, y)| Instance::labeled(x, y)).collect();
        let p = dir.path().join("d.csv");
        write_csv(&p, &names, &classes, &data).unwrap();
        let back = load_dataset(&p, Format::Csv, true, Some(&classes)).unwrap();
        prop_assert_eq!(back.instances, data);
    }
}
