use num_rational::BigRational;
use num_traits::One;
use ybx_core::abd::{AbdJson, AbdStructure};
use ybx_core::bundle::BundleData;
use ybx_core::catalog::{corpus, example, CatalogEntry};
use ybx_core::report::{Format, Report};
use ybx_core::scalar::{Backend, Fp, DEFAULT_PRIME};
use ybx_core::suite::{run_suite, SuiteConfig};
use ybx_core::tensor::Tensor2;
use ybx_core::trig::{eval_r, Evaluator, TrigSolution};

#[test]
fn structure_from_json_with_cycles() {
    let j: AbdJson =
        serde_json::from_str(r#"{"n":4,"c1":"(1 4 2 3)","c2":"(1 2 3 4)","a":[2]}"#).unwrap();
    let s = AbdStructure::try_from(j).unwrap();
    assert_eq!(s, example(&[2]));
    assert_eq!(s.to_string(), "n=4 C1=(1 4 2 3) C2=(1 2 3 4) A={3}");
}

#[test]
fn sparse_entries_round_trip() {
    let one = BigRational::one();
    let q = |a: i64, b: i64| BigRational::new(a.into(), b.into());
    let r = eval_r(&example(&[2]), &q(3, 2), &q(5, 7)).unwrap();
    let entries = r.to_entries();
    assert_eq!(entries.len(), r.nnz());
    let json = serde_json::to_string(&entries).unwrap();
    let back: Vec<_> = serde_json::from_str(&json).unwrap();
    assert_eq!(Tensor2::from_entries(4, &one, &back).unwrap(), r);
}

#[test]
fn solution_agrees_across_backends() {
    // evaluate at integers in both fields and reduce the rational result mod p
    let s = TrigSolution::new(example(&[2])).unwrap();
    let rq = s
        .eval(
            &BigRational::from_integer(2.into()),
            &BigRational::from_integer(3.into()),
        )
        .unwrap();
    let rp = s
        .eval(&Fp::new(2, DEFAULT_PRIME), &Fp::new(3, DEFAULT_PRIME))
        .unwrap();
    for ((i, j, k, l), c) in rq.nonzeros() {
        let num = Fp::from_i64(i64::try_from(c.numer().clone()).unwrap(), DEFAULT_PRIME);
        let den = Fp::from_i64(i64::try_from(c.denom().clone()).unwrap(), DEFAULT_PRIME);
        assert_eq!(
            &(num * ybx_core::scalar::Ring::try_inv(&den).unwrap()),
            rp.get(i, j, k, l)
        );
    }
    assert_eq!(rq.nnz(), rp.nnz());
}

#[test]
fn suite_report_round_trips_through_json() {
    let cfg = SuiteConfig {
        backend: Backend::Prime(DEFAULT_PRIME),
        points: 2,
        structures: Some(corpus(2)),
        bundles: 2,
        ..SuiteConfig::default()
    };
    let report = run_suite(&cfg).unwrap();
    assert!(report.pass, "{}", report.emit(Format::Text));
    let back: Report = serde_json::from_str(&report.emit(Format::Json)).unwrap();
    assert_eq!(back, report);
    assert_eq!(run_suite(&cfg).unwrap(), report);
}

#[test]
fn rational_suite_on_the_pinned_structures() {
    let entries: Vec<CatalogEntry> = corpus(4).into_iter().take(3).collect();
    let cfg = SuiteConfig {
        points: 2,
        structures: Some(entries),
        bundles: 0,
        ..SuiteConfig::default()
    };
    let report = run_suite(&cfg).unwrap();
    assert!(report.pass, "{}", report.emit(Format::Text));
    assert!(report.checks.iter().any(|c| c.check == "massey"));
}

#[test]
fn bundle_json_to_solution() {
    let b: BundleData =
        serde_json::from_str(r#"{"r":3,"n":1,"m":[[0],[1],[1]],"lambda":"-2/3"}"#).unwrap();
    assert!(b.is_simple());
    let sol = b.solution().unwrap();
    assert_eq!(sol.abd().n(), 3);
    let json = serde_json::to_string(&b).unwrap();
    assert_eq!(serde_json::from_str::<BundleData>(&json).unwrap(), b);
}

#[test]
fn bad_inputs_are_errors() {
    let bad = r#"{"n":3,"c1":"(1 2 3)","c2":"(1 2)(3","a":[]}"#;
    let j: AbdJson = serde_json::from_str(bad).unwrap();
    assert!(AbdStructure::try_from(j).is_err());
    assert!(
        serde_json::from_str::<BundleData>(r#"{"r":2,"n":1,"m":[[0],[1]],"lambda":"0"}"#).is_err()
    );
    assert!("fp:1000".parse::<Backend>().is_err());
    let cfg = SuiteConfig {
        points: 0,
        ..SuiteConfig::default()
    };
    assert!(run_suite(&cfg).is_err());
}
