//! End-to-end tests of the command-line surface: external formats, exit
//! codes, determinism, and the config precedence rule.

use relhom::cli::{parse_seq_json, parse_subcat, run, run_to_exit, Command, JobSpec, OutputFormat};
use relhom::cohomology::ModuleSes;
use relhom::complexes::Complex;
use relhom::modules::parse_module_literal;

fn text_job(command: Command) -> JobSpec {
    JobSpec {
        command,
        seed: 0,
        format: OutputFormat::Text,
    }
}

#[test]
fn resolve_round_trips_the_complex_schema() {
    let json: serde_json::Value = serde_json::from_str(
        r#"{ "modulus": 4, "components": {"-1": [4], "0": [4]}, "differentials": {"-1": [[2]]} }"#,
    )
    .unwrap();
    let t = Complex::from_json(&json).unwrap();
    assert_eq!(t.component(-1).orders(), &[4]);
    assert_eq!(t.differential(-1).entry(0, 0), 2);
    assert_eq!(Complex::from_json(&t.to_json()).unwrap(), t);

    let job = text_job(Command::Resolve {
        t,
        x: parse_subcat("GP", 4).unwrap(),
        depth: 3,
    });
    let (code, report) = run_to_exit(&job);
    assert_eq!(code, 0, "{report}");
    assert!(report.contains("postconditions verified"), "{report}");
}

#[test]
fn les_sequence_file_schema() {
    let value: serde_json::Value =
        serde_json::from_str(r#"{"modulus":4,"modules":[[2],[4],[2]],"f":[[2]],"g":[[1]]}"#)
            .unwrap();
    let seq = parse_seq_json(&value).unwrap();
    assert_eq!(seq.sub().orders(), &[2]);
    assert_eq!(seq.mid().orders(), &[4]);

    let job = text_job(Command::Les {
        variant: relhom::cli::LesVariant::Contravariant,
        m: parse_module_literal("Z2", Some(4)).unwrap(),
        seq,
        x: parse_subcat("PROJ", 4).unwrap(),
        range: 3,
    });
    let (code, report) = run_to_exit(&job);
    assert_eq!(code, 0, "{report}");
    assert!(report.contains("node certificate"), "{report}");
    assert!(
        report.contains("exact at all certified nodes: yes"),
        "{report}"
    );
}

#[test]
fn les_rejects_inexact_input_with_exit_2() {
    let value: serde_json::Value = serde_json::from_str(
        // g is not surjective onto Z4
        r#"{"modulus":4,"modules":[[2],[4],[4]],"f":[[2]],"g":[[2]]}"#,
    )
    .unwrap();
    assert!(parse_seq_json(&value).is_err());
}

#[test]
fn ext_csv_matches_schema_exactly() {
    let m = 4;
    let job = JobSpec {
        command: Command::Ext {
            m: parse_module_literal("Z2", Some(m)).unwrap(),
            n: parse_module_literal("Z2", Some(m)).unwrap(),
            x: parse_subcat("PROJ", m).unwrap(),
            range: 2,
        },
        seed: 0,
        format: OutputFormat::Csv,
    };
    let report = run(&job).unwrap();
    assert_eq!(report, "n,invariant_factors\n0,2\n1,2\n2,2\n");
}

#[test]
fn ext_json_matches_schema() {
    let m = 4;
    let job = JobSpec {
        command: Command::Tate {
            m: parse_module_literal("Z2", Some(m)).unwrap(),
            n: parse_module_literal("Z2", Some(m)).unwrap(),
            route: relhom::cli::TateRoute::Complete,
            n_min: 1,
            n_max: 2,
            window: 5,
            x: parse_subcat("GP", m).unwrap(),
            w: parse_subcat("PROJ", m).unwrap(),
        },
        seed: 0,
        format: OutputFormat::Json,
    };
    let report = run(&job).unwrap();
    let value: serde_json::Value = serde_json::from_str(report.trim()).unwrap();
    assert_eq!(value["flavor"], serde_json::json!("tate"));
    assert_eq!(value["entries"]["1"], serde_json::json!([2]));
    assert_eq!(value["entries"]["2"], serde_json::json!([2]));
}

#[test]
fn am_reports_node_certificates_and_summary() {
    let m = 4;
    let job = text_job(Command::Am {
        m: parse_module_literal("Z2", Some(m)).unwrap(),
        n: parse_module_literal("Z2", Some(m)).unwrap(),
        x: parse_subcat("GP", m).unwrap(),
        w: parse_subcat("PROJ", m).unwrap(),
        depth: 6,
    });
    let (code, report) = run_to_exit(&job);
    assert_eq!(code, 0, "{report}");
    // the report embeds maps and per-node data so im = ker can be re-checked
    assert!(report.contains("map:"), "{report}");
    assert!(report.contains("node certificate"), "{report}");
    assert!(report.contains("exact at all nodes, d = 0"), "{report}");
}

#[test]
fn byte_identical_reports_for_fixed_seed() {
    let job = JobSpec {
        command: Command::Prop { budget: 3 },
        seed: 99,
        format: OutputFormat::Json,
    };
    let a = run(&job).unwrap();
    let b = run(&job).unwrap();
    assert_eq!(a, b);
}

#[test]
fn prop_zero_budget_exits_zero() {
    let job = text_job(Command::Prop { budget: 0 });
    let (code, report) = run_to_exit(&job);
    assert_eq!(code, 0, "{report}");
}

#[test]
fn demo_alias_names() {
    for name in ["z4-kernel", "example-3-10"] {
        let job = text_job(Command::Demo { name: name.into() });
        let (code, report) = run_to_exit(&job);
        assert_eq!(code, 0);
        assert!(report.contains("AtLeast(8)"), "{report}");
    }
}

#[test]
fn seq_module_ses_split_helper() {
    let a = parse_module_literal("Z2@4", None).unwrap();
    let b = parse_module_literal("Z4@4", None).unwrap();
    let seq = ModuleSes::split(&a, &b).unwrap();
    assert_eq!(seq.mid().orders(), &[4, 2]);
}

#[test]
fn golden_text_reports() {
    // pinned byte-for-byte so reports stay diffable across changes
    let m = 4;
    let ext = run(&JobSpec {
        command: Command::Ext {
            m: parse_module_literal("Z2", Some(m)).unwrap(),
            n: parse_module_literal("Z2", Some(m)).unwrap(),
            x: parse_subcat("PROJ", m).unwrap(),
            range: 3,
        },
        seed: 0,
        format: OutputFormat::Text,
    })
    .unwrap();
    assert_eq!(
        ext,
        "Ext_PROJ(Z2@4, Z2@4) for n = 0..=3\nn=0: Z2\nn=1: Z2\nn=2: Z2\nn=3: Z2\n"
    );

    let demo = run(&text_job(Command::Demo {
        name: "z4-kernel".into(),
    }))
    .unwrap();
    assert_eq!(
        demo,
        "kernel(x2 : Z4@4 -> Z4@4) = Z2\nx_pd(Z2, PROJ, 8) = AtLeast(8)\n"
    );

    // groups print in invariant-factor order, smallest first
    let mixed = parse_module_literal("Z4+Z2@4", None).unwrap().to_ab_group();
    assert_eq!(mixed.to_string(), "Z2 \u{2295} Z4");
}

#[test]
fn binary_end_to_end() {
    // drive the actual argv path once
    let code = relhom::cli::cli_main([
        "relhom", "ext", "--m", "4", "--M", "Z2", "--N", "Z2", "--X", "PROJ", "--range", "2",
    ]);
    assert_eq!(code, 0);
    let code = relhom::cli::cli_main(["relhom", "demo", "example-3-10"]);
    assert_eq!(code, 0);
    let code = relhom::cli::cli_main(["relhom", "demo", "missing"]);
    assert_eq!(code, 2);
}
