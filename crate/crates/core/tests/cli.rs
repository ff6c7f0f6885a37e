//! The `sectorkit` binary end to end: file formats, report determinism, exit codes.

use std::path::Path;
use std::process::{Command, Output};

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sectorkit::cli::{digest, parse_operator_set, write_operator_set, AnalysisReport};
use sectorkit::{ComplexMatrix, OperatorSet, C64};

const DIAG112: &str = r#"{"dim": 3, "operators": [{"name": "H", "re": [[1,0,0],[0,1,0],[0,0,2]], "im": [[0,0,0],[0,0,0],[0,0,0]]}]}"#;

fn sectorkit(args: &[&str], envs: &[(&str, &Path)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_sectorkit"));
    cmd.args(args).env_remove(sectorkit::cli::OUT_DIR_ENV);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn report(out: &Output) -> AnalysisReport {
    serde_json::from_slice(&out.stdout).expect("stdout is a report")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn operator_files_round_trip_bit_for_bit(seed in any::<u64>(), n in 1usize..5, count in 1usize..4) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let mats: Vec<ComplexMatrix> = (0..count)
            .map(|_| {
                // wide exponent range so shortest-representation printing is exercised
                ComplexMatrix::from_fn(n, |_, _| {
                    let scale = 10f64.powi(r.random_range(-300..300));
                    C64::new(r.random_range(-1.0..1.0) * scale, r.random_range(-1.0..1.0))
                })
            })
            .collect();
        let set = OperatorSet::from_matrices(mats).unwrap();
        let text = write_operator_set(&set);
        let back = parse_operator_set(&text).unwrap();
        prop_assert_eq!(back.len(), set.len());
        for ((na, a), (nb, b)) in set.members().iter().zip(back.members()) {
            prop_assert_eq!(na, nb);
            for (x, y) in a.matrix().iter().zip(b.matrix().iter()) {
                prop_assert_eq!(x.re.to_bits(), y.re.to_bits());
                prop_assert_eq!(x.im.to_bits(), y.im.to_bits());
            }
        }
        prop_assert_eq!(write_operator_set(&back), text);
    }
}

#[test]
fn reports_embed_seed_and_input_digest() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "diag.json", DIAG112);
    let out = sectorkit(&["--seed", "41", "algebra", &file], &[]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r.seed, 41);
    assert_eq!(r.command, "algebra");
    assert_eq!(r.input_digest, digest(DIAG112.as_bytes()));
    assert!(r.passed);
}

#[test]
fn reruns_are_byte_identical_and_seeds_are_respected() {
    let a = sectorkit(&["--seed", "5", "bargmann", "--samples", "50"], &[]);
    let b = sectorkit(&["--seed", "5", "bargmann", "--samples", "50"], &[]);
    let c = sectorkit(&["--seed", "6", "bargmann", "--samples", "50"], &[]);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    assert_eq!(report(&c).seed, 6);
}

#[test]
fn out_dir_flag_and_environment_override() {
    let flag_dir = tempfile::tempdir().unwrap();
    let env_dir = tempfile::tempdir().unwrap();
    let out = sectorkit(
        &[
            "--out-dir",
            flag_dir.path().to_str().unwrap(),
            "parastat",
            "--n",
            "2",
            "--d",
            "2",
        ],
        &[],
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        std::fs::read(flag_dir.path().join("parastat.json")).unwrap(),
        out.stdout
    );

    let out = sectorkit(
        &[
            "--out-dir",
            flag_dir.path().to_str().unwrap(),
            "flux",
            "--p",
            "0,0,1",
        ],
        &[(sectorkit::cli::OUT_DIR_ENV, env_dir.path())],
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(env_dir.path().join("flux.json").exists());
    assert!(!flag_dir.path().join("flux.json").exists());
}

#[test]
fn text_rendering() {
    let out = sectorkit(&["--text", "parastat", "--n", "3", "--d", "2"], &[]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("sectorkit 0.1.0 parastat\nseed: 0\n"));
    assert!(text.contains("passed: true"));
}

#[test]
fn input_errors_exit_with_one_and_a_location() {
    let dir = tempfile::tempdir().unwrap();
    let broken = write(
        dir.path(),
        "broken.json",
        "{\"dim\": 2,\n \"operators\": [ {\"name\": \"A\", \"re\": [[1, 0], [0, 1]], }\n]}",
    );
    let out = sectorkit(&["algebra", &broken], &[]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 2"), "{err}");

    let mismatched = write(
        dir.path(),
        "shape.json",
        r#"{"dim": 2, "operators": [{"name": "A", "re": [[1,0,0],[0,1,0],[0,0,1]], "im": [[0,0,0],[0,0,0],[0,0,0]]}]}"#,
    );
    assert_eq!(
        sectorkit(&["algebra", &mismatched], &[]).status.code(),
        Some(1)
    );
    assert_eq!(
        sectorkit(&["algebra", "/nonexistent/file.json"], &[])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        sectorkit(&["bargmann", "--m1", "1", "--m2", "1"], &[])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        sectorkit(&["flux", "--lmax", "40"], &[]).status.code(),
        Some(1)
    );
}

#[test]
fn group_file_round_trip_through_the_binary() {
    let dir = tempfile::tempdir().unwrap();
    let text = sectorkit::cli::write_group(
        &sectorkit::cocycles::MultiplierTable::pauli(),
        Some(&sectorkit::cocycles::pauli_rep()),
    );
    let parsed = sectorkit::cli::parse_group(&text).unwrap();
    let pauli = sectorkit::cocycles::MultiplierTable::pauli();
    // files carry no group name, only the table
    assert_eq!(parsed.multiplier.values(), pauli.values());
    assert_eq!(parsed.multiplier.group().table(), pauli.group().table());
    assert_eq!(parsed.rep.as_ref().map(Vec::len), Some(4));
    let file = write(dir.path(), "pauli.json", &text);
    let out = sectorkit(&["extension", &file], &[]);
    let r = report(&out);
    assert_eq!(r.input_digest, digest(text.as_bytes()));
    assert_eq!(out.status.code(), Some(if r.passed { 0 } else { 2 }));
}
