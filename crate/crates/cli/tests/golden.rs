//! Golden reports for the fixture jobs, byte-identical across runs and thread counts.
//! Regenerate with `UPDATE_GOLDEN=1 cargo test -p exalg-cli --test golden`.

use std::path::{Path, PathBuf};
use std::process::Command;

const CASES: &[(&str, i32)] = &[
    ("twisted_basis_cyclic", 0),
    ("twisted_basis_sign", 0),
    ("fixed_weights_gl3", 0),
    ("intertwiner_adjoint", 0),
    ("intertwiner_not_fixed", 2),
    ("twisted_trace_swap", 0),
    ("finiteness_step1_gl3", 0),
    ("finiteness_step2_diagonal", 0),
    ("finiteness_step2_infinite", 2),
    ("excursion_eval_trace", 0),
    ("hecke_eval_sym2", 0),
    ("span_fit_fricke", 0),
    ("span_fit_missing", 2),
    ("semisimplify_triangular", 0),
    ("same_component_ss", 0),
    ("same_component_diag", 2),
    ("frobenius_empty", 2),
    ("frobenius_antidiagonal", 0),
    ("weight_partition_reorder", 0),
    ("weight_partition_unequal", 2),
    ("error_bad_rational", 1),
    ("error_relator", 1),
];

fn dir(sub: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join(sub)
}

fn run(name: &str, format: &str, threads: &str) -> (String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_exalg"))
        .arg("--job")
        .arg(dir("fixtures").join(format!("{name}.json")))
        .args(["--format", format])
        .env("RAYON_NUM_THREADS", threads)
        .output()
        .expect("binary runs");
    (String::from_utf8(out.stdout).expect("utf-8 report"), out.status.code().expect("exit code"))
}

fn check(name: &str, format: &str, ext: &str, exit: i32) -> Result<(), String> {
    let (first, code) = run(name, format, "1");
    if code != exit {
        return Err(format!("{name}: exit {code}, expected {exit}"));
    }
    for threads in ["1", "4"] {
        let (again, _) = run(name, format, threads);
        if again != first {
            return Err(format!("{name}.{ext}: output differs with {threads} threads"));
        }
    }
    let golden = dir("golden").join(format!("{name}.{ext}"));
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&golden, &first).unwrap();
        return Ok(());
    }
    let expected = std::fs::read_to_string(&golden).map_err(|e| format!("{}: {e}", golden.display()))?;
    if expected != first {
        return Err(format!("{name}.{ext}: differs from golden file"));
    }
    Ok(())
}

#[test]
fn reports_match_golden_files_across_runs_and_thread_counts() {
    let failures: Vec<String> = CASES
        .iter()
        .filter_map(|&(name, exit)| check(name, "json", "json", exit).err())
        .chain(["span_fit_fricke", "same_component_diag"].iter().filter_map(|&n| {
            let exit = CASES.iter().find(|c| c.0 == n).unwrap().1;
            check(n, "md", "md", exit).err()
        }))
        .collect();
    assert!(failures.is_empty(), "{failures:#?}");
}

#[test]
fn every_command_has_a_fixture() {
    for cmd in exalg_cli::job::COMMANDS {
        let covered = CASES.iter().any(|(name, _)| {
            let text = std::fs::read_to_string(dir("fixtures").join(format!("{name}.json"))).unwrap();
            text.contains(&format!("\"command\": \"{cmd}\""))
        });
        assert!(covered, "no fixture for {cmd}");
    }
}
