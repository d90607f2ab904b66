#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .canonicalize()
        .unwrap()
}

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

/// The binary, run from the workspace root with a clean environment.
pub fn memtier<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(env!("CARGO_BIN_EXE_memtier"))
        .args(args)
        .current_dir(workspace_root())
        .env_remove("MEMTIER_SYSTEM")
        .env_remove("RUST_LOG")
        .output()
        .expect("spawn memtier")
}

pub const S25: &str = "fixtures/systems/testbed-25.json";
pub const S50: &str = "fixtures/systems/testbed-50-50.json";
pub const S75: &str = "fixtures/systems/testbed-75.json";
pub const APPS: [&str; 6] = [
    "fixtures/apps/hypre.json",
    "fixtures/apps/nekrs.json",
    "fixtures/apps/superlu.json",
    "fixtures/apps/bfs.json",
    "fixtures/apps/hpl.json",
    "fixtures/apps/xsbench.json",
];

/// One CLI invocation with stored outputs. `{tmp}` in an argument is
/// replaced by a scratch directory; `files` lists extra outputs written
/// there.
pub struct Case {
    pub name: &'static str,
    pub args: Vec<&'static str>,
    pub files: &'static [&'static str],
}

fn case(name: &'static str, args: &[&'static str], files: &'static [&'static str]) -> Case {
    Case {
        name,
        args: args.to_vec(),
        files,
    }
}

pub fn cases() -> Vec<Case> {
    let with_apps = |prefix: &[&'static str], suffix: &[&'static str]| {
        let mut v = prefix.to_vec();
        v.extend(APPS);
        v.extend(suffix);
        v
    };
    vec![
        case(
            "curve-uniform",
            &["curve", "fixtures/samples/uniform.csv"],
            &[],
        ),
        case(
            "curve-skewed",
            &[
                "curve",
                "fixtures/samples/skewed.csv",
                "--plot",
                "{tmp}/curve.svg",
            ],
            &["curve.svg"],
        ),
        case(
            "curve-skewed-json",
            &["--format", "json", "curve", "fixtures/samples/skewed.csv"],
            &[],
        ),
        case(
            "curve-remote-8k",
            &[
                "curve",
                "fixtures/samples/uniform.csv",
                "--tier",
                "remote",
                "--page-size",
                "8192",
            ],
            &[],
        ),
        case(
            "prefetch",
            &[
                "prefetch",
                "fixtures/counters/prefetch.csv",
                "--plot",
                "{tmp}/prefetch.svg",
            ],
            &["prefetch.svg"],
        ),
        case(
            "prefetch-json",
            &[
                "--format",
                "json",
                "prefetch",
                "fixtures/counters/prefetch.csv",
            ],
            &[],
        ),
        case(
            "tiering-xsbench-50",
            &[
                "--system",
                S50,
                "tiering",
                "fixtures/phases/xsbench-like.json",
            ],
            &[],
        ),
        case(
            "tiering-mixed-75",
            &[
                "--system",
                S75,
                "tiering",
                "fixtures/phases/mixed.json",
                "--plot",
                "{tmp}/tiering.svg",
            ],
            &["tiering.svg"],
        ),
        case(
            "tiering-hypre-25-json",
            &[
                "--system",
                S25,
                "--format",
                "json",
                "tiering",
                "fixtures/apps/hypre.json",
            ],
            &[],
        ),
        case(
            "roofline-mixed",
            &[
                "--system",
                S50,
                "roofline",
                "fixtures/phases/mixed.json",
                "--plot",
                "{tmp}/roofline.svg",
            ],
            &["roofline.svg"],
        ),
        case(
            "roofline-hpl-json",
            &[
                "--system",
                S50,
                "--format",
                "json",
                "roofline",
                "fixtures/apps/hpl.json",
            ],
            &[],
        ),
        case(
            "lbench-calibrate-2t",
            &[
                "--system",
                S50,
                "lbench",
                "calibrate",
                "--threads",
                "2",
                "--levels",
                "10..50",
            ],
            &[],
        ),
        case(
            "lbench-calibrate-2t-json",
            &[
                "--system",
                S50,
                "--format",
                "json",
                "lbench",
                "calibrate",
                "--threads",
                "2",
                "--levels",
                "10..50",
            ],
            &[],
        ),
        case(
            "lbench-calibrate-12t",
            &[
                "--system",
                S50,
                "lbench",
                "calibrate",
                "--threads",
                "12",
                "--plot",
                "{tmp}/calibrate.svg",
            ],
            &["calibrate.svg"],
        ),
        case(
            "lbench-predict-peak",
            &[
                "--system",
                S50,
                "lbench",
                "predict",
                "--nflop",
                "1",
                "--threads",
                "12",
            ],
            &[],
        ),
        case(
            "lbench-predict-rfo",
            &[
                "--system",
                S50,
                "lbench",
                "predict",
                "--nflop",
                "8",
                "--threads",
                "4",
                "--rfo",
            ],
            &[],
        ),
        case(
            "sim-sensitivity",
            &with_apps(
                &["--system", S50, "sim", "sensitivity"],
                &["--plot", "{tmp}/sensitivity.svg"],
            ),
            &["sensitivity.svg"],
        ),
        case(
            "sim-sensitivity-json",
            &[
                "--system",
                S50,
                "--format",
                "json",
                "sim",
                "sensitivity",
                APPS[0],
                APPS[1],
                APPS[4],
                "--levels",
                "0..50",
            ],
            &[],
        ),
        case(
            "sim-ic",
            &with_apps(&["--system", S50, "sim", "ic"], &["--plot", "{tmp}/ic.svg"]),
            &["ic.svg"],
        ),
        case(
            "sim-schedule-seed7",
            &with_apps(
                &["--system", S50, "sim", "schedule", "--seed", "7"],
                &[
                    "--runs-out",
                    "{tmp}/runs.csv",
                    "--plot",
                    "{tmp}/schedule.svg",
                ],
            ),
            &["runs.csv", "schedule.svg"],
        ),
        case(
            "sim-schedule-seed7-json",
            &with_apps(
                &[
                    "--system", S50, "--format", "json", "sim", "schedule", "--seed", "7",
                ],
                &[],
            ),
            &[],
        ),
    ]
}

/// `(golden file name, produced bytes)` for every output of the case.
pub fn run_case(c: &Case) -> Result<Vec<(String, Vec<u8>)>, String> {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let tmp_str = tmp.path().to_str().unwrap().to_string();
    let args: Vec<String> = c
        .args
        .iter()
        .map(|a| a.replace("{tmp}", &tmp_str))
        .collect();
    let out = memtier(&args);
    if !out.status.success() {
        return Err(format!(
            "{}: exit {:?}: {}",
            c.name,
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    let mut produced = vec![(format!("{}.out", c.name), out.stdout)];
    for f in c.files {
        let bytes =
            std::fs::read(tmp.path().join(f)).map_err(|e| format!("{}: {f}: {e}", c.name))?;
        produced.push((format!("{}.{f}", c.name), bytes));
    }
    Ok(produced)
}

/// Compares a case against its goldens; `UPDATE_GOLDEN=1` rewrites them.
pub fn check_case(c: &Case) -> Result<(), String> {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    for (name, bytes) in run_case(c)? {
        let path = golden_dir().join(&name);
        if update {
            std::fs::write(&path, &bytes).map_err(|e| e.to_string())?;
            continue;
        }
        let expected = std::fs::read(&path).map_err(|e| format!("{name}: missing golden ({e})"))?;
        if expected != bytes {
            return Err(format!(
                "{name}: output differs from golden\n--- expected\n{}\n--- actual\n{}",
                String::from_utf8_lossy(&expected),
                String::from_utf8_lossy(&bytes)
            ));
        }
    }
    Ok(())
}
