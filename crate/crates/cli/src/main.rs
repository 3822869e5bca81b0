mod args;
mod commands;
mod json;

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;

use args::Cli;

fn main() -> ExitCode {
    let code = execute(std::env::args_os(), &mut io::stdout().lock(), &mut io::stderr().lock());
    ExitCode::from(code)
}

/// Runs one invocation against the given streams and returns the exit code:
/// 0 on success, 1 on runtime failure, 2 on usage errors.
fn execute<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return e.exit_code() as u8;
        }
    };

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.common.threads {
        if n == 0 {
            let _ = writeln!(err, "error: --threads must be at least 1");
            return 2;
        }
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start worker pool: {e}");
            return 1;
        }
    };

    let output = match pool.install(|| commands::run(&cli.command, &cli.common)) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return if e.is_usage() { 2 } else { 1 };
        }
    };

    let written = match &cli.common.out {
        Some(path) => fs::write(path, &output.bytes),
        None => out.write_all(&output.bytes).and_then(|_| out.flush()),
    };
    if let Err(e) = written {
        let _ = writeln!(err, "error: cannot write output: {e}");
        return 1;
    }
    if output.ok {
        0
    } else {
        1
    }
}

#[cfg(test)]
mod tests {
    use clap::CommandFactory;

    use super::*;

    struct Run {
        code: u8,
        stdout: String,
        stderr: String,
    }

    fn heislab(args: &[&str]) -> Run {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        // Pin the seed so a HEISLAB_SEED in the environment cannot leak in.
        let seed: &[&str] = if args.contains(&"--seed") {
            &[]
        } else {
            &["--seed", "1"]
        };
        let argv = std::iter::once("heislab")
            .chain(args.iter().copied())
            .chain(seed.iter().copied());
        let code = execute(argv, &mut out, &mut err);
        Run {
            code,
            stdout: String::from_utf8(out).unwrap(),
            stderr: String::from_utf8(err).unwrap(),
        }
    }

    fn json(run: &Run) -> serde_json::Value {
        assert_eq!(run.code, 0, "{}", run.stderr);
        serde_json::from_str(&run.stdout).unwrap()
    }

    #[test]
    fn bounds_table() {
        let run = heislab(&["bounds"]);
        let v = json(&run);
        assert!((v["c_lower"].as_f64().unwrap() - 1.700468).abs() < 1e-6);
        assert!((v["c_upper"].as_f64().unwrap() - 2.072738).abs() < 1e-6);
        assert!(
            run.stdout.starts_with("{\"lambda1_1\":1.23370055013617,\"lambda1_2\":"),
            "{}",
            run.stdout
        );
        let order = ["lambda1_1", "lambda1_2", "x_star", "f_at_xstar", "c_lower", "c_upper"];
        let pos: Vec<usize> = order
            .iter()
            .map(|k| run.stdout.find(&format!("\"{k}\"")).unwrap())
            .collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn negative_epsilon_is_a_usage_error() {
        let run = heislab(&["smallball", "--epsilon", "-1"]);
        assert_eq!(run.code, 2);
        assert!(run.stderr.contains("epsilon"));
        assert!(run.stdout.is_empty());
    }

    #[test]
    fn unknown_flags_and_commands_exit_two() {
        assert_eq!(heislab(&["bounds", "--frobnicate"]).code, 2);
        assert_eq!(heislab(&["nosuch"]).code, 2);
        assert_eq!(heislab(&["bounds", "--format", "csv"]).code, 2);
        assert_eq!(heislab(&["check", "--threads", "0"]).code, 2);
        assert_eq!(heislab(&["smallball", "--n-paths", "1e5"]).code, 2);
    }

    #[test]
    fn help_goes_to_stdout() {
        let run = heislab(&["--help"]);
        assert_eq!(run.code, 0);
        assert!(run.stdout.contains("calibrate"));
    }

    #[test]
    fn too_few_paths_is_a_runtime_error() {
        let run = heislab(&[
            "exitrate",
            "--process",
            "bm2",
            "--n-paths",
            "50",
            "--steps-per-unit",
            "50",
        ]);
        assert_eq!(run.code, 1);
        assert!(run.stderr.contains("insufficient tail data"), "{}", run.stderr);
    }

    #[test]
    fn calibrate_is_reproducible() {
        let args = [
            "calibrate",
            "--process",
            "bm1",
            "--n-paths",
            "3000",
            "--steps-per-unit",
            "200",
        ];
        let a = heislab(&args);
        let b = heislab(&args);
        assert_eq!(a.stdout, b.stdout);
        let v = json(&a);
        assert_eq!(v["kind"], "BM1");
        assert!((v["exact"].as_f64().unwrap() - 1.2337005501361697).abs() < 1e-15);
    }

    #[test]
    fn thread_count_does_not_change_output() {
        let args = [
            "smallball",
            "--process",
            "heis",
            "--epsilon",
            "1",
            "--n-paths",
            "1500",
            "--steps-per-unit",
            "50",
        ];
        let one = heislab(&[&args[..], &["--threads", "1"]].concat());
        let three = heislab(&[&args[..], &["--threads", "3"]].concat());
        assert_eq!(one.code, 0);
        assert_eq!(one.stdout, three.stdout);
    }

    #[test]
    fn smallball_record_layout() {
        let run = heislab(&[
            "smallball",
            "--process",
            "bm2",
            "--epsilon",
            "0.9",
            "--n-paths",
            "2000",
            "--steps-per-unit",
            "100",
        ]);
        let order = [
            "kind", "epsilon", "p_hat", "ci_low", "ci_high", "n_paths", "steps", "seed",
        ];
        let pos: Vec<usize> = order
            .iter()
            .map(|k| run.stdout.find(&format!("\"{k}\"")).unwrap())
            .collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]), "{}", run.stdout);
        let v = json(&run);
        assert!(v["ci_low"].as_f64().unwrap() <= v["p_hat"].as_f64().unwrap());
        assert_eq!(v["kind"], "BM2");
    }

    #[test]
    fn smallball_grid_fits_a_rate() {
        let run = heislab(&[
            "smallball",
            "--process",
            "bm2",
            "--epsilon-grid",
            "0.8,1.0,1.2",
            "--n-paths",
            "4000",
            "--steps-per-unit",
            "100",
        ]);
        let v = json(&run);
        assert_eq!(v["estimates"].as_array().unwrap().len(), 3);
        let fit = &v["fit"];
        for k in ["kind", "rate", "stderr", "intercept", "window", "n_points", "seed"] {
            assert!(!fit[k].is_null(), "missing {k}");
        }
        assert_eq!(fit["n_points"], 3);
        assert_eq!(
            heislab(&["smallball", "--epsilon", "1", "--epsilon-grid", "1,2,3"]).code,
            2
        );
    }

    #[test]
    fn exitrate_record_fields() {
        let v = json(&heislab(&[
            "exitrate",
            "--process",
            "bm2",
            "--n-paths",
            "3000",
            "--steps-per-unit",
            "100",
        ]));
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(
            keys,
            ["intercept", "kind", "n_points", "rate", "seed", "stderr", "window"]
        );
        let w = v["window"].as_array().unwrap();
        assert!(w[0].as_f64() < w[1].as_f64());
    }

    #[test]
    fn seed_falls_back_to_environment() {
        let cmd = Cli::command();
        let seed = cmd.get_arguments().find(|a| a.get_id() == "seed").unwrap();
        assert_eq!(seed.get_env().and_then(|e| e.to_str()), Some("HEISLAB_SEED"));
        let a = heislab(&["simulate", "--steps-per-unit", "20"]);
        let b = heislab(&["simulate", "--steps-per-unit", "20", "--seed", "2"]);
        assert_eq!(b.code, 0);
        assert_ne!(a.stdout, b.stdout);
    }

    #[test]
    fn simulate_csv_dump() {
        let run = heislab(&["simulate", "--horizon", "2", "--steps-per-unit", "10", "--stride", "3"]);
        let lines: Vec<&str> = run.stdout.lines().collect();
        assert_eq!(lines[0], "t,x,y,z,sup_norm");
        // Rows at steps 0, 3, …, 18 and the terminal step 20.
        assert_eq!(lines.len(), 1 + 7 + 1);
        assert!(lines.last().unwrap().starts_with("2,"));
        let v = json(&heislab(&["simulate", "--format", "json", "--steps-per-unit", "50"]));
        assert!(v["horizontality_defect"].as_f64().unwrap() < 1e-12);
    }

    #[test]
    fn out_flag_writes_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bounds.json");
        let run = heislab(&["bounds", "--out", path.to_str().unwrap()]);
        assert_eq!(run.code, 0);
        assert!(run.stdout.is_empty());
        assert_eq!(std::fs::read_to_string(&path).unwrap(), heislab(&["bounds"]).stdout);
    }

    #[test]
    fn identity_checks_emit_json() {
        let v = json(&heislab(&[
            "scalingcheck",
            "--epsilon",
            "0.9",
            "--n-paths",
            "500",
            "--steps-per-unit",
            "50",
            "--ks-samples",
            "200",
        ]));
        assert_eq!(v["checks"].as_array().unwrap().len(), 1);
        let v = json(&heislab(&["timechange", "--n-paths", "300", "--steps-per-unit", "50"]));
        assert!(v["ks"]["p_value"].as_f64().is_some());
        let v = json(&heislab(&["increments", "--n-paths", "300", "--steps-per-unit", "20"]));
        assert!(v["variance_ratio"].as_f64().unwrap() > 1.0);
        assert_eq!(heislab(&["timechange", "--n-paths", "1"]).code, 2);
    }

    #[test]
    fn chung_single_trace_csv() {
        let run = heislab(&[
            "chung",
            "--n-seeds",
            "1",
            "--mode",
            "area",
            "--horizon",
            "1000",
            "--steps-per-unit",
            "5",
            "--format",
            "csv",
        ]);
        let mut lines = run.stdout.lines();
        assert_eq!(lines.next(), Some("t,phi,stat,running_min"));
        assert_eq!(lines.next().unwrap().split(',').next(), Some("100"));
    }

    #[test]
    fn chung_band_summary() {
        let v = json(&heislab(&[
            "chung",
            "--n-seeds",
            "4",
            "--horizon",
            "2000",
            "--steps-per-unit",
            "5",
        ]));
        let arr = v.as_array().unwrap();
        assert_eq!(arr.len(), 2);
        assert_eq!(arr[0]["mode"], "group");
        assert_eq!(arr[1]["mode"], "area");
        assert_eq!(arr[0]["n_seeds"], 4);
        let one = json(&heislab(&[
            "chung",
            "--n-seeds",
            "2",
            "--horizon",
            "2000",
            "--steps-per-unit",
            "5",
            "--mode",
            "group",
            "--band",
            "0,100",
        ]));
        assert_eq!(one["fraction"].as_f64(), Some(1.0));
        assert_eq!(heislab(&["chung", "--band", "0,1"]).code, 2);
    }

    #[test]
    fn check_reports_every_property() {
        let v = json(&heislab(&["check", "--cases", "500"]));
        assert_eq!(v["passed"], true);
        assert_eq!(v["properties"].as_array().unwrap().len(), 8);
    }
}
