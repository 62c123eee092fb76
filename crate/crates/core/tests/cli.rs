use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

const HEADER: &str =
    "case_id,p,r,alpha,regime,s,lattice_norm,integral_norm,pi_low,pi_high,classification";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fock-summing"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write_demo_atoms(dir: &Path) -> (String, f64) {
    let rows = [
        (0.0, 0.0, 1.0),
        (1.5, -0.5, 0.25),
        (-2.0, 1.0, 2.0),
        (0.3, 2.7, 0.5),
    ];
    let mut text = String::from("x,y,mass\n");
    for (x, y, m) in rows {
        text.push_str(&format!("{x},{y},{m}\n"));
    }
    let path = dir.join("demo.csv");
    std::fs::write(&path, text).unwrap();
    (
        path.to_str().unwrap().to_string(),
        rows.iter().map(|r| r.2).sum(),
    )
}

fn significant_digits(field: &str) -> usize {
    let mantissa = field.split(['e', 'E']).next().unwrap();
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    digits.trim_start_matches('0').len()
}

#[test]
fn composition_identity_symbol_is_not_summing() {
    let o = run(&[
        "classify-composition",
        "--a",
        "1",
        "--b",
        "0",
        "--p",
        "2",
        "--r",
        "1",
        "--alpha",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("verdict     NOT_SUMMING"));
}

#[test]
fn composition_accepts_complex_coefficients() {
    let o = run(&[
        "classify-composition",
        "--a",
        "0.3,-0.4",
        "--b",
        "-1,2",
        "--p",
        "3",
        "--r",
        "2",
        "--window",
        "8",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("verdict     SUMMING"));
    let o = run(&[
        "classify-composition",
        "--symbol",
        "0,0,1",
        "--p",
        "2",
        "--r",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("NOT_BOUNDED"));
}

#[test]
fn volterra_linear_symbol_depends_on_exponents() {
    let o = run(&[
        "classify-volterra",
        "--g",
        "0,1",
        "--p",
        "3",
        "--r",
        "3",
        "--window",
        "8",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("verdict     SUMMING"));
    let o = run(&[
        "classify-volterra",
        "--g",
        "0,1",
        "--p",
        "3",
        "--r",
        "2",
        "--window",
        "8",
    ]);
    assert!(stdout(&o).contains("verdict     NOT_SUMMING"));
}

#[test]
fn embedding_brackets_the_hilbert_schmidt_norm_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let (atoms, total) = write_demo_atoms(dir.path());
    let csv = dir.path().join("out.csv");
    let measure = format!("atoms:{atoms}");
    let args = [
        "classify-embedding",
        "--p",
        "2",
        "--r",
        "2",
        "--alpha",
        "1",
        "--weight",
        "const:1",
        "--measure",
        &measure,
        "--csv",
        csv.to_str().unwrap(),
    ];
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(!text.contains('\r'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], HEADER);
    let f: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(f.len(), 11);
    assert_eq!(f[0], "0");
    assert_eq!(f[10], "summing_certified");
    for numeric in &f[5..10] {
        assert!(significant_digits(numeric) <= 12, "{numeric}");
    }
    let (lo, hi): (f64, f64) = (f[8].parse().unwrap(), f[9].parse().unwrap());
    let exact = (total / PI).sqrt();
    assert!(lo <= exact && exact <= hi, "{exact} not in [{lo}, {hi}]");

    let again = dir.path().join("again.csv");
    let mut args2 = args.to_vec();
    let last = args2.len() - 1;
    args2[last] = again.to_str().unwrap();
    assert_eq!(run(&args2).status.code(), Some(0));
    assert_eq!(std::fs::read(&csv).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn inconclusive_embedding_exits_two() {
    let o = run(&[
        "classify-embedding",
        "--p",
        "3",
        "--r",
        "2",
        "--measure",
        "gauss:0.5",
        "--weight",
        "hat@poly:2",
        "--window",
        "8",
        "--radius",
        "12",
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stdout(&o).contains("classification  inconclusive"));
}

#[test]
fn errors_exit_one_with_a_message() {
    for args in [
        vec!["no-such-command"],
        vec![
            "classify-embedding",
            "--p",
            "2",
            "--r",
            "2",
            "--measure",
            "bogus",
        ],
        vec![
            "classify-embedding",
            "--p",
            "0.5",
            "--r",
            "2",
            "--measure",
            "zero",
        ],
        vec![
            "classify-embedding",
            "--p",
            "2",
            "--r",
            "2",
            "--measure",
            "atoms:/nonexistent/atoms.csv",
        ],
        vec!["kernel-norm", "--u", "1,2,3", "--p", "2"],
        vec!["verify", "--suite", "nope"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!stderr(&o).is_empty(), "{args:?}");
    }
}

#[test]
fn verify_is_deterministic_and_passes() {
    let a = run(&["verify", "--suite", "diag", "--seed", "7"]);
    let b = run(&["verify", "--suite", "diag", "--seed", "7"]);
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    assert_eq!(a.stdout, b.stdout);
    let hs = run(&["verify", "--suite", "hs", "--seed", "7"]);
    assert_eq!(hs.status.code(), Some(0), "{}", stdout(&hs));
    assert!(stdout(&hs).contains("suite hs: PASS"));
}

#[test]
fn sweep_rows_are_sorted_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (atoms, _) = write_demo_atoms(dir.path());
    let config = dir.path().join("sweep.cfg");
    std::fs::write(
        &config,
        format!("# small sweep\np = 1.5 | 3\nr = 1 | 4\nweight = unit\nmeasure = atoms:{atoms} | lebesgue\nwindow = 6\nradius = 10\n"),
    )
    .unwrap();
    let out = dir.path().join("sweep.csv");
    let o = run(&[
        "sweep",
        "--config",
        config.to_str().unwrap(),
        "--csv",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], HEADER);
    assert_eq!(lines.len(), 1 + 8);
    let ids: Vec<usize> = lines[1..]
        .iter()
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(ids, (0..8).collect::<Vec<_>>());
    assert!(lines[1..5]
        .iter()
        .all(|l| l.ends_with("summing_certified") && !l.ends_with("not_summing_certified")));
    assert!(lines[5..]
        .iter()
        .all(|l| l.ends_with("not_summing_certified")));

    let piped = run(&["sweep", "--config", config.to_str().unwrap()]);
    assert_eq!(piped.stdout, std::fs::read(&out).unwrap());
}

#[test]
fn apr_and_kernel_norm_report() {
    let o = run(&[
        "apr-constant",
        "--p",
        "2",
        "--weight",
        "poly:2",
        "--window",
        "6",
        "--radius",
        "10",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("membership  stable"));
    let o = run(&[
        "kernel-norm",
        "--u",
        "1.5,-2",
        "--p",
        "2",
        "--alpha",
        "1",
        "--weight",
        "unit",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let ratio: f64 = stdout(&o)
        .lines()
        .find_map(|l| l.strip_prefix("ratio"))
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    assert!(ratio > 0.0);
}

#[test]
fn differentiation_reduces_to_an_embedding() {
    let o = run(&[
        "classify-differentiation",
        "--k",
        "1",
        "--p",
        "2",
        "--r",
        "2",
        "--measure",
        "atom:0.5,0.5,1",
        "--window",
        "6",
        "--radius",
        "10",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("verdict     SUMMING"));
}
