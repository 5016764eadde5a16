use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tricomi")).args(args).env_remove("TRICOMI_LOG").output().unwrap()
}

fn field(json: &str, key: &str) -> f64 {
    let pat = format!("\"{key}\":");
    let start = json.find(&pat).unwrap_or_else(|| panic!("{key} missing")) + pat.len();
    let rest = &json[start..];
    let end = rest.find([',', '}']).unwrap();
    rest[..end].parse().unwrap()
}

#[test]
fn help_exits_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["verify", "--help"]).status.code(), Some(0));
}

#[test]
fn constants_at_half() {
    let out = run(&["constants", "--x0", "-0.5"]);
    assert!(out.status.success());
    let s = String::from_utf8(out.stdout).unwrap();
    assert!((field(&s, "C3") - 0.672458).abs() < 1e-6);
    assert!((field(&s, "x_plus") + 0.25).abs() < 1e-15);
    assert!((field(&s, "x_minus") + 0.75).abs() < 1e-15);
    assert!((field(&s, "C4") - 0.5).abs() < 1e-15);
}

#[test]
fn claim_aliases_match_names() {
    for (name, alias) in [("lemma4.5", "h-profile"), ("cor4.6", "g1-bounds"), ("cor4.8", "g2-bounds")] {
        let a = run(&["verify", name, "--x0", "-0.7", "--grid", "2000"]);
        let b = run(&["verify", alias, "--x0", "-0.7", "--grid", "2000"]);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn bad_arguments_exit_two() {
    assert_eq!(run(&["constants", "--x0", "0.5"]).status.code(), Some(2));
    assert_eq!(run(&["constants", "--x0-range", "-1:-0.1"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "nonsense", "--x0", "-0.5"]).status.code(), Some(2));
    assert_eq!(run(&["constants", "--x0", "-0.5", "--x0-range", "-1:-0.1:3"]).status.code(), Some(2));
}

#[test]
fn h_plot_is_convex_with_minimum_at_vertex() {
    let out = run(&["plot", "h", "--x0", "-0.3"]);
    assert!(out.status.success());
    let s = String::from_utf8(out.stdout).unwrap();
    let start = s.find("id=\"h\"").unwrap();
    let pts = &s[start..];
    let pts = &pts[pts.find("points=\"").unwrap() + 8..];
    let pts = &pts[..pts.find('"').unwrap()];
    // pixel y grows downwards, so h is -py
    let xy: Vec<(f64, f64)> = pts
        .split(' ')
        .map(|p| {
            let (a, b) = p.split_once(',').unwrap();
            (a.parse().unwrap(), -b.parse::<f64>().unwrap())
        })
        .collect();
    assert_eq!(xy.len(), 401);
    let (imin, _) = xy.iter().enumerate().min_by(|a, b| a.1 .1.total_cmp(&b.1 .1)).unwrap();
    assert!((imin as i64 - 200).abs() <= 2, "minimum at point {imin}");
    // second differences, allowing for the 0.01 px rounding of the output
    for w in xy.windows(3) {
        assert!(w[0].1 - 2.0 * w[1].1 + w[2].1 > -0.03);
    }
}

#[test]
fn eigen_csv_export_has_header_and_nodes() {
    let dir = std::env::temp_dir().join(format!("tricomi-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("u.csv");
    let out = run(&["eigen", "--x0", "-0.5", "--grid", "32", "--count", "1", "--export", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with('x'));
    assert!(lines.count() > 100);
    std::fs::remove_dir_all(&dir).unwrap();
}
