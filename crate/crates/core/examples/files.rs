//! Writes a curve file, reads it back and emits plot rows, all through the
//! command-line entry point.

use curvebound::cli::run_command;

fn main() {
    let dir = std::env::temp_dir().join("curvebound-example");
    std::fs::create_dir_all(&dir).unwrap();
    let curve = dir.join("sigma3.json");
    let csv = dir.join("sigma3.csv");
    let steps: [Vec<String>; 3] = [
        ["gen", "circle", "--rho", "0.6", "--k", "3", "--kappa1", "0", "--out"].map(String::from).into_iter().chain([curve.display().to_string()]).collect(),
        vec!["classify".into(), curve.display().to_string()],
        vec!["export".into(), curve.display().to_string(), "--csv".into(), csv.display().to_string()],
    ];
    for args in steps {
        let mut argv = vec!["curvebound".to_string()];
        argv.extend(args);
        let code = run_command(&argv, &mut std::io::stdout(), &mut std::io::stderr());
        println!("[{}] exit {code}", argv[1]);
    }
    let text = std::fs::read_to_string(&csv).unwrap();
    println!("{} rows; first: {}", text.lines().count() - 1, text.lines().nth(1).unwrap());
}
