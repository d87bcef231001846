//! The command line driven in-process: validate a config, simulate into a
//! temporary directory, then fit the written MSD file.

use std::path::Path;

use ptdiff::runner::cli::main_with_args;

fn main() {
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/normal_baseline.json");
    let config = config.display().to_string();
    let out = std::env::temp_dir().join("ptdiff-cli-recipes");
    let dir_override = format!("outputs.dir={}", out.display());
    let msd = out.join("msd.csv").display().to_string();

    let steps: Vec<Vec<&str>> = vec![
        vec!["ptdiff", "validate", &config],
        vec!["ptdiff", "simulate", &config, "--set", &dir_override],
        vec!["ptdiff", "fit", &msd, "--window", "0.01", "1"],
        vec!["ptdiff", "map-osp", "--c", "2", "--g", "2"],
    ];
    for args in steps {
        println!("$ {}", args.join(" "));
        let code = main_with_args(args);
        println!("(exit {code})");
    }
}
