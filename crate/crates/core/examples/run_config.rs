//! Running a command from an inline TOML config.

use psbench::config::RunConfig;
use psbench::report::{cmd_delta, cmd_orbit};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::temp_dir().join("psbench-run-config");
    let text = format!(
        r#"
generators = [[3.0, 0.0, 0.0, 0.3333333333333333], [1.6666666666666667, 1.3333333333333333, 1.3333333333333333, 1.6666666666666667]]
radius = 12.0
out = "{}"
"#,
        out.display()
    );
    let cfg = RunConfig::from_toml_str(&text)?;
    for path in cmd_orbit(&cfg)?.into_iter().chain(cmd_delta(&cfg)?) {
        println!("{}", path.display());
    }
    Ok(())
}
