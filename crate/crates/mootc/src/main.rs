use std::fs;
use std::process::ExitCode;

use clap::Parser;
use mootc::{compile, diagnostic_json, Cli, DriverConfig};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let file_name = cli.input.display().to_string();
    let source = match fs::read_to_string(&cli.input) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{file_name}: {e}");
            return ExitCode::from(2);
        }
    };
    let config = DriverConfig {
        file_name: cli
            .input
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| file_name.clone()),
        entry: cli.entry.clone(),
        depth: cli.depth,
        promote: cli.promote,
        trace: cli.trace,
    };
    let out = compile(&source, &config);
    for line in &out.trace {
        eprintln!("{line}");
    }
    for d in &out.diagnostics {
        if cli.json_diagnostics {
            eprintln!("{}", diagnostic_json(d));
        } else {
            eprintln!("{}", d.render(&file_name));
        }
    }
    let mut code = out.exit_code;
    if let (Some(path), Some(dot)) = (&cli.dump_hierarchy, &out.dot) {
        if let Err(e) = fs::write(path, dot) {
            eprintln!("{}: {e}", path.display());
            code = code.max(3);
        }
    }
    if let Some(c) = &out.c_code {
        if code == 0 {
            if let Err(e) = fs::write(&cli.output, c) {
                eprintln!("{}: {e}", cli.output.display());
                code = 3;
            }
        }
    }
    ExitCode::from(code as u8)
}
