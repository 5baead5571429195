use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use fqhyper_cli::{init_workers, load, run, Flags};

fn main() -> ExitCode {
    let flags = Flags::parse();
    let cfg = match load(&flags) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if flags.dump_config {
        print!("{}", cfg.to_kv());
        return ExitCode::SUCCESS;
    }
    init_workers(cfg.workers);
    let out = run(&cfg);
    let _ = std::io::stdout().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().write_all(out.stderr.as_bytes());
    ExitCode::from(out.status.code())
}
