use std::io::{self, Write};

use clap::Parser;
use feaso_cli::{run, Cli, Io, EXIT_INPUT, EXIT_OK};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            std::process::exit(if e.use_stderr() { EXIT_INPUT } else { EXIT_OK });
        }
    };
    let stdin = io::stdin();
    let mut stdin = stdin.lock();
    let mut stdout = io::stdout().lock();
    let mut stderr = io::stderr().lock();
    let code = run(cli, &mut Io { stdin: &mut stdin, stdout: &mut stdout, stderr: &mut stderr });
    let _ = stdout.flush();
    std::process::exit(code);
}
