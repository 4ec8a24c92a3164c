use clap::error::ErrorKind;
use clap::Parser;
use fraclog_cli::{run, Cli};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(failure) = run(&cli) {
        eprintln!("error: {failure}");
        std::process::exit(failure.exit_code());
    }
}
