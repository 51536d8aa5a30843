use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = match tanpq_cli::parse_args(std::env::args_os()) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match tanpq_cli::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tanpq: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
