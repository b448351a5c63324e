use std::process::ExitCode;

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let result = robust_aggregation::cli::run(&argv);
    if result.exit_code == 2 {
        eprintln!("{}", result.report);
    } else {
        println!("{}", result.report);
    }
    ExitCode::from(result.exit_code as u8)
}
