use std::process::ExitCode;

fn main() -> ExitCode {
    let r = endoscopy::cli::run(std::env::args_os());
    for line in &r.diagnostics {
        eprintln!("{line}");
    }
    if r.json && !r.payload.is_null() {
        println!("{}", r.payload);
    } else {
        for line in &r.text {
            println!("{line}");
        }
    }
    ExitCode::from(r.exit_code as u8)
}
