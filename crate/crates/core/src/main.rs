use std::io::{self, Write};
use std::panic;

fn main() {
    let code = panic::catch_unwind(|| {
        let stdin = io::stdin();
        let stdout = io::stdout();
        let stderr = io::stderr();
        let mut out = stdout.lock();
        let code = bell_lp::cli::run(
            std::env::args_os(),
            &mut stdin.lock(),
            &mut out,
            &mut stderr.lock(),
        );
        let _ = out.flush();
        code
    })
    .unwrap_or(bell_lp::cli::EXIT_INTERNAL);
    std::process::exit(code);
}
