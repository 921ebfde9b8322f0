use std::process::ExitCode;

fn main() -> ExitCode {
    // OKRWN_THREADS caps internal parallelism; unset means rayon's default
    if let Ok(text) = std::env::var("OKRWN_THREADS") {
        if let Ok(n) = text.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
        }
    }
    ExitCode::from(okrwn::cli::run(std::env::args()) as u8)
}
