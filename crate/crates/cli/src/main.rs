fn main() {
    let threads = std::env::var(momentumlab_cli::THREADS_ENV).ok();
    let code = momentumlab_cli::run_cli(
        std::env::args_os(),
        threads.as_deref(),
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    );
    std::process::exit(code);
}
