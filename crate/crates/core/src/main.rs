fn main() {
    std::process::exit(phdae::bench_cli::run_cli(std::env::args_os()));
}
