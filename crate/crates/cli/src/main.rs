fn main() {
    std::process::exit(nbarrier_cli::run(std::env::args_os()));
}
