fn main() {
    std::process::exit(samksepa_cli::run(std::env::args_os()));
}
