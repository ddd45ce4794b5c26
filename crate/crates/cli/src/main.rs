fn main() {
    std::process::exit(nlheat_cli::run_cli(std::env::args_os()));
}
