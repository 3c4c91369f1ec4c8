fn main() {
    std::process::exit(nbpas::cli::run_command(std::env::args_os()));
}
