fn main() {
    std::process::exit(hyperalg_cli::run(std::env::args_os()));
}
