fn main() {
    std::process::exit(sigma_forge_cli::app::main_with_args(std::env::args_os()));
}
