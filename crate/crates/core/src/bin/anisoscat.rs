fn main() {
    std::process::exit(anisoscat::cli::main_with_args(std::env::args_os()));
}
