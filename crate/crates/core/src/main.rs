fn main() {
    std::process::exit(quadlat::cli::main_with_args(std::env::args_os()));
}
