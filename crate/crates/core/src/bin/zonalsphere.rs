fn main() {
    std::process::exit(zonalsphere::cli::main_with_args(std::env::args_os()));
}
