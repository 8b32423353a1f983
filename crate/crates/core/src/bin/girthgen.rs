fn main() {
    std::process::exit(girthgen::cli::main_with_args(std::env::args_os()));
}
