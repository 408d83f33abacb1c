fn main() {
    std::process::exit(qgase::cli::main_with(std::env::args_os()));
}
