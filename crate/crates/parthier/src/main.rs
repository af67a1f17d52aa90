fn main() {
    std::process::exit(parthier::cli::main_with(std::env::args_os()));
}
