fn main() {
    std::process::exit(delta_forge::cli::main_exit_code());
}
