fn main() {
    std::process::exit(curvebound::cli::main_from_env());
}
