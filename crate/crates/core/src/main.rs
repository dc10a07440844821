fn main() {
    std::process::exit(vrtestlint::cli::main_exit());
}
