fn main() {
    std::process::exit(nami::cli::main());
}
