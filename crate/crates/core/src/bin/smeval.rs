fn main() {
    std::process::exit(smeval::cli::main());
}
