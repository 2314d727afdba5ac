fn main() {
    std::process::exit(geodepth::cli::main());
}
