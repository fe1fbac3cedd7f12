fn main() {
    std::process::exit(perfrepair::harness::cli_main());
}
