fn main() {
    std::process::exit(superfricke::cli::cli_main());
}
