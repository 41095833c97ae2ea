fn main() {
    std::process::exit(bisym_cli::run(std::env::args_os()));
}
