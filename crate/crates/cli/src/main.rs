fn main() {
    std::process::exit(soficlab_cli::run(std::env::args()));
}
