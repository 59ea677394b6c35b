fn main() {
    std::process::exit(msdd_cli::parse_and_dispatch(std::env::args_os()));
}
