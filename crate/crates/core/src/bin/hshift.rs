fn main() {
    std::process::exit(hshift::cli::run(std::env::args_os()));
}
