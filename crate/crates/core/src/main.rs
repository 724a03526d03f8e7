fn main() {
    std::process::exit(geoweb::cli::run(std::env::args_os()));
}
