fn main() {
    std::process::exit(ncfourier::cli::run(std::env::args_os()));
}
