fn main() {
    std::process::exit(sectorkit::cli::run(std::env::args_os()));
}
