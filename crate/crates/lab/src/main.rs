fn main() {
    std::process::exit(cdma_lab::cli::run(std::env::args_os()));
}
