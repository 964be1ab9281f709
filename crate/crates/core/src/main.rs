fn main() {
    std::process::exit(gadgetforge::cli::run(std::env::args_os()));
}
