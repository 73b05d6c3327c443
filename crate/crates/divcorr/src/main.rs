fn main() {
    std::process::exit(divcorr::cli::main_from(std::env::args_os()));
}
