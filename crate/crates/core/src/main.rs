fn main() {
    std::process::exit(poverty_fgt::cli::run(std::env::args_os()));
}
