fn main() {
    std::process::exit(heunqes::cli::run(std::env::args_os()));
}
