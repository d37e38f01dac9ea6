fn main() {
    std::process::exit(dephasing::cli::run(std::env::args_os()));
}
