fn main() {
    std::process::exit(kinsy::cli::run(std::env::args_os()));
}
