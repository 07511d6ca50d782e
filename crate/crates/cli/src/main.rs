fn main() {
    std::process::exit(varifold_cli::run(std::env::args_os()));
}
