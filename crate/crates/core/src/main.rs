fn main() {
    let code = factorbench::cli::run(std::env::args_os());
    std::process::exit(code);
}
