fn main() {
    std::process::exit(mdgi_cli::run(std::env::args_os()));
}
