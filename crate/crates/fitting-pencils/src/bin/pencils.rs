fn main() {
    std::process::exit(fitting_pencils::cli::run(std::env::args_os().skip(1)));
}
