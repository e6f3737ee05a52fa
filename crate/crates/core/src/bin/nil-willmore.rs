fn main() {
    std::process::exit(nil_willmore::cli::run(std::env::args_os()));
}
