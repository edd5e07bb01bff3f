fn main() {
    std::process::exit(dfmo::cli::cli_main(std::env::args_os()));
}
