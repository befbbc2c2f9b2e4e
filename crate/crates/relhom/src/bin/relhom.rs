fn main() {
    std::process::exit(relhom::cli::cli_main(std::env::args_os()));
}
