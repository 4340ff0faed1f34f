fn main() {
    std::process::exit(evt_renyi::cli::main_with_args(std::env::args_os()));
}
