fn main() {
    std::process::exit(bonnet_cli::main_with_args(std::env::args_os()));
}
