fn main() {
    std::process::exit(bitflip_cli::main_with_args(std::env::args_os()));
}
