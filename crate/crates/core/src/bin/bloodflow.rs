fn main() {
    std::process::exit(bloodflow::io::main_with_args(std::env::args_os()));
}
