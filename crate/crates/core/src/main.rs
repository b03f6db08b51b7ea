fn main() {
    std::process::exit(fermisea::cli::main_with_args(std::env::args_os()));
}
